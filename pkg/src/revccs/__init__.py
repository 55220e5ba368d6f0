"""Workbench for a reversible CCS whose transitions carry locally
generated identifiers: parsing, forward and backward execution, metatheory
checks, bisimilarity, and encodings into RCCS and CCSK."""

from .syntax import (Label, Process, parse_process, print_process,  # noqa: F401
                     free_names, thread_shape)
from .ident import (IdPattern, Seed, SeedLeaf, SeedPair, gamma,  # noqa: F401
                    pair, split, splitter_helper, unify, unsplit_for,
                    compatible_patterns, compatible_ids, downstream)
from .ilts import (IdentifiedProcess, enumerate_fwd, ccs_steps,  # noqa: F401
                   concurrent_fwd, identify, well_identified)
from .memory import (BranchRecord, MemEvent, Memory, dup_helper,  # noqa: F401
                     insert_at, subst_id, contains_id)
from .irlts import (ReplConfig, ReversibleProcess, RTransition,  # noqa: F401
                    Trace, causally_equivalent, concurrent_r, enumerate_all,
                    enumerate_bwd_r, enumerate_fwd_r, initial_state,
                    is_initial, normalize_trace, origin, parse_state,
                    parse_trace, print_state, random_trace, serialize_trace)
from .equiv import (apply_id_context, apply_rev_context,  # noqa: F401
                    apply_term_context, bf_bisimilar, sbf_bisimilar,
                    struct_equiv, struct_normalize, alpha_eq, HOLE, Hole,
                    RevContext, MCHole, MCPair, MCDup, is_memory_neutral)
from .encode import (prepare, to_ccsk, to_rccs, zip_memory,  # noqa: F401
                     print_ccsk, print_rccs, print_znode)

__version__ = "0.1.0"
