"""The reversible semantics: forward and backward rules over identified
processes with memories, reachability, mixed-direction concurrency, traces,
causal equivalence, and the flagged reversible-replication policies.

Backward enumeration keeps every derivable undo.  A memory does not record
at which nesting depth a choice was resolved or a restriction crossed, so a
state occasionally admits two undos of the same event rebuilding different
pasts; such same-identifier pairs are not concurrent (see concurrent_r) and
the square property is only claimed for concurrent pairs.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .ident import (Atomic, Identifier, IdPattern, Paired, Seed, SeedLeaf,
                    SeedPair, compatible_ids, components, downstream, gamma,
                    pair, parse_seed, seeds_compatible, splitter_helper,
                    unpair, unsplit_for)
from .ilts import dedup, split_first, split_second
from .memory import (EMPTY, BranchRecord, MemCons, MemEmpty, MemEvent,
                     MemMarked, MemPair, Memory, contains_id, dup_helper,
                     events_of, has_tags, insert_at, parse_memory,
                     print_memory, push, shape_ok, strip_last_record,
                     subst_id)
from .syntax import (TAU, UPS, Bang, IntChoice, Label, NdChoice, Nil, Par,
                     Prefix, Process, Restrict, Sum, parse_label,
                     parse_process, print_process)

FWD, BWD = "fwd", "bwd"


class ReplicationDisabled(ValueError):
    pass


class UnreachableState(ValueError):
    pass


@dataclass(frozen=True)
class ReplConfig:
    """Reversible replication policy.  Policies c) and d) are rejected: no
    backward rules exist for them and their status is conjectural.
    ``marks=False`` is a test hook that drops the protection tags and
    reproduces the two anomalous traces that motivate them."""

    policy: str
    marks: bool = True

    def __post_init__(self):
        if self.policy in ("C", "D", "c", "d"):
            raise ValueError(
                f"replication policy {self.policy} is unsupported: it has no "
                "backward rules and is left open")
        if self.policy not in ("A", "B"):
            raise ValueError(f"unknown replication policy {self.policy!r}")


@dataclass(frozen=True)
class ReversibleProcess:
    seed: Seed
    mem: Memory
    proc: Process

    def __str__(self):
        return print_state(self)


@dataclass(frozen=True)
class RTransition:
    source: ReversibleProcess
    ident: Identifier
    label: Label
    direction: str  # FWD | BWD
    target: ReversibleProcess

    def __str__(self):
        arrow = "--" if self.direction == FWD else "~~"
        return (f"{self.source} {arrow}[{self.ident} : {self.label}]"
                f"{arrow}> {self.target}")

    def signature(self):
        return (self.direction, self.ident, self.label)


def initial_state(p: Process, ip: IdPattern | None = None) -> ReversibleProcess:
    """The initial reversible process of a term: canonical identification
    and empty memories mirroring the thread structure."""
    ip = ip or IdPattern(0, 1)
    return ReversibleProcess(splitter_helper(ip, p), dup_helper(EMPTY, p), p)


def print_state(r: ReversibleProcess) -> str:
    return f"{r.seed} o {print_memory(r.mem)} |> {print_process(r.proc)}"


def parse_state(text: str) -> ReversibleProcess:
    head, sep, proc_text = text.partition(" |> ")
    if not sep:
        raise ValueError(f"bad state {text!r}")
    seed_text, sep, mem_text = head.partition(" o ")
    if not sep:
        raise ValueError(f"bad state {text!r}")
    return ReversibleProcess(parse_seed(seed_text), parse_memory(mem_text),
                             parse_process(proc_text))


# ---------------------------------------------------------------------------
# Forward rules

Step = tuple[Identifier, Label, Seed, Memory, Process]


def _choice_premise(s: Seed, m: Memory, p: Process):
    """Premise of a non-deterministic-choice operand.  The seed and memory
    are passed through unchanged: a parallel operand under a single pattern
    simply cannot act.  Distributing the pattern here would let the two
    operand threads resolve one choice under two compatible identifiers,
    and the square property would be lost with it."""
    return s, m


def _fwd(s: Seed, m: Memory, p: Process, repl: ReplConfig | None) -> list[Step]:
    out: list[Step] = []
    if isinstance(p, Nil):
        return out

    if isinstance(p, Prefix):
        if not isinstance(s, SeedLeaf):
            return out
        c, st = s.pattern.current, s.pattern.step
        e = MemEvent(gamma(c), p.label)
        out.append((gamma(c), p.label,
                    splitter_helper(IdPattern(c + st, st), p.cont),
                    dup_helper(push(e, m), p.cont), p.cont))
        return out

    if isinstance(p, Restrict):
        for i, lab, s2, m2, q in _fwd(s, m, p.body, repl):
            if lab.is_visible and lab.name == p.name:
                continue
            out.append((i, lab, s2, m2, Restrict(q, p.name)))
        return out

    if isinstance(p, Par):
        if not (isinstance(s, SeedPair) and isinstance(m, MemPair)):
            return out
        lsteps = _fwd(s.left, m.left, p.left, repl)
        rsteps = _fwd(s.right, m.right, p.right, repl)
        for i, lab, s1, m1, q in lsteps:
            out.append((i, lab, SeedPair(s1, s.right), MemPair(m1, m.right),
                        Par(q, p.right)))
        for i, lab, s2, m2, q in rsteps:
            out.append((i, lab, SeedPair(s.left, s2), MemPair(m.left, m2),
                        Par(p.left, q)))
        for i1, l1, s1, m1, q1 in lsteps:
            if not l1.is_visible:
                continue
            for i2, l2, s2, m2, q2 in rsteps:
                if l2 == l1.complement():
                    j = pair(i1, i2)
                    out.append((j, TAU, SeedPair(s1, s2),
                                MemPair(subst_id(m1, i1, j),
                                        subst_id(m2, i2, pair(i2, i1))),
                                Par(q1, q2)))
        return out

    if isinstance(p, NdChoice):
        for operand, other, side in ((p.left, p.right, "R"),
                                     (p.right, p.left, "L")):
            ps, pm = _choice_premise(s, m, operand)
            rec = BranchRecord("\\/", other, side)
            for i, lab, s2, m2, q in _fwd(ps, pm, operand, repl):
                out.append((i, lab, s2, insert_at(m2, i, rec), q))
        return out

    if isinstance(p, Sum):
        for operand, other, side in ((p.left, p.right, "R"),
                                     (p.right, p.left, "L")):
            if isinstance(operand, Prefix):
                if isinstance(s, SeedLeaf):
                    c, st = s.pattern.current, s.pattern.step
                    e = MemEvent(gamma(c), operand.label,
                                 (BranchRecord("+", other, side),))
                    out.append((gamma(c), operand.label,
                                splitter_helper(IdPattern(c + st, st), operand.cont),
                                dup_helper(push(e, m), operand.cont),
                                operand.cont))
            elif isinstance(operand, Sum):
                rec = BranchRecord("+", other, side)
                for i, lab, s2, m2, q in _fwd(s, m, operand, repl):
                    out.append((i, lab, s2, insert_at(m2, i, rec), q))
        return out

    if isinstance(p, IntChoice):
        if not isinstance(s, SeedLeaf):
            return out
        c, st = s.pattern.current, s.pattern.step
        for operand, other, side in ((p.left, p.right, "R"),
                                     (p.right, p.left, "L")):
            e = MemEvent(gamma(c), UPS, (BranchRecord("/\\", other, side),))
            out.append((gamma(c), UPS,
                        splitter_helper(IdPattern(c + st, st), operand),
                        dup_helper(push(e, m), operand), operand))
        return out

    if isinstance(p, Bang):
        if repl is None:
            raise ReplicationDisabled(
                "replication reached but no replication policy is enabled")
        if not (isinstance(s, SeedLeaf) and not isinstance(m, MemPair)):
            return out
        ip = s.pattern
        left = MemMarked(m) if repl.marks else m
        prem_seed = splitter_helper(split_second(ip), p.body)
        prem_mem = dup_helper(m, p.body)
        for i, lab, s2, m2, q in _fwd(prem_seed, prem_mem, p.body, repl):
            if lab.kind == "tau":
                continue
            if repl.policy == "B":
                # memory difference: drop the inherited copy at every leaf
                m2 = _graft(m2, m, EMPTY)
            if repl.marks:
                # protect the replica's past per leaf: the spawning action
                # sits inside the tag, anything the replica does later
                # stacks above it and stays ordinarily undoable
                m2 = _tag_leaves(m2)
            out.append((i, lab, SeedPair(SeedLeaf(split_first(ip)), s2),
                        MemPair(left, m2), Par(p, q)))
        return out

    raise TypeError(f"not a process: {p!r}")


def _graft(m: Memory, old: Memory, new: Memory) -> Memory:
    """Replace each occurrence of the sub-memory `old` by `new`."""
    if m == old:
        return new
    if isinstance(m, MemCons):
        return MemCons(m.event, _graft(m.rest, old, new))
    if isinstance(m, MemPair):
        return MemPair(_graft(m.left, old, new), _graft(m.right, old, new))
    if isinstance(m, MemMarked):
        return MemMarked(_graft(m.inner, old, new))
    return m


def _tag_leaves(m: Memory) -> Memory:
    if isinstance(m, MemPair):
        return MemPair(_tag_leaves(m.left), _tag_leaves(m.right))
    return MemMarked(m)


def enumerate_fwd_r(r: ReversibleProcess,
                    repl: ReplConfig | None = None) -> list[RTransition]:
    if not shape_ok(r.mem, r.proc):
        raise ValueError(f"memory shape does not fit the term: {r}")
    return [RTransition(r, i, lab, FWD, ReversibleProcess(s, m, q))
            for i, lab, s, m, q in dedup(_fwd(r.seed, r.mem, r.proc, repl))]


# ---------------------------------------------------------------------------
# Backward rules

def _mem_leaves(m: Memory, p: Process) -> list[Memory] | None:
    """Leaf memories of m against the full thread shape of p, or None when
    the pair structure does not mirror the parallel structure exactly (the
    duplication image a backward action rule matches against)."""
    from .syntax import thread_split
    threads = thread_split(p)
    if threads is not None:
        if not isinstance(m, MemPair):
            return None
        left = _mem_leaves(m.left, threads[0])
        right = _mem_leaves(m.right, threads[1])
        if left is None or right is None:
            return None
        return left + right
    return [m]


def _record_candidates(m: Memory):
    """Events that could have a branch record popped.  Records can sit on
    events inside replication tags (insertion and substitution descend into
    them), so every event is a candidate; the recursive undo check keeps
    only the genuinely undoable ones."""
    seen = set()
    for e in events_of(m):
        if e.records and e.ident not in seen:
            seen.add(e.ident)
            yield e


def _sync_candidates(m: Memory):
    """Paired-identifier events that a synchronisation undo could split."""
    seen = set()
    for e in events_of(m):
        if isinstance(e.ident, Paired) and e.ident not in seen:
            seen.add(e.ident)
            yield e.ident


def _axiom_bwd(s: Seed, m: Memory, p: Process) -> list[Step]:
    """Whole-node undo of an action, sum or internal-choice event whose
    duplicated copies cover this entire subtree.  Replication-protected
    events sit inside tags, which never match the stack patterns here."""
    leaves = _mem_leaves(m, p)
    if not leaves:
        return []
    first = leaves[0]
    if not isinstance(first, MemCons) or any(x != first for x in leaves[1:]):
        return []
    e, tail = first.event, first.rest
    if not isinstance(e.ident, Atomic):
        return []
    try:
        ip = unsplit_for(p, s)
    except ValueError:
        return []
    if ip.current - ip.step != e.ident.n:
        return []
    prev = SeedLeaf(IdPattern(e.ident.n, ip.step))

    recs = e.records
    if recs == () and e.label.is_visible:
        return [(e.ident, e.label, prev, tail, Prefix(e.label, p))]
    if len(recs) == 1 and recs[0].op == "+" and e.label.is_visible:
        mine = Prefix(e.label, p)
        q = Sum(mine, recs[0].discarded) if recs[0].side == "R" \
            else Sum(recs[0].discarded, mine)
        return [(e.ident, e.label, prev, tail, q)]
    if len(recs) == 1 and recs[0].op == "/\\" and e.label == UPS:
        q = IntChoice(p, recs[0].discarded) if recs[0].side == "R" \
            else IntChoice(recs[0].discarded, p)
        return [(e.ident, UPS, prev, tail, q)]
    return []


def _wrap_guard(s: Seed, m: Memory) -> bool:
    """Shape guard for rebuilding a choice on top of an undone step: the
    rebuilt term is a choice node, a single thread, so conclusions whose
    seed or memory kept a pair structure are not derivable states and the
    pop is refused."""
    return isinstance(s, SeedLeaf) and not isinstance(m, MemPair)


def _pops(s: Seed, m: Memory, p: Process, repl) -> list[Step]:
    """Undo of a branch record appended by a choice (or nested sum): strip
    the record everywhere, undo the event, rebuild the choice."""
    out: list[Step] = []
    for e in _record_candidates(m):
        r = e.records[-1]
        deep_sum = r.op == "+" and len(e.records) >= 2
        if r.op != "\\/" and not deep_sum:
            continue
        evs = [ev for ev in events_of(m) if ev.ident == e.ident]
        if not all(ev.records and ev.records[-1] == r for ev in evs):
            continue
        stripped = strip_last_record(m, e.ident)
        for i, lab, s2, m2, q in _bwd(s, stripped, p, repl):
            if i != e.ident:
                continue
            if not _wrap_guard(s2, m2):
                continue
            if r.op == "\\/":
                q2 = NdChoice(q, r.discarded) if r.side == "R" \
                    else NdChoice(r.discarded, q)
            else:
                q2 = Sum(q, r.discarded) if r.side == "R" \
                    else Sum(r.discarded, q)
            out.append((e.ident, lab, s2, m2, q2))
    return out


def _spawn_source(s: Seed, m: Memory, p: Process, repl: ReplConfig | None):
    """Reconstructed pre-spawn source of a replication-born pair, or None
    when the shape rules it out."""
    if repl is None or not (isinstance(p, Par) and isinstance(p.left, Bang)):
        return None
    if not (isinstance(s, SeedPair) and isinstance(s.left, SeedLeaf)
            and isinstance(m, MemPair)):
        return None
    ip1 = s.left.pattern
    if ip1.step % 2:
        return None
    base = m.left
    if repl.marks:
        if not isinstance(base, MemMarked):
            return None
        base = base.inner
    return SeedLeaf(IdPattern(ip1.current, ip1.step // 2)), base, p.left


def _repl_bwd(s: Seed, m: Memory, p: Process, repl: ReplConfig | None) -> list[Step]:
    """Undo of a replication step: rebuild the pre-spawn source, replay the
    forward rule from it, and fold back exactly when the replay reproduces
    this state (inverse by construction)."""
    src = _spawn_source(s, m, p, repl)
    if src is None:
        return []
    s0, m0, bang = src
    out = []
    for i, lab, s2, m2, q in _fwd(s0, m0, bang, repl):
        if (s2, m2, q) == (s, m, p):
            out.append((i, lab, s0, m0, bang))
    return out


def _bwd(s: Seed, m: Memory, p: Process,
         repl: ReplConfig | None) -> list[Step]:
    out = list(_axiom_bwd(s, m, p))
    out += _pops(s, m, p, repl)

    if isinstance(p, Restrict):
        for i, lab, s2, m2, q in _bwd(s, m, p.body, repl):
            if lab.is_visible and lab.name == p.name:
                continue
            out.append((i, lab, s2, m2, Restrict(q, p.name)))

    if isinstance(p, Par) and isinstance(s, SeedPair) and isinstance(m, MemPair):
        s1, s2m, m1, m2 = s.left, s.right, m.left, m.right
        ok = seeds_compatible(s1, s2m)
        # at a protected replication-born pair, restoring the replica to the
        # spawn rule's own premise source through a plain lift would strand
        # the spawn with nothing left to fold; that restoration is the
        # spawn rule's job
        premise_src = None
        if repl is not None and repl.marks:
            src = _spawn_source(s, m, p, repl)
            if src is not None:
                _s0, m0, bang = src
                ip0 = _s0.pattern
                premise_src = (splitter_helper(split_second(ip0), bang.body),
                               dup_helper(m0, bang.body), bang.body)
        if ok:
            for i, lab, s1b, m1b, q in _bwd(s1, m1, p.left, repl):
                if not contains_id(m2, i):
                    out.append((i, lab, SeedPair(s1b, s2m), MemPair(m1b, m2),
                                Par(q, p.right)))
            for i, lab, s2b, m2b, q in _bwd(s2m, m2, p.right, repl):
                if premise_src is not None and (s2b, m2b, q) == premise_src:
                    continue
                if not contains_id(m1, i):
                    out.append((i, lab, SeedPair(s1, s2b), MemPair(m1, m2b),
                                Par(p.left, q)))
            # synchronisation undo: a paired event splits into its halves
            for j in _sync_candidates(m1):
                a, b = unpair(j)
                m1s = subst_id(m1, j, a)
                m2s = subst_id(m2, Paired(b.n, a.n), b)
                for i1, l1, s1b, m1b, q1 in _bwd(s1, m1s, p.left, repl):
                    if i1 != a or not l1.is_visible:
                        continue
                    for i2, l2, s2b, m2b, q2 in _bwd(s2m, m2s, p.right, repl):
                        if i2 != b or l2 != l1.complement():
                            continue
                        if contains_id(m2b, a) or contains_id(m1b, b):
                            continue
                        out.append((j, TAU, SeedPair(s1b, s2b),
                                    MemPair(m1b, m2b), Par(q1, q2)))
        out += _repl_bwd(s, m, p, repl)

    return out


def enumerate_bwd_r(r: ReversibleProcess,
                    repl: ReplConfig | None = None) -> list[RTransition]:
    if not shape_ok(r.mem, r.proc):
        raise ValueError(f"memory shape does not fit the term: {r}")
    return [RTransition(r, i, lab, BWD, ReversibleProcess(s, m, q))
            for i, lab, s, m, q in dedup(_bwd(r.seed, r.mem, r.proc, repl))]


def enumerate_all(r: ReversibleProcess,
                  repl: ReplConfig | None = None) -> list[RTransition]:
    return enumerate_fwd_r(r, repl) + enumerate_bwd_r(r, repl)


def enumerate_repl_r(r: ReversibleProcess, policy: str,
                     marks: bool = True) -> list[RTransition]:
    """Every enabled move under a reversible-replication policy (the
    replication steps included).  Policies c/d are rejected."""
    return enumerate_all(r, ReplConfig(policy, marks))


def apply(t: RTransition, at: ReversibleProcess | None = None) -> ReversibleProcess:
    if at is not None and at != t.source:
        raise ValueError("stale transition: source does not match")
    return t.target


# ---------------------------------------------------------------------------
# Initiality, origin

def is_initial(r: ReversibleProcess) -> bool:
    from .ilts import IdentifiedProcess, well_identified
    if not well_identified(IdentifiedProcess(r.seed, r.proc)):
        return False
    return _mem_initial(r.mem, r.proc)


def _mem_initial(m: Memory, p: Process) -> bool:
    from .syntax import thread_split
    threads = thread_split(p)
    if threads is not None:
        return isinstance(m, MemPair) and _mem_initial(m.left, threads[0]) \
            and _mem_initial(m.right, threads[1])
    return isinstance(m, MemEmpty)


def origin(r: ReversibleProcess, repl: ReplConfig | None = None,
           max_steps: int = 10_000) -> ReversibleProcess:
    """Backtrack (first enabled undo each time) until an initial process."""
    cur = r
    for _ in range(max_steps):
        if is_initial(cur):
            return cur
        back = enumerate_bwd_r(cur, repl)
        if not back:
            raise UnreachableState(f"stuck non-initial state: {cur}")
        cur = back[0].target
    raise UnreachableState("origin did not converge")


# ---------------------------------------------------------------------------
# Concurrency (mixed directions)

def backward_patterns(t: RTransition) -> list[IdPattern]:
    """The target-seed pattern(s) whose streams restart at the undone
    identifier (or at its two components).  An undo that also refolds a
    resolved choice can fold the restart pattern away; the pattern whose
    stream covers the freed identifier then stands in for it."""
    if t.direction != BWD:
        raise ValueError("not a backward transition")
    from .ident import seed_patterns, stream_contains
    available = seed_patterns(t.target.seed)
    pats = []
    for c in components(t.ident):
        found = [ip for ip in available if ip.current == c.n] \
            or [ip for ip in available if stream_contains(ip, c)]
        if not found:
            raise ValueError(f"no pattern covers {c} in {t.target.seed}")
        pats.append(found[0])
    return pats


def concurrent_r(t1: RTransition, t2: RTransition) -> bool:
    """Concurrency of coinitial transitions.  Same-direction pairs compare
    identifiers; a forward and a backward transition conflict when the
    forward identifier is downstream of a pattern freed by the undo.

    Two distinct undos of the same event (same identifier) can coexist when
    a memory forgets nesting positions; they share their identifier and are
    never concurrent, which keeps the square property on honest ground.
    """
    if t1.source != t2.source:
        raise ValueError("transitions are not coinitial")
    if t1 == t2:
        raise ValueError("concurrency is a relation on distinct transitions")
    if t1.direction == t2.direction:
        return compatible_ids(t1.ident, t2.ident)
    fwd, bwd = (t1, t2) if t1.direction == FWD else (t2, t1)
    return not any(downstream(fwd.ident, ip) for ip in backward_patterns(bwd))


# ---------------------------------------------------------------------------
# Traces

@dataclass(frozen=True)
class Trace:
    source: ReversibleProcess
    steps: tuple[RTransition, ...] = ()

    def __post_init__(self):
        cur = self.source
        for t in self.steps:
            if t.source != cur:
                raise ValueError("steps are not pairwise composable")
            cur = t.target

    @property
    def target(self) -> ReversibleProcess:
        return self.steps[-1].target if self.steps else self.source

    def __len__(self):
        return len(self.steps)

    def key(self):
        return (self.source,) + tuple(
            (t.direction, t.ident, t.label, t.target) for t in self.steps)


def _inverse_pair(t: RTransition, u: RTransition) -> bool:
    return (t.ident == u.ident and t.label == u.label
            and t.direction != u.direction and u.target == t.source)


def _swaps_of(d: Trace, k: int, repl: ReplConfig | None) -> list[Trace]:
    """Traces obtained by commuting steps k and k+1 through a square."""
    t, u = d.steps[k], d.steps[k + 1]
    out = []
    for u0 in enumerate_all(t.source, repl):
        if u0.signature() != u.signature() or u0 == t:
            continue
        if not concurrent_r(t, u0):
            continue
        for t2 in enumerate_all(u0.target, repl):
            if t2.signature() == t.signature() and t2.target == u.target:
                out.append(Trace(d.source,
                                 d.steps[:k] + (u0, t2) + d.steps[k + 2:]))
    return out


def _rewrites(d: Trace, repl: ReplConfig | None) -> list[Trace]:
    out = []
    for k in range(len(d.steps) - 1):
        if _inverse_pair(d.steps[k], d.steps[k + 1]):
            out.append(Trace(d.source, d.steps[:k] + d.steps[k + 2:]))
        out.extend(_swaps_of(d, k, repl))
    return out


def rewrite_closure(d: Trace, bound: int = 10_000,
                    repl: ReplConfig | None = None) -> set:
    """Keys of every trace reachable from d by square swaps and inverse
    cancellations (swaps are self-inverse; cancellation only shrinks, so
    this is the downward cone, not the full equivalence class)."""
    seen = {d.key()}
    frontier = [d]
    budget = bound
    while frontier and budget > 0:
        nxt = []
        for x in frontier:
            for y in _rewrites(x, repl):
                budget -= 1
                if y.key() not in seen:
                    seen.add(y.key())
                    nxt.append(y)
                if budget <= 0:
                    return seen
        frontier = nxt
    return seen


def causally_equivalent(d1: Trace, d2: Trace, bound: int = 10_000,
                        repl: ReplConfig | None = None) -> bool:
    """Decide causal equivalence by rewriting both traces (square swaps of
    concurrent adjacent steps, cancellation of adjacent inverse pairs) and
    looking for a meet, up to `bound` rewrite applications per side.  Both
    moves preserve endpoints, so traces that are not coinitial and cofinal
    are never related."""
    if d1.source != d2.source:
        raise ValueError("traces are not coinitial")
    if d1.key() == d2.key():
        return True
    c1 = rewrite_closure(d1, bound, repl)
    if d2.key() in c1:
        return True
    return bool(c1 & rewrite_closure(d2, bound, repl))


class NormalizationStuck(RuntimeError):
    pass


def normalize_trace(d: Trace, repl: ReplConfig | None = None,
                    max_rounds: int = 10_000) -> Trace:
    """An equivalent trace using each identifier at most once, obtained by
    bubbling a do/undo pair together and cancelling it, repeatedly."""
    cur = d
    for _ in range(max_rounds):
        progressed = False
        for j, k in _undo_pairs(cur):
            moved = _bring_together(cur, j, k, repl)
            if moved is not None:
                cur = moved
                progressed = True
                break
        if not progressed:
            if _undo_pairs(cur):
                raise NormalizationStuck(
                    f"cannot commute any undo pair of {_trace_ids(cur)}")
            _check_unique(cur)
            return cur
    raise NormalizationStuck("normalization did not converge")


def _undo_pairs(d: Trace):
    """Candidate do/undo pairs (same identifier and label, opposite
    directions), nearest first.  A sum may reuse an identifier across its
    two branches after an undo; those are not cancellation pairs."""
    pairs = []
    for j in range(len(d.steps)):
        for k in range(j + 1, len(d.steps)):
            t, u = d.steps[j], d.steps[k]
            if t.ident == u.ident and t.label == u.label \
                    and t.direction != u.direction:
                pairs.append((j, k))
                break
    pairs.sort(key=lambda jk: jk[1] - jk[0])
    return pairs


def _trace_ids(d: Trace):
    return [str(t.ident) for t in d.steps]


def _bring_together(d: Trace, j: int, k: int, repl):
    cur = d
    # move the later step leftwards; fall back to moving the earlier right
    for pos in range(k - 1, j, -1):
        nxt = _swaps_of(cur, pos, repl)
        if not nxt:
            break
        cur = nxt[0]
    else:
        return _cancel_at(cur, j, repl)
    cur = d
    for pos in range(j, k - 1):
        nxt = _swaps_of(cur, pos, repl)
        if not nxt:
            return None
        cur = nxt[0]
    return _cancel_at(cur, k - 1, repl)


def _cancel_at(d: Trace, k: int, repl):
    if _inverse_pair(d.steps[k], d.steps[k + 1]):
        return Trace(d.source, d.steps[:k] + d.steps[k + 2:])
    return None


def _check_unique(d: Trace):
    used: set[int] = set()
    for t in d.steps:
        atoms = {c.n for c in components(t.ident)}
        if used & atoms:
            raise NormalizationStuck("identifier reuse survived normalization")
        used |= atoms


def random_trace(r: ReversibleProcess, length: int, seed: int,
                 repl: ReplConfig | None = None,
                 forward_only: bool = False) -> Trace:
    """Uniformly sampled trace of up to `length` enabled steps."""
    rng = random.Random(seed)
    steps = []
    cur = r
    for _ in range(length):
        options = enumerate_fwd_r(cur, repl) if forward_only \
            else enumerate_all(cur, repl)
        if not options:
            break
        t = rng.choice(options)
        steps.append(t)
        cur = t.target
    return Trace(r, tuple(steps))


# ---------------------------------------------------------------------------
# Trace files

def serialize_trace(d: Trace) -> str:
    lines = [print_state(d.source)]
    for t in d.steps:
        lines.append(f"{t.direction} {t.ident} {t.label} | {print_state(t.target)}")
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> Trace:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty trace file")
    source = parse_state(lines[0])
    steps = []
    cur = source
    for ln in lines[1:]:
        head, sep, state_text = ln.partition(" | ")
        if not sep:
            raise ValueError(f"bad trace line {ln!r}")
        parts = head.split()
        if len(parts) != 3 or parts[0] not in (FWD, BWD):
            raise ValueError(f"bad trace line {ln!r}")
        from .ident import parse_identifier
        target = parse_state(state_text)
        steps.append(RTransition(cur, parse_identifier(parts[1]),
                                 parse_label(parts[2]), parts[0], target))
        cur = target
    return Trace(source, tuple(steps))
