import pytest

from revccs.gen import corpus, random_term
from revccs.ident import gamma, pair
from revccs.irlts import (BWD, FWD, ReplConfig, ReplicationDisabled,
                          ReversibleProcess, Trace, apply, backward_patterns,
                          causally_equivalent, concurrent_r, enumerate_all,
                          enumerate_bwd_r, enumerate_fwd_r, initial_state,
                          is_initial, normalize_trace, origin, parse_state,
                          parse_trace, print_state, random_trace,
                          serialize_trace)
from revccs.suites import check_axioms, reachable_states
from revccs.syntax import parse_process


S32 = "((2,2),(3,2)) o [<#0, a, (+, b, R)>, <#1, ~a, _>] |> 0 | c"


def state(text):
    return parse_state(text)


class TestStateDisplay:
    @pytest.mark.parametrize("text", [
        "(0,1) o <> |> a.b",
        S32,
        "((1,2),(2,2)) o [<>, <#0, a, _>] |> p | b",
        "(1,1) o <#0, a, _> |> !b",
    ])
    def test_roundtrip(self, text):
        assert print_state(state(text)) == text


class TestForward:
    def test_prefix_pushes_event(self):
        ts = enumerate_fwd_r(state("(0,1) o <> |> a.b"))
        assert [print_state(t.target) for t in ts] == ["(1,1) o <#0, a, _> |> b"]

    def test_act_into_replication(self):
        r0 = state("(0,1) o <> |> a.!b")
        [t] = enumerate_fwd_r(r0, ReplConfig("A"))
        assert (str(t.ident), str(t.label)) == ("#0", "a")
        assert print_state(t.target) == "(1,1) o <#0, a, _> |> !b"

    def test_section32_forward(self):
        ts = enumerate_fwd_r(state(S32))
        assert len(ts) == 1
        t = ts[0]
        assert (str(t.ident), str(t.label), t.direction) == ("#3", "c", FWD)
        assert print_state(t.target) == \
            "((2,2),(5,2)) o [<#0, a, (+, b, R)>, <#3, c, _>.<#1, ~a, _>] |> 0 | 0"

    def test_nil_stuck(self):
        assert enumerate_fwd_r(state("(0,1) o <> |> 0")) == []

    def test_sync_substitutes_both_orientations(self):
        r0 = initial_state(parse_process("a | ~a"))
        taus = [t for t in enumerate_fwd_r(r0) if str(t.label) == "tau"]
        assert len(taus) == 1
        assert print_state(taus[0].target) == \
            "((2,2),(3,2)) o [<#0(+)#1, a, _>, <#1(+)#0, ~a, _>] |> 0 | 0"


class TestBackward:
    def test_section32_backward(self):
        ts = enumerate_bwd_r(state(S32))
        got = {(str(t.ident), str(t.label), print_state(t.target)) for t in ts}
        assert got == {
            ("#1", "~a",
             "((2,2),(1,2)) o [<#0, a, (+, b, R)>, <>] |> 0 | ~a.c"),
            ("#0", "a", "((0,2),(3,2)) o [<>, <#1, ~a, _>] |> a + b | c"),
        }

    def test_context_fold_example(self):
        r = state("((1,2),(2,2)) o [<#0, a, _>, <#0, a, _>] |> p | b")
        [t] = enumerate_bwd_r(r)
        assert print_state(t.target) == "(0,1) o <> |> a.(p | b)"

    def test_partial_copy_does_not_fold(self):
        r = state("((1,2),(2,2)) o [<>, <#0, a, _>] |> p | b")
        [t] = enumerate_bwd_r(r)
        assert print_state(t.target) == "((1,2),(0,2)) o [<>, <>] |> p | a.b"

    def test_initial_has_no_undo(self):
        assert enumerate_bwd_r(initial_state(parse_process("a.b"))) == []

    def test_nd_choice_record_pop(self):
        r0 = initial_state(parse_process("a.b \\/ c"))
        [t1, t2] = enumerate_fwd_r(r0)
        undo = enumerate_bwd_r(t1.target)
        assert [print_state(u.target) for u in undo] == [print_state(r0)]

    def test_sum_undo_restores_branch(self):
        r0 = initial_state(parse_process("a + b"))
        for t in enumerate_fwd_r(r0):
            [u] = enumerate_bwd_r(t.target)
            assert u.target == r0


class TestApply:
    def test_apply_returns_target(self):
        r0 = initial_state(parse_process("a.b"))
        [t] = enumerate_fwd_r(r0)
        assert apply(t) == t.target

    def test_stale_source_rejected(self):
        r0 = initial_state(parse_process("a.b"))
        [t] = enumerate_fwd_r(r0)
        with pytest.raises(ValueError):
            apply(t, at=t.target)


class TestInitialOrigin:
    def test_initial_cases(self):
        assert is_initial(state("(0,1) o <> |> a.b"))
        assert not is_initial(state("(1,1) o <#0, a, _> |> b"))
        assert is_initial(state("((0,2),(1,2)) o [<>, <>] |> a | b"))
        # a pair memory over a single thread is not initial
        assert not is_initial(state("(0,1) o [<>, <>] |> a.b"))

    def test_origin_of_noncongruence_state(self):
        r = state("(1,1) o <#0, a, _> |> b + b")
        assert print_state(origin(r)) == "(0,1) o <> |> a.(b + b)"

    def test_origin_fixpoint_on_initial(self):
        r = initial_state(parse_process("a | b"))
        assert origin(r) == r

    def test_origin_of_section32(self):
        assert print_state(origin(state(S32))) == \
            "((0,2),(1,2)) o [<>, <>] |> a + b | ~a.c"

    def test_origin_order_independent_here(self):
        # both backward interleavings of the section-3.2 state meet
        r = state(S32)
        targets = set()
        for t in enumerate_bwd_r(r):
            targets.add(print_state(origin(t.target)))
        assert targets == {"((0,2),(1,2)) o [<>, <>] |> a + b | ~a.c"}


class TestConcurrency:
    def setup_method(self):
        ts = enumerate_all(state(S32))
        self.t1 = next(t for t in ts if t.direction == FWD)
        self.t2 = next(t for t in ts if t.direction == BWD
                       and str(t.ident) == "#1")
        self.t3 = next(t for t in ts if t.direction == BWD
                       and str(t.ident) == "#0")

    def test_backward_pair_concurrent(self):
        assert concurrent_r(self.t2, self.t3)

    def test_forward_vs_nonproducing_undo(self):
        assert concurrent_r(self.t1, self.t3)

    def test_forward_downstream_of_undo(self):
        assert not concurrent_r(self.t1, self.t2)

    def test_backward_patterns(self):
        assert [str(ip) for ip in backward_patterns(self.t2)] == ["(1,2)"]
        assert [str(ip) for ip in backward_patterns(self.t3)] == ["(0,2)"]

    def test_paired_undo_patterns(self):
        r0 = initial_state(parse_process("a | ~a"))
        tau = next(t for t in enumerate_fwd_r(r0) if str(t.label) == "tau")
        undo = next(t for t in enumerate_bwd_r(tau.target)
                    if str(t.label) == "tau")
        pats = backward_patterns(undo)
        assert [ip.current for ip in pats] == [0, 1]


class TestCausalEquivalence:
    def test_cancellation(self):
        r0 = initial_state(parse_process("a.b"))
        [t] = enumerate_fwd_r(r0)
        u = next(v for v in enumerate_bwd_r(t.target))
        assert causally_equivalent(Trace(r0, (t, u)), Trace(r0))

    def test_square_swap(self):
        r0 = initial_state(parse_process("a | b"))
        ts = enumerate_fwd_r(r0)
        ta = next(t for t in ts if str(t.label) == "a")
        tb = next(t for t in ts if str(t.label) == "b")
        tb2 = next(t for t in enumerate_fwd_r(ta.target)
                   if t.signature() == tb.signature())
        ta2 = next(t for t in enumerate_fwd_r(tb.target)
                   if t.signature() == ta.signature())
        d1 = Trace(r0, (ta, tb2))
        d2 = Trace(r0, (tb, ta2))
        assert causally_equivalent(d1, d2)

    def test_single_step_not_empty(self):
        r0 = initial_state(parse_process("a.b"))
        [t] = enumerate_fwd_r(r0)
        assert not causally_equivalent(Trace(r0, (t,)), Trace(r0))

    def test_non_coinitial_rejected(self):
        r0 = initial_state(parse_process("a.b"))
        r1 = initial_state(parse_process("c.d"))
        with pytest.raises(ValueError):
            causally_equivalent(Trace(r0), Trace(r1))


class TestNormalize:
    def test_cancel_pair(self):
        r0 = initial_state(parse_process("a.b"))
        [t] = enumerate_fwd_r(r0)
        [u] = enumerate_bwd_r(t.target)
        assert normalize_trace(Trace(r0, (t, u))).steps == ()

    def test_cancel_after_other_step(self):
        r0 = initial_state(parse_process("a.b"))
        [t] = enumerate_fwd_r(r0)
        [t2] = enumerate_fwd_r(t.target)
        [u2] = [v for v in enumerate_bwd_r(t2.target)
                if v.ident == t2.ident]
        d = normalize_trace(Trace(r0, (t, t2, u2)))
        assert [x.ident for x in d.steps] == [t.ident]

    def test_disjoint_trace_unchanged(self):
        r0 = initial_state(parse_process("a | b"))
        ts = enumerate_fwd_r(r0)
        d = Trace(r0, (ts[0],
                       next(t for t in enumerate_fwd_r(ts[0].target)
                            if t.direction == FWD)))
        assert normalize_trace(d) == d


class TestRandomTrace:
    def test_zero_length(self):
        r0 = initial_state(parse_process("a.b"))
        assert random_trace(r0, 0, 1).steps == ()

    def test_deterministic_for_seed(self):
        r0 = initial_state(parse_process("a + b | ~a.c"))
        d1 = random_trace(r0, 6, 42)
        d2 = random_trace(r0, 6, 42)
        assert d1 == d2

    def test_stuck_cuts_short(self):
        r0 = initial_state(parse_process("a"))
        d = random_trace(r0, 10, 3, forward_only=True)
        assert len(d) == 1


class TestTraceFiles:
    def test_roundtrip_bit_exact(self):
        r0 = initial_state(parse_process("a + b | ~a.c"))
        d = random_trace(r0, 5, 7)
        text = serialize_trace(d)
        assert serialize_trace(parse_trace(text)) == text


class TestReplication:
    def test_policy_validation(self):
        with pytest.raises(ValueError):
            ReplConfig("C")
        with pytest.raises(ValueError):
            ReplConfig("d")

    def test_disabled_raises_at_bang(self):
        r = state("(1,1) o <#0, a, _> |> !b")
        with pytest.raises(ReplicationDisabled):
            enumerate_fwd_r(r)

    def test_policy_a_marks_copies(self):
        r = state("(1,1) o <#0, a, _> |> !b")
        [t] = enumerate_fwd_r(r, ReplConfig("A"))
        # the whole replica past, spawning action included, sits in the tag
        assert print_state(t.target) == \
            "((1,2),(4,2)) o [?<#0, a, _>, ?<#2, b, _>.<#0, a, _>] |> !b | 0"

    def test_policy_b_keeps_difference(self):
        r = state("(1,1) o <#0, a, _> |> !b")
        [t] = enumerate_fwd_r(r, ReplConfig("B"))
        assert print_state(t.target) == \
            "((1,2),(4,2)) o [?<#0, a, _>, ?<#2, b, _>] |> !b | 0"

    @pytest.mark.parametrize("policy", ["A", "B"])
    def test_marked_memory_refuses_ordinary_undo(self, policy):
        cfg = ReplConfig(policy)
        r = state("(1,1) o <#0, a, _> |> !b")
        [t] = enumerate_fwd_r(r, cfg)
        undos = enumerate_bwd_r(t.target, cfg)
        # only the replication undo, back to exactly the source
        assert [print_state(u.target) for u in undos] == [print_state(r)]

    @pytest.mark.parametrize("policy", ["A", "B"])
    def test_loop_through_replication(self, policy):
        cfg = ReplConfig(policy)
        r0 = initial_state(parse_process("a.!b"))
        seen = {r0}
        frontier = [r0]
        for _ in range(3):
            nxt = []
            for s in frontier:
                for t in enumerate_all(s, cfg):
                    if t.direction == FWD:
                        assert any(u.ident == t.ident and u.target == s
                                   for u in enumerate_bwd_r(t.target, cfg))
                    if t.target not in seen:
                        seen.add(t.target)
                        nxt.append(t.target)
            frontier = nxt

    def test_repeated_replication_is_undoable(self):
        cfg = ReplConfig("A")
        r0 = initial_state(parse_process("a.!b"))
        cur = r0
        for _ in range(4):
            cur = enumerate_fwd_r(cur, cfg)[0].target
        assert print_state(origin(cur, cfg)) == print_state(r0)


class TestAxiomsSmoke:
    @pytest.mark.parametrize("text", [
        "a + b | ~a.c", "a.(b | c)", "(a | ~a) \\ a", "a \\/ b.c",
        "(a.b) /\\ c", "a.(b + c) | ~b",
    ])
    def test_axioms(self, text):
        rep = check_axioms(parse_process(text))
        assert rep.ok, str(rep)


class TestEnumerateReplSurface:
    def test_policy_moves(self):
        from revccs.irlts import enumerate_repl_r
        r = parse_state("(1,1) o <#0, a, _> |> !b")
        moves = enumerate_repl_r(r, "A")
        assert [(t.direction, str(t.ident)) for t in moves] == \
            [("fwd", "#2"), ("bwd", "#0")]

    def test_rejects_open_policies(self):
        from revccs.irlts import enumerate_repl_r
        r = parse_state("(1,1) o <#0, a, _> |> !b")
        with pytest.raises(ValueError):
            enumerate_repl_r(r, "C")
