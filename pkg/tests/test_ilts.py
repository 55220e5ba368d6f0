import random

import pytest

from revccs.gen import corpus, random_term
from revccs.ident import IdPattern, SeedPair, gamma, leaf, pair, seed_proj
from revccs.ilts import (IdentifiedProcess, ccs_steps, concurrent_fwd,
                         enumerate_fwd, identify, well_identified)
from revccs.syntax import TAU, parse_process, print_process


def ident_proc(seed, text):
    return IdentifiedProcess(seed, parse_process(text))


EX4 = SeedPair(leaf(0, 2), leaf(1, 2))


class TestWellIdentified:
    def test_example4_source(self):
        assert well_identified(ident_proc(EX4, "a + b | ~a.c"))

    def test_shape_mismatch(self):
        assert not well_identified(ident_proc(leaf(0, 1), "a | b"))

    def test_incompatible_leaves(self):
        bad = SeedPair(leaf(0, 2), leaf(0, 2))
        assert not well_identified(ident_proc(bad, "a | b"))


class TestExample4:
    def setup_method(self):
        self.src = ident_proc(EX4, "a + b | ~a.c")
        self.ts = enumerate_fwd(self.src)

    def test_four_transitions(self):
        assert len(self.ts) == 4
        got = [(str(t.ident), str(t.label), str(t.target.seed),
                print_process(t.target.proc)) for t in self.ts]
        assert got == [
            ("#0", "a", "((2,2),(1,2))", "0 | ~a.c"),
            ("#0", "b", "((2,2),(1,2))", "0 | ~a.c"),
            ("#1", "~a", "((0,2),(3,2))", "a + b | c"),
            ("#0(+)#1", "tau", "((2,2),(3,2))", "0 | c"),
        ]

    def test_concurrency_pairs(self):
        t1, t2, t3, t4 = self.ts
        expected = {(0, 2), (2, 0), (1, 2), (2, 1)}
        for i, a in enumerate(self.ts):
            for j, b in enumerate(self.ts):
                if i == j:
                    continue
                assert concurrent_fwd(a, b) == ((i, j) in expected)

    def test_non_coinitial_rejected(self):
        other = enumerate_fwd(identify(parse_process("a")))[0]
        with pytest.raises(ValueError):
            concurrent_fwd(self.ts[0], other)


class TestEnumerate:
    def test_nil_stuck(self):
        assert enumerate_fwd(ident_proc(leaf(0, 1), "0")) == []

    def test_precondition_enforced(self):
        with pytest.raises(ValueError):
            enumerate_fwd(ident_proc(leaf(0, 1), "a | b"))

    def test_replication_single_copy(self):
        ts = enumerate_fwd(ident_proc(leaf(1, 1), "!b"))
        assert len(ts) == 1  # repl.2 finds no co-action for b
        t = ts[0]
        assert (str(t.ident), str(t.label)) == ("#2", "b")
        assert t.target.seed == SeedPair(leaf(1, 2), leaf(4, 2))
        assert print_process(t.target.proc) == "!b | 0"

    def test_replication_synchronisation(self):
        ts = enumerate_fwd(ident_proc(leaf(0, 1), "!(a | ~a)"))
        taus = [t for t in ts if t.label == TAU]
        assert taus  # repl.2 synchronises two copies
        for t in taus:
            assert print_process(t.target.proc).startswith("!(a | ~a) | ")

    def test_deterministic_order(self):
        src = ident_proc(EX4, "a + b | ~a.c")
        assert enumerate_fwd(src) == enumerate_fwd(src)

    def test_preservation(self):
        rng = random.Random(3)
        for _ in range(120):
            p = random_term(rng, 4)
            state = identify(p)
            for t in enumerate_fwd(state):
                assert well_identified(t.target)

    def test_splitting_stability(self):
        # a transition of s o P survives projecting the seed
        for text in ("a | b", "a + b | ~a.c", "a.(b | c) | d"):
            state = identify(parse_process(text))
            labels = {str(t.label) for t in enumerate_fwd(state)}
            for j in (1, 2):
                proj = IdentifiedProcess(seed_proj(state.seed, j), state.proc)
                assert labels <= {str(t.label) for t in enumerate_fwd(proj)}


class TestCcsSteps:
    def test_prefix(self):
        got = ccs_steps(parse_process("a.b"))
        assert [(str(l), print_process(q)) for l, q in got] == [("a", "b")]

    def test_three_rule_instances(self):
        got = [(str(l), print_process(q))
               for l, q in ccs_steps(parse_process("a | ~a"))]
        assert got == [("a", "0 | ~a"), ("~a", "a | 0"), ("tau", "0 | 0")]

    def test_nd_choice(self):
        got = [(str(l), print_process(q))
               for l, q in ccs_steps(parse_process("a \\/ b"))]
        assert got == [("a", "0"), ("b", "0")]


class TestConservativity:
    def test_on_corpus(self):
        from revccs.suites import check_conservativity
        for p in corpus(full_depth=2, sample=25, seed=5):
            rep = check_conservativity(p, depth=3)
            assert rep.ok, str(rep)
