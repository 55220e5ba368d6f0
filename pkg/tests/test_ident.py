import math

import pytest
from hypothesis import given, settings, strategies as st

from revccs.ident import (Atomic, IdPattern, Paired, SeedLeaf, SeedPair,
                          compatible_ids, compatible_patterns, concrete,
                          downstream, gamma, gamma_inv, leaf, pair,
                          parse_seed, seed_proj, seed_split, seed_valid,
                          seeds_compatible, split, splitter_helper,
                          stream_contains, stream_take, unify, unpair,
                          unsplit_for)
from revccs.syntax import parse_process


def ip(c, s):
    return IdPattern(c, s)


class TestGenerator:
    def test_gamma_is_identity_indexed(self):
        assert gamma(0) == Atomic(0)
        assert gamma(7) == Atomic(7)

    def test_gamma_inverse(self):
        assert gamma_inv(Atomic(3)) == 3


class TestPairing:
    def test_concrete_values(self):
        # 2^0 * (2*1 + 1) - 1 = 2, negated
        assert concrete(pair(Atomic(0), Atomic(1))) == -2
        # 2^1 * (2*0 + 1) - 1 = 1, negated; ordering matters
        assert concrete(pair(Atomic(1), Atomic(0))) == -1

    def test_roundtrip_and_injectivity(self):
        seen = set()
        for m in range(17):
            for n in range(17):
                p = pair(Atomic(m), Atomic(n))
                assert unpair(p) == (Atomic(m), Atomic(n))
                value = concrete(p)
                # (0,0) maps to -0: the one non-negative image.  It cannot
                # occur as a synchronisation identifier (a thread never
                # synchronises an identifier with itself: the patterns of
                # the two participants are compatible, hence disjoint).
                assert value < 0 or (m, n) == (0, 0)
                assert value not in seen
                seen.add(value)

    def test_pairing_needs_atomics(self):
        with pytest.raises(ValueError):
            pair(pair(Atomic(0), Atomic(1)), Atomic(2))


class TestStreams:
    def test_even_and_odd(self):
        assert stream_take(ip(0, 2), 3) == [Atomic(0), Atomic(2), Atomic(4)]
        assert stream_take(ip(1, 2), 3) == [Atomic(1), Atomic(3), Atomic(5)]
        assert stream_take(ip(5, 7), 1) == [Atomic(5)]

    def test_contains(self):
        assert stream_contains(ip(1, 7), Atomic(15))
        assert stream_contains(ip(2, 13), Atomic(15))
        assert not stream_contains(ip(0, 2), Atomic(1))


def brute_force_disjoint(ip1, ip2):
    """Independent oracle: enumerate both streams up to the first point a
    common element could appear."""
    bound = max(ip1.current, ip2.current) + math.lcm(ip1.step, ip2.step)
    s1 = {ip1.current + k * ip1.step for k in range(bound)}
    s2 = {ip2.current + k * ip2.step for k in range(bound)}
    s1 = {x for x in s1 if x <= bound}
    s2 = {x for x in s2 if x <= bound}
    return not (s1 & s2)


class TestCompatibility:
    def test_paper_examples(self):
        assert compatible_patterns(ip(0, 2), ip(1, 2))
        assert not compatible_patterns(ip(1, 7), ip(2, 13))  # both reach 15
        assert not compatible_patterns(ip(3, 4), ip(3, 6))

    def test_against_bruteforce_grid(self):
        pats = [ip(c, s) for c in range(0, 21, 3) for s in range(1, 13, 2)]
        for p1 in pats:
            for p2 in pats:
                assert compatible_patterns(p1, p2) == brute_force_disjoint(p1, p2)


class TestSplit:
    def test_examples(self):
        assert split(ip(0, 1)) == (ip(0, 2), ip(1, 2))
        assert split(ip(1, 2)) == (ip(1, 4), ip(3, 4))
        assert split(ip(5, 3)) == (ip(5, 6), ip(8, 6))

    def test_split_parts_compatible(self):
        for c in range(0, 21):
            for s in range(1, 13):
                a, b = split(ip(c, s))
                assert compatible_patterns(a, b)
                assert brute_force_disjoint(a, b)


class TestSeeds:
    def test_seed_split_leaf(self):
        assert seed_split(leaf(0, 1)) == (leaf(0, 2), leaf(1, 2))

    def test_proj_pair(self):
        s = SeedPair(leaf(0, 2), leaf(1, 2))
        assert seed_proj(s, 1) == SeedPair(leaf(0, 4), leaf(1, 4))

    def test_proj_formula_on_grid(self):
        for c in range(0, 12, 2):
            for s in range(1, 8):
                assert seed_proj(leaf(c, s), 2) == leaf(c + s, 2 * s)

    def test_projections_compatible(self):
        s = SeedPair(SeedPair(leaf(0, 4), leaf(2, 4)), leaf(1, 2))
        assert seeds_compatible(seed_proj(s, 1), seed_proj(s, 2))


class TestSplitterHelper:
    def test_paper_example(self):
        p = parse_process("a | (b | (c + d))")
        got = splitter_helper(ip(0, 1), p)
        assert got == SeedPair(leaf(0, 2), SeedPair(leaf(1, 4), leaf(3, 4)))

    def test_non_parallel(self):
        assert splitter_helper(ip(0, 1), parse_process("a.b")) == leaf(0, 1)

    def test_one_split_step(self):
        got = splitter_helper(ip(2, 2), parse_process("a | b"))
        assert got == SeedPair(leaf(2, 4), leaf(4, 4))

    def test_result_is_valid_seed(self):
        p = parse_process("(a | b) | (c | (d | e))")
        assert seed_valid(splitter_helper(ip(0, 1), p))


class TestUnify:
    def test_leaf_unchanged(self):
        assert unify(leaf(0, 1)) == ip(0, 1)

    def test_pair_first_split(self):
        assert unify(SeedPair(leaf(0, 2), leaf(1, 2))) == ip(0, 4)

    def test_two_descents(self):
        s = SeedPair(SeedPair(leaf(0, 4), leaf(1, 4)), leaf(2, 4))
        assert unify(s) == ip(0, 8)


class TestUnsplit:
    def test_leaf(self):
        assert unsplit_for(parse_process("b"), leaf(1, 1)) == ip(1, 1)

    def test_context_example(self):
        p = parse_process("p | b")
        assert unsplit_for(p, SeedPair(leaf(1, 2), leaf(2, 2))) == ip(1, 1)

    def test_roundtrip(self):
        p = parse_process("a | (b | c)")
        s = splitter_helper(ip(4, 2), p)
        assert unsplit_for(p, s) == ip(4, 2)

    def test_rejects_non_canonical(self):
        p = parse_process("a | b")
        with pytest.raises(ValueError):
            unsplit_for(p, SeedPair(leaf(0, 2), leaf(0, 2)))
        with pytest.raises(ValueError):
            unsplit_for(p, leaf(0, 1))


@given(st.integers(0, 30), st.integers(1, 10),
       st.sampled_from(["a", "a | b", "a | (b | c)", "(a | b) | c",
                        "(a | b) | (c | d)"]))
def test_unsplit_inverts_splitter(c, s, text):
    p = parse_process(text)
    assert unsplit_for(p, splitter_helper(IdPattern(c, s), p)) == IdPattern(c, s)


class TestCompatibleIds:
    def test_four_cases(self):
        assert compatible_ids(gamma(0), gamma(1))
        assert not compatible_ids(gamma(0), gamma(0))
        assert not compatible_ids(gamma(0), pair(gamma(0), gamma(1)))
        assert compatible_ids(pair(gamma(0), gamma(1)), pair(gamma(2), gamma(3)))
        assert not compatible_ids(pair(gamma(0), gamma(1)), pair(gamma(1), gamma(2)))

    def test_symmetric(self):
        ids = [gamma(0), gamma(1), pair(gamma(0), gamma(1)),
               pair(gamma(2), gamma(3)), pair(gamma(1), gamma(4))]
        for a in ids:
            for b in ids:
                assert compatible_ids(a, b) == compatible_ids(b, a)


class TestDownstream:
    def test_atomic(self):
        assert downstream(gamma(3), ip(1, 2))
        assert not downstream(gamma(3), ip(0, 2))

    def test_paired_component(self):
        # 5 is in the stream of (1,2); brute-force: 1, 3, 5, ...
        assert 5 in [x.n for x in stream_take(ip(1, 2), 3)]
        assert downstream(pair(gamma(2), gamma(5)), ip(1, 2))


class TestSeedDisplay:
    def test_roundtrip(self):
        for s in (leaf(0, 1),
                  SeedPair(leaf(0, 2), leaf(1, 2)),
                  SeedPair(SeedPair(leaf(0, 4), leaf(2, 4)), leaf(1, 2))):
            assert parse_seed(str(s)) == s
