import pytest
from hypothesis import given, strategies as st

from revccs.ident import gamma, pair
from revccs.memory import (EMPTY, BranchRecord, MemCons, MemEvent, MemMarked,
                           MemPair, contains_id, dup_helper, event_count,
                           events_of, insert_at, parse_memory, print_memory,
                           push, stack, subst_id)
from revccs.syntax import inp, out, parse_process


def ev(n, lab, *recs):
    return MemEvent(gamma(n), inp(lab) if not lab.startswith("~")
                    else out(lab[1:]), tuple(recs))


REC = BranchRecord("\\/", parse_process("q"), "R")


class TestSubst:
    def test_single_event(self):
        m = stack(ev(0, "a"))
        got = subst_id(m, gamma(0), pair(gamma(0), gamma(1)))
        assert got == stack(MemEvent(pair(gamma(0), gamma(1)), inp("a")))

    def test_untouched_events(self):
        m = stack(ev(0, "a"), ev(2, "b"))
        got = subst_id(m, gamma(2), gamma(9))
        assert got == stack(ev(0, "a"), ev(9, "b"))

    def test_identity(self):
        m = MemPair(stack(ev(0, "a")), stack(ev(1, "b"), ev(0, "a")))
        assert subst_id(m, gamma(0), gamma(0)) == m

    def test_inverse_composable(self):
        m = MemPair(stack(ev(0, "a")), stack(ev(1, "b")))
        assert subst_id(subst_id(m, gamma(0), gamma(7)),
                        gamma(7), gamma(0)) == m


class TestInsert:
    def test_appends_on_match(self):
        got = insert_at(stack(ev(0, "a")), gamma(0), REC)
        assert got == stack(ev(0, "a", REC))

    def test_no_match_unchanged(self):
        m = stack(ev(0, "a"))
        assert insert_at(m, gamma(5), REC) == m

    def test_append_preserves_order(self):
        rec2 = BranchRecord("+", parse_process("r"), "L")
        got = insert_at(insert_at(stack(ev(0, "a")), gamma(0), REC),
                        gamma(0), rec2)
        [e] = list(events_of(got))
        assert e.records == (REC, rec2)

    def test_touches_only_matching(self):
        m = MemPair(stack(ev(0, "a")), stack(ev(1, "b")))
        got = insert_at(m, gamma(1), REC)
        changed = [e for e in events_of(got) if e.records]
        assert len(changed) == 1 and changed[0].ident == gamma(1)


class TestDup:
    def test_two_threads(self):
        m = stack(ev(0, "a"))
        assert dup_helper(m, parse_process("a | b")) == MemPair(m, m)

    def test_non_parallel(self):
        m = stack(ev(0, "a"))
        assert dup_helper(m, parse_process("a.b")) == m

    def test_nested_shape(self):
        m = stack(ev(0, "a"))
        got = dup_helper(m, parse_process("a | (b | c)"))
        assert got == MemPair(m, MemPair(m, m))


class TestContains:
    def test_found(self):
        assert contains_id(MemPair(stack(ev(0, "a")), EMPTY), gamma(0))

    def test_empty(self):
        assert not contains_id(EMPTY, gamma(0))

    def test_exact_identifier_not_component(self):
        m = stack(MemEvent(pair(gamma(0), gamma(1)), inp("a")))
        assert not contains_id(m, gamma(0))
        assert contains_id(m, pair(gamma(0), gamma(1)))


class TestDisplay:
    CASES = [
        "<>",
        "<#0, a, _>",
        "<#0, a, (+, b, R)>",
        "<#3, c, _>.<#1, ~a, _>",
        "[<>, <>]",
        "[<#0, a, (+, b, R)>, <#1, ~a, _>]",
        "?<#0, a, _>",
        "<#2, b, _>.?<#0, a, _>",
        "[?<#0, a, _>, <#2, b, _>.?<#0, a, _>]",
        "<#0(+)#1, a, _>",
        "<#0, a, (\\/, q, R), (+, c.d, L)>",
        "?<>",
    ]

    @pytest.mark.parametrize("text", CASES)
    def test_roundtrip(self, text):
        assert print_memory(parse_memory(text)) == text

    def test_marked_blocks_nothing_structurally(self):
        m = parse_memory("<#2, b, _>.?<#0, a, _>")
        assert isinstance(m, MemCons)
        assert isinstance(m.rest, MemMarked)
        assert event_count(m) == 2


def test_push_distributes_over_pairs():
    m = MemPair(stack(ev(1, "b")), EMPTY)
    got = push(ev(9, "c"), m)
    assert got == MemPair(stack(ev(9, "c"), ev(1, "b")), stack(ev(9, "c")))
