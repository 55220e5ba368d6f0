"""Memories for the reversible semantics: per-thread stacks of events,
pairs mirroring thread splits, and the replication tag.

A memory is one of

    MemEmpty()            the empty stack
    MemCons(event, rest)  an event pushed on a memory (newest first)
    MemPair(left, right)  a pair mirroring a parallel split
    MemMarked(inner)      a memory protected by the replication tag `?`

The tag is the `?` operator of the replication rules; it is a structural
node rather than a per-event flag so that undoing a replication restores
the pre-rule memory exactly (including tags of enclosing replications) and
so that a tagged empty memory stays distinguishable from a plain one.
Ordinary backward rules never look inside a tag.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from . import syntax
from .ident import Identifier, parse_identifier
from .syntax import Label, Process, parse_label, thread_split


OPS = ("\\/", "+", "/\\")


@dataclass(frozen=True)
class BranchRecord:
    op: str            # one of OPS
    discarded: Process
    side: str          # 'L' | 'R'

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"bad sum operator {self.op!r}")
        if self.side not in ("L", "R"):
            raise ValueError(f"bad side {self.side!r}")

    def __str__(self):
        return f"({self.op}, {syntax.print_process(self.discarded)}, {self.side})"


@dataclass(frozen=True)
class MemEvent:
    ident: Identifier
    label: Label
    records: tuple[BranchRecord, ...] = ()

    def __post_init__(self):
        if self.label.kind == "tau":
            raise ValueError("memory events never carry tau")

    def __str__(self):
        recs = ", ".join(str(r) for r in self.records) if self.records else "_"
        return f"<{self.ident}, {self.label}, {recs}>"


class Memory:
    __slots__ = ()


@dataclass(frozen=True)
class MemEmpty(Memory):
    def __str__(self):
        return print_memory(self)


@dataclass(frozen=True)
class MemCons(Memory):
    event: MemEvent
    rest: Memory

    def __str__(self):
        return print_memory(self)


@dataclass(frozen=True)
class MemPair(Memory):
    left: Memory
    right: Memory

    def __str__(self):
        return print_memory(self)


@dataclass(frozen=True)
class MemMarked(Memory):
    inner: Memory

    def __str__(self):
        return print_memory(self)


EMPTY = MemEmpty()


def stack(*events: MemEvent) -> Memory:
    """Build a stack, newest first."""
    m: Memory = EMPTY
    for e in reversed(events):
        m = MemCons(e, m)
    return m


def events_of(m: Memory):
    """All events, newest first per stack, left before right in pairs."""
    if isinstance(m, MemEmpty):
        return
    if isinstance(m, MemCons):
        yield m.event
        yield from events_of(m.rest)
    elif isinstance(m, MemPair):
        yield from events_of(m.left)
        yield from events_of(m.right)
    else:
        yield from events_of(m.inner)


def event_count(m: Memory) -> int:
    return sum(1 for _ in events_of(m))


def contains_id(m: Memory, i: Identifier) -> bool:
    """Exact-identifier occurrence; a paired event never matches a component."""
    return any(e.ident == i for e in events_of(m))


def subst_id(m: Memory, old: Identifier, new: Identifier) -> Memory:
    """Replace `old` by `new` in every event, propagated structurally."""
    if isinstance(m, MemEmpty):
        return m
    if isinstance(m, MemCons):
        e = m.event
        if e.ident == old:
            e = MemEvent(new, e.label, e.records)
        return MemCons(e, subst_id(m.rest, old, new))
    if isinstance(m, MemPair):
        return MemPair(subst_id(m.left, old, new), subst_id(m.right, old, new))
    return MemMarked(subst_id(m.inner, old, new))


def insert_at(m: Memory, j: Identifier, r: BranchRecord) -> Memory:
    """Identified insertion: append r to the record list of every event
    identified by j."""
    if isinstance(m, MemEmpty):
        return m
    if isinstance(m, MemCons):
        e = m.event
        if e.ident == j:
            e = MemEvent(e.ident, e.label, e.records + (r,))
        return MemCons(e, insert_at(m.rest, j, r))
    if isinstance(m, MemPair):
        return MemPair(insert_at(m.left, j, r), insert_at(m.right, j, r))
    return MemMarked(insert_at(m.inner, j, r))


def strip_last_record(m: Memory, j: Identifier) -> Memory:
    """Inverse of insert_at on the events identified by j (drops their last
    record).  Caller checks the records being dropped agree."""
    if isinstance(m, MemEmpty):
        return m
    if isinstance(m, MemCons):
        e = m.event
        if e.ident == j:
            e = MemEvent(e.ident, e.label, e.records[:-1])
        return MemCons(e, strip_last_record(m.rest, j))
    if isinstance(m, MemPair):
        return MemPair(strip_last_record(m.left, j),
                       strip_last_record(m.right, j))
    return MemMarked(strip_last_record(m.inner, j))


def push(e: MemEvent, m: Memory) -> Memory:
    """Push an event; pushing onto a pair distributes to both components."""
    if isinstance(m, MemPair):
        return MemPair(push(e, m.left), push(e, m.right))
    return MemCons(e, m)


def append_bottom(m: Memory, e: MemEvent) -> Memory:
    """Append an event at the bottom of every stack (the memory-context
    `append` operation)."""
    if isinstance(m, MemEmpty):
        return MemCons(e, EMPTY)
    if isinstance(m, MemCons):
        return MemCons(m.event, append_bottom(m.rest, e))
    if isinstance(m, MemPair):
        return MemPair(append_bottom(m.left, e), append_bottom(m.right, e))
    return MemMarked(append_bottom(m.inner, e))


def dup_helper(m: Memory, p: Process) -> Memory:
    """Duplicate a memory over the top-level parallel structure of p."""
    threads = thread_split(p)
    if threads is not None:
        return MemPair(dup_helper(m, threads[0]), dup_helper(m, threads[1]))
    return m


def mark(m: Memory) -> Memory:
    return MemMarked(m)


def has_tags(m: Memory) -> bool:
    if isinstance(m, MemMarked):
        return True
    if isinstance(m, MemCons):
        return has_tags(m.rest)
    if isinstance(m, MemPair):
        return has_tags(m.left) or has_tags(m.right)
    return False


def unmark(m: Memory) -> Memory:
    if not isinstance(m, MemMarked):
        raise ValueError("memory is not tagged")
    return m.inner


def shape_ok(m: Memory, p: Process) -> bool:
    """Pair nodes must align with (restriction-transparent) parallel
    structure; a stack may still span a parallel subtree, as in
    context-built states."""
    if isinstance(m, MemPair):
        threads = thread_split(p)
        return threads is not None and shape_ok(m.left, threads[0]) \
            and shape_ok(m.right, threads[1])
    return True


# ---------------------------------------------------------------------------
# Display / parse

def print_memory(m: Memory) -> str:
    if isinstance(m, MemEmpty):
        return "<>"
    if isinstance(m, MemPair):
        return f"[{print_memory(m.left)}, {print_memory(m.right)}]"
    if isinstance(m, MemMarked):
        return "?" + print_memory(m.inner)
    # stack: dot-separated, trailing empty omitted
    parts = []
    cur: Memory = m
    while isinstance(cur, MemCons):
        parts.append(str(cur.event))
        cur = cur.rest
    if not isinstance(cur, MemEmpty):
        parts.append(print_memory(cur))
    return ".".join(parts)


def parse_memory(text: str) -> Memory:
    m, rest = _parse_mem(text.strip())
    if rest.strip():
        raise ValueError(f"trailing input in memory: {rest!r}")
    return m


def _parse_mem(text: str) -> tuple[Memory, str]:
    text = text.lstrip()
    if text.startswith("?"):
        inner, rest = _parse_mem(text[1:])
        return MemMarked(inner), rest
    if text.startswith("<>"):
        return EMPTY, text[2:]
    if text.startswith("["):
        left, rest = _parse_mem(text[1:])
        rest = rest.lstrip()
        if not rest.startswith(","):
            raise ValueError("expected ',' in memory pair")
        right, rest = _parse_mem(rest[1:])
        rest = rest.lstrip()
        if not rest.startswith("]"):
            raise ValueError("expected ']' closing memory pair")
        return MemPair(left, right), rest[1:]
    if text.startswith("<"):
        e, rest = _parse_event(text)
        rest2 = rest.lstrip()
        if rest2.startswith("."):
            tail, rest3 = _parse_mem(rest2[1:])
            return MemCons(e, tail), rest3
        return MemCons(e, EMPTY), rest
    raise ValueError(f"bad memory {text!r}")


_EVENT_HEAD = re.compile(r"<\s*(#\d+(?:\(\+\)#\d+)?)\s*,\s*(~?[a-z][a-zA-Z0-9_]*)\s*,\s*")


def _parse_event(text: str) -> tuple[MemEvent, str]:
    m = _EVENT_HEAD.match(text)
    if not m:
        raise ValueError(f"bad memory event {text!r}")
    ident = parse_identifier(m.group(1))
    label = parse_label(m.group(2))
    rest = text[m.end():].lstrip()
    records: list[BranchRecord] = []
    if rest.startswith("_"):
        rest = rest[1:].lstrip()
    else:
        while True:
            rec, rest = _parse_record(rest)
            records.append(rec)
            rest = rest.lstrip()
            if rest.startswith(","):
                rest = rest[1:].lstrip()
            else:
                break
    if not rest.startswith(">"):
        raise ValueError("expected '>' closing memory event")
    return MemEvent(ident, label, tuple(records)), rest[1:]


def _parse_record(text: str) -> tuple[BranchRecord, str]:
    text = text.lstrip()
    if not text.startswith("("):
        raise ValueError(f"bad branch record {text!r}")
    body = text[1:].lstrip()
    op = next((o for o in OPS if body.startswith(o)), None)
    if op is None:
        raise ValueError(f"bad sum operator in record {text!r}")
    body = body[len(op):].lstrip()
    if not body.startswith(","):
        raise ValueError("expected ',' in branch record")
    body = body[1:]
    # the discarded process runs to the comma before the final L/R, at depth 0
    depth = 0
    for k, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            proc = syntax.parse_process(body[:k])
            tail = body[k + 1:].lstrip()
            side = tail[0] if tail[:1] in ("L", "R") else None
            if side is None:
                raise ValueError("expected side L or R in branch record")
            tail = tail[1:].lstrip()
            if not tail.startswith(")"):
                raise ValueError("expected ')' closing branch record")
            return BranchRecord(op, proc, side), tail[1:]
    raise ValueError(f"unterminated branch record {text!r}")
