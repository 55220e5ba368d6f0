"""Translations into the two classic reversible-CCS formalisms: memory
zipping, preprocessing, and emitters for RCCS (distributed memory stacks
with fork symbols) and CCSK (keyed static past prefixes)."""
from __future__ import annotations

from dataclasses import dataclass

from .ident import Atomic, Paired
from .irlts import ReversibleProcess
from .memory import (BranchRecord, MemCons, MemEmpty, MemEvent, MemMarked,
                     MemPair, Memory, events_of)
from .syntax import (Bang, IntChoice, Label, NdChoice, Par, Prefix,
                     Process, Restrict, Sum, print_process)


class EncodingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Preprocessing

def _check_term(p: Process):
    if isinstance(p, (NdChoice, IntChoice)):
        raise EncodingError(
            "terms with \\/ or /\\ have no RCCS/CCSK counterpart")
    if isinstance(p, Bang):
        raise EncodingError("replicated terms are not encoded")
    if isinstance(p, Prefix):
        _check_term(p.cont)
    elif isinstance(p, Restrict):
        _check_term(p.body)
    elif isinstance(p, (Par, Sum)):
        _check_term(p.left)
        _check_term(p.right)


def prepare(r: ReversibleProcess) -> ReversibleProcess:
    """Collapse each synchronisation identifier (both orientations) to the
    smaller participant, drop sum sides, and reject anything outside the
    guarded-sum fragment shared with RCCS and CCSK."""
    _check_term(r.proc)
    collapse: dict = {}
    for e in events_of(r.mem):
        if e.label.kind == "ups":
            raise EncodingError("internal-choice events are not encoded")
        for rec in e.records:
            if rec.op != "+":
                raise EncodingError(
                    "memories recording \\/ or /\\ are not encoded")
        if isinstance(e.ident, Paired):
            small = Atomic(min(e.ident.left, e.ident.right))
            collapse[e.ident] = small
            collapse[Paired(e.ident.right, e.ident.left)] = small
    return ReversibleProcess(r.seed, _prep_mem(r.mem, collapse), r.proc)


def _prep_mem(m: Memory, collapse) -> Memory:
    if isinstance(m, MemEmpty):
        return m
    if isinstance(m, MemMarked):
        raise EncodingError("tagged (replicated) memories are not encoded")
    if isinstance(m, MemPair):
        return MemPair(_prep_mem(m.left, collapse),
                       _prep_mem(m.right, collapse))
    e = m.event
    ident = collapse.get(e.ident, e.ident)
    recs = tuple(BranchRecord("+", r.discarded, "R") for r in e.records)
    return MemCons(MemEvent(ident, e.label, recs), _prep_mem(m.rest, collapse))


# ---------------------------------------------------------------------------
# Zip: factor common stack suffixes out of memory pairs

@dataclass(frozen=True)
class ZStack:
    events: tuple[MemEvent, ...]


@dataclass(frozen=True)
class ZPair:
    left: "ZStack | ZPair"
    right: "ZStack | ZPair"
    suffix: tuple[MemEvent, ...]


ZNode = ZStack | ZPair


def _stack_events(m: Memory) -> tuple[MemEvent, ...]:
    evs = []
    while isinstance(m, MemCons):
        evs.append(m.event)
        m = m.rest
    if not isinstance(m, MemEmpty):
        raise EncodingError("memory is not a plain stack")
    return tuple(evs)


def _tail(z: ZNode) -> tuple[MemEvent, ...]:
    return z.events if isinstance(z, ZStack) else z.suffix


def _drop_tail(z: ZNode, n: int) -> ZNode:
    if n == 0:
        return z
    if isinstance(z, ZStack):
        return ZStack(z.events[:-n])
    return ZPair(z.left, z.right, z.suffix[:-n])


def zip_memory(m: Memory) -> ZNode:
    """Rewrite every pair to the form [m', m''].suffix with the common
    trailing events factored out; idempotent, event-preserving."""
    if isinstance(m, MemPair):
        zl = zip_memory(m.left)
        zr = zip_memory(m.right)
        tl, tr = _tail(zl), _tail(zr)
        n = 0
        while n < len(tl) and n < len(tr) and tl[len(tl) - 1 - n] == tr[len(tr) - 1 - n]:
            n += 1
        return ZPair(_drop_tail(zl, n), _drop_tail(zr, n), tl[len(tl) - n:])
    return ZStack(_stack_events(m))


def zip_znode(z: ZNode) -> ZNode:
    """zip on an already-zipped memory (for the idempotence property)."""
    if isinstance(z, ZStack):
        return z
    return zip_memory(_unzip(z))


def _unzip(z: ZNode) -> Memory:
    if isinstance(z, ZStack):
        m: Memory = MemEmpty()
        for e in reversed(z.events):
            m = MemCons(e, m)
        return m
    base = ZStack(z.suffix)
    left = _append_events(_unzip(z.left), z.suffix)
    right = _append_events(_unzip(z.right), z.suffix)
    del base
    return MemPair(left, right)


def _append_events(m: Memory, evs: tuple[MemEvent, ...]) -> Memory:
    if isinstance(m, MemEmpty):
        out: Memory = m
        for e in reversed(evs):
            out = MemCons(e, out)
        return out
    if isinstance(m, MemCons):
        return MemCons(m.event, _append_events(m.rest, evs))
    return MemPair(_append_events(m.left, evs), _append_events(m.right, evs))


def print_znode(z: ZNode) -> str:
    def stack(evs):
        return ".".join(_rccs_event(e) for e in evs) if evs else "<>"
    if isinstance(z, ZStack):
        return stack(z.events)
    body = f"[{print_znode(z.left)}, {print_znode(z.right)}]"
    return f"{body}.{stack(z.suffix)}" if z.suffix else body


# ---------------------------------------------------------------------------
# RCCS

FORK = "Y"


@dataclass(frozen=True)
class RccsThread:
    events: tuple  # MemEvent or the fork symbol
    proc: Process


@dataclass(frozen=True)
class RccsPar:
    left: "RccsThread | RccsPar"
    right: "RccsThread | RccsPar"


RccsTerm = RccsThread | RccsPar


def _rccs_event(e: MemEvent) -> str:
    n = e.ident.n if isinstance(e.ident, Atomic) else str(e.ident)
    alt = print_process(e.records[0].discarded) if e.records else "_"
    return f"<{n},{e.label},{alt}>"


def to_rccs(r: ReversibleProcess) -> RccsTerm:
    prepared = prepare(r)
    return _rccs(zip_memory(prepared.mem), prepared.proc, ())


def _rccs(z: ZNode, p: Process, below: tuple) -> RccsTerm:
    if isinstance(z, ZPair):
        if not isinstance(p, Par):
            raise EncodingError("memory pair over a non-parallel term")
        under = (FORK,) + z.suffix + below
        return RccsPar(_rccs(z.left, p.left, under),
                       _rccs(z.right, p.right, under))
    return RccsThread(z.events + below, p)


def print_rccs(t: RccsTerm, top: bool = True) -> str:
    if isinstance(t, RccsPar):
        s = f"{print_rccs(t.left, False)} | {print_rccs(t.right, False)}"
        return s if top else f"({s})"
    evs = ".".join(x if isinstance(x, str) else _rccs_event(x)
                   for x in t.events)
    return f"{evs or '<>'} > {print_process(t.proc)}"


def rccs_threads(t: RccsTerm) -> list[RccsThread]:
    if isinstance(t, RccsThread):
        return [t]
    return rccs_threads(t.left) + rccs_threads(t.right)


# ---------------------------------------------------------------------------
# CCSK

class KTerm:
    __slots__ = ()


@dataclass(frozen=True)
class KProc(KTerm):
    proc: Process


@dataclass(frozen=True)
class KPast(KTerm):
    label: Label
    key: int
    body: KTerm


@dataclass(frozen=True)
class KAlt(KTerm):
    body: KTerm
    alt: Process


@dataclass(frozen=True)
class KPar(KTerm):
    parts: tuple[KTerm, ...]


def to_ccsk(r: ReversibleProcess) -> KTerm:
    prepared = prepare(r)
    parts = _ccsk_list(zip_memory(prepared.mem), prepared.proc)
    return parts[0] if len(parts) == 1 else KPar(tuple(parts))


def _ccsk_list(z: ZNode, p: Process) -> list[KTerm]:
    if isinstance(z, ZStack):
        return [_wrap_events(z.events, KProc(p))]
    if not isinstance(p, Par):
        raise EncodingError("memory pair over a non-parallel term")
    parts = _ccsk_list(z.left, p.left) + _ccsk_list(z.right, p.right)
    if not z.suffix:
        return parts
    body = parts[0] if len(parts) == 1 else KPar(tuple(parts))
    return [_wrap_events(z.suffix, body)]


def _wrap_events(events: tuple[MemEvent, ...], body: KTerm) -> KTerm:
    for e in events:
        if not isinstance(e.ident, Atomic):
            raise EncodingError("prepare was skipped: paired identifier left")
        body = KPast(e.label, e.ident.n, body)
        for rec in e.records:
            body = KAlt(body, rec.discarded)
    return body


def print_ccsk(t: KTerm) -> str:
    if isinstance(t, KProc):
        return print_process(t.proc)
    if isinstance(t, KPast):
        inner = print_ccsk(t.body)
        if isinstance(t.body, (KPar, KAlt)):
            inner = f"({inner})"
        return f"{t.label}[{t.key}].{inner}"
    if isinstance(t, KAlt):
        body = print_ccsk(t.body)
        if isinstance(t.body, (KPar, KAlt)):
            body = f"({body})"
        return f"{body} + {print_process(t.alt)}"
    return " | ".join(
        f"({print_ccsk(x)})" if isinstance(x, (KPar, KAlt)) else print_ccsk(x)
        for x in t.parts)


def ccsk_keys(t: KTerm) -> set[int]:
    if isinstance(t, KProc):
        return set()
    if isinstance(t, KPast):
        return {t.key} | ccsk_keys(t.body)
    if isinstance(t, KAlt):
        return ccsk_keys(t.body)
    return set().union(*(ccsk_keys(x) for x in t.parts))
