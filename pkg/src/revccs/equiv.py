"""Contexts (term, memory, reversible), structural normalization at the
identified-calculus level, alpha-equivalence, and the back-and-forth
bisimulation checkers."""
from __future__ import annotations

from dataclasses import dataclass, field

from .ident import Atomic, Identifier, unify, splitter_helper
from .ilts import IdentifiedProcess
from .irlts import (FWD, ReplConfig, ReversibleProcess, enumerate_all,
                    origin)
from .memory import (EMPTY, BranchRecord, MemEvent, MemPair, Memory,
                     append_bottom, dup_helper, insert_at, push, subst_id)
from .syntax import (Bang, IntChoice, NdChoice, Nil, NIL, Par, Prefix,
                     Process, Restrict, Sum, free_names)


# ---------------------------------------------------------------------------
# Term contexts

@dataclass(frozen=True)
class Hole(Process):
    def __str__(self):
        return "_"


HOLE = Hole()


def count_holes(p: Process) -> int:
    if isinstance(p, Hole):
        return 1
    if isinstance(p, (Nil,)):
        return 0
    if isinstance(p, Prefix):
        return count_holes(p.cont)
    if isinstance(p, (Restrict, Bang)):
        return count_holes(p.body)
    return count_holes(p.left) + count_holes(p.right)


def apply_term_context(ctx: Process, p: Process) -> Process:
    """Plug p into the unique hole.  Capture by restriction is permitted."""
    if count_holes(ctx) != 1:
        raise ValueError("a context has exactly one hole")
    return _plug(ctx, p)


def _plug(ctx: Process, p: Process) -> Process:
    if isinstance(ctx, Hole):
        return p
    if isinstance(ctx, Nil):
        return ctx
    if isinstance(ctx, Prefix):
        return Prefix(ctx.label, _plug(ctx.cont, p))
    if isinstance(ctx, Restrict):
        return Restrict(_plug(ctx.body, p), ctx.name)
    if isinstance(ctx, Bang):
        return Bang(_plug(ctx.body, p))
    return type(ctx)(_plug(ctx.left, p), _plug(ctx.right, p))


def apply_id_context(ctx: Process, ip: IdentifiedProcess) -> IdentifiedProcess:
    """Identified context application: refold the seed to one pattern and
    redistribute it over the composed term."""
    q = apply_term_context(ctx, ip.proc)
    return IdentifiedProcess(splitter_helper(unify(ip.seed), q), q)


# ---------------------------------------------------------------------------
# Memory contexts

class MemContext:
    __slots__ = ()


@dataclass(frozen=True)
class MCHole(MemContext):
    pass


@dataclass(frozen=True)
class MCPair(MemContext):
    left: "MemContext | Memory"
    right: "MemContext | Memory"


@dataclass(frozen=True)
class MCPush(MemContext):  # e.ctx
    event: MemEvent
    inner: MemContext


@dataclass(frozen=True)
class MCAppend(MemContext):  # ctx.e
    inner: MemContext
    event: MemEvent


@dataclass(frozen=True)
class MCDup(MemContext):  # duplication over the final term's thread shape
    inner: MemContext


@dataclass(frozen=True)
class MCSubst(MemContext):
    inner: MemContext
    old: Identifier
    new: Identifier


@dataclass(frozen=True)
class MCInsert(MemContext):
    inner: MemContext
    ident: Identifier
    record: BranchRecord


def apply_mem_context(ctx, m: Memory, shape_proc: Process) -> Memory:
    if isinstance(ctx, Memory):
        return ctx
    if isinstance(ctx, MCHole):
        return m
    if isinstance(ctx, MCPair):
        return MemPair(apply_mem_context(ctx.left, m, shape_proc),
                       apply_mem_context(ctx.right, m, shape_proc))
    if isinstance(ctx, MCPush):
        return push(ctx.event, apply_mem_context(ctx.inner, m, shape_proc))
    if isinstance(ctx, MCAppend):
        return append_bottom(apply_mem_context(ctx.inner, m, shape_proc),
                             ctx.event)
    if isinstance(ctx, MCDup):
        return dup_helper(apply_mem_context(ctx.inner, m, shape_proc),
                          shape_proc)
    if isinstance(ctx, MCSubst):
        return subst_id(apply_mem_context(ctx.inner, m, shape_proc),
                        ctx.old, ctx.new)
    if isinstance(ctx, MCInsert):
        return insert_at(apply_mem_context(ctx.inner, m, shape_proc),
                         ctx.ident, ctx.record)
    raise TypeError(f"not a memory context: {ctx!r}")


def is_memory_neutral(ctx) -> bool:
    """Built from the hole and empty-padded pairs only: adds no events."""
    if isinstance(ctx, MCHole):
        return True
    if isinstance(ctx, MCPair):
        if ctx.left == EMPTY and isinstance(ctx.right, MemContext):
            return is_memory_neutral(ctx.right)
        if ctx.right == EMPTY and isinstance(ctx.left, MemContext):
            return is_memory_neutral(ctx.left)
    return False


@dataclass(frozen=True)
class RevContext:
    mem_ctx: "MemContext | Memory"
    term_ctx: Process


def apply_rev_context(ctx: RevContext, r: ReversibleProcess) -> ReversibleProcess:
    q = apply_term_context(ctx.term_ctx, r.proc)
    m = apply_mem_context(ctx.mem_ctx, r.mem, q)
    return ReversibleProcess(splitter_helper(unify(r.seed), q), m, q)


# ---------------------------------------------------------------------------
# Structural normalization (identified-calculus fragment) and alpha

def term_key(p: Process):
    if isinstance(p, Nil):
        return (0,)
    if isinstance(p, Hole):
        return (1,)
    if isinstance(p, Prefix):
        return (2, p.label.kind, p.label.name or "", term_key(p.cont))
    if isinstance(p, Restrict):
        return (3, p.name, term_key(p.body))
    if isinstance(p, Bang):
        return (4, term_key(p.body))
    rank = {Par: 5, Sum: 6, NdChoice: 7, IntChoice: 8}[type(p)]
    return (rank, term_key(p.left), term_key(p.right))


def _flatten(p: Process, op) -> list[Process]:
    if isinstance(p, op):
        return _flatten(p.left, op) + _flatten(p.right, op)
    return [p]


def _rebuild(parts: list[Process], op) -> Process:
    acc = parts[-1]
    for q in reversed(parts[:-1]):
        acc = op(q, acc)
    return acc


def struct_normalize(p: Process) -> Process:
    """Fixed-order terminating rewrite: distribute restriction over sums,
    drop vacuous restrictions and inert units, flatten + sort + deduplicate
    the commutative operators.  Sound for structural equivalence, not
    claimed complete."""
    while True:
        q = _norm(p)
        if q == p:
            return p
        p = q


def _norm(p: Process) -> Process:
    if isinstance(p, (Nil, Hole)):
        return p
    if isinstance(p, Prefix):
        return Prefix(p.label, _norm(p.cont))
    if isinstance(p, Bang):
        return Bang(_norm(p.body))
    if isinstance(p, Restrict):
        return _norm_restrict(_norm(p.body), p.name)
    if isinstance(p, Par):
        parts = [_norm(x) for x in _flatten(p, Par)]
        parts = [x for x in parts if not isinstance(x, Nil)]
        if not parts:
            return NIL
        parts.sort(key=term_key)
        return _rebuild(parts, Par)
    if isinstance(p, Sum):
        parts = [_norm(x) for x in _flatten(p, Sum)]
        parts = sorted(set(parts), key=term_key)
        return _rebuild(parts, Sum)
    if isinstance(p, (NdChoice, IntChoice)):
        op = type(p)
        parts = [_norm(x) for x in _flatten(p, op)]
        parts = [x for x in parts if not isinstance(x, Nil)]
        if not parts:
            return NIL
        parts = sorted(set(parts), key=term_key)
        return _rebuild(parts, op)
    raise TypeError(f"not a process: {p!r}")


def _norm_restrict(body: Process, a: str) -> Process:
    if isinstance(body, Nil):
        return NIL
    if a not in free_names(body):
        return body
    if isinstance(body, (Sum, NdChoice, IntChoice)):
        op = type(body)
        return _norm(op(Restrict(body.left, a), Restrict(body.right, a)))
    if isinstance(body, Par):
        if a not in free_names(body.right):
            return _norm(Par(Restrict(body.left, a), body.right))
        if a not in free_names(body.left):
            return _norm(Par(body.left, Restrict(body.right, a)))
        return Restrict(body, a)
    if isinstance(body, Restrict) and body.name < a:
        # commute nested restrictions so the smaller name sits outermost
        return Restrict(Restrict(body.body, a), body.name)
    return Restrict(body, a)


def alpha_eq(p: Process, q: Process) -> bool:
    """Equality up to renaming of restriction-bound names."""
    return _alpha(p, q, {}, {}, [0])


def _alpha(p, q, env1, env2, counter) -> bool:
    if type(p) is not type(q):
        return False
    if isinstance(p, (Nil, Hole)):
        return True
    if isinstance(p, Prefix):
        if p.label.kind != q.label.kind:
            return False
        if p.label.is_visible:
            n1 = env1.get(p.label.name, ("free", p.label.name))
            n2 = env2.get(q.label.name, ("free", q.label.name))
            if n1 != n2:
                return False
        return _alpha(p.cont, q.cont, env1, env2, counter)
    if isinstance(p, Restrict):
        counter[0] += 1
        tag = ("bound", counter[0])
        e1 = dict(env1, **{p.name: tag})
        e2 = dict(env2, **{q.name: tag})
        return _alpha(p.body, q.body, e1, e2, counter)
    if isinstance(p, Bang):
        return _alpha(p.body, q.body, env1, env2, counter)
    return _alpha(p.left, q.left, env1, env2, counter) and \
        _alpha(p.right, q.right, env1, env2, counter)


def struct_equiv(p: Process, q: Process) -> bool:
    return alpha_eq(struct_normalize(p), struct_normalize(q))


# ---------------------------------------------------------------------------
# Back-and-forth bisimulations

def _has_bang(p: Process) -> bool:
    if isinstance(p, Bang):
        return True
    if isinstance(p, Prefix):
        return _has_bang(p.cont)
    if isinstance(p, Restrict):
        return _has_bang(p.body)
    if isinstance(p, (Nil, Hole)):
        return False
    return _has_bang(p.left) or _has_bang(p.right)


def _ident_key(i: Identifier):
    if isinstance(i, Atomic):
        return (0, i.n, 0)
    return (1, i.left, i.right)


@dataclass
class BisimResult:
    related: bool
    witness: list = field(default_factory=list)
    play: list = field(default_factory=list)

    def __bool__(self):
        return self.related

    def witness_text(self) -> str:
        lines = []
        for s1, s2, f in self.witness:
            fmap = " ".join(f"{a}->{b}" for a, b in f) if f is not None else "-"
            lines.append(f"{s1}  ~  {s2}  [{fmap}]")
        return "\n".join(lines)


def bf_bisimilar(r1: ReversibleProcess, r2: ReversibleProcess,
                 repl: ReplConfig | None = None) -> BisimResult:
    """Back-and-forth bisimilarity with a persistent identifier bijection,
    decided on the origins' finite reachable spaces."""
    return _bisim(r1, r2, with_bijection=True, repl=repl)


def sbf_bisimilar(r1: ReversibleProcess, r2: ReversibleProcess,
                  repl: ReplConfig | None = None) -> BisimResult:
    """Simple back-and-forth bisimilarity: labels and directions match, no
    identifier correspondence is tracked."""
    return _bisim(r1, r2, with_bijection=False, repl=repl)


def _bisim(r1, r2, with_bijection, repl) -> BisimResult:
    from .irlts import ReplicationDisabled
    if _has_bang(r1.proc) or _has_bang(r2.proc):
        raise ReplicationDisabled(
            "bisimilarity is decided on replication-free terms only")
    o1, o2 = origin(r1, repl), origin(r2, repl)
    root = (o1, o2, () if with_bijection else None)

    cache: dict = {}
    attacks: dict = {}
    discovered = {root}
    stack = [root]
    while stack:
        node = stack.pop()
        s1, s2, _f = node
        node_attacks = []
        for side, st in ((1, s1), (2, s2)):
            for t in _moves(st, cache, repl):
                children = _responses(node, side, t, with_bijection, cache,
                                      repl)
                node_attacks.append((side, t, children))
                for ch in children:
                    if ch not in discovered:
                        discovered.add(ch)
                        stack.append(ch)
        attacks[node] = node_attacks

    # greatest fixpoint: repeatedly kill nodes with an unanswerable attack
    alive = set(discovered)
    kill_round: dict = {}
    rnd = 0
    while True:
        doomed = [n for n in alive
                  if any(not any(ch in alive for ch in children)
                         for _side, _t, children in attacks[n])]
        if not doomed:
            break
        for n in doomed:
            alive.discard(n)
            kill_round[n] = rnd
        rnd += 1

    if root in alive:
        return BisimResult(True, witness=sorted(
            ((s1, s2, f) for s1, s2, f in alive),
            key=lambda x: (str(x[0]), str(x[1]))))
    return BisimResult(False, play=_extract_play(root, attacks, kill_round))


def _extract_play(node, attacks, kill_round) -> list[str]:
    """One branch of the attacker's winning strategy, as transcript lines."""
    lines = []
    for _ in range(10_000):
        my_round = kill_round[node]
        side, t, children = next(
            (a for a in attacks[node]
             if all(ch in kill_round and kill_round[ch] < my_round
                    for ch in a[2]) or not a[2]))
        lines.append(f"attacker (side {side}): {t.direction} {t.ident} {t.label}")
        if not children:
            lines.append("defender: no matching move")
            return lines
        node = min(children, key=lambda ch: kill_round[ch])
        lines.append("defender answers; play continues at a refuted position")
    lines.append("... (play truncated)")
    return lines


def _moves(state, cache, repl):
    if state not in cache:
        cache[state] = enumerate_all(state, repl)
    return cache[state]


def _responses(node, attack_side, t, with_bijection, cache, repl):
    """Defender responses to attack t played on attack_side; returns child
    nodes."""
    s1, s2, f = node
    my, other = (s1, s2) if attack_side == 1 else (s2, s1)
    children = []
    for u in _moves(other, cache, repl):
        if u.direction != t.direction or u.label != t.label:
            continue
        if not with_bijection:
            child_f = None
        else:
            i, j = (t.ident, u.ident) if attack_side == 1 else (u.ident, t.ident)
            fdict = dict(f)
            if t.direction == FWD:
                if i in fdict or j in fdict.values():
                    continue
                fdict[i] = j
                child_f = tuple(sorted(fdict.items(),
                                       key=lambda kv: _ident_key(kv[0])))
            else:
                if fdict.get(i) != j:
                    continue
                del fdict[i]
                child_f = tuple(sorted(fdict.items(),
                                       key=lambda kv: _ident_key(kv[0])))
        if attack_side == 1:
            children.append((t.target, u.target, child_f))
        else:
            children.append((u.target, t.target, child_f))
    return children
