"""Desk-scale property suites for the metatheory: the four causal-
consistency axioms, causal equivalence against cofinality, identifier
unicity, and conservativity over plain CCS.  Each checker returns a list of
violation records; an empty list is a pass."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

from .gen import corpus
from .ident import components
from .ilts import ccs_steps, enumerate_fwd, identify
from .irlts import (NormalizationStuck, ReversibleProcess, Trace,
                    concurrent_r, enumerate_all, enumerate_bwd_r,
                    enumerate_fwd_r, initial_state, normalize_trace,
                    print_state, rewrite_closure)
from .memory import event_count
from .syntax import Process, print_process


@dataclass
class Violation:
    kind: str
    where: str
    detail: str

    def __str__(self):
        return f"[{self.kind}] at {self.where}: {self.detail}"


@dataclass
class SuiteReport:
    name: str
    checked: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        head = f"{self.name}: {'PASS' if self.ok else 'FAIL'} ({self.checked} checks)"
        return "\n".join([head] + [f"  {v}" for v in self.violations[:20]])


def reachable_states(r0: ReversibleProcess, repl=None, max_states=4000,
                     max_depth=None) -> list[ReversibleProcess]:
    seen = {r0}
    frontier = [r0]
    order = [r0]
    d = 0
    while frontier and len(seen) < max_states:
        if max_depth is not None and d >= max_depth:
            break
        nxt = []
        for s in frontier:
            for t in enumerate_all(s, repl):
                if t.target not in seen:
                    seen.add(t.target)
                    order.append(t.target)
                    nxt.append(t.target)
        frontier = nxt
        d += 1
    return order


# ---------------------------------------------------------------------------
# Axioms (loop, square, backward concurrency, well-foundedness)

def check_axioms(p: Process, repl=None, max_states=2000) -> SuiteReport:
    rep = SuiteReport(f"axioms[{print_process(p)}]")
    r0 = initial_state(p)
    for s in reachable_states(r0, repl, max_states):
        fwd = enumerate_fwd_r(s, repl)
        bwd = enumerate_bwd_r(s, repl)
        here = print_state(s)

        for t in fwd:
            rep.checked += 1
            if not any(u.ident == t.ident and u.label == t.label
                       and u.target == s
                       for u in enumerate_bwd_r(t.target, repl)):
                rep.violations.append(Violation(
                    "loop", here, f"forward {t.ident} {t.label} has no inverse"))
        for t in bwd:
            rep.checked += 1
            if not any(u.ident == t.ident and u.label == t.label
                       and u.target == s
                       for u in enumerate_fwd_r(t.target, repl)):
                rep.violations.append(Violation(
                    "loop", here, f"backward {t.ident} {t.label} has no inverse"))
            if event_count(t.target.mem) >= event_count(s.mem):
                rep.violations.append(Violation(
                    "well-foundedness", here,
                    f"backward {t.ident} does not shrink the memory"))

        for t1, t2 in combinations(bwd, 2):
            rep.checked += 1
            conc = concurrent_r(t1, t2)
            if t1.ident != t2.ident and not conc:
                rep.violations.append(Violation(
                    "backward-concurrency", here,
                    f"{t1.ident} vs {t2.ident} not concurrent"))

        for t1, t2 in combinations(fwd + bwd, 2):
            if not concurrent_r(t1, t2):
                continue
            rep.checked += 1
            ok2 = any(u.signature() == t2.signature()
                      and any(v.signature() == t1.signature()
                              and v.target == u.target
                              for v in enumerate_all(t2.target, repl))
                      for u in enumerate_all(t1.target, repl))
            if not ok2:
                rep.violations.append(Violation(
                    "square", here,
                    f"{t1.direction} {t1.ident} / {t2.direction} {t2.ident} "
                    "has no cofinal completion"))
    return rep


# ---------------------------------------------------------------------------
# Causal consistency at desk scale

def all_traces(r0: ReversibleProcess, max_len: int, repl=None,
               cap=20000) -> list[Trace]:
    out = [Trace(r0)]
    frontier = [Trace(r0)]
    for _ in range(max_len):
        nxt = []
        for d in frontier:
            for t in enumerate_all(d.target, repl):
                d2 = Trace(r0, d.steps + (t,))
                nxt.append(d2)
                out.append(d2)
                if len(out) > cap:
                    raise RuntimeError("trace enumeration exceeded cap")
        frontier = nxt
    return out


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            p = self.parent[x] = self.find(p)
        return p

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def check_causal(p: Process, max_len=4, bound=10_000, repl=None) -> SuiteReport:
    """Coinitial traces are cofinal iff causally equivalent.  The rewrite
    moves preserve endpoints, so 'equivalent implies cofinal' holds by
    construction and only 'cofinal implies equivalent' needs search: all
    traces are grouped into rewrite-connected components and every cofinal
    pair must land in one component."""
    rep = SuiteReport(f"causal[{print_process(p)}]")
    r0 = initial_state(p)
    traces = all_traces(r0, max_len, repl)
    uf = _UnionFind()
    for d in traces:
        dk = d.key()
        for k in rewrite_closure(d, bound, repl):
            uf.union(dk, k)

    by_target: dict = {}
    for d in traces:
        by_target.setdefault(d.target, []).append(d)

    for target, group in by_target.items():
        base = group[0]
        for d in group[1:]:
            rep.checked += 1
            if uf.find(d.key()) != uf.find(base.key()):
                rep.violations.append(Violation(
                    "causal", print_state(r0),
                    f"cofinal at {print_state(target)} but not causally "
                    f"equivalent: {[str(t.ident) for t in base.steps]} vs "
                    f"{[str(t.ident) for t in d.steps]}"))
    return rep


# ---------------------------------------------------------------------------
# Unicity

def check_unicity_ilts(p: Process, samples=50, max_len=8, seed=11) -> SuiteReport:
    rep = SuiteReport(f"unicity-ilts[{print_process(p)}]")
    rng = random.Random(seed)
    for _ in range(samples):
        state = identify(p)
        used: set[int] = set()
        for _ in range(max_len):
            steps = enumerate_fwd(state)
            if not steps:
                break
            t = rng.choice(steps)
            rep.checked += 1
            atoms = {c.n for c in components(t.ident)}
            if used & atoms:
                rep.violations.append(Violation(
                    "unicity", str(state), f"{t.ident} reuses an identifier"))
                break
            used |= atoms
            state = t.target
    return rep


def check_unicity_normalized(p: Process, samples=30, max_len=6,
                             seed=13, repl=None) -> SuiteReport:
    rep = SuiteReport(f"unicity-irlts[{print_process(p)}]")
    from .irlts import random_trace
    r0 = initial_state(p)
    for k in range(samples):
        d = random_trace(r0, max_len, seed + k, repl)
        rep.checked += 1
        try:
            normalize_trace(d, repl)
        except NormalizationStuck as e:
            rep.violations.append(Violation("unicity", print_state(r0), str(e)))
    return rep


# ---------------------------------------------------------------------------
# Conservativity against plain CCS

def _ccs_trace_set(p: Process, depth: int) -> set:
    out = set()
    frontier = [((), p)]
    for _ in range(depth):
        nxt = []
        for labs, q in frontier:
            for lab, q2 in ccs_steps(q):
                seq = labs + (str(lab),)
                out.add(seq)
                nxt.append((seq, q2))
        frontier = nxt
    return out


def _ilts_trace_set(p: Process, depth: int) -> set:
    out = set()
    frontier = [((), identify(p))]
    for _ in range(depth):
        nxt = []
        for labs, s in frontier:
            for t in enumerate_fwd(s):
                seq = labs + (str(t.label),)
                out.add(seq)
                nxt.append((seq, t.target))
        frontier = nxt
    return out


def check_conservativity(p: Process, depth=4) -> SuiteReport:
    rep = SuiteReport(f"conservativity[{print_process(p)}]")
    rep.checked += 1
    ccs = _ccs_trace_set(p, depth)
    ilts = _ilts_trace_set(p, depth)
    if ccs != ilts:
        only_ccs = sorted(ccs - ilts)[:3]
        only_ilts = sorted(ilts - ccs)[:3]
        rep.violations.append(Violation(
            "conservativity", print_process(p),
            f"CCS-only traces {only_ccs}, ILTS-only traces {only_ilts}"))
    return rep


# ---------------------------------------------------------------------------
# Aggregate suites used by the CLI

def run_suite(name: str, p: Process, depth=4, repl=None) -> SuiteReport:
    if name == "axioms":
        return check_axioms(p, repl)
    if name == "unicity":
        rep = check_unicity_ilts(p)
        rep2 = check_unicity_normalized(p, repl=repl)
        rep.name = f"unicity[{print_process(p)}]"
        rep.checked += rep2.checked
        rep.violations += rep2.violations
        return rep
    if name == "causal":
        return check_causal(p, max_len=min(depth, 4), repl=repl)
    if name == "conservativity":
        return check_conservativity(p, depth)
    raise ValueError(f"unknown suite {name!r}")


def default_corpus() -> list[Process]:
    return corpus()
