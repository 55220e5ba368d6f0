"""Forward-only identified labeled transition system, plus the plain-CCS
stepper used as the conservativity oracle.

Enumeration is structural and returns a list in a fixed order: at every
node its own axioms come first (action, sum, internal choice, replication),
then lifted steps of the left operand, then of the right, then
synchronisations ordered by the contributing step indices.  Two calls on
equal inputs return identical lists.
"""
from __future__ import annotations

from dataclasses import dataclass

from .ident import (Identifier, IdPattern, Seed, SeedLeaf, SeedPair,
                    gamma, pair, seed_valid, splitter_helper)
from .syntax import (TAU, UPS, Bang, IntChoice, Label, NdChoice, Nil, Par,
                     Prefix, Process, Restrict, Sum, thread_split)


@dataclass(frozen=True)
class IdentifiedProcess:
    seed: Seed
    proc: Process

    def __str__(self):
        return f"{self.seed} o {self.proc}"


@dataclass(frozen=True)
class FwdTransition:
    source: IdentifiedProcess
    ident: Identifier
    label: Label
    target: IdentifiedProcess

    def __str__(self):
        return f"{self.source} --[{self.ident} : {self.label}]--> {self.target}"


def identify(p: Process, ip: IdPattern | None = None) -> IdentifiedProcess:
    """Canonical identification of a process, splitting (0,1) by default."""
    return IdentifiedProcess(splitter_helper(ip or IdPattern(0, 1), p), p)


def seed_shape_matches(s: Seed, p: Process) -> bool:
    threads = thread_split(p)
    if threads is not None:
        return isinstance(s, SeedPair) \
            and seed_shape_matches(s.left, threads[0]) \
            and seed_shape_matches(s.right, threads[1])
    return isinstance(s, SeedLeaf)


def well_identified(ip: IdentifiedProcess) -> bool:
    return seed_shape_matches(ip.seed, ip.proc) and seed_valid(ip.seed)


def _premise_seed(s: Seed, p: Process) -> Seed | None:
    """Seed for a choice premise: distribute a single pattern over a
    parallel operand so the operand can act (the seeds of Lemma 2's
    existential are exactly these)."""
    if seed_shape_matches(s, p):
        return s
    if isinstance(s, SeedLeaf):
        return splitter_helper(s.pattern, p)
    return None


def _steps(s: Seed, p: Process) -> list[tuple[Identifier, Label, Seed, Process]]:
    out: list[tuple[Identifier, Label, Seed, Process]] = []
    if isinstance(p, Nil):
        return out

    if isinstance(p, Prefix):
        if not isinstance(s, SeedLeaf):
            return out
        c, st = s.pattern.current, s.pattern.step
        nxt = IdPattern(c + st, st)
        out.append((gamma(c), p.label, splitter_helper(nxt, p.cont), p.cont))
        return out

    if isinstance(p, Restrict):
        for i, lab, s2, q in _steps(s, p.body):
            if lab.is_visible and lab.name == p.name:
                continue
            out.append((i, lab, s2, Restrict(q, p.name)))
        return out

    if isinstance(p, Par):
        if not isinstance(s, SeedPair):
            return out
        lsteps = _steps(s.left, p.left)
        rsteps = _steps(s.right, p.right)
        for i, lab, s1, q in lsteps:
            out.append((i, lab, SeedPair(s1, s.right), Par(q, p.right)))
        for i, lab, s2, q in rsteps:
            out.append((i, lab, SeedPair(s.left, s2), Par(p.left, q)))
        for i1, l1, s1, q1 in lsteps:
            if not l1.is_visible:
                continue
            for i2, l2, s2, q2 in rsteps:
                if l2 == l1.complement():
                    out.append((pair(i1, i2), TAU, SeedPair(s1, s2), Par(q1, q2)))
        return out

    if isinstance(p, NdChoice):
        for operand in (p.left, p.right):
            ps = _premise_seed(s, operand)
            if ps is not None:
                out.extend(_steps(ps, operand))
        return out

    if isinstance(p, Sum):
        for operand in (p.left, p.right):
            if isinstance(operand, Prefix):
                if isinstance(s, SeedLeaf):
                    c, st = s.pattern.current, s.pattern.step
                    nxt = IdPattern(c + st, st)
                    out.append((gamma(c), operand.label,
                                splitter_helper(nxt, operand.cont), operand.cont))
            elif isinstance(operand, Sum):
                out.extend(_steps(s, operand))
        return out

    if isinstance(p, IntChoice):
        if not isinstance(s, SeedLeaf):
            return out
        c, st = s.pattern.current, s.pattern.step
        nxt = IdPattern(c + st, st)
        for operand in (p.left, p.right):
            out.append((gamma(c), UPS, splitter_helper(nxt, operand), operand))
        return out

    if isinstance(p, Bang):
        if not isinstance(s, SeedLeaf):
            return out
        ip = s.pattern
        s1 = SeedLeaf(split_first(ip))
        # repl.1: one copy acts (never an internal tau)
        prem = splitter_helper(split_second(ip), p.body)
        for i, lab, s2, q in _steps(prem, p.body):
            if lab.kind == "tau":
                continue
            out.append((i, lab, SeedPair(s1, s2), Par(p, q)))
        # repl.2: two copies synchronise; the bang keeps the first half and
        # the copies split the second (the figure's second-of-first reading
        # would overlap the bang's own stream)
        prem_l = splitter_helper(split_first(split_second(ip)), p.body)
        prem_r = splitter_helper(split_second(split_second(ip)), p.body)
        lsteps = _steps(prem_l, p.body)
        rsteps = _steps(prem_r, p.body)
        for i1, l1, sl, q1 in lsteps:
            if not l1.is_visible:
                continue
            for i2, l2, sr, q2 in rsteps:
                if l2 == l1.complement():
                    out.append((pair(i1, i2), TAU,
                                SeedPair(s1, SeedPair(sl, sr)),
                                Par(p, Par(q1, q2))))
        return out

    raise TypeError(f"not a process: {p!r}")


def split_first(ip: IdPattern) -> IdPattern:
    return IdPattern(ip.current, 2 * ip.step)


def split_second(ip: IdPattern) -> IdPattern:
    return IdPattern(ip.current + ip.step, 2 * ip.step)


def dedup(items: list) -> list:
    """Stable removal of duplicates (a transition derivable by two rule
    instances, e.g. both branches of b + b, is still one transition)."""
    seen = set()
    out = []
    for x in items:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def enumerate_fwd(ip: IdentifiedProcess) -> list[FwdTransition]:
    if not well_identified(ip):
        raise ValueError(f"not well-identified: {ip}")
    return [FwdTransition(ip, i, lab, IdentifiedProcess(s2, q))
            for i, lab, s2, q in dedup(_steps(ip.seed, ip.proc))]


def concurrent_fwd(t1: FwdTransition, t2: FwdTransition) -> bool:
    if t1.source != t2.source:
        raise ValueError("transitions are not coinitial")
    from .ident import compatible_ids
    return compatible_ids(t1.ident, t2.ident)


# ---------------------------------------------------------------------------
# Plain CCS oracle

def ccs_steps(p: Process) -> list[tuple[Label, Process]]:
    """The same rules with seeds and identifiers erased."""
    return dedup(_ccs(p))


def _ccs(p: Process) -> list[tuple[Label, Process]]:
    out: list[tuple[Label, Process]] = []
    if isinstance(p, Nil):
        return out
    if isinstance(p, Prefix):
        return [(p.label, p.cont)]
    if isinstance(p, Restrict):
        return [(lab, Restrict(q, p.name)) for lab, q in ccs_steps(p.body)
                if not (lab.is_visible and lab.name == p.name)]
    if isinstance(p, Par):
        lsteps = ccs_steps(p.left)
        rsteps = ccs_steps(p.right)
        out += [(lab, Par(q, p.right)) for lab, q in lsteps]
        out += [(lab, Par(p.left, q)) for lab, q in rsteps]
        for l1, q1 in lsteps:
            if not l1.is_visible:
                continue
            for l2, q2 in rsteps:
                if l2 == l1.complement():
                    out.append((TAU, Par(q1, q2)))
        return out
    if isinstance(p, NdChoice):
        return ccs_steps(p.left) + ccs_steps(p.right)
    if isinstance(p, Sum):
        for operand in (p.left, p.right):
            if isinstance(operand, Prefix):
                out.append((operand.label, operand.cont))
            elif isinstance(operand, Sum):
                out.extend(ccs_steps(operand))
        return out
    if isinstance(p, IntChoice):
        return [(UPS, p.left), (UPS, p.right)]
    if isinstance(p, Bang):
        inner = ccs_steps(p.body)
        out += [(lab, Par(p, q)) for lab, q in inner if lab.kind != "tau"]
        for l1, q1 in inner:
            if not l1.is_visible:
                continue
            for l2, q2 in inner:
                if l2 == l1.complement():
                    out.append((TAU, Par(p, Par(q1, q2))))
        return out
    raise TypeError(f"not a process: {p!r}")
