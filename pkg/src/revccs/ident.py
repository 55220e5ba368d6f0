"""Identifier algebra: generators, pairing, identifier patterns, seeds,
splitters and the relations between them (compatibility, downstream).

The shipped identifier structure is the integer one: atomic identifiers are
the naturals under the identity generator, a synchronisation identifier is
the (negated) image of the pairing bijection (m, n) |-> 2^m(2n+1) - 1, and
the splitter halves an arithmetic progression into its even- and odd-indexed
halves.  Identifiers are kept abstract (Atomic/Paired); the concrete pairing
value is materialised only for display and ordering, so deep traces never
build huge powers of two.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .syntax import Process, thread_split


# ---------------------------------------------------------------------------
# Identifiers

@dataclass(frozen=True)
class Atomic:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("atomic identifiers are naturals")

    def __str__(self):
        return f"#{self.n}"


@dataclass(frozen=True)
class Paired:
    left: int
    right: int

    def __str__(self):
        return f"#{self.left}(+)#{self.right}"


Identifier = Atomic | Paired


def gamma(n: int) -> Atomic:
    return Atomic(n)


def gamma_inv(i: Identifier) -> int:
    if not isinstance(i, Atomic):
        raise ValueError(f"{i} is not atomic")
    return i.n


def pair(i: Identifier, j: Identifier) -> Paired:
    if not isinstance(i, Atomic) or not isinstance(j, Atomic):
        raise ValueError("pairing is defined on atomic identifiers only")
    return Paired(i.n, j.n)


def unpair(i: Identifier) -> tuple[Atomic, Atomic]:
    if not isinstance(i, Paired):
        raise ValueError(f"{i} is not paired")
    return Atomic(i.left), Atomic(i.right)


def concrete(i: Identifier) -> int:
    """Concrete integer value: n for Atomic(n), -(2^m(2n+1)-1) for Paired."""
    if isinstance(i, Atomic):
        return i.n
    return -((1 << i.left) * (2 * i.right + 1) - 1)


def components(i: Identifier) -> tuple[Atomic, ...]:
    if isinstance(i, Atomic):
        return (i,)
    return unpair(i)


def parse_identifier(text: str) -> Identifier:
    m = re.fullmatch(r"#(\d+)(?:\(\+\)#(\d+))?", text.strip())
    if not m:
        raise ValueError(f"bad identifier {text!r}")
    if m.group(2) is None:
        return Atomic(int(m.group(1)))
    return Paired(int(m.group(1)), int(m.group(2)))


# ---------------------------------------------------------------------------
# Identifier patterns

@dataclass(frozen=True)
class IdPattern:
    current: int
    step: int

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.current < 0:
            raise ValueError("current must be a natural")

    def __str__(self):
        return f"({self.current},{self.step})"


def stream_take(ip: IdPattern, n: int) -> list[Atomic]:
    return [Atomic(ip.current + k * ip.step) for k in range(n)]


def stream_contains(ip: IdPattern, i: Identifier) -> bool:
    n = gamma_inv(i)
    return n >= ip.current and (n - ip.current) % ip.step == 0


def compatible_patterns(ip1: IdPattern, ip2: IdPattern) -> bool:
    """Disjointness of the two arithmetic progressions, in closed form:
    they meet iff gcd(s1, s2) divides c1 - c2 (a CRT solution always has a
    representative past both currents)."""
    return (ip1.current - ip2.current) % math.gcd(ip1.step, ip2.step) != 0


def split(ip: IdPattern) -> tuple[IdPattern, IdPattern]:
    return (IdPattern(ip.current, 2 * ip.step),
            IdPattern(ip.current + ip.step, 2 * ip.step))


def unsplit(ip1: IdPattern, ip2: IdPattern) -> IdPattern:
    """Inverse of split; fails on patterns not in canonical split relation."""
    if ip1.step != ip2.step or ip1.step % 2 != 0 \
            or ip2.current - ip1.current != ip1.step // 2:
        raise ValueError(f"{ip1}, {ip2} are not a canonical split")
    return IdPattern(ip1.current, ip1.step // 2)


# ---------------------------------------------------------------------------
# Seeds

class Seed:
    __slots__ = ()


@dataclass(frozen=True)
class SeedLeaf(Seed):
    pattern: IdPattern

    def __str__(self):
        return str(self.pattern)


@dataclass(frozen=True)
class SeedPair(Seed):
    left: Seed
    right: Seed

    def __str__(self):
        return f"({self.left},{self.right})"


def leaf(c: int, s: int) -> SeedLeaf:
    return SeedLeaf(IdPattern(c, s))


def seed_patterns(s: Seed) -> list[IdPattern]:
    if isinstance(s, SeedLeaf):
        return [s.pattern]
    return seed_patterns(s.left) + seed_patterns(s.right)


def seed_valid(s: Seed) -> bool:
    pats = seed_patterns(s)
    return all(compatible_patterns(p, q)
               for k, p in enumerate(pats) for q in pats[k + 1:])


def seeds_compatible(s1: Seed, s2: Seed) -> bool:
    return all(compatible_patterns(p, q)
               for p in seed_patterns(s1) for q in seed_patterns(s2))


def seed_proj(s: Seed, j: int) -> Seed:
    """Leafwise j-th projection of the splitter, shape preserving."""
    if j not in (1, 2):
        raise ValueError("projection index must be 1 or 2")
    if isinstance(s, SeedLeaf):
        return SeedLeaf(split(s.pattern)[j - 1])
    return SeedPair(seed_proj(s.left, j), seed_proj(s.right, j))


def seed_split(s: Seed) -> tuple[Seed, Seed]:
    return seed_proj(s, 1), seed_proj(s, 2)


def splitter_helper(ip: IdPattern, p: Process) -> Seed:
    """Distribute a pattern over the top-level parallel structure of p."""
    threads = thread_split(p)
    if threads is not None:
        ip1, ip2 = split(ip)
        return SeedPair(splitter_helper(ip1, threads[0]),
                        splitter_helper(ip2, threads[1]))
    return SeedLeaf(ip)


def unify(s: Seed) -> IdPattern:
    """Refold a seed to a single pattern: descend first components down to a
    leaf; a pair's leftmost pattern contributes its first split half, a bare
    leaf is returned unchanged."""
    if isinstance(s, SeedLeaf):
        return s.pattern
    t = s
    while isinstance(t, SeedPair):
        t = t.left
    return split(t.pattern)[0]


def unsplit_for(p: Process, s: Seed) -> IdPattern:
    """The unique ip with splitter_helper(ip, p) == s, for the canonical
    splitter.  Raises on shape mismatch or non-canonically related leaves,
    which signals a seed no backward action step can have produced."""
    threads = thread_split(p)
    if threads is not None:
        if not isinstance(s, SeedPair):
            raise ValueError("seed shape does not match the parallel structure")
        return unsplit(unsplit_for(threads[0], s.left),
                       unsplit_for(threads[1], s.right))
    if not isinstance(s, SeedLeaf):
        raise ValueError("seed shape does not match the parallel structure")
    return s.pattern


def parse_seed(text: str) -> Seed:
    s, rest = _parse_seed(text.strip())
    if rest.strip():
        raise ValueError(f"trailing input in seed: {rest!r}")
    return s


def _parse_seed(text: str) -> tuple[Seed, str]:
    text = text.lstrip()
    if not text.startswith("("):
        raise ValueError(f"bad seed {text!r}")
    inner = text[1:].lstrip()
    if inner and (inner[0].isdigit()):
        m = re.match(r"\s*(\d+)\s*,\s*(\d+)\s*\)", text[1:])
        if not m:
            raise ValueError(f"bad pattern {text!r}")
        return SeedLeaf(IdPattern(int(m.group(1)), int(m.group(2)))), \
            text[1 + m.end():]
    left, rest = _parse_seed(inner)
    rest = rest.lstrip()
    if not rest.startswith(","):
        raise ValueError("expected ',' in seed pair")
    right, rest = _parse_seed(rest[1:])
    rest = rest.lstrip()
    if not rest.startswith(")"):
        raise ValueError("expected ')' closing seed pair")
    return SeedPair(left, right), rest[1:]


# ---------------------------------------------------------------------------
# Compatibility of identifiers, downstream relation

def compatible_ids(i1: Identifier, i2: Identifier) -> bool:
    """Absence of any shared atomic constituent (four-case table)."""
    if isinstance(i1, Atomic) and isinstance(i2, Atomic):
        return i1 != i2
    if isinstance(i1, Atomic):
        return i1.n not in (i2.left, i2.right)
    if isinstance(i2, Atomic):
        return i2.n not in (i1.left, i1.right)
    return len({i1.left, i1.right, i2.left, i2.right}) == 4


def downstream(i: Identifier, ip: IdPattern) -> bool:
    """Whether ip's stream can produce i, directly or through pairing."""
    if isinstance(i, Atomic):
        return stream_contains(ip, i)
    return any(stream_contains(ip, c) for c in unpair(i))
