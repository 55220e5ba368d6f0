"""Term enumeration and random generation for the property suites and
tests.  Exhaustive enumeration is only tractable at small depth; the suites
combine a full small-depth stratum with a seeded random sample of deeper
terms so every operator nesting still gets exercised."""
from __future__ import annotations

import random
from functools import lru_cache

from .syntax import (Bang, IntChoice, Label, NdChoice, NIL, Nil, Par, Prefix,
                     Process, Restrict, Sum, inp, out)


def labels_over(names, with_co=True) -> list[Label]:
    labs = [inp(n) for n in names]
    if with_co:
        labs += [out(n) for n in names]
    return labs


def depth(p: Process) -> int:
    if isinstance(p, Nil):
        return 0
    if isinstance(p, Prefix):
        return 1 + depth(p.cont)
    if isinstance(p, (Restrict, Bang)):
        return 1 + depth(p.body)
    return 1 + max(depth(p.left), depth(p.right))


@lru_cache(maxsize=None)
def _terms(d: int, names: tuple, with_co: bool, bang: bool) -> tuple:
    """All terms of depth exactly d (use with small d only)."""
    if d == 0:
        return (NIL,)
    shallower: list[Process] = []
    for k in range(d):
        shallower.extend(_terms(k, names, with_co, bang))
    exact = tuple(_terms(d - 1, names, with_co, bang))
    labs = labels_over(names, with_co)
    out_terms: list[Process] = []
    for lab in labs:
        out_terms += [Prefix(lab, p) for p in exact]
    for op in (Par, NdChoice, IntChoice):
        for p in exact:
            for q in shallower:
                out_terms.append(op(p, q))
                if depth(q) != d - 1:
                    out_terms.append(op(q, p))
    # guarded sums: operands are prefixed terms or sums of depth < d
    guarded = [p for p in shallower + list(exact)
               if isinstance(p, (Prefix, Sum)) and depth(p) <= d - 1]
    for p in guarded:
        for q in guarded:
            if max(depth(p), depth(q)) == d - 1:
                out_terms.append(Sum(p, q))
    for p in exact:
        for n in names:
            out_terms.append(Restrict(p, n))
    if bang:
        out_terms += [Bang(p) for p in exact]
    return tuple(out_terms)


def all_terms(max_depth: int, names=("a", "b"), with_co=True,
              bang=False) -> list[Process]:
    out_terms: list[Process] = []
    for d in range(max_depth + 1):
        out_terms.extend(_terms(d, tuple(names), with_co, bang))
    return out_terms


def random_term(rng: random.Random, max_depth: int, names=("a", "b", "c"),
                with_co=True, bang=False) -> Process:
    labs = labels_over(names, with_co)
    if max_depth <= 0:
        return NIL
    ops = ["prefix", "prefix", "par", "nd", "int", "sum", "res", "nil"]
    if bang:
        ops.append("bang")
    op = rng.choice(ops)
    if op == "nil":
        return NIL
    if op == "prefix":
        return Prefix(rng.choice(labs), random_term(rng, max_depth - 1, names,
                                                    with_co, bang))
    if op == "par":
        return Par(random_term(rng, max_depth - 1, names, with_co, bang),
                   random_term(rng, max_depth - 1, names, with_co, bang))
    if op == "nd":
        return NdChoice(random_term(rng, max_depth - 1, names, with_co, bang),
                        random_term(rng, max_depth - 1, names, with_co, bang))
    if op == "int":
        return IntChoice(random_term(rng, max_depth - 1, names, with_co, bang),
                         random_term(rng, max_depth - 1, names, with_co, bang))
    if op == "sum":
        return Sum(Prefix(rng.choice(labs),
                          random_term(rng, max_depth - 2, names, with_co, bang)),
                   Prefix(rng.choice(labs),
                          random_term(rng, max_depth - 2, names, with_co, bang)))
    if op == "res":
        return Restrict(random_term(rng, max_depth - 1, names, with_co, bang),
                        rng.choice(list(names)))
    return Bang(random_term(rng, max_depth - 1, names, with_co, bang))


def corpus(names=("a", "b"), full_depth=2, sample_depth=4, sample=60,
           seed=7, sample_names=("a", "b", "c"), bang=False) -> list[Process]:
    """Deterministic suite corpus: every term up to `full_depth`, plus a
    seeded sample of deeper terms."""
    terms = all_terms(full_depth, names, bang=bang)
    rng = random.Random(seed)
    seen = set(terms)
    while sample > 0:
        t = random_term(rng, sample_depth, sample_names, bang=bang)
        if depth(t) > full_depth and t not in seen:
            seen.add(t)
            terms.append(t)
            sample -= 1
    return terms
