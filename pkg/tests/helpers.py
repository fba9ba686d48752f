"""Shared generators and independent oracles for the test suite.

The oracles here deliberately avoid the library's bitmask machinery: truth
is recursion over successor sets, frame properties are written as the bare
first-order sentences, and the bisimulation oracle enumerates candidate
relations outright.  Agreement between these and the fast paths is the
point of most tests.
"""

import random

from lea.bisim import BisimRelation, is_circ_bisimulation
from lea.formula import And, Bot, Box, Ess, Formula, Iff, Implies, Not, Or, Top, Var
from lea.hilbert import Derivation, Line
from lea.kripke import FrameProperty, Model, PointedModel


def rand_model(rng: random.Random, max_worlds: int = 4, names=("p", "q")) -> Model:
    n = rng.randint(1, max_worlds)
    worlds = tuple(f"w{i}" for i in range(n))
    density = rng.uniform(0.15, 0.6)
    rel = frozenset(
        (a, b) for a in worlds for b in worlds if rng.random() < density
    )
    val = {
        name: frozenset(w for w in worlds if rng.random() < 0.5) for name in names
    }
    return Model(worlds, rel, val)


def rand_pointed(rng: random.Random, max_worlds: int = 4, names=("p", "q")) -> PointedModel:
    m = rand_model(rng, max_worlds, names)
    return PointedModel(m, rng.choice(m.worlds))


def rand_formula(rng: random.Random, depth: int, names=("p", "q"), lang: str = "lea") -> Formula:
    if depth == 0 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.7:
            return Var(rng.choice(names))
        return Top() if roll < 0.85 else Bot()
    modal = {"lea": (Ess,), "ml": (Box,), "mixed": (Ess, Box)}[lang]
    ops = (Not,) + modal + (And, Or, Implies, Iff)
    op = rng.choice(ops)
    if op in (Not, Ess, Box):
        return op(rand_formula(rng, depth - 1, names, lang))
    return op(
        rand_formula(rng, depth - 1, names, lang),
        rand_formula(rng, depth - 1, names, lang),
    )


# ---------------------------------------------------------------------------
# Truth by plain recursion over successor sets.


def naive_satisfies(m: Model, w: str, f: Formula) -> bool:
    if isinstance(f, Var):
        return w in m.val.get(f.name, frozenset())
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Not):
        return not naive_satisfies(m, w, f.sub)
    if isinstance(f, And):
        return naive_satisfies(m, w, f.left) and naive_satisfies(m, w, f.right)
    if isinstance(f, Or):
        return naive_satisfies(m, w, f.left) or naive_satisfies(m, w, f.right)
    if isinstance(f, Implies):
        return not naive_satisfies(m, w, f.left) or naive_satisfies(m, w, f.right)
    if isinstance(f, Iff):
        return naive_satisfies(m, w, f.left) == naive_satisfies(m, w, f.right)
    succs = [t for (s, t) in m.rel if s == w]
    if isinstance(f, Box):
        return all(naive_satisfies(m, t, f.sub) for t in succs)
    if isinstance(f, Ess):
        if not naive_satisfies(m, w, f.sub):
            return True
        return all(naive_satisfies(m, t, f.sub) for t in succs)
    raise TypeError(f)


# ---------------------------------------------------------------------------
# Frame properties as quantifier loops straight off their first-order forms.


def naive_has_property(m: Model, prop: FrameProperty) -> bool:
    ws = m.worlds
    r = m.rel
    P = FrameProperty
    if prop is P.REFLEXIVE:
        return all((x, x) in r for x in ws)
    if prop is P.SERIAL:
        return all(any((x, y) in r for y in ws) for x in ws)
    if prop is P.SYMMETRIC:
        return all((y, x) in r for (x, y) in r)
    if prop is P.COREFLEXIVE:
        return all(x == y for (x, y) in r)
    if prop is P.TRANSITIVE:
        return all(
            (x, z) in r
            for x in ws for y in ws for z in ws
            if (x, y) in r and (y, z) in r
        )
    if prop is P.EUCLIDEAN:
        return all(
            (y, z) in r
            for x in ws for y in ws for z in ws
            if (x, y) in r and (x, z) in r
        )
    if prop is P.WEAKLY_TRANSITIVE:
        return all(
            (x, z) in r
            for x in ws for y in ws for z in ws
            if (x, y) in r and (y, z) in r and x != z
        )
    if prop is P.WEAKLY_CONNECTED:
        return all(
            (y, z) in r or y == z or (z, y) in r
            for x in ws for y in ws for z in ws
            if (x, y) in r and (x, z) in r
        )
    if prop is P.WEAK_WEAK_EUCLIDEAN:
        return all(
            (y, z) in r
            for x in ws for y in ws for z in ws
            if (x, y) in r and (x, z) in r and x != z and y != z
        )
    if prop is P.STRICT_TRANSITIVE3:
        return all(
            (x, z) in r
            for x in ws for y in ws for z in ws
            if (x, y) in r and (y, z) in r and x != y and y != z and x != z
        )
    if prop is P.STRICT_EUCLIDEAN3:
        return all(
            (y, z) in r
            for x in ws for y in ws for z in ws
            if (x, y) in r and (x, z) in r and x != y and x != z and y != z
        )
    raise ValueError(prop)


# ---------------------------------------------------------------------------
# Bisimulation oracles.  Any relation satisfying the bisimulation conditions
# must pair worlds with equal valuations, so only subsets of that candidate
# pool are enumerated; the pruning is checked by its own test.


def inv_pairs(m: Model) -> list[tuple[str, str]]:
    def sig(w):
        return frozenset(p for p, ws in m.val.items() if w in ws)

    return [
        (a, b) for a in m.worlds for b in m.worlds if sig(a) == sig(b)
    ]


def subset_union_oracle(m: Model) -> frozenset:
    """Union of every pair set accepted by is_circ_bisimulation."""
    pool = inv_pairs(m)
    union = set()
    for mask in range(1, 1 << len(pool)):
        z = frozenset(pool[k] for k in range(len(pool)) if (mask >> k) & 1)
        if z <= union:
            continue
        if is_circ_bisimulation(BisimRelation(m, z)):
            union |= z
    return frozenset(union)


def bitparallel_union_oracle(m: Model) -> frozenset:
    """Same union, with one bit position per candidate subset.

    Subset b contains pool pair k exactly when bit k of b is set; the
    bisimulation conditions become bitwise expressions evaluated for all
    subsets at once.  Quadratic blowups stay affordable because the pool
    has at most |worlds|**2 entries.
    """
    pool = inv_pairs(m)
    k = len(pool)
    total = 1 << k
    ones = (1 << total) - 1
    # member[(a, b)]: bitmap over subsets that contain the pair.
    member = {}
    for i, pair in enumerate(pool):
        block = (1 << (1 << i)) - 1
        period = 1 << (i + 1)
        pattern = 0
        for start in range(1 << i, total, period):
            pattern |= block << start
        member[pair] = pattern
    absent = {pair: ones ^ pattern for pair, pattern in member.items()}

    def contains(pair):
        return member.get(pair, 0)

    def lacks(pair):
        return absent.get(pair, ones)

    succs = {w: [t for (s, t) in m.rel if s == w] for w in m.worlds}
    viol = 0
    for (a, b) in pool:
        here = member[(a, b)]
        for t in succs[a]:
            no_witness = ones
            for t2 in succs[b]:
                no_witness &= lacks((t, t2))
            viol |= here & lacks((a, t)) & no_witness
        for t2 in succs[b]:
            no_witness = ones
            for t in succs[a]:
                no_witness &= lacks((t, t2))
            viol |= here & lacks((b, t2)) & no_witness
    passing = ones & ~viol
    union = set()
    for pair in pool:
        if passing & member[pair]:
            union.add(pair)
    return frozenset(union)


# ---------------------------------------------------------------------------
# Derivation mutations that no checker should accept.


def mutate_derivation(rng: random.Random, d: Derivation) -> Derivation:
    target = rng.randrange(len(d.lines))
    old = d.lines[target].formula
    kind = rng.randrange(4)
    if kind == 0:
        new = Var("za")
    elif kind == 1:
        new = Not(old)
    elif kind == 2:
        new = And(old, Var("za"))
    elif isinstance(old, Implies):
        new = Implies(old.right, old.left)
    else:
        new = Implies(old, Var("za"))
    lines = list(d.lines)
    lines[target] = Line(lines[target].index, new, lines[target].just)
    return Derivation(tuple(lines))
