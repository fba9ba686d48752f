"""Truth at worlds, frame validity, definability checks, bounded equivalence.

Both modal operators are interpreted here: [] f holds at s when f holds at
every successor, and o f holds at s when f-at-s forces f at every successor
(worlds where f fails satisfy o f vacuously).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import sweep
from .formula import (
    And,
    Bot,
    Box,
    Ess,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Top,
    Var,
    variables,
)
from .kripke import (
    FrameProperty,
    Model,
    PointedModel,
    disjoint_union,
    index_of,
)


def _extension_bits(m: Model, f: Formula, memo: dict[Formula, int]) -> int:
    if f in memo:
        return memo[f]
    idx = index_of(m)
    full = idx.all_mask
    if isinstance(f, Var):
        bits = idx.val_bits.get(f.name, 0)
    elif isinstance(f, Top):
        bits = full
    elif isinstance(f, Bot):
        bits = 0
    elif isinstance(f, Not):
        bits = full ^ _extension_bits(m, f.sub, memo)
    elif isinstance(f, And):
        bits = _extension_bits(m, f.left, memo) & _extension_bits(m, f.right, memo)
    elif isinstance(f, Or):
        bits = _extension_bits(m, f.left, memo) | _extension_bits(m, f.right, memo)
    elif isinstance(f, Implies):
        bits = (full ^ _extension_bits(m, f.left, memo)) | _extension_bits(
            m, f.right, memo
        )
    elif isinstance(f, Iff):
        bits = full ^ (
            _extension_bits(m, f.left, memo) ^ _extension_bits(m, f.right, memo)
        )
    elif isinstance(f, (Ess, Box)):
        sub = _extension_bits(m, f.sub, memo)
        bits = 0
        for s in range(idx.n):
            boxed = idx.succ[s] & ~sub == 0
            if isinstance(f, Box):
                hold = boxed
            else:
                hold = boxed or not (sub >> s) & 1
            if hold:
                bits |= 1 << s
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = bits
    return bits


def extension(m: Model, f: Formula) -> frozenset[str]:
    """The set of worlds of m where f holds."""
    bits = _extension_bits(m, f, {})
    return frozenset(w for i, w in enumerate(m.worlds) if (bits >> i) & 1)


def satisfies(m: Model, w: str, f: Formula) -> bool:
    """Truth of f at world w of m."""
    idx = index_of(m)
    if w not in idx.pos:
        raise ValueError(f"unknown world {w!r}")
    return bool(_extension_bits(m, f, {}) >> idx.pos[w] & 1)


def valid_on_frame(m: Model, f: Formula) -> bool:
    """Truth of f at every world under every valuation of f's variables.

    Only m's worlds and relation matter; its own valuation is ignored.
    """
    idx = index_of(m)
    prog = sweep.Prog(f, sorted(variables(f)))
    return sweep.frame_valid(prog, idx.n, idx.succ)


# ---------------------------------------------------------------------------
# Frame definability


@dataclass(frozen=True)
class DefinabilityVerdict:
    property: FrameProperty
    formula: Formula
    max_n: int
    confirmed: bool
    witness: Model | None = None
    # "property-but-invalid": witness frame has the property, formula fails.
    # "valid-but-no-property": formula valid on the witness frame anyway.
    direction: str | None = None

    def __bool__(self) -> bool:
        return self.confirmed


def check_definability(
    prop: FrameProperty, f: Formula, max_n: int
) -> DefinabilityVerdict:
    """Compare {frames with prop} against {frames validating f}, exhaustively.

    Every frame on up to max_n worlds is checked on both sides; the first
    disagreement (smallest size, then frame enumeration order) is reported
    as a witness.  Confirmation is only as strong as max_n.
    """
    prog = sweep.Prog(f, sorted(variables(f)))
    for n in range(1, max_n + 1):
        for succ in sweep.iter_succ_tables(n):
            holds = sweep.succ_has_property(n, succ, prop)
            valid = sweep.frame_valid(prog, n, succ)
            if holds == valid:
                continue
            witness = sweep.build_model(n, succ, (), 0)
            direction = "property-but-invalid" if holds else "valid-but-no-property"
            return DefinabilityVerdict(prop, f, max_n, False, witness, direction)
    return DefinabilityVerdict(prop, f, max_n, True)


# ---------------------------------------------------------------------------
# Layered formula enumeration and bounded equivalence


def _ess_bits(n: int, succ: Sequence[int], full: int, sub: int) -> int:
    bits = 0
    for s in range(n):
        if succ[s] & ~sub == 0 or not (sub >> s) & 1:
            bits |= 1 << s
    return bits


def _box_bits(n: int, succ: Sequence[int], full: int, sub: int) -> int:
    bits = 0
    for s in range(n):
        if succ[s] & ~sub == 0:
            bits |= 1 << s
    return bits


def _boolean_close(reps: dict[int, Formula], full: int) -> None:
    """Grow reps to the closure of its bitmaps under complement and meet."""
    while True:
        grew = False
        for bm, f in list(reps.items()):
            nb = full ^ bm
            if nb not in reps:
                reps[nb] = Not(f)
                grew = True
        items = list(reps.items())
        for i, (b1, f1) in enumerate(items):
            for b2, f2 in items[i + 1 :]:
                meet = b1 & b2
                if meet not in reps:
                    reps[meet] = And(f1, f2)
                    grew = True
        if not grew:
            return


_MODAL_OPS = {"ess": (_ess_bits, Ess), "box": (_box_bits, Box)}


def _layered_reps(
    n: int,
    succ: Sequence[int],
    var_bits: list[tuple[str, int]],
    depth: int,
    modal: str = "ess",
) -> dict[int, Formula]:
    """Representatives of every formula over the given variables up to the
    given modal depth, deduplicated by extension bitmap on this model."""
    step, wrap = _MODAL_OPS[modal]
    full = (1 << n) - 1
    reps: dict[int, Formula] = {full: Top()}
    for name, bits in var_bits:
        reps.setdefault(bits, Var(name))
    _boolean_close(reps, full)
    for _ in range(depth):
        for bm, f in list(reps.items()):
            eb = step(n, succ, full, bm)
            if eb not in reps:
                reps[eb] = wrap(f)
        _boolean_close(reps, full)
    return reps


def layered_formulas(
    m: Model, names: Sequence[str], depth: int, modal: str = "ess"
) -> list[Formula]:
    """One formula per distinct extension on m, up to the given modal depth.

    Every formula over names with modal depth <= depth in the chosen
    language ("ess" or "box") has the same extension on m as exactly one
    formula in the result.
    """
    idx = index_of(m)
    var_bits = [(name, idx.val_bits.get(name, 0)) for name in names]
    reps = _layered_reps(idx.n, idx.succ, var_bits, depth, modal)
    return list(reps.values())


def bounded_equivalent(
    a: PointedModel, b: PointedModel, names: Sequence[str], depth: int
) -> bool | Formula:
    """Do a and b agree on every essence formula over names up to depth?

    Returns True on agreement, otherwise a distinguishing formula that is
    true at a's point and false at b's.
    """
    union = disjoint_union(a.model, b.model)
    idx = index_of(union)
    pa = idx.pos["L:" + a.point]
    pb = idx.pos["R:" + b.point]
    var_bits = [(name, idx.val_bits.get(name, 0)) for name in names]
    reps = _layered_reps(idx.n, idx.succ, var_bits, depth)
    for bm, f in reps.items():
        at_a = (bm >> pa) & 1
        at_b = (bm >> pb) & 1
        if at_a != at_b:
            return f if at_a else Not(f)
    return True
