"""Exhaustive frame/valuation sweeps.

The trick used throughout: for a fixed frame with n worlds and k variables,
pack the truth value of a formula at one world across all 2^(n*k) valuations
into a single big integer (bit v = truth under valuation number v).  Boolean
connectives become bitwise operations on those integers, so checking a
formula against every valuation of a frame costs a handful of int ops per
formula node instead of a loop over valuations.

Valuation number v assigns variable j the world set (v >> (n*j)) & (2^n - 1).
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator, Sequence

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
)
from .kripke import FrameClass, Model, _check_property, frame_worlds


@lru_cache(maxsize=None)
def _bit_pattern(total_bits: int, b: int) -> int:
    """Big integer whose v-th bit is (v >> b) & 1, for v < 2^total_bits."""
    block = (1 << (1 << b)) - 1  # 2^b ones
    out = 0
    step = 1 << (b + 1)
    for start in range(1 << b, 1 << total_bits, step):
        out |= block << start
    return out


class Prog:
    """A formula compiled to a postorder op list over shared registers."""

    def __init__(self, f: Formula, names: Sequence[str]):
        self.names = tuple(names)
        self.ops: list[tuple] = []
        self._regs: dict[Formula, int] = {}
        self.root = self._emit(f)

    def _emit(self, f: Formula) -> int:
        if f in self._regs:
            return self._regs[f]
        if isinstance(f, Var):
            op = ("var", self.names.index(f.name)) if f.name in self.names else ("bot",)
        elif isinstance(f, Top):
            op = ("top",)
        elif isinstance(f, Bot):
            op = ("bot",)
        elif isinstance(f, Not):
            op = ("not", self._emit(f.sub))
        elif isinstance(f, Ess):
            op = ("ess", self._emit(f.sub))
        elif isinstance(f, Box):
            op = ("box", self._emit(f.sub))
        elif isinstance(f, And):
            op = ("and", self._emit(f.left), self._emit(f.right))
        elif isinstance(f, Or):
            op = ("or", self._emit(f.left), self._emit(f.right))
        elif isinstance(f, Implies):
            op = ("imp", self._emit(f.left), self._emit(f.right))
        elif isinstance(f, Iff):
            op = ("iff", self._emit(f.left), self._emit(f.right))
        else:
            raise TypeError(f"not a formula: {f!r}")
        reg = len(self.ops)
        self.ops.append(op)
        self._regs[f] = reg
        return reg

    def run(self, n: int, succ: Sequence[int]) -> list[int]:
        """Per-world truth bitmaps of the root over all valuations."""
        k = len(self.names)
        total_bits = n * k
        full = (1 << (1 << total_bits)) - 1
        regs: list[list[int]] = []
        for op in self.ops:
            tag = op[0]
            if tag == "var":
                j = op[1]
                regs.append([_bit_pattern(total_bits, n * j + s) for s in range(n)])
            elif tag == "top":
                regs.append([full] * n)
            elif tag == "bot":
                regs.append([0] * n)
            elif tag == "not":
                a = regs[op[1]]
                regs.append([full ^ a[s] for s in range(n)])
            elif tag == "and":
                a, b = regs[op[1]], regs[op[2]]
                regs.append([a[s] & b[s] for s in range(n)])
            elif tag == "or":
                a, b = regs[op[1]], regs[op[2]]
                regs.append([a[s] | b[s] for s in range(n)])
            elif tag == "imp":
                a, b = regs[op[1]], regs[op[2]]
                regs.append([(full ^ a[s]) | b[s] for s in range(n)])
            elif tag == "iff":
                a, b = regs[op[1]], regs[op[2]]
                regs.append([full ^ (a[s] ^ b[s]) for s in range(n)])
            else:  # ess / box
                a = regs[op[1]]
                out = []
                for s in range(n):
                    boxed = full
                    targets = succ[s]
                    t = 0
                    while targets:
                        if targets & 1:
                            boxed &= a[t]
                        targets >>= 1
                        t += 1
                    if tag == "box":
                        out.append(boxed)
                    else:
                        out.append((full ^ a[s]) | boxed)
                regs.append(out)
        return regs[self.root]


def iter_succ_tables(n: int) -> Iterator[tuple[int, ...]]:
    """Successor bitmask tuples of every frame on n worlds, mask order.

    Frame number m encodes the pair (s, t) at bit s*n + t, matching
    kripke.enumerate_frames.
    """
    width = (1 << n) - 1
    for mask in range(1 << (n * n)):
        yield tuple((mask >> (s * n)) & width for s in range(n))


def succ_in_class(n: int, succ: Sequence[int], cls: FrameClass) -> bool:
    pred = _preds(n, succ)
    return all(_check_property(n, list(succ), pred, p) for p in cls.properties)


def succ_has_property(n: int, succ: Sequence[int], prop) -> bool:
    return _check_property(n, list(succ), _preds(n, succ), prop)


def _preds(n: int, succ: Sequence[int]) -> list[int]:
    pred = [0] * n
    for s in range(n):
        row = succ[s]
        for t in range(n):
            if (row >> t) & 1:
                pred[t] |= 1 << s
    return pred


def frame_valid(prog: Prog, n: int, succ: Sequence[int]) -> bool:
    """True when the compiled formula holds at every world, every valuation."""
    total_bits = n * len(prog.names)
    full = (1 << (1 << total_bits)) - 1
    out = prog.run(n, succ)
    return all(bits == full for bits in out)


def frame_falsifier(prog: Prog, n: int, succ: Sequence[int]) -> tuple[int, int] | None:
    """(valuation number, world) falsifying the formula, or None if valid."""
    total_bits = n * len(prog.names)
    full = (1 << (1 << total_bits)) - 1
    out = prog.run(n, succ)
    best = None
    for s in range(n):
        missing = full ^ out[s]
        if missing:
            v = (missing & -missing).bit_length() - 1
            if best is None or (v, s) < best:
                best = (v, s)
    return best


def frame_satisfier(prog: Prog, n: int, succ: Sequence[int]) -> tuple[int, int] | None:
    """(valuation number, world) satisfying the formula, or None."""
    out = prog.run(n, succ)
    best = None
    for s in range(n):
        if out[s]:
            v = (out[s] & -out[s]).bit_length() - 1
            if best is None or (v, s) < best:
                best = (v, s)
    return best


def build_model(n: int, succ: Sequence[int], names: Sequence[str], v: int) -> Model:
    """Materialize the model picked out by a sweep hit."""
    worlds = frame_worlds(n)
    rel = frozenset(
        (worlds[s], worlds[t]) for s in range(n) for t in range(n) if (succ[s] >> t) & 1
    )
    width = (1 << n) - 1
    val = {}
    for j, name in enumerate(names):
        mask = (v >> (n * j)) & width
        val[name] = frozenset(worlds[i] for i in range(n) if (mask >> i) & 1)
    return Model(worlds, rel, val)


def search_sat(f: Formula, cls: FrameClass, max_n: int) -> tuple[Model, str] | None:
    """Exhaustively look for a pointed model of f on class frames up to max_n.

    Returns (model, world) for the first hit in (size, frame, valuation,
    world) order, or None when no model with at most max_n worlds exists.
    One-way evidence: None never means unsatisfiable.
    """
    names = sorted({g.name for g in _vars(f)})
    prog = Prog(f, names)
    for n in range(1, max_n + 1):
        for succ in iter_succ_tables(n):
            if not succ_in_class(n, succ, cls):
                continue
            hit = frame_satisfier(prog, n, succ)
            if hit is not None:
                v, s = hit
                m = build_model(n, succ, names, v)
                return m, m.worlds[s]
    return None


def _vars(f: Formula):
    from .formula import subformulas

    return (g for g in subformulas(f) if isinstance(g, Var))
