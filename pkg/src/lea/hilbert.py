"""Hilbert-style systems for the essence operator and a derivation checker.

The base system has three axiom schemas on top of propositional logic:

    KwTop   o T
    EquiKw  ~p -> o p
    KwCon   o p & o q -> o (p & q)

with uniform substitution, modus ponens, and the rule

    R       from f -> g infer o f & f -> o g.

Extensions add KwTr (transitive frames), KwB (symmetric frames) and KwEuc
(together with KwB: symmetric-Euclidean frames).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

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
    is_lea,
    parse,
    render,
    substitute,
    variables,
)
from .kripke import FrameClass, Model

Substitution = Mapping[str, Formula]

KW_TOP = Ess(Top())
EQUI_KW = parse("~p -> o p")
KW_CON = parse("o p & o q -> o (p & q)")
KW_TR = parse("o p & p -> o o p")
KW_B = parse("p -> o (o ~p -> p)")
KW_EUC = parse("~o ~p -> o (o ~p -> p)")

# Like KwEuc but with a plain negation as antecedent.  Not an axiom of any
# system here; kept because it is frame-valid on Euclidean frames, which
# the scan machinery can confirm at small sizes.
KW_EUC_ALT = parse("~p -> o (o ~p -> p)")

_BASE = (("KwTop", KW_TOP), ("EquiKw", EQUI_KW), ("KwCon", KW_CON))


class System(Enum):
    K_CIRC = _BASE
    K4_CIRC = _BASE + (("KwTr", KW_TR),)
    KB_CIRC = _BASE + (("KwB", KW_B),)
    KB5_CIRC = _BASE + (("KwB", KW_B), ("KwEuc", KW_EUC))

    @property
    def axioms(self) -> tuple[tuple[str, Formula], ...]:
        return self.value

    def schema(self, name: str) -> Formula:
        for axiom_name, schema in self.value:
            if axiom_name == name:
                return schema
        raise KeyError(f"{self.name} has no axiom {name!r}")


# ---------------------------------------------------------------------------
# Schema matching


def match_schema(schema: Formula, f: Formula) -> Substitution | None:
    """One-sided match: a substitution on the schema's variables giving f.

    Identity bindings are dropped, so a schema matches itself with {}.
    """
    binding: dict[str, Formula] = {}
    if not _match(schema, f, binding):
        return None
    return {v: g for v, g in binding.items() if g != Var(v)}


def _match(schema: Formula, f: Formula, binding: dict[str, Formula]) -> bool:
    if isinstance(schema, Var):
        seen = binding.get(schema.name)
        if seen is None:
            binding[schema.name] = f
            return True
        return seen == f
    if type(schema) is not type(f):
        return False
    if isinstance(schema, (Not, Ess, Box)):
        return _match(schema.sub, f.sub, binding)
    if isinstance(schema, (And, Or, Implies, Iff)):
        return _match(schema.left, f.left, binding) and _match(
            schema.right, f.right, binding
        )
    return True  # Top / Bot


def is_axiom_instance(f: Formula, system: System) -> tuple[str, Substitution] | None:
    """First axiom of the system that f instantiates, with the substitution."""
    for name, schema in system.axioms:
        sigma = match_schema(schema, f)
        if sigma is not None:
            return name, sigma
    return None


# ---------------------------------------------------------------------------
# Tautology checking by boolean abstraction

_TAUT_ATOM_LIMIT = 16


def is_tautology(f: Formula) -> bool:
    """Propositional tautology after abstracting modal subtrees as atoms.

    Maximal o/[] subformulas and variables become atoms (structurally equal
    occurrences share one atom); T and F stay constants.
    """
    atoms: dict[Formula, int] = {}
    _collect_atoms(f, atoms)
    if len(atoms) > _TAUT_ATOM_LIMIT:
        raise ValueError(f"tautology check over {len(atoms)} atoms; refusing")
    return all(_eval_abstract(f, atoms, row) for row in range(1 << len(atoms)))


def _collect_atoms(f: Formula, atoms: dict[Formula, int]) -> None:
    if isinstance(f, (Ess, Box, Var)):
        atoms.setdefault(f, len(atoms))
    elif isinstance(f, Not):
        _collect_atoms(f.sub, atoms)
    elif isinstance(f, (And, Or, Implies, Iff)):
        _collect_atoms(f.left, atoms)
        _collect_atoms(f.right, atoms)


def _eval_abstract(f: Formula, atoms: Mapping[Formula, int], row: int) -> bool:
    if isinstance(f, (Ess, Box, Var)):
        return bool((row >> atoms[f]) & 1)
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Not):
        return not _eval_abstract(f.sub, atoms, row)
    if isinstance(f, And):
        return _eval_abstract(f.left, atoms, row) and _eval_abstract(
            f.right, atoms, row
        )
    if isinstance(f, Or):
        return _eval_abstract(f.left, atoms, row) or _eval_abstract(f.right, atoms, row)
    if isinstance(f, Implies):
        return not _eval_abstract(f.left, atoms, row) or _eval_abstract(
            f.right, atoms, row
        )
    if isinstance(f, Iff):
        return _eval_abstract(f.left, atoms, row) == _eval_abstract(f.right, atoms, row)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Derivations


@dataclass(frozen=True)
class Taut:
    pass


@dataclass(frozen=True)
class Premise:
    pass


@dataclass(frozen=True)
class Axiom:
    name: str
    subst: Substitution | None = None  # None: infer by matching


@dataclass(frozen=True)
class MP:
    antecedent: int  # line holding f
    implication: int  # line holding f -> g


@dataclass(frozen=True)
class Sub:
    source: int
    subst: Substitution


@dataclass(frozen=True)
class R:
    source: int


Justification = Taut | Premise | Axiom | MP | Sub | R


@dataclass(frozen=True)
class Line:
    index: int
    formula: Formula
    just: Justification


@dataclass(frozen=True)
class Derivation:
    lines: tuple[Line, ...]

    @property
    def conclusion(self) -> Formula:
        return self.lines[-1].formula

    def premises(self) -> tuple[Formula, ...]:
        return tuple(l.formula for l in self.lines if isinstance(l.just, Premise))


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    first_error: tuple[int, str] | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_derivation(d: Derivation, system: System) -> CheckReport:
    """Validate every line of d against the rules of the system.

    Reports the first offending line.  Premise lines are accepted as given;
    a derivation without them establishes its conclusion outright.
    """
    if not d.lines:
        return CheckReport(False, (0, "empty derivation"))
    by_index: dict[int, Formula] = {}
    for offset, line in enumerate(d.lines):
        if line.index != offset + 1:
            return CheckReport(
                False, (line.index, f"line numbered {line.index}, expected {offset + 1}")
            )
        reason = _check_line(line, by_index, system)
        if reason is not None:
            return CheckReport(False, (line.index, reason))
        by_index[line.index] = line.formula
    return CheckReport(True)


def _check_line(
    line: Line, earlier: dict[int, Formula], system: System
) -> str | None:
    f = line.formula
    just = line.just
    if not is_lea(f):
        return "formula leaves the essence fragment (contains [])"

    def fetch(i: int) -> Formula | None:
        return earlier.get(i)

    if isinstance(just, Premise):
        return None
    if isinstance(just, Taut):
        try:
            if not is_tautology(f):
                return "not a propositional tautology under boolean abstraction"
        except ValueError as e:
            return str(e)
        return None
    if isinstance(just, Axiom):
        try:
            schema = system.schema(just.name)
        except KeyError:
            return f"{system.name} has no axiom {just.name!r}"
        if just.subst is not None:
            if substitute(schema, just.subst) != f:
                return f"formula is not {just.name} under the given substitution"
            return None
        if match_schema(schema, f) is None:
            return f"formula does not instantiate {just.name}"
        return None
    if isinstance(just, MP):
        antecedent = fetch(just.antecedent)
        implication = fetch(just.implication)
        if antecedent is None or implication is None:
            return "reference to a line that is not strictly earlier"
        if implication != Implies(antecedent, f):
            return (
                f"line {just.implication} is not (line {just.antecedent}) -> (this line)"
            )
        return None
    if isinstance(just, Sub):
        source = fetch(just.source)
        if source is None:
            return "reference to a line that is not strictly earlier"
        if substitute(source, just.subst) != f:
            return f"formula is not line {just.source} under the given substitution"
        return None
    if isinstance(just, R):
        source = fetch(just.source)
        if source is None:
            return "reference to a line that is not strictly earlier"
        if not isinstance(source, Implies):
            return f"line {just.source} is not an implication"
        expected = Implies(And(Ess(source.left), source.left), Ess(source.right))
        if f != expected:
            return f"formula is not the R image of line {just.source}"
        return None
    return f"unknown justification {just!r}"


# ---------------------------------------------------------------------------
# Concrete derivation text:  `3. <formula>   [mp 1 2]`

_LINE_RE = re.compile(r"^\s*(\d+)\.\s*(.*?)\s*\[([^\]]*)\]\s*$")


def render_justification(just: Justification) -> str:
    if isinstance(just, Taut):
        return "taut"
    if isinstance(just, Premise):
        return "premise"
    if isinstance(just, Axiom):
        return f"axiom {just.name}"
    if isinstance(just, MP):
        return f"mp {just.antecedent} {just.implication}"
    if isinstance(just, Sub):
        parts = ", ".join(
            f"{v}:={render(g)}" for v, g in sorted(just.subst.items())
        )
        return f"sub {just.source} {parts}"
    if isinstance(just, R):
        return f"r {just.source}"
    raise TypeError(f"unknown justification {just!r}")


def render_derivation(d: Derivation) -> str:
    return "\n".join(
        f"{l.index}. {render(l.formula)}   [{render_justification(l.just)}]"
        for l in d.lines
    )


class DerivationSyntaxError(ValueError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


def parse_derivation(text: str) -> Derivation:
    """Parse the numbered text format; blank lines are skipped.

    Axiom lines carry no substitution in this format; the checker infers it.
    """
    lines: list[Line] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        m = _LINE_RE.match(raw)
        if m is None:
            raise DerivationSyntaxError(
                lineno, "expected `N. <formula>   [<justification>]`"
            )
        index = int(m.group(1))
        try:
            f = parse(m.group(2))
        except Exception as e:
            raise DerivationSyntaxError(lineno, f"bad formula: {e}") from e
        just = _parse_justification(m.group(3).strip(), lineno)
        lines.append(Line(index, f, just))
    return Derivation(tuple(lines))


def _parse_justification(text: str, lineno: int) -> Justification:
    head, _, rest = text.partition(" ")
    rest = rest.strip()
    if head == "taut" and not rest:
        return Taut()
    if head == "premise" and not rest:
        return Premise()
    if head == "axiom":
        if not rest or " " in rest:
            raise DerivationSyntaxError(lineno, "axiom takes exactly one name")
        return Axiom(rest)
    if head == "mp":
        parts = rest.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise DerivationSyntaxError(lineno, "mp takes two line numbers")
        return MP(int(parts[0]), int(parts[1]))
    if head == "r":
        if not rest.isdigit():
            raise DerivationSyntaxError(lineno, "r takes one line number")
        return R(int(rest))
    if head == "sub":
        num, _, assigns = rest.partition(" ")
        if not num.isdigit():
            raise DerivationSyntaxError(lineno, "sub takes a line number then bindings")
        subst: dict[str, Formula] = {}
        for item in assigns.split(","):
            var, sep, body = item.partition(":=")
            var = var.strip()
            if not sep or not var:
                raise DerivationSyntaxError(lineno, f"bad binding {item.strip()!r}")
            try:
                subst[var] = parse(body.strip())
            except Exception as e:
                raise DerivationSyntaxError(lineno, f"bad binding formula: {e}") from e
        return Sub(int(num), subst)
    raise DerivationSyntaxError(lineno, f"unknown justification {text!r}")


# ---------------------------------------------------------------------------
# Generated derivations


def gen_conj_derivation(n: int) -> Derivation:
    """Derivation of o p1 & ... & o pn -> o (p1 & ... & pn) in the base system.

    Builds up one conjunct at a time: each step is a KwCon instance, a
    propositional chaining tautology, and two modus ponens lines, so the
    length grows linearly with n.
    """
    if n < 2:
        raise ValueError("need at least two conjuncts")
    p = [Var(f"p{i}") for i in range(1, n + 1)]
    lines: list[Line] = []

    def emit(f: Formula, just: Justification) -> int:
        lines.append(Line(len(lines) + 1, f, just))
        return len(lines)

    def conj(parts: list[Formula]) -> Formula:
        out = parts[0]
        for g in parts[1:]:
            out = And(out, g)
        return out

    goal_idx = emit(
        Implies(And(Ess(p[0]), Ess(p[1])), Ess(And(p[0], p[1]))),
        Axiom("KwCon", {"p": p[0], "q": p[1]}),
    )
    for k in range(2, n):
        body = conj(list(p[:k]))
        antecedent = conj([Ess(v) for v in p[:k]])
        grown_body = And(body, p[k])
        grown_antecedent = And(antecedent, Ess(p[k]))
        step = Implies(And(Ess(body), Ess(p[k])), Ess(grown_body))
        step_idx = emit(step, Axiom("KwCon", {"p": body, "q": p[k]}))
        ih = Implies(antecedent, Ess(body))
        goal = Implies(grown_antecedent, Ess(grown_body))
        chain = Implies(ih, Implies(step, goal))
        chain_idx = emit(chain, Taut())
        half_idx = emit(Implies(step, goal), MP(goal_idx, chain_idx))
        goal_idx = emit(goal, MP(step_idx, half_idx))
    return Derivation(tuple(lines))


# ---------------------------------------------------------------------------
# Soundness scanning


@dataclass(frozen=True)
class ScanReport:
    system: System
    frame_class: FrameClass
    max_n: int
    frames_checked: int
    failures: tuple[tuple[Model, str], ...]

    def __bool__(self) -> bool:
        return not self.failures


def soundness_scan(system: System, cls: FrameClass, max_n: int) -> ScanReport:
    """Check every axiom of the system on every class frame up to max_n worlds.

    Returns the (frame, axiom name) pairs where validity fails; soundness of
    the system over the class predicts none.
    """
    progs = [
        (name, sweep.Prog(schema, sorted(variables(schema))))
        for name, schema in system.axioms
    ]
    failures: list[tuple[Model, str]] = []
    checked = 0
    for n in range(1, max_n + 1):
        for succ in sweep.iter_succ_tables(n):
            if not sweep.succ_in_class(n, succ, cls):
                continue
            checked += 1
            for name, prog in progs:
                if not sweep.frame_valid(prog, n, succ):
                    failures.append((sweep.build_model(n, succ, (), 0), name))
    return ScanReport(system, cls, max_n, checked, tuple(failures))
