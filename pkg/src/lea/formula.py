"""Formula ASTs for the language of essence and accident, plus the box language.

The essence operator is written `o` in concrete syntax.  `A` (accident) and
`<>` (diamond) are surface sugar and are desugared at parse time: `A f`
becomes `~o f` and `<> f` becomes `~[] ~f`.  Structural equality on the AST
is therefore equality up to that desugaring.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping


class Formula:
    """Base class for all formula nodes."""

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Ess(Formula):
    """Essence: true at s when truth of the body at s forces it at all successors."""

    sub: Formula


@dataclass(frozen=True)
class Box(Formula):
    sub: Formula


def Acc(f: Formula) -> Formula:
    """Accident, sugar for ~o f."""
    return Not(Ess(f))


def Dia(f: Formula) -> Formula:
    """Diamond, sugar for ~[] ~f."""
    return Not(Box(Not(f)))


def subformulas(f: Formula) -> Iterator[Formula]:
    """Yield every subformula of f, including f itself, parents first."""
    yield f
    if isinstance(f, (Not, Ess, Box)):
        yield from subformulas(f.sub)
    elif isinstance(f, (And, Or, Implies, Iff)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)


def variables(f: Formula) -> frozenset[str]:
    """Set of propositional variable names occurring in f."""
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Var))


def modal_depth(f: Formula) -> int:
    """Maximum nesting depth of o/[] operators."""
    if isinstance(f, (Var, Top, Bot)):
        return 0
    if isinstance(f, Not):
        return modal_depth(f.sub)
    if isinstance(f, (Ess, Box)):
        return 1 + modal_depth(f.sub)
    return max(modal_depth(f.left), modal_depth(f.right))


def is_lea(f: Formula) -> bool:
    """True when f avoids [] entirely (the essence-only fragment)."""
    return not any(isinstance(g, Box) for g in subformulas(f))


def is_ml(f: Formula) -> bool:
    """True when f avoids o entirely (the box-only fragment)."""
    return not any(isinstance(g, Ess) for g in subformulas(f))


# ---------------------------------------------------------------------------
# Parsing


class ParseError(Exception):
    """Syntax error with the byte offset and the tokens that were expected."""

    def __init__(self, offset: int, expected: tuple[str, ...], found: str):
        self.offset = offset
        self.expected = expected
        self.found = found
        super().__init__(
            f"at offset {offset}: expected {' or '.join(expected)}, found {found}"
        )


_UNARY_STARTERS = ("~", "o", "A", "[]", "<>", "T", "F", "identifier", "(")


@dataclass(frozen=True)
class _Token:
    kind: str  # one of: ( ) & | -> <-> ~ o A [] <> T F ident eof
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "()&|~":
            kind = {"(": "(", ")": ")", "&": "&", "|": "|", "~": "~"}[c]
            tokens.append(_Token(kind, c, i))
            i += 1
        elif c == "-":
            if text.startswith("->", i):
                tokens.append(_Token("->", "->", i))
                i += 2
            else:
                raise ParseError(i, ("->",), repr(c))
        elif c == "<":
            if text.startswith("<->", i):
                tokens.append(_Token("<->", "<->", i))
                i += 3
            elif text.startswith("<>", i):
                tokens.append(_Token("<>", "<>", i))
                i += 2
            else:
                raise ParseError(i, ("<->", "<>"), repr(text[i : i + 2]))
        elif c == "[":
            if text.startswith("[]", i):
                tokens.append(_Token("[]", "[]", i))
                i += 2
            else:
                raise ParseError(i, ("[]",), repr(text[i : i + 2]))
        elif c.isalpha():
            j = i
            while j < n and text[j].isalnum():
                j += 1
            word = text[i:j]
            if word == "T":
                tokens.append(_Token("T", word, i))
            elif word == "F":
                tokens.append(_Token("F", word, i))
            elif word == "A":
                tokens.append(_Token("A", word, i))
            elif word == "o":
                tokens.append(_Token("o", word, i))
            elif word[0].islower() and word[0] != "o":
                tokens.append(_Token("ident", word, i))
            else:
                raise ParseError(i, ("identifier",), repr(word))
            i = j
        else:
            raise ParseError(i, _UNARY_STARTERS, repr(c))
    tokens.append(_Token("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def iff(self) -> Formula:
        parts = [self.impl()]
        while self.peek().kind == "<->":
            self.advance()
            parts.append(self.impl())
        f = parts[-1]
        for g in reversed(parts[:-1]):
            f = Iff(g, f)
        return f

    def impl(self) -> Formula:
        left = self.disj()
        if self.peek().kind == "->":
            self.advance()
            return Implies(left, self.impl())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek().kind == "|":
            self.advance()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek().kind == "&":
            self.advance()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "~":
            self.advance()
            return Not(self.unary())
        if tok.kind == "o":
            self.advance()
            return Ess(self.unary())
        if tok.kind == "A":
            self.advance()
            return Not(Ess(self.unary()))
        if tok.kind == "[]":
            self.advance()
            return Box(self.unary())
        if tok.kind == "<>":
            self.advance()
            return Not(Box(Not(self.unary())))
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "T":
            self.advance()
            return Top()
        if tok.kind == "F":
            self.advance()
            return Bot()
        if tok.kind == "ident":
            self.advance()
            return Var(tok.text)
        if tok.kind == "(":
            self.advance()
            f = self.iff()
            closing = self.peek()
            if closing.kind != ")":
                raise ParseError(closing.pos, (")",), closing.text or "end of input")
            self.advance()
            return f
        raise ParseError(tok.pos, _UNARY_STARTERS, tok.text or "end of input")


def parse(text: str) -> Formula:
    """Parse concrete syntax into a formula.

    Raises ParseError (carrying a byte offset and the expected tokens) on
    malformed input.
    """
    parser = _Parser(_tokenize(text))
    f = parser.iff()
    trailing = parser.peek()
    if trailing.kind != "eof":
        raise ParseError(trailing.pos, ("end of input",), trailing.text)
    return f


# ---------------------------------------------------------------------------
# Rendering

# Binding strength; higher binds tighter.  <-> sits below -> (the grammar
# treats them as separate levels), | below &, and the prefix operators
# tightest of all.
_LEVEL_IFF = 1
_LEVEL_IMP = 2
_LEVEL_OR = 3
_LEVEL_AND = 4
_LEVEL_UNARY = 5
_LEVEL_ATOM = 6


def render(f: Formula, sugar: bool = False) -> str:
    """Concrete syntax for f with minimal parentheses.

    With sugar=True the patterns ~o g and ~[] ~g print as `A g` and `<> g`.
    Either way the output parses back to a formula structurally equal to f.
    """
    return _render(f, 0, sugar)


def _render(f: Formula, min_level: int, sugar: bool) -> str:
    text, level = _render_top(f, sugar)
    if level < min_level:
        return "(" + text + ")"
    return text


def _render_top(f: Formula, sugar: bool) -> tuple[str, int]:
    if isinstance(f, Var):
        return f.name, _LEVEL_ATOM
    if isinstance(f, Top):
        return "T", _LEVEL_ATOM
    if isinstance(f, Bot):
        return "F", _LEVEL_ATOM
    if isinstance(f, Not):
        if sugar and isinstance(f.sub, Ess):
            return "A " + _render(f.sub.sub, _LEVEL_UNARY, sugar), _LEVEL_UNARY
        if sugar and isinstance(f.sub, Box) and isinstance(f.sub.sub, Not):
            return "<> " + _render(f.sub.sub.sub, _LEVEL_UNARY, sugar), _LEVEL_UNARY
        return "~" + _render(f.sub, _LEVEL_UNARY, sugar), _LEVEL_UNARY
    if isinstance(f, Ess):
        return "o " + _render(f.sub, _LEVEL_UNARY, sugar), _LEVEL_UNARY
    if isinstance(f, Box):
        return "[] " + _render(f.sub, _LEVEL_UNARY, sugar), _LEVEL_UNARY
    if isinstance(f, And):
        left = _render(f.left, _LEVEL_AND, sugar)
        right = _render(f.right, _LEVEL_AND + 1, sugar)
        return left + " & " + right, _LEVEL_AND
    if isinstance(f, Or):
        left = _render(f.left, _LEVEL_OR, sugar)
        right = _render(f.right, _LEVEL_OR + 1, sugar)
        return left + " | " + right, _LEVEL_OR
    if isinstance(f, Implies):
        left = _render(f.left, _LEVEL_IMP + 1, sugar)
        right = _render(f.right, _LEVEL_IMP, sugar)
        return left + " -> " + right, _LEVEL_IMP
    if isinstance(f, Iff):
        left = _render(f.left, _LEVEL_IFF + 1, sugar)
        right = _render(f.right, _LEVEL_IFF, sugar)
        return left + " <-> " + right, _LEVEL_IFF
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Substitution and translations


def substitute(f: Formula, sub: Mapping[str, Formula]) -> Formula:
    """Simultaneously replace variables by formulas."""
    if isinstance(f, Var):
        return sub.get(f.name, f)
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, Not):
        return Not(substitute(f.sub, sub))
    if isinstance(f, Ess):
        return Ess(substitute(f.sub, sub))
    if isinstance(f, Box):
        return Box(substitute(f.sub, sub))
    cls = type(f)
    return cls(substitute(f.left, sub), substitute(f.right, sub))


def to_ml(f: Formula) -> Formula:
    """Translate an essence formula into the box language.

    o g maps to t(g) -> [] t(g); boolean structure is kept.  The result is
    true at exactly the same points of any model as f.  Rejects input that
    already contains [].
    """
    if isinstance(f, Box):
        raise ValueError(f"not an essence-language formula: contains {render(f)}")
    if isinstance(f, (Var, Top, Bot)):
        return f
    if isinstance(f, Not):
        return Not(to_ml(f.sub))
    if isinstance(f, Ess):
        g = to_ml(f.sub)
        return Implies(g, Box(g))
    cls = type(f)
    return cls(to_ml(f.left), to_ml(f.right))


def to_lea(f: Formula) -> Formula:
    """Translate a box formula into the essence language.

    [] g maps to o t(g) & t(g).  Truth is preserved on reflexive models
    only; on arbitrary models the two sides can diverge.  Rejects input
    that already contains o.
    """
    if isinstance(f, Ess):
        raise ValueError(f"not a box-language formula: contains {render(f)}")
    if isinstance(f, (Var, Top, Bot)):
        return f
    if isinstance(f, Not):
        return Not(to_lea(f.sub))
    if isinstance(f, Box):
        g = to_lea(f.sub)
        return And(Ess(g), g)
    cls = type(f)
    return cls(to_lea(f.left), to_lea(f.right))
