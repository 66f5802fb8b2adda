"""Propositional formulas: syntax tree, parser, evaluation, canonicalization.

Formulas are built from named propositions with negation (`!`), conjunction
(`&`), disjunction (`|`), parentheses, and the literals `true` / `false`.
Two formulas are treated as interchangeable when they are logically
equivalent; `canonical_key` computes a semantic fingerprint (the set of
propositions the formula actually depends on plus its truth table) so that
equivalent formulas can share identity wherever that matters.

Grammar::

    formula := or
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '!' unary | '(' formula ')' | 'true' | 'false' | IDENT

Operator precedence is `!` > `&` > `|`.  Identifiers are the usual
letters/digits/underscore, not starting with a digit.  The words
`given`, `true`, `false`, `U` and `D` are reserved and cannot name
propositions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, MutableMapping, MutableSet, Union

from .errors import ParseError, LcnError

RESERVED_WORDS = frozenset({"given", "true", "false", "U", "D"})

#: Largest joint support for truth-table operations.
MAX_TABLE_PROPS = 20

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


class Formula:
    """Base class of all formula nodes.  Instances are immutable."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_formula(self)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({format_formula(self)!r})"


@dataclass(frozen=True, repr=False)
class Prop(Formula):
    """A proposition leaf."""

    name: str


@dataclass(frozen=True, repr=False)
class Not(Formula):
    child: Formula


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Top(Formula):
    """The tautology literal (`true`)."""


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    """The contradiction literal (`false`)."""


TOP = Top()
BOTTOM = Bottom()


def validate_prop_name(name: str) -> str:
    """Check that `name` is a legal proposition identifier and return it."""
    if not IDENT_RE.match(name):
        raise ParseError(f"invalid proposition name {name!r}")
    if name in RESERVED_WORDS:
        raise ParseError(f"{name!r} is a reserved word and cannot name a proposition")
    return name


# ---------------------------------------------------------------------------
# Tokenizer (shared with the model-file parser)

@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "num" | "op" | "end"
    text: str
    column: int  # 1-based position in the source text


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op><=|>=|=|\(|\)|\[|\]|!|&|\||,|:)
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    """Split `text` into tokens, raising ParseError on foreign characters."""
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", column=pos + 1)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    tokens.append(Token("end", "", len(text) + 1))
    return tokens


class TokenStream:
    """Cursor over a token list with small convenience accessors."""

    def __init__(self, tokens: list[Token]):
        self._tokens = tokens
        self._i = 0

    @property
    def current(self) -> Token:
        return self._tokens[self._i]

    def advance(self) -> Token:
        tok = self._tokens[self._i]
        if tok.kind != "end":
            self._i += 1
        return tok

    def expect_op(self, text: str) -> Token:
        tok = self.current
        if tok.kind != "op" or tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}" if tok.kind != "end"
                             else f"expected {text!r}, found end of input",
                             column=tok.column)
        return self.advance()

    def at_op(self, text: str) -> bool:
        return self.current.kind == "op" and self.current.text == text

    def at_keyword(self, word: str) -> bool:
        return self.current.kind == "ident" and self.current.text == word


Scope = Union[MutableSet[str], MutableMapping[str, None], None]


def _declare(scope: Scope, name: str) -> None:
    if scope is None:
        return
    if isinstance(scope, MutableMapping) or isinstance(scope, dict):
        scope.setdefault(name)  # type: ignore[union-attr]
    else:
        scope.add(name)


def _in_scope(scope: Scope, name: str) -> bool:
    if scope is None:
        return True
    return name in scope


def parse_formula(text: str, scope: Scope = None, *, declare: bool = True) -> Formula:
    """Parse `text` into a Formula.

    `scope` is an optional collection of known proposition names (a set, or
    a dict used as an ordered set).  Identifiers missing from the scope are
    added to it when `declare` is true and rejected otherwise.  With no
    scope every identifier is accepted.
    """
    if not text.strip():
        raise ParseError("empty formula")
    stream = TokenStream(tokenize(text))
    formula = _parse_or(stream, scope, declare)
    tok = stream.current
    if tok.kind != "end":
        raise ParseError(f"unexpected trailing input {tok.text!r}", column=tok.column)
    return formula


def _parse_or(stream: TokenStream, scope: Scope, declare: bool) -> Formula:
    node = _parse_and(stream, scope, declare)
    while stream.at_op("|"):
        stream.advance()
        node = Or(node, _parse_and(stream, scope, declare))
    return node


def _parse_and(stream: TokenStream, scope: Scope, declare: bool) -> Formula:
    node = _parse_unary(stream, scope, declare)
    while stream.at_op("&"):
        stream.advance()
        node = And(node, _parse_unary(stream, scope, declare))
    return node


def _parse_unary(stream: TokenStream, scope: Scope, declare: bool) -> Formula:
    tok = stream.current
    if tok.kind == "op" and tok.text == "!":
        stream.advance()
        return Not(_parse_unary(stream, scope, declare))
    if tok.kind == "op" and tok.text == "(":
        stream.advance()
        node = _parse_or(stream, scope, declare)
        stream.expect_op(")")
        return node
    if tok.kind == "ident":
        if tok.text == "true":
            stream.advance()
            return TOP
        if tok.text == "false":
            stream.advance()
            return BOTTOM
        if tok.text in RESERVED_WORDS:
            raise ParseError(f"{tok.text!r} is a reserved word and cannot name a proposition",
                             column=tok.column)
        stream.advance()
        if declare:
            _declare(scope, tok.text)
        elif not _in_scope(scope, tok.text):
            raise ParseError(f"undeclared proposition {tok.text!r}", column=tok.column)
        return Prop(tok.text)
    if tok.kind == "end":
        raise ParseError("unexpected end of formula", column=tok.column)
    raise ParseError(f"unexpected token {tok.text!r}", column=tok.column)


# ---------------------------------------------------------------------------
# Printing

def format_formula(f: Formula) -> str:
    """Render `f` with minimal parentheses.

    Chains of the same connective are printed flat, so re-parsing the output
    of a parsed formula reproduces the same (left-associated) tree.
    """
    return _format(f, 0)


# precedence levels: 0 = or, 1 = and, 2 = unary
def _format(f: Formula, level: int) -> str:
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Not):
        return "!" + _format(f.child, 2)
    if isinstance(f, And):
        text = f"{_format(f.left, 1)} & {_format(f.right, 1)}"
        return f"({text})" if level > 1 else text
    if isinstance(f, Or):
        text = f"{_format(f.left, 0)} | {_format(f.right, 0)}"
        return f"({text})" if level > 0 else text
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Semantics

def eval_formula(f: Formula, assignment: Mapping[str, int]) -> bool:
    """Evaluate `f` under a total truth assignment.

    Values may be bools or 0/1 integers.  A proposition missing from the
    assignment raises LcnError.
    """
    if isinstance(f, Prop):
        try:
            return bool(assignment[f.name])
        except KeyError:
            raise LcnError(f"assignment is missing proposition {f.name!r}") from None
    if isinstance(f, Not):
        return not eval_formula(f.child, assignment)
    if isinstance(f, And):
        return eval_formula(f.left, assignment) and eval_formula(f.right, assignment)
    if isinstance(f, Or):
        return eval_formula(f.left, assignment) or eval_formula(f.right, assignment)
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    raise TypeError(f"not a formula: {f!r}")


def support(f: Formula) -> frozenset[str]:
    """The set of proposition names occurring syntactically in `f`."""
    out: set[str] = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Prop):
            out.add(node.name)
        elif isinstance(node, Not):
            stack.append(node.child)
        elif isinstance(node, (And, Or)):
            stack.append(node.left)
            stack.append(node.right)
    return frozenset(out)


def _assignments(props: tuple[str, ...]) -> Iterator[dict[str, int]]:
    """All assignments over `props` in lexicographic order of value tuples
    (the first proposition is the most significant position)."""
    k = len(props)
    for i in range(1 << k):
        yield {p: (i >> (k - 1 - j)) & 1 for j, p in enumerate(props)}


def _truth_mask(f: Formula, props: tuple[str, ...]) -> int:
    """Bitmask of `f`'s truth table over `props`; bit i corresponds to the
    i-th assignment in lexicographic order."""
    mask = 0
    for i, a in enumerate(_assignments(props)):
        if eval_formula(f, a):
            mask |= 1 << i
    return mask


def semantically_equal(f: Formula, g: Formula) -> bool:
    """True iff `f` and `g` agree on every assignment of their joint support.

    Raises LcnError when the joint support exceeds the truth-table cap.
    """
    props = tuple(sorted(support(f) | support(g)))
    if len(props) > MAX_TABLE_PROPS:
        raise LcnError(f"joint support of {len(props)} propositions exceeds "
                       f"the {MAX_TABLE_PROPS}-proposition truth-table cap")
    return _truth_mask(f, props) == _truth_mask(g, props)


CanonicalKey = tuple[tuple[str, ...], int]


def canonical_key(f: Formula) -> CanonicalKey:
    """Semantic fingerprint of `f`: `(deps, mask)`.

    `deps` is the sorted tuple of propositions `f` semantically depends on
    (syntactic support minus propositions whose value never matters) and
    `mask` is the truth-table bitmask over `deps` in lexicographic
    assignment order.  Two formulas are logically equivalent exactly when
    their keys are equal.
    """
    props = tuple(sorted(support(f)))
    if len(props) > MAX_TABLE_PROPS:
        raise LcnError(f"support of {len(props)} propositions exceeds "
                       f"the {MAX_TABLE_PROPS}-proposition truth-table cap")
    k = len(props)
    table = [eval_formula(f, a) for a in _assignments(props)]

    # A proposition is irrelevant when flipping it never changes the value.
    deps: list[int] = []
    for j in range(k):
        flip = 1 << (k - 1 - j)  # distance between assignment indices differing in prop j
        # Assignment index i has prop j set iff bit (k-1-j) of i is set;
        # pair each i having the bit clear with i | flip.
        relevant = any(
            table[i] != table[i | flip]
            for i in range(1 << k)
            if not (i & flip)
        )
        if relevant:
            deps.append(j)

    dep_props = tuple(props[j] for j in deps)
    m = len(dep_props)
    mask = 0
    base = {p: 0 for p in props}
    for i in range(1 << m):
        a = dict(base)
        for jj, p in enumerate(dep_props):
            a[p] = (i >> (m - 1 - jj)) & 1
        if eval_formula(f, a):
            mask |= 1 << i
    return (dep_props, mask)


PROP_IDENTITY_MASK = 0b10  # key mask of a formula equivalent to a bare proposition


def key_as_single_prop(key: CanonicalKey) -> str | None:
    """If `key` is the fingerprint of a bare proposition, return its name."""
    deps, mask = key
    if len(deps) == 1 and mask == PROP_IDENTITY_MASK:
        return deps[0]
    return None


TOP_KEY: CanonicalKey = ((), 1)
BOTTOM_KEY: CanonicalKey = ((), 0)
