"""First-order formulas in the language of rings: AST, parser, printer.

Grammar (ASCII, whitespace insignificant, comments `# ...` to end of line):

    formula   := disj ('->' formula)?          # a -> b desugars to !a | b
    disj      := conj ('|' conj)*
    conj      := unary ('&' unary)*
    unary     := '!' unary | quant | '(' formula ')' | term '=' term
    quant     := ('E' | 'A') ident '.' formula  # body runs to the end of the
                                                # enclosing parenthesis
    term      := prod (('+' | '-') prod)*       # a - b desugars to a + (-b)
    prod      := factor ('*' factor)*
    factor    := '-' factor | integer | ident | '(' term ')'
    ident     := [a-zA-Z][a-zA-Z0-9_]*

`E`/`A` act as quantifiers only when followed by an identifier and a dot,
so they remain usable as variable names.  The parser renames any variable
bound twice on a root-to-leaf path to a fresh name, so substitution never
has to reason about shadowing.

There are two constant kinds: integer literals (reduced modulo the field
characteristic only at evaluation time) and field elements introduced by
`substitute`, which are tagged with their field and never reinterpreted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

from .errors import DefregError, FormulaSyntaxError
from .field import FieldSpec

# -- AST ---------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class FieldConst:
    """A field element planted by substitution, tagged with its field."""

    value: int
    field: FieldSpec


@dataclass(frozen=True)
class Add:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Mul:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Neg:
    arg: "Term"


Term = Union[Var, Const, FieldConst, Add, Mul, Neg]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Eq, Not, And, Or, Exists, Forall]

# -- lexer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s+|#[^\n]*"  # skipped
    r"|(?P<ident>[a-zA-Z][a-zA-Z0-9_]*)"
    r"|(?P<int>\d+)"
    r"|(?P<op>->|[+\-*=!&|().])"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        if m.lastgroup is not None:
            tokens.append((m.lastgroup, m.group(), m.start()))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, ahead: int = 0):
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str):
        kind, val, pos = self.next()
        if val != value:
            raise FormulaSyntaxError(f"expected {value!r}, found {val or 'end of input'!r}", pos, self.text)

    def error(self, msg: str):
        _, val, pos = self.peek()
        raise FormulaSyntaxError(f"{msg} (found {val or 'end of input'!r})", pos, self.text)

    # formulas

    def formula(self) -> Formula:
        left = self.disj()
        if self.peek()[1] == "->":
            self.next()
            right = self.formula()
            return Or(Not(left), right)
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek()[1] == "|":
            self.next()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek()[1] == "&":
            self.next()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, val, _ = self.peek()
        if val == "!":
            self.next()
            return Not(self.unary())
        if (
            val in ("E", "A")
            and self.peek(1)[0] == "ident"
            and self.peek(2)[1] == "."
        ):
            self.next()
            _, var, _ = self.next()
            self.next()  # '.'
            body = self.formula()
            return Exists(var, body) if val == "E" else Forall(var, body)
        if val == "(":
            # could be a parenthesised formula or a parenthesised term of an
            # equation; try the atomic route first and backtrack
            save = self.i
            try:
                return self.atom()
            except FormulaSyntaxError:
                self.i = save
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        return self.atom()

    def atom(self) -> Formula:
        left = self.term()
        self.expect("=")
        right = self.term()
        return Eq(left, right)

    # terms

    def term(self) -> Term:
        t = self.prod()
        while self.peek()[1] in ("+", "-"):
            _, op, _ = self.next()
            rhs = self.prod()
            t = Add(t, rhs if op == "+" else Neg(rhs))
        return t

    def prod(self) -> Term:
        t = self.factor()
        while self.peek()[1] == "*":
            self.next()
            t = Mul(t, self.factor())
        return t

    def factor(self) -> Term:
        kind, val, pos = self.peek()
        if val == "-":
            self.next()
            return Neg(self.factor())
        if kind == "int":
            self.next()
            return Const(int(val))
        if kind == "ident":
            self.next()
            return Var(val)
        if val == "(":
            self.next()
            t = self.term()
            self.expect(")")
            return t
        self.error("expected a term")


def parse_formula(text: str) -> Formula:
    """Parse `text`, renaming rebound variables so every root-to-leaf path
    binds each name at most once."""
    p = _Parser(text)
    f = p.formula()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise FormulaSyntaxError(f"trailing input {val!r}", pos, p.text)
    used = set(all_variable_names(f))
    return _rename_rebound(f, {}, used)


def _fresh(base: str, used: set[str]) -> str:
    n = 1
    while f"{base}_{n}" in used:
        n += 1
    name = f"{base}_{n}"
    used.add(name)
    return name


def _rename_term(t: Term, ren: Mapping[str, str]) -> Term:
    if isinstance(t, Var):
        return Var(ren.get(t.name, t.name))
    if isinstance(t, (Const, FieldConst)):
        return t
    if isinstance(t, Add):
        return Add(_rename_term(t.left, ren), _rename_term(t.right, ren))
    if isinstance(t, Mul):
        return Mul(_rename_term(t.left, ren), _rename_term(t.right, ren))
    return Neg(_rename_term(t.arg, ren))


def _rename_rebound(f: Formula, ren: dict[str, str], used: set[str]) -> Formula:
    if isinstance(f, Eq):
        return Eq(_rename_term(f.left, ren), _rename_term(f.right, ren))
    if isinstance(f, Not):
        return Not(_rename_rebound(f.arg, ren, used))
    if isinstance(f, And):
        return And(_rename_rebound(f.left, ren, used), _rename_rebound(f.right, ren, used))
    if isinstance(f, Or):
        return Or(_rename_rebound(f.left, ren, used), _rename_rebound(f.right, ren, used))
    # quantifier: rename if this name is already bound on the path
    name = f.var
    inner = dict(ren)
    if name in ren.values() or name in ren:
        fresh = _fresh(name, used)
        inner[name] = fresh
        name = fresh
    else:
        inner[f.var] = f.var
    body = _rename_rebound(f.body, inner, used)
    return Exists(name, body) if isinstance(f, Exists) else Forall(name, body)


# -- structural operations -------------------------------------------------


def _walk_terms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, (Add, Mul)):
        yield from _walk_terms(t.left)
        yield from _walk_terms(t.right)
    elif isinstance(t, Neg):
        yield from _walk_terms(t.arg)


def complexity(f: Formula | Term) -> int:
    """Total AST node count (terms, connectives, quantifiers)."""
    if isinstance(f, (Var, Const, FieldConst)):
        return 1
    if isinstance(f, (Add, Mul, Eq, And, Or)):
        return 1 + complexity(f.left) + complexity(f.right)
    if isinstance(f, (Neg, Not)):
        return 1 + complexity(f.arg)
    if isinstance(f, (Exists, Forall)):
        return 1 + complexity(f.body)
    raise DefregError(f"not an AST node: {f!r}")


@dataclass(frozen=True)
class ComplexityBudget:
    """Cap on formula size; monotone under subformula inclusion."""

    max_complexity: int

    def allows(self, f: Formula) -> bool:
        return complexity(f) <= self.max_complexity

    def check(self, f: Formula) -> None:
        c = complexity(f)
        if c > self.max_complexity:
            raise DefregError(f"formula complexity {c} exceeds budget {self.max_complexity}")


def free_variables(f: Formula) -> tuple[str, ...]:
    """Free variables in first-occurrence order."""
    out: list[str] = []

    def term(t: Term, bound: frozenset[str]):
        for node in _walk_terms(t):
            if isinstance(node, Var) and node.name not in bound and node.name not in out:
                out.append(node.name)

    def go(g: Formula, bound: frozenset[str]):
        if isinstance(g, Eq):
            term(g.left, bound)
            term(g.right, bound)
        elif isinstance(g, Not):
            go(g.arg, bound)
        elif isinstance(g, (And, Or)):
            go(g.left, bound)
            go(g.right, bound)
        else:
            go(g.body, bound | {g.var})

    go(f, frozenset())
    return tuple(out)


def all_variable_names(f: Formula) -> tuple[str, ...]:
    """Every variable name occurring in f, free or bound, in first-occurrence order."""
    out: list[str] = []

    def term(t: Term):
        for node in _walk_terms(t):
            if isinstance(node, Var) and node.name not in out:
                out.append(node.name)

    def go(g: Formula):
        if isinstance(g, Eq):
            term(g.left)
            term(g.right)
        elif isinstance(g, Not):
            go(g.arg)
        elif isinstance(g, (And, Or)):
            go(g.left)
            go(g.right)
        else:
            if g.var not in out:
                out.append(g.var)
            go(g.body)

    go(f)
    return tuple(out)


def quantifier_depth(f: Formula) -> int:
    if isinstance(f, Eq):
        return 0
    if isinstance(f, Not):
        return quantifier_depth(f.arg)
    if isinstance(f, (And, Or)):
        return max(quantifier_depth(f.left), quantifier_depth(f.right))
    return 1 + quantifier_depth(f.body)


def substitute(f: Formula, binding: Mapping[str, int], field: FieldSpec) -> Formula:
    """Replace listed free variables with field-element constants.

    Binding values are element indices of `field`.  Bound occurrences are
    never touched; binding keys must all be free in f.
    """
    free = set(free_variables(f))
    for name, value in binding.items():
        if name not in free:
            raise DefregError(f"variable {name!r} is not free in the formula")
        if not (0 <= value < field.q):
            raise DefregError(f"{value} is not an element of {field}")

    def term(t: Term, bound: frozenset[str]) -> Term:
        if isinstance(t, Var):
            if t.name in binding and t.name not in bound:
                return FieldConst(binding[t.name], field)
            return t
        if isinstance(t, (Const, FieldConst)):
            return t
        if isinstance(t, Add):
            return Add(term(t.left, bound), term(t.right, bound))
        if isinstance(t, Mul):
            return Mul(term(t.left, bound), term(t.right, bound))
        return Neg(term(t.arg, bound))

    def go(g: Formula, bound: frozenset[str]) -> Formula:
        if isinstance(g, Eq):
            return Eq(term(g.left, bound), term(g.right, bound))
        if isinstance(g, Not):
            return Not(go(g.arg, bound))
        if isinstance(g, And):
            return And(go(g.left, bound), go(g.right, bound))
        if isinstance(g, Or):
            return Or(go(g.left, bound), go(g.right, bound))
        b = bound | {g.var}
        body = go(g.body, b)
        return Exists(g.var, body) if isinstance(g, Exists) else Forall(g.var, body)

    return go(f, frozenset())


# -- pretty printer --------------------------------------------------------

_TP_ADD, _TP_MUL, _TP_NEG = 1, 2, 3


def _print_term(t: Term, prec: int) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return str(t.value) if t.value >= 0 else f"(0 - {-t.value})"
    if isinstance(t, FieldConst):
        # parseable for prime fields, debug-only for extensions
        return str(t.value) if t.field.k == 1 else f"[[{t.field.descriptor()}:{t.value}]]"
    if isinstance(t, Add):
        if isinstance(t.right, Neg):
            s = f"{_print_term(t.left, _TP_ADD)} - {_print_term(t.right.arg, _TP_ADD + 1)}"
        else:
            s = f"{_print_term(t.left, _TP_ADD)} + {_print_term(t.right, _TP_ADD + 1)}"
        return f"({s})" if prec > _TP_ADD else s
    if isinstance(t, Mul):
        s = f"{_print_term(t.left, _TP_MUL)} * {_print_term(t.right, _TP_MUL + 1)}"
        return f"({s})" if prec > _TP_MUL else s
    s = f"-{_print_term(t.arg, _TP_NEG)}"
    return f"({s})" if prec > _TP_NEG else s


_FP_OR, _FP_AND, _FP_NOT = 1, 2, 3


def _print_formula(f: Formula, prec: int, rightmost: bool) -> str:
    if isinstance(f, Eq):
        return f"{_print_term(f.left, 0)} = {_print_term(f.right, 0)}"
    if isinstance(f, (Exists, Forall)):
        q = "E" if isinstance(f, Exists) else "A"
        s = f"{q} {f.var}. {_print_formula(f.body, 0, True)}"
        # a quantifier body runs to the end of its group, so parenthesise
        # unless nothing follows
        return s if rightmost else f"({s})"
    if isinstance(f, Not):
        return f"!{_print_formula(f.arg, _FP_NOT, False)}"
    if isinstance(f, And):
        s = f"{_print_formula(f.left, _FP_AND, False)} & {_print_formula(f.right, _FP_AND, rightmost)}"
        return f"({s})" if prec > _FP_AND else s
    s = f"{_print_formula(f.left, _FP_OR, False)} | {_print_formula(f.right, _FP_OR, rightmost)}"
    return f"({s})" if prec > _FP_OR else s


def print_formula(f: Formula) -> str:
    """Render f in the concrete grammar; parse(print(f)) is structurally
    equal to f up to bound-variable renaming."""
    return _print_formula(f, 0, True)


def normalize_bound(f: Formula) -> Formula:
    """Canonical bound-variable names (traversal order), for alpha-equality."""
    counter = [0]

    def term(t: Term, ren: Mapping[str, str]) -> Term:
        return _rename_term(t, ren)

    def go(g: Formula, ren: dict[str, str]) -> Formula:
        if isinstance(g, Eq):
            return Eq(term(g.left, ren), term(g.right, ren))
        if isinstance(g, Not):
            return Not(go(g.arg, ren))
        if isinstance(g, And):
            return And(go(g.left, ren), go(g.right, ren))
        if isinstance(g, Or):
            return Or(go(g.left, ren), go(g.right, ren))
        counter[0] += 1
        fresh = f"_b{counter[0]}"
        inner = dict(ren)
        inner[g.var] = fresh
        body = go(g.body, inner)
        return Exists(fresh, body) if isinstance(g, Exists) else Forall(fresh, body)

    return go(f, {})


def alpha_equal(f: Formula, g: Formula) -> bool:
    return normalize_bound(f) == normalize_bound(g)
