import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defreg import formula as fm
from defreg.errors import DefregError, FormulaSyntaxError
from defreg.field import make_field

F7 = make_field(7)


def test_parse_exists_square():
    f = fm.parse_formula("E y. y*y = x")
    assert f == fm.Exists("y", fm.Eq(fm.Mul(fm.Var("y"), fm.Var("y")), fm.Var("x")))


def test_parse_atomic():
    assert fm.parse_formula("x = x") == fm.Eq(fm.Var("x"), fm.Var("x"))


def test_parse_paley_edge():
    f = fm.parse_formula("E z. (z*z = x - y & !(x = y))")
    assert isinstance(f, fm.Exists)
    assert isinstance(f.body, fm.And)
    assert fm.free_variables(f) == ("x", "y")
    # subtraction desugars to addition with negation
    assert f.body.left == fm.Eq(
        fm.Mul(fm.Var("z"), fm.Var("z")), fm.Add(fm.Var("x"), fm.Neg(fm.Var("y")))
    )


def test_implication_desugars():
    f = fm.parse_formula("x = 0 -> x = 1")
    assert f == fm.Or(fm.Not(fm.Eq(fm.Var("x"), fm.Const(0))),
                      fm.Eq(fm.Var("x"), fm.Const(1)))


def test_comments_and_whitespace():
    f = fm.parse_formula("x = 1  # a comment\n | x = 2")
    assert isinstance(f, fm.Or)


def test_quantifier_binds_to_end_of_group():
    f = fm.parse_formula("E y. y = x & y = y")
    assert isinstance(f, fm.Exists)
    assert isinstance(f.body, fm.And)
    g = fm.parse_formula("(E y. y = x) & x = x")
    assert isinstance(g, fm.And)
    assert isinstance(g.left, fm.Exists)


def test_E_and_A_usable_as_variables():
    f = fm.parse_formula("E = A")
    assert f == fm.Eq(fm.Var("E"), fm.Var("A"))


def test_syntax_error_positions():
    with pytest.raises(FormulaSyntaxError) as exc:
        fm.parse_formula("x = ")
    assert "column" in str(exc.value)
    with pytest.raises(FormulaSyntaxError):
        fm.parse_formula("x == y")
    with pytest.raises(FormulaSyntaxError):
        fm.parse_formula("E y y = x")


def test_shadowed_binder_renamed():
    f = fm.parse_formula("E y. (y = x & E y. y = 2)")
    inner = f.body.right
    assert isinstance(inner, fm.Exists)
    assert inner.var != "y"
    assert inner.var not in fm.free_variables(f)


def test_complexity_examples():
    assert fm.complexity(fm.parse_formula("x = x")) == 3
    assert fm.complexity(fm.parse_formula("E y. y*y = x")) == 6


def test_complexity_recurrence():
    a = fm.parse_formula("x = 1")
    b = fm.parse_formula("x = 2 | x = 3")
    assert fm.complexity(fm.And(a, b)) == 1 + fm.complexity(a) + fm.complexity(b)


def test_complexity_budget():
    budget = fm.ComplexityBudget(5)
    assert budget.allows(fm.parse_formula("x = x"))
    with pytest.raises(DefregError):
        budget.check(fm.parse_formula("E y. y*y = x"))


def test_free_variables_order_and_binding():
    assert fm.free_variables(fm.parse_formula("E y. y*y = x")) == ("x",)
    assert fm.free_variables(fm.parse_formula("x = x")) == ("x",)
    assert fm.free_variables(fm.parse_formula("y + x = y*y")) == ("y", "x")


def test_substitute_basic():
    f = fm.parse_formula("E z. z*z = x - y")
    g = fm.substitute(f, {"y": 3}, F7)
    assert fm.free_variables(g) == ("x",)
    assert g.body.right.right == fm.Neg(fm.FieldConst(3, F7))


def test_substitute_identity_and_closure():
    f = fm.parse_formula("x = y")
    assert fm.substitute(f, {}, F7) == f
    g = fm.substitute(f, {"x": 2, "y": 2}, make_field(5))
    assert fm.free_variables(g) == ()


def test_substitute_errors():
    f = fm.parse_formula("x = x")
    with pytest.raises(DefregError):
        fm.substitute(f, {"z": 1}, F7)
    with pytest.raises(DefregError):
        fm.substitute(f, {"x": 9}, F7)


def test_substitute_leaves_bound_occurrences():
    f = fm.parse_formula("(E x. x = 0) | x = 1")
    g = fm.substitute(f, {"x": 4}, F7)
    assert g.left == f.left  # bound x untouched
    assert g.right == fm.Eq(fm.FieldConst(4, F7), fm.Const(1))


# -- generated ASTs ------------------------------------------------------------

_names = st.sampled_from(["x", "y", "z", "u", "v"])

_terms = st.deferred(
    lambda: st.one_of(
        _names.map(fm.Var),
        st.integers(0, 30).map(fm.Const),
        st.tuples(_terms, _terms).map(lambda ab: fm.Add(*ab)),
        st.tuples(_terms, _terms).map(lambda ab: fm.Mul(*ab)),
        _terms.map(fm.Neg),
    )
)

_formulas = st.deferred(
    lambda: st.one_of(
        st.tuples(_terms, _terms).map(lambda ab: fm.Eq(*ab)),
        _formulas.map(fm.Not),
        st.tuples(_formulas, _formulas).map(lambda ab: fm.And(*ab)),
        st.tuples(_formulas, _formulas).map(lambda ab: fm.Or(*ab)),
        st.tuples(_names, _formulas).map(lambda vb: fm.Exists(*vb)),
        st.tuples(_names, _formulas).map(lambda vb: fm.Forall(*vb)),
    )
)


@given(_formulas)
@settings(max_examples=200)
def test_print_parse_roundtrip(f):
    assert fm.alpha_equal(fm.parse_formula(fm.print_formula(f)), f)


@given(_formulas)
def test_complexity_invariant_under_renaming(f):
    assert fm.complexity(fm.normalize_bound(f)) == fm.complexity(f)


@given(_formulas, _formulas, st.integers(0, 6))
def test_substitute_commutes_with_conjunction(a, b, elt):
    both = fm.And(a, b)
    sigma = {v: elt for v in fm.free_variables(both)}
    lhs = fm.substitute(both, sigma, F7)
    rhs = fm.And(
        fm.substitute(a, {v: elt for v in fm.free_variables(a)}, F7),
        fm.substitute(b, {v: elt for v in fm.free_variables(b)}, F7),
    )
    assert lhs == rhs
