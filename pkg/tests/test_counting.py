import random

import pytest

from defreg import formula as fm
from defreg.counting import (
    count_pair_intersection,
    count_solutions,
    count_sweep,
    definable_mask,
    definable_set,
    evaluate,
    incidence_matrix,
)
from defreg.errors import BudgetError, DefregError
from defreg.field import make_field

import oracle

F5 = make_field(5)
F7 = make_field(7)
F11 = make_field(11)
F13 = make_field(13)


def test_evaluate_examples():
    assert evaluate(fm.parse_formula("3*3 = 2"), F7) is True
    assert evaluate(fm.parse_formula("E y. y*y = 3"), F5) is False
    for F in (F5, F7, F13):
        assert evaluate(fm.parse_formula("A x. x = x"), F) is True


def test_evaluate_requires_closed():
    with pytest.raises(DefregError):
        evaluate(fm.parse_formula("x = 1"), F7)


def test_count_examples():
    S = definable_set("E y. y*y = x", ["x"])
    assert count_solutions(S, F7).count == 4  # squares mod 7: {0, 1, 2, 4}
    graph = definable_set("y = x*x", ["x", "y"])
    assert count_solutions(graph, F5).count == 5
    line = definable_set("x = x", ["x"])
    for F in (F5, F7, F11):
        assert count_solutions(line, F).count == F.q


def test_count_extension_field():
    F9 = make_field(3, 2)
    S = definable_set("E y. y*y = x", ["x"])
    assert count_solutions(S, F9).count == (9 + 1) // 2


def test_pair_intersection_paley():
    E = definable_set("E z. (z*z = x - y & !(x = y))", ["x"], ["y"])
    qr13 = {(t * t) % 13 for t in range(1, 13)}
    adjacent = next(b for b in range(1, 13) if b in qr13)
    nonadjacent = next(b for b in range(1, 13) if b not in qr13)
    assert count_pair_intersection(E, F13, {"y": 0}, {"y": adjacent}).count == (13 - 5) // 4
    assert count_pair_intersection(E, F13, {"y": 0}, {"y": nonadjacent}).count == (13 - 1) // 4
    # a = b gives the degree of a
    assert count_pair_intersection(E, F13, {"y": 0}, {"y": 0}).count == (13 - 1) // 2


def test_pair_intersection_square_class():
    E = definable_set("E z. (z*z = x*y & !(x*y = 0))", ["x"], ["y"])
    squares = {(t * t) % 11 for t in range(1, 11)}
    nonsquare = next(b for b in range(1, 11) if b not in squares)
    assert count_pair_intersection(E, F11, {"y": 1}, {"y": nonsquare}).count == 0
    assert count_pair_intersection(E, F11, {"y": 1}, {"y": 1}).count == (11 - 1) // 2


def test_pair_intersection_symmetry():
    E = definable_set("E z. (z*z = x - y & !(x = y))", ["x"], ["y"])
    for a, b in [(0, 1), (2, 5), (3, 3)]:
        ab = count_pair_intersection(E, F13, {"y": a}, {"y": b}).count
        ba = count_pair_intersection(E, F13, {"y": b}, {"y": a}).count
        assert ab == ba


def test_count_sweep_examples():
    S = definable_set("E y. y*y = x", ["x"])
    fields = [F11, F13, make_field(17)]
    assert [r.count for r in count_sweep(S, fields)] == [6, 7, 9]
    assert count_sweep(S, []) == []
    none = definable_set("!(x = x)", ["x"])
    assert all(r.count == 0 for r in count_sweep(none, fields))


CORPUS = [
    ("E y. y*y = x", ("x",)),
    ("x*x + y*y = 1", ("x", "y")),
    ("E z. (z*z = x*y & !(x*y = 0))", ("x", "y")),
    ("A u. !(u*u = x)", ("x",)),
    ("x + y = 0 | x = y", ("x", "y")),
    ("E u. E v. x = u*u + v*v", ("x",)),
]


@pytest.mark.parametrize("text,objects", CORPUS)
@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_oracle_equivalence_small(text, objects, p):
    f = fm.parse_formula(text)
    F = make_field(p)
    assert count_solutions(definable_set(text, objects), F).count == oracle.count(f, objects, p)


def test_monotonicity_and_inclusion_exclusion():
    rng = random.Random(1)
    atoms = ["x = y", "x*x = y", "E z. z*z = x + y", "!(x = 0)", "x + y = 1"]
    for _ in range(10):
        a, b = rng.sample(atoms, 2)
        fa, fb = fm.parse_formula(a), fm.parse_formula(b)
        conj = fm.And(fa, fb)
        disj = fm.Or(fa, fb)
        objs = ("x", "y")
        n_and = oracle.count(conj, objs, 11)
        n_or = oracle.count(disj, objs, 11)
        n_a = oracle.count(fa, objs, 11)
        n_b = oracle.count(fb, objs, 11)
        got_and = count_solutions(definable_set_from(conj, objs), F11).count
        got_or = count_solutions(definable_set_from(disj, objs), F11).count
        assert got_and == n_and and got_or == n_or
        assert got_and <= min(n_a, n_b)
        assert got_or == n_a + n_b - got_and


def definable_set_from(f, objects):
    from defreg.counting import DefinableSet

    # pad: declared objects may exceed the free variables for these identities
    free = set(fm.free_variables(f))
    use = tuple(v for v in objects if v in free)
    return DefinableSet(f, use)


def test_complementation_quantifier_free():
    for text, objs in [("x = y", ("x", "y")), ("x*x + y*y = 1", ("x", "y")), ("x = 1", ("x",))]:
        f = fm.parse_formula(text)
        n = count_solutions(definable_set(text, objs), F11).count
        m = count_solutions(
            definable_set_from(fm.Not(f), objs), F11).count
        assert m == 11 ** len(objs) - n


def test_budget_error():
    S = definable_set("x = y & y = z", ["x", "y", "z"])
    with pytest.raises(BudgetError):
        count_solutions(S, make_field(31), budget=1000)


def test_workers_agree_with_serial():
    S = definable_set("E z. (z*z = x*y & !(x*y = 0))", ["x", "y"])
    serial = count_solutions(S, F13, workers=1).count
    parallel = count_solutions(S, F13, workers=2).count
    assert serial == parallel


def test_definable_mask_and_incidence():
    import numpy as np

    V = definable_set("!(x = 0)", ["x"])
    mask = definable_mask(V, F11)
    assert mask.sum() == 10 and not mask[0]
    E = definable_set("E z. (z*z = x - y & !(x = y))", ["x"], ["y"])
    M = incidence_matrix(E, F13)
    assert M.shape == (13, 13)
    assert (M.sum(axis=0) == (13 - 1) // 2).all()  # regular graph
    assert np.array_equal(M, M.T)  # 13 = 1 mod 4, so the relation is symmetric
    # Gram product equals pairwise conjunction counts
    gram = M.T.astype(int) @ M.astype(int)
    for a, b in [(0, 1), (0, 2), (5, 7)]:
        assert gram[a, b] == count_pair_intersection(E, F13, {"y": a}, {"y": b}).count


def test_definable_set_validation():
    with pytest.raises(DefregError):
        definable_set("x = x", ["x", "y"])  # y not free
    with pytest.raises(DefregError):
        definable_set("x = y", ["x"])  # y undeclared
    with pytest.raises(DefregError):
        definable_set("x = y", ["x", "y"], ["y"])  # overlap
