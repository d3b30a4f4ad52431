"""Exact brute-force point counting of definable sets over a finite field.

Formulas are compiled once per field into nested closures over a flat
environment list; quantifiers enumerate all q elements innermost-first
with short-circuiting (E stops at the first witness, A at the first
failure).  Counting is always exact: a configurable work budget of
q^(objects + quantifier depth) units guards against runaway enumeration,
and exceeding it raises, never silently samples.

The outermost object-variable loop can be split into contiguous index
ranges across processes; counts are sums, so the result is independent
of scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import BudgetError, DefregError
from .field import FieldSpec
from . import formula as fm

DEFAULT_BUDGET = 10**9
WORKERS_ENV_VAR = "DEFREG_WORKERS"


@dataclass(frozen=True)
class DefinableSet:
    """A formula with its free variables split into object and parameter roles."""

    formula: fm.Formula
    objects: tuple[str, ...]
    params: tuple[str, ...] = ()

    def __post_init__(self):
        free = fm.free_variables(self.formula)
        declared = self.objects + self.params
        if len(set(declared)) != len(declared):
            raise DefregError(f"object/parameter variables overlap: {declared}")
        if set(free) != set(declared):
            raise DefregError(
                f"free variables {sorted(free)} do not match declared {sorted(declared)}"
            )

    @property
    def arity(self) -> int:
        return len(self.objects)


def definable_set(text: str, objects: Sequence[str], params: Sequence[str] = ()) -> DefinableSet:
    return DefinableSet(fm.parse_formula(text), tuple(objects), tuple(params))


@dataclass(frozen=True)
class CountResult:
    q: int
    field: str
    params: dict[str, int] = dc_field(default_factory=dict)
    count: int = 0


# -- compilation -----------------------------------------------------------


def _compile_term(t: fm.Term, F: FieldSpec, slots: dict[str, int]) -> Callable:
    if isinstance(t, fm.Var):
        if t.name not in slots:
            raise DefregError(f"unbound variable {t.name!r}")
        i = slots[t.name]
        return lambda env: env[i]
    if isinstance(t, fm.Const):
        v = F.element_of_int(t.value)
        return lambda env: v
    if isinstance(t, fm.FieldConst):
        if (t.field.p, t.field.k, t.field.modulus) != (F.p, F.k, F.modulus):
            raise DefregError(f"constant from {t.field} used in {F}")
        v = t.value
        return lambda env: v
    if isinstance(t, fm.Add):
        a = _compile_term(t.left, F, slots)
        b = _compile_term(t.right, F, slots)
        if F.k == 1:
            p = F.p
            return lambda env: (a(env) + b(env)) % p
        add = F.add
        return lambda env: add(a(env), b(env))
    if isinstance(t, fm.Mul):
        a = _compile_term(t.left, F, slots)
        b = _compile_term(t.right, F, slots)
        if F.k == 1:
            p = F.p
            return lambda env: a(env) * b(env) % p
        mul = F.mul
        return lambda env: mul(a(env), b(env))
    a = _compile_term(t.arg, F, slots)
    if F.k == 1:
        p = F.p
        return lambda env: -a(env) % p
    neg = F.neg
    return lambda env: neg(a(env))


def _compile_formula(f: fm.Formula, F: FieldSpec, slots: dict[str, int]) -> Callable:
    if isinstance(f, fm.Eq):
        a = _compile_term(f.left, F, slots)
        b = _compile_term(f.right, F, slots)
        return lambda env: a(env) == b(env)
    if isinstance(f, fm.Not):
        g = _compile_formula(f.arg, F, slots)
        return lambda env: not g(env)
    if isinstance(f, fm.And):
        a = _compile_formula(f.left, F, slots)
        b = _compile_formula(f.right, F, slots)
        return lambda env: a(env) and b(env)
    if isinstance(f, fm.Or):
        a = _compile_formula(f.left, F, slots)
        b = _compile_formula(f.right, F, slots)
        return lambda env: a(env) or b(env)
    if isinstance(f, (fm.Exists, fm.Forall)):
        inner = dict(slots)
        slot = max(slots.values(), default=-1) + 1
        inner[f.var] = slot
        body = _compile_formula(f.body, F, inner)
        domain = range(F.q)
        if isinstance(f, fm.Exists):
            def exists(env):
                for v in domain:
                    env[slot] = v
                    if body(env):
                        return True
                return False
            return exists

        def forall(env):
            for v in domain:
                env[slot] = v
                if not body(env):
                    return False
            return True
        return forall
    raise DefregError(f"not a formula node: {f!r}")


def _env_size(f: fm.Formula, n_free: int) -> int:
    return n_free + fm.quantifier_depth(f)


class CompiledPredicate:
    """A formula compiled against one field; call with an env list."""

    def __init__(self, f: fm.Formula, F: FieldSpec, var_order: Sequence[str]):
        self.field = F
        self.var_order = tuple(var_order)
        self.slots = {v: i for i, v in enumerate(var_order)}
        self.fn = _compile_formula(f, F, dict(self.slots))
        self.env_size = _env_size(f, len(var_order))

    def env(self) -> list[int]:
        return [0] * self.env_size

    def __call__(self, env: list[int]) -> bool:
        return self.fn(env)


# -- public operations -------------------------------------------------------


def evaluate(f: fm.Formula, F: FieldSpec) -> bool:
    """Truth value of a closed formula under Tarskian semantics."""
    free = fm.free_variables(f)
    if free:
        raise DefregError(f"formula is not closed; free variables {free}")
    pred = CompiledPredicate(f, F, ())
    return pred(pred.env())


def work_units(S: DefinableSet, F: FieldSpec) -> int:
    return F.q ** (len(S.objects) + fm.quantifier_depth(S.formula))


def check_budget(units: int, budget: int = DEFAULT_BUDGET) -> None:
    if units > budget:
        raise BudgetError(f"enumeration would take {units} work units, budget is {budget}")


def _iterate_count(pred: CompiledPredicate, n_objects: int, q: int,
                   param_values: Sequence[int], lo: int, hi: int) -> int:
    """Count satisfying object tuples with first-variable index in [lo, hi)."""
    env = pred.env()
    for j, v in enumerate(param_values):
        env[n_objects + j] = v
    fn = pred.fn
    if n_objects == 0:
        return int(fn(env)) if lo == 0 else 0
    total = 0
    inner = n_objects - 1
    if inner == 0:
        for v0 in range(lo, hi):
            env[0] = v0
            if fn(env):
                total += 1
        return total
    # odometer over the remaining object variables
    for v0 in range(lo, hi):
        env[0] = v0
        for i in range(1, n_objects):
            env[i] = 0
        while True:
            if fn(env):
                total += 1
            i = n_objects - 1
            while i >= 1:
                env[i] += 1
                if env[i] < q:
                    break
                env[i] = 0
                i -= 1
            else:
                break
    return total


def _count_range_task(args) -> int:
    f, objects, params, param_values, p, k, modulus, lo, hi = args
    F = FieldSpec(p=p, k=k, modulus=modulus)
    pred = CompiledPredicate(f, F, tuple(objects) + tuple(params))
    return _iterate_count(pred, len(objects), F.q, param_values, lo, hi)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV_VAR, "1")))
    except ValueError:
        return 1


def count_solutions(S: DefinableSet, F: FieldSpec, params: Mapping[str, int] | None = None,
                    budget: int = DEFAULT_BUDGET, workers: int | None = None) -> CountResult:
    """Exact number of object tuples satisfying S under the given parameters."""
    params = dict(params or {})
    if set(params) != set(S.params):
        raise DefregError(f"parameter binding {sorted(params)} must bind exactly {sorted(S.params)}")
    for name, v in params.items():
        if not (0 <= v < F.q):
            raise DefregError(f"{v} is not an element of {F}")
    check_budget(work_units(S, F), budget)
    workers = default_workers() if workers is None else max(1, workers)
    param_values = [params[name] for name in S.params]
    n = len(S.objects)
    if workers == 1 or n == 0 or F.q < 2 * workers:
        pred = CompiledPredicate(S.formula, F, S.objects + S.params)
        total = _iterate_count(pred, n, F.q, param_values, 0, F.q)
    else:
        bounds = np.linspace(0, F.q, workers + 1, dtype=int)
        tasks = [
            (S.formula, S.objects, S.params, param_values, F.p, F.k, F.modulus, int(a), int(b))
            for a, b in zip(bounds[:-1], bounds[1:])
            if a < b
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            total = sum(pool.map(_count_range_task, tasks))
    return CountResult(q=F.q, field=F.descriptor(), params=params, count=total)


def conjunction_of_fibers(E: DefinableSet, F: FieldSpec, a: Mapping[str, int],
                          b: Mapping[str, int]) -> DefinableSet:
    """E(x, a) & E(x, b) as a parameter-free definable set over E's objects."""
    fa = fm.substitute(E.formula, dict(a), F)
    fb = fm.substitute(E.formula, dict(b), F)
    return DefinableSet(fm.And(fa, fb), E.objects, ())


def count_pair_intersection(E: DefinableSet, F: FieldSpec, a: Mapping[str, int],
                            b: Mapping[str, int], budget: int = DEFAULT_BUDGET,
                            workers: int | None = None) -> CountResult:
    """|E(x, a) ∧ E(x, b)| -- the shared-fiber count for a parameter pair."""
    for binding in (a, b):
        if set(binding) != set(E.params):
            raise DefregError(f"binding {sorted(binding)} must bind exactly {sorted(E.params)}")
    res = count_solutions(conjunction_of_fibers(E, F, a, b), F, {}, budget, workers)
    return CountResult(q=F.q, field=F.descriptor(),
                       params={f"{k}:a": v for k, v in a.items()} | {f"{k}:b": v for k, v in b.items()},
                       count=res.count)


def count_sweep(S: DefinableSet, fields: Sequence[FieldSpec],
                params_per_field: Sequence[Mapping[str, int]] | None = None,
                budget: int = DEFAULT_BUDGET, workers: int | None = None) -> list[CountResult]:
    """One exact count per field, in input order."""
    if params_per_field is None:
        params_per_field = [{} for _ in fields]
    if len(params_per_field) != len(fields):
        raise DefregError("one parameter binding per field required")
    out = []
    for F, params in zip(fields, params_per_field):
        try:
            out.append(count_solutions(S, F, params, budget, workers))
        except DefregError as e:
            raise type(e)(f"[{F}] {e}") from e
    return out


# -- dense tabulation (for the regularity machinery) -------------------------


def tuple_space_size(F: FieldSpec, n_vars: int) -> int:
    return F.q**n_vars


def _tuples(q: int, n: int):
    # row-major: index = sum(values[i] * q^(n-1-i)); lexicographic order
    env = [0] * n
    total = q**n
    for idx in range(total):
        rem = idx
        for i in range(n - 1, -1, -1):
            env[i] = rem % q
            rem //= q
        yield idx, env


def tuple_index(values: Sequence[int], q: int) -> int:
    idx = 0
    for v in values:
        idx = idx * q + v
    return idx


def index_tuple(idx: int, q: int, n: int) -> tuple[int, ...]:
    out = [0] * n
    for i in range(n - 1, -1, -1):
        out[i] = idx % q
        idx //= q
    return tuple(out)


def definable_mask(S: DefinableSet, F: FieldSpec, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Boolean membership over all object tuples (no parameters allowed)."""
    if S.params:
        raise DefregError("definable_mask requires a parameter-free set")
    check_budget(work_units(S, F), budget)
    pred = CompiledPredicate(S.formula, F, S.objects)
    env = pred.env()
    n = len(S.objects)
    out = np.zeros(F.q**n, dtype=bool)
    fn = pred.fn
    for idx, vals in _tuples(F.q, n):
        env[:n] = vals
        if fn(env):
            out[idx] = True
    return out


def incidence_matrix(E: DefinableSet, F: FieldSpec, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """0/1 matrix of E over object tuples x parameter tuples."""
    n, m = len(E.objects), len(E.params)
    units = F.q ** (n + m + fm.quantifier_depth(E.formula))
    check_budget(units, budget)
    pred = CompiledPredicate(E.formula, F, E.objects + E.params)
    env = pred.env()
    fn = pred.fn
    rows, cols = F.q**n, F.q**m
    out = np.zeros((rows, cols), dtype=np.int8)
    for ridx, rvals in _tuples(F.q, n):
        env[:n] = rvals
        row = out[ridx]
        for cidx, cvals in _tuples(F.q, m):
            env[n:n + m] = cvals
            if fn(env):
                row[cidx] = 1
    return out
