"""Independent reference semantics for prime fields.

Deliberately written apart from the package's compiled evaluator: plain
recursive interpretation with dict environments, itertools.product over
the whole domain, and direct modular arithmetic.  Used as the oracle for
count equivalence tests.
"""

from __future__ import annotations

import itertools

from defreg import formula as fm


def eval_term(t, env: dict, p: int) -> int:
    if isinstance(t, fm.Var):
        return env[t.name]
    if isinstance(t, fm.Const):
        return t.value % p
    if isinstance(t, fm.FieldConst):
        assert t.field.k == 1, "oracle handles prime fields only"
        return t.value
    if isinstance(t, fm.Add):
        return (eval_term(t.left, env, p) + eval_term(t.right, env, p)) % p
    if isinstance(t, fm.Mul):
        return (eval_term(t.left, env, p) * eval_term(t.right, env, p)) % p
    if isinstance(t, fm.Neg):
        return (-eval_term(t.arg, env, p)) % p
    raise TypeError(t)


def eval_formula(f, env: dict, p: int) -> bool:
    if isinstance(f, fm.Eq):
        return eval_term(f.left, env, p) == eval_term(f.right, env, p)
    if isinstance(f, fm.Not):
        return not eval_formula(f.arg, env, p)
    if isinstance(f, fm.And):
        return eval_formula(f.left, env, p) and eval_formula(f.right, env, p)
    if isinstance(f, fm.Or):
        return eval_formula(f.left, env, p) or eval_formula(f.right, env, p)
    if isinstance(f, fm.Exists):
        return any(eval_formula(f.body, {**env, f.var: v}, p) for v in range(p))
    if isinstance(f, fm.Forall):
        return all(eval_formula(f.body, {**env, f.var: v}, p) for v in range(p))
    raise TypeError(f)


def count(f, objects: tuple[str, ...], p: int, params: dict | None = None) -> int:
    total = 0
    base = dict(params or {})
    for combo in itertools.product(range(p), repeat=len(objects)):
        env = dict(zip(objects, combo))
        env.update(base)
        if eval_formula(f, env, p):
            total += 1
    return total
