"""Independent reference implementation used to cross-check the engine.

Deliberately shares nothing with the engine's evaluation path: equations
are interpreted recursively rather than compiled, models are solved by
enumerating whole worlds and filtering by equation satisfaction, and the
cause decision walks the three-clause definition literally, partition by
partition.  Slow on purpose; only run at small scale.
"""

from __future__ import annotations

import itertools
import random

from actualcause import formula as fm
from actualcause import model as md


def interpret(expr, env):
    """Recursive expression interpreter (no code generation)."""
    if isinstance(expr, md.Const):
        return expr.value
    if isinstance(expr, md.Var):
        return env[expr.name]
    if isinstance(expr, md.Cmp):
        a, b = interpret(expr.lhs, env), interpret(expr.rhs, env)
        return int({
            "=": a == b, "!=": a != b, "<": a < b,
            "<=": a <= b, ">": a > b, ">=": a >= b,
        }[expr.op])
    if isinstance(expr, md.Not):
        return int(interpret(expr.operand, env) == 0)
    if isinstance(expr, md.And):
        return int(all(interpret(i, env) != 0 for i in expr.items))
    if isinstance(expr, md.Or):
        return int(any(interpret(i, env) != 0 for i in expr.items))
    if isinstance(expr, md.Sum):
        return sum(interpret(i, env) for i in expr.items)
    if isinstance(expr, md.Case):
        for guard, value in expr.arms:
            if interpret(guard, env) != 0:
                return interpret(value, env)
        return interpret(expr.default, env)
    raise TypeError(type(expr).__name__)


def naive_solve(model, context, interventions=None):
    """Unique world by filtering all assignments against the equations."""
    iv = dict(interventions or {})
    names = model.endogenous_names
    equations = dict(model.equations)
    ranges = [model.range_of(n) for n in names]
    solutions = []
    for combo in itertools.product(*ranges):
        env = dict(context)
        env.update(zip(names, combo))
        ok = True
        for name, value in zip(names, combo):
            want = iv[name] if name in iv else interpret(equations[name], env)
            if value != want:
                ok = False
                break
        if ok:
            solutions.append(dict(zip(names, combo)))
    assert len(solutions) == 1, f"expected a unique world, found {len(solutions)}"
    return solutions[0]


def event_holds(world, phi):
    if isinstance(phi, fm.PrimitiveEvent):
        return world[phi.var] == phi.value
    if isinstance(phi, fm.Not):
        return not event_holds(world, phi.operand)
    if isinstance(phi, fm.And):
        return event_holds(world, phi.left) and event_holds(world, phi.right)
    if isinstance(phi, fm.Or):
        return event_holds(world, phi.left) or event_holds(world, phi.right)
    raise TypeError(type(phi).__name__)


def naive_formula_holds(model, context, phi):
    """Satisfaction including intervention prefixes."""
    if isinstance(phi, fm.Held):
        world = naive_solve(model, context, dict(phi.settings))
        return event_holds(world, phi.body)
    if isinstance(phi, fm.PrimitiveEvent):
        return event_holds(naive_solve(model, context), phi)
    if isinstance(phi, fm.Not):
        return not naive_formula_holds(model, context, phi.operand)
    if isinstance(phi, fm.And):
        return (naive_formula_holds(model, context, phi.left)
                and naive_formula_holds(model, context, phi.right))
    if isinstance(phi, fm.Or):
        return (naive_formula_holds(model, context, phi.left)
                or naive_formula_holds(model, context, phi.right))
    raise TypeError(type(phi).__name__)


def _ac2_holds(model, context, cause, phi, contingency, w_values, alt, original):
    actual = naive_solve(model, context)
    flip = dict(zip(contingency, w_values))
    flip.update(zip(cause.keys(), alt))
    if event_holds(naive_solve(model, context, flip), phi):
        return False
    # restore clause: the off-path set partially re-imposed, everything on
    # the path available for resetting to its actual value
    z_vars = [n for n in model.endogenous_names if n not in contingency]
    w_choices = (
        [tuple(contingency)]
        if original
        else [
            c
            for k in range(len(contingency) + 1)
            for c in itertools.combinations(contingency, k)
        ]
    )
    for chosen in w_choices:
        for k in range(len(z_vars) + 1):
            for resets in itertools.combinations(z_vars, k):
                iv = dict(cause)
                iv.update((n, w_values[contingency.index(n)]) for n in chosen)
                iv.update((n, actual[n]) for n in resets)
                if not event_holds(naive_solve(model, context, iv), phi):
                    return False
    return True


def naive_witnesses(model, context, cause, phi, original):
    """Every witness tuple passing the two AC2 clauses."""
    rest = [n for n in model.endogenous_names if n not in cause]
    out = []
    for k in range(len(rest) + 1):
        for contingency in itertools.combinations(rest, k):
            ranges = [model.range_of(n) for n in contingency]
            for w_values in itertools.product(*ranges):
                for alt in itertools.product(*[model.range_of(n) for n in cause]):
                    if alt == tuple(cause.values()):
                        continue
                    if _ac2_holds(model, context, cause, phi, contingency,
                                  w_values, alt, original):
                        out.append((contingency, w_values, alt))
    return out


def naive_is_cause(model, context, cause, phi, original):
    world = naive_solve(model, context)
    if any(world[n] != v for n, v in cause.items()) or not event_holds(world, phi):
        return False
    if not naive_witnesses(model, context, cause, phi, original):
        return False
    names = list(cause)
    for size in range(1, len(names)):
        for subset in itertools.combinations(names, size):
            sub = {n: cause[n] for n in subset}
            if naive_witnesses(model, context, sub, phi, original):
                return False
    return True


# ---------------------------------------------------------------------------
# Random finite models for differential testing
# ---------------------------------------------------------------------------

def random_boolean_expression(rng: random.Random, allowed, depth):
    roll = rng.random()
    if depth <= 0 or roll < 0.30 or not allowed:
        if rng.random() < 0.35 or not allowed:
            return md.Const(rng.randint(0, 1))
        return md.Var(rng.choice(allowed))
    if roll < 0.45:
        return md.Not(random_boolean_expression(rng, allowed, depth - 1))
    if roll < 0.62:
        return md.And((
            random_boolean_expression(rng, allowed, depth - 1),
            random_boolean_expression(rng, allowed, depth - 1),
        ))
    if roll < 0.79:
        return md.Or((
            random_boolean_expression(rng, allowed, depth - 1),
            random_boolean_expression(rng, allowed, depth - 1),
        ))
    if roll < 0.90:
        return md.Cmp("=", md.Var(rng.choice(allowed)), md.Const(rng.randint(0, 1)))
    return md.Case(
        arms=((
            random_boolean_expression(rng, allowed, depth - 1),
            random_boolean_expression(rng, allowed, depth - 1),
        ),),
        default=random_boolean_expression(rng, allowed, depth - 1),
    )


def random_binary_model(rng: random.Random, max_endogenous=5, max_exogenous=2):
    n_endo = rng.randint(2, max_endogenous)
    n_exo = rng.randint(1, max_exogenous)
    exogenous = {f"U{i}": (0, 1) for i in range(1, n_exo + 1)}
    names = [f"V{i}" for i in range(1, n_endo + 1)]
    equations = {}
    for i, name in enumerate(names):
        allowed = list(exogenous) + names[:i]
        equations[name] = random_boolean_expression(rng, allowed, depth=3)
    return md.make_model(exogenous, {n: (0, 1) for n in names}, equations)


def random_context(rng: random.Random, model):
    return {n: rng.choice(model.range_of(n)) for n in model.exogenous_names}
