"""Model surgery and meta-level checks.

Covers conservative-extension checking (plain and normality-aware), the
witness-killing variable construction and its iteration, the alternating
stability model family, and the machinery that makes deviation from the
equations abnormal.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import formula as fm
from .causality import (
    ExtendedCausalModel,
    NormalityOrder,
    RuleVariant,
    SearchBudget,
    Witness,
    check_ac1,
    check_ac2a,
    check_ac2b,
    is_actual_cause,
)
from .errors import (
    EngineError,
    NotAWitness,
    PreconditionViolated,
    SignatureMismatch,
    UnknownVariable,
    WitnessEqualsActual,
)
from .model import (
    And,
    CausalModel,
    Case,
    Cmp,
    Const,
    Expression,
    Var,
    World,
    conj,
    context_values,
    disj,
    make_model,
    solve_values,
)

__all__ = [
    "Counterexample",
    "CECounterexample",
    "ExtensionReport",
    "AgreementReport",
    "DeviationRecord",
    "RespectReport",
    "is_conservative_extension",
    "check_formula_agreement",
    "is_conservative_extension_extended",
    "deviating_variables",
    "respects_equations",
    "normality_from_respect",
    "kill_witness",
    "kill_all_witnesses",
    "build_stability_model",
]


# ---------------------------------------------------------------------------
# Conservative extensions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Counterexample:
    context: dict[str, int]
    variable: str
    setting: dict[str, int]
    value_base: int
    value_extension: int


@dataclass(frozen=True)
class CECounterexample:
    context: dict[str, int]
    setting: dict[str, int]
    normal_in_base: bool
    normal_in_extension: bool


@dataclass(frozen=True)
class ExtensionReport:
    is_conservative: bool
    counterexample: Counterexample | None = None
    ce_counterexample: CECounterexample | None = None


def _require_extension_signature(extension: CausalModel, base: CausalModel) -> None:
    if dict(extension.signature.exogenous) != dict(base.signature.exogenous):
        raise SignatureMismatch("the exogenous signatures differ")
    ext_endo = dict(extension.signature.endogenous)
    for name, rng in base.signature.endogenous:
        if name not in ext_endo:
            raise SignatureMismatch(f"extension drops endogenous variable {name!r}")
        if ext_endo[name] != rng:
            raise SignatureMismatch(f"range of {name!r} differs between the models")


def is_conservative_extension(
    extension: CausalModel, base: CausalModel
) -> ExtensionReport:
    """Exhaustively test that the extension leaves the base untouched.

    For every context, every base variable X, and every total setting of the
    other base variables, X must take the same value in both models (new
    variables simply follow their equations under those interventions).
    """
    _require_extension_signature(extension, base)
    base_rt = base._runtime()
    ext_rt = extension._runtime()
    base_names = base_rt.endo_names
    for exo in itertools.product(*base_rt.exo_ranges):
        for x_name in base_names:
            others = [n for n in base_names if n != x_name]
            ranges = [base_rt.endo_ranges[base_rt.endo_index[n]] for n in others]
            for setting in itertools.product(*ranges):
                iv_base = {
                    base_rt.endo_index[n]: v for n, v in zip(others, setting)
                }
                iv_ext = {
                    ext_rt.endo_index[n]: v for n, v in zip(others, setting)
                }
                got_base = solve_values(base, exo, iv_base)[base_rt.endo_index[x_name]]
                got_ext = solve_values(extension, exo, iv_ext)[ext_rt.endo_index[x_name]]
                if got_base != got_ext:
                    return ExtensionReport(
                        False,
                        Counterexample(
                            dict(zip(base_rt.exo_names, exo)),
                            x_name,
                            dict(zip(others, setting)),
                            got_base,
                            got_ext,
                        ),
                    )
    return ExtensionReport(True)


@dataclass(frozen=True)
class AgreementReport:
    agrees: bool
    samples: int
    formula: fm.CausalFormula | None = None
    context: dict[str, int] | None = None
    value_base: bool | None = None
    value_extension: bool | None = None


def _random_event_combo(rng, names, ranges, depth):
    roll = rng.random()
    if depth <= 0 or roll < 0.45:
        i = rng.randrange(len(names))
        return fm.PrimitiveEvent(names[i], rng.choice(ranges[i]))
    if roll < 0.6:
        return fm.Not(_random_event_combo(rng, names, ranges, depth - 1))
    left = _random_event_combo(rng, names, ranges, depth - 1)
    right = _random_event_combo(rng, names, ranges, depth - 1)
    return fm.And(left, right) if roll < 0.8 else fm.Or(left, right)


def _random_atom(rng, names, ranges, depth):
    body = _random_event_combo(rng, names, ranges, depth)
    k = rng.randrange(0, min(3, len(names)) + 1)
    if k == 0:
        return body
    chosen = sorted(rng.sample(range(len(names)), k))
    settings = tuple((names[i], rng.choice(ranges[i])) for i in chosen)
    return fm.Held(settings, body)


def random_event_formula(rng: random.Random, model: CausalModel, depth: int = 3):
    """A random intervention-free boolean combination of events."""
    rt = model._runtime()
    return _random_event_combo(rng, rt.endo_names, rt.endo_ranges, depth)


def random_causal_formula(rng: random.Random, model: CausalModel, depth: int = 3):
    """A random causal formula over the model's endogenous variables."""
    rt = model._runtime()
    names, ranges = rt.endo_names, rt.endo_ranges
    roll = rng.random()
    if roll < 0.6:
        return _random_atom(rng, names, ranges, depth)
    if roll < 0.75:
        return fm.Not(_random_atom(rng, names, ranges, depth))
    left = _random_atom(rng, names, ranges, depth)
    right = _random_atom(rng, names, ranges, depth)
    return fm.And(left, right) if roll < 0.9 else fm.Or(left, right)


def check_formula_agreement(
    extension: CausalModel,
    base: CausalModel,
    samples: int = 200,
    seed: int = 0,
) -> AgreementReport:
    """Randomized spot check that the two models satisfy the same formulas
    over the base variables, in every context."""
    _require_extension_signature(extension, base)
    rng = random.Random(seed)
    contexts = list(base.contexts())
    for _ in range(samples):
        candidate = random_causal_formula(rng, base)
        for ctx in contexts:
            in_base = fm.eval_formula(base, ctx, candidate)
            in_ext = fm.eval_formula(extension, ctx, candidate)
            if in_base != in_ext:
                return AgreementReport(
                    False, samples, candidate, ctx, in_base, in_ext
                )
    return AgreementReport(True, samples)


def is_conservative_extension_extended(
    extension: ExtendedCausalModel, base: ExtendedCausalModel
) -> ExtensionReport:
    """The plain check plus agreement of the two normality thresholds.

    For every context and every setting of base variables, the intervened
    world must compare to the actual world identically under both orders,
    each order applied to its own model's worlds.
    """
    report = is_conservative_extension(extension.base, base.base)
    if not report.is_conservative:
        return report
    b, e = base.base, extension.base
    b_rt, e_rt = b._runtime(), e._runtime()
    for exo in itertools.product(*b_rt.exo_ranges):
        s_u_base = World(b_rt.endo_names, solve_values(b, exo))
        s_u_ext = World(e_rt.endo_names, solve_values(e, exo))
        for size in range(len(b_rt.endo_names) + 1):
            for combo in itertools.combinations(b_rt.endo_names, size):
                ranges = [b_rt.endo_ranges[b_rt.endo_index[n]] for n in combo]
                for vals in itertools.product(*ranges):
                    iv_b = {b_rt.endo_index[n]: v for n, v in zip(combo, vals)}
                    iv_e = {e_rt.endo_index[n]: v for n, v in zip(combo, vals)}
                    s_b = World(b_rt.endo_names, solve_values(b, exo, iv_b))
                    s_e = World(e_rt.endo_names, solve_values(e, exo, iv_e))
                    normal_b = base.order.at_least_as_normal(s_b, s_u_base)
                    normal_e = extension.order.at_least_as_normal(s_e, s_u_ext)
                    if normal_b != normal_e:
                        return ExtensionReport(
                            False,
                            None,
                            CECounterexample(
                                dict(zip(b_rt.exo_names, exo)),
                                dict(zip(combo, vals)),
                                normal_b,
                                normal_e,
                            ),
                        )
    return ExtensionReport(True)


# ---------------------------------------------------------------------------
# Deviations from the equations and normality built from them
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeviationRecord:
    world: World
    variable: str
    expected: int
    actual: int


@dataclass(frozen=True)
class RespectReport:
    respects: bool
    violating_world: World | None = None


def _world_values(model: CausalModel, world) -> tuple[int, ...]:
    rt = model._runtime()
    if isinstance(world, World):
        if world.names != rt.endo_names:
            raise EngineError("world does not belong to this model")
        return world.values
    return tuple(world[n] for n in rt.endo_names)


def deviating_variables(
    model: CausalModel, context: Mapping[str, int], world
) -> list[DeviationRecord]:
    """Variables whose value in the world differs from what their equation
    yields when everything else is pinned to the world's values."""
    rt = model._runtime()
    exo = context_values(model, context)
    values = _world_values(model, world)
    as_world = World(rt.endo_names, values)
    records = []
    for i, name in enumerate(rt.endo_names):
        expected = rt.fns[i](values, exo)
        if expected != values[i]:
            records.append(DeviationRecord(as_world, name, expected, values[i]))
    return records


def _deviates_on(model: CausalModel, exo, values, var_indices) -> bool:
    rt = model._runtime()
    return any(rt.fns[i](values, exo) != values[i] for i in var_indices)


def respects_equations(
    model: ExtendedCausalModel,
    context: Mapping[str, int],
    variables: Iterable[str],
) -> RespectReport:
    """True when every world that deviates on one of the variables is not
    at least as normal as the actual world."""
    base, order = model.base, model.order
    rt = base._runtime()
    exo = context_values(base, context)
    idxs = [_endo_index(base, v) for v in variables]
    s_u = World(rt.endo_names, solve_values(base, exo))
    for combo in itertools.product(*rt.endo_ranges):
        if _deviates_on(base, exo, combo, idxs):
            s = World(rt.endo_names, combo)
            if order.at_least_as_normal(s, s_u):
                return RespectReport(False, s)
    return RespectReport(True)


def _endo_index(model: CausalModel, name: str) -> int:
    idx = model._runtime().endo_index.get(name)
    if idx is None:
        raise UnknownVariable(name, "not an endogenous variable")
    return idx


def normality_from_respect(
    model: CausalModel, context: Mapping[str, int], variables: Iterable[str]
) -> NormalityOrder:
    """Rank order that makes deviation on the given variables abnormal.

    Worlds where every listed variable obeys its equation rank 0; any world
    with a deviation ranks 1.  With no variables this is total equivalence.
    """
    rt = model._runtime()
    exo = context_values(model, context)
    idxs = tuple(_endo_index(model, v) for v in variables)
    names = rt.endo_names

    def rank(world: World) -> int:
        if world.names != names:
            raise EngineError("world does not belong to this model")
        return 1 if _deviates_on(model, exo, world.values, idxs) else 0

    return NormalityOrder.from_ranks(rank)


# ---------------------------------------------------------------------------
# Witness killing
# ---------------------------------------------------------------------------

def _effect_pair(effect) -> tuple[str, int]:
    if isinstance(effect, fm.PrimitiveEvent):
        return effect.var, effect.value
    name, value = effect
    return name, value


def _fresh_witness_var(model: CausalModel, hint: str | None) -> str:
    taken = {n for n, _ in model.signature.exogenous + model.signature.endogenous}
    if hint is not None:
        if hint in taken:
            raise EngineError(f"fresh variable name {hint!r} already in use")
        return hint
    k = 1
    while f"NW{k}" in taken:
        k += 1
    return f"NW{k}"


def kill_witness(
    model: CausalModel,
    context: Mapping[str, int],
    cause: Mapping[str, int],
    effect,
    witness: Witness,
    fresh_name: str | None = None,
) -> CausalModel:
    """Add one watchdog variable that invalidates a specific witness.

    The new variable is 1 exactly when the cause variable sits at its actual
    value and the contingency set sits at the witness values.  The effect
    variable keeps its old equation except in two assignments, where forcing
    the watchdog off (respectively on) pins the effect away from
    (respectively at) its actual value.  The result is a conservative
    extension in which the given witness, and every witness extending it,
    is dead under the original-variant rules.
    """
    if len(cause) != 1:
        raise EngineError("witness killing works on single-conjunct causes")
    (x_name, x_val), = cause.items()
    y_name, y_val = _effect_pair(effect)
    if x_name == y_name:
        raise NotAWitness("cause and effect must be distinct variables")
    phi = fm.PrimitiveEvent(y_name, y_val)

    rt = model._runtime()
    exo = context_values(model, context)
    actual = solve_values(model, exo)
    w_actual = tuple(actual[rt.endo_index[n]] for n in witness.vars)
    if witness.values == w_actual:
        raise WitnessEqualsActual(
            "the contingency values equal the actual values; nothing to kill"
        )
    if not (
        check_ac1(model, context, cause, phi)
        and check_ac2a(model, context, cause, phi, witness, RuleVariant.ORIGINAL)
        and check_ac2b(model, context, cause, phi, witness, RuleVariant.ORIGINAL)
    ):
        raise NotAWitness("the tuple does not certify the cause under the original rules")

    nw = _fresh_witness_var(model, fresh_name)
    x_alt = witness.alt[0]
    w_map = dict(zip(witness.vars, witness.values))
    z_names = [
        n for n in rt.endo_names if n not in w_map and n not in (x_name, y_name)
    ]

    def forced_values(x_value: int) -> dict[str, int]:
        iv = {rt.endo_index[x_name]: x_value}
        iv.update({rt.endo_index[n]: v for n, v in w_map.items()})
        solved = solve_values(model, exo, iv)
        return {n: solved[rt.endo_index[n]] for n in z_names}

    z_at_x = forced_values(x_val)
    z_at_alt = forced_values(x_alt)
    y_range = rt.endo_ranges[rt.endo_index[y_name]]
    y_off = min(v for v in y_range if v != y_val)

    def eq(name: str, value: int) -> Expression:
        return Cmp("=", Var(name), Const(value))

    trigger = conj([eq(x_name, x_val)] + [eq(n, v) for n, v in w_map.items()])
    nw_equation = Case(arms=((trigger, Const(1)),), default=Const(0))

    cond_off = conj(
        [eq(x_name, x_val)]
        + [eq(n, v) for n, v in w_map.items()]
        + [eq(n, z_at_x[n]) for n in z_names]
        + [eq(nw, 0)]
    )
    cond_on = conj(
        [eq(x_name, x_alt)]
        + [eq(n, v) for n, v in w_map.items()]
        + [eq(n, z_at_alt[n]) for n in z_names]
        + [eq(nw, 1)]
    )
    y_equation = Case(
        arms=((cond_off, Const(y_off)), (cond_on, Const(y_val))),
        default=model.equation_of(y_name),
    )

    exogenous = dict(model.signature.exogenous)
    endogenous = dict(model.signature.endogenous)
    endogenous[nw] = (0, 1)
    equations = dict(model.equations)
    equations[y_name] = y_equation
    equations[nw] = nw_equation
    meta = dict(model.meta)
    history = list(meta.get("witness_kills", ()))
    history.append(
        {
            "variable": nw,
            "context": dict(context),
            "cause": {x_name: x_val},
            "effect": {y_name: y_val},
            "witness": {
                "vars": list(witness.vars),
                "values": list(witness.values),
                "alt": list(witness.alt),
            },
        }
    )
    meta["witness_kills"] = history
    return make_model(exogenous, endogenous, equations, meta)


def kill_all_witnesses(
    model: CausalModel,
    context: Mapping[str, int],
    cause: Mapping[str, int],
    effect,
    budget: SearchBudget | None = None,
    max_rounds: int = 64,
) -> CausalModel:
    """Iterate the watchdog construction until the cause dies.

    Requires a cause under the original rules that is not one under the
    updated rules; each round kills the canonically first surviving witness,
    and the loop ends when no witness is left.
    """
    y_name, y_val = _effect_pair(effect)
    phi = fm.PrimitiveEvent(y_name, y_val)
    budget = budget if budget is not None else SearchBudget()
    under_original = is_actual_cause(
        model, context, cause, phi, RuleVariant.ORIGINAL, budget, find_all_witnesses=False
    )
    if not under_original.is_cause:
        raise PreconditionViolated("not a cause under the original rules")
    under_updated = is_actual_cause(
        model, context, cause, phi, RuleVariant.UPDATED, budget, find_all_witnesses=False
    )
    if under_updated.is_cause:
        raise PreconditionViolated("still a cause under the updated rules")

    current = model
    for _ in range(max_rounds):
        verdict = is_actual_cause(
            current, context, cause, phi, RuleVariant.ORIGINAL, budget,
            find_all_witnesses=False,
        )
        if not verdict.is_cause:
            return current
        current = kill_witness(
            current, context, cause, effect, verdict.witnesses[0],
            _fresh_witness_var(current, None),
        )
    raise EngineError(f"witness killing did not converge in {max_rounds} rounds")


# ---------------------------------------------------------------------------
# The alternating stability family
# ---------------------------------------------------------------------------

def build_stability_model(n: int) -> tuple[CausalModel, dict[str, dict[str, int]]]:
    """Member `n` of the chain where adding one variable at a time keeps the
    extension conservative while the key causal verdict alternates.

    Model 0 carries only the two context-driven variables.  Odd members add
    a fresh trigger variable X; even members add its neutralizer Y.  The
    returned contexts are `u0` and `u1`.
    """
    if n < 0:
        raise EngineError("the family is indexed by nonnegative integers")
    num_x = (n + 1) // 2
    num_y = n // 2

    exogenous = {"U": (0, 1)}
    endogenous: dict[str, tuple[int, int]] = {"A": (0, 1), "B": (0, 1)}
    equations: dict[str, Expression] = {"A": Var("U")}
    for j in range(1, num_x + 1):
        endogenous[f"X{j}"] = (0, 1)
        equations[f"X{j}"] = Var("U")
    for j in range(1, num_y + 1):
        endogenous[f"Y{j}"] = (0, 1)
        equations[f"Y{j}"] = Var(f"X{j}")

    if n == 0:
        equations["B"] = Var("U")
    else:
        def is_zero(name: str) -> Expression:
            return Cmp("=", Var(name), Const(0))

        both_zero = [
            And((is_zero(f"X{j}"), is_zero(f"Y{j}"))) for j in range(1, num_y + 1)
        ]
        off_terms = list(both_zero)
        if num_x > num_y:
            off_terms.append(is_zero(f"X{num_x}"))
        mismatch = [
            Cmp("!=", Var(f"X{j}"), Var(f"Y{j}")) for j in range(1, num_y + 1)
        ]
        spoilers = [And((is_zero("A"), disj(off_terms)))]
        if mismatch:
            spoilers.append(And((Cmp("=", Var("A"), Const(1)), disj(mismatch))))
        equations["B"] = Case(
            arms=(
                (Cmp("=", Var("U"), Const(0)), Const(0)),
                (disj(spoilers), Const(0)),
            ),
            default=Const(1),
        )

    model = make_model(exogenous, endogenous, equations, {"stability_index": n})
    return model, {"u0": {"U": 0}, "u1": {"U": 1}}
