"""The causal-formula language and its satisfaction relation.

Formulas are built from primitive events `X = x` over endogenous variables,
boolean connectives, and intervention prefixes: `Held(settings, body)` holds
when `body` holds after replacing the equations of the named variables by
constants.  Prefixes do not nest; their bodies are plain boolean
combinations of primitive events.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .errors import MalformedPhi, UnknownVariable, ValueOutOfRange
from .model import CausalModel, context_values, solve_values

__all__ = [
    "CausalFormula",
    "PrimitiveEvent",
    "Not",
    "And",
    "Or",
    "Held",
    "events_conj",
    "formula_variables",
    "is_intervention_free",
    "validate_formula",
    "eval_formula",
    "valid_in_model",
]


class CausalFormula:
    pass


@dataclass(frozen=True)
class PrimitiveEvent(CausalFormula):
    var: str
    value: int


@dataclass(frozen=True)
class Not(CausalFormula):
    operand: CausalFormula


@dataclass(frozen=True)
class And(CausalFormula):
    left: CausalFormula
    right: CausalFormula


@dataclass(frozen=True)
class Or(CausalFormula):
    left: CausalFormula
    right: CausalFormula


@dataclass(frozen=True)
class Held(CausalFormula):
    """`[Y1 <- y1, ..., Yk <- yk] body`."""

    settings: tuple[tuple[str, int], ...]
    body: CausalFormula


def events_conj(events: Iterable[tuple[str, int]]) -> CausalFormula:
    """Conjunction of primitive events, nested to the left."""
    items = [PrimitiveEvent(v, x) for v, x in events]
    if not items:
        raise MalformedPhi("empty conjunction of events")
    out = items[0]
    for item in items[1:]:
        out = And(out, item)
    return out


def formula_variables(formula: CausalFormula) -> frozenset[str]:
    """Endogenous variables mentioned anywhere in the formula."""
    if isinstance(formula, PrimitiveEvent):
        return frozenset((formula.var,))
    if isinstance(formula, Not):
        return formula_variables(formula.operand)
    if isinstance(formula, (And, Or)):
        return formula_variables(formula.left) | formula_variables(formula.right)
    if isinstance(formula, Held):
        names = frozenset(n for n, _ in formula.settings)
        return names | formula_variables(formula.body)
    raise MalformedPhi(f"unknown formula node {type(formula).__name__}")


def is_intervention_free(formula: CausalFormula) -> bool:
    if isinstance(formula, PrimitiveEvent):
        return True
    if isinstance(formula, Not):
        return is_intervention_free(formula.operand)
    if isinstance(formula, (And, Or)):
        return is_intervention_free(formula.left) and is_intervention_free(formula.right)
    return False


def validate_formula(model: CausalModel, formula: CausalFormula) -> None:
    """Check variable names, ranges, and the no-nested-prefix rule."""
    rt = model._runtime()

    def check(f: CausalFormula, inside_prefix: bool) -> None:
        if isinstance(f, PrimitiveEvent):
            idx = rt.endo_index.get(f.var)
            if idx is None:
                raise UnknownVariable(f.var, "events test endogenous variables only")
            if f.value not in rt.endo_range_sets[idx]:
                raise ValueOutOfRange(f.var, f.value)
        elif isinstance(f, Not):
            check(f.operand, inside_prefix)
        elif isinstance(f, (And, Or)):
            check(f.left, inside_prefix)
            check(f.right, inside_prefix)
        elif isinstance(f, Held):
            if inside_prefix:
                raise MalformedPhi("intervention prefixes do not nest")
            seen = set()
            for name, value in f.settings:
                idx = rt.endo_index.get(name)
                if idx is None:
                    raise UnknownVariable(name, "interventions target endogenous variables")
                if value not in rt.endo_range_sets[idx]:
                    raise ValueOutOfRange(name, value)
                if name in seen:
                    raise MalformedPhi(f"variable {name!r} intervened twice")
                seen.add(name)
            check(f.body, True)
        else:
            raise MalformedPhi(f"unknown formula node {type(f).__name__}")

    check(formula, False)


def compile_event_formula(
    model: CausalModel, formula: CausalFormula
) -> Callable[[tuple[int, ...]], bool]:
    """Turn an intervention-free formula into a predicate on value tuples."""
    rt = model._runtime()

    def build(f: CausalFormula) -> Callable[[tuple[int, ...]], bool]:
        if isinstance(f, PrimitiveEvent):
            i, x = rt.endo_index[f.var], f.value
            return lambda w: w[i] == x
        if isinstance(f, Not):
            g = build(f.operand)
            return lambda w: not g(w)
        if isinstance(f, And):
            a, b = build(f.left), build(f.right)
            return lambda w: a(w) and b(w)
        if isinstance(f, Or):
            a, b = build(f.left), build(f.right)
            return lambda w: a(w) or b(w)
        raise MalformedPhi("formula is not intervention-free")

    return build(formula)


def _eval_checked(
    model: CausalModel, exo: tuple[int, ...], formula: CausalFormula
) -> bool:
    rt = model._runtime()
    worlds: dict[tuple[tuple[int, int], ...], tuple[int, ...]] = {}

    def world_under(settings: tuple[tuple[str, int], ...]) -> tuple[int, ...]:
        iv = tuple(sorted((rt.endo_index[n], x) for n, x in settings))
        found = worlds.get(iv)
        if found is None:
            found = solve_values(model, exo, dict(iv) if iv else None)
            worlds[iv] = found
        return found

    def ev(f: CausalFormula, settings: tuple[tuple[str, int], ...]) -> bool:
        if isinstance(f, PrimitiveEvent):
            return world_under(settings)[rt.endo_index[f.var]] == f.value
        if isinstance(f, Not):
            return not ev(f.operand, settings)
        if isinstance(f, And):
            return ev(f.left, settings) and ev(f.right, settings)
        if isinstance(f, Or):
            return ev(f.left, settings) or ev(f.right, settings)
        if isinstance(f, Held):
            return ev(f.body, f.settings)
        raise MalformedPhi(f"unknown formula node {type(f).__name__}")

    return ev(formula, ())


def eval_formula(
    model: CausalModel, context: Mapping[str, int], formula: CausalFormula
) -> bool:
    """Decide whether the formula holds in the model under the context."""
    validate_formula(model, formula)
    exo = context_values(model, context)
    return _eval_checked(model, exo, formula)


def valid_in_model(model: CausalModel, formula: CausalFormula) -> bool:
    """True when the formula holds in every context of the model."""
    validate_formula(model, formula)
    rt = model._runtime()
    return all(
        _eval_checked(model, exo, formula)
        for exo in itertools.product(*rt.exo_ranges)
    )
