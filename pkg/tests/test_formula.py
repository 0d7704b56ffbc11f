"""Formula language: satisfaction, validity, algebraic equivalences."""

import random

import pytest

from actualcause.errors import MalformedPhi, UnknownVariable, ValueOutOfRange
from actualcause.formula import (
    And,
    Held,
    Not,
    Or,
    PrimitiveEvent,
    eval_formula,
    events_conj,
    valid_in_model,
    validate_formula,
)
from actualcause.model import Var, make_model
from actualcause.transforms import random_causal_formula, random_event_formula
from oracle import naive_formula_holds


def test_hopkins_counterfactual(hopkins):
    phi = Held((("A", 1), ("C", 0)), PrimitiveEvent("D", 0))
    assert eval_formula(hopkins.model, hopkins.context("u"), phi) is True


def test_naive_bottle_shatters(rt_naive):
    assert eval_formula(rt_naive.model, {"U": 1}, PrimitiveEvent("BS", 1)) is True
    assert eval_formula(rt_naive.model, {"U": 0}, PrimitiveEvent("BS", 1)) is False


def test_double_intervention(rt_detailed):
    phi = Held((("ST", 0), ("BT", 0)), PrimitiveEvent("BS", 0))
    assert eval_formula(rt_detailed.model, {"U": 1}, phi) is True


def test_validity_by_context_enumeration(rt_naive):
    assert valid_in_model(rt_naive.model, Held((("ST", 1),), PrimitiveEvent("BS", 1)))
    assert not valid_in_model(rt_naive.model, PrimitiveEvent("BS", 1))


def test_validity_single_variable_model():
    model = make_model({"U": (0, 1)}, {"A": (0, 1)}, {"A": Var("U")})
    assert valid_in_model(model, Held((("A", 1),), PrimitiveEvent("A", 1)))


def test_empty_prefix_is_plain_evaluation(rt_detailed):
    rng = random.Random(3)
    ctxs = [{"U": 0}, {"U": 1}]
    for _ in range(50):
        body = random_event_formula(rng, rt_detailed.model)
        for ctx in ctxs:
            wrapped = Held((), body)
            assert eval_formula(rt_detailed.model, ctx, wrapped) == eval_formula(
                rt_detailed.model, ctx, body
            )


def test_de_morgan_and_double_negation(doc):
    rng = random.Random(11)
    for name in ("rock_throwing_detailed", "spohn_switch", "weslake_naive"):
        model = doc(name).model
        for _ in range(40):
            left = random_causal_formula(rng, model)
            right = random_causal_formula(rng, model)
            for ctx in model.contexts():
                lhs = eval_formula(model, ctx, Not(And(left, right)))
                rhs = eval_formula(model, ctx, Or(Not(left), Not(right)))
                assert lhs == rhs
                assert eval_formula(model, ctx, Not(Not(left))) == eval_formula(
                    model, ctx, left
                )


def test_prefix_distributes_over_conjunction(doc):
    rng = random.Random(23)
    model = doc("hopkins_pearl").model
    names = model.endogenous_names
    for _ in range(60):
        k = rng.randint(0, 3)
        chosen = rng.sample(names, k)
        settings = tuple((n, rng.choice(model.range_of(n))) for n in chosen)
        body_a = random_event_formula(rng, model)
        body_b = random_event_formula(rng, model)
        for ctx in model.contexts():
            joint = eval_formula(model, ctx, Held(settings, And(body_a, body_b)))
            split = eval_formula(
                model, ctx, And(Held(settings, body_a), Held(settings, body_b))
            )
            assert joint == split


def test_matches_reference_satisfaction(doc):
    rng = random.Random(41)
    for name in ("rock_throwing_naive", "hopkins_pearl_e", "scanner_vote"):
        model = doc(name).model
        for _ in range(30):
            candidate = random_causal_formula(rng, model)
            for ctx in model.contexts():
                assert eval_formula(model, ctx, candidate) == naive_formula_holds(
                    model, ctx, candidate
                )


def test_events_conj_builder(hopkins):
    built = events_conj([("A", 1), ("B", 0)])
    assert eval_formula(hopkins.model, hopkins.context("u"), built) is True
    with pytest.raises(MalformedPhi):
        events_conj([])


def test_validation_rejects_bad_formulas(hopkins):
    model = hopkins.model
    with pytest.raises(UnknownVariable):
        validate_formula(model, PrimitiveEvent("UA", 1))  # exogenous query
    with pytest.raises(UnknownVariable):
        validate_formula(model, PrimitiveEvent("NOPE", 1))
    with pytest.raises(ValueOutOfRange):
        validate_formula(model, PrimitiveEvent("A", 9))
    with pytest.raises(MalformedPhi):
        validate_formula(
            model,
            Held((("A", 1),), Held((("B", 1),), PrimitiveEvent("D", 1))),
        )
    with pytest.raises(MalformedPhi):
        validate_formula(model, Held((("A", 1), ("A", 0)), PrimitiveEvent("D", 1)))
