"""Structural model construction, recursiveness, solving, interventions."""

import itertools
import random

import pytest

from actualcause.errors import (
    CyclicModel,
    DuplicateDefinition,
    EngineError,
    UnknownVariable,
    ValueOutOfRange,
)
from actualcause.model import (
    And,
    Case,
    Cmp,
    Const,
    Not,
    Or,
    Sum,
    Var,
    check_recursive,
    eval_expression,
    intervene,
    make_model,
    solve,
)
from oracle import interpret, naive_solve, random_binary_model, random_context


def test_recursive_order_rock_throwing(rt_naive):
    order = check_recursive(rt_naive.model)
    assert order == ["ST", "BT", "BS"]
    assert order.index("BS") == len(order) - 1


def test_two_cycle_reported():
    model = make_model(
        {"U": (0, 1)},
        {"A": (0, 1), "B": (0, 1)},
        {"A": Var("B"), "B": Var("A")},
    )
    with pytest.raises(CyclicModel) as err:
        check_recursive(model)
    assert err.value.cycle == ["A", "B"]


def test_single_variable_no_dependencies():
    model = make_model({"U": (0, 1)}, {"A": (0, 1)}, {"A": Var("U")})
    assert check_recursive(model) == ["A"]


def test_dead_case_branch_still_counts_as_dependency():
    # B is referenced only under an unreachable guard, yet the edge exists
    model = make_model(
        {"U": (0, 1)},
        {"A": (0, 1), "B": (0, 1)},
        {
            "A": Case(arms=((Const(0), Var("B")),), default=Const(0)),
            "B": Var("A"),
        },
    )
    with pytest.raises(CyclicModel):
        check_recursive(model)


def test_solve_detailed_rock_throwing(rt_detailed):
    world = solve(rt_detailed.model, {"U": 1})
    assert world.as_dict() == {"ST": 1, "BT": 1, "SH": 1, "BH": 0, "BS": 1}


def test_solve_hopkins_context(hopkins):
    world = solve(hopkins.model, hopkins.context("u"))
    assert world["D"] == 1 and world["B"] == 0


def test_solve_stability_zero():
    from actualcause.transforms import build_stability_model

    model, contexts = build_stability_model(0)
    world = solve(model, contexts["u0"])
    assert world["A"] == 0 and world["B"] == 0


def test_empty_intervention_is_identity(rt_naive):
    assert intervene(rt_naive.model, {}) == rt_naive.model


def test_intervention_preempted_thrower(rt_detailed):
    hit = solve(intervene(rt_detailed.model, {"ST": 0}), {"U": 1})
    assert hit["SH"] == 0 and hit["BH"] == 1 and hit["BS"] == 1


def test_intervention_overrides_equation(rt_naive):
    world = solve(intervene(rt_naive.model, {"BS": 0}), {"U": 1})
    assert world.as_dict() == {"ST": 1, "BT": 1, "BS": 0}


def test_intervention_validation(rt_naive):
    with pytest.raises(UnknownVariable):
        intervene(rt_naive.model, {"ZZ": 1})
    with pytest.raises(ValueOutOfRange):
        intervene(rt_naive.model, {"BS": 7})


def test_context_validation(rt_naive):
    with pytest.raises(UnknownVariable):
        solve(rt_naive.model, {})
    with pytest.raises(ValueOutOfRange):
        solve(rt_naive.model, {"U": 3})
    with pytest.raises(UnknownVariable):
        solve(rt_naive.model, {"U": 1, "EXTRA": 0})


def test_signature_validation():
    with pytest.raises(EngineError):
        make_model({"U": (0, 1)}, {"A": ()}, {"A": Const(0)})
    with pytest.raises(EngineError):
        make_model({"U": (0, 1)}, {"A": (1, 0)}, {"A": Const(0)})
    with pytest.raises(DuplicateDefinition):
        make_model({"A": (0, 1)}, {"A": (0, 1)}, {"A": Const(0)})
    with pytest.raises(UnknownVariable):
        make_model({"U": (0, 1)}, {"A": (0, 1)}, {"A": Var("GHOST")})
    with pytest.raises(EngineError):
        make_model({"U": (0, 1)}, {"A": (0, 1)}, {})


def test_out_of_range_equation_value_raises():
    model = make_model({"U": (0, 1)}, {"A": (0, 1)}, {"A": Sum((Var("U"), Const(5)))})
    with pytest.raises(ValueOutOfRange):
        solve(model, {"U": 1})


def test_expression_evaluation_semantics():
    env = {"A": -1, "B": 0}
    assert eval_expression(Not(Var("A")), env) == 0  # any nonzero is true
    assert eval_expression(Not(Var("B")), env) == 1
    assert eval_expression(And((Var("A"), Const(1))), env) == 1
    assert eval_expression(Or((Var("B"), Const(0))), env) == 0
    assert eval_expression(Cmp("<=", Var("A"), Var("B")), env) == 1
    assert eval_expression(Sum((Var("A"), Const(2))), env) == 1
    picked = Case(arms=((Var("B"), Const(9)), (Const(1), Var("A"))), default=Const(7))
    assert eval_expression(picked, env) == -1  # first true guard wins


# -- invariants -------------------------------------------------------------

def _corpus_models():
    from actualcause.corpus import load_document, model_names

    for name in model_names():
        if name == "livengood_17_2_0":
            continue  # 3^19 contexts; covered by its own case
        yield load_document(name)


def test_actual_value_interventions_are_noop():
    for doc in _corpus_models():
        for ctx in doc.contexts.values():
            world = solve(doc.model, ctx)
            names = list(world.names)
            rng = random.Random(17)
            for _ in range(5):
                chosen = rng.sample(names, rng.randint(0, len(names)))
                pinned = intervene(doc.model, {n: world[n] for n in chosen})
                assert solve(pinned, ctx) == world


def test_solve_respects_every_equation():
    for doc in _corpus_models():
        for ctx in doc.contexts.values():
            world = solve(doc.model, ctx)
            env = dict(ctx)
            env.update(world.as_dict())
            for name, expr in doc.model.equations:
                assert eval_expression(expr, env) == world[name], (doc.name, name)


def test_recursive_verdict_is_declaration_order_insensitive():
    rng = random.Random(5)
    for doc in list(_corpus_models())[:8]:
        endo = list(doc.model.signature.endogenous)
        eqs = dict(doc.model.equations)
        for _ in range(3):
            rng.shuffle(endo)
            shuffled = make_model(
                dict(doc.model.signature.exogenous),
                dict(endo),
                {n: eqs[n] for n, _ in endo},
            )
            check_recursive(shuffled)  # must not raise
    cyc = {"A": Var("B"), "B": Var("A")}
    for order in (["A", "B"], ["B", "A"]):
        model = make_model({"U": (0, 1)}, {n: (0, 1) for n in order},
                           {n: cyc[n] for n in order})
        with pytest.raises(CyclicModel):
            check_recursive(model)


def test_intervene_idempotent_and_commutative(rt_detailed):
    m = rt_detailed.model
    a, b = {"ST": 0}, {"BH": 1}
    assert intervene(intervene(m, a), a) == intervene(m, a)
    assert intervene(intervene(m, a), b) == intervene(intervene(m, b), a)


def test_topological_solver_matches_world_enumeration():
    rng = random.Random(99)
    for _ in range(40):
        model = random_binary_model(rng)
        ctx = random_context(rng, model)
        world = solve(model, ctx)
        assert world.as_dict() == naive_solve(model, ctx)
        pin = {model.endogenous_names[0]: rng.randint(0, 1)}
        assert (
            solve(intervene(model, pin), ctx).as_dict()
            == naive_solve(model, ctx, pin)
        )


def test_compiled_equations_match_interpreter():
    rng = random.Random(7)
    for _ in range(30):
        model = random_binary_model(rng)
        rt = model._runtime()
        for combo in itertools.product((0, 1), repeat=len(rt.exo_names)):
            ctx = dict(zip(rt.exo_names, combo))
            world = solve(model, ctx)
            env = {**ctx, **world.as_dict()}
            for name, expr in model.equations:
                assert interpret(expr, env) == world[name]
