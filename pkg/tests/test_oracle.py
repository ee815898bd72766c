"""The para-quaternion model: product table, evaluation, identity checks."""
import random
from fractions import Fraction

import pytest

from symcomp import check_identity, eval_expr, pq_bilinear, pq_mul, pq_norm
from symcomp.oracle import (
    Assignment,
    PQ_I,
    PQ_J,
    PQ_K,
    PQ_ONE,
    ParaQuaternion,
    random_assignment,
)
from symcomp.errors import MissingSymbol
from helpers import random_pq


def test_unit_times_unit():
    assert pq_mul(PQ_ONE, PQ_ONE) == PQ_ONE


def test_i_times_j():
    # conj(i) conj(j) = (-i)(-j) = ij = k
    assert pq_mul(PQ_I, PQ_J) == PQ_K


def test_norm_multiplicativity_brute_force():
    rng = random.Random(90)
    for _ in range(100):
        u, v = random_pq(rng), random_pq(rng)
        assert pq_norm(pq_mul(u, v)) == pq_norm(u) * pq_norm(v)


def test_biflexibility_brute_force():
    rng = random.Random(91)
    for _ in range(100):
        u, v = random_pq(rng), random_pq(rng)
        scaled = v.scaled(pq_norm(u))
        assert pq_mul(pq_mul(u, v), u) == scaled
        assert pq_mul(u, pq_mul(v, u)) == scaled


def test_norm_associativity_brute_force():
    rng = random.Random(92)
    for _ in range(100):
        u, v, w = random_pq(rng), random_pq(rng), random_pq(rng)
        assert pq_bilinear(pq_mul(u, v), w) == pq_bilinear(u, pq_mul(v, w))


def test_polar_form_definition():
    rng = random.Random(93)
    for _ in range(50):
        u, v = random_pq(rng), random_pq(rng)
        assert pq_bilinear(u, v) == pq_norm(u + v) - pq_norm(u) - pq_norm(v)


def test_eval_norm_of_unit(xy):
    a = Assignment(vectors={"x": PQ_ONE}, scalars={})
    assert eval_expr(xy.canon("q(x)"), a) == 1


def test_eval_polarization_rule(xy):
    e = xy.canon("b(x,x) - 2*q(x)")
    for trial in range(20):
        a = random_assignment(["x"], [], 7, trial)
        assert eval_expr(e, a) == 0


def test_eval_flexible_law_componentwise(xy):
    e = xy.canon("(x.y).x - q(x)*y")
    for trial in range(20):
        a = random_assignment(["x", "y"], [], 8, trial)
        assert eval_expr(e, a).is_zero


def test_eval_missing_symbol(xy):
    with pytest.raises(MissingSymbol):
        eval_expr(xy.canon("q(x)"), Assignment(vectors={}, scalars={}))


def test_check_identity_pass(xy):
    report = check_identity(xy.canon("q(x.y) - q(x)*q(y)"), 100, 42)
    assert report.passed
    assert report.counterexample is None
    assert report.trials == 100


def test_check_identity_b_symmetry_in_model(xy):
    # the engine keeps b(x,y) and b(y,x) distinct; the model does not
    report = check_identity(xy.canon("b(x,y) - b(y,x)"), 100, 42)
    assert report.passed


def test_check_identity_failure_has_counterexample(xy):
    report = check_identity(xy.canon("q(x) - q(y)"), 100, 42)
    assert not report.passed
    cx = report.counterexample
    assert cx is not None
    a = Assignment(
        vectors={n: ParaQuaternion(*(Fraction(c) for c in comps))
                 for n, comps in cx.to_jsonable()["vectors"].items()},
        scalars={},
    )
    assert eval_expr(xy.canon("q(x) - q(y)"), a) != 0


def test_check_identity_deterministic(xy):
    e = xy.canon("q(x) - q(y)")
    first = check_identity(e, 50, 9)
    second = check_identity(e, 50, 9)
    assert first.to_json() == second.to_json()
    different = check_identity(e, 50, 10)
    assert different.to_json() != first.to_json()


def test_single_trial(xy):
    report = check_identity(xy.canon("b(x,y) - b(y,x)"), 1, 42)
    assert report.passed and report.trials == 1


def test_component_range(xy):
    a = random_assignment(["x", "y"], ["alpha"], 42, 0)
    for pq in a.vectors.values():
        assert all(-9 <= c <= 9 for c in pq.components())
    assert all(-9 <= v <= 9 for v in a.scalars.values())
