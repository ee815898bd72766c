"""Printing: deterministic format, round trips, injectivity."""
import random

from symcomp import canonicalize, equal, print_expr
from symcomp.core import ScalarExpr, VectorExpr
from helpers import Ctx, random_raw


def test_merged_coefficient(xy):
    assert print_expr(xy.canon("b(x,y) + b(x,y)")) == "2*b(x,y)"


def test_zero_prints_as_zero(xy):
    assert print_expr(ScalarExpr()) == "0"
    assert print_expr(VectorExpr()) == "0"


def test_signs_and_fractions(xy):
    # q atoms order before b atoms; the leading sign attaches bare
    assert print_expr(xy.canon("-q(x) + 1/2*b(x,y)")) == "-q(x) + 1/2*b(x,y)"


def test_dots_fully_parenthesized(xy):
    text = print_expr(xy.canon("b((x.y).x, y)"))
    assert text == "b((x.y).x,y)"


def test_vector_terms(xy):
    assert print_expr(xy.canon("q(x)*y - 3*((x.y).x)")) == "q(x)*y - 3*((x.y).x)"
    multi = xy.canon("(q(x) + q(y))*y")
    assert print_expr(multi) == "(q(x) + q(y))*y"


def test_power_format(xy):
    assert print_expr(xy.canon("b(x,y)^3")) == "b(x,y)^3"


def test_residual_prints_to_its_transcription(xy):
    # the alpha^2 residual of the main session, as one deterministic line
    value = xy.canon(
        "-3*b(x.y, (x.y).(x.y)) - 3*b(x.(x.y), y.(y.x))"
        " + 3*b(x.(x.y), (y.y).x) + 6*b((x.y).(x.y), y.x)"
        " - 3*b((y.x).(y.x), x.y)")
    assert print_expr(value) == (
        "-3*b(x.y,(x.y).(x.y)) - 3*b(x.(x.y),y.(y.x))"
        " + 3*b(x.(x.y),(y.y).x) + 6*b((x.y).(x.y),y.x)"
        " - 3*b((y.x).(y.x),x.y)")


def test_round_trip_random():
    ctx = Ctx(scalars=("alpha", "beta"), vectors=("x", "y"))
    rng = random.Random(55)
    for _ in range(200):
        value = canonicalize(random_raw(rng, ctx, depth=3), ctx.env)
        reparsed = ctx.canon(print_expr(value))
        assert equal(reparsed, value)


def test_printing_injective_on_random_pairs():
    ctx = Ctx(scalars=("alpha",), vectors=("x", "y"))
    rng = random.Random(56)
    seen: dict[str, object] = {}
    for _ in range(200):
        value = canonicalize(random_raw(rng, ctx, depth=3), ctx.env)
        text = print_expr(value)
        if text in seen:
            assert type(seen[text]) is type(value) and equal(seen[text], value)
        else:
            seen[text] = value
