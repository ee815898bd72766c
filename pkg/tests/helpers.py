"""Shared test utilities: contexts, random expression generation, and an
independent recursive evaluator for raw parse trees (the second route for
cross-checking canonicalization)."""
from __future__ import annotations

import random
from fractions import Fraction

import symcomp.rawexpr as rx
from symcomp import (
    Env,
    ParaQuaternion,
    SymbolTable,
    canonicalize,
    parse_expr,
    pq_bilinear,
    pq_mul,
    pq_norm,
)
from symcomp.oracle import Assignment


class Ctx:
    """A symbol table plus parsing/canonicalization shortcuts."""

    def __init__(self, scalars=(), vectors=("x", "y")):
        self.table = SymbolTable()
        for name in scalars:
            self.table.declare_scalar(name)
        for name in vectors:
            self.table.declare_vector(name)
        self.scalars = tuple(scalars)
        self.vectors = tuple(vectors)

    @property
    def env(self) -> Env:
        return Env(self.table)

    def canon(self, text: str):
        return canonicalize(parse_expr(text), self.env)

    def word(self, text: str):
        value = self.canon(text)
        (w,) = value.terms
        return w

    def mono(self, text: str):
        value = self.canon(text)
        (m,) = value.terms
        return m


def greek_ctx() -> Ctx:
    return Ctx(scalars=("alpha", "beta", "lambda", "mu"), vectors=("x", "y"))


# --- random raw expressions ---------------------------------------------------


def random_vector_raw(rng: random.Random, ctx: Ctx, depth: int) -> rx.RawExpr:
    if depth <= 0:
        return rx.Ident(rng.choice(ctx.vectors))
    pick = rng.random()
    if pick < 0.35:
        return rx.Ident(rng.choice(ctx.vectors))
    if pick < 0.60:
        return rx.Dot(random_vector_raw(rng, ctx, depth - 1),
                      random_vector_raw(rng, ctx, depth - 1))
    if pick < 0.75:
        return rx.Sum((random_vector_raw(rng, ctx, depth - 1),
                       random_vector_raw(rng, ctx, depth - 1)))
    if pick < 0.90:
        return rx.Mul((random_scalar_raw(rng, ctx, depth - 1),
                       random_vector_raw(rng, ctx, depth - 1)))
    return rx.Neg(random_vector_raw(rng, ctx, depth - 1))


def random_scalar_raw(rng: random.Random, ctx: Ctx, depth: int) -> rx.RawExpr:
    if depth <= 0:
        if ctx.scalars and rng.random() < 0.5:
            return rx.Ident(rng.choice(ctx.scalars))
        return rx.Num(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
    pick = rng.random()
    if pick < 0.20:
        return rx.Q(random_vector_raw(rng, ctx, depth - 1))
    if pick < 0.40:
        return rx.B(random_vector_raw(rng, ctx, depth - 1),
                    random_vector_raw(rng, ctx, depth - 1))
    if pick < 0.60:
        return rx.Sum((random_scalar_raw(rng, ctx, depth - 1),
                       random_scalar_raw(rng, ctx, depth - 1)))
    if pick < 0.75:
        return rx.Mul((random_scalar_raw(rng, ctx, depth - 1),
                       random_scalar_raw(rng, ctx, depth - 1)))
    if pick < 0.85:
        return rx.Pow(random_scalar_raw(rng, ctx, depth - 1), rng.randint(2, 3))
    if pick < 0.95 and ctx.scalars:
        return rx.Ident(rng.choice(ctx.scalars))
    return rx.Neg(random_scalar_raw(rng, ctx, depth - 1))


def random_raw(rng: random.Random, ctx: Ctx, depth: int = 3) -> rx.RawExpr:
    if rng.random() < 0.5:
        return random_scalar_raw(rng, ctx, depth)
    return random_vector_raw(rng, ctx, depth)


def random_pq(rng: random.Random, bound: int = 9) -> ParaQuaternion:
    return ParaQuaternion(*(rng.randint(-bound, bound) for _ in range(4)))


def random_ctx_assignment(rng: random.Random, ctx: Ctx) -> Assignment:
    return Assignment(
        vectors={name: random_pq(rng) for name in ctx.vectors},
        scalars={name: Fraction(rng.randint(-9, 9)) for name in ctx.scalars},
    )


# --- independent raw evaluation ----------------------------------------------


def eval_raw(raw: rx.RawExpr, a: Assignment):
    """Direct recursive evaluation of a raw tree, bypassing canonical forms."""
    if isinstance(raw, rx.Num):
        return raw.value
    if isinstance(raw, rx.Ident):
        if raw.name in a.scalars:
            return a.scalars[raw.name]
        return a.vectors[raw.name]
    if isinstance(raw, rx.Neg):
        return -eval_raw(raw.item, a)
    if isinstance(raw, rx.Sum):
        parts = [eval_raw(item, a) for item in raw.items]
        acc = parts[0]
        for p in parts[1:]:
            acc = acc + p
        return acc
    if isinstance(raw, rx.Mul):
        scalar = Fraction(1)
        vector = None
        for item in raw.items:
            value = eval_raw(item, a)
            if isinstance(value, ParaQuaternion):
                vector = value
            else:
                scalar *= value
        return vector.scaled(scalar) if vector is not None else scalar
    if isinstance(raw, rx.Pow):
        return eval_raw(raw.base, a) ** raw.exponent
    if isinstance(raw, rx.Dot):
        return pq_mul(eval_raw(raw.left, a), eval_raw(raw.right, a))
    if isinstance(raw, rx.Q):
        return pq_norm(eval_raw(raw.arg, a))
    if isinstance(raw, rx.B):
        return pq_bilinear(eval_raw(raw.left, a), eval_raw(raw.right, a))
    raise AssertionError(f"unhandled node {type(raw).__name__}")


def values_agree(lhs, rhs) -> bool:
    if isinstance(lhs, ParaQuaternion) != isinstance(rhs, ParaQuaternion):
        # A canonical vector zero may meet a scalar zero from the raw route.
        lz = lhs.is_zero if isinstance(lhs, ParaQuaternion) else lhs == 0
        rz = rhs.is_zero if isinstance(rhs, ParaQuaternion) else rhs == 0
        return lz and rz
    return lhs == rhs
