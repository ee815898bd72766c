"""Deterministic text form for canonical expressions.

Output is valid input for the expression grammar, so printing and
re-parsing round-trips: monomials appear in canonical order, scalar
multiplication is explicit (`*`), rationals print as `p/q`, and every
nested dot is parenthesized.  Distinct canonical values print differently.
"""
from __future__ import annotations

from fractions import Fraction

from .core import Atom, Expr, Monomial, ScalarExpr, VectorExpr, Word, is_scalar


def word_text(w: Word) -> str:
    if w.is_leaf:
        return w.name
    return f"{_dot_side(w.left)}.{_dot_side(w.right)}"


def _dot_side(w: Word) -> str:
    if w.is_leaf:
        return w.name
    return f"({word_text(w)})"


def atom_text(atom: Atom) -> str:
    if atom.is_symbol:
        return atom.name
    if atom.is_q:
        return f"q({word_text(atom.w1)})"
    return f"b({word_text(atom.w1)},{word_text(atom.w2)})"


def _mono_factors(mono: Monomial) -> str:
    parts = []
    for atom, exp in mono:
        text = atom_text(atom)
        parts.append(text if exp == 1 else f"{text}^{exp}")
    return "*".join(parts)


def _coeff_text(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _signed_scalar_parts(e: ScalarExpr) -> list[tuple[bool, str]]:
    parts = []
    for mono, coeff in e.monomials():
        negative = coeff < 0
        mag = -coeff if negative else coeff
        factors = _mono_factors(mono)
        if not factors:
            text = _coeff_text(mag)
        elif mag == 1:
            text = factors
        else:
            text = f"{_coeff_text(mag)}*{factors}"
        parts.append((negative, text))
    return parts


def _join(parts: list[tuple[bool, str]]) -> str:
    if not parts:
        return "0"
    negative, text = parts[0]
    out = [f"-{text}" if negative else text]
    for negative, text in parts[1:]:
        out.append(f" - {text}" if negative else f" + {text}")
    return "".join(out)


def scalar_text(e: ScalarExpr) -> str:
    return _join(_signed_scalar_parts(e))


def vector_text(e: VectorExpr) -> str:
    parts: list[tuple[bool, str]] = []
    for word, coeff in e.items():
        wtext = word_text(word) if word.is_leaf else f"({word_text(word)})"
        monos = coeff.monomials()
        if len(monos) == 1:
            mono, c = monos[0]
            negative = c < 0
            mag = -c if negative else c
            factors = _mono_factors(mono)
            head = "" if mag == 1 else _coeff_text(mag)
            pieces = [p for p in (head, factors, wtext) if p]
            parts.append((negative, "*".join(pieces)))
        else:
            parts.append((False, f"({scalar_text(coeff)})*{wtext}"))
    return _join(parts)


def print_expr(e: Expr) -> str:
    """Deterministic canonical text for a scalar or vector value."""
    return scalar_text(e) if is_scalar(e) else vector_text(e)
