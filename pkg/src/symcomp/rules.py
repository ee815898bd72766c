"""Pattern matching and deterministic rule application.

Pattern variables (uppercase identifiers) range over dot-words: single
canonical dot-subtrees, never sums.  Matching therefore operates per
monomial / per vector term.  Rules come in five kinds:

* ``dot``     -- rewrite a dot-subtree, e.g. ``(X.Y).X -> q(X)*Y``;
* ``atom``    -- rewrite one q/b atom, e.g. ``b(X, Y.Z) -> b(X.Y, Z)``;
* ``power``   -- rewrite a power of a b atom, e.g. ``b(X,Y)^2 -> ...``
  (a product of two equal b atoms is stored as a square, so it matches
  the power rule and never the product rule);
* ``product`` -- rewrite a product of two distinct b atoms inside one
  monomial, e.g. ``b(X,Y)*b(Z,U) -> b(X.Z,Y.U) + b(X.U,Y.Z)``;
* ``noop``    -- kept for catalog fidelity: scalar-extraction rules that
  canonical forms make unreachable.

Application strategy (deterministic): ``apply_once`` visits the
monomials/terms of a canonical value in canonical order; within each it
visits rewrite sites -- dot-subtrees outermost-first (the term's own word,
then inside q/b atom arguments in atom order), then whole atoms in atom
order, then ordered pairs of distinct b atoms.  At each site the rules of
the set are tried in listing order; the first match anywhere in a
monomial rewrites that site, the produced fragment is left untouched for
the rest of the pass, and scanning continues with the next monomial.
``apply_fixpoint`` iterates passes until the canonical form stabilizes.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import rawexpr as rx
from .core import (
    Atom,
    Env,
    Expr,
    Monomial,
    ScalarExpr,
    SymbolTable,
    VectorExpr,
    Word,
    b_of,
    canonicalize,
    dot,
    equal,
    is_scalar,
    is_vector,
    q_of,
)
from .errors import EngineError, NonTermination, ParseError, RuleSetUnknown


# --- patterns ---------------------------------------------------------------


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PLeaf:
    name: str


@dataclass(frozen=True)
class PDot:
    left: "WordPattern"
    right: "WordPattern"


WordPattern = PVar | PLeaf | PDot


@dataclass(frozen=True)
class PQ:
    arg: WordPattern


@dataclass(frozen=True)
class PB:
    left: WordPattern
    right: WordPattern


AtomPattern = PQ | PB


def match_word(pattern: WordPattern, word: Word, binds: dict[str, Word]) -> bool:
    """Tree-match a word pattern, extending `binds`; repeated variables
    require exact dot-word equality."""
    if isinstance(pattern, PVar):
        bound = binds.get(pattern.name)
        if bound is None:
            binds[pattern.name] = word
            return True
        return bound == word
    if isinstance(pattern, PLeaf):
        return word.is_leaf and word.name == pattern.name
    if word.is_leaf:
        return False
    saved = dict(binds)
    if match_word(pattern.left, word.left, binds) and match_word(pattern.right, word.right, binds):
        return True
    binds.clear()
    binds.update(saved)
    return False


def match_atom(pattern: AtomPattern, atom: Atom, binds: dict[str, Word]) -> bool:
    if isinstance(pattern, PQ):
        return atom.is_q and match_word(pattern.arg, atom.w1, binds)
    if not atom.is_b:
        return False
    saved = dict(binds)
    if match_word(pattern.left, atom.w1, binds) and match_word(pattern.right, atom.w2, binds):
        return True
    binds.clear()
    binds.update(saved)
    return False


# --- rules ------------------------------------------------------------------


class RewriteRule:
    """A typed pattern -> template pair."""

    __slots__ = ("name", "kind", "lhs", "lhs2", "power", "rhs")

    def __init__(self, name, kind, lhs, rhs, lhs2=None, power=None):
        self.name = name
        self.kind = kind
        self.lhs = lhs
        self.lhs2 = lhs2
        self.power = power
        self.rhs = rhs

    def __repr__(self):
        return f"RewriteRule({self.name}, {self.kind})"


@dataclass(frozen=True)
class RuleSet:
    name: str
    rules: tuple[RewriteRule, ...]

    def __len__(self) -> int:
        return len(self.rules)


def _pattern_vars(p) -> set[str]:
    if isinstance(p, PVar):
        return {p.name}
    if isinstance(p, PLeaf):
        return set()
    if isinstance(p, PDot):
        return _pattern_vars(p.left) | _pattern_vars(p.right)
    if isinstance(p, PQ):
        return _pattern_vars(p.arg)
    return _pattern_vars(p.left) | _pattern_vars(p.right)


def _word_pattern(raw: rx.RawExpr) -> WordPattern | None:
    if isinstance(raw, rx.Ident):
        return PVar(raw.name) if raw.name.isupper() else PLeaf(raw.name)
    if isinstance(raw, rx.Dot):
        left = _word_pattern(raw.left)
        right = _word_pattern(raw.right)
        if left is not None and right is not None:
            return PDot(left, right)
    return None


def _atom_pattern(raw: rx.RawExpr) -> AtomPattern | None:
    if isinstance(raw, rx.Q):
        arg = _word_pattern(raw.arg)
        return PQ(arg) if arg is not None else None
    if isinstance(raw, rx.B):
        left = _word_pattern(raw.left)
        right = _word_pattern(raw.right)
        if left is not None and right is not None:
            return PB(left, right)
    return None


def compile_rule(name: str, raw_lhs: rx.RawExpr, raw_rhs: rx.RawExpr,
                 allow_noop: bool = False) -> RewriteRule:
    """Turn parsed `lhs -> rhs` trees into a typed rule.

    With `allow_noop`, an lhs that canonical forms can never exhibit
    (scalar factors or sums inside pattern positions) compiles to a
    documented no-op instead of failing.
    """
    rule = None
    if isinstance(raw_lhs, rx.Dot):
        pat = _word_pattern(raw_lhs)
        if pat is not None:
            rule = RewriteRule(name, "dot", pat, raw_rhs)
    elif isinstance(raw_lhs, (rx.Q, rx.B)):
        pat = _atom_pattern(raw_lhs)
        if pat is not None:
            rule = RewriteRule(name, "atom", pat, raw_rhs)
    elif isinstance(raw_lhs, rx.Pow):
        pat = _atom_pattern(raw_lhs.base)
        if pat is not None:
            rule = RewriteRule(name, "power", pat, raw_rhs, power=raw_lhs.exponent)
    elif isinstance(raw_lhs, rx.Mul) and len(raw_lhs.items) == 2:
        p1 = _atom_pattern(raw_lhs.items[0])
        p2 = _atom_pattern(raw_lhs.items[1])
        if isinstance(p1, PB) and isinstance(p2, PB):
            rule = RewriteRule(name, "product", p1, raw_rhs, lhs2=p2)
    if rule is None:
        if allow_noop:
            return RewriteRule(name, "noop", None, raw_rhs)
        span = getattr(raw_lhs, "span", None)
        raise ParseError(
            "rule pattern must be a dot-word, a q/b atom, a power of a b atom, "
            "or a product of two b atoms over dot-word patterns",
            span,
        )
    lhs_vars = _pattern_vars(rule.lhs)
    if rule.lhs2 is not None:
        lhs_vars |= _pattern_vars(rule.lhs2)
    for node in rx.idents(raw_rhs):
        if node.name.isupper() and node.name not in lhs_vars:
            raise ParseError(f"template variable {node.name!r} does not occur in the pattern",
                             node.span)
    return rule


def match(rule: RewriteRule, site) -> dict[str, Word] | None:
    """First binding of a rule against a site, or None.

    Site kinds: a Word for dot rules, an Atom (or (Atom, exponent) pair)
    for atom and power rules, a monomial for product rules.
    """
    binds: dict[str, Word] = {}
    if rule.kind == "dot":
        return binds if match_word(rule.lhs, site, binds) else None
    if rule.kind == "atom":
        atom = site[0] if isinstance(site, tuple) else site
        return binds if match_atom(rule.lhs, atom, binds) else None
    if rule.kind == "power":
        if not (isinstance(site, tuple) and len(site) == 2):
            return None
        atom, exp = site
        if exp != rule.power:
            return None
        return binds if match_atom(rule.lhs, atom, binds) else None
    if rule.kind == "product":
        for a1, a2 in _b_pairs(site):
            binds = {}
            if match_atom(rule.lhs, a1, binds) and match_atom(rule.lhs2, a2, binds):
                return binds
        return None
    return None


def _b_pairs(mono: Monomial):
    """Ordered pairs of distinct exponent-1 b atoms, in atom order."""
    bs = [atom for atom, exp in mono if atom.is_b and exp == 1]
    for i, a1 in enumerate(bs):
        for j, a2 in enumerate(bs):
            if i != j:
                yield a1, a2


# --- application ------------------------------------------------------------


def _dot_sites(word: Word, path: tuple = ()):
    if word.is_leaf:
        return
    yield path, word
    yield from _dot_sites(word.left, path + (0,))
    yield from _dot_sites(word.right, path + (1,))


def _graft(word: Word, path: tuple, repl: VectorExpr) -> VectorExpr:
    if not path:
        return repl
    if path[0] == 0:
        return dot(_graft(word.left, path[1:], repl), VectorExpr.from_word(word.right))
    return dot(VectorExpr.from_word(word.left), _graft(word.right, path[1:], repl))


def _without(mono: Monomial, *indices: int) -> Monomial:
    return tuple(entry for k, entry in enumerate(mono) if k not in indices)


def _instantiate(rule: RewriteRule, binds: dict[str, Word], symbols: SymbolTable) -> Expr:
    bindings = {name: VectorExpr.from_word(w) for name, w in binds.items()}
    return canonicalize(rule.rhs, Env(symbols, bindings))


def _scalar_replacement(rule, binds, symbols) -> ScalarExpr:
    repl = _instantiate(rule, binds, symbols)
    if not is_scalar(repl):
        raise EngineError(f"rule {rule.name} must rewrite an atom to a scalar value")
    return repl


def _rewrite_unit(coeff, mono: Monomial, word: Word | None,
                  rs: RuleSet, symbols: SymbolTable) -> Expr | None:
    """First applicable rewrite of one monomial/term, or None."""
    dot_rules = [r for r in rs.rules if r.kind == "dot"]
    atom_rules = [r for r in rs.rules if r.kind == "atom"]
    power_rules = [r for r in rs.rules if r.kind == "power"]
    product_rules = [r for r in rs.rules if r.kind == "product"]

    def scalar_rest(*drop: int) -> ScalarExpr:
        return ScalarExpr({_without(mono, *drop): coeff})

    def finish(result: ScalarExpr) -> Expr:
        if word is None:
            return result
        return VectorExpr.from_word(word).scaled_by(result)

    # Dot-subtree sites: the term's own word first, then q/b arguments.
    if dot_rules:
        if word is not None:
            for path, sub in _dot_sites(word):
                for rule in dot_rules:
                    binds: dict[str, Word] = {}
                    if match_word(rule.lhs, sub, binds):
                        repl = _instantiate(rule, binds, symbols)
                        if not is_vector(repl):
                            raise EngineError(
                                f"rule {rule.name} must rewrite a dot-word to a vector value")
                        grafted = _graft(word, path, repl)
                        return grafted.scaled_by(ScalarExpr({mono: coeff}))
        for idx, (atom, exp) in enumerate(mono):
            if atom.is_symbol:
                continue
            args = (atom.w1,) if atom.is_q else (atom.w1, atom.w2)
            for argpos, argword in enumerate(args):
                for path, sub in _dot_sites(argword):
                    for rule in dot_rules:
                        binds = {}
                        if not match_word(rule.lhs, sub, binds):
                            continue
                        repl = _instantiate(rule, binds, symbols)
                        if not is_vector(repl):
                            raise EngineError(
                                f"rule {rule.name} must rewrite a dot-word to a vector value")
                        new_arg = _graft(argword, path, repl)
                        if atom.is_q:
                            rebuilt = q_of(new_arg)
                        elif argpos == 0:
                            rebuilt = b_of(new_arg, VectorExpr.from_word(atom.w2))
                        else:
                            rebuilt = b_of(VectorExpr.from_word(atom.w1), new_arg)
                        return finish(scalar_rest(idx) * rebuilt ** exp)

    # Atom sites (power rules take precedence on power atoms).
    if atom_rules or power_rules:
        for idx, (atom, exp) in enumerate(mono):
            if atom.is_symbol:
                continue
            if exp >= 2:
                for rule in power_rules:
                    if rule.power != exp:
                        continue
                    binds = {}
                    if match_atom(rule.lhs, atom, binds):
                        return finish(scalar_rest(idx) * _scalar_replacement(rule, binds, symbols))
            for rule in atom_rules:
                binds = {}
                if match_atom(rule.lhs, atom, binds):
                    repl = _scalar_replacement(rule, binds, symbols)
                    return finish(scalar_rest(idx) * repl ** exp)

    # Products of two distinct b atoms.
    if product_rules:
        indexed = [(idx, atom) for idx, (atom, exp) in enumerate(mono)
                   if atom.is_b and exp == 1]
        for i, (idx1, a1) in enumerate(indexed):
            for j, (idx2, a2) in enumerate(indexed):
                if i == j:
                    continue
                for rule in product_rules:
                    binds = {}
                    if match_atom(rule.lhs, a1, binds) and match_atom(rule.lhs2, a2, binds):
                        repl = _scalar_replacement(rule, binds, symbols)
                        return finish(scalar_rest(idx1, idx2) * repl)
    return None


def apply_once(e: Expr, rs: RuleSet, symbols: SymbolTable) -> Expr:
    """One deterministic pass: at most one rewrite per monomial/term."""
    if is_scalar(e):
        out = ScalarExpr()
        for mono, coeff in e.monomials():
            result = _rewrite_unit(coeff, mono, None, rs, symbols)
            out = out + (result if result is not None else ScalarExpr({mono: coeff}))
        return out
    out = VectorExpr()
    for word, cexpr in e.items():
        for mono, coeff in cexpr.monomials():
            result = _rewrite_unit(coeff, mono, word, rs, symbols)
            if result is None:
                result = VectorExpr({word: ScalarExpr({mono: coeff})})
            out = out + result
    return out


def apply_fixpoint(e: Expr, rs: RuleSet, symbols: SymbolTable, cap: int = 10000) -> Expr:
    """Iterate apply_once until the canonical form is unchanged."""
    current = e
    for _ in range(cap):
        nxt = apply_once(current, rs, symbols)
        if equal(nxt, current):
            return current
        current = nxt
    raise NonTermination(f"rule set {rs.name!r} did not stabilize within {cap} passes")


# --- built-in catalog -------------------------------------------------------

# Transcribed rule sets, in listing order.  The starred scalar-extraction
# entries can never match a canonical form (scalar factors are already
# extracted); they compile to documented no-ops.

_RULES1_SRC = [
    "b(X,Y)*b(Z,U) -> b(X.Z, Y.U) + b(X.U, Y.Z)",
    "b(X.Y, X.Z) -> q(X)*b(Y, Z)",
    "b(X.Y, Z.Y) -> q(Y)*b(X, Z)",
    "(X.Y).X -> q(X)*Y",
    "X.(Y.X) -> q(X)*Y",
    "b(X*q(Y), Z) -> q(Y)*b(X, Z)",   # no-op
    "b(X, Z*q(Y)) -> q(Y)*b(X, Z)",   # no-op
]

_BUILTIN_SOURCES: dict[str, list[str]] = {
    "rules1": _RULES1_SRC,
    "rules2": _RULES1_SRC + [
        "b(X,Y)^2 -> b(X.X, Y.Y) + b(X.Y, Y.X)",
        "b(X,Y)^3 -> b(X,Y)*b(X.X, Y.Y) + b(X,Y)*b(X.Y, Y.X)",
        "b(X,X) -> 2*q(X)",
        "q(X.Y) -> q(X)*q(Y)",
    ],
    "assleft": [
        "b(X, Y.Z) -> b(X.Y, Z)",
    ],
    "assocb": [
        "b(X.Y, (X.Y).(Y.X)) -> b((X.Y).(X.Y), Y.X)",
        "b(X.Y, (Y.X).(X.Y)) -> b((X.Y).(X.Y), Y.X)",
        "b(Y.X, (X.Y).(X.Y)) -> b((X.Y).(X.Y), Y.X)",
    ],
    "move1": [
        "b(Y, X.Y) -> b(X, Y.Y)",
        "b(Y, Y.X) -> b(X, Y.Y)",
    ],
    "move2": [
        "b(x, (x.y).y) -> b(x.y, y.x)",
        "b(y.x, x.y) -> b(x.y, y.x)",
        "b(x, y.(y.x)) -> b(x.y, y.x)",
        "b(y, x.(x.y)) -> b(x.y, y.x)",
        "b(y, (y.x).x) -> b(x.y, y.x)",
    ],
    "move3": [
        "b(Y, Y.(Y.X)) -> b(Y.X, Y.Y)",
        "b(Y, (X.Y).Y) -> b(X.Y, Y.Y)",
    ],
    "move4": [
        "b(x.y, x) -> b(x, x.y)",
        "b(x, y.x) -> b(x, x.y)",
        "b(y.x, x) -> b(x, x.y)",
        "b(x.y, y.(y.x)) -> b(y, (y.x).(x.y))",
        "b(y.x, (x.y).y) -> b(y, (y.x).(x.y))",
        "b(x.y, y.(y.x)) -> b(y, (y.x).(x.y))",   # listed twice at source
        "b(y.x, (x.y).y) -> b(y, (y.x).(x.y))",   # listed twice at source
        "b(y, (x.y).(x.y)) -> q(y)*b(x, x.y)",
        "b(y, (y.x).(y.x)) -> q(y)*b(y.x, x)",
        "b(y, (x.y).(y.x)) -> q(y)*b(x, y.x)",
    ],
    "move5": [
        "b(y, x.y) -> b(y, y.x)",
        "b(x.y, y) -> b(y, y.x)",
        "b(y.x, y) -> b(y, y.x)",
        "b(x.y, (y.x).x) -> b(x, (x.y).(y.x))",
        "b(x.(x.y), y.x) -> b(x, (x.y).(y.x))",
        "b(y.x, x.(x.y)) -> b(x, (x.y).(y.x))",
        "b(x, (y.x).(y.x)) -> q(x)*b(y, y.x)",
        "b(x, (x.y).(x.y)) -> q(x)*b(x.y, y)",
        "b(x, (y.x).(x.y)) -> q(x)*b(y, x.y)",
    ],
    "bsym": [
        "b(y, x) -> b(x, y)",
    ],
    # Linearization sets: sum/sign handling is definitional for canonical
    # forms, so only the multiplicativity entry of expandq can ever fire.
    "expandq": [
        "q(X + Y) -> b(X, Y) + q(X) + q(Y)",   # no-op
        "q(X.Y) -> q(X)*q(Y)",
    ],
    "expandb": [
        "b(X + Y, Z) -> b(X, Z) + b(Y, Z)",    # no-op
        "b(X, Y + Z) -> b(X, Y) + b(X, Z)",    # no-op
        "b(-X, Y) -> -b(X, Y)",                # no-op
        "b(X, -Y.Z) -> -b(X, Y.Z)",            # no-op
        "b(X, -(Z.T)) -> -b(X, Z.T)",          # no-op
    ],
    "expanddot": [
        "(X + Y).Z -> X.Z + Y.Z",              # no-op
        "X.(Y + Z) -> X.Y + X.Z",              # no-op
        "X.(-Y) -> -(X.Y)",                    # no-op
    ],
}

_CATALOG_ORDER = list(_BUILTIN_SOURCES)
_catalog_cache: dict[str, RuleSet] = {}


def builtin_ruleset_names() -> frozenset[str]:
    return frozenset(_BUILTIN_SOURCES)


def catalog_order() -> list[str]:
    return list(_CATALOG_ORDER)


def builtin_ruleset(name: str) -> RuleSet:
    """The transcribed rule set for a catalog name."""
    sources = _BUILTIN_SOURCES.get(name)
    if sources is None:
        raise RuleSetUnknown(f"unknown rule set {name!r}")
    cached = _catalog_cache.get(name)
    if cached is None:
        from .parser import parse_rule_source

        rules = []
        for k, src in enumerate(sources, start=1):
            lhs, rhs = parse_rule_source(src)
            rules.append(compile_rule(f"{name}#{k}", lhs, rhs, allow_noop=True))
        cached = RuleSet(name, tuple(rules))
        _catalog_cache[name] = cached
    return cached


# --- direct pattern instantiation (for soundness checks) --------------------


def pattern_word(p: WordPattern, binds: dict[str, Word], symbols: SymbolTable) -> Word:
    if isinstance(p, PVar):
        return binds[p.name]
    if isinstance(p, PLeaf):
        return Word.leaf(p.name, symbols.index_of(p.name))
    return Word.pair(pattern_word(p.left, binds, symbols),
                     pattern_word(p.right, binds, symbols))


def instantiate_sides(rule: RewriteRule, binds: dict[str, Word],
                      symbols: SymbolTable) -> tuple[Expr, Expr]:
    """Build lhs and rhs values of a rule under a variable binding."""
    if rule.kind == "noop":
        raise EngineError(f"rule {rule.name} is a documented no-op")
    rhs = _instantiate(rule, binds, symbols)
    if rule.kind == "dot":
        lhs: Expr = VectorExpr.from_word(pattern_word(rule.lhs, binds, symbols))
        return lhs, rhs

    def atom_of(p: AtomPattern) -> Atom:
        if isinstance(p, PQ):
            return Atom.q(pattern_word(p.arg, binds, symbols))
        return Atom.b(pattern_word(p.left, binds, symbols),
                      pattern_word(p.right, binds, symbols))

    if rule.kind == "atom":
        return ScalarExpr.from_atom(atom_of(rule.lhs)), rhs
    if rule.kind == "power":
        return ScalarExpr.from_atom(atom_of(rule.lhs), rule.power), rhs
    lhs = ScalarExpr.from_atom(atom_of(rule.lhs)) * ScalarExpr.from_atom(atom_of(rule.lhs2))
    return lhs, rhs
