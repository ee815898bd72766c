"""Parser for the expression DSL, the rule DSL, and session scripts.

Expression grammar (whitespace-insensitive, `#` starts a line comment):

    expr    := ['+'|'-'] term (('+'|'-') term)*
    term    := factor ('*' factor)*
    factor  := unit ('^' NAT)*            # NAT >= 2
    unit    := primary ['.' primary]      # a second '.' is an error
    primary := NUM ['/' NUM] | IDENT | 'q' '(' expr ')'
             | 'b' '(' expr ',' expr ')' | '(' expr ')'

Only identifiers and parenthesized expressions may be dot operands; the
product is non-associative, so `a.b.c` is rejected outright.  Greek
glyphs are accepted as synonyms for their ASCII names (alpha, beta,
lambda, mu) and the center-dot glyph for `.`.

Script statements (each terminated by `;`):

    scalars a, b, ...;
    vectors x, y, ...;
    rule NAME: PATTERN -> TEMPLATE;
    let NAME = EXPR;
    let NAME = apply(NAME, RULESET [, once]);
    let NAME = subst(NAME, SYM -> EXPR [, SYM -> EXPR ...]);
    let NAME = coeff(NAME, MONOMIAL);
    let NAME = coeffmatrix(NAME, [SYM, SYM]);
    assert_zero NAME;
    assert_equal NAME, EXPR | @GOLDEN;
    assert_factored NAME, EXPR | @GOLDEN;
    assert_matrix NAME, @GOLDEN;
    oracle_check NAME [, trials=N];

`@GOLDEN` references an expression (or coefficient-matrix JSON) stored in
the script's goldens directory.  In rule patterns, uppercase identifiers
(X, Y, Z, U) are pattern variables ranging over dot-words.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import rawexpr as rx
from .errors import (
    ArityError,
    ChainedDotError,
    ParseError,
    RuleSetUnknown,
    SourceSpan,
    UndefinedName,
    UnknownSymbol,
)
from .rules import RewriteRule, builtin_ruleset_names, compile_rule

_GREEK = {"α": "alpha", "β": "beta", "λ": "lambda", "μ": "mu"}
_KEYWORDS = {
    "scalars", "vectors", "let", "rule", "apply", "subst", "coeff",
    "coeffmatrix", "once", "trials", "assert_zero", "assert_equal",
    "assert_factored", "assert_matrix", "oracle_check",
}
_RESERVED = _KEYWORDS | {"q", "b"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def push(kind: str, lexeme: str, length: int | None = None):
        tokens.append(Token(kind, lexeme, SourceSpan(line, col, length or len(lexeme))))

    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in _GREEK:
            push("IDENT", _GREEK[ch], 1)
            i += 1
            col += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            push("IDENT", text[i:j])
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            push("NUM", text[i:j])
            col += j - i
            i = j
            continue
        if ch == "-" and text[i:i + 2] == "->":
            push("ARROW", "->")
            i += 2
            col += 2
            continue
        if ch == "·":  # center dot
            push("DOT", ".", 1)
            i += 1
            col += 1
            continue
        punct = {
            "+": "PLUS", "-": "MINUS", "*": "STAR", "^": "CARET", ".": "DOT",
            "(": "LPAREN", ")": "RPAREN", ",": "COMMA", ";": "SEMI",
            "=": "EQ", "[": "LBRACKET", "]": "RBRACKET", "@": "AT",
            ":": "COLON", "/": "SLASH",
        }.get(ch)
        if punct is None:
            raise ParseError(f"unexpected character {ch!r}", SourceSpan(line, col))
        push(punct, ch)
        i += 1
        col += 1
    tokens.append(Token("EOF", "", SourceSpan(line, col, 0)))
    return tokens


class _TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def accept(self, kind: str) -> Token | None:
        if self.peek().kind == kind:
            return self.advance()
        return None

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {what}, found {tok.text or 'end of input'!r}", tok.span)
        return self.advance()


def _parse_expr(ts: _TokenStream) -> rx.RawExpr:
    span = ts.peek().span
    sign = None
    if ts.peek().kind in ("PLUS", "MINUS"):
        sign = ts.advance()
    item = _parse_term(ts)
    if sign is not None and sign.kind == "MINUS":
        item = rx.Neg(item, sign.span)
    items = [item]
    while ts.peek().kind in ("PLUS", "MINUS"):
        op = ts.advance()
        term = _parse_term(ts)
        items.append(rx.Neg(term, op.span) if op.kind == "MINUS" else term)
    if len(items) == 1:
        return items[0]
    return rx.Sum(tuple(items), span)


def _parse_term(ts: _TokenStream) -> rx.RawExpr:
    span = ts.peek().span
    items = [_parse_factor(ts)]
    while ts.accept("STAR"):
        items.append(_parse_factor(ts))
    if len(items) == 1:
        return items[0]
    return rx.Mul(tuple(items), span)


def _parse_factor(ts: _TokenStream) -> rx.RawExpr:
    item = _parse_unit(ts)
    while ts.peek().kind == "CARET":
        caret = ts.advance()
        num = ts.expect("NUM", "an integer exponent")
        exponent = int(num.text)
        if exponent < 2:
            raise ParseError("exponent must be at least 2", num.span)
        item = rx.Pow(item, exponent, caret.span)
    return item


def _parse_unit(ts: _TokenStream) -> rx.RawExpr:
    left, left_dottable = _parse_primary(ts)
    if ts.peek().kind != "DOT":
        return left
    dot = ts.advance()
    if not left_dottable:
        raise ParseError("dot operands must be identifiers or parenthesized expressions", dot.span)
    right, right_dottable = _parse_primary(ts)
    if not right_dottable:
        raise ParseError("dot operands must be identifiers or parenthesized expressions", dot.span)
    if ts.peek().kind == "DOT":
        raise ChainedDotError(
            "chained dot products are ambiguous in a non-associative algebra; parenthesize",
            ts.peek().span,
        )
    return rx.Dot(left, right, dot.span)


def _parse_primary(ts: _TokenStream) -> tuple[rx.RawExpr, bool]:
    tok = ts.peek()
    if tok.kind == "NUM":
        ts.advance()
        value = Fraction(int(tok.text))
        if ts.peek().kind == "SLASH":
            ts.advance()
            denom = ts.expect("NUM", "a denominator")
            if int(denom.text) == 0:
                raise ParseError("denominator must be nonzero", denom.span)
            value = Fraction(int(tok.text), int(denom.text))
        return rx.Num(value, tok.span), False
    if tok.kind == "LPAREN":
        ts.advance()
        inner = _parse_expr(ts)
        ts.expect("RPAREN", "')'")
        return inner, True
    if tok.kind == "IDENT":
        if tok.text == "q":
            ts.advance()
            ts.expect("LPAREN", "'(' after q")
            arg = _parse_expr(ts)
            if ts.peek().kind == "COMMA":
                raise ArityError("q takes exactly one argument", ts.peek().span)
            ts.expect("RPAREN", "')'")
            return rx.Q(arg, tok.span), False
        if tok.text == "b":
            ts.advance()
            ts.expect("LPAREN", "'(' after b")
            left = _parse_expr(ts)
            if ts.peek().kind == "RPAREN":
                raise ArityError("b takes exactly two arguments", ts.peek().span)
            ts.expect("COMMA", "','")
            right = _parse_expr(ts)
            if ts.peek().kind == "COMMA":
                raise ArityError("b takes exactly two arguments", ts.peek().span)
            ts.expect("RPAREN", "')'")
            return rx.B(left, right, tok.span), False
        ts.advance()
        return rx.Ident(tok.text, tok.span), True
    raise ParseError(f"expected an expression, found {tok.text or 'end of input'!r}", tok.span)


def parse_expr(text: str, symbols=None) -> rx.RawExpr:
    """Parse a single expression; the whole input must be consumed.

    When a symbol table is supplied, every identifier must be declared
    in it (UnknownSymbol otherwise); without one, name resolution is
    deferred to canonicalization.
    """
    ts = _TokenStream(tokenize(text))
    raw = _parse_expr(ts)
    tail = ts.peek()
    if tail.kind != "EOF":
        raise ParseError(f"unexpected trailing input {tail.text!r}", tail.span)
    if symbols is not None:
        for node in rx.idents(raw):
            if symbols.sort_of(node.name) is None:
                raise UnknownSymbol(f"{node.span}: undeclared identifier {node.name!r}")
    return raw


def parse_rule_source(text: str) -> tuple[rx.RawExpr, rx.RawExpr]:
    """Parse `PATTERN -> TEMPLATE` into raw trees."""
    ts = _TokenStream(tokenize(text))
    lhs = _parse_expr(ts)
    ts.expect("ARROW", "'->'")
    rhs = _parse_expr(ts)
    tail = ts.peek()
    if tail.kind != "EOF":
        raise ParseError(f"unexpected trailing input {tail.text!r}", tail.span)
    return lhs, rhs


# --- session scripts -------------------------------------------------------


@dataclass(frozen=True)
class Statement:
    span: SourceSpan


@dataclass(frozen=True)
class DeclSymbols(Statement):
    sort: str
    names: tuple[str, ...]


@dataclass(frozen=True)
class DefRule(Statement):
    set_name: str
    rule: RewriteRule


@dataclass(frozen=True)
class LetExpr(Statement):
    name: str
    raw: rx.RawExpr


@dataclass(frozen=True)
class LetApply(Statement):
    name: str
    source: str
    ruleset: str
    once: bool


@dataclass(frozen=True)
class LetSubst(Statement):
    name: str
    source: str
    bindings: tuple[tuple[str, rx.RawExpr], ...]


@dataclass(frozen=True)
class LetCoeff(Statement):
    name: str
    source: str
    key: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class LetMatrix(Statement):
    name: str
    source: str
    vars: tuple[str, str]


@dataclass(frozen=True)
class Assertion(Statement):
    label: str
    name: str
    kind: str  # zero | equal | factored | matrix | oracle
    expected_raw: rx.RawExpr | None = None
    golden: str | None = None
    trials: int | None = None


@dataclass(frozen=True)
class Session:
    """A named sequence of script statements with labeled checkpoints."""

    name: str
    statements: tuple[Statement, ...]

    @property
    def checkpoints(self) -> list[Assertion]:
        return [s for s in self.statements if isinstance(s, Assertion)]


class _ScriptParser:
    def __init__(self, text: str, name: str):
        self.ts = _TokenStream(tokenize(text))
        self.name = name
        self.symbol_sorts: dict[str, str] = {}
        self.defined: set[str] = set()
        self.local_rulesets: dict[str, list[RewriteRule]] = {}
        self.statements: list[Statement] = []
        self.n_checkpoints = 0

    def parse(self) -> Session:
        while self.ts.peek().kind != "EOF":
            self.statements.append(self._statement())
        return Session(self.name, tuple(self.statements))

    # helpers ---------------------------------------------------------------

    def _ident(self, what: str) -> Token:
        return self.ts.expect("IDENT", what)

    def _check_fresh_symbol(self, tok: Token):
        if tok.text in _RESERVED:
            raise ParseError(f"{tok.text!r} is reserved", tok.span)
        if tok.text in self.defined:
            raise ParseError(f"{tok.text!r} already names a session value", tok.span)

    def _check_defined(self, tok: Token):
        if tok.text not in self.defined:
            raise UndefinedName(f"undefined name {tok.text!r}", tok.span)

    def _validate_expr_names(self, raw: rx.RawExpr):
        for node in rx.idents(raw):
            name = node.name
            if name not in self.symbol_sorts and name not in self.defined:
                raise UndefinedName(f"undefined name {name!r}", node.span)

    def _next_label(self) -> str:
        self.n_checkpoints += 1
        return f"C{self.n_checkpoints}"

    def _ruleset_name(self, tok: Token) -> str:
        if tok.text in self.local_rulesets or tok.text in builtin_ruleset_names():
            return tok.text
        raise RuleSetUnknown(f"{tok.span}: unknown rule set {tok.text!r}")

    # statements ------------------------------------------------------------

    def _statement(self) -> Statement:
        tok = self.ts.peek()
        if tok.kind != "IDENT":
            raise ParseError(f"expected a statement, found {tok.text!r}", tok.span)
        handler = {
            "scalars": self._decl,
            "vectors": self._decl,
            "rule": self._rule,
            "let": self._let,
            "assert_zero": self._assertion,
            "assert_equal": self._assertion,
            "assert_factored": self._assertion,
            "assert_matrix": self._assertion,
            "oracle_check": self._assertion,
        }.get(tok.text)
        if handler is None:
            raise ParseError(f"unknown statement {tok.text!r}", tok.span)
        stmt = handler()
        self.ts.expect("SEMI", "';'")
        return stmt

    def _decl(self) -> Statement:
        head = self.ts.advance()
        sort = "scalar" if head.text == "scalars" else "vector"
        names = []
        while True:
            tok = self._ident("a symbol name")
            self._check_fresh_symbol(tok)
            if tok.text in self.symbol_sorts and self.symbol_sorts[tok.text] != sort:
                raise ParseError(f"{tok.text!r} already declared with a different sort", tok.span)
            self.symbol_sorts[tok.text] = sort
            names.append(tok.text)
            if not self.ts.accept("COMMA"):
                break
        return DeclSymbols(head.span, sort, tuple(names))

    def _rule(self) -> Statement:
        head = self.ts.advance()
        name = self._ident("a rule set name")
        if name.text in _RESERVED or name.text in builtin_ruleset_names():
            raise ParseError(f"rule set name {name.text!r} is reserved", name.span)
        self.ts.expect("COLON", "':'")
        lhs = _parse_expr(self.ts)
        self.ts.expect("ARROW", "'->'")
        rhs = _parse_expr(self.ts)
        ordinal = len(self.local_rulesets.get(name.text, [])) + 1
        rule = compile_rule(f"{name.text}#{ordinal}", lhs, rhs)
        self.local_rulesets.setdefault(name.text, []).append(rule)
        return DefRule(head.span, name.text, rule)

    def _let(self) -> Statement:
        head = self.ts.advance()
        name = self._ident("a name")
        if name.text in _RESERVED:
            raise ParseError(f"{name.text!r} is reserved", name.span)
        if name.text in self.symbol_sorts:
            raise ParseError(f"{name.text!r} is a declared symbol", name.span)
        self.ts.expect("EQ", "'='")
        tok = self.ts.peek()
        if tok.kind == "IDENT" and tok.text in ("apply", "subst", "coeff", "coeffmatrix") \
                and self.ts.peek(1).kind == "LPAREN":
            stmt = self._let_builtin(head.span, name.text, tok.text)
        else:
            raw = _parse_expr(self.ts)
            self._validate_expr_names(raw)
            stmt = LetExpr(head.span, name.text, raw)
        self.defined.add(name.text)
        return stmt

    def _let_builtin(self, span: SourceSpan, name: str, op: str) -> Statement:
        self.ts.advance()
        self.ts.expect("LPAREN", "'('")
        source = self._ident("a defined name")
        self._check_defined(source)
        self.ts.expect("COMMA", "','")
        if op == "apply":
            rset = self._ruleset_name(self._ident("a rule set name"))
            once = False
            if self.ts.accept("COMMA"):
                flag = self._ident("'once'")
                if flag.text != "once":
                    raise ParseError(f"expected 'once', found {flag.text!r}", flag.span)
                once = True
            self.ts.expect("RPAREN", "')'")
            return LetApply(span, name, source.text, rset, once)
        if op == "subst":
            bindings = []
            while True:
                sym = self._ident("a symbol name")
                if sym.text not in self.symbol_sorts:
                    raise UndefinedName(f"undefined symbol {sym.text!r}", sym.span)
                self.ts.expect("ARROW", "'->'")
                raw = _parse_expr(self.ts)
                self._validate_expr_names(raw)
                bindings.append((sym.text, raw))
                if not self.ts.accept("COMMA"):
                    break
            self.ts.expect("RPAREN", "')'")
            return LetSubst(span, name, source.text, tuple(bindings))
        if op == "coeff":
            key = self._monomial_key()
            self.ts.expect("RPAREN", "')'")
            return LetCoeff(span, name, source.text, key)
        self.ts.expect("LBRACKET", "'['")
        v1 = self._scalar_symbol()
        self.ts.expect("COMMA", "','")
        v2 = self._scalar_symbol()
        self.ts.expect("RBRACKET", "']'")
        self.ts.expect("RPAREN", "')'")
        return LetMatrix(span, name, source.text, (v1, v2))

    def _scalar_symbol(self) -> str:
        tok = self._ident("a scalar symbol")
        if self.symbol_sorts.get(tok.text) != "scalar":
            raise UndefinedName(f"{tok.text!r} is not a declared scalar symbol", tok.span)
        return tok.text

    def _monomial_key(self) -> tuple[tuple[str, int], ...]:
        key: dict[str, int] = {}
        while True:
            tok = self._ident("a scalar symbol")
            if self.symbol_sorts.get(tok.text) != "scalar":
                raise UndefinedName(f"{tok.text!r} is not a declared scalar symbol", tok.span)
            exp = 1
            if self.ts.accept("CARET"):
                num = self.ts.expect("NUM", "an integer exponent")
                exp = int(num.text)
                if exp < 1:
                    raise ParseError("exponent must be at least 1", num.span)
            key[tok.text] = key.get(tok.text, 0) + exp
            if not self.ts.accept("STAR"):
                break
        return tuple(sorted(key.items()))

    def _assertion(self) -> Statement:
        head = self.ts.advance()
        target = self._ident("a defined name")
        self._check_defined(target)
        label = self._next_label()
        if head.text == "assert_zero":
            return Assertion(head.span, label, target.text, "zero")
        if head.text == "oracle_check":
            trials = None
            if self.ts.accept("COMMA"):
                kw = self._ident("'trials'")
                if kw.text != "trials":
                    raise ParseError(f"expected 'trials', found {kw.text!r}", kw.span)
                self.ts.expect("EQ", "'='")
                num = self.ts.expect("NUM", "a trial count")
                trials = int(num.text)
                if trials < 1:
                    raise ParseError("trials must be at least 1", num.span)
            return Assertion(head.span, label, target.text, "oracle", trials=trials)
        kind = {"assert_equal": "equal", "assert_factored": "factored",
                "assert_matrix": "matrix"}[head.text]
        self.ts.expect("COMMA", "','")
        if self.ts.accept("AT"):
            golden = self._ident("a golden name")
            return Assertion(head.span, label, target.text, kind, golden=golden.text)
        if kind == "matrix":
            raise ParseError("assert_matrix expects a @golden reference", self.ts.peek().span)
        raw = _parse_expr(self.ts)
        self._validate_expr_names(raw)
        return Assertion(head.span, label, target.text, kind, expected_raw=raw)


def parse_script(text: str, name: str = "session") -> Session:
    """Parse a session script; statically validates names and rule sets."""
    return _ScriptParser(text, name).parse()
