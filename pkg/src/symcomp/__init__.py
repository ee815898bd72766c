"""symcomp: a symbolic identity checker for symmetric composition algebras.

Canonicalizes expressions over a non-associative product, a quadratic
form q and its polar form b; rewrites them with deterministic rule sets;
extracts multivariate coefficients; and cross-validates every claim in
an exact para-quaternion model.
"""
from .core import (
    Atom,
    Env,
    Expr,
    ScalarExpr,
    SymbolTable,
    VectorExpr,
    Word,
    atom_order,
    b_of,
    canonicalize,
    dot,
    equal,
    q_of,
)
from .errors import (
    ArityError,
    ChainedDotError,
    EngineError,
    ExprTypeError,
    MissingSymbol,
    NonTermination,
    ParseError,
    RuleSetUnknown,
    SourceSpan,
    SymcompError,
    UndefinedName,
    UnknownSymbol,
)
from .oracle import (
    Assignment,
    IdentityReport,
    ParaQuaternion,
    check_identity,
    eval_expr,
    pq_bilinear,
    pq_mul,
    pq_norm,
)
from .parser import Session, parse_expr, parse_rule_source, parse_script
from .polyops import CoeffMatrix, coeff, coeff_matrix, factored_equal, subst, subst_raw
from .printer import print_expr
from .rules import (
    RewriteRule,
    RuleSet,
    apply_fixpoint,
    apply_once,
    builtin_ruleset,
    builtin_ruleset_names,
    compile_rule,
    match,
)
from .sessions import (
    CheckpointResult,
    CubicElement,
    SessionReport,
    builtin_session_names,
    commutator,
    cubic_form,
    cubic_norm,
    load_builtin_session,
    run_builtin_session,
    run_session,
)

__version__ = "0.1.0"
