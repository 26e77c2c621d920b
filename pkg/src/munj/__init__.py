"""Proof kernel for intuitionistic natural deduction modulo rewriting
with least and greatest fixed points and closed-world equality.

The trusted core is small: `terms`, `formulas`, `proofs`, `rewriting`,
`unification`, and `checker`.  Everything else (normalization, derived
rules, recursive-definition admissibility, surface syntax, CLI) reduces
to kernel calls.
"""

from .checker import ProofChecker
from .errors import (
    AdmitError, CheckError, DemandAnnotation, FuelError, KernelError,
    ParseError, RuleError, SortError, StuckEqualityRedex, UnifyError,
)
from .formulas import (
    All, And, Atom, Bot, Eq, Ex, Formula, Imp, Mu, MuPred, Nu, NuPred, Or,
    Pred, PredAbs, PredOperator, PredVar, Top, alpha_eq_formula, apply_pred,
    check_formula, check_pred, formula_free_vars, subst_formula, subst_pvar,
)
from .normalizer import (
    NormResult, contract, find_redex, functorial, normalize, redex_kind,
    reduce_at, reduce_step, scan_redexes,
)
from .proofs import (
    Abort, Asc, Case, Context, EqCase, ExCase, Fst, Inl, Inr, MuElim,
    MuIntro, NuElim, NuIntro, PApp, PLam, Pair, PrfVar, ProofSubst,
    ProofTerm, Refl, Snd, TApp, TLam, Unit, Wit, alpha_eq_proof,
    proof_free_proof_vars, proof_free_term_vars, subst_proof_in_proof,
    subst_term_in_proof,
)
from .recdefs import Measure, OrderSpec, admit
from .rewriting import (
    AtomRule, RewriteSystem, TermRule, TrustLog, validate_rule,
    validate_system,
)
from .surface import parse, parse_theory, show_formula, show_proof, \
    show_theory
from .terms import (
    App, Arrow, Base, Con, Lam, O, Signature, Term, TermSubst, Ty, Var,
    alpha_eq, app, arrow, free_vars, infer_term_type,
)
from .unification import Completeness, CsuResult, factor_subst, fo_unify

__version__ = "0.1.0"
