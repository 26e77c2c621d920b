"""User rewrite rules, normalization modulo them, and the congruence test.

Term rules map first-order term patterns to terms; atom rules map an applied
predicate constant to an arbitrary formula.  Normalization is
leftmost-innermost and interleaved with beta normalization; rules fire in
declaration order.  Confluence and termination of the user system are
assumptions, recorded in the trust log, never proved here.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .errors import FuelError, RuleError, SortError
from .formulas import (
    All, And, Atom, Bot, Eq, Ex, Formula, Imp, Mu, Nu, Or, PredOperator,
    PredVar, Top, alpha_eq_formula, check_formula, formula_free_vars,
    subst_formula,
)
from .terms import (
    App, Arrow, Con, Lam, Signature, Term, TermSubst, Ty, Var, alpha_eq,
    beta_normalize, free_vars, infer_term_type, spine, subst_raw, unarrow,
)

DEFAULT_REWRITE_FUEL = 10**5


@dataclass(frozen=True)
class TermRule:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class AtomRule:
    head: str
    args: tuple[Term, ...]
    rhs: Formula


Rule = Union[TermRule, AtomRule]


class TrustLog:
    """Append-only record of every unproved assumption the session leans on."""

    def __init__(self):
        self.entries: list[tuple[str, str]] = []

    def add(self, kind: str, detail: str) -> None:
        self.entries.append((kind, detail))

    def render(self) -> str:
        if not self.entries:
            return "trust: no assumptions recorded"
        lines = ["trust report:"]
        for kind, detail in self.entries:
            lines.append(f"  [{kind}] {detail}")
        return "\n".join(lines)


class RewriteSystem:
    """Immutable bundle of term rules and atom rules.

    The termination/confluence flags record user assertions; loading a
    system logs them as assumptions.
    """

    def __init__(self, term_rules: Iterable[TermRule] = (),
                 atom_rules: Iterable[AtomRule] = (),
                 assumed_terminating: bool = True,
                 assumed_confluent: bool = True):
        self.term_rules = tuple(term_rules)
        self.atom_rules = tuple(atom_rules)
        self.assumed_terminating = assumed_terminating
        self.assumed_confluent = assumed_confluent
        self._lhs_heads = frozenset(
            h.name for h in (spine(r.lhs)[0] for r in self.term_rules)
            if isinstance(h, Con))

    def is_constructor(self, name: str) -> bool:
        """A constant is a constructor iff it never heads a term-rule lhs."""
        return name not in self._lhs_heads

    def with_rules(self, term_rules: Iterable[TermRule] = (),
                   atom_rules: Iterable[AtomRule] = ()) -> "RewriteSystem":
        return RewriteSystem(self.term_rules + tuple(term_rules),
                             self.atom_rules + tuple(atom_rules),
                             self.assumed_terminating, self.assumed_confluent)

    def atom_rules_for(self, head: str) -> list[AtomRule]:
        return [r for r in self.atom_rules if r.head == head]


EMPTY_SYSTEM = RewriteSystem()


# ---------------------------------------------------------------- validation

def pattern_first_order(t: Term) -> bool:
    match t:
        case Var(_) | Con(_):
            return True
        case App(f, a):
            return pattern_first_order(f) and pattern_first_order(a)
        case Lam(_, _, _):
            return False
    raise TypeError(t)


def infer_pattern_types(sig: Signature, t: Term, expected: Ty,
                        ctx: dict[str, Ty]) -> None:
    """Accumulate variable types of a first-order pattern top-down."""
    match t:
        case Var(name):
            if name in ctx and ctx[name] != expected:
                raise RuleError(
                    f"pattern variable {name} used at {ctx[name]} and {expected}")
            ctx[name] = expected
        case Con(name):
            if name not in sig.constants:
                raise RuleError(f"unknown constant {name} in pattern")
            if sig.constants[name] != expected:
                raise RuleError(f"constant {name}: {sig.constants[name]} "
                                f"used where {expected} expected")
        case App(_, _):
            head, args = spine(t)
            if not isinstance(head, Con):
                raise RuleError("pattern application must be headed by a constant")
            if head.name not in sig.constants:
                raise RuleError(f"unknown constant {head.name} in pattern")
            want, res = unarrow(sig.constants[head.name])
            if len(args) > len(want):
                raise RuleError(f"constant {head.name} applied to too many arguments")
            got: Ty = sig.constants[head.name]
            for _ in args:
                got = got.right  # type: ignore[union-attr]
            if got != expected:
                raise RuleError(f"pattern {head.name}-application has type {got}, "
                                f"expected {expected}")
            for a, w in zip(args, want):
                infer_pattern_types(sig, a, w, ctx)
        case Lam(_, _, _):
            raise RuleError("lambda not allowed in a rule left side")
        case _:
            raise TypeError(t)


def validate_rule(sig: Signature, rule: Rule) -> list[str]:
    errors: list[str] = []
    if isinstance(rule, TermRule):
        if isinstance(rule.lhs, Var):
            return ["rule left side is a bare variable"]
        if not pattern_first_order(rule.lhs):
            return ["lambda not allowed in a rule left side"]
        head, _ = spine(rule.lhs)
        if not isinstance(head, Con):
            return ["rule left side must be headed by a constant"]
        if head.name in sig.predicates:
            return [f"term rule headed by predicate {head.name}"]
        ctx: dict[str, Ty] = {}
        try:
            lhs_ty = infer_term_type(
                sig, _pattern_ctx(sig, rule.lhs, ctx), rule.lhs)
        except (RuleError, SortError) as e:
            return [str(e)]
        extra = free_vars(rule.rhs) - free_vars(rule.lhs)
        if extra:
            errors.append(f"right side has extra variables {sorted(extra)}")
        else:
            try:
                rhs_ty = infer_term_type(sig, ctx, rule.rhs)
                if rhs_ty != lhs_ty:
                    errors.append(
                        f"rule is not type-preserving: {lhs_ty} vs {rhs_ty}")
            except SortError as e:
                errors.append(str(e))
    else:
        if rule.head not in sig.predicates:
            return [f"unknown predicate {rule.head}"]
        want, _ = unarrow(sig.predicates[rule.head])
        if len(rule.args) != len(want):
            return [f"predicate {rule.head} expects {len(want)} arguments"]
        ctx = {}
        for a, w in zip(rule.args, want):
            if not pattern_first_order(a):
                return ["lambda not allowed in a rule left side"]
            try:
                infer_pattern_types(sig, a, w, ctx)
            except RuleError as e:
                return [str(e)]
        pat_fv = set()
        for a in rule.args:
            pat_fv |= free_vars(a)
        extra = formula_free_vars(rule.rhs) - pat_fv
        if extra:
            errors.append(f"right side has extra variables {sorted(extra)}")
        else:
            try:
                check_formula(sig, ctx, rule.rhs)
            except SortError as e:
                errors.append(str(e))
    return errors


def _pattern_ctx(sig: Signature, pat: Term, ctx: dict[str, Ty]) -> dict[str, Ty]:
    head, _ = spine(pat)
    if isinstance(head, Con) and head.name in sig.constants:
        want, res = unarrow(sig.constants[head.name])
        infer_pattern_types(sig, pat, _result_type(sig, pat), ctx)
    return ctx


def _result_type(sig: Signature, pat: Term) -> Ty:
    head, args = spine(pat)
    assert isinstance(head, Con)
    ty = sig.constants[head.name]
    for _ in args:
        if not isinstance(ty, Arrow):
            raise RuleError(f"constant {head.name} applied to too many arguments")
        ty = ty.right
    return ty


def validate_system(sig: Signature, rs: RewriteSystem,
                    trust: Optional[TrustLog] = None) -> list[str]:
    """All rule-shape errors; also records the assumed properties."""
    errors: list[str] = []
    for i, r in enumerate(itertools.chain(rs.term_rules, rs.atom_rules)):
        for e in validate_rule(sig, r):
            errors.append(f"rule {i}: {e}")
    if trust is not None:
        if rs.assumed_terminating and (rs.term_rules or rs.atom_rules):
            trust.add("assumed-terminating",
                      f"{len(rs.term_rules)} term rules, "
                      f"{len(rs.atom_rules)} atom rules")
        if rs.assumed_confluent and (rs.term_rules or rs.atom_rules):
            trust.add("assumed-confluent", "rewrite system as loaded")
    return errors


# ---------------------------------------------------------------- matching

def match_term(pattern: Term, subject: Term,
               bindings: Optional[dict[str, Term]] = None) -> Optional[dict[str, Term]]:
    """First-order syntactic matching; pattern variables are flexible.
    Repeated variables must match alpha-equal subterms."""
    if bindings is None:
        bindings = {}
    match pattern:
        case Var(name):
            if name in bindings:
                return bindings if alpha_eq(bindings[name], subject) else None
            bindings[name] = subject
            return bindings
        case Con(name):
            return bindings if subject == Con(name) else None
        case App(pf, pa):
            if not isinstance(subject, App):
                return None
            b = match_term(pf, subject.fn, bindings)
            if b is None:
                return None
            return match_term(pa, subject.arg, b)
        case Lam(_, _, _):
            return None
    raise TypeError(pattern)


def match_args(patterns: tuple[Term, ...], subjects: tuple[Term, ...]
               ) -> Optional[dict[str, Term]]:
    if len(patterns) != len(subjects):
        return None
    bindings: Optional[dict[str, Term]] = {}
    for p, s in zip(patterns, subjects):
        bindings = match_term(p, s, bindings)
        if bindings is None:
            return None
    return bindings


# ---------------------------------------------------------------- normalization

class _Budget:
    __slots__ = ("left",)

    def __init__(self, amount: int):
        self.left = amount

    def tick(self) -> None:
        if self.left <= 0:
            raise FuelError("rewrite fuel exhausted")
        self.left -= 1


def rw_normalize_term(rs: RewriteSystem, t: Term,
                      fuel: int = DEFAULT_REWRITE_FUEL) -> Term:
    budget = _Budget(fuel)
    t = beta_normalize(t)
    while True:
        r = _rewrite_once(rs, t)
        if r is None:
            return t
        budget.tick()
        t = beta_normalize(r)


def _rewrite_once(rs: RewriteSystem, t: Term) -> Optional[Term]:
    """One leftmost-innermost term-rule step, or None."""
    match t:
        case Var(_) | Con(_):
            pass
        case App(fn, arg):
            r = _rewrite_once(rs, fn)
            if r is not None:
                return App(r, arg)
            r = _rewrite_once(rs, arg)
            if r is not None:
                return App(fn, r)
        case Lam(var, var_ty, body):
            r = _rewrite_once(rs, body)
            if r is not None:
                return Lam(var, var_ty, r)
    for rule in rs.term_rules:
        b = match_term(rule.lhs, t)
        if b is not None:
            return subst_raw(rule.rhs, b)
    return None


def rw_normalize_formula(rs: RewriteSystem, f: Formula,
                         fuel: int = DEFAULT_REWRITE_FUEL) -> Formula:
    budget = _Budget(fuel)
    return _norm_formula(rs, f, budget)


def _norm_formula(rs: RewriteSystem, f: Formula, budget: _Budget) -> Formula:
    match f:
        case Top() | Bot():
            return f
        case Imp(l, r):
            return Imp(_norm_formula(rs, l, budget), _norm_formula(rs, r, budget))
        case And(l, r):
            return And(_norm_formula(rs, l, budget), _norm_formula(rs, r, budget))
        case Or(l, r):
            return Or(_norm_formula(rs, l, budget), _norm_formula(rs, r, budget))
        case All(v, ty, b):
            return All(v, ty, _norm_formula(rs, b, budget))
        case Ex(v, ty, b):
            return Ex(v, ty, _norm_formula(rs, b, budget))
        case Eq(l, r):
            return Eq(_norm_term(rs, l, budget), _norm_term(rs, r, budget))
        case Mu(op, args):
            return Mu(_norm_operator(rs, op, budget),
                      tuple(_norm_term(rs, a, budget) for a in args))
        case Nu(op, args):
            return Nu(_norm_operator(rs, op, budget),
                      tuple(_norm_term(rs, a, budget) for a in args))
        case PredVar(n, args):
            return PredVar(n, tuple(_norm_term(rs, a, budget) for a in args))
        case Atom(_, _):
            # chains of atom unfoldings loop here instead of recursing, so
            # a diverging recursive definition hits the fuel, not the stack
            while isinstance(f, Atom):
                args = tuple(_norm_term(rs, a, budget) for a in f.args)
                for rule in rs.atom_rules_for(f.name):
                    b = match_args(rule.args, args)
                    if b is not None:
                        budget.tick()
                        f = subst_formula(rule.rhs, TermSubst(b))
                        break
                else:
                    return Atom(f.name, args)
            return _norm_formula(rs, f, budget)
    raise TypeError(f)


def _norm_operator(rs: RewriteSystem, op: PredOperator, budget: _Budget
                   ) -> PredOperator:
    return PredOperator(op.pvar, op.pvar_ty, op.params,
                        _norm_formula(rs, op.body, budget))


def _norm_term(rs: RewriteSystem, t: Term, budget: _Budget) -> Term:
    t = beta_normalize(t)
    while True:
        r = _rewrite_once(rs, t)
        if r is None:
            return t
        budget.tick()
        t = beta_normalize(r)


# ---------------------------------------------------------------- congruence

def congruent_terms(rs: RewriteSystem, t: Term, u: Term,
                    fuel: int = DEFAULT_REWRITE_FUEL) -> bool:
    return alpha_eq(rw_normalize_term(rs, t, fuel),
                    rw_normalize_term(rs, u, fuel))


def congruent_formulas(rs: RewriteSystem, f: Formula, g: Formula,
                       fuel: int = DEFAULT_REWRITE_FUEL) -> bool:
    return alpha_eq_formula(rw_normalize_formula(rs, f, fuel),
                            rw_normalize_formula(rs, g, fuel))


def congruent(rs: RewriteSystem, a, b, fuel: int = DEFAULT_REWRITE_FUEL) -> bool:
    """Dispatch on terms versus formulas."""
    if isinstance(a, (Var, Con, App, Lam)):
        return congruent_terms(rs, a, b, fuel)
    return congruent_formulas(rs, a, b, fuel)


def assert_rw_normal_term(rs: RewriteSystem, t: Term) -> None:
    """Debug postcondition: no subterm matches any rule left side."""
    if _rewrite_once(rs, t) is not None:
        raise AssertionError(f"term not rewrite-normal: {t}")
