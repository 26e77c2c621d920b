"""Admissibility checking for recursive predicate definitions.

A recursive definition extends the rewrite layer with rules of the form
a(t1..tn) ~> B where B may mention the newly defined predicates again.
Such an extension is admitted when two conditions hold:

1. Coherence: whenever two left-hand sides overlap, the corresponding
   bodies coincide up to the congruence.  Checked on syntactic root
   overlaps; left-hand sides outside the constructor fragment weaken the
   syntactic check, so they are admitted only with a recorded assumption.

2. Decrease: every atom of the defined family that may occur in a body,
   with quantifier-bound argument positions treated as arbitrary, lies
   strictly below the head in a user-declared well-founded order: a
   precedence on the defined predicates refined by a lexicographic
   sequence of subterm comparisons on argument positions.

"May occur" follows the universal reading: an occurrence stands for all
its instantiations, so a position mentioning a bound variable can never
witness a decrease nor preserve equality.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .errors import AdmitError, FuelError
from .formulas import (
    All, And, Atom, Bot, Eq, Ex, Formula, Imp, Mu, Nu, Or, PredVar, Top,
    subst_formula,
)
from .rewriting import (
    AtomRule, DEFAULT_REWRITE_FUEL, RewriteSystem, TrustLog,
    congruent_formulas, validate_system,
)
from .terms import App, Con, Lam, Signature, Term, TermSubst, Var, alpha_eq, \
    free_vars, fresh
from .unification import in_constructor_fragment, syntactic_mgu


class Star:
    """An argument position whose value ranges over all terms."""
    _instance: Optional["Star"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "*"


STAR = Star()

Pattern = Union[Term, Star]


@dataclass(frozen=True)
class MayOccurAtom:
    head: str
    args: tuple[Pattern, ...]

    def __str__(self) -> str:
        return " ".join([self.head] + [_show(a) for a in self.args])


@dataclass(frozen=True)
class Measure:
    """One lexicographic component: compare the argument at position
    (1-based); strict components may witness the decrease, weak ones only
    have to avoid growing."""
    position: int
    strict: bool = True


@dataclass(frozen=True)
class OrderSpec:
    measures: tuple[Measure, ...]
    precedence: tuple[str, ...] = ()

    def rank(self, head: str) -> Optional[int]:
        return self.precedence.index(head) if head in self.precedence \
            else None


def _show(p: Pattern) -> str:
    match p:
        case Star():
            return "*"
        case Var(n) | Con(n):
            return n
        case App(f, a):
            return f"({_show(f)} {_show(a)})"
        case Lam(v, _, b):
            return f"(\\{v}. {_show(b)})"
    raise TypeError(p)


# ---------------------------------------------------------------- may occur

def collect_may_occur(body: Formula, defined: frozenset[str] | set[str],
                      bound: frozenset[str] = frozenset()
                      ) -> list[MayOccurAtom]:
    """Every atomic occurrence of a defined predicate in body, argument
    positions generalized to Star when they mention a variable bound
    within body (by a quantifier or a fixed-point operator parameter)."""
    match body:
        case Top() | Bot() | Eq(_, _) | PredVar(_, _):
            return []
        case Atom(name, args):
            if name not in defined:
                return []
            pats = tuple(
                STAR if free_vars(a) & bound else a for a in args)
            return [MayOccurAtom(name, pats)]
        case Imp(l, r) | And(l, r) | Or(l, r):
            return (collect_may_occur(l, defined, bound)
                    + collect_may_occur(r, defined, bound))
        case All(v, _, b) | Ex(v, _, b):
            return collect_may_occur(b, defined, bound | {v})
        case Mu(op, _) | Nu(op, _):
            inner = bound | {n for n, _ in op.params}
            return collect_may_occur(op.body, defined, inner)
    raise TypeError(body)


# ---------------------------------------------------------------- ordering

def _occurs_at_or_below(p: Term, t: Term) -> bool:
    if alpha_eq(p, t):
        return True
    return _proper_subterm(p, t)


def _proper_subterm(p: Term, t: Term) -> bool:
    match t:
        case App(f, a):
            return _occurs_at_or_below(p, f) or _occurs_at_or_below(p, a)
        case Lam(v, _, b):
            # descending under a binder is sound only when the binder
            # cannot capture the candidate subterm
            return v not in free_vars(p) and _occurs_at_or_below(p, b)
    return False


def compare_patterns(occ: MayOccurAtom, head: str,
                     head_args: tuple[Term, ...],
                     order: OrderSpec) -> Optional[str]:
    """None when occ is strictly below the head atom for every
    instantiation; otherwise the reason it is not."""
    if occ.head != head:
        ro, rh = order.rank(occ.head), order.rank(head)
        if ro is not None and rh is not None and ro < rh:
            return None
        return (f"no precedence makes {occ.head} smaller than {head}")
    for m in order.measures:
        if not (1 <= m.position <= len(head_args)) \
                or m.position > len(occ.args):
            return f"measure position {m.position} out of range"
        h = head_args[m.position - 1]
        o = occ.args[m.position - 1]
        if isinstance(o, Star):
            return (f"argument {m.position} is quantifier-bound and "
                    "cannot witness or preserve the order")
        if alpha_eq(o, h):
            continue
        if _proper_subterm(o, h):
            if m.strict:
                return None
            continue
        return (f"argument {m.position} ({_show(o)}) is not a subterm "
                f"of the head argument ({_show(h)})")
    return "no measure strictly decreases"


# ---------------------------------------------------------------- conditions

@dataclass
class Report:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _rename_apart(rule: AtomRule, taken: set[str]) -> AtomRule:
    vs = set().union(*(free_vars(a) for a in rule.args)) if rule.args \
        else set()
    sub = {}
    avoid = set(taken)
    for v in sorted(vs):
        nv = fresh(v, avoid)
        avoid.add(nv)
        sub[v] = Var(nv)
    theta = TermSubst(sub)
    return AtomRule(rule.head, tuple(theta.apply(a) for a in rule.args),
                    subst_formula(rule.rhs, theta))


def check_condition_1(rs: RewriteSystem, rules: Iterable[AtomRule],
                      fuel: int = DEFAULT_REWRITE_FUEL) -> Report:
    """Coherence of root overlaps among the given rules, under the
    congruence of rs (which should already include the rules).  Also
    flags non-constructor left-hand sides: on those, root overlaps no
    longer cover all overlaps modulo the term theory."""
    rules = list(rules)
    report = Report()
    for r in rules:
        for k, a in enumerate(r.args, 1):
            if not in_constructor_fragment(rs, a):
                report.warnings.append(
                    f"{r.head}: left-hand argument {k} ({_show(a)}) is "
                    "outside the constructor fragment; coherence modulo "
                    "the term rules is assumed, not checked")
    for i, ri in enumerate(rules):
        taken = set().union(*(free_vars(a) for a in ri.args)) \
            if ri.args else set()
        for rj in rules[i:]:
            if ri.head != rj.head:
                continue
            rj = _rename_apart(rj, taken)
            mgu = syntactic_mgu(list(zip(ri.args, rj.args)))
            if mgu is None:
                continue
            bi = subst_formula(ri.rhs, mgu)
            bj = subst_formula(rj.rhs, mgu)
            try:
                same = congruent_formulas(rs, bi, bj, fuel)
            except (FuelError, RecursionError):
                report.violations.append(
                    f"{ri.head}: could not verify coherence of an "
                    "overlap within the rewrite budget")
                continue
            if not same:
                report.violations.append(
                    f"{ri.head}: overlapping left-hand sides with "
                    f"unifier {mgu.map} have incongruent bodies")
    return report


def check_condition_2(rules: Iterable[AtomRule],
                      order: OrderSpec) -> Report:
    """Strict decrease from every head to every atom of the defined
    family that may occur in its body."""
    rules = list(rules)
    defined = frozenset(r.head for r in rules)
    report = Report()
    for r in rules:
        for occ in collect_may_occur(r.rhs, defined):
            reason = compare_patterns(occ, r.head, r.args, order)
            if reason is not None:
                head = MayOccurAtom(r.head, r.args)
                report.violations.append(
                    f"in the rule for {head}: occurrence {occ} does not "
                    f"decrease: {reason}")
    return report


# ---------------------------------------------------------------- admission

def admit(sig: Signature, rs: RewriteSystem, rules: Iterable[AtomRule],
          order: OrderSpec, trust: Optional[TrustLog] = None,
          fuel: int = DEFAULT_REWRITE_FUEL) -> RewriteSystem:
    """Check both admissibility conditions and return the extended
    system.  Raises AdmitError with the full report on any violation;
    assumption-grade findings go to the trust log."""
    rules = tuple(rules)
    if not rules:
        raise AdmitError("empty recursive definition")
    defined = {r.head for r in rules}
    for name in sorted(defined):
        if rs.atom_rules_for(name):
            raise AdmitError(
                f"predicate {name} already has rewrite rules; recursive "
                "definitions must introduce fresh predicates")
    shape_errors = validate_system(sig, RewriteSystem(atom_rules=rules))
    if shape_errors:
        raise AdmitError("; ".join(shape_errors))
    extended = rs.with_rules(atom_rules=rules)
    # decrease first: it is what makes the coherence check's normalization
    # of instantiated bodies terminate
    c2 = check_condition_2(rules, order)
    if not c2.ok:
        raise AdmitError("\n".join(c2.violations))
    c1 = check_condition_1(extended, rules, fuel)
    if not c1.ok:
        raise AdmitError("\n".join(c1.violations))
    if trust is not None:
        heads = ", ".join(sorted(defined))
        trust.add("RecursiveDefinition",
                  f"admitted {len(rules)} rule(s) for {heads} under the "
                  "declared well-founded order")
        for w in c1.warnings:
            trust.add("AssumedCoherent", w)
    return extended
