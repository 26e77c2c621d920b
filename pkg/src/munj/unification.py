"""Unification modulo the congruence, restricted to the decidable fragment.

On the constructor fragment (first-order terms whose constants never head a
term-rule left side) the congruence collapses to alpha-equality, so the
syntactic most-general unifier is a complete singleton CSU and
non-unifiability is definitive.  Outside the fragment the caller must supply
an explicit CSU; those are checked for soundness only and logged as
AssumedComplete.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Optional

from .errors import DemandAnnotation
from .rewriting import (
    DEFAULT_REWRITE_FUEL, RewriteSystem, match_term, rw_normalize_term,
)
from .terms import App, Con, Lam, Term, TermSubst, Var, alpha_eq, free_vars, spine


class Completeness(enum.Enum):
    COMPLETE = "Complete"
    ASSUMED = "AssumedComplete"


@dataclass(frozen=True)
class CsuResult:
    unifiers: tuple[TermSubst, ...]
    completeness: Completeness


def in_constructor_fragment(rs: RewriteSystem, t: Term) -> bool:
    """First-order, every application headed by a constructor constant."""
    match t:
        case Var(_):
            return True
        case Con(name):
            return rs.is_constructor(name)
        case App(_, _):
            head, args = spine(t)
            if not isinstance(head, Con) or not rs.is_constructor(head.name):
                return False
            return all(in_constructor_fragment(rs, a) for a in args)
        case Lam(_, _, _):
            return False
    raise TypeError(t)


def syntactic_mgu(pairs: list[tuple[Term, Term]]) -> Optional[TermSubst]:
    """Plain first-order unification with occurs check; None if none exists.
    Input terms must be lambda-free."""
    subst: dict[str, Term] = {}
    work = list(pairs)

    def resolve(t: Term) -> Term:
        while isinstance(t, Var) and t.name in subst:
            t = subst[t.name]
        return t

    def apply(t: Term) -> Term:
        t = resolve(t)
        if isinstance(t, App):
            return App(apply(t.fn), apply(t.arg))
        return t

    while work:
        a, b = work.pop()
        a, b = resolve(a), resolve(b)
        match a, b:
            case Var(x), Var(y) if x == y:
                continue
            case Var(x), _:
                if x in free_vars(apply(b)):
                    return None
                subst[x] = b
            case _, Var(y):
                if y in free_vars(apply(a)):
                    return None
                subst[y] = a
            case Con(x), Con(y):
                if x != y:
                    return None
            case App(f1, a1), App(f2, a2):
                work.append((f1, f2))
                work.append((a1, a2))
            case _:
                return None
    # flatten to an idempotent substitution
    return TermSubst({x: apply(Var(x)) for x in subst})


def fo_unify(rs: RewriteSystem, u: Term, v: Term,
             fuel: int = DEFAULT_REWRITE_FUEL) -> CsuResult:
    """Complete CSU of u and v modulo the congruence, or DemandAnnotation.

    pre: u, v rewrite-normalized.  Result is a singleton MGU or empty.
    """
    if not (in_constructor_fragment(rs, u) and in_constructor_fragment(rs, v)):
        raise DemandAnnotation(
            f"cannot decide unification of {u} and {v}: outside the "
            "constructor fragment; supply an explicit CSU")
    mgu = syntactic_mgu([(u, v)])
    if mgu is None:
        return CsuResult((), Completeness.COMPLETE)
    # soundness re-check of the produced unifier
    assert alpha_eq(mgu.apply(u), mgu.apply(v))
    return CsuResult((mgu,), Completeness.COMPLETE)


def match(rs: RewriteSystem, pattern: Term, subject: Term,
          fuel: int = DEFAULT_REWRITE_FUEL) -> Optional[TermSubst]:
    """One-sided syntactic matching after normalizing both inputs."""
    p = rw_normalize_term(rs, pattern, fuel)
    s = rw_normalize_term(rs, subject, fuel)
    b = match_term(p, s)
    return None if b is None else TermSubst(b)


def factor_subst(rs: RewriteSystem, theta: TermSubst, theta_i: TermSubst,
                 fuel: int = DEFAULT_REWRITE_FUEL) -> Optional[TermSubst]:
    """theta'' with x.theta_i.theta'' congruent to x.theta for every x in
    dom(theta) u dom(theta_i), computed by simultaneous first-order matching
    of {x.theta_i |-> x.theta}; None when no such syntactic factoring exists.
    """
    domain = sorted(theta.domain() | theta_i.domain())
    bindings: Optional[dict[str, Term]] = {}
    for x in domain:
        pat = rw_normalize_term(rs, theta_i.get(x), fuel)
        sub = rw_normalize_term(rs, theta.get(x), fuel)
        bindings = match_term(pat, sub, bindings)
        if bindings is None:
            return None
    out = TermSubst(bindings)
    for x in domain:
        if not alpha_eq(rw_normalize_term(rs, out.apply(theta_i.get(x)), fuel),
                        rw_normalize_term(rs, theta.get(x), fuel)):
            return None
    return out


def subsumed_by(rs: RewriteSystem, general: TermSubst, instance: TermSubst,
                fuel: int = DEFAULT_REWRITE_FUEL) -> bool:
    """True when instance = general . theta'' for some theta''."""
    return factor_subst(rs, instance, general, fuel) is not None


def enumerate_unifiers_brute(rs: RewriteSystem, u: Term, v: Term,
                             variables: list[str], candidates: list[Term],
                             fuel: int = DEFAULT_REWRITE_FUEL
                             ) -> list[TermSubst]:
    """All unifiers with ranges drawn from candidates; an independent oracle
    for fo_unify completeness tests (exponential, test-sized inputs only)."""
    from .rewriting import congruent_terms
    out = []
    for images in itertools.product(candidates, repeat=len(variables)):
        s = TermSubst(dict(zip(variables, images)))
        if congruent_terms(rs, s.apply(u), s.apply(v), fuel):
            out.append(s)
    return out
