"""Unification: constructor-fragment CSUs, matching, factoring."""
import itertools

import pytest

from munj.errors import DemandAnnotation
from munj.rewriting import RewriteSystem, TermRule
from munj.terms import (
    App, Arrow, Base, Con, Signature, TermSubst, Var, alpha_eq, app, arrow,
    subst_eq,
)
from munj.unification import (
    Completeness, CsuResult, enumerate_unifiers_brute, factor_subst, fo_unify,
    in_constructor_fragment, match, subsumed_by, syntactic_mgu,
)

NAT = Base("nat")


def num(n):
    t = Con("0")
    for _ in range(n):
        t = App(Con("s"), t)
    return t


def plus(a, b):
    return app(Con("plus"), a, b)


RS = RewriteSystem([
    TermRule(plus(Con("0"), Var("y")), Var("y")),
    TermRule(plus(App(Con("s"), Var("x")), Var("y")),
             App(Con("s"), plus(Var("x"), Var("y")))),
])


# ---------------------------------------------------------------- fragment

def test_constructor_fragment():
    assert in_constructor_fragment(RS, App(Con("s"), Var("x")))
    assert not in_constructor_fragment(RS, plus(Var("x"), Var("y")))
    from munj.terms import Lam
    assert not in_constructor_fragment(RS, Lam("x", NAT, Var("x")))


# ---------------------------------------------------------------- fo_unify

def test_unify_derived_example():
    # Oracle: brute-force over all substitutions mapping x into small numerals
    # agrees that [x := 0] generates every unifier of s x and s 0.
    res = fo_unify(RS, App(Con("s"), Var("x")), num(1))
    assert res.completeness is Completeness.COMPLETE
    assert len(res.unifiers) == 1
    assert subst_eq(res.unifiers[0], TermSubst({"x": Con("0")}))


def test_unify_occurs_check():
    res = fo_unify(RS, Var("x"), App(Con("s"), Var("x")))
    assert res.unifiers == ()
    assert res.completeness is Completeness.COMPLETE


def test_unify_clash():
    res = fo_unify(RS, Con("0"), num(1))
    assert res.unifiers == ()


def test_unify_variable_pair():
    res = fo_unify(RS, Var("x"), Var("y"))
    assert len(res.unifiers) == 1


def test_unify_demands_annotation_outside_fragment():
    with pytest.raises(DemandAnnotation):
        fo_unify(RS, plus(Var("x"), Var("y")), num(2))


def test_unify_nonlinear():
    # f x x  vs  f 0 (s 0) has no unifier; via pairs encoded with s/plus-free
    pair = app(Con("pair2"), Var("x"), Var("x"))
    sig_rs = RewriteSystem()
    res = fo_unify(sig_rs, pair, app(Con("pair2"), Con("0"), num(1)))
    assert res.unifiers == ()


# ---------------------------------------------------------------- mgu details

def test_syntactic_mgu_chains():
    s = syntactic_mgu([(Var("x"), App(Con("s"), Var("y"))), (Var("y"), Con("0"))])
    assert s is not None
    assert alpha_eq(s.apply(Var("x")), num(1))


# ---------------------------------------------------------------- matching

def test_match_normalizes_first():
    # subject plus 0 (s 0) normalizes to s 0 and then matches s x
    got = match(RS, App(Con("s"), Var("x")), plus(Con("0"), num(1)))
    assert got is not None and alpha_eq(got.get("x"), Con("0"))


# ---------------------------------------------------------------- factoring

def test_factor_subst_derived():
    # theta = [x := s 0, y := 0], theta_i = [x := s y]:
    # matching x: pattern s y against s 0 gives y := 0; matching y is
    # consistent, so theta'' = [y := 0].
    theta = TermSubst({"x": num(1), "y": Con("0")})
    theta_i = TermSubst({"x": App(Con("s"), Var("y"))})
    out = factor_subst(RS, theta, theta_i)
    assert out is not None
    assert subst_eq(out, TermSubst({"y": Con("0")}))


def test_factor_subst_failure():
    theta = TermSubst({"x": Con("0")})
    theta_i = TermSubst({"x": App(Con("s"), Var("y"))})
    assert factor_subst(RS, theta, theta_i) is None


def test_factor_subst_renaming():
    # the identity factors through a renaming: [] = [y/x] . [x/y]
    theta = TermSubst({})
    theta_i = TermSubst({"x": Var("y")})
    out = factor_subst(RS, theta, theta_i)
    assert out is not None
    assert alpha_eq(out.apply(Var("y")), Var("x"))


def test_subsumed_by():
    gen = TermSubst({"x": App(Con("s"), Var("y"))})
    inst = TermSubst({"x": num(2), "y": num(1)})
    assert subsumed_by(RS, gen, inst)
    assert not subsumed_by(RS, inst, gen)


# ---------------------------------------------------------------- oracle sweep

def _all_terms(depth, vars=("x", "y")):
    """Every term over {0, s} and vars up to the given construction depth."""
    level = [Con("0")] + [Var(v) for v in vars]
    out = list(level)
    for _ in range(depth - 1):
        level = [App(Con("s"), t) for t in level]
        out.extend(level)
    return out


def test_fo_unify_subsumes_brute_force():
    """Acceptance-style sweep at small scale: every brute-force unifier of
    every constructor pair is an instance of the computed MGU."""
    terms = _all_terms(3)
    candidates = _all_terms(3)
    rs = RewriteSystem()
    checked = 0
    for u, v in itertools.product(terms, repeat=2):
        res = fo_unify(rs, u, v)
        brute = enumerate_unifiers_brute(rs, u, v, ["x", "y"], candidates)
        if res.unifiers == ():
            assert brute == [], (u, v)
        else:
            mgu = res.unifiers[0]
            for b in brute:
                assert subsumed_by(rs, mgu, b), (u, v, b)
        checked += 1
    assert checked == len(terms) ** 2
