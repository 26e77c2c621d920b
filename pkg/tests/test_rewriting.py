"""Rewrite systems: validation, normalization, congruence, trust log."""
import pytest
from hypothesis import given, settings, strategies as st

from munj.errors import FuelError
from munj.formulas import (
    All, Atom, Eq, Imp, Mu, Or, PredOperator, PredVar, TOP, alpha_eq_formula,
    And, Ex,
)
from munj.rewriting import (
    AtomRule, RewriteSystem, TermRule, TrustLog, assert_rw_normal_term,
    congruent, congruent_formulas, congruent_terms, match_args, match_term,
    rw_normalize_formula, rw_normalize_term, validate_system,
)
from munj.terms import (
    App, Arrow, Base, Con, Lam, O, Signature, Var, alpha_eq, app, arrow,
)

NAT = Base("nat")
TM = Base("tm")
TY = Base("ty")

SIG = Signature(
    sorts=["nat", "tm", "ty"],
    constants={
        "0": NAT, "s": Arrow(NAT, NAT), "plus": arrow([NAT, NAT], NAT),
        "iota": TY, "arrow": arrow([TY, TY], TY),
        "app": arrow([TM, TM], TM), "abs": Arrow(Arrow(TM, TM), TM),
    },
    predicates={"sn": Arrow(TM, O), "red": arrow([TM, TY], O)},
)


def num(n):
    t = Con("0")
    for _ in range(n):
        t = App(Con("s"), t)
    return t


def plus(a, b):
    return app(Con("plus"), a, b)


PLUS_RULES = [
    TermRule(plus(Con("0"), Var("y")), Var("y")),
    TermRule(plus(App(Con("s"), Var("x")), Var("y")),
             App(Con("s"), plus(Var("x"), Var("y")))),
]

RED_RULES = [
    AtomRule("red", (Var("m"), Con("iota")), Atom("sn", (Var("m"),))),
    AtomRule("red", (Var("m"), app(Con("arrow"), Var("t"), Var("t1"))),
             All("n", TM, Imp(Atom("red", (Var("n"), Var("t"))),
                              Atom("red", (app(Con("app"), Var("m"), Var("n")),
                                           Var("t1")))))),
]

RS = RewriteSystem(PLUS_RULES, RED_RULES)


# ---------------------------------------------------------------- validation

def test_validate_ok():
    trust = TrustLog()
    assert validate_system(SIG, RS, trust) == []
    kinds = [k for k, _ in trust.entries]
    assert "assumed-terminating" in kinds and "assumed-confluent" in kinds


def test_validate_rejects_variable_lhs():
    bad = RewriteSystem([TermRule(Var("x"), Con("0"))])
    assert any("bare variable" in e for e in validate_system(SIG, bad))


def test_validate_rejects_lambda_lhs():
    bad = RewriteSystem([TermRule(App(Con("abs"), Lam("x", TM, Var("x"))),
                                  App(Con("abs"), Lam("x", TM, Var("x"))))])
    assert any("lambda" in e for e in validate_system(SIG, bad))


def test_validate_rejects_extra_rhs_vars():
    bad = RewriteSystem([TermRule(plus(Con("0"), Var("y")), Var("z"))])
    assert any("extra variables" in e for e in validate_system(SIG, bad))


def test_validate_rejects_type_change():
    bad = RewriteSystem([TermRule(plus(Con("0"), Var("y")), Con("iota"))])
    assert any("type-preserving" in e for e in validate_system(SIG, bad))


def test_validate_nonlinear_pattern_type_conflict():
    bad = RewriteSystem(
        [TermRule(plus(Var("x"), Var("x")), Var("x"))],
    )
    assert validate_system(SIG, bad) == []  # nonlinear but consistent is fine
    worse = RewriteSystem(
        [], [AtomRule("red", (Var("x"), Var("x")), TOP)])
    assert any("used at" in e for e in validate_system(SIG, worse))


# ---------------------------------------------------------------- matching

def test_match_term_basics():
    b = match_term(plus(App(Con("s"), Var("x")), Var("y")), plus(num(1), num(2)))
    assert b is not None and alpha_eq(b["x"], num(0)) and alpha_eq(b["y"], num(2))
    assert match_term(plus(Con("0"), Var("y")), plus(num(1), num(2))) is None


def test_match_nonlinear():
    assert match_args((Var("x"), Var("x")), (num(1), num(1))) is not None
    assert match_args((Var("x"), Var("x")), (num(1), num(2))) is None


# ---------------------------------------------------------------- normalization

def test_rw_normalize_term_derived():
    # Hand-stepped oracle:
    #   plus (s (s 0)) 0 -> s (plus (s 0) 0) -> s (s (plus 0 0)) -> s (s 0)
    assert alpha_eq(rw_normalize_term(RS, plus(num(2), Con("0"))), num(2))


def test_rw_normalize_interleaves_beta():
    # (lam x. plus x 0) (s 0)  beta-> plus (s 0) 0 -> s (plus 0 0) -> s 0
    t = App(Lam("x", NAT, plus(Var("x"), Con("0"))), num(1))
    assert alpha_eq(rw_normalize_term(RS, t), num(1))


def test_rw_normalize_is_innermost():
    sig = Signature(sorts=["nat"],
                    constants={"f": Arrow(NAT, NAT), "g": Arrow(NAT, NAT),
                               "0": NAT, "1": NAT})
    rs = RewriteSystem([
        TermRule(App(Con("g"), App(Con("f"), Var("x"))), Con("1")),
        TermRule(App(Con("f"), Var("x")), Con("0")),
    ])
    # innermost: f fires first, disabling the g rule
    got = rw_normalize_term(rs, App(Con("g"), App(Con("f"), Con("0"))))
    assert alpha_eq(got, App(Con("g"), Con("0")))


def test_rw_normalize_under_binder():
    t = Lam("x", NAT, plus(Con("0"), Var("x")))
    assert alpha_eq(rw_normalize_term(RS, t), Lam("x", NAT, Var("x")))


def test_rw_fuel():
    rs = RewriteSystem([TermRule(App(Con("s"), Var("x")),
                                 App(Con("s"), App(Con("s"), Var("x"))))])
    with pytest.raises(FuelError):
        rw_normalize_term(rs, num(1), fuel=100)


def test_rw_normalize_formula_atoms():
    # red m iota -> sn m
    f = Atom("red", (Var("m"), Con("iota")))
    assert alpha_eq_formula(rw_normalize_formula(RS, f), Atom("sn", (Var("m"),)))


def test_rw_normalize_formula_capture():
    # red n (arrow iota iota) -> forall n1. red n1 iota => red (app n n1) iota
    # the quantifier in the rule body must not capture the subject's n
    f = Atom("red", (Var("n"), app(Con("arrow"), Con("iota"), Con("iota"))))
    g = rw_normalize_formula(RS, f)
    want = All("k", TM, Imp(Atom("sn", (Var("k"),)),
                            Atom("sn", (app(Con("app"), Var("n"), Var("k")),))))
    assert alpha_eq_formula(g, want)


def test_congruent_derived_example():
    # red m (arrow iota iota) and forall n. sn n => sn (app m n) have the
    # same normal form
    lhs = Atom("red", (Var("m"), app(Con("arrow"), Con("iota"), Con("iota"))))
    rhs = All("n", TM, Imp(Atom("sn", (Var("n"),)),
                           Atom("sn", (app(Con("app"), Var("m"), Var("n")),))))
    assert congruent_formulas(RS, lhs, rhs)
    assert congruent(RS, lhs, rhs)


def test_congruent_terms_dispatch():
    assert congruent(RS, plus(num(1), num(1)), num(2))
    assert not congruent(RS, plus(num(1), num(1)), num(3))


def test_normal_forms_contain_no_redex():
    t = rw_normalize_term(RS, plus(num(3), plus(num(2), num(1))))
    assert_rw_normal_term(RS, t)


# formulas embedded under mu keep rewriting
def test_rw_normalize_inside_operator():
    op = PredOperator("N", Arrow(NAT, O), (("x", NAT),),
                      Or(Eq(Var("x"), plus(Con("0"), Con("0"))),
                         PredVar("N", (Var("x"),))))
    f = Mu(op, (plus(Con("0"), num(1)),))
    g = rw_normalize_formula(RS, f)
    assert isinstance(g, Mu)
    assert alpha_eq_formula(
        g, Mu(PredOperator("N", Arrow(NAT, O), (("x", NAT),),
                           Or(Eq(Var("x"), Con("0")), PredVar("N", (Var("x"),)))),
              (num(1),)))


# ---------------------------------------------------------------- properties

def _terms(depth):
    leaf = st.sampled_from([Con("0"), Var("x"), Var("y")])
    if depth == 0:
        return leaf
    sub = _terms(depth - 1)
    return st.one_of(
        leaf,
        sub.map(lambda t: App(Con("s"), t)),
        st.tuples(sub, sub).map(lambda p: plus(*p)),
    )


constructor_subst = st.fixed_dictionaries(
    {}, optional={"x": st.integers(0, 4).map(num), "y": st.integers(0, 4).map(num)})


@settings(max_examples=300, deadline=None)
@given(_terms(3), constructor_subst)
def test_congruence_stable_under_instantiation(t, sub):
    from munj.terms import TermSubst
    u = rw_normalize_term(RS, t)
    s = TermSubst(sub)
    assert congruent_terms(RS, s.apply(t), s.apply(u))


@settings(max_examples=300, deadline=None)
@given(_terms(3))
def test_normalize_idempotent(t):
    u = rw_normalize_term(RS, t)
    assert alpha_eq(rw_normalize_term(RS, u), u)
    assert_rw_normal_term(RS, u)
