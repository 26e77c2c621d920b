"""Admissibility of recursive definitions: may-occur extraction, the
declared termination order, coherence of overlaps, and end-to-end admission
with the resulting rewrite behavior."""
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from munj.errors import AdmitError
from munj.formulas import (
    All, And, Atom, Bot, Eq, Ex, Imp, Mu, Or, PredOperator, PredVar, Top,
)
from munj.recdefs import (
    STAR, MayOccurAtom, Measure, OrderSpec, Star, admit, check_condition_1,
    check_condition_2, collect_may_occur, compare_patterns,
    _proper_subterm,
)
from munj.rewriting import (
    AtomRule, EMPTY_SYSTEM, RewriteSystem, TermRule, TrustLog,
    rw_normalize_formula, validate_system,
)
from munj.terms import (
    App, Arrow, Base, Con, Lam, O, Signature, TermSubst, Var, alpha_eq,
    app, free_vars,
)

from tests.test_checker import IOTA, num

TM, TY = Base("tm"), Base("ty")


def ack_sig():
    return (Signature()
            .with_sort("iota")
            .with_constant("0", IOTA)
            .with_constant("s", Arrow(IOTA, IOTA))
            .with_predicate("ack", Arrow(IOTA, Arrow(IOTA, Arrow(IOTA, O)))))


def ack_rules():
    x, y, z, r = Var("x"), Var("y"), Var("z"), Var("r")
    s = lambda t: App(Con("s"), t)
    return (
        AtomRule("ack", (Con("0"), x, s(x)), Top()),
        AtomRule("ack", (s(x), Con("0"), y),
                 Atom("ack", (x, s(Con("0")), y))),
        AtomRule("ack", (s(x), s(y), z),
                 Ex("r", IOTA, And(Atom("ack", (s(x), y, r)),
                                   Atom("ack", (x, r, z))))),
    )


ACK_ORDER = OrderSpec((Measure(1), Measure(2)))


def red_sig():
    return (Signature()
            .with_sort("tm")
            .with_sort("ty")
            .with_constant("iota", TY)
            .with_constant("arrow", Arrow(TY, Arrow(TY, TY)))
            .with_constant("app", Arrow(TM, Arrow(TM, TM)))
            .with_constant("abs", Arrow(Arrow(TM, TM), TM))
            .with_predicate("sn", Arrow(TM, O))
            .with_predicate("red", Arrow(TM, Arrow(TY, O))))


def red_rules():
    m, t, t2, n = Var("m"), Var("t"), Var("t2"), Var("n")
    return (
        AtomRule("red", (m, Con("iota")), Atom("sn", (m,))),
        AtomRule("red", (m, app(Con("arrow"), t, t2)),
                 All("n", TM, Imp(Atom("red", (n, t)),
                                  Atom("red", (app(Con("app"), m, n),
                                               t2))))),
    )


RED_ORDER = OrderSpec((Measure(2),))


# ---------------------------------------------------------------- may occur

def test_may_occur_existential_marks_bound_positions():
    body = ack_rules()[2].rhs
    occs = collect_may_occur(body, {"ack"})
    s = lambda t: App(Con("s"), t)
    assert occs == [
        MayOccurAtom("ack", (s(Var("x")), Var("y"), STAR)),
        MayOccurAtom("ack", (Var("x"), STAR, Var("z"))),
    ]


def test_may_occur_universal_marks_bound_positions():
    body = red_rules()[1].rhs
    occs = collect_may_occur(body, {"red"})
    assert occs == [
        MayOccurAtom("red", (STAR, Var("t"))),
        MayOccurAtom("red", (STAR, Var("t2"))),
    ]


def test_may_occur_skips_undefined_and_predicate_variables():
    body = red_rules()[0].rhs
    assert collect_may_occur(body, {"red"}) == []
    wrapped = Mu(PredOperator("Q", O, (),
                              Imp(Atom("a", (Var("n"),)), PredVar("Q", ()))),
                 ())
    assert collect_may_occur(wrapped, {"a"}) == [
        MayOccurAtom("a", (Var("n"),))]


def test_may_occur_operator_params_bind():
    op = PredOperator("p", Arrow(IOTA, O), (("y", IOTA),),
                      Atom("a", (Var("y"), Var("n"))))
    body = Mu(op, (Var("n"),))
    assert collect_may_occur(body, {"a"}) == [
        MayOccurAtom("a", (STAR, Var("n")))]


def test_star_is_a_singleton():
    assert Star() is STAR


# ---------------------------------------------------------------- ordering

def test_compare_lexicographic_skips_equal_first():
    s = lambda t: App(Con("s"), t)
    head = (s(Var("x")), s(Var("y")), Var("z"))
    occ = MayOccurAtom("ack", (s(Var("x")), Var("y"), STAR))
    assert compare_patterns(occ, "ack", head, ACK_ORDER) is None


def test_compare_first_position_witnesses_then_ignores_star():
    s = lambda t: App(Con("s"), t)
    head = (s(Var("x")), s(Var("y")), Var("z"))
    occ = MayOccurAtom("ack", (Var("x"), STAR, Var("z")))
    assert compare_patterns(occ, "ack", head, ACK_ORDER) is None


def test_compare_star_blocks_before_witness():
    head = (App(Con("s"), Var("x")),)
    occ = MayOccurAtom("a", (STAR,))
    reason = compare_patterns(occ, "a", head, OrderSpec((Measure(1),)))
    assert reason is not None and "quantifier-bound" in reason


def test_compare_equal_everywhere_fails():
    head = (App(Con("s"), Var("n")),)
    occ = MayOccurAtom("a", (App(Con("s"), Var("n")),))
    reason = compare_patterns(occ, "a", head, OrderSpec((Measure(1),)))
    assert reason is not None and "no measure" in reason


def test_compare_weak_measure_cannot_witness():
    head = (App(Con("s"), Var("n")),)
    occ = MayOccurAtom("a", (Var("n"),))
    weak = OrderSpec((Measure(1, strict=False),))
    assert compare_patterns(occ, "a", head, weak) is not None
    strict = OrderSpec((Measure(1, strict=True),))
    assert compare_patterns(occ, "a", head, strict) is None


def test_compare_precedence_between_predicates():
    order = OrderSpec((), precedence=("low", "high"))
    occ = MayOccurAtom("low", (Var("x"),))
    assert compare_patterns(occ, "high", (Var("x"),), order) is None
    occ2 = MayOccurAtom("high", (Var("x"),))
    assert compare_patterns(occ2, "low", (Var("x"),), order) is not None


def test_binder_guard_in_subterm_check():
    # x occurs textually inside (\x. x) but only as the bound variable
    lam = Lam("x", TM, Var("x"))
    assert not _proper_subterm(Var("x"), lam)
    assert _proper_subterm(Var("y"), Lam("x", TM, App(Var("x"), Var("y"))))


# ---------------------------------------------------------------- condition 1

def test_incoherent_pair_rejected():
    sig = (Signature().with_sort("iota")
           .with_constant("0", IOTA)
           .with_constant("s", Arrow(IOTA, IOTA))
           .with_predicate("a", Arrow(IOTA, O)))
    rules = (AtomRule("a", (Var("x"),), Top()),
             AtomRule("a", (Con("0"),), Bot()))
    rs = EMPTY_SYSTEM.with_rules(atom_rules=rules)
    report = check_condition_1(rs, rules)
    assert not report.ok
    assert "incongruent" in report.violations[0]
    with pytest.raises(AdmitError):
        admit(sig, EMPTY_SYSTEM, rules, OrderSpec((Measure(1),)))


def test_condition_1_symmetric():
    rules = (AtomRule("a", (Var("x"),), Top()),
             AtomRule("a", (Con("0"),), Bot()))
    rs = EMPTY_SYSTEM.with_rules(atom_rules=rules)
    fwd = check_condition_1(rs, rules)
    bwd = check_condition_1(rs, tuple(reversed(rules)))
    assert fwd.ok == bwd.ok == False


def test_disjoint_heads_coherent():
    rs = EMPTY_SYSTEM.with_rules(atom_rules=red_rules())
    assert check_condition_1(rs, red_rules()).ok


def test_nonlinear_self_overlap_is_coherent():
    rules = (AtomRule("a", (Var("x"), Var("x")),
                      Eq(Var("x"), Var("x"))),)
    rs = EMPTY_SYSTEM.with_rules(atom_rules=rules)
    report = check_condition_1(rs, rules)
    assert report.ok and not report.warnings


def test_nonconstructor_pattern_warns():
    sig = (Signature().with_sort("iota")
           .with_constant("0", IOTA)
           .with_constant("times", Arrow(IOTA, Arrow(IOTA, IOTA)))
           .with_predicate("a", Arrow(IOTA, O))
           .with_predicate("b", Arrow(IOTA, O)))
    base = RewriteSystem(term_rules=(
        TermRule(app(Con("times"), Con("0"), Var("x")), Con("0")),))
    rules = (AtomRule("a", (app(Con("times"), Con("0"), Var("x")),),
                      Atom("b", (Var("x"),))),)
    trust = TrustLog()
    extended = admit(sig, base, rules, OrderSpec((Measure(1),)),
                     trust=trust)
    kinds = [k for k, _ in trust.entries]
    assert "RecursiveDefinition" in kinds
    assert "AssumedCoherent" in kinds
    report = check_condition_1(extended, rules)
    assert report.ok and report.warnings


# ---------------------------------------------------------------- admission

def test_ackermann_admitted_and_computes():
    sig = ack_sig()
    trust = TrustLog()
    rs = admit(sig, EMPTY_SYSTEM, ack_rules(), ACK_ORDER, trust=trust)
    assert len(rs.atom_rules) == 3
    assert any(k == "RecursiveDefinition" for k, _ in trust.entries)
    # ack 1 0 2: second rule then first
    atom = Atom("ack", (num(1), num(0), num(2)))
    assert rw_normalize_formula(rs, atom) == Top()


def test_ackermann_third_rule_unfolds():
    rs = admit(ack_sig(), EMPTY_SYSTEM, ack_rules(), ACK_ORDER)
    atom = Atom("ack", (num(1), num(1), Var("z")))
    out = rw_normalize_formula(rs, atom)
    assert isinstance(out, Ex)


def test_red_admitted_and_unfolds_to_sn():
    rs = admit(red_sig(), EMPTY_SYSTEM, red_rules(), RED_ORDER)
    arrow_ty = app(Con("arrow"), Con("iota"), Con("iota"))
    atom = Atom("red", (Var("m"), arrow_ty))
    out = rw_normalize_formula(rs, atom)
    want = All("n", TM, Imp(Atom("sn", (Var("n"),)),
                            Atom("sn", (app(Con("app"), Var("m"),
                                            Var("n")),))))
    assert out == want


def test_self_reference_rejected_then_mu_wrapped_admitted():
    sig = (Signature().with_sort("iota")
           .with_constant("0", IOTA)
           .with_constant("s", Arrow(IOTA, IOTA))
           .with_predicate("a", Arrow(IOTA, O)))
    n = Var("n")
    sn = App(Con("s"), n)
    raw = (AtomRule("a", (sn,),
                    Imp(Atom("a", (n,)), Atom("a", (sn,)))),)
    with pytest.raises(AdmitError) as e:
        admit(sig, EMPTY_SYSTEM, raw, OrderSpec((Measure(1),)))
    assert "does not decrease" in str(e.value)

    wrapped = (AtomRule("a", (sn,),
                        Mu(PredOperator("Q", O, (),
                                        Imp(Atom("a", (n,)),
                                            PredVar("Q", ()))), ())),)
    rs = admit(sig, EMPTY_SYSTEM, wrapped, OrderSpec((Measure(1),)))
    assert len(rs.atom_rules) == 1


def test_reflexive_rule_rejected():
    sig = (Signature().with_sort("iota")
           .with_constant("0", IOTA)
           .with_predicate("a", Arrow(IOTA, O)))
    rules = (AtomRule("a", (Var("x"),), Atom("a", (Var("x"),))),)
    with pytest.raises(AdmitError):
        admit(sig, EMPTY_SYSTEM, rules, OrderSpec((Measure(1),)))


def test_redefinition_rejected():
    sig = ack_sig()
    rs = admit(sig, EMPTY_SYSTEM, ack_rules(), ACK_ORDER)
    with pytest.raises(AdmitError) as e:
        admit(sig, rs, ack_rules()[:1], ACK_ORDER)
    assert "already has rewrite rules" in str(e.value)


def test_empty_definition_rejected():
    with pytest.raises(AdmitError):
        admit(ack_sig(), EMPTY_SYSTEM, (), ACK_ORDER)


def test_admission_monotone_in_evidence():
    sig = ack_sig()
    rules = ack_rules()
    for k in range(1, len(rules) + 1):
        for subset in itertools.combinations(rules, k):
            rs = admit(sig, EMPTY_SYSTEM, subset, ACK_ORDER)
            assert len(rs.atom_rules) == k


# ---------------------------------------------------------------- shadow

def ground_iota(draw, depth=3):
    return num(draw(st.integers(min_value=0, max_value=depth)))


def ground_decrease(occ_args, head_args, order):
    """The executable shadow of the symbolic comparison: both sides fully
    ground, decided by actual subterm tests."""
    for m in order.measures:
        h, o = head_args[m.position - 1], occ_args[m.position - 1]
        if alpha_eq(o, h):
            continue
        if _proper_subterm(o, h):
            if m.strict:
                return True
            continue
        return False
    return False


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_admitted_ack_decreases_on_ground_instances(data):
    for rule in ack_rules():
        names = set()
        for a in rule.args:
            names |= free_vars(a)
        theta = TermSubst({n: ground_iota(data.draw)
                           for n in sorted(names)})
        head_args = tuple(theta.apply(a) for a in rule.args)
        for occ in collect_may_occur(rule.rhs, {"ack"}):
            inst = tuple(ground_iota(data.draw) if isinstance(a, Star)
                         else theta.apply(a) for a in occ.args)
            assert ground_decrease(inst, head_args, ACK_ORDER)
