"""Derived rule builders: introduction and induction for the standard unary
inductive predicate over a zero/successor signature, and equality transport.

Everything here only constructs proof terms; nothing is trusted.  The kernel
re-checks every construction.
"""
from __future__ import annotations

from .formulas import (
    All, And, Eq, Ex, Formula, Imp, Mu, MuPred, Or, Pred, PredAbs,
    PredOperator, PredVar, apply_pred, pred_free_vars,
)
from .proofs import (
    Asc, Case, Context, EqCase, ExCase, Fst, Inl, Inr, MuElim, MuIntro,
    PApp, PLam, Pair, PrfVar, ProofSubst, ProofTerm, Refl, Snd, TApp, TLam,
    Wit, proof_free_term_vars,
)
from .terms import App, Arrow, Base, Con, O, Term, TermSubst, Var, free_vars, fresh

IOTA = Base("iota")


def unary_nat_operator(zero: str = "0", succ: str = "s",
                       sort: Base = IOTA) -> PredOperator:
    """lam p. lam x. x = zero \\/ exists y. x = succ y /\\ p y"""
    return PredOperator(
        "p", Arrow(sort, O), (("x", sort),),
        Or(Eq(Var("x"), Con(zero)),
           Ex("y", sort, And(Eq(Var("x"), App(Con(succ), Var("y"))),
                             PredVar("p", (Var("y"),))))))


def nat_formula(t: Term, op: PredOperator | None = None) -> Formula:
    return Mu(op or unary_nat_operator(), (t,))


# ---------------------------------------------------------------- intros

def nat_zero_proof(op: PredOperator | None = None,
                   zero: str = "0") -> tuple[ProofTerm, Formula]:
    """Proof of (nat zero) by one unfolding."""
    op = op or unary_nat_operator(zero=zero)
    z = Con(zero)
    return MuIntro(op, (z,), Inl(Refl(z))), nat_formula(z, op)


def nat_succ_proof(op: PredOperator | None = None, succ: str = "s",
                   sort: Base = IOTA) -> tuple[ProofTerm, Formula]:
    """Proof of (forall x. nat x -> nat (succ x))."""
    op = op or unary_nat_operator(succ=succ)
    x = Var("x")
    sx = App(Con(succ), x)
    goal = All("x", sort, Imp(nat_formula(x, op), nat_formula(sx, op)))
    pi = TLam("x", PLam("h", MuIntro(
        op, (sx,),
        Inr(Wit(x, Pair(Refl(sx), PrfVar("h"))))),
        ann=goal.body), ann=goal)
    return pi, goal


# ---------------------------------------------------------------- transport

def transport(p: Pred, u: Term, v: Term, eq: ProofTerm,
              body: ProofTerm) -> EqCase:
    """From eq : u = v and body : p u, a proof of p v.

    Encoded with the closed-world eliminator over two suspended variables,
    whose unification problem has the singleton most general unifier that
    collapses them.
    """
    taken = pred_free_vars(p) | free_vars(u) | free_vars(v) \
        | proof_free_term_vars(eq) | proof_free_term_vars(body)
    xl = fresh("el", taken)
    xr = fresh("er", taken | {xl})
    return EqCase(
        ctx0=Context([("h0", apply_pred(p, (Var(xl),)))]),
        theta=TermSubst({xl: u, xr: v}),
        sigma=ProofSubst({"h0": body}),
        lhs=Var(xl),
        rhs=Var(xr),
        motive=apply_pred(p, (Var(xr),)),
        major=eq,
        branches=((TermSubst({xl: Var(xr)}), PrfVar("h0")),),
    )


# ---------------------------------------------------------------- induction

def induction(p: Pred, base: ProofTerm, step: ProofTerm,
              with_nat_hyp: bool = False,
              op: PredOperator | None = None,
              zero: str = "0", succ: str = "s",
              sort: Base = IOTA) -> tuple[ProofTerm, Formula]:
    """Structural induction packaged as a fixed-point elimination.

    base : p zero
    step : forall z. p z -> p (succ z)           (plain)
    step : forall z. nat z /\\ p z -> p (succ z)  (with_nat_hyp)

    Returns a proof of (forall x. nat x -> p x) together with that formula.
    The case split on the unfolding feeds each constructor case to the
    closed-world equality eliminator, so base and step enter through the
    suspended context rather than being spliced into branch proofs.
    """
    op = op or unary_nat_operator(zero=zero, succ=succ, sort=sort)
    taken = pred_free_vars(p) | proof_free_term_vars(base) \
        | proof_free_term_vars(step)
    x = fresh("x", taken)
    w = fresh("w", taken | {x})
    z = fresh("z", taken | {x, w})

    zc, sc = Con(zero), Con(succ)

    def pn(t: Term) -> Formula:
        return apply_pred(p, (t,))

    def nat(t: Term) -> Formula:
        return Mu(op, (t,))

    if with_nat_hyp:
        ih_formula = And(nat(Var(z)), pn(Var(z)))
        step_formula = All(z, sort, Imp(And(nat(Var(z)), pn(Var(z))),
                                        pn(App(sc, Var(z)))))
        inv: Pred = PredAbs(((w, sort),), And(nat(Var(w)), pn(Var(w))))
    else:
        ih_formula = pn(Var(z))
        step_formula = All(z, sort, Imp(pn(Var(z)), pn(App(sc, Var(z)))))
        inv = p

    # from a : w = zero conclude the motive at w
    wt = fresh("c", taken | {x, w, z})
    zero_case = EqCase(
        ctx0=Context([("bs", pn(zc))]),
        theta=TermSubst({wt: Var(w)}),
        sigma=ProofSubst({"bs": Asc(base, pn(zc))}),
        lhs=Var(wt),
        rhs=zc,
        motive=pn(Var(wt)),
        major=PrfVar("a"),
        branches=((TermSubst({wt: zc}), PrfVar("bs")),),
    )

    # from c : w = succ z /\ ih conclude the motive at w
    succ_case = EqCase(
        ctx0=Context([("st", step_formula), ("ih", ih_formula)]),
        theta=TermSubst({wt: Var(w)}),
        sigma=ProofSubst({"st": Asc(step, step_formula),
                          "ih": Snd(PrfVar("c"))}),
        lhs=Var(wt),
        rhs=App(sc, Var(z)),
        motive=pn(Var(wt)),
        major=Fst(PrfVar("c")),
        branches=((TermSubst({wt: App(sc, Var(z))}),
                   PApp(TApp(PrfVar("st"), Var(z)), PrfVar("ih"))),),
    )

    p_part = Case(PrfVar("g"), "a", zero_case,
                  "b", ExCase(PrfVar("b"), z, "c", succ_case))

    if with_nat_hyp:
        # rebuild nat w from the strengthened unfolding
        rebuild = MuIntro(op, (Var(w),), Case(
            PrfVar("g"),
            "a", Inl(PrfVar("a")),
            "b", Inr(ExCase(PrfVar("b"), z, "c",
                            Wit(Var(z), Pair(Fst(PrfVar("c")),
                                             Fst(Snd(PrfVar("c")))))))))
        step_body: ProofTerm = Pair(rebuild, p_part)
        elim = Snd(MuElim(inv, PrfVar("h"), (w,), "g", step_body))
    else:
        elim = MuElim(inv, PrfVar("h"), (w,), "g", p_part)

    goal = All(x, sort, Imp(nat(Var(x)), pn(Var(x))))
    pi = TLam(x, PLam("h", elim, ann=goal.body), ann=goal)
    return pi, goal
