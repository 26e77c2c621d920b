"""Proof normalization: leftmost-outermost reduction of logical, fixed-point,
and equality redexes.

Fixed-point redexes contract through a functoriality construction: mapping a
proof of one instance of an operator body to another instance pointwise,
given a map between the plugged predicates.  The emitted lambdas carry full
annotations so every contractum stays checkable without inference.

Equality redexes fire when the major premise is reflexivity: the pending
substitution must then factor through one of the branch unifiers; the first
one that factors (in declaration order) is taken.  A reflexivity proof whose
pending substitution factors through no branch raises StuckEqualityRedex.

Redexes are never sought inside the branch list of an equality eliminator;
branches are suspended until their node fires.  Ascriptions are transparent:
a redex scrutinee may sit under any number of them, and their formulas feed
the annotations of the contractum.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import FuelError, SortError, StuckEqualityRedex
from .formulas import (
    All, And, Ex, Formula, Imp, Mu, MuPred, Nu, NuPred, Or, Pred, PredAbs,
    PredOperator, PredVar, apply_pred, formula_free_pvars,
    formula_free_vars, pred_free_pvars, pred_free_vars, subst_formula,
    subst_pvar,
)
from .proofs import (
    Asc, Case, EqCase, ExCase, Fst, Inl, Inr, MuElim, MuIntro, NuElim,
    NuIntro, PApp, PLam, Pair, PrfVar, ProofSubst, ProofTerm, Refl, Snd,
    TApp, TLam, Wit, proof_children, proof_free_proof_vars,
    proof_free_term_vars, replace_at, subproof_at, subst_proof_in_proof,
    subst_term_in_proof,
)
from .rewriting import RewriteSystem, rw_normalize_formula
from .terms import Term, TermSubst, Var, fresh
from .unification import factor_subst

DEFAULT_NORM_FUEL = 10**5


# ---------------------------------------------------------------- functoriality

def _fc(counter: list[int], taken: frozenset[str]) -> str:
    """Next emitted hypothesis name, skipping the map proof's free names."""
    while True:
        counter[0] += 1
        name = f"fc{counter[0]}"
        if name not in taken:
            return name

def functorial(body: Formula, hole: str, positive: bool,
               pin: Pred, pout: Pred, f: ProofTerm,
               counter: Optional[list[int]] = None) -> ProofTerm:
    """Proof of body<A> -> body<B>, where (A, B) is (pin, pout) at positive
    occurrences and (pout, pin) at negative ones, given
    f : forall xbar. pin xbar -> pout xbar.

    Raises SortError if the hole occurs at the wrong polarity.
    """
    counter = counter if counter is not None else [0]
    a, b = (pin, pout) if positive else (pout, pin)
    src = subst_pvar(body, hole, a)
    tgt = subst_pvar(body, hole, b)
    ann = Imp(src, tgt)
    taken = proof_free_proof_vars(f)

    def fresh_hyp() -> str:
        return _fc(counter, taken)

    if hole not in formula_free_pvars(body):
        v = fresh_hyp()
        return PLam(v, PrfVar(v), ann=ann)

    match body:
        case PredVar(name, args) if name == hole:
            if not positive:
                raise SortError(
                    f"functoriality: {hole} used at negative polarity")
            v = fresh_hyp()
            inst = f
            for t in args:
                inst = TApp(inst, t)
            return PLam(v, PApp(inst, PrfVar(v)), ann=ann)
        case Imp(l, r):
            fl = functorial(l, hole, not positive, pin, pout, f, counter)
            fr = functorial(r, hole, positive, pin, pout, f, counter)
            v, w = fresh_hyp(), fresh_hyp()
            return PLam(v, PLam(w, PApp(fr, PApp(PrfVar(v),
                                                 PApp(fl, PrfVar(w)))),
                                ann=ann.right), ann=ann)
        case And(l, r):
            fl = functorial(l, hole, positive, pin, pout, f, counter)
            fr = functorial(r, hole, positive, pin, pout, f, counter)
            v = fresh_hyp()
            return PLam(v, Pair(PApp(fl, Fst(PrfVar(v))),
                                PApp(fr, Snd(PrfVar(v)))), ann=ann)
        case Or(l, r):
            fl = functorial(l, hole, positive, pin, pout, f, counter)
            fr = functorial(r, hole, positive, pin, pout, f, counter)
            v, w1, w2 = fresh_hyp(), fresh_hyp(), fresh_hyp()
            return PLam(v, Case(PrfVar(v),
                                w1, Inl(PApp(fl, PrfVar(w1))),
                                w2, Inr(PApp(fr, PrfVar(w2)))), ann=ann)
        case All(x, ty, q):
            x2, q2 = _freshen_formula_binder(x, q, pin, pout, f)
            fq = functorial(q2, hole, positive, pin, pout, f, counter)
            v = fresh_hyp()
            return PLam(v, TLam(x2, PApp(fq, TApp(PrfVar(v), Var(x2))),
                                ann=ann.right), ann=ann)
        case Ex(x, ty, q):
            x2, q2 = _freshen_formula_binder(x, q, pin, pout, f)
            fq = functorial(q2, hole, positive, pin, pout, f, counter)
            v, w = fresh_hyp(), fresh_hyp()
            return PLam(v, ExCase(PrfVar(v), x2, w,
                                  Wit(Var(x2), PApp(fq, PrfVar(w)))), ann=ann)
        case Mu(op, args):
            return _functorial_mu(body, hole, positive, pin, pout, f,
                                  counter, ann)
        case Nu(op, args):
            return _functorial_nu(body, hole, positive, pin, pout, f,
                                  counter, ann)
    raise SortError(f"functoriality: unhandled shape {type(body).__name__}")


def _freshen_formula_binder(x: str, q: Formula, pin: Pred, pout: Pred,
                            f: ProofTerm) -> tuple[str, Formula]:
    clash = (pred_free_vars(pin) | pred_free_vars(pout)
             | proof_free_term_vars(f))
    if x not in clash:
        return x, q
    x2 = fresh(x, clash | formula_free_vars(q))
    return x2, subst_formula(q, TermSubst({x: Var(x2)}))


def _plug(op: PredOperator, hole: str, value: Pred) -> PredOperator:
    """Substitute the surrounding hole inside an operator body.  The caller
    guarantees hole is not shadowed and value does not capture op's own
    bound predicate."""
    return PredOperator(op.pvar, op.pvar_ty, op.params,
                        subst_pvar(op.body, hole, value))


def _rename_op_pvar(op: PredOperator, avoid: frozenset[str]) -> PredOperator:
    if op.pvar not in avoid:
        return op
    q2 = fresh(op.pvar, set(avoid) | set(formula_free_pvars(op.body)))
    eta = PredAbs(op.params,
                  PredVar(q2, tuple(Var(n) for n, _ in op.params)))
    return PredOperator(q2, op.pvar_ty, op.params,
                        subst_pvar(op.body, op.pvar, eta))


def _param_vars(op: PredOperator, avoid: set) -> tuple[str, ...]:
    names: list[str] = []
    taken = set(avoid)
    for n, _ in op.params:
        n2 = fresh(n, taken)
        taken.add(n2)
        names.append(n2)
    return tuple(names)


def _functorial_mu(body: Mu, hole: str, positive: bool, pin: Pred,
                   pout: Pred, f: ProofTerm, counter: list[int],
                   ann: Imp) -> ProofTerm:
    op = _rename_op_pvar(
        body.op, pred_free_pvars(pin) | pred_free_pvars(pout) | {hole})
    b = pout if positive else pin
    op_b = _plug(op, hole, b)
    target = MuPred(op_b)
    avoid = (pred_free_vars(pin) | pred_free_vars(pout)
             | proof_free_term_vars(f) | formula_free_vars(body))
    ys = _param_vars(op, avoid)
    yvars = tuple(Var(y) for y in ys)
    inner_body = subst_formula(
        subst_pvar(op.body, op.pvar, target),
        TermSubst({n: Var(y) for (n, _), y in zip(op.params, ys)}))
    inner = functorial(inner_body, hole, positive, pin, pout, f, counter)
    taken = proof_free_proof_vars(f)
    v, g = _fc(counter, taken), _fc(counter, taken)
    step = MuIntro(op_b, yvars, PApp(inner, PrfVar(g)))
    return PLam(v, MuElim(target, PrfVar(v), ys, g, step), ann=ann)


def _functorial_nu(body: Nu, hole: str, positive: bool, pin: Pred,
                   pout: Pred, f: ProofTerm, counter: list[int],
                   ann: Imp) -> ProofTerm:
    op = _rename_op_pvar(
        body.op, pred_free_pvars(pin) | pred_free_pvars(pout) | {hole})
    a = pin if positive else pout
    op_a = _plug(op, hole, a)
    source = NuPred(op_a)
    avoid = (pred_free_vars(pin) | pred_free_vars(pout)
             | proof_free_term_vars(f) | formula_free_vars(body))
    ys = _param_vars(op, avoid)
    yvars = tuple(Var(y) for y in ys)
    inner_body = subst_formula(
        subst_pvar(op.body, op.pvar, source),
        TermSubst({n: Var(y) for (n, _), y in zip(op.params, ys)}))
    inner = functorial(inner_body, hole, positive, pin, pout, f, counter)
    taken = proof_free_proof_vars(f)
    v, g = _fc(counter, taken), _fc(counter, taken)
    step = PApp(inner, NuElim(op_a, yvars, PrfVar(g)))
    return PLam(v, NuIntro(source, PrfVar(v), ys, g, step), ann=ann)


# ---------------------------------------------------------------- redexes

def _strip_asc(pi: ProofTerm) -> tuple[ProofTerm, Optional[Formula]]:
    """Peel ascriptions; the outermost formula wins."""
    f: Optional[Formula] = None
    while isinstance(pi, Asc):
        if f is None:
            f = pi.formula
        pi = pi.body
    return pi, f


def redex_kind(pi: ProofTerm) -> Optional[str]:
    match pi:
        case PApp(fn, _):
            core, _ = _strip_asc(fn)
            if isinstance(core, PLam):
                return "beta"
        case TApp(fn, _):
            core, _ = _strip_asc(fn)
            if isinstance(core, TLam):
                return "inst"
        case Fst(b):
            core, _ = _strip_asc(b)
            if isinstance(core, Pair):
                return "proj-left"
        case Snd(b):
            core, _ = _strip_asc(b)
            if isinstance(core, Pair):
                return "proj-right"
        case Case(s, _, _, _, _):
            core, _ = _strip_asc(s)
            if isinstance(core, Inl):
                return "case-left"
            if isinstance(core, Inr):
                return "case-right"
        case ExCase(s, _, _, _):
            core, _ = _strip_asc(s)
            if isinstance(core, Wit):
                return "unpack"
        case MuElim(_, major, _, _, _):
            core, _ = _strip_asc(major)
            if isinstance(core, MuIntro):
                return "ind"
        case NuElim(_, _, b):
            core, _ = _strip_asc(b)
            if isinstance(core, NuIntro):
                return "coind"
        case EqCase(_, _, _, _, _, _, major, _):
            core, _ = _strip_asc(major)
            if isinstance(core, Refl):
                return "eq"
    return None


def find_redex(pi: ProofTerm) -> Optional[tuple[tuple, str]]:
    """Leftmost-outermost redex position, or None for a normal form."""
    kind = redex_kind(pi)
    if kind is not None:
        return (), kind
    for label, child in proof_children(pi):
        found = find_redex(child)
        if found is not None:
            path, kind = found
            return (label,) + path, kind
    return None


def scan_redexes(pi: ProofTerm) -> list[tuple[tuple, str]]:
    """Every redex position, document order.  Independent of find_redex's
    early-exit logic so the two can cross-check each other."""
    out: list[tuple[tuple, str]] = []
    kind = redex_kind(pi)
    if kind is not None:
        out.append(((), kind))
    for label, child in proof_children(pi):
        for path, k in scan_redexes(child):
            out.append(((label,) + path, k))
    return out


# ---------------------------------------------------------------- contraction

def _expose(rs: RewriteSystem, f: Optional[Formula],
            cls: type) -> Optional[Formula]:
    if f is None:
        return None
    g = rw_normalize_formula(rs, f)
    return g if isinstance(g, cls) else None


def _maybe_asc(pi: ProofTerm, f: Optional[Formula]) -> ProofTerm:
    return Asc(pi, f) if f is not None else pi


def contract(rs: RewriteSystem, pi: ProofTerm) -> ProofTerm:
    """One contraction at the root.  pi must be a redex."""
    match pi:
        case PApp(fn, arg):
            core, wrap = _strip_asc(fn)
            assert isinstance(core, PLam)
            ann = _expose(rs, core.ann if core.ann is not None else wrap, Imp)
            if ann is not None:
                body = subst_proof_in_proof(
                    core.body, ProofSubst({core.var: Asc(arg, ann.left)}))
                return Asc(body, ann.right)
            return subst_proof_in_proof(core.body,
                                        ProofSubst({core.var: arg}))
        case TApp(fn, t):
            core, wrap = _strip_asc(fn)
            assert isinstance(core, TLam)
            ann = _expose(rs, core.ann if core.ann is not None else wrap, All)
            body = subst_term_in_proof(core.body, TermSubst({core.var: t}))
            if ann is not None:
                return Asc(body, subst_formula(ann.body,
                                               TermSubst({ann.var: t})))
            return body
        case Fst(b):
            core, wrap = _strip_asc(b)
            assert isinstance(core, Pair)
            ann = _expose(rs, wrap, And)
            return _maybe_asc(core.left, ann.left if ann else None)
        case Snd(b):
            core, wrap = _strip_asc(b)
            assert isinstance(core, Pair)
            ann = _expose(rs, wrap, And)
            return _maybe_asc(core.right, ann.right if ann else None)
        case Case(s, lv, lb, rv, rb):
            core, wrap = _strip_asc(s)
            ann = _expose(rs, wrap, Or)
            if isinstance(core, Inl):
                arg = _maybe_asc(core.body, ann.left if ann else None)
                return subst_proof_in_proof(lb, ProofSubst({lv: arg}))
            assert isinstance(core, Inr)
            arg = _maybe_asc(core.body, ann.right if ann else None)
            return subst_proof_in_proof(rb, ProofSubst({rv: arg}))
        case ExCase(s, tv, pv, body):
            core, wrap = _strip_asc(s)
            assert isinstance(core, Wit)
            ann = _expose(rs, wrap, Ex)
            arg: ProofTerm = core.body
            if ann is not None:
                arg = Asc(arg, subst_formula(
                    ann.body, TermSubst({ann.var: core.term})))
            out = subst_term_in_proof(body, TermSubst({tv: core.term}))
            return subst_proof_in_proof(out, ProofSubst({pv: arg}))
        case MuElim(inv, major, tvars, pvar, step):
            core, _ = _strip_asc(major)
            assert isinstance(core, MuIntro)
            return _contract_mu(rs, inv, core, tvars, pvar, step)
        case NuElim(op, args, b):
            core, _ = _strip_asc(b)
            assert isinstance(core, NuIntro)
            return _contract_nu(rs, op, args, core)
        case EqCase(_, _, _, _, _, _, _, _):
            return _contract_eq(rs, pi)
    raise ValueError("contract called on a non-redex")


def _recursor_map(op: PredOperator, inv: Pred, tvars: tuple[str, ...],
                  pvar: str, step: ProofTerm) -> ProofTerm:
    """lam ybar. lam g. (induction g with the original minor premise), a
    proof of (forall ybar. mu-op ybar -> inv ybar), fully annotated."""
    avoid = (pred_free_vars(inv) | proof_free_term_vars(step)
             | {n for n, _ in op.params})
    ys = _param_vars(op, avoid)
    yvars = tuple(Var(y) for y in ys)
    g = fresh("g", proof_free_proof_vars(step))
    body: ProofTerm = MuElim(inv, PrfVar(g), tvars, pvar, step)
    src = Mu(op, yvars)
    tgt = apply_pred(inv, yvars)
    out: ProofTerm = PLam(g, body, ann=Imp(src, tgt))
    rest: Formula = Imp(src, tgt)
    for y, (_, ty) in reversed(list(zip(ys, op.params))):
        out = TLam(y, out, ann=All(y, ty, rest))
        rest = All(y, ty, rest)
    return out


def _corecursor_map(op: PredOperator, inv: Pred, tvars: tuple[str, ...],
                    pvar: str, step: ProofTerm) -> ProofTerm:
    """lam ybar. lam g. (coinduction seeded by g), a proof of
    (forall ybar. inv ybar -> nu-op ybar)."""
    avoid = (pred_free_vars(inv) | proof_free_term_vars(step)
             | {n for n, _ in op.params})
    ys = _param_vars(op, avoid)
    yvars = tuple(Var(y) for y in ys)
    g = fresh("g", proof_free_proof_vars(step))
    body: ProofTerm = NuIntro(inv, PrfVar(g), tvars, pvar, step)
    src = apply_pred(inv, yvars)
    tgt = Nu(op, yvars)
    out: ProofTerm = PLam(g, body, ann=Imp(src, tgt))
    rest: Formula = Imp(src, tgt)
    for y, (_, ty) in reversed(list(zip(ys, op.params))):
        out = TLam(y, out, ann=All(y, ty, rest))
        rest = All(y, ty, rest)
    return out


def _contract_mu(rs: RewriteSystem, inv: Pred, intro: MuIntro,
                 tvars: tuple[str, ...], pvar: str,
                 step: ProofTerm) -> ProofTerm:
    op, args, packed = intro.op, intro.args, intro.body
    fmap = _recursor_map(op, inv, tvars, pvar, step)
    hole = op.pvar
    body_at_args = subst_formula(
        op.body, TermSubst({n: t for (n, _), t in zip(op.params, args)}))
    mapped = functorial(body_at_args, hole, True, MuPred(op), inv, fmap)
    inst = subst_term_in_proof(
        step, TermSubst({x: t for x, t in zip(tvars, args)}))
    out = subst_proof_in_proof(
        inst, ProofSubst({pvar: PApp(mapped, packed)}))
    return Asc(out, apply_pred(inv, args))


def _contract_nu(rs: RewriteSystem, op: PredOperator,
                 args: tuple[Term, ...], intro: NuIntro) -> ProofTerm:
    inv, seed, tvars, pvar, step = (intro.inv, intro.seed, intro.tvars,
                                    intro.pvar, intro.step)
    fmap = _corecursor_map(op, inv, tvars, pvar, step)
    hole = op.pvar
    body_at_args = subst_formula(
        op.body, TermSubst({n: t for (n, _), t in zip(op.params, args)}))
    mapped = functorial(body_at_args, hole, True, inv, NuPred(op), fmap)
    inst = subst_term_in_proof(
        step, TermSubst({x: t for x, t in zip(tvars, args)}))
    inst = subst_proof_in_proof(
        inst, ProofSubst({pvar: Asc(seed, apply_pred(inv, args))}))
    return PApp(mapped, inst)


def _contract_eq(rs: RewriteSystem, node: EqCase) -> ProofTerm:
    for i, (sub_i, body) in enumerate(node.branches):
        rest = factor_subst(rs, node.theta, sub_i)
        if rest is None:
            continue
        out = subst_term_in_proof(body, rest)
        out = subst_proof_in_proof(out, node.sigma)
        return Asc(out, subst_formula(node.motive, node.theta))
    raise StuckEqualityRedex(
        "reflexivity proof reached an equality eliminator whose pending "
        "substitution factors through none of its branches")


# ---------------------------------------------------------------- driver

@dataclass
class NormResult:
    proof: ProofTerm
    steps: int
    trace: list[tuple[tuple, str]] = field(default_factory=list)


def reduce_at(rs: RewriteSystem, pi: ProofTerm, path: tuple) -> ProofTerm:
    return replace_at(pi, path, contract(rs, subproof_at(pi, path)))


def reduce_step(rs: RewriteSystem, pi: ProofTerm
                ) -> Optional[tuple[ProofTerm, tuple, str]]:
    found = find_redex(pi)
    if found is None:
        return None
    path, kind = found
    return reduce_at(rs, pi, path), path, kind


def normalize(rs: RewriteSystem, pi: ProofTerm,
              fuel: int = DEFAULT_NORM_FUEL, want_trace: bool = False,
              recheck: Optional[Callable[[ProofTerm], None]] = None
              ) -> NormResult:
    """Reduce to normal form.  recheck, when given, is called on every
    intermediate proof; wiring the kernel in here turns normalization into
    a subject-reduction test."""
    steps = 0
    trace: list[tuple[tuple, str]] = []
    while True:
        nxt = reduce_step(rs, pi)
        if nxt is None:
            return NormResult(pi, steps, trace)
        pi, path, kind = nxt
        steps += 1
        if steps > fuel:
            raise FuelError(f"normalization exceeded {fuel} steps")
        if want_trace:
            trace.append((path, kind))
        if recheck is not None:
            recheck(pi)
