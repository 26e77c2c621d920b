"""Formulas with least/greatest fixed points and predicate operators.

A predicate operator is lambda p. lambda x1...xn. P where p is the single
bound predicate variable and the x_i are term binders matching p's arity.
Operators under mu/nu must be monotonic: p may occur only positively, i.e.
to the left of an even number of implications.

Predicate values (Pred) are what invariants and functoriality ranges over:
an explicit abstraction, or a fixed point with its arguments pending.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import SortError
from .terms import (
    Arrow, O, Signature, Term, TermSubst, Ty, Var, alpha_eq, free_vars, fresh,
    infer_term_type, is_term_type, unarrow,
)


# ---------------------------------------------------------------- nodes

@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class All:
    var: str
    var_ty: Ty
    body: "Formula"


@dataclass(frozen=True)
class Ex:
    var: str
    var_ty: Ty
    body: "Formula"


@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class PredOperator:
    """lambda pvar. lambda params. body"""
    pvar: str
    pvar_ty: Ty
    params: tuple[tuple[str, Ty], ...]
    body: "Formula"


@dataclass(frozen=True)
class Mu:
    op: PredOperator
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Nu:
    op: PredOperator
    args: tuple[Term, ...]


@dataclass(frozen=True)
class PredVar:
    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Atom:
    name: str
    args: tuple[Term, ...]


Formula = Union[Top, Bot, Imp, And, Or, All, Ex, Eq, Mu, Nu, PredVar, Atom]

TOP = Top()
BOT = Bot()


# ---------------------------------------------------------------- predicates

@dataclass(frozen=True)
class PredAbs:
    """lambda x1...xn. body  (n may be zero)"""
    params: tuple[tuple[str, Ty], ...]
    body: Formula


@dataclass(frozen=True)
class MuPred:
    op: PredOperator


@dataclass(frozen=True)
class NuPred:
    op: PredOperator


Pred = Union[PredAbs, MuPred, NuPred]


def pred_param_types(p: Pred) -> tuple[Ty, ...]:
    match p:
        case PredAbs(params, _):
            return tuple(ty for _, ty in params)
        case MuPred(op) | NuPred(op):
            return tuple(ty for _, ty in op.params)
    raise TypeError(p)


def apply_pred(p: Pred, args: tuple[Term, ...]) -> Formula:
    tys = pred_param_types(p)
    if len(tys) != len(args):
        raise SortError(f"predicate expects {len(tys)} arguments, got {len(args)}")
    match p:
        case PredAbs(params, body):
            sub = TermSubst({name: a for (name, _), a in zip(params, args)})
            return subst_formula(body, sub)
        case MuPred(op):
            return Mu(op, tuple(args))
        case NuPred(op):
            return Nu(op, tuple(args))
    raise TypeError(p)


def atom_pred(name: str, ty: Ty) -> PredAbs:
    """Wrap a predicate constant as an explicit abstraction."""
    arg_tys, res = unarrow(ty)
    if res != O:
        raise SortError(f"{name} is not a predicate")
    params = tuple((f"x{i}", t) for i, t in enumerate(arg_tys))
    return PredAbs(params, Atom(name, tuple(Var(n) for n, _ in params)))


# ---------------------------------------------------------------- free vars

def formula_free_vars(f: Formula) -> frozenset[str]:
    """Free term variables."""
    match f:
        case Top() | Bot():
            return frozenset()
        case Imp(l, r) | And(l, r) | Or(l, r):
            return formula_free_vars(l) | formula_free_vars(r)
        case All(v, _, b) | Ex(v, _, b):
            return formula_free_vars(b) - {v}
        case Eq(l, r):
            return free_vars(l) | free_vars(r)
        case Mu(op, args) | Nu(op, args):
            out = operator_free_vars(op)
            for a in args:
                out |= free_vars(a)
            return out
        case PredVar(_, args) | Atom(_, args):
            out = frozenset()
            for a in args:
                out |= free_vars(a)
            return out
    raise TypeError(f)


def operator_free_vars(op: PredOperator) -> frozenset[str]:
    return formula_free_vars(op.body) - {n for n, _ in op.params}


def pred_free_vars(p: Pred) -> frozenset[str]:
    match p:
        case PredAbs(params, body):
            return formula_free_vars(body) - {n for n, _ in params}
        case MuPred(op) | NuPred(op):
            return operator_free_vars(op)
    raise TypeError(p)


def formula_free_pvars(f: Formula) -> frozenset[str]:
    """Free predicate variables (a separate namespace from term variables)."""
    match f:
        case Top() | Bot() | Eq(_, _) | Atom(_, _):
            return frozenset()
        case Imp(l, r) | And(l, r) | Or(l, r):
            return formula_free_pvars(l) | formula_free_pvars(r)
        case All(_, _, b) | Ex(_, _, b):
            return formula_free_pvars(b)
        case Mu(op, _) | Nu(op, _):
            return formula_free_pvars(op.body) - {op.pvar}
        case PredVar(name, _):
            return frozenset((name,))
    raise TypeError(f)


def pred_free_pvars(p: Pred) -> frozenset[str]:
    match p:
        case PredAbs(_, body):
            return formula_free_pvars(body)
        case MuPred(op) | NuPred(op):
            return formula_free_pvars(op.body) - {op.pvar}
    raise TypeError(p)


# ---------------------------------------------------------------- substitution

def subst_formula(f: Formula, sub: TermSubst) -> Formula:
    """Capture-avoiding substitution of terms for term variables."""
    if not sub:
        return f
    match f:
        case Top() | Bot():
            return f
        case Imp(l, r):
            return Imp(subst_formula(l, sub), subst_formula(r, sub))
        case And(l, r):
            return And(subst_formula(l, sub), subst_formula(r, sub))
        case Or(l, r):
            return Or(subst_formula(l, sub), subst_formula(r, sub))
        case All(v, ty, b):
            v, b = _under_binder(v, b, sub)
            return All(v, ty, subst_formula(b, sub.restrict(set(sub.map) - {v})))
        case Ex(v, ty, b):
            v, b = _under_binder(v, b, sub)
            return Ex(v, ty, subst_formula(b, sub.restrict(set(sub.map) - {v})))
        case Eq(l, r):
            return Eq(sub.apply(l), sub.apply(r))
        case Mu(op, args):
            return Mu(subst_operator(op, sub), tuple(sub.apply(a) for a in args))
        case Nu(op, args):
            return Nu(subst_operator(op, sub), tuple(sub.apply(a) for a in args))
        case PredVar(n, args):
            return PredVar(n, tuple(sub.apply(a) for a in args))
        case Atom(n, args):
            return Atom(n, tuple(sub.apply(a) for a in args))
    raise TypeError(f)


def _under_binder(v: str, b: Formula, sub: TermSubst) -> tuple[str, Formula]:
    relevant = sub.restrict(formula_free_vars(b) - {v})
    if v in relevant.range_free_vars():
        nv = fresh(v, relevant.range_free_vars() | formula_free_vars(b)
                   | relevant.domain())
        b = subst_formula(b, TermSubst({v: Var(nv)}))
        return nv, b
    return v, b


def subst_operator(op: PredOperator, sub: TermSubst) -> PredOperator:
    bound = [n for n, _ in op.params]
    inner = sub.restrict(formula_free_vars(op.body) - set(bound))
    if not inner:
        return op
    ran = inner.range_free_vars()
    params = list(op.params)
    body = op.body
    for i, (n, ty) in enumerate(params):
        if n in ran:
            nn = fresh(n, ran | formula_free_vars(body) | inner.domain()
                       | {m for m, _ in params})
            body = subst_formula(body, TermSubst({n: Var(nn)}))
            params[i] = (nn, ty)
    return PredOperator(op.pvar, op.pvar_ty, tuple(params),
                        subst_formula(body, inner))


def subst_pred_vals(p: Pred, sub: TermSubst) -> Pred:
    match p:
        case PredAbs(params, body):
            op = subst_operator(PredOperator("_", O, params, body), sub)
            return PredAbs(op.params, op.body)
        case MuPred(op):
            return MuPred(subst_operator(op, sub))
        case NuPred(op):
            return NuPred(subst_operator(op, sub))
    raise TypeError(p)


def subst_pvar(f: Formula, hole: str, value: Pred) -> Formula:
    """Replace the free predicate variable hole with a Pred, capture-avoiding
    both for term binders over value's free term variables and for operator
    binders shadowing hole."""
    val_fv = pred_free_vars(value)

    def go(f: Formula) -> Formula:
        match f:
            case Top() | Bot() | Eq(_, _) | Atom(_, _):
                return f
            case Imp(l, r):
                return Imp(go(l), go(r))
            case And(l, r):
                return And(go(l), go(r))
            case Or(l, r):
                return Or(go(l), go(r))
            case All(v, ty, b):
                if hole not in formula_free_pvars(b):
                    return f
                if v in val_fv:
                    nv = fresh(v, val_fv | formula_free_vars(b))
                    b = subst_formula(b, TermSubst({v: Var(nv)}))
                    v = nv
                return All(v, ty, go(b))
            case Ex(v, ty, b):
                if hole not in formula_free_pvars(b):
                    return f
                if v in val_fv:
                    nv = fresh(v, val_fv | formula_free_vars(b))
                    b = subst_formula(b, TermSubst({v: Var(nv)}))
                    v = nv
                return Ex(v, ty, go(b))
            case Mu(op, args):
                return Mu(go_op(op), args)
            case Nu(op, args):
                return Nu(go_op(op), args)
            case PredVar(n, args):
                if n == hole:
                    return apply_pred(value, args)
                return f
        raise TypeError(f)

    def go_op(op: PredOperator) -> PredOperator:
        if op.pvar == hole or hole not in formula_free_pvars(op.body):
            return op
        params = list(op.params)
        body = op.body
        for i, (n, ty) in enumerate(params):
            if n in val_fv:
                nn = fresh(n, val_fv | formula_free_vars(body)
                           | {m for m, _ in params})
                body = subst_formula(body, TermSubst({n: Var(nn)}))
                params[i] = (nn, ty)
        return PredOperator(op.pvar, op.pvar_ty, tuple(params), go(body))

    return go(f)


def instantiate_operator(op: PredOperator, value: Pred,
                         args: tuple[Term, ...]) -> Formula:
    """B S tbar: body with the bound predicate replaced by value and the term
    binders by args."""
    if len(args) != len(op.params):
        raise SortError(
            f"operator expects {len(op.params)} arguments, got {len(args)}")
    got = pred_param_types(value)
    want, res = unarrow(op.pvar_ty)
    if res != O or tuple(want) != got:
        raise SortError(f"predicate arity mismatch: {got} vs {tuple(want)}")
    sub = TermSubst({n: a for (n, _), a in zip(op.params, args)})
    body = subst_formula(op.body, sub)
    return subst_pvar(body, op.pvar, value)


# ---------------------------------------------------------------- alpha

def alpha_eq_formula(f: Formula, g: Formula) -> bool:
    return _aeq(f, g, {}, {}, {}, {}, 0)


def _aeq(f, g, tf, tg, pf, pg, d) -> bool:
    match f, g:
        case Top(), Top():
            return True
        case Bot(), Bot():
            return True
        case (Imp(a, b), Imp(c, e)) | (And(a, b), And(c, e)) | (Or(a, b), Or(c, e)):
            return _aeq(a, c, tf, tg, pf, pg, d) and _aeq(b, e, tf, tg, pf, pg, d)
        case (All(v1, ty1, b1), All(v2, ty2, b2)) | (Ex(v1, ty1, b1), Ex(v2, ty2, b2)):
            if ty1 != ty2:
                return False
            return _aeq(b1, b2, {**tf, v1: d}, {**tg, v2: d}, pf, pg, d + 1)
        case Eq(l1, r1), Eq(l2, r2):
            return (_aeq_term(l1, l2, tf, tg, d)
                    and _aeq_term(r1, r2, tf, tg, d))
        case (Mu(o1, a1), Mu(o2, a2)) | (Nu(o1, a1), Nu(o2, a2)):
            if len(a1) != len(a2):
                return False
            if not all(_aeq_term(x, y, tf, tg, d) for x, y in zip(a1, a2)):
                return False
            return _aeq_op(o1, o2, tf, tg, pf, pg, d)
        case (PredVar(n1, a1), PredVar(n2, a2)):
            if pf.get(n1, n1) != pg.get(n2, n2) or len(a1) != len(a2):
                return False
            return all(_aeq_term(x, y, tf, tg, d) for x, y in zip(a1, a2))
        case (Atom(n1, a1), Atom(n2, a2)):
            if n1 != n2 or len(a1) != len(a2):
                return False
            return all(_aeq_term(x, y, tf, tg, d) for x, y in zip(a1, a2))
    return False


def _aeq_term(t, u, tf, tg, d):
    from .terms import _alpha_eq
    return _alpha_eq(t, u, tf, tg, d)


def _aeq_op(o1: PredOperator, o2: PredOperator, tf, tg, pf, pg, d) -> bool:
    if o1.pvar_ty != o2.pvar_ty or len(o1.params) != len(o2.params):
        return False
    if tuple(ty for _, ty in o1.params) != tuple(ty for _, ty in o2.params):
        return False
    tf2, tg2 = dict(tf), dict(tg)
    for (n1, _), (n2, _) in zip(o1.params, o2.params):
        tf2[n1] = d
        tg2[n2] = d
        d += 1
    return _aeq(o1.body, o2.body, tf2, tg2,
                {**pf, o1.pvar: d}, {**pg, o2.pvar: d}, d + 1)


def alpha_eq_pred(p: Pred, q: Pred) -> bool:
    match p, q:
        case (MuPred(o1), MuPred(o2)) | (NuPred(o1), NuPred(o2)):
            return _aeq_op(o1, o2, {}, {}, {}, {}, 0)
        case PredAbs(_, _), PredAbs(_, _):
            return _aeq_op(PredOperator("_", O, p.params, p.body),
                           PredOperator("_", O, q.params, q.body),
                           {}, {}, {}, {}, 0)
    return False


# ---------------------------------------------------------------- polarity

class Polarity(enum.Enum):
    ABSENT = 0
    POS = 1
    NEG = 2
    BOTH = 3

    def flip(self) -> "Polarity":
        if self is Polarity.POS:
            return Polarity.NEG
        if self is Polarity.NEG:
            return Polarity.POS
        return self

    def join(self, other: "Polarity") -> "Polarity":
        if self is other or other is Polarity.ABSENT:
            return self
        if self is Polarity.ABSENT:
            return other
        return Polarity.BOTH


def polarity_of(pvar: str, f: Formula) -> Polarity:
    match f:
        case Top() | Bot() | Eq(_, _) | Atom(_, _):
            return Polarity.ABSENT
        case Imp(l, r):
            return polarity_of(pvar, l).flip().join(polarity_of(pvar, r))
        case And(l, r) | Or(l, r):
            return polarity_of(pvar, l).join(polarity_of(pvar, r))
        case All(_, _, b) | Ex(_, _, b):
            return polarity_of(pvar, b)
        case Mu(op, _) | Nu(op, _):
            if op.pvar == pvar:
                return Polarity.ABSENT
            return polarity_of(pvar, op.body)
        case PredVar(n, _):
            return Polarity.POS if n == pvar else Polarity.ABSENT
    raise TypeError(f)


def find_negative_occurrence(pvar: str, f: Formula,
                             negative: bool = False,
                             path: tuple = ()) -> tuple | None:
    """Path to the first occurrence of pvar under odd implication-left
    nesting, or None."""
    match f:
        case Top() | Bot() | Eq(_, _) | Atom(_, _):
            return None
        case Imp(l, r):
            return (find_negative_occurrence(pvar, l, not negative, path + ("imp.left",))
                    or find_negative_occurrence(pvar, r, negative, path + ("imp.right",)))
        case And(l, r) | Or(l, r):
            tag = "and" if isinstance(f, And) else "or"
            return (find_negative_occurrence(pvar, l, negative, path + (f"{tag}.left",))
                    or find_negative_occurrence(pvar, r, negative, path + (f"{tag}.right",)))
        case All(_, _, b) | Ex(_, _, b):
            tag = "forall" if isinstance(f, All) else "exists"
            return find_negative_occurrence(pvar, b, negative, path + (tag,))
        case Mu(op, _) | Nu(op, _):
            if op.pvar == pvar:
                return None
            tag = "mu" if isinstance(f, Mu) else "nu"
            return find_negative_occurrence(pvar, op.body, negative, path + (tag,))
        case PredVar(n, _):
            if n == pvar and negative:
                return path
            return None
    raise TypeError(f)


def check_monotonic(op: PredOperator) -> None:
    """SortError if the bound predicate occurs negatively in the body."""
    where = find_negative_occurrence(op.pvar, op.body)
    if where is not None:
        raise SortError(
            f"operator not monotonic: {op.pvar} occurs negatively at "
            f"{'/'.join(where)}")


def check_antimonotonic(op: PredOperator) -> None:
    pol = polarity_of(op.pvar, op.body)
    if pol in (Polarity.POS, Polarity.BOTH):
        raise SortError(f"operator not antimonotonic in {op.pvar}")


# ---------------------------------------------------------------- wellformedness

def check_operator(sig: Signature, ctx: Mapping[str, Ty], op: PredOperator,
                   pvars: Mapping[str, Ty]) -> None:
    want, res = unarrow(op.pvar_ty)
    if res != O:
        raise SortError(f"operator variable {op.pvar}: type must end in o")
    got = tuple(ty for _, ty in op.params)
    if tuple(want) != got:
        raise SortError(
            f"operator binders {got} do not match variable type {op.pvar_ty}")
    for _, ty in op.params:
        if not is_term_type(ty):
            raise SortError(f"operator binder type {ty} mentions 'o'")
    inner_ctx = {**ctx, **{n: ty for n, ty in op.params}}
    check_formula(sig, inner_ctx, op.body, {**pvars, op.pvar: op.pvar_ty})


def check_formula(sig: Signature, ctx: Mapping[str, Ty], f: Formula,
                  pvars: Mapping[str, Ty] | None = None) -> None:
    """Definition-2 wellformedness: sorts, arities, bound predicate
    variables, and monotonicity of every mu/nu operand."""
    pvars = pvars or {}
    match f:
        case Top() | Bot():
            return
        case Imp(l, r) | And(l, r) | Or(l, r):
            check_formula(sig, ctx, l, pvars)
            check_formula(sig, ctx, r, pvars)
        case All(v, ty, b) | Ex(v, ty, b):
            if not is_term_type(ty):
                raise SortError(f"quantifier over non-term type {ty}")
            check_formula(sig, {**ctx, v: ty}, b, pvars)
        case Eq(l, r):
            lt = infer_term_type(sig, ctx, l)
            rt = infer_term_type(sig, ctx, r)
            if lt != rt:
                raise SortError(f"equality between {lt} and {rt}")
            if not is_term_type(lt):
                raise SortError("equality must relate terms")
        case Mu(op, args) | Nu(op, args):
            check_operator(sig, ctx, op, pvars)
            check_monotonic(op)
            _check_args(sig, ctx, args, [ty for _, ty in op.params],
                        "fixed point")
        case PredVar(n, args):
            if n not in pvars:
                raise SortError(f"unbound predicate variable {n}")
            want, _ = unarrow(pvars[n])
            _check_args(sig, ctx, args, want, n)
        case Atom(n, args):
            if n not in sig.predicates:
                raise SortError(f"unknown predicate {n}")
            want, _ = unarrow(sig.predicates[n])
            _check_args(sig, ctx, args, want, n)
        case _:
            raise TypeError(f)


def _check_args(sig, ctx, args, want, who) -> None:
    if len(args) != len(want):
        raise SortError(f"{who}: expected {len(want)} arguments, got {len(args)}")
    for a, w in zip(args, want):
        got = infer_term_type(sig, ctx, a)
        if got != w:
            raise SortError(f"{who}: argument {a} has type {got}, expected {w}")


def check_pred(sig: Signature, ctx: Mapping[str, Ty], p: Pred) -> None:
    match p:
        case PredAbs(params, body):
            for _, ty in params:
                if not is_term_type(ty):
                    raise SortError(f"predicate binder type {ty} mentions 'o'")
            check_formula(sig, {**ctx, **{n: ty for n, ty in params}}, body)
        case MuPred(op) | NuPred(op):
            check_operator(sig, ctx, op, {})
            check_monotonic(op)
        case _:
            raise TypeError(p)
