"""Proof terms, contexts, and the two substitution actions.

The equality eliminator stores a context, a pending term substitution, a
pending proof substitution, the bare equation, the motive, and a branch per
member of the CSU.  Substitutions applied to the node compose onto the
pending ones and touch the major premise; the branch list and the suspended
data (context, equation, motive) are never entered.  Fixed-point nodes carry
their invariant S explicitly so reduction needs no retyping.

Proof nodes use identity equality; compare with alpha_eq_proof.  The `ann`
fields on the two lambda forms and the ascription node are artifact
annotations that keep reducts checkable; they are not part of the logic.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from .errors import CheckError
from .formulas import (
    Formula, Pred, PredOperator, _aeq, _aeq_op, formula_free_vars,
    operator_free_vars, pred_free_vars, subst_formula, subst_operator,
    subst_pred_vals,
)
from .terms import Term, TermSubst, Var, _alpha_eq, free_vars, fresh


# ---------------------------------------------------------------- nodes

@dataclass(frozen=True, eq=False)
class PrfVar:
    name: str


@dataclass(frozen=True, eq=False)
class Unit:
    pass


@dataclass(frozen=True, eq=False)
class Abort:
    body: "ProofTerm"


@dataclass(frozen=True, eq=False)
class PLam:
    var: str
    body: "ProofTerm"
    ann: Optional[Formula] = None


@dataclass(frozen=True, eq=False)
class PApp:
    fn: "ProofTerm"
    arg: "ProofTerm"


@dataclass(frozen=True, eq=False)
class Pair:
    left: "ProofTerm"
    right: "ProofTerm"


@dataclass(frozen=True, eq=False)
class Fst:
    body: "ProofTerm"


@dataclass(frozen=True, eq=False)
class Snd:
    body: "ProofTerm"


@dataclass(frozen=True, eq=False)
class Inl:
    body: "ProofTerm"


@dataclass(frozen=True, eq=False)
class Inr:
    body: "ProofTerm"


@dataclass(frozen=True, eq=False)
class Case:
    scrut: "ProofTerm"
    lvar: str
    lbody: "ProofTerm"
    rvar: str
    rbody: "ProofTerm"


@dataclass(frozen=True, eq=False)
class TLam:
    var: str
    body: "ProofTerm"
    ann: Optional[Formula] = None


@dataclass(frozen=True, eq=False)
class TApp:
    fn: "ProofTerm"
    term: Term


@dataclass(frozen=True, eq=False)
class Wit:
    term: Term
    body: "ProofTerm"


@dataclass(frozen=True, eq=False)
class ExCase:
    scrut: "ProofTerm"
    tvar: str
    pvar: str
    body: "ProofTerm"


@dataclass(frozen=True, eq=False)
class Refl:
    term: Term


@dataclass(frozen=True, eq=False)
class MuIntro:
    op: PredOperator
    args: tuple[Term, ...]
    body: "ProofTerm"


@dataclass(frozen=True, eq=False)
class MuElim:
    inv: Pred
    major: "ProofTerm"
    tvars: tuple[str, ...]
    pvar: str
    step: "ProofTerm"


@dataclass(frozen=True, eq=False)
class NuIntro:
    inv: Pred
    seed: "ProofTerm"
    tvars: tuple[str, ...]
    pvar: str
    step: "ProofTerm"


@dataclass(frozen=True, eq=False)
class NuElim:
    op: PredOperator
    args: tuple[Term, ...]
    body: "ProofTerm"


@dataclass(frozen=True, eq=False)
class Asc:
    body: "ProofTerm"
    formula: Formula


# ---------------------------------------------------------------- context

class Context:
    """Ordered hypothesis list with unique names."""

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[tuple[str, Formula]] = ()):
        self.entries = tuple(entries)
        names = [n for n, _ in self.entries]
        if len(names) != len(set(names)):
            raise CheckError("duplicate hypothesis names in context")

    def lookup(self, name: str) -> Optional[Formula]:
        for n, f in self.entries:
            if n == name:
                return f
        return None

    def extend(self, name: str, f: Formula) -> "Context":
        if self.lookup(name) is not None:
            raise CheckError(f"hypothesis {name} already bound")
        return Context(self.entries + ((name, f),))

    def domain(self) -> frozenset[str]:
        return frozenset(n for n, _ in self.entries)

    def free_term_vars(self) -> frozenset[str]:
        out: set[str] = set()
        for _, f in self.entries:
            out |= formula_free_vars(f)
        return frozenset(out)

    def subst(self, sub: TermSubst) -> "Context":
        return Context(tuple((n, subst_formula(f, sub)) for n, f in self.entries))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return "[" + ", ".join(f"{n} : {f}" for n, f in self.entries) + "]"


# ---------------------------------------------------------------- EqCase

@dataclass(frozen=True, eq=False)
class EqCase:
    ctx0: Context
    theta: TermSubst
    sigma: "ProofSubst"
    lhs: Term
    rhs: Term
    motive: Formula
    major: "ProofTerm"
    branches: tuple[tuple[TermSubst, "ProofTerm"], ...]

    def __post_init__(self):
        # Definition-3 condition under the total-substitution convention:
        # variables consumed by a branch substitution may not stay free in
        # the branch proof.
        for i, (sub, pi) in enumerate(self.branches):
            consumed = sub.domain() - sub.range_free_vars()
            bad = proof_free_term_vars(pi) & consumed
            if bad:
                raise CheckError(
                    f"branch {i}: proof mentions {sorted(bad)}, consumed by "
                    f"its substitution", ("branch", i))


ProofTerm = Union[PrfVar, Unit, Abort, PLam, PApp, Pair, Fst, Snd, Inl, Inr,
                  Case, TLam, TApp, Wit, ExCase, Refl, EqCase, MuIntro,
                  MuElim, NuIntro, NuElim, Asc]


# ---------------------------------------------------------------- proof substs

class ProofSubst:
    """Finite map from proof variables to proofs, identity outside."""

    __slots__ = ("map",)

    def __init__(self, mapping: Optional[Mapping[str, ProofTerm]] = None):
        self.map = dict(mapping or {})

    def __bool__(self):
        return bool(self.map)

    def __repr__(self):
        inside = ", ".join(f"{k} := ..." for k in sorted(self.map))
        return f"{{{inside}}}"

    def domain(self) -> frozenset[str]:
        return frozenset(self.map)

    def get(self, name: str) -> ProofTerm:
        return self.map.get(name, PrfVar(name))

    def apply(self, pi: ProofTerm) -> ProofTerm:
        return subst_proof_in_proof(pi, self)

    def compose(self, after: "ProofSubst") -> "ProofSubst":
        """Pointwise on the left domain: (pi.self).after == pi.(self.compose
        after) whenever pi's free proof variables lie in dom(self)."""
        return ProofSubst({k: after.apply(v) for k, v in self.map.items()})

    def subst_terms(self, sub: TermSubst) -> "ProofSubst":
        return ProofSubst({k: subst_term_in_proof(v, sub)
                           for k, v in self.map.items()})

    def range_term_vars(self) -> frozenset[str]:
        out: set[str] = set()
        for v in self.map.values():
            out |= proof_free_term_vars(v)
        return frozenset(out)

    def range_proof_vars(self) -> frozenset[str]:
        out: set[str] = set()
        for v in self.map.values():
            out |= proof_free_proof_vars(v)
        return frozenset(out)

    def items(self):
        return self.map.items()


# ---------------------------------------------------------------- free vars

def proof_free_term_vars(pi: ProofTerm) -> frozenset[str]:
    """Free term variables.  Suspended parts of EqCase do not count: the
    pending substitution reaches them only by composition, never by
    traversal."""
    match pi:
        case PrfVar(_) | Unit():
            return frozenset()
        case Abort(b) | Fst(b) | Snd(b) | Inl(b) | Inr(b):
            return proof_free_term_vars(b)
        case PLam(_, b, ann):
            out = proof_free_term_vars(b)
            return out | (formula_free_vars(ann) if ann else frozenset())
        case PApp(f, a) | Pair(f, a):
            return proof_free_term_vars(f) | proof_free_term_vars(a)
        case Case(s, _, lb, _, rb):
            return (proof_free_term_vars(s) | proof_free_term_vars(lb)
                    | proof_free_term_vars(rb))
        case TLam(v, b, ann):
            out = proof_free_term_vars(b) - {v}
            return out | (formula_free_vars(ann) if ann else frozenset())
        case TApp(f, t):
            return proof_free_term_vars(f) | free_vars(t)
        case Wit(t, b):
            return free_vars(t) | proof_free_term_vars(b)
        case ExCase(s, tv, _, b):
            return proof_free_term_vars(s) | (proof_free_term_vars(b) - {tv})
        case Refl(t):
            return free_vars(t)
        case EqCase(_, theta, sigma, _, _, _, major, _):
            return (theta.range_free_vars() | sigma.range_term_vars()
                    | proof_free_term_vars(major))
        case MuIntro(op, args, b) | NuElim(op, args, b):
            out = operator_free_vars(op) | proof_free_term_vars(b)
            for a in args:
                out |= free_vars(a)
            return out
        case MuElim(inv, major, tvars, _, step):
            return (pred_free_vars(inv) | proof_free_term_vars(major)
                    | (proof_free_term_vars(step) - set(tvars)))
        case NuIntro(inv, seed, tvars, _, step):
            return (pred_free_vars(inv) | proof_free_term_vars(seed)
                    | (proof_free_term_vars(step) - set(tvars)))
        case Asc(b, f):
            return proof_free_term_vars(b) | formula_free_vars(f)
    raise TypeError(pi)


def proof_free_proof_vars(pi: ProofTerm) -> frozenset[str]:
    match pi:
        case PrfVar(n):
            return frozenset((n,))
        case Unit() | Refl(_):
            return frozenset()
        case Abort(b) | Fst(b) | Snd(b) | Inl(b) | Inr(b):
            return proof_free_proof_vars(b)
        case PLam(v, b, _):
            return proof_free_proof_vars(b) - {v}
        case PApp(f, a) | Pair(f, a):
            return proof_free_proof_vars(f) | proof_free_proof_vars(a)
        case Case(s, lv, lb, rv, rb):
            return (proof_free_proof_vars(s)
                    | (proof_free_proof_vars(lb) - {lv})
                    | (proof_free_proof_vars(rb) - {rv}))
        case TLam(_, b, _):
            return proof_free_proof_vars(b)
        case TApp(f, _):
            return proof_free_proof_vars(f)
        case Wit(_, b):
            return proof_free_proof_vars(b)
        case ExCase(s, _, pv, b):
            return proof_free_proof_vars(s) | (proof_free_proof_vars(b) - {pv})
        case EqCase(_, _, sigma, _, _, _, major, _):
            return sigma.range_proof_vars() | proof_free_proof_vars(major)
        case MuIntro(_, _, b) | NuElim(_, _, b):
            return proof_free_proof_vars(b)
        case MuElim(_, major, _, pv, step):
            return proof_free_proof_vars(major) | (proof_free_proof_vars(step) - {pv})
        case NuIntro(_, seed, _, pv, step):
            return proof_free_proof_vars(seed) | (proof_free_proof_vars(step) - {pv})
        case Asc(b, _):
            return proof_free_proof_vars(b)
    raise TypeError(pi)


# ---------------------------------------------------------------- term subst

def subst_term_in_proof(pi: ProofTerm, sub: TermSubst) -> ProofTerm:
    """Capture-avoiding action of a term substitution on a proof.

    Suspended positions are special: the substitution composes onto theta
    and maps sigma's images and the major premise, but never touches the
    stored branches."""
    if not sub:
        return pi
    match pi:
        case PrfVar(_) | Unit():
            return pi
        case Abort(b):
            return Abort(subst_term_in_proof(b, sub))
        case PLam(v, b, ann):
            return PLam(v, subst_term_in_proof(b, sub),
                        subst_formula(ann, sub) if ann else None)
        case PApp(f, a):
            return PApp(subst_term_in_proof(f, sub), subst_term_in_proof(a, sub))
        case Pair(l, r):
            return Pair(subst_term_in_proof(l, sub), subst_term_in_proof(r, sub))
        case Fst(b):
            return Fst(subst_term_in_proof(b, sub))
        case Snd(b):
            return Snd(subst_term_in_proof(b, sub))
        case Inl(b):
            return Inl(subst_term_in_proof(b, sub))
        case Inr(b):
            return Inr(subst_term_in_proof(b, sub))
        case Case(s, lv, lb, rv, rb):
            return Case(subst_term_in_proof(s, sub),
                        lv, subst_term_in_proof(lb, sub),
                        rv, subst_term_in_proof(rb, sub))
        case TLam(v, b, ann):
            nv, b2, inner = _shield_term_binders((v,), b, sub)
            return TLam(nv[0], subst_term_in_proof(b2, inner),
                        subst_formula(ann, sub) if ann else None)
        case TApp(f, t):
            return TApp(subst_term_in_proof(f, sub), sub.apply(t))
        case Wit(t, b):
            return Wit(sub.apply(t), subst_term_in_proof(b, sub))
        case ExCase(s, tv, pv, b):
            nv, b2, inner = _shield_term_binders((tv,), b, sub)
            return ExCase(subst_term_in_proof(s, sub), nv[0], pv,
                          subst_term_in_proof(b2, inner))
        case Refl(t):
            return Refl(sub.apply(t))
        case EqCase(ctx0, theta, sigma, lhs, rhs, motive, major, branches):
            return EqCase(ctx0, theta.compose(sub), sigma.subst_terms(sub),
                          lhs, rhs, motive,
                          subst_term_in_proof(major, sub), branches)
        case MuIntro(op, args, b):
            return MuIntro(subst_operator(op, sub),
                           tuple(sub.apply(a) for a in args),
                           subst_term_in_proof(b, sub))
        case MuElim(inv, major, tvars, pv, step):
            nv, step2, inner = _shield_term_binders(tvars, step, sub)
            return MuElim(subst_pred_vals(inv, sub),
                          subst_term_in_proof(major, sub),
                          nv, pv, subst_term_in_proof(step2, inner))
        case NuIntro(inv, seed, tvars, pv, step):
            nv, step2, inner = _shield_term_binders(tvars, step, sub)
            return NuIntro(subst_pred_vals(inv, sub),
                           subst_term_in_proof(seed, sub),
                           nv, pv, subst_term_in_proof(step2, inner))
        case NuElim(op, args, b):
            return NuElim(subst_operator(op, sub),
                          tuple(sub.apply(a) for a in args),
                          subst_term_in_proof(b, sub))
        case Asc(b, f):
            return Asc(subst_term_in_proof(b, sub), subst_formula(f, sub))
    raise TypeError(pi)


def _shield_term_binders(binders: tuple[str, ...], body: ProofTerm,
                         sub: TermSubst) -> tuple[tuple[str, ...], ProofTerm, TermSubst]:
    """Remove bound names from the substitution and rename binders clashing
    with its range."""
    inner = sub.restrict(set(sub.map) - set(binders))
    if not inner:
        return binders, body, inner
    ran = inner.range_free_vars()
    new = list(binders)
    renames: dict[str, Term] = {}
    avoid = set(ran) | set(inner.domain()) | proof_free_term_vars(body) | set(binders)
    for i, v in enumerate(new):
        if v in ran:
            nv = fresh(v, avoid)
            avoid.add(nv)
            renames[v] = Var(nv)
            new[i] = nv
    if renames:
        body = subst_term_in_proof(body, TermSubst(renames))
    return tuple(new), body, inner


# ---------------------------------------------------------------- proof subst

def subst_proof_in_proof(pi: ProofTerm, sub: ProofSubst) -> ProofTerm:
    """Capture-avoiding action of a proof substitution on a proof.

    At a suspended position the substitution composes pointwise onto
    sigma and maps the major premise only; branches are closed under
    their own context and stay untouched."""
    if not sub:
        return pi
    match pi:
        case PrfVar(n):
            return sub.get(n)
        case Unit() | Refl(_):
            return pi
        case Abort(b):
            return Abort(subst_proof_in_proof(b, sub))
        case PLam(v, b, ann):
            nv, b = _shield_proof_binder(v, b, sub)
            return PLam(nv, subst_proof_in_proof(b, _drop(sub, v)), ann)
        case PApp(f, a):
            return PApp(subst_proof_in_proof(f, sub), subst_proof_in_proof(a, sub))
        case Pair(l, r):
            return Pair(subst_proof_in_proof(l, sub), subst_proof_in_proof(r, sub))
        case Fst(b):
            return Fst(subst_proof_in_proof(b, sub))
        case Snd(b):
            return Snd(subst_proof_in_proof(b, sub))
        case Inl(b):
            return Inl(subst_proof_in_proof(b, sub))
        case Inr(b):
            return Inr(subst_proof_in_proof(b, sub))
        case Case(s, lv, lb, rv, rb):
            nlv, lb = _shield_proof_binder(lv, lb, sub)
            nrv, rb = _shield_proof_binder(rv, rb, sub)
            return Case(subst_proof_in_proof(s, sub),
                        nlv, subst_proof_in_proof(lb, _drop(sub, lv)),
                        nrv, subst_proof_in_proof(rb, _drop(sub, rv)))
        case TLam(v, b, ann):
            nv, b2 = _shield_proof_term_binders((v,), b, sub)
            return TLam(nv[0], subst_proof_in_proof(b2, sub), ann)
        case TApp(f, t):
            return TApp(subst_proof_in_proof(f, sub), t)
        case Wit(t, b):
            return Wit(t, subst_proof_in_proof(b, sub))
        case ExCase(s, tv, pv, b):
            ntv, b = _shield_proof_term_binders((tv,), b, sub)
            npv, b = _shield_proof_binder(pv, b, sub)
            return ExCase(subst_proof_in_proof(s, sub), ntv[0], npv,
                          subst_proof_in_proof(b, _drop(sub, pv)))
        case EqCase(ctx0, theta, sigma, lhs, rhs, motive, major, branches):
            return EqCase(ctx0, theta, sigma.compose(sub), lhs, rhs, motive,
                          subst_proof_in_proof(major, sub), branches)
        case MuIntro(op, args, b):
            return MuIntro(op, args, subst_proof_in_proof(b, sub))
        case MuElim(inv, major, tvars, pv, step):
            ntv, step = _shield_proof_term_binders(tvars, step, sub)
            npv, step = _shield_proof_binder(pv, step, sub)
            return MuElim(inv, subst_proof_in_proof(major, sub), ntv, npv,
                          subst_proof_in_proof(step, _drop(sub, pv)))
        case NuIntro(inv, seed, tvars, pv, step):
            ntv, step = _shield_proof_term_binders(tvars, step, sub)
            npv, step = _shield_proof_binder(pv, step, sub)
            return NuIntro(inv, subst_proof_in_proof(seed, sub), ntv, npv,
                           subst_proof_in_proof(step, _drop(sub, pv)))
        case NuElim(op, args, b):
            return NuElim(op, args, subst_proof_in_proof(b, sub))
        case Asc(b, f):
            return Asc(subst_proof_in_proof(b, sub), f)
    raise TypeError(pi)


def _drop(sub: ProofSubst, name: str) -> ProofSubst:
    if name in sub.map:
        return ProofSubst({k: v for k, v in sub.map.items() if k != name})
    return sub


def _shield_proof_binder(v: str, body: ProofTerm, sub: ProofSubst
                         ) -> tuple[str, ProofTerm]:
    """Rename a proof binder clashing with the substitution's range."""
    live = {k: w for k, w in sub.map.items()
            if k != v and k in proof_free_proof_vars(body)}
    ran: set[str] = set()
    for w in live.values():
        ran |= proof_free_proof_vars(w)
    if v in ran:
        nv = fresh(v, ran | proof_free_proof_vars(body) | set(sub.map))
        body = subst_proof_in_proof(body, ProofSubst({v: PrfVar(nv)}))
        return nv, body
    return v, body


def _shield_proof_term_binders(binders: tuple[str, ...], body: ProofTerm,
                               sub: ProofSubst) -> tuple[tuple[str, ...], ProofTerm]:
    """Term binders must not capture term variables free in the incoming
    proof images."""
    live = {k: w for k, w in sub.map.items()
            if k in proof_free_proof_vars(body)}
    ran: set[str] = set()
    for w in live.values():
        ran |= proof_free_term_vars(w)
    new = list(binders)
    renames: dict[str, Term] = {}
    avoid = ran | proof_free_term_vars(body) | set(binders)
    for i, v in enumerate(new):
        if v in ran:
            nv = fresh(v, avoid)
            avoid.add(nv)
            renames[v] = Var(nv)
            new[i] = nv
    if renames:
        body = subst_term_in_proof(body, TermSubst(renames))
    return tuple(new), body


# ---------------------------------------------------------------- alpha

def alpha_eq_proof(a: ProofTerm, b: ProofTerm, strip_asc: bool = False) -> bool:
    return _peq(a, b, {}, {}, {}, {}, 0, strip_asc)


def _strip(pi: ProofTerm) -> ProofTerm:
    while isinstance(pi, Asc):
        pi = pi.body
    return pi


def _peq(a, b, ta, tb, pa, pb, d, strip) -> bool:
    if strip:
        a, b = _strip(a), _strip(b)

    def feq(f, g):
        if f is None or g is None:
            return (f is None) == (g is None) if not strip else True
        return _aeq(f, g, ta, tb, {}, {}, d)

    def teq(t, u):
        return _alpha_eq(t, u, ta, tb, d)

    match a, b:
        case PrfVar(x), PrfVar(y):
            return pa.get(x, x) == pb.get(y, y)
        case Unit(), Unit():
            return True
        case Abort(x), Abort(y):
            return _peq(x, y, ta, tb, pa, pb, d, strip)
        case PLam(v1, b1, an1), PLam(v2, b2, an2):
            if not feq(an1, an2):
                return False
            return _peq(b1, b2, ta, tb, {**pa, v1: d}, {**pb, v2: d}, d + 1, strip)
        case (PApp(f1, a1), PApp(f2, a2)) | (Pair(f1, a1), Pair(f2, a2)):
            return (_peq(f1, f2, ta, tb, pa, pb, d, strip)
                    and _peq(a1, a2, ta, tb, pa, pb, d, strip))
        case (Fst(x), Fst(y)) | (Snd(x), Snd(y)) | (Inl(x), Inl(y)) | (Inr(x), Inr(y)):
            return _peq(x, y, ta, tb, pa, pb, d, strip)
        case Case(s1, lv1, lb1, rv1, rb1), Case(s2, lv2, lb2, rv2, rb2):
            return (_peq(s1, s2, ta, tb, pa, pb, d, strip)
                    and _peq(lb1, lb2, ta, tb, {**pa, lv1: d}, {**pb, lv2: d},
                             d + 1, strip)
                    and _peq(rb1, rb2, ta, tb, {**pa, rv1: d}, {**pb, rv2: d},
                             d + 1, strip))
        case TLam(v1, b1, an1), TLam(v2, b2, an2):
            if not feq(an1, an2):
                return False
            return _peq(b1, b2, {**ta, v1: d}, {**tb, v2: d}, pa, pb, d + 1, strip)
        case TApp(f1, t1), TApp(f2, t2):
            return teq(t1, t2) and _peq(f1, f2, ta, tb, pa, pb, d, strip)
        case Wit(t1, b1), Wit(t2, b2):
            return teq(t1, t2) and _peq(b1, b2, ta, tb, pa, pb, d, strip)
        case ExCase(s1, tv1, pv1, b1), ExCase(s2, tv2, pv2, b2):
            return (_peq(s1, s2, ta, tb, pa, pb, d, strip)
                    and _peq(b1, b2, {**ta, tv1: d}, {**tb, tv2: d},
                             {**pa, pv1: d + 1}, {**pb, pv2: d + 1}, d + 2, strip))
        case Refl(t1), Refl(t2):
            return teq(t1, t2)
        case EqCase(), EqCase():
            return _eqcase_eq(a, b, ta, tb, pa, pb, d, strip)
        case MuIntro(o1, a1, b1), MuIntro(o2, a2, b2):
            return (_op_eq(o1, o2, ta, tb, d)
                    and len(a1) == len(a2)
                    and all(teq(x, y) for x, y in zip(a1, a2))
                    and _peq(b1, b2, ta, tb, pa, pb, d, strip))
        case NuElim(o1, a1, b1), NuElim(o2, a2, b2):
            return (_op_eq(o1, o2, ta, tb, d)
                    and len(a1) == len(a2)
                    and all(teq(x, y) for x, y in zip(a1, a2))
                    and _peq(b1, b2, ta, tb, pa, pb, d, strip))
        case MuElim(), MuElim():
            return _fix_elim_eq(a, b, ta, tb, pa, pb, d, strip)
        case NuIntro(), NuIntro():
            return _fix_elim_eq(a, b, ta, tb, pa, pb, d, strip)
        case Asc(b1, f1), Asc(b2, f2):
            # only reached when not stripping
            return feq(f1, f2) and _peq(b1, b2, ta, tb, pa, pb, d, strip)
    return False


def _op_eq(o1, o2, ta, tb, d):
    return _aeq_op(o1, o2, ta, tb, {}, {}, d)


def _pred_eq(p1: Pred, p2: Pred, ta, tb, d) -> bool:
    from .formulas import MuPred, NuPred, PredAbs
    from .terms import O
    match p1, p2:
        case (MuPred(o1), MuPred(o2)) | (NuPred(o1), NuPred(o2)):
            return _aeq_op(o1, o2, ta, tb, {}, {}, d)
        case PredAbs(_, _), PredAbs(_, _):
            return _aeq_op(PredOperator("_", O, p1.params, p1.body),
                           PredOperator("_", O, p2.params, p2.body),
                           ta, tb, {}, {}, d)
    return False


def _fix_elim_eq(a, b, ta, tb, pa, pb, d, strip) -> bool:
    if not _pred_eq(a.inv, b.inv, ta, tb, d):
        return False
    if len(a.tvars) != len(b.tvars):
        return False
    major_a = a.major if isinstance(a, MuElim) else a.seed
    major_b = b.major if isinstance(b, MuElim) else b.seed
    if not _peq(major_a, major_b, ta, tb, pa, pb, d, strip):
        return False
    ta2, tb2 = dict(ta), dict(tb)
    dd = d
    for v1, v2 in zip(a.tvars, b.tvars):
        ta2[v1] = dd
        tb2[v2] = dd
        dd += 1
    return _peq(a.step, b.step, ta2, tb2, {**pa, a.pvar: dd}, {**pb, b.pvar: dd},
                dd + 1, strip)


def _subst_alpha_eq(s1: TermSubst, s2: TermSubst, ta, tb, d) -> bool:
    m1 = {k: v for k, v in s1.map.items() if v != Var(k)}
    m2 = {k: v for k, v in s2.map.items() if v != Var(k)}
    if m1.keys() != m2.keys():
        return False
    return all(_alpha_eq(m1[k], m2[k], ta, tb, d) for k in m1)


def _eqcase_eq(a: EqCase, b: EqCase, ta, tb, pa, pb, d, strip) -> bool:
    # suspended parts are compared verbatim (their variables are stable);
    # the live parts (theta range, sigma range, major) respect outer binders
    if a.ctx0.domain() != b.ctx0.domain() or len(a.ctx0) != len(b.ctx0):
        return False
    for (n1, f1), (n2, f2) in zip(a.ctx0, b.ctx0):
        if n1 != n2 or not _aeq(f1, f2, {}, {}, {}, {}, 0):
            return False
    if not (_alpha_eq(a.lhs, b.lhs, {}, {}, 0)
            and _alpha_eq(a.rhs, b.rhs, {}, {}, 0)
            and _aeq(a.motive, b.motive, {}, {}, {}, {}, 0)):
        return False
    if not _subst_alpha_eq(a.theta, b.theta, ta, tb, d):
        return False
    if a.sigma.domain() != b.sigma.domain():
        return False
    for k in a.sigma.domain():
        if not _peq(a.sigma.get(k), b.sigma.get(k), ta, tb, pa, pb, d, strip):
            return False
    if not _peq(a.major, b.major, ta, tb, pa, pb, d, strip):
        return False
    if len(a.branches) != len(b.branches):
        return False
    for (s1, p1), (s2, p2) in zip(a.branches, b.branches):
        if not _subst_alpha_eq(s1, s2, {}, {}, 0):
            return False
        if not _peq(p1, p2, {}, {}, {}, {}, 0, strip):
            return False
    return True


# ---------------------------------------------------------------- traversal

def proof_children(pi: ProofTerm) -> list[tuple[tuple, ProofTerm]]:
    """Reducible child positions in left-to-right search order.  The branch
    list of EqCase is deliberately absent."""
    match pi:
        case PrfVar(_) | Unit() | Refl(_):
            return []
        case Abort(b) | Fst(b) | Snd(b) | Inl(b) | Inr(b) | PLam(_, b, _) \
                | TLam(_, b, _) | Wit(_, b) | MuIntro(_, _, b) | NuElim(_, _, b) \
                | Asc(b, _):
            return [(("body",), b)]
        case PApp(f, a):
            return [(("fn",), f), (("arg",), a)]
        case Pair(l, r):
            return [(("left",), l), (("right",), r)]
        case Case(s, _, lb, _, rb):
            return [(("scrut",), s), (("lbody",), lb), (("rbody",), rb)]
        case TApp(f, _):
            return [(("fn",), f)]
        case ExCase(s, _, _, b):
            return [(("scrut",), s), (("body",), b)]
        case EqCase(_, _, sigma, _, _, _, major, _):
            out: list[tuple[tuple, ProofTerm]] = [(("major",), major)]
            for k in sorted(sigma.domain()):
                out.append((("sigma", k), sigma.get(k)))
            return out
        case MuElim(_, major, _, _, step):
            return [(("major",), major), (("step",), step)]
        case NuIntro(_, seed, _, _, step):
            return [(("seed",), seed), (("step",), step)]
    raise TypeError(pi)


def replace_child(pi: ProofTerm, label: tuple, new: ProofTerm) -> ProofTerm:
    match pi, label:
        case Abort(_), ("body",):
            return Abort(new)
        case PLam(v, _, ann), ("body",):
            return PLam(v, new, ann)
        case PApp(f, a), ("fn",):
            return PApp(new, a)
        case PApp(f, a), ("arg",):
            return PApp(f, new)
        case Pair(l, r), ("left",):
            return Pair(new, r)
        case Pair(l, r), ("right",):
            return Pair(l, new)
        case Fst(_), ("body",):
            return Fst(new)
        case Snd(_), ("body",):
            return Snd(new)
        case Inl(_), ("body",):
            return Inl(new)
        case Inr(_), ("body",):
            return Inr(new)
        case Case(s, lv, lb, rv, rb), ("scrut",):
            return Case(new, lv, lb, rv, rb)
        case Case(s, lv, lb, rv, rb), ("lbody",):
            return Case(s, lv, new, rv, rb)
        case Case(s, lv, lb, rv, rb), ("rbody",):
            return Case(s, lv, lb, rv, new)
        case TLam(v, _, ann), ("body",):
            return TLam(v, new, ann)
        case TApp(f, t), ("fn",):
            return TApp(new, t)
        case Wit(t, _), ("body",):
            return Wit(t, new)
        case ExCase(s, tv, pv, b), ("scrut",):
            return ExCase(new, tv, pv, b)
        case ExCase(s, tv, pv, b), ("body",):
            return ExCase(s, tv, pv, new)
        case EqCase(c, th, sg, l, r, m, _, br), ("major",):
            return EqCase(c, th, sg, l, r, m, new, br)
        case EqCase(c, th, sg, l, r, m, mj, br), ("sigma", name):
            m2 = dict(sg.map)
            m2[name] = new
            return EqCase(c, th, ProofSubst(m2), l, r, m, mj, br)
        case MuIntro(op, args, _), ("body",):
            return MuIntro(op, args, new)
        case MuElim(inv, _, tv, pv, st), ("major",):
            return MuElim(inv, new, tv, pv, st)
        case MuElim(inv, mj, tv, pv, _), ("step",):
            return MuElim(inv, mj, tv, pv, new)
        case NuIntro(inv, _, tv, pv, st), ("seed",):
            return NuIntro(inv, new, tv, pv, st)
        case NuIntro(inv, sd, tv, pv, _), ("step",):
            return NuIntro(inv, sd, tv, pv, new)
        case NuElim(op, args, _), ("body",):
            return NuElim(op, args, new)
        case Asc(_, f), ("body",):
            return Asc(new, f)
    raise KeyError((type(pi).__name__, label))


def subproof_at(pi: ProofTerm, path: tuple) -> ProofTerm:
    for label in path:
        for lab, child in proof_children(pi):
            if lab == label:
                pi = child
                break
        else:
            raise KeyError(path)
    return pi


def replace_at(pi: ProofTerm, path: tuple, new: ProofTerm) -> ProofTerm:
    if not path:
        return new
    head, rest = path[0], path[1:]
    for lab, child in proof_children(pi):
        if lab == head:
            return replace_child(pi, head, replace_at(child, rest, new))
    raise KeyError(path)
