"""Simply typed term language: sorts, signatures, lambda terms, substitution.

Terms are immutable.  Everything downstream compares terms up to
alpha-equivalence (never with ==, which is name-sensitive on binders) and
keeps them beta-normal: any operation that can create a beta redex
renormalizes before returning.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from .errors import FuelError, SortError

PROP_SORT = "o"
DEFAULT_BETA_FUEL = 10**6


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class Base:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Arrow:
    left: "Ty"
    right: "Ty"

    def __str__(self) -> str:
        l = f"({self.left})" if isinstance(self.left, Arrow) else str(self.left)
        return f"{l} -> {self.right}"


Ty = Union[Base, Arrow]

O = Base(PROP_SORT)


def is_term_type(ty: Ty) -> bool:
    """True when the proposition sort does not occur anywhere in ty."""
    match ty:
        case Base(name):
            return name != PROP_SORT
        case Arrow(l, r):
            return is_term_type(l) and is_term_type(r)
    raise TypeError(ty)


def arrow(args: Iterable[Ty], result: Ty) -> Ty:
    ty = result
    for a in reversed(list(args)):
        ty = Arrow(a, ty)
    return ty


def unarrow(ty: Ty) -> tuple[list[Ty], Ty]:
    """Split gamma1 -> ... -> gamman -> delta into ([gamma...], delta)."""
    args: list[Ty] = []
    while isinstance(ty, Arrow):
        args.append(ty.left)
        ty = ty.right
    return args, ty


def is_predicate_type(ty: Ty) -> bool:
    """gamma1 -> ... -> gamman -> o with every gamma_i a term type."""
    args, res = unarrow(ty)
    return res == O and all(is_term_type(a) for a in args)


# ---------------------------------------------------------------- signature

class Signature:
    """Declared sorts, term constants, and predicate constants.

    Immutable by convention; extension returns a fresh Signature.
    """

    def __init__(self, sorts: Iterable[str] = (),
                 constants: Optional[Mapping[str, Ty]] = None,
                 predicates: Optional[Mapping[str, Ty]] = None):
        self.sorts = frozenset(sorts)
        self.constants = dict(constants or {})
        self.predicates = dict(predicates or {})
        if PROP_SORT in self.sorts:
            raise SortError("the proposition sort 'o' cannot be declared")
        overlap = self.constants.keys() & self.predicates.keys()
        if overlap:
            raise SortError(f"names declared twice: {sorted(overlap)}")
        for name, ty in self.constants.items():
            if not is_term_type(ty):
                raise SortError(f"constant {name}: type {ty} mentions 'o'")
            self._check_sorts_declared(name, ty)
        for name, ty in self.predicates.items():
            if not is_predicate_type(ty):
                raise SortError(f"predicate {name}: {ty} is not gamma* -> o")
            self._check_sorts_declared(name, ty)

    def _check_sorts_declared(self, owner: str, ty: Ty) -> None:
        match ty:
            case Base(name):
                if name != PROP_SORT and name not in self.sorts:
                    raise SortError(f"{owner}: sort {name} not declared")
            case Arrow(l, r):
                self._check_sorts_declared(owner, l)
                self._check_sorts_declared(owner, r)

    def with_sort(self, name: str) -> "Signature":
        return Signature(self.sorts | {name}, self.constants, self.predicates)

    def with_constant(self, name: str, ty: Ty) -> "Signature":
        return Signature(self.sorts, {**self.constants, name: ty}, self.predicates)

    def with_predicate(self, name: str, ty: Ty) -> "Signature":
        return Signature(self.sorts, self.constants, {**self.predicates, name: ty})


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Con:
    name: str


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Lam:
    var: str
    var_ty: Ty
    body: "Term"


Term = Union[Var, Con, App, Lam]


def app(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Decompose nested applications into (head, [arg...])."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def free_vars(t: Term) -> frozenset[str]:
    match t:
        case Var(name):
            return frozenset((name,))
        case Con(_):
            return frozenset()
        case App(fn, arg):
            return free_vars(fn) | free_vars(arg)
        case Lam(var, _, body):
            return free_vars(body) - {var}
    raise TypeError(t)


def fresh(base: str, avoid: Iterable[str]) -> str:
    """Deterministic fresh name: base itself if unused, else base1, base2..."""
    avoid = set(avoid)
    if base not in avoid:
        return base
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def subst_raw(t: Term, mapping: Mapping[str, Term]) -> Term:
    """Capture-avoiding simultaneous substitution; does not renormalize."""
    if not mapping:
        return t
    match t:
        case Var(name):
            return mapping.get(name, t)
        case Con(_):
            return t
        case App(fn, arg):
            return App(subst_raw(fn, mapping), subst_raw(arg, mapping))
        case Lam(var, var_ty, body):
            inner = {k: v for k, v in mapping.items() if k != var}
            if not inner:
                return t
            ran_fv: set[str] = set()
            for v in inner.values():
                ran_fv |= free_vars(v)
            if var in ran_fv:
                nv = fresh(var, ran_fv | free_vars(body) | set(inner))
                body = subst_raw(body, {var: Var(nv)})
                var = nv
            return Lam(var, var_ty, subst_raw(body, inner))
    raise TypeError(t)


def alpha_eq(t: Term, u: Term) -> bool:
    return _alpha_eq(t, u, {}, {}, 0)


def _alpha_eq(t: Term, u: Term, envt: dict, envu: dict, depth: int) -> bool:
    match t, u:
        case Var(a), Var(b):
            return envt.get(a, a) == envu.get(b, b)
        case Con(a), Con(b):
            return a == b
        case App(f1, a1), App(f2, a2):
            return (_alpha_eq(f1, f2, envt, envu, depth)
                    and _alpha_eq(a1, a2, envt, envu, depth))
        case Lam(v1, ty1, b1), Lam(v2, ty2, b2):
            if ty1 != ty2:
                return False
            return _alpha_eq(b1, b2, {**envt, v1: depth}, {**envu, v2: depth},
                             depth + 1)
    return False


class _Fuel:
    __slots__ = ("left", "what")

    def __init__(self, amount: int, what: str):
        self.left = amount
        self.what = what

    def tick(self) -> None:
        if self.left <= 0:
            raise FuelError(f"{self.what} fuel exhausted")
        self.left -= 1


def beta_normalize(t: Term, fuel: int = DEFAULT_BETA_FUEL) -> Term:
    """Normal-order beta normalization (terminates on well-sorted input)."""
    return _nf(t, _Fuel(fuel, "beta"))


def _nf(t: Term, fuel: _Fuel) -> Term:
    match t:
        case Var(_) | Con(_):
            return t
        case Lam(var, var_ty, body):
            return Lam(var, var_ty, _nf(body, fuel))
        case App(fn, arg):
            fn = _whnf(fn, fuel)
            if isinstance(fn, Lam):
                fuel.tick()
                return _nf(subst_raw(fn.body, {fn.var: arg}), fuel)
            return App(_nf(fn, fuel), _nf(arg, fuel))
    raise TypeError(t)


def _whnf(t: Term, fuel: _Fuel) -> Term:
    while isinstance(t, App):
        fn = _whnf(t.fn, fuel)
        if isinstance(fn, Lam):
            fuel.tick()
            t = subst_raw(fn.body, {fn.var: t.arg})
        else:
            return App(fn, t.arg) if fn is not t.fn else t
    return t


def infer_term_type(sig: Signature, ctx: Mapping[str, Ty], t: Term) -> Ty:
    """Type of t, or SortError.  ctx maps free variables to term types."""
    match t:
        case Var(name):
            if name not in ctx:
                raise SortError(f"unbound variable {name}")
            return ctx[name]
        case Con(name):
            if name not in sig.constants:
                raise SortError(f"unknown constant {name}")
            return sig.constants[name]
        case App(fn, arg):
            fty = infer_term_type(sig, ctx, fn)
            if not isinstance(fty, Arrow):
                raise SortError(f"applying non-function of type {fty}")
            aty = infer_term_type(sig, ctx, arg)
            if aty != fty.left:
                raise SortError(
                    f"argument type {aty} does not match expected {fty.left}")
            return fty.right
        case Lam(var, var_ty, body):
            if not is_term_type(var_ty):
                raise SortError(f"lambda binder {var}: {var_ty} mentions 'o'")
            return Arrow(var_ty, infer_term_type(sig, {**ctx, var: var_ty}, body))
    raise TypeError(t)


# ---------------------------------------------------------------- substitutions

class TermSubst:
    """Finite map from variables to beta-normal terms, total-identity outside.

    Application renormalizes.  Composition is union-domain so that
    t.(s1 o s2) == (t.s1).s2 for every t.
    """

    __slots__ = ("map",)

    def __init__(self, mapping: Optional[Mapping[str, Term]] = None):
        self.map = dict(mapping or {})

    def __repr__(self) -> str:
        inside = ", ".join(f"{k} := {v}" for k, v in sorted(self.map.items()))
        return f"{{{inside}}}"

    def __bool__(self) -> bool:
        return bool(self.map)

    def domain(self) -> frozenset[str]:
        return frozenset(self.map)

    def get(self, name: str) -> Term:
        return self.map.get(name, Var(name))

    def range_free_vars(self) -> frozenset[str]:
        out: set[str] = set()
        for v in self.map.values():
            out |= free_vars(v)
        return frozenset(out)

    def apply(self, t: Term, fuel: int = DEFAULT_BETA_FUEL) -> Term:
        if not self.map:
            return t
        return beta_normalize(subst_raw(t, self.map), fuel)

    def compose(self, after: "TermSubst") -> "TermSubst":
        """sigma such that t.sigma == (t.self).after for all t."""
        out = {x: after.apply(v) for x, v in self.map.items()}
        for x, v in after.map.items():
            if x not in out:
                out[x] = v
        return TermSubst(out)

    def restrict(self, names: Iterable[str]) -> "TermSubst":
        keep = set(names)
        return TermSubst({k: v for k, v in self.map.items() if k in keep})

    def items(self):
        return self.map.items()


def subst_eq(a: TermSubst, b: TermSubst) -> bool:
    """Equality as finite maps up to alpha (identity bindings ignored)."""
    def significant(s: TermSubst) -> dict:
        return {k: v for k, v in s.map.items() if v != Var(k)}
    ma, mb = significant(a), significant(b)
    if ma.keys() != mb.keys():
        return False
    return all(alpha_eq(ma[k], mb[k]) for k in ma)
