"""Bidirectional proof checking, with every side condition read modulo the
rewrite congruence.

Inference handles variables, applications, projections, reflexivity, the
equality eliminator, fixed-point nodes that carry enough data, and annotated
lambdas; everything else is checked against a goal.  Elimination rules
rewrite-normalize the inferred formula of the major premise to expose the
connective, so a hypothesis whose head is a defined atom can be eliminated
as the formula it unfolds to.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .errors import (CheckError, DemandAnnotation, FuelError, KernelError,
                     SortError)
from .formulas import (
    All, And, Bot, Eq, Ex, Formula, Imp, Mu, MuPred, Nu, NuPred, Or, Pred,
    Top, apply_pred, check_formula, check_monotonic, check_operator,
    check_pred, formula_free_vars, instantiate_operator, operator_free_vars,
    pred_free_vars, pred_param_types, subst_formula,
)
from .proofs import (
    Abort, Asc, Case, Context, EqCase, ExCase, Fst, Inl, Inr, MuElim,
    MuIntro, NuElim, NuIntro, PApp, PLam, Pair, PrfVar, ProofSubst,
    ProofTerm, Refl, Snd, TApp, TLam, Unit, Wit, proof_free_proof_vars,
    proof_free_term_vars, subst_proof_in_proof, subst_term_in_proof,
)
from .rewriting import (
    DEFAULT_REWRITE_FUEL, EMPTY_SYSTEM, RewriteSystem, TrustLog,
    congruent_formulas, congruent_terms, infer_pattern_types,
    rw_normalize_formula, rw_normalize_term,
)
from .terms import Signature, Term, TermSubst, Ty, Var, fresh, infer_term_type
from .unification import factor_subst, in_constructor_fragment, syntactic_mgu

DEFAULT_PROOF_FUEL = 10**5


@dataclass
class CheckStats:
    steps: int = 0
    conversions: int = 0


class ProofChecker:
    """Trusted core.  Holds the signature, the rewrite system, fuel, and a
    trust log recording every assumption the verdict depends on."""

    def __init__(self, sig: Signature, rs: RewriteSystem = EMPTY_SYSTEM,
                 trust: Optional[TrustLog] = None,
                 rw_fuel: int = DEFAULT_REWRITE_FUEL,
                 step_fuel: int = DEFAULT_PROOF_FUEL):
        self.sig = sig
        self.rs = rs
        self.trust = trust if trust is not None else TrustLog()
        self.rw_fuel = rw_fuel
        self.step_fuel = step_fuel
        self.stats = CheckStats()

    # ------------------------------------------------------------ helpers

    def _tick(self, path: tuple) -> None:
        self.stats.steps += 1
        if self.stats.steps > self.step_fuel:
            raise FuelError(f"proof checking exceeded {self.step_fuel} steps "
                            f"at {path}")

    def expose(self, f: Formula) -> Formula:
        return rw_normalize_formula(self.rs, f, self.rw_fuel)

    def conv(self, a: Formula, b: Formula) -> bool:
        self.stats.conversions += 1
        return congruent_formulas(self.rs, a, b, self.rw_fuel)

    def conv_terms(self, a: Term, b: Term) -> bool:
        self.stats.conversions += 1
        return congruent_terms(self.rs, a, b, self.rw_fuel)

    def _term_type(self, tenv: Mapping[str, Ty], t: Term, path: tuple) -> Ty:
        try:
            return infer_term_type(self.sig, tenv, t)
        except SortError as e:
            raise CheckError(f"ill-sorted term: {e}", path) from e

    def _wf(self, tenv: Mapping[str, Ty], f: Formula, path: tuple) -> None:
        try:
            check_formula(self.sig, dict(tenv), f)
        except SortError as e:
            raise CheckError(f"ill-formed formula: {e}", path) from e

    # ------------------------------------------------------------ check

    def check_theorem(self, pi: ProofTerm, goal: Formula,
                      ctx: Optional[Context] = None,
                      tenv: Optional[Mapping[str, Ty]] = None) -> None:
        tenv = dict(tenv or {})
        ctx = ctx or Context()
        for _, f in ctx:
            self._wf(tenv, f, ())
        self._wf(tenv, goal, ())
        self.check(ctx, tenv, pi, goal, ())

    def check(self, ctx: Context, tenv: Mapping[str, Ty], pi: ProofTerm,
              goal: Formula, path: tuple = ()) -> None:
        self._tick(path)
        match pi:
            case Unit():
                if not isinstance(self.expose(goal), Top):
                    raise CheckError("unit proves only the true formula", path)
                return
            case Abort(body):
                self.check(ctx, tenv, body, Bot(), path + (("body",),))
                return
            case PLam(var, body, ann):
                if ann is not None and not self.conv(ann, goal):
                    raise CheckError("annotation does not match the goal", path)
                g = self.expose(goal)
                if not isinstance(g, Imp):
                    raise CheckError(
                        f"lambda against non-implication {describe(g)}", path)
                var, body = self._fresh_hyp(ctx, var, body)
                self.check(ctx.extend(var, g.left), tenv, body, g.right,
                           path + (("body",),))
                return
            case Pair(l, r):
                g = self.expose(goal)
                if not isinstance(g, And):
                    raise CheckError(
                        f"pair against non-conjunction {describe(g)}", path)
                self.check(ctx, tenv, l, g.left, path + (("left",),))
                self.check(ctx, tenv, r, g.right, path + (("right",),))
                return
            case Inl(body):
                g = self.expose(goal)
                if not isinstance(g, Or):
                    raise CheckError(
                        f"left injection against non-disjunction {describe(g)}",
                        path)
                self.check(ctx, tenv, body, g.left, path + (("body",),))
                return
            case Inr(body):
                g = self.expose(goal)
                if not isinstance(g, Or):
                    raise CheckError(
                        f"right injection against non-disjunction {describe(g)}",
                        path)
                self.check(ctx, tenv, body, g.right, path + (("body",),))
                return
            case Case(scrut, lv, lb, rv, rb):
                s_ty = self.expose(self.infer(ctx, tenv, scrut,
                                              path + (("scrut",),)))
                if not isinstance(s_ty, Or):
                    raise CheckError(
                        f"case scrutinee has non-disjunction type "
                        f"{describe(s_ty)}", path)
                lv, lb = self._fresh_hyp(ctx, lv, lb)
                rv, rb = self._fresh_hyp(ctx, rv, rb)
                self.check(ctx.extend(lv, s_ty.left), tenv, lb, goal,
                           path + (("lbody",),))
                self.check(ctx.extend(rv, s_ty.right), tenv, rb, goal,
                           path + (("rbody",),))
                return
            case TLam(var, body, ann):
                if ann is not None and not self.conv(ann, goal):
                    raise CheckError("annotation does not match the goal", path)
                g = self.expose(goal)
                if not isinstance(g, All):
                    raise CheckError(
                        f"generalization against non-universal {describe(g)}",
                        path)
                y, body = self._eigen(var, set(tenv) | ctx.free_term_vars()
                                      | formula_free_vars(g), body)
                inst = subst_formula(g.body, TermSubst({g.var: Var(y)}))
                self.check(ctx, {**tenv, y: g.var_ty}, body, inst,
                           path + (("body",),))
                return
            case Wit(t, body):
                g = self.expose(goal)
                if not isinstance(g, Ex):
                    raise CheckError(
                        f"witness against non-existential {describe(g)}", path)
                ty = self._term_type(tenv, t, path)
                if ty != g.var_ty:
                    raise CheckError(
                        f"witness has sort {ty}, bound expects {g.var_ty}",
                        path)
                inst = subst_formula(g.body, TermSubst({g.var: t}))
                self.check(ctx, tenv, body, inst, path + (("body",),))
                return
            case ExCase(scrut, tv, pv, body):
                s_ty = self.expose(self.infer(ctx, tenv, scrut,
                                              path + (("scrut",),)))
                if not isinstance(s_ty, Ex):
                    raise CheckError(
                        f"unpacking a non-existential {describe(s_ty)}", path)
                y, body = self._eigen(
                    tv, set(tenv) | ctx.free_term_vars()
                    | formula_free_vars(goal) | formula_free_vars(s_ty), body)
                pv, body = self._fresh_hyp(ctx, pv, body)
                hyp = subst_formula(s_ty.body, TermSubst({s_ty.var: Var(y)}))
                self.check(ctx.extend(pv, hyp), {**tenv, y: s_ty.var_ty},
                           body, goal, path + (("body",),))
                return
            case Refl(t):
                g = self.expose(goal)
                if not isinstance(g, Eq):
                    raise CheckError(
                        f"reflexivity against non-equation {describe(g)}", path)
                self._term_type(tenv, t, path)
                if not (self.conv_terms(t, g.lhs) and self.conv_terms(t, g.rhs)):
                    raise CheckError(
                        "reflexivity: sides are not congruent to the witness",
                        path)
                return
            case NuIntro(inv, seed, tvars, pvar, step):
                g = self.expose(goal)
                if not isinstance(g, Nu):
                    raise CheckError(
                        f"coinduction against non-nu goal {describe(g)}", path)
                self._check_pred(tenv, inv, path)
                if pred_param_types(inv) != tuple(ty for _, ty in g.op.params):
                    raise CheckError(
                        "invariant arity or sorts do not match the fixed point",
                        path)
                self.check(ctx, tenv, seed, apply_pred(inv, g.args),
                           path + (("seed",),))
                xs, pvar, step = self._fresh_fix_binders(
                    ctx, tenv, tvars, pvar, step, inv, g.op)
                xvars = tuple(Var(x) for x in xs)
                tenv2 = {**tenv, **{x: ty for x, (_, ty)
                                    in zip(xs, g.op.params)}}
                self.check(ctx.extend(pvar, apply_pred(inv, xvars)),
                           tenv2, step,
                           instantiate_operator(g.op, inv, xvars),
                           path + (("step",),))
                return
            case Asc(body, formula):
                if not self.conv(formula, goal):
                    raise CheckError("ascription does not match the goal", path)
                self._wf(tenv, formula, path)
                self.check(ctx, tenv, body, formula, path + (("body",),))
                return
        got = self.infer(ctx, tenv, pi, path)
        if not self.conv(got, goal):
            raise CheckError(
                f"proved {describe(got)} where {describe(goal)} was required",
                path)

    # ------------------------------------------------------------ infer

    def infer(self, ctx: Context, tenv: Mapping[str, Ty], pi: ProofTerm,
              path: tuple = ()) -> Formula:
        self._tick(path)
        match pi:
            case PrfVar(name):
                f = ctx.lookup(name)
                if f is None:
                    raise CheckError(f"unknown hypothesis {name}", path)
                return f
            case Unit():
                return Top()
            case PLam(var, body, ann) if ann is not None:
                g = self.expose(ann)
                if not isinstance(g, Imp):
                    raise CheckError(
                        "lambda annotation is not an implication", path)
                self._wf(tenv, ann, path)
                var, body = self._fresh_hyp(ctx, var, body)
                self.check(ctx.extend(var, g.left), tenv, body, g.right,
                           path + (("body",),))
                return ann
            case TLam(var, body, ann) if ann is not None:
                g = self.expose(ann)
                if not isinstance(g, All):
                    raise CheckError(
                        "lambda annotation is not a universal", path)
                self._wf(tenv, ann, path)
                y, body = self._eigen(var, set(tenv) | ctx.free_term_vars()
                                      | formula_free_vars(g), body)
                inst = subst_formula(g.body, TermSubst({g.var: Var(y)}))
                self.check(ctx, {**tenv, y: g.var_ty}, body, inst,
                           path + (("body",),))
                return ann
            case PApp(fn, arg):
                fn_ty = self.expose(self.infer(ctx, tenv, fn,
                                               path + (("fn",),)))
                if not isinstance(fn_ty, Imp):
                    raise CheckError(
                        f"applying a non-implication {describe(fn_ty)}", path)
                self.check(ctx, tenv, arg, fn_ty.left, path + (("arg",),))
                return fn_ty.right
            case Pair(l, r):
                return And(self.infer(ctx, tenv, l, path + (("left",),)),
                           self.infer(ctx, tenv, r, path + (("right",),)))
            case Fst(body):
                ty = self.expose(self.infer(ctx, tenv, body,
                                            path + (("body",),)))
                if not isinstance(ty, And):
                    raise CheckError(
                        f"projecting a non-conjunction {describe(ty)}", path)
                return ty.left
            case Snd(body):
                ty = self.expose(self.infer(ctx, tenv, body,
                                            path + (("body",),)))
                if not isinstance(ty, And):
                    raise CheckError(
                        f"projecting a non-conjunction {describe(ty)}", path)
                return ty.right
            case TApp(fn, t):
                fn_ty = self.expose(self.infer(ctx, tenv, fn,
                                               path + (("fn",),)))
                if not isinstance(fn_ty, All):
                    raise CheckError(
                        f"instantiating a non-universal {describe(fn_ty)}",
                        path)
                ty = self._term_type(tenv, t, path)
                if ty != fn_ty.var_ty:
                    raise CheckError(
                        f"instance has sort {ty}, bound expects "
                        f"{fn_ty.var_ty}", path)
                return subst_formula(fn_ty.body, TermSubst({fn_ty.var: t}))
            case Refl(t):
                self._term_type(tenv, t, path)
                return Eq(t, t)
            case EqCase():
                return self._infer_eqcase(ctx, tenv, pi, path)
            case MuIntro(op, args, body):
                self._check_operator(tenv, op, path)
                self._check_pred_args(tenv, op, args, path)
                self.check(ctx, tenv, body,
                           instantiate_operator(op, MuPred(op), args),
                           path + (("body",),))
                return Mu(op, args)
            case MuElim(inv, major, tvars, pvar, step):
                m_ty = self.expose(self.infer(ctx, tenv, major,
                                              path + (("major",),)))
                if not isinstance(m_ty, Mu):
                    raise CheckError(
                        f"induction on non-mu major {describe(m_ty)}", path)
                self._check_pred(tenv, inv, path)
                if pred_param_types(inv) != tuple(ty for _, ty
                                                  in m_ty.op.params):
                    raise CheckError(
                        "invariant arity or sorts do not match the fixed "
                        "point", path)
                xs, pvar, step = self._fresh_fix_binders(
                    ctx, tenv, tvars, pvar, step, inv, m_ty.op)
                xvars = tuple(Var(x) for x in xs)
                tenv2 = {**tenv, **{x: ty for x, (_, ty)
                                    in zip(xs, m_ty.op.params)}}
                self.check(ctx.extend(pvar,
                                      instantiate_operator(m_ty.op, inv,
                                                           xvars)),
                           tenv2, step, apply_pred(inv, xvars),
                           path + (("step",),))
                return apply_pred(inv, m_ty.args)
            case NuElim(op, args, body):
                self._check_operator(tenv, op, path)
                self._check_pred_args(tenv, op, args, path)
                self.check(ctx, tenv, body, Nu(op, args), path + (("body",),))
                return instantiate_operator(op, NuPred(op), args)
            case Asc(body, formula):
                self._wf(tenv, formula, path)
                self.check(ctx, tenv, body, formula, path + (("body",),))
                return formula
        raise CheckError(
            f"cannot infer a formula for {type(pi).__name__}; "
            f"ascribe one with (proof : formula)", path)

    # ------------------------------------------------------------ eq elim

    def _infer_eqcase(self, ctx: Context, tenv: Mapping[str, Ty],
                      node: EqCase, path: tuple) -> Formula:
        tenv0 = self._sealed_env(node, tenv, path)
        for _, f in node.ctx0:
            self._wf(tenv0, f, path)
        self._wf(tenv0, node.motive, path)
        lt = self._term_type(tenv0, node.lhs, path)
        rt = self._term_type(tenv0, node.rhs, path)
        if lt != rt:
            raise CheckError(
                f"equation sides have sorts {lt} and {rt}", path)

        # the pending substitutions move the suspended sequent into the
        # ambient one
        eq_here = subst_formula(Eq(node.lhs, node.rhs), node.theta)
        self._wf(tenv, eq_here, path)
        self.check(ctx, tenv, node.major, eq_here, path + (("major",),))
        if node.sigma.domain() != node.ctx0.domain():
            raise CheckError(
                "proof substitution must cover exactly the suspended "
                "hypotheses", path)
        for name, f in node.ctx0:
            f_here = subst_formula(f, node.theta)
            self._wf(tenv, f_here, path)
            self.check(ctx, tenv, node.sigma.get(name), f_here,
                       path + (("sigma", name),))

        self._check_csu(node, path)

        for i, (sub, body) in enumerate(node.branches):
            env_i = self._branch_env(tenv0, sub, path, i)
            bctx = node.ctx0.subst(sub)
            self.check(bctx, env_i, body, subst_formula(node.motive, sub),
                       path + (("branch", i),))

        out = subst_formula(node.motive, node.theta)
        self._wf(tenv, out, path)
        return out

    def _sealed_env(self, node: EqCase, tenv: Mapping[str, Ty],
                    path: tuple) -> dict[str, Ty]:
        """Sorts of the suspended sequent's variables, recovered from the
        predicate signatures and the equation itself.  A variable the
        pending substitution does not move names the ambient one, so its
        ambient sort carries over; a moved variable is anchored by its
        image, whose ambient sort the substitution preserved."""
        goal_vars: set[str] = set(free_vars_all(node))
        env: dict[str, Ty] = {x: tenv[x] for x in goal_vars
                              if x not in node.theta.domain() and x in tenv}
        changed = True
        while changed:
            changed = False
            before = dict(env)
            for _, f in node.ctx0:
                _gather_formula_types(self.sig, f, env)
            _gather_formula_types(self.sig, node.motive, env)
            _gather_eq_types(self.sig, node.lhs, node.rhs, env)
            for x in goal_vars - set(env):
                if x in node.theta.domain():
                    try:
                        env[x] = infer_term_type(self.sig, tenv,
                                                 node.theta.get(x))
                    except KernelError:
                        pass
            if env != before:
                changed = True
        missing = goal_vars - set(env)
        if missing:
            raise DemandAnnotation(
                f"cannot infer sorts of {sorted(missing)} in the equality "
                f"eliminator")
        return env

    def _branch_env(self, tenv0: Mapping[str, Ty], sub: TermSubst,
                    path: tuple, i: int) -> dict[str, Ty]:
        env: dict[str, Ty] = {x: ty for x, ty in tenv0.items()
                              if x not in sub.domain()}
        for x in sub.domain():
            if x not in tenv0:
                continue
            try:
                infer_pattern_types(self.sig, sub.get(x), tenv0[x], env)
            except Exception as e:
                raise CheckError(
                    f"branch {i}: cannot sort the unifier image of {x}: {e}",
                    path) from e
        return env

    def _check_csu(self, node: EqCase, path: tuple) -> None:
        u = rw_normalize_term(self.rs, node.lhs, self.rw_fuel)
        v = rw_normalize_term(self.rs, node.rhs, self.rw_fuel)
        # soundness of every provided unifier
        for i, (sub, _) in enumerate(node.branches):
            if not self.conv_terms(sub.apply(node.lhs), sub.apply(node.rhs)):
                raise CheckError(
                    f"branch {i}: substitution does not unify the equation",
                    path)
        if in_constructor_fragment(self.rs, u) and \
                in_constructor_fragment(self.rs, v):
            mgu = syntactic_mgu([(u, v)])
            if mgu is None:
                return  # no unifiers; any sound branch list covers the set
            for sub, _ in node.branches:
                if factor_subst(self.rs, mgu, sub, self.rw_fuel) is not None:
                    return
            raise CheckError(
                "branch list misses the most general unifier of the "
                "equation", path)
        # outside the fragment the provided set is trusted to be complete
        if not node.branches and syntactic_mgu([(u, v)]) is not None:
            raise CheckError(
                "empty branch list, but the equation has a unifier", path)
        self.trust.add(
            "AssumedComplete",
            f"user-supplied unifier set for an equation outside the "
            f"constructor fragment ({len(node.branches)} branches)")

    # ------------------------------------------------------------ binders

    def _eigen(self, var: str, decision: set, body: ProofTerm
               ) -> tuple[str, ProofTerm]:
        """Eigenvariable renaming: forced by the ambient world only, but the
        replacement must also be new for the body."""
        if var not in decision:
            return var, body
        y = fresh(var, decision | proof_free_term_vars(body))
        return y, subst_term_in_proof(body, TermSubst({var: Var(y)}))

    def _fresh_hyp(self, ctx: Context, name: str, body: ProofTerm
                   ) -> tuple[str, ProofTerm]:
        if ctx.lookup(name) is None:
            return name, body
        new = fresh(name, ctx.domain() | proof_free_proof_vars(body))
        return new, subst_proof_in_proof(body, ProofSubst({name: PrfVar(new)}))

    def _fresh_fix_binders(self, ctx: Context, tenv: Mapping[str, Ty],
                           tvars: tuple[str, ...], pvar: str,
                           step: ProofTerm, inv: Pred, op) -> tuple:
        # the binder may of course occur in its own body; renaming is only
        # forced by the ambient sequent, the invariant, and the operator
        ambient = (set(tenv) | ctx.free_term_vars() | pred_free_vars(inv)
                   | operator_free_vars(op))
        xs: list[str] = []
        ren: dict[str, Term] = {}
        for x in tvars:
            if x in ambient or x in xs:
                nx = fresh(x, ambient | proof_free_term_vars(step)
                           | set(tvars) | set(xs))
                ren[x] = Var(nx)
                xs.append(nx)
            else:
                xs.append(x)
        if ren:
            step = subst_term_in_proof(step, TermSubst(ren))
        pvar, step = self._fresh_hyp(ctx, pvar, step)
        return tuple(xs), pvar, step

    def _check_pred(self, tenv: Mapping[str, Ty], p: Pred, path: tuple) -> None:
        try:
            check_pred(self.sig, dict(tenv), p)
        except SortError as e:
            raise CheckError(f"bad invariant predicate: {e}", path) from e

    def _check_operator(self, tenv: Mapping[str, Ty], op, path: tuple) -> None:
        try:
            check_operator(self.sig, dict(tenv), op, {})
            check_monotonic(op)
        except SortError as e:
            raise CheckError(f"bad fixed-point operator: {e}", path) from e

    def _check_pred_args(self, tenv: Mapping[str, Ty], op,
                         args: tuple[Term, ...], path: tuple) -> None:
        if len(args) != len(op.params):
            raise CheckError(
                f"fixed point expects {len(op.params)} arguments, got "
                f"{len(args)}", path)
        for a, (_, ty) in zip(args, op.params):
            got = self._term_type(tenv, a, path)
            if got != ty:
                raise CheckError(
                    f"fixed-point argument has sort {got}, expected {ty}",
                    path)


# ---------------------------------------------------------------- sealed sorts

def free_vars_all(node: EqCase) -> frozenset[str]:
    out = set(formula_free_vars(node.motive))
    for _, f in node.ctx0:
        out |= formula_free_vars(f)
    from .terms import free_vars as tfv
    out |= tfv(node.lhs) | tfv(node.rhs)
    return frozenset(out)


def _gather_term_types(sig: Signature, t: Term, expected: Ty,
                       env: dict[str, Ty]) -> None:
    try:
        infer_pattern_types(sig, t, expected, env)
    except Exception:
        pass  # conflicting or higher-order shapes surface later as wf errors


def _result_type(sig: Signature, t: Term, env: Mapping[str, Ty]
                 ) -> Optional[Ty]:
    """Sort of t when it is determined without knowing the variables."""
    from .terms import App as App_, Arrow, Con as Con_, Var as Var_, spine
    match t:
        case Var_(n):
            return env.get(n)
        case Con_(n):
            return sig.constants.get(n)
        case App_(_, _):
            head, args = spine(t)
            if not isinstance(head, Con_) or head.name not in sig.constants:
                return None
            ty: Ty = sig.constants[head.name]
            for _ in args:
                if not isinstance(ty, Arrow):
                    return None
                ty = ty.right
            return ty
    return None


def _gather_eq_types(sig: Signature, l: Term, r: Term,
                     env: dict[str, Ty]) -> None:
    ty = _result_type(sig, l, env) or _result_type(sig, r, env)
    if ty is None:
        return
    _gather_term_types(sig, l, ty, env)
    _gather_term_types(sig, r, ty, env)


def _gather_formula_types(sig: Signature, f: Formula,
                          env: dict[str, Ty]) -> None:
    """Best-effort sort recovery for the suspended variables; shadowed
    binders are skipped by working on a copy and merging only unshadowed
    names."""
    from .formulas import Atom, PredVar
    from .terms import unarrow

    def go(f: Formula, shadow: frozenset[str]) -> None:
        match f:
            case Top() | Bot():
                return
            case Imp(l, r) | And(l, r) | Or(l, r):
                go(l, shadow)
                go(r, shadow)
            case All(v, _, b) | Ex(v, _, b):
                go(b, shadow | {v})
            case Eq(l, r):
                local: dict[str, Ty] = {k: v for k, v in env.items()
                                        if k not in shadow}
                _gather_eq_types(sig, l, r, local)
                for k, v in local.items():
                    if k not in shadow:
                        env.setdefault(k, v)
            case Atom(name, args):
                if name in sig.predicates:
                    want, _ = unarrow(sig.predicates[name])
                    _merge_arg_types(sig, args, want, env, shadow)
            case PredVar(_, _):
                return
            case Mu(op, args) | Nu(op, args):
                want = tuple(ty for _, ty in op.params)
                _merge_arg_types(sig, args, want, env, shadow)
                go(op.body, shadow | {n for n, _ in op.params})

    go(f, frozenset())


def _merge_arg_types(sig: Signature, args, want, env: dict[str, Ty],
                     shadow: frozenset[str]) -> None:
    local: dict[str, Ty] = {k: v for k, v in env.items() if k not in shadow}
    for a, w in zip(args, want):
        _gather_term_types(sig, a, w, local)
    for k, v in local.items():
        if k not in shadow:
            env.setdefault(k, v)


# ---------------------------------------------------------------- display

def describe(f: Formula) -> str:
    """Compact one-line rendering for error messages."""
    try:
        from .surface import show_formula
        return show_formula(f)
    except Exception:
        return repr(f)
