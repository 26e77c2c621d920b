"""Surface language for theory files.

A theory file (extension .mnj) is a sequence of declarations processed
strictly in order: sorts, typed constants and predicates, rewrite rules,
recursive definitions, formula abbreviations, and theorems.  This module
provides the lexer, a recursive-descent parser that produces kernel ASTs
directly, and printers whose output re-parses to alpha-equivalent trees.

Abbreviations introduced with `define` are parse-time macros: uses are
expanded on the spot, so everything downstream of the parser sees plain
kernel formulas.  The `subst` proof form is sugar as well; it elaborates
to the suspended equality eliminator before the kernel ever runs.

The grammar is documented in docs/surface.md.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .derived import transport
from .errors import ParseError
from .formulas import (All, And, Atom, Bot, Eq, Ex, Formula, Imp, Mu, MuPred,
                       Nu, NuPred, Or, Pred, PredAbs, PredOperator, PredVar,
                       Top, apply_pred, pred_param_types)
from .proofs import (Abort, Asc, Case, Context, EqCase, ExCase, Fst, Inl, Inr,
                     MuElim, MuIntro, NuElim, NuIntro, PApp, Pair, PLam,
                     PrfVar, ProofSubst, ProofTerm, Refl, Snd, TApp, TLam,
                     Unit, Wit)
from .recdefs import Measure, OrderSpec
from .rewriting import AtomRule, TermRule
from .terms import (App, Arrow, Base, Con, Lam, O, Signature, Term, TermSubst,
                    Ty, Var, spine, unarrow)

__all__ = [
    "Token", "tokenize", "parse", "parse_theory", "TheoryFile",
    "SortDecl", "ConstDecl", "PredDecl", "RewriteDecl", "RecursiveDecl",
    "DefineDecl", "TheoremDecl",
    "show_ty", "show_term", "show_formula", "show_pred", "show_operator",
    "show_proof", "show_rule", "show_decl", "show_theory",
]


# ---------------------------------------------------------------- lexer

@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "sym", or "eof"
    text: str
    line: int
    col: int


# Longest symbols first so the scanner never splits a two-character token.
_SYMBOLS = (":=", "~>", "->", "=>", "/\\", "\\/",
            "(", ")", "{", "}", "[", "]", ",", ";", ".", ":", "=", "|", "\\")

KEYWORDS = frozenset({
    "sort", "const", "pred", "rewrite", "recursive", "by", "define",
    "theorem", "proof", "end", "lex", "subterm", "weak",
    "top", "bot", "forall", "exists", "mu", "nu", "o",
    "unit", "abort", "lam", "app", "pair", "fst", "snd", "inl", "inr",
    "case", "lamx", "tapp", "wit", "dest", "refl", "eqcase", "fold",
    "iter", "coiter", "unfold", "subst", "in",
    "equation", "motive", "context", "major", "cases",
})


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch in "_'"


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(src)
    while i < n:
        ch = src[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and src[i] != "\n":
                i += 1
            continue
        if _is_ident_char(ch):
            j = i
            while j < n and _is_ident_char(src[j]):
                j += 1
            toks.append(Token("ident", src[i:j], line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if src.startswith(sym, i):
                toks.append(Token("sym", sym, line, col))
                col += len(sym)
                i += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("eof", "<eof>", line, col))
    return toks


# ---------------------------------------------------------------- theory AST

@dataclass(frozen=True)
class SortDecl:
    name: str


@dataclass(frozen=True)
class ConstDecl:
    name: str
    ty: Ty


@dataclass(frozen=True)
class PredDecl:
    name: str
    ty: Ty


@dataclass(frozen=True)
class RewriteDecl:
    rule: Union[TermRule, AtomRule]


@dataclass(frozen=True)
class RecursiveDecl:
    heads: tuple[str, ...]
    order: OrderSpec
    rules: tuple[AtomRule, ...]


@dataclass(frozen=True)
class DefineDecl:
    name: str
    pred: Pred


@dataclass(frozen=True)
class TheoremDecl:
    name: str
    formula: Formula
    proof: ProofTerm


Decl = Union[SortDecl, ConstDecl, PredDecl, RewriteDecl, RecursiveDecl,
             DefineDecl, TheoremDecl]


@dataclass(frozen=True)
class TheoryFile:
    decls: tuple[Decl, ...]


# ---------------------------------------------------------------- parser

class _Parser:
    """Recursive descent over the token list.

    The signature and the abbreviation table grow as declarations are
    parsed; later declarations may not mention names that only appear
    further down (no forward references).
    """

    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.i = 0
        self.sig = Signature()
        self.defines: dict[str, Pred] = {}
        self.theorem_names: set[str] = set()

    # -------------------------------------------------- token plumbing

    def peek(self, ahead: int = 0) -> Token:
        j = min(self.i + ahead, len(self.toks) - 1)
        return self.toks[j]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind != "eof"

    def eat(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text or t.kind == "eof":
            self.err(f"expected '{text}', found '{t.text}'", t)
        return t

    def err(self, msg: str, tok: Optional[Token] = None):
        t = tok if tok is not None else self.peek()
        raise ParseError(msg, t.line, t.col)

    def ident(self, what: str) -> str:
        t = self.next()
        if t.kind != "ident" or t.text in KEYWORDS:
            self.err(f"expected {what}, found '{t.text}'", t)
        return t.text

    def posint(self, what: str) -> int:
        t = self.next()
        if t.kind != "ident" or not t.text.isdigit() or int(t.text) < 1:
            self.err(f"expected {what} (a positive integer), "
                     f"found '{t.text}'", t)
        return int(t.text)

    def _fresh_name(self, name: str, tok: Token) -> str:
        if name in self.sig.sorts or name in self.sig.constants \
                or name in self.sig.predicates or name in self.defines:
            self.err(f"'{name}' is already declared", tok)
        return name

    # -------------------------------------------------- declarations

    def theory(self) -> TheoryFile:
        decls: list[Decl] = []
        while self.peek().kind != "eof":
            decls.append(self.decl())
        return TheoryFile(tuple(decls))

    def decl(self) -> Decl:
        t = self.peek()
        match t.text:
            case "sort":
                self.next()
                tok = self.peek()
                name = self._fresh_name(self.ident("a sort name"), tok)
                self.sig = self.sig.with_sort(name)
                return SortDecl(name)
            case "const":
                self.next()
                tok = self.peek()
                name = self._fresh_name(self.ident("a constant name"), tok)
                self.expect(":")
                ty = self.type_()
                self.sig = self.sig.with_constant(name, ty)
                return ConstDecl(name, ty)
            case "pred":
                self.next()
                tok = self.peek()
                name = self._fresh_name(self.ident("a predicate name"), tok)
                self.expect(":")
                ty = self.type_()
                self.sig = self.sig.with_predicate(name, ty)
                return PredDecl(name, ty)
            case "rewrite":
                self.next()
                return RewriteDecl(self.rule())
            case "recursive":
                self.next()
                return self.recursive()
            case "define":
                self.next()
                tok = self.peek()
                name = self._fresh_name(self.ident("an abbreviation name"),
                                        tok)
                self.expect(":=")
                p = self.pred(frozenset(), {})
                self.defines[name] = p
                return DefineDecl(name, p)
            case "theorem":
                self.next()
                tok = self.peek()
                name = self.ident("a theorem name")
                if name in self.theorem_names:
                    self.err(f"theorem '{name}' is already declared", tok)
                self.theorem_names.add(name)
                self.expect(":")
                goal = self.formula(frozenset(), {})
                self.expect("proof")
                pi = self.proof(frozenset(), {})
                self.expect("end")
                return TheoremDecl(name, goal, pi)
            case _:
                self.err(f"expected a declaration, found '{t.text}'", t)

    def rule(self) -> Union[TermRule, AtomRule]:
        t = self.peek()
        if t.kind == "ident" and t.text in self.sig.predicates:
            head = self.next().text
            arity = len(unarrow(self.sig.predicates[head])[0])
            args = tuple(self.targ(frozenset()) for _ in range(arity))
            self.expect("~>")
            rhs = self.formula(frozenset(), {})
            return AtomRule(head, args, rhs)
        lhs = self.term(frozenset())
        self.expect("~>")
        rhs = self.term(frozenset())
        return TermRule(lhs, rhs)

    def recursive(self) -> RecursiveDecl:
        heads = [self.ident("a predicate name")]
        while self.eat(","):
            heads.append(self.ident("a predicate name"))
        for h in heads:
            if h not in self.sig.predicates:
                self.err(f"'{h}' is not a declared predicate")
        self.expect("by")
        self.expect("lex")
        self.expect("(")
        measures: list[Measure] = []
        if not self.at(")"):
            measures.append(self.measure())
            while self.eat(","):
                measures.append(self.measure())
        self.expect(")")
        self.expect("{")
        rules: list[AtomRule] = []
        while self.at("rewrite"):
            self.next()
            tok = self.peek()
            r = self.rule()
            if not isinstance(r, AtomRule) or r.head not in heads:
                self.err("rules of a recursive block must define one of "
                         f"{', '.join(heads)}", tok)
            rules.append(r)
        self.expect("}")
        order = OrderSpec(tuple(measures), tuple(heads))
        return RecursiveDecl(tuple(heads), order, tuple(rules))

    def measure(self) -> Measure:
        t = self.next()
        match t.text:
            case "subterm":
                return Measure(self.posint("an argument position"))
            case "weak":
                return Measure(self.posint("an argument position"),
                               strict=False)
            case _:
                self.err(f"expected 'subterm' or 'weak', found '{t.text}'", t)

    # -------------------------------------------------- types

    def type_(self) -> Ty:
        left = self.tyatom()
        if self.eat("->"):
            return Arrow(left, self.type_())
        return left

    def tyatom(self) -> Ty:
        t = self.next()
        if t.text == "o":
            return O
        if t.text == "(":
            ty = self.type_()
            self.expect(")")
            return ty
        if t.kind == "ident" and t.text not in KEYWORDS:
            if t.text not in self.sig.sorts:
                self.err(f"unknown sort '{t.text}'", t)
            return Base(t.text)
        self.err(f"expected a type, found '{t.text}'", t)

    # -------------------------------------------------- terms

    def term(self, bound: frozenset[str]) -> Term:
        if self.at("\\"):
            self.next()
            v = self.ident("a binder name")
            self.expect(":")
            ty = self.type_()
            self.expect(".")
            return Lam(v, ty, self.term(bound | {v}))
        t = self.targ(bound)
        while self.starts_targ():
            t = App(t, self.targ(bound))
        return t

    def starts_targ(self) -> bool:
        t = self.peek()
        return t.text == "(" or (t.kind == "ident"
                                 and t.text not in KEYWORDS)

    def targ(self, bound: frozenset[str]) -> Term:
        t = self.next()
        if t.text == "(":
            inner = self.term(bound)
            self.expect(")")
            return inner
        if t.kind == "ident" and t.text not in KEYWORDS:
            if t.text not in bound and t.text in self.sig.constants:
                return Con(t.text)
            return Var(t.text)
        self.err(f"expected a term, found '{t.text}'", t)

    def termlist(self, bound: frozenset[str]) -> tuple[Term, ...]:
        self.expect("(")
        if self.eat(")"):
            return ()
        out = [self.term(bound)]
        while self.eat(","):
            out.append(self.term(bound))
        self.expect(")")
        return tuple(out)

    # -------------------------------------------------- formulas

    def formula(self, bound: frozenset[str],
                pvars: dict[str, int]) -> Formula:
        left = self.orf(bound, pvars)
        if self.eat("=>"):
            return Imp(left, self.formula(bound, pvars))
        return left

    def orf(self, bound, pvars) -> Formula:
        left = self.andf(bound, pvars)
        while self.eat("\\/"):
            left = Or(left, self.andf(bound, pvars))
        return left

    def andf(self, bound, pvars) -> Formula:
        left = self.fatom(bound, pvars)
        while self.eat("/\\"):
            left = And(left, self.fatom(bound, pvars))
        return left

    def fatom(self, bound, pvars) -> Formula:
        t = self.peek()
        match t.text:
            case "top":
                self.next()
                return Top()
            case "bot":
                self.next()
                return Bot()
            case "forall":
                self.next()
                return self.quantified(All, bound, pvars)
            case "exists":
                self.next()
                return self.quantified(Ex, bound, pvars)
            case "mu":
                self.next()
                op = self.operator(bound, pvars)
                args = tuple(self.targ(bound) for _ in op.params)
                return Mu(op, args)
            case "nu":
                self.next()
                op = self.operator(bound, pvars)
                args = tuple(self.targ(bound) for _ in op.params)
                return Nu(op, args)
        if t.kind == "ident" and t.text not in KEYWORDS:
            if t.text in pvars:
                self.next()
                args = tuple(self.targ(bound) for _ in range(pvars[t.text]))
                return PredVar(t.text, args)
            if t.text in self.defines and t.text not in bound:
                self.next()
                p = self.defines[t.text]
                n = len(pred_param_types(p))
                args = tuple(self.targ(bound) for _ in range(n))
                return apply_pred(p, args)
            if t.text in self.sig.predicates and t.text not in bound:
                self.next()
                arity = len(unarrow(self.sig.predicates[t.text])[0])
                args = tuple(self.targ(bound) for _ in range(arity))
                return Atom(t.text, args)
        if t.text == "(":
            # A parenthesis may open a grouped formula or the left term
            # of an equation; try the formula reading, back off on '='.
            mark = self.i
            try:
                self.next()
                inner = self.formula(bound, pvars)
                self.expect(")")
                if not self.at("="):
                    return inner
            except ParseError:
                pass
            self.i = mark
        if t.text == "(" or (t.kind == "ident" and t.text not in KEYWORDS):
            lhs = self.term(bound)
            self.expect("=")
            rhs = self.term(bound)
            return Eq(lhs, rhs)
        self.err(f"expected a formula, found '{t.text}'", t)

    def quantified(self, cls, bound, pvars) -> Formula:
        binders: list[tuple[str, Ty]] = []
        while not self.at("."):
            v = self.ident("a binder name")
            self.expect(":")
            binders.append((v, self.type_()))
        if not binders:
            self.err("quantifier needs at least one binder")
        self.expect(".")
        body = self.formula(bound | {v for v, _ in binders}, pvars)
        for v, ty in reversed(binders):
            body = cls(v, ty, body)
        return body

    def operator(self, bound, pvars) -> PredOperator:
        self.expect("(")
        self.expect("\\")
        pv = self.ident("a predicate variable")
        params: list[tuple[str, Ty]] = []
        while not self.at("."):
            v = self.ident("a parameter name")
            self.expect(":")
            params.append((v, self.type_()))
        self.expect(".")
        body = self.formula(bound | {v for v, _ in params},
                            {**pvars, pv: len(params)})
        self.expect(")")
        pvar_ty: Ty = O
        for _, ty in reversed(params):
            pvar_ty = Arrow(ty, pvar_ty)
        return PredOperator(pv, pvar_ty, tuple(params), body)

    def pred(self, bound, pvars) -> Pred:
        t = self.peek()
        if t.kind == "ident" and t.text in self.defines:
            self.next()
            return self.defines[t.text]
        if t.kind == "ident" and t.text in self.sig.predicates \
                and t.text not in bound and not self._arg_follows():
            # eta-expand a predicate constant standing alone
            self.next()
            tys = unarrow(self.sig.predicates[t.text])[0]
            params = tuple((f"x{i}", ty) for i, ty in enumerate(tys))
            return PredAbs(params, Atom(t.text,
                                        tuple(Var(v) for v, _ in params)))
        if t.text == "mu":
            self.next()
            return MuPred(self.operator(bound, pvars))
        if t.text == "nu":
            self.next()
            return NuPred(self.operator(bound, pvars))
        if t.text == "(" and self.peek(1).text == "\\":
            self.next()
            self.next()
            params: list[tuple[str, Ty]] = []
            while not self.at("."):
                v = self.ident("a parameter name")
                self.expect(":")
                params.append((v, self.type_()))
            self.expect(".")
            body = self.formula(bound | {v for v, _ in params}, pvars)
            self.expect(")")
            return PredAbs(tuple(params), body)
        # Bare formula: a zero-parameter predicate.
        return PredAbs((), self.formula(bound, pvars))

    # -------------------------------------------------- proofs

    def proof(self, bound: frozenset[str],
              pvars: dict[str, int]) -> ProofTerm:
        t = self.peek()
        match t.text:
            case "lam":
                self.next()
                h = self.ident("a hypothesis name")
                self.expect(".")
                return PLam(h, self.proof(bound, pvars))
            case "lamx":
                self.next()
                v = self.ident("a variable name")
                self.expect(".")
                return TLam(v, self.proof(bound | {v}, pvars))
            case "abort":
                self.next()
                return Abort(self.patom(bound, pvars))
            case "app":
                self.next()
                fn = self.patom(bound, pvars)
                return PApp(fn, self.patom(bound, pvars))
            case "pair":
                self.next()
                a = self.patom(bound, pvars)
                return Pair(a, self.patom(bound, pvars))
            case "fst":
                self.next()
                return Fst(self.patom(bound, pvars))
            case "snd":
                self.next()
                return Snd(self.patom(bound, pvars))
            case "inl":
                self.next()
                return Inl(self.patom(bound, pvars))
            case "inr":
                self.next()
                return Inr(self.patom(bound, pvars))
            case "case":
                self.next()
                scrut = self.patom(bound, pvars)
                self.expect("(")
                lv = self.ident("a hypothesis name")
                self.expect(".")
                lbody = self.proof(bound, pvars)
                self.expect(")")
                self.expect("(")
                rv = self.ident("a hypothesis name")
                self.expect(".")
                rbody = self.proof(bound, pvars)
                self.expect(")")
                return Case(scrut, lv, lbody, rv, rbody)
            case "tapp":
                self.next()
                fn = self.patom(bound, pvars)
                return TApp(fn, self.targ(bound))
            case "wit":
                self.next()
                w = self.targ(bound)
                return Wit(w, self.patom(bound, pvars))
            case "dest":
                self.next()
                scrut = self.patom(bound, pvars)
                self.expect("(")
                tv = self.ident("a variable name")
                pv = self.ident("a hypothesis name")
                self.expect(".")
                body = self.proof(bound | {tv}, pvars)
                self.expect(")")
                return ExCase(scrut, tv, pv, body)
            case "refl":
                self.next()
                return Refl(self.targ(bound))
            case "fold":
                self.next()
                op = self.fix_operator(bound, pvars, MuPred, "mu")
                args = self.termlist(bound)
                return MuIntro(op, args, self.patom(bound, pvars))
            case "unfold":
                self.next()
                op = self.fix_operator(bound, pvars, NuPred, "nu")
                args = self.termlist(bound)
                return NuElim(op, args, self.patom(bound, pvars))
            case "iter":
                self.next()
                inv, major, tvars, pv, step = self.iter_parts(bound, pvars)
                return MuElim(inv, major, tvars, pv, step)
            case "coiter":
                self.next()
                inv, seed, tvars, pv, step = self.iter_parts(bound, pvars)
                return NuIntro(inv, seed, tvars, pv, step)
            case "eqcase":
                self.next()
                return self.eqcase(bound, pvars)
            case "subst":
                self.next()
                self.expect("[")
                p = self.pred(bound, pvars)
                self.expect("]")
                u = self.targ(bound)
                v = self.targ(bound)
                eq = self.patom(bound, pvars)
                self.expect("in")
                body = self.proof(bound, pvars)
                return transport(p, u, v, eq, body)
        return self.patom(bound, pvars)

    def patom(self, bound, pvars) -> ProofTerm:
        t = self.next()
        if t.text == "unit":
            return Unit()
        if t.text == "(":
            pi = self.proof(bound, pvars)
            if self.eat(":"):
                f = self.formula(bound, pvars)
                self.expect(")")
                return Asc(pi, f)
            self.expect(")")
            return pi
        if t.kind == "ident" and t.text not in KEYWORDS:
            return PrfVar(t.text)
        self.err(f"expected a proof, found '{t.text}'", t)

    def _arg_follows(self) -> bool:
        nxt = self.peek(1)
        return nxt.text == "(" or (nxt.kind == "ident"
                                   and nxt.text not in KEYWORDS)

    def fix_operator(self, bound, pvars, cls, what: str) -> PredOperator:
        """Operator literal, or the name of an abbreviation for the
        matching kind of fixed point."""
        t = self.peek()
        if t.kind == "ident" and t.text in self.defines:
            p = self.defines[t.text]
            if not isinstance(p, cls):
                self.err(f"'{t.text}' does not abbreviate a {what} "
                         "fixed point", t)
            self.next()
            return p.op
        return self.operator(bound, pvars)

    def iter_parts(self, bound, pvars):
        self.expect("[")
        inv = self.pred(bound, pvars)
        self.expect("]")
        major = self.patom(bound, pvars)
        self.expect("(")
        names = [self.ident("a binder name")]
        while not self.at("."):
            names.append(self.ident("a binder name"))
        self.expect(".")
        tvars, pv = tuple(names[:-1]), names[-1]
        step = self.proof(bound | set(tvars), pvars)
        self.expect(")")
        return inv, major, tvars, pv, step

    def term_subst(self, bound) -> TermSubst:
        self.expect("[")
        m: dict[str, Term] = {}
        if not self.at("]"):
            while True:
                tok = self.peek()
                v = self.ident("a variable name")
                if v in m:
                    self.err(f"'{v}' bound twice in a substitution", tok)
                self.expect(":=")
                m[v] = self.term(bound)
                if not self.eat(","):
                    break
        self.expect("]")
        return TermSubst(m)

    def eqcase(self, bound, pvars) -> EqCase:
        self.expect("{")
        self.expect("subst")
        theta = self.term_subst(bound)
        self.expect(";")
        self.expect("equation")
        lhs = self.term(bound)
        self.expect("=")
        rhs = self.term(bound)
        self.expect(";")
        self.expect("motive")
        motive = self.formula(bound, pvars)
        self.expect(";")
        self.expect("context")
        self.expect("(")
        entries: list[tuple[str, Formula]] = []
        sigma: dict[str, ProofTerm] = {}
        if not self.at(")"):
            while True:
                h = self.ident("a hypothesis name")
                self.expect(":")
                f = self.formula(bound, pvars)
                self.expect(":=")
                sigma[h] = self.proof(bound, pvars)
                entries.append((h, f))
                if not self.eat(","):
                    break
        self.expect(")")
        self.expect(";")
        self.expect("major")
        major = self.proof(bound, pvars)
        self.expect(";")
        self.expect("cases")
        self.expect("(")
        branches: list[tuple[TermSubst, ProofTerm]] = []
        if not self.at(")"):
            while True:
                sub = self.term_subst(bound)
                self.expect("->")
                branches.append((sub, self.proof(bound, pvars)))
                if not self.eat("|"):
                    break
        self.expect(")")
        self.expect("}")
        return EqCase(Context(entries), theta, ProofSubst(sigma),
                      lhs, rhs, motive, major, tuple(branches))


def parse_theory(text: str) -> TheoryFile:
    return _Parser(tokenize(text)).theory()


def parse(path: str) -> TheoryFile:
    with open(path, encoding="utf-8") as fh:
        return parse_theory(fh.read())


# ---------------------------------------------------------------- printers

def show_ty(ty: Ty) -> str:
    match ty:
        case Base(name):
            return name
        case Arrow(left, right):
            ls = show_ty(left)
            if isinstance(left, Arrow):
                ls = f"({ls})"
            return f"{ls} -> {show_ty(right)}"
    raise TypeError(ty)


def show_term(t: Term, prec: int = 0) -> str:
    """prec 0 allows abstractions, 1 applications, 2 atoms only."""
    match t:
        case Var(name) | Con(name):
            return name
        case App(fn, arg):
            s = f"{show_term(fn, 1)} {show_term(arg, 2)}"
            return f"({s})" if prec > 1 else s
        case Lam(v, ty, body):
            s = f"\\{v}:{show_ty(ty)}. {show_term(body)}"
            return f"({s})" if prec > 0 else s
    raise TypeError(t)


def _show_args(args: tuple[Term, ...]) -> str:
    return "".join(f" {show_term(a, 2)}" for a in args)


def show_operator(op: PredOperator) -> str:
    binders = "".join(f" {v}:{show_ty(ty)}" for v, ty in op.params)
    return f"(\\{op.pvar}{binders}. {show_formula(op.body)})"


def show_formula(f: Formula, prec: int = 0) -> str:
    """prec 0 implication, 1 disjunction, 2 conjunction, 3 atoms."""
    match f:
        case Top():
            return "top"
        case Bot():
            return "bot"
        case Imp(left, right):
            s = f"{show_formula(left, 1)} => {show_formula(right)}"
            return f"({s})" if prec > 0 else s
        case Or(left, right):
            s = f"{show_formula(left, 1)} \\/ {show_formula(right, 2)}"
            return f"({s})" if prec > 1 else s
        case And(left, right):
            s = f"{show_formula(left, 2)} /\\ {show_formula(right, 3)}"
            return f"({s})" if prec > 2 else s
        case All(v, ty, body):
            s = f"forall {v}:{show_ty(ty)}. {show_formula(body)}"
            return f"({s})" if prec > 0 else s
        case Ex(v, ty, body):
            s = f"exists {v}:{show_ty(ty)}. {show_formula(body)}"
            return f"({s})" if prec > 0 else s
        case Eq(lhs, rhs):
            return f"{show_term(lhs, 1)} = {show_term(rhs, 1)}"
        case Mu(op, args):
            s = f"mu {show_operator(op)}{_show_args(args)}"
            return f"({s})" if prec > 0 else s
        case Nu(op, args):
            s = f"nu {show_operator(op)}{_show_args(args)}"
            return f"({s})" if prec > 0 else s
        case Atom(name, args) | PredVar(name, args):
            return f"{name}{_show_args(args)}"
    raise TypeError(f)


def show_pred(p: Pred) -> str:
    match p:
        case PredAbs(params, body):
            if not params:
                return show_formula(body)
            binders = " ".join(f"{v}:{show_ty(ty)}" for v, ty in params)
            return f"(\\{binders}. {show_formula(body)})"
        case MuPred(op):
            return f"mu {show_operator(op)}"
        case NuPred(op):
            return f"nu {show_operator(op)}"
    raise TypeError(p)


def _show_subst(sub: TermSubst) -> str:
    items = ", ".join(f"{v} := {show_term(t)}"
                      for v, t in sorted(sub.map.items()))
    return f"[{items}]"


def _patom(pi: ProofTerm) -> str:
    s = show_proof(pi)
    if isinstance(pi, (PrfVar, Unit, Asc)):
        return s
    if isinstance(pi, (PLam, TLam)) and pi.ann is not None:
        return s  # printed as an ascription, already parenthesized
    return f"({s})"


def show_proof(pi: ProofTerm) -> str:
    match pi:
        case PrfVar(name):
            return name
        case Unit():
            return "unit"
        case Abort(body):
            return f"abort {_patom(body)}"
        case PLam(v, body, ann):
            s = f"lam {v}. {show_proof(body)}"
            # Annotations have no direct surface form; an ascription
            # checks the same way.
            return f"({s} : {show_formula(ann)})" if ann is not None else s
        case PApp(fn, arg):
            return f"app {_patom(fn)} {_patom(arg)}"
        case Pair(a, b):
            return f"pair {_patom(a)} {_patom(b)}"
        case Fst(body):
            return f"fst {_patom(body)}"
        case Snd(body):
            return f"snd {_patom(body)}"
        case Inl(body):
            return f"inl {_patom(body)}"
        case Inr(body):
            return f"inr {_patom(body)}"
        case Case(scrut, lv, lbody, rv, rbody):
            return (f"case {_patom(scrut)} ({lv}. {show_proof(lbody)}) "
                    f"({rv}. {show_proof(rbody)})")
        case TLam(v, body, ann):
            s = f"lamx {v}. {show_proof(body)}"
            return f"({s} : {show_formula(ann)})" if ann is not None else s
        case TApp(fn, term):
            return f"tapp {_patom(fn)} {show_term(term, 2)}"
        case Wit(term, body):
            return f"wit {show_term(term, 2)} {_patom(body)}"
        case ExCase(scrut, tv, pv, body):
            return f"dest {_patom(scrut)} ({tv} {pv}. {show_proof(body)})"
        case Refl(term):
            return f"refl {show_term(term, 2)}"
        case MuIntro(op, args, body):
            ts = ", ".join(show_term(a) for a in args)
            return f"fold {show_operator(op)} ({ts}) {_patom(body)}"
        case NuElim(op, args, body):
            ts = ", ".join(show_term(a) for a in args)
            return f"unfold {show_operator(op)} ({ts}) {_patom(body)}"
        case MuElim(inv, major, tvars, pv, step):
            names = " ".join((*tvars, pv))
            return (f"iter[{show_pred(inv)}] {_patom(major)} "
                    f"({names}. {show_proof(step)})")
        case NuIntro(inv, seed, tvars, pv, step):
            names = " ".join((*tvars, pv))
            return (f"coiter[{show_pred(inv)}] {_patom(seed)} "
                    f"({names}. {show_proof(step)})")
        case Asc(body, f):
            return f"({show_proof(body)} : {show_formula(f)})"
        case EqCase(ctx0, theta, sigma, lhs, rhs, motive, major, branches):
            ctx = ", ".join(
                f"{h} : {show_formula(f)} := {show_proof(sigma.map[h])}"
                for h, f in ctx0.entries)
            brs = " | ".join(f"{_show_subst(sub)} -> {show_proof(b)}"
                             for sub, b in branches)
            return (f"eqcase {{ subst {_show_subst(theta)}; "
                    f"equation {show_term(lhs, 1)} = {show_term(rhs, 1)}; "
                    f"motive {show_formula(motive)}; "
                    f"context ({ctx}); "
                    f"major {show_proof(major)}; "
                    f"cases ({brs}) }}")
    raise TypeError(pi)


def show_rule(r: Union[TermRule, AtomRule]) -> str:
    match r:
        case TermRule(lhs, rhs):
            return f"rewrite {show_term(lhs)} ~> {show_term(rhs)}"
        case AtomRule(head, args, rhs):
            return f"rewrite {head}{_show_args(args)} ~> {show_formula(rhs)}"
    raise TypeError(r)


def _show_order(order: OrderSpec) -> str:
    parts = []
    for m in order.measures:
        kind = "subterm" if m.strict else "weak"
        parts.append(f"{kind} {m.position}")
    return f"lex({', '.join(parts)})"


def show_decl(d: Decl) -> str:
    match d:
        case SortDecl(name):
            return f"sort {name}"
        case ConstDecl(name, ty):
            return f"const {name} : {show_ty(ty)}"
        case PredDecl(name, ty):
            return f"pred {name} : {show_ty(ty)}"
        case RewriteDecl(rule):
            return show_rule(rule)
        case RecursiveDecl(heads, order, rules):
            body = "\n".join(f"  {show_rule(r)}" for r in rules)
            return (f"recursive {', '.join(heads)} by {_show_order(order)}"
                    " {\n" + body + "\n}")
        case DefineDecl(name, p):
            return f"define {name} := {show_pred(p)}"
        case TheoremDecl(name, goal, pi):
            return (f"theorem {name} : {show_formula(goal)}\nproof\n"
                    f"  {show_proof(pi)}\nend")
    raise TypeError(d)


def show_theory(tf: TheoryFile) -> str:
    return "\n".join(show_decl(d) for d in tf.decls) + "\n"
