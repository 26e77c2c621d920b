"""Command-line driver for theory files.

Subcommands:
  check FILE...       validate the rewrite system, admit recursive
                      definitions, and check every theorem
  normalize FILE      check theorems, then reduce their proofs to
                      normal form (optionally re-checking every
                      intermediate reduct)
  admit FILE...       run declarations only; theorems are parsed but
                      neither checked nor normalized

Exit status: 0 all ok, 1 logical failure (a proof, rule, abbreviation,
or recursive definition is rejected), 2 resource or usage error (fuel
exhausted, syntax error, unreadable file, bad arguments).

All diagnostics go to stderr.  Stdout carries a single stable summary
line: `RESULT ok theorems=<n> admitted=<m>` on success, or
`RESULT fail theorems=<n> admitted=<m>` with the counts that had
succeeded before the failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from .checker import ProofChecker
from .errors import FuelError, KernelError, ParseError, RuleError
from .formulas import check_pred
from .normalizer import normalize
from .recdefs import admit as admit_recursive
from .rewriting import (RewriteSystem, TermRule, TrustLog, validate_rule,
                        validate_system)
from .surface import (ConstDecl, DefineDecl, PredDecl, RecursiveDecl,
                      RewriteDecl, SortDecl, TheoremDecl, parse)
from .terms import Signature

__all__ = ["main"]


class UsageError(Exception):
    """Bad invocation that is not a syntax or kernel problem."""


@dataclass
class Counts:
    theorems: int = 0
    admitted: int = 0


def _diag(msg: str) -> None:
    print(msg, file=sys.stderr)


def _show_path(path: tuple) -> str:
    # each element is a child label, itself a tuple such as ("sigma", "h0")
    parts = [".".join(str(x) for x in label) for label in path]
    return "/".join(parts) or "<root>"


def _run_file(path: str, args: argparse.Namespace, trust: TrustLog,
              counts: Counts) -> None:
    """Process one theory file in declaration order.

    Raises on the first failure; counts reflect what succeeded before.
    """
    tf = parse(path)
    sig = Signature()
    rs = RewriteSystem()
    check_theorems = args.command in ("check", "normalize")
    wanted = getattr(args, "theorem", None)
    found_wanted = False
    for d in tf.decls:
        match d:
            case SortDecl(name):
                sig = sig.with_sort(name)
            case ConstDecl(name, ty):
                sig = sig.with_constant(name, ty)
            case PredDecl(name, ty):
                sig = sig.with_predicate(name, ty)
            case RewriteDecl(rule):
                errors = validate_rule(sig, rule)
                if errors:
                    raise RuleError(f"{path}: " + "; ".join(errors))
                if isinstance(rule, TermRule):
                    rs = rs.with_rules(term_rules=(rule,))
                else:
                    rs = rs.with_rules(atom_rules=(rule,))
            case RecursiveDecl(_, order, rules):
                rs = admit_recursive(sig, rs, rules, order, trust,
                                     fuel=args.fuel)
                counts.admitted += 1
            case DefineDecl(_, p):
                check_pred(sig, {}, p)
            case TheoremDecl(name, goal, pi):
                if not check_theorems:
                    continue
                if args.command == "normalize" and wanted is not None \
                        and name != wanted:
                    continue
                checker = ProofChecker(sig, rs, trust,
                                       rw_fuel=args.fuel,
                                       step_fuel=args.fuel)
                checker.check_theorem(pi, goal)
                if args.command == "normalize":
                    found_wanted = True
                    recheck = None
                    if args.debug_subject_reduction:
                        recheck = lambda q: checker.check_theorem(q, goal)
                    res = normalize(rs, pi, fuel=args.fuel,
                                    want_trace=args.trace, recheck=recheck)
                    _diag(f"{path}: {name}: normal form in "
                          f"{res.steps} step(s)")
                    if args.trace:
                        for i, (rpath, kind) in enumerate(res.trace, 1):
                            _diag(f"  step {i}: {kind} at "
                                  f"{_show_path(rpath)}")
                counts.theorems += 1
    errors = validate_system(sig, rs, trust)
    if errors:
        raise RuleError(f"{path}: " + "; ".join(errors))
    if args.command == "normalize" and wanted is not None \
            and not found_wanted:
        raise UsageError(f"{path}: no theorem named '{wanted}'")


def _arg_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=int, default=100000, metavar="N",
                        help="budget for rewrite, check, and "
                             "normalization steps (default 100000)")
    common.add_argument("--debug-subject-reduction", action="store_true",
                        help="re-check every intermediate reduct during "
                             "normalization")
    common.add_argument("--trust-report", action="store_true",
                        help="print every recorded assumption to stderr")
    ap = argparse.ArgumentParser(
        prog="munj",
        description="Proof checker for theory files with rewriting and "
                    "fixed points")
    sub = ap.add_subparsers(dest="command", required=True)
    p_check = sub.add_parser("check", parents=[common],
                             help="check all theorems in the given files")
    p_check.add_argument("files", nargs="+", metavar="FILE")
    p_norm = sub.add_parser("normalize", parents=[common],
                            help="normalize theorem proofs")
    p_norm.add_argument("files", nargs=1, metavar="FILE")
    p_norm.add_argument("--theorem", metavar="NAME",
                        help="normalize only this theorem")
    p_norm.add_argument("--trace", action="store_true",
                        help="print each reduction step")
    p_admit = sub.add_parser("admit", parents=[common],
                             help="run declarations without checking "
                                  "theorems")
    p_admit.add_argument("files", nargs="+", metavar="FILE")
    return ap


def main(argv=None) -> int:
    args = _arg_parser().parse_args(argv)
    trust = TrustLog()
    counts = Counts()
    code = 0
    for path in args.files:
        try:
            _run_file(path, args, trust, counts)
        except ParseError as e:
            _diag(f"{path}: syntax error: {e}")
            code = 2
        except FuelError as e:
            _diag(f"{path}: out of fuel: {e}")
            code = 2
        except OSError as e:
            _diag(f"{path}: {e}")
            code = 2
        except KernelError as e:
            _diag(f"{path}: {type(e).__name__}: {e}")
            code = 1
        except UsageError as e:
            _diag(str(e))
            code = 2
        if code:
            break
    if args.trust_report:
        report = trust.render()
        if report:
            _diag(report)
    status = "ok" if code == 0 else "fail"
    print(f"RESULT {status} theorems={counts.theorems} "
          f"admitted={counts.admitted}")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
