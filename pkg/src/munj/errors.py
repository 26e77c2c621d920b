"""Exception hierarchy shared by the kernel modules."""


class KernelError(Exception):
    """Base class for every failure the kernel can signal."""


class SortError(KernelError):
    """Ill-sorted term, type, or formula."""


class FuelError(KernelError):
    """A fuel budget (beta steps, rewrite steps, proof steps) ran out."""


class RuleError(KernelError):
    """Malformed rewrite rule or rewrite system."""


class UnifyError(KernelError):
    """Unification-related failure other than plain non-unifiability."""


class DemandAnnotation(UnifyError):
    """The terms leave the decidable fragment; caller must supply a CSU."""


class CheckError(KernelError):
    """Proof does not check.  Carries the path from the root of the proof."""

    def __init__(self, msg: str, path: tuple = ()):
        self.path = path
        self.msg = msg
        super().__init__(f"at {'/'.join(map(str, path)) or '<root>'}: {msg}")


class StuckEqualityRedex(KernelError):
    """No branch substitution factors the suspended one (incomplete CSU)."""


class AdmitError(KernelError):
    """A recursive definition fails an admissibility condition."""


class ParseError(KernelError):
    """Surface syntax error.  Carries line and column."""

    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {msg}")
