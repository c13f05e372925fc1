"""Exception hierarchy shared by every stage of the toolkit."""

from __future__ import annotations


class BSDecideError(Exception):
    """Base class for all errors raised by bsdecide."""


# -- parsing ---------------------------------------------------------------


class ParseError(BSDecideError):
    pass


class FormulaSyntaxError(ParseError):
    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        self.position = position
        self.expected = tuple(expected)
        detail = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at offset {position}{detail}")


class ArityMismatch(ParseError):
    def __init__(self, name: str, first: int, second: int):
        self.name = name
        self.arities = (first, second)
        super().__init__(f"symbol {name} used with arity {first} and {second}")


class ReservedByte(ParseError):
    def __init__(self, position: int):
        self.position = position
        super().__init__(f"reserved pseudo-blank byte '#' at offset {position}")


class NameClash(ParseError):
    """An identifier is used in two different symbol roles."""


# -- logic core --------------------------------------------------------------


class UnmappedFreeVariable(BSDecideError):
    pass


class NotQuantifierFree(BSDecideError):
    pass


class NotInFragment(BSDecideError):
    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("formula is outside the BS class: " + ", ".join(self.violations))


# -- grounding / solving -------------------------------------------------------


class ExplosionGuard(BSDecideError):
    def __init__(self, required: int, cap: int):
        self.required = required
        self.cap = cap
        super().__init__(f"grounding needs {required} instances, cap is {cap}")


class UnassignedVariable(BSDecideError):
    pass


class TooManyVariables(BSDecideError):
    pass


# -- model oracle ----------------------------------------------------------------


class UndeclaredSymbol(BSDecideError):
    pass


class UnassignedFreeVariable(BSDecideError):
    pass


class EnumerationGuard(BSDecideError):
    def __init__(self, required: int, guard: int):
        self.required = required
        self.guard = guard
        super().__init__(f"model search needs {required} interpretations, guard is {guard}")


# -- padding -------------------------------------------------------------------


class PaddingOverflow(BSDecideError):
    def __init__(self, n: int, k: int, max_bytes: int):
        self.n = n
        self.k = k
        self.exponent = n**k
        self.max_bytes = max_bytes
        need = f"2**{self.exponent}"
        if self.exponent <= 64:
            need += f" = {1 << self.exponent}"
        super().__init__(f"padding needs {need} bytes (n={n}, k={k}), max is {max_bytes}")

    @property
    def required_length(self) -> int:
        return 1 << self.exponent


class MalformedPadding(BSDecideError):
    pass


class StageError(BSDecideError):
    """Wraps an error raised inside a pipeline stage."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
