"""Error taxonomy shared by every pipeline stage.

Exit-code mapping (see cli): TranslationError -> 1, SpecificationError -> 2,
ConfigError -> 3, CheckFailure -> 4.
"""

from __future__ import annotations


class ToolError(Exception):
    """Base error carrying a stable code and an optional source location."""

    def __init__(self, code: str, message: str, location: str | None = None):
        self.code = code
        self.location = location
        super().__init__(message)

    def __str__(self) -> str:
        base = super().__str__()
        if self.location:
            return "[%s] %s: %s" % (self.code, self.location, base)
        return "[%s] %s" % (self.code, base)


class ClassFileError(ToolError):
    """Malformed classfile bytes (E_MAGIC, E_TRUNCATED, E_BAD_CP_INDEX, ...)."""


class BuildPlanError(ToolError):
    """Inconsistent declarative class plan (E_PLAN_INCONSISTENT)."""


class TranslationError(ToolError):
    """Lifting/typing/encoding failure (E_UNSUPPORTED, E_STACK_MISMATCH,
    E_IRREDUCIBLE, E_TYPE_CONFLICT, E_OLD_OUTSIDE_ENSURES, ...)."""


class SpecificationError(ToolError):
    """Contract-convention violation (E_NO_SUCH_PREDICATE,
    E_SIGNATURE_MISMATCH, E_NOT_A_PREDICATE, E_PREDICATE_NOT_BOOLEAN,
    E_INVARIANT_OUTSIDE_LOOP, E_IMPURE_SPEC, aggregability violations, ...)."""


class BoogieSyntaxError(ToolError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__("E_SYNTAX", "%s (line %d, col %d)" % (message, line, col))
        self.line = line
        self.col = col


class ConfigError(ToolError):
    """Bad CLI configuration or I/O failure."""


def unsupported(feature: str, location: str | None = None) -> TranslationError:
    return TranslationError("E_UNSUPPORTED", "unsupported feature: %s" % feature, location)
