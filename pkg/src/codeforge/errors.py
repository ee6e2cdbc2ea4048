"""Exception types shared across the package."""


class CodeforgeError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(CodeforgeError):
    """Operand shapes are incompatible."""


class RankDeficient(CodeforgeError):
    """A parity-check matrix does not have full row rank over GF(2)."""


class TooLarge(CodeforgeError):
    """An exhaustive enumeration would exceed the configured cap."""


class UnsupportedLength(CodeforgeError):
    """Cycle counting is only implemented for lengths 4 and 6."""


class MalformedAlist(CodeforgeError):
    """An alist file violates the format; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DegreeMismatch(MalformedAlist):
    """Alist degree lines disagree with the position lists."""


class DecoderFailure(CodeforgeError):
    """A decoder raised during BER simulation; carries the frame-block seed."""

    def __init__(self, message, seed=None, block=None):
        super().__init__(message)
        self.seed = seed
        self.block = block


class Divergence(CodeforgeError):
    """A training loss became non-finite; carries epoch/step and seed."""

    def __init__(self, message, seed=None, where=None):
        super().__init__(message)
        self.seed = seed
        self.where = where


class ConfigError(CodeforgeError):
    """Invalid configuration; carries the full list of violations."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
