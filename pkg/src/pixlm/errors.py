"""Exception types shared across the toolkit."""


class PixlmError(Exception):
    """Base class for all toolkit errors."""


# rendering

class CapacityError(PixlmError, ValueError):
    """Patch budget too small to hold any text plus the separator."""


class EmptyWordError(PixlmError, ValueError):
    """A pre-tokenized word was empty or contained whitespace."""


# masking

class InfeasibleMaskError(PixlmError, ValueError):
    """Requested mask count cannot be placed under the gap constraints."""


class LengthMismatchError(PixlmError, ValueError):
    """Two aligned containers differ in length."""


# numerics

class ShapeError(PixlmError, ValueError):
    """Operands have incompatible shapes for the requested operation."""


class NoTapeError(PixlmError, RuntimeError):
    """backward() was called on a value not recorded under an active tape."""


# heads

class EmptySpanError(PixlmError, ValueError):
    """A word span covers zero patches."""


class AllPaddingError(PixlmError, ValueError):
    """No attended positions are available to pool over."""


class EmptyInputError(PixlmError, ValueError):
    """An operation requiring at least one item received none."""


# data

class FormatError(PixlmError, ValueError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SizeError(PixlmError, ValueError):
    """Requested subset size exceeds the available examples."""


class ExhaustedCorpusError(PixlmError, RuntimeError):
    """A language stream ran out while others still had samples to mix."""


# training

class RangeError(PixlmError, ValueError):
    """A step or index falls outside its valid range."""


class NonFiniteGradError(PixlmError, ArithmeticError):
    """A gradient contained NaN or Inf; the optimizer step was skipped."""


# analysis

class ZeroNormError(PixlmError, ValueError):
    """Cannot L2-normalize a zero vector."""


class SizeMismatchError(PixlmError, ValueError):
    """Query and candidate sets differ in size."""


class EmptyGroupError(PixlmError, ValueError):
    """A language group contains no embeddings."""


# metrics

class TokenCountMismatchError(PixlmError, ValueError):
    """Gold and predicted sentences disagree on token counts."""


class AlignmentError(PixlmError, ValueError):
    """Gold and predicted tag sequences are not aligned."""
