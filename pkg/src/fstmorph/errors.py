"""Shared exception types."""


class FstMorphError(Exception):
    """Base class for all toolkit errors."""


class SymbolError(FstMorphError):
    """Bad symbol text, unknown id, or a dangling escape."""


class UnknownSymbolError(SymbolError):
    """Lookup input contains a character outside the compiled alphabet."""


class AlphabetMismatchError(FstMorphError):
    """Two transducers built over different symbol tables were combined."""


class NotAnAcceptorError(FstMorphError):
    """An acceptor-only operation was given a genuine transducer."""


class ParseError(FstMorphError):
    """Source-file syntax or validation error, with location."""

    def __init__(self, message, filename=None, line=None):
        self.filename = filename
        self.line = line
        where = ""
        if filename is not None:
            where = f"{filename}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class PipelineError(FstMorphError):
    """Lexicon and rules are incompatible (empty or leaking pipeline)."""
