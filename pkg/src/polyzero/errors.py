"""Exception hierarchy shared across the toolkit."""


class PolyzeroError(Exception):
    """Base class for all errors raised by this package."""


class StructureError(PolyzeroError):
    """Operands built over different rings, fields or variable tables."""


class DomainError(PolyzeroError):
    """An operation left its domain of definition.

    Raised e.g. when a fractional exponent is applied to a value that is
    not a coefficient-one monomial, or when an exact rational root does
    not exist.
    """


class ParseError(PolyzeroError):
    """Syntax error in one of the textual input formats."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.message = message
        self.line = line
        self.col = col


class NotComInjective(PolyzeroError):
    """A word substitution whose letter-count matrix is singular."""


class EmptyLanguageError(PolyzeroError):
    """The initial nonterminal of a grammar derives no value at all."""


class CertificateError(PolyzeroError):
    """A certificate is malformed for the grammar it is checked against."""


class UnsupportedSubstitution(PolyzeroError):
    """A register update uses a substitution outside the supported shape."""


class DimensionError(PolyzeroError):
    """Arity or dimension mismatch between maps, values and nonterminals."""
