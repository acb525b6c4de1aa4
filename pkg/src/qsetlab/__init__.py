"""Executable quasi-set theory at desk scale."""
from .errors import (FormulaError, InterpretationError, LexError, ParseError, QsetError,
                     ResolutionError, ResourceError, ScopeError, SortError, UnsupportedError,
                     ValidationError)
from .universe import Atom, NotApplicable, QSet, Universe

__version__ = "0.1.0"

__all__ = [
    "Atom", "QSet", "Universe", "NotApplicable",
    "QsetError", "ValidationError", "UnsupportedError", "ResourceError", "ResolutionError",
    "InterpretationError", "FormulaError", "LexError", "ParseError", "ScopeError", "SortError",
]
