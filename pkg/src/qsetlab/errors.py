"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: validation and formula errors exit 2,
resource errors exit 3.
"""


class QsetError(Exception):
    pass


class ValidationError(QsetError):
    """Malformed input: unknown handle, bad file, precondition violated."""


class UnsupportedError(ValidationError):
    """Operation outside the supported rank (e.g. quotient of a qset of qsets)."""


class ResourceError(QsetError):
    """A configured size bound would be exceeded."""


class ResolutionError(ValidationError):
    """Numeric resolution too coarse to separate the values in a spec."""


class InterpretationError(QsetError):
    """Raised by ``interpret`` when the source system fails an axiom.

    ``verdicts`` holds every failing AxiomVerdict, in axiom order.
    """

    def __init__(self, verdicts):
        self.verdicts = list(verdicts)
        names = ", ".join(v.axiom for v in self.verdicts)
        super().__init__(f"system violates {names}")


class FormulaError(QsetError):
    """Base for lexical, syntax and sort errors; carries a source span."""

    def __init__(self, message, span=None):
        self.span = span
        if span is not None:
            message = f"{message} at {span[0]}:{span[1]}"
        super().__init__(message)


class LexError(FormulaError):
    pass


class ParseError(FormulaError):
    def __init__(self, message, span=None, expected=()):
        self.expected = frozenset(expected)
        if self.expected:
            message = f"{message} (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(message, span)


class ScopeError(FormulaError):
    """Free variable without a binding in the valuation or declared set."""


class SortError(FormulaError):
    """Operation applied outside its sort, e.g. =E on an m-atom.

    ``node`` is the offending formula node when known.
    """

    def __init__(self, message, span=None, node=None):
        self.node = node
        super().__init__(message, span)
