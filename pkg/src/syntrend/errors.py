"""Exception hierarchy shared across the toolkit.

Domain errors (bad data, degenerate statistics) are kept distinct from
usage errors (bad arguments, unreadable files) so the CLI can map them to
exit codes 1 and 2 respectively.
"""


class SyntrendError(Exception):
    """Base class for all toolkit errors."""


class DomainError(SyntrendError):
    """Data-dependent failure: defective input, degenerate statistic."""


class UsageError(SyntrendError):
    """Caller error: bad arguments, misaligned inputs, unreadable paths."""


class ConlluParseError(DomainError):
    """Malformed CoNLL-U input; carries the offending line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ConlluStructureError(DomainError):
    """Structurally invalid sentence (bad ids or head range); names the sentence."""

    def __init__(self, message, sent_id=None):
        if sent_id is not None:
            message = f"sentence {sent_id!r}: {message}"
        super().__init__(message)
        self.sent_id = sent_id


class UndefinedMetricError(DomainError):
    """A metric or statistic is not defined for the given input."""


class DegenerateCovariateError(DomainError):
    """Partial trend test cannot condition on the given covariate."""


class RawTextMismatch(DomainError):
    """Gold and system sentences do not share the same underlying characters."""

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset
