class FdalgError(ValueError):
    """
    Error raised by the toolkit.

    ``code`` is a stable identifier (e.g. ``NOT_ASSOCIATIVE``) that the CLI
    echoes in reports; ``extra`` holds structured context such as the
    violating basis triple.
    """

    default_code = 'ERROR'

    def __init__(self, detail, code=None, **extra):
        super().__init__(detail)
        self.detail = detail
        self.code = code or self.default_code
        self.extra = extra

    def __str__(self):
        return f"{self.code}: {self.detail}"


class BudgetExceeded(FdalgError):
    """Exhaustive enumeration was requested but the space is larger than the budget."""

    default_code = 'BUDGET_EXCEEDED'


class NoValidMethod(FdalgError):
    """No radical or similarity method is valid for this field/dimension combination."""

    default_code = 'NO_VALID_METHOD'
