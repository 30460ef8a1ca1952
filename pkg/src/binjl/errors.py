"""Exception types that map onto CLI exit codes."""


class FormatError(ValueError):
    """Malformed dataset or code file (exit code 2)."""


class RegimeInfeasibleError(ValueError):
    """Advisor parameters fall outside the regime the guarantee covers (exit code 3)."""
