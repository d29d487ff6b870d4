"""Exception types shared across the toolkit."""


class CasetagError(Exception):
    pass


class ConfigError(CasetagError):
    """Bad configuration: incompatible shapes, invalid option values, misuse."""


class InputError(CasetagError):
    """Bad runtime input: empty sequences, out-of-range tags, oversized instances."""


class AlignmentError(InputError):
    """Character or distribution streams that should line up do not."""


class NumericError(CasetagError):
    """Non-finite values where finite ones are required."""


class ParseError(CasetagError):
    """Malformed file content; message carries the line number."""
