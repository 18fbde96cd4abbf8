"""Exceptions shared across the package.

ParameterError marks bad user input (CLI exit code 2).  ConsistencyError
marks a failed internal self-check or a violated theorem-level guarantee
(CLI exit code 3); it should never be raised on valid input unless the
implementation or the claimed mathematics is wrong.
"""


class ParameterError(ValueError):
    pass


class ConsistencyError(RuntimeError):
    pass
