"""Error taxonomy shared by all engines.

ConfigError maps to exit code 2, NumericError to exit code 3.
"""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration (bad key, bad value, failed invariant)."""


class NumericError(RuntimeError):
    """Numerical failure at run time (solver breakdown, non-finite state)."""
