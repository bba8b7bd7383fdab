"""Error taxonomy shared across the package.

ConfigError maps to CLI exit code 2, CertificationError to exit code 1.
"""


class GaugeLabError(Exception):
    """Base class for all package errors."""


class ConfigError(GaugeLabError):
    """Invalid configuration, geometry, or plan (usage error)."""


class ContractViolation(GaugeLabError):
    """An operation was called with arguments outside its contract."""


class CertificationError(GaugeLabError):
    """A numeric certification assertion failed."""
