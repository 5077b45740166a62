"""Exception taxonomy shared across the package.

Two broad families matter to callers: numerical failures raised while
clustering, identifying or simulating (``ClusteringError``,
``IdentificationError``, ``SimulationError``), and input problems raised
while reading data or resolving configuration (``DataError``,
``ConfigError``). The command line maps the first family to exit code 1
and the second to exit code 2.
"""

__all__ = [
    "IarxError",
    "DataError",
    "ConfigError",
    "ClusteringError",
    "IdentificationError",
    "SimulationError",
]


class IarxError(Exception):
    """Base class for all package-specific errors."""


class DataError(IarxError):
    """Malformed, degenerate or inconsistent input data."""


class ConfigError(IarxError):
    """Invalid run configuration (flags, config files, missing paths)."""


class ClusteringError(IarxError):
    """Pattern-space construction failed (empty cluster, unordered classes)."""


class IdentificationError(IarxError):
    """Parameter identification failed (rank deficiency, solver breakdown)."""


class SimulationError(IarxError):
    """Synthetic data generation diverged or could not proceed."""
