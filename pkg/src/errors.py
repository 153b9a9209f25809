"""Exception hierarchy for graph construction, GNN evaluation and experiments."""


class GnnTransferError(Exception):
    """Base class for every error raised by this package."""


# ============== Geometry ==============

class EdgelessGraph(GnnTransferError, ValueError):
    """Connection radius below the lattice spacing."""


class EmptyGraph(GnnTransferError, ValueError):
    """Every node of the graph is isolated."""


class MissingParent(GnnTransferError, ValueError):
    """RGG has no parent grid to compare against."""


class BoundaryNotCirculant(GnnTransferError, ValueError):
    """Operation needs a toroidal (circulant) grid."""


# ============== GNN / spectral ==============

class DimensionError(GnnTransferError, ValueError):
    """Shapes of operator, signal or parameters do not agree."""


class TapeMismatch(GnnTransferError, RuntimeError):
    """Backward pass called with a stale or foreign tape."""


class AsymmetricGso(GnnTransferError, ValueError):
    """Graph shift operator is not symmetric."""


class DomainError(GnnTransferError, ValueError):
    """Frequency domain is not a positive interval."""


# ============== Channel / policy ==============

class InvalidPower(GnnTransferError, ValueError):
    """Negative transmit power."""


class BisectionError(GnnTransferError, RuntimeError):
    """Power-budget multiplier search did not converge."""


class NonFiniteGradient(GnnTransferError, FloatingPointError):
    """Primal gradient contains NaN or inf."""


# ============== Harness ==============

class DatasetNotFound(GnnTransferError, FileNotFoundError):
    """Dataset manifest missing under the output directory."""


class ConfigError(GnnTransferError, ValueError):
    """Config file is unreadable or fails validation."""
