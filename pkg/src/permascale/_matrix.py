import numpy as np

from .errors import DimensionError, NegativeEntry


def as_nonneg_matrix(A, square=True):
    """Validate ``A`` as a finite nonnegative 2-D float array and return a copy."""
    M = np.array(A, dtype=np.float64)
    if M.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got ndim={M.ndim}")
    if square and M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    if np.any(M < 0):
        raise NegativeEntry("matrix has negative entries")
    return M


def gmean(v):
    """Unweighted geometric mean of a positive vector."""
    v = np.asarray(v, dtype=np.float64)
    return float(np.exp(np.mean(np.log(v))))
