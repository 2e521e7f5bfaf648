"""Exception types shared across the package."""

import numpy as np


class ConfigurationError(ValueError):
    """Unsupported or inconsistent configuration value."""


class SingularMatrixError(np.linalg.LinAlgError):
    """A matrix that must have full row rank does not."""


class IterationLimitError(RuntimeError):
    """An iterative solver hit its iteration cap before converging."""


# rows are declared dependent below this fraction of the largest singular value
RANK_RTOL = 1e-10


def check_full_row_rank(A):
    """Raise `SingularMatrixError` unless ``A`` has full row rank."""
    A = np.asarray(A)
    r = A.shape[0]
    if r == 0:
        return
    if r > A.shape[1]:
        raise SingularMatrixError(f"{r} rows exceed {A.shape[1]} columns")
    s = np.linalg.svd(A, compute_uv=False)
    if not np.all(np.isfinite(s)) or s[-1] <= RANK_RTOL * s[0]:
        raise SingularMatrixError("matrix is rank deficient")
