"""Input validation helpers.

Matrices travel through the package as plain numpy arrays.  Hermitian
matrices (points of u(n)* under the trace pairing) are complex, real
skew-symmetric matrices (points of so(n)*) are float.  These helpers
enforce the shape invariants at module boundaries.
"""

import numpy as np

from .exceptions import ValidationError

HERMITICITY_TOL = 1e-12
GROUPS = ("U", "SO")


def check_group(group):
    g = str(group).upper()
    if g not in GROUPS:
        raise ValueError(f"group must be one of {GROUPS}, got {group!r}")
    return g


def _square(a):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    return a


def check_hermitian(a, tol=HERMITICITY_TOL):
    """Return ``a`` as a complex Hermitian array or raise ValidationError.

    The tolerance is absolute on ``|a_ij - conj(a_ji)|`` and on the
    imaginary part of the diagonal.
    """
    a = _square(a).astype(complex)
    if np.max(np.abs(a - a.conj().T)) > tol:
        raise ValidationError("matrix is not Hermitian")
    if np.max(np.abs(np.diag(a).imag)) > tol:
        raise ValidationError("Hermitian matrix has non-real diagonal")
    return a


def check_skew(a, tol=HERMITICITY_TOL):
    """Return ``a`` as a real skew-symmetric float array or raise."""
    a = _square(a)
    if np.iscomplexobj(a):
        if np.max(np.abs(a.imag)) > tol:
            raise ValidationError("skew-symmetric matrix must be real")
        a = a.real
    a = a.astype(float)
    if np.max(np.abs(a + a.T)) > tol:
        raise ValidationError("matrix is not skew-symmetric")
    if np.any(np.diag(a) != 0.0):
        if np.max(np.abs(np.diag(a))) > tol:
            raise ValidationError("skew-symmetric matrix has non-zero diagonal")
    return a


def infer_group(a):
    """Guess the group of a matrix: real, non-zero and antisymmetric means SO."""
    a = np.asarray(a)
    if np.iscomplexobj(a) and np.any(a.imag != 0):
        return "U"
    r = a.real
    if np.any(r != 0) and np.max(np.abs(r + r.T)) <= HERMITICITY_TOL:
        return "SO"
    return "U"


def check_matrix(a, group=None):
    """Validate ``a`` for ``group`` (inferred when None); return (array, group)."""
    g = infer_group(a) if group is None else check_group(group)
    if g == "U":
        return check_hermitian(a), g
    return check_skew(a), g


def check_matrix_batch(X, group=None):
    """Validate a stack of matrices shaped (n_samples, n, n)."""
    X = np.asarray(X)
    if X.ndim == 2:
        X = X[None]
    if X.ndim != 3 or X.shape[1] != X.shape[2]:
        raise ValidationError(f"expected shape (n_samples, n, n), got {X.shape}")
    if len(X) == 0:
        raise ValidationError("empty batch")
    g = infer_group(X[0]) if group is None else check_group(group)
    out = [check_matrix(x, g)[0] for x in X]
    return np.stack(out), g


def check_level(k, n, lo=1):
    if not isinstance(k, (int, np.integer)) or not lo <= k <= n:
        raise ValueError(f"level k must be an integer in [{lo}, {n}], got {k!r}")
    return int(k)
