"""Matrix core: spectra, principal submatrices and orbit sampling.

Eigenvalues come from a cyclic complex Jacobi sweep so that results do not
depend on the LAPACK build; skew-symmetric spectra reuse it on the
Hermitian matrix ``-iA``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError
from .validation import check_group, check_hermitian, check_matrix, check_skew

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Spectrum:
    """Real values sorted in descending order."""

    values: tuple
    multiplicity_tol: float = 1e-9

    def __post_init__(self):
        vals = tuple(float(v) for v in np.ravel(np.asarray(self.values, dtype=float)))
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError("spectrum values must be finite")
        object.__setattr__(self, "values", tuple(sorted(vals, reverse=True)))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def as_array(self):
        return np.array(self.values, dtype=float)


def as_spectrum(lam):
    return lam if isinstance(lam, Spectrum) else Spectrum(tuple(lam))


# --------------------------------------------------------------------------
# Jacobi eigensolver


def jacobi_eigh(a, max_sweeps=64):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, V)`` with ``w`` descending and ``A = V diag(w) V*``.  Each
    eigenvector is phase-normalised so that its largest-modulus component
    (first one on ties) is real and positive.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if n > 1 and scale > 0.0:
        stop = 4.0 * _EPS * scale
        for _ in range(max_sweeps):
            off = np.linalg.norm(a - np.diag(np.diag(a)))
            if off <= stop:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    r = abs(apq)
                    if r == 0.0:
                        continue
                    app = a[p, p].real
                    aqq = a[q, q].real
                    zeta = (aqq - app) / (2.0 * r)
                    t = math.copysign(1.0, zeta) / (abs(zeta) + math.hypot(1.0, zeta))
                    c = 1.0 / math.hypot(1.0, t)
                    s = t * c
                    ph = apq / r
                    # U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] acting on (p, q)
                    cp = a[:, p].copy()
                    cq = a[:, q] * ph.conjugate()
                    a[:, p] = c * cp - s * cq
                    a[:, q] = s * cp + c * cq
                    rp = a[p, :].copy()
                    rq = a[q, :] * ph
                    a[p, :] = c * rp - s * rq
                    a[q, :] = s * rp + c * rq
                    a[p, p] = app - t * r
                    a[q, q] = aqq + t * r
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    vp = v[:, p].copy()
                    vq = v[:, q] * ph.conjugate()
                    v[:, p] = c * vp - s * vq
                    v[:, q] = s * vp + c * vq
    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    for j in range(n):
        col = v[:, j]
        i = int(np.argmax(np.abs(col)))
        m = abs(col[i])
        if m > 0.0:
            v[:, j] = col * (col[i].conjugate() / m)
    return w, v


# --------------------------------------------------------------------------
# Submatrices and spectra


def principal_submatrix(a, k):
    """Top-left ``k x k`` block (the moment map of the embedded U(k) / SO(k))."""
    a = np.asarray(a)
    n = a.shape[0]
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k!r}")
    return a[:k, :k].copy()


def embed(block, n):
    """Zero-pad a ``k x k`` block into the top-left corner of an ``n x n`` matrix."""
    block = np.asarray(block)
    k = block.shape[0]
    out = np.zeros((n, n), dtype=block.dtype)
    out[:k, :k] = block
    return out


def spectrum_desc(a, vectors=False, tol=1e-9):
    """Descending eigenvalues of a Hermitian matrix.

    With ``vectors=True`` returns ``(Spectrum, V)`` where the columns of ``V``
    are the phase-normalised eigenvectors in the same order.
    """
    a = check_hermitian(a)
    w, v = jacobi_eigh(a)
    spec = Spectrum(tuple(w), multiplicity_tol=tol)
    return (spec, v) if vectors else spec


def skew_eigh(a):
    """Full Jacobi decomposition of ``-iA`` for a real skew matrix ``A``.

    The eigenvalues come in pairs ``+-b``; the first ``floor(n/2)`` columns of
    ``V`` span the ``+b`` eigenspaces, i.e. ``A v = i b v``.
    """
    a = check_skew(a)
    return jacobi_eigh(-1j * a)


def skew_spectrum(a, vectors=False, tol=1e-9):
    """Moduli ``b`` of the eigenvalue pairs ``+-ib`` of a real skew matrix.

    The forced zero of odd size is excluded, so the result has length
    ``floor(n/2)``.
    """
    w, v = skew_eigh(a)
    m = len(w) // 2
    b = np.abs(w[:m])
    spec = Spectrum(tuple(b), multiplicity_tol=tol)
    return (spec, v[:, :m]) if vectors else spec


def matrix_spectrum(a, group):
    """``spectrum_desc`` for U, ``skew_spectrum`` for SO."""
    return spectrum_desc(a) if group == "U" else skew_spectrum(a)


# --------------------------------------------------------------------------
# Haar sampling


def haar_unitary(n, rng):
    """Haar-random ``n x n`` unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_special_orthogonal(n, rng):
    """Haar-random element of SO(n) via QR of a real Gaussian matrix."""
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def canonical_skew(moduli, n):
    """Block-diagonal skew matrix with blocks ``[[0, b], [-b, 0]]``."""
    moduli = list(moduli)
    if len(moduli) != n // 2:
        raise ValueError(f"SO({n}) needs {n // 2} moduli, got {len(moduli)}")
    a = np.zeros((n, n))
    for j, b in enumerate(moduli):
        a[2 * j, 2 * j + 1] = b
        a[2 * j + 1, 2 * j] = -b
    return a


def sample_orbit_point(lam, group="U", seed=0, n=None):
    """Seeded point ``Q Lambda Q^-1`` on the coadjoint orbit through ``lam``.

    For SO the moduli ``lam`` do not determine the size; pass ``n`` (default
    ``2 * len(lam)``).
    """
    group = check_group(group)
    lam = as_spectrum(lam)
    rng = np.random.default_rng(seed)
    if group == "U":
        n_ = len(lam)
        vals = lam.as_array()
        if np.all(vals == vals[0]):
            return vals[0] * np.eye(n_, dtype=complex)
        q = haar_unitary(n_, rng)
        a = (q * vals) @ q.conj().T
        return (a + a.conj().T) / 2.0
    n_ = 2 * len(lam) if n is None else int(n)
    if any(v < 0 for v in lam):
        raise ValueError("SO moduli must be non-negative")
    if n_ // 2 != len(lam):
        raise ValueError(f"SO({n_}) needs {n_ // 2} moduli, got {len(lam)}")
    q = haar_special_orthogonal(n_, rng)
    a = q @ canonical_skew(lam.values, n_) @ q.T
    a = (a - a.T) / 2.0
    np.fill_diagonal(a, 0.0)
    return a


# --------------------------------------------------------------------------
# JSON matrix format


def matrix_to_json(a, group=None):
    a, group = check_matrix(a, group)
    n = a.shape[0]
    if group == "U":
        return {"kind": "hermitian", "n": n, "re": a.real.tolist(), "im": a.imag.tolist()}
    return {"kind": "skew", "n": n, "re": a.tolist()}


def matrix_from_json(obj):
    """Parse the JSON matrix format; returns ``(array, group)``."""
    try:
        kind = obj["kind"]
        n = int(obj["n"])
        re = np.asarray(obj["re"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix JSON: {exc}") from exc
    if re.shape != (n, n):
        raise ValidationError(f"'re' must be {n}x{n}, got shape {re.shape}")
    if kind == "hermitian":
        im = np.asarray(obj.get("im", np.zeros((n, n))), dtype=float)
        if im.shape != (n, n):
            raise ValidationError(f"'im' must be {n}x{n}, got shape {im.shape}")
        return check_hermitian(re + 1j * im), "U"
    if kind == "skew":
        return check_skew(re), "SO"
    raise ValidationError(f"unknown matrix kind {kind!r}")
