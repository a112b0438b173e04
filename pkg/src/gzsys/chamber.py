"""Weyl chamber strata, the sweep map and Levi-commutator bases.

A stratum is the multiplicity pattern of a sorted spectrum.  Clustering uses
single linkage on consecutive gaps: neighbours ``a >= b`` are merged when
``a - b <= tol * (1 + max|value|)``.  A gap within a factor 10 of that
threshold sets ``warning``.
"""

from dataclasses import dataclass

import numpy as np

from .matrices import Spectrum, as_spectrum, embed, jacobi_eigh
from .validation import check_group, check_level, check_matrix


@dataclass(frozen=True)
class StratumDescriptor:
    group: str
    level: int
    multiplicities: tuple
    dim_levi: int
    dim_levi_commutator: int
    warning: bool = False
    zero_cluster: int = 0

    @property
    def regular(self):
        return self.dim_levi_commutator == 0

    def to_json(self):
        out = {
            "group": self.group,
            "level": self.level,
            "multiplicities": list(self.multiplicities),
            "dim_levi": self.dim_levi,
            "dim_levi_commutator": self.dim_levi_commutator,
            "warning": self.warning,
        }
        if self.group == "SO":
            out["zero_cluster"] = self.zero_cluster
        return out


@dataclass(frozen=True)
class ChamberPoint:
    spectrum: Spectrum
    stratum: StratumDescriptor


def cluster_spectrum(values, tol):
    """Split descending ``values`` into index groups; returns ``(groups, warning)``."""
    values = list(values)
    if not values:
        return [], False
    thr = tol * (1.0 + max(abs(v) for v in values))
    groups = [[0]]
    warning = False
    for j in range(1, len(values)):
        gap = values[j - 1] - values[j]
        if thr / 10.0 < gap <= 10.0 * thr:
            warning = True
        if gap <= thr:
            groups[-1].append(j)
        else:
            groups.append([j])
    return groups, warning


def _so_dims(level, mults, zero):
    """Levi and commutator dimensions for SO(level)."""
    d = 2 * zero + level % 2
    so_d = d * (d - 1) // 2
    nonzero = mults[:-1] if zero else mults
    dim_levi = sum(m * m for m in nonzero) + so_d
    dim_comm = sum(m * m - 1 for m in nonzero) + (so_d if d >= 3 else 0)
    return dim_levi, dim_comm


def stratum_of(s, tol=None, group="U", level=None):
    """Stratum descriptor of a descending spectrum.

    For SO, ``s`` holds the moduli and ``level`` (default ``2 len(s)``) fixes the
    parity; the moduli are clustered together with an appended 0 so that the
    cluster touching 0 becomes the zero cluster.
    """
    group = check_group(group)
    s = as_spectrum(s)
    if tol is None:
        tol = s.multiplicity_tol
    if tol <= 0:
        raise ValueError("tol must be positive")
    vals = list(s.values)
    if group == "U":
        groups, warning = cluster_spectrum(vals, tol)
        mults = tuple(len(g) for g in groups)
        return StratumDescriptor(
            "U",
            len(vals) if level is None else int(level),
            mults,
            sum(m * m for m in mults),
            sum(m * m - 1 for m in mults),
            warning,
        )
    level = 2 * len(vals) if level is None else int(level)
    if level // 2 != len(vals):
        raise ValueError(f"SO({level}) has {level // 2} moduli, got {len(vals)}")
    groups, warning = cluster_spectrum(vals + [0.0], tol)
    zero = len(groups[-1]) - 1
    mults = [len(g) for g in groups[:-1]]
    if zero:
        mults.append(zero)
    dim_levi, dim_comm = _so_dims(level, mults, zero)
    return StratumDescriptor("SO", level, tuple(mults), dim_levi, dim_comm, warning, zero)


def sweep(a, group=None, tol=1e-9):
    """Sorted spectrum of ``A`` with its stratum: the chamber point of its orbit."""
    a, group = check_matrix(a, group)
    if group == "U":
        w, _ = jacobi_eigh(a)
    else:
        w, _ = jacobi_eigh(-1j * a)
        w = np.abs(w[: a.shape[0] // 2])
    spec = Spectrum(tuple(w), multiplicity_tol=tol)
    return ChamberPoint(spec, stratum_of(spec, tol, group, a.shape[0]))


def orbit_dimension(lam, group="U", n=None, tol=1e-9):
    """Real dimension of the coadjoint orbit through ``lam``."""
    group = check_group(group)
    lam = as_spectrum(lam)
    if group == "U":
        st = stratum_of(lam, tol, "U")
        return len(lam) ** 2 - st.dim_levi
    n = 2 * len(lam) if n is None else int(n)
    st = stratum_of(lam, tol, "SO", n)
    return n * (n - 1) // 2 - st.dim_levi


# --------------------------------------------------------------------------
# Levi commutator bases


def su_basis(m):
    """Basis of su(m): anti-Hermitian traceless ``m x m`` matrices."""
    out = []
    for j in range(m):
        for k in range(j + 1, m):
            e = np.zeros((m, m), dtype=complex)
            e[j, k], e[k, j] = 1.0, -1.0
            out.append(e)
            e = np.zeros((m, m), dtype=complex)
            e[j, k] = e[k, j] = 1j
            out.append(e)
    for j in range(m - 1):
        e = np.zeros((m, m), dtype=complex)
        e[j, j], e[j + 1, j + 1] = 1j, -1j
        out.append(e)
    return out


def so_basis(d):
    out = []
    for j in range(d):
        for k in range(j + 1, d):
            e = np.zeros((d, d))
            e[j, k], e[k, j] = 1.0, -1.0
            out.append(e)
    return out


@dataclass
class LeviBasis:
    """Basis of the Levi commutator of ``A_k``, embedded in n x n matrices.

    ``blocks[j]`` is the index of the eigenvalue cluster that ``elements[j]``
    belongs to; ``block_sizes`` lists the cluster multiplicities.
    """

    elements: list
    blocks: list
    block_sizes: list
    stratum: StratumDescriptor
    level: int

    @property
    def warning(self):
        return self.stratum.warning

    def __len__(self):
        return len(self.elements)


def _realify(vecs):
    """Orthonormal real basis of a conjugation-invariant complex span."""
    d = vecs.shape[1]
    u, _, _ = np.linalg.svd(np.hstack([vecs.real, vecs.imag]), full_matrices=False)
    return u[:, :d]


def levi_commutator_basis(a, k, tol=1e-9, group=None):
    """Basis of ``[K_sigma, K_sigma]`` for the stratum of ``A_k``.

    U: block su(m) factors ``V_c E V_c*`` in the eigenbasis of ``A_k``.
    SO: ``2 Re(V_c E V_c*)`` for each cluster of non-zero moduli and
    ``W E W^T`` with ``E`` in so(d) on the real kernel ``W`` when ``d >= 3``.
    """
    a, group = check_matrix(a, group)
    n = a.shape[0]
    k = check_level(k, n)
    block = a[:k, :k]
    elements, blocks, sizes = [], [], []
    if group == "U":
        w, v = jacobi_eigh(block)
        st = stratum_of(Spectrum(tuple(w), tol), tol, "U")
        groups, _ = cluster_spectrum(list(w), tol)
        for c, idx in enumerate(groups):
            sizes.append(len(idx))
            vc = v[:, idx]
            for e in su_basis(len(idx)):
                elements.append(embed(vc @ e @ vc.conj().T, n))
                blocks.append(c)
        return LeviBasis(elements, blocks, sizes, st, k)

    w, v = jacobi_eigh(-1j * block)
    m = k // 2
    moduli = np.abs(w[:m])
    st = stratum_of(Spectrum(tuple(moduli), tol), tol, "SO", k)
    groups, _ = cluster_spectrum(list(moduli) + [0.0], tol)
    zero = len(groups[-1]) - 1
    for c, idx in enumerate(groups[:-1]):
        sizes.append(len(idx))
        vc = v[:, idx]
        for e in su_basis(len(idx)):
            x = 2.0 * np.real(vc @ e @ vc.conj().T)
            elements.append(embed((x - x.T) / 2.0, n))
            blocks.append(c)
    d = 2 * zero + k % 2
    if d:
        sizes.append(d)
        c = len(sizes) - 1
        if d >= 3:
            wk = _realify(v[:, m - zero : k - (m - zero)])
            for e in so_basis(d):
                x = wk @ e @ wk.T
                elements.append(embed((x - x.T) / 2.0, n))
                blocks.append(c)
    return LeviBasis(elements, blocks, sizes, st, k)
