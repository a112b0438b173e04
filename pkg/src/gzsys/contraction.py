"""Leaves of the stratified null foliation along the chain U(1) < ... < U(n).

On a coadjoint orbit every moment map of the chain is a leading block
``A_k``, and the leaf through ``A`` at level ``k`` is the orbit of the
commutator of the stabilizer of ``A_k``.  Its tangent space is spanned by
``[X, A]`` for ``X`` in :func:`~gzsys.chamber.levi_commutator_basis`.
Conjugating by ``exp(tX)`` fixes ``A_k`` and every smaller block, and only
conjugates the larger ones, so these directions never leave the GZ fiber.
"""

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .chamber import StratumDescriptor, levi_commutator_basis
from .exceptions import DegeneracyError
from .matrices import Spectrum
from .patterns import gz_map
from .poisson import eigenvalue_field, hamiltonian_vector
from .validation import check_matrix

RANK_TOL = 1e-8


def _flatten(d):
    d = np.asarray(d)
    if np.iscomplexobj(d):
        return np.concatenate([d.real.ravel(), d.imag.ravel()])
    return d.ravel()


def numerical_rank(vectors, rank_tol=RANK_TOL):
    """Rank with singular values counted above ``rank_tol * (s_max + 1)``."""
    if len(vectors) == 0:
        return 0
    m = np.stack([_flatten(v) for v in vectors])
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > rank_tol * (s[0] + 1.0)))


def matrix_digest(a):
    a = np.ascontiguousarray(a)
    h = hashlib.sha256()
    h.update(str(a.shape).encode())
    h.update(np.ascontiguousarray(a.real, dtype=float).tobytes())
    if np.iscomplexobj(a):
        h.update(np.ascontiguousarray(a.imag, dtype=float).tobytes())
    return h.hexdigest()[:16]


def leaf_directions(a, k, tol=1e-9, group=None):
    """``([X, A] for X in the level-k Levi commutator basis, basis)``."""
    a, group = check_matrix(a, group)
    basis = levi_commutator_basis(a, k, tol, group)
    return [x @ a - a @ x for x in basis.elements], basis


def leaf_dim(a, k, tol=1e-9, rank_tol=RANK_TOL, group=None):
    """Dimension of the level-k leaf through ``A``."""
    dirs, _ = leaf_directions(a, k, tol, group)
    return numerical_rank(dirs, rank_tol)


def leaf_flow_deviation(a, k, ts=(0.1, 0.7), tol=1e-9, group=None):
    """Max change of the GZ pattern under ``exp(tX) A exp(-tX)`` over the basis."""
    a, group = check_matrix(a, group)
    basis = levi_commutator_basis(a, k, tol, group)
    ref = gz_map(a, group).flat()
    worst = 0.0
    for x in basis.elements:
        for t in ts:
            u = expm(t * x)
            b = u @ a @ u.conj().T
            b = (b + b.conj().T) / 2.0 if group == "U" else np.real(b - b.T) / 2.0
            worst = max(worst, float(np.max(np.abs(gz_map(b, group).flat() - ref))))
    return worst


# --------------------------------------------------------------------------
# Chain report


@dataclass
class LevelEntry:
    level: int
    stratum: StratumDescriptor
    leaf_dim: int
    warning: bool

    def to_json(self):
        return {
            "level": self.level,
            "stratum": self.stratum.to_json(),
            "leaf_dim": self.leaf_dim,
            "warning": self.warning,
        }


@dataclass
class ContractionChainReport:
    lam: Spectrum
    point_digest: str
    group: str
    per_level: list

    def to_json(self):
        return {
            "group": self.group,
            "lambda": list(self.lam.values),
            "point_digest": self.point_digest,
            "per_level": [e.to_json() for e in self.per_level],
        }


def chain_levels(n, group):
    lo = 1 if group == "U" else 2
    return list(range(n, lo - 1, -1))


def chain_report(a, tol=1e-9, rank_tol=RANK_TOL, group=None):
    """Stratum and leaf dimension of every level, from ``k = n`` down."""
    a, group = check_matrix(a, group)
    n = a.shape[0]
    entries = []
    for k in chain_levels(n, group):
        dirs, basis = leaf_directions(a, k, tol, group)
        entries.append(LevelEntry(k, basis.stratum, numerical_rank(dirs, rank_tol), basis.warning))
    lam = gz_map(a, group).top
    return ContractionChainReport(lam, matrix_digest(a), group, entries)


# --------------------------------------------------------------------------
# Fiber tangent space


@dataclass
class FiberTangent:
    """Leaf and torus directions spanning the GZ fiber tangent at ``A``."""

    leaf: dict
    torus: list
    skipped: list
    rank: int
    leaf_rank: int

    @property
    def torus_rank(self):
        return self.rank - self.leaf_rank


def fiber_tangent(a, tol=1e-9, rank_tol=RANK_TOL, group=None):
    """Leaf directions of all levels plus the Hamiltonian vectors of the simple
    GZ eigenvalues; degenerate eigenvalues are recorded in ``skipped``."""
    a, group = check_matrix(a, group)
    n = a.shape[0]
    leaf = {}
    for k in chain_levels(n, group):
        leaf[k] = leaf_directions(a, k, tol, group)[0]
    torus, skipped = [], []
    for k in chain_levels(n, group):
        count = k if group == "U" else k // 2
        for i in range(1, count + 1):
            f = eigenvalue_field(k, i, group)
            try:
                g = f.gradient(a)
            except DegeneracyError:
                skipped.append((k, i))
                continue
            torus.append(((k, i), hamiltonian_vector(g, a, group)))
    all_leaf = [d for ds in leaf.values() for d in ds]
    leaf_rank = numerical_rank(all_leaf, rank_tol)
    rank = numerical_rank(all_leaf + [d for _, d in torus], rank_tol)
    return FiberTangent(leaf, torus, skipped, rank, leaf_rank)


def fiber_tangent_dim(a, tol=1e-9, rank_tol=RANK_TOL, group=None):
    return fiber_tangent(a, tol, rank_tol, group).rank
