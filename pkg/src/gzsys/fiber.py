"""Iterated-bundle description of Gelfand-Zeitlin fibers.

A fiber report counts, at a representative ``A`` of the fiber over a
pattern, the leaf dimension of each level and the rank of the torus
directions.  Their sum is checked against an independent oracle:
``dim O - rank J`` where ``J`` is the differential along the orbit of a
regular local defining system of the fiber (see :func:`gz_jacobian`).
"""

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .chamber import StratumDescriptor, cluster_spectrum, orbit_dimension
from .contraction import (
    RANK_TOL,
    chain_levels,
    fiber_tangent,
    leaf_directions,
    matrix_digest,
    numerical_rank,
)
from .exceptions import FiberInconsistencyError, ValidationError
from .matrices import Spectrum, as_spectrum, embed, jacobi_eigh
from .patterns import (
    GZPattern,
    check_interlacing,
    gz_map,
    is_strictly_interlacing,
    random_phases,
    reconstruct,
    sample_pattern,
)
from .poisson import GAP_GUARD, coadjoint_basis, hamiltonian_vector, pairing
from .seeding import derive_seeds
from .validation import check_matrix

RESEEDS = 3


# --------------------------------------------------------------------------
# Rank oracle


def _level_frame(a, k, group):
    """Descending eigen-data of level ``k``: Hermitian block and its Jacobi frame.

    For SO the Hermitian block is ``-iA_k`` and only the first ``k // 2``
    eigenvalues are moduli.
    """
    block = a[:k, :k]
    h = block if group == "U" else -1j * block
    w, v = jacobi_eigh(h)
    return h, w, v


def _clusters(w, k, group, tol):
    """Index groups of level-k clusters as ``(kind, idx)``.

    kind is ``"eig"`` for a cluster of eigenvalues (U) or non-zero moduli
    (SO), ``"zero"`` for the SO kernel block (middle eigenvectors of ``-iA_k``).
    """
    if group == "U":
        groups, _ = cluster_spectrum(list(w), tol)
        return [("eig", g) for g in groups]
    m = k // 2
    moduli = list(np.abs(w[:m]))
    groups, _ = cluster_spectrum(moduli + [0.0], tol)
    out = [("eig", g) for g in groups[:-1]]
    zero = len(groups[-1]) - 1
    d = 2 * zero + k % 2
    if d:
        out.append(("zero", list(range(m - zero, k - (m - zero)))))
    return out


def _realify(vecs):
    d = vecs.shape[1]
    u, _, _ = np.linalg.svd(np.hstack([vecs.real, vecs.imag]), full_matrices=False)
    return u[:, :d]


def _cluster_rows(a, k, kind, idx, w, v, tangents, group, with_border):
    """Jacobian rows for one level-k cluster, by first-order perturbation.

    Compression ``C = V_c* H_k V_c`` (``H_k = A_k``, or ``-iA_k`` for SO) has
    differential ``V_c* dH V_c``.  The border share ``beta = V_c* P_c w`` of
    the next column ``w = A[:k, k]`` vanishes at deflated clusters, where its
    differential is ``V_c* (dw + dH R w)`` with the reduced resolvent
    ``R = sum_{j not in c} v_j v_j* / (x_c - x_j)``.
    """
    vc = v[:, idx]
    if kind == "zero":
        vc = _realify(vc)
    xc = 0.0 if kind == "zero" else float(np.mean(w[idx]))
    rest = [j for j in range(len(w)) if j not in idx]
    col = a[:k, k] if with_border else None
    if with_border:
        r = sum(
            (np.outer(v[:, j], v[:, j].conj()) / (xc - w[j]) for j in rest),
            np.zeros((k, k), dtype=complex),
        )
        rw = r @ col
    comp, bord = [], []
    for t in tangents:
        tk = t[:k, :k]
        dh = tk if group == "U" else -1j * tk
        if kind == "zero":
            c = np.real(vc.T @ tk @ vc)
            iu = np.triu_indices(c.shape[0], 1)
            comp.append(c[iu])
        else:
            c = vc.conj().T @ dh @ vc
            iu = np.triu_indices(c.shape[0], 1)
            comp.append(np.concatenate([np.real(np.diag(c)), c[iu].real, c[iu].imag]))
        if with_border:
            z = vc.conj().T @ (t[:k, k] + dh @ rw)
            bord.append(np.real(z) if kind == "zero" else np.concatenate([z.real, z.imag]))
    return np.array(comp).T, (np.array(bord).T if with_border else None)


def _border_norm2(a, k, idx, v, kind):
    vc = _realify(v[:, idx]) if kind == "zero" else v[:, idx]
    return float(np.linalg.norm(vc.conj().T @ a[:k, k]) ** 2)


def gz_jacobian(a, tol=1e-9, group=None):
    """Differential along the orbit of a regular local defining system of the
    GZ fiber through ``A``.

    Per level ``k < n`` and eigenvalue cluster the rows are: the
    Hellmann-Feynman row of a simple eigenvalue, or the differential of the
    cluster compression for a cluster of size ``m >= 2``; plus, when the
    cluster's share of the border column ``A[:k, k]`` vanishes, the
    differential of that share.  Without the border rows the fiber is not a
    regular level set on faces of the GZ polytope (for instance at the poles
    of the 2-sphere ``O_(1,0)`` every GZ differential vanishes).  Columns are
    the orbit tangents ``i[B_j, A]`` over an orthonormal basis ``B_j``.
    """
    a, group = check_matrix(a, group)
    n = a.shape[0]
    tangents = [hamiltonian_vector(b, a, group) for b in coadjoint_basis(n, group)]
    border_tol = tol * (1.0 + float(np.linalg.norm(a))) ** 2
    rows = []
    for k in chain_levels(n, group)[::-1]:
        if k == n:
            continue  # Casimirs: constant on the orbit
        _, w, v = _level_frame(a, k, group)
        for kind, idx in _clusters(w, k, group, tol):
            simple = kind == "eig" and len(idx) == 1 and _is_simple(w, idx[0], k, group)
            deflated = _border_norm2(a, k, idx, v, kind) <= border_tol
            comp, bord = _cluster_rows(a, k, kind, idx, w, v, tangents, group, deflated)
            if simple:
                g = _hf_gradient(v[:, idx[0]], n, group)
                rows.append(np.array([[pairing(g, t, group) for t in tangents]]))
            elif comp.size:
                rows.append(comp)
            if deflated:
                rows.append(bord)
    if not rows:
        return np.zeros((0, len(tangents)))
    return np.vstack(rows)


def _is_simple(w, i, k, group):
    m = len(w) if group == "U" else k // 2
    vals = np.abs(w[:m]) if group == "SO" else w
    gaps = [abs(vals[i] - vals[j]) for j in (i - 1, i + 1) if 0 <= j < m]
    if group == "SO":
        gaps.append(vals[i] if k % 2 else 2.0 * vals[i])
    return not gaps or min(gaps) >= GAP_GUARD


def _hf_gradient(vec, n, group):
    if group == "U":
        g = np.outer(vec, vec.conj())
        return embed((g + g.conj().T) / 2.0, n)
    g = np.imag(np.outer(vec.conj(), vec))
    return embed((g - g.T) / 2.0, n)


def jacobian_rank(a, tol=1e-9, rank_tol=RANK_TOL, group=None):
    """Numerical rank of :func:`gz_jacobian`."""
    j = gz_jacobian(a, tol, group)
    if j.size == 0:
        return 0
    s = np.linalg.svd(j, compute_uv=False)
    return int(np.sum(s > rank_tol * (s[0] + 1.0)))


def pattern_fiber_dimension(p, tol=1e-9):
    """Fiber dimension read off a U pattern by bordering.

    A cluster of ``m`` equal values in row ``k`` whose value occurs fewer than
    ``m`` times in row ``k + 1`` contributes a sphere ``S^(2m-1)``; otherwise
    its border vanishes and it contributes a point.
    """
    if p.group != "U":
        raise ValueError("bordering count is defined for U patterns")
    total = 0
    for k in range(1, p.n):
        small, big = p.row(k), p.row(k + 1)
        thr = tol * (1.0 + max(abs(x) for x in big))
        groups, _ = cluster_spectrum(list(small), tol)
        for g in groups:
            x = small[g[0]]
            if sum(abs(y - x) <= thr for y in big) < len(g):
                total += 2 * len(g) - 1
    return total


# --------------------------------------------------------------------------
# Reports


@dataclass
class FiberLevel:
    k: int
    stratum: StratumDescriptor
    leaf_group: object
    leaf_dim: int
    stabilizer_dim: int
    sphere_label: object
    raw_leaf_dim: int = 0

    def to_json(self):
        return {
            "k": self.k,
            "raw_leaf_dim": self.raw_leaf_dim,
            "stratum": self.stratum.to_json(),
            "leaf_group": self.leaf_group,
            "leaf_dim": self.leaf_dim,
            "stabilizer_dim": self.stabilizer_dim,
            "sphere_label": self.sphere_label,
        }


@dataclass
class FiberReport:
    lam: Spectrum
    pattern: GZPattern
    levels: list
    torus_rank: int
    total_dim: int
    oracle_dim: int
    consistent: bool
    group: str = "U"
    seed: object = None
    attempts: int = 1
    point_digest: str = ""
    skipped: list = field(default_factory=list)
    diagnostic: str = ""

    @property
    def leaf_dims(self):
        return {lv.k: lv.leaf_dim for lv in self.levels}

    def to_json(self):
        return {
            "group": self.group,
            "lambda": list(self.lam.values),
            "pattern": self.pattern.to_json(),
            "levels": [lv.to_json() for lv in self.levels],
            "torus_rank": self.torus_rank,
            "total_dim": self.total_dim,
            "oracle_dim": self.oracle_dim,
            "consistent": self.consistent,
            "seed": self.seed,
            "attempts": self.attempts,
            "point_digest": self.point_digest,
            "skipped": [list(s) for s in self.skipped],
            "labels_heuristic": True,
            "diagnostic": self.diagnostic,
        }


_SUPERSCRIPT = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def _sphere(d):
    return "S" + str(d).translate(_SUPERSCRIPT)


def _sphere_label(sizes, block_ranks):
    """Dimension-based label of a leaf; ``None`` when no simple name fits."""
    parts = []
    for m, r in zip(sizes, block_ranks):
        if m < 2 or r == 0:
            continue
        if m == 2 and r == 3:
            parts.append("SU(2) ≅ " + _sphere(3))
        elif r == 2 * m - 1:
            parts.append(_sphere(2 * m - 1))
        elif r == m * m - 1:
            parts.append(f"SU({m})")
        else:
            return None
    return " × ".join(parts) if parts else None


def classify_matrix(a, tol=1e-9, rank_tol=RANK_TOL, group=None):
    """Fiber report for the GZ fiber through ``A`` itself."""
    a, group = check_matrix(a, group)
    n = a.shape[0]
    tangent = fiber_tangent(a, tol, rank_tol, group)
    levels = []
    seen = []
    prev = 0
    for k in chain_levels(n, group):
        dirs, basis = leaf_directions(a, k, tol, group)
        # levels above k are already contracted: count only what is new
        seen.extend(dirs)
        cum = numerical_rank(seen, rank_tol)
        ld, prev = cum - prev, cum
        raw = numerical_rank(dirs, rank_tol)
        st = basis.stratum
        if group == "U":
            block_ranks = [
                numerical_rank([d for d, b in zip(dirs, basis.blocks) if b == c], rank_tol)
                for c in range(len(basis.block_sizes))
            ]
            leaf_group = "×".join(f"SU({m})" for m in basis.block_sizes)
            label = _sphere_label(basis.block_sizes, block_ranks) if ld == raw else None
        else:
            leaf_group = label = None
        levels.append(FiberLevel(k, st, leaf_group, ld, st.dim_levi_commutator - ld, label, raw))
    sum_leaf = sum(lv.leaf_dim for lv in levels)
    torus_rank = tangent.torus_rank
    total = torus_rank + sum_leaf
    pattern = gz_map(a, group)
    lam = pattern.top
    oracle = orbit_dimension(lam, group, n, tol) - jacobian_rank(a, tol, rank_tol, group=group)
    diag = ""
    if total != oracle:
        diag = f"total_dim {total} != oracle_dim {oracle}"
    return FiberReport(
        lam,
        pattern,
        levels,
        torus_rank,
        total,
        oracle,
        total == oracle,
        group,
        point_digest=matrix_digest(a),
        skipped=list(tangent.skipped),
        diagnostic=diag,
    )


def classify_fiber(lam, p, seed=0, tol=1e-9, rank_tol=RANK_TOL, strict=False):
    """Classify the GZ fiber over pattern ``p`` of the U(n) orbit through ``lam``.

    The representative is ``reconstruct(p, phases)`` with seeded uniform
    phases.  On a dim/oracle mismatch it is redrawn, up to three draws in
    total; ``strict`` turns a persisting mismatch into an exception.
    """
    lam = as_spectrum(lam)
    if p.group != "U":
        raise ValueError("classify_fiber needs a U pattern; use classify_matrix for SO")
    if len(lam) != p.n or max(abs(x - y) for x, y in zip(p.rows[-1], lam.values)) > 1e-9:
        raise ValidationError("pattern top row does not match lambda")
    bad = check_interlacing(p, 1e-9)
    if bad:
        raise ValidationError("pattern does not interlace: " + bad[0].describe())
    report = None
    for attempt, s in enumerate(derive_seeds(seed, RESEEDS), start=1):
        a = reconstruct(p, random_phases(p.n, np.random.default_rng(s)))
        report = classify_matrix(a, tol, rank_tol, "U")
        report.lam = lam
        report.pattern = p
        report.seed = seed
        report.attempts = attempt
        if report.consistent:
            return report
    report.diagnostic = (
        f"total_dim {report.total_dim} != oracle_dim {report.oracle_dim} "
        f"after {RESEEDS} representatives"
    )
    if strict:
        raise FiberInconsistencyError(report.diagnostic, report)
    return report


# --------------------------------------------------------------------------
# Survey


@dataclass
class SurveyRecord:
    index: int
    seed: int
    pattern: GZPattern
    regular: bool
    report: FiberReport

    @property
    def digest(self):
        blob = json.dumps(self.pattern.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def to_json(self):
        return {
            "index": self.index,
            "seed": self.seed,
            "pattern_digest": self.digest,
            "regular": self.regular,
            "total_dim": self.report.total_dim,
            "oracle_dim": self.report.oracle_dim,
            "torus_rank": self.report.torus_rank,
            "leaf_dims": [lv.leaf_dim for lv in self.report.levels],
            "consistent": self.report.consistent,
            "pattern": self.pattern.to_json(),
        }


def survey_polytope(lam, samples, seed=0, tol=1e-9, rank_tol=RANK_TOL, threads=None,
                    snap_prob=0.5):
    """Classify ``samples`` random patterns of the GZ polytope of ``lam``.

    Sample ``i`` uses the ``i``-th splitmix64 seed derived from ``seed`` for
    both its pattern and its representative, so results do not depend on
    ``threads``; records come back sorted by index.
    """
    if not isinstance(samples, (int, np.integer)) or samples <= 0:
        raise ValueError("samples must be a positive integer")
    lam = as_spectrum(lam)
    seeds = derive_seeds(seed, samples)

    def one(i):
        p = sample_pattern(lam, seeds[i], snap_prob=snap_prob)
        rep = classify_fiber(lam, p, seeds[i], tol, rank_tol)
        return SurveyRecord(i, seeds[i], p, is_strictly_interlacing(p, tol), rep)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            records = list(ex.map(one, range(samples)))
    else:
        records = [one(i) for i in range(samples)]
    return sorted(records, key=lambda r: r.index)


def survey_summary(records):
    total = len(records)
    ok = sum(r.report.consistent for r in records)
    return {
        "samples": total,
        "consistent": ok,
        "consistent_fraction": ok / total if total else math.nan,
        "regular": sum(r.regular for r in records),
    }
