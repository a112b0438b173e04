"""Gelfand-Zeitlin patterns: the GZ map, interlacing, polytopes, sampling
and inverse reconstruction by bordering.

A U(n) pattern has rows ``k = 1..n`` of length ``k``; an SO(n) pattern has
rows ``k = 2..n`` of length ``k // 2`` holding skew moduli.  Row ``k`` is the
spectrum of the top-left ``k x k`` block.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConsistencyError, ValidationError
from .matrices import Spectrum, as_spectrum, jacobi_eigh
from .validation import check_group, check_hermitian, check_matrix


@dataclass(frozen=True)
class GZPattern:
    group: str
    n: int
    rows: tuple

    def __post_init__(self):
        group = check_group(self.group)
        object.__setattr__(self, "group", group)
        rows = tuple(tuple(float(x) for x in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if [len(r) for r in rows] != row_lengths(self.n, group):
            raise ValueError(
                f"{group}({self.n}) pattern needs row lengths {row_lengths(self.n, group)}, "
                f"got {[len(r) for r in rows]}"
            )
        if not all(math.isfinite(x) for r in rows for x in r):
            raise ValidationError("pattern entries must be finite")

    @property
    def first_level(self):
        return 1 if self.group == "U" else 2

    def row(self, k):
        """Row of level ``k``."""
        return self.rows[k - self.first_level]

    @property
    def top(self):
        return Spectrum(self.rows[-1])

    def flat(self):
        return np.array([x for r in self.rows for x in r])

    def __len__(self):
        return sum(len(r) for r in self.rows)

    def entry_index(self, k, i):
        """Flat index of entry ``i`` (1-based) of level ``k``."""
        lens = row_lengths(self.n, self.group)
        return sum(lens[: k - self.first_level]) + i - 1

    def to_json(self):
        return {"group": self.group, "n": self.n, "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_json(cls, obj):
        try:
            rows = obj["rows"]
            group = obj.get("group", "U")
            n = int(obj.get("n", len(rows) if group == "U" else len(rows) + 1))
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ValidationError(f"malformed pattern JSON: {exc}") from exc
        return cls(group, n, rows)

    @classmethod
    def from_rows(cls, rows, group="U"):
        group = check_group(group)
        n = len(rows) if group == "U" else len(rows) + 1
        return cls(group, n, rows)

    @classmethod
    def from_flat(cls, flat, n, group="U"):
        flat = list(flat)
        rows, j = [], 0
        for length in row_lengths(n, group):
            rows.append(flat[j : j + length])
            j += length
        if j != len(flat):
            raise ValueError(f"expected {j} entries, got {len(flat)}")
        return cls(group, n, rows)


def row_lengths(n, group="U"):
    if group == "U":
        return list(range(1, n + 1))
    return [k // 2 for k in range(2, n + 1)]


def pattern_size(n, group="U"):
    return sum(row_lengths(n, check_group(group)))


# --------------------------------------------------------------------------
# The GZ map


def gz_map(a, group=None):
    """Spectra of all leading principal blocks (moduli for SO)."""
    a, group = check_matrix(a, group)
    n = a.shape[0]
    rows = []
    if group == "U":
        for k in range(1, n + 1):
            w, _ = jacobi_eigh(a[:k, :k])
            rows.append(tuple(w))
    else:
        for k in range(2, n + 1):
            w, _ = jacobi_eigh(-1j * a[:k, :k])
            rows.append(tuple(np.abs(w[: k // 2])))
    return GZPattern(group, n, rows)


# --------------------------------------------------------------------------
# Interlacing


@dataclass(frozen=True)
class Violation:
    """One failed inequality ``lhs >= rhs`` (by ``amount = rhs - lhs``)."""

    kind: str
    level: int
    index: int
    lhs: float
    rhs: float

    @property
    def amount(self):
        return self.rhs - self.lhs

    def describe(self):
        return f"{self.kind} at level {self.level}, entry {self.index}: {self.lhs!r} < {self.rhs!r}"

    def to_json(self):
        return {
            "kind": self.kind,
            "level": self.level,
            "index": self.index,
            "lhs": self.lhs,
            "rhs": self.rhs,
        }


def _interlacing_pairs(p):
    """Yield ``(kind, k, i, lhs, rhs)`` for each inequality ``lhs >= rhs``."""
    first = p.first_level
    for k in range(first, p.n):
        lo, hi = p.row(k), p.row(k + 1)
        for i in range(len(lo)):
            yield "upper", k, i + 1, hi[i], lo[i]
            below = hi[i + 1] if i + 1 < len(hi) else 0.0
            yield "lower", k, i + 1, lo[i], below


def check_interlacing(p, tol=1e-9):
    """List the violated interlacing/ordering/sign constraints of ``p``.

    U: ``row[k+1][i] >= row[k][i] >= row[k+1][i+1]``.  SO: the same with
    missing entries of row ``k+1`` read as 0, plus all entries ``>= 0``.
    An empty list means the pattern is valid within ``tol``.
    """
    if not isinstance(p, GZPattern):
        raise ValueError("expected a GZPattern")
    out = []
    for kind, k, i, lhs, rhs in _interlacing_pairs(p):
        if lhs < rhs - tol:
            out.append(Violation(kind, k, i, lhs, rhs))
    for k in range(p.first_level, p.n + 1):
        r = p.row(k)
        for i in range(len(r) - 1):
            if r[i] < r[i + 1] - tol:
                out.append(Violation("order", k, i + 1, r[i], r[i + 1]))
        if p.group == "SO":
            for i, x in enumerate(r):
                if x < -tol:
                    out.append(Violation("sign", k, i + 1, x, 0.0))
    return out


def is_strictly_interlacing(p, tol=1e-9):
    """True when every interlacing inequality holds with margin ``> tol``."""
    return all(lhs - rhs > tol for _, _, _, lhs, rhs in _interlacing_pairs(p))


# --------------------------------------------------------------------------
# Polytope


@dataclass(frozen=True)
class Inequality:
    """``sum coeffs[j] * x_j + const >= 0`` over flat pattern indices."""

    coeffs: dict
    const: float

    def evaluate(self, flat):
        return sum(w * flat[j] for j, w in self.coeffs.items()) + self.const

    def to_json(self):
        return {"coeffs": {str(j): w for j, w in self.coeffs.items()}, "const": self.const}


@dataclass(frozen=True)
class PolytopeSpec:
    """Interlacing inequalities with the top row pinned to ``lam``."""

    lam: Spectrum
    group: str
    n: int
    inequalities: tuple

    def contains(self, p, tol=1e-9):
        if p.group != self.group or p.n != self.n:
            return False
        if max(abs(x - y) for x, y in zip(p.rows[-1], self.lam.values)) > tol:
            return False
        flat = p.flat()
        return all(q.evaluate(flat) >= -tol for q in self.inequalities)

    def to_json(self):
        return {
            "group": self.group,
            "n": self.n,
            "lambda": list(self.lam.values),
            "inequalities": [q.to_json() for q in self.inequalities],
        }


def polytope_spec(lam, group="U", n=None):
    """Inequality presentation of the GZ polytope of the orbit through ``lam``.

    Entries of the pinned top row are folded into the constants, so a U(n)
    polytope has ``sum_{k<n} 2k`` inequalities.
    """
    group = check_group(group)
    lam = as_spectrum(lam)
    if group == "U":
        n = len(lam)
    else:
        n = 2 * len(lam) if n is None else int(n)
        if n // 2 != len(lam) or n < 2:
            raise ValueError(f"SO({n}) needs {n // 2} moduli")
    lens = row_lengths(n, group)
    probe = GZPattern(group, n, [[0.0] * m for m in lens[:-1]] + [list(lam.values)])
    top_start = len(probe) - len(lam)

    def term(k, i):
        """(coeffs, const) contribution of entry i (0-based) of row k, 0 if absent."""
        r = probe.row(k)
        if i >= len(r):
            return {}, 0.0
        j = probe.entry_index(k, i + 1)
        if j >= top_start:
            return {}, lam[j - top_start]
        return {j: 1.0}, 0.0

    ineqs = []
    for k in range(probe.first_level, n):
        for i in range(len(probe.row(k))):
            for big, small in (((k + 1, i), (k, i)), ((k, i), (k + 1, i + 1))):
                cb, kb = term(*big)
                cs, ks = term(*small)
                coeffs = dict(cb)
                for j, w in cs.items():
                    coeffs[j] = coeffs.get(j, 0.0) - w
                ineqs.append(Inequality(coeffs, kb - ks))
    return PolytopeSpec(lam, group, n, tuple(ineqs))


# --------------------------------------------------------------------------
# Sampling


def sample_pattern(lam, seed=0, group="U", n=None, snap_prob=0.0, rng=None):
    """Random pattern in the GZ polytope of ``lam``, filled top-down.

    Each entry is uniform on its interlacing interval given the row above.
    With probability ``snap_prob`` a uniformly random subset of the
    inequalities is snapped to equality (entries then sit on an interval
    endpoint), which produces boundary patterns.
    """
    group = check_group(group)
    lam = as_spectrum(lam)
    rng = np.random.default_rng(seed) if rng is None else rng
    n = len(lam) if group == "U" else (2 * len(lam) if n is None else int(n))
    lens = row_lengths(n, group)
    snap = snap_prob > 0 and rng.random() < snap_prob
    rows = [list(lam.values)]
    for length in reversed(lens[:-1]):
        above = rows[0]
        row = []
        for i in range(length):
            hi = above[i]
            lo = above[i + 1] if i + 1 < len(above) else 0.0
            u = rng.random()
            if snap:
                s_hi, s_lo = rng.random() < 0.5, rng.random() < 0.5
                if s_hi:
                    row.append(hi)
                    continue
                if s_lo:
                    row.append(lo)
                    continue
            row.append(lo + u * (hi - lo))
        rows.insert(0, row)
    return GZPattern(group, n, rows)


# --------------------------------------------------------------------------
# Reconstruction


def _deflate(small, big, tol):
    """Greedy descending matching of equal values between consecutive rows.

    Returns ``(free_small, free_big)``: indices left after removing matched pairs.
    """
    scale = 1.0 + max(abs(x) for x in big)
    used = set()
    free_small = []
    for i, x in enumerate(small):
        hit = None
        for j, y in enumerate(big):
            if j not in used and abs(x - y) <= tol * scale:
                hit = j
                break
        if hit is None:
            free_small.append(i)
        else:
            used.add(hit)
    free_big = [j for j in range(len(big)) if j not in used]
    return free_small, free_big


def border_moduli(small, big, tol=1e-12):
    """Squared border moduli ``|b_i|^2`` and corner for one bordering step.

    ``[[diag(small), b], [b*, c]]`` has spectrum ``big``.  Matched equal pairs
    get ``b_i = 0``; the rest follow
    ``|b_i|^2 = -prod_j (mu_i - lam_j) / prod_{j != i} (mu_i - mu_j)``.
    """
    small = list(small)
    big = list(big)
    fs, fb = _deflate(small, big, tol)
    mod2 = np.zeros(len(small))
    for i in fs:
        mu = small[i]
        num = -math.prod(mu - big[j] for j in fb)
        den = math.prod(mu - small[j] for j in fs if j != i)
        val = num / den
        if val < -1e-10:
            raise ConsistencyError(f"negative squared border modulus {val!r}")
        mod2[i] = max(val, 0.0)
    return mod2, sum(big) - sum(small)


def reconstruct(p, phases=None, tol=1e-9):
    """Hermitian matrix with GZ pattern ``p``, built level by level.

    At level ``k -> k+1`` the new column is ``V_k b`` where ``V_k`` is the
    Jacobi eigenframe of the current ``A_k``, ``|b_i|`` comes from
    :func:`border_moduli` and ``arg b_i = phases[k-1][i]``.  Different phases
    give different points of the same GZ fiber.
    """
    if p.group != "U":
        raise ValueError("reconstruction is implemented for U patterns only")
    bad = check_interlacing(p, tol)
    if bad:
        raise ValidationError("pattern does not interlace: " + bad[0].describe())
    n = p.n
    if phases is None:
        phases = [[0.0] * k for k in range(1, n)]
    if len(phases) < n - 1 or any(len(phases[k - 1]) != k for k in range(1, n)):
        raise ValueError("phases must have rows of lengths 1..n-1")
    a = np.array([[p.row(1)[0]]], dtype=complex)
    for k in range(1, n):
        small, big = p.row(k), p.row(k + 1)
        mod2, corner = border_moduli(small, big)
        b = np.sqrt(mod2) * np.exp(1j * np.asarray(phases[k - 1], dtype=float))
        _, v = jacobi_eigh(a)
        col = v @ b
        nxt = np.zeros((k + 1, k + 1), dtype=complex)
        nxt[:k, :k] = a
        nxt[:k, k] = col
        nxt[k, :k] = col.conj()
        nxt[k, k] = corner
        a = nxt
    return check_hermitian(a)


def random_phases(n, rng):
    return [list(rng.uniform(0.0, 2.0 * math.pi, size=k)) for k in range(1, n)]
