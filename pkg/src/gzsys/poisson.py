"""Lie-Poisson structure on u(n)* and so(n)*.

Conventions (fixed once, used everywhere):

* u(n)* is identified with Hermitian matrices through ``<X, Y> = Re tr(XY)``.
  Gradients are Hermitian, the bracket is ``{f, g}(A) = <A, i[grad f, grad g]>``
  and the Hamiltonian vector field of ``f`` is ``A' = i[grad f(A), A]``.
* so(n)* is identified with real skew matrices through
  ``<X, Y> = sum_ij X_ij Y_ij = -tr(XY)``.  The bracket drops the ``i``:
  ``{f, g}(A) = <A, [grad f, grad g]>`` and ``A' = [grad f(A), A]``.

With either convention ``df/dt = {f, H}`` along the flow of ``H``.  Only the
vanishing of brackets and the periodicity of flows are convention-free.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegeneracyError, NumericalError
from .matrices import embed, jacobi_eigh, matrix_spectrum
from .validation import check_group, check_matrix

FD_STEP = 1e-5
GAP_GUARD = 1e-8


# --------------------------------------------------------------------------
# Linear structure


def pairing(x, y, group="U"):
    if group == "U":
        return float(np.real(np.sum(x * y.T)))
    return float(np.sum(x * y))


def hermitian_basis(n):
    """Orthonormal basis of n x n Hermitian matrices for ``Re tr(XY)``."""
    out = []
    r = 1.0 / math.sqrt(2.0)
    for j in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[j, j] = 1.0
        out.append(e)
    for j in range(n):
        for k in range(j + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[j, k] = e[k, j] = r
            out.append(e)
            e = np.zeros((n, n), dtype=complex)
            e[j, k] = 1j * r
            e[k, j] = -1j * r
            out.append(e)
    return out


def skew_basis(n):
    """Orthonormal basis of real skew matrices for ``sum X_ij Y_ij``."""
    out = []
    r = 1.0 / math.sqrt(2.0)
    for j in range(n):
        for k in range(j + 1, n):
            e = np.zeros((n, n))
            e[j, k] = r
            e[k, j] = -r
            out.append(e)
    return out


def coadjoint_basis(n, group):
    return hermitian_basis(n) if group == "U" else skew_basis(n)


def commutator(x, y):
    return x @ y - y @ x


def hamiltonian_vector(grad, a, group="U"):
    """Tangent vector ``i[grad, A]`` (U) or ``[grad, A]`` (SO)."""
    c = commutator(grad, a)
    return 1j * c if group == "U" else c


# --------------------------------------------------------------------------
# Scalar fields


@dataclass(frozen=True)
class ScalarField:
    """A smooth function on u(n)* or so(n)*, optionally with its gradient."""

    evaluator: object
    gradient: object = None
    label: str = ""

    def __call__(self, a):
        return float(self.evaluator(a))

    def __mul__(self, other):
        f, g = self, other

        def value(a):
            return f(a) * g(a)

        def grad(a):
            return f(a) * g.gradient(a) + g(a) * f.gradient(a)

        has_grad = f.gradient is not None and g.gradient is not None
        return ScalarField(value, grad if has_grad else None, f"({f.label})*({g.label})")


def linear_field(coeff, group="U", label=None):
    """``A -> <coeff, A>``; its gradient is ``coeff``."""
    coeff = np.array(coeff)

    return ScalarField(
        lambda a: pairing(coeff, a, group),
        lambda a: coeff.copy(),
        label or "linear",
    )


def entry_field(i, j, part="re"):
    """Real or imaginary part of the Hermitian entry ``A[i, j]`` (0-based)."""
    if part not in ("re", "im"):
        raise ValueError("part must be 're' or 'im'")

    def value(a):
        z = a[i, j]
        return z.real if part == "re" else z.imag

    def grad(a):
        n = a.shape[0]
        g = np.zeros((n, n), dtype=complex)
        if i == j:
            if part == "re":
                g[i, i] = 1.0
            return g
        if part == "re":
            g[i, j] = g[j, i] = 0.5
        else:
            g[i, j] = 0.5j
            g[j, i] = -0.5j
        return g

    return ScalarField(value, grad, f"{part} A[{i},{j}]")


def trace_power_field(p):
    """``tr(A^p) / p`` with gradient ``A^(p-1)`` (a Casimir)."""

    def value(a):
        return np.real(np.trace(np.linalg.matrix_power(a, p))) / p

    def grad(a):
        return np.linalg.matrix_power(a, p - 1)

    return ScalarField(value, grad, f"tr(A^{p})/{p}")


def _level_decomposition(a, k, group):
    """Eigen-data of the level-k block: ``(values, vectors)``.

    For U these are the descending eigenpairs of ``A_k``.  For SO they are the
    moduli ``b`` and eigenvectors ``v`` with ``A_k v = i b v``.
    """
    block = a[:k, :k]
    if group == "U":
        return jacobi_eigh(block)
    w, v = jacobi_eigh(-1j * block)
    m = k // 2
    return np.abs(w[:m]), v[:, :m]


def _check_gap(values, i, group, k):
    gaps = [abs(values[i] - values[j]) for j in (i - 1, i + 1) if 0 <= j < len(values)]
    if group == "SO":
        # +b and -b (and the forced zero for odd k) collide when b -> 0
        gaps.append(values[i] if k % 2 else 2.0 * values[i])
    if gaps and min(gaps) < GAP_GUARD:
        raise DegeneracyError(
            f"eigenvalue {i + 1} at level {k} is not simple (gap {min(gaps):.3g})"
        )


def eigenvalue_field(level, index, group="U", n=None):
    """The GZ component ``lambda^(level)_index`` (both 1-based).

    The analytic gradient is the zero-padded Hellmann-Feynman outer product
    ``v v*`` (U) or ``Im(conj(v) v^T)`` (SO) and raises DegeneracyError when
    the eigenvalue is within the gap guard of a neighbour.
    """
    group = check_group(group)
    k, i = int(level), int(index)
    if group == "U":
        if not 1 <= i <= k or (n is not None and k > n):
            raise ValueError(f"need 1 <= index <= level <= n, got ({k}, {i})")
    elif not (2 <= k and 1 <= i <= k // 2) or (n is not None and k > n):
        raise ValueError(f"need 2 <= level <= n and 1 <= index <= level//2, got ({k}, {i})")

    def value(a):
        vals, _ = _level_decomposition(a, k, group)
        return vals[i - 1]

    def grad(a):
        vals, vecs = _level_decomposition(a, k, group)
        _check_gap(vals, i - 1, group, k)
        v = vecs[:, i - 1]
        if group == "U":
            g = np.outer(v, v.conj())
            g = (g + g.conj().T) / 2.0
        else:
            g = np.imag(np.outer(v.conj(), v))
            g = (g - g.T) / 2.0
        return embed(g, a.shape[0])

    return ScalarField(value, grad, f"lambda^({k})_{i}")


def gz_fields(n, group="U"):
    """All GZ component fields ``[(k, i, field), ...]`` for size ``n``."""
    group = check_group(group)
    if group == "U":
        return [(k, i, eigenvalue_field(k, i, "U")) for k in range(1, n + 1) for i in range(1, k + 1)]
    return [
        (k, i, eigenvalue_field(k, i, "SO")) for k in range(2, n + 1) for i in range(1, k // 2 + 1)
    ]


# --------------------------------------------------------------------------
# Gradients and brackets


def gradient(f, a, step=FD_STEP, group=None, analytic=True):
    """Gradient of ``f`` at ``A`` under the trace pairing.

    Uses the analytic gradient when ``f`` has one and ``analytic`` is set,
    otherwise central differences over an orthonormal basis with step
    ``step * max(1, ||A||_F)``.
    """
    a, group = check_matrix(a, group)
    if analytic and f.gradient is not None:
        g = np.asarray(f.gradient(a))
        if not np.all(np.isfinite(g)):
            raise NumericalError(f"non-finite gradient for {f.label}")
        return g
    h = step * max(1.0, float(np.linalg.norm(a)))
    out = np.zeros_like(a)
    for b in coadjoint_basis(a.shape[0], group):
        fp = f(a + h * b)
        fm = f(a - h * b)
        if not (math.isfinite(fp) and math.isfinite(fm)):
            raise NumericalError(f"non-finite evaluation of {f.label}")
        out = out + ((fp - fm) / (2.0 * h)) * b
    return out


def lie_poisson_bracket(f, g, a, step=FD_STEP, group=None, analytic=True):
    """``{f, g}(A)`` in the convention of the module docstring."""
    a, group = check_matrix(a, group)
    gf = gradient(f, a, step, group, analytic)
    gg = gradient(g, a, step, group, analytic)
    c = commutator(gf, gg)
    if group == "U":
        return pairing(a, 1j * c, "U")
    return pairing(a, c, "SO")


def bracket_field(f, g, step=FD_STEP, group="U"):
    """``{f, g}`` as a field of its own (value only)."""
    return ScalarField(
        lambda a: lie_poisson_bracket(f, g, a, step, group),
        None,
        f"{{{f.label}, {g.label}}}",
    )


def involution_defect(a, group=None, step=FD_STEP, analytic=True):
    """Largest ``|{F_i, F_j}(A)|`` over pairs of GZ components.

    Components whose eigenvalue is within the gap guard of a neighbour are
    left out.  Returns ``(max_abs, pairs, skipped)`` where ``skipped`` lists
    the ``(k, i)`` that were dropped.
    """
    a, group = check_matrix(a, group)
    grads, skipped = [], []
    for k, i, f in gz_fields(a.shape[0], group):
        try:
            f.gradient(a)
        except DegeneracyError:
            skipped.append((k, i))
            continue
        grads.append(gradient(f, a, step, group, analytic))
    worst, pairs = 0.0, 0
    for x in range(len(grads)):
        for y in range(x + 1, len(grads)):
            c = commutator(grads[x], grads[y])
            v = pairing(a, 1j * c, "U") if group == "U" else pairing(a, c, "SO")
            worst = max(worst, abs(v))
            pairs += 1
    return worst, pairs, skipped


def kks_pairing(a, h1, h2, group=None):
    """Symplectic pairing of the orbit tangents generated by ``h1`` and ``h2``.

    For U, ``h1, h2`` are Hermitian and the tangents are ``i[h, A]``; anti-Hermitian
    generators ``X`` correspond to ``h = -iX``.
    """
    a, group = check_matrix(a, group)
    c = commutator(h1, h2)
    if group == "U":
        return pairing(a, 1j * c, "U")
    return pairing(a, c, "SO")


# --------------------------------------------------------------------------
# Flows


@dataclass
class FlowTrace:
    times: list
    states: list
    hamiltonian_label: str
    values: list
    spectrum_drift: float
    value_drift: float
    drift_bound: float
    group: str = "U"

    def to_json(self):
        return {
            "hamiltonian": self.hamiltonian_label,
            "group": self.group,
            "spectrum_drift": self.spectrum_drift,
            "value_drift": self.value_drift,
            "drift_bound": self.drift_bound,
            "times": list(self.times),
            "values": list(self.values),
            "states": [_flatten(s, self.group) for s in self.states],
        }

    def csv_rows(self):
        n = self.states[0].shape[0]
        if self.group == "U":
            cols = [f"re_{i}{j}" for i in range(n) for j in range(n)]
            cols += [f"im_{i}{j}" for i in range(n) for j in range(n)]
        else:
            cols = [f"a_{i}{j}" for i in range(n) for j in range(n)]
        yield ["t", *cols, "f"]
        for t, s, v in zip(self.times, self.states, self.values):
            yield [repr(float(t)), *(repr(x) for x in _flatten(s, self.group)), repr(float(v))]


def _flatten(s, group):
    if group == "U":
        return [float(x) for x in s.real.ravel()] + [float(x) for x in s.imag.ravel()]
    return [float(x) for x in np.asarray(s).ravel()]


def drift_bound(a0, t_end):
    """Documented spectrum-drift budget: ``1e-7 (1 + ||A0||_F) max(1, t_end / 2 pi)``.

    RK4 error grows linearly with the number of periods at fixed ``dt``.
    """
    return 1e-7 * (1.0 + float(np.linalg.norm(a0))) * max(1.0, t_end / (2.0 * math.pi))


def lax_flow(f, a0, t_end, dt, step=FD_STEP, group=None, record_every=1):
    """Integrate ``A' = i[grad f(A), A]`` (``[grad f, A]`` for SO) with RK4.

    The last step is shortened so that the trace ends exactly at ``t_end``.
    """
    a0, group = check_matrix(a0, group)
    if dt <= 0 or t_end < 0:
        raise ValueError("need dt > 0 and t_end >= 0")
    spec0 = matrix_spectrum(a0, group).as_array()
    f0 = f(a0)

    def rhs(a, t):
        try:
            g = gradient(f, a, step, group)
        except DegeneracyError as exc:
            raise DegeneracyError(f"{exc} at t={t:.6g}", time=t) from exc
        return hamiltonian_vector(g, a, group)

    def clean(a):
        a = (a + a.conj().T) / 2.0 if group == "U" else (a - a.T) / 2.0
        if group == "SO":
            a = a.real
        return a

    times, states, values = [0.0], [a0.copy()], [f0]
    sdrift = fdrift = 0.0
    a, t = a0.copy(), 0.0
    nsteps = int(math.ceil(t_end / dt - 1e-9)) if t_end > 0 else 0
    for j in range(1, nsteps + 1):
        h = min(dt, t_end - t)
        k1 = rhs(a, t)
        k2 = rhs(clean(a + 0.5 * h * k1), t + 0.5 * h)
        k3 = rhs(clean(a + 0.5 * h * k2), t + 0.5 * h)
        k4 = rhs(clean(a + h * k3), t + h)
        a = clean(a + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
        t = t_end if j == nsteps else j * dt
        spec = matrix_spectrum(a, group).as_array()
        fv = f(a)
        sdrift = max(sdrift, float(np.max(np.abs(spec - spec0))))
        fdrift = max(fdrift, abs(fv - f0))
        if j % record_every == 0 or j == nsteps:
            times.append(t)
            states.append(a.copy())
            values.append(fv)
    return FlowTrace(
        times, states, f.label, values, sdrift, fdrift, drift_bound(a0, t_end), group
    )
