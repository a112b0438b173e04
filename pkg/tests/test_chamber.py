import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import S3_POINT, random_hermitian
from gzsys.chamber import (
    levi_commutator_basis,
    orbit_dimension,
    stratum_of,
    sweep,
)
from gzsys.matrices import Spectrum, haar_unitary, sample_orbit_point


def test_sweep_examples():
    cp = sweep(np.array([[0, 1], [1, 0]], dtype=complex))
    assert np.allclose(cp.spectrum.values, (1, -1)) and cp.stratum.multiplicities == (1, 1)
    cp = sweep(np.diag([5.0, 5.0, 1.0]).astype(complex))
    assert cp.spectrum.values == (5.0, 5.0, 1.0) and cp.stratum.multiplicities == (2, 1)


def test_sweep_idempotent_on_chamber_points(rng):
    for _ in range(50):
        vals = np.sort(rng.normal(size=4))[::-1]
        cp = sweep(np.diag(vals).astype(complex))
        again = sweep(np.diag(cp.spectrum.values).astype(complex))
        assert again == cp


@given(st.integers(0, 2**32))
def test_sweep_equivariance(seed):
    rng = np.random.default_rng(seed)
    a = random_hermitian(rng, 4)
    q = haar_unitary(4, rng)
    x, y = sweep(a), sweep(q @ a @ q.conj().T)
    assert np.allclose(x.spectrum.values, y.spectrum.values, atol=1e-9)
    assert x.stratum == y.stratum


@pytest.mark.parametrize(
    "s, mults, levi, comm",
    [
        ((2, 1, 0), (1, 1, 1), 3, 0),
        ((1, 1, 0), (2, 1), 5, 3),
        ((1, 1 + 1e-12, 0), (2, 1), 5, 3),
    ],
)
def test_stratum_examples(s, mults, levi, comm):
    st_ = stratum_of(Spectrum(s), 1e-9)
    assert (st_.multiplicities, st_.dim_levi, st_.dim_levi_commutator) == (mults, levi, comm)
    assert st_.regular == (comm == 0)


@given(st.lists(st.sampled_from([0.0, 1.0, 2.0, 2.5]), min_size=1, max_size=6))
def test_stratum_identities(vals):
    st_ = stratum_of(Spectrum(tuple(vals)), 1e-9)
    assert sum(st_.multiplicities) == len(vals)
    assert st_.dim_levi == sum(m * m for m in st_.multiplicities)
    assert st_.dim_levi_commutator == sum(m * m - 1 for m in st_.multiplicities)
    assert st_.regular == all(m == 1 for m in st_.multiplicities)


def test_stratum_warning_near_threshold():
    assert stratum_of(Spectrum((1.0, 1.0 - 5e-9)), 1e-9).warning
    assert not stratum_of(Spectrum((1.0, 0.0)), 1e-9).warning


def test_stratum_rejects_bad_tol():
    with pytest.raises(ValueError):
        stratum_of(Spectrum((1.0,)), 0.0)


def test_stratum_json():
    st_ = stratum_of(Spectrum((1.0, 1.0, 0.0)), 1e-9)
    assert st_.to_json() == {
        "group": "U",
        "level": 3,
        "multiplicities": [2, 1],
        "dim_levi": 5,
        "dim_levi_commutator": 3,
        "warning": False,
    }


def test_so_strata():
    # so(4) moduli (1,1): u(2) stabilizer; so(5) moduli (1,0): u(1) x so(3)
    a = stratum_of(Spectrum((1.0, 1.0)), 1e-9, "SO", 4)
    assert a.dim_levi == 4 and a.dim_levi_commutator == 3 and a.zero_cluster == 0
    b = stratum_of(Spectrum((1.0, 0.0)), 1e-9, "SO", 5)
    assert b.zero_cluster == 1 and b.dim_levi == 4 and b.dim_levi_commutator == 3
    assert "zero_cluster" in b.to_json()


def test_orbit_dimension():
    assert orbit_dimension((2, 1, 0)) == 6
    assert orbit_dimension((1, 0)) == 2
    assert orbit_dimension((1, 1, 1)) == 0
    assert orbit_dimension((2, 1), "SO", 4) == 4
    assert orbit_dimension((2, 1), "SO", 5) == 8


def test_levi_basis_examples():
    assert len(levi_commutator_basis(S3_POINT, 2)) == 3
    a = sample_orbit_point((2.0, 1.0, 0.0), seed=1)
    assert len(levi_commutator_basis(a, 2)) == 0
    assert len(levi_commutator_basis(np.eye(3, dtype=complex), 3)) == 8


@pytest.mark.parametrize("lam", [(1, 1, 0, 0), (2, 2, 2, 0), (1, 1, 1, 1)])
def test_levi_basis_commutes_and_is_traceless(lam):
    a = sample_orbit_point(lam, seed=5)
    n = a.shape[0]
    basis = levi_commutator_basis(a, n)
    assert len(basis) == basis.stratum.dim_levi_commutator
    for x in basis.elements:
        assert np.allclose(x, -x.conj().T, atol=1e-14)
        assert np.linalg.norm(x @ a - a @ x) <= 1e-9 * (1 + np.linalg.norm(a))
        assert abs(np.trace(x)) <= 1e-12


def test_levi_basis_so():
    a = sample_orbit_point((1.0, 1.0), "SO", seed=2, n=4)
    basis = levi_commutator_basis(a, 4)
    assert len(basis) == 3
    for x in basis.elements:
        assert np.isrealobj(x) and np.allclose(x, -x.T)
        assert np.linalg.norm(x @ a - a @ x) <= 1e-9
    z = np.zeros((5, 5))
    z[:2, :2] = [[0, 1], [-1, 0]]
    assert len(levi_commutator_basis(z, 5)) == 3
