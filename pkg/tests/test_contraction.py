import numpy as np
import pytest

from conftest import S3_POINT
from gzsys.chamber import orbit_dimension
from gzsys.contraction import (
    chain_report,
    fiber_tangent,
    fiber_tangent_dim,
    leaf_dim,
    leaf_flow_deviation,
    numerical_rank,
)
from gzsys.fiber import jacobian_rank
from gzsys.matrices import sample_orbit_point
from gzsys.patterns import GZPattern, random_phases, reconstruct, sample_pattern


def test_numerical_rank():
    assert numerical_rank([]) == 0
    v = [np.eye(2), 2 * np.eye(2), np.diag([1.0, 0.0])]
    assert numerical_rank(v) == 2


def test_leaf_dim_examples():
    d = np.diag([2.0, 1.0, 0.0]).astype(complex)
    assert [leaf_dim(d, k) for k in (1, 2, 3)] == [0, 0, 0]
    assert leaf_dim(S3_POINT, 2) == 3
    assert leaf_dim(3.0 * np.eye(4, dtype=complex), 4) == 0


def test_chain_report_examples():
    a = sample_orbit_point((2.0, 1.0, 0.0), seed=8)
    rep = chain_report(a)
    assert [e.leaf_dim for e in rep.per_level] == [0, 0, 0]
    rep = chain_report(S3_POINT)
    assert [e.level for e in rep.per_level] == [3, 2, 1]
    assert [e.leaf_dim for e in rep.per_level] == [0, 3, 0]
    assert rep.per_level[1].stratum.multiplicities == (2,)
    rep = chain_report(np.eye(2, dtype=complex))
    assert rep.per_level[0].stratum.multiplicities == (2,) and rep.per_level[0].leaf_dim == 0
    js = chain_report(S3_POINT).to_json()
    assert js["lambda"] == [2.0, 1.0, 0.0] and len(js["point_digest"]) == 16


def test_chain_report_so():
    a = sample_orbit_point((1.0, 1.0), "SO", seed=1, n=4)
    rep = chain_report(a)
    assert [e.level for e in rep.per_level] == [4, 3, 2]


@pytest.mark.parametrize("lam", [(2, 1, 0), (3, 1, 0, -1), (1, 1, 0, 0)])
def test_leaf_dims_bounded_by_commutator(lam):
    for s in range(30):
        p = sample_pattern(lam, seed=s, snap_prob=0.8)
        a = reconstruct(p, random_phases(p.n, np.random.default_rng(s)))
        for e in chain_report(a).per_level:
            assert 0 <= e.leaf_dim <= e.stratum.dim_levi_commutator
            if e.stratum.regular:
                assert e.leaf_dim == 0


def test_generic_points_have_trivial_leaves():
    for s in range(50):
        a = sample_orbit_point((3.0, 1.0, 0.0, -1.0), seed=s)
        assert all(e.leaf_dim == 0 for e in chain_report(a).per_level)


def test_fiber_tangent_examples():
    a = sample_orbit_point((2.0, 1.0, 0.0), seed=4)
    assert fiber_tangent_dim(a) == 3
    ft = fiber_tangent(S3_POINT)
    assert ft.rank == 3 and ft.leaf_rank == 3 and ft.torus_rank == 0
    assert (2, 1) in ft.skipped and (2, 2) in ft.skipped
    assert fiber_tangent_dim(2.0 * np.eye(3, dtype=complex)) == 0


def test_leaf_flows_preserve_the_pattern():
    p = GZPattern.from_rows([[1.0], [1.0, 1.0], [2.0, 1.0, 1.0], [3.0, 1.0, 1.0, 0.0]])
    a = reconstruct(p, random_phases(4, np.random.default_rng(2)))
    for k in range(1, 5):
        assert leaf_flow_deviation(a, k) <= 1e-8


@pytest.mark.parametrize("lam", [(2, 1, 0), (3, 1, 0, -1)])
def test_rank_consistency_at_representatives(lam):
    for s in range(40):
        p = sample_pattern(lam, seed=s, snap_prob=0.6)
        a = reconstruct(p, random_phases(p.n, np.random.default_rng(s + 1000)))
        assert fiber_tangent_dim(a) == orbit_dimension(lam) - jacobian_rank(a)
