"""Estimator-style wrappers for batch work with scikit-learn tooling.

Nothing here is learned from data: ``fit`` only checks shapes and records
the matrix size, so the objects can sit inside pipelines and grid searches.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .contraction import RANK_TOL
from .fiber import classify_fiber
from .patterns import GZPattern, gz_map, pattern_size, random_phases, reconstruct
from .seeding import derive_seeds
from .validation import check_group, check_matrix_batch


def _size_from_flat(width, group):
    n = 1
    while pattern_size(n, group) < width:
        n += 1
    if pattern_size(n, group) != width:
        raise ValueError(f"{width} entries do not form a {group} pattern")
    return n


class GZTransformer(TransformerMixin, BaseEstimator):
    """Matrices ``(n_samples, n, n)`` to flattened GZ patterns and back.

    ``inverse_transform`` rebuilds Hermitian representatives with seeded
    random phases (U only).
    """

    def __init__(self, group="U", random_state=0):
        self.group = group
        self.random_state = random_state

    def fit(self, X, y=None):
        X, g = check_matrix_batch(X, check_group(self.group))
        self.n_ = X.shape[1]
        self.n_features_out_ = pattern_size(self.n_, g)
        return self

    def transform(self, X):
        check_is_fitted(self, "n_")
        X, g = check_matrix_batch(X, self.group)
        if X.shape[1] != self.n_:
            raise ValueError(f"fitted for n={self.n_}, got n={X.shape[1]}")
        return np.array([gz_map(a, g).flat() for a in X])

    def inverse_transform(self, P):
        check_is_fitted(self, "n_")
        if self.group != "U":
            raise ValueError("reconstruction is implemented for U only")
        P = check_array(P, ensure_2d=True)
        seeds = derive_seeds(self.random_state, len(P))
        out = []
        for row, s in zip(P, seeds):
            p = GZPattern.from_flat(row, self.n_, "U")
            out.append(reconstruct(p, random_phases(self.n_, np.random.default_rng(s))))
        return np.stack(out)


class FiberDimensionEstimator(BaseEstimator):
    """Predict GZ fiber dimensions for flattened U patterns."""

    def __init__(self, tol=1e-9, rank_tol=RANK_TOL, random_state=0):
        self.tol = tol
        self.rank_tol = rank_tol
        self.random_state = random_state

    def fit(self, P, y=None):
        P = check_array(P)
        self.n_ = _size_from_flat(P.shape[1], "U")
        return self

    def reports(self, P):
        check_is_fitted(self, "n_")
        P = check_array(P)
        seeds = derive_seeds(self.random_state, len(P))
        out = []
        for row, s in zip(P, seeds):
            p = GZPattern.from_flat(row, self.n_, "U")
            out.append(classify_fiber(p.top, p, s, self.tol, self.rank_tol))
        return out

    def predict(self, P):
        return np.array([r.total_dim for r in self.reports(P)])

    def score(self, P, y=None):
        """Fraction of reports whose dimension agrees with the rank oracle."""
        reps = self.reports(P)
        return float(np.mean([r.consistent for r in reps]))
