import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("gz", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("gz")


def random_hermitian(rng, n, scale=1.0):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (z + z.conj().T) / 2.0


def random_skew(rng, n):
    z = rng.normal(size=(n, n))
    return z - z.T


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


S3_POINT = np.array([[1, 0, 0], [0, 1, 1], [0, 1, 1]], dtype=complex)
