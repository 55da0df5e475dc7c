import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20250810)


def random_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish orthogonal matrix via QR with sign fix."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def zero_mean_orthogonal_columns(n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    """p orthonormal columns in R^n, each orthogonal to the all-ones vector
    (so they are exactly zero-mean)."""
    assert p <= n - 1
    basis = rng.standard_normal((n, p))
    ones = np.ones(n) / np.sqrt(n)
    basis -= np.outer(ones, ones @ basis)
    q, r = np.linalg.qr(basis)
    return q * np.sign(np.diag(r))
