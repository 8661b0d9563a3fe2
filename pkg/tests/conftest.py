import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_unitary(rng, n):
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_ball_matrix(rng, rows, cols, rmax=0.9):
    V = rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))
    return V * (rng.uniform(0, rmax) / np.linalg.norm(V, 2))
