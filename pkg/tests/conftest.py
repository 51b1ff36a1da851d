import numpy as np
import pytest

from soil.fitting import Dataset


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def orthonormal_design(n, p, rng):
    """Centered columns with X'X / n = I (so standardization is the identity)."""
    Z = rng.standard_normal((n, p))
    Z -= Z.mean(axis=0)
    Q, _ = np.linalg.qr(Z)
    return Q * np.sqrt(n)


@pytest.fixture
def orthonormal_data(rng):
    n, p = 60, 5
    X = orthonormal_design(n, p, rng)
    y = X @ np.array([3.0, -2.0, 1.0, 0.5, 0.0]) + 0.7 * rng.standard_normal(n)
    return Dataset(X, y)


def newton_logistic(X, y, iters=60):
    """Plain Newton-Raphson MLE with intercept; test oracle for IRLS."""
    A = np.column_stack([np.ones(len(y)), X])
    b = np.zeros(A.shape[1])
    for _ in range(iters):
        prob = 1 / (1 + np.exp(-A @ b))
        H = A.T @ (A * (prob * (1 - prob))[:, None])
        b = b + np.linalg.solve(H, A.T @ (y - prob))
    return b
