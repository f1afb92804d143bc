"""Trapezoidal quadrature on uniform grids.

All inner products and integrals in the package use the same weight vector,
so eigenfunctions stay orthonormal under the exact discretization that
produced them.
"""

import numpy as np


def trapezoid_weights(n_points: int, length: float = 1.0) -> np.ndarray:
    """Trapezoid-rule weights for a uniform grid spanning `length`.

    Endpoint weights are half the interior weight; the weights sum to
    `length` exactly up to rounding.
    """
    if n_points < 2:
        raise ValueError("trapezoid weights need at least 2 grid points")
    dt = length / (n_points - 1)
    w = np.full(n_points, dt)
    w[0] = dt / 2.0
    w[-1] = dt / 2.0
    return w


def inner_product(f: np.ndarray, g: np.ndarray, weights: np.ndarray) -> float:
    """Weighted inner product <f, g> = sum_i w_i f_i g_i."""
    return float(np.dot(weights, f * g))


def norm_sq(f: np.ndarray, weights: np.ndarray) -> float:
    """Squared weighted L2 norm of f."""
    return inner_product(f, f, weights)


def integrate(f: np.ndarray, weights: np.ndarray) -> float:
    """Quadrature integral of f."""
    return float(np.dot(weights, f))
