"""Independent numerical oracles used by the tests.

Everything here is deliberately decoupled from the package's exact-algebra
path: integrals come from composite Gauss-Legendre quadrature, derivatives
from centered finite differences.
"""

import numpy as np


def gauss_legendre(fn, a: float, b: float, pieces: int = 8,
                   nodes: int = 64) -> float:
    """Composite Gauss-Legendre quadrature of a scalar-vectorized function."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(a, b, pieces + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
        total += half * float(np.sum(w * fn(mid + half * x)))
    return total


def gauss_legendre_split(fn, edges, nodes: int = 64) -> float:
    """Composite quadrature with explicitly prescribed panel edges."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
        total += half * float(np.sum(w * fn(mid + half * x)))
    return total


def central_second_difference(fn, t: float, h: float = 1e-5) -> float:
    return (fn(t + h) - 2.0 * fn(t) + fn(t - h)) / h**2


def sign_changes(values: np.ndarray, tol: float = 1e-13) -> int:
    signs = np.sign(values[np.abs(values) > tol])
    return int(np.sum(signs[1:] != signs[:-1]))
