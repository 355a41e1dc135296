"""Toeplitz generation, dense eigenvalues and Weyl-distribution reports.

The distribution comparator sorts eigenvalue real parts against the monotone
rearrangement of symbol samples, reports moment errors for the test functions
``F(z) = z**r`` (r = 1..4), the largest imaginary part, and outlier counts
relative to box expansions of the sampled symbol range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NumericalError, UsageError

#: refuse dense eigenvalue computations above this order by default
DEFAULT_ORDER_CAP = 4096

#: oversampling factor of the symbol lattice relative to the requested count
LATTICE_OVERSAMPLE = 32

#: sample-count multiplier used for the reference moments in weyl_report
MOMENT_REFINEMENT = 64


@dataclass(frozen=True)
class ToeplitzSpec:
    """Fourier coefficients c_k, k = -b..b, of a (banded) symbol."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients))
        if c.ndim != 1 or c.size % 2 != 1:
            raise UsageError("coefficient list must have odd length 2b+1")
        object.__setattr__(self, "coefficients", c)

    @property
    def bandwidth(self) -> int:
        return self.coefficients.size // 2

    @property
    def is_hermitian(self) -> bool:
        c = self.coefficients
        return bool(np.allclose(c[::-1], np.conj(c), rtol=0.0, atol=0.0))


def toeplitz(spec: ToeplitzSpec, m: int) -> np.ndarray:
    """Dense m-by-m Toeplitz matrix with entries c_{j-k} (zero beyond the band)."""
    if m < 1:
        raise UsageError("order must be >= 1")
    c = spec.coefficients
    b = spec.bandwidth
    dtype = float if np.isrealobj(c) else complex
    out = np.zeros((m, m), dtype=dtype)
    idx = np.subtract.outer(np.arange(m), np.arange(m))
    mask = np.abs(idx) <= b
    out[mask] = c[idx[mask] + b].astype(dtype)
    return out


def toeplitz_tensor(cf: ToeplitzSpec, ch: ToeplitzSpec, m1: int,
                    m2: int) -> np.ndarray:
    """Two-level Toeplitz of the product symbol f(t1)h(t2).

    Built entrywise from the coefficient products, which coincides with the
    Kronecker product of the two one-level matrices.
    """
    if m1 < 1 or m2 < 1:
        raise UsageError("orders must be >= 1")
    c1, c2 = cf.coefficients, ch.coefficients
    b1, b2 = cf.bandwidth, ch.bandwidth
    dtype = float if np.isrealobj(c1) and np.isrealobj(c2) else complex
    d1 = np.subtract.outer(np.arange(m1), np.arange(m1))
    d2 = np.subtract.outer(np.arange(m2), np.arange(m2))
    v1 = np.where(np.abs(d1) <= b1, c1[np.clip(d1 + b1, 0, c1.size - 1)], 0)
    v2 = np.where(np.abs(d2) <= b2, c2[np.clip(d2 + b2, 0, c2.size - 1)], 0)
    out = (v1[:, None, :, None] * v2[None, :, None, :]).astype(dtype)
    return out.reshape(m1 * m2, m1 * m2)


def eigenvalues_dense(a: np.ndarray, order_cap: int = DEFAULT_ORDER_CAP) -> np.ndarray:
    """All eigenvalues of a dense matrix, as a complex array.

    Symmetric/Hermitian inputs are routed to the symmetric solver
    (tridiagonalization plus implicitly shifted iterations); everything else
    goes through Hessenberg reduction with shifted QR iterations.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise UsageError("matrix must be square")
    if a.shape[0] > order_cap:
        raise UsageError(f"order {a.shape[0]} exceeds cap {order_cap}")
    try:
        scale = np.max(np.abs(a)) if a.size else 0.0
        if np.max(np.abs(a - a.conj().T)) <= 1e-13 * max(scale, 1.0):
            return np.linalg.eigvalsh(a).astype(complex)
        return np.asarray(np.linalg.eigvals(a), dtype=complex)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration failed: {exc}") from exc


Sampler = Callable[[int], np.ndarray]


@dataclass(frozen=True)
class DistributionReport:
    """Discrepancy summary between a spectrum and sorted symbol samples."""

    order: int
    mean_abs_discrepancy: float
    moment_errors: tuple[float, float, float, float]
    max_imag: float
    outliers: dict[float, int]

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "mean_abs_discrepancy": self.mean_abs_discrepancy,
            "moment_errors": list(self.moment_errors),
            "max_imag": self.max_imag,
            "outliers": {f"{eps:.17g}": c for eps, c in self.outliers.items()},
        }


def weyl_report(eigs: np.ndarray, sampler: Sampler,
                eps_values: Sequence[float] = ()) -> DistributionReport:
    """Compare a spectrum against a symbol through its monotone rearrangement.

    ``sampler(count)`` must return ``count`` sorted samples of the symbol
    distribution.  Moment references are taken from a denser draw of the same
    sampler so that the r-th moment error estimates
    |mean(lambda^r) - mean(symbol^r)| with negligible sampling bias.
    """
    eigs = np.asarray(eigs, dtype=complex).ravel()
    d = eigs.size
    if d == 0:
        raise UsageError("empty spectrum")
    samples = np.sort(np.asarray(sampler(d), dtype=float).ravel())
    if samples.size != d:
        raise UsageError(f"sampler returned {samples.size} values, expected {d}")
    sorted_re = np.sort(eigs.real)
    discrepancy = float(np.mean(np.abs(sorted_re - samples)))

    ref = np.asarray(sampler(MOMENT_REFINEMENT * d), dtype=float).ravel()
    errors = []
    for r in range(1, 5):
        errors.append(float(abs(np.mean(eigs**r) - np.mean(ref**r))))

    lo, hi = float(samples.min()), float(samples.max())
    outliers = {}
    for eps in eps_values:
        bad = ((eigs.real < lo - eps) | (eigs.real > hi + eps)
               | (np.abs(eigs.imag) > eps))
        outliers[float(eps)] = int(np.sum(bad))
    return DistributionReport(
        order=d, mean_abs_discrepancy=discrepancy,
        moment_errors=tuple(errors), max_imag=float(np.max(np.abs(eigs.imag))),
        outliers=outliers,
    )


def product_symbol_sampler(coefficient: Callable[[np.ndarray], np.ndarray],
                           symbol: Callable[[np.ndarray], np.ndarray]) -> Sampler:
    """Sampler for a separable symbol  a(x) * s(theta)  on [0,1] x [-pi,pi].

    Samples a midpoint lattice in x and a uniform theta grid on (0, pi]
    (the symbols are even), oversampled relative to the requested count, then
    reduces to evenly spaced order statistics of the sorted values.
    """

    def sample(count: int) -> np.ndarray:
        if count < 1:
            raise UsageError("sample count must be >= 1")
        side = max(64, math.isqrt(LATTICE_OVERSAMPLE * count) + 1)
        xs = (np.arange(side) + 0.5) / side
        thetas = (np.arange(side) + 1.0) * math.pi / side
        cvals = np.broadcast_to(np.asarray(coefficient(xs), dtype=float), xs.shape)
        svals = np.broadcast_to(np.asarray(symbol(thetas), dtype=float), thetas.shape)
        values = np.multiply.outer(cvals, svals)
        return _order_statistics(np.sort(values.ravel()), count)

    return sample


def _order_statistics(sorted_values: np.ndarray, count: int) -> np.ndarray:
    """Evenly spaced order statistics of an already-sorted sample pool."""
    pos = ((np.arange(count) + 0.5) * sorted_values.size / count - 0.5)
    idx = np.clip(np.round(pos).astype(int), 0, sorted_values.size - 1)
    return sorted_values[idx]
