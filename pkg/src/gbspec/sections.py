"""Exact algebra for functions that are piecewise in a section space.

A section space of degree ``p`` is spanned by the monomials ``1, t, ...,
t**(p-2)`` together with a pair ``(u, v)`` that depends on the family:

* polynomial:     ``u = t**(p-1)``, ``v = t**p``
* hyperbolic:     ``u = cosh(eps*t)``, ``v = sinh(eps*t)``
* trigonometric:  ``u = cos(eps*t)``,  ``v = sin(eps*t)``

Every piece is stored in local coordinates ``tau in [0, 1)`` of its interval,
so a global phase ``alpha`` turns into the effective phase ``eps = alpha *
width`` on each interval.  All three families are closed under
differentiation, and antidifferentiation lands in the degree ``p+1`` space,
which is what makes the recursive spline constructions exact instead of
quadrature-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstraintError, UsageError

POLYNOMIAL = "polynomial"
HYPERBOLIC = "hyperbolic"
TRIGONOMETRIC = "trigonometric"

_FAMILIES = (POLYNOMIAL, HYPERBOLIC, TRIGONOMETRIC)


@dataclass(frozen=True)
class SectionFamily:
    """Section-space family: a tag plus the (global) phase parameter.

    The phase is expressed per unit of the global coordinate; an interval of
    width ``w`` uses the effective phase ``phase * w``.  Polynomial sections
    carry no phase.
    """

    tag: str
    phase: float | None = None

    def __post_init__(self):
        if self.tag not in _FAMILIES:
            raise UsageError(f"unknown section family {self.tag!r}")
        if self.tag == POLYNOMIAL:
            if self.phase is not None:
                raise UsageError("polynomial sections take no phase")
        else:
            if self.phase is None or not self.phase > 0:
                raise ConstraintError(f"{self.tag} phase must be positive")

    @property
    def is_polynomial(self) -> bool:
        return self.tag == POLYNOMIAL

    def effective(self, width: float) -> float:
        """Effective phase on an interval of the given width (0 if polynomial)."""
        if self.is_polynomial:
            return 0.0
        return self.phase * width

    def check_interval(self, width: float) -> None:
        """Validate the per-interval feasibility constraint."""
        if self.tag == TRIGONOMETRIC and not self.phase * width < math.pi:
            raise ConstraintError(
                f"trigonometric phase {self.phase} infeasible on interval of "
                f"width {width} (effective phase must stay below pi)"
            )


def polynomial() -> SectionFamily:
    return SectionFamily(POLYNOMIAL)


def hyperbolic(alpha: float) -> SectionFamily:
    return SectionFamily(HYPERBOLIC, float(alpha))


def trigonometric(alpha: float) -> SectionFamily:
    return SectionFamily(TRIGONOMETRIC, float(alpha))


@dataclass(frozen=True)
class LocalBasis:
    """Local section basis on one interval, in its unit coordinate.

    Basis slots: ``tau**0, ..., tau**(p-2), u, v`` (size ``p+1``).  For
    ``p == 1`` only ``u`` and ``v`` remain; for the polynomial family these
    are ``1`` and ``tau``.
    """

    family: SectionFamily
    degree: int
    eff_phase: float

    def __post_init__(self):
        if self.degree < 0:
            raise UsageError("degree must be >= 0")
        if self.degree == 0 and not self.family.is_polynomial:
            raise UsageError("degree-0 pieces are supported for polynomials only")
        if self.family.tag == TRIGONOMETRIC and not 0 < self.eff_phase < math.pi:
            raise ConstraintError(
                f"trigonometric effective phase {self.eff_phase} not in (0, pi)"
            )

    @property
    def size(self) -> int:
        return self.degree + 1


def basis_eval(basis: LocalBasis, j: int, tau: float) -> float:
    """Value of the ``j``-th local basis function at ``tau`` in [0, 1]."""
    p = basis.degree
    if not 0 <= j <= p:
        raise UsageError(f"basis index {j} out of range 0..{p}")
    if p == 0:
        return 1.0
    if j < p - 1:
        return float(tau) ** j
    eps = basis.eff_phase
    if basis.family.is_polynomial:
        return float(tau) ** (p - 1 if j == p - 1 else p)
    if basis.family.tag == HYPERBOLIC:
        return math.cosh(eps * tau) if j == p - 1 else math.sinh(eps * tau)
    return math.cos(eps * tau) if j == p - 1 else math.sin(eps * tau)


def _basis_matrix(family: SectionFamily, p: int, eps: np.ndarray,
                  tau: np.ndarray) -> np.ndarray:
    """Stack the p+1 basis values at each (eps, tau) pair; shape (len(tau), p+1)."""
    tau = np.asarray(tau, dtype=float)
    out = np.empty((tau.size, p + 1))
    if p == 0:
        out[:, 0] = 1.0
        return out
    for j in range(p - 1):
        out[:, j] = tau**j
    if family.is_polynomial:
        out[:, p - 1] = tau ** (p - 1)
        out[:, p] = tau**p
    elif family.tag == HYPERBOLIC:
        out[:, p - 1] = np.cosh(eps * tau)
        out[:, p] = np.sinh(eps * tau)
    else:
        out[:, p - 1] = np.cos(eps * tau)
        out[:, p] = np.sin(eps * tau)
    return out


@dataclass(frozen=True)
class PiecewiseFn:
    """Function piecewise in a degree-``p`` section space over a breakpoint grid.

    ``coeffs[i]`` holds the local-basis coefficients on
    ``[breakpoints[i], breakpoints[i+1])``.  Values are 0 outside the span,
    right-continuous at interior breakpoints, and the last breakpoint
    evaluates as the left limit.
    """

    family: SectionFamily
    degree: int
    breakpoints: np.ndarray
    coeffs: np.ndarray
    _widths: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bp = np.ascontiguousarray(np.asarray(self.breakpoints, dtype=float))
        cf = np.ascontiguousarray(np.asarray(self.coeffs, dtype=float))
        widths = np.diff(bp)
        if bp.ndim != 1 or bp.size < 2 or not np.all(widths > 0):
            raise UsageError("breakpoints must be strictly increasing, length >= 2")
        if cf.shape != (bp.size - 1, self.degree + 1):
            raise UsageError(
                f"coefficient array must have shape {(bp.size - 1, self.degree + 1)}"
            )
        if self.degree == 0 and not self.family.is_polynomial:
            raise UsageError("degree-0 pieces are supported for polynomials only")
        if self.family.tag == TRIGONOMETRIC:
            self.family.check_interval(float(widths.max()))
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "coeffs", cf)
        object.__setattr__(self, "_widths", widths)

    @classmethod
    def zeros(cls, family: SectionFamily, degree: int,
              breakpoints: np.ndarray) -> "PiecewiseFn":
        bp = np.asarray(breakpoints, dtype=float)
        return cls(family, degree, bp, np.zeros((bp.size - 1, degree + 1)))

    @property
    def support(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    def _eff_phases(self) -> np.ndarray:
        if self.family.is_polynomial:
            return np.zeros_like(self._widths)
        return self.family.phase * self._widths

    def __call__(self, x):
        return piecewise_eval(self, x)

    def scaled(self, factor: float) -> "PiecewiseFn":
        return PiecewiseFn(self.family, self.degree, self.breakpoints,
                           self.coeffs * factor)

    def minus(self, other: "PiecewiseFn") -> "PiecewiseFn":
        if (other.degree != self.degree
                or other.breakpoints.shape != self.breakpoints.shape
                or not np.array_equal(other.breakpoints, self.breakpoints)):
            raise UsageError("operands must share degree and breakpoints")
        return PiecewiseFn(self.family, self.degree, self.breakpoints,
                           self.coeffs - other.coeffs)

    def integral(self) -> float:
        """Integral over the whole span (exact, via antidifferentiation)."""
        anti = piecewise_antiderivative(self)
        end = _basis_matrix(anti.family, anti.degree,
                            anti._eff_phases()[-1:], np.array([1.0]))
        return _dot2(end[0], anti.coeffs[-1])


_SPLIT = 134217729.0  # 2**27 + 1, Dekker splitting constant


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    a1 = a * _SPLIT
    ah = a1 - (a1 - a)
    al = a - ah
    b1 = b * _SPLIT
    bh = b1 - (b1 - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _dot2(a, b) -> float:
    """Compensated dot product (Ogita-Rump-Oishi Dot2).

    The hyperbolic basis pair {cosh, sinh} is ill-conditioned at large
    effective phases, so the integration-constant chain is accumulated in
    roughly doubled precision to keep normalization factors at full accuracy.
    """
    s = 0.0
    c = 0.0
    for x, y in zip(a, b):
        p, e = _two_prod(float(x), float(y))
        t = s + p
        z = t - s
        c += e + ((s - (t - z)) + (p - z))
        s = t
    return s + c


def piecewise_eval(f: PiecewiseFn, x):
    """Evaluate ``f`` at scalar or array ``x`` (0 outside the support)."""
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    bp = f.breakpoints
    idx = np.searchsorted(bp, xs, side="right") - 1
    inside = (xs >= bp[0]) & (xs <= bp[-1])
    # the right endpoint evaluates as the left limit of the last piece
    idx = np.clip(idx, 0, bp.size - 2)
    tau = (xs - bp[idx]) / f._widths[idx]
    tau[xs == bp[-1]] = 1.0
    eps = f._eff_phases()[idx]
    basis = _basis_matrix(f.family, f.degree, eps, tau)
    vals = np.einsum("ij,ij->i", basis, f.coeffs[idx])
    vals = np.where(inside, vals, 0.0)
    return float(vals[0]) if scalar else vals


def _local_derivative(family: SectionFamily, p: int, eps: float,
                      c: np.ndarray) -> np.ndarray:
    """d/dtau of a coefficient row, expressed in the same degree-p basis."""
    out = np.zeros_like(c)
    if p == 0:
        return out
    for j in range(1, p - 1):
        out[j - 1] += j * c[j]
    if family.is_polynomial:
        if p == 1:
            out[0] += c[1]  # u = 1, v = tau
        else:
            out[p - 2] += (p - 1) * c[p - 1]
            out[p - 1] += p * c[p]
    elif family.tag == HYPERBOLIC:
        out[p - 1] += eps * c[p]
        out[p] += eps * c[p - 1]
    else:
        out[p - 1] += eps * c[p]
        out[p] += -eps * c[p - 1]
    return out


def piecewise_derivative(f: PiecewiseFn) -> PiecewiseFn:
    """Exact derivative, represented at the same degree.

    Monomial slots shift down; the (u, v) pair maps within its own span,
    scaled by the effective phase.  Degree-0 input yields the zero function.
    """
    p = f.degree
    eps = f._eff_phases()
    out = np.zeros_like(f.coeffs)
    for i in range(f.coeffs.shape[0]):
        out[i] = _local_derivative(f.family, p, eps[i], f.coeffs[i]) / f._widths[i]
    return PiecewiseFn(f.family, p, f.breakpoints, out)


def _local_primitive(family: SectionFamily, p: int, eps: float,
                     c: np.ndarray) -> np.ndarray:
    """Primitive of a degree-p row (vanishing at tau=0) in the degree-p+1 basis."""
    out = np.zeros(p + 2)
    if p == 0:
        out[1] = c[0]  # degree-1 polynomial basis is {1, tau}
        return out
    for j in range(p - 1):
        out[j + 1] += c[j] / (j + 1)
    if family.is_polynomial:
        out[p] += c[p - 1] / p
        out[p + 1] += c[p] / (p + 1)
    elif family.tag == HYPERBOLIC:
        # int cosh = sinh/eps ; int sinh = (cosh - 1)/eps
        out[p + 1] += c[p - 1] / eps
        out[p] += c[p] / eps
        out[0] -= c[p] / eps
    else:
        # int cos = sin/eps ; int sin = (1 - cos)/eps
        out[p + 1] += c[p - 1] / eps
        out[p] -= c[p] / eps
        out[0] += c[p] / eps
    return out


def piecewise_antiderivative(f: PiecewiseFn) -> PiecewiseFn:
    """Exact antiderivative ``F(x) = int_{left}^{x} f``, of degree ``p+1``.

    Integration constants propagate across intervals, so ``F`` is continuous;
    outside the span the compact-support convention of :class:`PiecewiseFn`
    applies (in particular ``F`` at the last breakpoint is the total integral).
    """
    p = f.degree
    m = f.coeffs.shape[0]
    eps = f._eff_phases()
    out = np.zeros((m, p + 2))
    acc = 0.0
    for i in range(m):
        prim = _local_primitive(f.family, p, eps[i], f.coeffs[i]) * f._widths[i]
        prim[0] += acc
        out[i] = prim
        end = _basis_matrix(f.family, p + 1, np.array([eps[i]]), np.array([1.0]))
        acc = _dot2(end[0], prim)
    return PiecewiseFn(f.family, p + 1, f.breakpoints, out)
