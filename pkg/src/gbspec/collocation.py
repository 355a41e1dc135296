"""Open-knot GB-spline bases, Greville points and 1D collocation matrices.

The basis lives on the uniform open knot vector with ``p+1``-fold boundary
knots and interior knots ``i/n``.  Two phase modes are supported for the
hyperbolic and trigonometric families:

* ``nested``:     construction phase ``mu = alpha``, so the effective phase
  per interval is ``alpha/n`` and the spline spaces nest under refinement;
* ``nonnested``:  ``mu = n*alpha``, so every ``n`` uses the same cardinal
  shape with effective phase ``alpha``.

The model problem is  -kappa u'' + beta u' + gamma u = f  on (0, 1) with
homogeneous Dirichlet data, collocated at the interior Greville abscissae; a
1D geometry map folds into transformed coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import exprparse
from .errors import ConstraintError, NumericalError, UsageError, ValidationError
from .sections import (PiecewiseFn, SectionFamily,
                       piecewise_antiderivative, piecewise_derivative)
from .symbols import symbol_fn

NESTED = "nested"
NONNESTED = "nonnested"

_VALIDATION_POINTS = 1000


@dataclass(frozen=True)
class KnotVector:
    """Uniform open knot vector: p+1 zeros, i/n for i=1..n-1, p+1 ones."""

    n: int
    degree: int
    knots: np.ndarray

    @classmethod
    def open_uniform(cls, n: int, p: int) -> "KnotVector":
        if n < 2 or p < 2:
            raise UsageError("need n >= 2 subintervals and degree p >= 2")
        interior = np.arange(1, n) / n
        knots = np.concatenate([np.zeros(p + 1), interior, np.ones(p + 1)])
        return cls(n, p, knots)

    @property
    def dim(self) -> int:
        """Dimension n + p of the full spline space."""
        return self.n + self.degree


def greville_abscissae(kv: KnotVector) -> np.ndarray:
    """Interior Greville points (knot averages), one per boundary-vanishing spline."""
    p = kv.degree
    t = kv.knots
    full = np.array([t[i:i + p].mean() for i in range(1, kv.n + p + 1)])
    return full[1:-1]


def _min_feasible_n(alpha: float) -> int:
    return math.floor(alpha / math.pi) + 1


@dataclass(frozen=True)
class GBBasis:
    """GB-spline basis N_1..N_{n+p} over an open uniform knot vector."""

    knots: KnotVector
    family: SectionFamily
    mode: str
    mu: float | None
    splines: tuple[PiecewiseFn, ...]
    normalizers: np.ndarray

    @property
    def n(self) -> int:
        return self.knots.n

    @property
    def degree(self) -> int:
        return self.knots.degree

    @property
    def effective_phase(self) -> float | None:
        """Phase of the cardinal shape matching the interior splines."""
        return None if self.mu is None else self.mu / self.n


def _rep_family(family: SectionFamily, mode: str, n: int) -> tuple[SectionFamily, float | None]:
    if family.is_polynomial:
        return family, None
    if mode not in (NESTED, NONNESTED):
        raise UsageError(f"unknown phase mode {mode!r}")
    alpha = family.phase
    mu = alpha if mode == NESTED else n * alpha
    if family.tag == "trigonometric" and not mu / n < math.pi:
        if mode == NONNESTED:
            raise ConstraintError(
                f"trigonometric phase {alpha} is infeasible in non-nested mode "
                "(needs alpha < pi for every n)")
        raise ConstraintError(
            f"trigonometric phase {alpha} needs n >= {_min_feasible_n(alpha)} "
            f"in nested mode, got n = {n}")
    return SectionFamily(family.tag, mu), mu


def _seed_level(kv: KnotVector, rep: SectionFamily) -> list[PiecewiseFn]:
    """Degree-1 splines over the distinct grid, one per index i = 1..n+2p-1."""
    n, p = kv.n, kv.degree
    grid = np.arange(n + 1) / n
    eps = rep.effective(1.0 / n)
    if rep.is_polynomial:
        up = np.array([0.0, 1.0])
        down = np.array([1.0, -1.0])
    elif rep.tag == "hyperbolic":
        up = np.array([0.0, 1.0 / math.sinh(eps)])
        down = np.array([1.0, -math.cosh(eps) / math.sinh(eps)])
    else:
        up = np.array([0.0, 1.0 / math.sin(eps)])
        down = np.array([1.0, -math.cos(eps) / math.sin(eps)])

    seeds = []
    for i in range(1, n + 2 * p):
        coeffs = np.zeros((n, 2))
        # ascending branch on knot interval [t_i, t_{i+1}), 1-based knots
        if p + 1 <= i <= p + n:
            coeffs[i - p - 1] = up
        # descending branch on [t_{i+1}, t_{i+2})
        if p + 1 <= i + 1 <= p + n:
            coeffs[i - p] = down
        seeds.append(PiecewiseFn(rep, 1, grid, coeffs))
    return seeds


def _cumulative(spline: PiecewiseFn, left_degenerate: bool) -> tuple[PiecewiseFn, float]:
    """Normalized cumulative integral of one spline of degree q-1.

    For identically-zero boundary splines the cumulative degenerates to a
    unit step: one everywhere if the collapsed support sits at the left end
    of the domain, zero if it sits at the right end (zero-denominator
    convention at boundary knots).
    """
    q = spline.degree + 1
    grid = spline.breakpoints
    if not np.any(spline.coeffs):
        value = 1.0 if left_degenerate else 0.0
        coeffs = np.zeros((grid.size - 1, q + 1))
        coeffs[:, 0] = value
        return PiecewiseFn(spline.family, q, grid, coeffs), 0.0
    anti = piecewise_antiderivative(spline)
    total = anti(grid[-1])
    return anti.scaled(1.0 / total), 1.0 / total


def gb_basis(n: int, p: int, family: SectionFamily,
             mode: str = NONNESTED) -> GBBasis:
    """Construct the GB-spline basis by the integral recursion."""
    if mode not in (NESTED, NONNESTED):
        raise UsageError(f"unknown phase mode {mode!r}")
    kv = KnotVector.open_uniform(n, p)
    rep, mu = _rep_family(family, mode, n)
    level = _seed_level(kv, rep)
    for q in range(2, p + 1):
        cums = []
        for i, s in enumerate(level, start=1):
            # spline N_{i,q-1} collapses at the left boundary iff t_{i+q} = 0
            cums.append(_cumulative(s, left_degenerate=(i + q <= p + 1))[0])
        level = [cums[i].minus(cums[i + 1]) for i in range(len(cums) - 1)]
    normalizers = np.array([1.0 / s.integral() for s in level])
    return GBBasis(kv, family, mode, mu, tuple(level), normalizers)


def _grid_eval(expr, xs: np.ndarray, name: str) -> np.ndarray:
    vals = np.asarray(exprparse.evaluate(expr, {"x": xs, "x1": xs}), dtype=float)
    if vals.ndim == 0:
        vals = np.full(xs.shape, float(vals))
    if not np.all(np.isfinite(vals)):
        raise ValidationError(f"{name} is not finite on the validation grid")
    return vals


@dataclass(frozen=True)
class ProblemCoefficients:
    """Diffusion/advection/reaction coefficients and right-hand side on [0, 1]."""

    kappa: exprparse.ExprAst
    beta: exprparse.ExprAst
    gamma: exprparse.ExprAst
    rhs: exprparse.ExprAst

    def __post_init__(self):
        xs = np.linspace(0.0, 1.0, _VALIDATION_POINTS)
        if np.min(_grid_eval(self.kappa, xs, "kappa")) <= 0:
            raise ValidationError("kappa must be positive on [0, 1]")
        if np.min(_grid_eval(self.gamma, xs, "gamma")) < 0:
            raise ValidationError("gamma must be non-negative on [0, 1]")
        _grid_eval(self.beta, xs, "beta")

    @classmethod
    def from_strings(cls, kappa: str = "1", beta: str = "0", gamma: str = "0",
                     rhs: str = "0") -> "ProblemCoefficients":
        return cls(*(exprparse.parse(s) for s in (kappa, beta, gamma, rhs)))


@dataclass(frozen=True)
class GeometryMap1D:
    """Geometry map G: [0,1] -> [0,1] with its first two derivatives."""

    g: exprparse.ExprAst
    g1: exprparse.ExprAst
    g2: exprparse.ExprAst

    def __post_init__(self):
        xs = np.linspace(0.0, 1.0, _VALIDATION_POINTS)
        vals = _grid_eval(self.g, xs, "G")
        if abs(vals[0]) > 1e-10 or abs(vals[-1] - 1.0) > 1e-10:
            raise ValidationError("geometry map must satisfy G(0)=0 and G(1)=1")
        if np.min(_grid_eval(self.g1, xs, "G'")) <= 0:
            raise ValidationError("geometry map must have G' > 0 on [0, 1]")
        _grid_eval(self.g2, xs, "G''")

    @classmethod
    def from_strings(cls, g: str, g1: str | None = None,
                     g2: str | None = None) -> "GeometryMap1D":
        ast = exprparse.parse(g)
        d1 = exprparse.parse(g1) if g1 else exprparse.differentiate(ast, "x")
        d2 = exprparse.parse(g2) if g2 else exprparse.differentiate(d1, "x")
        return cls(ast, d1, d2)

    @classmethod
    def identity(cls) -> "GeometryMap1D":
        return cls.from_strings("x")


@dataclass(frozen=True)
class CollocationSystem:
    """Assembled collocation matrices and their diagonal coefficient samplings.

    ``full_matrix`` is  n^2 D(kappa_hat) @ stiffness + n D(beta_hat) @
    advection + D(gamma_hat) @ mass, where the hatted coefficients absorb the
    geometry map; ``scaled_matrix`` is ``full_matrix / n^2``.
    """

    n: int
    degree: int
    family: SectionFamily
    mode: str
    mu: float | None
    greville: np.ndarray
    stiffness: np.ndarray  # [-N_j''(xi_i)] / n^2
    advection: np.ndarray  # [N_j'(xi_i)] / n
    mass: np.ndarray       # [N_j(xi_i)]
    kappa_hat: np.ndarray
    beta_hat: np.ndarray
    gamma_hat: np.ndarray
    full_matrix: np.ndarray
    scaled_matrix: np.ndarray

    @property
    def order(self) -> int:
        return self.mass.shape[0]

    @property
    def effective_phase(self) -> float | None:
        return None if self.mu is None else self.mu / self.n


def assemble(problem: ProblemCoefficients, geometry: GeometryMap1D,
             basis: GBBasis) -> CollocationSystem:
    """Collocate the (geometry-transformed) model problem at Greville points."""
    n, p = basis.n, basis.degree
    xi = greville_abscissae(basis.knots)
    inner = basis.splines[1:-1]
    d1 = [piecewise_derivative(s) for s in inner]
    d2 = [piecewise_derivative(s) for s in d1]

    mass = np.column_stack([s(xi) for s in inner])
    adv = np.column_stack([s(xi) for s in d1]) / n
    stiff = -np.column_stack([s(xi) for s in d2]) / n**2

    env = {"x": xi, "x1": xi}
    gx = np.asarray(exprparse.evaluate(geometry.g, env), dtype=float)
    g1 = np.asarray(exprparse.evaluate(geometry.g1, env), dtype=float)
    g2 = np.asarray(exprparse.evaluate(geometry.g2, env), dtype=float)
    gx, g1, g2 = (np.broadcast_to(v, xi.shape).astype(float) for v in (gx, g1, g2))
    penv = {"x": gx, "x1": gx}

    def sample(expr):
        vals = np.asarray(exprparse.evaluate(expr, penv), dtype=float)
        return np.broadcast_to(vals, xi.shape).astype(float)

    kappa = sample(problem.kappa)
    kappa_hat = kappa / g1**2
    beta_hat = kappa * g2 / g1**3 + sample(problem.beta) / g1
    gamma_hat = sample(problem.gamma)

    full = (n**2 * kappa_hat[:, None] * stiff
            + n * beta_hat[:, None] * adv
            + gamma_hat[:, None] * mass)
    return CollocationSystem(
        n=n, degree=p, family=basis.family, mode=basis.mode, mu=basis.mu,
        greville=xi, stiffness=stiff, advection=adv, mass=mass,
        kappa_hat=kappa_hat, beta_hat=beta_hat, gamma_hat=gamma_hat,
        full_matrix=full, scaled_matrix=full / n**2,
    )


def central_range(n: int, p: int) -> tuple[int, int] | None:
    """0-based half-open row range of guaranteed central rows, or None.

    Rows i (1-based) in {floor(3p/2), ..., n+p-1-floor(3p/2)} agree entirely
    with cardinal samples; at least one exists iff n >= 2p+1-(p mod 2).
    """
    lo = (3 * p) // 2
    hi = n + p - 1 - (3 * p) // 2
    if n < 2 * p + 1 - (p % 2) or hi < lo:
        return None
    return lo - 1, hi


def _toeplitz_from(coeffs: np.ndarray, m: int) -> np.ndarray:
    b = coeffs.size // 2
    out = np.zeros((m, m))
    idx = np.subtract.outer(np.arange(m), np.arange(m))
    mask = np.abs(idx) <= b
    out[mask] = coeffs[idx[mask] + b].real
    return out


@dataclass(frozen=True)
class StructureReport:
    """Toeplitz/symmetry structure of the central block and correction ranks."""

    has_central_rows: bool
    central_toeplitz: bool
    stiffness_symmetric: bool
    mass_symmetric: bool
    advection_skew: bool
    stiffness_correction_rank: int | None
    advection_correction_rank: int | None
    mass_correction_rank: int | None
    rank_bound: int

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def structure_report(sys: CollocationSystem, tol: float = 1e-10) -> StructureReport:
    """Check the central-block structure and the low-rank correction bounds."""
    n, p = sys.n, sys.degree
    bound = 2 * ((3 * p) // 2) - 2
    rng = central_range(n, p)
    if rng is None:
        return StructureReport(False, False, False, False, False,
                               None, None, None, bound)

    # central submatrix: 1-based block indices p..n-1
    sl = slice(p - 1, n - 1)
    blocks = {name: m[sl, sl] for name, m in
              (("stiffness", sys.stiffness), ("advection", sys.advection),
               ("mass", sys.mass))}

    def is_toeplitz(b):
        return all(
            np.max(np.abs(np.diagonal(b, off) - np.diagonal(b, off)[0])) <= tol
            for off in range(-b.shape[0] + 1, b.shape[0]) if np.diagonal(b, off).size
        )

    central_toeplitz = all(is_toeplitz(b) for b in blocks.values())
    stiff_sym = np.max(np.abs(blocks["stiffness"] - blocks["stiffness"].T)) <= tol
    mass_sym = np.max(np.abs(blocks["mass"] - blocks["mass"].T)) <= tol
    adv_skew = np.max(np.abs(blocks["advection"] + blocks["advection"].T)) <= tol

    eff = (SectionFamily(sys.family.tag, sys.effective_phase)
           if not sys.family.is_polynomial else sys.family)
    m = sys.order
    t_f = _toeplitz_from(symbol_fn("f", p, eff).toeplitz_coefficients(), m)
    t_h = _toeplitz_from(symbol_fn("h", p, eff).toeplitz_coefficients(), m)
    # skew Toeplitz from first-derivative samples: entry (i, j) is the
    # derivative value at (p+1)/2 + i - j
    g_coeffs = symbol_fn("g", p, eff).coefficients
    b = g_coeffs.size - 1
    signed = np.zeros(2 * b + 1)
    for k in range(1, b + 1):
        signed[b + k] = -g_coeffs[k]  # antisymmetry about the midpoint
        signed[b - k] = g_coeffs[k]
    t_g = _toeplitz_from(signed, m)

    def num_rank(mat):
        sv = np.linalg.svd(mat, compute_uv=False)
        if sv.size == 0 or sv[0] == 0.0:
            return 0
        return int(np.sum(sv > 1e-8 * sv[0]))

    r_stiff = num_rank(sys.stiffness - t_f)
    r_adv = num_rank(sys.advection - t_g)
    r_mass = num_rank(sys.mass - t_h)
    if r_stiff > bound:
        raise NumericalError(
            f"stiffness correction rank {r_stiff} exceeds bound {bound}")
    return StructureReport(True, central_toeplitz, stiff_sym, mass_sym,
                           adv_skew, r_stiff, r_adv, r_mass, bound)
