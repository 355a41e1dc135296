"""Tensor-product collocation in d dimensions and the multivariate symbol.

Basis functions are products of 1D GB-splines (families, degrees and phases
may differ per direction), collocated at tensor Greville points under the
standard lexicographic ordering with the last index varying fastest.  The
multivariate symbol couples the PDE coefficient matrix, the geometry
Jacobian, and a d-by-d matrix of 1D symbols: diffusion symbols ``f`` on the
diagonal, products of advection symbols ``g`` off the diagonal, and value
symbols ``h`` in the remaining directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import exprparse
from .collocation import (NESTED, NONNESTED, GBBasis, gb_basis,
                          greville_abscissae)
from .errors import UsageError, ValidationError
from .sections import SectionFamily, polynomial, piecewise_derivative
from .spectral import _order_statistics
from .symbols import symbol_fn

_GRID_PER_DIM = {2: 33, 3: 9}
_MD_OVERSAMPLE = 32
DEFAULT_ORDER_CAP = 4096


def linearize(idx: Sequence[int], lo: Sequence[int], hi: Sequence[int]) -> int:
    """Rank of a multi-index in lexicographic order (last component fastest)."""
    idx, lo, hi = (np.asarray(v, dtype=int) for v in (idx, lo, hi))
    if idx.shape != lo.shape or idx.shape != hi.shape:
        raise UsageError("multi-index shapes disagree")
    if np.any(idx < lo) or np.any(idx > hi):
        raise UsageError(f"multi-index {idx.tolist()} outside range")
    sizes = hi - lo + 1
    rank = 0
    for k in range(idx.size):
        rank = rank * sizes[k] + (idx[k] - lo[k])
    return int(rank)


def delinearize(rank: int, lo: Sequence[int], hi: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`linearize`."""
    lo, hi = (np.asarray(v, dtype=int) for v in (lo, hi))
    sizes = hi - lo + 1
    total = int(np.prod(sizes))
    if not 0 <= rank < total:
        raise UsageError(f"rank {rank} outside 0..{total - 1}")
    out = np.zeros_like(lo)
    for k in range(lo.size - 1, -1, -1):
        rank, r = divmod(rank, int(sizes[k]))
        out[k] = lo[k] + r
    return tuple(int(v) for v in out)


def _vars(d: int) -> tuple[str, ...]:
    return tuple(f"x{k + 1}" for k in range(d))


def _eval_grid(expr, points: np.ndarray, d: int) -> np.ndarray:
    env = {name: points[:, k] for k, name in enumerate(_vars(d))}
    if d == 1:
        env["x"] = points[:, 0]
    vals = np.asarray(exprparse.evaluate(expr, env), dtype=float)
    return np.broadcast_to(vals, (points.shape[0],)).astype(float)


def _lattice(d: int, per_dim: int) -> np.ndarray:
    axes = [(np.arange(per_dim) + 0.5) / per_dim] * d
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass(frozen=True)
class ProblemMD:
    """Elliptic problem  -div(K grad u) + beta . grad u + gamma u = f  on [0,1]^d.

    ``diffusion`` is the d-by-d symmetric expression matrix K; ``advection``
    collects the first-order coefficients; per-direction spline data comes as
    ``families``, ``degrees`` and grid ratios ``nu`` (direction j uses
    ``nu[j] * n`` subintervals).
    """

    d: int
    diffusion: tuple[tuple[exprparse.ExprAst, ...], ...]
    advection: tuple[exprparse.ExprAst, ...]
    gamma: exprparse.ExprAst
    families: tuple[SectionFamily, ...]
    degrees: tuple[int, ...]
    nu: tuple[int, ...]
    mode: str

    def __post_init__(self):
        d = self.d
        if d not in (2, 3):
            raise UsageError("only d in {2, 3} is supported")
        if not (len(self.families) == len(self.degrees) == len(self.nu) == d):
            raise ValidationError("families/degrees/nu must each have d entries")
        if len(self.diffusion) != d or any(len(row) != d for row in self.diffusion):
            raise ValidationError("diffusion matrix must be d-by-d")
        if self.mode not in (NESTED, NONNESTED):
            raise UsageError(f"unknown phase mode {self.mode!r}")
        for i in range(d):
            for j in range(i + 1, d):
                if self.diffusion[i][j] != self.diffusion[j][i]:
                    raise ValidationError(
                        "diffusion matrix must be symmetric entrywise")
        pts = _lattice(d, _GRID_PER_DIM[d])
        mats = self.diffusion_at(pts)
        try:
            np.linalg.cholesky(mats)
        except np.linalg.LinAlgError:
            raise ValidationError(
                "diffusion matrix is not positive definite on the grid") from None
        if np.min(_eval_grid(self.gamma, pts, d)) < 0:
            raise ValidationError("gamma must be non-negative")

    def diffusion_at(self, points: np.ndarray) -> np.ndarray:
        d = self.d
        out = np.empty((points.shape[0], d, d))
        for i in range(d):
            for j in range(d):
                out[:, i, j] = _eval_grid(self.diffusion[i][j], points, d)
        return out

    def advection_at(self, points: np.ndarray) -> np.ndarray:
        return np.stack(
            [_eval_grid(b, points, self.d) for b in self.advection], axis=1)


@dataclass(frozen=True)
class GeometryMapMD:
    """Componentwise geometry map of [0,1]^d with exact expression derivatives."""

    d: int
    components: tuple[exprparse.ExprAst, ...]

    def __post_init__(self):
        if len(self.components) != self.d:
            raise ValidationError("geometry needs d component expressions")
        jac = self._jacobian_exprs()
        object.__setattr__(self, "_jac", jac)
        object.__setattr__(self, "_hess", tuple(
            tuple(tuple(exprparse.differentiate(jac[a][i], f"x{j + 1}")
                        for j in range(self.d)) for i in range(self.d))
            for a in range(self.d)))
        pts = _lattice(self.d, _GRID_PER_DIM[self.d])
        if np.min(np.abs(np.linalg.det(self.jacobian_at(pts)))) < 1e-12:
            raise ValidationError("geometry Jacobian is singular on the grid")
        mesh = np.meshgrid(*([np.array([0.0, 1.0])] * self.d), indexing="ij")
        corners = np.stack([m.ravel() for m in mesh], axis=1)
        img = self.map_at(corners)
        if np.max(np.minimum(np.abs(img), np.abs(img - 1.0))) > 1e-8:
            raise ValidationError("geometry must map corners onto the boundary")

    def _jacobian_exprs(self):
        return tuple(
            tuple(exprparse.differentiate(self.components[a], f"x{i + 1}")
                  for i in range(self.d)) for a in range(self.d))

    @classmethod
    def identity(cls, d: int) -> "GeometryMapMD":
        return cls(d, tuple(exprparse.parse(f"x{k + 1}") for k in range(d)))

    @property
    def is_identity(self) -> bool:
        return self.components == GeometryMapMD.identity(self.d).components

    def map_at(self, points: np.ndarray) -> np.ndarray:
        return np.stack(
            [_eval_grid(c, points, self.d) for c in self.components], axis=1)

    def jacobian_at(self, points: np.ndarray) -> np.ndarray:
        d = self.d
        out = np.empty((points.shape[0], d, d))
        for a in range(d):
            for i in range(d):
                out[:, a, i] = _eval_grid(self._jac[a][i], points, d)
        return out

    def hessians_at(self, points: np.ndarray) -> np.ndarray:
        """Hessian of each component: shape (npts, d, d, d), axis 1 = component."""
        d = self.d
        out = np.empty((points.shape[0], d, d, d))
        for a in range(d):
            for i in range(d):
                for j in range(d):
                    out[:, a, i, j] = _eval_grid(self._hess[a][i][j], points, d)
        return out


def _direction_data(problem: ProblemMD, n: int):
    """1D bases plus value/derivative matrices at the interior Greville points."""
    bases: list[GBBasis] = []
    values, first, second, grevilles = [], [], [], []
    for j in range(problem.d):
        nj = problem.nu[j] * n
        basis = gb_basis(nj, problem.degrees[j], problem.families[j],
                         problem.mode)
        xi = greville_abscissae(basis.knots)
        inner = basis.splines[1:-1]
        d1 = [piecewise_derivative(s) for s in inner]
        d2 = [piecewise_derivative(s) for s in d1]
        values.append(np.column_stack([s(xi) for s in inner]))
        first.append(np.column_stack([s(xi) for s in d1]))
        second.append(np.column_stack([s(xi) for s in d2]))
        grevilles.append(xi)
        bases.append(basis)
    return bases, values, first, second, grevilles


def _kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def assemble_md(problem: ProblemMD, geometry: GeometryMapMD, n: int,
                order_cap: int = DEFAULT_ORDER_CAP) -> np.ndarray:
    """Assemble the multivariate collocation matrix (unnormalized).

    Rows follow the lexicographic ordering of tensor Greville points; the
    geometry map is handled by the chain rule in two dimensions and must be
    the identity in three.
    """
    d = problem.d
    if geometry.d != d:
        raise ValidationError("geometry dimension disagrees with the problem")
    if d == 3 and not geometry.is_identity:
        raise UsageError("d = 3 supports the identity geometry only")
    _, values, first, second, grevilles = _direction_data(problem, n)
    order = int(np.prod([v.shape[0] for v in values]))
    if order > order_cap:
        raise UsageError(f"system order {order} exceeds cap {order_cap}")

    mesh = np.meshgrid(*grevilles, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    phys = geometry.map_at(pts)
    jac = geometry.jacobian_at(pts)
    jinv = np.linalg.inv(jac)
    kmat = problem.diffusion_at(phys)
    beta = problem.advection_at(phys)
    gamma = _eval_grid(problem.gamma, phys, d)

    # B = J^{-1} K J^{-T} per collocation point
    bmat = np.einsum("nij,njk,nlk->nil", jinv, kmat, jinv)
    # hessians of the geometry components fold the gradient term:
    # tr(K Hx) = sum_ij B_ij Hhat_ij - sum_c s_c (grad_x)_c with
    # s_c = tr(B Hhat(G_c)); the advection term adds J^{-1} beta.
    ghess = geometry.hessians_at(pts)
    s = np.einsum("nij,ncij->nc", bmat, ghess)
    grad_w = np.einsum("nij,nj->ni", jinv, beta + s)

    # the 1D derivative matrices are true parametric derivatives, so the
    # direction scalings nu_j * n are already inside them
    parts = []
    for i in range(d):
        for j in range(d):
            mats = []
            for k in range(d):
                if k == i == j:
                    mats.append(second[k])
                elif k in (i, j):
                    mats.append(first[k])
                else:
                    mats.append(values[k])
            parts.append((-bmat[:, i, j], _kron_all(mats)))
    for i in range(d):
        mats = [first[k] if k == i else values[k] for k in range(d)]
        parts.append((grad_w[:, i], _kron_all(mats)))
    parts.append((gamma, _kron_all(values)))

    out = np.zeros((order, order))
    for weight, mat in parts:
        out += weight[:, None] * mat
    return out


class DirectionSymbols:
    """Per-direction 1D symbols backing the multivariate symbol matrix."""

    def __init__(self, degrees: Sequence[int], families: Sequence[SectionFamily],
                 mode: str = NESTED):
        if mode not in (NESTED, NONNESTED):
            raise UsageError(f"unknown phase mode {mode!r}")
        self.degrees = tuple(degrees)
        # nested refinement drives every effective phase to zero, so the
        # limiting symbols are the polynomial ones
        fams = [polynomial() if mode == NESTED else f for f in families]
        self.h = [symbol_fn("h", p, f) for p, f in zip(self.degrees, fams)]
        self.g = [symbol_fn("g", p, f) for p, f in zip(self.degrees, fams)]
        self.f = [symbol_fn("f", p, f) for p, f in zip(self.degrees, fams)]

    @property
    def d(self) -> int:
        return len(self.degrees)

    def matrix(self, thetas: Sequence[float]) -> np.ndarray:
        """The d-by-d symbol matrix at one frequency vector."""
        return self.matrix_batch(np.asarray(thetas, dtype=float)[None, :])[0]

    def matrix_batch(self, thetas: np.ndarray) -> np.ndarray:
        """Symbol matrices for a batch of frequency vectors, shape (m, d, d)."""
        thetas = np.asarray(thetas, dtype=float)
        m, d = thetas.shape
        hv = np.stack([np.asarray(self.h[k](thetas[:, k])) for k in range(d)], axis=1)
        gv = np.stack([np.asarray(self.g[k](thetas[:, k])) for k in range(d)], axis=1)
        fv = np.stack([np.asarray(self.f[k](thetas[:, k])) for k in range(d)], axis=1)
        out = np.empty((m, d, d))
        for i in range(d):
            for j in range(d):
                factors = np.ones(m)
                for k in range(d):
                    if k == i == j:
                        factors = factors * fv[:, k]
                    elif k in (i, j):
                        factors = factors * gv[:, k]
                    else:
                        factors = factors * hv[:, k]
                out[:, i, j] = factors
        return out


def symbol_matrix(degrees: Sequence[int], families: Sequence[SectionFamily],
                  thetas: Sequence[float], mode: str = NESTED) -> np.ndarray:
    """Convenience wrapper building :class:`DirectionSymbols` for one point."""
    return DirectionSymbols(degrees, families, mode).matrix(thetas)


def md_symbol_samples(problem: ProblemMD, geometry: GeometryMapMD,
                      count: int, symbols: DirectionSymbols | None = None) -> np.ndarray:
    """Sorted samples of  nu (J^{-1} K(G) J^{-T} o H(theta)) nu^T.

    Evaluates the scalar symbol on a uniform lattice over [0,1]^d x [-pi,pi]^d
    (oversampled relative to ``count``) and reduces to evenly spaced order
    statistics.
    """
    if count < 1:
        raise UsageError("sample count must be >= 1")
    d = problem.d
    if symbols is None:
        symbols = DirectionSymbols(problem.degrees, problem.families, problem.mode)
    per_dim = max(4, math.ceil((_MD_OVERSAMPLE * count) ** (1.0 / (2 * d))))
    xs = (np.arange(per_dim) + 0.5) / per_dim
    ths = -math.pi + 2.0 * math.pi * (np.arange(per_dim) + 0.5) / per_dim
    xmesh = np.meshgrid(*([xs] * d), indexing="ij")
    xpts = np.stack([m.ravel() for m in xmesh], axis=1)
    tmesh = np.meshgrid(*([ths] * d), indexing="ij")
    tpts = np.stack([m.ravel() for m in tmesh], axis=1)

    jac = geometry.jacobian_at(xpts)
    dets = np.linalg.det(jac)
    if np.min(np.abs(dets)) < 1e-12:
        bad = xpts[int(np.argmin(np.abs(dets)))]
        raise ValidationError(f"geometry Jacobian singular near {bad.tolist()}")
    jinv = np.linalg.inv(jac)
    kmat = problem.diffusion_at(geometry.map_at(xpts))
    bmat = np.einsum("nij,njk,nlk->nil", jinv, kmat, jinv)
    hmats = symbols.matrix_batch(tpts)
    nu = np.asarray(problem.nu, dtype=float)
    weights = np.einsum("i,nij,j->nij", nu, hmats, nu)
    values = np.einsum("mij,nij->mn", bmat, weights).ravel()
    return _order_statistics(np.sort(values), count)
