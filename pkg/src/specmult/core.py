"""Discretized measure spaces, joint spectral calculi, and operator norms.

Everything downstream is built on three objects: a ``WeightedGrid`` (nodes
plus quadrature weights of the underlying measure), a ``SpectralSystem``
(per-axis eigenvalues together with analysis/synthesis maps realizing a
joint eigenbasis), and ``OperatorRep`` (a dense matrix acting on grid
values, with measure-aware p-norms).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "WeightedGrid",
    "ProductGrid",
    "SpectralSystem",
    "Symbol",
    "OperatorRep",
    "GrowthProfile",
    "SpectralDomainError",
    "product_grid",
    "apply_multiplier",
    "multiplier_operator",
    "imaginary_powers",
    "semigroup",
    "tensor_lift",
    "positive_spectrum_projection",
    "lp_norm",
    "lp_operator_norm",
    "power_method_pnorm",
    "save_operator",
    "load_operator",
]


class SpectralDomainError(ValueError):
    """A symbol failed to produce a finite value on the joint spectrum."""


@dataclass(frozen=True)
class WeightedGrid:
    """Nodes in R^m with strictly positive quadrature weights."""

    nodes: np.ndarray
    weights: np.ndarray
    label: str = ""

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape[0] != weights.shape[0]:
            raise ValueError(
                f"node count {nodes.shape[0]} != weight count {weights.shape[0]}"
            )
        if not np.all(weights > 0):
            raise ValueError("quadrature weights must be strictly positive")
        if not np.isfinite(weights.sum()):
            raise ValueError("total mass must be finite")

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    @property
    def mass(self) -> float:
        return float(self.weights.sum())


@dataclass(frozen=True)
class ProductGrid(WeightedGrid):
    """Tensor product of one-dimensional grids, kept with its factors.

    Nodes are stacked in C order (last factor varies fastest), matching
    ``SpectralSystem`` coefficient layout.
    """

    factors: tuple[WeightedGrid, ...] = ()

    @property
    def factor_sizes(self) -> tuple[int, ...]:
        return tuple(f.size for f in self.factors)


def product_grid(factors: Sequence[WeightedGrid], label: str = "") -> ProductGrid:
    """Cartesian product of 1-d grids with product weights."""
    factors = tuple(factors)
    coord_list = []
    for f in factors:
        if f.nodes.ndim != 1:
            raise ValueError("product_grid expects one-dimensional factor grids")
        coord_list.append(f.nodes)
    mesh = np.meshgrid(*coord_list, indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=-1)
    w = factors[0].weights
    for f in factors[1:]:
        w = np.multiply.outer(w, f.weights)
    if not label:
        label = "x".join(f.label or "grid" for f in factors)
    return ProductGrid(nodes=nodes, weights=w.ravel(), label=label, factors=factors)


@dataclass(frozen=True)
class Symbol:
    """A multiplier function on the joint spectrum.

    ``fn`` is evaluated on arrays of eigenvalue tuples of shape (..., d)
    (or (...,) for d = 1).  ``bound`` is an optional known sup of |fn|;
    ``holomorphic_sector`` an optional vector of angles in (0, pi/2]
    declaring a polysector of bounded holomorphy.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    bound: float | None = None
    holomorphic_sector: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.holomorphic_sector is not None:
            sector = tuple(float(a) for a in self.holomorphic_sector)
            if any(not 0.0 < a <= math.pi / 2 for a in sector):
                raise ValueError("sector angles must lie in (0, pi/2]")
            object.__setattr__(self, "holomorphic_sector", sector)

    def __call__(self, lam: np.ndarray) -> np.ndarray:
        return self.fn(lam)


@dataclass(frozen=True)
class GrowthProfile:
    """Per-axis growth exponents and angles of an imaginary-power bound."""

    theta: tuple[float, ...]
    sigma: tuple[float, ...]
    phi_p: tuple[float, ...]

    def __post_init__(self):
        if any(t < 0 for t in self.theta):
            raise ValueError("theta exponents must be nonnegative")
        if any(s <= 0 for s in self.sigma):
            raise ValueError("sigma exponents must be positive")
        if any(not 0.0 < a < math.pi / 2 for a in self.phi_p):
            raise ValueError("angles must lie strictly inside (0, pi/2)")


@dataclass(frozen=True)
class SpectralSystem:
    """Joint eigenbasis of d commuting operators on a product grid.

    ``axes[r]`` holds the ascending eigenvalues of the r-th operator;
    ``axis_analysis[r]`` maps axis grid values to coefficients (modes x
    nodes), ``axis_synthesis[r]`` back.  The joint eigenvalue of mode
    multi-index k is the tuple (axes[0][k0], ..., axes[d-1][k_{d-1}]).
    """

    axes: tuple[np.ndarray, ...]
    axis_analysis: tuple[np.ndarray, ...]
    axis_synthesis: tuple[np.ndarray, ...]
    grid: WeightedGrid
    label: str = ""

    def __post_init__(self):
        for lam in self.axes:
            if np.any(np.asarray(lam) < 0):
                raise ValueError("eigenvalues must be nonnegative")
            if np.any(np.diff(lam) < 0):
                raise ValueError("eigenvalues must be sorted ascending")

    @property
    def d(self) -> int:
        return len(self.axes)

    @property
    def mode_shape(self) -> tuple[int, ...]:
        return tuple(a.shape[0] for a in self.axis_analysis)

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return tuple(a.shape[1] for a in self.axis_analysis)

    @property
    def n_modes(self) -> int:
        return int(np.prod(self.mode_shape))

    def analysis(self, f: np.ndarray) -> np.ndarray:
        """Grid values -> joint coefficients (shape ``mode_shape``)."""
        c = np.asarray(f).reshape(self.grid_shape).astype(complex)
        for r, mat in enumerate(self.axis_analysis):
            c = np.moveaxis(np.tensordot(mat, c, axes=([1], [r])), 0, r)
        return c

    def synthesis(self, c: np.ndarray) -> np.ndarray:
        """Joint coefficients -> grid values (flat, length ``grid.size``)."""
        v = np.asarray(c).reshape(self.mode_shape).astype(complex)
        for r, mat in enumerate(self.axis_synthesis):
            v = np.moveaxis(np.tensordot(mat, v, axes=([1], [r])), 0, r)
        return v.ravel()

    def joint_eigenvalues(self) -> np.ndarray:
        """All eigenvalue tuples, shape (n_modes, d), C order of modes."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    @property
    def atl_ok(self) -> bool:
        """True when no axis carries a zero eigenvalue."""
        return all(lam[0] > 0 for lam in self.axes)

    def shifted(self, delta: float | Sequence[float]) -> "SpectralSystem":
        """Shift every axis-r eigenvalue by delta[r] (caller's choice)."""
        deltas = np.broadcast_to(np.asarray(delta, dtype=float), (self.d,))
        if np.any(deltas < 0):
            raise ValueError("shift must be nonnegative")
        return replace(self, axes=tuple(a + dr for a, dr in zip(self.axes, deltas)))

    def atl_filtered(self) -> "SpectralSystem":
        """View with zero eigenvalues (and their modes) dropped per axis."""
        keep = [lam > 0 for lam in self.axes]
        return replace(
            self,
            axes=tuple(lam[k] for lam, k in zip(self.axes, keep)),
            axis_analysis=tuple(m[k] for m, k in zip(self.axis_analysis, keep)),
            axis_synthesis=tuple(m[:, k] for m, k in zip(self.axis_synthesis, keep)),
        )


def _eval_symbol(system: SpectralSystem, m, lam: np.ndarray) -> np.ndarray:
    arg = lam[:, 0] if system.d == 1 else lam
    vals = np.asarray(m(arg), dtype=complex)
    if vals.shape != (lam.shape[0],):
        vals = np.broadcast_to(vals, (lam.shape[0],)).astype(complex)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise SpectralDomainError(
            f"symbol is not finite at eigenvalue tuple {tuple(float(v) for v in lam[i])}"
        )
    if isinstance(m, Symbol) and m.bound is not None:
        top = float(np.abs(vals).max())
        if top > m.bound * (1 + 1e-12):
            raise SpectralDomainError(
                f"symbol exceeds its declared bound: |m| = {top} > {m.bound}"
            )
    return vals


def apply_multiplier(system: SpectralSystem, m, f: np.ndarray) -> np.ndarray:
    """Apply the diagonal operator with symbol ``m`` to grid values ``f``."""
    f = np.asarray(f)
    if f.shape[0] != system.grid.size:
        raise ValueError(f"expected {system.grid.size} grid values, got {f.shape[0]}")
    vals = _eval_symbol(system, m, system.joint_eigenvalues())
    c = system.analysis(f) * vals.reshape(system.mode_shape)
    return system.synthesis(c)


def _dense_map(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.asarray(mats[0])
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def multiplier_operator(system: SpectralSystem, m) -> "OperatorRep":
    """Dense matrix of ``apply_multiplier``: synthesis . diag(m) . analysis."""
    vals = _eval_symbol(system, m, system.joint_eigenvalues())
    syn = _dense_map(system.axis_synthesis)
    ana = _dense_map(system.axis_analysis)
    return OperatorRep(matrix=syn @ (vals[:, None] * ana), grid=system.grid)


def imaginary_powers(system: SpectralSystem, u: float | Sequence[float]) -> "OperatorRep":
    """The unimodular-symbol operator with symbol lambda^{iu} (per axis).

    Requires an atomless spectrum at zero on every axis; shift the system
    or drop zero modes (``atl_filtered``) first otherwise.
    """
    u_vec = np.broadcast_to(np.asarray(u, dtype=float), (system.d,))
    for r, lam in enumerate(system.axes):
        if lam[0] <= 0:
            raise ValueError(
                f"axis {r} has a zero eigenvalue; imaginary powers need a "
                "spectrum with no atom at zero (shift or filter first)"
            )

    def sym(lam):
        lam = np.atleast_2d(lam) if system.d > 1 else np.asarray(lam)[..., None]
        return np.prod(lam.astype(complex) ** (1j * u_vec), axis=-1)

    return multiplier_operator(system, sym)


def semigroup(system: SpectralSystem, t: float | Sequence[float], kind: str = "heat") -> "OperatorRep":
    """Heat exp(-<t, lambda>) or subordinated exp(-<t, sqrt(lambda)>) operator."""
    t_vec = np.broadcast_to(np.asarray(t, dtype=float), (system.d,))
    if np.any(t_vec <= 0):
        raise ValueError("semigroup times must be strictly positive")
    if kind not in ("heat", "poisson"):
        raise ValueError(f"unknown semigroup kind {kind!r}")

    def sym(lam):
        lam = np.atleast_2d(lam) if system.d > 1 else np.asarray(lam)[..., None]
        lam = np.sqrt(lam) if kind == "poisson" else lam
        return np.exp(-lam @ t_vec)

    return multiplier_operator(system, sym)


def positive_spectrum_projection(system: SpectralSystem) -> "OperatorRep":
    """Projection onto modes whose eigenvalue tuple is positive on every axis."""

    def sym(lam):
        lam = np.atleast_2d(lam) if system.d > 1 else np.asarray(lam)[..., None]
        return np.all(lam > 0, axis=-1).astype(complex)

    return multiplier_operator(system, sym)


@dataclass(frozen=True)
class OperatorRep:
    """Dense complex matrix acting on the values of a ``WeightedGrid``."""

    matrix: np.ndarray
    grid: WeightedGrid

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("operator matrix must be square")
        if mat.shape[0] != self.grid.size:
            raise ValueError(
                f"matrix size {mat.shape[0]} does not match grid size {self.grid.size}"
            )

    def apply(self, f: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(f, dtype=complex)

    def compose(self, other: "OperatorRep") -> "OperatorRep":
        if other.grid.size != self.grid.size:
            raise ValueError("operators act on different grids")
        return OperatorRep(matrix=self.matrix @ other.matrix, grid=self.grid)

    def adjoint(self) -> "OperatorRep":
        """Adjoint with respect to the weighted inner product of the grid."""
        w = self.grid.weights
        return OperatorRep(matrix=(self.matrix.conj().T * w[None, :]) / w[:, None], grid=self.grid)


def lp_norm(f: np.ndarray, weights: np.ndarray, p: float) -> float:
    """Weighted L^p norm of grid values; p = inf gives the sup over nodes."""
    f = np.abs(np.asarray(f))
    if math.isinf(p):
        return float(f.max())
    return float((weights @ f**p) ** (1.0 / p))


def _dual_vector(y: np.ndarray, p: float) -> np.ndarray:
    # z with ||z||_{p'} = 1 and <y, z> = ||y||_p
    ay = np.abs(y)
    phase = np.where(ay > 0, y / np.where(ay > 0, ay, 1.0), 0.0)
    if math.isinf(p):
        z = np.zeros_like(y)
        i = int(np.argmax(ay))
        z[i] = phase[i]
        return z
    if p == 1:
        return phase
    norm = (ay**p).sum() ** (1.0 / p)
    if norm == 0:
        return np.zeros_like(y)
    return phase * (ay / norm) ** (p - 1)


def _unweighted_p_norm(v: np.ndarray, p: float) -> float:
    v = np.abs(v)
    return float(v.max()) if math.isinf(p) else float((v**p).sum() ** (1.0 / p))


def power_method_pnorm(
    matvec: Callable[[np.ndarray], np.ndarray],
    rmatvec: Callable[[np.ndarray], np.ndarray],
    n: int,
    p: float,
    seed: int = 0,
    restarts: int = 8,
    max_iter: int = 200,
    tol: float = 1e-9,
) -> float:
    """Deterministic lower bound on an (unweighted) matrix p->p norm.

    Dual-exponent fixed-point iteration restarted from ``restarts`` seeded
    random vectors; the best estimate over restarts is returned.  This is
    a certified lower bound: every iterate exhibits a concrete ratio
    ||A x||_p / ||x||_p.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    q = math.inf if p == 1 else (1.0 if math.isinf(p) else p / (p - 1.0))
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(restarts):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        x /= _unweighted_p_norm(x, p)
        prev = 0.0
        for _ in range(max_iter):
            y = matvec(x)
            est = _unweighted_p_norm(y, p)
            if est == 0.0:
                break
            z = rmatvec(_dual_vector(y, p))
            zq = _unweighted_p_norm(z, q)
            if zq <= np.real(np.vdot(z, x)) * (1 + 1e-12):
                prev = est
                break
            x = _dual_vector(z, q)
            if abs(est - prev) <= tol * est:
                prev = est
                break
            prev = est
        best = max(best, prev)
    return best


def lp_operator_norm(
    op: OperatorRep,
    p: float,
    mode: str = "exact",
    seed: int = 0,
    restarts: int = 8,
    max_iter: int = 200,
    tol: float = 1e-9,
) -> float:
    """Weighted L^p -> L^p operator norm: exact (p in {1,2,inf}), lower, or upper.

    Exact formulas: p=1 is the weighted column-sum maximum, p=inf the row-sum
    maximum, p=2 the top singular value in the weighted inner product.  The
    lower bound runs the dual power method; the upper bound interpolates the
    exact values at {1, 2, inf}.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    T = op.matrix
    w = op.grid.weights
    if mode == "exact":
        if p == 1:
            return float(np.max((w @ np.abs(T)) / w))
        if math.isinf(p):
            return float(np.max(np.abs(T).sum(axis=1)))
        if p == 2:
            sw = np.sqrt(w)
            return float(np.linalg.svd((sw[:, None] * T) / sw[None, :], compute_uv=False)[0])
        raise ValueError(f"exact mode supports p in {{1, 2, inf}}, got p={p}")
    if mode == "upper":
        n1 = lp_operator_norm(op, 1, "exact")
        n2 = lp_operator_norm(op, 2, "exact")
        ninf = lp_operator_norm(op, math.inf, "exact")
        if p <= 2:
            theta = 2.0 * (p - 1.0) / p  # 1/p = (1-theta)/1 + theta/2
            return float(n1 ** (1 - theta) * n2**theta)
        theta = 1.0 - 2.0 / p  # 1/p = (1-theta)/2 + theta/inf
        return float(n2 ** (1 - theta) * ninf**theta)
    if mode == "lower":
        # reduce the weighted norm to the unweighted one via W^{1/p}
        if math.isinf(p):
            Tp = T
        else:
            wp = w ** (1.0 / p)
            Tp = (wp[:, None] * T) / wp[None, :]
        Th = Tp.conj().T
        return power_method_pnorm(
            lambda x: Tp @ x, lambda x: Th @ x, T.shape[0], p,
            seed=seed, restarts=restarts, max_iter=max_iter, tol=tol,
        )
    raise ValueError(f"unknown mode {mode!r}")


def tensor_lift(op: OperatorRep, axis: int, grid: ProductGrid) -> OperatorRep:
    """Lift a one-axis operator to the product grid, acting on variable ``axis``.

    The weighted p->p norm of the lift equals that of the factor.
    """
    if not isinstance(grid, ProductGrid):
        raise ValueError("tensor_lift needs a ProductGrid with explicit factors")
    if axis < 0 or axis >= len(grid.factors):
        raise ValueError(f"axis {axis} out of range for {len(grid.factors)} factors")
    factor = grid.factors[axis]
    if factor.size != op.grid.size or not np.allclose(factor.nodes, op.grid.nodes):
        raise ValueError("operator grid is not the requested factor of the product grid")
    mats = [
        op.matrix if r == axis else np.eye(f.size)
        for r, f in enumerate(grid.factors)
    ]
    return OperatorRep(matrix=_dense_map(mats), grid=grid)


def save_operator(op: OperatorRep, basepath: str | Path) -> tuple[Path, Path]:
    """Write a flat little-endian float64 binary (row-major, re/im interleaved)
    plus a JSON sidecar {rows, cols, grid_label}."""
    base = Path(basepath)
    bin_path = base.with_suffix(".bin")
    json_path = base.with_suffix(".json")
    mat = op.matrix
    flat = np.empty(mat.size * 2, dtype="<f8")
    flat[0::2] = mat.real.ravel()
    flat[1::2] = mat.imag.ravel()
    bin_path.write_bytes(flat.tobytes())
    json_path.write_text(json.dumps(
        {"rows": mat.shape[0], "cols": mat.shape[1], "grid_label": op.grid.label},
        sort_keys=True,
    ))
    return bin_path, json_path


def load_operator(basepath: str | Path, grid: WeightedGrid) -> OperatorRep:
    """Read back an operator written by ``save_operator``; the grid label must match."""
    base = Path(basepath)
    meta = json.loads(base.with_suffix(".json").read_text())
    if meta["grid_label"] != grid.label:
        raise ValueError(
            f"grid label mismatch: sidecar has {meta['grid_label']!r}, grid is {grid.label!r}"
        )
    flat = np.frombuffer(base.with_suffix(".bin").read_bytes(), dtype="<f8")
    mat = (flat[0::2] + 1j * flat[1::2]).reshape(meta["rows"], meta["cols"])
    return OperatorRep(matrix=mat, grid=grid)
