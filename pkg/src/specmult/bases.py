"""Classical orthogonal systems and their spectral-system factories.

Hermite polynomials under the Gaussian probability measure
gamma(x) = pi^{-1/2} e^{-x^2} dx (eigenvalue of degree k is k), Laguerre
polynomials under x^a e^{-x}/Gamma(a+1) dx (eigenvalue k), and Jacobi
trigonometric polynomials under (sin t/2)^{2a+1} (cos t/2)^{2b+1} dt on
(0, pi) (eigenvalue (k + (a+b+1)/2)^2).  Quadrature is Golub-Welsch with
2*n_max nodes so that products of retained basis functions integrate
exactly.  The Mehler kernel of the Gaussian semigroup lives here too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import eval_jacobi, gammaln, roots_genlaguerre, roots_hermite, roots_jacobi

from .core import SpectralSystem, WeightedGrid, product_grid

__all__ = [
    "HermiteBasis",
    "LaguerreBasis",
    "JacobiBasis",
    "build_system",
    "mehler_kernel",
    "mehler_derivative",
    "mehler_heat_operator",
    "jacobi_imaginary_power",
]


def _normalized_hermite(nodes: np.ndarray, n_max: int) -> np.ndarray:
    """Columns: Hermite polynomials of degree < n_max, orthonormal under gamma."""
    B = np.empty((nodes.size, n_max))
    B[:, 0] = 1.0
    if n_max > 1:
        B[:, 1] = math.sqrt(2.0) * nodes
    for k in range(1, n_max - 1):
        B[:, k + 1] = (
            math.sqrt(2.0 / (k + 1)) * nodes * B[:, k]
            - math.sqrt(k / (k + 1.0)) * B[:, k - 1]
        )
    return B


def _normalized_laguerre(nodes: np.ndarray, alpha: float, n_max: int) -> np.ndarray:
    """Columns: Laguerre polynomials orthonormal under x^a e^{-x}/Gamma(a+1) dx."""
    L = np.empty((nodes.size, n_max))
    L[:, 0] = 1.0
    if n_max > 1:
        L[:, 1] = (alpha + 1.0 - nodes) / math.sqrt(alpha + 1.0)
    for k in range(1, n_max - 1):
        a_k = (2 * k + alpha + 1.0 - nodes) / math.sqrt((k + 1) * (k + 1 + alpha))
        b_k = math.sqrt(k * (k + alpha) / ((k + 1) * (k + 1 + alpha)))
        L[:, k + 1] = a_k * L[:, k] - b_k * L[:, k - 1]
    return L


@dataclass(frozen=True)
class HermiteBasis:
    """Ornstein-Uhlenbeck eigenbasis: degree-k polynomial has eigenvalue k."""

    n_max: int
    quad_factor: int = 2

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")

    @property
    def label(self) -> str:
        return f"hermite(n={self.n_max})"

    def quadrature(self) -> WeightedGrid:
        x, w = roots_hermite(self.quad_factor * self.n_max)
        return WeightedGrid(nodes=x, weights=w / math.sqrt(math.pi), label=self.label)

    def eigenvalues(self) -> np.ndarray:
        return np.arange(self.n_max, dtype=float)

    def vandermonde(self, nodes: np.ndarray) -> np.ndarray:
        return _normalized_hermite(np.asarray(nodes, dtype=float), self.n_max)


@dataclass(frozen=True)
class LaguerreBasis:
    """Laguerre eigenbasis of parameter alpha > -1; eigenvalue of degree k is k."""

    alpha: float
    n_max: int
    quad_factor: int = 2

    def __post_init__(self):
        if self.alpha <= -1:
            raise ValueError(f"Laguerre parameter must exceed -1, got {self.alpha}")
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")

    @property
    def label(self) -> str:
        return f"laguerre(a={self.alpha:g},n={self.n_max})"

    def quadrature(self) -> WeightedGrid:
        x, w = roots_genlaguerre(self.quad_factor * self.n_max, self.alpha)
        w = w / math.exp(gammaln(self.alpha + 1.0))
        return WeightedGrid(nodes=x, weights=w, label=self.label)

    def eigenvalues(self) -> np.ndarray:
        return np.arange(self.n_max, dtype=float)

    def vandermonde(self, nodes: np.ndarray) -> np.ndarray:
        return _normalized_laguerre(np.asarray(nodes, dtype=float), self.alpha, self.n_max)


@dataclass(frozen=True)
class JacobiBasis:
    """Jacobi trigonometric polynomials on (0, pi); eigenvalue (k+(a+b+1)/2)^2.

    Normalization is fixed by unit norm in the weighted L^2 of
    (sin t/2)^{2a+1} (cos t/2)^{2b+1} dt.
    """

    alpha: float
    beta: float
    n_max: int
    quad_factor: int = 2

    def __post_init__(self):
        if self.alpha + self.beta <= -1:
            raise ValueError(
                f"need alpha + beta > -1, got {self.alpha} + {self.beta}"
            )
        if self.alpha <= -1 or self.beta <= -1:
            raise ValueError("Jacobi parameters must each exceed -1")
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")

    @property
    def label(self) -> str:
        return f"jacobi(a={self.alpha:g},b={self.beta:g},n={self.n_max})"

    def quadrature(self) -> WeightedGrid:
        # Gauss-Jacobi on (-1, 1) pulled back through x = cos(theta); the
        # trigonometric weight is 2^{-(a+b+1)} times the classical one.
        x, w = roots_jacobi(self.quad_factor * self.n_max, self.alpha, self.beta)
        theta = np.arccos(x)[::-1]
        w = (w / 2.0 ** (self.alpha + self.beta + 1.0))[::-1]
        return WeightedGrid(nodes=theta, weights=w, label=self.label)

    def eigenvalues(self) -> np.ndarray:
        k = np.arange(self.n_max, dtype=float)
        return (k + (self.alpha + self.beta + 1.0) / 2.0) ** 2

    def _norms(self) -> np.ndarray:
        # squared trig-measure norm of the classical polynomial of degree k
        k = np.arange(self.n_max, dtype=float)
        a, b = self.alpha, self.beta
        log_h = (
            gammaln(k + a + 1.0)
            + gammaln(k + b + 1.0)
            - gammaln(k + a + b + 1.0)
            - gammaln(k + 1.0)
            - np.log(2.0 * k + a + b + 1.0)
        )
        return np.exp(0.5 * log_h)

    def vandermonde(self, nodes: np.ndarray) -> np.ndarray:
        theta = np.asarray(nodes, dtype=float)
        B = np.empty((theta.size, self.n_max))
        x = np.cos(theta)
        norms = self._norms()
        for k in range(self.n_max):
            B[:, k] = eval_jacobi(k, self.alpha, self.beta, x) / norms[k]
        return B


def build_system(bases: Sequence, label: str = "") -> SpectralSystem:
    """Tensor a list of per-axis bases into a joint ``SpectralSystem``."""
    bases = list(bases)
    if not 1 <= len(bases) <= 4:
        raise ValueError("desk scale supports 1 to 4 axes")
    grids, analysis, synthesis, axes = [], [], [], []
    for b in bases:
        g = b.quadrature()
        B = b.vandermonde(g.nodes)
        grids.append(g)
        synthesis.append(B)
        analysis.append(B.T * g.weights[None, :])
        axes.append(b.eigenvalues())
    return SpectralSystem(
        axes=tuple(axes),
        axis_analysis=tuple(analysis),
        axis_synthesis=tuple(synthesis),
        grid=product_grid(grids) if len(grids) > 1 else grids[0],
        label=label or "*".join(b.label for b in bases),
    )


def _as_points(x, d: int) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    if d == 1:
        return pts.reshape(-1, 1) if pts.ndim <= 1 else pts
    return pts.reshape(-1, d)


def mehler_kernel(r: float, x, y, d: int = 1) -> np.ndarray | float:
    """Gaussian-semigroup kernel pi^{-d/2}(1-r^2)^{-d/2} exp(-|rx-y|^2/(1-r^2)).

    Integrating against plain Lebesgue measure in y reproduces the heat
    operator at time t = -log r.  Strictly positive for 0 < r < 1.
    """
    if not 0.0 < r < 1.0:
        raise ValueError(f"r must lie in (0, 1), got {r}")
    xp, yp = _as_points(x, d), _as_points(y, d)
    q = np.sum((r * xp - yp) ** 2, axis=-1)
    out = math.pi ** (-d / 2.0) * (1.0 - r * r) ** (-d / 2.0) * np.exp(-q / (1.0 - r * r))
    return out if out.size > 1 else float(out[0])


def mehler_derivative(r: float, x, y, d: int = 1) -> np.ndarray | float:
    """Closed-form d/dr of ``mehler_kernel`` at fixed (x, y)."""
    if not 0.0 < r < 1.0:
        raise ValueError(f"r must lie in (0, 1), got {r}")
    xp, yp = _as_points(x, d), _as_points(y, d)
    s = 1.0 - r * r
    diff = r * xp - yp
    q = np.sum(diff**2, axis=-1)
    ip = np.sum(diff * xp, axis=-1)
    out = (
        math.pi ** (-d / 2.0)
        * (d * r - 2.0 * r * q / s - 2.0 * ip)
        * s ** (-d / 2.0 - 1.0)
        * np.exp(-q / s)
    )
    return out if out.size > 1 else float(out[0])


def mehler_heat_operator(basis: HermiteBasis, r: float) -> np.ndarray:
    """Heat matrix at time -log r by quadrature of the Mehler kernel.

    The kernel integrates against Lebesgue measure, so the Gaussian grid
    weights are unfolded via exp(+x^2); done in log space to stay finite
    for large quadrature nodes.
    """
    if not 0.0 < r < 1.0:
        raise ValueError(f"r must lie in (0, 1), got {r}")
    grid = basis.quadrature()
    x = grid.nodes
    log_leb = np.log(grid.weights) + 0.5 * math.log(math.pi) + x**2
    K = mehler_kernel(r, np.repeat(x, x.size), np.tile(x, x.size)).reshape(x.size, x.size)
    return K * np.exp(log_leb)[None, :]


def jacobi_imaginary_power(basis: JacobiBasis, v: float, f: np.ndarray) -> np.ndarray:
    """Scale the degree-k coefficient of f by (k + (a+b+1)/2)^{2iv}."""
    system = build_system([basis])
    c = system.analysis(f)
    return system.synthesis(c * basis.eigenvalues().astype(complex) ** (1j * v))
