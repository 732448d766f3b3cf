"""Square functions from time-weighted semigroup derivatives, and dyadic blocks.

The pointwise square function collects |t^N L^N e^{-<t,L>} f|^2 over a
log-spaced time grid with dt/t weights; its weighted L^2 norm equals
prod_r Gamma(2 N_r) / 4^{N_r} times the norm of f.  An equivalent form
integrates |Gamma(N - iu) L^{iu} f|^2 in u.  Both reduce, on a joint
eigenbasis, to a per-axis Gram matrix in the time (resp. frequency)
variable, which is how they are evaluated here.  Littlewood-Paley blocks
for any transform pair live at the bottom of the module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import gamma as cgamma

from .core import SpectralSystem

__all__ = [
    "TimeGrid",
    "default_time_grid",
    "g_function",
    "g_function_mellin",
    "dyadic_bump",
    "littlewood_paley_blocks",
]


@dataclass(frozen=True)
class TimeGrid:
    """Per-axis log-spaced time nodes with dt/t (= log-spacing) weights."""

    axes: tuple[np.ndarray, ...]

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        object.__setattr__(self, "axes", axes)
        for a in axes:
            if np.any(a <= 0):
                raise ValueError("time nodes must be positive")
            step = np.diff(np.log(a))
            if a.size > 1 and np.max(np.abs(step - step[0])) > 1e-9 * abs(step[0]):
                raise ValueError("time nodes must be log-spaced")

    def weights(self, r: int) -> np.ndarray:
        a = self.axes[r]
        h = math.log(a[1] / a[0]) if a.size > 1 else 1.0
        w = np.full(a.size, h)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w


def default_time_grid(system: SpectralSystem, n: int = 256) -> TimeGrid:
    """Nodes on [1e-4/lam_max, 1e2/lam_min] per axis; the integrand's
    exponential decay bounds the truncation error."""
    axes = []
    for lam in system.axes:
        pos = lam[lam > 0]
        if pos.size == 0:
            raise ValueError("axis has no positive eigenvalues")
        axes.append(np.geomspace(1e-4 / pos[-1], 1e2 / pos[0], n))
    return TimeGrid(axes=tuple(axes))


def _require_atl(system: SpectralSystem) -> None:
    for r, lam in enumerate(system.axes):
        if lam[0] <= 0:
            raise ValueError(
                f"axis {r} has a zero eigenvalue; filter or shift the system first"
            )


def _check_order(system: SpectralSystem, N) -> tuple[int, ...]:
    N = tuple(int(x) for x in np.broadcast_to(np.asarray(N, dtype=int), (system.d,)))
    if any(x < 1 for x in N):
        raise ValueError("the order N must be >= 1 on every axis")
    return N


def _gram_square(system: SpectralSystem, f: np.ndarray, grams: Sequence[np.ndarray]) -> np.ndarray:
    """Pointwise quadratic form sum_{k,l} M(x,k) G(k,l) conj(M(x,l)) with
    per-axis Gram factors G = G_1 x ... x G_d and M(x,k) = basis * coeffs."""
    c = system.analysis(f)
    w = np.multiply.outer(c, c.conj())  # (k_1..k_d, l_1..l_d)
    d = system.d
    # interleave to (k_1, l_1, k_2, l_2, ...)
    order = [axis for r in range(d) for axis in (r, d + r)]
    w = np.transpose(w, order)
    for r in range(d):
        shape = [1] * (2 * d)
        shape[2 * r] = grams[r].shape[0]
        shape[2 * r + 1] = grams[r].shape[1]
        w = w * grams[r].reshape(shape)
    out = w
    for r in range(d):
        B = system.axis_synthesis[r].astype(complex)
        pair = np.einsum("xk,xl->xkl", B, B.conj())
        out = np.tensordot(pair, out, axes=([1, 2], [0, 1]))
        out = np.moveaxis(out, 0, out.ndim - 1)  # park finished grid axes last
    # parking each new grid axis last leaves the final order x_1, ..., x_d
    return np.sqrt(np.maximum(out.real, 0.0)).ravel()


def g_function(
    system: SpectralSystem,
    N,
    f: np.ndarray,
    tgrid: TimeGrid | None = None,
) -> np.ndarray:
    """Pointwise square function of order N over a log time grid.

    Returns (sum_t |t^N L^N e^{-<t,L>} f(x)|^2 dt/t)^{1/2} at every grid
    node, evaluated exactly as the stated quadrature sum via per-axis
    time-Gram matrices.
    """
    _require_atl(system)
    N = _check_order(system, N)
    tgrid = tgrid or default_time_grid(system)
    grams = []
    for r in range(system.d):
        lam = system.axes[r]
        t = tgrid.axes[r]
        wt = tgrid.weights(r) * t ** (2 * N[r])
        decay = np.exp(-np.add.outer(lam, lam)[None, :, :] * t[:, None, None])
        G = np.einsum("t,tkl->kl", wt, decay) * np.multiply.outer(lam ** N[r], lam ** N[r])
        grams.append(G.astype(complex))
    return _gram_square(system, f, grams)


def g_function_mellin(
    system: SpectralSystem,
    N,
    f: np.ndarray,
    u_box: float = 40.0,
    n_u: int = 2001,
) -> np.ndarray:
    """The frequency-side form (2 pi)^{-d/2} || Gamma(N - iu) L^{iu} f ||_{L^2(du)}.

    Must agree pointwise with ``g_function``; evaluated with per-axis
    frequency-Gram matrices over a truncated u box (the Gamma factor decays
    exponentially).
    """
    _require_atl(system)
    N = _check_order(system, N)
    u = np.linspace(-u_box, u_box, n_u)
    du = np.full(n_u, u[1] - u[0])
    du[0] *= 0.5
    du[-1] *= 0.5
    grams = []
    for r in range(system.d):
        lam = system.axes[r]
        gam2 = np.abs(cgamma(N[r] - 1j * u)) ** 2 * du / (2.0 * math.pi)
        phase = np.exp(1j * np.outer(u, np.log(lam)))
        # G[k,l] = sum_u w_u |Gamma|^2 (lam_k/lam_l)^{iu}
        G = (phase * gam2[:, None]).T @ phase.conj()
        grams.append(G)
    return _gram_square(system, f, grams)


# ---------------------------------------------------------------------------
# Littlewood-Paley blocks


def _smooth_step(x: np.ndarray) -> np.ndarray:
    # C^inf transition built from e^{-1/x}: 0 below 0, 1 above 1
    x = np.asarray(x, dtype=float)
    lo = np.where(x > 0, np.exp(-1.0 / np.maximum(x, 1e-300)), 0.0)
    hi = np.where(x < 1, np.exp(-1.0 / np.maximum(1.0 - x, 1e-300)), 0.0)
    return np.where(x <= 0, 0.0, np.where(x >= 1, 1.0, lo / (lo + hi)))


def _base_bump(xi: np.ndarray) -> np.ndarray:
    xi = np.abs(np.asarray(xi, dtype=float))
    return _smooth_step(2.0 * (xi - 0.5)) * _smooth_step(2.0 - xi)


def dyadic_bump(xi: np.ndarray) -> np.ndarray:
    """Smooth psi supported on 1/2 <= |xi| <= 2 with sum_l psi(2^-l xi)^2 = 1.

    Built by normalizing an e^{-1/x} bump by its own dyadic-dilate sum, so
    the square partition holds by construction for every xi != 0.
    """
    xi = np.abs(np.asarray(xi, dtype=float))
    num = _base_bump(xi)
    total = np.zeros_like(num)
    for l in (-1, 0, 1):
        total += _base_bump(2.0 ** (-l) * xi)
    out = np.zeros_like(num)
    mask = num > 0
    out[mask] = np.sqrt(num[mask] / total[mask])
    return out


def littlewood_paley_blocks(
    f: np.ndarray,
    transform: Callable[[np.ndarray], np.ndarray],
    inverse: Callable[[np.ndarray], np.ndarray],
    freq_axes: Sequence[np.ndarray],
    j_range: Iterable[int],
    psi: Callable[[np.ndarray], np.ndarray] | None = None,
    defect_tol: float = 1e-8,
) -> dict:
    """Blocks S_j f with transform psi(2^{-j_1} xi_1) ... psi(2^{-j_d} xi_d) f^.

    ``transform``/``inverse`` map grid values to values on the tensor grid
    of ``freq_axes`` and back.  The per-axis square partition
    sum_l psi(2^{-l} xi)^2 = 1 is verified on every sampled frequency the
    range covers; a defect above ``defect_tol`` is an error.
    """
    psi = psi or dyadic_bump
    j_list = sorted(j_range)
    if not j_list:
        raise ValueError("empty block range")
    lo, hi = 2.0 ** j_list[0], 2.0 ** j_list[-1]
    for xi in freq_axes:
        a = np.abs(np.asarray(xi, dtype=float))
        covered = (a >= lo) & (a <= hi)
        if not np.any(covered):
            continue
        total = np.zeros(covered.sum())
        for l in j_list:
            total += psi(2.0 ** (-l) * a[covered]) ** 2
        defect = float(np.max(np.abs(total - 1.0)))
        if defect > defect_tol:
            raise ValueError(
                f"dyadic square partition defect {defect:.3e} exceeds {defect_tol:g} "
                "on the sampled frequency range"
            )
    fhat = transform(np.asarray(f))
    d = len(freq_axes)
    blocks = {}
    for j in (j_list if d == 1 else __import__("itertools").product(*[j_list] * d)):
        j_tup = (j,) if d == 1 else tuple(j)
        mask = np.ones_like(fhat, dtype=float)
        for r in range(d):
            shape = [1] * d
            shape[r] = -1
            mask = mask * psi(2.0 ** (-j_tup[r]) * np.asarray(freq_axes[r])).reshape(shape)
        blocks[j_tup] = inverse(fhat * mask)
    return blocks
