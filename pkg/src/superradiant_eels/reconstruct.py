"""Recover ladder populations from an electron energy-loss spectrum.

The forward map ``P = D p`` has columns that differ mostly in their far
sidebands, whose probabilities are tiny. In absolute terms ``D`` is
numerically singular (condition number ~1e20 at N = 30, |g| = 0.2), but each
entry of a measured or computed spectrum carries a *relative* error, so the
rows are normalized by their largest entry before solving. The row-scaled
problem has condition numbers of 1e3-1e8 over the supported range.

The solver is a primal active-set method for

    min ||W (D p - P)||^2 + lam ||p||^2   subject to  p >= 0, sum(p) = 1,

with ``W`` the row scaling. Each iteration solves the equality-constrained
subproblem on the free set, so the objective never increases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .eels import EELSSpectrum
from .scattering import ScatteringKernel

KKT_TOL = 1e-10
KAPPA_WARN = 1e8
MAX_ITER = 10_000


class SingularKernelError(ValueError):
    pass


class ConvergenceError(ArithmeticError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass
class ReconstructionReport:
    populations: np.ndarray
    residual: float  # ||D p - P||
    weighted_residual: float  # ||W (D p - P)||
    kappa: float  # condition number of the row-scaled kernel
    lam: float
    iterations: int
    flags: list = field(default_factory=list)
    history: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "p": self.populations.tolist(),
            "residual": self.residual,
            "weighted_residual": self.weighted_residual,
            "kappa": self.kappa,
            "lambda": self.lam,
            "iterations": self.iterations,
            "flags": list(self.flags),
        }


def build_kernel_matrix(kernel: ScatteringKernel) -> np.ndarray:
    """Loss kernel ``D[l + N, m]``; rejects the non-invertible ``g = 0`` case."""
    if abs(kernel.g) == 0.0:
        raise SingularKernelError("g = 0 gives identical kernel columns; populations are not recoverable")
    return np.array(kernel.D, copy=True)


def row_weights(D: np.ndarray) -> np.ndarray:
    peak = D.max(axis=1)
    w = np.zeros_like(peak)
    w[peak > 0] = 1.0 / peak[peak > 0]
    return w


def _null_basis(k: int) -> np.ndarray:
    """Orthonormal basis of ``{z : sum(z) = 0}`` in R^k, shape (k, k-1)."""
    q, _ = np.linalg.qr(np.ones((k, 1)), mode="complete")
    return q[:, 1:]


def _solve_free(A, b, lam, free):
    """Minimize ``||A_F z - b||^2 + lam ||z||^2`` with ``sum(z) = 1`` on the free set.

    Works on ``A`` directly (null-space method with an SVD least-squares
    solve) so the conditioning is not squared by forming normal equations.
    """
    k = free.size
    AF = A[:, free]
    z0 = np.full(k, 1.0 / k)
    if k == 1:
        return z0
    Z = _null_basis(k)
    M = AF @ Z
    rhs = b - AF @ z0
    if lam > 0:
        M = np.vstack([M, math.sqrt(lam) * Z])
        rhs = np.concatenate([rhs, -math.sqrt(lam) * z0])
    y = np.linalg.lstsq(M, rhs, rcond=None)[0]
    return z0 + Z @ y


def simplex_least_squares(A: np.ndarray, b: np.ndarray, lam: float = 0.0, tol: float = KKT_TOL,
                          max_iter: int = MAX_ITER):
    """Active-set solve of ``min ||A p - b||^2 + lam ||p||^2`` over the probability simplex.

    Returns ``(p, iterations, history)`` where ``history`` holds the objective
    after every step (non-increasing).
    """
    n = A.shape[1]

    def objective(p):
        r = A @ p - b
        return float(r @ r + lam * p @ p)

    def gradient(p):
        return A.T @ (A @ p - b) + lam * p

    p = np.full(n, 1.0 / n)
    free = np.ones(n, dtype=bool)
    history = [objective(p)]
    scale = max(float(np.abs(A).max()) ** 2, 1.0)
    for it in range(1, max_iter + 1):
        idx = np.nonzero(free)[0]
        z = _solve_free(A, b, lam, idx)
        if np.all(z >= 0):
            p = np.zeros(n)
            p[idx] = z
            history.append(objective(p))
            # bound multipliers of fixed variables: grad_j - grad_free
            grad = gradient(p)
            lagr = grad - grad[free].mean()
            lagr[free] = np.inf
            j = int(np.argmin(lagr))
            if lagr[j] >= -tol * scale:
                return p, it, history
            free[j] = True
            continue
        # step towards z until the first free variable hits zero
        d = np.zeros(n)
        d[idx] = z - p[idx]
        neg = free & (d < 0)
        ratios = -p[neg] / d[neg]
        alpha = min(max(float(ratios.min()), 0.0), 1.0)
        blocking = np.nonzero(neg)[0][int(np.argmin(ratios))]
        p = p + alpha * d
        p[blocking] = 0.0
        free[blocking] = False
        hit = free & (p <= 0.0)
        p[hit] = 0.0
        free &= ~hit
        if not free.any():
            free[int(np.argmax(p))] = True
        p = np.clip(p, 0.0, None)
        p /= p.sum()
        history.append(objective(p))
    raise ConvergenceError("active-set solver hit the iteration cap", history[-1] ** 0.5)


def _project_simplex(v):
    # Euclidean projection onto the probability simplex
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1.0), 0.0)


def recover_populations(spectrum: EELSSpectrum, kernel: ScatteringKernel, lam: float = 0.0,
                        noise_level: float | None = None, tau: float = 1.0,
                        lam_grid=None) -> ReconstructionReport:
    """Ladder populations that best explain ``spectrum`` under ``kernel``.

    With ``noise_level`` (relative, multiplicative noise on each P_l) the
    regularization weight is chosen by the discrepancy principle: the largest
    weight on ``lam_grid`` whose weighted residual stays below
    ``tau * noise_level * ||W P||``. Otherwise ``lam`` is used as given.
    """
    if lam < 0:
        raise ValueError("regularization weight must be >= 0")
    D = build_kernel_matrix(kernel)
    N = kernel.N
    if spectrum.max_loss != N:
        if spectrum.max_loss < N:
            spectrum = spectrum.padded(N)
        else:
            raise ValueError(f"spectrum covers |l| <= {spectrum.max_loss}, kernel only N = {N}")
    P = spectrum.probabilities
    w = row_weights(D)
    A = D * w[:, None]
    b = P * w
    sv = np.linalg.svd(A, compute_uv=False)
    kappa = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    flags = []
    if kappa > KAPPA_WARN:
        flags.append("ill_conditioned")
    if noise_level is not None:
        target = tau * noise_level * float(np.linalg.norm(b))
        grid = np.logspace(-12, 0, 25) if lam_grid is None else np.asarray(lam_grid, float)
        lam = 0.0
        for cand in np.sort(grid):
            pc, _, _ = simplex_least_squares(A, b, cand)
            if np.linalg.norm(A @ pc - b) <= target:
                lam = float(cand)
            else:
                break
    p, iters, hist = simplex_least_squares(A, b, lam)
    p = _project_simplex(p)
    if np.any(np.linalg.lstsq(A, b, rcond=None)[0] < -1e-9):
        flags.append("clipped_negatives")
    if np.linalg.matrix_rank(A) < A.shape[1]:
        flags.append("rank_deficient")
    return ReconstructionReport(
        populations=p,
        residual=float(np.linalg.norm(D @ p - P)),
        weighted_residual=float(np.linalg.norm(A @ p - b)),
        kappa=kappa,
        lam=float(lam),
        iterations=iters,
        flags=flags,
        history=hist,
    )


def unregularized_inverse(spectrum: EELSSpectrum, kernel: ScatteringKernel) -> np.ndarray:
    """Plain least-squares inverse of the row-scaled kernel (no constraints, no penalty)."""
    D = build_kernel_matrix(kernel)
    w = row_weights(D)
    return np.linalg.lstsq(D * w[:, None], spectrum.padded(kernel.N).probabilities * w, rcond=None)[0]
