"""Restricted-measurement optimization and Haar-random sampling oracles.

The restricted family consists of projectors reachable by independent
single-qubit rotations of a fixed two-qubit seed vector; its best value is
found by a multi-start Nelder-Mead search over the six Euler angles.  The
Haar sampler provides an independent check that the closed-form maxima are
true suprema over all projectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .hilbert import Operator

ANGLE_RANGES = np.array([np.pi, 2 * np.pi, 2 * np.pi, np.pi, 2 * np.pi, 2 * np.pi])


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iter: int = 500
    tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass(frozen=True)
class AccessibleResult:
    s_acc: float
    angles: np.ndarray
    converged: bool


def single_qubit_unitary(theta: float, phi: float, lam: float) -> np.ndarray:
    """Euler-angle unitary [[cos(t/2), -e^{il} sin(t/2)], [e^{ip} sin(t/2), e^{i(p+l)} cos(t/2)]]."""
    ct = np.cos(theta / 2.0)
    st = np.sin(theta / 2.0)
    return np.array(
        [
            [ct, -np.exp(1j * lam) * st],
            [np.exp(1j * phi) * st, np.exp(1j * (phi + lam)) * ct],
        ],
        dtype=np.complex128,
    )


def product_projector(angles: np.ndarray, seed_state: np.ndarray) -> np.ndarray:
    """(U_1 x U_2)|seed> for the six-angle parameterization."""
    u = np.kron(single_qubit_unitary(*angles[:3]), single_qubit_unitary(*angles[3:]))
    return u @ np.asarray(seed_state, dtype=np.complex128).ravel()


def rotation_objective(angles: np.ndarray, b: np.ndarray, seed_state: np.ndarray) -> float:
    """The quantity being maximized: <seed|(U1 x U2)† b (U1 x U2)|seed>."""
    b = b.matrix if isinstance(b, Operator) else b
    return kernels.product_rotation_expectation(
        np.array(angles, dtype=np.float64),
        np.array(b, dtype=np.complex128, order="C"),
        np.array(np.asarray(seed_state).ravel(), dtype=np.complex128, order="C"),
    )


def _nelder_mead(f, x0: np.ndarray, max_iter: int, tol: float) -> tuple[np.ndarray, float, bool]:
    """Minimize ``f`` from ``x0``; returns (x_best, f_best, converged).

    Plain simplex method with the standard reflection/expansion/contraction
    coefficients; converged means the simplex value spread fell below tol.
    """
    n = x0.size
    simplex = np.tile(x0, (n + 1, 1))
    for i in range(n):
        simplex[i + 1, i] += 0.25
    values = np.array([f(x) for x in simplex])
    for _ in range(max_iter):
        order = np.argsort(values, kind="stable")
        simplex = simplex[order]
        values = values[order]
        if values[-1] - values[0] < tol:
            return simplex[0], values[0], True
        centroid = simplex[:-1].mean(axis=0)
        reflected = centroid + (centroid - simplex[-1])
        f_r = f(reflected)
        if f_r < values[0]:
            expanded = centroid + 2.0 * (centroid - simplex[-1])
            f_e = f(expanded)
            if f_e < f_r:
                simplex[-1], values[-1] = expanded, f_e
            else:
                simplex[-1], values[-1] = reflected, f_r
        elif f_r < values[-2]:
            simplex[-1], values[-1] = reflected, f_r
        else:
            contracted = centroid + 0.5 * (simplex[-1] - centroid)
            f_c = f(contracted)
            if f_c < values[-1]:
                simplex[-1], values[-1] = contracted, f_c
            else:
                best = simplex[0]
                for i in range(1, n + 1):
                    simplex[i] = best + 0.5 * (simplex[i] - best)
                    values[i] = f(simplex[i])
    order = np.argsort(values, kind="stable")
    return simplex[order[0]], values[order[0]], False


def accessible_energy(b_op: Operator | np.ndarray, seed_state: np.ndarray, cfg: OptimizerConfig) -> AccessibleResult:
    """Maximum of the rotation objective over the six-angle family.

    Multi-start local search; the first start is the identity rotation and
    the rest are drawn uniformly from the angle ranges using cfg.seed, so
    identical configurations reproduce identical trajectories.
    """
    b = np.array(b_op.matrix if isinstance(b_op, Operator) else b_op, dtype=np.complex128, order="C")
    seed_vec = np.array(np.asarray(seed_state).ravel(), dtype=np.complex128, order="C")
    if b.shape != (4, 4) or seed_vec.size != 4:
        raise ValueError("accessible_energy works on a 4x4 operator and 4-vector seed")
    norm = np.linalg.norm(seed_vec)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError("seed state must be normalized")

    def negative(angles):
        return -kernels.product_rotation_expectation(
            np.ascontiguousarray(angles, dtype=np.float64), b, seed_vec
        )

    rng = np.random.default_rng(cfg.seed)
    starts = rng.uniform(0.0, 1.0, size=(cfg.restarts, 6)) * ANGLE_RANGES
    starts[0] = 0.0
    best_angles, best_val, converged = None, np.inf, False
    for x0 in starts:
        x, val, ok = _nelder_mead(negative, x0, cfg.max_iter, cfg.tol)
        if val < best_val:
            best_angles, best_val = x, val
            converged = ok
        elif ok and abs(val - best_val) < 10 * cfg.tol:
            converged = True
    return AccessibleResult(s_acc=-best_val, angles=np.asarray(best_angles), converged=converged)


def haar_random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Ginibre matrix with phases fixed.

    The R factor's diagonal is rotated positive, which makes the distribution
    exactly Haar and pins U e_0 to the normalized first Ginibre column.
    """
    if not 2 <= dim <= 16:
        raise ValueError("haar_random_unitary supports dimensions 2..16")
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z / np.sqrt(2.0))
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def sampled_supremum(b_op: Operator | np.ndarray, n_samples: int, rng: np.random.Generator) -> tuple[float, np.ndarray]:
    """Max of <Psi|b|Psi> over n Haar-random directions |Psi> = U|0>.

    U|0> for a QR-phase-fixed Haar unitary is exactly the normalized first
    Ginibre column, so only d complex Gaussians are drawn per sample.  For a
    fixed generator the sample stream is prefix-stable in n.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    # copy: Operator matrices are read-only, which memoryviews reject
    b = np.array(b_op.matrix if isinstance(b_op, Operator) else b_op, dtype=np.complex128, order="C")
    d = b.shape[0]
    draws = rng.standard_normal((n_samples, 2 * d)).view(np.complex128)
    best, idx = kernels.max_quadratic_form(b, np.ascontiguousarray(draws))
    projector = draws[idx] / np.linalg.norm(draws[idx])
    return float(best), projector
