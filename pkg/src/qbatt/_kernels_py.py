"""Pure-numpy fallbacks for the compiled kernels in ``_kernels.pyx``.

Selected automatically when the extension is unavailable (or when
``QBATT_PURE=1``); results match the compiled versions to roundoff.
"""

from __future__ import annotations

import numpy as np


def max_quadratic_form(b: np.ndarray, draws: np.ndarray) -> tuple[float, int]:
    """Max of Re<v|b|v>/<v|v> over the rows of ``draws``; returns (value, row index)."""
    b = np.asarray(b, dtype=np.complex128)
    draws = np.asarray(draws, dtype=np.complex128)
    if draws.ndim != 2 or b.shape != (draws.shape[1], draws.shape[1]):
        raise ValueError("matrix and draw dimensions do not match")
    if draws.shape[0] == 0:
        raise ValueError("need at least one draw")
    norms = np.einsum("ij,ij->i", draws.conj(), draws).real
    vals = np.einsum("ij,jk,ik->i", draws.conj(), b, draws).real / norms
    i = int(np.argmax(vals))
    return float(vals[i]), i


def _euler(theta: float, phi: float, lam: float) -> np.ndarray:
    ct = np.cos(theta / 2.0)
    st = np.sin(theta / 2.0)
    return np.array(
        [
            [ct, -np.exp(1j * lam) * st],
            [np.exp(1j * phi) * st, np.exp(1j * (phi + lam)) * ct],
        ],
        dtype=np.complex128,
    )


def product_rotation_expectation(angles: np.ndarray, b: np.ndarray, seed: np.ndarray) -> float:
    """Re<w|b|w> for w = (U(t0,p0,l0) x U(t1,p1,l1)) seed on two qubits."""
    angles = np.asarray(angles, dtype=np.float64)
    b = np.asarray(b, dtype=np.complex128)
    seed = np.asarray(seed, dtype=np.complex128).ravel()
    if b.shape != (4, 4) or seed.shape != (4,) or angles.shape != (6,):
        raise ValueError("expected a 4x4 matrix, a 4-vector seed and 6 angles")
    u0 = _euler(angles[0], angles[1], angles[2])
    u1 = _euler(angles[3], angles[4], angles[5])
    w = (u0 @ seed.reshape(2, 2) @ u1.T).ravel()
    return float(np.real(w.conj() @ (b @ w)))
