"""Hamiltonians and initial states for the battery, auxiliary, environment and external qubits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import Operator

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
ID2 = np.eye(2, dtype=np.complex128)

# |e> is the sigma_z eigenvector with eigenvalue +1, so it is the higher
# energy state of h*sigma_z for h > 0.
KET_E = np.array([1.0, 0.0], dtype=np.complex128)
KET_G = np.array([0.0, 1.0], dtype=np.complex128)

SUBSYSTEMS = ("B", "A", "E", "X")


@dataclass(frozen=True)
class ModelParams:
    """Field strengths (units of h_A), couplings (units of h_A) and time (units of 1/h_A)."""

    h_b: float = 1.0
    h_a: float = 1.0
    h_e: float = 1.0
    h_x: float = 1.0
    j_ba: float = 2.0
    j_ae: float = 2.0
    j_ax: float = 2.0
    t: float = 0.15

    def __post_init__(self):
        for name in ("h_b", "h_a", "h_e", "h_x", "j_ba", "j_ae", "j_ax", "t"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")


@dataclass(frozen=True)
class GhzSpec:
    """n-party GHZ-class state parameters: mixing weight l in [-1, 1] over |e..e> and |g..g>."""

    n: int
    l: float

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"party count must be an integer >= 2, got {self.n}")
        if not -1.0 <= self.l <= 1.0:
            raise ValueError(f"mixing parameter l must lie in [-1, 1], got {self.l}")


def local_hamiltonian(h: float, label: str = "B") -> Operator:
    """h * sigma_z on one qubit."""
    return Operator(h * SIGMA_Z, (label,))


def coupling_hamiltonian(h1: float, h2: float, j: float, labels: tuple[str, str] = ("B", "A")) -> Operator:
    """Two-qubit Hamiltonian h1 (sz x I) + h2 (I x sz) + j (sx x sx)."""
    m = h1 * np.kron(SIGMA_Z, ID2) + h2 * np.kron(ID2, SIGMA_Z) + j * np.kron(SIGMA_X, SIGMA_X)
    return Operator(m, tuple(labels))


def ghz_state(spec: GhzSpec, labels: tuple[str, ...] | None = None) -> Operator:
    """Density matrix of sqrt((1+l)/2)|e..e> + sqrt((1-l)/2)|g..g>."""
    if labels is None:
        if spec.n > len(SUBSYSTEMS):
            raise ValueError(f"no default labels for n={spec.n}; pass labels explicitly")
        labels = SUBSYSTEMS[: spec.n]
    if len(labels) != spec.n:
        raise ValueError(f"need {spec.n} labels, got {labels}")
    dim = 2**spec.n
    vec = np.zeros(dim, dtype=np.complex128)
    vec[0] = math.sqrt((1.0 + spec.l) / 2.0)
    vec[-1] = math.sqrt((1.0 - spec.l) / 2.0)
    return Operator(np.outer(vec, vec.conj()), labels)


def pure_state(kets: list[np.ndarray], labels: tuple[str, ...]) -> Operator:
    """Projector onto a product of single-qubit kets."""
    vec = kets[0]
    for k in kets[1:]:
        vec = np.kron(vec, k)
    return Operator(np.outer(vec, vec.conj()), labels)


def default_initial_state(kind: str, ghz: GhzSpec | None = None) -> Operator:
    """Initial state over B, A, E (plus X when the 4-party GHZ is requested).

    ``product-excited`` prepares battery and auxiliary excited with the
    environment in the ground state; ``ghz`` prepares a 3- or 4-party
    GHZ-class state over the leading subsystems.
    """
    if kind == "product-excited":
        return pure_state([KET_E, KET_E, KET_G], ("B", "A", "E"))
    if kind == "ghz":
        if ghz is None:
            raise ValueError("ghz initial state requires a GhzSpec")
        if ghz.n not in (3, 4):
            raise ValueError(f"shipped scenarios use 3- or 4-party GHZ states, got n={ghz.n}")
        return ghz_state(ghz)
    raise ValueError(f"unknown initial state kind {kind!r}")
