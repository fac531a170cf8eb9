"""Dense complex linear algebra over small labelled multi-qubit Hilbert spaces."""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
STATE_TOL = 1e-12
STATE_EIG_TOL = 1e-10
UNITARY_TOL = 1e-12


@dataclass(frozen=True)
class Operator:
    """Square complex matrix tagged with an ordered list of labelled subsystems.

    ``matrix`` is a read-only (d, d) complex array; ``labels`` names each
    subsystem (e.g. ``("B", "A", "E")``) and ``dims`` gives the matching
    subsystem dimensions, whose product must equal d.  Instances are
    immutable and safe to share between threads or worker processes.
    """

    matrix: np.ndarray
    labels: tuple[str, ...]
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {m.shape}")
        labels = tuple(self.labels)
        dims = tuple(self.dims) if self.dims else (2,) * len(labels)
        if len(labels) != len(dims):
            raise ValueError("labels and dims must have the same length")
        if len(set(labels)) != len(labels):
            raise ValueError(f"subsystem labels must be unique, got {labels}")
        if prod(dims) != m.shape[0]:
            raise ValueError(f"product of dims {dims} != matrix dimension {m.shape[0]}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dims", dims)

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def dagger(self) -> "Operator":
        return Operator(self.matrix.conj().T, self.labels, self.dims)

    def relabel(self, labels: Sequence[str]) -> "Operator":
        """Same matrix viewed over differently named subsystems."""
        return Operator(self.matrix, tuple(labels), self.dims)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermiticity_defect() <= tol

    def assert_state(self) -> None:
        """Raise unless this looks like a density matrix (Hermitian, unit trace, PSD)."""
        if self.hermiticity_defect() > STATE_TOL:
            raise ValueError("state is not Hermitian within 1e-12")
        if abs(self.trace() - 1.0) > STATE_TOL:
            raise ValueError(f"state trace {self.trace()} differs from 1 beyond 1e-12")
        smallest = float(np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2)[0])
        if smallest < -STATE_EIG_TOL:
            raise ValueError(f"state has negative eigenvalue {smallest}")

    def assert_unitary(self) -> None:
        defect = np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(self.d)))
        if defect > UNITARY_TOL:
            raise ValueError(f"unitarity defect {defect} exceeds 1e-12")


def identity(labels: Sequence[str], dims: Sequence[int] | None = None) -> Operator:
    dims = tuple(dims) if dims is not None else (2,) * len(labels)
    return Operator(np.eye(prod(dims)), tuple(labels), dims)


def kron(factors: Sequence[Operator]) -> Operator:
    """Tensor product; labels and dims concatenate in the given order."""
    if len(factors) == 0:
        raise ValueError("kron requires at least one factor")
    m = factors[0].matrix
    for f in factors[1:]:
        m = np.kron(m, f.matrix)
    labels = tuple(lab for f in factors for lab in f.labels)
    dims = tuple(d for f in factors for d in f.dims)
    return Operator(m, labels, dims)


def partial_trace(op: Operator, keep: Iterable[str]) -> Operator:
    """Trace out every subsystem not named in ``keep``.

    The kept subsystems retain their original relative order.  Passing the
    full label set returns the input unchanged.
    """
    keep = set(keep)
    missing = keep - set(op.labels)
    if missing:
        raise ValueError(f"keep references absent labels {sorted(missing)}")
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep == set(op.labels):
        return op

    n = len(op.labels)
    tensor = op.matrix.reshape(op.dims + op.dims)
    # einsum indices: row index i and column index i+n per subsystem; traced
    # subsystems share one index, kept ones stay free.
    subscripts = list(range(2 * n))
    out_rows, out_cols = [], []
    for i, lab in enumerate(op.labels):
        if lab in keep:
            out_rows.append(subscripts[i])
            out_cols.append(subscripts[i + n])
        else:
            subscripts[i + n] = subscripts[i]
    reduced = np.einsum(tensor, subscripts, out_rows + out_cols)
    kept_dims = tuple(d for d, lab in zip(op.dims, op.labels) if lab in keep)
    kept_labels = tuple(lab for lab in op.labels if lab in keep)
    dim = prod(kept_dims)
    return Operator(reduced.reshape(dim, dim), kept_labels, kept_dims)


def eig_hermitian(op: Operator | np.ndarray, tol: float = HERMITIAN_TOL):
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix.

    The matrix is symmetrized as (M + M†)/2 before solving; inputs whose
    hermiticity defect exceeds ``tol`` are rejected.
    """
    m = op.matrix if isinstance(op, Operator) else np.asarray(op, dtype=np.complex128)
    defect = np.max(np.abs(m - m.conj().T))
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian: defect {defect} > {tol}")
    vals, vecs = np.linalg.eigh((m + m.conj().T) / 2)
    return vals, vecs


def unitary_from_hamiltonian(h: Operator, t: float) -> Operator:
    """exp(-i H t) computed through the eigendecomposition of H (hbar = 1)."""
    vals, vecs = eig_hermitian(h)
    u = (vecs * np.exp(-1j * vals * t)) @ vecs.conj().T
    return Operator(u, h.labels, h.dims)


def expand_unitary(u: Operator, labels: Sequence[str], dims: Sequence[int] | None = None) -> Operator:
    """Embed ``u`` into a larger register by tensoring identities around it.

    ``u.labels`` must appear as a contiguous run inside ``labels``.
    """
    labels = tuple(labels)
    dims = tuple(dims) if dims is not None else (2,) * len(labels)
    k = len(u.labels)
    starts = [i for i in range(len(labels) - k + 1) if labels[i : i + k] == u.labels]
    if not starts:
        raise ValueError(f"labels {u.labels} are not a contiguous slice of {labels}")
    i = starts[0]
    factors = []
    if i > 0:
        factors.append(identity(labels[:i], dims[:i]))
    factors.append(u)
    if i + k < len(labels):
        factors.append(identity(labels[i + k :], dims[i + k :]))
    return kron(factors)


def apply_unitary(rho: Operator, u: Operator) -> Operator:
    """U rho U† with ``u`` acting on a contiguous subset of rho's subsystems."""
    full = u if u.labels == rho.labels else expand_unitary(u, rho.labels, rho.dims)
    return Operator(full.matrix @ rho.matrix @ full.matrix.conj().T, rho.labels, rho.dims)
