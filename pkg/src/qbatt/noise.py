"""Two-qubit dilation unitaries realizing single-qubit noise on the auxiliary.

Each unitary acts on the auxiliary-environment pair in the ordered basis
{|e e>, |e g>, |g e>, |g g>}; the environment reference state is |g>, so the
induced channel on the auxiliary is K_i = <i|_E U |g>_E.  The columns for
environment-excited inputs are not fixed by the channel; they are completed
as the unique real rotation that reduces to the identity at k = 0 and varies
continuously in k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import Operator, partial_trace
from .model import KET_G

KINDS = ("amplitude-damping", "bit-flip", "dephasing")


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    k: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {KINDS}")
        if not 0.0 <= self.k <= 1.0:
            raise ValueError(f"noise strength k must lie in [0, 1], got {self.k}")


def dilation_unitary(spec: NoiseSpec) -> Operator:
    """4x4 unitary on (A, E) whose E-trace realizes the named channel on A."""
    c = math.sqrt(1.0 - spec.k)
    s = math.sqrt(spec.k)
    if spec.kind == "amplitude-damping":
        m = np.array(
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, c, s, 0.0],
                [0.0, -s, c, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ]
        )
    elif spec.kind == "bit-flip":
        # |e g> -> c|e g> + s|g e>,  |g g> -> c|g g> + s|e e>
        m = np.array(
            [
                [c, 0.0, 0.0, s],
                [0.0, c, -s, 0.0],
                [0.0, s, c, 0.0],
                [-s, 0.0, 0.0, c],
            ]
        )
    else:
        # dephasing: |e g> -> c|e g> + s|e e>,  |g g> -> |g g>
        m = np.array(
            [
                [c, s, 0.0, 0.0],
                [-s, c, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ]
        )
    return Operator(m, ("A", "E"))


def kraus_operators(spec: NoiseSpec) -> list[np.ndarray]:
    """Channel operators K_i = <i|_E U |g>_E contracted from the dilation.

    The environment outcome matching its reference state |g> comes first, so
    K_0 is the no-jump operator and k = 0 yields {I, 0}.
    """
    u = dilation_unitary(spec).matrix
    ops = []
    for i in (1, 0):  # E basis is (|e>, |g>); reference outcome |g> first
        k_i = np.empty((2, 2), dtype=np.complex128)
        for a_out in range(2):
            for a_in in range(2):
                k_i[a_out, a_in] = u[2 * a_out + i, 2 * a_in + 1]
        ops.append(k_i)
    return ops


def apply_channel(rho_a: Operator, spec: NoiseSpec) -> Operator:
    """tr_E[U (rho_A x |g><g|) U†]."""
    rho_a.assert_state()
    env = Operator(np.outer(KET_G, KET_G.conj()), ("E",))
    joint = Operator(np.kron(rho_a.matrix, env.matrix), (rho_a.labels[0], "E"))
    u = dilation_unitary(spec).relabel(joint.labels)
    evolved = Operator(u.matrix @ joint.matrix @ u.matrix.conj().T, joint.labels)
    return partial_trace(evolved, {rho_a.labels[0]})
