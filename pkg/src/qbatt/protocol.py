"""The extraction pipeline: prepare, evolve, build Z and measurement operators,
and compute stochastically extracted energy for the three measurement families.

A run prepares the battery (B) + auxiliary (A) + environment (E) register
(plus an external X), entangles B with A for time t, lets the noise dilation
act on (A, E), and then projectively measures one of three subsystem groups:

* ``povm``    measures (A, X) with X uncorrelated -> an effective POVM on A;
* ``npovm1``  measures (A, E), which is generally entangled with B;
* ``npovm2``  measures (A, E, X) on a four-party initial state.

The figure of merit for an outcome is s = p * delta_e, the outcome
probability times the conditional drop of the battery's mean energy below
its initial value e0 = tr[rho_B^0 H_B].  For every family the maximum of s
over all measurement directions is the top eigenvalue of a small Hermitian
operator built here (``b_operator``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hilbert import (
    Operator,
    apply_unitary,
    eig_hermitian,
    identity,
    kron,
    partial_trace,
    unitary_from_hamiltonian,
)
from .model import GhzSpec, ModelParams, default_initial_state, local_hamiltonian, coupling_hamiltonian
from .noise import NoiseSpec, dilation_unitary

MEASUREMENTS = ("povm", "npovm1", "npovm2", "accessible-povm", "accessible-npovm1")

# Subsystems measured by each family; the battery is never measured directly.
MEASURED_LABELS = {
    "povm": ("A", "X"),
    "npovm1": ("A", "E"),
    "npovm2": ("A", "E", "X"),
    "accessible-povm": ("A", "X"),
    "accessible-npovm1": ("A", "E"),
}

DEGENERACY_TOL = 1e-12
ZERO_PROBABILITY = 1e-14
SPECTRA_TOL = 1e-9


@dataclass(frozen=True)
class Scenario:
    """Everything needed to reproduce one extraction experiment."""

    initial: str = "product-excited"
    params: ModelParams = field(default_factory=ModelParams)
    noise: NoiseSpec = field(default_factory=lambda: NoiseSpec("amplitude-damping", 0.0))
    measurement: str = "povm"
    ghz: GhzSpec | None = None

    def __post_init__(self):
        if self.measurement not in MEASUREMENTS:
            raise ValueError(f"unknown measurement family {self.measurement!r}")
        if self.initial not in ("product-excited", "ghz"):
            raise ValueError(f"unknown initial state kind {self.initial!r}")
        if self.initial == "ghz" and self.ghz is None:
            raise ValueError("ghz initial state requires a GhzSpec")
        family = base_family(self.measurement)
        if family == "npovm2":
            if self.initial != "ghz" or self.ghz.n != 4:
                raise ValueError("npovm2 requires the 4-party GHZ initial state")
        elif self.initial == "ghz" and self.ghz.n != 3:
            raise ValueError(f"{family} with a GHZ start uses the 3-party state")
        if self.measurement.startswith("accessible") and self.initial != "product-excited":
            raise ValueError("accessible scenarios are defined for the product-excited start")


@dataclass(frozen=True)
class Outcome:
    """One measurement outcome: probability, conditional energy drop, and s = p * delta_e."""

    p: float
    delta_e: float | None
    s: float


@dataclass(frozen=True)
class ExtractionResult:
    s_max: float
    projector: np.ndarray
    outcome: Outcome


@dataclass(frozen=True)
class SpectraReport:
    spectrum_left: tuple[float, ...]
    spectrum_right: tuple[float, ...]
    max_gap: float
    compatible: bool


def base_family(measurement: str) -> str:
    return measurement.removeprefix("accessible-")


def battery_hamiltonian(params: ModelParams) -> Operator:
    return local_hamiltonian(params.h_b, "B")


def initial_state(scenario: Scenario) -> Operator:
    return default_initial_state(scenario.initial, scenario.ghz)


def initial_battery_energy(scenario: Scenario) -> float:
    """e0 = tr[rho_B^0 H_B], the battery energy before any evolution."""
    rho0 = initial_state(scenario)
    rho_b = partial_trace(rho0, {"B"})
    h_b = battery_hamiltonian(scenario.params)
    return float(np.real(np.trace(rho_b.matrix @ h_b.matrix)))


def interaction_unitary(params: ModelParams) -> Operator:
    h_ba = coupling_hamiltonian(params.h_b, params.h_a, params.j_ba, ("B", "A"))
    return unitary_from_hamiltonian(h_ba, params.t)


def external_state(scenario: Scenario, rho_bae2: Operator) -> Operator:
    """The X register appended for the POVM branch.

    For the product-excited start X copies the evolved environment marginal;
    for the GHZ start it is the prescribed single-party GHZ marginal
    diag((1+l)/2, (1-l)/2).
    """
    if scenario.initial == "product-excited":
        return partial_trace(rho_bae2, {"E"}).relabel(("X",))
    l = scenario.ghz.l
    return Operator(np.diag([(1.0 + l) / 2.0, (1.0 - l) / 2.0]), ("X",))


def evolve(scenario: Scenario) -> Operator:
    """The pre-measurement state rho_S^2.

    U_BA acts on (B, A), then the noise dilation acts on (A, E); all other
    subsystems are spectators.  POVM scenarios append the X register after
    the evolution; npovm2 evolves the four-party state with X untouched.
    """
    rho = initial_state(scenario)
    rho = apply_unitary(rho, interaction_unitary(scenario.params))
    rho = apply_unitary(rho, dilation_unitary(scenario.noise))
    if base_family(scenario.measurement) == "povm":
        rho = kron([rho, external_state(scenario, rho)])
    return rho


def z_operator(rho_b: Operator, h_b: Operator, ancilla_dims: list[int], ancilla_labels: tuple[str, ...] | None = None) -> Operator:
    """e0 * I - H_B x I_ancilla with e0 = tr[rho_b H_B]."""
    if ancilla_labels is None:
        ancilla_labels = tuple(f"Z{i}" for i in range(len(ancilla_dims)))
    e0 = float(np.real(np.trace(rho_b.matrix @ h_b.matrix)))
    anc = identity(ancilla_labels, ancilla_dims)
    labels = h_b.labels + anc.labels
    dims = h_b.dims + anc.dims
    full = e0 * np.eye(h_b.d * anc.d) - np.kron(h_b.matrix, anc.matrix)
    return Operator(full, labels, dims)


def b_operator(rho_s2: Operator, h_b: Operator, family: str, rho_b_initial: Operator) -> Operator:
    """The Hermitian operator on the measured subsystems whose top eigenvalue is s_max.

    povm:   tr_B[ tr_E(rho_S^2) Z ]   on (A, X)
    npovm1: tr_B[ rho_BAE^2 Z' ]      on (A, E)
    npovm2: tr_B[ rho_S^2 Z'' ]       on (A, E, X)

    ``rho_b_initial`` fixes the energy reference e0 = tr[rho_B^0 H_B].
    """
    family = base_family(family)
    if family not in ("povm", "npovm1", "npovm2"):
        raise ValueError(f"unknown measurement family {family!r}")
    rho = rho_s2
    if family == "povm":
        if "E" not in rho.labels:
            raise ValueError("povm input must contain the environment to trace out")
        rho = partial_trace(rho, set(rho.labels) - {"E"})
    measured = MEASURED_LABELS[family]
    if rho.labels != ("B",) + measured:
        raise ValueError(f"{family} expects subsystems {('B',) + measured}, got {rho.labels}")
    z = z_operator(rho_b_initial, h_b, list(rho.dims[1:]), measured)
    product = Operator(rho.matrix @ z.matrix, rho.labels, rho.dims)
    b = partial_trace(product, set(measured)).matrix
    return Operator((b + b.conj().T) / 2.0, measured, rho.dims[1:])


def measured_state(scenario: Scenario, rho_s2: Operator) -> Operator:
    """The state over B plus the measured subsystems (E traced out for povm)."""
    if base_family(scenario.measurement) == "povm":
        return partial_trace(rho_s2, set(rho_s2.labels) - {"E"})
    return rho_s2


def stochastic_energy(rho: Operator, projector: np.ndarray, h_b: Operator, e0: float) -> Outcome:
    """Evaluate one measurement direction on ``rho`` (over B + measured subsystems).

    p is the outcome probability, delta_e the conditional battery energy drop
    below e0 (undefined when p vanishes), and s = p * delta_e, which equals
    tr[Z rho^3] for the post-selected unnormalized state rho^3.
    """
    psi = np.asarray(projector, dtype=np.complex128).ravel()
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"projector must be normalized, got norm {norm}")
    psi = psi / norm
    dim_b = rho.dims[0]
    dim_m = rho.d // dim_b
    if psi.size != dim_m:
        raise ValueError(f"projector dimension {psi.size} does not match measured subsystems {dim_m}")
    proj = np.kron(np.eye(dim_b), np.outer(psi, psi.conj()))
    rho3 = proj @ rho.matrix @ proj
    p = float(np.real(np.trace(rho3)))
    p = min(max(p, 0.0), 1.0)
    if p <= ZERO_PROBABILITY:
        return Outcome(p=p, delta_e=None, s=0.0)
    rho3_op = Operator(rho3, rho.labels, rho.dims)
    rho_b3 = partial_trace(rho3_op, {"B"})
    final_energy = float(np.real(np.trace(rho_b3.matrix @ h_b.matrix))) / p
    delta_e = e0 - final_energy
    return Outcome(p=p, delta_e=delta_e, s=p * delta_e)


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    idx = np.flatnonzero(np.abs(v) > DEGENERACY_TOL)
    if idx.size == 0:
        return v
    lead = v[idx[0]]
    return v * (lead.conjugate() / abs(lead))


def _selection_key(v: np.ndarray):
    idx = np.flatnonzero(np.abs(v) > DEGENERACY_TOL)
    lead = abs(v[idx[0]]) if idx.size else 0.0
    return (lead,) + tuple(x for c in v for x in (c.real, c.imag))


def top_eigenvector(b_op: Operator) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and a deterministically chosen top eigenvector.

    Within a degenerate top eigenspace the vector with the largest absolute
    leading component wins, with lexicographic comparison as the tie-break.
    """
    vals, vecs = eig_hermitian(b_op)
    lam = float(vals[-1])
    candidates = [
        _canonical_phase(vecs[:, i]) for i in range(len(vals)) if vals[i] >= lam - DEGENERACY_TOL
    ]
    best = max(candidates, key=_selection_key)
    return lam, best


def max_extractable(b_op: Operator, rho: Operator, h_b: Operator, e0: float) -> ExtractionResult:
    """Maximum stochastically extractable energy and the projector achieving it."""
    s_max, projector = top_eigenvector(b_op)
    outcome = stochastic_energy(rho, projector, h_b, e0)
    return ExtractionResult(s_max=s_max, projector=projector, outcome=outcome)


def run_scenario(scenario: Scenario) -> ExtractionResult:
    """Full pipeline for the unrestricted families (povm, npovm1, npovm2)."""
    if scenario.measurement.startswith("accessible"):
        raise ValueError("accessible scenarios are driven by the optimizer module")
    rho_s2 = evolve(scenario)
    h_b = battery_hamiltonian(scenario.params)
    rho_b0 = partial_trace(initial_state(scenario), {"B"})
    b = b_operator(rho_s2, h_b, scenario.measurement, rho_b0)
    rho_meas = measured_state(scenario, rho_s2)
    e0 = initial_battery_energy(scenario)
    return max_extractable(b, rho_meas, h_b, e0)


def spectra_compare(rho_ae: Operator, rho_ax: Operator) -> SpectraReport:
    """Compare the sorted spectra of two 4x4 states.

    ``compatible`` means a unitary on the measured pair could map one state
    to the other, i.e. the spectra agree within 1e-9.
    """
    left = np.sort(np.linalg.eigvalsh((rho_ae.matrix + rho_ae.matrix.conj().T) / 2))
    right = np.sort(np.linalg.eigvalsh((rho_ax.matrix + rho_ax.matrix.conj().T) / 2))
    gap = float(np.max(np.abs(left - right)))
    return SpectraReport(
        spectrum_left=tuple(float(x) for x in left),
        spectrum_right=tuple(float(x) for x in right),
        max_gap=gap,
        compatible=bool(gap <= SPECTRA_TOL),
    )
