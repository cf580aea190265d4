"""One full filter repetition: prepare, cycle each ancilla, measure scores.

A ride threads the register |y_0 ... y_{N-1}> (x) |system> through N cycles.
Each ancilla starts in |-> (X then H from |0>). Cycle k applies the
controlled evolution exp(-i H t_k) with ancilla k as control, then the phase
e^{i E t_k} on that ancilla; a final Hadamard per ancilla converts the
accumulated kickback into sigma_z statistics. When E hits an eigenvalue whose
eigenstate carries all the weight, every ancilla ends in |1> with certainty.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qcore
from .hamiltonian import SpectralDecomposition, evolution_unitary
from .qcore import StateVector


@dataclass(frozen=True)
class RidePlan:
    ancillas: int
    energy: float
    times: tuple[float, ...]
    hamiltonian: SpectralDecomposition
    initial_state: StateVector

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        if self.ancillas < 1:
            raise ValueError("need at least one ancilla")
        if len(self.times) != self.ancillas:
            raise ValueError(f"{len(self.times)} times for {self.ancillas} ancillas")
        if self.initial_state.amps.size != self.hamiltonian.dim:
            raise ValueError("initial state dimension does not match the Hamiltonian")

    @property
    def system_qubits(self) -> int:
        return self.initial_state.num_qubits


@dataclass(frozen=True)
class RideOutcome:
    final_state: StateVector
    per_ancilla_z: np.ndarray     # <sigma_z> of each ancilla, in [-1, 1]
    product_z: float              # <sigma_z tensor ... tensor sigma_z (x) 1>
    success_prob: float           # P(all ancillas read |1>)


_MINUS = qcore.apply_single_qubit_gate(
    qcore.apply_single_qubit_gate(qcore.basis_state(1), qcore.X, 0), qcore.H, 0
)


def prepare_rider(initial_state: StateVector, ancillas: int) -> StateVector:
    """|-> on each ancilla (X then H from |0>), tensored with the system state."""
    if ancillas < 1:
        raise ValueError("need at least one ancilla")
    if ancillas + initial_state.num_qubits > qcore.MAX_QUBITS:
        raise ValueError(f"register exceeds the hard cap of {qcore.MAX_QUBITS} qubits")
    state = _MINUS
    for _ in range(ancillas - 1):
        state = qcore.tensor(state, _MINUS)
    return qcore.tensor(state, initial_state)


def bull_cycle(state: StateVector, plan: RidePlan, k: int) -> StateVector:
    """Controlled exp(-i H t_k) from ancilla k, then phase e^{i E t_k} on it."""
    if not 0 <= k < plan.ancillas:
        raise ValueError(f"ancilla {k} out of range")
    n_sys = plan.system_qubits
    targets = list(range(plan.ancillas, plan.ancillas + n_sys))
    U = evolution_unitary(plan.hamiltonian, plan.times[k])
    state = qcore.apply_controlled_unitary(state, k, targets, U)
    return qcore.apply_phase(state, k, plan.energy * plan.times[k])


def ride(plan: RidePlan) -> RideOutcome:
    """Run the full circuit and read out every score."""
    n_anc = plan.ancillas
    state = prepare_rider(plan.initial_state, n_anc)
    for k in range(n_anc):
        state = bull_cycle(state, plan, k)
    for k in range(n_anc):
        state = qcore.apply_single_qubit_gate(state, qcore.H, k)

    n = state.num_qubits
    probs = state.probabilities()
    idx = np.arange(probs.size)
    anc_bits = (idx >> (n - n_anc)) & ((1 << n_anc) - 1)
    per_z = np.empty(n_anc)
    for k in range(n_anc):
        bit = (anc_bits >> (n_anc - 1 - k)) & 1
        per_z[k] = float(np.dot(probs, 1.0 - 2.0 * bit))
    parity = np.array([bin(b).count("1") & 1 for b in range(1 << n_anc)])[anc_bits]
    product = float(np.dot(probs, 1.0 - 2.0 * parity))
    success = float(np.sum(probs[anc_bits == (1 << n_anc) - 1]))
    return RideOutcome(state, per_z, product, success)


def score_mean(outcome: RideOutcome) -> float:
    """Mean per-ancilla <sigma_z>; reaches -1 exactly on-resonance."""
    return float(np.mean(outcome.per_ancilla_z))


def score_product(outcome: RideOutcome) -> float:
    """Expectation of the all-ancilla sigma_z product."""
    return outcome.product_z


def success_probability(outcome: RideOutcome) -> float:
    """Probability that every ancilla is measured in |1>."""
    return outcome.success_prob


def shot_estimate(outcome: RideOutcome, shots: int, rng) -> list[tuple[int, int]]:
    """Per-ancilla (n_up, n_down) counts from `shots` full-register samples.

    (n_up - n_down) / shots estimates per_ancilla_z without bias; up means
    the ancilla read |0> (sigma_z = +1).
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    state = outcome.final_state
    n = state.num_qubits
    n_anc = outcome.per_ancilla_z.size
    samples = qcore.sample_indices(state, rng, shots)
    counts = []
    for k in range(n_anc):
        ones = int(np.sum((samples >> (n - 1 - k)) & 1))
        counts.append((shots - ones, ones))
    return counts
