"""Dense complex state vectors and the small gate set the filter circuit needs.

Conventions used everywhere in this package:
  - qubit 0 is the leftmost ket symbol, i.e. the most significant bit of the
    basis-state index; bitstrings serialize in the same order
  - sigma_z = diag(+1, -1), so |0> carries <sigma_z> = +1
  - amplitudes are dense complex128, hard cap of 20 qubits
  - global phase is never normalized away; tests compare probabilities or
    states up to global phase where they say so
"""
from __future__ import annotations

import numpy as np

MAX_QUBITS = 20

NORM_TOL = 1e-12      # norm drift allowed after any gate
UNITARY_TOL = 1e-10   # unitarity check on caller-supplied evolution blocks


class StateVector:
    """Complex amplitudes over the 2^n computational basis states."""

    __slots__ = ("amps", "num_qubits")

    def __init__(self, amps, check: bool = True):
        a = np.ascontiguousarray(amps, dtype=np.complex128).reshape(-1)
        n = int(a.size).bit_length() - 1
        if a.size != (1 << n) or a.size < 2:
            raise ValueError(f"amplitude length {a.size} is not a power of two >= 2")
        if n > MAX_QUBITS:
            raise ValueError(f"{n} qubits exceeds the hard cap of {MAX_QUBITS}")
        if check:
            if not np.all(np.isfinite(a.view(np.float64))):
                raise ValueError("non-finite amplitude")
            norm = float(np.sum(np.abs(a) ** 2))
            if abs(norm - 1.0) > 1e-9:
                raise ValueError(f"state norm^2 = {norm!r}, expected 1")
        self.amps = a
        self.num_qubits = n

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def __repr__(self):  # pragma: no cover
        return f"StateVector(num_qubits={self.num_qubits})"


def basis_state(num_qubits: int, index: int = 0) -> StateVector:
    """|index> on num_qubits qubits (index read with qubit 0 as MSB)."""
    if not 0 <= index < (1 << num_qubits):
        raise ValueError("basis index out of range")
    a = np.zeros(1 << num_qubits, dtype=np.complex128)
    a[index] = 1.0
    return StateVector(a, check=False)


def states_equal(a: StateVector, b: StateVector, tol: float = 1e-12,
                 up_to_global_phase: bool = False) -> bool:
    """Componentwise equality, optionally modulo one overall phase."""
    if a.num_qubits != b.num_qubits:
        return False
    va, vb = a.amps, b.amps
    if up_to_global_phase:
        k = int(np.argmax(np.abs(va)))
        if abs(vb[k]) < tol:
            return False
        vb = vb * (va[k] / vb[k] / abs(va[k] / vb[k]))
    return bool(np.max(np.abs(va - vb)) <= tol)


# --- gate matrices -----------------------------------------------------------

X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)


def u3(theta: float, phi: float, delta: float) -> np.ndarray:
    """General one-qubit rotation; u3(theta, phi, 0)|0> = cos(t/2)|0> + e^{i phi} sin(t/2)|1>."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array(
        [[c, -np.exp(1j * delta) * s],
         [np.exp(1j * phi) * s, np.exp(1j * (phi + delta)) * c]],
        dtype=np.complex128,
    )


def phase_gate(phi: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * phi)]], dtype=np.complex128)


def _check_unitary(U: np.ndarray, tol: float) -> None:
    d = U.shape[0]
    if U.shape != (d, d):
        raise ValueError("gate matrix is not square")
    err = np.max(np.abs(U.conj().T @ U - np.eye(d)))
    if err > tol:
        raise ValueError(f"matrix is not unitary (deviation {err:.2e})")


def _assert_norm(amps: np.ndarray) -> None:
    # every gate is unitary, so any drift here is an implementation bug
    assert abs(np.sum(np.abs(amps) ** 2) - 1.0) < NORM_TOL


# --- gate application --------------------------------------------------------

def apply_single_qubit_gate(state: StateVector, gate: np.ndarray, qubit: int) -> StateVector:
    """Apply a 2x2 unitary to one qubit; returns a new state."""
    n = state.num_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    _check_unitary(gate, UNITARY_TOL)
    t = state.amps.reshape([2] * n)
    out = np.tensordot(gate, t, axes=([1], [qubit]))      # target axis lands first
    out = np.moveaxis(out, 0, qubit).reshape(-1)
    _assert_norm(out)
    return StateVector(out, check=False)


def apply_phase(state: StateVector, qubit: int, phase: float) -> StateVector:
    """Multiply every |...1...> component of the target qubit by e^{i phase}."""
    n = state.num_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    out = state.amps.copy().reshape([2] * n)
    view = np.moveaxis(out, qubit, 0)
    view[1] *= np.exp(1j * phase)
    out = out.reshape(-1)
    _assert_norm(out)
    return StateVector(out, check=False)


def apply_controlled_unitary(state: StateVector, control: int, targets: list[int],
                             U: np.ndarray) -> StateVector:
    """Apply U on the target qubits wherever the control qubit is |1>."""
    n = state.num_qubits
    targets = list(targets)
    if control in targets:
        raise ValueError("control qubit overlaps the target set")
    for q in [control, *targets]:
        if not 0 <= q < n:
            raise ValueError(f"qubit {q} out of range for {n} qubits")
    if len(set(targets)) != len(targets):
        raise ValueError("duplicate target qubit")
    k = len(targets)
    if U.shape != (1 << k, 1 << k):
        raise ValueError(f"unitary shape {U.shape} does not match {k} target qubits")
    _check_unitary(U, UNITARY_TOL)

    full = state.amps.copy().reshape([2] * n)
    sub = np.moveaxis(full, control, 0)[1]                # view of the control=1 block
    # axis index of each target inside the block (control axis removed)
    axes = [q if q < control else q - 1 for q in targets]
    work = np.moveaxis(sub, axes, range(k))
    shape = work.shape
    work = (U @ work.reshape(1 << k, -1)).reshape(shape)
    sub[...] = np.moveaxis(work, range(k), axes)
    out = full.reshape(-1)
    _assert_norm(out)
    return StateVector(out, check=False)


# --- measurement utilities ---------------------------------------------------

def _bit_values(num_qubits: int, qubit: int) -> np.ndarray:
    """Bit of each basis index at the given qubit position (qubit 0 = MSB)."""
    idx = np.arange(1 << num_qubits)
    return (idx >> (num_qubits - 1 - qubit)) & 1


def expect_pauli_z(state: StateVector, qubit: int) -> float:
    """<sigma_z> of one qubit: P(bit=0) - P(bit=1)."""
    n = state.num_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    p = state.probabilities()
    signs = 1.0 - 2.0 * _bit_values(n, qubit)
    return float(np.dot(p, signs))


def sample_indices(state: StateVector, rng, shots: int) -> np.ndarray:
    """Draw basis-state indices with probability |amplitude|^2."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    cdf = np.cumsum(state.probabilities())
    cdf[-1] = 1.0   # guard against rounding at the top end
    u = rng.uniforms(shots)
    return np.searchsorted(cdf, u, side="left")


def sample_bitstring(state: StateVector, rng) -> str:
    """One measurement of all qubits in the computational basis."""
    idx = int(sample_indices(state, rng, 1)[0])
    return format(idx, f"0{state.num_qubits}b")


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product; qubits of `a` become the most significant block."""
    if a.num_qubits + b.num_qubits > MAX_QUBITS:
        raise ValueError(f"tensor product exceeds the hard cap of {MAX_QUBITS} qubits")
    return StateVector(np.kron(a.amps, b.amps), check=False)
