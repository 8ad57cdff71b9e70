"""Dense statevector engine: the ground-truth oracle for every circuit
identity in the package.

Basis ordering: amplitude index i has qubit 0 as its most significant bit,
so for system bits x_1..x_n (left to right) the index encodes the dyadic
fraction x = 0.x_1...x_n = i / 2^n.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .circuit import Circuit, SYSTEM

SIMULATION_QUBIT_CAP = 26
_NORM_TOL = 1e-12


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        return cls.basis(n_qubits, 0)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        if n_qubits > SIMULATION_QUBIT_CAP:
            raise ValueError(
                f"{n_qubits} qubits exceeds the dense-simulation cap "
                f"({SIMULATION_QUBIT_CAP}); only metrics are available")
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def from_amplitudes(cls, amps) -> "StateVector":
        amps = np.asarray(amps, dtype=np.complex128).ravel()
        n = int(amps.size).bit_length() - 1
        if 1 << n != amps.size:
            raise ValueError("amplitude count must be a power of two")
        return cls(n, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def to_json_pairs(self) -> list[list[float]]:
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]


def apply(state: StateVector, c: Circuit) -> StateVector:
    """Exact matrix action of the gate sequence; preserves the input state."""
    if c.width != state.n_qubits:
        raise ValueError(f"circuit width {c.width} != state width {state.n_qubits}")
    amps = state.amplitudes.copy()
    for g in c.gates:
        kernels.apply_gate(amps, c.width, g)
    out = StateVector(state.n_qubits, amps)
    if abs(out.norm - state.norm) > _NORM_TOL * 10:
        raise FloatingPointError("statevector norm drifted under apply")
    return out


def postselect(state: StateVector, qubits, outcomes) -> tuple[StateVector, float]:
    """Project onto the given qubit outcomes and renormalize.

    Returns (projected state, projection probability). Zero probability is
    an error.
    """
    qubits = list(qubits)
    outcomes = list(outcomes)
    if len(set(qubits)) != len(qubits):
        raise ValueError("postselect qubits must be distinct")
    if len(qubits) != len(outcomes):
        raise ValueError("one outcome bit per qubit")
    w = state.n_qubits
    mask = 0
    val = 0
    for q, b in zip(qubits, outcomes):
        p = w - 1 - q
        mask |= 1 << p
        if b:
            val |= 1 << p
    idx = np.arange(state.amplitudes.size, dtype=np.uint64)
    keep = (idx & np.uint64(mask)) == np.uint64(val)
    prob = float(np.sum(np.abs(state.amplitudes[keep]) ** 2))
    if prob <= 0.0:
        raise ValueError("zero-probability postselection")
    amps = np.where(keep, state.amplitudes, 0.0) / np.sqrt(prob)
    return StateVector(w, amps), prob


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.n_qubits != b.n_qubits:
        raise ValueError("states have different widths")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def two_norm_distance(a: StateVector, b: StateVector) -> float:
    """min over global phase of ||a - e^{i phi} b||_2."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("states have different widths")
    overlap = abs(np.vdot(a.amplitudes, b.amplitudes))
    na, nb = a.norm, b.norm
    return float(np.sqrt(max(na * na + nb * nb - 2.0 * overlap, 0.0)))


# ---------------------------------------------------------------------------
# Projected unitary encodings

@dataclass
class SPUEDescriptor:
    """A circuit plus the projectors and normalization that make it a
    (symmetric) projected unitary encoding of an operator on the system
    register."""
    circuit: Circuit
    left_projector: tuple[tuple[int, int], ...]
    right_projector: tuple[tuple[int, int], ...]
    normalization: float = 1.0
    symmetric: bool = False
    controlled_builder: object = field(default=None, repr=False)

    def __post_init__(self):
        self.left_projector = tuple((int(q), int(b)) for q, b in self.left_projector)
        self.right_projector = tuple((int(q), int(b)) for q, b in self.right_projector)
        w = self.circuit.width
        for q, b in self.left_projector + self.right_projector:
            if q < 0 or q >= w:
                raise ValueError("projector qubit outside circuit width")
            if b not in (0, 1):
                raise ValueError("projector bits must be 0 or 1")
        if self.normalization <= 0:
            raise ValueError("normalization must be positive")

    @property
    def system_qubits(self) -> tuple[int, ...]:
        sys = self.circuit.layout[SYSTEM]
        if not sys:
            raise ValueError("descriptor circuit lacks a system register")
        return sys


def extract_block(d: SPUEDescriptor) -> np.ndarray:
    """Encoded operator on the system register, times the normalization.

    Column by column: prepare |x> on the system with the right-projector
    qubits set and every other non-system qubit |0>, apply the circuit, and
    read the amplitudes with left-projector qubits set and the remaining
    non-system qubits at |0>.
    """
    c = d.circuit
    sys = d.system_qubits
    n = len(sys)
    w = c.width
    dim = 1 << n
    sys_pos = [w - 1 - q for q in sys]

    right_bits = 0
    for q, b in d.right_projector:
        if b:
            right_bits |= 1 << (w - 1 - q)
    left_bits = 0
    for q, b in d.left_projector:
        if b:
            left_bits |= 1 << (w - 1 - q)

    def read_indices() -> np.ndarray:
        idx = np.full(dim, left_bits, dtype=np.uint64)
        for k in range(n):
            y = np.arange(dim, dtype=np.uint64)
            bit = (y >> np.uint64(n - 1 - k)) & np.uint64(1)
            idx |= bit << np.uint64(sys_pos[k])
        return idx

    rows = read_indices()
    block = np.empty((dim, dim), dtype=np.complex128)
    for x in range(dim):
        col_index = right_bits
        for k in range(n):
            if (x >> (n - 1 - k)) & 1:
                col_index |= 1 << sys_pos[k]
        out = apply(StateVector.basis(w, col_index), c)
        block[:, x] = out.amplitudes[rows]
    return block * d.normalization


def matrix_chebyshev_oracle(a: np.ndarray, cheb_coeffs) -> np.ndarray:
    """Sum b_k T_k(A) via the matrix Chebyshev recurrence; independent
    reference for the eigenvalue-transform contracts."""
    a = np.asarray(a, dtype=np.complex128)
    coeffs = np.asarray(cheb_coeffs, dtype=np.complex128)
    eye = np.eye(a.shape[0], dtype=np.complex128)
    acc = coeffs[0] * eye if coeffs.size else 0.0 * eye
    if coeffs.size == 1:
        return acc
    t_prev, t_cur = eye, a
    acc = acc + coeffs[1] * t_cur
    for k in range(2, coeffs.size):
        t_prev, t_cur = t_cur, 2.0 * (a @ t_cur) - t_prev
        acc = acc + coeffs[k] * t_cur
    return acc


# ---------------------------------------------------------------------------
# Classical replay for reversible (X-family) circuits

def replay_basis(c: Circuit, bits: int) -> int:
    """Propagate one computational basis state through a circuit of X-family
    gates. Exact and cheap; raises on any non-classical gate."""
    return int(replay_basis_batch(c, np.array([bits], dtype=np.uint64))[0])


def replay_basis_batch(c: Circuit, states: np.ndarray) -> np.ndarray:
    """Vectorized basis replay over an array of basis indices."""
    vals = np.asarray(states, dtype=np.uint64).copy()
    w = c.width
    for g in c.gates:
        if g.base != "x":
            raise ValueError(f"gate {g.kind} is not classical-reversible")
        cmask = np.uint64(0)
        cval = np.uint64(0)
        for q, s in g.controls:
            p = np.uint64(1) << np.uint64(w - 1 - q)
            cmask |= p
            if s:
                cval |= p
        tbit = np.uint64(1) << np.uint64(w - 1 - g.targets[0])
        fire = (vals & cmask) == cval
        vals[fire] ^= tbit
    return vals
