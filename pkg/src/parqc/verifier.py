"""
Desk-scale correctness oracles: noiseless statevector simulation,
permutation-aware fidelity, and NNA-compliance checking.

simulate() is capped at 14 qubits (a 2^14 complex vector stays well under
1 GiB); these oracles exist to validate the compiler on reduced instances,
not to be a simulator in their own right.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .router import Layout
from .topology import CouplingMap

MAX_SIM_QUBITS = 14

_SQRT2_INV = 1.0 / math.sqrt(2.0)
_FIXED_1Q = {
    "h": np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "t": np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
}


def _u_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def gate_matrix_1q(kind: str, params: tuple[float, ...]) -> np.ndarray:
    """2x2 unitary for a canonical 1-qubit gate."""
    if kind in _FIXED_1Q:
        return _FIXED_1Q[kind]
    if kind == "rx":
        (t,) = params
        return np.array(
            [[math.cos(t / 2), -1j * math.sin(t / 2)], [-1j * math.sin(t / 2), math.cos(t / 2)]],
            dtype=complex,
        )
    if kind == "ry":
        (t,) = params
        return np.array(
            [[math.cos(t / 2), -math.sin(t / 2)], [math.sin(t / 2), math.cos(t / 2)]],
            dtype=complex,
        )
    if kind == "rz":
        (t,) = params
        return np.array([[np.exp(-1j * t / 2), 0], [0, np.exp(1j * t / 2)]], dtype=complex)
    if kind == "u":
        return _u_matrix(*params)
    raise ValueError(f"no 1-qubit matrix for gate {kind!r}")


def _apply_1q(state: np.ndarray, mat: np.ndarray, q: int, n: int) -> np.ndarray:
    state = np.moveaxis(state.reshape([2] * n), q, -1)
    state = np.tensordot(state, mat, axes=([-1], [1]))
    return np.moveaxis(state, -1, q).reshape(-1)


def _apply_2q(state: np.ndarray, kind: str, q0: int, q1: int, n: int) -> np.ndarray:
    state = state.reshape([2] * n)

    def idx(v0, v1):
        sel = [slice(None)] * n
        sel[q0], sel[q1] = v0, v1
        return tuple(sel)

    if kind == "cx":
        new = state.copy()
        new[idx(1, 0)], new[idx(1, 1)] = state[idx(1, 1)], state[idx(1, 0)].copy()
        return new.reshape(-1)
    if kind == "cz":
        state = state.copy()
        state[idx(1, 1)] *= -1
        return state.reshape(-1)
    if kind == "swap":
        new = state.copy()
        new[idx(0, 1)], new[idx(1, 0)] = state[idx(1, 0)], state[idx(0, 1)].copy()
        return new.reshape(-1)
    raise ValueError(f"no 2-qubit unitary for gate {kind!r}")


def simulate(circuit: Circuit) -> np.ndarray:
    """Apply the instruction list to |0...0>; barriers are skipped.

    Amplitude index convention: qubit 0 is the most significant bit, i.e.
    amplitudes reshape to [2]*width with axis q holding qubit q.
    """
    n = circuit.width
    if n > MAX_SIM_QUBITS:
        raise ValueError(f"simulate supports at most {MAX_SIM_QUBITS} qubits, got {n}")
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    for ins in circuit.instructions:
        if ins.is_barrier:
            continue
        if len(ins.qubits) == 1:
            state = _apply_1q(state, gate_matrix_1q(ins.kind, ins.params), ins.qubits[0], n)
        else:
            state = _apply_2q(state, ins.kind, ins.qubits[0], ins.qubits[1], n)
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"statevector norm drifted to {norm}")
    return state


def fidelity_under_layout(original: Circuit, compiled: Circuit, final_layout: Layout) -> float:
    """|<psi_orig | P(final_layout) psi_compiled>|^2 with physical axes relabeled to logical.

    The compiled circuit may be wider (spare physical qubits); those logical
    slots must end in |0>, matching the original state extended with |0>s.
    """
    n_c = compiled.width
    n_o = original.width
    if len(final_layout) != n_c:
        raise ValueError(f"layout covers {len(final_layout)} qubits, compiled has {n_c}")
    if n_o > n_c:
        raise ValueError(f"original ({n_o} qubits) wider than compiled ({n_c})")
    psi_o = simulate(original)
    psi_c = simulate(compiled)
    # output axis l takes the input axis holding logical qubit l
    axes = final_layout.inverse()
    psi_p = np.transpose(psi_c.reshape([2] * n_c), axes)
    sub = psi_p[(slice(None),) * n_o + (0,) * (n_c - n_o)].reshape(-1)
    return float(abs(np.vdot(psi_o, sub)) ** 2)


@dataclass(frozen=True)
class Violation:
    """A 2-qubit gate acting on an uncoupled physical pair."""

    index: int
    kind: str
    qubits: tuple[int, int]


def check_nna(circuit: Circuit, cmap: CouplingMap) -> list[Violation]:
    """Every 2-qubit non-barrier gate on an uncoupled pair; empty iff compliant."""
    if circuit.width > cmap.n_phys:
        raise ValueError(
            f"circuit width {circuit.width} exceeds {cmap.n_phys} physical qubits"
        )
    edge_set = cmap.edge_set
    out = []
    for i, ins in enumerate(circuit.instructions):
        if ins.is_barrier or len(ins.qubits) != 2:
            continue
        a, b = ins.qubits
        if ((a, b) if a < b else (b, a)) not in edge_set:
            out.append(Violation(i, ins.kind, (a, b)))
    return out
