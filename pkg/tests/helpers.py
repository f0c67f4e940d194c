"""Shared independent oracles for the test suite.

Everything here deliberately re-derives results through a different route
than the library: dense matrices instead of tensor contractions, BFS instead
of A*, per-qubit time counters instead of the metrics scan. A library bug
and an oracle bug would have to coincide for a test to pass wrongly.
"""
from __future__ import annotations

import math
from collections import deque

import numpy as np

# textbook gate matrices, written out independently of parqc.verifier
_S2 = 1.0 / math.sqrt(2.0)
ORACLE_1Q = {
    "h": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "s": np.diag([1, 1j]).astype(complex),
    "t": np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex),
}
ORACLE_2Q = {
    "cx": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "swap": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}


def oracle_1q_matrix(kind: str, params) -> np.ndarray:
    if kind in ORACLE_1Q:
        return ORACLE_1Q[kind]
    if kind == "rx":
        (a,) = params
        return np.array(
            [
                [math.cos(a / 2), -1j * math.sin(a / 2)],
                [-1j * math.sin(a / 2), math.cos(a / 2)],
            ],
            dtype=complex,
        )
    if kind == "ry":
        (a,) = params
        return np.array(
            [
                [math.cos(a / 2), -math.sin(a / 2)],
                [math.sin(a / 2), math.cos(a / 2)],
            ],
            dtype=complex,
        )
    if kind == "rz":
        (a,) = params
        return np.diag([np.exp(-1j * a / 2), np.exp(1j * a / 2)]).astype(complex)
    if kind == "u":
        th, ph, la = params
        return np.array(
            [
                [math.cos(th / 2), -np.exp(1j * la) * math.sin(th / 2)],
                [
                    np.exp(1j * ph) * math.sin(th / 2),
                    np.exp(1j * (ph + la)) * math.cos(th / 2),
                ],
            ],
            dtype=complex,
        )
    raise ValueError(kind)


def _embed_1q(mat: np.ndarray, q: int, n: int) -> np.ndarray:
    # qubit 0 is the most significant bit, so it sits on the outer kron factor
    return np.kron(np.kron(np.eye(2**q), mat), np.eye(2 ** (n - q - 1)))


def _embed_2q(mat4: np.ndarray, a: int, b: int, n: int) -> np.ndarray:
    dim = 2**n
    full = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n - 1 - k)) & 1 for k in range(n)]
        src = (bits[a] << 1) | bits[b]
        for dst in range(4):
            amp = mat4[dst, src]
            if amp != 0:
                nb = list(bits)
                nb[a] = (dst >> 1) & 1
                nb[b] = dst & 1
                row = 0
                for bit in nb:
                    row = (row << 1) | bit
                full[row, col] += amp
    return full


def dense_unitary(circuit) -> np.ndarray:
    """Full 2^n unitary assembled gate by gate with dense matrix products."""
    n = circuit.width
    U = np.eye(2**n, dtype=complex)
    for ins in circuit.instructions:
        if ins.is_barrier:
            continue
        if len(ins.qubits) == 1:
            full = _embed_1q(oracle_1q_matrix(ins.kind, ins.params), ins.qubits[0], n)
        else:
            full = _embed_2q(ORACLE_2Q[ins.kind], ins.qubits[0], ins.qubits[1], n)
        U = full @ U
    return U


def dense_statevector(circuit) -> np.ndarray:
    psi = np.zeros(2**circuit.width, dtype=complex)
    psi[0] = 1.0
    return dense_unitary(circuit) @ psi


def bfs_hops(neighbors, src: int, dst: int) -> int:
    """Plain BFS hop count, the shortest-path oracle."""
    if src == dst:
        return 0
    seen = {src}
    queue = deque([(src, 0)])
    while queue:
        node, d = queue.popleft()
        for nb in neighbors[node]:
            if nb == dst:
                return d + 1
            if nb not in seen:
                seen.add(nb)
                queue.append((nb, d + 1))
    raise ValueError(f"no path {src}->{dst}")


def frontier_replay(circuit):
    """Independent metrics: replay instructions onto per-qubit time counters."""
    clock = {}
    ones = twos = 0
    for ins in circuit.instructions:
        if ins.is_barrier:
            continue
        start = max((clock.get(q, 0) for q in ins.qubits), default=0)
        for q in ins.qubits:
            clock[q] = start + 1
        if len(ins.qubits) == 1:
            ones += 1
        else:
            twos += 1
    depth = max(clock.values(), default=0)
    return depth, ones, twos


def min_swaps_to_identity(layout, edges) -> int:
    """Brute-force BFS over layouts: fewest coupling-edge swaps to identity."""
    start = tuple(layout)
    goal = tuple(range(len(start)))
    if start == goal:
        return 0
    seen = {start}
    queue = deque([(start, 0)])
    while queue:
        state, d = queue.popleft()
        for a, b in edges:
            nxt = list(state)
            nxt[a], nxt[b] = nxt[b], nxt[a]
            nxt = tuple(nxt)
            if nxt == goal:
                return d + 1
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, d + 1))
    raise ValueError("unreachable identity")
