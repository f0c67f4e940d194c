"""
Random circuit generation with exact width, depth and gate density.

Generation runs in two stages. First a fully dense circuit is laid down:
every qubit is busy in every layer, so depth and density (1.0) are exact by
construction. Then gates are removed one at a time, never touching a randomly
chosen "safe" qubit whose unbroken per-layer activity pins the depth, until
exactly ops_to_remove = depth*width - ceil(depth*width*density) operation
slots are freed (a 2-qubit gate frees two slots).

RNG is numpy's PCG64; identical spec + seed reproduces identical circuits on
any platform, and generate_with_density(density=1.0) consumes the same stream
as generate_dense, so the two agree gate for gate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import BARRIER, GATES_1Q, GATES_2Q, PARAM_COUNTS, Circuit, Instruction

ONE_QUBIT_KINDS = tuple(sorted(GATES_1Q))
TWO_QUBIT_KINDS = tuple(sorted(GATES_2Q))

_TWO_PI = 2.0 * math.pi
_SAFE_QUBIT_ATTEMPTS = 64


class DensityError(ValueError):
    """Requested density cannot be realised (quota infeasible for every safe qubit)."""


@dataclass(frozen=True)
class DensitySpec:
    width: int
    depth: int
    density: float = 1.0
    seed: int = 0
    two_qubit_fraction: float = 0.5

    def __post_init__(self):
        if self.width < 2:
            raise ValueError(f"width must be >= 2, got {self.width}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if not 0.0 <= self.two_qubit_fraction <= 1.0:
            raise ValueError(f"two_qubit_fraction must be in [0, 1], got {self.two_qubit_fraction}")
        floor = 1.0 / self.width
        if not floor <= self.density <= 1.0:
            raise ValueError(
                f"density must be in [1/width, 1] = [{floor:.6g}, 1], got {self.density}"
            )

    @property
    def max_ops(self) -> int:
        return self.depth * self.width

    @property
    def target_ops(self) -> int:
        """ceil(max_ops * density), guarded against float round-off in the product."""
        return math.ceil(round(self.max_ops * self.density, 9))


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _dense_instructions(spec: DensitySpec, rng: np.random.Generator) -> list[Instruction]:
    width = spec.width
    n1 = len(ONE_QUBIT_KINDS)
    n2 = len(TWO_QUBIT_KINDS)
    out = []
    append = out.append
    for _ in range(spec.depth):
        order = rng.permutation(width)
        pair_draw = rng.random(width)
        kind1_draw = rng.integers(0, n1, size=width)
        kind2_draw = rng.integers(0, n2, size=width)
        i = slot = 0
        while i < width:
            if i + 1 < width and pair_draw[slot] < spec.two_qubit_fraction:
                kind = TWO_QUBIT_KINDS[kind2_draw[slot]]
                append(Instruction(kind, (int(order[i]), int(order[i + 1]))))
                i += 2
            else:
                kind = ONE_QUBIT_KINDS[kind1_draw[slot]]
                n_params = PARAM_COUNTS.get(kind, 0)
                params = tuple(rng.uniform(0.0, _TWO_PI, size=n_params)) if n_params else ()
                append(Instruction(kind, (int(order[i]),), params))
                i += 1
            slot += 1
    return out


def generate_dense(spec: DensitySpec) -> Circuit:
    """Layered 100%-density circuit: exactly spec.depth layers, every slot busy.

    spec.density is ignored; only width, depth, seed and two_qubit_fraction
    matter here.
    """
    instrs = _dense_instructions(spec, _rng(spec.seed))
    name = f"dense-w{spec.width}-d{spec.depth}-s{spec.seed}"
    return Circuit(spec.width, instrs, name=name)


def _fraction_ladder(start: float):
    """The requested two-qubit fraction, then halvings, then 0 (all-1q, which
    is always feasible: only the safe qubit's own column must survive)."""
    yield start
    f = start
    while f > 1e-3:
        f /= 2
        yield f
    yield 0.0


def _pick_quota(spec: DensitySpec, instrs, rng, ops_to_remove):
    """Safe qubit + removal quota, or None if no safe qubit works for this base."""
    width = spec.width
    c1 = [0] * width
    c2 = [0] * width
    t1 = t2 = 0
    for ins in instrs:
        qs = ins.qubits
        if len(qs) == 1:
            t1 += 1
            c1[qs[0]] += 1
        else:
            t2 += 1
            c2[qs[0]] += 1
            c2[qs[1]] += 1
    for _ in range(_SAFE_QUBIT_ATTEMPTS):
        safe = int(rng.integers(width))
        r1 = t1 - c1[safe]
        r2 = t2 - c2[safe]
        # feasible quotas: n1 + 2*n2 == ops_to_remove, n1 <= r1, n2 <= r2,
        # n1 matching ops_to_remove's parity
        lo = max(0, ops_to_remove - 2 * r2)
        hi = min(r1, ops_to_remove)
        if lo % 2 != ops_to_remove % 2:
            lo += 1
        if hi % 2 != ops_to_remove % 2:
            hi -= 1
        if lo > hi:
            continue  # re-pick the safe qubit
        n1 = lo + 2 * int(rng.integers((hi - lo) // 2 + 1))
        return safe, n1, (ops_to_remove - n1) // 2, (r1, r2)
    return None


def generate_with_density(spec: DensitySpec) -> Circuit:
    """Random circuit with depth == spec.depth and density ceil(max_ops*density)/max_ops.

    If the removal quota is infeasible for every safe qubit (low densities at
    small widths leave too many slots pinned by 2-qubit gates touching the
    safe qubit), the dense base is regenerated with a halved two-qubit
    fraction until verification passes; at fraction 0 it always does. The
    whole procedure consumes one seeded RNG stream, so identical specs still
    produce identical circuits.
    """
    rng = _rng(spec.seed)
    ops_to_remove = spec.max_ops - spec.target_ops
    name = f"rand-w{spec.width}-d{spec.depth}-p{spec.density:g}-s{spec.seed}"

    instrs = quota = None
    tried = []
    for fraction in _fraction_ladder(spec.two_qubit_fraction):
        attempt = spec if fraction == spec.two_qubit_fraction else DensitySpec(
            width=spec.width,
            depth=spec.depth,
            density=spec.density,
            seed=spec.seed,
            two_qubit_fraction=fraction,
        )
        instrs = _dense_instructions(attempt, rng)
        if ops_to_remove == 0:
            return Circuit(spec.width, instrs, name=name)
        quota = _pick_quota(spec, instrs, rng, ops_to_remove)
        if quota is not None:
            break
        tried.append(fraction)
    if quota is None:
        raise DensityError(
            f"cannot remove {ops_to_remove} ops for density {spec.density} "
            f"(two-qubit fractions tried: {tried})"
        )
    safe, n1, n2, _ = quota

    pool1 = []
    pool2 = []
    for idx, ins in enumerate(instrs):
        qs = ins.qubits
        if safe in qs:
            continue
        (pool1 if len(qs) == 1 else pool2).append(idx)

    removed = bytearray(len(instrs))
    ops_removed = 0
    while n1 > 0 or n2 > 0:
        if n1 > 0 and n2 > 0:
            j = int(rng.integers(len(pool1) + len(pool2)))
            if j < len(pool1):
                pool, two = pool1, False
            else:
                pool, j, two = pool2, j - len(pool1), True
        elif n1 > 0:
            pool, j, two = pool1, int(rng.integers(len(pool1))), False
        else:
            pool, j, two = pool2, int(rng.integers(len(pool2))), True
        idx = pool[j]
        pool[j] = pool[-1]
        pool.pop()
        removed[idx] = 1
        if two:
            n2 -= 1
            ops_removed += 2
        else:
            n1 -= 1
            ops_removed += 1
    if ops_removed != ops_to_remove:
        raise AssertionError(f"removed {ops_removed} ops, wanted {ops_to_remove}")

    kept = [ins for idx, ins in enumerate(instrs) if not removed[idx]]
    return Circuit(spec.width, kept, name=name)
