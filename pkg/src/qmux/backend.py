"""Statevector simulator backend with an optional stochastic Pauli noise model.

Conventions (documented in docs/simulator.md):

* Basis-state index bit ``i`` is qubit ``i``: amplitude ``amps[5]`` of a
  3-qubit state is the amplitude of qubit0=1, qubit1=0, qubit2=1.
* Multi-qubit gate matrices are written with the *first* operand as the most
  significant bit of the gate's local index (the usual textbook form).
* ``probabilities`` returns a dense vector over classical-bit strings where
  clbit 0 is the *leftmost* character of the string key, i.e. the most
  significant bit of the vector index. Clbits no measurement writes to are
  constant 0.
* Measurement is deferred: a clbit records the final-state marginal of its
  qubit. Gates applied after a measurement on the same qubit therefore do
  not see a collapse; circuits should measure last (the parsers only emit
  terminal measurements).
* Noisy execution inserts, after each gate and for each qubit the gate
  touches, a uniformly random Pauli (X, Y or Z) with probability
  ``depolarizing_prob`` per shot, then flips each measured bit with
  probability ``readout_flip_prob``. Shots are simulated as batched
  trajectories over the circuit's independent qubit components, so memory
  stays at ``shots * 2**(largest component)`` amplitudes.

Everything is pure given (circuit, shots, seed, noise): each call owns its
amplitudes and its ``numpy`` PCG64 generator, so independent executions may
run concurrently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .counts import CountsDistribution
from .errors import CapacityExceededError, InvalidShotsError, ValidationError
from .ir import Circuit, GateKind, Instruction

DEFAULT_MAX_QUBITS = 24

# Amplitude budget per trajectory chunk (2**21 complex128 = 32 MiB). Shots
# are processed in chunks of max(1, _CHUNK_AMPS >> k) where k is the largest
# active component, which pins the draw order for reproducibility.
_CHUNK_AMPS = 1 << 21

_SQRT1_2 = 1.0 / math.sqrt(2.0)

_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_PAULIS = (_X, _Y, _Z)

_FIXED_GATES = {
    GateKind.H: np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=np.complex128),
    GateKind.X: _X,
    GateKind.Y: _Y,
    GateKind.Z: _Z,
    GateKind.S: np.diag([1, 1j]).astype(np.complex128),
    GateKind.SDG: np.diag([1, -1j]).astype(np.complex128),
    GateKind.T: np.diag([1, np.exp(1j * math.pi / 4)]).astype(np.complex128),
    GateKind.TDG: np.diag([1, np.exp(-1j * math.pi / 4)]).astype(np.complex128),
    GateKind.CX: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
    ),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(np.complex128),
    GateKind.SWAP: np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
    ),
}
_CCX = np.eye(8, dtype=np.complex128)
_CCX[[6, 7]] = _CCX[[7, 6]]
_FIXED_GATES[GateKind.CCX] = _CCX


def gate_matrix(instruction: Instruction) -> np.ndarray:
    """The unitary for one instruction (parameterized gates built on demand)."""
    kind = instruction.kind
    if kind in _FIXED_GATES:
        return _FIXED_GATES[kind]
    (theta,) = instruction.params
    half = theta / 2.0
    c, s = math.cos(half), math.sin(half)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind is GateKind.RZ:
        return np.diag([np.exp(-1j * half), np.exp(1j * half)]).astype(np.complex128)
    raise ValidationError(f"{kind.value} has no unitary")


@dataclass(frozen=True)
class NoiseConfig:
    """Stochastic noise strengths; (0, 0) is exactly the noiseless path."""

    depolarizing_prob: float = 0.0
    readout_flip_prob: float = 0.0

    def __post_init__(self):
        for field in ("depolarizing_prob", "readout_flip_prob"):
            value = getattr(self, field)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"{field} must be in [0, 1], got {value!r}")

    @property
    def is_noiseless(self) -> bool:
        return self.depolarizing_prob == 0.0 and self.readout_flip_prob == 0.0

    def to_dict(self) -> dict:
        return {
            "depolarizing_prob": self.depolarizing_prob,
            "readout_flip_prob": self.readout_flip_prob,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseConfig":
        return cls(
            depolarizing_prob=float(data.get("depolarizing_prob", 0.0)),
            readout_flip_prob=float(data.get("readout_flip_prob", 0.0)),
        )


@dataclass(frozen=True)
class BackendDescriptor:
    name: str
    max_qubits: int
    noise: Optional[NoiseConfig]
    seedable: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_qubits": self.max_qubits,
            "noise": None if self.noise is None else self.noise.to_dict(),
            "seedable": self.seedable,
        }


@dataclass(frozen=True)
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValidationError(
                f"expected {1 << self.num_qubits} amplitudes, got {self.amplitudes.shape}"
            )

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


def _apply(tensor: np.ndarray, gate: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Apply a k-qubit gate to the given axes of a rank-n (or batched) tensor."""
    k = len(axes)
    reshaped = gate.reshape((2,) * (2 * k))
    moved = np.tensordot(reshaped, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(moved, list(range(k)), list(axes))


def _check_capacity(circuit: Circuit, max_qubits: int) -> None:
    if circuit.num_qubits > max_qubits:
        raise CapacityExceededError(
            f"circuit has {circuit.num_qubits} qubits; backend simulates at most {max_qubits}"
        )


def statevector(circuit: Circuit, *, max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """Evolve |0...0> through the circuit's unitary part.

    MEASURE and BARRIER instructions are skipped.
    """
    _check_capacity(circuit, max_qubits)
    n = circuit.num_qubits
    state = np.zeros((2,) * n, dtype=np.complex128)
    state[(0,) * n] = 1.0
    for ins in circuit.instructions:
        if not ins.kind.is_unitary:
            continue
        axes = [n - 1 - q for q in ins.qubits]
        state = _apply(state, gate_matrix(ins), axes)
    return StateVector(n, state.reshape(-1))


def probabilities(circuit: Circuit, *, max_qubits: int = DEFAULT_MAX_QUBITS) -> np.ndarray:
    """Dense outcome probabilities over the circuit's classical bits.

    Index convention: clbit 0 is the most significant bit of the index, so
    ``format(i, f"0{num_clbits}b")`` is the counts key for entry ``i``.
    Clbits without a MEASURE stay 0; qubits measured into several clbits
    yield perfectly correlated bits.
    """
    if not circuit.has_measurements():
        raise ValidationError("circuit has no measurements")
    full = np.abs(statevector(circuit, max_qubits=max_qubits).amplitudes) ** 2
    n, m = circuit.num_qubits, circuit.num_clbits
    z = np.arange(1 << n, dtype=np.int64)
    cidx = np.zeros(1 << n, dtype=np.int64)
    for clbit, qubit in circuit.measure_map().items():
        cidx |= ((z >> qubit) & 1) << (m - 1 - clbit)
    return np.bincount(cidx, weights=full, minlength=1 << m)


def probabilities_dict(
    circuit: Circuit, *, max_qubits: int = DEFAULT_MAX_QUBITS, cutoff: float = 0.0
) -> dict[str, float]:
    """``probabilities`` as a {bitstring: probability} map, dropping zeros."""
    vec = probabilities(circuit, max_qubits=max_qubits)
    m = circuit.num_clbits
    return {
        format(i, f"0{m}b"): float(p) for i, p in enumerate(vec) if p > cutoff
    }


def _independent_components(circuit: Circuit) -> list[tuple[list[int], list[Instruction]]]:
    """Partition qubits into groups never coupled by a multi-qubit gate.

    Returns (sorted qubit list, unitary instructions) per group, ordered by
    the group's smallest qubit. BARRIER never couples; MEASURE is handled
    via the measure map, not here.
    """
    parent = list(range(circuit.num_qubits))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for ins in circuit.instructions:
        if ins.kind.is_unitary and len(ins.qubits) > 1:
            root = find(ins.qubits[0])
            for q in ins.qubits[1:]:
                parent[find(q)] = root
    groups: dict[int, list[int]] = {}
    for q in range(circuit.num_qubits):
        groups.setdefault(find(q), []).append(q)
    components = sorted(groups.values(), key=lambda qs: qs[0])
    by_root = {find(qs[0]): i for i, qs in enumerate(components)}
    instructions: list[list[Instruction]] = [[] for _ in components]
    for ins in circuit.instructions:
        if ins.kind.is_unitary:
            instructions[by_root[find(ins.qubits[0])]].append(ins)
    return [(qs, instructions[i]) for i, qs in enumerate(components)]


def _execute_noiseless(circuit: Circuit, shots: int, rng, max_qubits: int) -> CountsDistribution:
    probs = probabilities(circuit, max_qubits=max_qubits)
    sampled = rng.multinomial(shots, probs / probs.sum())
    m = circuit.num_clbits
    counts = {
        format(i, f"0{m}b"): int(c) for i, c in enumerate(sampled) if c
    }
    return CountsDistribution(m, counts, shots)


def _execute_noisy(
    circuit: Circuit, shots: int, rng, noise: NoiseConfig, max_qubits: int
) -> CountsDistribution:
    """Batched per-shot trajectories with stochastic Pauli insertion.

    Draw order (fixed for reproducibility): shots are processed in chunks;
    within a chunk, active components ascending by smallest qubit; within a
    component, instructions in circuit order; after each gate, per touched
    qubit in operand order, one uniform batch (insert?) then one integer
    batch (which Pauli) — skipped entirely when depolarizing_prob is 0;
    after a component's gates, one uniform batch samples its joint outcome.
    After all chunks, one uniform batch per measured clbit (ascending)
    decides readout flips — skipped when readout_flip_prob is 0.
    """
    _check_capacity(circuit, max_qubits)
    m = circuit.num_clbits
    measure_map = circuit.measure_map()
    measured_qubits = set(measure_map.values())
    clbits_of: dict[int, list[int]] = {}
    for clbit, qubit in measure_map.items():
        clbits_of.setdefault(qubit, []).append(clbit)

    # A component matters only if something is measured out of it; one with
    # no gates leaves its qubits in |0> so the preset zeros already cover it.
    active = [
        (qs, ins)
        for qs, ins in _independent_components(circuit)
        if ins and any(q in measured_qubits for q in qs)
    ]
    p_gate = noise.depolarizing_prob
    bits = np.zeros((shots, m), dtype=np.uint8)
    kmax = max((len(qs) for qs, _ in active), default=1)
    chunk = max(1, _CHUNK_AMPS >> kmax)

    for start in range(0, shots, chunk):
        batch = min(chunk, shots - start)
        for qubits, instructions in active:
            k = len(qubits)
            local = {q: j for j, q in enumerate(qubits)}
            # Batched state: axis 0 is the shot, local qubit j lives on
            # axis 1 + (k - 1 - j), matching the single-state convention.
            states = np.zeros((batch,) + (2,) * k, dtype=np.complex128)
            states[(slice(None),) + (0,) * k] = 1.0
            for ins in instructions:
                axes = [1 + (k - 1 - local[q]) for q in ins.qubits]
                states = _apply(states, gate_matrix(ins), axes)
                if p_gate > 0.0:
                    for q in ins.qubits:
                        hit = rng.random(batch) < p_gate
                        which = rng.integers(0, 3, size=batch)
                        for t in range(3):
                            rows = np.nonzero(hit & (which == t))[0]
                            if rows.size:
                                axis = 1 + (k - 1 - local[q])
                                states[rows] = _apply(states[rows], _PAULIS[t], [axis])
            probs = np.abs(states.reshape(batch, -1)) ** 2
            probs /= probs.sum(axis=1, keepdims=True)
            cdf = np.cumsum(probs, axis=1)
            draws = rng.random(batch)
            outcome = np.minimum(
                (draws[:, None] > cdf).sum(axis=1), (1 << k) - 1
            )
            for q in qubits:
                for clbit in clbits_of.get(q, ()):
                    bits[start : start + batch, clbit] = (outcome >> local[q]) & 1

    if noise.readout_flip_prob > 0.0:
        for clbit in sorted(measure_map):
            flips = rng.random(shots) < noise.readout_flip_prob
            bits[flips, clbit] ^= 1

    weights = (1 << (m - 1 - np.arange(m, dtype=np.int64)))
    codes = bits.astype(np.int64) @ weights
    values, tallies = np.unique(codes, return_counts=True)
    counts = {
        format(int(v), f"0{m}b"): int(c) for v, c in zip(values, tallies)
    }
    return CountsDistribution(m, counts, shots)


def execute(
    circuit: Circuit,
    shots: int,
    *,
    seed=None,
    noise: Optional[NoiseConfig] = None,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> CountsDistribution:
    """Sample measurement outcomes.

    Noiseless (noise None or all-zero): one multinomial draw from the exact
    outcome distribution. Noisy: batched trajectories, see _execute_noisy.
    Identical (circuit, shots, seed, noise) give identical counts; the
    generator is numpy's default PCG64 seeded with ``seed``.
    """
    if shots < 1:
        raise InvalidShotsError(f"shots must be >= 1, got {shots}")
    if not circuit.has_measurements():
        raise ValidationError("circuit has no measurements")
    rng = np.random.default_rng(seed)
    if noise is None or noise.is_noiseless:
        return _execute_noiseless(circuit, shots, rng, max_qubits)
    return _execute_noisy(circuit, shots, rng, noise, max_qubits)


class SimulatorBackend:
    """The pluggable execution target: descriptor() plus execute().

    Adapters for other targets implement the same two methods and must
    normalize results to this module's bit conventions.
    """

    def __init__(
        self,
        max_qubits: int = DEFAULT_MAX_QUBITS,
        noise: Optional[NoiseConfig] = None,
        name: str = "statevector",
    ):
        if max_qubits < 1:
            raise ValidationError(f"max_qubits must be >= 1, got {max_qubits}")
        self.max_qubits = max_qubits
        self.noise = noise
        self.name = name

    def descriptor(self) -> BackendDescriptor:
        return BackendDescriptor(
            name=self.name,
            max_qubits=self.max_qubits,
            noise=self.noise,
            seedable=True,
        )

    def execute(
        self,
        circuit: Circuit,
        shots: int,
        *,
        seed=None,
        noise: Optional[NoiseConfig] = None,
    ) -> CountsDistribution:
        effective = noise if noise is not None else self.noise
        return execute(
            circuit, shots, seed=seed, noise=effective, max_qubits=self.max_qubits
        )

    def statevector(self, circuit: Circuit) -> StateVector:
        return statevector(circuit, max_qubits=self.max_qubits)

    def probabilities(self, circuit: Circuit) -> np.ndarray:
        return probabilities(circuit, max_qubits=self.max_qubits)

    def probabilities_dict(self, circuit: Circuit) -> dict[str, float]:
        return probabilities_dict(circuit, max_qubits=self.max_qubits)
