"""Combine several circuits into one wide circuit by index offsetting.

Each selected job gets a contiguous qubit window and a contiguous
classical-bit window inside the combined circuit; the placement table
records both so the combined result can later be split back per job.
Selection is first-fit in strict FIFO order: walk the queue once and take
every job whose width still fits.
"""
from __future__ import annotations

import uuid
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .errors import EmptyBatchError
from .ir import Circuit, GateKind, Instruction

if TYPE_CHECKING:
    from .scheduler import QuantumJob


@dataclass(frozen=True)
class Placement:
    """The windows one job occupies inside a combined circuit."""

    job_id: str
    qubit_offset: int
    qubit_count: int
    clbit_offset: int
    clbit_count: int


@dataclass(frozen=True)
class ComposedCircuit:
    """A combined circuit plus the placement table needed to undo it."""

    circuit: Circuit
    placements: tuple[Placement, ...]
    batch_id: str

    def __post_init__(self):
        object.__setattr__(self, "placements", tuple(self.placements))

    @property
    def job_ids(self) -> tuple[str, ...]:
        return tuple(p.job_id for p in self.placements)


def ensure_measurements(circuit: Circuit) -> Circuit:
    """Append a measure-all if the circuit has no measurement; idempotent.

    Every job must produce classical bits, otherwise its window in the
    combined result would be empty.
    """
    if circuit.has_measurements():
        return circuit
    num_clbits = max(circuit.num_clbits, circuit.num_qubits)
    measures = tuple(
        Instruction(GateKind.MEASURE, (q,), clbit=q) for q in range(circuit.num_qubits)
    )
    return Circuit(circuit.num_qubits, num_clbits, circuit.instructions + measures, name=circuit.name)


def offset_circuit(circuit: Circuit, qubit_offset: int, clbit_offset: int) -> tuple[Instruction, ...]:
    """The circuit's instructions with qubit/clbit indices shifted."""
    shifted = []
    for ins in circuit.instructions:
        shifted.append(
            Instruction(
                ins.kind,
                tuple(q + qubit_offset for q in ins.qubits),
                ins.params,
                None if ins.clbit is None else ins.clbit + clbit_offset,
            )
        )
    return tuple(shifted)


def compose(
    jobs: Sequence["QuantumJob"], capacity: int
) -> tuple[ComposedCircuit, list[str], list[str]]:
    """First-fit pack of the job queue into one combined circuit.

    Returns the combined circuit, the selected job ids (in queue order) and
    the skipped job ids (still in queue order). Raises EmptyBatchError when
    nothing fits; callers treat that as "wait another cycle".
    """
    selected: list[tuple["QuantumJob", Circuit]] = []
    skipped: list[str] = []
    remaining = capacity
    for job in jobs:
        circuit = ensure_measurements(job.circuit)
        if circuit.num_qubits <= remaining:
            selected.append((job, circuit))
            remaining -= circuit.num_qubits
        else:
            skipped.append(job.job_id)
    if not selected:
        raise EmptyBatchError(f"no queued job fits in capacity {capacity}")

    batch_id = uuid.uuid4().hex
    placements: list[Placement] = []
    instructions: list[Instruction] = []
    qubit_offset = 0
    clbit_offset = 0
    for job, circuit in selected:
        placements.append(
            Placement(job.job_id, qubit_offset, circuit.num_qubits, clbit_offset, circuit.num_clbits)
        )
        instructions.extend(offset_circuit(circuit, qubit_offset, clbit_offset))
        qubit_offset += circuit.num_qubits
        clbit_offset += circuit.num_clbits
    combined = Circuit(
        qubit_offset, clbit_offset, tuple(instructions), name=f"batch-{batch_id[:8]}"
    )
    return (
        ComposedCircuit(combined, tuple(placements), batch_id),
        [p.job_id for p in placements],
        skipped,
    )


def first_fit_selection(widths: Sequence[int], capacity: int) -> tuple[list[int], int]:
    """Indices a first-fit scan would select, and the capacity left over.

    Width-only version of compose, used for dispatch decisions without
    building circuits.
    """
    chosen: list[int] = []
    remaining = capacity
    for i, w in enumerate(widths):
        if w <= remaining:
            chosen.append(i)
            remaining -= w
    return chosen, remaining
