"""Gate-level circuit intermediate representation.

Conventions used throughout the package:

- Qubit and classical-bit indices are 0-based.
- Angles are radians, stored as Python floats.
- Measured bitstrings are written with classical bit 0 as the *leftmost*
  character, so ``key[i]`` is the value of clbit ``i``.

Circuits are immutable after construction; every constructor validates the
structural invariants, so a ``Circuit`` in hand is always well formed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import ValidationError


class GateKind(Enum):
    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CX = "cx"
    CZ = "cz"
    SWAP = "swap"
    CCX = "ccx"
    MEASURE = "measure"
    BARRIER = "barrier"

    @property
    def arity(self) -> int | None:
        """Number of qubit operands; None means variadic (BARRIER, >= 1)."""
        if self is GateKind.BARRIER:
            return None
        if self is GateKind.CCX:
            return 3
        if self in (GateKind.CX, GateKind.CZ, GateKind.SWAP):
            return 2
        return 1

    @property
    def num_params(self) -> int:
        return 1 if self in (GateKind.RX, GateKind.RY, GateKind.RZ) else 0

    @property
    def is_unitary(self) -> bool:
        return self not in (GateKind.MEASURE, GateKind.BARRIER)


@dataclass(frozen=True)
class Instruction:
    """One gate application, measurement, or barrier.

    ``clbit`` is present exactly when ``kind`` is MEASURE and names the
    classical bit receiving the outcome.
    """

    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    clbit: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        arity = self.kind.arity
        if arity is None:
            if len(self.qubits) < 1:
                raise ValidationError(f"{self.kind.value} needs at least one qubit")
        elif len(self.qubits) != arity:
            raise ValidationError(
                f"{self.kind.value} takes {arity} qubit(s), got {len(self.qubits)}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise ValidationError(f"{self.kind.value} has duplicate qubit operands {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValidationError("negative qubit index")
        if len(self.params) != self.kind.num_params:
            raise ValidationError(
                f"{self.kind.value} takes {self.kind.num_params} parameter(s), got {len(self.params)}"
            )
        if (self.clbit is not None) != (self.kind is GateKind.MEASURE):
            raise ValidationError("clbit is set iff the instruction is a measurement")
        if self.clbit is not None and self.clbit < 0:
            raise ValidationError("negative clbit index")


@dataclass(frozen=True)
class Circuit:
    """An ordered list of instructions over ``num_qubits`` wires."""

    num_qubits: int
    num_clbits: int = 0
    instructions: tuple[Instruction, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        validate(self)

    @property
    def width(self) -> int:
        return self.num_qubits

    def measure_map(self) -> dict[int, int]:
        """clbit -> measured qubit, in instruction order."""
        return {ins.clbit: ins.qubits[0] for ins in self.instructions if ins.kind is GateKind.MEASURE}

    def has_measurements(self) -> bool:
        return any(ins.kind is GateKind.MEASURE for ins in self.instructions)

    def unitary_part(self) -> tuple[Instruction, ...]:
        """Instructions with measures and barriers stripped."""
        return tuple(ins for ins in self.instructions if ins.kind.is_unitary)


def validate(circuit: Circuit) -> None:
    """Check all structural invariants; raises ValidationError.

    Runs automatically on construction, hence after every parse.
    """
    if circuit.num_qubits < 1:
        raise ValidationError("circuit needs at least one qubit")
    if circuit.num_clbits < 0:
        raise ValidationError("negative classical register size")
    seen_clbits: set[int] = set()
    for ins in circuit.instructions:
        for q in ins.qubits:
            if q >= circuit.num_qubits:
                raise ValidationError(
                    f"qubit index {q} out of range for {circuit.num_qubits}-qubit circuit"
                )
        if ins.kind is GateKind.MEASURE:
            if ins.clbit >= circuit.num_clbits:
                raise ValidationError(
                    f"clbit index {ins.clbit} out of range for {circuit.num_clbits} classical bits"
                )
            if ins.clbit in seen_clbits:
                raise ValidationError(f"clbit {ins.clbit} measured twice")
            seen_clbits.add(ins.clbit)


def circuit_width(circuit: Circuit) -> int:
    return circuit.num_qubits


def circuit_depth(circuit: Circuit) -> int:
    """Length of the longest qubit-dependency chain.

    Instructions sharing a qubit are ordered; MEASURE occupies a layer of its
    own; BARRIER synchronizes its qubits' frontiers without occupying a layer.
    """
    frontier = [0] * circuit.num_qubits
    for ins in circuit.instructions:
        if ins.kind is GateKind.BARRIER:
            level = max(frontier[q] for q in ins.qubits)
            for q in ins.qubits:
                frontier[q] = level
        else:
            level = 1 + max(frontier[q] for q in ins.qubits)
            for q in ins.qubits:
                frontier[q] = level
    return max(frontier, default=0)
