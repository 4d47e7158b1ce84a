"""Quirk share-URL / JSON -> Circuit.

Accepts either the full share URL (circuit JSON in the fragment after
``#circuit=``) or the bare JSON object with a ``cols`` array. Each column is
read top to bottom; the row index is the qubit index. Supported cells:
H X Y Z S T, "•" (control), "Measure", and 1 / "1" (empty wire slot —
skipped; a row must hold a real cell somewhere to count as a wire).

Control columns translate to CX (one control, one X), CCX (two controls,
one X) or CZ (one control, one Z); anything else involving a control is
rejected as an unsupported layout. If no column contains a Measure cell, a
measure-all is appended so the circuit always produces classical bits;
either way clbit i carries qubit i's outcome.
"""
from __future__ import annotations

import json
from urllib.parse import unquote

from .errors import ParseError, UnsupportedCellError, UnsupportedLayoutError
from .ir import Circuit, GateKind, Instruction

_SINGLE = {
    "H": GateKind.H,
    "X": GateKind.X,
    "Y": GateKind.Y,
    "Z": GateKind.Z,
    "S": GateKind.S,
    "T": GateKind.T,
}

_CONTROL = "•"
_MEASURE = "Measure"


def _extract_json(url_or_json: str) -> str:
    text = url_or_json.strip()
    marker = "#circuit="
    if marker in text:
        return unquote(text[text.index(marker) + len(marker):])
    return text


def parse_quirk(url_or_json: str, name: str = "") -> Circuit:
    """Parse a Quirk share URL or its circuit JSON into a Circuit."""
    try:
        doc = json.loads(_extract_json(url_or_json))
    except json.JSONDecodeError as e:
        raise ParseError(f"not valid Quirk JSON: {e.msg}", e.lineno, e.colno) from e
    if not isinstance(doc, dict) or not isinstance(doc.get("cols"), list):
        raise ParseError('Quirk JSON must be an object with a "cols" array')

    instructions: list[Instruction] = []
    measured: list[int] = []
    num_qubits = 0
    for col_idx, col in enumerate(doc["cols"]):
        if not isinstance(col, list):
            raise ParseError(f"column {col_idx} is not an array")
        controls: list[int] = []
        gates: list[tuple[int, str]] = []
        measures: list[int] = []
        for row, cell in enumerate(col):
            if cell == 1 or cell == "1":
                continue  # empty wire slot; does not occupy the row
            if not isinstance(cell, str):
                raise UnsupportedCellError(f"column {col_idx}: unsupported cell {cell!r}")
            num_qubits = max(num_qubits, row + 1)
            if cell == _CONTROL:
                controls.append(row)
            elif cell == _MEASURE:
                measures.append(row)
            elif cell in _SINGLE:
                gates.append((row, cell))
            else:
                raise UnsupportedCellError(f"column {col_idx}: unsupported cell {cell!r}")
        if controls:
            if measures:
                raise UnsupportedLayoutError(
                    f"column {col_idx}: control combined with Measure"
                )
            if len(gates) != 1:
                raise UnsupportedLayoutError(
                    f"column {col_idx}: a control column needs exactly one target gate"
                )
            target, gate = gates[0]
            if gate == "X" and len(controls) == 1:
                instructions.append(Instruction(GateKind.CX, (controls[0], target)))
            elif gate == "X" and len(controls) == 2:
                instructions.append(Instruction(GateKind.CCX, (*controls, target)))
            elif gate == "Z" and len(controls) == 1:
                instructions.append(Instruction(GateKind.CZ, (controls[0], target)))
            else:
                raise UnsupportedLayoutError(
                    f"column {col_idx}: {len(controls)} control(s) on {gate} is not supported"
                )
        else:
            for row, gate in gates:
                instructions.append(Instruction(_SINGLE[gate], (row,)))
        for row in measures:
            instructions.append(Instruction(GateKind.MEASURE, (row,), clbit=row))
            measured.append(row)

    if num_qubits == 0:
        raise ParseError("circuit has no occupied wires")
    if not measured:
        for q in range(num_qubits):
            instructions.append(Instruction(GateKind.MEASURE, (q,), clbit=q))
    return Circuit(num_qubits, num_qubits, tuple(instructions), name=name)
