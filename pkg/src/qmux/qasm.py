"""OpenQASM 2.0 subset: text -> Circuit and back.

Grammar accepted (documented in docs/qasm-subset.md): optional version
header, optional includes, one qreg, at most one creg, and applications of
the supported gates. ``parse_qasm(serialize_qasm(c))`` reproduces ``c``
exactly, float params included.
"""
from __future__ import annotations

import ast
import math
import re

from .errors import QasmSyntaxError, RegisterIndexError, UnsupportedGateError, ValidationError
from .ir import Circuit, GateKind, Instruction

_GATE_NAMES = {
    kind.value: kind
    for kind in GateKind
    if kind not in (GateKind.MEASURE, GateKind.BARRIER)
}

# Gates that exist in OpenQASM 2 / qelib1 but not in this IR; named so the
# error distinguishes "unsupported" from "not a gate at all".
_KNOWN_FOREIGN = {
    "id", "u1", "u2", "u3", "u", "p", "sx", "sxdg", "cy", "ch", "crx", "cry",
    "crz", "cp", "cu1", "cu3", "rzz", "rxx", "cswap", "c3x", "c4x", "reset",
}

_RE_QREG = re.compile(r"^(qreg|creg)\s+([A-Za-z_][A-Za-z0-9_]*)\s*\[\s*(\d+)\s*\]$")
_RE_INCLUDE = re.compile(r'^include\s+"[^"]*"$')
_RE_HEADER = re.compile(r"^OPENQASM\s+([0-9.]+)$")
_RE_MEASURE = re.compile(r"^measure\s+(.+?)\s*->\s*(.+)$")
_RE_GATE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(?:\(([^()]*)\))?\s+(.+)$")
_RE_OPERAND = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(?:\[\s*(\d+)\s*\])?$")


def _statements(text: str):
    """Yield (statement, line, column), comments stripped, offsets preserved."""
    blanked = re.sub(r"//[^\n]*", lambda m: " " * len(m.group()), text)
    pos = 0
    while True:
        end = blanked.find(";", pos)
        chunk = blanked[pos:] if end == -1 else blanked[pos:end]
        stripped = chunk.strip()
        if stripped:
            offset = pos + (len(chunk) - len(chunk.lstrip()))
            line = blanked.count("\n", 0, offset) + 1
            column = offset - blanked.rfind("\n", 0, offset)
            if end == -1:
                raise QasmSyntaxError("missing ';'", line, column)
            yield stripped, line, column
        if end == -1:
            return
        pos = end + 1


def _eval_angle(expr: str, line: int) -> float:
    """Evaluate an angle expression: numbers, pi, + - * /, parentheses."""
    try:
        tree = ast.parse(expr.strip(), mode="eval")
    except SyntaxError:
        raise QasmSyntaxError(f"bad parameter expression {expr!r}", line) from None

    def ev(node: ast.AST) -> float:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if b == 0:
                raise QasmSyntaxError("division by zero in parameter", line)
            return a / b
        raise QasmSyntaxError(f"bad parameter expression {expr!r}", line)

    return ev(tree)


class _Parser:
    def __init__(self) -> None:
        self.qreg: tuple[str, int] | None = None
        self.creg: tuple[str, int] | None = None
        self.instructions: list[Instruction] = []

    def _operand(self, text: str, want: str, line: int) -> list[int]:
        """Resolve an operand to indices; a bare register name means all of it."""
        m = _RE_OPERAND.match(text.strip())
        if not m:
            raise QasmSyntaxError(f"bad operand {text!r}", line)
        name, idx = m.group(1), m.group(2)
        reg = self.qreg if want == "q" else self.creg
        if reg is None or name != reg[0]:
            raise QasmSyntaxError(f"unknown register {name!r}", line)
        if idx is None:
            return list(range(reg[1]))
        i = int(idx)
        if i >= reg[1]:
            raise RegisterIndexError(f"{name}[{i}] out of range (size {reg[1]})", line)
        return [i]

    def _single(self, text: str, want: str, line: int) -> int:
        idxs = self._operand(text, want, line)
        if len(idxs) != 1:
            raise QasmSyntaxError(f"operand {text.strip()!r} must be a single bit here", line)
        return idxs[0]

    def statement(self, stmt: str, line: int) -> None:
        m = _RE_HEADER.match(stmt)
        if m:
            if self.instructions or self.qreg or self.creg:
                raise QasmSyntaxError("version header must come first", line)
            if m.group(1) != "2.0":
                raise QasmSyntaxError(f"unsupported OPENQASM version {m.group(1)}", line)
            return
        if _RE_INCLUDE.match(stmt):
            return
        m = _RE_QREG.match(stmt)
        if m:
            which, name, size = m.group(1), m.group(2), int(m.group(3))
            if which == "qreg":
                if self.qreg is not None:
                    raise QasmSyntaxError("only one qreg is supported", line)
                if size < 1:
                    raise QasmSyntaxError("qreg must have at least one qubit", line)
                self.qreg = (name, size)
            else:
                if self.creg is not None:
                    raise QasmSyntaxError("only one creg is supported", line)
                self.creg = (name, size)
            return
        m = _RE_MEASURE.match(stmt)
        if m:
            if self.qreg is None:
                raise QasmSyntaxError("measure before qreg declaration", line)
            qs = self._operand(m.group(1), "q", line)
            cs = self._operand(m.group(2), "c", line)
            if len(qs) != len(cs):
                raise QasmSyntaxError("measure operand sizes differ", line)
            for q, c in zip(qs, cs):
                self.instructions.append(Instruction(GateKind.MEASURE, (q,), clbit=c))
            return
        m = _RE_GATE.match(stmt)
        if m:
            name, params, operands = m.group(1), m.group(2), m.group(3)
            if self.qreg is None:
                raise QasmSyntaxError(f"{name!r} before qreg declaration", line)
            if name == "barrier":
                qubits: list[int] = []
                for op in operands.split(","):
                    qubits.extend(self._operand(op, "q", line))
                self.instructions.append(Instruction(GateKind.BARRIER, tuple(qubits)))
                return
            kind = _GATE_NAMES.get(name)
            if kind is None:
                detail = "is not supported" if name in _KNOWN_FOREIGN else "is not a known gate"
                raise UnsupportedGateError(f"gate {name!r} {detail}", line)
            angles: tuple[float, ...] = ()
            if params is not None:
                angles = tuple(_eval_angle(p, line) for p in params.split(","))
            ops = operands.split(",")
            if kind.arity == 1 and len(ops) == 1:
                # QASM 2.0 broadcast: a bare register applies the gate to
                # each of its qubits in order.
                for q in self._operand(ops[0], "q", line):
                    self.instructions.append(Instruction(kind, (q,), angles))
                return
            qubits = [self._single(op, "q", line) for op in ops]
            self.instructions.append(Instruction(kind, tuple(qubits), angles))
            return
        raise QasmSyntaxError(f"cannot parse statement {stmt!r}", line)

    def finish(self, name: str) -> Circuit:
        if self.qreg is None:
            raise QasmSyntaxError("no qreg declared", None)
        num_clbits = self.creg[1] if self.creg else 0
        return Circuit(self.qreg[1], num_clbits, tuple(self.instructions), name=name)


def parse_qasm(text: str, name: str = "") -> Circuit:
    """Parse OpenQASM 2.0 text into a Circuit.

    Raises QasmSyntaxError / UnsupportedGateError / RegisterIndexError with
    source positions; the resulting Circuit is fully validated.
    """
    parser = _Parser()
    for stmt, line, column in _statements(text):
        try:
            parser.statement(stmt, line)
        except ValidationError as e:
            raise QasmSyntaxError(str(e), line) from e
    return parser.finish(name)


def _format_angle(angle: float) -> str:
    if angle == math.pi:
        return "pi"
    if angle == -math.pi:
        return "-pi"
    return repr(angle)


def serialize_qasm(circuit: Circuit) -> str:
    """Render a Circuit back to QASM text; inverse of parse_qasm on the IR."""
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg q[{circuit.num_qubits}];"]
    if circuit.num_clbits:
        lines.append(f"creg c[{circuit.num_clbits}];")
    for ins in circuit.instructions:
        if ins.kind is GateKind.MEASURE:
            lines.append(f"measure q[{ins.qubits[0]}] -> c[{ins.clbit}];")
        elif ins.kind is GateKind.BARRIER:
            lines.append("barrier " + ",".join(f"q[{q}]" for q in ins.qubits) + ";")
        else:
            params = ""
            if ins.params:
                params = "(" + ",".join(_format_angle(p) for p in ins.params) + ")"
            operands = ",".join(f"q[{q}]" for q in ins.qubits)
            lines.append(f"{ins.kind.value}{params} {operands};")
    return "\n".join(lines) + "\n"
