import math

import pytest
from hypothesis import given, settings

from conftest import circuits
from qmux.errors import (
    ParseError,
    QasmSyntaxError,
    RegisterIndexError,
    UnsupportedGateError,
)
from qmux.ir import GateKind
from qmux.qasm import parse_qasm, serialize_qasm

BELL = """
OPENQASM 2.0;
include "qelib1.inc";
qreg q[2];
creg c[2];
h q[0];
cx q[0],q[1];
measure q[0] -> c[0];
measure q[1] -> c[1];
"""


def test_parse_bell():
    c = parse_qasm(BELL, name="bell")
    assert c.num_qubits == 2
    assert c.num_clbits == 2
    assert c.name == "bell"
    kinds = [i.kind for i in c.instructions]
    assert kinds == [GateKind.H, GateKind.CX, GateKind.MEASURE, GateKind.MEASURE]
    assert c.measure_map() == {0: 0, 1: 1}


def test_header_is_optional():
    c = parse_qasm("qreg q[1];\nx q[0];")
    assert [i.kind for i in c.instructions] == [GateKind.X]


def test_version_other_than_2_rejected():
    with pytest.raises(QasmSyntaxError):
        parse_qasm("OPENQASM 3.0;\nqreg q[1];")


def test_comments_do_not_shift_error_positions():
    src = "qreg q[2]; // main register\nh q[0];\nbadgate q[1];\n"
    with pytest.raises(UnsupportedGateError) as excinfo:
        parse_qasm(src)
    assert excinfo.value.line == 3
    assert "badgate" in str(excinfo.value)


def test_known_foreign_gate_message():
    with pytest.raises(UnsupportedGateError) as excinfo:
        parse_qasm("qreg q[2];\ncu1(0.5) q[0],q[1];")
    assert "not supported" in str(excinfo.value)


def test_angle_expressions():
    c = parse_qasm("qreg q[1];\nrx(pi/2) q[0];\nrz(-pi) q[0];\nry(0.25*pi) q[0];")
    assert c.instructions[0].params[0] == pytest.approx(math.pi / 2)
    assert c.instructions[1].params[0] == pytest.approx(-math.pi)
    assert c.instructions[2].params[0] == pytest.approx(math.pi / 4)


def test_angle_division_by_zero():
    with pytest.raises(ParseError):
        parse_qasm("qreg q[1];\nrx(pi/0) q[0];")


def test_bare_register_measure_expands_pairwise():
    c = parse_qasm("qreg q[3];\ncreg c[3];\nmeasure q -> c;")
    assert c.measure_map() == {0: 0, 1: 1, 2: 2}


def test_bare_register_gate_applies_to_every_qubit():
    c = parse_qasm("qreg q[3];\nh q;")
    assert [i.qubits for i in c.instructions] == [(0,), (1,), (2,)]


def test_barrier_is_variadic():
    c = parse_qasm("qreg q[3];\nbarrier q[0],q[2];\nbarrier q;")
    assert c.instructions[0].qubits == (0, 2)
    assert c.instructions[1].qubits == (0, 1, 2)


def test_missing_semicolon_reported():
    with pytest.raises(QasmSyntaxError) as excinfo:
        parse_qasm("qreg q[1];\nx q[0]")
    assert "';'" in str(excinfo.value)


def test_out_of_range_index():
    with pytest.raises(RegisterIndexError) as excinfo:
        parse_qasm("qreg q[2];\nh q[2];")
    assert excinfo.value.line == 2


def test_duplicate_qreg_rejected():
    with pytest.raises(QasmSyntaxError):
        parse_qasm("qreg q[2];\nqreg r[2];\nh q[0];")


def test_missing_qreg_rejected():
    with pytest.raises(QasmSyntaxError):
        parse_qasm("h q[0];")


def test_ccx_and_swap_parse():
    c = parse_qasm("qreg q[3];\nccx q[0],q[1],q[2];\nswap q[0],q[2];")
    assert c.instructions[0].kind is GateKind.CCX
    assert c.instructions[1].kind is GateKind.SWAP


def test_parse_does_not_invent_measurements():
    c = parse_qasm("qreg q[2];\nh q[0];")
    assert not c.has_measurements()
    assert c.num_clbits == 0


def test_serialize_pi_exactly():
    c = parse_qasm("qreg q[1];\nrz(pi) q[0];\nrz(-pi) q[0];")
    text = serialize_qasm(c)
    assert "rz(pi) q[0];" in text
    assert "rz(-pi) q[0];" in text


@settings(max_examples=60)
@given(circuits(max_qubits=5, max_gates=12, measure="maybe"))
def test_serialize_parse_round_trip(circuit):
    text = serialize_qasm(circuit)
    again = parse_qasm(text, name=circuit.name)
    assert again == circuit


def test_line_and_column_in_parse_error():
    with pytest.raises(ParseError) as excinfo:
        parse_qasm("qreg q[1];\n???;")
    err = excinfo.value
    assert err.line == 2
    assert "line 2" in str(err)
