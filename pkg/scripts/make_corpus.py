#!/usr/bin/env python3
"""Regenerate the sample corpus in circuits/.

Seven small-width classics: teleportation (with deferred corrections),
Grover search on 2 and 3 qubits, Simon's oracle with biased inputs, a
QFT-based +1 adder, a ripple full adder, and Deutsch-Jozsa with a
balanced oracle. Every circuit is checked here to have a single most
likely outcome with a comfortable margin, so a mild-noise run still
identifies the right answer per circuit — which the noise-sanity checks
in the test suite rely on.

Run from the repo root:  python scripts/make_corpus.py
"""
from __future__ import annotations

import math
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from qmux.backend import probabilities, probabilities_dict
from qmux.ir import Circuit, GateKind, Instruction
from qmux.qasm import parse_qasm, serialize_qasm

H, X, Z, RY, RZ, CX, CZ, CCX, SWAP, MEASURE = (
    GateKind.H, GateKind.X, GateKind.Z, GateKind.RY, GateKind.RZ,
    GateKind.CX, GateKind.CZ, GateKind.CCX, GateKind.SWAP, GateKind.MEASURE,
)


def ins(kind, *qubits, params=(), clbit=None):
    return Instruction(kind, tuple(qubits), tuple(params), clbit)


def measure_all(n):
    return [ins(MEASURE, q, clbit=q) for q in range(n)]


def cp(theta, a, b):
    """Controlled-phase diag(1,1,1,e^{i theta}) from rz+cx (global phase free)."""
    return [
        ins(RZ, a, params=(theta / 2,)),
        ins(CX, a, b),
        ins(RZ, b, params=(-theta / 2,)),
        ins(CX, a, b),
        ins(RZ, b, params=(theta / 2,)),
    ]


def qft(n):
    """Little-endian QFT (value = sum q_i 2^i), swaps included."""
    gates = []
    for j in reversed(range(n)):
        gates.append(ins(H, j))
        for m in reversed(range(j)):
            gates += cp(math.pi / (1 << (j - m)), m, j)
    for i in range(n // 2):
        gates.append(ins(SWAP, i, n - 1 - i))
    return gates


def inverse(gates):
    inv = []
    for g in reversed(gates):
        if g.kind in (RY, RZ):
            inv.append(ins(g.kind, *g.qubits, params=(-g.params[0],)))
        else:  # h, x, cx, swap, ... are self-inverse here
            inv.append(g)
    return inv


def teleport3():
    # Send ry(1.0)|0> from q0 to q2; corrections stay quantum (cx/cz instead
    # of classically controlled), so only the output qubit is measured.
    gates = [
        ins(RY, 0, params=(1.0,)),
        ins(H, 1), ins(CX, 1, 2),
        ins(CX, 0, 1), ins(H, 0),
        ins(CX, 1, 2), ins(CZ, 0, 2),
        ins(MEASURE, 2, clbit=0),
    ]
    return Circuit(3, 1, tuple(gates), name="teleport3")


def grover2():
    # One iteration finds |11> exactly at N=4.
    gates = [ins(H, 0), ins(H, 1), ins(CZ, 0, 1),
             ins(H, 0), ins(H, 1), ins(Z, 0), ins(Z, 1), ins(CZ, 0, 1),
             ins(H, 0), ins(H, 1)]
    return Circuit(2, 2, tuple(gates + measure_all(2)), name="grover2")


def ccz(a, b, c):
    return [ins(H, c), ins(CCX, a, b, c), ins(H, c)]


def grover3():
    # One iteration marking |111>: success probability 25/32.
    gates = [ins(H, q) for q in range(3)]
    gates += ccz(0, 1, 2)
    gates += [ins(H, q) for q in range(3)]
    gates += [ins(X, q) for q in range(3)]
    gates += ccz(0, 1, 2)
    gates += [ins(X, q) for q in range(3)]
    gates += [ins(H, q) for q in range(3)]
    return Circuit(3, 3, tuple(gates + measure_all(3)), name="grover3")


def simon4():
    # Secret string 11 oracle; inputs biased (ry instead of h) so the four
    # reachable outcomes have distinct probabilities.
    gates = [
        ins(RY, 0, params=(1.0,)), ins(RY, 1, params=(1.2,)),
        ins(CX, 0, 2), ins(CX, 1, 2),
        ins(CX, 0, 3), ins(CX, 1, 3),
    ]
    return Circuit(4, 4, tuple(gates + measure_all(4)), name="simon4")


def qft3():
    # Phase-space +1 on the basis state 3: QFT, rz phase kicks, inverse QFT.
    fwd = qft(3)
    gates = [ins(X, 0), ins(X, 1)]
    gates += fwd
    gates += [ins(RZ, j, params=(2 * math.pi * (1 << j) / 8,)) for j in range(3)]
    gates += inverse(fwd)
    return Circuit(3, 3, tuple(gates + measure_all(3)), name="qft3")


def adder4():
    # Full adder with a=b=cin=1: q2 ends as the sum bit, q3 as carry-out.
    gates = [
        ins(X, 0), ins(X, 1), ins(X, 2),
        ins(CCX, 0, 1, 3),
        ins(CX, 0, 1),
        ins(CCX, 1, 2, 3),
        ins(CX, 1, 2),
    ]
    return Circuit(4, 4, tuple(gates + measure_all(4)), name="adder4")


def dj3():
    # Balanced oracle f(x) = x0; the input register collapses to the oracle
    # signature and the ancilla is rotated back to |1> so the full outcome
    # stays deterministic.
    gates = [
        ins(H, 0), ins(H, 1),
        ins(X, 2), ins(H, 2),
        ins(CX, 0, 2),
        ins(H, 0), ins(H, 1), ins(H, 2),
    ]
    return Circuit(3, 3, tuple(gates + measure_all(3)), name="dj3")


BUILDERS = (teleport3, grover2, grover3, simon4, qft3, adder4, dj3)
MIN_MARGIN = 0.20  # modal probability must beat the runner-up by this much


def main():
    out_dir = Path(__file__).resolve().parent.parent / "circuits"
    out_dir.mkdir(exist_ok=True)
    for build in BUILDERS:
        circuit = build()
        dist = probabilities_dict(circuit, cutoff=1e-12)
        ranked = sorted(dist.items(), key=lambda kv: kv[1], reverse=True)
        mode, p_mode = ranked[0]
        p_next = ranked[1][1] if len(ranked) > 1 else 0.0
        assert p_mode - p_next >= MIN_MARGIN, (
            f"{circuit.name}: mode {mode} at {p_mode:.3f} is not unique enough"
            f" (runner-up {p_next:.3f})"
        )
        text = serialize_qasm(circuit)
        assert parse_qasm(text, name=circuit.name) == circuit
        path = out_dir / f"{circuit.name}.qasm"
        path.write_text(text, encoding="utf-8")
        print(
            f"{circuit.name:<10} {circuit.num_qubits}q depth-ish {len(circuit.instructions):>2}"
            f"  mode {mode} p={p_mode:.4f} (runner-up {p_next:.4f}) -> {path.name}"
        )


if __name__ == "__main__":
    main()
