import math
from pathlib import Path

import pytest
from hypothesis import strategies as st

from qmux.ir import Circuit, GateKind, Instruction

REPO_ROOT = Path(__file__).resolve().parent.parent
CORPUS_DIR = REPO_ROOT / "circuits"

# Unitary gates grouped by how many qubits they need.
ONE_QUBIT = (GateKind.H, GateKind.X, GateKind.Y, GateKind.Z, GateKind.S,
             GateKind.SDG, GateKind.T, GateKind.TDG)
ROTATIONS = (GateKind.RX, GateKind.RY, GateKind.RZ)
TWO_QUBIT = (GateKind.CX, GateKind.CZ, GateKind.SWAP)


def bell() -> Circuit:
    return Circuit(2, 2, (
        Instruction(GateKind.H, (0,)),
        Instruction(GateKind.CX, (0, 1)),
        Instruction(GateKind.MEASURE, (0,), clbit=0),
        Instruction(GateKind.MEASURE, (1,), clbit=1),
    ), name="bell")


def ghz(n: int) -> Circuit:
    gates = [Instruction(GateKind.H, (0,))]
    gates += [Instruction(GateKind.CX, (q, q + 1)) for q in range(n - 1)]
    gates += [Instruction(GateKind.MEASURE, (q,), clbit=q) for q in range(n)]
    return Circuit(n, n, tuple(gates), name=f"ghz{n}")


def x_measure() -> Circuit:
    return Circuit(1, 1, (
        Instruction(GateKind.X, (0,)),
        Instruction(GateKind.MEASURE, (0,), clbit=0),
    ), name="x1")


angles = st.floats(min_value=-2 * math.pi, max_value=2 * math.pi,
                   allow_nan=False, allow_infinity=False)


@st.composite
def instructions(draw, n: int):
    """One random unitary instruction on a circuit of n qubits."""
    kinds = list(ONE_QUBIT) + list(ROTATIONS)
    if n >= 2:
        kinds += list(TWO_QUBIT)
    if n >= 3:
        kinds.append(GateKind.CCX)
    kind = draw(st.sampled_from(kinds))
    arity = kind.arity
    qubits = tuple(draw(st.permutations(range(n)))[:arity])
    params = (draw(angles),) if kind.num_params else ()
    return Instruction(kind, qubits, params)


@st.composite
def circuits(draw, min_qubits=1, max_qubits=4, max_gates=10, measure="all"):
    """Random circuit; measure is 'all', 'none', or 'maybe'."""
    n = draw(st.integers(min_qubits, max_qubits))
    gates = draw(st.lists(instructions(n), max_size=max_gates))
    measured = {"all": True, "none": False}.get(measure)
    if measured is None:
        measured = draw(st.booleans())
    if measured:
        gates += [Instruction(GateKind.MEASURE, (q,), clbit=q) for q in range(n)]
    return Circuit(n, n if measured else 0, tuple(gates))


@st.composite
def distributions(draw, num_bits: int, max_keys=8, max_count=200):
    """Random CountsDistribution contents with at least one shot."""
    universe = [format(i, f"0{num_bits}b") for i in range(1 << num_bits)]
    keys = draw(st.lists(st.sampled_from(universe), min_size=1,
                         max_size=min(max_keys, len(universe)), unique=True))
    counts = {k: draw(st.integers(0, max_count)) for k in keys}
    if sum(counts.values()) == 0:
        counts[keys[0]] = 1
    return counts


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    assert CORPUS_DIR.is_dir(), "sample corpus missing; run scripts/make_corpus.py"
    return CORPUS_DIR


class FakeClock:
    """Deterministic time source for cycle tests."""

    def __init__(self, start: float = 0.0):
        self.now = start

    def __call__(self) -> float:
        return self.now

    def advance(self, dt: float) -> float:
        self.now += dt
        return self.now


@pytest.fixture
def fake_clock() -> FakeClock:
    return FakeClock()
