"""Pack independent quantum circuits into shared runs and split the results.

Submissions queue up; each dispatch cycle first-fit packs waiting circuits
side by side into one wide circuit, runs it on a statevector simulator, and
slices the measured bitstrings back into per-job count histograms. Metrics
compare packed against individual execution.
"""
from .backend import (
    BackendDescriptor,
    NoiseConfig,
    SimulatorBackend,
    StateVector,
    execute,
    probabilities,
    probabilities_dict,
    statevector,
)
from .composer import (
    ComposedCircuit,
    Placement,
    compose,
    ensure_measurements,
    offset_circuit,
)
from .counts import CountsDistribution, demux, downsample, slice_key
from .ir import Circuit, GateKind, Instruction, circuit_depth, circuit_width
from .metrics import (
    DistanceReport,
    JobDistance,
    compare_runs,
    hellinger,
    hellinger_probs,
    wasserstein_normalized,
    write_csv,
)
from .qasm import parse_qasm, serialize_qasm
from .quirk import parse_quirk
from .scheduler import (
    Decision,
    DispatchDecision,
    DispatchLoop,
    JobStatus,
    QuantumJob,
    Scheduler,
    SchedulerConfig,
    new_job,
)

__all__ = [
    "BackendDescriptor",
    "Circuit",
    "ComposedCircuit",
    "CountsDistribution",
    "Decision",
    "DispatchDecision",
    "DispatchLoop",
    "DistanceReport",
    "GateKind",
    "Instruction",
    "JobDistance",
    "JobStatus",
    "NoiseConfig",
    "Placement",
    "QuantumJob",
    "Scheduler",
    "SchedulerConfig",
    "SimulatorBackend",
    "StateVector",
    "circuit_depth",
    "circuit_width",
    "compare_runs",
    "compose",
    "demux",
    "downsample",
    "ensure_measurements",
    "execute",
    "hellinger",
    "hellinger_probs",
    "new_job",
    "offset_circuit",
    "parse_qasm",
    "parse_quirk",
    "probabilities",
    "probabilities_dict",
    "serialize_qasm",
    "slice_key",
    "statevector",
    "wasserstein_normalized",
    "write_csv",
]

__version__ = "0.1.0"
