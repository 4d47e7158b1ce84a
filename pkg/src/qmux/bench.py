"""The packed-vs-individual experiment: run a corpus both ways and compare.

Each .qasm file in the corpus directory is executed individually
(noiseless reference), then the whole corpus is first-fit packed into as
few combined circuits as fit the capacity, executed (optionally with
noise — noise applies to the packed side only, the reference stays
exact-sampling), demultiplexed, and scored with Hellinger and normalized
Wasserstein distances per circuit. Output is a CSV report.

Determinism: every execution seed descends from the one configured seed
via numpy SeedSequence spawning, and bench job ids are the corpus file
stems, so two runs with the same seed produce byte-identical CSVs.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .backend import DEFAULT_MAX_QUBITS, NoiseConfig, execute
from .composer import ComposedCircuit, compose, ensure_measurements
from .counts import CountsDistribution, demux
from .errors import ParseError, ValidationError
from .ir import Circuit
from .metrics import DistanceReport, compare_runs, write_csv
from .qasm import parse_qasm


@dataclass(frozen=True)
class BenchConfig:
    corpus_dir: Path
    capacity: int = 16
    shots: int = 10000
    seed: int = 0
    noise: Optional[NoiseConfig] = None
    output: Optional[Path] = None
    max_qubits: int = DEFAULT_MAX_QUBITS
    parallel: bool = False

    def __post_init__(self):
        if self.capacity < 1:
            raise ValidationError(f"capacity must be >= 1, got {self.capacity}")
        if self.shots < 1:
            raise ValidationError(f"shots must be >= 1, got {self.shots}")


@dataclass(frozen=True)
class BenchJob:
    """Corpus-file stand-in for a queue job; the file stem is the id."""

    job_id: str
    circuit: Circuit

    @property
    def name(self) -> str:
        return self.job_id

    @property
    def width(self) -> int:
        return self.circuit.num_qubits


@dataclass(frozen=True)
class BenchResult:
    report: DistanceReport
    batches: tuple[tuple[str, ...], ...]
    output: Optional[Path]

    @property
    def num_batches(self) -> int:
        return len(self.batches)


def load_corpus(corpus_dir, *, capacity: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> list[BenchJob]:
    """Parse every .qasm file (sorted by name) into a measured BenchJob."""
    corpus_dir = Path(corpus_dir)
    paths = sorted(corpus_dir.glob("*.qasm"))
    if not paths:
        raise ValidationError(f"no .qasm files in corpus directory {corpus_dir}")
    limit = min(capacity, max_qubits)
    jobs = []
    for path in paths:
        try:
            circuit = parse_qasm(path.read_text(encoding="utf-8"), name=path.stem)
        except ParseError as e:
            raise ParseError(f"{path.name}: {e}") from e
        circuit = ensure_measurements(circuit)
        if circuit.num_qubits > limit:
            raise ValidationError(
                f"{path.name}: circuit is {circuit.num_qubits} qubits wide,"
                f" above the bench limit min(capacity={capacity}, simulator={max_qubits})={limit}"
            )
        jobs.append(BenchJob(job_id=path.stem, circuit=circuit))
    return jobs


def pack_corpus(jobs: list[BenchJob], capacity: int) -> list[ComposedCircuit]:
    """Repeated first-fit passes until every job is placed in some batch."""
    batches = []
    remaining = list(jobs)
    while remaining:
        batch, _selected, skipped = compose(remaining, capacity)
        batches.append(batch)
        left = set(skipped)
        remaining = [j for j in remaining if j.job_id in left]
    return batches


def run_bench(config: BenchConfig) -> BenchResult:
    jobs = load_corpus(config.corpus_dir, capacity=config.capacity, max_qubits=config.max_qubits)
    root = np.random.SeedSequence(config.seed)

    # Reference side: each circuit alone, exact sampling, own child seed.
    seeds = root.spawn(len(jobs))
    if config.parallel:
        with ThreadPoolExecutor() as pool:
            singles = list(
                pool.map(
                    lambda pair: execute(
                        pair[0].circuit, config.shots,
                        seed=pair[1], max_qubits=config.max_qubits,
                    ),
                    zip(jobs, seeds),
                )
            )
        individual = {job.job_id: dist for job, dist in zip(jobs, singles)}
    else:
        individual = {
            job.job_id: execute(
                job.circuit, config.shots, seed=seed, max_qubits=config.max_qubits
            )
            for job, seed in zip(jobs, seeds)
        }

    # Packed side: the simulator cap bounds what one combined circuit may
    # hold, so packing uses min(capacity, max_qubits).
    batches = pack_corpus(jobs, min(config.capacity, config.max_qubits))
    scheduled: dict[str, CountsDistribution] = {}
    for batch, seed in zip(batches, root.spawn(len(batches))):
        composed_counts = execute(
            batch.circuit,
            config.shots,
            seed=seed,
            noise=config.noise,
            max_qubits=config.max_qubits,
        )
        scheduled.update(demux(composed_counts, batch.placements))

    report = compare_runs(
        [(job, individual[job.job_id], scheduled[job.job_id]) for job in jobs]
    )
    output = None
    if config.output is not None:
        output = Path(config.output)
        write_csv(report, output)
    return BenchResult(
        report=report,
        batches=tuple(tuple(p.job_id for p in b.placements) for b in batches),
        output=output,
    )
