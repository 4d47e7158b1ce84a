"""Job queue and the cycle-driven dispatcher.

Jobs accumulate in a FIFO queue. At each cycle boundary the dispatcher asks
run_cycle for a decision: it dispatches when the queue is non-empty and
either no new job arrived during the elapsed cycle (the stream went quiet)
or the first-fit selection saturates capacity (someone was skipped, or zero
qubits remain) — otherwise it waits another cycle to let the batch grow.

The combined circuit always runs with the configured composed_shots; a
job's requested_shots is kept as metadata and can be applied by
downsampling at retrieval time.

Thread contract: any number of submitters may call enqueue/submit; exactly
one dispatcher calls run_cycle/execute_batch. All state mutations take the
scheduler lock; backend execution happens outside it so submissions keep
flowing while a batch runs.
"""
from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .backend import SimulatorBackend
from .composer import ComposedCircuit, compose, ensure_measurements, first_fit_selection
from .counts import CountsDistribution, demux
from .errors import InvalidShotsError, TooWideError, ValidationError
from .ir import Circuit
from .journal import Journal
from .qasm import parse_qasm, serialize_qasm


class JobStatus(str, Enum):
    QUEUED = "QUEUED"
    SCHEDULED = "SCHEDULED"
    RUNNING = "RUNNING"
    DONE = "DONE"
    FAILED = "FAILED"


# The only legal runtime edges. Crash recovery may additionally roll
# SCHEDULED/RUNNING back to QUEUED while replaying the journal.
_EDGES = {
    JobStatus.QUEUED: {JobStatus.SCHEDULED},
    JobStatus.SCHEDULED: {JobStatus.RUNNING},
    JobStatus.RUNNING: {JobStatus.DONE, JobStatus.FAILED},
    JobStatus.DONE: set(),
    JobStatus.FAILED: set(),
}


@dataclass
class QuantumJob:
    """One user submission and everything learned about it since."""

    job_id: str
    circuit: Circuit
    requested_shots: int
    status: JobStatus = JobStatus.QUEUED
    submitted_at: float = 0.0
    batch_id: Optional[str] = None
    error: Optional[str] = None
    dispatched_at: Optional[float] = None
    completed_at: Optional[float] = None
    result: Optional[CountsDistribution] = None

    @property
    def name(self) -> str:
        return self.circuit.name

    @property
    def width(self) -> int:
        return self.circuit.num_qubits


def new_job(circuit: Circuit, requested_shots: int, *, now: Optional[float] = None) -> QuantumJob:
    if requested_shots < 1:
        raise InvalidShotsError(f"requested_shots must be >= 1, got {requested_shots}")
    return QuantumJob(
        job_id=uuid.uuid4().hex,  # 128 bits
        circuit=circuit,
        requested_shots=requested_shots,
        submitted_at=time.time() if now is None else now,
    )


@dataclass(frozen=True)
class SchedulerConfig:
    capacity: int = 127
    cycle_duration: float = 5.0
    composed_shots: int = 10000
    backend: str = "statevector"

    def __post_init__(self):
        if self.capacity < 1:
            raise ValidationError(f"capacity must be >= 1, got {self.capacity}")
        if self.composed_shots < 1:
            raise ValidationError(f"composed_shots must be >= 1, got {self.composed_shots}")
        if self.cycle_duration <= 0:
            raise ValidationError(f"cycle_duration must be > 0, got {self.cycle_duration}")


class Decision(str, Enum):
    DISPATCH = "DISPATCH"
    WAIT = "WAIT"


@dataclass(frozen=True)
class DispatchDecision:
    kind: Decision
    batch: Optional[ComposedCircuit] = None

    @property
    def is_dispatch(self) -> bool:
        return self.kind is Decision.DISPATCH


_WAIT = DispatchDecision(Decision.WAIT)


class Scheduler:
    """Owns the queue, the job store, and batch execution."""

    def __init__(
        self,
        config: Optional[SchedulerConfig] = None,
        backend: Optional[SimulatorBackend] = None,
        journal: Optional[Journal] = None,
        clock: Callable[[], float] = time.time,
        seed=None,
        result_ttl: Optional[float] = None,
    ):
        self.config = config or SchedulerConfig()
        self.backend = backend or SimulatorBackend()
        self.journal = journal
        self.clock = clock
        self.result_ttl = result_ttl
        self._lock = threading.RLock()
        self._jobs: dict[str, QuantumJob] = {}
        self._queue: list[str] = []  # job_ids, FIFO
        self._order: list[str] = []  # every id ever submitted, in order
        self._arrivals = 0  # submissions since the last run_cycle call
        self._seeds = np.random.SeedSequence(seed)
        if journal is not None:
            self._recover()

    # -- submission --------------------------------------------------------

    def submit(self, circuit: Circuit, requested_shots: int) -> QuantumJob:
        """Build a job for the circuit and enqueue it."""
        job = new_job(circuit, requested_shots, now=self.clock())
        self.enqueue(job)
        return job

    def enqueue(self, job: QuantumJob) -> str:
        """FIFO-append a QUEUED job; durable before this returns."""
        if job.status is not JobStatus.QUEUED:
            raise ValidationError(f"can only enqueue QUEUED jobs, got {job.status.value}")
        width = job.circuit.num_qubits
        if width > self.config.capacity:
            raise TooWideError(width, self.config.capacity)
        with self._lock:
            if job.job_id in self._jobs:
                raise ValidationError(f"duplicate job_id {job.job_id}")
            if self.journal is not None:
                self.journal.append(
                    {
                        "event": "submitted",
                        "job_id": job.job_id,
                        "ts": job.submitted_at,
                        "qasm": serialize_qasm(job.circuit),
                        "name": job.circuit.name,
                        "requested_shots": job.requested_shots,
                    }
                )
            self._jobs[job.job_id] = job
            self._queue.append(job.job_id)
            self._order.append(job.job_id)
            self._arrivals += 1
        return job.job_id

    # -- queries ------------------------------------------------------------

    def get(self, job_id: str) -> QuantumJob:
        with self._lock:
            return self._jobs[job_id]

    def queue_snapshot(self) -> list[dict]:
        with self._lock:
            return [
                {
                    "position": pos,
                    "job_id": jid,
                    "name": self._jobs[jid].name,
                    "width": self._jobs[jid].width,
                    "requested_shots": self._jobs[jid].requested_shots,
                }
                for pos, jid in enumerate(self._queue)
            ]

    def jobs_snapshot(self) -> list[QuantumJob]:
        with self._lock:
            return [self._jobs[jid] for jid in self._order]

    # -- dispatch -----------------------------------------------------------

    def run_cycle(self, now: Optional[float] = None) -> DispatchDecision:
        """Decide, at a cycle boundary, whether to dispatch a batch.

        Dispatch iff the queue is non-empty and (the elapsed cycle saw no
        arrivals OR first-fit selection saturates capacity). On dispatch the
        selected jobs move to SCHEDULED under a fresh batch_id and leave the
        queue; skipped jobs keep their positions.
        """
        now = self.clock() if now is None else now
        with self._lock:
            arrivals, self._arrivals = self._arrivals, 0
            if not self._queue:
                return _WAIT
            widths = [self._jobs[jid].width for jid in self._queue]
            chosen, remaining = first_fit_selection(widths, self.config.capacity)
            saturated = len(chosen) < len(widths) or remaining == 0
            if arrivals > 0 and not saturated:
                return _WAIT
            batch, selected_ids, _skipped = compose(
                [self._jobs[jid] for jid in self._queue], self.config.capacity
            )
            selected = set(selected_ids)
            self._queue = [jid for jid in self._queue if jid not in selected]
            for jid in selected_ids:
                job = self._jobs[jid]
                self._transition(job, JobStatus.SCHEDULED)
                job.batch_id = batch.batch_id
                job.dispatched_at = now
                self._journal_status(job, "scheduled")
            return DispatchDecision(Decision.DISPATCH, batch)

    def execute_batch(self, batch: ComposedCircuit) -> dict[str, CountsDistribution]:
        """Run one composed batch and record per-job outcomes.

        Any backend failure fails every member job with the error message
        attached; success stores each job's demultiplexed counts. Returns
        the per-job counts for successful batches, {} on failure.
        """
        with self._lock:
            jobs = [self._jobs[p.job_id] for p in batch.placements]
            for job in jobs:
                self._transition(job, JobStatus.RUNNING)
                self._journal_status(job, "running")
            seed = self._seeds.spawn(1)[0]
        try:
            composed_counts = self.backend.execute(
                batch.circuit, self.config.composed_shots, seed=seed
            )
            per_job = demux(composed_counts, batch.placements)
        except Exception as e:  # a batch-level failure fails every member
            message = f"{type(e).__name__}: {e}"
            with self._lock:
                now = self.clock()
                for job in jobs:
                    self._transition(job, JobStatus.FAILED)
                    job.error = message
                    job.completed_at = now
                    self._journal_status(job, "failed")
            return {}
        with self._lock:
            now = self.clock()
            for job in jobs:
                self._transition(job, JobStatus.DONE)
                job.result = per_job[job.job_id]
                job.completed_at = now
                self._journal_status(job, "done")
        return per_job

    def _transition(self, job: QuantumJob, new: JobStatus) -> None:
        if new not in _EDGES[job.status]:
            raise ValidationError(
                f"illegal status transition {job.status.value} -> {new.value} for {job.job_id}"
            )
        job.status = new

    def _journal_status(self, job: QuantumJob, kind: str) -> None:
        if self.journal is None:
            return
        event = {
            "event": kind,
            "job_id": job.job_id,
            "ts": self.clock(),
            "batch_id": job.batch_id,
        }
        if kind == "done":
            event["counts"] = job.result.to_dict()
            event["dispatched_at"] = job.dispatched_at
        elif kind == "failed":
            event["error"] = job.error
            event["dispatched_at"] = job.dispatched_at
        self.journal.append(event)

    # -- recovery -----------------------------------------------------------

    def _recover(self) -> None:
        """Rebuild state from the journal, then compact it.

        Jobs that were in flight (SCHEDULED/RUNNING) when the process died
        are rolled back to QUEUED in their original submission positions —
        their batches never reported a result, so they rerun.
        """
        events = self.journal.read_events()
        for ev in events:
            kind = ev["event"]
            jid = ev["job_id"]
            if kind == "submitted":
                circuit = parse_qasm(ev["qasm"], name=ev.get("name", ""))
                job = QuantumJob(
                    job_id=jid,
                    circuit=circuit,
                    requested_shots=ev["requested_shots"],
                    submitted_at=ev["ts"],
                )
                self._jobs[jid] = job
                self._order.append(jid)
                continue
            job = self._jobs.get(jid)
            if job is None:
                raise ValidationError(f"journal references unknown job {jid}")
            if kind == "scheduled":
                job.status = JobStatus.SCHEDULED
                job.batch_id = ev.get("batch_id")
                job.dispatched_at = ev["ts"]
            elif kind == "running":
                job.status = JobStatus.RUNNING
            elif kind == "done":
                job.status = JobStatus.DONE
                job.result = CountsDistribution.from_dict(ev["counts"])
                job.completed_at = ev["ts"]
                job.dispatched_at = ev.get("dispatched_at", job.dispatched_at)
            elif kind == "failed":
                job.status = JobStatus.FAILED
                job.error = ev.get("error")
                job.completed_at = ev["ts"]
                job.dispatched_at = ev.get("dispatched_at", job.dispatched_at)
        for job in self._jobs.values():
            if job.status in (JobStatus.SCHEDULED, JobStatus.RUNNING):
                job.status = JobStatus.QUEUED
                job.batch_id = None
                job.dispatched_at = None
        if self.result_ttl is not None:
            cutoff = self.clock() - self.result_ttl
            stale = [
                jid
                for jid, job in self._jobs.items()
                if job.status in (JobStatus.DONE, JobStatus.FAILED)
                and (job.completed_at or 0.0) < cutoff
            ]
            for jid in stale:
                del self._jobs[jid]
                self._order.remove(jid)
        self._queue = [jid for jid in self._order if self._jobs[jid].status is JobStatus.QUEUED]
        self.compact()

    def compact(self) -> None:
        """Rewrite the journal to one submitted (+ terminal) event per job."""
        if self.journal is None:
            return
        events: list[dict] = []
        with self._lock:
            for jid in self._order:
                job = self._jobs[jid]
                events.append(
                    {
                        "event": "submitted",
                        "job_id": jid,
                        "ts": job.submitted_at,
                        "qasm": serialize_qasm(job.circuit),
                        "name": job.circuit.name,
                        "requested_shots": job.requested_shots,
                    }
                )
                if job.status is JobStatus.DONE:
                    events.append(
                        {
                            "event": "done",
                            "job_id": jid,
                            "ts": job.completed_at,
                            "batch_id": job.batch_id,
                            "dispatched_at": job.dispatched_at,
                            "counts": job.result.to_dict(),
                        }
                    )
                elif job.status is JobStatus.FAILED:
                    events.append(
                        {
                            "event": "failed",
                            "job_id": jid,
                            "ts": job.completed_at,
                            "batch_id": job.batch_id,
                            "dispatched_at": job.dispatched_at,
                            "error": job.error,
                        }
                    )
            self.journal.rewrite(events)


class DispatchLoop(threading.Thread):
    """Background dispatcher: one run_cycle per cycle_duration.

    By default execution is handed to a single worker so the next cycle's
    submissions accumulate while a batch runs; serial=True blocks the loop
    until each batch finishes (matching one-at-a-time hardware access).
    """

    def __init__(self, scheduler: Scheduler, serial: bool = False):
        super().__init__(name="qmux-dispatch", daemon=True)
        self.scheduler = scheduler
        self.serial = serial
        self._halt = threading.Event()
        self._worker: Optional[threading.Thread] = None
        self._pending: list[ComposedCircuit] = []
        self._pending_lock = threading.Lock()
        self._kick = threading.Event()

    def run(self) -> None:
        if not self.serial:
            self._worker = threading.Thread(
                target=self._drain, name="qmux-execute", daemon=True
            )
            self._worker.start()
        while not self._halt.wait(self.scheduler.config.cycle_duration):
            decision = self.scheduler.run_cycle()
            if not decision.is_dispatch:
                continue
            if self.serial:
                self.scheduler.execute_batch(decision.batch)
            else:
                with self._pending_lock:
                    self._pending.append(decision.batch)
                self._kick.set()

    def _drain(self) -> None:
        while True:
            self._kick.wait()
            self._kick.clear()
            while True:
                with self._pending_lock:
                    if not self._pending:
                        break
                    batch = self._pending.pop(0)
                self.scheduler.execute_batch(batch)
            if self._halt.is_set():
                return

    def stop(self, timeout: float = 10.0) -> None:
        self._halt.set()
        self._kick.set()
        self.join(timeout=timeout)
        if self._worker is not None:
            self._worker.join(timeout=timeout)
