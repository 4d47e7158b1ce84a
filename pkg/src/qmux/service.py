"""HTTP service: submit circuits, poll results, inspect queue and backends.

Endpoints (JSON in, JSON out; every error body is {code, message, detail}):

* POST /circuits      — submit {format, payload, shots}; 201 {job_id}.
                        400 on parse/validation failure (position in
                        detail), 422 when the circuit is wider than the
                        scheduler capacity.
* GET /results/{id}   — job record; counts included once DONE. The query
                        flag ?shots=requested downsamples the stored
                        result to the job's requested_shots.
* GET /queue          — FIFO snapshot of waiting jobs.
* GET /backends       — descriptors of the execution backends.

Submissions are journaled before the 201 is sent, so an acknowledged job
survives a crash; a background dispatcher thread runs the packing cycle.
"""
from __future__ import annotations

from contextlib import asynccontextmanager
from typing import Literal, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .composer import ensure_measurements
from .config import ServiceConfig
from .counts import downsample
from .backend import SimulatorBackend
from .errors import ParseError, TooWideError, ValidationError
from .journal import Journal
from .qasm import parse_qasm
from .quirk import parse_quirk
from .scheduler import DispatchLoop, JobStatus, QuantumJob, Scheduler


class SubmitRequest(BaseModel):
    format: Literal["qasm", "quirk"]
    payload: str
    shots: int = Field(ge=1)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail: Optional[dict] = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail or {}


def build_scheduler(config: ServiceConfig) -> Scheduler:
    backend = SimulatorBackend(max_qubits=config.max_qubits, noise=config.noise)
    journal = Journal(config.journal) if config.journal else None
    return Scheduler(
        config=config.scheduler,
        backend=backend,
        journal=journal,
        result_ttl=config.result_ttl,
    )


def _job_view(job: QuantumJob, *, shots_flag: Optional[str]) -> dict:
    view: dict = {
        "job_id": job.job_id,
        "name": job.name,
        "status": job.status.value,
        "width": job.width,
        "requested_shots": job.requested_shots,
        "submitted_at": job.submitted_at,
    }
    if job.batch_id is not None:
        view["batch_id"] = job.batch_id
        view["dispatched_at"] = job.dispatched_at
    if job.completed_at is not None:
        view["completed_at"] = job.completed_at
    if job.status is JobStatus.DONE:
        result = job.result
        if shots_flag == "requested":
            # Deterministic per job: the id seeds the subsample.
            result = downsample(result, job.requested_shots, seed=int(job.job_id, 16))
        view["counts"] = dict(result.counts)
        view["shots"] = result.total_shots
        view["num_bits"] = result.num_bits
    if job.status is JobStatus.FAILED:
        view["error"] = job.error
    return view


def create_app(
    config: Optional[ServiceConfig] = None,
    scheduler: Optional[Scheduler] = None,
    run_dispatch_loop: bool = True,
) -> FastAPI:
    config = config or ServiceConfig()
    scheduler = scheduler or build_scheduler(config)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        loop = None
        if run_dispatch_loop:
            loop = DispatchLoop(scheduler, serial=config.serial_dispatch)
            loop.start()
        try:
            yield
        finally:
            if loop is not None:
                loop.stop()
            if scheduler.journal is not None:
                scheduler.journal.close()

    app = FastAPI(title="qmux", lifespan=lifespan)
    app.state.scheduler = scheduler
    app.state.config = config

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "detail": exc.detail},
        )

    @app.exception_handler(RequestValidationError)
    async def _bad_request(_req: Request, exc: RequestValidationError):
        errors = [
            {key: err[key] for key in ("type", "loc", "msg") if key in err}
            for err in exc.errors()
        ]
        return JSONResponse(
            status_code=400,
            content={
                "code": "invalid_request",
                "message": "request body failed validation",
                "detail": {"errors": errors},
            },
        )

    @app.post("/circuits", status_code=201)
    async def submit(request: SubmitRequest) -> dict:
        try:
            if request.format == "qasm":
                circuit = parse_qasm(request.payload)
            else:
                circuit = parse_quirk(request.payload)
        except ParseError as e:
            detail = {}
            if getattr(e, "line", None) is not None:
                detail["line"] = e.line
            if getattr(e, "column", None) is not None:
                detail["column"] = e.column
            raise ApiError(400, "parse_error", str(e), detail) from e
        except ValidationError as e:
            raise ApiError(400, "invalid_circuit", str(e)) from e
        circuit = ensure_measurements(circuit)
        try:
            job = scheduler.submit(circuit, request.shots)
        except TooWideError as e:
            raise ApiError(
                422,
                "too_wide",
                str(e),
                {"width": e.width, "capacity": e.capacity},
            ) from e
        return {"job_id": job.job_id}

    @app.get("/results/{job_id}")
    async def result(job_id: str, shots: Optional[str] = None) -> dict:
        if shots is not None and shots != "requested":
            raise ApiError(
                400,
                "invalid_request",
                "the only supported value for ?shots is 'requested'",
                {"shots": shots},
            )
        try:
            job = scheduler.get(job_id)
        except KeyError:
            raise ApiError(404, "not_found", f"no job with id {job_id}", {"job_id": job_id})
        return _job_view(job, shots_flag=shots)

    @app.get("/queue")
    async def queue() -> list:
        return scheduler.queue_snapshot()

    @app.get("/backends")
    async def backends() -> list:
        return [scheduler.backend.descriptor().to_dict()]

    return app
