"""Command-line front end.

    qmux serve   — run the HTTP service (scheduler + dispatcher).
    qmux submit  — send a circuit file to a running service.
    qmux result  — fetch a job's status/counts.
    qmux queue   — show the waiting queue.
    qmux bench   — packed-vs-individual experiment over a corpus, CSV out.

Exit codes: 0 success, 1 API/input error, 2 cannot reach the server.
"""
from __future__ import annotations

import dataclasses
import json
import sys
from pathlib import Path

import click
import httpx

from .backend import NoiseConfig
from .bench import BenchConfig, run_bench
from .config import load_config
from .errors import ParseError, ValidationError

DEFAULT_URL = "http://127.0.0.1:8765"


def _client_error(url: str, exc: Exception) -> None:
    click.echo(f"cannot reach {url}: {exc}", err=True)
    sys.exit(2)


def _api_error(response: httpx.Response) -> None:
    try:
        body = response.json()
        message = f"{body.get('code', 'error')}: {body.get('message', '')}"
        detail = body.get("detail")
        if detail:
            message += f" {json.dumps(detail)}"
    except ValueError:
        message = response.text
    click.echo(f"error {response.status_code}: {message}", err=True)
    sys.exit(1)


def _request(method: str, url: str, **kwargs) -> httpx.Response:
    try:
        response = httpx.request(method, url, timeout=30.0, **kwargs)
    except httpx.TransportError as exc:
        _client_error(url, exc)
    if response.status_code >= 400:
        _api_error(response)
    return response


@click.group()
def main():
    """Pack queued quantum circuits into combined runs and split the results."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON config file (QMUX_* env still overrides).")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--capacity", type=int, default=None, help="qubit capacity per combined circuit")
@click.option("--cycle", "cycle_duration", type=float, default=None,
              help="seconds the dispatcher waits between queue checks")
@click.option("--journal", default=None, help="journal path ('none' disables persistence)")
@click.option("--serial", is_flag=True, help="block each cycle until the batch finishes")
def serve(config_path, host, port, capacity, cycle_duration, journal, serial):
    """Run the scheduler service until interrupted."""
    import uvicorn

    from .service import create_app

    cfg = load_config(config_path)
    scheduler_cfg = cfg.scheduler
    if capacity is not None or cycle_duration is not None:
        scheduler_cfg = dataclasses.replace(
            scheduler_cfg,
            capacity=capacity if capacity is not None else scheduler_cfg.capacity,
            cycle_duration=cycle_duration
            if cycle_duration is not None
            else scheduler_cfg.cycle_duration,
        )
    cfg = dataclasses.replace(
        cfg,
        scheduler=scheduler_cfg,
        host=host if host is not None else cfg.host,
        port=port if port is not None else cfg.port,
        journal=(None if journal == "none" else journal) if journal is not None else cfg.journal,
        serial_dispatch=serial or cfg.serial_dispatch,
    )
    click.echo(
        f"listening on {cfg.host}:{cfg.port} "
        f"(capacity {cfg.scheduler.capacity}, cycle {cfg.scheduler.cycle_duration}s, "
        f"journal {cfg.journal or 'disabled'})"
    )
    uvicorn.run(create_app(cfg), host=cfg.host, port=cfg.port, log_level="warning")


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["qasm", "quirk"]), default=None,
              help="inferred from the file extension when omitted")
@click.option("--shots", type=int, default=1024, show_default=True)
@click.option("--url", default=DEFAULT_URL, show_default=True, envvar="QMUX_URL")
def submit(file, fmt, shots, url):
    """Submit a circuit file; prints the job id."""
    payload = Path(file).read_text(encoding="utf-8").strip()
    if fmt is None:
        fmt = "qasm" if Path(file).suffix.lower() == ".qasm" else "quirk"
    response = _request(
        "POST", f"{url}/circuits",
        json={"format": fmt, "payload": payload, "shots": shots},
    )
    click.echo(response.json()["job_id"])


@main.command()
@click.argument("job_id")
@click.option("--url", default=DEFAULT_URL, show_default=True, envvar="QMUX_URL")
@click.option("--requested-shots", is_flag=True,
              help="downsample counts to the shots the job asked for")
def result(job_id, url, requested_shots):
    """Fetch one job's record (counts included once DONE)."""
    params = {"shots": "requested"} if requested_shots else None
    response = _request("GET", f"{url}/results/{job_id}", params=params)
    click.echo(json.dumps(response.json(), indent=2, sort_keys=True))


@main.command()
@click.option("--url", default=DEFAULT_URL, show_default=True, envvar="QMUX_URL")
def queue(url):
    """Show jobs waiting for dispatch, in FIFO order."""
    entries = _request("GET", f"{url}/queue").json()
    if not entries:
        click.echo("queue is empty")
        return
    for entry in entries:
        click.echo(
            f"{entry['position']:>3}  {entry['job_id']}  "
            f"{entry['width']}q  {entry['name'] or '-'}"
        )


@main.command()
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True, file_okay=False),
              default="circuits", show_default=True)
@click.option("--capacity", type=int, default=16, show_default=True)
@click.option("--shots", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default="bench-report.csv",
              show_default=True)
@click.option("--depolarizing", type=float, default=0.0, show_default=True,
              help="per-gate Pauli probability on the packed run only")
@click.option("--readout-flip", type=float, default=0.0, show_default=True,
              help="per-bit readout flip probability on the packed run only")
@click.option("--parallel", is_flag=True, help="run the individual executions concurrently")
def bench(corpus_dir, capacity, shots, seed, output, depolarizing, readout_flip, parallel):
    """Run the corpus individually and packed; write the distance CSV."""
    noise = None
    if depolarizing > 0.0 or readout_flip > 0.0:
        noise = NoiseConfig(depolarizing_prob=depolarizing, readout_flip_prob=readout_flip)
    try:
        result = run_bench(
            BenchConfig(
                corpus_dir=Path(corpus_dir),
                capacity=capacity,
                shots=shots,
                seed=seed,
                noise=noise,
                output=Path(output),
                parallel=parallel,
            )
        )
    except (ParseError, ValidationError) as exc:
        click.echo(f"bench failed: {exc}", err=True)
        sys.exit(1)
    report = result.report
    click.echo(f"packed {sum(len(b) for b in result.batches)} circuits "
               f"into {result.num_batches} batch(es):")
    for i, batch in enumerate(result.batches):
        click.echo(f"  batch {i}: {', '.join(batch)}")
    for row in report.per_job:
        click.echo(
            f"  {row.name:<12} {row.width}q  hellinger={row.hellinger:.4f}  "
            f"wasserstein={row.wasserstein:.4f}"
        )
    click.echo(
        f"mean hellinger {report.mean_hellinger_pct:.2f}%  "
        f"mean wasserstein {report.mean_wasserstein_pct:.2f}%"
    )
    click.echo(f"report written to {result.output}")


if __name__ == "__main__":
    main()
