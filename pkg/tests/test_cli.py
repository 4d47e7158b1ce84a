import json
import socket
import threading
import time

import pytest
import uvicorn
from click.testing import CliRunner

from qmux.backend import SimulatorBackend
from qmux.cli import main
from qmux.config import ServiceConfig
from qmux.scheduler import Scheduler, SchedulerConfig
from qmux.service import create_app

BELL_QASM = """OPENQASM 2.0;
include "qelib1.inc";
qreg q[2];
creg c[2];
h q[0];
cx q[0],q[1];
measure q[0] -> c[0];
measure q[1] -> c[1];
"""

WIDE_QASM = "OPENQASM 2.0;\nqreg q[5];\ncreg c[5];\nh q[0];\n"


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def start_server(capacity: int, cycle_duration: float):
    """Run the service on a free port in a daemon thread."""
    scheduler_config = SchedulerConfig(
        capacity=capacity, cycle_duration=cycle_duration, composed_shots=400
    )
    sched = Scheduler(scheduler_config, SimulatorBackend(), seed=0)
    app = create_app(
        ServiceConfig(scheduler=scheduler_config, serial_dispatch=True),
        scheduler=sched,
    )
    port = free_port()
    server = uvicorn.Server(
        uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10.0
    while not server.started:
        assert time.time() < deadline, "service did not come up"
        time.sleep(0.01)
    return f"http://127.0.0.1:{port}", server, thread


@pytest.fixture(scope="module")
def fast_url():
    """Server that dispatches almost immediately."""
    url, server, thread = start_server(capacity=4, cycle_duration=0.05)
    yield url
    server.should_exit = True
    thread.join(timeout=10)


@pytest.fixture(scope="module")
def parked_url():
    """Server whose first cycle is hours away: jobs stay QUEUED."""
    url, server, thread = start_server(capacity=4, cycle_duration=3600.0)
    yield url
    server.should_exit = True
    thread.join(timeout=10)


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def bell_file(tmp_path):
    path = tmp_path / "bell.qasm"
    path.write_text(BELL_QASM)
    return str(path)


class TestRoundTrip:
    def test_submit_then_poll_result(self, runner, fast_url, bell_file):
        submitted = runner.invoke(main, ["submit", bell_file, "--url", fast_url])
        assert submitted.exit_code == 0, submitted.output
        job_id = submitted.output.strip()
        assert len(job_id) == 32

        deadline = time.time() + 10.0
        while True:
            fetched = runner.invoke(main, ["result", job_id, "--url", fast_url])
            assert fetched.exit_code == 0, fetched.output
            view = json.loads(fetched.output)
            if view["status"] == "DONE":
                assert sum(view["counts"].values()) == 400
                break
            assert time.time() < deadline, f"stuck at {view['status']}"
            time.sleep(0.05)

    def test_requested_shots_flag(self, runner, fast_url, bell_file):
        job_id = runner.invoke(
            main, ["submit", bell_file, "--shots", "32", "--url", fast_url]
        ).output.strip()
        deadline = time.time() + 10.0
        while True:
            fetched = runner.invoke(
                main, ["result", job_id, "--requested-shots", "--url", fast_url]
            )
            view = json.loads(fetched.output)
            if view["status"] == "DONE":
                assert view["shots"] == 32
                break
            assert time.time() < deadline
            time.sleep(0.05)


class TestQueue:
    def test_empty_queue(self, runner, fast_url):
        result = runner.invoke(main, ["queue", "--url", fast_url])
        assert result.exit_code == 0

    def test_waiting_jobs_listed_in_order(self, runner, parked_url, bell_file):
        first = runner.invoke(main, ["submit", bell_file, "--url", parked_url]).output.strip()
        second = runner.invoke(main, ["submit", bell_file, "--url", parked_url]).output.strip()
        listing = runner.invoke(main, ["queue", "--url", parked_url])
        assert listing.exit_code == 0
        lines = listing.output.strip().splitlines()
        assert first in lines[0] and "2q" in lines[0]
        assert second in lines[1]


class TestErrors:
    def test_too_wide_is_exit_1_with_detail(self, runner, parked_url, tmp_path):
        path = tmp_path / "wide.qasm"
        path.write_text(WIDE_QASM)
        result = runner.invoke(main, ["submit", str(path), "--url", parked_url])
        assert result.exit_code == 1
        assert "422" in result.stderr
        assert "too_wide" in result.stderr

    def test_unknown_job_id_is_exit_1(self, runner, fast_url):
        result = runner.invoke(main, ["result", "f" * 32, "--url", fast_url])
        assert result.exit_code == 1
        assert "404" in result.stderr

    def test_unreachable_server_is_exit_2(self, runner):
        nowhere = f"http://127.0.0.1:{free_port()}"
        result = runner.invoke(main, ["queue", "--url", nowhere])
        assert result.exit_code == 2
        assert "cannot reach" in result.stderr


class TestBenchCommand:
    def test_bench_writes_csv(self, runner, tmp_path):
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        (corpus / "bell.qasm").write_text(BELL_QASM)
        (corpus / "flip.qasm").write_text(
            "OPENQASM 2.0;\nqreg q[1];\ncreg c[1];\nx q[0];\nmeasure q[0] -> c[0];\n"
        )
        out = tmp_path / "report.csv"
        result = runner.invoke(
            main,
            ["bench", "--corpus", str(corpus), "--capacity", "3", "--shots", "2000",
             "--seed", "7", "-o", str(out)],
        )
        assert result.exit_code == 0, result.output
        assert "mean hellinger" in result.output
        assert "batch" in result.output
        lines = out.read_text().splitlines()
        assert lines[1] == "job_id,name,width,shots,hellinger,wasserstein"
        assert len(lines) == 5  # comment + header + 2 jobs + mean

    def test_empty_corpus_fails_without_output(self, runner, tmp_path):
        corpus = tmp_path / "empty"
        corpus.mkdir()
        out = tmp_path / "report.csv"
        result = runner.invoke(
            main, ["bench", "--corpus", str(corpus), "-o", str(out)]
        )
        assert result.exit_code == 1
        assert "bench failed" in result.stderr
        assert not out.exists()

    def test_unparseable_corpus_file_names_it(self, runner, tmp_path):
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        (corpus / "broken.qasm").write_text("OPENQASM 2.0;\nqreg q[1];\nzz q[0];\n")
        result = runner.invoke(main, ["bench", "--corpus", str(corpus)])
        assert result.exit_code == 1
        assert "broken.qasm" in result.stderr
