import json
from urllib.parse import quote

import pytest
from fastapi.testclient import TestClient

from conftest import FakeClock
from qmux.backend import SimulatorBackend
from qmux.config import ServiceConfig
from qmux.journal import Journal
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

QUIRK_BELL_URL = "https://algassert.com/quirk#circuit=" + quote(
    json.dumps({"cols": [["H"], ["•", "X"]]})
)


def make_client(tmp_path=None, capacity=16, journal=None, clock=None, **svc_kw):
    scheduler_config = SchedulerConfig(capacity=capacity, composed_shots=1000)
    sched = Scheduler(
        scheduler_config,
        SimulatorBackend(),
        journal=journal,
        clock=clock or __import__("time").time,
        seed=0,
    )
    config = ServiceConfig(scheduler=scheduler_config, **svc_kw)
    app = create_app(config, scheduler=sched, run_dispatch_loop=False)
    return TestClient(app), sched


def submit(client, payload=BELL_QASM, fmt="qasm", shots=100):
    return client.post(
        "/circuits", json={"format": fmt, "payload": payload, "shots": shots}
    )


class TestSubmit:
    def test_qasm_happy_path(self, tmp_path):
        client, sched = make_client(tmp_path)
        with client:
            resp = submit(client)
            assert resp.status_code == 201
            job_id = resp.json()["job_id"]
            assert client.get(f"/results/{job_id}").json()["status"] == "QUEUED"

    def test_quirk_url(self):
        client, sched = make_client()
        with client:
            resp = submit(client, payload=QUIRK_BELL_URL, fmt="quirk")
            assert resp.status_code == 201
            job = sched.get(resp.json()["job_id"])
            assert job.width == 2

    def test_unmeasured_submission_gets_measures(self):
        client, sched = make_client()
        with client:
            qasm = 'OPENQASM 2.0;\nqreg q[2];\ncreg c[2];\nh q[0];\n'
            job_id = submit(client, payload=qasm).json()["job_id"]
            assert sched.get(job_id).circuit.has_measurements()

    def test_parse_error_carries_position(self):
        client, _ = make_client()
        with client:
            resp = submit(client, payload="OPENQASM 2.0;\nqreg q[1];\nnope q[0];\n")
            assert resp.status_code == 400
            body = resp.json()
            assert body["code"] == "parse_error"
            assert body["detail"]["line"] == 3

    def test_too_wide_reports_capacity(self):
        client, _ = make_client(capacity=3)
        with client:
            qasm = "OPENQASM 2.0;\nqreg q[5];\ncreg c[5];\nh q[0];\n"
            resp = submit(client, payload=qasm)
            assert resp.status_code == 422
            body = resp.json()
            assert body["code"] == "too_wide"
            assert body["detail"] == {"width": 5, "capacity": 3}

    def test_malformed_body_is_400(self):
        client, _ = make_client()
        with client:
            resp = client.post("/circuits", json={"format": "qasm", "shots": 10})
            assert resp.status_code == 400
            assert resp.json()["code"] == "invalid_request"

    def test_zero_shots_rejected(self):
        client, _ = make_client()
        with client:
            assert submit(client, shots=0).status_code == 400


class TestResults:
    def test_unknown_id_is_404(self):
        client, _ = make_client()
        with client:
            resp = client.get("/results/deadbeef")
            assert resp.status_code == 404
            assert resp.json()["code"] == "not_found"

    def test_full_lifecycle(self, fake_clock):
        client, sched = make_client(clock=fake_clock)
        with client:
            job_id = submit(client, shots=100).json()["job_id"]
            assert client.get(f"/results/{job_id}").json()["status"] == "QUEUED"

            fake_clock.advance(5)
            decision = sched.run_cycle()  # arrival cycle -> WAIT
            assert not decision.is_dispatch
            fake_clock.advance(5)
            decision = sched.run_cycle()
            view = client.get(f"/results/{job_id}").json()
            assert view["status"] == "SCHEDULED"
            assert view["batch_id"] == decision.batch.batch_id
            assert view["dispatched_at"] == fake_clock.now

            sched.execute_batch(decision.batch)
            view = client.get(f"/results/{job_id}").json()
            assert view["status"] == "DONE"
            assert view["shots"] == 1000  # composed shots, not requested
            assert sum(view["counts"].values()) == 1000
            assert set(view["counts"]) <= {"00", "11"}

    def test_downsampling_flag(self, fake_clock):
        client, sched = make_client(clock=fake_clock)
        with client:
            job_id = submit(client, shots=64).json()["job_id"]
            fake_clock.advance(5)
            sched.run_cycle()
            fake_clock.advance(5)
            sched.execute_batch(sched.run_cycle().batch)

            full = client.get(f"/results/{job_id}").json()
            assert full["shots"] == 1000
            trimmed = client.get(f"/results/{job_id}", params={"shots": "requested"}).json()
            assert trimmed["shots"] == 64
            assert sum(trimmed["counts"].values()) == 64
            again = client.get(f"/results/{job_id}", params={"shots": "requested"}).json()
            assert again["counts"] == trimmed["counts"]  # deterministic

    def test_unsupported_shots_value(self):
        client, _ = make_client()
        with client:
            job_id = submit(client).json()["job_id"]
            resp = client.get(f"/results/{job_id}", params={"shots": "12"})
            assert resp.status_code == 400

    def test_failed_job_reports_error(self, fake_clock):
        client, sched = make_client(clock=fake_clock)

        def explode(circuit, shots, seed=None):
            raise RuntimeError("backend offline")

        sched.backend.execute = explode
        with client:
            job_id = submit(client).json()["job_id"]
            fake_clock.advance(5)
            sched.run_cycle()
            fake_clock.advance(5)
            sched.execute_batch(sched.run_cycle().batch)
            view = client.get(f"/results/{job_id}").json()
            assert view["status"] == "FAILED"
            assert "backend offline" in view["error"]
            assert "counts" not in view


class TestQueueAndBackends:
    def test_empty_queue(self):
        client, _ = make_client()
        with client:
            assert client.get("/queue").json() == []

    def test_fifo_order_with_positions(self):
        client, _ = make_client()
        with client:
            first = submit(client).json()["job_id"]
            second = submit(client).json()["job_id"]
            rows = client.get("/queue").json()
            assert [(r["position"], r["job_id"]) for r in rows] == [
                (0, first),
                (1, second),
            ]

    def test_default_backend_descriptor(self):
        config = ServiceConfig(journal=None)
        app = create_app(config, run_dispatch_loop=False)
        with TestClient(app) as client:
            rows = client.get("/backends").json()
            assert len(rows) == 1
            assert rows[0]["max_qubits"] == 24
            assert rows[0]["name"] == "statevector"

    def test_reads_do_not_mutate(self):
        client, sched = make_client()
        with client:
            submit(client)
            before = sched.queue_snapshot()
            for _ in range(3):
                client.get("/queue")
                client.get("/backends")
            assert sched.queue_snapshot() == before


class TestDurability:
    def test_acknowledged_submission_survives_crash(self, tmp_path, fake_clock):
        path = tmp_path / "journal.jsonl"
        client, sched = make_client(journal=Journal(path), clock=fake_clock)
        with client:
            job_id = submit(client).json()["job_id"]
        # no clean shutdown beyond closing the file handle: replay from disk
        reborn = Scheduler(
            SchedulerConfig(capacity=16, composed_shots=1000),
            SimulatorBackend(),
            journal=Journal(path),
            clock=fake_clock,
            seed=0,
        )
        app = create_app(ServiceConfig(), scheduler=reborn, run_dispatch_loop=False)
        with TestClient(app) as client2:
            view = client2.get(f"/results/{job_id}").json()
            assert view["status"] == "QUEUED"
            assert client2.get("/queue").json()[0]["job_id"] == job_id

    def test_in_flight_rolls_back_on_replay(self, tmp_path, fake_clock):
        path = tmp_path / "journal.jsonl"
        client, sched = make_client(journal=Journal(path), clock=fake_clock)
        with client:
            job_id = submit(client).json()["job_id"]
            fake_clock.advance(5)
            sched.run_cycle()
            fake_clock.advance(5)
            assert sched.run_cycle().is_dispatch  # crash before execution

        reborn = Scheduler(
            SchedulerConfig(capacity=16, composed_shots=1000),
            SimulatorBackend(),
            journal=Journal(path),
            clock=fake_clock,
            seed=0,
        )
        assert reborn.get(job_id).status.value == "QUEUED"
        redo = reborn.run_cycle()
        assert redo.is_dispatch
        reborn.execute_batch(redo.batch)
        assert reborn.get(job_id).status.value == "DONE"


def test_dispatch_loop_runs_inside_the_app():
    scheduler_config = SchedulerConfig(capacity=16, cycle_duration=0.02, composed_shots=200)
    sched = Scheduler(scheduler_config, SimulatorBackend(), seed=0)
    app = create_app(ServiceConfig(scheduler=scheduler_config), scheduler=sched)
    import time

    with TestClient(app) as client:
        job_id = submit(client).json()["job_id"]
        deadline = time.time() + 5.0
        while True:
            view = client.get(f"/results/{job_id}").json()
            if view["status"] == "DONE":
                assert sum(view["counts"].values()) == 200
                break
            assert time.time() < deadline, f"stuck at {view['status']}"
            time.sleep(0.02)
