"""Service configuration: defaults <- JSON file <- QMUX_* environment.

The file is flat JSON (scheduler knobs at top level); every key has an
environment override named QMUX_<KEY> so containerized runs need no file.
Example file:

    {
      "capacity": 127,
      "cycle_duration": 5.0,
      "composed_shots": 10000,
      "backend": "statevector",
      "host": "127.0.0.1",
      "port": 8765,
      "journal": "qmux-journal.jsonl",
      "max_qubits": 24,
      "noise": {"depolarizing_prob": 0.0, "readout_flip_prob": 0.0},
      "result_ttl": null,
      "serial_dispatch": false
    }
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .backend import DEFAULT_MAX_QUBITS, NoiseConfig
from .errors import ValidationError
from .scheduler import SchedulerConfig

DEFAULT_JOURNAL = "qmux-journal.jsonl"


@dataclass(frozen=True)
class ServiceConfig:
    scheduler: SchedulerConfig = field(default_factory=SchedulerConfig)
    host: str = "127.0.0.1"
    port: int = 8765
    journal: Optional[str] = DEFAULT_JOURNAL
    max_qubits: int = DEFAULT_MAX_QUBITS
    noise: Optional[NoiseConfig] = None
    result_ttl: Optional[float] = None
    serial_dispatch: bool = False


def _as_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"expected a boolean, got {raw!r}")


def load_config(
    path: Optional[str] = None, env: Optional[Mapping[str, str]] = None
) -> ServiceConfig:
    """Merge defaults, an optional JSON file, and QMUX_* env overrides."""
    env = os.environ if env is None else env
    values: dict = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            try:
                loaded = json.load(fh)
            except json.JSONDecodeError as e:
                raise ValidationError(f"config file {path}: {e}") from e
        if not isinstance(loaded, dict):
            raise ValidationError(f"config file {path}: expected a JSON object")
        values.update(loaded)

    def override(key: str, parse):
        raw = env.get(f"QMUX_{key.upper()}")
        if raw is not None:
            values[key] = parse(raw)

    override("capacity", int)
    override("cycle_duration", float)
    override("composed_shots", int)
    override("backend", str)
    override("host", str)
    override("port", int)
    override("journal", lambda raw: None if raw in ("", "none") else raw)
    override("max_qubits", int)
    override("result_ttl", lambda raw: None if raw in ("", "none") else float(raw))
    override("serial_dispatch", _as_bool)
    override("depolarizing_prob", float)
    override("readout_flip_prob", float)

    noise = None
    if isinstance(values.get("noise"), Mapping):
        noise = NoiseConfig.from_dict(values["noise"])
    if "depolarizing_prob" in values or "readout_flip_prob" in values:
        base = noise or NoiseConfig()
        noise = NoiseConfig(
            depolarizing_prob=float(values.get("depolarizing_prob", base.depolarizing_prob)),
            readout_flip_prob=float(values.get("readout_flip_prob", base.readout_flip_prob)),
        )

    scheduler = SchedulerConfig(
        capacity=int(values.get("capacity", 127)),
        cycle_duration=float(values.get("cycle_duration", 5.0)),
        composed_shots=int(values.get("composed_shots", 10000)),
        backend=str(values.get("backend", "statevector")),
    )
    ttl = values.get("result_ttl")
    return ServiceConfig(
        scheduler=scheduler,
        host=str(values.get("host", "127.0.0.1")),
        port=int(values.get("port", 8765)),
        journal=values.get("journal", DEFAULT_JOURNAL),
        max_qubits=int(values.get("max_qubits", DEFAULT_MAX_QUBITS)),
        noise=noise,
        result_ttl=None if ttl is None else float(ttl),
        serial_dispatch=bool(values.get("serial_dispatch", False)),
    )
