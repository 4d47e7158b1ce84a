"""Append-only JSON-lines journal backing the job store.

One event per line, appended with flush+fsync *before* the state change is
acknowledged, so anything a client saw confirmed survives a crash. A crash
mid-write can only damage the final line, which replay therefore tolerates
(and drops); malformed JSON earlier in the file means real corruption and
raises JournalError.

Event vocabulary and fields are documented in docs/journal-format.md. This
module moves event dicts to and from disk; turning events into job state
(including the rollback of in-flight statuses) lives with the scheduler.
"""
from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from typing import Iterable, Optional

from .errors import JournalError

EVENT_KINDS = ("submitted", "scheduled", "running", "done", "failed")


class Journal:
    """Single-writer append log of JSON event dicts."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._fh = None

    def _handle(self):
        if self._fh is None or self._fh.closed:
            self._fh = open(self.path, "a", encoding="utf-8")
        return self._fh

    def append(self, event: dict) -> None:
        """Persist one event durably (flush + fsync) before returning."""
        if event.get("event") not in EVENT_KINDS:
            raise JournalError(f"unknown journal event kind: {event.get('event')!r}")
        line = json.dumps(event, separators=(",", ":"), sort_keys=True)
        with self._lock:
            fh = self._handle()
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def read_events(self) -> list[dict]:
        """All well-formed events; a truncated final line is dropped."""
        if not self.path.exists():
            return []
        with self._lock:
            raw = self.path.read_text(encoding="utf-8")
        events: list[dict] = []
        lines = raw.split("\n")
        # A complete file ends with a newline, so the final split element is
        # empty; anything else is a torn write from a crash.
        complete, tail = lines[:-1], lines[-1]
        for lineno, line in enumerate(complete, start=1):
            if not line.strip():
                continue
            try:
                event = json.loads(line)
            except json.JSONDecodeError as e:
                if lineno == len(complete) and not tail:
                    break  # torn final line without trailing newline content
                raise JournalError(f"corrupt journal line {lineno}: {e}") from e
            if not isinstance(event, dict) or event.get("event") not in EVENT_KINDS:
                raise JournalError(f"corrupt journal line {lineno}: unknown event")
            events.append(event)
        return events

    def rewrite(self, events: Iterable[dict]) -> None:
        """Atomically replace the log (compaction): tmp file + rename."""
        with self._lock:
            if self._fh is not None and not self._fh.closed:
                self._fh.close()
            tmp = self.path.with_suffix(self.path.suffix + ".tmp")
            with open(tmp, "w", encoding="utf-8") as fh:
                for event in events:
                    fh.write(json.dumps(event, separators=(",", ":"), sort_keys=True) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, self.path)

    def close(self) -> None:
        with self._lock:
            if self._fh is not None and not self._fh.closed:
                self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
