"""Measured-count distributions and the per-job demultiplexing step.

A combined circuit yields one counts histogram over wide bitstrings; each
job's own histogram is recovered by slicing every key down to the job's
classical-bit window and re-aggregating. Bit order follows the package
convention: character i of a key is clbit i.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .composer import Placement
from .errors import InvalidShotsError, LengthMismatchError, ValidationError


@dataclass(frozen=True)
class CountsDistribution:
    """Histogram of measured bitstrings; integer counts, never normalized."""

    num_bits: int
    counts: Mapping[str, int]
    total_shots: int

    def __post_init__(self):
        object.__setattr__(self, "counts", dict(self.counts))
        for key, n in self.counts.items():
            if len(key) != self.num_bits or any(ch not in "01" for ch in key):
                raise ValidationError(f"bad key {key!r} for {self.num_bits}-bit distribution")
            if n < 0:
                raise ValidationError(f"negative count for {key!r}")
        if sum(self.counts.values()) != self.total_shots:
            raise ValidationError("counts do not sum to total_shots")

    @classmethod
    def from_counts(cls, counts: Mapping[str, int], num_bits: int | None = None) -> "CountsDistribution":
        if num_bits is None:
            if not counts:
                raise ValidationError("cannot infer num_bits from empty counts")
            num_bits = len(next(iter(counts)))
        return cls(num_bits, dict(counts), sum(counts.values()))

    def probabilities(self) -> dict[str, float]:
        """Relative frequencies; requires at least one shot."""
        if self.total_shots == 0:
            raise ValidationError("empty distribution has no frequencies")
        return {k: n / self.total_shots for k, n in self.counts.items() if n}

    def to_dict(self) -> dict:
        return {"num_bits": self.num_bits, "counts": dict(self.counts), "total_shots": self.total_shots}

    @classmethod
    def from_dict(cls, doc: Mapping) -> "CountsDistribution":
        return cls(int(doc["num_bits"]), dict(doc["counts"]), int(doc["total_shots"]))


def slice_key(key: str, placement: Placement) -> str:
    """Substring of ``key`` covering the placement's clbit window."""
    if placement.clbit_offset + placement.clbit_count > len(key):
        raise LengthMismatchError(
            f"key of length {len(key)} is too short for clbit window "
            f"[{placement.clbit_offset}, {placement.clbit_offset + placement.clbit_count})"
        )
    return key[placement.clbit_offset:placement.clbit_offset + placement.clbit_count]


def demux(composed: CountsDistribution, placements: Iterable[Placement]) -> dict[str, CountsDistribution]:
    """Split a combined histogram into per-job histograms, keyed by job id.

    Pure marginalization over each clbit window; every output sums to the
    composed total and counts stay integers.
    """
    placements = list(placements)
    window_total = sum(p.clbit_count for p in placements)
    if window_total != composed.num_bits:
        raise LengthMismatchError(
            f"placements cover {window_total} bits but the composed distribution has {composed.num_bits}"
        )
    out: dict[str, CountsDistribution] = {}
    for p in placements:
        sliced: dict[str, int] = {}
        for key, n in composed.counts.items():
            sub = slice_key(key, p)
            sliced[sub] = sliced.get(sub, 0) + n
        out[p.job_id] = CountsDistribution(p.clbit_count, sliced, composed.total_shots)
    return out


def downsample(dist: CountsDistribution, shots: int, seed=None) -> CountsDistribution:
    """Subsample without replacement down to ``shots`` total.

    Models handing a user only the shots they asked for out of the larger
    combined run: a multivariate hypergeometric draw over the observed
    keys. Returns the input unchanged when it is already small enough.
    """
    if shots < 1:
        raise InvalidShotsError(f"shots must be >= 1, got {shots}")
    if shots >= dist.total_shots:
        return dist
    keys = sorted(dist.counts)
    colors = np.array([dist.counts[k] for k in keys], dtype=np.int64)
    taken = np.random.default_rng(seed).multivariate_hypergeometric(colors, shots)
    counts = {k: int(t) for k, t in zip(keys, taken) if t}
    return CountsDistribution(dist.num_bits, counts, shots)
