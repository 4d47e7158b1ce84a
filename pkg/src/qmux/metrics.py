"""Distribution distances used to judge packed against individual execution.

Two metrics, both in [0, 1]:

* Hellinger: sqrt(1 - sum_k sqrt(p_k * q_k)) over the union of observed
  keys, with counts normalized to frequencies. Zero-count keys are ignored;
  no smoothing is applied.
* Normalized Wasserstein: outcomes are embedded as integers by reading the
  bitstring with clbit 0 as the most significant character (the package-wide
  key order), W1 = sum_k |CDF_P(k) - CDF_Q(k)| is computed over that range,
  and the result is divided by 2**n - 1 so it lands in [0, 1]. The embedding
  is stated in the CSV header comment since distances depend on it.

Report means are plain arithmetic averages; the *_pct fields are the same
values times 100.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .counts import CountsDistribution
from .errors import EmptyDistributionError, WidthMismatchError

_CSV_COMMENT = (
    "# hellinger over union support; wasserstein via integer embedding"
    " (clbit 0 = most significant bit), W1 / (2^n - 1); mean row = arithmetic mean"
)
CSV_COLUMNS = ("job_id", "name", "width", "shots", "hellinger", "wasserstein")


def hellinger_probs(p: Mapping[str, float], q: Mapping[str, float]) -> float:
    """Hellinger distance between two probability mappings (union support)."""
    bc = 0.0
    for key in set(p) | set(q):
        bc += math.sqrt(p.get(key, 0.0) * q.get(key, 0.0))
    # Bhattacharyya coefficients can exceed 1 by float dust for p == q.
    return math.sqrt(max(0.0, 1.0 - min(bc, 1.0)))


def _frequencies(dist: CountsDistribution, side: str) -> dict[str, float]:
    if dist.total_shots < 1:
        raise EmptyDistributionError(f"{side} distribution has no shots")
    total = dist.total_shots
    return {k: c / total for k, c in dist.counts.items() if c}


def _check_widths(p: CountsDistribution, q: CountsDistribution) -> None:
    if p.num_bits != q.num_bits:
        raise WidthMismatchError(
            f"distributions are over different widths: {p.num_bits} vs {q.num_bits} bits"
        )


def hellinger(p: CountsDistribution, q: CountsDistribution) -> float:
    _check_widths(p, q)
    return hellinger_probs(_frequencies(p, "first"), _frequencies(q, "second"))


def wasserstein_normalized(p: CountsDistribution, q: CountsDistribution) -> float:
    """W1 between integer-embedded outcome distributions, scaled to [0, 1]."""
    _check_widths(p, q)
    n = p.num_bits
    if n == 0:
        raise WidthMismatchError("wasserstein distance is undefined for 0-bit distributions")
    fp = _frequencies(p, "first")
    fq = _frequencies(q, "second")
    points = sorted({int(k, 2) for k in fp} | {int(k, 2) for k in fq})
    deltas = {}
    for k, f in fp.items():
        deltas[int(k, 2)] = deltas.get(int(k, 2), 0.0) + f
    for k, f in fq.items():
        deltas[int(k, 2)] = deltas.get(int(k, 2), 0.0) - f
    # CDF difference is a step function changing only at support points, so
    # walk those and weight each gap by its length.
    total = 0.0
    diff = 0.0
    for i, point in enumerate(points):
        diff += deltas[point]
        span = (points[i + 1] if i + 1 < len(points) else point) - point
        total += abs(diff) * span
    return total / ((1 << n) - 1)


@dataclass(frozen=True)
class JobDistance:
    job_id: str
    name: str
    width: int
    shots: int
    hellinger: float
    wasserstein: float


@dataclass(frozen=True)
class DistanceReport:
    per_job: tuple[JobDistance, ...]
    mean_hellinger_pct: float
    mean_wasserstein_pct: float

    @property
    def mean_hellinger(self) -> float:
        return self.mean_hellinger_pct / 100.0

    @property
    def mean_wasserstein(self) -> float:
        return self.mean_wasserstein_pct / 100.0

    def to_dict(self) -> dict:
        return {
            "per_job": [vars(j) | {} for j in self.per_job],
            "mean_hellinger_pct": self.mean_hellinger_pct,
            "mean_wasserstein_pct": self.mean_wasserstein_pct,
        }


def compare_runs(pairs: Sequence[tuple]) -> DistanceReport:
    """Per-job distances between individual and packed-run results.

    Each pair is (job, individual, scheduled) where job exposes job_id,
    name and width. Errors from a bad pair are re-raised tagged with the
    offending job id.
    """
    if not pairs:
        raise EmptyDistributionError("no result pairs to compare")
    rows = []
    for job, individual, scheduled in pairs:
        try:
            h = hellinger(individual, scheduled)
            w = wasserstein_normalized(individual, scheduled)
        except (WidthMismatchError, EmptyDistributionError) as e:
            raise type(e)(f"job {job.job_id}: {e}") from e
        rows.append(
            JobDistance(
                job_id=job.job_id,
                name=job.name,
                width=job.width,
                shots=scheduled.total_shots,
                hellinger=h,
                wasserstein=w,
            )
        )
    mean_h = sum(r.hellinger for r in rows) / len(rows)
    mean_w = sum(r.wasserstein for r in rows) / len(rows)
    return DistanceReport(tuple(rows), mean_h * 100.0, mean_w * 100.0)


def write_csv(report: DistanceReport, path) -> None:
    """Write the report as CSV: one row per job plus a trailing mean row."""
    with open(path, "w", newline="") as fh:
        fh.write(_CSV_COMMENT + "\n")
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in report.per_job:
            writer.writerow(
                [row.job_id, row.name, row.width, row.shots,
                 repr(row.hellinger), repr(row.wasserstein)]
            )
        writer.writerow(
            ["mean", "", "", "",
             repr(report.mean_hellinger), repr(report.mean_wasserstein)]
        )
