"""Monte Carlo estimates of false-alarm and detection probabilities."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .detectors import (
    TestKind,
    TestSpec,
    decide_sums,
    np_power_exact,
    rdt_power_lower_bound,
)
from .observation import Interference, ObservationSpec, generate_block

__all__ = [
    "MCEstimate",
    "SweepRow",
    "wilson_ci",
    "count_rejections",
    "estimate_pfa",
    "estimate_pdet",
    "sweep",
    "rows_to_csv",
    "rows_to_json",
    "SWEEP_COLUMNS",
]

DEFAULT_Z = 3.0
# trials per work unit; fixed by n so the partition never depends on threads
_BLOCK_ELEMENTS = 1 << 19

SWEEP_COLUMNS = ("n", "trials", "pfa", "pfa_lo", "pfa_hi", "pdet", "pdet_lo", "pdet_hi", "reference")


def wilson_ci(successes: int, trials: int, z: float = DEFAULT_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if not (0 <= successes <= trials):
        raise ValueError(f"successes must lie in [0, trials], got {successes}")
    if not z > 0:
        raise ValueError("z must be positive")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return min(lo, p), max(hi, p)


@dataclass(frozen=True)
class MCEstimate:
    p_hat: float
    trials: int
    ci_low: float
    ci_high: float
    seed: int
    z: float
    successes: int

    @classmethod
    def from_counts(cls, successes: int, trials: int, seed: int, z: float = DEFAULT_Z):
        lo, hi = wilson_ci(successes, trials, z)
        return cls(successes / trials, trials, lo, hi, seed, z, successes)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.ci_high - self.ci_low)


def _block_rejections(test: TestSpec, model: ObservationSpec, start: int, count: int) -> int:
    y = generate_block(model, start, count)
    return int(np.count_nonzero(decide_sums(test, y.sum(axis=1))))


def count_rejections(test: TestSpec, model: ObservationSpec, trials: int, threads: int = 1) -> int:
    """Number of trials ``0 .. trials-1`` on which ``test`` rejects."""
    if model.n != test.n:
        raise ValueError(f"model has n={model.n} but test has n={test.n}")
    if trials < 1:
        raise ValueError("trials must be positive")
    test.threshold  # solve the threshold once before fanning out
    block = max(1, _BLOCK_ELEMENTS // test.n)
    starts = range(0, trials, block)
    jobs = [(s, min(block, trials - s)) for s in starts]
    if threads <= 1 or len(jobs) == 1:
        return sum(_block_rejections(test, model, s, c) for s, c in jobs)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        counts = pool.map(lambda job: _block_rejections(test, model, *job), jobs)
        return sum(counts)


def _estimate(test, model, epsilon, trials, z, threads) -> MCEstimate:
    model = replace(model, epsilon=epsilon)
    hits = count_rejections(test, model, trials, threads)
    return MCEstimate.from_counts(hits, trials, model.seed, z)


def estimate_pfa(test: TestSpec, model: ObservationSpec, trials: int,
                 z: float = DEFAULT_Z, threads: int = 1) -> MCEstimate:
    """Empirical false-alarm probability; ``model.epsilon`` is forced to 0."""
    return _estimate(test, model, 0, trials, z, threads)


def estimate_pdet(test: TestSpec, model: ObservationSpec, trials: int,
                  z: float = DEFAULT_Z, threads: int = 1) -> MCEstimate:
    """Empirical detection probability; ``model.epsilon`` is forced to 1."""
    return _estimate(test, model, 1, trials, z, threads)


@dataclass(frozen=True)
class SweepRow:
    n: int
    pfa: MCEstimate
    pdet: MCEstimate
    reference: float

    def record(self) -> dict:
        return {
            "n": self.n,
            "trials": self.pfa.trials,
            "pfa": self.pfa.p_hat,
            "pfa_lo": self.pfa.ci_low,
            "pfa_hi": self.pfa.ci_high,
            "pdet": self.pdet.p_hat,
            "pdet_lo": self.pdet.ci_low,
            "pdet_hi": self.pdet.ci_high,
            "reference": self.reference,
        }


def sweep(family: str, gamma: float, q: float, interference: Interference | str,
          n_list: Iterable[int], trials: int, seed: int = 0, tau: float | None = None,
          z: float = DEFAULT_Z, threads: int = 1) -> list[SweepRow]:
    """Estimate size and power of one test family over a list of sample sizes.

    ``family`` is ``"NP"`` or ``"RDT"`` (the latter needs ``tau``). The
    reference column is the exact NP power or the RDT power lower bound at
    the given ``q``.
    """
    kind = TestKind(family.upper())
    rows = []
    for n in n_list:
        if kind is TestKind.NP:
            test = TestSpec.np(n, gamma)
            reference = np_power_exact(gamma, n)
        else:
            test = TestSpec.rdt(n, gamma, tau)
            reference = rdt_power_lower_bound(gamma, tau, q, n)
        model = ObservationSpec(0, q, n, interference, seed)
        rows.append(SweepRow(
            n,
            estimate_pfa(test, model, trials, z, threads),
            estimate_pdet(test, model, trials, z, threads),
            reference,
        ))
    return rows


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        rec = row.record()
        writer.writerow([_fmt(rec[k]) for k in SWEEP_COLUMNS])
    return buf.getvalue()


def rows_to_json(rows: Sequence[SweepRow]) -> str:
    records = [
        {k: (round(v, 6) if isinstance(v, float) else v) for k, v in row.record().items()}
        for row in rows
    ]
    return json.dumps(records, indent=2) + "\n"
