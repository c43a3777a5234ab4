"""Neyman-Pearson and RDT sum tests with their analytic performance.

Both tests only look at ``sum(y)``:

* NP   rejects when ``sum(y) > sqrt(n) * phi_inv(1 - gamma)``
* RDT  rejects when ``|sum(y)| > sqrt(n) * lam(gamma, tau * sqrt(n))``

Ties decide 0.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .gaussian import phi_inv, phi_sf, q_half, rdt_threshold

__all__ = [
    "TestKind",
    "TestSpec",
    "SelectivityDescriptor",
    "InvarianceReport",
    "cached_rdt_threshold",
    "np_decide",
    "rdt_decide",
    "decide",
    "decide_sums",
    "np_power_exact",
    "rdt_power_lower_bound",
    "selectivity_of",
    "check_invariance_and_integration",
]


class TestKind(str, enum.Enum):
    NP = "NP"
    RDT = "RDT"

    __test__ = False  # not a pytest class


_threshold_cache: dict[tuple[float, float], float] = {}
_threshold_lock = threading.Lock()


def cached_rdt_threshold(gamma: float, a: float) -> float:
    """:func:`~mpdetect.gaussian.rdt_threshold` memoised per ``(gamma, a)``.

    The lock is held across the computation so each key is solved once.
    """
    key = (float(gamma), float(a))
    value = _threshold_cache.get(key)
    if value is not None:
        return value
    with _threshold_lock:
        value = _threshold_cache.get(key)
        if value is None:
            value = rdt_threshold(*key)
            _threshold_cache[key] = value
    return value


@dataclass(frozen=True)
class TestSpec:
    """One parameterised detector.

    ``force_threshold`` replaces the computed sum threshold; it exists for
    diagnostics (``-inf`` gives an always-reject test).
    """

    __test__ = False

    kind: TestKind
    n: int
    gamma: float
    tau: float | None = None
    force_threshold: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", TestKind(self.kind))
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not (0.0 < self.gamma < 1.0):
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma!r}")
        if self.kind is TestKind.NP:
            if self.tau is not None:
                raise ValueError("NP tests take no tau")
        else:
            if self.tau is None or not (0.0 <= self.tau < 0.5):
                raise ValueError(f"RDT tau must lie in [0, 1/2), got {self.tau!r}")

    @classmethod
    def np(cls, n: int, gamma: float) -> "TestSpec":
        return cls(TestKind.NP, n, gamma)

    @classmethod
    def rdt(cls, n: int, gamma: float, tau: float) -> "TestSpec":
        return cls(TestKind.RDT, n, gamma, tau)

    @property
    def unit_threshold(self) -> float:
        """Threshold on ``sum(y) / sqrt(n)``: ``phi_inv(1-gamma)`` or ``lam``."""
        if self.kind is TestKind.NP:
            return phi_inv(1.0 - self.gamma)
        return cached_rdt_threshold(self.gamma, self.tau * math.sqrt(self.n))

    @property
    def threshold(self) -> float:
        """Threshold applied to the (absolute) sum of the observations."""
        if self.force_threshold is not None:
            return self.force_threshold
        return math.sqrt(self.n) * self.unit_threshold

    def label(self) -> str:
        if self.kind is TestKind.NP:
            return f"NP({self.n})"
        return f"RDT({self.n},{self.tau:g})"


def _as_observation(spec: TestSpec, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != spec.n:
        raise ValueError(f"expected a vector of length {spec.n}, got shape {y.shape}")
    return y


def decide_sums(spec: TestSpec, sums) -> np.ndarray:
    """Vectorised decision from precomputed sums; returns a boolean array."""
    sums = np.asarray(sums, dtype=float)
    if spec.kind is TestKind.NP:
        return sums > spec.threshold
    return np.abs(sums) > spec.threshold


def np_decide(spec: TestSpec, y) -> int:
    if spec.kind is not TestKind.NP:
        raise ValueError("np_decide needs an NP spec")
    y = _as_observation(spec, y)
    return int(math.fsum(y) > spec.threshold)


def rdt_decide(spec: TestSpec, y) -> int:
    """Return 1 when ``|sum(y)| > sqrt(n) * lambda`` and 0 otherwise.

    Large absolute sums signal a mean beyond the tolerated shift ``tau``, so
    the test rejects (decides 1) above the threshold, never below it.
    """
    if spec.kind is not TestKind.RDT:
        raise ValueError("rdt_decide needs an RDT spec")
    y = _as_observation(spec, y)
    return int(abs(math.fsum(y)) > spec.threshold)


def decide(spec: TestSpec, y) -> int:
    if spec.kind is TestKind.NP:
        return np_decide(spec, y)
    return rdt_decide(spec, y)


def np_power_exact(gamma: float, n: int) -> float:
    """Detection probability of the NP test with no interference,
    ``1 - phi(phi_inv(1 - gamma) - sqrt(n))``."""
    if not (0.0 < gamma < 1.0):
        raise ValueError(f"gamma must lie in (0, 1), got {gamma!r}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    return phi_sf(phi_inv(1.0 - gamma) - math.sqrt(n))


def rdt_power_lower_bound(gamma: float, tau: float, q: float, n: int) -> float:
    """Guaranteed detection probability of ``RDT(n, tau)`` for any
    interference bounded by ``q``: ``q_half((1 - q) sqrt(n), lam(tau sqrt(n)))``.
    """
    if not (0.0 <= tau < 0.5):
        raise ValueError(f"tau must lie in [0, 1/2), got {tau!r}")
    if not (0.0 <= q <= tau):
        raise ValueError(f"need 0 <= q <= tau, got q={q!r}, tau={tau!r}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    root_n = math.sqrt(n)
    lam = cached_rdt_threshold(gamma, tau * root_n)
    return q_half((1.0 - q) * root_n, lam)


@dataclass(frozen=True)
class SelectivityDescriptor:
    """Set of interference bounds ``q`` under which a test keeps its level.

    Either ``{0}`` (``kind="singleton_zero"``) or ``[0, upper]``. Equality is
    extensional, so ``[0, 0] == {0}``.
    """

    kind: str
    upper: float | None = None

    def __post_init__(self):
        if self.kind == "singleton_zero":
            if self.upper not in (None, 0.0):
                raise ValueError("singleton selectivity has no upper bound")
        elif self.kind == "closed_interval":
            if self.upper is None or not (0.0 <= self.upper < 0.5):
                raise ValueError(f"interval upper must lie in [0, 1/2), got {self.upper!r}")
        else:
            raise ValueError(f"unknown selectivity kind {self.kind!r}")

    @property
    def bounds(self) -> tuple[float, float]:
        return (0.0, self.upper if self.kind == "closed_interval" else 0.0)

    def __contains__(self, q: float) -> bool:
        lo, hi = self.bounds
        return lo <= q <= hi

    def __eq__(self, other):
        if not isinstance(other, SelectivityDescriptor):
            return NotImplemented
        return self.bounds == other.bounds

    def __hash__(self):
        return hash(self.bounds)

    def __str__(self):
        if self.kind == "singleton_zero":
            return "{0}"
        return f"[0, {self.upper:g}]"


def selectivity_of(spec: TestSpec) -> SelectivityDescriptor:
    if spec.kind is TestKind.NP:
        return SelectivityDescriptor("singleton_zero")
    return SelectivityDescriptor("closed_interval", spec.tau)


class InvarianceReport(NamedTuple):
    sign_invariant: int
    integrator: int


def check_invariance_and_integration(spec: TestSpec, y) -> InvarianceReport:
    """Compare ``decide(y)`` against ``decide(-y)`` and against the decision on
    the constant vector of means."""
    y = _as_observation(spec, y)
    d = decide(spec, y)
    flipped = decide(spec, -y)
    averaged = decide(spec, np.full(spec.n, y.mean()))
    return InvarianceReport(int(d == flipped), int(d == averaged))
