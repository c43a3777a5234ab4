"""Observation generator ``y_i = epsilon + delta_i + x_i``.

Noise ``x_i`` is i.i.d. standard normal, interference ``delta_i`` is bounded by
``q``. Every random number is addressed by ``(seed, stream, trial, coordinate)``
through a Philox counter: coordinate ``i`` of trial ``t`` is raw output
``t * n + i`` of the Philox stream keyed by ``(seed, stream)``. Any block of
trials can therefore be produced independently, in any order, on any thread,
with identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gaussian import phi_inv_array

__all__ = [
    "Interference",
    "ObservationSpec",
    "parse_interference",
    "uniform_block",
    "noise_block",
    "interference_block",
    "generate",
    "generate_block",
    "components",
]

NOISE_STREAM = 0
INTERFERENCE_STREAM = 1

_KINDS = ("zero", "constant", "alternating", "iid_uniform", "worst_case_size", "sinusoidal")
_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class Interference:
    """Bounded interference pattern.

    ``amplitude`` is the constant ``c`` for ``constant`` and the peak value for
    ``alternating`` and ``sinusoidal``; ``period`` is used by ``sinusoidal``
    only. ``iid_uniform`` draws on ``[-q, q]`` and ``worst_case_size`` is the
    constant ``+q``.
    """

    kind: str = "zero"
    amplitude: float = 0.0
    period: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown interference kind {self.kind!r}")
        if self.kind in ("alternating", "sinusoidal") and self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")
        if self.kind == "sinusoidal" and not (self.period and self.period > 0):
            raise ValueError("sinusoidal interference needs a positive period")

    def check_bound(self, q: float) -> None:
        if self.kind in ("constant", "alternating", "sinusoidal") and abs(self.amplitude) > q:
            raise ValueError(
                f"{self.kind} amplitude {self.amplitude} exceeds the bound q={q}"
            )

    def token(self) -> str:
        if self.kind == "zero":
            return "zero"
        if self.kind == "constant":
            return f"const:{self.amplitude:g}"
        if self.kind == "alternating":
            return f"alt:{self.amplitude:g}"
        if self.kind == "iid_uniform":
            return "unif"
        if self.kind == "worst_case_size":
            return "worst"
        return f"sin:{self.amplitude:g}:{self.period:g}"


def parse_interference(token: str) -> Interference:
    """Parse ``zero | const:<c> | alt:<a> | unif | worst | sin:<a>:<p>``."""
    parts = token.strip().split(":")
    head, args = parts[0].lower(), parts[1:]
    try:
        if head == "zero" and not args:
            return Interference("zero")
        if head == "unif" and not args:
            return Interference("iid_uniform")
        if head == "worst" and not args:
            return Interference("worst_case_size")
        if head == "const" and len(args) == 1:
            return Interference("constant", float(args[0]))
        if head == "alt" and len(args) == 1:
            return Interference("alternating", float(args[0]))
        if head == "sin" and len(args) == 2:
            return Interference("sinusoidal", float(args[0]), float(args[1]))
    except ValueError as exc:
        raise ValueError(f"bad interference token {token!r}: {exc}") from None
    raise ValueError(f"bad interference token {token!r}")


@dataclass(frozen=True)
class ObservationSpec:
    epsilon: int
    q: float
    n: int
    interference: Interference = field(default_factory=Interference)
    seed: int = 0

    def __post_init__(self):
        if self.epsilon not in (0, 1):
            raise ValueError(f"epsilon must be 0 or 1, got {self.epsilon!r}")
        if not (0.0 <= self.q < 0.5):
            raise ValueError(f"q must lie in [0, 1/2), got {self.q!r}")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not (0 <= self.seed <= _U64):
            raise ValueError("seed must be an unsigned 64-bit integer")
        if isinstance(self.interference, str):
            object.__setattr__(self, "interference", parse_interference(self.interference))
        self.interference.check_bound(self.q)


def uniform_block(seed: int, stream: int, n: int, start: int, count: int) -> np.ndarray:
    """Uniforms in (0, 1) for trials ``start .. start+count-1``, shape ``(count, n)``."""
    first = start * n
    total = count * n
    skip = first % 4
    bg = np.random.Philox(key=np.array([seed, stream], dtype=np.uint64))
    bg.advance(first // 4)
    raw = bg.random_raw(total + skip)[skip:]
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return u.reshape(count, n)


def noise_block(seed: int, n: int, start: int, count: int) -> np.ndarray:
    """Standard normal noise by inverse-CDF transform, shape ``(count, n)``."""
    return phi_inv_array(uniform_block(seed, NOISE_STREAM, n, start, count))


def interference_block(spec: ObservationSpec, start: int, count: int) -> np.ndarray:
    """Interference values for a block of trials, shape ``(count, n)``."""
    kind = spec.interference.kind
    n, q = spec.n, spec.q
    idx = np.arange(1, n + 1)
    if kind == "zero":
        row = np.zeros(n)
    elif kind == "constant":
        row = np.full(n, spec.interference.amplitude)
    elif kind == "worst_case_size":
        row = np.full(n, q)
    elif kind == "alternating":
        a = spec.interference.amplitude
        row = np.where(idx % 2 == 1, a, -a)
    elif kind == "sinusoidal":
        a = spec.interference.amplitude
        row = a * np.sin(2.0 * math.pi * idx / spec.interference.period)
    else:
        u = uniform_block(spec.seed, INTERFERENCE_STREAM, n, start, count)
        return np.clip((2.0 * u - 1.0) * q, -q, q)
    return np.broadcast_to(row, (count, n))


def components(spec: ObservationSpec, trial_index: int) -> tuple[np.ndarray, np.ndarray]:
    """``(delta, x)`` for one trial."""
    delta = np.array(interference_block(spec, trial_index, 1)[0])
    x = noise_block(spec.seed, spec.n, trial_index, 1)[0]
    return delta, x


def generate_block(spec: ObservationSpec, start: int, count: int) -> np.ndarray:
    return spec.epsilon + interference_block(spec, start, count) + noise_block(
        spec.seed, spec.n, start, count
    )


def generate(spec: ObservationSpec, trial_index: int) -> np.ndarray:
    """Observation vector of length ``n`` for one trial."""
    if trial_index < 0:
        raise ValueError("trial_index must be non-negative")
    return generate_block(spec, trial_index, 1)[0]
