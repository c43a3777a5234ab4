"""Finite preorders, the preorder form of the Multiplicity Principle, and a
finite abstraction of the NP / RDT landscapes.

Element sets are passed around as iterables of labels and returned as
frozensets of labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .detectors import (
    SelectivityDescriptor,
    TestSpec,
    np_power_exact,
    rdt_power_lower_bound,
    selectivity_of,
)
from .montecarlo import estimate_pdet
from .observation import Interference, ObservationSpec

__all__ = [
    "FinitePreorder",
    "MPVerdict",
    "LandscapeElement",
    "LandscapeAbstraction",
    "upper_bounds",
    "maximal_elements",
    "sup_set",
    "check_mp",
    "build_landscape_abstraction",
    "ORACLE",
]

ORACLE = "oracle"


class FinitePreorder:
    """Reflexive, transitive relation on a list of labelled elements.

    ``leq[i, j]`` is true iff ``labels[i] <= labels[j]``. Both axioms are
    checked on construction.
    """

    def __init__(self, labels: Sequence[str], leq):
        labels = list(labels)
        if len(set(labels)) != len(labels):
            raise ValueError("element labels must be unique")
        leq = np.array(leq, dtype=bool)
        k = len(labels)
        if leq.shape != (k, k):
            raise ValueError(f"relation must be {k}x{k}, got {leq.shape}")
        if not leq.diagonal().all():
            raise ValueError("relation is not reflexive")
        composed = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0
        if np.any(composed & ~leq):
            raise ValueError("relation is not transitive")
        self.labels = labels
        self.leq = leq
        self.leq.flags.writeable = False
        self._index = {lab: i for i, lab in enumerate(labels)}

    @classmethod
    def generated_by(cls, labels: Sequence[str], pairs: Iterable[tuple[str, str]]):
        """Reflexive-transitive closure of the given ``(x, y)`` pairs."""
        labels = list(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        rel = np.eye(len(labels), dtype=bool)
        for x, y in pairs:
            rel[index[x], index[y]] = True
        for k in range(len(labels)):
            rel |= rel[:, [k]] & rel[[k], :]
        return cls(labels, rel)

    def __len__(self):
        return len(self.labels)

    def __contains__(self, label):
        return label in self._index

    def indices(self, subset: Iterable[str]) -> list[int]:
        out = []
        for lab in subset:
            if lab not in self._index:
                raise KeyError(f"unknown element {lab!r}")
            out.append(self._index[lab])
        return out

    def le(self, x: str, y: str) -> bool:
        i, j = self.indices((x, y))
        return bool(self.leq[i, j])

    def _labels_of(self, mask) -> frozenset:
        return frozenset(self.labels[i] for i in np.flatnonzero(mask))


def upper_bounds(P: FinitePreorder, A: Iterable[str]) -> frozenset:
    """``{u : a <= u for every a in A}``."""
    idx = P.indices(A)
    if not idx:
        return frozenset(P.labels)
    return P._labels_of(P.leq[idx, :].all(axis=0))


def maximal_elements(P: FinitePreorder, A: Iterable[str]) -> frozenset:
    """Elements ``m`` of ``A`` such that ``m <= a`` implies ``a <= m`` within ``A``."""
    idx = P.indices(A)
    if not idx:
        return frozenset()
    sub = P.leq[np.ix_(idx, idx)]
    # below[i, j]: element i lies strictly below element j
    below = sub & ~sub.T
    return frozenset(P.labels[idx[i]] for i in range(len(idx)) if not below[i].any())


def sup_set(P: FinitePreorder, A: Iterable[str]) -> frozenset:
    """Least upper bounds: minimal elements of ``upper_bounds(P, A)``."""
    ups = P.indices(upper_bounds(P, A))
    if not ups:
        return frozenset()
    sub = P.leq[np.ix_(ups, ups)]
    above = sub.T & ~sub  # above[i, j]: element i lies strictly above element j
    return frozenset(P.labels[ups[i]] for i in range(len(ups)) if not above[i].any())


@dataclass(frozen=True)
class MPVerdict:
    holds: bool
    witness_same_upper: frozenset = frozenset()
    witness_a: str | None = None
    witness_b: str | None = None
    failure_reason: str | None = None
    lemma_condition: bool = False
    disjoint: bool = False
    cross_relation_empty: bool = False
    upper_a: frozenset = frozenset()
    upper_b: frozenset = frozenset()

    def witnesses(self) -> dict:
        return {
            "same_upper_bounds": sorted(self.witness_same_upper),
            "a_without_upper_bound_in_B": self.witness_a,
            "b_without_upper_bound_in_A": self.witness_b,
            "disjoint": self.disjoint,
            "cross_relation_empty": self.cross_relation_empty,
            "lemma_condition": self.lemma_condition,
        }


def _without_upper_bound_in(P: FinitePreorder, source: list[int], target: list[int]):
    for i in source:
        if not P.leq[i, target].any():
            return P.labels[i]
    return None


def check_mp(P: FinitePreorder, A: Iterable[str], B: Iterable[str]) -> MPVerdict:
    """Test the preorder Multiplicity Principle for the pair ``(A, B)``.

    Holds iff ``A`` and ``B`` are disjoint, share their upper-bound set, some
    ``a`` has no upper bound in ``B`` and some ``b`` has no upper bound in
    ``A``. The verdict also reports the stronger sufficient condition:
    no ``a <= b`` across the pair and equal least-upper-bound sets.
    """
    A = list(dict.fromkeys(A))
    B = list(dict.fromkeys(B))
    ia, ib = P.indices(A), P.indices(B)
    up_a, up_b = upper_bounds(P, A), upper_bounds(P, B)
    disjoint = not (set(A) & set(B))
    cross_empty = not (ia and ib and P.leq[np.ix_(ia, ib)].any())
    lemma = cross_empty and sup_set(P, A) == sup_set(P, B)
    wa = _without_upper_bound_in(P, ia, ib)
    wb = _without_upper_bound_in(P, ib, ia)

    common = dict(lemma_condition=lemma, disjoint=disjoint,
                  cross_relation_empty=cross_empty, upper_a=up_a, upper_b=up_b)
    if not disjoint:
        return MPVerdict(False, failure_reason="not-disjoint", **common)
    if up_a != up_b:
        return MPVerdict(False, failure_reason="different-upper-bounds", **common)
    if wa is None:
        return MPVerdict(False, failure_reason="every a has an upper bound in B", **common)
    if wb is None:
        return MPVerdict(False, failure_reason="every b has an upper bound in A", **common)
    return MPVerdict(True, up_a, wa, wb, None, **common)


@dataclass(frozen=True)
class LandscapeElement:
    """One landscape in the abstraction, or the collapsed oracle element.

    ``power_profile`` maps grid values of ``q`` to detection probabilities;
    ``power_band`` holds the matching confidence intervals in Monte Carlo
    mode and equals the point value in analytic mode.
    """

    label: str
    role: str
    n: int | None
    tau: float | None
    selectivity: SelectivityDescriptor | None
    power_profile: dict = field(default_factory=dict)
    power_band: dict = field(default_factory=dict)

    @property
    def is_oracle(self) -> bool:
        return self.role == ORACLE


@dataclass
class LandscapeAbstraction:
    preorder: FinitePreorder
    np_family: frozenset
    rdt_family: frozenset
    elements: dict
    gamma: float
    tau: float
    n_grid: tuple
    q_grid: tuple
    mode: str
    same_dimension_only: bool = True

    def __iter__(self):
        yield self.preorder
        yield self.np_family
        yield self.rdt_family

    def check(self) -> MPVerdict:
        labels = self.preorder.labels
        return check_mp(self.preorder,
                        [lab for lab in labels if lab in self.np_family],
                        [lab for lab in labels if lab in self.rdt_family])

    @property
    def degenerate(self) -> bool:
        """NP and RDT selectivities coincide when ``tau == 0``."""
        return self.tau == 0.0

    def verdict_record(self, verdict: MPVerdict | None = None) -> dict:
        verdict = verdict or self.check()
        P = self.preorder
        return {
            "holds": verdict.holds,
            "mode": self.mode,
            "gamma": self.gamma,
            "tau": self.tau,
            "n_grid": list(self.n_grid),
            "q_grid": list(self.q_grid),
            "witnesses": verdict.witnesses(),
            "relation_matrix": {
                "labels": list(P.labels),
                "leq": [[int(v) for v in row] for row in P.leq],
            },
            "failure_reason": verdict.failure_reason,
            "degenerate": self.degenerate,
            "same_dimension_only": self.same_dimension_only,
            "note": (
                "finite witness: dominance is evaluated on the q grid only "
                f"({'analytic power values' if self.mode == 'analytic' else 'Monte Carlo estimates under constant -q interference'})"
            ),
        }

    def verdict_json(self, verdict: MPVerdict | None = None) -> str:
        return json.dumps(self.verdict_record(verdict), indent=2) + "\n"


def _dominates(lower: LandscapeElement, upper: LandscapeElement, mode: str) -> bool:
    points = sorted(set(lower.power_profile) & set(upper.power_profile))
    if not points:
        return False
    if mode == "analytic":
        return all(lower.power_profile[q] <= upper.power_profile[q] for q in points)
    # Monte Carlo: intervals must be separated
    return all(lower.power_band[q][1] <= upper.power_band[q][0] for q in points)


def _comparable(x: LandscapeElement, y: LandscapeElement, same_dimension_only: bool) -> bool:
    if x.selectivity != y.selectivity:
        return False
    return not same_dimension_only or x.n == y.n


def build_landscape_abstraction(
    gamma: float,
    tau: float,
    n_grid: Sequence[int],
    q_grid: Sequence[float],
    mode: str = "analytic",
    trials: int = 100_000,
    seed: int = 0,
    threads: int = 1,
    same_dimension_only: bool = True,
) -> LandscapeAbstraction:
    """Finite preorder over ``{NP(n)} + {RDT(n, tau)} + {oracle}``.

    Two landscapes are comparable only when their selectivities are equal
    (and, with ``same_dimension_only``, their tests have the same ``n``); the
    order between comparable ones is pointwise power dominance on the
    applicable ``q`` points: ``q = 0`` for NP, ``q_grid`` restricted to
    ``[0, tau]`` for RDT. Every element lies below the oracle, and the
    oracle lies below nothing else.

    ``mode`` is ``"analytic"`` (exact NP power, RDT lower bound) or ``"mc"``
    (estimated powers with constant ``-q`` interference, the choice that
    pulls the mean furthest toward zero).
    """
    if not (0.0 < gamma < 1.0):
        raise ValueError(f"gamma must lie in (0, 1), got {gamma!r}")
    if not (0.0 <= tau < 0.5):
        raise ValueError(f"tau must lie in [0, 1/2), got {tau!r}")
    n_grid = tuple(int(n) for n in n_grid)
    q_grid = tuple(float(q) for q in q_grid)
    if not n_grid or not q_grid:
        raise ValueError("n_grid and q_grid must be non-empty")
    if len(set(n_grid)) != len(n_grid) or min(n_grid) < 1:
        raise ValueError("n_grid must hold distinct positive integers")
    if any(not (0.0 <= q < 0.5) for q in q_grid):
        raise ValueError("q_grid values must lie in [0, 1/2)")
    rdt_points = tuple(q for q in q_grid if q <= tau)
    if not rdt_points:
        raise ValueError("q_grid must contain a point in [0, tau]")
    if mode not in ("analytic", "mc"):
        raise ValueError(f"mode must be 'analytic' or 'mc', got {mode!r}")

    def profile(test: TestSpec, points):
        values, bands = {}, {}
        for q in points:
            if mode == "analytic":
                if test.kind.value == "NP":
                    p = np_power_exact(gamma, test.n)
                else:
                    p = rdt_power_lower_bound(gamma, tau, q, test.n)
                values[q], bands[q] = p, (p, p)
            else:
                kind = Interference("constant", -q) if q > 0 else Interference("zero")
                model = ObservationSpec(1, q, test.n, kind, seed)
                est = estimate_pdet(test, model, trials, threads=threads)
                values[q], bands[q] = est.p_hat, (est.ci_low, est.ci_high)
        return values, bands

    elements: dict[str, LandscapeElement] = {}
    for n in n_grid:
        t = TestSpec.np(n, gamma)
        values, bands = profile(t, (0.0,))
        elements[t.label()] = LandscapeElement(t.label(), "NP", n, None, selectivity_of(t), values, bands)
    for n in n_grid:
        t = TestSpec.rdt(n, gamma, tau)
        values, bands = profile(t, rdt_points)
        elements[t.label()] = LandscapeElement(t.label(), "RDT", n, tau, selectivity_of(t), values, bands)
    oracle_points = sorted(set(q_grid) | {0.0})
    elements[ORACLE] = LandscapeElement(
        ORACLE, ORACLE, None, None, None,
        {q: 1.0 for q in oracle_points}, {q: (1.0, 1.0) for q in oracle_points},
    )

    labels = list(elements)
    k = len(labels)
    leq = np.eye(k, dtype=bool)
    for i, x in enumerate(labels):
        ex = elements[x]
        for j, y in enumerate(labels):
            ey = elements[y]
            if i == j:
                continue
            if ey.is_oracle:
                leq[i, j] = True
            elif ex.is_oracle:
                leq[i, j] = False
            elif _comparable(ex, ey, same_dimension_only):
                leq[i, j] = _dominates(ex, ey, mode)
    preorder = FinitePreorder(labels, leq)
    np_family = frozenset(lab for lab, e in elements.items() if e.role == "NP")
    rdt_family = frozenset(lab for lab, e in elements.items() if e.role == "RDT")
    return LandscapeAbstraction(preorder, np_family, rdt_family, elements, gamma, tau,
                                n_grid, q_grid, mode, same_dimension_only)
