import csv
import io
import json
import math

import numpy as np
import pytest
from statsmodels.stats.proportion import proportion_confint

from mpdetect.detectors import TestKind, TestSpec, np_power_exact, rdt_power_lower_bound
from mpdetect.montecarlo import (
    SWEEP_COLUMNS,
    MCEstimate,
    count_rejections,
    estimate_pdet,
    estimate_pfa,
    rows_to_csv,
    rows_to_json,
    sweep,
    wilson_ci,
)
from mpdetect.observation import ObservationSpec


class TestWilson:
    def test_zero_successes(self):
        lo, hi = wilson_ci(0, 100, 3)
        assert lo == 0.0 and hi > 0

    def test_all_successes(self):
        lo, hi = wilson_ci(100, 100, 3)
        assert hi == 1.0 and lo < 1

    def test_half(self):
        lo, hi = wilson_ci(50, 100, 1.96)
        assert (lo + hi) / 2 == pytest.approx(0.5, abs=1e-12)
        assert hi - lo == pytest.approx(0.19, abs=0.005)

    @pytest.mark.parametrize("k,n,z", [(0, 10, 1.0), (3, 10, 2.0), (50, 100, 1.96),
                                       (7, 1000, 3.0), (999, 1000, 3.0), (123, 457, 2.5)])
    def test_against_statsmodels(self, k, n, z):
        alpha = 2 * (1 - 0.5 * math.erfc(-z / math.sqrt(2)))
        ref = proportion_confint(k, n, alpha=alpha, method="wilson")
        got = wilson_ci(k, n, z)
        assert got[0] == pytest.approx(ref[0], abs=1e-9)
        assert got[1] == pytest.approx(ref[1], abs=1e-9)

    @pytest.mark.parametrize("k,n", [(0, 1), (1, 1), (5, 9), (9, 9)])
    def test_contains_estimate(self, k, n):
        lo, hi = wilson_ci(k, n, 3.0)
        assert lo <= k / n <= hi

    @pytest.mark.parametrize("k,n,z", [(-1, 10, 1), (11, 10, 1), (1, 0, 1), (1, 10, 0)])
    def test_contract(self, k, n, z):
        with pytest.raises(ValueError):
            wilson_ci(k, n, z)


class TestEstimates:
    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            estimate_pfa(TestSpec.np(4, 0.05), ObservationSpec(0, 0.0, 5), 10)

    def test_forced_epsilon(self):
        test = TestSpec.np(4, 0.05)
        a = estimate_pfa(test, ObservationSpec(1, 0.0, 4, seed=3), 5000)
        b = estimate_pfa(test, ObservationSpec(0, 0.0, 4, seed=3), 5000)
        assert a == b
        c = estimate_pdet(test, ObservationSpec(0, 0.0, 4, seed=3), 5000)
        assert c.p_hat > a.p_hat

    def test_always_reject_diagnostic(self):
        test = TestSpec(TestKind.NP, 4, 0.05, force_threshold=-math.inf)
        est = estimate_pdet(test, ObservationSpec(1, 0.0, 4), 1000)
        assert est.p_hat == 1.0 and est.ci_high == 1.0

    def test_estimate_invariants(self):
        est = estimate_pfa(TestSpec.rdt(9, 0.1, 0.2), ObservationSpec(0, 0.2, 9, "unif", 5), 20_000)
        assert est.ci_low <= est.p_hat <= est.ci_high
        assert est.trials == 20_000 and est.seed == 5 and est.z == 3.0

    @pytest.mark.parametrize("threads", [2, 8])
    def test_thread_count_does_not_matter(self, threads):
        test = TestSpec.rdt(16, 0.05, 0.25)
        model = ObservationSpec(0, 0.25, 16, "unif", seed=77)
        trials = 300_001  # several blocks plus a ragged tail
        assert count_rejections(test, model, trials, threads) == count_rejections(test, model, trials, 1)

    def test_np_size_and_power_sampled_configs(self):
        for gamma, n, seed in [(0.1, 3, 1), (0.05, 25, 2), (0.2, 1, 3)]:
            test = TestSpec.np(n, gamma)
            model = ObservationSpec(0, 0.0, n, seed=seed)
            pfa = estimate_pfa(test, model, 100_000)
            pdet = estimate_pdet(test, model, 100_000)
            assert pfa.ci_low <= gamma <= pfa.ci_high
            ref = np_power_exact(gamma, n)
            assert pdet.ci_low <= ref <= pdet.ci_high

    @pytest.mark.parametrize("token", ["zero", "const:0.1", "alt:0.15", "unif", "worst", "sin:0.15:6"])
    def test_rdt_size_and_power_bound(self, token):
        gamma, tau, q, n = 0.05, 0.2, 0.15, 25
        test = TestSpec.rdt(n, gamma, tau)
        model = ObservationSpec(0, q, n, token, seed=9)
        pfa = estimate_pfa(test, model, 100_000)
        pdet = estimate_pdet(test, model, 100_000)
        sigma_pfa = math.sqrt(gamma * (1 - gamma) / pfa.trials)
        assert pfa.p_hat <= gamma + 3 * sigma_pfa
        bound = rdt_power_lower_bound(gamma, tau, q, n)
        assert pdet.p_hat >= bound - 3 * math.sqrt(bound * (1 - bound) / pdet.trials)


class TestSweep:
    def test_np_sweep_columns(self):
        rows = sweep("NP", 0.05, 0.0, "zero", (1, 4, 9, 16), 50_000, seed=1)
        refs = [r.reference for r in rows]
        assert refs == sorted(refs) and refs[-1] >= 0.99
        pdet = [r.pdet.p_hat for r in rows]
        assert all(b > a for a, b in zip(pdet, pdet[1:]))
        for r in rows:
            assert r.pdet.ci_low <= r.reference <= r.pdet.ci_high

    def test_rdt_sweep(self):
        rows = sweep("RDT", 0.05, 0.2, "worst", (16, 64, 256), 20_000, seed=2, tau=0.25)
        refs = [r.reference for r in rows]
        assert refs == sorted(refs) and refs[-1] > 0.999
        assert [r.pdet.p_hat for r in rows] == sorted(r.pdet.p_hat for r in rows)

    def test_empty(self):
        rows = sweep("NP", 0.05, 0.0, "zero", (), 10)
        assert rows == []
        assert rows_to_csv(rows).strip() == ",".join(SWEEP_COLUMNS)
        assert json.loads(rows_to_json(rows)) == []

    def test_rdt_needs_q_below_tau(self):
        with pytest.raises(ValueError):
            sweep("RDT", 0.05, 0.3, "worst", (4,), 10, tau=0.2)

    def test_serialisation(self):
        rows = sweep("NP", 0.05, 0.0, "zero", (4, 9), 1000, seed=3)
        parsed = list(csv.DictReader(io.StringIO(rows_to_csv(rows))))
        assert list(parsed[0]) == list(SWEEP_COLUMNS)
        assert parsed[1]["n"] == "9"
        assert all(len(v.split(".")[1]) == 6 for k, v in parsed[0].items() if k not in ("n", "trials"))
        records = json.loads(rows_to_json(rows))
        assert list(records[0]) == list(SWEEP_COLUMNS)
        assert records[0]["pfa"] == pytest.approx(float(parsed[0]["pfa"]), abs=1e-12)


def test_mcestimate_from_counts():
    est = MCEstimate.from_counts(5, 10, seed=1)
    assert est.p_hat == 0.5 and est.successes == 5
    assert est.half_width == pytest.approx((est.ci_high - est.ci_low) / 2)
