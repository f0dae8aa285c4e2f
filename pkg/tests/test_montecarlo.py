import math

import numpy as np
import pytest
from scipy import stats

from evtinfo.distributions import make_exponential, make_gnedenko, make_gumbel
from evtinfo.errors import DomainError, EstimationError
from evtinfo.information import entropy_via_score, expected_log_tail_at_max, kl_to_gumbel
from evtinfo.montecarlo import (
    CHUNK,
    EstimateWithCI,
    SeededStream,
    entropy_estimate,
    estimate,
    kl_estimate,
    metadata,
    sample,
    sample_normalized_max,
    uniforms,
)
from evtinfo.normalize import NormalizedMax, NormingConstants, normalized_max
from evtinfo.specfun import EULER_GAMMA, harmonic


class TestStream:
    def test_seed_range(self):
        with pytest.raises(DomainError):
            SeededStream(-1)
        with pytest.raises(DomainError):
            SeededStream(2 ** 64)
        with pytest.raises(DomainError):
            SeededStream(1, stream_id=-2)
        SeededStream(2 ** 64 - 1)

    def test_open_unit_interval(self):
        u = uniforms(SeededStream(3), 200_000)
        assert u.min() > 0 and u.max() < 1

    def test_reproducible(self):
        a = uniforms(SeededStream(7, 2), 1000)
        b = uniforms(SeededStream(7, 2), 1000)
        assert a.tobytes() == b.tobytes()

    def test_prefix_stable(self):
        long = uniforms(SeededStream(7), CHUNK + 500)
        short = uniforms(SeededStream(7), 300)
        np.testing.assert_array_equal(long[:300], short)

    @pytest.mark.parametrize("workers", [2, 3, 8])
    def test_worker_invariance(self, workers):
        s = SeededStream(11, 4)
        count = 3 * CHUNK + 123
        ref = sample(make_gumbel(), s, count, workers=1)
        assert sample(make_gumbel(), s, count, workers=workers).tobytes() == ref.tobytes()

    def test_stream_independence(self):
        a = uniforms(SeededStream(5, 0), 100_000)
        b = uniforms(SeededStream(5, 1), 100_000)
        c = uniforms(SeededStream(6, 0), 100_000)
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.01
        assert abs(np.corrcoef(a, c)[0, 1]) < 0.01

    def test_metadata(self):
        m = metadata(SeededStream(9, 3), 100)
        assert m["seed"] == 9 and m["stream_id"] == 3 and m["chunk_size"] == CHUNK
        assert "Philox" in m["generator"] and m["samples"] == 100


class TestSample:
    def test_ks_exponential(self):
        x = sample(make_exponential(), SeededStream(2024), 100_000)
        assert stats.kstest(x, "expon").pvalue > 0.01

    def test_ks_gnedenko(self):
        g = make_gnedenko()
        x = sample(g, SeededStream(2025), 100_000)
        assert stats.kstest(x, lambda t: g.cdf(t)).pvalue > 0.01

    def test_monotone_in_u(self):
        d = make_gumbel()
        u = np.sort(uniforms(SeededStream(1), 1000))
        assert np.all(np.diff(d.quantile(u)) >= 0)

    def test_gumbel_mean(self):
        x = sample(make_gumbel(), SeededStream(99), 10 ** 6, workers=4)
        se = x.std(ddof=1) / math.sqrt(x.size)
        assert abs(x.mean() - EULER_GAMMA) < 3 * se

    def test_count(self):
        with pytest.raises(DomainError):
            sample(make_gumbel(), SeededStream(1), 0)


class TestNormalizedMaxSampling:
    def test_n1_identity_matches_sample(self):
        d = make_exponential()
        nm = NormalizedMax(d, NormingConstants.identity(1))
        s = SeededStream(31)
        np.testing.assert_array_equal(sample_normalized_max(nm, s, 5000), sample(d, s, 5000))

    def test_max_of_n_same_law(self):
        nm = normalized_max(make_exponential(), 10)
        fast = sample_normalized_max(nm, SeededStream(1), 50_000)
        slow = sample_normalized_max(nm, SeededStream(2), 50_000, max_of_n=True)
        assert stats.ks_2samp(fast, slow).pvalue > 0.01
        assert stats.kstest(fast, lambda z: nm.cdf(z)).pvalue > 0.01

    def test_log_cdf_identity(self):
        d = make_gnedenko()
        nm = NormalizedMax(d, NormingConstants.identity(10))
        m = sample_normalized_max(nm, SeededStream(8), 10 ** 6, workers=4)
        est = estimate(nm, d.log_cdf, SeededStream(8), m.size, draws=m)
        assert est.within(-0.1, 3)

    def test_log_tail_identity(self):
        d = make_exponential()
        nm = NormalizedMax(d, NormingConstants.identity(5))
        est = estimate(nm, lambda x: -np.asarray(d.log_sf(x)), SeededStream(12), 10 ** 6, workers=4)
        assert est.within(harmonic(5), 3)
        assert harmonic(5) == pytest.approx(2.2833333, abs=1e-7)


class TestEstimators:
    def test_entropy_n10(self):
        nm = normalized_max(make_exponential(), 10)
        est = entropy_estimate(nm, SeededStream(21), 10 ** 6, workers=4)
        assert est.within(1.5263832, 3)
        assert est.within(entropy_via_score(nm), 3)

    def test_kl_self(self):
        est = kl_estimate(make_gumbel(), SeededStream(22), 10 ** 6, workers=4)
        assert est.within(0.0, 3)

    def test_kl_exponential_n10(self):
        nm = normalized_max(make_exponential(), 10)
        est = kl_estimate(nm, SeededStream(23), 10 ** 6, workers=4)
        assert est.within(1 / 110, 3)

    def test_standard_error_definition(self):
        x = sample(make_exponential(), SeededStream(4), 1000)
        est = estimate(make_exponential(), lambda t: t, SeededStream(4), 1000)
        assert est.mean == pytest.approx(x.mean(), rel=1e-14)
        assert est.std_error == pytest.approx(x.std(ddof=1) / math.sqrt(1000), rel=1e-12)
        assert est.n_samples == 1000

    def test_non_finite(self):
        with pytest.raises(EstimationError) as exc:
            estimate(make_exponential(), lambda t: np.where(t > 2, np.inf, t), SeededStream(4), 1000)
        x = sample(make_exponential(), SeededStream(4), 1000)
        assert exc.value.index == int(np.flatnonzero(x > 2)[0])

    def test_needs_two(self):
        with pytest.raises(DomainError):
            estimate(make_exponential(), lambda t: t, SeededStream(4), 1)

    def test_within(self):
        e = EstimateWithCI(1.0, 0.1, 10)
        assert e.within(1.25, 3) and not e.within(1.5, 4)

    def test_replicate_consistency(self):
        nm = normalized_max(make_gnedenko(), 10)
        target = kl_to_gumbel(nm)
        passes = sum(kl_estimate(nm, SeededStream(1000 + r), 20_000).within(target, 4) for r in range(20))
        assert passes >= 19

    def test_replicate_consistency_tail(self):
        d = make_gumbel()
        nm = NormalizedMax(d, NormingConstants.identity(5))
        target = expected_log_tail_at_max(d, 5)
        h = lambda x: -np.asarray(d.log_sf(x))
        passes = sum(estimate(nm, h, SeededStream(2000 + r), 20_000).within(target, 4) for r in range(20))
        assert passes >= 19
