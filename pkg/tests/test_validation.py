import numpy as np
import pytest

from bosonbin import (
    BinnedDistribution,
    IngestionError,
    Partition,
    SampleSet,
    bayes_update,
    bin_samples,
    equipartition,
    format_samples,
    gram_interpolation,
    haar_tvd_study,
    loss_speedup_study,
    powerlaw_fit,
    read_samples,
    samples_to_decision,
    tvd,
    write_samples,
)


def _dist(probs):
    return BinnedDistribution(int(np.sum(np.asarray(probs).shape)) - 1,
                              np.asarray(probs, dtype=float))


def test_tvd_hand_values():
    assert tvd(_dist([1.0, 0.0]), _dist([0.0, 1.0])) == pytest.approx(2.0)
    assert tvd(_dist([0.3, 0.7]), _dist([0.3, 0.7])) == 0.0
    assert tvd(_dist([0.5, 0.5]), _dist([0.25, 0.75])) == pytest.approx(0.5)


def test_tvd_pads_mismatched_domains():
    # dark counts extend an axis; the shorter domain is padded with zeros
    assert tvd(_dist([1.0, 0.0]), _dist([0.5, 0.25, 0.25])) \
        == pytest.approx(1.0)


def test_tvd_metric_properties():
    rng = np.random.default_rng(1)
    for _ in range(20):
        p, q, r = (rng.dirichlet(np.ones(6)).reshape(2, 3) for _ in range(3))
        dp, dq, dr = _dist(p), _dist(q), _dist(r)
        assert tvd(dp, dq) == pytest.approx(tvd(dq, dp))
        assert tvd(dp, dq) >= 0.0
        assert tvd(dp, dr) <= tvd(dp, dq) + tvd(dq, dr) + 1e-12


def test_bin_samples_basic():
    raw = SampleSet("raw_occupations",
                    [[1, 0, 1, 0], [0, 2, 0, 0], [0, 0, 1, 1]])
    part = Partition(((1, 2), (3, 4)), 4)
    binned = bin_samples(raw, part)
    assert binned.kind == "binned_counts"
    assert np.array_equal(binned.records, [[1, 1], [2, 0], [0, 2]])


def test_bin_samples_drops_uncovered_modes():
    raw = SampleSet("raw_occupations", [[1, 1, 0], [0, 1, 1]])
    binned = bin_samples(raw, Partition(((2,),), 3))
    assert np.array_equal(binned.records, [[1], [1]])


def test_bin_samples_infers_lost_photons():
    raw = SampleSet("raw_occupations", [[1, 0], [0, 0], [1, 1]])
    binned = bin_samples(raw, Partition(((1, 2),), 2), total_photons=2)
    assert np.array_equal(binned.records, [[1, 1], [0, 2], [2, 0]])
    with pytest.raises(ValueError):
        bin_samples(SampleSet("raw_occupations", [[2, 2]]),
                    Partition(((1, 2),), 2), total_photons=2)


def test_bayes_update_hand_computed():
    p0 = _dist([0.8, 0.2])
    pa = _dist([0.5, 0.5])
    samples = SampleSet("binned_counts", [[0], [1], [0]])
    report = bayes_update(samples, p0, pa)
    chi = (0.8 / 0.5) * (0.2 / 0.5) * (0.8 / 0.5)
    assert report.chi == pytest.approx(chi, rel=1e-12)
    assert report.p_null == pytest.approx(chi / (chi + 1), rel=1e-12)
    assert report.samples_used == 3
    assert not report.censored


def test_bayes_update_order_invariant_and_symmetric():
    rng = np.random.default_rng(4)
    p0 = _dist(rng.dirichlet(np.ones(4)))
    pa = _dist(rng.dirichlet(np.ones(4)))
    records = rng.integers(0, 4, size=(50, 1))
    fwd = bayes_update(SampleSet("binned_counts", records), p0, pa)
    rev = bayes_update(SampleSet("binned_counts", records[::-1]), p0, pa)
    assert fwd.chi == pytest.approx(rev.chi, rel=1e-9)
    swapped = bayes_update(SampleSet("binned_counts", records), pa, p0)
    assert fwd.p_null + swapped.p_null == pytest.approx(1.0, rel=1e-9)


def test_bayes_update_empty_samples():
    report = bayes_update(SampleSet("binned_counts", np.zeros((0, 1), int)),
                          _dist([0.5, 0.5]), _dist([0.1, 0.9]))
    assert report.chi == 1.0
    assert report.p_null == 0.5
    assert report.samples_used == 0


def test_bayes_update_floors_zero_probabilities():
    p0 = _dist([1.0, 0.0])
    pa = _dist([0.5, 0.5])
    samples = SampleSet("binned_counts", [[1]])
    report = bayes_update(samples, p0, pa, floor=1e-12)
    assert report.chi == pytest.approx(1e-12 / 0.5, rel=1e-9)
    assert np.isfinite(report.log_chi)


def test_bayes_update_outside_domain_is_neutral():
    p0 = _dist([0.8, 0.2])
    pa = _dist([0.5, 0.5])
    inside = bayes_update(SampleSet("binned_counts", [[0]]), p0, pa)
    padded = bayes_update(SampleSet("binned_counts", [[0], [7]]), p0, pa)
    assert padded.chi == pytest.approx(inside.chi, rel=1e-12)


def test_bayes_update_trajectory_matches_sigmoid():
    p0 = _dist([0.8, 0.2])
    pa = _dist([0.5, 0.5])
    report = bayes_update(SampleSet("binned_counts", [[0], [1]]), p0, pa)
    ratios = np.log([0.8 / 0.5, 0.2 / 0.5])
    expected = 1.0 / (1.0 + np.exp(-np.cumsum(ratios)))
    assert np.allclose(report.p_null_trajectory, expected, rtol=1e-12)


def test_samples_to_decision_rejects_quickly_when_separated():
    truth = _dist([0.05, 0.95])
    p0 = _dist([0.9, 0.1])
    pa = _dist([0.05, 0.95])
    out = samples_to_decision(truth, p0, pa, 0.05, max_samples=10000, seed=3)
    assert not out.censored
    assert out.p_null < 0.05
    assert 1 <= out.samples_used < 100


def test_samples_to_decision_confirms_above_half_threshold():
    truth = _dist([0.9, 0.1])
    p0 = _dist([0.9, 0.1])
    pa = _dist([0.5, 0.5])
    out = samples_to_decision(truth, p0, pa, 0.95, max_samples=10000, seed=3)
    assert not out.censored
    assert out.p_null > 0.95


def test_samples_to_decision_censors_at_budget():
    same = _dist([0.5, 0.5])
    out = samples_to_decision(same, same, same, 0.05, max_samples=64, seed=1)
    assert out.censored
    assert out.samples_used == 64


def test_samples_to_decision_rejects_half_threshold():
    d = _dist([0.5, 0.5])
    with pytest.raises(ValueError):
        samples_to_decision(d, d, d, 0.5, max_samples=10, seed=0)


def test_haar_tvd_study_identical_grams_give_zero():
    g = gram_interpolation(2, 0.5)
    res = haar_tvd_study(2, 4, 2, g, g, trials=3, seed=5)
    assert res.trials == 3
    assert np.allclose(res.values, 0.0, atol=1e-10)
    assert res.mean == pytest.approx(0.0, abs=1e-10)


def test_haar_tvd_study_deterministic():
    a = haar_tvd_study(2, 4, 2, gram_interpolation(2, 1.0),
                       gram_interpolation(2, 0.0), trials=4, seed=9)
    b = haar_tvd_study(2, 4, 2, gram_interpolation(2, 1.0),
                       gram_interpolation(2, 0.0), trials=4, seed=9)
    assert np.array_equal(a.values, b.values)
    assert a.std == pytest.approx(float(np.std(a.values, ddof=1)))


def test_powerlaw_fit_exact_recovery():
    rho = np.array([0.05, 0.1, 0.2, 0.4, 0.5])
    values = 17.9 * rho ** -2.53
    fit = powerlaw_fit(list(zip(rho, values)))
    assert fit.prefactor == pytest.approx(17.9, rel=1e-9)
    assert fit.exponent == pytest.approx(-2.53, rel=1e-9)
    assert abs(fit.residuals).max() < 1e-9


def test_powerlaw_fit_needs_three_positive_points():
    with pytest.raises(ValueError):
        powerlaw_fit([(0.1, 1.0), (0.2, 2.0)])
    with pytest.raises(ValueError):
        powerlaw_fit([(0.1, 1.0), (0.2, 2.0), (0.3, -1.0)])


def test_loss_speedup_study_shapes_and_l0_ratio():
    res = loss_speedup_study(4, 4, 0.8, 0.8, 4, trials=2, runs_per_trial=6,
                             seed=9, max_samples=50000)
    assert tuple(res.l_values) == tuple(range(5))
    assert res.ratios[0] == pytest.approx(1.0)
    assert res.per_unitary_ratios.shape == (2, 5)
    assert res.mean_times.shape == (5,)
    assert res.censored_fraction.shape == (5,)
    assert res.censored_fraction.min() >= 0.0
    assert res.censored_fraction.max() <= 1.0
    # extra lossy events speed the decision up on average; per-run stopping
    # times are noisy, so only the seeded aggregate is checked here
    assert res.ratios[-1] > 1.2
    assert all(res.ratios[i + 1] >= res.ratios[i] - 0.05 for i in range(4))


def test_sample_file_round_trip(tmp_path):
    path = tmp_path / "samples.jsonl"
    samples = SampleSet("binned_counts", [[1, 2], [0, 3]])
    write_samples(path, samples)
    back = read_samples(path)
    assert back.kind == "binned_counts"
    assert np.array_equal(back.records, samples.records)
    assert format_samples(samples).splitlines()[0] \
        == '{"kind": "binned_counts", "K": 2}'


def test_read_samples_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    samples = read_samples(path)
    assert len(samples) == 0


def test_read_samples_rejects_malformed(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"kind": "raw_occupations", "m": 3}\n[1, 0]\n')
    with pytest.raises(IngestionError, match="line 2"):
        read_samples(path)
    path.write_text('{"kind": "raw_occupations", "m": 3}\n[1, 0, 0.5]\n')
    with pytest.raises(IngestionError, match="line 2"):
        read_samples(path)
    path.write_text('not json\n')
    with pytest.raises(IngestionError, match="line 1"):
        read_samples(path)
    path.write_text('{"kind": "mystery", "m": 3}\n')
    with pytest.raises(IngestionError):
        read_samples(path)
