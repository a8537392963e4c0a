import math

import numpy as np
import pytest

from superclifford.ensembles import EnsembleSpec
from superclifford.experiments import (
    EntropyCurve,
    FitWindowError,
    UnsaturatedError,
    aggregate_otoc,
    default_fit_window,
    extract_scrambling_time,
    fit_exponential_arrays,
    fit_exponential_saturation,
    fit_log_scaling,
    per_realization_scrambling_times,
    run_entropy_ensemble,
    run_otoc_ensemble,
)
from superclifford.otoc import V_CATALOG
from superclifford.pauli import BasisOperatorLabel

SPEC = EnsembleSpec(120, max_t=3, realizations=1)


def curve_of(values, spec=SPEC):
    values = np.asarray(values, dtype=float)
    return EntropyCurve(np.arange(len(values)), values, np.zeros_like(values), 1, spec)


def synthetic(alpha=0.25, lam=0.06, n=120, horizon=120):
    spec = EnsembleSpec(n, max_t=horizon, realizations=1)
    t = np.arange(horizon + 1)
    mean = spec.saturation - n * alpha * np.exp(-lam * t)
    return EntropyCurve(t, mean, np.zeros_like(mean), 1, spec)


def test_extract_direct_definition():
    assert extract_scrambling_time(curve_of([0, 15, 22, 25]), 10) == 2


def test_extract_large_epsilon():
    assert extract_scrambling_time(curve_of([0, 15, 22, 25]), 40) == 0


def test_extract_unsaturated():
    with pytest.raises(UnsaturatedError):
        extract_scrambling_time(curve_of([0, 1, 2, 3]), 10)


def test_extract_synthetic_closed_form():
    c = synthetic()
    assert extract_scrambling_time(c, 10) == math.ceil(math.log(0.25 * 120 / 10) / 0.06)


def test_fit_exact_recovery():
    res = fit_exponential_saturation(synthetic(), window=(0, 80))
    assert res.params["lambda"] == pytest.approx(0.06, abs=1e-10)
    assert res.params["alpha"] == pytest.approx(0.25, abs=1e-10)
    assert res.r_squared == pytest.approx(1.0, abs=1e-10)


def test_default_window_stops_near_saturation():
    c = synthetic()
    t0, t1 = default_fit_window(c)
    assert t0 == 50
    # deficit 30 exp(-0.06 t) stays >= 1 up to t = 56
    assert t1 == 56


def test_fit_window_errors():
    c = synthetic()
    with pytest.raises(FitWindowError):
        fit_exponential_saturation(c, window=(200, 300))
    flat = curve_of([30, 30, 30, 30])
    with pytest.raises(FitWindowError):
        fit_exponential_saturation(flat, window=(0, 3))
    with pytest.raises(FitWindowError):
        fit_exponential_saturation(flat)


def test_log_fit_recovery():
    ns = [500, 1000, 1500, 2000, 3000]
    res = fit_log_scaling([(n, 15.61 * math.log(n) - 24.18) for n in ns])
    assert res.params["a"] == pytest.approx(15.61, abs=1e-9)
    assert res.params["b"] == pytest.approx(-24.18, abs=1e-9)
    assert res.r_squared == pytest.approx(1.0)


def test_log_fit_two_points():
    res = fit_log_scaling([(100, 40.0), (1000, 80.0)])
    assert res.r_squared == 1.0
    assert res.params["a"] * math.log(1000) + res.params["b"] == pytest.approx(80.0)
    with pytest.raises(ValueError):
        fit_log_scaling([(100, 1.0)])
    with pytest.raises(ValueError):
        fit_log_scaling([(100, 1.0), (100, 2.0)])


def test_from_samples_exact_stats():
    spec = EnsembleSpec(120, max_t=2, realizations=3)
    samples = np.array([[0, 2, 4], [0, 4, 4], [0, 6, 4]])
    c = EntropyCurve.from_samples(spec, [0, 1, 2], samples)
    np.testing.assert_allclose(c.mean_entropy, [0, 4, 4])
    np.testing.assert_allclose(c.std_err, [0, 2 / math.sqrt(3), 0])


def test_per_realization_single_matches_curve():
    spec = EnsembleSpec(120, realizations=1, max_t=80)
    curve = run_entropy_ensemble(spec)
    st = per_realization_scrambling_times(curve)
    assert st.mean == extract_scrambling_time(curve)
    assert st.std_err == 0.0 and st.n_unsaturated == 0


def test_per_realization_identical_rows():
    spec = EnsembleSpec(120, max_t=3, realizations=4)
    c = EntropyCurve.from_samples(spec, range(4), np.tile([0, 15, 22, 25], (4, 1)))
    st = per_realization_scrambling_times(c, 10)
    assert st.mean == 2 and st.std_err == 0.0 and st.n_used == 4


def test_per_realization_counts_unsaturated():
    spec = EnsembleSpec(120, max_t=3, realizations=2)
    c = EntropyCurve.from_samples(spec, range(4), np.array([[0, 15, 22, 25], [0, 1, 2, 3]]))
    st = per_realization_scrambling_times(c, 10)
    assert st.n_unsaturated == 1 and st.per_realization == [2, None]


def test_entropy_ensemble_small():
    spec = EnsembleSpec(120, realizations=6, max_t=120, master_seed=4)
    a = run_entropy_ensemble(spec)
    assert a.mean_entropy[0] == 0
    assert abs(a.mean_entropy[-1] - 30) <= 1
    assert a.to_csv() == run_entropy_ensemble(spec).to_csv()
    assert a.to_csv().splitlines()[0] == "t,mean,stderr,n"


def test_entropy_ensemble_workers_match():
    spec = EnsembleSpec(80, realizations=4, max_t=30, master_seed=2)
    assert run_entropy_ensemble(spec, workers=2).to_csv() == run_entropy_ensemble(spec).to_csv()


def test_fit_on_ensemble():
    spec = EnsembleSpec(200, realizations=10, max_t=120, master_seed=1)
    res = fit_exponential_saturation(run_entropy_ensemble(spec))
    assert 0.03 < res.params["lambda"] < 0.09
    assert res.r_squared > 0.95


def test_aggregate_otoc():
    codes = np.array([[0, 2], [0, -1], [0, 2], [0, 2]])
    tr = aggregate_otoc(codes, [0, 10], 0.5)
    assert tr.mean_f == [1.0, 0.375]
    assert tr.fraction_not_scrambled == [1.0, 0.25]
    assert tr.k_histogram == [{"0": 4}, {"2": 3, "zero": 1}]


def test_otoc_identity_all_ones():
    spec = EnsembleSpec(40, realizations=5, max_t=15)
    tr = run_otoc_ensemble(spec, [], BasisOperatorLabel.parse("1", 40), range(0, 16, 5))
    assert tr.mean_f == [1.0] * 4 and tr.fraction_not_scrambled == [0.0] * 4
    assert tr.plateau == pytest.approx(1.0)


def test_otoc_c3_late_time():
    spec = EnsembleSpec(120, realizations=30, max_t=120, master_seed=3)
    tr = run_otoc_ensemble(spec, V_CATALOG["C3"], BasisOperatorLabel.zeros(120), [0, 60, 120])
    assert tr.mean_f[0] == 1.0
    assert tr.plateau == pytest.approx(0.5)
    assert abs(tr.mean_f[-1] - 0.5) < 0.1
    assert tr.to_csv().splitlines()[0] == "t,mean_f,fraction_off_plateau,k_histogram"


def test_otoc_w0_size_checked():
    with pytest.raises(ValueError):
        run_otoc_ensemble(EnsembleSpec(40, max_t=2), [], BasisOperatorLabel.zeros(3), [0])
