import math

import numpy as np
import pytest

from farpoint.analysis import (AnalysisError, ConditionSummary, FittsFit,
                               ParallelLinesError, SingularFitError,
                               accuracy_by_width, crossover_id, emit_report,
                               fit_all, fit_fitts, load_condition_table,
                               load_fit_table, read_trial_rows,
                               set_records_from_rows, summarize,
                               write_trial_rows, _ols)
from farpoint.experiment import SetRecord, SetSpec, TrialRecord, fitts_id

NINE_IDS = sorted(fitts_id(a, w) for w in (25, 50, 100)
                  for a in (1000, 3000, 5000))

# dual-speed / absolute / relative / hybrid reference lines used in the docs
REFERENCE_FITS = {
    "relative": (-0.074, 0.510, 0.155, 0.943),
    "absolute": (-1.064, 0.685, 0.253, 0.918),
    "hybrid": (0.695, 0.488, 0.314, 0.786),
    "dual_speed": (0.528, 0.353, 0.119, 0.930),
}


def make_set(technique, width, amplitude, rts_s, errors=(), set_index=0):
    spec = SetSpec(technique=technique, width_px=width, amplitude_px=amplitude,
                   set_index=set_index)
    trials = []
    for i, rt in enumerate(rts_s):
        errs = [((0.0, 0.0), 0)] if i in errors else []
        trials.append(TrialRecord(set_id=set_index, trial_index=i + 1,
                                  t_start_us=0, t_end_us=int(rt * 1e6),
                                  click_position=(0.0, 0.0),
                                  error_clicks=errs))
    return SetRecord(spec, trials)


# ---------------------------------------------------------------- summarize

def test_summarize_median_and_mean():
    rts1 = (1.0, 1.2, 1.1, 2.0, 0.9, 1.3)   # median 1.15
    rts2 = (1.0, 1.0, 1.0, 1.0, 1.0, 3.0)   # median 1.0
    records = [make_set("absolute", 25, 1000, rts1, set_index=0),
               make_set("absolute", 25, 1000, rts2, set_index=1)]
    (s,) = summarize(records)
    assert s.mean_rt_s == pytest.approx((1.15 + 1.0) / 2)
    assert s.accuracy == 1.0
    assert s.id_bits == pytest.approx(fitts_id(1000, 25))
    assert s.n_sets == 2


def test_summarize_excludes_invalid_trials_from_median():
    # trial with an error click is excluded from RT but counted in accuracy
    rec = make_set("hybrid", 50, 3000, (1.0, 9.0, 1.2, 1.4, 1.1, 1.3),
                   errors=(1,))
    (s,) = summarize([rec])
    assert s.accuracy == pytest.approx(5 / 6)
    # median over the five valid RTs
    assert s.mean_rt_s == pytest.approx(sorted((1.0, 1.2, 1.4, 1.1, 1.3))[2])


def test_summarize_flags_sets_without_valid_trials():
    dead = make_set("absolute", 25, 5000, (1.0,) * 6, errors=range(6))
    live = make_set("absolute", 25, 5000, (1.5,) * 6, set_index=1)
    (s,) = summarize([dead, live])
    assert s.flagged
    assert s.n_sets == 2
    assert s.mean_rt_s == pytest.approx(1.5)
    assert s.accuracy == pytest.approx(6 / 12)


def test_summarize_median_robust_to_outlier():
    base = (1.0, 1.1, 1.2, 1.3, 1.4, 1.5)
    spiked = (1.0, 1.1, 1.2, 1.3, 1.4, 100.0)
    m1 = make_set("relative", 50, 1000, base).median_rt_s
    m2 = make_set("relative", 50, 1000, spiked).median_rt_s
    assert abs(m2 - m1) <= 0.05    # at most one order statistic apart


# ---------------------------------------------------------------- fitting

def test_fit_exact_line():
    pts = [(i, 0.0 + 1.0 * i) for i in NINE_IDS]
    fit = fit_fitts(pts)
    assert fit.a == pytest.approx(0.0, abs=1e-12)
    assert fit.b == pytest.approx(1.0, abs=1e-12)
    assert fit.rmse == pytest.approx(0.0, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.throughput == pytest.approx(1.0)


def test_fit_recovers_seeded_noisy_line():
    # 9-ID grid around RT = 0.528 + 0.353 * ID with sigma = 0.05 s; the
    # expected recovery was generated and checked with numpy lstsq
    rng = np.random.default_rng(0)
    rts = [0.528 + 0.353 * i + rng.normal(0.0, 0.05) for i in NINE_IDS]
    fit = fit_fitts(list(zip(NINE_IDS, rts)))
    assert fit.a == pytest.approx(0.528, abs=0.10)
    assert fit.b == pytest.approx(0.353, abs=0.02)
    # frozen values from the independent lstsq oracle
    assert fit.a == pytest.approx(0.5277, abs=5e-4)
    assert fit.b == pytest.approx(0.3551, abs=5e-4)


def test_fit_matches_numpy_lstsq():
    rng = np.random.default_rng(33)
    xs = rng.uniform(3, 8, size=12)
    ys = rng.uniform(0, 4, size=12)
    fit = fit_fitts(list(zip(xs, ys)))
    A = np.vstack([np.ones_like(xs), xs]).T
    (a, b), *_ = np.linalg.lstsq(A, ys, rcond=None)
    assert fit.a == pytest.approx(a, abs=1e-10)
    assert fit.b == pytest.approx(b, abs=1e-10)


def test_r_squared_matches_brute_force_definition():
    rng = np.random.default_rng(4)
    rts = [0.2 + 0.4 * i + rng.normal(0, 0.1) for i in NINE_IDS]
    fit = fit_fitts(list(zip(NINE_IDS, rts)))
    pred = [fit.a + fit.b * i for i in NINE_IDS]
    ss_res = sum((y - p) ** 2 for y, p in zip(rts, pred))
    mean = sum(rts) / len(rts)
    ss_tot = sum((y - mean) ** 2 for y in rts)
    assert fit.r_squared == pytest.approx(1 - ss_res / ss_tot, abs=1e-12)


def test_fit_affine_equivariance():
    rng = np.random.default_rng(8)
    rts = [0.3 + 0.5 * i + rng.normal(0, 0.08) for i in NINE_IDS]
    f1 = fit_fitts(list(zip(NINE_IDS, rts)))
    f2 = fit_fitts([(i, r + 2.5) for i, r in zip(NINE_IDS, rts)])
    assert f2.a == pytest.approx(f1.a + 2.5, abs=1e-9)
    assert f2.b == pytest.approx(f1.b, abs=1e-12)
    assert f2.rmse == pytest.approx(f1.rmse, abs=1e-12)
    assert f2.r_squared == pytest.approx(f1.r_squared, abs=1e-9)


def test_fit_requires_three_points_and_distinct_ids():
    with pytest.raises(AnalysisError):
        fit_fitts([(1.0, 1.0), (2.0, 2.0)])
    with pytest.raises(SingularFitError):
        fit_fitts([(2.0, 1.0), (2.0, 2.0), (2.0, 3.0)])


def test_internal_fitter_interpolates_two_points():
    a, b = _ols([1.0, 3.0], [2.0, 8.0])
    assert a == pytest.approx(-1.0)
    assert b == pytest.approx(3.0)


def test_negative_slope_flags_throughput_undefined():
    fit = fit_fitts([(3.0, 2.0), (5.0, 1.0), (7.0, 0.5), (8.0, 0.2)])
    assert fit.b < 0
    assert fit.throughput is None


# ---------------------------------------------------------------- crossover

def test_crossover_of_reference_dual_speed_and_absolute():
    absolute = FittsFit(a=-1.064, b=0.685, rmse=0.253, r_squared=0.918, n_points=9)
    dual = FittsFit(a=0.528, b=0.353, rmse=0.119, r_squared=0.930, n_points=9)
    x = crossover_id(absolute, dual)
    assert x == pytest.approx((0.528 - (-1.064)) / (0.685 - 0.353), abs=1e-12)
    assert x == pytest.approx(4.795, abs=0.001)
    assert 4 < x < 5     # easy tasks favor the flatter-intercept line


def test_crossover_simple_arithmetic():
    f1 = FittsFit(a=0.0, b=1.0, rmse=0, r_squared=1, n_points=3)
    f2 = FittsFit(a=1.0, b=0.5, rmse=0, r_squared=1, n_points=3)
    assert crossover_id(f1, f2) == pytest.approx(2.0)


def test_crossover_parallel_lines_error():
    f = FittsFit(a=0.1, b=0.5, rmse=0, r_squared=1, n_points=3)
    g = FittsFit(a=0.9, b=0.5, rmse=0, r_squared=1, n_points=3)
    with pytest.raises(ParallelLinesError):
        crossover_id(f, g)


# ---------------------------------------------------------------- reports

def full_study_records():
    rng = np.random.default_rng(12)
    records = []
    for tech, (a, b, _, _) in REFERENCE_FITS.items():
        idx = 0
        for w in (25, 50, 100):
            for amp in (1000, 3000, 5000):
                for _ in range(2):
                    mid = a + b * fitts_id(amp, w)
                    rts = rng.normal(mid, 0.05, size=6)
                    rts = np.clip(rts, 0.05, None)
                    records.append(make_set(tech, w, amp, rts, set_index=idx))
                    idx += 1
    return records


def test_emit_report_csv_round_trip(tmp_path):
    records = full_study_records()
    summaries = summarize(records)
    assert len(summaries) == 36           # 4 techniques x 9 conditions
    fits = fit_all(summaries)
    assert len(fits) == 4
    paths = emit_report(summaries, fits, tmp_path, fmt="csv")
    assert [p.name for p in paths] == ["conditions.csv", "fits.csv",
                                       "accuracy_by_width.csv"]
    again = load_condition_table(paths[0])
    assert again == summaries             # float repr round-trips exactly
    fits_again = load_fit_table(paths[1])
    for tech, fit in fits.items():
        assert fits_again[tech].a == fit.a
        assert fits_again[tech].b == fit.b


def test_emit_report_txt(tmp_path):
    records = full_study_records()
    summaries = summarize(records)
    (path,) = emit_report(summaries, fit_all(summaries), tmp_path, fmt="txt")
    text = path.read_text()
    assert "dual_speed" in text
    assert "R^2" in text


def test_emit_report_empty_rejected(tmp_path):
    with pytest.raises(AnalysisError):
        emit_report([], {}, tmp_path)


def test_accuracy_by_width_structure():
    rows = accuracy_by_width(summarize(full_study_records()))
    assert len(rows) == 12                # 4 techniques x 3 widths
    assert all(0.0 <= acc <= 1.0 for _, _, acc, _ in rows)


def test_trial_rows_round_trip(tmp_path):
    records = full_study_records()[:6]
    path = tmp_path / "trials.csv"
    write_trial_rows(path, "sess", records)
    rows = read_trial_rows(path)
    assert len(rows) == 6 * 6
    regrouped = set_records_from_rows(rows)
    assert len(regrouped) == 6
    assert summarize(regrouped) == summarize(records)
