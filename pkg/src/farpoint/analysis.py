"""Post-hoc statistics: RT aggregation, Fitts'-law fits, report files.

Reaction times aggregate as the median over a set's valid trials, then the
mean of set medians per condition; accuracy is the valid-trial fraction.
Movement time regresses on the index of difficulty with ordinary least
squares, reporting intercept, slope, RMSE, R^2, and 1/slope as throughput.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .experiment import SetRecord, fitts_id

log = logging.getLogger(__name__)


class AnalysisError(ValueError):
    pass


class SingularFitError(AnalysisError):
    """Regression impossible: all design points share one ID."""


class ParallelLinesError(AnalysisError):
    """Two fits with equal slopes never cross."""


@dataclass(frozen=True)
class ConditionSummary:
    technique: str
    width_px: float
    amplitude_px: float
    id_bits: float
    mean_rt_s: Optional[float]   # mean of set medians; None if no set had RTs
    accuracy: float
    n_sets: int
    n_sets_without_rt: int = 0

    @property
    def flagged(self) -> bool:
        return self.n_sets_without_rt > 0


@dataclass(frozen=True)
class FittsFit:
    a: float                     # intercept, seconds
    b: float                     # slope, s/bit
    rmse: float
    r_squared: float
    n_points: int

    @property
    def throughput(self) -> Optional[float]:
        """1/b in bits/s; undefined (None) when the slope is not positive."""
        if self.b <= 0:
            return None
        return 1.0 / self.b

    def predict(self, id_bits: float) -> float:
        return self.a + self.b * id_bits


def summarize(set_records: Iterable[SetRecord]) -> List[ConditionSummary]:
    """Collapse completed sets into per-(technique, W, A) summaries."""
    groups: Dict[Tuple[str, float, float], List[SetRecord]] = {}
    for rec in set_records:
        key = (rec.spec.technique, rec.spec.width_px, rec.spec.amplitude_px)
        groups.setdefault(key, []).append(rec)

    out = []
    for (tech, w, a), recs in sorted(groups.items()):
        medians = [m for m in (r.median_rt_s for r in recs) if m is not None]
        n_dropped = len(recs) - len(medians)
        if n_dropped:
            log.warning("condition %s W=%g A=%g: %d set(s) had no valid "
                        "trials and were excluded from RT", tech, w, a, n_dropped)
        valid = sum(1 for r in recs for t in r.trials if t.valid)
        total = sum(len(r.trials) for r in recs)
        out.append(ConditionSummary(
            technique=tech, width_px=w, amplitude_px=a,
            id_bits=fitts_id(a, w),
            mean_rt_s=(sum(medians) / len(medians)) if medians else None,
            accuracy=valid / total if total else 0.0,
            n_sets=len(recs), n_sets_without_rt=n_dropped))
    return out


def fit_fitts(points: Sequence[Tuple[float, float]]) -> FittsFit:
    """Least-squares line through (ID, mean RT) points.

    Requires at least three distinct IDs; raises SingularFitError when every
    point shares one ID. A non-positive slope is returned as-is with the
    throughput property reporting None.
    """
    if len(points) < 3:
        raise AnalysisError("need at least 3 points to fit")
    ids = [float(p[0]) for p in points]
    rts = [float(p[1]) for p in points]
    if len(set(ids)) < 2:
        raise SingularFitError("all points share a single ID")
    a, b = _ols(ids, rts)
    ss_res = sum((y - (a + b * x)) ** 2 for x, y in zip(ids, rts))
    mean_y = sum(rts) / len(rts)
    ss_tot = sum((y - mean_y) ** 2 for y in rts)
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FittsFit(a=a, b=b, rmse=math.sqrt(ss_res / len(points)),
                    r_squared=r2, n_points=len(points))


def _ols(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    b = sxy / sxx
    return my - b * mx, b


def fit_points_from_summaries(summaries: Sequence[ConditionSummary],
                              technique: str) -> List[Tuple[float, float]]:
    return [(s.id_bits, s.mean_rt_s) for s in summaries
            if s.technique == technique and s.mean_rt_s is not None]


def fit_all(summaries: Sequence[ConditionSummary]) -> Dict[str, FittsFit]:
    fits = {}
    for tech in sorted({s.technique for s in summaries}):
        pts = fit_points_from_summaries(summaries, tech)
        if len(pts) >= 3:
            fits[tech] = fit_fitts(pts)
        else:
            log.warning("technique %s: only %d RT points, skipping fit",
                        tech, len(pts))
    return fits


def crossover_id(fit1: FittsFit, fit2: FittsFit) -> float:
    """ID where two regression lines intersect: (a2 - a1) / (b1 - b2)."""
    if fit1.b == fit2.b:
        raise ParallelLinesError("slopes are equal; lines do not cross")
    return (fit2.a - fit1.a) / (fit1.b - fit2.b)


# ----------------------------------------------------------------------
# report files

CONDITION_COLUMNS = ["technique", "width_px", "amplitude_px", "id_bits",
                     "mean_rt_s", "accuracy", "n_sets", "n_sets_without_rt"]
FIT_COLUMNS = ["technique", "a", "b", "rmse", "r_squared", "throughput",
               "n_points"]
WIDTH_COLUMNS = ["technique", "width_px", "accuracy", "n_trials"]


def accuracy_by_width(summaries: Sequence[ConditionSummary]):
    """Rows of (technique, width, pooled accuracy, trial count)."""
    acc: Dict[Tuple[str, float], List[float]] = {}
    for s in summaries:
        acc.setdefault((s.technique, s.width_px), []).append(s)
    rows = []
    for (tech, w), group in sorted(acc.items()):
        # re-weight by trial counts so conditions with more sets count more
        total_trials = sum(g.n_sets for g in group) * 6
        weighted = sum(g.accuracy * g.n_sets for g in group) / sum(
            g.n_sets for g in group)
        rows.append((tech, w, weighted, total_trials))
    return rows


def emit_report(summaries: Sequence[ConditionSummary],
                fits: Dict[str, FittsFit], out_dir, fmt: str = "csv") -> List[Path]:
    """Write the per-condition, per-technique-fit and accuracy-by-width tables.

    ``fmt`` is "csv" (three delimited files) or "txt" (one structured text
    document). Returns the paths written.
    """
    if not summaries:
        raise AnalysisError("nothing to report: no summaries")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        paths = [out_dir / "conditions.csv", out_dir / "fits.csv",
                 out_dir / "accuracy_by_width.csv"]
        with open(paths[0], "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(CONDITION_COLUMNS)
            for s in summaries:
                w.writerow([s.technique, repr(s.width_px), repr(s.amplitude_px),
                            repr(s.id_bits),
                            "" if s.mean_rt_s is None else repr(s.mean_rt_s),
                            repr(s.accuracy), s.n_sets, s.n_sets_without_rt])
        with open(paths[1], "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(FIT_COLUMNS)
            for tech in sorted(fits):
                f = fits[tech]
                w.writerow([tech, repr(f.a), repr(f.b), repr(f.rmse),
                            repr(f.r_squared),
                            "" if f.throughput is None else repr(f.throughput),
                            f.n_points])
        with open(paths[2], "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(WIDTH_COLUMNS)
            for tech, width, acc, n in accuracy_by_width(summaries):
                w.writerow([tech, repr(width), repr(acc), n])
        return paths
    if fmt == "txt":
        path = out_dir / "report.txt"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("Per-condition summaries\n")
            fh.write(f"{'technique':<12}{'W':>6}{'A':>7}{'ID':>7}"
                     f"{'mean RT (s)':>13}{'accuracy':>10}{'sets':>6}\n")
            for s in summaries:
                rt = "-" if s.mean_rt_s is None else f"{s.mean_rt_s:.3f}"
                fh.write(f"{s.technique:<12}{s.width_px:>6.0f}"
                         f"{s.amplitude_px:>7.0f}{s.id_bits:>7.2f}"
                         f"{rt:>13}{s.accuracy:>10.3f}{s.n_sets:>6}\n")
            fh.write("\nFitted movement-time lines (RT = a + b * ID)\n")
            fh.write(f"{'technique':<12}{'a':>8}{'b':>8}{'RMSE':>8}"
                     f"{'R^2':>8}{'1/b':>8}\n")
            for tech in sorted(fits):
                f = fits[tech]
                tp = "-" if f.throughput is None else f"{f.throughput:.3f}"
                fh.write(f"{tech:<12}{f.a:>8.3f}{f.b:>8.3f}{f.rmse:>8.3f}"
                         f"{f.r_squared:>8.3f}{tp:>8}\n")
            fh.write("\nAccuracy by target width\n")
            fh.write(f"{'technique':<12}{'W':>6}{'accuracy':>10}{'trials':>8}\n")
            for tech, width, acc, n in accuracy_by_width(summaries):
                fh.write(f"{tech:<12}{width:>6.0f}{acc:>10.3f}{n:>8}\n")
        return [path]
    raise AnalysisError(f"unknown report format {fmt!r}")


def load_condition_table(path) -> List[ConditionSummary]:
    """Inverse of the conditions.csv writer; floats round-trip exactly."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.append(ConditionSummary(
                technique=row["technique"],
                width_px=float(row["width_px"]),
                amplitude_px=float(row["amplitude_px"]),
                id_bits=float(row["id_bits"]),
                mean_rt_s=float(row["mean_rt_s"]) if row["mean_rt_s"] else None,
                accuracy=float(row["accuracy"]),
                n_sets=int(row["n_sets"]),
                n_sets_without_rt=int(row["n_sets_without_rt"])))
    return out


def load_fit_table(path) -> Dict[str, FittsFit]:
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out[row["technique"]] = FittsFit(
                a=float(row["a"]), b=float(row["b"]), rmse=float(row["rmse"]),
                r_squared=float(row["r_squared"]), n_points=int(row["n_points"]))
    return out


# ----------------------------------------------------------------------
# trial-level results files (one row per trial)

TRIAL_COLUMNS = ["session", "technique", "width_px", "amplitude_px", "id_bits",
                 "set_index", "trial", "rt_us", "valid", "error_count"]


def write_trial_rows(path, session_id: str, records: Iterable[SetRecord],
                     append: bool = False) -> None:
    mode = "a" if append else "w"
    new_file = mode == "w" or not Path(path).exists() or Path(path).stat().st_size == 0
    with open(path, mode, newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if new_file:
            w.writerow(TRIAL_COLUMNS)
        for rec in records:
            s = rec.spec
            for t in rec.trials:
                w.writerow([session_id, s.technique, repr(s.width_px),
                            repr(s.amplitude_px), repr(s.id_bits), s.set_index,
                            t.trial_index, t.t_end_us - t.t_start_us,
                            int(t.valid), len(t.error_clicks)])


def read_trial_rows(path) -> List[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def set_records_from_rows(rows: Iterable[dict]) -> List[SetRecord]:
    """Regroup flat trial rows into SetRecords (enough detail for summarize)."""
    from .experiment import SetSpec, TrialRecord

    groups: Dict[Tuple, List[dict]] = {}
    for row in rows:
        key = (row["session"], row["technique"], row["width_px"],
               row["amplitude_px"], row["set_index"])
        groups.setdefault(key, []).append(row)
    records = []
    for (session, tech, w, a, set_index), rws in sorted(groups.items()):
        spec = SetSpec(technique=tech, width_px=float(w), amplitude_px=float(a),
                       set_index=int(set_index))
        trials = []
        for r in sorted(rws, key=lambda r: int(r["trial"])):
            rt_us = int(r["rt_us"])
            errs = []
            if r["valid"] in ("0", 0, False):
                errs = [((math.nan, math.nan), 0)] * max(1, int(r["error_count"]))
            trials.append(TrialRecord(
                set_id=int(set_index), trial_index=int(r["trial"]),
                t_start_us=0, t_end_us=rt_us,
                click_position=(math.nan, math.nan), error_clicks=errs))
        records.append(SetRecord(spec, trials))
    return records
