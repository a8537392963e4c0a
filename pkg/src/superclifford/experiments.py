"""Monte Carlo drivers, scrambling-time extraction and fits."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .ensembles import EnsembleSpec, realization_circuit
from .entropy import prefix_entropy
from .otoc import OtocValue, otoc_trace, plateau_value, support_size
from .pauli import BasisOperatorLabel
from .tableau import GateOp, apply_layer, new_computational

FLOAT_FMT = "{:.10f}"


class UnsaturatedError(RuntimeError):
    """The curve never came within epsilon of saturation inside the horizon."""


class FitWindowError(ValueError):
    """The requested fit window is empty or contains unusable points."""


def _map_ordered(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


# -- entropy ensembles --------------------------------------------------------


@dataclass
class EntropyCurve:
    times: np.ndarray
    mean_entropy: np.ndarray
    std_err: np.ndarray
    n_realizations: int
    spec: EnsembleSpec
    samples: np.ndarray | None = field(default=None, repr=False)

    @property
    def saturation(self) -> int:
        return self.spec.saturation

    @classmethod
    def from_samples(cls, spec: EnsembleSpec, times: Sequence[int], samples: np.ndarray) -> "EntropyCurve":
        samples = np.asarray(samples, dtype=np.int64)
        r = samples.shape[0]
        totals = samples.sum(axis=0)
        mean = totals / r
        if r > 1:
            sq = (samples * samples).sum(axis=0)
            var = (sq - totals * totals / r) / (r - 1)
            stderr = np.sqrt(np.maximum(var, 0.0) / r)
        else:
            stderr = np.zeros_like(mean)
        return cls(np.asarray(times), mean, stderr, r, spec, samples)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "mean", "stderr", "n"])
        for t, m, s in zip(self.times, self.mean_entropy, self.std_err):
            w.writerow([int(t), FLOAT_FMT.format(m), FLOAT_FMT.format(s), self.n_realizations])
        return buf.getvalue()


def entropy_realization(spec: EnsembleSpec, index: int) -> np.ndarray:
    """Entropy of the first floor(mN) qubits at every recorded time for one realization."""
    n = spec.n_qubits
    n_a = spec.region_size
    layers = realization_circuit(spec, index)
    t = new_computational(BasisOperatorLabel.zeros(n))
    record = set(spec.record_times())
    out = [prefix_entropy(t, n_a)]
    for step, layer in enumerate(layers, start=1):
        apply_layer(t, layer)
        if step in record:
            out.append(prefix_entropy(t, n_a))
    return np.asarray(out, dtype=np.int32)


class _EntropyJob:
    def __init__(self, spec: EnsembleSpec):
        self.spec = spec

    def __call__(self, index: int) -> np.ndarray:
        return entropy_realization(self.spec, index)


def run_entropy_ensemble(spec: EnsembleSpec, workers: int = 1) -> EntropyCurve:
    rows = _map_ordered(_EntropyJob(spec), list(range(spec.realizations)), workers)
    return EntropyCurve.from_samples(spec, spec.record_times(), np.vstack(rows))


def first_crossing(times: Sequence[int], values: Sequence[float], threshold: float) -> int:
    for t, v in zip(times, values):
        if v >= threshold:
            return int(t)
    raise UnsaturatedError(f"never reached {threshold} within t <= {times[-1]}")


def extract_scrambling_time(curve: EntropyCurve, epsilon: float | None = None) -> int:
    """Smallest recorded t with mean entropy >= saturation - epsilon."""
    eps = curve.spec.epsilon if epsilon is None else epsilon
    return first_crossing(curve.times, curve.mean_entropy, curve.saturation - eps)


@dataclass
class ScramblingTimes:
    mean: float
    std_err: float
    n_used: int
    n_unsaturated: int
    per_realization: list[int | None]


def per_realization_scrambling_times(source: EnsembleSpec | EntropyCurve, epsilon: float | None = None,
                                     workers: int = 1) -> ScramblingTimes:
    """Extract t* for each realization, then average the saturated ones."""
    curve = run_entropy_ensemble(source, workers) if isinstance(source, EnsembleSpec) else source
    if curve.samples is None:
        raise ValueError("curve carries no per-realization samples")
    eps = curve.spec.epsilon if epsilon is None else epsilon
    threshold = curve.saturation - eps
    times: list[int | None] = []
    for row in curve.samples:
        try:
            times.append(first_crossing(curve.times, row, threshold))
        except UnsaturatedError:
            times.append(None)
    used = np.array([t for t in times if t is not None], dtype=float)
    if used.size == 0:
        raise UnsaturatedError("no realization saturated within the horizon")
    stderr = float(used.std(ddof=1) / math.sqrt(used.size)) if used.size > 1 else 0.0
    return ScramblingTimes(float(used.mean()), stderr, int(used.size), len(times) - int(used.size), times)


# -- fits -----------------------------------------------------------------------


@dataclass
class FitResult:
    params: dict[str, float]
    r_squared: float
    window: tuple[float, float]
    residuals: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "r_squared": self.r_squared,
            "window": list(self.window),
            "residuals": self.residuals,
        }


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, np.ndarray]:
    """OLS y = slope * x + intercept; returns slope, intercept, R^2, residuals."""
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res == 0.0 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2, resid


def _resid_summary(resid: np.ndarray) -> dict[str, float]:
    return {
        "n_points": int(resid.size),
        "rms": float(np.sqrt(np.mean(resid**2))),
        "max_abs": float(np.max(np.abs(resid))),
    }


def default_fit_window(curve: EntropyCurve, t_start: float = 50.0, min_deficit: float = 1.0) -> tuple[float, float]:
    """From ``t_start`` up to the last time before the mean deficit drops below ``min_deficit``."""
    return _default_window(curve.times, curve.mean_entropy, curve.saturation, t_start, min_deficit)


def _default_window(times, mean, saturation, t_start, min_deficit) -> tuple[float, float]:
    t_end = None
    for t, m in zip(times, mean):
        if t < t_start:
            continue
        if saturation - m < min_deficit:
            break
        t_end = float(t)
    if t_end is None:
        raise FitWindowError(f"no point with t >= {t_start} and deficit >= {min_deficit}")
    return float(t_start), t_end


def fit_exponential_arrays(times, mean_entropy, saturation: float, n: int,
                           window: tuple[float, float] | None = None, min_deficit: float = 1.0) -> FitResult:
    """Straight-line fit of ln dS(t), dS = (S_sat - S(t)) / N, over ``window``.

    Returns ``lambda`` (minus the slope) and ``alpha`` (exp of the intercept).
    """
    times = np.asarray(times, dtype=float)
    mean = np.asarray(mean_entropy, dtype=float)
    if window is None:
        window = _default_window(times, mean, saturation, 50.0, min_deficit)
    t0, t1 = window
    sel = (times >= t0) & (times <= t1)
    if sel.sum() < 2:
        raise FitWindowError(f"window {window} holds fewer than two points")
    ds = (saturation - mean[sel]) / n
    if np.any(ds <= 0):
        raise FitWindowError(f"deficit is not positive everywhere in window {window}")
    slope, intercept, r2, resid = _linear_fit(times[sel], np.log(ds))
    return FitResult({"lambda": -slope, "alpha": math.exp(intercept)}, r2, (t0, t1), _resid_summary(resid))


def fit_exponential_saturation(curve: EntropyCurve, window: tuple[float, float] | None = None,
                               min_deficit: float = 1.0) -> FitResult:
    return fit_exponential_arrays(curve.times, curve.mean_entropy, curve.saturation,
                                  curve.spec.n_qubits, window, min_deficit)


def fit_log_scaling(points: Sequence[tuple[float, float]]) -> FitResult:
    """Least squares t* = a ln N + b."""
    pts = [(float(n), float(t)) for n, t in points]
    ns = [n for n, _ in pts]
    if len(pts) < 2:
        raise ValueError("need at least two (N, t*) points")
    if len(set(ns)) != len(ns):
        raise ValueError("system sizes must be distinct")
    if min(ns) <= 0:
        raise ValueError("system sizes must be positive")
    x = np.log(np.array(ns))
    y = np.array([t for _, t in pts])
    a, b, r2, resid = _linear_fit(x, y)
    return FitResult({"a": a, "b": b}, r2, (min(ns), max(ns)), _resid_summary(resid))


# -- OTOC ensembles -----------------------------------------------------------------

ZERO_KEY = "zero"


@dataclass
class OtocTrace:
    times: list[int]
    mean_f: list[float]
    fraction_not_scrambled: list[float]
    k_histogram: list[dict[str, int]]
    plateau: float
    n_realizations: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "mean_f", "fraction_off_plateau", "k_histogram"])
        for t, m, f, h in zip(self.times, self.mean_f, self.fraction_not_scrambled, self.k_histogram):
            w.writerow([t, FLOAT_FMT.format(m), FLOAT_FMT.format(f), json.dumps(h, sort_keys=True)])
        return buf.getvalue()


def _encode(v: OtocValue) -> int:
    return -1 if v.is_zero else v.k


class _OtocJob:
    def __init__(self, spec: EnsembleSpec, v_gates, w0: BasisOperatorLabel, times: list[int]):
        self.spec, self.v_gates, self.w0, self.times = spec, list(v_gates), w0, times

    def __call__(self, index: int) -> list[int]:
        layers = realization_circuit(self.spec, index, steps=max(self.times, default=0))
        return [_encode(v) for v in otoc_trace(layers, self.v_gates, self.w0, self.times)]


def _matches_plateau(code: int, plateau: float) -> bool:
    value = 0.0 if code < 0 else 2.0 ** (-code / 2)
    return abs(value - plateau) <= 1e-9


def aggregate_otoc(codes: np.ndarray, times: list[int], plateau: float) -> OtocTrace:
    """Reduce per-realization exact results (-1 for zero, else k) into an OtocTrace."""
    r = codes.shape[0]
    means, fracs, hists = [], [], []
    for j in range(len(times)):
        counts = Counter(int(c) for c in codes[:, j])
        # summing per k keeps the mean independent of realization order
        total = math.fsum(cnt * 2.0 ** (-k / 2) for k, cnt in sorted(counts.items()) if k >= 0)
        means.append(total / r)
        off = sum(cnt for k, cnt in counts.items() if not _matches_plateau(k, plateau))
        fracs.append(off / r)
        hists.append({(ZERO_KEY if k < 0 else str(k)): cnt for k, cnt in sorted(counts.items())})
    return OtocTrace(list(times), means, fracs, hists, plateau, r)


def run_otoc_ensemble(spec: EnsembleSpec, v_gates: Sequence[GateOp], w0: BasisOperatorLabel,
                      times: Sequence[int], workers: int = 1) -> OtocTrace:
    if w0.n != spec.n_qubits:
        raise ValueError("w0 length must equal N")
    times = sorted(set(int(t) for t in times))
    region = support_size(v_gates)
    if region > 5:
        raise ValueError("V must act within the first 5 qubits")
    plateau = plateau_value(v_gates, max(region, 1))
    rows = _map_ordered(_OtocJob(spec, v_gates, w0, times), list(range(spec.realizations)), workers)
    return aggregate_otoc(np.array(rows, dtype=np.int64).reshape(spec.realizations, len(times)), times, plateau)


__all__ = [
    "EntropyCurve",
    "FitResult",
    "FitWindowError",
    "OtocTrace",
    "ScramblingTimes",
    "UnsaturatedError",
    "aggregate_otoc",
    "default_fit_window",
    "entropy_realization",
    "extract_scrambling_time",
    "first_crossing",
    "fit_exponential_arrays",
    "fit_exponential_saturation",
    "fit_log_scaling",
    "per_realization_scrambling_times",
    "run_entropy_ensemble",
    "run_otoc_ensemble",
]
