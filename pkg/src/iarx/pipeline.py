"""End-to-end forecasting pipeline and experiment drivers.

The pipeline fits a pattern space to a scalar series, encodes the series
as class intervals, identifies the interval ARX parameters on the encoded
series, and scores one-step-ahead forecasts. A forecast step produces two
intervals: the preliminary model output, and the final output obtained by
classifying the preliminary interval back into the space and measuring the
winning class - so every final output is bit-identical to a class interval.

Experiment drivers cover accuracy-vs-class-count sweeps and the radius
perturbation study, plus the fixed CSV writers used by the command line.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ClusteringError, DataError, IdentificationError
from .intervals import Interval
from .model import IarxParams, build_regressors, fit, predict
from .pattern_space import FcmConfig, PatternSpace, build_space

__all__ = [
    "EncodedSeries",
    "MovingPatternModel",
    "ForecastStep",
    "ForecastRecord",
    "RmseReport",
    "SweepCell",
    "RobustnessResult",
    "fit_model",
    "forecast_step",
    "forecast_series",
    "evaluate",
    "rmse_from_records",
    "sweep_cpms",
    "perturb_radius_params",
    "perturb_center_params",
    "robustness_experiment",
    "write_rmse_csv",
    "write_trace_csv",
    "write_sweep_csv",
    "write_robust_csv",
    "RESULT_HEADER",
    "TRACE_HEADER",
]

# Shared RMSE column block: preliminary then final, upper before lower.
RESULT_HEADER = "cpms,prelim_upper_rmse,prelim_lower_rmse,final_upper_rmse,final_lower_rmse"
TRACE_HEADER = "k,dx_lower,dx_upper,prelim_lower,prelim_upper,final_lower,final_upper,class_id"
ROBUST_HEADER = (
    "params,prelim_upper_rmse,prelim_lower_rmse,final_upper_rmse,final_lower_rmse,final_class_match"
)


@dataclass(frozen=True)
class EncodedSeries:
    """A series of class intervals paired with its crisp input series."""

    dx: tuple[Interval, ...]
    u: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=float, copy=True).ravel()
        if len(self.dx) != u.size:
            raise DataError(
                f"encoded series length {len(self.dx)} does not match input length {u.size}"
            )
        u.setflags(write=False)
        object.__setattr__(self, "dx", tuple(self.dx))
        object.__setattr__(self, "u", u)

    @property
    def n_samples(self) -> int:
        return len(self.dx)


@dataclass(frozen=True)
class MovingPatternModel:
    """A fitted pattern space plus the interval ARX parameters on it."""

    space: PatternSpace
    params: IarxParams

    def __post_init__(self):
        if self.space.cpms < 2:
            raise ValueError(f"model needs cpms >= 2, got {self.space.cpms}")

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def m(self) -> int:
        return self.params.m


@dataclass(frozen=True)
class ForecastStep:
    """One forecast: preliminary interval, snapped final interval, class id."""

    prelim: Interval
    final: Interval
    class_id: int


@dataclass(frozen=True)
class ForecastRecord:
    """A scored forecast step: the encoded actual plus the forecast triple."""

    k: int
    actual: Interval
    prelim: Interval
    final: Interval
    class_id: int


@dataclass(frozen=True)
class RmseReport:
    """Root-mean-square errors of both bounds, preliminary and final."""

    prelim_upper: float
    prelim_lower: float
    final_upper: float
    final_lower: float

    def as_row(self) -> tuple[float, float, float, float]:
        return (self.prelim_upper, self.prelim_lower, self.final_upper, self.final_lower)


@dataclass(frozen=True)
class SweepCell:
    """One sweep entry; exactly one of ``report`` / ``error`` is set."""

    cpms: int
    report: RmseReport | None
    error: str | None


@dataclass(frozen=True)
class RobustnessResult:
    """Paired scores for original and perturbed radius parameters."""

    original: RmseReport
    perturbed: RmseReport
    final_class_match: bool
    perturbed_params: IarxParams


def fit_model(data, u, cpms: int, n: int, m: int, fcm: FcmConfig | None = None) -> MovingPatternModel:
    """Fit the full pipeline on a scalar series and its input series.

    Builds a ``cpms``-class pattern space, encodes the series, and
    identifies both parameter channels on the encoded intervals. ``fcm``
    supplies clustering settings; its ``k`` is overridden by ``cpms``.
    Clustering and identification errors propagate; no retries are made.
    """
    data = np.asarray(data, dtype=float).ravel()
    u = np.asarray(u, dtype=float).ravel()
    if cpms < 2:
        raise ValueError(f"cpms must be >= 2, got {cpms}")
    if data.size != u.size:
        raise DataError(f"data length {data.size} does not match input length {u.size}")
    if data.size < cpms:
        raise DataError(f"need at least cpms = {cpms} samples, got {data.size}")
    if data.size < 1 + n + m + max(n, m):
        raise DataError(
            f"need at least {1 + n + m + max(n, m)} samples to fit orders n={n}, m={m}"
        )
    config = FcmConfig(k=cpms) if fcm is None else replace(fcm, k=cpms)
    space = build_space(data, config)
    dx = space.encode_series(data)
    params = fit(dx, u, n, m)
    return MovingPatternModel(space=space, params=params)


def forecast_step(model: MovingPatternModel, history, u, k: int) -> ForecastStep:
    """Forecast step ``k`` from an encoded history and the input series.

    The preliminary interval comes straight from the model; the final
    interval is the measured class nearest the preliminary one.
    """
    regr = build_regressors(history, u, k, model.n, model.m)
    prelim = predict(model.params, regr)
    class_id = model.space.classify(prelim)
    return ForecastStep(prelim=prelim, final=model.space.measure(class_id), class_id=class_id)


def forecast_series(
    model: MovingPatternModel, data, u, start: int | None = None, end: int | None = None
) -> list[ForecastRecord]:
    """One-step-ahead forecasts over ``[start, end)`` with true encoded history.

    Each step is predicted from the encoded actuals, never from earlier
    forecasts. The default range scores every step with a full lag window,
    i.e. ``max(n, m) .. len(data) - 1``.
    """
    data = np.asarray(data, dtype=float).ravel()
    u = np.asarray(u, dtype=float).ravel()
    if data.size != u.size:
        raise DataError(f"data length {data.size} does not match input length {u.size}")
    kmin = max(model.n, model.m)
    start = kmin if start is None else start
    end = data.size if end is None else end
    if start < kmin:
        raise DataError(f"start {start} is inside the lag warm-up (first valid step is {kmin})")
    if end > data.size:
        raise DataError(f"end {end} is beyond the {data.size} samples")
    if start >= end:
        raise DataError(f"empty scored range [{start}, {end})")

    dx = model.space.encode_series(data)
    records = []
    for k in range(start, end):
        step = forecast_step(model, dx, u, k)
        records.append(
            ForecastRecord(
                k=k, actual=dx[k], prelim=step.prelim, final=step.final, class_id=step.class_id
            )
        )
    return records


def rmse_from_records(records) -> RmseReport:
    """Bound-wise RMSEs of preliminary and final forecasts against the actuals."""
    if not records:
        raise DataError("cannot score an empty record list")
    actual_lower = np.array([r.actual.lower for r in records])
    actual_upper = np.array([r.actual.upper for r in records])

    def rmse(errors: np.ndarray) -> float:
        return float(np.sqrt(np.mean(errors**2)))

    return RmseReport(
        prelim_upper=rmse(actual_upper - np.array([r.prelim.upper for r in records])),
        prelim_lower=rmse(actual_lower - np.array([r.prelim.lower for r in records])),
        final_upper=rmse(actual_upper - np.array([r.final.upper for r in records])),
        final_lower=rmse(actual_lower - np.array([r.final.lower for r in records])),
    )


def evaluate(
    model: MovingPatternModel, data, u, start: int | None = None, end: int | None = None
) -> RmseReport:
    """Score one-step-ahead forecasts; see :func:`forecast_series` for the range."""
    return rmse_from_records(forecast_series(model, data, u, start=start, end=end))


def sweep_cpms(data, u, cpms_values, n: int, m: int, fcm: FcmConfig | None = None) -> list[SweepCell]:
    """Fit and score one model per class count; failures stay in the table.

    A failing cell (for example, more classes than distinct data values)
    records its error message and the sweep moves on.
    """
    cells = []
    for cpms in cpms_values:
        try:
            model = fit_model(data, u, int(cpms), n, m, fcm=fcm)
            report = evaluate(model, data, u)
        except (ClusteringError, IdentificationError, DataError, ValueError) as exc:
            cells.append(SweepCell(cpms=int(cpms), report=None, error=str(exc)))
        else:
            cells.append(SweepCell(cpms=int(cpms), report=report, error=None))
    return cells


def perturb_radius_params(radius_coeffs, magnitude: float, seed: int) -> np.ndarray:
    """Add independent Uniform[0, magnitude] offsets to the radius coefficients.

    Offsets are one-sided so the perturbed coefficients stay nonnegative.
    Deterministic for a fixed seed; magnitude zero returns the input unchanged.
    """
    if magnitude < 0.0:
        raise ValueError(f"magnitude must be >= 0, got {magnitude!r}")
    coeffs = np.asarray(radius_coeffs, dtype=float).ravel()
    rng = np.random.default_rng(seed)
    return coeffs + rng.uniform(0.0, magnitude, size=coeffs.size)


def perturb_center_params(center_coeffs, magnitude: float, seed: int) -> np.ndarray:
    """Add independent Uniform[-magnitude, +magnitude] offsets to the center coefficients.

    An optional extension of the robustness experiment beyond its standard
    radius-only form; disabled unless explicitly requested.
    """
    if magnitude < 0.0:
        raise ValueError(f"magnitude must be >= 0, got {magnitude!r}")
    coeffs = np.asarray(center_coeffs, dtype=float).ravel()
    rng = np.random.default_rng(seed)
    return coeffs + rng.uniform(-magnitude, magnitude, size=coeffs.size)


def robustness_experiment(
    model: MovingPatternModel,
    data,
    u,
    magnitude: float,
    seed: int,
    center_magnitude: float = 0.0,
) -> RobustnessResult:
    """Score the model before and after perturbing its radius coefficients.

    Also reports whether every scored step kept its final class - when it
    did, the perturbation was fully absorbed by the classification stage
    and the final RMSEs match bit for bit. ``center_magnitude`` optionally
    perturbs the center coefficients too (seeded independently).
    """
    baseline = forecast_series(model, data, u)
    perturbed_c = perturb_radius_params(model.params.C, magnitude, seed)
    perturbed_params = replace(model.params, C=perturbed_c)
    if center_magnitude > 0.0:
        perturbed_a = perturb_center_params(model.params.A, center_magnitude, seed + 1)
        perturbed_params = replace(perturbed_params, A=perturbed_a)
    perturbed_model = MovingPatternModel(space=model.space, params=perturbed_params)
    shifted = forecast_series(perturbed_model, data, u)
    match = all(a.class_id == b.class_id for a, b in zip(baseline, shifted))
    return RobustnessResult(
        original=rmse_from_records(baseline),
        perturbed=rmse_from_records(shifted),
        final_class_match=match,
        perturbed_params=perturbed_params,
    )


def _fmt(value: float) -> str:
    """Shortest digit string that round-trips the exact float."""
    return repr(float(value))


def write_rmse_csv(path, cpms: int, report: RmseReport) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(RESULT_HEADER + "\n")
        fh.write(",".join([str(cpms)] + [_fmt(v) for v in report.as_row()]) + "\n")


def write_trace_csv(path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(TRACE_HEADER + "\n")
        for r in records:
            cells = (
                str(r.k),
                _fmt(r.actual.lower),
                _fmt(r.actual.upper),
                _fmt(r.prelim.lower),
                _fmt(r.prelim.upper),
                _fmt(r.final.lower),
                _fmt(r.final.upper),
                str(r.class_id),
            )
            fh.write(",".join(cells) + "\n")


def write_sweep_csv(path, cells) -> None:
    """Write sweep results; a failed cell keeps its row with empty RMSE fields."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(RESULT_HEADER + "\n")
        for cell in cells:
            if cell.report is None:
                fh.write(f"{cell.cpms},,,,\n")
            else:
                fh.write(
                    ",".join([str(cell.cpms)] + [_fmt(v) for v in cell.report.as_row()]) + "\n"
                )


def write_robust_csv(path, result: RobustnessResult) -> None:
    """Two labeled rows (original, perturbed) plus the digestion flag."""
    flag = "true" if result.final_class_match else "false"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(ROBUST_HEADER + "\n")
        for label, report in (("original", result.original), ("perturbed", result.perturbed)):
            fh.write(",".join([label] + [_fmt(v) for v in report.as_row()] + [flag]) + "\n")
