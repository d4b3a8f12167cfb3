"""
Relaxation-rate study: sweep nu, compare each relaxing run with the relaxed
reference run, and fit the log-log slope of the differences.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from diagnostics.relaxation import delta_quantities, pressure_gap_trace
from littlewood_paley.norms import besov_norm
from models.params import ModelParams
from reformulation.system import to_reform_state
from services.initial_data import ill_prepared_initial_data, make_initial_data, relaxed_initial_data
from services.run_config import RunConfig
from timestepper.integrator import Trajectory, integrate
from utils.errors import NumericalError

logger = logging.getLogger(__name__)

MIN_POINTS = 3
MIN_DECADES = 0.5
ROUNDOFF_FLOOR = 1e-12
MONOTONICITY_SLACK = 0.10


class FitIllConditionedError(NumericalError):
    """Raised when a log-log fit has too few, too close or degenerate points."""
    code = "FIT_ILL_CONDITIONED"


def fit_loglog(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float, float]:
    """
    Least-squares line through (log x, log y).

    Args:
        xs: Positive abscissae
        ys: Positive ordinates

    Returns:
        (slope, intercept, r_squared), intercept in natural-log units

    Raises:
        FitIllConditionedError: On fewer than 3 points, nonpositive data,
            x-spread below half a decade or ordinates at roundoff level
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.size < MIN_POINTS:
        raise FitIllConditionedError(f"Need at least {MIN_POINTS} paired points, got {x.size} and {y.size}")
    if np.any(x <= 0) or np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise FitIllConditionedError("Log-log fit needs positive finite data")
    spread = math.log10(x.max() / x.min())
    if spread < MIN_DECADES:
        raise FitIllConditionedError(f"x-spread of {spread:.2f} decades is below {MIN_DECADES}")
    if np.all(y < ROUNDOFF_FLOOR):
        raise FitIllConditionedError(f"All ordinates below {ROUNDOFF_FLOOR:.0e}; nothing to fit")

    log_x, log_y = np.log(x), np.log(y)
    slope, intercept = np.polyfit(log_x, log_y, 1)
    residual = log_y - (slope * log_x + intercept)
    total = float(np.sum((log_y - log_y.mean()) ** 2))
    r_squared = 1.0 if total == 0.0 else 1.0 - float(np.sum(residual ** 2)) / total
    return float(slope), float(intercept), r_squared


@dataclass
class RateStudyResult:
    """Per-nu error norms and the fitted rate, nu_values in decreasing order."""

    nu_values: List[float]
    error_norms: List[float]
    slope: float
    intercept: float
    r_squared: float
    du_l1: List[float] = field(default_factory=list)
    pressure_gap_sup: List[float] = field(default_factory=list)
    damped_integral: List[float] = field(default_factory=list)
    pressure_gap_fit: Optional[Dict[str, float]] = None
    monotone: bool = True
    discrepancy: float = 0.0

    @property
    def damped_uniformity_ratio(self) -> float:
        return max(self.damped_integral) / min(self.damped_integral) if self.damped_integral else float("nan")

    def rows(self):
        """CSV rows (nu, error_norm, du_l1, pressure_gap_sup, damped_integral)."""
        return list(zip(self.nu_values, self.error_norms, self.du_l1,
                        self.pressure_gap_sup, self.damped_integral))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "nu_values": self.nu_values,
            "error_norms": self.error_norms,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "du_l1": self.du_l1,
            "pressure_gap_sup": self.pressure_gap_sup,
            "pressure_gap_fit": self.pressure_gap_fit,
            "damped_integral": self.damped_integral,
            "damped_uniformity_ratio": self.damped_uniformity_ratio,
            "monotone": self.monotone,
            "discrepancy": self.discrepancy,
        }


def _step_for(cfg: RunConfig):
    return cfg.step.model_copy(update={"snapshot_every": cfg.rate_study.snapshot_every})


def _run_relaxing(config_data: Dict[str, Any], nu: float) -> Tuple[Trajectory, Trajectory]:
    """
    Worker: the relaxing runs at one nu (module level so it pickles).

    Returns:
        (run from the sqrt(nu)-offset data, run from the relaxed data); the
        two coincide when rate_study.discrepancy is 0
    """
    cfg = RunConfig.model_validate(config_data)
    p = cfg.model.with_nu(nu)
    step = _step_for(cfg)
    prepared = relaxed_initial_data(make_initial_data(cfg), cfg.model)
    logger.info(f"Rate study: relaxing run nu = {nu:.3e}, discrepancy = {cfg.rate_study.discrepancy}")
    offset = integrate(ill_prepared_initial_data(prepared, cfg, nu), p, step, model="bn")
    if cfg.rate_study.discrepancy == 0.0:
        return offset, offset
    return offset, integrate(prepared, p, step, model="bn")


def _left_rectangle(times: Sequence[float], values: Sequence[float]) -> float:
    return float(sum((times[k + 1] - times[k]) * values[k] for k in range(len(times) - 1)))


def damped_mode_integral(trajectory: Trajectory, p: ModelParams, s: float) -> float:
    """Left-rectangle integral of ||w / nu||_{B^s} over the recorded times of a BN run."""
    values = [besov_norm(to_reform_state(state, p).w, s).total / p.nu for state in trajectory.states]
    return _left_rectangle(trajectory.times, values)


def _run_metrics(relaxing: Trajectory, prepared: Trajectory, relaxed: Trajectory,
                 cfg: RunConfig, nu: float) -> Dict[str, float]:
    p = cfg.model.with_nu(nu)
    dim = cfg.grid.dim
    s_low, s_high, s_damped = dim / 2.0 - 1.5, dim / 2.0 - 0.5, dim / 2.0 - 1.0
    if len(relaxing.states) != len(relaxed.states):
        raise NumericalError("Relaxing and relaxed runs recorded different snapshot counts")

    errors, du_norms = [], []
    for bn_state, kapila in zip(relaxing.states, relaxed.states):
        delta = delta_quantities(bn_state, kapila, p)
        errors.append(sum(besov_norm(f, s_low).total + besov_norm(f, s_high).total for f in delta.primary()))
        du_norms.append(sum(besov_norm(f, s_high).total for f in delta.delta_u))

    gap = pressure_gap_trace(relaxing, p, [s_high])
    return {
        "error_norm": max(errors),
        "du_l1": _left_rectangle(relaxing.times, du_norms),
        "pressure_gap_sup": gap.sup(s_high),
        "damped_integral": damped_mode_integral(prepared, p, s_damped),
    }


def check_monotone(errors: Sequence[float], slack: float = MONOTONICITY_SLACK) -> bool:
    """True if errors (ordered by decreasing nu) never grow by more than slack."""
    return all(later <= (1.0 + slack) * earlier for earlier, later in zip(errors, errors[1:]))


def run_rate_study(base: RunConfig, nus: Optional[Sequence[float]] = None,
                   workers: Optional[int] = None) -> RateStudyResult:
    """
    Sweep nu and fit the relaxation rate.

    The relaxed reference run does not depend on nu and is computed once.
    Each relaxing run starts rate_study.discrepancy * sqrt(nu) away from the
    relaxed data, so its differences to the reference decay like sqrt(nu);
    the damped-mode integral is taken on a run from the relaxed data itself.
    Relaxing runs may execute in worker processes; results are reduced in
    nu order.

    Args:
        base: Run configuration (model.mu and model.lambda are rescaled per nu)
        nus: Relaxation times; defaults to base.rate_study.nu_values
        workers: Process count; defaults to base.rate_study.workers

    Returns:
        RateStudyResult

    Raises:
        FitIllConditionedError: If the error norms cannot be fitted
    """
    nu_values = sorted(nus if nus is not None else base.rate_study.nu_values, reverse=True)
    if len(nu_values) < MIN_POINTS:
        raise FitIllConditionedError(f"Need at least {MIN_POINTS} nu values, got {len(nu_values)}")
    workers = workers or base.rate_study.workers

    initial = make_initial_data(base)
    logger.info("Rate study: relaxed reference run")
    relaxed = integrate(relaxed_initial_data(initial, base.model), base.model, _step_for(base), model="kapila")

    config_data = base.model_dump(mode="json", by_alias=True)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {nu: pool.submit(_run_relaxing, config_data, nu) for nu in nu_values}
            trajectories = {nu: futures[nu].result() for nu in nu_values}
    else:
        trajectories = {nu: _run_relaxing(config_data, nu) for nu in nu_values}

    metrics = [_run_metrics(*trajectories[nu], relaxed, base, nu) for nu in nu_values]
    errors = [m["error_norm"] for m in metrics]
    for nu, m in zip(nu_values, metrics):
        logger.info(f"nu = {nu:.3e}: error = {m['error_norm']:.4e}, gap sup = {m['pressure_gap_sup']:.4e}")

    monotone = check_monotone(errors)
    if not monotone:
        logger.warning(f"Error norms are not nonincreasing as nu decreases: {errors}")

    slope, intercept, r_squared = fit_loglog(nu_values, errors)
    gaps = [m["pressure_gap_sup"] for m in metrics]
    try:
        gap_slope, gap_intercept, gap_r2 = fit_loglog(nu_values, gaps)
        gap_fit = {"slope": gap_slope, "intercept": gap_intercept, "r_squared": gap_r2}
    except FitIllConditionedError as e:
        logger.warning(f"Pressure-gap fit skipped: {e}")
        gap_fit = None

    logger.info(f"Rate study: slope = {slope:.3f}, r^2 = {r_squared:.3f}")
    return RateStudyResult(
        nu_values=list(nu_values),
        error_norms=errors,
        slope=slope,
        intercept=intercept,
        r_squared=r_squared,
        du_l1=[m["du_l1"] for m in metrics],
        pressure_gap_sup=gaps,
        damped_integral=[m["damped_integral"] for m in metrics],
        pressure_gap_fit=gap_fit,
        monotone=monotone,
        discrepancy=base.rate_study.discrepancy,
    )
