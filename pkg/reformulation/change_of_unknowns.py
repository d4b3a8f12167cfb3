"""
Change of unknowns (alpha_plus, rho_plus, rho_minus) -> (w, R, Y) and its
pointwise Newton inverse.

    w = (P+ - P-) / (g+/a+ + g-/a-)
    R = P - (g+ - g-) w
    Y = a+ rho+ / (a+ rho+ + a- rho-)
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np

from config import LAB_CONFIG
from spectral.fields import Field
from models.equations import VACUUM_TOL, VacuumVolumeFractionError, phase_pressure_values
from models.params import ModelParams
from utils.errors import NumericalError

logger = logging.getLogger(__name__)

NEWTON_TOL = 1e-13
STAGNATION_LIMIT = 4


class NewtonDivergedError(NumericalError):
    """Raised when the pointwise inversion fails to converge."""
    code = "NEWTON_DIVERGED"


class OutsideInversionBallError(NumericalError):
    """Raised when (w, R, Y) leaves the ball where the inverse is computed."""
    code = "OUTSIDE_INVERSION_BALL"


def _check_alpha(alpha: np.ndarray) -> None:
    product = alpha * (1.0 - alpha)
    if np.min(product) < VACUUM_TOL:
        raise VacuumVolumeFractionError(f"min alpha+ alpha- = {np.min(product):.3e}")


def gap_weight(alpha: np.ndarray, p: ModelParams) -> Tuple[np.ndarray, np.ndarray]:
    """c = a+ a- / (g+ a- + g- a+) and dc/da+ = (g+ a-^2 - g- a+^2) / D^2."""
    a, b = alpha, 1.0 - alpha
    d = p.gamma_plus * b + p.gamma_minus * a
    return a * b / d, (p.gamma_plus * b ** 2 - p.gamma_minus * a ** 2) / d ** 2


def phi_values(alpha: np.ndarray, rho_plus: np.ndarray, rho_minus: np.ndarray,
               p: ModelParams) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Array form of the forward map."""
    _check_alpha(alpha)
    p_plus = phase_pressure_values(rho_plus, "+", p)
    p_minus = phase_pressure_values(rho_minus, "-", p)
    a, b = alpha, 1.0 - alpha
    c, _ = gap_weight(alpha, p)
    w = c * (p_plus - p_minus)
    big_r = a * p_plus + b * p_minus - (p.gamma_plus - p.gamma_minus) * w
    mass_plus = a * rho_plus
    y = mass_plus / (mass_plus + b * rho_minus)
    return w, big_r, y


def phi_jacobian_values(alpha: np.ndarray, rho_plus: np.ndarray, rho_minus: np.ndarray,
                        p: ModelParams) -> np.ndarray:
    """Jacobian of the forward map, shape (..., 3, 3), rows (w, R, Y)."""
    p_plus = phase_pressure_values(rho_plus, "+", p)
    p_minus = phase_pressure_values(rho_minus, "-", p)
    dp_plus = p.gamma_plus * p_plus / rho_plus
    dp_minus = p.gamma_minus * p_minus / rho_minus
    a, b = alpha, 1.0 - alpha
    c, dc = gap_weight(alpha, p)
    gap = p_plus - p_minus
    jump = p.gamma_plus - p.gamma_minus
    rho = a * rho_plus + b * rho_minus

    jac = np.empty(np.shape(alpha) + (3, 3))
    jac[..., 0, 0] = dc * gap
    jac[..., 0, 1] = c * dp_plus
    jac[..., 0, 2] = -c * dp_minus
    jac[..., 1, 0] = gap - jump * dc * gap
    jac[..., 1, 1] = a * dp_plus - jump * c * dp_plus
    jac[..., 1, 2] = b * dp_minus + jump * c * dp_minus
    jac[..., 2, 0] = rho_plus * rho_minus / rho ** 2
    jac[..., 2, 1] = a * b * rho_minus / rho ** 2
    jac[..., 2, 2] = -a * b * rho_plus / rho ** 2
    return jac


def phi_forward(alpha_plus: Field, rho_plus: Field, rho_minus: Field,
                p: ModelParams) -> Tuple[Field, Field, Field]:
    """
    Forward change of unknowns.
    
    Args:
        alpha_plus: Volume fraction of the + phase, in (0, 1)
        rho_plus: Density of the + phase
        rho_minus: Density of the - phase
        p: Model parameters
        
    Returns:
        Fields (w, R, Y)
        
    Raises:
        VacuumVolumeFractionError: If alpha_plus leaves (0, 1)
    """
    grid = alpha_plus.grid
    w, big_r, y = phi_values(alpha_plus.samples, rho_plus.samples, rho_minus.samples, p)
    return Field(grid, w), Field(grid, big_r), Field(grid, y)


def scaled_distance(w: np.ndarray, big_r: np.ndarray, y: np.ndarray, p: ModelParams) -> float:
    """Distance of (w, R, Y) to (0, P_bar, Y_bar) in the scaled sup norm."""
    p_bar = p.pressure_bar
    return float(max(
        np.max(np.abs(w)) / p_bar,
        np.max(np.abs(big_r - p_bar)) / p_bar,
        np.max(np.abs(y - p.mass_fraction_bar)),
    ))


def psi_values(w: np.ndarray, big_r: np.ndarray, y: np.ndarray, p: ModelParams,
               radius: Optional[float] = None,
               initial_guess: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = None,
               max_iter: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Array form of the inverse map by damped Newton iteration.
    
    Args:
        w, big_r, y: Target values (same shape)
        p: Model parameters
        radius: Inversion-ball radius (defaults to LAB_CONFIG)
        initial_guess: Optional (alpha, rho_plus, rho_minus) warm start
        max_iter: Iteration cap (defaults to LAB_CONFIG)
        
    Returns:
        (alpha_plus, rho_plus, rho_minus) arrays
        
    Raises:
        OutsideInversionBallError: If a target lies outside the ball
        NewtonDivergedError: On iteration cap or residual stagnation
    """
    radius = LAB_CONFIG["inversion_radius"] if radius is None else radius
    max_iter = LAB_CONFIG["newton_max_iter"] if max_iter is None else max_iter

    distance = scaled_distance(w, big_r, y, p)
    if distance > radius:
        raise OutsideInversionBallError(
            f"Scaled distance {distance:.3e} to equilibrium exceeds inversion radius {radius}"
        )

    shape = np.shape(w)
    target = np.stack([np.ravel(w), np.ravel(big_r), np.ravel(y)], axis=-1)
    if initial_guess is None:
        x = np.empty_like(target)
        x[:, 0] = p.alpha_bar_plus
        x[:, 1] = p.rho_bar_plus
        x[:, 2] = p.rho_bar_minus
    else:
        x = np.stack([np.ravel(g) for g in initial_guess], axis=-1).astype(np.float64)

    scale = np.array([p.pressure_bar, p.pressure_bar, 1.0])

    def residual_of(candidate: np.ndarray) -> np.ndarray:
        values = phi_values(candidate[:, 0], candidate[:, 1], candidate[:, 2], p)
        return np.stack(values, axis=-1) - target

    residual = residual_of(x)
    best = float(np.max(np.abs(residual) / scale))
    stalled = 0
    for iteration in range(max_iter):
        if best < NEWTON_TOL:
            break
        jac = phi_jacobian_values(x[:, 0], x[:, 1], x[:, 2], p)
        try:
            delta = np.linalg.solve(jac, residual[..., None])[..., 0]
        except np.linalg.LinAlgError as e:
            logger.error(f"Singular Jacobian in inversion: {e}")
            raise NewtonDivergedError(f"Singular Jacobian in inversion: {e}")

        # halve the step until the iterate stays admissible
        step = 1.0
        while True:
            candidate = x - step * delta
            admissible = (
                np.all(candidate[:, 0] * (1.0 - candidate[:, 0]) > VACUUM_TOL)
                and np.all(candidate[:, 1:] > 0)
            )
            if admissible or step < 1e-6:
                break
            step *= 0.5
        if not admissible:
            raise NewtonDivergedError("Newton step leaves the admissible set")

        x = candidate
        residual = residual_of(x)
        current = float(np.max(np.abs(residual) / scale))
        if current < best * 0.5:
            stalled = 0
        else:
            stalled += 1
        best = min(best, current)
        if stalled >= STAGNATION_LIMIT:
            if best < 1e-12:
                break
            raise NewtonDivergedError(f"Newton stagnated at scaled residual {best:.3e}")
    else:
        if best >= 1e-12:
            raise NewtonDivergedError(f"Newton did not converge in {max_iter} iterations (residual {best:.3e})")

    logger.debug(f"Inversion converged with scaled residual {best:.3e}")
    return tuple(x[:, k].reshape(shape) for k in range(3))


def psi_inverse(w: Field, big_r: Field, y: Field, p: ModelParams,
                radius: Optional[float] = None,
                initial_guess: Optional[Tuple[Field, Field, Field]] = None) -> Tuple[Field, Field, Field]:
    """
    Inverse change of unknowns, computed pointwise.
    
    Args:
        w: Scaled pressure gap
        big_r: Effective pressure R
        y: Mass fraction Y
        p: Model parameters
        radius: Inversion-ball radius
        initial_guess: Optional warm start (alpha_plus, rho_plus, rho_minus)
        
    Returns:
        Fields (alpha_plus, rho_plus, rho_minus)
    """
    guess = None if initial_guess is None else tuple(f.samples for f in initial_guess)
    values = psi_values(w.samples, big_r.samples, y.samples, p, radius=radius, initial_guess=guess)
    return tuple(Field(w.grid, v) for v in values)


def roundtrip_residuals(p: ModelParams, n_points: int, radius: Optional[float] = None,
                        seed: int = 0) -> Dict[str, float]:
    """
    Worst roundtrip errors of the change of unknowns on seeded random points.

    Physical points are drawn at relative distance radius/4 from equilibrium;
    targets (w, R, Y) are drawn at scaled distance radius/2.

    Args:
        p: Model parameters
        n_points: Number of points per direction
        radius: Inversion-ball radius (defaults to LAB_CONFIG)
        seed: Seed of the random generator

    Returns:
        Dict with "psi_of_phi" (max |Psi(Phi(x)) - x|) and "phi_of_psi"
        (max scaled |Phi(Psi(z)) - z|)
    """
    radius = LAB_CONFIG["inversion_radius"] if radius is None else radius
    rng = np.random.default_rng(seed)
    spread = radius / 4.0

    alpha_bar = p.alpha_bar_plus
    alpha = alpha_bar + spread * min(alpha_bar, 1.0 - alpha_bar) * rng.uniform(-1.0, 1.0, n_points)
    rho_plus = p.rho_bar_plus * (1.0 + spread * rng.uniform(-1.0, 1.0, n_points))
    rho_minus = p.rho_bar_minus * (1.0 + spread * rng.uniform(-1.0, 1.0, n_points))
    forward = phi_values(alpha, rho_plus, rho_minus, p)
    back = psi_values(*forward, p, radius=radius)
    psi_of_phi = max(float(np.max(np.abs(b - x))) for b, x in zip(back, (alpha, rho_plus, rho_minus)))

    p_bar, y_bar = p.pressure_bar, p.mass_fraction_bar
    reach = radius / 2.0
    w = p_bar * reach * rng.uniform(-1.0, 1.0, n_points)
    big_r = p_bar * (1.0 + reach * rng.uniform(-1.0, 1.0, n_points))
    y = y_bar + reach * min(y_bar, 1.0 - y_bar) * rng.uniform(-1.0, 1.0, n_points)
    again = phi_values(*psi_values(w, big_r, y, p, radius=radius), p)
    scales = (p_bar, p_bar, 1.0)
    phi_of_psi = max(float(np.max(np.abs(a - z))) / s for a, z, s in zip(again, (w, big_r, y), scales))

    logger.info(f"Roundtrip on {n_points} points: |Psi(Phi(x)) - x| = {psi_of_phi:.3e}, "
                f"|Phi(Psi(z)) - z| = {phi_of_psi:.3e}")
    return {"n_points": n_points, "psi_of_phi": psi_of_phi, "phi_of_psi": phi_of_psi}
