"""
System adapters used by the time schemes.

Each adapter packs its public state into a stacked array (variables first),
and provides the explicit (nonstiff) tendency, the relaxation substep
(frozen coefficients, exact flow), the implicit stiff solve
Y = Z + tau * S(Y), an admissibility check and a wave-speed bound.
"""

import logging
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from spectral.fields import Field, VectorField
from spectral.grid import GridSpec
from spectral.operators import (
    advection,
    dealias,
    dealiased_product,
    divergence,
    gradient,
    lame_apply,
    lame_exponential
)
from models.equations import (
    VACUUM_TOL,
    density_from_pressure,
    kapila_rhs,
    kapila_state,
    mixture,
    phase_pressure_values
)
from models.params import ModelParams
from models.state import PhaseState
from reformulation.change_of_unknowns import gap_weight, psi_values
from reformulation.system import BarConstants, ReformState, f_coefficient_values
from diagnostics.linear import LinearCoeffs, LinearState
from utils.errors import NumericalError

logger = logging.getLogger(__name__)

SCALAR_NEWTON_TOL = 1e-14
SCALAR_NEWTON_MAX_ITER = 50


class StateInadmissibleError(NumericalError):
    """Raised when a state loses positivity or leaves the inversion ball."""
    code = "STATE_INADMISSIBLE"


class RelaxationSystem(ABC):
    """Common interface of the integrated systems."""

    n_scalars = 0

    def __init__(self, grid: GridSpec, integrating_factor: bool = False):
        self.grid = grid
        self.integrating_factor = integrating_factor

    # packing -------------------------------------------------------------

    @abstractmethod
    def pack(self, state) -> np.ndarray:
        pass

    @abstractmethod
    def unpack(self, data: np.ndarray):
        pass

    def _field(self, values: np.ndarray) -> Field:
        return Field(self.grid, values)

    def _velocity(self, data: np.ndarray) -> VectorField:
        return VectorField.from_arrays(self.grid, data[self.n_scalars:])

    # dynamics ------------------------------------------------------------

    @abstractmethod
    def explicit_rhs(self, data: np.ndarray) -> np.ndarray:
        pass

    def relax(self, data: np.ndarray, tau: float) -> np.ndarray:
        return data

    def solve_stiff(self, data: np.ndarray, tau: float) -> np.ndarray:
        return data

    def viscous_substep(self, data: np.ndarray, tau: float) -> np.ndarray:
        """Exact flow of the constant-coefficient viscous part (integrating factor)."""
        return data

    @abstractmethod
    def check_admissible(self, data: np.ndarray) -> None:
        pass

    @abstractmethod
    def wave_speed(self, data: np.ndarray) -> float:
        pass

    # helpers -------------------------------------------------------------

    def _apply_velocity_exponential(self, data: np.ndarray, factor: float, mu: float,
                                    lam_plus_mu: float, tau: float) -> np.ndarray:
        u = self._velocity(data)
        evolved = lame_exponential(u, factor * mu, factor * lam_plus_mu, tau)
        out = data.copy()
        out[self.n_scalars:] = evolved.as_array()
        return out

    @staticmethod
    def _stack(fields) -> np.ndarray:
        return np.stack([f.samples for f in fields])


class BaerNunziatoSystem(RelaxationSystem):
    """
    Damped Baer-Nunziato system advanced in (alpha_plus, m_plus, m_minus, u)
    with m = alpha * rho, so that the transport stages conserve phase masses.
    """

    n_scalars = 3

    def __init__(self, grid: GridSpec, p: ModelParams, integrating_factor: bool = False):
        super().__init__(grid, integrating_factor)
        self.p = p
        self.bars = BarConstants.from_params(p)

    def pack(self, state: PhaseState) -> np.ndarray:
        a = state.alpha_plus.samples
        return np.stack([
            a,
            a * state.rho_plus.samples,
            (1.0 - a) * state.rho_minus.samples,
        ] + [c.samples for c in state.u])

    def unpack(self, data: np.ndarray) -> PhaseState:
        alpha = data[0]
        return PhaseState(
            alpha_plus=self._field(alpha),
            rho_plus=self._field(data[1] / alpha),
            rho_minus=self._field(data[2] / (1.0 - alpha)),
            u=self._velocity(data),
        )

    def _pressures(self, alpha, m_plus, m_minus):
        rho_plus = m_plus / alpha
        rho_minus = m_minus / (1.0 - alpha)
        return (phase_pressure_values(rho_plus, "+", self.p),
                phase_pressure_values(rho_minus, "-", self.p))

    def explicit_rhs(self, data: np.ndarray) -> np.ndarray:
        p = self.p
        alpha = self._field(data[0])
        m_plus, m_minus = self._field(data[1]), self._field(data[2])
        u = self._velocity(data)

        p_plus, p_minus = self._pressures(data[0], data[1], data[2])
        p_mix = self._field(data[0] * p_plus + (1.0 - data[0]) * p_minus)
        rho = m_plus + m_minus

        d_alpha = dealias(-advection(u, alpha))
        d_m_plus = -divergence(VectorField(tuple(dealiased_product(m_plus, u_k) for u_k in u)))
        d_m_minus = -divergence(VectorField(tuple(dealiased_product(m_minus, u_k) for u_k in u)))

        inv_rho = 1.0 / rho
        viscous = lame_apply(u, p.mu, p.lam_plus_mu)
        weight = inv_rho - self.bars.F0 if self.integrating_factor else inv_rho
        grad_p = gradient(p_mix)
        d_u = [
            dealias(-advection(u, u_k) + weight * visc_k - inv_rho * grad_k - p.eta * u_k)
            for u_k, visc_k, grad_k in zip(u, viscous, grad_p)
        ]
        return self._stack([d_alpha, d_m_plus, d_m_minus] + d_u)

    def viscous_substep(self, data: np.ndarray, tau: float) -> np.ndarray:
        if not self.integrating_factor:
            return data
        return self._apply_velocity_exponential(data, self.bars.F0, self.p.mu, self.p.lam_plus_mu, tau)

    def _scalar_newton(self, residual_and_slope, alpha0: np.ndarray) -> np.ndarray:
        alpha = alpha0.copy()
        for _ in range(SCALAR_NEWTON_MAX_ITER):
            residual, slope = residual_and_slope(alpha)
            update = residual / slope
            alpha = np.clip(alpha - update, 1e-12, 1.0 - 1e-12)
            if np.max(np.abs(update)) < SCALAR_NEWTON_TOL:
                return alpha
        raise StateInadmissibleError("Relaxation solve for alpha did not converge")

    def relax(self, data: np.ndarray, tau: float) -> np.ndarray:
        """Move alpha (phase masses fixed) so that w decays by exp(-F2 tau / nu)."""
        p = self.p
        alpha0, m_plus, m_minus = data[0], data[1], data[2]
        p_plus, p_minus = self._pressures(alpha0, m_plus, m_minus)
        c0, _ = gap_weight(alpha0, p)
        w0 = c0 * (p_plus - p_minus)
        big_r = alpha0 * p_plus + (1.0 - alpha0) * p_minus - (p.gamma_plus - p.gamma_minus) * w0
        _, f2, _, _ = f_coefficient_values(alpha0, big_r, w0, p)
        target = w0 * np.exp(-f2 * tau / p.nu)

        def residual_and_slope(alpha):
            pp, pm = self._pressures(alpha, m_plus, m_minus)
            c, dc = gap_weight(alpha, p)
            gap = pp - pm
            dgap = -p.gamma_plus * pp / alpha - p.gamma_minus * pm / (1.0 - alpha)
            return c * gap - target, dc * gap + c * dgap

        out = data.copy()
        out[0] = self._scalar_newton(residual_and_slope, alpha0)
        return out

    def solve_stiff(self, data: np.ndarray, tau: float) -> np.ndarray:
        """Backward-Euler solve alpha - alpha_Z - tau a+ a- (P+ - P-)/nu = 0, masses fixed."""
        p = self.p
        alpha_z, m_plus, m_minus = data[0], data[1], data[2]

        def residual_and_slope(alpha):
            pp, pm = self._pressures(alpha, m_plus, m_minus)
            a, b = alpha, 1.0 - alpha
            gap = pp - pm
            dgap = -p.gamma_plus * pp / a - p.gamma_minus * pm / b
            source = a * b * gap / p.nu
            dsource = ((b - a) * gap + a * b * dgap) / p.nu
            return alpha - alpha_z - tau * source, 1.0 - tau * dsource

        out = data.copy()
        out[0] = self._scalar_newton(residual_and_slope, alpha_z)
        return out

    def check_admissible(self, data: np.ndarray) -> None:
        alpha = data[0]
        if not np.all(np.isfinite(data)):
            raise StateInadmissibleError("Non-finite values in the Baer-Nunziato state")
        if np.min(alpha * (1.0 - alpha)) < VACUUM_TOL:
            raise StateInadmissibleError(f"Volume fraction left (0, 1): min alpha+ alpha- = {np.min(alpha * (1 - alpha)):.3e}")
        if np.min(data[1:3]) < VACUUM_TOL:
            raise StateInadmissibleError(f"Phase mass lost positivity: min = {np.min(data[1:3]):.3e}")

    def wave_speed(self, data: np.ndarray) -> float:
        p_plus, p_minus = self._pressures(data[0], data[1], data[2])
        rho_plus = data[1] / data[0]
        rho_minus = data[2] / (1.0 - data[0])
        sound = max(np.max(self.p.gamma_plus * p_plus / rho_plus),
                    np.max(self.p.gamma_minus * p_minus / rho_minus))
        speed = np.sqrt(np.sum(data[self.n_scalars:] ** 2, axis=0))
        return float(np.max(speed) + np.sqrt(sound))


class KapilaSystem(RelaxationSystem):
    """Relaxed system advanced in (alpha_plus, P, u); no stiff part."""

    n_scalars = 2

    def __init__(self, grid: GridSpec, p: ModelParams, integrating_factor: bool = False):
        super().__init__(grid, integrating_factor=False)
        self.p = p

    def pack(self, state: PhaseState) -> np.ndarray:
        _, p_mix = mixture(state, self.p)
        return self._stack([state.alpha_plus, p_mix] + list(state.u))

    def unpack(self, data: np.ndarray) -> PhaseState:
        return kapila_state(self._field(data[0]), self._field(data[1]), self._velocity(data), self.p)

    def explicit_rhs(self, data: np.ndarray) -> np.ndarray:
        tendency = kapila_rhs(self.unpack(data), self.p)
        return self._stack([tendency.alpha_plus, tendency.pressure] + list(tendency.u))

    def check_admissible(self, data: np.ndarray) -> None:
        if not np.all(np.isfinite(data)):
            raise StateInadmissibleError("Non-finite values in the relaxed state")
        alpha = data[0]
        if np.min(alpha * (1.0 - alpha)) < VACUUM_TOL:
            raise StateInadmissibleError("Volume fraction left (0, 1) in the relaxed state")
        if np.min(data[1]) <= 0:
            raise StateInadmissibleError("Relaxed pressure lost positivity")

    def wave_speed(self, data: np.ndarray) -> float:
        pressure = data[1]
        rho_plus = density_from_pressure(pressure, "+", self.p)
        rho_minus = density_from_pressure(pressure, "-", self.p)
        sound = max(np.max(self.p.gamma_plus * pressure / rho_plus),
                    np.max(self.p.gamma_minus * pressure / rho_minus))
        speed = np.sqrt(np.sum(data[self.n_scalars:] ** 2, axis=0))
        return float(np.max(speed) + np.sqrt(sound))


class ReformSystem(RelaxationSystem):
    """Reformulated system in (y, w, r, u); the w/nu damping is the stiff part."""

    n_scalars = 3

    def __init__(self, grid: GridSpec, p: ModelParams, integrating_factor: bool = False,
                 radius: Optional[float] = None):
        super().__init__(grid, integrating_factor)
        self.p = p
        self.radius = radius
        self.bars = BarConstants.from_params(p)
        self._guess = None

    def pack(self, state: ReformState) -> np.ndarray:
        return self._stack(state.fields())

    def unpack(self, data: np.ndarray) -> ReformState:
        return ReformState(y=self._field(data[0]), w=self._field(data[1]),
                           r=self._field(data[2]), u=self._velocity(data))

    def _invert(self, data: np.ndarray):
        p = self.p
        values = psi_values(data[1], data[2] + p.pressure_bar, data[0] + p.mass_fraction_bar, p,
                            radius=self.radius, initial_guess=self._guess)
        self._guess = values
        return values

    def _coefficients(self, data: np.ndarray):
        alpha, rho_plus, rho_minus = self._invert(data)
        f1, f2, f3, f4 = f_coefficient_values(alpha, data[2] + self.p.pressure_bar, data[1], self.p)
        rho = alpha * rho_plus + (1.0 - alpha) * rho_minus
        return 1.0 / rho, f1, f2, f3, f4

    def explicit_rhs(self, data: np.ndarray) -> np.ndarray:
        p = self.p
        f0, f1, _, f3, _ = self._coefficients(data)
        y, w, r = self._field(data[0]), self._field(data[1]), self._field(data[2])
        u = self._velocity(data)
        div_u = divergence(u)

        d_y = dealias(-advection(u, y))
        d_w = dealias(-advection(u, w) - f1 * div_u)
        d_r = dealias(-advection(u, r) - f3 * div_u)

        viscous = lame_apply(u, p.mu, p.lam_plus_mu)
        weight = f0 - self.bars.F0 if self.integrating_factor else f0
        pressure_grad = gradient(r) + gradient(w) * (p.gamma_plus - p.gamma_minus)
        d_u = [
            dealias(-advection(u, u_k) + weight * visc_k - f0 * grad_k - p.eta * u_k)
            for u_k, visc_k, grad_k in zip(u, viscous, pressure_grad)
        ]
        return self._stack([d_y, d_w, d_r] + d_u)

    def relax(self, data: np.ndarray, tau: float) -> np.ndarray:
        """w <- w exp(-F2 tau/nu), r <- r + F4 w^2 (1 - exp(-2 F2 tau/nu)) / (2 F2), F frozen."""
        _, _, f2, _, f4 = self._coefficients(data)
        w = data[1]
        decay = np.exp(-f2 * tau / self.p.nu)
        out = data.copy()
        out[1] = w * decay
        out[2] = data[2] + f4 * w ** 2 * (1.0 - decay ** 2) / (2.0 * f2)
        return out

    def solve_stiff(self, data: np.ndarray, tau: float) -> np.ndarray:
        """Linearly implicit solve with F2, F4 frozen at the input."""
        _, _, f2, _, f4 = self._coefficients(data)
        out = data.copy()
        out[1] = data[1] / (1.0 + tau * f2 / self.p.nu)
        out[2] = data[2] + tau * f4 * out[1] ** 2 / self.p.nu
        return out

    def viscous_substep(self, data: np.ndarray, tau: float) -> np.ndarray:
        if not self.integrating_factor:
            return data
        return self._apply_velocity_exponential(data, self.bars.F0, self.p.mu, self.p.lam_plus_mu, tau)

    def check_admissible(self, data: np.ndarray) -> None:
        if not np.all(np.isfinite(data)):
            raise StateInadmissibleError("Non-finite values in the reformulated state")
        try:
            self._invert(data)
        except NumericalError as e:
            logger.error(f"Reformulated state is not invertible: {e}")
            raise StateInadmissibleError(f"Reformulated state left the inversion ball: {e}")

    def wave_speed(self, data: np.ndarray) -> float:
        p = self.p
        alpha, rho_plus, rho_minus = self._invert(data)
        sound = max(np.max(p.gamma_plus * phase_pressure_values(rho_plus, "+", p) / rho_plus),
                    np.max(p.gamma_minus * phase_pressure_values(rho_minus, "-", p) / rho_minus))
        speed = np.sqrt(np.sum(data[self.n_scalars:] ** 2, axis=0))
        return float(np.max(speed) + np.sqrt(sound))


class LinearSystem(RelaxationSystem):
    """
    Frozen linear system in (w, r, u) with coefficients h_i + H_i and an
    optional frozen advecting field v. Linear terms are not truncated.
    """

    n_scalars = 2

    def __init__(self, grid: GridSpec, c: LinearCoeffs, v: Optional[VectorField] = None,
                 integrating_factor: bool = False):
        super().__init__(grid, integrating_factor)
        self.c = c
        self.v = v

    def pack(self, state: LinearState) -> np.ndarray:
        return self._stack(state.fields())

    def unpack(self, data: np.ndarray) -> LinearState:
        return LinearState(w=self._field(data[0]), r=self._field(data[1]), u=self._velocity(data))

    def _transport(self, f: Field) -> Field:
        if self.v is None:
            return Field.zeros(self.grid)
        return dealias(advection(self.v, f))

    def coefficient(self, index: int):
        return self.c.total(index)

    def explicit_rhs(self, data: np.ndarray) -> np.ndarray:
        c = self.c
        w, r = self._field(data[0]), self._field(data[1])
        u = self._velocity(data)
        div_u = divergence(u)

        d_w = -self._transport(w) - self.coefficient(1) * div_u
        d_r = -self._transport(r) - self.coefficient(3) * div_u

        viscous = lame_apply(u, c.lame_mu, c.lame_mu + c.lame_lam)
        h4 = self.coefficient(4)
        weight = h4 - c.h4 if self.integrating_factor else h4
        grad_r, grad_w = gradient(r), gradient(w)
        d_u = [
            -self._transport(u_k) + weight * visc_k - c.eta * u_k
            - self.coefficient(5) * gr_k - self.coefficient(6) * gw_k
            for u_k, visc_k, gr_k, gw_k in zip(u, viscous, grad_r, grad_w)
        ]
        return self._stack([d_w, d_r] + d_u)

    def _damping(self) -> np.ndarray:
        return np.broadcast_to(self.coefficient(2), self.grid.shape) / self.c.nu

    def relax(self, data: np.ndarray, tau: float) -> np.ndarray:
        out = data.copy()
        out[0] = data[0] * np.exp(-self._damping() * tau)
        return out

    def solve_stiff(self, data: np.ndarray, tau: float) -> np.ndarray:
        out = data.copy()
        out[0] = data[0] / (1.0 + tau * self._damping())
        return out

    def viscous_substep(self, data: np.ndarray, tau: float) -> np.ndarray:
        if not self.integrating_factor:
            return data
        c = self.c
        return self._apply_velocity_exponential(data, c.h4, c.lame_mu, c.lame_mu + c.lame_lam, tau)

    def check_admissible(self, data: np.ndarray) -> None:
        if not np.all(np.isfinite(data)):
            raise StateInadmissibleError("Non-finite values in the linear state")

    def wave_speed(self, data: np.ndarray) -> float:
        acoustic = np.max(self.coefficient(3) * self.coefficient(5) + self.coefficient(1) * self.coefficient(6))
        drift = 0.0 if self.v is None else self.v.sup_norm()
        return float(drift + np.sqrt(acoustic))
