"""
Experiment service for the relaxation lab.

Runs each harness subcommand on a validated RunConfig, writes CSV/JSON
outputs and a manifest to the configured output directory, and returns
the JSON payload shared by the CLI and the HTTP API.
"""

import logging
from typing import Any, Dict, List, Optional

import numpy as np

from diagnostics.energy import EnergyMonitor, monitor_decay
from diagnostics.linear import LinearCoeffs, LinearState
from diagnostics.relaxation import ConservationMonitor, pressure_gap_trace
from littlewood_paley.bump import DEFAULT_BUMP
from littlewood_paley.decomposition import block_range, decompose
from littlewood_paley.norms import bernstein_check, besov_norm
from models.state import PhaseState
from reformulation.change_of_unknowns import roundtrip_residuals
from reformulation.system import chain_rule_tendency, reform_rhs, to_phase_state, to_reform_state
from services.initial_data import band_limited_field, initial_state_for, make_initial_data
from services.rate_study import run_rate_study
from services.run_config import ConfigInvalidError, RunConfig
from spectral.fields import VectorField
from spectral.operators import dealias
from storage.results_store import ResultsStore
from timestepper.integrator import Trajectory, integrate
from utils.errors import LabError

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("simulate", "reform-check", "energy-monitor", "rate-study", "lp-analyze")


class ExperimentServiceError(LabError):
    """Raised when an experiment cannot be set up or its outputs assembled."""
    code = "EXPERIMENT_ERROR"


def _trajectory_rows(trajectory: Trajectory):
    return [(t,) + tuple(f.sup_norm() for f in state.fields())
            for t, state in zip(trajectory.times, trajectory.states)]


class ExperimentService:
    """Service running harness experiments and persisting their outputs."""

    def __init__(self, output_dir: Optional[str] = None):
        """
        Initialize the experiment service.

        Args:
            output_dir: Overrides the output directory of every config
        """
        self.output_dir = output_dir
        logger.info("Experiment service initialized")

    def _store(self, cfg: RunConfig) -> ResultsStore:
        return ResultsStore(self.output_dir or cfg.output_dir)

    def run(self, subcommand: str, cfg: RunConfig) -> Dict[str, Any]:
        """
        Dispatch a subcommand by name.

        Args:
            subcommand: One of SUBCOMMANDS
            cfg: Validated run configuration

        Returns:
            JSON payload of the run

        Raises:
            ExperimentServiceError: If the subcommand is unknown
        """
        handlers = {
            "simulate": self.simulate,
            "reform-check": self.reform_check,
            "energy-monitor": self.energy_monitor,
            "rate-study": self.rate_study,
            "lp-analyze": self.lp_analyze,
        }
        if subcommand not in handlers:
            raise ExperimentServiceError(f"Unknown subcommand '{subcommand}'")
        logger.info(f"Running '{subcommand}' (config {cfg.config_hash()[:12]})")
        return handlers[subcommand](cfg)

    def _finish(self, store: ResultsStore, subcommand: str, cfg: RunConfig,
                payload: Dict[str, Any]) -> Dict[str, Any]:
        store.write_manifest(subcommand, cfg.to_json_dict(), [cfg.initial_data.seed])
        payload.update(subcommand=subcommand, output_dir=store.output_dir,
                       outputs=list(store.outputs), config_hash=cfg.config_hash())
        return payload

    # simulate -----------------------------------------------------------------

    def simulate(self, cfg: RunConfig) -> Dict[str, Any]:
        """Integrate the configured system with the requested observers."""
        p = cfg.model
        state = initial_state_for(cfg)
        observers: List = []
        energy_monitor = conservation = None
        if "energy" in cfg.observers:
            coeffs = cfg.energy.to_coeffs() if cfg.energy else LinearCoeffs.from_model(p)
            energy_monitor = EnergyMonitor(coeffs, p)
            observers.append(energy_monitor)
        if "conservation" in cfg.observers:
            if cfg.system == "reform":
                raise ConfigInvalidError("The conservation observer needs system 'bn' or 'kapila'")
            conservation = ConservationMonitor()
            observers.append(conservation)

        model = "kapila" if cfg.system == "kapila" else "bn"
        trajectory = integrate(state, p, cfg.step, observers, model=model, radius=cfg.inversion_radius)

        store = self._store(cfg)
        names = type(state).field_names(cfg.grid.dim)
        store.write_csv("trajectory.csv", ("t",) + tuple(f"sup_{n}" for n in names), _trajectory_rows(trajectory))
        params = p.model_dump(by_alias=True)
        store.save_snapshot("state_initial", trajectory.states[0], trajectory.times[0], params)
        store.save_snapshot("state_final", trajectory.final, trajectory.times[-1], params)

        payload: Dict[str, Any] = {
            "system": cfg.system,
            "steps": trajectory.steps,
            "final_time": trajectory.times[-1],
            "snapshots": len(trajectory.times),
        }
        if energy_monitor is not None:
            trace = energy_monitor.trace
            store.write_csv("energy.csv", ("t", "j", "L_j", "bound"), trace.rows())
            payload["energy"] = {
                "equivalence_violations": trace.equivalence_violations,
                "damped_w_integral": trace.damped_w_integral[-1],
                "velocity_integral": trace.velocity_integral[-1],
                "kappa": trace.kappa,
            }
        if conservation is not None:
            store.write_csv("conservation.csv", ("t", "mass_plus", "mass_minus"), conservation.rows())
            payload["conservation_drift"] = conservation.drift()
        if "pressure_gap" in cfg.observers:
            if cfg.system != "bn":
                logger.warning(f"Pressure-gap trace skipped for system '{cfg.system}'")
            else:
                dim = cfg.grid.dim
                gap = pressure_gap_trace(trajectory, p, [dim / 2.0 - 1.5, dim / 2.0 - 0.5])
                store.write_csv("pressure_gap.csv", ("t", "s", "besov_norm"), gap.rows())
                payload["pressure_gap_sup"] = {str(s): gap.sup(s) for s in gap.norms}

        store.write_json("simulate.json", payload)
        return self._finish(store, "simulate", cfg, payload)

    # reform-check -------------------------------------------------------------

    def reform_check(self, cfg: RunConfig) -> Dict[str, Any]:
        """Roundtrip of the change of unknowns and chain-rule consistency."""
        p, radius = cfg.model, cfg.inversion_radius
        roundtrip = roundtrip_residuals(p, cfg.reform_check.n_points, radius=radius, seed=cfg.initial_data.seed)

        state = make_initial_data(cfg)
        reform = to_reform_state(state, p)
        direct = reform_rhs(reform, p, radius=radius)
        chained = chain_rule_tendency(state, p)
        chain_residual = 0.0
        for name in ("y", "w", "r"):
            a, b = getattr(direct, name), dealias(getattr(chained, name))
            scale = max(a.sup_norm(), 1e-300)
            chain_residual = max(chain_residual, (a - b).sup_norm() / scale)

        back = to_phase_state(reform, p, radius=radius)
        field_roundtrip = max((a - b).sup_norm() for a, b in zip(back.fields(), state.fields()))

        payload = {
            "roundtrip": roundtrip,
            "chain_rule_residual": chain_residual,
            "field_roundtrip": field_roundtrip,
        }
        store = self._store(cfg)
        store.write_json("reform_check.json", payload)
        return self._finish(store, "reform-check", cfg, payload)

    # energy-monitor -----------------------------------------------------------

    def _linear_initial_state(self, cfg: RunConfig) -> LinearState:
        grid, init = cfg.grid, cfg.initial_data
        rng = np.random.default_rng(init.seed)
        amp = init.amplitude if init.amplitude > 0 else 1.0
        fields = [amp * band_limited_field(grid, rng, init.band) for _ in range(2 + grid.dim)]
        return LinearState(w=fields[0], r=fields[1], u=VectorField(tuple(fields[2:])))

    def energy_monitor(self, cfg: RunConfig) -> Dict[str, Any]:
        """
        Record the block functionals along a run.

        With an 'energy' section the frozen linear system is integrated and
        the decay law is checked; otherwise the configured nonlinear system is
        observed through its linearization.
        """
        store = self._store(cfg)
        if cfg.energy is not None:
            coeffs = cfg.energy.to_coeffs()
            monitor = EnergyMonitor(coeffs)
            integrate(self._linear_initial_state(cfg), coeffs, cfg.step, [monitor])
            mode = "linear"
        else:
            coeffs = LinearCoeffs.from_model(cfg.model)
            monitor = EnergyMonitor(coeffs, cfg.model)
            if cfg.system == "kapila":
                raise ConfigInvalidError("energy-monitor observes system 'bn' or 'reform'")
            integrate(initial_state_for(cfg), cfg.model, cfg.step, [monitor], model="bn",
                      radius=cfg.inversion_radius)
            mode = "nonlinear"

        trace = monitor.trace
        store.write_csv("energy.csv", ("t", "j", "L_j", "bound"), trace.rows())
        payload: Dict[str, Any] = {
            "mode": mode,
            "kappa": trace.kappa,
            "eps_ell": trace.eps_ell,
            "eps_h": trace.eps_h,
            "C1": trace.C1,
            "C2": trace.C2,
            "C3": trace.C3,
            "equivalence_violations": trace.equivalence_violations,
            "damped_w_integral": trace.damped_w_integral[-1],
            "velocity_integral": trace.velocity_integral[-1],
        }
        if mode == "linear":
            payload["decay"] = monitor_decay(trace, coeffs).to_dict()
        store.write_json("energy_monitor.json", payload)
        return self._finish(store, "energy-monitor", cfg, payload)

    # rate-study ---------------------------------------------------------------

    def rate_study(self, cfg: RunConfig) -> Dict[str, Any]:
        """nu sweep with log-log fit of the relaxation differences."""
        result = run_rate_study(cfg)
        store = self._store(cfg)
        store.write_csv("rate_study.csv",
                        ("nu", "error_norm", "du_l1", "pressure_gap_sup", "damped_integral"),
                        result.rows())
        payload = result.to_dict()
        store.write_json("rate_study.json", payload)
        return self._finish(store, "rate-study", cfg, payload)

    # lp-analyze ---------------------------------------------------------------

    def lp_analyze(self, cfg: RunConfig) -> Dict[str, Any]:
        """Besov reports of the initial fields plus decomposition checks."""
        state: PhaseState = make_initial_data(cfg)
        grid = cfg.grid
        s = cfg.lp_analyze.s if cfg.lp_analyze.s is not None else grid.dim / 2.0 - 1.0
        j_min, j_max = block_range(grid)
        store = self._store(cfg)

        reports: Dict[str, Any] = {}
        for name, f in zip(PhaseState.field_names(grid.dim), state.fields()):
            report = besov_norm(f, s)
            store.write_csv(f"lp_{name}.csv", ("j", "block_l2", "weighted"), report.rows())
            entry = report.to_dict()
            entry["reconstruction_error"] = (decompose(f).reconstruct() - f).sup_norm()
            entry["bernstein_ok"] = all(bernstein_check(f).values())
            reports[name] = entry

        payload = {
            "s": s,
            "j_min": j_min,
            "j_max": j_max,
            "partition_residual": DEFAULT_BUMP.partition_residual(grid.wavenumber_magnitude(), j_min, j_max),
            "fields": reports,
        }
        store.write_json("lp_analyze.json", payload)
        return self._finish(store, "lp-analyze", cfg, payload)
