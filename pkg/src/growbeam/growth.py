"""Multi-step growth orchestration: mass schedule, per-step densities,
solver invocation, and trace recording."""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .beam import (BeamConfig, HeightField, LayerStack, LoadCase,
                   _as_values, bending_moment, equilibrium_general)
from .compliance import ComplianceDensity, compliance_total
from .errors import ConvergenceError, DomainError
from .solver import (MassMode, SolverOptions, StepProblem, kkt_residual,
                     minimize_step)

log = logging.getLogger(__name__)

ABLATION_FLOOR_FRACTION = 1e-3  # lower bound 1e-3 * h0 when ablation is on


class ScheduleKind(enum.Enum):
    AFFINE = "affine"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class MassSchedule:
    """Target masses m_1..m_S, either m0 + i * increment or an explicit list."""

    kind: ScheduleKind
    increment: float | None = None
    values: tuple | None = None

    @classmethod
    def affine(cls, increment: float) -> "MassSchedule":
        if increment < 0:
            raise DomainError("mass increment must be nonnegative")
        return cls(ScheduleKind.AFFINE, increment=increment)

    @classmethod
    def explicit(cls, values) -> "MassSchedule":
        vals = tuple(float(v) for v in values)
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise DomainError("mass targets must be nondecreasing")
        return cls(ScheduleKind.EXPLICIT, values=vals)

    def targets(self, m0: float, steps: int) -> np.ndarray:
        if self.kind is ScheduleKind.AFFINE:
            return m0 + self.increment * np.arange(1, steps + 1)
        if len(self.values) != steps:
            raise DomainError(f"schedule lists {len(self.values)} masses for {steps} steps")
        return np.asarray(self.values)


@dataclass
class StepRecord:
    index: int
    h: HeightField
    mass: float
    compliance: float
    objective: float
    lam: float
    growth_fraction: float
    max_increment: float
    kkt_residual: float
    wall_time: float
    degenerate: bool = False


@dataclass
class GrowthTrace:
    """Full run record: per-step profiles, compliances, multipliers, residuals."""

    config: BeamConfig
    load: LoadCase
    tau: float
    mass_mode: MassMode
    ablation: bool
    h0: HeightField
    initial_mass: float
    initial_compliance: float
    records: list = field(default_factory=list)
    problems: list = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.records)

    def heights_by_step(self):
        """Profiles indexed 0..S, step 0 being the initial height."""
        return [self.h0.values] + [r.h.values for r in self.records]


def _pick_density(config, load, stack, pre, step_index):
    """Closed forms where their validity conditions hold, else the general
    per-cell equilibrium density with the full deposition history."""
    all_pre = list(stack.prestrains) + [pre]
    if all(p.eps_p == 0.0 and p.kappa_p == 0.0 for p in all_pre):
        m = bending_moment(load, config, config.x_centers)
        return ComplianceDensity.baseline(config.young_modulus, m)
    if step_index == 1:
        m = bending_moment(load, config, config.x_centers)
        base = stack.heights[0].values
        if pre.kappa_p == 0.0:
            return ComplianceDensity.const_prestrain(config.young_modulus, m, base, pre.eps_p)
        if pre.eps_p == 0.0:
            return ComplianceDensity.const_precurv_first(config.young_modulus, m, base, pre.kappa_p)
    return ComplianceDensity.general(config, load, stack, pre)


def run_growth(config: BeamConfig, load: LoadCase, h0, schedule: MassSchedule,
               prestrains, tau: float = math.inf,
               mass_mode: MassMode = MassMode.EQUALITY, ablation: bool = False,
               options: SolverOptions | None = None) -> GrowthTrace:
    """Run the S-step growth process and record the trace.

    ``prestrains`` supplies one PrestrainPair per step.  The lower bound of
    step i is h_{i-1}, or the fixed floor 1e-3 * h0 when ablation is enabled
    (the densities diverge as h -> 0, so the floor keeps the objective
    finite).  A solver failure aborts the run with the partial trace attached
    to the raised ConvergenceError.
    """
    options = options or SolverOptions()
    prestrains = list(prestrains)
    if not prestrains:
        raise DomainError("need at least one growth step")
    h0 = h0 if isinstance(h0, HeightField) else HeightField(_as_values(h0, config.n_cells))
    m0 = h0.mass(config)
    targets = schedule.targets(m0, len(prestrains))
    if not ablation and targets[0] < m0 - 1e-9 * max(1.0, m0):
        raise DomainError("first mass target below the initial mass")

    stack = LayerStack((h0,), (), ablation=ablation)
    state0 = equilibrium_general(config, load, stack)
    trace = GrowthTrace(config=config, load=load, tau=tau, mass_mode=mass_mode,
                        ablation=ablation, h0=h0, initial_mass=m0,
                        initial_compliance=compliance_total(state0, h0, config))
    floor = HeightField(ABLATION_FLOOR_FRACTION * h0.values) if ablation else None

    for i, (m_i, pre) in enumerate(zip(targets, prestrains), start=1):
        h_prev = stack.top
        density = _pick_density(config, load, stack, pre, i)
        problem = StepProblem(density=density, h_prev=h_prev, mass_target=float(m_i),
                              tau=tau, mass_mode=mass_mode,
                              lower_bound=floor if ablation else h_prev,
                              config=config)
        t0 = time.perf_counter()
        try:
            sol = minimize_step(problem, options)
        except ConvergenceError as err:
            err.partial_trace = trace
            raise
        elapsed = time.perf_counter() - t0

        stack = LayerStack(stack.heights + (sol.h,), stack.prestrains + (pre,),
                           ablation=ablation)
        state = equilibrium_general(config, load, stack)
        inc = sol.h.values - h_prev.values
        trace.problems.append(problem)
        trace.records.append(StepRecord(
            index=i,
            h=sol.h,
            mass=sol.h.mass(config),
            compliance=compliance_total(state, sol.h, config),
            objective=sol.objective,
            lam=sol.lam,
            growth_fraction=float(np.mean(inc > options.tol_active)),
            max_increment=float(np.max(inc)),
            kkt_residual=sol.kkt_residual,
            wall_time=elapsed,
            degenerate=sol.degenerate,
        ))
    return trace


def stationarity_report(trace: GrowthTrace, problems, tol: float = 1e-8) -> np.ndarray:
    """Recompute the per-step stationarity residuals from the recorded
    profiles and multipliers; steps exceeding ``tol`` are logged."""
    residuals = np.array([
        kkt_residual(problem, record.h, record.lam)
        for record, problem in zip(trace.records, problems)
    ])
    for idx in np.nonzero(residuals > tol)[0]:
        log.warning("step %d stationarity residual %.3e exceeds %.1e",
                    trace.records[idx].index, residuals[idx], tol)
    return residuals
