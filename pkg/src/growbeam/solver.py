"""One incremental growth step: minimize compliance plus the proximal term
under the mass constraint and the cellwise lower bound.

The objective is separable,

    F(h) = delta * sum_j c_j(h_j) + delta/(2 tau) * sum_j (h_j - hprev_j)^2,

so a projected-gradient method with an exact Euclidean projection onto
{delta * sum h = m, h >= lb} is the natural solver.  Steps are sized by a
safeguarded Barzilai-Borwein rule with Armijo backtracking along the
projection arc, which keeps the objective monotonically non-increasing.

Sign conventions follow the Lagrangian L = F + lam * (delta sum h - m)
- sum_j mu_j (h_j - lb_j): at a stationary point c' + (h - hprev)/tau + lam
vanishes on cells strictly above the bound and equals mu_j >= 0 on pinned
cells.  For the no-prestrain problem this makes lam = 36 M^2 / (E h^4) > 0
on the growth set.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .beam import BeamConfig, HeightField, _as_values
from .compliance import ComplianceDensity
from .errors import ConvergenceError, InfeasibleError


class MassMode(enum.Enum):
    EQUALITY = "equality"
    INEQUALITY = "inequality"


@dataclass(frozen=True)
class SolverOptions:
    tol_kkt: float = 1e-8        # stationarity residual, density-gradient scale
    tol_mass: float = 1e-10      # mass feasibility, relative to the target
    tol_active: float = 1e-9     # bound-activity threshold
    max_iter: int = 10_000
    armijo: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 60


@dataclass(frozen=True)
class StepProblem:
    """One incremental minimization instance."""

    density: ComplianceDensity
    h_prev: HeightField
    mass_target: float
    tau: float
    mass_mode: MassMode
    lower_bound: HeightField
    config: BeamConfig

    def __post_init__(self):
        if not (self.tau > 0):
            raise InfeasibleError("tau must be positive (math.inf allowed)")
        lb_mass = self.config.delta * float(np.sum(self.lower_bound.values))
        if self.mass_mode is MassMode.EQUALITY:
            if self.mass_target < lb_mass - 1e-9 * max(1.0, abs(self.mass_target)):
                raise InfeasibleError(
                    f"mass target {self.mass_target} below the lower-bound mass {lb_mass}")


@dataclass
class StepSolution:
    h: HeightField
    lam: float
    mu: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    objective_history: np.ndarray
    degenerate: bool = False


def _project_shift(z, lb, mass, delta):
    """Euclidean projection onto {delta * sum h = mass, h >= lb}.

    Returns (h, t) with h_j = max(lb_j, z_j - t).  Bisection on the shift t
    narrows the active set, then the shift is recomputed in closed form on
    that set and the residual mass error spread over the free cells, so the
    mass constraint holds to machine precision.
    """
    z = np.asarray(z, dtype=float)
    lb = np.asarray(lb, dtype=float)
    target = mass / delta
    base = float(np.sum(lb))
    if target < base - 1e-9 * max(1.0, abs(target)):
        raise InfeasibleError(
            f"mass {mass} infeasible for the lower bound (needs >= {base * delta})")
    if target <= base:
        return lb.copy(), float(np.max(z - lb))

    n = z.size
    t_lo = (float(np.sum(z)) - target) / n          # sum(max(lb, z-t_lo)) >= target
    t_hi = float(np.max(z - lb))                    # all cells pinned
    for _ in range(200):
        t_mid = 0.5 * (t_lo + t_hi)
        if float(np.sum(np.maximum(lb, z - t_mid))) >= target:
            t_lo = t_mid
        else:
            t_hi = t_mid
        if t_hi - t_lo <= 1e-15 * max(1.0, abs(t_lo) + abs(t_hi)):
            break

    t = 0.5 * (t_lo + t_hi)
    for _ in range(4):  # active-set polish
        free = z - t > lb
        n_free = int(np.count_nonzero(free))
        if n_free == 0:
            break
        t_new = (float(np.sum(z[free])) - (target - float(np.sum(lb[~free])))) / n_free
        if np.array_equal(z - t_new > lb, free):
            t = t_new
            break
        t = t_new

    h = np.maximum(lb, z - t)
    free = h > lb
    n_free = int(np.count_nonzero(free))
    if n_free:
        h[free] += (target - float(np.sum(h))) / n_free
    return h, t


def project_mass_lb(z, lb, mass, delta):
    """Projection of z onto the mass/lower-bound constraint set (values only)."""
    h, _ = _project_shift(z, lb, mass, delta)
    return h


def _stationarity(q, h, lb, lam, tol_active):
    """Max stationarity defect |c' + prox' + lam| over cells above the bound."""
    free = h > lb + tol_active
    if not np.any(free):
        return 0.0
    return float(np.max(np.abs(q[free] + lam)))


def kkt_residual(problem: StepProblem, h, lam: float, tol_active: float = 1e-9) -> float:
    """Discrete stationarity residual of a candidate solution.

    Evaluates max_j |c'(h_j) + (h_j - hprev_j)/tau + lam| over the cells with
    h_j > lb_j + tol_active; the proximal term drops out for tau = inf.  The
    max over an empty growth set is 0 by convention.  ``lam`` is the mass
    multiplier normalized so that lam = 36 M^2/(E h^4) on the growth set of
    the no-prestrain problem.
    """
    hv = _as_values(h, problem.config.n_cells)
    q = np.asarray(problem.density.derivative(hv), dtype=float).copy()
    if not math.isinf(problem.tau):
        q += (hv - problem.h_prev.values) / problem.tau
    return _stationarity(q, hv, problem.lower_bound.values, lam, tol_active)


def _solve_projected_gradient(problem, options, projection, fixed_lam=None):
    """Core PG loop.

    ``projection`` maps a point to the feasible set and returns (h, shift).
    ``fixed_lam`` pins the mass multiplier (bound-only subproblem of the
    inequality mode); otherwise lam is estimated from the free cells, or,
    when no cell is free (singleton feasible set), taken from the projection
    dual and the step flagged degenerate.
    """
    density = problem.density
    delta = problem.config.delta
    h_prev = problem.h_prev.values
    lb = problem.lower_bound.values
    tau = problem.tau
    prox_on = not math.isinf(tau)
    mass_constrained = fixed_lam is None

    def objective(h):
        val = float(np.sum(density.value(h)))
        if prox_on:
            val += 0.5 / tau * float(np.sum((h - h_prev) ** 2))
        return delta * val

    def density_grad(h):
        q = np.asarray(density.derivative(h), dtype=float).copy()
        if prox_on:
            q += (h - h_prev) / tau
        return q

    # Singleton feasible set: the mass budget equals the lower-bound mass, so
    # the only feasible point is lb itself.  Report the projection-dual
    # multiplier (unit step) and flag the step as degenerate.
    if mass_constrained:
        slack = problem.mass_target / delta - float(np.sum(lb))
        if slack <= max(lb.size * options.tol_active,
                        options.tol_mass * max(1.0, abs(problem.mass_target)) / delta):
            h = lb.copy()
            q = density_grad(h)
            _, shift = projection(h - delta * q)
            lam = shift / delta
            return _pack_solution(problem, h, q, lam, 0.0, 0, [objective(h)], True)

    h, shift = projection(np.maximum(h_prev, lb))
    q = density_grad(h)
    g = delta * q
    obj = objective(h)
    history = [obj]
    alpha = 0.1 * max(float(np.max(h)), 1e-6) / (float(np.max(np.abs(g))) + 1e-300)
    best = (obj, h, q, 0.0)

    for it in range(1, options.max_iter + 1):
        free = h > lb + options.tol_active
        degenerate = False
        if not mass_constrained:
            lam = fixed_lam
        elif np.any(free):
            lam = -float(np.mean(q[free]))
        else:
            lam = shift / (alpha * delta)
            degenerate = True

        r_stat = _stationarity(q, h, lb, lam, options.tol_active)
        r_dual = 0.0
        if np.any(~free) and not degenerate:
            r_dual = max(0.0, -float(np.min(q[~free] + lam)))
        if r_stat <= options.tol_kkt and r_dual <= options.tol_kkt:
            return _pack_solution(problem, h, q, lam, r_stat, it - 1, history, degenerate)

        h_new, shift_new = projection(h - alpha * g)
        d = h_new - h
        g_dot_d = float(np.dot(g, d))
        obj_new = objective(h_new)
        # Sufficient decrease up to the floating-point resolution of the
        # objective; without the noise floor the line search freezes once the
        # true decrease per step drops below eps * |obj|.
        noise = 16.0 * np.finfo(float).eps * max(1.0, abs(obj))
        backtracks = 0
        while (obj_new > obj + options.armijo * g_dot_d + noise
               and backtracks < options.max_backtracks
               and float(np.max(np.abs(d))) > 0.0):
            alpha *= options.backtrack
            h_new, shift_new = projection(h - alpha * g)
            d = h_new - h
            g_dot_d = float(np.dot(g, d))
            obj_new = objective(h_new)
            backtracks += 1
        if obj_new > obj + noise:  # no acceptable decrease at this precision
            h_new, shift_new, obj_new = h, shift, obj
            d = np.zeros_like(h)

        q_new = density_grad(h_new)
        g_new = delta * q_new

        # safeguarded BB step from the accepted move
        s_dot_y = float(np.dot(d, g_new - g))
        if s_dot_y > 1e-300:
            alpha = float(np.dot(d, d)) / s_dot_y
        else:
            alpha *= 2.0
        alpha = min(max(alpha, 1e-18), 1e18)

        h, q, g, obj, shift = h_new, q_new, g_new, obj_new, shift_new
        history.append(obj)
        if obj < best[0]:
            best = (obj, h, q, lam)

    obj, h, q, lam = best
    r_stat = _stationarity(q, h, lb, lam, options.tol_active)
    sol = _pack_solution(problem, h, q, lam, r_stat, options.max_iter, history, False)
    raise ConvergenceError(
        f"projected gradient did not reach tol_kkt={options.tol_kkt} "
        f"in {options.max_iter} iterations (residual {r_stat:.3e})", best=sol)


def _pack_solution(problem, h, q, lam, r_stat, iterations, history, degenerate):
    lb = problem.lower_bound.values
    active = ~(h > lb + 1e-15)
    mu = np.zeros_like(h)
    mu[active] = np.maximum(q[active] + lam, 0.0)
    prox = 0.0
    if not math.isinf(problem.tau):
        prox = (problem.config.delta * 0.5 / problem.tau
                * float(np.sum((h - problem.h_prev.values) ** 2)))
    return StepSolution(
        h=HeightField(h.copy()),
        lam=float(lam),
        mu=mu,
        objective=problem.config.delta * float(np.sum(problem.density.value(h))) + prox,
        kkt_residual=r_stat,
        iterations=iterations,
        objective_history=np.asarray(history),
        degenerate=degenerate,
    )


def minimize_step(problem: StepProblem, options: SolverOptions | None = None) -> StepSolution:
    """Solve one incremental step to stationarity.

    Equality mode projects every iterate onto the exact-mass set.  The
    inequality mode solves the equality problem first and keeps it if the
    mass multiplier comes out nonnegative (the constraint binds); otherwise
    the mass constraint is dropped (lam = 0) and only the bound projection
    remains.  Nonconvex densities carry stationarity-only semantics; the
    returned ``kkt_residual`` is the certificate.
    """
    options = options or SolverOptions()
    mass = problem.mass_target
    delta = problem.config.delta
    lb = problem.lower_bound.values

    def mass_projection(z):
        return _project_shift(z, lb, mass, delta)

    def bound_projection(z):
        return np.maximum(lb, z), 0.0

    eq = _solve_projected_gradient(problem, options, mass_projection)
    if problem.mass_mode is MassMode.EQUALITY:
        return eq
    if eq.lam >= -options.tol_kkt:
        eq.lam = max(eq.lam, 0.0)
        return eq
    free_sol = _solve_projected_gradient(problem, options, bound_projection, fixed_lam=0.0)
    free_mass = free_sol.h.mass(problem.config)
    if free_mass <= mass * (1.0 + options.tol_mass) + options.tol_mass:
        return free_sol
    # Nonconvex corner: the unconstrained-mass stationary point overshoots the
    # budget; fall back to the mass-constrained solution.
    eq.lam = max(eq.lam, 0.0)
    return eq
