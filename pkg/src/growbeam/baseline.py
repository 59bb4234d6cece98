"""Exact KKT solution of the no-prestrain step problem.

On the growth set the optimal height satisfies lam = 36 M(x)^2 / (E h^4),
i.e. h = (36 M^2 / (E lam))^(1/4); elsewhere it sticks to the previous
profile.  Under a uniform load the candidate is affine in x, which makes the
optimal profiles affine-then-unchanged.  The first step from a constant
height admits a fully closed form; later steps fix the multiplier by a
monotone bisection on the mass equation.  This module is the primary
verification oracle for the numerical solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beam import BeamConfig, HeightField, LoadCase, _as_values, bending_moment
from .errors import DomainError, InfeasibleError


@dataclass(frozen=True)
class BaselineSolution:
    """Piecewise optimal profile with its KKT certificate data.

    ``growth_set`` marks the cells where the candidate height dominates the
    previous profile; ``x_hat`` is the end of the growth interval and is only
    defined for the first step from a constant height under a uniform load.
    """

    h: HeightField
    lam: float
    growth_set: np.ndarray
    x_hat: float | None = None


def _candidate(m2, young_modulus, lam):
    return (36.0 * m2 / (young_modulus * lam)) ** 0.25


def solve_baseline_first(config: BeamConfig, p: float, h0: float, m1: float) -> BaselineSolution:
    """Closed-form first step from a constant height under a uniform load p.

    The optimal profile is h0 * (m1 + sqrt(m1^2 - m0^2))/m0 * (l - x)/l up to
    x_hat and h0 beyond, with m0 = h0 * l; the positive root keeps
    x_hat >= 0.
    """
    if h0 <= 0:
        raise DomainError("h0 must be positive")
    if p == 0:
        raise DomainError("a nonzero load is required")
    ell = config.length
    m0 = h0 * ell
    if m1 <= m0:
        raise InfeasibleError(f"m1 = {m1} adds no mass over m0 = {m0}")
    root = np.sqrt(m1**2 - m0**2)
    slope = (m1 + root) / ell**2                  # (9 p^2 / (E lam))^(1/4)
    lam = 9.0 * p**2 / (config.young_modulus * slope**4)
    x_hat = (1.0 - m0 / (m1 + root)) * ell
    xc = config.x_centers
    cand = slope * (ell - xc)
    growth = cand >= h0
    h = np.where(growth, np.maximum(cand, h0), h0)
    return BaselineSolution(HeightField(h), float(lam), growth, float(x_hat))


def baseline_mass(config: BeamConfig, load: LoadCase, h_prev, lam: float) -> float:
    """Mass of max(h_prev, candidate(lam)) under midpoint quadrature."""
    hp = _as_values(h_prev, config.n_cells)
    m2 = bending_moment(load, config, config.x_centers) ** 2
    cand = _candidate(m2, config.young_modulus, lam)
    return config.delta * float(np.sum(np.maximum(hp, cand)))


def solve_baseline_step(config: BeamConfig, load: LoadCase, h_prev, m_i: float,
                        lam_bracket=None) -> BaselineSolution:
    """One exact step from an arbitrary previous profile.

    Bisects the multiplier until the discrete mass of
    max(h_prev, (36 M^2/(E lam))^(1/4)) matches m_i to 1e-14 relative, then
    re-solves lam in closed form on the identified growth set so the mass
    equation holds to machine precision.
    """
    hp = _as_values(h_prev, config.n_cells)
    e = config.young_modulus
    delta = config.delta
    m2 = bending_moment(load, config, config.x_centers) ** 2
    mass_prev = delta * float(np.sum(hp))
    tol = 1e-14 * max(1.0, abs(m_i))
    if m_i < mass_prev - 1e-9 * max(1.0, abs(m_i)):
        raise InfeasibleError(f"m_i = {m_i} below the current mass {mass_prev}")
    if m_i <= mass_prev + tol:
        # Nothing grows; the smallest dual-feasible multiplier certifies it.
        lam = float(np.max(36.0 * m2 / (e * hp**4)))
        return BaselineSolution(HeightField(hp.copy()), lam,
                                np.zeros_like(hp, dtype=bool), None)
    if float(np.max(m2)) == 0.0:
        raise DomainError("zero bending moment everywhere; growth has no driver")

    def mass_of(lam):
        return delta * float(np.sum(np.maximum(hp, _candidate(m2, e, lam))))

    if lam_bracket is None:
        m2max = float(np.max(m2))
        lam_lo = 36.0 * m2max / (e * (m_i / config.length + float(np.max(hp))) ** 4)
        lam_hi = 36.0 * m2max / (e * float(np.min(hp)) ** 4)
    else:
        lam_lo, lam_hi = lam_bracket
    for _ in range(200):                      # mass(lam) decreases in lam
        if mass_of(lam_lo) >= m_i:
            break
        lam_lo *= 0.25
    for _ in range(200):
        if mass_of(lam_hi) <= m_i:
            break
        lam_hi *= 4.0

    for _ in range(200):
        lam_mid = 0.5 * (lam_lo + lam_hi)
        if mass_of(lam_mid) >= m_i:
            lam_lo = lam_mid
        else:
            lam_hi = lam_mid
        if abs(mass_of(lam_mid) - m_i) <= tol:
            break

    lam = 0.5 * (lam_lo + lam_hi)
    for _ in range(4):                        # closed-form polish on the growth set
        growth = _candidate(m2, e, lam) >= hp
        coef = delta * float(np.sum((36.0 * m2[growth] / e) ** 0.25))
        rest = delta * float(np.sum(hp[~growth]))
        if coef == 0.0 or m_i <= rest:
            break
        lam_new = (coef / (m_i - rest)) ** 4
        if np.array_equal(_candidate(m2, e, lam_new) >= hp, growth):
            lam = lam_new
            break
        lam = lam_new

    cand = _candidate(m2, e, lam)
    growth = cand >= hp
    h = np.where(growth, np.maximum(cand, hp), hp)
    return BaselineSolution(HeightField(h), float(lam), growth, None)
