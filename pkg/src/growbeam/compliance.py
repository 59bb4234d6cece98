"""Mean-compliance functionals, their pointwise densities and derivatives,
and the dimensionless convexity diagnostics.

The mean compliance of a height profile h is the thermoelastic-style energy
integral E e^2 over the section, which reduces to

    C(h) = E int eps^2 h + eps kappa h^2 + kappa^2 h^3 / 3 dx

with (eps, kappa) the equilibrium fields for that profile.  Because the beam
is statically determinate the integrand is a pointwise function of h, so one
scalar density c(h) per cell suffices.  Three closed forms are available
(no prestrain; constant axial prestrain; constant precurvature, first
deposition); everything else goes through the general per-cell equilibrium
solve.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .beam import (BeamConfig, EquilibriumState, LayerStack, LoadCase,
                   PrestrainPair, _as_values, bending_moment,
                   prestress_section_integrals, solve_section)
from .errors import DomainError


def compliance_total(state: EquilibriumState, h, config: BeamConfig) -> float:
    """Mean compliance in N dm under midpoint quadrature."""
    hv = _as_values(h, config.n_cells)
    e = config.young_modulus
    eps, kap = state.eps, state.kappa
    c = e * (eps**2 * hv + eps * kap * hv**2 + kap**2 * hv**3 / 3.0)
    return config.delta * float(np.sum(c))


def density_baseline(h, moment, young_modulus):
    """Compliance density 12 M^2 / (E h^3) of a beam with no prestrain."""
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0):
        raise DomainError("height must be positive")
    out = 12.0 * np.asarray(moment, dtype=float) ** 2 / (young_modulus * h**3)
    return float(out) if out.ndim == 0 else out


def density_prestrain(h, h0, moment, young_modulus, eps_p):
    """Compliance density for constant axial prestrain, zero precurvature.

    Valid at every deposition step (the layer integrals telescope), and
    reduces to the baseline density when eps_p = 0.
    """
    h = np.asarray(h, dtype=float)
    h0 = np.asarray(h0, dtype=float)
    if np.any(h0 <= 0):
        raise DomainError("base height must be positive")
    if np.any(h <= 0):
        raise DomainError("height must be positive")
    e, m = young_modulus, np.asarray(moment, dtype=float)
    k = e * eps_p * h0**2 + 2.0 * m
    out = (3.0 * k**2 / (e * h**3)
           - e * eps_p**2 * (2.0 * h0 - h)
           - 6.0 * eps_p * h0 * k / h**2
           + 4.0 * e * eps_p**2 * h0**2 / h)
    return float(out) if out.ndim == 0 else out


def density_precurv_first(h, h0, moment, young_modulus, kappa_p):
    """Compliance density for constant precurvature at the first deposition."""
    h = np.asarray(h, dtype=float)
    h0 = np.asarray(h0, dtype=float)
    if np.any(h0 <= 0):
        raise DomainError("base height must be positive")
    if np.any(h <= 0):
        raise DomainError("height must be positive")
    e, m = young_modulus, np.asarray(moment, dtype=float)
    q = e * kappa_p * h0**3 + 3.0 * m
    out = (4.0 * q**2 / (3.0 * e * h**3)
           - kappa_p * (2.0 * e * kappa_p * h0**3 - e * kappa_p * h**3 + 6.0 * m) / 3.0
           - 2.0 * h0**2 * kappa_p * q / h**2
           + e * h0**4 * kappa_p**2 / h)
    return float(out) if out.ndim == 0 else out


class DensityCase(enum.Enum):
    GENERAL = "general"
    BASELINE = "baseline"
    CONST_PRESTRAIN = "const_prestrain"
    CONST_PRECURV_FIRST = "const_precurv_first"


@dataclass(frozen=True)
class ComplianceDensity:
    """One step's pointwise compliance density c_j(h) across all cells.

    ``moment`` and ``base_height`` broadcast against candidate height arrays.
    The GENERAL case carries the deposition history as material segments plus
    the prestrain pair of the layer being deposited; its value at candidate h
    re-solves the per-cell equilibrium with the new layer [h_prev, h] (or the
    history trimmed at h when h < h_prev, i.e. ablation).
    """

    case: DensityCase
    young_modulus: float
    moment: np.ndarray
    base_height: np.ndarray | None = None
    eps_p: float = 0.0
    kappa_p: float = 0.0
    history: tuple | None = None   # (y_lo, y_hi, eps_p[], kappa_p[]) arrays
    h_prev: np.ndarray | None = None

    def __post_init__(self):
        if self.case is DensityCase.BASELINE and (self.eps_p or self.kappa_p):
            raise DomainError("baseline density has no prestrain parameters")
        if self.case in (DensityCase.CONST_PRESTRAIN, DensityCase.CONST_PRECURV_FIRST):
            if self.base_height is None:
                raise DomainError("closed-form prestrain densities need the base height")
        if self.case is DensityCase.GENERAL and (self.history is None or self.h_prev is None):
            raise DomainError("general density needs the deposition history")

    @classmethod
    def baseline(cls, young_modulus, moment):
        return cls(DensityCase.BASELINE, young_modulus, np.asarray(moment, dtype=float))

    @classmethod
    def const_prestrain(cls, young_modulus, moment, base_height, eps_p):
        return cls(DensityCase.CONST_PRESTRAIN, young_modulus,
                   np.asarray(moment, dtype=float),
                   np.asarray(base_height, dtype=float), eps_p=eps_p)

    @classmethod
    def const_precurv_first(cls, young_modulus, moment, base_height, kappa_p):
        return cls(DensityCase.CONST_PRECURV_FIRST, young_modulus,
                   np.asarray(moment, dtype=float),
                   np.asarray(base_height, dtype=float), kappa_p=kappa_p)

    @classmethod
    def general(cls, config: BeamConfig, load: LoadCase, stack: LayerStack,
                step_prestrain: PrestrainPair):
        m = bending_moment(load, config, config.x_centers)
        return cls(DensityCase.GENERAL, config.young_modulus, m,
                   eps_p=step_prestrain.eps_p, kappa_p=step_prestrain.kappa_p,
                   history=stack.segments(), h_prev=stack.top.values.copy())

    def value(self, h):
        h = np.asarray(h, dtype=float)
        if self.case is DensityCase.BASELINE:
            return density_baseline(h, self.moment, self.young_modulus)
        if self.case is DensityCase.CONST_PRESTRAIN:
            return density_prestrain(h, self.base_height, self.moment,
                                     self.young_modulus, self.eps_p)
        if self.case is DensityCase.CONST_PRECURV_FIRST:
            return density_precurv_first(h, self.base_height, self.moment,
                                         self.young_modulus, self.kappa_p)
        return self._general_value(h)

    def _prestrain_integrals(self, h):
        """A(h) = int_0^h e^p dy and B(h) = int_0^h y e^p dy for candidate h,
        trimming the history above h and adding the new layer [h_prev, h]."""
        y_lo, y_hi, eps_hist, kap_hist = self.history
        lo = np.minimum(y_lo, h)
        hi = np.minimum(y_hi, h)
        a, b = prestress_section_integrals(lo, hi, eps_hist, kap_hist)
        new_lo = np.minimum(self.h_prev, h)
        a = a + self.eps_p * (h - new_lo) + 0.5 * self.kappa_p * (h**2 - new_lo**2)
        b = b + 0.5 * self.eps_p * (h**2 - new_lo**2) + self.kappa_p * (h**3 - new_lo**3) / 3.0
        return a, b

    def _surface_prestrain(self, h):
        """Prestrain pair of the material lying at the surface height h.

        Cells at or above h_prev see the layer being deposited; below (only
        reachable with ablation) the owning history segment is looked up.
        """
        eps_top = np.full(h.shape, self.eps_p)
        kap_top = np.full(h.shape, self.kappa_p)
        below = h < self.h_prev
        if np.any(below):
            y_lo, y_hi, eps_hist, kap_hist = self.history
            found = ~below
            for row in range(y_lo.shape[0] - 1, -1, -1):
                m = ~found & (h > y_lo[row]) & (h <= y_hi[row])
                eps_top[m] = eps_hist[row]
                kap_top[m] = kap_hist[row]
                found |= m
        return eps_top, kap_top

    def _general_value(self, h):
        if np.any(h <= 0):
            raise DomainError("height must be positive")
        a, b = self._prestrain_integrals(h)
        eps, kap = solve_section(h, a, b, self.moment, self.young_modulus)
        return self.young_modulus * (eps**2 * h + eps * kap * h**2 + kap**2 * h**3 / 3.0)

    def derivative(self, h):
        h = np.asarray(h, dtype=float)
        e, m = self.young_modulus, self.moment
        if self.case is DensityCase.BASELINE:
            if np.any(h <= 0):
                raise DomainError("height must be positive")
            return -36.0 * m**2 / (e * h**4)
        if self.case is DensityCase.CONST_PRESTRAIN:
            if np.any(h <= 0) or np.any(self.base_height <= 0):
                raise DomainError("heights must be positive")
            h0, ep = self.base_height, self.eps_p
            k = e * ep * h0**2 + 2.0 * m
            return (-9.0 * k**2 / (e * h**4) + e * ep**2
                    + 12.0 * ep * h0 * k / h**3 - 4.0 * e * ep**2 * h0**2 / h**2)
        if self.case is DensityCase.CONST_PRECURV_FIRST:
            if np.any(h <= 0) or np.any(self.base_height <= 0):
                raise DomainError("heights must be positive")
            h0, kp = self.base_height, self.kappa_p
            q = e * kp * h0**3 + 3.0 * m
            return (-4.0 * q**2 / (e * h**4) + e * kp**2 * h**2
                    + 4.0 * h0**2 * kp * q / h**3 - e * h0**4 * kp**2 / h**2)
        # General case: exact chain rule.  With A(h), B(h) the prestrain
        # integrals, A' and B' reduce to the prestrain value at the surface
        # (Leibniz rule), so (eps, kappa) and the density differentiate in
        # closed form.  The density has a kink at h = h_prev (growing deposits
        # new material, shrinking removes old); cells sitting exactly on
        # h_prev get the growth-side slope, which is the relevant branch for
        # the lower-bounded step problem.
        h = np.broadcast_to(h, self.h_prev.shape).astype(float)
        if np.any(h <= 0):
            raise DomainError("height must be positive")
        a, b = self._prestrain_integrals(h)
        r = b - self.moment / e
        eps_t, kap_t = self._surface_prestrain(h)
        e_top = eps_t + h * kap_t       # prestrain value at the surface
        ap = e_top
        rp = h * e_top
        u = 4.0 * a / h - 6.0 * r / h**2
        v = 12.0 * r / h**3 - 6.0 * a / h**2
        up = 4.0 * ap / h - 4.0 * a / h**2 - 6.0 * rp / h**2 + 12.0 * r / h**3
        vp = 12.0 * rp / h**3 - 36.0 * r / h**4 - 6.0 * ap / h**2 + 12.0 * a / h**3
        return e * (2.0 * u * up * h + u**2 + (up * v + u * vp) * h**2
                    + 2.0 * u * v * h + (2.0 / 3.0) * v * vp * h**3 + v**2 * h**2)


def density_derivative(density: ComplianceDensity, h):
    """d/dh of the density; analytic for the closed forms, central FD otherwise."""
    return density.derivative(h)


# ---------------------------------------------------------------------------
# Dimensionless diagnostics.  With hbar = h/h0 and eta = M/(E h0^2 eps_p) the
# constant-prestrain density is E eps_p^2 h0 f(eta, hbar); with
# mu = M/(E h0^3 kappa_p) the first-step precurvature density is
# E h0^3 kappa_p^2 g(mu, hbar).  The *_raw variants evaluate the displayed
# power sums verbatim and exist as cross-checks for the stabilized forms.
# ---------------------------------------------------------------------------

def _check_hbar(hbar):
    hbar = np.asarray(hbar, dtype=float)
    if np.any(hbar <= 0):
        raise DomainError("hbar must be positive")
    return hbar


def _ret(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def f_value(eta, hbar):
    """Rescaled constant-prestrain compliance density (Horner form)."""
    hb = _check_hbar(hbar)
    eta = np.asarray(eta, dtype=float)
    num = (((hb - 2.0) * hb + 4.0) * hb - (12.0 * eta + 6.0)) * hb \
        + 12.0 * eta * (eta + 1.0) + 3.0
    return _ret(num / hb**3)


def f_value_raw(eta, hbar):
    hb = _check_hbar(hbar)
    eta = np.asarray(eta, dtype=float)
    num = (12.0 * eta**2 - 12.0 * eta * hb + 12.0 * eta
           + hb**4 - 2.0 * hb**3 + 4.0 * hb**2 - 6.0 * hb + 3.0)
    return _ret(num / hb**3)


def f_second(eta, hbar):
    """d^2 f / d hbar^2 in factored form: 4 (6 eta - hbar + 3)(6 eta - 2 hbar + 3) / hbar^5."""
    hb = _check_hbar(hbar)
    eta = np.asarray(eta, dtype=float)
    return _ret(4.0 * (6.0 * eta - hb + 3.0) * (6.0 * eta - 2.0 * hb + 3.0) / hb**5)


def f_second_raw(eta, hbar):
    hb = _check_hbar(hbar)
    eta = np.asarray(eta, dtype=float)
    num = 144.0 * eta**2 + 144.0 * eta - 72.0 * eta * hb + 8.0 * hb**2 - 36.0 * hb + 36.0
    return _ret(num / hb**5)


def f_concavity_interval(eta):
    """The hbar interval where f'' <= 0: between (6 eta + 3)/2 and 6 eta + 3."""
    r = 6.0 * eta + 3.0
    return min(r, 0.5 * r), max(r, 0.5 * r)


def g_value(mu, hbar):
    """Rescaled first-step precurvature compliance density (Horner form)."""
    hb = _check_hbar(hbar)
    mu = np.asarray(mu, dtype=float)
    u = 1.0 / hb
    t = 3.0 * mu + 1.0
    return _ret(hb**3 / 3.0 - (6.0 * mu + 2.0) / 3.0
                + u * (1.0 + u * (-2.0 * t + u * (4.0 / 3.0) * t**2)))


def g_value_raw(mu, hbar):
    hb = _check_hbar(hbar)
    mu = np.asarray(mu, dtype=float)
    return _ret(1.0 / hb - (-hb**3 + 6.0 * mu + 2.0) / 3.0
                - 2.0 * (3.0 * mu + 1.0) / hb**2
                + 4.0 * (3.0 * mu + 1.0) ** 2 / (3.0 * hb**3))


def g_second(mu, hbar):
    """d^2 g / d hbar^2 in completed-square form; positive for hbar >= 1."""
    hb = _check_hbar(hbar)
    mu = np.asarray(mu, dtype=float)
    sq = 72.0 * (mu + (8.0 - 3.0 * hb) / 24.0) ** 2
    return _ret(2.0 / hb**5 * (sq + hb**2 * (8.0 * hb**4 - 1.0) / 8.0))


def g_second_raw(mu, hbar):
    hb = _check_hbar(hbar)
    mu = np.asarray(mu, dtype=float)
    num = 72.0 * mu**2 - 18.0 * mu * hb + 48.0 * mu + hb**6 + hb**2 - 6.0 * hb + 8.0
    return _ret(2.0 * num / hb**5)


def convex_envelope_1d(x, y, domain=None):
    """Lower convex envelope of sampled points, evaluated at the sample x's.

    Builds the lower hull of the graph (monotone-chain) and interpolates it
    back onto the sample abscissae.  ``domain`` optionally restricts the
    samples to a closed interval first.  Requires at least three strictly
    increasing x values.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise DomainError("x and y must be 1-D arrays of equal length")
    if domain is not None:
        lo, hi = domain
        keep = (x >= lo) & (x <= hi)
        x, y = x[keep], y[keep]
    if x.size < 3:
        raise DomainError("need at least 3 sample points")
    if np.any(np.diff(x) <= 0):
        raise DomainError("x must be strictly increasing with no duplicates")

    hull_x, hull_y = [], []
    for xi, yi in zip(x, y):
        while len(hull_x) >= 2:
            cross = ((hull_x[-1] - hull_x[-2]) * (yi - hull_y[-2])
                     - (hull_y[-1] - hull_y[-2]) * (xi - hull_x[-2]))
            if cross <= 0.0:
                hull_x.pop()
                hull_y.pop()
            else:
                break
        hull_x.append(xi)
        hull_y.append(yi)
    env = np.interp(x, np.array(hull_x), np.array(hull_y))
    return x, np.minimum(env, y)
