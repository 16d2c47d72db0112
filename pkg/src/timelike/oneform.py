"""Vector 1-forms Γ = α L(x) du + β L(y) dv and their integration.

On a simply connected domain Γ is exact iff it is closed; the primitive is
obtained here by integrating along L-shaped grid paths, and comparing the
two orders of integration gives a direct path-independence measurement.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import DomainError
from .grid import ScalarField, VectorField
from .lightcone import eps_sep, lift
from .residuals import ResidualStats, residual_stats
from .wirtinger import _div_eps, partial


@dataclass(frozen=True)
class OneForm:
    alpha: ScalarField
    beta: ScalarField
    x: ScalarField
    y: ScalarField

    def __post_init__(self):
        g = self.alpha.grid
        if any(f.grid != g for f in (self.beta, self.x, self.y)):
            raise DomainError("one-form components must share a grid")

    @property
    def grid(self):
        return self.alpha.grid

    @property
    def mask(self):
        x, y = self.x.values, self.y.values
        with np.errstate(invalid="ignore"):
            sep = np.abs(x - y) > eps_sep(x, y)
        return self.alpha.mask & self.beta.mask & self.x.mask & self.y.mask & sep

    def du_part(self):
        """Coefficient vector α L(x) of du, shape (nu, nv, 4)."""
        return self.alpha.values.real[..., None] * lift(self.x.values)

    def dv_part(self):
        return self.beta.values.real[..., None] * lift(self.y.values)


def one_form_closedness(G: OneForm) -> ResidualStats:
    """Norm of -(α_v L(x) + α ∂_v L(x)) + (β_u L(y) + β ∂_u L(y))."""
    g = G.grid
    m = G.mask
    alpha, beta = G.alpha.values.real, G.beta.values.real
    Lx, Ly = lift(G.x.values), lift(G.y.values)
    a_v, m1 = partial(alpha, m, g, 1)
    Lx_v, m2 = partial(Lx, m, g, 1)
    b_u, m3 = partial(beta, m, g, 0)
    Ly_u, m4 = partial(Ly, m, g, 0)
    left = a_v[..., None] * Lx + alpha[..., None] * Lx_v
    right = b_u[..., None] * Ly + beta[..., None] * Ly_u
    scale = np.maximum(np.linalg.norm(left, axis=-1), np.linalg.norm(right, axis=-1))
    return residual_stats(right - left, m & m1 & m2 & m3 & m4, scale=scale)


@dataclass
class LogDerivativeResult:
    """Defects of the two logarithmic-derivative identities (necessary only)."""

    alpha_eq: ResidualStats
    beta_eq: ResidualStats
    excluded_alpha: int
    excluded_beta: int

    @property
    def max_relative(self):
        return max(self.alpha_eq.relative_max, self.beta_eq.relative_max)


def log_derivative_residual(G: OneForm) -> LogDerivativeResult:
    """Residuals of α_v/α = -x_v/(x-y) - x̄_v/(x̄-ȳ) and β_u/β = y_u/(x-y) + ȳ_u/(x̄-ȳ).

    These are necessary for Γ to be closed but not sufficient. Nodes where
    α or β vanish are excluded and counted.
    """
    g = G.grid
    m = G.mask
    alpha, beta = G.alpha.values.real, G.beta.values.real
    x, y = G.x.values, G.y.values
    a_v, ma = partial(alpha, m, g, 1)
    b_u, mb = partial(beta, m, g, 0)
    x_v, mx = partial(x, m, g, 1)
    y_u, my = partial(y, m, g, 0)
    za = np.abs(alpha) <= _div_eps(alpha, m)
    zb = np.abs(beta) <= _div_eps(beta, m)
    d = x - y
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs_a = a_v / alpha
        rhs_a = -x_v / d - np.conj(x_v) / np.conj(d)
        lhs_b = b_u / beta
        rhs_b = y_u / d + np.conj(y_u) / np.conj(d)
    mask_a = m & ma & mx & ~za
    mask_b = m & mb & my & ~zb
    sa = residual_stats(lhs_a - rhs_a, mask_a, scale=np.maximum(np.abs(lhs_a), np.abs(rhs_a)))
    sb = residual_stats(lhs_b - rhs_b, mask_b, scale=np.maximum(np.abs(lhs_b), np.abs(rhs_b)))
    return LogDerivativeResult(sa, sb, int((m & za).sum()), int((m & zb).sum()))


def _cumulative_from(values, h, base, axis):
    """∫ from index ``base`` to every index along ``axis`` (trapezoid)."""
    c = cumulative_trapezoid(values, dx=h, axis=axis, initial=0)
    ref = np.take(c, [base], axis=axis)
    return c - ref


@dataclass
class OneFormIntegral:
    V: VectorField
    path_independence: ResidualStats
    V_v_first: np.ndarray


def integrate_one_form(G: OneForm, V0, base="lower_left") -> OneFormIntegral:
    """Primitive V with dV = Γ and V(base) = V0, integrating u first then v.

    The second, v-first, primitive is kept for the path-independence
    residual ``max |V_u_first - V_v_first|``. Closedness is not enforced:
    a non-closed Γ simply shows up as a large residual.
    """
    g = G.grid
    i0, j0 = g.corner(base)
    m = G.mask
    if not np.all(m):
        raise DomainError("integrate_one_form needs a fully valid grid")
    Pu = G.du_part()
    Pv = G.dv_part()
    V0 = np.asarray(V0, dtype=float)
    # u first along row j0, then v along every column
    row = V0 + _cumulative_from(Pu[:, j0, :], g.h_u, i0, axis=0)
    V1 = row[:, None, :] + _cumulative_from(Pv, g.h_v, j0, axis=1)
    # v first along column i0, then u along every row
    col = V0 + _cumulative_from(Pv[i0, :, :], g.h_v, j0, axis=0)
    V2 = col[None, :, :] + _cumulative_from(Pu, g.h_u, i0, axis=0)
    stats = residual_stats(V1 - V2, m, scale=np.linalg.norm(V1, axis=-1))
    return OneFormIntegral(VectorField(g, V1, m), stats, V2)
