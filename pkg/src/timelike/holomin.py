"""Holomorphic generating data: ODE system, Möbius constant, the phase θ of μ,
and the harmonic-θ generator.

For holomorphic x(w), y(w) the minimal-surface system reduces to

    x'' = 2 x'^2 / (x - y),     y'' = -2 y'^2 / (x - y),

and 1/x' + 1/y' is a constant c. Writing μ = e^{iθ}/|x - y|, the phase
obeys θ_w = (i/2)(x' + y')/(x - y).
"""

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import BranchError, DomainError, NonHolomorphicError, UnwrapError
from .grid import Grid, ScalarField
from .lightcone import eps_sep
from .residuals import ConditionEntry, ResidualStats, Tolerances, residual_stats
from .surface import (SurfaceGenerators, isotropic_residual, minimal_pde_residual,
                      spherical_residual)
from .wirtinger import EPS_DIV, d2_dw2, d_dw, harmonic_residual, holomorphy_residual

FieldLike = Union[ScalarField, Callable, float, complex]


def _field(F: FieldLike, grid: Grid, dtype=complex) -> ScalarField:
    if isinstance(F, ScalarField):
        return F
    if callable(F):
        return ScalarField.from_function(grid, lambda w: np.asarray(F(w), dtype=dtype))
    return ScalarField(grid, np.full(grid.shape, F, dtype=dtype))


def _require_holomorphic(F: ScalarField, name, tol: Tolerances):
    r = holomorphy_residual(F)
    if not r.relative_max <= tol.holomorphy:
        raise NonHolomorphicError(
            f"{name} is not holomorphic: |d/dw̄| / |d/dw| = {r.relative_max:.3g} > {tol.holomorphy}")
    return r


def _derivative(F: ScalarField, given):
    """First and second w-derivatives; with ``given`` = F' the second is d/dw of it."""
    if given is None:
        return d_dw(F), d2_dw2(F)
    Fp = _field(given, F.grid)
    return Fp, d_dw(Fp)


def ode_residual(x: ScalarField, y: ScalarField, tol: Optional[Tolerances] = None,
                 x_prime: Optional[FieldLike] = None, y_prime: Optional[FieldLike] = None) -> ConditionEntry:
    """Defects of x'' - 2x'^2/(x-y) and y'' + 2y'^2/(x-y).

    ``x_prime``/``y_prime`` optionally supply exact first derivatives, in
    which case only one finite difference is taken.

    Raises
    ------
    NonHolomorphicError
        If x or y fails the holomorphy check; the ODE is meaningless then.
    """
    tol = tol or Tolerances()
    _require_holomorphic(x, "x", tol)
    _require_holomorphic(y, "y", tol)
    e = ConditionEntry("ode", tol.fd)
    d = x.values - y.values
    xp, xpp = _derivative(x, x_prime)
    yp, ypp = _derivative(y, y_prime)
    with np.errstate(divide="ignore", invalid="ignore"):
        rx = 2 * xp.values ** 2 / d
        ry = -2 * yp.values ** 2 / d
    sep = np.abs(d) > eps_sep(x.values, y.values)
    nz = (np.abs(xp.values) > EPS_DIV) & (np.abs(yp.values) > EPS_DIV)
    m = x.mask & y.mask & xpp.mask & ypp.mask & xp.mask & yp.mask & sep
    e.notes["excluded_zero_derivative"] = int(np.sum(m & ~nz))
    m = m & nz
    e.add("x", residual_stats(xpp.values - rx, m, np.maximum(np.abs(xpp.values), np.abs(rx))))
    e.add("y", residual_stats(ypp.values - ry, m, np.maximum(np.abs(ypp.values), np.abs(ry))))
    return e


def mobius(c, z):
    """M_c(z) = z / (c z - 1)."""
    return z / (c * z - 1)


@dataclass
class MobiusFit:
    c: complex
    constancy_residual: ResidualStats
    degenerate_tag: str  # "finite_c" | "c_zero" | "c_infinity"
    tolerance: float

    @property
    def passed(self):
        if self.degenerate_tag == "c_infinity":
            return True
        return bool(self.constancy_residual.max_abs <= self.tolerance)

    def to_entry(self) -> ConditionEntry:
        e = ConditionEntry("mobius", self.tolerance)
        e.add("constancy", self.constancy_residual)
        e.applicable = self.degenerate_tag != "c_infinity"
        e.notes.update({"c": self.c, "tag": self.degenerate_tag})
        return e


def mobius_fit(x: ScalarField, y: ScalarField, tol: Optional[Tolerances] = None,
               x_prime: Optional[FieldLike] = None, y_prime: Optional[FieldLike] = None,
               tag_tol: Optional[float] = None) -> MobiusFit:
    """Estimate c in 1/x' + 1/y' = c as the mask mean, with pointwise spread.

    Derivatives are finite differences unless supplied. The constancy
    tolerance is ``tol.mobius`` for exact derivatives and ``tol.fd``
    otherwise; ``tag_tol`` (default: the same) decides the c = 0 and
    c = infinity tags.
    """
    tol = tol or Tolerances()
    exact = x_prime is not None and y_prime is not None
    t = tol.mobius if exact else tol.fd
    tag_tol = t if tag_tol is None else tag_tol
    xp = _field(x_prime, x.grid) if x_prime is not None else d_dw(x)
    yp = _field(y_prime, y.grid) if y_prime is not None else d_dw(y)
    m = x.mask & y.mask & xp.mask & yp.mask
    scale_x = np.max(np.abs(xp.values[m])) if np.any(m) else 0.0
    if np.all(np.abs(yp.values[m]) <= tag_tol * max(1.0, scale_x)):
        nan = ResidualStats(math.nan, math.nan, math.nan, 0, int(m.size))
        return MobiusFit(complex(math.inf, 0), nan, "c_infinity", t)
    good = m & (np.abs(xp.values) > EPS_DIV) & (np.abs(yp.values) > EPS_DIV)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = 1 / xp.values + 1 / yp.values
    c = complex(np.mean(q[good]))
    stats = residual_stats(q - c, good, scale=abs(c))
    tag = "c_zero" if abs(c) <= tag_tol else "finite_c"
    return MobiusFit(c, stats, tag, t)


def holomorphic_primitive(Fp: FieldLike, grid: Grid, w0=None, value=0.0, substeps=4) -> ScalarField:
    """∫_{w0}^{w} F'(ξ) dξ along L-shaped paths (first along u, then along v).

    A callable is sampled on a grid refined ``substeps`` times in each
    direction before the composite trapezoid rule is applied; a field is
    integrated on its own nodes. ``w0`` must be a grid node (default: the
    lower-left corner).
    """
    i0, j0 = (0, 0) if w0 is None else grid.node_index(w0)
    if callable(Fp):
        s = int(substeps)
        fine = Grid(grid.u_min, grid.u_max, grid.v_min, grid.v_max,
                    (grid.nu - 1) * s + 1, (grid.nv - 1) * s + 1)
        vals = np.asarray(Fp(fine.w), dtype=complex) * np.ones(fine.shape)
        out = _l_path(vals, fine, i0 * s, j0 * s)[::s, ::s]
    else:
        F = _field(Fp, grid)
        if not np.all(F.mask):
            raise DomainError("holomorphic_primitive needs a fully valid field")
        out = _l_path(F.values, grid, i0, j0)
    return ScalarField(grid, value + out)


def _l_path(vals, grid: Grid, i0, j0):
    row = cumulative_trapezoid(vals[:, j0], dx=grid.h_u, initial=0)
    row = row - row[i0]
    col = cumulative_trapezoid(vals, dx=grid.h_v, axis=1, initial=0)
    col = col - col[:, [j0]]
    return row[:, None] + 1j * col


def mobius_reconstruct(x: ScalarField, c: complex, x_prime: Optional[FieldLike] = None,
                       w0=None, y0=0.0) -> ScalarField:
    """y with y' = M_c(x'), y(w0) = y0."""
    if x_prime is None:
        xp = d_dw(x).values
    elif callable(x_prime):
        return holomorphic_primitive(lambda w: mobius(c, x_prime(w)), x.grid, w0, y0)
    else:
        xp = _field(x_prime, x.grid).values
    return holomorphic_primitive(ScalarField(x.grid, mobius(c, xp)), x.grid, w0, y0)


# ---- the phase θ ----

def _neighbors(i, j, shape):
    if i > 0:
        yield i - 1, j
    if i < shape[0] - 1:
        yield i + 1, j
    if j > 0:
        yield i, j - 1
    if j < shape[1] - 1:
        yield i, j + 1


def unwrap_phase(raw, mask, base=None):
    """Flood-fill phase unwrapping from ``base`` (default: first valid node, row-major).

    Raises
    ------
    UnwrapError
        If the mask is not edge-connected, or if two neighbouring unwrapped
        values end up π/2 or more apart (the phase is not resolved by the grid).
    """
    mask = np.asarray(mask, dtype=bool)
    if not np.any(mask):
        raise UnwrapError("empty mask")
    if base is None:
        base = tuple(int(k) for k in np.argwhere(mask)[0])
    if not mask[base]:
        raise UnwrapError(f"base node {base} is masked out")
    out = np.full(raw.shape, np.nan)
    out[base] = raw[base]
    seen = np.zeros(raw.shape, dtype=bool)
    seen[base] = True
    queue = deque([base])
    two_pi = 2 * math.pi
    while queue:
        i, j = queue.popleft()
        cur = out[i, j]
        for a, b in _neighbors(i, j, raw.shape):
            if mask[a, b] and not seen[a, b]:
                r = raw[a, b]
                out[a, b] = r + two_pi * round((cur - r) / two_pi)
                seen[a, b] = True
                queue.append((a, b))
    if np.any(mask & ~seen):
        raise UnwrapError(f"mask is not edge-connected ({int(np.sum(mask & ~seen))} nodes unreachable)")
    for axis in (0, 1):
        jump = np.abs(np.diff(out, axis=axis))
        both = np.diff(mask.astype(int), axis=axis) == 0
        both &= np.take(mask, range(1, mask.shape[axis]), axis=axis)
        if np.any(both & (jump >= math.pi / 2)):
            raise UnwrapError("unwrapped phase jumps by pi/2 or more between neighbours")
    return out


def theta_from_mu(mu: ScalarField, x: ScalarField, y: ScalarField, tol: Optional[Tolerances] = None,
                  x_prime: Optional[FieldLike] = None, y_prime: Optional[FieldLike] = None,
                  base=None):
    """Unwrapped θ = arg μ and the entry checking θ_w = (i/2)(x' + y')/(x - y) and Δθ = 0.

    Returns
    -------
    theta : ScalarField
    entry : ConditionEntry named "theta"
    """
    tol = tol or Tolerances()
    g = mu.grid
    m = mu.mask & x.mask & y.mask & (np.abs(mu.values) > EPS_DIV)
    raw = np.angle(mu.values)
    theta = ScalarField(g, unwrap_phase(raw, m, base), m)
    e = ConditionEntry("theta", tol.fd)
    tw = d_dw(theta)
    xp = _field(x_prime, g) if x_prime is not None else d_dw(x)
    yp = _field(y_prime, g) if y_prime is not None else d_dw(y)
    with np.errstate(divide="ignore", invalid="ignore"):
        rhs = 0.5j * (xp.values + yp.values) / (x.values - y.values)
    mm = tw.mask & xp.mask & yp.mask
    e.add("theta_w", residual_stats(tw.values - rhs, mm, np.maximum(np.abs(tw.values), np.abs(rhs))))
    e.add("laplacian", harmonic_residual(theta))
    norm = np.abs(np.abs(mu.values) * np.abs(x.values - y.values) - 1)
    e.notes["normalization_max"] = float(np.max(norm[m])) if np.any(m) else math.nan
    return theta, e


def argument_condition_residual(theta: FieldLike, x: ScalarField, y: ScalarField,
                                tol: Optional[Tolerances] = None,
                                x_prime: Optional[FieldLike] = None,
                                y_prime: Optional[FieldLike] = None) -> ConditionEntry:
    """Real parts of e^{iθ} x'/(x-y) and e^{-iθ} i y'/(x-y); both must vanish."""
    tol = tol or Tolerances()
    g = x.grid
    th = _field(theta, g, dtype=float)
    xp = _field(x_prime, g) if x_prime is not None else d_dw(x)
    yp = _field(y_prime, g) if y_prime is not None else d_dw(y)
    d = x.values - y.values
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.exp(1j * th.values.real) * xp.values / d
        t2 = np.exp(-1j * th.values.real) * 1j * yp.values / d
    m = th.mask & x.mask & y.mask & xp.mask & yp.mask
    e = ConditionEntry("argument", tol.fd)
    e.add("x", residual_stats(t1.real, m, np.abs(t1)))
    e.add("y", residual_stats(t2.real, m, np.abs(t2)))
    return e


# ---- harmonic-θ generator ----

@dataclass
class HarmonicThetaData:
    """Input of the harmonic-θ generator.

    ``theta`` (real) and ``theta_w`` (holomorphic) are callables of the
    complex coordinate w or fields; ``w0`` must be a grid node; ``x0``, ``y0``
    are the values of x and y at w0.
    """

    theta: FieldLike
    theta_w: FieldLike
    c: complex
    k: complex
    w0: complex = 0j
    x0: complex = 0j
    y0: complex = 0j

    def theta_at(self, w):
        if callable(self.theta):
            return float(np.real(self.theta(np.asarray(w, dtype=complex))))
        raise DomainError("theta_at needs a callable theta")


@dataclass
class ThetaGeneration:
    generators: SurfaceGenerators
    psi: ScalarField
    x_prime: ScalarField
    y_prime: ScalarField
    provenance: Dict[str, ConditionEntry] = field(default_factory=dict)


def generate_from_theta(data: HarmonicThetaData, grid: Grid, tol: Optional[Tolerances] = None,
                        substeps: int = 4) -> ThetaGeneration:
    """x, y, μ from a harmonic phase θ.

        ψ(w) = θ(w0) - 4i ∫ θ_w dξ,
        x = x0 + (1/c) ∫ (1 + k e^ψ) dξ,     y = y0 + (1/(ck)) ∫ (k + e^{-ψ}) dξ,
        μ = e^{iθ} / |x - y|.

    Integrals run along L-shaped paths from w0 with ``substeps`` trapezoid
    panels per grid cell. The returned provenance holds the ODE, θ_w,
    spherical, isotropic and minimal-PDE verdicts; generated data is not a
    surface unless those pass.

    Raises
    ------
    BranchError
        For c = 0, which is the exponential family.
    """
    tol = tol or Tolerances()
    c, k = complex(data.c), complex(data.k)
    if c == 0:
        raise BranchError("c = 0 is the exponential family; use gallery.ExpFamily")
    if k == 0:
        raise DomainError("k must be nonzero")
    i0, j0 = grid.node_index(data.w0)
    w0 = grid.w[i0, j0]
    theta_f = _field(data.theta, grid, dtype=float)
    theta0 = float(theta_f.values[i0, j0].real)
    s = int(substeps) if callable(data.theta_w) else 1
    work = grid if s == 1 else Grid(grid.u_min, grid.u_max, grid.v_min, grid.v_max,
                                    (grid.nu - 1) * s + 1, (grid.nv - 1) * s + 1)
    tw = _field(data.theta_w, work).values
    psi = theta0 - 4j * _l_path(tw, work, i0 * s, j0 * s)
    ep = np.exp(psi)
    xp_f = (1 + k * ep) / c
    yp_f = (k + 1 / ep) / (c * k)
    X = complex(data.x0) + _l_path(xp_f, work, i0 * s, j0 * s)
    Y = complex(data.y0) + _l_path(yp_f, work, i0 * s, j0 * s)
    sl = (slice(None, None, s), slice(None, None, s))
    X, Y, psi, xp, yp = X[sl], Y[sl], psi[sl], xp_f[sl], yp_f[sl]

    d = X - Y
    sep = np.abs(d) > eps_sep(X, Y)
    theta = theta_f.values.real
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = np.where(sep, np.exp(1j * theta) / np.abs(d), np.nan)
    derivs = {"x_u": xp, "x_v": 1j * xp, "y_u": yp, "y_v": 1j * yp}
    prov_meta = {"w0": [w0.real, w0.imag], "c": [c.real, c.imag], "k": [k.real, k.imag],
                 "substeps": s, "excluded_x_equals_y": int(np.sum(~sep))}
    gen = SurfaceGenerators(ScalarField(grid, X, sep), ScalarField(grid, Y, sep),
                            ScalarField(grid, mu, sep), derivs, prov_meta)
    xpF, ypF = ScalarField(grid, xp, sep), ScalarField(grid, yp, sep)
    out = ThetaGeneration(gen, ScalarField(grid, psi), xpF, ypF)
    prov = out.provenance
    try:
        prov["ode"] = ode_residual(gen.x, gen.y, tol, xpF, ypF)
    except NonHolomorphicError as exc:
        prov["ode"] = ConditionEntry("ode", tol.fd, notes={"error": str(exc)})
        prov["ode"].add("x", residual_stats(np.full(grid.shape, np.nan)))
    tw_nodes = _field(data.theta_w, grid).values
    with np.errstate(divide="ignore", invalid="ignore"):
        rhs = 0.5j * (xp + yp) / d
    te = ConditionEntry("theta_w", tol.fd)
    te.add("theta_w", residual_stats(tw_nodes - rhs, sep, np.maximum(np.abs(tw_nodes), np.abs(rhs))))
    prov["theta_w"] = te
    re = ConditionEntry("ratio", tol.mobius)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = xp / yp - k * np.exp(psi)
    re.add("x'/y'-k e^psi", residual_stats(ratio, sep, np.abs(k * np.exp(psi))))
    prov["ratio"] = re
    prov["spherical"] = spherical_residual(gen, tol)
    prov["isotropic"] = isotropic_residual(gen, tol)
    prov["minimal_pde"] = minimal_pde_residual(gen, tol)
    return out
