"""Timelike surfaces in de Sitter space built from generating data (x, y, mu).

The surface and its Gauss map are

    f = (mu W + conj(mu W)) / 2,     nu = (mu W - conj(mu W)) / (2i),

with ``W = W(x, y)``. Everything that can be derived in two ways (mean
curvature, Gauss curvature, dual metric) is derived both ways and the
cross-difference is kept in the report.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Optional

import numpy as np

from .errors import InconsistentGeneratorsError
from .grid import Grid, ScalarField, VectorField
from .lightcone import eps_sep, lift, ray_coordinate, w_vector
from .lorentz import C2, C3, C4, lorentz_dot, lorentz_dot_c
from .residuals import ConditionEntry, ConditionReport, Tolerances, residual_stats
from .wirtinger import EPS_DIV, partial

STABLE_KEYS = ("spherical", "isotropic", "minimal_pde", "codazzi", "duality",
               "mean_curvature", "frame")
DERIV_KEYS = ("u", "v", "uu", "uv", "vv")
#: width of the boundary band dropped from quantities that differentiate
#: finite-difference data a second time along the same axis
NESTED_BAND = 2


@dataclass(frozen=True)
class SurfaceGenerators:
    """Generating data on a shared grid.

    ``derivatives`` optionally holds analytic partials keyed like ``"x_u"``,
    ``"mu_vv"``; missing ones are taken by finite differences.
    """

    x: ScalarField
    y: ScalarField
    mu: ScalarField
    derivatives: Dict[str, np.ndarray] = field(default_factory=dict)
    provenance: Dict[str, object] = field(default_factory=dict)

    @property
    def grid(self) -> Grid:
        return self.x.grid

    @property
    def mask(self):
        x, y = self.x.values, self.y.values
        with np.errstate(invalid="ignore"):
            sep = np.abs(x - y) > eps_sep(x, y)
        return self.x.mask & self.y.mask & self.mu.mask & sep

    def without_derivatives(self):
        return replace(self, derivatives={})

    def has_analytic(self, order=1):
        keys = DERIV_KEYS[:2] if order == 1 else DERIV_KEYS
        return all(f"{n}_{k}" in self.derivatives for n in ("x", "y", "mu") for k in keys)

    def jet(self, name):
        return _Jet(getattr(self, name), self.derivatives, name, self.mask)

    def normalization_defect(self):
        return np.abs(np.abs(self.mu.values) * np.abs(self.x.values - self.y.values) - 1.0)


class _Jet:
    """Values and partial derivatives of one generator, analytic when possible."""

    def __init__(self, F: ScalarField, analytic, name, mask):
        self.F = F
        self.grid = F.grid
        self.mask = mask
        self._an = analytic
        self._name = name
        self._cache = {}

    @property
    def value(self):
        return self.F.values

    def analytic(self, key):
        return f"{self._name}_{key}" in self._an

    def __getitem__(self, key):
        if key not in self._cache:
            an = self._an.get(f"{self._name}_{key}")
            if an is not None:
                self._cache[key] = (np.asarray(an), self.mask)
            elif key in ("u", "v"):
                self._cache[key] = partial(self.F.values, self.mask, self.grid, 0 if key == "u" else 1)
            elif key in ("uu", "vv"):
                self._cache[key] = partial(self.F.values, self.mask, self.grid,
                                           0 if key == "uu" else 1, order=2)
            elif key == "uv":
                if self.analytic("u"):
                    self._cache[key] = partial(self["u"][0], self.mask, self.grid, 1)
                else:
                    d, m = self["u"]
                    dd, mm = partial(d, m, self.grid, 1)
                    self._cache[key] = (dd, mm)
            else:
                raise KeyError(key)
        return self._cache[key]

    def d(self, key):
        return self[key][0]

    def dmask(self, *keys):
        m = self.mask
        for k in keys:
            m = m & self[k][1]
        return m

    def w(self):
        return 0.5 * (self.d("u") - 1j * self.d("v"))

    def wbar(self):
        return 0.5 * (self.d("u") + 1j * self.d("v"))


def _wz(x, y):
    """Partial-derivative coefficients of W: W_s = x_s P + conj(y)_s Q."""
    x = x[..., None]
    yb = np.conj(y)[..., None]
    return C2 + yb * C4, C3 + x * C4


@dataclass
class SurfaceFrame:
    """The frame {f, f_u, f_v, nu} with first/second derivatives as arrays."""

    grid: Grid
    f: np.ndarray
    nu: np.ndarray
    f_u: np.ndarray
    f_v: np.ndarray
    nu_u: np.ndarray
    nu_v: np.ndarray
    f_uu: np.ndarray
    f_uv: np.ndarray
    f_vv: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    F: np.ndarray
    mask: np.ndarray
    derivative_method: str = "fd"  # "fd" | "analytic" | "mixed"
    source: str = "assembled"

    def field(self, name) -> VectorField:
        return VectorField(self.grid, getattr(self, name), self.mask)

    @property
    def E(self):
        return lorentz_dot(self.f_u, self.f_u)

    @property
    def G(self):
        return lorentz_dot(self.f_v, self.f_v)

    def nested_mask(self):
        """Mask for quantities that difference FD output along the same axis."""
        if self.derivative_method == "analytic":
            return self.mask
        return self.mask & self.grid.interior(NESTED_BAND)


def _chain(mu_j, x_j, y_j, W, mask):
    """First and second derivatives of mu W by the product and chain rules."""
    x, y, mu = x_j.value, y_j.value, mu_j.value
    P, Q = _wz(x, y)
    out = {}
    for s in ("u", "v"):
        Ws = x_j.d(s)[..., None] * P + np.conj(y_j.d(s))[..., None] * Q
        out[s] = mu_j.d(s)[..., None] * W + mu[..., None] * Ws
        out["W_" + s] = Ws
    if all(j.analytic(k) for j in (mu_j, x_j, y_j) for k in ("uu", "uv", "vv")):
        for s, t in (("u", "u"), ("u", "v"), ("v", "v")):
            st = s + t
            xs, xt = x_j.d(s)[..., None], x_j.d(t)[..., None]
            ybs, ybt = np.conj(y_j.d(s))[..., None], np.conj(y_j.d(t))[..., None]
            Wst = (x_j.d(st)[..., None] * P + np.conj(y_j.d(st))[..., None] * Q
                   + (xs * ybt + xt * ybs) * C4)
            out[st] = (mu_j.d(st)[..., None] * W + mu_j.d(s)[..., None] * out["W_" + t]
                       + mu_j.d(t)[..., None] * out["W_" + s] + mu[..., None] * Wst)
    return out


def alpha_beta(gen: SurfaceGenerators):
    """α = Re(μ ȳ_u / (x̄ - ȳ)), β = -Re(μ x_v / (x - y)) and their mask."""
    xj, yj = gen.jet("x"), gen.jet("y")
    mu = gen.mu.values
    d = gen.x.values - gen.y.values
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = np.real(mu * np.conj(yj.d("u")) / np.conj(d))
        beta = -np.real(mu * xj.d("v") / d)
    return alpha, beta, yj.dmask("u") & xj.dmask("v")


def assemble_frame(gen: SurfaceGenerators, tol: Optional[Tolerances] = None) -> SurfaceFrame:
    """Build f, nu and their derivatives from (x, y, mu).

    First derivatives come from the chain rule when the generators carry
    analytic first partials, otherwise from finite differences of f and nu.
    The same holds for second derivatives.

    Raises
    ------
    InconsistentGeneratorsError
        If ``|mu| |x - y|`` departs from 1 by more than ten times the frame
        tolerance on the mask.
    """
    tol = tol or Tolerances()
    g = gen.grid
    mask = gen.mask
    defect = gen.normalization_defect()
    limit = 10.0 * tol.frame_tol(g.h)
    if np.any(mask) and np.nanmax(np.where(mask, defect, 0.0)) > limit:
        raise InconsistentGeneratorsError(
            f"|mu||x-y| deviates from 1 by {np.nanmax(np.where(mask, defect, 0)):.3g} (limit {limit:.3g})")
    xj, yj, mj = gen.jet("x"), gen.jet("y"), gen.jet("mu")
    W = w_vector(np.where(mask, gen.x.values, 0), np.where(mask, gen.y.values, 1))
    muW = np.where(mask, gen.mu.values, 0)[..., None] * W
    f, nu = muW.real, muW.imag

    if gen.has_analytic(1):
        ch = _chain(mj, xj, yj, W, mask)
        f_u, f_v = ch["u"].real, ch["v"].real
        nu_u, nu_v = ch["u"].imag, ch["v"].imag
        m = mask
        if "uu" in ch:
            f_uu, f_uv, f_vv = ch["uu"].real, ch["uv"].real, ch["vv"].real
            method = "analytic"
        else:
            f_uu, m1 = partial(f_u, mask, g, 0)
            f_uv, m2 = partial(f_u, mask, g, 1)
            f_vv, m3 = partial(f_v, mask, g, 1)
            m = m & m1 & m2 & m3
            method = "mixed"
    else:
        f_u, m1 = partial(f, mask, g, 0)
        f_v, m2 = partial(f, mask, g, 1)
        nu_u, m3 = partial(nu, mask, g, 0)
        nu_v, m4 = partial(nu, mask, g, 1)
        f_uu, m5 = partial(f, mask, g, 0, order=2)
        f_vv, m6 = partial(f, mask, g, 1, order=2)
        f_uv, m7 = partial(f_u, m1, g, 1)
        m = mask & m1 & m2 & m3 & m4 & m5 & m6 & m7
        method = "fd"
    alpha, beta, mab = alpha_beta(gen)
    F = lorentz_dot(f_u, f_v)
    return SurfaceFrame(g, f, nu, f_u, f_v, nu_u, nu_v, f_uu, f_uv, f_vv,
                        alpha, beta, F, m & mab, method, "assembled")


def frame_from_vectors(grid: Grid, f, nu, f_u, f_v, nu_u, nu_v, f_uu=None, f_uv=None, f_vv=None,
                       mask=None, source="closed_form") -> SurfaceFrame:
    """Frame from explicitly known vectors (closed forms).

    α and β are read off from f_u = α L(x), f_v = β L(y) with
    x = st(f_u), y = st(f_v). Missing second derivatives are differenced
    from f_u and f_v.
    """
    mask = np.ones(grid.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    method = "analytic"
    if f_uu is None:
        f_uu, m1 = partial(f_u, mask, grid, 0)
        f_uv, m2 = partial(f_u, mask, grid, 1)
        f_vv, m3 = partial(f_v, mask, grid, 1)
        mask = mask & m1 & m2 & m3
        method = "mixed"
    x = ray_coordinate(f_u)
    y = ray_coordinate(f_v)
    Lx, Ly = lift(x), lift(y)
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = lorentz_dot(Lx, Ly)
        alpha = lorentz_dot(f_u, Ly) / denom
        beta = lorentz_dot(f_v, Lx) / denom
    F = lorentz_dot(f_u, f_v)
    mask = mask & np.isfinite(alpha) & np.isfinite(beta)
    return SurfaceFrame(grid, np.asarray(f), np.asarray(nu), np.asarray(f_u), np.asarray(f_v),
                        np.asarray(nu_u), np.asarray(nu_v), np.asarray(f_uu), np.asarray(f_uv),
                        np.asarray(f_vv), alpha, beta, F, mask, method, source)


def stereo_generators(frame: SurfaceFrame):
    """Recover (x, y, mu) from a frame: x = st(f_u), y = st(f_v), mu = 2<f, W̄>/<W, W̄>.

    Either time orientation of f_u, f_v is accepted.
    """
    x = ray_coordinate(frame.f_u)
    y = ray_coordinate(frame.f_v)
    W = w_vector(x, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = 2.0 * lorentz_dot_c(frame.f, np.conj(W)) / lorentz_dot_c(W, np.conj(W))
    return x, y, mu


# ---- checks ----

def frame_check(frame: SurfaceFrame, tol: Optional[Tolerances] = None) -> ConditionEntry:
    """Orthonormality and null-direction defects of {f, f_u, f_v, nu}."""
    tol = tol or Tolerances()
    t = tol.closed_form if frame.derivative_method == "analytic" else tol.frame_tol(frame.grid.h)
    e = ConditionEntry("frame", t)
    m = frame.mask
    f, nu, fu, fv = frame.f, frame.nu, frame.f_u, frame.f_v
    scale_uv = np.abs(frame.F)
    e.add("f.f-1", residual_stats(lorentz_dot(f, f) - 1, m))
    e.add("nu.nu-1", residual_stats(lorentz_dot(nu, nu) - 1, m))
    e.add("f.nu", residual_stats(lorentz_dot(f, nu), m))
    e.add("f_u.f_u", residual_stats(lorentz_dot(fu, fu), m, scale=scale_uv))
    e.add("f_v.f_v", residual_stats(lorentz_dot(fv, fv), m, scale=scale_uv))
    e.add("f_u.nu", residual_stats(lorentz_dot(fu, nu), m, scale=np.linalg.norm(fu, axis=-1)))
    e.add("f_v.nu", residual_stats(lorentz_dot(fv, nu), m, scale=np.linalg.norm(fv, axis=-1)))
    e.notes.update(orientation_summary(frame))
    e.notes["derivative_method"] = frame.derivative_method
    return e


def orientation_summary(frame: SurfaceFrame):
    """Counts of orientation signs and causal character, reported not enforced."""
    m = frame.mask
    M = np.stack([frame.f, frame.f_u, frame.f_v, frame.nu], axis=-1)
    det = np.linalg.det(M)
    return {
        "orientation_positive": int(np.sum(m & (det > 0))),
        "orientation_negative": int(np.sum(m & (det < 0))),
        "f_u_future": int(np.sum(m & (frame.f_u[..., 0] > 0))),
        "f_v_future": int(np.sum(m & (frame.f_v[..., 0] > 0))),
        "F_negative": int(np.sum(m & (frame.F < 0))),
        "F_positive": int(np.sum(m & (frame.F > 0))),
    }


def _quot(num, den):
    with np.errstate(divide="ignore", invalid="ignore"):
        return num / den


def spherical_residual(gen: SurfaceGenerators, tol: Optional[Tolerances] = None) -> ConditionEntry:
    """Defects of μ_w/μ = -x_w/(x-y) + ȳ_w/(x̄-ȳ), its w̄ twin, and |μ||x-y| = 1."""
    tol = tol or Tolerances()
    e = ConditionEntry("spherical", tol.fd)
    xj, yj, mj = gen.jet("x"), gen.jet("y"), gen.jet("mu")
    mu, d = gen.mu.values, gen.x.values - gen.y.values
    m = xj.dmask("u", "v") & yj.dmask("u", "v") & mj.dmask("u", "v")
    small = np.abs(mu) <= EPS_DIV * (1 + np.nanmax(np.abs(np.where(m, mu, 0))))
    m = m & ~small
    yb_w = np.conj(yj.wbar())
    yb_wb = np.conj(yj.w())
    lhs_w = _quot(mj.w(), mu)
    rhs_w = -_quot(xj.w(), d) + _quot(yb_w, np.conj(d))
    lhs_wb = _quot(mj.wbar(), mu)
    rhs_wb = -_quot(xj.wbar(), d) + _quot(yb_wb, np.conj(d))
    e.add("mu_w", residual_stats(lhs_w - rhs_w, m, np.maximum(np.abs(lhs_w), np.abs(rhs_w))))
    e.add("mu_wbar", residual_stats(lhs_wb - rhs_wb, m, np.maximum(np.abs(lhs_wb), np.abs(rhs_wb))))
    e.add("normalization", residual_stats(gen.normalization_defect(), gen.mask))
    e.notes["excluded_zero_mu"] = int(np.sum(gen.mask & small))
    return e


def isotropic_residual(gen: SurfaceGenerators, tol: Optional[Tolerances] = None,
                       frame: Optional[SurfaceFrame] = None) -> ConditionEntry:
    """Defects of μ̄ y_v/(x-y) + μ ȳ_v/(x̄-ȳ) = 0 and μ x_u/(x-y) + μ̄ x̄_u/(x̄-ȳ) = 0.

    With a frame, the metric diagnostics E, G (which must vanish) and the
    identity F = -2αβ|x-y|^2 are added as further components.
    """
    tol = tol or Tolerances()
    e = ConditionEntry("isotropic", tol.fd)
    xj, yj = gen.jet("x"), gen.jet("y")
    mu, d = gen.mu.values, gen.x.values - gen.y.values
    m = xj.dmask("u") & yj.dmask("v")
    t1 = _quot(np.conj(mu) * yj.d("v"), d)
    t2 = _quot(mu * xj.d("u"), d)
    # each equation has the form t + conj(t) = 2 Re t
    e.add("y_v", residual_stats(2 * t1.real, m, np.abs(t1)))
    e.add("x_u", residual_stats(2 * t2.real, m, np.abs(t2)))
    if frame is not None:
        fm = frame.mask
        e.add("E", residual_stats(frame.E, fm, np.abs(frame.F)))
        e.add("G", residual_stats(frame.G, fm, np.abs(frame.F)))
        metric = frame.F + 2 * frame.alpha * frame.beta * np.abs(d) ** 2
        e.add("F=-2ab|x-y|^2", residual_stats(metric, fm, np.abs(frame.F)))
    return e


def minimal_pde_residual(gen: SurfaceGenerators, tol: Optional[Tolerances] = None) -> ConditionEntry:
    """Defects of x_uv = 2 x_u x_v/(x-y) and y_uv = -2 y_u y_v/(x-y)."""
    tol = tol or Tolerances()
    e = ConditionEntry("minimal_pde", tol.fd)
    xj, yj = gen.jet("x"), gen.jet("y")
    d = gen.x.values - gen.y.values
    rx = _quot(2 * xj.d("u") * xj.d("v"), d)
    ry = _quot(-2 * yj.d("u") * yj.d("v"), d)
    e.add("x", residual_stats(xj.d("uv") - rx, xj.dmask("u", "v", "uv"),
                              np.maximum(np.abs(xj.d("uv")), np.abs(rx))))
    e.add("y", residual_stats(yj.d("uv") - ry, yj.dmask("u", "v", "uv"),
                              np.maximum(np.abs(yj.d("uv")), np.abs(ry))))
    return e


@dataclass
class FundamentalReport:
    """Second fundamental form, mean and Gauss curvatures from two routes each."""

    grid: Grid
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    F: np.ndarray
    E: np.ndarray
    G: np.ndarray
    Phi: np.ndarray  # 2β Im(μ(x-y) ȳ_u)
    Phi_alt: np.ndarray  # -2α Im(μ(x̄-ȳ) x_v)
    H_nu: np.ndarray
    K_f: np.ndarray  # -(1/F)(F_u/F)_v
    K_f_gauss: np.ndarray  # 1 - (ac - b^2)/F^2
    K_nu: np.ndarray  # isotropic formula on the dual metric
    K_nu_gauss: np.ndarray  # Gauss equation of (M, nu) with normal f
    F_hat: np.ndarray  # <nu_u, nu_v>
    F_hat_dual: np.ndarray  # ac/F
    E_nu: np.ndarray
    G_nu: np.ndarray
    mask: np.ndarray
    curvature_mask: np.ndarray
    nu_curvature_mask: np.ndarray
    dual_metric_source: str

    def field(self, name) -> ScalarField:
        m = self.curvature_mask if name.startswith("K") else self.mask
        return ScalarField(self.grid, getattr(self, name), m)


def _isotropic_curvature(F, mask, grid):
    """K = -(1/F) (F_u / F)_v for the metric 2F du dv."""
    good = mask & (np.abs(F) > EPS_DIV)
    Fu, m1 = partial(F, good, grid, 0)
    q = _quot(Fu, F)
    qv, m2 = partial(q, m1, grid, 1)
    return -_quot(qv, F), good & m1 & m2


def fundamental_report(frame: SurfaceFrame, gen: Optional[SurfaceGenerators] = None) -> FundamentalReport:
    """Second fundamental coefficients a, b, c, Φ, H and both curvatures.

    ``gen`` supplies μ, x, y for the closed formula of Φ; without it the
    frame's own stereographic data is used.
    """
    g = frame.grid
    m = frame.mask & (np.abs(frame.F) > EPS_DIV)
    nu = frame.nu
    a = lorentz_dot(frame.f_uu, nu)
    b = lorentz_dot(frame.f_uv, nu)
    c = lorentz_dot(frame.f_vv, nu)
    F = frame.F
    if gen is not None:
        x, y, mu = gen.x.values, gen.y.values, gen.mu.values
        xj, yj = gen.jet("x"), gen.jet("y")
        x_v, y_u = xj.d("v"), yj.d("u")
        m = m & xj.dmask("v") & yj.dmask("u")
    else:
        x, y, mu = stereo_generators(frame)
        x_v, mx = partial(np.where(m, x, 0), m, g, 1)
        y_u, my = partial(np.where(m, y, 0), m, g, 0)
        m = m & mx & my
    alpha, beta = frame.alpha, frame.beta
    Phi = 2 * beta * np.imag(mu * (x - y) * np.conj(y_u))
    Phi_alt = -2 * alpha * np.imag(mu * np.conj(x - y) * x_v)
    H_nu = _quot(Phi, F)

    nested = frame.nested_mask() & m
    K_f, mk = _isotropic_curvature(F, nested, g)
    K_f_gauss = 1 - _quot(a * c - b * b, F * F)

    nu_u, nu_v = frame.nu_u, frame.nu_v
    F_hat = lorentz_dot(nu_u, nu_v)
    E_nu = lorentz_dot(nu_u, nu_u)
    G_nu = lorentz_dot(nu_v, nu_v)
    F_hat_dual = _quot(a * c, F)
    ac_scale = np.nanmax(np.abs(np.where(m, a * c, 0))) if np.any(m) else 0.0
    if ac_scale > 1e-8:
        K_nu, mkn = _isotropic_curvature(F_hat_dual, nested, g)
        source = "ac/F"
    else:
        K_nu, mkn = _isotropic_curvature(F_hat, nested, g)
        source = "<nu_u,nu_v>"
    ah = -lorentz_dot(nu_u, frame.f_u)
    bh = -lorentz_dot(nu_u, frame.f_v)
    ch = -lorentz_dot(nu_v, frame.f_v)
    K_nu_gauss = 1 + _quot(ah * ch - bh * bh, E_nu * G_nu - F_hat * F_hat)
    return FundamentalReport(g, a, b, c, F, frame.E, frame.G, Phi, Phi_alt, H_nu, K_f, K_f_gauss,
                             K_nu, K_nu_gauss, F_hat, F_hat_dual, E_nu, G_nu, m, mk & m, mkn & m, source)


def curvature_check(rep: FundamentalReport, tol: Optional[Tolerances] = None) -> ConditionEntry:
    """Cross-differences between the two routes to Φ and to K(f)."""
    tol = tol or Tolerances()
    e = ConditionEntry("curvature", tol.fd)
    e.add("b-Phi", residual_stats(rep.b - rep.Phi, rep.mask, np.abs(rep.F)))
    e.add("Phi-Phi_alt", residual_stats(rep.Phi - rep.Phi_alt, rep.mask, np.abs(rep.F)))
    e.add("K_f-K_f_gauss", residual_stats(rep.K_f - rep.K_f_gauss, rep.curvature_mask,
                                          np.abs(rep.K_f_gauss)))
    return e


def is_minimal(rep: FundamentalReport, tol: Optional[Tolerances] = None):
    tol = tol or Tolerances()
    return residual_stats(rep.Phi, rep.mask, np.abs(rep.F)).relative_max <= tol.fd


def codazzi_residual(rep: FundamentalReport, frame: SurfaceFrame,
                     tol: Optional[Tolerances] = None) -> ConditionEntry:
    """Defects of b_u - a_v = b F_u/F and b_v - c_u = b F_v/F.

    For minimal surfaces a_v and c_u (a = a(u), c = c(v)) are added too.
    """
    tol = tol or Tolerances()
    e = ConditionEntry("codazzi", tol.fd)
    g = rep.grid
    m = frame.nested_mask() & rep.mask
    b_u, m1 = partial(rep.b, m, g, 0)
    b_v, m2 = partial(rep.b, m, g, 1)
    a_v, m3 = partial(rep.a, m, g, 1)
    c_u, m4 = partial(rep.c, m, g, 0)
    F_u, m5 = partial(rep.F, m, g, 0)
    F_v, m6 = partial(rep.F, m, g, 1)
    mm = m & m1 & m2 & m3 & m4 & m5 & m6
    r1 = rep.b * _quot(F_u, rep.F)
    r2 = rep.b * _quot(F_v, rep.F)
    s1 = np.maximum.reduce([np.abs(b_u), np.abs(a_v), np.abs(r1)])
    s2 = np.maximum.reduce([np.abs(b_v), np.abs(c_u), np.abs(r2)])
    e.add("u", residual_stats(b_u - a_v - r1, mm, s1))
    e.add("v", residual_stats(b_v - c_u - r2, mm, s2))
    minimal = is_minimal(rep, tol)
    e.notes["minimal"] = bool(minimal)
    if minimal:
        e.add("a_v", residual_stats(a_v, mm, np.abs(rep.a)))
        e.add("c_u", residual_stats(c_u, mm, np.abs(rep.c)))
    return e


def duality_check(gen: SurfaceGenerators, frame: SurfaceFrame, rep: FundamentalReport,
                  tol: Optional[Tolerances] = None) -> ConditionEntry:
    """Checks that (M, nu) is again a minimal isotropic surface.

    Components: nu_u + (a/F) f_v, nu_v + (c/F) f_u, F^2 K(f) + ac K(nu),
    the two dual isotropic conditions, and ac/F against <nu_u, nu_v>.
    Not applicable when the surface is not minimal.
    """
    tol = tol or Tolerances()
    e = ConditionEntry("duality", tol.fd)
    if not is_minimal(rep, tol):
        e.applicable = False
        e.notes["reason"] = "surface is not minimal"
        return e
    m = rep.mask
    F = rep.F
    d1 = frame.nu_u + _quot(rep.a, F)[..., None] * frame.f_v
    d2 = frame.nu_v + _quot(rep.c, F)[..., None] * frame.f_u
    e.add("nu_u", residual_stats(d1, m, np.linalg.norm(frame.nu_u, axis=-1)))
    e.add("nu_v", residual_stats(d2, m, np.linalg.norm(frame.nu_v, axis=-1)))
    ac = rep.a * rep.c
    if np.nanmax(np.abs(np.where(m, ac, 0))) > 1e-8:
        rel = F * F * rep.K_f + ac * rep.K_nu
        mc = rep.curvature_mask & rep.nu_curvature_mask
        e.add("curvature_relation", residual_stats(
            rel, mc, np.maximum(np.abs(F * F * rep.K_f), np.abs(ac * rep.K_nu))))
    else:
        e.notes["curvature_relation"] = "not applicable: ac vanishes"
    e.add("F_hat", residual_stats(rep.F_hat_dual - rep.F_hat, m, np.abs(rep.F_hat)))

    # dual isotropic conditions written with explicit complex products
    x, y, mu = gen.x.values, gen.y.values, gen.mu.values
    xj, yj = gen.jet("x"), gen.jet("y")
    P, Q = _wz(x, y)
    W_w = xj.w()[..., None] * P + np.conj(yj.wbar())[..., None] * Q
    Pb, Qb = _wz(y, x)  # conj(W) = W(y, x)
    Wb_w = yj.w()[..., None] * Pb + np.conj(xj.wbar())[..., None] * Qb
    Lx, Ly = lift(x), lift(y)
    t_y = mu * lorentz_dot_c(W_w, Ly) - np.conj(mu) * lorentz_dot_c(Wb_w, Ly)
    t_x = mu * lorentz_dot_c(W_w, Lx) - np.conj(mu) * lorentz_dot_c(Wb_w, Lx)
    md = m & xj.dmask("u", "v") & yj.dmask("u", "v")
    e.add("dual_isotropic_y", residual_stats(t_y.imag, md, np.abs(t_y)))
    e.add("dual_isotropic_x", residual_stats(t_x.real, md, np.abs(t_x)))
    return e


def mean_curvature_consistency(frame: SurfaceFrame, gen: SurfaceGenerators,
                               tol: Optional[Tolerances] = None) -> ConditionEntry:
    """Agreement of the two closed formulas for <H_f, nu> and the α/β balance identity."""
    tol = tol or Tolerances()
    e = ConditionEntry("mean_curvature", tol.fd)
    xj, yj = gen.jet("x"), gen.jet("y")
    x, y, mu = gen.x.values, gen.y.values, gen.mu.values
    d = x - y
    alpha, beta = frame.alpha, frame.beta
    m = frame.mask & xj.dmask("v") & yj.dmask("u")
    zero = (np.abs(alpha) <= EPS_DIV) | (np.abs(beta) <= EPS_DIV)
    e.notes["excluded_zero_alpha_beta"] = int(np.sum(m & zero))
    m = m & ~zero
    h1 = _quot(np.imag(mu * _quot(xj.d("v"), d)), beta)
    h2 = _quot(np.imag(np.conj(mu) * _quot(yj.d("u"), d)), alpha)
    e.add("H_two_formulas", residual_stats(h1 - h2, m, np.maximum(np.abs(h1), np.abs(h2))))
    t1 = alpha * np.imag(mu * np.conj(d) * xj.d("v"))
    t2 = beta * np.imag(mu * d * np.conj(yj.d("u")))
    e.add("balance", residual_stats(t1 + t2, m, np.maximum(np.abs(t1), np.abs(t2))))
    Hmax = np.nanmax(np.abs(np.where(m, h1, 0))) if np.any(m) else float("nan")
    e.notes["H_nu_max"] = float(Hmax)
    return e


def minimality_check(rep: FundamentalReport, tol: Optional[Tolerances] = None) -> ConditionEntry:
    """Φ = <f_uv, nu> must vanish (both routes)."""
    tol = tol or Tolerances()
    e = ConditionEntry("minimality", tol.fd)
    e.add("Phi", residual_stats(rep.Phi, rep.mask, np.abs(rep.F)))
    e.add("b", residual_stats(rep.b, rep.mask, np.abs(rep.F)))
    e.add("H_nu", residual_stats(rep.H_nu, rep.mask))
    return e


ALL_CHECKS = STABLE_KEYS + ("curvature", "minimality")


def verify(gen: SurfaceGenerators, checks=STABLE_KEYS, tol: Optional[Tolerances] = None,
           frame: Optional[SurfaceFrame] = None) -> ConditionReport:
    """Run the named surface checks and collect them in a ConditionReport."""
    tol = tol or Tolerances()
    report = ConditionReport()
    checks = list(checks)
    unknown = set(checks) - set(ALL_CHECKS)
    if unknown:
        raise KeyError(f"unknown checks: {sorted(unknown)}")
    if "spherical" in checks:
        report.add(spherical_residual(gen, tol))
    if "minimal_pde" in checks:
        report.add(minimal_pde_residual(gen, tol))
    needs_frame = set(checks) & {"isotropic", "codazzi", "duality", "mean_curvature", "frame",
                                 "curvature", "minimality"}
    if needs_frame:
        try:
            frame = frame or assemble_frame(gen, tol)
        except InconsistentGeneratorsError as exc:
            # the frame-based checks cannot run; record them as failed
            for name in sorted(needs_frame):
                entry = isotropic_residual(gen, tol) if name == "isotropic" else ConditionEntry(name, tol.fd)
                entry.notes["error"] = str(exc)
                entry.add("frame_assembly", residual_stats(np.full(gen.grid.shape, np.nan)))
                report.add(entry)
            return report
    if "isotropic" in checks:
        report.add(isotropic_residual(gen, tol, frame))
    if "frame" in checks:
        report.add(frame_check(frame, tol))
    if set(checks) & {"codazzi", "duality", "curvature", "minimality"}:
        rep = fundamental_report(frame, gen)
        if "codazzi" in checks:
            report.add(codazzi_residual(rep, frame, tol))
        if "duality" in checks:
            report.add(duality_check(gen, frame, rep, tol))
        if "curvature" in checks:
            report.add(curvature_check(rep, tol))
        if "minimality" in checks:
            report.add(minimality_check(rep, tol))
    if "mean_curvature" in checks:
        report.add(mean_curvature_consistency(frame, gen, tol))
    return report
