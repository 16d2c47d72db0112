"""Closed-form surface families.

Each family spec is a small frozen dataclass; :func:`build` turns it into
:class:`~timelike.surface.SurfaceGenerators` on a grid, attaching a
closed-form frame where one is known.
"""

import cmath
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, Optional

import numpy as np

from .errors import ConfigError, DomainError, MarginError
from .grid import Grid, ScalarField
from .lorentz import lorentz_dot
from .residuals import ConditionEntry, Tolerances, residual_stats
from .surface import SurfaceFrame, SurfaceGenerators, frame_from_vectors, stereo_generators
from .wirtinger import partial

MARGIN = 0.05
SQ2 = math.sqrt(2.0)


@dataclass(frozen=True)
class TotallyGeodesic:
    """x = v, y = u, mu = 1/(u - v) on u > v + margin."""

    margin: float = MARGIN
    name = "totally_geodesic"


@dataclass(frozen=True)
class Example64:
    """x = e^{(1+i)w}, y = -x, mu = sqrt(2)(1+i)/4 e^{v-u}."""

    name = "example64"


@dataclass(frozen=True)
class ExpFamily:
    """x = a + e^{kw+b}, y = a - e^{kw+b} with constant phase theta.

    ``theta=None`` picks pi/2 - arg k, which satisfies the first argument
    condition always and both of them whenever any constant phase can.
    """

    a: complex = 0.0
    b: complex = 0.0
    k: complex = 1.0
    theta: Optional[float] = None
    name = "exp_family"

    def __post_init__(self):
        if self.k == 0:
            raise DomainError("ExpFamily needs k != 0")

    @property
    def phase(self):
        return math.pi / 2 - cmath.phase(self.k) if self.theta is None else self.theta


@dataclass(frozen=True)
class ParamFamily:
    """x = c + k e^{(1+i) r w}, y = c - k e^{(1+i) r w}, mu = sqrt(2)(1+i)/(4|k|) e^{r(v-u)}."""

    c: complex = 0.0
    k: complex = 1.0
    r: float = 1.0
    name = "param_family"

    def __post_init__(self):
        if self.k == 0 or self.r == 0:
            raise DomainError("ParamFamily needs k != 0 and r != 0")


@dataclass(frozen=True)
class CliffordType:
    """cos(s) c1(q) + sin(s) c2(q) with s = s(p), p = (u+v)/2, q = (u-v)/2.

    ``x_min``/``x_max`` bound the angle s; cos 2s must stay above ``margin``.
    """

    x_min: float = 0.1
    x_max: float = 0.6
    margin: float = MARGIN
    name = "clifford_type"

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise DomainError("CliffordType needs x_min < x_max")
        for s in (self.x_min, self.x_max):
            if math.cos(2 * s) <= self.margin:
                raise MarginError(f"cos 2x = {math.cos(2 * s):.3g} <= margin {self.margin} at x = {s}")


@dataclass(frozen=True)
class TiltedSphere:
    """f = sin(theta) e4 + cos(theta) X with X an isotropic chart of the x4 = 0 slice.

    The chart is X(u, v) = (1 + uv, u + v, uv - 1, 0)/(v - u) on v > u + margin.
    """

    theta: float = math.pi / 4
    margin: float = MARGIN
    name = "tilted_sphere"

    def __post_init__(self):
        if not 0 < self.theta < math.pi / 2:
            raise DomainError("TiltedSphere needs 0 < theta < pi/2")

    @property
    def k(self):
        return -math.tan(self.theta)

    @property
    def T(self):
        return np.array([0.0, 0.0, 0.0, 1.0 / math.cos(self.theta)])


FAMILIES = {cls.name: cls for cls in
            (TotallyGeodesic, Example64, ExpFamily, ParamFamily, CliffordType, TiltedSphere)}


def _complex(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex value must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return complex(v)


_COMPLEX_FIELDS = {"a", "b", "k", "c"}


def family_from_dict(doc: Dict) -> object:
    """Build a family spec from ``{"family": name, **params}``."""
    doc = dict(doc)
    name = doc.pop("family", None)
    if name not in FAMILIES:
        raise ConfigError(f"unknown family {name!r}; known: {sorted(FAMILIES)}")
    cls = FAMILIES[name]
    allowed = set(cls.__dataclass_fields__)
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown parameters for {name}: {sorted(unknown)}")
    kw = {}
    for key, val in doc.items():
        if key in _COMPLEX_FIELDS and not (name == "param_family" and key == "r"):
            kw[key] = _complex(val)
        elif val is None:
            kw[key] = None
        else:
            kw[key] = float(val)
    return cls(**kw)


def family_to_dict(spec) -> Dict:
    out = {"family": spec.name}
    for k, v in asdict(spec).items():
        out[k] = [v.real, v.imag] if isinstance(v, complex) else v
    return out


def default_grid(spec, n=201) -> Grid:
    """A grid inside the family's regular domain, at least 0.05 away from singular sets."""
    if isinstance(spec, TotallyGeodesic):
        m = spec.margin
        return Grid(0.5 + m, 1.5 + m, -0.5, 0.5, n, n)
    if isinstance(spec, TiltedSphere):
        # generators are differenced numerically; stay well clear of v = u
        return Grid(-0.5, 0.5, 1.5, 2.5, n, n)
    if isinstance(spec, CliffordType):
        lo, hi = clifford_p(spec.x_min), clifford_p(spec.x_max)
        return Grid(float(lo), float(hi), float(lo), float(hi), n, n)
    return Grid.square(-1.0, 1.0, n)


@dataclass
class Built:
    """Output of :func:`build`."""

    spec: object
    generators: SurfaceGenerators
    frame: Optional[SurfaceFrame] = None
    provenance: Dict[str, object] = field(default_factory=dict)


def _gens(grid, x, y, mu, derivs, provenance):
    return SurfaceGenerators(ScalarField(grid, x), ScalarField(grid, y), ScalarField(grid, mu),
                             {k: np.asarray(v, dtype=complex) for k, v in derivs.items()},
                             provenance)


def _exp_generators(grid, center, amp, rate, mu_coeff, mu_rate, provenance):
    """x = center + amp e^{rate w}, y = center - amp e^{rate w}, mu = mu_coeff e^{mu_rate (v-u)}."""
    u, v = grid.mesh()
    w = u + 1j * v
    E = amp * np.exp(rate * w)
    mu = mu_coeff * np.exp(mu_rate * (v - u))
    ru, rv = rate, 1j * rate
    d = {
        "x_u": ru * E, "x_v": rv * E, "x_uu": ru * ru * E, "x_uv": ru * rv * E, "x_vv": rv * rv * E,
        "mu_u": -mu_rate * mu, "mu_v": mu_rate * mu, "mu_uu": mu_rate ** 2 * mu,
        "mu_uv": -mu_rate ** 2 * mu, "mu_vv": mu_rate ** 2 * mu,
    }
    for key in ("u", "v", "uu", "uv", "vv"):
        d["y_" + key] = -d["x_" + key]
    return _gens(grid, center + E, center - E, mu, d, provenance)


def _example64_frame(grid):
    u, v = grid.mesh()
    s, c = np.sin(u + v), np.cos(u + v)
    sh, ch = np.sinh(v - u), np.cosh(v - u)
    k = SQ2 / 2
    f = k * np.stack([sh, -s, c, -ch], axis=-1)
    nu = k * np.stack([sh, s, -c, -ch], axis=-1)
    f_u = k * np.stack([-ch, -c, -s, sh], axis=-1)
    f_v = k * np.stack([ch, -c, -s, -sh], axis=-1)
    return frame_from_vectors(grid, f, nu, f_u, f_v, -f_v, -f_u, nu, -f, nu)


# ---- Clifford-type surface ----

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(96)


def clifford_p(s):
    """p(s) = integral_0^s dt / sqrt(cos 2t), by 96-point Gauss-Legendre (vectorised)."""
    s = np.asarray(s, dtype=float)
    t = 0.5 * s[..., None] * (_GL_NODES + 1.0)
    return 0.5 * s * np.sum(_GL_WEIGHTS / np.sqrt(np.cos(2 * t)), axis=-1)


def clifford_angle(p, tol=1e-13, max_iter=60):
    """Invert p(s) by safeguarded Newton iteration; p is odd and increasing on |s| < pi/4."""
    p = np.asarray(p, dtype=float)
    lo = np.full(p.shape, -math.pi / 4)
    hi = np.full(p.shape, math.pi / 4)
    s = np.clip(p, -0.7, 0.7)
    for _ in range(max_iter):
        r = clifford_p(s) - p
        lo = np.where(r < 0, s, lo)
        hi = np.where(r > 0, s, hi)
        step = r * np.sqrt(np.cos(2 * s))
        nxt = s - step
        bad = (nxt <= lo) | (nxt >= hi) | ~np.isfinite(nxt)
        nxt = np.where(bad, 0.5 * (lo + hi), nxt)
        done = np.max(np.abs(nxt - s)) <= tol
        s = nxt
        if done:
            break
    return s


def _clifford_frame(spec: CliffordType, grid: Grid):
    u, v = grid.mesh()
    p, q = 0.5 * (u + v), 0.5 * (u - v)
    s = clifford_angle(p)
    cos2 = np.cos(2 * s)
    bad = cos2 <= spec.margin
    if np.any(bad):
        raise MarginError(f"cos 2x <= {spec.margin} on the grid", np.argwhere(bad))
    sp = np.sqrt(cos2)  # s'(p)
    spp = -np.sin(2 * s)  # s''(p)
    cs, ss = np.cos(s), np.sin(s)
    ch, sh, cq, sq = np.cosh(q), np.sinh(q), np.cos(q), np.sin(q)
    st = lambda *c: np.stack(c, axis=-1)  # noqa: E731
    X = st(cs * sh, ss * cq, ss * sq, cs * ch)
    X_s = st(-ss * sh, cs * cq, cs * sq, -ss * ch)
    X_q = st(cs * ch, -ss * sq, ss * cq, cs * sh)
    X_sq = st(-ss * ch, -cs * sq, cs * cq, -ss * sh)
    X_qq = st(cs * sh, -ss * cq, -ss * sq, cs * ch)
    f_p, f_q = sp[..., None] * X_s, X_q
    f_pp = spp[..., None] * X_s - cos2[..., None] * X
    f_pq = sp[..., None] * X_sq
    N = st(ss * ch, -cs * sq, cs * cq, ss * sh)
    N_s = st(cs * ch, ss * sq, -ss * cq, cs * sh)
    N_q = st(ss * sh, -cs * cq, -cs * sq, ss * ch)
    inv = 1.0 / sp
    dinv = np.sin(2 * s) / cos2 ** 1.5
    nu = inv[..., None] * N
    nu_p = sp[..., None] * (inv[..., None] * N_s + dinv[..., None] * N)
    nu_q = inv[..., None] * N_q
    f_u, f_v = 0.5 * (f_p + f_q), 0.5 * (f_p - f_q)
    f_uu = 0.25 * (f_pp + 2 * f_pq + X_qq)
    f_uv = 0.25 * (f_pp - X_qq)
    f_vv = 0.25 * (f_pp - 2 * f_pq + X_qq)
    frame = frame_from_vectors(grid, X, nu, f_u, f_v, 0.5 * (nu_p + nu_q), 0.5 * (nu_p - nu_q),
                               f_uu, f_uv, f_vv)
    return frame, s


def clifford_curvature(s):
    """K(f) = 1 + sec^2(2s) along the Clifford-type surface."""
    return 1.0 + 1.0 / np.cos(2 * np.asarray(s)) ** 2


# ---- tilted sphere ----

def _tilted_frame(spec: TiltedSphere, grid: Grid):
    u, v = grid.mesh()
    D = v - u
    bad = D < spec.margin - 1e-12
    if np.any(bad):
        raise MarginError(f"v - u < margin {spec.margin}", np.argwhere(bad))
    zero, one = np.zeros_like(u), np.ones_like(u)
    P = np.stack([1 + u * v, u + v, u * v - 1, zero], axis=-1)
    P_u = np.stack([v, one, v, zero], axis=-1)
    P_v = np.stack([u, one, u, zero], axis=-1)
    P_uv = np.array([1.0, 0.0, 1.0, 0.0])
    D1, D2, D3 = D[..., None], D[..., None] ** 2, D[..., None] ** 3
    X = P / D1
    X_u = P_u / D1 + P / D2
    X_v = P_v / D1 - P / D2
    X_uu = 2 * P_u / D2 + 2 * P / D3
    X_uv = P_uv / D1 + (P_v - P_u) / D2 - 2 * P / D3
    X_vv = -2 * P_v / D2 + 2 * P / D3
    st, ct = math.sin(spec.theta), math.cos(spec.theta)
    e4 = np.array([0.0, 0.0, 0.0, 1.0])
    f = st * e4 + ct * X
    nu = ct * e4 - st * X
    return frame_from_vectors(grid, f, nu, ct * X_u, ct * X_v, -st * X_u, -st * X_v,
                              ct * X_uu, ct * X_uv, ct * X_vv)


def _generators_from_frame(frame: SurfaceFrame, provenance):
    x, y, mu = stereo_generators(frame)
    return _gens(frame.grid, x, y, mu, {}, provenance)


def build(spec, grid: Optional[Grid] = None) -> Built:
    """Generators (and a closed-form frame where known) for a family spec."""
    grid = grid or default_grid(spec)
    prov = {"family": family_to_dict(spec), "grid": grid.to_dict()}
    if isinstance(spec, TotallyGeodesic):
        u, v = grid.mesh()
        d = u - v
        bad = d < spec.margin - 1e-12
        if np.any(bad):
            raise MarginError(f"u - v < margin {spec.margin}", np.argwhere(bad))
        z = np.zeros_like(u)
        derivs = {"x_u": z, "x_v": z + 1, "y_u": z + 1, "y_v": z,
                  "mu_u": -1 / d ** 2, "mu_v": 1 / d ** 2,
                  "mu_uu": 2 / d ** 3, "mu_uv": -2 / d ** 3, "mu_vv": 2 / d ** 3}
        for n in ("x", "y"):
            for k in ("uu", "uv", "vv"):
                derivs[f"{n}_{k}"] = z
        gen = _gens(grid, v + 0j, u + 0j, 1 / d + 0j, derivs, prov)
        return Built(spec, gen, None, prov)
    if isinstance(spec, Example64):
        gen = _exp_generators(grid, 0.0, 1.0, 1 + 1j, SQ2 * (1 + 1j) / 4, 1.0, prov)
        prov["shape_operator"] = {
            "stated": [[0, 1], [1, 0]],
            "computed_a_b_c_F": [1, 0, 1, 1],
            "computed_weingarten": [[0, -1], [-1, 0]],
            "note": "sign discrepancy recorded, not resolved",
        }
        return Built(spec, gen, _example64_frame(grid), prov)
    if isinstance(spec, ExpFamily):
        # |x - y| = 2|e^{kw+b}| = 2 e^{Re(kw + b)}; mu = e^{i theta}/|x - y|
        k, b = complex(spec.k), complex(spec.b)
        u, v = grid.mesh()
        E = np.exp(k * (u + 1j * v) + b)
        mod = np.abs(2 * E)
        mu = np.exp(1j * spec.phase) / mod
        ru, rv = k.real, -k.imag  # d/du, d/dv of Re(kw + b)
        derivs = {
            "x_u": k * E, "x_v": 1j * k * E, "x_uu": k * k * E, "x_uv": 1j * k * k * E,
            "x_vv": -k * k * E,
            "mu_u": -ru * mu, "mu_v": -rv * mu, "mu_uu": ru * ru * mu, "mu_uv": ru * rv * mu,
            "mu_vv": rv * rv * mu,
        }
        for key in ("u", "v", "uu", "uv", "vv"):
            derivs["y_" + key] = -derivs["x_" + key]
        prov["theta"] = spec.phase
        a = complex(spec.a)
        gen = _gens(grid, a + E, a - E, mu, derivs, prov)
        return Built(spec, gen, None, prov)
    if isinstance(spec, ParamFamily):
        k = complex(spec.k)
        coeff = SQ2 * (1 + 1j) / (4 * abs(k))
        gen = _exp_generators(grid, complex(spec.c), k, (1 + 1j) * spec.r, coeff, spec.r, prov)
        return Built(spec, gen, None, prov)
    if isinstance(spec, CliffordType):
        frame, s = _clifford_frame(spec, grid)
        lo, hi = spec.x_min - 1e-9, spec.x_max + 1e-9
        outside = (s < lo) | (s > hi)
        if np.any(outside):
            raise MarginError(f"angle leaves [{spec.x_min}, {spec.x_max}]", np.argwhere(outside))
        prov["quadrature"] = "96-point Gauss-Legendre for p(x), Newton inversion to 1e-13"
        prov["angle_range"] = [float(s.min()), float(s.max())]
        built = Built(spec, _generators_from_frame(frame, prov), frame, prov)
        built.angle = s
        return built
    if isinstance(spec, TiltedSphere):
        frame = _tilted_frame(spec, grid)
        prov["chart"] = "X(u,v) = (1+uv, u+v, uv-1, 0)/(v-u), v > u"
        prov["k"] = spec.k
        prov["T"] = spec.T.tolist()
        return Built(spec, _generators_from_frame(frame, prov), frame, prov)
    raise ConfigError(f"unknown family spec {spec!r}")


def tilted_constancy(spec: TiltedSphere, frame: SurfaceFrame):
    """Largest deviation of nu - k f from the constant vector T, and <T, T>."""
    V = frame.nu - spec.k * frame.f
    dev = np.linalg.norm(V - spec.T, axis=-1)
    return float(np.max(dev[frame.mask])), float(lorentz_dot(spec.T, spec.T))


def clifford_metric_check(spec: CliffordType, grid: Optional[Grid] = None,
                          tol: Optional[Tolerances] = None) -> ConditionEntry:
    """Metric of the Clifford-type surface in (p, q) and in (u, v) coordinates.

    In (p, q): E = x'(p)^2, F = 0, G = -cos 2x. After u = p + q, v = p - q the
    coordinates are isotropic: E = G = 0.
    """
    tol = tol or Tolerances()
    grid = grid or default_grid(spec)
    e = ConditionEntry("clifford_metric", tol.fd + tol.quad_tol(grid.h))
    pq = Grid(0.5 * (grid.u_min + grid.v_min), 0.5 * (grid.u_max + grid.v_max),
              0.5 * (grid.u_min - grid.v_max), 0.5 * (grid.u_max - grid.v_min), grid.nu, grid.nv)
    p, q = pq.mesh()
    s = clifford_angle(p)
    bad = np.cos(2 * s) <= spec.margin
    if np.any(bad):
        raise MarginError("cos 2x <= margin on the (p, q) grid", np.argwhere(bad))
    cs, ss = np.cos(s), np.sin(s)
    X = np.stack([cs * np.sinh(q), ss * np.cos(q), ss * np.sin(q), cs * np.cosh(q)], axis=-1)
    ones = np.ones(pq.shape, dtype=bool)
    X_p, m1 = partial(X, ones, pq, 0)
    X_q, m2 = partial(X, ones, pq, 1)
    m = m1 & m2
    Ebar = lorentz_dot(X_p, X_p)
    Fbar = lorentz_dot(X_p, X_q)
    Gbar = lorentz_dot(X_q, X_q)
    cos2 = np.cos(2 * s)
    e.add("E_bar", residual_stats(Ebar - cos2, m, cos2))
    e.add("F_bar", residual_stats(Fbar, m, cos2))
    e.add("G_bar", residual_stats(Gbar + cos2, m, cos2))
    frame, _ = _clifford_frame(spec, grid)
    f_u, mu_ = partial(frame.f, frame.mask, grid, 0)
    f_v, mv_ = partial(frame.f, frame.mask, grid, 1)
    Fuv = np.abs(lorentz_dot(f_u, f_v))
    e.add("E", residual_stats(lorentz_dot(f_u, f_u), mu_ & mv_, Fuv))
    e.add("G", residual_stats(lorentz_dot(f_v, f_v), mu_ & mv_, Fuv))
    return e
