"""Stereographic coordinates for lightlike rays and the quadric lift W(x, y).

A future lightlike ray of R^4_1 is identified with a point of the Riemann
sphere through ``st(L) = (L2 + i L3) / (L1 - L4)``. The inverse picks the
representative ``L(x) = (1 + |x|^2, 2 Re x, 2 Im x, |x|^2 - 1)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePairError, DegeneratePlaneError, DomainError
from .lorentz import C1, C2, C3, C4, EPS_NULL, lorentz_dot, lorentz_dot_c


class PointAtInfinity:
    """The point at infinity of the Riemann sphere (a singleton)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (PointAtInfinity, ())


INFINITY = PointAtInfinity()

#: representative of the ray st^{-1}(infinity)
NORTH_RAY = np.array([1.0, 0.0, 0.0, 1.0])


def is_infinity(x):
    return x is INFINITY


def eps_sep(x, y):
    """Separation threshold below which x and y count as equal."""
    return 1e-10 * (1.0 + np.abs(x) + np.abs(y))


def ray_coordinate(L):
    """Vectorised ``(L2 + i L3) / (L1 - L4)`` with no causal checks.

    Works for either time orientation of the ray, which is what the surface
    module needs when a coordinate direction happens to be past-directed.
    Entries with ``L1 = L4`` come back as complex infinity/NaN.
    """
    L = np.asarray(L, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (L[..., 1] + 1j * L[..., 2]) / (L[..., 0] - L[..., 3])


def stereographic(L, eps=EPS_NULL):
    """Stereographic coordinate of a future-directed lightlike vector.

    Returns :data:`INFINITY` for rays proportional to ``(1, 0, 0, 1)``.
    """
    L = np.asarray(L, dtype=float)
    if L.shape != (4,) or not np.all(np.isfinite(L)):
        raise DomainError("expected a finite 4-vector")
    norm2 = float(np.dot(L, L))
    if norm2 == 0.0 or abs(lorentz_dot(L, L)) > eps * max(1.0, norm2):
        raise DomainError(f"{L} is not lightlike")
    if L[0] <= 0:
        raise DomainError(f"{L} is not future-directed")
    denom = L[0] - L[3]
    if abs(denom) <= eps * L[0]:
        return INFINITY
    return complex((L[1] + 1j * L[2]) / denom)


def lift(x):
    """Lightlike representative L(x); accepts scalars, arrays or INFINITY."""
    if is_infinity(x):
        return NORTH_RAY.copy()
    x = np.asarray(x, dtype=complex)
    r2 = (x * np.conj(x)).real
    return np.stack([1.0 + r2, 2.0 * x.real, 2.0 * x.imag, r2 - 1.0], axis=-1)


def pair_to_w(x, y):
    """Complex null vector W(x, y) = (1 + x ȳ, x + ȳ, -i(x - ȳ), -1 + x ȳ).

    ``W`` and its conjugate span the complexified orthogonal complement of
    the timelike plane spanned by L(x) and L(y). Array arguments broadcast.

    Raises
    ------
    DegeneratePairError
        If ``x`` and ``y`` coincide (within :func:`eps_sep`) anywhere, or
        both are infinite.
    """
    if is_infinity(x) and is_infinity(y):
        raise DegeneratePairError("W(inf, inf) is undefined")
    if is_infinity(y):
        x = complex(x)
        return np.array([x, 1.0, 1j, x], dtype=complex)
    if is_infinity(x):
        yb = complex(np.conj(y))
        return np.array([yb, 1.0, -1j, yb], dtype=complex)
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if np.any(np.abs(x - y) <= eps_sep(x, y)):
        raise DegeneratePairError("x and y coincide")
    return w_vector(x, y)


def w_vector(x, y):
    """W(x, y) without the separation check (used on masked grids)."""
    x = np.asarray(x, dtype=complex)
    yb = np.conj(np.asarray(y, dtype=complex))
    xyb = x * yb
    return np.stack([1.0 + xyb, x + yb, -1j * (x - yb), xyb - 1.0], axis=-1)


def w_from_basis(x, y):
    """Same vector as :func:`w_vector`, assembled in the null basis c1..c4."""
    x = np.asarray(x, dtype=complex)[..., None]
    yb = np.conj(np.asarray(y, dtype=complex))[..., None]
    return C1 + x * C2 + yb * C3 + x * yb * C4


@dataclass(frozen=True)
class ProjectivePoint:
    """A point of CP^3 given by a nonzero representative."""

    representative: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.representative, dtype=complex)
        if z.shape != (4,) or not np.any(z != 0):
            raise DomainError("a projective point needs a nonzero 4-vector")
        object.__setattr__(self, "representative", z)

    def equivalent(self, other, rtol=1e-10):
        """True when the two representatives are complex-proportional."""
        a = self.representative
        b = other.representative if isinstance(other, ProjectivePoint) else np.asarray(other)
        k = int(np.argmax(np.abs(a)))
        if abs(b[k]) == 0:
            return False
        scale = b[k] / a[k]
        return bool(np.linalg.norm(b - scale * a) <= rtol * np.linalg.norm(b))


def quadric_membership(Z, rtol=1e-9):
    """Classify ``[Z]`` as ``"space"`` (Q_space), ``"time"`` (Q_time) or ``"neither"``.

    Both products are compared against ``|Z|^2`` so the answer does not
    depend on the representative.
    """
    z = Z.representative if isinstance(Z, ProjectivePoint) else np.asarray(Z, dtype=complex)
    if not np.any(z != 0):
        raise DomainError("zero vector is not a projective point")
    scale = float(np.sum(np.abs(z) ** 2))
    zz = lorentz_dot_c(z, z)
    zzbar = lorentz_dot_c(z, np.conj(z)).real
    null = abs(zz) <= rtol * scale
    if null and zzbar > rtol * scale:
        return "space"
    if abs(zzbar) <= rtol * scale and not null:
        return "time"
    return "neither"


def plane_to_quadric(L1, L2):
    """Map the timelike plane spanned by two future rays to ``[W(st L1, st L2)]``."""
    L1 = np.asarray(L1, dtype=float)
    L2 = np.asarray(L2, dtype=float)
    x = stereographic(L1)
    y = stereographic(L2)
    rank = np.linalg.matrix_rank(np.stack([L1, L2]), tol=1e-12 * max(np.abs(L1).max(), np.abs(L2).max()))
    if rank < 2:
        raise DegeneratePlaneError("rays are proportional")
    return ProjectivePoint(pair_to_w(x, y))
