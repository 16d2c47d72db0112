"""Minkowski inner product on R^4_1 and its complex-bilinear extension.

Vectors are plain numpy arrays whose last axis has length 4, so every
function here broadcasts over grids of vectors. The signature is
(-, +, +, +) with the timelike coordinate first.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateBasisError, DomainError

ETA = np.array([-1.0, 1.0, 1.0, 1.0])

#: relative tolerance used to call a vector lightlike
EPS_NULL = 1e-9
#: relative tolerance on |det| for basis_orientation
EPS_DET = 1e-12

# null basis of C^4; every product <c_i, c_j> is 0 except C14 = -2, C23 = 2
C1 = np.array([1, 0, 0, -1], dtype=complex)
C2 = np.array([0, 1, -1j, 0], dtype=complex)
C3 = np.array([0, 1, 1j, 0], dtype=complex)
C4 = np.array([1, 0, 0, 1], dtype=complex)
C_BASIS = np.stack([C1, C2, C3, C4])


def lorentz_dot(a, b):
    """Minkowski product ``-a1 b1 + a2 b2 + a3 b3 + a4 b4`` along the last axis."""
    a = np.asarray(a)
    b = np.asarray(b)
    return np.sum(ETA * a * b, axis=-1)


def lorentz_dot_c(a, b):
    """Complex-bilinear extension of :func:`lorentz_dot`.

    No conjugation is applied to either argument; ``<Z, conj(Z)>`` is what
    gives a Hermitian-looking real number.
    """
    return lorentz_dot(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


@dataclass(frozen=True)
class CausalCharacter:
    tag: str  # "timelike" | "spacelike" | "lightlike"
    future_directed: Optional[bool]  # None for spacelike vectors


def causal_character(v, eps=EPS_NULL):
    """Classify a nonzero real vector by the sign of its Minkowski square."""
    v = np.asarray(v, dtype=float)
    if v.shape != (4,):
        raise DomainError(f"expected a 4-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DomainError("vector has non-finite components")
    norm2 = float(np.dot(v, v))
    if norm2 == 0.0:
        raise DomainError("the zero vector has no causal character")
    q = float(lorentz_dot(v, v))
    if abs(q) <= eps * max(1.0, norm2):
        tag = "lightlike"
    elif q < 0:
        tag = "timelike"
    else:
        return CausalCharacter("spacelike", None)
    return CausalCharacter(tag, bool(v[0] > 0))


def basis_orientation(b1, b2, b3, b4, eps=EPS_DET):
    """Return +1 or -1 according to the orientation of ``(b1, b2, b3, b4)``.

    The reference orientation is the canonical basis. The vectors may carry
    leading batch axes; the result then has the batch shape.

    Raises
    ------
    DegenerateBasisError
        If any determinant is small relative to the product of the vector
        norms.
    """
    m = np.stack([np.asarray(b, dtype=float) for b in (b1, b2, b3, b4)], axis=-1)
    det = np.linalg.det(m)
    scale = np.prod(np.linalg.norm(m, axis=-2), axis=-1)
    if np.any(np.abs(det) <= eps * np.maximum(scale, 1e-300)):
        raise DegenerateBasisError("vectors are (nearly) linearly dependent")
    return np.sign(det).astype(int) if np.ndim(det) else int(np.sign(det))
