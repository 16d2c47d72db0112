"""Residual statistics and named condition reports.

Every verified identity is turned into a defect field. A
:class:`ResidualStats` summarises one such field over a mask, and a
:class:`ConditionEntry` groups the defect fields belonging to one named
condition together with its pass/fail verdict.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

#: default relative tolerance for finite-difference based checks
FD_TOL = 5e-4
#: tolerance for checks that involve only closed-form evaluation
CLOSED_FORM_TOL = 1e-10


@dataclass
class Tolerances:
    """Per-run tolerance settings; ``None`` means "derive from the grid step"."""

    fd: float = FD_TOL
    closed_form: float = CLOSED_FORM_TOL
    frame: Optional[float] = None
    quadrature: Optional[float] = None
    mobius: float = 1e-6
    holomorphy: float = 1e-2

    def frame_tol(self, h):
        return self.frame if self.frame is not None else 100.0 * h * h

    def quad_tol(self, h):
        return self.quadrature if self.quadrature is not None else h * h

    def override(self, **kwargs):
        for k, v in kwargs.items():
            if not hasattr(self, k):
                raise KeyError(k)
            setattr(self, k, float(v))
        return self


def _magnitude(a):
    a = np.asarray(a)
    if a.ndim and a.shape[-1] == 4 and a.ndim >= 3:
        return np.linalg.norm(a, axis=-1)
    return np.abs(a)


@dataclass
class ResidualStats:
    max_abs: float
    rms: float
    relative_max: float
    n_nodes: int
    n_excluded: int

    def to_dict(self):
        return {k: (v if isinstance(v, int) else _json_float(v)) for k, v in self.__dict__.items()}


def residual_stats(defect, mask=None, scale=None):
    """Summarise a defect field.

    ``relative_max`` divides the largest defect by ``max(1, max scale)``,
    where ``scale`` is the magnitude of the dominant terms of the identity
    (an array on the same nodes, or a number). Vector-valued defects (last
    axis 4) are measured with the Euclidean norm of the components.
    """
    mag = _magnitude(defect)
    if mask is None:
        mask = np.ones(mag.shape, dtype=bool)
    mask = np.asarray(mask, dtype=bool) & np.isfinite(mag)
    n = int(mask.sum())
    excluded = int(mask.size - n)
    if n == 0:
        return ResidualStats(math.nan, math.nan, math.nan, 0, excluded)
    vals = mag[mask]
    if scale is None:
        s = 1.0
    else:
        smag = _magnitude(scale)
        smag = smag[mask] if np.ndim(smag) else np.array([smag])
        smag = smag[np.isfinite(smag)]
        s = max(1.0, float(smag.max())) if smag.size else 1.0
    mx = float(vals.max())
    return ResidualStats(mx, float(np.sqrt(np.mean(vals ** 2))), mx / s, n, excluded)


@dataclass
class ConditionEntry:
    """One named condition: component defect stats, tolerance and verdict."""

    name: str
    tolerance: float
    components: Dict[str, ResidualStats] = field(default_factory=dict)
    applicable: bool = True
    notes: Dict[str, object] = field(default_factory=dict)

    def add(self, key, stats):
        self.components[key] = stats
        return stats

    @property
    def relative_max(self):
        vals = [c.relative_max for c in self.components.values()]
        if not vals or any(math.isnan(v) for v in vals):
            return math.nan
        return max(vals)

    @property
    def max_abs(self):
        vals = [c.max_abs for c in self.components.values()]
        return max(vals) if vals else math.nan

    @property
    def rms(self):
        vals = [c.rms for c in self.components.values()]
        return max(vals) if vals else math.nan

    @property
    def passed(self):
        if not self.applicable:
            return True
        r = self.relative_max
        return bool(not math.isnan(r) and r <= self.tolerance)

    def component_passed(self, key):
        r = self.components[key].relative_max
        return bool(not math.isnan(r) and r <= self.tolerance)

    def to_dict(self):
        return {
            "pass": self.passed,
            "applicable": self.applicable,
            "tolerance": _json_float(self.tolerance),
            "max_abs": _json_float(self.max_abs),
            "rms": _json_float(self.rms),
            "relative_max": _json_float(self.relative_max),
            "components": {k: v.to_dict() for k, v in sorted(self.components.items())},
            "notes": {k: _jsonable(v) for k, v in sorted(self.notes.items())},
        }


class ConditionReport(dict):
    """Mapping ``name -> ConditionEntry`` with JSON serialization."""

    def add(self, entry: ConditionEntry):
        self[entry.name] = entry
        return entry

    @property
    def passed(self):
        return all(e.passed for e in self.values())

    def to_dict(self):
        return {k: self[k].to_dict() for k in sorted(self)}

    def to_json(self, **extra):
        doc = dict(extra)
        doc["checks"] = self.to_dict()
        doc["pass"] = self.passed
        return json.dumps(_jsonable(doc), indent=2, sort_keys=True)


def _json_float(x):
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return None
    return float(f"{x:.17g}")


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return _json_float(v)
    if isinstance(v, complex):
        return [_json_float(v.real), _json_float(v.imag)]
    return v
