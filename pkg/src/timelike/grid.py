"""Rectangular parameter grids and the complex / vector fields sampled on them.

Arrays are indexed ``[i, j]`` with ``i`` along u and ``j`` along v.
"""

import csv
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError

FLOAT_FMT = "{:.17g}"


@dataclass(frozen=True)
class Grid:
    u_min: float
    u_max: float
    v_min: float
    v_max: float
    nu: int
    nv: int

    def __post_init__(self):
        if self.nu < 3 or self.nv < 3:
            raise DomainError("grids need at least 3 nodes per direction")
        if not (self.u_max > self.u_min and self.v_max > self.v_min):
            raise DomainError("grid extents must be increasing")

    @classmethod
    def square(cls, lo=-1.0, hi=1.0, n=201):
        return cls(lo, hi, lo, hi, n, n)

    @property
    def shape(self):
        return (self.nu, self.nv)

    @property
    def h_u(self):
        return (self.u_max - self.u_min) / (self.nu - 1)

    @property
    def h_v(self):
        return (self.v_max - self.v_min) / (self.nv - 1)

    @property
    def h(self):
        return max(self.h_u, self.h_v)

    @property
    def u(self):
        return np.linspace(self.u_min, self.u_max, self.nu)

    @property
    def v(self):
        return np.linspace(self.v_min, self.v_max, self.nv)

    def mesh(self):
        """Return ``(U, V)`` arrays of shape ``(nu, nv)``."""
        return np.meshgrid(self.u, self.v, indexing="ij")

    @property
    def w(self):
        U, V = self.mesh()
        return U + 1j * V

    def contains(self, w, slack=1e-12):
        w = np.asarray(w, dtype=complex)
        su = slack * (1 + abs(self.u_max - self.u_min))
        sv = slack * (1 + abs(self.v_max - self.v_min))
        return ((w.real >= self.u_min - su) & (w.real <= self.u_max + su)
                & (w.imag >= self.v_min - sv) & (w.imag <= self.v_max + sv))

    def node_index(self, w, rtol=1e-9):
        """Indices of the node at ``w``; raises if ``w`` is not a node."""
        i = (w.real - self.u_min) / self.h_u
        j = (w.imag - self.v_min) / self.h_v
        ii, jj = int(round(i)), int(round(j))
        if abs(i - ii) > rtol * max(1, self.nu) or abs(j - jj) > rtol * max(1, self.nv) \
                or not (0 <= ii < self.nu and 0 <= jj < self.nv):
            raise DomainError(f"{w} is not a grid node")
        return ii, jj

    def corner(self, name="lower_left"):
        corners = {
            "lower_left": (0, 0),
            "lower_right": (self.nu - 1, 0),
            "upper_left": (0, self.nv - 1),
            "upper_right": (self.nu - 1, self.nv - 1),
        }
        try:
            return corners[name]
        except KeyError:
            raise DomainError(f"unknown corner {name!r}") from None

    def interior(self, width=1):
        """Mask that drops a boundary band ``width`` nodes wide."""
        m = np.zeros(self.shape, dtype=bool)
        m[width:self.nu - width, width:self.nv - width] = True
        return m

    def to_dict(self):
        return {"u_min": self.u_min, "u_max": self.u_max, "v_min": self.v_min,
                "v_max": self.v_max, "nu": self.nu, "nv": self.nv}


def _freeze(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ScalarField:
    """Complex (or real) values on every grid node plus a validity mask."""

    grid: Grid
    values: np.ndarray
    mask: Optional[np.ndarray] = None

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != self.grid.shape:
            raise DomainError(f"values shape {vals.shape} does not match grid {self.grid.shape}")
        mask = np.ones(self.grid.shape, dtype=bool) if self.mask is None else np.asarray(self.mask, dtype=bool)
        mask = mask & np.isfinite(vals)
        object.__setattr__(self, "values", _freeze(vals))
        object.__setattr__(self, "mask", _freeze(mask))

    @classmethod
    def from_function(cls, grid, func, mask=None):
        with np.errstate(all="ignore"):
            values = np.asarray(func(grid.w), dtype=complex) * np.ones(grid.shape)
        return cls(grid, values, mask)

    def with_values(self, values, mask=None):
        m = self.mask if mask is None else self.mask & mask
        return ScalarField(self.grid, values, m)

    def with_mask(self, mask):
        return ScalarField(self.grid, self.values, self.mask & mask)

    def conj(self):
        return ScalarField(self.grid, np.conj(self.values), self.mask)

    @property
    def real(self):
        return ScalarField(self.grid, np.real(self.values), self.mask)

    @property
    def imag(self):
        return ScalarField(self.grid, np.imag(self.values), self.mask)

    def filled(self, fill=0.0):
        """Values with masked-out nodes replaced by ``fill``."""
        return np.where(self.mask, self.values, fill)


@dataclass(frozen=True)
class VectorField:
    """A Vec4 per grid node; ``values`` has shape ``(nu, nv, 4)``."""

    grid: Grid
    values: np.ndarray
    mask: Optional[np.ndarray] = None

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != self.grid.shape + (4,):
            raise DomainError(f"values shape {vals.shape} does not match grid {self.grid.shape}")
        mask = np.ones(self.grid.shape, dtype=bool) if self.mask is None else np.asarray(self.mask, dtype=bool)
        mask = mask & np.all(np.isfinite(vals), axis=-1)
        object.__setattr__(self, "values", _freeze(vals))
        object.__setattr__(self, "mask", _freeze(mask))

    def with_mask(self, mask):
        return VectorField(self.grid, self.values, self.mask & mask)

    def filled(self, fill=0.0):
        return np.where(self.mask[..., None], self.values, fill)


# ---- CSV interchange ----

def _fmt(x):
    return FLOAT_FMT.format(float(x))


def write_fields_csv(path, grid: Grid, columns: dict, mask=None):
    """Write one row per node: ``u, v`` then the named columns.

    Complex columns are split into ``<name>_re`` and ``<name>_im``; vector
    columns (trailing axis 4) into ``<name>_1 .. <name>_4``. A ``mask``
    column (0/1) is appended when ``mask`` is given. Rows are ordered with u
    varying slowest, matching the array layout.
    """
    header = ["u", "v"]
    flat = []
    for name, arr in columns.items():
        arr = np.asarray(arr)
        if arr.shape == grid.shape + (4,):
            for k in range(4):
                header.append(f"{name}_{k + 1}")
                flat.append(np.real(arr[..., k]).ravel())
        elif np.iscomplexobj(arr):
            header += [f"{name}_re", f"{name}_im"]
            flat += [arr.real.ravel(), arr.imag.ravel()]
        else:
            header.append(name)
            flat.append(np.asarray(arr, dtype=float).ravel())
    U, V = grid.mesh()
    rows = [U.ravel(), V.ravel()] + flat
    if mask is not None:
        header.append("mask")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        mflat = None if mask is None else np.asarray(mask).ravel()
        for r in range(U.size):
            row = [_fmt(col[r]) for col in rows]
            if mflat is not None:
                row.append("1" if mflat[r] else "0")
            writer.writerow(row)


def read_fields_csv(path, names: Sequence[str]):
    """Read complex scalar columns written by :func:`write_fields_csv`.

    Returns ``(grid, {name: ScalarField})``. The grid is reconstructed from
    the distinct u and v values, which must form a uniform lattice.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(x) for x in row] for row in reader])
    col = {h: k for k, h in enumerate(header)}
    us = np.unique(data[:, col["u"]])
    vs = np.unique(data[:, col["v"]])
    grid = Grid(us[0], us[-1], vs[0], vs[-1], len(us), len(vs))
    if len(data) != grid.nu * grid.nv:
        raise DomainError(f"{path}: expected {grid.nu * grid.nv} rows, found {len(data)}")
    order = np.lexsort((data[:, col["v"]], data[:, col["u"]]))
    data = data[order]
    mask = None
    if "mask" in col:
        mask = data[:, col["mask"]].reshape(grid.shape) > 0.5
    out = {}
    for name in names:
        if f"{name}_re" in col:
            vals = data[:, col[f"{name}_re"]] + 1j * data[:, col[f"{name}_im"]]
        elif name in col:
            vals = data[:, col[name]]
        else:
            raise DomainError(f"{path}: missing column {name!r}")
        out[name] = ScalarField(grid, vals.reshape(grid.shape), mask)
    return grid, out
