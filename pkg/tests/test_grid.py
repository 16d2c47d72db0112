import numpy as np
import pytest

from timelike.errors import DomainError
from timelike.grid import Grid, ScalarField, VectorField, read_fields_csv, write_fields_csv


def test_grid_geometry():
    g = Grid(0, 1, -1, 1, 11, 21)
    assert g.shape == (11, 21)
    assert g.h_u == pytest.approx(0.1)
    assert g.h_v == pytest.approx(0.1)
    U, V = g.mesh()
    assert U[3, 0] == pytest.approx(0.3) and V[0, 5] == pytest.approx(-0.5)
    assert g.w[10, 20] == 1 + 1j
    assert g.node_index(0.5 + 0j) == (5, 10)
    assert g.corner("upper_right") == (10, 20)


@pytest.mark.parametrize("args", [(0, 1, 0, 1, 2, 5), (1, 0, 0, 1, 5, 5), (0, 1, 0, 0, 5, 5)])
def test_grid_invariants(args):
    with pytest.raises(DomainError):
        Grid(*args)


def test_node_index_rejects_off_node_points():
    with pytest.raises(DomainError):
        Grid.square(n=11).node_index(0.05 + 0j)


def test_interior_band():
    m = Grid.square(n=7).interior(2)
    assert m.sum() == 9 and m[3, 3] and not m[1, 3]


def test_scalar_field_mask_excludes_non_finite():
    g = Grid.square(n=5)
    vals = np.ones(g.shape, dtype=complex)
    vals[2, 2] = np.nan
    F = ScalarField(g, vals)
    assert not F.mask[2, 2] and F.mask.sum() == 24
    with pytest.raises(ValueError):
        F.values[0, 0] = 3


def test_vector_field_shape_check():
    g = Grid.square(n=5)
    with pytest.raises(DomainError):
        VectorField(g, np.zeros((5, 5, 3)))


def test_csv_round_trip_is_exact(tmp_path):
    g = Grid(-1, 1, 0, 2, 5, 7)
    rng = np.random.default_rng(0)
    z = rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape)
    r = rng.normal(size=g.shape)
    vec = rng.normal(size=g.shape + (4,))
    mask = np.ones(g.shape, dtype=bool)
    mask[0, 0] = False
    path = tmp_path / "f.csv"
    write_fields_csv(path, g, {"z": z, "r": r, "vec": vec}, mask=mask)
    header = path.read_text().splitlines()[0].split(",")
    assert header == ["u", "v", "z_re", "z_im", "r", "vec_1", "vec_2", "vec_3", "vec_4", "mask"]
    g2, cols = read_fields_csv(path, ["z", "r"])
    assert g2.shape == g.shape
    np.testing.assert_array_equal(cols["z"].values, z)
    np.testing.assert_array_equal(cols["r"].values.real, r)
    assert not cols["z"].mask[0, 0]


def test_csv_missing_column(tmp_path):
    g = Grid.square(n=5)
    path = tmp_path / "f.csv"
    write_fields_csv(path, g, {"a": np.zeros(g.shape)})
    with pytest.raises(DomainError):
        read_fields_csv(path, ["b"])
