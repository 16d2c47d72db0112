import numpy as np
import pytest

from timelike.errors import DomainError
from timelike.grid import Grid, ScalarField
from timelike.oneform import OneForm, integrate_one_form, log_derivative_residual, one_form_closedness


@pytest.fixture(scope="module")
def ex64_form(ex64):
    fr, gen = ex64.frame, ex64.generators
    g = fr.grid
    form = OneForm(ScalarField(g, fr.alpha), ScalarField(g, fr.beta), gen.x, gen.y)
    return form, fr


def test_ex64_form_is_closed(ex64_form):
    form, _ = ex64_form
    assert one_form_closedness(form).relative_max < 5e-4
    assert log_derivative_residual(form).max_relative < 5e-4


def test_primitive_recovers_surface(ex64_form):
    form, fr = ex64_form
    res = integrate_one_form(form, fr.f[0, 0])
    assert res.path_independence.relative_max < 5e-4
    assert np.abs(res.V.values - fr.f).max() < 1e-4


def test_base_corner(ex64_form):
    form, fr = ex64_form
    res = integrate_one_form(form, fr.f[-1, -1], base="upper_right")
    np.testing.assert_allclose(res.V.values[-1, -1], fr.f[-1, -1])
    assert np.abs(res.V.values - fr.f).max() < 1e-4


def test_non_closed_form_detected(ex64_form):
    form, fr = ex64_form
    g = form.grid
    U, _ = g.mesh()
    bad = OneForm(form.alpha.with_values(form.alpha.values * (1 + U ** 2)), form.beta, form.x, form.y)
    assert one_form_closedness(bad).relative_max > 1e-2
    assert integrate_one_form(bad, fr.f[0, 0]).path_independence.relative_max > 1e-3


def test_mismatched_grids():
    a = ScalarField(Grid.square(n=5), np.ones((5, 5)))
    b = ScalarField(Grid.square(n=6), np.ones((6, 6)))
    with pytest.raises(DomainError):
        OneForm(a, b, a, a)


def test_integration_needs_valid_grid():
    g = Grid.square(n=5)
    z = ScalarField(g, np.zeros(g.shape, dtype=complex))
    # x == y everywhere: every node is masked
    with pytest.raises(DomainError):
        integrate_one_form(OneForm(z.real, z.real, z, z), np.zeros(4))
