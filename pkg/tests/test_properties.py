"""Property-based checks of the invariants that hold for whole families of inputs."""

import cmath
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import tangent_family
from timelike import gallery
from timelike.grid import Grid, ScalarField
from timelike.holomin import generate_from_theta, mobius, mobius_fit, mobius_reconstruct, ode_residual, theta_from_mu
from timelike.lightcone import ray_coordinate
from timelike.lorentz import lorentz_dot
from timelike.oneform import OneForm, integrate_one_form
from timelike.surface import assemble_frame, isotropic_residual, spherical_residual
from timelike.wirtinger import d_dw, d_dwbar, quasi_holo_sigma

SMALL = Grid.square(-0.5, 0.5, 41)
coef = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)
nonzero = st.complex_numbers(min_magnitude=0.3, max_magnitude=2)
rate = st.floats(0.3, 1.5) | st.floats(-1.5, -0.3)


@given(st.lists(coef, min_size=1, max_size=4), st.lists(coef, min_size=1, max_size=4))
def test_dwbar_is_conjugate_of_dw(p, q):
    g = Grid.square(n=21)
    w = g.w
    F = ScalarField(g, np.polyval(p, w) + np.polyval(q, np.conj(w)) * np.abs(w))
    lhs = d_dwbar(F).values
    rhs = np.conj(d_dw(F.conj()).values)
    assert np.abs(lhs - rhs).max() <= 1e-12 * (1 + np.abs(lhs).max())


@given(nonzero, coef)
def test_sigma_of_antiholomorphic_is_minus_one(a, b):
    F = ScalarField.from_function(Grid.square(n=41), lambda w: np.exp(a * np.conj(w)) + b)
    res = quasi_holo_sigma(F)
    m = res.sigma.mask
    assert np.abs(res.sigma.values[m] + 1).max() < 1e-2


@settings(max_examples=20)
@given(c=coef, k=nonzero, r=rate)
def test_param_family_is_isotropic_with_constant_phase(c, k, r):
    gen = gallery.build(gallery.ParamFamily(c, k, r), SMALL).generators
    assert spherical_residual(gen).passed
    fr = assemble_frame(gen)
    assert isotropic_residual(gen, frame=fr).passed
    theta, _ = theta_from_mu(gen.mu, gen.x, gen.y)
    assert np.abs(theta.values - math.pi / 4).max() <= 1e-8
    # unit frame, F = -2 alpha beta |x - y|^2, rays reproduce the generators
    assert np.abs(lorentz_dot(fr.f, fr.f) - 1).max() <= 1e-10
    assert np.abs(lorentz_dot(fr.nu, fr.nu) - 1).max() <= 1e-10
    assert np.abs(lorentz_dot(fr.f, fr.nu)).max() <= 1e-10
    d2 = np.abs(gen.x.values - gen.y.values) ** 2
    assert np.allclose(fr.F, -2 * fr.alpha * fr.beta * d2, rtol=1e-10, atol=1e-12)
    x, y = gen.x.values, gen.y.values
    assert np.allclose(ray_coordinate(fr.f_u), x, rtol=1e-9, atol=1e-9)
    assert np.allclose(ray_coordinate(fr.f_v), y, rtol=1e-9, atol=1e-9)


@settings(max_examples=20)
@given(a=coef, b=coef, modulus=st.floats(0.3, 1.5), quadrant=st.sampled_from([1, 3, 5, 7]))
def test_exp_family_with_admissible_rate(a, b, modulus, quadrant):
    k = modulus * cmath.exp(1j * quadrant * math.pi / 4)
    gen = gallery.build(gallery.ExpFamily(a, b, k), SMALL).generators
    assert spherical_residual(gen).passed
    assert isotropic_residual(gen).passed


def test_param_family_reduces_to_example64():
    a = gallery.build(gallery.ParamFamily(0, 1, 1), SMALL).generators
    b = gallery.build(gallery.Example64(), SMALL).generators
    for name in ("x", "y", "mu"):
        np.testing.assert_allclose(getattr(a, name).values, getattr(b, name).values, rtol=1e-14)


@settings(max_examples=15)
@given(st.floats(0.1, 1.45))
def test_tilted_sphere_constant_vector(theta):
    spec = gallery.TiltedSphere(theta)
    built = gallery.build(spec, gallery.default_grid(spec, n=21))
    dev, TT = gallery.tilted_constancy(spec, built.frame)
    assert dev <= 1e-10 * (1 + abs(spec.k))
    assert math.isclose(TT, 1 / math.cos(theta) ** 2, rel_tol=1e-12)
    assert spherical_residual(built.generators).relative_max < 1e-2


@given(st.complex_numbers(max_magnitude=5))
def test_ode_residual_translation_invariant(s):
    g = Grid.square(n=41)
    gen = gallery.build(gallery.Example64(), g).generators
    a = ode_residual(gen.x, gen.y)
    b = ode_residual(gen.x.with_values(gen.x.values + s), gen.y.with_values(gen.y.values + s))
    for key in ("x", "y"):
        assert math.isclose(a.components[key].max_abs, b.components[key].max_abs,
                            rel_tol=1e-6, abs_tol=1e-12)


@settings(max_examples=20)
@given(c=st.complex_numbers(min_magnitude=0.5, max_magnitude=3), a=st.floats(0.5, 1.5))
def test_mobius_fit_then_reconstruct(c, a):
    g = Grid(0.0, 0.5, -0.5, 0.5, 51, 101)
    xp = lambda w: a * np.exp(a * w)  # noqa: E731
    yp = lambda w: mobius(c, xp(w))  # noqa: E731
    if np.min(np.abs(c * xp(g.w) - 1)) < 0.2:
        return
    x = ScalarField.from_function(g, lambda w: np.exp(a * w))
    y_ref = ScalarField(g, np.zeros(g.shape, dtype=complex))
    fit = mobius_fit(x, y_ref, x_prime=xp, y_prime=yp)
    assert abs(fit.c - c) <= 1e-9 * abs(c)
    y = mobius_reconstruct(x, fit.c, x_prime=xp)
    y2 = mobius_reconstruct(x, fit.c, x_prime=xp, w0=g.w[25, 50], y0=1.0)
    shift = y2.values - y.values
    assert np.abs(shift - shift[0, 0]).max() <= 10 * g.h ** 2
    assert np.abs(d_dw(y).values - yp(g.w)).max() <= 5e-3 * np.abs(yp(g.w)).max()


def test_one_form_path_independence_is_second_order():
    # Example64 is integrated exactly by the trapezoid rule in both orders,
    # so the generic c != 0 surface is used here
    res = []
    for n in (41, 81, 161):
        gen = generate_from_theta(tangent_family(), Grid.square(-0.5, 0.5, n)).generators
        fr = assemble_frame(gen)
        form = OneForm(ScalarField(fr.grid, fr.alpha), ScalarField(fr.grid, fr.beta), gen.x, gen.y)
        res.append(integrate_one_form(form, fr.f[0, 0]).path_independence.max_abs)
    assert res[0] / res[1] > 3.5 and res[1] / res[2] > 3.5
