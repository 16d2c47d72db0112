import math

import numpy as np
import pytest
from scipy.integrate import quad

from timelike import gallery
from timelike.errors import ConfigError, DomainError, MarginError
from timelike.grid import Grid
from timelike.surface import fundamental_report

TAU = 5e-4


@pytest.mark.parametrize("spec", [
    gallery.TotallyGeodesic(), gallery.Example64(), gallery.ExpFamily(a=1j, b=0.5, k=1 + 1j),
    gallery.ParamFamily(c=1, k=2j, r=0.5), gallery.CliffordType(0.2, 0.5), gallery.TiltedSphere(0.3),
])
def test_family_dict_round_trip(spec):
    doc = gallery.family_to_dict(spec)
    assert gallery.family_from_dict(doc) == spec


def test_family_from_dict_complex_formats():
    spec = gallery.family_from_dict({"family": "param_family", "c": [1, 2], "k": "0.5-1j"})
    assert spec.c == 1 + 2j and spec.k == 0.5 - 1j


@pytest.mark.parametrize("doc", [{"family": "torus"}, {"family": "exp_family", "zeta": 1}, {}])
def test_family_from_dict_errors(doc):
    with pytest.raises(ConfigError):
        gallery.family_from_dict(doc)


@pytest.mark.parametrize("make", [
    lambda: gallery.ExpFamily(k=0), lambda: gallery.ParamFamily(r=0),
    lambda: gallery.TiltedSphere(theta=0), lambda: gallery.CliffordType(0.6, 0.1),
])
def test_invalid_parameters(make):
    with pytest.raises(DomainError):
        make()


def test_clifford_range_margin():
    with pytest.raises(MarginError):
        gallery.CliffordType(0.1, 0.77)


def test_totally_geodesic_margin_error_lists_nodes():
    with pytest.raises(MarginError) as info:
        gallery.build(gallery.TotallyGeodesic(), Grid.square(n=11))
    assert len(info.value.nodes) > 0


def test_tilted_margin_error():
    with pytest.raises(MarginError):
        gallery.build(gallery.TiltedSphere(), Grid.square(n=11))


@pytest.mark.parametrize("s", [0.1, 0.3, 0.55, 0.7])
def test_clifford_p_matches_adaptive_quadrature(s):
    ref, _ = quad(lambda t: 1 / math.sqrt(math.cos(2 * t)), 0, s, epsabs=1e-14)
    assert abs(gallery.clifford_p(s) - ref) < 1e-12
    assert abs(gallery.clifford_angle(gallery.clifford_p(s)) - s) < 1e-12


def test_clifford_curvature_value():
    assert gallery.clifford_curvature(0.0) == pytest.approx(2.0)
    assert gallery.clifford_curvature(0.5) == pytest.approx(1 + 1 / math.cos(1.0) ** 2)


def test_clifford_forms(clifford):
    rep = fundamental_report(clifford.frame, clifford.generators)
    m = rep.mask
    np.testing.assert_allclose(rep.a[m], 0.5, atol=1e-10)
    np.testing.assert_allclose(rep.c[m], -0.5, atol=1e-10)
    np.testing.assert_allclose(rep.b[m], 0.0, atol=1e-10)
    np.testing.assert_allclose(rep.F[m], np.cos(2 * clifford.angle[m]) / 2, atol=1e-10)
    mk = rep.curvature_mask
    expected = 1 + 1 / np.cos(2 * clifford.angle) ** 2
    assert np.abs(rep.K_f - expected)[mk].max() <= 10 * TAU
    assert np.abs(rep.K_f_gauss - expected)[m].max() <= 1e-9


def test_clifford_metric_check():
    e = gallery.clifford_metric_check(gallery.CliffordType())
    assert e.passed, e.to_dict()


@pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 4, math.pi / 3])
def test_tilted_sphere_closed_forms(theta):
    spec = gallery.TiltedSphere(theta)
    built = gallery.build(spec)
    rep = fundamental_report(built.frame, built.generators)
    u, v = built.frame.grid.mesh()
    m = rep.mask
    np.testing.assert_allclose(rep.a[m], 0, atol=1e-12)
    np.testing.assert_allclose(rep.c[m], 0, atol=1e-12)
    np.testing.assert_allclose(rep.b[m], (math.sin(2 * theta) / (u - v) ** 2)[m], rtol=1e-12)
    np.testing.assert_allclose(rep.F[m], (2 * math.cos(theta) ** 2 / (u - v) ** 2)[m], rtol=1e-12)
    assert np.abs(rep.K_f - 1 / math.cos(theta) ** 2)[rep.curvature_mask].max() <= 10 * TAU
    assert np.abs(rep.K_nu - 1 / math.sin(theta) ** 2)[rep.nu_curvature_mask].max() <= 10 * TAU
    dev, TT = gallery.tilted_constancy(spec, built.frame)
    assert dev <= 1e-12
    assert TT == pytest.approx(1 / math.cos(theta) ** 2)


def test_exp_family_default_phase():
    assert gallery.ExpFamily(k=1 + 1j).phase == pytest.approx(math.pi / 4)
    assert gallery.ExpFamily(k=1, theta=0.2).phase == 0.2


@pytest.mark.parametrize("spec", [gallery.Example64(), gallery.ExpFamily(), gallery.ParamFamily(r=2)])
def test_generator_normalization(spec):
    gen = gallery.build(spec, Grid.square(n=21)).generators
    np.testing.assert_allclose(gen.normalization_defect(), 0, atol=1e-13)


def test_default_grids():
    assert gallery.default_grid(gallery.Example64()) == Grid.square()
    g = gallery.default_grid(gallery.TotallyGeodesic())
    u, v = g.mesh()
    assert (u - v).min() >= 0.05 - 1e-12
    assert gallery.default_grid(gallery.Example64(), n=11).shape == (11, 11)
