import math

import numpy as np
import pytest

from timelike import gallery
from timelike.errors import InconsistentGeneratorsError
from timelike.grid import Grid, ScalarField
from timelike.lorentz import lorentz_dot
from timelike.surface import (ALL_CHECKS, STABLE_KEYS, SurfaceGenerators, alpha_beta, assemble_frame,
                              fundamental_report, is_minimal, spherical_residual, stereo_generators,
                              verify)

TAU = 5e-4


def test_ex64_point_values(ex64):
    g = ex64.frame.grid
    i, j = g.node_index(0j)
    s = math.sqrt(2) / 2
    np.testing.assert_allclose(ex64.frame.f[i, j], [0, 0, s, -s], atol=1e-15)
    np.testing.assert_allclose(ex64.frame.nu[i, j], [0, 0, -s, -s], atol=1e-15)


def test_ex64_assembled_matches_closed_form(ex64):
    fr = assemble_frame(ex64.generators)
    assert fr.derivative_method == "analytic"
    for name in ("f", "nu", "f_u", "f_v", "nu_u", "nu_v", "f_uu", "f_uv", "f_vv"):
        np.testing.assert_allclose(getattr(fr, name), getattr(ex64.frame, name), atol=1e-13)


def test_ex64_alpha_beta(ex64):
    g = ex64.frame.grid
    u, v = g.mesh()
    expected = -math.sqrt(2) / 4 * np.exp(v - u)
    alpha, beta, _ = alpha_beta(ex64.generators)
    np.testing.assert_allclose(alpha, expected, atol=1e-13)
    np.testing.assert_allclose(beta, -expected, atol=1e-13)
    np.testing.assert_allclose(ex64.frame.alpha, expected, atol=1e-13)
    np.testing.assert_allclose(ex64.frame.F, -2 * alpha * beta * np.abs(
        ex64.generators.x.values - ex64.generators.y.values) ** 2, atol=1e-12)


def test_ex64_fundamental_forms(ex64):
    rep = fundamental_report(ex64.frame, ex64.generators)
    for name, val in (("a", 1), ("b", 0), ("c", 1), ("F", 1), ("Phi", 0), ("F_hat", 1)):
        np.testing.assert_allclose(getattr(rep, name)[rep.mask], val, atol=1e-12, err_msg=name)
    # K_f differentiates F numerically, so only round-off survives
    np.testing.assert_allclose(rep.K_f[rep.curvature_mask], 0, atol=1e-9)
    np.testing.assert_allclose(rep.K_nu_gauss[rep.mask], 0, atol=1e-12)
    fr = ex64.frame
    np.testing.assert_allclose(fr.f_uu, fr.nu, atol=1e-13)
    np.testing.assert_allclose(fr.f_uv, -fr.f, atol=1e-13)


def test_fd_path_agrees_with_analytic(ex64):
    gen = ex64.generators.without_derivatives()
    fr = assemble_frame(gen)
    assert fr.derivative_method == "fd"
    m = fr.mask
    assert np.abs(fr.f_u - ex64.frame.f_u)[m].max() < 1e-3
    report = verify(gen)
    assert report.passed, {k: e.relative_max for k, e in report.items()}


@pytest.mark.parametrize("spec", [
    gallery.TotallyGeodesic(), gallery.Example64(), gallery.ExpFamily(k=1 + 1j),
    gallery.ParamFamily(), gallery.ParamFamily(c=0.3 - 0.2j, k=2j, r=0.5),
    gallery.TiltedSphere(), gallery.CliffordType(),
])
def test_stable_checks_pass(spec):
    built = gallery.build(spec)
    report = verify(built.generators, STABLE_KEYS, frame=built.frame)
    failed = {k: e.relative_max for k, e in report.items() if not e.passed}
    assert not failed
    assert set(report) == set(STABLE_KEYS)


def test_verify_rejects_unknown_check(ex64):
    with pytest.raises(KeyError):
        verify(ex64.generators, ["nope"])


def test_stereo_generators_recover_data(ex64):
    x, y, mu = stereo_generators(ex64.frame)
    gen = ex64.generators
    np.testing.assert_allclose(x, gen.x.values, rtol=1e-12)
    np.testing.assert_allclose(y, gen.y.values, rtol=1e-12)
    np.testing.assert_allclose(mu, gen.mu.values, rtol=1e-12)


def test_frame_is_orthonormal(tilted):
    fr = tilted.frame
    np.testing.assert_allclose(lorentz_dot(fr.f, fr.f), 1, atol=1e-12)
    np.testing.assert_allclose(lorentz_dot(fr.nu, fr.nu), 1, atol=1e-12)
    np.testing.assert_allclose(lorentz_dot(fr.f, fr.nu), 0, atol=1e-12)
    np.testing.assert_allclose(fr.E, 0, atol=1e-10)
    np.testing.assert_allclose(fr.G, 0, atol=1e-10)


def test_inconsistent_normalization_raises(ex64):
    gen = ex64.generators
    slightly = SurfaceGenerators(gen.x, gen.y, gen.mu.with_values(gen.mu.values * 1.01))
    assert not verify(slightly, ["spherical"]).passed
    bad = SurfaceGenerators(gen.x, gen.y, gen.mu.with_values(gen.mu.values * 1.5))
    with pytest.raises(InconsistentGeneratorsError):
        assemble_frame(bad)
    report = verify(bad)
    assert not report.passed
    assert not report["spherical"].passed
    assert "error" in report["frame"].notes


def test_non_holomorphic_mu_fails_spherical(ex64):
    gen = ex64.generators
    u, v = gen.grid.mesh()
    bad = SurfaceGenerators(gen.x, gen.y, gen.mu.with_values(gen.mu.values * np.exp(1j * u * v)))
    assert spherical_residual(gen).passed
    assert not spherical_residual(bad).passed


def test_minimal_pde_counterexample():
    g = Grid.square(n=101)
    x = ScalarField.from_function(g, lambda w: w ** 2)
    y = ScalarField.from_function(g, lambda w: w)
    with np.errstate(divide="ignore"):
        mu = ScalarField(g, 1 / np.abs(x.values - y.values))
    report = verify(SurfaceGenerators(x, y, mu), ["minimal_pde"])
    assert report["minimal_pde"].relative_max > 100 * TAU


def test_tilted_sphere_is_not_minimal(tilted):
    rep = fundamental_report(tilted.frame, tilted.generators)
    assert not is_minimal(rep)
    report = verify(tilted.generators, ALL_CHECKS, frame=tilted.frame)
    assert not report["duality"].applicable
    assert report["duality"].passed
    assert not report["minimality"].passed
    assert report["curvature"].passed


def test_nonminimal_codazzi_uses_b(tilted):
    report = verify(tilted.generators, ["codazzi"], frame=tilted.frame)
    assert report["codazzi"].notes["minimal"] is False
    assert set(report["codazzi"].components) == {"u", "v"}


def test_report_json_is_sorted(ex64):
    import json
    text = verify(ex64.generators).to_json(family="example64")
    doc = json.loads(text)
    assert list(doc) == sorted(doc)
    assert doc["family"] == "example64"
