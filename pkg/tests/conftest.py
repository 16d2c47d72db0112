import math

import numpy as np
import pytest
from hypothesis import settings

from timelike import gallery
from timelike.grid import Grid
from timelike.holomin import HarmonicThetaData

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

TAU = 5e-4
SQ2 = math.sqrt(2.0)


@pytest.fixture(scope="session")
def grid201():
    return Grid.square()


@pytest.fixture(scope="session")
def ex64():
    return gallery.build(gallery.Example64())


@pytest.fixture(scope="session")
def clifford():
    return gallery.build(gallery.CliffordType())


@pytest.fixture(scope="session")
def tilted():
    return gallery.build(gallery.TiltedSphere())


def tangent_family(K=0.5 * np.exp(1j * np.pi / 4), phi=1.0 + 0.3j, c=1.0, w0=0j):
    """Exact c != 0 solution of the holomorphic system with s = K w + phi.

    x' = 1/(c sin^2(s/2)), y' = 1/(c cos^2(s/2)), x - y = -4/(c K sin s),
    θ = arg tan(s/2) + π/4 (the π/4 and arg K = π/4 make the argument
    conditions hold).
    """
    def s(w):
        return K * np.asarray(w) + phi

    def theta(w):
        return np.angle(np.tan(s(w) / 2)) + np.pi / 4

    def theta_w(w):
        return -0.5j * K / np.sin(s(w))

    s0 = s(w0)
    k = np.exp(-theta(w0)) / np.tan(s0 / 2) ** 2
    y0 = 4 / (c * K * np.sin(s0))
    return HarmonicThetaData(theta, theta_w, c, k, w0, 0j, y0)


#: (number, verdict, summary) lines collected by the acceptance suite
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, text in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {text}")
