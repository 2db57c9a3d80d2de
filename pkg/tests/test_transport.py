import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gamma

from lllgrowth.fock import SobolevScale
from lllgrowth.transport import (
    GridOverflow,
    gaussian_profile,
    homogeneous_seminorm,
    transport_growth_check,
    transport_norm,
)

PROFILE = gaussian_profile(1.0, half_width=40.0)


def test_norm_parts_at_time_zero():
    scale = SobolevScale(0.5, 1.0)  # rho s = 1
    w, h = transport_norm(PROFILE, 0.0, scale, parts=True)
    assert w == pytest.approx(np.sqrt(1.5), abs=1e-10)
    assert h == pytest.approx(1 / np.sqrt(2), abs=1e-10)


def test_weighted_part_against_1d_quadrature():
    scale = SobolevScale(0.5, 1.0)
    t = 2.0
    u2 = lambda x: np.exp(-(x - t) ** 2) / np.sqrt(np.pi)
    ref = np.sqrt(quad(lambda x: (1 + x ** 2) * u2(x), -np.inf, np.inf)[0])
    w, _ = transport_norm(PROFILE, t, scale, parts=True)
    assert w == pytest.approx(ref, rel=1e-10)
    assert ref == pytest.approx(np.sqrt(1.5 + t ** 2), rel=1e-12)


def test_zero_order_norm_is_two():
    scale = SobolevScale(0.3, 0.0)
    for t in (0.0, 5.0, 20.0):
        assert transport_norm(PROFILE, t, scale) == pytest.approx(2.0, abs=1e-10)


def test_homogeneous_part_is_translation_invariant():
    scale = SobolevScale(0.25, 1.5)
    hs = [transport_norm(PROFILE, t, scale, parts=True)[1] for t in (0.0, 3.0, 25.0)]
    assert np.ptp(hs) <= 1e-10
    # fractional order against the Fourier-side integral of |xi|^{2a} e^{-xi^2} / sqrt(pi) = Gamma(a + 1/2) / sqrt(pi)
    a = 0.7
    ref = np.sqrt(quad(lambda k: abs(k) ** (2 * a) * np.exp(-k ** 2), -np.inf, np.inf)[0] / np.sqrt(np.pi))
    assert ref == pytest.approx(np.sqrt(gamma(a + 0.5) / np.sqrt(np.pi)), rel=1e-10)
    # |xi|^{2a} is not smooth at 0, so the discrete sum converges with the frequency spacing 2 pi / L
    errors = [abs(homogeneous_seminorm(gaussian_profile(1.0, half_width=L), a) / ref - 1) for L in (40.0, 400.0)]
    assert errors[1] < 1e-6
    assert errors[1] < errors[0] / 100


def test_grid_overflow():
    with pytest.raises(GridOverflow):
        transport_norm(PROFILE, 39.0, SobolevScale(0.5))


def test_profile_must_fit():
    with pytest.raises(ValueError):
        gaussian_profile(half_width=3.0)


@pytest.mark.parametrize("tau,s", [(0.0, 2.0), (0.5, 1.0)])
def test_slope_on_short_window(tau, s):
    times = np.geomspace(10, 100, 30)
    p = gaussian_profile(1.0, half_width=130.0)
    check = transport_growth_check(p, SobolevScale(tau, s), times)
    assert check.slope == pytest.approx(1.0, rel=0.02)
    assert check.c_lower > 0


def test_slope_zero_for_zero_order():
    times = np.geomspace(10, 100, 30)
    p = gaussian_profile(1.0, half_width=130.0)
    check = transport_growth_check(p, SobolevScale(0.5, 0.0), times)
    assert abs(check.slope) < 1e-10
    assert check.bounds_pass
