import numpy as np
import pytest

from lllgrowth.fock import evaluate
from lllgrowth.operators import hermiticity_defect, potential_matrix
from lllgrowth.potentials import (
    GeneratorFactory,
    PotentialSpec,
    derivative_sup_estimate,
    envelope,
    gaussian_decay_value,
    potential_center,
    potential_coeffs,
    potential_derivative,
    potential_value,
    traveling_wave_drift,
    traveling_wave_value,
)
from lllgrowth.quadrature import lp_norm, matrix_element_quad, state_sampler, wirtinger

ZS = np.array([0.0, 0.4 + 0.3j, -1.0 + 0.2j, 1.5j])


def test_traveling_wave_value_at_origin():
    tw = PotentialSpec.traveling_wave(1.0)
    assert traveling_wave_value(tw, 0.0, 0.0) == pytest.approx(1 / (4 * np.pi), rel=1e-15)


def test_potential_coeffs_at_zero():
    c = potential_coeffs(PotentialSpec.traveling_wave(2.0), 0.0, 5)
    assert np.allclose(c, np.sqrt(2.0) * np.array([0.5, -0.5j * np.sqrt(3), 0, 0, 0]))


@pytest.mark.parametrize("delta", [0.0, 0.7])
def test_value_equals_modulus_of_coeffs(delta):
    tw = PotentialSpec.traveling_wave(1.5, delta)
    for t in (0.0, 2.0, 13.0):
        c = potential_coeffs(tw, t, 60)
        assert np.allclose(traveling_wave_value(tw, t, ZS), np.abs(evaluate(c, ZS)) ** 2, atol=1e-14)


def test_modulus_kind_matches_traveling_wave():
    tw = PotentialSpec.traveling_wave(1.0, 0.3)
    mod = PotentialSpec.modulus(tw.v, drift=tw.drift, delta=0.3)
    assert mod.epsilon == pytest.approx(1.0)
    for t in (0.0, 4.0):
        assert np.allclose(potential_value(mod, t, ZS), potential_value(tw, t, ZS), atol=1e-15)
        assert np.allclose(GeneratorFactory(mod, 24)(t), GeneratorFactory(tw, 24)(t))


def test_gaussian_decay_values():
    g = PotentialSpec.gaussian_decay(1.0)
    assert gaussian_decay_value(g, 0.0, 0.0) == 1.0
    assert np.abs(gaussian_decay_value(g, np.pi, ZS)).max() < 1e-15
    assert envelope(0.0) == 1.0


def test_spec_validation():
    with pytest.raises(ValueError):
        PotentialSpec("bogus")
    with pytest.raises(ValueError):
        PotentialSpec.traveling_wave(0.0)
    with pytest.raises(ValueError):
        PotentialSpec("custom")
    with pytest.raises(ValueError):
        PotentialSpec.gaussian_decay(1.0, width=0.0)


def test_drift_constant():
    assert traveling_wave_drift(1.0) == pytest.approx(np.sqrt(3) / (32 * np.pi))


@pytest.mark.parametrize("spec", [
    PotentialSpec.traveling_wave(1.0, 0.4),
    PotentialSpec.gaussian_decay(1.0, width=1.3, center=0.5 - 0.2j),
    PotentialSpec.modulus([0.2, 0.1j, -0.3, 0.05], drift=0.1 + 0.05j),
])
def test_analytic_derivatives_match_finite_differences(spec):
    t = 1.7
    W = lambda z: potential_value(spec, t, z)
    for j, k in [(1, 0), (0, 1), (1, 1), (0, 2), (2, 1)]:
        fd = wirtinger(W, j, k)(ZS)
        an = potential_derivative(spec, t, j, k)(ZS)
        tol = 1e-7 if j + k <= 2 else 1e-4
        assert np.allclose(fd, an, atol=tol)


def test_custom_derivative_uses_finite_differences():
    spec = PotentialSpec.custom(lambda t, z: np.abs(z) ** 2 * (1 + t))
    d = potential_derivative(spec, 1.0, 1, 1)(ZS)
    assert np.allclose(d, 2.0, atol=1e-6)


def test_derivative_sup_estimate():
    const = PotentialSpec.custom(lambda t, z: np.full(np.shape(z), 3.0))
    assert derivative_sup_estimate(const, 0.0, 1, 0) < 1e-6
    assert derivative_sup_estimate(const, 0.0, 0, 1) < 1e-6
    tw = PotentialSpec.traveling_wave(1.0)
    sup = derivative_sup_estimate(tw, 0.0, 0, 0)
    assert sup <= 1.0
    # the sup of |V|^2 equals ||V||_inf^2
    assert sup == pytest.approx(lp_norm(state_sampler(np.array(tw.v)), np.inf) ** 2, rel=1e-6)
    # covariance: the traveling wave's sup does not depend on t
    assert derivative_sup_estimate(tw, 500.0, 0, 0) == pytest.approx(sup, rel=1e-8)
    with pytest.raises(ValueError):
        derivative_sup_estimate(tw, 0.0, 4, 0)


def test_potential_center_moves_with_the_wave():
    tw = PotentialSpec.traveling_wave(1.0, 0.2)
    t = 3.0
    c = potential_center(tw, t)
    # at the anchor the moving variable vanishes, so W there equals the profile at the origin
    assert traveling_wave_value(tw, t, c) == pytest.approx(traveling_wave_value(tw, 0.0, 0.0))


@pytest.mark.parametrize("spec", [
    PotentialSpec.traveling_wave(1.0, 0.5),
    PotentialSpec.gaussian_decay(1.0),
    PotentialSpec.gaussian_decay(1.0, width=0.8, center=1.0 + 0.5j),
])
def test_generator_matches_quadrature(spec):
    N, t = 40, 2.5
    A = GeneratorFactory(spec, N)(t)
    assert hermiticity_defect(A) < 1e-12
    W = lambda s, z: potential_value(spec, s, z)
    for m, n in [(0, 0), (0, 1), (2, 5), (6, 6)]:
        assert A[m, n] == pytest.approx(matrix_element_quad(W, t, m, n), abs=1e-10)


def test_custom_generator_via_quadrature():
    v = np.array([0.3, 0.4j])
    spec = PotentialSpec.custom(lambda t, z: np.abs(evaluate(v, z)) ** 2)
    assert np.allclose(GeneratorFactory(spec, 12)(0.0), potential_matrix(v, 12), atol=1e-13)


def test_zero_potential():
    assert not np.any(GeneratorFactory(PotentialSpec.zero(), 8)(1.0))
