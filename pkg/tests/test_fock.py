import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lllgrowth.fock import (
    FockCoefficients,
    SobolevScale,
    basis_values,
    bracket_norm,
    evaluate,
    factorial_ratio,
    h_sobolev_norm,
    htilde_eigenvalues,
    htilde_norm,
    l2_norm,
    radial_moment,
    rho_of_tau,
    tail_mass,
    weighted_norm,
)
from lllgrowth.operators import displacement_columns
from lllgrowth.quadrature import DEFAULT_GRID, basis_sampler, quad_inner_product, state_sampler

U1 = np.array([0.5, 0.5j * np.sqrt(3)])

coeff_vectors = st.lists(
    st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=12
).map(lambda xs: np.array([complex(a, b) for a, b in xs]))


def e(n, N=None):
    return FockCoefficients.basis(n, N or n + 1)


def test_l2_examples():
    assert l2_norm(e(0)) == 1.0
    assert l2_norm(U1) == pytest.approx(1.0, abs=1e-15)
    assert l2_norm(np.zeros(3)) == 0.0


def test_oscillator_sobolev_examples():
    assert h_sobolev_norm(e(0), 2) == pytest.approx(2.0)
    assert h_sobolev_norm(e(1), 1) == pytest.approx(2.0)


def test_hs_of_phi1_matches_quadrature():
    # ||H^{1/2} phi_1||^2 = <phi_1, H phi_1>; H phi_1 computed from the sampler by Wirtinger calculus
    from lllgrowth.quadrature import GaussPoly

    phi1 = GaussPoly({(1, 0): 1 / np.sqrt(np.pi)}, decay=0.5)
    val = quad_inner_product(phi1, phi1.apply_H())
    assert np.sqrt(val.real) == pytest.approx(h_sobolev_norm(e(1), 1), rel=1e-12)


def test_htilde_examples():
    assert htilde_norm(e(0), SobolevScale(0.0, 2.0)) == pytest.approx(np.sqrt(3), rel=1e-14)
    assert htilde_norm(e(1), SobolevScale(0.5, 1.0)) == pytest.approx(np.sqrt(5), rel=1e-14)
    assert rho_of_tau(0.75) == pytest.approx(2.0)
    assert htilde_eigenvalues(3, 1.0).tolist() == [3.0, 5.0, 7.0]


def test_sobolev_scale_validation():
    with pytest.raises(ValueError):
        SobolevScale(1.0)
    with pytest.raises(ValueError):
        SobolevScale(-0.1)
    with pytest.raises(ValueError):
        SobolevScale(0.5, -1.0)


@given(coeff_vectors)
@settings(max_examples=50, deadline=None)
def test_zero_order_norms_equal_l2(c):
    l2 = l2_norm(c)
    assert h_sobolev_norm(c, 0) == pytest.approx(l2, rel=1e-12, abs=1e-300)
    assert htilde_norm(c, SobolevScale(0.3, 0.0)) == pytest.approx(l2, rel=1e-12, abs=1e-300)
    assert bracket_norm(c, 0) == pytest.approx(l2, rel=1e-12, abs=1e-300)
    assert radial_moment(c, 0) == pytest.approx(l2 ** 2, rel=1e-12, abs=1e-300)


@given(coeff_vectors)
@settings(max_examples=30, deadline=None)
def test_norms_increase_with_order(c):
    assert h_sobolev_norm(c, 1) <= h_sobolev_norm(c, 2) + 1e-12
    assert bracket_norm(c, 1) <= bracket_norm(c, 2) + 1e-12


def test_radial_moment_matches_quadrature():
    assert radial_moment(e(0), 1) == pytest.approx(1.0)
    assert radial_moment(e(1), 1) == pytest.approx(2.0)
    for c in (e(0), e(1), U1, np.array([0.3, -0.2j, 0.5, 0.1 + 0.4j])):
        f = state_sampler(c)
        for k in (1, 2, 3):
            g = lambda z, k=k: np.abs(z) ** k * f(z)
            assert radial_moment(c, k) == pytest.approx(quad_inner_product(g, g).real, rel=1e-11)


def test_bracket_examples():
    assert bracket_norm(e(0), 1) == pytest.approx(np.sqrt(2))
    assert bracket_norm(U1, 1) == pytest.approx(1.6583124, abs=1e-7)
    f = state_sampler(U1)
    g = lambda z: np.sqrt(1 + np.abs(z) ** 2) * f(z)
    assert bracket_norm(U1, 1) == pytest.approx(np.sqrt(quad_inner_product(g, g).real), rel=1e-12)


def test_bracket_rejects_fractional_order():
    with pytest.raises((TypeError, ValueError)):
        bracket_norm(U1, 0.5)
    # fractional orders go through the oscillator scale
    assert weighted_norm(U1, 0.5) == pytest.approx(h_sobolev_norm(U1, 0.5))
    assert weighted_norm(U1, 2.0) == pytest.approx(bracket_norm(U1, 2))


def test_radial_moment_overflow_is_reported():
    c = np.zeros(200, dtype=complex)
    c[-1] = 1.0
    with pytest.raises(OverflowError):
        radial_moment(c, 200)


def test_factorial_ratio():
    assert factorial_ratio(np.array([0, 1, 4]), 3).tolist() == [6.0, 24.0, 210.0]


def test_evaluate_examples():
    assert evaluate(e(0), 0) == pytest.approx(0.5641896, abs=1e-7)
    assert evaluate(e(1), 0) == 0
    # direct formula e^{-1/2} / sqrt(pi) = 0.3421983
    assert evaluate(e(0), 1) == pytest.approx(np.exp(-0.5) / np.sqrt(np.pi), rel=1e-15)
    assert evaluate(e(0), 1) == pytest.approx(0.3421983, abs=1e-7)


def test_basis_values_match_formula():
    z = np.array([0.3 - 1.2j, 2.0 + 0.5j, -4.0j])
    vals = basis_values(z, 30)
    for n in (0, 1, 7, 29):
        assert np.allclose(vals[n], basis_sampler(n)(z), rtol=1e-12, atol=1e-300)


def test_basis_orthonormal_on_grid():
    phis = basis_values(DEFAULT_GRID.points.ravel(), 25)
    gram = (np.conj(phis) * DEFAULT_GRID.weights.ravel()) @ phis.T
    assert np.abs(gram - np.eye(25)).max() < 1e-12


def test_tail_mass_examples():
    assert tail_mass(e(0, 4), 1) == 0.0
    assert tail_mass(np.array([1, 1]) / np.sqrt(2), 1) == pytest.approx(0.5)
    col = displacement_columns(2.0, 60, 1)[:, 0]
    brute = 1.0 - sum(np.exp(-4.0) * 4.0 ** n / math.factorial(n) for n in range(20))
    assert tail_mass(col, 20) == pytest.approx(brute, rel=1e-8)
    # brute-force Poisson(4) tail P(n >= 20) = 1.0200522e-8
    assert brute == pytest.approx(1.0200522e-8, rel=1e-7)


def test_padding_and_basis():
    c = FockCoefficients(np.array([1.0, 2.0]))
    assert c.N == 2
    p = c.padded(5)
    assert p.N == 5 and p[2:].tolist() == [0, 0, 0]
    assert c.padded(1).tolist() == [1.0]
    with pytest.raises(ValueError):
        FockCoefficients([])
