from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from memfrac import (
    CustomSingular,
    DomainError,
    InvalidParameterError,
    SignedPowerLaw,
    StepIndexError,
    TemperedPowerLaw,
    build_graded_mesh,
    integrate_singular,
    memory_weights,
    mu_beta,
)
from memfrac.kernels import mu_beta_all
from memfrac.temporal_mesh import GradedMesh

TWO_STEP = GradedMesh(1.0, 2, float("nan"), np.array([0.0, 0.25, 1.0]))


def test_mu_beta_closed_form():
    assert mu_beta(TWO_STEP, 0.5, 1) == pytest.approx(1.0, rel=1e-15)
    assert mu_beta(TWO_STEP, 0.5, 2) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(StepIndexError):
        mu_beta(TWO_STEP, 0.5, 3)


@settings(max_examples=40, deadline=None)
@given(beta=st.floats(0.01, 0.99), N=st.integers(1, 200), gamma=st.floats(1, 6), T=st.floats(0.1, 5))
def test_mu_beta_telescopes(beta, N, gamma, T):
    mesh = build_graded_mesh(T, N, gamma)
    mu = mu_beta_all(mesh, beta)
    assert np.all(mu > 0)
    assert mu.sum() == pytest.approx(T ** (1 - beta) / (1 - beta), rel=1e-12)


def test_signed_power_law_weights():
    np.testing.assert_allclose(memory_weights(SignedPowerLaw(1.0, 0.5), TWO_STEP).w, [1.0, 1.0], rtol=1e-15)
    np.testing.assert_allclose(memory_weights(SignedPowerLaw(-1.0, 0.5), TWO_STEP).w, [-1.0, -1.0], rtol=1e-15)
    np.testing.assert_array_equal(memory_weights(SignedPowerLaw(0.0, 0.5), TWO_STEP).w, [0.0, 0.0])


def test_tempered_weight_erf_identity():
    mesh = GradedMesh(0.25, 1, float("nan"), np.array([0.0, 0.25]))
    w = memory_weights(TemperedPowerLaw(1.0, 0.5, 1.0), mesh).w[0]
    assert w == pytest.approx(math.sqrt(math.pi) * math.erf(0.5), rel=1e-13)
    assert w == pytest.approx(0.92256201282558, abs=1e-13)


@pytest.mark.parametrize("beta,lam", [(0.1, 1.0), (0.55, 2.0), (0.8, 0.3)])
def test_tempered_weights_incomplete_gamma(beta, lam):
    # int_a^b e^{-lam s} s^{-beta} ds = lam^{beta-1} Gamma(1-beta) [P(1-beta, lam b) - P(1-beta, lam a)]
    mesh = build_graded_mesh(1.0, 64, 1 / 0.3)
    t = mesh.nodes
    w = memory_weights(TemperedPowerLaw(1.0, beta, lam), mesh).w
    g = lam ** (beta - 1) * math.gamma(1 - beta)
    exact = g * np.diff(special.gammainc(1 - beta, lam * t))
    np.testing.assert_allclose(w, exact, rtol=1e-11)


def test_integrate_singular_against_quad():
    f = lambda s: np.cos(3 * s) * s ** (-0.7)
    val, _ = integrate.quad(lambda s: math.cos(3 * s) * s ** (-0.7), 0, 0.9, limit=200, epsabs=1e-14, epsrel=1e-13)
    assert integrate_singular(f, 0.0, 0.9, 0.7) == pytest.approx(val, rel=1e-11)
    assert integrate_singular(f, 0.2, 0.2, 0.7) == 0.0


def test_custom_kernel_uses_quadrature():
    k = CustomSingular(lambda s: s**-0.3, kappa=1.0, beta=0.3)
    mesh = build_graded_mesh(1.0, 20, 2.0)
    np.testing.assert_allclose(memory_weights(k, mesh).w, 0.7**-1 * np.diff(mesh.nodes**0.7), rtol=1e-12)


def test_bound_check():
    assert SignedPowerLaw(-2.0, 0.4).check_bound(1.0)
    assert TemperedPowerLaw(1.0, 0.4, 1.0).check_bound(2.0)
    assert not CustomSingular(lambda s: s**-0.6, kappa=1.0, beta=0.3).check_bound(1.0)


@pytest.mark.parametrize("make", [
    lambda: SignedPowerLaw(1.0, 0.0),
    lambda: SignedPowerLaw(1.0, 1.0),
    lambda: TemperedPowerLaw(1.0, 0.5, -1.0),
    lambda: CustomSingular(lambda s: 1.0, kappa=0.0, beta=0.5),
])
def test_invalid_kernels(make):
    with pytest.raises((InvalidParameterError, DomainError)):
        make()


def test_partial_weights_and_index():
    mesh = build_graded_mesh(1.0, 8, 2.0)
    k = SignedPowerLaw(1.0, 0.2)
    np.testing.assert_array_equal(memory_weights(k, mesh, 3).w, memory_weights(k, mesh).w[:3])
    with pytest.raises(StepIndexError):
        memory_weights(k, mesh, 9)
