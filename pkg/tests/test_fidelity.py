import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from qzzb import (
    IDEAL,
    DiffusionKernel,
    DomainError,
    FidelityModel,
    LossKernel,
    StateKind,
    fidelity_curve,
    fq_diffusion,
    fq_loss,
    ideal_fidelity,
    make_channel,
    make_probe,
    maximize_lambda,
)
from qzzb.fock import fock_state, generator_overlap, z_operator

KINDS = ("cs", "smsvs", "tmsvs")


def test_cs_loss_at_unit_eta_is_ideal():
    st_ = make_probe("cs", 5.0)
    for beta in (0.3, 1.0, 2.5):
        for lam in (-1.0, 0.0, 3.0):
            assert fq_loss(st_, LossKernel(1.0, beta, lam)) == pytest.approx(math.exp(10 * (math.cos(beta) - 1)),
                                                                            rel=1e-13)


@pytest.mark.parametrize("kind", KINDS)
def test_unit_at_zero_beta(kind):
    s = make_probe(kind, 3.0)
    assert fq_loss(s, LossKernel(0.4, 0.0, 1.7)) == 1.0
    assert fq_diffusion(s, DiffusionKernel(0.3, 0.0, 0.4)) == 1.0
    assert ideal_fidelity(s, 0.0) == 1.0
    assert maximize_lambda(s, make_channel("loss", 0.4), 0.0) == (1.0, 0.0)


def test_smsvs_loss_against_fock_operator():
    # |<psi| Z |psi>|^2 with Z the explicit Kraus sum; cutoff 60 drops ~1e-10 of the state
    s = make_probe("smsvs", 1.0)
    psi = fock_state(s, 60)
    z = z_operator(0.5, math.pi / 2, 0.0, 60).matrix
    oracle = abs(np.vdot(psi.amplitudes, z @ psi.amplitudes)) ** 2
    assert psi.tail < 1e-9
    assert fq_loss(s, LossKernel(0.5, math.pi / 2, 0.0)) == pytest.approx(oracle, rel=1e-9)


@pytest.mark.parametrize("kind", KINDS)
def test_loss_against_fock_operator_random(kind):
    rng = np.random.default_rng(3)
    s = make_probe(kind, 0.8)
    psi = fock_state(s, 50 if kind != "tmsvs" else 30)
    for _ in range(5):
        eta, beta, lam = rng.uniform(0, 1), rng.uniform(0, 2 * math.pi), rng.uniform(-2, 2)
        z = z_operator(eta, beta, lam, psi.cutoff).matrix
        if psi.modes == 2:
            z = np.kron(z, np.eye(psi.cutoff + 1))
        oracle = abs(np.vdot(psi.amplitudes, z @ psi.amplitudes)) ** 2
        assert fq_loss(s, LossKernel(eta, beta, lam)) == pytest.approx(oracle, rel=1e-9)


@pytest.mark.parametrize("kind", KINDS)
def test_diffusion_special_parameters(kind):
    s = make_probe(kind, 5.0)
    for kappa in (0.1, 0.7):
        for beta in (0.4, 2.0, 5.0):
            assert fq_diffusion(s, DiffusionKernel(kappa, beta, 1.0)) == pytest.approx(
                math.exp(-beta**2 / (8 * kappa**2)), rel=1e-14, abs=1e-300)
            assert fq_diffusion(s, DiffusionKernel(kappa, beta, 0.0)) == pytest.approx(ideal_fidelity(s, beta),
                                                                                      rel=1e-14)


def test_cs_diffusion_at_zero_lambda():
    s = make_probe("cs", 5.0)
    for beta in (0.5, 1.5):
        assert fq_diffusion(s, DiffusionKernel(0.2, beta, 0.0)) == pytest.approx(
            math.exp(-10 * (1 - math.cos(beta))), rel=1e-13)


def test_tmsvs_diffusion_against_fock_sum():
    s = make_probe("tmsvs", 5.0)
    theta = math.exp(-(1.0 * 0.5) ** 2 / (8 * 0.2**2))
    overlap = generator_overlap(s, 1.0 * (0.5 - 1.0), cutoff=200)
    assert fq_diffusion(s, DiffusionKernel(0.2, 1.0, 0.5)) == pytest.approx(theta * abs(overlap) ** 2, rel=1e-12)


@pytest.mark.parametrize("kind,beta", [("smsvs", math.pi), ("tmsvs", 1.3), ("cs", 2.2)])
def test_ideal_against_pure_state_overlap(kind, beta):
    s = make_probe(kind, 5.0)
    cutoff = 400 if kind == "smsvs" else 150
    oracle = abs(generator_overlap(s, -beta, cutoff)) ** 2
    assert ideal_fidelity(s, beta) == pytest.approx(oracle, rel=1e-10)


def test_kernel_validation():
    with pytest.raises(DomainError):
        LossKernel(1.5, 0.1, 0.0)
    with pytest.raises(DomainError):
        DiffusionKernel(0.0, 0.1, 0.0)
    with pytest.raises(DomainError):
        maximize_lambda(make_probe("cs", 1.0), IDEAL, math.nan)


@pytest.mark.parametrize("eta", [0.1, 0.5, 0.95])
def test_cs_loss_optimum_at_zero(backend, eta):
    for beta in np.linspace(0.1, 2 * math.pi, 17):
        f, lam = maximize_lambda(make_probe("cs", 5.0), make_channel("loss", eta), beta)
        assert lam == 0.0
        assert f == pytest.approx(math.exp(-20 * eta * math.sin(beta / 2) ** 2), rel=1e-14)


@pytest.mark.parametrize("kind", KINDS)
def test_unit_eta_is_ideal(kind):
    s = make_probe(kind, 5.0)
    for beta in (0.5, 2.0, 4.0):
        assert maximize_lambda(s, make_channel("loss", 1.0), beta)[0] == pytest.approx(ideal_fidelity(s, beta))


@pytest.mark.parametrize("kind", KINDS)
def test_more_loss_never_lowers_fidelity(kind):
    # states that lose more photons are harder to tell apart: F_L is nonincreasing in eta
    s = make_probe(kind, 5.0)
    betas = np.linspace(0.05, 2 * math.pi, 60)
    prev = None
    for eta in np.linspace(0.05, 1.0, 12):
        f = FidelityModel(s, make_channel("loss", eta))(betas)
        if prev is not None:
            assert np.all(f <= prev + 1e-12)
        prev = f


@pytest.mark.parametrize("kind", KINDS)
def test_reparameterisation_invariance(kind):
    s = make_probe(kind, 2.0)
    for beta in (0.4, 1.7, 3.9):
        for lam in (-0.3, 0.8):
            a = fq_loss(s, LossKernel(0.6, beta, lam))
            b = fq_loss(s, LossKernel(0.6, beta, lam + 2 * math.pi / beta))
            assert a == pytest.approx(b, rel=1e-12)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("channel,strength", [("loss", 0.4), ("diffusion", 0.25)])
def test_argmax_certificate(kind, channel, strength):
    rng = np.random.default_rng(11)
    s = make_probe(kind, 5.0)
    ch = make_channel(channel, strength)
    for beta in (0.7, 2.9, 5.5):
        f, lam = maximize_lambda(s, ch, beta)
        draws = rng.uniform(-3, 3, 64)
        if channel == "loss":
            vals = [fq_loss(s, LossKernel(strength, beta, x)) for x in draws]
            assert f == pytest.approx(fq_loss(s, LossKernel(strength, beta, lam)), rel=1e-13)
        else:
            vals = [fq_diffusion(s, DiffusionKernel(strength, beta, x)) for x in draws]
            assert f == pytest.approx(fq_diffusion(s, DiffusionKernel(strength, beta, lam)), rel=1e-13)
        assert f >= max(vals)


@settings(max_examples=100, deadline=None)
@given(
    kind=st.sampled_from(KINDS),
    n=st.floats(0.0, 30.0),
    eta=st.floats(0.0, 1.0),
    kappa=st.floats(1e-4, 5.0),
    beta=st.floats(-2 * math.pi, 2 * math.pi),
    lam=st.floats(-5.0, 5.0),
)
def test_fidelities_in_unit_interval(kind, n, eta, kappa, beta, lam):
    s = make_probe(kind, n)
    for v in (fq_loss(s, LossKernel(eta, beta, lam)), fq_diffusion(s, DiffusionKernel(kappa, beta, lam)),
              ideal_fidelity(s, beta)):
        assert 0.0 <= v <= 1.0 + 1e-15


def test_ideal_curve_matches_pointwise():
    betas = np.linspace(0, 2 * math.pi, 257)
    for kind in KINDS:
        s = make_probe(kind, 5.0)
        c = fidelity_curve(s, IDEAL, betas)
        np.testing.assert_array_equal(c.values, ideal_fidelity(s, betas))
        assert c.values[0] == 1.0
        assert c.domain == (0.0, 2 * math.pi)


def test_smsvs_diffusion_curve_against_independent_maximiser():
    # dense scan over [-2, 3] polished with bounded Brent; different algorithm and grid
    s = make_probe("smsvs", 5.0)
    betas = np.linspace(0, 2 * math.pi, 97)
    c = fidelity_curve(s, make_channel("diffusion", 0.2), betas)
    grid = np.linspace(-2, 3, 20001)
    for b, f in zip(betas[1:], c.values[1:]):
        def g(x):
            return fq_diffusion(s, DiffusionKernel(0.2, b, x))
        v = g(grid)
        i = int(np.argmax(v))
        r = minimize_scalar(lambda x: -g(x), bounds=(grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]),
                            method="bounded", options={"xatol": 1e-12})
        assert f == pytest.approx(max(v[i], -r.fun), rel=1e-10)


def test_curve_validation_and_cache():
    s = make_probe("tmsvs", 2.0)
    ch = make_channel("loss", 0.5)
    with pytest.raises(DomainError):
        fidelity_curve(s, ch, [0.3, 0.1])
    with pytest.raises(DomainError):
        fidelity_curve(s, ch, [])
    m = FidelityModel(s, ch)
    a = m(np.array([0.5, 1.0, 0.5]))
    assert m.cache_size == 2
    assert a[0] == a[2]
    f, lam = m.evaluate(np.array([[0.5], [1.0]]))
    assert f.shape == (2, 1) and lam.shape == (2, 1)
