"""Variational fidelity lower bounds and their maximisation.

For a pure probe |psi> sent through photon loss, the purified overlap is

    F_Q1(beta) = |<psi| Y^n |psi>|^2,  Y = eta e^{-i beta} + (1 - eta) e^{i beta lambda1}

and through phase diffusion

    F_Q2(beta) = Theta(kappa, beta, lambda2) |<psi| e^{i beta (lambda2 - 1) n} |psi>|^2.

Maximising over the variational parameter gives the noisy fidelity F_L(beta)
that enters the Ziv-Zakai integrals. Heavy lifting happens in the kernel
backend selected by :mod:`qzzb._backend`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._backend import kernels
from .errors import DomainError
from .states import ChannelKind, NoiseChannel, ProbeState, StateKind


@dataclass(frozen=True)
class LossKernel:
    eta: float
    beta: float
    lambda1: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError(f"eta must lie in [0, 1], got {self.eta!r}")

    @property
    def upsilon(self) -> complex:
        return upsilon(self.eta, self.beta, self.lambda1)


@dataclass(frozen=True)
class DiffusionKernel:
    kappa: float
    beta: float
    lambda2: float

    def __post_init__(self):
        if not self.kappa > 0.0:
            raise DomainError(
                f"kappa must be > 0 for the diffusion kernel, got {self.kappa!r}; "
                "route kappa = 0 to ideal_fidelity"
            )

    @property
    def theta(self) -> float:
        return theta(self.kappa, self.beta, self.lambda2)


def upsilon(eta, beta, lambda1):
    """eta e^{-i beta} + (1 - eta) e^{i beta lambda1}."""
    return eta * np.exp(-1j * np.asarray(beta)) + (1.0 - eta) * np.exp(
        1j * np.asarray(beta) * np.asarray(lambda1)
    )


def theta(kappa, beta, lambda2):
    """exp(-beta^2 lambda2^2 / (8 kappa^2))."""
    bl = np.asarray(beta) * np.asarray(lambda2)
    return np.exp(-(bl * bl) / (8.0 * kappa * kappa))


def big_lambda(beta, lambda2):
    """1 - cos(beta (lambda2 - 1)), evaluated as 2 sin^2(beta (lambda2 - 1) / 2)."""
    s = np.sin(0.5 * np.asarray(beta) * (np.asarray(lambda2) - 1.0))
    return 2.0 * s * s


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def fq_loss(state: ProbeState, k: LossKernel):
    """Purified-overlap fidelity under photon loss for one variational lambda1.

    Closed forms: CS exp[2N(Re Y - 1)], SMSVS 1/|1 + N(1 - Y^2)|,
    TMSVS 1/|1 + N(1 - Y)/2|^2. ``k.beta`` may be an array.
    """
    phi = np.asarray(k.beta, dtype=float) * k.lambda1
    v = kernels.loss_objective(int(state.kind), state.mean_photon_number, k.eta, k.beta, phi)
    return _scalar(v)


def fq_diffusion(state: ProbeState, k: DiffusionKernel):
    """Theta times the squared overlap, for one variational lambda2."""
    v = kernels.diffusion_objective(
        int(state.kind), state.mean_photon_number, k.kappa, k.beta, k.lambda2
    )
    return _scalar(v)


def ideal_fidelity(state: ProbeState, beta):
    """|<psi| e^{-i beta n} |psi>|^2 for the noiseless channel."""
    beta = np.asarray(beta, dtype=float)
    n = state.mean_photon_number
    if state.kind is StateKind.CS:
        s = np.sin(0.5 * beta)
        v = np.exp(-4.0 * n * s * s)
    elif state.kind is StateKind.SMSVS:
        v = 1.0 / np.abs(1.0 + n * (1.0 - np.exp(-2j * beta)))
    else:
        v = 1.0 / np.abs(1.0 + 0.5 * n * (1.0 - np.exp(-1j * beta))) ** 2
    return _scalar(v)


def _maximize(state: ProbeState, channel: NoiseChannel, betas: np.ndarray):
    """(f_max, lambda_opt) arrays; lambda_opt is lambda1 for loss, lambda2 for diffusion."""
    kind = int(state.kind)
    n = state.mean_photon_number
    if channel.is_ideal:
        return np.asarray(ideal_fidelity(state, betas), dtype=float).reshape(betas.shape), np.zeros_like(betas)
    if channel.kind is ChannelKind.PHOTON_LOSS:
        f, phi = kernels.maximize_loss(kind, n, channel.strength, betas)
        lam = np.zeros_like(phi)
        nz = betas != 0.0
        lam[nz] = phi[nz] / betas[nz]
        return f, lam
    return kernels.maximize_diffusion(kind, n, channel.strength, betas)


def maximize_lambda(state: ProbeState, channel: NoiseChannel, beta: float):
    """Maximise the variational fidelity at one phase difference.

    For loss the search runs over phi = beta * lambda1 in (-pi, pi]; the
    returned lambda_opt is phi_opt / beta. For diffusion it runs over the
    whole real lambda2 axis (see ``_kernels_py.maximize_diffusion`` for the
    reduction to a finite interval). beta = 0 returns (1.0, 0.0).
    """
    beta = float(beta)
    if not math.isfinite(beta):
        raise DomainError(f"beta must be finite, got {beta!r}")
    if beta == 0.0:
        return 1.0, 0.0
    f, lam = _maximize(state, channel, np.array([beta]))
    return float(f[0]), float(lam[0])


class FidelityModel:
    """beta -> (F_L(beta), lambda_opt) for a fixed state and channel.

    Results are memoised per beta value. Each instance owns its cache, so
    share instances across threads only for reading after warm-up.
    """

    def __init__(self, state: ProbeState, channel: NoiseChannel):
        self.state = state
        self.channel = channel
        self._cache: dict[float, tuple[float, float]] = {}

    def evaluate(self, betas):
        betas = np.asarray(betas, dtype=float)
        flat = betas.ravel()
        missing = np.array(sorted({b for b in flat.tolist() if b not in self._cache}))
        if missing.size:
            f, lam = _maximize(self.state, self.channel, missing)
            self._cache.update(zip(missing.tolist(), zip(f.tolist(), lam.tolist())))
        out = np.array([self._cache[b] for b in flat.tolist()]).reshape(flat.size, 2)
        return out[:, 0].reshape(betas.shape), out[:, 1].reshape(betas.shape)

    def __call__(self, betas):
        return self.evaluate(betas)[0]

    @property
    def cache_size(self):
        return len(self._cache)


@dataclass
class FidelityCurve:
    """Maximised fidelity sampled on a beta grid.

    ``model`` lets quadrature routines evaluate the same curve at extra nodes.
    """

    betas: np.ndarray
    values: np.ndarray
    lambda_opt: np.ndarray
    state: ProbeState
    channel: NoiseChannel
    model: FidelityModel = field(repr=False, compare=False, default=None)

    def __call__(self, betas):
        if self.model is None:
            self.model = FidelityModel(self.state, self.channel)
        return self.model(betas)

    @property
    def domain(self):
        return float(self.betas[0]), float(self.betas[-1])


def fidelity_curve(state: ProbeState, channel: NoiseChannel, betas) -> FidelityCurve:
    betas = np.asarray(betas, dtype=float)
    if betas.ndim != 1 or betas.size == 0:
        raise DomainError("betas must be a non-empty 1-D grid")
    if np.any(np.diff(betas) < 0):
        raise DomainError("betas must be sorted")
    model = FidelityModel(state, channel)
    values, lam = model.evaluate(betas)
    return FidelityCurve(betas, values, lam, state, channel, model)


FidelityLike = Callable[[np.ndarray], np.ndarray]
