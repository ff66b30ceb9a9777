"""Probe states, noise channels and the uniform prior window.

All three types are frozen value objects. States are keyed by their mean
photon number; squeeze parameters are derived on demand.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


class StateKind(enum.IntEnum):
    CS = 0
    SMSVS = 1
    TMSVS = 2


class ChannelKind(enum.Enum):
    PHOTON_LOSS = "loss"
    PHASE_DIFFUSION = "diffusion"


_STATE_ALIASES = {
    "cs": StateKind.CS,
    "coherent": StateKind.CS,
    "smsvs": StateKind.SMSVS,
    "smsv": StateKind.SMSVS,
    "tmsvs": StateKind.TMSVS,
    "tmsv": StateKind.TMSVS,
}

_CHANNEL_ALIASES = {
    "loss": ChannelKind.PHOTON_LOSS,
    "photonloss": ChannelKind.PHOTON_LOSS,
    "photon_loss": ChannelKind.PHOTON_LOSS,
    "diffusion": ChannelKind.PHASE_DIFFUSION,
    "phasediffusion": ChannelKind.PHASE_DIFFUSION,
    "phase_diffusion": ChannelKind.PHASE_DIFFUSION,
}


def parse_state_kind(kind) -> StateKind:
    if isinstance(kind, StateKind):
        return kind
    if isinstance(kind, str):
        try:
            return _STATE_ALIASES[kind.strip().lower()]
        except KeyError:
            pass
    raise DomainError(f"unknown probe state kind: {kind!r}")


def parse_channel_kind(kind) -> ChannelKind:
    if isinstance(kind, ChannelKind):
        return kind
    if isinstance(kind, str):
        try:
            return _CHANNEL_ALIASES[kind.strip().lower()]
        except KeyError:
            pass
    raise DomainError(f"unknown noise channel kind: {kind!r}")


@dataclass(frozen=True)
class ProbeState:
    """A CS, SMSVS or TMSVS probe with ``mean_photon_number`` photons on average."""

    kind: StateKind
    mean_photon_number: float

    def __post_init__(self):
        object.__setattr__(self, "kind", parse_state_kind(self.kind))
        n = float(self.mean_photon_number)
        if not math.isfinite(n) or n < 0.0:
            raise DomainError(f"mean photon number must be finite and >= 0, got {n!r}")
        object.__setattr__(self, "mean_photon_number", n)

    @property
    def alpha(self) -> float:
        """Real, non-negative coherent amplitude (CS only)."""
        self._require(StateKind.CS)
        return math.sqrt(self.mean_photon_number)

    @property
    def squeezing(self) -> float:
        """Squeeze parameter: r1 with N = sinh^2 r1 (SMSVS), r2 with N = 2 sinh^2 r2 (TMSVS)."""
        if self.kind is StateKind.SMSVS:
            return math.asinh(math.sqrt(self.mean_photon_number))
        if self.kind is StateKind.TMSVS:
            return math.asinh(math.sqrt(self.mean_photon_number / 2.0))
        raise DomainError("a coherent state has no squeeze parameter")

    def _require(self, kind):
        if self.kind is not kind:
            raise DomainError(f"operation defined for {kind.name} only, got {self.kind.name}")

    def __str__(self):
        return f"{self.kind.name}(N={self.mean_photon_number:g})"


def make_probe(kind, n) -> ProbeState:
    return ProbeState(parse_state_kind(kind), n)


def photons_from_squeezing(kind, r: float) -> float:
    """Inverse of :attr:`ProbeState.squeezing`."""
    kind = parse_state_kind(kind)
    if kind is StateKind.SMSVS:
        return math.sinh(r) ** 2
    if kind is StateKind.TMSVS:
        return 2.0 * math.sinh(r) ** 2
    raise DomainError("a coherent state has no squeeze parameter")


@dataclass(frozen=True)
class NoiseChannel:
    """Photon loss with transmissivity ``strength`` = eta in [0, 1], or phase
    diffusion with ``strength`` = kappa >= 0."""

    kind: ChannelKind
    strength: float

    def __post_init__(self):
        object.__setattr__(self, "kind", parse_channel_kind(self.kind))
        s = float(self.strength)
        if not math.isfinite(s):
            raise DomainError(f"channel strength must be finite, got {s!r}")
        if self.kind is ChannelKind.PHOTON_LOSS and not 0.0 <= s <= 1.0:
            raise DomainError(f"photon-loss eta must lie in [0, 1], got {s!r}")
        if self.kind is ChannelKind.PHASE_DIFFUSION and s < 0.0:
            raise DomainError(f"phase-diffusion kappa must be >= 0, got {s!r}")
        object.__setattr__(self, "strength", s)

    @property
    def is_ideal(self) -> bool:
        if self.kind is ChannelKind.PHOTON_LOSS:
            return self.strength == 1.0
        return self.strength == 0.0

    def __str__(self):
        sym = "eta" if self.kind is ChannelKind.PHOTON_LOSS else "kappa"
        return f"{self.kind.value}({sym}={self.strength:g})"


def make_channel(kind, strength) -> NoiseChannel:
    return NoiseChannel(parse_channel_kind(kind), strength)


IDEAL = NoiseChannel(ChannelKind.PHOTON_LOSS, 1.0)


@dataclass(frozen=True)
class PriorWindow:
    """Uniform prior of width ``width`` centred on ``mean`` (radians).

    The bounds depend on the width only.
    """

    width: float = 2.0 * math.pi
    mean: float = math.pi

    def __post_init__(self):
        w = float(self.width)
        if not math.isfinite(w) or w <= 0.0:
            raise DomainError(f"prior width must be finite and > 0, got {w!r}")
        object.__setattr__(self, "width", w)
        object.__setattr__(self, "mean", float(self.mean))

    def density(self, x):
        """p(x) = rect((x - mean)/width) / width."""
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x - self.mean) <= 0.5 * self.width, 1.0 / self.width, 0.0)
