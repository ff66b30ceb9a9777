"""Ziv-Zakai bounds from maximised fidelity curves.

Tight form:          integral_0^W (beta/2)(1 - beta/W)[1 - sqrt(1 - F(beta))] dbeta
Sine-relaxed form:   integral_0^W (W/16) F(beta) sin(pi beta / W) dbeta

The relaxed form never exceeds the tight one, since 1 - sqrt(1 - F) >= F/2
and beta(1 - beta/W) >= (W/4) sin(pi beta/W) on [0, W].
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import BracketError, DomainError, NumericalError
from .fidelity import FidelityCurve, FidelityModel
from .quadrature import integrate
from .special import dawson
from .states import ChannelKind, NoiseChannel, PriorWindow, ProbeState, make_probe

DEFAULT_EPSREL = 1e-10
DEFAULT_EPSABS = 1e-13
# acceptance limit on the reported quadrature error
ERROR_BUDGET = 1e-8


class BoundForm(enum.Enum):
    TIGHT = "tight"
    SINE_RELAXED = "sine"
    CLOSED_FORM_CS = "closed_form_cs"


@dataclass(frozen=True)
class BoundResult:
    value: float
    form: BoundForm
    quadrature_error_estimate: float
    window: PriorWindow
    evaluations: int = 0


@dataclass(frozen=True)
class GeneralizedFidelity:
    betas: np.ndarray
    values: np.ndarray


def _sin_window(betas, width):
    # folded argument so both endpoints give an exact zero
    b = np.asarray(betas, dtype=float)
    return np.sin(math.pi * np.minimum(b, width - b) / width)


def _fidelity_fn(curve, window: PriorWindow):
    if isinstance(curve, FidelityCurve):
        lo, hi = curve.domain
        slack = 1e-12 * window.width
        if lo > slack or hi < window.width - slack:
            raise DomainError(
                f"curve covers [{lo:g}, {hi:g}] but the bound needs [0, {window.width:g}]"
            )
        return curve
    if isinstance(curve, FidelityModel) or callable(curve):
        return curve
    raise TypeError("expected a FidelityCurve, FidelityModel or callable beta -> F")


def _clipped(f, betas):
    return np.clip(np.asarray(f(betas), dtype=float), 0.0, 1.0)


def _run(integrand, window, form, epsabs, epsrel):
    points = [math.pi] if math.pi < window.width else []
    q = integrate(integrand, 0.0, window.width, epsabs=epsabs, epsrel=epsrel, points=points)
    budget = ERROR_BUDGET * max(abs(q.value), 1e-6)
    if not q.converged or not math.isfinite(q.value) or q.error > budget:
        raise NumericalError(
            f"{form.value} bound quadrature did not converge "
            f"(value {q.value!r}, error estimate {q.error:.3g}, budget {budget:.3g})"
        )
    return BoundResult(q.value, form, q.error, window, q.evaluations)


def zzb_tight(curve, window: PriorWindow = PriorWindow(), *, epsabs=DEFAULT_EPSABS,
              epsrel=DEFAULT_EPSREL) -> BoundResult:
    f = _fidelity_fn(curve, window)
    w = window.width

    def integrand(b):
        F = _clipped(f, b)
        # 1 - sqrt(1 - F) without cancellation
        return 0.5 * b * (1.0 - b / w) * (F / (1.0 + np.sqrt(1.0 - F)))

    return _run(integrand, window, BoundForm.TIGHT, epsabs, epsrel)


def zzb_sine_relaxed(curve, window: PriorWindow = PriorWindow(), *, epsabs=DEFAULT_EPSABS,
                     epsrel=DEFAULT_EPSREL) -> BoundResult:
    f = _fidelity_fn(curve, window)
    w = window.width

    def integrand(b):
        return (w / 16.0) * _clipped(f, b) * _sin_window(b, w)

    return _run(integrand, window, BoundForm.SINE_RELAXED, epsabs, epsrel)


def zzb_cs_loss_closed_form(n: float, eta: float) -> float:
    """Relaxed bound for a coherent state under photon loss, W = 2 pi.

    Equals pi^{3/2} e^{-4 eta N} erfi(2 sqrt(eta N)) / (8 sqrt(eta N)), evaluated
    as (pi/4) D(2 sqrt(eta N)) / sqrt(eta N) so it never overflows.
    """
    n = float(n)
    eta = float(eta)
    if not (math.isfinite(n) and math.isfinite(eta)) or n < 0.0 or eta < 0.0:
        raise DomainError(f"need N >= 0 and eta >= 0, got N={n!r}, eta={eta!r}")
    x = eta * n
    if x == 0.0:
        return math.pi / 2.0
    s = math.sqrt(x)
    if s < 1e-4:
        # D(y)/y = 1 - 2y^2/3 + 4y^4/15 - ...; avoids 0/0 noise at tiny arguments
        y2 = 4.0 * x
        return (math.pi / 2.0) * (1.0 - 2.0 * y2 / 3.0 + 4.0 * y2 * y2 / 15.0)
    return (math.pi / 4.0) * dawson(2.0 * s) / s


def generalized_fidelity(curve, window: PriorWindow = PriorWindow()) -> GeneralizedFidelity:
    """(W/16) F(beta) sin(pi beta / W) on the curve's own grid."""
    if isinstance(curve, FidelityCurve):
        betas = np.asarray(curve.betas, dtype=float)
        values = np.asarray(curve.values, dtype=float)
    else:
        betas, values = (np.asarray(a, dtype=float) for a in curve)
    if np.any(betas < 0.0) or np.any(betas > window.width):
        raise DomainError("generalized fidelity is defined on [0, W]")
    return GeneralizedFidelity(betas, (window.width / 16.0) * values * _sin_window(betas, window.width))


def zzb_bound(state: ProbeState, channel: NoiseChannel, window: PriorWindow = PriorWindow(),
              form: BoundForm = BoundForm.SINE_RELAXED, **kw) -> BoundResult:
    """Bound of the requested form for one state/channel pair."""
    model = FidelityModel(state, channel)
    if form is BoundForm.TIGHT:
        return zzb_tight(model, window, **kw)
    if form is BoundForm.SINE_RELAXED:
        return zzb_sine_relaxed(model, window, **kw)
    if form is BoundForm.CLOSED_FORM_CS:
        if state.kind.name != "CS" or channel.kind is not ChannelKind.PHOTON_LOSS:
            raise DomainError("closed form exists for a coherent state under photon loss only")
        if window.width != 2.0 * math.pi:
            raise DomainError("closed form assumes W = 2 pi")
        v = zzb_cs_loss_closed_form(state.mean_photon_number, channel.strength)
        return BoundResult(v, form, 0.0, window)
    raise DomainError(f"unknown bound form {form!r}")


def crossover_kappa(state_a, state_b, n: float, bracket=(0.2, 0.6), *,
                    window: PriorWindow = PriorWindow(),
                    form: BoundForm = BoundForm.SINE_RELAXED, xtol: float = 1e-4) -> float:
    """Phase-diffusion strength where the bounds of two probes cross.

    Bisection on bound(a, kappa) - bound(b, kappa); both probes carry ``n`` photons.
    """
    a = make_probe(getattr(state_a, "kind", state_a), n)
    b = make_probe(getattr(state_b, "kind", state_b), n)
    lo, hi = (float(v) for v in bracket)
    if not 0.0 <= lo < hi:
        raise DomainError(f"bad kappa bracket {bracket!r}")

    def diff(kappa):
        ch = NoiseChannel(ChannelKind.PHASE_DIFFUSION, kappa)
        return zzb_bound(a, ch, window, form).value - zzb_bound(b, ch, window, form).value

    d_lo = diff(lo)
    d_hi = diff(hi)
    if not (d_lo * d_hi < 0.0):
        raise BracketError(
            f"no sign change of the bound difference on [{lo:g}, {hi:g}] "
            f"(ends: {d_lo:.3g}, {d_hi:.3g})"
        )
    return float(optimize.bisect(diff, lo, hi, xtol=xtol))
