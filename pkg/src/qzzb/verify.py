"""Self-check suite: closed forms against the Fock-space oracle and identities.

Each check reports the measured residual next to its tolerance. The whole
suite runs in a few seconds with reduced oracle sizes; the test suite runs
the heavier versions.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._backend import BACKEND
from ._version import __version__
from .bounds import zzb_cs_loss_closed_form, zzb_sine_relaxed, zzb_tight
from .fidelity import DiffusionKernel, FidelityModel, fq_diffusion, maximize_lambda, upsilon
from .fock import (
    dephased_state,
    kraus_loss,
    lossy_state,
    purified_overlap_explicit,
    uhlmann_fidelity,
    z_operator,
)
from .states import ChannelKind, NoiseChannel, PriorWindow, StateKind, make_probe
from .sweeps import dumps_json, write_text

SEED = 20240607
# (state, N, cutoff); the two-mode cutoff keeps the oracle at 441 dimensions
ORACLE_CASES = ((StateKind.CS, 1.0, 40), (StateKind.SMSVS, 1.0, 80), (StateKind.TMSVS, 0.5, 20))
ORACLE_BETAS = np.linspace(0.2, 2.0 * math.pi - 0.2, 8)


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(math.isfinite(self.residual) and self.residual <= self.tolerance)

    def as_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "residual": self.residual,
            "tolerance": self.tolerance,
            **({"details": self.details} if self.details else {}),
        }


def _kraus_checks(scale):
    cutoff = 30
    total = sum(
        kraus_loss(l, 0.37, 0.0, 0.0, cutoff).matrix.conj().T @ kraus_loss(l, 0.37, 0.0, 0.0, cutoff).matrix
        for l in range(cutoff + 1)
    )
    yield Check("kraus_completeness", float(np.abs(total - np.eye(cutoff + 1)).max()), 1e-10 * scale)

    rng = np.random.default_rng(SEED)
    worst = 0.0
    n = np.arange(cutoff + 1)
    for _ in range(10):
        eta = rng.uniform(0.0, 1.0)
        beta = rng.uniform(-math.pi, math.pi)
        lam = rng.uniform(-2.0, 2.0)
        z = z_operator(eta, beta, lam, cutoff).matrix
        worst = max(worst, float(np.abs(z - np.diag(upsilon(eta, beta, lam) ** n)).max()))
    yield Check("z_operator_diagonal", worst, 1e-10 * scale)


def _oracle_checks(scale):
    for kind, n, cutoff in ORACLE_CASES:
        state = make_probe(kind, n)
        label = kind.name.lower()
        for ch_kind, strengths, build in (
            (ChannelKind.PHOTON_LOSS, (0.3, 0.8), lossy_state),
            (ChannelKind.PHASE_DIFFUSION, (0.1, 0.4), dephased_state),
        ):
            excess = -math.inf
            gap = 0.0
            for s in strengths:
                ch = NoiseChannel(ch_kind, s)
                ref = build(state, s, 0.0, cutoff)
                for b in ORACLE_BETAS:
                    fo = uhlmann_fidelity(ref, build(state, s, float(b), cutoff))
                    fq, _ = maximize_lambda(state, ch, float(b))
                    excess = max(excess, fq - fo)
                    gap = max(gap, abs(fq - fo))
            details = {"max_abs_gap": gap, "cutoff": cutoff, "N": n}
            yield Check(f"lower_bound_{label}_{ch_kind.value}", excess, 1e-8 * scale, details)
            if kind is StateKind.CS and ch_kind is ChannelKind.PHOTON_LOSS:
                yield Check("cs_loss_exact", gap, 1e-8 * scale)


def _purification_checks(scale):
    worst = 0.0
    for kind, n, cutoff in ORACLE_CASES:
        state = make_probe(kind, n)
        for kappa, beta, lam in ((0.2, 1.0, 0.3), (0.15, 2.2, -0.5)):
            a = purified_overlap_explicit(state, kappa, beta, lam, cutoff, x=0.4)
            b = fq_diffusion(state, DiffusionKernel(kappa, beta, lam))
            worst = max(worst, float(abs(a - b)))
    yield Check("diffusion_purification", worst, 1e-9 * scale)


def _bound_checks(scale):
    worst = 0.0
    for n in (0.5, 5.0):
        for eta in (0.3, 1.0):
            closed = zzb_cs_loss_closed_form(n, eta)
            model = FidelityModel(make_probe(StateKind.CS, n), NoiseChannel(ChannelKind.PHOTON_LOSS, eta))
            quad = zzb_sine_relaxed(model).value
            worst = max(worst, abs(closed - quad) / closed)
    yield Check("cs_closed_form_vs_quadrature", worst, 1e-7 * scale)

    one = lambda b: np.ones_like(b)  # noqa: E731
    w = 2.0 * math.pi
    r_tight = abs(zzb_tight(one, PriorWindow(w)).value - w * w / 12.0)
    r_sine = abs(zzb_sine_relaxed(one, PriorWindow(w)).value - math.pi / 2.0)
    yield Check("unit_fidelity_tight", r_tight, 1e-10 * scale)
    yield Check("unit_fidelity_sine", r_sine, 1e-10 * scale)

    excess = -math.inf
    for kind in StateKind:
        for ch in (NoiseChannel(ChannelKind.PHOTON_LOSS, 0.5), NoiseChannel(ChannelKind.PHASE_DIFFUSION, 0.2)):
            f = FidelityModel(make_probe(kind, 5.0), ch)
            excess = max(excess, zzb_sine_relaxed(f).value - zzb_tight(f).value)
    yield Check("tight_dominates_sine", excess, 0.0)


def run_checks(tolerance_scale: float = 1.0):
    """Run every check; returns a list of :class:`Check`."""
    checks = []
    for group in (_kraus_checks, _oracle_checks, _purification_checks, _bound_checks):
        checks.extend(group(tolerance_scale))
    return checks


def verify(report_path=None, *, tolerance_scale: float = 1.0) -> dict:
    """Run the suite and optionally write a JSON report. ``report["passed"]`` aggregates."""
    t0 = time.perf_counter()
    checks = run_checks(tolerance_scale)
    report = {
        "meta": {
            "tool": "qzzb",
            "version": __version__,
            "backend": BACKEND,
            "tolerance_scale": float(tolerance_scale),
            "seconds": round(time.perf_counter() - t0, 3),
        },
        "passed": all(c.passed for c in checks),
        "checks": [c.as_dict() for c in checks],
    }
    if report_path is not None:
        write_text(report_path, dumps_json(report))
    return report
