"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v`` (the lines are repeated in the
terminal summary) or ``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time

import numpy as np
import pytest

from qzzb import (
    IDEAL,
    BoundForm,
    ChannelKind,
    FidelityModel,
    NoiseChannel,
    PriorWindow,
    StateKind,
    SweepConfig,
    crossover_kappa,
    emit_curve,
    make_channel,
    make_probe,
    maximize_lambda,
    run_sweep,
    zzb_bound,
    zzb_cs_loss_closed_form,
    zzb_sine_relaxed,
    zzb_tight,
)
from qzzb import _kernels_py
from qzzb.fidelity import upsilon
from qzzb.fock import (
    DEFAULT_CUTOFF,
    dephased_state,
    kraus_loss,
    lossy_state,
    uhlmann_fidelity,
    z_operator,
)
from qzzb.sweeps import read_table

STATES = (StateKind.CS, StateKind.SMSVS, StateKind.TMSVS)


def bound(kind, channel, n=5.0, form=BoundForm.SINE_RELAXED):
    return zzb_bound(make_probe(kind, n), channel, form=form).value


def test_criterion_01_closed_form_consistency(report):
    t0 = time.perf_counter()
    worst = 0.0
    for n in (0.5, 1.0, 2.0, 5.0, 10.0):
        for eta in np.round(np.arange(1, 11) / 10.0, 10):
            closed = zzb_cs_loss_closed_form(n, eta)
            quad = zzb_sine_relaxed(FidelityModel(make_probe("cs", n), make_channel("loss", eta))).value
            worst = max(worst, abs(closed - quad) / closed)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-7 and elapsed < 10.0
    report(1, ok, f"max relative gap {worst:.2e} (tol 1e-7) over 50 (N, eta) pairs in {elapsed:.2f} s (limit 10 s)")
    assert worst <= 1e-7
    assert elapsed < 10.0


def test_criterion_02_ideal_limits(report):
    t0 = time.perf_counter()
    loss_gap = 0.0
    raw_gap = 0.0
    diff_gap = 0.0
    for kind in STATES:
        ideal = bound(kind, IDEAL)
        loss_gap = max(loss_gap, abs(bound(kind, make_channel("loss", 1.0)) - ideal) / ideal)
        # the same bound through the variational maximiser instead of the ideal shortcut
        def raw(b, k=int(kind)):
            return _kernels_py.maximize_loss(k, 5.0, 1.0, np.asarray(b, dtype=float))[0]

        raw_gap = max(raw_gap, abs(zzb_sine_relaxed(raw).value - ideal) / ideal)
        diff_gap = max(diff_gap, abs(bound(kind, make_channel("diffusion", 1e-3)) - ideal) / ideal)
    elapsed = time.perf_counter() - t0
    ok = loss_gap <= 1e-12 and raw_gap <= 1e-10 and diff_gap <= 0.01 and elapsed < 30.0
    report(2, ok, f"eta=1 gap {loss_gap:.1e} (maximiser path {raw_gap:.1e}); "
                  f"kappa=1e-3 relative gap {diff_gap:.2e} (tol 1e-2); {elapsed:.2f} s")
    assert loss_gap <= 1e-12
    assert raw_gap <= 1e-10
    assert diff_gap <= 0.01
    assert elapsed < 30.0


def test_criterion_03_crossover(report):
    t0 = time.perf_counter()
    kappa = crossover_kappa(StateKind.CS, StateKind.TMSVS, 5.0)
    elapsed = time.perf_counter() - t0
    tight = crossover_kappa(StateKind.CS, StateKind.TMSVS, 5.0, form=BoundForm.TIGHT)
    ok = 0.39 <= kappa <= 0.43 and elapsed < 120.0
    report(3, ok, f"kappa* = {kappa:.5f} with the sine-relaxed bound (target [0.39, 0.43]) in "
                  f"{elapsed:.2f} s; tight form gives {tight:.5f}")
    assert 0.39 <= kappa <= 0.43
    assert elapsed < 120.0


def test_criterion_04_ordering(report):
    t0 = time.perf_counter()
    cases = {
        "eta=0.5": make_channel("loss", 0.5),
        "ideal": IDEAL,
        "kappa=0.2": make_channel("diffusion", 0.2),
    }
    ok = True
    parts = []
    for label, ch in cases.items():
        s, t, c = (bound(k, ch) for k in (StateKind.SMSVS, StateKind.TMSVS, StateKind.CS))
        ok &= s > t > c
        parts.append(f"{label}: {s:.4f} > {t:.4f} > {c:.4f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60.0
    report(4, ok, "SMSVS > TMSVS > CS at N=5; " + "; ".join(parts) + f"; {elapsed:.2f} s")
    assert ok


def test_criterion_05_monotonicity(report):
    t0 = time.perf_counter()
    etas = np.linspace(0.05, 1.0, 20)
    kappas = np.linspace(0.01, 1.0, 20)
    worst_eta = -math.inf  # largest increase along eta (must be <= 0)
    worst_kappa = -math.inf  # largest decrease along kappa (must be <= 0)
    for n in (1.0, 5.0):
        for kind in STATES:
            for form in (BoundForm.SINE_RELAXED, BoundForm.TIGHT):
                v = np.array([bound(kind, make_channel("loss", e), n, form) for e in etas])
                worst_eta = max(worst_eta, float(np.max(np.diff(v))))
                v = np.array([bound(kind, make_channel("diffusion", k), n, form) for k in kappas])
                worst_kappa = max(worst_kappa, float(np.max(-np.diff(v))))
    elapsed = time.perf_counter() - t0
    ok = worst_eta <= 0.0 and worst_kappa <= 0.0 and elapsed < 120.0
    report(5, ok, f"largest step against the trend: eta {worst_eta:.2e}, kappa {worst_kappa:.2e} "
                  f"(3 states x N in {{1, 5}} x both forms) in {elapsed:.2f} s")
    assert worst_eta <= 0.0
    assert worst_kappa <= 0.0
    assert elapsed < 120.0


@pytest.mark.slow
def test_criterion_06_oracle_lower_bound(report):
    t0 = time.perf_counter()
    betas = np.linspace(2.0 * math.pi / 16, 2.0 * math.pi, 16)
    excess = -math.inf
    cs_gap = 0.0
    cutoffs = set()
    for kind in STATES:
        for n in (0.5, 1.0, 2.0):
            state = make_probe(kind, n)
            for ch_kind, strengths, build in (
                (ChannelKind.PHOTON_LOSS, (0.2, 0.5, 0.8), lossy_state),
                (ChannelKind.PHASE_DIFFUSION, (0.05, 0.2, 0.5), dephased_state),
            ):
                for s in strengths:
                    ref = build(state, s, 0.0)
                    cutoffs.add((kind.name, ref.cutoff))
                    ch = NoiseChannel(ch_kind, s)
                    for b in betas:
                        fo = uhlmann_fidelity(ref, build(state, s, float(b)))
                        fq, _ = maximize_lambda(state, ch, float(b))
                        excess = max(excess, fq - fo)
                        if kind is StateKind.CS and ch_kind is ChannelKind.PHOTON_LOSS:
                            cs_gap = max(cs_gap, abs(fq - fo))
    elapsed = time.perf_counter() - t0
    ok = excess <= 1e-8 and cs_gap <= 1e-8 and elapsed < 300.0
    used = ", ".join(f"{k}:{c}" for k, c in sorted(cutoffs))
    report(6, ok, f"max(F_closed - F_oracle) = {excess:.2e}, CS loss |gap| = {cs_gap:.2e} (tol 1e-8); "
                  f"cutoffs {used} (single-mode default {DEFAULT_CUTOFF}); {elapsed:.1f} s")
    assert excess <= 1e-8
    assert cs_gap <= 1e-8
    assert elapsed < 300.0


def test_criterion_07_operator_identities(report):
    t0 = time.perf_counter()
    cutoff = 30
    rng = np.random.default_rng(7)
    n = np.arange(cutoff + 1)
    worst = 0.0
    for _ in range(10):
        eta, beta, lam = rng.uniform(0, 1), rng.uniform(-math.pi, math.pi), rng.uniform(-3, 3)
        z = z_operator(eta, beta, lam, cutoff).matrix
        worst = max(worst, float(np.abs(z - np.diag(upsilon(eta, beta, lam) ** n)).max()))
    eta = rng.uniform(0, 1)
    total = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    for l in range(cutoff + 1):
        p = kraus_loss(l, eta, 0.0, 0.0, cutoff).matrix
        total += p.conj().T @ p
    completeness = float(np.abs(total - np.eye(cutoff + 1)).max())
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and completeness <= 1e-10 and elapsed < 30.0
    report(7, ok, f"max |Z - diag(Y^n)| = {worst:.1e}, max |sum Pi^dag Pi - I| = {completeness:.1e} "
                  f"(tol 1e-10, cutoff 30); {elapsed:.2f} s")
    assert worst <= 1e-10
    assert completeness <= 1e-10


def _scan_max(kind, n, kappa, beta, lo, hi, points):
    lam = np.linspace(lo, hi, points)
    return float(np.max(_kernels_py.diffusion_objective(kind, n, kappa, beta, lam)))


def test_criterion_08_variational_sanity(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    phi_worst = 0.0
    for _ in range(50):
        eta = rng.uniform(0.01, 0.99)
        beta = rng.uniform(0.01, 2.0 * math.pi)
        n = rng.uniform(0.1, 10.0)
        _, lam = maximize_lambda(make_probe("cs", n), make_channel("loss", eta), beta)
        phi_worst = max(phi_worst, abs(lam * beta))

    # grid scan over lambda2 in [-2, 3] against the shipped optimiser
    betas = np.linspace(0.25, 2.0 * math.pi, 12)
    beaten = -math.inf
    beaten_restricted = -math.inf
    for kind in STATES:
        for kappa in (0.05, 0.2, 0.5, 1.0):
            for n in (1.0, 5.0):
                state = make_probe(kind, n)
                ch = make_channel("diffusion", kappa)
                f_opt = np.array([maximize_lambda(state, ch, b)[0] for b in betas])
                f_scan = np.array([_scan_max(int(kind), n, kappa, b, -2.0, 3.0, 100001) for b in betas])
                beaten = max(beaten, float(np.max(f_scan - f_opt)))
                # the same search restricted to lambda2 in [0, 1]
                f01, _ = _kernels_py._grid_maximize(
                    lambda bb, x, k=int(kind), nn=n, kk=kappa: _kernels_py.diffusion_objective(k, nn, kk, bb, x),
                    betas, np.zeros(betas.size), np.ones(betas.size), 257, False,
                    [np.zeros(betas.size), np.ones(betas.size)],
                )
                beaten_restricted = max(beaten_restricted, float(np.max(f_scan - f01)))
    elapsed = time.perf_counter() - t0
    ok = phi_worst <= 1e-6 and beaten <= 1e-9 and elapsed < 60.0
    report(8, ok, f"CS loss max |phi_opt| = {phi_worst:.1e} (tol 1e-6); [-2, 3] scan beats the optimiser by "
                  f"at most {beaten:.1e} (tol 1e-9); {elapsed:.1f} s")
    report("8-flag", "FLAGGED" if beaten_restricted > 1e-9 else "not triggered",
           f"a lambda2 search restricted to [0, 1] is beaten by the [-2, 3] scan by {beaten_restricted:.3f}, "
           "so the shipped optimiser searches the whole axis")
    assert phi_worst <= 1e-6
    assert beaten <= 1e-9
    assert elapsed < 60.0


def test_criterion_09_inequality_chain(report, tmp_path):
    worst = -math.inf
    rows_checked = 0
    for channel, grid in (("loss", (0.1, 0.5, 0.9, 1.0)), ("diffusion", (0.05, 0.2, 0.6))):
        cfg = SweepConfig(channel=channel, strength_grid=grid, n_grid=(1.0, 5.0), bound_form="both")
        for row in run_sweep(cfg):
            assert row.ok, row.error
            worst = max(worst, row.zzb_sine - row.zzb_tight)
            rows_checked += 1
    curve_bad = 0
    curves = 0
    for kind in STATES:
        for channel, s in (("loss", 0.5), ("diffusion", 0.2), ("loss", 1.0)):
            path = tmp_path / f"{kind.name}_{channel}_{s}.csv"
            emit_curve(kind, channel, s, 5.0, path=path)
            _, _, rows = read_table(path.read_text())
            f = np.array([float(r[1]) for r in rows])
            curves += 1
            if np.any(f < 0.0) or f[0] != 0.0 or f[-1] != 0.0:
                curve_bad += 1
    ok = worst <= 0.0 and curve_bad == 0
    report(9, ok, f"max(sine - tight) = {worst:.3e} over {rows_checked} sweep rows; "
                  f"{curves - curve_bad}/{curves} emitted curves non-negative with zero endpoints")
    assert worst <= 0.0
    assert curve_bad == 0


def test_criterion_10_analytic_anchors(report):
    one = lambda b: np.ones_like(b)  # noqa: E731
    w = 2.0 * math.pi
    tight = zzb_tight(one, PriorWindow(w)).value
    sine = zzb_sine_relaxed(one, PriorWindow(w)).value
    gt = abs(tight - w * w / 12.0)
    gs = abs(sine - math.pi / 2.0)
    ok = gt <= 1e-10 and gs <= 1e-10
    report(10, ok, f"|tight - W^2/12| = {gt:.1e}, |sine - pi/2| = {gs:.1e} (tol 1e-10)")
    assert gt <= 1e-10
    assert gs <= 1e-10


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
