"""Brute-force truncated Fock-space oracle.

Everything here is built from explicit amplitudes and dense matrices so it
can check the closed-form fidelities independently: Kraus operators, the
operator Z = sum_l Pi_l^dagger(x) Pi_l(x + beta), lossy and dephased density
matrices, and Uhlmann fidelities by Hermitian eigendecomposition.

Two-mode (TMSVS) objects use the flattened index ``a * (cutoff + 1) + b``;
loss, dephasing and the phase generator act on mode ``a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
from scipy import special

from .errors import DomainError, NumericalError, TailMassError
from .states import ProbeState, StateKind

DEFAULT_CUTOFF = 60
DEFAULT_CUTOFF_TWO_MODE = 40
TAIL_TOL = 1e-8
PSD_TOL = 1e-10
HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class FockVector:
    amplitudes: np.ndarray
    cutoff: int
    modes: int
    tail: float

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class FockOperator:
    """Dense operator; density matrices built by this module also carry
    ``factor`` with matrix = factor @ factor^dagger."""

    matrix: np.ndarray
    cutoff: int
    modes: int = 1
    factor: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def mode_a_numbers(cutoff: int, modes: int) -> np.ndarray:
    """Photon number of mode a for every basis index."""
    n = np.arange(cutoff + 1)
    if modes == 1:
        return n
    return np.repeat(n, cutoff + 1)


def _default_cutoff(state: ProbeState) -> int:
    """Desk-scale default, raised when the state's tail needs more levels."""
    base = DEFAULT_CUTOFF_TWO_MODE if state.kind is StateKind.TMSVS else DEFAULT_CUTOFF
    if tail_mass(state, base) < TAIL_TOL:
        return base
    return required_cutoff(state, TAIL_TOL)


def _log_probs(state: ProbeState, n_max: int) -> np.ndarray:
    """log |<n|psi>|^2 (single mode) or log |<n,n|psi>|^2 for n = 0..n_max."""
    n = np.arange(n_max + 1, dtype=float)
    N = state.mean_photon_number
    if state.kind is StateKind.CS:
        if N == 0.0:
            out = np.full(n.size, -np.inf)
            out[0] = 0.0
            return out
        return -N + n * math.log(N) - special.gammaln(n + 1)
    r = state.squeezing
    if r == 0.0:
        out = np.full(n.size, -np.inf)
        out[0] = 0.0
        return out
    t = math.tanh(r)
    if state.kind is StateKind.TMSVS:
        return 2.0 * (n * math.log(t) - math.log(math.cosh(r)))
    out = np.full(n.size, -np.inf)
    k = n[::2] / 2.0
    out[::2] = (
        -math.log(math.cosh(r))
        + 2.0 * k * math.log(t)
        + special.gammaln(2.0 * k + 1)
        - 2.0 * k * math.log(2.0)
        - 2.0 * special.gammaln(k + 1)
    )
    return out


def tail_mass(state: ProbeState, cutoff: int) -> float:
    """Probability outside the truncated space, summed from the exact distribution."""
    N = state.mean_photon_number
    if state.kind is StateKind.CS:
        return float(special.gammainc(cutoff + 1, N)) if N > 0 else 0.0
    if state.kind is StateKind.TMSVS:
        t2 = math.tanh(state.squeezing) ** 2
        return t2 ** (cutoff + 1)
    if N == 0.0:
        return 0.0
    # SMSVS terms decay like tanh^2(r)^k / sqrt(k); sum until negligible
    t2 = math.tanh(state.squeezing) ** 2
    extra = int(math.ceil(80.0 / max(-math.log(t2), 1e-3))) + 64
    lp = _log_probs(state, cutoff + 2 * extra)
    return float(np.exp(lp[cutoff + 1:]).sum())


def required_cutoff(state: ProbeState, tol: float = TAIL_TOL, limit: int = 4096) -> int:
    c = 1
    while tail_mass(state, c) >= tol:
        c = c * 2 if c < 64 else c + 16
        if c > limit:
            raise TailMassError(f"{state} needs a cutoff beyond {limit}", None)
    lo = max(1, c // 2)
    while lo < c and tail_mass(state, lo) >= tol:
        lo += 1
    return lo


def fock_state(state: ProbeState, cutoff: int | None = None, tail_tol: float = TAIL_TOL) -> FockVector:
    """Normalised truncated amplitudes with the discarded tail mass reported."""
    if cutoff is None:
        cutoff = _default_cutoff(state)
    if cutoff < 1:
        raise DomainError(f"cutoff must be >= 1, got {cutoff}")
    tail = tail_mass(state, cutoff)
    if tail >= tail_tol:
        raise TailMassError(
            f"cutoff {cutoff} drops {tail:.3g} of {state}'s probability (limit {tail_tol:g})",
            required_cutoff(state, tail_tol),
        )
    amp = np.exp(0.5 * _log_probs(state, cutoff)).astype(complex)
    if state.kind is StateKind.TMSVS:
        amp = amp * (-1.0) ** np.arange(cutoff + 1)
        vec = np.zeros((cutoff + 1) ** 2, dtype=complex)
        idx = np.arange(cutoff + 1) * (cutoff + 2)  # |n, n>
        vec[idx] = amp
        modes = 2
    else:
        vec = amp
        modes = 1
    vec = vec / np.linalg.norm(vec)
    return FockVector(vec, cutoff, modes, tail)


def annihilation(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1).astype(complex)


def kraus_loss(l: int, eta: float, beta: float, lambda1: float, cutoff: int) -> FockOperator:
    """Pi_l = sqrt((1-eta)^l / l!) e^{-i beta (n - lambda1 l)} eta^{n/2} a^l, dense.

    ``beta`` sits in the encoded-phase slot (x of the Kraus family).
    """
    if not 0 <= l <= cutoff:
        raise DomainError(f"need 0 <= l <= cutoff, got l={l}")
    m = np.arange(l, cutoff + 1)
    k = m - l
    coef = np.sqrt(special.comb(m, l) * (1.0 - eta) ** l * eta ** k)
    phase = np.exp(-1j * beta * (k - lambda1 * l))
    mat = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    mat[k, m] = coef * phase
    return FockOperator(mat, cutoff)


def z_operator(eta: float, beta: float, lambda1: float, cutoff: int, x: float = 0.0,
               term_floor: float = 1e-14) -> FockOperator:
    """Explicit l-sum of Pi_l^dagger(x) Pi_l(x + beta) for l = 0..cutoff.

    Terms whose largest entry is below ``term_floor`` are dropped.
    """
    z = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    for l in range(cutoff + 1):
        p0 = kraus_loss(l, eta, x, lambda1, cutoff).matrix
        p1 = kraus_loss(l, eta, x + beta, lambda1, cutoff).matrix
        term = p0.conj().T @ p1
        if np.abs(term).max() < term_floor:
            continue
        z += term
    return FockOperator(z, cutoff)


def normal_ordered_exp(c: complex, cutoff: int) -> FockOperator:
    """:exp[(c - 1) a^dagger a]: = sum_k (c - 1)^k / k! (a^dagger)^k a^k, built term by term."""
    a = annihilation(cutoff)
    ad = a.conj().T
    out = np.eye(cutoff + 1, dtype=complex)
    left = np.eye(cutoff + 1, dtype=complex)
    right = np.eye(cutoff + 1, dtype=complex)
    coef = 1.0 + 0j
    for k in range(1, cutoff + 1):
        left = left @ ad
        right = a @ right
        coef = coef * (c - 1.0) / k
        out += coef * (left @ right)
    return FockOperator(out, cutoff)


def check_density(rho: np.ndarray, *, trace_tol: float = 1e-6, eig: bool = True) -> float:
    """Validate a density matrix; returns its minimum eigenvalue (or diagonal if ``eig`` is off)."""
    herm = np.abs(rho - rho.conj().T).max()
    if herm > HERMITIAN_TOL:
        raise NumericalError(f"density matrix not Hermitian (max asymmetry {herm:.3g})")
    tr = float(np.real(np.trace(rho)))
    if abs(tr - 1.0) > trace_tol:
        raise NumericalError(f"density matrix trace {tr!r} differs from 1")
    low = float(np.linalg.eigvalsh(rho)[0]) if eig else float(np.real(np.diag(rho)).min())
    if low < -PSD_TOL:
        raise NumericalError(f"density matrix not PSD (min eigenvalue {low:.3g})")
    return low


def _rotate(rho: np.ndarray, na: np.ndarray, x: float) -> np.ndarray:
    ph = np.exp(-1j * x * na)
    return ph[:, None] * rho * ph.conj()[None, :]


@lru_cache(maxsize=32)
def _lossy_factor(state: ProbeState, eta: float, cutoff: int) -> np.ndarray:
    """Columns Pi_l |psi> for every l that leaves a non-zero vector."""
    psi = fock_state(state, cutoff)
    d = cutoff + 1
    amps = psi.amplitudes.reshape(d, -1)  # rows: mode a
    cols = []
    for l in range(d):
        v = (kraus_loss(l, eta, 0.0, 0.0, cutoff).matrix @ amps).ravel()
        if v.any():
            cols.append(v)
    a = np.stack(cols, axis=1)
    a.setflags(write=False)
    return a


def _env_cutoff(kappa: float, n_max: int) -> int:
    mu = 2.0 * kappa * kappa * n_max * n_max
    return int(math.ceil(mu + 12.0 * math.sqrt(mu) + 40.0))


@lru_cache(maxsize=32)
def _dephasing_gram_root(kappa: float, n_max: int) -> np.ndarray:
    """R with R^dagger R = [exp(-kappa^2 (m - n)^2)]_{m,n <= n_max}.

    Column n of E holds the environment state e^{i 2 kappa n q}|0> (a coherent
    state of amplitude i sqrt(2) kappa n) in the Fock basis; R comes from a QR
    factorisation of E, so the Gram matrix itself is never formed.
    """
    cut = _env_cutoff(kappa, n_max)
    k = np.arange(cut + 1, dtype=float)[:, None]
    n = np.arange(n_max + 1, dtype=float)[None, :]
    amp = np.sqrt(2.0) * kappa * n
    with np.errstate(divide="ignore", invalid="ignore"):
        logm = -0.5 * amp * amp + k * np.log(amp) - 0.5 * special.gammaln(k + 1)
    mod = np.exp(logm)
    mod[:, 0] = 0.0
    mod[0, 0] = 1.0
    if kappa == 0.0:
        mod[:, :] = 0.0
        mod[0, :] = 1.0
    e = mod * (1j ** (k.astype(int) % 4))
    r = np.linalg.qr(e, mode="r")
    r.setflags(write=False)
    return r


def lossy_state(state: ProbeState, eta: float, x: float, cutoff: int | None = None) -> FockOperator:
    """Density matrix after encoding phase x and photon loss eta (mode a for TMSVS)."""
    if cutoff is None:
        cutoff = _default_cutoff(state)
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta!r}")
    modes = 2 if state.kind is StateKind.TMSVS else 1
    ph = np.exp(-1j * x * mode_a_numbers(cutoff, modes))
    a = ph[:, None] * _lossy_factor(state, float(eta), cutoff)
    rho = a @ a.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    check_density(rho, eig=rho.shape[0] <= 256)
    return FockOperator(rho, cutoff, modes, a)


def dephased_state(state: ProbeState, kappa: float, x: float, cutoff: int | None = None) -> FockOperator:
    """rho_mn e^{-i x (m - n) - kappa^2 (m - n)^2}, m and n counting mode-a photons."""
    if cutoff is None:
        cutoff = _default_cutoff(state)
    if kappa < 0.0:
        raise DomainError(f"kappa must be >= 0, got {kappa!r}")
    psi = fock_state(state, cutoff)
    modes = psi.modes
    na = mode_a_numbers(cutoff, modes)
    dn = na[:, None] - na[None, :]
    rho = np.outer(psi.amplitudes, psi.amplitudes.conj()) * np.exp(-1j * x * dn - kappa**2 * dn**2)
    check_density(rho, eig=rho.shape[0] <= 256)
    # factor: psi_i e^{-i x n_i} times column n_i of the Gram root
    live = np.nonzero(np.abs(psi.amplitudes) > 0.0)[0]
    r = _dephasing_gram_root(float(kappa), int(na[live].max()))
    a = np.zeros((rho.shape[0], r.shape[0]), dtype=complex)
    a[live] = (psi.amplitudes[live] * np.exp(-1j * x * na[live]))[:, None] * r[:, na[live]].T
    return FockOperator(rho, cutoff, modes, a)


def _as_matrix(rho) -> np.ndarray:
    m = rho.matrix if isinstance(rho, FockOperator) else np.asarray(rho)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError("density matrix must be square")
    return m


class UhlmannReference:
    """Eigendecomposition of a reference state, reused across fidelity queries.

    Basis vectors with an exactly zero diagonal entry are outside the support
    of a PSD matrix and are dropped before diagonalising. Eigenvalues below
    the round-off floor ``dim * eps * max_eigenvalue`` count as zero.
    """

    def __init__(self, rho):
        m = _as_matrix(rho)
        diag = np.real(np.diag(m))
        if diag.min() < -PSD_TOL:
            raise DomainError(f"not a density matrix (diagonal entry {diag.min():.3g})")
        self.shape = m.shape
        self.support = np.nonzero(diag > 0.0)[0]
        sub = m[np.ix_(self.support, self.support)]
        w, v = sla.eigh(sub)
        if w[0] < -PSD_TOL:
            raise DomainError(f"not positive semidefinite (min eigenvalue {w[0]:.3g})")
        floor = max(sub.shape[0] * np.finfo(float).eps * max(w[-1], 0.0), 0.0)
        keep = w > floor
        self.eigenvalues = w[keep]
        self._v = v[:, keep]
        self._sqrt_w = np.sqrt(self.eigenvalues)

    @property
    def rank(self) -> int:
        return self.eigenvalues.size

    def fidelity(self, rho) -> float:
        m = _as_matrix(rho)
        if m.shape != self.shape:
            raise DomainError(f"shape mismatch {m.shape} vs {self.shape}")
        diag = np.real(np.diag(m))
        if diag.min() < -PSD_TOL:
            raise DomainError(f"not a density matrix (diagonal entry {diag.min():.3g})")
        sub = m[np.ix_(self.support, self.support)]
        b = self._v.conj().T @ sub @ self._v
        core = self._sqrt_w[:, None] * b * self._sqrt_w[None, :]
        core = 0.5 * (core + core.conj().T)
        mu = np.linalg.eigvalsh(core)
        if mu[0] < -PSD_TOL:
            raise DomainError(f"second argument not PSD (min eigenvalue {mu[0]:.3g})")
        return float(np.sum(np.sqrt(np.clip(mu, 0.0, None))) ** 2)


def uhlmann_fidelity(rho1, rho2, *, method: str = "auto") -> float:
    """(Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2.

    ``method="eig"`` diagonalises rho1 (see :class:`UhlmannReference`).
    ``method="factor"`` needs both operators to carry ``factor`` A, B with
    rho1 = A A^dagger, rho2 = B B^dagger and returns ||A^dagger B||_1^2; this
    avoids square roots of round-off eigenvalues. ``"auto"`` picks ``factor``
    when available.
    """
    has_factors = all(isinstance(r, FockOperator) and r.factor is not None for r in (rho1, rho2))
    if method == "auto":
        method = "factor" if has_factors else "eig"
    if method == "eig":
        return UhlmannReference(rho1).fidelity(rho2)
    if method != "factor":
        raise DomainError(f"unknown fidelity method {method!r}")
    if not has_factors:
        raise DomainError("factor method needs FockOperators carrying a factor")
    if rho1.matrix.shape != rho2.matrix.shape:
        raise DomainError(f"shape mismatch {rho1.matrix.shape} vs {rho2.matrix.shape}")
    s = np.linalg.svd(rho1.factor.conj().T @ rho2.factor, compute_uv=False)
    return float(np.sum(s) ** 2)


def generator_overlap(state: ProbeState, angle: float, cutoff: int | None = None) -> complex:
    """<psi| e^{i angle n_a} |psi> from truncated amplitudes."""
    psi = fock_state(state, cutoff)
    na = mode_a_numbers(psi.cutoff, psi.modes)
    p = np.abs(psi.amplitudes) ** 2
    return complex(np.sum(p * np.exp(1j * angle * na)))


def purified_overlap_diffusion(state: ProbeState, kappa: float, beta: float, lambda2: float,
                               cutoff: int | None = None) -> float:
    """|e^{-beta^2 lambda2^2 / (16 kappa^2)} <psi| e^{i beta (lambda2 - 1) n} |psi>|^2."""
    if not kappa > 0.0:
        raise DomainError(f"kappa must be > 0, got {kappa!r}")
    env = math.exp(-(beta * lambda2) ** 2 / (16.0 * kappa**2))
    return abs(env * generator_overlap(state, beta * (lambda2 - 1.0), cutoff)) ** 2


def purified_overlap_explicit(state: ProbeState, kappa: float, beta: float, lambda2: float,
                              cutoff: int | None = None, env_cutoff: int | None = None,
                              x: float = 0.0) -> float:
    """Same overlap with the environment mode simulated explicitly.

    |Psi(x)> = u(x) e^{-i x n} e^{i 2 kappa n q_E} |psi>|0_E>,  u(x) = e^{i x lambda2 p_E / (2 kappa)},
    with q_E, p_E truncated to ``env_cutoff`` levels and exponentiated numerically.
    Photon numbers carrying less than 1e-18 probability are skipped; the
    default ``env_cutoff`` covers the largest displacement among the rest.
    """
    if not kappa > 0.0:
        raise DomainError(f"kappa must be > 0, got {kappa!r}")
    psi = fock_state(state, cutoff)
    na = mode_a_numbers(psi.cutoff, psi.modes)
    if env_cutoff is None:
        probs = np.abs(psi.amplitudes) ** 2
        n_top = int(na[probs >= 1e-18].max())
        shift = (abs(x) + abs(beta)) * abs(lambda2) / (2.0 * kappa)
        mu = 0.5 * ((2.0 * kappa * n_top) ** 2 + shift * shift)
        env_cutoff = int(math.ceil(mu + 12.0 * math.sqrt(mu) + 40.0))
    a = annihilation(env_cutoff)
    q = (a + a.conj().T) / math.sqrt(2.0)
    p = (a - a.conj().T) / (1j * math.sqrt(2.0))
    sq, vq = np.linalg.eigh(q)
    sp, vp = np.linalg.eigh(p)
    vac = np.zeros(env_cutoff + 1, dtype=complex)
    vac[0] = 1.0

    def env_state(n, xx):
        e = vq @ (np.exp(1j * 2.0 * kappa * n * sq) * (vq.conj().T @ vac))
        return vp @ (np.exp(1j * xx * lambda2 * sp / (2.0 * kappa)) * (vp.conj().T @ e))

    total = 0j
    probs = np.abs(psi.amplitudes) ** 2
    for n in np.unique(na[probs > 0.0]):
        w = probs[na == n].sum()
        if w < 1e-18:
            continue
        e0 = env_state(n, x)
        e1 = env_state(n, x + beta)
        total += w * np.exp(1j * x * n) * np.exp(-1j * (x + beta) * n) * np.vdot(e0, e1)
    return abs(total) ** 2
