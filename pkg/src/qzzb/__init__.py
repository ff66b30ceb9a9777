"""Quantum Ziv-Zakai bounds for phase estimation with coherent, single-mode
squeezed vacuum and two-mode squeezed vacuum probes under photon loss and
phase diffusion."""

from ._backend import BACKEND
from ._version import __version__
from .bounds import (
    BoundForm,
    BoundResult,
    GeneralizedFidelity,
    crossover_kappa,
    generalized_fidelity,
    zzb_bound,
    zzb_cs_loss_closed_form,
    zzb_sine_relaxed,
    zzb_tight,
)
from .errors import BracketError, DomainError, NumericalError, TailMassError
from .fidelity import (
    DiffusionKernel,
    FidelityCurve,
    FidelityModel,
    LossKernel,
    fidelity_curve,
    fq_diffusion,
    fq_loss,
    ideal_fidelity,
    maximize_lambda,
)
from .special import dawson, erfi
from .states import (
    IDEAL,
    ChannelKind,
    NoiseChannel,
    PriorWindow,
    ProbeState,
    StateKind,
    make_channel,
    make_probe,
)
from .sweeps import SweepConfig, SweepRow, emit_curve, run_sweep

__all__ = [
    "BACKEND", "__version__",
    "BoundForm", "BoundResult", "GeneralizedFidelity", "crossover_kappa", "generalized_fidelity",
    "zzb_bound", "zzb_cs_loss_closed_form", "zzb_sine_relaxed", "zzb_tight",
    "BracketError", "DomainError", "NumericalError", "TailMassError",
    "DiffusionKernel", "FidelityCurve", "FidelityModel", "LossKernel", "fidelity_curve",
    "fq_diffusion", "fq_loss", "ideal_fidelity", "maximize_lambda",
    "dawson", "erfi",
    "IDEAL", "ChannelKind", "NoiseChannel", "PriorWindow", "ProbeState", "StateKind",
    "make_channel", "make_probe",
    "SweepConfig", "SweepRow", "emit_curve", "run_sweep",
]
