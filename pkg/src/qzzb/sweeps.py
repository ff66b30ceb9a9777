"""Parameter sweeps over (state, N, strength) and their table output.

Output files are deterministic: floats carry 17 significant digits, column
order is fixed and lines end in LF, so identical configurations give
byte-identical files whatever the thread scheduling.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ._version import __version__
from .bounds import BoundForm, generalized_fidelity, zzb_sine_relaxed, zzb_tight
from .errors import DomainError, NumericalError
from .fidelity import FidelityModel, fidelity_curve
from .states import (
    ChannelKind,
    NoiseChannel,
    PriorWindow,
    StateKind,
    make_probe,
    parse_channel_kind,
    parse_state_kind,
)

TOOL = "qzzb"
MIN_BETA_SAMPLES = 64
DEFAULT_BETA_SAMPLES = 1024


class SweepForm(enum.Enum):
    TIGHT = "tight"
    SINE_RELAXED = "sine"
    BOTH = "both"


class OutputFormat(enum.Enum):
    CSV = "csv"
    JSON = "json"


def parse_sweep_form(value) -> SweepForm:
    if isinstance(value, SweepForm):
        return value
    if isinstance(value, BoundForm) and value is not BoundForm.CLOSED_FORM_CS:
        return SweepForm(value.value)
    aliases = {"tight": "tight", "sine": "sine", "sine_relaxed": "sine", "sinerelaxed": "sine", "relaxed": "sine", "both": "both"}
    try:
        return SweepForm(aliases[str(value).strip().lower()])
    except KeyError:
        raise DomainError(f"unknown bound form {value!r} (expected tight, sine or both)") from None


def parse_format(value) -> OutputFormat:
    if isinstance(value, OutputFormat):
        return value
    try:
        return OutputFormat(str(value).strip().lower())
    except ValueError:
        raise DomainError(f"unknown output format {value!r} (expected csv or json)") from None


def _grid(name, values):
    try:
        g = tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a list of numbers, got {values!r}") from None
    if not g:
        raise DomainError(f"{name} must not be empty")
    if not all(math.isfinite(v) for v in g):
        raise DomainError(f"{name} must be finite")
    if any(b <= a for a, b in zip(g, g[1:])):
        raise DomainError(f"{name} must be strictly increasing, got {list(g)}")
    return g


@dataclass(frozen=True)
class SweepConfig:
    """Everything that determines a sweep's output file."""

    states: tuple = (StateKind.CS, StateKind.SMSVS, StateKind.TMSVS)
    channel: ChannelKind = ChannelKind.PHOTON_LOSS
    strength_grid: tuple = (1.0,)
    n_grid: tuple = (5.0,)
    window: PriorWindow = field(default_factory=PriorWindow)
    beta_samples: int = DEFAULT_BETA_SAMPLES
    bound_form: SweepForm = SweepForm.SINE_RELAXED
    output_path: str | None = None
    format: OutputFormat = OutputFormat.CSV

    def __post_init__(self):
        states = tuple(parse_state_kind(s) for s in self.states)
        if not states:
            raise DomainError("states must not be empty")
        if len(set(states)) != len(states):
            raise DomainError("states must not repeat")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "channel", parse_channel_kind(self.channel))
        object.__setattr__(self, "strength_grid", _grid("strength_grid", self.strength_grid))
        object.__setattr__(self, "n_grid", _grid("n_grid", self.n_grid))
        if not isinstance(self.window, PriorWindow):
            object.__setattr__(self, "window", PriorWindow(float(self.window)))
        if isinstance(self.beta_samples, bool) or int(self.beta_samples) != self.beta_samples:
            raise DomainError(f"beta_samples must be an integer, got {self.beta_samples!r}")
        object.__setattr__(self, "beta_samples", int(self.beta_samples))
        if self.beta_samples < MIN_BETA_SAMPLES:
            raise DomainError(f"beta_samples must be >= {MIN_BETA_SAMPLES}, got {self.beta_samples}")
        object.__setattr__(self, "bound_form", parse_sweep_form(self.bound_form))
        object.__setattr__(self, "format", parse_format(self.format))
        if self.output_path is not None:
            object.__setattr__(self, "output_path", os.fspath(self.output_path))
        for n in self.n_grid:
            if n < 0.0:
                raise DomainError(f"mean photon numbers must be >= 0, got {n!r}")
        for s in self.strength_grid:
            NoiseChannel(self.channel, s)  # validates the strength range

    def to_dict(self) -> dict:
        return {
            "states": [s.name.lower() for s in self.states],
            "channel": self.channel.value,
            "strength_grid": list(self.strength_grid),
            "n_grid": list(self.n_grid),
            "window": {"width": self.window.width, "mean": self.window.mean},
            "beta_samples": self.beta_samples,
            "bound_form": self.bound_form.value,
            "output_path": self.output_path,
            "format": self.format.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        if not isinstance(data, dict):
            raise DomainError("sweep configuration must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise DomainError(f"unknown configuration keys: {', '.join(unknown)}")
        kw = dict(data)
        if "window" in kw:
            w = kw["window"]
            kw["window"] = PriorWindow(**w) if isinstance(w, dict) else PriorWindow(float(w))
        return cls(**kw)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SweepConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"configuration is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "SweepConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise OSError(f"cannot read configuration {os.fspath(path)!r}: {exc.strerror}") from exc
        return cls.from_json(text)


@dataclass(frozen=True)
class SweepRow:
    state: StateKind
    n: float
    channel: ChannelKind
    strength: float
    zzb_tight: float | None = None
    zzb_sine: float | None = None
    lambda_min: float | None = None
    lambda_median: float | None = None
    lambda_max: float | None = None
    quadrature_error: float | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def sort_key(self):
        return (int(self.state), self.n, self.strength)


COLUMNS = (
    "state", "N", "channel", "strength", "zzb_tight", "zzb_sine",
    "lambda_min", "lambda_median", "lambda_max", "quadrature_error", "error",
)


def _row_values(row: SweepRow):
    return (
        row.state.name.lower(), row.n, row.channel.value, row.strength, row.zzb_tight,
        row.zzb_sine, row.lambda_min, row.lambda_median, row.lambda_max,
        row.quadrature_error, row.error,
    )


def _evaluate_row(config: SweepConfig, kind: StateKind, n: float, strength: float) -> SweepRow:
    base = dict(state=kind, n=n, channel=config.channel, strength=strength)
    try:
        state = make_probe(kind, n)
        channel = NoiseChannel(config.channel, strength)
        model = FidelityModel(state, channel)
        w = config.window.width
        ceiling = w * w / 12.0
        values = {}
        errors = []
        if config.bound_form in (SweepForm.TIGHT, SweepForm.BOTH):
            r = zzb_tight(model, config.window)
            values["zzb_tight"] = r.value
            errors.append(r.quadrature_error_estimate)
        if config.bound_form in (SweepForm.SINE_RELAXED, SweepForm.BOTH):
            r = zzb_sine_relaxed(model, config.window)
            values["zzb_sine"] = r.value
            errors.append(r.quadrature_error_estimate)
        for name, v in values.items():
            if not (0.0 <= v <= ceiling * (1.0 + 1e-12)):
                raise NumericalError(f"{name} = {v!r} outside [0, W^2/12 = {ceiling!r}]")
        betas = np.linspace(0.0, w, config.beta_samples)[1:]
        _, lam = model.evaluate(betas)
        if not np.all(np.isfinite(lam)):
            raise NumericalError("non-finite optimal variational parameter")
        return SweepRow(
            **base, **values,
            lambda_min=float(lam.min()),
            lambda_median=float(np.median(lam)),
            lambda_max=float(lam.max()),
            quadrature_error=float(max(errors)),
        )
    except (NumericalError, DomainError, FloatingPointError, ValueError) as exc:
        return SweepRow(**base, error=f"{type(exc).__name__}: {exc}")


def run_sweep(config: SweepConfig, *, workers: int | None = None) -> list[SweepRow]:
    """Evaluate every (state, N, strength) combination.

    Rows run concurrently and come back sorted by (state, N, strength).
    A numerical failure turns into a row with ``error`` set; other rows are
    unaffected.
    """
    jobs = [(k, n, s) for k in config.states for n in config.n_grid for s in config.strength_grid]
    if workers is None:
        workers = min(len(jobs), os.cpu_count() or 1)
    if workers <= 1:
        rows = [_evaluate_row(config, *j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda j: _evaluate_row(config, *j), jobs))
    return sorted(rows, key=SweepRow.sort_key)


# ---------------------------------------------------------------- formatting

def format_number(x) -> str:
    """17 significant digits; nan/inf spelled out for CSV."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        if any(c in v for c in ',"\n\r'):
            return '"' + v.replace('"', '""').replace("\r", " ").replace("\n", " ") + '"'
        return v
    return format_number(v)


def _meta_value(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(_meta_value(x) for x in v)
    if isinstance(v, dict):
        return ";".join(f"{k}:{_meta_value(x)}" for k, x in v.items())
    if v is None:
        return ""
    if isinstance(v, str):
        return v.replace("\n", " ")
    return format_number(v)


def _json_value(v, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_number(v) if math.isfinite(v) else "null"
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(x, indent, level + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        items = [pad + _json_value(x, indent, level + 1) for x in v]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(v).__name__}")


def dumps_json(obj, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits and non-finite floats as null."""
    return _json_value(obj, indent, 0) + "\n"


def render_table(meta: dict, columns, rows, fmt: OutputFormat) -> str:
    """Serialise a metadata block plus rows (sequences aligned with ``columns``)."""
    fmt = parse_format(fmt)
    if fmt is OutputFormat.JSON:
        body = {"meta": meta, "rows": [dict(zip(columns, r)) for r in rows]}
        return dumps_json(body)
    out = io.StringIO()
    for k, v in meta.items():
        out.write(f"# {k}={_meta_value(v)}\n")
    out.write(",".join(columns) + "\n")
    for r in rows:
        out.write(",".join(_csv_cell(v) for v in r) + "\n")
    return out.getvalue()


def write_text(path, text: str) -> None:
    """Write with LF line endings; OSError messages name the path."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {os.fspath(path)!r}: {exc.strerror}") from exc


def sweep_meta(config: SweepConfig) -> dict:
    meta = {"tool": TOOL, "version": __version__, "kind": "sweep"}
    meta.update(config.to_dict())
    meta.pop("output_path")
    return meta


def render_sweep(config: SweepConfig, rows) -> str:
    return render_table(sweep_meta(config), COLUMNS, [_row_values(r) for r in rows], config.format)


def write_sweep(config: SweepConfig, rows, path=None) -> str:
    text = render_sweep(config, rows)
    path = path if path is not None else config.output_path
    if path is not None:
        write_text(path, text)
    return text


# ---------------------------------------------------------------- curves

def curve_table(state_kind, channel_kind, strength: float, n: float,
                window: PriorWindow = PriorWindow(), beta_samples: int = DEFAULT_BETA_SAMPLES):
    """(meta, rows) for the generalized fidelity on ``beta_samples`` points of [0, W]."""
    if beta_samples < 3:
        raise DomainError(f"beta_samples must be >= 3, got {beta_samples}")
    state = make_probe(state_kind, n)
    channel = NoiseChannel(parse_channel_kind(channel_kind), strength)
    betas = np.linspace(0.0, window.width, int(beta_samples))
    curve = fidelity_curve(state, channel, betas)
    gf = generalized_fidelity(curve, window)
    if np.any(gf.values < 0.0) or not np.all(np.isfinite(gf.values)):
        raise NumericalError("generalized fidelity must be finite and non-negative")
    bound = zzb_sine_relaxed(curve, window)
    meta: dict[str, Any] = {
        "tool": TOOL,
        "version": __version__,
        "kind": "curve",
        "state": state.kind.name.lower(),
        "N": float(n),
        "channel": channel.kind.value,
        "strength": float(strength),
        "window": {"width": window.width, "mean": window.mean},
        "beta_samples": int(beta_samples),
        "zzb_sine": bound.value,
    }
    rows = list(zip(gf.betas.tolist(), gf.values.tolist()))
    return meta, rows


def emit_curve(state_kind, channel_kind, strength: float, n: float,
               window: PriorWindow = PriorWindow(), beta_samples: int = DEFAULT_BETA_SAMPLES,
               path=None, format=OutputFormat.CSV) -> str:
    """Write the (beta, F~(beta)) table; returns the rendered text."""
    meta, rows = curve_table(state_kind, channel_kind, strength, n, window, beta_samples)
    text = render_table(meta, ("beta", "F_tilde"), rows, format)
    if path is not None:
        write_text(path, text)
    return text


def read_table(text: str):
    """Parse a CSV table back into (meta strings, header, rows of strings)."""
    meta = {}
    lines = text.split("\n")
    i = 0
    while i < len(lines) and lines[i].startswith("# "):
        k, _, v = lines[i][2:].partition("=")
        meta[k] = v
        i += 1
    header = lines[i].split(",")
    rows = list(csv.reader([ln for ln in lines[i + 1:] if ln]))
    return meta, header, rows
