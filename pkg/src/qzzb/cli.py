"""Command-line front end: ``qzzb sweep|curve|crossover|verify``.

Exit status: 0 success, 1 usage or I/O error, 2 numerical failure (including
any sweep row that recorded an error), 3 verification failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from ._backend import BACKEND
from ._version import __version__
from .bounds import BoundForm, crossover_kappa
from .errors import BracketError, DomainError, NumericalError
from .states import ChannelKind, PriorWindow, make_probe, parse_state_kind
from .sweeps import (
    DEFAULT_BETA_SAMPLES,
    SweepConfig,
    SweepForm,
    dumps_json,
    emit_curve,
    parse_format,
    parse_sweep_form,
    render_table,
    run_sweep,
    write_sweep,
    write_text,
)
from .verify import verify

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad input; usage errors here are 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_grid(text: str) -> list[float]:
    """``a,b,c`` or ``start:stop:count`` (inclusive, evenly spaced)."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1 or (count == 1 and start != stop):
                raise ValueError
            return np.linspace(start, stop, count).tolist()
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad grid {text!r}: use 'a,b,c' or 'start:stop:count'") from None


def parse_window(text: str) -> float:
    """Width in radians; ``2pi`` style multiples of pi are accepted."""
    t = text.strip().lower().replace(" ", "")
    try:
        if t.endswith("pi"):
            head = t[:-2].rstrip("*")
            return (float(head) if head else 1.0) * math.pi
        return float(t)
    except ValueError:
        raise UsageError(f"bad window width {text!r}") from None


def _add_common(p, *, many_states=True, grids=True):
    p.add_argument("--state", help="probe state(s): cs, smsvs, tmsvs" + (" (comma list)" if many_states else ""))
    p.add_argument("--channel", help="loss or diffusion")
    if grids:
        p.add_argument("--strength", help="eta (loss) or kappa (diffusion): list or start:stop:count")
        p.add_argument("--n", help="mean photon number(s): list or start:stop:count")
    p.add_argument("--window", help="prior width W in radians (default 2pi)")
    p.add_argument("--beta-samples", type=int, help="beta grid size")
    p.add_argument("--bound-form", help="tight, sine or both")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", help="csv or json")
    p.add_argument("--config", help="JSON sweep configuration; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qzzb", description="Quantum Ziv-Zakai bounds for noisy phase estimation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("sweep", help="bounds over a (state, N, strength) grid")
    _add_common(p)
    p.add_argument("--workers", type=int, help="concurrent rows (default: CPU count)")
    p.add_argument("--dump-config", action="store_true", help="print the resolved configuration and exit")

    p = sub.add_parser("curve", help="generalized fidelity table for one configuration")
    _add_common(p, many_states=False)

    p = sub.add_parser("crossover", help="diffusion strength where two probes' bounds cross")
    p.add_argument("--state", default="cs,tmsvs", help="two probe states (default cs,tmsvs)")
    p.add_argument("--n", default="5", help="mean photon number (default 5)")
    p.add_argument("--bracket", default="0.2,0.6", help="kappa bracket lo,hi (default 0.2,0.6)")
    p.add_argument("--window", help="prior width W in radians (default 2pi)")
    p.add_argument("--bound-form", default="sine", help="tight or sine (default sine)")
    p.add_argument("--xtol", type=float, default=1e-4, help="bisection tolerance on kappa")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", default="csv", help="csv or json")

    p = sub.add_parser("verify", help="run the oracle self-check suite")
    p.add_argument("--out", help="JSON report path (default: stdout)")
    p.add_argument("--tolerance-scale", type=float, default=1.0,
                   help="multiply every check tolerance (testing aid)")
    return parser


def resolve_config(args) -> SweepConfig:
    """Defaults, then ``--config``, then explicit flags."""
    data = SweepConfig().to_dict()
    if args.config:
        data.update(SweepConfig.load(args.config).to_dict())
    if args.state is not None:
        data["states"] = [s for s in args.state.split(",") if s.strip()]
    if args.channel is not None:
        data["channel"] = args.channel
    if getattr(args, "strength", None) is not None:
        data["strength_grid"] = parse_grid(args.strength)
    if getattr(args, "n", None) is not None:
        data["n_grid"] = parse_grid(args.n)
    if args.window is not None:
        data["window"] = {"width": parse_window(args.window), "mean": data["window"]["mean"]}
    if args.beta_samples is not None:
        data["beta_samples"] = args.beta_samples
    if args.bound_form is not None:
        data["bound_form"] = args.bound_form
    if args.out is not None:
        data["output_path"] = args.out
    if args.format is not None:
        data["format"] = args.format
    return SweepConfig.from_dict(data)


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        write_text(path, text)


def cmd_sweep(args) -> int:
    config = resolve_config(args)
    if args.dump_config:
        sys.stdout.write(config.to_json())
        return EXIT_OK
    if args.workers is not None and args.workers < 1:
        raise UsageError("--workers must be >= 1")
    rows = run_sweep(config, workers=args.workers)
    text = write_sweep(config, rows)
    if config.output_path is None:
        sys.stdout.write(text)
    failed = [r for r in rows if not r.ok]
    for r in failed:
        print(f"qzzb: row {r.state.name.lower()} N={r.n:g} strength={r.strength:g}: {r.error}", file=sys.stderr)
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_curve(args) -> int:
    config = resolve_config(args)
    if len(config.states) != 1 or len(config.n_grid) != 1 or len(config.strength_grid) != 1:
        raise UsageError("curve needs exactly one --state, one --n and one --strength")
    samples = args.beta_samples if args.beta_samples is not None else DEFAULT_BETA_SAMPLES
    if config.bound_form is not SweepForm.SINE_RELAXED and args.bound_form is not None:
        raise UsageError("curve tabulates the sine-relaxed integrand; --bound-form must be sine")
    text = emit_curve(
        config.states[0], config.channel, config.strength_grid[0], config.n_grid[0],
        config.window, samples, None, config.format,
    )
    _emit(text, config.output_path)
    return EXIT_OK


def cmd_crossover(args) -> int:
    states = [parse_state_kind(s) for s in args.state.split(",") if s.strip()]
    if len(states) != 2:
        raise UsageError("crossover needs exactly two states, e.g. --state cs,tmsvs")
    n = parse_grid(args.n)
    if len(n) != 1:
        raise UsageError("crossover takes a single --n")
    bracket = parse_grid(args.bracket)
    if len(bracket) != 2:
        raise UsageError("--bracket takes two values lo,hi")
    form = parse_sweep_form(args.bound_form)
    if form is SweepForm.BOTH:
        raise UsageError("crossover needs --bound-form tight or sine")
    window = PriorWindow(parse_window(args.window)) if args.window else PriorWindow()
    make_probe(states[0], n[0])  # validates N
    kappa = crossover_kappa(states[0], states[1], n[0], tuple(bracket), window=window,
                            form=BoundForm(form.value), xtol=args.xtol)
    meta = {
        "tool": "qzzb",
        "version": __version__,
        "kind": "crossover",
        "states": [s.name.lower() for s in states],
        "channel": ChannelKind.PHASE_DIFFUSION.value,
        "N": n[0],
        "bracket": bracket,
        "bound_form": form.value,
        "window": {"width": window.width, "mean": window.mean},
        "xtol": args.xtol,
    }
    text = render_table(meta, ("kappa",), [(kappa,)], parse_format(args.format))
    _emit(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify(args.out, tolerance_scale=args.tolerance_scale)
    if args.out is None:
        sys.stdout.write(dumps_json(report))
    for c in report["checks"]:
        if not c["passed"]:
            print(f"qzzb: check {c['name']} failed: residual {c['residual']!r} > {c['tolerance']!r}",
                  file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


COMMANDS = {"sweep": cmd_sweep, "curve": cmd_curve, "crossover": cmd_crossover, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); nothing left to report
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except (UsageError, DomainError, BracketError) as exc:
        print(f"qzzb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"qzzb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ArithmeticError) as exc:
        print(f"qzzb: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
