"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--sizes 1,64,4096]

Times the two maximisers on batches of beta values and one full bound
integral per backend, and checks that both backends return the same numbers.
"""

import argparse
import math
import time

import numpy as np

from qzzb._backend import available_backends, get_backend

STATES = {"cs": 0, "smsvs": 1, "tmsvs": 2}


def best_of(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", default="1,64,4096")
    ap.add_argument("--n", type=float, default=5.0)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = {name: get_backend(name) for name in available_backends()}
    if "cython" not in backends:
        print("compiled backend not built; timing the numpy backend only")

    cases = [
        ("loss", "maximize_loss", 0.5),
        ("diffusion", "maximize_diffusion", 0.2),
    ]
    header = f"{'channel':<10} {'state':<6} {'batch':>6} " + " ".join(f"{b + ' [ms]':>13}" for b in backends)
    if len(backends) > 1:
        header += f" {'speedup':>8} {'max |df|':>10}"
    print(header)
    for channel, fn_name, strength in cases:
        for state, kind in STATES.items():
            for size in sizes:
                betas = np.linspace(0.01, 2.0 * math.pi, size)
                times = {}
                results = {}
                for name, mod in backends.items():
                    fn = getattr(mod, fn_name)
                    results[name] = fn(kind, args.n, strength, betas)[0]
                    times[name] = best_of(lambda: fn(kind, args.n, strength, betas), args.repeat)
                line = f"{channel:<10} {state:<6} {size:>6} " + " ".join(
                    f"{1e3 * times[b]:>13.3f}" for b in backends
                )
                if len(backends) > 1:
                    dev = float(np.max(np.abs(results["cython"] - results["python"])))
                    line += f" {times['python'] / times['cython']:>8.1f} {dev:>10.1e}"
                print(line)

    # one adaptive integral per backend: the quadrature calls the maximiser in batches
    from qzzb import bounds, fidelity
    from qzzb.states import make_channel, make_probe

    print()
    print("full sine-relaxed bound, TMSVS N=5, diffusion kappa=0.2")
    original = fidelity.kernels
    try:
        for name, mod in backends.items():
            fidelity.kernels = mod
            state = make_probe("tmsvs", args.n)
            ch = make_channel("diffusion", 0.2)
            value = bounds.zzb_bound(state, ch).value
            t = best_of(lambda: bounds.zzb_bound(state, ch), args.repeat)
            print(f"  {name:<7} {1e3 * t:9.2f} ms   value {value:.15f}")
    finally:
        fidelity.kernels = original


if __name__ == "__main__":
    main()
