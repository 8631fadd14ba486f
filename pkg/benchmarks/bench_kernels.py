"""Compare the numba kernels with the pure-numpy fallback.

Run ``python benchmarks/bench_kernels.py`` (add ``--campaign`` for an
end-to-end timing of a short campaign under each backend).
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from opconvex import _kernels
from opconvex.core import random_pd_array


def _cases(dim, rng):
    X = random_pd_array(dim, 1e4, rng)
    Y = random_pd_array(dim, 1e4, rng)
    Ks = (rng.standard_normal((3, dim, dim)) + 1j * rng.standard_normal((3, dim, dim))) / np.sqrt(2)
    params = np.array([0.5])
    mix = np.array([0.3, 0.2, 1.0, 0.5, 2.0, 3.0])
    return {
        "spectral_apply(power)": lambda b: b.spectral_apply(X, _kernels.POWER, params),
        "spectral_apply(mixture)": lambda b: b.spectral_apply(X, _kernels.MONOTONE_MIXTURE, mix),
        "loewner_margins": lambda b: b.loewner_margins(X, Y),
        "congruence_sum(k=3)": lambda b: b.congruence_sum(X, Ks),
        "eigvalsh": lambda b: b.eigvalsh(X),
    }


def bench(dims=(2, 4, 8, 16), number=2000):
    backends = [_kernels.numpy_backend]
    if _kernels.numba_backend is not None:
        backends.append(_kernels.numba_backend)
    rng = np.random.default_rng(0)
    rows = []
    for dim in dims:
        for name, fn in _cases(dim, rng).items():
            times = {}
            for b in backends:
                fn(b)  # warm up / compile
                best = min(timeit.repeat(lambda: fn(b), number=number, repeat=3))
                times[b.name] = best / number * 1e6
            rows.append((dim, name, times))
    return rows


def campaign_timing(trials):
    code = ("import time; from opconvex.verifier.campaign import CampaignConfig, run_campaign;"
            f"cfg = CampaignConfig(trials_per_check={trials}, controls=False);"
            "run_campaign(CampaignConfig(trials_per_check=1, controls=False));"
            "t = time.perf_counter(); run_campaign(cfg); print(time.perf_counter() - t)")
    out = {}
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, OPCONVEX_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        out[label] = float(res.stdout.strip().splitlines()[-1])
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--number", type=int, default=2000)
    ap.add_argument("--campaign", action="store_true")
    ap.add_argument("--trials", type=int, default=20)
    args = ap.parse_args()

    print(f"{'dim':>4}  {'kernel':<26}{'numpy us':>10}{'numba us':>10}{'speedup':>9}")
    for dim, name, t in bench(number=args.number):
        nb = t.get("numba")
        speed = f"{t['numpy'] / nb:8.2f}x" if nb else "      n/a"
        print(f"{dim:>4}  {name:<26}{t['numpy']:>10.2f}{(nb or float('nan')):>10.2f}{speed}")
    if args.campaign:
        t = campaign_timing(args.trials)
        print(f"campaign ({args.trials} trials/check): numba {t['numba']:.2f}s, numpy {t['numpy']:.2f}s")


if __name__ == "__main__":
    main()
