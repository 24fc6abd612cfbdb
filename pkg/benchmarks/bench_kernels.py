"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on the same seeded inputs under both backends; outputs are
checked for equality before timings are reported.  The last row times a full
``chern build`` in a subprocess per backend.
"""
import argparse
import os
import random
import subprocess
import sys
import tempfile
import timeit
from fractions import Fraction

from morava_chern import _kernels_py

try:
    from morava_chern import _kernels as _compiled
except ImportError:
    _compiled = None


def _series(rng, nvars, deg, size, rational):
    out = {}
    while len(out) < size:
        e = tuple(rng.randint(0, deg) for _ in range(nvars))
        if sum(e) and sum(e) <= deg:
            v = rng.randint(-9, 9) or 1
            out[e] = Fraction(v, rng.randint(1, 6)) if rational else v
    return out


def workloads(seed=0):
    rng = random.Random(seed)
    a = _series(rng, 3, 10, 120, True)
    b = _series(rng, 3, 10, 120, True)
    am = {e: int(c.numerator) % 3 for e, c in a.items()}
    bm = {e: int(c.numerator) % 3 for e, c in b.items()}
    mat_p = [[rng.randrange(3) for _ in range(60)] for _ in range(70)]
    mat_z = [[rng.randint(-3, 3) for _ in range(28)] for _ in range(32)]
    return {
        "mul_terms Q (3 vars, D=12)": ("mul_terms", (a, b, (1, 1, 1), 12, None)),
        "mul_terms F_3 (3 vars, D=12)": ("mul_terms", (am, bm, (1, 1, 1), 12, 3)),
        "rref_mod_p 70x60 over F_3": ("rref_mod_p", (mat_p, 60, 3)),
        "echelon_int 32x28 (Bareiss)": ("echelon_int", (mat_z, 28)),
    }


def _copy(args):
    return tuple([list(r) for r in x] if isinstance(x, list) else x for x in args)


def bench_kernel(module, name, args, repeat):
    fn = getattr(module, name)
    best = min(timeit.repeat(lambda: fn(*_copy(args)), number=1, repeat=repeat))
    return best, fn(*_copy(args))


def bench_build(pure, repeat):
    env = dict(os.environ)
    if pure:
        env["MORAVA_CHERN_PURE"] = "1"
    else:
        env.pop("MORAVA_CHERN_PURE", None)
    times = []
    for _ in range(repeat):
        with tempfile.TemporaryDirectory() as d:
            cmd = [sys.executable, "-m", "morava_chern", "chern", "build",
                   "--p", "2", "--n", "2", "--degree", "8", "--out", d]
            start = timeit.default_timer()
            subprocess.run(cmd, env=env, check=True, capture_output=True)
            times.append(timeit.default_timer() - start)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _compiled is None:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'workload':34s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for label, (name, wargs) in workloads().items():
        tp, rp = bench_kernel(_kernels_py, name, wargs, args.repeat)
        if _compiled is None:
            print(f"{label:34s} {tp * 1e3:9.2f}ms {'-':>10s} {'-':>8s}")
            continue
        tc, rc = bench_kernel(_compiled, name, wargs, args.repeat)
        if rp != rc:
            raise SystemExit(f"backends disagree on {label}")
        print(f"{label:34s} {tp * 1e3:9.2f}ms {tc * 1e3:9.2f}ms {tp / tc:7.2f}x")
    tp = bench_build(True, max(1, args.repeat // 2))
    tc = bench_build(False, max(1, args.repeat // 2)) if _compiled else None
    label = "chern build p=2 n=2 D=8 (process)"
    if tc is None:
        print(f"{label:34s} {tp * 1e3:9.0f}ms")
    else:
        print(f"{label:34s} {tp * 1e3:9.0f}ms {tc * 1e3:9.0f}ms {tp / tc:7.2f}x")


if __name__ == "__main__":
    main()
