"""Compiled vs pure-Python membership kernels on corpus slices.

    python3 benchmarks/bench_slice.py [--length 6] [--repeat 3]

Each backend runs in its own interpreter so that DHPDA_DISABLE_JIT is read
at import time.  Both must return the same membership vector.
"""
import argparse
import hashlib
import json
import os
import subprocess
import sys
import time

CASES = [("gladkij", 6), ("ldta", 7), ("thm42_L", 7), ("thm47_complement", 7)]


def measure(name, length, repeat):
    import numpy as np

    from dhpda import _kernels, corpus

    a = corpus.load(name)
    corpus.slice_mask(a, 1)  # compile outside the timed region
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        mask = corpus.slice_mask(a, length)
        best = min(best, time.perf_counter() - t0)
    return {"name": name, "length": length, "words": int(mask.size),
            "members": int(np.count_nonzero(mask)), "seconds": best,
            "jit": _kernels.JIT_ENABLED, "digest": hashlib.sha1(mask.tobytes()).hexdigest()}


def child(backend, cases, repeat):
    env = dict(os.environ, DHPDA_DISABLE_JIT="1" if backend == "python" else "0")
    cmd = [sys.executable, __file__, "--child", json.dumps(cases), "--repeat", str(repeat)]
    out = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True).stdout
    return json.loads(out)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--length", type=int, default=None, help="override every word length")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        print(json.dumps([measure(n, k, args.repeat) for n, k in json.loads(args.child)]))
        return
    cases = [(n, args.length or k) for n, k in CASES]
    jit = child("numba", cases, args.repeat)
    # the pure kernel is far slower; one repetition is plenty
    pure = child("python", cases, 1)
    print(f"{'machine':18} {'len':>3} {'words':>9} {'numba s':>9} {'python s':>9} {'speedup':>8}")
    for j, p in zip(jit, pure):
        assert j["digest"] == p["digest"], (j, p)
        print(f"{j['name']:18} {j['length']:>3} {j['words']:>9} {j['seconds']:>9.4f} "
              f"{p['seconds']:>9.3f} {p['seconds'] / j['seconds']:>7.0f}x")


if __name__ == "__main__":
    main()
