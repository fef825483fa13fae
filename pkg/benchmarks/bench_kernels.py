"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--samples 20000] [--repeat 3]

Reports microseconds per sampled walk and seconds per exact enumeration
for each available backend and the speed-up; the exact counts of the two
backends are checked against each other.
"""

import argparse
import time

from knightcount import _backend
from knightcount.board import Board, Square

WALKS = [(5, 1.5), (6, 1.5), (8, 1.5), (8, 0.0)]
SEARCHES = [("5x5 open, all starts", 5, None, False), ("6x6 closed from corner", 6, 0, True)]


def best_of(repeat, fn):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_walks(kernels, side, alpha, n, repeat):
    start = Board(side).index(Square(0, 0))
    t, out = best_of(repeat, lambda: kernels.sample_batch(side, start, alpha, False, 1, n, False))
    return t / n * 1e6, out[:6]


def bench_search(kernels, side, start, closed, repeat):
    starts = [start] if start is not None else range(side * side)

    def run():
        return sum(kernels.count_paths(side, s, closed, False)[0] for s in starts)

    return best_of(repeat, run)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=20_000, help="walks per timing (python backend)")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip-python-search", action="store_true",
                    help="skip the slow pure-Python 6x6 enumeration")
    args = ap.parse_args(argv)

    names = sorted(_backend.BACKENDS)
    print(f"backends: {', '.join(names)} (default {_backend.NAME})")
    if "cython" not in names:
        print("compiled kernels not built; only the fallback can be timed")

    print(f"\n{'walks':<18}" + "".join(f"{n + ' us/walk':>18}" for n in names) + f"{'speed-up':>12}")
    for side, alpha in WALKS:
        row = {}
        for name in names:
            n = args.samples if name == "python" else args.samples * 20
            row[name], _ = bench_walks(_backend.BACKENDS[name], side, alpha, n, args.repeat)
        speed = row["python"] / row["cython"] if "cython" in row else float("nan")
        print(f"{f'{side}x{side} a={alpha:g}':<18}" + "".join(f"{row[n]:>18.2f}" for n in names)
              + f"{speed:>11.1f}x")

    print(f"\n{'exact':<26}" + "".join(f"{n + ' s':>14}" for n in names) + f"{'speed-up':>12}")
    for label, side, start, closed in SEARCHES:
        row, counts = {}, {}
        for name in names:
            if name == "python" and side == 6 and args.skip_python_search:
                row[name] = float("nan")
                continue
            row[name], counts[name] = bench_search(_backend.BACKENDS[name], side, start, closed,
                                                   1 if name == "python" else args.repeat)
        if len(set(counts.values())) > 1:
            raise SystemExit(f"backends disagree on {label}: {counts}")
        speed = row["python"] / row["cython"] if "cython" in row else float("nan")
        print(f"{label:<26}" + "".join(f"{row[n]:>14.3f}" for n in names) + f"{speed:>11.1f}x")


if __name__ == "__main__":
    main()
