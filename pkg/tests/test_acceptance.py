"""End-to-end acceptance gate.

Each test prints one ``PASS``/``FAIL`` line before asserting.  The long
sampling runs are cached per session so several checks can share them.
Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they also appear in the captured output of failing tests.

Expect about half an hour on a single core (the 8x8 closed run dominates).
"""

import functools
import json
import time

import pytest

from knightcount.board import Board, Square, TRANSFORMS, apply_transform
from knightcount.cli import main
from knightcount.exact import count_closed_diagrams, count_closed_numberings_from, count_open_numberings_from
from knightcount.sampler import SamplerConfig, run_experiment
from knightcount.stats import QuantityKind, estimate, estimate_violation_histogram

pytestmark = pytest.mark.slow

SEED = 2024
N5 = 1728
D6 = 9862
D8 = 13_267_364_410_532


@functools.lru_cache(maxsize=None)
def batches(side, alpha, samples, reps, seed=SEED):
    return tuple(run_experiment(SamplerConfig(side, alpha, samples, reps, seed)))


def est(side, alpha, samples, reps, kind):
    return estimate(batches(side, alpha, samples, reps), kind)


@pytest.fixture
def report(capsys):
    def emit(ok, label, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        return ok
    return emit


def timed_cli(capsys, *argv):
    t0 = time.perf_counter()
    code = main([str(a) for a in argv])
    dt = time.perf_counter() - t0
    out, err = capsys.readouterr()
    return code, out, err, dt


def test_exact_open_5x5(report, capsys):
    code, out, _, dt = timed_cli(capsys, "exact", "--side", 5, "--target", "open-numberings")
    ok = code == 0 and out.strip() == str(N5) and dt < 10
    assert report(ok, "exact open 5x5", f"value={out.strip()} (want {N5}), {dt:.2f}s (< 10s)")


def test_exact_closed_6x6(report, capsys):
    code, out, _, dt = timed_cli(capsys, "exact", "--side", 6, "--target", "closed-diagrams")
    ok = code == 0 and out.strip() == str(D6) and dt < 900
    assert report(ok, "exact closed 6x6", f"value={out.strip()} (want {D6}), {dt:.2f}s (< 900s)")


def test_exact_counts_constant_on_orbits(report):
    b = Board(5)
    counts = {s: count_open_numberings_from(b, s) for s in b.squares()}
    bad = [s for s in b.squares()
           if any(counts[apply_transform(b, t, s)] != counts[s] for t in TRANSFORMS)]
    assert report(not bad, "exact orbit symmetry 5x5",
                  f"{len(set(counts.values()))} distinct per-start counts, {len(bad)} orbit mismatches")


def test_calibration_open_5x5(report):
    e = est(5, 1.5, 500_000, 21, QuantityKind.OPEN_NUMBERINGS)
    checks = [1714 <= e.point <= 1742, abs(e.point - N5) <= 3 * e.std_error,
              4 <= e.std_error <= 16]
    assert report(all(checks), "calibration 5x5 alpha=1.5 21x5e5",
                  f"point={e.point:.2f} in [1714,1742], |err|={abs(e.point - N5):.2f} "
                  f"<= 3se={3 * e.std_error:.2f}, se={e.std_error:.2f} in [4,16]")


def test_calibration_closed_6x6(report):
    e = est(6, 1.5, 1_000_000, 21, QuantityKind.CLOSED_DIAGRAMS)
    checks = [abs(e.point - D6) <= 3 * e.std_error, 15 <= e.std_error <= 62]
    assert report(all(checks), "calibration 6x6 closed alpha=1.5 21x1e6",
                  f"point={e.point:.2f}, |err|={abs(e.point - D6):.2f} <= 3se={3 * e.std_error:.2f}, "
                  f"se={e.std_error:.2f} in [15,62] (within-rep se {e.within_sd:.2f})")


def test_closed_8x8_cross_check(report):
    e = est(8, 1.5, 1_000_000, 21, QuantityKind.CLOSED_DIAGRAMS)
    inside = sum(1.28e13 <= p <= 1.40e13 for p in e.replicate_points)
    checks = [abs(e.point - D8) <= 3 * e.std_error, inside >= 18]
    assert report(all(checks), "closed 8x8 alpha=1.5 21x1e6",
                  f"point={e.point:.6E}, |err|={abs(e.point - D8):.3E} <= 3se={3 * e.std_error:.3E}, "
                  f"{inside}/21 replications in [1.28E+13,1.40E+13] (need >= 18), "
                  f"range [{e.min:.4E},{e.max:.4E}]")


def test_variance_ordering(report):
    c15 = est(6, 1.5, 1_000_000, 21, QuantityKind.CLOSED_DIAGRAMS)
    c0 = est(6, 0.0, 1_000_000, 21, QuantityKind.CLOSED_DIAGRAMS)
    o2 = est(5, 2.0, 500_000, 21, QuantityKind.OPEN_NUMBERINGS)
    o0 = est(5, 0.0, 500_000, 21, QuantityKind.OPEN_NUMBERINGS)
    checks = [c15.std_error <= c0.std_error / 5, o2.std_error < o0.std_error]
    assert report(all(checks), "variance ordering",
                  f"6x6 closed se(1.5)={c15.std_error:.1f} <= se(0)/5={c0.std_error / 5:.1f}; "
                  f"5x5 open se(2)={o2.std_error:.2f} < se(0)={o0.std_error:.2f}")


@pytest.mark.parametrize("alpha", [0.0, 1.0, 1.5, 2.5])
def test_unbiased_open_5x5(report, alpha):
    e = est(5, alpha, 100_000, 1, QuantityKind.OPEN_NUMBERINGS)
    ok = abs(e.point - N5) <= 4 * e.std_error
    assert report(ok, f"unbiased 5x5 alpha={alpha:g} 1e5/class",
                  f"point={e.point:.2f}, |err|={abs(e.point - N5):.2f} <= 4se={4 * e.std_error:.2f}")


def test_scaled_geometric_8x8(report):
    e = est(8, 1.5, 1_000_000, 1, QuantityKind.OPEN_GEOMETRIC)
    total = e.samples_total
    checks = [total == 10_000_000, 1.10e15 <= e.point <= 1.35e15,
              e.ci_low <= 1.22e15 <= e.ci_high]
    assert report(all(checks), "scaled G run 8x8 alpha=1.5 1e7 total",
                  f"G={e.point:.6E} in [1.10E+15,1.35E+15], 3-sigma "
                  f"[{e.ci_low:.4E},{e.ci_high:.4E}] contains 1.22E+15, samples={total}")


def test_violation_histogram_8x8(report):
    h = estimate_violation_histogram(batches(8, 1.5, 1_000_000, 1))
    top = h.argmax()
    mass = h.mass_fraction(5, 20)
    ratio = h.per_k[0].point / h.total.point
    checks = [11 <= top <= 15, mass >= 0.99, ratio <= 1e-8]
    assert report(all(checks), "violation histogram 8x8",
                  f"argmax k={top} in [11,15], mass(5..20)={mass:.6f} >= 0.99, "
                  f"GW0/G={ratio:.3E} <= 1E-8")


def test_closed_divisor(report):
    b = Board(6)
    fixed = count_closed_numberings_from(b, Square(0, 0))
    other = count_closed_numberings_from(b, Square(2, 3))
    diagrams = count_closed_diagrams(b)
    ok = fixed == other == 2 * D6 and diagrams == D6
    assert report(ok, "closed divisor 6x6",
                  f"closed numberings from (0,0)={fixed}, from (2,3)={other}, want {2 * D6}")


def test_determinism_across_threads(report, capsys, tmp_path):
    outs = []
    for threads in (1, 4):
        f = tmp_path / f"sweep{threads}.csv"
        code = main(["sweep", "--side", "6", "--alphas", "0,1.5,2", "--samples", "2e4",
                     "--reps", "5", "--seed", "77", "--threads", str(threads), "--out", str(f)])
        capsys.readouterr()
        assert code == 0
        outs.append(f.read_bytes())
    ok = outs[0] == outs[1]
    assert report(ok, "determinism across --threads",
                  f"threads 1 vs 4: {len(outs[0])} bytes, identical={ok}")


def test_degenerate_negative_alpha(report, capsys):
    code = main(["estimate", "--side", "8", "--alpha", "-1", "--samples", "1e4",
                 "--target", "closed-diagrams"])
    out, err = capsys.readouterr()
    blob = json.loads(out)
    ok = code == 0 and (blob["successes"] > 0 or (blob["point"] == 0.0 and "warning" in err))
    assert report(ok, "degenerate alpha=-1 8x8 closed 1e4",
                  f"exit={code}, successes={blob['successes']}, point={blob['point']}, "
                  f"warned={'warning' in err}")


# ------------------------------------------------------------ estimator properties

SWEEP_5X5 = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0]


def test_sweep_minimum_5x5(report):
    se = {a: est(5, a, 500_000, 21, QuantityKind.OPEN_NUMBERINGS).std_error for a in SWEEP_5X5}
    best = min(se, key=se.get)
    table = ", ".join(f"{a:g}:{s:.2f}" for a, s in se.items())
    assert report(best in (1.5, 2.0, 2.5), "5x5 sweep std_error minimum",
                  f"argmin alpha={best:g} in {{1.5,2,2.5}}; se by alpha {table}")


@pytest.mark.parametrize("side,samples", [(5, 500_000), (6, 100_000)])
def test_oracle_consistency(report, side, samples):
    kind, exact = ((QuantityKind.OPEN_NUMBERINGS, N5) if side == 5
                   else (QuantityKind.CLOSED_DIAGRAMS, D6))
    worst, lines = 0.0, []
    for a in (0.5, 1.0, 1.5, 2.0, 2.5):
        e = est(side, a, samples, 21, kind)
        z = abs(e.point - exact) / e.std_error
        worst = max(worst, z)
        lines.append(f"{a:g}:{z:.2f}")
    assert report(worst <= 4, f"oracle consistency {side}x{side} 21x{samples:.0e}",
                  f"|err|/se by alpha {', '.join(lines)} (all <= 4)")
