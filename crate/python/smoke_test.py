"""Smoke test for the quasift Python module.

Build first with `pip install --no-build-isolation -e crates/python`.
"""

import math
import tempfile
from pathlib import Path

import quasift


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    p = quasift.bell_probabilities(quasift.REFERENCE_THETA1, quasift.REFERENCE_THETA2)
    assert close(sum(p), 1.0, 1e-15)

    # The interaction dephases S, leaving weights a/2, a/2, b/2, b/2.
    a, b = p[0] + p[1], p[2] + p[3]
    h = lambda xs: -sum(x * math.log(x) for x in xs if x > 0)
    want = h([a / 2, a / 2, b / 2, b / 2]) - h(p)
    assert close(quasift.delta_mutual_information(), want, 1e-12)

    q, qt = quasift.quasiprobability()
    assert len(q) == (2 * 2 * 4 * 2) ** 2 and close(sum(q.values()), 1.0, 1e-12)
    assert close(sum(qt.values()), 1.0, 1e-12)

    q, _ = quasift.quasiprobability(seed=3, dims=(2, 3, 2), ordering="swapped_final")
    assert len(q) == 2 * 3 * 6 * 2 * 2 * 3 * 6 * 2
    assert close(quasift.integral_ft(seed=3, dims=(2, 3, 2)), 1.0, 1e-8)

    assert close(quasift.invert_amplitude(0.2, 0.7, math.pi / 2), 0.5, 1e-15)
    try:
        quasift.invert_amplitude(0.5, 0.5, 0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("degenerate angle accepted")

    entries = quasift.exact_amplitudes("b")
    assert len(entries) == 16
    assert all(close(im, 0.0, 1e-12) for _, _, im in entries)

    summary = quasift.run()
    assert summary["invariants"]["passed"]
    with tempfile.TemporaryDirectory() as out:
        summary = quasift.run(mode="sampled", shots=512, repetitions=3, seed=7, out=out)
        assert summary["sampled"]["gammas"] == 4
        assert (Path(out) / "ft_gamma.csv").exists()

    sweep = quasift.sweep(n=20, seed=2)
    assert sweep["all_passed"] and sweep["negativity_witnesses"] > 0

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
