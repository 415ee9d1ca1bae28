#!/usr/bin/env python3
"""Smoke test for the urq Python bindings.

Builds nothing itself: compile the extension first with

    cargo build -p urq-python --release   # or without --release

then run

    python3 python/smoke_test.py
"""

import math
import os
import shutil
import sys
import tempfile


def locate_extension():
    here = os.path.dirname(os.path.abspath(__file__))
    root = os.path.dirname(here)
    candidates = [
        os.path.join(root, "target", profile, name)
        for profile in ("release", "debug")
        for name in ("liburq.so", "urq.so", "liburq.dylib", "urq.pyd")
    ]
    for path in candidates:
        if os.path.exists(path):
            return path
    sys.exit("extension not found; run `cargo build -p urq-python` first")


def import_urq():
    src = locate_extension()
    stage = tempfile.mkdtemp(prefix="urq-smoke-")
    shutil.copy(src, os.path.join(stage, "urq.so"))
    sys.path.insert(0, stage)
    import urq  # noqa: E402

    return urq


def approx(a, b, tol=1e-12):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    urq = import_urq()

    # Scalar quantizer: ceiling then modulo.
    assert urq.quantize_scalar(0.5, 1) == 1
    assert urq.quantize_scalar(-0.5, 1) == 0
    assert urq.quantize_scalar(3.2, 2) == 0

    # Code comparison.
    equal, hamming = urq.consistency([0, 1, 1], [0, 0, 1], 1)
    assert (equal, hamming) == (False, 1)

    # Projected laws: triangle values and the three-bit dead zone.
    approx(urq.projected_consistency(1.5, 1.0), 0.5)
    approx(urq.projected_consistency_multibit(4.0, 1.0, 3), 0.0)

    # Exact consistency probability and its bounds.
    approx(urq.consistency_probability(0.0, 1.0, 1.0), 1.0)
    exact, lower1, lower2, upper = urq.consistency_bounds(0.5, 1.0, 1.0)
    assert lower1 <= exact <= upper and lower2 <= exact
    approx(lower2, 1.0 - math.sqrt(2.0 / math.pi) * 0.5)

    # Norm tail at two dimensions has a closed form.
    approx(urq.norm_tail(2, 1.0, 2.0), math.exp(-2.0))

    # Guarantee constants and the overhead figure.
    assert urq.concrete_constants(9) == (60.0, 0.75)
    approx(urq.rate_overhead(0.75), 4.818841679306418)
    d_guess = urq.guaranteed_distance(9, 1800, 1e-3)
    d_next = urq.guaranteed_distance(9, 1818, 1e-3)
    approx(d_next / d_guess, 0.75)

    # Planner sanity: halving the target distance needs more measurements.
    m1, clog1, _ = urq.plan_unit_ball(9, 0.5, 1e-3)
    m2, clog2, _ = urq.plan_unit_ball(9, 0.25, 1e-3)
    assert m2 > m1 and clog2 > clog1
    m_sparse, _, _ = urq.plan_sparse(256, 4, 0.1, 1e-3)
    assert m_sparse >= 1

    # Ensemble pipeline: determinism, shapes, serialization round trip.
    ens = urq.Ensemble(32, 3, 1.0, 0.5, 1, 42)
    assert (ens.rows, ens.dim, ens.bits, ens.seed) == (32, 3, 1, 42)
    x = [0.1, -0.2, 0.3]
    code = ens.quantize(x)
    assert len(code) == 32 and all(s in (0, 1) for s in code)
    assert urq.Ensemble(32, 3, 1.0, 0.5, 1, 42).quantize(x) == code
    assert ens.quantize_prefix(x, 10) == code[:10]
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "ens.urq")
        ens.save(path)
        assert urq.Ensemble.load(path).quantize(x) == code

    # Monte Carlo vs the analytic law (four standard errors).
    mean, stderr = urq.mc_consistency(0.5, 1.0, 1.0, 4, 1, 200_000, 7)
    exact = urq.consistency_probability(0.5, 1.0, 1.0)
    assert abs(mean - exact) <= 4.0 * stderr, (mean, exact, stderr)

    # Errors surface as ValueError.
    try:
        urq.quantize_scalar(float("nan"), 1)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError for non-finite input")

    print("urq python smoke test passed")


if __name__ == "__main__":
    main()
