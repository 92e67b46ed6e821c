"""Acceptance suite: one test per release criterion, each printing a
pass/fail line. Run with `pytest tests/test_acceptance.py -v -s`.
"""

import io
import json
import math
import time

import numpy as np
import pytest

from circle_rope.cli import main
from circle_rope.geometry import (
    AutoRadius,
    CipConfig,
    FixedRadius,
    GridSpec,
    build_plane_basis,
    centralize,
    cip_transform,
    dual_frame_fusion,
    grid_coords,
    grid_index_angles,
    mix_angles,
    spatial_origin_angles,
)
from circle_rope.harness import ScheduleStrategy, Variant, make_schedule, run_experiment
from circle_rope.metrics import DistanceMatrix, distance_matrix, ptd, ptd_of
from circle_rope.rope import RotaryParams, apply_rotary, logit, rotation_angles
from circle_rope.schemes import assign, parse_layout


def report(criterion, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"{status}: criterion {criterion} {detail}".rstrip())
    assert ok, f"criterion {criterion} failed: {detail}"


def test_criterion_1_ptd_table():
    start = time.monotonic()
    layout = parse_layout("i3x3,t5")
    hard = ptd_of(assign("hard", layout))
    unordered = ptd_of(assign("unordered", layout))
    spatial_matrix = distance_matrix(assign("spatial", layout))
    spatial = ptd(spatial_matrix)
    circle = ptd_of(assign("circle", layout, CipConfig(radius=FixedRadius(10.0), beta=1.0)))
    elapsed = time.monotonic() - start
    ok = (
        abs(hard - 2.22) <= 0.01
        and unordered == 0.0
        and circle <= 1e-9
        and 0.60 <= spatial <= 0.70
        and elapsed < 1.0
    )
    detail = (
        f"(PTD table i3x3,t5: hard={hard:.4f}, unordered={unordered}, "
        f"spatial={spatial:.4f} [{spatial_matrix.convention} convention, image-first "
        f"image (j,i), text scalars 3..7], circle={circle:.2e}, {elapsed:.2f}s)"
    )
    report(1, ok, detail)


def test_criterion_2_equidistance_sweep():
    start = time.monotonic()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(200):
        w = int(rng.integers(1, 33))
        h = int(rng.integers(1, 33))
        if w * h == 1:
            w = 2
        strategy = rng.choice(["fixed", "auto"])
        if strategy == "fixed":
            radius = FixedRadius(float(rng.uniform(1, 50)))
        else:
            radius = AutoRadius(float(rng.choice([1.0, 2.0])))
        config = CipConfig(alpha=float(rng.uniform(0, 1)), radius=radius)
        projected, centered = cip_transform(GridSpec(w, h), config)
        t = float(rng.uniform(-100, 100))
        dists = np.linalg.norm(projected - t * np.ones(3), axis=1)
        worst = max(worst, float(dists.max() - dists.min()))
    elapsed = time.monotonic() - start
    ok = worst <= 1e-9 and elapsed < 10.0
    report(2, ok, f"(equidistance over 200 cases: max spread {worst:.2e}, {elapsed:.2f}s)")


def test_criterion_3_plane_and_norm_invariants():
    rng = np.random.default_rng(3)
    basis = build_plane_basis(np.ones(3))
    worst_norm = worst_plane = 0.0
    for _ in range(200):
        w = int(rng.integers(1, 33))
        h = int(rng.integers(1, 33))
        if w * h == 1:
            h = 2
        radius = float(rng.uniform(1, 50))
        config = CipConfig(alpha=float(rng.uniform(0, 1)), radius=FixedRadius(radius))
        projected, _ = cip_transform(GridSpec(w, h), config)
        worst_norm = max(worst_norm, float(np.abs(np.linalg.norm(projected, axis=1) - radius).max()))
        worst_plane = max(worst_plane, float(np.abs(projected @ basis.n).max()))
    ok = worst_norm <= 1e-9 and worst_plane <= 1e-9
    report(3, ok, f"(norm dev {worst_norm:.2e}, plane dev {worst_plane:.2e})")


def test_criterion_4_endpoint_equalities():
    grid = GridSpec(5, 4)
    centered, _ = centralize(grid_coords(grid))
    sa = spatial_origin_angles(centered)
    ga = grid_index_angles(grid)
    alpha_ok = (
        mix_angles(sa, ga, 0.0).tolist() == ga.tolist()
        and mix_angles(sa, ga, 1.0).tolist() == sa.tolist()
    )
    projected, cent = cip_transform(grid, CipConfig(radius=FixedRadius(10.0)))
    beta1 = dual_frame_fusion(projected, cent, 1.0)
    beta0 = dual_frame_fusion(projected, cent, 0.0)
    beta_ok = (
        np.array_equal(beta1, projected)
        and np.max(np.abs(beta0 - cent)) <= 1e-12
    )
    report(4, alpha_ok and beta_ok, "(alpha/beta endpoints exact)")


def test_criterion_5_ptd_oracle_equivalence():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(50):
        n_text = int(rng.integers(1, 65))
        n_image = int(rng.integers(1, 1025))
        values = rng.uniform(0, 100, size=(n_text, n_image))
        production = ptd(DistanceMatrix(values, "3d"))
        total = 0.0
        for t in range(n_text):
            row_mean = sum(values[t]) / n_image
            total += sum(abs(values[t][i] - row_mean) for i in range(n_image))
        brute = total / (n_text * n_image)
        worst = max(worst, abs(production - brute))
    report(5, worst <= 1e-12, f"(50 random matrices, max |diff| {worst:.2e})")


def test_criterion_6_rotary_properties():
    rng = np.random.default_rng(6)
    params = RotaryParams(head_dim=16, sections=(4, 2, 2))
    worst_norm = worst_shift = 0.0
    for _ in range(1000):
        q = rng.standard_normal(16)
        k = rng.standard_normal(16)
        qi = rng.uniform(-50, 50, size=3)
        ki = rng.uniform(-50, 50, size=3)
        c = float(rng.uniform(-50, 50))
        rotated = apply_rotary(q, rotation_angles(qi, params))
        worst_norm = max(worst_norm, abs(np.linalg.norm(rotated) - np.linalg.norm(q)))
        worst_shift = max(
            worst_shift,
            abs(logit(q, qi + c, k, ki + c, params) - logit(q, qi, k, ki, params)),
        )
    params_1d = RotaryParams(head_dim=16, sections=(8, 0, 0))
    worst_1d = 0.0
    freqs = 10000.0 ** (-2.0 * np.arange(8) / 16)
    for _ in range(100):
        q = rng.standard_normal(16)
        k = rng.standard_normal(16)
        s_q, s_k = rng.uniform(-30, 30, size=2)
        zq = (q[0::2] + 1j * q[1::2]) * np.exp(1j * s_q * freqs)
        zk = (k[0::2] + 1j * k[1::2]) * np.exp(1j * s_k * freqs)
        reference = float(np.real(np.sum(zq * np.conj(zk))))
        ours = logit(q, np.full(3, s_q), k, np.full(3, s_k), params_1d)
        worst_1d = max(worst_1d, abs(ours - reference))
    ok = worst_norm <= 1e-9 and worst_shift <= 1e-6 and worst_1d <= 1e-9
    report(6, ok, f"(norm {worst_norm:.2e}, shift {worst_shift:.2e}, 1D equiv {worst_1d:.2e})")


def test_criterion_7_unordered_zero_spread():
    segments = parse_layout("i3x3,t5")
    config = CipConfig(radius=FixedRadius(10.0))
    params = RotaryParams(head_dim=16, sections=(4, 2, 2))
    worst = 0.0
    for strategy in ScheduleStrategy:
        schedule = make_schedule(6, strategy)
        rep = run_experiment(segments, config, schedule, params, seed=7, schemes=("unordered",))
        for stats in rep.stats["unordered"].values():
            worst = max(worst, stats.spread)
    report(7, worst <= 1e-9, f"(max spread over schedules/layers {worst:.2e})")


def test_criterion_8_age_schedule_conformance():
    ok = True
    for n in range(1, 65):
        schedule = make_schedule(n, ScheduleStrategy.ALTERNATING)
        for layer in range(1, n + 1):
            expected = Variant.ORIGINAL if layer % 2 == 1 else Variant.CIRCLE
            ok = ok and schedule.variant(layer) is expected
    upper = make_schedule(36, ScheduleStrategy.UPPER_HALF_CIRCLE)
    lower = make_schedule(36, ScheduleStrategy.LOWER_HALF_CIRCLE)
    ok = ok and all(upper.variant(n) is Variant.ORIGINAL for n in range(1, 19))
    ok = ok and all(upper.variant(n) is Variant.CIRCLE for n in range(19, 37))
    ok = ok and all(lower.variant(n) is Variant.CIRCLE for n in range(1, 19))
    ok = ok and all(lower.variant(n) is Variant.ORIGINAL for n in range(19, 37))
    report(8, ok, "(alternating 1..64, 18/18 split at 36 layers)")


def test_criterion_9_out_of_scope_statement():
    # Published benchmark scores (fine-tuned LVLM evaluations) cannot be
    # reproduced at desk scale; the property suites above stand in for them.
    report(9, True, "(benchmark fine-tuning results out of scope by design)")


def test_criterion_10_cli_determinism():
    argsets = [
        ["ptd", "--layout", "i3x3,t5", "--beta", "1", "--format", "csv"],
        ["project", "--layout", "i4x3,t2", "--stage", "projected", "--format", "json"],
        ["attn", "--layout", "i3x3,t5", "--seed", "42", "--layers", "4",
         "--head-dim", "8", "--sections", "2,1,1"],
    ]
    ok = True
    for args in argsets:
        outputs = []
        for _ in range(2):
            buf = io.StringIO()
            code = main(list(args), out=buf)
            ok = ok and code == 0
            outputs.append(buf.getvalue().encode())
        ok = ok and outputs[0] == outputs[1]
    report(10, ok, "(ptd/project/attn byte-identical across reruns)")
