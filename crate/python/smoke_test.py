#!/usr/bin/env python3
"""Smoke test for the coco_lab extension module.

Builds nothing itself: expects `cargo build -p coco-python` (or --release)
to have produced the cdylib, copies it next to a temporary import root under
the right name, and drives a few end-to-end checks through Python.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def locate_cdylib() -> Path:
    candidates = [
        REPO / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libcoco_lab.so", "libcoco_lab.dylib", "coco_lab.dll")
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit(
            "coco_lab cdylib not found; run `cargo build -p coco-python` first"
        )
    return max(built, key=lambda p: p.stat().st_mtime)


def import_module():
    lib = locate_cdylib()
    stage = Path(tempfile.mkdtemp(prefix="coco_lab_"))
    suffix = ".pyd" if lib.suffix == ".dll" else ".so"
    shutil.copy(lib, stage / f"coco_lab{suffix}")
    sys.path.insert(0, str(stage))
    import coco_lab

    return coco_lab


def check(name: str, ok: bool, detail: str = "") -> bool:
    print(f"[{name}] {'PASS' if ok else 'FAIL'} {detail}")
    return ok


def main() -> int:
    cl = import_module()
    ok = True

    ball = cl.ConvexSet.ball([0.0, 0.0], 1.0)
    p = ball.project([2.0, 0.0])
    ok &= check(
        "ball projection",
        abs(p[0] - 1.0) < 1e-12 and abs(p[1]) < 1e-12,
        f"project((2,0)) -> {p}",
    )
    ok &= check(
        "distance/membership",
        abs(ball.distance([2.0, 0.0]) - 1.0) < 1e-12 and ball.contains([0.3, 0.4]),
        "",
    )

    v3 = cl.unit_sphere_measure(3)
    ok &= check("sphere measure", abs(v3 - 4.0 * math.pi) < 1e-12, f"V_3 = {v3:.6f}")

    square = cl.ConvexSet.box([0.0, 0.0], [1.0, 1.0])
    w, se = square.mean_width(n_dirs=20000, seed=1)
    expect = 4.0 / math.pi
    ok &= check(
        "mean width",
        abs(w - expect) < 3.0 * se + 1e-9,
        f"{w:.5f} vs {expect:.5f} (se {se:.2e})",
    )

    inst = cl.Instance.nested_balls(d=3, horizon=300, diameter=2.0, shrink=0.5, seed=7)
    trace = cl.run(inst, policy="proj_ogd", seed=7, start="boundary")
    m = trace.movement_cost()
    bound = 3.0 ** 1.5 * inst.diameter
    ok &= check(
        "nested-ball movement",
        trace.valid and m <= bound + 1e-6,
        f"M_T = {m:.4f} <= d^(3/2) D = {bound:.4f}",
    )

    wc = cl.Instance.worst_case_d1(horizon=500)
    wc_trace = cl.run(wc, policy="proj_ogd", seed=0)
    ok &= check(
        "worst-case chasing",
        wc_trace.total_ccv() <= 3.0,
        f"ccv = {wc_trace.total_ccv():.4f} <= 3",
    )
    r = cl.regret(wc, wc_trace)
    ok &= check("regret computes", math.isfinite(r), f"regret = {r:.4f}")

    ocs = cl.Instance.ocs_random(d=2, horizon=500, seed=3)
    ocs_trace = cl.run(ocs, policy="proj_ogd", seed=3, start="boundary")
    pts = ocs_trace.actions()
    ok &= check(
        "self-expanded reverse curve",
        cl.self_expanded(list(reversed(pts)), tol=1e-7)
        and cl.curve_length(pts) <= 10.0 * ocs.diameter,
        f"length = {cl.curve_length(pts):.4f}",
    )

    exp, r2 = cl.fit_power_law([1.0, 10.0, 100.0], [2.0, 20.0, 200.0])
    ok &= check(
        "power-law fit",
        abs(exp - 1.0) < 1e-12 and abs(r2 - 1.0) < 1e-12,
        f"exponent {exp:.3f}, r^2 {r2:.3f}",
    )

    print("smoke test:", "PASS" if ok else "FAIL")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
