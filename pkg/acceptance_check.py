#acceptance_check.py
"""
acceptance_check.py - Smoke script for the closed-form oracle checks

Runs the main numerical paths on the built-in fixtures and prints each
computed value next to its oracle, with timings. Results are saved as JSON
for further inspection.

Usage:
    python acceptance_check.py [output_dir]

If no output directory is provided, it defaults to "acceptance".
"""

import sys
import math
import time
import logging

import numpy as np
from dotenv import load_dotenv

from engines.boundary_search import disc_search_boundary
from engines.envelope_search import SearchConfig, disc_search_envelope
from judge.certificate_judge import render_verdicts, verify_psequence
from tools.discs import RationalDisc, blaschke_from_divisor, Divisor, j_from_divisor
from tools.fixtures import generate
from tools.helper_functions import to_jsonable
from tools.io_tool import write_json
from tools.polyspace import SolverConfig, affine_extremal, best_constant
from tools.projgeom import project

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger("acceptance_check")


def pretty_print(data, title=None):
    """Print a check result in a readable format"""
    if title:
        print(f"\n{'-' * 40}")
        print(f"{title}")
        print(f"{'-' * 40}")
    for key, value in data.items():
        if isinstance(value, float):
            print(f"{key}: {value:.10g}")
        else:
            print(f"{key}: {value}")


def timed(fn):
    start = time.time()
    result = fn()
    result["seconds"] = time.time() - start
    return result


def check_circle():
    K = generate("circle", {"samples": 256}).compact
    trace = best_constant(K, project([1, 0]), 8, SolverConfig(dmax=8))
    return {"C": trace.cumulative[-1], "oracle": math.sqrt(2), "radius": trace.radius,
            "passed": abs(trace.cumulative[-1] - math.sqrt(2)) < 1e-3}


def check_torus3():
    K = generate("torus3", {"samples": 32}).compact
    trace = best_constant(K, project([1, 0, 0]), 6, SolverConfig(dmax=6))
    return {"C": trace.cumulative[-1], "oracle": math.sqrt(3),
            "passed": abs(trace.cumulative[-1] / math.sqrt(3) - 1) < 0.01}


def check_extremal():
    K = generate("unit-circle", {"samples": 256}).compact
    circle_v = affine_extremal(K, [2.0], 16).v_values[-1]
    T = generate("torus2", {"samples": 64}).compact
    torus_v = affine_extremal(T, [2.0, 0.5], 20).v_values[-1]
    return {"V_circle(2)": circle_v, "V_torus(2, 1/2)": torus_v, "oracle": math.log(2),
            "passed": abs(circle_v - math.log(2)) < 1e-3 and abs(torus_v - math.log(2)) < 1e-2}


def check_blaschke():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(100):
        k = int(rng.integers(1, 6))
        points = 0.95 * np.sqrt(rng.uniform(size=k)) * np.exp(2j * np.pi * rng.uniform(size=k))
        D = Divisor(points, rng.integers(1, 4, size=k))
        worst = max(worst, abs(abs(blaschke_from_divisor(D).value_at_zero()) - math.exp(-j_from_divisor(D))))
    return {"max |B(0)| - exp(-J)": worst, "passed": worst < 1e-10}


def check_envelope():
    K = generate("annulus", {"samples": 256}).compact
    result = disc_search_envelope(K, [6.0], SearchConfig(margin=0.1))
    return {"J": result.j_value, "oracle": math.log(3), "distance": result.boundary_distance,
            "passed": result.feasible and result.j_value <= math.log(3) + 0.05}


def check_boundary():
    K = generate("torus2", {"samples": 64}).compact
    inside = disc_search_boundary(K, [0.5, 0.0])
    outside = disc_search_boundary(K, [2.0, 0.0])
    return {"inside distance": inside.boundary_distance, "outside distance": outside.boundary_distance,
            "resolution": K.resolution,
            "passed": "descended" in inside.flags and outside.boundary_distance > 0.95}


def check_psequence():
    K = generate("circle", {"samples": 256}).compact
    discs = [RationalDisc([[1, 0], [0, 1]]) for _ in range(4)]
    report = verify_psequence(discs, K, project([1, 0]), [1.0, 0.5, 0.25, 0.125])
    for line in render_verdicts(report):
        print(f"  {line}")
    return {"blp": report.blp_sup, "oracle": math.sqrt(2), "failures": len(report.failures()),
            "passed": not report.failures() and abs(report.blp_sup - math.sqrt(2)) < 1e-6}


def main():
    load_dotenv()
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "acceptance"

    checks = {
        "circle best constant": check_circle,
        "torus best constant": check_torus3,
        "affine extremal": check_extremal,
        "blaschke identity": check_blaschke,
        "envelope attainment": check_envelope,
        "circular hull search": check_boundary,
        "p-sequence certificate": check_psequence,
    }

    results = {}
    for title, check in checks.items():
        print(f"\n🔍 Running {title}...")
        results[title] = timed(check)
        pretty_print(results[title], title.upper())

    failed = [t for t, r in results.items() if not r["passed"]]
    write_json(f"{out_dir}/acceptance.json", to_jsonable(results))
    print(f"\nFull results saved to {out_dir}/acceptance.json")
    if failed:
        print(f"❌ Failed: {', '.join(failed)}")
        sys.exit(1)
    print("\n✅ All checks passed!")


if __name__ == "__main__":
    main()
