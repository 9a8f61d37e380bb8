# engines/hull_field.py - Hull classification of query grids from best-constant traces
import csv
import io
import math
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from tools.errors import DimensionMismatchError, InvalidInputError
from tools.helper_functions import parallel_map
from tools.io_tool import coordinate_header, write_atomic, write_json, write_ppm
from tools.polyspace import (
    BestConstantTrace,
    ExtremalSample,
    SolverConfig,
    affine_extremal,
    best_constant,
)
from tools.projgeom import ProjectivePoint, SampledCompact, from_affine, project

logger = logging.getLogger("hullscope.hull_field")

IN_HULL = "in-hull-at-budget"
GROWING = "growing"
FLAGGED = "flagged"


@dataclass
class Grid:
    """Query points plus the 2D shape of the slice they were laid out on (if any)."""
    points: List[np.ndarray]
    shape: Optional[Tuple[int, int]] = None

    def __len__(self) -> int:
        return len(self.points)


def _parse_axis(text: str) -> Tuple[float, float, int]:
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise InvalidInputError(f"Grid axes are written lo:hi:count, got '{text}'")
    if count < 1 or (count > 1 and hi <= lo):
        raise InvalidInputError(f"Invalid grid axis '{text}'")
    return lo, hi, count


def build_grid(axis_range: str, mode: str, dim: int, axis: int = 0,
               base: Optional[Sequence[complex]] = None) -> Grid:
    """
    A square slice through the complex plane of one chart coordinate.

    Args:
        axis_range: "lo:hi:count", the range of both the real and imaginary part
        mode: "projective" (points [1 : w]) or "affine" (points w)
        dim: Number of affine coordinates of w
        axis: Which coordinate of w varies
        base: Values of the other coordinates (default zero)

    Returns:
        Grid with count*count points, row-major with the imaginary part along rows
    """
    lo, hi, count = _parse_axis(axis_range)
    if mode not in ("projective", "affine"):
        raise InvalidInputError(f"Unknown grid mode '{mode}'")
    if not 0 <= axis < dim:
        raise InvalidInputError(f"Grid axis {axis} outside 0..{dim - 1}")
    w0 = np.zeros(dim, dtype=complex) if base is None else np.asarray(base, dtype=complex).ravel()
    if w0.size != dim:
        raise DimensionMismatchError(f"Grid base point has {w0.size} coordinates, expected {dim}")
    values = np.linspace(lo, hi, count)
    points = []
    for im in values:
        for re in values:
            w = w0.copy()
            w[axis] = complex(re, im)
            points.append(from_affine(w).rep if mode == "projective" else w)
    return Grid(points=points, shape=(count, count))


def growth_slope(degrees: Sequence[int], log_values: Sequence[float]) -> float:
    """
    Slope of d -> d log C_d over the last quartile of degrees (at least two points).

    A single degree gives the slope from the origin, log C_1.
    """
    d = np.asarray(degrees, dtype=float)
    y = d * np.asarray(log_values, dtype=float)
    if not np.all(np.isfinite(y)):
        return math.inf
    if d.size == 1:
        return float(y[0] / d[0])
    tail = max(2, int(math.ceil(d.size / 4)))
    slope, _ = np.polyfit(d[-tail:], y[-tail:], 1)
    return float(slope)


def label_projective(trace: BestConstantTrace, cap: float, threshold: float) -> str:
    """in-hull iff log C_{<=dmax} <= cap, growing iff the tail slope exceeds the threshold."""
    if math.log(trace.cumulative[-1]) <= cap:
        return IN_HULL
    if growth_slope(trace.degrees, trace.log_values) > threshold:
        return GROWING
    return FLAGGED


def label_affine(sample: ExtremalSample, threshold: float) -> str:
    """Polynomial-hull label: bounded d V_d means in the hull, a positive tail slope means outside."""
    if "unbounded" in sample.flags:
        return FLAGGED
    slope = growth_slope(sample.degrees, sample.raw_values)
    return IN_HULL if slope <= threshold else GROWING


@dataclass
class HullField:
    """
    Per-point traces and labels over a query grid.

    `finiteness` is only set for affine samples: it is the projective
    label (V below the cap), reported next to the polynomial-hull label.
    """
    mode: str
    grid: Grid
    traces: List[Union[BestConstantTrace, ExtremalSample]]
    labels: List[str]
    budget: Tuple[int, float]
    finiteness: Optional[List[bool]] = None
    flags: List[List[str]] = field(default_factory=list)

    def final_values(self) -> np.ndarray:
        """Cumulative log C (projective) or cumulative V (affine) at the budget."""
        if self.mode == "projective":
            return np.array([math.log(t.cumulative[-1]) for t in self.traces])
        return np.array([t.v_values[-1] for t in self.traces])

    def counts(self) -> Dict[str, int]:
        return {label: self.labels.count(label) for label in (IN_HULL, GROWING, FLAGGED)}

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        dim = self.grid.points[0].size
        value_name = "C_d" if self.mode == "projective" else "V_d"
        writer.writerow(["index"] + coordinate_header(dim) + ["d", value_name, "cumulative", "label", "flags"])
        for index, (point, trace, label) in enumerate(zip(self.grid.points, self.traces, self.labels)):
            coords = [repr(float(v)) for c in point for v in (c.real, c.imag)]
            if self.mode == "projective":
                per_degree, running = trace.values, trace.cumulative
            else:
                per_degree, running = trace.raw_values, trace.v_values
            for d, value, cumulative, result in zip(trace.degrees, per_degree, running, trace.results):
                writer.writerow([index] + coords + [d, repr(float(value)), repr(float(cumulative)),
                                                    label, ";".join(result.flags)])
        return buffer.getvalue()

    def summary(self) -> Dict[str, Any]:
        points = []
        for i, (point, label, value) in enumerate(zip(self.grid.points, self.labels, self.final_values())):
            entry = {"index": i, "point": point, "label": label, "value": float(value),
                     "flags": self.flags[i] if self.flags else []}
            if self.mode == "projective":
                entry["radius"] = self.traces[i].radius
            else:
                entry["projective_finite"] = self.finiteness[i]
            points.append(entry)
        return {
            "mode": self.mode,
            "dmax": self.budget[0],
            "cap": self.budget[1],
            "lower_bounds": True,
            "counts": self.counts(),
            "points": points,
        }

    def export(self, out_dir: str, prefix: str = "hull_field") -> List[str]:
        """Write CSV, JSON summary and, for 2D slices, a PPM heatmap; return the paths."""
        paths = [f"{out_dir}/{prefix}.csv", f"{out_dir}/{prefix}.json"]
        write_atomic(paths[0], self.to_csv())
        write_json(paths[1], self.summary())
        if self.grid.shape is not None:
            paths.append(f"{out_dir}/{prefix}.ppm")
            write_ppm(paths[2], self.final_values().reshape(self.grid.shape), self.budget[1])
        logger.info(f"Hull field written to {out_dir}")
        return paths


def _as_projective(point: Union[ProjectivePoint, np.ndarray]) -> ProjectivePoint:
    return point if isinstance(point, ProjectivePoint) else project(point)


def classify_hull(K: SampledCompact, grid: Union[Grid, Sequence[Any]], dmax: Optional[int] = None,
                  cap: Optional[float] = None, config: Optional[SolverConfig] = None,
                  threads: Optional[int] = None) -> HullField:
    """
    Classify every grid point against the sampled hull of K.

    Args:
        K: Sampled compact set
        grid: Query points (ProjectivePoints or vectors for projective K, affine points otherwise)
        dmax: Degree budget (defaults to config.dmax)
        cap: Log threshold for the finite label (defaults to config.cap)
        config: Solver configuration
        threads: Worker count (defaults to HULLSCOPE_THREADS)

    Returns:
        HullField with per-point traces, labels and solver flags
    """
    config = config or SolverConfig()
    dmax = config.dmax if dmax is None else dmax
    cap = config.cap if cap is None else cap
    if not isinstance(grid, Grid):
        grid = Grid(points=[p.rep if isinstance(p, ProjectivePoint) else np.asarray(p, dtype=complex).ravel()
                            for p in grid])
    if len(grid) == 0:
        raise InvalidInputError("classify_hull needs a nonempty grid")

    logger.info(f"Classifying {len(grid)} points against {K.name or 'sample'} (dmax={dmax}, cap={cap:.4g})")
    if K.mode == "projective":
        traces = parallel_map(lambda p: best_constant(K, _as_projective(p), dmax, config), grid.points, threads)
        labels = [label_projective(t, cap, config.growth_threshold) for t in traces]
        finiteness = None
    else:
        traces = parallel_map(lambda p: affine_extremal(K, p, dmax, config), grid.points, threads)
        labels = [label_affine(t, config.growth_threshold) for t in traces]
        finiteness = [t.v_values[-1] <= cap for t in traces]

    flags = [list(t.flags) for t in traces]
    for i, f in enumerate(flags):
        if "rank_deficient" in f or "not_converged" in f:
            logger.warning(f"Grid point {i} carries solver flags {f}")
    field_ = HullField(mode=K.mode, grid=grid, traces=traces, labels=labels,
                       budget=(dmax, cap), finiteness=finiteness, flags=flags)
    logger.info(f"Hull field labels: {field_.counts()}")
    return field_
