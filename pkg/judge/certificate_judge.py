# judge/certificate_judge.py - Verification of disc certificates for hull membership
import math
import logging
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from tools.discs import (
    DEFAULT_NODES,
    RationalDisc,
    boundary_distances,
    homogenize,
    j_functional,
    poletsky_measure,
)
from tools.errors import HullscopeError, InvalidInputError
from tools.projgeom import ProjectivePoint, SampledCompact, blp_constant, fs_distance, lift_disc, project

logger = logging.getLogger("hullscope.judge")

CENTER_TOL = 1e-9
BLP_BOUND = 1e6


@dataclass
class Verdict:
    """One checked condition; `passed` is `value <comparison> threshold`."""
    condition: str
    disc: Optional[int]
    passed: bool
    value: float
    threshold: float
    comparison: str


@dataclass
class CertificateReport:
    """
    Per-disc measurements of a candidate P-sequence and one verdict per condition.

    The report never folds the verdicts into a single answer.
    """
    center: List[complex]
    epsilons: List[float]
    measures: List[float]
    boundary_distances: List[float]
    blp_constants: List[float]
    blp_sup: float
    j_values: List[Optional[float]]
    verdicts: List[Verdict] = field(default_factory=list)
    errors: List[Dict[str, Any]] = field(default_factory=list)

    def failures(self) -> List[Verdict]:
        return [v for v in self.verdicts if not v.passed]

    def verdicts_for(self, condition: str) -> List[Verdict]:
        return [v for v in self.verdicts if v.condition == condition]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _center_distance(f: RationalDisc, K: SampledCompact, x: Union[ProjectivePoint, np.ndarray]) -> float:
    center = f.center()
    if K.mode == "projective":
        return fs_distance(project(center), x)
    if f.mode == "projective":
        if abs(center[0]) < 1e-14:
            return math.inf
        center = center[1:] / center[0]
    return float(np.linalg.norm(center - x))


def _lift(f: RationalDisc) -> RationalDisc:
    """Lift to C^{n+1} minus the origin; affine discs g into C^n are read as [1 : g]."""
    return lift_disc(homogenize(f))


def verify_psequence(discs: Sequence[RationalDisc], K: SampledCompact,
                     x: Union[ProjectivePoint, Sequence[complex]], epsilons: Sequence[float],
                     m: int = DEFAULT_NODES, hyperplane: Optional[Sequence[complex]] = None,
                     center_tol: float = CENTER_TOL, blp_bound: float = BLP_BOUND) -> CertificateReport:
    """
    Check a disc sequence against the P-sequence conditions at x.

    For disc j the conditions are f_j(0) = x within center_tol and
    |{t : dist(f_j(e^{it}), K) < eps_j}| > 2 pi - eps_j. The bounded lifting
    constant of the lifts is measured for every disc, and its supremum is
    checked against blp_bound.

    Args:
        discs: Candidate sequence f_j
        K: Sampled compact set
        x: Common center (ProjectivePoint for projective K, affine point otherwise)
        epsilons: Positive decreasing schedule eps_j, one per disc
        m: Quadrature nodes
        hyperplane: When given, J of every disc against it is reported
        center_tol: Tolerance of the center condition
        blp_bound: Largest lifting constant accepted as bounded

    Returns:
        CertificateReport with one verdict per (disc, condition)
    """
    epsilons = [float(e) for e in epsilons]
    if len(epsilons) != len(discs) or not discs:
        raise InvalidInputError("Need one epsilon per disc and at least one disc")
    if any(e <= 0 for e in epsilons) or any(b > a for a, b in zip(epsilons, epsilons[1:])):
        raise InvalidInputError("The epsilon schedule must be positive and decreasing")
    if K.mode == "projective":
        x = x if isinstance(x, ProjectivePoint) else project(x)
        center_repr = list(x.rep)
    else:
        x = np.asarray(x, dtype=complex).ravel()
        center_repr = list(x)

    report = CertificateReport(center=center_repr, epsilons=epsilons, measures=[], boundary_distances=[],
                               blp_constants=[], blp_sup=0.0, j_values=[])
    two_pi = 2.0 * math.pi

    for j, (f, eps) in enumerate(zip(discs, epsilons)):
        gap = _center_distance(f, K, x)
        report.verdicts.append(Verdict("center", j, gap <= center_tol, gap, center_tol, "<="))

        measure = poletsky_measure(f, K, eps, m)
        report.measures.append(measure)
        report.verdicts.append(Verdict("measure", j, measure > two_pi - eps, measure, two_pi - eps, ">"))
        report.boundary_distances.append(float(boundary_distances(f, K, m).max()))

        try:
            constant = blp_constant([_lift(f)], m)
        except HullscopeError as e:
            report.errors.append({"disc": j, "condition": "lift", "error": str(e)})
            constant = math.inf
        report.blp_constants.append(constant)

        if hyperplane is not None:
            try:
                report.j_values.append(j_functional(homogenize(f), hyperplane))
            except HullscopeError as e:
                report.errors.append({"disc": j, "condition": "j", "error": str(e)})
                report.j_values.append(None)

    report.blp_sup = max(report.blp_constants)
    report.verdicts.append(Verdict("bounded_lifting", None, report.blp_sup <= blp_bound,
                                   report.blp_sup, blp_bound, "<="))
    logger.info(f"Verified {len(discs)} discs: {len(report.failures())} failed conditions, "
                f"lifting constant {report.blp_sup:.6g}")
    return report


def render_verdicts(report: CertificateReport) -> List[str]:
    """One line per verdict, naming the value and the threshold it was compared to."""
    lines = []
    for v in report.verdicts:
        who = "sequence" if v.disc is None else f"disc {v.disc}"
        status = "PASS" if v.passed else "FAIL"
        lines.append(f"{who}: {v.condition} {status} ({v.value:.12g} {v.comparison} {v.threshold:.12g})")
    for e in report.errors:
        lines.append(f"disc {e['disc']}: {e['condition']} ERROR ({e['error']})")
    return lines
