# engines/envelope_search.py - Disc search for the J-functional envelope of a neighbourhood
import math
import logging
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import numpy.polynomial.polynomial as npp
from scipy.optimize import minimize

from tools.discs import (
    BOUNDARY_MARGIN,
    RationalDisc,
    blaschke_from_divisor,
    boundary_distances,
    cancel_poles,
    hyperplane_divisor,
    j_functional,
)
from tools.errors import DimensionMismatchError, HullscopeError, InvalidInputError
from tools.helper_functions import config_from_dict
from tools.projgeom import SampledCompact, circle_nodes

logger = logging.getLogger("hullscope.envelope")

INFEASIBLE_OBJECTIVE = 1e6
# poles stay clear of the boundary band rejected by hyperplane_divisor
MAX_POLE_MODULUS = 1.0 - 10 * BOUNDARY_MARGIN


@dataclass
class SearchConfig:
    """Budget and penalty schedule shared by the disc searches."""
    restarts: int = 8
    iterations: int = 2000
    degree: int = 2
    search_nodes: int = 256
    verify_nodes: int = 1024
    penalty_start: float = 10.0
    margin: float = 0.05
    tighten: float = 0.5
    seed: int = 0

    @classmethod
    def from_dict(cls, data: Optional[Dict]) -> "SearchConfig":
        return config_from_dict(cls, data or {})

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass
class DiscSearchResult:
    """
    Best disc found by a search, with its re-evaluated figures.

    `j_value` is j_functional of `disc` and `boundary_distance` the largest
    distance from a boundary node to the sample, both recomputed on the
    verification grid after the optimizer stopped.
    """
    disc: RationalDisc
    j_value: float
    boundary_distance: float
    feasible: bool
    center: np.ndarray
    iterations: int
    seed: int
    degree: int
    margin: Optional[float] = None
    history: List[Dict[str, Any]] = field(default_factory=list)
    flags: List[str] = field(default_factory=list)


def disc_points(u: np.ndarray) -> np.ndarray:
    """Map unconstrained complex parameters into the open disc, radially by tanh."""
    r = np.abs(u)
    modulus = np.minimum(np.tanh(r), MAX_POLE_MODULUS)
    scale = np.where(r > 0, modulus / np.where(r > 0, r, 1.0), 1.0)
    return u * scale


def pole_parameters(a: np.ndarray) -> np.ndarray:
    r = np.abs(a)
    scale = np.where(r > 0, np.arctanh(np.minimum(r, MAX_POLE_MODULUS)) / np.where(r > 0, r, 1.0), 1.0)
    return a * scale


class _EnvelopeProblem:
    """
    Discs [q : P] with q = prod (zeta - a_j) and P(0) = p q(0).

    Parameters are the coefficients of zeta^1..zeta^D of every component of P
    followed by the k pole parameters, all split into real and imaginary parts.
    """

    def __init__(self, K: SampledCompact, p: np.ndarray, degree: int, poles: int, margin: float,
                 nodes: int):
        self.K, self.p, self.degree, self.k = K, p, degree, poles
        self.margin = margin
        self.nodes = circle_nodes(nodes)
        self.n = p.size

    @property
    def size(self) -> int:
        return 2 * (self.n * self.degree + self.k)

    def unpack(self, x: np.ndarray):
        z = x[0::2] + 1j * x[1::2]
        higher = z[:self.n * self.degree].reshape(self.n, self.degree)
        a = disc_points(z[self.n * self.degree:])
        q = npp.polyfromroots(a) if self.k else np.ones(1, dtype=complex)
        P = np.hstack([(self.p * q[0])[:, None], higher])
        return a, q, P

    def pack(self, higher: np.ndarray, a: np.ndarray) -> np.ndarray:
        z = np.concatenate([np.asarray(higher, dtype=complex).ravel(), pole_parameters(np.asarray(a, dtype=complex))])
        x = np.empty(2 * z.size)
        x[0::2], x[1::2] = z.real, z.imag
        return x

    def disc(self, x: np.ndarray) -> RationalDisc:
        _, q, P = self.unpack(x)
        width = max(q.size, P.shape[1])
        coeffs = np.zeros((self.n + 1, width), dtype=complex)
        coeffs[0, :q.size] = q
        coeffs[1:, :P.shape[1]] = P
        return RationalDisc(coeffs, mode="projective")

    def objective(self, x: np.ndarray, weight: float) -> float:
        a, q, P = self.unpack(x)
        moduli = np.abs(a)
        if np.any(moduli < 1e-14):
            return INFEASIBLE_OBJECTIVE
        j = float(-np.sum(np.log(moduli)))
        den = npp.polyval(self.nodes, q)
        if np.any(np.abs(den) < 1e-12):
            return INFEASIBLE_OBJECTIVE
        values = np.moveaxis(npp.polyval(self.nodes, P.T), 0, -1) / den[:, None]
        if not np.all(np.isfinite(values)):
            return INFEASIBLE_OBJECTIVE
        dist = self.K.nearest_distance(values)
        excess = np.maximum(0.0, dist - self.margin)
        return j + weight * float(np.sum(excess ** 2))


def validate_center(K: SampledCompact, p: Sequence[complex]) -> np.ndarray:
    if K.mode != "affine":
        raise InvalidInputError("Disc searches run on affine samples")
    p = np.asarray(p, dtype=complex).ravel()
    if p.size != K.dim:
        raise DimensionMismatchError(f"Center has {p.size} coordinates, sample has {K.dim}")
    if not np.all(np.isfinite(p)):
        raise InvalidInputError("Disc center must be finite")
    return p


def _constant_disc(p: np.ndarray) -> RationalDisc:
    return RationalDisc(np.concatenate([[1.0 + 0j], p])[:, None], mode="projective")


def _radial_seed(problem: _EnvelopeProblem, K: SampledCompact) -> Optional[np.ndarray]:
    """
    Parameters of the Mobius disc zeta -> p a (conj(a) zeta - 1)/(zeta - a).

    It has center p and maps the circle onto the circle of radius |a||p| in
    the complex line through p; |a| is chosen so that radius matches the
    sample point nearest to p.
    """
    norm = float(np.linalg.norm(problem.p))
    if problem.k != 1 or problem.degree < 1 or norm == 0.0:
        return None
    _, idx = K.tree.query(np.hstack([problem.p.real, problem.p.imag]))
    radius = float(np.linalg.norm(K.points[idx]))
    if not 0.0 < radius < norm:
        return None
    a = -radius / norm
    higher = np.zeros((problem.n, problem.degree), dtype=complex)
    higher[:, 0] = abs(a) ** 2 * problem.p
    return problem.pack(higher, np.array([a]))


def check_hyperplane_at_infinity(hyperplane: Optional[Sequence[complex]], dim: int):
    if hyperplane is None:
        return
    lam = np.asarray(hyperplane, dtype=complex).ravel()
    if lam.size != dim + 1:
        raise DimensionMismatchError(f"Hyperplane has {lam.size} coefficients, expected {dim + 1}")
    if lam[0] == 0 or np.any(np.abs(lam[1:]) > 1e-12 * abs(lam[0])):
        raise InvalidInputError("Affine neighbourhoods are searched against the hyperplane at infinity {z_0 = 0}")


def disc_search_envelope(K: SampledCompact, p: Sequence[complex], config: Optional[SearchConfig] = None,
                         margin: Optional[float] = None,
                         hyperplane: Optional[Sequence[complex]] = None) -> DiscSearchResult:
    """
    Search for a disc f with f(0) = p, boundary within the margin of K and small J(f).

    The neighbourhood is {dist(., K) < margin} inside the affine chart
    {z_0 = 1}, whose complement is the hyperplane at infinity {z_0 = 0}. That
    is the only hyperplane a neighbourhood of an affine sample avoids, so J is
    always taken against it: the sum of -log|pole| over the poles of f in the
    chart. Lifts against other hyperplanes come from cancel_sequence.

    Restarts cycle the pole count through 0..degree, each running Nelder-Mead
    on J plus a quadratic penalty for boundary nodes farther than
    tighten * margin from K; the penalty weight doubles after every restart
    until a feasible disc is found.

    Args:
        K: Affine sample
        p: Disc center
        config: Search configuration
        margin: Overrides config.margin
        hyperplane: Must be proportional to (1, 0, ..., 0) when given

    Returns:
        DiscSearchResult; flagged infeasible when no disc met the margin
    """
    config = config or SearchConfig()
    check_hyperplane_at_infinity(hyperplane, K.dim)
    margin = config.margin if margin is None else margin
    if margin <= 0:
        raise InvalidInputError("Neighbourhood margin must be positive")
    p = validate_center(K, p)

    if float(K.nearest_distance(p)[0]) < margin:
        disc = _constant_disc(p)
        distance = float(boundary_distances(disc, K, config.verify_nodes).max())
        logger.info("Center lies in the neighbourhood; constant disc has J = 0")
        return DiscSearchResult(disc=disc, j_value=0.0, boundary_distance=distance, feasible=True, center=p,
                                iterations=0, seed=config.seed, degree=config.degree, margin=margin,
                                history=[{"restart": 0, "poles": 0, "objective": 0.0, "j": 0.0,
                                          "distance": distance}])

    rng = np.random.default_rng(config.seed)
    weight = config.penalty_start
    best = None
    fallback = None
    history = []
    total_iterations = 0

    for restart in range(config.restarts):
        k = restart % (config.degree + 1)
        problem = _EnvelopeProblem(K, p, config.degree, k, config.tighten * margin, config.search_nodes)
        x0 = _radial_seed(problem, K) if restart == 1 else None
        if x0 is None:
            x0 = rng.normal(scale=0.5, size=problem.size)
        if problem.size == 0:
            x = x0
        else:
            for _ in range(2):
                res = minimize(problem.objective, x0, args=(weight,), method="Nelder-Mead",
                               options={"maxiter": config.iterations, "xatol": 1e-10, "fatol": 1e-12,
                                        "adaptive": problem.size > 4})
                total_iterations += int(res.nit)
                x0 = res.x
            x = x0

        try:
            disc = problem.disc(x)
            j = j_functional(disc, np.eye(p.size + 1)[0])
            distance = float(boundary_distances(disc, K, config.verify_nodes).max())
        except HullscopeError as e:
            logger.debug(f"Restart {restart} produced an unusable disc: {e}")
            history.append({"restart": restart, "poles": k, "error": str(e), "weight": weight})
            weight *= 2.0
            continue

        feasible = distance < margin
        entry = {"restart": restart, "poles": k, "objective": float(problem.objective(x, weight)),
                 "j": j, "distance": distance, "feasible": feasible, "weight": weight}
        history.append(entry)
        logger.debug(f"Restart {restart}: poles={k} J={j:.6g} distance={distance:.3g} feasible={feasible}")

        if feasible and (best is None or j < best[1]):
            best = (disc, j, distance)
        elif not feasible and (fallback is None or distance < fallback[2]):
            fallback = (disc, j, distance)
        if best is None:
            weight *= 2.0

    flags = []
    if best is None:
        flags.append("infeasible")
        logger.warning(f"No disc met the margin {margin} around {p}; returning the closest attempt")
        if fallback is None:
            disc = _constant_disc(p)
            fallback = (disc, 0.0, float(boundary_distances(disc, K, config.verify_nodes).max()))
        best = fallback

    disc, j, distance = best
    logger.info(f"Envelope search at {p}: J = {j:.6g}, boundary distance {distance:.3g}, flags {flags}")
    return DiscSearchResult(disc=disc, j_value=j, boundary_distance=distance, feasible=not flags, center=p,
                            iterations=total_iterations, seed=config.seed, degree=config.degree,
                            margin=margin, history=history, flags=flags)


def envelope_sequence(K: SampledCompact, p: Sequence[complex], margins: Sequence[float],
                      config: Optional[SearchConfig] = None,
                      hyperplane: Optional[Sequence[complex]] = None) -> List[DiscSearchResult]:
    """One envelope search per neighbourhood of a strictly decreasing margin schedule."""
    margins = [float(m) for m in margins]
    if not margins or any(m <= 0 for m in margins):
        raise InvalidInputError("Margin schedule must be nonempty and positive")
    if any(b >= a for a, b in zip(margins, margins[1:])):
        raise InvalidInputError("Margin schedule must be strictly decreasing")
    return [disc_search_envelope(K, p, config, margin=m, hyperplane=hyperplane) for m in margins]


@dataclass
class CancelledLift:
    """A pole-cancelled lift F = (B/B(0)) G~ of a searched disc."""
    lift: RationalDisc
    j_value: float
    blaschke_at_zero: float
    boundary_scale: float


def cancel_sequence(results: Sequence[DiscSearchResult],
                    hyperplane: Optional[Sequence[complex]] = None) -> List[CancelledLift]:
    """
    Lift every searched disc to C^{n+1} by cancelling its poles.

    |B(0)| = exp(-J), so the lifts' boundary values grow like exp(J) times
    those of the chart realization.
    """
    lifts = []
    for result in results:
        lam = np.eye(result.disc.components)[0] if hyperplane is None else np.asarray(hyperplane, dtype=complex)
        F = cancel_poles(result.disc, lam)
        b0 = abs(blaschke_from_divisor(hyperplane_divisor(result.disc, lam)).value_at_zero())
        j = j_functional(result.disc, lam)
        lifts.append(CancelledLift(lift=F, j_value=j, blaschke_at_zero=b0, boundary_scale=math.exp(j)))
    return lifts
