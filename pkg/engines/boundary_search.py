# engines/boundary_search.py - Disc search toward circular compact sets
import logging
from typing import List, Optional, Sequence

import numpy as np
import numpy.polynomial.polynomial as npp
from scipy.optimize import minimize

from engines.envelope_search import (
    DiscSearchResult,
    SearchConfig,
    disc_points,
    pole_parameters,
    validate_center,
)
from tools.discs import RationalDisc, boundary_distances, homogenize, j_functional
from tools.errors import HullscopeError
from tools.projgeom import SampledCompact, circle_nodes

logger = logging.getLogger("hullscope.boundary")

DESCENT_FACTOR = 2.0


class _BoundaryProblem:
    """
    Discs f_i = P_i / prod_j (1 + conj(a_j) zeta) with P_i(0) = p_i.

    The denominator vanishes only outside the closed disc, so every member is
    analytic up to the boundary. Parameters are the coefficients of
    zeta^1..zeta^D of every P_i followed by the D parameters of the a_j.
    """

    def __init__(self, K: SampledCompact, p: np.ndarray, degree: int, nodes: int):
        self.K, self.p, self.degree = K, p, degree
        self.n = p.size
        self.nodes = circle_nodes(nodes)

    @property
    def size(self) -> int:
        return 2 * (self.n + 1) * self.degree

    def unpack(self, x: np.ndarray):
        z = x[0::2] + 1j * x[1::2]
        higher = z[:self.n * self.degree].reshape(self.n, self.degree)
        a = disc_points(z[self.n * self.degree:])
        den = np.ones(1, dtype=complex)
        for aj in a:
            den = npp.polymul(den, np.array([1.0, np.conj(aj)]))
        P = np.hstack([self.p[:, None], higher])
        return den, P

    def pack(self, higher: np.ndarray, a: np.ndarray) -> np.ndarray:
        z = np.concatenate([np.asarray(higher, dtype=complex).ravel(), pole_parameters(np.asarray(a, dtype=complex))])
        x = np.empty(2 * z.size)
        x[0::2], x[1::2] = z.real, z.imag
        return x

    def disc(self, x: np.ndarray) -> RationalDisc:
        den, P = self.unpack(x)
        return RationalDisc(P, mode="affine", denominator=den)

    def objective(self, x: np.ndarray) -> float:
        den, P = self.unpack(x)
        values = np.moveaxis(npp.polyval(self.nodes, P.T), 0, -1) / npp.polyval(self.nodes, den)[:, None]
        if not np.all(np.isfinite(values)):
            return np.inf
        dist = self.K.nearest_distance(values)
        # the mean term keeps the simplex moving when the max is flat
        return float(dist.max() + 1e-3 * dist.mean())


def _mobius_seed(problem: _BoundaryProblem, K: SampledCompact) -> Optional[np.ndarray]:
    """
    Coordinatewise Mobius discs R_i (zeta + c_i)/(1 + conj(c_i) zeta), c_i = p_i/R_i.

    R_i is the largest modulus of coordinate i over K; coordinates with
    |p_i| >= R_i stay constant. The discs share the denominator prod (1 + conj(c_i) zeta).
    """
    if problem.degree < problem.n:
        return None
    radii = np.abs(K.points).max(axis=0)
    c = np.zeros(problem.n, dtype=complex)
    inside = (np.abs(problem.p) < radii) & (radii > 0)
    c[inside] = problem.p[inside] / radii[inside]
    factors = [np.array([1.0, np.conj(ci)]) for ci in c]
    higher = np.zeros((problem.n, problem.degree), dtype=complex)
    for i in range(problem.n):
        if inside[i]:
            num = radii[i] * np.array([c[i], 1.0])
            for l, factor in enumerate(factors):
                if l != i:
                    num = npp.polymul(num, factor)
        else:
            num = np.array([problem.p[i]])
            for factor in factors:
                num = npp.polymul(num, factor)
        higher[i, :num.size - 1] = num[1:problem.degree + 1]
    a = np.concatenate([c, np.zeros(problem.degree - problem.n, dtype=complex)])
    return problem.pack(higher, a)


def disc_search_boundary(K: SampledCompact, p: Sequence[complex],
                         config: Optional[SearchConfig] = None) -> DiscSearchResult:
    """
    Minimize max_t dist(f(e^{it}), K) over analytic discs with f(0) = p.

    For circular connected K the infimum is zero exactly on the polynomial
    hull. A result below twice the sample resolution is flagged "descended";
    anything else is reported as "not_descended", which is evidence and
    not a proof of non-membership.

    Args:
        K: Affine sample, expected circular and connected
        p: Disc center
        config: Search configuration; config.degree is the degree budget

    Returns:
        DiscSearchResult with the best disc and its verified boundary distance
    """
    config = config or SearchConfig()
    p = validate_center(K, p)
    flags: List[str] = []
    if not K.circular:
        flags.append("not_circular")
    if not K.connected:
        flags.append("disconnected")
    if flags:
        logger.warning(f"Boundary search on {K.name or 'sample'} without its hypotheses: {flags}")

    problem = _BoundaryProblem(K, p, config.degree, config.search_nodes)
    threshold = DESCENT_FACTOR * K.resolution
    rng = np.random.default_rng(config.seed)
    best = None
    history = []
    total_iterations = 0

    for restart in range(config.restarts):
        x0 = _mobius_seed(problem, K) if restart == 0 else None
        if x0 is None:
            x0 = rng.normal(scale=0.5, size=problem.size)
        x = x0
        if problem.size:
            for _ in range(2):
                res = minimize(problem.objective, x, method="Nelder-Mead",
                               options={"maxiter": config.iterations, "xatol": 1e-10, "fatol": 1e-12,
                                        "adaptive": problem.size > 4})
                total_iterations += int(res.nit)
                x = res.x
        try:
            disc = problem.disc(x)
            distance = float(boundary_distances(disc, K, config.verify_nodes).max())
        except HullscopeError as e:
            history.append({"restart": restart, "error": str(e)})
            continue
        history.append({"restart": restart, "distance": distance})
        logger.debug(f"Boundary restart {restart}: distance {distance:.4g}")
        if best is None or distance < best[1]:
            best = (disc, distance)
        if distance <= K.resolution:
            break

    if best is None:
        disc = RationalDisc(np.concatenate([[1.0 + 0j], p])[:, None], mode="projective")
        best = (disc, float(boundary_distances(disc, K, config.verify_nodes).max()))

    disc, distance = best
    descended = distance < threshold
    flags.append("descended" if descended else "not_descended")
    j = j_functional(homogenize(disc), np.eye(p.size + 1)[0])
    logger.info(f"Boundary search at {p}: distance {distance:.4g} (threshold {threshold:.4g}), flags {flags}")
    return DiscSearchResult(disc=disc, j_value=j, boundary_distance=distance, feasible=descended, center=p,
                            iterations=total_iterations, seed=config.seed, degree=config.degree,
                            margin=threshold, history=history, flags=flags)
