# tools/discs.py - Rational analytic discs, divisors, Blaschke products and disc functionals
import math
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.polynomial.polynomial as npp

from tools.errors import (
    BoundaryContactError,
    DimensionMismatchError,
    DiscInHyperplaneError,
    InfiniteJError,
    InvalidInputError,
    NotLiftableError,
    NumericalCancellationError,
)
from tools.projgeom import ProjectivePoint, SampledCompact, circle_nodes, fs_distance, project

logger = logging.getLogger("hullscope.discs")

GCD_TOL = 1e-10
BOUNDARY_MARGIN = 1e-6
CLUSTER_TOL = 1e-5
ROUNDING_EPS = 1e-13
ORIGIN_TOL = 1e-14
DEFAULT_NODES = 1024


def _trim(coeffs: np.ndarray, rel_tol: float) -> np.ndarray:
    """Drop trailing (highest-degree) coefficients that are negligible relative to the largest one."""
    c = np.asarray(coeffs, dtype=complex)
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        return np.zeros(1, dtype=complex)
    last = c.size - 1
    while last > 0 and abs(c[last]) <= rel_tol * scale:
        last -= 1
    return c[:last + 1]


def poly_gcd(a: np.ndarray, b: np.ndarray, tol: float = GCD_TOL) -> np.ndarray:
    """
    Monic greatest common divisor of two ascending coefficient arrays.

    Euclid's algorithm; remainder coefficients below tol times the current
    coefficient scale count as zero.
    """
    a = _trim(a, tol)
    b = _trim(b, tol)
    if np.all(a == 0):
        return b / b[-1] if np.any(b != 0) else a
    while np.any(b != 0):
        scale = max(np.max(np.abs(a)), np.max(np.abs(b)))
        if b.size == 1:
            return np.ones(1, dtype=complex)
        _, r = npp.polydiv(a, b)
        r = np.where(np.abs(r) <= tol * scale, 0.0, r)
        a, b = b, (_trim(r, tol) if np.any(r != 0) else np.zeros(1, dtype=complex))
    return a / a[-1]


def common_zeros_on_closed_disc(coeffs: np.ndarray, tol: float = GCD_TOL) -> np.ndarray:
    """Common zeros of all component polynomials lying in the closed unit disc."""
    rows = [row for row in np.atleast_2d(coeffs) if np.any(np.abs(row) > 0)]
    if not rows:
        raise InvalidInputError("Every component polynomial is identically zero")
    g = rows[0]
    for row in rows[1:]:
        g = poly_gcd(g, row, tol)
        if g.size == 1:
            return np.zeros(0, dtype=complex)
    g = _trim(g, tol)
    if g.size == 1:
        return np.zeros(0, dtype=complex)
    roots = npp.polyroots(g)
    return roots[np.abs(roots) <= 1.0 + tol]


@dataclass(eq=False)
class RationalDisc:
    """
    An analytic disc given by polynomial components over a scalar denominator.

    `coeffs[i]` holds the ascending coefficients of component i. In projective
    mode the components are homogeneous coordinates in P^n and may not share a
    zero on the closed disc; in affine mode they are coordinates in C^N. The
    optional denominator must not vanish on the closed disc.
    """
    coeffs: np.ndarray
    mode: str = "projective"
    denominator: Optional[np.ndarray] = None

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=complex))
        if not np.all(np.isfinite(c)):
            raise InvalidInputError("Disc coefficients must be finite")
        if not np.any(c != 0):
            raise InvalidInputError("At least one component must be nonzero")
        if self.mode not in ("projective", "affine"):
            raise InvalidInputError(f"Unknown disc mode '{self.mode}'")
        self.coeffs = c
        if self.denominator is not None:
            den = _trim(np.asarray(self.denominator, dtype=complex).ravel(), 0.0)
            if not np.any(den != 0):
                raise InvalidInputError("Denominator is identically zero")
            if den.size > 1:
                roots = npp.polyroots(den)
                if np.any(np.abs(roots) <= 1.0 + GCD_TOL):
                    raise InvalidInputError("Denominator vanishes on the closed unit disc")
            self.denominator = den
        if self.mode == "projective" and self.components >= 2:
            zeros = common_zeros_on_closed_disc(c)
            if zeros.size:
                raise NotLiftableError(f"Components share zeros on the closed disc at {zeros}")

    @property
    def components(self) -> int:
        return self.coeffs.shape[0]

    @property
    def degree(self) -> int:
        num = self.coeffs.shape[1] - 1
        den = 0 if self.denominator is None else self.denominator.size - 1
        return max(num, den)

    def evaluate(self, zeta: Union[complex, np.ndarray]) -> np.ndarray:
        """Component vector at zeta; the result has shape zeta.shape + (components,)."""
        zeta = np.asarray(zeta, dtype=complex)
        values = np.moveaxis(npp.polyval(zeta, self.coeffs.T), 0, -1)
        if self.denominator is not None:
            values = values / npp.polyval(zeta, self.denominator)[..., None]
        return values

    def center(self) -> np.ndarray:
        return self.evaluate(0.0)

    def point(self, zeta: complex) -> ProjectivePoint:
        return project(self.evaluate(zeta))

    def boundary(self, m: int = DEFAULT_NODES) -> np.ndarray:
        return self.evaluate(circle_nodes(m))


@dataclass(eq=False)
class Divisor:
    """Finitely many points of the open disc with positive multiplicities."""
    points: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    multiplicities: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    boundary_margin: float = BOUNDARY_MARGIN

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        mult = np.asarray(self.multiplicities, dtype=int).ravel()
        if pts.size != mult.size:
            raise InvalidInputError("Divisor points and multiplicities differ in length")
        if np.any(mult < 1):
            raise InvalidInputError("Divisor multiplicities must be positive")
        if np.any(np.abs(pts) >= 1.0 - self.boundary_margin):
            raise BoundaryContactError(f"Divisor point within {self.boundary_margin} of the unit circle")
        self.points, self.multiplicities = pts, mult

    def __len__(self) -> int:
        return self.points.size

    @property
    def degree(self) -> int:
        return int(self.multiplicities.sum())

    def items(self) -> List[Tuple[complex, int]]:
        return [(complex(p), int(m)) for p, m in zip(self.points, self.multiplicities)]


@dataclass(eq=False)
class BlaschkeProduct:
    """Finite Blaschke product with the zeros of a divisor."""
    zeros: Divisor
    rotation: complex = 1.0

    def __post_init__(self):
        if abs(abs(self.rotation) - 1.0) > 1e-12:
            raise InvalidInputError("Blaschke rotation must be unimodular")

    def __call__(self, zeta: Union[complex, np.ndarray]) -> np.ndarray:
        zeta = np.asarray(zeta, dtype=complex)
        value = np.full(zeta.shape, self.rotation, dtype=complex)
        for a, m in self.zeros.items():
            value = value * ((zeta - a) / (1.0 - np.conj(a) * zeta)) ** m
        return value

    def value_at_zero(self) -> complex:
        value = complex(self.rotation)
        for a, m in self.zeros.items():
            value *= (-a) ** m
        return value


def _cluster_radius(q: np.ndarray, center: complex, k: int, tol: float) -> float:
    """
    Largest spread of a perturbed k-fold root of q around its centroid.

    Rounding of relative size eps splits a k-fold root into a ring of radius
    about (eps |q| / |t_k|)^(1/k), t_k being the k-th Taylor coefficient at
    the root. Never below tol.
    """
    if k == 1:
        return tol
    t_k = abs(npp.polyval(center, npp.polyder(q, k))) / math.factorial(k)
    if t_k == 0.0:
        return tol
    return max(tol, (ROUNDING_EPS * np.max(np.abs(q)) / t_k) ** (1.0 / k))


def _cluster(roots: np.ndarray, q: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Group roots that are the split images of one multiple root.

    Starting from each unassigned root, its nearest neighbours are added one
    at a time; the largest group whose spread fits the multiplicity-scaled
    radius becomes one (centroid, multiplicity) pair.
    """
    unassigned = list(range(roots.size))
    centroids, mults = [], []
    while unassigned:
        seed = unassigned[0]
        order = sorted(unassigned, key=lambda j: abs(roots[j] - roots[seed]))
        group = [seed]
        for k in range(2, len(order) + 1):
            members = roots[order[:k]]
            center = np.mean(members)
            if np.max(np.abs(members - center)) <= _cluster_radius(q, center, k, tol):
                group = order[:k]
        centroids.append(np.mean(roots[group]))
        mults.append(len(group))
        unassigned = [j for j in unassigned if j not in group]
    return np.array(centroids, dtype=complex), np.array(mults, dtype=int)


def _pairing(f: RationalDisc, hyperplane: Sequence[complex]) -> Tuple[np.ndarray, np.ndarray]:
    """The scalar polynomial <lambda, f> and its polished roots."""
    lam = np.asarray(hyperplane, dtype=complex).ravel()
    if lam.size != f.components:
        raise DimensionMismatchError(f"Hyperplane has {lam.size} coefficients, disc has {f.components} components")
    if not np.any(lam != 0):
        raise InvalidInputError("Hyperplane coefficients must not all vanish")
    q = lam @ f.coeffs
    scale = np.max(np.abs(f.coeffs)) * np.max(np.abs(lam))
    if np.max(np.abs(q)) <= 1e-14 * scale:
        raise DiscInHyperplaneError("The disc is contained in the hyperplane")
    q = _trim(q, 1e-14)
    if q.size == 1:
        return q, np.zeros(0, dtype=complex)
    roots = npp.polyroots(q)
    dq = npp.polyder(q)
    # one Newton polish step, skipped where the derivative vanishes (multiple roots)
    deriv = npp.polyval(roots, dq)
    safe = np.abs(deriv) > 1e-8 * np.max(np.abs(q))
    roots = np.where(safe, roots - npp.polyval(roots, q) / np.where(safe, deriv, 1.0), roots)
    return q, roots


def hyperplane_divisor(f: RationalDisc, hyperplane: Sequence[complex],
                       boundary_margin: float = BOUNDARY_MARGIN,
                       cluster_tol: float = CLUSTER_TOL) -> Divisor:
    """
    Intersection divisor of a disc with the hyperplane {<lambda, z> = 0}.

    Args:
        f: Disc in P^n
        hyperplane: Coefficient vector lambda
        boundary_margin: Roots closer than this to the unit circle are rejected
        cluster_tol: Smallest merge radius; a k-fold root gets a radius scaled like eps^(1/k)

    Returns:
        The divisor of zeros of <lambda, f> in the open disc
    """
    q, roots = _pairing(f, hyperplane)
    moduli = np.abs(roots)
    touching = np.abs(moduli - 1.0) <= boundary_margin
    if np.any(touching):
        raise BoundaryContactError(f"Hyperplane meets the disc near the boundary circle at {roots[touching]}")
    inside = roots[moduli < 1.0 - boundary_margin]
    if inside.size == 0:
        return Divisor(boundary_margin=boundary_margin)
    points, mults = _cluster(inside, q, cluster_tol)
    return Divisor(points=points, multiplicities=mults, boundary_margin=boundary_margin)


def j_from_divisor(divisor: Divisor) -> float:
    """J = -sum m log|zeta|; +inf when a divisor point sits at the origin."""
    if len(divisor) == 0:
        return 0.0
    if np.any(np.abs(divisor.points) < ORIGIN_TOL):
        return math.inf
    return float(-np.sum(divisor.multiplicities * np.log(np.abs(divisor.points))))


def j_functional(f: RationalDisc, hyperplane: Sequence[complex]) -> float:
    """The disc functional J(f) of the intersection divisor of f with the hyperplane."""
    return j_from_divisor(hyperplane_divisor(f, hyperplane))


def blaschke_from_divisor(divisor: Divisor) -> BlaschkeProduct:
    """Blaschke product with the zeros of the divisor; |B(0)| = exp(-J)."""
    return BlaschkeProduct(zeros=divisor)


def chart_realization(G: RationalDisc, hyperplane: Sequence[complex],
                      chart: Optional[Sequence[complex]] = None) -> Callable[[np.ndarray], np.ndarray]:
    """G written in the affine chart {<chart, z> = 1}: zeta -> G(zeta) / <chart, G(zeta)>."""
    chart_vec = _chart_vector(hyperplane, chart)

    def realized(zeta):
        values = G.evaluate(zeta)
        return values / (values @ chart_vec)[..., None]

    return realized


def _chart_vector(hyperplane: Sequence[complex], chart: Optional[Sequence[complex]]) -> np.ndarray:
    lam = np.asarray(hyperplane, dtype=complex).ravel()
    if chart is None:
        return lam
    chart_vec = np.asarray(chart, dtype=complex).ravel()
    if chart_vec.size != lam.size:
        raise DimensionMismatchError("Chart and hyperplane differ in length")
    scale = np.vdot(lam, chart_vec) / np.vdot(lam, lam)
    if np.linalg.norm(chart_vec - scale * lam) > 1e-12 * np.linalg.norm(chart_vec) or scale == 0:
        raise InvalidInputError("The chart functional must vanish exactly on the hyperplane")
    return chart_vec


def cancel_poles(G: RationalDisc, hyperplane: Sequence[complex],
                 chart: Optional[Sequence[complex]] = None,
                 boundary_margin: float = BOUNDARY_MARGIN,
                 cancel_tol: float = 1e-8) -> RationalDisc:
    """
    Remove the poles of G in the chart by multiplying with B/B(0).

    G in the chart {<chart, z> = 1} has poles exactly on its intersection
    divisor with the hyperplane. Multiplying by the Blaschke product of that
    divisor, normalized by B(0), cancels them and leaves a disc into C^{n+1}
    without zeros, with the same center and the same projective image.

    Args:
        G: Disc in P^n
        hyperplane: The hyperplane H = {<lambda, z> = 0}
        chart: Functional defining the chart, proportional to lambda (defaults to lambda)
        boundary_margin: Divisor points must stay this far inside the circle
        cancel_tol: Relative size below which F counts as vanishing

    Returns:
        F = (B/B(0)) G~ as an affine-mode RationalDisc with a denominator
    """
    chart_vec = _chart_vector(hyperplane, chart)
    lam = np.asarray(hyperplane, dtype=complex).ravel()
    chart_scale = complex(np.vdot(lam, chart_vec) / np.vdot(lam, lam))

    q, roots = _pairing(G, lam)
    if abs(q[0]) <= ORIGIN_TOL * np.max(np.abs(q)):
        raise InfiniteJError("The disc center lies on the hyperplane")
    divisor = hyperplane_divisor(G, lam, boundary_margin=boundary_margin)

    inside = roots[np.abs(roots) < 1.0 - boundary_margin]
    outside = roots[np.abs(roots) > 1.0 + boundary_margin]
    den = np.array([chart_scale * q[-1]], dtype=complex)
    if outside.size:
        den = npp.polymul(den, npp.polyfromroots(outside))
    b_zero = 1.0 + 0j
    for a in inside:
        den = npp.polymul(den, np.array([1.0, -np.conj(a)]))
        b_zero *= -a

    try:
        F = RationalDisc(G.coeffs / b_zero, mode="affine", denominator=den)
    except InvalidInputError as e:
        raise NumericalCancellationError(f"Pole cancellation left a singular denominator: {e}")

    if common_zeros_on_closed_disc(F.coeffs).size:
        raise NumericalCancellationError("Cancelled disc has a common zero on the closed disc")
    boundary = np.linalg.norm(F.boundary(256), axis=-1)
    if boundary.min() <= cancel_tol * boundary.max():
        raise NumericalCancellationError("Cancelled disc nearly vanishes on the boundary circle")

    logger.debug(f"Cancelled {divisor.degree} poles, |B(0)| = {abs(b_zero):.6g}")
    return F


def general_position(F: RationalDisc, seed: int = 0,
                     scale: float = 1e-8) -> Tuple[RationalDisc, Optional[np.ndarray]]:
    """
    Nudge a disc into C^{n+1} off the origin.

    When F has a zero on the closed disc its constant term is moved by scale
    times a random unit vector; the applied perturbation is returned (None
    when no nudge was needed).
    """
    if F.mode != "affine":
        raise InvalidInputError("general_position applies to discs into C^{n+1}")
    if not common_zeros_on_closed_disc(F.coeffs).size:
        return F, None
    rng = np.random.default_rng(seed)
    direction = rng.normal(size=F.components) + 1j * rng.normal(size=F.components)
    perturbation = scale * direction / np.linalg.norm(direction)
    coeffs = F.coeffs.copy()
    coeffs[:, 0] += perturbation
    logger.info(f"Disc passed through the origin; constant term perturbed by {np.linalg.norm(perturbation):.1e}")
    return RationalDisc(coeffs, mode="affine", denominator=F.denominator), perturbation


def escaping_line_disc(x: ProjectivePoint, p: ProjectivePoint, delta: float) -> RationalDisc:
    """
    The disc zeta -> [zeta p + delta x] on the projective line through x and p.

    Its center is x and its boundary stays within O(delta) of p, yet its
    lifts need a constant of order 1/delta in the bounded lifting inequality.
    """
    if delta <= 0:
        raise InvalidInputError("delta must be positive")
    if fs_distance(x, p) < 1e-12:
        raise InvalidInputError("x and p must be distinct points")
    return RationalDisc(np.column_stack([delta * x.rep, p.rep]), mode="projective")


def boundary_distances(f: RationalDisc, K: SampledCompact, m: int = DEFAULT_NODES) -> np.ndarray:
    """
    Distance from f(e^{2 pi i k/m}) to the nearest sample of K, for every node.

    Projective samples use the Fubini-Study distance. Affine samples use the
    Euclidean distance; a projective disc is then read in the chart {z_0 = 1}
    and nodes on the hyperplane at infinity are infinitely far.
    """
    values = f.boundary(m)
    if K.mode == "projective":
        if f.components != K.dim:
            raise DimensionMismatchError(f"Disc has {f.components} components, sample has {K.dim}")
        return K.nearest_distance(values)
    if f.mode == "projective":
        if f.components != K.dim + 1:
            raise DimensionMismatchError("Projective disc does not match the affine chart of the sample")
        z0 = values[:, 0]
        finite = np.abs(z0) > 1e-14
        out = np.full(m, math.inf)
        if np.any(finite):
            out[finite] = K.nearest_distance(values[finite, 1:] / z0[finite, None])
        return out
    if f.components != K.dim:
        raise DimensionMismatchError(f"Disc has {f.components} components, sample has {K.dim}")
    return K.nearest_distance(values)


def poletsky_measure(f: RationalDisc, K: SampledCompact, eps: float, m: int = DEFAULT_NODES) -> float:
    """
    Quadrature estimate of |{t : dist(f(e^{it}), K) < eps}|, a number in [0, 2 pi].
    """
    if eps <= 0:
        raise InvalidInputError("eps must be positive")
    if m < 16:
        raise InvalidInputError("At least 16 quadrature nodes are required")
    count = int(np.sum(boundary_distances(f, K, m) < eps))
    return 2.0 * math.pi * count / m


def _field_argument(f: RationalDisc, row: np.ndarray) -> Any:
    return project(row) if f.mode == "projective" else row


def poisson_functional(u: Callable[[Any], float], f: RationalDisc, m: int = DEFAULT_NODES,
                       with_flags: bool = False):
    """
    P_u(f) = mean of u(f(e^{it})) over m uniform nodes.

    u receives a ProjectivePoint for projective discs and a coordinate vector
    for affine ones. Nodes where u is -inf are dropped.

    Returns:
        The average, or (average, dropped node count) when with_flags is set
    """
    values = np.array([float(u(_field_argument(f, row))) for row in f.boundary(m)])
    finite = values > -math.inf
    dropped = int(np.sum(~finite))
    if dropped:
        logger.warning(f"Dropped {dropped} of {m} quadrature nodes where u = -inf")
    average = float(values[finite].mean()) if np.any(finite) else -math.inf
    return (average, dropped) if with_flags else average


@dataclass
class SubaverageCheck:
    """Both sides of u(f(0)) <= P_u(f) <= sup_U u (1 - |E|/2pi) + sup u |E|/2pi."""
    center_value: float
    poisson_value: float
    exceptional_measure: float
    upper_bound: float
    holds: bool


def subaverage_bound(u: Callable[[Any], float], f: RationalDisc, K: SampledCompact,
                     eps: float, m: int = DEFAULT_NODES) -> SubaverageCheck:
    """
    Check the plurisubharmonic mean-value chain for one disc.

    E is the set of nodes whose image lies outside the eps-neighbourhood U of
    K; when |E| is small the center value is controlled by sup_U u.
    """
    nodes = f.boundary(m)
    values = np.array([float(u(_field_argument(f, row))) for row in nodes])
    near = boundary_distances(f, K, m) < eps
    fraction = float(np.mean(~near))
    sup_near = float(values[near].max()) if np.any(near) else -math.inf
    sup_far = float(values[~near].max()) if np.any(~near) else -math.inf
    terms = []
    if np.any(near):
        terms.append(sup_near * (1.0 - fraction))
    if np.any(~near):
        terms.append(sup_far * fraction)
    bound = float(sum(terms))
    center = float(u(_field_argument(f, f.center())))
    poisson = float(values[values > -math.inf].mean()) if np.any(values > -math.inf) else -math.inf
    holds = center <= poisson + 1e-8 and poisson <= bound + 1e-12
    return SubaverageCheck(center_value=center, poisson_value=poisson,
                           exceptional_measure=2.0 * math.pi * fraction,
                           upper_bound=bound, holds=holds)


def homogenize(f: RationalDisc) -> RationalDisc:
    """The disc [den : P] in P^n of an affine disc P/den; projective discs pass through."""
    if f.mode == "projective":
        return f
    den = np.ones(1, dtype=complex) if f.denominator is None else f.denominator
    width = max(den.size, f.coeffs.shape[1])
    coeffs = np.zeros((f.components + 1, width), dtype=complex)
    coeffs[0, :den.size] = den
    coeffs[1:, :f.coeffs.shape[1]] = f.coeffs
    return RationalDisc(coeffs, mode="projective")
