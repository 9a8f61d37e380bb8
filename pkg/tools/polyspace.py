# tools/polyspace.py - Polynomial spaces, the Lawson Chebyshev solver and extremal functions
import math
import logging
from dataclasses import dataclass, field, asdict
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la

from tools.errors import DimensionMismatchError, InvalidInputError
from tools.helper_functions import config_from_dict
from tools.projgeom import ProjectivePoint, SampledCompact

logger = logging.getLogger("hullscope.polyspace")

Exponent = Tuple[int, ...]


@dataclass
class SolverConfig:
    """Knobs of the Chebyshev solver and of the finite/infinite discretization."""
    tolerance: float = 1e-8
    max_iterations: int = 500
    cap: float = math.log(1e3)
    dmax: int = 8
    sample_tol: float = 1e-9
    growth_threshold: float = 0.02
    rank_tol: float = 1e-12

    @classmethod
    def from_dict(cls, data: Optional[Dict]) -> "SolverConfig":
        return config_from_dict(cls, data or {})

    def to_dict(self) -> Dict:
        return asdict(self)


def _compositions(nvars: int, total: int) -> List[Exponent]:
    if nvars == 1:
        return [(total,)]
    out = []
    for first in range(total, -1, -1):
        for rest in _compositions(nvars - 1, total - first):
            out.append((first,) + rest)
    return out


def monomial_basis(n: int, d: int) -> List[Exponent]:
    """
    Exponents of the degree-d monomials in n+1 variables.

    Graded lexicographic order, so (d, 0, ..., 0) comes first. The list has
    binomial(n+d, n) entries.
    """
    if n < 1 or d < 0:
        raise InvalidInputError(f"monomial_basis needs n >= 1 and d >= 0, got n={n}, d={d}")
    return _compositions(n + 1, d)


def affine_basis(n: int, d: int) -> List[Exponent]:
    """Exponents of all monomials of degree <= d in n variables, by increasing degree."""
    if n < 1 or d < 0:
        raise InvalidInputError(f"affine_basis needs n >= 1 and d >= 0, got n={n}, d={d}")
    out: List[Exponent] = []
    for k in range(d + 1):
        out.extend(_compositions(n, k))
    return out


def monomial_matrix(points: np.ndarray, exponents: Sequence[Exponent]) -> np.ndarray:
    """
    Vandermonde-type matrix V[i, j] = points[i] ** exponents[j] (product over coordinates).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    exps = np.asarray(exponents, dtype=int)
    if exps.ndim != 2 or exps.shape[1] != pts.shape[1]:
        raise DimensionMismatchError(
            f"Exponents of length {exps.shape[-1]} do not match points with {pts.shape[1]} coordinates"
        )
    top = int(exps.max()) if exps.size else 0
    out = np.ones((pts.shape[0], exps.shape[0]), dtype=complex)
    for j in range(pts.shape[1]):
        powers = pts[:, j:j + 1] ** np.arange(top + 1)
        out *= powers[:, exps[:, j]]
    return out


@dataclass(eq=False)
class HomPoly:
    """A homogeneous polynomial of degree d in n+1 variables, a section of O(d) on P^n."""
    n: int
    d: int
    coeffs: Dict[Exponent, complex]

    def __post_init__(self):
        for alpha in self.coeffs:
            if len(alpha) != self.n + 1 or sum(alpha) != self.d or min(alpha) < 0:
                raise InvalidInputError(f"Multi-index {alpha} is not of degree {self.d} in {self.n + 1} variables")

    @classmethod
    def from_vector(cls, n: int, d: int, vector: Sequence[complex]) -> "HomPoly":
        basis = monomial_basis(n, d)
        if len(vector) != len(basis):
            raise DimensionMismatchError(f"Expected {len(basis)} coefficients, got {len(vector)}")
        return cls(n=n, d=d, coeffs={alpha: complex(c) for alpha, c in zip(basis, vector) if c != 0})

    def exponents(self) -> List[Exponent]:
        return list(self.coeffs)

    def evaluate(self, z: np.ndarray):
        """Evaluate at one point (shape (n+1,)) or a stack of points (shape (..., n+1))."""
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.n + 1:
            raise DimensionMismatchError(f"Point has {z.shape[-1]} coordinates, polynomial expects {self.n + 1}")
        if not self.coeffs:
            values = np.zeros(z.shape[:-1], dtype=complex)
        else:
            exps = self.exponents()
            vec = np.array([self.coeffs[a] for a in exps])
            values = (monomial_matrix(z.reshape(-1, self.n + 1), exps) @ vec).reshape(z.shape[:-1])
        return complex(values) if values.ndim == 0 else values


def section_norm(P: HomPoly, x: ProjectivePoint) -> float:
    """|P(z)|/|z|^d, evaluated on the unit representative of x."""
    if P.n != x.n:
        raise DimensionMismatchError(f"Section on P^{P.n} evaluated at a point of P^{x.n}")
    return abs(P.evaluate(x.rep))


@dataclass
class ChebyshevResult:
    """
    Outcome of one constrained minimax solve.

    `ratio` is |P(x)| / max_K |P| for the stored witness and `value` is its
    d-th root; both are re-evaluated from the witness, never taken from the
    iteration, so they are certified lower bounds on the sample.
    """
    degree: int
    value: float
    ratio: float
    witness: np.ndarray
    exponents: List[Exponent]
    iterations: int
    flags: List[str] = field(default_factory=list)

    def reevaluate(self, sample_points: np.ndarray, query: np.ndarray) -> float:
        """Recompute the d-th root ratio of the witness from scratch."""
        V = monomial_matrix(sample_points, self.exponents)
        target = monomial_matrix(np.asarray(query, dtype=complex)[None, :], self.exponents)[0]
        at_x, sup_k = witness_ratio(V, target, self.witness)
        return (at_x / sup_k) ** (1.0 / self.degree)


def _linear_form_power(point: np.ndarray, d: int, exponents: Sequence[Exponent]) -> np.ndarray:
    """Coefficients of <z, point>^d = (sum conj(point_i) z_i)^d in the given basis."""
    conj = np.conj(point)
    coeffs = np.empty(len(exponents), dtype=complex)
    for k, alpha in enumerate(exponents):
        multinomial = math.factorial(d)
        for a in alpha:
            multinomial //= math.factorial(a)
        coeffs[k] = multinomial * np.prod(conj ** np.asarray(alpha))
    return coeffs


def witness_ratio(V: np.ndarray, target: np.ndarray, coeffs: np.ndarray) -> Tuple[float, float]:
    """Return (|P(x)|, max_K |P|) for coefficient vector coeffs."""
    return abs(complex(target @ coeffs)), float(np.max(np.abs(V @ coeffs)))


def lawson_minimax(V: np.ndarray, target: np.ndarray,
                   config: SolverConfig) -> Tuple[np.ndarray, int, List[str]]:
    """
    Minimize max_i |(V c)_i| subject to target . c = 1.

    The constraint is eliminated by writing c = c0 + Z y with Z an orthonormal
    null-space basis, the resulting matrix V Z is orthonormalized by pivoted
    QR, and Lawson's iteratively reweighted least squares runs on the
    orthonormal columns.

    Args:
        V: Sampled basis matrix, one row per sample point
        target: Basis values at the query point
        config: Solver tolerances

    Returns:
        (coefficients, iterations, flags)
    """
    flags: List[str] = []
    t_norm2 = float(np.vdot(target, target).real)
    if t_norm2 == 0.0:
        raise InvalidInputError("Every basis function vanishes at the query point")
    c0 = np.conj(target) / t_norm2
    b = V @ c0

    if target.size == 1:
        return c0, 0, flags

    Z = la.null_space(target[None, :])
    A = V @ Z
    Q, R, piv = la.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > config.rank_tol * diag[0])) if diag.size and diag[0] > 0 else 0
    if rank < Z.shape[1]:
        flags.append("rank_deficient")
        logger.warning(f"Sampled basis is rank deficient ({rank} of {Z.shape[1]} directions determined)")
    Qr = Q[:, :rank]

    n_samples = V.shape[0]
    weights = np.full(n_samples, 1.0 / n_samples)
    best_u = np.zeros(rank, dtype=complex)
    best_err = float(np.max(np.abs(b)))
    previous = None
    converged = False
    iterations = 0

    if rank > 0:
        for iterations in range(1, config.max_iterations + 1):
            sw = np.sqrt(weights)
            u, *_ = la.lstsq(sw[:, None] * Qr, -sw * b)
            residual = b + Qr @ u
            modulus = np.abs(residual)
            err = float(modulus.max())
            if err < best_err:
                best_err, best_u = err, u
            if err == 0.0:
                converged = True
                break
            lower = float(np.sqrt(np.sum(weights * modulus ** 2)))
            if (err - lower) <= config.tolerance * err:
                converged = True
                break
            if previous is not None and abs(previous - err) <= config.tolerance * err:
                converged = True
                break
            previous = err
            weights = weights * modulus
            total = weights.sum()
            if total == 0.0:
                break
            weights /= total
    else:
        converged = True

    if not converged:
        flags.append("not_converged")
        logger.warning(f"Lawson iteration stopped after {iterations} iterations without converging")

    y = np.zeros(Z.shape[1], dtype=complex)
    if rank > 0:
        y[piv[:rank]] = la.solve_triangular(R[:rank, :rank], best_u)
    return c0 + Z @ y, iterations, flags


def _keep_better(V: np.ndarray, target: np.ndarray, coeffs: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    """Return whichever witness certifies the larger ratio."""
    at_x, sup_k = witness_ratio(V, target, coeffs)
    fb_x, fb_k = witness_ratio(V, target, fallback)
    if sup_k == 0.0:
        return coeffs
    if fb_k > 0.0 and fb_x / fb_k > at_x / sup_k:
        return fallback
    return coeffs


def _finish(V: np.ndarray, target: np.ndarray, coeffs: np.ndarray, d: int,
            exponents: List[Exponent], iterations: int, flags: List[str]) -> ChebyshevResult:
    at_x, sup_k = witness_ratio(V, target, coeffs)
    if sup_k == 0.0 or not np.isfinite(sup_k):
        flags.append("unbounded")
        ratio = math.inf
    else:
        ratio = at_x / sup_k
        if ratio > 1e12:
            flags.append("unbounded")
    value = ratio ** (1.0 / d) if np.isfinite(ratio) else math.inf
    return ChebyshevResult(degree=d, value=value, ratio=ratio, witness=coeffs,
                           exponents=exponents, iterations=iterations, flags=flags)


def chebyshev_ratio(K: SampledCompact, x: ProjectivePoint, d: int,
                    config: Optional[SolverConfig] = None) -> ChebyshevResult:
    """
    Degree-d approximant C_d(x) of the best constant function.

    Solves min max_K |P| over degree-d homogeneous P with P(x) = 1; the
    reciprocal of the optimum is sup |P(x)| / max_K |P|, whose d-th root is C_d.

    Args:
        K: Sampled compact set (affine samples are embedded as [1 : z])
        x: Query point
        d: Degree
        config: Solver configuration

    Returns:
        ChebyshevResult with the re-evaluated value and its witness
    """
    config = config or SolverConfig()
    if d < 1:
        raise InvalidInputError(f"Degree must be at least 1, got {d}")
    reps = K.homogeneous_points()
    if reps.shape[1] != x.rep.size:
        raise DimensionMismatchError(f"Sample lives in C^{reps.shape[1]}, query point in C^{x.rep.size}")

    exponents = monomial_basis(x.n, d)
    V = monomial_matrix(reps, exponents)
    target = monomial_matrix(x.rep[None, :], exponents)[0]

    if K.mode == "projective" and K.contains(x.rep, config.sample_tol):
        coeffs = _linear_form_power(x.rep, d, exponents)
        return ChebyshevResult(degree=d, value=1.0, ratio=1.0, witness=coeffs,
                               exponents=exponents, iterations=0, flags=["in_sample"])

    coeffs, iterations, flags = lawson_minimax(V, target, config)
    coeffs = _keep_better(V, target, coeffs, _linear_form_power(x.rep, d, exponents))
    result = _finish(V, target, coeffs, d, exponents, iterations, flags)
    logger.debug(f"C_{d} at {x!r} = {result.value:.6g} after {iterations} iterations")
    return result


@dataclass
class BestConstantTrace:
    """Per-degree C_d(x) values, their running maximum and the radius estimate 1/C."""
    x: ProjectivePoint
    degrees: List[int]
    values: List[float]
    cumulative: List[float]
    results: List[ChebyshevResult]
    flags: List[str]

    @property
    def radius(self) -> float:
        last = self.cumulative[-1]
        return 0.0 if not np.isfinite(last) else 1.0 / last

    @property
    def log_values(self) -> np.ndarray:
        return np.log(np.asarray(self.values, dtype=float))


def best_constant(K: SampledCompact, x: ProjectivePoint, dmax: int,
                  config: Optional[SolverConfig] = None) -> BestConstantTrace:
    """
    Run chebyshev_ratio for d = 1..dmax.

    The running maximum is the degree-truncated best constant; every value
    is a lower bound for C_K(x) because the sample replaces K.
    """
    config = config or SolverConfig()
    if dmax < 1:
        raise InvalidInputError(f"dmax must be at least 1, got {dmax}")
    results = [chebyshev_ratio(K, x, d, config) for d in range(1, dmax + 1)]
    values = [r.value for r in results]
    cumulative = np.maximum.accumulate(np.asarray(values, dtype=float)).tolist()
    flags = sorted({flag for r in results for flag in r.flags})
    logger.info(f"Best constant at {x!r}: C_<= {dmax} = {cumulative[-1]:.6g}")
    return BestConstantTrace(x=x, degrees=list(range(1, dmax + 1)), values=values,
                             cumulative=cumulative, results=results, flags=flags)


@dataclass
class ExtremalSample:
    """
    Degree-truncated Siciak-Zaharyuta values at an affine point.

    `raw_values` are the per-degree V_d; `v_values` is their running maximum
    and is the monotone trace used for classification.
    """
    z: np.ndarray
    degrees: List[int]
    raw_values: List[float]
    v_values: List[float]
    finite_flag: bool
    results: List[ChebyshevResult]
    flags: List[str]


def affine_extremal(K: SampledCompact, z: Sequence[complex], dmax: int,
                    config: Optional[SolverConfig] = None) -> ExtremalSample:
    """
    Degree-truncated V_K(z) = sup (1/d) log |p(z)| over max_K |p| <= 1, deg p <= d.

    Args:
        K: Affine sampled compact set in C^n
        z: Query point in C^n
        dmax: Largest degree
        config: Solver configuration; config.cap is the finiteness threshold

    Returns:
        ExtremalSample with the monotone trace and the finiteness classification
    """
    config = config or SolverConfig()
    if K.mode != "affine":
        raise InvalidInputError("affine_extremal needs an affine sample")
    if dmax < 1:
        raise InvalidInputError(f"dmax must be at least 1, got {dmax}")
    z = np.asarray(z, dtype=complex).ravel()
    if z.size != K.dim:
        raise DimensionMismatchError(f"Query point has {z.size} coordinates, sample has {K.dim}")
    if not np.all(np.isfinite(z)):
        raise InvalidInputError("Query point must be finite")

    in_sample = K.contains(z, config.sample_tol)
    results: List[ChebyshevResult] = []
    for d in range(1, dmax + 1):
        exponents = affine_basis(K.dim, d)
        V = monomial_matrix(K.points, exponents)
        target = monomial_matrix(z[None, :], exponents)[0]
        if in_sample:
            coeffs = np.zeros(len(exponents), dtype=complex)
            coeffs[0] = 1.0
            results.append(ChebyshevResult(degree=d, value=1.0, ratio=1.0, witness=coeffs,
                                           exponents=exponents, iterations=0, flags=["in_sample"]))
            continue
        coeffs, iterations, flags = lawson_minimax(V, target, config)
        constant = np.zeros(len(exponents), dtype=complex)
        constant[0] = 1.0
        coeffs = _keep_better(V, target, coeffs, constant)
        results.append(_finish(V, target, coeffs, d, exponents, iterations, flags))

    raw = [math.log(r.ratio) / r.degree if np.isfinite(r.ratio) else math.inf for r in results]
    cumulative = np.maximum.accumulate(np.asarray(raw, dtype=float)).tolist()
    flags = sorted({flag for r in results for flag in r.flags})
    finite = bool(cumulative[-1] <= config.cap)
    logger.info(f"V_K at {z} through degree {dmax}: {cumulative[-1]:.6g} (finite={finite})")
    return ExtremalSample(z=z, degrees=list(range(1, dmax + 1)), raw_values=raw,
                          v_values=cumulative, finite_flag=finite, results=results, flags=flags)


def lift_potential(v: Callable[[np.ndarray], float], z: Sequence[complex]) -> float:
    """
    log|z_0| + v(z_1/z_0, ..., z_n/z_0), the circle-invariant lift of a Lelong-class v.

    Returns -inf on the hyperplane z_0 = 0.
    """
    z = np.asarray(z, dtype=complex).ravel()
    if z.size < 2:
        raise InvalidInputError("lift_potential needs at least two homogeneous coordinates")
    if z[0] == 0:
        return -math.inf
    return math.log(abs(z[0])) + float(v(z[1:] / z[0]))


def omega_lower_bound(v_value: float, w: Sequence[complex]) -> float:
    """The omega-psh function v' = V(w) - (1/2) log(1 + |w|^2) at the point [1 : w]."""
    w = np.asarray(w, dtype=complex).ravel()
    return v_value - 0.5 * math.log1p(float(np.vdot(w, w).real))
