# tools/projgeom.py - Projective-space primitives for hullscope
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, TYPE_CHECKING

import numpy as np
from scipy.spatial import cKDTree

from tools.errors import DimensionMismatchError, InvalidInputError, NotLiftableError

if TYPE_CHECKING:
    from tools.discs import RationalDisc

logger = logging.getLogger("hullscope.projgeom")

UNIT_NORM_TOL = 1e-12
DEFAULT_ORBIT_COUNT = 64


def circle_nodes(m: int) -> np.ndarray:
    """Uniform (trapezoidal) quadrature nodes e^{2 pi i k/m} on the unit circle."""
    if m < 1:
        raise InvalidInputError(f"Quadrature node count must be positive, got {m}")
    return np.exp(2j * np.pi * np.arange(m) / m)


def _as_complex_vector(z: Sequence[complex]) -> np.ndarray:
    arr = np.array(z, dtype=complex).ravel()
    if arr.size == 0:
        raise InvalidInputError("Empty coordinate vector")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"Non-finite coordinates: {arr}")
    return arr


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """
    A point of P^n stored through a unit-norm homogeneous representative.

    Use `project` to build one from an arbitrary nonzero vector; the constructor
    only validates, it never renormalizes, so stored representatives survive
    serialization bit for bit.
    """
    rep: np.ndarray

    def __post_init__(self):
        rep = _as_complex_vector(self.rep)
        if rep.size < 2:
            raise InvalidInputError("A projective point needs at least two homogeneous coordinates")
        norm = np.linalg.norm(rep)
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise InvalidInputError(f"Representative is not unit norm (|rep| = {norm!r})")
        rep.setflags(write=False)
        object.__setattr__(self, "rep", rep)

    @property
    def n(self) -> int:
        return self.rep.size - 1

    def to_affine(self, chart: int = 0) -> np.ndarray:
        """Affine coordinates in the chart {z_chart = 1}."""
        if abs(self.rep[chart]) < 1e-14:
            raise InvalidInputError(f"Point lies on the hyperplane z_{chart} = 0 (at infinity of the chart)")
        w = self.rep / self.rep[chart]
        return np.delete(w, chart)

    def __repr__(self) -> str:
        coords = ":".join(f"{c:.4g}" for c in self.rep)
        return f"ProjectivePoint([{coords}])"


def project(z: Sequence[complex]) -> ProjectivePoint:
    """
    The standard projection C^{n+1} minus the origin onto P^n.

    Args:
        z: Nonzero complex vector of length n+1

    Returns:
        The projective point [z], stored as z/|z|
    """
    arr = _as_complex_vector(z)
    norm = np.linalg.norm(arr)
    if norm == 0.0:
        raise InvalidInputError("Cannot project the zero vector")
    return ProjectivePoint(arr / norm)


def from_affine(w: Sequence[complex]) -> ProjectivePoint:
    """The point [1 : w] of the standard chart {z_0 = 1}."""
    return project(np.concatenate(([1.0 + 0j], _as_complex_vector(w))))


def _aligned_chord(u: np.ndarray, v: np.ndarray, inner: np.ndarray) -> np.ndarray:
    """|u - e^{i phi} v| for the phase that makes <u, e^{i phi} v> = |<u, v>|; rows are points."""
    modulus = np.abs(inner)
    phase = np.where(modulus > 0, np.conj(inner) / np.where(modulus > 0, modulus, 1.0), 1.0)
    return np.linalg.norm(u - phase[..., None] * v, axis=-1)


def fs_distance(x: ProjectivePoint, y: ProjectivePoint) -> float:
    """
    Geodesic Fubini-Study distance arccos|<x, y>| on unit representatives.

    Evaluated as 2 arcsin(c/2) with c the chord between phase-aligned
    representatives, which keeps full precision for nearby points.
    """
    if x.n != y.n:
        raise DimensionMismatchError(f"Points live in P^{x.n} and P^{y.n}")
    chord = _aligned_chord(x.rep[None, :], y.rep[None, :], np.array([np.vdot(x.rep, y.rep)]))[0]
    return float(2.0 * np.arcsin(min(1.0, chord / 2.0)))


def sphere_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Geodesic distance on the unit sphere of C^{n+1}, arccos Re<u, v> = 2 arcsin(|u - v|/2)."""
    chord = float(np.linalg.norm(np.asarray(u) - np.asarray(v)))
    return float(2.0 * np.arcsin(min(1.0, chord / 2.0)))


def _real_embedding(points: np.ndarray) -> np.ndarray:
    return np.hstack([points.real, points.imag])


@dataclass(eq=False)
class SampledCompact:
    """
    A finite point cloud standing in for a compact set.

    In projective mode the rows of `points` are unit representatives in
    C^{n+1}; in affine mode they are points of C^n. The `connected` and
    `circular` flags are asserted by the caller; circularity is spot-checked
    at theta = pi/2 against the declared resolution.
    """
    points: np.ndarray
    mode: str = "projective"
    connected: bool = False
    circular: bool = False
    resolution: Optional[float] = None
    name: str = ""

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=complex))
        if pts.size == 0:
            raise InvalidInputError("A sampled compact set needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("Sample contains non-finite coordinates")
        if self.mode not in ("projective", "affine"):
            raise InvalidInputError(f"Unknown sample mode '{self.mode}'")
        if self.mode == "projective":
            if pts.shape[1] < 2:
                raise InvalidInputError("Projective samples need at least two homogeneous coordinates")
            norms = np.linalg.norm(pts, axis=1)
            if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOL):
                raise InvalidInputError("Projective samples must be stored as unit-norm representatives")
        self.points = pts
        if self.resolution is None:
            self.resolution = sample_resolution(self)
        if self.circular and self.mode == "affine":
            self._check_circular()

    @property
    def dim(self) -> int:
        """Number of stored coordinates per sample."""
        return self.points.shape[1]

    @property
    def n(self) -> int:
        return self.dim - 1 if self.mode == "projective" else self.dim

    def __len__(self) -> int:
        return self.points.shape[0]

    @cached_property
    def tree(self) -> cKDTree:
        return cKDTree(_real_embedding(self.points))

    def homogeneous_points(self) -> np.ndarray:
        """Unit representatives in C^{n+1}; affine samples are embedded as [1 : z]."""
        if self.mode == "projective":
            return self.points
        lifted = np.hstack([np.ones((len(self), 1), dtype=complex), self.points])
        return lifted / np.linalg.norm(lifted, axis=1, keepdims=True)

    def nearest_distance(self, query: np.ndarray) -> np.ndarray:
        """
        Distance from each query row to the nearest sample.

        Projective mode uses the Fubini-Study distance (query rows may be any
        nonzero representatives); affine mode uses the Euclidean distance.
        """
        q = np.atleast_2d(np.asarray(query, dtype=complex))
        if q.shape[1] != self.dim:
            raise DimensionMismatchError(f"Query has {q.shape[1]} coordinates, sample has {self.dim}")
        if self.mode == "affine":
            dist, _ = self.tree.query(_real_embedding(q))
            return np.asarray(dist, dtype=float)
        q = q / np.linalg.norm(q, axis=1, keepdims=True)
        out = np.empty(q.shape[0])
        # chunked to bound the size of the Gram block
        for start in range(0, q.shape[0], 256):
            rows = q[start:start + 256]
            gram = rows.conj() @ self.points.T
            nearest = np.argmax(np.abs(gram), axis=1)
            inner = gram[np.arange(rows.shape[0]), nearest]
            chord = _aligned_chord(rows, self.points[nearest], inner)
            out[start:start + 256] = 2.0 * np.arcsin(np.minimum(1.0, chord / 2.0))
        return out

    def contains(self, query: np.ndarray, tol: float) -> bool:
        return bool(self.nearest_distance(query)[0] <= tol)

    def _check_circular(self):
        rotated = 1j * self.points
        worst = float(self.nearest_distance(rotated).max())
        if worst > self.resolution * (1 + 1e-9) + 1e-12:
            raise InvalidInputError(
                f"Sample asserted circular but a rotated point is {worst:.3g} away "
                f"(declared resolution {self.resolution:.3g})"
            )


def sample_resolution(K: SampledCompact) -> float:
    """
    Largest nearest-neighbour spacing in the cloud.

    For projective samples the chordal spacing d of representatives is turned
    into the geodesic bound 2 arcsin(d/2), which dominates the Fubini-Study spacing.
    """
    if len(K) < 2:
        return 0.0
    tree = cKDTree(_real_embedding(K.points))
    dist, _ = tree.query(_real_embedding(K.points), k=2)
    spacing = float(dist[:, 1].max())
    if K.mode == "projective":
        return float(2.0 * np.arcsin(min(1.0, spacing / 2.0)))
    return spacing


@dataclass(eq=False)
class SphereLift:
    """
    Sampling of S_K: every base representative followed by its circle orbit.

    Row b*m + k holds e^{2 pi i k/m} times base point b.
    """
    points: np.ndarray
    orbit_count: int

    @property
    def base_count(self) -> int:
        return self.points.shape[0] // self.orbit_count

    def check_invariants(self, tol: float = UNIT_NORM_TOL) -> bool:
        norms = np.linalg.norm(self.points, axis=1)
        if np.any(np.abs(norms - 1.0) > tol):
            return False
        m = self.orbit_count
        blocks = self.points.reshape(self.base_count, m, -1)
        expected = circle_nodes(m)[None, :, None] * blocks[:, :1, :]
        return bool(np.allclose(blocks, expected, rtol=0.0, atol=1e-12))


def build_sphere_lift(K: SampledCompact, m: int = DEFAULT_ORBIT_COUNT) -> SphereLift:
    """
    Sample S_K = S intersected with the cone over K.

    Args:
        K: Sampled compact set (affine samples are embedded through [1 : z])
        m: Number of circle-orbit samples per base point

    Returns:
        The SphereLift with m rotated copies of every unit representative
    """
    if m < 1:
        raise InvalidInputError(f"Orbit count must be at least 1, got {m}")
    base = K.homogeneous_points()
    phases = circle_nodes(m)
    points = (phases[None, :, None] * base[:, None, :]).reshape(-1, base.shape[1])
    logger.debug(f"Built sphere lift with {points.shape[0]} points ({len(K)} base x {m} orbit)")
    return SphereLift(points=points, orbit_count=m)


def polydisc_hull_radius(lift: SphereLift, x: ProjectivePoint) -> float:
    """
    Radius of the hull disc over x when the lift is a full torus.

    For a lifted torus the polynomial hull is the closed polydisc with
    polyradius rho_i = max |z_i|, which meets the line L_x in the disc of
    radius min_i rho_i/|x_i|.
    """
    if lift.points.shape[1] != x.rep.size:
        raise DimensionMismatchError("Lift and query point differ in dimension")
    rho = np.abs(lift.points).max(axis=0)
    mods = np.abs(x.rep)
    active = mods > 1e-14
    return float(np.min(rho[active] / mods[active]))


def lift_disc(f: "RationalDisc") -> "RationalDisc":
    """
    Lift a disc in P^n to C^{n+1} minus the origin.

    The polynomial component vector is its own lift once its components have
    no common zero on the closed disc; a scalar denominator is dropped since
    it does not change the projective image.
    """
    from tools.discs import RationalDisc, common_zeros_on_closed_disc

    zeros = common_zeros_on_closed_disc(f.coeffs)
    if zeros.size:
        raise NotLiftableError(f"Components share zeros on the closed disc at {zeros}")
    return RationalDisc(f.coeffs.copy(), mode="affine")


def blp_constant(discs: Sequence["RationalDisc"], nodes: int = 1024) -> float:
    """
    Smallest empirical C in sup_t |F_j(e^{it})| <= C |F_j(0)| over a family of lifts.

    Args:
        discs: Lifted discs F_j into C^{n+1} minus the origin
        nodes: Number of quadrature nodes on the circle

    Returns:
        sup_j max_t |F_j(e^{it})| / |F_j(0)|
    """
    if not discs:
        raise InvalidInputError("blp_constant needs at least one lifted disc")
    ts = circle_nodes(nodes)
    best = 0.0
    for F in discs:
        center = np.linalg.norm(F.evaluate(0.0))
        if center == 0.0:
            raise InvalidInputError("Lifted disc vanishes at its center")
        boundary = np.linalg.norm(F.evaluate(ts), axis=-1)
        if boundary.min() == 0.0:
            raise InvalidInputError("Lifted disc vanishes on the boundary circle")
        best = max(best, float(boundary.max() / center))
    return best
