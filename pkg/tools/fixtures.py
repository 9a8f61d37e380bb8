# tools/fixtures.py - Deterministic sample generators with closed-form oracle values
import math
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from tools.errors import InvalidInputError
from tools.projgeom import SampledCompact, circle_nodes

logger = logging.getLogger("hullscope.fixtures")

MIN_SAMPLES = 16


@dataclass
class OracleEntry:
    """A known value of some quantity at a point, with where it comes from."""
    point: List[complex]
    quantity: str
    value: float
    provenance: str


@dataclass
class Fixture:
    name: str
    compact: SampledCompact
    params: Dict[str, Any] = field(default_factory=dict)
    oracles: List[OracleEntry] = field(default_factory=list)

    def oracle(self, quantity: str) -> List[OracleEntry]:
        return [o for o in self.oracles if o.quantity == quantity]


def _check_samples(samples: int):
    if not isinstance(samples, int) or samples < MIN_SAMPLES:
        raise InvalidInputError(f"Sample counts must be integers >= {MIN_SAMPLES}, got {samples}")


def _torus_grid(samples: int) -> np.ndarray:
    nodes = circle_nodes(samples)
    s, t = np.meshgrid(nodes, nodes, indexing="ij")
    return np.column_stack([s.ravel(), t.ravel()])


def circle(samples: int = 256) -> Fixture:
    """The circle {[1 : e^{i theta}]} in P^1."""
    _check_samples(samples)
    pts = np.column_stack([np.ones(samples), circle_nodes(samples)]) / math.sqrt(2.0)
    K = SampledCompact(pts, mode="projective", connected=True, name="circle")
    oracles = [
        OracleEntry([1, 0], "C", math.sqrt(2.0), "bidisc hull of the lifted circle, polyradius 1/sqrt(2)"),
        OracleEntry([1, 0], "r", 1 / math.sqrt(2.0), "line over [1:0] meets the bidisc in radius 1/sqrt(2)"),
        OracleEntry([1, 1], "C", 1.0, "point of the sample"),
    ]
    return Fixture("circle", K, {"samples": samples}, oracles)


def torus3(samples: int = 32) -> Fixture:
    """The torus {[1 : e^{is} : e^{it}]} in P^2, samples x samples points."""
    _check_samples(samples)
    grid = _torus_grid(samples)
    pts = np.column_stack([np.ones(grid.shape[0]), grid]) / math.sqrt(3.0)
    K = SampledCompact(pts, mode="projective", connected=True, name="torus3")
    oracles = [OracleEntry([1, 0, 0], "C", math.sqrt(3.0), "tridisc hull of the lifted 3-torus, witness z0^d")]
    return Fixture("torus3", K, {"samples": samples}, oracles)


def torus2(samples: int = 64) -> Fixture:
    """The torus {|z1| = |z2| = 1} in C^2."""
    _check_samples(samples)
    K = SampledCompact(_torus_grid(samples), mode="affine", connected=True, circular=True, name="torus2")
    oracles = [
        OracleEntry([2, 0.5], "V", math.log(2.0), "V = max log+|z_i| on the bidisc"),
        OracleEntry([0.5, 0.5], "V", 0.0, "interior of the bidisc hull"),
        OracleEntry([2, 2], "V", math.log(2.0), "V = max log+|z_i| on the bidisc"),
        OracleEntry([0, 0], "boundary_distance", 0.0, "disc (zeta, zeta) has boundary on the torus"),
    ]
    return Fixture("torus2", K, {"samples": samples}, oracles)


def graph_curve(samples: int = 256, coefficients: Optional[Sequence[complex]] = None) -> Fixture:
    """
    The closed curve {(e^{i theta}, g(e^{i theta}))} in C^2 for a polynomial g.

    Its polynomial hull is the graph of g over the closed unit disc.
    """
    _check_samples(samples)
    coeffs = np.asarray([0, 0, 1] if coefficients is None else coefficients, dtype=complex)
    if coeffs.size == 0:
        raise InvalidInputError("graph-curve needs at least one coefficient")
    nodes = circle_nodes(samples)
    pts = np.column_stack([nodes, np.polynomial.polynomial.polyval(nodes, coeffs)])
    K = SampledCompact(pts, mode="affine", connected=True, name="graph-curve")
    g0 = complex(coeffs[0])
    oracles = [OracleEntry([0, g0], "V", 0.0, "graph of g over the disc lies in the hull")]
    return Fixture("graph-curve", K, {"samples": samples, "coefficients": coeffs.tolist()}, oracles)


def two_tori(samples: int = 32, sep: float = 0.5) -> Fixture:
    """
    Two disjoint tori in the unit sphere of C^2 bounding the annulus {z1 z2 = ab}.

    T1 = {|z1| = a, |z2| = b} and T2 = {|z1| = b, |z2| = a} with a - b = sep
    and a^2 + b^2 = 1. The union is circular but disconnected; the hull
    point (sqrt(ab), sqrt(ab)) on the annulus is not reachable by discs
    with boundary near K.
    """
    _check_samples(samples)
    if not 0.0 < sep < 1.0:
        raise InvalidInputError(f"two-tori separation must lie in (0, 1), got {sep}")
    a = (sep + math.sqrt(2.0 - sep ** 2)) / 2.0
    b = a - sep
    grid = _torus_grid(samples)
    t1 = grid * np.array([a, b])
    t2 = grid * np.array([b, a])
    K = SampledCompact(np.vstack([t1, t2]), mode="affine", connected=False, circular=True, name="two-tori")
    mid = math.sqrt(a * b)
    oracles = [OracleEntry([mid, mid], "descends", 0.0,
                           "point of the bounded annulus; circular hull descent expected to fail")]
    return Fixture("two-tori", K, {"samples": samples, "sep": sep, "a": a, "b": b}, oracles)


def annulus(samples: int = 64, inner: float = 1.5, outer: float = 2.5, rings: int = 16) -> Fixture:
    """Filled annulus {inner <= |z| <= outer} in C, rings x samples points."""
    _check_samples(samples)
    if not 0.0 < inner < outer:
        raise InvalidInputError(f"Annulus radii must satisfy 0 < inner < outer, got {inner}, {outer}")
    if rings < 2:
        raise InvalidInputError("Annulus needs at least two rings")
    radii = np.linspace(inner, outer, rings)
    pts = (radii[:, None] * circle_nodes(samples)[None, :]).reshape(-1, 1)
    K = SampledCompact(pts, mode="affine", connected=True, circular=True, name="annulus")
    oracles = [
        OracleEntry([6], "J", math.log(3.0), "Mobius disc of modulus 2 centred at 6"),
        OracleEntry([6], "V", math.log(6.0 / outer), "V = log(|z|/outer) outside the disc of radius outer"),
    ]
    return Fixture("annulus", K, {"samples": samples, "inner": inner, "outer": outer, "rings": rings}, oracles)


def unit_circle(samples: int = 256) -> Fixture:
    """The unit circle in C."""
    _check_samples(samples)
    K = SampledCompact(circle_nodes(samples)[:, None], mode="affine", connected=True, circular=True,
                       name="unit-circle")
    oracles = [
        OracleEntry([2], "V", math.log(2.0), "V = log+|z|, witness z^d"),
        OracleEntry([0], "V", 0.0, "origin lies in the polynomial hull"),
    ]
    return Fixture("unit-circle", K, {"samples": samples}, oracles)


def singleton(point: Optional[Sequence[complex]] = None) -> Fixture:
    """A single point of P^n; every other point has C = infinity."""
    rep = np.asarray([1, 0] if point is None else point, dtype=complex)
    norm = np.linalg.norm(rep)
    if norm == 0:
        raise InvalidInputError("singleton needs a nonzero point")
    K = SampledCompact((rep / norm)[None, :], mode="projective", connected=True, name="singleton")
    return Fixture("singleton", K, {"point": rep.tolist()}, [])


GENERATORS: Dict[str, Callable[..., Fixture]] = {
    "circle": circle,
    "torus3": torus3,
    "torus2": torus2,
    "graph-curve": graph_curve,
    "two-tori": two_tori,
    "annulus": annulus,
    "unit-circle": unit_circle,
    "singleton": singleton,
}


def generate(name: str, params: Optional[Dict[str, Any]] = None) -> Fixture:
    """
    Build a named fixture.

    Args:
        name: One of the keys of GENERATORS
        params: Keyword parameters of the generator

    Returns:
        The Fixture, identical for identical parameters
    """
    if name not in GENERATORS:
        raise InvalidInputError(f"Unknown generator '{name}'. Choose from {sorted(GENERATORS)}")
    try:
        fixture = GENERATORS[name](**(params or {}))
    except TypeError as e:
        raise InvalidInputError(f"Invalid parameters for {name}: {e}")
    logger.info(f"Generated fixture {name} with {len(fixture.compact)} samples")
    return fixture
