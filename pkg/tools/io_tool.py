# tools/io_tool.py - Ingestion and export of samples, discs, traces and heatmaps
import os
import csv
import io
import json
import logging
import platform
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import scipy

from tools.discs import Divisor, RationalDisc
from tools.errors import InvalidInputError
from tools.helper_functions import to_jsonable
from tools.projgeom import SampledCompact

logger = logging.getLogger("hullscope.io")

PathLike = Union[str, Path]


def write_atomic(path: PathLike, data: Union[str, bytes]):
    """Write to a temporary file in the target directory, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode) as handle:
            handle.write(data)
        os.replace(tmp, path)
    except Exception:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug(f"Wrote {path}")


def write_json(path: PathLike, obj: Any):
    write_atomic(path, json.dumps(to_jsonable(obj), indent=2) + "\n")


def read_json(path: PathLike) -> Any:
    try:
        with open(path) as f:
            return json.load(f)
    except FileNotFoundError:
        raise InvalidInputError(f"Input file not found: {path}")
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"Invalid JSON in {path}: {e}")


def parse_complex(pair: Sequence[Any]) -> complex:
    if isinstance(pair, (int, float)):
        return complex(float(pair))
    if len(pair) != 2:
        raise InvalidInputError(f"Complex numbers are stored as [re, im] pairs, got {pair}")
    return complex(float(pair[0]), float(pair[1]))


def complex_rows(rows: Sequence[Sequence[Any]]) -> np.ndarray:
    return np.array([[parse_complex(v) for v in row] for row in rows], dtype=complex)


# Point clouds

def coordinate_header(dim: int) -> List[str]:
    header = []
    for i in range(dim):
        header.extend([f"z{i}_re", f"z{i}_im"])
    return header


def compact_to_csv(K: SampledCompact) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(coordinate_header(K.dim))
    for row in K.points:
        writer.writerow([repr(float(v)) for c in row for v in (c.real, c.imag)])
    return buffer.getvalue()


def compact_to_dict(K: SampledCompact) -> Dict[str, Any]:
    return {
        "name": K.name,
        "mode": K.mode,
        "connected": K.connected,
        "circular": K.circular,
        "resolution": K.resolution,
        "points": to_jsonable(K.points),
    }


def compact_from_dict(data: Dict[str, Any]) -> SampledCompact:
    if "points" not in data:
        raise InvalidInputError("Sample JSON needs a 'points' array")
    return SampledCompact(
        points=complex_rows(data["points"]),
        mode=data.get("mode", "projective"),
        connected=bool(data.get("connected", False)),
        circular=bool(data.get("circular", False)),
        resolution=data.get("resolution"),
        name=data.get("name", ""),
    )


def read_compact(path: PathLike, header: Optional[Dict[str, Any]] = None) -> SampledCompact:
    """
    Load a sampled compact set from JSON or CSV.

    JSON files carry mode and flags themselves. CSV files hold one point per
    row as interleaved (re, im) columns under a header row; mode and flags
    come from `header`.
    """
    path = Path(path)
    if path.suffix.lower() == ".json":
        data = read_json(path)
        if isinstance(data, list):
            data = {"points": data}
        data = {**data, **(header or {})}
        return compact_from_dict(data)

    try:
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
    except FileNotFoundError:
        raise InvalidInputError(f"Input file not found: {path}")
    if len(rows) < 2:
        raise InvalidInputError(f"{path} has no data rows")
    width = len(rows[0])
    if width % 2:
        raise InvalidInputError("CSV samples need an even number of (re, im) columns")
    try:
        values = np.array([[float(v) for v in row] for row in rows[1:] if row], dtype=float)
    except ValueError as e:
        raise InvalidInputError(f"Non-numeric entry in {path}: {e}")
    if values.shape[1] != width:
        raise InvalidInputError(f"Ragged rows in {path}")
    header = header or {}
    return SampledCompact(
        points=values[:, 0::2] + 1j * values[:, 1::2],
        mode=header.get("mode", "projective"),
        connected=bool(header.get("connected", False)),
        circular=bool(header.get("circular", False)),
        resolution=header.get("resolution"),
        name=header.get("name", path.stem),
    )


# Discs and divisors

def disc_to_dict(f: RationalDisc) -> Dict[str, Any]:
    return {
        "mode": f.mode,
        "degree": f.degree,
        "coeffs": to_jsonable(f.coeffs),
        "denominator": None if f.denominator is None else to_jsonable(f.denominator),
    }


def disc_from_dict(data: Dict[str, Any]) -> RationalDisc:
    if "coeffs" not in data:
        raise InvalidInputError("Disc JSON needs a 'coeffs' array")
    den = data.get("denominator")
    return RationalDisc(
        coeffs=complex_rows(data["coeffs"]),
        mode=data.get("mode", "projective"),
        denominator=None if den is None else np.array([parse_complex(v) for v in den], dtype=complex),
    )


def read_discs(path: PathLike) -> List[RationalDisc]:
    """Discs from a JSON file holding one disc, a list of discs, or {"discs": [...]}."""
    data = read_json(path)
    if isinstance(data, dict) and "discs" in data:
        data = data["discs"]
    if isinstance(data, dict):
        data = [data]
    return [disc_from_dict(d) for d in data]


def divisor_to_list(D: Divisor) -> List[List[float]]:
    return [[float(p.real), float(p.imag), int(m)] for p, m in zip(D.points, D.multiplicities)]


def divisor_from_list(rows: Sequence[Sequence[float]]) -> Divisor:
    if not rows:
        return Divisor()
    for row in rows:
        if len(row) != 3:
            raise InvalidInputError(f"Divisor entries are [re, im, multiplicity], got {row}")
    return Divisor(points=[complex(r[0], r[1]) for r in rows], multiplicities=[int(r[2]) for r in rows])


# Heatmaps and manifests

def write_ppm(path: PathLike, values: np.ndarray, cap: float):
    """
    8-bit P5 grayscale image of a 2D array, linear on [0, cap] and clamped.

    Non-finite entries are drawn at the cap.
    """
    grid = np.asarray(values, dtype=float)
    if grid.ndim != 2:
        raise InvalidInputError("Heatmaps need a 2D array")
    if cap <= 0:
        raise InvalidInputError("Heatmap cap must be positive")
    clipped = np.clip(np.where(np.isfinite(grid), grid, cap), 0.0, cap)
    pixels = np.round(255.0 * clipped / cap).astype(np.uint8)
    header = f"P5\n{grid.shape[1]} {grid.shape[0]}\n255\n".encode("ascii")
    write_atomic(path, header + pixels.tobytes())


def read_ppm(path: PathLike) -> np.ndarray:
    raw = Path(path).read_bytes()
    parts = raw.split(b"\n", 3)
    if parts[0] != b"P5":
        raise InvalidInputError(f"{path} is not a P5 image")
    width, height = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(height, width)


def run_manifest(command: str, config: Dict[str, Any], seed: Optional[int]) -> Dict[str, Any]:
    """The record embedded in every run's outputs; re-running it reproduces the outputs."""
    return {
        "command": command,
        "config": config,
        "seed": seed,
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }


def complex_vector(values: Sequence[Any]) -> np.ndarray:
    """A coordinate vector given as numbers or [re, im] pairs."""
    if values is None:
        raise InvalidInputError("Missing coordinate vector")
    return np.array([parse_complex(v) for v in values], dtype=complex)
