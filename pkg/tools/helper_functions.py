# tools/helper_functions.py - Utility functions shared by the hullscope engines
import os
import json
import logging
import dataclasses
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Type, TypeVar

import numpy as np

from tools.errors import InvalidInputError

logger = logging.getLogger("hullscope.helpers")

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "HULLSCOPE_THREADS"


def thread_count() -> int:
    """
    Worker budget for grid sweeps and multi-seed searches.

    Returns:
        The value of HULLSCOPE_THREADS, or 1 when unset
    """
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return 1
    try:
        count = int(raw)
    except ValueError:
        raise InvalidInputError(f"{THREADS_ENV} must be an integer, got '{raw}'")
    if count < 1:
        raise InvalidInputError(f"{THREADS_ENV} must be at least 1, got {count}")
    return count


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int = None) -> List[R]:
    """
    Apply fn to every item and return the results in input order.

    Each call is independent, so the result does not depend on the worker count.
    """
    items = list(items)
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug(f"Mapping {len(items)} tasks over {threads} threads")
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def parse_json_argument(text: str) -> Dict[str, Any]:
    """
    Read a JSON object given either inline or as a path to a file.

    Args:
        text: Inline JSON text or a filesystem path

    Returns:
        The parsed dictionary
    """
    if not text or not isinstance(text, str):
        raise InvalidInputError("Expected a JSON object or a path to one")

    stripped = text.strip()
    if not stripped.startswith("{"):
        path = Path(stripped)
        if not path.is_file():
            raise InvalidInputError(f"Config file not found: {stripped}")
        stripped = path.read_text()

    try:
        data = json.loads(stripped)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"Invalid JSON config: {e}")
    if not isinstance(data, dict):
        raise InvalidInputError("Config must be a JSON object")
    return data


def config_from_dict(cls: Type[T], data: Dict[str, Any]) -> T:
    """Build a config dataclass, rejecting keys it does not declare."""
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise InvalidInputError(f"Unknown {cls.__name__} keys: {sorted(unknown)}")
    return cls(**data)


def to_jsonable(obj: Any) -> Any:
    """
    Convert numpy and complex values into plain JSON types.

    Complex numbers become [re, im] pairs; non-finite floats become the strings
    "inf", "-inf" and "nan" so the output stays strict JSON.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(float(obj.real)), to_jsonable(float(obj.imag))]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if np.isnan(value):
            return "nan"
        if np.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(dataclasses.asdict(obj))
    return obj
