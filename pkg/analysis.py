# analysis.py - Command orchestration for hullscope runs
import time
import logging
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional

import numpy as np

from engines.boundary_search import disc_search_boundary
from engines.envelope_search import DiscSearchResult, SearchConfig, disc_search_envelope, envelope_sequence
from engines.hull_field import build_grid, classify_hull
from judge.certificate_judge import render_verdicts, verify_psequence
from tools.discs import blaschke_from_divisor, homogenize, hyperplane_divisor, j_from_divisor
from tools.errors import InvalidInputError
from tools.fixtures import generate
from tools.helper_functions import config_from_dict, parallel_map
from tools.io_tool import (
    compact_from_dict,
    compact_to_csv,
    compact_to_dict,
    complex_vector,
    disc_from_dict,
    disc_to_dict,
    divisor_to_list,
    read_compact,
    read_discs,
    read_json,
    run_manifest,
    write_atomic,
    write_json,
)
from tools.polyspace import SolverConfig, affine_extremal
from tools.projgeom import SampledCompact, project

logger = logging.getLogger("hullscope")

COMMANDS = ("hull-field", "extremal", "disc-search", "boundary-search", "j-eval", "verify-psequence", "generate")


@dataclass
class RunConfig:
    """Everything a run depends on; embedded verbatim in the run manifest."""
    command: str
    input: Optional[str] = None
    sample: Optional[str] = None
    header: Dict[str, Any] = field(default_factory=dict)
    generator: Optional[str] = None
    params: Dict[str, Any] = field(default_factory=dict)
    grid: Optional[str] = None
    grid_axis: int = 0
    points: Optional[List[List[Any]]] = None
    hyperplane: Optional[List[Any]] = None
    margins: Optional[List[float]] = None
    epsilons: Optional[List[float]] = None
    solver: Dict[str, Any] = field(default_factory=dict)
    search: Dict[str, Any] = field(default_factory=dict)
    out: str = "out"
    seed: Optional[int] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        if isinstance(data.get("config"), dict):
            data = data["config"]
        if data.get("command") not in COMMANDS:
            raise InvalidInputError(f"Unknown command '{data.get('command')}'. Choose from {list(COMMANDS)}")
        return config_from_dict(cls, data)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def solver_config(self) -> SolverConfig:
        return SolverConfig.from_dict(self.solver)

    def search_config(self) -> SearchConfig:
        search = dict(self.search)
        if self.seed is not None:
            search["seed"] = self.seed
        return SearchConfig.from_dict(search)


def load_compact(config: RunConfig, path: Optional[str] = None) -> SampledCompact:
    """The sample from a file when a path is given, otherwise from the fixture generator."""
    if path:
        return read_compact(path, config.header)
    if config.generator:
        return generate(config.generator, config.params).compact
    raise InvalidInputError("Provide a sample with --input or a fixture with --generator")


def _query_points(config: RunConfig) -> List[np.ndarray]:
    if config.points:
        return [complex_vector(p) for p in config.points]
    raise InvalidInputError("This command needs query points ('points' in the config or --point)")


def _out(config: RunConfig, name: str) -> str:
    return f"{config.out}/{name}"


def run_generate(config: RunConfig) -> Dict[str, Any]:
    if not config.generator:
        raise InvalidInputError("generate needs --generator")
    fixture = generate(config.generator, config.params)
    payload = {**compact_to_dict(fixture.compact), "params": fixture.params, "oracles": fixture.oracles}
    paths = [_out(config, f"{fixture.name}.json"), _out(config, f"{fixture.name}.csv")]
    write_json(paths[0], payload)
    write_atomic(paths[1], compact_to_csv(fixture.compact))
    return {"outputs": paths, "summary": {"fixture": fixture.name, "samples": len(fixture.compact),
                                          "resolution": fixture.compact.resolution}}


def run_hull_field(config: RunConfig) -> Dict[str, Any]:
    K = load_compact(config, config.input)
    solver = config.solver_config()
    if config.points:
        grid = _query_points(config)
    else:
        grid = build_grid(config.grid or "-1:1:3", K.mode, K.n, axis=config.grid_axis)
    hull = classify_hull(K, grid, solver.dmax, solver.cap, solver)
    paths = hull.export(config.out)
    return {"outputs": paths, "summary": {"counts": hull.counts(), "dmax": solver.dmax, "cap": solver.cap}}


def run_extremal(config: RunConfig) -> Dict[str, Any]:
    K = load_compact(config, config.input)
    solver = config.solver_config()
    if config.points:
        points = _query_points(config)
    else:
        points = build_grid(config.grid or "-2:2:5", "affine", K.dim, axis=config.grid_axis).points
    samples = parallel_map(lambda z: affine_extremal(K, z, solver.dmax, solver), points)
    rows = [{"z": s.z, "degrees": s.degrees, "v_values": s.v_values, "raw_values": s.raw_values,
             "finite": s.finite_flag, "flags": s.flags} for s in samples]
    path = _out(config, "extremal.json")
    write_json(path, {"lower_bounds": True, "dmax": solver.dmax, "cap": solver.cap, "samples": rows})
    finite = sum(1 for s in samples if s.finite_flag)
    return {"outputs": [path], "summary": {"points": len(samples), "finite": finite}}


def _search_payload(result: DiscSearchResult) -> Dict[str, Any]:
    return {
        "center": result.center,
        "disc": disc_to_dict(result.disc),
        "J": result.j_value,
        "boundary_distance": result.boundary_distance,
        "feasible": result.feasible,
        "margin": result.margin,
        "degree": result.degree,
        "seed": result.seed,
        "iterations": result.iterations,
        "flags": result.flags,
        "history": result.history,
    }


def run_disc_search(config: RunConfig) -> Dict[str, Any]:
    K = load_compact(config, config.input)
    search = config.search_config()
    solver = config.solver_config()
    entries = []
    hyperplane = None if config.hyperplane is None else complex_vector(config.hyperplane)
    for p in _query_points(config):
        if config.margins:
            results = envelope_sequence(K, p, config.margins, search, hyperplane=hyperplane)
        else:
            results = [disc_search_envelope(K, p, search, hyperplane=hyperplane)]
        bound = affine_extremal(K, p, solver.dmax, solver).v_values[-1]
        for result in results:
            entry = _search_payload(result)
            entry["v_lower_bound"] = bound
            entry["sandwich_ok"] = bound - 0.05 <= result.j_value
            entries.append(entry)
    path = _out(config, "disc_search.json")
    write_json(path, {"results": entries})
    return {"outputs": [path], "summary": {"searches": len(entries),
                                          "feasible": sum(1 for e in entries if e["feasible"])}}


def run_boundary_search(config: RunConfig) -> Dict[str, Any]:
    K = load_compact(config, config.input)
    search = config.search_config()
    results = parallel_map(lambda p: disc_search_boundary(K, p, search), _query_points(config))
    path = _out(config, "boundary_search.json")
    write_json(path, {"resolution": K.resolution, "results": [_search_payload(r) for r in results]})
    descended = sum(1 for r in results if "descended" in r.flags)
    return {"outputs": [path], "summary": {"searches": len(results), "descended": descended}}


def run_j_eval(config: RunConfig) -> Dict[str, Any]:
    if not config.input:
        raise InvalidInputError("j-eval needs --input with serialized discs")
    entries = []
    for f in read_discs(config.input):
        f = homogenize(f)
        lam = np.eye(f.components)[0] if config.hyperplane is None else complex_vector(config.hyperplane)
        divisor = hyperplane_divisor(f, lam)
        j = j_from_divisor(divisor)
        entries.append({"J": j, "divisor": divisor_to_list(divisor),
                        "blaschke_at_zero": abs(blaschke_from_divisor(divisor).value_at_zero())})
    path = _out(config, "j_eval.json")
    payload = entries[0] if len(entries) == 1 else {"results": entries}
    write_json(path, payload)
    return {"outputs": [path], "summary": {"discs": len(entries), "J": [e["J"] for e in entries]}}


def run_verify_psequence(config: RunConfig) -> Dict[str, Any]:
    if not config.input:
        raise InvalidInputError("verify-psequence needs --input with a certificate file")
    certificate = read_json(config.input)
    if not isinstance(certificate, dict) or "discs" not in certificate or "center" not in certificate:
        raise InvalidInputError("A certificate holds 'discs', 'center' and optionally 'epsilons' and 'compact'")
    if "compact" in certificate:
        K = compact_from_dict(certificate["compact"])
    else:
        K = load_compact(config, config.sample)
    discs = [disc_from_dict(d) for d in certificate["discs"]]
    epsilons = config.epsilons or certificate.get("epsilons") or [1.0 / (j + 1) for j in range(len(discs))]
    center = complex_vector(certificate["center"])
    x = project(center) if K.mode == "projective" else center
    hyperplane = certificate.get("hyperplane", config.hyperplane)
    report = verify_psequence(discs, K, x, epsilons,
                              hyperplane=None if hyperplane is None else complex_vector(hyperplane))
    for line in render_verdicts(report):
        logger.info(line)
    path = _out(config, "certificate_report.json")
    write_json(path, {**report.to_dict(), "verdict_lines": render_verdicts(report)})
    return {"outputs": [path], "summary": {"conditions": len(report.verdicts), "failed": len(report.failures()),
                                          "blp_sup": report.blp_sup}}


HANDLERS = {
    "hull-field": run_hull_field,
    "extremal": run_extremal,
    "disc-search": run_disc_search,
    "boundary-search": run_boundary_search,
    "j-eval": run_j_eval,
    "verify-psequence": run_verify_psequence,
    "generate": run_generate,
}


def run(config: Dict[str, Any]) -> Dict[str, Any]:
    """
    Run one hullscope command.

    Args:
        config: RunConfig fields as a dictionary (a run manifest is accepted too)

    Returns:
        Dict with the written outputs, a short summary, the config and the
        execution time; on failure an "error" entry replaces the outputs
    """
    start_time = time.time()
    raw = dict(config)
    try:
        run_config = RunConfig.from_dict(raw)
        raw = run_config.to_dict()
        logger.info(f"Starting {run_config.command} run")
        result = HANDLERS[run_config.command](run_config)
        manifest_path = _out(run_config, "manifest.json")
        write_json(manifest_path, run_manifest(run_config.command, raw, run_config.seed))
        result["outputs"].append(manifest_path)
        execution_time = time.time() - start_time
        logger.info(f"{run_config.command} finished in {execution_time:.2f} seconds")
        return {**result, "command": run_config.command, "config": raw,
                "execution_time": execution_time, "error": None}
    except Exception as e:
        logger.error(f"Run failed: {e}", exc_info=not isinstance(e, ValueError))
        return {
            "error": str(e),
            "error_type": type(e).__name__,
            "config": raw,
            "execution_time": time.time() - start_time,
        }
