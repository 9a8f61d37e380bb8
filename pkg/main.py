# main.py - Command-line interface for hullscope
import os
import sys
import json
import logging
import argparse

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.FileHandler(os.environ.get("HULLSCOPE_LOG_FILE", "hullscope.log")),
        logging.StreamHandler()
    ]
)
logger = logging.getLogger("hullscope")

from analysis import COMMANDS, run
from tools.errors import HullscopeError
from tools.helper_functions import parse_json_argument, to_jsonable
from tools.io_tool import write_json


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hullscope",
        description="Projective hulls, extremal functions and analytic-disc certificates of sampled compact sets.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", help="Sample (CSV/JSON), disc file or certificate file")
    parser.add_argument("--sample", help="Sample (CSV/JSON) a certificate is verified against")
    parser.add_argument("--generator", help="Fixture generator name, e.g. circle or torus2")
    parser.add_argument("--params", help="Generator parameters as inline JSON or a path")
    parser.add_argument("--dmax", type=int, help="Degree budget of the polynomial solver")
    parser.add_argument("--cap", type=float, help="Log threshold for the finite/in-hull label")
    parser.add_argument("--grid", help="Grid slice lo:hi:count over one chart coordinate")
    parser.add_argument("--point", action="append",
                        help="Query point as JSON, e.g. '[6]' or '[[0.5,0],[0,0]]'; repeatable")
    parser.add_argument("--seed", type=int, help="Random seed for disc searches")
    parser.add_argument("--out", help="Output directory")
    parser.add_argument("--config", help="Run config (or a run manifest) as inline JSON or a path")
    return parser


def config_from_args(args: argparse.Namespace) -> dict:
    """Merge --config with the explicit flags; flags win."""
    config = parse_json_argument(args.config) if args.config else {}
    if isinstance(config.get("config"), dict):
        config = dict(config["config"])
    config["command"] = args.command
    for name in ("input", "sample", "generator", "grid", "seed", "out"):
        value = getattr(args, name)
        if value is not None:
            config[name] = value
    if args.params:
        config["params"] = parse_json_argument(args.params)
    if args.point:
        try:
            config["points"] = [json.loads(p) for p in args.point]
        except json.JSONDecodeError as e:
            raise HullscopeError(f"Invalid --point value: {e}")
    solver = dict(config.get("solver", {}))
    if args.dmax is not None:
        solver["dmax"] = args.dmax
    if args.cap is not None:
        solver["cap"] = args.cap
    config["solver"] = solver
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except HullscopeError as e:
        result = {"error": str(e), "error_type": type(e).__name__, "config": None}
    else:
        result = run(config)

    out_dir = (result.get("config") or {}).get("out") or args.out or "out"
    if result.get("error"):
        write_json(f"{out_dir}/error.json", result)
        logger.error(f"{args.command} failed: {result['error']}")
        print(json.dumps(to_jsonable(result), indent=2))
        return 2

    print(json.dumps(to_jsonable({k: result[k] for k in ("command", "outputs", "summary", "execution_time")}),
                     indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
