"""Batch command-line interface.

Each subcommand runs the stages it names (plus whatever they depend
on) and writes its artifacts into the output directory. Exit codes:
0 success, 2 configuration problem, 3 data problem, 4 estimation
problem.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import (BUILTIN_MODELS, ESTIMATORS, STAGES, config_from_dict,
                     parse_q_range)
from .errors import ConfigError, DataError, EstimationError
from .pipeline import Pipeline

_STAGES_FOR = {
    "ingest": ["ingest"],
    "topology": ["topology"],
    "assort": ["assort"],
    "ergm": ["ergm"],
    "sbm": ["sbm"],
    "score": ["sbm", "score"],
    "report": list(STAGES),
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--edges", help="edge list (CSV or exported JSON)")
    p.add_argument("--attrs", help="node attribute CSV")
    p.add_argument("--format", dest="edge_format",
                   choices=("csv", "upstream-json"),
                   help="edge list format (default csv)")
    p.add_argument("--json-fields",
                   help="field remapping for the JSON format, e.g. "
                        "nodes=usernameList,targets=outList,weights=outWeight")
    p.add_argument("--config", help="JSON run config; flags override it")
    p.add_argument("--out", help="output directory (default out)")
    p.add_argument("--seed", type=int, help="master RNG seed (default 0)")
    p.add_argument("--threads", type=int,
                   help="worker threads for path-based centrality")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="legnet",
        description="Directed weighted interaction-network analysis toolkit")
    parser.add_argument("--version", action="version",
                        version=f"legnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for command, help_text in (
            ("ingest", "load, validate, and re-emit the graph"),
            ("topology", "centrality scores and cohesion measures"),
            ("assort", "assortativity coefficients"),
            ("ergm", "fit edge-formation models"),
            ("sbm", "fit latent blockmodels over a Q range"),
            ("score", "agreement between communities and attributes"),
            ("report", "full pipeline with Markdown summary"),
            ("run", "run stages listed in a config file")):
        p = sub.add_parser(command, help=help_text)
        _add_common(p)
        if command in ("topology", "report", "run"):
            p.add_argument("--min-clique-size", type=int,
                           help="also list maximal cliques at or above this size")
        if command in ("ergm", "report", "run"):
            p.add_argument("--models",
                           help=f"comma list; built-ins {', '.join(BUILTIN_MODELS)}")
            p.add_argument("--estimator", choices=ESTIMATORS,
                           help="fitting method (default exact-dyad)")
        if command in ("sbm", "score", "report", "run"):
            p.add_argument("--q-range", help="community counts to scan, as A:B")
            p.add_argument("--restarts", type=int,
                           help="restarts per community count")
            p.add_argument("--init", choices=("spectral", "random"),
                           help="blockmodel initialization")
        if command in ("score", "report", "run"):
            p.add_argument("--against",
                           help="comma list of attribute columns to score against")
    return parser


def _raw_config(path: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return raw


def _parse_json_fields(text: str) -> dict:
    fields = {}
    for part in text.split(","):
        key, sep, value = part.partition("=")
        if not sep or not key.strip() or not value.strip():
            raise ConfigError(f"bad --json-fields entry {part!r}; use key=value")
        fields[key.strip()] = value.strip()
    return fields


def _build_config(args: argparse.Namespace):
    raw = _raw_config(args.config) if args.config else {}
    for key, value in (("edges", args.edges), ("attrs", args.attrs),
                       ("format", args.edge_format), ("out", args.out),
                       ("seed", args.seed), ("threads", args.threads)):
        if value is not None:
            raw[key] = value
    if args.json_fields:
        raw["json_fields"] = _parse_json_fields(args.json_fields)
    if getattr(args, "models", None):
        raw["models"] = [m.strip() for m in args.models.split(",") if m.strip()]
    if getattr(args, "estimator", None):
        raw["ergm_estimator"] = args.estimator
    if getattr(args, "min_clique_size", None) is not None:
        raw["min_clique_size"] = args.min_clique_size
    sbm_block = dict(raw.get("sbm") or {})
    if getattr(args, "q_range", None):
        sbm_block["q_range"] = list(parse_q_range(args.q_range))
    if getattr(args, "restarts", None) is not None:
        sbm_block["restarts"] = args.restarts
    if getattr(args, "init", None):
        sbm_block["init"] = args.init
    if sbm_block:
        raw["sbm"] = sbm_block
    if getattr(args, "against", None):
        raw["score_against"] = [c.strip() for c in args.against.split(",")
                                if c.strip()]
    if args.command != "run":
        raw["stages"] = _STAGES_FOR[args.command]
    return config_from_dict(raw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _build_config(args)
        manifest = Pipeline(config).run()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except EstimationError as exc:
        print(f"estimation error: {exc}", file=sys.stderr)
        return 4
    for notice in manifest["notices"]:
        print(f"notice: {notice}", file=sys.stderr)
    print(f"wrote {len(manifest['outputs'])} files to {config.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
