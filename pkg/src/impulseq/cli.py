"""Command-line front end: a thin client of the HTTP service.

Every command reads a JSON config, builds the matching service request,
sends it through the in-process app (no network, no running server
needed), and writes figure-ready CSV or JSON.  Floats are serialized
with 17 significant digits so repeated runs are byte-identical and
values round-trip exactly.

Exit codes: 0 success, 2 config/validation error, 3 numerical
non-convergence.  Set IMPULSEQ_LOG=DEBUG (or INFO, ...) for verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Any

logger = logging.getLogger("impulseq.cli")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

COMMANDS = ("simulate", "bounds", "average", "optimize", "sweep")


class ConfigError(Exception):
    pass


def _fmt(x: Any) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    if isinstance(x, bool):
        return "true" if x else "false"
    return str(x)


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}:1:1: config must be a JSON object")
    return cfg


def _require(cfg: dict, key: str, path: str) -> Any:
    if key not in cfg:
        raise ConfigError(f"{path}: missing required config key {key!r}")
    return cfg[key]


def _build_request(command: str, cfg: dict, args: argparse.Namespace, path: str) -> dict:
    """Translate the run config into the service request body."""
    body: dict[str, Any] = {"params": _require(cfg, "params", path)}
    dynamics = args.dynamics or cfg.get("dynamics")
    if dynamics is not None:
        body["dynamics"] = dynamics
    impulse = cfg.get("impulse", {})
    if not isinstance(impulse, dict):
        raise ConfigError(f"{path}: config key 'impulse' must be an object")

    if command == "simulate":
        body["q0"] = _require(cfg, "q0", path)
        body["impulse"] = impulse
        body["horizon"] = _require(cfg, "horizon", path)
        if "density" in cfg:
            body["density"] = cfg["density"]
        return body
    if command == "bounds":
        body["m"] = _require(impulse, "m", path)
        if "delta" in impulse:
            body["delta"] = impulse["delta"]
        if "mode" in impulse:
            body["mode"] = impulse["mode"]
        if "n_cycles" in cfg:
            body["n_cycles"] = cfg["n_cycles"]
        return body
    body["q0"] = _require(cfg, "q0", path)
    body["T"] = _require(cfg, "T", path)
    body["m"] = _require(impulse, "m", path)
    if command == "average":
        if "tau" not in impulse:
            raise ConfigError(f"{path}: average needs impulse.tau")
        body["tau"] = impulse["tau"]
    if command == "sweep":
        grid = args.grid or cfg.get("grid")
        if grid is not None:
            body["grid"] = grid
    return body


def _post(command: str, body: dict) -> dict:
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    from .service import app

    with TestClient(app, raise_server_exceptions=False) as client:
        logger.debug("POST /%s %s", command, body)
        resp = client.post(f"/{command}", json=body)
    if resp.status_code == 200:
        return resp.json()
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        detail = resp.text
    if resp.status_code == 409:
        raise NumericError(str(detail))
    raise ConfigError(f"request rejected ({resp.status_code}): {detail}")


class NumericError(Exception):
    pass


def _render_simulate(data: dict) -> str:
    events: dict[float, list[str]] = {}
    for bp in data["breakpoints"]:
        if bp["kind"] == "impulse":
            events.setdefault(bp["t"], []).extend(["impulse_pre", "impulse_post"])
        else:
            events.setdefault(bp["t"], []).append("capacity_crossing")
    lines = ["t,q,event"]
    for t, q in data["samples"]:
        tag = events[t].pop(0) if events.get(t) else ""
        lines.append(f"{_fmt(float(t))},{_fmt(float(q))},{tag}")
    return "\n".join(lines) + "\n"


def _render_bounds(data: dict) -> str:
    closed, oracle = data["closed_form"], data["oracle"]
    lines = ["quantity,closed_form,oracle"]
    for key in ("lower", "upper", "amplitude", "average"):
        cv = closed.get(key)
        ov = oracle.get(key)
        lines.append(
            f"{key},{_fmt(float(cv)) if cv is not None else 'nan'},"
            f"{_fmt(float(ov)) if ov is not None else 'nan'}"
        )
    lines.append(f"regime_valid,{_fmt(bool(closed['regime_valid']))},true")
    return "\n".join(lines) + "\n"


def _render_sweep(data: dict) -> str:
    lines = ["tau,J,marker"]
    for t, j in zip(data["taus"], data["averages"]):
        lines.append(f"{_fmt(float(t))},{_fmt(float(j))},")
    lines.append(f"{_fmt(float(data['tau_min']))},{_fmt(float(data['j_min']))},tau_min")
    lines.append(f"{_fmt(float(data['tau_max']))},{_fmt(float(data['j_max']))},tau_max")
    return "\n".join(lines) + "\n"


def _render_json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"

RENDERERS = {
    "simulate": _render_simulate,
    "bounds": _render_bounds,
    "average": _render_json,
    "optimize": _render_json,
    "sweep": _render_sweep,
}


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="impulseq",
        description="Analyze fluid queues under multiplicative impulses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "integrate a trajectory and emit t,q samples as CSV"),
        ("bounds", "steady-cycle bounds and average: closed form vs oracle, CSV"),
        ("average", "average level for one impulse time, JSON"),
        ("optimize", "optimal impulse times with candidate table, JSON"),
        ("sweep", "average level over a grid of impulse times, CSV"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to JSON run config")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--grid", type=int, default=None, help="sweep grid size override")
        p.add_argument(
            "--dynamics",
            choices=("linear", "erlanga"),
            default=None,
            help="dynamics override",
        )
    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("IMPULSEQ_LOG", "WARNING").upper())
    args = _parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        uvicorn.run("impulseq.service:app", host=args.host, port=args.port)
        return EXIT_OK
    try:
        cfg = _load_config(args.config)
        body = _build_request(args.command, cfg, args, args.config)
        data = _post(args.command, body)
        _write(RENDERERS[args.command](data), args.out)
    except ConfigError as exc:
        print(f"impulseq: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"impulseq: did not converge: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
