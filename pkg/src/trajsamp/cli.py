"""Command-line client for the pipeline.

Each subcommand reads a JSON config (the service request body), runs the
matching handler, and writes artifacts under --out.  By default the handlers
run in-process; pass --server to talk to a running service instead.  Exit
codes: 0 success / certified, 1 config or runtime error, 2 NotNyquist on
`check`, 3 Critical or Unknown on `check`.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from pydantic import ValidationError

from . import __version__
from .errors import TrajsampError
from .schemas import (CheckRequest, CheckResponse, DensityRequest,
                      DensityResponse, DesignRequest, DesignResponse,
                      ReconstructRequest, ReconstructResponse, ReportRequest,
                      ReportResponse, SampleRequest, SampleResponse)
from .service import (handle_check, handle_density, handle_design,
                      handle_reconstruct, handle_report, handle_sample)

_ACTIONS = {
    "check": (CheckRequest, CheckResponse, handle_check),
    "design": (DesignRequest, DesignResponse, handle_design),
    "density": (DensityRequest, DensityResponse, handle_density),
    "sample": (SampleRequest, SampleResponse, handle_sample),
    "reconstruct": (ReconstructRequest, ReconstructResponse, handle_reconstruct),
    "report": (ReportRequest, ReportResponse, handle_report),
}


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SystemExit(f"error: cannot read config: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON in {path}: line {exc.lineno} "
              f"column {exc.colno}: {exc.msg}", file=sys.stderr)
        raise SystemExit(1)


def _dump_json(path: Path, model) -> None:
    path.write_text(json.dumps(model.model_dump(), indent=2, sort_keys=True)
                    + "\n")


def _call_remote(server: str, action: str, payload: dict) -> dict:
    import httpx

    resp = httpx.post(f"{server.rstrip('/')}/{action}", json=payload,
                      timeout=600.0)
    if resp.status_code != 200:
        print(f"error: server returned {resp.status_code}: {resp.text}",
              file=sys.stderr)
        raise SystemExit(1)
    return resp.json()


def run_action(action: str, config: dict, out_dir: Path,
               server: str | None = None) -> int:
    req_cls, resp_cls, handler = _ACTIONS[action]
    try:
        req = req_cls.model_validate(config)
    except ValidationError as exc:
        print(f"error: invalid config for '{action}': {exc}", file=sys.stderr)
        return 1
    try:
        if server is not None:
            payload = json.loads(req.model_dump_json())
            resp = resp_cls.model_validate(_call_remote(server, action, payload))
        else:
            resp = handler(req)
    except (TrajsampError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    out_dir.mkdir(parents=True, exist_ok=True)
    if action == "check":
        _dump_json(out_dir / "verdict.json", resp)
        print(f"verdict: {resp.verdict.status} ({resp.verdict.basis})")
        return resp.exit_code
    if action == "design":
        _dump_json(out_dir / "design.json", resp)
        (out_dir / "set.json").write_text(
            json.dumps(resp.model_dump()["set"], indent=2, sort_keys=True) + "\n")
        print(f"design density {resp.density!r} "
              f"(critical {resp.critical_density!r})")
        return 0
    if action == "density":
        _dump_json(out_dir / "density.json", resp)
        print(f"density {resp.density!r}")
        return 0
    if action == "sample":
        (out_dir / "samples.csv").write_text(resp.csv)
        print(f"{resp.n_points} sample points written")
        return 0
    if action == "reconstruct":
        (out_dir / "samples.csv").write_text(resp.samples_csv)
        (out_dir / "estimate.json").write_text(
            json.dumps(resp.model_dump()["estimate"], indent=2, sort_keys=True)
            + "\n")
        report = {"sup_error": resp.sup_error, "rms_error": resp.rms_error,
                  "certified": resp.certified,
                  "verdict_status": resp.verdict_status}
        (out_dir / "report.json").write_text(
            json.dumps(report, indent=2, sort_keys=True) + "\n")
        print(f"sup_error {resp.sup_error!r} rms_error {resp.rms_error!r} "
              f"certified {resp.certified}")
        return 0
    if action == "report":
        (out_dir / "report.csv").write_text(resp.csv)
        flips = sum(1 for a, b in zip(resp.rows, resp.rows[1:])
                    if a.status != b.status)
        print(f"{len(resp.rows)} sweep rows written ({flips} verdict changes)")
        return 0
    raise AssertionError(action)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="trajsamp",
        description="Design and certify sampling trajectory sets for "
                    "bandlimited fields.")
    parser.add_argument("--version", action="version",
                        version=f"trajsamp {__version__}")
    sub = parser.add_subparsers(dest="action", required=True)
    for name in _ACTIONS:
        p = sub.add_parser(name, help=f"run the {name} action")
        p.add_argument("--config", required=True,
                       help="path to the JSON request config")
        p.add_argument("--out", default=".",
                       help="directory for output artifacts")
        p.add_argument("--seed", type=int, default=None,
                       help="override field_spec.seed in the config")
        p.add_argument("--server", default=None,
                       help="base URL of a running service (default: in-process)")
    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)

    args = parser.parse_args(argv)
    if args.action == "serve":
        import uvicorn

        uvicorn.run("trajsamp.service:app", host=args.host, port=args.port)
        return 0

    config = _load_config(args.config)
    if args.seed is not None:
        config.setdefault("field_spec", {})
        if not isinstance(config["field_spec"], dict):
            print("error: --seed needs a field_spec config", file=sys.stderr)
            return 1
        config["field_spec"]["seed"] = args.seed
    return run_action(args.action, config, Path(args.out), args.server)


if __name__ == "__main__":
    sys.exit(main())
