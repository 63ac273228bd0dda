"""Command line interface, a thin client over the HTTP service.

Commands read local files, post resolved study documents to the service
(in-process by default, or a remote base URL via --server), and render
the responses. Exit codes: 0 ok, 1 invalid data or failed fit, 2 I/O or
connection error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

from .config import OUTPUT_FORMATS, REST_AGGREGATIONS, SELECTION_MODES, Config
from .errors import NstLoadError
from .features import FEATURE_CSV_HEADER, read_study_file

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2

METRIC_COLUMNS = ("subject_id", "task_id", "wmax", "wave", "wsum", "n_windows", "rest_nst_c")
FIT_CSV_HEADER = (
    "target", "mode", "selected", "intercept", "r2", "adj_r2", "n",
    "coef_wmax", "coef_wave", "coef_wsum", "coef_log_time",
    "std_wmax", "std_wave", "std_wsum", "std_log_time", "error",
)


class ServiceClient:
    """POSTs to a remote server when given one, otherwise serves the
    bundled app in-process."""

    def __init__(self, server: str | None = None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=60.0)
        else:
            import warnings

            with warnings.catch_warnings():
                # this environment has no httpx2; the httpx fallback works
                warnings.filterwarnings(
                    "ignore", message="Using `httpx` with `starlette.testclient`"
                )
                from fastapi.testclient import TestClient

            from .api import create_app

            self._client = TestClient(create_app())

    def post(self, path: str, payload: dict) -> tuple[int, dict]:
        response = self._client.post(path, json=payload)
        try:
            body = response.json()
        except ValueError:
            body = {"detail": response.text}
        return response.status_code, body


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _fail(body: dict) -> int:
    print(f"error: {body.get('detail', 'request failed')}", file=sys.stderr)
    for problem in body.get("problems", []):
        print(f"  {problem['location']}: {problem['message']}", file=sys.stderr)
    return EXIT_DOMAIN


def _config_from_args(args: argparse.Namespace) -> Config:
    updates = {}
    # output_format stays client-side: it renders responses and must not
    # change the analysis config recorded in reports
    pairs = (
        ("window_secs", "window_len_s"),
        ("rest_agg", "rest_agg"),
        ("tolerance_threshold", "tolerance_threshold"),
        ("selection", "selection"),
        ("min_improvement", "min_improvement"),
    )
    for attr, name in pairs:
        value = getattr(args, attr, None)
        if value is not None:
            updates[name] = value
    if getattr(args, "paper_literal_tolerance", False):
        updates["paper_literal_tolerance"] = True
    if getattr(args, "temp_band", None):
        updates["temp_band"] = tuple(args.temp_band)
    return Config(**updates)


def _study_request(args: argparse.Namespace, config: Config) -> dict:
    study = read_study_file(args.manifest, config)
    return {"study": study, "config": config.to_dict()}


def _table(header: tuple[str, ...], rows: list[list[str]]) -> str:
    widths = [
        max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i])
        for i in range(len(header))
    ]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Commands


def cmd_validate(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    client = ServiceClient(args.server)
    status, body = client.post("/validate", _study_request(args, config))
    if status != 200:
        return _fail(body)
    problems = body["problems"]
    if problems:
        for p in problems:
            print(f"{p['location']}: {p['message']}", file=sys.stderr)
        print(f"invalid: {len(problems)} problem(s)", file=sys.stderr)
        return EXIT_DOMAIN
    print("ok: study is valid")
    return EXIT_OK


def cmd_metrics(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    client = ServiceClient(args.server)
    status, body = client.post("/metrics", _study_request(args, config))
    if status != 200:
        return _fail(body)
    rows = body["rows"]
    fmt = args.output_format or "text"
    if fmt == "json":
        text = json.dumps(rows, indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        lines = [",".join(METRIC_COLUMNS)]
        for r in rows:
            lines.append(",".join([
                r["subject_id"], r["task_id"], repr(r["wmax"]), repr(r["wave"]),
                repr(r["wsum"]), str(r["n_windows"]), repr(r["rest_nst_c"]),
            ]))
        text = "\n".join(lines) + "\n"
    else:
        cells = [
            [r["subject_id"], r["task_id"], f"{r['wmax']:.4f}", f"{r['wave']:.4f}",
             f"{r['wsum']:.4f}", str(r["n_windows"]), f"{r['rest_nst_c']:.4f}"]
            for r in rows
        ]
        text = _table(METRIC_COLUMNS, cells)
    _emit(text, args.out)
    return EXIT_OK


def cmd_features(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    client = ServiceClient(args.server)
    status, body = client.post("/features", _study_request(args, config))
    if status != 200:
        return _fail(body)
    fmt = args.output_format or "text"
    if fmt == "json":
        text = json.dumps(body["rows"], indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        text = body["csv"]
    else:
        cells = [
            [r["subject_id"], r["task_id"]]
            + [f"{r[name]:.4f}" for name in FEATURE_CSV_HEADER[2:]]
            for r in body["rows"]
        ]
        text = _table(FEATURE_CSV_HEADER, cells)
    _emit(text, args.out)
    return EXIT_OK


def _fit_csv(models: list[dict]) -> str:
    lines = [",".join(FIT_CSV_HEADER)]
    for m in models:
        if "error" in m:
            row = [m["target"], m["mode"]] + [""] * 13 + [m["error"].replace(",", ";")]
        else:
            coef = m["coefficients"]
            std = m["std_coefficients"]
            row = [
                m["target"], m["mode"], ";".join(m["selected"]),
                repr(m["intercept"]), repr(m["r2"]), repr(m["adj_r2"]), str(m["n"]),
            ]
            for name in ("wmax", "wave", "wsum", "log_time"):
                row.append(repr(coef[name]) if name in coef else "")
            for name in ("wmax", "wave", "wsum", "log_time"):
                row.append(repr(std[name]) if name in std else "")
            row.append("")
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def cmd_fit(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    client = ServiceClient(args.server)
    status, body = client.post("/fit", _study_request(args, config))
    if status != 200:
        return _fail(body)
    fmt = args.output_format or "text"
    if fmt == "json":
        text = json.dumps(body["report"], indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        text = _fit_csv(body["report"]["models"])
    else:
        text = body["text"]
    _emit(text, args.out)
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    raw = Path(args.report_json).read_text(encoding="utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as e:
        print(f"error: report file is not valid JSON: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    client = ServiceClient(args.server)
    status, body = client.post("/report", {"report": doc})
    if status != 200:
        return _fail(body)
    _emit(body["text"], args.out)
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    payload: dict = {"subjects": args.subjects, "tasks": args.tasks, "seed": args.seed}
    if args.relations:
        payload["relations"] = json.loads(Path(args.relations).read_text(encoding="utf-8"))
    client = ServiceClient(args.server)
    status, body = client.post("/synth", payload)
    if status != 200:
        return _fail(body)
    out_dir = Path(args.out or "study")
    for rel in sorted(body["files"]):
        path = out_dir / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(body["files"][rel], encoding="utf-8")
    print(f"wrote {body['n_sessions']} sessions under {out_dir} "
          f"(manifest: {out_dir / body['manifest']})")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("nstload.api:app", host=args.host, port=args.port)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nstload",
        description=(
            "Estimate cognitive load from nasal/forehead skin temperature: "
            "windowed NST metrics, NASA-TLX feature tables, stepwise OLS reports."
        ),
        epilog="exit codes: 0 ok; 1 invalid data or failed fit; 2 I/O or connection error",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--server", help="base URL of a running service (default: in-process)")
    common.add_argument("--out", help="write output to this path instead of stdout")

    pipeline = argparse.ArgumentParser(add_help=False, parents=[common])
    pipeline.add_argument("manifest", help="path to a study manifest JSON")
    pipeline.add_argument("--window-secs", type=float, dest="window_secs",
                          help="metric window length in seconds (default 120)")
    pipeline.add_argument("--rest-agg", choices=REST_AGGREGATIONS,
                          help="rest baseline aggregation (default mean)")
    pipeline.add_argument("--tolerance-threshold", type=float,
                          help="minimum tolerance to admit a candidate (default 0.1)")
    pipeline.add_argument("--paper-literal-tolerance", action="store_true",
                          help="require tolerance ~1.0, excluding correlated candidates")
    pipeline.add_argument("--selection", choices=SELECTION_MODES,
                          help="stepwise direction (default forward)")
    pipeline.add_argument("--min-improvement", type=float,
                          help="minimum adjusted R^2 gain to add a variable (default 0)")
    pipeline.add_argument("--temp-band", nargs=2, type=float, metavar=("LOW", "HIGH"),
                          help="plausible temperature band in Celsius (default 20 45)")
    pipeline.add_argument("--output-format", choices=OUTPUT_FORMATS,
                          help="text, json, or csv (default text)")

    p = sub.add_parser("validate", parents=[pipeline],
                       help="check a study manifest and its sample files")
    p.set_defaults(func=cmd_validate)
    p = sub.add_parser("metrics", parents=[pipeline],
                       help="per-task wmax/wave/wsum and rest baseline")
    p.set_defaults(func=cmd_metrics)
    p = sub.add_parser("features", parents=[pipeline],
                       help="regression-ready feature table")
    p.set_defaults(func=cmd_features)
    p = sub.add_parser("fit", parents=[pipeline],
                       help="fit all models and render the report")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", parents=[common],
                       help="render a saved report JSON as text tables")
    p.add_argument("report_json", help="path to a report JSON file")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("synth", parents=[common],
                       help="generate a synthetic study on disk")
    p.add_argument("--subjects", type=int, default=7)
    p.add_argument("--tasks", type=int, default=2, help="tasks per subject")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--relations", help="JSON file of true feature-to-TLX relations")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except httpx.HTTPError as e:
        print(f"error: cannot reach service: {e}", file=sys.stderr)
        return EXIT_IO
    except NstLoadError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
