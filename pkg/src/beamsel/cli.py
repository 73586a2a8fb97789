"""Command-line frontend.

The CLI is a thin client of the HTTP service: compute commands build a
request from config file plus flags, post it to the service (an
in-process instance by default, or a remote one via --server), and
write the returned results.  Commands:

    sweep-snr    sum-rate sweep over an SNR grid
    sweep-users  per-user-rate sweep over user counts
    single       one trial, optionally dumping intermediate tables
    selftest     run the built-in oracle suites (exit 1 on failure)
    serve        start the HTTP service
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import httpx

from . import __version__, selftest
from .config import ConfigError, parse_config_file
from .experiment import ResultRow, ResultTable
from .output import emit_results


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    from .service import app  # deferred: keeps plain selftest/serve imports light

    transport = httpx.ASGITransport(app=app)
    return httpx.Client(transport=transport, base_url="http://beamsel.internal", timeout=None)


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="flat key=value config file")
    parser.add_argument("--antennas", type=int, help="number of BS antennas")
    parser.add_argument("--users", help="number of users (comma list for sweep-users)")
    parser.add_argument("--rf-chains", type=int, dest="rf_chains")
    parser.add_argument("--subcarriers", type=int, help="number of OFDM subcarriers")
    parser.add_argument("--taps", type=int, help="channel tap count")
    parser.add_argument("--paths", type=int, help="propagation paths per user")
    parser.add_argument("--snr-db", dest="snr_db", help="comma list of SNR values in dB")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials per sweep point")
    parser.add_argument("--seed", type=int, help="master random seed")
    parser.add_argument("--scheme", help="comma list: proposed,greedy,fully_digital")
    parser.add_argument("--criterion", choices=("zf", "mmse"), help="digital precoder")
    parser.add_argument(
        "--candidates", type=int, help="candidate codewords per user (at least 2)"
    )
    parser.add_argument("--workers", type=int, help="parallel trial workers")
    parser.add_argument("--server", help="remote service URL (default: in-process)")


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", metavar="PATH", help="result file (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamsel",
        description="Beam selection and hybrid precoding sum-rate experiments",
    )
    parser.add_argument("--version", action="version", version=f"beamsel {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_snr = sub.add_parser("sweep-snr", help="sweep the SNR axis")
    _add_param_flags(p_snr)
    _add_output_flags(p_snr)

    p_users = sub.add_parser("sweep-users", help="sweep the user-count axis")
    _add_param_flags(p_users)
    _add_output_flags(p_users)

    p_single = sub.add_parser("single", help="run one trial with optional debug dumps")
    _add_param_flags(p_single)
    p_single.add_argument("--trial-index", type=int, default=0, dest="trial_index")
    p_single.add_argument(
        "--dump-debug",
        action="store_true",
        dest="dump_debug",
        help="write T, T', P, selection and power tables",
    )
    p_single.add_argument(
        "--output-dir", default=".", dest="output_dir", help="where debug dumps go"
    )

    p_self = sub.add_parser("selftest", help="run the built-in oracle suites")
    p_self.add_argument("--seed", type=int, default=20240901)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    return parser


def _collect_overrides(args: argparse.Namespace, users_as_list: bool) -> dict[str, str]:
    """Flag values in config-key form; only flags the user actually set."""
    overrides: dict[str, str] = {}
    mapping = {
        "antennas": "antennas",
        "rf_chains": "rf_chains",
        "subcarriers": "subcarriers",
        "taps": "taps",
        "paths": "paths",
        "snr_db": "snr_db",
        "trials": "trials",
        "seed": "seed",
        "scheme": "schemes",
        "criterion": "criterion",
        "candidates": "candidates",
        "workers": "workers",
    }
    for attr, key in mapping.items():
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = str(value)
    users = getattr(args, "users", None)
    if users is not None:
        if users_as_list:
            overrides["user_counts"] = str(users)
        else:
            overrides["users"] = str(users)
    return overrides


def _resolved_values(args: argparse.Namespace, users_as_list: bool) -> dict[str, str]:
    from .config import resolve

    file_values = parse_config_file(args.config) if args.config else None
    return resolve(file_values, _collect_overrides(args, users_as_list))


def _request_body(values: dict[str, str], axis: str) -> dict:
    body: dict = {
        "axis": axis,
        "antennas": int(values["antennas"]),
        "users": int(values["users"]),
        "rf_chains": int(values["rf_chains"]),
        "subcarriers": int(values["subcarriers"]),
        "taps": int(values["taps"]),
        "paths": int(values["paths"]),
        "path_loss": float(values["path_loss"]),
        "sampling_period_s": float(values["sampling_period_s"]),
        "noise_var": float(values["noise_var"]),
        "spacing_ratio": float(values["spacing_ratio"]),
        "strong_path_var": float(values["strong_path_var"]),
        "weak_path_var": float(values["weak_path_var"]),
        "snr_db": [float(v) for v in values["snr_db"].split(",") if v.strip()],
        "user_counts": [int(v) for v in values["user_counts"].split(",") if v.strip()],
        "schemes": [s.strip() for s in values["schemes"].split(",") if s.strip()],
        "criterion": values["criterion"],
        "candidates": int(values["candidates"]),
        "trials": int(values["trials"]),
        "seed": int(values["seed"]),
        "workers": int(values["workers"]),
    }
    return body


def _table_from_response(payload: dict) -> ResultTable:
    rows = tuple(ResultRow(**row) for row in payload["rows"])
    return ResultTable(
        rows=rows,
        config_hash=payload["config_hash"],
        master_seed=payload["master_seed"],
        version=payload["version"],
    )


def _run_sweep_command(args: argparse.Namespace, axis: str) -> int:
    users_as_list = axis == "n_users"
    try:
        values = _resolved_values(args, users_as_list)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    body = _request_body(values, axis)
    with _client(args.server) as client:
        response = client.post("/sweep", json=body)
        if response.status_code != 200:
            detail = response.json().get("detail", response.text)
            print(f"error: {detail}", file=sys.stderr)
            return 2
        payload = response.json()
    table = _table_from_response(payload)
    if args.output:
        emit_results(table, args.format, args.output, payload["config"])
        print(f"wrote {args.output}")
    else:
        from .output import render_csv, render_json

        text = (
            render_csv(table)
            if args.format == "csv"
            else render_json(table, payload["config"])
        )
        sys.stdout.write(text)
    return 0


def _run_single(args: argparse.Namespace) -> int:
    try:
        values = _resolved_values(args, users_as_list=False)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    snr_list = [float(v) for v in values["snr_db"].split(",") if v.strip()]
    schemes = [s.strip() for s in values["schemes"].split(",") if s.strip()]
    body = {
        "antennas": int(values["antennas"]),
        "users": int(values["users"]),
        "rf_chains": int(values["rf_chains"]),
        "subcarriers": int(values["subcarriers"]),
        "taps": int(values["taps"]),
        "paths": int(values["paths"]),
        "path_loss": float(values["path_loss"]),
        "sampling_period_s": float(values["sampling_period_s"]),
        "noise_var": float(values["noise_var"]),
        "spacing_ratio": float(values["spacing_ratio"]),
        "strong_path_var": float(values["strong_path_var"]),
        "weak_path_var": float(values["weak_path_var"]),
        "snr_db": snr_list[0],
        "scheme": schemes[0],
        "criterion": values["criterion"],
        "candidates": int(values["candidates"]),
        "seed": int(values["seed"]),
        "trial_index": args.trial_index,
        "include_debug": bool(args.dump_debug),
    }
    with _client(args.server) as client:
        response = client.post("/trial", json=body)
        if response.status_code != 200:
            detail = response.json().get("detail", response.text)
            print(f"error: {detail}", file=sys.stderr)
            return 2
        payload = response.json()

    print(f"scheme:            {body['scheme']}")
    print(f"params_hash:       {payload['params_hash']}")
    print(f"sum_rate:          {payload['sum_rate']:.9g} bits/s/Hz")
    print(f"design_time_s:     {payload['design_time_s']:.6g}")
    print(f"beam_conflict:     {payload['beam_conflict']}")
    if payload["selected_codewords"] is not None:
        chosen = " ".join(str(n) for n in payload["selected_codewords"])
        print(f"selected (1-based): {chosen}")
    if payload["degenerate_subcarriers"]:
        print(f"degenerate subcarriers: {payload['degenerate_subcarriers']}")

    if args.dump_debug and payload.get("debug"):
        out_dir = Path(args.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        names = {
            "cost_matrix": "cost_matrix.txt",
            "preprocessed": "preprocessed.txt",
            "assignment": "assignment.txt",
            "composite_power": "composite_power.txt",
            "taps": "taps.txt",
        }
        for key, filename in names.items():
            (out_dir / filename).write_text(payload["debug"][key])
        print(f"debug dumps written to {out_dir}")
    return 0


def _run_selftest(args: argparse.Namespace) -> int:
    suites = selftest.run_all(args.seed)
    for suite in suites:
        status = "PASS" if suite.passed else "FAIL"
        print(f"[{status}] {suite.name}: {suite.detail}")
    return 0 if all(s.passed for s in suites) else 1


def _run_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "sweep-snr":
        return _run_sweep_command(args, "snr_db")
    if args.command == "sweep-users":
        return _run_sweep_command(args, "n_users")
    if args.command == "single":
        return _run_single(args)
    if args.command == "selftest":
        return _run_selftest(args)
    if args.command == "serve":
        return _run_serve(args)
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
