"""Result emission (CSV / JSON) and debug table dumps.

The CSV layout is one provenance comment line, a header, then one row
per (scheme, sweep point) sorted by scheme and ascending axis value.
Floats are printed with 9 significant digits so identical tables always
produce identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .experiment import ResultRow, ResultTable

CSV_COLUMNS = (
    "scheme",
    "axis_name",
    "axis_value",
    "mean_sum_rate",
    "stderr",
    "mean_per_user_rate",
    "median_design_time_s",
    "n_trials",
    "n_failures",
    "seed",
)


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def render_csv(table: ResultTable) -> str:
    lines = [
        f"# beamsel {table.version} config_hash={table.config_hash} "
        f"master_seed={table.master_seed}",
        ",".join(CSV_COLUMNS),
    ]
    rows = sorted(table.rows, key=lambda r: (r.scheme, r.axis_value))
    for r in rows:
        lines.append(
            ",".join(
                (
                    r.scheme,
                    r.axis_name,
                    _fmt(r.axis_value),
                    _fmt(r.mean_sum_rate),
                    _fmt(r.stderr),
                    _fmt(r.mean_per_user_rate),
                    _fmt(r.median_design_time_s),
                    str(r.n_trials),
                    str(r.n_failures),
                    str(r.seed),
                )
            )
        )
    return "\n".join(lines) + "\n"


def render_json(table: ResultTable, config_mapping: dict[str, str] | None = None) -> str:
    payload = {
        "version": table.version,
        "config_hash": table.config_hash,
        "master_seed": table.master_seed,
        "config": config_mapping or {},
        "rows": [
            {
                "scheme": r.scheme,
                "axis_name": r.axis_name,
                "axis_value": r.axis_value,
                "mean_sum_rate": r.mean_sum_rate,
                "stderr": r.stderr,
                "mean_per_user_rate": r.mean_per_user_rate,
                "median_design_time_s": r.median_design_time_s,
                "n_trials": r.n_trials,
                "n_failures": r.n_failures,
                "seed": r.seed,
            }
            for r in sorted(table.rows, key=lambda r: (r.scheme, r.axis_value))
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def parse_json_table(text: str) -> ResultTable:
    """Inverse of render_json (the embedded config is not restored)."""
    payload = json.loads(text)
    rows = tuple(
        ResultRow(
            scheme=r["scheme"],
            axis_name=r["axis_name"],
            axis_value=r["axis_value"],
            mean_sum_rate=r["mean_sum_rate"],
            stderr=r["stderr"],
            mean_per_user_rate=r["mean_per_user_rate"],
            median_design_time_s=r["median_design_time_s"],
            n_trials=r["n_trials"],
            n_failures=r["n_failures"],
            seed=r["seed"],
        )
        for r in payload["rows"]
    )
    return ResultTable(
        rows=rows,
        config_hash=payload["config_hash"],
        master_seed=payload["master_seed"],
        version=payload["version"],
    )


def emit_results(
    table: ResultTable,
    fmt: str,
    destination: str | Path,
    config_mapping: dict[str, str] | None = None,
) -> None:
    """Write the table as CSV or JSON; output bytes depend only on inputs."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    text = render_csv(table) if fmt == "csv" else render_json(table, config_mapping)
    Path(destination).write_text(text)


def format_real_matrix(values: np.ndarray, title: str) -> str:
    """Human-readable tabular dump of a real matrix (space separated)."""
    values = np.atleast_2d(np.asarray(values, dtype=float))
    lines = [f"# {title}", f"# rows={values.shape[0]} cols={values.shape[1]}"]
    for row in values:
        lines.append(" ".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def format_assignment(selected: tuple[int, ...], n_codewords: int) -> str:
    """Selection matrix plus 1-based selected codeword indices."""
    lines = [
        "# selection matrix (rows=users, cols=codewords)",
        f"# selected codewords (1-based): {' '.join(str(n + 1) for n in selected)}",
    ]
    for n in selected:
        row = ["0"] * n_codewords
        row[n] = "1"
        lines.append(" ".join(row))
    return "\n".join(lines) + "\n"


def format_tap_dump(
    taps: np.ndarray, params_hash: str, seed: int, trial: int
) -> str:
    """Tap-domain channel dump, one line per (user, tap, antenna) entry.

    Columns: user tap antenna re im (indices 1-based, floats via repr so
    the values round-trip exactly).
    """
    n_u, n_c, n = taps.shape
    lines = [
        "# beamsel tap channel dump v1",
        f"# params_hash={params_hash} master_seed={seed} trial={trial}",
        f"# users={n_u} taps={n_c} antennas={n}",
        "# columns: user tap antenna re im",
    ]
    for u in range(n_u):
        for d in range(n_c):
            for q in range(n):
                v = taps[u, d, q]
                lines.append(f"{u + 1} {d + 1} {q + 1} {v.real!r} {v.imag!r}")
    return "\n".join(lines) + "\n"


def parse_tap_dump(text: str) -> np.ndarray:
    """Read back a tap dump into a (users, taps, antennas) complex array."""
    header = {}
    entries = []
    for line in text.splitlines():
        if line.startswith("#"):
            for token in line[1:].split():
                if "=" in token:
                    key, _, val = token.partition("=")
                    header[key] = val
            continue
        u, d, q, re_s, im_s = line.split()
        entries.append((int(u) - 1, int(d) - 1, int(q) - 1, float(re_s), float(im_s)))
    shape = (int(header["users"]), int(header["taps"]), int(header["antennas"]))
    taps = np.zeros(shape, dtype=complex)
    for u, d, q, re_v, im_v in entries:
        taps[u, d, q] = re_v + 1j * im_v
    return taps
