"""Scan reports (named columns, no silent NaN), CSV/JSON emission with
byte-stable formatting, run manifests, and figure rendering.
"""

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ScanReport:
    columns: dict                      # name -> list of values
    descriptions: dict = field(default_factory=dict)   # name -> unit/definition
    fitted_exponents: dict = field(default_factory=dict)
    footnotes: list = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    def validate(self):
        lengths = {name: len(vals) for name, vals in self.columns.items()}
        if len(set(lengths.values())) > 1:
            raise ValueError(f"column lengths differ: {lengths}")
        for name, vals in self.columns.items():
            for i, v in enumerate(vals):
                if isinstance(v, complex):
                    if math.isnan(v.real) or math.isnan(v.imag):
                        raise ValueError(f"NaN in column {name!r} row {i}; "
                                         "record failures as status rows")
                elif isinstance(v, (float, int, np.floating, np.integer)):
                    if math.isnan(float(v)):
                        raise ValueError(f"NaN in column {name!r} row {i}; "
                                         "record failures as status rows")

    @property
    def n_rows(self):
        return len(next(iter(self.columns.values()))) if self.columns else 0


def _format_cell(v):
    if isinstance(v, complex):
        return f"{v.real!r}{v.imag:+}j".replace("+-", "-")
    if isinstance(v, (np.floating,)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return repr(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(report: ScanReport, path):
    """Header metadata comments, one header row, '.' decimals, '\\n' endings."""
    names = list(report.columns)
    try:
        with open(path, "w", newline="") as fh:
            for name in names:
                desc = report.descriptions.get(name, "dimensionless")
                fh.write(f"# {name}: {desc}\n")
            for key, val in sorted(report.fitted_exponents.items()):
                fh.write(f"# fitted {key} = {val!r}\n")
            for note in report.footnotes:
                fh.write(f"# {note}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(names)
            for i in range(report.n_rows):
                writer.writerow([_format_cell(report.columns[n][i])
                                 for n in names])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def _json_value(v):
    if isinstance(v, complex):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def _from_json_value(v):
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        return complex(v["re"], v["im"])
    return v


def write_json(report: ScanReport, path):
    payload = {
        "columns": {n: [_json_value(v) for v in vals]
                    for n, vals in report.columns.items()},
        "descriptions": report.descriptions,
        "fitted_exponents": report.fitted_exponents,
        "footnotes": report.footnotes,
    }
    try:
        with open(path, "w", newline="") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write JSON to {path}: {exc}") from exc


def read_json(path) -> ScanReport:
    with open(path) as fh:
        payload = json.load(fh)
    return ScanReport(
        columns={n: [_from_json_value(v) for v in vals]
                 for n, vals in payload["columns"].items()},
        descriptions=payload.get("descriptions", {}),
        fitted_exponents=payload.get("fitted_exponents", {}),
        footnotes=payload.get("footnotes", []))


def emit(report: ScanReport, format: str, path):
    report.validate()
    if format == "csv":
        write_csv(report, path)
    elif format == "json":
        write_json(report, path)
    else:
        raise ValueError(f"unknown format {format!r}; use csv or json")


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    seed: int
    version: str
    wall_time_s: float
    output_digests: dict = field(default_factory=dict)

    def record_output(self, path):
        self.output_digests[str(path)] = file_digest(path)

    def write(self, path):
        payload = {
            "subcommand": self.subcommand,
            "parameters": {k: _json_value(v)
                           for k, v in sorted(self.parameters.items())},
            "seed": self.seed,
            "version": self.version,
            "wall_time_s": self.wall_time_s,
            "output_digests": self.output_digests,
        }
        with open(path, "w", newline="") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")


def render_figure(report: ScanReport, path, x_column: str = None,
                  logx: bool = False, logy: bool = False, title: str = ""):
    """Render the numeric columns of a report against the x column."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    numeric = {n: vals for n, vals in report.columns.items()
               if vals and isinstance(vals[0], (int, float, np.floating,
                                                np.integer))}
    if not numeric:
        return
    if x_column is None:
        x_column = next(iter(numeric))
    xs = np.asarray(numeric[x_column], dtype=float)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name, vals in numeric.items():
        if name == x_column:
            continue
        ax.plot(xs, np.asarray(vals, dtype=float), marker="o", ms=3,
                lw=1.0, label=name)
    ax.set_xlabel(x_column)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    if title:
        ax.set_title(title)
    if len(numeric) > 1:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
