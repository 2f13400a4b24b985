"""Delimited output (CSV / JSON) and SVG line charts."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .model import solve_coefficients  # noqa: E402

# gamma = -0.4 ... 0.4 in steps of 0.1
FIGURE1_COLORS = ("black", "blue", "purple", "magenta", "cyan", "green", "yellow", "orange", "red")


@dataclass(frozen=True)
class FigureSeries:
    label: str
    x: tuple[float, ...]
    y: tuple[float, ...]
    color_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if len(self.x) != len(self.y):
            raise ValueError(f"series {self.label!r}: x and y lengths differ")
        if any(b <= a for a, b in zip(self.x, self.x[1:])):
            raise ValueError(f"series {self.label!r}: x must be strictly increasing")


def format_value(value) -> str:
    """Text form of one cell: floats with 17 significant digits, None as empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def render_csv(records: list[dict]) -> str:
    buf = io.StringIO()
    if records:
        fields = list(records[0])
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for rec in records:
            writer.writerow([format_value(rec[k]) for k in fields])
    return buf.getvalue()


def render_json(command: str, records: list[dict]) -> str:
    def clean(v):
        return None if isinstance(v, float) and not math.isfinite(v) else v

    doc = {"command": command, "records": [{k: clean(v) for k, v in r.items()} for r in records]}
    return json.dumps(doc, indent=2) + "\n"


def render(command: str, records: list[dict], fmt: str) -> str:
    if fmt == "csv":
        return render_csv(records)
    if fmt == "json":
        return render_json(command, records)
    raise ValueError(f"unknown format {fmt!r}")


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def read_csv(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def plot_series(series: list[FigureSeries], path, xlabel: str, ylabel: str, title: str = "",
                colors=FIGURE1_COLORS, marker: str | None = None) -> Path:
    """Draw the series as lines and save an SVG with reproducible bytes."""
    with matplotlib.rc_context({"svg.hashsalt": "bell-mdl", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        for s in series:
            ax.plot(s.x, s.y, color=colors[s.color_index % len(colors)], lw=1.2,
                    marker=marker, ms=4, label=s.label)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.grid(True, color="lightgray", lw=0.5)
        if len(series) > 1:
            ax.legend(fontsize=7, ncol=3, frameon=False)
        fig.tight_layout()
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path


def phi_grid(steps: int) -> list[float]:
    """``steps`` interior angles ``pi i / (steps + 1)``; 179 steps gives whole degrees."""
    if steps < 1:
        raise ValueError("phi_steps must be >= 1")
    return [math.pi * i / (steps + 1) for i in range(1, steps + 1)]


def figure1_records(gammas, phi_steps: int, spec=None) -> list[dict]:
    rows = []
    for gamma in gammas:
        for phi in phi_grid(phi_steps):
            c = solve_coefficients(phi, gamma, spec)
            rows.append({"gamma": float(gamma), "phi": phi, "c1": c.c1, "c2": c.c2})
    return rows


def figure1_series(records: list[dict], column: str) -> list[FigureSeries]:
    by_gamma: dict[float, list[dict]] = {}
    for rec in records:
        by_gamma.setdefault(rec["gamma"], []).append(rec)
    return [
        FigureSeries(f"gamma = {g:+.1f}", [r["phi"] for r in rows], [r[column] for r in rows], i)
        for i, (g, rows) in enumerate(by_gamma.items())
    ]
