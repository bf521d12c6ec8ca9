"""File output for experiment rows: a flat CSV table, one SVG figure per
experiment, and a JSON run manifest.

Byte determinism is part of the contract: identical rows produce identical
files.  Floats are written with 17 significant digits (lossless round-trip),
matplotlib's hash salt and date metadata are pinned, and every file is staged
under a .partial suffix and renamed only once complete.
"""
from __future__ import annotations

import json
import math
import os
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .verify import ExperimentRow

CSV_HEADER = "experiment,n,p,q,alpha,m,seed,value,tail,verdict"
_SVG_SALT = "rieszlat"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return f"{float(x):.17g}"


def _row_line(row: ExperimentRow) -> str:
    fields = (
        row.experiment,
        _fmt(row.n),
        _fmt(row.p),
        _fmt(row.q),
        _fmt(row.alpha),
        _fmt(row.m),
        _fmt(row.seed),
        _fmt(row.value),
        _fmt(row.tail),
        row.verdict,
    )
    return ",".join(fields)


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".partial")
    try:
        tmp.write_text(text, encoding="utf-8", newline="\n")
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc


def write_rows(rows: Sequence[ExperimentRow], path: str | Path) -> Path:
    """Write rows as CSV (UTF-8, LF, header first); returns the final path."""
    path = Path(path)
    lines = [CSV_HEADER]
    lines.extend(_row_line(r) for r in rows)
    _atomic_write_text(path, "\n".join(lines) + "\n")
    return path


def _parse(text: str, kind):
    return None if text == "" else kind(text)


def read_rows(path: str | Path) -> list[ExperimentRow]:
    """Parse a CSV written by write_rows back into rows, numerically exact."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: missing or unexpected header")
    out = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 10:
            raise ValueError(f"{path}: malformed row: {line!r}")
        out.append(
            ExperimentRow(
                experiment=parts[0],
                n=_parse(parts[1], int),
                p=_parse(parts[2], float),
                q=_parse(parts[3], float),
                alpha=_parse(parts[4], float),
                m=_parse(parts[5], int),
                seed=_parse(parts[6], int),
                value=_parse(parts[7], float),
                tail=_parse(parts[8], float),
                verdict=parts[9],
            )
        )
    return out


def _group_label(row: ExperimentRow) -> str:
    bits = []
    if row.n is not None:
        bits.append(f"n={row.n}")
    if row.p is not None:
        bits.append(f"p={row.p:g}")
    if row.alpha is not None:
        bits.append(f"alpha={row.alpha:g}")
    return " ".join(bits) or "all"

def _sweeps_m(rows: Sequence[ExperimentRow]) -> bool:
    ms = {r.m for r in rows if r.m is not None and r.m > 0 and r.value is not None}
    return len(ms) >= 2


def render_figures(rows: Sequence[ExperimentRow], out_dir: str | Path) -> list[Path]:
    """One SVG per experiment tag; log-log value-vs-m when the rows sweep m,
    a flat value-vs-row-index plot otherwise.  Deterministic output bytes."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_exp: dict[str, list[ExperimentRow]] = {}
    for r in rows:
        by_exp.setdefault(r.experiment, []).append(r)

    plt.rcParams["svg.hashsalt"] = _SVG_SALT
    paths = []
    for exp in sorted(by_exp):
        group = by_exp[exp]
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        if _sweeps_m(group):
            series: dict[str, list[tuple[int, float]]] = {}
            for r in group:
                if r.m is None or r.m <= 0 or r.value is None:
                    continue
                if not (math.isfinite(r.value) and r.value > 0):
                    continue
                series.setdefault(_group_label(r), []).append((r.m, r.value))
            for label in sorted(series):
                pts = sorted(series[label])
                ax.loglog([m for m, _ in pts], [v for _, v in pts], "o-", label=label)
            ax.set_xlabel("m")
            if len(series) <= 12:
                ax.legend(fontsize=7)
        else:
            xs, ys = [], []
            for i, r in enumerate(group):
                if r.value is not None and math.isfinite(r.value):
                    xs.append(i)
                    ys.append(r.value)
            ax.plot(xs, ys, "o", markersize=3)
            ax.set_xlabel("row")
        ax.set_ylabel("value")
        ax.set_title(exp)
        ax.grid(True, which="both", alpha=0.3)
        fig.tight_layout()

        path = out_dir / f"{exp}.svg"
        tmp = path.with_name(path.name + ".partial")
        try:
            fig.savefig(tmp, format="svg", metadata={"Date": None})
            os.replace(tmp, path)
        except OSError as exc:
            raise OSError(f"writing {path}: {exc}") from exc
        finally:
            plt.close(fig)
        paths.append(path)
    return paths


def write_manifest(path: str | Path, payload: dict) -> Path:
    """JSON manifest; the CLI calls this last as the completion marker."""
    path = Path(path)
    _atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path
