"""File formats: stats CSV/JSON, two-column distribution CSVs, run manifests.

Outputs are staged in memory by :class:`OutputSet` and only written when a
command finishes, each file via a temporary sibling and ``os.replace``, so a
failing command leaves no partial files behind.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .exceptions import MissingSeries
from .network import EXTRA_COLUMNS, STAT_COLUMNS

STATS_HEADER = ("model",) + STAT_COLUMNS + EXTRA_COLUMNS


def fmt(x) -> str:
    if isinstance(x, float):
        return "nan" if math.isnan(x) else repr(x)
    return str(x)


def jsonable(obj):
    """Replace NaN/inf by ``None`` and tuples/sets by lists, recursively."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return jsonable(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, ensure_ascii=False) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def stats_rows_csv(rows) -> str:
    """``rows`` is a sequence of ``(label, NetStats | dict)``."""
    out = []
    for label, st in rows:
        if isinstance(st, dict):
            get = (lambda c, s=st: s.get(c, float("nan")))
        else:
            get = (lambda c, s=st: getattr(s, c))
        out.append([label] + [get(c) for c in STAT_COLUMNS + EXTRA_COLUMNS])
    return csv_text(STATS_HEADER, out)


def histogram_csv(hist: dict, x: str, y: str) -> str:
    return csv_text((x, y), sorted(hist.items()))


def read_stats_csv(path) -> list:
    """Rows of a stats CSV as dicts with numeric values."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no rows")
    out = []
    for r in rows:
        d = {"model": r.get("model", "")}
        for c in STAT_COLUMNS + EXTRA_COLUMNS:
            if c in r and r[c] != "":
                d[c] = float(r[c])
        out.append(d)
    return out


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class OutputSet:
    """Files to be written together once a command has succeeded."""

    def __init__(self):
        self.files: dict = {}

    def add(self, name: str, text: str) -> None:
        if name in self.files:
            raise ValueError(f"duplicate output {name}")
        self.files[name] = text

    def __contains__(self, name):
        return name in self.files

    def commit(self, out_dir) -> list:
        out_dir = Path(out_dir)
        written = []
        for name in sorted(self.files):
            atomic_write(out_dir / name, self.files[name])
            written.append(out_dir / name)
        return written


@dataclass
class RunManifest:
    command: list
    seed: int
    version: str
    lexicon_sha256: str = ""
    config: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)

    def to_json(self) -> str:
        return dumps(self.__dict__)


# --- figure data -----------------------------------------------------------

def _series(results: dict, key: str):
    if key not in results or results[key] is None:
        raise MissingSeries(f"results lack the {key!r} series")
    return results[key]


def figure_files(results: dict, which: str) -> dict:
    """CSV texts for one figure, keyed by file name.

    ``results`` layouts:

    * ``fig2``: ``{"degree": {series: histogram}}``
    * ``fig3a``: ``{"f_sweep": [(f, ratio, sem), ...]}``
    * ``fig5``: ``{"scans": {W_C: CoreScan-like dict}, "degree": {series: histogram}}``
    * ``fig6``: ``{"eps_sweep": [(eps, L0, L), ...], "components": {series: histogram}}``
      (either key may be absent, but not both)
    """
    files = {}
    if which == "fig2":
        for name, hist in _series(results, "degree").items():
            files[f"fig2_degree_{_slug(name)}.csv"] = histogram_csv(hist, "k", name)
    elif which == "fig3a":
        rows = _series(results, "f_sweep")
        files["fig3a_gc_ratio.csv"] = csv_text(("f", "|G|/|G_target|", "sem"), rows)
    elif which == "fig5":
        for W, scan in sorted(_series(results, "scans").items()):
            pts = [p for p in scan["points"] if p.get("feasible")]
            files[f"fig5b_L0_Wc{W}.csv"] = csv_text(
                ("m_C", f"W_C={W}", "sem"), [(p["m_C"], p["L0"], p["L0_sem"]) for p in pts])
        for name, hist in results.get("degree", {}).items():
            files[f"fig5c_degree_{_slug(name)}.csv"] = histogram_csv(hist, "k", name)
    elif which == "fig6":
        if "eps_sweep" not in results and "components" not in results:
            raise MissingSeries("fig6 needs an eps sweep or component-size histograms")
        if "eps_sweep" in results:
            files["fig6a_links.csv"] = csv_text(("eps", "L0", "L"), results["eps_sweep"])
        for name, hist in results.get("components", {}).items():
            files[f"fig6d_components_{_slug(name)}.csv"] = histogram_csv(hist, "size", name)
    else:
        raise ValueError(f"unknown figure {which!r}")
    if not files:
        raise MissingSeries(f"no series to emit for {which}")
    return files


def _slug(name) -> str:
    return "".join(c if c.isalnum() else "_" for c in str(name)).strip("_").lower()


def emit_figure_data(results: dict, which: str, out_dir) -> list:
    out = OutputSet()
    for name, text in figure_files(results, which).items():
        out.add(name, text)
    return out.commit(out_dir)
