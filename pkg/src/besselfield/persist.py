"""On-disk formats: columnar CSV for numeric tables, JSON for manifests.

All files are UTF-8 with LF line endings; floats are written with shortest
round-trip precision so a rerun from the manifest reproduces outputs
bit-exactly.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path

import numpy as np

from .errors import DomainError
from .simulate import FieldSample


def fmt(x) -> str:
    """Shortest decimal that round-trips to the same float."""
    return repr(float(x))


def write_manifest(path, payload: dict):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_sample_csv(path, sample: FieldSample):
    """One realisation as rows alpha,t,index,value (index is 1-based)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["alpha", "t", "index", "value"])
        for alpha in sample.grid.alphas:
            for t in sample.grid.times:
                for idx, val in enumerate(sample.eigenvalues[(alpha, t)], start=1):
                    w.writerow([alpha, fmt(t), idx, fmt(val)])


def read_sample_csv(path) -> dict:
    """Inverse of :func:`write_sample_csv`: {(alpha, t): ascending vector}."""
    acc: dict = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header != ["alpha", "t", "index", "value"]:
            raise DomainError(f"unexpected sample CSV header {header!r} in {path}")
        for alpha, t, idx, val in r:
            acc.setdefault((int(alpha), float(t)), []).append((int(idx), float(val)))
    out = {}
    for key, items in acc.items():
        items.sort()
        out[key] = np.array([v for _, v in items])
    return out


def write_table_csv(path, header, rows):
    """Generic numeric table; floats formatted for round-trip."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, float) else v for v in row])


def prepare_out_dir(out_dir, force: bool) -> Path:
    """Create the output directory; refuse to reuse a non-empty one without
    force (outputs are append-free)."""
    p = Path(out_dir)
    if p.exists() and any(p.iterdir()) and not force:
        raise DomainError(f"output directory {p} is not empty (use --force to overwrite)")
    p.mkdir(parents=True, exist_ok=True)
    return p


def worker_count(requested: int | None) -> int:
    """Resolve the worker count: BFL_THREADS env overrides, else the request,
    else available parallelism."""
    env = os.environ.get("BFL_THREADS")
    if env:
        return max(1, int(env))
    if requested:
        return max(1, requested)
    return max(1, os.cpu_count() or 1)
