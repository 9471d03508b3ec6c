"""Trace CSV files and the on-disk trace cache.

A trace file has one comment line carrying the ray, progression and
target, then columns ``n, x, phi_re, phi_im, residual`` followed by the
log offset ``log(phi - rho)`` split into two columns (empty when absent).
Numbers are written with 17 significant digits so reading a file back
reproduces every double exactly.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import tempfile
from pathlib import Path

from .fixpoints import FixedPointSequence, LocalZeroModel, Progression, TracePoint
from .variants import RaySpec

__all__ = ["write_trace_csv", "read_trace_csv", "manifest_key", "TraceCache", "fmt17"]

COLUMNS = ["n", "x", "phi_re", "phi_im", "residual", "log_offset_re", "log_offset_im"]


def fmt17(v: float) -> str:
    return f"{v:.17g}"


def _pair(z) -> str:
    return "" if z is None else f"{fmt17(z.real)},{fmt17(z.imag)}"


def write_trace_csv(path, seq: FixedPointSequence, partial: bool = False) -> None:
    head = {
        "u": _pair(seq.ray.u),
        "dx": fmt17(seq.prog.dx),
        "count": str(seq.prog.count),
        "target": _pair(seq.target),
        "converged": str(bool(seq.converged)).lower(),
        "partial": str(partial).lower(),
    }
    with open(path, "w", newline="") as fh:
        fh.write("# " + " ".join(f"{k}={v}" for k, v in head.items()) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for i, p in enumerate(seq.points):
            lo = p.log_offset
            w.writerow([i, fmt17(p.x), fmt17(p.phi.real), fmt17(p.phi.imag), fmt17(p.residual),
                        "" if lo is None else fmt17(lo.real), "" if lo is None else fmt17(lo.imag)])


def _complex(text: str):
    if not text:
        return None
    re, im = text.split(",")
    return complex(float(re), float(im))


def read_trace_csv(path) -> FixedPointSequence:
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ValueError(f"{path}: missing trace header line")
        head = dict(item.split("=", 1) for item in first[1:].split())
        rows = list(csv.DictReader(fh))
    target = _complex(head.get("target", ""))
    points = []
    for r in rows:
        lo = None
        if r["log_offset_re"]:
            lo = complex(float(r["log_offset_re"]), float(r["log_offset_im"]))
        points.append(TracePoint(float(r["x"]), complex(float(r["phi_re"]), float(r["phi_im"])),
                                 float(r["residual"]), lo))
    prog = Progression(float(head["dx"]), max(1, len(points)))
    seq = FixedPointSequence(RaySpec(_complex(head["u"])), prog, points, target,
                             head.get("converged") == "true")
    if target is not None and any(p.log_offset is not None and abs(p.phi - target) < 1e-2 for p in points):
        seq.model = LocalZeroModel(target)
    return seq


def manifest_key(manifest: dict) -> str:
    """SHA-256 of the canonical JSON form of a manifest."""
    text = json.dumps(manifest, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


class TraceCache:
    """Traces stored as CSV files named by manifest hash; writes are atomic."""

    def __init__(self, root=None):
        self.root = Path(root if root is not None else os.environ.get("ZVDL_CACHE", ".cache"))

    def path(self, manifest: dict) -> Path:
        return self.root / f"trace-{manifest_key(manifest)}.csv"

    def get(self, manifest: dict) -> FixedPointSequence | None:
        p = self.path(manifest)
        if not p.exists():
            return None
        return read_trace_csv(p)

    def put(self, manifest: dict, seq: FixedPointSequence) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        dest = self.path(manifest)
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-", suffix=".csv")
        os.close(fd)
        try:
            write_trace_csv(tmp, seq)
            os.replace(tmp, dest)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)
        return dest
