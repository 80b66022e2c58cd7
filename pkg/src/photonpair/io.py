"""CSV and JSON readers/writers for reports and plot data.

All writers go through a temporary file in the target directory followed by
``os.replace`` so readers never see a partial file.  Frequencies in CSV files
are absolute, in THz (rad/fs x 1e3); times are in fs.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .wigner import ChronocyclicWigner, IntensityProfile


def _umask():
    mask = os.umask(0)
    os.umask(mask)
    return mask


def atomic_write_text(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.chmod(tmp, 0o666 & ~_umask())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _rows_to_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header is not None:
        w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return "" if x is None else x


def _read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n"


def write_json(path, obj):
    return atomic_write_text(path, dumps_json(obj))


def read_json(path):
    return json.loads(Path(path).read_text())


# --- Wigner grid ---------------------------------------------------------------


def write_cwf(path, w: ChronocyclicWigner):
    """First row: blank then the t axis (fs); each next row: omega (THz) then W values."""
    rows = [[""] + [float(t) for t in w.t]]
    rows += [[float(om * 1e3)] + [float(v) for v in row] for om, row in zip(w.omega, w.values)]
    return atomic_write_text(path, _rows_to_text(None, rows))


def read_cwf(path) -> ChronocyclicWigner:
    rows = _read_rows(path)
    t = np.array([float(x) for x in rows[0][1:]])
    omega = np.array([float(r[0]) for r in rows[1:]]) * 1e-3
    values = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
    return ChronocyclicWigner(omega, t, values, omega_c=float(np.mean(omega[[0, -1]])))


# --- contours ------------------------------------------------------------------

CONTOUR_HEADER = ("contour_id", "omega_THz", "t_fs")


def write_contours(path, polys):
    rows = [(i, float(om * 1e3), float(t)) for i, p in enumerate(polys) for om, t in p]
    return atomic_write_text(path, _rows_to_text(CONTOUR_HEADER, rows))


def read_contours(path):
    """List of (K, 2) arrays of (omega rad/fs, t fs), in file order."""
    rows = _read_rows(path)
    if tuple(rows[0]) != CONTOUR_HEADER:
        raise ValueError(f"{path}: unexpected contour header {rows[0]}")
    out = {}
    for cid, om, t in rows[1:]:
        out.setdefault(int(cid), []).append((float(om) * 1e-3, float(t)))
    return [np.array(out[k]) for k in sorted(out)]


# --- marginals -----------------------------------------------------------------


def write_profile(path, profile: IntensityProfile, axis_name):
    rows = zip(profile.axis * (1e3 if axis_name == "omega_THz" else 1.0), profile.density)
    return atomic_write_text(path, _rows_to_text((axis_name, "intensity"), rows))


def read_profile(path) -> IntensityProfile:
    rows = _read_rows(path)
    scale = 1e-3 if rows[0][0] == "omega_THz" else 1.0
    data = np.array([[float(a), float(b)] for a, b in rows[1:]])
    return IntensityProfile(data[:, 0] * scale, data[:, 1])


# --- Schmidt spectrum / scans ---------------------------------------------------


def write_schmidt(path, eigenvalues, limit=None):
    lam = np.asarray(eigenvalues)[:limit]
    return atomic_write_text(path, _rows_to_text(("m", "lambda"),
                                                 ((m, float(v)) for m, v in enumerate(lam))))


def read_schmidt(path):
    rows = _read_rows(path)
    return np.array([float(r[1]) for r in rows[1:]])


def write_scan(path, table):
    """CSV with one row per cell plus ``<path>.json`` with the scan metadata."""
    from .design import SCAN_FIELDS

    rows = [[r[f] for f in SCAN_FIELDS] for r in table.records]
    atomic_write_text(path, _rows_to_text(SCAN_FIELDS, rows))
    sidecar = Path(str(path) + ".json")
    write_json(sidecar, table.metadata)
    return Path(path), sidecar


def read_scan(path):
    """List of dicts; numeric fields parsed, blanks become ``None``."""
    rows = _read_rows(path)
    header = rows[0]
    out = []
    for r in rows[1:]:
        rec = {}
        for k, v in zip(header, r):
            if k == "error":
                rec[k] = v or None
            else:
                rec[k] = float(v) if v != "" else None
        out.append(rec)
    return out
