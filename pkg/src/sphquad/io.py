"""CSV and JSON files for point sets, quadrature rules, tables and lon-lat
data.

Floats are written with ``repr``, the shortest decimal string that reads
back to the same double, so write -> read -> write reproduces the bytes.
"""
import csv
import json
import logging
import math
from pathlib import Path

import numpy as np

from .errors import DataFormatError
from .geometry import PointSet
from .quadrature.rules import QuadratureRule

log = logging.getLogger(__name__)


def fmt(value):
    """Round-trip-exact text for one table cell."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path, obj):
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text)


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON ({exc})", [exc.lineno]) from exc


def write_table(path, columns, rows):
    """CSV with a header; ``rows`` are dicts or sequences."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            vals = [row[c] for c in columns] if isinstance(row, dict) else row
            w.writerow([fmt(v) for v in vals])


def _read_numeric(path, width, header):
    """Numeric rows of ``path`` with ``width`` columns (a range).

    A first line whose cells are not numbers is taken as the header.
    Returns (array, column names or None, 1-based line numbers).
    """
    lo, hi = width
    rows, lines, bad = [], [], []
    names = None
    with open(path, newline="") as fh:
        for lineno, cells in enumerate(csv.reader(fh), start=1):
            if not cells or all(not c.strip() for c in cells):
                continue
            if lineno == 1 and not _is_number(cells[0]):
                names = [c.strip() for c in cells]
                continue
            try:
                vals = [float(c) for c in cells]
            except ValueError:
                bad.append(lineno)
                continue
            if not lo <= len(vals) <= hi or not all(map(math.isfinite, vals)):
                bad.append(lineno)
                continue
            rows.append(vals)
            lines.append(lineno)
    if bad:
        shown = ", ".join(map(str, bad[:20])) + (" ..." if len(bad) > 20 else "")
        raise DataFormatError(f"{path}: malformed rows at lines {shown}", bad)
    if len({len(r) for r in rows}) > 1:
        raise DataFormatError(f"{path}: rows have differing column counts")
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    if names is not None and header is not None and names[: len(header)] != header[: len(names)]:
        log.warning("%s: unexpected header %s", path, names)
    return np.array(rows), names, lines


def _is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def write_points(path, C, with_measure=True):
    """Point set as ``x,y,z[,v]`` rows."""
    if with_measure:
        write_table(path, ["x", "y", "z", "v"],
                    np.column_stack([C.points, C.measure]).tolist())
    else:
        write_table(path, ["x", "y", "z"], C.points.tolist())


def read_points(path, renormalize=False):
    """Point set from ``x,y,z[,v]`` rows; equal masses when v is absent.

    With ``renormalize`` points are projected onto the sphere and masses
    rescaled to sum 1; otherwise both must already hold to 1e-12/1e-10.
    """
    A, _, _ = _read_numeric(path, (3, 4), ["x", "y", "z", "v"])
    pts = A[:, :3]
    if renormalize:
        pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    if A.shape[1] == 3:
        return PointSet.uniform(pts)
    v = A[:, 3]
    if renormalize:
        v = v / v.sum()
    kind = "monte-carlo" if np.all(v == v[0]) else "external"
    try:
        return PointSet(pts, v, kind)
    except ValueError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc


def _sidecar(path):
    return Path(path).with_suffix(".json")


def write_rule(path, rule, extra=None):
    """Rule as ``x,y,z,w`` rows plus a JSON sidecar with its metadata."""
    write_table(path, ["x", "y", "z", "w"],
                np.column_stack([rule.nodes, rule.weights]).tolist())
    meta = {k: v for k, v in rule.info.items() if not isinstance(v, np.ndarray)}
    side = {"exactness_degree": rule.exactness_degree,
            "construction": rule.info.get("construction", "unknown"),
            "nodes": len(rule), "info": meta}
    side.update(extra or {})
    write_json(_sidecar(path), side)


def read_rule(path):
    A, _, _ = _read_numeric(path, (4, 4), ["x", "y", "z", "w"])
    side = _sidecar(path)
    meta = read_json(side) if side.exists() else {}
    if "exactness_degree" not in meta:
        log.warning("%s: no sidecar with exactness_degree; assuming 0", path)
    info = dict(meta.get("info", {}))
    info.setdefault("construction", meta.get("construction", "unknown"))
    return QuadratureRule(A[:, :3], A[:, 3], int(meta.get("exactness_degree", 0)), info)


def read_values(path):
    """A single column of data values (header optional)."""
    A, _, _ = _read_numeric(path, (1, 1), None)
    return A[:, 0]


def lonlat_to_xyz(lon_deg, lat_deg):
    """Geographic longitude/latitude in degrees to unit vectors.

    (0, 0) -> (1, 0, 0), (90, 0) -> (0, 1, 0), latitude 90 -> (0, 0, 1).
    """
    lon = np.radians(np.asarray(lon_deg, dtype=float))
    lat = np.radians(np.asarray(lat_deg, dtype=float))
    c = np.cos(lat)
    xyz = np.stack([c * np.cos(lon), c * np.sin(lon), np.sin(lat)], axis=-1)
    # exact poles and axes where the trigonometric values should vanish
    xyz[np.abs(xyz) < 1e-16] = 0.0
    return xyz / np.linalg.norm(xyz, axis=-1, keepdims=True)


def ingest_lonlat(path):
    """Read ``lon_deg,lat_deg,value`` rows into (PointSet, values).

    Longitudes are wrapped into [-180, 180); latitudes must lie in
    [-90, 90].  Repeated (lon, lat) pairs are rejected with their line
    numbers.  Distinct grid entries at a pole map to the same point; they
    are kept and reported in the log.  The measure is 1/M per row.
    """
    A, _, lines = _read_numeric(path, (3, 3), ["lon_deg", "lat_deg", "value"])
    lines = np.asarray(lines)
    lon = (A[:, 0] + 180.0) % 360.0 - 180.0
    lat = A[:, 1]
    bad = lines[(lat < -90.0) | (lat > 90.0)]
    if bad.size:
        raise DataFormatError(f"{path}: latitude outside [-90, 90] at lines "
                              f"{', '.join(map(str, bad[:20]))}", bad.tolist())
    key = np.stack([lon, lat], axis=1)
    _, first, inverse, counts = np.unique(key, axis=0, return_index=True,
                                          return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    dup = counts[inverse] > 1
    if dup.any():
        groups = {}
        for i in np.flatnonzero(dup):
            groups.setdefault(int(inverse[i]), []).append(int(lines[i]))
        desc = "; ".join("lines " + ", ".join(map(str, g)) for g in list(groups.values())[:10])
        raise DataFormatError(f"{path}: duplicate coordinates ({desc})",
                              sorted(sum(groups.values(), [])))
    poles = np.abs(lat) == 90.0
    if np.count_nonzero(poles) > 2:
        log.warning("%s: %d rows sit on a pole and coincide on the sphere",
                    path, int(np.count_nonzero(poles)))
    return PointSet.uniform(lonlat_to_xyz(lon, lat), kind="external"), A[:, 2]
