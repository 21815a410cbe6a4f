"""Point set files: JSON ``{"d", "n", "points"}`` or CSV with one point per row."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .sphere import PointSet


def pointset_to_dict(P: PointSet) -> dict:
    out = {"d": P.d, "n": P.n, "points": P.coords.tolist()}
    if P.label:
        out["label"] = P.label
    return out


def pointset_from_dict(obj: dict) -> PointSet:
    pts = np.asarray(obj["points"], dtype=float)
    P = PointSet(pts, obj.get("label"))
    if "d" in obj and int(obj["d"]) != P.d:
        raise ValueError(f"file says d={obj['d']} but points have length {P.d + 1}")
    if "n" in obj and int(obj["n"]) != P.n:
        raise ValueError(f"file says n={obj['n']} but holds {P.n} points")
    return P


def save_pointset(P: PointSet, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            for row in P.coords:
                # repr is the shortest string that round-trips exactly
                w.writerow([repr(float(v)) for v in row])
    else:
        path.write_text(json.dumps(pointset_to_dict(P)) + "\n")


def load_pointset(path: str | Path) -> PointSet:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with path.open(newline="") as fh:
            rows = [[float(v) for v in r] for r in csv.reader(fh) if r and not r[0].startswith("#")]
        return PointSet(np.asarray(rows), label=path.stem)
    return pointset_from_dict(json.loads(path.read_text()))
