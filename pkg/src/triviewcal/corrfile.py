"""Correspondence file schema (version "1"): the cross-tool exchange format.

JSON layout::

    {
      "version": "1",
      "image_size": [1280, 720],
      "gt_intrinsics":   {"fx": .., "fy": .., "cx": .., "cy": ..} | null,
      "init_intrinsics": {"fx": .., "fy": .., "cx": .., "cy": ..} | null,
      "triplets": [
        {"views": ["a", "b", "c"], "points": [[x, y, x2, y2, x3, y3], ...]},
        ...
      ]
    }

Numbers are serialized with shortest round-trip precision (17 significant
digits suffice), so export -> calibrate loses nothing beyond float64.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError
from .geometry import Intrinsics

SCHEMA_VERSION = "1"
MIN_TRIPLES_PER_BLOCK = 7


@dataclass
class TripletBlock:
    views: tuple[str, str, str]
    points: np.ndarray


@dataclass
class CorrespondenceData:
    image_size: tuple[int, int]
    triplets: list[TripletBlock] = field(default_factory=list)
    gt_intrinsics: Intrinsics | None = None
    init_intrinsics: Intrinsics | None = None


def _require(cond: bool, path: str, msg: str) -> None:
    if not cond:
        raise SchemaError(f"{path}: {msg}")


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _parse_intrinsics(obj, path: str) -> Intrinsics | None:
    if obj is None:
        return None
    _require(isinstance(obj, dict), path, f"expected an object, got {type(obj).__name__}")
    vals = []
    for key in ("fx", "fy", "cx", "cy"):
        _require(key in obj, f"{path}.{key}", "missing field")
        v = obj[key]
        _require(_is_number(v), f"{path}.{key}", f"expected a finite number, got {v!r}")
        vals.append(float(v))
    _require(vals[0] > 0 and vals[1] > 0, path, "focal lengths must be positive")
    return Intrinsics(*vals)


def _intrinsics_json(K: Intrinsics | None):
    if K is None:
        return None
    return {"fx": K.fx, "fy": K.fy, "cx": K.cx, "cy": K.cy}


def read_correspondence_file(path) -> CorrespondenceData:
    """Parse and validate; SchemaError messages name the offending field."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc

    _require(isinstance(doc, dict), "$", "top level must be an object")
    _require("version" in doc, "$.version", "missing field")
    _require(
        doc["version"] == SCHEMA_VERSION,
        "$.version",
        f"unrecognized schema version {doc['version']!r} (expected {SCHEMA_VERSION!r})",
    )

    _require("image_size" in doc, "$.image_size", "missing field")
    size = doc["image_size"]
    _require(
        isinstance(size, list) and len(size) == 2,
        "$.image_size",
        "expected [width, height]",
    )
    for i, v in enumerate(size):
        _require(
            isinstance(v, int) and not isinstance(v, bool) and v > 0,
            f"$.image_size[{i}]",
            f"expected a positive integer, got {v!r}",
        )

    gt = _parse_intrinsics(doc.get("gt_intrinsics"), "$.gt_intrinsics")
    init = _parse_intrinsics(doc.get("init_intrinsics"), "$.init_intrinsics")

    _require("triplets" in doc, "$.triplets", "missing field")
    raw_blocks = doc["triplets"]
    _require(isinstance(raw_blocks, list), "$.triplets", "expected a list")
    _require(len(raw_blocks) >= 1, "$.triplets", "need at least one triplet block")

    blocks = []
    for bi, raw in enumerate(raw_blocks):
        bpath = f"$.triplets[{bi}]"
        _require(isinstance(raw, dict), bpath, "expected an object")
        views = raw.get("views")
        _require(
            isinstance(views, list) and len(views) == 3 and all(isinstance(v, str) for v in views),
            f"{bpath}.views",
            "expected three view identifier strings",
        )
        pts = raw.get("points")
        _require(isinstance(pts, list), f"{bpath}.points", "expected a list of 6-number rows")
        _require(
            len(pts) >= MIN_TRIPLES_PER_BLOCK,
            f"{bpath}.points",
            f"{len(pts)} triples < minimum {MIN_TRIPLES_PER_BLOCK}",
        )
        arr = np.empty((len(pts), 6))
        for ri, row in enumerate(pts):
            _require(
                isinstance(row, list) and len(row) == 6,
                f"{bpath}.points[{ri}]",
                "expected 6 numbers",
            )
            for ci, v in enumerate(row):
                _require(
                    _is_number(v),
                    f"{bpath}.points[{ri}][{ci}]",
                    f"expected a finite number, got {v!r}",
                )
                arr[ri, ci] = float(v)
        blocks.append(TripletBlock(views=tuple(views), points=arr))

    return CorrespondenceData(
        image_size=(size[0], size[1]),
        triplets=blocks,
        gt_intrinsics=gt,
        init_intrinsics=init,
    )


def write_correspondence_file(path, data: CorrespondenceData) -> None:
    doc = {
        "version": SCHEMA_VERSION,
        "image_size": [int(data.image_size[0]), int(data.image_size[1])],
        "gt_intrinsics": _intrinsics_json(data.gt_intrinsics),
        "init_intrinsics": _intrinsics_json(data.init_intrinsics),
        "triplets": [
            {
                "views": list(block.views),
                "points": [[float(v) for v in row] for row in np.asarray(block.points)],
            }
            for block in data.triplets
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
