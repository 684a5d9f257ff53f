"""Output formats for boolean arrays: PBM, ASCII preview and sparse JSON.

Two-dimensional arrays are drawn matrix-style: the first port indexes rows
(downward), the second indexes columns (rightward).
"""
from __future__ import annotations

import json

import numpy as np

from .errors import NotTwoDimensional
from .gam import BOOL, PixelArray
from .model import Pack, Port


def _require_2d(array: PixelArray):
    if len(array.pack) != 2:
        raise NotTwoDimensional(
            f"expected a 2-D array, got {len(array.pack)} ports {array.pack.names}"
        )


def render_pbm(array: PixelArray) -> bytes:
    """Plain PBM (``P1``): width is the second port's resolution, height the first's."""
    _require_2d(array)
    rows, cols = array.pack.shape
    on = array.values.astype(bool)
    lines = [f"P1\n{cols} {rows}\n"]
    for i in range(rows):
        lines.append(" ".join("1" if v else "0" for v in on[i]) + "\n")
    return "".join(lines).encode("ascii")


def parse_pbm(data: bytes) -> np.ndarray:
    """Read a plain PBM back into a boolean matrix (comments allowed)."""
    text = data.decode("ascii")
    tokens = []
    for line in text.splitlines():
        tokens.extend(line.split("#", 1)[0].split())
    if not tokens or tokens[0] != "P1":
        raise ValueError("not a plain PBM (P1) image")
    width, height = int(tokens[1]), int(tokens[2])
    bits = "".join(tokens[3:])
    if len(bits) != width * height or set(bits) - {"0", "1"}:
        raise ValueError("PBM pixel data does not match its header")
    return np.array([c == "1" for c in bits], dtype=bool).reshape(height, width)


def render_ascii(array: PixelArray, on: str = "#", off: str = ".") -> str:
    values = array.values.astype(bool)
    if values.ndim == 0:
        return (on if values else off) + "\n"
    if values.ndim == 1:
        values = values[:, None]
    elif values.ndim > 2:
        values = values.reshape(values.shape[0], -1)
    return "".join("".join(on if v else off for v in row) + "\n" for row in values)


def render_json(array: PixelArray) -> str:
    """Sparse JSON: the pack's ports and the sorted 1-based entries that are on."""
    idx = np.argwhere(array.values.astype(bool))
    entries = sorted(tuple(int(c) + 1 for c in row) for row in idx)
    obj = {
        "pack": [
            {"name": p.name, "lower": p.lower, "upper": p.upper, "resolution": p.resolution}
            for p in array.pack.ports
        ],
        "on_entries": [list(e) for e in entries],
    }
    return json.dumps(obj, separators=(",", ":"))


def parse_json(text: str) -> PixelArray:
    obj = json.loads(text)
    pack = Pack(
        tuple(Port(p["name"], float(p["lower"]), float(p["upper"]), int(p["resolution"]))
              for p in obj["pack"])
    )
    out = PixelArray.zeros(pack, BOOL)
    for e in obj["on_entries"]:
        out.set(e, True)
    return out
