"""Pixel geometry and sample-in-center plotting of relations."""
from __future__ import annotations

import itertools
import math
from typing import NamedTuple, Sequence

import numpy as np

from .errors import PackMismatch
from .expr import Relation, distance_array, evaluate_array
from .gam import BOOL, PixelArray
from .model import Pack, Port

DEFAULT_TOLERANCE = 0.05


def pixel_box(pack: Pack, e: Sequence[int]) -> tuple[tuple[float, float], ...]:
    """Half-open interval ``[lo, hi)`` per port covered by entry ``e``."""
    e = pack.check_entry(e)
    return tuple(
        (p.lower + p.step * (c - 1), p.lower + p.step * c) for p, c in zip(pack.ports, e)
    )


def pixel_center(pack: Pack, e: Sequence[int]) -> tuple[float, ...]:
    e = pack.check_entry(e)
    return tuple(p.lower + (c - 0.5) * p.step for p, c in zip(pack.ports, e))


def pack_radius(pack: Pack) -> float:
    """l-infinity radius of a pixel: half the widest pixel side."""
    return max((p.step / 2 for p in pack.ports), default=0.0)


def locate(pack: Pack, point: Sequence[float]) -> tuple[int, ...]:
    """Entry whose pixel contains ``point`` (which must lie in the bounding box)."""
    e = []
    for p, x in zip(pack.ports, point):
        if not p.lower <= x < p.upper:
            raise ValueError(f"{x} outside [{p.lower}, {p.upper}) for port {p.name!r}")
        c = int(math.floor((x - p.lower) / p.step)) + 1
        # floor can land one pixel off right at a boundary
        lo = p.lower + p.step * (c - 1)
        if x < lo:
            c -= 1
        elif x >= p.lower + p.step * c:
            c += 1
        e.append(min(max(c, 1), p.resolution))
    return tuple(e)


def center_axis(port: Port) -> np.ndarray:
    idx = np.arange(1, port.resolution + 1, dtype=float)
    return port.lower + (idx - 0.5) * port.step


def _grid_env(pack: Pack) -> dict[str, np.ndarray]:
    d = len(pack)
    env = {}
    for k, p in enumerate(pack.ports):
        shape = [1] * d
        shape[k] = p.resolution
        env[p.name] = center_axis(p).reshape(shape)
    return env


def _check(rel: Relation, pack: Pack):
    if tuple(sorted(rel.variables)) != pack.names:
        raise PackMismatch(
            f"relation {rel.id!r} has variables {rel.variables}, pack has {pack.names}"
        )


def distance_grid(rel: Relation, pack: Pack) -> np.ndarray:
    """Distance to the target at every pixel center, shaped like the pack."""
    _check(rel, pack)
    values = evaluate_array(rel.lhs, _grid_env(pack))
    return np.broadcast_to(distance_array(values, rel.target), pack.shape)


def sample_in_center_plot(
    rel: Relation,
    pack: Pack,
    tol: float = DEFAULT_TOLERANCE,
    lipschitz: float | None = None,
    block: int = 8,
) -> PixelArray:
    """Turn on every pixel whose center is within ``tol`` of the target set.

    With a Lipschitz bound (l-infinity in the inputs) a coarse pass over
    ``block``-wide blocks first rules out regions that cannot contain an
    on-pixel; the result is identical to the plain plot whenever the bound
    holds.
    """
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    _check(rel, pack)
    if lipschitz is None or len(pack) == 0:
        on = distance_grid(rel, pack) <= tol
        return PixelArray(pack, np.ascontiguousarray(on), BOOL)
    return PixelArray(pack, _coarse_then_fine(rel, pack, tol, lipschitz, block), BOOL)


def _coarse_then_fine(rel, pack, tol, lipschitz, block):
    d = len(pack)
    coarse_env = {}
    for k, p in enumerate(pack.ports):
        centers = center_axis(p)
        starts = centers[::block]
        ends = centers[block - 1 :: block]
        if len(ends) < len(starts):
            ends = np.append(ends, centers[-1])
        shape = [1] * d
        shape[k] = len(starts)
        coarse_env[p.name] = ((starts + ends) / 2).reshape(shape)
    # fine centers sit within (block - 1) pixel radii of their block center
    slack = lipschitz * (block - 1) * pack_radius(pack)
    coarse = distance_array(evaluate_array(rel.lhs, coarse_env), rel.target)
    keep = ~(coarse > tol + slack)  # undefined coarse centers are inconclusive
    keep = np.broadcast_to(keep, tuple(-(-r // block) for r in pack.shape))
    for axis in range(d):
        keep = np.repeat(keep, block, axis=axis)
    keep = keep[tuple(slice(0, r) for r in pack.shape)]

    out = np.zeros(pack.shape, dtype=bool)
    idx = np.nonzero(keep)
    if idx[0].size:
        env = {p.name: p.lower + (idx[k] + 0.5) * p.step for k, p in enumerate(pack.ports)}
        dist = distance_array(evaluate_array(rel.lhs, env), rel.target)
        out[idx] = np.broadcast_to(dist, idx[0].shape) <= tol
    return out


class ErrorBand(NamedTuple):
    min_distance: float
    points: int


def subgrid_axis(port: Port, c: int, samples: int) -> np.ndarray:
    """``samples`` midpoints of an even split of pixel ``c`` along ``port``."""
    k = np.arange(samples, dtype=float)
    return port.lower + port.step * (c - 1) + port.step * (k + 0.5) / samples


def error_band(rel: Relation, pack: Pack, e: Sequence[int], samples: int = 5) -> ErrorBand:
    """Smallest distance to the target seen on a regular sub-grid of one pixel.

    An odd ``samples`` includes the pixel center. ``min_distance <= u``
    approximates "the pixel error achieves u" and ``min_distance > l``
    approximates "the pixel error is always above l".
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    _check(rel, pack)
    e = pack.check_entry(e)
    d = len(pack)
    env = {}
    for k, (p, c) in enumerate(zip(pack.ports, e)):
        shape = [1] * d
        shape[k] = samples
        env[p.name] = subgrid_axis(p, c, samples).reshape(shape)
    dist = distance_array(evaluate_array(rel.lhs, env), rel.target)
    return ErrorBand(float(np.min(dist)), samples**d)


def estimate_lipschitz(rel: Relation, pack: Pack, samples: int = 2000, seed: int = 0) -> float:
    """Sampled finite-difference estimate of the l-infinity Lipschitz constant.

    This is a heuristic lower estimate of the true constant; undefined
    samples are skipped.
    """
    _check(rel, pack)
    if len(pack) == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    lo = np.array([p.lower for p in pack.ports])
    hi = np.array([p.upper for p in pack.ports])
    h = np.array([p.step for p in pack.ports]) / 4
    x = rng.uniform(lo, hi, size=(samples, len(pack)))
    base = evaluate_array(rel.lhs, {p.name: x[:, k] for k, p in enumerate(pack.ports)})
    total = np.zeros(samples)
    for k, p in enumerate(pack.ports):
        y = x.copy()
        y[:, k] = np.minimum(y[:, k] + h[k], hi[k])
        step = y[:, k] - x[:, k]
        shifted = evaluate_array(rel.lhs, {q.name: y[:, j] for j, q in enumerate(pack.ports)})
        with np.errstate(all="ignore"):
            total = total + np.abs(shifted - base) / np.where(step > 0, step, np.inf)
    total = total[np.isfinite(total)]
    return float(total.max()) if total.size else 0.0


def suggest_tolerance(rel: Relation, pack: Pack, samples: int = 2000, seed: int = 0) -> float:
    """A tolerance just above the estimated continuity bound: 1.1 * L * radius."""
    return 1.1 * estimate_lipschitz(rel, pack, samples, seed) * pack_radius(pack)


def all_entries(pack: Pack):
    return itertools.product(*(range(1, r + 1) for r in pack.shape))
