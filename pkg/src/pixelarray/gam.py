"""Semiring-valued dense arrays and generalized array multiplication.

``general_multiply`` computes, for every outer entry ``e'``,

    A'(e') = sum over link entries e projecting to e' of prod_i A_i(e|P_i)

in the array's semiring. The vectorised kernel walks the link entries in
blocks; ``loop_multiply`` is the literal one-entry-at-a-time loop and serves
as a reference.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BadResolution, PackMismatch, SemiringMismatch
from .model import OUTER, Pack, Port, WiringDiagram


@dataclass(frozen=True, eq=False)
class Semiring:
    name: str
    dtype: type
    zero: object
    one: object
    add: Callable  # elementwise, numpy
    mul: Callable
    reduce: Callable  # (array, axes) -> array

    def __repr__(self):
        return f"Semiring({self.name})"

    def leq(self, a, b):
        return np.asarray(a) <= np.asarray(b)


def _bool_reduce(x, axes):
    return np.any(x, axis=axes) if axes else x


# Count values saturate here so that products of two cells fit in int64.
COUNT_MAX = 2**31 - 1


def _count_add(a, b):
    return np.minimum(np.add(a, b, dtype=np.int64), COUNT_MAX)


def _count_mul(a, b):
    return np.minimum(np.multiply(a, b, dtype=np.int64), COUNT_MAX)


def _count_reduce(x, axes):
    if not axes:
        return x
    return np.minimum(np.sum(x, axis=axes, dtype=np.int64), COUNT_MAX)


BOOL = Semiring("bool", np.bool_, False, True, np.logical_or, np.logical_and, _bool_reduce)
COUNT = Semiring("count", np.int64, 0, 1, _count_add, _count_mul, _count_reduce)


class PixelArray:
    """Dense array over a pack, stored row-major over the pack's sorted ports."""

    def __init__(self, pack: Pack, values=None, semiring: Semiring = BOOL):
        self.pack = pack
        self.semiring = semiring
        if values is None:
            values = np.full(pack.shape, semiring.zero, dtype=semiring.dtype)
        values = np.asarray(values)
        if values.shape != pack.shape:
            raise PackMismatch(f"values of shape {values.shape} for pack shape {pack.shape}")
        if semiring is BOOL:
            if values.dtype != np.bool_:
                if not np.isin(values, (0, 1)).all():
                    raise ValueError("boolean arrays hold only 0 and 1")
                values = values.astype(np.bool_)
        else:
            values = np.minimum(values.astype(np.int64), COUNT_MAX)
            if (values < 0).any():
                raise ValueError("count arrays hold natural numbers")
        self.values = np.asarray(values)

    @classmethod
    def zeros(cls, pack, semiring=BOOL):
        return cls(pack, None, semiring)

    def offset(self, e) -> int:
        e = self.pack.check_entry(e)
        off = 0
        for c, r in zip(e, self.pack.shape):
            off = off * r + (c - 1)
        return off

    def get(self, e):
        flat = self.values.reshape(-1)
        return flat[self.offset(e)].item()

    def set(self, e, v):
        if self.semiring is BOOL and v not in (0, 1, True, False):
            raise ValueError("boolean arrays hold only 0 and 1")
        self.values.reshape(-1)[self.offset(e)] = v

    def copy(self):
        return PixelArray(self.pack, self.values.copy(), self.semiring)

    def count_on(self) -> int:
        return int(np.count_nonzero(self.values))

    def __le__(self, other: "PixelArray") -> bool:
        _same_pack(self, other)
        return bool(np.all(self.values <= other.values))

    def __eq__(self, other):
        if not isinstance(other, PixelArray):
            return NotImplemented
        return (
            self.pack == other.pack
            and self.semiring is other.semiring
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self):
        return f"PixelArray({self.pack.names}, shape={self.pack.shape}, {self.semiring.name})"


def _same_pack(a, b):
    if a.pack != b.pack:
        raise PackMismatch(f"packs differ: {a.pack.names} vs {b.pack.names}")


def _validate(wd: WiringDiagram, arrays: Sequence[PixelArray]) -> Semiring:
    if len(arrays) != len(wd.inner):
        raise PackMismatch(f"{len(arrays)} arrays for {len(wd.inner)} inner packs")
    for i, (a, pack) in enumerate(zip(arrays, wd.inner)):
        if a.pack != pack:
            raise PackMismatch(f"array {i} is over {a.pack.names}, diagram expects {pack.names}")
    if not arrays:
        return BOOL
    sr = arrays[0].semiring
    if any(a.semiring is not sr for a in arrays):
        raise SemiringMismatch("all arrays must share one semiring")
    return sr


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _to_link_axes(values, axes, nlinks):
    """View ``values`` as an array over all links (size-1 where absent).

    Ports sharing a link are collapsed onto their diagonal.
    """
    uniq = sorted(set(axes))
    if len(uniq) != len(axes) or list(axes) != uniq:
        sub = "".join(_LETTERS[a] for a in axes) + "->" + "".join(_LETTERS[a] for a in uniq)
        values = np.einsum(sub, values)
    shape = [1] * nlinks
    for a, r in zip(uniq, values.shape):
        shape[a] = r
    return values.reshape(shape)


BLOCK_ELEMENTS = 1 << 21


def _blocks(shape, limit):
    """Split the link grid into slabs of at most ``limit`` elements.

    Leading axes are iterated one index at a time until the remaining tail
    fits, and the next axis is then cut into chunks.
    """
    nd = len(shape)
    tail = math.prod(shape)
    k = 0
    while k < nd and tail > limit:
        tail //= shape[k]
        k += 1
    if k == 0:
        yield tuple(slice(None) for _ in range(nd))
        return
    # axes 0..k-2 fixed per index, axis k-1 cut into chunks
    chunk = max(1, limit // max(tail, 1))
    ranges = [range(shape[a]) for a in range(k - 1)]
    for head in itertools.product(*ranges):
        for start in range(0, shape[k - 1], chunk):
            sl = [slice(h, h + 1) for h in head]
            sl.append(slice(start, min(start + chunk, shape[k - 1])))
            sl.extend(slice(None) for _ in range(nd - k))
            yield tuple(sl)


def _slab_product(views, order, sl, sr, nlinks):
    prod = np.asarray(sr.one, dtype=sr.dtype).reshape([1] * nlinks)
    for i in order:
        v = views[i]
        part = v[tuple(s if v.shape[a] > 1 else slice(None) for a, s in enumerate(sl))]
        if sr is BOOL and not part.any():
            return None
        prod = sr.mul(prod, part)
    return prod


def general_multiply(
    wd: WiringDiagram,
    arrays: Sequence[PixelArray],
    block_elements: int = BLOCK_ELEMENTS,
) -> PixelArray:
    """Multiply ``arrays`` (one per inner pack) according to ``wd``."""
    sr = _validate(wd, arrays)
    nlinks = len(wd.links)
    link_shape = tuple(l.resolution for l in wd.links)
    views = [
        _to_link_axes(a.values, wd.link_axes(i), nlinks) for i, a in enumerate(arrays)
    ]
    outer_axes = wd.link_axes(OUTER)
    kept = sorted(set(outer_axes))
    summed = tuple(a for a in range(nlinks) if a not in kept)
    acc = np.full([link_shape[a] for a in kept], sr.zero, dtype=sr.dtype)
    is_bool = sr is BOOL

    # the biggest factors go first so an empty slab is spotted early
    order = sorted(range(len(views)), key=lambda i: -views[i].size)
    for sl in _blocks(link_shape, block_elements):
        out_sl = tuple(sl[a] for a in kept)
        if is_bool and acc[out_sl].all():
            continue
        prod = _slab_product(views, order, sl, sr, nlinks)
        if prod is None:
            continue  # a boolean factor vanished on this slab
        block_shape = [len(range(link_shape[a])[s]) for a, s in enumerate(sl)]
        red = sr.reduce(np.broadcast_to(prod, block_shape), summed)
        acc[out_sl] = sr.add(acc[out_sl], red)

    return PixelArray(wd.outer, _embed_outer(acc, outer_axes, kept, wd.outer, sr), sr)


def _embed_outer(acc, outer_axes, kept, outer: Pack, sr):
    """Place values over the outer links onto the outer pack's ports."""
    if list(outer_axes) == kept:
        return acc.reshape(outer.shape)
    out = np.full(outer.shape, sr.zero, dtype=sr.dtype)
    grids = np.indices(acc.shape, sparse=True) if acc.ndim else ()
    pos = {a: k for k, a in enumerate(kept)}
    index = tuple(grids[pos[a]] for a in outer_axes)
    out[index] = acc
    return out


def loop_multiply(wd: WiringDiagram, arrays: Sequence[PixelArray]) -> PixelArray:
    """Reference implementation: one pass over every link entry, no shortcuts."""
    sr = _validate(wd, arrays)
    out = PixelArray.zeros(wd.outer, sr)
    flat_out = out.values.reshape(-1)
    ranges = [range(1, l.resolution + 1) for l in wd.links]
    proj = [wd.link_axes(i) for i in range(len(arrays))]
    outer_axes = wd.link_axes(OUTER)
    for e in itertools.product(*ranges):
        a = sr.one
        for arr, axes in zip(arrays, proj):
            a = sr.mul(a, arr.values[tuple(e[k] - 1 for k in axes)])
        off = out.offset(tuple(e[k] for k in outer_axes))
        flat_out[off] = sr.add(flat_out[off], a)
    return out


def specialization_diagram(kind: str, *dims: int) -> WiringDiagram:
    """Diagram for ``"matmul"`` (m, n, p), ``"trace"`` (n) or ``"kronecker"`` (m1, n1, m2, n2).

    All ports live on ``[0, 1)``; only the resolutions matter.
    """
    for d in dims:
        if not isinstance(d, int) or d < 2:
            raise BadResolution(f"dimension {d} must be an integer >= 2")

    def port(name, r):
        return Port(name, 0.0, 1.0, r)

    if kind == "matmul":
        m, n, p = dims
        M = Pack((port("m", m), port("n", n)))
        N = Pack((port("n", n), port("p", p)))
        out = Pack((port("m", m), port("p", p)))
        links = (port("m", m), port("n", n), port("p", p))
        return WiringDiagram((M, N), out, links, (M.names, N.names), out.names)
    if kind == "trace":
        (n,) = dims
        P = Pack((port("n_in", n), port("n_out", n)))
        return WiringDiagram((P,), Pack(()), (port("n", n),), (("n", "n"),), ())
    if kind == "kronecker":
        m1, n1, m2, n2 = dims
        A = Pack((port("m1", m1), port("n1", n1)))
        B = Pack((port("m2", m2), port("n2", n2)))
        out = Pack(A.ports + B.ports)
        links = out.ports
        return WiringDiagram((A, B), out, links, (A.names, B.names), out.names)
    raise ValueError(f"unknown specialization {kind!r}")

