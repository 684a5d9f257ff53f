"""Packs, wiring diagrams and the entry projections between them.

Entries are 1-based tuples of integers, one coordinate per port, ordered the
same way as the ports of the pack (ascending by name). Link entries are
ordered by link name.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    BadBounds,
    BadResolution,
    DuplicatePort,
    ExposedNotUsed,
    IndexOutOfRange,
    InvalidDiagram,
    UnknownVariable,
)

OUTER = "outer"


@dataclass(frozen=True)
class Port:
    name: str
    lower: float
    upper: float
    resolution: int

    def __post_init__(self):
        if not isinstance(self.resolution, int) or isinstance(self.resolution, bool):
            raise BadResolution(f"port {self.name!r}: resolution must be an integer")
        if self.resolution < 2:
            raise BadResolution(
                f"port {self.name!r}: resolution {self.resolution} < 2"
            )
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise BadBounds(f"port {self.name!r}: bounds must be finite")
        if not self.lower < self.upper:
            raise BadBounds(
                f"port {self.name!r}: lower {self.lower} must be < upper {self.upper}"
            )

    @property
    def step(self) -> float:
        """Pixel width along this port."""
        return (self.upper - self.lower) / self.resolution

    def same_grid(self, other: "Port") -> bool:
        return (self.lower, self.upper, self.resolution) == (
            other.lower,
            other.upper,
            other.resolution,
        )


# A link carries the same data as a port: a name, bounds and a resolution.
Link = Port


@dataclass(frozen=True)
class Pack:
    """An ordered collection of ports; the index schema of one array."""

    ports: tuple[Port, ...] = ()

    def __post_init__(self):
        names = [p.name for p in self.ports]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise DuplicatePort(f"duplicate port names: {dup}")
        if names != sorted(names):
            object.__setattr__(
                self, "ports", tuple(sorted(self.ports, key=lambda p: p.name))
            )

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.ports)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(p.resolution for p in self.ports)

    @property
    def entry_count(self) -> int:
        return math.prod(self.shape)

    def __len__(self):
        return len(self.ports)

    def __iter__(self):
        return iter(self.ports)

    def port(self, name: str) -> Port:
        for p in self.ports:
            if p.name == name:
                return p
        raise KeyError(name)

    def check_entry(self, e: Sequence[int]) -> tuple[int, ...]:
        e = tuple(int(c) for c in e)
        if len(e) != len(self.ports):
            raise IndexOutOfRange(
                f"entry {e} has {len(e)} coordinates, pack has {len(self.ports)} ports"
            )
        for c, p in zip(e, self.ports):
            if not 1 <= c <= p.resolution:
                raise IndexOutOfRange(
                    f"coordinate {c} for port {p.name!r} outside [1, {p.resolution}]"
                )
        return e


def make_pack(specs: Iterable[tuple[str, float, float, int]]) -> Pack:
    """Build a pack from ``(name, lower, upper, resolution)`` tuples.

    Ports are sorted by name, so the argument order does not matter.
    """
    return Pack(tuple(Port(n, float(lo), float(hi), r) for n, lo, hi, r in specs))


@dataclass(frozen=True)
class WiringDiagram:
    """Inner packs wired into an outer pack through a set of links.

    ``inner_links[i][k]`` is the link of the k-th port of ``inner[i]`` and
    ``outer_links[k]`` that of the k-th outer port.
    """

    inner: tuple[Pack, ...]
    outer: Pack
    links: tuple[Link, ...]
    inner_links: tuple[tuple[str, ...], ...]
    outer_links: tuple[str, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        links = tuple(sorted(self.links, key=lambda l: l.name))
        object.__setattr__(self, "links", links)
        names = [l.name for l in links]
        if len(set(names)) != len(names):
            raise InvalidDiagram(f"duplicate link names in {names}")
        index = {n: k for k, n in enumerate(names)}
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "inner", tuple(self.inner))
        object.__setattr__(
            self, "inner_links", tuple(tuple(m) for m in self.inner_links)
        )
        object.__setattr__(self, "outer_links", tuple(self.outer_links))

        if len(self.inner_links) != len(self.inner):
            raise InvalidDiagram("one link assignment per inner pack is required")
        hit = set()
        for i, (pack, assign) in enumerate(zip(self.inner, self.inner_links)):
            self._check_assignment(pack, assign, f"inner pack {i}")
            hit.update(assign)
        self._check_assignment(self.outer, self.outer_links, "outer pack")
        missing = set(names) - hit
        if missing:
            raise InvalidDiagram(
                f"links {sorted(missing)} are not attached to any inner port"
            )

    def _check_assignment(self, pack, assign, what):
        if len(assign) != len(pack.ports):
            raise InvalidDiagram(f"{what}: {len(assign)} links for {len(pack)} ports")
        for port, link in zip(pack.ports, assign):
            if link not in self._index:
                raise InvalidDiagram(f"{what}: port {port.name!r} -> unknown link {link!r}")
            if not port.same_grid(self.links[self._index[link]]):
                raise InvalidDiagram(
                    f"{what}: port {port.name!r} disagrees with link {link!r} "
                    "on bounds or resolution"
                )

    @property
    def link_names(self) -> tuple[str, ...]:
        return tuple(l.name for l in self.links)

    def link(self, name: str) -> Link:
        return self.links[self._index[name]]

    def link_axes(self, target) -> tuple[int, ...]:
        """Positions in the link entry that feed each port of ``target``."""
        assign = self.outer_links if target == OUTER else self.inner_links[target]
        return tuple(self._index[n] for n in assign)

    def pack(self, target) -> Pack:
        return self.outer if target == OUTER else self.inner[target]

    def links_of(self, target) -> frozenset[str]:
        assign = self.outer_links if target == OUTER else self.inner_links[target]
        return frozenset(assign)

    @property
    def link_pack(self) -> Pack:
        return Pack(self.links)


def build_wiring_diagram(
    relvars: Sequence[tuple[str, Iterable[str]]],
    varspecs: Mapping[str, tuple[float, float, int]],
    exposed: Iterable[str],
) -> WiringDiagram:
    """Wire one pack per relation together, sharing a link per variable name."""
    exposed = sorted(set(exposed))

    def port(name):
        if name not in varspecs:
            raise UnknownVariable(f"variable {name!r} has no range/resolution")
        lo, hi, r = varspecs[name]
        return Port(name, float(lo), float(hi), r)

    inner = []
    used = set()
    for _, names in relvars:
        names = sorted(set(names))
        used.update(names)
        inner.append(Pack(tuple(port(n) for n in names)))
    for name in exposed:
        if name not in varspecs:
            raise UnknownVariable(f"exposed variable {name!r} has no range/resolution")
        if name not in used:
            raise ExposedNotUsed(f"exposed variable {name!r} appears in no relation")
    outer = Pack(tuple(port(n) for n in exposed))
    links = tuple(port(n) for n in sorted(used))
    return WiringDiagram(
        inner=tuple(inner),
        outer=outer,
        links=links,
        inner_links=tuple(p.names for p in inner),
        outer_links=outer.names,
    )


def check_link_entry(wd: WiringDiagram, e: Sequence[int]) -> tuple[int, ...]:
    return wd.link_pack.check_entry(e)


def project_entry(wd: WiringDiagram, e: Sequence[int], target) -> tuple[int, ...]:
    """Read off the entry of inner pack ``target`` (or ``OUTER``) from a link entry."""
    e = check_link_entry(wd, e)
    if target != OUTER and not 0 <= target < len(wd.inner):
        raise IndexOutOfRange(f"no inner pack {target}")
    return tuple(e[k] for k in wd.link_axes(target))


def link_entry_count(wd: WiringDiagram) -> int:
    """Number of link entries, i.e. iterations of the unclustered multiplication."""
    return math.prod(l.resolution for l in wd.links)
