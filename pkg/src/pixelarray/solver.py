"""End-to-end solving: plot each relation, then contract the plots along a cluster tree.

``oracle_solve`` is an independent check. It never builds per-relation
arrays: it walks the link entries directly and tests every relation at the
same joint point, which is the product-relation view of the system.
"""
from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from . import cluster as cl
from .errors import CostOverflow, PackMismatch, PixelArrayError
from .expr import Relation, distance_array, evaluate_array, parse_relation
from .gam import BOOL, PixelArray
from .model import OUTER, WiringDiagram, build_wiring_diagram, link_entry_count
from .plot import DEFAULT_TOLERANCE, sample_in_center_plot

DEFAULT_BUDGET = 10**9
ORACLE_BLOCK = 1 << 18


class InputError(PixelArrayError):
    pass


@dataclass
class SystemSpec:
    relations: list[Relation]
    varspecs: dict[str, tuple[float, float, int]]
    exposed: list[str]
    tolerances: dict[str, float] = field(default_factory=dict)
    default_tolerance: float = DEFAULT_TOLERANCE

    @classmethod
    def from_strings(cls, relations: Mapping[str, str] | Sequence[str], varspecs, exposed,
                     tolerances=None, default_tolerance=DEFAULT_TOLERANCE):
        if not isinstance(relations, Mapping):
            relations = {f"R{k + 1}": text for k, text in enumerate(relations)}
        rels = [parse_relation(rid, text) for rid, text in relations.items()]
        return cls(rels, dict(varspecs), list(exposed), dict(tolerances or {}), default_tolerance)

    def tolerance(self, rel_id: str) -> float:
        return self.tolerances.get(rel_id, self.default_tolerance)


@dataclass(frozen=True)
class CompiledProblem:
    diagram: WiringDiagram
    relations: tuple[Relation, ...]
    tolerances: tuple[float, ...]

    @property
    def relation_ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.relations)


def compile(spec: SystemSpec) -> CompiledProblem:
    if not spec.relations:
        raise InputError("no relations")
    ids = [r.id for r in spec.relations]
    if len(set(ids)) != len(ids):
        raise InputError(f"duplicate relation ids in {ids}")
    if not spec.exposed:
        raise InputError("no exposed variables")
    unknown = set(spec.tolerances) - set(ids)
    if unknown:
        raise InputError(f"tolerance given for unknown relations {sorted(unknown)}")
    tols = tuple(float(spec.tolerance(r.id)) for r in spec.relations)
    for rid, t in zip(ids, tols):
        if not t > 0:
            raise InputError(f"tolerance for {rid!r} must be positive, got {t}")
    wd = build_wiring_diagram(
        [(r.id, r.variables) for r in spec.relations], spec.varspecs, spec.exposed
    )
    return CompiledProblem(wd, tuple(spec.relations), tols)


@dataclass
class Solution:
    array: PixelArray
    plan: cl.ClusterTree
    stages: list[cl.Stage]
    timings: dict[str, float]
    problem: CompiledProblem

    def provenance(self) -> dict:
        wd = self.problem.diagram
        cost = cl.tree_cost(wd, self.plan)
        return {
            "exposed": list(wd.outer.names),
            "on_pixels": self.array.count_on(),
            "plan": cl.tree_to_json(wd, self.plan, self.problem.relation_ids),
            "serial_cost": str(cost.serial),
            "serial_cost_exact": cost.serial_exact,
            "naive_cost_exact": link_entry_count(wd),
            "stages": [
                {
                    "packs": [self.problem.relation_ids[i] for i in s.packs],
                    "links": list(s.links),
                    "iterations": s.iterations,
                    "seconds": s.seconds,
                }
                for s in self.stages
            ],
            "timings": dict(self.timings),
        }


def default_threads() -> int:
    env = os.environ.get("PIXELARRAY_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"PIXELARRAY_THREADS must be an integer, got {env!r}") from None
    return 1


def plot_all(problem: CompiledProblem, threads: int | None = None) -> list[PixelArray]:
    """Sample-in-center plot of every relation on its own pack."""
    wd = problem.diagram
    jobs = list(zip(problem.relations, wd.inner, problem.tolerances))
    threads = threads or default_threads()
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda j: sample_in_center_plot(*j), jobs))
    return [sample_in_center_plot(*j) for j in jobs]


def resolve_plan(wd: WiringDiagram, plan) -> cl.ClusterTree:
    if plan is None:
        plan = "none"
    if isinstance(plan, str):
        return cl.plan(wd, plan)
    cl.validate_tree(wd, plan)
    return plan


def solve(problem: CompiledProblem, plan="auto", budget: int | None = DEFAULT_BUDGET,
          threads: int | None = None) -> Solution:
    wd = problem.diagram
    t0 = time.perf_counter()
    tree = resolve_plan(wd, plan)
    t1 = time.perf_counter()
    if budget is not None:
        for rel, pack in zip(problem.relations, wd.inner):
            if pack.entry_count > budget:
                raise CostOverflow(pack.entry_count, budget, f"plot of {rel.id!r}")
    plots = plot_all(problem, threads)
    t2 = time.perf_counter()
    array, stages = cl.execute_tree(wd, tree, plots, budget)
    t3 = time.perf_counter()
    timings = {"plan": t1 - t0, "plot": t2 - t1, "multiply": t3 - t2, "total": t3 - t0}
    return Solution(array, tree, stages, timings, problem)


def oracle_solve(problem: CompiledProblem, subsamples: int = 1,
                 tolerances: Sequence[float] | float | None = None,
                 budget: int | None = DEFAULT_BUDGET) -> PixelArray:
    """Straight walk over every link entry.

    With ``subsamples == 1`` an outer pixel turns on when some link entry
    above it has every relation within tolerance at the link pixel's center.
    With ``subsamples = s > 1`` each link pixel is probed on a joint
    ``s``-per-axis sub-grid instead, and every relation must hold at one
    common probe point. ``tolerances`` overrides the problem's (e.g. 0 to
    look for exact witnesses).
    """
    if subsamples < 1:
        raise ValueError("subsamples must be >= 1")
    wd = problem.diagram
    if tolerances is None:
        tols = problem.tolerances
    elif np.isscalar(tolerances):
        tols = (float(tolerances),) * len(problem.relations)
    else:
        tols = tuple(tolerances)
    nlinks = len(wd.links)
    probes = subsamples**nlinks
    total = link_entry_count(wd)
    if budget is not None and total * probes > budget:
        raise CostOverflow(total * probes, budget, "oracle")

    link_shape = tuple(l.resolution for l in wd.links)
    rel_axes = [tuple(wd.link_names.index(v) for v in r.variables) for r in problem.relations]
    outer_axes = wd.link_axes(OUTER)
    out = np.zeros(wd.outer.entry_count, dtype=bool)
    offsets = list(itertools.product(range(subsamples), repeat=nlinks))

    for start in range(0, total, ORACLE_BLOCK):
        flat = np.arange(start, min(start + ORACLE_BLOCK, total))
        coords = np.unravel_index(flat, link_shape) if nlinks else ()
        hit = np.zeros(flat.shape, dtype=bool)
        for off in offsets:
            if subsamples == 1:
                pts = [l.lower + (c + 0.5) * l.step for l, c in zip(wd.links, coords)]
            else:
                pts = [
                    l.lower + l.step * c + l.step * (k + 0.5) / subsamples
                    for l, c, k in zip(wd.links, coords, off)
                ]
            ok = np.ones(flat.shape, dtype=bool)
            for rel, axes, tol in zip(problem.relations, rel_axes, tols):
                env = {v: pts[a] for v, a in zip(rel.variables, axes)}
                dist = distance_array(evaluate_array(rel.lhs, env), rel.target)
                ok &= np.broadcast_to(dist <= tol, flat.shape)
                if not ok.any():
                    break
            hit |= ok
        if hit.any():
            if outer_axes:
                idx = np.ravel_multi_index(
                    tuple(coords[a][hit] for a in outer_axes), wd.outer.shape
                )
                out[idx] = True
            else:
                out[0] = True
    return PixelArray(wd.outer, out.reshape(wd.outer.shape), BOOL)


class CompareReport(NamedTuple):
    only_in_a: int
    only_in_b: int
    both: int
    neither: int


def compare(a: PixelArray, b: PixelArray) -> CompareReport:
    if a.pack != b.pack:
        raise PackMismatch(f"packs differ: {a.pack.names} vs {b.pack.names}")
    x = a.values.astype(bool)
    y = b.values.astype(bool)
    return CompareReport(
        int(np.count_nonzero(x & ~y)),
        int(np.count_nonzero(~x & y)),
        int(np.count_nonzero(x & y)),
        int(np.count_nonzero(~x & ~y)),
    )

