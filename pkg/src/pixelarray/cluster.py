"""Cluster trees: factorizing a wiring diagram into a sequence of smaller products.

A cluster ``C`` (a set of inner-pack indices) splits the links into those
touched by ``C`` and those touched by everything else (including the outer
pack). Their intersection is the intermediate pack ``Q_C`` that the interior
product hands to the exterior one. Inner packs are indexed from 0.
"""
from __future__ import annotations

import functools
import itertools
import math
import statistics
import time
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

from .errors import CostOverflow, EmptyCluster, FullCluster, InvalidTree, TooManyPacks
from .gam import PixelArray, general_multiply
from .model import OUTER, Pack, Port, WiringDiagram, link_entry_count

EXHAUSTIVE_MAX_PACKS = 8
AUTO_EXHAUSTIVE_PACKS = 6


# ---------------------------------------------------------------------------
# cost polynomials


@functools.total_ordering
class CostPoly:
    """Polynomial in one variable ``r`` with natural coefficients.

    Ordered as N[r]: the higher degree wins, then coefficients are compared
    from the top down, so ``r^2 < r^2 + r < 2r^2 < r^3``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[int] = ()):
        coeffs = [int(c) for c in coeffs]
        if any(c < 0 for c in coeffs):
            raise ValueError("coefficients must be natural numbers")
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @classmethod
    def monomial(cls, degree: int, coeff: int = 1) -> "CostPoly":
        return cls([0] * degree + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, r: int) -> int:
        return sum(c * r**k for k, c in enumerate(self.coeffs))

    def __add__(self, other: "CostPoly") -> "CostPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return CostPoly([x + y for x, y in zip(a, b)])

    def _key(self):
        return (len(self.coeffs), self.coeffs[::-1])

    def __eq__(self, other):
        if not isinstance(other, CostPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __lt__(self, other):
        return self._key() < other._key()

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"CostPoly({str(self)!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("r" if k == 1 else f"r^{k}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(terms)


ZERO = CostPoly()


# ---------------------------------------------------------------------------
# trees


@dataclass(frozen=True)
class Leaf:
    index: int


@dataclass(frozen=True)
class Node:
    children: tuple["ClusterTree", ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


ClusterTree = Union[Leaf, Node]


def leaves(tree: ClusterTree) -> frozenset[int]:
    if isinstance(tree, Leaf):
        return frozenset([tree.index])
    return frozenset().union(*(leaves(c) for c in tree.children))


def flat_tree(n: int) -> ClusterTree:
    """The unclustered plan: every pack multiplied in one step."""
    return Leaf(0) if n == 1 else Node(tuple(Leaf(i) for i in range(n)))


def _root_node(tree: ClusterTree) -> Node:
    return Node((tree,)) if isinstance(tree, Leaf) else tree


def validate_tree(wd: WiringDiagram, tree: ClusterTree) -> None:
    n = len(wd.inner)
    seen = []

    def walk(t, root):
        if isinstance(t, Leaf):
            seen.append(t.index)
            return
        if not t.children:
            raise InvalidTree("node without children")
        if len(t.children) < 2 and not root:
            raise InvalidTree("inner nodes need at least two children")
        for c in t.children:
            walk(c, False)

    walk(_root_node(tree), True)
    if sorted(seen) != list(range(n)):
        raise InvalidTree(f"leaves {sorted(seen)} are not a permutation of 0..{n - 1}")


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1 :]


def _proper_partitions(items):
    for part in _set_partitions(list(items)):
        if len(part) >= 2:
            yield sorted((sorted(b) for b in part), key=lambda b: b[0])


def enumerate_trees(n: int) -> Iterator[ClusterTree]:
    """Every cluster tree over ``n`` inner packs."""
    if n == 1:
        yield Leaf(0)
        return

    def trees(block):
        if len(block) == 1:
            yield Leaf(block[0])
            return
        for part in _proper_partitions(block):
            for kids in itertools.product(*(list(trees(b)) for b in part)):
                yield Node(tuple(kids))

    yield from trees(list(range(n)))


# ---------------------------------------------------------------------------
# factorization


@dataclass(frozen=True)
class Factorization:
    interior: WiringDiagram
    exterior: WiringDiagram
    intermediate: Pack
    properly_internal: frozenset[str]
    properly_external: frozenset[str]

    @property
    def trivial(self) -> bool:
        return not self.properly_internal or not self.properly_external


def _links_pack(wd: WiringDiagram, names) -> Pack:
    return Pack(tuple(wd.link(n) for n in sorted(names)))


def _interior_exterior(wd: WiringDiagram, cluster: frozenset[int]):
    inner = frozenset().union(*(wd.links_of(i) for i in cluster))
    outer = wd.links_of(OUTER).union(
        *(wd.links_of(j) for j in range(len(wd.inner)) if j not in cluster)
    )
    return inner, outer


def intermediate_pack(wd: WiringDiagram, cluster) -> Pack:
    inner, outer = _interior_exterior(wd, frozenset(cluster))
    return _links_pack(wd, inner & outer)


def factorize(wd: WiringDiagram, cluster) -> Factorization:
    """Split ``wd`` at ``cluster`` into an interior and an exterior diagram."""
    cluster = frozenset(cluster)
    n = len(wd.inner)
    if not cluster:
        raise EmptyCluster("a cluster needs at least one pack")
    if not cluster <= set(range(n)):
        raise ValueError(f"cluster {sorted(cluster)} names packs outside 0..{n - 1}")
    if len(cluster) == n:
        raise FullCluster("a cluster containing every pack does not factorize")
    inner_l, outer_l = _interior_exterior(wd, cluster)
    q_names = inner_l & outer_l
    q = _links_pack(wd, q_names)
    members = sorted(cluster)
    rest = [j for j in range(n) if j not in cluster]
    interior = WiringDiagram(
        inner=tuple(wd.inner[i] for i in members),
        outer=q,
        links=tuple(wd.link(l) for l in inner_l),
        inner_links=tuple(wd.inner_links[i] for i in members),
        outer_links=q.names,
    )
    exterior = WiringDiagram(
        inner=(q,) + tuple(wd.inner[j] for j in rest),
        outer=wd.outer,
        links=tuple(wd.link(l) for l in outer_l),
        inner_links=(q.names,) + tuple(wd.inner_links[j] for j in rest),
        outer_links=wd.outer_links,
    )
    return Factorization(interior, exterior, q, inner_l - q_names, outer_l - q_names)


def is_trivial(fact: Factorization) -> bool:
    return fact.trivial


def step_diagram(wd: WiringDiagram, node: Node, root: bool) -> WiringDiagram:
    """The diagram contracted at ``node``: children's outputs into Q (or P' at the root)."""
    inner, assign = [], []
    for child in node.children:
        if isinstance(child, Leaf):
            inner.append(wd.inner[child.index])
            assign.append(wd.inner_links[child.index])
        else:
            q = intermediate_pack(wd, leaves(child))
            inner.append(q)
            assign.append(q.names)
    if root:
        outer, outer_assign = wd.outer, wd.outer_links
    else:
        outer = intermediate_pack(wd, leaves(node))
        outer_assign = outer.names
    names = set().union(*assign) if assign else set()
    return WiringDiagram(
        inner=tuple(inner),
        outer=outer,
        links=tuple(wd.link(l) for l in names),
        inner_links=tuple(assign),
        outer_links=outer_assign,
    )


# ---------------------------------------------------------------------------
# costs


def constant_resolution(wd: WiringDiagram) -> int | None:
    rs = {l.resolution for l in wd.links}
    return rs.pop() if len(rs) == 1 else None


def naive_cost(wd: WiringDiagram) -> CostPoly:
    """``r^#links``: the unclustered cost at constant resolution."""
    return CostPoly.monomial(len(wd.links))


def naive_cost_exact(wd: WiringDiagram) -> int:
    return link_entry_count(wd)


@dataclass(frozen=True)
class TreeCost:
    serial: CostPoly
    parallel: CostPoly
    serial_exact: int
    parallel_exact: int

    def __iter__(self):
        return iter((self.serial, self.parallel))


def tree_cost(wd: WiringDiagram, tree: ClusterTree) -> TreeCost:
    """Serial (sum over nodes) and parallel (node + worst child) cost of a tree.

    The polynomials count links per node; the exact integers use the actual
    resolutions, which matters when they are not all equal.
    """
    validate_tree(wd, tree)

    def walk(t, root):
        if isinstance(t, Leaf):
            return ZERO, ZERO, 0, 0
        step = step_diagram(wd, t, root)
        poly, exact = naive_cost(step), naive_cost_exact(step)
        kids = [walk(c, False) for c in t.children]
        serial = poly
        for k in kids:
            serial = serial + k[0]
        parallel = poly + max((k[1] for k in kids), default=ZERO)
        return (
            serial,
            parallel,
            exact + sum(k[2] for k in kids),
            exact + max((k[3] for k in kids), default=0),
        )

    s, p, se, pe = walk(_root_node(tree), True)
    return TreeCost(s, p, se, pe)


# ---------------------------------------------------------------------------
# planning


class _Costs:
    """Per-subset link bookkeeping shared by the planners."""

    def __init__(self, wd: WiringDiagram):
        self.wd = wd
        self.n = len(wd.inner)
        self.pack_links = [wd.links_of(i) for i in range(self.n)]
        self.outer = wd.links_of(OUTER)
        self.res = {l.name: l.resolution for l in wd.links}
        self.constant = constant_resolution(wd) is not None

    @functools.lru_cache(maxsize=None)
    def q(self, cluster: frozenset[int]) -> frozenset[str]:
        if len(cluster) == self.n:
            return self.outer
        inner, outer = _interior_exterior(self.wd, cluster)
        return inner & outer

    def output_links(self, block: frozenset[int]) -> frozenset[str]:
        if len(block) == 1:
            (i,) = block
            return self.pack_links[i]
        return self.q(block)

    def key(self, names) -> tuple:
        poly = CostPoly.monomial(len(names))
        exact = math.prod(self.res[n] for n in names)
        return (poly, exact) if self.constant else (exact, poly)


def _add_keys(a, b):
    return (a[0] + b[0], a[1] + b[1])


def plan_exhaustive(wd: WiringDiagram) -> ClusterTree:
    """Cheapest tree by serial cost, searching every recursive partition.

    Serial cost is additive over subtrees, and the cost of a subtree over a
    pack subset does not depend on the rest of the tree, so the search is
    memoised per subset.
    """
    n = len(wd.inner)
    if n > EXHAUSTIVE_MAX_PACKS:
        raise TooManyPacks(f"exhaustive planning supports at most {EXHAUSTIVE_MAX_PACKS} packs, got {n}")
    if n == 1:
        return Leaf(0)
    costs = _Costs(wd)
    zero_key = (ZERO, 0) if costs.constant else (0, ZERO)

    @functools.lru_cache(maxsize=None)
    def best(block: frozenset[int]):
        if len(block) == 1:
            (i,) = block
            return zero_key, Leaf(i)
        found = None
        for part in _proper_partitions(sorted(block)):
            blocks = [frozenset(b) for b in part]
            names = frozenset().union(*(costs.output_links(b) for b in blocks))
            total = costs.key(names)
            kids = []
            for b in blocks:
                k, t = best(b)
                total = _add_keys(total, k)
                kids.append(t)
            if found is None or total < found[0]:
                found = (total, Node(tuple(kids)))
        return found

    return best(frozenset(range(n)))[1]


def _saving(res, q, l_in, l_out) -> int:
    rq = math.prod(res[x] for x in q)
    ri = math.prod(res[x] for x in l_in)
    ro = math.prod(res[x] for x in l_out)
    return rq * (ri * ro - ri - ro)


def plan_greedy(wd: WiringDiagram) -> ClusterTree:
    """Merge pairs while some pair is a nontrivial cluster, biggest saving first.

    Ties go to the lexicographically smallest cluster (sorted leaf indices).
    """
    n = len(wd.inner)
    if n == 1:
        return Leaf(0)
    costs = _Costs(wd)
    items = [(Leaf(i), frozenset([i]), costs.pack_links[i]) for i in range(n)]
    while len(items) > 2:
        best = None
        for a, b in itertools.combinations(range(len(items)), 2):
            inner = items[a][2] | items[b][2]
            outer = costs.outer.union(
                *(items[k][2] for k in range(len(items)) if k not in (a, b))
            )
            q = inner & outer
            l_in, l_out = inner - q, outer - q
            if not l_in or not l_out:
                continue
            saving = _saving(costs.res, q, l_in, l_out)
            cluster = tuple(sorted(items[a][1] | items[b][1]))
            cand = (-saving, cluster, a, b, q)
            if best is None or cand[:2] < best[:2]:
                best = cand
        if best is None:
            break
        _, _, a, b, q = best
        pair = sorted([items[a], items[b]], key=lambda it: min(it[1]))
        merged = (Node(tuple(it[0] for it in pair)), items[a][1] | items[b][1], q)
        items = [it for k, it in enumerate(items) if k not in (a, b)] + [merged]
        items.sort(key=lambda it: min(it[1]))
    return Node(tuple(it[0] for it in items))


def plan(wd: WiringDiagram, strategy: str = "auto") -> ClusterTree:
    """``exhaustive``, ``greedy``, ``none`` (unclustered) or ``auto``."""
    n = len(wd.inner)
    if strategy == "auto":
        strategy = "exhaustive" if n <= AUTO_EXHAUSTIVE_PACKS else "greedy"
    if strategy == "exhaustive":
        return plan_exhaustive(wd)
    if strategy == "greedy":
        return plan_greedy(wd)
    if strategy == "none":
        return flat_tree(n)
    raise ValueError(f"unknown strategy {strategy!r}")


# ---------------------------------------------------------------------------
# execution


@dataclass
class Stage:
    packs: tuple[int, ...]
    links: tuple[str, ...]
    iterations: int
    seconds: float


def execute_tree(
    wd: WiringDiagram,
    tree: ClusterTree,
    arrays: Sequence[PixelArray],
    budget: int | None = None,
) -> tuple[PixelArray, list[Stage]]:
    """Contract ``arrays`` bottom-up along ``tree``; returns the result and per-step stats."""
    validate_tree(wd, tree)
    stages: list[Stage] = []
    root = _root_node(tree)
    steps = []

    def collect(t, is_root):
        if isinstance(t, Leaf):
            return
        for c in t.children:
            collect(c, False)
        steps.append((t, step_diagram(wd, t, is_root)))

    collect(root, True)
    if budget is not None:
        for node, d in steps:
            cost = link_entry_count(d)
            if cost > budget:
                raise CostOverflow(cost, budget, f"step over packs {sorted(leaves(node))}")

    def run(t):
        if isinstance(t, Leaf):
            return arrays[t.index]
        inputs = [run(c) for c in t.children]
        d = diagrams[t]
        start = time.perf_counter()
        out = general_multiply(d, inputs)
        stages.append(
            Stage(
                tuple(sorted(leaves(t))),
                d.link_names,
                link_entry_count(d),
                time.perf_counter() - start,
            )
        )
        return out

    diagrams = {node: d for node, d in steps}
    return run(root), stages


def tree_to_json(wd: WiringDiagram, tree: ClusterTree, names: Sequence[str] | None = None):
    """Nested dicts: leaves as ``{"leaf": i}``, nodes with their links and costs."""
    validate_tree(wd, tree)

    def walk(t, root):
        if isinstance(t, Leaf):
            out = {"leaf": t.index}
            if names is not None:
                out["relation"] = names[t.index]
            return out
        d = step_diagram(wd, t, root)
        return {
            "children": [walk(c, False) for c in t.children],
            "links": list(d.link_names),
            "cost": str(naive_cost(d)),
            "cost_exact": naive_cost_exact(d),
        }

    return walk(_root_node(tree), True)


def tree_from_json(obj) -> ClusterTree:
    """Inverse of :func:`tree_to_json`; also accepts bare ints and nested lists."""
    if isinstance(obj, bool):
        raise InvalidTree("booleans are not leaf indices")
    if isinstance(obj, int):
        return Leaf(obj)
    if isinstance(obj, list):
        return Node(tuple(tree_from_json(c) for c in obj))
    if isinstance(obj, dict):
        if "leaf" in obj:
            return tree_from_json(obj["leaf"])
        if "children" in obj:
            return tree_from_json(list(obj["children"]))
    raise InvalidTree(f"cannot read a cluster tree from {obj!r}")


def tree_text(tree: ClusterTree, names: Sequence[str] | None = None) -> str:
    if isinstance(tree, Leaf):
        return names[tree.index] if names is not None else str(tree.index)
    return "{" + ",".join(tree_text(c, names) for c in tree.children) + "}"


# ---------------------------------------------------------------------------
# random-diagram study


def random_diagram(rng: np.random.Generator, n: int, r: int = 10) -> WiringDiagram:
    """Random diagram: 2-4 ports per pack, each port reusing an existing link
    with probability 1/2 (never twice in one pack), and 0-2 outer ports."""
    links: list[str] = []
    assigns = []
    for _ in range(n):
        mine: list[str] = []
        for _ in range(int(rng.integers(2, 5))):
            free = [l for l in links if l not in mine]
            if free and rng.random() < 0.5:
                mine.append(free[int(rng.integers(len(free)))])
            else:
                links.append(f"l{len(links):02d}")
                mine.append(links[-1])
        assigns.append(tuple(sorted(mine)))
    k = min(int(rng.integers(0, 3)), len(links))
    outer = tuple(sorted(rng.choice(links, size=k, replace=False).tolist())) if k else ()

    def pack(names):
        return Pack(tuple(Port(x, 0.0, 1.0, r) for x in names))

    return WiringDiagram(
        inner=tuple(pack(a) for a in assigns),
        outer=pack(outer),
        links=tuple(Port(x, 0.0, 1.0, r) for x in links),
        inner_links=tuple(assigns),
        outer_links=outer,
    )


@dataclass(frozen=True)
class StudyRow:
    packs: int
    trials: int
    mean_ratio: float
    median_ratio: float


def best_ratio(wd: WiringDiagram) -> float:
    """Cheapest serial cost among the applicable planners, over the naive cost."""
    trees = [plan_greedy(wd)]
    if len(wd.inner) <= AUTO_EXHAUSTIVE_PACKS:
        trees.append(plan_exhaustive(wd))
    best = min(tree_cost(wd, t).serial_exact for t in trees)
    return best / naive_cost_exact(wd)


def clustering_study(trials: int = 1000, max_packs: int = 9, seed: int = 0, r: int = 10):
    """Mean and median clustered/naive cost ratio per pack count.

    Trials are spread evenly over ``1..max_packs`` inner packs.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    ratios: dict[int, list[float]] = {n: [] for n in range(1, max_packs + 1)}
    for t in range(trials):
        n = 1 + t % max_packs
        ratios[n].append(best_ratio(random_diagram(rng, n, r)))
    return [
        StudyRow(n, len(v), statistics.fmean(v), statistics.median(v))
        for n, v in ratios.items()
        if v
    ]
