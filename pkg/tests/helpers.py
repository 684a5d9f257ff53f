"""Shared builders for the test suite."""

from pixelarray.gam import BOOL, PixelArray
from pixelarray.model import Pack, Port, WiringDiagram


def diagram(packs, outer, res=10, lo=0.0, hi=1.0):
    """Diagram from link-name sets; ``res`` is an int or a dict per link."""
    packs = [tuple(sorted(p)) for p in packs]
    outer = tuple(sorted(outer))
    names = sorted(set().union(*packs))

    def port(n):
        r = res[n] if isinstance(res, dict) else res
        return Port(n, lo, hi, r)

    return WiringDiagram(
        inner=tuple(Pack(tuple(port(n) for n in p)) for p in packs),
        outer=Pack(tuple(port(n) for n in outer)),
        links=tuple(port(n) for n in names),
        inner_links=packs,
        outer_links=outer,
    )


CHAIN = (["mn", "np", "pq"], "mq")  # single-letter links m, n, p, q

# Seven packs A..G; outer ports a, b, e. See test_cluster for the costs.
SEVEN = (
    [
        {"a", "h"},
        {"b", "h"},
        {"h", "cd1", "cd2"},
        {"cd1", "cd2", "dg"},
        {"ef1", "ef2", "e"},
        {"ef1", "ef2", "gf"},
        {"dg", "gf"},
    ],
    {"a", "b", "e"},
)


def chain(r=10):
    packs, outer = CHAIN
    return diagram([set(p) for p in packs], set(outer), r)


def seven(r=10):
    return diagram(*SEVEN, res=r)


def random_wd(rng, max_packs=4, max_res=5, max_links=5, max_ports=3):
    """Random small diagram with mixed resolutions on [0, 1)."""
    nlinks = int(rng.integers(1, max_links + 1))
    names = [f"v{k}" for k in range(nlinks)]
    res = {n: int(rng.integers(2, max_res + 1)) for n in names}
    npacks = int(rng.integers(1, max_packs + 1))
    packs = []
    for _ in range(npacks):
        k = int(rng.integers(1, min(max_ports, nlinks) + 1))
        packs.append(set(rng.choice(names, size=k, replace=False).tolist()))
    for n in names:
        if not any(n in p for p in packs):
            packs[int(rng.integers(npacks))].add(n)
    k = int(rng.integers(0, min(3, nlinks) + 1))
    outer = set(rng.choice(names, size=k, replace=False).tolist()) if k else set()
    return diagram(packs, outer, res)


def random_bool(rng, pack, p=0.5):
    return PixelArray(pack, rng.random(pack.shape) < p, BOOL)


def random_arrays(rng, wd, p=0.5):
    return [random_bool(rng, pack, p) for pack in wd.inner]
