import numpy as np
import pytest

from pixelarray import fixtures
from pixelarray.cluster import enumerate_trees, flat_tree
from pixelarray.errors import CostOverflow, ExposedNotUsed, PackMismatch
from pixelarray.gam import PixelArray
from pixelarray.model import make_pack
from pixelarray.plot import sample_in_center_plot
from pixelarray.solver import (
    InputError,
    SystemSpec,
    compare,
    compile,
    default_threads,
    oracle_solve,
    solve,
)

TERMS = ["{v}", "{v}^2", "sin({v})", "cos(2*{v})", "abs({v})"]


def random_system(rng, max_rel=4, max_res=8):
    names = [f"x{k}" for k in range(int(rng.integers(2, 5)))]
    varspecs = {}
    for n in names:
        lo = float(rng.uniform(-2, 0))
        varspecs[n] = (lo, lo + float(rng.uniform(1, 3)), int(rng.integers(2, max_res + 1)))
    rels, used = {}, set()
    for k in range(int(rng.integers(1, max_rel + 1))):
        vs = rng.choice(names, size=int(rng.integers(1, min(3, len(names)) + 1)), replace=False)
        terms = [
            f"{rng.uniform(-2, 2):.3f}*" + TERMS[int(rng.integers(len(TERMS)))].format(v=v)
            for v in vs
        ]
        cmp = "=" if rng.random() < 0.7 else "<="
        rels[f"R{k}"] = " + ".join(terms) + f" {cmp} {rng.uniform(-1, 1):.3f}"
        used.update(vs)
    used = sorted(used)
    exposed = list(rng.choice(used, size=int(rng.integers(1, min(2, len(used)) + 1)), replace=False))
    return SystemSpec.from_strings(rels, {v: varspecs[v] for v in used}, exposed,
                                   default_tolerance=float(rng.uniform(0.1, 0.6)))


@pytest.fixture(scope="module")
def circle():
    return compile(fixtures.load("circle"))


def test_circle_solution_nonempty_and_equals_oracle(circle):
    sol = solve(circle)
    assert sol.array.pack.shape == (50, 50)
    assert sol.array.count_on() > 0
    assert compare(sol.array, oracle_solve(circle))[:2] == (0, 0)


def test_circle_diagram():
    wd = compile(fixtures.load("circle")).diagram
    assert [p.names for p in wd.inner] == [("w", "x"), ("w", "y")]
    assert wd.outer.names == ("x", "y")


def test_butterfly_diagram_shape():
    wd = compile(fixtures.load("butterfly")).diagram
    assert [p.names for p in wd.inner] == [("x", "z"), ("w", "y"), ("x", "y")]
    assert wd.outer.names == ("w", "z")
    assert wd.links[0].resolution == 125


def test_exemplar_diagram_shape():
    wd = compile(fixtures.load("exemplar")).diagram
    assert [len(p) for p in wd.inner] == [2, 3, 4]
    assert len(wd.outer) == 2
    assert len(wd.links) == 6


def test_identity_system_equals_plot():
    spec = SystemSpec.from_strings({"R": "x^2 - y = 0"}, {"x": (-1, 1, 9), "y": (0, 1, 7)},
                                   ["x", "y"], default_tolerance=0.1)
    problem = compile(spec)
    assert problem.diagram.outer == problem.diagram.inner[0]
    direct = sample_in_center_plot(problem.relations[0], problem.diagram.inner[0], 0.1)
    assert solve(problem).array == direct
    assert oracle_solve(problem) == direct


def test_empty_target_gives_all_zero():
    spec = SystemSpec.from_strings({"E": "x^2 + 1 = 0", "F": "x - y = 0"},
                                   {"x": (-1, 1, 10), "y": (-1, 1, 10)}, ["y"],
                                   default_tolerance=0.5)
    problem = compile(spec)
    assert solve(problem).array.count_on() == 0
    assert oracle_solve(problem).count_on() == 0


def test_compile_errors():
    with pytest.raises(InputError, match="no relations"):
        compile(SystemSpec([], {}, ["x"]))
    with pytest.raises(InputError, match="no exposed"):
        compile(SystemSpec.from_strings(["x = 0"], {"x": (0, 1, 2)}, []))
    with pytest.raises(InputError, match="duplicate"):
        spec = SystemSpec.from_strings(["x = 0"], {"x": (0, 1, 2)}, ["x"])
        compile(SystemSpec(spec.relations * 2, spec.varspecs, ["x"]))
    with pytest.raises(InputError, match="unknown relations"):
        compile(SystemSpec.from_strings(["x = 0"], {"x": (0, 1, 2)}, ["x"], {"Q": 0.1}))
    with pytest.raises(ExposedNotUsed):
        compile(SystemSpec.from_strings(["x = 0"], {"x": (0, 1, 2), "y": (0, 1, 2)}, ["y"]))


def test_per_relation_tolerance():
    spec = SystemSpec.from_strings({"A": "x = 0", "B": "x = 0"}, {"x": (-1, 1, 4)}, ["x"],
                                   tolerances={"B": 0.9}, default_tolerance=0.3)
    assert compile(spec).tolerances == (0.3, 0.9)


def test_budget_guard(circle):
    with pytest.raises(CostOverflow):
        solve(circle, "none", budget=1000)
    with pytest.raises(CostOverflow):
        oracle_solve(circle, budget=1000)


@pytest.mark.parametrize("seed", range(30))
def test_plan_independence(seed):
    rng = np.random.default_rng(seed)
    problem = compile(random_system(rng))
    arrays = [solve(problem, tree).array for tree in enumerate_trees(len(problem.relations))]
    assert all(a == arrays[0] for a in arrays)
    assert arrays[0] == oracle_solve(problem)


@pytest.mark.parametrize("seed", range(15))
def test_tolerance_monotonicity(seed):
    rng = np.random.default_rng(1000 + seed)
    spec = random_system(rng)
    small = solve(compile(spec)).array
    spec.default_tolerance *= 1.5
    big = solve(compile(spec)).array
    assert small <= big


def test_threads_do_not_change_result(circle, monkeypatch):
    one = solve(circle, threads=1).array
    four = solve(circle, threads=4).array
    assert one == four
    monkeypatch.setenv("PIXELARRAY_THREADS", "3")
    assert default_threads() == 3
    assert solve(circle).array == one
    monkeypatch.setenv("PIXELARRAY_THREADS", "many")
    with pytest.raises(InputError):
        default_threads()


def test_provenance(circle):
    sol = solve(circle, flat_tree(2))
    info = sol.provenance()
    assert info["exposed"] == ["x", "y"]
    assert info["naive_cost_exact"] == 50**3
    assert info["serial_cost"] == "r^3"
    assert info["stages"][0]["packs"] == ["M1", "M2"]
    assert set(info["timings"]) == {"plan", "plot", "multiply", "total"}


def test_oracle_subsamples_with_zero_tolerance_finds_exact_witnesses():
    # x - y = 0 on a shared grid: diagonal sub-grid points satisfy it exactly
    spec = SystemSpec.from_strings({"D": "x - y = 0"}, {"x": (0, 1, 4), "y": (0, 1, 4)},
                                   ["x", "y"])
    got = oracle_solve(compile(spec), subsamples=3, tolerances=0.0)
    assert np.array_equal(got.values, np.eye(4, dtype=bool))
    with pytest.raises(ValueError):
        oracle_solve(compile(spec), subsamples=0)


def test_compare_report():
    pack = make_pack([("a", 0, 1, 2), ("b", 0, 1, 2)])
    a = PixelArray(pack, np.array([[1, 0], [1, 0]]))
    b = PixelArray(pack, np.array([[1, 1], [0, 0]]))
    assert compare(a, a) == (0, 0, 2, 2)
    assert compare(a, b) == (1, 1, 1, 1)
    lower = PixelArray(pack, np.array([[1, 0], [0, 0]]))
    assert compare(lower, a).only_in_a == 0
    with pytest.raises(PackMismatch):
        compare(a, PixelArray.zeros(make_pack([("a", 0, 1, 2)])))


def test_threeeq_region_is_solid():
    sol = solve(compile(fixtures.load("threeeq")))
    v = sol.array.values
    assert v.shape == (75, 75)
    # a 2-D on-region: some pixel has all four neighbours on
    inner = v[1:-1, 1:-1] & v[:-2, 1:-1] & v[2:, 1:-1] & v[1:-1, :-2] & v[1:-1, 2:]
    assert inner.any()
