"""A four-variable system with a butterfly-shaped projection.

Three transcendental equations in w, x, y, z are projected onto (w, z).
The clusterer picks the contraction order; the provenance shows which
links each stage summed over and how long it took.
"""
from pixelarray import fixtures
from pixelarray.render import render_ascii
from pixelarray.solver import compile, solve

problem = compile(fixtures.load("butterfly"))
sol = solve(problem)
info = sol.provenance()

print("plan serial cost:", info["serial_cost"], f"({info['serial_cost_exact']} link entries)")
print("unclustered cost:", info["naive_cost_exact"])
for stage in info["stages"]:
    print(f"  stage {stage['packs']} over {stage['links']}: {stage['seconds']:.4f} s")
print(f"{sol.array.count_on()} pixels on, {sol.timings['total']:.3f} s total\n")

# 125 columns is wide; skip empty rows and show every other one
rows = [r for r in render_ascii(sol.array).splitlines() if "#" in r]
print("\n".join(rows[::2]))
