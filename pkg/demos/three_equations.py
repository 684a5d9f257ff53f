"""Three equations in five variables, projected onto (w, y).

Two of the ranges differ from the rest, so the links carry two different
pixel sizes. Tightening the tolerance can only remove pixels, which we
check on the way.
"""
from pixelarray import fixtures
from pixelarray.render import render_ascii
from pixelarray.solver import compile, solve

spec = fixtures.load("threeeq")
counts = {}
for eps in (0.02, 0.05, 0.1):
    spec.default_tolerance = eps
    counts[eps] = solve(compile(spec)).array
    print(f"eps={eps}: {counts[eps].count_on()} pixels on")

assert counts[0.02] <= counts[0.05] <= counts[0.1]
print()
print(render_ascii(counts[0.05]))
