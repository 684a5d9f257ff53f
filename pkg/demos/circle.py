"""Unit circle from two parabolas.

The system  w = x^2,  w = 1 - y^2  has solutions exactly on x^2 + y^2 = 1
once w is eliminated. We plot each relation on a 50-pixel grid, contract
over w, and print the result next to the brute-force oracle.
"""
import time

from pixelarray import fixtures
from pixelarray.render import render_ascii
from pixelarray.solver import compare, compile, oracle_solve, solve

problem = compile(fixtures.load("circle"))

t = time.perf_counter()
sol = solve(problem)
print(f"solve: {sol.array.count_on()} pixels on in {time.perf_counter() - t:.4f} s")

t = time.perf_counter()
ref = oracle_solve(problem)
print(f"oracle: {ref.count_on()} pixels on in {time.perf_counter() - t:.4f} s")
print("disagreements:", compare(sol.array, ref)[:2])
print()
print(render_ascii(sol.array))
