"""Matrix product, trace and Kronecker product as wiring diagrams.

Each is one generalized array multiplication. With counting values the
results agree with numpy's integer versions; with booleans they agree
after thresholding.
"""
import numpy as np

from pixelarray.gam import BOOL, COUNT, PixelArray, general_multiply, specialization_diagram

rng = np.random.default_rng(3)

wd = specialization_diagram("matmul", 4, 5, 3)
A = rng.integers(0, 3, (4, 5))
B = rng.integers(0, 3, (5, 3))
C = general_multiply(wd, [PixelArray(wd.inner[0], A, COUNT), PixelArray(wd.inner[1], B, COUNT)])
print("matmul matches numpy:", np.array_equal(C.values, A @ B))

Cb = general_multiply(wd, [PixelArray(wd.inner[0], A > 0), PixelArray(wd.inner[1], B > 0)])
print("boolean matmul matches:", np.array_equal(Cb.values, (A > 0).astype(int) @ (B > 0) > 0))

wd = specialization_diagram("trace", 6)
M = rng.integers(0, 4, (6, 6))
tr = general_multiply(wd, [PixelArray(wd.inner[0], M, COUNT)])
print("trace:", tr.values.item(), "numpy:", np.trace(M))

wd = specialization_diagram("kronecker", 2, 3, 3, 2)
X = rng.integers(0, 2, (2, 3))
Y = rng.integers(0, 2, (3, 2))
K = general_multiply(wd, [PixelArray(wd.inner[0], X, BOOL), PixelArray(wd.inner[1], Y, BOOL)])
print("kronecker matches:", np.array_equal(K.values.reshape(6, 6), np.kron(X, Y) > 0))
