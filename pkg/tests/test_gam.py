import itertools

import numpy as np
import pytest

from helpers import chain, random_arrays, random_wd
from pixelarray.errors import IndexOutOfRange, PackMismatch, SemiringMismatch
from pixelarray.gam import (
    BOOL,
    COUNT,
    COUNT_MAX,
    PixelArray,
    general_multiply,
    loop_multiply,
    specialization_diagram,
)
from pixelarray.model import make_pack


def bool_matmul(M, N):
    """Triple loop, written independently of numpy's matmul."""
    m, n = M.shape
    p = N.shape[1]
    out = np.zeros((m, p), dtype=bool)
    for i in range(m):
        for k in range(p):
            out[i, k] = any(M[i, j] and N[j, k] for j in range(n))
    return out


def bool_kron(A, B):
    m1, n1 = A.shape
    m2, n2 = B.shape
    out = np.zeros((m1, m2, n1, n2), dtype=bool)
    for i, k, j, l in itertools.product(range(m1), range(m2), range(n1), range(n2)):
        out[i, k, j, l] = A[i, j] and B[k, l]
    return out


def test_zero_dim_array():
    A = PixelArray(make_pack([]), np.array(True))
    assert A.get(()) is True
    assert A.pack.entry_count == 1


def test_offsets_are_row_major_one_based():
    A = PixelArray.zeros(make_pack([("a", 0, 1, 2), ("b", 0, 1, 3)]))
    assert A.offset((2, 1)) == 3
    assert A.offset((1, 1)) == 0
    assert A.offset((2, 3)) == 5
    with pytest.raises(IndexOutOfRange):
        A.offset((3, 1))


def test_set_get_round_trip():
    A = PixelArray.zeros(make_pack([("a", 0, 1, 2), ("b", 0, 1, 3)]), COUNT)
    A.set((2, 2), 7)
    assert A.get((2, 2)) == 7
    assert A.values[1, 1] == 7
    B = PixelArray.zeros(A.pack)
    B.set((1, 3), 1)
    assert B.get((1, 3)) is True
    with pytest.raises(ValueError):
        B.set((1, 1), 2)


def test_count_saturates():
    A = PixelArray(make_pack([("a", 0, 1, 2)]), np.array([2**40, 3]), COUNT)
    assert A.values.tolist() == [COUNT_MAX, 3]


def test_matmul_8x8_against_triple_loop():
    rng = np.random.default_rng(0)
    wd = specialization_diagram("matmul", 8, 8, 8)
    for _ in range(20):
        M = rng.random((8, 8)) < 0.3
        N = rng.random((8, 8)) < 0.3
        out = general_multiply(wd, [PixelArray(wd.inner[0], M), PixelArray(wd.inner[1], N)])
        assert np.array_equal(out.values, bool_matmul(M, N))


def test_trace_identity():
    wd = specialization_diagram("trace", 4)
    eye = np.eye(4, dtype=int)
    assert general_multiply(wd, [PixelArray(wd.inner[0], eye, COUNT)]).values.item() == 4
    assert general_multiply(wd, [PixelArray(wd.inner[0], eye, BOOL)]).values.item() is True
    assert loop_multiply(wd, [PixelArray(wd.inner[0], eye, COUNT)]).values.item() == 4


@pytest.mark.parametrize("n", [2, 3, 5, 16])
def test_trace_count_matches_diagonal_sum(n):
    rng = np.random.default_rng(n)
    wd = specialization_diagram("trace", n)
    A = rng.integers(0, 5, (n, n))
    got = general_multiply(wd, [PixelArray(wd.inner[0], A, COUNT)]).values.item()
    assert got == sum(A[i, i] for i in range(n))


def test_kronecker_identities():
    wd = specialization_diagram("kronecker", 2, 2, 2, 2)
    eye = np.eye(2, dtype=bool)
    out = general_multiply(wd, [PixelArray(wd.inner[0], eye), PixelArray(wd.inner[1], eye)])
    assert np.array_equal(out.values, bool_kron(eye, eye))
    assert np.array_equal(out.values.reshape(4, 4), np.kron(eye, eye))


def test_all_zero_inputs_give_zero():
    rng = np.random.default_rng(1)
    for _ in range(20):
        wd = random_wd(rng)
        out = general_multiply(wd, [PixelArray.zeros(p) for p in wd.inner])
        assert out.count_on() == 0


@pytest.mark.parametrize("seed", range(40))
def test_vectorised_matches_loop(seed):
    rng = np.random.default_rng(seed)
    wd = random_wd(rng)
    arrays = random_arrays(rng, wd, p=0.4)
    assert general_multiply(wd, arrays) == loop_multiply(wd, arrays)
    counts = [PixelArray(a.pack, rng.integers(0, 4, a.pack.shape), COUNT) for a in arrays]
    assert general_multiply(wd, counts) == loop_multiply(wd, counts)


@pytest.mark.parametrize("block", [1, 2, 7, 64])
def test_block_size_does_not_change_result(block):
    rng = np.random.default_rng(block)
    for _ in range(10):
        wd = random_wd(rng)
        arrays = random_arrays(rng, wd)
        assert general_multiply(wd, arrays, block) == general_multiply(wd, arrays)


def test_repeated_link_in_one_pack_takes_diagonal():
    wd = specialization_diagram("trace", 3)
    A = np.array([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    assert general_multiply(wd, [PixelArray(wd.inner[0], A, COUNT)]).values.item() == 15


def test_monotone_in_inputs():
    rng = np.random.default_rng(7)
    for _ in range(100):
        wd = random_wd(rng)
        A = random_arrays(rng, wd, 0.3)
        B = [PixelArray(a.pack, a.values | (rng.random(a.pack.shape) < 0.3)) for a in A]
        assert general_multiply(wd, A) <= general_multiply(wd, B)


def test_count_linear_in_one_input():
    rng = np.random.default_rng(11)
    for _ in range(50):
        wd = random_wd(rng)
        others = [PixelArray(p, rng.integers(0, 3, p.shape), COUNT) for p in wd.inner]
        M = rng.integers(0, 3, wd.inner[0].shape)
        N = rng.integers(0, 3, wd.inner[0].shape)
        c = int(rng.integers(0, 4))

        def run(first):
            return general_multiply(wd, [PixelArray(wd.inner[0], first, COUNT)] + others[1:]).values

        assert np.array_equal(run(c * M + N), c * run(M) + run(N))


def test_associative_on_chain():
    rng = np.random.default_rng(5)
    wd = chain(6)
    mm = specialization_diagram("matmul", 6, 6, 6)
    for _ in range(20):
        M, N, P = (rng.random((6, 6)) < 0.3 for _ in range(3))
        direct = general_multiply(wd, [PixelArray(p, v) for p, v in zip(wd.inner, (M, N, P))])
        MN = bool_matmul(M, N)
        NP = bool_matmul(N, P)
        assert np.array_equal(direct.values, bool_matmul(MN, P))
        assert np.array_equal(direct.values, bool_matmul(M, NP))
        one = general_multiply(mm, [PixelArray(mm.inner[0], MN), PixelArray(mm.inner[1], P)])
        assert np.array_equal(direct.values, one.values)


def test_input_validation():
    wd = specialization_diagram("matmul", 2, 3, 2)
    a = PixelArray.zeros(wd.inner[0])
    with pytest.raises(PackMismatch):
        general_multiply(wd, [a])
    with pytest.raises(PackMismatch):
        general_multiply(wd, [a, a])
    with pytest.raises(SemiringMismatch):
        general_multiply(wd, [a, PixelArray.zeros(wd.inner[1], COUNT)])
    with pytest.raises(ValueError):
        specialization_diagram("matmul", 1, 2, 2)
    with pytest.raises(ValueError):
        specialization_diagram("transpose", 2)


def test_bool_rejects_other_values():
    with pytest.raises(ValueError):
        PixelArray(make_pack([("a", 0, 1, 2)]), np.array([0, 2]))
    with pytest.raises(ValueError):
        PixelArray(make_pack([("a", 0, 1, 2)]), np.array([0, -1]), COUNT)
