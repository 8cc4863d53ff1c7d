from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qham.matrix import ExactMatrix, dump_matrix, int_matmul, load_matrix, stack_powers
from qham.qnum import QuadScalar, RadicandMismatchError


def object_product(x, y):
    # plain Python ints, no overflow possible
    xo = np.array(x.tolist(), dtype=object)
    yo = np.array(y.tolist(), dtype=object)
    return xo.dot(yo)


def to_sympy(mat: ExactMatrix):
    r = sympy.sqrt(mat.m)
    b = mat.b if mat.b is not None else np.zeros(mat.shape, dtype=np.int64)
    return sympy.Matrix(mat.shape[0], mat.shape[1],
                        lambda i, j: (int(mat.a[i, j]) + int(b[i, j]) * r) / sympy.Integer(mat.den))


@pytest.mark.parametrize("bound", [3, 1000, 2 ** 30, 2 ** 40, 2 ** 62, 2 ** 90])
@pytest.mark.parametrize("shape", [(4, 5, 3), (17, 17, 17), (1, 40, 1)])
def test_int_matmul_against_python_ints(bound, shape):
    rng = np.random.default_rng(bound % 9973 + shape[1])
    r, k, c = shape
    if bound < 2 ** 62:
        x = rng.integers(-bound, bound + 1, size=(r, k), dtype=np.int64)
        y = rng.integers(-bound, bound + 1, size=(k, c), dtype=np.int64)
    else:
        x = np.array([[int(v) * (bound // 2 ** 31) for v in row]
                      for row in rng.integers(-2 ** 31, 2 ** 31, size=(r, k))], dtype=object)
        y = np.array([[int(v) * 7 for v in row] for row in rng.integers(-2 ** 31, 2 ** 31, size=(k, c))],
                     dtype=object)
    got = int_matmul(x, y)
    want = object_product(x, y)
    assert [[int(v) for v in row] for row in got.tolist()] == [[int(v) for v in row] for row in want.tolist()]


@settings(max_examples=60)
@given(arrays(np.int64, (6, 6), elements=st.integers(-2 ** 40, 2 ** 40)),
       arrays(np.int64, (6, 6), elements=st.integers(-2 ** 40, 2 ** 40)))
def test_int_matmul_property(x, y):
    got = int_matmul(x, y)
    assert [[int(v) for v in row] for row in got.tolist()] == object_product(x, y).tolist()


@st.composite
def quad_matrices(draw, size=3, m=None):
    m = draw(st.sampled_from([1, 2, 3, 5])) if m is None else m
    ints = st.integers(-20, 20)
    a = [[draw(ints) for _ in range(size)] for _ in range(size)]
    b = [[draw(ints) for _ in range(size)] for _ in range(size)]
    den = draw(st.integers(1, 6))
    return ExactMatrix(np.array(a), np.array(b), den, m)


@st.composite
def matrix_pairs(draw):
    m = draw(st.sampled_from([1, 2, 3, 5]))
    return draw(quad_matrices(m=m)), draw(quad_matrices(m=m))


@settings(max_examples=40, deadline=None)
@given(matrix_pairs())
def test_product_against_sympy(pair):
    x, y = pair
    got = to_sympy(x @ y)
    want = to_sympy(x) * to_sympy(y)
    assert (got - want).applyfunc(sympy.expand) == sympy.zeros(3, 3)
    assert (to_sympy(x + y) - to_sympy(x) - to_sympy(y)).applyfunc(sympy.expand) == sympy.zeros(3, 3)


@settings(max_examples=40, deadline=None)
@given(matrix_pairs())
def test_algebra_laws(pair):
    x, y = pair
    I = ExactMatrix.identity(3, x.m)
    assert x @ I == x == I @ x
    assert (x @ y).T == y.T @ x.T
    assert x - x == ExactMatrix.zeros(3, m=x.m)
    assert (x + y).trace() == x.trace() + y.trace()
    c = QuadScalar(Fraction(2, 3), 1, x.m)
    assert x.scale(c).entry(1, 2) == x.entry(1, 2) * c


def test_normalized_representation():
    mat = ExactMatrix(np.array([[2, 4], [6, 8]]), None, 2)
    assert mat.den == 1 and mat == ExactMatrix.from_ints([[1, 2], [3, 4]])
    assert mat.entry(1, 0) == 3


def test_radicand_mismatch():
    x = ExactMatrix.identity(2, 2).scale(QuadScalar.sqrt_of(2))
    y = ExactMatrix.identity(2, 3).scale(QuadScalar.sqrt_of(3))
    with pytest.raises(RadicandMismatchError):
        x + y


def test_powers_and_combination():
    J = ExactMatrix.from_ints([[0, 1], [1, 0]])
    pw = stack_powers(J, 3)
    assert pw[2] == ExactMatrix.identity(2) and pw[3] == J
    combo = ExactMatrix.combination([2, -1], [pw[0], J])
    assert combo == ExactMatrix.from_ints([[2, -1], [-1, 2]])


def test_first_difference():
    x = ExactMatrix.from_ints([[1, 2], [3, 4]])
    y = ExactMatrix.from_ints([[1, 2], [3, 5]])
    assert x.first_difference(y) == (1, 1)
    assert x.first_difference(x) is None


@settings(max_examples=30, deadline=None)
@given(quad_matrices())
def test_dump_round_trip(mat):
    text = dump_matrix(mat)
    assert text.splitlines()[0] == "order 3"
    assert load_matrix(text) == mat


def test_dump_format():
    mat = ExactMatrix.from_scalars([[QuadScalar(1, -2, 3), 0], [QuadScalar(0, Fraction(1, 2), 3), 5]], 3)
    assert dump_matrix(mat) == "order 2\n1+-2*sqrt(3) 0+0*sqrt(3)\n0+1/2*sqrt(3) 5+0*sqrt(3)\n"


@pytest.mark.parametrize("text", ["", "2\n1 2\n3 4\n", "order 2\n1 2\n"])
def test_load_rejects(text):
    with pytest.raises(ValueError):
        load_matrix(text)
