import numpy as np
import pytest

from conftest import context, spectral_data
from qham.qnum import QuadScalar
from qham.spectral import (
    e1_difference_seed,
    eigenvalue,
    even_first_order,
    float_spectrum_check,
    generate_submodule,
    lagrange_basis,
    natural_order,
    odd_first_order,
    ordering_violation,
    primary_seed,
    scalar_factor,
    verify_dual_generation,
    verify_orderings,
    verify_scalar_factor,
    verify_trace_moments,
    verify_zero_blocks,
)
from qham.tmodules import multiplicity_sums

INSTANCES = [(1, 3), (1, 5), (2, 3), (2, 4), (2, 5), (3, 3), (3, 4)]


def numeric_multiplicities(D, n):
    ctx = context(D, n)
    vals = np.linalg.eigvalsh(ctx.A.to_float())
    root = np.sqrt(n - 1)
    return [int(np.sum(np.abs(vals - root * (D - i)) < 1e-6)) for i in range(2 * D + 1)]


def test_eigenvalues_h23():
    ctx = context(2, 3)
    r2 = QuadScalar.sqrt_of(2)
    assert [eigenvalue(ctx, i) for i in range(5)] == [2 * r2, r2, 0 * r2, -r2, -2 * r2]


def test_eigenvalues_rational_case():
    # n - 1 = 4 is a square: eigenvalues are integers
    ctx = context(1, 5)
    assert [eigenvalue(ctx, i) for i in range(3)] == [2, 0, -2]
    assert spectral_data(1, 5).multiplicities == [1, 3, 1]


def test_lagrange_basis_is_indicator():
    nodes = [QuadScalar(0, c, 3) for c in (2, 1, 0, -1, -2)]
    for i in range(5):
        p = lagrange_basis(nodes, i)
        assert [p(x) for x in nodes] == [int(i == j) for j in range(5)]


@pytest.mark.parametrize("D,n", INSTANCES)
def test_idempotents(D, n):
    sd = spectral_data(D, n)
    assert sd.ok, [c.as_dict() for c in sd.checks if not c]
    assert sd.multiplicities == numeric_multiplicities(D, n)
    assert sd.multiplicities == multiplicity_sums(D, n)
    assert verify_trace_moments(context(D, n), sd).passed
    assert float_spectrum_check(context(D, n), sd).passed


@pytest.mark.parametrize("D,n,mults", [
    (2, 3, [1, 2, 3, 2, 1]),
    (4, 4, [1, 8, 28, 56, 70, 56, 28, 8, 1]),
    (4, 5, [1, 12, 58, 144, 195, 144, 58, 12, 1]),
])
def test_multiplicity_examples(D, n, mults):
    assert spectral_data(D, n).multiplicities == mults
    assert numeric_multiplicities(D, n) == mults


def test_float_check_without_exact_data():
    res = float_spectrum_check(context(3, 3))
    assert res.passed and res.detail["multiplicities"] == spectral_data(3, 3).multiplicities


@pytest.mark.parametrize("D,n", INSTANCES)
def test_zero_blocks_and_orderings(D, n):
    ctx, sd = context(D, n), spectral_data(D, n)
    blocks = verify_zero_blocks(sd, ctx.Astar)
    assert blocks.check.passed
    assert any(not blocks.zero[i][i + 2] for i in range(2 * D - 1))
    orders = verify_orderings(sd, ctx.Astar, blocks)
    assert orders["even_first"].passed and orders["odd_first"].passed
    assert orders["natural"].passed  # the control found a violation
    k, l = orders["natural"].detail["first_violation"]
    assert abs(k - l) == 2


def test_zero_blocks_against_float_projectors():
    # spectral projectors from numpy eigenvectors, independent of the Lagrange construction
    D, n = 2, 4
    ctx = context(D, n)
    vals, vecs = np.linalg.eigh(ctx.A.to_float())
    S = ctx.Astar.to_float()
    root = np.sqrt(n - 1)
    proj = []
    for i in range(2 * D + 1):
        cols = vecs[:, np.abs(vals - root * (D - i)) < 1e-6]
        proj.append(cols @ cols.T)
    blocks = verify_zero_blocks(spectral_data(D, n), ctx.Astar)
    for i in range(2 * D + 1):
        for j in range(2 * D + 1):
            numeric_zero = np.abs(proj[i] @ S @ proj[j]).max() < 1e-8
            assert numeric_zero == blocks.zero[i][j]


def test_d1_distance_two_block_nonzero():
    ctx, sd = context(1, 3), spectral_data(1, 3)
    blocks = verify_zero_blocks(sd, ctx.Astar)
    assert not blocks.zero[0][2] and not blocks.zero[2][0]
    assert blocks.zero[0][1]


def test_ordering_helpers():
    assert even_first_order(2) == [0, 2, 4, 1, 3]
    assert odd_first_order(2) == [1, 3, 0, 2, 4]
    assert natural_order(2) == [0, 1, 2, 3, 4]
    zero = [[abs(i - j) not in (0, 2) for j in range(5)] for i in range(5)]
    assert ordering_violation(zero, even_first_order(2)) is None
    assert ordering_violation(zero, natural_order(2)) == (0, 2)


@pytest.mark.parametrize("i,j", [(0, 0), (0, 1), (3, 1), (1, 4), (5, 0)])
def test_scalar_factor_closed_form(i, j):
    lhs, closed = scalar_factor(i, j, 4, 3)
    assert lhs == closed
    assert (not lhs) == (abs(i - j) in (0, 2))


def test_scalar_factor_sign():
    # theta_0 - theta_1 = sqrt(n-1), so the factor is -3 (n-1) sqrt(n-1), negative
    lhs, _ = scalar_factor(0, 1, 3, 2)
    assert lhs == QuadScalar(0, -6, 2)
    k = -1
    flipped = QuadScalar.sqrt_of(2) * (2 * k * (k - 2) * (k + 2))
    assert lhs == -flipped


@pytest.mark.parametrize("D,n", [(1, 3), (3, 5), (5, 8)])
def test_verify_scalar_factor(D, n):
    assert verify_scalar_factor(D, n).passed


@pytest.mark.parametrize("D,n", INSTANCES)
def test_dual_generation(D, n):
    assert verify_dual_generation(context(D, n)).passed


# module closure


def numeric_module_dimension(ctx, seed):
    """Dimension of the span of the seed under words in L, R and E*_i, in floats."""
    mats = [ctx.L.to_float(), ctx.R.to_float()] + [E.to_float() for E in ctx.dual_idempotents]
    v = np.zeros(ctx.order)
    for k, val in seed.items():
        v[k] = float(val)
    basis = v[:, None]
    while True:
        grown = np.hstack([basis] + [M @ basis for M in mats])
        u, s, _ = np.linalg.svd(grown, full_matrices=False)
        rank = int(np.sum(s > 1e-9 * s[0]))
        if rank == basis.shape[1]:
            return rank
        basis = u[:, :rank]


@pytest.mark.parametrize("D,n", INSTANCES)
def test_primary_module(D, n):
    ctx = context(D, n)
    sub = generate_submodule(ctx, primary_seed(ctx))
    assert sub.thin and (sub.endpoint, sub.diameter) == (0, D)
    assert sub.level_dimensions == [1] * (D + 1)
    assert sub.basis_check.passed
    assert sub.dimension == numeric_module_dimension(ctx, primary_seed(ctx))


def test_all_ones_seed_gives_primary_module():
    ctx = context(3, 3)
    sub = generate_submodule(ctx, [1] * ctx.order)
    assert sub.thin and sub.dimension == 4 and sub.endpoint == 0


@pytest.mark.parametrize("D,n", [(2, 3), (2, 4), (3, 3)])
def test_e1_difference_seed(D, n):
    ctx = context(D, n)
    seed = e1_difference_seed(ctx)
    sub = generate_submodule(ctx, seed)
    assert sub.thin and sub.endpoint == 1 and sub.diameter == D - 1
    assert sub.basis_check.passed
    assert sub.dimension == numeric_module_dimension(ctx, seed)


def test_cross_coordinate_difference_not_thin():
    ctx = context(2, 3)
    sp = ctx.space
    seed = {sp.index((1, 0)): 1, sp.index((0, 1)): -1}
    sub = generate_submodule(ctx, seed)
    assert not sub.thin and sub.basis_check is None
    assert sub.dimension == numeric_module_dimension(ctx, seed)


def test_zero_seed_rejected():
    with pytest.raises(ValueError):
        generate_submodule(context(1, 3), {0: 0})
    with pytest.raises(ValueError):
        generate_submodule(context(1, 3), {7: 1})
