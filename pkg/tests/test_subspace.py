import numpy as np
import pytest
import scipy.linalg
from scipy.sparse import csr_matrix

from blockmac import build, database, enlarge, make_system, solve
from blockmac.basis import BasisRule, OrderRule, vandermonde
from blockmac.errors import GapMissing, NoGap, RankAmbiguous
from blockmac.macaulay import new_rows
from blockmac.subspace import (
    BLOCK,
    ROW,
    RankStructure,
    column_compress,
    column_subspace,
    nullspace,
    nullspace_recursive,
    numerical_rank,
    rank_structure,
    stabilized,
)

from conftest import pair_distance, planted_system, random_system


def test_single_linear_equation():
    M = build(make_system([[((1,), 1.0), ((0,), -1.0)]], 1), 3)
    S = nullspace(M)
    assert S.nullity == M.shape[1] - np.linalg.matrix_rank(M.toarray()) == 1
    # three rows, four columns: dense rank oracle
    assert M.shape == (3, 4)


def test_nullspace_contract(conics):
    M = build(conics, 4)
    S = nullspace(M)
    a = M.toarray()
    assert np.linalg.norm(a @ S.Z) <= 1e-10 * np.linalg.norm(a, 2)
    assert np.allclose(S.Z.conj().T @ S.Z, np.eye(S.nullity), atol=1e-12)
    assert S.nullity == M.shape[1] - np.linalg.matrix_rank(a)


def test_recursive_matches_direct(conics):
    M = build(conics, 2)
    S = nullspace(M)
    for d in range(3, 6):
        extra, _ = new_rows(M, d)
        S = nullspace_recursive(S, extra)
        M = enlarge(M, d)
        direct = nullspace(M)
        assert S.nullity == direct.nullity
        assert np.max(scipy.linalg.subspace_angles(S.Z, direct.Z)) <= 1e-10


def test_recursive_without_new_rows():
    M = build(make_system([[((1, 0), 1.0), ((0, 0), -1.0)]], 2), 1)
    S = nullspace(M)
    T = nullspace_recursive(S, csr_matrix((0, 6)))
    assert T.Z.shape == (6, S.nullity + 3)
    assert np.array_equal(T.Z[:3, : S.nullity], S.Z)
    assert np.array_equal(T.Z[3:, S.nullity:], np.eye(3))


def nullity_chain(problem, recursive, top):
    M = build(problem, problem.degree)
    S = nullspace(M)
    out = [S.nullity]
    for d in range(problem.degree + 1, top + 1):
        if recursive:
            extra, _ = new_rows(M, d)
            S = nullspace_recursive(S, extra)
        M = enlarge(M, d)
        if not recursive:
            S = nullspace(M)
        out.append(S.nullity)
    return out


def test_noon3_chain():
    p = database.get("noon3")
    it, rec = nullity_chain(p, False, 7), nullity_chain(p, True, 7)
    assert it == rec
    assert it[-1] == it[-2] == 27
    # monotone until stabilization
    assert all(a <= b for a, b in zip(it, it[1:]))


def test_noon3_structure():
    p = database.get("noon3")
    S = nullspace(build(p, 7))
    rs = rank_structure(S)
    assert (rs.nullity, rs.m_a) == (27, 21)
    assert len(rs.affine_rows) == 21
    assert list(rs.standard_rows) == sorted(set(rs.standard_rows))
    assert column_compress(S, rs).shape[1] == 21


def test_all_affine_gap(conics):
    S = nullspace(build(conics, 3))
    rs = rank_structure(S)
    assert rs.m_a == rs.nullity == 4
    W = column_compress(S, rs)
    # rank-preserving compression
    assert np.max(scipy.linalg.subspace_angles(W, S.Z[: rs.nrows])) <= 1e-10


def test_no_gap_at_low_degree(conics):
    with pytest.raises(NoGap):
        rank_structure(nullspace(build(conics, 2)))


def test_gap_missing(conics):
    S = nullspace(build(conics, 3))
    rs = RankStructure(4, (1, 2, 1, 1), (0, 1, 2, 3), None, 4, 10)
    with pytest.raises(GapMissing):
        column_compress(S, rs)


def test_stabilized():
    assert stabilized([10, 14, 16, 16])
    assert not stabilized([10, 14, 16])
    assert stabilized([3, 7, 12], posdim=True)
    with pytest.raises(ValueError):
        stabilized([])


@pytest.mark.parametrize("name", ["conics", "noon3", "doubleroot", "mep_planted", "mep_random_3x2", "katsura2"])
def test_column_null_correspondence(name):
    p = database.get(name)
    d = solve(p).diagnostics["final_degree"]
    M = build(p, d)
    null = rank_structure(nullspace(M))
    col = rank_structure(column_subspace(M))
    assert null.rank_increment_per_degree == col.rank_increment_per_degree
    assert null.nullity == col.nullity
    assert (null.gap_degree, null.m_a, null.nrows) == (col.gap_degree, col.m_a, col.nrows)


@pytest.mark.parametrize("name", ["conics", "noon3", "mep_random_3x2", "katsura3"])
def test_block_and_row_modes_agree(name):
    p = database.get(name)
    d = solve(p).diagnostics["final_degree"]
    S = nullspace(build(p, d))
    assert rank_structure(S, BLOCK) == rank_structure(S, ROW)


def test_compression_keeps_planted_roots():
    p, root = planted_system(4)
    sol = solve(p)
    d = sol.diagnostics["final_degree"]
    order = OrderRule("grevlex", 2)
    S = nullspace(build(p, d, order))
    rs = rank_structure(S)
    W = column_compress(S, rs)
    v = vandermonde(order, BasisRule("monomial"), root, d)[: rs.nrows]
    v = v / np.linalg.norm(v)
    assert np.linalg.norm(v - W @ (W.conj().T @ v)) <= 1e-8


def test_affine_roots_beside_infinity():
    # (x1 - a)(x1 - b) = 0 and x1 (x2 - c) = 0: two affine roots, two at infinity
    a, b, c = 0.7, -1.3, 0.4
    p = make_system([{(2, 0): 1.0, (1, 0): -(a + b), (0, 0): a * b}, {(1, 1): 1.0, (1, 0): -c}], 2)
    sol = solve(p)
    assert sol.diagnostics["nullity"] == 4 and sol.diagnostics["affine_count"] == 2
    assert pair_distance(sol.points, [[a, c], [b, c]]) <= 1e-8


def test_rank_ambiguous():
    with pytest.raises(RankAmbiguous) as info:
        numerical_rank(np.diag([1.0, 3e-10]), tol=1e-10)
    assert info.value.threshold == pytest.approx(1e-10)
    assert numerical_rank(np.diag([1.0, 1e-14])) == 1


def test_random_systems_structure():
    for seed in range(5):
        p = random_system(seed)
        sol = solve(p)
        assert sol.diagnostics["affine_count"] == int(np.prod(p.degrees))
