import itertools
import math

import numpy as np
import numpy.testing as npt
import pytest

from matslice import (
    NotIrreducible,
    TooLarge,
    accessible_vertices,
    bfr_map,
    hull_member,
    is_irreducible,
    majorization_member,
    permutohedron_vertices,
    project_sum_zero,
    random_jacobi,
    random_orthogonal,
    random_with_spectrum,
    slice_point,
    spectral_decompose,
    spectral_polytope,
    sum_zero_basis,
    symmetrize,
)
from conftest import golden_matrix, maxabs


# -------------------------------------------------------------- enumerations

def test_permutohedron_counts():
    assert len(permutohedron_vertices(np.array([3.0, 2.0, 1.0]))) == 6
    assert len(permutohedron_vertices(np.array([4.0, 3.0, 2.0, 1.0]))) == 24


def test_permutohedron_points_match_perms():
    lam = np.array([5.0, 2.0, -1.0])
    vs = permutohedron_vertices(lam)
    for perm, pt in zip(vs.perms, vs.points):
        npt.assert_array_equal(pt, lam[list(perm)])
    assert vs.affine_dim == 2  # all vertices share the coordinate sum


def test_permutohedron_rejects_bad_spectra():
    with pytest.raises(ValueError):
        permutohedron_vertices(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        permutohedron_vertices(np.array([2.0, 2.0]))
    with pytest.raises(TooLarge):
        permutohedron_vertices(np.arange(9.0)[::-1])


def test_spectral_polytope_merges_ties():
    vs = spectral_polytope(np.array([2.0, 1.0, 1.0]))
    assert len(vs) == 3
    assert vs.affine_dim == 2
    flat = spectral_polytope(np.array([1.0, 1.0, 1.0]))
    assert len(flat) == 1
    assert flat.affine_dim == 0
    simple = spectral_polytope(np.array([3.0, 2.0, 1.0]))
    assert len(simple) == 6


# ------------------------------------------------------------------- bfr_map

def test_bfr_frozen_2x2():
    npt.assert_allclose(bfr_map(np.array([[2.0, 1.0], [1.0, 2.0]])),
                        [2.0, 2.0], atol=1e-14)


def test_bfr_is_the_diagonal_in_reverse():
    # the image coordinates are exactly the diagonal entries of the matrix
    rng = np.random.default_rng(709)
    for _ in range(20):
        s = random_with_spectrum(np.array([4.0, 2.5, 1.0, -0.5]), rng)
        npt.assert_allclose(bfr_map(s), np.diag(s), atol=1e-10 * maxabs(s))


def test_bfr_sign_invariance_is_exact():
    # squaring kills eigenvector sign freedom bit for bit
    rng = np.random.default_rng(719)
    for _ in range(20):
        n = int(rng.integers(2, 5))
        s = random_with_spectrum(np.sort(rng.uniform(-3, 3, n))[::-1]
                                 + np.arange(n)[::-1], rng)
        dec = spectral_decompose(s)
        base = dec.lam @ (dec.q * dec.q)
        for signs in itertools.product((1.0, -1.0), repeat=n):
            flipped = np.array(signs)[:, None] * dec.q
            assert np.array_equal(dec.lam @ (flipped * flipped), base)


def test_bfr_lands_in_the_polytope():
    rng = np.random.default_rng(727)
    lam = np.array([4.0, 2.0, 1.0, -1.0])
    for _ in range(25):
        s = random_with_spectrum(lam, rng)
        p = bfr_map(s)
        assert majorization_member(p, lam)
        assert hull_member(p, lam)


# ------------------------------------------------------------ accessibility

def test_golden_example_exact_vertex_set():
    s, lam, _ = golden_matrix()
    vs = accessible_vertices(s)
    assert set(vs.perms) == {(1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)}
    want = {(2.0, 4.0, 1.0), (2.0, 1.0, 4.0), (1.0, 4.0, 2.0), (1.0, 2.0, 4.0)}
    for pt in vs.points:
        assert min(max(abs(pt - np.array(w))) for w in want) < 1e-12
    assert vs.affine_dim == 2
    assert len(vs) == 4 < math.factorial(3)


def test_jacobi_reaches_every_vertex():
    rng = np.random.default_rng(733)
    for n in (3, 4, 5):
        j = random_jacobi(n, rng)
        vs = accessible_vertices(j)
        assert len(vs) == math.factorial(n)
        assert vs.affine_dim == n - 1


def test_accessible_count_never_exceeds_factorial():
    rng = np.random.default_rng(739)
    for _ in range(10):
        n = int(rng.integers(3, 6))
        s = random_with_spectrum(np.arange(n, 0.0, -1.0), rng)
        if not is_irreducible(s):
            continue
        vs = accessible_vertices(s)
        assert 1 <= len(vs) <= math.factorial(n)
        for perm, pt in zip(vs.perms, vs.points):
            npt.assert_array_equal(pt, vs.lam[list(perm)])


def test_accessible_vertices_guards():
    block = np.zeros((4, 4))
    block[:2, :2] = [[1.0, 0.5], [0.5, 2.0]]
    block[2:, 2:] = [[4.0, 0.2], [0.2, 3.0]]
    with pytest.raises(NotIrreducible):
        accessible_vertices(block)
    rng = np.random.default_rng(743)
    with pytest.raises(TooLarge):
        accessible_vertices(random_jacobi(9, rng))


# ----------------------------------------------------------- hull membership

def test_membership_trivial_cases():
    lam = np.array([4.0, 2.0, 1.0])
    bary = np.full(3, lam.mean())
    for point, inside in [
        (lam, True),                      # a vertex
        (np.array([2.0, 4.0, 1.0]), True),  # another vertex
        (bary, True),                     # the barycenter
        (np.array([4.2, 1.9, 0.9]), False),  # outside, beyond the top vertex
        (np.array([4.0, 2.0, 2.0]), False),  # wrong coordinate sum
    ]:
        assert majorization_member(point, lam) is inside
        assert hull_member(point, lam) is inside


def test_membership_edge_and_near_vertex_points():
    lam = np.array([3.0, 1.0, 0.0])
    mid = 0.5 * (lam + np.array([1.0, 3.0, 0.0]))  # midpoint of an edge
    assert hull_member(mid, lam)
    assert majorization_member(mid, lam)
    bary = np.full(3, lam.mean())
    nudged_in = lam + 0.01 * (bary - lam)    # just inside the top vertex
    pushed_out = lam + 0.01 * (lam - bary)   # just past it
    assert hull_member(nudged_in, lam) and majorization_member(nudged_in, lam)
    assert not hull_member(pushed_out, lam)
    assert not majorization_member(pushed_out, lam)


def test_hull_and_majorization_agree_on_random_points():
    # two fully independent membership tests must give one answer
    rng = np.random.default_rng(751)
    total = 0
    disagreements = 0
    insides = 0
    for _ in range(120):
        n = int(rng.integers(2, 6))
        lam = np.sort(rng.uniform(-2.0, 4.0, size=n))[::-1]
        while np.any(-np.diff(lam) < 1e-3):
            lam = np.sort(rng.uniform(-2.0, 4.0, size=n))[::-1]
        perms = [lam[list(p)] for p in itertools.permutations(range(n))]
        for _ in range(5):
            mode = rng.integers(3)
            if mode == 0:  # honest convex combination: inside
                coef = rng.dirichlet(np.ones(len(perms)))
                point = coef @ np.array(perms)
            elif mode == 1:  # random sum-matched point, either side
                point = rng.normal(size=n)
                point += (lam.sum() - point.sum()) / n
            else:           # pushed outward past the top vertex: outside
                point = lam + rng.uniform(0.1, 0.5) * (lam - lam.mean())
            a = hull_member(point, lam)
            b = majorization_member(point, lam)
            total += 1
            insides += int(a)
            disagreements += int(a != b)
    assert total >= 500
    assert disagreements == 0
    assert 0 < insides < total  # both answers actually exercised


def test_schur_horn_diagonals_are_members():
    rng = np.random.default_rng(757)
    lam = np.array([3.0, 1.5, 0.5, -1.0])
    for _ in range(100):
        q = random_orthogonal(4, rng)
        diag = np.diag(symmetrize((q.T * lam) @ q))
        assert majorization_member(diag, lam)
        assert hull_member(diag, lam)


def test_hull_member_guards():
    lam = np.array([2.0, 1.0])
    with pytest.raises(ValueError):
        hull_member(np.array([1.0, 1.0, 1.0]), lam)
    with pytest.raises(TooLarge):
        hull_member(np.zeros(9), np.arange(9.0)[::-1])


# ----------------------------------------------------- slice images & basis

def test_slice_points_fill_the_polytope_distinctly():
    rng = np.random.default_rng(761)
    lam = np.array([4.0, 2.6, 1.3, 0.2])
    j = random_jacobi(4, rng, spectrum=lam)
    points = []
    for _ in range(40):
        w = rng.uniform(0.05, 1.0, size=4)
        p = bfr_map(slice_point(j, w))
        assert hull_member(p, lam)
        points.append(p)
    points = np.array(points)
    dists = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
    np.fill_diagonal(dists, np.inf)
    assert dists.min() > 1e-8  # generic weights land on distinct points


def test_sum_zero_basis_is_orthonormal():
    for n in (2, 3, 5, 7):
        b = sum_zero_basis(n)
        assert b.shape == (n - 1, n)
        npt.assert_allclose(b @ b.T, np.eye(n - 1), atol=1e-14)
        npt.assert_allclose(b.sum(axis=1), np.zeros(n - 1), atol=1e-14)


def test_projection_preserves_distances():
    lam = np.array([3.0, 2.0, 1.0])
    vs = permutohedron_vertices(lam)
    flat = project_sum_zero(vs.points)
    assert flat.shape == (6, 2)
    for i in range(6):
        for k in range(6):
            d_orig = np.linalg.norm(vs.points[i] - vs.points[k])
            d_flat = np.linalg.norm(flat[i] - flat[k])
            assert abs(d_orig - d_flat) < 1e-12
