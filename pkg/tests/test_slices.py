import numpy as np
import numpy.testing as npt
import pytest

from matslice import (
    DegenerateSpectrum,
    DomainViolation,
    SingularMatrix,
    SpectralFunction,
    Trajectory,
    eigensystem,
    fractional_step,
    frobenius,
    functional_step,
    function_values,
    interpolating_field,
    is_irreducible,
    iterate_qr,
    offdiag_norm,
    qr_factor,
    qr_step,
    random_jacobi,
    random_with_spectrum,
    slice_point,
)
from conftest import maxabs


def positive_instance(rng, n=4):
    lam = np.sort(rng.uniform(0.5, 5.0, size=n))[::-1]
    while np.any(-np.diff(lam) < 0.2):
        lam = np.sort(rng.uniform(0.5, 5.0, size=n))[::-1]
    return random_with_spectrum(lam, rng)


# ------------------------------------------------------------------ qr_step

def test_qr_step_2x2_by_hand():
    # S = QR from the factorization test; RQ = [[14/5, 3/5], [3/5, 6/5]]
    s = np.array([[2.0, 1.0], [1.0, 2.0]])
    npt.assert_allclose(qr_step(s), [[2.8, 0.6], [0.6, 1.2]], atol=1e-14)


def test_qr_step_two_formulas_agree():
    # RQ and Q^T S Q are algebraically identical
    rng = np.random.default_rng(211)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        s = positive_instance(rng, n)
        q, r = qr_factor(s)
        npt.assert_allclose(qr_step(s), q.T @ s @ q, atol=1e-12 * frobenius(s))


def test_qr_step_preserves_spectrum_and_symmetry():
    rng = np.random.default_rng(223)
    for _ in range(20):
        s = positive_instance(rng, 5)
        s1 = qr_step(s)
        assert np.array_equal(s1, s1.T)
        npt.assert_allclose(np.linalg.eigvalsh(s1), np.linalg.eigvalsh(s),
                            atol=1e-11 * frobenius(s))


def test_qr_step_keeps_tridiagonal_band():
    rng = np.random.default_rng(227)
    j = random_jacobi(6, rng)
    j1 = qr_step(j)
    band = np.triu(j1, 2)
    assert maxabs(band) < 1e-12 * frobenius(j)


def test_qr_step_rejects_singular():
    with pytest.raises(SingularMatrix):
        qr_step(np.array([[1.0, 1.0], [1.0, 1.0]]))


# ------------------------------------------------------------ functional_step

def test_functional_power_k_equals_k_plain_steps():
    rng = np.random.default_rng(229)
    for _ in range(10):
        s = positive_instance(rng, 4)
        for k in range(1, 5):
            stepped = s
            for _ in range(k):
                stepped = qr_step(stepped)
            via_power = functional_step(s, SpectralFunction.power(k))
            npt.assert_allclose(via_power, stepped, atol=1e-9 * frobenius(s))


def test_functional_step_indefinite_odd_power():
    # the k-step identity needs invertibility, not positivity
    rng = np.random.default_rng(233)
    s = random_with_spectrum([2.0, 0.7, -1.0, -3.0], rng)
    three = qr_step(qr_step(qr_step(s)))
    via = functional_step(s, SpectralFunction.power(3))
    npt.assert_allclose(via, three, atol=1e-10 * frobenius(s))


def test_functional_step_positive_scaling_of_f():
    rng = np.random.default_rng(239)
    s = positive_instance(rng, 4)
    f1 = SpectralFunction.polynomial([0.0, 1.0])
    f2 = SpectralFunction.polynomial([0.0, 2.0])
    f3 = SpectralFunction.polynomial([0.0, 3.0])
    a1 = functional_step(s, f1)
    # doubling every value of f scales f(S) by an exact power of two: the
    # orthogonal factor, and hence the step, must agree bit for bit
    assert np.array_equal(a1, functional_step(s, f2))
    npt.assert_allclose(a1, functional_step(s, f3), atol=1e-13 * frobenius(s))
    npt.assert_allclose(a1, qr_step(s), atol=1e-12 * frobenius(s))


def test_functional_step_rejects_vanishing_f():
    s = np.diag([4.0, 2.0, 1.0]) + 0.0
    s[0, 1] = s[1, 0] = 0.3
    with pytest.raises(SingularMatrix):
        functional_step(s, SpectralFunction.log())  # log(1) = 0 kills a direction


def test_functional_step_domain_error_propagates():
    rng = np.random.default_rng(241)
    s = random_with_spectrum([2.0, -1.0], rng)
    with pytest.raises(DomainViolation):
        functional_step(s, SpectralFunction.log())


# ------------------------------------------------------------ fractional_step

def test_fractional_step_k1_is_plain_step():
    rng = np.random.default_rng(251)
    s = positive_instance(rng, 4)
    npt.assert_allclose(fractional_step(s, 1), qr_step(s), atol=1e-12 * frobenius(s))


def test_fractional_step_semigroup():
    # k compositions of the k-th root step give one full step
    rng = np.random.default_rng(257)
    for k in (2, 3, 5):
        s = positive_instance(rng, 4)
        walked = s
        for _ in range(k):
            walked = fractional_step(walked, k)
        npt.assert_allclose(walked, qr_step(s), atol=1e-8 * frobenius(s))


def test_fractional_step_rejects_bad_k():
    s = np.diag([2.0, 1.0])
    with pytest.raises(ValueError):
        fractional_step(s, 0)
    with pytest.raises(ValueError):
        fractional_step(s, 2.5)


# -------------------------------------------------------- interpolating_field

def test_interpolating_field_is_isospectral_direction():
    rng = np.random.default_rng(263)
    for _ in range(10):
        s = positive_instance(rng, 5)
        x = interpolating_field(s)
        assert np.array_equal(x, x.T)
        scale = frobenius(s)
        # commutators are traceless, and they keep every power sum flat:
        # d/dt tr(S^m) = m * tr(S^(m-1) [S, A]) = 0
        assert abs(np.trace(x)) < 1e-12 * scale
        assert abs(np.trace(s @ x)) < 1e-11 * scale ** 2
        assert abs(np.trace(s @ s @ x)) < 1e-10 * scale ** 3


def test_fractional_steps_approach_the_field():
    rng = np.random.default_rng(269)
    s = positive_instance(rng, 4)
    x = interpolating_field(s)
    errs = []
    for k in (100, 1000, 10000):
        diff = (fractional_step(s, k) - s) * k
        errs.append(maxabs(diff - x))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-3 * frobenius(s)


# ------------------------------------------------------------------- iterate

def test_iterate_qr_sorts_the_diagonal():
    rng = np.random.default_rng(271)
    s = random_with_spectrum([4.0, 2.0, 1.0], rng)
    traj = iterate_qr(s, 60)
    final = traj.final
    assert offdiag_norm(final) < 1e-8 * frobenius(s)
    npt.assert_allclose(np.diag(final), [4.0, 2.0, 1.0], atol=1e-8)
    npt.assert_allclose(traj.times, np.arange(61.0))


def test_iterate_qr_zero_steps():
    s = np.diag([2.0, 1.0])
    traj = iterate_qr(s, 0)
    assert len(traj) == 1
    npt.assert_array_equal(traj.final, s)


def test_trajectory_validation():
    s = np.diag([2.0, 1.0])
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0, 1.0]), states=[s])
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0, 0.0]), states=[s, s])
    with pytest.raises(ValueError):
        Trajectory(times=np.array([1.0, 0.0]), states=[s, s])
    with pytest.raises(ValueError):
        Trajectory(times=np.array([]), states=[])


# --------------------------------------------------------------- slice_point

def test_slice_point_unit_weights_fix_the_matrix():
    rng = np.random.default_rng(277)
    s = positive_instance(rng, 4)
    npt.assert_allclose(slice_point(s, np.ones(4)), s, atol=1e-12 * frobenius(s))


def test_slice_point_weight_scaling():
    rng = np.random.default_rng(281)
    s = positive_instance(rng, 4)
    w = rng.uniform(0.2, 2.0, size=4)
    p1 = slice_point(s, w)
    assert np.array_equal(p1, slice_point(s, 2.0 * w))  # power-of-two: bitwise
    npt.assert_allclose(p1, slice_point(s, 3.0 * w), atol=1e-13 * frobenius(s))


def test_slice_point_matches_functional_step():
    rng = np.random.default_rng(283)
    # spectrum above 1 keeps log(lam) positive, so it is a valid weight vector
    s = random_with_spectrum([5.0, 3.0, 2.0, 1.5], rng)
    lam, _ = eigensystem(s)
    for f in (SpectralFunction.log(), SpectralFunction.power(2),
              SpectralFunction.exp()):
        w = function_values(f, lam)
        npt.assert_allclose(slice_point(s, w), functional_step(s, f),
                            atol=1e-12 * frobenius(s))
    npt.assert_allclose(slice_point(s, lam), qr_step(s), atol=1e-12 * frobenius(s))


def test_slice_point_separates_weights():
    rng = np.random.default_rng(293)
    s = positive_instance(rng, 4)
    w1 = np.array([1.0, 0.5, 0.4, 0.3])
    w2 = np.array([0.3, 0.4, 0.5, 1.0])
    assert maxabs(slice_point(s, w1) - slice_point(s, w2)) > 1e-6


def test_slice_point_rejections():
    rng = np.random.default_rng(307)
    s = positive_instance(rng, 3)
    with pytest.raises(DomainViolation):
        slice_point(s, np.array([1.0, -1.0, 1.0]))
    with pytest.raises(DomainViolation):
        slice_point(s, np.array([1.0, 0.0, 1.0]))
    with pytest.raises(ValueError):
        slice_point(s, np.ones(4))
    with pytest.raises(DegenerateSpectrum):
        slice_point(np.diag([1.0, 1.0, 2.0]), np.ones(3))


# ------------------------------------------------------------- irreducibility

def test_is_irreducible_cases():
    rng = np.random.default_rng(311)
    assert is_irreducible(random_jacobi(5, rng))
    assert not is_irreducible(np.diag([3.0, 2.0, 1.0]))
    block = np.zeros((4, 4))
    block[:2, :2] = [[1.0, 0.5], [0.5, 1.0]]
    block[2:, 2:] = [[3.0, 0.2], [0.2, 2.0]]
    assert not is_irreducible(block)
    # a bond far below the relative threshold counts as broken
    j = random_jacobi(4, rng)
    j[1, 2] = j[2, 1] = 1e-15
    assert not is_irreducible(j)
    full = np.ones((3, 3)) + np.diag([1.0, 2.0, 3.0])
    assert is_irreducible(full)