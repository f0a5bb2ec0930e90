import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIG_A1, FIG_A2, assert_matrix
from swdl.errors import DegenerateInput, NotSymplectic, ZeroEntry
from swdl.symplectic import (
    IDENTITY,
    L1,
    N,
    WD_A1,
    P,
    SymplecticMatrix,
    conjugate_by,
    derive_a3,
    derive_a4,
    derive_a5,
    impulse_residual,
    invert,
    lfm_a2,
    optimal_a1,
    random_symplectic,
    resolution_bound,
    superresolution_flags,
    validate,
)

finite = st.floats(-4.0, 4.0, allow_nan=False).filter(lambda x: abs(x) > 0.05)


@st.composite
def symplectic(draw):
    a, b, c = draw(finite), draw(finite), draw(finite)
    return SymplecticMatrix(a, b, c, (1.0 + b * c) / a)


def test_validate_experiment_matrix():
    A = validate(2, 2, -0.25, 0.25)
    assert A.det == 1.0


def test_validate_identity_and_singular():
    assert validate(1, 0, 0, 1) == IDENTITY
    with pytest.raises(NotSymplectic) as err:
        validate(1, 1, 1, 1)
    assert err.value.residual == pytest.approx(1.0)


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        SymplecticMatrix(math.nan, 0, 0, 1)


def test_invert_examples():
    assert_matrix(invert(L1), [[0, -1], [1, 0]])
    assert_matrix(invert(FIG_A1), [[0.25, -2], [0.25, 2]])
    assert invert(IDENTITY) == IDENTITY


@given(symplectic())
def test_inverse_product_is_identity(A):
    np.testing.assert_allclose((A @ A.inverse()).as_array(), np.eye(2), atol=1e-12 * max(1, abs(A.d) ** 2))


def test_record_round_trip():
    A = random_symplectic(np.random.default_rng(1))
    assert SymplecticMatrix.from_record(A.to_record()) == A


def test_derived_matrices_experiment():
    assert_matrix(derive_a3(FIG_A1, FIG_A2), [[0, 1 / 8], [-8, 1 / 2]])
    assert_matrix(derive_a4(FIG_A1, FIG_A2), [[0, -1 / 8], [8, 1 / 2]])
    assert_matrix(derive_a5(FIG_A1, FIG_A2), [[0, -1 / 32], [32, 1 / 4]])


def test_derived_matrices_wd():
    # L1 has d2 = 0, so the lower-right entries vanish
    assert_matrix(derive_a3(WD_A1, L1), [[0, 1 / 2], [-2, 0]])
    assert_matrix(derive_a4(WD_A1, L1), [[0, -1 / 2], [2, 0]])
    assert_matrix(derive_a5(WD_A1, L1), [[0, -1 / 4], [4, 0]])


def test_derived_matrices_need_nonzero_entries():
    with pytest.raises(ZeroEntry):
        derive_a3(SymplecticMatrix(1, -1, 1, 0), FIG_A2)
    with pytest.raises(ZeroEntry):
        derive_a4(SymplecticMatrix(1, 3, 0, 1), FIG_A2)
    with pytest.raises(ZeroEntry):
        derive_a5(SymplecticMatrix(0, 1, -1, 0), FIG_A2)


@given(symplectic(), symplectic())
def test_derived_matrices_are_symplectic(A1, A2):
    for A in (derive_a3(A1, A2), derive_a4(A1, A2), derive_a5(A1, A2)):
        assert abs(A.det - 1) < 1e-9


def test_optimal_a1_examples():
    assert optimal_a1(2, 2) == FIG_A1
    assert_matrix(optimal_a1(2, 2), [[2, 2], [-0.25, 0.25]], tol=0)
    assert optimal_a1(1, 0) == IDENTITY
    A = optimal_a1(3, 4)
    assert (A.c, A.d) == pytest.approx((-4 / 25, 3 / 25), abs=1e-15)
    with pytest.raises(DegenerateInput):
        optimal_a1(0, 0)


def _completion_norms(a1, b1, s):
    # every completion is a particular solution plus s * (a1, b1)
    if abs(a1) >= abs(b1):
        c0, d0 = 0.0, 1.0 / a1
    else:
        c0, d0 = -1.0 / b1, 0.0
    c = c0 + s * a1
    d = d0 + s * b1
    assert np.allclose(a1 * d - b1 * c, 1.0)
    return c * c + d * d


def test_optimal_a1_is_minimal_by_grid_search():
    rng = np.random.default_rng(2024)
    for _ in range(12):
        a1, b1 = rng.uniform(-3, 3, size=2)
        A = optimal_a1(a1, b1)
        best = A.c ** 2 + A.d ** 2
        s = np.linspace(-3, 3, 200001)
        margin = _completion_norms(a1, b1, s).min() - best
        assert margin >= -1e-13 * best


def test_lfm_a2_examples():
    assert_matrix(lfm_a2(0.5, 0.5, 1, 2, 2), [[0, 0.5], [-2, 1]], tol=0)
    for beta in (0.1, 1.0, 7.0):
        assert lfm_a2(beta, 0.3, 2.0, 1.5, 1.5).a == 0
    A = lfm_a2(1, 0.5, 0, 1, 2)
    assert (A.a, A.c) == pytest.approx((3 / 25, -2))
    with pytest.raises(ZeroEntry):
        lfm_a2(1, 0, 1, 1, 1)


@given(st.floats(-3, 3), finite, finite, st.floats(-3, 3), finite)
@settings(max_examples=60)
def test_lfm_a2_meets_impulse_condition(beta, a1, b1, d2, b2):
    A1 = optimal_a1(a1, b1)
    A2 = lfm_a2(beta, b2, d2, a1, b1)
    scale = 1 + abs(beta * b2) * (A1.c ** 2 + A1.d ** 2)
    assert abs(impulse_residual(beta, A1, A2)) < 1e-12 * scale


def test_resolution_bound_values():
    assert resolution_bound(FIG_A1, FIG_A2) == 1 / 1024
    assert resolution_bound(WD_A1, L1) == 1 / 16
    A2 = SymplecticMatrix(1, 0.3, 0, 1)
    assert resolution_bound(WD_A1, A2) == pytest.approx(0.3 ** 2 / 16)


def test_superresolution_flags():
    assert superresolution_flags(FIG_A1, FIG_A2) == (True, True)
    assert superresolution_flags(FIG_A1, lfm_a2(0.5, 1.0, 1, 2, 2))[0] is False
    assert superresolution_flags(WD_A1, FIG_A2)[1] is False


def test_auxiliary_conjugations():
    assert_matrix(conjugate_by(N, FIG_A2), [[0, -0.5], [2, 1]])
    assert_matrix(conjugate_by(P(2.0), FIG_A2), [[0, 0.5], [-2, 4]])


def test_random_symplectic_entries_nonzero():
    rng = np.random.default_rng(0)
    for _ in range(50):
        A = random_symplectic(rng)
        assert min(abs(A.a), abs(A.b), abs(A.c), abs(A.d)) >= 0.05
