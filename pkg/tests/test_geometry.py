"""Closed-form 2x2 spectral helpers against independent linear algebra."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conformal2d import EigenPair, Orthogonal2, Sym2, Vec2, conj_orth, eig2

finite = st.floats(min_value=-50.0, max_value=50.0,
                   allow_nan=False, allow_infinity=False)
angle = st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False)


def test_vec2_arithmetic():
    p = Vec2(3.0, -4.0)
    assert p.norm() == pytest.approx(5.0, abs=1e-15)
    q = p - Vec2(1.0, -1.0)
    assert (q.x1, q.x2) == (2.0, -3.0)
    assert Vec2.of((1.5, 2.5)) == Vec2(1.5, 2.5)


def test_vec2_rejects_non_finite():
    with pytest.raises(ValueError):
        Vec2(math.nan, 0.0)
    with pytest.raises(ValueError):
        Sym2(1.0, math.inf, 0.0)


def test_eig2_frozen_example():
    # mean 1, offset hypot(1, 1): eigenvalues 1 +/- sqrt(2)
    pair = eig2(Sym2(2.0, 1.0, 0.0))
    assert pair.lambda1 == pytest.approx(1.0 + math.sqrt(2.0), abs=1e-14)
    assert pair.lambda2 == pytest.approx(1.0 - math.sqrt(2.0), abs=1e-14)


def test_eigenpair_ordering_enforced():
    with pytest.raises(ValueError):
        EigenPair(0.0, 1.0)


@given(finite, finite, finite)
def test_eig2_matches_lapack(a11, a12, a22):
    m = Sym2(a11, a12, a22)
    ours = eig2(m)
    ref = np.linalg.eigvalsh(m.as_array())
    scale = 1.0 + max(abs(a11), abs(a12), abs(a22))
    assert abs(ours.lambda2 - ref[0]) <= 1e-12 * scale
    assert abs(ours.lambda1 - ref[1]) <= 1e-12 * scale


@given(finite, finite, finite, angle)
def test_conjugation_preserves_spectrum(a11, a12, a22, theta):
    m = Sym2(a11, a12, a22)
    o = Orthogonal2.rotation(theta)
    before, after = eig2(m), eig2(conj_orth(m, o))
    scale = 1.0 + max(abs(a11), abs(a12), abs(a22))
    assert abs(before.lambda1 - after.lambda1) <= 1e-12 * scale
    assert abs(before.lambda2 - after.lambda2) <= 1e-12 * scale


def test_conj_orth_matches_matrix_product():
    m = Sym2(1.0, 2.0, -3.0)
    o = Orthogonal2.rotation(0.7)
    got = conj_orth(m, o).as_array()
    want = o.as_array().T @ m.as_array() @ o.as_array()
    assert np.abs(got - want).max() < 1e-14


def test_orthogonal_validation():
    with pytest.raises(ValueError):
        Orthogonal2(1.0, 0.5, 0.0, 1.0)
    # reflections are fine: determinant sign is not constrained
    refl = Orthogonal2(1.0, 0.0, 0.0, -1.0)
    assert refl.defect() <= 1e-15
