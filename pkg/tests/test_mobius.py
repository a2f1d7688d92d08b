"""Fractional linear maps: group laws, jets, poles, serialization.

Jet coefficients are checked against central differences of the plain
point map, which never touches the closed-form derivative code.
"""

import cmath

import numpy as np
import pytest

from conformal2d import (
    ComposedMap,
    DomainError,
    ExpMap,
    MobiusMap,
    PoleError,
    PolynomialMap,
    Vec2,
    compose,
    map_from_dict,
    map_to_dict,
)


def test_normalization():
    m = MobiusMap(2.0, 0.0, 0.0, 2.0)
    assert m.a * m.d - m.b * m.c == pytest.approx(1.0, abs=1e-15)
    assert m.apply_complex(0.7 + 0.1j) == pytest.approx(0.7 + 0.1j, abs=1e-15)


def test_degenerate_matrix_rejected():
    with pytest.raises(ValueError):
        MobiusMap(1.0, 2.0, 2.0, 4.0)


def test_pole_guard():
    m = MobiusMap(1.0, 0.0, 1.0, -2.0)
    assert m.pole == pytest.approx(2.0 + 0.0j, abs=1e-15)
    with pytest.raises(PoleError):
        m.apply_complex(2.0 + 0.0j)


def test_compose_is_matrix_product():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a1, b1, c1, d1, a2, b2, c2, d2 = (
            complex(rng.normal(), rng.normal()) for _ in range(8))
        if abs(a1 * d1 - b1 * c1) < 0.1 or abs(a2 * d2 - b2 * c2) < 0.1:
            continue
        m1 = MobiusMap(a1, b1, c1, d1)
        m2 = MobiusMap(a2, b2, c2, d2)
        m = compose(m1, m2)
        assert isinstance(m, MobiusMap)
        z = complex(rng.normal(), rng.normal())
        want = m1.apply_complex(m2.apply_complex(z))
        assert m.apply_complex(z) == pytest.approx(want, abs=1e-12)


def test_compose_conjugating_flag_xor():
    inv = MobiusMap.sphere_inversion(Vec2(0.0, 0.0), 1.0)
    rot = MobiusMap.rotation(0.9)
    assert compose(inv, inv).conjugating is False
    assert compose(inv, rot).conjugating is True
    assert compose(rot, inv).conjugating is True
    z = 0.8 + 0.4j
    got = compose(inv, rot).apply_complex(z)
    want = inv.apply_complex(rot.apply_complex(z))
    assert got == pytest.approx(want, abs=1e-14)


def test_inverse_round_trip():
    m = MobiusMap(1.0 + 0.5j, 0.3, -0.2j, 1.0, conjugating=True)
    z = 1.1 - 0.7j
    back = m.inverse().apply_complex(m.apply_complex(z))
    assert back == pytest.approx(z, abs=1e-13)


def test_mobius_jet_matches_finite_differences():
    m = MobiusMap(1.0, 2.0 - 1.0j, 0.5j, 1.5)
    z = 0.4 - 0.9j
    j = m.jet(z)
    h = 1e-3  # second differences lose eps/h^2, so keep h coarse
    vals = [m.apply_complex(z + k * h) for k in (-2, -1, 0, 1, 2)]
    d1 = (vals[0] - 8 * vals[1] + 8 * vals[3] - vals[4]) / (12 * h)
    d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * h * h)
    assert j.value == pytest.approx(vals[2], abs=1e-15)
    assert j.d1 == pytest.approx(d1, abs=1e-9)
    assert j.d2 == pytest.approx(d2, abs=1e-8)


def test_sphere_inversion_geometry():
    center, radius = Vec2(0.5, -0.25), 1.5
    m = MobiusMap.sphere_inversion(center, radius)
    assert m.conjugating
    # the sphere is fixed pointwise and the map is an involution
    on_sphere = Vec2(center.x1 + radius, center.x2)
    img = m.apply(on_sphere)
    assert (img.x1, img.x2) == pytest.approx((on_sphere.x1, on_sphere.x2), abs=1e-13)
    p = Vec2(1.7, 0.8)
    q = m.apply(m.apply(p))
    assert (q.x1, q.x2) == pytest.approx((p.x1, p.x2), abs=1e-13)
    with pytest.raises(PoleError):
        m.apply(center)


def test_unit_inversion_is_x_over_norm2():
    m = MobiusMap.sphere_inversion(Vec2(0.0, 0.0), 1.0)
    p = Vec2(0.3, 0.4)
    img = m.apply(p)
    assert img.x1 == pytest.approx(0.3 / 0.25, abs=1e-14)
    assert img.x2 == pytest.approx(0.4 / 0.25, abs=1e-14)


def test_jacobian_orthogonal_factor():
    m = MobiusMap(1.0, 0.0, 0.3 - 0.2j, 1.0)
    jd = m.jacobian(Vec2(0.6, -0.1))
    o = jd.orthogonal.as_array()
    assert np.abs(o.T @ o - np.eye(2)).max() < 1e-12
    # conformal factor ties the real Jacobian to |psi'|^2
    det = np.linalg.det(jd.matrix)
    assert det == pytest.approx(abs(m.jet(0.6 - 0.1j).d1) ** 2, rel=1e-12)


def test_polynomial_jet_exact():
    f = PolynomialMap([1.0, 0.0, 2.0, 0.5j])
    z = 0.7 + 0.2j
    j = f.jet(z)
    assert j.value == pytest.approx(1.0 + 2.0 * z * z + 0.5j * z**3, abs=1e-14)
    assert j.d1 == pytest.approx(4.0 * z + 1.5j * z * z, abs=1e-13)
    assert j.d2 == pytest.approx(4.0 + 3.0j * z, abs=1e-13)
    assert j.d3 == pytest.approx(3.0j, abs=1e-13)


def test_polynomial_critical_point_guard():
    f = PolynomialMap([0.0, 0.0, 1.0])
    with pytest.raises(DomainError):
        f.jet(0.0 + 0.0j)


def test_exp_map_jets():
    f = ExpMap()
    z = 0.3 + 1.1j
    j = f.jet(z)
    for d in (j.value, j.d1, j.d2, j.d3):
        assert d == pytest.approx(cmath.exp(z), abs=1e-14)


def test_composed_map_chain_rule():
    outer = ExpMap()
    inner = PolynomialMap([0.0, 1.0, 0.25])
    m = compose(outer, inner)
    assert isinstance(m, ComposedMap)
    z = 0.2 - 0.3j
    j = m.jet(z)
    h = 1e-5
    vals = [m.apply_complex(z + k * h) for k in (-2, -1, 0, 1, 2)]
    d1 = (vals[0] - 8 * vals[1] + 8 * vals[3] - vals[4]) / (12 * h)
    assert j.value == pytest.approx(cmath.exp(z + 0.25 * z * z), abs=1e-14)
    assert j.d1 == pytest.approx(d1, abs=1e-8)


def test_composed_with_conjugating_outer():
    outer = MobiusMap.sphere_inversion(Vec2(0.0, 0.0), 1.0)
    inner = PolynomialMap([0.5, 1.0, 0.1])
    m = compose(outer, inner)
    assert m.conjugating
    p = Vec2(0.9, 0.4)
    got = m.apply(p)
    want = outer.apply(inner.apply(p))
    assert (got.x1, got.x2) == pytest.approx((want.x1, want.x2), abs=1e-13)


def test_serialization_round_trip():
    maps = [
        MobiusMap(1.0 + 0.5j, 0.3, -0.2j, 1.0, conjugating=True),
        PolynomialMap([0.1, 1.0, 0.0, 0.25j]),
        ExpMap(),
    ]
    z = 0.5 + 0.25j
    for m in maps:
        m2 = map_from_dict(map_to_dict(m))
        assert m2.jet(z).value == pytest.approx(m.jet(z).value, abs=1e-15)
        assert m2.jet(z).d2 == pytest.approx(m.jet(z).d2, abs=1e-15)
