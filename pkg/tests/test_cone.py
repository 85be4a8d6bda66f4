import json

import numpy as np
import pytest

from setopt.cone import Cone, ConeError, Region, k2prime, orthant, preset


def test_scalarize_orthant_examples():
    k2 = orthant(2)
    assert k2.scalarize([-1.0, -2.0]) == -1.0
    assert k2.scalarize([0.0, -3.0]) == 0.0
    assert orthant(3).scalarize([3.0, -2.0, 1.0]) == 3.0


def test_classify_examples():
    k2 = orthant(2)
    assert k2.classify([0.0, 0.0]) is Region.BOUNDARY_NEG_K
    assert k2.classify([-1.0, -1.0]) is Region.INTERIOR_NEG_K
    assert k2.classify([1.0, -1.0]) is Region.EXTERIOR_NEG_K


def test_order_examples():
    k2 = orthant(2)
    assert k2.leq([1.0, 1.0], [2.0, 3.0]) and k2.lt([1.0, 1.0], [2.0, 3.0])
    y = np.array([0.3, -0.7])
    assert k2.leq(y, y) and not k2.lt(y, y)
    assert not k2.leq([0.0, 2.0], [1.0, 1.0])


def test_normalization_fixes_scale():
    cone = Cone([[2.0, 0.0], [0.0, 5.0]])
    assert np.allclose(np.abs(cone.dual_normals).sum(axis=1), 1.0)
    assert cone.scalarize([-1.0, -2.0]) == -1.0


def test_degenerate_cone_rejected():
    # the halfspaces y1 >= 3 y2 and y2 >= 3 y1 meet R^2_+ only at 0
    with pytest.raises(ConeError):
        Cone([[1.0, -3.0], [-3.0, 1.0], [1.0, 0.0], [0.0, 1.0]])


def test_not_pointed_rejected():
    with pytest.raises(ConeError):
        Cone([[1.0, 0.0]])  # a halfspace in R^2 is not pointed


def test_k2prime_wedge_membership():
    cone = k2prime()
    assert cone.leq([0.0, 0.0], [1.0, 1.0])       # diagonal inside
    assert not cone.leq([0.0, 0.0], [1.0, 0.1])   # below slope 1/3
    assert not cone.leq([0.0, 0.0], [0.1, 1.0])   # above slope 3


def test_json_roundtrip_and_presets():
    cone = k2prime()
    again = Cone.from_json(cone.to_json())
    assert np.array_equal(cone.dual_normals, again.dual_normals)
    assert np.array_equal(preset("orthant:3").dual_normals, np.eye(3))
    assert np.array_equal(preset("k2prime").dual_normals, cone.dual_normals)
    data = json.loads(cone.to_json())
    assert set(data) == {"dual_normals"}
    with pytest.raises(ConeError):
        preset("nope")


@pytest.fixture(params=["orthant2", "orthant3", "k2prime"])
def any_cone(request):
    return {"orthant2": orthant(2), "orthant3": orthant(3), "k2prime": k2prime()}[request.param]


def _member_interior(cone, y, tol):
    # direct halfspace test for int(-K): every normal strictly negative
    return all(float(w @ y) < -tol for w in cone.dual_normals)


def _member_closed(cone, y, tol):
    return all(float(w @ y) <= tol for w in cone.dual_normals)


def test_sign_membership_equivalence(any_cone):
    rng = np.random.default_rng(3)
    tol = any_cone.tolerance
    ys = rng.normal(scale=2.0, size=(2000, any_cone.m))
    for y in ys:
        region = any_cone.classify(y)
        if region is Region.INTERIOR_NEG_K:
            assert _member_interior(any_cone, y, tol)
        elif region is Region.EXTERIOR_NEG_K:
            assert not _member_closed(any_cone, y, -tol)


def test_subadditivity_homogeneity_monotonicity(any_cone):
    rng = np.random.default_rng(4)
    m = any_cone.m
    for _ in range(500):
        y, z = rng.normal(size=m), rng.normal(size=m)
        assert any_cone.scalarize(y + z) <= any_cone.scalarize(y) + any_cone.scalarize(z) + 1e-12
        lam = float(rng.uniform(0.1, 10.0))
        lhs, rhs = any_cone.scalarize(lam * y), lam * any_cone.scalarize(y)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))
        assert any_cone.scalarize(2.0 * y) == 2.0 * any_cone.scalarize(y)  # exact scaling
        if any_cone.lt(y, z):
            assert any_cone.scalarize(y) < any_cone.scalarize(z)
        if any_cone.leq(y, z):
            assert any_cone.scalarize(y) <= any_cone.scalarize(z) + 1e-12


def test_sup_norm_lipschitz(any_cone):
    rng = np.random.default_rng(5)
    m = any_cone.m
    for _ in range(500):
        y, z = rng.normal(size=m), rng.normal(size=m)
        gap = abs(any_cone.scalarize(y) - any_cone.scalarize(z))
        assert gap <= np.max(np.abs(y - z)) + 1e-12
