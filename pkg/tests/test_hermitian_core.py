import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chball.errors import InvalidInputError, NotInBallError
from chball.hermitian_core import (
    BallPoint,
    HermitianVector,
    PointClass,
    SignatureForm,
    bergman_distance,
    cross_ratio,
    herm_product,
    lift_distance,
    point_class,
    project_to_ball,
    standard_lift,
)
from chball.verification import random_ball_point, random_vector


def basis(size, k):
    v = np.zeros(size, dtype=complex)
    v[k] = 1
    return v


def test_signature_form():
    J = SignatureForm(3).J
    assert np.array_equal(J, np.diag([1.0, 1.0, 1.0, -1.0]))
    with pytest.raises(InvalidInputError):
        SignatureForm(0)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_pairing_on_basis(n):
    assert herm_product(basis(n + 1, n), basis(n + 1, n)) == -1
    assert herm_product(basis(n + 1, 0), basis(n + 1, 0)) == 1


def test_pairing_direct_sum():
    z = [0.5, 0, 1]
    assert herm_product(z, z) == pytest.approx(-0.75, abs=1e-15)


def test_pairing_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        herm_product([1, 0, 1], [1, 1])
    with pytest.raises(InvalidInputError):
        HermitianVector([1, 2, 3], SignatureForm(1))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_conjugate_symmetry(n, seed):
    rng = np.random.default_rng(seed)
    z, w = random_vector(rng, n + 1), random_vector(rng, n + 1)
    a, b = herm_product(z, w), herm_product(w, z)
    assert abs(a - b.conjugate()) <= 1e-12 * np.linalg.norm(z) * np.linalg.norm(w)


def test_standard_lift():
    assert np.array_equal(standard_lift(BallPoint.origin(3)).coords, [0, 0, 0, 1])
    assert np.array_equal(standard_lift([0.5, 0]).coords, [0.5, 0, 1])
    assert point_class(standard_lift([0.3, 0.4j])) is PointClass.NEGATIVE


def test_project_to_ball():
    assert np.allclose(project_to_ball([0, 0, 2]).coords, [0, 0])
    assert np.allclose(project_to_ball([0.5, 0, 1]).coords, [0.5, 0])
    with pytest.raises(NotInBallError):
        project_to_ball([1, 0, 0])
    with pytest.raises(NotInBallError):
        project_to_ball([1, 0, 1])  # null


def test_lift_project_roundtrip():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        p = random_ball_point(rng, n)
        back = project_to_ball(standard_lift(p)).coords
        assert np.max(np.abs(back - p)) <= 1e-12


def test_point_class():
    assert point_class(basis(3, 2)) is PointClass.NEGATIVE
    assert point_class([1, 0, 1]) is PointClass.NULL
    assert point_class(basis(3, 0)) is PointClass.POSITIVE
    # scale invariant
    assert point_class(1e-20 * np.array([1, 0, 1.0 + 1e-14])) is PointClass.NULL
    with pytest.raises(InvalidInputError):
        point_class([0, 0, 0])


def test_ball_rejects_boundary():
    with pytest.raises(NotInBallError):
        BallPoint([1.0, 0])
    with pytest.raises(NotInBallError):
        BallPoint([math.sqrt(1 - 1e-13), 0])
    BallPoint([0.999, 0])


def test_distance_examples():
    o = BallPoint.origin(2)
    assert bergman_distance(o, o) == 0
    assert bergman_distance(o, [0.5, 0]) == pytest.approx(math.log(3), rel=1e-14)
    assert bergman_distance(o, [0.5, 0]) == pytest.approx(1.0986123, abs=1e-7)
    for t in (1e-6, 0.1, 0.5, 0.9, 0.999):
        assert bergman_distance(o, [t, 0]) == pytest.approx(2 * math.atanh(t), rel=1e-12)
    for r in (1.0001, 1.5, 2.0, 7.0):
        t = (r * r - 1) / (r * r + 1)
        assert bergman_distance(o, [0, t]) == pytest.approx(2 * math.log(r), rel=1e-12)


def test_stable_formula_matches_direct_cross_ratio():
    rng = np.random.default_rng(3)
    for _ in range(500):
        n = int(rng.integers(1, 7))
        x, y = random_ball_point(rng, n), random_ball_point(rng, n)
        direct = 2 * math.acosh(math.sqrt(max(cross_ratio(standard_lift(x), standard_lift(y)), 1)))
        assert bergman_distance(x, y) == pytest.approx(direct, rel=1e-9, abs=1e-7)


def test_small_distances_are_accurate():
    # arccosh of a clamped cross-ratio would lose half the digits here
    o = BallPoint.origin(3)
    assert bergman_distance(o, [1e-9, 0, 0]) == pytest.approx(2e-9, rel=1e-12)
    assert bergman_distance([0.3, 0, 0], [0.3 + 1e-10, 0, 0]) == pytest.approx(2e-10 / (1 - 0.09), rel=1e-5)


def test_metric_axioms_sampled():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        x, y, z = (random_ball_point(rng, n) for _ in range(3))
        dxy = bergman_distance(x, y)
        assert dxy >= 0
        assert abs(dxy - bergman_distance(y, x)) <= 1e-10
        assert bergman_distance(x, z) <= dxy + bergman_distance(y, z) + 1e-9


def test_projective_invariance():
    rng = np.random.default_rng(8)
    for _ in range(300):
        n = int(rng.integers(1, 7))
        x, y = random_ball_point(rng, n), random_ball_point(rng, n)
        c = random_vector(rng, 2)
        ref = bergman_distance(x, y)
        got = lift_distance(standard_lift(x).scaled(c[0]), standard_lift(y).scaled(c[1]))
        assert abs(got - ref) <= 1e-10 * max(1, ref)
