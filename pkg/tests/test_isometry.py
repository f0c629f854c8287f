import math

import numpy as np
import pytest

from chball.errors import InvalidInputError, IsometryValidationError
from chball.hermitian_core import BallPoint, SignatureForm, bergman_distance
from chball.isometry import (
    BoostParams,
    IsometryClass,
    apply,
    axis_boost,
    block_unitary,
    boost,
    classify,
    dump_matrix,
    load_matrix,
    normalize_det,
    parse_matrix,
    random_isometry,
    random_isometry_with_shift,
    random_unitary,
    rotation_to_axis,
    su_residuals,
    verify_su,
)
from chball.norms import operator_norm
from chball.verification import random_ball_point


def heisenberg_translation(n, t=0.7):
    """Unipotent parabolic I + i t u u* J with u the null vector e_1 + e_{n+1}."""
    u = np.zeros(n + 1, dtype=complex)
    u[0] = u[-1] = 1
    return np.eye(n + 1) + 1j * t * np.outer(u, u.conj()) @ SignatureForm(n).J


def test_verify_identity():
    A = verify_su(np.eye(3))
    assert classify(A) is IsometryClass.IDENTITY


def test_verify_rejects():
    bad = np.eye(3)
    bad[0, 0] = 1.1
    with pytest.raises(IsometryValidationError) as exc:
        verify_su(bad)
    assert "j_unitarity" in exc.value.residuals
    with pytest.raises(IsometryValidationError) as exc:
        verify_su(block_unitary([[1j, 0], [0, 1]]))
    assert set(exc.value.residuals) == {"determinant"}
    with pytest.raises(IsometryValidationError):
        verify_su(np.eye(3)[:2])


def test_axis_boost_matrix_r2():
    expected = np.array([[1, 0, 0], [0, 1.25, 0.75], [0, 0.75, 1.25]])
    assert np.allclose(axis_boost(2.0, 2), expected, atol=1e-15)
    verify_su(axis_boost(2.0, 2))


def test_boost_moves_origin_along_direction():
    for r in (1.01, 2.0, 5.0):
        B = boost(BoostParams.axis(r, 3))
        p = apply(B, BallPoint.origin(3))
        assert np.allclose(p.coords, [(r * r - 1) / (r * r + 1), 0, 0], atol=1e-14)
        assert bergman_distance(BallPoint.origin(3), p) == pytest.approx(2 * math.log(r), rel=1e-12)
    rng = np.random.default_rng(0)
    w = rng.normal(size=4) + 1j * rng.normal(size=4)
    w /= np.linalg.norm(w)
    p = apply(boost(BoostParams(3.0, w)), BallPoint.origin(4))
    assert np.allclose(p.coords, 0.8 * w, atol=1e-14)


def test_boost_norms():
    for r in (1.001, 2.0, 10.0):
        B = boost(BoostParams.axis(r, 2))
        assert operator_norm(B) == pytest.approx(r, rel=1e-12)
        assert operator_norm(B.inverse().mat - np.eye(3)) == pytest.approx(r - 1, rel=1e-9)


def test_boost_params_validation():
    with pytest.raises(InvalidInputError):
        BoostParams.axis(1 + 1e-15, 2)
    with pytest.raises(InvalidInputError):
        BoostParams.axis(0.5, 2)
    with pytest.raises(InvalidInputError):
        BoostParams(2.0, [1.0, 1.0])


def test_boost_eigenstructure():
    rng = np.random.default_rng(2)
    for _ in range(50):
        n = int(rng.integers(1, 6))
        r = float(rng.uniform(1.05, 4))
        w = rng.normal(size=n) + 1j * rng.normal(size=n)
        B = boost(BoostParams(r, w / np.linalg.norm(w)))
        got = np.sort_complex(np.linalg.eigvals(B.mat))
        want = np.sort_complex(np.array([1 / r] + [1] * (n - 1) + [r], dtype=complex))
        assert np.max(np.abs(got - want)) <= 1e-10


def test_rotation_to_axis():
    assert np.allclose(rotation_to_axis([1, 0, 0]), np.eye(3))
    U = rotation_to_axis([0, 1, 0])
    assert np.allclose(U[:, 0], [0, 1, 0])
    assert np.allclose(np.abs(U), np.abs(U).round())  # permutation-phase
    rng = np.random.default_rng(4)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        w = rng.normal(size=n) + 1j * rng.normal(size=n)
        w /= np.linalg.norm(w)
        U = rotation_to_axis(w)
        assert np.linalg.norm(U[:, 0] - w) <= 1e-12
        assert np.linalg.norm(U.conj().T @ U - np.eye(n), 2) <= 1e-12
    with pytest.raises(InvalidInputError):
        rotation_to_axis([0, 0])


def test_apply_identity_and_invariance():
    rng = np.random.default_rng(6)
    p = random_ball_point(rng, 3)
    assert np.allclose(apply(np.eye(4), p).coords, p)
    for _ in range(500):
        n = int(rng.integers(1, 5))
        A = random_isometry(n, 1.0, rng=rng)
        x, y = random_ball_point(rng, n, 0.9), random_ball_point(rng, n, 0.9)
        d0 = bergman_distance(x, y)
        assert abs(bergman_distance(apply(A, x), apply(A, y)) - d0) <= 1e-9


def test_classify_examples():
    assert classify(np.eye(4)) is IsometryClass.IDENTITY
    assert classify(normalize_det(block_unitary(np.diag([1j, -1, 1])))) is IsometryClass.ELLIPTIC
    assert classify(boost(BoostParams.axis(2.0, 2))) is IsometryClass.LOXODROMIC
    assert classify(heisenberg_translation(2)) is IsometryClass.PARABOLIC
    # centre of SU(2,1) acts trivially
    assert classify(np.exp(2j * math.pi / 3) * np.eye(3)) is IsometryClass.IDENTITY


def test_boost_block_eigenvalues():
    got = np.sort(np.linalg.eigvals(np.array([[1.25, 0.75], [0.75, 1.25]])).real)
    assert np.allclose(got, [0.5, 2.0])


def test_classify_conjugation_invariant():
    rng = np.random.default_rng(9)
    for _ in range(200):
        n = int(rng.integers(1, 5))
        W = random_isometry(n, 1.0, rng=rng)
        Winv = W.inverse().mat
        for A in (
            random_isometry(n, 1.0, rng=rng).mat,
            normalize_det(block_unitary(random_unitary(n, rng=rng))),
            heisenberg_translation(n, float(rng.uniform(0.1, 2))),
        ):
            a, b = classify(A), classify(W.mat @ A @ Winv)
            if IsometryClass.AMBIGUOUS not in (a, b):
                assert a is b


def test_random_unitary():
    u = random_unitary(1, seed=3)
    assert u.shape == (1, 1) and abs(abs(u[0, 0]) - 1) <= 1e-12
    for n in (2, 5):
        U = random_unitary(n, seed=n)
        assert np.linalg.norm(U.conj().T @ U - np.eye(n), 2) <= 1e-12
        assert abs(abs(np.linalg.det(U)) - 1) <= 1e-12
    assert np.array_equal(random_unitary(4, seed=7), random_unitary(4, seed=7))


def test_random_unitary_haar_moment():
    # E|U_11|^2 = 1/n under Haar measure
    rng = np.random.default_rng(0)
    vals = [abs(random_unitary(3, rng=rng)[0, 0]) ** 2 for _ in range(4000)]
    assert np.mean(vals) == pytest.approx(1 / 3, abs=0.015)


def test_random_isometry():
    rng = np.random.default_rng(10)
    for _ in range(100):
        n = int(rng.integers(1, 5))
        A, s = random_isometry_with_shift(n, 1.5, rng=rng)
        assert operator_norm(A) == pytest.approx(math.exp(s), rel=1e-10)
        d = bergman_distance(BallPoint.origin(n), apply(A, BallPoint.origin(n)))
        assert d == pytest.approx(2 * s, abs=1e-9)
    assert np.array_equal(random_isometry(3, 1.0, seed=5).mat, random_isometry(3, 1.0, seed=5).mat)


def test_group_closure():
    rng = np.random.default_rng(12)
    for _ in range(200):
        n = int(rng.integers(1, 5))
        A, B = random_isometry(n, 1.0, rng=rng), random_isometry(n, 1.0, rng=rng)
        verify_su(A.mat @ B.mat, tol=1e-9, det_tol=1e-7)


def test_matrix_file_roundtrip(tmp_path):
    B = boost(BoostParams.axis(2.0, 2))
    path = tmp_path / "b.json"
    dump_matrix(B, path)
    assert np.allclose(load_matrix(path), B.mat)
    with pytest.raises(ValueError):
        parse_matrix('{"n": 2, "mat": [[1, 0]]}')
    with pytest.raises(ValueError):
        parse_matrix("[1, 2]")
    assert su_residuals(load_matrix(path))["j_unitarity"] <= 1e-14
