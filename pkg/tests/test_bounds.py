import math

import mpmath
import numpy as np
import pytest

from chball.approx import ApproxMode
from chball.bounds import (
    BoundConstants,
    chain_bound,
    max_delta,
    omega_constant,
    omega_value,
    paper_ball_radius,
    paper_delta,
    proof_chain,
    tau_constant,
    theorem_bound,
    verify_paper_constant,
)
from chball.errors import InvalidInputError
from chball.isometry import BoostParams, boost, random_isometry


def fixed_point(g, x0, iters=200):
    x = x0
    for _ in range(iters):
        x = g(x)
    return x


# frozen from fixed-point iteration (independent of the bisection code)
TAU_REF = fixed_point(lambda t: 1 / (2 * (t + 1) ** 2), 0.3)
OMEGA_REF = fixed_point(lambda w: 1 / (2 * (2 * w * w + 1)), 0.4)


def test_constants_against_fixed_point():
    assert tau_constant() == pytest.approx(TAU_REF, abs=1e-14)
    assert omega_constant() == pytest.approx(OMEGA_REF, abs=1e-14)
    # the familiar four-digit values are truncations; rounding gives ...72 and ...55
    assert math.floor(tau_constant() * 1e4) / 1e4 == 0.2971
    assert math.floor(omega_constant() * 1e4) / 1e4 == 0.3854
    assert round(tau_constant(), 4) == 0.2972
    assert round(omega_constant(), 4) == 0.3855
    c = BoundConstants.compute()
    assert (c.tau, c.omega) == (tau_constant(), omega_constant())


def test_constants_against_mpmath_root():
    w = mpmath.findroot(lambda x: 2 * x * (2 * x**2 + 1) - 1, 0.38)
    t = mpmath.findroot(lambda x: 2 * x * (x + 1) ** 2 - 1, 0.3)
    assert abs(omega_constant() - float(w)) <= 1e-15
    assert abs(tau_constant() - float(t)) <= 1e-15


def test_constant_tol_validation():
    with pytest.raises(InvalidInputError):
        tau_constant(0)
    with pytest.raises(InvalidInputError):
        omega_value("nope")


def test_omega_choices_ordered():
    assert omega_value("martin-2s3") < omega_value("martin-sqrt") < omega_value("fh")


def test_theorem_bound_published_value():
    val = theorem_bound(0.02 / 17, 17, 2)
    assert 0.3824 <= val <= 0.3844
    # [DERIVED] frozen from an 80-digit mpmath evaluation of the closed form
    assert val == pytest.approx(0.38347306, abs=1e-8)
    assert val <= omega_constant()


def test_theorem_bound_limits():
    for Q in (17, 20, 40):
        assert theorem_bound(1e-30, Q, 3) == pytest.approx(2 * math.pi / Q, rel=1e-12)
    assert theorem_bound(1.0, 17, 4) == math.inf


def test_theorem_bound_extended_matches_double():
    for n in (2, 3, 5):
        d = paper_delta(n)
        ext = theorem_bound(d, 17, n, extended=True)
        assert isinstance(ext, mpmath.mpf)
        assert float(ext) == pytest.approx(theorem_bound(d, 17, n, extended=False), rel=1e-13)


def test_theorem_bound_monotone():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(2, 7))
        Q = float(rng.uniform(2, 60))
        d = float(rng.uniform(1e-8, 1e-2))
        assert theorem_bound(d, Q, n) <= theorem_bound(d * 1.01, Q, n)


def test_theorem_bound_validation():
    with pytest.raises(InvalidInputError):
        theorem_bound(-1, 17, 2)
    with pytest.raises(InvalidInputError):
        theorem_bound(0.1, 1, 2)
    with pytest.raises(InvalidInputError):
        theorem_bound(0.1, 17, 1)


def test_full_spectrum_exponent_is_stricter():
    # with q <= Q^n the published (Q, delta) no longer clears omega
    res = verify_paper_constant(2, mode=ApproxMode.FULL_SPECTRUM)
    assert not res.feasible and res.bound_value > omega_constant()


@pytest.mark.parametrize("n", range(2, 11))
def test_published_constant_feasible(n):
    res = verify_paper_constant(n)
    assert res.feasible and res.bound_value <= res.omega
    assert res.bound_value == pytest.approx(0.38347306, abs=1e-3)


@pytest.mark.parametrize("n", range(2, 9))
def test_ball_radius_table(n):
    assert paper_ball_radius(n) * 17 ** (n - 1) == pytest.approx(0.01, rel=1e-15)


def test_chain_bound_matches_theorem_at_extreme_r():
    n, d = 2, paper_delta(2)
    r = math.exp(d / 2)
    assert chain_bound(r, 17 ** (n - 1), 17) == pytest.approx(theorem_bound(d, 17, n), rel=1e-12)


def test_max_delta_dominates_published():
    for n in range(2, 7):
        res = max_delta(n, 2, 64, 1e-9)
        assert res.feasible
        assert res.delta >= paper_delta(n)
        assert 0 <= res.omega - res.bound_value <= 1e-9
        assert 2 * math.pi / res.Q < res.omega


def test_max_delta_fixed_Q_and_infeasible():
    res = max_delta(2, 17, 17)
    assert res.Q == 17
    assert theorem_bound(res.delta, 17, 2) <= res.omega
    assert theorem_bound(np.nextafter(res.delta, 1), 17, 2) > res.omega or res.omega - res.bound_value < 1e-12
    bad = max_delta(2, 2, 16)
    assert not bad.feasible and bad.delta == 0
    with pytest.raises(InvalidInputError):
        max_delta(2, 10, 5)


def test_max_delta_deterministic():
    assert max_delta(3) == max_delta(3)


def test_proof_chain_on_boost():
    rep = proof_chain(boost(BoostParams.axis(1.001, 2)))
    assert rep.r == pytest.approx(1.001)
    assert rep.q >= 1
    assert rep.power_check_lhs <= rep.power_check_rhs + 1e-9
    assert rep.measured <= rep.chain_value + 1e-9


def test_proof_chain_random():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(2, 4))
        d = paper_delta(n)
        A = random_isometry(n, d / 2 * 0.999, rng=rng)
        rep = proof_chain(A)
        # the witness has n free angles after the phase is removed
        assert rep.q <= 17**n
        assert rep.measured <= theorem_bound(d, 17, n) + 1e-6
