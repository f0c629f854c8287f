"""Randomised invariant suites behind ``chball verify``.

Every check instance draws from its own generator seeded by
(seed, suite, check, index), so a failing instance can be replayed alone
from its serialised record.  A check returns a *margin*: non-negative means
the invariant held with that much room (after the stated slack).
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from chball import approx, bounds, hermitian_core as hc, isometry as iso, norms, volume


def instance_rng(seed: int, suite: str, check: str, index: int) -> np.random.Generator:
    key = zlib.crc32(f"{suite}/{check}".encode())
    return np.random.default_rng(np.random.SeedSequence([seed, key, index]))


def random_ball_point(rng, n: int, radius: float = 0.95) -> np.ndarray:
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z) * radius * rng.random() ** (1.0 / (2 * n))


def random_vector(rng, size: int) -> np.ndarray:
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


# --------------------------------------------------------------------- hermitian


def _conjugate_symmetry(rng, slack):
    n = int(rng.integers(1, 7))
    z, w = random_vector(rng, n + 1), random_vector(rng, n + 1)
    a, b = hc.herm_product(z, w), hc.herm_product(w, z)
    scale = np.linalg.norm(z) * np.linalg.norm(w)
    return slack - abs(a - b.conjugate()) / scale, {"n": n}


def _lift_roundtrip(rng, slack):
    n = int(rng.integers(1, 7))
    p = random_ball_point(rng, n)
    back = hc.project_to_ball(hc.standard_lift(p)).coords
    return slack - float(np.max(np.abs(back - p))), {"n": n}


def _metric_axioms(rng, slack):
    n = int(rng.integers(1, 7))
    x, y, z = (random_ball_point(rng, n) for _ in range(3))
    d = hc.bergman_distance
    dxy, dyx, dxz, dyz = d(x, y), d(y, x), d(x, z), d(y, z)
    margins = [
        min(dxy, dxz, dyz),
        slack - abs(dxy - dyx),
        dxy + dyz + 10 * slack - dxz,
        slack - d(x, x),
    ]
    return min(margins), {"n": n}


def _projective_invariance(rng, slack):
    n = int(rng.integers(1, 7))
    x, y = random_ball_point(rng, n), random_ball_point(rng, n)
    c1, c2 = random_vector(rng, 2)
    lx = hc.standard_lift(x).scaled(c1)
    ly = hc.standard_lift(y).scaled(c2)
    ref = hc.bergman_distance(x, y)
    return slack * max(1.0, ref) - abs(hc.lift_distance(lx, ly) - ref), {"n": n}


# ---------------------------------------------------------------------- isometry


def _distance_preserved(rng, slack):
    n = int(rng.integers(1, 5))
    A = iso.random_isometry(n, 1.0, rng=rng)
    p, q = random_ball_point(rng, n, 0.9), random_ball_point(rng, n, 0.9)
    before = hc.bergman_distance(p, q)
    after = hc.bergman_distance(iso.apply(A, p), iso.apply(A, q))
    return slack - abs(before - after), {"n": n}


def _group_closure(rng, slack):
    n = int(rng.integers(1, 6))
    A = iso.random_isometry(n, 1.0, rng=rng)
    B = iso.random_isometry(n, 1.0, rng=rng)
    res = iso.su_residuals(A.mat @ B.mat)
    tol = 10 * iso.UNITARITY_TOL
    return min(tol - res["j_unitarity"], 10 * iso.DET_TOL - res["determinant"]), {"n": n}


def _boost_eigenstructure(rng, slack):
    n = int(rng.integers(1, 6))
    r = 1.0 + float(rng.uniform(0.05, 3.0))
    w = random_vector(rng, n)
    B = iso.boost(iso.BoostParams(r, w / np.linalg.norm(w)))
    got = np.sort_complex(np.linalg.eigvals(B.mat))
    want = np.sort_complex(np.array([1.0 / r] + [1.0] * (n - 1) + [r], dtype=complex))
    return slack - float(np.max(np.abs(got - want))), {"n": n, "r": r}


def _classify_conjugation(rng, slack):
    n = int(rng.integers(1, 5))
    A = iso.random_isometry(n, 1.0, rng=rng)
    W = iso.random_isometry(n, 1.0, rng=rng)
    a = iso.classify(A)
    b = iso.classify(W.mat @ A.mat @ W.inverse().mat)
    amb = iso.IsometryClass.AMBIGUOUS
    ok = a == b or amb in (a, b)
    return (0.0 if ok else -1.0), {"n": n, "classes": [a.value, b.value]}


# ------------------------------------------------------------------------- norms


def _norm_conjugation(rng, slack):
    n = int(rng.integers(1, 6))
    A = iso.random_isometry(n, 1.0, rng=rng)
    W = iso.block_unitary(iso.random_unitary(n, rng=rng))
    conj = W @ A.mat @ W.conj().T
    return slack - abs(norms.operator_norm(conj) - norms.operator_norm(A)), {"n": n}


def _norm_at_least_one(rng, slack):
    n = int(rng.integers(1, 6))
    A = iso.random_isometry(n, 1.0, rng=rng)
    return norms.operator_norm(A) - 1.0 + slack, {"n": n}


def _submultiplicative(rng, slack):
    size = int(rng.integers(1, 7))
    M, N = (random_vector(rng, size * size).reshape(size, size) for _ in range(2))
    on = norms.operator_norm
    return on(M) * on(N) + slack - on(M @ N), {"size": size}


def _adjoint_norm(rng, slack):
    size = int(rng.integers(1, 7))
    M = random_vector(rng, size * size).reshape(size, size)
    on = norms.operator_norm
    return slack * max(1.0, on(M)) - abs(on(M) - on(M.conj().T)), {"size": size}


def _unitary_distance(rng, slack):
    n = int(rng.integers(1, 5))
    A = iso.random_isometry(n, 1.0, rng=rng)
    cert = norms.dist_to_unitary(A)
    return min(cert.bound + slack - cert.actual, cert.r + slack - norms.operator_norm(A)), {"n": n, "r": cert.r}


def _power_difference(rng, slack):
    n = int(rng.integers(1, 5))
    A = iso.random_isometry(n, 0.5, rng=rng)
    B = iso.random_unitary(n, rng=rng)
    q = int(rng.integers(2, 21))
    chk = norms.power_difference_bound_check(A, B, q, slack=slack)
    return chk.rhs + slack - chk.lhs, {"n": n, "q": q}


# ------------------------------------------------------------------------ approx


def brute_force_pigeonhole(thetas, Q: float):
    """All q <= Q^m meeting the certificate, by direct vectorised scan."""
    thetas = np.asarray(thetas, dtype=float)
    top = int(math.floor(Q ** thetas.size * (1 + 1e-12)))
    qs = np.arange(1, top + 1)
    scaled = np.outer(qs, thetas)
    err = np.max(np.abs(scaled - np.rint(scaled)), axis=1) / qs
    return qs[err <= 1.0 / (qs * Q) + approx.CERT_SLACK]


def _pigeonhole(rng, slack):
    m = int(rng.integers(1, 5))
    Q = int(rng.integers(2, 11))
    thetas = rng.random(m)
    rec = approx.dirichlet_approx(thetas, Q)
    cert = min(Q**m - rec.q, 1.0 / (rec.q * Q) + approx.CERT_SLACK - rec.max_err)
    oracle = brute_force_pigeonhole(thetas, Q)
    # the oracle must confirm the returned q and never come back empty
    agree = 0.0 if (oracle.size and rec.q in set(oracle.tolist())) else -1.0
    return min(cert, agree), {"m": m, "Q": Q, "q": rec.q}


def _finite_order(rng, slack):
    n = int(rng.integers(1, 6))
    A = iso.random_unitary(n, rng=rng)
    fo = approx.finite_order_approx(A, 17, approx.ApproxMode.PROJECTIVE)
    Bq = np.linalg.matrix_power(fo.B, fo.q)
    margins = [
        fo.bound + 1e-12 - fo.err,
        1e-9 - norms.operator_norm(Bq - np.eye(n)),
        slack - abs(fo.err - approx.sine_norm(fo.angle_errors)),
        17 ** (n - 1) - fo.q,
    ]
    return min(margins), {"n": n, "q": fo.q}


# ------------------------------------------------------------------------ bounds


def _bound_monotone(rng, slack):
    n = int(rng.integers(2, 9))
    Q = float(rng.uniform(2.0, 64.0))
    delta = float(10 ** rng.uniform(-12, 0)) / Q ** (n - 1)
    lo, hi = bounds.theorem_bound(delta, Q, n), bounds.theorem_bound(2 * delta, Q, n)
    return (hi - lo) if hi > lo else -1.0, {"n": n, "Q": Q, "delta": delta}


def _proof_chain(rng, slack):
    n = int(rng.integers(2, 4))
    delta = bounds.paper_delta(n)
    s = float(rng.uniform(0.0, delta / 2))
    u1 = iso.block_unitary(iso.random_unitary(n, rng=rng))
    u2 = iso.block_unitary(iso.random_unitary(n, rng=rng))
    core = iso.axis_boost(math.exp(s), n) if s > 0 else np.eye(n + 1)
    A = iso.verify_su(iso.normalize_det(u1 @ core @ u2))
    rep = bounds.proof_chain(A, bounds.PAPER_Q, approx.ApproxMode.PROJECTIVE)
    target = bounds.theorem_bound(delta, bounds.PAPER_Q, n)
    margins = [
        target + 1e-6 - rep.measured,
        rep.chain_value + slack - rep.measured,
        rep.power_check_rhs + slack - rep.power_check_lhs,
    ]
    return min(margins), {"n": n, "r": rep.r, "q": rep.q}


def _published_feasible(rng, slack):
    n = int(rng.integers(2, 11))
    res = bounds.verify_paper_constant(n)
    return res.omega - res.bound_value, {"n": n}


# ------------------------------------------------------------------------ volume


def _volume_quadrature(rng, slack):
    n = int(rng.integers(1, 5))
    r0 = float(rng.uniform(0.0, 2.0))
    c = 4.0**n * volume.sphere_volume(n) / 2.0
    integrand = lambda t: c * math.sinh(t / 2) ** (2 * n - 1) * math.cosh(t / 2)
    val, _ = integrate.quad(integrand, 0.0, r0, epsabs=0.0, epsrel=1e-13, limit=200)
    ref = volume.ball_volume(n, r0)
    return slack * ref - abs(val - ref), {"n": n, "r0": r0}


def _volume_small_radius(rng, slack):
    n = int(rng.integers(1, 9))
    r0 = 1e-4
    euclid = volume.sphere_volume(n) / (2 * n) * r0 ** (2 * n)
    ratio = volume.ball_volume(n, r0) / euclid
    return 1e-6 - abs(ratio - 1.0), {"n": n}


def _volume_monotone(rng, slack):
    n = int(rng.integers(1, 9))
    r0 = float(rng.uniform(0.0, 3.0))
    return volume.ball_volume(n, r0 + 1e-3) - volume.ball_volume(n, r0), {"n": n, "r0": r0}


@dataclass(frozen=True)
class Check:
    name: str
    fn: Callable
    slack: float


SUITES: dict[str, list[Check]] = {
    "hermitian": [
        Check("conjugate_symmetry", _conjugate_symmetry, 1e-12),
        Check("lift_roundtrip", _lift_roundtrip, 1e-12),
        Check("metric_axioms", _metric_axioms, 1e-10),
        Check("projective_invariance", _projective_invariance, 1e-10),
    ],
    "isometry": [
        Check("distance_preserved", _distance_preserved, 1e-9),
        Check("group_closure", _group_closure, 0.0),
        Check("boost_eigenstructure", _boost_eigenstructure, 1e-10),
        Check("classify_conjugation", _classify_conjugation, 0.0),
    ],
    "norms": [
        Check("conjugation_invariance", _norm_conjugation, 1e-10),
        Check("norm_at_least_one", _norm_at_least_one, 1e-12),
        Check("submultiplicative", _submultiplicative, 1e-10),
        Check("adjoint_norm", _adjoint_norm, 1e-10),
        Check("unitary_distance", _unitary_distance, 1e-9),
        Check("power_difference", _power_difference, 1e-9),
    ],
    "approx": [
        Check("pigeonhole", _pigeonhole, 0.0),
        Check("finite_order", _finite_order, 1e-10),
    ],
    "bounds": [
        Check("monotone", _bound_monotone, 0.0),
        Check("proof_chain", _proof_chain, 1e-9),
        Check("published_feasible", _published_feasible, 0.0),
    ],
    "volume": [
        Check("quadrature", _volume_quadrature, 1e-9),
        Check("small_radius", _volume_small_radius, 0.0),
        Check("monotone", _volume_monotone, 0.0),
    ],
}
SUITE_NAMES = tuple(SUITES) + ("all",)


@dataclass
class Outcome:
    suite: str
    check: str
    seed: int
    index: int
    margin: float
    detail: dict

    @property
    def passed(self) -> bool:
        return self.margin >= 0.0

    def replay_record(self, slack=None) -> dict:
        rec = {"suite": self.suite, "check": self.check, "seed": self.seed, "index": self.index}
        if slack is not None:
            rec["tol"] = slack
        return rec


@dataclass
class CheckReport:
    suite: str
    check: str
    samples: int
    failures: list[Outcome] = field(default_factory=list)
    worst: Outcome | None = None

    @property
    def passed(self) -> bool:
        return not self.failures


def _lookup(suite: str, check: str) -> Check:
    for c in SUITES[suite]:
        if c.name == check:
            return c
    raise KeyError(f"no check {check!r} in suite {suite!r}")


def run_instance(suite: str, check: str, seed: int, index: int, slack=None) -> Outcome:
    c = _lookup(suite, check)
    rng = instance_rng(seed, suite, check, index)
    try:
        margin, detail = c.fn(rng, c.slack if slack is None else slack)
    except Exception as exc:  # a crash is a failure to be replayed, not an abort
        margin, detail = -math.inf, {"error": f"{type(exc).__name__}: {exc}"}
    return Outcome(suite, check, seed, index, float(margin), detail)


def run_check(suite: str, check: str, samples: int, seed: int, slack=None) -> CheckReport:
    report = CheckReport(suite, check, samples)
    for i in range(samples):
        out = run_instance(suite, check, seed, i, slack)
        if report.worst is None or out.margin < report.worst.margin:
            report.worst = out
        if not out.passed:
            report.failures.append(out)
    return report


def run_suites(name: str, samples: int, seed: int, slack=None) -> list[CheckReport]:
    names = list(SUITES) if name == "all" else [name]
    return [run_check(s, c.name, samples, seed, slack) for s in names for c in SUITES[s]]
