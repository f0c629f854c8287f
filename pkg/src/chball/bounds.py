r"""Explicit Margulis-type constants for complex hyperbolic n-manifolds.

The inequality chain closes when, for the chosen pigeonhole parameter Q and
displacement threshold delta,

    F(delta, Q, n) = [(e^{x} - 1) e^{delta/2} + 1] [(e^{x} - 1) e^{delta/2} + 2 pi / Q]

with x = (delta/2) Q^{n-1} stays at or below omega, the positive root of
2 w (2 w^2 + 1) = 1.  With Q = 17 and delta = 0.02 / 17^{n-1} one gets
F ~ 0.3834 < omega ~ 0.3854, so every such manifold contains an embedded
Bergman ball of radius delta/2.

:func:`max_delta` searches (Q, delta) for a larger feasible delta, and
:func:`proof_chain` runs the chain on a concrete matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import optimize

from chball.approx import ApproxMode, FiniteOrderApprox, finite_order_approx
from chball.errors import InvalidInputError
from chball.isometry import ComplexIsometry, verify_su
from chball.norms import (
    UnitaryDistanceCertificate,
    dist_to_unitary,
    geometric_sum,
    operator_norm,
)

PAPER_Q = 17
PAPER_DELTA_NUMERATOR = 0.02
EXTENDED_DPS = 50
OVERFLOW_EXPONENT = 700.0


def _bisect_root(f, lo: float, hi: float, tol: float) -> float:
    root = optimize.bisect(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=2000)
    if abs(f(root)) > tol:
        # step to the float neighbour with the smaller residual
        cands = [root, np.nextafter(root, lo), np.nextafter(root, hi)]
        root = min(cands, key=lambda x: abs(f(x)))
    return float(root)


def tau_constant(tol: float = 1e-12) -> float:
    """Positive root of 2 t (t + 1)^2 = 1 (about 0.2971)."""
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    return _bisect_root(lambda t: 2.0 * t * (t + 1.0) ** 2 - 1.0, 0.0, 1.0, tol)


def omega_constant(tol: float = 1e-12) -> float:
    """Positive root of 2 w (2 w^2 + 1) = 1 (about 0.3854)."""
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    return _bisect_root(lambda w: 2.0 * w * (2.0 * w * w + 1.0) - 1.0, 0.0, 1.0, tol)


#: lower bounds for ||A|| ||A - Id|| selectable with ``--omega``
OMEGA_CHOICES = {
    "fh": omega_constant,
    "martin-sqrt": lambda tol=1e-12: 1.0 / (2.0 * math.sqrt(2.0)),
    "martin-2s3": lambda tol=1e-12: 2.0 - math.sqrt(3.0),
}


def omega_value(kind: str = "fh") -> float:
    try:
        return OMEGA_CHOICES[kind]()
    except KeyError:
        raise InvalidInputError(f"unknown omega choice {kind!r}; pick one of {sorted(OMEGA_CHOICES)}") from None


@dataclass(frozen=True)
class BoundConstants:
    tau: float
    omega: float
    tol: float

    @classmethod
    def compute(cls, tol: float = 1e-12) -> "BoundConstants":
        return cls(tau_constant(tol), omega_constant(tol), tol)


def _exponent(n: int, mode) -> int:
    mode = mode if isinstance(mode, ApproxMode) else ApproxMode(mode)
    return n - 1 if mode is ApproxMode.PROJECTIVE else n


def theorem_bound(delta, Q, n: int, mode=ApproxMode.PROJECTIVE, extended: bool | None = None):
    """F(delta, Q, n), the right end of the inequality chain.

    ``mode`` fixes the pigeonhole exponent: projective (q <= Q^{n-1}) is the
    published chain, full-spectrum uses q <= Q^n.  Evaluation switches to
    50-digit arithmetic for tiny arguments or n >= 6; pass ``extended=True``
    to get an ``mpmath.mpf`` back.
    """
    if int(n) != n or n < 2:
        raise InvalidInputError(f"n must be an integer >= 2, got {n!r}")
    if not delta > 0:
        raise InvalidInputError(f"delta must be positive, got {delta!r}")
    if not Q > 1:
        raise InvalidInputError(f"Q must exceed 1, got {Q!r}")
    k = _exponent(n, mode)
    if extended or (extended is None and (n >= 6 or float(delta) * float(Q) ** k < 1e-6)):
        with mpmath.workdps(EXTENDED_DPS):
            d = mpmath.mpf(delta)
            x = d / 2 * mpmath.mpf(Q) ** k
            if x > OVERFLOW_EXPONENT:
                return mpmath.inf if extended else math.inf
            g = mpmath.expm1(x) * mpmath.exp(d / 2)
            val = (g + 1) * (g + 2 * mpmath.pi / Q)
            return +val if extended else float(val)
    x = delta / 2 * float(Q) ** k
    if x > OVERFLOW_EXPONENT:
        return math.inf
    g = math.expm1(x) * math.exp(delta / 2)
    return (g + 1.0) * (g + 2.0 * math.pi / Q)


def chain_bound(r: float, q: int, Q: float) -> float:
    """[(r^q - 1) r + 1][(r^q - 1) r + 2 pi / Q] for a concrete r and order q."""
    g = math.expm1(q * math.log(r)) * r
    return (g + 1.0) * (g + 2.0 * math.pi / Q)


@dataclass(frozen=True)
class MargulisResult:
    n: int
    Q: float
    delta: float
    bound_value: float
    omega: float
    feasible: bool

    @property
    def ball_radius(self) -> float:
        return self.delta / 2.0


def paper_delta(n: int) -> float:
    return PAPER_DELTA_NUMERATOR / PAPER_Q ** (n - 1)


def paper_ball_radius(n: int) -> float:
    return paper_delta(n) / 2.0


def verify_paper_constant(n: int, omega: str = "fh", mode=ApproxMode.PROJECTIVE) -> MargulisResult:
    """Evaluate the chain at Q = 17, delta = 0.02 / 17^{n-1}."""
    if int(n) != n or n < 2:
        raise InvalidInputError(f"n must be an integer >= 2, got {n!r}")
    w = omega_value(omega)
    delta = paper_delta(n)
    val = theorem_bound(delta, PAPER_Q, n, mode)
    return MargulisResult(n, float(PAPER_Q), delta, val, w, val <= w)


def _delta_for_Q(Q: float, n: int, w: float, mode) -> float:
    """Largest delta with F(delta, Q, n) <= w, or 0 when none exists."""
    if 2.0 * math.pi / Q >= w:
        return 0.0
    k = _exponent(n, mode)
    f = lambda d: theorem_bound(d, Q, n, mode) - w
    hi = 2.0 / float(Q) ** k
    while f(hi) <= 0:
        hi *= 2.0
    lo = 0.0
    # bisect to adjacent floats so F(lo) <= w < F(hi)
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return lo


def max_delta(
    n: int,
    Q_min: float = 2.0,
    Q_max: float = 64.0,
    tol: float = 1e-9,
    omega: str = "fh",
    mode=ApproxMode.PROJECTIVE,
) -> MargulisResult:
    """Pick (Q, delta) with the largest feasible delta.

    Every integer Q in [Q_min, Q_max] (plus the endpoints) is scanned, the
    best one is refined by golden-section search, and delta(Q) is found by
    bisection on the monotone map delta -> F(delta, Q, n).  Ties go to the
    smaller Q.  When no Q in range admits a delta (2 pi / Q >= omega for all
    of them) the result has ``feasible=False`` and delta = 0.
    """
    if int(n) != n or n < 2:
        raise InvalidInputError(f"n must be an integer >= 2, got {n!r}")
    if not (1 < Q_min <= Q_max):
        raise InvalidInputError(f"need 1 < Q_min <= Q_max, got [{Q_min}, {Q_max}]")
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    w = omega_value(omega)
    grid = sorted({float(Q_min), float(Q_max), *map(float, range(math.ceil(Q_min), math.floor(Q_max) + 1))})
    scores = {Q: _delta_for_Q(Q, n, w, mode) for Q in grid}
    # deterministic reduction: maximise (delta, -Q)
    best_Q = max(grid, key=lambda Q: (scores[Q], -Q))
    if scores[best_Q] <= 0.0:
        return MargulisResult(n, best_Q, 0.0, math.nan, w, False)

    i = grid.index(best_Q)
    if 0 < i < len(grid) - 1:
        a, b, c = grid[i - 1], best_Q, grid[i + 1]
        if scores[a] > 0 and scores[c] > 0:
            scale = scores[best_Q]
            res = optimize.minimize_scalar(
                lambda Q: -_delta_for_Q(Q, n, w, mode) / scale,
                bracket=(a, b, c),
                method="golden",
                tol=1e-10,
            )
            if a <= res.x <= c:
                d = _delta_for_Q(float(res.x), n, w, mode)
                if (d, -res.x) > (scores[best_Q], -best_Q):
                    best_Q, scores[best_Q] = float(res.x), d
    delta = scores[best_Q]
    val = theorem_bound(delta, best_Q, n, mode)
    if w - val > tol:
        raise ArithmeticError(f"bisection stopped {w - val:.3e} below omega (tol {tol:.1e})")
    return MargulisResult(n, best_Q, delta, val, w, val <= w)


@dataclass(frozen=True, eq=False)
class ChainReport:
    """One run of the inequality chain on a concrete isometry.

    ``normalized`` is A divided by the phase used in the finite-order step,
    the representative whose q-th power is compared with Id.
    """

    certificate: UnitaryDistanceCertificate
    finite_order: FiniteOrderApprox
    normalized: np.ndarray
    q: int
    power_norm: float
    power_gap: float
    power_check_lhs: float
    power_check_rhs: float
    chain_value: float

    @property
    def r(self) -> float:
        return self.certificate.r

    @property
    def measured(self) -> float:
        """||A^q|| ||A^q - Id|| for the normalised representative."""
        return self.power_norm * self.power_gap


def proof_chain(A, Q: float = PAPER_Q, mode=ApproxMode.PROJECTIVE) -> ChainReport:
    """dist_to_unitary -> finite-order approximation -> power bound, on one matrix.

    The origin-stabilising witness O is approximated as an (n+1) x (n+1)
    unitary; in projective mode the phase it is divided by is also divided
    out of A, which leaves the action on the ball unchanged.
    """
    A = A if isinstance(A, ComplexIsometry) else verify_su(A)
    cert = dist_to_unitary(A)
    fo = finite_order_approx(cert.witness, Q, mode)
    A_norm = A.mat / fo.phase
    O_norm = cert.witness / fo.phase
    size = A.n + 1
    Aq = np.linalg.matrix_power(A_norm, fo.q)
    Oq = np.linalg.matrix_power(O_norm, fo.q)
    lhs = operator_norm(Aq - Oq)
    rhs = geometric_sum(cert.r, fo.q) * operator_norm(A_norm - O_norm)
    return ChainReport(
        certificate=cert,
        finite_order=fo,
        normalized=A_norm,
        q=fo.q,
        power_norm=operator_norm(Aq),
        power_gap=operator_norm(Aq - np.eye(size)),
        power_check_lhs=lhs,
        power_check_rhs=rhs,
        chain_value=chain_bound(cert.r, fo.q, Q) if cert.r > 1 else 2.0 * math.pi / Q,
    )

