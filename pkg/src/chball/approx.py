"""Dirichlet simultaneous approximation and finite-order approximation of unitaries."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from chball.errors import InvalidInputError, ResourceLimitError
from chball.norms import operator_norm

MAX_WORK = 10**7
CERT_SLACK = 1e-15
#: angles closer than this (mod 1) are approximated by the same fraction
ANGLE_MERGE_TOL = 1e-12
_CHUNK = 4096


@dataclass(frozen=True)
class RationalApprox:
    q: int
    p: tuple[int, ...]
    max_err: float
    Q: float
    m: int

    def certificate_holds(self) -> bool:
        return 1 <= self.q <= self.Q**self.m * (1 + 1e-12) and self.max_err <= 1.0 / (self.q * self.Q) + CERT_SLACK


def _record(thetas: np.ndarray, q: int, Q: float) -> RationalApprox:
    p = np.rint(q * thetas).astype(np.int64)
    err = float(np.max(np.abs(thetas - p / q))) if thetas.size else 0.0
    return RationalApprox(int(q), tuple(int(v) for v in p), err, float(Q), int(thetas.size))


def _brute_force(thetas: np.ndarray, Q: float) -> RationalApprox | None:
    """Smallest q <= Q^m meeting the certificate, scanning every denominator."""
    top = int(math.floor(Q**thetas.size * (1 + 1e-12)))
    for q in range(1, top + 1):
        rec = _record(thetas, q, Q)
        if rec.certificate_holds():
            return rec
    return None


def dirichlet_approx(thetas, Q: float) -> RationalApprox:
    """Common-denominator approximation p_i/q of angles theta_i in [0, 1].

    Walks q' = 0, 1, 2, ... dropping the fractional-part vector
    ({q' theta_1}, ..., {q' theta_m}) into a grid of ceil(Q)^m boxes; two
    multiples q1 < q2 landing in one box give q = q2 - q1 with every
    |q theta_i - p_i| < 1/ceil(Q).  The result is checked against the real
    ``Q`` and, should the grid answer miss it (non-integer Q), a direct
    scan over q <= Q^m supplies one.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if thetas.ndim != 1 or thetas.size < 1:
        raise InvalidInputError("need at least one angle")
    if np.any(thetas < 0) or np.any(thetas > 1) or not np.all(np.isfinite(thetas)):
        raise InvalidInputError("angles must lie in [0, 1]")
    if not Q > 1:
        raise InvalidInputError(f"Q must exceed 1, got {Q!r}")
    m = thetas.size
    cells = math.ceil(Q)
    total = cells**m
    if total > MAX_WORK:
        raise ResourceLimitError(
            f"pigeonhole walk needs ceil(Q)^m = {total} boxes (> {MAX_WORK}); use a smaller Q or fewer angles"
        )
    weights = cells ** np.arange(m, dtype=np.int64)
    seen: dict[int, int] = {}
    start = 0
    while start <= total:
        qs = np.arange(start, min(start + _CHUNK, total + 1), dtype=np.int64)
        frac = np.mod(np.outer(qs, thetas), 1.0)
        boxes = np.minimum((frac * cells).astype(np.int64), cells - 1) @ weights
        for q2, box in zip(qs.tolist(), boxes.tolist()):
            q1 = seen.setdefault(box, q2)
            if q1 != q2:
                rec = _record(thetas, q2 - q1, Q)
                if rec.certificate_holds():
                    return rec
                seen[box] = q2
        start += _CHUNK
    rec = _brute_force(thetas, Q)
    if rec is None:  # pragma: no cover - excluded by Minkowski's theorem
        raise ArithmeticError(f"no approximation found for Q={Q} and {m} angles")
    return rec


class ApproxMode(enum.Enum):
    FULL_SPECTRUM = "full-spectrum"
    PROJECTIVE = "projective"


@dataclass(frozen=True, eq=False)
class FiniteOrderApprox:
    """B with B^q = Id close to ``phase^{-1} A``.

    ``phase`` is 1 in full-spectrum mode; in projective mode it is the unit
    scalar dividing A so one eigenvalue becomes exactly 1.
    """

    B: np.ndarray
    q: int
    err: float
    mode: ApproxMode
    phase: complex
    rational: RationalApprox
    angle_errors: np.ndarray

    @property
    def bound(self) -> float:
        return 2.0 * math.pi / (self.q * self.rational.Q)


def _as_mode(mode) -> ApproxMode:
    return mode if isinstance(mode, ApproxMode) else ApproxMode(mode)


def unitary_angles(A) -> tuple[np.ndarray, np.ndarray]:
    """Angles theta_j in [0, 1) (ascending) and unitary V with A = V diag(e^{2 pi i theta}) V*."""
    A = np.asarray(A, dtype=complex)
    T, V = scipy.linalg.schur(A, output="complex")
    eig = np.diag(T)
    theta = np.mod(np.angle(eig) / (2 * math.pi), 1.0)
    theta[theta >= 1.0] = 0.0
    order = np.argsort(theta, kind="stable")
    return theta[order], V[:, order]


def finite_order_approx(A, Q: float, mode=ApproxMode.PROJECTIVE) -> FiniteOrderApprox:
    """Replace the unitary A by a nearby unitary of finite order.

    A = V diag(e^{2 pi i theta_j}) V*; the distinct angles go through
    :func:`dirichlet_approx` and B = V diag(e^{2 pi i p_j / q}) V*.  In
    projective mode A is first divided by its eigenvalue of largest angle,
    so that angle becomes 0 and only the others are approximated.  Either
    way ||A' - B|| = 2 max_j |sin(pi (theta_j - p_j/q))| <= 2 pi / (q Q),
    with A' = A / phase.
    """
    mode = _as_mode(mode)
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {A.shape}")
    size = A.shape[0]
    if operator_norm(A.conj().T @ A - np.eye(size)) > 1e-10:
        raise InvalidInputError("input matrix is not unitary to 1e-10")
    theta, V = unitary_angles(A)
    phase = 1.0 + 0j
    if mode is ApproxMode.PROJECTIVE:
        top = theta[-1]
        phase = complex(np.exp(2j * math.pi * top))
        theta = np.mod(theta - top, 1.0)
        theta[(theta <= ANGLE_MERGE_TOL) | (theta >= 1.0 - ANGLE_MERGE_TOL)] = 0.0
        theta[-1] = 0.0

    # one representative per distinct angle, so repeated eigenvalues share p_j
    reps: list[float] = []
    slot = np.empty(size, dtype=int)
    for j, t in enumerate(theta):
        for k, u in enumerate(reps):
            if abs(t - u) <= ANGLE_MERGE_TOL:
                slot[j] = k
                break
        else:
            slot[j] = len(reps)
            reps.append(float(t))
    projective = mode is ApproxMode.PROJECTIVE
    free = [k for k, u in enumerate(reps) if not (projective and u == 0.0)]
    num = np.zeros(len(reps), dtype=np.int64)
    q = 1
    if free:
        rat = dirichlet_approx([reps[k] for k in free], Q)
        q = rat.q
        num[free] = rat.p
    fracs = num[slot] / q
    angle_errors = theta - fracs
    # the pinned slot (last, after sorting) is exact in projective mode
    kept = slice(0, size - 1) if projective else slice(0, size)
    rat = RationalApprox(
        q,
        tuple(int(v) for v in num[slot][kept]),
        float(np.max(np.abs(angle_errors[kept]), initial=0.0)),
        float(Q),
        size - 1 if projective else size,
    )
    B = (V * np.exp(2j * math.pi * fracs)) @ V.conj().T
    err = operator_norm(A / phase - B)
    return FiniteOrderApprox(B, q, err, mode, phase, rat, angle_errors)


def sine_norm(angle_errors) -> float:
    """2 max_j |sin(pi * delta_j)|, the closed form of ||A - B|| for commuting unitaries."""
    return 2.0 * float(np.max(np.abs(np.sin(math.pi * np.asarray(angle_errors)))))
