r"""The signature-(n,1) Hermitian space and the unit-ball model of H^n_C.

Vectors of C^{n,1} are paired by

    <z, w> = z_1 conj(w_1) + ... + z_n conj(w_n) - z_{n+1} conj(w_{n+1}),

negative vectors project to the open unit ball B^{2n} in C^n, and the
Bergman distance between two ball points is read off from the Hermitian
cross-ratio of any of their lifts:

    cosh^2(rho/2) = <x,y><y,x> / (<x,x><y,y>).

Example
-------
>>> from chball.hermitian_core import BallPoint, bergman_distance
>>> round(bergman_distance(BallPoint([0, 0]), BallPoint([0.5, 0])), 7)
1.0986123
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from chball.errors import InvalidInputError, NotInBallError

#: points with |z|^2 >= 1 - BALL_MARGIN are rejected as boundary points
BALL_MARGIN = 1e-12
DEFAULT_CLASS_TOL = 1e-10


@dataclass(frozen=True)
class SignatureForm:
    """The diagonal form J = diag(1, ..., 1, -1) on C^{n+1}."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidInputError(f"complex dimension must be a positive integer, got {self.n!r}")

    @cached_property
    def J(self) -> np.ndarray:
        diag = np.ones(self.n + 1)
        diag[-1] = -1.0
        return np.diag(diag)

    @property
    def dim(self) -> int:
        return self.n + 1


def _complex_vector(coords) -> np.ndarray:
    arr = np.array(coords, dtype=complex).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class HermitianVector:
    """A vector of C^{n,1}; ``form`` defaults to the form matching its length."""

    coords: np.ndarray
    form: SignatureForm = None

    def __post_init__(self):
        coords = _complex_vector(self.coords)
        object.__setattr__(self, "coords", coords)
        if coords.size < 2:
            raise InvalidInputError("a vector of C^{n,1} needs at least two coordinates")
        if self.form is None:
            object.__setattr__(self, "form", SignatureForm(coords.size - 1))
        elif coords.size != self.form.dim:
            raise InvalidInputError(
                f"expected {self.form.dim} coordinates for n={self.form.n}, got {coords.size}"
            )

    @property
    def n(self) -> int:
        return self.form.n

    def scaled(self, c: complex) -> "HermitianVector":
        return HermitianVector(self.coords * c, self.form)

    def __repr__(self):
        return f"HermitianVector({self.coords.tolist()!r})"


@dataclass(frozen=True, eq=False)
class BallPoint:
    """An interior point of the unit ball B^{2n} in C^n."""

    coords: np.ndarray

    def __post_init__(self):
        coords = _complex_vector(self.coords)
        object.__setattr__(self, "coords", coords)
        if coords.size < 1:
            raise InvalidInputError("a ball point needs at least one coordinate")
        norm2 = float(np.vdot(coords, coords).real)
        if not norm2 < 1.0 - BALL_MARGIN:
            raise NotInBallError(f"|z|^2 = {norm2!r} is not inside the unit ball")

    @property
    def n(self) -> int:
        return self.coords.size

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.coords, self.coords).real)

    @classmethod
    def origin(cls, n: int) -> "BallPoint":
        return cls(np.zeros(n, dtype=complex))

    def __repr__(self):
        return f"BallPoint({self.coords.tolist()!r})"


class PointClass(enum.Enum):
    NEGATIVE = "negative"
    NULL = "null"
    POSITIVE = "positive"


def as_ball_point(p) -> BallPoint:
    return p if isinstance(p, BallPoint) else BallPoint(p)


def as_hermitian_vector(v) -> HermitianVector:
    return v if isinstance(v, HermitianVector) else HermitianVector(v)


def herm_product(z, w) -> complex:
    """The signature-(n,1) pairing <z, w>, linear in z and antilinear in w."""
    z = as_hermitian_vector(z)
    w = as_hermitian_vector(w)
    if z.form != w.form:
        raise InvalidInputError(f"dimension mismatch: n={z.n} vs n={w.n}")
    a, b = z.coords, w.coords
    return complex(np.dot(a[:-1], b[:-1].conj()) - a[-1] * np.conj(b[-1]))


def standard_lift(p) -> HermitianVector:
    """(z_1, ..., z_n) -> (z_1, ..., z_n, 1)."""
    p = as_ball_point(p)
    return HermitianVector(np.append(p.coords, 1.0 + 0j))


def project_to_ball(v) -> BallPoint:
    """Dehomogenise a negative vector by its last coordinate."""
    v = as_hermitian_vector(v)
    last = v.coords[-1]
    if last == 0:
        raise NotInBallError("last coordinate is zero; vector does not project into the ball")
    if not herm_product(v, v).real < 0:
        raise NotInBallError("vector is not negative; it projects to the boundary or outside")
    return BallPoint(v.coords[:-1] / last)


def point_class(v, tol: float = DEFAULT_CLASS_TOL) -> PointClass:
    """Sign of <v,v> measured against ``tol * |v|^2``."""
    v = as_hermitian_vector(v)
    scale = float(np.vdot(v.coords, v.coords).real)
    if scale == 0.0:
        raise InvalidInputError("the zero vector has no class")
    q = herm_product(v, v).real
    if q < -tol * scale:
        return PointClass.NEGATIVE
    if abs(q) <= tol * scale:
        return PointClass.NULL
    return PointClass.POSITIVE


def cross_ratio(x, y) -> float:
    """<x,y><y,x> / (<x,x><y,y>) for two negative vectors (any scaling)."""
    x = as_hermitian_vector(x)
    y = as_hermitian_vector(y)
    xy = herm_product(x, y)
    xx = herm_product(x, x).real
    yy = herm_product(y, y).real
    if not (xx < 0 and yy < 0):
        raise NotInBallError("cross-ratio distance needs two negative vectors")
    return (xy * xy.conjugate()).real / (xx * yy)


def lift_distance(x, y) -> float:
    """Bergman distance evaluated directly from two lifts (projectively invariant)."""
    return 2.0 * math.acosh(math.sqrt(max(cross_ratio(x, y), 1.0)))


def bergman_distance(x, y) -> float:
    """Bergman distance between two ball points.

    Uses sinh^2(rho/2) = cosh^2(rho/2) - 1, with the numerator of that
    difference expanded over the standard lifts so no ``1 - 1`` cancellation
    happens for nearby points:

        |<x,y>|^2 - <x,x><y,y> = |a - b|^2 - sum_{i<j} |a_i b_j - a_j b_i|^2.
    """
    a = as_ball_point(x).coords
    b = as_ball_point(y).coords
    if a.size != b.size:
        raise InvalidInputError(f"dimension mismatch: n={a.size} vs n={b.size}")
    d = a - b
    num = float(np.vdot(d, d).real)
    if a.size > 1:
        wedge = np.outer(a, b) - np.outer(b, a)
        num -= 0.5 * float(np.sum(np.abs(wedge) ** 2))
    den = (1.0 - float(np.vdot(a, a).real)) * (1.0 - float(np.vdot(b, b).real))
    # clamp: equivalent to max(q, 1) on the cross-ratio
    return 2.0 * math.asinh(math.sqrt(max(num / den, 0.0)))
