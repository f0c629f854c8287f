"""Volumes of Bergman balls and the resulting lower bound for manifold volume.

A geodesic ball of radius r0 in H^n_C has volume

    Vol(B(r0)) = (4^n sigma_{2n-1} / 2n) sinh^{2n}(r0 / 2),
    sigma_{2n-1} = 2 pi^n / (n-1)!.

For the embedded-ball radius r_n = 0.01/17^{n-1} the numbers are around
1e-13 and below, so the manifold bound is always evaluated with mpmath.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from chball.bounds import paper_ball_radius
from chball.errors import InvalidInputError

EXTENDED_DPS = 50

#: reference values displayed next to the bounds (smallest known volumes, n = 2)
COMPACT_MIN_VOLUME_N2 = 8 * math.pi**2
CUSPED_MIN_VOLUME_N2 = 8 * math.pi**2 / 3

CONVENTIONS = ("printed", "unhalved")


def _check_n(n, low=1):
    if int(n) != n or n < low:
        raise InvalidInputError(f"n must be an integer >= {low}, got {n!r}")


def sphere_volume(n: int, extended: bool = False):
    """Euclidean volume 2 pi^n / (n-1)! of the unit sphere S^{2n-1} in C^n."""
    _check_n(n)
    with mpmath.workdps(EXTENDED_DPS):
        val = 2 * mpmath.pi**n / mpmath.factorial(n - 1)
        # one rounding from 50 digits: correctly rounded double
        return +val if extended else float(val)


def ball_volume(n: int, r0, extended: bool = False):
    """Volume of a Bergman ball of radius r0 in H^n_C."""
    _check_n(n)
    if not r0 >= 0:
        raise InvalidInputError(f"radius must be non-negative, got {r0!r}")
    if extended:
        with mpmath.workdps(EXTENDED_DPS):
            coeff = mpmath.mpf(4) ** n * sphere_volume(n, extended=True) / (2 * n)
            return coeff * mpmath.sinh(mpmath.mpf(r0) / 2) ** (2 * n)
    coeff = 4.0**n * sphere_volume(n) / (2 * n)
    return coeff * math.sinh(r0 / 2.0) ** (2 * n)


@dataclass(frozen=True)
class VolumeResult:
    """``r0`` is the radius actually fed to the ball-volume formula.

    ``manifold_bound`` is the 50-digit value; ``ball_vol`` is its double echo.
    """

    n: int
    r0: float
    sphere_vol: float
    ball_vol: float
    manifold_bound: mpmath.mpf
    convention: str


def manifold_volume_bound(n: int, ball_radius: float | None = None, convention: str = "printed") -> VolumeResult:
    """Lower bound for Vol(H^n_C / G) from an embedded ball.

    ``ball_radius`` defaults to 0.01/17^{n-1}.  With the ``printed``
    convention it is used as the ball radius, so the sinh argument is half
    of it (0.005/17^{n-1} at the default).  ``unhalved`` puts the radius
    itself inside sinh, i.e. a ball of twice the radius.
    """
    _check_n(n, low=2)
    if convention not in CONVENTIONS:
        raise InvalidInputError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    if ball_radius is None:
        ball_radius = paper_ball_radius(n)
    if not ball_radius > 0:
        raise InvalidInputError(f"ball radius must be positive, got {ball_radius!r}")
    r0 = ball_radius if convention == "printed" else 2.0 * ball_radius
    big = ball_volume(n, r0, extended=True)
    return VolumeResult(n, r0, sphere_volume(n), float(big), big, convention)


def volume_bounds(n: int, ball_radius: float | None = None) -> dict[str, VolumeResult]:
    """Both conventions side by side."""
    return {c: manifold_volume_bound(n, ball_radius, c) for c in CONVENTIONS}


def format_extended(x, digits: int = 10) -> str:
    """Scientific notation with an ``[mp]`` marker for 50-digit values."""
    return f"{mpmath.nstr(x, digits, min_fixed=0, max_fixed=0)}[mp]"
