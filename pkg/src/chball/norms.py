"""Operator norms, spectral radii and the distance from SU(n,1) to U(n)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from chball.errors import InvalidInputError, IsometryValidationError, NumericalError
from chball.hermitian_core import BallPoint, bergman_distance
from chball.isometry import (
    BoostParams,
    ComplexIsometry,
    apply,
    block_unitary,
    boost,
    verify_su,
)

#: below this |r - 1| the ratio (r^q - 1)/(r - 1) is replaced by its limit q
R_ONE_TOL = 1e-12
STABILIZER_TOL = 1e-9


def _matrix(M) -> np.ndarray:
    if isinstance(M, ComplexIsometry):
        return M.mat
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {M.shape}")
    return M


def spectral_radius(M) -> float:
    """max |lambda| over the eigenvalues of M."""
    M = _matrix(M)
    try:
        eig = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue solver failed on a {M.shape} matrix: {exc}") from exc
    return float(np.max(np.abs(eig)))


def operator_norm(M) -> float:
    """sqrt of the spectral radius of M* M, via the Hermitian eigensolver."""
    M = _matrix(M)
    gram = M.conj().T @ M
    gram = (gram + gram.conj().T) / 2
    try:
        top = np.linalg.eigvalsh(gram)[-1]
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Hermitian eigensolver failed on a {M.shape} matrix: {exc}") from exc
    return math.sqrt(max(float(top), 0.0))


def translation_parameter(A) -> float:
    """r = exp(rho(0, A(0)) / 2), the quantity bounding ||A||."""
    A = A if isinstance(A, ComplexIsometry) else verify_su(A)
    origin = BallPoint.origin(A.n)
    return math.exp(bergman_distance(origin, apply(A, origin)) / 2.0)


@dataclass(frozen=True, eq=False)
class UnitaryDistanceCertificate:
    witness: np.ndarray
    actual: float
    bound: float
    r: float

    @property
    def holds(self) -> bool:
        return self.actual <= self.bound + 1e-9


def dist_to_unitary(A) -> UnitaryDistanceCertificate:
    """Upper-bound dist(A, U(n)) by an explicit origin-stabilising witness.

    With p = A(0) and r = exp(rho(0, p)/2), let B be the boost carrying the
    origin to p.  Then O = B^{-1} A fixes the origin, so it is block
    diagonal and unitary, and ||A - O|| <= ||B^{-1} - Id|| ||A|| <= (r - 1) r.
    """
    A = A if isinstance(A, ComplexIsometry) else verify_su(A)
    n = A.n
    origin = BallPoint.origin(n)
    p = apply(A, origin)
    t = math.sqrt(p.norm2)
    if t == 0.0:
        r = 1.0
        witness = np.array(A.mat)
    else:
        r = math.exp(bergman_distance(origin, p) / 2.0)
        B = boost(BoostParams(r, p.coords / t))
        witness = B.inverse().mat @ A.mat
    off = max(np.max(np.abs(witness[:n, n])), np.max(np.abs(witness[n, :n])))
    if off > STABILIZER_TOL * max(1.0, r * r):
        raise IsometryValidationError(
            f"witness does not stabilise the origin (off-block size {off:.3e})",
            {"stabilizer": float(off)},
        )
    witness = np.array(witness)
    witness[:n, n] = 0.0
    witness[n, :n] = 0.0
    actual = operator_norm(A.mat - witness)
    return UnitaryDistanceCertificate(witness, actual, r * (r - 1.0), r)


def geometric_sum(r: float, q: int) -> float:
    """(r^q - 1)/(r - 1), i.e. 1 + r + ... + r^{q-1}."""
    if abs(r - 1.0) < R_ONE_TOL:
        return float(q)
    return math.expm1(q * math.log(r)) / (r - 1.0)


@dataclass(frozen=True)
class PowerBoundCheck:
    lhs: float
    rhs: float
    holds: bool


def power_difference_bound_check(A, B, q: int, slack: float = 1e-9) -> PowerBoundCheck:
    """Compare ||A^q - B^q|| with ((r^q - 1)/(r - 1)) ||A - B||.

    ``B`` is a unitary; an n x n matrix is embedded as diag(B, 1).
    """
    if int(q) != q or q < 1:
        raise InvalidInputError(f"q must be a positive integer, got {q!r}")
    A = A if isinstance(A, ComplexIsometry) else verify_su(A)
    B = _matrix(B)
    if B.shape[0] == A.n:
        B = block_unitary(B)
    if B.shape != A.mat.shape:
        raise InvalidInputError(f"B has shape {B.shape}, A has {A.mat.shape}")
    r = translation_parameter(A)
    lhs = operator_norm(np.linalg.matrix_power(A.mat, q) - np.linalg.matrix_power(B, q))
    rhs = geometric_sum(r, q) * operator_norm(A.mat - B)
    return PowerBoundCheck(lhs, rhs, lhs <= rhs + slack)


def jorgensen_quantity(A) -> float:
    """||A|| ||A - Id||.  A measurement only; says nothing about discreteness."""
    M = _matrix(A)
    return operator_norm(M) * operator_norm(M - np.eye(M.shape[0]))
