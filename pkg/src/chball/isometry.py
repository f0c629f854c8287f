"""SU(n,1) matrices acting on the ball: validation, boosts, classification, sampling.

Matrices act on column vectors of C^{n,1}; a ball point p is moved by
lifting, multiplying, and dehomogenising.  The hyperbolic translation used
throughout is the block matrix

    B0(r) = diag(I_{n-1}, [[c, s], [s, c]]),  c = (r^2+1)/2r,  s = (r^2-1)/2r,

which sends the origin a Bergman distance 2 ln r along the last axis.
"""
from __future__ import annotations

import cmath
import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from chball.errors import InvalidInputError, IsometryValidationError, NotInBallError
from chball.hermitian_core import (
    BallPoint,
    SignatureForm,
    as_ball_point,
    project_to_ball,
    standard_lift,
)

UNITARITY_TOL = 1e-10
DET_TOL = 1e-8
LOXODROMIC_TOL = 1e-8
#: eigenvector-basis condition number above which diagonalizability is in doubt
COND_LIMIT = 1e8
#: eigenvalues closer than this are treated as one spectral cluster
CLUSTER_TOL = 1e-4


def _opnorm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))


@dataclass(frozen=True, eq=False)
class ComplexIsometry:
    """A validated element of SU(n,1). Build through :func:`verify_su`."""

    mat: np.ndarray
    form: SignatureForm

    @property
    def n(self) -> int:
        return self.form.n

    def __matmul__(self, other: "ComplexIsometry") -> np.ndarray:
        return self.mat @ other.mat

    def inverse(self) -> "ComplexIsometry":
        # A^{-1} = J A* J for J-unitary A
        J = self.form.J
        inv = J @ self.mat.conj().T @ J
        inv.setflags(write=False)
        return ComplexIsometry(inv, self.form)

    def __repr__(self):
        return f"ComplexIsometry(n={self.n}, mat={self.mat.tolist()!r})"


class IsometryClass(enum.Enum):
    LOXODROMIC = "loxodromic"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"
    IDENTITY = "identity"
    AMBIGUOUS = "numerically-ambiguous"


@dataclass(frozen=True, eq=False)
class BoostParams:
    r: float
    direction: np.ndarray = field(default=None)

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r > 1.0 + 1e-14):
            raise InvalidInputError(f"boost parameter r must exceed 1, got {self.r!r}")
        if self.direction is None:
            raise InvalidInputError("a boost needs a direction (use BoostParams.axis)")
        w = np.array(self.direction, dtype=complex).reshape(-1)
        if abs(np.linalg.norm(w) - 1.0) > 1e-12:
            raise InvalidInputError(f"direction must be a unit vector, |w| = {np.linalg.norm(w)!r}")
        object.__setattr__(self, "direction", w)

    @classmethod
    def axis(cls, r: float, n: int, k: int = 0) -> "BoostParams":
        """Boost along the coordinate axis e_{k+1} of C^n."""
        w = np.zeros(n, dtype=complex)
        w[k] = 1.0
        return cls(r, w)

    @property
    def n(self) -> int:
        return self.direction.size


def su_residuals(mat) -> dict:
    """Raw J-unitarity and determinant residuals of a square matrix."""
    mat = np.asarray(mat, dtype=complex)
    J = SignatureForm(mat.shape[0] - 1).J
    return {
        "j_unitarity": _opnorm(mat.conj().T @ J @ mat - J),
        "determinant": abs(np.linalg.det(mat) - 1.0),
    }


def verify_su(mat, tol: float = UNITARITY_TOL, det_tol: float = DET_TOL) -> ComplexIsometry:
    """Check that ``mat`` lies in SU(n,1) and wrap it.

    Raises :class:`IsometryValidationError` listing each failed invariant
    with the size of its residual.
    """
    mat = np.array(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 2:
        raise IsometryValidationError(
            f"expected a square matrix of size n+1 >= 2, got shape {mat.shape}",
            {"shape": float("nan")},
        )
    if not np.all(np.isfinite(mat)):
        raise IsometryValidationError("matrix has non-finite entries", {"finite": float("nan")})
    res = su_residuals(mat)
    failed = {}
    # ||J|| = 1, so the relative and absolute J-unitarity tests coincide
    if res["j_unitarity"] > tol:
        failed["j_unitarity"] = res["j_unitarity"]
    if res["determinant"] > det_tol:
        failed["determinant"] = res["determinant"]
    if failed:
        detail = ", ".join(f"{k} residual {v:.3e}" for k, v in failed.items())
        raise IsometryValidationError(f"not in SU(n,1): {detail}", failed)
    mat.setflags(write=False)
    return ComplexIsometry(mat, SignatureForm(mat.shape[0] - 1))


def _as_isometry(A) -> ComplexIsometry:
    return A if isinstance(A, ComplexIsometry) else verify_su(A)


def apply(A, p) -> BallPoint:
    """Image of the ball point ``p`` under the isometry ``A``."""
    A = _as_isometry(A)
    p = as_ball_point(p)
    if p.n != A.n:
        raise InvalidInputError(f"point has n={p.n}, isometry has n={A.n}")
    try:
        return project_to_ball(A.mat @ standard_lift(p).coords)
    except NotInBallError as exc:
        raise IsometryValidationError(f"isometry moved an interior point out of the ball: {exc}") from exc


def block_unitary(U) -> np.ndarray:
    """Embed U in U(n) as diag(U, 1), an origin stabiliser of U(n,1)."""
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    n = U.shape[0]
    out = np.eye(n + 1, dtype=complex)
    out[:n, :n] = U
    return out


def axis_boost(r: float, n: int) -> np.ndarray:
    """The block matrix B0(r): identity on e_1..e_{n-1}, hyperbolic on (e_n, e_{n+1})."""
    if not r > 1.0:
        raise InvalidInputError(f"boost parameter r must exceed 1, got {r!r}")
    c = (r * r + 1.0) / (2.0 * r)
    s = (r * r - 1.0) / (2.0 * r)
    out = np.eye(n + 1, dtype=complex)
    out[n - 1:, n - 1:] = [[c, s], [s, c]]
    return out


def rotation_to_axis(w) -> np.ndarray:
    """A unitary U with U e_1 = w, from a complex Householder reflection."""
    w = np.array(w, dtype=complex).reshape(-1)
    norm = np.linalg.norm(w)
    if norm == 0:
        raise InvalidInputError("cannot rotate onto the zero vector")
    w = w / norm
    phase = w[0] / abs(w[0]) if abs(w[0]) > 0 else 1.0 + 0j
    w_hat = w * np.conj(phase)  # first entry now real and >= 0
    v = -w_hat
    v[0] += 1.0
    vv = float(np.vdot(v, v).real)
    n = w.size
    if vv < 1e-30:
        H = np.eye(n, dtype=complex)
    else:
        H = np.eye(n, dtype=complex) - 2.0 * np.outer(v, v.conj()) / vv
    return phase * H


def boost(params: BoostParams) -> ComplexIsometry:
    """Hyperbolic translation by 2 ln r moving the origin along ``params.direction``.

    Conjugates B0(r) by a block unitary taking the boost axis e_n onto the
    requested direction, so ``apply(boost(...), origin)`` is
    ((r^2-1)/(r^2+1)) * direction.
    """
    n = params.n
    perm = np.eye(n, dtype=complex)
    perm[:, [0, n - 1]] = perm[:, [n - 1, 0]]
    U = block_unitary(rotation_to_axis(params.direction) @ perm)
    mat = U @ axis_boost(params.r, n) @ U.conj().T
    return verify_su(mat)


def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    """Single-linkage clusters of complex numbers closer than ``tol``."""
    groups: list[list[int]] = []
    for i, v in enumerate(values):
        hits = [g for g in groups if any(abs(values[j] - v) <= tol for j in g)]
        merged = [i]
        for g in hits:
            merged.extend(g)
            groups.remove(g)
        groups.append(sorted(merged))
    return sorted(groups)


def eigenvector_condition(A) -> float:
    mat = _as_isometry(A).mat
    _, V = np.linalg.eig(mat)
    V = V / np.linalg.norm(V, axis=0)
    return float(np.linalg.cond(V))


def classify(A, tol: float = LOXODROMIC_TOL) -> IsometryClass:
    """Loxodromic / parabolic / elliptic trichotomy at tolerance ``tol``.

    Scalar matrices (the centre of SU(n,1)) are reported as IDENTITY since
    they act trivially on the ball.  Eigenvalues are grouped into clusters
    first; a cluster mean of modulus above 1 + tol means LOXODROMIC.  An
    eigenvector of negative self-pairing
    is an interior fixed point, hence ELLIPTIC.  Without one, a spectral
    cluster whose geometric multiplicity is visibly smaller than its size
    is a Jordan block, hence PARABOLIC; when the rank gap is not clear the
    answer is AMBIGUOUS.
    """
    A = _as_isometry(A)
    mat = A.mat
    size = A.n + 1
    ident = np.eye(size)
    centre = np.trace(mat) / size
    if _opnorm(mat - centre * ident) <= tol and abs(abs(centre) - 1.0) <= tol:
        return IsometryClass.IDENTITY
    eig = np.linalg.eigvals(mat)
    groups = _cluster(eig, CLUSTER_TOL)
    # cluster means are stable where a rounded Jordan block splits by O(sqrt(eps))
    if max(abs(np.mean(eig[g])) for g in groups) > 1.0 + tol:
        return IsometryClass.LOXODROMIC

    scale = max(1.0, _opnorm(mat))
    null_tol = 1e-7 * scale
    jordan_tol = 1e-3 * scale
    J = A.form.J
    deficient = False
    negative = False
    for group in groups:
        lam = np.mean(eig[group])
        _, s, vh = np.linalg.svd(mat - lam * ident)
        k = len(group)
        geo = int(np.sum(s <= null_tol))
        if geo < k and s[size - k] >= jordan_tol:
            deficient = True
        if geo:
            basis = vh[size - geo:].conj().T
            gram = basis.conj().T @ J @ basis
            if np.linalg.eigvalsh((gram + gram.conj().T) / 2)[0] < -1e-8:
                negative = True
    if negative:
        return IsometryClass.ELLIPTIC
    if deficient:
        return IsometryClass.PARABOLIC
    return IsometryClass.AMBIGUOUS


def _rng(seed=None, rng=None) -> np.random.Generator:
    if rng is not None:
        return rng
    return np.random.default_rng(seed)


def random_unitary(n: int, seed=None, *, rng: np.random.Generator | None = None) -> np.ndarray:
    """Haar-random U(n) element: QR of a complex Ginibre matrix with phase fix."""
    if int(n) != n or n < 1:
        raise InvalidInputError(f"n must be a positive integer, got {n!r}")
    gen = _rng(seed, rng)
    z = (gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def normalize_det(mat) -> np.ndarray:
    """Divide by the principal (n+1)-th root of det so the result has det 1."""
    mat = np.asarray(mat, dtype=complex)
    d = np.linalg.det(mat)
    root = cmath.exp(cmath.log(d) / mat.shape[0])
    return mat / root


def random_isometry_with_shift(n: int, s_max: float, seed=None, *, rng=None):
    """Like :func:`random_isometry` but also return the sampled log-shift s."""
    if s_max <= 0:
        raise InvalidInputError(f"s_max must be positive, got {s_max!r}")
    gen = _rng(seed, rng)
    u1 = block_unitary(random_unitary(n, rng=gen))
    u2 = block_unitary(random_unitary(n, rng=gen))
    s = float(gen.uniform(0.0, s_max))
    core = axis_boost(math.exp(s), n) if s > 0 else np.eye(n + 1, dtype=complex)
    return verify_su(normalize_det(u1 @ core @ u2)), s


def random_isometry(n: int, s_max: float, seed=None, *, rng=None) -> ComplexIsometry:
    """U1 B0(e^s) U2 with Haar block unitaries and s ~ Uniform[0, s_max], det-normalised."""
    return random_isometry_with_shift(n, s_max, seed, rng=rng)[0]


def dump_matrix(A, path=None) -> str:
    """Serialise to ``{"n": n, "mat": [[re, im], ...]}`` (row-major)."""
    mat = A.mat if isinstance(A, ComplexIsometry) else np.asarray(A, dtype=complex)
    doc = {
        "n": mat.shape[0] - 1,
        "mat": [[float(z.real), float(z.imag)] for z in mat.reshape(-1)],
    }
    text = json.dumps(doc)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def parse_matrix(text: str) -> np.ndarray:
    """Inverse of :func:`dump_matrix`; raises ValueError on malformed input."""
    doc = json.loads(text)
    if not isinstance(doc, dict) or "n" not in doc or "mat" not in doc:
        raise ValueError('matrix document must be an object with "n" and "mat"')
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f'"n" must be a positive integer, got {n!r}')
    entries = doc["mat"]
    if not isinstance(entries, list) or len(entries) != (n + 1) ** 2:
        raise ValueError(f'"mat" must hold (n+1)^2 = {(n + 1) ** 2} [re, im] pairs')
    vals = []
    for e in entries:
        if not (isinstance(e, list) and len(e) == 2):
            raise ValueError(f"bad matrix entry {e!r}")
        vals.append(complex(float(e[0]), float(e[1])))
    return np.array(vals, dtype=complex).reshape(n + 1, n + 1)


def load_matrix(path) -> np.ndarray:
    return parse_matrix(Path(path).read_text())
