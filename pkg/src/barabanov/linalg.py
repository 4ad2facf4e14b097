"""Small exact linear algebra for pairs of real 2x2 matrices.

Matrices are plain ``numpy`` arrays of shape ``(2, 2)`` and vectors are arrays
of shape ``(2,)``.  Everything handed out by :class:`MatrixPair` is marked
read-only so pairs can be shared freely.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

SINGULAR_TOL = 1e-12

TWO_PI = 2.0 * math.pi


class SingularMatrixError(ValueError):
    """Raised when a matrix with ``|det| <= 1e-12`` must be inverted."""


class ConstraintWarning(UserWarning):
    """An affine pair violates ``b*c >= 1 >= a, d`` (allowed, but flagged)."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite parameter {v!r}")


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def det(a: np.ndarray) -> float:
    return float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])


def invert(a: np.ndarray) -> np.ndarray:
    """Closed-form inverse; refuses matrices with ``|det| <= 1e-12``."""
    d = det(a)
    if abs(d) <= SINGULAR_TOL:
        raise SingularMatrixError(f"matrix is singular (det={d:.3e})")
    return np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]]) / d


def spectral_radius(a: np.ndarray) -> float:
    """Largest eigenvalue modulus from the trace/determinant closed form.

    A complex-conjugate pair has modulus ``sqrt(det)``, so no complex
    arithmetic is needed.
    """
    tr = float(a[0, 0] + a[1, 1])
    d = det(a)
    disc = 0.25 * tr * tr - d
    if disc < 0.0:
        return math.sqrt(d)
    root = math.sqrt(disc)
    return max(abs(0.5 * tr + root), abs(0.5 * tr - root))


def polar_angle(v: Sequence[float]) -> float:
    """Angle of ``v`` in ``[0, 2*pi)``."""
    x, y = float(v[0]), float(v[1])
    if x == 0.0 and y == 0.0:
        raise ValueError("polar angle of the zero vector is undefined")
    phi = math.atan2(y, x)
    if phi < 0.0:
        phi += TWO_PI
        if phi >= TWO_PI:  # atan2 returned -0.0-ish tiny negative
            phi = 0.0
    return phi


def from_polar(r: float, phi: float) -> np.ndarray:
    return np.array([r * math.cos(phi), r * math.sin(phi)])


def to_polar(v: Sequence[float]) -> tuple[float, float]:
    return math.hypot(v[0], v[1]), polar_angle(v)


@dataclass(frozen=True)
class AffinePair:
    """Parameters of ``A0 = alpha*[[a, b], [0, 1]]``, ``A1 = beta*[[1, 0], [c, d]]``."""

    alpha: float
    beta: float
    a: float
    b: float
    c: float
    d: float

    kind = "affine"

    def matrices(self) -> tuple[np.ndarray, np.ndarray]:
        a0 = self.alpha * np.array([[self.a, self.b], [0.0, 1.0]])
        a1 = self.beta * np.array([[1.0, 0.0], [self.c, self.d]])
        return a0, a1

    @property
    def satisfies_constraint(self) -> bool:
        return self.b * self.c >= 1.0 >= max(self.a, self.d)


@dataclass(frozen=True)
class RotationPair:
    """Parameters of a rotation by ``theta0`` and a rotation by ``theta1``
    conjugated by ``diag(lam, 1)``."""

    theta0: float
    theta1: float
    lam: float

    kind = "rotation"

    def matrices(self) -> tuple[np.ndarray, np.ndarray]:
        c1, s1 = math.cos(self.theta1), math.sin(self.theta1)
        a1 = np.array([[c1, -self.lam * s1], [s1 / self.lam, c1]])
        return rotation(self.theta0), a1


@dataclass(frozen=True)
class MatrixPair:
    """The set ``{A0, A1}`` plus the family parameters it came from (if any)."""

    a0: np.ndarray
    a1: np.ndarray
    family: AffinePair | RotationPair | None = None
    constraint_ok: bool = True
    _inverses: tuple[np.ndarray, np.ndarray] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        a0, a1 = _frozen(self.a0), _frozen(self.a1)
        if a0.shape != (2, 2) or a1.shape != (2, 2):
            raise ValueError("both matrices must be 2x2")
        if not (np.all(np.isfinite(a0)) and np.all(np.isfinite(a1))):
            raise ValueError("matrix entries must be finite")
        inv = (_frozen(invert(a0)), _frozen(invert(a1)))
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "_inverses", inv)

    @classmethod
    def raw(cls, a0, a1) -> "MatrixPair":
        return cls(np.asarray(a0, dtype=float), np.asarray(a1, dtype=float))

    @property
    def matrices(self) -> tuple[np.ndarray, np.ndarray]:
        return self.a0, self.a1

    @property
    def inverses(self) -> tuple[np.ndarray, np.ndarray]:
        return self._inverses

    def __getitem__(self, i: int) -> np.ndarray:
        return (self.a0, self.a1)[i]

    def scaled(self, c: float) -> "MatrixPair":
        """The pair ``{c*A0, c*A1}``; family metadata is dropped."""
        return MatrixPair(c * self.a0, c * self.a1)

    def conjugated(self, s: np.ndarray) -> "MatrixPair":
        """The pair ``{S A0 S^-1, S A1 S^-1}``."""
        s_inv = invert(s)
        return MatrixPair(s @ self.a0 @ s_inv, s @ self.a1 @ s_inv)

    def regenerates(self) -> bool:
        """True when the family parameters reproduce the stored matrices exactly."""
        if self.family is None:
            return True
        m0, m1 = self.family.matrices()
        return bool(np.array_equal(m0, self.a0) and np.array_equal(m1, self.a1))


def make_affine_pair(alpha: float, beta: float, a: float, b: float, c: float, d: float) -> MatrixPair:
    _check_finite(alpha, beta, a, b, c, d)
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    if a <= 0 or d <= 0:
        raise ValueError("a and d must be positive")
    fam = AffinePair(alpha, beta, a, b, c, d)
    ok = fam.satisfies_constraint
    if not ok:
        warnings.warn(f"b*c >= 1 >= a, d is violated for {fam}", ConstraintWarning, stacklevel=2)
    a0, a1 = fam.matrices()
    return MatrixPair(a0, a1, family=fam, constraint_ok=ok)


def make_rotation_pair(theta0: float, theta1: float, lam: float) -> MatrixPair:
    _check_finite(theta0, theta1, lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    fam = RotationPair(theta0, theta1, lam)
    a0, a1 = fam.matrices()
    return MatrixPair(a0, a1, family=fam)


def word_product(pair: MatrixPair, word: Sequence[int]) -> np.ndarray:
    """``A_{w[n-1]} ... A_{w[1]} A_{w[0]}``: the first letter acts first."""
    if len(word) == 0:
        raise ValueError("word must be nonempty")
    out = np.eye(2)
    for s in word:
        if s not in (0, 1):
            raise ValueError(f"invalid symbol {s!r}")
        out = pair[s] @ out
    return out
