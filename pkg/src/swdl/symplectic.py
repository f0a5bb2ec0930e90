"""2x2 real symplectic matrices and the selection rules built on them.

Entries follow the row-major layout ``[[a, b], [c, d]]`` throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, NotSymplectic, ZeroEntry

DET_TOL = 1e-9


@dataclass(frozen=True)
class SymplecticMatrix:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite matrix entries {vals}")
        for name, v in zip("abcd", vals):
            object.__setattr__(self, name, float(v))
        residual = abs(self.det - 1.0)
        if residual > DET_TOL:
            raise NotSymplectic(residual)

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def inverse(self) -> SymplecticMatrix:
        return invert(self)

    def __matmul__(self, other):
        if isinstance(other, SymplecticMatrix):
            return from_array(self.as_array() @ other.as_array())
        return self.as_array() @ np.asarray(other)

    def __neg__(self) -> SymplecticMatrix:
        return SymplecticMatrix(-self.a, -self.b, -self.c, -self.d)

    def to_record(self) -> str:
        """Flat ``a,b,c,d`` record with round-trip precision."""
        return ",".join(repr(float(v)) for v in (self.a, self.b, self.c, self.d))

    @classmethod
    def from_record(cls, text: str) -> SymplecticMatrix:
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected 4 comma-separated entries, got {text!r}")
        return validate(*(float(p) for p in parts))

    def __str__(self):
        return f"[[{self.a:g}, {self.b:g}], [{self.c:g}, {self.d:g}]]"


def validate(a, b, c, d) -> SymplecticMatrix:
    """Build a SymplecticMatrix, raising NotSymplectic when ``ad - bc != 1``."""
    return SymplecticMatrix(a, b, c, d)


def from_array(m) -> SymplecticMatrix:
    m = np.asarray(m, dtype=float)
    return SymplecticMatrix(m[0, 0], m[0, 1], m[1, 0], m[1, 1])


def invert(A: SymplecticMatrix) -> SymplecticMatrix:
    return SymplecticMatrix(A.d, -A.b, -A.c, A.a)


IDENTITY = SymplecticMatrix(1.0, 0.0, 0.0, 1.0)
L1 = SymplecticMatrix(0.0, 1.0, -1.0, 0.0)
WD_A1 = SymplecticMatrix(1.0, 1.0, -0.5, 0.5)

# Auxiliary coordinate maps; J and N have determinant -1.
J = np.array([[0.0, 1.0], [1.0, 0.0]])
N = np.array([[-1.0, 0.0], [0.0, 1.0]])
M = np.array([[0.0, -1.0], [1.0, 1.0]])


def P(sigma: float) -> np.ndarray:
    return np.array([[1.0 / sigma, 0.0], [0.0, sigma]])


def conjugate_by(aux: np.ndarray, A: SymplecticMatrix) -> SymplecticMatrix:
    """``aux @ A @ aux`` as a symplectic matrix (used with N and P(sigma))."""
    return from_array(aux @ A.as_array() @ aux)


def _require_nonzero(**entries):
    for name, value in entries.items():
        if value == 0:
            raise ZeroEntry(name)


def derive_a3(A1: SymplecticMatrix, A2: SymplecticMatrix) -> SymplecticMatrix:
    _require_nonzero(a1=A1.a, d1=A1.d)
    return SymplecticMatrix(A2.a * A1.a, A2.b * A1.d, A2.c / A1.d, A2.d / A1.a)


def derive_a4(A1: SymplecticMatrix, A2: SymplecticMatrix) -> SymplecticMatrix:
    _require_nonzero(b1=A1.b, c1=A1.c)
    return SymplecticMatrix(A2.a * A1.b, A2.b * A1.c, A2.c / A1.c, A2.d / A1.b)


def derive_a5(A1: SymplecticMatrix, A2: SymplecticMatrix) -> SymplecticMatrix:
    _require_nonzero(a1=A1.a, b1=A1.b, c1=A1.c, d1=A1.d)
    return SymplecticMatrix(
        A2.a * A1.a * A1.b,
        A2.b * A1.c * A1.d,
        A2.c / (A1.c * A1.d),
        A2.d / (A1.a * A1.b),
    )


def optimal_a1(a1: float, b1: float) -> SymplecticMatrix:
    """Symplectic completion of the first row ``(a1, b1)`` with minimal ``c1**2 + d1**2``.

    Closed-form Lagrange solution: ``c1 = -b1/r``, ``d1 = a1/r`` with ``r = a1**2 + b1**2``.
    """
    r = a1 * a1 + b1 * b1
    if r == 0:
        raise DegenerateInput("optimal_a1 needs (a1, b1) != (0, 0)")
    return SymplecticMatrix(a1, b1, -b1 / r, a1 / r)


def lfm_a2(beta: float, b2: float, d2: float, a1: float, b1: float) -> SymplecticMatrix:
    """Second matrix that turns the SWDL of ``exp(j(alpha t + beta t^2))`` into a line impulse.

    Paired with ``optimal_a1(a1, b1)`` it satisfies ``a2 + 2 beta (d1^2 - c1^2) b2 = 0``.
    """
    _require_nonzero(b2=b2)
    r = a1 * a1 + b1 * b1
    if r == 0:
        raise DegenerateInput("lfm_a2 needs (a1, b1) != (0, 0)")
    a2 = 2.0 * beta * (b1 * b1 - a1 * a1) * b2 / (r * r)
    c2 = (a2 * d2 - 1.0) / b2
    return SymplecticMatrix(a2, b2, c2, d2)


def impulse_residual(beta: float, A1: SymplecticMatrix, A2: SymplecticMatrix) -> float:
    """``a2 + 2 beta (d1^2 - c1^2) b2``; zero when the LFM ridge collapses to an impulse."""
    return A2.a + 2.0 * beta * (A1.d**2 - A1.c**2) * A2.b


def resolution_bound(A1: SymplecticMatrix, A2: SymplecticMatrix) -> float:
    """Signal-independent lower bound ``b2^2 (c1^2 + d1^2)^2 / 4``."""
    _require_nonzero(b2=A2.b)
    s = A1.c**2 + A1.d**2
    return A2.b**2 * s * s / 4.0


def superresolution_flags(A1: SymplecticMatrix, A2: SymplecticMatrix) -> tuple[bool, bool]:
    """(beats SWD, beats WDL) judged from the matrix entries alone."""
    s = A1.c**2 + A1.d**2
    return (0.0 < abs(A2.b) < 1.0, 0.0 < s < 0.5)


def random_symplectic(rng: np.random.Generator, scale: float = 2.0, nonzero: bool = True) -> SymplecticMatrix:
    """Random matrix with entries of order ``scale``; all entries non-zero when requested."""
    while True:
        a, b, c = rng.uniform(-scale, scale, size=3)
        if abs(a) < 0.1 * scale:
            continue
        d = (1.0 + b * c) / a
        if nonzero and min(abs(a), abs(b), abs(c), abs(d)) < 0.05:
            continue
        if abs(d) > 10 * scale:
            continue
        return SymplecticMatrix(a, b, c, d)
