"""Arithmetic in the Clifford algebra Cl(3,0).

Multivectors are stored densely with eight coefficients in the order
``1, e1, e2, e3, e12, e13, e23, e123``.  All basis vectors square to +1.

Rotations act on vectors through the sandwich ``~r v r`` with
``r = exp(phi/2 Q)``; for ``Q = e12`` and ``phi > 0`` this turns ``e1``
towards ``e2`` (mathematically positive).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "Multivector3",
    "Bivector3",
    "Rotor3",
    "RotorLog",
    "E12",
    "E13",
    "E23",
    "DEGENERACY_TOL",
    "geometric_product",
    "reverse",
    "grade",
    "exp_bivector",
    "rotor_log",
    "sandwich",
    "compose_rotation",
    "project_parallel",
    "rotor_matrix",
    "vector",
]

# relative size below which a bivector part counts as zero
DEGENERACY_TOL = 1e-12
UNIT_TOL = 1e-9

_COMPONENTS = ("s", "v1", "v2", "v3", "b12", "b13", "b23", "p")
_GRADES = (0, 1, 1, 1, 2, 2, 2, 3)


@dataclass(frozen=True)
class Multivector3:
    s: float = 0.0
    v1: float = 0.0
    v2: float = 0.0
    v3: float = 0.0
    b12: float = 0.0
    b13: float = 0.0
    b23: float = 0.0
    p: float = 0.0

    @classmethod
    def from_array(cls, coeffs) -> Multivector3:
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (8,):
            raise ValueError(f"expected 8 coefficients, got shape {coeffs.shape}")
        return cls(*(float(c) for c in coeffs))

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, c) for c in _COMPONENTS])

    @property
    def vector_part(self) -> np.ndarray:
        return np.array([self.v1, self.v2, self.v3])

    @property
    def bivector_part(self) -> Bivector3:
        return Bivector3(self.b12, self.b13, self.b23)

    def norm_sq(self) -> float:
        return float(sum(getattr(self, c) ** 2 for c in _COMPONENTS))

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def is_vector(self) -> bool:
        return self.s == 0 and self.b12 == 0 and self.b13 == 0 and self.b23 == 0 and self.p == 0

    def isclose(self, other: Multivector3, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.to_array(), as_multivector(other).to_array(), rtol=0, atol=atol))

    def __add__(self, other):
        other = as_multivector(other)
        return Multivector3.from_array(self.to_array() + other.to_array())

    __radd__ = __add__

    def __sub__(self, other):
        other = as_multivector(other)
        return Multivector3.from_array(self.to_array() - other.to_array())

    def __rsub__(self, other):
        return as_multivector(other) - self

    def __neg__(self):
        return Multivector3.from_array(-self.to_array())

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector3.from_array(self.to_array() * float(other))
        return geometric_product(self, as_multivector(other))

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector3.from_array(self.to_array() * float(other))
        return geometric_product(as_multivector(other), self)

    def __truediv__(self, other):
        return Multivector3.from_array(self.to_array() / float(other))

    def __repr__(self) -> str:
        labels = ("", "e1", "e2", "e3", "e12", "e13", "e23", "e123")
        parts = [f"{getattr(self, c):+.6g}{lab}" for c, lab in zip(_COMPONENTS, labels) if getattr(self, c) != 0]
        return f"Multivector3({' '.join(parts) or '0'})"


@dataclass(frozen=True)
class Bivector3:
    """Oriented plane ``b12 e12 + b13 e13 + b23 e23``."""

    b12: float = 0.0
    b13: float = 0.0
    b23: float = 0.0

    def to_array(self) -> np.ndarray:
        return np.array([self.b12, self.b13, self.b23])

    def norm(self) -> float:
        return math.sqrt(self.b12**2 + self.b13**2 + self.b23**2)

    def is_unit(self, tol: float = UNIT_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def normalized(self) -> Bivector3:
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize the zero bivector")
        return Bivector3(self.b12 / n, self.b13 / n, self.b23 / n)

    def normal(self) -> np.ndarray:
        """Dual vector ``n`` with the plane as its orthogonal complement (right-handed)."""
        return np.array([self.b23, -self.b13, self.b12])

    @classmethod
    def from_normal(cls, n) -> Bivector3:
        n = np.asarray(n, dtype=float)
        return cls(float(n[2]), float(-n[1]), float(n[0]))

    def as_multivector(self) -> Multivector3:
        return Multivector3(b12=self.b12, b13=self.b13, b23=self.b23)

    def __neg__(self) -> Bivector3:
        return Bivector3(-self.b12, -self.b13, -self.b23)

    def __mul__(self, c: float) -> Bivector3:
        return Bivector3(self.b12 * c, self.b13 * c, self.b23 * c)

    __rmul__ = __mul__


E12 = Bivector3(1.0, 0.0, 0.0)
E13 = Bivector3(0.0, 1.0, 0.0)
E23 = Bivector3(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class Rotor3:
    """Even multivector ``s + b``; a rotation when ``s**2 + |b|**2 == 1``."""

    s: float
    b: Bivector3

    def as_multivector(self) -> Multivector3:
        return Multivector3(s=self.s, b12=self.b.b12, b13=self.b.b13, b23=self.b.b23)

    def norm(self) -> float:
        return math.sqrt(self.s**2 + self.b.norm() ** 2)

    def is_unit(self, tol: float = UNIT_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def canonical(self) -> Rotor3:
        """Same rotation with a nonnegative scalar part."""
        if self.s < 0:
            return Rotor3(-self.s, -self.b)
        return self

    def reverse(self) -> Rotor3:
        return Rotor3(self.s, -self.b)

    def __mul__(self, other: Rotor3) -> Rotor3:
        return as_rotor(geometric_product(self.as_multivector(), other.as_multivector()))

    @property
    def angle(self) -> float:
        """Rotation angle in ``[0, pi]`` (twice the argument of the canonical rotor)."""
        return 2.0 * rotor_log(self.canonical()).angle

    @classmethod
    def identity(cls) -> Rotor3:
        return cls(1.0, Bivector3())


class RotorLog(NamedTuple):
    angle: float
    plane: Bivector3
    degenerate: bool


def as_multivector(x) -> Multivector3:
    if isinstance(x, Multivector3):
        return x
    if isinstance(x, (Rotor3, Bivector3)):
        return x.as_multivector()
    if isinstance(x, (int, float, np.floating, np.integer)):
        return Multivector3(s=float(x))
    raise TypeError(f"cannot interpret {type(x).__name__} as a multivector")


def as_rotor(x) -> Rotor3:
    """Even part of ``x`` as a rotor; odd grades must vanish."""
    if isinstance(x, Rotor3):
        return x
    m = as_multivector(x)
    if m.v1 or m.v2 or m.v3 or m.p:
        odd = math.sqrt(m.v1**2 + m.v2**2 + m.v3**2 + m.p**2)
        if odd > 1e-12 * max(1.0, m.norm()):
            raise ValueError(f"multivector has odd-grade parts and is not a rotor: {m!r}")
    return Rotor3(m.s, m.bivector_part)


def vector(x: float, y: float, z: float) -> Multivector3:
    return Multivector3(v1=float(x), v2=float(y), v3=float(z))


def geometric_product(a: Multivector3, b: Multivector3) -> Multivector3:
    return Multivector3(
        s=a.s * b.s + a.v1 * b.v1 + a.v2 * b.v2 + a.v3 * b.v3
        - a.b12 * b.b12 - a.b13 * b.b13 - a.b23 * b.b23 - a.p * b.p,
        v1=a.s * b.v1 + a.v1 * b.s - a.v2 * b.b12 - a.v3 * b.b13
        + a.b12 * b.v2 + a.b13 * b.v3 - a.b23 * b.p - a.p * b.b23,
        v2=a.s * b.v2 + a.v1 * b.b12 + a.v2 * b.s - a.v3 * b.b23
        - a.b12 * b.v1 + a.b13 * b.p + a.b23 * b.v3 + a.p * b.b13,
        v3=a.s * b.v3 + a.v1 * b.b13 + a.v2 * b.b23 + a.v3 * b.s
        - a.b12 * b.p - a.b13 * b.v1 - a.b23 * b.v2 - a.p * b.b12,
        b12=a.s * b.b12 + a.v1 * b.v2 - a.v2 * b.v1 + a.v3 * b.p
        + a.b12 * b.s - a.b13 * b.b23 + a.b23 * b.b13 + a.p * b.v3,
        b13=a.s * b.b13 + a.v1 * b.v3 - a.v2 * b.p - a.v3 * b.v1
        + a.b12 * b.b23 + a.b13 * b.s - a.b23 * b.b12 - a.p * b.v2,
        b23=a.s * b.b23 + a.v1 * b.p + a.v2 * b.v3 - a.v3 * b.v2
        - a.b12 * b.b13 + a.b13 * b.b12 + a.b23 * b.s + a.p * b.v1,
        p=a.s * b.p + a.v1 * b.b23 - a.v2 * b.b13 + a.v3 * b.b12
        + a.b12 * b.v3 - a.b13 * b.v2 + a.b23 * b.v1 + a.p * b.s,
    )


def reverse(a: Multivector3) -> Multivector3:
    """Reversion: grades 2 and 3 change sign."""
    return Multivector3(a.s, a.v1, a.v2, a.v3, -a.b12, -a.b13, -a.b23, -a.p)


def grade(a: Multivector3, k: int) -> Multivector3:
    if k not in (0, 1, 2, 3):
        raise ValueError(f"grade must be in 0..3, got {k}")
    coeffs = a.to_array()
    mask = np.array(_GRADES) == k
    return Multivector3.from_array(np.where(mask, coeffs, 0.0))


def _check_unit_plane(plane: Bivector3) -> None:
    if not plane.is_unit():
        raise ValueError(f"plane must be a unit bivector, |plane| = {plane.norm():.12g}")


def exp_bivector(plane: Bivector3, angle: float) -> Rotor3:
    """``cos(angle) + sin(angle) plane`` for a unit ``plane``."""
    _check_unit_plane(plane)
    return Rotor3(math.cos(angle), plane * math.sin(angle))


def rotor_log(r, tol: float = DEGENERACY_TOL) -> RotorLog:
    """Polar form of a nonzero even multivector.

    Returns the argument ``atan2(|<r>_2|, <r>_0)`` and the normalized
    bivector part.  When the bivector part is negligible (relative to
    ``tol``) the plane is undefined: ``e12`` is returned with
    ``degenerate=True`` and the angle snaps to 0 or pi.
    """
    r = as_rotor(r)
    b = r.b.norm()
    size = math.hypot(r.s, b)
    if size == 0:
        raise ValueError("rotor_log of zero is undefined")
    if b <= tol * size:
        return RotorLog(0.0 if r.s > 0 else math.pi, E12, True)
    return RotorLog(math.atan2(b, r.s), r.b * (1.0 / b), False)


def _check_unit_rotor(r: Rotor3) -> None:
    if not r.is_unit():
        raise ValueError(f"rotor must be unit, |r| = {r.norm():.12g}")


def sandwich(r: Rotor3, v: Multivector3) -> Multivector3:
    """``~r v r``; rotates ``v`` by twice the argument of ``r``.

    A vector stays a vector: the rounding residue the products leave in
    other grades is dropped.
    """
    r = as_rotor(r)
    _check_unit_rotor(r)
    rm = r.as_multivector()
    v = as_multivector(v)
    out = geometric_product(geometric_product(reverse(rm), v), rm)
    return grade(out, 1) if v.is_vector() else out


def rotor_matrix(r: Rotor3) -> np.ndarray:
    """3x3 matrix ``M`` with ``M @ x`` equal to the sandwich of the vector ``x``."""
    r = as_rotor(r)
    _check_unit_rotor(r)
    cols = [sandwich(r, Multivector3(v1=1.0)), sandwich(r, Multivector3(v2=1.0)), sandwich(r, Multivector3(v3=1.0))]
    return np.column_stack([c.vector_part for c in cols])


def compose_rotation(alpha: float, P: Bivector3, phi: float, Q: Bivector3) -> tuple[float, Bivector3]:
    """Rotation equivalent to rotating by ``(alpha, P)`` and then by ``(phi, Q)``.

    Forms ``exp(alpha/2 P) exp(phi/2 Q)``, flips it to a nonnegative
    scalar part and returns twice its argument with the normalized
    bivector part.  The identity comes back as ``(0, e12)``.
    """
    prod = exp_bivector(P, alpha / 2) * exp_bivector(Q, phi / 2)
    log = rotor_log(prod.canonical())
    return 2.0 * log.angle, log.plane


def project_parallel(v: Multivector3, Q: Bivector3) -> Multivector3:
    """Component of the vector ``v`` lying in the plane ``Q``: ``-(v . Q) Q``."""
    v = as_multivector(v)
    if not v.is_vector():
        raise ValueError("project_parallel expects a pure vector")
    _check_unit_plane(Q)
    qm = Q.as_multivector()
    contraction = grade((geometric_product(v, qm) - geometric_product(qm, v)) * 0.5, 1)
    return grade(-geometric_product(contraction, qm), 1)
