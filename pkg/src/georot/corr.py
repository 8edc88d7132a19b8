"""Geometric cross-correlation of vector fields at the origin."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import VectorField
from .ga3 import DEGENERACY_TOL, E12, Bivector3, Multivector3, rotor_log

__all__ = [
    "CorrelationResult",
    "correlate_origin",
    "correlate_projected",
    "correlate_values",
    "correlate_arrays",
    "correlate_projected_arrays",
]


@dataclass(frozen=True)
class CorrelationResult:
    raw: Multivector3
    normalized: Multivector3
    angle: float
    plane: Bivector3
    degenerate: bool

    @property
    def scalar(self) -> float:
        """Scalar part of the normalized correlation (``cos(angle)`` for unit-norm input)."""
        return self.normalized.s


def correlate_values(u: np.ndarray, v: np.ndarray, weight: float = 1.0) -> Multivector3:
    """Weighted sum of ``reverse(u_k) v_k`` over paired rows of two ``(N, 3)`` arrays.

    Vectors are their own reverse, and ``u v = u.v + u^v``, so the sum
    reduces to the 3x3 moment matrix ``sum_k u_k v_k^T``.
    """
    mom = (u.T @ v) * weight
    return Multivector3(
        s=float(mom[0, 0] + mom[1, 1] + mom[2, 2]),
        b12=float(mom[0, 1] - mom[1, 0]),
        b13=float(mom[0, 2] - mom[2, 0]),
        b23=float(mom[1, 2] - mom[2, 1]),
    )


def _result(raw: Multivector3, norm_u: float, norm_v: float) -> CorrelationResult:
    scale = norm_u * norm_v
    if scale == 0 or raw.norm() == 0:
        zero = Multivector3()
        return CorrelationResult(raw, zero, 0.0, E12, True)
    normalized = raw / scale
    log = rotor_log(raw, tol=DEGENERACY_TOL)
    return CorrelationResult(raw, normalized, log.angle, log.plane, log.degenerate)


def correlate_arrays(u: np.ndarray, v: np.ndarray, weight: float = 1.0) -> CorrelationResult:
    raw = correlate_values(u, v, weight)
    norm_u = math.sqrt(float(np.einsum("ij,ij->", u, u)) * weight)
    norm_v = math.sqrt(float(np.einsum("ij,ij->", v, v)) * weight)
    return _result(raw, norm_u, norm_v)


def correlate_projected_arrays(u: np.ndarray, v: np.ndarray, Q: Bivector3, weight: float = 1.0) -> CorrelationResult:
    if not Q.is_unit():
        raise ValueError(f"projection plane must be unit, |Q| = {Q.norm():.12g}")
    n = Q.normal()
    up = u - np.outer(u @ n, n)
    vp = v - np.outer(v @ n, n)
    return correlate_arrays(up, vp, weight)


def correlate_origin(u: VectorField, v: VectorField) -> CorrelationResult:
    """Riemann sum of ``reverse(u(x)) v(x)`` over the grid, with its polar form.

    ``u`` is the rotated pattern and ``v`` the reference.  The extracted
    plane carries the orientation: rotating ``u`` by ``angle`` in
    ``plane`` moves it towards ``v``.
    """
    u.check_same_grid(v)
    return correlate_arrays(u.values, v.values, u.cell_volume)


def correlate_projected(u: VectorField, v: VectorField, Q: Bivector3) -> CorrelationResult:
    """Correlation of the components of ``u`` and ``v`` that lie in the plane ``Q``.

    The bivector part of the result is parallel to ``Q``.
    """
    u.check_same_grid(v)
    return correlate_projected_arrays(u.values, v.values, Q, u.cell_volume)
