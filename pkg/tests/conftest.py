"""Shared field builders and independent oracles."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from georot.field import VectorField


def half_cube_field(res: int, right, left) -> VectorField:
    """Piecewise-constant field on (-1, 1)^3: ``right`` where x1 >= 0, ``left`` elsewhere."""
    h = 2.0 / res
    f = VectorField((res,) * 3, np.zeros((res**3, 3)), (h,) * 3, (-1 + h / 2,) * 3)
    x1 = f.positions()[:, 0]
    values = np.where((x1 >= 0)[:, None], np.asarray(right, float), np.asarray(left, float))
    return f.with_values(values)


def two_blade_field(res: int = 8) -> VectorField:
    """e1 on the right half of the cube, e2 on the left."""
    return half_cube_field(res, [1, 0, 0], [0, 1, 0])


def tilted_field(res: int = 8) -> VectorField:
    """e1 + e2 on the right half of the cube, e2 on the left."""
    return half_cube_field(res, [1, 1, 0], [0, 1, 0])


# --- brute-force Cl(3,0) product over basis-blade bitmasks ---

BLADES = (0b000, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111)  # 1 e1 e2 e3 e12 e13 e23 e123
INDEX = {b: i for i, b in enumerate(BLADES)}


def blade_sign(a: int, b: int) -> int:
    """Sign from sorting the concatenated basis vectors of two blades (Euclidean metric)."""
    swaps = 0
    a >>= 1
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


def oracle_product(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    out = np.zeros(8)
    for i, j in itertools.product(range(8), range(8)):
        a, b = BLADES[i], BLADES[j]
        out[INDEX[a ^ b]] += blade_sign(a, b) * x[i] * y[j]
    return out


def rodrigues(axis, angle: float) -> np.ndarray:
    """Right-handed rotation matrix about a unit axis."""
    n = np.asarray(axis, float)
    n = n / np.linalg.norm(n)
    k = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    return np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * k @ k


def quat_from_axis(axis, angle: float) -> np.ndarray:
    n = np.asarray(axis, float) / np.linalg.norm(axis)
    return np.concatenate([[math.cos(angle / 2)], math.sin(angle / 2) * n])


def quat_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    w1, v1 = p[0], p[1:]
    w2, v2 = q[0], q[1:]
    return np.concatenate([[w1 * w2 - v1 @ v2], w1 * v2 + w2 * v1 + np.cross(v1, v2)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
