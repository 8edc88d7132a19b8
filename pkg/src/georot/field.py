"""Sampled vector fields ``R^m -> R^3`` on regular grids."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ga3 import Bivector3, Rotor3, exp_bivector, rotor_matrix

__all__ = [
    "VectorField",
    "LinearField",
    "RotationSpec",
    "FieldFormatError",
    "apply_outer_rotation",
    "rotate_values",
    "sample_linear",
    "l2_norm_sq",
    "random_linear_field",
    "random_rotation",
    "coefficient_error",
    "fit_linear",
    "split_parallel",
    "read_field",
    "write_field",
    "format_field",
    "parse_field",
]


@dataclass(frozen=True, eq=False)
class VectorField:
    """Vector values on a regular grid, stored row-major as an ``(N, 3)`` array.

    ``dims`` are the grid extents (C order), ``spacing`` the cell edge per
    axis and ``origin`` the position of the first sample.
    """

    dims: tuple[int, ...]
    values: np.ndarray
    spacing: tuple[float, ...] | None = None
    origin: tuple[float, ...] | None = None

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not 1 <= len(dims) <= 3:
            raise ValueError(f"grid dimension must be 1, 2 or 3, got {len(dims)}")
        if any(d < 1 for d in dims):
            raise ValueError(f"grid extents must be positive, got {dims}")
        spacing = (1.0,) * len(dims) if self.spacing is None else tuple(float(h) for h in self.spacing)
        origin = (0.0,) * len(dims) if self.origin is None else tuple(float(o) for o in self.origin)
        if len(spacing) != len(dims) or len(origin) != len(dims):
            raise ValueError("spacing and origin need one entry per grid axis")
        if any(not h > 0 for h in spacing):
            raise ValueError(f"spacing must be positive, got {spacing}")
        values = np.array(self.values, dtype=float)
        n = math.prod(dims)
        if values.shape == dims + (3,):
            values = values.reshape(n, 3)
        if values.shape != (n, 3):
            raise ValueError(f"values must have shape ({n}, 3) for dims {dims}, got {values.shape}")
        values.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "values", values)

    @property
    def m(self) -> int:
        return len(self.dims)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    def grid(self) -> np.ndarray:
        """Values reshaped to ``dims + (3,)``."""
        return self.values.reshape(self.dims + (3,))

    def positions(self) -> np.ndarray:
        """Sample positions as an ``(N, m)`` array in row-major order."""
        axes = [o + h * np.arange(d) for d, h, o in zip(self.dims, self.spacing, self.origin)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=1)

    def with_values(self, values: np.ndarray) -> VectorField:
        return VectorField(self.dims, values, self.spacing, self.origin)

    def same_grid(self, other: VectorField) -> bool:
        return (
            self.dims == other.dims
            and np.allclose(self.spacing, other.spacing, rtol=1e-12, atol=0)
            and np.allclose(self.origin, other.origin, rtol=1e-12, atol=1e-12)
        )

    def check_same_grid(self, other: VectorField) -> None:
        if not self.same_grid(other):
            raise ValueError(
                f"grid mismatch: dims {self.dims} vs {other.dims}, "
                f"spacing {self.spacing} vs {other.spacing}, origin {self.origin} vs {other.origin}"
            )


@dataclass(frozen=True, eq=False)
class LinearField:
    """``v(x) = A x`` on the open cube ``(-1, 1)^3``, zero elsewhere."""

    coeffs: np.ndarray

    def __post_init__(self):
        a = np.array(self.coeffs, dtype=float)
        if a.shape != (3, 3):
            raise ValueError(f"coefficients must be 3x3, got {a.shape}")
        a.flags.writeable = False
        object.__setattr__(self, "coeffs", a)

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        inside = np.all(np.abs(x) < 1, axis=1)
        return np.where(inside[:, None], x @ self.coeffs.T, 0.0)


@dataclass(frozen=True)
class RotationSpec:
    """Rotation by ``angle`` in ``[0, pi]`` within the oriented unit ``plane``."""

    plane: Bivector3
    angle: float

    def __post_init__(self):
        if not self.plane.is_unit():
            raise ValueError(f"rotation plane must be unit, |plane| = {self.plane.norm():.12g}")
        if not 0 <= self.angle <= math.pi:
            raise ValueError(f"rotation angle must lie in [0, pi], got {self.angle}")

    @property
    def rotor(self) -> Rotor3:
        return exp_bivector(self.plane, self.angle / 2)

    def matrix(self) -> np.ndarray:
        return rotor_matrix(self.rotor)

    def inverse(self) -> RotationSpec:
        return RotationSpec(-self.plane, self.angle)


def rotate_values(values: np.ndarray, rotor: Rotor3) -> np.ndarray:
    """Sandwich every row of an ``(N, 3)`` array with ``rotor``."""
    return np.asarray(values, dtype=float) @ rotor_matrix(rotor).T


def apply_outer_rotation(f: VectorField, rot: RotationSpec) -> VectorField:
    """Rotate every value of ``f``; sample positions stay where they are."""
    if rot.angle == 0:
        return f
    return f.with_values(rotate_values(f.values, rot.rotor))


def sample_linear(f: LinearField, resolution: int = 32) -> VectorField:
    """Sample a linear field at the cell midpoints of a ``resolution^3`` grid on ``(-1, 1)^3``."""
    if resolution < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution}")
    h = 2.0 / resolution
    origin = (-1.0 + h / 2,) * 3
    dims = (resolution,) * 3
    template = VectorField(dims, np.zeros((resolution**3, 3)), (h,) * 3, origin)
    x = template.positions()
    return template.with_values(x @ f.coeffs.T)


def l2_norm_sq(f: VectorField) -> float:
    """Riemann sum of ``|v(x)|^2`` weighted by the cell volume."""
    return float(np.einsum("ij,ij->", f.values, f.values) * f.cell_volume)


def split_parallel(f: VectorField, plane: Bivector3) -> tuple[VectorField, VectorField]:
    """Split ``f`` into its in-plane and normal parts with respect to ``plane``."""
    n = plane.normal()
    if abs(np.linalg.norm(n) - 1.0) > 1e-9:
        raise ValueError("plane must be a unit bivector")
    perp = np.outer(f.values @ n, n)
    return f.with_values(f.values - perp), f.with_values(perp)


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_linear_field(seed=None) -> LinearField:
    """Nine i.i.d. coefficients, uniform on ``[-1, 1]``."""
    return LinearField(_rng(seed).uniform(-1.0, 1.0, size=(3, 3)))


def random_rotation(seed=None) -> RotationSpec:
    """Plane dual to a uniform point on the sphere, angle uniform on ``[0, pi]``."""
    rng = _rng(seed)
    n = rng.standard_normal(3)
    while np.linalg.norm(n) < 1e-8:
        n = rng.standard_normal(3)
    n /= np.linalg.norm(n)
    angle = rng.uniform(0.0, math.pi)
    return RotationSpec(Bivector3.from_normal(n), angle)


def fit_linear(f: VectorField) -> np.ndarray:
    """Least-squares coefficient matrix ``A`` with ``v(x) ~ A x`` on a 3D grid."""
    if f.m != 3:
        raise ValueError("linear refit needs a field over a 3D grid")
    x = f.positions()
    coef, *_ = np.linalg.lstsq(x, f.values, rcond=None)
    return coef.T


def coefficient_error(detected, truth) -> float:
    """Sum of squared coefficient differences.

    ``detected`` may be a :class:`LinearField`, a 3x3 array, or a sampled
    :class:`VectorField`, which is refitted by least squares first.
    """
    if isinstance(detected, VectorField):
        a = fit_linear(detected)
    elif isinstance(detected, LinearField):
        a = detected.coeffs
    else:
        a = np.asarray(detected, dtype=float)
    b = truth.coeffs if isinstance(truth, LinearField) else np.asarray(truth, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.sum((a - b) ** 2))


class FieldFormatError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def format_field(f: VectorField) -> str:
    head = " ".join(["vfield", str(f.m), *map(str, f.dims), *(repr(h) for h in f.spacing)])
    body = "\n".join(" ".join(repr(float(c)) for c in row) for row in f.values)
    return head + "\n" + body + "\n"


def _columns(line: str) -> list[tuple[int, str]]:
    out, i = [], 0
    for tok in line.split():
        i = line.index(tok, i)
        out.append((i + 1, tok))
        i += len(tok)
    return out


def parse_field(text: str) -> VectorField:
    """Parse the text field format (header ``vfield m d1 .. dm h1 .. hm``)."""
    lines = text.splitlines()
    if not lines:
        raise FieldFormatError("empty input", 1)
    head = _columns(lines[0])
    if not head or head[0][1] != "vfield":
        raise FieldFormatError("header must start with 'vfield'", 1, head[0][0] if head else 1)
    try:
        m = int(head[1][1])
    except (IndexError, ValueError):
        raise FieldFormatError("expected grid dimension m", 1, head[1][0] if len(head) > 1 else 1) from None
    if m not in (1, 2, 3):
        raise FieldFormatError(f"grid dimension must be 1, 2 or 3, got {m}", 1, head[1][0])
    if len(head) != 2 + 2 * m:
        raise FieldFormatError(f"header needs {m} extents and {m} spacings", 1)
    try:
        dims = tuple(int(tok) for _, tok in head[2 : 2 + m])
    except ValueError:
        raise FieldFormatError("grid extents must be integers", 1) from None
    spacing = []
    for col, tok in head[2 + m :]:
        try:
            spacing.append(float(tok))
        except ValueError:
            raise FieldFormatError(f"bad spacing {tok!r}", 1, col) from None
    n = math.prod(dims)
    values = np.empty((n, 3))
    body = [(i + 2, ln) for i, ln in enumerate(lines[1:]) if ln.strip()]
    if len(body) != n:
        raise FieldFormatError(f"expected {n} samples, found {len(body)}", len(lines) + 1)
    for k, (lineno, ln) in enumerate(body):
        toks = _columns(ln)
        if len(toks) != 3:
            raise FieldFormatError(f"expected 3 components, found {len(toks)}", lineno)
        for j, (col, tok) in enumerate(toks):
            try:
                values[k, j] = float(tok)
            except ValueError:
                raise FieldFormatError(f"bad number {tok!r}", lineno, col) from None
    try:
        return VectorField(dims, values, tuple(spacing))
    except ValueError as exc:
        raise FieldFormatError(str(exc), 1) from None


def read_field(path) -> VectorField:
    return parse_field(Path(path).read_text())


def write_field(path, f: VectorField) -> None:
    Path(path).write_text(format_field(f))

