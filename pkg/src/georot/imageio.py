"""RGB images as vector fields over a 2D pixel grid, with binary PPM I/O."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .field import RotationSpec, VectorField, apply_outer_rotation

__all__ = [
    "RgbImage",
    "PPMError",
    "image_to_field",
    "field_to_image",
    "distort_color_space",
    "read_ppm",
    "write_ppm",
    "encode_ppm",
    "decode_ppm",
    "synthetic_image",
]


@dataclass(frozen=True, eq=False)
class RgbImage:
    """8-bit RGB pixels as a ``(height, width, 3)`` uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"pixels must have shape (height, width, 3), got {px.shape}")
        if px.dtype != np.uint8:
            if np.any(px < 0) or np.any(px > 255):
                raise ValueError("channel values must lie in [0, 255]")
            px = px.astype(np.uint8)
        px = np.array(px)
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def __eq__(self, other) -> bool:
        return isinstance(other, RgbImage) and np.array_equal(self.pixels, other.pixels)


class PPMError(ValueError):
    pass


def image_to_field(img: RgbImage) -> VectorField:
    """Map channels to ``c/255 - 0.5`` with red, green, blue on ``e1, e2, e3``."""
    if img.height == 0 or img.width == 0:
        raise ValueError("image is empty")
    values = img.pixels.reshape(-1, 3).astype(float) / 255.0 - 0.5
    return VectorField((img.height, img.width), values, (1.0, 1.0), (0.0, 0.0))


def field_to_image(f: VectorField) -> RgbImage:
    """Inverse of :func:`image_to_field`; clamps to ``[0, 255]`` and rounds half to even."""
    if f.m != 2:
        raise ValueError(f"an image needs a field over a 2D grid, got m = {f.m}")
    c = np.rint((f.values + 0.5) * 255.0)
    c = np.clip(c, 0, 255).astype(np.uint8)
    return RgbImage(c.reshape(f.dims + (3,)))


def distort_color_space(f: VectorField, rot: RotationSpec) -> VectorField:
    return apply_outer_rotation(f, rot)


def encode_ppm(img: RgbImage) -> bytes:
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def decode_ppm(data: bytes) -> RgbImage:
    """Parse a binary (P6) PPM with maxval 255; ``#`` comments are allowed in the header."""
    fields: list[bytes] = []
    pos = 0
    n = len(data)
    while len(fields) < 4:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise PPMError("truncated PPM header")
        fields.append(data[start:pos])
    if fields[0] != b"P6":
        raise PPMError(f"not a binary PPM: magic {fields[0]!r}")
    try:
        width, height, maxval = (int(x) for x in fields[1:])
    except ValueError:
        raise PPMError("PPM header fields must be integers") from None
    if width <= 0 or height <= 0:
        raise PPMError(f"invalid PPM size {width}x{height}")
    if maxval != 255:
        raise PPMError(f"only maxval 255 is supported, got {maxval}")
    if pos >= n or not data[pos : pos + 1].isspace():
        raise PPMError("missing whitespace after PPM header")
    pos += 1
    size = width * height * 3
    raster = data[pos : pos + size]
    if len(raster) != size:
        raise PPMError(f"expected {size} bytes of pixel data, found {len(raster)}")
    px = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3)
    return RgbImage(px)


def read_ppm(path) -> RgbImage:
    return decode_ppm(Path(path).read_bytes())


def write_ppm(path, img: RgbImage) -> None:
    Path(path).write_bytes(encode_ppm(img))


PATCH_COLORS = np.array([[1.0, 0.85, 0.0], [0.0, 0.2, 0.8], [0.8, 0.0, 0.0], [0.0, 0.6, 0.2]])


def synthetic_image(
    width: int = 256,
    height: int = 256,
    seed=0,
    *,
    brightness: float = 0.62,
    contrast: float = 0.5,
    chroma: float = 0.01,
    patches: int = 4,
    patch_area: float = 0.005,
) -> RgbImage:
    """Deterministic photo-like test picture.

    Three smooth luminance waves set the overall structure, each channel
    gets a weak zero-mean gradient of its own, and ``patches`` small
    rectangles of saturated colour (covering ``patch_area`` of the frame
    in total) play the part of signs and windows.
    """
    if width < 1 or height < 1:
        raise ValueError(f"image size must be positive, got {width}x{height}")
    if patches < 0 or not 0 <= patch_area < 1:
        raise ValueError("patches must be nonnegative and patch_area in [0, 1)")
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:height, 0:width]
    xs, ys = x / max(width - 1, 1), y / max(height - 1, 1)

    def wave(fmin, fmax):
        theta, freq, phase = rng.uniform(0, np.pi), rng.uniform(fmin, fmax), rng.uniform(0, 2 * np.pi)
        return np.sin(2 * np.pi * freq * (np.cos(theta) * xs + np.sin(theta) * ys) + phase)

    lum = brightness + contrast * sum(wave(0.3, 1.5) for _ in range(3))
    img = np.repeat(lum[..., None], 3, axis=2)
    for ch in range(3):
        c = wave(1.0, 4.0)
        img[..., ch] += chroma * (c - c.mean())
    if patches:
        # rectangles with aspect 1 : 0.6, equal share of the requested area
        half = np.sqrt(patch_area / patches * width * height / 2.4)
        for k in range(patches):
            cx, cy = rng.uniform(0, width), rng.uniform(0, height)
            img[(np.abs(x - cx) <= half) & (np.abs(y - cy) <= 0.6 * half)] = PATCH_COLORS[k % len(PATCH_COLORS)]
    return RgbImage(np.clip(np.rint(img * 255), 0, 255).astype(np.uint8))
