"""Command-line driver: synthetic linear-field runs, colour-image runs, direct detection.

Exit codes: 0 success, 1 detection did not converge, 2 usage error, 3 I/O or format error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .detect import DetectionResult, DetectorConfig, algorithm1, algorithm2, residual_error
from .field import (
    FieldFormatError,
    RotationSpec,
    apply_outer_rotation,
    coefficient_error,
    random_linear_field,
    random_rotation,
    read_field,
    sample_linear,
)
from .ga3 import E12, E13, E23, Bivector3
from .imageio import PPMError, distort_color_space, field_to_image, image_to_field, read_ppm, synthetic_image, write_ppm

log = logging.getLogger("georot")

EXIT_OK, EXIT_NOT_CONVERGED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

PLANE_ALIASES = {
    "red": E23,
    "green": E13,
    "blue": E12,
    "e12": E12,
    "e13": E13,
    "e23": E23,
}

ALGORITHMS = {1: algorithm1, 2: algorithm2}


class UsageError(Exception):
    pass


@dataclass
class ExperimentReport:
    """One row per checkpoint: iteration count, absolute error, normalized error, seconds."""

    columns: tuple[str, str, str, str]
    rows: list[tuple[int, float, float, float]] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for k, a, e, s in self.rows:
            w.writerow([k, repr(float(a)), repr(float(e)), repr(float(s))])
        return buf.getvalue()

    def write(self, path) -> None:
        Path(path).write_text(self.to_csv())


def parse_checkpoints(text: str) -> list[int]:
    try:
        pts = [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise UsageError(f"invalid checkpoint list {text!r}") from None
    if not pts or any(p < 0 for p in pts) or any(b <= a for a, b in zip(pts, pts[1:])):
        raise UsageError(f"checkpoints must be strictly increasing nonnegative integers, got {text!r}")
    return pts


def parse_plane(text: str) -> Bivector3:
    key = text.strip().lower()
    if key in PLANE_ALIASES:
        return PLANE_ALIASES[key]
    try:
        b = [float(tok) for tok in key.split(",")]
    except ValueError:
        raise UsageError(f"plane must be red/green/blue, e12/e13/e23 or 'b12,b13,b23', got {text!r}") from None
    if len(b) != 3 or not any(b):
        raise UsageError(f"plane needs three components, not all zero, got {text!r}")
    return Bivector3(*b).normalized()


def _config(args, max_iterations: int) -> DetectorConfig:
    return DetectorConfig(epsilon=args.epsilon, max_iterations=max_iterations)


def _elapsed(result: DetectionResult, k: int) -> float:
    if k == 0 or not result.trace:
        return 0.0
    return result.trace[min(k, len(result.trace)) - 1].elapsed


def cmd_synth(args) -> int:
    checkpoints = parse_checkpoints(args.checkpoints)
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    detect = ALGORITHMS[args.algorithm]
    cfg = _config(args, max(max(checkpoints), 1))
    errors = np.zeros((args.trials, len(checkpoints)))
    seconds = np.zeros_like(errors)
    for t in range(args.trials):
        rng = np.random.default_rng([args.seed, t])
        truth = random_linear_field(rng)
        rot = random_rotation(rng)
        if args.angle is not None:
            rot = RotationSpec(rot.plane, args.angle)
        v = sample_linear(truth, args.resolution)
        u = apply_outer_rotation(v, rot)
        if rot.angle == 0:
            errors[t] = [coefficient_error(u, truth)] * len(checkpoints)
            continue
        result = detect(v, u, cfg, checkpoints=checkpoints)
        for j, k in enumerate(checkpoints):
            errors[t, j] = coefficient_error(result.snapshots[k], truth)
            seconds[t, j] = _elapsed(result, k)
        log.debug("trial %d: angle %.4f, %d iterations", t, rot.angle, result.iterations)
    report = ExperimentReport(("iterations", "abs_error", "error_per_coeff", "seconds"))
    for j, k in enumerate(checkpoints):
        mean = float(errors[:, j].mean())
        secs = 0.0 if args.no_timing else float(seconds[:, j].mean())
        report.rows.append((k, mean, mean / 9.0, secs))
    _emit(report, args.out)
    return EXIT_OK


def cmd_image(args) -> int:
    checkpoints = parse_checkpoints(args.checkpoints)
    plane = parse_plane(args.plane)
    if not 0 <= args.angle <= math.pi:
        raise UsageError(f"--angle must lie in [0, pi], got {args.angle}")
    img = read_ppm(args.input)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    v = image_to_field(img)
    u = distort_color_space(v, RotationSpec(plane, args.angle))
    write_ppm(outdir / "distorted.ppm", field_to_image(u))
    cfg = _config(args, max(max(checkpoints), 1))
    result = ALGORITHMS[args.algorithm](v, u, cfg, checkpoints=checkpoints)
    report = ExperimentReport(("iterations", "abs_error", "error_per_pixel", "seconds"))
    for k in checkpoints:
        snap = result.snapshots[k]
        write_ppm(outdir / f"restored_{k:04d}.ppm", field_to_image(snap))
        absolute, per_pixel = residual_error(snap, v)
        secs = 0.0 if args.no_timing else _elapsed(result, k)
        report.rows.append((k, absolute, per_pixel, secs))
    report.write(outdir / "report.csv")
    log.info("detected angle %.12g in plane %s after %d iterations", result.angle, result.plane, result.iterations)
    sys.stdout.write(report.to_csv())
    return EXIT_OK


def cmd_detect(args) -> int:
    u = read_field(args.field_a)
    v = read_field(args.field_b)
    if not u.same_grid(v):
        raise UsageError(f"grid mismatch: {u.dims} vs {v.dims}")
    cfg = _config(args, args.max_iterations)
    result = ALGORITHMS[args.algorithm](v, u, cfg)
    p = result.plane
    print(f"angle {result.angle!r}")
    print(f"plane {p.b12!r} {p.b13!r} {p.b23!r}")
    print(f"iterations {result.iterations}")
    print(f"converged {'true' if result.converged else 'false'}")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_make_image(args) -> int:
    write_ppm(args.out, synthetic_image(args.width, args.height, args.seed))
    return EXIT_OK


def _emit(report: ExperimentReport, out) -> None:
    if out:
        report.write(out)
    else:
        sys.stdout.write(report.to_csv())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="georot", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, epsilon):
        p.add_argument("--algorithm", type=int, choices=(1, 2), default=1)
        p.add_argument("--epsilon", type=float, default=epsilon, help="stop when the correction angle is below this")

    p = sub.add_parser("synth", help="random linear fields under random outer rotations")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--resolution", type=int, default=32)
    p.add_argument("--checkpoints", default="0,1,10,100,1000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--angle", type=float, default=None, help="force the rotation angle of every trial")
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.add_argument("--no-timing", action="store_true", help="write 0 seconds so the CSV is reproducible")
    common(p, 1e-14)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("image", help="distort a PPM in colour space and restore it")
    p.add_argument("input")
    p.add_argument("--plane", default="red", help="red/green/blue, e12/e13/e23 or 'b12,b13,b23'")
    p.add_argument("--angle", type=float, default=1.7)
    p.add_argument("--checkpoints", default="0,1,10,100")
    p.add_argument("--outdir", default="georot-out")
    p.add_argument("--no-timing", action="store_true")
    common(p, 1e-14)
    p.set_defaults(func=cmd_image)

    p = sub.add_parser("detect", help="detect the outer rotation taking field B to field A")
    p.add_argument("field_a", help="rotated pattern")
    p.add_argument("field_b", help="reference field")
    p.add_argument("--max-iterations", type=int, default=5000)
    common(p, 1e-10)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("make-image", help="write the synthetic test picture as PPM")
    p.add_argument("out")
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_make_image)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"georot: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FieldFormatError, PPMError) as exc:
        print(f"georot: {getattr(args, 'input', None) or ''} {exc}".strip(), file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"georot: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"georot: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
