"""Iterative detection of outer rotations between two vector fields.

Both detectors repeatedly correlate the rotated pattern ``u`` against the
reference ``v`` and rotate ``u`` by the rotor found in the correlation,
accumulating the applied corrections into one total rotation.  The
returned ``(angle, plane)`` is that total correction: sandwiching ``u``
with ``exp(angle/2 plane)`` reproduces ``v``.  The misalignment that
produced ``u`` from ``v`` is the same angle in the reversed plane.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .corr import CorrelationResult, correlate_arrays, correlate_projected_arrays
from .field import RotationSpec, VectorField, rotate_values
from .ga3 import E12, Bivector3, Rotor3, compose_rotation, exp_bivector

__all__ = [
    "DetectorConfig",
    "IterationRecord",
    "DetectionResult",
    "algorithm1",
    "algorithm2",
    "residual_error",
    "remaining_misalignment",
]


@dataclass(frozen=True)
class DetectorConfig:
    """Stopping rule and first-step exception settings.

    ``aligned_tol`` separates an already aligned pair (normalized
    correlation ~ 1) from a real-valued correlation caused by a
    half-turn; only the latter triggers the disturbance step.
    """

    epsilon: float = 1e-10
    max_iterations: int = 5000
    disturbance_angle: float = math.pi / 4
    disturbance_plane: Bivector3 = E12
    aligned_tol: float = 1e-9

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be at least 1, got {self.max_iterations}")
        if not self.disturbance_plane.is_unit():
            raise ValueError("disturbance_plane must be a unit bivector")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    phi: float  # angle applied after the full correlation
    plane: Bivector3
    observed_phi: float  # argument of the correlation before the exception branch
    disturbed: bool
    alpha: float  # running total after this iteration
    total_plane: Bivector3
    residual: float  # mean per-sample distance to the reference
    elapsed: float
    projected_phi: float | None = None
    projected_plane: Bivector3 | None = None


@dataclass(frozen=True, eq=False)
class DetectionResult:
    angle: float
    plane: Bivector3
    corrected: VectorField
    iterations: int
    trace: tuple[IterationRecord, ...]
    converged: bool
    snapshots: dict[int, VectorField] = field(default_factory=dict)

    @property
    def rotor(self) -> Rotor3:
        """Correction rotor; ``sandwich(rotor, u(x)) ~ v(x)``."""
        return exp_bivector(self.plane, self.angle / 2)

    @property
    def misalignment(self) -> RotationSpec:
        """Outer rotation taking the reference to the pattern."""
        return RotationSpec(-self.plane, min(self.angle, math.pi))


def residual_error(corrected: VectorField, original: VectorField) -> tuple[float, float]:
    """Sum of per-sample Euclidean distances, and that sum divided by the sample count."""
    corrected.check_same_grid(original)
    absolute = float(np.linalg.norm(corrected.values - original.values, axis=1).sum())
    return absolute, absolute / corrected.n_samples


def remaining_misalignment(truth: RotationSpec, angle: float, plane: Bivector3) -> float:
    """Angle of the rotation still separating ``v`` from a corrected pattern.

    ``truth`` produced the pattern, ``(angle, plane)`` is the accumulated
    correction; the leftover rotor is their product.
    """
    left, _ = compose_rotation(truth.angle, truth.plane, angle, plane)
    return left


class _Run:
    """Mutable state shared by both detectors."""

    def __init__(self, v: VectorField, u: VectorField, cfg: DetectorConfig, checkpoints: Iterable[int]):
        u.check_same_grid(v)
        if not np.any(v.values):
            raise ValueError("reference field is identically zero; nothing to align")
        if not np.any(u.values):
            raise ValueError("pattern field is identically zero; nothing to align")
        self.v, self.cfg = v, cfg
        self.ref = v.values
        self.u = np.array(u.values)
        self.weight = v.cell_volume
        self.alpha, self.P = 0.0, E12
        self.iteration = 0
        self.trace: list[IterationRecord] = []
        self.checkpoints = sorted({int(c) for c in checkpoints})
        if any(c < 0 for c in self.checkpoints):
            raise ValueError("checkpoints must be nonnegative")
        self.snapshots: dict[int, VectorField] = {}
        if 0 in self.checkpoints:
            self.snapshots[0] = u
        self.t0 = time.perf_counter()

    def correlate(self) -> CorrelationResult:
        return correlate_arrays(self.u, self.ref, self.weight)

    def first_exception(self, cor: CorrelationResult) -> bool:
        # a real correlation that is not already perfect alignment: half-turn ambiguity
        return self.iteration == 1 and cor.degenerate and cor.scalar < 1.0 - self.cfg.aligned_tol

    def rotate(self, phi: float, Q: Bivector3) -> None:
        if phi != 0:
            self.u = rotate_values(self.u, exp_bivector(Q, phi / 2))
        self.alpha, self.P = compose_rotation(self.alpha, self.P, phi, Q)

    def full_step(self) -> tuple[float, Bivector3, float, bool]:
        cor = self.correlate()
        phi, Q = cor.angle, cor.plane
        observed = phi
        disturbed = self.first_exception(cor)
        if disturbed:
            phi, Q = self.cfg.disturbance_angle, self.cfg.disturbance_plane
        self.rotate(phi, Q)
        return phi, Q, observed, disturbed

    def record(self, phi, Q, observed, disturbed, projected_phi=None, projected_plane=None) -> None:
        residual = float(np.linalg.norm(self.u - self.ref, axis=1).mean())
        self.trace.append(
            IterationRecord(
                self.iteration, phi, Q, observed, disturbed, self.alpha, self.P,
                residual, time.perf_counter() - self.t0, projected_phi, projected_plane,
            )
        )
        if self.iteration in self.checkpoints:
            self.snapshots[self.iteration] = self.v.with_values(self.u)

    def result(self, converged: bool) -> DetectionResult:
        corrected = self.v.with_values(self.u)
        for c in self.checkpoints:
            if c > self.iteration:
                self.snapshots[c] = corrected
        return DetectionResult(
            self.alpha, self.P, corrected, self.iteration, tuple(self.trace), converged, dict(self.snapshots)
        )


def algorithm1(
    v: VectorField, u: VectorField, cfg: DetectorConfig | None = None, checkpoints: Iterable[int] = ()
) -> DetectionResult:
    """Plain iterative geometric correlation.

    Each pass correlates ``u`` with ``v``, rotates ``u`` by the rotor of
    the correlation and folds that rotation into the running total,
    until the correction angle drops to ``cfg.epsilon``.  If the very
    first correlation is real but the fields differ, a fixed disturbance
    rotation is applied instead so the half-turn case can be resolved.

    ``checkpoints`` lists iteration counts at which a copy of the
    corrected pattern is kept in ``result.snapshots``; counts beyond the
    last iteration receive the final field.
    """
    cfg = cfg or DetectorConfig()
    run = _Run(v, u, cfg, checkpoints)
    phi = math.pi
    while phi > cfg.epsilon and run.iteration < cfg.max_iterations:
        run.iteration += 1
        phi, Q, observed, disturbed = run.full_step()
        run.record(phi, Q, observed, disturbed)
    return run.result(phi <= cfg.epsilon)


def algorithm2(
    v: VectorField, u: VectorField, cfg: DetectorConfig | None = None, checkpoints: Iterable[int] = ()
) -> DetectionResult:
    """Accelerated detection.

    After the full correlation step of :func:`algorithm1`, a second
    correlation fixes the plane ``Q``, and the correlation of the
    components lying in ``Q`` supplies the angle for a second rotation.
    Convergence is judged on the angle of the full correlation.
    """
    cfg = cfg or DetectorConfig()
    run = _Run(v, u, cfg, checkpoints)
    phi = math.pi
    while phi > cfg.epsilon and run.iteration < cfg.max_iterations:
        run.iteration += 1
        phi, Q, observed, disturbed = run.full_step()
        second = run.correlate()
        phi2, Q2 = 0.0, None
        if not second.degenerate:
            projected = correlate_projected_arrays(run.u, run.ref, second.plane, run.weight)
            if not projected.degenerate:
                # in-plane bivector is a positive multiple of second.plane
                phi2, Q2 = projected.angle, projected.plane
                run.rotate(phi2, Q2)
        run.record(phi, Q, observed, disturbed, phi2, Q2)
    return run.result(phi <= cfg.epsilon)
