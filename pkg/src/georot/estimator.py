"""Scikit-learn style wrapper around the detectors for paired point clouds of 3-vectors."""

from __future__ import annotations

import math
import warnings

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import ConvergenceWarning
from sklearn.utils.validation import check_array, check_is_fitted

from .detect import DetectorConfig, algorithm1, algorithm2
from .field import VectorField
from .ga3 import Bivector3, rotor_matrix

__all__ = ["OuterRotationDetector"]


def _check_vectors(X, name: str) -> np.ndarray:
    X = check_array(X, dtype=np.float64, ensure_min_samples=1)
    if X.shape[1] != 3:
        raise ValueError(f"{name} must have 3 columns (one per basis vector), got {X.shape[1]}")
    return X


class OuterRotationDetector(TransformerMixin, BaseEstimator):
    """Estimate the rotation that aligns a pattern ``X`` with a reference ``y``.

    Rows of ``X`` and ``y`` are paired samples of two vector fields.  The
    fitted rotation maps ``X`` onto ``y``; :meth:`transform` applies it to
    new data, :meth:`inverse_transform` undoes it.

    Parameters
    ----------
    algorithm : {1, 2}
        Plain iterative correlation or the accelerated variant.
    epsilon : float
        Stop once the correction angle of an iteration is at most this.
    max_iterations : int
        Safety cap; hitting it raises a ``ConvergenceWarning``.
    disturbance_angle : float
        Rotation applied when the first correlation is real but the data differ.
    disturbance_plane : tuple of 3 floats
        ``(b12, b13, b23)`` of the disturbance plane; normalized on use.

    Attributes
    ----------
    angle_ : float
    plane_ : Bivector3
    rotation_matrix_ : ndarray of shape (3, 3)
    n_iter_ : int
    converged_ : bool
    trace_ : tuple of IterationRecord
    """

    def __init__(
        self,
        algorithm: int = 2,
        epsilon: float = 1e-10,
        max_iterations: int = 5000,
        disturbance_angle: float = math.pi / 4,
        disturbance_plane: tuple[float, float, float] = (1.0, 0.0, 0.0),
    ):
        self.algorithm = algorithm
        self.epsilon = epsilon
        self.max_iterations = max_iterations
        self.disturbance_angle = disturbance_angle
        self.disturbance_plane = disturbance_plane

    def _config(self) -> DetectorConfig:
        if self.algorithm not in (1, 2):
            raise ValueError(f"algorithm must be 1 or 2, got {self.algorithm!r}")
        plane = Bivector3(*(float(c) for c in self.disturbance_plane))
        if plane.norm() == 0:
            raise ValueError("disturbance_plane must not be zero")
        return DetectorConfig(
            epsilon=float(self.epsilon),
            max_iterations=int(self.max_iterations),
            disturbance_angle=float(self.disturbance_angle),
            disturbance_plane=plane.normalized(),
        )

    def fit(self, X, y, sample_weight=None):
        """Fit the rotation taking the rows of ``X`` to the rows of ``y``."""
        cfg = self._config()
        X = _check_vectors(X, "X")
        y = _check_vectors(y, "y")
        if X.shape != y.shape:
            raise ValueError(f"X and y must have the same shape, got {X.shape} and {y.shape}")
        if sample_weight is not None:
            w = np.asarray(sample_weight, dtype=float)
            if w.shape != (X.shape[0],) or np.any(w < 0) or not np.all(np.isfinite(w)):
                raise ValueError("sample_weight must be finite, nonnegative, one entry per sample")
            # the correlation is bilinear, so sqrt-scaling both sides weights each product by w
            s = np.sqrt(w)[:, None]
            X, y = X * s, y * s
        n = X.shape[0]
        detect = algorithm1 if self.algorithm == 1 else algorithm2
        result = detect(VectorField((n,), y), VectorField((n,), X), cfg)

        self.angle_ = result.angle
        self.plane_ = result.plane
        self.rotor_ = result.rotor
        self.rotation_matrix_ = rotor_matrix(result.rotor)
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        self.trace_ = result.trace
        self.n_features_in_ = 3
        if not result.converged:
            warnings.warn(
                f"detection stopped after {result.iterations} iterations without reaching epsilon={self.epsilon}",
                ConvergenceWarning,
                stacklevel=2,
            )
        return self

    def transform(self, X):
        check_is_fitted(self, "rotation_matrix_")
        return _check_vectors(X, "X") @ self.rotation_matrix_.T

    def inverse_transform(self, X):
        check_is_fitted(self, "rotation_matrix_")
        return _check_vectors(X, "X") @ self.rotation_matrix_

    def score(self, X, y, sample_weight=None):
        """Negative mean Euclidean distance between ``transform(X)`` and ``y``; higher is better."""
        dist = np.linalg.norm(self.transform(X) - _check_vectors(y, "y"), axis=1)
        return -float(np.average(dist, weights=sample_weight))
