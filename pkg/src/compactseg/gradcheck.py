"""Central finite-difference gradient checking."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STEP = 1e-6


def numeric_gradient(fn, x: np.ndarray, step: float = STEP) -> np.ndarray:
    """Central differences of scalar ``fn`` at ``x`` (float64), one coordinate at a time."""
    x = np.array(x, dtype=np.float64)
    grad = np.empty_like(x)
    flat, gflat = x.reshape(-1), grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + step
        up = fn(x)
        flat[i] = orig - step
        down = fn(x)
        flat[i] = orig
        gflat[i] = (up - down) / (2.0 * step)
    return grad


def relative_error(analytic, numeric) -> float:
    """``||a - n|| / max(||a||, ||n||)``; 0 when both vanish."""
    a = np.asarray(analytic, dtype=np.float64).ravel()
    n = np.asarray(numeric, dtype=np.float64).ravel()
    scale = max(np.linalg.norm(a), np.linalg.norm(n))
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(a - n) / scale)


@dataclass(frozen=True)
class GradCheckResult:
    name: str
    rel_error: float
    tolerance: float
    n_params: int

    @property
    def passed(self) -> bool:
        return self.rel_error < self.tolerance


def check(name: str, value_and_grad, x, tolerance: float, step: float = STEP) -> GradCheckResult:
    """Compare ``value_and_grad(x)[1]`` with central differences of ``value_and_grad(x)[0]``."""
    x = np.array(x, dtype=np.float64)
    _, analytic = value_and_grad(x)
    numeric = numeric_gradient(lambda z: value_and_grad(z)[0], x, step)
    return GradCheckResult(name, relative_error(analytic, numeric), tolerance, x.size)
