"""Fit a metric to target similarities.

The objective is

    sum_k (cos_d(v_k, w_k) - t_k)^2 + reg * ||d - I||_F^2

minimized by projected gradient descent over symmetric positive definite
matrices, starting from the identity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import Degenerate, DimMismatch
from .tensor import Metric, Tensor, UP

log = logging.getLogger(__name__)

DET_FLOOR = 1e-9
EIG_FLOOR = 1e-8


@dataclass(frozen=True)
class Sample:
    v: Tensor
    w: Tensor
    target: float


@dataclass(frozen=True)
class FitResult:
    metric: Metric
    objective: float
    iterations: int
    converged: bool


def _stack(samples: Sequence[Sample]):
    dims = set()
    for s in samples:
        for t in (s.v, s.w):
            if t.variance != (UP,):
                raise DimMismatch("samples must be contravariant vectors")
            dims.add(t.dim)
    if len(dims) > 1:
        raise DimMismatch(f"samples have mixed dimensions {sorted(dims)}")
    V = np.array([s.v.components for s in samples], dtype=float)
    W = np.array([s.w.components for s in samples], dtype=float)
    T = np.array([s.target for s in samples], dtype=float)
    return V, W, T


def objective(d: np.ndarray, V, W, T, reg: float) -> float:
    loss = reg * float(np.sum((d - np.eye(len(d))) ** 2))
    if len(T):
        a = np.einsum("ki,ij,kj->k", V, d, W)
        b = np.einsum("ki,ij,kj->k", V, d, V)
        c = np.einsum("ki,ij,kj->k", W, d, W)
        if np.any(b <= 0) or np.any(c <= 0):
            return np.inf
        loss += float(np.sum((a / np.sqrt(b * c) - T) ** 2))
    return loss


def gradient(d: np.ndarray, V, W, T, reg: float) -> np.ndarray:
    g = 2 * reg * (d - np.eye(len(d)))
    if len(T):
        a = np.einsum("ki,ij,kj->k", V, d, W)
        b = np.einsum("ki,ij,kj->k", V, d, V)
        c = np.einsum("ki,ij,kj->k", W, d, W)
        root = np.sqrt(b * c)
        cos = a / root
        r = 2 * (cos - T)
        # d cos / d d for symmetric perturbations
        da = 0.5 * (np.einsum("ki,kj->kij", V, W) + np.einsum("ki,kj->kij", W, V))
        db = np.einsum("ki,kj->kij", V, V)
        dc = np.einsum("ki,kj->kij", W, W)
        dcos = da / root[:, None, None] - (cos / 2)[:, None, None] * (
            db / b[:, None, None] + dc / c[:, None, None]
        )
        g = g + np.einsum("k,kij->ij", r, dcos)
    return g


def project(d: np.ndarray, floor: float = EIG_FLOOR) -> np.ndarray:
    """Nearest symmetric matrix with eigenvalues at least ``floor``."""
    sym = (d + d.T) / 2
    vals, vecs = np.linalg.eigh(sym)
    out = (vecs * np.maximum(vals, floor)) @ vecs.T
    return (out + out.T) / 2


def fit_metric(
    samples: Sequence[Sample],
    reg: float = 0.0,
    dim: int | None = None,
    max_iter: int = 20000,
    tol: float = 1e-14,
    init: np.ndarray | None = None,
) -> FitResult:
    """Projected gradient descent with Barzilai-Borwein steps and backtracking.

    ``dim`` is needed only when ``samples`` is empty.  Iterates whose
    determinant falls below ``DET_FLOOR`` in absolute value are rejected.
    """
    if reg < 0:
        raise ValueError("regularization must be non-negative")
    samples = list(samples)
    if samples:
        V, W, T = _stack(samples)
        n = V.shape[1]
        if dim is not None and dim != n:
            raise DimMismatch(f"dim={dim} but samples have dimension {n}")
    elif dim is None:
        raise ValueError("dim is required when there are no samples")
    else:
        n = dim
        V = W = np.zeros((0, n))
        T = np.zeros(0)

    d = project(np.eye(n) if init is None else np.asarray(init, float))
    f = objective(d, V, W, T, reg)
    g = gradient(d, V, W, T, reg)
    step = 1.0
    converged = f <= tol
    it = 0
    for it in range(1, max_iter + 1):
        if converged or not np.isfinite(f):
            break
        gnorm = np.linalg.norm(g)
        if gnorm < 1e-15:
            converged = True
            break
        accepted = False
        trial = step
        for _ in range(60):
            cand = project(d - trial * g)
            if abs(np.linalg.det(cand)) >= DET_FLOOR:
                fc = objective(cand, V, W, T, reg)
                if fc <= f - 1e-4 * np.sum(g * (d - cand)):
                    accepted = True
                    break
            trial /= 2
        if not accepted:
            break
        gc = gradient(cand, V, W, T, reg)
        s, y = cand - d, gc - g
        sy = float(np.sum(s * y))
        step = float(np.sum(s * s)) / sy if sy > 1e-30 else trial * 2
        step = min(max(step, 1e-10), 1e6)
        d, f, g = cand, fc, gc
        converged = f <= tol
    if abs(np.linalg.det(d)) < DET_FLOOR or not np.isfinite(f):
        raise Degenerate("no nondegenerate metric found")
    log.debug("metric_fit: %d iterations, objective %.3e", it, f)
    return FitResult(Metric.from_matrix((d + d.T) / 2), f, it, converged)


def metric_fit(samples: Sequence[Sample], reg: float = 0.0, **kwargs) -> Metric:
    """Like :func:`fit_metric` but return only the metric."""
    return fit_metric(samples, reg, **kwargs).metric
