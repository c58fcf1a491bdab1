"""Schatten p-norms and the scalar Hölder / interpolation inequalities."""

from __future__ import annotations

import math

import numpy as np

INF = math.inf

__all__ = ["INF", "as_order", "conjugate", "schatten_norm", "schatten_from_singular",
           "holder_check", "schatten_interp_check", "interp_order"]


def as_order(p) -> float:
    """Normalize a Schatten order; ``inf``/``"inf"``/``"∞"`` all mean the operator norm."""
    if isinstance(p, str):
        s = p.strip().lower()
        if s in ("inf", "infinity", "∞", "oo"):
            return INF
        p = float(s)
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ValueError(f"Schatten order must be >= 1, got {p}")
    return p


def conjugate(p: float) -> float:
    """Hölder conjugate ``p/(p-1)`` with ``1 <-> inf``."""
    p = as_order(p)
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1)


def _inv(p: float) -> float:
    return 0.0 if p == INF else 1.0 / p


def schatten_from_singular(s: np.ndarray, p: float) -> float:
    s = np.abs(np.asarray(s, dtype=float))
    if s.size == 0:
        return 0.0
    smax = s.max()
    if p == INF or smax == 0:
        return float(smax)
    # scaled to avoid overflow for large p
    return float(smax * np.sum((s / smax) ** p) ** (1.0 / p))


def schatten_norm(x: np.ndarray, p) -> float:
    """``(sum_i s_i^p)^(1/p)`` over the singular values of ``x``; ``max s_i`` at ``p = inf``."""
    p = as_order(p)
    x = np.asarray(x)
    if x.ndim != 2:
        raise ValueError("expected a matrix")
    if x.size == 0:
        return 0.0
    return schatten_from_singular(np.linalg.svd(x, compute_uv=False), p)


def holder_check(x: np.ndarray, y: np.ndarray, p, q) -> float:
    """Margin ``||x||_p ||y||_q - ||xy||_r`` where ``1/r = 1/p + 1/q``.

    ``r`` may fall below one (it is then a quasi-norm); Hölder still holds.
    """
    p, q = as_order(p), as_order(q)
    inv_r = _inv(p) + _inv(q)
    s = np.linalg.svd(np.asarray(x) @ np.asarray(y), compute_uv=False)
    if inv_r == 0:
        lhs = float(s.max())
    else:
        smax = s.max()
        lhs = 0.0 if smax == 0 else float(smax * np.sum((s / smax) ** (1 / inv_r)) ** inv_r)
    return schatten_norm(x, p) * schatten_norm(y, q) - lhs


def interp_order(p0, p1, theta: float) -> float:
    """``p_theta`` with ``1/p_theta = (1-theta)/p0 + theta/p1``."""
    inv = (1 - theta) * _inv(as_order(p0)) + theta * _inv(as_order(p1))
    return INF if inv == 0 else 1.0 / inv


def schatten_interp_check(x: np.ndarray, p0, p1, theta: float) -> float:
    """Margin of ``||x||_{p_theta} <= ||x||_{p0}^(1-theta) ||x||_{p1}^theta``."""
    if not 0 <= theta <= 1:
        raise ValueError("theta must lie in [0, 1]")
    s = np.linalg.svd(np.asarray(x), compute_uv=False)
    n0 = schatten_from_singular(s, as_order(p0))
    n1 = schatten_from_singular(s, as_order(p1))
    rhs = n0 ** (1 - theta) * n1**theta
    return rhs - schatten_from_singular(s, interp_order(p0, p1, theta))
