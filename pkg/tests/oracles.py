"""Independent reference computations.

Nothing here calls the package's norm, entropy or factorization code; the
oracles use naive loops, closed forms, brute-force grids or scipy routines.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, optimize

PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def loop_partial_trace(m: np.ndarray, da: int, db: int, over: str) -> np.ndarray:
    out = np.zeros((db, db) if over == "first" else (da, da), complex)
    for a in range(da):
        for b in range(db):
            for a2 in range(da):
                for b2 in range(db):
                    v = m[a * db + b, a2 * db + b2]
                    if over == "first" and a == a2:
                        out[b, b2] += v
                    if over == "second" and b == b2:
                        out[a, a2] += v
    return out


def loop_kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k, j * cb + l] = a[i, j] * b[k, l]
    return out


def _mpow(h: np.ndarray, e: float) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * np.maximum(w, 1e-300) ** e) @ v.conj().T


def _sv_norm(x: np.ndarray, p: float) -> float:
    s = np.linalg.svd(x, compute_uv=False)
    return float(s.max()) if p == math.inf else float(np.sum(s**p) ** (1 / p))


def bloch_density(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return (np.eye(2) + np.tensordot(v, PAULI, axes=1)) / 2


def _bloch_grid(center, radius, n):
    g = np.linspace(-radius, radius, n)
    pts = np.stack(np.meshgrid(g, g, g, indexing="ij"), -1).reshape(-1, 3) + center
    return pts[np.linalg.norm(pts, axis=1) < 1 - 1e-9]


def grid_search_bloch(f, minimize: bool = True, levels: int = 8, n: int = 15) -> float:
    """Optimize ``f(sigma)`` over 2x2 densities by nested Bloch-ball grids.

    Each level shrinks the box 4x around the incumbent; eight levels reach a
    spacing near 1e-5 in Bloch coordinates.
    """
    sign = 1 if minimize else -1
    center, radius = np.zeros(3), 1.0
    best_v, best = None, math.inf
    for _ in range(levels):
        for v in _bloch_grid(center, radius, n):
            val = sign * f(bloch_density(v))
            if val < best:
                best, best_v = val, v
        center, radius = best_v, radius / 4
    return sign * best


def inf_form_2x2(m: np.ndarray, p: float, q: float, db: int) -> float:
    """Grid oracle for the inf-form with a 2-dimensional weighted factor."""
    inv_r = 1 / p - (0 if q == math.inf else 1 / q)

    def f(sig):
        k = np.kron(_mpow(sig, -inv_r / 2), np.eye(db))
        return _sv_norm(k @ m @ k, q)

    return grid_search_bloch(f, minimize=True)


def sup_form_2x2(m: np.ndarray, p_inner: float, q_outer: float, db: int) -> float:
    inv_r = 1 / p_inner - (0 if q_outer == math.inf else 1 / q_outer)

    def f(sig):
        k = np.kron(_mpow(sig, inv_r / 2), np.eye(db))
        return _sv_norm(k @ m @ k, p_inner)

    return grid_search_bloch(f, minimize=False)


def classical_cond_renyi(p_yx: np.ndarray, alpha: float) -> float:
    """``H_alpha(X|Y)`` of a classical joint ``p[y, x]``; closed form ``alpha/(1-alpha) log sum_y ||p(y,.)||_alpha``."""
    if alpha == 1:
        py = p_yx.sum(axis=1)
        h = 0.0
        for y in range(p_yx.shape[0]):
            for x in range(p_yx.shape[1]):
                if p_yx[y, x] > 0:
                    h -= p_yx[y, x] * math.log(p_yx[y, x] / py[y])
        return h
    if alpha == math.inf:
        return -math.log(sum(p_yx[y].max() for y in range(p_yx.shape[0])))
    s = sum(sum(v**alpha for v in row) ** (1 / alpha) for row in p_yx)
    return alpha / (1 - alpha) * math.log(s)


def classical_divergence(p, q, alpha: float) -> float:
    if alpha == 1:
        return sum(pi * math.log(pi / qi) for pi, qi in zip(p, q) if pi > 0)
    return math.log(sum(pi**alpha * qi ** (1 - alpha) for pi, qi in zip(p, q))) / (alpha - 1)


def binary_entropy(x: float) -> float:
    if x <= 0 or x >= 1:
        return 0.0
    return -x * math.log(x) - (1 - x) * math.log(1 - x)


def amplitude_damping_coherent_info(gamma: float) -> float:
    """``max_p h((1-gamma) p) - h(gamma p)`` (valid for ``gamma < 1/2``)."""
    res = optimize.minimize_scalar(lambda p: -(binary_entropy((1 - gamma) * p) - binary_entropy(gamma * p)),
                                   bounds=(0, 1), method="bounded", options={"xatol": 1e-12})
    return max(0.0, -res.fun)


def poisson_mass_quad(b: int, x: float, y: float) -> float:
    def k(s):
        return math.sin(math.pi * x) / (2 * (math.cosh(math.pi * (y - s)) - math.cos(math.pi * (x - b))))

    val, _ = integrate.quad(k, y - 40, y + 40, points=[y], epsabs=1e-14, epsrel=1e-13, limit=500)
    return val


def poisson_integral_quad(f, b: int, x: float, y: float) -> float:
    def k(s):
        return f(s) * math.sin(math.pi * x) / (2 * (math.cosh(math.pi * (y - s)) - math.cos(math.pi * (x - b))))

    val, _ = integrate.quad(k, y - 40, y + 40, points=[y], epsabs=1e-13, epsrel=1e-12, limit=500)
    return val


def amplitude_damping_kraus(gamma: float) -> tuple[np.ndarray, np.ndarray]:
    k0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    return k0, k1


def vn_coherent_info_bruteforce(kraus, restarts: int = 6, seed: int = 0) -> float:
    """``max_psi H(Y) - H(YR)`` by Nelder-Mead over real-parameterized pure inputs."""
    d = kraus[0].shape[1]

    def h(rho):
        w = np.linalg.eigvalsh(rho)
        w = w[w > 1e-15]
        return float(-(w * np.log(w)).sum())

    def neg(x):
        v = x[: d * d] + 1j * x[d * d:]
        v = v / np.linalg.norm(v)
        rho = np.outer(v, v.conj())
        out = sum(np.kron(k, np.eye(d)) @ rho @ np.kron(k, np.eye(d)).conj().T for k in kraus)
        dy = kraus[0].shape[0]
        r4 = out.reshape(dy, d, dy, d)
        return -(h(np.einsum("ajbj->ab", r4)) - h(out))

    rng = np.random.default_rng(seed)
    best = math.inf
    for _ in range(restarts):
        res = optimize.minimize(neg, rng.standard_normal(2 * d * d), method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20000, "maxfev": 40000})
        best = min(best, res.fun)
    return -best
