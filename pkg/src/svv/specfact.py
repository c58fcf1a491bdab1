"""Matrix spectral factorization ``T(e^{it}) = A(e^{it})^* A(e^{it})`` with ``A`` outer.

``T`` is a Hermitian matrix trigonometric polynomial, uniformly positive
definite on the circle.  ``A(z) = sum_k A_k z^k`` is found by a Newton
(Wilson-type) iteration on an FFT grid; Bauer's block-Toeplitz Cholesky
method is the fallback.  The strip ``0 <= Re w <= 1`` is handled through the
conformal map ``phi(z) = log(i (1+z)/(1-z)) / (i pi)`` of the unit disk.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .io import cmat_from_json, cmat_to_json
from .linalg import hermitize, rng_for

__all__ = [
    "TrigMatPoly",
    "AnalyticMatPoly",
    "FactorizationError",
    "NotPositiveDefinite",
    "IndeterminateCertificate",
    "OuterCertificate",
    "eval_trig",
    "eval_analytic",
    "random_trig_poly",
    "spectral_factorize",
    "bauer_factorize",
    "factorization_residual",
    "outerness_certificate",
    "conformal_map",
    "conformal_inverse",
    "strip_boundary_angle",
    "StripFactorization",
    "strip_factorize",
]


class FactorizationError(ArithmeticError):
    def __init__(self, msg: str, best_residual: float | None = None):
        super().__init__(msg)
        self.best_residual = best_residual


class NotPositiveDefinite(ValueError):
    pass


class IndeterminateCertificate(ArithmeticError):
    pass


# --- polynomials -------------------------------------------------------------


@dataclass(frozen=True)
class TrigMatPoly:
    """``T(e^{it}) = sum_{n=-N}^{N} C_n e^{int}`` with ``C_{-n} = C_n^*``.

    ``coeffs[n + N]`` holds ``C_n``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 3 or c.shape[1] != c.shape[2] or c.shape[0] % 2 != 1:
            raise ValueError(f"coeffs must have shape (2N+1, d, d), got {c.shape}")
        n = c.shape[0] // 2
        for k in range(n + 1):
            a, b = c[n + k], c[n - k].conj().T
            if np.linalg.norm(a - b) > 1e-12 * max(1.0, np.linalg.norm(a)):
                raise ValueError(f"coefficient symmetry C_-n = C_n^* fails at n={k}")
            avg = (a + b) / 2
            c[n + k], c[n - k] = avg, avg.conj().T
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_nonnegative(cls, pos: list | np.ndarray) -> "TrigMatPoly":
        """Build from ``C_0, ..., C_N``; negative coefficients by symmetry."""
        pos = np.asarray(pos, dtype=complex)
        neg = np.conj(np.transpose(pos[:0:-1], (0, 2, 1)))
        c0 = hermitize(pos[0])
        return cls(np.concatenate([neg, c0[None], pos[1:]]))

    @property
    def d(self) -> int:
        return self.coeffs.shape[1]

    @property
    def N(self) -> int:
        return self.coeffs.shape[0] // 2

    def coeff(self, n: int) -> np.ndarray:
        return self.coeffs[n + self.N] if abs(n) <= self.N else np.zeros((self.d, self.d), complex)

    def __call__(self, t) -> np.ndarray:
        return eval_trig(self, t)

    def grid_values(self, m: int) -> np.ndarray:
        """Values at ``t_j = 2 pi j / m`` via one FFT."""
        if m <= 2 * self.N:
            return eval_trig(self, 2 * np.pi * np.arange(m) / m)
        buf = np.zeros((m, self.d, self.d), complex)
        for n in range(-self.N, self.N + 1):
            buf[n % m] = self.coeff(n)
        vals = np.fft.ifft(buf, axis=0) * m
        return hermitize_batch(vals)

    def min_eigenvalue(self, m: int = 1024) -> float:
        return float(np.linalg.eigvalsh(self.grid_values(m)).min())

    def scaled(self, c: float) -> "TrigMatPoly":
        return TrigMatPoly(self.coeffs * c)

    def to_json(self) -> dict:
        n = self.N
        return {"d": self.d, "N": n,
                "coeffs": {str(k): cmat_to_json(self.coeff(k)) for k in range(-n, n + 1)}}

    @classmethod
    def from_json(cls, obj: dict) -> "TrigMatPoly":
        n, d = int(obj["N"]), int(obj["d"])
        cs = []
        for k in range(-n, n + 1):
            c = cmat_from_json(obj["coeffs"][str(k)])
            if c.shape != (d, d):
                raise ValueError(f"coefficient {k} has shape {c.shape}, expected {(d, d)}")
            cs.append(c)
        return cls(np.array(cs))

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))

    @classmethod
    def load(cls, path) -> "TrigMatPoly":
        return cls.from_json(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class AnalyticMatPoly:
    """``A(z) = sum_{k=0}^{K} A_k z^k``; ``coeffs[k]`` holds ``A_k``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise ValueError(f"coeffs must have shape (K+1, d, d), got {c.shape}")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def d(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def __call__(self, z) -> np.ndarray:
        return eval_analytic(self, z)

    def to_json(self) -> dict:
        return {"d": self.d, "K": self.degree, "coeffs": [cmat_to_json(a) for a in self.coeffs]}


def hermitize_batch(a: np.ndarray) -> np.ndarray:
    return (a + np.conj(np.swapaxes(a, -1, -2))) / 2


def eval_trig(poly: TrigMatPoly, t) -> np.ndarray:
    """``T(e^{it})`` by direct summation, symmetrized; vectorized over ``t``."""
    t = np.asarray(t, dtype=float)
    n = np.arange(-poly.N, poly.N + 1)
    ph = np.exp(1j * np.multiply.outer(t, n))
    return hermitize_batch(np.tensordot(ph, poly.coeffs, axes=([-1], [0])))


def eval_analytic(poly: AnalyticMatPoly, z) -> np.ndarray:
    """``A(z)`` by Horner's rule; vectorized over ``z``."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape + (poly.d, poly.d), dtype=complex)
    for a in poly.coeffs[::-1]:
        out = out * z[..., None, None] + a
    return out


def random_trig_poly(d: int, n: int, seed=None, margin: float = 0.1) -> TrigMatPoly:
    """Random uniformly positive-definite symbol of dimension ``d`` and band ``n``."""
    rng = rng_for(seed)
    pos = []
    for _ in range(n):
        pos.append(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    shift = 2 * sum(np.linalg.norm(c, 2) for c in pos) + margin
    c0 = g @ g.conj().T / d + shift * np.eye(d)
    return TrigMatPoly.from_nonnegative([c0] + pos)


# --- factorization -----------------------------------------------------------


def _analytic_grid(a: np.ndarray, m: int) -> np.ndarray:
    buf = np.zeros((m,) + a.shape[1:], complex)
    k = min(a.shape[0], m)
    buf[:k] = a[:k]
    return np.fft.ifft(buf, axis=0) * m


def factorization_residual(poly: TrigMatPoly, a: AnalyticMatPoly, m: int = 4096) -> float:
    """``max_t ||A^* A - T||_F`` over ``m`` equispaced points."""
    av = _analytic_grid(a.coeffs, m)
    prod = np.conj(np.swapaxes(av, 1, 2)) @ av
    return float(np.linalg.norm(prod - poly.grid_values(m), axis=(1, 2)).max())


def _fix_gauge(a: np.ndarray) -> np.ndarray:
    """Left-multiply by a constant unitary so that ``A_0`` is PSD."""
    u, s, wh = np.linalg.svd(a[0])
    v = u @ wh
    return np.einsum("ij,kjl->kil", v.conj().T, a)


def _check_pd(poly: TrigMatPoly, m: int = 1024) -> bool:
    """True when uniformly positive definite; False for a scalar symbol with boundary zeros."""
    lam = poly.min_eigenvalue(m)
    scale = max(1.0, float(np.abs(poly.coeffs).max()))
    if lam > 1e-12 * scale:
        return True
    if poly.d == 1 and lam >= -1e-10 * scale:
        return False
    raise NotPositiveDefinite(f"symbol is not positive definite on the grid (min eig {lam:.3e})")


def _cluster_mean(roots: np.ndarray, tol: float) -> list[complex]:
    """Merge numerically split multiple roots into their centroid."""
    left = list(roots)
    out = []
    while left:
        r = left.pop(0)
        group = [r] + [x for x in left if abs(x - r) < tol]
        left = [x for x in left if abs(x - r) >= tol]
        out.extend([complex(np.mean(group))] * len(group))
    return out


def _scalar_roots_factorize(poly: TrigMatPoly) -> AnalyticMatPoly:
    """Fejer-Riesz factor of a nonnegative scalar symbol via polynomial roots.

    Roots of ``z^N T(z)`` pair as ``(r, 1/conj(r))``; the outer factor keeps
    those outside the disk and half of each (even-multiplicity) boundary root.
    """
    n = poly.N
    c = np.array([poly.coeff(k)[0, 0] for k in range(-n, n + 1)])
    roots = np.roots(c[::-1]) if n > 0 else np.array([])
    roots = np.array(_cluster_mean(roots, 1e-3)) if roots.size else roots  # k-fold roots split ~eps^(1/k)
    mod = np.abs(roots)
    outside = list(roots[mod > 1 + 1e-6])
    on = sorted(roots[np.abs(mod - 1) <= 1e-6], key=lambda r: (round(np.angle(r), 6), r.real))
    keep = outside + on[::2]
    if len(keep) != n:
        raise FactorizationError(f"root pairing failed ({len(keep)} roots kept for degree {n})")
    p = np.poly(keep)[::-1] if keep else np.array([1.0 + 0j])
    t = np.linspace(0, 2 * np.pi, 257)
    pv = np.polyval(p[::-1], np.exp(1j * t))
    k = int(np.argmax(np.abs(pv)))
    tv = float(eval_trig(poly, t[k])[0, 0].real)
    scale = math.sqrt(tv) / abs(pv[k])
    phase = np.conj(p[0]) / abs(p[0])
    return AnalyticMatPoly((scale * phase * p)[:, None, None])


def _newton(poly: TrigMatPoly, m: int, tol: float, max_iter: int, a0: np.ndarray):
    d = poly.d
    tv = poly.grid_values(m)
    eye = np.eye(d)
    a = _analytic_grid(a0, m)
    best = (np.inf, a)
    for it in range(max_iter):
        prod = np.conj(np.swapaxes(a, 1, 2)) @ a
        res = float(np.linalg.norm(prod - tv, axis=(1, 2)).max())
        if res < best[0]:
            best = (res, a)
        if res <= tol:
            return a, res, it
        ainv = np.linalg.inv(a)
        g = np.conj(np.swapaxes(ainv, 1, 2)) @ tv @ ainv - eye
        c = np.fft.fft(g, axis=0) / m
        c[0] = hermitize(c[0]) / 2
        c[m // 2 + 1:] = 0
        if m % 2 == 0:
            c[m // 2] = 0
        x = np.fft.ifft(c, axis=0) * m
        a = (eye + x) @ a
        if it > 8 and res > 0.5 * best[0] and res >= best[0]:
            break
    return best[1], best[0], max_iter


def bauer_factorize(poly: TrigMatPoly, size: int = 200) -> AnalyticMatPoly:
    """Bauer's method: Cholesky of the block Toeplitz matrix ``[C_{j-i}]``.

    Row blocks of the upper Cholesky factor far from the top converge to the
    outer factor coefficients ``(A_0, ..., A_N)``; the last full row is used.
    """
    d, n = poly.d, poly.N
    size = max(size, n + 2)
    big = np.zeros((size * d, size * d), complex)
    for i in range(size):
        for j in range(max(0, i - n), min(size, i + n + 1)):
            big[i * d:(i + 1) * d, j * d:(j + 1) * d] = poly.coeff(j - i)
    lower = np.linalg.cholesky(hermitize(big))
    u = lower.conj().T
    row = size - n - 1
    coeffs = np.array([u[row * d:(row + 1) * d, (row + k) * d:(row + k + 1) * d] for k in range(n + 1)])
    return AnalyticMatPoly(_fix_gauge(coeffs))


def spectral_factorize(poly: TrigMatPoly, tol: float = 1e-10, max_iter: int = 100,
                       grid: int = 4096, init: str | np.ndarray = "cholesky",
                       max_grid: int = 32768) -> AnalyticMatPoly:
    """Outer factor ``A`` of degree ``N`` with ``A^* A = T`` and ``A(0)`` PSD.

    Scalar symbols that touch zero on the circle are factored exactly from
    their roots; matrix symbols must be uniformly positive definite.

    ``tol`` bounds ``max_t ||A^* A - T||_F`` on the ``grid``-point mesh (scaled
    by ``max(1, ||C_0||)``).  The grid doubles, up to ``max_grid``, when the
    check on a twice-finer mesh exceeds ``10 tol``.  Falls back to
    :func:`bauer_factorize` when the Newton iteration stagnates.
    """
    if not _check_pd(poly):
        return _scalar_roots_factorize(poly)
    d, n = poly.d, poly.N
    scale = max(1.0, float(np.linalg.norm(poly.coeff(0), 2)))
    atol = tol * scale
    if isinstance(init, str):
        if init == "cholesky":
            a0 = np.linalg.cholesky(hermitize(poly.coeff(0))).conj().T[None]
        elif init == "identity":
            a0 = math.sqrt(scale) * np.eye(d, dtype=complex)[None]
        else:
            raise ValueError(f"unknown init {init!r}")
    else:
        a0 = np.asarray(init, dtype=complex)
        if a0.ndim == 2:
            a0 = a0[None]
    m = grid
    best_res = np.inf
    while m <= max_grid:
        a_grid, res, _ = _newton(poly, m, atol / 10, max_iter, a0)
        coeffs = (np.fft.fft(a_grid, axis=0) / m)[: n + 1]
        cand = AnalyticMatPoly(_fix_gauge(coeffs))
        res = factorization_residual(poly, cand, m)
        fine = factorization_residual(poly, cand, 2 * m)
        best_res = min(best_res, fine)
        if res <= atol and fine <= 10 * atol:
            return cand
        m *= 2
    cand = bauer_factorize(poly, size=400)
    res = factorization_residual(poly, cand, grid)
    if res <= atol:
        return cand
    raise FactorizationError(f"stagnated with residual {min(best_res, res):.3e}",
                             min(best_res, res))


# --- outerness ---------------------------------------------------------------


@dataclass(frozen=True)
class OuterCertificate:
    winding: int
    min_abs_det: float
    boundary_min_abs_det: float

    @property
    def outer(self) -> bool:
        return self.winding == 0 and self.min_abs_det > 0


def outerness_certificate(a: AnalyticMatPoly, samples: int = 8192,
                          radii=(0.0, 0.25, 0.5, 0.75, 0.95), angles: int = 256) -> OuterCertificate:
    """Winding number of ``det A(e^{it})`` and the smallest ``|det A(z)|`` inside the disk."""
    t = 2 * np.pi * np.arange(samples) / samples
    det_b = np.linalg.det(a(np.exp(1j * t)))
    bmin = float(np.abs(det_b).min())
    if bmin < 1e-12:
        raise IndeterminateCertificate(f"det A vanishes on the boundary grid ({bmin:.3e})")
    ph = np.unwrap(np.angle(np.append(det_b, det_b[0])))
    winding = int(round((ph[-1] - ph[0]) / (2 * np.pi)))
    th = 2 * np.pi * np.arange(angles) / angles
    z = np.concatenate([r * np.exp(1j * th) for r in radii])
    imin = float(np.abs(np.linalg.det(a(z))).min())
    return OuterCertificate(winding, imin, bmin)


# --- strip -------------------------------------------------------------------


def conformal_map(z):
    """Disk to strip: ``phi(z) = log(i (1+z)/(1-z)) / (i pi)``."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1):
        raise ValueError("conformal_map needs |z| < 1")
    return np.log(1j * (1 + z) / (1 - z)) / (1j * np.pi)


def conformal_inverse(w):
    """Strip to disk, inverse of :func:`conformal_map`."""
    w = np.asarray(w, dtype=complex)
    if np.any((w.real <= 0) | (w.real >= 1)):
        raise ValueError("conformal_inverse needs 0 < Re w < 1")
    u = np.exp(1j * np.pi * w) / 1j
    return (u - 1) / (u + 1)


def strip_boundary_angle(b: int, s):
    """Angle ``tau`` with ``phi(e^{i tau}) = b + i s`` (``tau`` in ``(0, pi)`` for ``b = 1``)."""
    s = np.asarray(s, dtype=float)
    tau = 2 * np.arctan(np.exp(np.pi * s))
    if b == 1:
        return tau
    if b == 0:
        return -tau
    raise ValueError("b must be 0 or 1")


def _boundary_point(tau: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(b, s)`` for circle angles in ``(-pi, pi)``, excluding ``0`` and ``pi``."""
    b = (tau > 0).astype(int)
    s = np.log(np.abs(np.tan(tau / 2))) / np.pi
    return b, s


def _sampler(f) -> Callable[[np.ndarray], np.ndarray]:
    if callable(f):
        return lambda s: np.asarray(f(s), dtype=complex)
    s_grid, vals = f
    s_grid = np.asarray(s_grid, dtype=float)
    vals = np.asarray(vals, dtype=complex)
    if np.any(np.diff(s_grid) <= 0):
        raise ValueError("sample grid must be increasing")

    def interp(s):
        s = np.clip(np.asarray(s, dtype=float), s_grid[0], s_grid[-1])
        flat = vals.reshape(len(s_grid), -1)
        out = np.empty((s.size, flat.shape[1]), complex)
        for k in range(flat.shape[1]):
            out[:, k] = (np.interp(s, s_grid, flat[:, k].real)
                         + 1j * np.interp(s, s_grid, flat[:, k].imag))
        return out.reshape(s.shape + vals.shape[1:])

    return interp


@dataclass(frozen=True)
class StripFactorization:
    """Factor ``A`` on the strip with ``T_b(b+is) = A(b+is)^* A(b+is)``."""

    disk_factor: AnalyticMatPoly
    symbol: TrigMatPoly
    fit_error: float
    residual: float

    def __call__(self, w) -> np.ndarray:
        return self.disk_factor(conformal_inverse(w))

    def boundary(self, b: int, s) -> np.ndarray:
        return self.disk_factor(np.exp(1j * strip_boundary_angle(b, s)))


def strip_factorize(t0, t1, lam_floor: float, tol: float = 1e-6, band: int = 16,
                    samples: int = 2048, fit_tol: float | None = None) -> StripFactorization:
    """Factor boundary data ``T_0(s), T_1(s)`` on the strip.

    ``t0``/``t1`` are callables ``s -> (len(s), d, d)`` or ``(s_grid, values)``
    pairs (linear interpolation, constant extension past the ends).  The data
    are pulled back to the circle, least-squares fitted by a band-``band``
    trigonometric polynomial, factored, and pushed forward.  ``fit_error`` and
    ``residual`` (factor against the raw pulled-back data) are reported
    separately; a fit error above ``fit_tol`` raises with advice to raise
    ``band``.
    """
    f0, f1 = _sampler(t0), _sampler(t1)
    tau = 2 * np.pi * (np.arange(samples) + 0.5) / samples - np.pi
    b, s = _boundary_point(tau)
    v0, v1 = f0(s[b == 0]), f1(s[b == 1])
    d = v0.shape[-1]
    vals = np.empty((samples, d, d), complex)
    vals[b == 0], vals[b == 1] = v0, v1
    vals = hermitize_batch(vals)
    if np.linalg.eigvalsh(vals).min() < lam_floor:
        raise NotPositiveDefinite("boundary data fall below lam_floor")
    n = np.arange(-band, band + 1)
    design = np.exp(1j * np.outer(tau, n))
    coef, *_ = np.linalg.lstsq(design, vals.reshape(samples, -1), rcond=None)
    coef = coef.reshape(len(n), d, d)
    coef = (coef + np.conj(np.transpose(coef[::-1], (0, 2, 1)))) / 2
    poly = TrigMatPoly(coef)
    fitted = eval_trig(poly, tau)
    fit_error = float(np.linalg.norm(fitted - vals, axis=(1, 2)).max())
    if fit_tol is not None and fit_error > fit_tol:
        raise FactorizationError(
            f"Fourier fit error {fit_error:.3e} exceeds {fit_tol:.3e}; increase the band", fit_error)
    a = spectral_factorize(poly, tol=min(tol, 1e-10))
    av = a(np.exp(1j * tau))
    residual = float(np.linalg.norm(np.conj(np.swapaxes(av, 1, 2)) @ av - vals, axis=(1, 2)).max())
    return StripFactorization(a, poly, fit_error, residual)
