"""Operator-valued Schatten norms ``||m||_(p,q)`` by variational optimization.

For a PSD operator ``m`` on ``A (x) B`` (``A`` is the factor the weights act
on) and ``1/p = 1/q + 1/r``:

* inf-form, ``p <= q``::

      ||m||_(p,q) = inf_sigma || (sigma^{-1/2r} (x) I) m (sigma^{-1/2r} (x) I) ||_q

* sup-form, inner order ``p <= `` outer order ``q``::

      ||m||_(q,p) = sup_sigma || (sigma^{1/2r} (x) I) m (sigma^{1/2r} (x) I) ||_p

with ``sigma`` ranging over density matrices on ``A`` (``sigma^{1/2r}`` has unit
``2r``-Schatten norm).  ``sigma`` is parameterized as ``exp(H) / tr exp(H)``
and the smooth objective is minimized with L-BFGS using exact gradients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp

from .linalg import BipartiteOp, eigh, haar_unitary, hermitize, partial_trace, rng_for, derive_seed
from .schatten import INF, as_order, schatten_from_singular, schatten_norm

__all__ = [
    "PQQuery",
    "PQResult",
    "inf_form_value",
    "sup_form_value",
    "pq_norm_inf_positive",
    "pq_norm_sup_positive",
    "pq_norm_hermitian_upper",
    "norm_1alpha",
    "trivial_bracket",
]

EXACT, UPPER, LOWER = "exact", "upper", "lower"
SIGMA_FLOOR = 1e-12


@dataclass(frozen=True)
class PQQuery:
    """Parameters of a variational norm evaluation.

    For the sup-form ``q`` is the outer order and ``p`` the inner Schatten
    order; both forms need ``p <= q``.
    """

    p: float = 1.0
    q: float = INF
    tol: float = 1e-7
    max_iter: int = 2000
    restarts: int = 8
    seed: int = 0

    def __post_init__(self):
        p, q = as_order(self.p), as_order(self.q)
        if p > q:
            raise ValueError(f"need p <= q, got p={p}, q={q}")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def r(self) -> float:
        inv = (1 / self.p) - (0 if self.q == INF else 1 / self.q)
        return INF if inv <= 0 else 1 / inv


@dataclass(frozen=True)
class PQResult:
    """Outcome of a variational evaluation.

    ``optimizer`` is the density matrix ``sigma`` on the weighted factor; the
    weight itself is ``sigma^{1/2r}``.  ``lower`` is a certified lower bound
    when one is known (duality or trivial bracket), else ``None``.
    """

    value: float
    optimizer: np.ndarray
    iterations: int
    converged: bool
    bound_kind: str
    spread: float = 0.0
    lower: float | None = None
    history: tuple[float, ...] = field(default=(), repr=False)
    restart_values: tuple[float, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        from .io import cmat_to_json

        return {
            "value": self.value,
            "bound_kind": self.bound_kind,
            "converged": self.converged,
            "iterations": self.iterations,
            "spread": self.spread,
            "lower": self.lower,
            "optimizer": cmat_to_json(self.optimizer),
        }


# --- direct evaluations (no parameterization) -------------------------------


def _weighted(m: np.ndarray, k: np.ndarray, db: int) -> np.ndarray:
    kk = np.kron(k, np.eye(db))
    return hermitize(kk @ m @ kk)


def _power_of_density(sigma: np.ndarray, exponent: float, floor: float) -> np.ndarray:
    lam, v = eigh(sigma)
    lam = np.maximum(lam, floor * max(lam[-1], 0.0))
    lam = lam / lam.sum()
    return (v * lam**exponent) @ v.conj().T


def _herm_schatten(g: np.ndarray, q: float) -> float:
    return schatten_from_singular(np.linalg.eigvalsh(g), q)


def inf_form_value(m: BipartiteOp, sigma: np.ndarray, p, q, floor: float = SIGMA_FLOOR) -> float:
    """Feasible (upper-bound) value of the inf-form at the density ``sigma``.

    Eigenvalues of ``sigma`` below ``floor * max`` are raised before inversion.
    """
    p, q = as_order(p), as_order(q)
    inv_r = 1 / p - (0 if q == INF else 1 / q)
    if inv_r <= 0:
        return _herm_schatten(m.mat, q)
    k = _power_of_density(sigma, -inv_r / 2, floor)
    return _herm_schatten(_weighted(m.mat, k, m.dim_b), q)


def sup_form_value(m: BipartiteOp, sigma: np.ndarray, q_outer, p_inner) -> float:
    """Feasible (lower-bound) value of the sup-form at the density ``sigma``."""
    p, q = as_order(p_inner), as_order(q_outer)
    inv_r = 1 / p - (0 if q == INF else 1 / q)
    if inv_r <= 0:
        return _herm_schatten(m.mat, p)
    k = _power_of_density(sigma, inv_r / 2, 0.0)
    return _herm_schatten(_weighted(m.mat, k, m.dim_b), p)


def trivial_bracket(m: BipartiteOp, p, q) -> tuple[float, float]:
    """Bounds ``max(||m||_q, d_B^{-1/r} ||m||_p) <= ||m||_(p,q) <= d_A^{1/r} ||m||_q``."""
    p, q = as_order(p), as_order(q)
    inv_r = 1 / p - (0 if q == INF else 1 / q)
    s = np.linalg.svd(m.mat, compute_uv=False)
    nq, np_ = schatten_from_singular(s, q), schatten_from_singular(s, p)
    return max(nq, m.dim_b ** (-inv_r) * np_), m.dim_a**inv_r * nq


# --- smooth objective --------------------------------------------------------


# the weight e^{sH} sees the spectrum of H clipped to [-c, c], which keeps
# line-search probes finite; inside the box the objective is unchanged
H_CLAMP = 60.0


def _sinhc(x: np.ndarray) -> np.ndarray:
    out = np.ones_like(x)
    big = np.abs(x) > 1e-8
    out[big] = np.sinh(x[big]) / x[big]
    return out


class _Objective:
    """``scale * [(1/q) log tr G^q - 2 s log tr e^H]`` with ``G = (e^{sH} (x) I) m (e^{sH} (x) I)``.

    ``s = -1/2r`` gives the inf-form, ``s = +1/2r`` the sup-form.
    """

    def __init__(self, m: np.ndarray, dims: tuple[int, int], s: float, q: float, scale: float):
        self.m = m
        self.da, self.db = dims
        self.s, self.q, self.scale = s, q, scale
        d = self.da
        self.iu = np.triu_indices(d, 1)
        self.n_off = len(self.iu[0])
        self.trace = []

    def to_h(self, x: np.ndarray) -> np.ndarray:
        d = self.da
        h = np.zeros((d, d), dtype=complex)
        h[np.diag_indices(d)] = x[:d]
        off = (x[d:d + self.n_off] + 1j * x[d + self.n_off:]) / math.sqrt(2)
        h[self.iu] = off
        h[self.iu[::-1]] = off.conj()
        return h

    def from_h(self, h: np.ndarray) -> np.ndarray:
        d = self.da
        off = h[self.iu] * math.sqrt(2)
        return np.concatenate([h.diagonal().real, off.real, off.imag])

    def _grad_vec(self, g: np.ndarray) -> np.ndarray:
        d = self.da
        off = g[self.iu] * math.sqrt(2)
        return np.concatenate([g.diagonal().real, off.real, off.imag])

    def __call__(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        s, q, db = self.s, self.q, self.db
        hmat = self.to_h(x)
        h, u = eigh(hmat)
        hc = np.clip(h, -H_CLAMP, H_CLAMP)
        kdiag = np.exp(s * hc)
        k = (u * kdiag) @ u.conj().T
        kk = np.kron(k, np.eye(db))
        gam = hermitize(kk @ self.m @ kk)
        lam, w = eigh(gam)
        lam = np.clip(lam, 0.0, None)
        lmax = lam[-1]
        if lmax <= 0:
            raise FloatingPointError("weighted operator vanished")
        lh = lam / lmax
        z = np.sum(lh**q)
        lse = float(logsumexp(h))
        f = math.log(lmax) + math.log(z) / q - 2 * s * lse
        # gradient: d f = tr(P dG), P = G^{q-1} / tr G^q
        pw = (w * (lh ** (q - 1) / (lmax * z))) @ w.conj().T
        t = (self.m @ kk @ pw).reshape(self.da, db, self.da, db)
        gpart = np.einsum("ajbj->ab", t)
        gh = gpart + gpart.conj().T
        # Daleckii-Krein for H -> e^{sH}
        # divided differences of h -> e^{s clip(h)}
        ci, cj = hc[:, None], hc[None, :]
        diff = h[:, None] - h[None, :]
        apart = np.abs(diff) > 1e-12
        inside = (np.abs(h) < H_CLAMP)[:, None] * 1.0
        ratio = np.where(apart, (ci - cj) / np.where(apart, diff, 1.0), inside)
        lmat = s * np.exp(s * (ci + cj) / 2) * _sinhc(s * (ci - cj) / 2) * ratio
        xmat = u @ (lmat * (u.conj().T @ gh @ u)) @ u.conj().T
        sigma = (u * np.exp(h - lse)) @ u.conj().T
        grad = hermitize(xmat - 2 * s * sigma)
        self.last = f
        return self.scale * f, self.scale * self._grad_vec(grad)

    def sigma(self, x: np.ndarray) -> np.ndarray:
        h, u = eigh(self.to_h(x))
        e = np.exp(h - h[-1])
        return hermitize((u * (e / e.sum())) @ u.conj().T)


def _log_h_of(sigma: np.ndarray, floor: float = 1e-8) -> np.ndarray:
    lam, v = eigh(sigma)
    lam = np.maximum(lam, floor * lam[-1])
    return hermitize((v * np.log(lam)) @ v.conj().T)


def _starts(m: BipartiteOp, n: int, seed: int, extra: list[np.ndarray] = ()) -> list[np.ndarray]:
    d = m.dim_a
    marg = hermitize(partial_trace(m, "second"))
    tr = np.trace(marg).real
    sig = [np.eye(d) / d]
    if n > 1 and tr > 0:
        sig.append(marg / tr)
    sig.extend(extra)
    i = 0
    while len(sig) < n:
        rng = rng_for(derive_seed(seed, i))
        u = haar_unitary(d, rng)
        lam = rng.dirichlet(np.ones(d))
        sig.append((u * lam) @ u.conj().T)
        i += 1
    return sig[:n]


def _run(obj: _Objective, sigma0: np.ndarray, max_iter: int):
    x0 = obj.from_h(_log_h_of(sigma0))
    hist = []

    def cb(xk):
        hist.append(obj.last / 1.0)

    res = minimize(obj, x0, jac=True, method="L-BFGS-B", callback=cb,
                   options={"maxiter": max_iter, "maxcor": 30, "ftol": 1e-16,
                            "gtol": 1e-12, "maxls": 50})
    gnorm = float(np.linalg.norm(res.jac)) if res.jac is not None else np.inf
    converged = bool(res.success) or gnorm <= 1e-6 * max(1.0, abs(obj.scale))
    return res.x, int(res.nit), converged, hist


def _check_psd(m: BipartiteOp, tol: float = 1e-10) -> None:
    lam = np.linalg.eigvalsh(hermitize(m.mat))
    scale = max(1.0, abs(lam).max())
    if np.linalg.norm(m.mat - m.mat.conj().T) > 1e-10 * max(1.0, np.linalg.norm(m.mat)):
        raise ValueError("operator is not Hermitian")
    if lam[0] < -tol * scale:
        raise ValueError(f"operator is not PSD (eigenvalue {lam[0]:.3e})")


def _zero_result(d: int, kind: str = EXACT) -> PQResult:
    return PQResult(0.0, np.eye(d, dtype=complex) / d, 0, True, kind, 0.0, 0.0)


# --- public evaluators -------------------------------------------------------


def pq_norm_inf_positive(m: BipartiteOp, query: PQQuery = PQQuery()) -> PQResult:
    """``||m||_(p,q)`` for PSD ``m`` via the inf-form; weights on the first factor.

    Every iterate is a feasible factorization, so ``value`` is always an upper
    bound.  It is reported ``exact`` when restarts agree to ``tol`` relative
    (or, at ``q = inf, p = 1``, when the SDP duality gap is below ``tol``).
    """
    _check_psd(m)
    p, q, r = query.p, query.q, query.r
    da = m.dim_a
    if np.linalg.norm(m.mat) == 0:
        return _zero_result(da)
    if r == INF:
        val = _herm_schatten(m.mat, q)
        return PQResult(val, np.eye(da, dtype=complex) / da, 0, True, EXACT, 0.0, val)
    if q == INF:
        if p == 1:
            return _inf_one_sdp(m, query)
        return _inf_infinite_smoothed(m, query)

    obj = _Objective(m.mat, m.dims, -1 / (2 * r), q, r)
    best = None
    values, total_it, hist0 = [], 0, ()
    for i, s0 in enumerate(_starts(m, query.restarts, query.seed)):
        x, nit, conv, hist = _run(obj, s0, query.max_iter)
        sigma = obj.sigma(x)
        val = inf_form_value(m, sigma, p, q)
        values.append(val)
        total_it += nit
        if i == 0:
            hist0 = tuple(math.exp(h / 1.0) for h in hist)
        if best is None or val < best[0]:
            best = (val, sigma, conv)
    spread = max(values) - min(values)
    kind = EXACT if spread <= query.tol * best[0] else UPPER
    lo, _ = trivial_bracket(m, p, q)
    return PQResult(best[0], best[1], total_it, best[2], kind, spread, lo, hist0, tuple(values))


def _solve(prob, max_iter: int) -> None:
    import warnings

    import cvxpy as cp

    # the value is bracketed by independently certified bounds, so cvxpy's
    # accuracy warning is noise; catch_warnings is not thread-safe, hence a filter
    warnings.filterwarnings("ignore", message="Solution may be inaccurate", module="cvxpy")
    try:
        prob.solve(solver=cp.CLARABEL, max_iter=max_iter, tol_gap_abs=1e-11,
                   tol_gap_rel=1e-11, tol_feas=1e-11)
    except cp.error.SolverError:
        prob.solve(solver=cp.SCS, eps=1e-10, max_iters=100000)


def _inf_one_sdp(m: BipartiteOp, query: PQQuery) -> PQResult:
    """``||m||_(1,inf) = min tr Z  s.t.  Z (x) I >= m``, bracketed by its dual.

    The dual ``max tr(W m)  s.t.  tr_B W = I, W >= 0`` is solved separately;
    after projecting ``W`` to PSD and rescaling so ``tr_B W <= I`` it is a
    certified lower bound.  The upper bound is the exact objective at the
    floored, normalized ``Z``.
    """
    import cvxpy as cp

    da, db = m.dims
    scale = float(np.abs(np.linalg.eigvalsh(m.mat)).max())
    mm = hermitize(m.mat) / scale
    z = cp.Variable((da, da), hermitian=True)
    primal = cp.Problem(cp.Minimize(cp.real(cp.trace(z))), [cp.kron(z, np.eye(db)) - mm >> 0])
    _solve(primal, query.max_iter)
    sigma = np.eye(da, dtype=complex) / da
    if z.value is not None:
        lam, v = eigh(np.asarray(z.value))
        lam = np.clip(lam, 0, None)
        if lam.sum() > 0:
            sigma = hermitize((v * lam) @ v.conj().T / lam.sum())
    upper = inf_form_value(m, sigma, 1, INF)

    w = cp.Variable((da * db, da * db), hermitian=True)
    dual = cp.Problem(cp.Maximize(cp.real(cp.trace(w @ mm))),
                      [w >> 0, cp.partial_trace(w, (da, db), axis=1) == np.eye(da)])
    _solve(dual, query.max_iter)
    lower = None
    if w.value is not None:
        wl, wv = eigh(np.asarray(w.value))
        wp = (wv * np.clip(wl, 0, None)) @ wv.conj().T
        marg_max = np.linalg.eigvalsh(hermitize(partial_trace(wp, "second", (da, db))))[-1]
        if marg_max > 0:
            lower = min(float(np.trace(wp @ mm).real / marg_max) * scale, upper)
    gap = upper - lower if lower is not None else np.inf
    kind = EXACT if gap <= query.tol * upper else UPPER
    conv = primal.status in ("optimal", "optimal_inaccurate")
    return PQResult(upper, sigma, 0, conv, kind, gap, lower)


def _inf_infinite_smoothed(m: BipartiteOp, query: PQQuery) -> PQResult:
    """``q = inf`` with ``p > 1``: minimize a large-``q`` surrogate, then evaluate exactly."""
    p = query.p
    sigma = None
    for q_s in (16.0, 64.0, 256.0):
        qq = PQQuery(p=p, q=q_s, tol=query.tol, max_iter=query.max_iter,
                     restarts=query.restarts if sigma is None else 1, seed=query.seed)
        r = qq.r
        obj = _Objective(m.mat, m.dims, -1 / (2 * r), q_s, r)
        starts = _starts(m, qq.restarts, query.seed) if sigma is None else [sigma]
        cands = []
        for s0 in starts:
            x, _, _, _ = _run(obj, s0, query.max_iter)
            sg = obj.sigma(x)
            cands.append((inf_form_value(m, sg, p, INF), sg))
        sigma = min(cands, key=lambda c: c[0])[1]
    val = inf_form_value(m, sigma, p, INF)
    lo, _ = trivial_bracket(m, p, INF)
    return PQResult(val, sigma, 0, True, UPPER, 0.0, lo)


def pq_norm_sup_positive(m: BipartiteOp, query: PQQuery = PQQuery()) -> PQResult:
    """``||m||_(q,p)`` for PSD ``m`` by multistart maximization of the sup-form.

    ``query.q`` is the outer order, ``query.p`` the inner Schatten order.
    Every iterate is feasible, so ``value`` is a lower bound; it is reported
    ``exact`` when restarts agree to ``tol`` relative.
    """
    _check_psd(m)
    p, q, r = query.p, query.q, query.r
    da = m.dim_a
    if np.linalg.norm(m.mat) == 0:
        return _zero_result(da)
    if r == INF:
        val = _herm_schatten(m.mat, p)
        return PQResult(val, np.eye(da, dtype=complex) / da, 0, True, EXACT, 0.0, val)
    # top eigenvector of the marginal is optimal for product inputs at p = 1
    marg = hermitize(partial_trace(m, "second"))
    lam, v = eigh(marg)
    top = 0.9 * np.outer(v[:, -1], v[:, -1].conj()) + 0.1 * np.eye(da) / da
    obj = _Objective(m.mat, m.dims, 1 / (2 * r), p, -r)
    best, values, total_it, hist0 = None, [], 0, ()
    for i, s0 in enumerate(_starts(m, query.restarts, query.seed, [top])):
        x, nit, conv, hist = _run(obj, s0, query.max_iter)
        sigma = obj.sigma(x)
        val = sup_form_value(m, sigma, q, p)
        values.append(val)
        total_it += nit
        if i == 0:
            hist0 = tuple(math.exp(h) for h in hist)
        if best is None or val > best[0]:
            best = (val, sigma, conv)
    spread = max(values) - min(values)
    kind = EXACT if spread <= query.tol * best[0] else LOWER
    return PQResult(best[0], best[1], total_it, best[2], kind, spread, best[0], hist0, tuple(values))


def pq_norm_hermitian_upper(m: BipartiteOp, query: PQQuery = PQQuery()) -> PQResult:
    """Upper bound ``||m_+||_(p,q) + ||m_-||_(p,q)`` from the Jordan decomposition.

    Exact when ``p == q`` (plain Schatten norm) or when ``m`` is semidefinite.
    ``lower`` holds the trivial lower bound ``max(||m||_q, d_B^{-1/r} ||m||_p)``.
    """
    if np.linalg.norm(m.mat - m.mat.conj().T) > 1e-10 * max(1.0, np.linalg.norm(m.mat)):
        raise ValueError("operator is not Hermitian")
    da = m.dim_a
    lo, _ = trivial_bracket(m, query.p, query.q)
    if query.r == INF:
        val = _herm_schatten(m.mat, query.q)
        return PQResult(val, np.eye(da, dtype=complex) / da, 0, True, EXACT, 0.0, val)
    lam, v = eigh(m.mat)
    scale = max(1.0, abs(lam).max())
    lam = np.where(np.abs(lam) <= 1e-14 * scale, 0.0, lam)
    parts = []
    for sign in (1, -1):
        part = np.clip(sign * lam, 0, None)
        if np.any(part > 0):
            parts.append(BipartiteOp(hermitize((v * part) @ v.conj().T), m.dims))
    if not parts:
        return _zero_result(da)
    res = [pq_norm_inf_positive(pm, query) for pm in parts]
    if len(res) == 1:
        r0 = res[0]
        return PQResult(r0.value, r0.optimizer, r0.iterations, r0.converged, r0.bound_kind,
                        r0.spread, r0.lower)
    total = res[0].value + res[1].value
    return PQResult(total, res[0].optimizer, res[0].iterations + res[1].iterations,
                    res[0].converged and res[1].converged, UPPER,
                    res[0].spread + res[1].spread, lo)


def norm_1alpha(m: BipartiteOp, alpha, query: PQQuery | None = None, **opts) -> PQResult:
    """``||m||_(1,alpha)`` for PSD ``m``, conditioning (weights) on the first factor.

    At ``alpha == 1`` this is the trace norm and is returned directly.
    """
    alpha = as_order(alpha)
    base = query or PQQuery()
    q = PQQuery(p=1.0, q=alpha, tol=opts.get("tol", base.tol),
                max_iter=opts.get("max_iter", base.max_iter),
                restarts=opts.get("restarts", base.restarts), seed=opts.get("seed", base.seed))
    if alpha == 1:
        _check_psd(m)
        val = float(schatten_norm(m.mat, 1))
        d = m.dim_a
        return PQResult(val, np.eye(d, dtype=complex) / d, 0, True, EXACT, 0.0, val)
    return pq_norm_inf_positive(m, q)


def inf_form_with_gradient(m: BipartiteOp, q: float, sigma0: np.ndarray | None = None,
                           max_iter: int = 2000) -> tuple[float, np.ndarray, np.ndarray]:
    """Single-start ``(1, q)`` inf-form returning ``(log value, sigma, dlogvalue/dm)``.

    The derivative with respect to ``m`` at the optimum follows from the
    envelope theorem, ``(K (x) I) G^{q-1} (K (x) I) / tr G^q`` with
    ``K = sigma^{-1/2r}``; it feeds outer maximizations over ``m``.
    """
    q = as_order(q)
    da, db = m.dims
    if q == 1:
        return (math.log(float(np.trace(m.mat).real)), np.eye(da, dtype=complex) / da,
                np.eye(da * db, dtype=complex) / float(np.trace(m.mat).real))
    if q == INF:
        res = _inf_one_sdp(m, PQQuery(p=1, q=INF, max_iter=max_iter))
        w = _dual_witness(m)
        return math.log(res.value), res.optimizer, w / res.value
    r = q / (q - 1)
    obj = _Objective(m.mat, m.dims, -1 / (2 * r), q, r)
    x, _, _, _ = _run(obj, sigma0 if sigma0 is not None else _starts(m, 1, 0)[0], max_iter)
    sigma = obj.sigma(x)
    k = _power_of_density(sigma, -1 / (2 * r), SIGMA_FLOOR)
    kk = np.kron(k, np.eye(db))
    gam = hermitize(kk @ m.mat @ kk)
    lam, w = eigh(gam)
    lam = np.clip(lam, 0, None)
    lh = lam / lam[-1]
    z = np.sum(lh**q)
    pw = (w * (lh ** (q - 1) / (lam[-1] * z))) @ w.conj().T
    logval = math.log(lam[-1]) + math.log(z) / q
    return logval, sigma, hermitize(kk @ pw @ kk)


def _dual_witness(m: BipartiteOp) -> np.ndarray:
    """Optimal ``W`` of ``max tr(W m)  s.t.  tr_B W = I, W >= 0``."""
    import cvxpy as cp

    da, db = m.dims
    w = cp.Variable((da * db, da * db), hermitian=True)
    dual = cp.Problem(cp.Maximize(cp.real(cp.trace(w @ hermitize(m.mat)))),
                      [w >> 0, cp.partial_trace(w, (da, db), axis=1) == np.eye(da)])
    _solve(dual, 2000)
    return hermitize(np.asarray(w.value))
