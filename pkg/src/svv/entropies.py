"""Rényi entropic quantities expressed through ``(1, alpha)``-norms.

Conventions: natural logarithms (nats); bipartite states are ordered
``(Y, X)`` with the conditioning system ``Y`` first, so
``H_alpha(X|Y) = -alpha' log ||rho_YX||_(1,alpha)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .linalg import (BipartiteOp, Channel, apply_channel, derive_seed, eigh, hermitize,
                     partial_trace, random_pure_state)
from .schatten import INF, as_order, conjugate
from .vvnorms import (PQQuery, PQResult, inf_form_with_gradient, norm_1alpha,
                      pq_norm_hermitian_upper)

__all__ = [
    "alpha_prime",
    "von_neumann_entropy",
    "sandwiched_divergence",
    "cond_vn_entropy",
    "cond_renyi_entropy",
    "w_alpha",
    "coherent_info_alpha",
    "CoherentInfo",
    "continuity_bound",
]

SUPPORT_TOL = 1e-12


def alpha_prime(alpha) -> float:
    """Hölder conjugate ``alpha/(alpha-1)``; ``1 -> inf`` and ``inf -> 1``."""
    return conjugate(alpha)


def _xlogx_sum(lam: np.ndarray) -> float:
    lam = lam[lam > 0]
    return float(np.sum(lam * np.log(lam)))


def von_neumann_entropy(rho: np.ndarray) -> float:
    return -_xlogx_sum(np.linalg.eigvalsh(hermitize(rho)))


def _support_projector(lam, v, tol):
    keep = lam > tol * max(lam[-1], 0.0)
    return keep, v[:, keep]


def sandwiched_divergence(rho: np.ndarray, sigma: np.ndarray, alpha) -> float:
    """``D_alpha(rho || sigma)``; Umegaki relative entropy at ``alpha = 1``.

    ``sigma`` need only be PSD.  Returns ``inf`` when the support of ``rho``
    is not contained in that of ``sigma``.
    """
    alpha = as_order(alpha)
    rho, sigma = hermitize(rho), hermitize(sigma)
    ls, vs = eigh(sigma)
    if ls[0] < -1e-10 * max(1.0, abs(ls[-1])):
        raise ValueError("sigma is not PSD")
    keep, vk = _support_projector(ls, vs, SUPPORT_TOL)
    outside = rho - vk @ (vk.conj().T @ rho @ vk) @ vk.conj().T
    if np.linalg.norm(outside) > 1e-9 * max(1.0, np.linalg.norm(rho)):
        return math.inf
    lsk = ls[keep]
    if alpha == 1:
        lr = np.linalg.eigvalsh(rho)
        log_sigma = (vk * np.log(lsk)) @ vk.conj().T
        return _xlogx_sum(lr) - float(np.trace(rho @ log_sigma).real)
    ap = alpha_prime(alpha)
    k = (vk * lsk ** (-1 / (2 * ap))) @ vk.conj().T
    s = np.linalg.eigvalsh(hermitize(k @ rho @ k))
    s = np.clip(s, 0, None)
    if alpha == INF:
        return math.log(s.max())
    smax = s.max()
    log_norm = math.log(smax) + math.log(np.sum((s / smax) ** alpha)) / alpha
    return ap * log_norm


def cond_vn_entropy(rho: BipartiteOp) -> float:
    """``H(X|Y) = H(YX) - H(Y)`` for ``rho`` ordered ``(Y, X)``."""
    return von_neumann_entropy(rho.mat) - von_neumann_entropy(partial_trace(rho, "second"))


def cond_renyi_entropy(rho: BipartiteOp, alpha, full: bool = False, **opts):
    """``H_alpha(X|Y) = -alpha' log ||rho_YX||_(1,alpha)``.

    ``alpha = 1`` returns the von Neumann conditional entropy.  Since the norm
    is an upper bound from a minimization, the entropy returned is a lower
    bound (exact when the result is ``exact``).  ``opts`` are forwarded to
    :func:`~svv.vvnorms.norm_1alpha` (``tol``, ``restarts``, ``seed``, ...).
    With ``full=True`` the pair ``(entropy, PQResult)`` is returned.
    """
    alpha = as_order(alpha)
    if alpha == 1:
        h = cond_vn_entropy(rho)
        return (h, None) if full else h
    res = norm_1alpha(rho, alpha, **opts)
    h = -alpha_prime(alpha) * math.log(res.value)
    return (h, res) if full else h


def w_alpha(rho: BipartiteOp, alpha, full: bool = False, **opts):
    """Upper bound on ``W_alpha(X|Y) = ||rho_YX - rho_Y (x) I_X/d_X||_(1,alpha)``.

    Exact at ``alpha = 1`` (trace norm) and whenever the difference is
    semidefinite; otherwise the Jordan-split triangle bound.
    """
    alpha = as_order(alpha)
    dy, dx = rho.dims
    rho_y = partial_trace(rho, "second")
    diff = BipartiteOp(hermitize(rho.mat - np.kron(rho_y, np.eye(dx) / dx)), rho.dims)
    base = PQQuery()
    q = PQQuery(p=1.0, q=alpha, tol=opts.get("tol", base.tol),
                max_iter=opts.get("max_iter", base.max_iter),
                restarts=opts.get("restarts", base.restarts), seed=opts.get("seed", base.seed))
    res = pq_norm_hermitian_upper(diff, q)
    return (res.value, res) if full else res.value


def continuity_bound(eps: float, d_x: int, alpha) -> float:
    """``alpha' log(1 + 2 eps d_X^{2/alpha'})``; ``inf`` at ``alpha = 1`` when ``eps > 0``."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if eps == 0:
        return 0.0
    ap = alpha_prime(alpha)
    if ap == INF:
        return math.inf
    return ap * math.log1p(2 * eps * d_x ** (2 / ap))


# --- coherent information ----------------------------------------------------


@dataclass(frozen=True)
class CoherentInfo:
    value: float
    bound_kind: str
    spread: float
    state: np.ndarray
    restart_values: tuple[float, ...]


def _output_state(channel: Channel, psi: np.ndarray) -> BipartiteOp:
    d = channel.dim_in
    rho = BipartiteOp(np.outer(psi, psi.conj()), (d, d))
    return apply_channel(channel, rho, on="first")


def _vn_objective_grad(m: BipartiteOp) -> tuple[float, np.ndarray]:
    """``H(Y) - H(YR)`` and its derivative in ``m``."""
    dy, dr = m.dims
    my = partial_trace(m, "second")
    ly, vy = eigh(my)
    lm, vm = eigh(m.mat)
    floor = 1e-15
    val = _xlogx_sum(np.clip(lm, 0, None)) - _xlogx_sum(np.clip(ly, 0, None))
    log_m = (vm * np.log(np.maximum(lm, floor))) @ vm.conj().T
    log_y = (vy * np.log(np.maximum(ly, floor))) @ vy.conj().T
    return val, hermitize(log_m - np.kron(log_y, np.eye(dr)))


def coherent_info_alpha(channel: Channel, alpha, restarts: int = 4, seed: int = 0,
                        max_iter: int = 200, tol: float = 1e-7, full: bool = False):
    """Rényi coherent information ``max_psi alpha' log ||(Phi (x) id)(psi)||_(1,alpha)``.

    The maximum runs over pure inputs on ``X (x) R`` with ``d_R = d_X``; the
    output is ordered ``(Y, R)`` so the weights act on the channel output.
    ``alpha = 1`` maximizes ``H(Y) - H(YR)``.  Multistart from the maximally
    entangled input, a product input and Haar-random pure states; the result
    is a lower bound, reported ``exact`` only when the two best restarts agree
    to ``tol``.
    """
    alpha = as_order(alpha)
    d = channel.dim_in
    ap = alpha_prime(alpha)
    starts = [np.eye(d).ravel() / math.sqrt(d)]
    if restarts > 1:
        e0 = np.zeros(d * d)
        e0[0] = 1.0
        starts.append(e0)
    i = 0
    while len(starts) < restarts:
        starts.append(random_pure_state(d * d, derive_seed(seed, i)))
        i += 1
    starts = starts[:restarts]

    def value_and_grad(x, state):
        v = x[: d * d] + 1j * x[d * d:]
        nv = float(np.vdot(v, v).real)
        psi = v / math.sqrt(nv)
        m = _output_state(channel, psi)
        if alpha == 1:
            val, dm = _vn_objective_grad(m)
        else:
            logval, state["sigma"], dm = inf_form_with_gradient(m, alpha, state.get("sigma"))
            val = ap * logval
            dm = dm * ap
        omega = hermitize(_adjoint_on_first(channel, dm, d))
        c = omega @ psi - float(np.vdot(psi, omega @ psi).real) * psi
        g = 2 * c / math.sqrt(nv)
        return -val, -np.concatenate([g.real, g.imag])

    vals, states = [], []
    for s0 in starts:
        state: dict = {}
        x0 = np.concatenate([np.asarray(s0).real, np.asarray(s0).imag]).astype(float)
        res = minimize(value_and_grad, x0, args=(state,), jac=True, method="L-BFGS-B",
                       options={"maxiter": max_iter, "ftol": 1e-14, "gtol": 1e-10})
        v = res.x[: d * d] + 1j * res.x[d * d:]
        psi = v / np.linalg.norm(v)
        vals.append(_final_value(channel, psi, alpha, seed))
        states.append(psi)
    best = int(np.argmax(vals))
    # symmetric starts can sit on stationary points, so certify on the two best runs
    top = sorted(vals, reverse=True)
    spread = top[0] - top[1] if len(top) > 1 else math.inf
    kind = "exact" if spread <= tol * max(1.0, abs(vals[best])) else "lower"
    out = CoherentInfo(vals[best], kind, spread, states[best], tuple(vals))
    return out if full else out.value


def _adjoint_on_first(channel: Channel, y: np.ndarray, dr: int) -> np.ndarray:
    big = [np.kron(k, np.eye(dr)) for k in channel.kraus]
    return sum(k.conj().T @ y @ k for k in big)


def _final_value(channel: Channel, psi: np.ndarray, alpha: float, seed: int) -> float:
    m = _output_state(channel, psi)
    if alpha == 1:
        return -cond_vn_entropy(m)
    return -cond_renyi_entropy(m, alpha, seed=seed)
