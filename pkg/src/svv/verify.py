"""Randomized checks of the norm and entropy inequalities.

Every check returns a :class:`Report`.  Each row normalizes its inequality
to ``lhs <= rhs`` and stores ``margin = rhs - lhs``; a row passes when
``margin >= -tol``.  Trials are seeded by ``derive_seed(master, check, i)``
and rows are ordered by trial index, so the CSV does not depend on how many
worker threads ran the suite.
"""

from __future__ import annotations

import csv
import io as _io
import json
import logging
import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .entropies import alpha_prime, cond_renyi_entropy, continuity_bound, w_alpha
from .linalg import (BipartiteOp, apply_channel, derive_seed, hermitize, partial_trace,
                     permute_subsystems, random_channel, random_density, random_pure_state,
                     rng_for, trace_distance)
from .schatten import INF, as_order, interp_order, schatten_from_singular
from .specfact import conformal_inverse, strip_boundary_angle
from .vvnorms import PQQuery, norm_1alpha, pq_norm_inf_positive, pq_norm_sup_positive

log = logging.getLogger(__name__)

__all__ = [
    "ExperimentConfig",
    "Row",
    "Report",
    "QuadratureError",
    "poisson_kernel_strip",
    "strip_quadrature",
    "check_poisson",
    "check_subharmonicity",
    "check_dim_bounds",
    "check_monotone_alpha",
    "check_data_processing",
    "check_alpha_limit",
    "check_continuity",
    "check_chain_rule",
    "check_w_relation",
    "check_duality_crosscheck",
    "decoupling_mc",
    "check_decoupling",
    "SUITES",
    "run_suite",
]


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    trials: int = 20
    dims: tuple = ((2, 2),)
    alphas: tuple = (1.5, 2.0, 3.0, INF)
    tol: float = 1e-7
    mc_samples: int = 2000
    restarts: int = 4
    threads: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        dims = tuple(tuple(int(x) for x in d) for d in self.dims)
        if not dims or any(len(d) not in (2, 3) or min(d) < 2 for d in dims):
            raise ValueError(f"dims must be pairs or triples with entries >= 2, got {self.dims}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "alphas", tuple(as_order(a) for a in self.alphas))
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dims"] = [list(x) for x in self.dims]
        d["alphas"] = ["inf" if a == INF else a for a in self.alphas]
        d.pop("threads")  # scheduling only, never affects results
        return d

    def opts(self, seed: int) -> dict:
        return {"tol": self.tol, "restarts": self.restarts, "seed": seed}


@dataclass(frozen=True)
class Row:
    check: str
    seed: int
    lhs: float
    rhs: float
    tol: float

    @property
    def margin(self) -> float:
        return float(self.rhs - self.lhs)

    @property
    def passed(self) -> bool:
        return bool(self.margin >= -self.tol)


@dataclass
class Report:
    rows: list[Row] = field(default_factory=list)

    CSV_FIELDS = ("check", "seed", "lhs", "rhs", "margin", "pass")

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list[Row]:
        return [r for r in self.rows if not r.passed]

    def extend(self, other: "Report") -> "Report":
        self.rows.extend(other.rows)
        return self

    def by_check(self) -> dict[str, list[Row]]:
        out: dict[str, list[Row]] = {}
        for r in self.rows:
            out.setdefault(r.check, []).append(r)
        return out

    def to_csv(self, path=None) -> str:
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_FIELDS)
        for r in self.rows:
            w.writerow([r.check, r.seed, repr(r.lhs), repr(r.rhs), repr(r.margin),
                        "true" if r.passed else "false"])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    def to_json(self, config: ExperimentConfig | None = None) -> dict:
        return {
            "config": config.to_dict() if config else None,
            "all_pass": self.all_pass,
            "rows": [{"check": r.check, "seed": int(r.seed), "lhs": float(r.lhs), "rhs": float(r.rhs),
                      "margin": r.margin, "tol": r.tol, "pass": r.passed} for r in self.rows],
        }

    def summary(self) -> dict[str, tuple[int, int, float]]:
        """``check -> (passed, total, worst margin)``."""
        return {k: (int(sum(r.passed for r in v)), len(v), float(min(r.margin for r in v)))
                for k, v in self.by_check().items()}


def _check_id(name: str) -> int:
    return zlib.crc32(name.encode())


def _run_trials(name: str, fn: Callable[[int, int], list[Row]], cfg: ExperimentConfig,
                trials: int | None = None) -> Report:
    n = cfg.trials if trials is None else trials
    base = derive_seed(cfg.seed, _check_id(name))
    seeds = [derive_seed(base, i) for i in range(n)]
    idx = range(n)
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as ex:
            chunks = list(ex.map(fn, idx, seeds))
    else:
        chunks = [fn(i, s) for i, s in zip(idx, seeds)]
    return Report([row for chunk in chunks for row in chunk])


# --- strip Poisson kernel ----------------------------------------------------


class QuadratureError(ArithmeticError):
    pass


def poisson_kernel_strip(b: int, x: float, y: float, s):
    """``P_b(x+iy, s) = sin(pi x) / (2 (cosh(pi (y-s)) - cos(pi (x-b))))``."""
    if b not in (0, 1):
        raise ValueError("b must be 0 or 1")
    if not 0 < x < 1:
        raise ValueError(f"x must lie strictly inside (0, 1), got {x}")
    s = np.asarray(s, dtype=float)
    # cosh(u) - cos(v) = 2 sinh^2(u/2) + 2 sin^2(v/2), exact near the peak
    den = 4 * (np.sinh(np.pi * (y - s) / 2) ** 2 + np.sin(np.pi * (x - b) / 2) ** 2)
    return np.sin(np.pi * x) / den


def _simpson(vals: np.ndarray, h: float) -> float:
    return float(h / 3 * (vals[0] + vals[-1] + 4 * vals[1:-1:2].sum() + 2 * vals[2:-1:2].sum()))


def strip_quadrature(f: Callable[[np.ndarray], np.ndarray], b: int, x: float, y: float = 0.0,
                     tail: float = 1e-10, rtol: float = 1e-9, max_points: int = 1 << 21) -> float:
    """``int P_b(x+iy, s) f(s) ds`` by composite Simpson on a truncated window.

    The window ``|s - y| <= L`` drops kernel mass below ``tail`` (the kernel
    decays like ``e^{-pi |s-y|}``); the mesh doubles until successive
    estimates differ by less than ``rtol``.  ``f`` must accept arrays.
    """
    half = math.log(4 / (math.pi * tail)) / math.pi + 2.0
    lo, hi = y - half, y + half
    n = 512
    prev = None
    while n + 1 <= max_points:
        s = np.linspace(lo, hi, n + 1)
        vals = poisson_kernel_strip(b, x, y, s) * np.asarray(f(s), dtype=float)
        est = _simpson(vals, (hi - lo) / n)
        if prev is not None and abs(est - prev) < rtol * max(1.0, abs(est)):
            return est
        prev = est
        n *= 2
    raise QuadratureError(f"Simpson refinement did not converge (last estimate {prev})")


def check_poisson(xs: Sequence[float] = tuple(np.round(np.arange(1, 10) / 10, 1)),
                  ys: Sequence[float] = (0.0, 0.7), tol: float = 1e-8) -> Report:
    """Total kernel mass: ``int P_0 = 1 - x`` and ``int P_1 = x``."""
    rows = []
    one = lambda s: np.ones_like(s)  # noqa: E731
    for y in ys:
        for x in xs:
            for b in (0, 1):
                exact = 1 - x if b == 0 else x
                err = abs(strip_quadrature(one, b, x, y) - exact)
                rows.append(Row(f"poisson_mass_b{b}", 0, err, 0.0, tol))
    return Report(rows)


# --- subharmonicity ----------------------------------------------------------


def check_subharmonicity(cfg: ExperimentConfig, degree: int = 3, dim: int = 4,
                         orders: Sequence[tuple] | None = None, tol: float = 1e-6) -> Report:
    """``log ||f(z)||_{p_theta} <= sum_b int P_b(z, s) log ||f(b+is)||_{p_b} ds``.

    ``f(z) = sum_k C_k u(z)^k`` with ``u`` the strip-to-disk map, a bounded
    analytic matrix function; ``z = theta + iy`` is drawn per trial.
    """
    pairs = list(orders or [(1.0, INF), (1.0, 2.0), (2.0, 4.0), (1.5, 3.0)])

    def trial(i: int, seed: int) -> list[Row]:
        rng = rng_for(seed)
        p0, p1 = (as_order(p) for p in pairs[i % len(pairs)])
        theta = float(rng.uniform(0.05, 0.95))
        y = float(rng.normal(scale=0.5))
        c = rng.standard_normal((degree + 1, dim, dim)) + 1j * rng.standard_normal((degree + 1, dim, dim))

        def f_at(u):
            u = np.asarray(u, dtype=complex)
            out = np.zeros(u.shape + (dim, dim), complex)
            for ck in c[::-1]:
                out = out * u[..., None, None] + ck
            return out

        def log_norm_boundary(bb: int, p: float):
            def g(s):
                sv = np.linalg.svd(f_at(np.exp(1j * strip_boundary_angle(bb, s))), compute_uv=False)
                if p == INF:
                    return np.log(sv.max(axis=-1))
                smax = sv.max(axis=-1)
                return np.log(smax) + np.log(np.sum((sv / smax[..., None]) ** p, axis=-1)) / p
            return g

        pt = interp_order(p0, p1, theta)
        inside = np.linalg.svd(f_at(conformal_inverse(theta + 1j * y)), compute_uv=False)
        lhs = math.log(schatten_from_singular(inside, pt))
        rhs = (strip_quadrature(log_norm_boundary(0, p0), 0, theta, y)
               + strip_quadrature(log_norm_boundary(1, p1), 1, theta, y))
        return [Row("subharmonicity", seed, lhs, rhs, tol)]

    return _run_trials("subharmonicity", trial, cfg)


# --- random states -----------------------------------------------------------


def _pick_dims(cfg: ExperimentConfig, i: int, n: int = 2) -> tuple[int, ...]:
    cands = [d for d in cfg.dims if len(d) == n] or [(2,) * n]
    return cands[i % len(cands)]


def _random_state(dims: tuple[int, ...], seed: int, fixed: bool = False) -> BipartiteOp:
    """Random ``(d_Y, d_X)`` density; ``fixed`` gives the maximally mixed state."""
    dy, dx = dims
    if fixed:
        return BipartiteOp(np.eye(dy * dx) / (dy * dx), dims)
    return BipartiteOp(random_density(dy * dx, seed=seed), dims)


def _random_mixed_from_pure(dim: int, seed: int) -> np.ndarray:
    """Partial trace of a Haar-random pure state on ``dim (x) dim``."""
    psi = random_pure_state(dim * dim, seed).reshape(dim, dim)
    return hermitize(psi @ psi.conj().T)


def _h(rho: BipartiteOp, alpha: float, cfg: ExperimentConfig, seed: int) -> float:
    return cond_renyi_entropy(rho, alpha, **cfg.opts(seed))


# --- entropy checks ----------------------------------------------------------


def check_dim_bounds(cfg: ExperimentConfig) -> Report:
    """``-log d_X <= H_alpha(X|Y) <= log d_X``."""
    alphas = sorted(set(cfg.alphas) | {1.0})

    def trial(i: int, seed: int) -> list[Row]:
        dims = _pick_dims(cfg, i)
        rho = _random_state(dims, seed, fixed=(i == 0))
        ld = math.log(dims[1])
        rows = []
        for a in alphas:
            h = _h(rho, a, cfg, seed)
            rows.append(Row("dim_bound_upper", seed, h, ld, 5 * cfg.tol))
            rows.append(Row("dim_bound_lower", seed, -ld, h, 5 * cfg.tol))
        return rows

    return _run_trials("dim_bounds", trial, cfg)


def check_monotone_alpha(cfg: ExperimentConfig, grid: Sequence[float] | None = None) -> Report:
    """``alpha <= beta  =>  H_beta <= H_alpha``."""
    grid = sorted(as_order(a) for a in (grid or sorted(set(cfg.alphas) | {1.0})))

    def trial(i: int, seed: int) -> list[Row]:
        rho = _random_state(_pick_dims(cfg, i), seed, fixed=(i == 0))
        hs = [_h(rho, a, cfg, seed) for a in grid]
        return [Row("monotone_alpha", seed, hs[k + 1], hs[k], 5 * cfg.tol) for k in range(len(hs) - 1)]

    return _run_trials("monotone_alpha", trial, cfg)


def check_data_processing(cfg: ExperimentConfig, env_dim: int = 2) -> Report:
    """``H_alpha(X|Y') >= H_alpha(X|Y)`` for a random channel on ``Y``; ``W_1`` contracts."""
    alphas = sorted(set(cfg.alphas) | {1.0})

    def trial(i: int, seed: int) -> list[Row]:
        dims = _pick_dims(cfg, i)
        rho = _random_state(dims, derive_seed(seed, 0), fixed=(i == 0))
        ch = random_channel(dims[0], dims[0], env_dim, derive_seed(seed, 1))
        out = apply_channel(ch, rho, on="first")
        rows = []
        for a in alphas:
            rows.append(Row("data_processing_h", seed, _h(rho, a, cfg, seed), _h(out, a, cfg, seed),
                            5 * cfg.tol))
        # W is only exact at alpha = 1; elsewhere it is a Jordan-split upper bound
        rows.append(Row("data_processing_w1", seed, w_alpha(out, 1.0), w_alpha(rho, 1.0), 5 * cfg.tol))
        return rows

    return _run_trials("data_processing", trial, cfg)


def check_alpha_limit(cfg: ExperimentConfig, hs: Sequence[float] = (1e-1, 1e-2, 1e-3),
                      cap: float = 5e-3, shapes: Sequence[tuple] = ((2, 2), (2, 3))) -> Report:
    """``H_{1+h} -> H`` linearly in ``h``.

    Rows: the deviation at the smallest ``h`` is below ``cap``; and the rate
    ``dev(h)/h`` at the smallest ``h`` stays within a factor of 1.5 (plus a
    small absolute slack) of the rate fitted at the middle ``h``.
    """
    hs = sorted(hs, reverse=True)
    shapes = [tuple(x) for x in shapes]

    def trial(i: int, seed: int) -> list[Row]:
        rho = _random_state(shapes[i % len(shapes)], seed)
        h1 = _h(rho, 1.0, cfg, seed)
        dev = [abs(_h(rho, 1 + h, cfg, seed) - h1) for h in hs]
        rate_fit = dev[-2] / hs[-2]
        return [Row("alpha_limit_dev", seed, dev[-1], cap, cfg.tol),
                Row("alpha_limit_rate", seed, dev[-1] / hs[-1], 1.5 * rate_fit + 0.05, 0.0)]

    return _run_trials("alpha_limit", trial, cfg)


def check_continuity(cfg: ExperimentConfig, dims: tuple[int, int] = (2, 2), alpha: float = 2.0,
                     eps_targets: Sequence[float] = (0.01, 0.05, 0.1)) -> Report:
    """``|H_a(rho) - H_a(sigma)| <= a' log(1 + 2 eps d_X^{2/a'})`` with measured ``eps``.

    ``sigma`` mixes ``rho`` with an independent random state; trial 0 also
    records the ``sigma = rho`` case.
    """
    alpha = as_order(alpha)
    name = f"continuity_dx{dims[1]}_a{alpha:g}"

    def trial(i: int, seed: int) -> list[Row]:
        rng = rng_for(derive_seed(seed, 0))
        d = dims[0] * dims[1]
        rho = BipartiteOp(random_density(d, seed=derive_seed(seed, 1)), dims)
        omega = random_density(d, seed=derive_seed(seed, 2))
        t = eps_targets[i % len(eps_targets)] * float(rng.uniform(0.2, 1.0))
        sig = BipartiteOp(hermitize((1 - t) * rho.mat + t * omega), dims)
        eps = trace_distance(rho.mat, sig.mat)
        ha = _h(rho, alpha, cfg, seed)
        rows = [Row(name, seed, abs(ha - _h(sig, alpha, cfg, seed)),
                    continuity_bound(eps, dims[1], alpha), 10 * cfg.tol)]
        if i == 0:
            rows.append(Row(name + "_eps0", seed, abs(ha - _h(rho, alpha, cfg, seed)), 0.0, 1e-5))
        return rows

    return _run_trials(name, trial, cfg)


def _marginal(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduced state on ``keep`` (in that order) of a multipartite density."""
    n = len(dims)
    drop = [k for k in range(n) if k not in keep]
    perm = list(keep) + drop
    r = permute_subsystems(rho, dims, perm)
    dk = int(np.prod([dims[k] for k in keep]))
    dd = int(np.prod([dims[k] for k in drop])) if drop else 1
    return partial_trace(r, "second", (dk, dd)) if drop else r


def chain_alpha(beta, gamma) -> float:
    """``alpha`` with ``alpha' = beta' + gamma'``."""
    ap = alpha_prime(beta) + alpha_prime(gamma)
    return INF if ap == 1 else ap / (ap - 1)


def check_chain_rule(cfg: ExperimentConfig, dims: tuple[int, int, int] = (2, 2, 2),
                     beta: float = 2.0, gamma: float = 2.0, alpha: float | None = None) -> Report:
    """``H_alpha(XY|Z) >= H_beta(X|YZ) + H_gamma(Y|Z)`` with ``alpha' = beta' + gamma'``.

    ``dims`` is ``(d_X, d_Y, d_Z)``; states are reduced Haar-random pure states.
    """
    beta, gamma = as_order(beta), as_order(gamma)
    a_c = chain_alpha(beta, gamma)
    if alpha is not None:
        alpha = as_order(alpha)
        if abs(alpha_prime(alpha) - alpha_prime(a_c)) > 1e-12 * alpha_prime(a_c):
            raise ValueError(f"exponents violate alpha' = beta' + gamma' (alpha={alpha}, expected {a_c})")
    alpha = a_c
    dx, dy, dz = dims
    name = f"chain_rule_b{beta:g}_g{gamma:g}"

    def trial(i: int, seed: int) -> list[Row]:
        rho = _random_mixed_from_pure(dx * dy * dz, seed)  # order X, Y, Z
        z_xy = BipartiteOp(permute_subsystems(rho, dims, [2, 0, 1]), (dz, dx * dy))
        yz_x = BipartiteOp(permute_subsystems(rho, dims, [1, 2, 0]), (dy * dz, dx))
        z_y = BipartiteOp(_marginal(rho, dims, [2, 1]), (dz, dy))
        lhs = _h(yz_x, beta, cfg, seed) + _h(z_y, gamma, cfg, seed)
        return [Row(name, seed, lhs, _h(z_xy, alpha, cfg, seed), 10 * cfg.tol)]

    return _run_trials(name, trial, cfg)


def check_w_relation(cfg: ExperimentConfig) -> Report:
    """``W_alpha >= e^{-H_alpha/alpha'} - d_X^{-1/alpha'}`` (the branch an upper bound on ``W`` can test)."""
    alphas = [a for a in cfg.alphas if a != 1]

    def trial(i: int, seed: int) -> list[Row]:
        dims = _pick_dims(cfg, i)
        rho = _random_state(dims, seed)
        rows = []
        for a in alphas:
            ap = alpha_prime(a)
            nrm = norm_1alpha(rho, a, **cfg.opts(seed)).value
            w = w_alpha(rho, a, **cfg.opts(seed))
            floor = dims[1] ** (-1 / ap)
            rows.append(Row("w_relation", seed, nrm - floor, w, 5 * cfg.tol))
            if abs(w - nrm) > floor:
                log.debug("w_relation other branch not met by the W upper bound: seed=%d alpha=%s", seed, a)
        return rows

    return _run_trials("w_relation", trial, cfg)


def check_duality_crosscheck(cfg: ExperimentConfig, witnesses: int = 4) -> Report:
    """``tr(y m) / ||y||_(inf,alpha') <= ||m||_(1,alpha)`` for PSD witnesses ``y`` on 2x2."""
    alphas = sorted(set(cfg.alphas) | {1.0})
    dims = (2, 2)

    def trial(i: int, seed: int) -> list[Row]:
        m = BipartiteOp(random_density(4, seed=derive_seed(seed, 0)), dims)
        ys = [m.mat] + [random_density(4, rank=int(1 + k % 4), seed=derive_seed(seed, 1, k))
                        for k in range(witnesses)]
        rows = []
        for a in alphas:
            primal = norm_1alpha(m, a, **cfg.opts(seed)).value
            q = PQQuery(p=alpha_prime(a), q=INF, tol=cfg.tol, restarts=cfg.restarts, seed=seed)
            for y in ys:
                den = pq_norm_sup_positive(BipartiteOp(y, dims), q).value
                ratio = float(np.trace(y @ m.mat).real) / den
                rows.append(Row("duality", seed, ratio, primal, 10 * cfg.tol))
        return rows

    return _run_trials("duality", trial, cfg)


# --- decoupling --------------------------------------------------------------


def _haar_batch(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    g = (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(g)
    ph = np.diagonal(r, axis1=1, axis2=2)
    return q * (ph / np.abs(ph))[:, None, :]


def decoupling_samples(rho: BipartiteOp, d_x0: int, samples: int, seed: int,
                       chunk: int = 500) -> np.ndarray:
    """Per-sample ``||(d_X/d_X0) (I (x) PU) rho (I (x) U^* P) - rho_Y (x) I/d_X0||_1``.

    ``rho`` is ordered ``(Y, X)``; ``P`` keeps the first ``d_X0`` basis vectors of ``X``.
    """
    dy, dx = rho.dims
    if not 1 <= d_x0 <= dx:
        raise ValueError(f"need 1 <= d_X0 <= d_X, got {d_x0}")
    rng = rng_for(seed)
    r4 = rho.mat.reshape(dy, dx, dy, dx)
    target = np.kron(partial_trace(rho, "second"), np.eye(d_x0) / d_x0)
    out = []
    left = samples
    while left > 0:
        n = min(chunk, left)
        pu = _haar_batch(rng, n, dx)[:, :d_x0, :]
        t = np.einsum("nab,ybzc,ndc->nyazd", pu, r4, pu.conj(), optimize=True)
        t = (dx / d_x0) * t.reshape(n, dy * d_x0, dy * d_x0) - target
        out.append(np.abs(np.linalg.eigvalsh(hermitize_batch(t))).sum(axis=1))
        left -= n
    return np.concatenate(out)


def hermitize_batch(a: np.ndarray) -> np.ndarray:
    return (a + np.conj(np.swapaxes(a, -1, -2))) / 2


def decoupling_mc(rho: BipartiteOp, d_x0: int, alpha, samples: int = 2000, seed: int = 0,
                  w_opts: dict | None = None, draws: np.ndarray | None = None) -> Row:
    """Monte-Carlo decoupling check: ``mean + 3 stderr <= 2^{2/a-1} d_X0^{1/a'} W_a``.

    ``W_a`` is the certified upper bound, so the row is a consistency check
    rather than a sharp falsifier.  ``draws`` lets several ``alpha`` share one
    batch of unitaries.
    """
    alpha = as_order(alpha)
    if not 1 <= alpha <= 2:
        raise ValueError("decoupling bound needs 1 <= alpha <= 2")
    x = decoupling_samples(rho, d_x0, samples, seed) if draws is None else draws
    mean = float(x.mean())
    se = float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else 0.0
    w = w_alpha(rho, alpha, **(w_opts or {}))
    rhs = 2 ** (2 / alpha - 1) * d_x0 ** (1 / alpha_prime(alpha)) * w
    return Row(f"decoupling_a{alpha:g}", seed, mean + 3 * se, rhs, 1e-9)


def check_decoupling(cfg: ExperimentConfig, dims: tuple[int, int] = (4, 4), d_x0: int = 2,
                     alphas: Sequence[float] = (1.0, 1.5, 2.0)) -> Report:
    """Trial 0 is the maximally entangled state, the rest random densities."""

    def trial(i: int, seed: int) -> list[Row]:
        dy, dx = dims
        if i == 0:
            v = np.eye(dy, dx).ravel() / math.sqrt(min(dy, dx))
            rho = BipartiteOp(np.outer(v, v.conj()), dims)
        else:
            rho = BipartiteOp(random_density(dy * dx, seed=derive_seed(seed, 0)), dims)
        draws = decoupling_samples(rho, d_x0, cfg.mc_samples, derive_seed(seed, 1))
        return [decoupling_mc(rho, d_x0, a, seed=seed, w_opts=cfg.opts(seed), draws=draws)
                for a in alphas]

    return _run_trials("decoupling", trial, cfg)


# --- suite -------------------------------------------------------------------


def _continuity_all(cfg: ExperimentConfig) -> Report:
    rep = Report()
    for dx in (2, 3):
        for a in (1.5, 2.0, 4.0):
            rep.extend(check_continuity(cfg, (2, dx), a))
    return rep


def _chain_all(cfg: ExperimentConfig) -> Report:
    rep = Report()
    for b, g in ((2.0, 2.0), (3.0, 1.5), (1.5, 3.0)):
        rep.extend(check_chain_rule(cfg, (2, 2, 2), b, g))
    return rep


SUITES: dict[str, Callable[[ExperimentConfig], Report]] = {
    "poisson": lambda cfg: check_poisson(),
    "subharmonicity": check_subharmonicity,
    "dim_bounds": check_dim_bounds,
    "monotone": check_monotone_alpha,
    "data_processing": check_data_processing,
    "alpha_limit": check_alpha_limit,
    "continuity": _continuity_all,
    "chain_rule": _chain_all,
    "w_relation": check_w_relation,
    "duality": check_duality_crosscheck,
    "decoupling": check_decoupling,
}


def run_suite(cfg: ExperimentConfig, suites: Sequence[str] = ("all",)) -> Report:
    names = list(SUITES) if "all" in suites else list(suites)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(unknown)}; choose from {', '.join(SUITES)}")
    rep = Report()
    for n in names:
        log.info("running %s", n)
        rep.extend(SUITES[n](cfg))
    return rep


def report_json_text(rep: Report, cfg: ExperimentConfig) -> str:
    return json.dumps(rep.to_json(cfg), indent=2, sort_keys=True)
