"""``svv`` command-line front end.

Exit codes: 0 success, 1 a check failed, 2 usage or input error, 3 numerical
failure.  ``--json`` prints the envelope
``{"command", "config", "results", "version"}`` with sorted keys, so equal
inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .entropies import (coherent_info_alpha, cond_renyi_entropy, cond_vn_entropy,
                        sandwiched_divergence, w_alpha)
from .io import cmat_from_json, load_bipartite, load_channel, load_matrix
from .linalg import BipartiteOp, LinAlgFailure, SingularityError
from .schatten import INF, as_order, interp_order, schatten_interp_check, schatten_norm
from .specfact import (FactorizationError, IndeterminateCertificate, TrigMatPoly,
                       factorization_residual, outerness_certificate, spectral_factorize)
from .verify import SUITES, ExperimentConfig, QuadratureError, decoupling_mc, run_suite
from .vvnorms import PQQuery, pq_norm_hermitian_upper, pq_norm_inf_positive, pq_norm_sup_positive

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
NUMERIC_ERRORS = (LinAlgFailure, SingularityError, FactorizationError, IndeterminateCertificate,
                  QuadratureError, FloatingPointError, np.linalg.LinAlgError)
LN2 = math.log(2)

CONFIG_KEYS = {"seed": int, "trials": int, "dims": list, "alphas": list, "tol": float,
               "mc_samples": int, "mcSamples": int, "restarts": int, "threads": int}


class ConfigError(ValueError):
    pass


def _fmt_order(a: float):
    return "inf" if a == INF else a


# --- configuration -----------------------------------------------------------


def read_config_file(path) -> dict:
    """Parse a JSON config file; an empty file means no overrides."""
    text = Path(path).read_text()
    if not text.strip():
        return {}
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: top level must be an object")
    unknown = sorted(set(obj) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown}")
    if "mcSamples" in obj:
        obj["mc_samples"] = obj.pop("mcSamples")
    return obj


def env_overrides(env=None) -> dict:
    env = os.environ if env is None else env
    out = {}
    for key, name in (("seed", "SVV_SEED"), ("threads", "SVV_THREADS")):
        if env.get(name, "").strip():
            try:
                out[key] = int(env[name])
            except ValueError:
                raise ConfigError(f"{name} must be an integer, got {env[name]!r}") from None
    return out


def load_config(path=None, flags: dict | None = None, env=None) -> ExperimentConfig:
    """Merge ``defaults < environment < config file < flags``."""
    merged: dict = {}
    merged.update(env_overrides(env))
    if path is not None:
        merged.update(read_config_file(path))
    merged.update({k: v for k, v in (flags or {}).items() if v is not None})
    try:
        return ExperimentConfig(**merged)
    except TypeError as e:
        raise ConfigError(str(e)) from None


# --- argument parsing --------------------------------------------------------


def _pq(text: str) -> tuple[float, float]:
    try:
        p, q = text.split(",")
        return as_order(p), as_order(q)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'p,q', got {text!r}") from None


def _dims(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _orders(text: str) -> list[float]:
    try:
        return [as_order(x) for x in text.split(",")]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _order(text: str) -> float:
    try:
        return as_order(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON envelope")
    common.add_argument("--bits", action="store_true", help="report entropies in bits")
    common.add_argument("--config", help="JSON experiment config file")
    common.add_argument("--seed", type=int, help="master seed (also SVV_SEED)")
    common.add_argument("--tol", type=float, help="optimizer / check tolerance")
    common.add_argument("--restarts", type=int, help="multistart count")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="svv", description="Operator-valued Schatten norms and Renyi entropies.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", parents=[common], help="(p,q)-norm of a bipartite operator")
    p.add_argument("--pq", type=_pq, default=(1.0, INF), help="orders 'p,q' (default 1,inf)")
    p.add_argument("--input", required=True, help="matrix JSON")
    p.add_argument("--dims", type=_dims, help="dA,dB when absent from the file")
    p.add_argument("--form", choices=["auto", "inf", "sup", "hermitian"], default="auto",
                   help="auto: inf-form for PSD input, Jordan-split bound otherwise")

    p = sub.add_parser("entropy", parents=[common], help="conditional entropies of a (Y,X) state")
    p.add_argument("--alpha", type=_orders, default=[2.0], help="comma list of orders")
    p.add_argument("--input", required=True)
    p.add_argument("--dims", type=_dims)
    p.add_argument("--kind", choices=["renyi", "w"], default="renyi")

    p = sub.add_parser("divergence", parents=[common], help="sandwiched Renyi divergence")
    p.add_argument("--rho", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--alpha", type=_orders, default=[2.0])

    p = sub.add_parser("coherent", parents=[common], help="Renyi coherent information of a channel")
    p.add_argument("--channel", required=True, help='channel JSON {"kraus": [...]}')
    p.add_argument("--alpha", type=_orders, default=[2.0])

    p = sub.add_parser("verify", parents=[common], help="randomized inequality suite")
    p.add_argument("--suite", default="all", help=f"comma list from: all, {', '.join(SUITES)}")
    p.add_argument("--trials", type=int)
    p.add_argument("--threads", type=int, help="worker threads (also SVV_THREADS)")
    p.add_argument("--mc-samples", type=int, dest="mc_samples")
    p.add_argument("--out", help="CSV report path")
    p.add_argument("--report-json", help="JSON report path (config embedded)")

    p = sub.add_parser("decouple", parents=[common], help="Monte-Carlo decoupling bound")
    p.add_argument("--input", required=True)
    p.add_argument("--dims", type=_dims)
    p.add_argument("--dx0", type=int, required=True, help="dimension kept by the projection")
    p.add_argument("--alpha", type=_orders, default=[2.0])
    p.add_argument("--samples", type=int, default=2000)

    p = sub.add_parser("specfact", parents=[common], help="outer spectral factor of a trig polynomial")
    p.add_argument("--input", required=True, help='TrigMatPoly JSON {"d","N","coeffs"}')
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--out", help="write the factor coefficients as JSON")

    p = sub.add_parser("interp", parents=[common], help="Schatten interpolation inequality for a matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--p0", type=_order, default=1.0)
    p.add_argument("--p1", type=_order, default=INF)
    p.add_argument("--theta", type=float, default=0.5)
    return ap


# --- commands ----------------------------------------------------------------


def _query(args, cfg: ExperimentConfig, p: float, q: float) -> PQQuery:
    return PQQuery(p=p, q=q, tol=cfg.tol, restarts=cfg.restarts, seed=cfg.seed)


def _load_op(args) -> BipartiteOp:
    return load_bipartite(args.input, args.dims)


def _nat(x: float, bits: bool) -> float:
    return x / LN2 if bits else x


def cmd_norm(args, cfg):
    m = _load_op(args)
    p, q = args.pq
    query = _query(args, cfg, p, q)
    form = args.form
    if form == "auto":
        psd = np.linalg.eigvalsh((m.mat + m.mat.conj().T) / 2).min() >= -1e-10 * max(1.0, np.abs(m.mat).max())
        form = "inf" if psd else "hermitian"
    fn = {"inf": pq_norm_inf_positive, "sup": pq_norm_sup_positive, "hermitian": pq_norm_hermitian_upper}[form]
    res = fn(m, query)
    row = {"p": _fmt_order(p), "q": _fmt_order(q), "form": form, "value": res.value,
           "bound_kind": res.bound_kind, "spread": res.spread, "lower": res.lower, "tol": cfg.tol}
    return [row], EXIT_OK


def cmd_entropy(args, cfg):
    rho = _load_op(args)
    rows = []
    for a in args.alpha:
        if args.kind == "w":
            val, res = w_alpha(rho, a, full=True, **cfg.opts(cfg.seed))
            rows.append({"alpha": _fmt_order(a), "quantity": "W", "value": val,
                         "bound_kind": res.bound_kind, "tol": cfg.tol})
            continue
        h, res = cond_renyi_entropy(rho, a, full=True, **cfg.opts(cfg.seed))
        kind = "exact" if res is None or res.bound_kind == "exact" else "lower"
        rows.append({"alpha": _fmt_order(a), "quantity": "H", "value": _nat(h, args.bits),
                     "unit": "bits" if args.bits else "nats", "bound_kind": kind, "tol": cfg.tol})
    return rows, EXIT_OK


def cmd_divergence(args, cfg):
    rho, _ = load_matrix(args.rho)
    sigma, _ = load_matrix(args.sigma)
    rows = []
    for a in args.alpha:
        d = sandwiched_divergence(rho, sigma, a)
        rows.append({"alpha": _fmt_order(a), "value": "inf" if d == math.inf else _nat(d, args.bits),
                     "unit": "bits" if args.bits else "nats", "bound_kind": "exact", "tol": 0.0})
    return rows, EXIT_OK


def cmd_coherent(args, cfg):
    ch = load_channel(args.channel)
    rows = []
    for a in args.alpha:
        res = coherent_info_alpha(ch, a, restarts=cfg.restarts, seed=cfg.seed, tol=cfg.tol, full=True)
        rows.append({"alpha": _fmt_order(a), "value": _nat(res.value, args.bits),
                     "unit": "bits" if args.bits else "nats", "bound_kind": res.bound_kind,
                     "spread": res.spread, "tol": cfg.tol})
    return rows, EXIT_OK


def cmd_verify(args, cfg):
    suites = [s.strip() for s in args.suite.split(",") if s.strip()]
    rep = run_suite(cfg, suites)
    if args.out:
        rep.to_csv(args.out)
    if args.report_json:
        Path(args.report_json).write_text(json.dumps(rep.to_json(cfg), indent=2, sort_keys=True))
    rows = [{"check": k, "passed": p, "total": n, "worst_margin": w}
            for k, (p, n, w) in rep.summary().items()]
    return rows, EXIT_OK if rep.all_pass else EXIT_FAIL


def cmd_decouple(args, cfg):
    rho = _load_op(args)
    from .verify import decoupling_samples

    draws = decoupling_samples(rho, args.dx0, args.samples, cfg.seed)
    rows, code = [], EXIT_OK
    for a in args.alpha:
        r = decoupling_mc(rho, args.dx0, a, seed=cfg.seed, w_opts=cfg.opts(cfg.seed), draws=draws)
        rows.append({"alpha": _fmt_order(a), "lhs": r.lhs, "rhs": r.rhs, "margin": r.margin,
                     "pass": r.passed, "bound_kind": "upper", "samples": args.samples})
        if not r.passed:
            code = EXIT_FAIL
    return rows, code


def cmd_specfact(args, cfg):
    poly = TrigMatPoly.load(args.input)
    tol = cfg.tol if args.tol is not None else 1e-10
    a = spectral_factorize(poly, tol=tol, max_iter=args.max_iter)
    cert = outerness_certificate(a)
    if args.out:
        Path(args.out).write_text(json.dumps(a.to_json()))
    row = {"residual": factorization_residual(poly, a), "residual_fine": factorization_residual(poly, a, 8192),
           "tol": tol, "winding": cert.winding, "min_abs_det": cert.min_abs_det,
           "outer": cert.outer, "degree": a.degree, "bound_kind": "exact" if cert.outer else "upper"}
    return [row], EXIT_OK if cert.outer else EXIT_FAIL


def cmd_interp(args, cfg):
    x, _ = load_matrix(args.input)
    margin = schatten_interp_check(x, args.p0, args.p1, args.theta)
    pt = interp_order(args.p0, args.p1, args.theta)
    row = {"p0": _fmt_order(args.p0), "p1": _fmt_order(args.p1), "theta": args.theta,
           "p_theta": _fmt_order(pt), "norm_theta": schatten_norm(x, pt), "margin": margin,
           "tol": 1e-12, "pass": margin >= -1e-12 * max(1.0, schatten_norm(x, pt))}
    return [row], EXIT_OK if row["pass"] else EXIT_FAIL


COMMANDS = {"norm": cmd_norm, "entropy": cmd_entropy, "divergence": cmd_divergence,
            "coherent": cmd_coherent, "verify": cmd_verify, "decouple": cmd_decouple,
            "specfact": cmd_specfact, "interp": cmd_interp}


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return _jsonable(x.item())
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _print_table(command: str, rows: list[dict], out) -> None:
    if not rows:
        return
    keys = list(rows[0])
    cells = [[str(r.get(k, "")) for k in keys] for r in rows]
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    print("  ".join(k.ljust(w) for k, w in zip(keys, widths)), file=out)
    for c in cells:
        print("  ".join(v.ljust(w) for v, w in zip(c, widths)), file=out)


def run(argv: Sequence[str] | None = None, out=None, env=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    flags = {"seed": args.seed, "tol": args.tol, "restarts": args.restarts,
             "trials": getattr(args, "trials", None), "threads": getattr(args, "threads", None),
             "mc_samples": getattr(args, "mc_samples", None)}
    try:
        cfg = load_config(args.config, flags, env)
        rows, code = COMMANDS[args.command](args, cfg)
    except NUMERIC_ERRORS as e:
        print(f"svv {args.command}: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, OSError) as e:
        print(f"svv {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as e:
        print(f"svv {args.command}: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.json:
        env_obj = {"command": args.command, "config": cfg.to_dict(), "results": rows,
                   "version": __version__}
        print(json.dumps(_jsonable(env_obj), sort_keys=True), file=out)
    else:
        _print_table(args.command, rows, out)
    return code


def main() -> None:
    sys.exit(run())
