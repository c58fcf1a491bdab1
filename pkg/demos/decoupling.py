"""Monte-Carlo look at decoupling by random unitaries and projection.

Run with ``python3 demos/decoupling.py``.
"""

import math

import numpy as np

from svv import BipartiteOp, random_density, w_alpha
from svv.verify import decoupling_mc, decoupling_samples

dy = dx = 4
d_x0 = 2
v = np.eye(dy).ravel() / math.sqrt(dy)
states = {
    "maximally entangled": BipartiteOp(np.outer(v, v), (dy, dx)),
    "random mixed": BipartiteOp(random_density(dy * dx, seed=3), (dy, dx)),
}

for name, rho in states.items():
    draws = decoupling_samples(rho, d_x0, samples=2000, seed=1)
    print(f"{name}: mean distance {draws.mean():.4f} +- {draws.std(ddof=1) / math.sqrt(len(draws)):.4f}")
    for a in (1.0, 1.5, 2.0):
        row = decoupling_mc(rho, d_x0, a, draws=draws, w_opts={"restarts": 3})
        print(f"  alpha {a}: mean + 3 se = {row.lhs:.4f} <= bound {row.rhs:.4f}   "
              f"(W = {w_alpha(rho, a, restarts=3):.4f})")
