"""A walk through conditional Renyi entropies on three kinds of states.

Run with ``python3 demos/entropy_tour.py``.
"""

import math

import numpy as np

from svv import (BipartiteOp, INF, cond_renyi_entropy, cond_vn_entropy, norm_1alpha,
                 random_density)

# States are ordered (Y, X): the conditioning system comes first.
d = 2
phi = np.eye(d).ravel() / math.sqrt(d)
entangled = BipartiteOp(np.outer(phi, phi), (d, d))
product = BipartiteOp(np.kron(random_density(d, seed=1), np.eye(d) / d), (d, d))
generic = BipartiteOp(random_density(d * d, seed=7), (d, d))

alphas = [1.0, 1.2, 1.5, 2.0, 3.0, 5.0, INF]
print("alpha   " + "  ".join(f"{name:>11s}" for name in ("entangled", "product", "random")))
for a in alphas:
    hs = [cond_renyi_entropy(s, a, restarts=4) for s in (entangled, product, generic)]
    print(f"{a!s:7s} " + "  ".join(f"{h:11.6f}" for h in hs))

# Entanglement pushes the entropy to -log d, the uncorrelated state sits at +log d.
print("\nlog 2 =", math.log(2))

# At alpha = 1 the family meets the von Neumann conditional entropy.
print("H(X|Y) random:", cond_vn_entropy(generic))

# The entropy is -alpha' log of a (1, alpha)-norm; inspect the optimizer behind it.
res = norm_1alpha(generic, 2.0, restarts=4)
print(f"\n||rho||_(1,2) = {res.value:.8f}  ({res.bound_kind}, spread {res.spread:.1e})")
print("optimal sigma_Y eigenvalues:", np.round(np.linalg.eigvalsh(res.optimizer), 6))
