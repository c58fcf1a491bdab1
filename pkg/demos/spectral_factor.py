"""Outer spectral factors of matrix trigonometric polynomials.

Run with ``python3 demos/spectral_factor.py``.
"""

import numpy as np

from svv import TrigMatPoly, outerness_certificate, spectral_factorize
from svv.specfact import factorization_residual, random_trig_poly, strip_factorize

# 2 + 2 cos t = |1 + e^{it}|^2.  The outer factor is 1 + z; its zero on the
# circle is handled by the exact scalar root path.
t = TrigMatPoly.from_nonnegative([np.array([[2.0 + 0j]]), np.array([[1.0 + 0j]])])
a = spectral_factorize(t)
print("factor of 2 + 2cos t:", np.round(a.coeffs[:, 0, 0].real, 12))

# |2 + z|^2 = |1 + 2z|^2, but only 2 + z is invertible on the open disk.
t = TrigMatPoly.from_nonnegative([np.array([[5.0 + 0j]]), np.array([[2.0 + 0j]])])
print("factor of 5 + 4cos t:", np.round(spectral_factorize(t).coeffs[:, 0, 0].real, 12))

# A random 3x3 symbol of band 3.
t = random_trig_poly(3, 3, seed=42)
a = spectral_factorize(t)
cert = outerness_certificate(a)
print(f"\n3x3 band-3 symbol: residual {factorization_residual(t, a):.2e}, "
      f"winding {cert.winding}, min |det A| on the disk {cert.min_abs_det:.3f}")
print("A(0) is positive semidefinite:", np.linalg.eigvalsh(a.coeffs[0]).round(6))

# On the strip 0 <= Re z <= 1 the boundary data are pulled back to the circle,
# fitted, factored and pushed forward.  Both edges must share their limit at
# s -> +-inf, otherwise the pulled-back symbol jumps and the fit cannot converge.
base = np.array([[2.0, 0.3], [0.3, 1.5]], dtype=complex)
k0 = np.array([[1.0, 0.5], [0.5, -0.4]], dtype=complex)
k1 = np.array([[-0.5, 0.4j], [-0.4j, 0.8]], dtype=complex)
bump = lambda s: 1 / np.cosh(np.pi * np.asarray(s)) ** 2  # noqa: E731
t0 = lambda s: base + bump(s)[:, None, None] * k0  # noqa: E731
t1 = lambda s: base + bump(s)[:, None, None] * k1  # noqa: E731
fac = strip_factorize(t0, t1, lam_floor=0.5, band=32)
print(f"\nstrip: fit error {fac.fit_error:.2e}, residual {fac.residual:.2e}")
f = fac.boundary(0, 0.4)
print("F(is)^* F(is) vs T_0(s) at s = 0.4:",
      np.abs(f.conj().T @ f - t0(np.array([0.4]))[0]).max().round(8))
