"""Dense complex linear algebra and seeded instance generation.

Bipartite operators use first-factor-major indexing: the composite row index
is ``i = a * dim_b + b``.  This matches ``numpy.kron(a, b)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "LinAlgFailure",
    "SingularityError",
    "DimensionError",
    "BipartiteOp",
    "Channel",
    "splitmix64",
    "derive_seed",
    "rng_for",
    "hermitize",
    "is_hermitian",
    "check_density",
    "eigh",
    "herm_power",
    "herm_log",
    "kron",
    "partial_trace",
    "permute_subsystems",
    "haar_unitary",
    "random_density",
    "random_pure_state",
    "random_channel",
    "apply_channel",
    "trace_distance",
]

_MASK64 = (1 << 64) - 1
PSD_TOL = 1e-10
HERM_TOL = 1e-10


class LinAlgFailure(ArithmeticError):
    """Raised when an eigen-solver fails to converge."""


class SingularityError(ArithmeticError):
    """Raised when a negative power of a singular matrix is requested."""


class DimensionError(ValueError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class BipartiteOp:
    """Square matrix on ``C^dim_a (x) C^dim_b``.

    In the entropy routines the first factor is the conditioning system
    (``Y`` in ``rho_YX``).
    """

    mat: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 2 or min(dims) < 1:
            raise DimensionError(f"bad dims {self.dims}")
        mat = _frozen(self.mat)
        n = dims[0] * dims[1]
        if mat.shape != (n, n):
            raise DimensionError(f"matrix shape {mat.shape} does not match dims {dims}")
        if not np.all(np.isfinite(mat)):
            raise ValueError("non-finite entries")
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def dim_a(self) -> int:
        return self.dims[0]

    @property
    def dim_b(self) -> int:
        return self.dims[1]

    def swap(self) -> "BipartiteOp":
        """Same operator with the tensor factors exchanged."""
        return BipartiteOp(permute_subsystems(self.mat, self.dims, (1, 0)), self.dims[::-1])

    def __add__(self, other: "BipartiteOp") -> "BipartiteOp":
        if self.dims != other.dims:
            raise DimensionError("dims differ")
        return BipartiteOp(self.mat + other.mat, self.dims)

    def __sub__(self, other: "BipartiteOp") -> "BipartiteOp":
        if self.dims != other.dims:
            raise DimensionError("dims differ")
        return BipartiteOp(self.mat - other.mat, self.dims)

    def __mul__(self, c: float) -> "BipartiteOp":
        return BipartiteOp(c * self.mat, self.dims)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Channel:
    """CPTP map in Kraus form; each operator is ``dim_out x dim_in``."""

    kraus: tuple[np.ndarray, ...] = field()

    def __post_init__(self):
        ks = tuple(_frozen(k) for k in self.kraus)
        if not ks:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ks[0].shape
        if any(k.shape != shape for k in ks):
            raise DimensionError("Kraus operators must share a shape")
        s = sum(k.conj().T @ k for k in ks)
        if np.linalg.norm(s - np.eye(shape[1])) > 1e-8:
            raise ValueError("Kraus operators are not trace preserving")
        object.__setattr__(self, "kraus", ks)

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.kraus)

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        return sum(k.conj().T @ y @ k for k in self.kraus)


# --- seeds -----------------------------------------------------------------


def splitmix64(x: int) -> int:
    """One round of the SplitMix64 output function."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *index: int) -> int:
    """Per-sample seed from a master seed and a (possibly nested) index."""
    s = int(master) & _MASK64
    for i in index:
        s = splitmix64(s ^ splitmix64(int(i) & _MASK64))
    return s


def rng_for(seed: int | np.random.Generator | None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# --- hermitian helpers -------------------------------------------------------


def hermitize(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    return (h + h.conj().T) / 2


def is_hermitian(h: np.ndarray, tol: float = HERM_TOL) -> bool:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        return False
    return np.linalg.norm(h - h.conj().T) <= tol * max(1.0, np.linalg.norm(h))


def check_density(rho: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """Validate and return a symmetrized copy of a density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if not is_hermitian(rho):
        raise ValueError("density matrix must be Hermitian")
    rho = hermitize(rho)
    lam = np.linalg.eigvalsh(rho)
    if lam[0] < -tol:
        raise ValueError(f"density matrix has eigenvalue {lam[0]:.3e} < 0")
    if abs(np.trace(rho).real - 1) > tol:
        raise ValueError(f"density matrix has trace {np.trace(rho).real!r}")
    return rho


def eigh(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix."""
    h = hermitize(h)
    try:
        return np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise LinAlgFailure(f"eigh failed on a {h.shape} matrix: {exc}") from exc


def herm_power(h: np.ndarray, exponent: float, floor: float | None = None) -> np.ndarray:
    """Matrix power of a PSD matrix via its eigendecomposition.

    Negative eigenvalues down to ``-1e-10`` are clamped to zero.  For a
    negative exponent eigenvalues are further raised to ``floor``; the default
    floor is ``1e-12`` times the largest eigenvalue.  ``floor=0`` with a zero
    eigenvalue and a negative exponent raises :class:`SingularityError`.
    """
    lam, v = eigh(h)
    if lam.size and lam[0] < -PSD_TOL * max(1.0, abs(lam[-1])):
        raise ValueError(f"matrix is not PSD (eigenvalue {lam[0]:.3e})")
    lam = np.clip(lam, 0.0, None)
    if exponent < 0:
        if floor is None:
            floor = 1e-12 * (lam[-1] if lam.size else 1.0)
        lam = np.maximum(lam, floor)
        if np.any(lam == 0):
            raise SingularityError("negative power of a singular matrix")
    elif exponent == 0:
        return np.eye(h.shape[0], dtype=complex)
    return (v * lam**exponent) @ v.conj().T


def herm_log(h: np.ndarray, floor: float = 0.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigen-decomposition with log eigenvalues; zeros map to ``-inf`` unless floored."""
    lam, v = eigh(h)
    lam = np.clip(lam, floor, None)
    with np.errstate(divide="ignore"):
        return lam, np.log(lam), v


# --- tensor bookkeeping ------------------------------------------------------


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(op: BipartiteOp | np.ndarray, over: str = "second",
                  dims: Sequence[int] | None = None) -> np.ndarray:
    """Trace out the ``"first"`` or ``"second"`` tensor factor."""
    if isinstance(op, BipartiteOp):
        mat, (da, db) = op.mat, op.dims
    else:
        if dims is None:
            raise DimensionError("dims required for a raw matrix")
        mat = np.asarray(op)
        da, db = dims
        if mat.shape != (da * db, da * db):
            raise DimensionError(f"shape {mat.shape} does not match dims {tuple(dims)}")
    t = mat.reshape(da, db, da, db)
    if over == "second":
        return np.einsum("ajbj->ab", t)
    if over == "first":
        return np.einsum("iaib->ab", t)
    raise ValueError(f"over must be 'first' or 'second', got {over!r}")


def permute_subsystems(mat: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: new factor ``k`` is old factor ``perm[k]``."""
    dims = list(dims)
    n = len(dims)
    mat = np.asarray(mat)
    t = mat.reshape(dims + dims)
    axes = list(perm) + [n + p for p in perm]
    d = int(np.prod(dims))
    return t.transpose(axes).reshape(d, d)


# --- random instances -------------------------------------------------------


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def haar_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix with phase fix."""
    if dim < 1:
        raise DimensionError("dim must be >= 1")
    rng = rng_for(seed)
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_pure_state(dim: int, seed=None) -> np.ndarray:
    rng = rng_for(seed)
    v = _ginibre(rng, dim, 1)[:, 0]
    return v / np.linalg.norm(v)


def random_density(dim: int, rank: int | None = None, seed=None) -> np.ndarray:
    """Random density matrix of the given rank (Hilbert-Schmidt-type measure)."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise DimensionError(f"rank {rank} infeasible for dim {dim}")
    rng = rng_for(seed)
    g = _ginibre(rng, dim, rank)
    rho = g @ g.conj().T
    return hermitize(rho / np.trace(rho).real)


def random_channel(dim_in: int, dim_out: int, dim_env: int, seed=None,
                   isometry: np.ndarray | None = None) -> Channel:
    """Random channel from a Stinespring isometry ``C^dim_in -> C^dim_out (x) C^dim_env``.

    The isometry is built from orthonormalized Gaussian columns unless given.
    Kraus operators are its blocks ``K_e = (I (x) <e|) V``.
    """
    if dim_out * dim_env < dim_in:
        raise DimensionError("dim_out * dim_env must be >= dim_in")
    if isometry is None:
        rng = rng_for(seed)
        q, r = np.linalg.qr(_ginibre(rng, dim_out * dim_env, dim_in))
        v = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    else:
        v = np.asarray(isometry, dtype=complex)
    t = v.reshape(dim_out, dim_env, dim_in)
    return Channel(tuple(t[:, e, :] for e in range(dim_env)))


def apply_channel(channel: Channel, op: BipartiteOp, on: str = "first") -> BipartiteOp:
    """Apply ``channel (x) id`` (``on="first"``) or ``id (x) channel``."""
    ks = channel.kraus
    da, db = op.dims
    if on == "first":
        if channel.dim_in != da:
            raise DimensionError("channel input does not match first factor")
        big = [np.kron(k, np.eye(db)) for k in ks]
        dims = (channel.dim_out, db)
    elif on == "second":
        if channel.dim_in != db:
            raise DimensionError("channel input does not match second factor")
        big = [np.kron(np.eye(da), k) for k in ks]
        dims = (da, channel.dim_out)
    else:
        raise ValueError(f"bad side {on!r}")
    return BipartiteOp(hermitize(sum(k @ op.mat @ k.conj().T for k in big)), dims)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    rho, sigma = np.asarray(rho), np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise DimensionError(f"shapes differ: {rho.shape} vs {sigma.shape}")
    return 0.5 * float(np.abs(np.linalg.eigvalsh(hermitize(rho - sigma))).sum())
