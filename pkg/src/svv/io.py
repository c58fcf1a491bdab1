"""JSON formats for matrices, bipartite operators, channels and trig polynomials.

Matrix payload::

    {"rows": n, "cols": m, "dims": [dA, dB], "data": [[re, im], ...]}

``dims`` is optional; ``data`` is row-major.  Python's float ``repr`` is
shortest-round-trip, so dumps and loads are bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .linalg import BipartiteOp, Channel

__all__ = ["cmat_to_json", "cmat_from_json", "dump_matrix", "load_matrix", "load_bipartite",
           "channel_to_json", "channel_from_json", "load_channel"]


def cmat_to_json(a: np.ndarray, dims=None) -> dict:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    out = {"rows": int(a.shape[0]), "cols": int(a.shape[1])}
    if dims is not None:
        out["dims"] = [int(d) for d in dims]
    out["data"] = [[float(z.real), float(z.imag)] for z in a.ravel()]
    return out


def cmat_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    data = obj["data"]
    if len(data) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {len(data)}")
    arr = np.array([complex(float(re), float(im)) for re, im in data], dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite matrix entries")
    return arr.reshape(rows, cols)


def dump_matrix(a, path: str | Path, dims=None) -> None:
    if isinstance(a, BipartiteOp):
        a, dims = a.mat, a.dims
    Path(path).write_text(json.dumps(cmat_to_json(a, dims)))


def load_matrix(path: str | Path) -> tuple[np.ndarray, tuple[int, int] | None]:
    obj = json.loads(Path(path).read_text())
    dims = tuple(obj["dims"]) if "dims" in obj else None
    return cmat_from_json(obj), dims


def load_bipartite(path: str | Path, dims=None) -> BipartiteOp:
    mat, file_dims = load_matrix(path)
    dims = dims or file_dims
    if dims is None:
        raise ValueError(f"{path}: no 'dims' in file and none given")
    return BipartiteOp(mat, tuple(dims))


def channel_to_json(ch: Channel) -> dict:
    return {"kraus": [cmat_to_json(k) for k in ch.kraus]}


def channel_from_json(obj: dict) -> Channel:
    return Channel(tuple(cmat_from_json(k) for k in obj["kraus"]))


def load_channel(path: str | Path) -> Channel:
    return channel_from_json(json.loads(Path(path).read_text()))
