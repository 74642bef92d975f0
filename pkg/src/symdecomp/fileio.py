"""Plain-text interchange formats.

All files are line-oriented ASCII with 1-based indices and round-trip
(`repr`) float formatting:

symtensor v1
    header ``symtensor m n``, then one line per index class in catalog
    (lexicographic) order: the m index entries followed by the value.

densetensor v1
    header ``densetensor m n``, then the n**m entries in odometer order
    (last index fastest), one per line.

kruskal v1
    header ``kruskal m n p``, one line of p weights, then n rows of p
    factor entries (row i holds x_i1 ... x_ip).

factorset v1
    header ``factorset m n p``, then m blocks of n rows of p entries,
    one block per mode.
"""
from __future__ import annotations

import numpy as np

from .kmodel import FactorSet, KruskalSymModel
from .symspace import IndexCatalog, SymTensor, build_catalog


def _fmt(value: float) -> str:
    return repr(float(value))


def _read_tokens(path) -> list:
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh]
    return [ln.split() for ln in lines if ln]


def _header(tokens, tag: str, path, nfields: int) -> tuple:
    if not tokens or tokens[0][:1] != [tag]:
        raise ValueError(f"{path}: expected '{tag}' header")
    head = tokens[0]
    if len(head) != 1 + nfields:
        raise ValueError(f"{path}: malformed '{tag}' header: {' '.join(head)}")
    try:
        return tuple(int(v) for v in head[1:])
    except ValueError as exc:
        raise ValueError(f"{path}: non-integer header field") from exc


def write_symtensor(path, tensor: SymTensor) -> None:
    cat = tensor.catalog
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"symtensor {cat.order} {cat.dim}\n")
        for rep, value in zip(cat.reps, tensor.values):
            idx = " ".join(str(i + 1) for i in rep)
            fh.write(f"{idx} {_fmt(value)}\n")


def read_symtensor(path, catalog: IndexCatalog | None = None) -> SymTensor:
    tokens = _read_tokens(path)
    order, dim = _header(tokens, "symtensor", path, 2)
    if catalog is None:
        catalog = build_catalog(order, dim)
    elif (catalog.order, catalog.dim) != (order, dim):
        raise ValueError(f"{path}: catalog shape mismatch")
    body = tokens[1:]
    if len(body) != catalog.size:
        raise ValueError(
            f"{path}: expected {catalog.size} entry lines, found {len(body)}"
        )
    values = np.empty(catalog.size)
    for row, (rep, line) in enumerate(zip(catalog.reps, body)):
        if len(line) != order + 1:
            raise ValueError(f"{path}: malformed entry line {row + 2}")
        idx = [int(tok) - 1 for tok in line[:order]]
        if list(rep) != idx:
            raise ValueError(
                f"{path}: entry line {row + 2} is out of catalog order"
            )
        values[row] = float(line[order])
    return SymTensor(catalog, values)


def write_densetensor(path, dense: np.ndarray) -> None:
    dense = np.asarray(dense, dtype=np.float64)
    dims = set(dense.shape)
    if dense.ndim < 2 or len(dims) != 1:
        raise ValueError(f"dense tensor must be cubic, got shape {dense.shape}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"densetensor {dense.ndim} {dense.shape[0]}\n")
        for value in dense.reshape(-1):
            fh.write(_fmt(value) + "\n")


def read_densetensor(path) -> np.ndarray:
    tokens = _read_tokens(path)
    order, dim = _header(tokens, "densetensor", path, 2)
    flat = [float(tok) for line in tokens[1:] for tok in line]
    if len(flat) != dim**order:
        raise ValueError(
            f"{path}: expected {dim**order} values, found {len(flat)}"
        )
    return np.array(flat).reshape((dim,) * order)


def write_kruskal(path, model: KruskalSymModel, order: int) -> None:
    n, p = model.dim, model.rank
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"kruskal {order} {n} {p}\n")
        fh.write(" ".join(_fmt(w) for w in model.weights) + "\n")
        for row in model.factors:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")


def read_kruskal(path) -> tuple:
    """Returns (model, order)."""
    tokens = _read_tokens(path)
    order, n, p = _header(tokens, "kruskal", path, 3)
    body = tokens[1:]
    if len(body) != n + 1:
        raise ValueError(f"{path}: expected 1 weight line and {n} factor rows")
    if any(len(line) != p for line in body):
        raise ValueError(f"{path}: every body line must hold {p} entries")
    weights = np.array([float(v) for v in body[0]])
    factors = np.array([[float(v) for v in line] for line in body[1:]])
    return KruskalSymModel(weights, factors), order


def write_factorset(path, fs: FactorSet) -> None:
    m, n, p = fs.order, fs.dim, fs.rank
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"factorset {m} {n} {p}\n")
        for mat in fs.factors:
            for row in mat:
                fh.write(" ".join(_fmt(v) for v in row) + "\n")


def read_factorset(path) -> FactorSet:
    tokens = _read_tokens(path)
    m, n, p = _header(tokens, "factorset", path, 3)
    body = tokens[1:]
    if len(body) != m * n:
        raise ValueError(f"{path}: expected {m * n} factor rows, found {len(body)}")
    if any(len(line) != p for line in body):
        raise ValueError(f"{path}: every factor row must hold {p} entries")
    rows = np.array([[float(v) for v in line] for line in body])
    return FactorSet(tuple(rows[j * n : (j + 1) * n] for j in range(m)))
