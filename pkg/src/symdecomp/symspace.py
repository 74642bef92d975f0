"""Index combinatorics and distinct-entry storage for symmetric tensors.

A cubic order-m, dimension-n tensor that is invariant under index
permutation has only binomial(m+n-1, m) distinct entries.  Each entry is
identified by its *index representation* (the nondecreasing member of its
permutation class) or equivalently by its *monomial representation* (the
vector of occurrence counts of each axis value).  This module enumerates
those representations, computes class multiplicities, and stores dense
symmetric tensors over distinct entries only.

Indices are 1-based in all documentation and on-disk formats; in-memory
arrays are 0-based.  Catalogs and tensors are immutable after construction,
so concurrent reads are safe.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

# Hard guards: catalog sizes must stay addressable, and multiplicities are
# exact int64 multinomials only up to order 20.
MAX_CATALOG_SIZE = 2**62
MAX_ORDER = 20

DEFAULT_SYMMETRY_TOL = 1e-12
DEFAULT_DENSE_CAP = 10**8


def distinct_entry_count(order: int, dim: int) -> int:
    """Number of distinct entries of a symmetric (order, dim) tensor."""
    if order < 2:
        raise ValueError(f"order must be >= 2, got {order}")
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    count = math.comb(order + dim - 1, order)
    if count > MAX_CATALOG_SIZE:
        raise ValueError(
            f"catalog for order={order}, dim={dim} has {count} entries, "
            f"exceeding the supported maximum {MAX_CATALOG_SIZE}"
        )
    return count


def multiplicity(counts) -> int:
    """Number of raw indices in the class with monomial representation `counts`.

    Equals the multinomial coefficient m!/(c_1! ... c_n!) for m = sum(counts),
    computed as a running product of binomials so intermediate values stay
    bounded by the result.
    """
    total = int(sum(counts))
    if total > MAX_ORDER:
        raise ValueError(f"order {total} exceeds multiplicity guard {MAX_ORDER}")
    result = 1
    partial = 0
    for c in counts:
        c = int(c)
        if c < 0:
            raise ValueError("monomial counts must be nonnegative")
        partial += c
        result *= math.comb(partial, c)
    return result


def index_to_monomial(index, dim: int) -> tuple:
    """Occurrence counts (c_1, ..., c_n) of each axis value in a 1-based index."""
    counts = [0] * dim
    for entry in index:
        if not 1 <= entry <= dim:
            raise ValueError(f"index entry {entry} out of range 1..{dim}")
        counts[entry - 1] += 1
    return tuple(counts)


def monomial_to_index(counts) -> tuple:
    """Nondecreasing 1-based index with counts[j-1] copies of each value j."""
    index = []
    for value, c in enumerate(counts, start=1):
        if c < 0:
            raise ValueError("monomial counts must be nonnegative")
        index.extend([value] * int(c))
    return tuple(index)


@dataclass(frozen=True)
class IndexCatalog:
    """Enumeration of index/monomial representations for fixed (order, dim).

    Attributes
    ----------
    order, dim : int
    reps : (size, order) int array, 0-based, rows in lexicographic order
    monomials : (size, dim) int array, parallel occurrence counts
    multiplicities : (size,) int64 array of class sizes
    """

    order: int
    dim: int
    reps: np.ndarray
    monomials: np.ndarray
    multiplicities: np.ndarray

    @property
    def size(self) -> int:
        return self.reps.shape[0]

    def __len__(self) -> int:
        return self.size


def build_catalog(order: int, dim: int) -> IndexCatalog:
    """Enumerate all index classes of a symmetric (order, dim) tensor.

    Rows of `reps` are the nondecreasing 0-based representations in
    lexicographic order, a deterministic layout shared by every on-disk
    format and parameter vector in this package.
    """
    size = distinct_entry_count(order, dim)
    if order > MAX_ORDER:
        raise ValueError(f"order {order} exceeds multiplicity guard {MAX_ORDER}")
    reps = np.fromiter(
        itertools.chain.from_iterable(
            itertools.combinations_with_replacement(range(dim), order)
        ),
        dtype=np.intp,
        count=size * order,
    ).reshape(size, order)
    monomials = np.zeros((size, dim), dtype=np.intp)
    for j in range(order):
        np.add.at(monomials, (np.arange(size), reps[:, j]), 1)
    mults = np.array([multiplicity(c) for c in monomials], dtype=np.int64)
    reps.setflags(write=False)
    monomials.setflags(write=False)
    mults.setflags(write=False)
    return IndexCatalog(order, dim, reps, monomials, mults)


@dataclass(frozen=True)
class SymTensor:
    """Dense symmetric tensor stored as one value per index class."""

    catalog: IndexCatalog
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.catalog.size,):
            raise ValueError(
                f"expected {self.catalog.size} distinct values, got shape {values.shape}"
            )
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def order(self) -> int:
        return self.catalog.order

    @property
    def dim(self) -> int:
        return self.catalog.dim


def sym_norm(tensor: SymTensor) -> float:
    """Elementwise l2 norm, computed over distinct entries with multiplicities."""
    weights = tensor.catalog.multiplicities.astype(np.float64)
    return float(np.sqrt(np.sum(weights * tensor.values**2)))


def sym_from_dense(
    full: np.ndarray,
    catalog: IndexCatalog | None = None,
    tol: float = DEFAULT_SYMMETRY_TOL,
) -> SymTensor:
    """Compress a dense cubic array into distinct-entry storage.

    Symmetry is verified against every adjacent-axis transposition (the
    generators of the full permutation group); the worst deviation must not
    exceed `tol` times the tensor norm.

    Raises
    ------
    ValueError
        If the array is not cubic, or asymmetric beyond tolerance.  The
        asymmetry error names the worst-violating index pair.
    """
    full = np.asarray(full, dtype=np.float64)
    order = full.ndim
    if order < 2:
        raise ValueError("tensor order must be >= 2")
    dims = set(full.shape)
    if len(dims) != 1:
        raise ValueError(f"tensor is not cubic: shape {full.shape}")
    dim = full.shape[0]

    scale = float(np.linalg.norm(full.ravel()))
    limit = tol * max(scale, 1e-300)
    for axis in range(order - 1):
        axes = list(range(order))
        axes[axis], axes[axis + 1] = axes[axis + 1], axes[axis]
        delta = np.abs(full - np.transpose(full, axes))
        worst = float(delta.max())
        if worst > limit:
            at = np.unravel_index(int(np.argmax(delta)), full.shape)
            swapped = list(at)
            swapped[axis], swapped[axis + 1] = swapped[axis + 1], swapped[axis]
            one_based = tuple(i + 1 for i in at)
            other = tuple(i + 1 for i in swapped)
            raise ValueError(
                f"input is not symmetric: entries at {one_based} and {other} "
                f"differ by {worst:.3e} (tolerance {limit:.3e})"
            )

    if catalog is None:
        catalog = build_catalog(order, dim)
    elif (catalog.order, catalog.dim) != (order, dim):
        raise ValueError("catalog does not match tensor shape")
    values = full[tuple(catalog.reps.T)]
    return SymTensor(catalog, values)


def _tail_count_prefix(order: int, dim: int) -> np.ndarray:
    """P[t, v] = number of nondecreasing t-sequences over {0..dim-1} whose
    first value is below v; used to rank sorted indices in catalog order."""
    table = np.zeros((order, dim + 1), dtype=np.int64)
    for t in range(order):
        counts = [math.comb(dim - v + t - 1, t) if t > 0 else 1 for v in range(dim)]
        table[t, 1:] = np.cumsum(counts)
    return table


def class_positions(catalog: IndexCatalog, sorted_indices: np.ndarray) -> np.ndarray:
    """Catalog row of each nondecreasing 0-based index (vectorized rank)."""
    order, dim = catalog.order, catalog.dim
    table = _tail_count_prefix(order, dim)
    sorted_indices = np.asarray(sorted_indices)
    prev = np.empty_like(sorted_indices)
    prev[:, 0] = 0
    prev[:, 1:] = sorted_indices[:, :-1]
    ranks = np.zeros(sorted_indices.shape[0], dtype=np.int64)
    for t in range(order):
        row = table[order - 1 - t]
        ranks += row[sorted_indices[:, t]] - row[prev[:, t]]
    return ranks


def sym_to_dense(tensor: SymTensor, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """Expand to the full n**m array; every permutation of a class shares its value."""
    order, dim = tensor.order, tensor.dim
    total = dim**order
    if total > cap:
        raise ValueError(f"dense expansion has {total} entries, exceeding cap {cap}")
    raw = np.indices((dim,) * order).reshape(order, -1).T
    positions = class_positions(tensor.catalog, np.sort(raw, axis=1))
    return tensor.values[positions].reshape((dim,) * order)
