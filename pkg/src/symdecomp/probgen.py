"""Seeded generation of low-rank symmetric test problems.

Three instance families:

* ``standard``: weights uniform on {-1, +1}, factor columns standard normal
  then normalized to unit length.
* ``collinear``: unit factor columns with every pairwise inner product equal
  to the congruence parameter (built from the Cholesky factor of the
  congruence matrix applied to a random orthonormal basis).
* ``nonnegative``: all weights one, factor entries uniform on [0, 1]
  (columns deliberately left unnormalized).

The clean tensor is the exact model reconstruction.  Additive noise draws
one standard-normal deviate per distinct index class, which keeps the noisy
tensor symmetric by construction, and is scaled so the realized noise ratio
||data - clean|| / ||clean|| equals the requested level exactly.  (A raw
elementwise draw over all n**m entries would leave the symmetric subspace;
the per-class draw trades that for a per-entry variance that varies across
multiplicity classes.)

Randomness comes from the counter-based Philox generator.  Every component
(weights, factors, noise, each start) draws from its own substream, derived
from the instance seed via `numpy.random.SeedSequence` spawn keys, so any
piece can be regenerated in isolation.  Generation is pure given the spec.
"""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass

import numpy as np

from .fileio import read_kruskal, read_symtensor, write_kruskal, write_symtensor
from .kmodel import KruskalSymModel, model_to_symtensor
from .symspace import IndexCatalog, SymTensor, build_catalog, sym_norm

STANDARD = "standard"
COLLINEAR = "collinear"
NONNEGATIVE = "nonnegative"
FAMILIES = (STANDARD, COLLINEAR, NONNEGATIVE)

GENERATOR_VERSION = 1

# substream tags
_WEIGHTS, _FACTORS, _NOISE, _STARTS = 0, 1, 2, 3


@dataclass(frozen=True)
class InstanceSpec:
    order: int
    dim: int
    rank: int
    noise: float
    family: str
    seed: int
    congruence: float = 0.9

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.noise < 0:
            raise ValueError("noise level must be nonnegative")
        if self.family == COLLINEAR:
            if self.rank > self.dim:
                raise ValueError("collinear instances require rank <= dim")
            if not 0.0 <= self.congruence < 1.0:
                raise ValueError("congruence must lie in [0, 1)")


@dataclass(frozen=True)
class ProblemInstance:
    spec: InstanceSpec
    truth: KruskalSymModel
    clean: SymTensor
    data: SymTensor
    noise_applied: float


def _stream(seed: int, *key) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def _with_noise(spec: InstanceSpec, catalog: IndexCatalog, clean: SymTensor) -> SymTensor:
    if spec.noise == 0.0:
        return clean
    rng = _stream(spec.seed, _NOISE)
    draw = rng.standard_normal(catalog.size)
    noise_tensor = SymTensor(catalog, draw)
    scale = spec.noise * sym_norm(clean) / sym_norm(noise_tensor)
    return SymTensor(catalog, clean.values + scale * draw)


def _finish(spec: InstanceSpec, truth: KruskalSymModel, catalog: IndexCatalog) -> ProblemInstance:
    clean = model_to_symtensor(truth, catalog)
    data = _with_noise(spec, catalog, clean)
    return ProblemInstance(spec, truth, clean, data, spec.noise)


def gen_standard(spec: InstanceSpec, catalog: IndexCatalog | None = None) -> ProblemInstance:
    if spec.family != STANDARD:
        raise ValueError(f"expected family {STANDARD!r}")
    catalog = catalog or build_catalog(spec.order, spec.dim)
    weights = _stream(spec.seed, _WEIGHTS).choice([-1.0, 1.0], size=spec.rank)
    raw = _stream(spec.seed, _FACTORS).standard_normal((spec.dim, spec.rank))
    factors = raw / np.linalg.norm(raw, axis=0)
    truth = KruskalSymModel(weights, factors, normalized=True)
    return _finish(spec, truth, catalog)


def gen_collinear(spec: InstanceSpec, catalog: IndexCatalog | None = None) -> ProblemInstance:
    if spec.family != COLLINEAR:
        raise ValueError(f"expected family {COLLINEAR!r}")
    catalog = catalog or build_catalog(spec.order, spec.dim)
    p, nu = spec.rank, spec.congruence
    weights = _stream(spec.seed, _WEIGHTS).choice([-1.0, 1.0], size=p)
    raw = _stream(spec.seed, _FACTORS).standard_normal((spec.dim, p))
    q, r = np.linalg.qr(raw)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    q = q * signs  # deterministic orientation
    congruence = (1.0 - nu) * np.eye(p) + nu * np.ones((p, p))
    chol = np.linalg.cholesky(congruence)
    factors = q @ chol.T  # Gram(factors) == congruence, unit diagonal
    truth = KruskalSymModel(weights, factors, normalized=True)
    return _finish(spec, truth, catalog)


def gen_nonnegative(spec: InstanceSpec, catalog: IndexCatalog | None = None) -> ProblemInstance:
    if spec.family != NONNEGATIVE:
        raise ValueError(f"expected family {NONNEGATIVE!r}")
    catalog = catalog or build_catalog(spec.order, spec.dim)
    factors = _stream(spec.seed, _FACTORS).uniform(0.0, 1.0, (spec.dim, spec.rank))
    truth = KruskalSymModel(np.ones(spec.rank), factors)
    return _finish(spec, truth, catalog)


_GENERATORS = {STANDARD: gen_standard, COLLINEAR: gen_collinear, NONNEGATIVE: gen_nonnegative}


def generate(spec: InstanceSpec, catalog: IndexCatalog | None = None) -> ProblemInstance:
    """Generate the instance for `spec` (dispatches on the family)."""
    return _GENERATORS[spec.family](spec, catalog)


def gen_starts(spec: InstanceSpec, count: int = 5, seed: int | None = None) -> list:
    """Reproducible start points: a list of (weights0, factors0) pairs.

    Factor entries are standard normal with no column normalization and
    start weights are uniform on {-1, +1}; the nonnegative family instead
    draws factors uniform on [0, 1] and carries no weight vector
    (weights0 is None).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    seed = spec.seed if seed is None else seed
    starts = []
    for i in range(count):
        rng = _stream(seed, _STARTS, i)
        if spec.family == NONNEGATIVE:
            starts.append((None, rng.uniform(0.0, 1.0, (spec.dim, spec.rank))))
        else:
            weights = rng.choice([-1.0, 1.0], size=spec.rank)
            starts.append((weights, rng.standard_normal((spec.dim, spec.rank))))
    return starts


def write_bundle(instance: ProblemInstance, starts, directory) -> None:
    """Write the on-disk instance bundle.

    Layout: ``spec.json`` (spec fields plus generator version),
    ``truth.kruskal``, ``data.symtensor``, and ``starts/start_<i>.kruskal``.
    Start files without a weight vector store unit weights.
    """
    os.makedirs(directory, exist_ok=True)
    meta = asdict(instance.spec)
    meta["generator_version"] = GENERATOR_VERSION
    with open(os.path.join(directory, "spec.json"), "w", encoding="ascii") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_kruskal(os.path.join(directory, "truth.kruskal"), instance.truth, instance.spec.order)
    write_symtensor(os.path.join(directory, "data.symtensor"), instance.data)
    starts_dir = os.path.join(directory, "starts")
    os.makedirs(starts_dir, exist_ok=True)
    for i, (weights0, factors0) in enumerate(starts):
        model = KruskalSymModel(
            np.ones(factors0.shape[1]) if weights0 is None else weights0, factors0
        )
        write_kruskal(os.path.join(starts_dir, f"start_{i}.kruskal"), model, instance.spec.order)


def read_bundle(directory) -> tuple:
    """Read a bundle back: (spec, truth, data, starts)."""
    with open(os.path.join(directory, "spec.json"), "r", encoding="ascii") as fh:
        meta = json.load(fh)
    meta.pop("generator_version", None)
    spec = InstanceSpec(**meta)
    truth, _ = read_kruskal(os.path.join(directory, "truth.kruskal"))
    data = read_symtensor(os.path.join(directory, "data.symtensor"))
    starts_dir = os.path.join(directory, "starts")
    starts = []
    if os.path.isdir(starts_dir):
        names = sorted(
            (n for n in os.listdir(starts_dir) if n.startswith("start_")),
            key=lambda n: int(n.split("_")[1].split(".")[0]),
        )
        for name in names:
            model, _ = read_kruskal(os.path.join(starts_dir, name))
            weights0 = None if spec.family == NONNEGATIVE else model.weights
            starts.append((weights0, model.factors))
    return spec, truth, data, starts
