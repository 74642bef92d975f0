"""Command-line interface.

Subcommands: generate, decompose, symmetrize, bench, rank-report.  The
environment variable SYMDECOMP_LOG (debug/info/warning/error) controls log
verbosity.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import time

import numpy as np

from . import bench as bench_mod
from . import fileio, metrics
from .cpals import AlsConfig, cp_als, symmetrize_kruskal
from .fitting import (
    CPALS,
    SYM,
    Formulation,
    factorset_to_dense,
    fit_cpals,
    fit_nonnegative,
    fit_symmetric,
)
from .kmodel import FactorSet, normalize_columns
from .probgen import (
    FAMILIES,
    NONNEGATIVE,
    STANDARD,
    InstanceSpec,
    gen_starts,
    generate,
    write_bundle,
)
from .symspace import sym_from_dense, sym_to_dense

EXIT_OK = 0
EXIT_ERROR = 1  # bad arguments, parse errors, shape errors


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes")
    parser.add_argument("--out", default=".", help="output directory")


def _formulation_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--weighted", dest="weighted", action="store_true",
                       help="count each entry by its multiplicity")
    group.add_argument("--unweighted", dest="weighted", action="store_false",
                       help="count each distinct entry once (default)")
    parser.set_defaults(weighted=False)
    parser.add_argument("--gamma", type=float, default=0.1,
                        help="column-norm penalty weight")
    parser.add_argument("--alpha", type=float, default=10.0,
                        help="sparsity penalty steepness")
    parser.add_argument("--beta", type=float, default=0.0,
                        help="sparsity penalty weight")
    parser.add_argument("--nonneg", action="store_true",
                        help="nonnegative factorization (bounds, no weights)")
    parser.add_argument("--pathway", choices=(SYM, CPALS), default=SYM)
    parser.add_argument("--starts", type=int, default=5,
                        help="number of random starts")
    parser.add_argument("--p", type=int, help="number of components")


def _read_tensor(path):
    with open(path, "r", encoding="ascii") as fh:
        tag = fh.readline().split()
    if not tag:
        raise ValueError(f"{path}: empty file")
    if tag[0] == "symtensor":
        return fileio.read_symtensor(path)
    if tag[0] == "densetensor":
        return sym_from_dense(fileio.read_densetensor(path))
    raise ValueError(f"{path}: expected a symtensor or densetensor file")


def _formulation_from_args(args) -> Formulation:
    return Formulation(
        weighted=args.weighted,
        gamma=0.0 if args.nonneg else args.gamma,
        alpha=args.alpha,
        beta=args.beta,
        nonnegative=args.nonneg,
        pathway=args.pathway,
    )


def cmd_generate(args) -> int:
    sizes = (
        tuple(tuple(int(v) for v in tok.split("x")) for tok in args.size)
        if args.size else bench_mod.DEFAULT_SIZES
    )
    noises = tuple(args.noise) if args.noise else bench_mod.DEFAULT_NOISES
    plan = bench_mod.ExperimentPlan(
        sizes=sizes,
        noises=noises,
        instances_per_cell=args.instances,
        starts_per_instance=args.starts,
        master_seed=args.seed,
        family=args.family,
        congruence=args.congruence,
    )
    count = 0
    for size, noise, index, spec in bench_mod.plan_specs(plan):
        inst = generate(spec)
        starts = gen_starts(spec, plan.starts_per_instance,
                            seed=bench_mod.starts_seed(plan, size))
        directory = os.path.join(args.out, bench_mod.instance_label(size, noise, index))
        write_bundle(inst, starts, directory)
        count += 1
    print(f"wrote {count} instance bundles under {args.out}")
    return EXIT_OK


def _decompose_starts(tensor, args, family):
    spec = InstanceSpec(order=tensor.order, dim=tensor.dim, rank=args.p,
                        noise=0.0, family=family, seed=args.seed)
    return gen_starts(spec, args.starts)


def cmd_decompose(args) -> int:
    tensor = _read_tensor(args.data)
    if not args.p:
        raise ValueError("--p is required")
    formulation = _formulation_from_args(args)
    family = NONNEGATIVE if args.nonneg else STANDARD
    starts = _decompose_starts(tensor, args, family)
    truth = None
    if args.truth:
        truth, _ = fileio.read_kruskal(args.truth)

    best = None
    dense = None
    for s, start in enumerate(starts):
        began = time.perf_counter()
        if formulation.pathway == CPALS:
            if dense is None:
                dense = sym_to_dense(tensor)
            model, _, info = fit_cpals(tensor, start, dense=dense)
            status = "converged" if info.sweeps < AlsConfig().max_sweeps else "iter_limit"
        elif formulation.nonnegative:
            model, result = fit_nonnegative(tensor, start[1], formulation)
            status = result.status
        else:
            model, result = fit_symmetric(tensor, start, formulation)
            status = result.status
        runtime = time.perf_counter() - began
        rel = metrics.relative_error(tensor, model)
        score = float("nan")
        if truth is not None:
            score, _ = metrics.solution_score(model, truth, tensor.order)
        record = metrics.RunRecord(
            instance=os.path.basename(args.data), start_index=s,
            relative_error=rel, solution_score=score,
            constraint_violation=metrics.constraint_violation(model.factors),
            runtime=runtime, status=status,
        )
        if best is None or record.relative_error < best[1].relative_error:
            best = (model, record)

    model, record = best
    os.makedirs(args.out, exist_ok=True)
    model_path = os.path.join(args.out, "model.kruskal")
    fileio.write_kruskal(model_path, model, tensor.order)
    report_path = os.path.join(args.out, "report.csv")
    with open(report_path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(metrics.RunRecord.CSV_FIELDS)
        writer.writerow(record.to_row())
    print(f"best of {len(starts)} starts: relative error {record.relative_error:.3e}, "
          f"status {record.status}")
    print(f"model -> {model_path}\nreport -> {report_path}")
    return EXIT_OK


def cmd_symmetrize(args) -> int:
    with open(args.input, "r", encoding="ascii") as fh:
        head = fh.readline().split()
    if not head:
        raise ValueError(f"{args.input}: empty file")
    tensor = None
    if head[0] == "factorset":
        fs = fileio.read_factorset(args.input)
        if args.data:
            tensor = _read_tensor(args.data)
    else:
        tensor = _read_tensor(args.input)
        if not args.p:
            raise ValueError("--p is required when the input is a tensor")
        spec = InstanceSpec(order=tensor.order, dim=tensor.dim, rank=args.p,
                            noise=0.0, family=STANDARD, seed=args.seed)
        start = gen_starts(spec, 1)[0]
        mats = [start[1] * (start[0] if j == 0 else 1.0) for j in range(tensor.order)]
        fs, _ = cp_als(sym_to_dense(tensor), args.p, FactorSet(tuple(mats)))
    model = symmetrize_kruskal(fs)
    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, "model.kruskal")
    fileio.write_kruskal(out_path, model, fs.order)
    print(f"symmetrized model -> {out_path}")
    if tensor is not None:
        rel_sym = metrics.relative_error(tensor, model)
        dense_fit = factorset_to_dense(fs)
        dense_data = sym_to_dense(tensor)
        rel_unsym = float(
            np.linalg.norm((dense_data - dense_fit).ravel())
            / np.linalg.norm(dense_data.ravel())
        )
        print(f"relative error: unsymmetrized {rel_unsym:.6e}, symmetrized {rel_sym:.6e}")
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.plan:
        plan = bench_mod.parse_plan(args.plan)
        if args.seed:
            plan = bench_mod.ExperimentPlan(
                sizes=plan.sizes, noises=plan.noises,
                instances_per_cell=plan.instances_per_cell,
                starts_per_instance=plan.starts_per_instance,
                formulations=plan.formulations, master_seed=args.seed,
                family=plan.family, congruence=plan.congruence,
            )
    else:
        plan = bench_mod.ExperimentPlan(master_seed=args.seed)
    rows = bench_mod.run_plan(plan, jobs=args.jobs)
    summary = bench_mod.summarize(rows)
    bench_mod.write_outputs(args.out, rows, summary)
    print(f"{len(rows)} runs -> {os.path.join(args.out, 'runs.csv')}")
    with open(os.path.join(args.out, "summary.txt"), "r", encoding="ascii") as fh:
        sys.stdout.write(fh.read())
    return EXIT_OK


def cmd_rank_report(args) -> int:
    tensor = _read_tensor(args.data)
    formulation = Formulation(weighted=True, gamma=args.gamma,
                              alpha=args.alpha, beta=args.beta)
    spec = InstanceSpec(order=tensor.order, dim=tensor.dim, rank=args.p_max,
                        noise=0.0, family=STANDARD, seed=args.seed)
    starts = gen_starts(spec, args.starts)
    best = None
    for start in starts:
        model, result = fit_symmetric(tensor, start, formulation)
        rel = metrics.relative_error(tensor, model)
        if best is None or rel < best[1]:
            best = (model, rel)
    model, rel = best
    # weight magnitudes are only meaningful at unit column norms
    normalized = normalize_columns(model, tensor.order)
    magnitudes = np.sort(np.abs(normalized.weights))[::-1]
    above = int(np.sum(magnitudes > args.threshold))
    print(f"sorted weight magnitudes: {' '.join(f'{v:.6g}' for v in magnitudes)}")
    print(f"components with |weight| > {args.threshold:g}: {above}")
    print(f"best relative error: {rel:.3e}")
    if tensor.order > 2:
        bound = metrics.typical_symmetric_rank(tensor.order, tensor.dim)
        print(f"typical symmetric rank for this shape (context): {bound}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symdecomp",
        description="Symmetric tensor decomposition toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write instance bundles")
    _common_flags(gen)
    gen.add_argument("--size", action="append",
                     help="problem size MxNxP (repeatable; default: built-in set)")
    gen.add_argument("--noise", action="append", type=float,
                     help="noise level (repeatable; default: 0 0.01 0.1)")
    gen.add_argument("--family", choices=FAMILIES, default=STANDARD)
    gen.add_argument("--instances", type=int, default=10)
    gen.add_argument("--starts", type=int, default=5)
    gen.add_argument("--congruence", type=float, default=0.9)
    gen.set_defaults(func=cmd_generate)

    dec = sub.add_parser("decompose", help="fit one tensor file")
    _common_flags(dec)
    _formulation_flags(dec)
    dec.add_argument("data", help="symtensor or densetensor file")
    dec.add_argument("--truth", help="kruskal file to score against")
    dec.set_defaults(func=cmd_decompose)

    symm = sub.add_parser("symmetrize", help="CP-ALS (or a factor set) to a symmetric model")
    _common_flags(symm)
    symm.add_argument("input", help="factorset file, or tensor file with --p")
    symm.add_argument("--p", type=int, help="rank for the CP-ALS run")
    symm.add_argument("--data", help="tensor file for error reporting (factorset input)")
    symm.set_defaults(func=cmd_symmetrize)

    ben = sub.add_parser("bench", help="run an experiment plan")
    _common_flags(ben)
    ben.add_argument("--plan", help="plan file (key=value sections)")
    ben.set_defaults(func=cmd_bench)

    rep = sub.add_parser("rank-report", help="sparsity-penalized rank determination")
    _common_flags(rep)
    rep.add_argument("data", help="symtensor or densetensor file")
    rep.add_argument("--p-max", type=int, required=True, dest="p_max")
    rep.add_argument("--threshold", type=float, default=0.01)
    rep.add_argument("--starts", type=int, default=5)
    rep.add_argument("--gamma", type=float, default=0.1)
    rep.add_argument("--alpha", type=float, default=10.0)
    rep.add_argument("--beta", type=float, default=0.1)
    rep.set_defaults(func=cmd_rank_report)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("SYMDECOMP_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
