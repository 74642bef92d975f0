"""Benchmark harness: run a plan of (size, noise) cells across formulations
and aggregate success counts the way the reference tables report them.

Every run's randomness is derived from the master seed before dispatch:
instances get one substream per (size, noise, index), starts one per size
(the same starts serve every instance of that size).  The same instances
and starts are shared by all formulations in a plan.  Output rows are
canonically sorted before writing, so serial and parallel execution produce
identical files.
"""
from __future__ import annotations

import concurrent.futures
import configparser
import csv
import os
from dataclasses import dataclass

import numpy as np

from . import metrics
from .cpals import AlsConfig
from .fitting import CPALS, Formulation, run_one
from .optim import OptimConfig
from .probgen import STANDARD, FAMILIES, InstanceSpec, gen_starts, generate
from .symspace import sym_to_dense

DEFAULT_SIZES = ((3, 4, 2), (4, 3, 5), (4, 25, 3), (6, 6, 4))
DEFAULT_NOISES = (0.0, 0.01, 0.1)

RUNS_FIELDS = (
    "m", "n", "p", "eta", "formulation", "instance", "start",
    "relative_error", "solution_score", "constraint_violation",
    "runtime", "status",
)
SUMMARY_FIELDS = (
    "m", "n", "p", "eta", "formulation",
    "runs_ok_relerr", "instances_ok_relerr", "median_relerr",
    "runs_ok_score", "instances_ok_score", "median_score",
    "runs_ok_cv", "mean_cv", "mean_runtime", "std_runtime",
)


@dataclass(frozen=True)
class ExperimentPlan:
    sizes: tuple = DEFAULT_SIZES
    noises: tuple = DEFAULT_NOISES
    instances_per_cell: int = 10
    starts_per_instance: int = 5
    formulations: tuple = (Formulation(weighted=False, gamma=0.1),)
    master_seed: int = 0
    family: str = STANDARD
    congruence: float = 0.9

    def __post_init__(self):
        if self.instances_per_cell < 1 or self.starts_per_instance < 1:
            raise ValueError("instance and start counts must be >= 1")
        if not self.formulations:
            raise ValueError("at least one formulation is required")


def derive_seed(master_seed: int, *fields) -> int:
    """Stable 64-bit substream seed from the master seed and integer tags."""
    seq = np.random.SeedSequence([int(master_seed)] + [int(f) for f in fields])
    return int(seq.generate_state(1, np.uint64)[0])


def instance_seed(plan: ExperimentPlan, size, noise: float, index: int) -> int:
    m, n, p = size
    return derive_seed(plan.master_seed, 1, m, n, p, round(noise * 10**9), index)


def starts_seed(plan: ExperimentPlan, size) -> int:
    m, n, p = size
    return derive_seed(plan.master_seed, 2, m, n, p)


def instance_label(size, noise: float, index: int) -> str:
    m, n, p = size
    return f"m{m}n{n}p{p}_eta{noise:g}_i{index:02d}"


def plan_specs(plan: ExperimentPlan):
    """All (size, noise, index, InstanceSpec) of the plan, in order."""
    for size in plan.sizes:
        m, n, p = size
        for noise in plan.noises:
            for index in range(plan.instances_per_cell):
                spec = InstanceSpec(
                    order=m, dim=n, rank=p, noise=noise, family=plan.family,
                    seed=instance_seed(plan, size, noise, index),
                    congruence=plan.congruence,
                )
                yield size, noise, index, spec


def _run_instance(args):
    plan, size, noise, index, spec, opt_config, als_config = args
    inst = generate(spec)
    starts = gen_starts(spec, plan.starts_per_instance, seed=starts_seed(plan, size))
    label = instance_label(size, noise, index)
    dense = None
    if any(f.pathway == CPALS for f in plan.formulations):
        dense = sym_to_dense(inst.data)
    rows = []
    for formulation in plan.formulations:
        for s, start in enumerate(starts):
            if formulation.nonnegative and start[0] is not None:
                start = (None, np.abs(start[1]))  # nonneg runs need feasible starts
            _, record = run_one(
                inst, start, s, formulation, label,
                opt_config=opt_config, als_config=als_config, dense=dense,
            )
            rows.append({
                "m": size[0], "n": size[1], "p": size[2], "eta": noise,
                "formulation": formulation.name, "instance": label, "start": s,
                "relative_error": record.relative_error,
                "solution_score": record.solution_score,
                "constraint_violation": record.constraint_violation,
                "runtime": record.runtime, "status": record.status,
            })
    return rows


def run_plan(
    plan: ExperimentPlan,
    jobs: int = 1,
    opt_config: OptimConfig | None = None,
    als_config: AlsConfig | None = None,
) -> list:
    """Execute the plan; returns the per-run rows, canonically sorted."""
    tasks = [
        (plan, size, noise, index, spec, opt_config, als_config)
        for size, noise, index, spec in plan_specs(plan)
    ]
    rows = []
    if jobs <= 1:
        for task in tasks:
            rows.extend(_run_instance(task))
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(_run_instance, tasks):
                rows.extend(chunk)
    rows.sort(key=lambda r: (r["m"], r["n"], r["p"], r["eta"], r["formulation"],
                             r["instance"], r["start"]))
    return rows


def summarize(rows, thresholds: metrics.SuccessThresholds | None = None) -> list:
    """Aggregate per-run rows into one summary row per (cell, formulation)."""
    t = thresholds or metrics.SuccessThresholds()
    cells = {}
    for row in rows:
        key = (row["m"], row["n"], row["p"], row["eta"], row["formulation"])
        cells.setdefault(key, []).append(row)
    out = []
    for key in sorted(cells):
        group = cells[key]
        by_instance = {}
        for row in group:
            by_instance.setdefault(row["instance"], []).append(row)
        rel = [r["relative_error"] for r in group]
        sco = [r["solution_score"] for r in group]
        cv = [r["constraint_violation"] for r in group]
        rt = [r["runtime"] for r in group]
        rel_ok = [r["relative_error"] <= t.relative_error for r in group]
        sco_ok = [r["solution_score"] >= t.solution_score for r in group]
        cv_ok = [r["constraint_violation"] <= t.constraint_violation for r in group]
        inst_rel = sum(
            any(r["relative_error"] <= t.relative_error for r in runs)
            for runs in by_instance.values()
        )
        inst_sco = sum(
            any(r["solution_score"] >= t.solution_score for r in runs)
            for runs in by_instance.values()
        )
        out.append({
            "m": key[0], "n": key[1], "p": key[2], "eta": key[3],
            "formulation": key[4],
            "runs_ok_relerr": int(sum(rel_ok)),
            "instances_ok_relerr": int(inst_rel),
            "median_relerr": float(np.median(rel)),
            "runs_ok_score": int(sum(sco_ok)),
            "instances_ok_score": int(inst_sco),
            "median_score": float(np.median(sco)),
            "runs_ok_cv": int(sum(cv_ok)),
            "mean_cv": float(np.mean(cv)),
            "mean_runtime": float(np.mean(rt)),
            "std_runtime": float(np.std(rt, ddof=1)) if len(rt) > 1 else 0.0,
        })
    return out


def _write_csv(path, fields, rows) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_csv_value(row[f]) for f in fields])


def _csv_value(value):
    if isinstance(value, float):
        return repr(value)
    return value


def write_outputs(out_dir, rows, summary) -> None:
    """Write runs.csv, summary.csv, and the human-readable summary.txt."""
    os.makedirs(out_dir, exist_ok=True)
    _write_csv(os.path.join(out_dir, "runs.csv"), RUNS_FIELDS, rows)
    _write_csv(os.path.join(out_dir, "summary.csv"), SUMMARY_FIELDS, summary)
    with open(os.path.join(out_dir, "summary.txt"), "w", encoding="ascii") as fh:
        fh.write(f"{'size':>10} {'eta':>6} {'formulation':>14} "
                 f"{'rel err':>16} {'score':>16} {'cv':>12} {'runtime':>16}\n")
        for row in summary:
            size = f"{row['m']}x{row['n']}x{row['p']}"
            rel = f"{row['runs_ok_relerr']}/{row['instances_ok_relerr']}/{row['median_relerr']:.0e}"
            sco = f"{row['runs_ok_score']}/{row['instances_ok_score']}/{row['median_score']:.2f}"
            cvs = f"{row['runs_ok_cv']}/{row['mean_cv']:.0e}"
            rts = f"{row['mean_runtime']:.2f} +- {row['std_runtime']:.2f}"
            fh.write(f"{size:>10} {row['eta']:>6g} {row['formulation']:>14} "
                     f"{rel:>16} {sco:>16} {cvs:>12} {rts:>16}\n")


def _get(section, key, fallback=None):
    return section.get(key, fallback)


def parse_plan(path) -> ExperimentPlan:
    """Read a plan file: a flat key=value format with sections.

    The ``[plan]`` section holds sizes (``MxNxP`` tokens), noises,
    instances, starts, seed, family, and congruence.  Each
    ``[formulation.NAME]`` section adds one formulation with keys
    weighted, gamma, alpha, beta, nonneg, pathway.
    """
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ValueError(f"cannot read plan file {path}")
    kwargs = {}
    if parser.has_section("plan"):
        section = parser["plan"]
        if "sizes" in section:
            kwargs["sizes"] = tuple(
                tuple(int(v) for v in token.split("x"))
                for token in section["sizes"].replace(",", " ").split()
            )
        if "noises" in section:
            kwargs["noises"] = tuple(
                float(v) for v in section["noises"].replace(",", " ").split()
            )
        if "instances" in section:
            kwargs["instances_per_cell"] = section.getint("instances")
        if "starts" in section:
            kwargs["starts_per_instance"] = section.getint("starts")
        if "seed" in section:
            kwargs["master_seed"] = section.getint("seed")
        if "family" in section:
            family = section["family"]
            if family not in FAMILIES:
                raise ValueError(f"unknown family {family!r} in plan")
            kwargs["family"] = family
        if "congruence" in section:
            kwargs["congruence"] = section.getfloat("congruence")
    formulations = []
    for name in parser.sections():
        if not name.startswith("formulation."):
            continue
        section = parser[name]
        formulations.append(Formulation(
            weighted=section.getboolean("weighted", False),
            gamma=section.getfloat("gamma", 0.1),
            alpha=section.getfloat("alpha", 10.0),
            beta=section.getfloat("beta", 0.0),
            nonnegative=section.getboolean("nonneg", False),
            pathway=_get(section, "pathway", "sym"),
            name=name.split(".", 1)[1],
        ))
    if formulations:
        kwargs["formulations"] = tuple(formulations)
    return ExperimentPlan(**kwargs)
