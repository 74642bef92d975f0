import pytest

from symdecomp.bench import (
    ExperimentPlan,
    instance_seed,
    parse_plan,
    plan_specs,
    run_plan,
    starts_seed,
    summarize,
    write_outputs,
)
from symdecomp.fitting import Formulation


SMOKE = ExperimentPlan(
    sizes=((3, 4, 2),),
    noises=(0.0,),
    instances_per_cell=2,
    starts_per_instance=2,
    formulations=(Formulation(weighted=False, gamma=0.1),),
    master_seed=7,
)


def test_default_plan_is_full_grid():
    # four built-in sizes x three noise levels x ten instances
    plan = ExperimentPlan()
    specs = list(plan_specs(plan))
    assert len(specs) == 120
    assert len({spec.seed for _, _, _, spec in specs}) == 120


def test_seed_derivation_stable():
    a = instance_seed(SMOKE, (3, 4, 2), 0.0, 0)
    b = instance_seed(SMOKE, (3, 4, 2), 0.0, 0)
    assert a == b
    assert a != instance_seed(SMOKE, (3, 4, 2), 0.0, 1)
    assert a != instance_seed(SMOKE, (3, 4, 2), 0.01, 0)
    assert starts_seed(SMOKE, (3, 4, 2)) != a


def test_starts_shared_across_noise_and_instances():
    plan = ExperimentPlan(sizes=((3, 4, 2),), noises=(0.0, 0.1),
                          instances_per_cell=2, starts_per_instance=2,
                          formulations=SMOKE.formulations, master_seed=3)
    seeds = {starts_seed(plan, size) for size, _, _, _ in plan_specs(plan)}
    assert len(seeds) == 1  # one start stream per size


def test_run_plan_deterministic_modulo_runtime():
    rows1 = run_plan(SMOKE)
    rows2 = run_plan(SMOKE)
    assert len(rows1) == 4
    for r1, r2 in zip(rows1, rows2):
        for key in r1:
            if key != "runtime":
                assert r1[key] == r2[key]


def test_run_plan_parallel_matches_serial():
    serial = run_plan(SMOKE, jobs=1)
    parallel = run_plan(SMOKE, jobs=2)
    for r1, r2 in zip(serial, parallel):
        for key in r1:
            if key != "runtime":
                assert r1[key] == r2[key]


def test_summarize_counts():
    rows = [
        {"m": 3, "n": 4, "p": 2, "eta": 0.0, "formulation": "f2", "instance": "a",
         "start": 0, "relative_error": 1e-6, "solution_score": 1.0,
         "constraint_violation": 0.0, "runtime": 1.0, "status": "converged"},
        {"m": 3, "n": 4, "p": 2, "eta": 0.0, "formulation": "f2", "instance": "a",
         "start": 1, "relative_error": 0.5, "solution_score": 0.2,
         "constraint_violation": 0.5, "runtime": 2.0, "status": "converged"},
        {"m": 3, "n": 4, "p": 2, "eta": 0.0, "formulation": "f2", "instance": "b",
         "start": 0, "relative_error": 0.4, "solution_score": 0.1,
         "constraint_violation": 0.0, "runtime": 3.0, "status": "converged"},
    ]
    summary = summarize(rows)
    assert len(summary) == 1
    cell = summary[0]
    assert cell["runs_ok_relerr"] == 1
    assert cell["instances_ok_relerr"] == 1  # instance a has one success
    assert cell["runs_ok_score"] == 1
    assert cell["instances_ok_score"] == 1
    assert cell["runs_ok_cv"] == 2
    assert cell["median_relerr"] == pytest.approx(0.4)
    assert cell["mean_runtime"] == pytest.approx(2.0)


def test_outputs_written_and_stable(tmp_path):
    rows = run_plan(SMOKE)
    summary = summarize(rows)
    write_outputs(tmp_path / "a", rows, summary)
    write_outputs(tmp_path / "b", rows, summary)
    for name in ("runs.csv", "summary.csv", "summary.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    header = (tmp_path / "a" / "summary.csv").read_text().splitlines()[0]
    assert header == ("m,n,p,eta,formulation,runs_ok_relerr,instances_ok_relerr,"
                      "median_relerr,runs_ok_score,instances_ok_score,median_score,"
                      "runs_ok_cv,mean_cv,mean_runtime,std_runtime")


def test_parse_plan(tmp_path):
    text = """
[plan]
sizes = 3x4x2, 4x3x5
noises = 0 0.1
instances = 4
starts = 2
seed = 99
family = standard

[formulation.f2-g01]
weighted = false
gamma = 0.1

[formulation.cpals]
pathway = cpals
"""
    path = tmp_path / "plan.cfg"
    path.write_text(text)
    plan = parse_plan(path)
    assert plan.sizes == ((3, 4, 2), (4, 3, 5))
    assert plan.noises == (0.0, 0.1)
    assert plan.instances_per_cell == 4
    assert plan.starts_per_instance == 2
    assert plan.master_seed == 99
    names = [f.name for f in plan.formulations]
    assert names == ["f2-g01", "cpals"]
    assert plan.formulations[1].pathway == "cpals"
    with pytest.raises(ValueError):
        parse_plan(tmp_path / "missing.cfg")


def test_shared_instances_across_formulations():
    plan = ExperimentPlan(
        sizes=((3, 4, 2),), noises=(0.0,), instances_per_cell=1,
        starts_per_instance=2,
        formulations=(Formulation(weighted=False, gamma=0.1),
                      Formulation(weighted=True, gamma=0.1)),
        master_seed=11,
    )
    specs = [spec for _, _, _, spec in plan_specs(plan)]
    assert len(specs) == 1  # instances generated once, reused per formulation
    rows = run_plan(plan)
    assert {r["formulation"] for r in rows} == {"f2-g0.1", "f1-g0.1"}
    assert len({r["instance"] for r in rows}) == 1
