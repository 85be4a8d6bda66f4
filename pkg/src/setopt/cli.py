"""Command-line interface for the solver library and benchmark harness."""

from __future__ import annotations

import json
import os

import click
import numpy as np

from . import bench, cone as cone_mod, partition, problems, solvers, subproblem


def _parse_point(text: str) -> np.ndarray:
    return np.array([float(tok) for tok in text.replace(",", " ").split()])


def _resolve_cone(spec: str | None, m: int) -> cone_mod.Cone:
    if spec is None:
        return cone_mod.orthant(m)
    if os.path.exists(spec):
        with open(spec, "r", encoding="utf-8") as fh:
            return cone_mod.Cone.from_json(fh.read())
    return cone_mod.preset(spec)


@click.group()
def main():
    """Solvers and benchmarks for set optimization with finite families."""


@main.command("list-problems")
def list_problems():
    """Print metadata of every registered problem instance as JSON."""
    meta = [problems.registry(pid).metadata() for pid in problems.problem_ids()]
    click.echo(json.dumps(meta, indent=2))


@main.command()
@click.option("--problem", "problem_id", required=True)
@click.option("--point", required=True, help="coordinates, e.g. '0.1,0.2'")
@click.option("--cone", "cone_spec", default=None, help="preset name or JSON file")
def inspect(problem_id, point, cone_spec):
    """Minimal structure at a point: omega, groups, partition size."""
    problem = problems.registry(problem_id)
    kone = _resolve_cone(cone_spec, problem.m)
    x = _parse_point(point)
    structure = partition.minimal_structure(problem, kone, x)
    click.echo(json.dumps({
        "omega": structure.omega,
        "groups": [list(g) for g in structure.groups],
        "partition_size": structure.partition_count(),
        "is_regular_hint": structure.is_regular_hint,
    }, indent=2))


@main.command()
@click.option("--problem", "problem_id", required=True)
@click.option("--point", required=True)
@click.option("--cone", "cone_spec", default=None)
@click.option("--radius", type=float, default=1.0, show_default=True)
def criticality(problem_id, point, cone_spec, radius):
    """Criticality value t*, winning tuple a*, and trial step s* at a point."""
    problem = problems.registry(problem_id)
    kone = _resolve_cone(cone_spec, problem.m)
    x = _parse_point(point)
    structure = partition.minimal_structure(problem, kone, x)
    sol = subproblem.criticality_value(problem, kone, x, structure, radius=radius)
    click.echo(json.dumps({
        "t": sol.t_star,
        "a": list(sol.a_star),
        "s": sol.s_star.tolist(),
        "feasible": sol.feasible,
    }, indent=2))


@main.command()
@click.option("--problem", "problem_id", required=True)
@click.option("--algo", type=click.Choice(solvers.VARIANTS), default="trm", show_default=True)
@click.option("--x0", required=True)
@click.option("--cone", "cone_spec", default=None)
@click.option("--config", "config_path", default=None, help="JSON file of SolverConfig fields")
@click.option("--trace", is_flag=True, help="stream per-iteration records as JSON lines")
def solve(problem_id, algo, x0, cone_spec, config_path, trace):
    """Run one solver from one point and print the result as JSON."""
    problem = problems.registry(problem_id)
    kone = _resolve_cone(cone_spec, problem.m)
    overrides = {}
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            overrides = json.load(fh)
    config = solvers.SolverConfig(variant=algo, **overrides)
    res = solvers.run(problem, kone, _parse_point(x0), config)
    if trace:
        for rec in res.trace:
            click.echo(json.dumps({
                "k": rec.k, "x": rec.x.tolist(), "omega": rec.omega, "t": rec.t,
                "a": list(rec.a), "rho": list(rec.rho), "accepted": rec.accepted,
                "step_norm": rec.step_norm,
            }))
    click.echo(json.dumps(res.summary(), indent=2))


@main.command("run")
@click.option("--config", "config_path", required=True, help="ExperimentConfig JSON")
@click.option("--out", "store_path", required=True, help="JSON-lines record store")
def run_experiment(config_path, store_path):
    """Fill the (problem x algorithm x point) record store; resumable."""
    with open(config_path, "r", encoding="utf-8") as fh:
        config = bench.ExperimentConfig.from_json(fh.read())
    records = bench.run_matrix(config, store_path)
    click.echo(f"store has {len(records)} records at {store_path}")


@main.command()
@click.option("--store", "store_path", required=True)
@click.option("--config", "config_path", required=True)
@click.option("--csv", "csv_path", required=True)
def table(store_path, config_path, csv_path):
    """Aggregate the record store into a metrics table CSV."""
    with open(config_path, "r", encoding="utf-8") as fh:
        config = bench.ExperimentConfig.from_json(fh.read())
    rows = bench.build_table(bench.load_records(store_path), config)
    bench.emit_table_csv(rows, csv_path)
    click.echo(f"wrote {csv_path}")


@main.command()
@click.option("--store", "store_path", required=True)
@click.option("--config", "config_path", required=True)
@click.option("--metric", type=click.Choice(bench.METRICS), required=True)
@click.option("--svg", "svg_path", required=True)
def profile(store_path, config_path, metric, svg_path):
    """Performance-profile staircase plot for one metric."""
    with open(config_path, "r", encoding="utf-8") as fh:
        config = bench.ExperimentConfig.from_json(fh.read())
    curves = bench.profile(bench.load_records(store_path), metric, config)
    bench.emit_profile_svg(curves, metric, svg_path)
    click.echo(f"wrote {svg_path}")


@main.command("cone-experiment")
@click.option("--problem", "problem_id", required=True)
@click.option("--x0", required=True)
@click.option("--cones", default="orthant:2,k2prime", show_default=True,
              help="comma-separated cone presets")
@click.option("--out", "out_path", required=True, help="output JSON path")
@click.option("--it-max", type=int, default=100, show_default=True)
def cone_experiment(problem_id, x0, cones, out_path, it_max):
    """Compare the non-monotone variants under different ordering cones."""
    cone_map = {name: cone_mod.preset(name) for name in cones.split(",")}
    out = bench.cone_experiment(problem_id, _parse_point(x0), cone_map, it_max=it_max)
    payload = {
        cone_name: {
            algo: {"summary": data["result"].summary(), "clouds": data["clouds"]}
            for algo, data in per_algo.items()
        }
        for cone_name, per_algo in out.items()
    }
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
    click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
