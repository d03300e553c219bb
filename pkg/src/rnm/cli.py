"""Command-line front end.

Subcommands generate a CPT from a model file, run the randomized property
suites, and reproduce the numerical studies as CSV tables with JSON run
manifests.  All machine output prints probabilities with 12 significant
digits, files carry no timestamps, and every command is byte-deterministic
given identical inputs and seed.

Exit codes: 0 success, 1 property failure or failed bisection bracketing,
2 validation failure, 3 resource cap exceeded (partial results flushed).
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .analysis import bisect_wmax
from .cpt_generator import generate_cpt
from .errors import BracketingError, ResourceLimitError, ValidationError
from .experiments import (run_fig2, run_fig3, run_property_checks,
                          run_weight_update)
from .model import (GenerationParams, RankedFragment, WeightExpressionSpec,
                    require_valid_spec)

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_manifest(path: Path, command: str, seed: int, parameters: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"command": command, "version": __version__, "seed": seed,
           "parameters": parameters}
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def _run(body) -> None:
    try:
        code = body()
    except ValidationError as exc:
        click.echo(f"validation error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    except BracketingError as exc:
        click.echo(f"bracketing error: {exc}", err=True)
        sys.exit(EXIT_PROPERTY)
    except ResourceLimitError as exc:
        click.echo(f"resource limit: {exc}", err=True)
        sys.exit(EXIT_RESOURCE)
    sys.exit(EXIT_OK if code is None else code)


def _parse_int_list(text: str, label: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part.strip()) for part in text.split(",") if part.strip())
    except ValueError:
        raise ValidationError(f"{label} must be a comma-separated integer list, "
                              f"got {text!r}")
    if not values:
        raise ValidationError(f"{label} must name at least one value")
    return values


# ---------------------------------------------------------------------------
# model files

MODEL_KEYS = ("format_version", "child_states", "parent_states", "expression",
              "weights", "variance", "sample_size")
MODEL_FORMAT_VERSION = "1"


def parse_model_file(path: Path):
    """Read a flat key=value model file into (spec, fragment, params).

    Recognized keys: format_version, child_states, parent_states (comma
    separated), expression, weights (comma separated), variance,
    sample_size.  Blank lines and lines starting with # are ignored.
    Unknown or duplicate keys, missing keys, and infeasible weights raise
    ValidationError.
    """
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read model file {path}: {exc}")
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValidationError(
                f"{path}:{lineno}: expected key = value, got {raw!r}")
        key = key.strip()
        if key not in MODEL_KEYS:
            raise ValidationError(f"{path}:{lineno}: unknown key {key!r}")
        if key in entries:
            raise ValidationError(f"{path}:{lineno}: duplicate key {key!r}")
        entries[key] = value.strip()
    missing = [k for k in MODEL_KEYS if k not in entries]
    if missing:
        raise ValidationError(
            f"{path}: missing keys: {', '.join(missing)}")
    if entries["format_version"] != MODEL_FORMAT_VERSION:
        raise ValidationError(
            f"{path}: unsupported format_version {entries['format_version']!r} "
            f"(expected {MODEL_FORMAT_VERSION})")

    def as_int(key: str) -> int:
        try:
            return int(entries[key])
        except ValueError:
            raise ValidationError(f"{path}: {key} must be an integer, "
                                  f"got {entries[key]!r}")

    def as_float(key: str) -> float:
        try:
            return float(entries[key])
        except ValueError:
            raise ValidationError(f"{path}: {key} must be a number, "
                                  f"got {entries[key]!r}")

    try:
        parent_states = tuple(int(p.strip())
                              for p in entries["parent_states"].split(","))
        weights = tuple(float(p.strip())
                        for p in entries["weights"].split(","))
    except ValueError:
        raise ValidationError(
            f"{path}: parent_states and weights must be comma-separated numbers")

    fragment = RankedFragment(parent_states, as_int("child_states"))
    spec = WeightExpressionSpec(entries["expression"], weights)
    params = GenerationParams(as_float("variance"), as_int("sample_size"))
    require_valid_spec(spec, fragment)
    return spec, fragment, params


# ---------------------------------------------------------------------------
# command group


@click.group()
@click.version_option(__version__)
@click.option("--seed", default=0, show_default=True, type=int,
              help="Seed for all randomized commands.")
@click.option("--output-dir", default=".", show_default=True,
              type=click.Path(file_okay=False),
              help="Directory receiving CSV and manifest files.")
@click.option("--threads", default=1, show_default=True, type=int,
              help="Worker processes for replication-parallel commands.")
@click.pass_context
def main(ctx, seed, output_dir, threads):
    """Ranked-node CPT generation and reproduction of its numerical studies."""
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed
    ctx.obj["output_dir"] = Path(output_dir)
    ctx.obj["threads"] = threads


@main.command("gen-cpt")
@click.argument("model", type=click.Path(dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Output CSV path (default: cpt.csv in the output directory).")
@click.option("--samples", type=int, default=None,
              help="Override the model file's sample size.")
@click.pass_context
def gen_cpt(ctx, model, out, samples):
    """Generate the full CPT for a model file as CSV.

    One row per parent-state configuration: the configuration columns first,
    then one probability column per child state.
    """
    def body():
        spec, fragment, params = parse_model_file(Path(model))
        if samples is not None:
            params = GenerationParams(params.variance, samples)
        out_path = Path(out) if out else ctx.obj["output_dir"] / "cpt.csv"
        header = ([f"parent_{i}" for i in range(1, fragment.n_parents + 1)]
                  + [f"state_{k}" for k in range(1, fragment.child_state_count + 1)])
        try:
            cpt = generate_cpt(spec, fragment, params)
        except ResourceLimitError:
            _write_csv(out_path, header, [])
            raise
        rows = [[str(k) for k in config] + [_fmt(p) for p in probs]
                for config, probs in zip(cpt.configurations, cpt.table)]
        _write_csv(out_path, header, rows)
        click.echo(f"wrote {out_path} ({len(rows)} rows)")
    _run(body)


@main.command("check-props")
@click.option("--trials", default=1000, show_default=True, type=int,
              help="Randomized generation checks to run.")
@click.option("--mutate-for-test", is_flag=True,
              help="Corrupt one distribution to prove the checks can fail.")
@click.pass_context
def check_props(ctx, trials, mutate_for_test):
    """Run the randomized structural property suites.

    Counterexamples, if any, are written to counterexamples.csv in the
    output directory with their full parameter descriptions.
    """
    def body():
        report = run_property_checks(trials, ctx.obj["seed"],
                                     mutate_for_test=mutate_for_test)
        out_path = ctx.obj["output_dir"] / "counterexamples.csv"
        _write_csv(out_path, ["suite", "params", "detail"],
                   [[c.suite, c.params, c.detail]
                    for c in report.counterexamples])
        if report.ok:
            click.echo(f"all checks passed ({trials} generation trials)")
            return EXIT_OK
        click.echo(f"{len(report.counterexamples)} counterexamples written to "
                   f"{out_path}", err=True)
        return EXIT_PROPERTY
    _run(body)


FIG2_DEFAULT_M = "3,4,5,6,7,8,9,10,20"
FIG2_SIGMA2_LOWER = 5e-4
FIG2_SIGMA2_UPPER = 0.1
FIG2_SIGMA2_UPPER_M20 = 0.02


@main.command("fig2")
@click.option("--m-values", default=FIG2_DEFAULT_M, show_default=True,
              help="Comma-separated child/parent state counts.")
@click.option("--points", default=50, show_default=True, type=int,
              help="Log-spaced variance grid points per state count.")
@click.pass_context
def fig2(ctx, m_values, points):
    """Tie-gap bound and generated gaps across a variance grid (fig2.csv).

    Two parents, pair {1, 2}; the variance grid is log-spaced on
    [5e-4, 0.1], narrowed to [5e-4, 0.02] for m = 20.
    """
    def body():
        ms = _parse_int_list(m_values, "--m-values")
        if points < 2:
            raise ValidationError(f"--points must be >= 2, got {points}")
        rows = []
        for m in ms:
            upper = FIG2_SIGMA2_UPPER_M20 if m == 20 else FIG2_SIGMA2_UPPER
            grid = np.geomspace(FIG2_SIGMA2_LOWER, upper, points)
            rows.extend(run_fig2((m,), grid).rows)
        out_dir = ctx.obj["output_dir"]
        _write_csv(out_dir / "fig2.csv",
                   ["m", "sigma2", "gap_bound", "gap_s5", "gap_s10"],
                   [[str(r.m), _fmt(r.sigma2), _fmt(r.gap_bound),
                     _fmt(r.gap_s5), _fmt(r.gap_s10)] for r in rows])
        _write_manifest(out_dir / "fig2_manifest.json", "fig2",
                        ctx.obj["seed"],
                        {"m_values": list(ms), "points": points,
                         "sigma2_lower": FIG2_SIGMA2_LOWER,
                         "sigma2_upper": FIG2_SIGMA2_UPPER,
                         "sigma2_upper_m20": FIG2_SIGMA2_UPPER_M20})
        click.echo(f"wrote {out_dir / 'fig2.csv'} ({len(rows)} rows); "
                   f"max gap_bound {max(r.gap_bound for r in rows):.4f}, "
                   f"max gap_s5 {max(r.gap_s5 for r in rows):.4f}, "
                   f"max gap_s10 {max(r.gap_s10 for r in rows):.4f}")
    _run(body)


@main.command("table1")
@click.option("--n-reps", default=1000, show_default=True, type=int,
              help="Replications of the weight-update study.")
@click.option("--sigma2-upper-coeff", default=1.0, show_default=True,
              type=float,
              help="Variance upper bound as a multiple of 1/m^2.")
@click.pass_context
def table1(ctx, n_reps, sigma2_upper_coeff):
    """Randomized weight-update robustness study (table1.csv).

    Detail rows carry the per-replication worst mean and worst single
    probability differences; two aggregate rows hold their means and
    maxima over all replications.
    """
    def body():
        report = run_weight_update(n_reps, ctx.obj["seed"],
                                   sigma2_upper_coeff=sigma2_upper_coeff,
                                   threads=ctx.obj["threads"])
        rows = [["rep", str(r.replication), str(r.m), str(r.n),
                 _fmt(r.avg_diff), _fmt(r.max_diff)]
                for r in report.replications]
        rows.append(["mean", "", "", "",
                     _fmt(report.mean_avg_diff), _fmt(report.mean_max_diff)])
        rows.append(["max", "", "", "",
                     _fmt(report.peak_avg_diff), _fmt(report.peak_max_diff)])
        out_dir = ctx.obj["output_dir"]
        _write_csv(out_dir / "table1.csv",
                   ["record", "replication", "m", "n", "avg_diff", "max_diff"],
                   rows)
        _write_manifest(out_dir / "table1_manifest.json", "table1",
                        ctx.obj["seed"],
                        {"n_replications": report.n_replications,
                         "sigma2_upper_coeff": report.sigma2_upper_coeff,
                         "resampled": report.resampled})
        click.echo(f"wrote {out_dir / 'table1.csv'}: "
                   f"mean avg_diff {report.mean_avg_diff:.6f}, "
                   f"mean max_diff {report.mean_max_diff:.6f}, "
                   f"peak avg_diff {report.peak_avg_diff:.6f}, "
                   f"peak max_diff {report.peak_max_diff:.6f}")
    _run(body)


@main.command("fig3")
@click.option("--m-values", default="5", show_default=True,
              help="Comma-separated state counts.")
@click.option("--s-values", default="3,5,10", show_default=True,
              help="Comma-separated sample sizes.")
@click.option("--points", default=50, show_default=True, type=int,
              help="Log-spaced variance grid points per state count.")
@click.pass_context
def fig3(ctx, m_values, s_values, points):
    """Min-max mixture gap profiles at bisected tie weights (fig3.csv).

    Four parents, pair {m-1, m}; per (m, s) the tie weight is solved at
    the reference variance 1/(4 m^2) and the gap profiled over a log-spaced
    grid on [5e-4, 1/(4 m^2)].
    """
    def body():
        ms = _parse_int_list(m_values, "--m-values")
        ss = _parse_int_list(s_values, "--s-values")
        if points < 2:
            raise ValidationError(f"--points must be >= 2, got {points}")
        rows = []
        roots = []
        for m in ms:
            grid = np.geomspace(5e-4, 1.0 / (4 * m * m), points)
            report = run_fig3((m,), ss, grid)
            rows.extend(report.rows)
            roots.extend(report.roots)
        out_dir = ctx.obj["output_dir"]
        _write_csv(out_dir / "fig3.csv", ["m", "s", "sigma2", "gap"],
                   [[str(r.m), str(r.s), _fmt(r.sigma2), _fmt(r.gap)]
                    for r in rows])
        _write_manifest(out_dir / "fig3_manifest.json", "fig3",
                        ctx.obj["seed"],
                        {"m_values": list(ms), "s_values": list(ss),
                         "points": points, "sigma2_lower": 5e-4,
                         "tie_weights": [
                             {"m": r.m, "s": r.s, "sigma2_ref": r.sigma2_ref,
                              "tie_weight": r.tie_weight} for r in roots]})
        click.echo(f"wrote {out_dir / 'fig3.csv'} ({len(rows)} rows); "
                   + "; ".join(f"m={r.m} s={r.s} tie={r.tie_weight:.4f}"
                               for r in roots))
    _run(body)


@main.command("bisect-wmax")
@click.option("--which", default=1, show_default=True,
              type=click.IntRange(1, 2),
              help="1 ties states k and k+1; 2 ties states k-1 and k+1.")
@click.option("--parents", default=4, show_default=True, type=int)
@click.option("--states", default=5, show_default=True, type=int)
@click.option("--state-k", default=None, type=int,
              help="Target state index k (default: states - 1).")
@click.option("--variance", default=None, type=float,
              help="Variance at which to solve (default: 1/(4 states^2)).")
@click.option("--samples", default=3, show_default=True, type=int)
def bisect_wmax_cmd(which, parents, states, state_k, variance, samples):
    """Solve the min-max mixture weight at which two child states tie."""
    def body():
        k = state_k if state_k is not None else states - 1
        var = variance if variance is not None else 1.0 / (4 * states * states)
        root = bisect_wmax(which, states, k, parents, var, samples)
        click.echo(_fmt(root))
    _run(body)


if __name__ == "__main__":
    main()
