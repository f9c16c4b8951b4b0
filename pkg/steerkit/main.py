# steerkit/main.py
"""
Command line entry point.

Every command validates its options into a RunConfig, runs one library
operation and writes JSON or CSV to stdout (or --output). Logs go to stderr.
Exit codes: 0 success, 2 input error, 3 strict-mode indeterminacy,
4 solver failure.
"""

import csv
import functools
import io
import json
import logging
import math
from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence

import click
import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ValidationError

from steerkit.core.config import get_settings
from steerkit.core.exceptions import IndeterminateResult, InputError, SolverError
from steerkit.core.log import configure_logging
from steerkit.expsim.counts import CountsTable, read_counts_csv, write_counts_csv
from steerkit.expsim.experiment import REFERENCE_RUNS, ExperimentReport, run_batch, run_experiment
from steerkit.expsim.sampler import ImbalanceModel, SamplerConfig
from steerkit.expsim.tomography import analyze_counts
from steerkit.qmat import Operator, as_operator
from steerkit.schemas import (
    BatchResponse,
    BracketResponse,
    CertificationResponse,
    CountsSidecar,
    DensityMatrixPayload,
    ExperimentResponse,
    OutputFormat,
    RunConfig,
    TomographyResponse,
    TomoReport,
    VerdictResponse,
)
from steerkit.states import (
    FamilyParams,
    ThetaFamilyParams,
    bowles_one_way_predicate,
    family_state,
    theta_state,
)
from steerkit.steering.hierarchy import (
    HierarchyLabel,
    Verdict,
    classify,
    format_float,
    region_scan,
    write_region_csv,
)
from steerkit.steering.mesh import DirectionMesh, fibonacci_mesh
from steerkit.steering.radius import Direction, RadiusBracket, critical_radius_bracket

logger = logging.getLogger(__name__)

EXIT_INPUT = 2
EXIT_INDETERMINATE = 3
EXIT_SOLVER = 4

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def run_options(f):
    """Options shared by every command."""
    options = [
        click.option("--mesh", "mesh_size", type=int, default=None, help="Fibonacci mesh size (3-16)."),
        click.option("--tol", type=float, default=None, help="Phase-1 feasibility tolerance."),
        click.option("--bisection-steps", type=int, default=None, help="Bisection probes per bracket."),
        click.option("--seed", type=int, default=None, help="Run seed."),
        click.option("--threads", type=int, default=None, help="Workers, 0 for all cores."),
        click.option("--output", "output_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
                     help="Write the result here instead of stdout."),
        click.option("--format", "output_format", type=click.Choice([f.value for f in OutputFormat]),
                     default=None, help="Output format."),
        click.option("--strict", is_flag=True, default=False, help="Exit 3 when a result is indeterminate."),
        click.option("--no-validate", is_flag=True, default=False, help="Accept states that fail validation."),
        click.option("--log-level", type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def handle_errors(f):
    """Map library errors onto exit codes with a one-line diagnostic on stderr."""
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except ValidationError as e:
            click.echo(f"Error: invalid input: {e}", err=True)
            raise SystemExit(EXIT_INPUT)
        except (InputError, OSError, UnicodeDecodeError) as e:
            click.echo(f"Error: {e}", err=True)
            raise SystemExit(EXIT_INPUT)
        except IndeterminateResult as e:
            click.echo(f"Indeterminate: {e}", err=True)
            raise SystemExit(EXIT_INDETERMINATE)
        except SolverError as e:
            click.echo(f"Solver failure: {e}", err=True)
            raise SystemExit(EXIT_SOLVER)
    return wrapper


def build_run_config(options: Dict) -> RunConfig:
    configure_logging(options.get("log_level") or get_settings().LOG_LEVEL)
    return RunConfig.from_settings(
        mesh_size=options.get("mesh_size"),
        tol=options.get("tol"),
        bisection_steps=options.get("bisection_steps"),
        seed=options.get("seed"),
        threads=options.get("threads"),
        output_path=options.get("output_path"),
        format=options.get("output_format"),
        strict=options.get("strict"),
        validate_input=not options.get("no_validate", False),
    )


def emit(text: str, run: RunConfig) -> None:
    """Write the primary output to --output or stdout."""
    if run.output_path is not None:
        run.output_path.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {run.output_path}")
    else:
        click.echo(text, nl=not text.endswith("\n"))


def emit_model(model: BaseModel, run: RunConfig, rows: Optional[Sequence[Dict]] = None) -> None:
    if run.format is OutputFormat.CSV:
        emit(to_csv(rows if rows is not None else [model.model_dump(mode="json")]), run)
    else:
        emit(model.model_dump_json(indent=2), run)


def to_csv(rows: Sequence[Dict]) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: "" if v is None else v for k, v in row.items()})
    return out.getvalue()


def load_state(path: Path, run: RunConfig) -> Operator:
    payload = DensityMatrixPayload.model_validate_json(path.read_text(encoding="utf-8"))
    rho = payload.to_density(validate=run.validate_input, tolerance=get_settings().VALIDATION_TOL)
    if as_operator(rho).shape != (4, 4):
        raise InputError("Steering certification needs a two-qubit (dim 4) state")
    return rho


def parse_pair(text: str, names: Sequence[str]) -> Dict[str, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != len(names):
        raise InputError(f"Expected {','.join(names)}, got {text!r}")
    try:
        return {name: float(part) for name, part in zip(names, parts)}
    except ValueError:
        raise InputError(f"Expected numbers for {','.join(names)}, got {text!r}")


def check_bracket(bracket: RadiusBracket, run: RunConfig) -> None:
    if not run.strict:
        return
    if bracket.status != "complete":
        raise IndeterminateResult(f"{bracket.direction.value} bracket widened by an inconclusive probe")
    if not math.isfinite(bracket.hi) and bracket.lo < 1:
        raise IndeterminateResult(f"{bracket.direction.value} bracket has no upper bound and lo < 1")


def check_verdict(verdict: Optional[Verdict], run: RunConfig) -> None:
    if run.strict and verdict is not None and verdict.label is HierarchyLabel.INDETERMINATE:
        raise IndeterminateResult(
            f"no decision ({verdict.steerable_ab.value}, {verdict.steerable_ba.value})"
        )


def certify(rho: Operator, mesh: DirectionMesh, run: RunConfig):
    verdict = classify(rho, mesh, n_jobs=run.n_jobs)
    brackets = {d: critical_radius_bracket(rho, d, mesh, run.bisection_steps, run.tol) for d in Direction}
    return verdict, brackets


@click.group()
@click.version_option("1.0.0", prog_name="steerkit")
def cli():
    """Certify one-way EPR steering of two-qubit states and simulate the experiment."""


@cli.command()
@click.argument("state_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--direction", type=click.Choice([d.value for d in Direction]), default=Direction.A_TO_B.value)
@run_options
@handle_errors
def radius(state_file: Path, direction: str, **options):
    """Bracket the critical radius of STATE_FILE in one direction."""
    run = build_run_config(options)
    rho = load_state(state_file, run)
    bracket = critical_radius_bracket(rho, Direction(direction), fibonacci_mesh(run.mesh_size),
                                      run.bisection_steps, run.tol)
    emit_model(BracketResponse.from_bracket(bracket), run)
    check_bracket(bracket, run)


@cli.command(name="classify")
@click.argument("state_file", required=False, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--family", "family", default=None, help="Use rho(p, r) given as 'p,r'.")
@run_options
@handle_errors
def classify_cmd(state_file: Optional[Path], family: Optional[str], **options):
    """Place a state in the steering hierarchy."""
    run = build_run_config(options)
    if (state_file is None) == (family is None):
        raise InputError("Give exactly one of STATE_FILE or --family")
    if family is not None:
        rho = family_state(FamilyParams(**parse_pair(family, ("p", "r"))))
    else:
        rho = load_state(state_file, run)
    verdict = classify(rho, fibonacci_mesh(run.mesh_size), n_jobs=run.n_jobs)
    emit_model(VerdictResponse.from_verdict(verdict), run)
    check_verdict(verdict, run)


@cli.command()
@click.option("--p-steps", type=click.IntRange(min=2), default=11, show_default=True)
@click.option("--r-steps", type=click.IntRange(min=2), default=11, show_default=True)
@run_options
@handle_errors
def region(p_steps: int, r_steps: int, **options):
    """Classify the family on a p x r grid over [0, 1]^2."""
    run = build_run_config(options)
    mesh = fibonacci_mesh(run.mesh_size)
    cells = region_scan(np.linspace(0.0, 1.0, p_steps), np.linspace(0.0, 1.0, r_steps), mesh,
                        n_jobs=run.threads, progress=click.get_text_stream("stderr").isatty())
    if run.format is OutputFormat.JSON:
        rows = [
            {"p": c.p, "r": c.r, "verdict": VerdictResponse.from_verdict(c.verdict).model_dump(mode="json")}
            for c in cells
        ]
        emit(json.dumps(rows, indent=2), run)
    else:
        out = io.StringIO()
        write_region_csv(cells, out)
        emit(out.getvalue(), run)
    if run.strict and any(c.verdict.label is HierarchyLabel.INDETERMINATE for c in cells):
        raise IndeterminateResult("region contains indeterminate cells")


def write_counts_bundle(path: Path, counts: CountsTable, cfg: SamplerConfig) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        write_counts_csv(counts, handle)
    sidecar = CountsSidecar(duration_s=counts.duration_s, alpha=cfg.alpha, seed=cfg.seed)
    path.with_suffix(".json").write_text(sidecar.model_dump_json(indent=2), encoding="utf-8")
    logger.info(f"Wrote counts to {path}")


def summary_row(report: ExperimentReport) -> Dict:
    tomo = report.tomography
    row = {
        "p_ipt": report.config.p_ipt,
        "r_ipt": report.config.r_ipt,
        "p_target": report.target.p,
        "r_target": report.target.r,
        "p": tomo.retrieved.p,
        "sigma_p": tomo.bootstrap_sigma_p,
        "r": tomo.retrieved.r,
        "sigma_r": tomo.bootstrap_sigma_r,
        "fidelity": tomo.fidelity_to_target,
        "label": None if report.verdict is None else report.verdict.label.value,
    }
    for direction, bracket in report.brackets.items():
        row[f"lo_{direction.value}"] = bracket.lo
        row[f"hi_{direction.value}"] = bracket.hi if math.isfinite(bracket.hi) else None
    return row


@cli.command()
@click.option("--p-ipt", type=float, default=REFERENCE_RUNS[0].p_ipt, show_default=True)
@click.option("--r-ipt", type=float, default=REFERENCE_RUNS[0].r_ipt, show_default=True)
@click.option("--alpha", type=float, default=None, help="Entangled to product photon ratio.")
@click.option("--frames", type=int, default=None)
@click.option("--rate", "rate_hz", type=float, default=None, help="Source pair rate in Hz.")
@click.option("--efficiency", type=float, default=None)
@click.option("--exposure", "exposure_s", type=float, default=None, help="Seconds per frame.")
@click.option("--accumulation", "accumulation_s", type=float, default=None, help="Seconds per tomography run.")
@click.option("--imbalance-model", type=click.Choice([m.value for m in ImbalanceModel]),
              default=ImbalanceModel.CALIBRATED.value, show_default=True)
@click.option("--crosstalk", type=float, default=0.0, show_default=True)
@click.option("--variations", type=int, default=None, help="Bootstrap resamples.")
@click.option("--reference-runs", "reference_runs", is_flag=True, default=False, help="Run all ten reference configurations.")
@click.option("--bracket-resamples", type=click.IntRange(min=0), default=0, show_default=True,
              help="Bracket this many Poisson resamples of the counts.")
@click.option("--no-certify", is_flag=True, default=False, help="Skip classification and brackets.")
@click.option("--dump-counts", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Also write the counts CSV (and a .json sidecar).")
@run_options
@handle_errors
def simulate(p_ipt, r_ipt, alpha, frames, rate_hz, efficiency, exposure_s, accumulation_s,
             imbalance_model, crosstalk, variations, reference_runs, no_certify, bracket_resamples, dump_counts,
             **options):
    """Simulate the experiment end to end and report the analysis."""
    run = build_run_config(options)
    settings = get_settings()
    overrides = {
        "alpha": settings.ALPHA if alpha is None else alpha,
        "frames": settings.FRAMES if frames is None else frames,
        "exposure_s": settings.EXPOSURE_S if exposure_s is None else exposure_s,
        "accumulation_s": settings.ACCUMULATION_S if accumulation_s is None else accumulation_s,
        "imbalance_model": ImbalanceModel(imbalance_model),
        "crosstalk": crosstalk,
    }
    kwargs = dict(
        mesh=fibonacci_mesh(run.mesh_size),
        rate_hz=rate_hz,
        efficiency=efficiency,
        variations=variations,
        bisection_steps=run.bisection_steps,
        tol=run.tol,
        certify=not no_certify,
        bracket_resamples=bracket_resamples,
    )
    if reference_runs:
        reports = run_batch(REFERENCE_RUNS, seed=run.seed, n_jobs=run.threads, config_overrides=overrides, **kwargs)
    else:
        cfg = SamplerConfig(p_ipt=p_ipt, r_ipt=r_ipt, seed=run.seed, **overrides)
        reports = [run_experiment(cfg, n_jobs=run.threads, **kwargs)]

    if dump_counts is not None:
        for index, report in enumerate(reports, start=1):
            path = dump_counts if len(reports) == 1 else dump_counts.with_name(
                f"{dump_counts.stem}_{index}{dump_counts.suffix}")
            path.parent.mkdir(parents=True, exist_ok=True)
            write_counts_bundle(path, report.counts, report.config)

    responses = [ExperimentResponse.from_report(r) for r in reports]
    rows = [summary_row(r) for r in reports]
    if reference_runs:
        emit_model(BatchResponse(reports=responses), run, rows)
    else:
        emit_model(responses[0], run, rows)
    for report in reports:
        check_verdict(report.verdict, run)
        for bracket in report.brackets.values():
            check_bracket(bracket, run)


@cli.command()
@click.argument("counts_csv", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("sidecar_json", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--target", default=None, help="Quote fidelity against rho(p, r) given as 'p,r'.")
@click.option("--variations", type=int, default=None, help="Bootstrap resamples.")
@click.option("--no-certify", is_flag=True, default=False, help="Skip classification and brackets.")
@run_options
@handle_errors
def tomo(counts_csv: Path, sidecar_json: Path, target: Optional[str], variations: Optional[int],
         no_certify: bool, **options):
    """Reconstruct and certify the state behind a measured counts table."""
    run = build_run_config(options)
    sidecar = CountsSidecar.model_validate_json(sidecar_json.read_text(encoding="utf-8"))
    with counts_csv.open(encoding="utf-8", newline="") as handle:
        counts = read_counts_csv(handle, sidecar.duration_s)
    target_state = None if target is None else family_state(FamilyParams(**parse_pair(target, ("p", "r"))))
    result = analyze_counts(counts, target=target_state, variations=variations, seed=run.seed,
                            n_jobs=run.threads)
    verdict, brackets = None, {}
    if not no_certify:
        verdict, brackets = certify(result.rho_hat, fibonacci_mesh(run.mesh_size), run)
    report = TomoReport(
        total_counts=counts.total,
        duration_s=counts.duration_s,
        tomography=TomographyResponse.from_result(result),
        verdict=None if verdict is None else VerdictResponse.from_verdict(verdict),
        brackets=[BracketResponse.from_bracket(b) for b in brackets.values()],
    )
    row = {
        "total_counts": counts.total,
        "p": result.retrieved.p,
        "sigma_p": result.bootstrap_sigma_p,
        "r": result.retrieved.r,
        "sigma_r": result.bootstrap_sigma_r,
        "fidelity": result.fidelity_to_target,
        "label": None if verdict is None else verdict.label.value,
    }
    emit_model(report, run, [row])
    check_verdict(verdict, run)
    for bracket in brackets.values():
        check_bracket(bracket, run)


@cli.command(name="certify-file")
@click.argument("state_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@run_options
@handle_errors
def certify_file(state_file: Path, **options):
    """Verdict and both critical-radius brackets of STATE_FILE."""
    run = build_run_config(options)
    rho = load_state(state_file, run)
    verdict, brackets = certify(rho, fibonacci_mesh(run.mesh_size), run)
    response = CertificationResponse.build(verdict, brackets)
    rows = [dict(b.model_dump(mode="json"), label=verdict.label.value) for b in response.brackets]
    emit_model(response, run, rows)
    check_verdict(verdict, run)
    for bracket in brackets.values():
        check_bracket(bracket, run)


def _theta_cell(theta: float, p: float, mesh: Optional[DirectionMesh]) -> Dict:
    params = ThetaFamilyParams(theta=theta, p=p)
    row = {"theta": format_float(theta), "p": format_float(p),
           "predicted": "true" if bowles_one_way_predicate(params) else "false"}
    if mesh is not None:
        verdict = classify(theta_state(params), mesh)
        row.update(verdict_ab=verdict.steerable_ab.token, verdict_ba=verdict.steerable_ba.token,
                   label=verdict.label.value)
    return row


def theta_grid(theta_steps: int, p_steps: int) -> Iterable:
    # The last grid value is pinned so float round-off never leaves [0, pi/4]
    thetas = np.linspace(0.0, math.pi / 4, theta_steps)
    thetas[-1] = math.pi / 4
    return [(float(t), float(p)) for t in thetas for p in np.linspace(0.0, 1.0, p_steps)]


@cli.command()
@click.option("--theta-steps", type=click.IntRange(min=2), default=11, show_default=True)
@click.option("--p-steps", type=click.IntRange(min=2), default=11, show_default=True)
@click.option("--certify", "with_certify", is_flag=True, default=False,
              help="Also classify every grid state with the mesh.")
@run_options
@handle_errors
def bowles(theta_steps: int, p_steps: int, with_certify: bool, **options):
    """Evaluate the one-way sufficient condition on the theta family grid."""
    run = build_run_config(options)
    mesh = fibonacci_mesh(run.mesh_size) if with_certify else None
    grid = theta_grid(theta_steps, p_steps)
    if mesh is None:
        rows = [_theta_cell(t, p, None) for t, p in grid]
    else:
        rows = Parallel(n_jobs=run.n_jobs)(delayed(_theta_cell)(t, p, mesh) for t, p in grid)
    if run.format is OutputFormat.JSON:
        emit(json.dumps(rows, indent=2), run)
    else:
        emit(to_csv(rows), run)
    if run.strict and mesh is not None and any(r["label"] == HierarchyLabel.INDETERMINATE.value for r in rows):
        raise IndeterminateResult("grid contains indeterminate cells")
