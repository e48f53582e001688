"""Command-line front end.

    qwscatter validate   --model model.json
    qwscatter resonances --model ms --eps 0.5
    qwscatter smatrix    --model cycle --N 4 --c 1 --eps 0.3 --z-grid 16
    qwscatter sweep discrepancy --model ms --z 0.921+0.390i
    qwscatter sweep tunneling   --model ms --J 1
    qwscatter sweep width       --model cycle --N 4 --c 1 --J 1
    qwscatter sweep comfort     --model cycle --N 4 --c 1

Models are either builtin names (``ms``, ``cycle``, ``crossing``) or paths
to JSON model files.  Numbers print with 17 significant digits so CSV
output round-trips doubles losslessly; row order is deterministic (eps
ascending, then z by angle, then row-major matrix entries).

Exit codes: 0 success, 1 validation failure, 2 numerical failure
(tolerance breach), 3 usage error.
"""

from __future__ import annotations

import cmath
import csv
import io
import json
import os
import sys

import click
import numpy as np

from . import asymptotics, modelfile
from .coins import EvalError, ExprSyntaxError, NotUnitary, eval_coins
from .graph import GraphError
from .models import BUILTIN_FAMILIES, EpsOutOfRange, ModelFamily
from .scattering import (
    OrthogonalityViolated,
    PoleHit,
    SingularSystem,
    oracle_direct_solve,
    scattering_matrix,
)
from .spectral import (
    ClusterAmbiguity,
    IllConditionedChain,
    NotSimple,
    ZeroCluster,
    eigen_decompose,
    resonance_set,
)
from .walk import DimensionMismatch, LabelMismatch, NoExit, NotDeterministic, free_routing_check

ROUTE_AGREEMENT_TOL = 1e-8


class RouteMismatch(Exception):
    """Independent scattering routes disagreed beyond tolerance."""


VALIDATION_ERRORS = (
    modelfile.ModelFileError,
    GraphError,
    NotUnitary,
    ExprSyntaxError,
    EvalError,
    EpsOutOfRange,
    DimensionMismatch,
    NotDeterministic,
    NoExit,
    LabelMismatch,
)

NUMERICAL_ERRORS = (
    RouteMismatch,
    PoleHit,
    OrthogonalityViolated,
    SingularSystem,
    ClusterAmbiguity,
    IllConditionedChain,
    NotSimple,
    ZeroCluster,
    asymptotics.SimplicityViolated,
    asymptotics.TrackingAmbiguous,
    asymptotics.ResonanceOnCircle,
    asymptotics.NoCrossing,
)


def _fmt(value) -> str:
    """One CSV cell: 17 significant digits for floats, bare text otherwise."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _write_csv(rows, header, out_path):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    text = buffer.getvalue()
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _emit(rows, header, summary, out_path, fmt):
    if fmt == "json":
        document = {
            "columns": list(header),
            "rows": [[_json_cell(v) for v in row] for row in rows],
        }
        if summary is not None:
            document["summary"] = summary
        text = json.dumps(document, indent=2, sort_keys=True) + "\n"
        if out_path:
            with open(out_path, "w", encoding="utf-8") as handle:
                handle.write(text)
        else:
            sys.stdout.write(text)
        return
    _write_csv(rows, header, out_path)
    if summary is not None:
        text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
        # keep a bare-stdout CSV stream machine-readable: the summary goes
        # to stderr unless the CSV went to a file
        (sys.stdout if out_path else sys.stderr).write(text)


def _json_cell(value):
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def parse_complex_value(text: str) -> complex:
    cleaned = text.strip().replace(" ", "").replace("I", "i").replace("j", "i")
    if not cleaned:
        raise click.UsageError("empty complex number")
    try:
        return complex(cleaned.replace("i", "j"))
    except ValueError:
        raise click.UsageError(
            f"cannot parse complex number {text!r}; write e.g. 0.921+0.390i"
        )


def parse_eps_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise click.UsageError("--eps-grid wants START:STOP:COUNT (geometric)")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        return asymptotics.geometric_grid(start, stop, count)
    except ValueError as exc:
        raise click.UsageError(f"bad --eps-grid value: {exc}")


def parse_split(text: str) -> tuple:
    try:
        channels = tuple(sorted({int(part) for part in text.split(",") if part}))
    except ValueError:
        raise click.UsageError("--J wants a comma-separated list of channel numbers")
    if not channels:
        raise click.UsageError("--J must name at least one channel")
    return channels


def parse_strengths(text: str):
    try:
        return [float(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise click.UsageError("--c wants a number or comma-separated numbers")


def load_family(model: str, n_vertices, strengths) -> ModelFamily:
    if model == "ms":
        return BUILTIN_FAMILIES["ms"]()
    if model == "cycle":
        if n_vertices is None:
            raise click.UsageError("--model cycle needs --N")
        c = parse_strengths(strengths) if strengths else [1.0]
        if len(c) == 1:
            c = c * n_vertices
        if len(c) != n_vertices:
            raise click.UsageError(
                f"--c lists {len(c)} strengths but --N is {n_vertices}"
            )
        return BUILTIN_FAMILIES["cycle"](n=n_vertices, c=c)
    if model == "crossing":
        c = parse_strengths(strengths) if strengths else [1.0]
        if len(c) != 1:
            raise click.UsageError("--model crossing takes a single --c value")
        return BUILTIN_FAMILIES["crossing"](c=c[0])
    if os.path.exists(model):
        return modelfile.family_from_file(model)
    if os.sep in model or model.endswith(".json"):
        raise modelfile.ModelFileError(f"model file not found: {model}")
    raise click.UsageError(
        f"unknown model {model!r}: not a builtin (ms, cycle, crossing) "
        "and no such file"
    )


_model_options = [
    click.option("--model", required=True, help="builtin name or model file path"),
    click.option("--N", "n_vertices", type=int, default=None, help="cycle size"),
    click.option(
        "--c",
        "strengths",
        default=None,
        help="coupling strength(s), comma separated",
    ),
]


def model_options(fn):
    for option in reversed(_model_options):
        fn = option(fn)
    return fn


def output_options(fn):
    fn = click.option("--out", default=None, help="write table to this path")(fn)
    fn = click.option(
        "--format",
        "fmt",
        type=click.Choice(["csv", "json"]),
        default="csv",
        help="output format",
    )(fn)
    return fn


@click.group()
def cli():
    """Scattering for quantum walks on graphs with semi-infinite tails."""


@cli.command()
@model_options
@click.option("--eps", type=float, default=0.0, help="evaluate coins at this eps")
def validate(model, n_vertices, strengths, eps):
    """Check balance, coin unitarity, and the eps=0 routing of a model."""
    checks = []
    failures = []

    def run(name, fn):
        try:
            detail = fn()
        except Exception as exc:  # collected, not raised: report all checks
            failures.append(
                {"check": name, "error": type(exc).__name__, "message": str(exc)}
            )
            checks.append({"name": name, "pass": False})
            return None
        entry = {"name": name, "pass": True}
        if detail:
            entry.update(detail)
        checks.append(entry)
        return detail

    family = {}

    def build():
        family["family"] = load_family(model, n_vertices, strengths)
        graph = family["family"].graph
        return {"vertices": len(graph.vertices), "arcs": graph.n_arcs,
                "tails": graph.n_tails}

    run("graph_balance", build)
    if family:
        fam = family["family"]

        def unitarity():
            eval_coins(fam.coins, eps)
            return {"eps": eps}

        run("coin_unitarity", unitarity)
        walk0 = {}

        def routing():
            walk0["walk"] = fam.walk(0.0)
            route = free_routing_check(walk0["walk"])
            return {
                "steps": list(route.steps),
                "phases": [[phase.real, phase.imag] for phase in route.phases],
            }

        run("free_routing", routing)
    report = {"model": model, "pass": not failures, "checks": checks}
    if failures:
        report["errors"] = failures
    click.echo(json.dumps(report, indent=2, sort_keys=True))
    return 0 if not failures else 1


def _resonance_rows(family, eps_values, tol_cluster, tol_circle):
    rows = []
    for eps in eps_values:
        walk = family.walk(eps)
        resonances, _ = resonance_set(walk, tol_cluster, tol_circle)
        ordered = sorted(
            resonances,
            key=lambda r: (round(cmath.phase(r.value), 12), abs(r.value)),
        )
        for res in ordered:
            rows.append(
                (
                    eps,
                    res.value.real,
                    res.value.imag,
                    res.multiplicity,
                    res.on_unit_circle,
                )
            )
    return rows


@cli.command()
@model_options
@click.option("--eps", type=float, default=None)
@click.option("--eps-grid", "eps_grid", default=None, help="START:STOP:COUNT")
@click.option("--tol-cluster", type=float, default=None)
@click.option("--tol-circle", type=float, default=1e-8)
@output_options
def resonances(model, n_vertices, strengths, eps, eps_grid, tol_cluster, tol_circle, out, fmt):
    """List resonances (interior spectrum, zero included) per eps."""
    family = load_family(model, n_vertices, strengths)
    if eps is not None and eps_grid is not None:
        raise click.UsageError("give either --eps or --eps-grid, not both")
    if eps_grid is not None:
        grid = parse_eps_grid(eps_grid)
    else:
        grid = np.array([0.0 if eps is None else eps])
    rows = _resonance_rows(family, [float(e) for e in grid], tol_cluster, tol_circle)
    _emit(rows, ("eps", "re", "im", "multiplicity", "on_circle"), None, out, fmt)
    return 0


def _route_check(walk, z, system, sigma):
    """Cross-compare the two analytic routes and the direct linear solve."""
    other = scattering_matrix(walk, z, "expansion", system).matrix
    nt = walk.n_tails
    direct = np.zeros((nt, nt), dtype=complex)
    for k in range(nt):
        amp_in = np.zeros(nt, dtype=complex)
        amp_in[k] = 1.0
        _, direct[:, k] = oracle_direct_solve(walk, z, amp_in)
    worst = max(
        float(np.abs(sigma - other).max()), float(np.abs(sigma - direct).max())
    )
    if worst > ROUTE_AGREEMENT_TOL:
        raise RouteMismatch(
            f"routes disagree by {worst:.3e} at z = {z:.12g} "
            f"(tolerance {ROUTE_AGREEMENT_TOL:g})"
        )
    return worst


@cli.command()
@model_options
@click.option("--eps", type=float, default=0.0)
@click.option("--z", "z_text", default=None, help="single spectral parameter")
@click.option("--z-grid", "z_count", type=int, default=None, help="uniform circle grid size")
@click.option(
    "--route",
    type=click.Choice(["resolvent", "expansion"]),
    default="resolvent",
)
@click.option(
    "--check-routes",
    is_flag=True,
    help="cross-compare both routes and the direct solve; exit 2 on mismatch",
)
@click.option("--tol-cluster", type=float, default=None)
@click.option("--tol-circle", type=float, default=1e-8)
@output_options
def smatrix(
    model,
    n_vertices,
    strengths,
    eps,
    z_text,
    z_count,
    route,
    check_routes,
    tol_cluster,
    tol_circle,
    out,
    fmt,
):
    """Print scattering-matrix entries at one or many spectral parameters."""
    family = load_family(model, n_vertices, strengths)
    if (z_text is None) == (z_count is None):
        raise click.UsageError("give exactly one of --z or --z-grid")
    if z_text is not None:
        points = [parse_complex_value(z_text)]
    else:
        if z_count < 1:
            raise click.UsageError("--z-grid must be positive")
        points = [cmath.exp(2j * cmath.pi * k / z_count) for k in range(z_count)]
    walk = family.walk(eps)
    system = eigen_decompose(walk.interior, tol_cluster, tol_circle)
    rows = []
    for z in points:
        report = scattering_matrix(walk, z, route, system)
        sigma = report.matrix
        if check_routes:
            _route_check(walk, z, system, sigma)
        for row in range(sigma.shape[0]):
            for col in range(sigma.shape[1]):
                rows.append(
                    (
                        eps,
                        z.real,
                        z.imag,
                        row + 1,
                        col + 1,
                        sigma[row, col].real,
                        sigma[row, col].imag,
                        report.unitarity_residual,
                    )
                )
    header = ("eps", "z_re", "z_im", "row", "col", "value_re", "value_im", "unitarity_residual")
    _emit(rows, header, None, out, fmt)
    return 0


@cli.group()
def sweep():
    """Sweep a quantity over an eps grid and report fits."""


def _sweep_rows(table_rows):
    return [
        (row.eps, row.z.real, row.z.imag, row.quantity, row.value)
        for row in table_rows
    ]


SWEEP_HEADER = ("eps", "z_re", "z_im", "quantity", "value")


def _eps_values(eps_grid):
    return parse_eps_grid(eps_grid) if eps_grid is not None else None


def _pick_resonance(family, lam_text, eps_values):
    """Resolve --lambda, defaulting to the resonance that detaches fastest."""
    if lam_text is not None:
        return parse_complex_value(lam_text)
    grid = (
        asymptotics.default_eps_grid(include_zero=False)
        if eps_values is None
        else np.asarray(eps_values, dtype=float)
    )
    grid = grid[grid > 0]
    track = asymptotics.track_resonances(family, np.concatenate([[0.0], grid]))
    if not track.starts:
        raise click.UsageError(
            "the eps=0 walk has no unit-circle resonances to track"
        )
    finals = np.abs(track.paths[-1])
    best = int(np.argmin(finals))
    if finals[best] > 1.0 - 1e-12:
        raise click.UsageError(
            "every tracked resonance stays on the unit circle; "
            "pick one explicitly with --lambda"
        )
    return track.starts[best]


@sweep.command()
@model_options
@click.option("--z", "z_text", default=None, help="fixed circle point (default: auto non-resonant)")
@click.option("--eps-grid", "eps_grid", default=None, help="START:STOP:COUNT")
@click.option(
    "--route",
    type=click.Choice(["resolvent", "expansion"]),
    default="resolvent",
)
@output_options
def discrepancy(model, n_vertices, strengths, z_text, eps_grid, route, out, fmt):
    """Distance of the scattering matrix from its decoupled limit."""
    family = load_family(model, n_vertices, strengths)
    z = (
        parse_complex_value(z_text)
        if z_text is not None
        else asymptotics.nonresonant_point(family)
    )
    rows, summary = asymptotics.discrepancy_table(
        family, z, _eps_values(eps_grid), route
    )
    _emit(_sweep_rows(rows), SWEEP_HEADER, summary, out, fmt)
    return 0


@sweep.command()
@model_options
@click.option("--J", "split_text", required=True, help="incoming channels, e.g. 1,2")
@click.option("--lambda", "lam_text", default=None, help="resonance of the eps=0 walk to track")
@click.option("--eps-grid", "eps_grid", default=None, help="START:STOP:COUNT")
@output_options
def tunneling(model, n_vertices, strengths, split_text, lam_text, eps_grid, out, fmt):
    """Resonant-tunneling diagnostics at the tracked peak."""
    family = load_family(model, n_vertices, strengths)
    split = parse_split(split_text)
    eps_values = _eps_values(eps_grid)
    lam = _pick_resonance(family, lam_text, eps_values)
    rows, summary = asymptotics.tunneling_table(family, lam, split, eps_values)
    summary["lambda_re"] = lam.real
    summary["lambda_im"] = lam.imag
    _emit(_sweep_rows(rows), SWEEP_HEADER, summary, out, fmt)
    return 0


@sweep.command()
@model_options
@click.option("--J", "split_text", required=True, help="incoming channels, e.g. 1,2")
@click.option("--lambda", "lam_text", default=None)
@click.option("--eps-grid", "eps_grid", default=None, help="START:STOP:COUNT")
@output_options
def width(model, n_vertices, strengths, split_text, lam_text, eps_grid, out, fmt):
    """Measured half-height peak widths against 2(1-|lambda_eps|)."""
    family = load_family(model, n_vertices, strengths)
    split = parse_split(split_text)
    eps_values = _eps_values(eps_grid)
    lam = _pick_resonance(family, lam_text, eps_values)
    rows, summary = asymptotics.width_table(family, lam, split, eps_values)
    summary["lambda_re"] = lam.real
    summary["lambda_im"] = lam.imag
    _emit(_sweep_rows(rows), SWEEP_HEADER, summary, out, fmt)
    return 0


@sweep.command()
@model_options
@click.option("--lambda", "lam_text", default=None)
@click.option("--eps-grid", "eps_grid", default=None, help="START:STOP:COUNT")
@output_options
def comfort(model, n_vertices, strengths, lam_text, eps_grid, out, fmt):
    """Interior energy at the peak against its divergence-rate bound."""
    family = load_family(model, n_vertices, strengths)
    eps_values = _eps_values(eps_grid)
    lam = _pick_resonance(family, lam_text, eps_values)
    rows, summary = asymptotics.comfort_table(family, lam, eps_values)
    summary["lambda_re"] = lam.real
    summary["lambda_im"] = lam.imag
    _emit(_sweep_rows(rows), SWEEP_HEADER, summary, out, fmt)
    return 0


def _show_error(kind: str, exc: Exception) -> None:
    payload = {
        "error": {
            "kind": kind,
            "type": type(exc).__name__,
            "message": str(exc),
        }
    }
    sys.stderr.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def main(argv=None) -> int:
    try:
        result = cli.main(args=argv, standalone_mode=False)
        return int(result) if isinstance(result, int) else 0
    except click.exceptions.Exit as exc:  # --help and friends
        return int(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        return 3
    except click.Abort:
        return 3
    except click.ClickException as exc:
        exc.show()
        return 1
    except NUMERICAL_ERRORS as exc:
        _show_error("numerical", exc)
        return 2
    except VALIDATION_ERRORS as exc:
        _show_error("validation", exc)
        return 1
    except ValueError as exc:
        _show_error("validation", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
