# growthlab/cli.py
"""
Command line surface:

  validate, steady-state, zpath, simulate, integrate, verify, compare,
  sweep, plotdata

Exit codes: 0 success, 1 parameter/validation or usage error, 2 verification
failure, 3 numerical-method failure.
"""
import functools
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

import click

from growthlab.closed_form import pin_family
from growthlab.config import RunConfig, Settings, get_settings, load_run_config, read_config_file
from growthlab.dynamics import PrimalState, integrate
from growthlab.errors import GrowthLabError, ParameterError, VerificationFailed
from growthlab.output import (
    csv_text,
    emit_plotdata,
    plotdata_csv,
    table,
    to_json,
    trajectory_csv,
)
from growthlab.params import (
    Family,
    exponent_identity_gap,
    is_on_restricted_manifold,
    restricted_sigma,
    steady_state,
    validate_params,
)
from growthlab.sweep import SweepSpec, run_sweep, sweep_header
from growthlab.verify import compare_families, verify_family
from growthlab.zpath import ZPath, f_integral, g_integral, z_at
from utils.digest import config_digest
from utils.family_names import normalize_family

logger = logging.getLogger("growthlab")


# --------------------------
# Plumbing
# --------------------------

def configure_logging(verbose: int, settings: Settings) -> None:
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, settings.log_level.upper(), logging.WARNING)
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def handle_errors(fn: Callable) -> Callable:
    """Map library errors to exit codes; the message goes to stderr."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except GrowthLabError as e:
            logger.debug("%s failed", fn.__name__, exc_info=True)
            click.echo(f"error: {e}", err=True)
            click.get_current_context().exit(e.exit_code)

    return wrapper


def emit(payload, output: Optional[str]) -> None:
    data = payload.encode("utf-8") if isinstance(payload, str) else payload
    if output:
        with open(output, "wb") as fh:
            fh.write(data)
        logger.info("wrote %d bytes to %s", len(data), output)
        return
    click.get_binary_stream("stdout").write(data)


def _family_type(value: Optional[str]) -> Optional[str]:
    if value is None:
        return None
    name = normalize_family(value)
    if not name:
        raise click.BadParameter(f"unknown family {value!r}; use bgp, two-integral or one-integral")
    return name


def run_options(fn: Callable) -> Callable:
    """Flags shared by every command that works on a run configuration."""
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
                     help="JSON run configuration; flags override its values."),
        click.option("--sigma", type=float, default=None),
        click.option("--rho", type=float, default=None),
        click.option("--beta", type=float, default=None),
        click.option("--gamma", type=float, default=None),
        click.option("--delta", type=float, default=None),
        click.option("--pi", type=float, default=None),
        click.option("--format", "output_format", type=click.Choice(["csv", "json", "text"]), default=None),
        click.option("--output", "-o", default=None, help="Write to this file instead of stdout."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def path_options(fn: Callable) -> Callable:
    options = [
        click.option("--family", callback=lambda ctx, param, v: _family_type(v), default=None),
        click.option("--k0", type=float, default=None),
        click.option("--z0", type=float, default=None),
        click.option("--z0-ratio", type=float, default=None, help="z0 as a multiple of z*."),
        click.option("--t-max", type=float, default=None),
        click.option("--steps", type=int, default=None),
        click.option("--quad-tol", type=float, default=None),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _load(ctx: click.Context, config_path: Optional[str], flags: Dict[str, Any]) -> RunConfig:
    return load_run_config(config_path, flags, ctx.obj["settings"])


def _z0(cfg: RunConfig) -> Optional[float]:
    return cfg.resolved_z0(steady_state(cfg.params).z_star)


# --------------------------
# Commands
# --------------------------

class CommandGroup(click.Group):
    """Usage errors exit 1 like any other bad input; 2 belongs to failed verification."""

    def make_context(self, *args, **kwargs) -> click.Context:
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as e:
            e.exit_code = 1
            raise

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = 1
            raise


@click.group(cls=CommandGroup)
@click.option("--verbose", "-v", count=True, help="-v for INFO, -vv for DEBUG (stderr).")
@click.pass_context
def cli(ctx: click.Context, verbose: int) -> None:
    """Closed-form and numeric solutions of the two-sector growth model."""
    settings = get_settings()
    configure_logging(verbose, settings)
    ctx.ensure_object(dict)
    ctx.obj["settings"] = settings


@cli.command("validate")
@run_options
@click.pass_context
@handle_errors
def validate_cmd(ctx, config_path, output_format, output, **params):
    cfg = _load(ctx, config_path, params)
    result = validate_params(cfg.params, ctx.obj["settings"].constraint_slack)
    if (output_format or "json") == "text":
        rows = [
            [fam.value, adm.satisfied, ", ".join(c.name for c in adm.violated_constraints) or "-"]
            for fam, adm in result.items()
        ]
        emit(table(rows, ["family", "satisfied", "violated"]) + "\n", output)
        return
    payload = {
        fam.value: {
            **adm.summary(),
            "checked": [c.as_dict() for c in adm.checked_constraints],
        }
        for fam, adm in result.items()
    }
    emit(to_json(payload), output)


@cli.command("steady-state")
@run_options
@click.pass_context
@handle_errors
def steady_state_cmd(ctx, config_path, output_format, output, **params):
    cfg = _load(ctx, config_path, params)
    ss = steady_state(cfg.params)
    values = {
        "z_star": ss.z_star,
        "u_star": ss.u_star,
        "g_star": ss.g_star,
        "eta": ss.eta,
        "z_rate": ss.z_rate,
        "g_decay": ss.g_decay,
        "bgp_ratio": ss.bgp_ratio,
        "exponent_identity_gap": exponent_identity_gap(cfg.params),
        "restricted_sigma": restricted_sigma(cfg.params),
        "on_restricted_manifold": is_on_restricted_manifold(cfg.params),
    }
    if (output_format or "text") == "json":
        emit(to_json(values), output)
        return
    emit(table([[k, v] for k, v in values.items()], ["quantity", "value"]) + "\n", output)


@cli.command("zpath")
@run_options
@path_options
@click.pass_context
@handle_errors
def zpath_cmd(ctx, config_path, output_format, output, **flags):
    cfg = _load(ctx, config_path, flags)
    settings = ctx.obj["settings"]
    path = ZPath.from_params(cfg.params, _z0(cfg))
    rows = []
    for t in cfg.times():
        rows.append((
            t,
            z_at(path, t),
            f_integral(path, t, cfg.quad_tol, settings.quad_max_depth).value,
            g_integral(path, t, cfg.quad_tol, settings.quad_max_depth).value,
        ))
    emit(csv_text(["t", "z", "F", "G"], rows), output)


def _emit_trajectory(traj, output_format: Optional[str], output: Optional[str], provenance: bool = False) -> None:
    if (output_format or "csv") == "json":
        payload = {"provenance": traj.provenance, **traj.columns()}
        if traj.stats is not None:
            payload["stats"] = traj.stats.as_dict()
        emit(to_json(payload), output)
        return
    emit(trajectory_csv(traj, provenance=provenance), output)


@cli.command("simulate")
@run_options
@path_options
@click.pass_context
@handle_errors
def simulate_cmd(ctx, config_path, output_format, output, **flags):
    cfg = _load(ctx, config_path, flags)
    fam = pin_family(cfg.params, cfg.family, cfg.k0, _z0(cfg), cfg.quad_tol, ctx.obj["settings"].constraint_slack)
    _emit_trajectory(fam.trajectory(cfg.times()), output_format, output)


@cli.command("integrate")
@run_options
@path_options
@click.option("--tol", "ode_tol", type=float, default=None, help="Integrator tolerance.")
@click.pass_context
@handle_errors
def integrate_cmd(ctx, config_path, output_format, output, **flags):
    cfg = _load(ctx, config_path, flags)
    fam = pin_family(cfg.params, cfg.family, cfg.k0, _z0(cfg), cfg.quad_tol, ctx.obj["settings"].constraint_slack)
    pin = fam.pinned
    times = cfg.times()
    traj = integrate(cfg.params, PrimalState(pin.c0, pin.k0, pin.h0, pin.u0), times[-1], cfg.ode_tol, times=times)
    _emit_trajectory(traj, output_format, output, provenance=True)


@cli.command("verify")
@run_options
@path_options
@click.option("--tol", "ode_tol", type=float, default=None, help="Integrator tolerance of the oracle.")
@click.pass_context
@handle_errors
def verify_cmd(ctx, config_path, output_format, output, **flags):
    cfg = load_run_config(config_path, flags, ctx.obj["settings"], for_verify=True)
    report = verify_family(cfg.params, cfg.family, cfg.k0, _z0(cfg), quad_tol=cfg.quad_tol, ode_tol=cfg.ode_tol)
    report = report.model_copy(update={"config_digest": config_digest(cfg.model_dump(mode="json"))})
    emit(to_json(report), output)
    if not report.passed:
        raise VerificationFailed(report.failed_checks(), report)


@cli.command("compare")
@run_options
@path_options
@click.option("--gaps-output", default=None, help="CSV file for the per-time gaps.")
@click.pass_context
@handle_errors
def compare_cmd(ctx, config_path, output_format, output, gaps_output, **flags):
    cfg = _load(ctx, config_path, flags)
    z0 = _z0(cfg)
    if z0 is None:
        z0 = 0.5 * steady_state(cfg.params).z_star
    result = compare_families(cfg.params, cfg.k0, z0, cfg.times(), tol=min(cfg.quad_tol, 1e-12))
    if gaps_output:
        header = list(result.per_time[0]) if result.per_time else ["t"]
        emit(csv_text(header, [list(row.values()) for row in result.per_time]), gaps_output)
    emit(to_json(result.model_dump(mode="json", exclude={"per_time"})), output)


@cli.command("sweep")
@click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="JSON sweep specification.")
@click.option("--output", "-o", default=None)
@click.pass_context
@handle_errors
def sweep_cmd(ctx, spec_path, output):
    settings = ctx.obj["settings"]
    raw = read_config_file(spec_path)
    try:
        spec = SweepSpec.model_validate(_sweep_fields(raw))
    except ValueError as e:
        raise ParameterError(f"invalid sweep specification: {e}") from e
    rows = run_sweep(spec, threads=settings.threads, cap=settings.sweep_cap)
    header = sweep_header(rows)
    emit(csv_text(header, [[row.get(h, "") for h in header] for row in rows]), output)


def _sweep_fields(raw: Dict[str, Any]) -> Dict[str, Any]:
    # config normalization lifts bare parameter keys into "params"; the sweep calls them "base"
    fields = dict(raw)
    if "params" in fields and "base" not in fields:
        fields["base"] = fields.pop("params")
    return fields


@cli.command("plotdata")
@run_options
@path_options
@click.option("--families", default="bgp,two-integral,one-integral",
              help="Comma-separated families to emit as separate series.")
@click.option("--variables", default="c,k,h,u")
@click.option("--growth", default="c,k,h,u", help="Variables to add growth-rate rows for.")
@click.pass_context
@handle_errors
def plotdata_cmd(ctx, config_path, output_format, output, families, variables, growth, **flags):
    cfg = _load(ctx, config_path, flags)
    z0 = _z0(cfg)
    if z0 is None:
        z0 = 0.5 * steady_state(cfg.params).z_star
    times = cfg.times()
    series = {}
    for raw_name in _split(families):
        name = _family_type(raw_name)
        fam = pin_family(cfg.params, Family(name), cfg.k0, z0, cfg.quad_tol, ctx.obj["settings"].constraint_slack)
        series[name] = fam.trajectory(times)
    rows = emit_plotdata(series, _split(variables), _split(growth))
    emit(plotdata_csv(rows), output)


def _split(value: str) -> List[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


# --------------------------
# Entry
# --------------------------

def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit code instead of exiting."""
    try:
        cli.main(args=list(argv) if argv is not None else None, prog_name="growthlab", standalone_mode=True)
    except SystemExit as e:
        if e.code is None:
            return 0
        return e.code if isinstance(e.code, int) else 1
    return 0
