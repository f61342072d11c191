"""CLI entry point: single-point rates, scans and C6 fits."""

from __future__ import annotations

import dataclasses
import io
import json
import logging
import math
import sys
from typing import Optional

import click
from rich.console import Console
from rich.markup import escape

from . import __version__
from .config import KIND_CHOICES, RunConfig, default_output_path, load_config_file, parse_position
from .errors import ConfigError, IcdError, InputFormatError, UnitError, ValidationError
from .models import Position, RateBreakdown, SystemSpec
from .scans import DEFAULT_WAVELENGTH
from .units import (
    ANGSTROM,
    CONSTANTS,
    c2_from_ev_a2,
    c2_to_ev_a2,
    c6_from_ev_a6,
    c6_to_ev_a6,
    omega_from_wavelength,
    parse_quantity,
    polarizability_volume_to_a3,
    wavelength_from_omega,
)

logger = logging.getLogger("icd_photon")

EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_IO = 3

SCAN_MODES = ("distance", "mediator-1d", "mediator-2d")


# ---- Parameter types ----

class Quantity(click.ParamType):
    """A number in a default unit, or with an explicit unit suffix; converted to SI."""

    name = "quantity"

    def __init__(self, kind: str, default_unit: str) -> None:
        self.kind = kind
        self.default_unit = default_unit

    def convert(self, value, param, ctx):
        try:
            return parse_quantity(str(value), self.kind, self.default_unit)
        except UnitError as e:
            self.fail(str(e), param, ctx)


class PositionParam(click.ParamType):
    name = "x,y,z"

    def convert(self, value, param, ctx):
        if isinstance(value, Position):
            return value
        try:
            return parse_position(value)
        except ValidationError as e:
            self.fail(str(e), param, ctx)


# ---- Group with exit-code mapping ----

def _fail(error: Exception, code: int) -> None:
    Console(stderr=True).print(f"[red]Error:[/red] {escape(str(error))}")
    sys.exit(code)


class IcdGroup(click.Group):
    """Maps every exception a command can raise to its exit status."""

    def main(self, args=None, prog_name=None, complete_var=None, **extra):
        extra.pop("standalone_mode", None)
        try:
            rv = super().main(args=args, prog_name=prog_name, complete_var=complete_var,
                              standalone_mode=False, **extra)
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_USAGE)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except (ConfigError, UnitError) as e:
            _fail(e, EXIT_USAGE)
        except (InputFormatError, OSError) as e:
            _fail(e, EXIT_IO)
        except IcdError as e:
            _fail(e, EXIT_DOMAIN)
        sys.exit(rv or 0)


def _defaults_for(command: click.Command, values: dict) -> dict:
    """Config values this subcommand accepts; a choice it does not offer is left out."""
    params = {p.name: p for p in command.params}
    accepted = {}
    for key, value in values.items():
        param = params.get(key)
        if param is None:
            continue
        if isinstance(param.type, click.Choice) and str(value) not in param.type.choices:
            logger.debug("Config %s=%s does not apply to %s", key, value, command.name)
            continue
        accepted[key] = value
    return accepted


@click.group(cls=IcdGroup)
@click.option("--verbose", "-v", is_flag=True, help="Enable debug logging")
@click.option("--config", "config_path", type=click.Path(dir_okay=False),
              help="Config file: key=value lines, or YAML for .yaml/.yml")
@click.version_option(version=__version__, prog_name="icd-photon")
@click.pass_context
def main(ctx: click.Context, verbose: bool, config_path: Optional[str]) -> None:
    """Interatomic Coulombic decay rates with a polarisable mediator atom.

    Distances are in Å, energies in eV and polarisabilities in Å³ unless a
    unit suffix is given.
    """
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s: %(message)s",
    )
    if config_path:
        values = load_config_file(config_path)
        ctx.default_map = {name: _defaults_for(command, values)
                           for name, command in ctx.command.commands.items()}


# ---- Shared options ----

def _coupling_options(f):
    for option in reversed([
        click.option("--c6", type=float, help="Two-body coefficient C6 (eV·Å⁶)"),
        click.option("--c2", type=float, help="Far-field coefficient C2 (eV·Å²)"),
        click.option("--gamma-d", type=float, help="Donor radiative decay rate (1/s)"),
        click.option("--sigma-a", type=Quantity("area", "Mb"),
                     help="Acceptor photoionisation cross section (Mb)"),
    ]):
        f = option(f)
    return f


def _frequency_options(f):
    f = click.option("--omega", type=Quantity("frequency", "eV"),
                     help="Donor transition energy (eV)")(f)
    f = click.option("--wavelength", type=Quantity("length", "A"),
                     help="Donor transition wavelength (Å) [default: 480]")(f)
    return f


def _resolve_omega(wavelength: Optional[float], omega: Optional[float],
                   default: Optional[float] = omega_from_wavelength(DEFAULT_WAVELENGTH)) -> Optional[float]:
    if wavelength is not None and omega is not None:
        raise ConfigError("Give --wavelength or --omega, not both")
    if omega is not None:
        return omega
    if wavelength is not None:
        return omega_from_wavelength(wavelength)
    return default


def _coefficient(value: Optional[float], to_si) -> Optional[float]:
    return to_si(value) if value is not None else None


def _finite(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return value


def _write_or_echo(content: str, output: Optional[str], what: str, console: Console) -> None:
    from .emitter import write_atomic

    if output:
        write_atomic(output, content)
        console.print(f"[green]✓[/green] {what} written to: {output}")
    else:
        click.echo(content)


def _render(report, *args) -> str:
    buf = io.StringIO()
    report(*args, console=Console(file=buf, width=100))
    return buf.getvalue()


# ---- rate ----

def _rate_payload(config: RunConfig, system: SystemSpec, breakdown: RateBreakdown,
                  closed: Optional[RateBreakdown]) -> dict:
    coeffs = config.coefficients()
    omega = system.donor.omega_D
    payload = {
        "kind": breakdown.kind,
        "requested_kind": config.kind,
        "parameters": {
            "pos_d_A": list(system.r_D.to_angstrom()),
            "pos_a_A": list(system.r_A.to_angstrom()),
            "pos_m_A": list(system.mediator.position.to_angstrom()) if system.mediator else None,
            "alpha_A3": polarizability_volume_to_a3(config.alpha) if config.alpha is not None else None,
            "omega_rad_per_s": omega,
            "photon_energy_eV": omega * CONSTANTS.hbar_ev,
            "wavelength_A": wavelength_from_omega(omega) / ANGSTROM,
            "C6_eV_A6": c6_to_ev_a6(coeffs.C6),
            "C2_eV_A2": c2_to_ev_a2(coeffs.C2) if coeffs.C2 is not None else None,
            "coefficient_source": coeffs.source,
        },
        "rate_per_s": breakdown.as_dict(),
        "width_eV": breakdown.to_widths().as_dict(),
        "ratio": _finite(breakdown.ratio),
        "u": breakdown.u,
        "u_NR": breakdown.u_NR,
        "u_R": breakdown.u_R,
        "perturbative_ok": breakdown.perturbative_ok,
        "quantitative_ok": breakdown.quantitative_ok,
        "closed_form": None,
    }
    if closed is not None:
        payload["closed_form"] = {
            "kind": closed.kind,
            "width_eV": closed.to_widths().as_dict(),
            "relative_difference": (abs(closed.total - breakdown.total) / breakdown.total
                                    if breakdown.total else 0.0),
        }
    return payload


@main.command()
@click.option("--pos-d", type=PositionParam(), default="0,0,0", show_default=True,
              help="Donor position (Å)")
@click.option("--pos-a", type=PositionParam(), required=True, help="Acceptor position (Å)")
@click.option("--pos-m", type=PositionParam(), help="Mediator position (Å)")
@click.option("--alpha", type=Quantity("volume", "A3"),
              help="Mediator polarisability volume (Å³)")
@_coupling_options
@_frequency_options
@click.option("--kind", type=click.Choice(KIND_CHOICES), default="auto", show_default=True,
              help="Green's tensor: full, nonretarded, farfield, or picked from kρ")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
              show_default=True, help="Report format")
@click.option("--output", "-o", type=click.Path(dir_okay=False),
              help="Write the report to this file")
def rate(pos_d: Position, pos_a: Position, pos_m: Optional[Position], alpha: Optional[float],
         c6: Optional[float], c2: Optional[float], gamma_d: Optional[float],
         sigma_a: Optional[float], wavelength: Optional[float], omega: Optional[float],
         kind: str, fmt: str, output: Optional[str]) -> None:
    """ICD rate for one donor-acceptor pair, optionally with a mediator."""
    from .rates import closed_form_check, rate_trace
    from .reporter import print_rate_report, print_warning

    console = Console()
    config = RunConfig(
        command="rate",
        r_D=pos_d,
        r_A=pos_a,
        r_M=pos_m,
        alpha=alpha,
        c6=_coefficient(c6, c6_from_ev_a6),
        c2=_coefficient(c2, c2_from_ev_a2),
        gamma_D=gamma_d,
        sigma_A=sigma_a,
        omega_D=_resolve_omega(wavelength, omega),
        kind=kind,
        fmt=fmt,
        output=output,
    )
    system = config.build_system()
    tensor_kind = config.resolved_kind(system)
    breakdown = rate_trace(system, tensor_kind, warn=False)
    closed = closed_form_check(system, tensor_kind)

    if not breakdown.perturbative_ok:
        print_warning(f"mediator coupling u = {breakdown.u:.3g} >= 1; the result is outside "
                      "the range of the first-order treatment")

    if fmt == "json":
        content = json.dumps(_rate_payload(config, system, breakdown, closed),
                             indent=2, ensure_ascii=False)
        _write_or_echo(content, output, "Rate report", console)
    elif output:
        _write_or_echo(_render(print_rate_report, breakdown, closed), output, "Rate report", console)
    else:
        print_rate_report(breakdown, closed, console=console)


# ---- scan ----

def _require(value, flag: str, mode: str):
    if value is None:
        raise ConfigError(f"--{flag} is required for --mode {mode}")
    return value


@main.command()
@click.option("--figure", type=click.Choice(["3", "4-upper", "4-lower"]),
              help="Preset scan: 3 (distance), 4-upper (axis), 4-lower (plane)")
@click.option("--mode", type=click.Choice(SCAN_MODES), help="Scan to run without a preset")
@click.option("--pos-d", type=PositionParam(), default="0,0,0", show_default=True,
              help="Donor position (Å)")
@click.option("--pos-a", type=PositionParam(), help="Acceptor position (Å)")
@click.option("--alpha", type=Quantity("volume", "A3"),
              help="Mediator polarisability volume (Å³)")
@_coupling_options
@_frequency_options
@click.option("--kind", type=click.Choice(KIND_CHOICES), default="auto", show_default=True,
              help="Green's tensor for distance scans")
@click.option("--rho-min", type=Quantity("length", "A"), help="Smallest donor-acceptor distance (Å)")
@click.option("--rho-max", type=Quantity("length", "A"), help="Largest donor-acceptor distance (Å)")
@click.option("--points", type=click.IntRange(min=2), default=41, show_default=True,
              help="Grid points along the distance or the donor-acceptor axis")
@click.option("--axis-min", type=Quantity("length", "A"),
              help="Mediator axis start, measured from the donor (Å)")
@click.option("--axis-max", type=Quantity("length", "A"), help="Mediator axis end (Å)")
@click.option("--x-min", type=Quantity("length", "A"), help="Transverse start (Å, 2D scans)")
@click.option("--x-max", type=Quantity("length", "A"), help="Transverse end (Å, 2D scans)")
@click.option("--x-points", type=click.IntRange(min=2), default=41, show_default=True,
              help="Transverse grid points (2D scans)")
@click.option("--no-full", is_flag=True, help="Skip the full-tensor column of mediator scans")
@click.option("--format", "fmt", type=click.Choice(["csv", "json", "yaml"]), default="csv",
              show_default=True, help="Output format")
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Output file path")
@click.option("--output-dir", envvar="ICD_PHOTON_OUTPUT_DIR", type=click.Path(file_okay=False),
              help="Directory for the default output file (env: ICD_PHOTON_OUTPUT_DIR)")
def scan(figure: Optional[str], mode: Optional[str], pos_d: Position, pos_a: Optional[Position],
         alpha: Optional[float], c6: Optional[float], c2: Optional[float],
         gamma_d: Optional[float], sigma_a: Optional[float], wavelength: Optional[float],
         omega: Optional[float], kind: str, rho_min: Optional[float], rho_max: Optional[float],
         points: int, axis_min: Optional[float], axis_max: Optional[float],
         x_min: Optional[float], x_max: Optional[float], x_points: int, no_full: bool,
         fmt: str, output: Optional[str], output_dir: Optional[str]) -> None:
    """Tabulate rates over a distance or mediator-position grid."""
    from .emitter import EMITTERS, write_atomic
    from .rates import select_kind
    from .reporter import print_scan_summary
    from .scans import (
        PRESETS,
        scan_distance_midpoint,
        scan_mediator_1d,
        scan_mediator_2d,
    )

    if (figure is None) == (mode is None):
        raise ConfigError("Give exactly one of --figure or --mode")

    console = Console()
    omega_D = _resolve_omega(wavelength, omega)

    if figure == "3":
        result = PRESETS[figure]()
    elif figure is not None:
        result = PRESETS[figure](wavelength_from_omega(omega_D))
    elif mode == "distance":
        lo, hi = _require(rho_min, "rho-min", mode), _require(rho_max, "rho-max", mode)
        config = RunConfig(
            command="scan",
            r_D=Position(0.0, 0.0, 0.0),
            r_A=Position(0.0, 0.0, hi),
            c6=_coefficient(c6, c6_from_ev_a6),
            c2=_coefficient(c2, c2_from_ev_a2),
            gamma_D=gamma_d,
            sigma_A=sigma_a,
            omega_D=omega_D,
            kind=kind,
        )
        if kind == "auto":
            k = omega_D / CONSTANTS.c
            # the midpoint mediator sits at half the smallest distance
            kind = select_kind(k * hi, k * lo / 2.0)
            logger.info("Tensor kind 'auto' resolved to '%s'", kind)
        result = scan_distance_midpoint((lo, hi), points, config.coefficients().C6,
                                        _require(alpha, "alpha", mode), kind, omega_D)
    else:
        r_A = _require(pos_a, "pos-a", mode)
        axis = (_require(axis_min, "axis-min", mode), _require(axis_max, "axis-max", mode))
        if mode == "mediator-1d":
            result = scan_mediator_1d(pos_d.to_array(), r_A.to_array(), axis, points,
                                      _require(alpha, "alpha", mode), omega_D,
                                      include_full=not no_full)
        else:
            transverse = (_require(x_min, "x-min", mode), _require(x_max, "x-max", mode))
            result = scan_mediator_2d(pos_d.to_array(), r_A.to_array(), transverse, axis,
                                      (x_points, points), _require(alpha, "alpha", mode),
                                      omega_D, include_full=not no_full)

    name = f"figure-{figure}" if figure else mode
    path = output or default_output_path(name, fmt, output_dir)
    write_atomic(path, EMITTERS[fmt](result))
    console.print(f"[green]✓[/green] Wrote {len(result)} rows to: {path}")
    print_scan_summary(result, console=console)


# ---- fit ----

@main.command()
@click.option("--input", "input_path", type=click.Path(dir_okay=False), required=True,
              help="CSV with header rho_AA,width_eV")
@click.option("--rho-min", type=Quantity("length", "A"), default="0", show_default=True,
              help="Fit only rows at or beyond this distance (Å)")
@_frequency_options
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
              show_default=True, help="Report format")
@click.option("--output", "-o", type=click.Path(dir_okay=False),
              help="Write the report to this file")
def fit(input_path: str, rho_min: float, wavelength: Optional[float], omega: Optional[float],
        fmt: str, output: Optional[str]) -> None:
    """Fit the two-body C6 to external decay widths."""
    from .emitter import read_width_dataset
    from .fitting import fit_c6
    from .reporter import print_fit_report

    console = Console()
    data = read_width_dataset(input_path)
    console.print(f"[green]✓[/green] Read {len(data)} rows from: {input_path}")
    omega_D = _resolve_omega(wavelength, omega, default=None)
    rho_min_fit = rho_min / ANGSTROM
    coeffs = fit_c6(data, rho_min_fit=rho_min_fit, omega_D=omega_D)

    if fmt == "json":
        payload = {
            "input": input_path,
            "rho_min_fit_A": rho_min_fit,
            "omega_rad_per_s": omega_D,
            "C6_eV_A6": c6_to_ev_a6(coeffs.C6),
            "C6_m6_per_s": coeffs.C6,
            "C2_eV_A2": c2_to_ev_a2(coeffs.C2) if coeffs.C2 is not None else None,
            "source": coeffs.source,
            "fit": dataclasses.asdict(coeffs.fit),
        }
        _write_or_echo(json.dumps(payload, indent=2, ensure_ascii=False), output,
                       "Fit report", console)
    elif output:
        report = _render(print_fit_report, coeffs, input_path, rho_min_fit, omega_D)
        _write_or_echo(report, output, "Fit report", console)
    else:
        print_fit_report(coeffs, input_path, rho_min_fit, omega_D, console=console)


if __name__ == "__main__":
    main()
