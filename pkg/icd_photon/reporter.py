"""Rich console output: rate breakdown, fit summary and scan summary tables."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from .models import RateBreakdown, RateCoefficients, ScanResult
from .units import ANGSTROM, c2_to_ev_a2, c6_to_ev_a6, wavelength_from_omega


def _fmt(value: Optional[float], spec: str = ".6g") -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "—"
    return format(value, spec)


def _validity_style(ok: bool, quantitative: bool) -> str:
    if not ok:
        return "[bold red]⚠ u ≥ 1, outside validity[/bold red]"
    if not quantitative:
        return "[yellow]qualitative (0.5 ≤ u < 1)[/yellow]"
    return "[green]✓ perturbative[/green]"


def print_rate_report(breakdown: RateBreakdown, closed: Optional[RateBreakdown] = None,
                      console: Optional[Console] = None) -> None:
    """Breakdown table in s⁻¹ and eV, the u diagnostics and the closed-form cross-check."""
    console = console or Console()
    widths = breakdown.to_widths()

    table = Table(title=f"ICD rate ({breakdown.kind} tensor)")
    table.add_column("Term", style="bold cyan")
    table.add_column("Rate (1/s)", justify="right")
    table.add_column("Width (eV)", justify="right")
    for label, key in (("direct (α⁰)", "direct"), ("cross (α¹)", "cross"),
                       ("scattered (α²)", "scattered"), ("total", "total")):
        style = "bold" if key == "total" else None
        table.add_row(label, _fmt(breakdown.as_dict()[key]), _fmt(widths.as_dict()[key]),
                      style=style)
    console.print(table)

    console.print(f"  Ratio to two-body: {_fmt(breakdown.ratio, '.6f')}")
    console.print(f"  u_NR = {_fmt(breakdown.u_NR, '.4g')}   u_R = {_fmt(breakdown.u_R, '.4g')}")
    console.print(f"  Validity: {_validity_style(breakdown.perturbative_ok, breakdown.quantitative_ok)}")

    if closed is not None:
        rel = abs(closed.total - breakdown.total) / breakdown.total if breakdown.total else 0.0
        console.print(f"  Closed form ({closed.kind}): {_fmt(closed.to_widths().total)} eV "
                      f"(relative difference {rel:.1e})")
    console.print()


def print_fit_report(coeffs: RateCoefficients, input_path: str = "", rho_min_fit: float = 0.0,
                     omega_D: Optional[float] = None, console: Optional[Console] = None) -> None:
    """Fitted coefficients, the requested fit window and the fit quality."""
    console = console or Console()
    table = Table(title="Fitted two-body coefficient")
    table.add_column("Quantity", style="bold cyan")
    table.add_column("Value", justify="right")
    if input_path:
        table.add_row("input", input_path)
    table.add_row("requested ρ min (Å)", _fmt(rho_min_fit, ".4g"))
    if omega_D is not None:
        table.add_row("ω (rad/s)", _fmt(omega_D, ".6g"))
        table.add_row("λ (Å)", _fmt(wavelength_from_omega(omega_D) / ANGSTROM, ".6g"))
    else:
        table.add_row("ω", "not given")
    table.add_row("C6 (eV·Å⁶)", _fmt(c6_to_ev_a6(coeffs.C6)))
    table.add_row("C6 (m⁶/s)", _fmt(coeffs.C6))
    if coeffs.C2 is not None:
        table.add_row("C2 (eV·Å²)", _fmt(c2_to_ev_a2(coeffs.C2)))
    if coeffs.fit is not None:
        info = coeffs.fit
        table.add_row("rows used", str(info.n_rows))
        table.add_row("ρ range (Å)", f"{info.rho_min:.4g} – {info.rho_max:.4g}")
        table.add_row("residual RMS (eV)", _fmt(info.residual_rms_ev, ".3e"))
        table.add_row("relative RMS", _fmt(info.relative_rms, ".3%"))
    console.print(table)
    console.print()


def _print_parameters(metadata, console: Console) -> None:
    # metadata keys carry their unit suffix
    table = Table(title="Scan parameters", show_header=False, box=None, padding=(0, 2))
    for key, value in metadata.items():
        if key not in ("scan", "preset", "generated"):
            table.add_row(key, escape(str(value)))
    console.print(table)


def print_scan_summary(result: ScanResult, console: Optional[Console] = None) -> None:
    """Print summary statistics of a scan."""
    console = console or Console()
    total = len(result)
    console.print("[bold]Summary:[/bold]")
    console.print(f"  Scan:              {result.metadata.get('scan', '?')}")
    if "preset" in result.metadata:
        console.print(f"  Preset:            {result.metadata['preset']}")
    console.print(f"  Rows:              {total:>6}")
    _print_parameters(result.metadata, console)
    if total == 0:
        console.print()
        return

    skipped = 0
    if "skipped" in result.columns:
        skipped = int(result.column("skipped").astype(bool).sum())
        if skipped:
            console.print(f"  [yellow]Skipped (on an atom): {skipped:>3}[/yellow]")

    invalid = int((~result.column("perturbative_ok").astype(bool)).sum()) - skipped
    if invalid > 0:
        pct = invalid * 100 // total
        console.print(f"  [bold red]u ≥ 1:             {invalid:>6}  ({pct}%)[/bold red]")
    else:
        console.print("  u ≥ 1:                  0")

    ratio_col = next((c for c in ("ratio", "full_trace", "farfield_trace") if c in result.columns), None)
    if ratio_col is not None:
        values = result.column(ratio_col).astype(float)
        if np.isfinite(values).any():
            console.print(f"  {ratio_col} range:    "
                          f"{np.nanmin(values):.4g} – {np.nanmax(values):.4g}")
    console.print()


def print_warning(message: str, console: Optional[Console] = None) -> None:
    console = console or Console(stderr=True)
    console.print(f"[yellow]Warning:[/yellow] {message}")
