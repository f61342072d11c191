"""Parameter scans: distance scans with a midpoint mediator, 1D and 2D mediator-position maps, figure presets.

Scan functions take SI inputs and tabulate in the I/O units (Å, eV).
Every parameter needed to regenerate a scan is stored in its metadata
with full float precision, so replay_scan() reproduces it exactly.
"""

from __future__ import annotations

import logging
import math
from datetime import datetime, timezone
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import ValidationError
from .geometry import as_vector, derive_geometry, separation
from .models import (
    AcceptorSpec,
    DonorSpec,
    MediatorSpec,
    Position,
    ScanResult,
    SystemSpec,
)
from .rates import (
    c2_from_c6,
    rate_nr_collinear,
    rate_r_collinear,
    rate_trace,
)
from .units import (
    ANGSTROM,
    c6_from_ev_a6,
    c6_to_ev_a6,
    omega_from_wavelength,
    polarizability_volume_from_a3,
    rate_to_width_ev,
    wavelength_from_omega,
)

logger = logging.getLogger(__name__)

DEFAULT_WAVELENGTH = 480 * ANGSTROM  # Ne⁺ 2s⁻¹ → 2p⁻¹
EXCLUSION_FRACTION = 1e-3

DISTANCE_COLUMNS = ["rho_AD_A", "two_body_eV", "three_body_eV", "trace_eV",
                    "ratio", "u", "perturbative_ok"]
MEDIATOR_1D_COLUMNS = ["z_A", "z_over_lambda", "farfield_closed", "farfield_trace",
                       "full_trace", "u_R", "u_NR", "perturbative_ok", "skipped"]
MEDIATOR_2D_COLUMNS = ["x_A", "z_A", "farfield_trace", "full_trace",
                       "u_R", "u_NR", "perturbative_ok", "skipped"]


# ---- Metadata helpers ----

def _num(value: float) -> str:
    return repr(float(value))


def _vec(vec) -> str:
    return ",".join(_num(v) for v in vec)


def _parse_vec(text: str) -> np.ndarray:
    return np.array([float(v) for v in text.split(",")])


def _metadata(scan: str, **params: str) -> Dict[str, str]:
    meta = {"scan": scan}
    meta.update(params)
    meta["generated"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return meta


def _grid(value_range: Tuple[float, float], n_points: int, what: str) -> np.ndarray:
    lo, hi = value_range
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise ValidationError(f"Empty {what} range [{lo}, {hi}]")
    if n_points < 2:
        raise ValidationError(f"A {what} grid needs at least 2 points, got {n_points}")
    return np.linspace(lo, hi, n_points)


def _log_validity(result: ScanResult) -> None:
    ok = result.column("perturbative_ok")
    if "skipped" in result.columns:
        skipped = result.column("skipped").astype(bool)
        if skipped.any():
            logger.warning("%d grid points lie on an atom and were skipped", int(skipped.sum()))
        invalid = int((~ok.astype(bool) & ~skipped).sum())
    else:
        invalid = int((~ok.astype(bool)).sum())
    if invalid:
        logger.warning("%d of %d rows have mediator coupling u >= 1", invalid, len(result))


# ---- Distance scan ----

def scan_distance_midpoint(rho_range: Tuple[float, float], n_points: int, C6: float,
                           alpha: float, tensor_kind: str = "nonretarded",
                           omega_D: Optional[float] = None) -> ScanResult:
    """Rate versus donor-acceptor distance with the mediator pinned at the midpoint.

    Distances in m, C6 in m⁶/s, alpha in m³. Non-retarded scans report the
    collinear closed form next to the trace formula; far-field scans the
    retarded collinear form; full scans only the trace.
    """
    grid = _grid(rho_range, n_points, "distance")
    if grid[0] <= 0:
        raise ValidationError("Donor-acceptor distances must be positive")
    omega = omega_D if omega_D is not None else omega_from_wavelength(DEFAULT_WAVELENGTH)
    C2 = c2_from_c6(C6, omega)
    origin = Position(0.0, 0.0, 0.0)

    result = ScanResult(
        columns=list(DISTANCE_COLUMNS),
        metadata=_metadata(
            "distance-midpoint",
            kind=tensor_kind,
            rho_min_m=_num(grid[0]),
            rho_max_m=_num(grid[-1]),
            n_points=str(n_points),
            C6_m6_per_s=_num(C6),
            C6_eV_A6=_num(c6_to_ev_a6(C6)),
            alpha_m3=_num(alpha),
            omega_rad_per_s=_num(omega),
            units="rho_AD_A=Å;rates=eV;ratio=trace/two-body",
        ),
    )

    for rho in grid:
        mediator = MediatorSpec(Position(0.0, 0.0, rho / 2.0), alpha)
        system = SystemSpec.from_coefficients(omega, origin, Position(0.0, 0.0, rho),
                                              mediator, c6=C6)
        trace = rate_trace(system, tensor_kind, warn=False)

        if tensor_kind == "nonretarded":
            two_body = C6 / rho ** 6
            closed = rate_nr_collinear(rho, rho / 2.0, rho / 2.0, C6, alpha, True).total
        elif tensor_kind == "farfield":
            two_body = C2 / rho ** 2
            closed = rate_r_collinear(rho, rho / 2.0, rho / 2.0, C2, alpha, omega, math.pi).total
        else:
            two_body = trace.direct_term
            closed = math.nan

        result.rows.append((
            rho / ANGSTROM,
            rate_to_width_ev(two_body),
            rate_to_width_ev(closed),
            rate_to_width_ev(trace.total),
            trace.ratio,
            trace.u,
            bool(trace.perturbative_ok),
        ))

    _log_validity(result)
    return result


# ---- Mediator position scans ----

def _unit_system(r_D: np.ndarray, r_A: np.ndarray, omega: float,
                 mediator: Optional[MediatorSpec] = None) -> SystemSpec:
    """A system with γ_D·σ_A = 1; normalised rates do not depend on it."""
    return SystemSpec(DonorSpec(1.0, omega), AcceptorSpec(1.0),
                      Position.from_array(r_D), Position.from_array(r_A), mediator)


def _too_close(r_M: np.ndarray, r_D: np.ndarray, r_A: np.ndarray, radius: float) -> bool:
    return (float(np.linalg.norm(r_M - r_D)) < radius
            or float(np.linalg.norm(r_M - r_A)) < radius)


def _transverse_axis(axis: np.ndarray, transverse) -> np.ndarray:
    """Unit vector perpendicular to axis, spanning the scan plane with it."""
    if transverse is None:
        # basis vector least aligned with the axis
        transverse = np.eye(3)[int(np.argmin(np.abs(axis)))]
    t = as_vector(transverse)
    t = t - np.dot(t, axis) * axis
    norm = float(np.linalg.norm(t))
    if norm < 1e-12:
        raise ValidationError("The scan plane vector is parallel to the donor-acceptor axis")
    return t / norm


def _mediator_row(r_D: np.ndarray, r_A: np.ndarray, r_M: np.ndarray, alpha: float,
                  omega: float, include_full: bool,
                  bases: Dict[str, float]) -> Tuple[float, float, float, float, bool]:
    """Normalised far-field and full trace rates plus (u_R, u_NR, ok) at one mediator point."""
    mediator = MediatorSpec(Position.from_array(r_M), alpha)
    system = _unit_system(r_D, r_A, omega, mediator)
    farfield = rate_trace(system, "farfield", warn=False)
    full = rate_trace(system, "full", warn=False).total / bases["full"] if include_full else math.nan
    ok = max(farfield.u_NR, farfield.u_R) < 1.0
    return (farfield.total / bases["farfield"], full, farfield.u_R, farfield.u_NR, bool(ok))


def _two_body_bases(r_D: np.ndarray, r_A: np.ndarray, omega: float,
                    include_full: bool) -> Dict[str, float]:
    base = _unit_system(r_D, r_A, omega)
    bases = {"farfield": rate_trace(base, "farfield", include_mediator=False).total}
    if include_full:
        bases["full"] = rate_trace(base, "full", include_mediator=False).total
    return bases


def scan_mediator_1d(r_D, r_A, axis_range: Tuple[float, float], n_points: int,
                     alpha: float, omega_D: float, include_full: bool = True,
                     exclusion_fraction: float = EXCLUSION_FRACTION) -> ScanResult:
    """Normalised rate as the mediator moves along the donor-acceptor line.

    axis_range is measured in m from the donor towards the acceptor and may
    extend past either atom. Columns: far-field closed form, far-field and
    full trace formula (each over its own two-body rate), u_R, u_NR.
    Grid points within exclusion_fraction·ρ_AD of an atom are kept as
    skipped rows of NaN.
    """
    d, a = as_vector(r_D), as_vector(r_A)
    rho_AD, axis = separation(a, d)
    grid = _grid(axis_range, n_points, "mediator axis")
    wavelength = wavelength_from_omega(omega_D)
    radius = exclusion_fraction * rho_AD
    bases = _two_body_bases(d, a, omega_D, include_full)

    result = ScanResult(
        columns=list(MEDIATOR_1D_COLUMNS),
        metadata=_metadata(
            "mediator-1d",
            r_D_m=_vec(d),
            r_A_m=_vec(a),
            axis_min_m=_num(grid[0]),
            axis_max_m=_num(grid[-1]),
            n_points=str(n_points),
            alpha_m3=_num(alpha),
            omega_rad_per_s=_num(omega_D),
            wavelength_A=_num(wavelength / ANGSTROM),
            include_full=str(include_full).lower(),
            exclusion_fraction=_num(exclusion_fraction),
            units="z_A=Å from donor along the axis;rates normalised to two-body",
        ),
    )

    for s in grid:
        r_M = d + s * axis
        position = (s / ANGSTROM, s / wavelength)
        if _too_close(r_M, d, a, radius):
            result.rows.append(position + (math.nan,) * 5 + (False, True))
            continue

        geom = derive_geometry(d, a, r_M)
        theta = math.pi if geom.mediator_between else 0.0
        closed = rate_r_collinear(rho_AD, geom.rho_MA, geom.rho_DM, 1.0, alpha,
                                  omega_D, theta).total * rho_AD ** 2
        farfield, full, u_R, u_NR, ok = _mediator_row(d, a, r_M, alpha, omega_D,
                                                      include_full, bases)
        result.rows.append(position + (closed, farfield, full, u_R, u_NR, ok, False))

    _log_validity(result)
    return result


def scan_mediator_2d(r_D, r_A, x_range: Tuple[float, float], z_range: Tuple[float, float],
                     grid: Tuple[int, int], alpha: float, omega_D: float,
                     transverse=None, include_full: bool = True,
                     exclusion_fraction: float = EXCLUSION_FRACTION) -> ScanResult:
    """Normalised rate over a plane containing the donor-acceptor axis.

    z runs along the axis from the donor, x along `transverse` (made
    perpendicular to the axis). Uses the trace formula with general
    mediator positions; rows run over x (outer) then z (inner).
    """
    d, a = as_vector(r_D), as_vector(r_A)
    rho_AD, axis = separation(a, d)
    t = _transverse_axis(axis, transverse)
    nx, nz = grid
    xs = _grid(x_range, nx, "transverse")
    zs = _grid(z_range, nz, "axial")
    radius = exclusion_fraction * rho_AD
    bases = _two_body_bases(d, a, omega_D, include_full)

    result = ScanResult(
        columns=list(MEDIATOR_2D_COLUMNS),
        metadata=_metadata(
            "mediator-2d",
            r_D_m=_vec(d),
            r_A_m=_vec(a),
            transverse="auto" if transverse is None else _vec(as_vector(transverse)),
            x_min_m=_num(xs[0]),
            x_max_m=_num(xs[-1]),
            nx=str(nx),
            z_min_m=_num(zs[0]),
            z_max_m=_num(zs[-1]),
            nz=str(nz),
            alpha_m3=_num(alpha),
            omega_rad_per_s=_num(omega_D),
            wavelength_A=_num(wavelength_from_omega(omega_D) / ANGSTROM),
            include_full=str(include_full).lower(),
            exclusion_fraction=_num(exclusion_fraction),
            units="x_A,z_A=Å from donor;rates normalised to two-body",
        ),
    )

    for x in xs:
        for z in zs:
            r_M = d + z * axis + x * t
            position = (x / ANGSTROM, z / ANGSTROM)
            if _too_close(r_M, d, a, radius):
                result.rows.append(position + (math.nan,) * 4 + (False, True))
                continue
            farfield, full, u_R, u_NR, ok = _mediator_row(d, a, r_M, alpha, omega_D,
                                                          include_full, bases)
            result.rows.append(position + (farfield, full, u_R, u_NR, ok, False))

    _log_validity(result)
    return result


def validity_boundary(result: ScanResult) -> np.ndarray:
    """Points (x_A, z_A) where u_R crosses 1 between neighbouring cells of a 2D scan.

    Crossings are located by linear interpolation in log u_R; skipped cells
    break the contour.
    """
    if result.metadata.get("scan") != "mediator-2d":
        raise ValidationError("validity_boundary needs a mediator-2d scan")
    nx, nz = int(result.metadata["nx"]), int(result.metadata["nz"])
    x = result.column("x_A").reshape(nx, nz)
    z = result.column("z_A").reshape(nx, nz)
    with np.errstate(invalid="ignore", divide="ignore"):
        log_u = np.log(result.column("u_R").astype(float)).reshape(nx, nz)

    points = []
    for axis in (0, 1):
        lo = [slice(None), slice(None)]
        hi = [slice(None), slice(None)]
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        l1, l2 = log_u[tuple(lo)], log_u[tuple(hi)]
        crossing = np.isfinite(l1) & np.isfinite(l2) & (np.sign(l1) != np.sign(l2))
        frac = np.where(crossing, -l1 / np.where(crossing, l2 - l1, 1.0), 0.0)
        px = x[tuple(lo)] + frac * (x[tuple(hi)] - x[tuple(lo)])
        pz = z[tuple(lo)] + frac * (z[tuple(hi)] - z[tuple(lo)])
        points.extend(zip(px[crossing], pz[crossing]))

    if not points:
        return np.empty((0, 2))
    return np.array(sorted(points))


# ---- Presets ----

def figure3_preset() -> ScanResult:
    """Ne-He-Ne midpoint scan: C6 = 3.6 eV·Å⁶, α = 0.205 Å³, 7-11 Å."""
    result = scan_distance_midpoint(
        (7.0 * ANGSTROM, 11.0 * ANGSTROM), 41,
        C6=c6_from_ev_a6(3.6),
        alpha=polarizability_volume_from_a3(0.205),
        tensor_kind="nonretarded",
    )
    result.metadata["preset"] = "figure-3"
    return result


def _figure4_setup(wavelength: float) -> Tuple[np.ndarray, np.ndarray, float, float]:
    r_D = np.zeros(3)
    r_A = np.array([0.0, 0.0, 3.0 * wavelength])
    return r_D, r_A, (wavelength / 4.0) ** 3, omega_from_wavelength(wavelength)


def figure4_upper_preset(wavelength: float = DEFAULT_WAVELENGTH) -> ScanResult:
    """Mediator on the z axis; acceptor at 3λ_D, α = (λ_D/4)³, -2λ_D to 6λ_D."""
    r_D, r_A, alpha, omega = _figure4_setup(wavelength)
    result = scan_mediator_1d(r_D, r_A, (-2.0 * wavelength, 6.0 * wavelength), 801,
                              alpha, omega)
    result.metadata["preset"] = "figure-4-upper"
    return result


def figure4_lower_preset(wavelength: float = DEFAULT_WAVELENGTH) -> ScanResult:
    """Same atoms as the upper preset, mediator over the (x, z) plane."""
    r_D, r_A, alpha, omega = _figure4_setup(wavelength)
    result = scan_mediator_2d(r_D, r_A, (-2.0 * wavelength, 2.0 * wavelength),
                              (-2.0 * wavelength, 5.0 * wavelength), (41, 71),
                              alpha, omega, transverse=(1.0, 0.0, 0.0))
    result.metadata["preset"] = "figure-4-lower"
    return result


PRESETS = {
    "3": figure3_preset,
    "4-upper": figure4_upper_preset,
    "4-lower": figure4_lower_preset,
}


# ---- Replay ----

def replay_scan(metadata: Dict[str, str]) -> ScanResult:
    """Regenerate a scan from the metadata it was emitted with."""
    scan = metadata.get("scan")
    if scan == "distance-midpoint":
        return scan_distance_midpoint(
            (float(metadata["rho_min_m"]), float(metadata["rho_max_m"])),
            int(metadata["n_points"]),
            C6=float(metadata["C6_m6_per_s"]),
            alpha=float(metadata["alpha_m3"]),
            tensor_kind=metadata["kind"],
            omega_D=float(metadata["omega_rad_per_s"]),
        )
    if scan == "mediator-1d":
        return scan_mediator_1d(
            _parse_vec(metadata["r_D_m"]), _parse_vec(metadata["r_A_m"]),
            (float(metadata["axis_min_m"]), float(metadata["axis_max_m"])),
            int(metadata["n_points"]),
            alpha=float(metadata["alpha_m3"]),
            omega_D=float(metadata["omega_rad_per_s"]),
            include_full=metadata["include_full"] == "true",
            exclusion_fraction=float(metadata["exclusion_fraction"]),
        )
    if scan == "mediator-2d":
        return scan_mediator_2d(
            _parse_vec(metadata["r_D_m"]), _parse_vec(metadata["r_A_m"]),
            (float(metadata["x_min_m"]), float(metadata["x_max_m"])),
            (float(metadata["z_min_m"]), float(metadata["z_max_m"])),
            (int(metadata["nx"]), int(metadata["nz"])),
            alpha=float(metadata["alpha_m3"]),
            omega_D=float(metadata["omega_rad_per_s"]),
            transverse=None if metadata["transverse"] == "auto" else _parse_vec(metadata["transverse"]),
            include_full=metadata["include_full"] == "true",
            exclusion_fraction=float(metadata["exclusion_fraction"]),
        )
    raise ValidationError(f"Cannot replay scan of unknown kind '{scan}'")

