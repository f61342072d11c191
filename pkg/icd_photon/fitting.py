"""Least-squares extraction of the two-body C6 from external decay widths."""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np
from scipy import linalg

from .errors import FitError
from .models import FitInfo, RateCoefficients, ScanResult, WidthDataset
from .rates import c2_from_c6
from .units import c6_from_ev_a6

logger = logging.getLogger(__name__)

ESTIMATOR = "linear-through-origin-rho^-6"


def fit_c6(data: WidthDataset, rho_min_fit: float = 0.0,
           omega_D: Optional[float] = None) -> RateCoefficients:
    """Fit width = C6/ρ⁶ through the origin on the rows with ρ >= rho_min_fit (Å).

    The model is linear in ρ⁻⁶, so this is a one-parameter linear least
    squares. The returned C6 is in m⁶/s; C2 is filled in only when the
    donor frequency omega_D is known.
    """
    mask = data.rho >= rho_min_fit
    n_rows = int(mask.sum())
    if n_rows < 2:
        raise FitError(f"Need at least 2 rows with rho >= {rho_min_fit} Å to fit C6, "
                       f"found {n_rows}")

    rho = data.rho[mask]
    width = data.width[mask]
    design = (rho ** -6.0)[:, np.newaxis]
    solution, _, _, _ = linalg.lstsq(design, width)
    c6_ev_a6 = float(solution[0])
    if c6_ev_a6 < 0:
        raise FitError(f"Fitted C6 is negative ({c6_ev_a6:.4g} eV·Å⁶)")

    residual = width - c6_ev_a6 * design[:, 0]
    info = FitInfo(
        rho_min=float(rho[0]),
        rho_max=float(rho[-1]),
        n_rows=n_rows,
        residual_rms_ev=float(np.sqrt(np.mean(residual ** 2))),
        relative_rms=float(np.sqrt(np.mean((residual / width) ** 2))),
        estimator=ESTIMATOR,
    )
    logger.info("Fitted C6 = %.6g eV·Å⁶ on %d rows (%.3g-%.3g Å), relative RMS %.2e",
                c6_ev_a6, n_rows, info.rho_min, info.rho_max, info.relative_rms)

    C6 = c6_from_ev_a6(c6_ev_a6)
    return RateCoefficients(
        C6=C6,
        C2=c2_from_c6(C6, omega_D) if omega_D is not None else None,
        source="fitted",
        fit=info,
    )


def width_dataset_from_scan(result: ScanResult, column: str = "two_body_eV",
                            source: str = "") -> WidthDataset:
    """Turn a distance scan column into a WidthDataset for refitting."""
    if result.metadata.get("scan") != "distance-midpoint":
        raise FitError("Only distance scans carry widths versus distance")
    return WidthDataset(
        rho=result.column("rho_AD_A").astype(float),
        width=result.column(column).astype(float),
        source=source or f"scan:{column}",
    )
