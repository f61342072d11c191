"""ICD rate engine: the trace formula for any Green's tensor kind and the closed forms.

Rates are in 1/s and coefficients in SI (C6 in m⁶/s, C2 in m²/s, α as a
polarisability volume in m³). The closed forms accept any consistent unit
system, which the scans use to work directly in Å and eV.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from .errors import CollinearityError, ValidationError
from .geometry import derive_geometry
from .greens import greens_tensor, scattered_term
from .models import (
    TENSOR_KINDS,
    AcceptorSpec,
    DonorSpec,
    RateBreakdown,
    RateCoefficients,
    SystemSpec,
    TriangleGeometry,
)
from .units import CONSTANTS

logger = logging.getLogger(__name__)

COLLINEAR_RTOL = 1e-9

# kρ thresholds of the `auto` kind selection
NONRETARDED_MAX_KRHO = 0.1
FARFIELD_MIN_KRHO = 10.0


# ---- Coupling strengths ----

def u_nonretarded(geom: TriangleGeometry, alpha: float) -> float:
    """u_NR = α·ρ³_AD / (ρ³_DM·ρ³_MA)."""
    return alpha * geom.rho_AD ** 3 / (geom.rho_DM ** 3 * geom.rho_MA ** 3)


def u_retarded(geom: TriangleGeometry, alpha: float, omega: float) -> float:
    """u_R = α·(ω/c)²·ρ_AD / (ρ_MA·ρ_DM)."""
    k = omega / CONSTANTS.c
    return alpha * k ** 2 * geom.rho_AD / (geom.rho_MA * geom.rho_DM)


def collinear_factor(u: float) -> float:
    """Mediator-between enhancement 1 + 2u + 3u², from the general triangle rate."""
    return 1.0 + 2.0 * u + 3.0 * u ** 2


def printed_collinear_factor(u: float) -> float:
    """The misprinted variant 1 + 2u/3 + u² of the collinear factor.

    It disagrees with the general triangle rate and the trace formula.
    """
    return 1.0 + 2.0 / 3.0 * u + u ** 2


# ---- Trace formula ----

def rate_trace(system: SystemSpec, tensor_kind: str = "full",
               include_mediator: bool = True, warn: bool = True) -> RateBreakdown:
    """Γ = 2π²·γ_D·σ_A·Tr[G(r_A, r_D, ω_D)·G*(r_D, r_A, ω_D)], split by powers of α.

    G is the vacuum tensor of tensor_kind plus, when a mediator is present
    and include_mediator is set, its first-order Born correction. A result
    outside perturbative validity is logged (unless warn is False), never
    raised.
    """
    if tensor_kind not in TENSOR_KINDS:
        raise ValidationError(f"Unknown tensor kind '{tensor_kind}'")

    omega = system.donor.omega_D
    r_D = system.r_D.to_array()
    r_A = system.r_A.to_array()
    prefactor = 2.0 * math.pi ** 2 * system.coupling

    forward = greens_tensor(r_A, r_D, omega, tensor_kind)
    backward = greens_tensor(r_D, r_A, omega, tensor_kind)
    direct = prefactor * np.trace(forward @ backward.conj()).real

    mediator = system.mediator if include_mediator else None
    if mediator is None:
        return RateBreakdown.from_terms(direct, 0.0, 0.0, 0.0, 0.0, tensor_kind)

    geom = derive_geometry(r_D, r_A, mediator.position)
    s_forward = scattered_term(r_A, r_D, omega, mediator, tensor_kind)
    s_backward = scattered_term(r_D, r_A, omega, mediator, tensor_kind)

    cross = prefactor * (np.trace(forward @ s_backward.conj())
                         + np.trace(s_forward @ backward.conj())).real
    scattered = prefactor * np.trace(s_forward @ s_backward.conj()).real

    breakdown = RateBreakdown.from_terms(
        direct, cross, scattered,
        u_NR=u_nonretarded(geom, mediator.alpha),
        u_R=u_retarded(geom, mediator.alpha, omega),
        kind=tensor_kind,
    )
    if warn and not breakdown.perturbative_ok:
        logger.warning("Mediator coupling u = %.3g >= 1; the first-order Born "
                       "result is outside its range of validity", breakdown.u)
    return breakdown


def rate_two_body(system: SystemSpec, tensor_kind: str = "full") -> RateBreakdown:
    return rate_trace(system, tensor_kind, include_mediator=False)


# ---- Closed forms ----

def rate_nr_general(geom: TriangleGeometry, C6: float, alpha: float) -> RateBreakdown:
    """Non-retarded three-body rate for an arbitrary triangle."""
    direct = C6 / geom.rho_AD ** 6
    scattered = C6 * 1.5 * alpha ** 2 * (1.0 + math.cos(geom.theta_AD) ** 2) / (
        geom.rho_DM ** 6 * geom.rho_MA ** 6)
    triple = math.cos(geom.theta_DM) * math.cos(geom.theta_MA) * math.cos(geom.theta_AD)
    cross = -C6 * alpha * (1.0 + 3.0 * triple) / (
        geom.rho_AD ** 3 * geom.rho_DM ** 3 * geom.rho_MA ** 3)
    return RateBreakdown.from_terms(direct, cross, scattered,
                                    u_NR=u_nonretarded(geom, alpha), u_R=None,
                                    kind="nonretarded")


def _check_collinear(rho_AD: float, rho_DM: float, rho_MA: float, between: bool) -> None:
    if between:
        gap = abs(rho_DM + rho_MA - rho_AD)
    else:
        gap = abs(abs(rho_DM - rho_MA) - rho_AD)
    if gap > COLLINEAR_RTOL * rho_AD:
        where = "between donor and acceptor" if between else "outside the donor-acceptor segment"
        raise CollinearityError(
            f"Distances AD={rho_AD:.6g}, DM={rho_DM:.6g}, MA={rho_MA:.6g} do not place "
            f"the mediator on the line {where}")


def rate_nr_collinear(rho_AD: float, rho_DM: float, rho_MA: float, C6: float,
                      alpha: float, mediator_between: bool = True) -> RateBreakdown:
    """Non-retarded rate with all three atoms on a line.

    With the mediator between donor and acceptor the rate is
    (C6/ρ⁶_AD)·(1 + 2u + 3u²); outside it, the general triangle rate with
    the angles of the straight arrangement.
    """
    _check_collinear(rho_AD, rho_DM, rho_MA, mediator_between)

    if mediator_between:
        u = alpha * rho_AD ** 3 / (rho_DM ** 3 * rho_MA ** 3)
        base = C6 / rho_AD ** 6
        return RateBreakdown.from_terms(base, 2.0 * u * base, 3.0 * u ** 2 * base,
                                        u_NR=u, u_R=None, kind="nonretarded")

    acceptor_nearer = rho_MA < rho_DM
    geom = TriangleGeometry(
        rho_AD=rho_AD,
        rho_DM=rho_DM,
        rho_MA=rho_MA,
        theta_AD=0.0,
        theta_DM=math.pi if acceptor_nearer else 0.0,
        theta_MA=0.0 if acceptor_nearer else math.pi,
        collinear=True,
        mediator_between=False,
        mediator_side="beyond-acceptor" if acceptor_nearer else "beyond-donor",
    )
    return rate_nr_general(geom, C6, alpha)


def rate_r_collinear(rho_AD: float, rho_AM: float, rho_DM: float, C2: float,
                     alpha: float, omega_D: float, theta_AD: float) -> RateBreakdown:
    """Far-field rate with all three atoms on a line.

    Γ = (C2/ρ²_AD)·[1 + u_R² + 2u_R·X], X = 1 for the mediator between the
    atoms (θ_AD = π) and X = cos(2ω_D·ρ/c) outside (θ_AD = 0), ρ being the
    distance from the mediator to the nearer atom.
    """
    if math.isclose(theta_AD, math.pi, abs_tol=1e-9):
        between = True
    elif math.isclose(theta_AD, 0.0, abs_tol=1e-9):
        between = False
    else:
        raise CollinearityError(f"theta_AD must be 0 or π for a collinear arrangement, got {theta_AD}")
    _check_collinear(rho_AD, rho_DM, rho_AM, between)

    k = omega_D / CONSTANTS.c
    u = alpha * k ** 2 * rho_AD / (rho_AM * rho_DM)
    if between:
        interference = 1.0
    else:
        interference = math.cos(2.0 * k * min(rho_AM, rho_DM))

    base = C2 / rho_AD ** 2
    return RateBreakdown.from_terms(base, 2.0 * u * interference * base, u ** 2 * base,
                                    u_NR=alpha * rho_AD ** 3 / (rho_DM ** 3 * rho_AM ** 3),
                                    u_R=u, kind="farfield")


# ---- Coefficients ----

def compute_c6(donor: DonorSpec, acceptor: AcceptorSpec) -> RateCoefficients:
    """C6 = γ_D·σ_A·3c⁴/(4ω_D⁴) and C2 = γ_D·σ_A/4, both from the atomic data."""
    coupling = donor.gamma_D * acceptor.sigma_A
    return RateCoefficients(
        C6=coupling * 3.0 * CONSTANTS.c ** 4 / (4.0 * donor.omega_D ** 4),
        C2=coupling / 4.0,
        source="computed-from-atoms",
    )


# both coefficients come from the same γ_D·σ_A product
compute_c2 = compute_c6


def c2_from_c6(C6: float, omega_D: float) -> float:
    """C2 = C6·(ω/c)⁴/3 for a single decay channel."""
    return C6 * (omega_D / CONSTANTS.c) ** 4 / 3.0


# ---- Kind selection ----

def select_kind(k_rho_max: float, k_rho_min: float) -> str:
    """Choose the tensor kind for `auto`: static, far-field or full."""
    if k_rho_max < NONRETARDED_MAX_KRHO:
        return "nonretarded"
    if k_rho_min > FARFIELD_MIN_KRHO:
        return "farfield"
    return "full"


def select_kind_for(system: SystemSpec) -> str:
    """`auto` kind for the pairwise distances present in a system."""
    points = [system.r_D.to_array(), system.r_A.to_array()]
    if system.mediator is not None:
        points.append(system.mediator.position.to_array())
    distances = [float(np.linalg.norm(p - q))
                 for i, p in enumerate(points) for q in points[i + 1:]]
    k = system.donor.omega_D / CONSTANTS.c
    kind = select_kind(k * max(distances), k * min(distances))
    logger.debug("auto kind: k*rho in [%.3g, %.3g] -> %s",
                 k * min(distances), k * max(distances), kind)
    return kind


def closed_form_check(system: SystemSpec, tensor_kind: str) -> Optional[RateBreakdown]:
    """The closed-form rate for this system when one exists for tensor_kind."""
    coeffs = compute_c6(system.donor, system.acceptor)
    mediator = system.mediator
    if mediator is None:
        return None
    geom = derive_geometry(system.r_D, system.r_A, mediator.position)

    if tensor_kind == "nonretarded":
        return rate_nr_general(geom, coeffs.C6, mediator.alpha)
    if tensor_kind == "farfield" and geom.mediator_side is not None:
        theta = math.pi if geom.mediator_between else 0.0
        return rate_r_collinear(geom.rho_AD, geom.rho_MA, geom.rho_DM, coeffs.C2,
                                mediator.alpha, system.donor.omega_D, theta)
    return None
