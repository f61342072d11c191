"""Data models for icd-photon."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import ValidationError
from .units import ANGSTROM, CONSTANTS, rate_to_width_ev

# 3x3 complex128 array; the value of a dyadic Green's tensor in 1/m.
ComplexTensor3 = np.ndarray

TENSOR_KINDS = ("full", "nonretarded", "farfield")

# u below this is a trustworthy perturbative result, below 1 a usable one
PERTURBATIVE_LIMIT = 1.0
QUANTITATIVE_LIMIT = 0.5


@dataclass(frozen=True)
class Position:
    """Cartesian atom position in meters."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValidationError(f"Position has non-finite component: "
                                  f"({self.x}, {self.y}, {self.z})")

    @classmethod
    def from_angstrom(cls, x: float, y: float, z: float) -> Position:
        return cls(x * ANGSTROM, y * ANGSTROM, z * ANGSTROM)

    @classmethod
    def from_array(cls, vec) -> Position:
        x, y, z = (float(v) for v in vec)
        return cls(x, y, z)

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def to_angstrom(self) -> Tuple[float, float, float]:
        return (self.x / ANGSTROM, self.y / ANGSTROM, self.z / ANGSTROM)


@dataclass(frozen=True)
class TriangleGeometry:
    """Side lengths (m) and interior angles (rad) of the donor-mediator-acceptor triangle.

    Each theta_XY sits at the vertex opposite side XY: theta_AD at the
    mediator, theta_DM at the acceptor, theta_MA at the donor.
    """

    rho_AD: float
    rho_DM: float
    rho_MA: float
    theta_AD: float
    theta_DM: float
    theta_MA: float
    collinear: bool = False
    mediator_between: bool = False
    mediator_side: Optional[str] = None  # "between" | "beyond-acceptor" | "beyond-donor"

    @property
    def largest_angle(self) -> float:
        return max(self.theta_AD, self.theta_DM, self.theta_MA)

    @property
    def smallest_angle(self) -> float:
        return min(self.theta_AD, self.theta_DM, self.theta_MA)


@dataclass(frozen=True)
class MediatorSpec:
    """ICD-inactive atom: position and polarisability volume α/(4πε₀) in m³."""

    position: Position
    alpha: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.alpha) or self.alpha < 0:
            raise ValidationError(
                f"Mediator polarisability volume must be finite and >= 0, got {self.alpha}")


@dataclass(frozen=True)
class DonorSpec:
    gamma_D: float  # free-space decay rate (1/s)
    omega_D: float  # transition angular frequency (rad/s)

    def __post_init__(self) -> None:
        if not (self.gamma_D > 0 and math.isfinite(self.gamma_D)):
            raise ValidationError(f"Donor decay rate must be positive, got {self.gamma_D}")
        if not (self.omega_D > 0 and math.isfinite(self.omega_D)):
            raise ValidationError(f"Donor frequency must be positive, got {self.omega_D}")


@dataclass(frozen=True)
class AcceptorSpec:
    sigma_A: float  # photoionisation cross section at ħω_D (m²)

    def __post_init__(self) -> None:
        if not (self.sigma_A >= 0 and math.isfinite(self.sigma_A)):
            raise ValidationError(f"Acceptor cross section must be >= 0, got {self.sigma_A}")


@dataclass(frozen=True)
class SystemSpec:
    """Donor, acceptor and optional mediator with their positions."""

    donor: DonorSpec
    acceptor: AcceptorSpec
    r_D: Position
    r_A: Position
    mediator: Optional[MediatorSpec] = None

    @property
    def coupling(self) -> float:
        """γ_D·σ_A; no rate depends on the two factors separately."""
        return self.donor.gamma_D * self.acceptor.sigma_A

    @classmethod
    def from_coefficients(cls, omega_D: float, r_D: Position, r_A: Position,
                          mediator: Optional[MediatorSpec] = None,
                          c6: Optional[float] = None,
                          c2: Optional[float] = None) -> SystemSpec:
        """Build a system from C6 (m⁶/s) or C2 (m²/s) instead of atomic data.

        The acceptor gets a unit (1 m²) cross section and the donor
        carries the whole γ_D·σ_A product.
        """
        if (c6 is None) == (c2 is None):
            raise ValidationError("Give exactly one of c6 or c2")
        if c6 is not None:
            coupling = 4.0 * omega_D ** 4 * c6 / (3.0 * CONSTANTS.c ** 4)
        else:
            coupling = 4.0 * c2
        return cls(
            donor=DonorSpec(gamma_D=coupling, omega_D=omega_D),
            acceptor=AcceptorSpec(sigma_A=1.0),
            r_D=r_D,
            r_A=r_A,
            mediator=mediator,
        )

    def without_mediator(self) -> SystemSpec:
        return SystemSpec(self.donor, self.acceptor, self.r_D, self.r_A, None)


@dataclass(frozen=True)
class FitInfo:
    """How a fitted C6 was obtained."""

    rho_min: float  # Å, smallest distance used
    rho_max: float  # Å
    n_rows: int
    residual_rms_ev: float
    relative_rms: float
    estimator: str = "linear-through-origin-rho^-6"


@dataclass(frozen=True)
class RateCoefficients:
    """C6 (m⁶/s) and C2 (m²/s); C2 is None when no frequency is known."""

    C6: float
    C2: Optional[float]
    source: str  # "computed-from-atoms" | "fitted" | "user-supplied"
    fit: Optional[FitInfo] = None

    def __post_init__(self) -> None:
        if self.C6 < 0 or (self.C2 is not None and self.C2 < 0):
            raise ValidationError("Rate coefficients must be non-negative")


@dataclass(frozen=True)
class RateBreakdown:
    """A rate split by powers of α: direct (α⁰), cross (α¹), scattered (α²).

    Rates are in 1/s unless produced by to_widths(), which rescales every
    rate field to eV.
    """

    total: float
    direct_term: float
    cross_term: float
    scattered_term: float
    u_NR: float
    u_R: Optional[float]
    kind: str
    perturbative_ok: bool = True
    quantitative_ok: bool = True

    @classmethod
    def from_terms(cls, direct: float, cross: float, scattered: float,
                   u_NR: float, u_R: Optional[float], kind: str) -> RateBreakdown:
        u = validity_u(kind, u_NR, u_R)
        return cls(
            total=float(direct + cross + scattered),
            direct_term=float(direct),
            cross_term=float(cross),
            scattered_term=float(scattered),
            u_NR=u_NR,
            u_R=u_R,
            kind=kind,
            perturbative_ok=bool(u < PERTURBATIVE_LIMIT),
            quantitative_ok=bool(u < QUANTITATIVE_LIMIT),
        )

    @property
    def u(self) -> float:
        """The coupling strength that governs validity for this tensor kind."""
        return validity_u(self.kind, self.u_NR, self.u_R)

    @property
    def ratio(self) -> float:
        """Total rate relative to the two-body (α⁰) rate."""
        if self.direct_term == 0:
            return math.nan
        return self.total / self.direct_term

    def to_widths(self) -> RateBreakdown:
        return RateBreakdown(
            total=rate_to_width_ev(self.total),
            direct_term=rate_to_width_ev(self.direct_term),
            cross_term=rate_to_width_ev(self.cross_term),
            scattered_term=rate_to_width_ev(self.scattered_term),
            u_NR=self.u_NR,
            u_R=self.u_R,
            kind=self.kind,
            perturbative_ok=self.perturbative_ok,
            quantitative_ok=self.quantitative_ok,
        )

    def as_dict(self) -> Dict[str, object]:
        return {
            "total": self.total,
            "direct": self.direct_term,
            "cross": self.cross_term,
            "scattered": self.scattered_term,
        }


def validity_u(kind: str, u_NR: float, u_R: Optional[float]) -> float:
    """Pick the coupling strength that decides perturbative validity."""
    if kind == "nonretarded" or u_R is None:
        return u_NR
    if kind == "farfield":
        return u_R
    return max(u_NR, u_R)


@dataclass
class ScanResult:
    """Tabulated scan output: named columns, rows in grid order and a metadata preamble."""

    columns: List[str]
    rows: List[tuple] = field(default_factory=list)
    metadata: Dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        idx = self.columns.index(name)
        return np.array([row[idx] for row in self.rows])


@dataclass
class WidthDataset:
    """External decay widths: ρ_AD in Å and width in eV."""

    rho: np.ndarray
    width: np.ndarray
    source: str = ""

    def __post_init__(self) -> None:
        self.rho = np.asarray(self.rho, dtype=float)
        self.width = np.asarray(self.width, dtype=float)
        if self.rho.shape != self.width.shape or self.rho.ndim != 1:
            raise ValidationError("Width dataset needs matching 1D distance and width columns")
        if not (np.all(np.isfinite(self.rho)) and np.all(np.isfinite(self.width))):
            raise ValidationError("Width dataset values must be finite")
        if np.any(np.diff(self.rho) <= 0):
            raise ValidationError("Width dataset distances must be strictly increasing")
        if np.any(self.width <= 0):
            raise ValidationError("Width dataset widths must be positive")

    def __len__(self) -> int:
        return len(self.rho)
