"""Free-space dyadic Green's tensors and the first-order Born correction for one point mediator.

All tensors use the convention in which the two-body rate is
2π²·γ_D·σ_A·Tr[G(r_A, r_D)·G*(r_D, r_A)], so G has units of 1/m.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from .errors import ValidationError
from .geometry import PointLike, separation
from .models import TENSOR_KINDS, ComplexTensor3, MediatorSpec
from .units import CONSTANTS

logger = logging.getLogger(__name__)

_IDENTITY = np.eye(3, dtype=complex)


def _check_omega(omega: float) -> None:
    if not (omega > 0 and math.isfinite(omega)):
        raise ValidationError(f"Angular frequency must be positive and finite, got {omega}")


def g0_full(r: PointLike, r_prime: PointLike, omega: float) -> ComplexTensor3:
    """Homogeneous vacuum dyadic valid at every distance."""
    _check_omega(omega)
    rho, e = separation(r, r_prime)
    x = omega / CONSTANTS.c * rho
    ee = np.outer(e, e)
    a = 1.0 + 1j / x - 1.0 / x ** 2
    b = -1.0 - 3j / x + 3.0 / x ** 2
    return np.exp(1j * x) / (4.0 * math.pi * rho) * (a * _IDENTITY + b * ee)


def g0_nonretarded(r: PointLike, r_prime: PointLike, omega: float) -> ComplexTensor3:
    """Static (kρ → 0) limit: -c²/(4πω²ρ³)·(I - 3 e⊗e)."""
    _check_omega(omega)
    rho, e = separation(r, r_prime)
    prefactor = -CONSTANTS.c ** 2 / (4.0 * math.pi * omega ** 2 * rho ** 3)
    return prefactor * (_IDENTITY - 3.0 * np.outer(e, e))


def g0_farfield(r: PointLike, r_prime: PointLike, omega: float) -> ComplexTensor3:
    """Retarded (kρ → ∞) limit: e^{ikρ}/(4πρ)·(I - e⊗e)."""
    _check_omega(omega)
    rho, e = separation(r, r_prime)
    phase = np.exp(1j * omega * rho / CONSTANTS.c)
    return phase / (4.0 * math.pi * rho) * (_IDENTITY - np.outer(e, e))


_BACKGROUNDS = {
    "full": g0_full,
    "nonretarded": g0_nonretarded,
    "farfield": g0_farfield,
}


def greens_tensor(r: PointLike, r_prime: PointLike, omega: float,
                  kind: str = "full") -> ComplexTensor3:
    """Vacuum Green's tensor of the requested kind."""
    try:
        background = _BACKGROUNDS[kind]
    except KeyError:
        raise ValidationError(f"Unknown tensor kind '{kind}' (known: {', '.join(TENSOR_KINDS)})")
    return background(r, r_prime, omega)


def scattered_term(r: PointLike, r_prime: PointLike, omega: float,
                   mediator: MediatorSpec, kind: str = "full") -> ComplexTensor3:
    """Single-scattering correction 4π·α·(ω/c)²·G⁽⁰⁾(r, r_M)·G⁽⁰⁾(r_M, r′).

    α is the polarisability volume, so μ₀ω²·(4πε₀α) becomes 4πα·ω²/c².
    """
    r_M = mediator.position.to_array()
    # the direct pair must not coincide either
    separation(r, r_prime)
    to_field = greens_tensor(r, r_M, omega, kind)
    from_source = greens_tensor(r_M, r_prime, omega, kind)
    coupling = 4.0 * math.pi * mediator.alpha * (omega / CONSTANTS.c) ** 2
    return coupling * (to_field @ from_source)


def g1_with_mediator(r: PointLike, r_prime: PointLike, omega: float,
                     mediator: MediatorSpec, background: str = "full") -> ComplexTensor3:
    """First-order Born Green's tensor for vacuum plus one isotropic point scatterer.

    Self-interaction of the mediator is taken to be absorbed in its observed
    polarisability, so no higher orders are added.
    """
    direct = greens_tensor(r, r_prime, omega, background)
    return direct + scattered_term(r, r_prime, omega, mediator, background)
