"""Run configuration: config files, position parsing and system resolution."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, replace
from typing import Dict, Optional

import yaml

from .errors import ConfigError, InputFormatError, ValidationError
from .models import (
    AcceptorSpec,
    DonorSpec,
    MediatorSpec,
    Position,
    RateCoefficients,
    SystemSpec,
)
from .rates import compute_c6, select_kind_for
from .scans import DEFAULT_WAVELENGTH
from .units import omega_from_wavelength

logger = logging.getLogger(__name__)

KIND_CHOICES = ("auto", "full", "nonretarded", "farfield")

# config keys whose click parameter has a different name
_PARAM_NAMES = {
    "format": "fmt",
    "input": "input_path",
}

# keys that select what to run rather than how; the subcommand decides
_IGNORED_KEYS = {"command", "config", "verbose"}


def _param_name(key: str) -> str:
    name = str(key).strip().lstrip("-").replace("-", "_")
    return _PARAM_NAMES.get(name, name)


def _parse_key_value(text: str, path: str) -> Dict[str, str]:
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise InputFormatError(f"{path}:{lineno}: expected key=value, got '{raw.strip()}'")
        values[key.strip()] = value.strip()
    return values


def load_config_file(path: str) -> Dict[str, object]:
    """Read a flat config file into {click parameter name: value}.

    `.yaml`/`.yml` files are parsed with yaml.safe_load; anything else as
    key=value lines. Keys are flag names, with `-` and `_` interchangeable.
    """
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()

    if path.endswith((".yaml", ".yml")):
        data = yaml.safe_load(text) or {}
        if not isinstance(data, dict):
            raise InputFormatError(f"{path}: top level must be a mapping")
        for key, value in data.items():
            if isinstance(value, (dict, list)):
                raise InputFormatError(f"{path}: value of '{key}' must be a scalar")
    else:
        data = _parse_key_value(text, path)

    values: Dict[str, object] = {}
    for key, value in data.items():
        name = _param_name(key)
        if name in _IGNORED_KEYS:
            logger.debug("Ignoring config key '%s'", key)
            continue
        values[name] = value
    logger.debug("Loaded %d settings from %s", len(values), path)
    return values


def parse_position(text: str) -> Position:
    """'x,y,z' in Å to a Position."""
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != 3:
        raise ValidationError(f"Position needs three comma-separated coordinates, got '{text}'")
    try:
        x, y, z = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"Position coordinates must be numbers, got '{text}'")
    return Position.from_angstrom(x, y, z)


def default_output_path(mode: str, fmt: str, output_dir: Optional[str] = None) -> str:
    return os.path.join(output_dir or ".", f"scan-{mode}.{fmt}")


@dataclass
class RunConfig:
    """Resolved options for one command, in SI units.

    Exactly one coupling source is allowed: the atomic data
    (gamma_D with sigma_A) or one of the coefficients c6 / c2.
    """

    command: str
    r_D: Position
    r_A: Position
    r_M: Optional[Position] = None
    alpha: Optional[float] = None  # m³
    c6: Optional[float] = None  # m⁶/s
    c2: Optional[float] = None  # m²/s
    gamma_D: Optional[float] = None  # 1/s
    sigma_A: Optional[float] = None  # m²
    omega_D: float = omega_from_wavelength(DEFAULT_WAVELENGTH)
    kind: str = "auto"
    fmt: str = "text"
    output: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in KIND_CHOICES:
            raise ConfigError(f"Unknown tensor kind '{self.kind}'")
        self.coupling_source()
        if self.r_M is not None and self.alpha is None:
            raise ConfigError("--pos-m needs --alpha")
        if self.r_M is None and self.alpha is not None:
            raise ConfigError("--alpha needs a mediator position (--pos-m)")

    def coupling_source(self) -> str:
        """Which of 'atoms', 'c6' or 'c2' supplies γ_D·σ_A."""
        atoms = self.gamma_D is not None or self.sigma_A is not None
        given = [name for name, present in (("atoms", atoms),
                                            ("c6", self.c6 is not None),
                                            ("c2", self.c2 is not None)) if present]
        if len(given) != 1:
            raise ConfigError("Give exactly one of --c6, --c2 or --gamma-d with --sigma-a"
                              + (f" (got {', '.join(given)})" if given else ""))
        if given == ["atoms"] and (self.gamma_D is None or self.sigma_A is None):
            raise ConfigError("--gamma-d and --sigma-a must be given together")
        return given[0]

    def build_system(self) -> SystemSpec:
        mediator = MediatorSpec(self.r_M, self.alpha) if self.r_M is not None else None
        if self.coupling_source() == "atoms":
            return SystemSpec(DonorSpec(self.gamma_D, self.omega_D), AcceptorSpec(self.sigma_A),
                              self.r_D, self.r_A, mediator)
        return SystemSpec.from_coefficients(self.omega_D, self.r_D, self.r_A, mediator,
                                            c6=self.c6, c2=self.c2)

    def resolved_kind(self, system: SystemSpec) -> str:
        if self.kind != "auto":
            return self.kind
        kind = select_kind_for(system)
        logger.info("Tensor kind 'auto' resolved to '%s'", kind)
        return kind

    def coefficients(self) -> RateCoefficients:
        """C6 and C2 for the resolved coupling."""
        system = self.build_system()
        coeffs = compute_c6(system.donor, system.acceptor)
        if self.coupling_source() == "atoms":
            return coeffs
        return replace(coeffs, source="user-supplied")
