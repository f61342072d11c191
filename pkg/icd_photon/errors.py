"""Exception hierarchy for icd-photon.

Everything derives from ValueError so callers that only guard against bad
input keep working.
"""

from __future__ import annotations


class IcdError(ValueError):
    """Base class for all icd-photon errors."""


class DegenerateGeometryError(IcdError):
    """Two of the atoms (or a field point and a source point) coincide."""


class CollinearityError(IcdError):
    """A collinear closed form was called with a non-collinear arrangement."""


class UnitError(IcdError):
    """Unknown unit tag or unparseable quantity."""


class ValidationError(IcdError):
    """A physical parameter is out of its allowed range."""


class FitError(IcdError):
    """The C6 fit could not be carried out."""


class InputFormatError(IcdError):
    """A data file does not have the expected layout."""


class ConfigError(IcdError):
    """Conflicting or incomplete run options."""
