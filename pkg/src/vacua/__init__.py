"""Lamb shifts and vacuum energies of random dipole media."""

from .errors import VacuaError
from .lamb import EnergyResult
from .params import Correlation, DipoleSpecies, MediumSpec, derive_groups

__all__ = ["Correlation", "DipoleSpecies", "EnergyResult", "MediumSpec", "VacuaError", "derive_groups"]
