"""Physical parameter sets and derived dimensionless groups.

Internal units: hbar = c = eps0 = 1, frequencies in units of the transition
frequency omega0 and lengths in units of c/omega0, so k0 = 1.  Every
quantity downstream is expressed through g = Gamma0/omega0, zeta0 = k0*xi and
the packing rho_bar = rho*xi**3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import InvalidParameter

G_MAX = 0.1


@dataclass(frozen=True)
class DipoleSpecies:
    """Two-level dipole with a single isotropic oscillator.

    ``gamma_ratio`` is the free-space linewidth over the transition
    frequency.  ``cutoff`` is the sharp UV cutoff (in units of omega0) used
    only by the free-space Lamb integrals.
    """

    gamma_ratio: float
    cutoff: Optional[float] = None
    omega0: float = 1.0

    def __post_init__(self):
        g = self.gamma_ratio
        if not (isinstance(g, (int, float)) and math.isfinite(g)) or g <= 0:
            raise InvalidParameter("g", "must be a positive finite number")
        if g >= G_MAX:
            raise InvalidParameter("g", f"g={g} is outside the weak-coupling regime (g < {G_MAX})")
        if self.cutoff is not None and not (math.isfinite(self.cutoff) and self.cutoff > 1.0):
            raise InvalidParameter("cutoff", "cutoff must exceed 1 (in units of omega0)")
        if self.omega0 != 1.0:
            raise InvalidParameter("omega0", "frequencies are scaled so that omega0 = 1")

    @property
    def g(self) -> float:
        return self.gamma_ratio

    @property
    def mu2(self) -> float:
        """Dipole strength mu^2/(eps0 hbar), fixed by Gamma0 = k0^3 mu^2 / 3 pi."""
        return 3.0 * math.pi * self.gamma_ratio

    def require_cutoff(self) -> float:
        if self.cutoff is None:
            raise InvalidParameter("cutoff", "this computation needs a UV cutoff")
        return self.cutoff


@dataclass(frozen=True)
class Correlation:
    """Pair-correlation model: hard sphere, optionally with a contact shell.

    The overdensity amplitude ``overdensity_c`` adds C*xi*delta(r - xi) to
    the pair correlation.
    """

    kind: str = "hard_sphere"
    overdensity_c: float = 0.0

    def __post_init__(self):
        if self.kind not in ("hard_sphere", "hard_sphere_overdensity"):
            raise InvalidParameter("correlation", f"unknown model '{self.kind}'")
        if self.overdensity_c < 0 or not math.isfinite(self.overdensity_c):
            raise InvalidParameter("overdensity_c", "must be finite and non-negative")
        if self.kind == "hard_sphere" and self.overdensity_c != 0.0:
            raise InvalidParameter("overdensity_c", "only valid with the overdensity model")
        if self.kind == "hard_sphere_overdensity" and self.overdensity_c <= 0.0:
            raise InvalidParameter("overdensity_c", "overdensity model needs C > 0")

    @classmethod
    def hard_sphere(cls) -> "Correlation":
        return cls()

    @classmethod
    def overdensity(cls, c: float) -> "Correlation":
        return cls("hard_sphere_overdensity", float(c))


@dataclass(frozen=True)
class MediumSpec:
    """Random medium: packing rho*xi^3, correlation length k0*xi, model."""

    rho_bar: float
    zeta0: float
    correlation: Correlation = field(default_factory=Correlation)

    def __post_init__(self):
        for name in ("rho_bar", "zeta0"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)) or v <= 0:
                raise InvalidParameter(name, "must be a positive finite number")

    @property
    def xi(self) -> float:
        """Correlation length in units of c/omega0."""
        return self.zeta0

    @property
    def rho(self) -> float:
        """Number density in units of (omega0/c)^3."""
        return self.rho_bar / self.zeta0**3

    def require_small_zeta(self) -> None:
        if self.zeta0 >= 1.0:
            raise InvalidParameter("zeta0", "effective-medium formulas need zeta0 < 1")


@dataclass(frozen=True)
class DimensionlessGroups:
    g: float
    zeta0: float
    rho_bar: float
    x: float
    recur_ratio: float

    @property
    def recurrence_negligible(self) -> bool:
        return self.recur_ratio < 1.0


def derive_groups(species: DipoleSpecies, medium: MediumSpec) -> DimensionlessGroups:
    """Electrostatic coupling x = rho mu^2 and the recurrent-scattering ratio."""
    g, z, rb = species.g, medium.zeta0, medium.rho_bar
    x = 3.0 * math.pi * g * rb / z**3
    return DimensionlessGroups(g=g, zeta0=z, rho_bar=rb, x=x, recur_ratio=(g / z**3) ** 2)


def x_from(g: float, rho: float) -> float:
    """Electrostatic coupling from g and the number density."""
    return 3.0 * math.pi * g * rho


def cutoff_preset(name: str, rest_energy_ratio: float, fine_structure: Optional[float] = None) -> float:
    """UV cutoff presets.

    ``compton``: Lambda = m_e c^2 / hbar omega0, supplied by the caller as
    ``rest_energy_ratio``.  ``electron_radius``: the shorter classical radius
    scale, Lambda = m_e c^2 / (alpha_f hbar omega0).  The latter exceeds the
    range where the non-relativistic dipole treatment is consistent and is
    kept only for comparison.
    """
    if rest_energy_ratio <= 1.0:
        raise InvalidParameter("cutoff", "rest-energy ratio must exceed 1")
    if name == "compton":
        return float(rest_energy_ratio)
    if name == "electron_radius":
        if fine_structure is None or not (0 < fine_structure < 1):
            raise InvalidParameter("fine_structure", "needed for the electron-radius preset")
        return float(rest_energy_ratio / fine_structure)
    raise InvalidParameter("cutoff", f"unknown preset '{name}'")
