"""Single-dipole polarizabilities: bare, free-space and stochastic."""

from __future__ import annotations

import enum
import math

import numpy as np

from .errors import DivergentRenormalization, InvalidParameter, ResonancePole
from .params import DipoleSpecies


class PolarizabilityKind(enum.Enum):
    BARE = "bare"
    FREE_SPACE = "free_space"
    STOCHASTIC = "stochastic"


def phi_free(k):
    """Free-space radiative potential -i k^3 / 2 pi (real and negative at k = iu)."""
    return -1j * np.asarray(k) ** 3 / (2.0 * math.pi)


def alpha_bare(omega, species: DipoleSpecies):
    """alpha0 = 2 pi g / (1 - omega^2) in natural units (k0 = 1)."""
    w = np.asarray(omega, dtype=complex)
    den = 1.0 - w**2
    on_axis = (w.imag == 0) & (np.abs(den) < 1e-14)
    if np.any(on_axis):
        raise ResonancePole("alpha0 evaluated at the real-axis resonance omega = omega0")
    out = 2.0 * math.pi * species.g / den
    return out if out.ndim else complex(out)


def alpha_free(omega, species: DipoleSpecies):
    """Radiatively renormalized alpha0 / (1 + alpha0 phi0)."""
    a0 = alpha_bare(omega, species)
    return alpha_stoch(omega, species, phi_free(np.asarray(omega, dtype=complex)), _a0=a0)


def alpha_stoch(omega, species: DipoleSpecies, phi, _a0=None):
    """Stochastically renormalized alpha0 / (1 + alpha0 phi)."""
    phi = np.asarray(phi, dtype=complex)
    if not np.all(np.isfinite(phi)):
        raise InvalidParameter("phi", "radiative potential must be finite")
    a0 = alpha_bare(omega, species) if _a0 is None else _a0
    den = 1.0 + np.asarray(a0) * phi
    if np.any(np.abs(den) < 1e-300) or np.any(np.abs(den) <= 1e-14 * np.maximum(1.0, np.abs(np.asarray(a0) * phi))):
        raise DivergentRenormalization("1 + alpha0*phi vanishes")
    out = np.asarray(a0) / den
    return out if out.ndim else complex(out)


def alpha_bare_iu(u, g: float):
    """alpha0 on the imaginary axis, real and positive."""
    return 2.0 * math.pi * g / (1.0 + np.asarray(u, dtype=float) ** 2)


def alpha_free_iu(u, g: float):
    """Free-space alpha on the imaginary axis (real); raises past the runaway pole."""
    u = np.asarray(u, dtype=float)
    a0 = alpha_bare_iu(u, g)
    den = 1.0 - a0 * u**3 / (2.0 * math.pi)
    if np.any(den <= 0):
        raise DivergentRenormalization("free-space alpha has a runaway pole on the imaginary axis")
    return a0 / den


def polarizability(kind: PolarizabilityKind, omega, species: DipoleSpecies, phi=None):
    if kind is PolarizabilityKind.BARE:
        return alpha_bare(omega, species)
    if kind is PolarizabilityKind.FREE_SPACE:
        return alpha_free(omega, species)
    if phi is None:
        raise InvalidParameter("phi", "stochastic polarizability needs a finite phi")
    return alpha_stoch(omega, species, phi)
