"""Exception hierarchy shared by every module.

Each error carries a short machine-readable ``name`` so the CLI can report
the originating failure without parsing messages.
"""


class VacuaError(Exception):
    """Base class for all engine errors."""

    exit_code = 3

    @property
    def name(self) -> str:
        return type(self).__name__


class InvalidParameter(VacuaError, ValueError):
    """A parameter violates its documented invariant."""

    exit_code = 2

    def __init__(self, field: str, reason: str = ""):
        self.field = field
        self.reason = reason
        msg = f"invalid parameter '{field}'"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class SingularPoint(VacuaError):
    """Evaluation requested at a point where the function is singular."""


class OnShellPole(VacuaError):
    """Momentum-space propagator evaluated on the light cone."""


class ResonancePole(VacuaError):
    """Real-axis evaluation exactly at a resonance."""


class DivergentRenormalization(VacuaError):
    """The renormalization denominator 1 + alpha0*phi vanishes."""


class NonDecayingIntegrand(VacuaError):
    """An integral diverges at an endpoint or in its tail."""


class ToleranceNotMet(VacuaError):
    """Quadrature finished without reaching the requested tolerance."""

    def __init__(self, value, error, message="tolerance not met"):
        self.value = value
        self.error = error
        super().__init__(f"{message}: estimate={value!r}, error={error:.3e}")


class BranchOutOfRange(VacuaError):
    """An asymptotic branch was requested outside its validity range."""


class ResummationPole(VacuaError):
    """Geometric resummation of recurrent scattering hits a pole."""


class GeometricPole(VacuaError):
    """The quasicrystalline geometric series has a vanishing denominator."""


class SeriesDiverging(VacuaError):
    """Successive series increments do not decrease."""


class MissingKernel(VacuaError):
    """A cluster kernel of the requested order was not supplied."""

    def __init__(self, order: int):
        self.order = order
        super().__init__(f"no correlation kernel supplied for n={order}")


class MissingCutoff(VacuaError):
    """A UV-divergent integral was requested without a cutoff."""


class OverCritical(VacuaError):
    """Coupling beyond the electrostatic instability (x >= 9/2)."""


class MatrixSingular(VacuaError):
    """Interaction matrix singular or not positive definite on the path."""


class PackingTooDense(VacuaError):
    """Random sequential addition cannot place the requested spheres."""
