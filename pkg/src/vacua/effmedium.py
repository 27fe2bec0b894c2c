"""Continuum (effective-medium) models for comparison with the microscopic results.

Frequencies in omega0, densities rho in (omega0/c)^3.  Real-axis Re/Im
frequency integrals are evaluated on the imaginary axis, where
Re int_0^inf dw w^3 X(w) = int_0^inf du u^3 X(iu) and
Im int_0^inf dw Y(w) = int_0^inf du Y(iu) for X, Y analytic in the upper
half plane and real on the imaginary axis.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate

from .errors import BranchOutOfRange, InvalidParameter, MissingCutoff, OverCritical, ResonancePole
from .lamb import EnergyResult
from .params import DipoleSpecies, x_from
from .phi import phi1_hs_split
from .quadrature import DEFAULT_SPEC, IntegralSpec, SpectralCurve, integrate_semi_infinite

PI2 = math.pi**2


class BindingMethod(enum.Enum):
    CLOSED_FORM = "closed_form"
    MODE_SUM = "mode_sum"


class SchwingerMethod(enum.Enum):
    PLAIN = "plain"
    ORDER_RHO2 = "order_rho2"


def _curve(c) -> Callable[[float], float]:
    if isinstance(c, SpectralCurve):
        return lambda u: float(np.real(c(u)))
    if callable(c):
        return c
    v = float(c)
    return lambda u: v


def _sqrt1pm1(t):
    """sqrt(1 + t) - 1 without cancellation."""
    return t / (1.0 + math.sqrt(1.0 + t))


def taylor_coefficients(f: Callable[[complex], complex], order: int, radius: float = 0.1,
                        n: int = 64) -> np.ndarray:
    """Taylor coefficients c_0..c_order of f at 0 from samples on a circle."""
    z = radius * np.exp(2j * math.pi * np.arange(n) / n)
    vals = np.array([f(zz) for zz in z])
    c = np.fft.fft(vals) / n
    return np.real(c[: order + 1] / radius ** np.arange(order + 1))


# --- Maxwell-Garnett -------------------------------------------------------------

def chi_mg(omega, rho: float, species: DipoleSpecies):
    """Maxwell-Garnett susceptibility (2x/3)/(1 - w^2 - 2x/9), radiative corrections dropped."""
    x = x_from(species.g, rho)
    den = 1 - omega * omega - 2 * x / 9
    if np.isrealobj(omega) and np.any(np.abs(den) < 1e-14):
        raise ResonancePole(f"omega = {omega} sits on the Maxwell-Garnett resonance")
    return (2 * x / 3) / den


@dataclass
class EffectiveMedium:
    """Local susceptibility with derived dielectric quantities."""

    chi: Callable

    def epsilon(self, omega):
        return 1 + self.chi(omega)

    def n(self, omega):
        return np.sqrt(self.epsilon(np.asarray(omega, dtype=complex)))

    def lorentz_factor(self, omega):
        return (self.chi(omega) + 3) / 3

    def chi_iu(self, u):
        return float(np.real(self.chi(1j * u)))

    def n_iu(self, u):
        return float(np.real(self.n(1j * u)))


def mg_medium(rho: float, species: DipoleSpecies) -> EffectiveMedium:
    return EffectiveMedium(lambda w: chi_mg(w, rho, species))


def ll_shift(rho: float, species: DipoleSpecies) -> float:
    """Lorentz-Lorenz shift from the pole of the MG susceptibility."""
    x = x_from(species.g, rho)
    if x >= 4.5:
        raise OverCritical(f"x = {x:.4g} >= 9/2: the MG resonance has collapsed")
    return _sqrt1pm1(-2 * x / 9)


# --- mode sums -----------------------------------------------------------------------
# Log arguments are products of factors (c - t) with t = w^2 - 1; each factor
# has one positive-frequency root at w = sqrt(1 + c).

def _mg_factors(x: float, kind: str) -> Tuple[list, list]:
    """Zero and pole factor lists (as polynomials in t) of the MG log argument."""
    d_chi = [-1.0, -2 * x / 9]          # 1 - w^2 - 2x/9
    d_eps = [-1.0, 4 * x / 9]           # 1 - w^2 + 4x/9
    bare = [-1.0, 0.0]                  # 1 - w^2
    # chi/(rho a0) = bare/d_chi ; 1/eps = d_chi/d_eps
    if kind == "stat":
        return [bare, d_chi], [d_chi, d_eps]
    if kind == "bullough_obada":
        return [bare] * 3 + [d_chi], [d_chi] * 3 + [d_eps]
    if kind == "transverse_lff":
        return [bare] * 2, [d_chi] * 2
    raise ValueError(kind)


def _shift_sum(factors) -> float:
    tot = 0.0
    for p in factors:
        for t in np.roots(p):
            tot += _sqrt1pm1(float(np.real(t)))
    return tot


def mode_sum(zeros, poles, rho: float) -> float:
    """-(rho/2)(sum of pole frequencies - sum of zero frequencies).

    The lattice regulator int d^3q/(2pi)^3 -> rho turns the q integral into a
    factor rho.
    """
    return -0.5 * rho * (_shift_sum(poles) - _shift_sum(zeros))


def electrostatic_binding_energy(rho: float, species: DipoleSpecies,
                                 method: BindingMethod = BindingMethod.CLOSED_FORM) -> EnergyResult:
    """Energy density of long-wavelength electrostatic modes of the MG medium."""
    x = x_from(species.g, rho)
    if method == BindingMethod.CLOSED_FORM:
        v = -0.5 * rho * _sqrt1pm1(4 * x / 9)
    else:
        v = mode_sum(*_mg_factors(x, "stat"), rho) if x > 0 else 0.0
    return EnergyResult.from_parts({"longitudinal": v}, provenance={"method": method.value, "x": x},
                                   units="density", density=rho)


def bullough_obada_energy(rho: float, species: DipoleSpecies) -> EnergyResult:
    """Mode sum of ln[chi^3/((rho a0)^3 eps)], i.e. with the two transverse LFF logarithms."""
    x = x_from(species.g, rho)
    if x == 0:
        parts = {"longitudinal": 0.0, "transverse_lff": 0.0}
    else:
        parts = {"longitudinal": mode_sum(*_mg_factors(x, "stat"), rho),
                 "transverse_lff": mode_sum(*_mg_factors(x, "transverse_lff"), rho)}
    f = 2 * x / 3
    return EnergyResult.from_parts(parts, provenance={"x": x, "oscillator_strength": f},
                                   reference={"leading_f2": rho * f * f / 24},
                                   units="density", density=rho)


# --- Schwinger bulk energy --------------------------------------------------------------

@dataclass
class DiluteSeries:
    """Refractive index as a function of a = rho*alpha plus the curve a(iu)."""

    n_of_a: Callable[[complex], complex]
    rho_alpha: Callable[[float], float]

    def n_iu(self, u):
        return float(np.real(self.n_of_a(self.rho_alpha(u))))


def mg_index_of_a(a):
    return np.sqrt(1 + a / (1 - a / 3))


def mg_dilute(rho: float, species: DipoleSpecies) -> DiluteSeries:
    g = species.g
    return DiluteSeries(mg_index_of_a, lambda u: rho * 2 * math.pi * g / (1 + u * u))


def _wick(f, spec: IntegralSpec, u_max: Optional[float]):
    if u_max is None:
        res = integrate_semi_infinite(f, 0.0, spec, scale=1.0, is_complex=False)
        return float(res.value), res.error
    pts = [p for p in (1.0, 10.0, 100.0) if p < u_max]
    v, e = integrate.quad(f, 0.0, u_max, points=pts or None, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                    limit=spec.max_subdivisions)
    return v, e


def schwinger_coefficient(n_of_a: Callable, order: int) -> float:
    """Coefficient of Re int dw k^3 (rho alpha)^order in (1/6pi^2) Re int w^3 (1 - n^3)."""
    c = taylor_coefficients(lambda a: n_of_a(a) ** 3, order)
    return -c[order] / (6 * PI2)


def schwinger_energy(n_curve, method: SchwingerMethod = SchwingerMethod.PLAIN, spec: IntegralSpec = DEFAULT_SPEC,
                     u_max: Optional[float] = None) -> EnergyResult:
    """Schwinger bulk energy density (1/6pi^2) Re int dw w^3 (1 - n^3).

    ``n_curve``: callable n(iu), SpectralCurve, constant, or DiluteSeries.
    ORDER_RHO2 needs a DiluteSeries and returns c2 int du u^3 (rho alpha)^2.
    """
    if method == SchwingerMethod.PLAIN:
        n = n_curve.n_iu if isinstance(n_curve, DiluteSeries) else _curve(n_curve)
        v, e = _wick(lambda u: u**3 * (1 - n(u) ** 3) / (6 * PI2), spec, u_max)
        return EnergyResult.from_parts({"transverse_bulk": v}, e, provenance={"method": "plain"},
                                       units="density")
    if not isinstance(n_curve, DiluteSeries):
        raise InvalidParameter("n_curve", "ORDER_RHO2 needs n as a function of rho*alpha")
    c2 = schwinger_coefficient(n_curve.n_of_a, 2)
    a = n_curve.rho_alpha
    v, e = _wick(lambda u: c2 * u**3 * a(u) ** 2, spec, u_max)
    return EnergyResult.from_parts({"order_rho2": v}, abs(c2) * e,
                                   provenance={"method": "order_rho2", "coefficient": c2}, units="density")


def schwinger_shift(n_curve, chi_curve, rho: float, spec: IntegralSpec = DEFAULT_SPEC,
                    u_max: Optional[float] = None) -> EnergyResult:
    """Schwinger energy shift -(1/4pi^2 rho) Re int dw w^3 n chi."""
    n, chi = _curve(n_curve), _curve(chi_curve)
    v, e = _wick(lambda u: -u**3 * n(u) * chi(u) / (4 * PI2 * rho), spec, u_max)
    return EnergyResult.from_parts({"shift": v}, e, units="shift")


def mg_static_kernel(a, s):
    """Long-wavelength MG transverse susceptibility (independent of q)."""
    return a / (1 - a / 3)


def _transverse_log_finite(chi_kernel, a, spec: IntegralSpec) -> complex:
    """int_0^inf ds [s^2 ln((s^2+1)/(s^2+1+chi)) + chi], s = q/u.

    The subtracted chi is the linear UV divergence (local self-energy); for
    q-independent chi the result is (pi/3)(n^3 - 1).
    """
    def g(s):
        c = chi_kernel(a, s)
        y = c / (s * s + 1)
        if abs(y) < 1e-4:
            rem = -y * y / 2 + y**3 / 3 - y**4 / 4
        else:
            rem = np.log1p(y) - y
        # s^2 ln(1/(1+y)) + c = -s^2 (ln(1+y) - y) + y
        return -s * s * rem + y

    return integrate_semi_infinite(g, 0.0, spec, scale=1.0, is_complex=True).value


def schwinger_extended(chi_perp_kernel: Callable = mg_static_kernel, species: Optional[DipoleSpecies] = None,
                       order: int = 3, spec: Optional[IntegralSpec] = None) -> EnergyResult:
    """Order-``order`` coefficient of the transverse-only (extended) Schwinger energy.

    Per imaginary frequency the energy density is
    -(1/pi) (u^3/2pi^2) int ds [s^2 ln((s^2+1)/(s^2+eps_perp)) + chi];
    the value returned is the coefficient of Re int dw k^3 (rho alpha)^order,
    extracted from the q quadrature by a contour Taylor expansion in rho*alpha.
    """
    if order not in (2, 3):
        raise InvalidParameter("order", "must be 2 or 3")
    spec = spec or IntegralSpec(rel_tol=1e-12, abs_tol=1e-15)
    h = lambda a: -_transverse_log_finite(chi_perp_kernel, a, spec) / (2 * math.pi**3)
    c = taylor_coefficients(h, order, radius=0.1, n=32)
    return EnergyResult.from_parts({f"order_rho{order}": c[order]},
                                   provenance={"route": "transverse log", "units": "coefficient"},
                                   units="coefficient")


# --- microscopic radiative energy in the MG medium ---------------------------------------

def radiative_bracket(zeta_small: float = 1e-3) -> Tuple[float, float]:
    """zeta-independent imaginary brackets (transverse, longitudinal) of the pair potential.

    Extracted from the closed hard-sphere split at small zeta with one
    Richardson step (corrections are O(zeta^2)).
    """
    pre = -1 / (2 * math.pi)

    def im_parts(z):
        p2, pa = phi1_hs_split(1.0, z, 1.0)
        return (p2 / pre).imag, (pa / pre).imag

    a1, b1 = im_parts(zeta_small)
    a2, b2 = im_parts(2 * zeta_small)
    return (4 * a1 - a2) / 3, (4 * b1 - b2) / 3


def mg_phi_of_a(a):
    """MG radiative phi in units of -i k^3/2pi: L_LL^2 n."""
    chi = a / (1 - a / 3)
    return (1 + chi / 3) ** 2 * np.sqrt(1 + chi)


def radiative_vacuum_energy_mg(order: int = 2) -> EnergyResult:
    """Coefficient of Re int dw k^3 (rho alpha)^order in the radiative vacuum energy.

    Order 2 uses the zeta-independent pair brackets (transverse + longitudinal);
    order 3 expands the MG phi factor in rho*alpha and applies the
    coupling-constant weight 1/order.
    """
    if order == 2:
        perp, par = radiative_bracket()
        c = -(perp + par) / (8 * PI2)
        return EnergyResult.from_parts({"transverse": -perp / (8 * PI2), "longitudinal": -par / (8 * PI2)},
                                       provenance={"bracket": perp + par}, units="coefficient")
    if order != 3:
        raise InvalidParameter("order", "must be 2 or 3")
    phi = taylor_coefficients(mg_phi_of_a, 2)
    c = -phi[2] / (4 * PI2 * order)
    return EnergyResult.from_parts({"order_rho3": c}, provenance={"phi_a2": phi[2], "phi_a1": phi[1]},
                                   units="coefficient")


# --- ADGLP -------------------------------------------------------------------------------

def adglp_energy(epsilon_curve, q_max: Optional[float], species: Optional[DipoleSpecies] = None,
                 spec: Optional[IntegralSpec] = None) -> EnergyResult:
    """ADGLP energy density with an explicit momentum cutoff.

    -(1/2pi) int du int_{q<q_max} d^3q/(2pi)^3 ln[(u^2+q^2)^2 / (eps (eps u^2 + q^2)^2)].
    """
    if q_max is None:
        raise MissingCutoff("adglp_energy needs an explicit q_max")
    if q_max <= 0:
        raise InvalidParameter("q_max", "must be positive")
    spec = spec or IntegralSpec(rel_tol=1e-6, abs_tol=1e-14)
    eps = _curve(epsilon_curve)

    gx, gw = np.polynomial.legendre.leggauss(12)

    def t_minus_atan(t):
        small = t < 1e-2
        ts = np.where(small, t, 0.0)
        series = ts**3 / 3 - ts**5 / 5 + ts**7 / 7
        return np.where(small, series, t - np.arctan(t))

    def q_int(u):
        # int_0^Q dq q^2 [2 ln((u^2+q^2)/(e u^2+q^2)) - ln e]; the log part is
        # -2 int_u^{u sqrt(e)} da 2a^2 (Q/a - atan(Q/a)) in closed form over q
        d = eps(u) - 1.0
        if d == 0.0:
            return 0.0
        a1, a2 = u, u * math.sqrt(1.0 + d)
        a = 0.5 * (a1 + a2) + 0.5 * (a2 - a1) * gx
        logpart = -2 * 0.5 * (a2 - a1) * float(np.dot(gw, 2 * a * a * t_minus_atan(q_max / a)))
        v = logpart - math.log1p(d) * q_max**3 / 3
        return -v / (2 * PI2) / (2 * math.pi)

    res = integrate_semi_infinite(q_int, 0.0, spec, scale=1.0, is_complex=False,
                                 breakpoints=(0.1 * q_max, q_max, 10 * q_max))
    return EnergyResult.from_parts({"bulk": res.value}, res.error, provenance={"q_max": q_max},
                                   units="density")


# --- Lamb-shift prescriptions ---------------------------------------------------------------

def ssz_integrand(u, n_curve, delta_chi_curve, rho: float) -> float:
    return -u**3 * _curve(n_curve)(u) * _curve(delta_chi_curve)(u) / (4 * PI2 * rho)


def ssz_shift(n_curve, delta_chi_curve, rho: float, spec: IntegralSpec = DEFAULT_SPEC,
              u_max: Optional[float] = None) -> EnergyResult:
    """Shift from the variation of the Schwinger energy with the background index."""
    v, e = _wick(lambda u: ssz_integrand(u, n_curve, delta_chi_curve, rho), spec, u_max)
    return EnergyResult.from_parts({"shift": v}, e, units="shift")


def mss_shift(n_curve, alpha_I, alpha_II, rho: float, spec: IntegralSpec = DEFAULT_SPEC,
              u_max: Optional[float] = None, background_only: bool = False) -> EnergyResult:
    """Single-dipole variant: Delta chi = rho (alpha_II - alpha_I).

    ``background_only`` replaces n by n - 1 (presence/absence of the host).
    """
    n, a1, a2 = _curve(n_curve), _curve(alpha_I), _curve(alpha_II)
    off = 1.0 if background_only else 0.0
    v, e = _wick(lambda u: -u**3 * (n(u) - off) * (a2(u) - a1(u)) / (4 * PI2), spec, u_max)
    return EnergyResult.from_parts({"shift": v}, e, provenance={"background_only": background_only},
                                   units="shift")


def onsager_radiative_prefactor() -> float:
    """Ratio of the cavity radiative term to the MSS background term: 2 x (5/6 + 1/3)."""
    perp, par = radiative_bracket()
    return 2 * (perp + par)


def onsager_shift(n_curve, alpha_I, alpha_II, xi: float, spec: IntegralSpec = DEFAULT_SPEC,
                  u_max: Optional[float] = None) -> EnergyResult:
    """Shift of a dipole in a small empty cavity of radius xi, to first order in n - 1.

    radiative: prefactor x MSS background term; near field:
    -(1/2pi^2) Im int dw (n-1) Delta alpha [1/xi^3 + w^2/xi].
    """
    if xi >= 1:
        raise BranchOutOfRange(f"cavity radius xi = {xi} is not small against the resonance wavelength")
    n, a1, a2 = _curve(n_curve), _curve(alpha_I), _curve(alpha_II)
    bgm = mss_shift(n_curve, alpha_I, alpha_II, 1.0, spec, u_max, background_only=True)
    near_f = lambda u: -(n(u) - 1) * (a2(u) - a1(u)) * (1 / xi**3 - u * u / xi) / (2 * PI2)
    v, e = _wick(near_f, spec, u_max)
    pref = onsager_radiative_prefactor()
    return EnergyResult.from_parts({"radiative": pref * bgm.value, "near_field": v},
                                   pref * bgm.error_estimate + e, provenance={"prefactor": pref},
                                   units="shift")
