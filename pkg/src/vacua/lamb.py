"""Lamb shifts and vacuum-energy densities of random dipole media.

Frequency integrals are done on the imaginary axis (omega = iu), where every
integrand is real.  Shifts are in units of hbar*omega0, energy densities in
units of hbar*omega0*(omega0/c)^3 (i.e. divide by rho for the per-dipole
value).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import DivergentRenormalization, InvalidParameter, MissingKernel, SeriesDiverging
from .params import DipoleSpecies, MediumSpec, derive_groups
from .phi import Chi2Kernel, _recurrent_kernel, phi1_hs_split, phi1_overdensity_split
from .polarizability import alpha_bare_iu, alpha_free_iu
from .quadrature import (DEFAULT_SPEC, IntegralSpec, QuadResult, finite_gauss, radial_integrate,
                         semi_infinite_gauss, wick_integrate)

TWO_PI = 2.0 * math.pi
_MAX_ORDER = 40


@dataclass
class EnergyResult:
    """Energy value with additive breakdown and provenance.

    ``units`` is "shift" (hbar omega0), "density" (hbar omega0 (omega0/c)^3)
    or "coefficient" (pure number).  ``reference`` holds closed-form
    comparators that are not part of the sum.
    """

    value: float
    breakdown: Dict[str, float] = field(default_factory=dict)
    error_estimate: float = 0.0
    provenance: Dict[str, object] = field(default_factory=dict)
    reference: Dict[str, float] = field(default_factory=dict)
    units: str = "shift"
    density: Optional[float] = None

    @classmethod
    def from_parts(cls, parts: Mapping[str, float], error: float = 0.0, **kw) -> "EnergyResult":
        parts = {k: float(v) for k, v in parts.items()}
        return cls(value=float(sum(parts.values())), breakdown=parts, error_estimate=abs(float(error)), **kw)

    @property
    def per_dipole(self) -> float:
        """Density divided by rho (units of hbar omega0)."""
        if self.units != "density" or not self.density:
            raise InvalidParameter("per_dipole", "only defined for densities with rho > 0")
        return self.value / self.density

    def to_dict(self) -> dict:
        return {"value": self.value, "units": self.units, "density": self.density,
                "breakdown": dict(self.breakdown), "error_estimate": self.error_estimate,
                "reference": dict(self.reference), "provenance": dict(self.provenance)}


# --- free space ---------------------------------------------------------------

def _runaway_check(g: float, cutoff: float):
    # 1 + alpha0 phi0 on the imaginary axis is (1 + u^2 - g u^3)/(1 + u^2)
    if g * cutoff >= 1.0:
        raise DivergentRenormalization("g * cutoff >= 1: the runaway pole lies inside the cutoff")
    u = np.linspace(0.0, cutoff, 2001)
    if np.any(1 + u**2 - g * u**3 <= 0):
        raise DivergentRenormalization("1 + alpha0*phi0 vanishes below the cutoff")


def _contour_im_integral(f: Callable[[complex], complex], cutoff: float, spec: IntegralSpec):
    """Im int_0^Lambda f(w) dw for f analytic in the first quadrant.

    The real segment is replaced by the imaginary segment plus the arc
    |w| = Lambda, where the integrand is smooth.
    """
    opts = dict(epsabs=spec.abs_tol * 1e-3, epsrel=spec.rel_tol * 1e-2, limit=spec.max_subdivisions)
    pts = [p for p in (1.0, 10.0, 100.0, 1e3, 1e4) if p < cutoff]
    v1, e1 = integrate.quad(lambda u: float(np.real(f(1j * u))), 0.0, cutoff, points=pts or None, **opts)

    def arc(t):
        w = cutoff * np.exp(1j * t)
        return float(np.imag(f(w) * 1j * w))

    v2, e2 = integrate.quad(arc, math.pi / 2, 0.0, **opts)
    return v1 + v2, e1 + e2


def _free_integrand(species: DipoleSpecies, kind: str, renormalized: bool):
    g = species.g

    def lin(w):
        a0 = TWO_PI * g / (1 - w * w)
        x = a0 * (-1j * w**3 / TWO_PI)
        if not renormalized:
            # alpha0 phi0 - i g w, exact cancellation of the linear growth
            return -1j * g * w / (1 - w * w)
        if kind == "shift":
            return x / (1 + x) - 1j * g * w
        return np.log(1 + x) - 1j * g * w

    return lin


def free_space_lamb_shift(species: DipoleSpecies, renormalized: bool = False,
                          spec: IntegralSpec = DEFAULT_SPEC) -> EnergyResult:
    """Free-space shift (1/2pi)[Im int_0^Lambda alpha phi0 dw - g Lambda^2/2].

    The subtracted g*Lambda^2/2 is the omega-linear free-electron
    self-energy counterterm.  By default alpha is expanded to first order in
    alpha0; ``renormalized=True`` keeps the full alpha0/(1 + alpha0 phi0),
    whose cutoff-dependent radiative-reaction terms grow like g^3 Lambda^4.
    """
    lam = species.require_cutoff()
    if renormalized:
        _runaway_check(species.g, lam)
    val, err = _contour_im_integral(_free_integrand(species, "shift", renormalized), lam, spec)
    g = species.g
    return EnergyResult.from_parts(
        {"free": val / TWO_PI}, err / TWO_PI,
        provenance={"route": "contour", "cutoff": lam, "counterterm": "g*Lambda^2/2",
                    "renormalized": renormalized},
        reference={"closed_log": g * math.log(lam) / TWO_PI,
                   "closed_leading": g * math.log(lam * lam - 1) / (2 * TWO_PI)},
    )


def free_space_lamb_energy(rho: float, species: DipoleSpecies, renormalized: bool = False,
                           spec: IntegralSpec = DEFAULT_SPEC) -> EnergyResult:
    """Free-space Lamb energy density (rho/2pi)[Im int ln(1 + alpha0 phi0) - g Lambda^2/2]."""
    if rho < 0:
        raise InvalidParameter("rho", "must be non-negative")
    lam = species.require_cutoff()
    if renormalized:
        _runaway_check(species.g, lam)
    val, err = _contour_im_integral(_free_integrand(species, "energy", renormalized), lam, spec)
    g = species.g
    return EnergyResult.from_parts(
        {"free": rho * val / TWO_PI}, rho * err / TWO_PI,
        provenance={"route": "contour", "cutoff": lam, "counterterm": "g*Lambda^2/2",
                    "renormalized": renormalized},
        reference={"closed_log": rho * g * math.log(lam) / TWO_PI},
        units="density", density=rho,
    )


# --- O(rho) scattering shift ----------------------------------------------------

def small_zeta_shift_closed(species: DipoleSpecies, medium: MediumSpec) -> float:
    """Small-zeta0 expansion of the hard-sphere scattering shift (London term first)."""
    g, z = species.g, medium.zeta0
    bracket = (z**-3 - 1 / z) + 14 / (3 * math.pi) * (5 / 6 - np.euler_gamma - math.log(2 * z))
    return -medium.rho * math.pi * g * g / 4 * bracket


def _alpha_iu(species: DipoleSpecies, bare: bool, xi: Optional[float] = None):
    """alpha(iu); the free form is cut at half the runaway frequency 1/g.

    Pair integrands decay like exp(-2 u xi), so the cut is harmless as long
    as 2 xi u_top is large; otherwise the renormalized model is unusable.
    """
    g = species.g
    if bare:
        return lambda u: alpha_bare_iu(u, g)
    u_top = 0.5 / g
    if xi is not None and 2 * xi * u_top < 40:
        raise DivergentRenormalization(
            f"runaway pole at u ~ 1/g is not screened by exp(-2 u xi) (2 xi/g = {2 * xi / g:.3g}); use bare alpha")

    def a(u):
        return alpha_free_iu(u, g) if u < u_top else 0.0
    return a


def _phi_split_iu(u, medium: MediumSpec, alpha):
    k = 1j * u
    ra = medium.rho * alpha
    p2, pa = phi1_hs_split(k, medium.xi, ra)
    c = medium.correlation.overdensity_c
    if c:
        o2, oa = phi1_overdensity_split(k, medium.xi, c, ra)
        p2, pa = p2 + o2, pa + oa
    return float(np.real(p2)), float(np.real(pa))


def _wick_breaks(xi: float):
    return [1.0 / xi, 10.0 / xi]


def _small_u(u):
    return max(u, 1e-300)


def _beyond_pair_range(u, xi):
    # pair integrands carry exp(-2 u xi); past this only q-space roundoff remains
    return 2 * u * xi > 80


def _series_term(species: DipoleSpecies, medium: MediumSpec, m: int, bare: bool, spec: IntegralSpec):
    """E_m = (1/2pi) int du alpha phi_m(iu) with phi_m from radial quadrature."""
    alpha = _alpha_iu(species, bare, medium.xi)
    xi, rho, c = medium.xi, medium.rho, medium.correlation.overdensity_c
    inner = IntegralSpec(spec.rel_tol * 1e-2, spec.abs_tol * 1e-6, spec.max_subdivisions, spec.tail_map)

    def f(u):
        u = _small_u(u)
        k = 1j * u
        a = float(alpha(u))
        pre = -(k**4) * rho * a
        kern = lambda r: pre * _recurrent_kernel(r, k, a, m, m)
        val = radial_integrate(kern, xi, inner, spherical=True, ray=1.0, scale=min(xi, 1.0 / u)).value
        if c:
            val += pre * c * xi * 4 * math.pi * xi**2 * _recurrent_kernel(xi, k, a, m, m)
        return float(np.real(a * val)) / TWO_PI

    return wick_integrate(f, spec, scale=1.0, breakpoints=_wick_breaks(xi))


def scattering_lamb_shift_rho1(species: DipoleSpecies, medium: MediumSpec, recurrence: str = "norec",
                               bare: bool = False, spec: IntegralSpec = DEFAULT_SPEC,
                               max_order: Optional[int] = None) -> EnergyResult:
    """O(rho) scattering Lamb shift (1/2pi) int du alpha phi^(1)(iu).

    ``recurrence="norec"`` uses the closed pair potential and reports its
    radiative / near-field split; ``"full"`` adds recurrent-scattering terms
    m = 1, 2, ... until they drop below tolerance (or up to ``max_order``).
    """
    alpha = _alpha_iu(species, bare, medium.xi)
    xi = medium.xi

    def part(idx):
        def f(u):
            u = _small_u(u)
            a = float(alpha(u))
            return a * _phi_split_iu(u, medium, a)[idx] / TWO_PI
        return wick_integrate(f, spec, scale=1.0, breakpoints=_wick_breaks(xi))

    rad, near = part(0), part(1)
    parts = {"radiative": rad.value, "near_field": near.value}
    err = rad.error + near.error
    ref = {}
    if medium.zeta0 < 1:
        ref["closed_small_zeta"] = small_zeta_shift_closed(species, medium)
    prov = {"route": "wick", "recurrence": recurrence, "polarizability": "bare" if bare else "free"}
    if recurrence == "norec":
        return EnergyResult.from_parts(parts, err, provenance=prov, reference=ref)
    if recurrence != "full":
        raise InvalidParameter("recurrence", "must be 'norec' or 'full'")
    groups = derive_groups(species, medium)
    if groups.recur_ratio >= 1:
        raise SeriesDiverging(f"recur_ratio = {groups.recur_ratio:.3g} >= 1")
    base = abs(rad.value + near.value)
    prev = None
    m = 1
    terms = []
    while True:
        t = _series_term(species, medium, m, bare, spec)
        terms.append(t.value)
        parts[f"recurrent_m{m}"] = t.value
        err += t.error
        if prev is not None and abs(t.value) > abs(prev):
            raise SeriesDiverging(f"recurrent term m={m} exceeds term m={m - 1}")
        prev = t.value
        if max_order is not None and m >= max_order:
            break
        if abs(t.value) <= spec.rel_tol * base:
            break
        if m >= _MAX_ORDER:
            raise SeriesDiverging(f"recurrent series not converged after {m} terms")
        m += 1
    prov["recurrent_terms"] = terms
    return EnergyResult.from_parts(parts, err, provenance=prov, reference=ref)


def recurrent_series_terms(species: DipoleSpecies, medium: MediumSpec, m_max: int, bare: bool = False,
                           spec: IntegralSpec = DEFAULT_SPEC) -> list:
    """Shift contributions E_m, m = 0..m_max, all from radial quadrature."""
    return [_series_term(species, medium, m, bare, spec).value for m in range(m_max + 1)]


def vacuum_energy_rho2(species: DipoleSpecies, medium: MediumSpec, recurrence: str = "norec",
                       bare: bool = False, spec: IntegralSpec = DEFAULT_SPEC,
                       max_order: Optional[int] = None) -> EnergyResult:
    """O(rho^2) vacuum energy density.

    No recurrence: (rho/2) times the O(rho) scattering shift.  Full: the
    recurrent order m of the shift enters with weight rho/(m + 2), the
    coupling-constant integration weight of a term of order alpha^(2m+2).
    """
    rho = medium.rho
    if recurrence == "norec":
        e = scattering_lamb_shift_rho1(species, medium, "norec", bare, spec)
        return EnergyResult(value=rho / 2 * e.value,
                            breakdown={k: rho / 2 * v for k, v in e.breakdown.items()},
                            error_estimate=rho / 2 * e.error_estimate,
                            provenance={"route": "rho/2 * shift", "recurrence": "norec"},
                            reference={k: rho / 2 * v for k, v in e.reference.items()},
                            units="density", density=rho)
    if recurrence != "full":
        raise InvalidParameter("recurrence", "must be 'norec' or 'full'")
    groups = derive_groups(species, medium)
    if groups.recur_ratio >= 1:
        raise SeriesDiverging(f"recur_ratio = {groups.recur_ratio:.3g} >= 1")
    parts, err = {}, 0.0
    base = None
    m = 0
    while True:
        t = _series_term(species, medium, m, bare, spec)
        parts[f"m{m}"] = rho * t.value / (m + 2)
        err += rho * t.error / (m + 2)
        if base is None:
            base = abs(t.value)
        elif abs(t.value) <= spec.rel_tol * base:
            break
        elif m >= _MAX_ORDER:
            raise SeriesDiverging(f"recurrent series not converged after {m} terms")
        if max_order is not None and m >= max_order:
            break
        m += 1
    return EnergyResult.from_parts(parts, err, provenance={"route": "series weights 1/(m+2)",
                                                           "recurrence": "full"},
                                   units="density", density=rho)


# --- momentum-space routes --------------------------------------------------------

def _u_rule(xi: float, n: int):
    """Composite Gauss rule on [0, inf) adapted to pair integrands.

    Panels resolve the resonance scale u ~ 1 and the exclusion scale
    u ~ 1/xi; the mapped tail carries the exp(-2 u xi) decay.
    """
    top = max(2.0, 1.0 / xi)
    u1, w1 = finite_gauss(n, 0.0, 1.0)
    u2, w2 = finite_gauss(n, 1.0, top)
    u3, w3 = semi_infinite_gauss(2 * n, 0.5 / xi)
    return np.concatenate([u1, u2, top + u3]), np.concatenate([w1, w2, w3])


def _fixed_wick(f, xi: float, n: int):
    """Fixed-rule Wick integral with an error estimate from the half rule."""
    u, w = _u_rule(xi, n)
    fine = float(np.dot([f(x) for x in u], w))
    u, w = _u_rule(xi, max(n // 2, 4))
    coarse = float(np.dot([f(x) for x in u], w))
    return QuadResult(fine, abs(fine - coarse))


def _q_grid(u: float, xi: float, kappa: float, n: int):
    qc = kappa * max(1.0 / xi, u)
    q, w = finite_gauss(n, 0.0, 4.0 * qc)
    return q, w * q * q * np.exp(-((q / qc) ** 2)) / (2 * math.pi**2)


def _large_q(kernel, k):
    if hasattr(kernel, "large_q"):
        return kernel.large_q(k)
    perp, par = kernel(np.array([1e9]), k)
    return perp[0], par[0]


def _default_q_opts(q_opts):
    opts = {"kappa": 20.0, "n": 600, "n_u": 16}
    if q_opts:
        opts.update(q_opts)
    return opts


def lamb_shift_from_chi(chi, species: DipoleSpecies, medium: MediumSpec,
                        q_opts: Optional[dict] = None) -> EnergyResult:
    """Average Lamb shift from a susceptibility kernel chi(q, k) -> (perp, par).

    The term linear in rho*alpha0 is the free-space shift (taken from
    free_space_lamb_shift); the remainder is integrated over q on the
    imaginary axis with a Gaussian convergence factor for oscillating tails,
    and its q-independent limit is counted with the lattice regulator
    int d^3q/(2pi)^3 -> rho.  A kernel may declare its single-scatterer
    part through ``first_order(k)``; a kernel with ``single_scatterer =
    False`` carries no free-space term.
    """
    o = _default_q_opts(q_opts)
    rho, xi, g = medium.rho, medium.xi, species.g

    def f(u):
        if _beyond_pair_range(u, xi):
            return 0.0
        u = _small_u(u)
        k = 1j * u
        a0 = float(alpha_bare_iu(u, g))
        ra = chi.first_order(k) if hasattr(chi, "first_order") else rho * a0
        q, w = _q_grid(u, xi, o["kappa"], o["n"])
        perp, par = chi(q, k)
        kg = u * u / (u * u + q * q)
        inf_perp, inf_par = _large_q(chi, k)
        f_inf = np.real(inf_par / (1 + inf_par)) - ra
        fq = 2 * (kg * perp / (1 + kg * perp) - kg * ra) + (par / (1 + par) - ra)
        val = float(np.real(fq - f_inf) @ w) + rho * float(f_inf)
        return val / (TWO_PI * rho)

    corr = _fixed_wick(f, xi, o["n_u"])
    parts = {"correlated": corr.value}
    err = corr.error
    if species.cutoff is not None and getattr(chi, "single_scatterer", True):
        free = free_space_lamb_shift(species)
        parts = {"free": free.value, **parts}
        err += free.error_estimate
    return EnergyResult.from_parts(parts, err, provenance={"route": "momentum", **o})


class ZeroKernel:
    """Vanishing susceptibility: no scatterers, no shift."""

    single_scatterer = False

    def __call__(self, q, k):
        z = np.zeros_like(np.asarray(q, dtype=float))
        return z, z.copy()

    def large_q(self, k):
        return 0.0, 0.0

    def first_order(self, k):
        return 0.0


class BareKernel:
    """First-order susceptibility rho*alpha0 (no spatial dispersion)."""

    def __init__(self, medium: MediumSpec, species: DipoleSpecies):
        self.rho, self.g = medium.rho, species.g

    def _ra(self, k):
        return self.rho * float(alpha_bare_iu(np.imag(k), self.g)) if np.real(k) == 0 else \
            self.rho * 2 * math.pi * self.g / (1 - k * k)

    def __call__(self, q, k):
        v = self._ra(k) * np.ones_like(np.asarray(q, dtype=float))
        return v, v.copy()

    def large_q(self, k):
        v = self._ra(k)
        return v, v


class QuasicrystallineKernel:
    """Geometric resummation rho a0/(1 - chi2/(rho a0)) of the pair kernel."""

    def __init__(self, medium: MediumSpec, species: DipoleSpecies, n_nodes: Optional[int] = None):
        self.rho, self.g = medium.rho, species.g
        self.pair = Chi2Kernel(medium, self._a0, n_nodes)

    def _a0(self, k):
        return float(alpha_bare_iu(np.imag(k), self.g)) if np.real(k) == 0 else 2 * math.pi * self.g / (1 - k * k)

    def __call__(self, q, k):
        ra = self.rho * self._a0(k)
        perp, par = self.pair(q, k)
        return ra / (1 - perp / ra), ra / (1 - par / ra)

    def large_q(self, k):
        ra = self.rho * self._a0(k)
        p, a = self.pair.large_q(k)
        return ra / (1 - p / ra), ra / (1 - a / ra)


def pair_kernel(medium: MediumSpec, species: DipoleSpecies, n_nodes: Optional[int] = None) -> Chi2Kernel:
    g = species.g
    return Chi2Kernel(medium, lambda k: float(alpha_bare_iu(np.imag(k), g)) if np.real(k) == 0
                      else 2 * math.pi * g / (1 - k * k), n_nodes)


def vacuum_energy_qc(species: DipoleSpecies, medium: MediumSpec,
                     q_opts: Optional[dict] = None) -> EnergyResult:
    """Quasicrystalline vacuum energy density.

    F = F_free + (1/2pi) int du int d^3q/(2pi)^3 sum_p w_p [ln(1 + y_p) - y_p],
    y_p = rho a0 k^2 G_p - chi2_p/(rho a0), w = (2, 1).  The linear term in
    y is the coincident-point (single-dipole) contribution and is replaced by
    the free-space Lamb energy.

    The -y^2/2 term equals (1/2) rho a0 phi^(1,0) exactly and is taken from
    the closed pair potential: y and chi2 jump at r = xi, and any q-space
    convergence factor smears the jumps into a spurious overlap of relative
    size ~1/kappa.  Only the O(rho^3) remainder is integrated in q.
    """
    o = _default_q_opts(q_opts)
    rho, xi, g = medium.rho, medium.xi, species.g
    pair = pair_kernel(medium, species)

    def f(u):
        if _beyond_pair_range(u, xi):
            return 0.0
        u = _small_u(u)
        k = 1j * u
        ra = rho * float(alpha_bare_iu(u, g))
        q, w = _q_grid(u, xi, o["kappa"], o["n"])
        perp, par = pair(q, k)
        kg = u * u / (u * u + q * q)
        y_perp = ra * kg - np.real(perp) / ra
        y_par = ra - np.real(par) / ra
        if np.any(y_perp <= -1) or np.any(y_par <= -1):
            raise DivergentRenormalization("quasicrystalline logarithm leaves its principal branch")
        fq = 2 * _log_remainder3(y_perp) + _log_remainder3(y_par)
        return float(fq @ w) / TWO_PI

    pair2 = vacuum_energy_rho2(species, medium, "norec", bare=True)
    high = _fixed_wick(f, xi, o["n_u"])
    parts = {"pair": pair2.value, "higher_order": high.value}
    err = pair2.error_estimate + high.error
    prov = {"route": "closed pair term + momentum remainder", **o}
    if species.cutoff is not None:
        free = free_space_lamb_energy(rho, species)
        parts = {"free_lamb": free.value, **parts}
        err += free.error_estimate
        # lattice-regulated atomic piece 3 Im ln alpha0 per mode (Im = pi above resonance)
        prov["atomic_mode_count"] = 3 * rho * (species.cutoff - 1) / 2
    return EnergyResult.from_parts(parts, err, provenance=prov, units="density", density=rho)


def _log_remainder3(y):
    """ln(1 + y) - y + y^2/2, accurate for small y."""
    y = np.asarray(y, dtype=float)
    out = np.log1p(y) - y + 0.5 * y * y
    small = np.abs(y) < 1e-3
    ys = y[small]
    out[small] = ys**3 / 3 - ys**4 / 4 + ys**5 / 5 - ys**6 / 6
    return out


def cluster_series_vacuum(kernels: Mapping[int, object], order: int, species: DipoleSpecies,
                          medium: MediumSpec,
                          q_opts: Optional[dict] = None) -> EnergyResult:
    """Vacuum energy density from the cluster expansion of the susceptibility.

    ``kernels[n]`` evaluates chi^(n,0)(q, k) -> (perp, par) for n = 1..order.
    Order-n terms carry the weight 1/n of the coupling-constant integration;
    only n <= 3 is spelled out.
    """
    if order < 2 or order > 3:
        raise InvalidParameter("order", "cluster series is implemented for order 2 and 3")
    for n in range(1, order + 1):
        if n not in kernels or kernels[n] is None:
            raise MissingKernel(n)
    o = _default_q_opts(q_opts)
    rho, xi = medium.rho, medium.xi

    def channel(kg, c1, c2, c3):
        t2 = 0.5 * (kg * c2 - (kg * c1) ** 2)
        if order == 2:
            return t2
        t3 = ((kg * c1) ** 3 + kg * c3 - 2 * c1 * c2 * kg**2) / 3
        return t2 + t3

    def f(u):
        if _beyond_pair_range(u, xi):
            return 0.0
        u = _small_u(u)
        k = 1j * u
        q, w = _q_grid(u, xi, o["kappa"], o["n"])
        kg = u * u / (u * u + q * q)
        ev = {n: kernels[n](q, k) for n in range(1, order + 1)}
        inf = {n: _large_q(kernels[n], k) for n in range(1, order + 1)}
        c3 = ev.get(3, (0.0, 0.0))
        c3i = inf.get(3, (0.0, 0.0))
        perp = channel(kg, ev[1][0], ev[2][0], c3[0])
        par = channel(1.0, ev[1][1], ev[2][1], c3[1])
        par_inf = channel(1.0, inf[1][1], inf[2][1], c3i[1])
        val = float(np.real(2 * perp + par - par_inf) @ w) + rho * float(np.real(par_inf))
        return val / TWO_PI

    corr = _fixed_wick(f, xi, o["n_u"])
    parts = {"clusters": corr.value}
    err = corr.error
    if species.cutoff is not None:
        free = free_space_lamb_energy(rho, species)
        parts = {"free_lamb": free.value, **parts}
        err += free.error_estimate
    return EnergyResult.from_parts(parts, err, provenance={"route": "cluster series", "order": order, **o},
                                   units="density", density=rho)


def default_kernels(medium: MediumSpec, species: DipoleSpecies) -> Dict[int, object]:
    """Shipped kernels: n = 1 (bare) and n = 2 (pair correlation)."""
    return {1: BareKernel(medium, species), 2: pair_kernel(medium, species)}
