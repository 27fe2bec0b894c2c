"""Scalar radiative potential and its cluster components.

All functions take the complex wavenumber k (k = omega in natural units;
k = iu on the imaginary axis) and the correlation length xi, which equals
zeta0 because k0 = 1.  The dimensionless argument of the closed forms is
zeta = k*xi.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.special import spherical_jn

from .errors import BranchOutOfRange, GeometricPole, InvalidParameter, ResummationPole
from .green import ComplexDyad, pq_radiative, pq_static, pq_total
from .params import MediumSpec
from .polarizability import phi_free
from .quadrature import DEFAULT_SPEC, IntegralSpec, finite_gauss, radial_integrate

TWO_PI = 2.0 * math.pi


class Branch(enum.Enum):
    CLOSED = "closed"
    SMALL_ZETA = "small_zeta"


class Polarization(enum.Enum):
    PERP = "perp"
    PAR = "par"


def phi0(k):
    """Free-space term -i k^3/(2 pi)."""
    return phi_free(k)


def _check_xi(xi):
    if not (xi > 0):
        raise InvalidParameter("zeta", "correlation length must be positive")


def _pref(k, rho_alpha):
    return -(k**3) / TWO_PI * rho_alpha


def phi1_hs(k, zeta, rho_alpha, branch: Branch = Branch.CLOSED):
    """Two-body hard-sphere potential (no recurrent scattering).

    ``zeta`` is k0*xi; the closed form is evaluated at k*xi.
    """
    _check_xi(zeta)
    z = k * zeta
    if branch is Branch.CLOSED:
        return _pref(k, rho_alpha) * np.exp(2j * z) * (1 / z**3 - 2j / z**2 - 1 / z + 0.5j)
    if abs(z) >= 1.0:
        raise BranchOutOfRange(f"small-zeta branch needs |k xi| < 1 (got {abs(z):.3g})")
    return _pref(k, rho_alpha) * (1 / z**3 + 1 / z + 7j / 6 - z)


def phi1_hs_split(k, zeta, rho_alpha, branch: Branch = Branch.CLOSED) -> Tuple[complex, complex]:
    """(2 phi_perp, phi_par): pair term with the outer propagator projected on
    its radiative and near-field parts.  Both carry the prefactor -k^3/2 pi.
    """
    _check_xi(zeta)
    z = k * zeta
    pre = _pref(k, rho_alpha)
    if branch is Branch.SMALL_ZETA:
        if abs(z) >= 1.0:
            raise BranchOutOfRange(f"small-zeta branch needs |k xi| < 1 (got {abs(z):.3g})")
        return pre * (1 / (2 * z) + 5j / 6), pre * (1 / z**3 + 1 / (2 * z) + 1j / 3)
    e = np.exp(1j * z)
    perp2 = -pre * e / (2 * z**3) * (2 - 2j * z + e * (-2 + 4j * z + 2 * z**2 - 1j * z**3))
    par = pre * e * (1 / z**3 - 1j / z**2)
    return perp2, par


def phi1_overdensity(k, zeta, c: float, rho_alpha):
    """Contact-shell correction for the pair correlation C*xi*delta(r - xi)."""
    _check_xi(zeta)
    if c < 0:
        raise InvalidParameter("overdensity_c", "must be non-negative")
    if c == 0:
        return 0.0 * k
    z = k * zeta
    return _pref(k, rho_alpha) * c * np.exp(2j * z) * (3 / z**3 - 6j / z**2 - 5 / z + 2j + z)


def phi1_overdensity_split(k, zeta, c: float, rho_alpha) -> Tuple[complex, complex]:
    """Radiative / near-field projections of the contact-shell term."""
    xi = zeta
    P, Q = pq_total(xi, k)
    Ps, Qs = pq_static(xi, k)
    w = -(k**4) * rho_alpha * c * xi * 4 * math.pi * xi**2
    return w * (2 * P * (P - Ps) + Q * (Q - Qs)), w * (2 * P * Ps + Q * Qs)


def _ray(k) -> complex:
    """Direction along which e^{ikr} decays: i conj(k)/|k|."""
    return 1j * np.conj(k) / abs(k)


def phi1_hs_quadrature(k, zeta, rho_alpha, spec: IntegralSpec = DEFAULT_SPEC, part: str = "total"):
    """Direct radial integral -k^4 rho alpha int_{r>xi} Tr[G . X] d^3r.

    ``part``: "total" (X = G), "perp2" (X = radiative part), "par"
    (X = near-field part).  Used as the oracle for the closed forms.
    """
    _check_xi(zeta)

    def kern(r):
        P, Q = pq_total(r, k)
        if part == "total":
            tr = 2 * P * P + Q * Q
        else:
            Ps, Qs = pq_static(r, k)
            tr = 2 * P * (P - Ps) + Q * (Q - Qs) if part == "perp2" else 2 * P * Ps + Q * Qs
        return -(k**4) * rho_alpha * tr

    return radial_integrate(kern, zeta, spec, spherical=True, ray=_ray(k), scale=zeta).value


@dataclass(frozen=True)
class PartialSum:
    order: int

    def __post_init__(self):
        if self.order < 0:
            raise InvalidParameter("order", "partial sum order must be >= 0")


RESUMMED = "resummed"


def _recurrent_kernel(r, k, alpha, m_from: int, m_to: Optional[int]):
    """2P^2 sum_m x_P^{2m} + Q^2 sum_m x_Q^{2m} for m in [m_from, m_to]."""
    P, Q = pq_total(r, k)
    xp, xq = (k**2 * alpha * P) ** 2, (k**2 * alpha * Q) ** 2
    if m_to is None:
        sp = xp**m_from / (1 - xp)
        sq = xq**m_from / (1 - xq)
    else:
        n = m_to - m_from + 1
        sp = xp**m_from * (1 - xp**n) / (1 - xp) if xp != 1 else n
        sq = xq**m_from * (1 - xq**n) / (1 - xq) if xq != 1 else n
    return 2 * P * P * sp + Q * Q * sq


def _check_resummation(k, zeta, alpha):
    P, Q = pq_total(zeta, k)
    big = max(abs(k**2 * alpha * P), abs(k**2 * alpha * Q))
    if big >= 1.0:
        raise ResummationPole(f"|k^2 alpha P|, |k^2 alpha Q| reach {big:.3g} >= 1 at r = xi")


def phi1_recurrent(k, zeta, alpha, rho, mode: Union[str, PartialSum] = RESUMMED,
                   spec: IntegralSpec = DEFAULT_SPEC, overdensity_c: float = 0.0):
    """Pair potential with recurrent scattering between the two dipoles.

    The m = 0 term is the closed hard-sphere form; higher terms (or the
    resummed remainder) come from radial quadrature of the P/Q kernel.
    """
    _check_xi(zeta)
    if alpha == 0:
        return 0.0 * k
    base = phi1_hs(k, zeta, rho * alpha) + phi1_overdensity(k, zeta, overdensity_c, rho * alpha)
    if isinstance(mode, PartialSum):
        if mode.order == 0:
            return base
        m_to = mode.order
    elif mode == RESUMMED:
        m_to = None
    else:
        raise InvalidParameter("mode", f"unknown recurrence mode {mode!r}")
    _check_resummation(k, zeta, alpha)
    pre = -(k**4) * rho * alpha
    extra = radial_integrate(lambda r: pre * _recurrent_kernel(r, k, alpha, 1, m_to), zeta, spec,
                             spherical=True, ray=_ray(k), scale=zeta).value
    if overdensity_c:
        extra += pre * overdensity_c * zeta * 4 * math.pi * zeta**2 * _recurrent_kernel(zeta, k, alpha, 1, m_to)
    return base + extra


def recurrent_terms(k, zeta, alpha, rho, m_max: int, spec: IntegralSpec = DEFAULT_SPEC):
    """Individual terms m = 0..m_max of the recurrent series."""
    out = [phi1_hs(k, zeta, rho * alpha)]
    if m_max >= 1:
        _check_resummation(k, zeta, alpha)
    pre = -(k**4) * rho * alpha
    for m in range(1, m_max + 1):
        out.append(radial_integrate(lambda r, m=m: pre * _recurrent_kernel(r, k, alpha, m, m), zeta, spec,
                                    spherical=True, ray=_ray(k), scale=zeta).value)
    return out


@dataclass
class PhiBreakdown:
    total: complex
    perp2: complex
    par: complex
    components: Dict[str, complex] = field(default_factory=dict)


def phi_breakdown(k, medium: MediumSpec, alpha, include_free: bool = True) -> PhiBreakdown:
    """Free, hard-sphere pair and overdensity terms with their split."""
    rho, xi = medium.rho, medium.xi
    ra = rho * alpha
    comps: Dict[str, complex] = {}
    perp2 = par = 0.0
    if include_free:
        comps["free"] = complex(phi0(k))
        perp2 += comps["free"]
    p2, pa = phi1_hs_split(k, xi, ra)
    comps["pair_norec"] = complex(p2 + pa)
    perp2, par = perp2 + p2, par + pa
    c = medium.correlation.overdensity_c
    if c:
        o2, oa = phi1_overdensity_split(k, xi, c, ra)
        comps["overdensity"] = complex(o2 + oa)
        perp2, par = perp2 + o2, par + oa
    return PhiBreakdown(total=complex(sum(comps.values())), perp2=complex(perp2), par=complex(par),
                        components=comps)


# --- momentum-space pair susceptibility -------------------------------------

def _chi2_components(q, k, xi, rho, alpha0, c: float = 0.0, n_nodes: Optional[int] = None):
    """Pair susceptibility (perp, par) on an array of q.

    The near-field j2 part is integrated analytically,
    int_0^X j2(x)/x dx = 1/3 - j1(X)/X; the contact term contributes the
    constant (rho alpha0)^2/3; the radiative remainder uses Gauss-Legendre.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if np.any(q < 0):
        raise InvalidParameter("q", "must be non-negative")
    ra2 = (rho * alpha0) ** 2
    X = q * xi
    with np.errstate(divide="ignore", invalid="ignore"):
        j1x = np.where(X > 1e-4, spherical_jn(1, X) / np.where(X > 1e-4, X, 1.0), 1 / 3 - X**2 / 30)
    static = 1 / 3 - j1x
    if n_nodes is None:
        n_nodes = int(min(2000, 96 + 4 * (X.max() if X.size else 0) + 8 * abs(k) * xi))
    r, w = finite_gauss(n_nodes, 0.0, xi)
    Pr, Qr = pq_radiative(r, k)
    A = 2 * Pr + Qr
    B = Pr - Qr
    qr = np.outer(q, r)
    j0 = spherical_jn(0, qr)
    j2 = spherical_jn(2, qr)
    meas = 4 * math.pi * r**2 * w
    rad_par = (j0 * A + 2 * j2 * B) @ meas / 3
    rad_perp = (j0 * A - j2 * B) @ meas / 3
    par = ra2 * (1 / 3 + 2 * static) + k**2 * rho**2 * alpha0**2 * rad_par
    perp = ra2 * (1 / 3 - static) + k**2 * rho**2 * alpha0**2 * rad_perp
    if c:
        P, Q = pq_total(xi, k)
        j0s, j2s = spherical_jn(0, X), spherical_jn(2, X)
        kpar = ((2 * P + Q) * j0s + 2 * (P - Q) * j2s) / 3
        kperp = ((2 * P + Q) * j0s - (P - Q) * j2s) / 3
        shell = -(k**2) * rho**2 * alpha0**2 * c * xi * 4 * math.pi * xi**2
        par = par + shell * kpar
        perp = perp + shell * kperp
    return perp, par


def chi2_q(q, k, polarization: Polarization, medium: MediumSpec, alpha0):
    """Two-body susceptibility kernel for one polarization channel."""
    perp, par = _chi2_components(q, k, medium.xi, medium.rho, alpha0, medium.correlation.overdensity_c)
    out = par if polarization is Polarization.PAR else perp
    return out if np.ndim(q) else out[0]


def chi_qc(q, k, medium: MediumSpec, alpha0):
    """Quasicrystalline (geometric) resummation rho a0 / (1 - chi2/(rho a0))."""
    ra = medium.rho * alpha0
    perp, par = _chi2_components(q, k, medium.xi, medium.rho, alpha0, medium.correlation.overdensity_c)
    out = []
    for ch in (perp, par):
        den = 1 - ch / ra
        if np.any(np.abs(den) < 1e-12):
            raise GeometricPole("quasicrystalline denominator vanishes")
        v = ra / den
        out.append(v if np.ndim(q) else v[0])
    return tuple(out)


class Chi2Kernel:
    """Pair-susceptibility evaluator bound to a medium and bare polarizability.

    ``alpha0`` is a callable of k.  Calling the kernel returns (perp, par)
    arrays for an array of q at one k.
    """

    def __init__(self, medium: MediumSpec, alpha0, n_nodes: Optional[int] = None):
        self.medium = medium
        self.alpha0 = alpha0
        self.n_nodes = n_nodes

    def __call__(self, q, k):
        m = self.medium
        return _chi2_components(q, k, m.xi, m.rho, self.alpha0(k), m.correlation.overdensity_c, self.n_nodes)

    def large_q(self, k):
        """q -> inf limit: the near-field and contact parts survive only in par."""
        ra2 = (self.medium.rho * self.alpha0(k)) ** 2
        return 0.0 * ra2, ra2


# --- recurrent pair susceptibility ------------------------------------------

def chi2_recurrent(r, k, alpha, rho, medium: MediumSpec, variant: str = "inclusive") -> ComplexDyad:
    """Real-space pair susceptibility with recurrent scattering resummed.

    ``variant="inclusive"`` keeps the m = 0 term; ``"recurrent"`` keeps m >= 1.
    Inside the exclusion sphere the pair correlation vanishes.
    """
    r = np.asarray(r, dtype=float).reshape(3)
    d = float(np.linalg.norm(r))
    if d == 0:
        raise InvalidParameter("r", "pair susceptibility undefined at r = 0")
    if d < medium.xi:
        return ComplexDyad(np.zeros((3, 3)))
    P, Q = pq_total(d, k)
    xp, xq = (k**2 * alpha * P) ** 2, (k**2 * alpha * Q) ** 2
    if abs(xp) >= 1 or abs(xq) >= 1:
        raise ResummationPole("recurrent resummation diverges at this separation")
    if variant == "inclusive":
        fp, fq = P / (1 - xp), Q / (1 - xq)
    elif variant == "recurrent":
        fp, fq = P * xp / (1 - xp), Q * xq / (1 - xq)
    else:
        raise InvalidParameter("variant", "must be 'inclusive' or 'recurrent'")
    n = r / d
    rr = np.outer(n, n)
    return ComplexDyad(-(k**2) * (rho * alpha) ** 2 * (fp * (np.eye(3) - rr) + fq * rr))


def chi2_recurrent_zero_mode(alpha_t: float, rho: float, xi: float) -> float:
    """Long-wavelength estimate (1/3)(rho a)^2 (a/4 pi xi^3)^2 of the m >= 1 part."""
    return (rho * alpha_t) ** 2 * (alpha_t / (4 * math.pi * xi**3)) ** 2 / 3.0
