"""Quadrature on semi-infinite domains: Wick-rotated frequency integrals,
radial integrals (optionally along a complex ray) and momentum integrals.

Adaptive Gauss-Kronrod work is delegated to ``scipy.integrate.quad``; this
module adds domain splitting, tail maps, the decay and reality checks, and
explicit error reporting.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from .errors import InvalidParameter, NonDecayingIntegrand, ToleranceNotMet


class TailMap(enum.Enum):
    EXP = "exp"
    ALGEBRAIC = "algebraic"


@dataclass(frozen=True)
class IntegralSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 200
    tail_map: TailMap = TailMap.ALGEBRAIC

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InvalidParameter("tolerance", "tolerances must be positive")
        if self.max_subdivisions < 16:
            raise InvalidParameter("max_subdivisions", "must be at least 16")

    def refined(self, factor: float = 10.0) -> "IntegralSpec":
        return IntegralSpec(self.rel_tol / factor, self.abs_tol / factor,
                            self.max_subdivisions * 2, self.tail_map)


DEFAULT_SPEC = IntegralSpec()


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float

    def __iter__(self):
        yield self.value
        yield self.error


@dataclass
class SpectralCurve:
    """Sampled function of frequency with a units tag.

    ``axis`` is "imag" when the abscissa u stands for omega = i u.  Outside
    the sampled range the curve returns ``tail`` (default: the last sample).
    """

    x: np.ndarray
    y: np.ndarray
    axis: str = "imag"
    units: str = "omega0"
    tail: Optional[complex] = None

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y)
        if self.x.ndim != 1 or self.x.shape != self.y.shape or self.x.size < 2:
            raise InvalidParameter("curve", "need matching 1-D sample arrays with >= 2 points")
        if np.any(np.diff(self.x) <= 0):
            raise InvalidParameter("curve", "abscissae must be strictly increasing")
        if self.axis not in ("imag", "real"):
            raise InvalidParameter("axis", "must be 'imag' or 'real'")
        self._re = PchipInterpolator(self.x, self.y.real, extrapolate=False)
        self._im = PchipInterpolator(self.x, self.y.imag, extrapolate=False) if np.iscomplexobj(self.y) else None

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        v = self._re(u) + (1j * self._im(u) if self._im is not None else 0.0)
        tail = self.y[-1] if self.tail is None else self.tail
        v = np.where(u > self.x[-1], tail, np.where(u < self.x[0], self.y[0], v))
        return v if v.ndim else v[()]

    @classmethod
    def from_table(cls, path, axis: str = "imag", units: str = "omega0") -> "SpectralCurve":
        """Two- or three-column text table: frequency, value[, imaginary part]."""
        data = np.loadtxt(path, comments="#", ndmin=2)
        if data.shape[1] == 2:
            return cls(data[:, 0], data[:, 1], axis, units)
        if data.shape[1] == 3:
            return cls(data[:, 0], data[:, 1] + 1j * data[:, 2], axis, units)
        raise InvalidParameter("table", "expected two or three columns")


def _quad_real(f, a, b, spec: IntegralSpec, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info = integrate.quad(f, a, b, epsabs=spec.abs_tol * 1e-2, epsrel=spec.rel_tol * 1e-2,
                                        limit=spec.max_subdivisions, points=points, full_output=1)[:3]
    if not math.isfinite(val):
        raise NonDecayingIntegrand(f"integral over [{a}, {b}] is not finite")
    return val, err


def _segment_integral(g: Callable[[float], complex], a: float, b: float, spec: IntegralSpec, is_complex: bool):
    vr, er = _quad_real(lambda t: float(np.real(g(t))), a, b, spec)
    if not is_complex:
        return vr, er
    vi, ei = _quad_real(lambda t: float(np.imag(g(t))), a, b, spec)
    return vr + 1j * vi, math.hypot(er, ei)


def _tail_integral(g, a: float, scale: float, spec: IntegralSpec, is_complex: bool):
    """Integral of g over [a, inf) after mapping to a finite interval."""
    if spec.tail_map is TailMap.EXP:
        def h(t):
            if t >= 1.0:
                return 0.0
            return g(a - scale * math.log1p(-t)) * scale / (1.0 - t)
    else:
        def h(t):
            if t >= 1.0:
                return 0.0
            return g(a + scale * t / (1.0 - t)) * scale / (1.0 - t) ** 2
    return _segment_integral(h, 0.0, 1.0, spec, is_complex)


def _check_decay(g, a: float, scale: float):
    x1, x2 = a + 1e3 * scale, a + 1e5 * scale
    v1, v2 = abs(x1 * g(x1)), abs(x2 * g(x2))
    if not (math.isfinite(v1) and math.isfinite(v2)):
        raise NonDecayingIntegrand("integrand not finite in the tail")
    if v2 > 1e-300 and v2 >= 0.5 * v1:
        raise NonDecayingIntegrand("integrand does not decay faster than 1/x")


def _check_origin(g, a: float, scale: float):
    t1, t2 = 1e-6 * scale, 1e-9 * scale
    try:
        v1, v2 = abs(t1 * g(a + t1)), abs(t2 * g(a + t2))
    except (ZeroDivisionError, FloatingPointError):
        raise NonDecayingIntegrand("integrand singular at the lower endpoint")
    if not (math.isfinite(v1) and math.isfinite(v2)) or (v2 > 1e-300 and v2 >= 0.5 * v1):
        raise NonDecayingIntegrand("integrand not integrable at the lower endpoint")


def integrate_semi_infinite(g: Callable[[float], complex], a: float = 0.0, spec: IntegralSpec = DEFAULT_SPEC,
                            scale: float = 1.0, is_complex: bool = True,
                            breakpoints: Sequence[float] = (), check_origin: bool = False) -> QuadResult:
    """Adaptive integral of g over [a, inf) with geometric domain splitting."""
    if scale <= 0:
        raise InvalidParameter("scale", "must be positive")
    with np.errstate(all="raise"):
        if check_origin:
            _check_origin(g, a, scale)
    _check_decay(g, a, scale)
    edges = sorted({a, *[b for b in breakpoints if b > a], a + scale, a + 10 * scale, a + 100 * scale})
    total, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = _segment_integral(g, lo, hi, spec, is_complex)
        total += v
        err += e
    v, e = _tail_integral(g, edges[-1], 10 * scale, spec, is_complex)
    total += v
    err += e
    if err > max(spec.abs_tol, spec.rel_tol * abs(total)):
        raise ToleranceNotMet(total, err)
    return QuadResult(total, err)


def _assert_real_on_axis(f, scale: float, spec: IntegralSpec):
    for u in (0.1 * scale, 0.7 * scale, 3.0 * scale, 20.0 * scale):
        v = complex(f(u))
        if abs(v.imag) > max(spec.abs_tol, 1e-10 * abs(v.real)):
            raise InvalidParameter("f", f"integrand is not real on the imaginary axis (u={u}, Im={v.imag:.3e})")


def wick_integrate(f, spec: IntegralSpec = DEFAULT_SPEC, scale: float = 1.0,
                   breakpoints: Sequence[float] = ()) -> QuadResult:
    """Integral over u in [0, inf) of f(iu), given as a callable of u.

    The ground-state identity Im int_0^inf phi(w) dw = int_0^inf phi(iu) du
    turns real-axis spectral integrals into this form.
    """
    _assert_real_on_axis(f, scale, spec)
    res = integrate_semi_infinite(lambda u: float(np.real(f(u))), 0.0, spec, scale, is_complex=False,
                                  breakpoints=breakpoints)
    return QuadResult(float(np.real(res.value)), res.error)


def radial_integrate(kernel: Callable, r_min: float, spec: IntegralSpec = DEFAULT_SPEC,
                     spherical: bool = True, ray: complex = 1.0, scale: Optional[float] = None) -> QuadResult:
    """Integral of kernel(r) [4 pi r^2] dr along r = r_min + ray * t, t >= 0.

    A complex ``ray`` (|ray| = 1) rotates the path so that oscillating
    kernels e^{ikr} decay; the kernel must then be analytic in r.
    """
    if r_min < 0:
        raise InvalidParameter("r_min", "must be non-negative")
    if scale is None:
        scale = r_min if r_min > 0 else 1.0
    ray = complex(ray)

    def g(t):
        r = r_min + ray * t
        if ray.imag == 0:
            r = r.real
        w = kernel(r)
        if spherical:
            w = w * 4.0 * math.pi * r * r
        return complex(w * ray)

    return integrate_semi_infinite(g, 0.0, spec, scale, is_complex=True, check_origin=(r_min == 0))


def momentum_integrate(f: Callable, spec: IntegralSpec = DEFAULT_SPEC, mode: str = "integral",
                       rho: Optional[float] = None, scale: float = 1.0,
                       damping: Optional[float] = None) -> complex:
    """Isotropic momentum integral int d^3q/(2 pi)^3 f(q) = (1/2 pi^2) int q^2 f dq.

    ``damping`` multiplies by exp(-(q/damping)^2) (Abel-type regulator for
    conditionally convergent oscillatory tails).  ``mode="mode_count"``
    performs no integral: it applies the lattice regulator
    int d^3q/(2 pi)^3 -> rho to the q-independent value f(inf).
    """
    if mode == "mode_count":
        if rho is None:
            raise InvalidParameter("rho", "mode-count regulator needs the number density")
        return rho * f(math.inf)
    if mode != "integral":
        raise InvalidParameter("mode", f"unknown mode '{mode}'")
    if damping is None:
        g = lambda q: q * q * f(q)
    else:
        g = lambda q: q * q * f(q) * math.exp(-(q / damping) ** 2)
    res = integrate_semi_infinite(g, 0.0, spec, scale, is_complex=True)
    return res.value / (2.0 * math.pi**2)


def semi_infinite_gauss(n: int, scale: float = 1.0):
    """Gauss-Legendre nodes mapped to [0, inf) by u = scale * t/(1 - t)."""
    t, w = np.polynomial.legendre.leggauss(n)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    u = scale * t / (1.0 - t)
    return u, w * scale / (1.0 - t) ** 2


def finite_gauss(n: int, a: float, b: float):
    t, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * (t + 1.0) + a, 0.5 * (b - a) * w
