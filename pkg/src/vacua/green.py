"""Free-space dyadic Green functions.

Convention: G(r) = P(r) (I - rr) + Q(r) rr with
    P = -e^{ikr}/(4 pi r) [1 + i/(kr) - 1/(kr)^2]
    Q = -e^{ikr}/(4 pi r) [-2i/(kr) + 2/(kr)^2]
The static (near-field) part is the principal value of grad grad (-1/4 pi r)
divided by k^2; the radiative part is the remainder.  The contact term
k^-2 (I/3) delta(r) is never materialized here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, OnShellPole, SingularPoint

FOUR_PI = 4.0 * math.pi
_SERIES_CUT = 0.05
_NSERIES = 10


class ComplexDyad:
    """3x3 complex tensor with trace and projection helpers."""

    __slots__ = ("m",)

    def __init__(self, m):
        self.m = np.asarray(m, dtype=complex).reshape(3, 3)

    def __array__(self, dtype=None, copy=None):
        return self.m if dtype is None else self.m.astype(dtype)

    def __repr__(self):
        return f"ComplexDyad({self.m!r})"

    def __add__(self, other):
        return ComplexDyad(self.m + np.asarray(other))

    def __sub__(self, other):
        return ComplexDyad(self.m - np.asarray(other))

    def __matmul__(self, other):
        return ComplexDyad(self.m @ np.asarray(other))

    def trace(self) -> complex:
        return complex(np.trace(self.m))

    def longitudinal(self, n) -> complex:
        """Component n.M.n along the unit vector n."""
        n = _unit(n)
        return complex(n @ self.m @ n)

    def transverse(self, n) -> complex:
        """Mean transverse component (Tr M - n.M.n)/2."""
        return 0.5 * (self.trace() - self.longitudinal(n))

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        scale = max(np.abs(self.m).max(), 1e-300)
        return bool(np.abs(self.m - self.m.T).max() <= tol * scale)


@dataclass(frozen=True)
class PQPair:
    P: complex
    Q: complex

    def dyad(self, rhat) -> ComplexDyad:
        return _assemble(self.P, self.Q, _unit(rhat))


def _unit(v):
    v = np.asarray(v, dtype=float).reshape(3)
    n = np.linalg.norm(v)
    if n == 0:
        raise SingularPoint("direction undefined at r = 0")
    return v / n


def _assemble(P, Q, rhat) -> ComplexDyad:
    rr = np.outer(rhat, rhat)
    return ComplexDyad(P * (np.eye(3) - rr) + Q * rr)


def _check_k(k):
    if k == 0:
        raise InvalidParameter("k", "zero frequency is singular for the dyadic Green function")


def pq_total(r, k):
    """Total P, Q for radii r > 0 (array-friendly; complex r allowed)."""
    r = np.asarray(r)
    kr = k * r
    pre = -np.exp(1j * kr) / (FOUR_PI * r)
    return pre * (1 + 1j / kr - 1 / kr**2), pre * (-2j / kr + 2 / kr**2)


def pq_static(r, k):
    """Near-field P, Q: (I - 3 rr)/(4 pi k^2 r^3)."""
    r = np.asarray(r)
    ps = 1.0 / (FOUR_PI * k**2 * r**3)
    return ps, -2.0 * ps


def _series_coeffs():
    cp, cq = [], []
    for m in range(_NSERIES):
        im2 = 1j ** (m + 2)
        cp.append(1j**m / math.factorial(m) + im2 / math.factorial(m + 1) - im2 / math.factorial(m + 2))
        cq.append(-2 * im2 / math.factorial(m + 1) + 2 * im2 / math.factorial(m + 2))
    return np.array(cp), np.array(cq)


_CP, _CQ = _series_coeffs()


def pq_radiative(r, k, regularize_origin: bool = True):
    """Radiative P, Q (total minus static), stable for small kr.

    At r = 0 the real 1/r parts are dropped (absorbed into omega0 and the
    mass) and the finite limit -ik/(6 pi) is returned for both components.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    P = np.empty(r.shape, dtype=complex)
    Q = np.empty(r.shape, dtype=complex)
    z = k * r
    small = np.abs(z) < _SERIES_CUT
    big = ~small
    if np.any(big):
        rb, zb = r[big], z[big]
        e = np.exp(1j * zb)
        pre = -1.0 / (FOUR_PI * rb)
        P[big] = pre * (e * (1 + 1j / zb - 1 / zb**2) + 1 / zb**2)
        Q[big] = pre * (e * (-2j / zb + 2 / zb**2) - 2 / zb**2)
    if np.any(small):
        rs, zs = r[small], z[small]
        zero = rs == 0
        # sum_{m>=1} c_m z^m / r = k sum c_m z^(m-1); the m = 0 term is c_0/r
        pw = zs[:, None] ** np.arange(_NSERIES - 1)[None, :]
        tp = k * (pw @ _CP[1:])
        tq = k * (pw @ _CQ[1:])
        with np.errstate(divide="ignore", invalid="ignore"):
            p0 = np.where(zero, 0.0, _CP[0] / np.where(zero, 1.0, rs))
            q0 = np.where(zero, 0.0, _CQ[0] / np.where(zero, 1.0, rs))
        if not regularize_origin and np.any(zero):
            raise SingularPoint("radiative Green function has a real 1/r divergence at r = 0")
        P[small] = -(p0 + tp) / FOUR_PI
        Q[small] = -(q0 + tq) / FOUR_PI
    return P, Q


def pq_decompose(r: float, k) -> PQPair:
    """Transverse (P) and longitudinal (Q) scalars of the total Green dyad."""
    if r <= 0:
        raise SingularPoint("P, Q are singular at r = 0")
    _check_k(k)
    P, Q = pq_total(r, k)
    return PQPair(complex(P), complex(Q))


def green_static(r, k) -> ComplexDyad:
    """Principal-value near-field dyad; contact term excluded."""
    _check_k(k)
    r = np.asarray(r, dtype=float)
    d = np.linalg.norm(r)
    if d == 0:
        raise SingularPoint("static Green dyad is singular at r = 0")
    P, Q = pq_static(d, k)
    return _assemble(P, Q, r / d)


def green_radiative(r, k) -> ComplexDyad:
    """Radiative dyad; at r = 0 returns the regularized limit -ik/(6 pi) I."""
    _check_k(k)
    r = np.asarray(r, dtype=float)
    d = float(np.linalg.norm(r))
    P, Q = pq_radiative(d, k)
    if d == 0:
        return ComplexDyad(P[0] * np.eye(3))
    return _assemble(P[0], Q[0], r / d)


def green_total(r, k) -> ComplexDyad:
    _check_k(k)
    r = np.asarray(r, dtype=float)
    d = np.linalg.norm(r)
    if d == 0:
        raise SingularPoint("total Green dyad is singular at r = 0")
    P, Q = pq_total(d, k)
    return _assemble(P, Q, r / d)


def green_momentum(q: float, k, eps: float = 0.0):
    """Momentum-space (G_perp, G_par); retarded shift k -> k + i eps."""
    if q < 0:
        raise InvalidParameter("q", "momentum magnitude must be non-negative")
    _check_k(k)
    ke = complex(k) + 1j * eps
    if ke.imag == 0.0 and abs(q - abs(ke.real)) <= 1e-14 * max(1.0, q):
        raise OnShellPole(f"q = |k| = {q} on the real frequency axis")
    return 1.0 / (ke**2 - q**2), 1.0 / ke**2
