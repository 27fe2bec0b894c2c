import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vacua.errors import BranchOutOfRange, GeometricPole, InvalidParameter, ResummationPole
from vacua.green import pq_total
from vacua.params import Correlation, DipoleSpecies, MediumSpec
from vacua.phi import (Branch, PartialSum, Polarization, chi2_q, chi2_recurrent, chi2_recurrent_zero_mode, chi_qc,
                       phi0, phi1_hs, phi1_hs_quadrature, phi1_hs_split, phi1_overdensity, phi1_overdensity_split,
                       phi1_recurrent, phi_breakdown, recurrent_terms)
from vacua.polarizability import alpha_free_iu
from vacua.quadrature import radial_integrate

PRE = -1 / (2 * math.pi)


def test_phi0_values():
    assert phi0(1.0) == pytest.approx(-0.15915494309189535j, rel=1e-14)
    assert phi0(2.0) == pytest.approx(-4j / math.pi, rel=1e-14)
    assert phi0(1j) == pytest.approx(-1 / (2 * math.pi), rel=1e-14)


def test_small_zeta_branch_accuracy():
    k = 1.0
    c = phi1_hs(k, 0.1, 1.0)
    s = phi1_hs(k, 0.1, 1.0, Branch.SMALL_ZETA)
    assert abs(c - s) / abs(c) <= 3e-3


def test_small_zeta_branch_rejected():
    with pytest.raises(BranchOutOfRange):
        phi1_hs(1.0, 1.5, 1.0, Branch.SMALL_ZETA)


@pytest.mark.parametrize("k", [1.0, 1j, 0.7 + 0.2j])
@pytest.mark.parametrize("z", [0.05, 0.3, 1.0])
def test_closed_equals_quadrature(k, z):
    assert phi1_hs_quadrature(k, z, 1.0) == pytest.approx(phi1_hs(k, z, 1.0), rel=1e-8)


def test_seven_sixths_bracket():
    # the zeta-independent imaginary part of the small-zeta bracket
    for z in (0.01, 0.1, 0.3):
        b = phi1_hs(1.0, z, 1.0, Branch.SMALL_ZETA) / PRE
        assert (b - 1 / z**3 - 1 / z + z).imag == pytest.approx(7 / 6, rel=1e-14)


def test_split_small_zeta_imaginary_parts():
    p2, pa = phi1_hs_split(1.0, 1e-4, 1.0)
    assert (p2 / PRE).imag == pytest.approx(5 / 6, abs=1e-6)
    assert (pa / PRE).imag == pytest.approx(1 / 3, abs=1e-6)
    p2s, pas = phi1_hs_split(1.0, 1e-4, 1.0, Branch.SMALL_ZETA)
    assert (p2s / PRE).imag == pytest.approx(5 / 6) and (pas / PRE).imag == pytest.approx(1 / 3)


def test_split_sum_at_zeta_02():
    p2, pa = phi1_hs_split(1.0, 0.2, 1.0)
    assert p2 + pa == pytest.approx(phi1_hs(1.0, 0.2, 1.0), rel=1e-10)


def test_near_field_power_lives_in_par():
    for z in (1e-2, 1e-3):
        p2, pa = phi1_hs_split(1.0, z, 1.0)
        assert (pa / PRE).real * z**3 == pytest.approx(1.0, rel=1e-3)
        assert abs(p2 / PRE) * z**3 < 10 * z**2


@pytest.mark.parametrize("part", ["perp2", "par"])
@pytest.mark.parametrize("z", [0.05, 0.5, 2.0])
def test_split_components_against_quadrature(part, z):
    k = 1j
    p2, pa = phi1_hs_split(k, z, 1.0)
    closed = p2 if part == "perp2" else pa
    assert phi1_hs_quadrature(k, z, 1.0, part=part) == pytest.approx(closed, rel=1e-8)


def test_overdensity_zero_and_shell_value():
    assert phi1_overdensity(1.0, 0.3, 0.0, 1.0) == 0
    k, z, c = 0.8j, 0.3, 0.7
    P, Q = pq_total(z, k)
    shell = -(k**4) * c * z * 4 * math.pi * z**2 * (2 * P * P + Q * Q)
    assert phi1_overdensity(k, z, c, 1.0) == pytest.approx(shell, rel=1e-12)
    o2, oa = phi1_overdensity_split(k, z, c, 1.0)
    assert o2 + oa == pytest.approx(shell, rel=1e-12)
    with pytest.raises(InvalidParameter):
        phi1_overdensity(1.0, 0.3, -1.0, 1.0)


def test_overdensity_divergence_order():
    z = 1e-3
    assert (phi1_overdensity(1.0, z, 1.0, 1.0) / PRE).real * z**3 == pytest.approx(3.0, rel=1e-4)


def test_partial_sum_zero_is_pair_term():
    k, z = 1j, 0.1
    assert phi1_recurrent(k, z, 1e-5, 10.0, PartialSum(0)) == pytest.approx(phi1_hs(k, z, 1e-4), rel=1e-12)
    assert phi1_recurrent(k, z, 0.0, 10.0) == 0


def test_recurrent_ratio_static_end():
    g, z = 1e-7, 0.05
    rr = (g / z**3) ** 2
    u = 0.01
    k, a, rho = 1j * u, float(alpha_free_iu(u, g)), 0.01 / z**3
    p0 = phi1_recurrent(k, z, a, rho, PartialSum(0))
    p1 = phi1_recurrent(k, z, a, rho, PartialSum(1))
    pr = phi1_recurrent(k, z, a, rho)
    ratio = abs(pr - p1) / abs(p1 - p0)
    assert rr / 3 <= ratio <= 3 * rr


def test_recurrent_hierarchy_geometric():
    g, z = 1e-6, 0.1
    rr = (g / z**3) ** 2
    for u in (0.01, 0.5):
        k, a = 1j * u, float(alpha_free_iu(u, g))
        t = recurrent_terms(k, z, a, 1.0, 3)
        for m in (1, 2):
            r = abs(t[m + 1] / t[m])
            assert rr / 30 < r < 10 * rr


def test_resummation_pole():
    with pytest.raises(ResummationPole):
        phi1_recurrent(1j, 0.01, 1.0, 1.0)


def test_breakdown_consistency():
    m = MediumSpec(0.05, 0.2, Correlation.overdensity(0.4))
    b = phi_breakdown(0.6j, m, 1e-4)
    assert b.perp2 + b.par == pytest.approx(b.total, rel=1e-10)
    assert set(b.components) == {"free", "pair_norec", "overdensity"}


@settings(max_examples=60)
@given(st.floats(1e-3, 5.0), st.floats(0.05, 4.0), st.booleans())
def test_split_identity_property(z, kk, imag):
    k = 1j * kk if imag else kk
    p2, pa = phi1_hs_split(k, z, 1.0)
    tot = phi1_hs(k, z, 1.0)
    assert abs(p2 + pa - tot) <= 1e-10 * max(abs(tot), abs(p2), abs(pa))


# --- susceptibility kernels ---------------------------------------------------------

def test_chi2_static_limit():
    m = MediumSpec(0.05, 0.1)
    a0 = 1e-3
    ra = m.rho * a0
    k = 1e-5j
    par = chi2_q(1e-6, k, Polarization.PAR, m, a0)
    perp = chi2_q(1e-6, k, Polarization.PERP, m, a0)
    assert par.real == pytest.approx(ra**2 / 3, rel=1e-6)
    assert perp.real == pytest.approx(par.real, rel=1e-6)
    assert chi2_q(0.5, k, Polarization.PAR, m, 0.0) == 0


def test_chi_qc_limits():
    from vacua.lamb import QuasicrystallineKernel
    m = MediumSpec(0.05, 0.1)
    sp = DipoleSpecies(1e-4)
    qk = QuasicrystallineKernel(m, sp)
    qk.pair = lambda q, k: (0 * q, 0 * q)
    perp, par = qk(np.array([0.3]), 1j)
    ra = m.rho * 2 * math.pi * 1e-4 / 2
    assert perp[0] == pytest.approx(ra) and par[0] == pytest.approx(ra)
    a0 = 1e-3
    ra = m.rho * a0
    _, par = chi_qc(1e-6, 1e-5j, m, a0)
    assert par.real == pytest.approx(ra / (1 - ra / 3), rel=1e-6)


def test_chi_qc_partial_sum_oracle():
    m = MediumSpec(0.05, 0.1)
    a0 = 0.5 / m.rho
    ra = m.rho * a0
    q, k = 2.0, 0.5j
    perp2, _ = (chi2_q(q, k, Polarization.PERP, m, a0), None)
    r = perp2 / ra
    assert abs(r) < 0.5
    partial = ra * sum(r**n for n in range(50))
    assert chi_qc(q, k, m, a0)[0] == pytest.approx(partial, rel=1e-12)


def test_geometric_pole():
    m = MediumSpec(0.05, 0.1)
    a0 = 3.0 / m.rho
    with pytest.raises(GeometricPole):
        chi_qc(1e-9, 1e-7j, m, a0)


def test_recurrent_dyad_alpha_scaling():
    m = MediumSpec(0.1, 0.1)
    r = np.array([0.0, 0.0, 0.15])
    d1 = np.asarray(chi2_recurrent(r, 0.5j, 1e-6, m.rho, m, "recurrent"))
    d2 = np.asarray(chi2_recurrent(r, 0.5j, 2e-6, m.rho, m, "recurrent"))
    # leading order alpha^4; m >= 2 terms enter at relative (alpha/4 pi r^3)^2 ~ 1e-8
    np.testing.assert_allclose(d2, 16 * d1, rtol=1e-7)
    assert np.abs(np.asarray(chi2_recurrent([0, 0, 0.05], 0.5j, 1e-6, m.rho, m))).max() == 0


def test_zero_mode_against_series():
    m = MediumSpec(0.1, 0.1)
    at = 2 * math.pi * 1e-6
    zm = chi2_recurrent_zero_mode(at, m.rho, m.xi)
    assert zm == pytest.approx((m.rho * at) ** 2 * (at / (4 * math.pi * m.xi**3)) ** 2 / 3, rel=1e-14)
    k = 1e-4j

    def kern(rr):
        return np.trace(np.asarray(chi2_recurrent([0, 0, rr], k, at, m.rho, m, "recurrent"))).real / 3

    v = radial_integrate(kern, m.xi).value.real
    assert v == pytest.approx(zm, rel=1e-5)
    assert chi2_recurrent_zero_mode(2 * at, m.rho, m.xi) == pytest.approx(16 * zm, rel=1e-14)
