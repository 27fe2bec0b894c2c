"""Acceptance criteria, one test per criterion; each prints a pass/fail line."""

import math

import numpy as np
import pytest

from conftest import cached_ensemble, record
from vacua import config as cf
from vacua import effmedium as em
from vacua import lamb
from vacua.green import green_radiative
from vacua.params import DipoleSpecies, MediumSpec
from vacua.phi import phi1_hs, phi1_hs_quadrature, phi1_hs_split

PI2 = math.pi**2
ZETAS = (0.05, 0.1, 0.5, 1.0, 2.0)


def _rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_01_phi0_identity():
    errs = []
    for k in (0.5, 1.0, 2.0):
        lhs = k**2 * 1j * green_radiative([0, 0, 0], k).trace().imag
        errs.append(_rel(lhs, -1j * k**3 / (2 * math.pi)))
    ok = max(errs) <= 1e-9
    record(1, ok, f"max rel err {max(errs):.2e} <= 1e-9")
    assert ok


def test_criterion_02_closed_vs_quadrature():
    errs = []
    for k in (1.0, 1j):
        for z in ZETAS:
            errs.append(_rel(phi1_hs_quadrature(k, z, 1.0), phi1_hs(k, z, 1.0)))
    ok = max(errs) <= 1e-8
    record(2, ok, f"max rel err {max(errs):.2e} <= 1e-8 over {len(errs)} points")
    assert ok


def test_criterion_03_split_identity():
    errs = []
    for k in (1.0, 1j):
        for z in ZETAS:
            p2, pa = phi1_hs_split(k, z, 1.0)
            errs.append(_rel(p2 + pa, phi1_hs(k, z, 1.0)))
    ok = max(errs) <= 1e-10
    record(3, ok, f"max rel err {max(errs):.2e} <= 1e-10")
    assert ok


def test_criterion_04_seven_sixths():
    perp, par = em.radiative_bracket()
    ok = abs(perp + par - 7 / 6) <= 1e-6 and abs(perp - 5 / 6) <= 1e-6 and abs(par - 1 / 3) <= 1e-6
    record(4, ok, f"bracket {perp + par:.9f} = {perp:.9f} + {par:.9f}")
    assert ok


def test_criterion_05_london_closed_form():
    sp, m = DipoleSpecies(1e-8), MediumSpec(1e-3, 0.02)
    r = lamb.scattering_lamb_shift_rho1(sp, m)
    err = _rel(r.value, lamb.small_zeta_shift_closed(sp, m))
    ok = err < 0.01
    record(5, ok, f"rel deviation {err:.2e} < 1e-2")
    assert ok


def test_criterion_06_energy_shift_relation():
    sp, m = DipoleSpecies(1e-8), MediumSpec(1e-3, 0.05)
    e = lamb.vacuum_energy_rho2(sp, m).value
    s = lamb.scattering_lamb_shift_rho1(sp, m).value
    exact = e == m.rho / 2 * s
    # independent route: termwise integration with the 1/(m+2) weights
    t0 = lamb.recurrent_series_terms(sp, m, 0)[0]
    full0 = lamb.vacuum_energy_rho2(sp, m, recurrence="full", max_order=0).value
    err = max(_rel(m.rho * t0 / 2, e), _rel(full0, e))
    ok = exact and err <= 1e-10
    record(6, ok, f"exact construction {exact}; weighted route rel err {err:.2e} <= 1e-10")
    assert ok


def test_criterion_07_coefficient_suite():
    s2 = em.schwinger_coefficient(em.mg_index_of_a, 2)
    s3 = em.schwinger_extended(order=3).value
    r3 = em.radiative_vacuum_energy_mg(3).value
    checks = {
        "schwinger_rho2": _rel(s2, -7 / (48 * PI2)) <= 1e-6,
        "extended_rho3": _rel(s3, -17 / (288 * PI2)) <= 1e-6,
        "radiative_rho3": _rel(r3, -17 / (144 * PI2)) <= 1e-6,
        "ratio_2": abs(r3 / s3 - 2) <= 1e-6,
    }
    ok = all(checks.values())
    record(7, ok, ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in checks.items())
           + f"; radiative O(rho^3) = {r3 * PI2:.6f}/pi^2 vs {-17 / 144:.6f}/pi^2")
    assert ok


def test_criterion_08_lorentz_lorenz():
    sp = DipoleSpecies(1e-3)
    dev = {}
    for x in (1e-3, 1e-2):
        rho = x / (3 * math.pi * sp.g)
        dev[x] = em.electrostatic_binding_energy(rho, sp).value / (rho * em.ll_shift(rho, sp)) - 1
    growth = dev[1e-2] / dev[1e-3]
    ok = abs(dev[1e-3]) <= 5e-4 and abs(growth - 10) <= 0.5
    record(8, ok, f"deviation {dev[1e-3]:.3e} at x=1e-3, growth x10 -> {growth:.3f}")
    assert ok


def test_criterion_09_bullough_obada():
    sp = DipoleSpecies(1e-3)
    x = 1e-6
    rho = x / (3 * math.pi * sp.g)
    f = 2 * x / 3
    err = _rel(em.bullough_obada_energy(rho, sp).value, rho * f * f / 24)
    ok = err <= 1e-6
    record(9, ok, f"rel err {err:.2e} <= 1e-6")
    assert ok


def test_criterion_10_onsager():
    v = em.onsager_radiative_prefactor()
    ok = abs(v - 7 / 3) <= 1e-6
    record(10, ok, f"prefactor {v:.9f}")
    assert ok


def _slope(d0, g):
    ds = d0 * np.linspace(0.95, 1.05, 5)
    e = []
    for d in ds:
        cfg = cf.DipoleConfiguration([[0, 0, 0], [0, 0, d]], DipoleSpecies(g), 0.5 * d)
        e.append(-cf.config_vacuum_energy(cfg).breakdown["interaction"])
    return np.polyfit(np.log(ds), np.log(e), 1)[0]


def test_criterion_11_finite_configurations():
    sp = DipoleSpecies(1e-8, cutoff=10.0)
    one = cf.config_vacuum_energy(cf.DipoleConfiguration([[0.0, 0.0, 0.0]], sp, 0.1))
    free = lamb.free_space_lamb_energy(1.0, sp)
    n1 = abs(one.value - free.value) <= one.error_estimate + free.error_estimate + 1e-12 * abs(free.value)
    near, far = _slope(0.01, 1e-8), _slope(20.0, 1e-6)
    ok = n1 and abs(near + 6) <= 0.06 and abs(far + 7) <= 0.14
    record(11, ok, f"N=1 match {n1}; slopes {near:.4f} (d=0.01), {far:.4f} (d=20)")
    assert ok


@pytest.mark.slow
def test_criterion_12_monte_carlo_vs_cluster():
    n, g, zeta0, seed = 64, 1e-6, 0.05, 7
    rho_bars = (0.005, 0.01, 0.02)
    ys, ws = [], []
    for rb in rho_bars:
        r = cached_ensemble(rb, 200, seed, n=n, zeta0=zeta0, g=g)
        rho = rb / zeta0**3
        ys.append(r.mean.value / rho**2)
        ws.append((rho**2 / r.stderr) ** 2)
    ys, ws = np.array(ys), np.array(ws)
    c2 = float(ys @ ws / ws.sum())
    se = float(1 / math.sqrt(ws.sum()))
    m = MediumSpec(0.01, zeta0)
    # a finite sample has N(N-1)/2 pairs instead of N^2/2
    target = lamb.vacuum_energy_rho2(DipoleSpecies(g), m).value / m.rho**2 * (n - 1) / n
    z = abs(c2 - target) / se
    ok = z <= 3
    record(12, ok, f"c2 = {c2:.4e} +- {se:.2e}, cluster {target:.4e}, {z:.2f} sigma")
    assert ok


@pytest.mark.slow
def test_criterion_13_inequality():
    dense = cached_ensemble(0.2, 64, 3)
    dilute = cached_ensemble(0.01, 200, 7)
    gap = lambda r: r.ln_avg_vs_avg_ln[0] - r.ln_avg_vs_avg_ln[1]
    g_dense, g_dil = gap(dense), gap(dilute)
    margin = abs(g_dense) / dense.ineq_error
    norm_dense, norm_dil = abs(g_dense) / 0.2**2, abs(g_dil) / 0.01**2
    ok = margin >= 10 and norm_dil < norm_dense
    record(13, ok, f"gap/error = {margin:.1f}; normalized gap {norm_dil:.3e} (0.01) < {norm_dense:.3e} (0.2)")
    assert ok


def test_criterion_14_recurrent_scaling():
    sp, m = DipoleSpecies(1e-7), MediumSpec(1e-3, 0.05)
    t = lamb.recurrent_series_terms(sp, m, 1)
    rr = (sp.g / m.zeta0**3) ** 2
    factor = abs(t[1] / t[0]) / rr
    ok = 1 / 3 <= factor <= 3
    record(14, ok, f"|m1/m0| = {factor:.3f} x recur_ratio (window [1/3, 3])")
    assert ok
