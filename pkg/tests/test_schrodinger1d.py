"""Jost solutions, transmission coefficients, low-energy bounds, sharpness."""

import numpy as np
import pytest

import scatlab as sl
from scatlab.schrodinger1d import (integral_of, jost_solutions,
                                   low_energy_weighted_bound,
                                   resolvent_kernel_1d, sharpness_scan,
                                   transmission, transmission_asymptotics_fit)

SUPPORT = (-6.0, 6.0)


def _barrier_T(k, v0, a):
    """Closed-form transmission for a square barrier of height v0 on [-a, a]."""
    kappa = np.sqrt(complex(v0 - k**2))
    num = np.exp(-2j * k * a)
    den = (np.cosh(2 * kappa * a)
           + 0.5j * (kappa / k - k / kappa) * np.sinh(2 * kappa * a))
    return num / den


def test_jost_wronskian_constant():
    v = sl.gaussian(0.5, 1.5)
    pair = jost_solutions(v, 2.0 + 0.0j, SUPPORT)
    assert pair.wronskian_drift < 1e-8
    # w = 2 i zeta T(zeta)^{-1}; for weak v it is close to the free value 2 i zeta
    assert abs(pair.wronskian) == pytest.approx(4.0, rel=0.2)


def test_jost_free_case():
    pair = jost_solutions(sl.zero(), 3.0 + 0.0j, SUPPORT)
    # free Jost solutions are pure exponentials; theta = e^{i zeta x} scaled
    assert pair.wronskian == pytest.approx(-6j, abs=1e-8)


def test_transmission_square_barrier_closed_form():
    v0, a = 2.0, 1.0
    v = sl.square_barrier(v0, a)
    for k in (0.7, 1.3, 2.5, 6.0):
        rec = transmission(v, k, (-1.0, 1.0))
        exact = _barrier_T(k, v0, a)
        assert abs(rec.T - exact) < 1e-8


def test_transmission_unitarity():
    v = sl.gaussian(0.8, 1.2)
    for k in (0.5, 1.5, 4.0, 30.0):
        rec = transmission(v, k, SUPPORT)
        assert rec.residual_unitarity < 1e-6
        assert abs(rec.T) <= 1.0 + 1e-9


def test_transmission_zero_potential():
    rec = transmission(sl.zero(), 2.0, SUPPORT)
    assert rec.T == pytest.approx(1.0, abs=1e-10)
    assert abs(rec.R) < 1e-10


def test_transmission_born_route_matches_ode():
    # the iterated-Born route (used for k >= 25) must agree with the ODE
    # route at the same wavenumber
    from scatlab.schrodinger1d import _envelope_born, _integrate_envelope
    v = sl.gaussian(0.8, 1.2)
    k = 30.0
    lo, hi = SUPPORT
    ub, ubp = _envelope_born(v, k, lo, hi)
    _, u1, u1p = _integrate_envelope(v, k, hi, lo, n_eval=3)
    assert abs(ub - u1[0]) < 1e-5 * abs(u1[0])
    assert abs(ubp - u1p[0]) < 1e-4 * max(abs(u1p[0]), 1.0)


def test_transmission_asymptotics_two_bumps():
    # 2ik(T(k) - 1) -> integral of v as k -> infinity
    for v in (sl.gaussian(0.7, 1.3), sl.sech2(0.9, 1.1)):
        ks = np.geomspace(10.0, 100.0, 9)
        fit = transmission_asymptotics_fit(v, ks, SUPPORT)
        assert abs(fit.constant - fit.integral_v) < 0.05 * abs(fit.integral_v)


def test_integral_of():
    v = sl.gaussian(2.0, 1.0)
    assert integral_of(v, SUPPORT) == pytest.approx(2.0 * np.sqrt(np.pi), rel=1e-8)


def test_resolvent_kernel_free_oracle():
    # free kernel: i e^{i sqrt(z) |x - x'|} / (2 sqrt(z)), Im sqrt(z) > 0
    z = 2.0 + 0.5j
    rt = np.sqrt(z)
    if rt.imag < 0:
        rt = -rt
    from scatlab.schrodinger1d import ResolventKernel1D
    kern = ResolventKernel1D(sl.zero(), z, SUPPORT, n_eval=16385)
    for x, xp in ((0.3, -1.2), (2.0, 2.5)):
        exact = 1j * np.exp(1j * rt * abs(x - xp)) / (2.0 * rt)
        assert abs(kern(x, xp) - exact) < 1e-4 * abs(exact)


def test_low_energy_weighted_bound_finite():
    res = low_energy_weighted_bound(sl.gaussian(0.5, 1.5), 2.0, SUPPORT)
    assert np.isfinite(res.max_norm)
    assert res.max_norm > 0


def test_sharpness_scan_exponents():
    v = sl.gaussian(0.5, 1.5)
    ns = [16, 32, 64, 128]
    grow = sharpness_scan(v, 0.75, ns, SUPPORT)
    assert grow.exponent == pytest.approx(0.5, abs=0.15)
    flat = sharpness_scan(v, 0.5, ns, SUPPORT)
    vals = np.array([s[1] for s in flat.samples])
    assert np.max(vals) / np.min(vals) < 1.3
