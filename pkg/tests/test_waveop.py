"""Wave packets, Cook wave operators, f-boundedness, Rosenblum, trace bound."""

import numpy as np
import pytest

import scatlab as sl
from scatlab.waveop import (analytic_wave_operator_1st_order, band_packet,
                            band_purity_defect, cook_wave_operator,
                            default_cook_time, edge_mass, f_beta, fbound_scan,
                            make_packet, rosenblum_check,
                            stationary_matrix_element, time_evolve,
                            trace_class_bound)


@pytest.fixture(scope="module")
def momentum_pair():
    g = sl.make_grid(2048, 200.0)
    h0 = sl.momentum(g)
    v = sl.gaussian(0.5, 2.0)
    h1 = sl.add_potential(h0, v)
    return g, h0, h1, v


def test_band_packet_is_band_limited(momentum_pair):
    g, h0, _, _ = momentum_pair
    psi = band_packet(h0, (2.0, 4.0), seed=0)
    assert band_purity_defect(h0, psi.values, (2.0, 4.0)) < 1e-8
    assert psi.band == (2.0, 4.0)
    # localized: negligible mass in the outer 5% of the box
    assert edge_mass(g, psi.values) < 1e-6


def test_band_packet_rejects_band_beyond_symbol():
    g = sl.make_grid(128, 50.0)
    h0 = sl.laplacian(g, 2.0)
    top = float(np.max(h0.symbol_values))
    with pytest.raises(ValueError):
        band_packet(h0, (top / 2, 2 * top))


def test_time_evolve_unitary_and_exact_on_multiplier(momentum_pair):
    g, h0, _, _ = momentum_pair
    psi = band_packet(h0, (2.0, 4.0), seed=1)
    out = time_evolve(h0, psi, 3.0)
    # e^{itP} translates: psi(x + t), exact in Fourier
    expected = np.fft.ifft(np.exp(1j * g.k * 3.0) * np.fft.fft(psi.values))
    assert np.linalg.norm(out.values - expected) < 1e-10 * psi.norm_l2
    assert out.norm_l2 == pytest.approx(psi.norm_l2, rel=1e-10)


def test_split_step_unitary():
    g = sl.make_grid(512, 100.0)
    h0 = sl.laplacian(g, 2.0)
    h1 = sl.add_potential(h0, sl.gaussian(0.3, 1.5))
    psi = band_packet(h0, (4.0, 9.0), seed=2)
    out = time_evolve(h1, psi, 1.5)
    assert out.norm_l2 == pytest.approx(psi.norm_l2, rel=1e-8)


def test_cook_matches_analytic_multiplication(momentum_pair):
    # oracle: for H0 = P, H1 = P + v the past wave operator is
    # multiplication by exp(i * integral_x^inf v)
    g, h0, h1, v = momentum_pair
    psi = band_packet(h0, (2.0, 4.0), seed=3)
    res = cook_wave_operator(h0, h1, psi, side=-1)
    w = analytic_wave_operator_1st_order(v, g, side=-1)
    expected = w * psi.values
    rel = np.linalg.norm(res.packet.values - expected) / psi.norm_l2
    assert rel < 1e-3


def test_cook_is_isometric(momentum_pair):
    g, h0, h1, _ = momentum_pair
    psi = band_packet(h0, (2.0, 4.0), seed=4)
    res = cook_wave_operator(h0, h1, psi, side=-1)
    assert res.packet.norm_l2 == pytest.approx(psi.norm_l2, rel=1e-4)


def test_cook_intertwining(momentum_pair):
    # H1 W psi == W H0 psi on band packets (intertwining property),
    # checked via the unitary groups: e^{-i H1 t} W psi == W e^{-i H0 t} psi
    g, h0, h1, _ = momentum_pair
    psi = band_packet(h0, (2.0, 4.0), seed=5)
    w_psi = cook_wave_operator(h0, h1, psi, side=-1).packet
    t = 0.7
    lhs = time_evolve(h1, w_psi, t).values
    evolved = make_packet(time_evolve(h0, psi, t).values, g, band=psi.band)
    rhs = cook_wave_operator(h0, h1, evolved, side=-1).packet.values
    assert np.linalg.norm(lhs - rhs) / psi.norm_l2 < 5e-3


def test_cook_zero_potential_is_identity(momentum_pair):
    g, h0, _, _ = momentum_pair
    psi = band_packet(h0, (2.0, 4.0), seed=6)
    res = cook_wave_operator(h0, h0, psi, side=-1)
    assert np.linalg.norm(res.packet.values - psi.values) / psi.norm_l2 < 1e-10


def test_default_cook_time_positive(momentum_pair):
    g, h0, _, _ = momentum_pair
    psi = band_packet(h0, (2.0, 4.0), seed=7)
    assert default_cook_time(h0, psi) > 0


def test_stationary_matches_cook_momentum(momentum_pair):
    g, h0, h1, _ = momentum_pair
    psi = band_packet(h0, (2.0, 4.0), seed=8)
    w_psi = cook_wave_operator(h0, h1, psi, side=-1).packet
    phi = make_packet(w_psi.values, g)
    val = stationary_matrix_element(h0, h1, phi, psi, side=-1)
    exact = np.vdot(phi.values, w_psi.values)
    assert abs(val - exact) / abs(exact) < 1e-2


def test_stationary_matches_cook_laplacian():
    g = sl.make_grid(512, 60.0)
    h0 = sl.laplacian(g, 2.0)
    h1 = sl.add_potential(h0, sl.gaussian(0.3, 1.5))
    psi = band_packet(h0, (4.0, 16.0), seed=1)
    w_psi = cook_wave_operator(h0, h1, psi, side=-1).packet
    phi = make_packet(w_psi.values, g)
    val = stationary_matrix_element(h0, h1, phi, psi, side=-1)
    exact = np.vdot(phi.values, w_psi.values)
    assert abs(val - exact) / abs(exact) < 1e-2


def test_f_beta_values():
    f = f_beta(0.5)
    assert f(0.0) == pytest.approx(1.0)
    assert f(3.0) == pytest.approx(10.0 ** 0.25)


def test_fbound_scan_growth(momentum_pair):
    g, h0, h1, _ = momentum_pair
    bands = [(3.0, 5.0), (6.0, 8.0), (12.0, 14.0), (24.0, 26.0)]
    scan = fbound_scan(h0, h1, f_beta(0.5), bands, packets_per_band=4, seed=0)
    assert scan.growth_fit == pytest.approx(0.5, abs=0.1)


def test_fbound_scan_rejects_overlapping_bands(momentum_pair):
    g, h0, h1, _ = momentum_pair
    with pytest.raises(ValueError):
        fbound_scan(h0, h1, f_beta(0.5), [(1.0, 3.0), (2.0, 4.0)])


def test_rosenblum_inequality_holds(momentum_pair):
    g, h0, _, _ = momentum_pair
    gaps = np.diff(np.sort(h0.symbol_values))
    T = 0.01 * 2 * np.pi / np.mean(gaps[gaps > 1e-12])
    for seed in range(5):
        xi = band_packet(h0, (2.0, 4.0), seed=seed)
        psi = band_packet(h0, (2.0, 4.0), seed=100 + seed)
        res = rosenblum_check(h0, xi, psi, T=T)
        assert res.ok
        assert res.integral <= res.bound * 1.01


def test_trace_class_bound_dominates_measured():
    # rank-one perturbation: measured f-bound sup stays under the
    # trace-class bound 2 pi |t| * (spectral sup-norm product)
    g = sl.make_grid(512, 100.0)
    h0 = sl.momentum(g)
    xi = band_packet(h0, (2.0, 6.0), seed=2)
    t = 0.5
    h1 = sl.dense_operator(
        g, h0.matrix() + t * np.outer(xi.values, xi.values.conj()))
    band = (3.0, 5.0)
    scan = fbound_scan(h0, h1, f_beta(0.5), [band], packets_per_band=4, seed=1)
    measured = scan.samples[0][1]
    bound = trace_class_bound(h0, h1, [(t, xi.values)], f_beta(0.5), Lam=0.0)
    assert measured <= bound
