"""End-to-end acceptance gate: one check per headline numerical claim.

Each test prints a single PASS/FAIL line (visible with ``pytest -s`` or on
failure) carrying the measured numbers, then asserts. Fixtures are the
smallest configurations on which the stated tolerances were verified to
hold; several are deliberately large and slow.
"""

import time

import numpy as np
import pytest

import scatlab as sl
from scatlab.backflow import (backflow_spectrum, conjugation_difference_norm,
                              flux_operator, highest_growth_exponent)
from scatlab.operators import fractional_difference_norm
from scatlab.rankone import (aronszajn_krein, rank_one_perturbation,
                             resolvent_form)
from scatlab.resolvent import Weight, boundary_value, high_energy_fit
from scatlab.schrodinger1d import (sharpness_scan, transmission,
                                   transmission_asymptotics_fit)
from scatlab.singular import (HoelderFunction, cauchy_boundary,
                              cauchy_eps_route, kernel_divergence_scan,
                              kernel_operator_norm)
from scatlab.waveop import (analytic_wave_operator_1st_order, band_packet,
                            cook_wave_operator, f_beta, fbound_scan,
                            make_packet, rosenblum_check, trace_class_bound)

GAUSS = lambda x: np.exp(-x**2 / 4.0)


def _verdict(num, name, ok, detail):
    line = f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} {name}: {detail}"
    print(line, flush=True)
    assert ok, line


def _momentum_pair():
    g = sl.make_grid(2048, 200.0)
    h0 = sl.momentum(g)
    v = sl.gaussian(0.5, 2.0)
    return g, h0, sl.add_potential(h0, v), v


def _flat_band_packet(g, h0, lo, hi, edge=0.1):
    sel = (h0.symbol_values >= lo) & (h0.symbol_values <= hi)
    u = (h0.symbol_values[sel] - lo) / (hi - lo)
    shape = np.ones_like(u)
    shape[u < edge] = np.sin(0.5 * np.pi * u[u < edge] / edge) ** 2
    shape[u > 1 - edge] = np.sin(0.5 * np.pi * (1 - u[u > 1 - edge]) / edge) ** 2
    coeffs = np.zeros(g.n, dtype=complex)
    coeffs[sel] = shape
    return make_packet(np.fft.ifft(coeffs), g, band=(lo, hi), reference=h0)


def test_criterion_01_momentum_wave_operator_oracle():
    # Cook route vs the exact multiplication unitary exp(i int_x^inf v)
    g, h0, h1, v = _momentum_pair()
    psi = band_packet(h0, (2.0, 4.0), seed=3)
    t0 = time.time()
    res = cook_wave_operator(h0, h1, psi, side=-1)
    wall = time.time() - t0
    w = analytic_wave_operator_1st_order(v, g, side=-1)
    rel = np.linalg.norm(res.packet.values - w * psi.values) / psi.norm_l2
    ok = rel <= 1e-3 and wall <= 60.0
    _verdict(1, "momentum wave-operator oracle", ok,
             f"rel_err={rel:.2e} (<=1e-3), wall={wall:.1f}s (<=60)")


def test_criterion_02_fbound_dichotomy():
    # unbounded f: per-band sup grows like (band center)^(1/2);
    # spectrally confined V: bands disjoint from the confinement see nothing
    g, h0, h1, _ = _momentum_pair()
    bands = [(3.0, 5.0), (6.0, 8.0), (12.0, 14.0), (24.0, 26.0)]
    scan = fbound_scan(h0, h1, f_beta(0.5), bands, packets_per_band=4, seed=0)
    growth = scan.growth_fit

    g2 = sl.make_grid(1024, 100.0)
    h0b = sl.momentum(g2)
    mask = ((h0b.symbol_values >= 2.0) & (h0b.symbol_values <= 4.0)).astype(float)
    eye = np.eye(g2.n, dtype=complex)
    proj = np.fft.ifft(mask[:, None] * np.fft.fft(eye, axis=0), axis=0)
    vmat = np.diag(sl.gaussian(0.5, 2.0)(g2.x))
    h1b = sl.dense_operator(g2, h0b.matrix() + proj @ vmat @ proj)
    confined = fbound_scan(h0b, h1b, f_beta(0.5), [(6.0, 8.0), (12.0, 14.0)],
                           packets_per_band=2, seed=0)
    out_sup = max(s[1] for s in confined.samples)
    ok = abs(growth - 0.5) <= 0.1 and out_sup <= 1e-6
    _verdict(2, "f-boundedness dichotomy", ok,
             f"growth={growth:.3f} (0.5+-0.1), out_of_band_sup={out_sup:.1e} "
             f"(<=1e-6)")


@pytest.mark.parametrize("ell", [2.0, 3.0])
def test_criterion_03_polyharmonic_high_energy_order(ell):
    # weighted resolvent decay for the order-ell symbol, alpha = 3/4:
    # target exponent 1 - 2*alpha/ell; the lattice realization measures
    # 1 - 1/ell instead, so the target comparison fails honestly while
    # the free -> perturbed transfer holds
    alpha = 0.75
    weight = Weight(alpha)
    lams = np.geomspace(25.0, 2500.0, 6)

    g_free = sl.make_grid(16384, 600.0)
    free = sl.laplacian(g_free, ell)
    free_samples = [(float(lam),
                     boundary_value(free, float(lam), +1, weight).value)
                    for lam in lams]
    beta_free = high_energy_fit(free_samples).beta_hat

    g_pert = sl.make_grid(4096, 200.0)
    pert = sl.add_potential(sl.laplacian(g_pert, ell), sl.gaussian(0.3, 1.5))
    pert_samples = [(float(lam),
                     boundary_value(pert, float(lam), +1, weight).value)
                    for lam in lams]
    beta_pert = high_energy_fit(pert_samples).beta_hat

    target = 1.0 - 2.0 * alpha / ell
    transfer_ok = abs(beta_pert - beta_free) <= 0.05
    target_ok = abs(beta_free - target) <= 0.05
    _verdict(3, f"high-energy order (ell={ell})", transfer_ok and target_ok,
             f"free={beta_free:.4f}, perturbed={beta_pert:.4f}, "
             f"target={target:.2f} (+-0.05); transfer "
             f"{'ok' if transfer_ok else 'BROKEN'}, target "
             f"{'ok' if target_ok else 'MISSED (measured 1 - 1/ell)'}")


def test_criterion_04_sharpness_scan():
    v = sl.gaussian(0.5, 1.5)
    support = (-6.0, 6.0)
    ns = [16, 32, 64, 128, 256, 512]
    t0 = time.time()
    grow = sharpness_scan(v, 0.75, ns, support)
    flat = sharpness_scan(v, 0.5, ns, support)
    wall = time.time() - t0
    top = [s[1] for s in flat.samples if s[0] >= 51.2]
    ratio = max(top) / min(top)
    ok = (abs(grow.exponent - 0.5) <= 0.1 and ratio <= 1.3 and wall <= 300.0)
    _verdict(4, "separated-window sharpness", ok,
             f"beta=0.75 exponent={grow.exponent:.3f} (0.5+-0.1), "
             f"beta=0.5 top-decade max/min={ratio:.3f} (<=1.3), "
             f"wall={wall:.0f}s (<=300)")


def test_criterion_05_transmission_asymptotics():
    support = (-6.0, 6.0)
    v0, a = 2.0, 1.0
    worst = 0.0
    for k in (0.7, 1.3, 2.5, 6.0):
        kappa = np.sqrt(complex(v0 - k**2))
        exact = np.exp(-2j * k * a) / (
            np.cosh(2 * kappa * a)
            + 0.5j * (kappa / k - k / kappa) * np.sinh(2 * kappa * a))
        rec = transmission(sl.square_barrier(v0, a), k, (-1.0, 1.0))
        worst = max(worst, abs(rec.T - exact))
    rels = []
    for v in (sl.gaussian(0.7, 1.3), sl.sech2(0.9, 1.1)):
        fit = transmission_asymptotics_fit(v, np.geomspace(10.0, 100.0, 9),
                                           support)
        rels.append(abs(fit.constant - fit.integral_v) / abs(fit.integral_v))
    ok = worst <= 1e-8 and max(rels) <= 0.05
    _verdict(5, "transmission asymptotics", ok,
             f"barrier_err={worst:.1e} (<=1e-8), "
             f"2ik(T-1) vs int v rel={max(rels):.2e} (<=0.05)")


def test_criterion_06_aronszajn_krein_exactness():
    g = sl.make_grid(32, 10.0)
    rng = np.random.default_rng(0)
    worst = 0.0
    for seed in range(100):
        r = np.random.default_rng(10_000 + seed)
        m = r.standard_normal((32, 32)) + 1j * r.standard_normal((32, 32))
        op0 = sl.dense_operator(g, 0.5 * (m + m.conj().T))
        xi = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        op1 = rank_one_perturbation(op0, xi)
        z = rng.uniform(-2, 2) + 1j * rng.uniform(0.05, 1.0)
        F1_direct = resolvent_form(op1, xi, z)
        F1_ak = aronszajn_krein(resolvent_form(op0, xi, z))
        worst = max(worst, abs(F1_ak - F1_direct) / max(abs(F1_direct), 1.0))
    ok = worst <= 1e-10
    _verdict(6, "rank-one resolvent formula exactness", ok,
             f"worst rel err over 100 fixtures = {worst:.1e} (<=1e-10)")


def test_criterion_07_time_integral_bound():
    g, h0, _, _ = _momentum_pair()
    gaps = np.diff(np.sort(h0.symbol_values))
    T = 0.01 * 2 * np.pi / np.mean(gaps[gaps > 1e-12])
    worst = 0.0
    for seed in range(50):
        xi = band_packet(h0, (2.0, 4.0), seed=seed)
        psi = band_packet(h0, (2.0, 4.0), seed=1000 + seed)
        res = rosenblum_check(h0, xi, psi, T=T)
        worst = max(worst, res.integral / res.bound)
    flat = _flat_band_packet(g, h0, 2.0, 4.0)
    sat = rosenblum_check(h0, flat, flat, T=3.0)
    ratio = sat.integral / sat.bound
    ok = worst <= 1.01 and 0.9 <= ratio <= 1.01
    _verdict(7, "time-integral spectral bound", ok,
             f"worst integral/bound over 50 fixtures = {worst:.3f} (<=1.01), "
             f"saturating fixture ratio = {ratio:.3f} (in [0.9, 1.01])")


def test_criterion_08_trace_class_bound_dominates():
    g = sl.make_grid(512, 100.0)
    h0 = sl.momentum(g)
    details = []
    ok = True
    for t, seed in ((0.25, 2), (0.5, 3), (1.0, 4)):
        xi = band_packet(h0, (2.0, 6.0), seed=seed)
        h1 = sl.dense_operator(
            g, h0.matrix() + t * np.outer(xi.values, xi.values.conj()))
        scan = fbound_scan(h0, h1, f_beta(0.5), [(3.0, 5.0)],
                           packets_per_band=4, seed=1)
        measured = scan.samples[0][1]
        bound = trace_class_bound(h0, h1, [(t, xi.values)], f_beta(0.5),
                                  Lam=0.0)
        ok = ok and measured <= bound
        details.append(f"t={t}: {measured:.3e}<={bound:.3e}")
    _verdict(8, "trace-class bound dominance", ok, "; ".join(details))


def test_criterion_09_cauchy_boundary_values():
    worst_route = 0.0
    worst_jump = 0.0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        a0, a1, a2 = rng.uniform(-1, 1, 3)
        w = rng.uniform(1.0, 3.0)
        B = HoelderFunction(
            fn=lambda l, a0=a0, a1=a1, a2=a2, w=w:
                a0 + a1 * np.sin(w * l) + a2 * l**2,
            a=-1.0, b=1.0, theta=0.5)
        lam = np.random.default_rng(1000 + seed).uniform(-0.4, 0.4)
        up = cauchy_boundary(B, lam, +1)
        dn = cauchy_boundary(B, lam, -1)
        worst_route = max(worst_route, abs(up - cauchy_eps_route(B, lam, +1)))
        worst_jump = max(worst_jump, abs((up - dn) - 2j * np.pi * B(lam)))
    ok = worst_route <= 1e-4 and worst_jump <= 1e-6
    _verdict(9, "Cauchy boundary values, two routes", ok,
             f"route diff={worst_route:.1e} (<=1e-4), "
             f"jump defect={worst_jump:.1e} (<=1e-6)")


def test_criterion_10_kernel_norms():
    hil = kernel_operator_norm(0.0, "K2").value
    hil_err = abs(hil - np.pi)
    drifts = []
    for gamma in (0.25, 0.45):
        base = kernel_operator_norm(gamma, "K2")
        finer = kernel_operator_norm(gamma, "K2", window=base.window * 1.5,
                                     resolution=base.resolution * 2)
        drifts.append(abs(finer.value - base.value) / base.value)
    div = [v for _, v in kernel_divergence_scan(0.6)]
    diverges = div[1] > 1.5 * div[0] and div[2] > 1.5 * div[1]
    ok = hil_err <= 1e-4 and max(drifts) <= 0.02 and diverges
    _verdict(10, "singular kernel norms", ok,
             f"|norm(0)-pi|={hil_err:.1e} (<=1e-4), refinement "
             f"drift={max(drifts):.1e} (<=0.02), divergence at 0.6: "
             f"{div[0]:.1f}->{div[1]:.1f}->{div[2]:.1f}")


def test_criterion_11_fractional_difference_uniformity():
    vals = []
    for n in (128, 256, 512, 1024):
        grid = sl.make_grid(n, 60.0)
        kmax = float(np.max(np.abs(grid.k)))
        for radius in (10.0, 100.0, 1000.0, 10000.0):
            A = sl.multiplier_operator(
                grid, lambda k, r=radius, km=kmax: r * (k / km) ** 2)
            B = sl.add_potential(A, sl.gaussian(1.0, 2.0))
            vals.append(fractional_difference_norm(A, B, 0.5))
    worst = max(vals)
    ok = worst <= 0.5
    _verdict(11, "fractional power difference uniformity", ok,
             f"max norm over 16 (dim, radius) fixtures = {worst:.4f} (<=0.5)")


def test_criterion_12_tensor_sum_resolvent():
    # exactness of the per-block resolvent formula on a 64-dim fixture
    g = sl.make_grid(16, 12.0)
    base = sl.laplacian(g, 2.0)
    op = sl.tensor_sum(base, [0.0, 1.3, 2.9, 4.1], [1, 1, 1, 1])
    from scatlab.resolvent import ResolventAction
    rng = np.random.default_rng(0)
    z = 0.7 + 0.4j
    act = ResolventAction(op, z)
    dense = np.linalg.inv(op.matrix() - z * np.eye(op.dim))
    worst = 0.0
    for _ in range(5):
        vec = rng.standard_normal(op.dim) + 1j * rng.standard_normal(op.dim)
        worst = max(worst, np.linalg.norm(act.apply(vec) - dense @ vec)
                    / np.linalg.norm(dense @ vec))

    # decay-exponent transfer from the base symbol to the tensor sum
    weight = Weight(0.75)
    g2 = sl.make_grid(4096, 300.0)
    base2 = sl.laplacian(g2, 2.0)
    tens = sl.tensor_sum(base2, [-2.0, -0.7, 0.9, 3.0], [1, 1, 1, 1])
    lams = np.geomspace(30.0, 300.0, 6)
    b_base = high_energy_fit(
        [(float(l), boundary_value(base2, float(l), +1, weight).value)
         for l in lams]).beta_hat
    b_tens = high_energy_fit(
        [(float(l), boundary_value(tens, float(l), +1, weight).value)
         for l in lams]).beta_hat
    gap = abs(b_tens - b_base)
    ok = worst <= 1e-10 and gap <= 0.05
    _verdict(12, "tensor-sum resolvent", ok,
             f"block vs dense rel err={worst:.1e} (<=1e-10), exponent "
             f"base={b_base:.3f} tensor={b_tens:.3f} gap={gap:.3f} (<=0.05)")


def test_criterion_13_backflow_transfer():
    spec = backflow_spectrum(GAUSS, (256, 512, 1024), 40.0)
    lows = [h[1] for h in spec.refinement_history]
    stable = abs(lows[-1] - lows[-2]) <= 0.02 * abs(lows[-1])
    growth = highest_growth_exponent(spec)

    # conjugation by the wave operator of a narrow (reflection-dominated)
    # bump: the difference norm stays flat across bands while the flux
    # itself grows like (band center)^(1/2)
    g = sl.make_grid(4096, 100.0)
    h0 = sl.laplacian(g, 2.0)
    h1 = sl.add_potential(h0, sl.gaussian(0.5, 0.07 * np.sqrt(2.0)))
    kcs = (2.5, 2.5 * np.sqrt(2.0), 5.0, 5.0 * np.sqrt(2.0))
    bands = [((kc - 0.6) ** 2, (kc + 0.6) ** 2) for kc in kcs]
    scan = conjugation_difference_norm(h0, h1, flux_operator(GAUSS, g),
                                       bands, packets_per_band=3, seed=0)
    diffs = [s[1] for s in scan.samples]
    flat_ratio = max(diffs) / min(diffs)
    ok = (spec.lowest < 0 and stable and growth > 0
          and flat_ratio <= 1.5 and abs(scan.a_growth_fit - 0.5) <= 0.1)
    _verdict(13, "backflow semiboundedness transfer", ok,
             f"lowest={spec.lowest:.5f} (<0, stable={stable}), "
             f"highest growth={growth:.2f} (>0), conj diff max/min="
             f"{flat_ratio:.3f} (<=1.5), flux growth={scan.a_growth_fit:.3f} "
             f"(0.5+-0.1)")
