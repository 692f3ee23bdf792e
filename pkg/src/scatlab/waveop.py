"""Wave operators via Cook time integration and the stationary resolvent
formula, plus f-boundedness scans over band-limited packet ensembles.

Conventions: time_evolve(op, psi, t) realizes e^{itH} psi, and the wave
operator for side s in {+1, -1} is

    W_s psi = psi - i s int_0^T e^{-i s t H1} V e^{i s t H0} psi dt

with T capped by the periodic box (wrap-around detection) and the
unintegrated tail estimated from the decay of the integrand.
"""

from dataclasses import dataclass, field

import numpy as np

from .grids import Grid
from .operators import LatticeOperator, DENSE_CAP
from .resolvent import ResolventAction, Weight, eps_floor, spectral_density_form

_BAND_PURITY = 1e-8
_EDGE_MASS_TOL = 1e-4
_EDGE_FRACTION = 0.05


@dataclass
class WavePacket:
    """A state vector on a grid, optionally certified band-limited."""

    values: np.ndarray
    grid: Grid
    band: tuple = None            # energy interval under the reference operator
    norm_l2: float = field(init=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        self.norm_l2 = float(np.linalg.norm(self.values))
        if not self.norm_l2 > 0:
            raise ValueError("wave packet must be nonzero")


@dataclass
class CookResult:
    packet: WavePacket
    side: int
    T: float
    steps: int
    tail_estimate: float


@dataclass
class FBoundScan:
    f_name: str
    samples: list                 # (band_center, measured_norm, packet_count)
    growth_fit: float = None
    fit_residual: float = None
    band_width: float = None
    tail_estimates: list = None


@dataclass
class RosenblumResult:
    integral: float
    bound: float
    density_sup: float
    tail_estimate: float
    ok: bool


def band_projector_mask(op: LatticeOperator, band) -> np.ndarray:
    """Fourier-space indicator of symbol(k) in [band[0], band[1]]."""
    if op.kind != "multiplier":
        raise ValueError("band projection in Fourier space needs a multiplier")
    lo, hi = band
    return ((op.symbol_values >= lo) & (op.symbol_values <= hi)).astype(float)


def project_band(op: LatticeOperator, vec: np.ndarray, band) -> np.ndarray:
    mask = band_projector_mask(op, band)
    return np.fft.ifft(mask * np.fft.fft(vec))


def band_purity_defect(op: LatticeOperator, vec: np.ndarray, band) -> float:
    """Relative mass of vec outside the spectral band of op."""
    mask = band_projector_mask(op, band)
    coeffs = np.fft.fft(vec)
    outside = np.linalg.norm((1.0 - mask) * coeffs)
    return float(outside / np.linalg.norm(coeffs))


def make_packet(values, grid: Grid, band=None, reference: LatticeOperator = None):
    """Wrap values as a WavePacket, verifying band purity if certifiable."""
    p = WavePacket(values=values, grid=grid, band=band)
    if band is not None and reference is not None:
        defect = band_purity_defect(reference, p.values, band)
        if defect > _BAND_PURITY:
            raise ValueError(f"packet has relative mass {defect:.2e} outside "
                             f"its declared band {band}")
    return p


def band_packet(op: LatticeOperator, band, seed: int = 0,
                x0: float = None, width: float = None) -> WavePacket:
    """A localized random packet spectrally confined to an energy band of op.

    A Gaussian envelope modulated at a carrier wavenumber inside the band
    is hard-projected onto the band, so localization in x survives while
    the band invariant holds exactly on the grid.
    """
    if op.kind != "multiplier":
        raise ValueError("band packets are built on multiplier reference operators")
    lo, hi = band
    if not lo < hi:
        raise ValueError(f"empty band {band}")
    g = op.grid
    sym_max = float(np.max(op.symbol_values))
    if hi > sym_max:
        raise ValueError(f"band {band} reaches beyond the largest symbol "
                         f"value {sym_max:.4g}; refine the grid")
    mask = band_projector_mask(op, band)
    if not np.any(mask):
        raise ValueError(f"band {band} contains no grid modes")
    rng = np.random.default_rng(seed)

    in_band = np.where(mask > 0)[0]
    # prefer the nonnegative-k branch of the band when available
    pos = in_band[g.k[in_band] >= 0]
    branch = pos if len(pos) else in_band
    center = 0.5 * (lo + hi)
    k_branch = g.k[branch]
    sym_branch = op.symbol_values[branch]
    i0 = int(np.argmin(np.abs(sym_branch - center)))
    k0 = k_branch[i0]
    # wavenumber half-width of the band on this branch
    k_half = 0.5 * (np.max(k_branch) - np.min(k_branch))
    if k_half <= 0:
        k_half = np.abs(g.k[1] - g.k[0]) if g.n > 1 else 1.0

    sigma_k = max(k_half / 3.0, 2.0 * np.pi / g.L * 2.0) * rng.uniform(0.8, 1.2)
    sigma_x = 1.0 / sigma_k if width is None else width
    if x0 is None:
        x0 = rng.uniform(-g.L / 10.0, g.L / 10.0)

    psi = np.exp(-((g.x - x0) ** 2) / (2.0 * sigma_x**2) + 1j * k0 * g.x)
    coeffs = mask * np.fft.fft(psi)
    # smooth taper over the energy band keeps the packet localized (hard
    # spectral edges would give slow 1/x tails in position); the fourth
    # power flattens three derivatives at the edges
    u = np.clip((op.symbol_values - lo) / (hi - lo), 0.0, 1.0)
    coeffs *= np.sin(np.pi * u) ** 4
    # smooth random in-band phase diversifies the ensemble; each harmonic
    # m translates weak sidelobes by ~2 pi m / (band k-width) in x, so
    # only low harmonics at small amplitude keep the packet local
    phase = sum((0.2 * rng.standard_normal() / m)
                * np.sin(2 * np.pi * m * u + rng.uniform(0, 2 * np.pi))
                for m in range(1, 3))
    coeffs *= np.exp(1j * phase)
    vals = np.fft.ifft(coeffs)
    nrm = np.linalg.norm(vals)
    if nrm == 0:
        raise ValueError(f"band {band} produced an empty packet")
    return WavePacket(values=vals / nrm, grid=g, band=(lo, hi))


# -- time evolution ---------------------------------------------------------


def _evolve_values(op: LatticeOperator, vals: np.ndarray, t: float) -> np.ndarray:
    if op.kind == "multiplier":
        return np.fft.ifft(np.exp(1j * t * op.symbol_values) * np.fft.fft(vals))
    if op.kind == "multiplier_plus_potential" and op.dim > DENSE_CAP:
        return _split_step(op, vals, t)
    w, U = op.eig()
    return U @ (np.exp(1j * t * w) * (U.conj().T @ vals))


def _split_step(op: LatticeOperator, vals: np.ndarray, t: float,
                tol: float = 1e-9, max_doublings: int = 14) -> np.ndarray:
    """Strang splitting for e^{it(H0+V)} with step-doubling error control."""
    if t == 0:
        return vals.astype(complex)

    def run(nsteps):
        dt = t / nsteps
        half_v = np.exp(1j * (dt / 2.0) * op.v_values)
        kin = np.exp(1j * dt * op.symbol_values)
        out = vals.astype(complex)
        for _ in range(nsteps):
            out = half_v * out
            out = np.fft.ifft(kin * np.fft.fft(out))
            out = half_v * out
        return out

    nsteps = max(16, int(abs(t) * 4))
    prev = run(nsteps)
    for _ in range(max_doublings):
        nsteps *= 2
        cur = run(nsteps)
        if np.linalg.norm(cur - prev) <= tol * np.linalg.norm(vals):
            return cur
        prev = cur
    raise ArithmeticError("split-step evolution did not reach tolerance "
                          f"{tol:g}; final step count {nsteps}")


def time_evolve(op: LatticeOperator, psi, t: float):
    """e^{itH} psi; unitary to 1e-10, exact in Fourier for multipliers."""
    if isinstance(psi, WavePacket):
        out = _evolve_values(op, psi.values, t)
        return WavePacket(values=out, grid=psi.grid, band=psi.band)
    return _evolve_values(op, np.asarray(psi, dtype=complex), t)


# -- Cook integration -------------------------------------------------------


def _make_stepper(op: LatticeOperator, dt: float):
    """A cheap fixed-step propagator vec -> e^{i dt H} vec.

    Multipliers step exactly; multiplier-plus-potential uses one Strang
    split per step (its O(dt^2) error is controlled by the caller's step
    doubling); other kinds step through the eigendecomposition.
    """
    if op.kind == "multiplier":
        phase = np.exp(1j * dt * op.symbol_values)
        return lambda vec: np.fft.ifft(phase * np.fft.fft(vec))
    if op.kind == "multiplier_plus_potential":
        half_v = np.exp(1j * (dt / 2.0) * op.v_values)
        kin = np.exp(1j * dt * op.symbol_values)
        return lambda vec: half_v * np.fft.ifft(kin * np.fft.fft(half_v * vec))
    w, U = op.eig()
    prop = (U * np.exp(1j * dt * w)) @ U.conj().T
    return lambda vec: prop @ vec


def _difference_action(h0: LatticeOperator, h1: LatticeOperator):
    """The perturbation V = H1 - H0 as a vector action."""
    if (h0.kind == "multiplier" and h1.kind == "multiplier_plus_potential"
            and np.array_equal(h0.symbol_values, h1.symbol_values)):
        v = h1.v_values
        return lambda vec: v * vec
    return lambda vec: h1.apply(vec) - h0.apply(vec)


def edge_mass(grid: Grid, vals: np.ndarray, fraction: float = _EDGE_FRACTION):
    """Fraction of |psi|^2 within the outer `fraction` of the box each side."""
    n_edge = max(int(grid.n * fraction), 1)
    dens = np.abs(vals) ** 2
    total = np.sum(dens)
    return float((np.sum(dens[:n_edge]) + np.sum(dens[-n_edge:])) / total)


def _max_group_speed(op: LatticeOperator, coeffs: np.ndarray) -> float:
    """Largest |d symbol/dk| over the modes the packet occupies."""
    occupied = np.abs(coeffs) > 1e-6 * np.max(np.abs(coeffs))
    ks = op.grid.k
    order = np.argsort(ks)
    k_sorted = ks[order]
    sym_sorted = op.symbol_values[order]
    dsym = np.gradient(sym_sorted, k_sorted)
    return float(np.max(np.abs(dsym[order.argsort()][occupied])))


def default_cook_time(h0: LatticeOperator, psi: WavePacket,
                      margin: float = 0.05) -> float:
    """Largest time before the freely evolved packet nears the box edge.

    The initial extent is measured as the radius containing all but half
    the edge-mass tolerance, so Gaussian tails are budgeted for.
    """
    g = psi.grid
    dens = np.abs(psi.values) ** 2
    dens /= np.sum(dens)
    order = np.argsort(np.abs(g.x))
    cum = np.cumsum(dens[order])
    idx = int(np.searchsorted(cum, 1.0 - 0.5 * _EDGE_MASS_TOL))
    radius = float(np.abs(g.x[order[min(idx, g.n - 1)]]))
    vmax = _max_group_speed(h0, np.fft.fft(psi.values))
    if vmax == 0:
        return g.L
    room = (0.5 - _EDGE_FRACTION - margin) * g.L - radius
    return max(room / vmax, 1e-3)


def _tail_from_decay(ts, norms, T):
    """Bound int_T^inf by fitting a power law to the last-quarter integrand."""
    ts = np.asarray(ts)
    norms = np.asarray(norms)
    sel = (ts >= 0.75 * T) & (norms > 1e-300) & (ts > 0)
    if np.count_nonzero(sel) < 3:
        return float("inf")
    lt, ln = np.log(ts[sel]), np.log(norms[sel])
    p, logc = np.polyfit(lt, -ln, 1), None
    slope, intercept = p
    c = np.exp(-intercept)
    if slope <= 1.0:
        return float("inf")
    return float(c * T ** (1.0 - slope) / (slope - 1.0))


def cook_wave_operator(h0: LatticeOperator, h1: LatticeOperator,
                       psi: WavePacket, side: int = -1, T: float = None,
                       quadrature_steps: int = None, tol: float = 3e-5,
                       max_doublings: int = 8) -> CookResult:
    """W_side psi by time quadrature of e^{-istH1} V e^{istH0} psi.

    The integral is accumulated in the moving H1 frame so each quadrature
    step costs one short-time propagation; the result is checked by step
    doubling. Aborts if the freely evolved packet wraps around the box.
    """
    s = 1 if side >= 0 else -1
    g = psi.grid
    v_action = _difference_action(h0, h1)
    if T is None:
        T = default_cook_time(h0, psi)

    # wrap-around guard on the free evolution at the final time
    free_T = _evolve_values(h0, psi.values, s * T)
    if edge_mass(g, free_T) > _EDGE_MASS_TOL:
        raise ArithmeticError(
            f"freely evolved packet has edge mass {edge_mass(g, free_T):.2e} "
            f"at T={T:g}; reduce T or enlarge the box")

    def run(nsteps):
        dt = T / nsteps
        step0 = _make_stepper(h0, s * dt)
        step1 = _make_stepper(h1, s * dt)
        back1 = _make_stepper(h1, -s * dt)
        a = psi.values.astype(complex)          # e^{i s t H0} psi
        acc = np.zeros_like(a)                  # moving-frame accumulator
        gprev = v_action(a)
        integrand_norms = [np.linalg.norm(gprev)]
        for _ in range(nsteps):
            a = step0(a)
            gcur = v_action(a)
            integrand_norms.append(np.linalg.norm(gcur))
            acc = step1(acc + (dt / 2.0) * gprev)
            acc = acc + (dt / 2.0) * gcur
            gprev = gcur
        for _ in range(nsteps):                 # back to the fixed frame
            acc = back1(acc)
        return acc, np.asarray(integrand_norms)

    nsteps = quadrature_steps or 128
    acc, norms = run(nsteps)
    if quadrature_steps is None:
        for _ in range(max_doublings):
            nsteps *= 2
            acc2, norms = run(nsteps)
            if np.linalg.norm(acc2 - acc) <= tol * psi.norm_l2:
                acc = acc2
                break
            acc = acc2
        else:
            raise ArithmeticError("Cook quadrature did not converge under "
                                  f"step doubling (last {nsteps} steps)")

    out = psi.values - 1j * s * acc
    ts = np.linspace(0.0, T, len(norms))
    tail = _tail_from_decay(ts, norms, T)
    packet = WavePacket(values=out, grid=g, band=psi.band)
    return CookResult(packet=packet, side=s, T=T, steps=nsteps,
                      tail_estimate=tail)


def analytic_wave_operator_1st_order(v, grid: Grid, side: int = -1,
                                     edge_tol: float = 1e-10) -> np.ndarray:
    """The exact multiplication unitary w(x) = exp(i int_x^{-side*inf} v).

    Valid for H0 = -i d/dx, H1 = H0 + v with integrable v; side=-1 gives
    w_-(x) = exp(i int_x^inf v).
    """
    vals = np.asarray(v(grid.x), dtype=float)
    scale = max(np.max(np.abs(vals)), 1.0)
    if abs(vals[0]) > edge_tol * scale or abs(vals[-1]) > edge_tol * scale:
        raise ValueError("potential carries significant mass at the box edge; "
                         "enlarge the box")
    s = 1 if side >= 0 else -1
    # cumulative integral from the left box edge (trapezoid)
    F = np.concatenate([[0.0], np.cumsum((vals[1:] + vals[:-1]) / 2.0)]) * grid.h
    total = F[-1]
    phase = -F if s > 0 else (total - F)
    w = np.exp(1j * phase)
    return w


# -- stationary representation ---------------------------------------------


def stationary_matrix_element(h0: LatticeOperator, h1: LatticeOperator,
                              phi: WavePacket, psi: WavePacket,
                              side: int = -1, eps: float = None,
                              extrapolate: bool = True) -> complex:
    """<phi, W_side psi> via (eps/pi) int <phi, R1(lam-is*eps) R0(lam+is*eps) psi> dlam.

    The lambda integral runs over the packet band widened by several eps;
    a short geometric eps schedule is extrapolated to eps -> 0.
    """
    s = 1 if side >= 0 else -1
    if psi.band is None:
        raise ValueError("stationary representation needs a band-limited psi")
    if eps is None:
        # the smallest level eps/4 must stay above the local eigenvalue
        # spacing; the floor uses the mean local gap, which is robust
        # against the near-degenerate +-k pairs (a median would see only
        # the tiny pair splitting and drop eps below the true spacing)
        from .resolvent import eps_floor
        eps = max(1.5 * eps_floor(h1, 0.5 * (psi.band[0] + psi.band[1])),
                  1e-3)

    if h1.kind == "multiplier":
        w1, U1 = None, None
    else:
        w1, U1 = h1.eig()

    def value_at(e):
        lo, hi = psi.band
        # fine mesh through the band, geometric wings to tame the
        # Lorentzian 1/dist^2 tails (truncating at few*eps loses percents)
        core = np.arange(lo - 8 * e, hi + 8 * e + e / 4, e / 4)
        pad = max(200.0 * e, 4.0 * (hi - lo))
        wing = 8 * e * 1.2 ** np.arange(1, int(np.log(pad / (8 * e)) / np.log(1.2)) + 2)
        lams = np.unique(np.concatenate([core, lo - 8 * e - wing, hi + 8 * e + wing]))
        phi_c = U1.conj().T @ phi.values if U1 is not None else None
        vals = np.empty(len(lams), dtype=complex)
        for i, lam in enumerate(lams):
            y = ResolventAction(h0, lam - 1j * s * e).apply(psi.values)
            if U1 is not None:
                yc = U1.conj().T @ y
                vals[i] = np.vdot(phi_c, yc / (w1 - (lam + 1j * s * e)))
            else:
                x = ResolventAction(h1, lam + 1j * s * e).apply(y)
                vals[i] = np.vdot(phi.values, x)
        return (e / np.pi) * np.trapezoid(vals, lams)

    if not extrapolate:
        return value_at(eps)
    # the stationary value is an Abel mean with time cutoff ~1/(2 eps);
    # its eps -> 0 error is smooth, so a quadratic fit through three
    # levels evaluated at eps = 0 removes both leading orders
    es = np.array([eps, eps / 2.0, eps / 4.0])
    vals = np.array([value_at(e) for e in es])
    return complex(np.polyfit(es, vals, 2)[-1])


# -- f-boundedness ----------------------------------------------------------


def f_beta(beta: float):
    """The reference unbounded continuous function f_beta(t) = (1+t^2)^(beta/2)."""
    return lambda t: (1.0 + np.asarray(t, dtype=float) ** 2) ** (beta / 2.0)


def fbound_scan(h0: LatticeOperator, h1: LatticeOperator, f, bands,
                packets_per_band: int = 16, side: int = -1, seed: int = 0,
                f_name: str = "f") -> FBoundScan:
    """Per-band sup over a packet ensemble of ||(W-1) f(H0) psi|| / ||psi||."""
    bands = [tuple(b) for b in bands]
    centers = [0.5 * (lo + hi) for lo, hi in bands]
    if np.any(np.diff(centers) <= 0):
        raise ValueError("bands must be increasing")
    for (l1, h1_), (l2, _) in zip(bands, bands[1:]):
        if l2 < h1_:
            raise ValueError("bands must be disjoint")

    from .operators import apply_function
    samples = []
    tails = []
    for b_idx, band in enumerate(bands):
        fh0 = apply_function(h0, f)
        sup = 0.0
        tail = 0.0
        for p in range(packets_per_band):
            psi = band_packet(h0, band, seed=seed + 1000 * b_idx + p)
            fpsi = fh0.apply(psi.values)
            packet = WavePacket(values=fpsi, grid=psi.grid, band=band)
            res = cook_wave_operator(h0, h1, packet, side=side)
            dev = np.linalg.norm(res.packet.values - fpsi) / psi.norm_l2
            sup = max(sup, float(dev))
            if np.isfinite(res.tail_estimate):
                tail = max(tail, res.tail_estimate)
        samples.append((float(np.mean(band)), sup, packets_per_band))
        tails.append(tail)

    growth, resid = None, None
    sups = np.array([s[1] for s in samples])
    cs = np.array([s[0] for s in samples])
    if np.all(sups > 0) and len(sups) >= 3:
        slope, intercept = np.polyfit(np.log(cs), np.log(sups), 1)
        growth = float(slope)
        resid = float(np.max(np.abs(np.log(sups)
                                    - (slope * np.log(cs) + intercept))))
    return FBoundScan(f_name=f_name, samples=samples, growth_fit=growth,
                      fit_residual=resid,
                      band_width=float(bands[0][1] - bands[0][0]),
                      tail_estimates=tails)


# -- Rosenblum lemma --------------------------------------------------------


def spectral_density_sup(op: LatticeOperator, xi: np.ndarray, band,
                         n_mesh: int = 64, eps: float = None) -> float:
    """sup over the band of (1/pi) Im <xi, R(lam + i eps) xi>."""
    lo, hi = band
    if eps is None:
        eps = max(eps_floor(op, 0.5 * (lo + hi)), 1e-6)
    lams = np.linspace(lo, hi, n_mesh)
    return max(spectral_density_form(op, lam, xi, eps) for lam in lams)


def rosenblum_check(h: LatticeOperator, xi: WavePacket, psi: WavePacket,
                    T: float, n_t: int = 4096) -> RosenblumResult:
    """Check int |<psi, e^{itH} xi>|^2 dt <= 2 pi ||xi||_H^2 ||psi||^2."""
    if xi.band is None:
        raise ValueError("xi must be band-limited with a declared band")
    if h.kind == "multiplier":
        a = np.conj(np.fft.fft(psi.values)) * np.fft.fft(xi.values) / h.grid.n
        freqs = h.symbol_values
    else:
        w, U = h.eig()
        a = np.conj(U.conj().T @ psi.values) * (U.conj().T @ xi.values)
        freqs = w
    ts = np.linspace(-T, T, n_t)
    corr = np.array([np.sum(a * np.exp(1j * t * freqs)) for t in ts])
    vals = np.abs(corr) ** 2
    integral = float(np.trapezoid(vals, ts))

    # tail bound from the decay over the outer quarter of [0, T]
    sel = np.abs(ts) >= 0.75 * T
    tail_level = float(np.max(vals[sel])) if np.any(sel) else float("inf")
    tail = _tail_from_decay(np.abs(ts[ts > 0]), vals[ts > 0], T)

    dens_sup = spectral_density_sup(h, xi.values, xi.band)
    bound = 2.0 * np.pi * dens_sup * psi.norm_l2**2
    ok = bool(integral <= bound * (1.0 + 1e-2))
    return RosenblumResult(integral=integral, bound=bound,
                           density_sup=dens_sup, tail_estimate=tail, ok=ok)


# -- trace-class bound ------------------------------------------------------


def trace_class_bound(h0: LatticeOperator, h1: LatticeOperator,
                      rank_one_terms, f, Lam: float) -> float:
    """2 pi sum_n |t_n| ||E1^Lam xi_n||_H1 ||E0^Lam f(H0) xi_n||_H0.

    E^Lam projects onto |spectrum| > Lam; each factor is a spectral
    sup-norm square root. Non-finite factors yield +inf (vacuous bound).
    """
    from .rankone import spectral_sup_norm
    from .operators import apply_function

    total = 0.0
    for t_n, xi_n in rank_one_terms:
        xi_n = np.asarray(xi_n, dtype=complex)
        p1 = _outside_projection(h1, xi_n, Lam)
        fx = apply_function(h0, f).apply(xi_n)
        p0 = _outside_projection(h0, fx, Lam)
        if np.linalg.norm(p1) == 0 or np.linalg.norm(p0) == 0:
            continue
        f1 = spectral_sup_norm(h1, p1, Lambda=Lam,
                               band=_occupied_band(h1, p1))
        f0 = spectral_sup_norm(h0, p0, Lambda=Lam,
                               band=_occupied_band(h0, p0))
        term = abs(t_n) * np.sqrt(max(f1.value, 0.0) * max(f0.value, 0.0))
        if not np.isfinite(term):
            return float("inf")
        total += term
    return float(2.0 * np.pi * total)


def _occupied_band(op: LatticeOperator, vec: np.ndarray, rel_tol: float = 1e-8):
    """Smallest spectral interval carrying the vector's weight."""
    if op.kind == "multiplier":
        c = np.abs(np.fft.fft(np.asarray(vec, dtype=complex)))
        sym = op.symbol_values
    else:
        w, U = op.eig()
        c = np.abs(U.conj().T @ np.asarray(vec, dtype=complex))
        sym = w
    occupied = sym[c > rel_tol * max(np.max(c), 1e-300)]
    if len(occupied) == 0:
        raise ValueError("vector carries no spectral weight")
    lo, hi = float(np.min(occupied)), float(np.max(occupied))
    pad = max(1e-6, 1e-3 * (hi - lo))
    return lo - pad, hi + pad


def _outside_projection(op: LatticeOperator, vec: np.ndarray, Lam: float):
    """E(-Lam, Lam)^perp vec."""
    if op.kind == "multiplier":
        mask = (np.abs(op.symbol_values) > Lam).astype(float)
        return np.fft.ifft(mask * np.fft.fft(vec))
    w, U = op.eig()
    c = U.conj().T @ vec
    return U @ (c * (np.abs(w) > Lam))
