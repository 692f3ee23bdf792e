"""Rank-one perturbation formulas and spectral sup-norms.

For H1 = H0 + <xi, .> xi the perturbed resolvent matrix element obeys
F1(z) = F0(z) / (1 + F0(z)) with F_j(z) = <xi, R_j(z) xi> (exact at any
Im z > 0), and the spectral density of a vector is recovered from
pi^{-1} Im <xi, R(lambda + i eps) xi> by eps-extrapolation.
"""

from dataclasses import dataclass, field

import numpy as np

from .operators import LatticeOperator
from .resolvent import ResolventAction, eps_schedule, _extrapolate

_POLE_TOL = 1e-6


@dataclass
class SpectralSupNorm:
    operator_tag: str
    Lambda: float
    value: float
    sample_lambdas: np.ndarray
    densities: np.ndarray
    eps_used: float
    excluded: list
    refinement_history: list
    reliable: bool


def aronszajn_krein(F0: complex) -> complex:
    """F1 = F0 / (1 + F0) for a unit-coupling rank-one perturbation."""
    F0 = complex(F0)
    if abs(1.0 + F0) < _POLE_TOL:
        raise ZeroDivisionError(
            f"1 + F0 = {1.0 + F0:.3e} is at the rank-one pole")
    return F0 / (1.0 + F0)


def resolvent_form(op: LatticeOperator, xi: np.ndarray, z: complex) -> complex:
    """<xi, (H - z)^{-1} xi> in the grid inner product."""
    if op.kind == "multiplier":
        coeffs = np.fft.fft(np.asarray(xi, dtype=complex))
        return complex(np.sum(np.abs(coeffs) ** 2 / (op.symbol_values - z))
                       / op.grid.n)
    w, U = op.eig()
    c = U.conj().T @ np.asarray(xi, dtype=complex)
    return complex(np.sum(np.abs(c) ** 2 / (w - z)))


def rank_one_perturbation(op: LatticeOperator, xi: np.ndarray,
                          coupling: float = 1.0) -> LatticeOperator:
    """H + coupling * <xi, .> xi as a dense operator."""
    from .operators import dense_operator
    xi = np.asarray(xi, dtype=complex)
    m = op.matrix() + coupling * np.outer(xi, xi.conj())
    return dense_operator(op.grid, m)


def _density_extrapolate(sched, raw):
    """eps -> 0 limit of a Poisson-smoothed density.

    The smoothing error of a locally smooth density is analytic in eps, so
    a quadratic fit through the smallest levels is used; the fit scatter
    is the error estimate. Small negative limits inside the error bar are
    clamped to zero (densities are nonnegative).
    """
    es = np.asarray(sched, dtype=float)[-4:]
    vals = np.asarray(raw, dtype=float)[-4:]
    coeffs = np.polyfit(es, vals, 2)
    value = float(coeffs[-1])
    err = float(np.max(np.abs(vals - np.polyval(coeffs, es))))
    scatter = max(err, 1e-3 * np.max(np.abs(vals)), 1e-12)
    if value < 0:
        if value < -10.0 * scatter:
            raise ArithmeticError(
                f"extrapolated density {value:.3e} significantly negative "
                f"(fit scatter {scatter:.1e}); refine the grid")
        value = 0.0
    return value


def _density_at(op, xi, lam, sched):
    """Extrapolated pi^{-1} Im <xi, R(lam + i eps) xi> over the schedule."""
    raw = np.array([np.imag(resolvent_form(op, xi, lam + 1j * e)) / np.pi
                    for e in sched])
    return _density_extrapolate(sched, raw)


def _density_at_ak(op0, xi, lam, sched):
    """Perturbed density via the Aronszajn-Krein formula on the free form."""
    raw = []
    for e in sched:
        F0 = resolvent_form(op0, xi, lam + 1j * e)
        raw.append(np.imag(aronszajn_krein(F0)) / np.pi)
    return _density_extrapolate(sched, raw)


def _sup_scan(op, xi, Lambda, band, n_points, evaluator, eps0, levels):
    lams = np.linspace(band[0], band[1], n_points)
    lams = lams[np.abs(lams) >= Lambda]
    densities = np.full(len(lams), np.nan)
    excluded = []
    eps_used = np.nan
    for i, lam in enumerate(lams):
        try:
            sched = eps_schedule(op, lam, eps0=eps0, levels=levels)
            eps_used = sched[-1]
            densities[i] = evaluator(lam, sched)
        except (ArithmeticError, ZeroDivisionError, ValueError) as exc:
            excluded.append((float(lam), str(exc)))
    good = densities[np.isfinite(densities)]
    sup = float(np.max(good)) if len(good) else float("nan")
    return lams, densities, excluded, eps_used, sup


def _scan_with_refinement(op, xi, Lambda, band, evaluator, eps0, levels,
                          n_base, tag):
    history = []
    out = None
    for n_points in (n_base, 2 * n_base, 4 * n_base):
        lams, dens, excl, eps_used, sup = _sup_scan(
            op, xi, Lambda, band, n_points, evaluator, eps0, levels)
        history.append(sup)
        out = (lams, dens, excl, eps_used, sup)
    lams, dens, excl, eps_used, sup = out
    stable = (np.isfinite(history[-1]) and np.isfinite(history[-2])
              and abs(history[-1] - history[-2]) <= 0.05 * abs(history[-1]))
    frac_excluded = len(excl) / max(len(lams), 1)
    return SpectralSupNorm(
        operator_tag=tag, Lambda=float(Lambda), value=sup,
        sample_lambdas=lams, densities=dens, eps_used=float(eps_used),
        excluded=excl, refinement_history=history,
        reliable=bool(stable and frac_excluded <= 0.10))


def _resolve_band(xi, band):
    if band is not None:
        return tuple(band)
    if hasattr(xi, "band") and xi.band is not None:
        return tuple(xi.band)
    raise ValueError("need a band-limited packet or an explicit band")


def _values_of(xi):
    return xi.values if hasattr(xi, "values") else np.asarray(xi, dtype=complex)


def spectral_sup_norm(op: LatticeOperator, xi, Lambda: float = 0.0,
                      band=None, eps0: float = None, levels: int = 6,
                      n_base: int = 256) -> SpectralSupNorm:
    """Max over a refined lambda-mesh of the extrapolated spectral density
    of xi under op, restricted to |lambda| >= Lambda."""
    band = _resolve_band(xi, band)
    vals = _values_of(xi)
    if np.linalg.norm(vals) == 0:
        return SpectralSupNorm("zero", float(Lambda), 0.0, np.array([]),
                               np.array([]), np.nan, [], [0.0, 0.0, 0.0], True)
    evaluator = lambda lam, sched: _density_at(op, vals, lam, sched)
    return _scan_with_refinement(op, vals, Lambda, band, evaluator, eps0,
                                 levels, n_base, tag=op.kind)


def perturbed_sup_norm_via_ak(op0: LatticeOperator, xi, Lambda: float = 0.0,
                              band=None, eps0: float = None, levels: int = 6,
                              n_base: int = 256) -> SpectralSupNorm:
    """Spectral sup-norm of xi under H1 = H0 + <xi,.>xi computed from the
    free form alone via the Aronszajn-Krein formula."""
    band = _resolve_band(xi, band)
    vals = _values_of(xi)
    evaluator = lambda lam, sched: _density_at_ak(op0, vals, lam, sched)
    return _scan_with_refinement(op0, vals, Lambda, band, evaluator, eps0,
                                 levels, n_base, tag=op0.kind + "+rank1(ak)")


def density_profiles(op0: LatticeOperator, xi, band, n_points: int = 256,
                     eps0: float = None, levels: int = 6,
                     include_direct: bool = False):
    """(lambda, free density, AK perturbed density[, direct perturbed]) rows.

    The direct column diagonalizes H1 = H0 + <xi,.>xi densely, so it is
    only available at dense-capped sizes.
    """
    vals = _values_of(xi)
    lams = np.linspace(band[0], band[1], n_points)
    h1 = rank_one_perturbation(op0, vals) if include_direct else None
    rows = []
    for lam in lams:
        try:
            sched = eps_schedule(op0, lam, eps0=eps0, levels=levels)
            free = _density_at(op0, vals, lam, sched)
            ak = _density_at_ak(op0, vals, lam, sched)
        except (ArithmeticError, ZeroDivisionError, ValueError):
            free, ak = np.nan, np.nan
        row = [float(lam), free, ak]
        if include_direct:
            try:
                sched1 = eps_schedule(h1, lam, eps0=eps0, levels=levels)
                row.append(_density_at(h1, vals, lam, sched1))
            except (ArithmeticError, ValueError):
                row.append(np.nan)
        rows.append(tuple(row))
    return rows
