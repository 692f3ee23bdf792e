"""Command-line front end: one subcommand per experiment family.

Every run writes a delimited report (CSV by default, JSON on request),
a JSON run manifest with parameter echo and output digests, and — unless
--no-figures is given — a rendered figure next to the delimited output.
Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

import argparse
import os
import sys
import time

import numpy as np

from . import __version__
from . import backflow as bf
from . import operators as ops
from . import potentials
from . import rankone
from . import report as rp
from . import resolvent as rv
from . import schrodinger1d as s1d
from . import singular
from . import waveop
from .config import ConfigError, parse_config
from .grids import make_grid


# -- spec-string parsing -----------------------------------------------------


def _parse_floats(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _parse_potential(spec):
    """'gaussian:0.3,1.5' | 'zero' | path/to/table.csv."""
    if spec.endswith(".csv"):
        return potentials.from_csv(spec)
    name, _, argstr = spec.partition(":")
    args = _parse_floats(argstr) if argstr else []
    if name not in potentials.BUILTINS:
        raise ConfigError("potential", "name",
                          f"unknown potential {name!r}; builtins: "
                          f"{sorted(potentials.BUILTINS)}")
    return potentials.BUILTINS[name](*args)


def _parse_operator(spec, grid):
    """'laplacian' | 'laplacian:3' | 'momentum'."""
    name, _, argstr = spec.partition(":")
    if name == "laplacian" or name == "polyharmonic":
        ell = float(argstr) if argstr else 2.0
        return ops.laplacian(grid, ell)
    if name == "momentum":
        return ops.momentum(grid)
    raise ConfigError("operator", "kind",
                      f"unknown operator {name!r}; use laplacian[:ell], "
                      "polyharmonic[:ell], or momentum")


def _parse_bands(text):
    """'2:6,8:12' -> [(2.0, 6.0), (8.0, 12.0)]."""
    bands = []
    for part in text.split(","):
        lo, _, hi = part.partition(":")
        bands.append((float(lo), float(hi)))
    return bands


def _apply_config(args):
    """Fill unset flags from a validated config file, if one was given."""
    if not getattr(args, "config", None):
        return
    cfg = parse_config(args.config)
    mapping = {
        "n": ("grid", "n"), "length": ("grid", "l"),
        "seed": ("run", "seed"), "alpha": ("scan", "alpha"),
        "beta": ("scan", "beta"), "gamma": ("scan", "gamma"),
        "theta": ("scan", "theta"), "points": ("scan", "points"),
        "levels": ("scan", "levels"), "side": ("scan", "side"),
        "packets": ("scan", "packets"), "eps0": ("scan", "eps0"),
        "lambda_min": ("scan", "lambda_min"),
        "lambda_max": ("scan", "lambda_max"),
    }
    for attr, key in mapping.items():
        if hasattr(args, attr) and getattr(args, attr) is None:
            val = cfg.get(*key)
            if val is not None:
                setattr(args, attr, val)


# -- subcommand handlers -----------------------------------------------------
# Each returns (ScanReport, x_column, log_axes) for the emitter.


def _run_resolvent_scan(args):
    grid = make_grid(args.n, args.length)
    op = _parse_operator(args.operator, grid)
    if args.potential:
        op = ops.add_potential(op, _parse_potential(args.potential))
    weight = rv.Weight(args.alpha)
    lams = np.geomspace(args.lambda_min, args.lambda_max, args.points)
    cols = {"lambda": [], "side": [], "eps_used": [], "raw_norm": [],
            "extrapolated": [], "error_est": [], "status": []}
    samples = []
    for lam in lams:
        try:
            bv = rv.boundary_value(op, float(lam), args.side, weight,
                                   eps0=args.eps0, levels=args.levels,
                                   seed=args.seed)
            cols["eps_used"].append(float(bv.eps_schedule[-1]))
            cols["raw_norm"].append(float(bv.raw_values[-1]))
            cols["extrapolated"].append(bv.value)
            cols["error_est"].append(bv.extrapolation_error)
            cols["status"].append("ok")
            samples.append((float(lam), bv.value))
        except (ArithmeticError, ValueError) as exc:
            cols["eps_used"].append(0.0)
            cols["raw_norm"].append(0.0)
            cols["extrapolated"].append(0.0)
            cols["error_est"].append(0.0)
            cols["status"].append(f"failed: {exc}")
        cols["lambda"].append(float(lam))
        cols["side"].append(args.side)
    fits = {}
    if len(samples) >= 6 and max(s[0] for s in samples) >= 10 * min(
            s[0] for s in samples):
        fit = rv.high_energy_fit(samples)
        fits = {"beta_hat": fit.beta_hat, "b_hat": fit.b_hat,
                "residual_log10": fit.residual}
    report = rp.ScanReport(
        columns=cols,
        descriptions={"lambda": "spectral parameter",
                      "side": "+1 upper / -1 lower half-plane",
                      "eps_used": "smallest eps in the schedule",
                      "raw_norm": "weighted norm at the smallest eps",
                      "extrapolated": "eps -> 0 extrapolated weighted norm",
                      "error_est": "extrapolation error estimate",
                      "status": "ok or failure reason"},
        fitted_exponents=fits)
    return report, "lambda", (True, True)


def _run_fbound_scan(args):
    grid = make_grid(args.n, args.length)
    h0 = _parse_operator(args.h0, grid)
    h1 = ops.add_potential(h0, _parse_potential(args.potential))
    kind, _, val = args.f.partition(":")
    if kind == "beta":
        f, f_name = waveop.f_beta(float(val)), f"beta:{val}"
    elif kind == "custom" and val == "identity":
        f, f_name = (lambda lam: np.ones_like(lam)), "custom:identity"
    else:
        raise ConfigError("scan", "f",
                          f"use 'beta:<value>' or 'custom:identity', got {args.f!r}")
    scan = waveop.fbound_scan(h0, h1, f, _parse_bands(args.bands),
                              packets_per_band=args.packets, seed=args.seed,
                              f_name=f_name)
    cols = {
        "band_center": [s[0] for s in scan.samples],
        "band_width": [scan.band_width] * len(scan.samples),
        "sup_norm": [s[1] for s in scan.samples],
        "packets": [s[2] for s in scan.samples],
        "tail_estimate": [t if np.isfinite(t) else -1.0
                          for t in scan.tail_estimates],
    }
    fits = {}
    if scan.growth_fit is not None:
        fits = {"growth": scan.growth_fit, "residual": scan.fit_residual}
    report = rp.ScanReport(
        columns=cols,
        descriptions={"band_center": "mean of the energy band",
                      "band_width": "band width",
                      "sup_norm": "sup ||(W-1) f(H0) psi|| / ||psi||",
                      "packets": "ensemble size",
                      "tail_estimate": "Cook time-tail bound (-1: none)"},
        fitted_exponents=fits,
        footnotes=[f"f = {f_name}", f"seed = {args.seed}"])
    return report, "band_center", (True, True)


def _run_wave_op(args):
    grid = make_grid(args.n, args.length)
    h0 = _parse_operator(args.h0, grid)
    h1 = ops.add_potential(h0, _parse_potential(args.potential))
    band = _parse_bands(args.bands)[0]
    psi = waveop.band_packet(h0, band, seed=args.seed, x0=0.0)
    phi = waveop.band_packet(h0, band, seed=args.seed + 1, x0=0.0)
    cook = waveop.cook_wave_operator(h0, h1, psi, side=args.side)
    cook_me = complex(np.vdot(phi.values, cook.packet.values))
    stat_me = waveop.stationary_matrix_element(h0, h1, phi, psi,
                                               side=args.side)
    diff = abs(cook_me - stat_me)
    cols = {"route": ["cook", "stationary", "difference"],
            "re": [cook_me.real, stat_me.real, diff],
            "im": [cook_me.imag, stat_me.imag, 0.0]}
    report = rp.ScanReport(
        columns=cols,
        descriptions={"route": "evaluation route of <phi, W psi>",
                      "re": "real part (difference row: |delta|)",
                      "im": "imaginary part"},
        footnotes=[f"band = {band}", f"side = {args.side}",
                   f"cook tail estimate = {cook.tail_estimate!r}"])
    return report, None, (False, False)


def _run_jost(args):
    v = _parse_potential(args.potential)
    support = (args.support_min, args.support_max)
    zeta = complex(args.zeta_re, args.zeta_im)
    pair = s1d.jost_solutions(v, zeta, support)
    cols = {"x": list(map(float, pair.x)),
            "theta1_re": list(pair.theta1.real),
            "theta1_im": list(pair.theta1.imag),
            "theta2_re": list(pair.theta2.real),
            "theta2_im": list(pair.theta2.imag)}
    report = rp.ScanReport(
        columns=cols,
        descriptions={"x": "position",
                      "theta1_re": "right Jost solution, real part",
                      "theta1_im": "right Jost solution, imaginary part",
                      "theta2_re": "left Jost solution, real part",
                      "theta2_im": "left Jost solution, imaginary part"},
        footnotes=[f"zeta = {zeta}", f"wronskian = {pair.wronskian}",
                   f"wronskian_drift = {pair.wronskian_drift:.3e}"])
    return report, "x", (False, False)


def _run_transmission(args):
    v = _parse_potential(args.potential)
    support = (args.support_min, args.support_max)
    ks = np.geomspace(args.k_min, args.k_max, args.points)
    cols = {"k": [], "ReT": [], "ImT": [], "unitarity_residual": []}
    for k in ks:
        rec = s1d.transmission(v, float(k), support)
        cols["k"].append(float(k))
        cols["ReT"].append(rec.T.real)
        cols["ImT"].append(rec.T.imag)
        cols["unitarity_residual"].append(rec.residual_unitarity)
    report = rp.ScanReport(
        columns=cols,
        descriptions={"k": "wavenumber",
                      "ReT": "transmission coefficient, real part",
                      "ImT": "transmission coefficient, imaginary part",
                      "unitarity_residual": "| |T|^2 + |R|^2 - 1 |"})
    return report, "k", (True, False)


def _run_sharpness(args):
    v = _parse_potential(args.potential)
    support = (args.support_min, args.support_max)
    ns = np.geomspace(args.n_min, args.n_max, args.points).round().astype(int)
    scan = s1d.sharpness_scan(v, args.beta, ns, support)
    cols = {"n": [int(n) for n, _ in scan.samples],
            "matrix_element": [m for _, m in scan.samples]}
    report = rp.ScanReport(
        columns=cols,
        descriptions={"n": "window separation parameter",
                      "matrix_element": "|<phi_n, (W - 1) f(H0) psi_n>| "
                                        "normalized"},
        fitted_exponents={"exponent": scan.exponent,
                          "residual": scan.fit_residual},
        footnotes=[f"beta = {args.beta}"])
    return report, "n", (True, True)


def _run_rankone(args):
    grid = make_grid(args.n, args.length)
    h0 = _parse_operator(args.h0, grid)
    band = _parse_bands(args.bands)[0]
    xi = waveop.band_packet(h0, band, seed=args.seed)
    rows = rankone.density_profiles(h0, xi, band, n_points=args.points,
                                    levels=args.levels,
                                    include_direct=args.direct)
    names = ["lambda", "density_free", "density_perturbed_ak"]
    if args.direct:
        names.append("density_perturbed_direct")
    cols = {name: [] for name in names}
    cols["status"] = []
    for row in rows:
        bad = any(isinstance(x, float) and np.isnan(x) for x in row)
        cols["status"].append("failed" if bad else "ok")
        for name, x in zip(names, row):
            cols[name].append(0.0 if (isinstance(x, float) and np.isnan(x))
                              else x)
    report = rp.ScanReport(
        columns=cols,
        descriptions={"lambda": "spectral parameter",
                      "density_free": "spectral density of xi under H0",
                      "density_perturbed_ak":
                          "density under H0 + <xi,.>xi via the "
                          "free-resolvent formula",
                      "density_perturbed_direct":
                          "density under the dense perturbed operator",
                      "status": "ok or failed"},
        footnotes=[f"band = {band}", f"seed = {args.seed}",
                   f"Lambda cut = {args.lambda_cut}"])
    return report, "lambda", (False, False)


def _run_cauchy(args):
    theta = args.theta
    if args.function.endswith(".csv"):
        import csv as _csv
        xs, ys = [], []
        with open(args.function, newline="") as fh:
            for row in _csv.reader(fh):
                try:
                    xs.append(float(row[0]))
                    ys.append(complex(row[1]))
                except (ValueError, IndexError):
                    continue
        B = singular.hoelder_from_samples(xs, ys, theta)
    elif args.function == "runge":
        B = singular.HoelderFunction(lambda l: 1.0 / (1.0 + l * l),
                                     a=-1.0, b=1.0, theta=theta)
    elif args.function == "cosine":
        B = singular.HoelderFunction(np.cos, a=-1.0, b=1.0, theta=theta)
    else:
        raise ConfigError("cauchy", "function",
                          f"use 'runge', 'cosine', or a CSV path, got "
                          f"{args.function!r}")
    lam = args.lam
    plemelj = singular.cauchy_boundary(B, lam, args.side)
    eps_route = singular.cauchy_eps_route(B, lam, args.side)
    cols = {"route": ["plemelj", "eps_extrapolated", "difference"],
            "re": [plemelj.real, eps_route.real, abs(plemelj - eps_route)],
            "im": [plemelj.imag, eps_route.imag, 0.0]}
    report = rp.ScanReport(
        columns=cols,
        descriptions={"route": "boundary-value evaluation route",
                      "re": "real part (difference row: |delta|)",
                      "im": "imaginary part"},
        footnotes=[f"lambda = {lam}", f"side = {args.side}",
                   f"theta = {theta}", f"hoelder constant c = {B.c!r}"])
    return report, None, (False, False)


def _run_kernel_norm(args):
    gammas = _parse_floats(args.gamma)
    cols = {"gamma": [], "kind": [], "norm": [], "window": [],
            "resolution": [], "status": []}
    for gamma in gammas:
        cols["gamma"].append(gamma)
        cols["kind"].append(args.kind)
        try:
            kn = singular.kernel_operator_norm(gamma, args.kind,
                                               window=args.window,
                                               resolution=args.resolution)
            cols["norm"].append(kn.value)
            cols["window"].append(kn.window)
            cols["resolution"].append(kn.resolution)
            cols["status"].append("ok")
        except (ArithmeticError, ValueError) as exc:
            cols["norm"].append(0.0)
            cols["window"].append(args.window or 0.0)
            cols["resolution"].append(args.resolution or 0)
            cols["status"].append(f"failed: {exc}")
    report = rp.ScanReport(
        columns=cols,
        descriptions={"gamma": "kernel exponent",
                      "kind": "K1_plus | K1_minus | K2",
                      "norm": "operator norm on L^2(0, inf)",
                      "window": "log-variable truncation half-width",
                      "resolution": "FFT points",
                      "status": "ok or failure reason"})
    return report, "gamma", (False, False)


def _run_backflow(args):
    g = _parse_potential(args.g)
    grids = [int(x) for x in args.grids.split(",")]
    spec_free = bf.backflow_spectrum(g, grids, args.length)
    v = _parse_potential(args.potential)
    cols = {"n": [], "lowest_free": [], "highest_free": [],
            "lowest_conjugated": [], "conj_diff_bound": []}
    for n, lo, hi in spec_free.refinement_history:
        grid = make_grid(n, args.length)
        h0 = ops.momentum(grid)
        J = bf.flux_operator(g, grid)
        E = bf.positive_momentum_projector(grid)
        w = waveop.analytic_wave_operator_1st_order(v, grid, side=-1)
        Jm = J.matrix()
        Jconj = np.conj(w)[:, None] * Jm * w[None, :]
        lo_c, _ = bf.compressed_extremes(ops.dense_operator(grid, Jconj), E,
                                         grid)
        diff_bound = float(np.linalg.norm(Jconj - Jm, 2))
        cols["n"].append(n)
        cols["lowest_free"].append(lo)
        cols["highest_free"].append(hi)
        cols["lowest_conjugated"].append(lo_c)
        cols["conj_diff_bound"].append(diff_bound)
    report = rp.ScanReport(
        columns=cols,
        descriptions={"n": "grid size",
                      "lowest_free": "lowest eigenvalue of E J(g) E",
                      "highest_free": "highest eigenvalue of E J(g) E",
                      "lowest_conjugated":
                          "lowest eigenvalue of E W* J(g) W E",
                      "conj_diff_bound": "||W* J(g) W - J(g)||"},
        footnotes=["Nyquist mode assigned to the negative-momentum sector",
                   "W = multiplication by exp(i int_x^inf v) "
                   "(momentum-pair wave operator)"])
    return report, "n", (True, False)


_HANDLERS = {
    "resolvent-scan": _run_resolvent_scan,
    "fbound-scan": _run_fbound_scan,
    "wave-op": _run_wave_op,
    "jost": _run_jost,
    "transmission": _run_transmission,
    "sharpness": _run_sharpness,
    "rankone": _run_rankone,
    "cauchy": _run_cauchy,
    "kernel-norm": _run_kernel_norm,
    "backflow": _run_backflow,
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="scatlab",
        description="numerical scattering-theory laboratory")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, grid=True):
        sp.add_argument("--config", default=None,
                        help="sectioned key = value config file")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None, help="output path")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--no-figures", action="store_true",
                        help="skip figure rendering")
        if grid:
            sp.add_argument("--n", type=int, default=1024)
            sp.add_argument("--length", type=float, default=100.0)

    sp = sub.add_parser("resolvent-scan",
                        help="weighted resolvent boundary values vs lambda")
    common(sp)
    sp.add_argument("--operator", default="laplacian")
    sp.add_argument("--potential", default=None)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--lambda-min", type=float, default=25.0)
    sp.add_argument("--lambda-max", type=float, default=2500.0)
    sp.add_argument("--points", type=int, default=6)
    sp.add_argument("--eps0", type=float, default=None)
    sp.add_argument("--levels", type=int, default=6)
    sp.add_argument("--side", type=int, choices=(-1, 1), default=1)

    sp = sub.add_parser("fbound-scan",
                        help="per-band sup of ||(W-1) f(H0) psi||")
    common(sp)
    sp.add_argument("--h0", default="momentum")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--f", default="beta:0.5",
                    help="'beta:<value>' or 'custom:identity'")
    sp.add_argument("--bands", default="2:4,6:8,12:16,24:32")
    sp.add_argument("--packets", type=int, default=4)

    sp = sub.add_parser("wave-op",
                        help="single-packet Cook vs stationary comparison")
    common(sp)
    sp.add_argument("--h0", default="momentum")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--bands", default="2:6")
    sp.add_argument("--side", type=int, choices=(-1, 1), default=-1)

    sp = sub.add_parser("jost", help="Jost solutions at a spectral point")
    common(sp, grid=False)
    sp.add_argument("--potential", required=True)
    sp.add_argument("--zeta-re", type=float, default=1.0)
    sp.add_argument("--zeta-im", type=float, default=0.1)
    sp.add_argument("--support-min", type=float, default=-8.0)
    sp.add_argument("--support-max", type=float, default=8.0)

    sp = sub.add_parser("transmission", help="transmission coefficient k-scan")
    common(sp, grid=False)
    sp.add_argument("--potential", required=True)
    sp.add_argument("--k-min", type=float, default=0.5)
    sp.add_argument("--k-max", type=float, default=20.0)
    sp.add_argument("--points", type=int, default=12)
    sp.add_argument("--support-min", type=float, default=-8.0)
    sp.add_argument("--support-max", type=float, default=8.0)

    sp = sub.add_parser("sharpness",
                        help="separated-window matrix-element growth")
    common(sp, grid=False)
    sp.add_argument("--potential", required=True)
    sp.add_argument("--beta", type=float, default=0.75)
    sp.add_argument("--n-min", type=float, default=16.0)
    sp.add_argument("--n-max", type=float, default=512.0)
    sp.add_argument("--points", type=int, default=8)
    sp.add_argument("--support-min", type=float, default=-8.0)
    sp.add_argument("--support-max", type=float, default=8.0)

    sp = sub.add_parser("rankone",
                        help="free vs rank-one-perturbed spectral densities")
    common(sp)
    sp.add_argument("--h0", default="laplacian")
    sp.add_argument("--bands", default="4:12")
    sp.add_argument("--lambda-cut", type=float, default=0.0)
    sp.add_argument("--points", type=int, default=33)
    sp.add_argument("--levels", type=int, default=6)
    sp.add_argument("--direct", action="store_true",
                    help="add the dense-diagonalization column")

    sp = sub.add_parser("cauchy",
                        help="Cauchy-integral boundary value, two routes")
    common(sp, grid=False)
    sp.add_argument("--function", default="runge",
                    help="'runge', 'cosine', or a CSV of (lambda, value)")
    sp.add_argument("--theta", type=float, default=0.5)
    sp.add_argument("--lam", "--lambda", dest="lam", type=float, default=0.1)
    sp.add_argument("--side", type=int, choices=(-1, 1), default=1)

    sp = sub.add_parser("kernel-norm",
                        help="homogeneous singular kernel operator norms")
    common(sp, grid=False)
    sp.add_argument("--gamma", default="0.0,0.25,0.45",
                    help="comma-separated exponents")
    sp.add_argument("--kind", choices=("K1_plus", "K1_minus", "K2"),
                    default="K2")
    sp.add_argument("--window", type=float, default=None)
    sp.add_argument("--resolution", type=int, default=None)

    sp = sub.add_parser("backflow",
                        help="compressed flux spectrum and conjugation")
    common(sp, grid=False)
    sp.add_argument("--g", default="gaussian:1.0,2.0",
                    help="flux averaging weight")
    sp.add_argument("--potential", default="gaussian:0.3,1.5")
    sp.add_argument("--grids", default="64,128,256")
    sp.add_argument("--length", type=float, default=60.0)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config(args)
        handler = _HANDLERS[args.subcommand]
        t0 = time.time()
        report, x_column, (logx, logy) = handler(args)
        wall = time.time() - t0

        ext = "csv" if args.format == "csv" else "json"
        out = args.out or f"{args.subcommand}.{ext}"
        rp.emit(report, args.format, out)

        stem = os.path.splitext(out)[0]
        manifest = rp.RunManifest(
            subcommand=args.subcommand,
            parameters={k: v for k, v in vars(args).items()
                        if k not in ("subcommand",)},
            seed=getattr(args, "seed", 0),
            version=__version__, wall_time_s=wall)
        manifest.record_output(out)
        if not args.no_figures and x_column is not None:
            fig_path = stem + ".png"
            rp.render_figure(report, fig_path, x_column=x_column,
                             logx=logx, logy=logy, title=args.subcommand)
            manifest.record_output(fig_path)
        manifest.write(stem + ".manifest.json")
        print(f"wrote {out} ({report.n_rows} rows)")
        return 0
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, ZeroDivisionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
