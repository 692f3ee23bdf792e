"""Cauchy integrals of Hoelder functions with Plemelj boundary values,
and the norms of the (lambda/mu)^gamma singular kernels on L^2(R_+).

The kernel norms are computed in the logarithmic picture: the unitary
substitution lambda = e^x turns K(lambda, mu) into a convolution in
x - y, so the operator norm is the sup of a one-dimensional Fourier
transform. A direct matrix discretization (lower bound) is kept as a
cross-check helper.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import erf

_MAX_BLOCK = 16


def _norm_of(val):
    """Spectral norm for matrix samples, absolute value for scalars."""
    arr = np.asarray(val)
    if arr.ndim == 0:
        return float(np.abs(arr))
    if arr.ndim == 2:
        return float(np.linalg.norm(arr, 2))
    raise ValueError(f"samples must be scalars or matrices, got shape {arr.shape}")


@dataclass
class HoelderFunction:
    """A function B on [a, b] with Hoelder exponent theta and the
    normalized constant c = sup||B|| + sup ((b-a)/|l-l'|)^theta ||B(l)-B(l')||."""

    fn: callable
    a: float
    b: float
    theta: float
    c: float = field(init=False)

    def __post_init__(self):
        if not 0 < self.theta < 1:
            raise ValueError(f"Hoelder exponent must lie in (0,1), got {self.theta}")
        if not self.a < self.b:
            raise ValueError("need a < b")
        probe = np.asarray(self.fn(self.a))
        if probe.ndim == 2 and probe.shape[0] > _MAX_BLOCK:
            raise ValueError(f"matrix blocks supported up to {_MAX_BLOCK}x{_MAX_BLOCK}")
        self.c = self._constant()

    def _constant(self, n_mesh: int = 257) -> float:
        lams = np.linspace(self.a, self.b, n_mesh)
        vals = [np.asarray(self.fn(l), dtype=complex) for l in lams]
        sup = max(_norm_of(v) for v in vals)
        semi = 0.0
        width = self.b - self.a
        for i in range(n_mesh):
            for j in range(i + 1, n_mesh):
                dl = lams[j] - lams[i]
                semi = max(semi, (width / dl) ** self.theta
                           * _norm_of(vals[j] - vals[i]))
        return float(sup + semi)

    def __call__(self, lam):
        return self.fn(lam)

    @property
    def inner_interval(self):
        """[a', b'] = [(3a+b)/4, (a+3b)/4], where boundary values are taken."""
        return (3 * self.a + self.b) / 4.0, (self.a + 3 * self.b) / 4.0


def hoelder_from_samples(xs, ys, theta: float) -> HoelderFunction:
    """Linear-interpolated Hoelder function from tabulated samples."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=complex)
    order = np.argsort(xs)
    xs, ys = xs[order], ys[order]

    def fn(lam):
        return np.interp(lam, xs, ys.real) + 1j * np.interp(lam, xs, ys.imag)

    return HoelderFunction(fn=fn, a=float(xs[0]), b=float(xs[-1]), theta=theta)


def cauchy_boundary(B: HoelderFunction, lam: float, side: int) -> complex:
    """C(lam + side*i0) of C(z) = int_a^b B(l') dl' / (l' - z), by the
    Plemelj split: the Hoelder-subtracted principal value, the log end
    term, and the +-i pi B(lam) jump."""
    a_in, b_in = B.inner_interval
    if not a_in <= lam <= b_in:
        raise ValueError(f"lambda={lam} outside the inner interval "
                         f"[{a_in}, {b_in}]")
    s = 1 if side >= 0 else -1
    Blam = np.asarray(B(lam), dtype=complex)

    if Blam.ndim == 0:
        def integrand_re(lp):
            return np.real((B(lp) - Blam) / (lp - lam))

        def integrand_im(lp):
            return np.imag((B(lp) - Blam) / (lp - lam))

        pv_re, _ = quad(integrand_re, B.a, B.b, points=[lam], limit=400)
        pv_im, _ = quad(integrand_im, B.a, B.b, points=[lam], limit=400)
        pv = pv_re + 1j * pv_im
        log_term = Blam * np.log((B.b - lam) / (lam - B.a))
        return complex(pv + log_term + 1j * np.pi * s * Blam)

    out = np.empty(Blam.shape, dtype=complex)
    for idx in np.ndindex(Blam.shape):
        def comp_re(lp, idx=idx):
            return np.real((np.asarray(B(lp), dtype=complex)[idx] - Blam[idx])
                           / (lp - lam))

        def comp_im(lp, idx=idx):
            return np.imag((np.asarray(B(lp), dtype=complex)[idx] - Blam[idx])
                           / (lp - lam))

        pr, _ = quad(comp_re, B.a, B.b, points=[lam], limit=400)
        pi_, _ = quad(comp_im, B.a, B.b, points=[lam], limit=400)
        out[idx] = pr + 1j * pi_
    out += Blam * np.log((B.b - lam) / (lam - B.a))
    out += 1j * np.pi * s * Blam
    return out


def cauchy_eps_route(B: HoelderFunction, lam: float, side: int,
                     eps0: float = None) -> complex:
    """C(lam + side*i*eps) for a geometric eps schedule, extrapolated to 0.

    Independent of the Plemelj split; used for cross-validation.
    """
    s = 1 if side >= 0 else -1
    if eps0 is None:
        eps0 = (B.b - B.a) / 100.0
    es = np.array([eps0, eps0 / 2, eps0 / 4, eps0 / 8])

    def value_at(e):
        z = lam + 1j * s * e

        def f_re(lp):
            return np.real(B(lp) / (lp - z))

        def f_im(lp):
            return np.imag(B(lp) / (lp - z))

        vr, _ = quad(f_re, B.a, B.b, points=[lam], limit=800)
        vi, _ = quad(f_im, B.a, B.b, points=[lam], limit=800)
        return vr + 1j * vi

    vals = np.array([value_at(e) for e in es])
    return complex(np.polyfit(es, vals, 3)[-1])


def cauchy_bound_check(B: HoelderFunction, n_mesh: int = 41):
    """(lhs, c): the Hoelder norm of C(.+i0) on the inner interval vs the
    input constant c; lhs/c across an ensemble estimates k_theta."""
    a_in, b_in = B.inner_interval
    lams = np.linspace(a_in, b_in, n_mesh)
    vals = [np.asarray(cauchy_boundary(B, l, +1)) for l in lams]
    sup = max(_norm_of(v) for v in vals)
    semi = 0.0
    width = B.b - B.a
    for i in range(n_mesh):
        for j in range(i + 1, n_mesh):
            dl = lams[j] - lams[i]
            semi = max(semi, (width / dl) ** B.theta
                       * _norm_of(vals[j] - vals[i]))
    return float(sup + semi), B.c


# -- singular kernel norms ---------------------------------------------------


_KINDS = ("K1_plus", "K1_minus", "K2")


def _log_kernel(kind: str, gamma: float, z: np.ndarray) -> np.ndarray:
    """The convolution kernel in the x = log(lambda) picture.

    K2 -> e^{gamma z} / (2 cosh(z/2)); K1 -> e^{gamma z} / (2 sinh(z/2))
    with the singular 1/z part handled by the caller.
    """
    if kind == "K2":
        return np.exp(gamma * z) / (2.0 * np.cosh(z / 2.0))
    # K1 smooth part: subtract e^{-z^2}/z whose p.v. transform is known
    out = np.empty_like(z)
    nz = z != 0
    out[nz] = (np.exp(gamma * z[nz]) / (2.0 * np.sinh(z[nz] / 2.0))
               - np.exp(-z[nz] ** 2) / z[nz])
    out[~nz] = gamma
    return out


@dataclass
class KernelNorm:
    gamma: float
    kind: str
    window: float
    resolution: int
    value: float
    tail_mass: float


def kernel_operator_norm(gamma: float, kind: str, window: float = None,
                         resolution: int = None,
                         strict_tails: bool = True) -> KernelNorm:
    """Norm of the (lambda/mu)^gamma kernel operator on L^2(R_+).

    Computed as the sup of the Fourier transform of the log-picture
    convolution kernel; finite for 0 <= gamma < 1/2, divergent with the
    window for gamma >= 1/2 (set strict_tails=False to observe that).
    """
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}")
    if gamma < 0 or gamma >= 1:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    if window is None:
        window = max(60.0, 25.0 / max(0.5 - gamma, 0.02))
    if resolution is None:
        resolution = int(2 ** np.ceil(np.log2(window / 0.02)))

    z = -window + (2.0 * window / resolution) * np.arange(resolution)
    dz = z[1] - z[0]
    with np.errstate(over="ignore", invalid="ignore"):
        g = _log_kernel(kind, gamma, z)
        tail = float(max(abs(g[0]), abs(g[-1]))
                     / max(np.max(np.abs(g)), 1e-300))
    if strict_tails and not (tail <= 1e-8):
        raise ArithmeticError(
            f"kernel tails not decayed at the window edge (relative mass "
            f"{tail:.2e}); gamma={gamma} too close to or above 1/2")

    xi = 2.0 * np.pi * np.fft.fftfreq(resolution, d=dz)
    ft = dz * np.exp(1j * xi * window) * np.fft.fft(g)
    if kind == "K2":
        m = ft
    else:
        s = 1.0 if kind == "K1_plus" else -1.0
        m = ft - 1j * np.pi * erf(xi / 2.0) - 1j * np.pi * s
    return KernelNorm(gamma=float(gamma), kind=kind, window=float(window),
                      resolution=int(resolution),
                      value=float(np.max(np.abs(m))), tail_mass=tail)


def kernel_divergence_scan(gamma: float, kind: str = "K2", windows=(20.0, 40.0, 80.0)):
    """Norm vs window size; grows without bound when gamma >= 1/2."""
    return [(w, kernel_operator_norm(gamma, kind, window=w,
                                     strict_tails=False).value)
            for w in windows]


def kernel_matrix_lower_bound(gamma: float, kind: str = "K2",
                              window: float = 30.0, n: int = 1500) -> float:
    """Largest singular value of the directly discretized kernel on a
    log-spaced grid; converges to the multiplier norm from below."""
    if kind != "K2":
        raise ValueError("matrix cross-check implemented for K2 only")
    x = np.linspace(-window, window, n)
    dx = x[1] - x[0]
    M = _log_kernel("K2", gamma, x[:, None] - x[None, :]) * dx
    return float(np.linalg.norm(M, 2))
