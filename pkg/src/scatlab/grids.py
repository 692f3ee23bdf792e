"""Periodic spatial grids and their discrete Fourier duals."""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L/2, L/2) with n points.

    ``x`` is ascending; ``k`` holds the dual wavenumbers (2*pi/L)*m for
    m in {-n/2, ..., n/2-1}, stored in FFT order so that a multiplier
    acts as ifft(symbol(k) * fft(psi)).
    """

    n: int
    L: float
    h: float = field(init=False)
    x: np.ndarray = field(init=False)
    k: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "h", self.L / self.n)
        x = -self.L / 2 + self.h * np.arange(self.n)
        k = 2 * np.pi * np.fft.fftfreq(self.n, d=self.h)
        x.setflags(write=False)
        k.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "k", k)

    @property
    def k_sorted(self) -> np.ndarray:
        return np.sort(self.k)

    @property
    def kmax(self) -> float:
        """Nyquist wavenumber pi*n/L (in absolute value)."""
        return np.pi * self.n / self.L


def make_grid(n: int, L: float) -> Grid:
    """Build an n-point periodic grid on a box of length L.

    n must be even (so the wavenumber set is symmetric up to the single
    Nyquist mode) and at least 4.
    """
    if n % 2 != 0 or n < 4:
        raise ValueError(f"grid size must be even and >= 4, got {n}")
    if not L > 0:
        raise ValueError(f"box length must be positive, got {L}")
    return Grid(n=n, L=float(L))


def weight_values(grid: Grid, alpha: float) -> np.ndarray:
    """Samples of <x>^(-alpha) = (1+x^2)^(-alpha/2) on the grid."""
    if alpha < 0 or not np.isfinite(alpha):
        raise ValueError(f"weight exponent must be finite and >= 0, got {alpha}")
    return (1.0 + grid.x**2) ** (-alpha / 2)
