"""Named potential/symbol builtins and CSV-tabulated potentials."""

import csv

import numpy as np


def gaussian(amplitude=1.0, width=1.0, center=0.0):
    """amplitude * exp(-((x-center)/width)^2)."""
    def v(x):
        return amplitude * np.exp(-(((x - center) / width) ** 2))
    return v


def square_barrier(height=1.0, half_width=1.0, center=0.0):
    """height on [center-half_width, center+half_width], 0 outside."""
    def v(x):
        return height * (np.abs(x - center) <= half_width).astype(float)
    return v


def sech2(amplitude=1.0, width=1.0, center=0.0):
    """amplitude / cosh((x-center)/width)^2 (reflectionless-type well for amplitude<0)."""
    def v(x):
        return amplitude / np.cosh((x - center) / width) ** 2
    return v


def zero():
    def v(x):
        return np.zeros_like(np.asarray(x, dtype=float))
    return v


BUILTINS = {
    "gaussian": gaussian,
    "square_barrier": square_barrier,
    "sech2": sech2,
    "zero": zero,
}


def from_csv(path):
    """Potential tabulated in a two-column CSV (x, v), interpolated linearly.

    Outside the tabulated range the potential is extended by zero.
    """
    xs, vs = [], []
    with open(path, newline="") as f:
        for row in csv.reader(f):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                xs.append(float(row[0]))
                vs.append(float(row[1]))
            except ValueError:
                continue  # header row
    if len(xs) < 2:
        raise ValueError(f"potential CSV {path!r} needs at least two numeric rows")
    xs = np.asarray(xs)
    vs = np.asarray(vs)
    order = np.argsort(xs)
    xs, vs = xs[order], vs[order]

    def v(x):
        return np.interp(x, xs, vs, left=0.0, right=0.0)

    return v


def resolve(spec, **params):
    """Turn a builtin name or callable into a potential function."""
    if callable(spec):
        return spec
    if spec in BUILTINS:
        return BUILTINS[spec](**params)
    raise ValueError(f"unknown potential {spec!r}; builtins: {sorted(BUILTINS)}")
