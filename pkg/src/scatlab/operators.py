"""Discretized self-adjoint operators on periodic grids.

Operators come in four representations: Fourier multipliers (diagonal in
the discrete Fourier basis), multiplier plus a local potential, dense
Hermitian matrices, and tensor sums (a base operator shifted by each
eigenvalue of a finite companion operator, with multiplicities).
"""

import numpy as np

from .grids import Grid, make_grid

DENSE_CAP = 4096

_HERM_TOL = 1e-12


class LatticeOperator:
    """A self-adjoint operator tied to a Grid (or block-extended from one).

    Immutable after construction; dense matrices and eigendecompositions
    are cached lazily.
    """

    def __init__(self, grid: Grid, kind: str, symbol_values=None, v_values=None,
                 matrix=None, base=None, companion_eigenvalues=None,
                 companion_ranks=None):
        self.grid = grid
        self.kind = kind
        self.symbol_values = symbol_values
        self.v_values = v_values
        self._matrix = matrix
        self.base = base
        self.companion_eigenvalues = companion_eigenvalues
        self.companion_ranks = companion_ranks
        self._eig = None

        if kind == "dense":
            m = matrix
            defect = np.linalg.norm(m - m.conj().T)
            scale = max(np.linalg.norm(m), 1.0)
            if defect > 1e-10 * scale:
                raise ValueError(f"dense operator not Hermitian (defect {defect:.2e})")
        elif kind in ("multiplier", "multiplier_plus_potential"):
            if np.iscomplexobj(symbol_values) or not np.all(np.isfinite(symbol_values)):
                raise ValueError("multiplier symbol must be real and finite on the grid")
            if kind == "multiplier_plus_potential":
                if np.iscomplexobj(v_values):
                    raise ValueError("potential must be real-valued")
                if not np.all(np.isfinite(v_values)):
                    raise ValueError("potential must be finite on the grid")
        elif kind == "tensor_sum":
            if len(companion_eigenvalues) == 0:
                raise ValueError("tensor sum needs at least one companion eigenvalue")
            if np.any(np.diff(companion_eigenvalues) < 0):
                raise ValueError("companion eigenvalues must be sorted ascending")
            if np.any(np.asarray(companion_ranks) < 1):
                raise ValueError("companion ranks must be positive")
        else:
            raise ValueError(f"unknown operator kind {kind!r}")

    # -- structure ---------------------------------------------------------

    @property
    def dim(self) -> int:
        if self.kind == "tensor_sum":
            return self.base.dim * int(np.sum(self.companion_ranks))
        return self.grid.n

    def shifted(self, c: float) -> "LatticeOperator":
        """The operator H + c."""
        if self.kind == "multiplier":
            return LatticeOperator(self.grid, "multiplier",
                                   symbol_values=self.symbol_values + c)
        if self.kind == "multiplier_plus_potential":
            return LatticeOperator(self.grid, "multiplier_plus_potential",
                                   symbol_values=self.symbol_values + c,
                                   v_values=self.v_values)
        if self.kind == "dense":
            return LatticeOperator(self.grid, "dense",
                                   matrix=self._matrix + c * np.eye(self.dim))
        raise ValueError("shift of a tensor sum: shift the base instead")

    def _blocks(self):
        """(shifted base, multiplicity) pairs of a tensor sum."""
        assert self.kind == "tensor_sum"
        return [(self.base.shifted(lam), int(r))
                for lam, r in zip(self.companion_eigenvalues, self.companion_ranks)]

    # -- action ------------------------------------------------------------

    def apply(self, vec: np.ndarray) -> np.ndarray:
        vec = np.asarray(vec)
        if self.kind == "multiplier":
            return np.fft.ifft(self.symbol_values * np.fft.fft(vec))
        if self.kind == "multiplier_plus_potential":
            out = np.fft.ifft(self.symbol_values * np.fft.fft(vec))
            return out + self.v_values * vec
        if self.kind == "dense":
            return self._matrix @ vec
        # tensor sum: vec is a stack of base-sized blocks
        nb = self.base.dim
        out = np.empty_like(vec, dtype=complex)
        i = 0
        for block, rank in self._blocks():
            for _ in range(rank):
                out[i:i + nb] = block.apply(vec[i:i + nb])
                i += nb
        return out

    def matrix(self) -> np.ndarray:
        """Dense Hermitian matrix; capped at dimension 4096."""
        if self._matrix is not None:
            return self._matrix
        if self.dim > DENSE_CAP:
            raise ValueError(f"dense representation capped at {DENSE_CAP}, dim={self.dim}")
        if self.kind in ("multiplier", "multiplier_plus_potential"):
            n = self.grid.n
            m = np.fft.ifft(self.symbol_values[:, None] * np.fft.fft(np.eye(n), axis=0),
                            axis=0)
            if self.kind == "multiplier_plus_potential":
                m = m + np.diag(self.v_values)
            m = 0.5 * (m + m.conj().T)
        else:  # tensor_sum
            blocks = []
            for block, rank in self._blocks():
                blocks.extend([block.matrix()] * rank)
            from scipy.linalg import block_diag
            m = block_diag(*blocks)
        self._matrix = m
        return m

    def eig(self):
        """Eigenvalues (ascending) and unitary eigenvectors of the dense form.

        Multiplier operators are diagonalized exactly in the Fourier basis.
        """
        if self._eig is None:
            if self.kind == "multiplier":
                n = self.grid.n
                # columns are normalized discrete plane waves
                U = np.fft.ifft(np.eye(n), axis=0) * np.sqrt(n)
                order = np.argsort(self.symbol_values, kind="stable")
                self._eig = (self.symbol_values[order].astype(float), U[:, order])
            else:
                w, U = np.linalg.eigh(self.matrix())
                self._eig = (w, U)
        return self._eig

    def eigenvalues(self) -> np.ndarray:
        if self.kind == "multiplier":
            return np.sort(self.symbol_values)
        if self.kind == "tensor_sum":
            vals = []
            for block, rank in self._blocks():
                vals.extend([block.eigenvalues()] * rank)
            return np.sort(np.concatenate(vals))
        return self.eig()[0]

    def hermiticity_defect(self) -> float:
        m = self.matrix()
        return np.linalg.norm(m - m.conj().T, 2)


# -- constructors ----------------------------------------------------------

def multiplier_operator(grid: Grid, symbol) -> LatticeOperator:
    """Operator diagonal in the Fourier basis with eigenvalues symbol(k)."""
    vals = np.asarray(symbol(grid.k))
    if np.iscomplexobj(vals) and np.any(vals.imag != 0):
        raise ValueError("multiplier symbol must be real-valued")
    vals = vals.real.astype(float)
    if not np.all(np.isfinite(vals)):
        bad = grid.k[~np.isfinite(vals)]
        raise ValueError(f"symbol not finite at wavenumbers {bad[:3]}")
    return LatticeOperator(grid, "multiplier", symbol_values=vals)


def add_potential(op: LatticeOperator, v) -> LatticeOperator:
    """H0 + V with V the multiplication by v(x)."""
    if op.kind not in ("multiplier", "multiplier_plus_potential"):
        raise ValueError("add_potential expects a multiplier-kind operator")
    vals = np.asarray(v(op.grid.x))
    if np.iscomplexobj(vals):
        raise ValueError("potential must be real-valued")
    base_v = op.v_values if op.v_values is not None else 0.0
    return LatticeOperator(op.grid, "multiplier_plus_potential",
                           symbol_values=op.symbol_values,
                           v_values=base_v + vals.astype(float))


def dense_operator(grid: Grid, matrix: np.ndarray) -> LatticeOperator:
    return LatticeOperator(grid, "dense", matrix=np.asarray(matrix, dtype=complex))


def tensor_sum(base: LatticeOperator, companion_eigenvalues, ranks) -> LatticeOperator:
    """Block operator base + lambda_j on each of rank_j copies per eigenvalue.

    Realizes H_A (x) 1 + 1 (x) H_B with a finite companion spectrum.
    """
    eigs = np.asarray(companion_eigenvalues, dtype=float)
    ranks = np.asarray(ranks, dtype=int)
    if eigs.shape != ranks.shape:
        raise ValueError("eigenvalues and ranks must have equal length")
    return LatticeOperator(base.grid, "tensor_sum", base=base,
                           companion_eigenvalues=eigs, companion_ranks=ranks)


def laplacian(grid: Grid, ell: float = 2.0) -> LatticeOperator:
    """(-Laplace)^(ell/2): symbol |k|^ell (principal nonnegative branch)."""
    return multiplier_operator(grid, lambda k: np.abs(k) ** ell)


def momentum(grid: Grid) -> LatticeOperator:
    """-i d/dx: symbol k."""
    return multiplier_operator(grid, lambda k: k)


# -- functional calculus ---------------------------------------------------

def apply_function(op: LatticeOperator, h) -> LatticeOperator:
    """h(H) via spectral calculus (exact on the symbol for multipliers)."""
    if op.kind == "multiplier":
        vals = np.asarray(h(op.symbol_values), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ValueError("function not finite on the operator spectrum")
        return LatticeOperator(op.grid, "multiplier", symbol_values=vals)
    if op.kind == "tensor_sum":
        blocks = []
        for block, rank in op._blocks():
            blocks.extend([apply_function(block, h).matrix()] * rank)
        from scipy.linalg import block_diag
        return dense_operator(op.grid, block_diag(*blocks))
    w, U = op.eig()
    hw = np.asarray(h(w), dtype=float)
    if not np.all(np.isfinite(hw)):
        raise ValueError("function not finite on the operator spectrum")
    return dense_operator(op.grid, (U * hw) @ U.conj().T)


def fractional_difference_norm(A: LatticeOperator, B: LatticeOperator,
                               beta: float) -> float:
    """Operator norm of (1+B^2)^(beta/2) - (1+A^2)^(beta/2).

    The interesting content is uniformity of this quantity when the
    spectral radius of A grows while B - A stays bounded.
    """
    if not 0 < beta < 1:
        raise ValueError(f"beta must lie in (0,1), got {beta}")

    def h(t):
        return (1.0 + t**2) ** (beta / 2)

    diff = apply_function(B, h).matrix() - apply_function(A, h).matrix()
    return np.linalg.norm(diff, 2)
