"""Kernels, measures, observables, the transfer operator and two-step joint laws.

States are ``0..n-1``. A kernel's entries are either ``float64`` or exact
``Fraction`` objects (numpy ``object`` arrays); measures and observables
passed to any operation are converted to the kernel's backend.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .backend import DEFAULT_TOL, Backend
from .errors import (DimensionMismatch, InvalidMeasure, NegativeEntry,
                     NonSquare, RowSumExceedsOne)

__all__ = [
    "MarkovKernel", "JointDistribution", "new_kernel", "is_conservative_kernel",
    "apply_T", "joint_distribution", "as_measure", "as_observable",
    "uniform_measure", "row_sums",
]


class MarkovKernel:
    """A validated row-substochastic transition matrix.

    Parameters
    ----------
    matrix : array-like, shape (n, n)
        Transition probabilities. Strings such as ``"0.4"`` or ``"2/5"`` are
        accepted and parsed exactly on the exact backend.
    exact : bool
        Store entries as rationals.
    tol : float
        Float-backend tolerance; also the allowed row-sum excess on both
        backends, so a float kernel promoted exactly stays valid.
    """

    __slots__ = ("p", "backend")

    def __init__(self, matrix, exact=False, tol=DEFAULT_TOL):
        backend = Backend(exact=exact, tol=tol)
        raw = np.asarray(matrix, dtype=object)
        if raw.ndim != 2 or raw.shape[0] != raw.shape[1] or raw.shape[0] == 0:
            raise NonSquare(f"expected a non-empty square matrix, got shape {raw.shape}")
        p = backend.convert(raw)
        n = p.shape[0]
        for x in range(n):
            for y in range(n):
                if p[x, y] < 0:
                    raise NegativeEntry(x, y)
            total = sum(p[x], backend.zero())
            if total > 1 + tol:
                raise RowSumExceedsOne(x, total)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "backend", backend)

    def __setattr__(self, name, value):
        raise AttributeError("MarkovKernel is immutable")

    @property
    def n(self) -> int:
        return self.p.shape[0]

    @property
    def exact(self) -> bool:
        return self.backend.exact

    @property
    def tol(self) -> float:
        return self.backend.tol

    def to_exact(self) -> "MarkovKernel":
        if self.exact:
            return self
        return MarkovKernel(self.p, exact=True, tol=self.tol)

    def to_float(self) -> "MarkovKernel":
        if not self.exact:
            return self
        return MarkovKernel(self.p, exact=False, tol=self.tol)

    def __eq__(self, other):
        if not isinstance(other, MarkovKernel):
            return NotImplemented
        return self.exact == other.exact and np.array_equal(self.p, other.p)

    def __hash__(self):
        return hash((self.exact, tuple(self.p.flat)))

    def __repr__(self):
        return f"MarkovKernel(n={self.n}, backend={self.backend.name})"


def new_kernel(matrix, exact=False, tol=DEFAULT_TOL) -> MarkovKernel:
    return MarkovKernel(matrix, exact=exact, tol=tol)


def row_sums(k: MarkovKernel) -> np.ndarray:
    """``(T1)(x)``, the total one-step mass leaving each state."""
    return np.array([sum(row, k.backend.zero()) for row in k.p], dtype=k.p.dtype)


def is_conservative_kernel(k: MarkovKernel) -> bool:
    return all(k.backend.eq(s, 1) for s in row_sums(k))


def _vector(k: MarkovKernel, values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=object)
    if arr.ndim != 1 or arr.shape[0] != k.n:
        raise DimensionMismatch(f"{what} must have length {k.n}, got shape {arr.shape}")
    return k.backend.convert(arr)


def as_observable(k: MarkovKernel, f) -> np.ndarray:
    """Convert ``f`` to a length-n vector on the kernel's backend."""
    return _vector(k, f, "observable")


def as_measure(k: MarkovKernel, m) -> np.ndarray:
    """Convert and validate a probability vector (nonnegative, total mass one)."""
    w = _vector(k, m, "measure")
    if any(v < 0 for v in w):
        raise InvalidMeasure("measure has negative weights")
    if not k.backend.eq(sum(w, k.backend.zero()), 1):
        raise InvalidMeasure(f"measure sums to {sum(w)}, not 1")
    return w


def uniform_measure(k: MarkovKernel) -> np.ndarray:
    if k.exact:
        return np.array([Fraction(1, k.n)] * k.n, dtype=object)
    return np.full(k.n, 1.0 / k.n)


def apply_T(k: MarkovKernel, f) -> np.ndarray:
    """``(Tf)(x) = sum_y f(y) p(x, y)``."""
    f = as_observable(k, f)
    return np.array([sum((k.p[x, y] * f[y] for y in range(k.n)), k.backend.zero())
                     for x in range(k.n)], dtype=k.p.dtype)


class JointDistribution:
    """Law of ``(x0, x1)`` with ``x0 ~ m`` and ``x1 ~ p(x0, .)``; ``sigma[x, y] = m(x) p(x, y)``."""

    __slots__ = ("sigma", "backend")

    def __init__(self, sigma: np.ndarray, backend: Backend):
        sigma = np.array(sigma, dtype=object if backend.exact else float)
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "backend", backend)

    def __setattr__(self, name, value):
        raise AttributeError("JointDistribution is immutable")

    @property
    def n(self) -> int:
        return self.sigma.shape[0]

    def total_mass(self):
        return sum(self.sigma.flat, self.backend.zero())

    def first_marginal(self) -> np.ndarray:
        return np.array([sum(row, self.backend.zero()) for row in self.sigma], dtype=self.sigma.dtype)

    def second_marginal(self) -> np.ndarray:
        return np.array([sum(col, self.backend.zero()) for col in self.sigma.T], dtype=self.sigma.dtype)

    def asymmetry(self):
        """Max-norm of ``sigma - sigma^T``."""
        return self.backend.max_abs(self.sigma - self.sigma.T)

    def is_symmetric(self) -> bool:
        return self.backend.array_eq(self.sigma, self.sigma.T)

    def charged_pairs(self):
        """Pairs ``(x, y)`` with ``sigma[x, y] > 0``."""
        b = self.backend
        return [(x, y) for x in range(self.n) for y in range(self.n)
                if b.positive(self.sigma[x, y])]


def joint_distribution(k: MarkovKernel, m) -> JointDistribution:
    m = as_measure(k, m)
    sigma = np.array([[m[x] * k.p[x, y] for y in range(k.n)] for x in range(k.n)],
                     dtype=k.p.dtype)
    return JointDistribution(sigma, k.backend)
