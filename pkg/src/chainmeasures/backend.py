"""Scalar backends: exact rationals or float64 with a relative tolerance."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

DEFAULT_TOL = 1e-9


def to_fraction(value) -> Fraction:
    """Convert a number or a decimal / ``"p/q"`` string to an exact rational.

    Floats are promoted exactly (their binary value), strings are parsed as
    written, so ``"0.1"`` becomes ``1/10`` while ``0.1`` does not.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(float(value))
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def to_float(value) -> float:
    if isinstance(value, str):
        value = Fraction(value.strip())
    out = float(value)
    if not math.isfinite(out):
        raise ValueError(f"non-finite value {value!r}")
    return out


def format_scalar(value) -> str:
    """Render a scalar for JSON output: ``"p/q"`` for rationals, ``repr`` for floats."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


@dataclass(frozen=True)
class Backend:
    exact: bool = False
    tol: float = DEFAULT_TOL

    @property
    def name(self) -> str:
        return "exact" if self.exact else "float"

    def convert(self, values) -> np.ndarray:
        arr = np.asarray(values, dtype=object)
        fn = to_fraction if self.exact else to_float
        out = np.empty(arr.shape, dtype=object if self.exact else float)
        for idx in np.ndindex(arr.shape):
            out[idx] = fn(arr[idx])
        return out

    def zero(self):
        return Fraction(0) if self.exact else 0.0

    def one(self):
        return Fraction(1) if self.exact else 1.0

    def eq(self, a, b) -> bool:
        if self.exact:
            return bool(a == b)
        return bool(abs(a - b) <= self.tol * max(1.0, abs(a), abs(b)))

    def is_zero(self, a) -> bool:
        return self.eq(a, 0)

    def positive(self, a, scale=1.0) -> bool:
        """Strictly positive: ``a > 0`` exactly, or ``a > tol * scale`` on floats."""
        if self.exact:
            return bool(a > 0)
        return bool(a > self.tol * abs(scale))

    def array_eq(self, a: np.ndarray, b: np.ndarray) -> bool:
        return a.shape == b.shape and all(self.eq(x, y) for x, y in zip(a.flat, b.flat))

    def max_abs(self, values) -> object:
        best = self.zero()
        for v in np.asarray(values).flat:
            if abs(v) > best:
                best = abs(v)
        return best

    def within(self, residual) -> bool:
        """Whether a max-norm residual counts as zero."""
        return bool(residual == 0) if self.exact else bool(residual <= self.tol)


EXACT = Backend(exact=True)
