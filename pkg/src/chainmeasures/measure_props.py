"""Membership tests for invariant / reversible / conservative measures and the
Dirichlet-form machinery built on top of them.

Every "for all bounded f, g" condition is checked on the indicator basis
``{1_y}``; by linearity this is equivalent on a finite state space.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.sparse.csgraph import connected_components

from .backend import Backend, format_scalar
from .chain_core import (JointDistribution, MarkovKernel, apply_T, as_measure,
                         as_observable, joint_distribution, row_sums)
from .errors import (BaseMeasureNotInG, DimensionMismatch, InvalidMeasure,
                     NegativeDensity, ZeroTotalMass)


@dataclass(frozen=True)
class Verdict:
    """A predicate outcome together with its max-norm violation."""

    holds: bool
    residual: object

    def __bool__(self):
        return self.holds


def _atoms(k: MarkovKernel, m: np.ndarray) -> list[int]:
    # "m-a.s." on a finite space: every state the measure charges
    return [x for x in range(k.n) if k.backend.positive(m[x])]


def is_invariant(k: MarkovKernel, m) -> Verdict:
    m = as_measure(k, m)
    b = k.backend
    pushed = [sum((m[x] * k.p[x, y] for x in range(k.n)), b.zero()) for y in range(k.n)]
    residual = b.max_abs([pushed[y] - m[y] for y in range(k.n)])
    return Verdict(b.within(residual), residual)


def is_reversible(k: MarkovKernel, m) -> Verdict:
    m = as_measure(k, m)
    b = k.backend
    residual = b.max_abs([m[x] * k.p[x, y] - m[y] * k.p[y, x]
                          for x in range(k.n) for y in range(x + 1, k.n)])
    return Verdict(b.within(residual), residual)


def is_conservative_measure(k: MarkovKernel, m) -> Verdict:
    """``(T1)(x) = 1`` wherever ``m`` has an atom.

    The residual is the largest row deficit ``|1 - (T1)(x)|`` over atoms,
    unweighted by ``m(x)`` so that a tiny atom on a leaky state still shows.
    """
    m = as_measure(k, m)
    b = k.backend
    sums = row_sums(k)
    residual = b.max_abs([1 - sums[x] for x in _atoms(k, m)])
    return Verdict(b.within(residual), residual)


@dataclass(frozen=True)
class MeasureClassReport:
    invariant: bool
    reversible: bool
    conservative_measure: bool
    residuals: dict

    @property
    def in_G(self) -> bool:
        return self.reversible and self.conservative_measure

    def to_dict(self) -> dict:
        return {
            "invariant": self.invariant,
            "reversible": self.reversible,
            "conservative_measure": self.conservative_measure,
            "in_G": self.in_G,
            "residuals": {name: format_scalar(v) for name, v in self.residuals.items()},
        }


def classify(k: MarkovKernel, m) -> MeasureClassReport:
    inv = is_invariant(k, m)
    rev = is_reversible(k, m)
    cons = is_conservative_measure(k, m)
    return MeasureClassReport(
        invariant=inv.holds,
        reversible=rev.holds,
        conservative_measure=cons.holds,
        residuals={"invariant": inv.residual, "reversible": rev.residual,
                   "conservative_measure": cons.residual},
    )


def in_G(k: MarkovKernel, m) -> bool:
    return classify(k, m).in_G


def dirichlet_form(k: MarkovKernel, m, f):
    """``sum_x ((1 - T) f)(x) f(x) m(x)`` with ``(1 - T) f = f * T1 - Tf``."""
    m = as_measure(k, m)
    f = as_observable(k, f)
    t1 = row_sums(k)
    tf = apply_T(k, f)
    return sum(((f[x] * t1[x] - tf[x]) * f[x] * m[x] for x in range(k.n)), k.backend.zero())


def quadratic_form_rhs(sigma: JointDistribution, f):
    """Half the sigma-average of ``|f(x0) - f(x1)|**2``."""
    b = sigma.backend
    f = np.asarray(f, dtype=object)
    if f.shape != (sigma.n,):
        raise DimensionMismatch(f"observable must have length {sigma.n}, got shape {f.shape}")
    f = b.convert(f)
    half = Fraction(1, 2) if b.exact else 0.5
    total = sum(((f[x] - f[y]) ** 2 * sigma.sigma[x, y]
                 for x in range(sigma.n) for y in range(sigma.n)), b.zero())
    return half * total


@dataclass(frozen=True)
class Lemma8Result:
    """The four conditions evaluated separately.

    ``hypothesis_holds`` is False when the base measure is not conservative
    reversible; the conditions then need not agree.
    """

    a: bool
    b: bool
    c: bool
    d: bool
    hypothesis_holds: bool

    def as_tuple(self) -> tuple[bool, bool, bool, bool]:
        return (self.a, self.b, self.c, self.d)

    @property
    def all_equal(self) -> bool:
        return len(set(self.as_tuple())) == 1


def lemma8_conditions(k: MarkovKernel, m, f) -> Lemma8Result:
    m = as_measure(k, m)
    f = as_observable(k, f)
    be = k.backend
    hypothesis = in_G(k, m)
    if not hypothesis:
        warnings.warn("base measure is not conservative reversible; "
                      "the four conditions need not agree", stacklevel=2)
    atoms = _atoms(k, m)

    # (a) T(g f) = (Tg) f at every atom, for every indicator g
    cond_a = True
    for z in range(k.n):
        g = np.array([be.one() if y == z else be.zero() for y in range(k.n)], dtype=k.p.dtype)
        lhs = apply_T(k, g * f)
        tg = apply_T(k, g)
        if not all(be.eq(lhs[x], tg[x] * f[x]) for x in atoms):
            cond_a = False
            break

    # (b) Tf = f at every atom
    tf = apply_T(k, f)
    cond_b = all(be.eq(tf[x], f[x]) for x in atoms)

    # (c) vanishing quadratic form
    cond_c = be.is_zero(dirichlet_form(k, m, f))

    # (d) f(x0) = f(x1) sigma-a.s.
    sigma = joint_distribution(k, m)
    cond_d = all(be.eq(f[x], f[y]) for x, y in sigma.charged_pairs())

    return Lemma8Result(cond_a, cond_b, cond_c, cond_d, hypothesis)


def density_measure(m, rho, normalize=False, backend: Backend | None = None) -> np.ndarray:
    """The measure ``x -> rho(x) m(x)``.

    With ``normalize=True`` rho is first rescaled so the result has mass one.
    The backend defaults to exact when ``m`` is an object (rational) array.
    """
    m = np.asarray(m)
    if backend is None:
        backend = Backend(exact=m.dtype == object)
    m = backend.convert(m)
    rho = backend.convert(np.asarray(rho, dtype=object))
    if m.shape != rho.shape or m.ndim != 1:
        raise DimensionMismatch(f"measure shape {m.shape} vs density shape {rho.shape}")
    if any(r < 0 for r in rho):
        raise NegativeDensity("density has negative entries")
    out = rho * m
    mass = sum(out, backend.zero())
    if normalize:
        if backend.is_zero(mass):
            raise ZeroTotalMass("density integrates to zero against the measure")
        out = out / mass
    elif not backend.eq(mass, 1):
        raise InvalidMeasure(f"density integrates to {mass}, not 1")
    return out


def _require_G(k: MarkovKernel, m) -> np.ndarray:
    m = as_measure(k, m)
    if not in_G(k, m):
        raise BaseMeasureNotInG("base measure is not conservative reversible")
    return m


class Lemma9Result(NamedTuple):
    in_G: bool
    in_I: bool


class RemarkResult(NamedTuple):
    in_G: bool
    constant_on_sigma: bool


def lemma9_check(k: MarkovKernel, m, rho) -> Lemma9Result:
    """Evaluate ``rho m in G`` and ``rho m in I`` independently."""
    m = _require_G(k, m)
    dm = density_measure(m, rho, backend=k.backend)
    return Lemma9Result(in_G(k, dm), is_invariant(k, dm).holds)


def remark_check(k: MarkovKernel, m, rho) -> RemarkResult:
    """Evaluate ``rho m in G`` and sigma-a.s. constancy of ``rho`` independently."""
    m = _require_G(k, m)
    dm = density_measure(m, rho, backend=k.backend)
    rho = as_observable(k, rho)
    sigma = joint_distribution(k, m)
    constant = all(k.backend.eq(rho[x], rho[y]) for x, y in sigma.charged_pairs())
    return RemarkResult(in_G(k, dm), constant)


def sigma_components(k: MarkovKernel, m) -> list[list[int]]:
    """Connected components of the support of ``m`` under the undirected graph
    joining ``x != y`` whenever ``sigma_m(x, y) > 0``. Sorted by smallest state."""
    m = as_measure(k, m)
    atoms = _atoms(k, m)
    if not atoms:
        return []
    sigma = joint_distribution(k, m)
    index = {x: i for i, x in enumerate(atoms)}
    adj = np.zeros((len(atoms), len(atoms)), dtype=bool)
    for x, y in sigma.charged_pairs():
        if x != y and x in index and y in index:
            adj[index[x], index[y]] = adj[index[y], index[x]] = True
    _, labels = connected_components(adj, directed=False)
    groups: dict[int, list[int]] = {}
    for x, lab in zip(atoms, labels):
        groups.setdefault(int(lab), []).append(x)
    return sorted(groups.values(), key=lambda c: c[0])
