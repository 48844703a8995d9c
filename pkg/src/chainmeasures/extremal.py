"""Measure polytopes, communicating classes and extreme points.

Everything here runs on exact rationals: a float kernel is promoted exactly
before any extremality question is asked.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import linalg
from .backend import format_scalar
from .chain_core import MarkovKernel, is_conservative_kernel, row_sums
from .errors import EnumerationCapExceeded, NotAMember
from .measure_props import sigma_components

ENUMERATION_CAP = 12


def _as_fractions(m) -> tuple[Fraction, ...]:
    from .backend import to_fraction
    return tuple(to_fraction(v) for v in m)


def canonical_order(measures) -> list[np.ndarray]:
    """Deduplicate and sort decreasing-lexicographically, so delta_0 comes first."""
    unique = {_as_fractions(m) for m in measures}
    return [np.array(t, dtype=object) for t in sorted(unique, reverse=True)]


@dataclass(frozen=True)
class MeasurePolytope:
    """``{m >= 0 : A m = b}`` where the last equality is the normalization row."""

    n: int
    equalities: tuple  # of (coeffs tuple, const) pairs
    kind: str = ""

    def __post_init__(self):
        ones = (Fraction(1),) * self.n
        norm_rows = [1 for coeffs, const in self.equalities
                     if tuple(coeffs) == ones and const == 1]
        if len(norm_rows) != 1:
            raise ValueError("normalization row must appear exactly once")

    @classmethod
    def from_rows(cls, n, rows, kind=""):
        eqs = [(tuple(Fraction(c) for c in coeffs), Fraction(const)) for coeffs, const in rows]
        eqs.append(((Fraction(1),) * n, Fraction(1)))
        return cls(n, tuple(eqs), kind)

    @property
    def A(self) -> list[list[Fraction]]:
        return [list(coeffs) for coeffs, _ in self.equalities]

    @property
    def b(self) -> list[Fraction]:
        return [const for _, const in self.equalities]

    def contains(self, m) -> bool:
        m = _as_fractions(m)
        if len(m) != self.n or any(v < 0 for v in m):
            return False
        return all(sum(c * v for c, v in zip(coeffs, m)) == const
                   for coeffs, const in self.equalities)

    def binding_rows(self) -> int:
        """Number of equality rows with a nonzero coefficient."""
        return sum(1 for coeffs, _ in self.equalities if any(c != 0 for c in coeffs))

    def vertices(self) -> list[np.ndarray]:
        """All extreme points, canonically ordered.

        Vertices of ``{m >= 0 : A m = b}`` are the positive solutions on supports
        whose columns are independent. Supports are grown depth-first; a
        dependent column set prunes every superset.
        """
        if self.n > ENUMERATION_CAP:
            raise EnumerationCapExceeded(f"n={self.n} exceeds enumeration cap {ENUMERATION_CAP}")
        A, b = self.A, self.b
        free = _presolve_zeros(A, b, self.n)
        if free is None:
            return []
        aug = [[row[j] for j in free] + [rhs] for row, rhs in zip(A, b)]
        reduced, pivots = linalg.rref(aug, len(free))
        if any(all(v == 0 for v in row[:-1]) for row in reduced):
            return []
        R = [row[:-1] for row in reduced]
        rhs = [row[-1] for row in reduced]
        r = len(R)
        found = []

        def extend(support, start):
            for j in range(start, len(free)):
                cand = support + [j]
                cols = [[row[i] for i in cand] for row in R]
                if linalg.rank(cols) < len(cand):
                    continue
                x = linalg.solve(cols, rhs)
                if x is not None and all(v > 0 for v in x):
                    m = [Fraction(0)] * self.n
                    for i, v in zip(cand, x):
                        m[free[i]] = v
                    found.append(m)
                if len(cand) < r:
                    extend(cand, j + 1)

        extend([], 0)
        return canonical_order(found)

    def is_extreme_point(self, m) -> bool:
        """Rank test: columns of ``A`` on ``supp(m)`` are linearly independent."""
        m = _as_fractions(m)
        if not self.contains(m):
            raise NotAMember("measure is not in the polytope")
        support = [x for x in range(self.n) if m[x] > 0]
        cols = [[row[x] for x in support] for row in self.A]
        return linalg.rank(cols) == len(support)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "kind": self.kind,
            "equalities": [{"coeffs": [format_scalar(c) for c in coeffs],
                            "const": format_scalar(const)}
                           for coeffs, const in self.equalities],
        }


def _presolve_zeros(A, b, n):
    """Variables forced to zero by sign-definite homogeneous rows.

    Returns the surviving variable indices, or ``None`` if infeasible.
    """
    alive = set(range(n))
    changed = True
    while changed:
        changed = False
        for row, rhs in zip(A, b):
            nz = [j for j in alive if row[j] != 0]
            if not nz:
                if rhs != 0:
                    return None
                continue
            if rhs == 0 and (all(row[j] > 0 for j in nz) or all(row[j] < 0 for j in nz)):
                alive.difference_update(nz)
                changed = True
    return sorted(alive)


def invariant_polytope(k: MarkovKernel) -> MeasurePolytope:
    p = k.to_exact().p
    n = k.n
    rows = [([p[x, y] - (1 if x == y else 0) for x in range(n)], 0) for y in range(n)]
    return MeasurePolytope.from_rows(n, rows, "I")


def _balance_rows(p, n):
    rows = []
    for x in range(n):
        for y in range(x + 1, n):
            coeffs = [Fraction(0)] * n
            coeffs[x] += p[x, y]
            coeffs[y] -= p[y, x]
            rows.append((coeffs, 0))
    return rows


def reversible_polytope(k: MarkovKernel) -> MeasurePolytope:
    p = k.to_exact().p
    return MeasurePolytope.from_rows(k.n, _balance_rows(p, k.n), "R")


def conservative_reversible_polytope(k: MarkovKernel) -> MeasurePolytope:
    ke = k.to_exact()
    rows = _balance_rows(ke.p, k.n)
    for x, total in enumerate(row_sums(ke)):
        if total != 1:
            coeffs = [Fraction(0)] * k.n
            coeffs[x] = 1 - total
            rows.append((coeffs, 0))
    return MeasurePolytope.from_rows(k.n, rows, "G")


def is_extreme_point(m, polytope: MeasurePolytope) -> bool:
    return polytope.is_extreme_point(m)


@dataclass(frozen=True)
class ClassDecomposition:
    classes: tuple  # of sorted state tuples, ordered by smallest state
    closed: tuple  # bool per class

    def closed_classes(self) -> list[tuple[int, ...]]:
        return [c for c, flag in zip(self.classes, self.closed) if flag]

    def to_dict(self) -> dict:
        return {"classes": [list(c) for c in self.classes], "closed": list(self.closed)}


def class_decomposition(k: MarkovKernel) -> ClassDecomposition:
    """Strongly connected components of ``x -> y`` whenever ``p(x, y) > 0``."""
    adj = np.array([[k.backend.positive(v) for v in row] for row in k.p], dtype=bool)
    _, labels = connected_components(adj, directed=True, connection="strong")
    groups: dict[int, list[int]] = {}
    for x, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(x)
    classes = sorted((tuple(g) for g in groups.values()), key=lambda c: c[0])
    closed = tuple(
        all(k.backend.eq(sum((k.p[x, y] for y in c), k.backend.zero()), 1) for x in c)
        for c in classes
    )
    return ClassDecomposition(tuple(classes), closed)


def stationary_on_class(k: MarkovKernel, states) -> np.ndarray:
    """Unique stationary law of the kernel restricted to a closed class."""
    p = k.to_exact().p
    states = list(states)
    A = [[p[x, y] - (1 if x == y else 0) for x in states] for y in states]
    A.append([Fraction(1)] * len(states))
    b = [Fraction(0)] * len(states) + [Fraction(1)]
    pi = linalg.solve(A, b)
    m = np.array([Fraction(0)] * k.n, dtype=object)
    for x, v in zip(states, pi):
        m[x] = v
    return m


def extreme_invariant_measures(k: MarkovKernel) -> list[np.ndarray]:
    """One stationary measure per closed communicating class.

    Empty when there is no closed class (a strictly leaky kernel has no
    invariant probability measure).
    """
    ke = k.to_exact()
    decomp = class_decomposition(ke)
    return canonical_order(stationary_on_class(ke, c) for c in decomp.closed_classes())


def extreme_reversible_measures(k: MarkovKernel, which: str = "R") -> list[np.ndarray]:
    """Vertices of the reversible (``"R"``) or conservative reversible (``"G"``) polytope."""
    if which == "R":
        poly = reversible_polytope(k)
    elif which == "G":
        poly = conservative_reversible_polytope(k)
    else:
        raise ValueError(f"which must be 'R' or 'G', got {which!r}")
    verts = poly.vertices()
    ke = k.to_exact()
    for v in verts:
        if len(sigma_components(ke, v)) != 1:
            raise RuntimeError(f"vertex {[format_scalar(x) for x in v]} has disconnected support")
    return verts


@dataclass(frozen=True)
class ExtremalReport:
    I_e: list
    R_e: list
    G_e: list
    checked: str  # "R" on conservative kernels, "G" otherwise
    witnesses: list = field(default_factory=list)  # (index in checked set, index in I_e or None)

    @property
    def inclusion_holds(self) -> bool:
        return all(j is not None for _, j in self.witnesses)

    @property
    def vacuous(self) -> bool:
        return not self.witnesses

    def to_dict(self) -> dict:
        def ms(lst):
            return [[format_scalar(v) for v in m] for m in lst]
        return {
            "I_e": ms(self.I_e),
            "R_e": ms(self.R_e),
            "G_e": ms(self.G_e),
            "checked": self.checked,
            "inclusion_holds": self.inclusion_holds,
            "vacuous": self.vacuous,
            "witnesses": [[i, j] for i, j in self.witnesses],
        }


def verify_theorem4(k: MarkovKernel) -> ExtremalReport:
    """Check that every extreme reversible measure is an extreme invariant one.

    On a leaky kernel the checked set is the conservative reversible extremes.
    """
    ke = k.to_exact()
    I_e = extreme_invariant_measures(ke)
    R_e = extreme_reversible_measures(ke, "R")
    G_e = extreme_reversible_measures(ke, "G")
    checked = "R" if is_conservative_kernel(ke) else "G"
    targets = R_e if checked == "R" else G_e
    lookup = {_as_fractions(m): j for j, m in enumerate(I_e)}
    witnesses = [(i, lookup.get(_as_fractions(m))) for i, m in enumerate(targets)]
    return ExtremalReport(I_e, R_e, G_e, checked, witnesses)
