"""Exact Gauss-Jordan elimination over ``Fraction``.

Matrices are lists of rows. Nothing here rounds, so rank and solvability
answers are exact.
"""
from __future__ import annotations

from fractions import Fraction


def rref(rows, ncols=None):
    """Reduced row echelon form.

    Returns ``(reduced_rows, pivot_columns)``. Zero rows are dropped. Only
    the first ``ncols`` columns are eligible as pivots, which lets callers
    reduce an augmented matrix ``[A | b]`` without pivoting on ``b``.
    """
    mat = [[Fraction(v) for v in row] for row in rows]
    if not mat:
        return [], []
    width = len(mat[0])
    if ncols is None:
        ncols = width
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        lead = mat[r][c]
        if lead != 1:
            mat[r] = [v / lead for v in mat[r]]
        prow = mat[r]
        for i in range(len(mat)):
            if i != r:
                factor = mat[i][c]
                if factor != 0:
                    row = mat[i]
                    mat[i] = [a - factor * b for a, b in zip(row, prow)]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    reduced = [row for row in mat if any(v != 0 for v in row)]
    return reduced, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def solve(A, b):
    """Solve ``A x = b`` exactly.

    Returns ``None`` when the system is inconsistent. Raises ``ValueError``
    when the solution is not unique.
    """
    ncols = len(A[0]) if A else 0
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    reduced, pivots = rref(aug, ncols)
    for row in reduced:
        if all(v == 0 for v in row[:ncols]):
            return None
    if len(pivots) != ncols:
        raise ValueError("solution is not unique")
    x = [Fraction(0)] * ncols
    for row, c in zip(reduced, pivots):
        x[c] = row[ncols]
    return x
