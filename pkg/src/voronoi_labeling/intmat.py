"""Exact integer matrix arithmetic on nested lists / object arrays of Python ints."""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def as_int_rows(a) -> list[list[int]]:
    rows = [[int(x) for x in row] for row in np.asarray(a, dtype=object)]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValueError("expected a non-empty square matrix")
    return rows


def det(a) -> int:
    """Determinant by Bareiss fraction-free elimination."""
    m = as_int_rows(a)
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def adjugate(a) -> list[list[int]]:
    """Adjugate matrix, ``adj(A) A = det(A) I``, computed exactly."""
    m = [[Fraction(x) for x in row] for row in as_int_rows(a)]
    n = len(m)
    d = det(a)
    if d == 0:
        # rank-deficient; fall back to cofactors
        return [[(-1) ** (i + j) * det(_minor(a, j, i)) if n > 1 else 1 for j in range(n)] for i in range(n)]
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next(i for i in range(col, n) if aug[i][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    inv = [row[n:] for row in aug]
    out = [[x * d for x in row] for row in inv]
    assert all(x.denominator == 1 for row in out for x in row)
    return [[int(x) for x in row] for row in out]


def _minor(a, i, j):
    rows = as_int_rows(a)
    return [r[:j] + r[j + 1 :] for k, r in enumerate(rows) if k != i]


def inverse_unimodular(a) -> list[list[int]]:
    """Exact inverse of an integer matrix with determinant +-1."""
    d = det(a)
    if d not in (1, -1):
        raise ValueError(f"matrix is not unimodular (det = {d})")
    return [[d * x for x in row] for row in adjugate(a)]


def inverse_mod(a, r: int) -> np.ndarray:
    """Inverse modulo r via the adjugate; det(a) must be a unit mod r."""
    d = det(a) % r
    try:
        d_inv = pow(d, -1, r)
    except ValueError:
        raise ValueError(f"matrix is not invertible modulo {r}") from None
    adj = adjugate(a)
    return np.array([[(d_inv * x) % r for x in row] for row in adj], dtype=np.int64)


def matmul(a, b) -> list[list[int]]:
    a, b = as_int_rows(a), as_int_rows(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]
