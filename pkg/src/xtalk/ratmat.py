"""Exact rational scalars and small dense matrices addressed by coordinate label.

Scalars are :class:`fractions.Fraction`. Matrices are immutable and carry an
ordered tuple of unique labels; public lookups go through labels, positions
are an implementation detail.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

_DECIMAL_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


class RationalError(ValueError):
    pass


class SingularMatrixError(ArithmeticError):
    pass


def rational_from_decimal(text: str) -> Fraction:
    """Parse a decimal literal such as ``"0.1"`` or ``"1.25e1"`` exactly."""
    s = text.strip()
    if not _DECIMAL_RE.fullmatch(s):
        raise RationalError(f"malformed decimal literal: {text!r}")
    return Fraction(s)


def as_rational(value: Fraction | int | str) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return rational_from_decimal(value)
    raise TypeError(f"expected an exact value, got {type(value).__name__}")


def _bareiss_inverse(a: list[list[int]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free Gauss-Jordan on ``[a | I]``.

    Returns the right-hand block and the per-row divisors so that
    ``inv[i][j] == block[i][j] / div[i]``. Every division below is exact.
    """
    n = len(a)
    m = [row[:] + [int(i == j) for j in range(n)] for i, row in enumerate(a)]
    width = 2 * n
    prev = 1
    for k in range(n):
        p = next((r for r in range(k, n) if m[r][k] != 0), None)
        if p is None:
            raise SingularMatrixError("matrix is singular")
        if p != k:
            m[k], m[p] = m[p], m[k]
        pivot_row = m[k]
        pivot = pivot_row[k]
        for i in range(n):
            if i == k:
                continue
            row = m[i]
            f = row[k]
            for j in range(width):
                row[j] = (pivot * row[j] - f * pivot_row[j]) // prev
        prev = pivot
    return [row[n:] for row in m], [m[i][i] for i in range(n)]


class Matrix:
    """Immutable square matrix of Fractions with labelled coordinates."""

    __slots__ = ("_labels", "_rows", "_index")

    def __init__(self, rows: Sequence[Sequence[Fraction | int]], labels: Sequence[str] | None = None):
        n = len(rows)
        if n == 0:
            raise ValueError("matrix dimension must be positive")
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        if labels is None:
            labels = [str(i) for i in range(n)]
        labels = tuple(labels)
        if len(labels) != n:
            raise ValueError(f"expected {n} labels, got {len(labels)}")
        if len(set(labels)) != n:
            raise ValueError(f"labels are not unique: {labels}")
        self._labels = labels
        self._rows = tuple(tuple(as_rational(x) for x in r) for r in rows)
        self._index = {lab: i for i, lab in enumerate(labels)}

    @classmethod
    def identity(cls, n: int, labels: Sequence[str] | None = None) -> Matrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], labels)

    @classmethod
    def diagonal(cls, values: Sequence[Fraction | int], labels: Sequence[str] | None = None) -> Matrix:
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], labels)

    @property
    def dim(self) -> int:
        return len(self._labels)

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown label {label!r}; have {list(self._labels)}") from None

    def __getitem__(self, key: tuple[str, str]) -> Fraction:
        r, c = key
        return self._rows[self.index(r)][self.index(c)]

    def row(self, label: str) -> dict[str, Fraction]:
        return dict(zip(self._labels, self._rows[self.index(label)]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self._labels == other._labels and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._labels, self._rows))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"Matrix([{body}], labels={list(self._labels)})"

    def relabel(self, labels: Sequence[str]) -> Matrix:
        return Matrix(self._rows, labels)

    def transpose(self) -> Matrix:
        n = self.dim
        return Matrix([[self._rows[j][i] for j in range(n)] for i in range(n)], self._labels)

    def is_symmetric(self) -> bool:
        n = self.dim
        return all(self._rows[i][j] == self._rows[j][i] for i in range(n) for j in range(i + 1, n))

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        cols = list(zip(*other._rows))
        rows = [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self._rows]
        return Matrix(rows, self._labels)

    def __add__(self, other: Matrix) -> Matrix:
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)], self._labels)

    def __sub__(self, other: Matrix) -> Matrix:
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)], self._labels)

    def scale(self, factor: Fraction | int) -> Matrix:
        f = as_rational(factor)
        return Matrix([[f * x for x in r] for r in self._rows], self._labels)

    def permute(self, order: Sequence[str]) -> Matrix:
        """Reorder coordinates to ``order`` (a permutation of the labels)."""
        if sorted(order) != sorted(self._labels):
            raise ValueError("order must be a permutation of the labels")
        idx = [self.index(lab) for lab in order]
        return Matrix([[self._rows[i][j] for j in idx] for i in idx], order)

    def to_dict(self) -> dict[tuple[str, str], Fraction]:
        return {(a, b): self._rows[i][j] for i, a in enumerate(self._labels) for j, b in enumerate(self._labels)}


def determinant(m: Matrix) -> Fraction:
    scale = math.lcm(*(x.denominator for r in m.rows for x in r))
    a = [[int(x * scale) for x in r] for r in m.rows]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        p = next((r for r in range(k, n) if a[r][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return Fraction(sign * a[n - 1][n - 1], scale**n)


def invert(m: Matrix) -> Matrix:
    """Exact inverse via fraction-free elimination on the denominator-cleared matrix."""
    scale = math.lcm(*(x.denominator for r in m.rows for x in r))
    a = [[int(x * scale) for x in r] for r in m.rows]
    block, div = _bareiss_inverse(a)
    rows = [[Fraction(v * scale, div[i]) for v in block[i]] for i in range(m.dim)]
    return Matrix(rows, m.labels)


def submatrix(m: Matrix, keep: Iterable[str]) -> Matrix:
    """Restrict to the labels in ``keep``, preserving the matrix's own label order."""
    keep = set(keep)
    unknown = keep - set(m.labels)
    if unknown:
        raise KeyError(f"unknown labels: {sorted(unknown)}")
    if not keep:
        raise ValueError("cannot keep an empty label set")
    idx = [i for i, lab in enumerate(m.labels) if lab in keep]
    return Matrix([[m.rows[i][j] for j in idx] for i in idx], [m.labels[i] for i in idx])


def block(m: Matrix, row_labels: Sequence[str], col_labels: Sequence[str]) -> list[list[Fraction]]:
    """Rectangular block as nested lists (not necessarily square, so no Matrix)."""
    ri = [m.index(x) for x in row_labels]
    ci = [m.index(x) for x in col_labels]
    return [[m.rows[i][j] for j in ci] for i in ri]


def congruence(m: Matrix, s: Matrix, labels: Sequence[str] | None = None) -> Matrix:
    """Return ``S^-T · m · S^-1``, i.e. ``m`` expressed in the coordinates ``S · x``.

    For the symmetric ``S`` used throughout this package this is ``S^-1 m S^-1``.
    The result takes ``labels`` (default: the labels of ``s``).
    """
    if m.dim != s.dim:
        raise ValueError(f"dimension mismatch: {m.dim} vs {s.dim}")
    s_inv = invert(s)
    plain = [str(i) for i in range(m.dim)]
    m0 = m.relabel(plain)
    si = s_inv.relabel(plain)
    out = si.transpose() @ m0 @ si
    return out.relabel(labels if labels is not None else s.labels)


def fmt_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    """Inverse of :func:`fmt_rational`."""
    return Fraction(text)


def decimal_str(x: Fraction, digits: int = 12) -> str:
    from decimal import Decimal, localcontext

    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(x.numerator) / Decimal(x.denominator)
    return format(d, f".{digits}g")

