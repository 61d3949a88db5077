"""Exact integer and rational lattice linear algebra.

Matrices are tuples of row tuples. Kernels are saturated (computed through a
Smith decomposition with unimodular transforms), lattices are canonicalized by
row Hermite normal form over a common denominator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .errors import InternalCheckError, ValidationError

IntMatrix = tuple[tuple[int, ...], ...]


def mat_from(rows: Sequence[Sequence[int]]) -> IntMatrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m: IntMatrix) -> IntMatrix:
    return tuple(zip(*m)) if m else ()


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    bt = transpose(b)
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_vec(a: IntMatrix, v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def vec_mat(v: Sequence[int], a: IntMatrix) -> tuple[int, ...]:
    n = len(a[0])
    return tuple(sum(v[i] * a[i][j] for i in range(len(a))) for j in range(n))


def mat_pow(a: IntMatrix, k: int) -> IntMatrix:
    n = len(a)
    out = identity(n)
    base = a
    while k:
        if k & 1:
            out = mat_mul(out, base)
        base = mat_mul(base, base)
        k >>= 1
    return out


def smith_with_transform(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """(U, D, V) with U·m·V = D diagonal, U and V unimodular, diagonal
    entries nonnegative with each dividing the next."""
    rows, cols = len(m), len(m[0]) if m else 0
    a = [list(r) for r in m]
    u = [list(r) for r in identity(rows)]
    v = [list(r) for r in identity(cols)]

    def row_op(i, j, q):  # row i -= q * row j
        for k in range(cols):
            a[i][k] -= q * a[j][k]
        for k in range(rows):
            u[i][k] -= q * u[j][k]

    def col_op(i, j, q):  # col i -= q * col j
        for k in range(rows):
            a[k][i] -= q * a[k][j]
        for k in range(cols):
            v[k][i] -= q * v[k][j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for k in range(rows):
            a[k][i], a[k][j] = a[k][j], a[k][i]
        for k in range(cols):
            v[k][i], v[k][j] = v[k][j], v[k][i]

    t = 0
    while t < min(rows, cols):
        piv = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] != 0 and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            for i in range(t + 1, rows):
                if a[i][t] != 0:
                    row_op(i, t, a[i][t] // a[t][t])
                    if a[i][t] != 0:
                        swap_rows(t, i)
            for j in range(t + 1, cols):
                if a[t][j] != 0:
                    col_op(j, t, a[t][j] // a[t][t])
                    if a[t][j] != 0:
                        swap_cols(t, j)
            if all(a[i][t] == 0 for i in range(t + 1, rows)) and all(
                a[t][j] == 0 for j in range(t + 1, cols)
            ):
                break
        t += 1
    rank = t
    # enforce the divisibility chain d_i | d_{i+1}
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            x, y = a[i][i], a[i + 1][i + 1]
            if x != 0 and y % x != 0:
                # pull column i+1 into column i, then re-diagonalize 2x2 block
                for k in range(rows):
                    a[k][i] += a[k][i + 1]
                for k in range(cols):
                    v[k][i] += v[k][i + 1]
                _rediagonalize_pair(a, u, v, i, rows, cols)
                changed = True
    for i in range(rank):
        if a[i][i] < 0:
            for k in range(cols):
                a[i][k] = -a[i][k]
            for k in range(rows):
                u[i][k] = -u[i][k]
    return mat_from(u), mat_from(a), mat_from(v)


def _rediagonalize_pair(a, u, v, i, rows, cols):
    """Restore diagonal form on rows/cols i, i+1 by Euclidean steps."""
    while True:
        if a[i + 1][i] != 0:
            if a[i][i] == 0 or abs(a[i + 1][i]) < abs(a[i][i]):
                a[i], a[i + 1] = a[i + 1], a[i]
                u[i], u[i + 1] = u[i + 1], u[i]
            if a[i + 1][i] != 0 and a[i][i] != 0:
                q = a[i + 1][i] // a[i][i]
                for k in range(cols):
                    a[i + 1][k] -= q * a[i][k]
                for k in range(rows):
                    u[i + 1][k] -= q * u[i][k]
            if a[i + 1][i] != 0:
                continue
        if a[i][i + 1] != 0 and a[i][i] != 0:
            q = a[i][i + 1] // a[i][i]
            for k in range(rows):
                a[k][i + 1] -= q * a[k][i]
            for k in range(cols):
                v[k][i + 1] -= q * v[k][i]
            continue
        break


def smith_diagonal(m: IntMatrix) -> list[int]:
    _u, d, _v = smith_with_transform(m)
    n = min(len(d), len(d[0]) if d else 0)
    return [abs(d[i][i]) for i in range(n)]


def invariant_factors(m: IntMatrix) -> list[int]:
    return [x for x in smith_diagonal(m) if x != 0]


def right_kernel_basis(m: IntMatrix) -> list[tuple[int, ...]]:
    """Basis of the saturated lattice {v integer : m·v = 0}."""
    if not m:
        return []
    _u, d, v = smith_with_transform(m)
    cols = len(m[0])
    rank_limit = min(len(d), cols)
    zero_cols = [j for j in range(cols) if j >= rank_limit or d[j][j] == 0]
    basis = []
    for j in zero_cols:
        basis.append(tuple(v[i][j] for i in range(cols)))
    for b in basis:
        if any(x != 0 for x in mat_vec(m, b)):
            raise InternalCheckError("kernel basis vector not in kernel")
    return basis


def eventual_kernel(n_mat: IntMatrix) -> tuple[list[tuple[int, ...]], int]:
    """Saturated basis of ker(N^k) once stabilized, with the power at which
    stabilization happened (bounded by the dimension)."""
    d = len(n_mat)
    power = n_mat
    prev_rank = -1
    for k in range(1, d + 1):
        basis = right_kernel_basis(power)
        if len(basis) == prev_rank:
            return basis, k - 1
        prev_rank = len(basis)
        power = mat_mul(power, n_mat)
    basis = right_kernel_basis(power)
    if len(basis) != prev_rank:
        raise InternalCheckError("kernel failed to stabilize within dimension bound")
    return basis, d


def hnf_rows(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Canonical basis (unique HNF, pivots positive, entries above pivots
    reduced) of the row lattice spanned by the given integer rows."""
    work = [list(r) for r in rows if any(x != 0 for x in r)]
    if not work:
        return ()
    cols = len(work[0])
    out: list[list[int]] = []
    col = 0
    while col < cols and work:
        live = [r for r in work if r[col] != 0]
        if not live:
            col += 1
            continue
        while True:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            done = True
            for r in live[1:]:
                q = r[col] // piv[col]
                for k in range(cols):
                    r[k] -= q * piv[k]
                if r[col] != 0:
                    done = False
            live = [piv] + [r for r in live[1:] if r[col] != 0]
            if done or len(live) == 1:
                break
        if piv[col] < 0:
            for k in range(cols):
                piv[k] = -piv[k]
        out.append(piv)
        work = [r for r in work if r is not piv and any(x != 0 for x in r)]
        col += 1
    # reduce entries above pivots
    for i in range(len(out) - 1, -1, -1):
        pcol = next(k for k in range(cols) if out[i][k] != 0)
        for j in range(i):
            q = out[j][pcol] // out[i][pcol]
            if q:
                for k in range(cols):
                    out[j][k] -= q * out[i][k]
    return mat_from(out)


@dataclass(frozen=True)
class Lattice:
    """A finitely generated subgroup of Q^n: rows/den in canonical HNF."""

    den: int
    rows: IntMatrix
    n: int

    @classmethod
    def from_fraction_rows(cls, rows: Sequence[Sequence[Fraction]], n: int) -> "Lattice":
        if not rows:
            return cls(1, (), n)
        den = 1
        for r in rows:
            for x in r:
                den = den * x.denominator // gcd(den, x.denominator)
        int_rows = [[int(x * den) for x in r] for r in rows]
        return cls(den, hnf_rows(int_rows), n)._normalized()

    def _normalized(self) -> "Lattice":
        if not self.rows:
            return Lattice(1, (), self.n)
        g = self.den
        for r in self.rows:
            for x in r:
                g = gcd(g, abs(x))
                if g == 1:
                    break
        if g > 1:
            rows = tuple(tuple(x // g for x in r) for r in self.rows)
            return Lattice(self.den // g, hnf_rows(rows), self.n)
        return self

    @property
    def rank(self) -> int:
        return len(self.rows)

    def contains(self, vec: Sequence[Fraction]) -> bool:
        target = [Fraction(x) * self.den for x in vec]
        if any(t.denominator != 1 for t in target):
            return False
        t = [int(x) for x in target]
        # triangular solve against HNF rows
        coeffs = []
        cols = self.n
        rows = [list(r) for r in self.rows]
        pivots = [next(k for k in range(cols) if r[k] != 0) for r in rows]
        for r, p in zip(rows, pivots):
            if t[p] % r[p] != 0:
                return False
            c = t[p] // r[p]
            for k in range(cols):
                t[k] -= c * r[k]
        return all(x == 0 for x in t)

    def sum(self, other: "Lattice") -> "Lattice":
        if self.n != other.n:
            raise ValidationError("lattice dimension mismatch")
        den = self.den * other.den // gcd(self.den, other.den)
        rows = [
            [x * (den // self.den) for x in r] for r in self.rows
        ] + [[x * (den // other.den) for x in r] for r in other.rows]
        return Lattice(den, hnf_rows(rows), self.n)._normalized()

    def dual(self) -> "Lattice":
        """{y : x·y in Z for all x in L}; requires full rank."""
        if self.rank != self.n:
            raise ValidationError("dual implemented for full-rank lattices only")
        inv = _invert_rational(self.rows)
        # dual basis rows: den * (R^{-1})^T
        frows = [
            [Fraction(self.den) * inv[j][i] for j in range(self.n)]
            for i in range(self.n)
        ]
        return Lattice.from_fraction_rows(frows, self.n)

    def intersect(self, other: "Lattice") -> "Lattice":
        return self.dual().sum(other.dual()).dual()

    def scale(self, q: Fraction) -> "Lattice":
        frows = [[Fraction(x, self.den) * q for x in r] for r in self.rows]
        return Lattice.from_fraction_rows(frows, self.n)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.n == other.n and self.den == other.den and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.den, self.rows, self.n))


def _invert_rational(rows: IntMatrix) -> list[list[Fraction]]:
    n = len(rows)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ValidationError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]
