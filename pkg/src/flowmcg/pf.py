"""Growth data of a primitive substitution: dominant eigenvalue, letter and
block frequencies, balance verdicts for the constant function.

All eigenvector arithmetic happens in the number field generated by the
dominant eigenvalue, so every reported frequency is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

from .errors import InternalCheckError, ResourceLimitError, ValidationError
from .numberfield import (
    AlgebraicNumber,
    FieldElement,
    NumberField,
    ascending_from_poly,
    classify_roots_vs_unit_circle,
    factor_charpoly,
    poly_from_ascending,
)
from .substitution import Substitution, incidence_matrix, is_primitive
from .words import Word

IntMatrix = tuple[tuple[int, ...], ...]


def field_kernel(
    field: NumberField, rows: Sequence[Sequence[FieldElement]]
) -> list[tuple[FieldElement, ...]]:
    """Basis of the right kernel of a square matrix over the field.

    Deterministic: pivots are chosen as the first nonzero entry scanning down
    each column, free variables are set to 1 one at a time.
    """
    n = len(rows)
    a = [list(r) for r in rows]
    pivot_of_col: dict[int, int] = {}
    rank = 0
    for col in range(n):
        piv = None
        for r in range(rank, n):
            if not a[r][col].is_zero():
                piv = r
                break
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = field.inv(a[rank][col])
        a[rank] = [x * inv for x in a[rank]]
        for r in range(n):
            if r != rank and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        pivot_of_col[col] = rank
        rank += 1
    free_cols = [c for c in range(n) if c not in pivot_of_col]
    basis = []
    for fc in free_cols:
        vec = [field.zero() for _ in range(n)]
        vec[fc] = field.one()
        for c, r in pivot_of_col.items():
            vec[c] = -a[r][fc]
        basis.append(tuple(vec))
    return basis


@dataclass(frozen=True)
class PFData:
    """Dominant-eigenvalue package of a primitive nonnegative integer matrix.

    ``left`` and ``right`` are eigenvectors normalized to coordinate sum 1;
    ``left_raw_sum`` is the coordinate sum of the un-normalized left vector
    whose free coordinate was pinned to 1.
    """

    matrix: IntMatrix
    lam: AlgebraicNumber
    field: NumberField
    left: tuple[FieldElement, ...]
    right: tuple[FieldElement, ...]
    left_raw_sum: FieldElement
    charpoly_factors: tuple[tuple[tuple[int, ...], int], ...]
    pf_factor: tuple[int, ...]
    labels: tuple[str, ...] | None = None

    @property
    def frequencies(self) -> tuple[FieldElement, ...]:
        return self.left

    def frequency_of(self, letter: int) -> FieldElement:
        return self.left[letter]


def _as_matrix(obj) -> tuple[IntMatrix, tuple[str, ...] | None]:
    if isinstance(obj, Substitution):
        labels = tuple(obj.alphabet)
        return incidence_matrix(obj), labels
    m = tuple(tuple(int(x) for x in row) for row in obj)
    if any(len(r) != len(m) for r in m):
        raise ValidationError("incidence matrix must be square")
    if any(x < 0 for row in m for x in row):
        raise ValidationError("incidence matrix must be nonnegative")
    return m, None


def _matrix_is_primitive(m: IntMatrix) -> bool:
    n = len(m)
    bound = n * n - 2 * n + 2 if n > 1 else 1
    reach = [[bool(x) for x in row] for row in m]
    cur = m
    for _ in range(bound):
        if all(x > 0 for row in cur for x in row):
            return True
        cur = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in zip(*m))
            for row in cur
        )
    return all(x > 0 for row in cur for x in row)


def pf_data(obj) -> PFData:
    """Exact dominant-eigenvalue data for a primitive substitution or matrix."""
    m, labels = _as_matrix(obj)
    if isinstance(obj, Substitution):
        if not is_primitive(obj):
            raise ValidationError("substitution is not primitive")
    elif not _matrix_is_primitive(m):
        raise ValidationError("matrix is not primitive")
    factors = tuple(factor_charpoly(m))
    best: AlgebraicNumber | None = None
    best_factor: tuple[int, ...] | None = None
    best_mult = 0
    for asc, mult in factors:
        for root in AlgebraicNumber.real_roots_of(asc):
            if best is None or _gt(root, best):
                best, best_factor, best_mult = root, tuple(asc), mult
    if best is None or best_factor is None:
        raise InternalCheckError("primitive matrix with no real eigenvalue")
    if best_mult != 1:
        raise InternalCheckError("dominant eigenvalue is not simple")
    if best.compare_fraction(1) < 0:
        raise InternalCheckError("dominant eigenvalue below 1")
    field = NumberField(best)
    lam_el = field.generator()
    n = len(m)

    def eigvec(transposed: bool) -> tuple[tuple[FieldElement, ...], FieldElement]:
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                entry = m[j][i] if transposed else m[i][j]
                el = field.rational(entry)
                if i == j:
                    el = el - lam_el
                row.append(el)
            rows.append(row)
        kernel = field_kernel(field, rows)
        if len(kernel) != 1:
            raise InternalCheckError("dominant eigenspace dimension != 1")
        vec = list(kernel[0])
        signs = {x.sign() for x in vec}
        if signs == {-1}:
            vec = [-x for x in vec]
        elif signs != {1}:
            raise InternalCheckError("dominant eigenvector not strictly positive")
        total = vec[0]
        for x in vec[1:]:
            total = total + x
        return tuple(vec), total

    left_raw, left_sum = eigvec(transposed=True)
    right_raw, right_sum = eigvec(transposed=False)
    left = tuple(x / left_sum for x in left_raw)
    right = tuple(x / right_sum for x in right_raw)
    for j in range(n):
        acc = field.zero()
        for i in range(n):
            acc = acc + left[i] * field.rational(m[i][j])
        if acc != left[j] * lam_el:
            raise InternalCheckError("left eigenvector check failed")
    for i in range(n):
        acc = field.zero()
        for j in range(n):
            acc = acc + field.rational(m[i][j]) * right[j]
        if acc != lam_el * right[i]:
            raise InternalCheckError("right eigenvector check failed")
    return PFData(
        matrix=m,
        lam=best,
        field=field,
        left=left,
        right=right,
        left_raw_sum=left_sum,
        charpoly_factors=factors,
        pf_factor=best_factor,
        labels=labels,
    )


def _gt(a: AlgebraicNumber, b: AlgebraicNumber) -> bool:
    if a.equals(b):
        return False
    eps = Fraction(1, 2)
    while True:
        qa, qb = a.approx(eps), b.approx(eps)
        if qa - qb > 2 * eps:
            return True
        if qb - qa > 2 * eps:
            return False
        eps /= 16


def is_pisot(obj) -> bool:
    """True when the dominant eigenvalue exceeds 1 and every other
    eigenvalue of the full characteristic polynomial lies strictly inside
    the unit circle."""
    data = obj if isinstance(obj, PFData) else pf_data(obj)
    if data.lam.compare_fraction(1) <= 0:
        return False
    for asc, _mult in data.charpoly_factors:
        inside, on, outside = classify_roots_vs_unit_circle(asc)
        deg = len(asc) - 1
        if tuple(asc) == data.pf_factor:
            if (inside, on, outside) != (deg - 1, 0, 1):
                return False
        else:
            if (inside, on, outside) != (deg, 0, 0):
                return False
    return True


@dataclass(frozen=True)
class FactorReport:
    poly: tuple[int, ...]
    multiplicity: int
    inside: int
    on: int
    outside: int
    component_vanishes: bool | None


@dataclass(frozen=True)
class BalanceVerdict:
    """Whether the constant function 1 lies in the contracting cone of the
    transfer action, up to a positive multiple of the frequency vector.

    ``verdict`` is one of ``ExactCR`` (all column sums equal, so the letter
    frequencies are uniform), ``ProvedCR`` (the obstruction components of the
    constant vector vanish exactly), or ``Inconclusive``.
    """

    verdict: str
    alpha: FieldElement | None
    factor_reports: tuple[FactorReport, ...]
    residual_norms: tuple[float, ...]
    reasons: tuple[str, ...]

    @property
    def is_balanced(self) -> bool:
        return self.verdict in ("ExactCR", "ProvedCR")


def _ones_row_powers(m: IntMatrix, count: int) -> list[tuple[Fraction, ...]]:
    n = len(m)
    row = tuple(Fraction(1) for _ in range(n))
    out = [row]
    for _ in range(count - 1):
        row = tuple(
            sum(row[i] * m[i][j] for i in range(n)) for j in range(n)
        )
        out.append(row)
    return out


def cr_check(obj) -> BalanceVerdict:
    """Decide whether the constant function is balanced against the letter
    frequencies.

    Strategy: equal column sums give the exact verdict at once.  Otherwise
    split the constant row vector into primary components along the
    characteristic factors; a component living on a factor with any root on
    or outside the unit circle must vanish identically, except the dominant
    factor, all of whose non-dominant roots must be strictly contracting.
    """
    data = obj if isinstance(obj, PFData) else pf_data(obj)
    m = data.matrix
    n = len(m)
    field = data.field
    col_sums = [sum(m[i][j] for i in range(n)) for j in range(n)]
    if len(set(col_sums)) == 1:
        uniform = field.rational(Fraction(1, n))
        if any(x != uniform for x in data.left):
            raise InternalCheckError("equal column sums but non-uniform frequencies")
        return BalanceVerdict(
            verdict="ExactCR",
            alpha=field.rational(n),
            factor_reports=(),
            residual_norms=(),
            reasons=("all incidence column sums equal",),
        )

    x = sympy.Symbol("x")
    charpoly = sympy.Poly(1, x, domain="QQ")
    primaries = []
    for asc, mult in data.charpoly_factors:
        q = poly_from_ascending(asc)
        primaries.append((tuple(asc), mult, q ** mult))
        charpoly = charpoly * q ** mult
    deg = charpoly.degree()
    powers = _ones_row_powers(m, deg)

    def row_of_poly(p: sympy.Poly) -> tuple[Fraction, ...]:
        coeffs = [Fraction(c.p, c.q) for c in reversed(p.all_coeffs())]
        out = [Fraction(0)] * n
        for c, prow in zip(coeffs, powers):
            if c:
                out = [o + c * r for o, r in zip(out, prow)]
        return tuple(out)

    reports: list[FactorReport] = []
    reasons: list[str] = []
    ok = True
    component_rows: dict[tuple[int, ...], tuple[Fraction, ...]] = {}
    total = [Fraction(0)] * n
    for asc, mult, q_full in primaries:
        g = charpoly.div(q_full)[0]
        h = sympy.Poly(sympy.invert(g.as_expr(), q_full.as_expr(), x), x, domain="QQ")
        e_poly = (g * h).rem(charpoly)
        row = row_of_poly(e_poly)
        component_rows[asc] = row
        total = [t + r for t, r in zip(total, row)]
        inside, on, outside = classify_roots_vs_unit_circle(asc)
        fdeg = len(asc) - 1
        if asc == data.pf_factor:
            vanish = None
            if (inside, on, outside) != (fdeg - 1, 0, 1):
                ok = False
                reasons.append(
                    "a conjugate of the dominant eigenvalue is not contracting"
                )
        elif on + outside == 0:
            vanish = None
        else:
            vanish = all(v == 0 for v in row)
            if not vanish:
                ok = False
                reasons.append(
                    "constant vector has a nonzero component on a "
                    "non-contracting factor"
                )
        reports.append(FactorReport(asc, mult, inside, on, outside, vanish))
    if any(t != 1 for t in total):
        raise InternalCheckError("primary decomposition of the constant row failed")
    if not ok:
        return BalanceVerdict(
            verdict="Inconclusive",
            alpha=None,
            factor_reports=tuple(reports),
            residual_norms=(),
            reasons=tuple(reasons),
        )

    # extract the dominant-eigenvalue component of the constant row and
    # express it as alpha times the frequency vector
    pf_asc = data.pf_factor
    y_p = component_rows[pf_asc]
    # s(t) = pf_factor(t) / (t - lam), coefficients in the field
    d = len(pf_asc) - 1
    s_coeffs = [field.zero()] * d
    carry = field.rational(pf_asc[d])
    for k in range(d - 1, -1, -1):
        s_coeffs[k] = carry
        carry = field.rational(pf_asc[k]) + carry * field.generator()
    if not carry.is_zero():
        raise InternalCheckError("synthetic division by (t - lam) has remainder")
    yp_powers = [y_p]
    for _ in range(d - 1):
        prev = yp_powers[-1]
        yp_powers.append(
            tuple(sum(prev[i] * m[i][j] for i in range(n)) for j in range(n))
        )
    z = [field.zero() for _ in range(n)]
    for coef, prow in zip(s_coeffs, yp_powers):
        for j in range(n):
            z[j] = z[j] + field.scal(prow[j], coef)
    s_at_lam = field.zero()
    for k in range(d - 1, -1, -1):
        s_at_lam = s_at_lam * field.generator() + s_coeffs[k]
    alpha = None
    for j in range(n):
        cand = z[j] / (s_at_lam * data.left[j])
        if alpha is None:
            alpha = cand
        elif alpha != cand:
            raise InternalCheckError("dominant component is not a multiple of "
                                     "the frequency vector")
    assert alpha is not None
    if alpha.sign() <= 0:
        raise InternalCheckError("dominant coefficient of the constant row "
                                 "is not positive")

    resid = [1.0 - float(alpha * u) for u in data.left]
    norms = [max(abs(v) for v in resid)]
    cur = resid
    for _ in range(12):
        cur = [sum(cur[i] * m[i][j] for i in range(n)) for j in range(n)]
        norms.append(max(abs(v) for v in cur))
    return BalanceVerdict(
        verdict="ProvedCR",
        alpha=alpha,
        factor_reports=tuple(reports),
        residual_norms=tuple(norms),
        reasons=("all non-contracting components of the constant vector vanish",),
    )


def _power_for_block_length(sub: Substitution, n: int) -> int:
    k = 1
    while True:
        if min(len(sub.iterate_idx(a, k)) for a in range(sub.size)) >= max(n, 1):
            return k
        k += 1
        if k > 64:
            raise ResourceLimitError("image growth too slow for block recoding")


def block_frequencies(sub: Substitution, n: int):
    """Exact frequency of every admissible length-n block, as elements of
    the field of the dominant eigenvalue.

    Computed from the block recoding of a suitable power of the substitution:
    the frequency vector is the unique dominant left eigenvector of the
    recoded incidence matrix, normalized to total mass 1.
    """
    if n < 0:
        raise ValidationError("block length must be nonnegative")
    data = pf_data(sub)
    field = data.field
    if n == 0:
        return {(): field.one()}
    if n == 1:
        return {(a,): data.left[a] for a in range(sub.size)}
    k = _power_for_block_length(sub, n)
    blocks = sorted(sub.language(n).blocks_of(n))
    index = {b: i for i, b in enumerate(blocks)}
    nb = len(blocks)
    counts = [[0] * nb for _ in range(nb)]
    for b in blocks:
        image = []
        for letter in b:
            image.extend(sub.iterate_idx(letter, k))
        width = len(sub.iterate_idx(b[0], k))
        for pos in range(width):
            w = tuple(image[pos : pos + n])
            if len(w) < n:
                raise InternalCheckError("block image too short after power choice")
            if w not in index:
                raise InternalCheckError("image window is not an admissible block")
            counts[index[b]][index[w]] += 1
    lam_k = field.power(field.generator(), k)
    rows = []
    for i in range(nb):
        row = []
        for j in range(nb):
            el = field.rational(counts[j][i])
            if i == j:
                el = el - lam_k
            row.append(el)
        rows.append(row)
    kernel = field_kernel(field, rows)
    if len(kernel) != 1:
        raise InternalCheckError("block frequency eigenspace dimension != 1")
    vec = list(kernel[0])
    signs = {v.sign() for v in vec}
    if signs == {-1}:
        vec = [-v for v in vec]
    elif signs != {1}:
        raise InternalCheckError("block frequency vector not strictly positive")
    total = vec[0]
    for v in vec[1:]:
        total = total + v
    vec = [v / total for v in vec]
    return {b: vec[i] for b, i in index.items()}


def cylinder_measure(sub: Substitution, word) -> FieldElement:
    """Exact measure of the cylinder of a word in the unique shift-invariant
    probability measure."""
    if isinstance(word, Word):
        idx = word.idx
    elif isinstance(word, str):
        idx = Word.parse(sub.alphabet, word).idx
    else:
        idx = tuple(int(a) for a in word)
    data = pf_data(sub)
    if len(idx) == 0:
        return data.field.one()
    if any(a < 0 or a >= sub.size for a in idx):
        raise ValidationError("letter index out of range")
    freqs = block_frequencies(sub, len(idx))
    if idx not in freqs:
        raise ValidationError("word is not admissible")
    return freqs[idx]


def _alphabet_of(sub: Substitution):
    return sub.alphabet
