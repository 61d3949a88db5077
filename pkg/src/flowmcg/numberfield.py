"""Exact arithmetic in real algebraic number fields.

An algebraic number is an integer minimal polynomial (ascending coefficients,
primitive, irreducible, positive leading coefficient) plus an isolating
rational interval. Field elements of Q(lambda) are polynomials in lambda with
Fraction coefficients, reduced mod the monic minimal polynomial. Signs are
decided exactly by interval refinement, which terminates because a nonzero
element of the field has nonzero value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

from .errors import InternalCheckError, ValidationError

_X = sympy.Symbol("x")


def poly_from_ascending(coeffs: Sequence[int | Fraction]) -> sympy.Poly:
    rs = [sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else int(c)
          for c in coeffs]
    return sympy.Poly(list(reversed(rs)), _X)

def ascending_from_poly(p: sympy.Poly) -> tuple[int, ...]:
    return tuple(int(c) for c in reversed(p.all_coeffs()))


def eval_ascending(coeffs: Sequence, t: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * t + Fraction(c)
    return acc


@dataclass(frozen=True)
class AlgebraicNumber:
    """A real algebraic number, exactly represented."""

    minpoly: tuple[int, ...]  # ascending, primitive, irreducible, lead > 0
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if len(self.minpoly) < 2 or self.minpoly[-1] <= 0:
            raise ValidationError("minimal polynomial must be nonconstant, lead > 0")
        if self.degree >= 2:
            slo = eval_ascending(self.minpoly, self.lo)
            shi = eval_ascending(self.minpoly, self.hi)
            if slo == 0 or shi == 0 or (slo > 0) == (shi > 0):
                raise ValidationError("interval does not isolate a root")

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValidationError("not a rational number")
        return Fraction(-self.minpoly[0], self.minpoly[1])

    @classmethod
    def from_rational(cls, q: Fraction | int) -> "AlgebraicNumber":
        q = Fraction(q)
        return cls((-q.numerator, q.denominator), q, q)

    @classmethod
    def real_roots_of(cls, coeffs_asc: Sequence[int]) -> list["AlgebraicNumber"]:
        """All real roots of an integer polynomial, each exactly isolated."""
        p = poly_from_ascending(coeffs_asc)
        out: list[AlgebraicNumber] = []
        for fac, _mult in p.factor_list()[1]:
            fac = fac.primitive()[1]
            if fac.LC() < 0:
                fac = -fac
            asc = ascending_from_poly(fac)
            if len(asc) == 2:
                q = Fraction(-asc[0], asc[1])
                out.append(cls((-q.numerator, q.denominator), q, q))
                continue
            if len(asc) < 2:
                continue
            for (lo, hi), _mult in fac.intervals():
                lo_f, hi_f = Fraction(int(lo.p), int(lo.q)), Fraction(int(hi.p), int(hi.q))
                lo_f, hi_f = _nudge_open(asc, lo_f, hi_f)
                out.append(cls(asc, lo_f, hi_f))
        out.sort(key=lambda a: a.approx(Fraction(1, 10**6)))
        return out

    def refined(self, width: Fraction) -> "AlgebraicNumber":
        if self.is_rational:
            return self
        lo, hi = self.lo, self.hi
        slo = eval_ascending(self.minpoly, lo)
        while hi - lo > width:
            mid = (lo + hi) / 2
            smid = eval_ascending(self.minpoly, mid)
            if smid == 0:
                raise InternalCheckError("irreducible polynomial with rational root")
            if (smid > 0) == (slo > 0):
                lo = mid
                slo = smid
            else:
                hi = mid
        return AlgebraicNumber(self.minpoly, lo, hi)

    def approx(self, eps: Fraction) -> Fraction:
        if self.is_rational:
            return self.as_fraction()
        r = self.refined(eps)
        return (r.lo + r.hi) / 2

    def __float__(self) -> float:
        return float(self.approx(Fraction(1, 10**17)))

    def compare_fraction(self, q: Fraction | int) -> int:
        """Sign of self - q, exact."""
        q = Fraction(q)
        if self.is_rational:
            v = self.as_fraction()
            return (v > q) - (v < q)
        if eval_ascending(self.minpoly, q) == 0:
            raise InternalCheckError("irreducible polynomial with rational root")
        cur = self
        while cur.lo <= q <= cur.hi:
            cur = cur.refined((cur.hi - cur.lo) / 4)
        return 1 if cur.lo > q else -1

    def equals(self, other: "AlgebraicNumber") -> bool:
        if self.minpoly != other.minpoly:
            return False
        if self.is_rational:
            return True
        canon = AlgebraicNumber.real_roots_of(self.minpoly)
        return _which_root(self, canon) == _which_root(other, canon)


def _nudge_open(asc: Sequence[int], lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Shrink a closed isolating interval so neither endpoint is a root and
    the endpoint values have opposite signs."""
    # endpoints of sympy isolating intervals can be the root itself only for
    # rational roots, excluded here (irreducible degree >= 2); still the value
    # at an endpoint can share sign issues if an endpoint equals a root of
    # another factor, so bisect until signs differ.
    slo = eval_ascending(asc, lo)
    shi = eval_ascending(asc, hi)
    while slo == 0 or shi == 0 or (slo > 0) == (shi > 0):
        # move endpoints inward keeping exactly one root inside
        third = (hi - lo) / 3
        cand_lo, cand_hi = lo + third, hi - third
        s_cl = eval_ascending(asc, cand_lo)
        s_ch = eval_ascending(asc, cand_hi)
        if s_cl != 0 and s_ch != 0 and (s_cl > 0) != (s_ch > 0):
            lo, hi, slo, shi = cand_lo, cand_hi, s_cl, s_ch
            break
        if s_cl != 0 and slo != 0 and (s_cl > 0) != (slo > 0):
            hi, shi = cand_lo, s_cl
        elif s_ch != 0 and shi != 0 and (s_ch > 0) != (shi > 0):
            lo, slo = cand_hi, s_ch
        else:
            # root sits in the middle third; widen the middle
            lo = lo + third / 2 if slo == 0 else lo
            hi = hi - third / 2 if shi == 0 else hi
            slo = eval_ascending(asc, lo)
            shi = eval_ascending(asc, hi)
    return lo, hi


def _which_root(a: AlgebraicNumber, canon: list[AlgebraicNumber]) -> int:
    cur = a
    while True:
        hits = [
            k for k, c in enumerate(canon)
            if not (cur.hi < c.lo or c.hi < cur.lo)
        ]
        if len(hits) == 1:
            return hits[0]
        cur = cur.refined((cur.hi - cur.lo) / 4)


class NumberField:
    """Q(lambda) for a fixed real algebraic lambda, with exact operations.

    Elements are coefficient tuples (Fractions, ascending in powers of
    lambda) of length equal to the degree.
    """

    def __init__(self, root: AlgebraicNumber) -> None:
        self.root = root
        lead = root.minpoly[-1]
        self.degree = root.degree
        # monic minimal polynomial of lambda over Q
        self.monic: tuple[Fraction, ...] = tuple(
            Fraction(c, lead) for c in root.minpoly
        )
    # element constructors -------------------------------------------------

    def element(self, coeffs: Sequence[Fraction | int]) -> "FieldElement":
        cs = [Fraction(c) for c in coeffs]
        if len(cs) > self.degree:
            cs = self._reduce_div(cs)
        cs += [Fraction(0)] * (self.degree - len(cs))
        return FieldElement(self, tuple(cs))

    def zero(self) -> "FieldElement":
        return self.element([])

    def one(self) -> "FieldElement":
        return self.element([1])

    def rational(self, q: Fraction | int) -> "FieldElement":
        return self.element([Fraction(q)])

    def generator(self) -> "FieldElement":
        if self.degree == 1:
            return self.element([-self.monic[0]])
        return self.element([0, 1])

    def _reduce_div(self, cs: list[Fraction]) -> list[Fraction]:
        d = self.degree
        work = list(cs)
        for k in range(len(work) - 1, d - 1, -1):
            c = work[k]
            if c == 0:
                continue
            work[k] = Fraction(0)
            for i in range(d):
                work[k - d + i] += -self.monic[i] * c
        return work[:d] + [Fraction(0)] * max(0, d - len(work))

    # arithmetic -----------------------------------------------------------

    def add(self, a: "FieldElement", b: "FieldElement") -> "FieldElement":
        return FieldElement(self, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    def sub(self, a: "FieldElement", b: "FieldElement") -> "FieldElement":
        return FieldElement(self, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def neg(self, a: "FieldElement") -> "FieldElement":
        return FieldElement(self, tuple(-x for x in a.coeffs))

    def mul(self, a: "FieldElement", b: "FieldElement") -> "FieldElement":
        d = self.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, x in enumerate(a.coeffs):
            if x == 0:
                continue
            for j, y in enumerate(b.coeffs):
                if y == 0:
                    continue
                prod[i + j] += x * y
        return FieldElement(self, tuple(self._reduce_div(prod)))

    def scal(self, q: Fraction | int, a: "FieldElement") -> "FieldElement":
        q = Fraction(q)
        return FieldElement(self, tuple(q * x for x in a.coeffs))

    def inv(self, a: "FieldElement") -> "FieldElement":
        if a.is_zero():
            raise ZeroDivisionError("field element is zero")
        if self.degree == 1:
            return self.rational(1 / a.coeffs[0])
        # extended Euclid in Q[x]: s*a + t*monic = gcd = const
        r0 = list(self.monic)
        r1 = list(a.coeffs)
        s0: list[Fraction] = [Fraction(0)]
        s1: list[Fraction] = [Fraction(1)]
        while True:
            r1 = _trim(r1)
            if len(r1) == 1:
                break
            q, rem = _polydivmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _polysub(s0, _polymul(q, s1))
            if not _trim(r1) or _trim(r1) == [Fraction(0)]:
                raise InternalCheckError("element shares a factor with the minimal polynomial")
        c = r1[0]
        inv_cs = [x / c for x in s1]
        return self.element(inv_cs)

    def div(self, a: "FieldElement", b: "FieldElement") -> "FieldElement":
        return self.mul(a, self.inv(b))

    def power(self, a: "FieldElement", k: int) -> "FieldElement":
        if k < 0:
            return self.power(self.inv(a), -k)
        out = self.one()
        base = a
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    # sign and approximation ----------------------------------------------

    def sign(self, a: "FieldElement") -> int:
        """Exact sign via interval refinement of lambda."""
        if all(c == 0 for c in a.coeffs):
            return 0
        if all(c == 0 for c in a.coeffs[1:]):
            c = a.coeffs[0]
            return (c > 0) - (c < 0)
        root = self.root
        while True:
            lo, hi = _interval_eval(a.coeffs, root.lo, root.hi)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            root = root.refined((root.hi - root.lo) / 4)

    def approx(self, a: "FieldElement", eps: Fraction) -> Fraction:
        root = self.root
        while True:
            lo, hi = _interval_eval(a.coeffs, root.lo, root.hi)
            if hi - lo < eps:
                return (lo + hi) / 2
            root = root.refined((root.hi - root.lo) / 4)

    def to_float(self, a: "FieldElement") -> float:
        return float(self.approx(a, Fraction(1, 10**17)))

    def as_rational(self, a: "FieldElement") -> Fraction:
        if any(c != 0 for c in a.coeffs[1:]):
            raise ValidationError("element is irrational")
        return a.coeffs[0]


@dataclass(frozen=True)
class FieldElement:
    field: NumberField
    coeffs: tuple[Fraction, ...]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return self.field.add(self, other)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return self.field.sub(self, other)

    def __neg__(self) -> "FieldElement":
        return self.field.neg(self)

    def __mul__(self, other):
        if isinstance(other, FieldElement):
            return self.field.mul(self, other)
        return self.field.scal(Fraction(other), self)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, FieldElement):
            return self.field.div(self, other)
        return self.field.scal(1 / Fraction(other), self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def sign(self) -> int:
        return self.field.sign(self)

    def __float__(self) -> float:
        return self.field.to_float(self)

    def __repr__(self) -> str:
        return f"FieldElement{self.coeffs}"


def _trim(p: list[Fraction]) -> list[Fraction]:
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return p


def _polydivmod(num: list[Fraction], den: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    num = _trim(list(num))
    den = _trim(list(den))
    if len(den) == 1 and den[0] == 0:
        raise ZeroDivisionError
    q = [Fraction(0)] * max(1, len(num) - len(den) + 1)
    r = list(num)
    dlead = den[-1]
    while len(_trim(r)) >= len(den) and _trim(r) != [Fraction(0)]:
        r = _trim(r)
        shift = len(r) - len(den)
        coef = r[-1] / dlead
        q[shift] += coef
        for i, dc in enumerate(den):
            r[shift + i] -= coef * dc
        r = r[:-1] if r[-1] == 0 else r
    return q, _trim(r)


def _polymul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _polysub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] -= x
    return out


def _interval_eval(coeffs: Sequence[Fraction], lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Interval extension of a polynomial over [lo, hi] via monomial bounds."""
    out_lo = Fraction(0)
    out_hi = Fraction(0)
    plo, phi = Fraction(1), Fraction(1)  # bounds for t^k over the interval
    for c in coeffs:
        if c > 0:
            out_lo += c * plo
            out_hi += c * phi
        elif c < 0:
            out_lo += c * phi
            out_hi += c * plo
        # next power bounds
        cands = [plo * lo, plo * hi, phi * lo, phi * hi]
        plo, phi = min(cands), max(cands)
    return out_lo, out_hi


# ---------------------------------------------------------------------------
# root location relative to the unit circle, exactly


def _is_palindromic(asc: Sequence[int]) -> bool:
    return list(asc) == list(reversed(asc))


def _chebyshev_like(m: int) -> list[sympy.Poly]:
    """p_k with p_k(x + 1/x) = x^k + x^-k: p_0 = 2, p_1 = t, recurrence
    p_{k+1} = t p_k - p_{k-1}."""
    t = sympy.Symbol("t")
    ps = [sympy.Poly(2, t), sympy.Poly(t, t)]
    for _ in range(2, m + 1):
        ps.append(sympy.Poly(t, t) * ps[-1] - ps[-2])
    return ps[: m + 1]


def count_unit_circle_roots(asc: Sequence[int]) -> int:
    """Number of roots (with multiplicity 1, the factor being irreducible) of
    an irreducible integer polynomial lying on the unit circle."""
    deg = len(asc) - 1
    if deg == 1:
        num, den = abs(asc[0]), abs(asc[1])
        return 1 if num == den else 0
    # an irreducible factor with a circle root z also has 1/z as a root, so it
    # is self-reciprocal up to sign; odd-degree or anti-palindromic cases
    # force a rational root (+-1), impossible for irreducible degree >= 2
    if not _is_palindromic(asc):
        return 0
    if deg % 2 == 1:
        return 0
    m = deg // 2
    ps = _chebyshev_like(m)
    t = sympy.Symbol("t")
    r = sympy.Poly(asc[m], t)
    for k in range(1, m + 1):
        r = r + int(asc[m + k]) * ps[k]
    # roots of r in (-2, 2) correspond to conjugate circle pairs; endpoints
    # would mean +-1 is a root of the original, excluded
    cnt = r.count_roots(-2, 2)
    return 2 * int(cnt)


def classify_roots_vs_unit_circle(asc: Sequence[int]) -> tuple[int, int, int]:
    """(inside, on, outside) counts for the roots of an irreducible integer
    polynomial relative to the unit circle. Exact."""
    deg = len(asc) - 1
    if deg == 1:
        num, den = abs(asc[0]), abs(asc[1])
        if num == den:
            return (0, 1, 0)
        return (1, 0, 0) if num < den else (0, 0, 1)
    on = count_unit_circle_roots(asc)
    p = poly_from_ascending(asc)
    roots = p.all_roots(radicals=False)
    inside = outside = 0
    undecided = []
    for r in roots:
        side = _root_side_of_circle(r, max_halvings=64 if on == 0 else 24)
        if side == -1:
            inside += 1
        elif side == 1:
            outside += 1
        else:
            undecided.append(r)
    if len(undecided) != on:
        # refine harder on the undecided ones; with the known on-circle count
        # the loop below must converge
        still = []
        for r in undecided:
            side = _root_side_of_circle(r, max_halvings=128)
            if side == -1:
                inside += 1
            elif side == 1:
                outside += 1
            else:
                still.append(r)
        undecided = still
    if len(undecided) != on:
        raise InternalCheckError("circle classification did not converge")
    return inside, on, outside


def _root_side_of_circle(root, max_halvings: int) -> int:
    """-1 inside, 1 outside, 0 undecided after the refinement budget."""
    eps = sympy.Rational(1, 4)
    for _ in range(max_halvings):
        val = root.eval_rational(eps, eps)
        re = Fraction(int(sympy.re(val).p), int(sympy.re(val).q))
        im = Fraction(int(sympy.im(val).p), int(sympy.im(val).q))
        e = Fraction(eps.p, eps.q)
        lo_sq = _clip_nonneg(abs(re) - e) ** 2 + _clip_nonneg(abs(im) - e) ** 2
        hi_sq = (abs(re) + e) ** 2 + (abs(im) + e) ** 2
        if hi_sq < 1:
            return -1
        if lo_sq > 1:
            return 1
        eps = eps / 16
    return 0


def _clip_nonneg(q: Fraction) -> Fraction:
    return q if q > 0 else Fraction(0)


def factor_charpoly(matrix: Sequence[Sequence[int]]) -> list[tuple[tuple[int, ...], int]]:
    """Irreducible factors (ascending integer coefficients, positive leading)
    of the characteristic polynomial, with multiplicities."""
    m = sympy.Matrix([[int(x) for x in row] for row in matrix])
    p = m.charpoly(_X)
    out = []
    for fac, mult in sympy.Poly(p, _X).factor_list()[1]:
        fac = fac.primitive()[1]
        if fac.LC() < 0:
            fac = -fac
        out.append((ascending_from_poly(fac), int(mult)))
    out.sort()
    return out


def minimal_polynomial_of_element(field: NumberField, a: FieldElement) -> tuple[int, ...]:
    """Integer minimal polynomial (ascending, primitive, positive leading) of
    a field element, certified by sign change around a refined interval."""
    y = sympy.Symbol("y")
    lam_min = poly_from_ascending(field.root.minpoly).as_expr().subs(_X, y)
    g = sum(
        sympy.Rational(c.numerator, c.denominator) * y**k for k, c in enumerate(a.coeffs)
    )
    res = sympy.resultant(lam_min, _X - g, y)
    p = sympy.Poly(sympy.expand(res), _X)
    candidates = [f.primitive()[1] for f, _ in p.factor_list()[1]]
    eps = Fraction(1, 16)
    while True:
        mid = field.approx(a, eps)
        live = []
        for f in candidates:
            asc = ascending_from_poly(f if f.LC() > 0 else -f)
            slo = eval_ascending(asc, mid - eps)
            shi = eval_ascending(asc, mid + eps)
            if slo == 0 or shi == 0 or (slo > 0) != (shi > 0):
                live.append(f)
        if len(live) == 1:
            f = live[0]
            if f.LC() < 0:
                f = -f
            return ascending_from_poly(f)
        if len(live) == 0:
            # interval missed every sign change; shrink and retry
            pass
        eps = eps / 16


def same_real_algebraic(a: "FieldElement", b: "FieldElement") -> bool:
    """Exact equality of two real algebraic numbers that may be presented
    in different fields: compare minimal polynomials, then isolate which
    root each one is."""
    if a.field is b.field:
        return a == b
    pa = minimal_polynomial_of_element(a.field, a)
    pb = minimal_polynomial_of_element(b.field, b)
    if pa != pb:
        return False
    roots = AlgebraicNumber.real_roots_of(pa)
    return _locate_root(a, roots) == _locate_root(b, roots)


def _locate_root(x: "FieldElement", roots: list[AlgebraicNumber]) -> int:
    eps = Fraction(1, 16)
    for _ in range(300):
        mid = x.field.approx(x, eps)
        lo, hi = mid - eps, mid + eps
        live = []
        for i, r in enumerate(roots):
            rr = r.refined(eps)
            if not (rr.hi < lo or rr.lo > hi):
                live.append(i)
        if len(live) == 1:
            return live[0]
        eps = eps / 16
    raise InternalCheckError("root isolation failed to converge")
