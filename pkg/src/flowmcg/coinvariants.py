"""A computable presentation of the coinvariants group of a primitive
aperiodic substitution shift.

The group is presented as a stationary direct limit over the incidence
matrix of a left-proper derived substitution (return words of a well-chosen
letter).  Cylinder indicator classes, the exact trace, its image lattice,
infinitesimals, restrictions to cross sections, and the automorphisms
induced by flow codes are all computed in this presentation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

from .errors import InternalCheckError, ResourceLimitError, ValidationError
from .intlat import (
    IntMatrix,
    Lattice,
    eventual_kernel,
    hnf_rows,
    invariant_factors,
    mat_vec,
    smith_with_transform,
    transpose,
)
from .numberfield import FieldElement, NumberField
from .pf import PFData, field_kernel, pf_data
from .substitution import (
    Substitution,
    cycle_lengths,
    incidence_matrix,
    is_aperiodic,
    is_primitive,
)
from .words import Alphabet, Cylinder, CylinderSet, Word

_RETURN_DEPTH_CAP = 40


def _derived_labels(count: int) -> Alphabet:
    if count <= 26:
        return Alphabet.of(chr(ord("A") + i) for i in range(count))
    return Alphabet.of(f"r{i}" for i in range(count))


def _fixed_point_prefix(sub: Substitution, letter: int, depth: int) -> tuple[int, ...]:
    return sub.iterate_idx(letter, depth)


def return_words_of(
    sub: Substitution, letter: int, depth_cap: int = _RETURN_DEPTH_CAP
) -> tuple[tuple[int, ...], ...]:
    """Return words of `letter` along the one-sided fixed point seeded there,
    in order of first occurrence.

    Requires the letter to begin its own image.  The scan deepens until the
    set repeats and is closed under the substitution (the image of every
    return word decomposes into known return words).
    """
    if sub.first_letter_map()[letter] != letter:
        raise ValidationError("return words need a letter that begins its own image")
    prev: tuple[tuple[int, ...], ...] | None = None
    for depth in range(2, depth_cap):
        prefix = _fixed_point_prefix(sub, letter, depth)
        occ = [i for i, a in enumerate(prefix) if a == letter]
        if len(occ) < 2:
            continue
        segs: list[tuple[int, ...]] = []
        seen: set[tuple[int, ...]] = set()
        for a, b in zip(occ, occ[1:]):
            s = tuple(prefix[a:b])
            if s not in seen:
                seen.add(s)
                segs.append(s)
        current = tuple(segs)
        if current == prev and _returns_closed(sub, letter, current):
            return current
        prev = current
    raise ResourceLimitError("return-word set failed to stabilize")


def _returns_closed(
    sub: Substitution, letter: int, returns: Sequence[tuple[int, ...]]
) -> bool:
    known = set(returns)
    for r in returns:
        image = sub.apply_idx(r)
        occ = [i for i, a in enumerate(image) if a == letter]
        if not occ or occ[0] != 0:
            return False
        pieces = [tuple(image[a:b]) for a, b in zip(occ, occ[1:])]
        pieces.append(tuple(image[occ[-1]:]))
        if any(p not in known for p in pieces):
            return False
    return True


def decompose_into_returns(
    word: Sequence[int], letter: int, index: Mapping[tuple[int, ...], int]
) -> tuple[int, ...]:
    """Split a word starting and implicitly ending at `letter` occurrences
    into return-word letters."""
    occ = [i for i, a in enumerate(word) if a == letter]
    if not occ or occ[0] != 0:
        raise InternalCheckError("word does not start at the base letter")
    pieces = [tuple(word[a:b]) for a, b in zip(occ, occ[1:])]
    pieces.append(tuple(word[occ[-1]:]))
    out = []
    for p in pieces:
        if p not in index:
            raise InternalCheckError("decomposition hit an unknown return word")
        out.append(index[p])
    return tuple(out)


@dataclass(frozen=True)
class DerivedData:
    """Left-proper presentation extracted from a substitution.

    ``eta`` is the left-proper power of the one-step derived substitution
    ``zeta``; return words realize eta's letters inside the original shift.
    For a substitution that is already proper on both sides the recoding is
    the identity: return words are the letters themselves.
    """

    source: Substitution
    base_letter: int
    cycle_length: int
    zeta: Substitution
    eta: Substitution
    proper_power: int
    kappa: int
    return_words: tuple[tuple[int, ...], ...]
    lengths: tuple[int, ...]
    identity_recoding: bool

    @property
    def dimension(self) -> int:
        return self.eta.size

    @property
    def head_letter(self) -> int:
        """The common first letter of every eta image."""
        return self.eta.first_letter_map()[0]


def derived_proper(sub: Substitution, base: int | str | None = None) -> DerivedData:
    """Recode a primitive aperiodic substitution on the return words of a
    base letter so the result is left proper.

    The base letter must begin its own image under a power of the
    substitution (it lies on a cycle of the first-letter map); by default the
    candidate with the fewest return words wins, ties to the earliest letter.
    A substitution already proper on both sides is returned unchanged.
    """
    if not is_primitive(sub):
        raise ValidationError("substitution must be primitive")
    verdict = is_aperiodic(sub)
    if verdict.periodic:
        raise ValidationError("substitution generates a periodic shift")

    if sub.is_left_proper() and sub.is_right_proper() and base is None:
        letters = tuple((a,) for a in range(sub.size))
        return DerivedData(
            source=sub,
            base_letter=sub.first_letter_map()[0],
            cycle_length=1,
            zeta=sub,
            eta=sub,
            proper_power=1,
            kappa=1,
            return_words=letters,
            lengths=tuple(1 for _ in letters),
            identity_recoding=True,
        )

    fl = sub.first_letter_map()
    cycles = cycle_lengths(fl)
    if base is not None:
        base_idx = sub.alphabet.index(base) if isinstance(base, str) else int(base)
        if base_idx not in cycles:
            raise ValidationError(
                "base letter does not begin its own image under any power"
            )
        candidates = [base_idx]
    else:
        candidates = sorted(cycles)

    best: tuple[int, int, tuple[tuple[int, ...], ...]] | None = None
    for b in candidates:
        c_b = cycles[b]
        powered = sub.power(c_b)
        returns = return_words_of(powered, b)
        if best is None or len(returns) < len(best[2]):
            best = (b, c_b, returns)
    assert best is not None
    b, c_b, returns = best
    powered = sub.power(c_b)
    index = {r: i for i, r in enumerate(returns)}
    labels = _derived_labels(len(returns))
    images = []
    for r in returns:
        code = decompose_into_returns(powered.apply_idx(r), b, index)
        images.append(Word(labels, code))
    zeta = Substitution(labels, tuple(images))

    e = 1
    current = zeta
    while not current.is_left_proper():
        e += 1
        if e > zeta.size + 2:
            raise InternalCheckError(
                "first-letter map of the derived substitution never stabilizes"
            )
        current = zeta.power(e)
    eta = current
    return DerivedData(
        source=sub,
        base_letter=b,
        cycle_length=c_b,
        zeta=zeta,
        eta=eta,
        proper_power=e,
        kappa=c_b * e,
        return_words=returns,
        lengths=tuple(len(r) for r in returns),
        identity_recoding=False,
    )


@dataclass(frozen=True, eq=False)
class GroupElement:
    """An element of the direct limit, as a vector at some level.

    The vector is stored reduced modulo the eventual kernel; equality of
    group elements still goes through :func:`element_equal` (levels differ).
    """

    group: "DirectLimitGroup"
    level: int
    vector: tuple[int, ...]

    def raised(self, levels: int = 1) -> "GroupElement":
        v = self.vector
        for _ in range(levels):
            v = mat_vec(self.group.n_matrix, v)
        return self.group.element(self.level + levels, v)

    def __add__(self, other: "GroupElement") -> "GroupElement":
        a, b = self.group.common_level(self, other)
        return self.group.element(
            a.level, tuple(x + y for x, y in zip(a.vector, b.vector))
        )

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        a, b = self.group.common_level(self, other)
        return self.group.element(
            a.level, tuple(x - y for x, y in zip(a.vector, b.vector))
        )

    def __neg__(self) -> "GroupElement":
        return self.group.element(self.level, tuple(-x for x in self.vector))

    def scaled(self, k: int) -> "GroupElement":
        return self.group.element(self.level, tuple(k * x for x in self.vector))

    def equals(self, other: "GroupElement") -> bool:
        return element_equal(self.group, self, other)

    def trace(self) -> "TraceValue":
        return trace(self.group, self)

    def __repr__(self) -> str:
        return f"GroupElement(level={self.level}, vector={self.vector})"


@dataclass(frozen=True)
class TraceValue:
    """A trace value lam^(-exponent) * element, kept exact."""

    element: FieldElement
    exponent: int
    field: NumberField

    def exact(self) -> FieldElement:
        if self.exponent == 0:
            return self.element
        lam_pow = self.field.power(self.field.generator(), self.exponent)
        return self.element / lam_pow

    def __float__(self) -> float:
        return float(self.exact())

    def __eq__(self, other: object) -> bool:
        if isinstance(other, TraceValue):
            return self.exact() == other.exact()
        if isinstance(other, FieldElement):
            return self.exact() == other
        if isinstance(other, (int, Fraction)):
            return self.exact() == self.field.rational(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.exact())

    def __repr__(self) -> str:
        return f"TraceValue({float(self):.6g})"


class DirectLimitGroup:
    """Stationary direct limit of Z^d under a nonnegative integer matrix,
    with order unit and exact trace data."""

    def __init__(
        self,
        derived: DerivedData,
        n_matrix: IntMatrix,
        orientation: str,
        field: NumberField,
        u_n: tuple[FieldElement, ...],
        base_measure: FieldElement,
        pf_n: PFData,
    ) -> None:
        self.derived = derived
        self.n_matrix = n_matrix
        self.orientation = orientation
        self.field = field
        self.u_n = u_n
        self.base_measure = base_measure
        self.pf_n = pf_n
        self.dimension = len(n_matrix)
        basis, stabilized_at = eventual_kernel(n_matrix)
        self.eventual_kernel_basis = tuple(basis)
        self.kernel_stabilized_at = stabilized_at
        self._kernel_hnf = hnf_rows(basis) if basis else ()
        self.order_unit = self.element(0, derived.lengths)
        unit_trace = trace(self, self.order_unit)
        if unit_trace.exact() != field.one():
            raise InternalCheckError("order unit trace is not 1 after orientation fix")

    # -- element plumbing -------------------------------------------------

    def _reduce_mod_kernel(self, vector: Sequence[int]) -> tuple[int, ...]:
        v = list(int(x) for x in vector)
        for row in self._kernel_hnf:
            p = next(k for k, x in enumerate(row) if x != 0)
            q = v[p] // row[p]
            if q:
                for k in range(len(v)):
                    v[k] -= q * row[k]
        return tuple(v)

    def element(self, level: int, vector: Sequence[int]) -> GroupElement:
        if level < 0:
            raise ValidationError("level must be nonnegative")
        if len(vector) != self.dimension:
            raise ValidationError("vector length does not match the presentation")
        return GroupElement(self, level, self._reduce_mod_kernel(vector))

    def zero(self) -> GroupElement:
        return self.element(0, (0,) * self.dimension)

    def common_level(
        self, a: GroupElement, b: GroupElement
    ) -> tuple[GroupElement, GroupElement]:
        if a.group is not self or b.group is not self:
            raise ValidationError("elements belong to a different presentation")
        m = max(a.level, b.level)
        return a.raised(m - a.level), b.raised(m - b.level)

    # -- ranks ------------------------------------------------------------

    @property
    def free_rank(self) -> int:
        return self.dimension - len(self.eventual_kernel_basis)

    def stabilized_quotient_matrix(self) -> IntMatrix:
        """The transition induced on Z^d modulo the eventual kernel."""
        kb = self.eventual_kernel_basis
        if not kb:
            return self.n_matrix
        d = self.dimension
        k = len(kb)
        e_cols = tuple(tuple(kb[j][i] for j in range(k)) for i in range(d))
        u, dmat, _v = smith_with_transform(e_cols)
        for i in range(k):
            if dmat[i][i] != 1:
                raise InternalCheckError("eventual kernel basis is not saturated")
        # columns of U^{-1} adapt Z^d so the first k coordinates span the
        # kernel; quotient coordinates of w are the last d-k entries of U w
        p_inv = u
        p = _int_inverse(u)
        out_rows = []
        for r in range(k, d):
            row = []
            for j in range(k, d):
                col = tuple(p[i][j] for i in range(d))
                w = mat_vec(self.n_matrix, col)
                c = sum(p_inv[r][i] * w[i] for i in range(d))
                row.append(c)
            out_rows.append(tuple(row))
        return tuple(out_rows)

    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(invariant_factors(self.stabilized_quotient_matrix()))


def _int_inverse(u: IntMatrix) -> IntMatrix:
    from .intlat import _invert_rational

    inv = _invert_rational(u)
    out = []
    for row in inv:
        r = []
        for x in row:
            if x.denominator != 1:
                raise InternalCheckError("transform matrix is not unimodular")
            r.append(int(x))
        out.append(tuple(r))
    return tuple(out)


def build_coinvariants(sub: Substitution, base: int | str | None = None) -> DirectLimitGroup:
    """Present the coinvariants group of the shift of `sub` as a stationary
    direct limit over the derived incidence matrix.

    The matrix orientation is the one for which the order unit (the class of
    the constant function 1, i.e. the length vector of the return words) has
    trace exactly 1; if neither orientation passes, the build aborts.
    """
    derived = derived_proper(sub, base=base)
    data = pf_data(sub)
    field = data.field
    if derived.identity_recoding:
        base_measure = field.one()
    else:
        base_measure = data.left[derived.base_letter]
    n0 = incidence_matrix(derived.eta)
    lam_d = field.power(field.generator(), derived.kappa)

    last_error: Exception | None = None
    for orientation, n_try in (("standard", n0), ("transposed", transpose(n0))):
        try:
            u_n = _left_eigenvector(field, n_try, lam_d)
            pf_n = pf_data(n_try)
            group = DirectLimitGroup(
                derived=derived,
                n_matrix=n_try,
                orientation=orientation,
                field=field,
                u_n=u_n,
                base_measure=base_measure,
                pf_n=pf_n,
            )
            return group
        except InternalCheckError as exc:
            last_error = exc
    raise InternalCheckError(
        f"no orientation gives trace(order unit) = 1: {last_error}"
    )


def _left_eigenvector(
    field: NumberField, m: IntMatrix, eigenvalue: FieldElement
) -> tuple[FieldElement, ...]:
    n = len(m)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            el = field.rational(m[j][i])
            if i == j:
                el = el - eigenvalue
            row.append(el)
        rows.append(row)
    kernel = field_kernel(field, rows)
    if len(kernel) != 1:
        raise InternalCheckError("left eigenspace of the limit matrix is not a line")
    vec = list(kernel[0])
    signs = {x.sign() for x in vec}
    if signs == {-1}:
        vec = [-x for x in vec]
    elif signs != {1}:
        raise InternalCheckError("limit eigenvector is not strictly positive")
    total = vec[0]
    for x in vec[1:]:
        total = total + x
    return tuple(x / total for x in vec)


def element_equal(group: DirectLimitGroup, g: GroupElement, h: GroupElement) -> bool:
    """Equality in the limit: level both elements up, then ask whether the
    difference dies under d' more applications of the matrix."""
    if g.group is not group or h.group is not group:
        raise ValidationError("elements belong to a different presentation")
    a, b = group.common_level(g, h)
    diff = tuple(x - y for x, y in zip(a.vector, b.vector))
    for _ in range(group.dimension):
        if all(x == 0 for x in diff):
            return True
        diff = mat_vec(group.n_matrix, diff)
    return all(x == 0 for x in diff)


def trace(group: DirectLimitGroup, g: GroupElement) -> TraceValue:
    """Exact trace lam^{-m kappa} * mu(base) * (u_N . v)."""
    if g.group is not group:
        raise ValidationError("element belongs to a different presentation")
    acc = group.field.zero()
    for coef, x in zip(g.vector, group.u_n):
        if coef:
            acc = acc + group.field.scal(coef, x)
    element = group.base_measure * acc
    return TraceValue(
        element=element, exponent=g.level * group.derived.kappa, field=group.field
    )


# -- cylinder classes -----------------------------------------------------


def _normalize_word(sub: Substitution, item) -> tuple[int, ...]:
    if isinstance(item, Word):
        return item.idx
    if isinstance(item, str):
        return Word.parse(sub.alphabet, item).idx
    return tuple(int(a) for a in item)


def cylinder_class(group: DirectLimitGroup, item) -> GroupElement:
    """The class of the indicator of a cylinder (or a disjoint finite union)
    in the presentation.

    Only the word matters: shifting a cylinder changes the indicator by a
    coboundary, so the offset is ignored.  The empty word gives the order
    unit.
    """
    sub = group.derived.source
    if isinstance(item, CylinderSet):
        lang_depth = max(
            (abs(c.offset) + len(c.word) for c in item.cylinders), default=2
        )
        language = sub.language(max(2, lang_depth) + 1)
        item.check_admissible(language)
        item.check_disjoint(language)
        total = group.zero()
        for c in item.cylinders:
            total = total + _single_cylinder_class(group, c.word.idx)
        return total
    if isinstance(item, Cylinder):
        return _single_cylinder_class(group, item.word.idx)
    return _single_cylinder_class(group, _normalize_word(sub, item))


def _single_cylinder_class(group: DirectLimitGroup, word: tuple[int, ...]) -> GroupElement:
    sub = group.derived.source
    if len(word) == 0:
        return group.order_unit
    if not sub.language(len(word)).admissible(word):
        raise ValidationError("cylinder word is not admissible")
    weights = _block_weights(group, word)
    return _combine_block_weights(group, weights)


def _block_weights(
    group: DirectLimitGroup, word: tuple[int, ...]
) -> tuple[int, dict[tuple[int, ...], int]]:
    """Weights h(v) over admissible derived s-blocks v: the number of
    occurrences of `word` that start inside the first tile of the window
    spelled by v (with the head letter appended to close the last tile)."""
    derived = group.derived
    min_len = min(derived.lengths)
    c = word
    s = 1 + max(0, -((1 - len(c)) // min_len))  # 1 + ceil((|c|-1)/min_len)
    blocks = sorted(derived.eta.language(s).blocks_of(s))
    out: dict[tuple[int, ...], int] = {}
    base = derived.base_letter if not derived.identity_recoding else derived.head_letter
    closer = (
        derived.return_words[derived.head_letter]
        if derived.identity_recoding
        else (base,)
    )
    for v in blocks:
        window: list[int] = []
        for letter in v:
            window.extend(derived.return_words[letter])
        window.extend(closer)
        first_len = derived.lengths[v[0]]
        count = 0
        for p in range(first_len):
            if p + len(c) > len(window):
                raise InternalCheckError("weight window too short for the block")
            if tuple(window[p : p + len(c)]) == c:
                count += 1
        if count:
            out[v] = count
    return s, out


def _combine_block_weights(
    group: DirectLimitGroup, weights: tuple[int, dict[tuple[int, ...], int]]
) -> GroupElement:
    s, h = weights
    derived = group.derived
    d = group.dimension
    if s == 1:
        vec = [0] * d
        for v, cnt in h.items():
            vec[v[0]] += cnt
        return group.element(0, vec)
    eta = derived.eta
    m = 0
    while min(len(eta.iterate_idx(a, m)) for a in range(d)) < s:
        m += 1
        if m > 64:
            raise ResourceLimitError("supertile growth too slow for block length")
    pairs = sorted(eta.language(2).blocks_of(2))
    b_weight: dict[tuple[int, int], int] = {}
    for (i, j) in pairs:
        left = eta.iterate_idx(i, m)
        right = eta.iterate_idx(j, m)
        joined = left + right
        total = 0
        for v, cnt in h.items():
            for p in range(len(left)):
                if tuple(joined[p : p + s]) == v:
                    total += cnt
        if total:
            b_weight[(i, j)] = total
    head = derived.head_letter
    vec = [0] * d
    for (i, j), wt in b_weight.items():
        for l in range(d):
            img = eta.image_idx(l)
            adj = sum(
                1 for t in range(len(img) - 1) if img[t] == i and img[t + 1] == j
            )
            boundary = 1 if (img[-1] == i and j == head) else 0
            coeff = adj + boundary
            if coeff:
                vec[l] += wt * coeff
    return group.element(m + 1, vec)


# -- trace image ----------------------------------------------------------


@dataclass(frozen=True)
class TraceImage:
    """The Z[1/lam]-module generated by the letter frequencies, presented as
    an ascending-chain plateau inside a denominator-bounded lattice."""

    field: NumberField
    degree: int
    base_lattice: Lattice
    constant_term: int
    description: str

    def _chain_plateau(self, theta_den: int) -> Lattice:
        theta = Lattice.from_fraction_rows(
            [
                [Fraction(int(i == j), theta_den) for j in range(self.degree)]
                for i in range(self.degree)
            ],
            self.degree,
        )
        lam_inv = self.field.inv(self.field.generator())
        cur = self.base_lattice
        gamma = cur.intersect(theta)
        for _ in range(256):
            nxt_rows = []
            for row in cur.rows:
                el = self.field.element(
                    [Fraction(x, cur.den) for x in row]
                )
                scaled = el * lam_inv
                nxt_rows.append(list(scaled.coeffs))
            cur = Lattice.from_fraction_rows(nxt_rows, self.degree)
            gamma_next = cur.intersect(theta)
            if gamma_next == gamma:
                return gamma
            gamma = gamma_next
        raise ResourceLimitError("trace-image chain failed to plateau")

    def contains(self, target) -> bool:
        """Exact membership of a rational or field element in the module."""
        coeffs = self._coeff_row(target)
        den = 1
        for x in coeffs:
            den = den * x.denominator // gcd(den, x.denominator)
        allowed = self.constant_term * self.base_lattice.den
        probe = den
        for _ in range(64):
            g = gcd(probe, allowed)
            if g == 1:
                break
            while probe % g == 0 and g > 1:
                probe //= g
        if probe != 1:
            return False
        theta_den = (self.base_lattice.den * den) // gcd(self.base_lattice.den, den)
        plateau = self._chain_plateau(theta_den)
        return plateau.contains(coeffs)

    def _coeff_row(self, target) -> list[Fraction]:
        if isinstance(target, FieldElement):
            coeffs = list(target.coeffs)
        elif isinstance(target, (int, Fraction)):
            coeffs = [Fraction(target)]
        else:
            coeffs = [Fraction(x) for x in target]
        if len(coeffs) > self.degree:
            raise ValidationError("target has too many coordinates for the field")
        coeffs += [Fraction(0)] * (self.degree - len(coeffs))
        return coeffs

    @property
    def rank(self) -> int:
        return self.base_lattice.rank


def trace_image(sub: Substitution) -> TraceImage:
    """The image of the trace: the Z[1/lam]-module generated by the letter
    frequencies, with exact membership testing."""
    data = pf_data(sub)
    field = data.field
    deg = data.lam.degree
    rows = []
    for u in data.left:
        el = u
        for _ in range(deg):
            rows.append(list(el.coeffs))
            el = el * field.generator()
    lattice = Lattice.from_fraction_rows(rows, deg)
    s_term = abs(data.lam.minpoly[0])
    description = _describe_trace_image(data, lattice, s_term)
    return TraceImage(
        field=field,
        degree=deg,
        base_lattice=lattice,
        constant_term=s_term,
        description=description,
    )


def _describe_trace_image(data: PFData, lattice: Lattice, s_term: int) -> str:
    deg = data.lam.degree
    if deg == 1:
        lam_int = data.lam.as_fraction()
        assert lam_int.denominator == 1
        n = int(lam_int)
        g = lattice.rows[0][0]
        den = lattice.den
        # absorb prime factors of lam into the scalar front factor
        for prime in _prime_factors(n):
            while g % prime == 0:
                g //= prime
            while den % prime == 0:
                den //= prime
        front = Fraction(g, den)
        if front == 1:
            return f"Z[1/{n}]"
        return f"({front})*Z[1/{n}]"
    gens = ", ".join(
        "(" + ", ".join(f"{Fraction(x, lattice.den)}" for x in row) + ")"
        for row in lattice.rows
    )
    return (
        f"rank-{lattice.rank} Z[1/lam]-module in Q(lam), lam of degree {deg}; "
        f"Z-basis rows in the power basis: {gens}"
    )


def _prime_factors(n: int) -> list[int]:
    out = []
    n = abs(n)
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def infinitesimal_rank(sub: Substitution) -> int:
    """Free rank of the kernel of the trace in the presented group."""
    group = build_coinvariants(sub)
    return _infinitesimal_rank_of(group)


def _infinitesimal_rank_of(group: DirectLimitGroup) -> int:
    d = group.dimension
    deg = group.field.degree
    rows = []
    for k in range(deg):
        rows.append([group.u_n[i].coeffs[k] if k < len(group.u_n[i].coeffs) else Fraction(0) for i in range(d)])
    rank = _rational_rank(rows)
    null_dim = d - rank
    inf = null_dim - len(group.eventual_kernel_basis)
    if inf < 0:
        raise InternalCheckError("eventual kernel escapes the trace kernel")
    return inf


def _rational_rank(rows: list[list[Fraction]]) -> int:
    a = [list(r) for r in rows]
    rank = 0
    cols = len(a[0]) if a else 0
    for col in range(cols):
        piv = next((r for r in range(rank, len(a)) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        pv = a[rank][col]
        a[rank] = [x / pv for x in a[rank]]
        for r in range(len(a)):
            if r != rank and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class CoinvariantsReport:
    free_rank: int
    invariant_factors: tuple[int, ...]
    trace_image_description: str
    infinitesimal_rank: int
    caveats: tuple[str, ...]


def coinvariants_report(sub: Substitution) -> CoinvariantsReport:
    group = build_coinvariants(sub)
    image = trace_image(sub)
    inf = _infinitesimal_rank_of(group)
    if group.free_rank != image.rank + inf:
        raise InternalCheckError(
            "free rank does not split into trace-image rank plus infinitesimals"
        )
    return CoinvariantsReport(
        free_rank=group.free_rank,
        invariant_factors=group.invariant_factors(),
        trace_image_description=image.description,
        infinitesimal_rank=inf,
        caveats=(
            "invariant factors are read off this presentation's stabilized "
            "transition and are not validated against an independent model",
        ),
    )


# -- restriction to a cross section ---------------------------------------


@dataclass(frozen=True)
class RestrictedClass:
    """A class expressed on the return-word basis of a cross section."""

    base_letter: int | None
    return_words: tuple[tuple[int, ...], ...]
    weights: tuple[int, ...]
    lengths: tuple[int, ...]

    def as_group_element(self, group: DirectLimitGroup) -> GroupElement:
        derived = group.derived
        if derived.identity_recoding:
            if self.base_letter is not None:
                raise ValidationError(
                    "presentation is on letters; restrict to the whole space"
                )
            return group.element(0, self.weights)
        if self.base_letter != derived.base_letter:
            raise ValidationError("cross section differs from the presentation base")
        if self.return_words != derived.return_words:
            raise InternalCheckError("return-word bases disagree")
        return group.element(0, self.weights)


def _normalize_gamma(
    sub: Substitution, gamma: Mapping
) -> list[tuple[tuple[int, ...], int]]:
    out = []
    for key, coeff in gamma.items():
        word = _normalize_word(sub, key)
        if any(a < 0 or a >= sub.size for a in word):
            raise ValidationError("weight keyed by a word outside the alphabet")
        out.append((word, int(coeff)))
    out.sort(key=lambda t: (len(t[0]), t[0]))
    return out


def restrict_class(sub: Substitution, gamma: Mapping, section) -> RestrictedClass:
    """Express the class of a cylinder-weight function on the return-word
    basis of a cross section.

    `gamma` maps words (cylinders at offset 0) to integer coefficients; the
    weight of a return word is the gamma-weight summed along it.  Occurrence
    counts that straddle the end of a return word are resolved by
    enumerating all admissible continuations compatible with returning to
    the section; disagreement between continuations is an error.  Supported
    sections: the whole space and single-letter cylinders.
    """
    terms = _normalize_gamma(sub, gamma)
    max_len = max((len(w) for w, _ in terms), default=0)

    base_letter: int | None
    if section is None:
        base_letter = None
    elif isinstance(section, CylinderSet):
        if section.is_whole_space:
            base_letter = None
        elif len(section.cylinders) == 1 and len(section.cylinders[0].word) == 1:
            base_letter = section.cylinders[0].word.idx[0]
        else:
            raise ValidationError(
                "supported cross sections: whole space or a one-letter cylinder"
            )
    elif isinstance(section, str):
        if section == "":
            base_letter = None
        else:
            w = Word.parse(sub.alphabet, section)
            if len(w) != 1:
                raise ValidationError(
                    "supported cross sections: whole space or a one-letter cylinder"
                )
            base_letter = w.idx[0]
    else:
        base_letter = int(section)

    if base_letter is None:
        returns: tuple[tuple[int, ...], ...] = tuple((a,) for a in range(sub.size))
    else:
        fl = sub.first_letter_map()
        cycles = cycle_lengths(fl)
        if base_letter not in cycles:
            raise ValidationError(
                "cross-section letter must begin its own image under some power"
            )
        powered = sub.power(cycles[base_letter])
        returns = return_words_of(powered, base_letter)

    language = sub.language(max(2, max_len + max(len(r) for r in returns)))
    weights = []
    for r in returns:
        weights.append(
            _return_word_weight(sub, language, terms, r, returns, base_letter, max_len)
        )
    return RestrictedClass(
        base_letter=base_letter,
        return_words=returns,
        weights=tuple(weights),
        lengths=tuple(len(r) for r in returns),
    )


def _return_word_weight(
    sub: Substitution,
    language,
    terms: list[tuple[tuple[int, ...], int]],
    r: tuple[int, ...],
    returns: tuple[tuple[int, ...], ...],
    base_letter: int | None,
    max_len: int,
) -> int:
    ext = max(0, max_len - 1)
    if ext == 0:
        continuations: list[tuple[int, ...]] = [()]
    else:
        continuations = sorted(
            set(_return_continuations(returns, ext))
        )
        continuations = [
            z for z in continuations if language.admissible(r + z)
        ]
        if not continuations:
            raise InternalCheckError("no admissible continuation for a return word")
    value: int | None = None
    for z in continuations:
        window = r + z
        total = 0
        for word, coeff in terms:
            if len(word) == 0:
                total += coeff * len(r)
                continue
            for p in range(len(r)):
                if p + len(word) <= len(window) and window[p : p + len(word)] == word:
                    total += coeff
        if value is None:
            value = total
        elif value != total:
            raise ValidationError(
                "weight of a return word depends on the continuation; "
                "the class does not restrict to this basis"
            )
    assert value is not None
    return value


def _return_continuations(
    returns: tuple[tuple[int, ...], ...], length: int
) -> list[tuple[int, ...]]:
    out = []

    def grow(prefix: tuple[int, ...]):
        if len(prefix) >= length:
            out.append(prefix[:length])
            return
        for r in returns:
            grow(prefix + r)

    grow(())
    return out


# -- induced action of flow codes -----------------------------------------


@dataclass(frozen=True)
class ActionReport:
    """The action of a flow code on the coinvariants presentation.

    `matrix` columns are the images of the level-0 basis classes, written in
    level-`level` coordinates (for a level-preserving action, `level` is 0
    and the matrix is square in the usual sense).
    """

    kind: str
    level: int
    matrix: IntMatrix
    fixes_order_unit: bool
    basis_images: tuple[GroupElement, ...]
    unit_image: GroupElement
    letter_permutation: tuple[int, ...] | None
    trace_scale: FieldElement | None


def induced_action(flow_code, group: DirectLimitGroup | None = None) -> ActionReport:
    """Compute the automorphism of the coinvariants presentation induced by
    a flow code.

    Supported codes: the identity, automorphism codes of the shift (pushing
    basis cylinders through the inverse block code), and the canonical
    substitution self-code (multiplication by the one-step derived incidence
    matrix; requires the base letter to begin its own image directly).
    """
    kind = getattr(flow_code, "kind", None)
    sub = getattr(flow_code, "sub", None)
    if kind is None or sub is None:
        raise ValidationError("object does not look like a flow code")
    if group is None:
        group = build_coinvariants(sub)
    if kind == "identity":
        d = group.dimension
        from .intlat import identity as _identity

        basis = tuple(
            group.element(0, tuple(int(i == j) for i in range(d))) for j in range(d)
        )
        return ActionReport(
            kind=kind,
            level=0,
            matrix=_identity(d),
            fixes_order_unit=True,
            basis_images=basis,
            unit_image=group.order_unit,
            letter_permutation=tuple(range(sub.size)),
            trace_scale=group.field.one(),
        )
    if kind == "substitution":
        derived = group.derived
        if derived.cycle_length != 1:
            raise ValidationError(
                "substitution action needs a base letter fixed by the "
                "first-letter map itself"
            )
        c_mat = incidence_matrix(derived.zeta)
        d = group.dimension
        basis = tuple(
            group.element(0, tuple(c_mat[i][j] for i in range(d))) for j in range(d)
        )
        unit_image = group.element(0, mat_vec(c_mat, derived.lengths))
        fixes = element_equal(group, unit_image, group.order_unit)
        return ActionReport(
            kind=kind,
            level=0,
            matrix=c_mat,
            fixes_order_unit=fixes,
            basis_images=basis,
            unit_image=unit_image,
            letter_permutation=None,
            trace_scale=group.field.generator(),
        )
    if kind == "automorphism":
        return _automorphism_action(flow_code, group)
    raise ValidationError(f"induced action not implemented for kind {kind!r}")


def _automorphism_action(flow_code, group: DirectLimitGroup) -> ActionReport:
    sub: Substitution = flow_code.sub
    # the image of a cylinder under the homeomorphism is the preimage of
    # that cylinder under its inverse block code
    code = getattr(flow_code, "inverse", None)
    if code is None:
        raise ValidationError("automorphism flow code carries no inverse block code")
    derived = group.derived
    d = group.dimension
    images = []
    for i in range(d):
        if derived.identity_recoding:
            word = derived.return_words[i]
        else:
            word = derived.return_words[i] + (derived.base_letter,)
        images.append(_pushforward_class(group, code, word))
    m_level = max(g.level for g in images)
    lifted = [g.raised(m_level - g.level) for g in images]
    matrix = tuple(
        tuple(lifted[j].vector[i] for j in range(d)) for i in range(len(lifted[0].vector))
    )
    unit_image = group.zero()
    for l, g in zip(derived.lengths, images):
        unit_image = unit_image + g.scaled(l)
    fixes = element_equal(group, unit_image, group.order_unit)

    permutation = _letter_permutation(group, code, sub)

    return ActionReport(
        kind="automorphism",
        level=m_level,
        matrix=matrix,
        fixes_order_unit=fixes,
        basis_images=tuple(images),
        unit_image=unit_image,
        letter_permutation=permutation,
        trace_scale=group.field.one() if fixes else None,
    )


def _letter_permutation(
    group: DirectLimitGroup, code, sub: Substitution
) -> tuple[int, ...] | None:
    """How the homeomorphism permutes one-letter cylinders, when it does.

    A radius-0 code gives the permutation exactly at the level of sets;
    otherwise the image class of each letter cylinder is matched against the
    letter classes, which can alias letters whose classes coincide.
    """
    d = sub.size
    if code.radius == 0:
        perm: list[int | None] = [None] * d
        for window, out in code.rule.items():
            if len(window) != 1:
                return None
            o = out[0] if isinstance(out, tuple) else int(out)
            if perm[o] is not None:
                return None
            perm[o] = window[0]
        if any(p is None for p in perm):
            return None
        return tuple(perm)
    letter_classes = [cylinder_class(group, (a,)) for a in range(d)]
    out_perm: list[int] = []
    for a in range(d):
        img = _pushforward_class(group, code, (a,))
        match = next(
            (t for t, cls in enumerate(letter_classes) if element_equal(group, img, cls)),
            None,
        )
        if match is None:
            return None
        out_perm.append(match)
    return tuple(out_perm)


def _pushforward_class(
    group: DirectLimitGroup, code, word: tuple[int, ...]
) -> GroupElement:
    """Class of the image of [word] under the homeomorphism whose inverse is
    the given sliding block code: sum the classes of all admissible preimage
    windows."""
    sub = group.derived.source
    radius = code.radius
    n = len(word) + 2 * radius
    language = sub.language(max(n, 2))
    total = group.zero()
    found = False
    for block in sorted(language.blocks_of(n)):
        if code.apply(block) == word:
            total = total + _single_cylinder_class(group, block)
            found = True
    if not found:
        raise ValidationError("no preimage window; code does not map onto the word")
    return total
