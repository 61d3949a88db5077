"""Exhaustive bounded-radius search for self-conjugacies of a substitution
shift, identification modulo shift powers, and the induced permutation of
ergodic measures.

Completeness is per radius only: a report certifies every block code of
radius at most r that preserves the language to the checked depth and is
invertible within the inverse budget.  Nothing is claimed about larger
radii.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .asymptotics import stabilize_power
from .errors import InternalCheckError, ValidationError
from .flows import INVERSE_RADIUS_BUDGET, _check_roundtrip, _search_inverse
from .substitution import Substitution, is_primitive, right_fixed_prefix
from .words import LanguageTable, SlidingBlockCode, compose_codes, code_preserves_language

DEFAULT_RADIUS = 2
DEFAULT_CHECK_DEPTH = 12
SHIFT_ID_WINDOW = 4096
GROUP_NAME_BOUND = 12


@dataclass(frozen=True)
class AutGroupReport:
    """Automorphisms found at a fixed radius.

    `codes` lists every verified code in lexicographic rule order, paired
    with `inverses`.  `elements` are representatives modulo shift powers;
    `table` is their composition table (again modulo shift powers).
    """

    sub: Substitution
    radius: int
    n_check: int
    window: int
    codes: tuple[SlidingBlockCode, ...]
    inverses: tuple[SlidingBlockCode, ...]
    elements: tuple[SlidingBlockCode, ...]
    table: tuple[tuple[int, ...], ...]
    identity_index: int
    certificate: str

    @property
    def quotient_order(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class QuotientGroup:
    """The automorphism group modulo shift powers, as a finite group."""

    order: int
    table: tuple[tuple[int, ...], ...]
    identity: int
    element_orders: tuple[int, ...]
    name: str
    certificate: str


@dataclass(frozen=True)
class MeasureActionReport:
    """Permutation of frequency tables under a code's pushforward."""

    permutation: tuple[int, ...]
    distances: tuple[tuple[Fraction, ...], ...]
    margin: Fraction | None
    block_length: int


def _sample_fixed_prefix(sub: Substitution, length: int) -> tuple[int, ...]:
    powered = sub.power(stabilize_power(sub))
    fl = powered.first_letter_map()
    seed = next(a for a in range(sub.size) if fl[a] == a)
    return right_fixed_prefix(powered, seed, length)


def _equal_mod_shift(
    a: SlidingBlockCode,
    b: SlidingBlockCode,
    sample: Sequence[int],
    max_offset: int,
) -> int | None:
    """Offset k with a = shift^k b on the sample, or None.

    Two matching offsets on a long aperiodic sample would mean the window
    is periodic; that is reported rather than resolved silently.
    """
    out_a = a.apply(sample)
    out_b = b.apply(sample)
    hits = []
    for k in range(-max_offset, max_offset + 1):
        # position t of the point has index t - r in each output array
        agree = True
        checked = 0
        for i, x in enumerate(out_a):
            t = i + a.radius
            j = t + k - b.radius
            if 0 <= j < len(out_b):
                checked += 1
                if x != out_b[j]:
                    agree = False
                    break
        if agree and checked > max_offset:
            hits.append(k)
    if len(hits) > 1:
        raise InternalCheckError(
            f"shift identification ambiguous: offsets {hits} all match"
        )
    return hits[0] if hits else None


def _enumerate_candidates(
    lang: LanguageTable, radius: int, d: int
) -> list[dict[tuple[int, ...], int]]:
    """All output assignments to admissible windows whose images respect
    2-block admissibility across overlaps."""
    width = 2 * radius + 1
    blocks = sorted(lang.blocks_of(width))
    pairs = {w for w in lang.blocks_of(2)}
    index = {w: i for i, w in enumerate(blocks)}
    # overlap successors: u then v when u[1:] == v[:-1] and the join is admissible
    succ: list[list[int]] = [[] for _ in blocks]
    for u in blocks:
        for last in range(d):
            join = u + (last,)
            if lang.admissible(join):
                succ[index[u]].append(index[join[1:]])

    out: list[int | None] = [None] * len(blocks)
    found: list[dict[tuple[int, ...], int]] = []

    def consistent(i: int) -> bool:
        for j in succ[i]:
            if out[j] is not None and (out[i], out[j]) not in pairs:
                return False
        for h in range(len(blocks)):
            if out[h] is not None and i in succ[h]:
                if (out[h], out[i]) not in pairs:
                    return False
        return True

    def walk(i: int) -> None:
        if i == len(blocks):
            found.append({blocks[j]: out[j] for j in range(len(blocks))})
            return
        for letter in range(d):
            out[i] = letter
            if consistent(i):
                walk(i + 1)
        out[i] = None

    walk(0)
    return found


def search_automorphisms(
    sub: Substitution,
    radius: int = DEFAULT_RADIUS,
    n_check: int = DEFAULT_CHECK_DEPTH,
) -> AutGroupReport:
    """Every automorphism realizable at the given radius.

    Exhausts output assignments on admissible windows, keeps those that
    preserve the language to depth n_check and admit a verified two-sided
    inverse code, then groups the survivors modulo shift powers.
    """
    if radius < 0:
        raise ValidationError("radius must be nonnegative")
    if n_check < 2 * radius + 1:
        raise ValidationError("n_check must be at least the window width")
    if not is_primitive(sub):
        raise ValidationError("substitution must be primitive")
    d = sub.size
    depth = max(n_check + 2 * radius, 2 * (radius + INVERSE_RADIUS_BUDGET) + 1)
    lang = sub.language(depth)

    codes: list[SlidingBlockCode] = []
    inverses: list[SlidingBlockCode] = []
    for rule in _enumerate_candidates(lang, radius, d):
        code = SlidingBlockCode(sub.alphabet, sub.alphabet, radius, dict(rule))
        if not code_preserves_language(code, lang, lang, n_check):
            continue
        try:
            inv = _search_inverse(code, lang, lang)
            _check_roundtrip(code, inv, lang)
            _check_roundtrip(inv, code, lang)
        except (ValidationError, InternalCheckError):
            continue
        codes.append(code)
        inverses.append(inv)

    sample = _sample_fixed_prefix(sub, SHIFT_ID_WINDOW)
    ident_rule = {w: w[radius] for w in lang.blocks_of(2 * radius + 1)}
    ident_pos = next(
        (i for i, c in enumerate(codes) if dict(c.rule) == ident_rule), None
    )
    if ident_pos is None:
        raise InternalCheckError("identity code missing from the search result")
    # identity leads its shift class so the quotient identity is the real one
    reps: list[int] = [ident_pos]
    for i, code in enumerate(codes):
        if i == ident_pos:
            continue
        if not any(
            _equal_mod_shift(code, codes[r], sample, code.radius + codes[r].radius)
            is not None
            for r in reps
        ):
            reps.append(i)
    elements = tuple(codes[i] for i in reps)
    identity_index = 0

    table = []
    for i in reps:
        row = []
        for j in reps:
            comp = compose_codes(codes[i], codes[j], lang)
            hit = None
            for pos, r in enumerate(reps):
                k = _equal_mod_shift(
                    comp, codes[r], sample, comp.radius + codes[r].radius
                )
                if k is not None:
                    hit = pos
                    break
            if hit is None:
                raise InternalCheckError(
                    "composition left the searched set; radius too small"
                )
            row.append(hit)
        table.append(tuple(row))

    certificate = (
        f"complete at radius {radius}; language checked to depth {n_check}; "
        f"shift identification window {SHIFT_ID_WINDOW}"
    )
    return AutGroupReport(
        sub=sub,
        radius=radius,
        n_check=n_check,
        window=SHIFT_ID_WINDOW,
        codes=tuple(codes),
        inverses=tuple(inverses),
        elements=elements,
        table=tuple(table),
        identity_index=identity_index,
        certificate=certificate,
    )


def _element_orders(table: Sequence[Sequence[int]], identity: int) -> tuple[int, ...]:
    orders = []
    for g in range(len(table)):
        x, n = g, 1
        while x != identity:
            x = table[x][g]
            n += 1
            if n > len(table):
                raise InternalCheckError("element order exceeds group order")
        orders.append(n)
    return tuple(orders)


def _identify_group(
    table: Sequence[Sequence[int]], identity: int, orders: Sequence[int]
) -> str:
    n = len(table)
    if n == 1:
        return "trivial"
    if n > GROUP_NAME_BOUND:
        return f"group of order {n}"
    abelian = all(
        table[i][j] == table[j][i] for i in range(n) for j in range(i + 1, n)
    )
    if max(orders) == n:
        return f"Z/{n}"
    if abelian:
        if n == 4:
            return "Z/2 x Z/2"
        if n == 8:
            return "Z/4 x Z/2" if max(orders) == 4 else "Z/2 x Z/2 x Z/2"
        if n == 9:
            return "Z/3 x Z/3"
        if n == 12:
            return "Z/6 x Z/2"
        return f"abelian of order {n}"
    two = sum(1 for o in orders if o == 2)
    if n == 6:
        return "S3"
    if n == 8:
        return "D4" if two == 5 else "Q8"
    if n == 10:
        return "D5"
    if n == 12:
        return {3: "A4", 7: "D6", 1: "Dic3"}.get(two, "group of order 12")
    return f"group of order {n}"


def shift_quotient(report: AutGroupReport) -> QuotientGroup:
    """The found automorphisms modulo shift powers as an abstract group.

    Group axioms are machine-checked on the composition table before any
    name is assigned.
    """
    table = report.table
    n = len(table)
    e = report.identity_index
    for i in range(n):
        if table[e][i] != i or table[i][e] != i:
            raise InternalCheckError("identity axiom fails in quotient table")
    for i in range(n):
        if not any(table[i][j] == e and table[j][i] == e for j in range(n)):
            raise InternalCheckError(f"element {i} has no inverse in the quotient")
    for i, j, k in product(range(n), repeat=3):
        if table[table[i][j]][k] != table[i][table[j][k]]:
            raise InternalCheckError("associativity fails in quotient table")
    orders = _element_orders(table, e)
    name = _identify_group(table, e, orders)
    return QuotientGroup(
        order=n,
        table=table,
        identity=e,
        element_orders=orders,
        name=name,
        certificate=report.certificate,
    )


def _marginalize(
    table: Mapping[tuple[int, ...], Fraction], m: int
) -> dict[tuple[int, ...], Fraction]:
    out: dict[tuple[int, ...], Fraction] = {}
    for w, p in table.items():
        key = w[:m]
        out[key] = out.get(key, Fraction(0)) + p
    return out


def _total_variation(
    p: Mapping[tuple[int, ...], Fraction], q: Mapping[tuple[int, ...], Fraction]
) -> Fraction:
    keys = set(p) | set(q)
    return sum(
        (abs(p.get(k, Fraction(0)) - q.get(k, Fraction(0))) for k in keys),
        Fraction(0),
    ) / 2


def action_on_measures(
    code: SlidingBlockCode,
    freq_tables: Sequence[Mapping[tuple[int, ...], Fraction]],
    threshold: Fraction = Fraction(1, 10),
) -> MeasureActionReport:
    """Match each pushed-forward frequency table to its nearest input table.

    Tables assign frequencies to n-blocks for one common n and must each
    sum to 1.  The pushforward of an n-block table lives on (n-2r)-blocks,
    so the inputs are marginalized to that length before comparison.  A
    best match closer than `threshold` to the runner-up is refused.
    """
    if not freq_tables:
        raise ValidationError("need at least one frequency table")
    lengths = {len(w) for t in freq_tables for w in t}
    if len(lengths) != 1:
        raise ValidationError("tables must share one block length")
    n = lengths.pop()
    for t in freq_tables:
        if sum(t.values(), Fraction(0)) != 1:
            raise ValidationError("each table must sum to 1")
    m = n - 2 * code.radius
    if m < 1:
        raise ValidationError("block length too short for the code radius")

    pushed = []
    for t in freq_tables:
        img: dict[tuple[int, ...], Fraction] = {}
        for v, p in t.items():
            w = code.apply(v)
            img[w] = img.get(w, Fraction(0)) + p
        pushed.append(img)
    margins = [_marginalize(t, m) for t in freq_tables]

    distances = tuple(
        tuple(_total_variation(img, marg) for marg in margins) for img in pushed
    )
    perm = []
    margin: Fraction | None = None
    for i, row in enumerate(distances):
        best = min(range(len(row)), key=lambda j: row[j])
        if len(row) > 1:
            runner = min(row[j] for j in range(len(row)) if j != best)
            gap = runner - row[best]
            if gap < threshold:
                raise InternalCheckError(
                    f"measure match for table {i} ambiguous: margin {gap} "
                    f"below threshold {threshold}"
                )
            margin = gap if margin is None else min(margin, gap)
        perm.append(best)
    if sorted(perm) != list(range(len(freq_tables))):
        raise InternalCheckError("pushforward did not permute the tables")
    return MeasureActionReport(
        permutation=tuple(perm),
        distances=distances,
        margin=margin,
        block_length=n,
    )
