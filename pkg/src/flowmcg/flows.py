"""Return systems on cross sections, flow codes between them, and the
exact measure-scaling invariant.

A cross section of the shift is recoded on its return words; a flow code is
a conjugacy between two such recodings, carried as a sliding block code with
a verified inverse.  Everything downstream (restriction, composition, slope
profiles, the scaling factor mu(C)/mu(D)) works on that presentation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InternalCheckError, ResourceLimitError, ValidationError
from .numberfield import FieldElement, NumberField
from .pf import cylinder_measure, pf_data
from .substitution import Substitution, cycle_lengths, is_primitive
from .words import (
    Alphabet,
    CylinderSet,
    LanguageTable,
    SlidingBlockCode,
    Word,
    compose_codes,
)

DEFAULT_DEPTH = 12
INVERSE_RADIUS_BUDGET = 6
_REPETITIVITY_CAP = 4096


def _labels(count: int) -> Alphabet:
    if count <= 26:
        return Alphabet.of(chr(ord("A") + i) for i in range(count))
    return Alphabet.of(f"r{i}" for i in range(count))


@dataclass(frozen=True)
class ReturnSystem:
    """A cross section recoded on its return words.

    `base` is the cylinder defining the section, or None for the supertile
    section of the substitution itself (the image of the space under one
    application, which is clopen but not presented as a cylinder here).
    `weights` are the exact measures of the entry cylinders, one per return
    word, in the ambient invariant measure.
    """

    sub: Substitution
    base: CylinderSet | None
    base_word: tuple[int, ...] | None
    return_words: tuple[Word, ...]
    return_times: tuple[int, ...]
    alphabet: Alphabet
    weights: tuple[FieldElement, ...]
    base_measure: FieldElement
    field: NumberField
    recoded_sub: Substitution | None
    recoded_language: LanguageTable

    def __post_init__(self) -> None:
        if tuple(len(w) for w in self.return_words) != self.return_times:
            raise InternalCheckError("return times must equal return-word lengths")
        kac = self.field.zero()
        for w, t in zip(self.weights, self.return_times):
            kac = kac + self.field.scal(t, w)
        if kac != self.field.one():
            raise InternalCheckError("return-time expectation is not 1/measure")
        total = self.field.zero()
        for w in self.weights:
            total = total + w
        if total != self.base_measure:
            raise InternalCheckError("entry measures do not sum to the base measure")

    @property
    def size(self) -> int:
        return len(self.return_words)

    @property
    def is_whole_space(self) -> bool:
        return self.base is not None and self.base.is_whole_space


def _certified_return_words(
    sub: Substitution, w: tuple[int, ...], depth: int
) -> tuple[tuple[int, ...], ...]:
    """All return words of the cylinder [w], complete by construction.

    First a repetitivity bound R with every admissible R-block containing w
    is found; all gaps between consecutive occurrences inside admissible
    blocks of length R + 3|w| are then the full return-word set.  Order is
    fixed afterwards by first occurrence along a canonical fixed point.
    """
    k = len(w)
    r_bound = None
    n = max(2 * k, 2)
    while n <= _REPETITIVITY_CAP:
        lang = sub.language(n)
        if all(_contains(block, w) for block in lang.blocks_of(n)):
            r_bound = n
            break
        n *= 2
    if r_bound is None:
        raise ResourceLimitError("no repetitivity bound found for the base word")
    span = r_bound + 3 * k
    lang = sub.language(span)
    found: set[tuple[int, ...]] = set()
    for block in lang.blocks_of(span):
        occ = [i for i in range(len(block) - k + 1) if block[i : i + k] == w]
        for a, b in zip(occ, occ[1:]):
            found.add(block[a:b])
    if not found:
        raise InternalCheckError("base word never recurs in admissible blocks")

    order = _first_occurrence_order(sub, w, found, depth)
    return order


def _contains(block: tuple[int, ...], w: tuple[int, ...]) -> bool:
    k = len(w)
    return any(block[i : i + k] == w for i in range(len(block) - k + 1))


def _first_occurrence_order(
    sub: Substitution,
    w: tuple[int, ...],
    members: set[tuple[int, ...]],
    depth: int,
) -> tuple[tuple[int, ...], ...]:
    fl = sub.first_letter_map()
    cycles = cycle_lengths(fl)
    seed = min(cycles)
    powered = sub.power(cycles[seed])
    k = len(w)
    ordered: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    for d in range(2, depth + 30):
        prefix = powered.iterate_idx(seed, d)
        occ = [i for i in range(len(prefix) - k + 1) if prefix[i : i + k] == w]
        for a, b in zip(occ, occ[1:]):
            seg = prefix[a:b]
            if seg not in seen:
                if seg not in members:
                    raise InternalCheckError(
                        "fixed-point scan found a return word outside the "
                        "certified set"
                    )
                seen.add(seg)
                ordered.append(seg)
        if seen == members:
            return tuple(ordered)
        if len(prefix) > 200_000:
            break
    raise ResourceLimitError("fixed point did not exhibit every return word in depth")


def _recoded_language(
    sub: Substitution,
    w: tuple[int, ...],
    returns: Sequence[tuple[int, ...]],
    alphabet: Alphabet,
    n_target: int,
) -> LanguageTable:
    """Language of the induced system: decode ambient blocks at the cuts
    given by occurrences of the base word."""
    index = {r: i for i, r in enumerate(returns)}
    k = len(w)
    max_t = max(len(r) for r in returns)
    span = n_target * max_t + 2 * k + max_t
    lang = sub.language(span)
    bags: dict[int, set[tuple[int, ...]]] = {n: set() for n in range(1, n_target + 1)}
    for block in lang.blocks_of(span):
        occ = [i for i in range(len(block) - k + 1) if block[i : i + k] == w]
        seq = []
        for a, b in zip(occ, occ[1:]):
            seg = block[a:b]
            if seg not in index:
                raise InternalCheckError("decoded segment is not a return word")
            seq.append(index[seg])
        t = tuple(seq)
        for n in range(1, n_target + 1):
            for i in range(len(t) - n + 1):
                bags[n].add(t[i : i + n])
    for n in range(1, n_target + 1):
        if not bags[n]:
            raise ResourceLimitError(
                f"induced language empty at length {n}; span too short"
            )
    return LanguageTable(alphabet, {n: frozenset(b) for n, b in bags.items()}, n_target)


def induce(
    sub: Substitution, section, depth: int = DEFAULT_DEPTH
) -> ReturnSystem:
    """The return system of a cross section: return words in order of first
    occurrence, exact entry measures, and the recoded language.

    The section may be a CylinderSet (whole space or a single cylinder), a
    word over the alphabet, or "" for the whole space.  The offset of a
    cylinder does not change the recoded system and is ignored.
    """
    if not is_primitive(sub):
        raise ValidationError("substitution must be primitive")
    data = pf_data(sub)
    field = data.field

    word = _section_word(sub, section)
    if word is None:
        letters = tuple(Word(sub.alphabet, (a,)) for a in range(sub.size))
        return ReturnSystem(
            sub=sub,
            base=CylinderSet.whole_space(sub.alphabet),
            base_word=None,
            return_words=letters,
            return_times=tuple(1 for _ in letters),
            alphabet=sub.alphabet,
            weights=data.left,
            base_measure=field.one(),
            field=field,
            recoded_sub=sub,
            recoded_language=sub.language(max(2 * depth, 8)),
        )

    if not sub.language(len(word)).admissible(word):
        raise ValidationError("section word is not admissible")
    returns = _certified_return_words(sub, word, depth)
    alphabet = _labels(len(returns))
    weights = tuple(
        cylinder_measure(sub, r + word) for r in returns
    )
    base_measure = cylinder_measure(sub, word)
    recoded_sub = _try_recoded_sub(sub, word, returns, alphabet)
    recoded_language = _recoded_language(sub, word, returns, alphabet, max(depth, 8))
    return ReturnSystem(
        sub=sub,
        base=CylinderSet.single(Word(sub.alphabet, word)),
        base_word=word,
        return_words=tuple(Word(sub.alphabet, r) for r in returns),
        return_times=tuple(len(r) for r in returns),
        alphabet=alphabet,
        weights=weights,
        base_measure=base_measure,
        field=field,
        recoded_sub=recoded_sub,
        recoded_language=recoded_language,
    )


def _section_word(sub: Substitution, section) -> tuple[int, ...] | None:
    if section is None:
        return None
    if isinstance(section, CylinderSet):
        if section.is_whole_space:
            return None
        if len(section.cylinders) != 1:
            raise ValidationError("sections must be the whole space or one cylinder")
        return section.cylinders[0].word.idx
    if isinstance(section, Word):
        return section.idx
    if isinstance(section, str):
        if section == "":
            return None
        return Word.parse(sub.alphabet, section).idx
    return tuple(int(a) for a in section)


def _try_recoded_sub(
    sub: Substitution,
    word: tuple[int, ...],
    returns: Sequence[tuple[int, ...]],
    alphabet: Alphabet,
) -> Substitution | None:
    """The induced system of a one-letter section fixed by the first-letter
    map is itself substitutive; other sections keep only a language table."""
    if len(word) != 1:
        return None
    letter = word[0]
    if sub.first_letter_map()[letter] != letter:
        return None
    index = {tuple(r): i for i, r in enumerate(returns)}
    images = []
    for r in returns:
        image = sub.apply_idx(r)
        occ = [i for i, a in enumerate(image) if a == letter]
        if not occ or occ[0] != 0:
            return None
        pieces = [tuple(image[a:b]) for a, b in zip(occ, occ[1:])]
        pieces.append(tuple(image[occ[-1]:]))
        try:
            code = tuple(index[p] for p in pieces)
        except KeyError:
            return None
        images.append(Word(alphabet, code))
    return Substitution(alphabet, tuple(images))


def supertile_section(sub: Substitution) -> ReturnSystem:
    """The image of the space under one application of the substitution,
    as an abstract cross section: one return word per letter, namely its
    image, with return time its length."""
    if not is_primitive(sub):
        raise ValidationError("substitution must be primitive")
    data = pf_data(sub)
    field = data.field
    lam_inv = field.inv(field.generator())
    weights = tuple(u * lam_inv for u in data.left)
    base_measure = field.zero()
    for w in weights:
        base_measure = base_measure + w
    return ReturnSystem(
        sub=sub,
        base=None,
        base_word=None,
        return_words=tuple(sub.images),
        return_times=tuple(len(sub.images[a]) for a in range(sub.size)),
        alphabet=sub.alphabet,
        weights=weights,
        base_measure=base_measure,
        field=field,
        recoded_sub=sub,
        recoded_language=sub.language(8),
    )


@dataclass(frozen=True)
class FlowCode:
    """A conjugacy between two recoded cross sections, with verified
    inverse.  Validation is bounded: `verified_depth` records how far the
    language checks ran; it is a certificate depth, not a proof."""

    kind: str
    sub: Substitution
    source: ReturnSystem
    target: ReturnSystem
    conjugacy: SlidingBlockCode
    inverse: SlidingBlockCode
    verified_depth: int

    @property
    def code(self) -> SlidingBlockCode:
        return self.conjugacy


def _search_inverse(
    code: SlidingBlockCode,
    domain: LanguageTable,
    codomain: LanguageTable,
    budget: int = INVERSE_RADIUS_BUDGET,
) -> SlidingBlockCode:
    r = code.radius
    witness = None
    for rho in range(budget + 1):
        width = 2 * rho + 1 + 2 * r
        if width > domain.n_max:
            break
        rule: dict[tuple[int, ...], int] = {}
        ok = True
        for u in domain.blocks_of(width):
            v = code.apply(u)
            c = u[r + rho]
            prev = rule.get(v)
            if prev is None:
                rule[v] = c
            elif prev != c:
                witness = v
                ok = False
                break
        if not ok:
            continue
        if 2 * rho + 1 <= codomain.n_max:
            missing = [
                v for v in codomain.blocks_of(2 * rho + 1) if v not in rule
            ]
            if missing:
                raise ValidationError(
                    f"code misses the target block {missing[0]}; not onto"
                )
        return SlidingBlockCode(code.out_alphabet, code.in_alphabet, rho, rule)
    raise ValidationError(
        f"no inverse code within radius {budget}; ambiguous block {witness}"
    )


def _check_roundtrip(
    fwd: SlidingBlockCode,
    inv: SlidingBlockCode,
    domain: LanguageTable,
) -> None:
    width = 2 * (fwd.radius + inv.radius) + 1
    if width > domain.n_max:
        raise ValidationError(
            f"roundtrip check needs language depth {width}; rebuild the "
            "section with a larger depth"
        )
    composite = compose_codes(inv, fwd, domain)
    for win, out in composite.rule.items():
        if out != win[composite.radius]:
            raise InternalCheckError(
                f"inverse does not undo the code on window {win}"
            )


def make_flow_code(
    code: SlidingBlockCode,
    source: ReturnSystem,
    target: ReturnSystem,
    depth: int = DEFAULT_DEPTH,
    kind: str = "generic",
) -> FlowCode:
    """Validate a sliding block code as a conjugacy of recoded sections.

    Checks, to the given depth: the code maps the source language into the
    target language, an inverse code exists within the radius budget, the
    inverse maps back, and both roundtrips are the identity on admissible
    windows.  Failures carry a witness block.
    """
    if code.in_alphabet != source.alphabet:
        raise ValidationError("code input alphabet differs from the source section")
    if code.out_alphabet != target.alphabet:
        raise ValidationError("code output alphabet differs from the target section")
    dom = source.recoded_language
    cod = target.recoded_language
    n_fwd = min(depth, dom.n_max - 2 * code.radius, cod.n_max)
    if n_fwd < 1:
        raise ValidationError("source language too shallow for the code radius")
    bad = _preserves(code, dom, cod, n_fwd)
    if bad is not None:
        raise ValidationError(
            f"code image leaves the target language within depth {n_fwd}; "
            f"witness block {bad}"
        )
    inverse = _search_inverse(code, dom, cod)
    n_bwd = min(depth, cod.n_max - 2 * inverse.radius, dom.n_max)
    if n_bwd >= 1:
        bad = _preserves(inverse, cod, dom, n_bwd)
        if bad is not None:
            raise ValidationError(
                f"inverse image leaves the source language within depth "
                f"{n_bwd}; witness block {bad}"
            )
    _check_roundtrip(code, inverse, dom)
    _check_roundtrip(inverse, code, cod)
    return FlowCode(
        kind=kind,
        sub=source.sub,
        source=source,
        target=target,
        conjugacy=code,
        inverse=inverse,
        verified_depth=min(n_fwd, n_bwd if n_bwd >= 1 else n_fwd),
    )


def _preserves(
    code: SlidingBlockCode, dom: LanguageTable, cod: LanguageTable, n_max: int
) -> tuple[int, ...] | None:
    """None when every image block stays admissible, else a witness block."""
    r = code.radius
    for n in range(1, n_max + 1):
        for w in dom.blocks_of(n + 2 * r):
            try:
                img = code.apply(w)
            except ValidationError:
                return w
            if len(img) and not cod.admissible(img):
                return w
    return None


def identity_code(sub: Substitution, depth: int = DEFAULT_DEPTH) -> FlowCode:
    sys0 = induce(sub, None, depth)
    code = SlidingBlockCode(
        sub.alphabet, sub.alphabet, 0, {(a,): a for a in range(sub.size)}
    )
    return make_flow_code(code, sys0, sys0, depth, kind="identity")


def automorphism_code(
    sub: Substitution, code: SlidingBlockCode, depth: int = DEFAULT_DEPTH
) -> FlowCode:
    """Wrap a shift automorphism (given as a block code on letters) as a
    flow code from the space to itself."""
    sys0 = induce(sub, None, depth)
    return make_flow_code(code, sys0, sys0, depth, kind="automorphism")


def substitution_code(sub: Substitution) -> FlowCode:
    """The canonical flow code of the substitution itself: the space,
    recoded on letters, against its supertile section, recoded on image
    tiles.  The conjugacy is the letter-to-tile relabeling, exact by
    construction."""
    source = induce(sub, None)
    target = supertile_section(sub)
    relabel = SlidingBlockCode(
        sub.alphabet, sub.alphabet, 0, {(a,): a for a in range(sub.size)}
    )
    return FlowCode(
        kind="substitution",
        sub=sub,
        source=source,
        target=target,
        conjugacy=relabel,
        inverse=relabel,
        verified_depth=0,
    )


def r_mu(fc: FlowCode) -> FieldElement:
    """The measure-scaling factor mu(source base)/mu(target base), exact."""
    return fc.source.base_measure / fc.target.base_measure


def restrict_flow_code(fc: FlowCode, section) -> FlowCode:
    """Restrict a flow code to a smaller cross section inside its source.

    The section must be a cylinder contained in the source base (equal base
    returns the code unchanged).  Radius-0 conjugacies restrict exactly:
    visits to the small section correspond letterwise, so each new return
    word maps to a single return word on the image side.
    """
    word = _section_word(fc.sub, section)
    if word == fc.source.base_word or (word is None and fc.source.base_word is None):
        return fc
    if word is None:
        raise ValidationError("restriction target must be a proper sub-section")
    if fc.source.base_word is not None:
        k = len(fc.source.base_word)
        if word[:k] != fc.source.base_word:
            raise ValidationError("section does not sit inside the source base")

    if fc.kind == "substitution":
        return _restrict_substitution_code(fc, word)
    if fc.conjugacy.radius != 0:
        raise ValidationError(
            "restriction implemented for radius-0 conjugacies only"
        )
    return _restrict_radius0(fc, word)


def _ambient_word(
    system: ReturnSystem, recoded: tuple[int, ...], close: bool
) -> tuple[int, ...]:
    """Spell a recoded word in ambient letters; `close` appends the base
    word, turning a visit sequence into the ambient cylinder that asserts
    the final visit."""
    out: list[int] = []
    for v in recoded:
        out.extend(system.return_words[v].idx)
    if close and system.base_word is not None:
        out.extend(system.base_word)
    return tuple(out)


def _restrict_radius0(fc: FlowCode, word: tuple[int, ...]) -> FlowCode:
    sub = fc.sub
    if not fc.source.is_whole_space:
        raise ValidationError(
            "restriction of an already-induced code is not supported"
        )
    if fc.target.base is None:
        raise ValidationError("cannot restrict onto an abstract section")
    # the source is recoded on letters, so the section word is ambient;
    # the image section is spelled out ambiently so its measures stay in
    # the transverse measure of the common flow
    sys_e = induce(sub, word)
    image_recoded = fc.conjugacy.apply(word)
    sys_f = induce(fc.target.sub, _ambient_word(fc.target, image_recoded, close=True))
    if sys_e.size != sys_f.size:
        raise InternalCheckError("restricted sections disagree on return counts")
    f_index = {w.idx: i for i, w in enumerate(sys_f.return_words)}
    rule = {}
    for i, r in enumerate(sys_e.return_words):
        img = _ambient_word(fc.target, fc.conjugacy.apply(r.idx), close=False)
        j = f_index.get(img)
        if j is None:
            raise InternalCheckError("image of a return word is not a return word")
        rule[(i,)] = j
    if len(set(rule.values())) != sys_f.size:
        raise InternalCheckError("return words of the image section not all hit")
    code = SlidingBlockCode(sys_e.alphabet, sys_f.alphabet, 0, rule)
    return make_flow_code(code, sys_e, sys_f, kind=fc.kind)


def _restrict_substitution_code(fc: FlowCode, word: tuple[int, ...]) -> FlowCode:
    """Restricting the canonical substitution code to a cylinder [w]: the
    image section is the substituted copy of [w] inside the supertile
    section; return words map to their images and measures scale by the
    expansion."""
    sub = fc.sub
    sys_e = induce(sub, word)
    field = sys_e.field
    lam_inv = field.inv(field.generator())
    image_returns = tuple(
        Word(sub.alphabet, sub.apply_idx(r.idx)) for r in sys_e.return_words
    )
    weights = tuple(w * lam_inv for w in sys_e.weights)
    base_measure = sys_e.base_measure * lam_inv
    target = ReturnSystem(
        sub=sub,
        base=None,
        base_word=None,
        return_words=image_returns,
        return_times=tuple(len(r) for r in image_returns),
        alphabet=sys_e.alphabet,
        weights=weights,
        base_measure=base_measure,
        field=field,
        recoded_sub=sys_e.recoded_sub,
        recoded_language=sys_e.recoded_language,
    )
    relabel = SlidingBlockCode(
        sys_e.alphabet, sys_e.alphabet, 0, {(i,): i for i in range(sys_e.size)}
    )
    return FlowCode(
        kind="substitution",
        sub=sub,
        source=sys_e,
        target=target,
        conjugacy=relabel,
        inverse=relabel,
        verified_depth=0,
    )


def compose_flow_codes(fc1: FlowCode, fc2: FlowCode, depth: int = DEFAULT_DEPTH) -> FlowCode:
    """The flow code applying fc1 and then fc2.

    Supported: matching middle sections (spliced block codes), two canonical
    substitution codes (their composite substitution), and radius-0
    automorphisms against substitution codes (absorbed into the rules).
    """
    if fc1.kind == "identity":
        return fc2
    if fc2.kind == "identity":
        return fc1
    if fc1.kind == "substitution" and fc2.kind == "substitution":
        if fc1.sub.alphabet != fc2.sub.alphabet:
            raise ValidationError("substitution codes over different alphabets")
        return substitution_code(fc2.sub.compose(fc1.sub))
    if fc1.kind == "automorphism" and fc2.kind == "automorphism":
        middle_ok = (
            fc1.target.base_word == fc2.source.base_word
            and fc1.target.alphabet == fc2.source.alphabet
        )
        if not middle_ok:
            raise ValidationError("automorphism codes with mismatched sections")
        composite = compose_codes(fc2.conjugacy, fc1.conjugacy, fc1.source.recoded_language)
        return make_flow_code(
            composite, fc1.source, fc2.target, depth, kind="automorphism"
        )
    pair = {fc1.kind, fc2.kind}
    if pair == {"automorphism", "substitution"}:
        aut, tilde = (fc1, fc2) if fc1.kind == "automorphism" else (fc2, fc1)
        if aut.conjugacy.radius != 0:
            raise ValidationError(
                "only radius-0 automorphisms compose with substitution codes"
            )
        perm = {
            w[0]: out for w, out in aut.conjugacy.rule.items()
        }
        sub = tilde.sub
        if fc1.kind == "substitution":
            # substitute, then permute symbols: letter a -> perm(xi(a))
            images = tuple(
                Word(sub.alphabet, tuple(perm[x] for x in sub.images[a].idx))
                for a in range(sub.size)
            )
        else:
            # permute, then substitute: letter a -> xi(perm(a))
            images = tuple(
                Word(sub.alphabet, sub.images[perm[a]].idx) for a in range(sub.size)
            )
        return substitution_code(Substitution(sub.alphabet, images))
    if (
        fc1.target.base_word == fc2.source.base_word
        and fc1.target.alphabet == fc2.source.alphabet
        and fc1.target.base is not None
        and fc2.source.base is not None
    ):
        composite = compose_codes(
            fc2.conjugacy, fc1.conjugacy, fc1.source.recoded_language
        )
        return make_flow_code(composite, fc1.source, fc2.target, depth, kind="generic")
    raise ValidationError(
        f"composition of kinds {fc1.kind!r} and {fc2.kind!r} with these "
        "sections is not supported"
    )


@dataclass(frozen=True)
class CocycleProfile:
    """Per-step slopes of the orbit-equivalence cocycle along one orbit:
    the ratio of the landing return time to the departing return time."""

    slopes: tuple[tuple[int, Fraction], ...]

    def __post_init__(self) -> None:
        for _, s in self.slopes:
            if s <= 0:
                raise InternalCheckError("cocycle slopes must be positive")

    def arithmetic_mean(self) -> Fraction:
        vals = [s for _, s in self.slopes]
        return sum(vals, Fraction(0)) / len(vals)

    def geometric_mean(self) -> float:
        prod = 1.0
        for _, s in self.slopes:
            prod *= float(s)
        return prod ** (1.0 / len(self.slopes))


def cocycle_slopes(fc: FlowCode, x0=None, k_range=range(0, 24)) -> CocycleProfile:
    """Exact slope profile of fc along an orbit of the recoded source.

    `x0` is a word over the source's recoded alphabet giving enough of the
    orbit; by default a fixed-point presentation of the recoded substitution
    is used.  Negative indices in `k_range` need a two-sided presentation
    and are only available for the default.
    """
    ks = sorted(k_range)
    if not ks:
        raise ValidationError("empty index range")
    if fc.conjugacy.radius != 0:
        raise ValidationError("slope profiles implemented for radius-0 codes")
    rule = {w[0]: out for w, out in fc.conjugacy.rule.items()}
    t_src = fc.source.return_times
    t_tgt = fc.target.return_times
    if x0 is not None:
        seq = _as_recoded_sequence(fc.source, x0)
        if ks[0] < 0:
            raise ValidationError("explicit presentations support k >= 0 only")
        if ks[-1] >= len(seq):
            raise ValidationError("presentation too short for the index range")
        get = seq.__getitem__
    else:
        rec = fc.source.recoded_sub
        if rec is None:
            raise ValidationError("no recoded substitution; pass a presentation")
        get = _two_sided_point(rec, ks[0], ks[-1])
    out = []
    for k in ks:
        a = get(k)
        slope = Fraction(t_tgt[rule[a]], t_src[a])
        out.append((k, slope))
    return CocycleProfile(tuple(out))


def _as_recoded_sequence(system: ReturnSystem, x0) -> tuple[int, ...]:
    if isinstance(x0, Word):
        if x0.alphabet != system.alphabet:
            raise ValidationError("presentation is over the wrong alphabet")
        return x0.idx
    if isinstance(x0, str):
        return Word.parse(system.alphabet, x0).idx
    return tuple(int(a) for a in x0)


def _two_sided_point(sub: Substitution, k_lo: int, k_hi: int):
    """Coordinate access for a substitution-periodic two-sided point with a
    legal seed pair around the origin."""
    from .substitution import left_fixed_suffix, right_fixed_prefix

    fl = sub.first_letter_map()
    ll = sub.last_letter_map()
    fl_cycles = cycle_lengths(fl)
    ll_cycles = cycle_lengths(ll)
    lang2 = sub.language(2)
    seed = None
    for b in sorted(fl_cycles):
        for a in sorted(ll_cycles):
            k = fl_cycles[b] * ll_cycles[a]
            powered = sub.power(k)
            if powered.first_letter_map()[b] != b or powered.last_letter_map()[a] != a:
                continue
            if lang2.admissible((a, b)):
                seed = (a, b, powered)
                break
        if seed:
            break
    if seed is None:
        raise InternalCheckError("no admissible periodic seed pair")
    a, b, powered = seed
    need_right = max(1, k_hi + 1)
    need_left = max(1, -k_lo + 1)
    right = right_fixed_prefix(powered, b, need_right)
    left = left_fixed_suffix(powered, a, need_left)

    def get(k: int) -> int:
        if k >= 0:
            return right[k]
        return left[len(left) + k]

    return get


def lambda_relation_search(
    alpha: FieldElement, p_max: int = 6, q_max: int = 12
) -> tuple[int, int] | None:
    """Smallest exact relation alpha^p = lam^q with p >= 1 and |q| <= q_max
    (q may be negative for contracting factors), or None."""
    field = alpha.field
    if alpha.sign() <= 0:
        raise ValidationError("relation search needs a positive element")
    lam = field.generator()
    lam_inv = field.inv(lam)
    for p in range(1, p_max + 1):
        ap = field.power(alpha, p)
        for q_abs in range(0, q_max + 1):
            for q in ((q_abs,) if q_abs == 0 else (q_abs, -q_abs)):
                base = lam if q >= 0 else lam_inv
                if ap == field.power(base, abs(q)):
                    return (p, q)
    return None
