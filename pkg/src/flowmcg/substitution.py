"""Substitutions on finite alphabets and the languages they generate."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import ResourceLimitError, ValidationError
from .words import Alphabet, LanguageTable, Word, windows

# total symbols a language-generation run may materialize
DEFAULT_SYMBOL_BUDGET = 2_000_000


@dataclass(frozen=True)
class Substitution:
    """A map letter -> nonempty word, extended to words by concatenation."""

    alphabet: Alphabet
    images: tuple[Word, ...]

    def __post_init__(self) -> None:
        if len(self.images) != len(self.alphabet):
            raise ValidationError("one image word required per letter")
        for w in self.images:
            if w.alphabet != self.alphabet:
                raise ValidationError("image words must live over the same alphabet")
            if len(w) == 0:
                raise ValidationError("image words must be nonempty")
        object.__setattr__(self, "_lang_cache", {})
        object.__setattr__(self, "_iter_cache", {})

    @classmethod
    def from_rules(cls, rules: Mapping[str, str | Sequence[str]],
                   alphabet: Sequence[str] | None = None) -> "Substitution":
        if alphabet is None:
            alphabet = sorted(rules.keys())
        alph = Alphabet.of(alphabet)
        missing = [s for s in alph if s not in rules]
        if missing:
            raise ValidationError(f"no image given for letters {missing}")
        images = tuple(Word.parse(alph, rules[s]) for s in alph)
        return cls(alph, images)

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Substitution":
        try:
            alphabet = data["alphabet"]
            rules = data["rules"]
        except (KeyError, TypeError):
            raise ValidationError('expected {"alphabet": [...], "rules": {...}}')
        return cls.from_rules(rules, alphabet)

    def to_json_dict(self) -> dict:
        return {
            "alphabet": list(self.alphabet.symbols),
            "rules": {s: self.images[i].text for i, s in enumerate(self.alphabet.symbols)},
        }

    @property
    def size(self) -> int:
        return len(self.alphabet)

    def image_idx(self, letter: int) -> tuple[int, ...]:
        return self.images[letter].idx

    def apply_idx(self, seq: Sequence[int]) -> tuple[int, ...]:
        out: list[int] = []
        for a in seq:
            out.extend(self.images[a].idx)
        return tuple(out)

    def apply(self, w: Word) -> Word:
        if w.alphabet != self.alphabet:
            raise ValidationError("word alphabet mismatch")
        return Word(self.alphabet, self.apply_idx(w.idx))

    def iterate_idx(self, letter: int, k: int) -> tuple[int, ...]:
        """Image of a letter under the k-th power, memoized."""
        cache: dict = self._iter_cache  # type: ignore[attr-defined]
        if k == 0:
            return (letter,)
        key = (letter, k)
        if key not in cache:
            prev = self.iterate_idx(letter, k - 1)
            cache[key] = self.apply_idx(prev)
        return cache[key]

    def power(self, k: int) -> "Substitution":
        if k < 1:
            raise ValidationError("power must be >= 1")
        images = tuple(
            Word(self.alphabet, self.iterate_idx(a, k)) for a in range(self.size)
        )
        return Substitution(self.alphabet, images)

    def compose(self, other: "Substitution") -> "Substitution":
        """self after other: letter -> self(other(letter))."""
        if other.alphabet != self.alphabet:
            raise ValidationError("alphabet mismatch")
        images = tuple(
            Word(self.alphabet, self.apply_idx(other.images[a].idx))
            for a in range(self.size)
        )
        return Substitution(self.alphabet, images)

    def first_letter_map(self) -> tuple[int, ...]:
        return tuple(self.images[a].idx[0] for a in range(self.size))

    def last_letter_map(self) -> tuple[int, ...]:
        return tuple(self.images[a].idx[-1] for a in range(self.size))

    def is_left_proper(self) -> bool:
        return len(set(self.first_letter_map())) == 1

    def is_right_proper(self) -> bool:
        return len(set(self.last_letter_map())) == 1

    def language(self, n_max: int, symbol_budget: int = DEFAULT_SYMBOL_BUDGET) -> LanguageTable:
        """Language table to n_max, cached; larger tables subsume smaller."""
        cache: dict = self._lang_cache  # type: ignore[attr-defined]
        best = cache.get("table")
        if best is None or best.n_max < n_max:
            best = generate_language(self, n_max, symbol_budget)
            cache["table"] = best
        if best.n_max == n_max:
            return best
        trimmed = {n: best.blocks[n] for n in range(1, n_max + 1)}
        return LanguageTable(self.alphabet, trimmed, n_max)


def incidence_matrix(sub: Substitution) -> tuple[tuple[int, ...], ...]:
    """Row i, column j: occurrences of letter j in the image of letter i."""
    d = sub.size
    rows = []
    for i in range(d):
        counts = [0] * d
        for a in sub.images[i].idx:
            counts[a] += 1
        rows.append(tuple(counts))
    return tuple(rows)


def abelianization(sub: Substitution, seq: Sequence[int]) -> tuple[int, ...]:
    counts = [0] * sub.size
    for a in seq:
        counts[a] += 1
    return tuple(counts)


def is_primitive(sub: Substitution) -> bool:
    """Some power of the incidence matrix is strictly positive.

    Boolean powers up to the Wielandt bound d^2 - 2d + 2 decide this.
    """
    d = sub.size
    m = [[bool(x) for x in row] for row in incidence_matrix(sub)]
    if d == 1:
        return True
    bound = d * d - 2 * d + 2
    acc = m
    for _ in range(bound):
        if all(all(row) for row in acc):
            return True
        acc = [
            [any(acc[i][k] and m[k][j] for k in range(d)) for j in range(d)]
            for i in range(d)
        ]
    return all(all(row) for row in acc)


def generate_language(
    sub: Substitution, n_max: int, symbol_budget: int = DEFAULT_SYMBOL_BUDGET
) -> LanguageTable:
    """Blocks of length <= n_max occurring in images of letters under powers.

    Iterates the full image words of every letter and stops once the block
    sets repeat with all images at least n_max long. For primitive
    substitutions this is the language of the subshift.
    """
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    d = sub.size
    words: list[tuple[int, ...]] = [(a,) for a in range(d)]
    prev: dict[int, frozenset[tuple[int, ...]]] | None = None
    spent = 0
    while True:
        words = [sub.apply_idx(w) for w in words]
        spent += sum(len(w) for w in words)
        if spent > symbol_budget:
            raise ResourceLimitError(
                f"language generation exceeded budget of {symbol_budget} symbols"
            )
        cur: dict[int, frozenset[tuple[int, ...]]] = {}
        for n in range(1, n_max + 1):
            bag: set[tuple[int, ...]] = set()
            for w in words:
                bag.update(windows(w, n))
            cur[n] = frozenset(bag)
        if prev == cur and min(len(w) for w in words) >= n_max:
            return LanguageTable(sub.alphabet, cur, n_max)
        prev = cur


def complexity(sub: Substitution, n: int) -> int:
    return sub.language(n).complexity(n)


@dataclass(frozen=True)
class PeriodicityVerdict:
    periodic: bool
    window: int
    period: int | None = None
    periodic_word: Word | None = None


def is_aperiodic(sub: Substitution, n_check: int = 50) -> PeriodicityVerdict:
    """Complexity screen: p(n) <= n for some n <= n_check forces periodicity.

    A periodic verdict exhibits a word w with the subshift equal to the orbit
    closure of w repeated. An aperiodic verdict is certified to the window.
    """
    if not is_primitive(sub):
        raise ValidationError("aperiodicity check expects a primitive substitution")
    lang = sub.language(max(2, n_check))
    for n in range(1, n_check + 1):
        if lang.complexity(n) <= n:
            q = lang.complexity(n)
            # p is nondecreasing and p(q) = p(q+1) = q here; period is q
            lang_q = sub.language(2 * q)
            for w in sorted(lang_q.blocks_of(q)):
                if lang_q.admissible(w + w):
                    return PeriodicityVerdict(
                        periodic=True,
                        window=n_check,
                        period=q,
                        periodic_word=Word(sub.alphabet, w),
                    )
            raise ValidationError("complexity bound hit but no periodic word found")
    return PeriodicityVerdict(periodic=False, window=n_check)


def right_fixed_letters(sub: Substitution) -> list[int]:
    """Letters a with the image of a starting with a: seeds of one-sided
    fixed points to the right under some power (here power 1)."""
    return [a for a in range(sub.size) if sub.images[a].idx[0] == a]


def left_fixed_letters(sub: Substitution) -> list[int]:
    return [a for a in range(sub.size) if sub.images[a].idx[-1] == a]


def right_fixed_prefix(sub: Substitution, seed: int, length: int) -> tuple[int, ...]:
    """Prefix of the one-sided fixed point grown from a right seed."""
    if sub.images[seed].idx[0] != seed:
        raise ValidationError("seed letter does not start its own image")
    w: tuple[int, ...] = (seed,)
    while len(w) < length:
        nxt = sub.apply_idx(w)
        if len(nxt) == len(w):
            raise ValidationError("seed does not grow; substitution not expanding here")
        w = nxt
    return w[:length]


def left_fixed_suffix(sub: Substitution, seed: int, length: int) -> tuple[int, ...]:
    """Suffix of the one-sided fixed point grown from a left seed."""
    if sub.images[seed].idx[-1] != seed:
        raise ValidationError("seed letter does not end its own image")
    w: tuple[int, ...] = (seed,)
    while len(w) < length:
        nxt = sub.apply_idx(w)
        if len(nxt) == len(w):
            raise ValidationError("seed does not grow; substitution not expanding here")
        w = nxt
    return w[-length:]


def cycle_lengths(f: tuple[int, ...]) -> dict[int, int]:
    """For each element on a cycle of the map i -> f(i), its cycle length."""
    d = len(f)
    out: dict[int, int] = {}
    for start in range(d):
        seen: dict[int, int] = {}
        cur = start
        step = 0
        while cur not in seen:
            seen[cur] = step
            cur = f[cur]
            step += 1
        # cur closed a loop; the loop members are those from seen[cur] on
        loop_len = step - seen[cur]
        cur2 = cur
        for _ in range(loop_len):
            out.setdefault(cur2, loop_len)
            cur2 = f[cur2]
    return out
