"""Top-level structure reports: the scaling part and finite part of the
flow mapping group of a substitution shift, plus the closed-form families
(Sturmian shifts, odometers, and the two-measure hierarchical words).

Everything here orchestrates the computational modules; no new invariants
are computed, only assembled, cross-checked, and serialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, gcd, isqrt

import sympy

from .asymptotics import AsymptoticClassSet, action_on_classes, asymptotic_classes
from .automorphisms import (
    AutGroupReport,
    QuotientGroup,
    search_automorphisms,
    shift_quotient,
)
from .coinvariants import infinitesimal_rank
from .errors import InternalCheckError, ValidationError
from .flows import lambda_relation_search, r_mu, substitution_code
from .numberfield import AlgebraicNumber, same_real_algebraic
from .pf import BalanceVerdict, cr_check, is_pisot, pf_data
from .substitution import Substitution, is_aperiodic, is_primitive


def algebraic_to_json(a: AlgebraicNumber) -> dict:
    """Exact serialization: ascending minimal polynomial, an isolating
    interval as fraction strings, and a float approximation for display."""
    narrow = a.refined(Fraction(1, 10**12))
    mid = (narrow.lo + narrow.hi) / 2
    return {
        "minpoly": list(a.minpoly),
        "interval": [str(narrow.lo), str(narrow.hi)],
        "approx": f"{float(mid):.12g}",
    }


@dataclass(frozen=True)
class ZPart:
    """Image of the scaling homomorphism: infinite cyclic, with the
    canonical substitution code mapping to the expansion factor."""

    r_mu_value: AlgebraicNumber
    relation: tuple[int, int] | None
    proper_power: bool | None
    note: str


@dataclass(frozen=True)
class FinitePart:
    class_count: int
    bound: int
    action: tuple[int, ...]
    action_trivial: bool
    group: QuotientGroup | None
    aut_report: AutGroupReport | None
    description: str | None


@dataclass(frozen=True)
class McgReport:
    sub: Substitution
    lam: AlgebraicNumber
    cr: BalanceVerdict
    pisot: bool
    z_part: ZPart
    finite_part: FinitePart
    caveats: tuple[str, ...]

    def to_json_dict(self) -> dict:
        fp = self.finite_part
        out = {
            "lambda": algebraic_to_json(self.lam),
            "cr": self.cr.verdict,
            "pisot": self.pisot,
            "mcg": {
                "finite_part": fp.group.name if fp.group else None,
                "z_part": "Z",
                "product": "direct" if fp.action_trivial else "semidirect",
            },
            "z_part": {
                "r_mu": algebraic_to_json(self.z_part.r_mu_value),
                "relation": list(self.z_part.relation)
                if self.z_part.relation
                else None,
                "proper_power": self.z_part.proper_power,
                "note": self.z_part.note,
            },
            "finite_part": {
                "class_count": fp.class_count,
                "bound": fp.bound,
                "action_on_classes": list(fp.action),
                "action_trivial": fp.action_trivial,
                "group": fp.group.name if fp.group else None,
                "group_order": fp.group.order if fp.group else None,
                "description": fp.description,
            },
            "caveats": list(self.caveats),
        }
        return out


def _is_proper_power(n: int) -> bool:
    for j in range(2, n.bit_length() + 1):
        m = round(n ** (1.0 / j))
        for c in (m - 1, m, m + 1):
            if c >= 2 and c**j == n:
                return True
    return False


def assemble_mcg(
    sub: Substitution, aut_radius: int = 1, aut_depth: int = 12
) -> McgReport:
    """Full structure report for the flow mapping group of the shift.

    The scaling part records the expansion factor as the value of the
    canonical self-similarity code, cross-checked exactly.  The finite part
    bounds the leaf-permutation group by (class count)! and, when the
    balance check certifies the embedding, identifies it with the
    automorphism quotient found at the given radius.
    """
    if not is_primitive(sub):
        raise ValidationError("substitution must be primitive")
    if is_aperiodic(sub).periodic:
        raise ValidationError("shift is periodic; no report")
    caveats: list[str] = []

    data = pf_data(sub)
    cr = cr_check(sub)
    pisot = is_pisot(sub)
    if not cr.is_balanced and pisot:
        caveats.append(
            "balance check inconclusive but the expansion is Pisot, which "
            "forces the balanced property"
        )

    tilde = substitution_code(sub)
    value = r_mu(tilde)
    if not same_real_algebraic(value, data.field.generator()):
        raise InternalCheckError("self-similarity code value differs from lambda")
    relation = lambda_relation_search(value)
    if data.lam.is_rational:
        lam_int = int(data.lam.as_fraction())
        proper = _is_proper_power(lam_int)
        note = (
            "expansion factor is a proper power; the scaling image may have "
            "a smaller generator"
            if proper
            else "integer expansion factor is not a proper power"
        )
    else:
        proper = None
        note = (
            "irrational expansion factor; no generator of the scaling image "
            "is identified, only the value of the canonical code"
        )
        caveats.append(note)

    classes = asymptotic_classes(sub)
    count = classes.count
    bound = factorial(count)
    action = action_on_classes(sub, classes)
    trivial = action == tuple(range(count))

    group: QuotientGroup | None = None
    aut_report: AutGroupReport | None = None
    description: str | None = None
    if cr.is_balanced:
        aut_report = search_automorphisms(sub, aut_radius, aut_depth)
        group = shift_quotient(aut_report)
        if group.order > bound:
            raise InternalCheckError(
                f"quotient order {group.order} exceeds the class bound {bound}"
            )
        if group.order == 1:
            description = "Z"
        elif trivial:
            description = f"{group.name} x Z"
        else:
            description = f"{group.name} x| Z (semidirect)"
        caveats.append(
            f"finite part identified from the automorphism search at radius "
            f"{aut_radius}; larger radii could enlarge it"
        )
    else:
        caveats.append(
            "balance not certified; the finite part is only bounded, not "
            "identified"
        )

    return McgReport(
        sub=sub,
        lam=data.lam,
        cr=cr,
        pisot=pisot,
        z_part=ZPart(
            r_mu_value=data.lam,
            relation=relation,
            proper_power=proper,
            note=note,
        ),
        finite_part=FinitePart(
            class_count=count,
            bound=bound,
            action=action,
            action_trivial=trivial,
            group=group,
            aut_report=aut_report,
            description=description,
        ),
        caveats=tuple(caveats),
    )


# ---------------------------------------------------------------------------
# Sturmian dichotomy


@dataclass(frozen=True)
class Surd:
    """The quadratic irrational (a + b*sqrt(d)) / c with integer entries."""

    a: int
    b: int
    d: int
    c: int

    def __post_init__(self) -> None:
        if self.c == 0:
            raise ValidationError("surd denominator must be nonzero")
        if self.b == 0:
            raise ValidationError("surd is rational: b = 0")
        if self.d < 2 or isqrt(self.d) ** 2 == self.d:
            raise ValidationError("surd radicand must be a non-square >= 2")

    def minpoly(self) -> tuple[int, int, int]:
        """Ascending integer coefficients of the quadratic with this root,
        content divided out, leading coefficient positive."""
        a, b, d, c = self.a, self.b, self.d, self.c
        coeffs = (a * a - b * b * d, -2 * a * c, c * c)
        g = gcd(*coeffs)
        return tuple(x // g for x in coeffs)

    def approx(self) -> float:
        return (self.a + self.b * self.d**0.5) / self.c


NON_QUADRATIC = "non-quadratic"


@dataclass(frozen=True)
class SturmianVerdict:
    kind: str  # TrivialMCG | IsomorphicToZ | NotApplicable
    reason: str
    minpoly: tuple[int, int, int] | None = None
    conjugate_in_unit_interval: bool | None = None


def _sign_surd(a: int, b: int, d: int) -> int:
    """Exact sign of a + b*sqrt(d), d a non-square."""
    if b == 0:
        return (a > 0) - (a < 0)
    if b > 0:
        if a >= 0:
            return 1
        return 1 if a * a < b * b * d else -1
    return -_sign_surd(-a, -b, d)


def sturmian_classify(beta) -> SturmianVerdict:
    """Dichotomy for the rotation-number shift.

    A quadratic irrational whose algebraic conjugate leaves [0, 1] gives an
    infinite cyclic group; every other irrational gives the trivial group.
    Quadraticity cannot be read off an approximation, so inputs are exact:
    a Surd, or the tag "non-quadratic" for a declared non-quadratic
    irrational.  Rationals are rejected.
    """
    if beta == NON_QUADRATIC:
        return SturmianVerdict(
            kind="TrivialMCG",
            reason="declared non-quadratic irrational; only the quadratic "
            "case with external conjugate gives a nontrivial group",
        )
    if isinstance(beta, (int, Fraction)):
        raise ValidationError("rotation number must be irrational")
    if not isinstance(beta, Surd):
        raise ValidationError(
            "input must be a Surd, or the 'non-quadratic' tag"
        )
    a, b, d, c = beta.a, beta.b, beta.d, beta.c
    if c < 0:
        a, b, c = -a, -b, -c
    # 0 < beta < 1, strictly: equality cannot occur for an irrational
    if _sign_surd(a, b, d) <= 0 or _sign_surd(a - c, b, d) >= 0:
        raise ValidationError("rotation number must lie in (0, 1)")
    inside = _sign_surd(a, -b, d) > 0 and _sign_surd(a - c, -b, d) < 0
    if inside:
        return SturmianVerdict(
            kind="TrivialMCG",
            reason="quadratic with conjugate inside [0, 1]",
            minpoly=beta.minpoly(),
            conjugate_in_unit_interval=True,
        )
    return SturmianVerdict(
        kind="IsomorphicToZ",
        reason="quadratic with conjugate outside [0, 1]",
        minpoly=beta.minpoly(),
        conjugate_in_unit_interval=False,
    )


# ---------------------------------------------------------------------------
# Odometers


@dataclass(frozen=True)
class OdometerReport:
    preperiod: tuple[int, ...]
    period: tuple[int, ...]
    coinvariants: str
    unit_rank: int
    presentation: str


def odometer_mcg(preperiod, period) -> OdometerReport:
    """Structure report for the adding machine with the given prime tower.

    The tower reads the preperiod once, then the period forever.  Only
    primes occurring infinitely often contribute multiplicative units, so
    the unit rank is the number of distinct period primes.
    """
    pre = tuple(int(p) for p in preperiod)
    per = tuple(int(p) for p in period)
    if not per:
        raise ValidationError("period must be nonempty")
    for p in pre + per:
        if not sympy.isprime(p):
            raise ValidationError(f"{p} is not prime")
    period_set = sorted(set(per))
    rank = len(period_set)
    scale = 1
    for p in pre:
        if p not in period_set:
            scale *= p
    loc = "Z[" + ", ".join(f"1/{p}" for p in period_set) + "]"
    coinv = loc if scale == 1 else f"(1/{scale}) {loc}"
    presentation = f"O_P/<(1,1,...)> x| Z^{rank}"
    return OdometerReport(
        preperiod=pre,
        period=per,
        coinvariants=coinv,
        unit_rank=rank,
        presentation=presentation,
    )


# ---------------------------------------------------------------------------
# Hierarchical two-measure words


@dataclass(frozen=True)
class HierarchicalWordSpec:
    """Finite stages of the two-symbol hierarchical construction.

    Level i+1 concatenates n_values[i] copies of the level-i 0-word and one
    level-i 1-word; the 1-words are the letter-swapped mirror images.  All
    statements are finite-stage statements.
    """

    n_values: tuple[int, ...]
    words0: tuple[str, ...]
    words1: tuple[str, ...]
    freqs0: tuple[Fraction, ...]
    bounds: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        swap = {"0": "1", "1": "0"}
        for w0, w1 in zip(self.words0, self.words1):
            if "".join(swap[ch] for ch in w0) != w1:
                raise InternalCheckError("letter-swap symmetry broken")
        for i, n in enumerate(self.n_values):
            if len(self.words0[i + 1]) != (n + 1) * len(self.words0[i]):
                raise InternalCheckError("length recursion broken")
        for f, b in zip(self.freqs0, self.bounds):
            if f < b:
                raise InternalCheckError("frequency fell below its bound")

    @property
    def top0(self) -> str:
        return self.words0[-1]

    @property
    def top1(self) -> str:
        return self.words1[-1]


def hierarchical_subshift(n_values) -> HierarchicalWordSpec:
    """Build all levels of the hierarchical construction for the given
    multiplicities (each at least 2)."""
    ns = tuple(int(n) for n in n_values)
    if not ns:
        raise ValidationError("need at least one multiplicity")
    if any(n < 2 for n in ns):
        raise ValidationError("multiplicities must be at least 2")
    words0 = ["0"]
    words1 = ["1"]
    for n in ns:
        prev0, prev1 = words0[-1], words1[-1]
        words0.append(prev0 * n + prev1)
        words1.append(prev1 * n + prev0)
    freqs = tuple(
        Fraction(w.count("0"), len(w)) for w in words0
    )
    # bound at level i is the product over the first i multiplicities
    bounds = [Fraction(1)]
    prod = Fraction(1)
    for n in ns:
        prod *= Fraction(n, n + 1)
        bounds.append(prod)
    return HierarchicalWordSpec(
        n_values=ns,
        words0=tuple(words0),
        words1=tuple(words1),
        freqs0=freqs,
        bounds=tuple(bounds),
    )


def cyclic_block_table(word: str, n: int) -> dict[tuple[int, ...], Fraction]:
    """Empirical n-block frequencies of the word read cyclically; exact
    fractions summing to 1."""
    if n < 1 or n > len(word):
        raise ValidationError("block length out of range for the word")
    seq = [int(ch) for ch in word]
    ext = seq + seq[: n - 1]
    table: dict[tuple[int, ...], Fraction] = {}
    step = Fraction(1, len(seq))
    for i in range(len(seq)):
        key = tuple(ext[i : i + n])
        table[key] = table.get(key, Fraction(0)) + step
    return table


def stage_measure_tables(
    spec: HierarchicalWordSpec, n: int
) -> tuple[dict, dict]:
    """The two finite-stage frequency tables at the top level."""
    return (
        cyclic_block_table(spec.top0, n),
        cyclic_block_table(spec.top1, n),
    )


# ---------------------------------------------------------------------------
# Virtually-abelian checklist


@dataclass(frozen=True)
class VirtuallyAbelianReport:
    window: tuple[int, int]
    min_ratio: Fraction
    ergodic_measure_bound: int
    asymptotic_class_count: int | None
    infinitesimal_rank: int | None
    verdict: str
    notes: tuple[str, ...]


def _ceil_fraction(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def virtually_abelian_report(obj, n_max: int = 24) -> VirtuallyAbelianReport:
    """Checklist for the virtually-abelian conclusion.

    Reports a window estimate of the complexity ratio p(n)/n (which bounds
    the number of ergodic measures), and for substitutions also the
    asymptotic class count and the infinitesimal rank.  The conclusion
    needs vanishing infinitesimals; nonzero rank reroutes to the
    finite-extension description instead.
    """
    notes: list[str] = []
    if isinstance(obj, Substitution):
        lang = obj.language(n_max)
        # tail of the window only: small n understate the growth rate
        lo = max(1, n_max // 2)
        ratios = [Fraction(lang.complexity(n), n) for n in range(lo, n_max + 1)]
        min_ratio = min(ratios)
        k = _ceil_fraction(min_ratio)
        classes = asymptotic_classes(obj)
        inf_rank = infinitesimal_rank(obj)
        if inf_rank == 0:
            verdict = "hypotheses satisfied on the checked window"
            notes.append(
                f"complexity ratio stays near {min_ratio} on the window; "
                "infinitesimal part vanishes"
            )
        else:
            verdict = (
                "infinitesimals nonzero; the finite-extension structure "
                "applies instead of the abelian route"
            )
        return VirtuallyAbelianReport(
            window=(lo, n_max),
            min_ratio=min_ratio,
            ergodic_measure_bound=k - 1,
            asymptotic_class_count=classes.count,
            infinitesimal_rank=inf_rank,
            verdict=verdict,
            notes=tuple(notes),
        )
    if isinstance(obj, HierarchicalWordSpec):
        w0, w1 = obj.top0, obj.top1
        cap = min(n_max, len(w0))
        lo = max(1, cap // 2)
        ratios = []
        for n in range(lo, cap + 1):
            blocks = set()
            for u in (w0 + w0, w0 + w1, w1 + w0, w1 + w1):
                seq = tuple(int(ch) for ch in u)
                for i in range(len(w0)):
                    blocks.add(seq[i : i + n])
            ratios.append(Fraction(len(blocks), n))
        min_ratio = min(ratios)
        k = _ceil_fraction(min_ratio)
        notes.append(
            "finite-stage language only; class and infinitesimal data need "
            "the full construction"
        )
        return VirtuallyAbelianReport(
            window=(lo, cap),
            min_ratio=min_ratio,
            ergodic_measure_bound=k - 1,
            asymptotic_class_count=None,
            infinitesimal_rank=None,
            verdict="insufficient data",
            notes=tuple(notes),
        )
    raise ValidationError("input must be a substitution or a word spec")
