"""Certificate producers and independent verifiers.

Four certificate kinds cover the pipeline: the freeness-vs-measure criterion
for a window of forged subgroups, comparison of two state subsets via
translated atom pieces, the audit of a castle against the fixed-set bound,
and the assembled negative report that a positive-measure fixed set rules
out castles with small tolerance.

Every producer emits a plain dict (JSON-ready: exact rationals as
``"num/den"`` strings, group elements as canonical text, words as generator
index lists, a ``kind`` tag and ``"v": 1``), and every kind has a verifier
that works from the serialized form alone, recomputing the claims rather
than trusting the recorded ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .dynamics import (
    DEFAULT_STATE_BUDGET,
    StabilizerWitness,
    Window,
    stabilizer_witness,
)
from .errors import (
    BudgetExceededError,
    CertificateError,
    MalformedCastleError,
    MeasureConditionError,
    TextParseError,
)
from .forge import SubgroupDatum, assign_primes
from .wreath import Word, WreathElement, WreathGroup

SCHEMA_VERSION = 1

State = Tuple[int, ...]
StateSet = FrozenSet[State]


def frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CertificateError(f"bad rational {text!r}: {exc}") from None


def window_from_records(records: Sequence[dict]) -> Window:
    return Window([SubgroupDatum.from_dict(r) for r in records])


# --------------------------------------------------------------------------
# transitivity, with an exact escalation path for over-budget products


@dataclass(frozen=True)
class TransitivityResult:
    status: str  # "pass" | "fail" | "skipped"
    method: str  # "bfs" | "level-coprime" | "none"
    orbit_size: Optional[int]
    detail: str

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "method": self.method,
            "orbit_size": self.orbit_size,
            "detail": self.detail,
        }


def certify_transitive(window: Window, budget: int = DEFAULT_STATE_BUDGET) -> TransitivityResult:
    """Decide transitivity of the diagonal action, exactly.

    Within budget this is plain BFS.  When the product is too large but every
    factor fits, transitivity still follows exactly: the orbit of the
    identity thread surjects equivariantly onto each factor orbit, so each
    factor size divides the orbit size; if every factor orbit is full and the
    factor sizes are pairwise coprime prime powers, their product divides the
    orbit size, which forces the orbit to be everything.  Conversely a
    non-full factor orbit rules transitivity out.
    """
    if window.size <= budget:
        orb = window.orbit(window.identity_thread(), budget)
        status = "pass" if orb.size == window.size else "fail"
        return TransitivityResult(status, "bfs", orb.size, "full breadth-first search")
    if all(level.size <= budget for level in window.levels):
        full = [level.orbit(0, budget).size == level.size for level in window.levels]
        if not all(full):
            bad = full.index(False)
            return TransitivityResult(
                "fail",
                "level-coprime",
                None,
                f"factor {bad} is not even transitive on its own level",
            )
        if window.primes_distinct():
            return TransitivityResult(
                "pass",
                "level-coprime",
                window.size,
                "every factor orbit is full and the pairwise-coprime factor "
                "sizes all divide the thread-orbit size",
            )
        return TransitivityResult(
            "skipped",
            "none",
            None,
            "product exceeds the state budget and the primes repeat",
        )
    return TransitivityResult(
        "skipped", "none", None, "a single factor already exceeds the state budget"
    )


# --------------------------------------------------------------------------
# criterion certificate


@dataclass(frozen=True)
class GammaRecord:
    gamma_text: str
    prime: int
    epsilon: Fraction
    index: int
    not_in_subgroup: bool
    fixed_fraction: Fraction
    fraction_ok: bool
    brute_checked: bool
    brute_ok: Optional[bool]

    @property
    def ok(self) -> bool:
        return self.not_in_subgroup and self.fraction_ok and self.brute_ok is not False

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma_text,
            "prime": self.prime,
            "epsilon": frac_str(self.epsilon),
            "index": self.index,
            "not_in_subgroup": self.not_in_subgroup,
            "fixed_fraction": frac_str(self.fixed_fraction),
            "fraction_ok": self.fraction_ok,
            "brute_checked": self.brute_checked,
            "brute_ok": self.brute_ok,
        }


@dataclass(frozen=True)
class CriterionCertificate:
    d: int
    m: int
    data: Tuple[SubgroupDatum, ...]
    records: Tuple[GammaRecord, ...]
    primes_distinct: bool
    product_lower_bound: Fraction
    window_s_fixed_fraction: Fraction
    window_fraction_ok: bool
    transitivity: TransitivityResult
    witness: StabilizerWitness
    verdict: str  # "valid" | "invalid" | "partial"

    @property
    def valid(self) -> bool:
        return self.verdict == "valid"

    def to_dict(self) -> dict:
        return {
            "kind": "criterion",
            "v": SCHEMA_VERSION,
            "d": self.d,
            "m": self.m,
            "window": [dat.to_dict() for dat in self.data],
            "records": [rec.to_dict() for rec in self.records],
            "primes_distinct": self.primes_distinct,
            "product_lower_bound": frac_str(self.product_lower_bound),
            "window_s_fixed_fraction": frac_str(self.window_s_fixed_fraction),
            "window_fraction_ok": self.window_fraction_ok,
            "transitivity": self.transitivity.to_dict(),
            "stabilizer": self.witness.to_dict(),
            "verdict": self.verdict,
        }


def _gamma_record(dat: SubgroupDatum, window: Window, pos: int, budget: int) -> GammaRecord:
    level = window.levels[pos]
    not_in = not dat.contains(dat.gamma)
    frac = dat.fixed_fraction()
    fraction_ok = frac >= 1 - dat.epsilon
    brute_checked = level.size <= budget
    brute_ok: Optional[bool] = None
    if brute_checked:
        fixed: Optional[set] = None
        for s in window.group.lamp_generators():
            cur = set(level.brute_fixed_indices(s, budget))
            fixed = cur if fixed is None else fixed & cur
        count = len(fixed) if fixed is not None else level.size
        brute_ok = Fraction(count, level.size) == frac
    return GammaRecord(
        gamma_text=dat.gamma.text(),
        prime=dat.p,
        epsilon=dat.epsilon,
        index=dat.index(),
        not_in_subgroup=not_in,
        fixed_fraction=frac,
        fraction_ok=fraction_ok,
        brute_checked=brute_checked,
        brute_ok=brute_ok,
    )


def build_criterion(
    data: Sequence[SubgroupDatum],
    budget: int = DEFAULT_STATE_BUDGET,
    witness_radius: int = 1,
) -> CriterionCertificate:
    """Assemble the criterion certificate for pre-forged window data."""
    window = Window(data)
    records = tuple(
        _gamma_record(dat, window, i, budget) for i, dat in enumerate(window.data)
    )
    primes_distinct = window.primes_distinct()
    product_bound = prod((1 - dat.epsilon for dat in window.data), start=Fraction(1))
    window_fraction = window.s_fixed_fraction()
    window_fraction_ok = window_fraction >= product_bound
    transitivity = certify_transitive(window, budget)
    witness = stabilizer_witness(window, ball_radius=witness_radius)
    failed = (
        any(not rec.ok for rec in records)
        or not primes_distinct
        or not window_fraction_ok
        or transitivity.status == "fail"
        or not witness.ok
    )
    if failed:
        verdict = "invalid"
    elif transitivity.status == "skipped":
        verdict = "partial"
    else:
        verdict = "valid"
    return CriterionCertificate(
        d=window.d,
        m=window.m,
        data=window.data,
        records=records,
        primes_distinct=primes_distinct,
        product_lower_bound=product_bound,
        window_s_fixed_fraction=window_fraction,
        window_fraction_ok=window_fraction_ok,
        transitivity=transitivity,
        witness=witness,
        verdict=verdict,
    )


def verify_criterion(
    gammas: Sequence[WreathElement],
    d: int,
    m: int,
    epsilon=None,
    budget: int = DEFAULT_STATE_BUDGET,
    witness_radius: int = 1,
) -> CriterionCertificate:
    """Forge data for the given window elements and certify the criterion.

    ``epsilon`` may be None (the summable schedule), a fixed rational applied
    to every element, or a callable on the position index.
    """
    if epsilon is None:
        assignment = assign_primes(gammas, d=d)
    else:
        assignment = assign_primes(gammas, epsilons=epsilon, d=d)
    data = assignment.forge_all(d=d, m=m)
    return build_criterion(data, budget=budget, witness_radius=witness_radius)


def check_criterion_certificate(rec: dict, budget: int = DEFAULT_STATE_BUDGET) -> bool:
    """Recompute every claim of a serialized criterion certificate.

    Returns the recomputed validity; raises CertificateError when the record
    is structurally broken or its recorded values disagree with recomputation.
    """
    if rec.get("kind") != "criterion" or rec.get("v") != SCHEMA_VERSION:
        raise CertificateError("not a criterion certificate")
    try:
        data = [SubgroupDatum.from_dict(r) for r in rec["window"]]
        recorded = rec["records"]
        radius = int(rec["stabilizer"]["ball_radius"])
    except (KeyError, TypeError, TextParseError) as exc:
        raise CertificateError(f"malformed criterion certificate: {exc}") from None
    if len(recorded) != len(data):
        raise CertificateError("record count does not match the window")
    fresh = build_criterion(data, budget=budget, witness_radius=radius)
    for got, want in zip(fresh.records, recorded):
        claims = {
            "gamma": got.gamma_text,
            "prime": got.prime,
            "epsilon": frac_str(got.epsilon),
            "index": got.index,
            "not_in_subgroup": got.not_in_subgroup,
            "fixed_fraction": frac_str(got.fixed_fraction),
            "fraction_ok": got.fraction_ok,
        }
        for key, value in claims.items():
            if want.get(key) != value:
                raise CertificateError(
                    f"recorded {key}={want.get(key)!r} for {got.gamma_text} "
                    f"but recomputation gives {value!r}"
                )
    summary = {
        "primes_distinct": fresh.primes_distinct,
        "product_lower_bound": frac_str(fresh.product_lower_bound),
        "window_s_fixed_fraction": frac_str(fresh.window_s_fixed_fraction),
        "window_fraction_ok": fresh.window_fraction_ok,
        "verdict": fresh.verdict,
    }
    for key, value in summary.items():
        if rec.get(key) != value:
            raise CertificateError(
                f"recorded {key}={rec.get(key)!r} but recomputation gives {value!r}"
            )
    if rec["transitivity"].get("status") != fresh.transitivity.status:
        raise CertificateError("recorded transitivity status disagrees with recomputation")
    return fresh.valid


# --------------------------------------------------------------------------
# boolean atoms and comparison


def translate_closure(
    window: Window, sets: Sequence[StateSet], budget: int = DEFAULT_STATE_BUDGET
) -> List[StateSet]:
    """Close the given state subsets under the whole group action.

    Every group element acts through the permutation group generated by the
    generator moves, so iterating generator images to a fixed point yields
    exactly the set of translates; the level is finite, so this terminates.
    """
    gens = range(len(window.group.generators()))
    tables = [window.tables(g) for g in gens]

    def image(s: StateSet, g: int) -> StateSet:
        return frozenset(
            tuple(tab[i] for tab, i in zip(tables[g], st)) for st in s
        )

    closure: List[StateSet] = []
    seen: set[StateSet] = set()
    queue: List[StateSet] = [frozenset(s) for s in sets]
    while queue:
        current = queue.pop(0)
        if current in seen:
            continue
        seen.add(current)
        closure.append(current)
        if len(seen) > budget:
            raise BudgetExceededError(len(seen), budget, what="translates")
        for g in gens:
            nxt = image(current, g)
            if nxt not in seen:
                queue.append(nxt)
    return closure


def boolean_atoms(
    sets: Sequence[StateSet], window: Window, budget: int = DEFAULT_STATE_BUDGET
) -> List[StateSet]:
    """Atoms of the finite algebra generated by all translates of the inputs.

    States sharing the same membership pattern across every translate form
    one atom; the atoms partition the state space and every translate is a
    union of atoms.  Returned in order of each atom's least state.
    """
    if window.size > budget:
        raise BudgetExceededError(window.size, budget)
    closure = translate_closure(window, sets, budget)
    blocks: Dict[Tuple[bool, ...], List[State]] = {}
    for st in window.iter_states():
        sig = tuple(st in s for s in closure)
        blocks.setdefault(sig, []).append(st)
    return [frozenset(b) for b in blocks.values()]


@dataclass(frozen=True)
class ComparisonCertificate:
    data: Tuple[SubgroupDatum, ...]
    d: int
    m: int
    a_set: StateSet
    b_set: StateSet
    pieces: Tuple[StateSet, ...]
    words: Tuple[Word, ...]

    def to_dict(self) -> dict:
        window = Window(self.data)
        return {
            "kind": "comparison",
            "v": SCHEMA_VERSION,
            "d": self.d,
            "m": self.m,
            "window": [dat.to_dict() for dat in self.data],
            "A": [window.state_text(s) for s in sorted(self.a_set)],
            "B": [window.state_text(s) for s in sorted(self.b_set)],
            "pieces": [
                [window.state_text(s) for s in sorted(piece)] for piece in self.pieces
            ],
            "words": [list(w) for w in self.words],
        }


def comparison_certificate(
    a_set: Sequence[State] | StateSet,
    b_set: Sequence[State] | StateSet,
    window: Window,
    budget: int = DEFAULT_STATE_BUDGET,
) -> ComparisonCertificate:
    """Decompose A into atoms and move them disjointly into B.

    Requires a transitive window and |A| < |B| (the uniform-measure
    comparison hypothesis).  Pieces are atoms of the translate algebra of
    {A, B}; the action permutes atoms and is transitive on them, so a
    breadth-first search over atoms finds a shortest transporter word from
    each piece to its distinct target atom inside B.
    """
    a = frozenset(a_set)
    b = frozenset(b_set)
    if len(a) >= len(b):
        raise MeasureConditionError(
            f"need |A| < |B|, got |A|={len(a)} and |B|={len(b)}"
        )
    if not window.is_transitive(budget):
        raise CertificateError("comparison requires a transitive window")
    atoms = boolean_atoms([a, b], window, budget)
    pieces = [p for p in atoms if p <= a]
    targets_pool = [p for p in atoms if p <= b]
    union = frozenset().union(*pieces) if pieces else frozenset()
    if union != a:
        raise CertificateError("atoms failed to refine A")
    if len(pieces) > len(targets_pool):
        raise CertificateError("fewer atoms inside B than inside A")
    targets = targets_pool[: len(pieces)]

    gens = range(len(window.group.generators()))
    tables = [window.tables(g) for g in gens]

    def atom_image(s: StateSet, g: int) -> StateSet:
        return frozenset(tuple(tab[i] for tab, i in zip(tables[g], st)) for st in s)

    words: List[Word] = []
    for piece, target in zip(pieces, targets):
        found: Dict[StateSet, Word] = {piece: ()}
        frontier = [piece]
        while target not in found and frontier:
            nxt = []
            for cur in frontier:
                for g in gens:
                    img = atom_image(cur, g)
                    if img not in found:
                        found[img] = (g,) + found[cur]
                        nxt.append(img)
            frontier = nxt
        if target not in found:
            raise CertificateError("no transporter word reaches the target atom")
        words.append(found[target])
    cert = ComparisonCertificate(
        data=window.data,
        d=window.d,
        m=window.m,
        a_set=a,
        b_set=b,
        pieces=tuple(pieces),
        words=tuple(words),
    )
    if not check_comparison_certificate(cert.to_dict(), budget):
        raise CertificateError("freshly produced comparison certificate failed to verify")
    return cert


def check_comparison_certificate(rec: dict, budget: int = DEFAULT_STATE_BUDGET) -> bool:
    """Re-check a serialized comparison certificate from scratch: the pieces
    partition A, each transported image lies in B, and images are pairwise
    disjoint."""
    if rec.get("kind") != "comparison" or rec.get("v") != SCHEMA_VERSION:
        raise CertificateError("not a comparison certificate")
    try:
        window = window_from_records(rec["window"])
        a = frozenset(window.parse_state(t) for t in rec["A"])
        b = frozenset(window.parse_state(t) for t in rec["B"])
        pieces = [frozenset(window.parse_state(t) for t in ts) for ts in rec["pieces"]]
        words = [tuple(int(g) for g in w) for w in rec["words"]]
    except (KeyError, TypeError, ValueError, TextParseError) as exc:
        raise CertificateError(f"malformed comparison certificate: {exc}") from None
    if len(words) != len(pieces):
        raise CertificateError("piece and word counts differ")
    if sum(len(p) for p in pieces) != len(set().union(*pieces) if pieces else set()):
        return False
    if (set().union(*pieces) if pieces else set()) != a:
        return False
    images: List[StateSet] = []
    for piece, word in zip(pieces, words):
        mover = window.group.word_element(word)
        prepared = window.prepare(mover)
        images.append(frozenset(prepared.apply(s) for s in piece))
    covered: set[State] = set()
    for img in images:
        if not img <= b:
            return False
        if img & covered:
            return False
        covered |= img
    return True


# --------------------------------------------------------------------------
# castles and their audit


@dataclass(frozen=True)
class Tower:
    base: StateSet
    shapes: Tuple[WreathElement, ...]


@dataclass(frozen=True)
class Castle:
    towers: Tuple[Tower, ...]
    epsilon: Optional[Fraction] = None

    def to_dict(self, window: Window) -> dict:
        return {
            "towers": [
                {
                    "V": [window.state_text(s) for s in sorted(t.base)],
                    "S": [x.text() for x in t.shapes],
                }
                for t in self.towers
            ],
            "epsilon": None if self.epsilon is None else frac_str(self.epsilon),
        }

    @classmethod
    def from_dict(cls, rec: dict, window: Window) -> "Castle":
        towers = tuple(
            Tower(
                base=frozenset(window.parse_state(t) for t in tw["V"]),
                shapes=tuple(window.group.parse_element(x) for x in tw["S"]),
            )
            for tw in rec["towers"]
        )
        eps = rec.get("epsilon")
        return cls(towers=towers, epsilon=None if eps is None else parse_frac(eps))


def parse_castle_file(text: str, window: Window) -> Castle:
    """Parse the one-tower-per-line castle format: ``V=<states>; S=<words>``.

    States use the canonical window state text, words the dotted generator
    names (``e`` for the empty word); tokens are whitespace-separated.
    """
    towers: List[Tower] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ";" not in line:
            raise TextParseError("expected 'V=<states>; S=<words>'", lineno)
        left, right = line.split(";", 1)
        left, right = left.strip(), right.strip()
        if not left.startswith("V=") or not right.startswith("S="):
            raise TextParseError("tower line must give V= then S=", lineno)
        state_tokens = left[2:].split()
        word_tokens = right[2:].split()
        if not state_tokens or not word_tokens:
            raise TextParseError("tower needs at least one state and one word", lineno)
        base = frozenset(window.parse_state(tok, lineno) for tok in state_tokens)
        shapes = tuple(
            window.group.word_element(window.group.parse_word(tok, lineno))
            for tok in word_tokens
        )
        towers.append(Tower(base=base, shapes=shapes))
    if not towers:
        raise TextParseError("castle file holds no towers")
    return Castle(towers=tuple(towers))


def castle_lines(castle: Castle, window: Window) -> List[str]:
    """Serialize back to the file format, recovering shape words via orbits
    is not attempted: shapes are written as single-letter words only when
    they are generators, otherwise this raises."""
    group = window.group
    gen_index = {x: i for i, x in enumerate(group.generators())}
    lines = []
    for tower in castle.towers:
        states = " ".join(window.state_text(s) for s in sorted(tower.base))
        names = []
        for x in tower.shapes:
            if x.is_identity():
                names.append("e")
            elif x in gen_index:
                names.append(group.generator_names()[gen_index[x]])
            else:
                raise CertificateError(
                    "castle shapes beyond generators need the word they came from"
                )
        lines.append(f"V= {states} ; S= {' '.join(names)}")
    return lines


@dataclass(frozen=True)
class TowerAudit:
    base_size: int
    shape_size: int
    defect_count: int
    defect: Fraction
    base_measure: Fraction

    def to_dict(self) -> dict:
        return {
            "base_size": self.base_size,
            "shape_size": self.shape_size,
            "defect_count": self.defect_count,
            "defect": frac_str(self.defect),
            "base_measure": frac_str(self.base_measure),
        }


@dataclass(frozen=True)
class CastleAudit:
    data: Tuple[SubgroupDatum, ...]
    castle: dict
    gamma_text: str
    towers: Tuple[TowerAudit, ...]
    fix_measure: Fraction
    bound: Fraction
    inequality_ok: bool
    epsilon: Optional[Fraction]
    defects_within_epsilon: Optional[bool]

    @property
    def ok(self) -> bool:
        return self.inequality_ok and self.defects_within_epsilon is not False

    def to_dict(self) -> dict:
        return {
            "kind": "castle-audit",
            "v": SCHEMA_VERSION,
            "window": [dat.to_dict() for dat in self.data],
            "castle": self.castle,
            "gamma": self.gamma_text,
            "towers": [t.to_dict() for t in self.towers],
            "fix_measure": frac_str(self.fix_measure),
            "bound": frac_str(self.bound),
            "inequality_ok": self.inequality_ok,
            "epsilon": None if self.epsilon is None else frac_str(self.epsilon),
            "defects_within_epsilon": self.defects_within_epsilon,
            "ok": self.ok,
        }


def audit_castle(
    castle: Castle,
    gamma: WreathElement,
    window: Window,
    budget: int = DEFAULT_STATE_BUDGET,
) -> CastleAudit:
    """Check well-formedness, then the fixed-set bound.

    Well-formed means: all translates (one per tower shape) are pairwise
    disjoint and together cover the state space.  MalformedCastleError
    carries a witness — the doubly covered or missed state.  For the test
    set {inverse of gamma}, the measure of the set of gamma-fixed states is
    at most the sum over towers of |KS △ S| times the base measure; the
    audit recomputes both sides exactly.
    """
    if window.size > budget:
        raise BudgetExceededError(window.size, budget)
    seen: Dict[State, Tuple[int, str]] = {}
    for ti, tower in enumerate(castle.towers):
        if len(set(tower.shapes)) != len(tower.shapes):
            dup = next(x for i, x in enumerate(tower.shapes) if x in tower.shapes[:i])
            raise MalformedCastleError(
                "repeated shape element in one tower",
                witness={"tower": ti, "shape": dup.text()},
            )
        for shape in tower.shapes:
            prepared = window.prepare(shape)
            for v in sorted(tower.base):
                img = prepared.apply(v)
                if img in seen:
                    first_tower, first_shape = seen[img]
                    raise MalformedCastleError(
                        "castle translates overlap",
                        witness={
                            "state": window.state_text(img),
                            "first": {"tower": first_tower, "shape": first_shape},
                            "second": {"tower": ti, "shape": shape.text()},
                        },
                    )
                seen[img] = (ti, shape.text())
    if len(seen) != window.size:
        missing = next(s for s in window.iter_states() if s not in seen)
        raise MalformedCastleError(
            "castle translates do not cover the state space",
            witness={"missing_state": window.state_text(missing)},
        )
    inv = gamma.inverse()
    tower_audits: List[TowerAudit] = []
    bound = Fraction(0)
    for tower in castle.towers:
        shape_set = set(tower.shapes)
        shifted = {inv * s for s in tower.shapes}
        count = len(shifted ^ shape_set)
        defect = Fraction(count, len(shape_set))
        base_measure = Fraction(len(tower.base), window.size)
        bound += count * base_measure
        tower_audits.append(
            TowerAudit(
                base_size=len(tower.base),
                shape_size=len(shape_set),
                defect_count=count,
                defect=defect,
                base_measure=base_measure,
            )
        )
    fix_count, _ = window.fixed_points(gamma, budget)
    fix_measure = Fraction(fix_count, window.size)
    within: Optional[bool] = None
    if castle.epsilon is not None:
        within = all(t.defect < castle.epsilon for t in tower_audits)
    return CastleAudit(
        data=window.data,
        castle=castle.to_dict(window),
        gamma_text=gamma.text(),
        towers=tuple(tower_audits),
        fix_measure=fix_measure,
        bound=bound,
        inequality_ok=fix_measure <= bound,
        epsilon=castle.epsilon,
        defects_within_epsilon=within,
    )


def check_castle_audit(rec: dict, budget: int = DEFAULT_STATE_BUDGET) -> bool:
    """Re-run a serialized audit and confirm its recorded numbers."""
    if rec.get("kind") != "castle-audit" or rec.get("v") != SCHEMA_VERSION:
        raise CertificateError("not a castle audit")
    try:
        window = window_from_records(rec["window"])
        castle = Castle.from_dict(rec["castle"], window)
        gamma = window.group.parse_element(rec["gamma"])
    except (KeyError, TypeError, TextParseError) as exc:
        raise CertificateError(f"malformed castle audit: {exc}") from None
    fresh = audit_castle(castle, gamma, window, budget)
    for key in ("fix_measure", "bound", "inequality_ok", "ok"):
        want = fresh.to_dict()[key]
        if rec.get(key) != want:
            raise CertificateError(
                f"recorded {key}={rec.get(key)!r} but recomputation gives {want!r}"
            )
    return fresh.ok


# --------------------------------------------------------------------------
# the assembled negative report


@dataclass(frozen=True)
class NonAFReport:
    certificate: CriterionCertificate
    bound: Fraction
    chain: Tuple[dict, ...]
    conclusion: str

    def to_dict(self) -> dict:
        return {
            "kind": "non-af-report",
            "v": SCHEMA_VERSION,
            "window": [dat.to_dict() for dat in self.certificate.data],
            "bound": frac_str(self.bound),
            "product_lower_bound": frac_str(self.certificate.product_lower_bound),
            "chain": list(self.chain),
            "conclusion": self.conclusion,
            "criterion": self.certificate.to_dict(),
        }


def non_af_report(
    certificate: CriterionCertificate, budget: int = DEFAULT_STATE_BUDGET
) -> NonAFReport:
    """Assemble the castle-obstruction report from a valid criterion
    certificate: exact stage bound, monotonicity to the limit, and the
    tolerance threshold below which no castle for the first lamp generator
    can exist."""
    if not certificate.valid:
        raise CertificateError("criterion certificate is not valid")
    bound = certificate.window_s_fixed_fraction
    product = certificate.product_lower_bound
    chain = (
        {
            "step": "stage-fraction",
            "statement": "exact fraction of window states fixed by every lamp generator",
            "value": frac_str(bound),
        },
        {
            "step": "stage-bound",
            "statement": "the stage fraction dominates the epsilon product",
            "lhs": frac_str(bound),
            "rel": ">=",
            "rhs": frac_str(product),
        },
        {
            "step": "positivity",
            "statement": "the epsilon product is positive",
            "lhs": frac_str(product),
            "rel": ">",
            "rhs": "0/1",
        },
        {
            "step": "limit-bound",
            "statement": (
                "stage fractions only decrease under window extension, so the "
                "limit measure of the set fixed by the first lamp generator is "
                "at least the recorded bound"
            ),
            "lhs": frac_str(bound),
            "rel": ">",
            "rhs": "0/1",
        },
        {
            "step": "castle-obstruction",
            "statement": (
                "a well-formed castle whose shapes all have defect below the "
                "bound for the inverse of the first lamp generator would "
                "contradict the fixed-set inequality"
            ),
            "threshold": frac_str(bound),
        },
    )
    return NonAFReport(
        certificate=certificate,
        bound=bound,
        chain=chain,
        conclusion="no castle tolerance below the bound is achievable: the limit action is not almost finite",
    )


def check_non_af_report(rec: dict, budget: int = DEFAULT_STATE_BUDGET) -> bool:
    """Verify a serialized report: the embedded criterion certificate must
    re-verify as valid, the bound must equal the recomputed window fraction,
    and every relational step of the chain must hold numerically."""
    if rec.get("kind") != "non-af-report" or rec.get("v") != SCHEMA_VERSION:
        raise CertificateError("not a non-almost-finiteness report")
    try:
        window = window_from_records(rec["window"])
        bound = parse_frac(rec["bound"])
        product = parse_frac(rec["product_lower_bound"])
        chain = rec["chain"]
        cert_rec = rec["criterion"]
    except (KeyError, TypeError, TextParseError) as exc:
        raise CertificateError(f"malformed report: {exc}") from None
    if cert_rec.get("window") != rec.get("window"):
        raise CertificateError("report window disagrees with the embedded certificate")
    if not check_criterion_certificate(cert_rec, budget):
        return False
    if window.s_fixed_fraction() != bound:
        raise CertificateError("recorded bound disagrees with recomputation")
    if prod(((1 - dat.epsilon) for dat in window.data), start=Fraction(1)) != product:
        raise CertificateError("recorded epsilon product disagrees with recomputation")
    if not bound > 0:
        return False
    rels = {">=": lambda a, b: a >= b, ">": lambda a, b: a > b, "==": lambda a, b: a == b}
    for step in chain:
        if "rel" in step:
            op = rels.get(step["rel"])
            if op is None:
                raise CertificateError(f"unknown relation {step['rel']!r} in chain")
            if not op(parse_frac(step["lhs"]), parse_frac(step["rhs"])):
                return False
    threshold = next(
        (step for step in chain if step.get("step") == "castle-obstruction"), None
    )
    if threshold is None or parse_frac(threshold["threshold"]) != bound:
        raise CertificateError("chain is missing the castle-obstruction threshold")
    return True
