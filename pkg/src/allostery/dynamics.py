"""Finite coset actions, products over windows, orbits and exact measures.

A level realizes the left action of the wreath product on the cosets of one
forged subgroup without ever materializing lamp configurations.  A coset is
encoded by the residue of its shift part plus, for each class in E, the lamp
sum over that class translated by the shift:

    state(f, lam) = (lam mod p^k,  (sum of f over lam+q, mod p) for q in E)

Two elements lie in the same coset exactly when these data agree, and every
combination occurs, so the state count equals the subgroup index.  Acting by
x = (g, delta) moves the base residue by delta and adds g's class sums at the
new base, which is a left action.

A window is a finite list of levels acted on diagonally; its states are
tuples of per-level state indices.  With pairwise distinct primes this is the
finite stage of the inverse system whose limit the certificates speak about.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import prod
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .base import Vec, is_zero, zero
from .errors import (
    BudgetExceededError,
    RankMismatchError,
    TextParseError,
    WindowError,
)
from .forge import SubgroupDatum
from .wreath import Word, WreathElement, WreathGroup, format_vec, _parse_vec

DEFAULT_STATE_BUDGET = 10**6


@dataclass(frozen=True)
class CosetState:
    """One coset: base residue plus the E-indexed lamp sums mod p."""

    base: Vec
    sums: Tuple[Vec, ...]


def format_state(s: CosetState) -> str:
    return format_vec(s.base) + "|(" + ",".join(format_vec(v) for v in s.sums) + ")"


def parse_state(text: str, line: int | None = None) -> CosetState:
    s = text.strip()
    base, pos = _parse_vec(s, 0, line)
    if s[pos : pos + 2] != "|(":
        raise TextParseError("expected '|(' after the base residue", line, pos + 1)
    pos += 1
    sums: list[Vec] = []
    pos += 1
    if s[pos : pos + 1] != ")":
        while True:
            v, pos = _parse_vec(s, pos, line)
            sums.append(v)
            if s[pos : pos + 1] == ",":
                pos += 1
                continue
            break
    if s[pos : pos + 1] != ")":
        raise TextParseError("expected ')' closing the sums", line, pos + 1)
    if pos + 1 != len(s):
        raise TextParseError("trailing characters after state", line, pos + 2)
    return CosetState(base, tuple(sums))


class _PreparedAction:
    """The data of one element needed to act on any state of one level:
    the reduced shift and the nonzero lamp class sums."""

    __slots__ = ("level", "delta", "class_sums")

    def __init__(self, level: "FiniteLevel", x: WreathElement):
        sub = level.subgroup
        self.level = level
        self.delta = sub.reduce(x.shift)
        sums: Dict[Vec, List[int]] = {}
        for pos, val in x.lamp.entries:
            if len(pos) != level.m or len(val) != level.d:
                raise RankMismatchError("element ranks do not match the level")
            bucket = sums.setdefault(sub.reduce(pos), [0] * level.d)
            for i, c in enumerate(val):
                bucket[i] += c
        p = level.p
        self.class_sums: Dict[Vec, Vec] = {}
        for q, vals in sums.items():
            reduced = tuple(c % p for c in vals)
            if not is_zero(reduced):
                self.class_sums[q] = reduced

    def apply(self, s: CosetState) -> CosetState:
        level = self.level
        modulus = level.modulus
        p = level.p
        base = tuple((b + t) % modulus for b, t in zip(s.base, self.delta))
        if not self.class_sums:
            return CosetState(base, s.sums)
        new_sums = []
        for c, old in zip(level.E, s.sums):
            key = tuple((b + e) % modulus for b, e in zip(base, c))
            g = self.class_sums.get(key)
            if g is None:
                new_sums.append(old)
            else:
                new_sums.append(tuple((o + gi) % p for o, gi in zip(old, g)))
        return CosetState(base, tuple(new_sums))

    def apply_index(self, i: int) -> int:
        level = self.level
        return level.state_index(self.apply(level.state_at(i)))


class FiniteLevel:
    """The action of the wreath product on the cosets of one forged subgroup."""

    def __init__(self, datum: SubgroupDatum):
        self.datum = datum
        self.p = datum.p
        self.d = datum.d
        self.m = datum.m
        self.E = datum.E
        self.l = datum.l
        self.subgroup = datum.shift_subgroup
        self.modulus = self.subgroup.modulus
        self.size = datum.index()
        self.group = WreathGroup(datum.d, datum.m)
        self._lamp_digits = self.l * self.d
        self._tables: Dict[int, List[int]] = {}

    def identity_state(self) -> CosetState:
        return CosetState(zero(self.m), tuple(zero(self.d) for _ in range(self.l)))

    def state_index(self, s: CosetState) -> int:
        idx = 0
        for b in s.base:
            idx = idx * self.modulus + b
        for v in s.sums:
            for c in v:
                idx = idx * self.p + c
        return idx

    def state_at(self, idx: int) -> CosetState:
        digits = []
        for _ in range(self._lamp_digits):
            idx, r = divmod(idx, self.p)
            digits.append(r)
        digits.reverse()
        sums = tuple(tuple(digits[j * self.d : (j + 1) * self.d]) for j in range(self.l))
        base = []
        for _ in range(self.m):
            idx, r = divmod(idx, self.modulus)
            base.append(r)
        base.reverse()
        return CosetState(tuple(base), sums)

    def iter_states(self) -> Iterator[CosetState]:
        """All states in index order."""
        for base in product(range(self.modulus), repeat=self.m):
            for flat in product(range(self.p), repeat=self._lamp_digits):
                yield CosetState(
                    base, tuple(flat[j * self.d : (j + 1) * self.d] for j in range(self.l))
                )

    def enumerate_states(self, budget: int = DEFAULT_STATE_BUDGET) -> List[CosetState]:
        if self.size > budget:
            raise BudgetExceededError(self.size, budget)
        return list(self.iter_states())

    def prepare(self, x: WreathElement) -> _PreparedAction:
        return _PreparedAction(self, x)

    def act(self, x: WreathElement, s: CosetState) -> CosetState:
        return _PreparedAction(self, x).apply(s)

    def state_of(self, x: WreathElement) -> CosetState:
        """The coset of x itself: x acting on the identity coset."""
        return self.act(x, self.identity_state())

    def table(self, g: int) -> List[int]:
        """Permutation of state indices induced by group generator g."""
        if g not in self._tables:
            prepared = self.prepare(self.group.generators()[g])
            self._tables[g] = [
                self.state_index(prepared.apply(s)) for s in self.iter_states()
            ]
        return self._tables[g]

    def orbit(
        self,
        start: int = 0,
        budget: int = DEFAULT_STATE_BUDGET,
        gen_indices: Optional[Sequence[int]] = None,
    ) -> "OrbitResult":
        """BFS over states; for each reached state a word carrying `start` to it."""
        if self.size > budget:
            raise BudgetExceededError(self.size, budget)
        gens = range(len(self.group.generators())) if gen_indices is None else gen_indices
        tables = {g: self.table(g) for g in gens}
        words: Dict[int, Word] = {start: ()}
        order = [start]
        frontier = [start]
        while frontier:
            nxt = []
            for s in frontier:
                for g in gens:
                    t = tables[g][s]
                    if t not in words:
                        words[t] = (g,) + words[s]
                        order.append(t)
                        nxt.append(t)
            frontier = nxt
        return OrbitResult(start=start, words=words, order=order)

    def brute_fixed_indices(self, x: WreathElement, budget: int = DEFAULT_STATE_BUDGET) -> List[int]:
        """Indices of all states fixed by x, by direct application."""
        if self.size > budget:
            raise BudgetExceededError(self.size, budget)
        prepared = self.prepare(x)
        return [i for i, s in enumerate(self.iter_states()) if prepared.apply(s) == s]

    def state_text(self, idx: int) -> str:
        return format_state(self.state_at(idx))

    def parse_state_index(self, text: str, line: int | None = None) -> int:
        s = parse_state(text, line)
        if len(s.base) != self.m or len(s.sums) != self.l:
            raise TextParseError("state shape does not match the level", line)
        for b in s.base:
            if not 0 <= b < self.modulus:
                raise TextParseError(f"base coordinate {b} out of range", line)
        for v in s.sums:
            if len(v) != self.d or any(not 0 <= c < self.p for c in v):
                raise TextParseError("sum entry out of range", line)
        return self.state_index(s)


@dataclass(frozen=True)
class OrbitResult:
    start: object
    words: Dict
    order: List

    @property
    def size(self) -> int:
        return len(self.words)


class _WindowAction:
    __slots__ = ("parts",)

    def __init__(self, window: "Window", x: WreathElement):
        self.parts = [level.prepare(x) for level in window.levels]

    def apply(self, state: Tuple[int, ...]) -> Tuple[int, ...]:
        return tuple(part.apply_index(i) for part, i in zip(self.parts, state))


class Window:
    """Diagonal action on a product of levels; states are index tuples.

    The construction does not insist on pairwise distinct primes so that
    degenerate products (the negative controls) can be built and examined;
    :meth:`primes_distinct` reports the condition and the criterion
    certificate requires it.
    """

    def __init__(self, data: Sequence[SubgroupDatum]):
        data = list(data)
        if not data:
            self.d = self.m = 1
        else:
            self.d, self.m = data[0].d, data[0].m
            for dat in data:
                if (dat.d, dat.m) != (self.d, self.m):
                    raise WindowError("all window data must share the ranks d, m")
        self.data = tuple(data)
        self.levels = tuple(FiniteLevel(dat) for dat in data)
        self.group = WreathGroup(self.d, self.m)
        self.size = prod(level.size for level in self.levels)

    def __len__(self) -> int:
        return len(self.levels)

    def primes_distinct(self) -> bool:
        ps = [dat.p for dat in self.data]
        return len(set(ps)) == len(ps)

    def identity_thread(self) -> Tuple[int, ...]:
        return (0,) * len(self.levels)

    def prepare(self, x: WreathElement) -> _WindowAction:
        return _WindowAction(self, x)

    def act(self, x: WreathElement, state: Tuple[int, ...]) -> Tuple[int, ...]:
        return self.prepare(x).apply(state)

    def iter_states(self) -> Iterator[Tuple[int, ...]]:
        return product(*(range(level.size) for level in self.levels))

    def enumerate_states(self, budget: int = DEFAULT_STATE_BUDGET) -> List[Tuple[int, ...]]:
        if self.size > budget:
            raise BudgetExceededError(self.size, budget)
        return list(self.iter_states())

    def tables(self, g: int) -> List[List[int]]:
        return [level.table(g) for level in self.levels]

    def orbit(self, start: Tuple[int, ...], budget: int = DEFAULT_STATE_BUDGET) -> OrbitResult:
        if self.size > budget:
            raise BudgetExceededError(self.size, budget)
        gens = range(len(self.group.generators()))
        tables = [self.tables(g) for g in gens]
        words: Dict[Tuple[int, ...], Word] = {start: ()}
        order = [start]
        frontier = [start]
        while frontier:
            nxt = []
            for s in frontier:
                for g in gens:
                    t = tuple(tab[i] for tab, i in zip(tables[g], s))
                    if t not in words:
                        words[t] = (g,) + words[s]
                        order.append(t)
                        nxt.append(t)
            frontier = nxt
        return OrbitResult(start=start, words=words, order=order)

    def is_transitive(self, budget: int = DEFAULT_STATE_BUDGET) -> bool:
        """BFS from the identity thread; true iff every product state is reached."""
        return self.orbit(self.identity_thread(), budget).size == self.size

    def s_fixed_fraction(self) -> Fraction:
        """Closed form: product over levels of (1 - l/p^{km})."""
        out = Fraction(1)
        for dat in self.data:
            out *= dat.fixed_fraction()
        return out

    def brute_s_fixed_count(self, budget: int = DEFAULT_STATE_BUDGET) -> int:
        """Count window states fixed by every lamp generator, by application."""
        if self.size > budget:
            raise BudgetExceededError(self.size, budget)
        per_level: list[set[int]] = []
        for level in self.levels:
            fixed: Optional[set[int]] = None
            for s in self.group.lamp_generators():
                cur = set(level.brute_fixed_indices(s, budget))
                fixed = cur if fixed is None else fixed & cur
            per_level.append(fixed if fixed is not None else set(range(level.size)))
        return prod(len(f) for f in per_level)

    def fixed_points(
        self,
        x: WreathElement,
        budget: int = DEFAULT_STATE_BUDGET,
        want_states: bool = False,
    ) -> Tuple[int, Optional[List[Tuple[int, ...]]]]:
        """Exact fixed-state count of x; the set itself only within budget.

        The diagonal action fixes a product state exactly when every
        coordinate is fixed, so the count is the product of per-level counts;
        each per-level count is obtained by direct application.
        """
        per_level = []
        for level in self.levels:
            if level.size > budget:
                raise BudgetExceededError(level.size, budget)
            per_level.append(level.brute_fixed_indices(x, budget))
        count = prod(len(f) for f in per_level)
        if not want_states:
            return count, None
        if count > budget:
            raise BudgetExceededError(count, budget)
        return count, [tuple(s) for s in product(*per_level)]

    def lamp_fixed_count_closed(self) -> int:
        """Closed-form count of states fixed by a lamp generator."""
        return prod(dat.lamp_fixed_count() for dat in self.data)

    def flat_index(self, state: Tuple[int, ...]) -> int:
        idx = 0
        for level, i in zip(self.levels, state):
            idx = idx * level.size + i
        return idx

    def state_at(self, idx: int) -> Tuple[int, ...]:
        out = []
        for level in reversed(self.levels):
            idx, r = divmod(idx, level.size)
            out.append(r)
        out.reverse()
        return tuple(out)

    def state_text(self, state: Tuple[int, ...]) -> str:
        return "*".join(level.state_text(i) for level, i in zip(self.levels, state))

    def parse_state(self, text: str, line: int | None = None) -> Tuple[int, ...]:
        parts = text.strip().split("*")
        if len(parts) != len(self.levels):
            raise TextParseError(
                f"window state needs {len(self.levels)} factors, got {len(parts)}", line
            )
        return tuple(
            level.parse_state_index(part, line) for level, part in zip(self.levels, parts)
        )

    def measure(self) -> "UniformMeasure":
        return UniformMeasure(self)


@dataclass(frozen=True)
class UniformMeasure:
    """The unique invariant probability measure of a transitive finite stage."""

    window: Window

    @property
    def point_mass(self) -> Fraction:
        return Fraction(1, self.window.size)

    def of(self, states: int | Iterable) -> Fraction:
        n = states if isinstance(states, int) else len(list(states))
        return Fraction(n, self.window.size)


@dataclass(frozen=True)
class StructureMap:
    """Coordinate projection from a finer window onto a coarser one."""

    source: Window
    target: Window
    positions: Tuple[int, ...]

    def apply(self, state: Tuple[int, ...]) -> Tuple[int, ...]:
        return tuple(state[p] for p in self.positions)

    def is_identity(self) -> bool:
        return len(self.source.levels) == len(self.target.levels) and self.positions == tuple(
            range(len(self.source.levels))
        )


def structure_map(target: Window, source: Window) -> StructureMap:
    """Projection source -> target; requires target's data to sit inside source's."""
    used: set[int] = set()
    positions: list[int] = []
    for dat in target.data:
        pos = next(
            (i for i, other in enumerate(source.data) if i not in used and other == dat),
            None,
        )
        if pos is None:
            raise WindowError("windows are not nested: missing factor in the finer window")
        used.add(pos)
        positions.append(pos)
    return StructureMap(source=source, target=target, positions=tuple(positions))


@dataclass
class PairCheck:
    target_index: int
    source_index: int
    equivariant: bool
    surjective: bool
    fibers_uniform: bool
    checked_states: int

    @property
    def ok(self) -> bool:
        return self.equivariant and self.surjective and self.fibers_uniform


@dataclass
class InverseSystemReport:
    pairs: List[PairCheck]
    identity_ok: bool
    composition_ok: Optional[bool]

    @property
    def ok(self) -> bool:
        return (
            self.identity_ok
            and all(p.ok for p in self.pairs)
            and self.composition_ok is not False
        )

    def to_dict(self) -> dict:
        return {
            "pairs": [
                {
                    "target": p.target_index,
                    "source": p.source_index,
                    "equivariant": p.equivariant,
                    "surjective": p.surjective,
                    "fibers_uniform": p.fibers_uniform,
                    "checked_states": p.checked_states,
                }
                for p in self.pairs
            ],
            "identity_ok": self.identity_ok,
            "composition_ok": self.composition_ok,
            "ok": self.ok,
        }


def check_inverse_system(
    chain: Sequence[Window], budget: int = DEFAULT_STATE_BUDGET
) -> InverseSystemReport:
    """Verify the inverse-system laws on a nested chain of windows.

    For every adjacent pair: the projection commutes with every generator on
    every state, is onto, and has fibers of one common size (so it pushes the
    uniform measure to the uniform measure).  For every triple i < j < k the
    two-step composition equals the direct projection, and the self-map of
    each window is the identity.
    """
    if not chain:
        return InverseSystemReport(pairs=[], identity_ok=True, composition_ok=None)
    pairs: List[PairCheck] = []
    n_gens = len(chain[0].group.generators())
    for idx in range(len(chain) - 1):
        small, big = chain[idx], chain[idx + 1]
        if big.size > budget:
            raise BudgetExceededError(big.size, budget)
        f = structure_map(small, big)
        equivariant = True
        image_counts: Dict[Tuple[int, ...], int] = {}
        big_tables = [big.tables(g) for g in range(n_gens)]
        small_tables = [small.tables(g) for g in range(n_gens)]
        checked = 0
        for s in big.iter_states():
            fs = f.apply(s)
            image_counts[fs] = image_counts.get(fs, 0) + 1
            for g in range(n_gens):
                gs = tuple(tab[i] for tab, i in zip(big_tables[g], s))
                gfs = tuple(tab[i] for tab, i in zip(small_tables[g], fs))
                if f.apply(gs) != gfs:
                    equivariant = False
            checked += 1
        surjective = len(image_counts) == small.size
        fiber_sizes = set(image_counts.values())
        fibers_uniform = surjective and len(fiber_sizes) == 1
        pairs.append(
            PairCheck(
                target_index=idx,
                source_index=idx + 1,
                equivariant=equivariant,
                surjective=surjective,
                fibers_uniform=fibers_uniform,
                checked_states=checked,
            )
        )
    identity_ok = all(
        structure_map(w, w).is_identity() for w in chain
    )
    composition_ok: Optional[bool] = None
    if len(chain) >= 3:
        composition_ok = True
        for i in range(len(chain) - 2):
            small, mid, big = chain[i], chain[i + 1], chain[i + 2]
            f_sm = structure_map(small, mid)
            f_mb = structure_map(mid, big)
            f_sb = structure_map(small, big)
            for s in big.iter_states():
                if f_sb.apply(s) != f_sm.apply(f_mb.apply(s)):
                    composition_ok = False
                    break
    return InverseSystemReport(pairs=pairs, identity_ok=identity_ok, composition_ok=composition_ok)


@dataclass
class StabilizerWitness:
    """Evidence that the identity thread of a window has the smallest possible
    stabilizer the finite stage can certify."""

    window_gammas: List[Tuple[str, bool]]
    ball_radius: int
    movers: List[str]
    fixers: List[str]

    @property
    def ok(self) -> bool:
        return all(moved for _, moved in self.window_gammas)

    def to_dict(self) -> dict:
        return {
            "window_gammas": [
                {"gamma": text, "moves_identity_thread": moved}
                for text, moved in self.window_gammas
            ],
            "ball_radius": self.ball_radius,
            "mover_count": len(self.movers),
            "fixer_count": len(self.fixers),
            "fixers": self.fixers,
            "ok": self.ok,
        }


def stabilizer_witness(window: Window, ball_radius: int = 1) -> StabilizerWitness:
    """Check that every window gamma moves the identity thread, and classify
    all ball elements as movers or fixers of that thread."""
    y = window.identity_thread()
    gammas = []
    for dat in window.data:
        moved = window.act(dat.gamma, y) != y
        gammas.append((dat.gamma.text(), moved))
    movers: list[str] = []
    fixers: list[str] = []
    for entry in window.group.ball(ball_radius):
        text = entry.element.text()
        if window.act(entry.element, y) != y:
            movers.append(text)
        else:
            fixers.append(text)
    return StabilizerWitness(
        window_gammas=gammas, ball_radius=ball_radius, movers=movers, fixers=fixers
    )
