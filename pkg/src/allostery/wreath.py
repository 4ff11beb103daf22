"""Exact arithmetic in the wreath product Z^d wr Z^m.

An element is a pair (lamp, shift): `shift` lives in Z^m and `lamp` is a
finitely supported function Z^m -> Z^d, stored sparsely with zero values
pruned.  The product is

    (f, a) * (g, b) = (f + g translated by a, a + b)

so the left factor's shift moves the right factor's lamps before adding.
Everything is immutable and hashable; canonical text forms give deterministic
ordering for ball enumeration and certificate output.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, Tuple

from .base import Vec, add, is_zero, neg, zero
from .errors import BudgetExceededError, RankMismatchError, TextParseError

Word = Tuple[int, ...]

DEFAULT_MAX_RADIUS = 8


@dataclass(frozen=True)
class Lamp:
    """Finitely supported map from positions in Z^m to nonzero vectors in Z^d.

    `entries` is sorted by position and contains no zero values; construct
    through :meth:`of` to get this normal form.
    """

    entries: Tuple[Tuple[Vec, Vec], ...] = ()

    def __post_init__(self):
        positions = [pos for pos, _ in self.entries]
        if positions != sorted(positions) or len(set(positions)) != len(positions):
            raise ValueError("lamp entries must be sorted by distinct positions")
        for _, val in self.entries:
            if is_zero(val):
                raise ValueError("lamp values must be nonzero")

    @classmethod
    def of(cls, items: Mapping[Vec, Vec] | Iterable[Tuple[Vec, Vec]]) -> "Lamp":
        pairs = items.items() if isinstance(items, Mapping) else items
        acc: dict[Vec, Vec] = {}
        for pos, val in pairs:
            pos, val = tuple(pos), tuple(val)
            if pos in acc:
                val = add(acc[pos], val)
            acc[pos] = val
        return cls(tuple(sorted((p, v) for p, v in acc.items() if not is_zero(v))))

    @property
    def support(self) -> Tuple[Vec, ...]:
        return tuple(pos for pos, _ in self.entries)

    def get(self, pos: Vec) -> Vec | None:
        for p, v in self.entries:
            if p == pos:
                return v
        return None

    def is_zero(self) -> bool:
        return not self.entries

    def add(self, other: "Lamp") -> "Lamp":
        return Lamp.of(list(self.entries) + list(other.entries))

    def neg(self) -> "Lamp":
        return Lamp(tuple((p, neg(v)) for p, v in self.entries))

    def shifted(self, by: Vec) -> "Lamp":
        """The translate: position lambda now holds the value formerly at lambda - by."""
        return Lamp(tuple(sorted((add(p, by), v) for p, v in self.entries)))

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class WreathElement:
    lamp: Lamp
    shift: Vec

    def __mul__(self, other: "WreathElement") -> "WreathElement":
        if len(self.shift) != len(other.shift):
            raise RankMismatchError("cannot multiply elements with different shift ranks")
        return WreathElement(self.lamp.add(other.lamp.shifted(self.shift)), add(self.shift, other.shift))

    def inverse(self) -> "WreathElement":
        sh = neg(self.shift)
        return WreathElement(self.lamp.neg().shifted(sh), sh)

    def is_identity(self) -> bool:
        return self.lamp.is_zero() and is_zero(self.shift)

    def text(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"WreathElement({format_element(self)!r})"


def format_vec(v: Vec) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def format_element(x: WreathElement) -> str:
    """Canonical text form `{pos:vec,...};shift`, lamp entries sorted by position."""
    lamp = ",".join(f"{format_vec(p)}:{format_vec(v)}" for p, v in x.lamp.entries)
    return "{" + lamp + "};" + format_vec(x.shift)


_VEC_RE = re.compile(r"\((-?\d+(?:,-?\d+)*)\)")


def _parse_vec(text: str, pos: int, line: int | None = None) -> Tuple[Vec, int]:
    m = _VEC_RE.match(text, pos)
    if not m:
        raise TextParseError("expected a vector like (0) or (1,-2)", line, pos + 1)
    return tuple(int(t) for t in m.group(1).split(",")), m.end()


def parse_element(
    text: str,
    d: int | None = None,
    m: int | None = None,
    line: int | None = None,
) -> WreathElement:
    """Parse the canonical element form, optionally checking ranks d and m."""
    s = text.strip()
    pos = 0
    if not s.startswith("{"):
        raise TextParseError("element must start with '{'", line, 1)
    pos = 1
    entries: list[Tuple[Vec, Vec]] = []
    if s[pos : pos + 1] != "}":
        while True:
            p, pos = _parse_vec(s, pos, line)
            if s[pos : pos + 1] != ":":
                raise TextParseError("expected ':' between position and value", line, pos + 1)
            v, pos = _parse_vec(s, pos + 1, line)
            entries.append((p, v))
            if s[pos : pos + 1] == ",":
                pos += 1
                continue
            break
    if s[pos : pos + 1] != "}":
        raise TextParseError("expected '}' closing the lamp part", line, pos + 1)
    pos += 1
    if s[pos : pos + 1] != ";":
        raise TextParseError("expected ';' before the shift part", line, pos + 1)
    shift, pos = _parse_vec(s, pos + 1, line)
    if pos != len(s):
        raise TextParseError("trailing characters after element", line, pos + 1)
    x = WreathElement(Lamp.of(entries), shift)
    if m is not None and len(shift) != m:
        raise TextParseError(f"shift rank {len(shift)} != m={m}", line, 1)
    if d is not None:
        for p, v in x.lamp.entries:
            if len(v) != d:
                raise TextParseError(f"lamp value rank {len(v)} != d={d}", line, 1)
    if m is not None:
        for p, _ in x.lamp.entries:
            if len(p) != m:
                raise TextParseError(f"lamp position rank {len(p)} != m={m}", line, 1)
    return x


@dataclass(frozen=True)
class BallEntry:
    element: WreathElement
    word: Word


@dataclass(frozen=True)
class WreathGroup:
    """Ambient group Z^d wr Z^m together with its standard generating set.

    Generators are ordered lamp-first: s_1, s_1^{-1}, ..., s_d, s_d^{-1},
    then t_1, t_1^{-1}, ..., t_m, t_m^{-1}.  Words are tuples of indices into
    this list and evaluate left to right.
    """

    d: int
    m: int

    def __post_init__(self):
        if self.d < 1 or self.m < 1:
            raise ValueError("ranks d and m must be >= 1")

    def identity(self) -> WreathElement:
        return WreathElement(Lamp(), zero(self.m))

    def lamp_generator(self, i: int, sign: int = 1) -> WreathElement:
        """s_i^(sign): a single lamp at the origin holding +-e_i of Z^d."""
        if not 0 <= i < self.d:
            raise ValueError(f"lamp generator index {i} out of range")
        val = tuple(sign if j == i else 0 for j in range(self.d))
        return WreathElement(Lamp.of({zero(self.m): val}), zero(self.m))

    def shift_generator(self, j: int, sign: int = 1) -> WreathElement:
        if not 0 <= j < self.m:
            raise ValueError(f"shift generator index {j} out of range")
        return WreathElement(Lamp(), tuple(sign if i == j else 0 for i in range(self.m)))

    def generators(self) -> Tuple[WreathElement, ...]:
        gens: list[WreathElement] = []
        for i in range(self.d):
            gens.append(self.lamp_generator(i, 1))
            gens.append(self.lamp_generator(i, -1))
        for j in range(self.m):
            gens.append(self.shift_generator(j, 1))
            gens.append(self.shift_generator(j, -1))
        return tuple(gens)

    def generator_names(self) -> Tuple[str, ...]:
        names: list[str] = []
        for i in range(self.d):
            names += [f"s{i + 1}", f"S{i + 1}"]
        for j in range(self.m):
            names += [f"t{j + 1}", f"T{j + 1}"]
        return tuple(names)

    def inverse_generator_index(self, g: int) -> int:
        return g ^ 1  # generators come in adjacent (x, x^{-1}) pairs

    def lamp_generators(self) -> Tuple[WreathElement, ...]:
        return tuple(self.lamp_generator(i) for i in range(self.d))

    def validate_element(self, x: WreathElement) -> None:
        if len(x.shift) != self.m:
            raise RankMismatchError(f"shift rank {len(x.shift)} != m={self.m}")
        for p, v in x.lamp.entries:
            if len(p) != self.m:
                raise RankMismatchError(f"lamp position rank {len(p)} != m={self.m}")
            if len(v) != self.d:
                raise RankMismatchError(f"lamp value rank {len(v)} != d={self.d}")

    def word_element(self, word: Iterable[int]) -> WreathElement:
        x = self.identity()
        gens = self.generators()
        for g in word:
            x = x * gens[g]
        return x

    def word_name(self, word: Word) -> str:
        if not word:
            return "e"
        names = self.generator_names()
        return ".".join(names[g] for g in word)

    def parse_word(self, text: str, line: int | None = None) -> Word:
        s = text.strip()
        if s == "e":
            return ()
        lookup = {name: i for i, name in enumerate(self.generator_names())}
        word: list[int] = []
        for token in s.split("."):
            if token not in lookup:
                raise TextParseError(f"unknown generator {token!r}", line)
            word.append(lookup[token])
        return tuple(word)

    def parse_element(self, text: str, line: int | None = None) -> WreathElement:
        return parse_element(text, d=self.d, m=self.m, line=line)

    def ball(self, radius: int, max_radius: int = DEFAULT_MAX_RADIUS) -> list[BallEntry]:
        """All elements of word length <= radius, each with a witnessing word.

        Ordered by word length, then lexicographically by canonical text
        within each length; the identity comes first.  The stored word is the
        first one found when expanding parents in that order, so the listing
        is fully deterministic.
        """
        if radius < 0:
            raise ValueError("radius must be >= 0")
        if radius > max_radius:
            raise BudgetExceededError(radius, max_radius, what="ball radius")
        gens = self.generators()
        seen: dict[WreathElement, Word] = {self.identity(): ()}
        out: list[BallEntry] = [BallEntry(self.identity(), ())]
        layer: list[BallEntry] = [out[0]]
        for _ in range(radius):
            found: dict[WreathElement, Word] = {}
            for entry in layer:
                for g, gen in enumerate(gens):
                    y = entry.element * gen
                    if y in seen or y in found:
                        continue
                    found[y] = entry.word + (g,)
            layer = [
                BallEntry(el, found[el])
                for el in sorted(found, key=format_element)
            ]
            seen.update(found)
            out.extend(layer)
        return out

    def ball_elements(self, radius: int, max_radius: int = DEFAULT_MAX_RADIUS) -> list[WreathElement]:
        return [entry.element for entry in self.ball(radius, max_radius)]
