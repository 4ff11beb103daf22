"""The translation group Z^m and its congruence subgroups of prime-power index.

Elements are plain tuples of unbounded Python integers, so all arithmetic is
exact.  A congruence subgroup (p^k Z)^m is described by its prime p and
exponent k; it is automatically normal and has index p^{km}.  These subgroups
are the separation devices used by the subgroup forge: any finite set of
nonzero vectors survives reduction mod p^k once k is large enough.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import count, product
from typing import Iterable, Iterator, Tuple

from .errors import RankMismatchError

Vec = Tuple[int, ...]


def zero(rank: int) -> Vec:
    return (0,) * rank


def add(a: Vec, b: Vec) -> Vec:
    """Coordinatewise sum; the group law of Z^m."""
    if len(a) != len(b):
        raise RankMismatchError(f"cannot add vectors of ranks {len(a)} and {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def neg(a: Vec) -> Vec:
    return tuple(-x for x in a)


def sub(a: Vec, b: Vec) -> Vec:
    if len(a) != len(b):
        raise RankMismatchError(f"cannot subtract vectors of ranks {len(a)} and {len(b)}")
    return tuple(x - y for x, y in zip(a, b))


def is_zero(a: Vec) -> bool:
    return all(x == 0 for x in a)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes() -> Iterator[int]:
    """All primes in increasing order."""
    yield 2
    for n in count(3, 2):
        if is_prime(n):
            yield n


@dataclass(frozen=True)
class CongruenceSubgroup:
    """The subgroup (p^k Z)^m of Z^m, of index p^{km}."""

    prime: int
    exponent: int
    rank: int

    def __post_init__(self):
        if not is_prime(self.prime):
            raise ValueError(f"{self.prime} is not prime")
        if self.exponent < 1:
            raise ValueError("exponent must be >= 1")
        if self.rank < 1:
            raise ValueError("rank must be >= 1")

    @property
    def modulus(self) -> int:
        return self.prime ** self.exponent

    @property
    def index(self) -> int:
        return self.prime ** (self.exponent * self.rank)

    def reduce(self, e: Vec) -> Vec:
        """Canonical residue of e, coordinates in [0, p^k)."""
        if len(e) != self.rank:
            raise RankMismatchError(f"expected rank {self.rank}, got {len(e)}")
        q = self.modulus
        return tuple(x % q for x in e)

    def contains(self, e: Vec) -> bool:
        """True iff every coordinate of e is divisible by p^k."""
        return is_zero(self.reduce(e))

    def residues(self) -> Iterator[Vec]:
        """All canonical residues in lexicographic order."""
        return product(range(self.modulus), repeat=self.rank)

    def residue_sum(self, a: Vec, b: Vec) -> Vec:
        q = self.modulus
        return tuple((x + y) % q for x, y in zip(a, b))


def minimal_exponent(
    p: int,
    rank: int,
    avoid: Iterable[Vec],
    index_bound: int | Fraction,
) -> int:
    """Least k >= 1 such that (p^k Z)^rank has index > index_bound and misses
    every vector in `avoid`.

    The avoided vectors must be nonzero: a nonzero vector falls outside
    (p^k Z)^rank as soon as p^k exceeds the largest power of p dividing all of
    its coordinates, so the scan below terminates.
    """
    avoid = [tuple(v) for v in avoid]
    for v in avoid:
        if len(v) != rank:
            raise RankMismatchError(f"avoid vector {v} has rank {len(v)}, expected {rank}")
        if is_zero(v):
            raise ValueError("the zero vector cannot be separated from the kernel")
    for k in count(1):
        sub = CongruenceSubgroup(p, k, rank)
        if sub.index <= index_bound:
            continue
        if any(sub.contains(v) for v in avoid):
            continue
        return k
    raise AssertionError("unreachable")
