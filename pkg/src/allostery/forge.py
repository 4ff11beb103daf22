"""Forging finite-index subgroups that witness allostery at one group element.

For a nontrivial element gamma = (g, delta), an admissible prime p and a
tolerance epsilon, the forge produces the subgroup

    A ~ {lamps whose coset sums over each class in E vanish mod p}
    semidirect (p^k Z)^m

encoded compactly as a :class:`SubgroupDatum` (p, k, l, E).  The construction
picks the smallest l and k satisfying the separation constraints:

  * l = |supp(g)| + 1, so E can hold every support class with room to spare;
  * k is minimal with p^{km} > l/epsilon while keeping delta and all pairwise
    support differences outside (p^k Z)^m;
  * E consists of the support classes padded with the smallest unused
    residues, in canonical order, so forging is reproducible.

Membership, the index formula p^{km} * p^{ld}, and the closed-form fraction of
states fixed by the lamp generators all read off the datum directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Tuple

from .base import CongruenceSubgroup, Vec, is_prime, is_zero, primes, minimal_exponent, sub, zero
from .errors import DatumInvariantError, ForgeError
from .wreath import WreathElement, format_element, parse_element

EpsilonLike = Fraction | int | str


def default_epsilon(i: int) -> Fraction:
    """Schedule 2^-(i+2): the tolerances sum to 1/2, so the running product
    of (1 - eps_i) stays above 1/2 at every stage."""
    if i < 0:
        raise ValueError("schedule index must be >= 0")
    return Fraction(1, 2 ** (i + 2))


def as_epsilon(value: EpsilonLike) -> Fraction:
    eps = Fraction(value)
    if not 0 < eps < 1:
        raise ForgeError(f"epsilon must lie strictly between 0 and 1, got {eps}")
    return eps


def prime_admissible(gamma: WreathElement, p: int, d: int) -> bool:
    """p is admissible unless some lamp value of gamma is divisible by p in
    every coordinate."""
    for _, val in gamma.lamp.entries:
        if all(c % p == 0 for c in val):
            return False
    return True


@dataclass(frozen=True)
class SubgroupDatum:
    """Encoded finite-index subgroup attached to one nontrivial element."""

    gamma: WreathElement
    p: int
    k: int
    l: int
    E: Tuple[Vec, ...]
    epsilon: Fraction
    d: int
    m: int

    @property
    def shift_subgroup(self) -> CongruenceSubgroup:
        return CongruenceSubgroup(self.p, self.k, self.m)

    @property
    def shift_index(self) -> int:
        """Index of the congruence subgroup in Z^m: p^{km}."""
        return self.p ** (self.k * self.m)

    def index(self) -> int:
        """Total index: p^{km} from the shift part times p^{ld} from the lamps."""
        return self.shift_index * self.p ** (self.l * self.d)

    def fixed_fraction(self) -> Fraction:
        """Exact fraction of cosets fixed by every lamp generator: 1 - l/p^{km}."""
        return 1 - Fraction(self.l, self.shift_index)

    def lamp_fixed_count(self) -> int:
        """Closed-form count of cosets fixed by a lamp generator:
        (p^{km} - l) * p^{ld}."""
        return (self.shift_index - self.l) * self.p ** (self.l * self.d)

    def coset_sums(self, x: WreathElement) -> list[Vec]:
        """For each class in E, the sum of x's lamp values over that class,
        reduced mod p."""
        sub_ = self.shift_subgroup
        acc = {q: [0] * self.d for q in self.E}
        for pos, val in x.lamp.entries:
            q = sub_.reduce(pos)
            if q in acc:
                bucket = acc[q]
                for i, c in enumerate(val):
                    bucket[i] += c
        return [tuple(c % self.p for c in acc[q]) for q in self.E]

    def contains(self, x: WreathElement) -> bool:
        """Membership test: shift in the congruence kernel and every E-class
        lamp sum divisible by p."""
        if not self.shift_subgroup.contains(x.shift):
            return False
        return all(is_zero(s) for s in self.coset_sums(x))

    def validate(self) -> None:
        """Check every structural invariant; raise DatumInvariantError on the
        first violation."""
        if not is_prime(self.p):
            raise DatumInvariantError(f"p={self.p} is not prime")
        if self.k < 1:
            raise DatumInvariantError("k must be >= 1")
        if not 0 < self.epsilon < 1:
            raise DatumInvariantError(f"epsilon {self.epsilon} outside (0,1)")
        if self.gamma.is_identity():
            raise DatumInvariantError("gamma must be nontrivial")
        sub_ = self.shift_subgroup
        supp = self.gamma.lamp.support
        if self.l <= len(supp):
            raise DatumInvariantError(f"l={self.l} must exceed |supp|={len(supp)}")
        if not Fraction(self.l) < self.epsilon * self.shift_index:
            raise DatumInvariantError(
                f"l={self.l} not below epsilon*index = {self.epsilon * self.shift_index}"
            )
        if len(self.E) != self.l or len(set(self.E)) != self.l:
            raise DatumInvariantError("E must hold exactly l distinct residues")
        for q in self.E:
            if sub_.reduce(q) != q:
                raise DatumInvariantError(f"E entry {q} is not a canonical residue")
        classes = [sub_.reduce(pos) for pos in supp]
        if len(set(classes)) != len(classes):
            raise DatumInvariantError("two support positions share a residue class")
        if not set(classes) <= set(self.E):
            raise DatumInvariantError("some support class is missing from E")
        if not is_zero(self.gamma.shift) and sub_.contains(self.gamma.shift):
            raise DatumInvariantError("nontrivial shift of gamma lies in the kernel")
        for _, val in self.gamma.lamp.entries:
            if len(val) != self.d:
                raise DatumInvariantError("lamp value rank differs from d")
            if all(c % self.p == 0 for c in val):
                raise DatumInvariantError(f"lamp value {val} divisible by p={self.p}")
        if len(self.gamma.shift) != self.m:
            raise DatumInvariantError("shift rank differs from m")

    def to_dict(self) -> dict:
        return {
            "gamma": format_element(self.gamma),
            "p": self.p,
            "k": self.k,
            "l": self.l,
            "E": [list(q) for q in self.E],
            "epsilon": f"{self.epsilon.numerator}/{self.epsilon.denominator}",
            "d": self.d,
            "m": self.m,
        }

    @classmethod
    def from_dict(cls, rec: dict) -> "SubgroupDatum":
        return cls(
            gamma=parse_element(rec["gamma"], d=rec["d"], m=rec["m"]),
            p=rec["p"],
            k=rec["k"],
            l=rec["l"],
            E=tuple(tuple(q) for q in rec["E"]),
            epsilon=Fraction(rec["epsilon"]),
            d=rec["d"],
            m=rec["m"],
        )


def forge(gamma: WreathElement, p: int, epsilon: EpsilonLike, d: int, m: int) -> SubgroupDatum:
    """Construct the subgroup datum for one nontrivial gamma.

    Raises ForgeError when gamma is trivial, p is inadmissible for its lamp
    values, or epsilon is out of range.  The result always passes
    :meth:`SubgroupDatum.validate`.
    """
    eps = as_epsilon(epsilon)
    if gamma.is_identity():
        raise ForgeError("cannot forge a subgroup for the identity")
    if not is_prime(p):
        raise ForgeError(f"{p} is not prime")
    if not prime_admissible(gamma, p, d):
        raise ForgeError(f"prime {p} divides a lamp value of {format_element(gamma)}")

    supp = gamma.lamp.support
    l = len(supp) + 1
    avoid: list[Vec] = []
    if not is_zero(gamma.shift):
        avoid.append(gamma.shift)
    for i in range(len(supp)):
        for j in range(i + 1, len(supp)):
            avoid.append(sub(supp[j], supp[i]))
    k = minimal_exponent(p, m, avoid, Fraction(l, eps))

    shift_sub = CongruenceSubgroup(p, k, m)
    classes = {shift_sub.reduce(pos) for pos in supp}
    E = sorted(classes)
    for q in shift_sub.residues():
        if len(E) == l:
            break
        if q not in classes:
            E.append(q)
    datum = SubgroupDatum(
        gamma=gamma, p=p, k=k, l=l, E=tuple(sorted(E)), epsilon=eps, d=d, m=m
    )
    datum.validate()
    return datum


@dataclass(frozen=True)
class PrimeAssignment:
    """Deterministic (gamma, prime, epsilon) triples with pairwise distinct primes."""

    triples: Tuple[Tuple[WreathElement, int, Fraction], ...]

    def forge_all(self, d: int, m: int) -> list[SubgroupDatum]:
        return [forge(g, p, eps, d, m) for g, p, eps in self.triples]


def assign_primes(
    gammas: Sequence[WreathElement],
    epsilons: Callable[[int], Fraction] | EpsilonLike = default_epsilon,
    d: int = 1,
) -> PrimeAssignment:
    """Assign to each gamma, in order, the smallest unused admissible prime.

    Admissible primes always exist: only finitely many primes divide every
    coordinate of some lamp value.  `epsilons` is either a schedule i -> eps_i
    or a single value used for every gamma.
    """
    eps_of = epsilons if callable(epsilons) else (lambda i, v=as_epsilon(epsilons): v)
    seen: set[WreathElement] = set()
    for g in gammas:
        if g.is_identity():
            raise ForgeError("gamma list must not contain the identity")
        if g in seen:
            raise ForgeError(f"duplicate gamma {format_element(g)}")
        seen.add(g)
    used: set[int] = set()
    triples = []
    for i, g in enumerate(gammas):
        for p in primes():
            if p in used:
                continue
            if prime_admissible(g, p, d):
                used.add(p)
                triples.append((g, p, as_epsilon(eps_of(i))))
                break
    return PrimeAssignment(tuple(triples))
