"""Finitely supported interaction vectors and their paired norms.

A coefficient vector maps canonical nonempty site sets to scalars and carries
a tag saying which lattice (original or image) its index sets live on.  Two
norms are paired by the bilinear form ``sum_X K1(X) K2(X)``:

* ``norm(r)``    -- sup over sites x of  sum_{X containing x} |K(X)| e^{r l(x,X)}
* ``dual_norm(r)`` -- sum over sites x of  sup_{X containing x} |K(X)| e^{-r l(x,X)} / |X|

Both are computed exactly over the finite support (at r=0 entirely in rational
arithmetic when the values are rational).  Scalars may be ints, Fractions,
floats, or complex numbers; exact and float modes are never mixed silently by
the library itself -- a vector is whatever its values are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import (
    DimensionMismatchError,
    DuplicateEntryError,
    EmptySetError,
    InvalidParameterError,
    LatticeTagError,
)
from .lattice import Site, SiteSet, canonical_set, extent

Scalar = Union[int, Fraction, float, complex]

ORIGINAL = "original"
IMAGE = "image"
_TAGS = (ORIGINAL, IMAGE)


def _exp_weight(r: float, distance: int) -> Scalar:
    """``e**(r*distance)``, kept as the exact integer 1 when r == 0."""
    if r == 0:
        return 1
    try:
        return math.exp(r * distance)
    except OverflowError:
        return math.inf


def _decay_weight(r: float, distance: int) -> Scalar:
    """``e**(-r*distance)``, kept as the exact integer 1 when r == 0."""
    if r == 0:
        return 1
    return math.exp(-r * distance)


def orbit_rep(X: SiteSet) -> SiteSet:
    """Translate ``X`` so its lexicographically smallest site sits at the origin."""
    if not X:
        raise EmptySetError("the empty set has no orbit representative")
    base = X[0]
    return tuple(tuple(c - b for c, b in zip(site, base)) for site in X)


@dataclass(frozen=True)
class CoefficientVector:
    """Finite-support map from canonical nonempty site sets to scalars."""

    dimension: int
    lattice: str
    entries: dict[SiteSet, Scalar] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.lattice not in _TAGS:
            raise LatticeTagError(f"lattice tag must be one of {_TAGS}, got {self.lattice!r}")
        clean: dict[SiteSet, Scalar] = {}
        for X, v in sorted(self.entries.items()):
            X = canonical_set(X)
            if not X:
                raise EmptySetError("coefficient vectors are indexed by nonempty sets")
            if len(X[0]) != self.dimension:
                raise DimensionMismatchError(
                    f"set {X} has dimension {len(X[0])}, vector expects {self.dimension}"
                )
            if v != 0:
                clean[X] = v
        object.__setattr__(self, "entries", clean)

    # -- construction helpers ------------------------------------------------

    @classmethod
    def zero(cls, dimension: int, lattice: str) -> "CoefficientVector":
        return cls(dimension, lattice, {})

    @classmethod
    def delta(cls, X: Iterable[Site], value: Scalar, lattice: str) -> "CoefficientVector":
        key = canonical_set(X)
        if not key:
            raise EmptySetError("coefficient vectors are indexed by nonempty sets")
        return cls(len(key[0]), lattice, {key: value})

    # -- basic algebra ---------------------------------------------------------

    @property
    def support(self) -> tuple[SiteSet, ...]:
        return tuple(self.entries)

    def value(self, X: Iterable[Site]) -> Scalar:
        return self.entries.get(canonical_set(X), 0)

    def is_zero(self) -> bool:
        return not self.entries

    def _check_mate(self, other: "CoefficientVector") -> None:
        if self.lattice != other.lattice:
            raise LatticeTagError(
                f"cannot combine vectors on {self.lattice!r} and {other.lattice!r} lattices"
            )
        if self.dimension != other.dimension:
            raise DimensionMismatchError(
                f"cannot combine vectors of dimension {self.dimension} and {other.dimension}"
            )

    def __add__(self, other: "CoefficientVector") -> "CoefficientVector":
        self._check_mate(other)
        out = dict(self.entries)
        for X, v in other.entries.items():
            out[X] = out.get(X, 0) + v
        return CoefficientVector(self.dimension, self.lattice, out)

    def __sub__(self, other: "CoefficientVector") -> "CoefficientVector":
        return self + (-1) * other

    def __rmul__(self, c: Scalar) -> "CoefficientVector":
        return CoefficientVector(
            self.dimension, self.lattice, {X: c * v for X, v in self.entries.items()}
        )

    def __neg__(self) -> "CoefficientVector":
        return (-1) * self

    def retag(self, lattice: str) -> "CoefficientVector":
        """Reinterpret the same index sets on the other lattice (both are Z^d)."""
        return CoefficientVector(self.dimension, lattice, dict(self.entries))

    # -- norms and pairing -----------------------------------------------------

    def _support_sites(self) -> tuple[Site, ...]:
        seen: set[Site] = set()
        for X in self.entries:
            seen.update(X)
        return tuple(sorted(seen))

    def norm(self, r: float = 0) -> Scalar:
        """Sup over sites of the weighted absolute-value sums of sets through them.

        Sites outside every support set contribute empty sums, so restricting
        the sup to support sites is exact, not a truncation.
        """
        if r < 0:
            raise InvalidParameterError(f"norm weight exponent must be >= 0, got {r}")
        best: Scalar = 0
        for x in self._support_sites():
            total: Scalar = 0
            for X, v in self.entries.items():
                if x in X:
                    total += abs(v) * _exp_weight(r, extent(x, X))
            if total > best:
                best = total
        return best

    def dual_norm(self, r: float = 0) -> Scalar:
        """Sum over sites of the largest size-discounted weighted entry through them."""
        if r < 0:
            raise InvalidParameterError(f"norm weight exponent must be >= 0, got {r}")
        total: Scalar = 0
        for x in self._support_sites():
            best: Scalar = 0
            for X, v in self.entries.items():
                if x in X:
                    a = abs(v)
                    if isinstance(a, int):
                        a = Fraction(a)
                    term = (a / len(X)) * _decay_weight(r, extent(x, X))
                    if term > best:
                        best = term
            total += best
        return total

    def pairing(self, other: "CoefficientVector") -> Scalar:
        """Bilinear form ``sum_X self(X) * other(X)`` over the common support."""
        self._check_mate(other)
        small, big = self.entries, other.entries
        if len(big) < len(small):
            small, big = big, small
        total: Scalar = 0
        for X, v in small.items():
            if X in big:
                total += v * big[X]
        return total

    def is_even(self) -> bool:
        """True when every support set has even cardinality (vacuously for zero)."""
        return all(len(X) % 2 == 0 for X in self.entries)

    # -- serialization -----------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "lattice": self.lattice,
            "terms": [
                {"sites": [list(site) for site in X], "value": _scalar_to_json(v)}
                for X, v in self.entries.items()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "CoefficientVector":
        dimension = int(data["dimension"])
        lattice = str(data["lattice"])
        entries: dict[SiteSet, Scalar] = {}
        for term in data.get("terms", ()):
            X = canonical_set(tuple(int(c) for c in site) for site in term["sites"])
            if X in entries:
                raise DuplicateEntryError(f"set {X} listed more than once")
            entries[X] = _scalar_from_json(term["value"])
        return cls(dimension, lattice, entries)


def _scalar_to_json(v: Scalar):
    if isinstance(v, bool):
        raise InvalidParameterError("boolean is not a coefficient value")
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def _scalar_from_json(raw) -> Scalar:
    if isinstance(raw, str):
        return Fraction(raw)
    if isinstance(raw, (list, tuple)):
        re_part, im_part = raw
        return complex(float(re_part), float(im_part))
    if isinstance(raw, bool):
        raise InvalidParameterError("boolean is not a coefficient value")
    if isinstance(raw, (int, float)):
        return raw
    raise InvalidParameterError(f"cannot parse coefficient value {raw!r}")


@dataclass(frozen=True)
class OrbitVector:
    """Translation-invariant vector: one scalar per translation orbit.

    Keys are orbit representatives (smallest site at the origin).  With
    ``even_only`` set, odd-cardinality orbits are rejected.
    """

    dimension: int
    entries: dict[SiteSet, Scalar] = field(default_factory=dict)
    even_only: bool = False

    def __post_init__(self) -> None:
        clean: dict[SiteSet, Scalar] = {}
        for X, v in sorted(self.entries.items()):
            X = canonical_set(X)
            if not X:
                raise EmptySetError("orbit vectors are indexed by nonempty orbits")
            if len(X[0]) != self.dimension:
                raise DimensionMismatchError(
                    f"orbit {X} has dimension {len(X[0])}, vector expects {self.dimension}"
                )
            if X != orbit_rep(X):
                raise InvalidParameterError(f"key {X} is not an orbit representative")
            if self.even_only and len(X) % 2 == 1:
                raise InvalidParameterError(
                    f"orbit {X} has odd cardinality in an even-only vector"
                )
            if v != 0:
                clean[X] = v
        object.__setattr__(self, "entries", clean)

    @property
    def support(self) -> tuple[SiteSet, ...]:
        return tuple(self.entries)

    def value(self, X: Iterable[Site]) -> Scalar:
        key = canonical_set(X)
        if not key:
            raise EmptySetError("orbit vectors are indexed by nonempty orbits")
        return self.entries.get(orbit_rep(key), 0)

    def norm0(self) -> Scalar:
        """Exact unweighted norm: each orbit of shape X has |X| translates through a site."""
        total: Scalar = 0
        for X, v in self.entries.items():
            total += len(X) * abs(v)
        return total
