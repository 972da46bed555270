"""Geometry of the original and image lattices.

Sites are integer coordinate tuples; finite site sets are kept in a canonical
form (lexicographically sorted, no duplicates) so that they can serve as exact
dictionary keys.  The image lattice indexes a partition of the original
lattice into congruent cubical blocks of ``b**d`` sites.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import DimensionMismatchError, EmptySetError, InvalidParameterError

Site = tuple[int, ...]
SiteSet = tuple[Site, ...]  # canonical: sorted lexicographically, deduplicated


@dataclass(frozen=True)
class Geometry:
    """Blocking geometry: lattice dimension and blocking factor."""

    dimension: int
    blocking_factor: int

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise InvalidParameterError(f"dimension must be >= 1, got {self.dimension}")
        if self.blocking_factor < 2:
            raise InvalidParameterError(
                f"blocking factor must be >= 2, got {self.blocking_factor}"
            )

    @property
    def odd_blocking(self) -> bool:
        return self.blocking_factor % 2 == 1

    @property
    def block_size(self) -> int:
        """Number of original-lattice sites per block."""
        return self.blocking_factor**self.dimension


def canonical_set(sites: Iterable[Site]) -> SiteSet:
    """Sort and deduplicate ``sites``; all sites must share one dimension."""
    out = tuple(sorted(set(tuple(s) for s in sites)))
    if out:
        dim = len(out[0])
        for s in out:
            if len(s) != dim:
                raise DimensionMismatchError(
                    f"sites of dimension {dim} and {len(s)} mixed in one set"
                )
    return out


def block(y: Site, geom: Geometry) -> SiteSet:
    """The block of original-lattice sites assigned to image site ``y``.

    For odd b the block is centered on ``b*y``; for even b it is the cube
    whose coordinates run from ``b*y - (b-2)/2`` to ``b*y + b/2``.
    """
    if len(y) != geom.dimension:
        raise DimensionMismatchError(
            f"site {y} has dimension {len(y)}, geometry expects {geom.dimension}"
        )
    b = geom.blocking_factor
    lo = (b - 1) // 2 if geom.odd_blocking else (b - 2) // 2
    ranges = [range(b * yi - lo, b * yi - lo + b) for yi in y]
    return tuple(itertools.product(*ranges))


def region(image_sites: SiteSet, geom: Geometry) -> SiteSet:
    """Union of the blocks of every site in ``image_sites`` (disjoint by tiling)."""
    if not image_sites:
        raise EmptySetError("region of the empty site set is undefined")
    out: list[Site] = []
    for y in image_sites:
        out.extend(block(y, geom))
    return canonical_set(out)


def block_index(x: Site, geom: Geometry) -> Site:
    """The unique image site whose block contains ``x`` (inverse of `block`)."""
    b = geom.blocking_factor
    off = (b - 1) // 2 if geom.odd_blocking else (b - 2) // 2
    return tuple((xi + off) // b for xi in x)


def scale_set(Z: SiteSet, geom: Geometry) -> SiteSet:
    """Multiply every coordinate of every site by the blocking factor."""
    if not Z:
        raise EmptySetError("cannot scale the empty site set")
    b = geom.blocking_factor
    return tuple(tuple(b * c for c in site) for site in Z)  # scaling preserves lex order


def unscale_set(Z: SiteSet, geom: Geometry) -> SiteSet | None:
    """Divide every coordinate by the blocking factor, or None if any is indivisible."""
    if not Z:
        raise EmptySetError("cannot unscale the empty site set")
    b = geom.blocking_factor
    for site in Z:
        for c in site:
            if c % b != 0:
                return None
    return tuple(tuple(c // b for c in site) for site in Z)


def decompose_by_blocks(Z: SiteSet, geom: Geometry) -> dict[Site, SiteSet]:
    """Partition ``Z`` into its nonempty intersections with blocks, keyed by block index."""
    if not Z:
        raise EmptySetError("cannot decompose the empty site set")
    parts: dict[Site, list[Site]] = {}
    for x in Z:
        parts.setdefault(block_index(x, geom), []).append(x)
    return {n: tuple(sites) for n, sites in sorted(parts.items())}


def dist(x: Site, y: Site) -> int:
    """Chebyshev (coordinate-max) distance; integer-valued and scale-homogeneous."""
    return max(abs(a - b) for a, b in zip(x, y))


def extent(x: Site, X: SiteSet) -> int:
    """Farthest Chebyshev distance from ``x`` to a site of ``X``; 0 for empty ``X``."""
    if not X:
        return 0
    return max(dist(x, y) for y in X)


def sites_in_box(radius: int, dimension: int) -> SiteSet:
    """All sites with every coordinate in ``[-radius, radius]``."""
    if radius < 0:
        raise InvalidParameterError(f"box radius must be >= 0, got {radius}")
    return tuple(itertools.product(range(-radius, radius + 1), repeat=dimension))


def max_coordinate(X: SiteSet) -> int:
    """Largest absolute coordinate appearing in ``X`` (0 for the empty set)."""
    return max((abs(c) for site in X for c in site), default=0)


def line_window(n_sites: int, dimension: int) -> SiteSet:
    """``n_sites`` adjacent sites along the first axis starting at the origin."""
    if n_sites < 1:
        raise InvalidParameterError(f"window needs at least 1 site, got {n_sites}")
    return tuple((k,) + (0,) * (dimension - 1) for k in range(n_sites))


def site_set_to_json(X: SiteSet) -> list[list[int]]:
    return [list(site) for site in X]


def site_set_from_json(data: Iterable[Iterable[int]]) -> SiteSet:
    return canonical_set(tuple(int(c) for c in site) for site in data)


def parse_site_set(text: str) -> SiteSet:
    """Parse a JSON array of coordinate arrays, e.g. ``[[-1],[0],[1]]``."""
    return site_set_from_json(json.loads(text))


def geometry_from_mapping(data: Mapping) -> Geometry:
    return Geometry(dimension=int(data["d"]), blocking_factor=int(data["b"]))
