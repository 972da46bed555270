"""Exhaustive spin enumeration on finite site lists.

Every exact quantity in the library reduces to a normalized sum over all
``2**n`` assignments of +/-1 spins to ``n`` sites.  Configurations are indexed
by an integer counter: bit ``i`` of the counter gives the spin of site ``i``
in the set's canonical order (bit 0 -> +1, bit 1 -> -1, so counter 0 is the
all-plus configuration).  Sums stay exact when the summand returns ints or
Fractions; in float mode partial sums are combined over fixed-size index
chunks in ascending order, so results do not depend on how many workers
consume the stream.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterator

from .errors import EnumerationCapError, MissingSiteError
from .lattice import Site, SiteSet

DEFAULT_ENUMERATION_CAP = 25

# Chunk size for partitioned reduction.  Fixed (not derived from the worker
# count) so that float accumulation order is identical for any worker count.
_CHUNK = 1 << 14


def sign_of_bits(mask_overlap: int) -> int:
    """+1 for even, -1 for odd popcount; the spin product over a masked subset."""
    return 1 - 2 * (mask_overlap.bit_count() & 1)


@dataclass(frozen=True)
class SpinConfig:
    """An assignment of +/-1 spins to a fixed, ordered list of sites."""

    site_order: SiteSet
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.site_order) != len(self.values):
            raise MissingSiteError("site order and value list have different lengths")
        if any(v not in (1, -1) for v in self.values):
            raise MissingSiteError(f"spin values must be +1 or -1, got {self.values}")

    @cached_property
    def _index(self) -> dict[Site, int]:
        return {site: v for site, v in zip(self.site_order, self.values)}

    def spin(self, site: Site) -> int:
        try:
            return self._index[site]
        except KeyError:
            raise MissingSiteError(f"site {site} not covered by this configuration") from None

    def flipped(self) -> "SpinConfig":
        return SpinConfig(self.site_order, tuple(-v for v in self.values))

    @classmethod
    def from_index(cls, sites: SiteSet, index: int) -> "SpinConfig":
        values = tuple(1 - 2 * ((index >> i) & 1) for i in range(len(sites)))
        return cls(sites, values)


def check_cap(n_sites: int, cap: int = DEFAULT_ENUMERATION_CAP) -> None:
    if n_sites > cap:
        raise EnumerationCapError(
            f"enumerating {n_sites} sites needs 2**{n_sites} configurations, "
            f"which exceeds the cap of {cap} sites"
        )


def enumerate_configs(
    sites: SiteSet, cap: int = DEFAULT_ENUMERATION_CAP
) -> Iterator[SpinConfig]:
    """Yield all ``2**len(sites)`` configurations once, in counter order."""
    check_cap(len(sites), cap)
    for index in range(1 << len(sites)):
        yield SpinConfig.from_index(sites, index)


def spin_product(config: SpinConfig, X: SiteSet) -> int:
    """Product of the spins over ``X``; +1 for the empty set."""
    sign = 1
    for site in X:
        sign *= config.spin(site)
    return sign


def average_over(
    sites: SiteSet,
    f: Callable[[SpinConfig], object],
    cap: int = DEFAULT_ENUMERATION_CAP,
    workers: int = 1,
):
    """Normalized sum ``2**-n * sum_sigma f(sigma)`` over all configurations.

    Exact when ``f`` returns ints or Fractions.  ``workers`` partitions the
    counter range into fixed chunks evaluated concurrently; chunk sums are
    combined in ascending chunk order regardless of the worker count.
    """
    n = len(sites)
    check_cap(n, cap)
    total_configs = 1 << n

    def chunk_sum(start: int) -> object:
        acc = 0
        for index in range(start, min(start + _CHUNK, total_configs)):
            acc = acc + f(SpinConfig.from_index(sites, index))
        return acc

    starts = range(0, total_configs, _CHUNK)
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(chunk_sum, starts))
    else:
        partials = [chunk_sum(s) for s in starts]

    total = partials[0]
    for p in partials[1:]:
        total = total + p
    if isinstance(total, (int, Fraction)):
        return Fraction(total, total_configs)
    return total / total_configs
