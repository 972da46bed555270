"""Closed-form linearizations of the RG maps at zero coupling, and adjoints.

Decimation linearizes to an index rescaling: the image coefficient at Z is
the original coefficient at bZ.  Majority rule linearizes to a sum weighted
by per-block correlation coefficients: the correlation of a spin product
over a pattern inside one block with that block's majority sign.  All four
operator applications are support-local and exact in rational arithmetic;
the majority adjoint fans one image set out to every decomposition into odd
nonempty per-block patterns.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .coeffs import IMAGE, ORIGINAL, CoefficientVector
from .errors import (
    EmptySetError,
    InvalidSpecError,
    LatticeTagError,
    NotInBlockError,
    WindowError,
)
from .kernels import DECIMATION, MAJORITY, KernelSpec
from .lattice import (
    Site,
    SiteSet,
    block,
    block_index,
    canonical_set,
    decompose_by_blocks,
    scale_set,
    unscale_set,
)
from .spins import sign_of_bits

_FULL_TABLE_MAX_SITES = 13


def _require(K: CoefficientVector, lattice: str, spec: KernelSpec) -> None:
    if K.lattice != lattice:
        raise LatticeTagError(f"operator expects a {lattice}-lattice vector, got {K.lattice}")
    if K.dimension != spec.geom.dimension:
        raise InvalidSpecError(
            f"vector dimension {K.dimension} does not match geometry {spec.geom.dimension}"
        )


@lru_cache(maxsize=None)
def _origin_block(spec: KernelSpec) -> SiteSet:
    return block((0,) * spec.geom.dimension, spec.geom)


@lru_cache(maxsize=None)
def _pattern_correlation(spec: KernelSpec, pattern: SiteSet) -> Fraction:
    """Correlation of the spin product over ``pattern`` with the block majority
    sign, by direct enumeration of all block configurations."""
    blk = _origin_block(spec)
    index = {site: i for i, site in enumerate(blk)}
    mask = 0
    for x in pattern:
        mask |= 1 << index[x]
    s = spec.block_size
    half = s // 2
    total = 0
    for m in range(1 << s):
        majority = 1 if m.bit_count() <= half else -1
        total += majority * sign_of_bits(m & mask)
    return Fraction(total, 1 << s)


def block_correlation(spec: KernelSpec, A: SiteSet, z: Site) -> Fraction:
    """Per-block coefficient of the majority linearization for pattern ``A``
    inside the block of image site ``z`` (translation covariant)."""
    if spec.kind != MAJORITY:
        raise InvalidSpecError("block correlations are defined for majority rule only")
    A = canonical_set(A)
    if not A:
        raise EmptySetError("the empty pattern has correlation 0 by balance; pass sites")
    blk = block(z, spec.geom)
    if not set(A) <= set(blk):
        raise NotInBlockError(f"pattern {A} is not contained in the block of {z}")
    (offset,) = scale_set((z,), spec.geom)
    shifted = tuple(tuple(c - o for c, o in zip(site, offset)) for site in A)
    return _pattern_correlation(spec, shifted)


@lru_cache(maxsize=None)
def block_correlation_table(spec: KernelSpec) -> dict[SiteSet, Fraction]:
    """Every odd-size pattern's correlation in one pass.

    A fast Walsh-Hadamard transform of the majority-sign table gives all
    2**s character sums at once in exact integer arithmetic; even-size
    patterns are identically zero by spin-flip symmetry and are omitted.
    """
    if spec.kind != MAJORITY:
        raise InvalidSpecError("block correlations are defined for majority rule only")
    s = spec.block_size
    if s > _FULL_TABLE_MAX_SITES:
        raise InvalidSpecError(
            f"full table is limited to blocks of {_FULL_TABLE_MAX_SITES} sites; "
            "query single patterns instead"
        )
    blk = _origin_block(spec)
    half = s // 2
    vals = [1 if m.bit_count() <= half else -1 for m in range(1 << s)]
    h = 1
    while h < len(vals):
        for i in range(0, len(vals), 2 * h):
            for j in range(i, i + h):
                x, y = vals[j], vals[j + h]
                vals[j], vals[j + h] = x + y, x - y
        h *= 2
    table: dict[SiteSet, Fraction] = {}
    for mask in range(1, 1 << s):
        if mask.bit_count() % 2 == 1:
            pattern = canonical_set(blk[i] for i in range(s) if mask & (1 << i))
            table[pattern] = Fraction(vals[mask], 1 << s)
    return dict(sorted(table.items()))


@lru_cache(maxsize=None)
def _odd_pattern_weights(spec: KernelSpec) -> tuple[tuple[SiteSet, Fraction], ...]:
    """Nonzero odd-size patterns of the origin block with their correlations."""
    if spec.block_size <= _FULL_TABLE_MAX_SITES:
        items = block_correlation_table(spec).items()
    else:
        blk = _origin_block(spec)
        items = (
            (p, _pattern_correlation(spec, canonical_set(p)))
            for k in range(1, len(blk) + 1, 2)
            for p in itertools.combinations(blk, k)
        )
    return tuple((p, w) for p, w in items if w != 0)


# -- decimation ---------------------------------------------------------------


def decimation_forward(K: CoefficientVector, spec: KernelSpec) -> CoefficientVector:
    """Image coefficient at Z is the original coefficient at bZ."""
    _require(K, ORIGINAL, spec)
    out = {}
    for X, v in K.entries.items():
        Y = unscale_set(X, spec.geom)
        if Y is not None:
            out[Y] = v
    return CoefficientVector(K.dimension, IMAGE, out)


def _is_origin_singleton(X: SiteSet) -> bool:
    return len(X) == 1 and all(c == 0 for c in X[0])


def decimation_adjoint(K: CoefficientVector, spec: KernelSpec) -> CoefficientVector:
    """Original coefficient at bY is the image coefficient at Y; everything else 0.

    The origin singleton is the unique set fixed by rescaling; its output slot
    is set to 0 so the adjoint acts as a pure index shift on every scaling
    chain (the one-dimensional fixed orbit is dropped by convention).
    """
    _require(K, IMAGE, spec)
    out = {}
    for Y, v in K.entries.items():
        if _is_origin_singleton(Y):
            continue
        out[scale_set(Y, spec.geom)] = v
    return CoefficientVector(K.dimension, ORIGINAL, out)


# -- majority rule ----------------------------------------------------------------


def majority_forward(K: CoefficientVector, spec: KernelSpec) -> CoefficientVector:
    """Each original set W feeds the image set of its block indices, weighted by
    the product of its per-block correlations.

    Sets missing a block of the target (empty intersection) contribute zero by
    kernel balance, and sets escaping the target's blocks vanish under the
    configuration average, so the support-driven sum below is the whole map.
    """
    _require(K, ORIGINAL, spec)
    if spec.kind != MAJORITY:
        raise InvalidSpecError("majority operator called with a non-majority spec")
    out: dict[SiteSet, object] = {}
    for W, v in K.entries.items():
        parts = decompose_by_blocks(W, spec.geom)
        coeff: Fraction | int = 1
        for n, part in parts.items():
            coeff *= block_correlation(spec, part, n)
            if coeff == 0:
                break
        if coeff == 0:
            continue
        Z = canonical_set(parts)
        out[Z] = out.get(Z, 0) + coeff * v
    return CoefficientVector(K.dimension, IMAGE, out)


def majority_adjoint(
    K: CoefficientVector, spec: KernelSpec, window: SiteSet | None = None
) -> CoefficientVector:
    """Fan each image set Y out to all unions of odd nonempty per-block patterns.

    The output at such a union is the product of the pattern correlations times
    the input at Y; even patterns carry weight zero and are skipped.  ``window``
    (a set of image sites) optionally bounds the fan-out: every support site of
    ``K`` must lie in it, which makes all produced sets land inside its blocks.
    """
    _require(K, IMAGE, spec)
    if spec.kind != MAJORITY:
        raise InvalidSpecError("majority operator called with a non-majority spec")
    if window is not None:
        allowed = set(window)
        for Y in K.entries:
            for n in Y:
                if n not in allowed:
                    raise WindowError(
                        f"window does not hold image site {n} of support set {Y}"
                    )
    patterns = _odd_pattern_weights(spec)
    b = spec.geom.blocking_factor
    out: dict[SiteSet, object] = {}
    for Y, v in K.entries.items():
        per_block = []
        for n in Y:
            offset = tuple(b * c for c in n)
            per_block.append(
                [
                    (tuple(tuple(c + o for c, o in zip(site, offset)) for site in p), w)
                    for p, w in patterns
                ]
            )
        for choice in itertools.product(*per_block):
            weight: Fraction | int = 1
            sites: list[Site] = []
            for part, w in choice:
                weight *= w
                sites.extend(part)
            out[canonical_set(sites)] = weight * v
    return CoefficientVector(K.dimension, ORIGINAL, out)


# -- unified view ----------------------------------------------------------------


def jacobian_closed_form(spec: KernelSpec, Z: SiteSet, W: SiteSet) -> Fraction:
    """Matrix entry of the linearization between image set Z and original set W."""
    Z, W = canonical_set(Z), canonical_set(W)
    if not Z or not W:
        raise EmptySetError("jacobian entries are indexed by nonempty sets")
    if spec.kind == DECIMATION:
        return Fraction(1 if W == scale_set(Z, spec.geom) else 0)
    parts = decompose_by_blocks(W, spec.geom)
    if canonical_set(parts) != Z:
        return Fraction(0)
    coeff = Fraction(1)
    for n, part in parts.items():
        coeff *= block_correlation(spec, part, n)
    return coeff


FORWARD = "forward"
ADJOINT = "adjoint"


@dataclass(frozen=True)
class LinearOperator:
    """One of the four linearized maps, selected by kernel kind and direction."""

    spec: KernelSpec
    direction: str

    def __post_init__(self) -> None:
        if self.direction not in (FORWARD, ADJOINT):
            raise InvalidSpecError(f"direction must be forward or adjoint, got {self.direction}")

    def apply(
        self, K: CoefficientVector, window: SiteSet | None = None
    ) -> CoefficientVector:
        if self.spec.kind == DECIMATION:
            if self.direction == FORWARD:
                return decimation_forward(K, self.spec)
            return decimation_adjoint(K, self.spec)
        if self.direction == FORWARD:
            return majority_forward(K, self.spec)
        return majority_adjoint(K, self.spec, window)
