"""Deterministic block-spin probability kernels.

Both shipped transformations assign to each image site a block spin that is a
function of the original spins inside its block: decimation copies the spin
at the scaled site, majority rule takes the sign of the block's spin sum
(odd block size, so the sum is never zero).  The kernel value is the exact
integer 2 or 0: twice the indicator that the block spin matches.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Mapping

from .errors import InvalidSpecError, MissingSiteError
from .lattice import Geometry, Site, SiteSet, block, scale_set
from .spins import SpinConfig, average_over, enumerate_configs

DECIMATION = "decimation"
MAJORITY = "majority"


@dataclass(frozen=True)
class KernelSpec:
    """Which transformation to apply, on which blocking geometry."""

    kind: str
    geom: Geometry

    def __post_init__(self) -> None:
        if self.kind not in (DECIMATION, MAJORITY):
            raise InvalidSpecError(f"unknown kernel kind {self.kind!r}")
        if self.kind == MAJORITY and not self.geom.odd_blocking:
            raise InvalidSpecError(
                "majority rule needs an odd blocking factor so block sums cannot tie"
            )

    @property
    def block_size(self) -> int:
        return self.geom.block_size

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "b": self.geom.blocking_factor,
            "d": self.geom.dimension,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "KernelSpec":
        return cls(str(data["kind"]), Geometry(int(data["d"]), int(data["b"])))

    @classmethod
    def parse(cls, text: str) -> "KernelSpec":
        return cls.from_json(json.loads(text))


def phi(spec: KernelSpec, y: Site, config: SpinConfig) -> int:
    """Block spin assigned to image site ``y`` by the kernel's defining map."""
    if spec.kind == DECIMATION:
        (scaled,) = scale_set((y,), spec.geom)
        return config.spin(scaled)
    total = sum(config.spin(x) for x in block(y, spec.geom))
    return 1 if total > 0 else -1


def phi_from_block_bits(spec: KernelSpec, minus_count: int, center_bit: int) -> int:
    """Bit-level twin of `phi` for mask-encoded blocks (bit set = spin -1)."""
    if spec.kind == DECIMATION:
        return 1 - 2 * center_bit
    return 1 if 2 * minus_count < spec.block_size else -1


def t_value(spec: KernelSpec, y: Site, config: SpinConfig, sprime: int) -> int:
    """Kernel value: 2 when the block spin matches ``sprime``, else 0."""
    if sprime not in (1, -1):
        raise MissingSiteError(f"block spin must be +1 or -1, got {sprime}")
    return 2 if phi(spec, y, config) == sprime else 0


def majority_weight(spec: KernelSpec) -> Fraction:
    """Correlation of one block site's spin with the block majority sign.

    Equals ``C(s-1, (s-1)/2) / 2**(s-1)`` with ``s`` the block size; this is
    also the largest magnitude any single-block correlation can take.
    """
    if spec.kind != MAJORITY:
        raise InvalidSpecError("the majority weight is defined for majority rule only")
    return majority_weight_from_block_size(spec.block_size)


def majority_weight_from_block_size(s: int) -> Fraction:
    if s % 2 == 0 or s < 1:
        raise InvalidSpecError(f"block size must be odd and positive, got {s}")
    return Fraction(comb(s - 1, (s - 1) // 2), 2 ** (s - 1))


def majority_weight_bruteforce(spec: KernelSpec) -> Fraction:
    """Independent route to `majority_weight`: enumerate all block configurations."""
    if spec.kind != MAJORITY:
        raise InvalidSpecError("the majority weight is defined for majority rule only")
    origin = (0,) * spec.geom.dimension
    blk = block(origin, spec.geom)
    site = blk[0]

    def correlate(config: SpinConfig) -> int:
        return config.spin(site) * phi(spec, origin, config)

    return average_over(blk, correlate)


def kernel_law_violations(spec: KernelSpec, y: Site) -> dict[str, int]:
    """Exhaustively count violations of the three defining kernel laws at ``y``.

    Checks, over every configuration on the block of ``y``: invariance under a
    global spin flip, the normalized sum over block spins equalling 1, and the
    configuration average of the kernel at fixed block spin equalling 1.
    All three counts are 0 for a valid kernel.
    """
    blk = block(y, spec.geom)
    flip_bad = norm_bad = 0
    balance = {1: Fraction(0), -1: Fraction(0)}
    n_configs = 1 << len(blk)
    for config in enumerate_configs(blk):
        for sprime in (1, -1):
            if t_value(spec, y, config, sprime) != t_value(spec, y, config.flipped(), -sprime):
                flip_bad += 1
            balance[sprime] += Fraction(t_value(spec, y, config, sprime), n_configs)
        if t_value(spec, y, config, 1) + t_value(spec, y, config, -1) != 2:
            norm_bad += 1
    balance_bad = sum(1 for v in balance.values() if v != 1)
    return {"symmetry": flip_bad, "normalization": norm_bad, "balance": balance_bad}


def locality_violations(spec: KernelSpec, y: Site, other: Site) -> int:
    """Count configurations where flipping spins outside ``y``'s block moves its block spin."""
    blk = block(y, spec.geom)
    outside = block(other, spec.geom)
    joint = tuple(sorted(set(blk) | set(outside)))
    bad = 0
    for config in enumerate_configs(joint):
        flipped_outside = SpinConfig(
            joint,
            tuple(v if s in blk else -v for s, v in zip(joint, config.values)),
        )
        if phi(spec, y, config) != phi(spec, y, flipped_outside):
            bad += 1
    return bad


__all__ = [
    "DECIMATION",
    "MAJORITY",
    "KernelSpec",
    "phi",
    "phi_from_block_bits",
    "t_value",
    "majority_weight",
    "majority_weight_from_block_size",
    "majority_weight_bruteforce",
    "kernel_law_violations",
    "locality_violations",
]
