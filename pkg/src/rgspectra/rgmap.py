"""The exact nonlinear RG map on a finite volume.

The image window is a finite set of image sites; the original window is
always exactly the union of their blocks, so kernel factors for untouched
blocks cancel identically.  Renormalized couplings are extracted from the
log of the pinned-block-spin partition function by character sums over the
group of image spin configurations.

Derivatives at zero coupling come two ways: an exact rational double
enumeration, and a centered finite difference through the full nonlinear
map.  Both are cross-checked against the closed forms in `linops`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .coeffs import IMAGE, ORIGINAL, CoefficientVector, Scalar
from .errors import (
    DegenerateKernelError,
    EmptySetError,
    InvalidParameterError,
    SupportOutOfVolumeError,
)
from .kernels import DECIMATION, KernelSpec
from .lattice import Geometry, SiteSet, block, canonical_set, region, scale_set
from .spins import SpinConfig, check_cap, sign_of_bits


@dataclass(frozen=True)
class FiniteVolume:
    """An image-site window together with the exact union of its blocks."""

    geom: Geometry
    image_sites: SiteSet
    original_sites: SiteSet = field(init=False, default=())

    def __post_init__(self) -> None:
        img = canonical_set(self.image_sites)
        if not img:
            raise EmptySetError("a finite volume needs at least one image site")
        object.__setattr__(self, "image_sites", img)
        object.__setattr__(self, "original_sites", region(img, self.geom))
        check_cap(len(self.original_sites))


@lru_cache(maxsize=None)
def _volume_tables(spec: KernelSpec, vol: FiniteVolume):
    """Per-block bit tables over the volume's canonical site order."""
    index = {site: i for i, site in enumerate(vol.original_sites)}
    blocks = []
    for y in vol.image_sites:
        if spec.kind == DECIMATION:
            (center,) = scale_set((y,), spec.geom)
            blocks.append((1 << index[center], 0))
        else:
            mask = 0
            for x in block(y, spec.geom):
                mask |= 1 << index[x]
            blocks.append((mask, spec.block_size))
    return index, tuple(blocks)


def _phi_mask(spec: KernelSpec, blocks, m: int) -> int:
    """Image configuration produced by the kernel maps, bit-encoded (bit set = -1)."""
    out = 0
    if spec.kind == DECIMATION:
        for j, (center_bit, _) in enumerate(blocks):
            if m & center_bit:
                out |= 1 << j
    else:
        for j, (mask, s) in enumerate(blocks):
            if 2 * (m & mask).bit_count() > s:
                out |= 1 << j
    return out


def _interaction_masks(J: CoefficientVector, index, vol: FiniteVolume):
    if J.lattice != ORIGINAL:
        raise SupportOutOfVolumeError("the RG map acts on original-lattice interactions")
    terms = []
    for X, v in J.entries.items():
        if isinstance(v, complex):
            raise InvalidParameterError("the exact RG map needs real couplings")
        mask = 0
        for x in X:
            if x not in index:
                raise SupportOutOfVolumeError(
                    f"interaction set {X} escapes the volume (site {x} is outside)"
                )
            mask |= 1 << index[x]
        terms.append((mask, float(v)))
    return terms


def boltzmann_exponent(J: CoefficientVector, config: SpinConfig) -> Scalar:
    """``sum_X J(X) * sigma_X``: minus the Hamiltonian of the configuration."""
    covered = set(config.site_order)
    total: Scalar = 0
    for X, v in J.entries.items():
        sign = 1
        for x in X:
            if x not in covered:
                raise SupportOutOfVolumeError(
                    f"interaction set {X} escapes the configuration (site {x} missing)"
                )
            sign *= config.spin(x)
        total += v * sign
    return total


def _class_sums(J: CoefficientVector, spec: KernelSpec, vol: FiniteVolume) -> list[float]:
    """For each image configuration, the plain sum of Boltzmann weights over
    the original configurations the kernel maps onto it (fixed ascending order)."""
    index, blocks = _volume_tables(spec, vol)
    terms = _interaction_masks(J, index, vol)
    n = len(vol.original_sites)
    sums = [0.0] * (1 << len(vol.image_sites))
    for m in range(1 << n):
        weight = 0.0
        for mask, v in terms:
            weight += v * sign_of_bits(m & mask)
        sums[_phi_mask(spec, blocks, m)] += math.exp(weight)
    return sums


def frozen_partition(
    J: CoefficientVector, spec: KernelSpec, vol: FiniteVolume, sprime: SpinConfig
) -> float:
    """Normalized kernel-weighted partition sum at pinned image spins ``sprime``."""
    mp = 0
    for j, y in enumerate(vol.image_sites):
        if sprime.spin(y) == -1:
            mp |= 1 << j
    n, ni = len(vol.original_sites), len(vol.image_sites)
    # Matching original configurations contribute the full kernel product 2**ni.
    return _class_sums(J, spec, vol)[mp] * 2.0 ** (ni - n)


def fourier_coefficients(
    J: CoefficientVector, spec: KernelSpec, vol: FiniteVolume
) -> tuple[float, CoefficientVector]:
    """Constant term and renormalized couplings of ``log W`` over the image window."""
    n, ni = len(vol.original_sites), len(vol.image_sites)
    sums = _class_sums(J, spec, vol)
    scale = 2.0 ** (ni - n)
    logs = []
    for mp, total in enumerate(sums):
        w = total * scale
        if w <= 0.0:
            raise DegenerateKernelError(
                f"frozen partition function is {w} at image configuration {mp}"
            )
        logs.append(math.log(w))

    n_img_configs = 1 << ni
    constant = sum(logs) / n_img_configs
    entries = {}
    for zmask in range(1, n_img_configs):
        total = 0.0
        for mp, logw in enumerate(logs):
            total += sign_of_bits(mp & zmask) * logw
        Z = canonical_set(
            vol.image_sites[j] for j in range(ni) if zmask & (1 << j)
        )
        entries[Z] = total / n_img_configs
    return constant, CoefficientVector(spec.geom.dimension, IMAGE, entries)


def rg_map(J: CoefficientVector, spec: KernelSpec, vol: FiniteVolume) -> CoefficientVector:
    """Renormalized coupling vector ``J'`` on the image window (image-tagged)."""
    return fourier_coefficients(J, spec, vol)[1]


def _subset_mask(X: SiteSet, index, what: str) -> int:
    mask = 0
    for x in X:
        if x not in index:
            raise SupportOutOfVolumeError(f"{what} set {X} escapes the volume at site {x}")
        mask |= 1 << index[x]
    return mask


def jacobian_bruteforce(
    spec: KernelSpec, vol: FiniteVolume, Z: SiteSet, W: SiteSet
) -> Fraction:
    """Derivative of ``J'(Z)`` in ``J(W)`` at zero coupling by exact double enumeration."""
    if not Z or not W:
        raise EmptySetError("jacobian entries are indexed by nonempty sets")
    index, blocks = _volume_tables(spec, vol)
    img_index = {y: j for j, y in enumerate(vol.image_sites)}
    wmask = _subset_mask(canonical_set(W), index, "original")
    zmask = _subset_mask(canonical_set(Z), img_index, "image")
    n, ni = len(vol.original_sites), len(vol.image_sites)
    kernel_product = 1 << ni
    total = 0
    for m in range(1 << n):
        pm = _phi_mask(spec, blocks, m)
        for mp in range(1 << ni):
            if mp == pm:  # otherwise some kernel factor vanishes
                total += kernel_product * sign_of_bits(m & wmask) * sign_of_bits(mp & zmask)
    return Fraction(total, 1 << (n + ni))


def jacobian_fd(
    spec: KernelSpec,
    vol: FiniteVolume,
    Z: SiteSet,
    W: SiteSet,
    h: float = 1e-5,
) -> float:
    """Centered finite difference of the full nonlinear map along ``delta_W``."""
    if h <= 0:
        raise InvalidParameterError(f"finite-difference step must be positive, got {h}")
    if not Z or not W:
        raise EmptySetError("jacobian entries are indexed by nonempty sets")
    plus = rg_map(CoefficientVector.delta(W, h, ORIGINAL), spec, vol)
    minus = rg_map(CoefficientVector.delta(W, -h, ORIGINAL), spec, vol)
    return (plus.value(Z) - minus.value(Z)) / (2.0 * h)
