"""Spectral certificates for the linearized RG maps.

Infinite-dimensional spectra cannot be computed outright, so every spectral
claim is turned into a finite, machine-checkable comparison:

* eigenvector certificates -- construct the displayed eigenvector family for a
  given eigenvalue, apply the operator to a truncation, and measure the worst
  eigen-equation residual on sets whose operator preimage is fully inside the
  truncation (checks outside that region are errors, never silent noise);
* norm certificates -- seeded random vectors probe the operator-norm bounds,
  and explicit constant-field constructions witness that the bounds are tight;
* witness certificates -- lower-bound the distance from a fixed target vector
  to the range of (lambda*I - adjoint), certifying residual spectrum;
* divergence certificates -- truncated norms of would-be eigenvector families
  that the theory excludes, demonstrating their blow-up.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .coeffs import (
    IMAGE,
    ORIGINAL,
    CoefficientVector,
    OrbitVector,
    Scalar,
    _scalar_to_json,
)
from .errors import (
    InvalidParameterError,
    InvalidSpecError,
    OutOfDiskError,
    TruncationError,
)
from .kernels import DECIMATION, MAJORITY, KernelSpec, majority_weight
from .lattice import (
    Geometry,
    SiteSet,
    block,
    block_index,
    canonical_set,
    max_coordinate,
    sites_in_box,
)
from .linops import ADJOINT, FORWARD, LinearOperator, decimation_forward


# -- bounds delivered by the theory ---------------------------------------------


def forward_norm_bound(spec: KernelSpec) -> Fraction:
    """Operator norm of the forward linearization: 1 for decimation, block
    size times the majority weight for majority rule (both attained)."""
    if spec.kind == DECIMATION:
        return Fraction(1)
    return spec.block_size * majority_weight(spec)


def witness_disk_radius(spec: KernelSpec) -> Fraction:
    """Radius of the disk of certified residual spectrum of the adjoint."""
    if spec.kind == DECIMATION:
        return Fraction(1)
    return majority_weight(spec)


def witness_bound(spec: KernelSpec) -> Fraction:
    """Certified non-approximability distance for the residual-spectrum witness."""
    return Fraction(1, 2) if spec.kind == DECIMATION else Fraction(1, 4)


# -- certificates ---------------------------------------------------------------

_COMPARISONS = {
    "eigenvector": "<=",
    "norm-bound": "<=",
    "residual-witness": ">=",
    "divergence": ">=",
}


@dataclass(frozen=True)
class Certificate:
    """A finite witness of one spectral membership claim."""

    kind: str
    transform: KernelSpec
    lam: Scalar | None
    measured: Scalar
    bound: Scalar
    claim: str = ""
    payload: object = None

    def __post_init__(self) -> None:
        if self.kind not in _COMPARISONS:
            raise InvalidParameterError(f"unknown certificate kind {self.kind!r}")

    @property
    def verdict(self) -> str:
        if _COMPARISONS[self.kind] == "<=":
            ok = self.measured <= self.bound
        else:
            ok = self.measured >= self.bound
        return "pass" if ok else "fail"

    def to_json(self) -> dict:
        lam = self.lam
        if isinstance(lam, complex):
            lam = [lam.real, lam.imag]
        elif lam is not None:
            lam = _scalar_to_json(lam)
        data = {
            "kind": self.kind,
            "transform": self.transform.to_json(),
            "lambda": lam,
            "measured": _scalar_to_json(_as_number(self.measured)),
            "bound": _scalar_to_json(_as_number(self.bound)),
            "comparison": _COMPARISONS[self.kind],
            "verdict": self.verdict,
            "claim": self.claim,
        }
        if self.payload is not None and hasattr(self.payload, "to_json"):
            data["payload"] = self.payload.to_json()
        return data


def _as_number(v: Scalar):
    return v if isinstance(v, (int, Fraction)) else float(v)


# -- eigenvector families ---------------------------------------------------------


def _axis_site(n: int, dimension: int, axis: int = 0) -> tuple[int, ...]:
    return tuple(n if i == axis else 0 for i in range(dimension))


def decimation_eigenvector(
    lam: Scalar, depth: int, geom: Geometry, axis: int = 0
) -> CoefficientVector:
    """Scaling-chain eigenvector: value ``lam**n`` on the singleton at
    coordinate ``b**n`` along one axis, out to ``n = depth``."""
    if depth < 0:
        raise InvalidParameterError(f"depth must be >= 0, got {depth}")
    b = geom.blocking_factor
    entries = {}
    power: Scalar = 1
    for n in range(depth + 1):
        entries[(_axis_site(b**n, geom.dimension, axis),)] = power
        power = power * lam
    return CoefficientVector(geom.dimension, ORIGINAL, entries)


def decimation_truncation_radius(depth: int, geom: Geometry) -> int:
    """Coordinate radius inside which the depth-``depth`` chain vector is exact."""
    return geom.blocking_factor**depth


def majority_eigenvector(lam: Scalar, depth: int, spec: KernelSpec) -> CoefficientVector:
    """Singleton-supported eigenvector of the majority linearization.

    On the origin block, one corner site carries ``lam/weight - (s-1)`` and
    the rest carry 1; each further shell divides by the per-site share of the
    eigenvalue, so every block sums to ``lam/weight`` times its index's value.
    """
    if spec.kind != MAJORITY:
        raise InvalidSpecError("this eigenvector family is for majority rule")
    if depth < 0:
        raise InvalidParameterError(f"depth must be >= 0, got {depth}")
    geom = spec.geom
    b, s = geom.blocking_factor, spec.block_size
    weight = majority_weight(spec)
    corner = ((b - 1) // 2,) * geom.dimension

    values: dict[tuple[int, ...], Scalar] = {}
    for x in block((0,) * geom.dimension, geom):
        values[x] = lam / weight - (s - 1) if x == corner else 1
    share = lam / (s * weight)
    for level in range(1, depth + 1):
        inner = majority_truncation_radius(level - 1, spec)
        for x in sites_in_box(majority_truncation_radius(level, spec), geom.dimension):
            if max(abs(c) for c in x) > inner:
                values[x] = share * values[block_index(x, geom)]
    return CoefficientVector(
        geom.dimension, ORIGINAL, {(x,): v for x, v in values.items()}
    )


def majority_truncation_radius(depth: int, spec: KernelSpec) -> int:
    """Coordinate radius of the depth-``depth`` block hierarchy around the origin."""
    return (spec.geom.blocking_factor ** (depth + 1) - 1) // 2


def pair_orbit_eigenvector(lam: Scalar, depth: int, geom: Geometry) -> OrbitVector:
    """Translation-invariant even vector: value ``lam**n`` on the orbit of the
    pair ``{0, b**n * e}`` for each axis direction ``e``."""
    if depth < 0:
        raise InvalidParameterError(f"depth must be >= 0, got {depth}")
    b, d = geom.blocking_factor, geom.dimension
    entries = {}
    power: Scalar = 1
    for n in range(depth + 1):
        for axis in range(d):
            pair = canonical_set([(0,) * d, _axis_site(b**n, d, axis)])
            entries[pair] = power
        power = power * lam
    return OrbitVector(d, entries, even_only=True)


def decimation_forward_orbits(K: OrbitVector, geom: Geometry) -> OrbitVector:
    """Decimation forward map on translation orbits: value at an orbit is the
    input value at the orbit scaled by the blocking factor."""
    b = geom.blocking_factor
    out = {}
    for X, v in K.entries.items():
        if all(c % b == 0 for site in X for c in site):
            out[tuple(tuple(c // b for c in site) for site in X)] = v
    return OrbitVector(K.dimension, out, even_only=K.even_only)


# -- residual measurement -----------------------------------------------------------


def _check_set_valid(spec: KernelSpec, Z: SiteSet, window_radius: int) -> bool:
    b = spec.geom.blocking_factor
    if spec.kind == DECIMATION:
        return b * max_coordinate(Z) <= window_radius
    return b * max_coordinate(Z) + (b - 1) // 2 <= window_radius


def eigen_residual(
    spec: KernelSpec,
    K: CoefficientVector,
    lam: Scalar,
    check_sets: Iterable[SiteSet],
    window_radius: int,
) -> Scalar:
    """Worst eigen-equation defect ``|LK(Z) - lam*K(Z)|`` over ``check_sets``.

    ``K`` must be exactly specified on every set inside the coordinate ball of
    ``window_radius``; a check set whose operator preimage leaves that ball is
    rejected, because its defect would be a truncation artifact.
    """
    sets = [canonical_set(Z) for Z in check_sets]
    for Z in sets:
        if not _check_set_valid(spec, Z, window_radius):
            raise TruncationError(
                f"set {Z} needs data outside the radius-{window_radius} truncation"
            )
    image = LinearOperator(spec, FORWARD).apply(K)
    worst: Scalar = 0
    for Z in sets:
        defect = abs(image.value(Z) - lam * K.value(Z))
        if defect > worst:
            worst = defect
    return worst


def orbit_eigen_residual(
    K: OrbitVector,
    lam: Scalar,
    geom: Geometry,
    check_orbits: Iterable[SiteSet],
    window_radius: int,
) -> Scalar:
    """Eigen-equation defect of the decimation action on translation orbits."""
    b = geom.blocking_factor
    image = decimation_forward_orbits(K, geom)
    worst: Scalar = 0
    for O in check_orbits:
        O = canonical_set(O)
        if b * max_coordinate(O) > window_radius:
            raise TruncationError(
                f"orbit {O} needs data outside the radius-{window_radius} truncation"
            )
        defect = abs(image.value(O) - lam * K.value(O))
        if defect > worst:
            worst = defect
    return worst


def chain_check_sets(depth: int, geom: Geometry) -> list[SiteSet]:
    """Scaling-chain singletons whose forward preimage stays inside depth."""
    b = geom.blocking_factor
    return [(_axis_site(b**n, geom.dimension),) for n in range(depth)]


def singleton_check_sets(depth: int, spec: KernelSpec) -> list[SiteSet]:
    """All singletons whose full block lies inside the depth-``depth`` hierarchy."""
    if depth < 1:
        raise InvalidParameterError("need depth >= 1 so at least the origin block fits")
    radius = majority_truncation_radius(depth - 1, spec)
    return [(x,) for x in sites_in_box(radius, spec.geom.dimension)]


# -- seeded random vectors ------------------------------------------------------------


def random_vector(
    rng: random.Random,
    dimension: int,
    lattice: str,
    window_radius: int = 4,
    max_sets: int = 4,
    max_set_size: int = 3,
    rational: bool = False,
    exclude_origin_singleton: bool = False,
) -> CoefficientVector:
    """Random finite-support vector: sets drawn from a coordinate box with a
    geometric size bias, values uniform in [-1, 1] (on a rational grid in
    rational mode).  Deterministic given the generator state."""
    origin = (0,) * dimension
    while True:
        entries = {}
        for _ in range(rng.randint(1, max_sets)):
            size = 1
            while size < max_set_size and rng.random() < 0.5:
                size += 1
            sites = set()
            while len(sites) < size:
                sites.add(
                    tuple(rng.randint(-window_radius, window_radius) for _ in range(dimension))
                )
            X = canonical_set(sites)
            if exclude_origin_singleton and X == (origin,):
                continue
            if rational:
                entries[X] = Fraction(rng.randint(-100, 100), 100)
            else:
                entries[X] = rng.uniform(-1.0, 1.0)
        K = CoefficientVector(dimension, lattice, entries)
        if not K.is_zero():
            return K


# -- operator-norm probes ----------------------------------------------------------------


def operator_norm_probe(
    spec: KernelSpec,
    direction: str,
    r: float,
    samples: int,
    seed: int,
    window_radius: int = 4,
) -> Scalar:
    """Largest ``norm(op K) / norm(K)`` over seeded random vectors.

    Forward probes use the interaction norm, adjoint probes the dual norm.
    """
    if samples < 1:
        raise InvalidParameterError(f"need at least one sample, got {samples}")
    rng = random.Random(seed)
    op = LinearOperator(spec, direction)
    in_tag = ORIGINAL if direction == FORWARD else IMAGE
    worst: Scalar = 0
    for _ in range(samples):
        K = random_vector(rng, spec.geom.dimension, in_tag, window_radius)
        out = op.apply(K)
        if direction == FORWARD:
            ratio = out.norm(r) / K.norm(r)
        else:
            ratio = out.dual_norm(r) / K.dual_norm(r)
        if ratio > worst:
            worst = ratio
    return worst


def norm_equality_witness(spec: KernelSpec, direction: str, r: float = 0) -> Scalar:
    """Norm ratio of the construction that attains the operator-norm bound.

    Constant magnetic fields: a singleton at a scaled site for decimation, the
    full origin block of singletons for majority rule.  Supported on singletons
    only, so every weight is 1 and the ratio is exact for any r.
    """
    d = spec.geom.dimension
    if direction == ADJOINT:
        if spec.kind != DECIMATION:
            raise InvalidSpecError("no adjoint norm bound is certified for majority rule")
        K = CoefficientVector.delta([_axis_site(1, d)], 1, IMAGE)
        out = LinearOperator(spec, ADJOINT).apply(K)
        return out.dual_norm(r) / K.dual_norm(r)
    if spec.kind == DECIMATION:
        K = CoefficientVector.delta([_axis_site(spec.geom.blocking_factor, d)], 1, ORIGINAL)
    else:
        K = CoefficientVector(
            d, ORIGINAL, {(x,): 1 for x in block((0,) * d, spec.geom)}
        )
    out = LinearOperator(spec, FORWARD).apply(K)
    return out.norm(r) / K.norm(r)


# -- residual-spectrum witnesses ------------------------------------------------------------


def witness_target(spec: KernelSpec) -> CoefficientVector:
    """The fixed vector no range element of (lambda*I - adjoint) approaches."""
    d = spec.geom.dimension
    site = _axis_site(1, d) if spec.kind == DECIMATION else (0,) * d
    return CoefficientVector.delta([site], 1, ORIGINAL)


def witness_distance(
    spec: KernelSpec, lam: Scalar, S: CoefficientVector, r: float = 0
) -> Scalar:
    """Dual-norm distance from the witness target to ``(lam*I - adjoint) S``."""
    radius = witness_disk_radius(spec)
    if abs(lam) > radius + 1e-12:
        raise OutOfDiskError(
            f"|lambda| = {abs(lam)} outside the certified disk of radius {radius}"
        )
    shifted = lam * S.retag(ORIGINAL)
    moved = LinearOperator(spec, ADJOINT).apply(S)
    return (witness_target(spec) - (shifted - moved)).dual_norm(r)


def disk_grid(n_radii: int, n_angles: int, radius: float = 1.0) -> list[complex]:
    """``n_radii * n_angles`` points filling the closed disk (boundary included)."""
    if n_radii < 1 or n_angles < 1:
        raise InvalidParameterError("disk grid needs at least one radius and one angle")
    return [
        (k / n_radii) * radius * cmath.exp(2j * math.pi * j / n_angles)
        for k in range(1, n_radii + 1)
        for j in range(n_angles)
    ]


def real_axis_grid(n_points: int, radius: float = 1.0) -> list[float]:
    if n_points < 2:
        raise InvalidParameterError("axis grid needs at least two points")
    step = 2 * radius / (n_points - 1)
    return [-radius + k * step for k in range(n_points)]


# -- divergence probes -----------------------------------------------------------------------


def scaled_set_growth(
    lam: Scalar, r: float, X: SiteSet, geom: Geometry, depths: Sequence[int]
) -> list[float]:
    """Truncated norms of the family ``lam**n`` on the scaled sets ``b**n X``.

    For r > 0 and a set with positive extent these grow without bound: the
    weight at the origin-containing site gains a factor ``e**(r * b**n * l)``
    that crushes any ``|lam| <= 1`` decay.
    """
    X = canonical_set(X)
    if len(X) < 2:
        raise InvalidParameterError("the growth family needs a set with more than one site")
    b = geom.blocking_factor
    out = []
    for depth in depths:
        entries = {}
        power: Scalar = 1
        for n in range(depth + 1):
            entries[tuple(tuple(c * b**n for c in site) for site in X)] = power
            power = power * lam
        out.append(float(CoefficientVector(geom.dimension, ORIGINAL, entries).norm(r)))
    return out


def pair_orbit_truncation_norms(
    lam: Scalar, geom: Geometry, depths: Sequence[int]
) -> list[Scalar]:
    """Exact truncated norms of the translation-invariant pair family."""
    return [pair_orbit_eigenvector(lam, depth, geom).norm0() for depth in depths]


def adjoint_constant_field_norms(
    m: Scalar, spec: KernelSpec, depths: Sequence[int], r: float = 0
) -> list[Scalar]:
    """Truncated dual norms of the constant singleton family that a
    majority-adjoint eigenvector at the singleton weight would have to extend:
    one unit per scaling shell, so the norm grows linearly and unboundedly."""
    b, d = spec.geom.blocking_factor, spec.geom.dimension
    out = []
    for depth in depths:
        entries = {(_axis_site(b**n, d),): m for n in range(depth + 1)}
        out.append(CoefficientVector(d, ORIGINAL, entries).dual_norm(r))
    return out


def adjoint_iteration_window_counts(
    spec: KernelSpec, K: CoefficientVector, window_radius: int, steps: int
) -> list[int]:
    """How many support sets of each adjoint iterate lie fully inside the window.

    Every count must reach 0 once ``b**n`` exceeds the window radius: iterated
    rescaling pushes every surviving set out of any fixed ball.
    """
    counts = []
    cur = K
    for _ in range(steps + 1):
        counts.append(sum(1 for X in cur.support if max_coordinate(X) <= window_radius))
        cur = LinearOperator(spec, ADJOINT).apply(cur).retag(IMAGE)
    return counts


def divergence_probe(family: str, params: dict, depths: Sequence[int]) -> list:
    """Dispatch the named divergence family (CLI entry point)."""
    if family == "scaled-set":
        return scaled_set_growth(
            params["lam"], params["r"], params["X"], params["geom"], depths
        )
    if family == "pair-orbit":
        return pair_orbit_truncation_norms(params["lam"], params["geom"], depths)
    if family == "adjoint-constant":
        return adjoint_constant_field_norms(
            params.get("m", 1), params["spec"], depths, params.get("r", 0)
        )
    raise InvalidParameterError(f"unknown divergence family {family!r}")


# -- asymptotics of the majority bound ------------------------------------------------------


def stirling_table(block_sizes: Sequence[int]) -> list[dict]:
    """Rows comparing the exact majority bound with its large-block asymptote.

    The scaled weight ``s * weight(s)`` approaches ``sqrt(2 s / pi)`` from
    above, so the ratio column is > 1 and decreasing.
    """
    from .kernels import majority_weight_from_block_size

    rows = []
    for s in block_sizes:
        weight = majority_weight_from_block_size(s)
        scaled = s * weight
        asymptote = math.sqrt(2 * s / math.pi)
        rows.append(
            {
                "block_size": s,
                "weight": weight,
                "scaled_weight": float(scaled),
                "asymptote": asymptote,
                "ratio": float(scaled) / asymptote,
            }
        )
    return rows
