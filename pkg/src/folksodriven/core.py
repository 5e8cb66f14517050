"""Folksodriven tag model and the elasticity of tag relations.

A Folksodriven tag bundles a formal context (objects x attributes with an
incidence relation), the time exposition of its resource (clicks over
impressions), the resource itself and a point in a Minkowski-style vector
space derived from the three. The embedding squashes each component to a
dimensionless coordinate so tags are directly comparable:

    c = |incidence| / (|objects| * |attributes|)   context density, [0, 1]
    r = ordinal / (1 + ordinal)                    resource coordinate, [0, 1)
    e = clicks / impressions                       clickthrough rate, [0, 1]

with metric signature (+, +, -): the exposition coordinate is time-like, so
the squared interval is  s^2 = c^2 + r^2 - e^2.

Deformation of the tag network is scored by a piecewise-linear stress-strain
law with three regions (Elastic, Yield, Necking) and a continuous colour ramp
running red -> green -> purple -> near-black across those regions. All types
here are immutable values; all operations are pure functions, safe to share
between any number of concurrent callers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from urllib.parse import urlparse

from .errors import NegativeStrain, ZeroImpressions


@dataclass(frozen=True)
class FormalContext:
    """Objects, attributes and which object carries which attribute."""

    objects: frozenset[str] = frozenset()
    attributes: frozenset[str] = frozenset()
    incidence: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "objects", frozenset(self.objects))
        object.__setattr__(self, "attributes", frozenset(self.attributes))
        object.__setattr__(self, "incidence", frozenset(self.incidence))
        for obj, attr in self.incidence:
            if obj not in self.objects:
                raise ValueError(f"incidence references unknown object {obj!r}")
            if attr not in self.attributes:
                raise ValueError(f"incidence references unknown attribute {attr!r}")


@dataclass(frozen=True)
class TimeExposition:
    """Click/impression counts for one resource."""

    clicks: int = 0
    impressions: int = 0

    def __post_init__(self):
        if self.clicks < 0 or self.impressions < 0:
            raise ValueError("clicks and impressions must be non-negative")
        if self.clicks > self.impressions:
            raise ValueError("clicks cannot exceed impressions")


@dataclass(frozen=True)
class Resource:
    """An absolute URI plus its monotone intake ordinal."""

    uri: str
    ordinal: int = 0

    def __post_init__(self):
        parsed = urlparse(self.uri)
        if not parsed.scheme:
            raise ValueError(f"not an absolute URI: {self.uri!r}")
        if self.ordinal < 0:
            raise ValueError("ordinal must be non-negative")


@dataclass(frozen=True)
class MinkowskiPoint:
    c: float = 0.0
    r: float = 0.0
    e: float = 0.0

    @property
    def interval(self) -> float:
        """Squared interval under the (+, +, -) signature."""
        return self.c * self.c + self.r * self.r - self.e * self.e

    @property
    def timelike(self) -> bool:
        return self.interval < 0.0


def compute_ctr(exposition: TimeExposition) -> float:
    """Clickthrough rate in [0, 1]; undefined (not zero) without impressions."""
    if exposition.impressions == 0:
        raise ZeroImpressions("resource was never displayed, CTR undefined")
    return exposition.clicks / exposition.impressions


def context_density(context: FormalContext) -> float:
    """Fraction of the object x attribute grid covered by the incidence."""
    cells = len(context.objects) * len(context.attributes)
    if cells == 0:
        return 0.0
    return len(context.incidence) / cells


def _embed(context: FormalContext, exposition: TimeExposition,
           resource: Resource) -> MinkowskiPoint:
    c = context_density(context)
    # a never-displayed resource contributes no exposition; the standalone
    # CTR operation still errors in that case
    e = 0.0 if exposition.impressions == 0 else compute_ctr(exposition)
    r = resource.ordinal / (1 + resource.ordinal)
    return MinkowskiPoint(c=c, r=r, e=e)


@dataclass(frozen=True)
class FolksodrivenTag:
    """The tag tuple: context, exposition, resource and their embedding.

    The point is derived, never supplied: any change to the parts goes
    through a ``with_*`` helper which re-embeds.
    """

    id: str
    label: str
    context: FormalContext
    exposition: TimeExposition
    resource: Resource
    point: MinkowskiPoint = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "point",
                           _embed(self.context, self.exposition, self.resource))

    def with_label(self, label: str) -> "FolksodrivenTag":
        return FolksodrivenTag(self.id, label, self.context,
                               self.exposition, self.resource)

    def with_context(self, context: FormalContext) -> "FolksodrivenTag":
        return FolksodrivenTag(self.id, self.label, context,
                               self.exposition, self.resource)

    def with_exposition(self, exposition: TimeExposition) -> "FolksodrivenTag":
        return FolksodrivenTag(self.id, self.label, self.context,
                               exposition, self.resource)


def embed(tag: FolksodrivenTag) -> MinkowskiPoint:
    """Recompute the tag's embedding from its parts."""
    return _embed(tag.context, tag.exposition, tag.resource)


class Region(enum.IntEnum):
    """Stress-strain regions, ordered by increasing strain."""

    ELASTIC = 0
    YIELD = 1
    NECKING = 2

    def __str__(self) -> str:
        return {Region.ELASTIC: "Elastic", Region.YIELD: "Yield",
                Region.NECKING: "Necking"}[self]


@dataclass(frozen=True)
class ElasticityParams:
    """Parameters of the piecewise-linear constitutive curve."""

    modulus: float = 1.0
    yield_strain: float = 0.2
    necking_strain: float = 0.6
    post_yield_slope: float = 0.25

    def __post_init__(self):
        if self.modulus <= 0:
            raise ValueError("modulus must be positive")
        if not 0 < self.yield_strain < self.necking_strain:
            raise ValueError("need 0 < yield_strain < necking_strain")
        if self.post_yield_slope < 0:
            raise ValueError("post_yield_slope must be non-negative")


def classify_region(stress: float, strain: float,
                    params: ElasticityParams) -> Region:
    """Region of a sample; boundary strains belong to the higher region."""
    if strain < 0:
        raise NegativeStrain(f"strain must be non-negative, got {strain}")
    if strain < params.yield_strain:
        return Region.ELASTIC
    if strain < params.necking_strain:
        return Region.YIELD
    return Region.NECKING


def stress_at(strain: float, params: ElasticityParams) -> float:
    """Stress of the constitutive curve at the given strain.

    Linear up to the yield strain, a flatter linear hardening branch up to
    the necking strain, then linear softening that reaches zero at twice the
    necking strain and stays there. Continuous everywhere.
    """
    if strain < 0:
        raise NegativeStrain(f"strain must be non-negative, got {strain}")
    ey, en = params.yield_strain, params.necking_strain
    if strain < ey:
        return params.modulus * strain
    if strain < en:
        return params.modulus * ey + params.post_yield_slope * (strain - ey)
    peak = params.modulus * ey + params.post_yield_slope * (en - ey)
    if strain >= 2 * en:
        return 0.0
    return peak * (2 * en - strain) / en


@dataclass(frozen=True)
class StressStrainSample:
    """One point on the curve together with its region classification."""

    stress: float
    strain: float
    region: Region

    @classmethod
    def at(cls, strain: float, params: ElasticityParams) -> "StressStrainSample":
        stress = stress_at(strain, params)
        return cls(stress=stress, strain=strain,
                   region=classify_region(stress, strain, params))


RGB = tuple[int, int, int]

COLOR_ELASTIC: RGB = (255, 0, 0)
COLOR_YIELD: RGB = (0, 160, 0)
COLOR_NECKING: RGB = (128, 0, 128)
COLOR_TERMINAL: RGB = (32, 0, 32)
COLOR_NEUTRAL: RGB = (200, 200, 200)


def _color_stops(params: ElasticityParams) -> list[tuple[float, RGB]]:
    return [
        (0.0, COLOR_ELASTIC),
        (params.yield_strain, COLOR_YIELD),
        (params.necking_strain, COLOR_NECKING),
        (2 * params.necking_strain, COLOR_TERMINAL),
    ]


def region_color(strain: float, params: ElasticityParams) -> RGB:
    """Colour on the red -> green -> purple -> near-black strain ramp."""
    if strain < 0:
        raise NegativeStrain(f"strain must be non-negative, got {strain}")
    stops = _color_stops(params)
    if strain >= stops[-1][0]:
        return stops[-1][1]
    for (s0, c0), (s1, c1) in zip(stops, stops[1:]):
        if strain < s1:
            t = (strain - s0) / (s1 - s0)
            return tuple(round(a + (b - a) * t) for a, b in zip(c0, c1))
    return stops[-1][1]
