"""Fixed-size hypercomplex value types and the product of a six-component
sample with a color vector.

Only the specific products used downstream are implemented (scalar part,
bivector part, local amplitude and local phase); this is deliberately not a
general multivector algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import ParameterError

# Serialized bivector blade order. Every 12-vector of bivector components in
# this package (including derivative bundles in tests) uses this order.
BLADES = (
    "e1e2", "e1e3", "e2e3",
    "e4e1", "e5e1", "e6e1",
    "e4e2", "e5e2", "e6e2",
    "e4e3", "e5e3", "e6e3",
)


@dataclass(frozen=True)
class ColorVector:
    """Channel weights (a, b, c) of the color nu = a*e1 + b*e2 + c*e3."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.a, self.b, self.c)):
            raise ParameterError("color vector components must be finite")
        if self.a == 0.0 and self.b == 0.0 and self.c == 0.0:
            raise ParameterError("degenerate color vector (0, 0, 0)")

    @property
    def norm_sq(self) -> float:
        return self.a * self.a + self.b * self.b + self.c * self.c

    def scaled(self, lam: float) -> "ColorVector":
        return ColorVector(lam * self.a, lam * self.b, lam * self.c)


@dataclass(frozen=True)
class CCHSSample:
    """The six real components (A1..A6) of the signal at one pixel."""

    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    a6: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in
                   (self.a1, self.a2, self.a3, self.a4, self.a5, self.a6)):
            raise ParameterError("sample components must be finite")


@dataclass(frozen=True)
class CliffordProduct:
    """Scalar part plus the 12 bivector components (in BLADES order) of the
    product sample * color."""

    sc: float
    bi: tuple

    def __post_init__(self):
        if len(self.bi) != 12:
            raise ParameterError("bivector part must have 12 components")


def clifford_color_product(s: CCHSSample, nu: ColorVector) -> CliffordProduct:
    """Multiply a six-component sample by a color vector.

    The scalar part is a*A1 + b*A2 + c*A3; the bivector components follow
    the BLADES order: three chromatic differences (a*A2 - b*A1, a*A3 - c*A1,
    b*A3 - c*A2) followed by the structure planes A4, A5, A6 each weighted by
    a, b, c.
    """
    a, b, c = nu.a, nu.b, nu.c
    sc = a * s.a1 + b * s.a2 + c * s.a3
    bi = (
        a * s.a2 - b * s.a1,
        a * s.a3 - c * s.a1,
        b * s.a3 - c * s.a2,
        a * s.a4, a * s.a5, a * s.a6,
        b * s.a4, b * s.a5, b * s.a6,
        c * s.a4, c * s.a5, c * s.a6,
    )
    return CliffordProduct(sc, bi)


def bivector_norm(p: CliffordProduct) -> float:
    return math.sqrt(math.fsum(v * v for v in p.bi))


def local_amplitude(p: CliffordProduct) -> float:
    """M = sqrt(sc^2 + |bi|^2) >= 0."""
    return math.hypot(p.sc, bivector_norm(p))


def local_phase(p: CliffordProduct) -> float:
    """theta = arctan(|bi| / |sc|) in [0, pi/2].

    Conventions: pi/2 when sc == 0 and |bi| > 0; 0 when both vanish (flat
    regions carry no structure, and NaN must not leak into gradients).
    """
    b = bivector_norm(p)
    if b == 0.0:
        return 0.0
    return math.atan2(b, abs(p.sc))
