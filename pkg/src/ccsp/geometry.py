"""Constant-curvature geometry: metric functions, volume weights, radial domains.

The three maximally symmetric spaces are described by a signed sectional
curvature kappa (zero: Euclidean, negative: hyperbolic, positive: sphere).
Radial formulas use the curvature-scaled functions

    S(r) = sinh(sqrt(-kappa) r)/sqrt(-kappa)    kappa < 0
         = r                                    kappa = 0
         = sin(sqrt(kappa) r)/sqrt(kappa)       kappa > 0

    C(r) = S'(r),   T(r) = S(r)/C(r)

which satisfy S' = C, C' = -kappa*S and C^2 - (-kappa)*S^2 = 1 in every
regime, so each identity in this package is stated once with a signed
curvature.  All functions here are pure; callers are responsible for
keeping numerical grids away from the coordinate singularities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class Regime(str, Enum):
    FLAT = "flat"
    HYPERBOLIC = "hyperbolic"
    SPHERICAL = "spherical"


class PoleError(ValueError):
    """A metric factor vanishes where a division is required."""


@dataclass(frozen=True)
class Space:
    """A simply connected space of constant sectional curvature.

    kappa < 0 for hyperbolic, kappa > 0 for spherical, and kappa == 0
    (ignored) for flat.  dim is the dimension D >= 1.
    """

    regime: Regime
    kappa: float
    dim: int

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")
        if self.regime is Regime.FLAT and self.kappa != 0.0:
            raise ValueError("flat space requires kappa == 0")
        if self.regime is Regime.HYPERBOLIC and not self.kappa < 0:
            raise ValueError("hyperbolic space requires kappa < 0")
        if self.regime is Regime.SPHERICAL and not self.kappa > 0:
            raise ValueError("spherical space requires kappa > 0")
        if not math.isfinite(self.kappa):
            raise ValueError("kappa must be finite")

    @classmethod
    def flat(cls, dim: int) -> "Space":
        return cls(Regime.FLAT, 0.0, dim)

    @classmethod
    def hyperbolic(cls, kappa: float, dim: int) -> "Space":
        return cls(Regime.HYPERBOLIC, kappa, dim)

    @classmethod
    def spherical(cls, kappa: float, dim: int) -> "Space":
        return cls(Regime.SPHERICAL, kappa, dim)

    @property
    def neg_kappa(self) -> float:
        return -self.kappa

    @property
    def r_max(self) -> float:
        """Upper end of the radial coordinate: pi/sqrt(kappa) on the sphere."""
        if self.regime is Regime.SPHERICAL:
            return math.pi / math.sqrt(self.kappa)
        return math.inf

    def domain(self, singularities: tuple[float, ...] = ()) -> "RadialDomain":
        return RadialDomain(0.0, self.r_max, tuple(sorted(singularities)))


@dataclass(frozen=True)
class RadialDomain:
    """Radial coordinate range plus the radii where catalog factors vanish."""

    r_min: float
    r_max: float
    boundary_singularities: tuple[float, ...] = ()


def _check_r(space: Space, r: float) -> None:
    if r < 0:
        raise ValueError(f"radius must be nonnegative, got {r}")
    if space.regime is Regime.SPHERICAL and r > space.r_max * (1 + 1e-12):
        raise ValueError(f"radius {r} beyond antipode {space.r_max}")


def metric_S(space: Space, r: float) -> float:
    """Curvature-scaled sine: the radius of the geodesic sphere at r."""
    _check_r(space, r)
    if space.regime is Regime.FLAT:
        return r
    if space.regime is Regime.HYPERBOLIC:
        lam = math.sqrt(-space.kappa)
        return math.sinh(lam * r) / lam
    mu = math.sqrt(space.kappa)
    return math.sin(mu * r) / mu


def metric_C(space: Space, r: float) -> float:
    """Derivative of metric_S; equals 1 identically in flat space."""
    _check_r(space, r)
    if space.regime is Regime.FLAT:
        return 1.0
    if space.regime is Regime.HYPERBOLIC:
        return math.cosh(math.sqrt(-space.kappa) * r)
    return math.cos(math.sqrt(space.kappa) * r)


def metric_T(space: Space, r: float) -> float:
    """S/C; has a pole on the spherical equator r = pi/(2 sqrt(kappa))."""
    c = metric_C(space, r)
    if abs(c) < 1e-14:
        raise PoleError(f"metric_T pole at r = {r} (equator)")
    return metric_S(space, r) / c


def sphere_area(dim: int) -> float:
    """Area of the unit sphere in `dim` dimensions: 2 pi^(D/2)/Gamma(D/2).

    dim == 1 gives 2, the counting measure of the two-point 0-sphere, which
    is what makes one-dimensional masses come out as two-sided line
    integrals.
    """
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


def volume_weight(space: Space, r: float) -> float:
    """Radial volume element S(r)^(D-1)."""
    return metric_S(space, r) ** (space.dim - 1)
