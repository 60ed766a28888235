"""Verified records of every closed-form solution the package knows.

Each entry is materialized by actually running the derivation engine for
its (family, exponent, dimension) cell and re-substituting the resulting
profile into both field equations symbolically; construction fails loudly
if either residual is nonzero.  Masses are stored as exact graded
constants (rational * sphere area * pi^p * |kappa|^(k/2) * |alpha|^a) so
the numerical layer can verify them at any curvature and coupling.

Flat homogeneous entries form a scaling family u_a(r) = a^-2 u(r/a); the
curved entries do not scale (the curved Laplacian has no scale symmetry),
and :func:`scale_flat_solution` refuses them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import numeric
from .derivation import (
    AlphaSign,
    AnsatzFamily,
    CandidateStatus,
    DerivationHit,
    Family,
    OmegaValue,
    evaluate_candidate,
    resubstitution_defects,
    singular_radius_tags,
    solution_exprs,
)
from .geometry import Regime, Space, sphere_area
from .symbolic import Basis, Graded, RadialExpr, ZERO_GRADED

__all__ = [
    "GradedMass",
    "Solution",
    "NotScalableError",
    "CATALOG",
    "catalog_list",
    "get_solution",
    "solution_from_hit",
    "scale_flat_solution",
    "compactness_obstruction_check",
    "CompactnessReport",
]

FULL = "FULL"
RADIAL_INTEGRAL = "RADIAL_INTEGRAL"


class NotScalableError(ValueError):
    """Only flat homogeneous solutions form a scaling family."""


@dataclass(frozen=True)
class GradedMass:
    """Exact closed-form mass: coef * S_sub * pi^p * |kappa|^(k2/2) * |alpha|^a.

    sphere_sub is the subscript of the unit-sphere area factor (S_5 for six
    ambient dimensions), or None when no sphere factor is included (the
    radial-integral convention).
    """

    coef: Fraction
    sphere_sub: Optional[int] = None
    pi_pow: int = 0
    kappa_pow2: int = 0
    alpha_pow: int = -1

    def value(self, kappa: float, alpha: float) -> float:
        v = float(self.coef)
        if self.sphere_sub is not None:
            v *= sphere_area(self.sphere_sub + 1)
        if self.pi_pow:
            v *= math.pi**self.pi_pow
        if self.kappa_pow2:
            v *= abs(kappa) ** (self.kappa_pow2 / 2.0)
        if self.alpha_pow:
            v *= abs(alpha) ** self.alpha_pow
        return v

    def to_json_obj(self) -> dict:
        return {
            "coef": str(self.coef),
            "sphere_sub": self.sphere_sub,
            "pi_pow": self.pi_pow,
            "kappa_pow2": self.kappa_pow2,
            "alpha_pow": self.alpha_pow,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "GradedMass":
        return cls(
            Fraction(obj["coef"]),
            obj["sphere_sub"],
            int(obj["pi_pow"]),
            int(obj["kappa_pow2"]),
            int(obj["alpha_pow"]),
        )


_TAG_RADII: dict[str, Callable[[float], float]] = {
    "origin": lambda kappa: 0.0,
    "equator": lambda kappa: math.pi / (2.0 * math.sqrt(kappa)),
    "antipode": lambda kappa: math.pi / math.sqrt(kappa),
}


@dataclass(frozen=True)
class Solution:
    """A complete, symbolically verified solution record."""

    id: str
    regime: Regime
    dim: int
    u: RadialExpr
    V: RadialExpr
    rho: RadialExpr
    omega: OmegaValue
    alpha_sign: Optional[AlphaSign]     # None: valid for either coupling sign
    x_law: Optional[Graded]             # X = alpha*A^2; None: amplitude-free
    singular_radii: tuple[str, ...]
    mass: Optional[GradedMass]
    mass_convention: str
    finite_mass: bool
    provenance: str
    scale: float = 1.0
    family: Optional[Family] = None
    n: Optional[int] = None

    # -- parameter handling -------------------------------------------

    def space(self, kappa: float) -> Space:
        return Space(self.regime, kappa if self.regime is not Regime.FLAT else 0.0, self.dim)

    def check_alpha(self, alpha: float) -> None:
        if alpha == 0 or not math.isfinite(alpha):
            raise ValueError("alpha must be finite and nonzero")
        if self.alpha_sign is AlphaSign.ATTRACTIVE and alpha >= 0:
            raise ValueError(f"{self.id} requires alpha < 0 (attractive)")
        if self.alpha_sign is AlphaSign.REPULSIVE and alpha <= 0:
            raise ValueError(f"{self.id} requires alpha > 0 (repulsive)")

    def amp_sq(self, kappa: float, alpha: float) -> float:
        self.check_alpha(alpha)
        if self.x_law is None:
            return 1.0
        amp_sq = self.x_law.evaluate(-kappa) / alpha
        if amp_sq <= 0:
            raise ValueError(f"{self.id}: amplitude law gives A^2 = {amp_sq} <= 0")
        return amp_sq

    def _scaled(self, fn: Callable, power: int) -> Callable:
        if self.scale == 1.0:
            return fn
        a = self.scale
        return lambda r: fn(r / a) * a**power

    def u_fn(self, kappa: float, alpha: float) -> Callable:
        amp = self.amp_sq(kappa, alpha)
        return self._scaled(self.u.compile(self.space(kappa), alpha, amp), -2)

    def v_fn(self, kappa: float, alpha: float) -> Callable:
        amp = self.amp_sq(kappa, alpha)
        return self._scaled(self.V.compile(self.space(kappa), alpha, amp), -2)

    def rho_fn(self, kappa: float, alpha: float) -> Callable:
        amp = self.amp_sq(kappa, alpha)
        return self._scaled(self.rho.compile(self.space(kappa), alpha, amp), -4)

    def omega_value(self, kappa: float) -> float:
        return self.omega.evaluate(-kappa) / self.scale**2

    def singular_radii_values(self, kappa: float) -> tuple[float, ...]:
        return tuple(sorted(_TAG_RADII[t](kappa) * (self.scale if t == "origin" else 1.0)
                            for t in self.singular_radii))

    def expected_mass_value(self, kappa: float, alpha: float) -> Optional[float]:
        """Closed-form full-manifold mass, or None for infinite-mass entries."""
        if self.mass is None:
            return None
        v = self.mass.value(kappa, alpha)
        if self.mass_convention == RADIAL_INTEGRAL:
            v *= sphere_area(self.dim)
        return v * self.scale ** (self.dim - 4)

    # -- serialization -------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "id": self.id,
            "regime": self.regime.value,
            "dim": self.dim,
            "u": self.u.to_json_obj(),
            "V": self.V.to_json_obj(),
            "rho": None if self.rho.is_zero else self.rho.to_json_obj(),
            "omega": self.omega.to_json_obj(),
            "alpha_sign": self.alpha_sign.value if self.alpha_sign else "any",
            "amp_law": self.x_law.to_json_obj() if self.x_law else None,
            "singular_radii": list(self.singular_radii),
            "mass": self.mass.to_json_obj() if self.mass else None,
            "mass_convention": self.mass_convention,
            "provenance": self.provenance,
            "scale": self.scale,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Solution":
        rho = obj["rho"]
        u = RadialExpr.from_json_obj(obj["u"])
        sign = obj["alpha_sign"]
        return cls(
            id=obj["id"],
            regime=Regime(obj["regime"]),
            dim=int(obj["dim"]),
            u=u,
            V=RadialExpr.from_json_obj(obj["V"]),
            rho=RadialExpr.zero(u.basis) if rho is None else RadialExpr.from_json_obj(rho),
            omega=OmegaValue.from_json_obj(obj["omega"]),
            alpha_sign=None if sign == "any" else AlphaSign(sign),
            x_law=Graded.from_json_obj(obj["amp_law"]) if obj["amp_law"] else None,
            singular_radii=tuple(obj["singular_radii"]),
            mass=GradedMass.from_json_obj(obj["mass"]) if obj["mass"] else None,
            mass_convention=obj["mass_convention"],
            finite_mass=obj["mass"] is not None,
            provenance=obj["provenance"],
            scale=float(obj.get("scale", 1.0)),
        )

    @classmethod
    def from_json(cls, text: str) -> "Solution":
        return cls.from_json_obj(json.loads(text))


def solution_from_hit(
    hit: DerivationHit,
    id: str,
    mass: Optional[GradedMass] = None,
    mass_convention: str = FULL,
    provenance: str = "",
) -> Solution:
    """Materialize a derivation hit into a full record, re-checking both
    field equations symbolically."""
    u, v = solution_exprs(hit)
    schro, poisson = resubstitution_defects(u, v, hit.rho, hit.omega, hit.x_law, hit.dim)
    if not schro.is_zero or not poisson.is_zero:
        raise AssertionError(f"{id}: re-substitution defect (schro={schro}, poisson={poisson})")
    return Solution(
        id=id,
        regime=hit.regime,
        dim=hit.dim,
        u=u,
        V=v,
        rho=hit.rho,
        omega=hit.omega,
        alpha_sign=hit.alpha_sign,
        x_law=hit.x_law,
        singular_radii=singular_radius_tags(AnsatzFamily(hit.family, hit.n), hit.regime),
        mass=mass,
        mass_convention=mass_convention,
        finite_mass=mass is not None,
        provenance=provenance,
        family=hit.family,
        n=hit.n,
    )


def _entry(
    id: str,
    family: Family,
    n: int,
    regime: Regime,
    dim: int,
    mode: str,
    mass: Optional[GradedMass] = None,
    mass_convention: str = FULL,
    provenance: str = "",
) -> Solution:
    cand = evaluate_candidate(AnsatzFamily(family, n), regime, dim, mode)
    if cand.status is not CandidateStatus.HIT:
        raise AssertionError(f"{id}: expected a hit, got {cand.status.value} ({cand.detail})")
    return solution_from_hit(cand.hit, id, mass, mass_convention, provenance)


def _trivial_sphere_entry() -> Solution:
    basis = Basis.CURVED_C
    u = RadialExpr.monomial(basis, 1)
    v = RadialExpr.zero(basis)
    rho = RadialExpr.monomial(basis, -1)
    return Solution(
        id="SPH_TRIVIAL",
        regime=Regime.SPHERICAL,
        dim=3,
        u=u,
        V=v,
        rho=rho,
        omega=OmegaValue(ZERO_GRADED, conventional=True),
        alpha_sign=None,
        x_law=None,
        singular_radii=(),
        mass=GradedMass(Fraction(2), None, pi_pow=2, kappa_pow2=-3, alpha_pow=0),
        mass_convention=FULL,
        finite_mass=True,
        provenance=(
            "Constant profile on the 3-sphere with u^2 = -rho = 1 and V = 0; the only "
            "background solution regular on the whole sphere.  Works for either coupling "
            "sign.  Mass equals the sphere volume 2 pi^2 kappa^(-3/2)."
        ),
    )


def _build_catalog() -> tuple[Solution, ...]:
    F_ = Fraction
    entries = [
        _entry(
            "FLAT_CSV", Family.FLAT_POWER_C, -4, Regime.FLAT, 6, "homogeneous",
            mass=GradedMass(F_(96), sphere_sub=5),
            provenance=(
                "Self-attractive profile A (1+r^2)^-2 in dimension six, amplitude "
                "A = 24/sqrt(-alpha); smooth, square-integrable, and a member of the "
                "scaling family u_a(r) = a^-2 u(r/a) with N[u_a] = a^2 N[u].  Exponent "
                "convention: n counts powers of c = sqrt(1+r^2), so this is n = -4."
            ),
        ),
        _entry(
            "FLAT_SINGULAR_D3", Family.FLAT_POWER_R, -2, Regime.FLAT, 3, "homogeneous",
            provenance=(
                "Inverse-square profile u = 2|D-4| r^-2/sqrt(-alpha) at D = 3; singular "
                "at the origin, infinite mass.  Quotes of the amplitude as "
                "2(D-4) r^-2/(-alpha) are dimensionally inconsistent; coefficient "
                "matching forces the 1/sqrt(-alpha) normalization."
            ),
        ),
        _entry(
            "FLAT_SINGULAR_D6", Family.FLAT_POWER_R, -2, Regime.FLAT, 6, "homogeneous",
            provenance=(
                "Inverse-square profile at D = 6, amplitude 4/sqrt(-alpha); singular at "
                "the origin, infinite mass (the D = 4 member has zero amplitude and "
                "does not exist)."
            ),
        ),
        _entry(
            "BG_FLAT_N3_D4", Family.FLAT_POWER_C, -3, Regime.FLAT, 4, "background",
            mass=GradedMass(F_(36), sphere_sub=3),
            provenance=(
                "Repulsive background profile u = 12 c^-3/sqrt(alpha) at D = 4 with "
                "source rho = -360/(alpha c^8).  Mass is finite, N = 36 S_3/alpha "
                "(despite occasional claims of divergence: the integrand decays like "
                "r^-3)."
            ),
        ),
        _entry(
            "BG_FLAT_N3_D5", Family.FLAT_POWER_C, -3, Regime.FLAT, 5, "background",
            mass=GradedMass(F_(45, 4), sphere_sub=4, pi_pow=1),
            provenance=(
                "Repulsive background profile u = sqrt(60/alpha) c^-3 at D = 5, same "
                "source rho = -360/(alpha c^8).  Mass is finite, N = (45 pi/4) S_4/alpha."
            ),
        ),
        _entry(
            "BG_FLAT_N4_D4", Family.FLAT_POWER_C, -4, Regime.FLAT, 4, "background",
            mass=GradedMass(F_(48), sphere_sub=3),
            provenance=(
                "Attractive background companion of the D = 6 profile, taken at D = 4: "
                "u = 24 c^-4/sqrt(-alpha), rho = 256/(alpha c^6).  For alpha < 0 the "
                "source is negative (positive-sign quotes drop the orientation of the "
                "Poisson source; direct substitution fixes it).  Mass is finite, "
                "N = 48 S_3/(-alpha)."
            ),
        ),
        _entry(
            "HYP_U1", Family.CURVED_POWER_C, -2, Regime.HYPERBOLIC, 3, "homogeneous",
            mass=GradedMass(F_(12), sphere_sub=2, kappa_pow2=1),
            provenance=(
                "Attractive inverse-C-squared profile in hyperbolic 3-space, amplitude "
                "A = 6(-kappa)/sqrt(-alpha), omega = 0; smooth and square-integrable "
                "with N = 12 S_2 sqrt(-kappa)/(-alpha).  Not scalable: one solution per "
                "(kappa, alpha)."
            ),
        ),
        _entry(
            "HYP_U2", Family.CURVED_POWER_S, -2, Regime.HYPERBOLIC, 3, "homogeneous",
            provenance=(
                "Attractive inverse-S-squared profile, D = 3.  With the metric function "
                "S the exact amplitude is 2/sqrt(-alpha); quotes of 2(-kappa)/sqrt(-alpha) "
                "presume the unscaled sinh normalization and agree at kappa = -1.  "
                "Singular at the origin; mass diverges from small r."
            ),
        ),
        _entry(
            "HYP_U3", Family.CURVED_POWER_S, -1, Regime.HYPERBOLIC, 4, "homogeneous",
            provenance=(
                "Attractive inverse-S profile, D = 4, amplitude sqrt(2(-kappa)/(-alpha)) "
                "in the metric-S normalization (unscaled-sinh quotes carry an extra "
                "sqrt(-kappa)), omega = 2(-kappa).  Singular at the origin; mass "
                "diverges from large r."
            ),
        ),
        _entry(
            "BG_HYP_N2_D1", Family.CURVED_POWER_C, -2, Regime.HYPERBOLIC, 1, "background",
            mass=GradedMass(F_(24), sphere_sub=0, kappa_pow2=3),
            provenance=(
                "D = 1 member of the attractive inverse-C-squared background family; "
                "the source rho = -24 (-kappa)^2/((-alpha) C^2) is negative, so it "
                "cannot model a gravitating background, but it solves the equations "
                "exactly.  Finite mass N = 48 (-kappa)^(3/2)/(-alpha)."
            ),
        ),
        _entry(
            "BG_HYP_N2_D2", Family.CURVED_POWER_C, -2, Regime.HYPERBOLIC, 2, "background",
            mass=GradedMass(F_(12), sphere_sub=1, kappa_pow2=2),
            provenance=(
                "D = 2 member of the attractive inverse-C-squared background family "
                "(negative source, as below three dimensions); finite mass "
                "N = 12 S_1 (-kappa)/(-alpha)."
            ),
        ),
        _entry(
            "BG_HYP_N2_D4", Family.CURVED_POWER_C, -2, Regime.HYPERBOLIC, 4, "background",
            mass=GradedMass(F_(24), sphere_sub=3),
            provenance=(
                "Attractive inverse-C-squared profile continued to D = 4 with source "
                "rho = 12 (-kappa)^2/((-alpha) C^2) >= 0; finite mass "
                "N = 24 S_3/(-alpha), independent of the curvature.  The family has "
                "finite mass only for D <= 4."
            ),
        ),
        _entry(
            "BG_HYP_N2_D5", Family.CURVED_POWER_C, -2, Regime.HYPERBOLIC, 5, "background",
            provenance=(
                "D = 5 member of the inverse-C-squared background family; the mass "
                "integrand tends to a nonzero constant, so the mass diverges."
            ),
        ),
        _entry(
            "BG_HYP_N2_D6", Family.CURVED_POWER_C, -2, Regime.HYPERBOLIC, 6, "background",
            provenance=(
                "D = 6 member of the inverse-C-squared background family; infinite mass."
            ),
        ),
        _entry(
            "BG_HYP_N1_D2", Family.CURVED_POWER_C, -1, Regime.HYPERBOLIC, 2, "background",
            mass=GradedMass(F_(4), sphere_sub=1, kappa_pow2=2),
            provenance=(
                "Repulsive inverse-C profile at D = 2 (below three dimensions the "
                "amplitude law forces alpha > 0, so the source rho = -12 (-kappa)^2/"
                "(alpha C^4) is a negative charge).  Finite mass N = 4 S_1 (-kappa)/alpha."
            ),
        ),
        _entry(
            "BG_HYP_N1_D4", Family.CURVED_POWER_C, -1, Regime.HYPERBOLIC, 4, "background",
            provenance=(
                "Attractive inverse-C profile at D = 4 with positive source "
                "rho = 12 (-kappa)^2/((-alpha) C^4); infinite mass (finite only below "
                "three dimensions).  At D = 3 the amplitude vanishes and no such "
                "solution exists."
            ),
        ),
        _entry(
            "BG_HYP_N1_D5", Family.CURVED_POWER_C, -1, Regime.HYPERBOLIC, 5, "background",
            provenance=(
                "Attractive inverse-C profile at D = 5; infinite mass."
            ),
        ),
        _entry(
            "BG_HYP_N1_D6", Family.CURVED_POWER_C, -1, Regime.HYPERBOLIC, 6, "background",
            provenance=(
                "Attractive inverse-C profile at D = 6; infinite mass."
            ),
        ),
        _entry(
            "BG_1D_SECH", Family.CURVED_POWER_C, -1, Regime.HYPERBOLIC, 1, "background",
            mass=GradedMass(F_(8), sphere_sub=0, kappa_pow2=3),
            provenance=(
                "One-dimensional sech profile: with kappa = -1/R^2 the line metric is "
                "Euclidean and u = sqrt(8/alpha)/(R^2 cosh(r/R)), "
                "rho = -12/(alpha R^4 cosh^4(r/R)), a repulsive solution with a "
                "negative background charge.  Mass N = 16/(R^3 alpha) equals the "
                "integral of -rho; the family scales with R."
            ),
        ),
        _entry(
            "SPH_U1", Family.CURVED_POWER_C, -2, Regime.SPHERICAL, 3, "homogeneous",
            provenance=(
                "Spherical continuation of the inverse-C-squared profile (C = cos): "
                "attractive, amplitude 6 kappa/sqrt(-alpha), omega = 0.  Singular on "
                "the equator where C vanishes; infinite mass."
            ),
        ),
        _entry(
            "SPH_U2", Family.CURVED_POWER_S, -2, Regime.SPHERICAL, 3, "homogeneous",
            provenance=(
                "Spherical inverse-S-squared profile: attractive, amplitude "
                "2/sqrt(-alpha) (metric-S normalization).  Singular at both antipodes; "
                "mass diverges."
            ),
        ),
        _entry(
            "SPH_U3", Family.CURVED_POWER_S, -1, Regime.SPHERICAL, 4, "homogeneous",
            mass=GradedMass(F_(4)),
            mass_convention=RADIAL_INTEGRAL,
            provenance=(
                "Spherical inverse-S profile at D = 4.  Direct substitution forces the "
                "repulsive sign: alpha A^2 = 2 kappa > 0 and omega = -2 kappa; the "
                "attractive continuation sometimes quoted fails the Poisson equation.  "
                "Singular at both antipodes.  The radial mass integral is exactly "
                "4/alpha (kappa-independent); quotes of 4 kappa/(-alpha) use the "
                "unscaled-sin normalization with the attractive sign and agree in "
                "magnitude at |kappa| = |alpha| = 1.  Stored value uses the "
                "radial-integral convention (multiply by S_3 for the full mass)."
            ),
        ),
        _trivial_sphere_entry(),
    ]
    ids = [e.id for e in entries]
    if len(set(ids)) != len(ids):
        raise AssertionError("duplicate catalog ids")
    return tuple(entries)


CATALOG: tuple[Solution, ...] = _build_catalog()
_BY_ID = {sol.id: sol for sol in CATALOG}


def get_solution(id: str) -> Solution:
    try:
        return _BY_ID[id]
    except KeyError:
        raise KeyError(f"unknown solution id {id!r}; known: {', '.join(_BY_ID)}") from None


def catalog_list(
    regime: Optional[Regime] = None,
    dim: Optional[int] = None,
    alpha_sign: Optional[AlphaSign] = None,
    finite_mass: Optional[bool] = None,
) -> list[Solution]:
    """Filter the catalog; filters are conjunctive, order is deterministic.

    Entries valid for either coupling sign match both alpha_sign filters.
    """
    out = []
    for sol in CATALOG:
        if regime is not None and sol.regime is not regime:
            continue
        if dim is not None and sol.dim != dim:
            continue
        if alpha_sign is not None and sol.alpha_sign is not None and sol.alpha_sign is not alpha_sign:
            continue
        if finite_mass is not None and sol.finite_mass != finite_mass:
            continue
        out.append(sol)
    return out


def scale_flat_solution(sol: Solution, a: float) -> Solution:
    """Rescale a flat homogeneous solution: u_a(r) = a^-2 u(r/a).

    Masses transform as N[u_a] = a^(D-4) N[u] (a^2 N[u] in six dimensions).
    Curved solutions admit no such family and are rejected.
    """
    if not (a > 0) or not math.isfinite(a):
        raise ValueError(f"scale factor must be positive and finite, got {a}")
    if sol.regime is not Regime.FLAT:
        raise NotScalableError(
            f"{sol.id}: curved solutions do not scale; one solution per (kappa, alpha)"
        )
    if not sol.rho.is_zero:
        raise NotScalableError(f"{sol.id}: background solutions are not rescaled here")
    return replace(sol, scale=sol.scale * a)


@dataclass(frozen=True)
class CompactnessReport:
    """Outcome of the compact-manifold charge-balance check."""

    solution_id: str
    has_singularity: bool
    consistent: bool
    total_charge: Optional[float]   # background entries only
    detail: str


def compactness_obstruction_check(sol: Solution, kappa: float = 1.0, alpha: Optional[float] = None) -> CompactnessReport:
    """On the sphere a regular homogeneous solution would force
    integral(u^2) = 0, a contradiction; so homogeneous entries must be
    singular somewhere, and background entries must balance charge:
    integral(u^2 + rho) = 0 over the whole manifold."""
    if sol.regime is not Regime.SPHERICAL:
        raise ValueError("compactness check applies to spherical solutions")
    if alpha is None:
        alpha = -1.0 if sol.alpha_sign in (AlphaSign.ATTRACTIVE, None) else 1.0
    space = sol.space(kappa)
    if sol.rho.is_zero:
        has_sing = bool(sol.singular_radii)
        return CompactnessReport(
            solution_id=sol.id,
            has_singularity=has_sing,
            consistent=has_sing,
            total_charge=None,
            detail="singular set nonempty, as the charge-balance obstruction requires"
            if has_sing
            else "CONTRADICTION: regular homogeneous solution on a compact manifold",
        )
    u = sol.u_fn(kappa, alpha)
    rho = sol.rho_fn(kappa, alpha)
    mu = math.sqrt(kappa)

    def integrand(r):
        r = np.asarray(r, dtype=float)
        s = np.sin(mu * r) / mu
        return (u(r) ** 2 + rho(r)) * s ** (sol.dim - 1)

    total = numeric.integrate_radial(integrand, space, 0.0, space.r_max, rel_tol=1e-12)
    if isinstance(total, numeric.Divergent):
        return CompactnessReport(sol.id, bool(sol.singular_radii), False, None, "charge integral diverges")
    total *= sphere_area(sol.dim)
    ok = abs(total) <= 1e-10
    return CompactnessReport(
        solution_id=sol.id,
        has_singularity=bool(sol.singular_radii),
        consistent=ok,
        total_charge=total,
        detail=f"total charge {total:.3e}",
    )
