"""Closed-form ansatz search for the stationary radial system.

For a trial profile u = A * base(r)^n the potential is eliminated through

    alpha*V - omega = Lap(u)/u,

and the remaining Poisson equation -Lap(V) = u^2 (+ rho) becomes an exact
polynomial identity in the basis monomials.  Writing X = alpha*A^2, the
identity is linear in X: the residual is

    R = X * base^(2n) + Lap(Lap(u)/u),

and a candidate (n, D) is a solution exactly when X can cancel one
monomial of the geometric part and the rest vanishes (homogeneous mode) or
is simple enough to serve as a background source rho (background mode).
Everything here is exact rational arithmetic; hits report amplitude laws as
graded rationals X = q * (-kappa)^g, whose sign fixes the sign of alpha.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .geometry import Regime
from .symbolic import Basis, Graded, Monomial, RadialExpr, ZERO_GRADED

__all__ = [
    "Family",
    "AnsatzFamily",
    "AlphaSign",
    "OmegaValue",
    "DerivationHit",
    "CandidateStatus",
    "Candidate",
    "potential_term",
    "omega_of",
    "consistency_residual",
    "evaluate_candidate",
    "solve_homogeneous",
    "solve_singular_flat",
    "solve_background",
    "classify_alpha_sign",
    "solution_exprs",
    "resubstitution_defects",
]

_MAX_RANGE = 64


class Family(str, Enum):
    FLAT_POWER_C = "flat-c"
    FLAT_POWER_R = "flat-r"
    CURVED_POWER_C = "curved-c"
    CURVED_POWER_S = "curved-s"

    @property
    def basis(self) -> Basis:
        return Basis(self.value)

    @property
    def is_flat(self) -> bool:
        return self in (Family.FLAT_POWER_C, Family.FLAT_POWER_R)


class AlphaSign(str, Enum):
    ATTRACTIVE = "attractive"  # alpha < 0
    REPULSIVE = "repulsive"    # alpha > 0

    @property
    def sign(self) -> int:
        return -1 if self is AlphaSign.ATTRACTIVE else 1


@dataclass(frozen=True)
class AnsatzFamily:
    """A trial-profile family together with its integer exponent."""

    family: Family
    n: int


@dataclass(frozen=True)
class OmegaValue:
    """Frequency as a graded constant.

    `conventional` marks the spherical case, where no r -> infinity limit
    exists and the value is defined as the constant split of Lap(u)/u.
    """

    value: Graded
    conventional: bool = False

    def evaluate(self, neg_kappa: float) -> float:
        return self.value.evaluate(neg_kappa)

    def to_json_obj(self) -> dict:
        obj = self.value.to_json_obj()
        obj["conventional"] = self.conventional
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "OmegaValue":
        return cls(Graded.from_json_obj(obj), bool(obj.get("conventional", False)))


class CandidateStatus(str, Enum):
    HIT = "hit"
    NO_CANCELLATION = "no-cancellation"   # u^2 power collides with nothing
    LEFTOVER_TERMS = "leftover-terms"     # homogeneous: residual does not vanish
    NO_SOLUTION = "no-solution"           # forced amplitude A^2 = 0
    RHO_TOO_COMPLEX = "rho-too-complex"   # background: too many source monomials
    SINGULAR_U = "singular-u"             # background: profile has poles


@dataclass(frozen=True)
class DerivationHit:
    """One verified (family, n, D) solution of the matching problem."""

    family: Family
    n: int
    dim: int
    regime: Regime
    mode: str                      # "homogeneous" | "background"
    x_law: Graded                  # X = alpha * A^2, exact
    alpha_sign: AlphaSign
    omega: OmegaValue
    rho: RadialExpr                # empty in homogeneous mode
    notes: str = ""

    def amp_sq_value(self, kappa: float, alpha: float) -> float:
        """Numeric A^2 = X/alpha; raises if the signs are incompatible."""
        x = self.x_law.evaluate(-kappa)
        if alpha == 0:
            raise ValueError("alpha must be nonzero")
        amp_sq = x / alpha
        if amp_sq <= 0:
            raise ValueError(
                f"alpha = {alpha} gives A^2 = {amp_sq} <= 0; "
                f"this solution requires the {self.alpha_sign.value} sign"
            )
        return amp_sq

    def amp_sq_str(self) -> str:
        denom = "(-alpha)" if self.alpha_sign is AlphaSign.ATTRACTIVE else "alpha"
        coef = -self.x_law.coef if self.alpha_sign is AlphaSign.ATTRACTIVE else self.x_law.coef
        lead = Graded(coef, self.x_law.kappa)
        return f"A^2 = {lead}/{denom}"

    def sort_key(self):
        return (self.family.value, self.mode, self.n, self.dim)

    def to_json_obj(self) -> dict:
        return {
            "family": self.family.value,
            "n": self.n,
            "dim": self.dim,
            "regime": self.regime.value,
            "mode": self.mode,
            "x_law": self.x_law.to_json_obj(),
            "alpha_sign": self.alpha_sign.value,
            "amp_sq": self.amp_sq_str(),
            "omega": self.omega.to_json_obj(),
            "rho": self.rho.to_json_obj(),
            "notes": self.notes,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "DerivationHit":
        return cls(
            family=Family(obj["family"]),
            n=int(obj["n"]),
            dim=int(obj["dim"]),
            regime=Regime(obj["regime"]),
            mode=obj["mode"],
            x_law=Graded.from_json_obj(obj["x_law"]),
            alpha_sign=AlphaSign(obj["alpha_sign"]),
            omega=OmegaValue.from_json_obj(obj["omega"]),
            rho=RadialExpr.from_json_obj(obj["rho"]),
            notes=obj.get("notes", ""),
        )


@dataclass(frozen=True)
class Candidate:
    """Outcome of evaluating one (family, n, D) cell of the search grid."""

    status: CandidateStatus
    hit: Optional[DerivationHit] = None
    detail: str = ""


def _check_family_regime(family: Family, regime: Regime) -> None:
    if family.is_flat and regime is not Regime.FLAT:
        raise ValueError(f"family {family.value} requires the flat regime")
    if not family.is_flat and regime is Regime.FLAT:
        raise ValueError(f"family {family.value} requires a curved regime")


def _shape(fam: AnsatzFamily) -> RadialExpr:
    return RadialExpr.monomial(fam.family.basis, 1, base=fam.n)


def potential_term(fam: AnsatzFamily, regime: Regime, dim: int) -> RadialExpr:
    """Lap(u)/u for the trial profile: equals alpha*V - omega exactly."""
    _check_family_regime(fam.family, regime)
    shape = _shape(fam)
    return shape.laplacian(dim).div_monomial(shape)


def omega_of(fam: AnsatzFamily, regime: Regime, dim: int) -> OmegaValue:
    """Frequency fixed as -lim_{r->inf} Lap(u)/u.

    The flat power families always give zero.  On the sphere there is no
    such limit; the same constant split of Lap(u)/u is reported with the
    `conventional` flag set.
    """
    pot = potential_term(fam, regime, dim)
    if regime is Regime.SPHERICAL:
        const = [t for t in pot.terms if t.base == 0 and t.odd == 0]
        if not const:
            return OmegaValue(ZERO_GRADED, conventional=True)
        return OmegaValue(Graded(-const[0].coeff, const[0].kappa), conventional=True)
    limit = pot.limit_at_infinity(regime)
    if not isinstance(limit, Graded):
        raise ValueError(f"Lap(u)/u has no limit at infinity: {limit}")
    return OmegaValue(-limit, conventional=False)


def _geometry_part(fam: AnsatzFamily, dim: int) -> RadialExpr:
    # alpha*Lap(V) = Lap(Lap(u)/u): the constant omega drops under Lap.
    shape = _shape(fam)
    return shape.laplacian(dim).div_monomial(shape).laplacian(dim)


def consistency_residual(fam: AnsatzFamily, regime: Regime, dim: int) -> RadialExpr:
    """Residual alpha*u^2 + alpha*Lap(V), linear in X = alpha*A^2.

    The X term appears with grades (alpha=1, amp=2); the geometric part
    carries no coupling or amplitude grades.  The candidate is a solution
    exactly when a choice of X empties this expression (homogeneous mode).
    """
    _check_family_regime(fam.family, regime)
    geom = _geometry_part(fam, dim)
    x_term = RadialExpr.monomial(fam.family.basis, 1, base=2 * fam.n, alpha=1, amp=2)
    return geom + x_term


def _u_is_singular(fam: AnsatzFamily, regime: Regime) -> bool:
    """Does u = base^n have a pole anywhere on the closed radial domain?"""
    if fam.n >= 0:
        return False
    basis = fam.family.basis
    if basis is Basis.FLAT_C:
        return False                       # c >= 1 everywhere
    if basis is Basis.FLAT_R:
        return True                        # pole at the origin
    if basis is Basis.CURVED_S:
        return True                        # S vanishes at r = 0 (and antipode)
    # CURVED_C: cosh never vanishes, cos vanishes on the equator
    return regime is Regime.SPHERICAL


def singular_radius_tags(fam: AnsatzFamily, regime: Regime) -> tuple[str, ...]:
    """Symbolic labels of the genuine poles of u = base^n."""
    if fam.n >= 0:
        return ()
    basis = fam.family.basis
    if basis is Basis.FLAT_R:
        return ("origin",)
    if basis is Basis.CURVED_S:
        if regime is Regime.SPHERICAL:
            return ("origin", "antipode")
        return ("origin",)
    if basis is Basis.CURVED_C and regime is Regime.SPHERICAL:
        return ("equator",)
    return ()


def _alpha_sign_of(x: Graded, regime: Regime) -> AlphaSign:
    # sign of X = alpha*A^2 evaluated with the regime's sign of (-kappa)
    s = 1 if x.coef > 0 else -1
    if regime is Regime.SPHERICAL and x.kappa % 2:
        s = -s
    return AlphaSign.ATTRACTIVE if s < 0 else AlphaSign.REPULSIVE


def evaluate_candidate(
    fam: AnsatzFamily,
    regime: Regime,
    dim: int,
    mode: str = "homogeneous",
    max_rho_terms: int = 1,
) -> Candidate:
    """Run the matching procedure for a single (family, n, D) cell."""
    _check_family_regime(fam.family, regime)
    if mode not in ("homogeneous", "background"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "background" and fam.family is Family.FLAT_POWER_R:
        raise ValueError("pure power-of-r profiles are homogeneous-search only")

    geom = _geometry_part(fam, dim)
    basis = fam.family.basis
    u2_base = 2 * fam.n

    matching = [t for t in geom.terms if t.base == u2_base and t.odd == 0]
    rest = RadialExpr.from_terms(basis, (t for t in geom.terms if t.base != u2_base or t.odd != 0))
    if len(matching) > 1:
        # distinct curvature grades at one power cannot be cancelled by one X
        return Candidate(CandidateStatus.NO_CANCELLATION, detail="mixed grades at the u^2 power")
    # the coefficient at the u^2 power may legitimately be zero, forcing a
    # zero amplitude; distinguish that from failing the mode's acceptance
    x_law = Graded(-matching[0].coeff, matching[0].kappa) if matching else Graded(Fraction(0))

    if mode == "homogeneous":
        if not rest.is_zero:
            return Candidate(CandidateStatus.LEFTOVER_TERMS, detail=f"residual leftover: {rest}")
        rho = RadialExpr.zero(basis)
    else:
        if _u_is_singular(fam, regime):
            return Candidate(CandidateStatus.SINGULAR_U, detail="profile has poles on the closed domain")
        rho = (-rest).scale_grades(alpha=-1)
        if len(rho.terms) > max_rho_terms:
            return Candidate(
                CandidateStatus.RHO_TOO_COMPLEX,
                detail=f"source needs {len(rho.terms)} monomials (> {max_rho_terms})",
            )
    if x_law.is_zero:
        return Candidate(CandidateStatus.NO_SOLUTION, detail="forced amplitude is zero")

    hit = DerivationHit(
        family=fam.family,
        n=fam.n,
        dim=dim,
        regime=regime,
        mode=mode,
        x_law=x_law,
        alpha_sign=_alpha_sign_of(x_law, regime),
        omega=omega_of(fam, regime, dim),
        rho=rho,
    )
    return Candidate(CandidateStatus.HIT, hit=hit)


def _check_ranges(n_range: Sequence[int], d_range: Sequence[int]) -> None:
    if not n_range or not d_range:
        raise ValueError("empty search range")
    if len(n_range) > _MAX_RANGE or len(d_range) > _MAX_RANGE:
        raise ValueError(f"search range wider than {_MAX_RANGE}")
    if min(d_range) < 1:
        raise ValueError("dimensions must be >= 1")


def solve_homogeneous(
    family: Family,
    regime: Regime,
    n_range: Iterable[int],
    d_range: Iterable[int],
) -> list[DerivationHit]:
    """Enumerate exponents and dimensions; keep exact homogeneous solutions.

    A cell is accepted iff exactly one amplitude assignment empties the
    residual with A^2 != 0 (the sign of alpha is then forced).  n = 0 and
    positive exponents fall out of the same criterion rather than being
    special-cased.
    """
    ns, ds = sorted(set(n_range)), sorted(set(d_range))
    _check_ranges(ns, ds)
    hits = []
    for n in ns:
        for d in ds:
            cand = evaluate_candidate(AnsatzFamily(family, n), regime, d, "homogeneous")
            if cand.status is CandidateStatus.HIT:
                hits.append(cand.hit)
    hits.sort(key=DerivationHit.sort_key)
    return hits


def solve_singular_flat(d_range: Iterable[int]) -> list[DerivationHit]:
    """Pure power-of-r solutions: the inverse-square profile, any D != 4."""
    hits = []
    for d in sorted(set(d_range)):
        if d < 1:
            raise ValueError("dimensions must be >= 1")
        hits.extend(
            solve_homogeneous(Family.FLAT_POWER_R, Regime.FLAT, range(-8, 0), [d])
        )
    hits.sort(key=DerivationHit.sort_key)
    return hits


def solve_background(
    family: Family,
    regime: Regime,
    n_range: Iterable[int],
    d_range: Iterable[int],
    max_rho_terms: int = 1,
) -> list[DerivationHit]:
    """Search with a background source: -Lap(V) = u^2 + rho.

    After the amplitude cancels one residual monomial, the leftover becomes
    rho = -leftover/alpha; cells are kept when rho has at most
    `max_rho_terms` monomials and u has no poles on the closed domain.
    """
    ns, ds = sorted(set(n_range)), sorted(set(d_range))
    _check_ranges(ns, ds)
    hits = []
    for n in ns:
        for d in ds:
            cand = evaluate_candidate(
                AnsatzFamily(family, n), regime, d, "background", max_rho_terms
            )
            if cand.status is CandidateStatus.HIT:
                hits.append(cand.hit)
    hits.sort(key=DerivationHit.sort_key)
    return hits


def classify_alpha_sign(hit: DerivationHit) -> DerivationHit:
    """Annotate a hit with the sign of its background source under the
    coupling sign that makes A^2 positive."""
    note = f"coupling sign: {hit.alpha_sign.value}"
    if not hit.rho.is_zero:
        lead = hit.rho.terms[0]
        s = 1 if lead.coeff > 0 else -1
        if hit.regime is Regime.SPHERICAL and lead.kappa % 2:
            s = -s
        s *= hit.alpha_sign.sign ** lead.alpha
        note += f"; background source is {'positive' if s > 0 else 'negative'}"
    elif hit.mode == "background":
        note += "; background source vanishes"
    if hit.notes:
        note = hit.notes + " | " + note
    return replace(hit, notes=note)


# -- materialization ----------------------------------------------------


def solution_exprs(hit: DerivationHit) -> tuple[RadialExpr, RadialExpr]:
    """Exact (u, V) for a hit: u = A*base^n (amplitude grade 1) and
    V = (Lap(u)/u + omega)/alpha."""
    fam = AnsatzFamily(hit.family, hit.n)
    basis = hit.family.basis
    u = RadialExpr.monomial(basis, 1, base=hit.n, amp=1)
    pot = potential_term(fam, hit.regime, hit.dim)
    alpha_v = pot + RadialExpr.const(basis, hit.omega.value)
    v = alpha_v.scale_grades(alpha=-1)
    return u, v


def resubstitution_defects(
    u: RadialExpr,
    v: RadialExpr,
    rho: RadialExpr,
    omega: OmegaValue,
    x_law: Optional[Graded],
    dim: int,
) -> tuple[RadialExpr, RadialExpr]:
    """Exact residuals of both field equations; zero certifies a solution.

    Returns (-Lap(u) + alpha*V*u - omega*u, -Lap(V) - u^2 - rho) with the
    amplitude law substituted so everything cancels rationally.
    """
    basis = u.basis
    schro = -u.laplacian(dim) + v.scale_grades(alpha=1) * u \
        - RadialExpr.const(basis, omega.value) * u
    u2 = u * u
    if x_law is not None:
        u2 = u2.substitute_amp_sq(x_law)
    poisson = -v.laplacian(dim) - u2 - rho
    return schro, poisson
