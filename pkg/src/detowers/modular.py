"""Supersingular polynomials, classical X_0(N) invariants, and stock towers.

The Deuring polynomial (the Hasse invariant of the Legendre family) and the
supersingular polynomial in the j-line are computed by exact binomial
arithmetic and the x^(p-1)-coefficient criterion on short Weierstrass
models.  The named tower fixtures bundle the explicit correspondences this
library is built to verify, ready for validation and enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .fields import (
    FieldDescriptor,
    FieldElement,
    FieldError,
    is_nth_power,
    is_prime,
    make_field,
    nth_root,
)
from .ratfunc import (
    INF,
    Place,
    Poly,
    RatFunc,
    lift_poly,
    parse_ratfunc,
    poly_gcd,
    roots_with_multiplicity,
)
from .bipoly import BiPoly
from .fuchsian import FuchsianOperator, gauss_operator
from .tower import (
    TowerSpec,
    totally_branched_witness,
    validate_correspondence,
    verify_pullback_correspondence,
)

__all__ = [
    "deuring_poly",
    "SupersingularData",
    "supersingular_poly",
    "RationalityReport",
    "rationality_checks",
    "SplittingCriterionReport",
    "splitting_criterion_report",
    "splitting_criterion_mod8",
    "X0Invariants",
    "x0_invariants",
    "ModularLimits",
    "modular_limits",
    "jline_operator",
    "atkin_lehner_6",
    "atkin_lehner_18",
    "x0_6_to_3_map",
    "FIXTURE_NAMES",
    "builtin_fixtures",
    "builtin_fixture",
]


def _require_odd_prime(p: int, minimum: int = 3) -> None:
    if not is_prime(p) or p < minimum:
        raise FieldError(f"need a prime p >= {minimum}, got {p}")


# ---------------------------------------------------------------------------
# Deuring and supersingular polynomials
# ---------------------------------------------------------------------------

def deuring_poly(p: int) -> Poly:
    """Sum of squared binomial coefficients: degree (p-1)/2, odd p only."""
    _require_odd_prime(p, 3)
    field = make_field(p, 1)
    d = (p - 1) // 2
    return Poly(field, [math.comb(d, i) ** 2 % p for i in range(d + 1)])


def _hasse_coefficient_curve(a: int, b: int, p: int) -> int:
    """Coefficient of x^(p-1) in (x^3 + a x + b)^((p-1)/2) mod p."""
    n = (p - 1) // 2
    total = 0
    for i in range(n + 1):
        j = (p - 1) - 3 * i
        if j < 0:
            break
        l = n - i - j
        if l < 0:
            continue
        term = math.factorial(n) // (math.factorial(i) * math.factorial(j) * math.factorial(l))
        total = (total + term * pow(a, j, p) * pow(b, l, p)) % p
    return total


def _hasse_kappa_poly(p: int) -> Poly:
    """H(kappa): the x^(p-1) coefficient of (x^3 + 3k x + 2k)^((p-1)/2).

    The model y^2 = x^3 + 3k x + 2k has j-invariant 1728 k/(k+1); the curve
    is supersingular exactly when H(kappa) vanishes.
    """
    n = (p - 1) // 2
    field = make_field(p, 1)
    coeffs = [0] * (n + 1)
    for i in range(n + 1):
        j = 2 * n - 3 * i
        l = 2 * i - n
        if j < 0 or l < 0:
            continue
        mult = math.factorial(n) // (math.factorial(i) * math.factorial(j) * math.factorial(l))
        coeffs[n - i] = (mult * pow(3, j, p) * pow(2, l, p)) % p
    return Poly(field, coeffs)


@dataclass(frozen=True)
class SupersingularData:
    p: int
    deuring: Poly                       # Legendre-family Hasse invariant
    ss_poly: Poly                       # product of (j - j0) over supersingular j0
    tilde: Poly                         # ss_poly with the j = 0, 1728 factors removed
    alpha: int
    delta: int
    epsilon: int
    j_invariants: tuple[FieldElement, ...]


def supersingular_poly(p: int) -> SupersingularData:
    """Supersingular j-polynomial via the x^(p-1)-coefficient test per j.

    j = 0 and j = 1728 are decided on the fixed models y^2 = x^3 + 1 and
    y^2 = x^3 + x; every other j-invariant of F_{p^2} is tested on the
    one-parameter model with j = 1728 k/(k+1).
    """
    _require_odd_prime(p, 5)
    field = make_field(p, 1)
    big = make_field(p, 2)
    hk = _hasse_kappa_poly(p)
    hk_big = lift_poly(hk, big)
    ss: list[FieldElement] = []
    if _hasse_coefficient_curve(0, 1, p) == 0:
        ss.append(big.zero)
    if _hasse_coefficient_curve(1, 0, p) == 0:
        ss.append(big.element(1728))
    c1728 = big.element(1728)
    for j in big:
        if j.is_zero() or j == c1728:
            continue
        denom = c1728 - j
        kappa = j / denom
        if hk_big(kappa).is_zero():
            ss.append(j)
    prod_big = Poly.one(big)
    for j0 in ss:
        prod_big = prod_big * Poly(big, (-j0, big.one))
    ss_poly = Poly(field, tuple(c.coeffs[0] if c.in_prime_field() else _fail_nonrational(c)
                                for c in prod_big.coeffs))
    delta = 0 if p % 3 == 1 else 1
    epsilon = 0 if p % 4 == 1 else 1
    alpha = p // 12
    tilde = ss_poly
    if delta:
        tilde = tilde // Poly(field, (0, 1))
    if epsilon:
        tilde = tilde // Poly(field, (-field.element(1728), field.one))
    if tilde.degree != alpha:
        raise ArithmeticError(
            f"supersingular polynomial shape check failed for p={p}"
        )  # pragma: no cover
    if poly_gcd(tilde, tilde.derivative()).degree != 0:
        raise ArithmeticError(f"repeated zero in the reduced part for p={p}")  # pragma: no cover
    return SupersingularData(p, deuring_poly(p), ss_poly, tilde, alpha, delta, epsilon, tuple(ss))


def _fail_nonrational(c):  # pragma: no cover
    raise ArithmeticError(f"supersingular polynomial coefficient {c} is not rational")


@dataclass(frozen=True)
class RationalityReport:
    p: int
    deuring_roots: tuple[FieldElement, ...]
    deuring_roots_quadratic: bool       # every root lies in F_{p^2}
    deuring_roots_fourth_powers: bool   # and is a fourth power there
    ss_roots_quadratic: bool            # every supersingular j lies in F_{p^2}


def rationality_checks(p: int) -> RationalityReport:
    """Quadratic rationality of supersingular invariants, by exhaustion."""
    _require_odd_prime(p, 5)
    big = make_field(p, 2)
    phi = deuring_poly(p)
    roots = roots_with_multiplicity(lift_poly(phi, big), big)
    found = sum(m for _, m in roots)
    all_quadratic = found == phi.degree
    fourth = all(is_nth_power(r, 4) for r, _ in roots)
    ss = supersingular_poly(p)
    ss_roots = roots_with_multiplicity(lift_poly(ss.ss_poly, big), big)
    ss_quadratic = sum(m for _, m in ss_roots) == ss.ss_poly.degree
    return RationalityReport(
        p, tuple(r for r, _ in roots), all_quadratic, fourth, ss_quadratic
    )


# ---------------------------------------------------------------------------
# the mod-8 splitting criterion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplittingCriterionReport:
    p: int
    passes: bool                 # all non-exceptional roots pass (the criterion)
    all_pass: bool               # exceptional roots pass as well
    nonexceptional: tuple[tuple[FieldElement, bool], ...]
    exceptional: tuple[tuple[FieldElement, bool], ...]


def splitting_criterion_report(p: int) -> SplittingCriterionReport:
    """Per-root report: is mu + 1 a square in F_{p^2} for both mu^2 = lambda?

    Roots with lambda in {-1, 2, 1/2} or lambda^6 = 1 are tested separately
    from the rest, mirroring how the degenerate cases are handled.
    """
    _require_odd_prime(p, 5)
    field = make_field(p, 1)
    big = make_field(p, 2)
    phi = deuring_poly(p)
    exceptional_poly = (
        Poly(field, (1, 1))
        * Poly(field, (-field.element(2), field.one))
        * Poly(field, (-field.element(2).inverse(), field.one))
        * (Poly(field, tuple([-1] + [0] * 5 + [1])))
    )
    shared = poly_gcd(phi, exceptional_poly)
    tilde = phi // shared

    def passes_at(lam: FieldElement) -> bool:
        mu = nth_root(lam, 2)
        if mu is None:
            return False
        return is_nth_power(mu + 1, 2) and is_nth_power(-mu + 1, 2)

    nonexc = []
    for r, _ in roots_with_multiplicity(lift_poly(tilde, big), big):
        nonexc.append((r, passes_at(r)))
    exc = []
    for r, _ in roots_with_multiplicity(lift_poly(shared, big), big):
        exc.append((r, passes_at(r)))
    passes = all(ok for _, ok in nonexc)
    return SplittingCriterionReport(
        p, passes, passes and all(ok for _, ok in exc), tuple(nonexc), tuple(exc)
    )


def splitting_criterion_mod8(p: int) -> bool:
    """True iff every non-degenerate root passes the mu + 1 square test."""
    return splitting_criterion_report(p).passes


# ---------------------------------------------------------------------------
# classical X_0(N) invariants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class X0Invariants:
    N: int
    mu: int
    nu2: int
    nu3: int
    nu_inf: int
    genus: int


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _euler_phi(n: int) -> int:
    out = n
    for q in _prime_factors(n):
        out -= out // q
    return out


def x0_invariants(N: int) -> X0Invariants:
    """Index, elliptic-point and cusp counts, and the genus of X_0(N).

    The standard multiplicative formulas; the assembled genus is checked to
    be a nonnegative integer.
    """
    if N < 1:
        raise ValueError(f"level must be positive, got {N}")
    primes = _prime_factors(N)
    mu = N
    for q in primes:
        mu = mu // q * (q + 1)
    if N % 4 == 0:
        nu2 = 0
    else:
        nu2 = 1
        for q in primes:
            if q == 2:
                continue
            nu2 *= 1 + (1 if q % 4 == 1 else -1)
    if N % 9 == 0:
        nu3 = 0
    else:
        nu3 = 1
        for q in primes:
            if q == 3:
                continue
            nu3 *= 1 + (1 if q % 3 == 1 else -1)
    nu_inf = 0
    d = 1
    while d * d <= N:
        if N % d == 0:
            nu_inf += _euler_phi(math.gcd(d, N // d))
            if d != N // d:
                nu_inf += _euler_phi(math.gcd(N // d, d))
        d += 1
    genus = Fraction(1) + Fraction(mu, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(nu_inf, 2)
    if genus.denominator != 1 or genus < 0:
        raise ArithmeticError(f"genus formula returned {genus} for N={N}")  # pragma: no cover
    return X0Invariants(N, mu, nu2, nu3, nu_inf, int(genus))


@dataclass(frozen=True)
class ModularLimits:
    ell: int
    p: int
    genus_limit: Fraction        # mu(ell)/12
    split_lower: Fraction        # (p-1) mu(ell)/12 over F_{p^2}
    ratio: Fraction              # split_lower / genus_limit = p - 1


def modular_limits(ell: int, p: int) -> ModularLimits:
    """Limit genus and split-count lower bound for the level-ell^m towers."""
    if math.gcd(ell, p) != 1:
        raise ValueError(f"level {ell} must be prime to the characteristic {p}")
    mu = x0_invariants(ell).mu
    genus_limit = Fraction(mu, 12)
    split_lower = Fraction((p - 1) * mu, 12)
    return ModularLimits(ell, p, genus_limit, split_lower, split_lower / genus_limit)


# ---------------------------------------------------------------------------
# stock operators and maps
# ---------------------------------------------------------------------------

def jline_operator(field: FieldDescriptor) -> FuchsianOperator:
    """The hypergeometric operator of the j-line: exponents 0,1/3; 0,1/2; 1/12,1/12.

    Needs p >= 5 so that 1728 and the displayed constants are units.
    """
    if field.p < 5:
        raise FieldError("the j-line operator needs characteristic at least 5")
    c1728 = field.element(1728)
    third2 = field.element(3).inverse() * 2
    half = field.element(2).inverse()
    x = Poly.x(field)
    den = x * (x - c1728)
    a1 = RatFunc(Poly(field, (third2,)) * (x - c1728) + Poly(field, (half,)) * x, den)
    a2 = RatFunc(Poly(field, (field.element(144).inverse(),)), den)
    return FuchsianOperator(a1, a2)


def atkin_lehner_6(field: FieldDescriptor) -> RatFunc:
    """The level-6 involution in the fixture coordinate: -8(y-1)/(y+8)."""
    return RatFunc(Poly(field, (8, -8)), Poly(field, (8, 1)))


def atkin_lehner_18(field: FieldDescriptor) -> RatFunc:
    """The level-18 involution in the fixture coordinate: -2(z-1)/(z+2)."""
    return RatFunc(Poly(field, (2, -2)), Poly(field, (2, 1)))


def x0_6_to_3_map(field: FieldDescriptor) -> RatFunc:
    """The degree-3 projection between the level-6 and level-3 lines."""
    return RatFunc(Poly(field, (0, 0, -27)), Poly(field, (-64, 48, -12, 1)))


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------

FIXTURE_NAMES = ("x0-2m", "exaprop", "x0-2-3m")


def builtin_fixture(name: str, p: int) -> TowerSpec:
    """One of the stock towers, validated over F_p.

    "x0-2m": the degree-2 pair h = t^2, g = 4t/(t+1)^2 adapted to the
    hypergeometric operator with the Deuring polynomial as solution.
    "exaprop": its pullback along 16s^2/(s-1)^4 (verified, with provenance).
    "x0-2-3m": the degree-3 level-(2*3^m) recursion; no operator is attached
    (its hypergeometric data is not available in closed form here), so
    operator-dependent checks are recorded as skipped.
    """
    if name == "x0-2m":
        return _fixture_x0_2m(p)
    if name == "exaprop":
        return _fixture_exaprop(p)
    if name == "x0-2-3m":
        return _fixture_x0_2_3m(p)
    raise KeyError(f"unknown fixture {name!r}: choose from {FIXTURE_NAMES}")


def builtin_fixtures(p: int) -> dict[str, TowerSpec]:
    """All stock towers available at this characteristic."""
    out = {}
    for name in FIXTURE_NAMES:
        try:
            out[name] = builtin_fixture(name, p)
        except FieldError:
            continue
    return out


def _fixture_x0_2m(p: int) -> TowerSpec:
    _require_odd_prime(p, 3)
    field = make_field(p, 1)
    g = parse_ratfunc("[0,4]/[1,2,1]", field)
    h = parse_ratfunc("[0,0,1]/[1]", field)
    S = frozenset(
        {
            Place.of_element(field.zero),
            Place.of_element(field.one),
            Place.infinite(field),
        }
    )
    op = gauss_operator(field)
    phi = deuring_poly(p)
    corr = validate_correspondence(g, h, S, op, phi, solution_chain=(RatFunc.from_poly(phi),))
    witness = totally_branched_witness(corr)
    return TowerSpec(name="x0-2m", corr=corr, witness=witness, modular_level=2)


def quartic_pullback_map(field: FieldDescriptor) -> RatFunc:
    """The degree-4 cover 16s^2/(s-1)^4 used by the pullback fixture."""
    return RatFunc(Poly(field, (0, 0, 16)), Poly(field, (1, -4, 6, -4, 1)))


def _fixture_exaprop(p: int) -> TowerSpec:
    base = _fixture_x0_2m(p)
    field = base.field
    f = quartic_pullback_map(field)
    component = BiPoly(field, [[0, 0, 1], [-1, 4, -1], [1]])  # -A + A^2 + 4AB + B^2 - AB^2
    g_tilde = RatFunc(Poly(field, (0, 1, -1)), Poly(field, (1, 1)))  # -y(y-1)/(y+1)
    h_tilde = RatFunc(Poly(field, (0, 0, 1)), Poly.one(field))
    phi_map = RatFunc(Poly(field, (0, 0, 4)), Poly(field, (1, 0, -2, 0, 1)))  # 4y^2/(y^2-1)^2
    verification = verify_pullback_correspondence(
        base, f, component, g_tilde, h_tilde, phi_map, name="exaprop"
    )
    return verification.tower


def _fixture_x0_2_3m(p: int) -> TowerSpec:
    _require_odd_prime(p, 5)
    if p == 3:  # pragma: no cover (guarded above)
        raise FieldError("characteristic 3 collides with the level")
    field = make_field(p, 1)
    s6 = atkin_lehner_6(field)
    s18 = atkin_lehner_18(field)
    g = RatFunc(Poly(field, (0, 0, 0, 1)), Poly.one(field))
    from .ratfunc import compose

    h = compose(s6, compose(g, s18))
    S = frozenset(
        {
            Place.of_element(field.zero),
            Place.of_element(field.one),
            Place.of_element(field.element(-8)),
            Place.infinite(field),
        }
    )
    corr = validate_correspondence(g, h, S, None, None)
    witness = totally_branched_witness(corr)
    return TowerSpec(name="x0-2-3m", corr=corr, witness=witness, modular_level=6)
