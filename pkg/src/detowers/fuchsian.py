"""Rank-2 regular-singular differential operators in characteristic p.

An operator is stored monic, u'' + a1 u' + a2 u, with rational-function
coefficients.  Construction enforces the regular-singularity condition (pole
orders at most 1 and 2, including at infinity via the substitution x = 1/t),
so every instance is honestly Fuchsian.  Local exponents are the roots of
the indicial equation X^2 + (c1 - 1)X + c2 = 0, taken in the base field or
its quadratic extension.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .fields import (
    FieldDescriptor,
    FieldElement,
    FieldError,
    GuardExceeded,
    in_subfield,
    make_field,
    nth_root,
)
from .ratfunc import (
    INF,
    Divisor,
    Infinity,
    Place,
    Poly,
    ProjPoint,
    RatFunc,
    compose,
    divisor_of,
    factor_places,
    lift_ratfunc,
    ord_at,
    poly_lcm,
    roots_with_multiplicity,
)

__all__ = [
    "IrregularSingularityError",
    "FuchsianOperator",
    "SingularPointData",
    "apply_operator",
    "singular_places",
    "singular_points",
    "local_exponents",
    "pullback_operator",
    "twist_operator",
    "find_twist",
    "AdaptednessReport",
    "check_adapted",
    "polynomial_solutions",
    "order_exponent_congruence",
    "divisor_congruence",
    "DivisorShiftReport",
    "divisor_shift_report",
    "gauss_operator",
    "rational_lift",
]

SOLUTION_DEGREE_GUARD = 5000


class IrregularSingularityError(ValueError):
    """A coefficient pole is too deep for a regular singularity."""

    def __init__(self, place, orders):
        self.place = place
        self.orders = orders
        super().__init__(
            f"irregular singularity at {place}: coefficient pole orders {orders} "
            "exceed the Fuchsian bounds (1, 2)"
        )


class FuchsianOperator:
    """Monic second-order operator u'' + a1 u' + a2 u over F_q(x)."""

    __slots__ = ("a1", "a2")

    def __init__(self, a1: RatFunc, a2: RatFunc):
        if a1.field != a2.field:
            raise FieldError("operator coefficients over different fields")
        self.a1 = a1
        self.a2 = a2
        self._validate()

    @property
    def field(self) -> FieldDescriptor:
        return self.a1.field

    def _validate(self) -> None:
        # pole orders: squarefree denominators for a1, factor powers <= 2 for a2
        d1 = self.a1.den
        if d1.degree > 0 and d1.degree != d1.squarefree_part().degree:
            for pl, m in factor_places(d1).items():
                if m > 1:
                    raise IrregularSingularityError(pl, (m, None))
        d2 = self.a2.den
        if d2.degree > 0:
            rad2 = d2.squarefree_part()
            if not ((rad2 * rad2) % d2).is_zero():
                for pl, m in factor_places(d2).items():
                    if m > 2:
                        raise IrregularSingularityError(pl, (None, m))
        t1, t2 = self._infinity_chart()
        ord1, ord2 = _ord_at_zero(t1), _ord_at_zero(t2)
        if ord1 < -1 or ord2 < -2:
            raise IrregularSingularityError(
                Place.infinite(self.field), (max(0, -ord1), max(0, -ord2))
            )

    def _infinity_chart(self) -> tuple[RatFunc, RatFunc]:
        """Coefficients after the substitution x = 1/s (pullback along 1/s)."""
        field = self.field
        s = Poly.x(field)
        inv = RatFunc(Poly.one(field), s)  # 1/s
        s2 = RatFunc(s * s, Poly.one(field))
        a1_new = -compose_coeff(self.a1, inv) / s2 + RatFunc(Poly(field, (2,)), s)
        a2_new = compose_coeff(self.a2, inv) / (s2 * s2)
        return a1_new, a2_new

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FuchsianOperator)
            and self.a1 == other.a1
            and self.a2 == other.a2
        )

    def __hash__(self) -> int:
        return hash((self.a1, self.a2))

    def __repr__(self) -> str:
        return f"u'' + ({self.a1}) u' + ({self.a2}) u"


def compose_coeff(r: RatFunc, inner: RatFunc) -> RatFunc:
    """Substitute a map into a coefficient, allowing constant results."""
    if r.is_constant():
        return r
    return compose(r, inner)


def _ord_at_zero(r: RatFunc) -> int:
    if r.is_zero():
        return 10**9  # effectively +infinity: no pole
    num_ord = 0
    for c in r.num.coeffs:
        if c.is_zero():
            num_ord += 1
        else:
            break
    den_ord = 0
    for c in r.den.coeffs:
        if c.is_zero():
            den_ord += 1
        else:
            break
    return num_ord - den_ord


# ---------------------------------------------------------------------------
# applying, singularities, exponents
# ---------------------------------------------------------------------------

def apply_operator(op: FuchsianOperator, u: Union[RatFunc, Poly]) -> RatFunc:
    """Exact evaluation of u'' + a1 u' + a2 u, reduced."""
    if isinstance(u, Poly):
        u = RatFunc.from_poly(u)
    du = u.derivative()
    return du.derivative() + op.a1 * du + op.a2 * u


def singular_places(op: FuchsianOperator) -> list[Place]:
    """Places where some coefficient has a pole (infinity included)."""
    seen: dict[Place, None] = {}
    for pl in factor_places(op.a1.den):
        seen.setdefault(pl)
    for pl in factor_places(op.a2.den):
        seen.setdefault(pl)
    t1, t2 = op._infinity_chart()
    if _ord_at_zero(t1) < 0 or _ord_at_zero(t2) < 0:
        seen.setdefault(Place.infinite(op.field))
    finite = sorted(
        (pl for pl in seen if not pl.is_infinite),
        key=lambda pl: tuple(c.index for c in pl.poly.coeffs),
    )
    infinite = [pl for pl in seen if pl.is_infinite]
    return finite + infinite


@dataclass(frozen=True)
class SingularPointData:
    place: Place
    c1: FieldElement
    c2: FieldElement
    exponents: tuple[FieldElement, FieldElement]
    regular: bool
    apparent: bool
    exponent_lifts: tuple[Optional[Fraction], Optional[Fraction]]


def local_exponents(op: FuchsianOperator, at) -> tuple[FieldElement, FieldElement]:
    """The two local exponents at a place or projective point."""
    return _exponent_data(op, at).exponents


def _exponent_data(op: FuchsianOperator, at) -> SingularPointData:
    field = op.field
    if isinstance(at, Place):
        if at.is_infinite:
            point: ProjPoint = INF
        elif at.degree == 1:
            point = at.rational_value()
        else:
            if field.k != 1:
                raise FieldError(
                    "exponents at a higher-degree place need a canonical lift, "
                    "available over prime fields only"
                )
            ext = make_field(field.p, at.degree)
            roots = roots_with_multiplicity(at.poly, ext)
            point = roots[0][0]
        place = at
    else:
        point = at
        place = _place_of(op, at)

    if isinstance(point, Infinity):
        a1, a2 = op._infinity_chart()
        alpha = field.zero
        work_field = field
    else:
        work_field = point.field
        a1 = lift_ratfunc(op.a1, work_field) if work_field != field else op.a1
        a2 = lift_ratfunc(op.a2, work_field) if work_field != field else op.a2
        alpha = point

    x = Poly.x(work_field)
    lin = RatFunc.from_poly(x - alpha)
    r1 = a1 * lin
    r2 = a2 * lin * lin
    c1 = r1(alpha)
    c2 = r2(alpha)
    if isinstance(c1, Infinity) or isinstance(c2, Infinity):
        raise IrregularSingularityError(place, ("(>1)", "(>2)"))
    exps = _quadratic_roots(c1 - 1, c2, work_field)
    exp_set = {e for e in exps}
    apparent = exp_set == {work_field.zero, work_field.one}
    lifts = tuple(
        rational_lift(e) if isinstance(e, FieldElement) else None for e in exps
    )
    return SingularPointData(place, c1, c2, exps, True, apparent, lifts)  # type: ignore[arg-type]


def _place_of(op: FuchsianOperator, point: ProjPoint) -> Place:
    from .ratfunc import place_of_point

    if isinstance(point, Infinity):
        return Place.infinite(op.field)
    if point.field == op.field:
        return Place.of_element(point)
    return place_of_point(point, op.field)


def _quadratic_roots(b: FieldElement, c: FieldElement,
                     field: FieldDescriptor) -> tuple[FieldElement, FieldElement]:
    """Roots of X^2 + bX + c, in ``field`` or its quadratic extension."""
    disc = b * b - 4 * c
    half = field.element(2).inverse()
    s = nth_root(disc, 2)
    if s is None:
        if field.k != 1:
            raise FieldError(
                "exponents are irrational over the coefficient field; no canonical "
                "quadratic extension is available beyond prime base fields"
            )
        big = make_field(field.p, 2)
        bb = big.element(b.as_int())
        cc = big.element(c.as_int())
        dd = bb * bb - 4 * cc
        s2 = nth_root(dd, 2)
        assert s2 is not None  # every element of F_p is a square in F_{p^2}
        half2 = big.element(2).inverse()
        r1 = (-bb + s2) * half2
        r2 = (-bb - s2) * half2
        return tuple(sorted((r1, r2), key=lambda e: e.index))  # type: ignore[return-value]
    r1 = (-b + s) * half
    r2 = (-b - s) * half
    return tuple(sorted((r1, r2), key=lambda e: e.index))  # type: ignore[return-value]


def singular_points(op: FuchsianOperator) -> list[SingularPointData]:
    """Exponent data at every singular place, infinity reported last."""
    return [_exponent_data(op, pl) for pl in singular_places(op)]


def rational_lift(x: FieldElement, max_den: int = 12) -> Optional[Fraction]:
    """Display-only lift c/d of a prime-field residue, d <= max_den.

    Chooses the candidate minimizing (|c|, d); never used in any decision.
    """
    if not in_subfield(x, 1):
        return None
    p = x.field.p
    val = x.coeffs[0]
    best: Optional[tuple[int, int, Fraction]] = None
    for d in range(1, max_den + 1):
        if d % p == 0:
            continue
        c = (val * d) % p
        if c > p // 2:
            c -= p
        frac = Fraction(c, d)
        if frac.denominator != d:
            continue  # not in lowest terms; the reduced form appears earlier
        key = (abs(c), d)
        if best is None or key < best[:2]:
            best = (abs(c), d, frac)
    return best[2] if best else None


# ---------------------------------------------------------------------------
# pullback and twisting
# ---------------------------------------------------------------------------

def pullback_operator(op: FuchsianOperator, f: RatFunc) -> FuchsianOperator:
    """Operator satisfied by u(f(s)) for solutions u; exponents scale by e."""
    if f.is_constant():
        raise ValueError("pullback along a constant map")
    df = f.derivative()
    if df.is_zero():
        raise ValueError("pullback along an inseparable map")
    d2f = df.derivative()
    a1_new = compose_coeff(op.a1, f) * df - d2f / df
    a2_new = compose_coeff(op.a2, f) * df * df
    return FuchsianOperator(a1_new, a2_new)


def twist_operator(op: FuchsianOperator, b: RatFunc) -> FuchsianOperator:
    """Tensor with the rank-one connection of logarithmic derivative b.

    Solutions transform as u -> theta*u with theta'/theta = b.
    """
    a1_new = op.a1 - 2 * b
    a2_new = op.a2 - b.derivative() - b * op.a1 + b * b
    return FuchsianOperator(a1_new, a2_new)


def find_twist(op1: FuchsianOperator, op2: FuchsianOperator) -> Optional[RatFunc]:
    """The unique twist candidate carrying op1 to op2, if it verifies.

    The candidate is pinned by the first-order coefficients; it is returned
    only if the second-order identity holds exactly and the twist's poles
    (including infinity) sit inside the singular set of op1.
    """
    b = (op1.a1 - op2.a1) / 2
    expected = op1.a2 - b.derivative() - b * op1.a1 + b * b
    if expected != op2.a2:
        return None
    if not b.is_zero():
        allowed = set(singular_places(op1))
        for pl in factor_places(b.den):
            if pl not in allowed:
                return None
        inf_ord = b.den.degree - b.num.degree
        if inf_ord <= 1 and Place.infinite(op1.field) not in allowed:
            return None
    return b


@dataclass(frozen=True)
class AdaptednessReport:
    adapted: bool
    twist: Optional[RatFunc]


def check_adapted(g: RatFunc, h: RatFunc, op: FuchsianOperator) -> AdaptednessReport:
    """Is (g, h) adapted: are the two pullbacks of op equivalent up to twist?"""
    for name, m in (("g", g), ("h", h)):
        if not m.is_constant() and m.derivative().is_zero():
            raise ValueError(f"map {name} is inseparable")
    lg = pullback_operator(op, g)
    lh = pullback_operator(op, h)
    b = find_twist(lg, lh)
    return AdaptednessReport(b is not None, b)


# ---------------------------------------------------------------------------
# polynomial solutions
# ---------------------------------------------------------------------------

def polynomial_solutions(op: FuchsianOperator, deg_bound: int,
                         guard: int = SOLUTION_DEGREE_GUARD) -> list[Poly]:
    """Echelon basis (by degree, monic leading coefficients) of polynomial
    solutions of degree <= deg_bound."""
    if deg_bound > guard:
        raise GuardExceeded(f"degree bound {deg_bound} exceeds guard {guard}")
    field = op.field
    den = poly_lcm(op.a1.den, op.a2.den)
    a = den
    b = (op.a1 * den).as_poly()
    c = (op.a2 * den).as_poly()

    ncols = deg_bound + 1
    max_row = max(a.degree + max(deg_bound - 2, 0), b.degree + max(deg_bound - 1, 0),
                  c.degree + deg_bound) + 1
    matrix = [[field.zero] * ncols for _ in range(max_row)]
    x = Poly.x(field)
    for i in range(ncols):
        mono = x**i
        contrib = a * mono.derivative().derivative() + b * mono.derivative() + c * mono
        for r, coeff in enumerate(contrib.coeffs):
            matrix[r][i] = coeff

    basis_vectors = _nullspace(matrix, field)
    polys = [Poly(field, vec) for vec in basis_vectors]
    return _echelonize_by_degree(polys, field)


def _nullspace(matrix: list[list[FieldElement]], field: FieldDescriptor) -> list[list[FieldElement]]:
    rows = [row[:] for row in matrix if any(not c.is_zero() for c in row)]
    ncols = len(matrix[0]) if matrix else 0
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        sel = None
        for i in range(r, len(rows)):
            if not rows[i][col].is_zero():
                sel = i
                break
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        inv = rows[r][col].inverse()
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][col].is_zero():
                factor = rows[i][col]
                rows[i] = [vi - factor * vr for vi, vr in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [field.zero] * ncols
        vec[fc] = field.one
        for pi, pc in enumerate(pivots):
            vec[pc] = -rows[pi][fc]
        basis.append(vec)
    return basis


def _echelonize_by_degree(polys: list[Poly], field: FieldDescriptor) -> list[Poly]:
    work = [p for p in polys if not p.is_zero()]
    out: list[Poly] = []
    while work:
        work.sort(key=lambda p: p.degree)
        low = work.pop(0).monic()
        out.append(low)
        reduced = []
        for p in work:
            if p.degree >= low.degree and not p.coeff(low.degree).is_zero():
                p = p - low * p.coeff(low.degree)
            if not p.is_zero():
                reduced.append(p)
        work = reduced
    return sorted(out, key=lambda p: p.degree)


# ---------------------------------------------------------------------------
# order and divisor congruences for solutions
# ---------------------------------------------------------------------------

def _require_solution(op: FuchsianOperator, u: Union[RatFunc, Poly]) -> RatFunc:
    ru = RatFunc.from_poly(u) if isinstance(u, Poly) else u
    if ru.is_zero():
        raise ValueError("the zero function is excluded")
    if not apply_operator(op, ru).is_zero():
        raise ValueError("input is not annihilated by the operator")
    return ru


def order_exponent_congruence(op: FuchsianOperator, u: Union[RatFunc, Poly],
                              place: Place) -> bool:
    """Does ord_P(u) fall in an admissible residue class mod p at P?

    At a singular place the class must match a prime-field local exponent;
    at a regular place it must be 0 or 1 mod p.
    """
    ru = _require_solution(op, u)
    o = ord_at(ru, place)
    p = op.field.p
    if place in singular_places(op):
        for gamma in local_exponents(op, place):
            if in_subfield(gamma, 1) and (o - gamma.coeffs[0]) % p == 0:
                return True
        return False
    return o % p in (0, 1)


def divisor_congruence(op: FuchsianOperator, u1: Union[RatFunc, Poly],
                       u2: Union[RatFunc, Poly], place: Place) -> bool:
    """div(u1) = div(u2) mod p, for two solutions matching in order at P."""
    r1 = _require_solution(op, u1)
    r2 = _require_solution(op, u2)
    p = op.field.p
    if (ord_at(r1, place) - ord_at(r2, place)) % p != 0:
        raise ValueError("order classes at the anchor place differ mod p")
    diff = divisor_of(r1) - divisor_of(r2)
    return not diff.reduced_mod(p)


@dataclass(frozen=True)
class DivisorShiftReport:
    holds: bool
    shift: Divisor
    adapted: bool
    equal_exponent_place: Optional[Place]
    off_support: tuple[Place, ...]


def divisor_shift_report(g: RatFunc, h: RatFunc, op: FuchsianOperator,
                         solution: Union[RatFunc, Poly],
                         singular_preimage: frozenset[Place] | set[Place]) -> DivisorShiftReport:
    """Compare div(solution . g) and div(solution . h) mod p.

    For an adapted pair the difference reduced mod p must be supported on the
    common upstairs singular set; the reduced difference is returned as the
    shift divisor.  Hypothesis failures (not adapted, no singular place with
    equal exponents, non-solution input) are reported, not silently ignored.
    """
    sol = _require_solution(op, solution)
    adapted = check_adapted(g, h, op).adapted
    equal_place = None
    for data in singular_points(op):
        if data.exponents[0] == data.exponents[1]:
            equal_place = data.place
            break
    sol_g = compose(sol, g)
    sol_h = compose(sol, h)
    p = op.field.p
    diff = (divisor_of(sol_g) - divisor_of(sol_h)).reduced_mod(p)
    allowed = set(singular_preimage)
    off = tuple(pl for pl in diff.support if pl not in allowed)
    return DivisorShiftReport(
        holds=adapted and equal_place is not None and not off,
        shift=diff,
        adapted=adapted,
        equal_exponent_place=equal_place,
        off_support=off,
    )


# ---------------------------------------------------------------------------
# stock operators
# ---------------------------------------------------------------------------

def gauss_operator(field: FieldDescriptor) -> FuchsianOperator:
    """The hypergeometric operator with exponents 0,0; 0,0; 1/2,1/2.

    Monic form of x(x-1)u'' + (2x-1)u' + u/4; the Deuring polynomial is a
    mod-p solution.
    """
    den = Poly(field, (0, -1, 1))  # x^2 - x
    a1 = RatFunc(Poly(field, (-1, 2)), den)
    quarter = field.element(4).inverse()
    a2 = RatFunc(Poly(field, (quarter,)), den)
    return FuchsianOperator(a1, a2)
