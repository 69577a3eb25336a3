"""Polynomials, reduced rational functions, and divisor bookkeeping on P^1.

Rational functions double as self-maps of the projective line: they evaluate
projectively (the point at infinity is the module-level ``INF`` sentinel),
compose, differentiate, and know their zero/pole divisors.  Closed points of
P^1 over the coefficient field are :class:`Place` values (the infinite place
or a monic irreducible polynomial); points over the algebraic closure are
always materialized inside a bounded extension F_{p^j}, found by exhaustive
evaluation under an explicit resource guard.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .fields import (
    DEFAULT_SCAN_GUARD,
    FieldDescriptor,
    FieldElement,
    FieldError,
    GuardExceeded,
    make_field,
    minimal_polynomial_coeffs,
)

__all__ = [
    "INF",
    "Infinity",
    "ProjPoint",
    "Poly",
    "RatFunc",
    "Place",
    "Divisor",
    "poly_gcd",
    "compose",
    "ord_at",
    "divisor_of",
    "factor_places",
    "roots_with_multiplicity",
    "ramification_data",
    "RamificationPoint",
    "preimage_points",
    "PreimagePoint",
    "preimage_places",
    "fiber_poly",
    "lift_poly",
    "lift_ratfunc",
    "lift_point",
    "point_degree",
    "place_of_point",
    "mobius_through",
    "parse_ratfunc",
]


class Infinity:
    """The point at infinity on P^1 (a singleton, compared by identity)."""

    _instance: Optional["Infinity"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"

    def __hash__(self) -> int:
        return hash("projective-infinity")

    def __eq__(self, other) -> bool:
        return isinstance(other, Infinity)


INF = Infinity()
ProjPoint = Union[FieldElement, Infinity]


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class Poly:
    """Dense polynomial over a finite field, lowest-degree coefficient first.

    The zero polynomial has degree -1.  Instances are immutable.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldDescriptor, coeffs: Iterable):
        cs = [field.element(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, field: FieldDescriptor) -> "Poly":
        return cls(field, ())

    @classmethod
    def one(cls, field: FieldDescriptor) -> "Poly":
        return cls(field, (1,))

    @classmethod
    def x(cls, field: FieldDescriptor) -> "Poly":
        return cls(field, (0, 1))

    @classmethod
    def from_roots(cls, field: FieldDescriptor, roots: Sequence) -> "Poly":
        out = cls.one(field)
        for r in roots:
            out = out * cls(field, (-field.element(r), field.one))
        return out

    # -- basic structure -----------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0].is_one()

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def leading(self) -> FieldElement:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def monic(self) -> "Poly":
        if self.is_zero() or self.leading.is_one():
            return self
        inv = self.leading.inverse()
        return Poly(self.field, tuple(c * inv for c in self.coeffs))

    def coeff(self, i: int) -> FieldElement:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other) -> Optional["Poly"]:
        if isinstance(other, Poly):
            if other.field == self.field:
                return other
            raise FieldError("polynomials over different fields")
        if isinstance(other, (int, FieldElement)):
            return Poly(self.field, (self.field.element(other),))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly(self.field, tuple(self.coeff(i) + o.coeff(i) for i in range(n)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly(self.field, tuple(self.coeff(i) - o.coeff(i) for i in range(n)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Poly(self.field, tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return Poly.zero(self.field)
        out = [self.field.zero] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Poly.one(self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = o.degree
        inv_lead = o.leading.inverse()
        quo = [self.field.zero] * max(len(rem) - db, 0)
        while len(rem) - 1 >= db and rem:
            if rem[-1].is_zero():
                rem.pop()
                continue
            factor = rem[-1] * inv_lead
            shift = len(rem) - 1 - db
            quo[shift] = factor
            for i, bi in enumerate(o.coeffs):
                rem[shift + i] = rem[shift + i] - factor * bi
            rem.pop()
        return Poly(self.field, quo), Poly(self.field, rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def divides(self, other: "Poly") -> bool:
        if self.is_zero():
            return other.is_zero()
        return (other % self).is_zero()

    # -- calculus and evaluation ----------------------------------------------

    def derivative(self) -> "Poly":
        if self.degree < 1:
            return Poly.zero(self.field)
        return Poly(
            self.field,
            tuple(self.coeffs[i] * i for i in range(1, len(self.coeffs))),
        )

    def __call__(self, x):
        """Horner evaluation; x may be a field element, Poly, or RatFunc."""
        if isinstance(x, FieldElement):
            acc = self.field.zero
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        if isinstance(x, Poly):
            acc = Poly.zero(self.field)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        if isinstance(x, RatFunc):
            acc = RatFunc.constant(self.field, 0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        raise TypeError(f"cannot evaluate polynomial at {x!r}")

    # -- char-p structure ------------------------------------------------------

    def squarefree_part(self) -> "Poly":
        """Product of the distinct irreducible factors (the radical).

        Factors whose multiplicity is divisible by p disappear from
        f / gcd(f, f'); they are recovered by stripping the visible part and
        recursing on the remaining exact p-th power.
        """
        if self.degree <= 0:
            return Poly.one(self.field)
        f = self.monic()
        d = f.derivative()
        if d.is_zero():
            return f.pth_root().squarefree_part()
        w = f // poly_gcd(f, d)  # distinct factors with multiplicity prime to p
        y = f
        g = poly_gcd(y, w)
        while g.degree > 0:
            y = y // g
            g = poly_gcd(y, w)
        if y.degree > 0:
            return (w * y.squarefree_part()).monic()
        return w.monic()

    def pth_root(self) -> "Poly":
        """Exact p-th root of a polynomial with vanishing derivative."""
        p = self.field.p
        k = self.field.k
        out = []
        for i, c in enumerate(self.coeffs):
            if i % p == 0:
                out.append(c ** (p ** (k - 1)))
            elif not c.is_zero():
                raise ValueError("polynomial is not a p-th power")
        return Poly(self.field, out)

    # -- misc -------------------------------------------------------------------

    def lift_to(self, field: FieldDescriptor) -> "Poly":
        return lift_poly(self, field)

    def to_int_coeffs(self) -> tuple[int, ...]:
        return tuple(c.as_int() for c in self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, (int, FieldElement)):
            o = self._coerce(other)
            return o is not None and self.coeffs == o.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            cs = repr(c)
            if i == 0:
                terms.append(cs)
            else:
                xs = "x" if i == 1 else f"x^{i}"
                terms.append(xs if c.is_one() else f"{cs}*{xs}")
        return " + ".join(terms)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def poly_lcm(a: Poly, b: Poly) -> Poly:
    g = poly_gcd(a, b)
    if g.is_zero():
        return g
    return ((a * b) // g).monic()


def poly_powmod(base: Poly, exp: int, modulus: Poly) -> Poly:
    result = Poly.one(base.field)
    base = base % modulus
    while exp:
        if exp & 1:
            result = (result * base) % modulus
        base = (base * base) % modulus
        exp >>= 1
    return result


def is_irreducible_poly(f: Poly) -> bool:
    """Irreducibility over the coefficient field, by the gcd criterion."""
    if f.degree < 1:
        return False
    if f.degree == 1:
        return True
    q = f.field.q
    x = Poly.x(f.field)
    for j in range(1, f.degree // 2 + 1):
        probe = poly_powmod(x, q**j, f) - x
        if poly_gcd(probe, f).degree != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

class RatFunc:
    """Reduced fraction of polynomials: gcd(num, den) = 1, den monic.

    Doubles as a self-map of P^1 with the usual projective conventions;
    ``degree`` is the degree of that map, max(deg num, deg den).
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly):
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.field != den.field:
            raise FieldError("numerator and denominator over different fields")
        if num.is_zero():
            den = Poly.one(num.field)
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num = num // g
                den = den // g
            lead = den.leading
            if not lead.is_one():
                inv = lead.inverse()
                num = num * inv
                den = den * inv
        self.num = num
        self.den = den

    # -- constructors -----------------------------------------------------------

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFunc":
        return cls(p, Poly.one(p.field))

    @classmethod
    def constant(cls, field: FieldDescriptor, c) -> "RatFunc":
        return cls(Poly(field, (field.element(c),)), Poly.one(field))

    @classmethod
    def identity(cls, field: FieldDescriptor) -> "RatFunc":
        return cls(Poly.x(field), Poly.one(field))

    @property
    def field(self) -> FieldDescriptor:
        return self.num.field

    # -- structure ----------------------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree as a map of P^1 (0 for constants)."""
        return max(self.num.degree, self.den.degree, 0)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree <= 0

    def constant_value(self) -> FieldElement:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        if self.num.is_zero():
            return self.field.zero
        return self.num.coeffs[0] / self.den.coeffs[0]

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def as_poly(self) -> Poly:
        if not self.is_polynomial():
            raise ValueError(f"{self} has a nontrivial denominator")
        return self.num

    def is_separable(self) -> bool:
        """A nonconstant map is separable iff its derivative is nonzero."""
        return not self.wronskian().is_zero()

    def wronskian(self) -> Poly:
        """num' * den - num * den' (the numerator of the derivative)."""
        return self.num.derivative() * self.den - self.num * self.den.derivative()

    # -- arithmetic ------------------------------------------------------------------

    def _coerce(self, other) -> Optional["RatFunc"]:
        if isinstance(other, RatFunc):
            if other.field == self.field:
                return other
            raise FieldError("rational functions over different fields")
        if isinstance(other, Poly):
            return RatFunc.from_poly(other)
        if isinstance(other, (int, FieldElement)):
            return RatFunc.constant(self.field, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.den - o.num * self.den, self.den * o.den)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return o / self

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return (RatFunc(self.den, self.num)) ** (-n)
        result = RatFunc.constant(self.field, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def derivative(self) -> "RatFunc":
        return RatFunc(self.wronskian(), self.den * self.den)

    # -- evaluation --------------------------------------------------------------------

    def __call__(self, x: ProjPoint) -> ProjPoint:
        """Projective evaluation at a point of P^1 over any lift-compatible field."""
        if isinstance(x, Infinity):
            dn, dd = self.num.degree, self.den.degree
            if dn > dd:
                return INF
            if dn < dd:
                return self.field.zero
            return self.num.leading / self.den.leading
        if x.field != self.field:
            num = lift_poly(self.num, x.field)
            den = lift_poly(self.den, x.field)
        else:
            num, den = self.num, self.den
        d = den(x)
        if d.is_zero():
            return INF
        return num(x) / d

    def compose_inner(self, inner: "RatFunc") -> "RatFunc":
        return compose(self, inner)

    # -- misc ---------------------------------------------------------------------------

    def lift_to(self, field: FieldDescriptor) -> "RatFunc":
        return lift_ratfunc(self, field)

    def __eq__(self, other) -> bool:
        if isinstance(other, (RatFunc, Poly, int, FieldElement)):
            o = self._coerce(other)
            return self.num == o.num and self.den == o.den
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        if self.den.is_one():
            return repr(self.num)
        return f"({self.num})/({self.den})"


def compose(outer: RatFunc, inner: RatFunc) -> RatFunc:
    """outer after inner, reduced.

    Degree is multiplicative for nonconstant maps.  If either argument is
    constant the result is constant; callers can see this via
    ``result.is_constant()``.
    """
    if inner.is_constant():
        value = outer(inner.constant_value())
        if isinstance(value, Infinity):
            raise ZeroDivisionError("composition is the constant map to infinity")
        return RatFunc.constant(outer.field, value)
    n = outer.num(inner)
    d = outer.den(inner)
    if d.is_zero():
        raise ZeroDivisionError("composition has identically-zero denominator")
    return n / d


# ---------------------------------------------------------------------------
# places and divisors
# ---------------------------------------------------------------------------

class Place:
    """A closed point of P^1 over the base field.

    Either the infinite place (poly is None) or a monic irreducible
    polynomial over the base field.
    """

    __slots__ = ("field", "poly")

    def __init__(self, field: FieldDescriptor, poly: Optional[Poly], *, check: bool = True):
        if poly is not None:
            poly = poly.monic()
            if check and not is_irreducible_poly(poly):
                raise ValueError(f"{poly} is not irreducible, so it is not a place")
        self.field = field
        self.poly = poly

    @classmethod
    def infinite(cls, field: FieldDescriptor) -> "Place":
        return cls(field, None)

    @classmethod
    def of_element(cls, x: FieldElement) -> "Place":
        """The degree-one place t - x."""
        return cls(x.field, Poly(x.field, (-x, x.field.one)), check=False)

    @property
    def is_infinite(self) -> bool:
        return self.poly is None

    @property
    def degree(self) -> int:
        return 1 if self.poly is None else self.poly.degree

    def rational_value(self) -> ProjPoint:
        """The point itself, for degree-one places."""
        if self.is_infinite:
            return INF
        if self.degree != 1:
            raise ValueError(f"{self} is not a degree-one place")
        return -self.poly.coeffs[0]

    def contains_value(self, v: ProjPoint) -> bool:
        """Does the geometric point v (over an extension) lie on this place?"""
        if isinstance(v, Infinity):
            return self.is_infinite
        if self.is_infinite:
            return False
        return lift_poly(self.poly, v.field)(v).is_zero()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Place)
            and self.field == other.field
            and self.poly == other.poly
        )

    def __hash__(self) -> int:
        return hash((self.field, self.poly))

    def __repr__(self) -> str:
        return "inf" if self.is_infinite else f"({self.poly})"


class Divisor:
    """Finite formal Z-combination of places of P^1."""

    __slots__ = ("field", "_mults")

    def __init__(self, field: FieldDescriptor, mults: Optional[dict] = None):
        self.field = field
        self._mults = {}
        if mults:
            for place, m in mults.items():
                if m:
                    self._mults[place] = self._mults.get(place, 0) + m
            self._mults = {pl: m for pl, m in self._mults.items() if m}

    def multiplicity(self, place: Place) -> int:
        return self._mults.get(place, 0)

    @property
    def support(self) -> frozenset:
        return frozenset(self._mults)

    def items(self):
        return sorted(self._mults.items(), key=lambda kv: _place_sort_key(kv[0]))

    def degree(self) -> int:
        """Sum of multiplicity * residue degree."""
        return sum(m * pl.degree for pl, m in self._mults.items())

    def __add__(self, other: "Divisor") -> "Divisor":
        out = dict(self._mults)
        for pl, m in other._mults.items():
            out[pl] = out.get(pl, 0) + m
        return Divisor(self.field, out)

    def __sub__(self, other: "Divisor") -> "Divisor":
        out = dict(self._mults)
        for pl, m in other._mults.items():
            out[pl] = out.get(pl, 0) - m
        return Divisor(self.field, out)

    def __neg__(self) -> "Divisor":
        return Divisor(self.field, {pl: -m for pl, m in self._mults.items()})

    def scaled(self, c: int) -> "Divisor":
        return Divisor(self.field, {pl: c * m for pl, m in self._mults.items()})

    def positive_part(self) -> "Divisor":
        return Divisor(self.field, {pl: m for pl, m in self._mults.items() if m > 0})

    def reduced_mod(self, p: int) -> "Divisor":
        """Each multiplicity reduced into [0, p)."""
        return Divisor(self.field, {pl: m % p for pl, m in self._mults.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Divisor)
            and self.field == other.field
            and self._mults == other._mults
        )

    def __bool__(self) -> bool:
        return bool(self._mults)

    def __repr__(self) -> str:
        if not self._mults:
            return "0"
        return " + ".join(f"{m}*{pl}" for pl, m in self.items())


def _place_sort_key(place: Place):
    if place.is_infinite:
        return (1, 0, ())
    return (0, place.degree, tuple(c.index for c in place.poly.coeffs))


# ---------------------------------------------------------------------------
# roots, factorization into places, orders, divisors
# ---------------------------------------------------------------------------

def roots_with_multiplicity(f: Poly, field: Optional[FieldDescriptor] = None,
                            scan_guard: int = DEFAULT_SCAN_GUARD) -> list[tuple[FieldElement, int]]:
    """All roots of f in ``field`` (default: its own field), by exhaustion."""
    if field is None:
        field = f.field
    if field != f.field:
        f = lift_poly(f, field)
    if f.degree < 1:
        return []
    if field.q > scan_guard:
        raise GuardExceeded(f"root scan over {field} exceeds guard {scan_guard}")
    out = []
    for x in field:
        if f(x).is_zero():
            mult = 0
            g = f
            lin = Poly(field, (-x, field.one))
            while True:
                q, r = divmod(g, lin)
                if not r.is_zero():
                    break
                mult += 1
                g = q
            out.append((x, mult))
    return out


def factor_places(f: Poly, root_guard: int = DEFAULT_SCAN_GUARD) -> dict[Place, int]:
    """Complete factorization of f into places with multiplicities.

    Distinct-degree splitting is done by gcds with x^(q^j) - x; equal-degree
    components are separated by exhaustive root search in F_{p^j} followed by
    Frobenius-orbit clustering (prime base fields), matching the desk-scale
    root-finding strategy used everywhere else.
    """
    field = f.field
    if f.degree < 0:
        raise ValueError("cannot factor the zero polynomial")
    result: dict[Place, int] = {}
    f = f.monic()
    if f.degree == 0:
        return result

    d = f.derivative()
    if d.is_zero():
        sub = factor_places(f.pth_root(), root_guard)
        return {pl: field.p * m for pl, m in sub.items()}

    sf = f.squarefree_part()
    for piece in _irreducible_factors_squarefree(sf, root_guard):
        mult = 0
        g = f
        while True:
            q, r = divmod(g, piece)
            if not r.is_zero():
                break
            mult += 1
            g = q
        result[Place(field, piece, check=False)] = mult
    total = sum(pl.degree * m for pl, m in result.items())
    if total != f.degree:
        raise ArithmeticError("incomplete factorization")  # pragma: no cover
    return result


def _irreducible_factors_squarefree(sf: Poly, root_guard: int) -> list[Poly]:
    """Irreducible factors of a squarefree monic polynomial."""
    field = sf.field
    if sf.degree == 0:
        return []
    q = field.q
    x = Poly.x(field)
    rem = sf
    by_degree: list[tuple[int, Poly]] = []
    j = 1
    while rem.degree >= 2 * j:
        probe = poly_powmod(x, q**j, rem) - x
        g = poly_gcd(probe, rem)
        if g.degree > 0:
            by_degree.append((j, g))
            rem = rem // g
        j += 1
    if rem.degree > 0:
        by_degree.append((rem.degree, rem))

    factors: list[Poly] = []
    for j, comp in by_degree:
        nfac = comp.degree // j
        if nfac == 1:
            factors.append(comp.monic())
            continue
        if j == 1:
            for r, _ in roots_with_multiplicity(comp, field, root_guard):
                factors.append(Poly(field, (-r, field.one)))
            continue
        if field.k != 1:
            raise FieldError(
                "splitting same-degree factors over an extension base field needs "
                "an embedding, which is out of scope"
            )
        big = make_field(field.p, j)
        if big.q > root_guard:
            raise GuardExceeded(
                f"orbit clustering over {big} exceeds guard {root_guard}"
            )
        lifted = lift_poly(comp, big)
        seen: set = set()
        for r, _ in roots_with_multiplicity(lifted, big, root_guard):
            if r in seen:
                continue
            orbit = [r]
            y = r.frobenius()
            while y != r:
                orbit.append(y)
                y = y.frobenius()
            seen.update(orbit)
            factors.append(Poly(field, minimal_polynomial_coeffs(r)))
    return factors


def ord_at(r: RatFunc, place: Place) -> int:
    """Order of vanishing of r at a place (poles negative)."""
    if r.is_zero():
        raise ValueError("the zero function has no well-defined order")
    if place.is_infinite:
        return r.den.degree - r.num.degree

    def mult_in(poly: Poly) -> int:
        m = 0
        g = poly
        while g.degree >= place.poly.degree:
            q, rem = divmod(g, place.poly)
            if not rem.is_zero():
                break
            m += 1
            g = q
        return m

    return mult_in(r.num) - mult_in(r.den)


def ord_at_point(r: RatFunc, x: ProjPoint) -> int:
    """Order of vanishing at a geometric point over any extension."""
    if r.is_zero():
        raise ValueError("the zero function has no well-defined order")
    if isinstance(x, Infinity):
        return r.den.degree - r.num.degree
    num = lift_poly(r.num, x.field)
    den = lift_poly(r.den, x.field)
    lin = Poly(x.field, (-x, x.field.one))

    def mult_in(poly: Poly) -> int:
        m = 0
        g = poly
        while g.degree >= 1:
            q, rem = divmod(g, lin)
            if not rem.is_zero():
                break
            m += 1
            g = q
        return m

    return mult_in(num) - mult_in(den)


def divisor_of(r: Union[RatFunc, Poly], root_guard: int = DEFAULT_SCAN_GUARD) -> Divisor:
    """Zero/pole divisor; always has degree 0."""
    if isinstance(r, Poly):
        r = RatFunc.from_poly(r)
    if r.is_zero():
        raise ValueError("the zero function has no divisor")
    field = r.field
    mults: dict[Place, int] = {}
    for pl, m in factor_places(r.num, root_guard).items():
        mults[pl] = mults.get(pl, 0) + m
    for pl, m in factor_places(r.den, root_guard).items():
        mults[pl] = mults.get(pl, 0) - m
    inf_ord = r.den.degree - r.num.degree
    if inf_ord:
        mults[Place.infinite(field)] = inf_ord
    return Divisor(field, mults)


# ---------------------------------------------------------------------------
# lifting between the prime field and its extensions
# ---------------------------------------------------------------------------

def lift_poly(f: Poly, field: FieldDescriptor) -> Poly:
    if f.field == field:
        return f
    if f.field.k != 1 or f.field.p != field.p:
        raise FieldError(f"no canonical lift from {f.field} to {field}")
    return Poly(field, tuple(c.coeffs[0] for c in f.coeffs))


def lift_ratfunc(r: RatFunc, field: FieldDescriptor) -> RatFunc:
    if r.field == field:
        return r
    return RatFunc(lift_poly(r.num, field), lift_poly(r.den, field))


def lift_point(x: ProjPoint, field: FieldDescriptor) -> ProjPoint:
    if isinstance(x, Infinity):
        return INF
    return field.element(x)


def point_degree(x: ProjPoint) -> int:
    """Degree of the residue field F_p(x) over the prime field."""
    if isinstance(x, Infinity):
        return 1
    j = 1
    y = x.frobenius()
    while y != x:
        j += 1
        y = y.frobenius()
    return j


def place_of_point(x: ProjPoint, base: FieldDescriptor) -> Place:
    """The place of P^1 over ``base`` through the geometric point x."""
    if isinstance(x, Infinity):
        return Place.infinite(base)
    if x.field == base:
        return Place.of_element(x)
    if base.k != 1 or base.p != x.field.p:
        raise FieldError(f"no canonical place over {base} for a point of {x.field}")
    coeffs = minimal_polynomial_coeffs(x)
    return Place(base, Poly(base, coeffs), check=False)


# ---------------------------------------------------------------------------
# fibers, ramification, preimages
# ---------------------------------------------------------------------------

def fiber_poly(f: RatFunc, value: ProjPoint) -> tuple[Poly, int]:
    """(finite-fiber polynomial, multiplicity of the fiber at infinity).

    The roots of the polynomial, with multiplicity, are the finite points of
    f^(-1)(value); the integer is the multiplicity of the point at infinity
    in that fiber (0 if infinity is not in the fiber).  Total degree always
    equals deg f.
    """
    if isinstance(value, Infinity):
        poly = f.den
        inf_mult = max(f.num.degree - f.den.degree, 0)
    else:
        if value.field != f.field:
            f = lift_ratfunc(f, value.field)
        poly = f.num - value * f.den
        if poly.is_zero():
            raise ValueError("constant map equal to the requested value")
        inf_mult = f.degree - poly.degree
    return poly, inf_mult


@dataclass(frozen=True)
class RamificationPoint:
    point: ProjPoint
    ext_degree: int          # j with the point rational over F_{p^j}
    index: int               # ramification index e >= 2
    value: ProjPoint         # image under the map
    wild: bool               # p divides e


def ramification_data(f: RatFunc, ext_bound: Optional[int] = None,
                      scan_guard: int = DEFAULT_SCAN_GUARD) -> list[RamificationPoint]:
    """All ramification points of f over F_{p^j}, j <= ext_bound, plus infinity.

    Finite ramification points are exactly the multiple roots of
    num - c * den, i.e. the zeros of the Wronskian, so the search space is
    complete once ext_bound reaches the Wronskian degree.  Wild points
    (p | e) are flagged, not rejected.
    """
    if f.is_constant():
        raise ValueError("ramification of a constant map is undefined")
    w = f.wronskian()
    if w.is_zero():
        raise ValueError("inseparable map: the derivative vanishes identically")
    if ext_bound is None:
        ext_bound = max(2 * f.degree, 1)
    field = f.field
    out: list[RamificationPoint] = []
    # every finite ramification point is a root of the Wronskian, so only the
    # residue degrees of its places can carry points
    w_degrees = sorted({pl.degree for pl in factor_places(w, scan_guard)})
    for j in w_degrees:
        if j > ext_bound:
            continue
        if field.k == 1:
            ext = make_field(field.p, j)
        elif j == 1:
            ext = field
        else:
            break
        if ext.q > scan_guard:
            break
        wj = lift_poly(w, ext)
        for x, _ in roots_with_multiplicity(wj, ext, scan_guard):
            if j > 1 and point_degree(x) < j:
                continue  # already reported over a smaller extension
            value = lift_ratfunc(f, ext)(x)
            poly, inf_mult = fiber_poly(lift_ratfunc(f, ext), value)
            lin = Poly(ext, (-x, ext.one))
            e = 0
            g = poly
            while g.degree >= 1:
                q2, r2 = divmod(g, lin)
                if not r2.is_zero():
                    break
                e += 1
                g = q2
            if e >= 2:
                out.append(RamificationPoint(x, j, e, value, e % field.p == 0))
    v_inf = f(INF)
    poly, inf_mult = fiber_poly(f, v_inf)
    if inf_mult >= 2:
        out.append(RamificationPoint(INF, 1, inf_mult, v_inf, inf_mult % field.p == 0))
    return out


@dataclass(frozen=True)
class PreimagePoint:
    point: ProjPoint
    ext_degree: int
    multiplicity: int
    target: ProjPoint


def preimage_points(f: RatFunc, targets: Iterable[ProjPoint],
                    ext_bound: Optional[int] = None,
                    scan_guard: int = DEFAULT_SCAN_GUARD) -> list[PreimagePoint]:
    """All points x over F_{p^j}, j <= ext_bound, with f(x) in targets."""
    if f.is_constant():
        raise ValueError("preimages under a constant map are not a finite set")
    if ext_bound is None:
        ext_bound = max(2 * f.degree, 1)
    field = f.field
    targets = list(targets)
    out: list[PreimagePoint] = []
    for raw in targets:
        target = _as_proj(raw, field)
        poly, inf_mult = fiber_poly(f, target)
        if inf_mult > 0:
            out.append(PreimagePoint(INF, 1, inf_mult, target))
        if not isinstance(target, Infinity) and target.field.k > 1:
            # target already lives in an extension: scan that field only
            for x, m in roots_with_multiplicity(poly, target.field, scan_guard):
                out.append(PreimagePoint(x, point_degree(x), m, target))
            continue
        for j in range(1, ext_bound + 1):
            if field.k == 1:
                ext = make_field(field.p, j)
            elif j == 1:
                ext = field
            else:
                break
            if ext.q > scan_guard:
                break
            pj = lift_poly(poly, ext)
            for x, m in roots_with_multiplicity(pj, ext, scan_guard):
                if j > 1 and point_degree(x) < j:
                    continue
                out.append(PreimagePoint(x, j, m, target))
    return out


def _as_proj(v, field: FieldDescriptor) -> ProjPoint:
    if isinstance(v, Infinity):
        return INF
    if isinstance(v, FieldElement):
        return v
    return field.element(v)


def preimage_places(f: RatFunc, place: Place, root_guard: int = DEFAULT_SCAN_GUARD) -> Divisor:
    """The pullback divisor f^*(place) as places with ramification weights."""
    if place.is_infinite:
        probe = RatFunc(f.den, f.num) if not f.num.is_zero() else None
        if probe is None:
            raise ValueError("zero map")
        return divisor_of(probe, root_guard).positive_part()
    val = place.poly
    probe = val(f)  # Poly evaluated at RatFunc
    return divisor_of(probe, root_guard).positive_part()


# ---------------------------------------------------------------------------
# Moebius interpolation (used by the common-subcover search)
# ---------------------------------------------------------------------------

def mobius_through(pairs: Sequence[tuple[ProjPoint, ProjPoint]], field: FieldDescriptor) -> RatFunc:
    """The unique degree-one map sending three given points to three others."""
    if len(pairs) != 3:
        raise ValueError("a Moebius map is pinned by exactly three point pairs")
    (z1, w1), (z2, w2), (z3, w3) = pairs
    t_src = _mobius_to_standard(z1, z2, z3, field)
    t_dst = _mobius_to_standard(w1, w2, w3, field)
    return compose(_mobius_inverse(t_dst), t_src)


def _mobius_to_standard(z1: ProjPoint, z2: ProjPoint, z3: ProjPoint,
                        field: FieldDescriptor) -> RatFunc:
    """Map sending (z1, z2, z3) to (0, inf, 1)."""
    x = Poly.x(field)
    one = Poly.one(field)

    def lin(z: ProjPoint) -> Poly:
        # t - z, or 1 for z = inf
        if isinstance(z, Infinity):
            return one
        return x - field.element(z)

    num = lin(z1)
    den = lin(z2)
    # normalize so z3 -> 1
    if isinstance(z3, Infinity):
        if num.degree != den.degree:
            raise ValueError("cross-ratio points are not distinct")
        c = num.leading / den.leading
    else:
        z3e = field.element(z3)
        nv, dv = num(z3e), den(z3e)
        if dv.is_zero() or nv.is_zero():
            raise ValueError("cross-ratio points are not distinct")
        c = nv / dv
    return RatFunc(num, den * c)


def _mobius_inverse(m: RatFunc) -> RatFunc:
    """Inverse of a degree-one map (a t + b)/(c t + d) -> (d t - b)/(-c t + a)."""
    if m.degree != 1:
        raise ValueError("only degree-one maps invert")
    a = m.num.coeff(1)
    b = m.num.coeff(0)
    c = m.den.coeff(1)
    d = m.den.coeff(0)
    field = m.field
    return RatFunc(Poly(field, (-b, d)), Poly(field, (a, -c)))


# ---------------------------------------------------------------------------
# serialization helper shared by fixtures, file ingest, and the CLI
# ---------------------------------------------------------------------------

def parse_ratfunc(text: str, field: FieldDescriptor) -> RatFunc:
    """Parse the "numerator/denominator" coefficient-list grammar.

    Each side is a decimal coefficient list, lowest degree first, e.g.
    "[0,4]/[1,2,1]" for 4t/(t+1)^2.  A bare "[...]" is a polynomial.
    """
    import json as _json

    text = text.strip()
    if "/" in text:
        num_s, den_s = text.split("/", 1)
    else:
        num_s, den_s = text, "[1]"
    try:
        num_c = _json.loads(num_s)
        den_c = _json.loads(den_s)
    except _json.JSONDecodeError as exc:
        raise ValueError(f"bad rational-function literal {text!r}: {exc}") from exc
    if not isinstance(num_c, list) or not isinstance(den_c, list):
        raise ValueError(f"bad rational-function literal {text!r}: expected lists")
    return RatFunc(Poly(field, num_c), Poly(field, den_c))


def ratfunc_to_text(r: RatFunc) -> str:
    num = "[" + ",".join(str(c.as_int() if c.in_prime_field() else c) for c in r.num.coeffs) + "]"
    den = "[" + ",".join(str(c.as_int() if c.in_prime_field() else c) for c in r.den.coeffs) + "]"
    if not r.num.coeffs:
        num = "[0]"
    return f"{num}/{den}"
