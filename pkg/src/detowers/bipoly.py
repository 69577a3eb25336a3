"""Bivariate polynomials over a finite field and curve-of-correspondence tools.

A :class:`BiPoly` in the variables (a, b) stores ``rows[i][j]`` = coefficient
of a^i b^j.  The implicitization of a correspondence pair (g, h) eliminates
the parameter by a Sylvester resultant; the output is coordinatized so that
``a`` carries h-values and ``b`` carries g-values, the convention under which
the explicit correspondence curves verified by this library are stated.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .fields import FieldDescriptor, FieldElement, GuardExceeded, make_field
from .ratfunc import (
    DEFAULT_SCAN_GUARD,
    Poly,
    RatFunc,
    lift_poly,
    point_degree,
    poly_gcd,
    poly_lcm,
)

__all__ = [
    "BiPoly",
    "implicitize",
    "bipoly_divides",
    "bipoly_singular_points",
    "bipoly_substitute_numerator",
    "is_singular_at",
]


class BiPoly:
    """Dense bivariate polynomial; immutable, trimmed on construction."""

    __slots__ = ("field", "rows")

    def __init__(self, field: FieldDescriptor, rows: Sequence[Sequence]):
        mat = [[field.element(c) for c in row] for row in rows]
        # trim trailing zero columns per row, then trailing zero rows
        cleaned = []
        for row in mat:
            while row and row[-1].is_zero():
                row.pop()
            cleaned.append(tuple(row))
        while cleaned and not cleaned[-1]:
            cleaned.pop()
        self.field = field
        self.rows = tuple(cleaned)

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, field: FieldDescriptor) -> "BiPoly":
        return cls(field, ())

    @classmethod
    def constant(cls, field: FieldDescriptor, c) -> "BiPoly":
        return cls(field, ((c,),))

    @classmethod
    def var_a(cls, field: FieldDescriptor) -> "BiPoly":
        return cls(field, ((), (1,)))

    @classmethod
    def var_b(cls, field: FieldDescriptor) -> "BiPoly":
        return cls(field, ((0, 1),))

    @classmethod
    def from_b_coeffs(cls, field: FieldDescriptor, b_coeffs: Sequence[Poly]) -> "BiPoly":
        """Build from coefficients of powers of b, each a Poly in a."""
        da = max((c.degree for c in b_coeffs), default=-1)
        rows = [[field.zero] * len(b_coeffs) for _ in range(da + 1)]
        for j, c in enumerate(b_coeffs):
            for i, ci in enumerate(c.coeffs):
                rows[i][j] = ci
        return cls(field, rows)

    # -- structure -------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.rows

    @property
    def deg_a(self) -> int:
        return len(self.rows) - 1

    @property
    def deg_b(self) -> int:
        return max((len(r) - 1 for r in self.rows), default=-1)

    def coeff(self, i: int, j: int) -> FieldElement:
        if 0 <= i < len(self.rows) and 0 <= j < len(self.rows[i]):
            return self.rows[i][j]
        return self.field.zero

    def b_coeffs(self) -> list[Poly]:
        """Coefficient of b^j as a Poly in a, for j = 0..deg_b."""
        out = []
        for j in range(self.deg_b + 1):
            out.append(Poly(self.field, tuple(self.coeff(i, j) for i in range(self.deg_a + 1))))
        return out

    def transpose(self) -> "BiPoly":
        """Swap the roles of a and b."""
        db, da = self.deg_b, self.deg_a
        rows = [[self.coeff(i, j) for i in range(da + 1)] for j in range(db + 1)]
        return BiPoly(self.field, rows)

    # -- arithmetic ---------------------------------------------------------------

    def __add__(self, other: "BiPoly") -> "BiPoly":
        na = max(self.deg_a, other.deg_a) + 1
        nb = max(self.deg_b, other.deg_b) + 1
        rows = [
            [self.coeff(i, j) + other.coeff(i, j) for j in range(nb)] for i in range(na)
        ]
        return BiPoly(self.field, rows)

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def __neg__(self) -> "BiPoly":
        return BiPoly(self.field, [[-c for c in row] for row in self.rows])

    def __mul__(self, other) -> "BiPoly":
        if isinstance(other, (int, FieldElement)):
            c = self.field.element(other)
            return BiPoly(self.field, [[ci * c for ci in row] for row in self.rows])
        if not isinstance(other, BiPoly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return BiPoly.zero(self.field)
        na = self.deg_a + other.deg_a + 1
        nb = self.deg_b + other.deg_b + 1
        rows = [[self.field.zero] * nb for _ in range(na)]
        for i1, row1 in enumerate(self.rows):
            for j1, c1 in enumerate(row1):
                if c1.is_zero():
                    continue
                for i2, row2 in enumerate(other.rows):
                    for j2, c2 in enumerate(row2):
                        if not c2.is_zero():
                            rows[i1 + i2][j1 + j2] = rows[i1 + i2][j1 + j2] + c1 * c2
        return BiPoly(self.field, rows)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "BiPoly":
        result = BiPoly.constant(self.field, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- calculus, evaluation -------------------------------------------------------

    def deriv_a(self) -> "BiPoly":
        rows = []
        for i in range(1, self.deg_a + 1):
            rows.append([self.coeff(i, j) * i for j in range(self.deg_b + 1)])
        return BiPoly(self.field, rows)

    def deriv_b(self) -> "BiPoly":
        rows = []
        for i in range(self.deg_a + 1):
            rows.append([self.coeff(i, j) * j for j in range(1, self.deg_b + 1)])
        return BiPoly(self.field, rows)

    def specialize_a(self, a0: FieldElement) -> Poly:
        """C(a0, b) as a Poly in b over a0's field."""
        target = a0.field
        out = [target.zero] * (self.deg_b + 1)
        apow = target.one
        for i in range(self.deg_a + 1):
            for j in range(self.deg_b + 1):
                c = self.coeff(i, j)
                if not c.is_zero():
                    out[j] = out[j] + target.element(c if target == self.field else c.as_int()) * apow
            apow = apow * a0
        return Poly(target, out)

    def __call__(self, a0: FieldElement, b0: FieldElement) -> FieldElement:
        return self.specialize_a(a0)(b0)

    def substitute(self, ra: RatFunc, rb: RatFunc) -> RatFunc:
        """C(ra(y), rb(y)) as a rational function of the common variable."""
        acc = RatFunc.constant(self.field, 0)
        for i in range(self.deg_a + 1):
            for j in range(self.deg_b + 1):
                c = self.coeff(i, j)
                if not c.is_zero():
                    acc = acc + c * (ra**i) * (rb**j)
        return acc

    # -- normalization -----------------------------------------------------------------

    def normalized(self) -> "BiPoly":
        """Scale so the first nonzero coefficient in (i, j) order is 1."""
        for i in range(self.deg_a + 1):
            for j in range(self.deg_b + 1):
                c = self.coeff(i, j)
                if not c.is_zero():
                    return self * c.inverse()
        return self

    def proportional_to(self, other: "BiPoly") -> bool:
        return self.normalized() == other.normalized()

    def __eq__(self, other) -> bool:
        return isinstance(other, BiPoly) and self.field == other.field and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.field, self.rows))

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.deg_a + 1):
            for j in range(self.deg_b + 1):
                c = self.coeff(i, j)
                if c.is_zero():
                    continue
                part = []
                if not c.is_one():
                    part.append(repr(c))
                if i:
                    part.append("a" if i == 1 else f"a^{i}")
                if j:
                    part.append("b" if j == 1 else f"b^{j}")
                terms.append("*".join(part) if part else "1")
        return " + ".join(terms)


# ---------------------------------------------------------------------------
# resultants and implicitization
# ---------------------------------------------------------------------------

def _sylvester_det(p_coeffs: list[BiPoly], q_coeffs: list[BiPoly], field) -> BiPoly:
    """Resultant of two polynomials in t with BiPoly coefficients.

    Plain fraction-free Laplace expansion with memoization on column
    subsets; the matrices here are small (degree <= 8).
    """
    m = len(p_coeffs) - 1
    n = len(q_coeffs) - 1
    size = m + n
    if size == 0:
        return BiPoly.constant(field, 1)
    rows: list[list[BiPoly]] = []
    zero = BiPoly.zero(field)
    p_desc = list(reversed(p_coeffs))
    q_desc = list(reversed(q_coeffs))
    for i in range(n):
        rows.append([zero] * i + p_desc + [zero] * (n - 1 - i))
    for i in range(m):
        rows.append([zero] * i + q_desc + [zero] * (m - 1 - i))

    memo: dict[frozenset, BiPoly] = {}

    def rec(row: int, cols: frozenset) -> BiPoly:
        if row == size:
            return BiPoly.constant(field, 1)
        cached = memo.get(cols)
        if cached is not None:
            return cached
        total = BiPoly.zero(field)
        sign = 1
        for c in sorted(cols):
            entry = rows[row][c]
            if not entry.is_zero():
                sub = rec(row + 1, cols - {c})
                term = entry * sub
                total = total + term if sign > 0 else total - term
            sign = -sign
        memo[cols] = total
        return total

    return rec(0, frozenset(range(size)))


def implicitize(g: RatFunc, h: RatFunc) -> BiPoly:
    """Squarefree defining polynomial of the correspondence curve of (g, h).

    The curve is the closure of the parametrized pairs; its first coordinate
    ``a`` carries the h-value and the second coordinate ``b`` the g-value.
    Computed as the resultant in the parameter of num_h - a*den_h and
    num_g - b*den_g, squarefree-reduced and normalized so the first nonzero
    coefficient in (a, b)-degree order is 1.
    """
    if g.is_constant() or h.is_constant():
        raise ValueError("implicitization needs two nonconstant maps")
    field = g.field
    a = BiPoly.var_a(field)
    b = BiPoly.var_b(field)

    def t_coeffs(r: RatFunc, var: BiPoly) -> list[BiPoly]:
        d = r.degree
        out = []
        for i in range(d + 1):
            c = BiPoly.constant(field, r.num.coeff(i)) - var * BiPoly.constant(field, r.den.coeff(i))
            out.append(c)
        while out and out[-1].is_zero():
            out.pop()
        return out

    res = _sylvester_det(t_coeffs(h, a), t_coeffs(g, b), field)
    if res.is_zero():
        raise ValueError("degenerate correspondence: the resultant vanishes identically")
    res = _bipoly_squarefree(res)
    return res.normalized()


# ---------------------------------------------------------------------------
# divisibility / gcd in (F(a))[b]
# ---------------------------------------------------------------------------

def _as_ratfunc_coeffs(c: BiPoly) -> list[RatFunc]:
    return [RatFunc.from_poly(p) for p in c.b_coeffs()]


def _ratfunc_poly_divmod(num: list[RatFunc], den: list[RatFunc]):
    """Long division of polynomials in b with rational-function coefficients."""
    num = list(num)
    while num and num[-1].is_zero():
        num.pop()
    den = list(den)
    while den and den[-1].is_zero():
        den.pop()
    if not den:
        raise ZeroDivisionError("division by the zero bivariate polynomial")
    field = den[0].field
    quo = [RatFunc.constant(field, 0) for _ in range(max(len(num) - len(den) + 1, 0))]
    inv_lead = RatFunc.constant(field, 1) / den[-1]
    while len(num) >= len(den):
        if num[-1].is_zero():
            num.pop()
            continue
        factor = num[-1] * inv_lead
        shift = len(num) - len(den)
        quo[shift] = factor
        for i, d in enumerate(den):
            num[shift + i] = num[shift + i] - factor * d
        num.pop()
    while num and num[-1].is_zero():
        num.pop()
    return quo, num


def bipoly_divides(d: BiPoly, n: BiPoly) -> bool:
    """Exact divisibility test, working in b over the fraction field of F[a]."""
    if d.is_zero():
        return n.is_zero()
    if n.is_zero():
        return True
    if d.deg_b == 0:
        # divide in a over F(b) instead
        return bipoly_divides(d.transpose(), n.transpose())
    _, rem = _ratfunc_poly_divmod(_as_ratfunc_coeffs(n), _as_ratfunc_coeffs(d))
    return not rem


def _ratfunc_coeffs_to_bipoly(coeffs: list[RatFunc], field) -> BiPoly:
    """Clear denominators and strip univariate content."""
    if not coeffs:
        return BiPoly.zero(field)
    den = Poly.one(field)
    for c in coeffs:
        den = poly_lcm(den, c.den)
    polys = []
    for c in coeffs:
        polys.append(c.num * (den // c.den))
    content = Poly.zero(field)
    for pnum in polys:
        content = poly_gcd(content, pnum)
    if content.degree > 0:
        polys = [pnum // content for pnum in polys]
    return BiPoly.from_b_coeffs(field, polys)


def _bipoly_gcd_in_b(x: BiPoly, y: BiPoly) -> BiPoly:
    cx = _as_ratfunc_coeffs(x)
    cy = _as_ratfunc_coeffs(y)
    while any(not c.is_zero() for c in cy):
        _, rem = _ratfunc_poly_divmod(cx, cy)
        cx, cy = cy, rem
    return _ratfunc_coeffs_to_bipoly(cx, x.field)


def _bipoly_exact_div(n: BiPoly, d: BiPoly) -> BiPoly:
    quo, rem = _ratfunc_poly_divmod(_as_ratfunc_coeffs(n), _as_ratfunc_coeffs(d))
    if rem:
        raise ArithmeticError("inexact bivariate division")
    return _ratfunc_coeffs_to_bipoly(quo, n.field)


def _bipoly_squarefree(c: BiPoly) -> BiPoly:
    """Squarefree part with respect to whichever variable has positive degree."""
    if c.deg_b > 0:
        d = c.deriv_b()
        if not d.is_zero():
            g = _bipoly_gcd_in_b(c, d)
            if g.deg_a > 0 or g.deg_b > 0:
                c = _bipoly_exact_div(c, g)
            return c
    if c.deg_a > 0:
        return _bipoly_squarefree(c.transpose()).transpose()
    return c


# ---------------------------------------------------------------------------
# singular points and substitution numerators
# ---------------------------------------------------------------------------

def is_singular_at(c: BiPoly, a0: FieldElement, b0: FieldElement) -> bool:
    """Point lies on the curve and both partials vanish."""
    return (
        c(a0, b0).is_zero()
        and c.deriv_a()(a0, b0).is_zero()
        and c.deriv_b()(a0, b0).is_zero()
    )


def bipoly_singular_points(c: BiPoly, ext_bound: int = 1,
                           scan_guard: int = DEFAULT_SCAN_GUARD) -> list[tuple]:
    """Affine singular points over F_{p^j}, j <= ext_bound, by grid search."""
    field = c.field
    ca, cb = c.deriv_a(), c.deriv_b()
    out = []
    for j in range(1, ext_bound + 1):
        if field.k == 1:
            ext = make_field(field.p, j)
        elif j == 1:
            ext = field
        else:
            break
        if ext.q * ext.q > scan_guard:
            raise GuardExceeded(f"singular-point grid over {ext} exceeds guard")
        lifted = _lift_bipoly(c, ext)
        la, lb = _lift_bipoly(ca, ext), _lift_bipoly(cb, ext)
        for a0 in ext:
            spec = lifted.specialize_a(a0)
            if spec.is_zero():
                candidates = [(b0, 0) for b0 in ext]
            else:
                from .ratfunc import roots_with_multiplicity

                candidates = roots_with_multiplicity(spec, ext, scan_guard)
            for b0, _ in candidates:
                if j > 1 and point_degree(a0) < j and point_degree(b0) < j:
                    continue
                if la(a0, b0).is_zero() and lb(a0, b0).is_zero():
                    out.append((a0, b0))
    return out


def _lift_bipoly(c: BiPoly, ext: FieldDescriptor) -> BiPoly:
    if ext == c.field:
        return c
    rows = [[ext.element(e.as_int()) for e in row] for row in c.rows]
    return BiPoly(ext, rows)


def bipoly_substitute_numerator(c: BiPoly, f: RatFunc) -> BiPoly:
    """Numerator of C(f(A), f(B)) as a BiPoly in (A, B).

    Denominators are cleared by den_f(A)^deg_a * den_f(B)^deg_b.
    """
    field = c.field
    da, db = c.deg_a, c.deg_b
    num_pows = [Poly.one(field)]
    den_pows = [Poly.one(field)]
    for _ in range(max(da, db)):
        num_pows.append(num_pows[-1] * f.num)
        den_pows.append(den_pows[-1] * f.den)
    acc = BiPoly.zero(field)
    for i in range(da + 1):
        pa = num_pows[i] * den_pows[da - i]  # polynomial in A
        for j in range(db + 1):
            cij = c.coeff(i, j)
            if cij.is_zero():
                continue
            pb = num_pows[j] * den_pows[db - j]  # polynomial in B
            term_rows = [
                [pa_c * cij * pb_c for pb_c in pb.coeffs] for pa_c in pa.coeffs
            ]
            acc = acc + BiPoly(field, term_rows)
    return acc
