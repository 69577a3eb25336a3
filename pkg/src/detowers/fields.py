"""Exact arithmetic in finite fields F_{p^k} of odd characteristic.

A field is described by (p, k) together with a monic irreducible modulus of
degree k over F_p.  The modulus is chosen deterministically (smallest base-p
encoding of the non-leading coefficients), so two calls to :func:`make_field`
with the same (p, k) always name the same field and every downstream report
is reproducible.  Elements are immutable coordinate vectors in the power
basis of the modulus; all arithmetic is exact residue arithmetic.
"""

from __future__ import annotations

import functools
from typing import Iterator, Optional, Sequence

__all__ = [
    "FieldError",
    "GuardExceeded",
    "FieldDescriptor",
    "FieldElement",
    "make_field",
    "frobenius",
    "is_nth_power",
    "nth_root",
    "enumerate_field",
    "in_subfield",
    "minimal_polynomial_coeffs",
    "is_prime",
]

# Exhaustive scans are the intended root-finding strategy at desk scale; the
# guard keeps a typo from turning one into an accidental 10^9-element sweep.
DEFAULT_SCAN_GUARD = 10**7


class FieldError(ValueError):
    """Invalid field construction or cross-field operand mix."""


class GuardExceeded(RuntimeError):
    """An exhaustive search would exceed its configured resource guard."""


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test (desk-scale inputs)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# ---------------------------------------------------------------------------
# dense F_p[x] helpers on plain int tuples (lowest degree first)
# ---------------------------------------------------------------------------

def _trim(c: Sequence[int]) -> tuple[int, ...]:
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return tuple(c[:i])


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _pmod(a: Sequence[int], m: Sequence[int], p: int) -> tuple[int, ...]:
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        factor = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - factor * mi) % p
        a.pop()
    return _trim(a)


def _psub(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    n = max(len(a), len(b))
    return _trim(
        tuple(((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n))
    )


def _pdivmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    a = list(a)
    db = len(b) - 1
    inv_lead = pow(b[-1], p - 2, p)
    q = [0] * max(len(a) - db, 0)
    while len(a) - 1 >= db and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        factor = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - db
        q[shift] = factor
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * bi) % p
        a.pop()
    return _trim(q), _trim(a)


def _pgcd(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], p - 2, p)
        a = tuple((c * inv) % p for c in a)
    return a


def _ppow_xq_mod(exp: int, m: Sequence[int], p: int) -> tuple[int, ...]:
    """x^exp mod m over F_p by square-and-multiply."""
    result: tuple[int, ...] = (1,)
    base = _pmod((0, 1), m, p)
    e = exp
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def _is_irreducible(f: Sequence[int], p: int) -> bool:
    """Monic f of degree k is irreducible iff it has no factor of degree <= k/2.

    A factor of degree j divides x^(p^j) - x, so gcd tests suffice.
    """
    k = len(f) - 1
    if k == 1:
        return True
    for j in range(1, k // 2 + 1):
        xq = _ppow_xq_mod(p**j, f, p)
        # x^(p^j) - x mod f
        probe = list(xq) + [0] * max(0, 2 - len(xq))
        probe[1] = (probe[1] - 1) % p
        g = _pgcd(probe, f, p)
        if len(g) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# field descriptors and elements
# ---------------------------------------------------------------------------

class FieldDescriptor:
    """An explicit model of F_{p^k}: odd prime p, degree k, monic modulus.

    Descriptors are interned by :func:`make_field`, so identity comparison is
    reliable for fields built through the public constructor.
    """

    __slots__ = ("p", "k", "q", "modulus", "_xp", "_one", "_zero", "_red_rows")

    def __init__(self, p: int, k: int, modulus: tuple[int, ...]):
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = modulus
        self._xp: Optional[FieldElement] = None
        self._red_rows: Optional[tuple[tuple[int, ...], ...]] = None
        self._zero = FieldElement(self, (0,) * k)
        self._one = FieldElement(self, (1,) + (0,) * (k - 1))

    def reduction_rows(self) -> tuple[tuple[int, ...], ...]:
        """Row i holds the coordinates of x^(k+i) modulo the modulus."""
        if self._red_rows is None:
            p, k = self.p, self.k
            rows = []
            cur = [(-c) % p for c in self.modulus[:k]]
            rows.append(tuple(cur))
            base = rows[0]
            for _ in range(1, k - 1):
                top = cur[k - 1]
                cur = [0] + cur[: k - 1]
                if top:
                    cur = [(c + top * r) % p for c, r in zip(cur, base)]
                rows.append(tuple(cur))
            self._red_rows = tuple(rows)
        return self._red_rows

    # -- constructors ------------------------------------------------------

    def element(self, value) -> FieldElement:
        """Coerce an int, coefficient sequence, or element of this field."""
        if isinstance(value, FieldElement):
            if value.field is not self:
                if value.field.k == 1 and value.field.p == self.p:
                    return self.element(value.coeffs[0])
                raise FieldError(f"element of {value.field} used in {self}")
            return value
        if isinstance(value, int):
            coeffs = (value % self.p,) + (0,) * (self.k - 1)
            return FieldElement(self, coeffs)
        coeffs = tuple(int(c) % self.p for c in value)
        if len(coeffs) > self.k:
            coeffs = tuple(_pmod(coeffs, self.modulus, self.p))
        coeffs = coeffs + (0,) * (self.k - len(coeffs))
        return FieldElement(self, coeffs)

    @property
    def zero(self) -> FieldElement:
        return self._zero

    @property
    def one(self) -> FieldElement:
        return self._one

    def from_index(self, n: int) -> FieldElement:
        """Element number n in the enumeration order (0 <= n < q)."""
        coeffs = []
        for _ in range(self.k):
            coeffs.append(n % self.p)
            n //= self.p
        return FieldElement(self, tuple(coeffs))

    def __iter__(self) -> Iterator[FieldElement]:
        for n in range(self.q):
            yield self.from_index(n)

    # -- misc ----------------------------------------------------------------

    def x_to_p(self) -> FieldElement:
        """The image of the power-basis generator under x -> x^p (cached)."""
        if self._xp is None:
            coeffs = _ppow_xq_mod(self.p, self.modulus, self.p)
            self._xp = self.element(coeffs)
        return self._xp

    def __repr__(self) -> str:
        if self.k == 1:
            return f"F_{self.p}"
        return f"F_{self.p}^{self.k}"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldDescriptor)
            and self.p == other.p
            and self.k == other.k
            and self.modulus == other.modulus
        )

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))


class FieldElement:
    """Immutable element of a :class:`FieldDescriptor` in the power basis."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldDescriptor, coeffs: tuple[int, ...]):
        self.field = field
        self.coeffs = coeffs

    # -- predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    def in_prime_field(self) -> bool:
        return not any(self.coeffs[1:])

    @property
    def index(self) -> int:
        """Position in the enumeration order (base-p value of the vector)."""
        n = 0
        for c in reversed(self.coeffs):
            n = n * self.field.p + c
        return n

    def as_int(self) -> int:
        """The residue for prime-field elements."""
        if not self.in_prime_field():
            raise FieldError(f"{self} is not in the prime field")
        return self.coeffs[0]

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field is self.field or other.field == self.field:
                return other
            raise FieldError(f"mixed fields {self.field} and {other.field}")
        if isinstance(other, int):
            return self.field.element(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.field.p
        return FieldElement(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.field.p
        return FieldElement(self.field, tuple((a - b) % p for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, tuple((-a) % p for a in self.coeffs))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        f = self.field
        p = f.p
        if f.k == 1:
            return FieldElement(f, ((self.coeffs[0] * o.coeffs[0]) % p,))
        if f.k == 2 and f.modulus[1] == 0:
            # modulus x^2 + c: (a0 + a1 x)(b0 + b1 x), x^2 = -c
            a0, a1 = self.coeffs
            b0, b1 = o.coeffs
            c = f.modulus[0]
            return FieldElement(f, ((a0 * b0 - c * a1 * b1) % p, (a0 * b1 + a1 * b0) % p))
        k = f.k
        a, b = self.coeffs, o.coeffs
        conv = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    conv[i + j] += ai * bj
        out = conv[:k]
        rows = f.reduction_rows()
        for i in range(k - 1):
            c = conv[k + i]
            if c:
                row = rows[i]
                for t in range(k):
                    out[t] += c * row[t]
        return FieldElement(f, tuple(v % p for v in out))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        f = self.field
        p = f.p
        if f.k == 1:
            return FieldElement(f, (pow(self.coeffs[0], p - 2, p),))
        # extended Euclid in F_p[x] against the modulus
        r0, r1 = tuple(f.modulus), _trim(self.coeffs)
        s0, s1 = (), (1,)
        while r1:
            q, r = _pdivmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, _psub(s0, _pmul(q, s1, p), p)
        # r0 is the gcd (a nonzero constant since the modulus is irreducible)
        inv_c = pow(r0[0], p - 2, p)
        coeffs = tuple((c * inv_c) % p for c in s0)
        coeffs = coeffs + (0,) * (f.k - len(coeffs))
        return FieldElement(f, coeffs[: f.k])

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int) -> "FieldElement":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- structure -----------------------------------------------------------

    def frobenius(self) -> "FieldElement":
        """x -> x^p, evaluated through the cached image of the generator."""
        f = self.field
        if f.k == 1:
            return self
        xp = f.x_to_p()
        acc = f.zero
        for c in reversed(self.coeffs):
            acc = acc * xp + c
        return acc

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self == self.field.element(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.p, self.field.k, self.coeffs))

    def __repr__(self) -> str:
        if self.in_prime_field():
            return str(self.coeffs[0])
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*u" if c != 1 else "u")
            else:
                terms.append(f"{c}*u^{i}" if c != 1 else f"u^{i}")
        return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def make_field(p: int, k: int) -> FieldDescriptor:
    """Build F_{p^k} with the deterministic minimal irreducible modulus.

    Rejects p = 2 (and non-primes): everything downstream needs odd
    characteristic.  The modulus of degree k is the monic irreducible whose
    non-leading coefficient vector has the smallest base-p value; for k = 1
    it is x itself.
    """
    if not is_prime(p):
        raise FieldError(f"characteristic {p} is not prime")
    if p == 2:
        raise FieldError("characteristic 2 is rejected: odd p is required throughout")
    if k < 1:
        raise FieldError(f"extension degree must be >= 1, got {k}")
    if k == 1:
        return FieldDescriptor(p, 1, (0, 1))
    for n in range(p**k):
        tail = []
        m = n
        for _ in range(k):
            tail.append(m % p)
            m //= p
        candidate = tuple(tail) + (1,)
        if _is_irreducible(candidate, p):
            return FieldDescriptor(p, k, candidate)
    raise FieldError(f"no irreducible modulus found for ({p}, {k})")  # pragma: no cover


def frobenius(x: FieldElement) -> FieldElement:
    return x.frobenius()


def enumerate_field(field: FieldDescriptor) -> Iterator[FieldElement]:
    """All q elements in the deterministic enumeration order."""
    return iter(field)


def in_subfield(x: FieldElement, j: int) -> bool:
    """Membership test for F_{p^j} inside the ambient field: x^(p^j) = x."""
    y = x
    for _ in range(j):
        y = y.frobenius()
    return y == x


def is_nth_power(x: FieldElement, n: int) -> bool:
    """True iff x = y^n for some y in the same field."""
    if n <= 0:
        raise ValueError(f"power index must be positive, got {n}")
    if x.is_zero():
        return True
    q = x.field.q
    import math

    g = math.gcd(n, q - 1)
    return (x ** ((q - 1) // g)).is_one()


def nth_root(x: FieldElement, n: int, scan_guard: int = DEFAULT_SCAN_GUARD) -> Optional[FieldElement]:
    """One n-th root of x, or None; picks the root of smallest index."""
    if n <= 0:
        raise ValueError(f"power index must be positive, got {n}")
    if x.is_zero():
        return x.field.zero
    q = x.field.q
    import math

    if math.gcd(n, q - 1) == 1:
        return x ** pow(n, -1, q - 1)
    if not is_nth_power(x, n):
        return None
    if q > scan_guard:
        raise GuardExceeded(f"root scan over {x.field} exceeds guard {scan_guard}")
    for idx in range(1, q):
        y = x.field.from_index(idx)
        if y**n == x:
            return y
    return None  # pragma: no cover (is_nth_power already decided)


def minimal_polynomial_coeffs(x: FieldElement) -> tuple[int, ...]:
    """Monic minimal polynomial of x over F_p, as an int coefficient tuple.

    Computed as the Frobenius-orbit product; the invariance of the result
    under Frobenius forces prime-field coefficients, which is checked.
    """
    orbit = [x]
    y = x.frobenius()
    while y != x:
        orbit.append(y)
        y = y.frobenius()
    field = x.field
    poly = [field.one]
    for root in orbit:
        nxt = [field.zero] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] = nxt[i + 1] + c
            nxt[i] = nxt[i] - c * root
        poly = nxt
    out = []
    for c in poly:
        if not c.in_prime_field():
            raise FieldError("orbit product left the prime field")  # pragma: no cover
        out.append(c.coeffs[0])
    return tuple(out)
