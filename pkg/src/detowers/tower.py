"""Recursive towers of curves defined by a correspondence pair (g, h).

A level-m point is an explicit coordinate tuple (x_0, ..., x_m) over
F_{q^k} u {inf} satisfying h(x_i) = g(x_{i-1}); no function-field arithmetic
is done on higher levels.  Global statements (splitting sets, minimal
splitting fields, genus bounds, optimality criteria) are checked by exact
enumeration over bounded extensions with hard guards, so every "not found"
result is a bounded claim and is reported together with its bounds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

from .fields import (
    FieldDescriptor,
    FieldElement,
    GuardExceeded,
    make_field,
)
from .ratfunc import (
    DEFAULT_SCAN_GUARD,
    INF,
    Divisor,
    Infinity,
    Place,
    Poly,
    PreimagePoint,
    ProjPoint,
    RatFunc,
    compose,
    divisor_of,
    fiber_poly,
    lift_poly,
    lift_ratfunc,
    mobius_through,
    ord_at_point,
    place_of_point,
    point_degree,
    poly_gcd,
    poly_powmod,
    preimage_places,
    ramification_data,
    roots_with_multiplicity,
)
from .bipoly import BiPoly, bipoly_divides, bipoly_substitute_numerator, implicitize, is_singular_at
from .fuchsian import (
    FuchsianOperator,
    apply_operator,
    check_adapted,
    pullback_operator,
    singular_places,
)

__all__ = [
    "AssumptionViolation",
    "CorrespondenceInvalid",
    "Correspondence",
    "TowerSpec",
    "PullbackProvenance",
    "validate_correspondence",
    "totally_branched_witness",
    "WitnessResult",
    "LevelData",
    "enumerate_level",
    "SplitSet",
    "splitting_set",
    "genus_bound",
    "level1_kummer_genus",
    "MinimalSplitting",
    "minimal_splitting_field",
    "DegreeOneReport",
    "degree_one_report",
    "ZieveCertificate",
    "zieve_rationality_certificate",
    "OptimalityReport",
    "optimality_report",
    "PullbackVerification",
    "verify_pullback_correspondence",
    "projective_points",
    "point_in_places",
]

DEFAULT_ENUM_GUARD = 10**6


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AssumptionViolation:
    code: str
    message: str


class CorrespondenceInvalid(ValueError):
    """Raised when a correspondence fails its standing assumptions."""

    def __init__(self, violations: Sequence[AssumptionViolation]):
        self.violations = tuple(violations)
        super().__init__("; ".join(f"[{v.code}] {v.message}" for v in violations))


@dataclass(frozen=True)
class Correspondence:
    """A validated pair of covers of P^1 with its upstairs singular data.

    ``singular_set`` lives downstairs (places of the target line);
    ``singular_preimage`` is its common preimage under g and h.  ``solution``
    is an algebraic solution of ``operator`` when one is attached;
    ``solution_chain`` is an optional composition factorization used for
    fast pointwise evaluation.
    """

    g: RatFunc
    h: RatFunc
    singular_set: frozenset
    operator: Optional[FuchsianOperator]
    solution: Optional[RatFunc]
    solution_chain: tuple[RatFunc, ...]
    delta: int
    singular_preimage: frozenset
    twist: Optional[RatFunc]
    checks: dict

    @property
    def field(self) -> FieldDescriptor:
        return self.g.field

    def solution_value(self, v: ProjPoint) -> ProjPoint:
        """Evaluate the attached solution at a point through its chain."""
        if self.solution is None:
            raise ValueError("no algebraic solution attached")
        for part in reversed(self.solution_chain):
            if isinstance(v, Infinity):
                v = part(INF)
            else:
                v = part(v)
        return v

    def in_singular_preimage(self, x: ProjPoint) -> bool:
        """Membership in the upstairs singular set, via the downstairs image."""
        return point_in_places(self.g(x) if not isinstance(x, Infinity) else self.g(INF),
                               self.singular_set)


def point_in_places(v: ProjPoint, places: Iterable[Place]) -> bool:
    for pl in places:
        if pl.contains_value(v):
            return True
    return False


def projective_points(K: FieldDescriptor) -> Iterator[ProjPoint]:
    yield INF
    yield from K


def preimage_place_set(f: RatFunc, places: Iterable[Place],
                       root_guard: int = DEFAULT_SCAN_GUARD) -> frozenset:
    out: set = set()
    for pl in places:
        out.update(preimage_places(f, pl, root_guard).support)
    return frozenset(out)


def _common_full_degree_subcover(g: RatFunc, h: RatFunc,
                                 scan_guard: int = DEFAULT_SCAN_GUARD) -> Optional[RatFunc]:
    """Search for a degree-one m with h = g o m (a full-degree common subcover).

    Three anchor points with fully rational g-fibers pin every candidate;
    each candidate is verified symbolically.  The search is bounded (anchors
    over F_{p^j}, j <= 2) and is reported as heuristic by the caller.
    """
    field = g.field
    search_fields = [field]
    if field.k == 1:
        search_fields.append(make_field(field.p, 2))
    for K in search_fields:
        if K.q > scan_guard:
            break
        gk = lift_ratfunc(g, K)
        hk = lift_ratfunc(h, K)
        anchors = []
        fibers = []
        for y in projective_points(K):
            v = hk(y)
            poly, inf_mult = fiber_poly(gk, v)
            pts: list[ProjPoint] = [INF] * (1 if inf_mult else 0)
            pts += [r for r, _ in roots_with_multiplicity(poly, K)]
            total = (inf_mult if inf_mult else 0) + sum(
                m for _, m in roots_with_multiplicity(poly, K)
            )
            if total < g.degree or len(set(pts)) < g.degree:
                continue  # fiber not fully rational / not separable here
            anchors.append(y)
            fibers.append(pts)
            if len(anchors) == 3:
                break
        if len(anchors) < 3:
            continue
        for choice in itertools.product(*fibers):
            if len(set(choice)) < 3:
                continue
            try:
                m = mobius_through(list(zip(anchors, choice)), K)
            except (ValueError, ZeroDivisionError):
                continue
            if compose(gk, m) == hk:
                return m
    return None


def validate_correspondence(
    g: RatFunc,
    h: RatFunc,
    singular_set: Iterable[Place],
    operator: Optional[FuchsianOperator] = None,
    solution: Optional[Union[RatFunc, Poly]] = None,
    *,
    solution_chain: Optional[Sequence[RatFunc]] = None,
    root_guard: int = DEFAULT_SCAN_GUARD,
    subcover_search: bool = True,
) -> Correspondence:
    """Check the standing assumptions and assemble a Correspondence.

    Checks: equal degrees, common singular preimage under g and h, tameness,
    branch values inside the singular set, adaptedness (when an operator is
    attached), the solution property (when a solution is attached), and a
    bounded heuristic search for a full-degree common subcover.  Violations
    are collected and raised together as CorrespondenceInvalid.
    """
    violations: list[AssumptionViolation] = []
    checks: dict = {}
    S = frozenset(singular_set)
    if isinstance(solution, Poly):
        solution = RatFunc.from_poly(solution)

    if g.field != h.field:
        raise CorrespondenceInvalid(
            [AssumptionViolation("field", "g and h are defined over different fields")]
        )

    delta = g.degree
    if h.degree != delta:
        violations.append(
            AssumptionViolation(
                "equal-degree", f"deg g = {g.degree} differs from deg h = {h.degree}"
            )
        )
    checks["equal-degree"] = not violations

    pre_g = preimage_place_set(g, S, root_guard)
    pre_h = preimage_place_set(h, S, root_guard)
    if pre_g != pre_h:
        only_g = {str(p) for p in pre_g - pre_h}
        only_h = {str(p) for p in pre_h - pre_g}
        violations.append(
            AssumptionViolation(
                "singular-preimage",
                f"g^-1(S) != h^-1(S): only-g={sorted(only_g)} only-h={sorted(only_h)}",
            )
        )
    checks["singular-preimage"] = pre_g == pre_h
    singular_preimage = pre_g

    wild = []
    branch_out = []
    for name, m in (("g", g), ("h", h)):
        if not m.is_separable():
            violations.append(AssumptionViolation("separable", f"{name} is inseparable"))
            continue
        for rp in ramification_data(m, scan_guard=root_guard):
            if rp.wild:
                wild.append((name, rp))
            if not point_in_places(rp.value, S):
                branch_out.append((name, rp))
    if wild:
        violations.append(
            AssumptionViolation(
                "tame",
                "wild ramification at " + ", ".join(f"{n}:{rp.point}" for n, rp in wild),
            )
        )
    checks["tame"] = not wild
    if branch_out:
        violations.append(
            AssumptionViolation(
                "branch-locus",
                "branch values outside the singular set: "
                + ", ".join(f"{n}:{rp.value}" for n, rp in branch_out),
            )
        )
    checks["branch-locus"] = not branch_out

    twist = None
    if operator is not None:
        op_sing = set(singular_places(operator))
        if op_sing - set(S):
            violations.append(
                AssumptionViolation(
                    "singular-set",
                    f"operator singularities {sorted(map(str, op_sing))} not contained in S",
                )
            )
        rep = check_adapted(g, h, operator)
        if not rep.adapted:
            violations.append(
                AssumptionViolation("adapted", "pullbacks along g and h are not twist-equivalent")
            )
        twist = rep.twist
        checks["adapted"] = rep.adapted
        if solution is not None:
            ok = apply_operator(operator, solution).is_zero()
            if not ok:
                violations.append(
                    AssumptionViolation("solution", "attached function is not a solution")
                )
            checks["solution"] = ok
    else:
        checks["adapted"] = "not checked: no operator attached"
        checks["solution"] = "not checked: no operator attached"

    if subcover_search:
        m = _common_full_degree_subcover(g, h, root_guard)
        if m is not None:
            violations.append(
                AssumptionViolation(
                    "disjoint", f"common subcover of full degree found: h = g o ({m})"
                )
            )
        checks["disjoint"] = "heuristic: no full-degree common subcover found" if m is None else False
    else:
        checks["disjoint"] = "not checked"

    if violations:
        raise CorrespondenceInvalid(violations)

    chain = tuple(solution_chain) if solution_chain else ((solution,) if solution else ())
    return Correspondence(
        g=g,
        h=h,
        singular_set=S,
        operator=operator,
        solution=solution,
        solution_chain=chain,
        delta=delta,
        singular_preimage=singular_preimage,
        twist=twist,
        checks=checks,
    )


# ---------------------------------------------------------------------------
# tower specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PullbackProvenance:
    base: "TowerSpec"
    f: RatFunc
    component: BiPoly
    phi_map: RatFunc


@dataclass(frozen=True)
class TowerSpec:
    """A correspondence together with enumeration guards and provenance."""

    name: str
    corr: Correspondence
    witness: Optional["WitnessResult"] = None
    enum_guard: int = DEFAULT_ENUM_GUARD
    scan_guard: int = DEFAULT_SCAN_GUARD
    pullback_of: Optional[PullbackProvenance] = None
    modular_level: Optional[int] = None

    @property
    def field(self) -> FieldDescriptor:
        return self.corr.field


# ---------------------------------------------------------------------------
# totally branched witness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessResult:
    point: ProjPoint
    ext_degree: int
    orbit: tuple[ProjPoint, ...]
    certified_all_levels: bool
    depth_checked: int


def _total_ramification_next(corr: Correspondence, c: ProjPoint) -> Optional[ProjPoint]:
    """The unique totally ramified point of h over c, if the fiber is one point."""
    h = corr.h if (isinstance(c, Infinity) or c.field == corr.field) else lift_ratfunc(corr.h, c.field)
    poly, inf_mult = fiber_poly(h, c)
    if inf_mult == corr.delta:
        return INF
    if inf_mult:
        return None
    if poly.degree != corr.delta:
        return None
    # tame total ramification: poly = lead * (t - r)^delta with r rational
    K = poly.field
    lead = poly.leading
    r = -poly.coeff(poly.degree - 1) / (lead * K.element(corr.delta))
    if poly == lead * Poly(K, (-r, K.one)) ** corr.delta:
        return r
    return None


def _is_totally_branched_start(corr: Correspondence, x0: ProjPoint, depth: int) -> Optional[WitnessResult]:
    """Check h is totally ramified at x0 and the forward orbit stays so."""
    if isinstance(x0, Infinity):
        v = corr.h(INF)
    else:
        h = corr.h if x0.field == corr.field else lift_ratfunc(corr.h, x0.field)
        v = h(x0)
    nxt = _total_ramification_next(corr, v)
    if nxt is None or nxt != x0:
        return None
    orbit = [x0]
    seen = {x0}
    current = x0
    certified = False
    for _ in range(depth):
        g = corr.g if (isinstance(current, Infinity) or current.field == corr.field) \
            else lift_ratfunc(corr.g, current.field)
        c = g(current) if not isinstance(current, Infinity) else g(INF)
        nxt = _total_ramification_next(corr, c)
        if nxt is None:
            return None
        if nxt in seen:
            certified = True
            orbit.append(nxt)
            break
        orbit.append(nxt)
        seen.add(nxt)
        current = nxt
    ext = 1 if isinstance(x0, Infinity) else point_degree(x0)
    return WitnessResult(x0, ext, tuple(orbit), certified, depth)


def totally_branched_witness(corr: Correspondence, ext_bound: int = 2,
                             depth: int = 16,
                             scan_guard: int = DEFAULT_SCAN_GUARD) -> Optional[WitnessResult]:
    """A point where h is totally ramified whose forward orbit stays so.

    Existence certifies absolute irreducibility of every tower level once
    the orbit closes into a cycle.  Finite points are searched first in
    enumeration order (extensions in increasing degree), then infinity.
    Degree-one pairs are vacuously covered by any point.
    """
    if corr.delta == 1:
        return WitnessResult(INF, 1, (INF,), True, depth)  # vacuous for degree one
    field = corr.field
    for j in range(1, ext_bound + 1):
        if field.k == 1:
            K = make_field(field.p, j)
        elif j == 1:
            K = field
        else:
            break
        if K.q > scan_guard:
            break
        for x in K:
            if j > 1 and point_degree(x) < j:
                continue
            res = _is_totally_branched_start(corr, x, depth)
            if res is not None:
                return res
    return _is_totally_branched_start(corr, INF, depth)


# ---------------------------------------------------------------------------
# level enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelData:
    m: int
    ext_degree: int
    count: int
    points: tuple[tuple[ProjPoint, ...], ...]
    split_count: int
    above_singular: int
    fiber_sizes_full: bool


def _level_field(corr: Correspondence, k: int) -> FieldDescriptor:
    if corr.field.k == 1:
        return make_field(corr.field.p, k)
    if k == 1:
        return corr.field
    raise ValueError("extensions of a non-prime base field need an embedding (unsupported)")


def enumerate_level(ts: TowerSpec, m: int, k: int,
                    split_points: Optional[set] = None) -> LevelData:
    """All coordinate tuples of level m rational over F_{p^k}.

    Points with a coordinate above the singular set are flagged via a count
    (they may be singular on the affine model).  ``split_points``, when
    given, is the set of x_0 values counted as split starts.
    """
    corr = ts.corr
    K = _level_field(corr, k)
    work = (K.q + 1) * (corr.delta ** max(m, 0))
    if work > ts.enum_guard:
        raise GuardExceeded(
            f"level enumeration needs ~{work} nodes, above the guard {ts.enum_guard}"
        )
    gk = lift_ratfunc(corr.g, K)
    hk = lift_ratfunc(corr.h, K)
    buckets: dict = {}
    for x in projective_points(K):
        buckets.setdefault(hk(x), []).append(x)

    tuples: list[tuple[ProjPoint, ...]] = []
    full_fibers = True
    stack: list[tuple[ProjPoint, ...]]
    for x0 in projective_points(K):
        stack = [(x0,)]
        while stack:
            t = stack.pop()
            if len(t) == m + 1:
                tuples.append(t)
                continue
            v = gk(t[-1]) if not isinstance(t[-1], Infinity) else gk(INF)
            nxt = buckets.get(v, [])
            if len(nxt) < corr.delta:
                full_fibers = False
            for x in nxt:
                stack.append(t + (x,))

    split = 0
    above_sing = 0
    for t in tuples:
        if corr.in_singular_preimage(t[0]):
            above_sing += 1
        if split_points is not None and t[0] in split_points:
            split += 1
    return LevelData(
        m=m,
        ext_degree=k,
        count=len(tuples),
        points=tuple(tuples),
        split_count=split,
        above_singular=above_sing,
        fiber_sizes_full=full_fibers,
    )


# ---------------------------------------------------------------------------
# splitting set
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitSet:
    points: tuple[tuple[ProjPoint, int], ...]  # (point, exact extension degree)
    count: int
    complete: bool
    ext_bound: int
    searched_degrees: tuple[int, ...]
    values: tuple[ProjPoint, ...]  # T = g(split set) = h(split set)

    def points_over(self, K: FieldDescriptor) -> set:
        out = set()
        for x, j in self.points:
            if isinstance(x, Infinity):
                out.add(INF)
            elif K.k % j == 0:
                # re-embed: only identical fields or prime-to-ext lifts
                if x.field == K:
                    out.add(x)
                elif x.field.k == 1:
                    out.add(K.element(x.coeffs[0]))
        return out


def splitting_set(corr: Correspondence, ext_bound: Optional[int] = None,
                  scan_guard: int = DEFAULT_SCAN_GUARD) -> SplitSet:
    """Points of X_0 whose solution-order class is nonzero, off the singular set.

    Computed from zeros of solution(g(.)) with order not divisible by p,
    cross-checked against the h-form (the two must agree), together with a
    zero-count completeness certificate: the search is complete when the
    zeros found (with multiplicity, singular ones included) exhaust the
    degree of the composite map.
    """
    if corr.solution is None:
        raise ValueError("splitting set needs an attached algebraic solution")
    if ext_bound is None:
        ext_bound = 2 * corr.delta
    g_pts, g_complete, searched = _solution_zero_scan(corr, corr.g, ext_bound, scan_guard)
    h_pts, h_complete, _ = _solution_zero_scan(corr, corr.h, ext_bound, scan_guard)
    if {(repr(x), j) for x, j in g_pts} != {(repr(x), j) for x, j in h_pts}:
        raise CorrespondenceInvalid(
            [
                AssumptionViolation(
                    "split-set-symmetry",
                    "the g-form and h-form of the splitting set disagree",
                )
            ]
        )
    values: list[ProjPoint] = []
    seen_vals = set()
    for x, j in g_pts:
        K = x.field if not isinstance(x, Infinity) else corr.field
        gk = lift_ratfunc(corr.g, K) if not isinstance(x, Infinity) else corr.g
        v = gk(x) if not isinstance(x, Infinity) else corr.g(INF)
        key = repr(v)
        if key not in seen_vals:
            seen_vals.add(key)
            values.append(v)
    return SplitSet(
        points=tuple(g_pts),
        count=len(g_pts),
        complete=g_complete and h_complete,
        ext_bound=ext_bound,
        searched_degrees=searched,
        values=tuple(values),
    )


def _solution_zero_scan(corr: Correspondence, cover: RatFunc, ext_bound: int,
                        scan_guard: int) -> tuple[list, bool, tuple[int, ...]]:
    """Zeros of solution(cover(.)) with order class nonzero mod p, off 𝔖."""
    field = corr.field
    p = field.p
    composite = compose(corr.solution, cover)

    found: list[tuple[ProjPoint, int]] = []
    zero_mult_total = 0
    searched: list[int] = []
    for j in range(1, ext_bound + 1):
        if field.k == 1:
            K = make_field(field.p, j)
        elif j == 1:
            K = field
        else:
            break
        if K.q > scan_guard:
            break
        searched.append(j)
        cov = lift_ratfunc(cover, K)
        chain = [lift_ratfunc(r, K) for r in corr.solution_chain]
        for x in projective_points(K):
            if not isinstance(x, Infinity):
                if j > 1 and point_degree(x) < j:
                    continue  # conjugates of lower-degree points were scanned earlier
            elif j != 1:
                continue
            v: ProjPoint = cov(x) if not isinstance(x, Infinity) else cov(INF)
            for part in reversed(chain):
                v = part(v) if not isinstance(v, Infinity) else part(INF)
            if isinstance(v, Infinity) or not v.is_zero():
                continue
            o = ord_at_point(composite, x)
            zero_mult_total += o
            if o % p != 0 and not corr.in_singular_preimage(x):
                found.append((x, j))
    # a degree-d map has exactly d zeros with multiplicity (infinity included)
    complete = zero_mult_total == composite.degree
    return found, complete, tuple(searched)


# ---------------------------------------------------------------------------
# genus bounds
# ---------------------------------------------------------------------------

def geometric_count(places: Iterable[Place]) -> int:
    return sum(pl.degree for pl in places)


def genus_bound(corr: Correspondence) -> Fraction:
    """Upper bound for the limit genus: g(X_0) + (#singular_preimage - 2)/2."""
    return Fraction(geometric_count(corr.singular_preimage) - 2, 2)


def level1_kummer_genus(corr: Correspondence) -> int:
    """Exact genus of the level-1 curve y^2 = g(x) for h = (coordinate)^2."""
    field = corr.field
    square = RatFunc.from_poly(Poly(field, (0, 0, 1)))
    if corr.h != square:
        raise ValueError("exact level-1 genus implemented for h = t^2 only")
    if field.p == 2:
        raise ValueError("odd characteristic required")
    div = divisor_of(corr.g)
    odd_places = sum(pl.degree for pl, m in div.items() if m % 2 != 0)
    if odd_places % 2 != 0:
        raise ArithmeticError("odd-order place count must be even")  # pragma: no cover
    return (odd_places - 2) // 2


# ---------------------------------------------------------------------------
# degree-one test and rationality certificate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DegreeOneReport:
    degree_one: bool
    curve: BiPoly
    partial_degrees: tuple[int, int]
    sampled_fibers: tuple[int, ...]
    seed: int


def degree_one_report(corr: Correspondence, samples: int = 5, seed: int = 0,
                      scan_guard: int = DEFAULT_SCAN_GUARD) -> DegreeOneReport:
    """Partial-degree and sampled fiber-cardinality test for degree one.

    The parametrization map has degree one onto its curve iff a generic
    curve point has a single parameter preimage; partial degrees of the
    curve must then match the multiset {deg g, deg h}.
    """
    import random

    curve = implicitize(corr.g, corr.h)
    pdegs = (curve.deg_a, curve.deg_b)
    ok_degrees = sorted(pdegs) == sorted((corr.g.degree, corr.h.degree))
    rng = random.Random(seed)
    field = corr.field
    K = make_field(field.p, 2) if field.k == 1 else field
    gk, hk = lift_ratfunc(corr.g, K), lift_ratfunc(corr.h, K)
    cards: list[int] = []
    attempts = 0
    while len(cards) < samples and attempts < 50 * samples:
        attempts += 1
        t0 = K.from_index(rng.randrange(K.q))
        a0, b0 = hk(t0), gk(t0)
        if isinstance(a0, Infinity) or isinstance(b0, Infinity):
            continue
        if is_singular_at(_lift_bipoly_local(curve, K), a0, b0):
            continue
        fib_h, inf_h = fiber_poly(hk, a0)
        fib_g, inf_g = fiber_poly(gk, b0)
        common = poly_gcd(fib_h, fib_g)
        card = common.degree + (1 if (inf_h and inf_g) else 0)
        cards.append(card)
    degree_one = ok_degrees and all(c == 1 for c in cards) and bool(cards)
    return DegreeOneReport(degree_one, curve, pdegs, tuple(cards), seed)


def _lift_bipoly_local(c: BiPoly, K: FieldDescriptor) -> BiPoly:
    from .bipoly import _lift_bipoly

    return _lift_bipoly(c, K)


@dataclass(frozen=True)
class ZieveCertificate:
    applicable: bool
    certified: bool
    exceptional_pairs: tuple[tuple[ProjPoint, ProjPoint], ...]
    detail: str


def zieve_rationality_certificate(corr: Correspondence, k: int, split: SplitSet,
                                  seed: int = 0) -> ZieveCertificate:
    """Rationality certificate for split points over F_{p^k}.

    For a degree-one correspondence whose split-value set is F_{p^k}-rational,
    any split point whose curve point is nonsingular is itself rational; only
    points over singular curve points need direct enumeration.
    """
    deg1 = degree_one_report(corr, seed=seed)
    if not deg1.degree_one:
        return ZieveCertificate(False, False, (), "correspondence is not of degree one")
    K = _level_field(corr, k)
    for v in split.values:
        if isinstance(v, Infinity):
            continue
        if point_degree(v) > k or k % point_degree(v) != 0:
            return ZieveCertificate(True, False, (), f"split value {v} is not F_{{p^{k}}}-rational")
    curve = deg1.curve
    exceptional = []
    vals = list(split.values)
    for a0 in vals:
        for b0 in vals:
            if isinstance(a0, Infinity) or isinstance(b0, Infinity):
                continue
            Ka = a0.field if a0.field.k >= b0.field.k else b0.field
            ca = _lift_bipoly_local(curve, Ka)
            aa = Ka.element(a0.coeffs[0]) if a0.field.k == 1 and Ka.k > 1 else a0
            bb = Ka.element(b0.coeffs[0]) if b0.field.k == 1 and Ka.k > 1 else b0
            if ca(aa, bb).is_zero() and is_singular_at(ca, aa, bb):
                exceptional.append((a0, b0))
    return ZieveCertificate(
        True,
        not exceptional,
        tuple(exceptional),
        "all split curve points nonsingular" if not exceptional
        else "singular curve points above split values need direct checks",
    )


# ---------------------------------------------------------------------------
# minimal splitting field
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinimalSplitting:
    degree: Optional[int]  # None means "> k_max"
    k_max: int
    complete_split_set: bool
    certificate: Optional[ZieveCertificate]


def minimal_splitting_field(corr: Correspondence, k_max: int = 6,
                            split: Optional[SplitSet] = None,
                            scan_guard: int = DEFAULT_SCAN_GUARD,
                            with_certificate: bool = True) -> MinimalSplitting:
    """Smallest k <= k_max with the split set and its level-1 fibers rational.

    Decided by direct enumeration; the degree-one rationality certificate is
    attached for cross-reference when requested.  If no k works the result
    carries None ("> k_max"), never a silent cap.
    """
    if split is None:
        split = splitting_set(corr, scan_guard=scan_guard)
    found: Optional[int] = None
    for k in range(1, k_max + 1):
        if all(_splits_over(corr, x, j, k) for x, j in split.points):
            found = k
            break
    cert = None
    if with_certificate and found is not None:
        cert = zieve_rationality_certificate(corr, found, split)
    return MinimalSplitting(found, k_max, split.complete, cert)


def _splits_over(corr: Correspondence, x: ProjPoint, j: int, k: int) -> bool:
    """Is x F_{p^k}-rational with its h-fiber over g(x) fully split there?"""
    if not isinstance(x, Infinity):
        if k % j != 0:
            return False
    if isinstance(x, Infinity):
        v = corr.g(INF)
    else:
        gk = lift_ratfunc(corr.g, x.field)
        v = gk(x)
    poly, inf_mult = fiber_poly(corr.h if isinstance(v, Infinity) or v.field == corr.field
                                else lift_ratfunc(corr.h, v.field), v)
    if poly.degree <= 0:
        return True
    rad = poly.squarefree_part()
    K = poly.field
    xq = poly_powmod(Poly.x(K), K.p ** k, rad)
    probe = xq - Poly.x(K)
    g = poly_gcd(probe, rad)
    return g.degree == rad.degree


# ---------------------------------------------------------------------------
# optimality report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OptimalityReport:
    good: bool
    good_hypothesis_checked: bool
    optimal: bool
    optimal_via: Optional[str]
    split_count: int
    genus_bound: Fraction
    nu_lower: int
    lambda_lower: Optional[Fraction]
    minimal_splitting_degree: Optional[int]
    equality_lhs: Optional[int]
    equality_rhs: Optional[int]
    notes: tuple[str, ...]


def optimality_report(ts: TowerSpec, k_max: int = 6,
                      scan_guard: int = DEFAULT_SCAN_GUARD) -> OptimalityReport:
    """Assemble the goodness/optimality verdict for a tower.

    Goodness: nonempty split set (the sufficient-condition hypotheses are
    checked and reported).  Optimality: either the equality
    2*#split = (sqrt(q) - 1)*(#singular_preimage + 2g(X0) - 2) over the
    minimal splitting field, or inheritance through a pullback from an
    optimal base tower with the same minimal splitting field.
    """
    corr = ts.corr
    notes: list[str] = []
    if corr.solution is None:
        return OptimalityReport(
            good=False, good_hypothesis_checked=False, optimal=False, optimal_via=None,
            split_count=0, genus_bound=genus_bound(corr), nu_lower=0, lambda_lower=None,
            minimal_splitting_degree=None, equality_lhs=None, equality_rhs=None,
            notes=("no algebraic solution attached: goodness not certified by the splitting criterion",),
        )
    split = splitting_set(corr, scan_guard=scan_guard)
    msf = minimal_splitting_field(corr, k_max=k_max, split=split, scan_guard=scan_guard)
    good = split.count > 0
    hyp = _asgood_hypothesis(corr)
    if not hyp:
        notes.append("sufficient-condition hypothesis (nonzero order class with fiber off the singular set) not established")
    gb = genus_bound(corr)
    lam = Fraction(split.count) / gb if gb > 0 else None
    eq_lhs = eq_rhs = None
    optimal = False
    via = None
    if msf.degree is not None and msf.degree % 2 == 0:
        sqrt_q = corr.field.p ** ((msf.degree * corr.field.k) // 2)
        eq_lhs = 2 * split.count
        eq_rhs = (sqrt_q - 1) * (geometric_count(corr.singular_preimage) - 2)
        if eq_lhs == eq_rhs and split.complete:
            optimal = True
            via = "splitting-genus equality"
    if not optimal and ts.pullback_of is not None:
        base_rep = optimality_report(ts.pullback_of.base, k_max=k_max, scan_guard=scan_guard)
        if base_rep.optimal and base_rep.minimal_splitting_degree == msf.degree:
            optimal = True
            via = "pullback of an optimal tower with the same minimal splitting field"
        else:
            notes.append("pullback provenance present but base optimality or splitting field did not match")
    return OptimalityReport(
        good=good,
        good_hypothesis_checked=hyp,
        optimal=optimal,
        optimal_via=via,
        split_count=split.count,
        genus_bound=gb,
        nu_lower=split.count,
        lambda_lower=lam,
        minimal_splitting_degree=msf.degree,
        equality_lhs=eq_lhs,
        equality_rhs=eq_rhs,
        notes=tuple(notes),
    )


def _asgood_hypothesis(corr: Correspondence) -> bool:
    """Some place has solution-order nonzero mod p and a g-fiber off 𝔖."""
    p = corr.field.p
    try:
        div = divisor_of(corr.solution)
    except GuardExceeded:  # pragma: no cover
        return False
    for pl, m in div.items():
        if m % p == 0:
            continue
        fiber = preimage_places(corr.g, pl)
        if any(q not in corr.singular_preimage for q in fiber.support):
            return True
    return False


# ---------------------------------------------------------------------------
# pullback verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PullbackVerification:
    checks: dict
    corr: Correspondence
    tower: TowerSpec


def verify_pullback_correspondence(
    base: TowerSpec,
    f: RatFunc,
    component: BiPoly,
    g_tilde: RatFunc,
    h_tilde: RatFunc,
    phi_map: RatFunc,
    name: str = "pullback",
) -> PullbackVerification:
    """Verify a claimed pullback correspondence and assemble its tower.

    Checks: (1) the component divides the pulled-back correspondence curve,
    (2) the component vanishes on the claimed parametrization, (3) the
    squares g o phi = f o g~ and h o phi = f o h~ commute, (4) the pair is
    adapted to the pulled-back operator.  Each failed check raises with its
    own tag; on success the pulled-back tower (with provenance) is returned.
    """
    corr = base.corr
    checks: dict = {}
    curve = implicitize(corr.g, corr.h)
    num = bipoly_substitute_numerator(curve, f)
    checks["component-divides"] = bipoly_divides(component, num)
    # curve coordinates are (h-value, g-value): evaluate accordingly
    checks["component-vanishes"] = component.substitute(h_tilde, g_tilde).is_zero()
    checks["square-g"] = compose(corr.g, phi_map) == compose(f, g_tilde)
    checks["square-h"] = compose(corr.h, phi_map) == compose(f, h_tilde)
    violations = [
        AssumptionViolation(code, "pullback verification failed")
        for code, ok in checks.items()
        if not ok
    ]
    if violations:
        raise CorrespondenceInvalid(violations)

    op_f = pullback_operator(corr.operator, f) if corr.operator else None
    sol_f = compose(corr.solution, f) if corr.solution is not None else None
    chain = tuple(corr.solution_chain) + (f,) if corr.solution is not None else ()
    s_new = frozenset(singular_places(op_f)) if op_f else preimage_place_set(f, corr.singular_set)
    new_corr = validate_correspondence(
        g_tilde,
        h_tilde,
        s_new,
        op_f,
        sol_f,
        solution_chain=chain,
    )
    checks["adapted"] = True  # enforced by the validation above
    witness = totally_branched_witness(new_corr)
    tower = TowerSpec(
        name=name,
        corr=new_corr,
        witness=witness,
        enum_guard=base.enum_guard,
        scan_guard=base.scan_guard,
        pullback_of=PullbackProvenance(base, f, component, phi_map),
    )
    return PullbackVerification(checks, new_corr, tower)
