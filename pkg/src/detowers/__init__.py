"""Exact characteristic-p machinery for recursive towers of curves.

Layers:

- ``fields``: arithmetic in F_{p^k}, residue-power predicates, enumeration
- ``ratfunc``: polynomials, rational self-maps of P^1, places, divisors,
  ramification, preimages
- ``bipoly``: bivariate polynomials and correspondence-curve implicitization
- ``fuchsian``: rank-2 regular-singular operators, local exponents,
  pullback, twisting, polynomial solutions, divisor congruences
- ``tower``: correspondence validation, level enumeration, splitting sets,
  genus bounds, minimal splitting fields, optimality verdicts
- ``modular``: Deuring and supersingular polynomials, X_0(N) invariants,
  stock tower fixtures
- ``towerio``: the JSON definition grammar and the versioned report schema
- ``cli``: the ``detowers`` command-line driver
"""

from .fields import (
    FieldDescriptor,
    FieldElement,
    FieldError,
    GuardExceeded,
    enumerate_field,
    frobenius,
    is_nth_power,
    make_field,
    nth_root,
)
from .ratfunc import (
    INF,
    Divisor,
    Infinity,
    Place,
    Poly,
    RatFunc,
    compose,
    divisor_of,
    ord_at,
    parse_ratfunc,
    preimage_points,
    ramification_data,
)
from .bipoly import BiPoly, bipoly_divides, bipoly_singular_points, implicitize
from .fuchsian import (
    FuchsianOperator,
    apply_operator,
    check_adapted,
    find_twist,
    gauss_operator,
    local_exponents,
    polynomial_solutions,
    pullback_operator,
    singular_points,
    twist_operator,
)
from .tower import (
    Correspondence,
    CorrespondenceInvalid,
    TowerSpec,
    enumerate_level,
    genus_bound,
    level1_kummer_genus,
    minimal_splitting_field,
    optimality_report,
    splitting_set,
    totally_branched_witness,
    validate_correspondence,
    verify_pullback_correspondence,
)
from .modular import (
    builtin_fixture,
    builtin_fixtures,
    deuring_poly,
    jline_operator,
    modular_limits,
    rationality_checks,
    splitting_criterion_mod8,
    supersingular_poly,
    x0_invariants,
)

__version__ = "0.1.0"
