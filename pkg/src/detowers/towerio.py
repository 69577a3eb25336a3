"""Ingest and emit tower definitions and splitting reports as JSON.

Definition grammar (all coefficient lists are decimal, lowest degree first):

    {
      "p": 7, "k": 1,
      "g": "[0,4]/[1,2,1]",
      "h": "[0,0,1]/[1]",
      "S": ["inf", 0, 1],                  // "inf", a rational point, or a
                                           // monic irreducible coefficient list
      "operator": {"a1": "[-1,2]/[0,-1,1]", "a2": "[2]/[0,-1,1]"},
      "phi": "[1,2,2,1]",
      "pullback": {"f": "...", "component": [[...], ...],
                   "g_tilde": "...", "h_tilde": "...", "phi_map": "..."}
    }

"operator", "phi" and "pullback" are optional.  Reports are emitted under
``schema_version`` 1 with deterministic key order, so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional

from .fields import FieldDescriptor, make_field
from .ratfunc import INF, Infinity, Place, Poly, ProjPoint, RatFunc, parse_ratfunc, ratfunc_to_text
from .bipoly import BiPoly
from .fuchsian import FuchsianOperator
from .tower import (
    LevelData,
    OptimalityReport,
    MinimalSplitting,
    SplitSet,
    TowerSpec,
    totally_branched_witness,
    validate_correspondence,
    verify_pullback_correspondence,
)

__all__ = [
    "TowerDefinitionError",
    "tower_from_json",
    "tower_from_file",
    "tower_to_json",
    "report_to_json",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = 1


class TowerDefinitionError(ValueError):
    """A malformed definition document, with a location hint."""

    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}")


def _parse_place(entry, field: FieldDescriptor, location: str) -> Place:
    if entry == "inf":
        return Place.infinite(field)
    if isinstance(entry, int):
        return Place.of_element(field.element(entry))
    if isinstance(entry, list):
        try:
            return Place(field, Poly(field, entry))
        except ValueError as exc:
            raise TowerDefinitionError(location, str(exc)) from exc
    raise TowerDefinitionError(location, f"expected 'inf', an integer, or a list, got {entry!r}")


def _parse_rf(entry, field: FieldDescriptor, location: str) -> RatFunc:
    if not isinstance(entry, str):
        raise TowerDefinitionError(location, f"expected a \"num/den\" string, got {entry!r}")
    try:
        return parse_ratfunc(entry, field)
    except (ValueError, ZeroDivisionError) as exc:
        raise TowerDefinitionError(location, str(exc)) from exc


def tower_from_json(doc: dict, name: str = "from-file") -> TowerSpec:
    """Validate a definition document into a TowerSpec."""
    if not isinstance(doc, dict):
        raise TowerDefinitionError("$", "definition must be a JSON object")
    for key in ("p", "g", "h", "S"):
        if key not in doc:
            raise TowerDefinitionError(f"$.{key}", "missing required field")
    p = doc["p"]
    k = doc.get("k", 1)
    if not isinstance(p, int) or not isinstance(k, int):
        raise TowerDefinitionError("$.p", "p and k must be integers")
    try:
        field = make_field(p, k)
    except Exception as exc:
        raise TowerDefinitionError("$.p", str(exc)) from exc
    g = _parse_rf(doc["g"], field, "$.g")
    h = _parse_rf(doc["h"], field, "$.h")
    if not isinstance(doc["S"], list):
        raise TowerDefinitionError("$.S", "expected a list of places")
    S = frozenset(
        _parse_place(entry, field, f"$.S[{i}]") for i, entry in enumerate(doc["S"])
    )
    operator = None
    if "operator" in doc and doc["operator"] is not None:
        op_doc = doc["operator"]
        if not isinstance(op_doc, dict) or "a1" not in op_doc or "a2" not in op_doc:
            raise TowerDefinitionError("$.operator", "expected an object with a1 and a2")
        operator = FuchsianOperator(
            _parse_rf(op_doc["a1"], field, "$.operator.a1"),
            _parse_rf(op_doc["a2"], field, "$.operator.a2"),
        )
    solution = None
    if "phi" in doc and doc["phi"] is not None:
        solution = _parse_rf(doc["phi"], field, "$.phi")

    corr = validate_correspondence(g, h, S, operator, solution)
    witness = totally_branched_witness(corr)
    base = TowerSpec(name=name, corr=corr, witness=witness,
                     modular_level=doc.get("modular_level"))

    if "pullback" in doc and doc["pullback"] is not None:
        pb = doc["pullback"]
        loc = "$.pullback"
        for key in ("f", "component", "g_tilde", "h_tilde", "phi_map"):
            if key not in pb:
                raise TowerDefinitionError(f"{loc}.{key}", "missing required field")
        f = _parse_rf(pb["f"], field, f"{loc}.f")
        comp = pb["component"]
        if not isinstance(comp, list) or not all(isinstance(r, list) for r in comp):
            raise TowerDefinitionError(f"{loc}.component", "expected a list of coefficient rows")
        component = BiPoly(field, comp)
        verification = verify_pullback_correspondence(
            base,
            f,
            component,
            _parse_rf(pb["g_tilde"], field, f"{loc}.g_tilde"),
            _parse_rf(pb["h_tilde"], field, f"{loc}.h_tilde"),
            _parse_rf(pb["phi_map"], field, f"{loc}.phi_map"),
            name=name,
        )
        return verification.tower
    return base


def tower_from_file(path: str, name: Optional[str] = None) -> TowerSpec:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TowerDefinitionError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from exc
    return tower_from_json(doc, name=name or path)


def _place_to_json(pl: Place):
    if pl.is_infinite:
        return "inf"
    if pl.degree == 1:
        return pl.rational_value().as_int()
    return [c.as_int() for c in pl.poly.coeffs]


def tower_to_json(ts: TowerSpec) -> dict:
    """Serialize a tower back into the definition grammar."""
    corr = ts.corr
    doc: dict = {
        "p": ts.field.p,
        "k": ts.field.k,
        "g": ratfunc_to_text(corr.g),
        "h": ratfunc_to_text(corr.h),
        "S": sorted((_place_to_json(pl) for pl in corr.singular_set), key=repr),
    }
    if corr.operator is not None:
        doc["operator"] = {
            "a1": ratfunc_to_text(corr.operator.a1),
            "a2": ratfunc_to_text(corr.operator.a2),
        }
    if corr.solution is not None:
        doc["phi"] = ratfunc_to_text(corr.solution)
    if ts.modular_level is not None:
        doc["modular_level"] = ts.modular_level
    if ts.pullback_of is not None:
        prov = ts.pullback_of
        doc = {
            "p": ts.field.p,
            "k": ts.field.k,
            "g": ratfunc_to_text(prov.base.corr.g),
            "h": ratfunc_to_text(prov.base.corr.h),
            "S": sorted((_place_to_json(pl) for pl in prov.base.corr.singular_set), key=repr),
            "pullback": {
                "f": ratfunc_to_text(prov.f),
                "component": [[c.as_int() for c in row] for row in prov.component.rows],
                "g_tilde": ratfunc_to_text(corr.g),
                "h_tilde": ratfunc_to_text(corr.h),
                "phi_map": ratfunc_to_text(prov.phi_map),
            },
        }
        if prov.base.corr.operator is not None:
            doc["operator"] = {
                "a1": ratfunc_to_text(prov.base.corr.operator.a1),
                "a2": ratfunc_to_text(prov.base.corr.operator.a2),
            }
        if prov.base.corr.solution is not None:
            doc["phi"] = ratfunc_to_text(prov.base.corr.solution)
    return doc


def _point_to_json(x: ProjPoint):
    if isinstance(x, Infinity):
        return "inf"
    if x.in_prime_field():
        return x.coeffs[0]
    return list(x.coeffs)


def _frac(f: Optional[Fraction]):
    if f is None:
        return None
    return f"{f.numerator}/{f.denominator}"


def report_to_json(
    ts: TowerSpec,
    split: Optional[SplitSet],
    msf: Optional[MinimalSplitting],
    levels: list[LevelData],
    verdict: Optional[OptimalityReport],
    seed: int,
    guards: dict,
) -> dict:
    """The versioned splitting report mirrored by the CLI."""
    doc: dict = {
        "schema_version": SCHEMA_VERSION,
        "tower": {
            "name": ts.name,
            "p": ts.field.p,
            "k": ts.field.k,
            "delta": ts.corr.delta,
            "definition": tower_to_json(ts),
        },
        "assumptions": {
            key: (val if isinstance(val, (bool, str)) else repr(val))
            for key, val in sorted(ts.corr.checks.items())
        },
        "witness": None
        if ts.witness is None
        else {
            "point": _point_to_json(ts.witness.point),
            "ext_degree": ts.witness.ext_degree,
            "certified_all_levels": ts.witness.certified_all_levels,
        },
        "splitting": None
        if split is None
        else {
            "count": split.count,
            "complete": split.complete,
            "ext_bound": split.ext_bound,
            "searched_degrees": list(split.searched_degrees),
            "points": [
                {"point": _point_to_json(x), "ext_degree": j} for x, j in split.points
            ],
            "values": [_point_to_json(v) for v in split.values],
            "minimal_splitting_degree": None if msf is None else msf.degree,
            "minimal_splitting_searched_to": None if msf is None else msf.k_max,
        },
        "levels": [
            {
                "m": lv.m,
                "k": lv.ext_degree,
                "count": lv.count,
                "split_count": lv.split_count,
                "above_singular": lv.above_singular,
            }
            for lv in levels
        ],
        "verdict": None
        if verdict is None
        else {
            "good": verdict.good,
            "good_hypothesis_checked": verdict.good_hypothesis_checked,
            "optimal": verdict.optimal,
            "optimal_via": verdict.optimal_via,
            "split_count": verdict.split_count,
            "genus_bound": _frac(verdict.genus_bound),
            "nu_lower": verdict.nu_lower,
            "lambda_lower": _frac(verdict.lambda_lower),
            "minimal_splitting_degree": verdict.minimal_splitting_degree,
            "equality": None
            if verdict.equality_lhs is None
            else {"lhs": verdict.equality_lhs, "rhs": verdict.equality_rhs},
            "notes": list(verdict.notes),
        },
        "guards": dict(sorted(guards.items())),
        "seed": seed,
    }
    return doc


def dumps_report(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
