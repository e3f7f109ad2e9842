"""JSON (de)serialization for models, bipartite tables, forms, and reports.

Rationals travel as exact "p/q" strings (decimal strings are converted
exactly); floats rely on repr round-tripping.  `dumps_canonical` is the one
place report bytes are produced: sorted keys, fixed separators, no
timestamps, so identical inputs give identical bytes.
"""
from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .models import (Model, PermutationGroup, PolytopeBackend, QuantumBackend,
                     TestSpace, UnitaryGenerators)
from . import quantum


def frac_str(v: Fraction) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def parse_frac(s) -> Fraction:
    """Exact rational from "p/q", integer, or decimal string."""
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, float):
        raise ValueError(f"refusing binary float {s!r}; send a string")
    return Fraction(str(s).strip())


def jsonable(obj):
    """Recursively coerce to pure JSON types; exact rationals to strings."""
    if isinstance(obj, Fraction):
        return frac_str(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    if hasattr(obj, "__dict__"):
        return {k: jsonable(v) for k, v in vars(obj).items()
                if not k.startswith("_")}
    return str(obj)


def dumps_canonical(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2,
                      ensure_ascii=True) + "\n"


# ---------------------------------------------------------------------------
# models

def _complex_mat_json(M: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def _complex_mat_load(rows) -> np.ndarray:
    return np.array([[complex(a, b) for a, b in row] for row in rows])


def model_to_json(m: Model) -> dict:
    out: dict = {"name": m.name,
                 "outcomes": list(m.outcomes),
                 "tests": [list(t) for t in m.tests]}
    if isinstance(m.states, PolytopeBackend):
        out["states"] = {"kind": "polytope",
                         "extreme": [{x: frac_str(v[i])
                                      for i, x in enumerate(m.outcomes)}
                                     for v in m.states.vertices]}
    else:
        qb: QuantumBackend = m.states
        out["states"] = {"kind": "quantum", "field": qb.field, "dim": qb.dim,
                         "outcome_matrices": {
                             x: _complex_mat_json(np.asarray(qb.outcome_matrices[x],
                                                             dtype=complex))
                             for x in m.outcomes},
                         "builtin": qb.builtin}
    if isinstance(m.group, PermutationGroup):
        out["group"] = {"kind": "permutation",
                        "generators": [{m.outcomes[i]: m.outcomes[g[i]]
                                        for i in range(len(m.outcomes))}
                                       for g in m.group.generators],
                        "cap": m.group.cap}
    else:
        ug: UnitaryGenerators = m.group
        out["group"] = {"kind": "unitary", "seed": ug.seed,
                        "matrices": [[[float(v) for v in row]
                                      for row in np.asarray(M, float)]
                                     for M in ug.matrices],
                        "note": ug.note}
    if m.sample_symmetries is not None:
        out["sample_symmetries"] = {
            "generators": [{m.outcomes[i]: m.outcomes[g[i]]
                            for i in range(len(m.outcomes))}
                           for g in m.sample_symmetries.generators],
            "cap": m.sample_symmetries.cap}
    return out


def model_from_json(data: dict, cap: int | None = None) -> Model:
    outcomes = tuple(data["outcomes"])
    tests = tuple(tuple(t) for t in data["tests"])
    ts = TestSpace(outcomes, tests)
    pos = {x: i for i, x in enumerate(outcomes)}
    st = data["states"]
    if st["kind"] == "polytope":
        verts = tuple(tuple(parse_frac(v.get(x, "0")) for x in outcomes)
                      for v in st["extreme"])
        backend = PolytopeBackend(verts)
    elif st["kind"] == "quantum":
        mats = {x: _complex_mat_load(st["outcome_matrices"][x])
                for x in outcomes}
        basis = quantum.hermitian_basis(st["dim"], st["field"])
        backend = QuantumBackend(st["field"], st["dim"], mats, basis,
                                 builtin=bool(st.get("builtin", False)))
    else:
        raise ValueError(f"unknown states kind {st['kind']!r}")

    def perm_of(mapping) -> tuple:
        return tuple(pos[mapping[x]] for x in outcomes)

    g = data["group"]
    if g["kind"] == "permutation":
        group = PermutationGroup(tuple(perm_of(mp) for mp in g["generators"]),
                                 cap=cap or g.get("cap", 10**6))
    elif g["kind"] == "unitary":
        group = UnitaryGenerators(
            matrices=tuple(np.array(M, dtype=float) for M in g["matrices"]),
            seed=g.get("seed", 0), note=g.get("note", ""))
    else:
        raise ValueError(f"unknown group kind {g['kind']!r}")
    sample = None
    if "sample_symmetries" in data:
        ss = data["sample_symmetries"]
        sample = PermutationGroup(tuple(perm_of(mp) for mp in ss["generators"]),
                                  cap=cap or ss.get("cap", 10**6))
    return Model(data.get("name", "model"), ts, backend, group,
                 sample_symmetries=sample)


def load_model(source: str, seed: int = 42, cap: int | None = None) -> Model:
    """A built-in name, or a path to a model JSON file."""
    from .builtins import builtin_names, get_builtin
    from .models import DEFAULT_CAP
    if source in builtin_names():
        return get_builtin(source, seed=seed, cap=cap or DEFAULT_CAP)
    with open(source, encoding="utf-8") as fh:
        return model_from_json(json.load(fh), cap=cap)


# ---------------------------------------------------------------------------
# bipartite tables and forms

def bipartite_to_json(w) -> dict:
    exact = w.kind == "exact"
    table: dict = {}
    for (x, y), v in w.table.items():
        if exact and v == 0:
            continue
        table.setdefault(x, {})[y] = frac_str(v) if exact else float(v)
    return {"A": w.A.name, "B": w.B.name, "kind": w.kind, "table": table}


def bipartite_from_json(data: dict, A: Model, B: Model):
    from .composites import BipartiteState
    exact = data.get("kind", "exact") == "exact"
    table = {}
    for x in A.outcomes:
        row = data["table"].get(x, {})
        for y in B.outcomes:
            v = row.get(y, "0" if exact else 0.0)
            table[(x, y)] = parse_frac(v) if exact else float(v)
    return BipartiteState(A, B, table)


def form_to_json(B) -> dict:
    exact = B.kind == "exact"
    return {"kind": B.kind,
            "matrix": [[frac_str(v) for v in row] for row in B.matrix]
            if exact else [[float(v) for v in row] for row in B.matrix],
            "flags": jsonable(B.flag_summary())}


def form_from_json(data: dict):
    from .forms import BilinearForm
    if data["kind"] == "exact":
        M = [[parse_frac(v) for v in row] for row in data["matrix"]]
    else:
        M = np.array(data["matrix"], dtype=float)
    flags = data.get("flags") or {}
    return BilinearForm(M, data["kind"],
                        **{k: flags.get(k) for k in
                           ("positive_on_cone", "invariant", "normalized",
                            "orthogonalizing", "positive_definite")})


def cone_to_json(K) -> dict:
    return {"generators": [[frac_str(v) for v in g] for g in K.generators],
            "lineality": [[frac_str(v) for v in g] for g in K.lineality]}


def cone_from_json(data: dict):
    from .cones import PolyhedralCone, cone
    gens = [[parse_frac(v) for v in g] for g in data["generators"]]
    lin = [[parse_frac(v) for v in g] for g in data.get("lineality", [])]
    if lin:
        return PolyhedralCone(tuple(tuple(g) for g in gens),
                              tuple(tuple(v) for v in lin))
    return cone(gens)
