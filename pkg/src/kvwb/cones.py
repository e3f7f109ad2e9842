"""Polyhedral cones over the rationals.

Dual cones are computed by an incremental double-description sweep with
combinatorial adjacency; inclusion questions reduce to exact feasibility
LPs, so every verdict here ships with a checkable certificate (conic
coefficients one way, a separating functional the other).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional

from .linalg import Mat, Vec, ZERO, ONE, dot, mat_vec, rank, det, frac
from .lp import LPResult, cone_membership, free_feasibility


def ray_primitive(v: Vec) -> tuple[Fraction, ...]:
    """Canonical representative of a ray: integer entries, gcd 1, sign kept."""
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for n in ints:
        g = gcd(g, abs(n))
    if g == 0:
        return tuple(ZERO for _ in v)
    return tuple(frac(n // g) for n in ints)


@dataclass(frozen=True, eq=False)
class PolyhedralCone:
    """A cone given by finitely many generators (not necessarily extreme)."""

    generators: tuple[tuple[Fraction, ...], ...]
    lineality: tuple[tuple[Fraction, ...], ...] = ()
    extreme: Optional[tuple[tuple[Fraction, ...], ...]] = None
    ambient: int = 0                    # fallback dimension for the zero cone

    @property
    def dim(self) -> int:
        if self.generators:
            return len(self.generators[0])
        if self.lineality:
            return len(self.lineality[0])
        return self.ambient

    def all_generators(self) -> list[Vec]:
        gens = [list(g) for g in self.generators]
        for l in self.lineality:
            gens.append(list(l))
            gens.append([-x for x in l])
        return gens

    def contains(self, v: Vec) -> LPResult:
        return cone_membership(list(v), self.all_generators())


def cone(generators) -> PolyhedralCone:
    gens = []
    for g in generators:
        p = ray_primitive([frac(x) for x in g])
        if any(x != 0 for x in p) and p not in gens:
            gens.append(p)
    return PolyhedralCone(tuple(gens))


# ---------------------------------------------------------------------------
# double description

def halfspace_cone_rays(constraints: list[Vec], dim: int
                        ) -> tuple[list[Vec], list[Vec]]:
    """Minimal (lineality, extreme rays) of {x : a.x >= 0 for each a}.

    Incremental double description.  Rays carry the set of constraints they
    satisfy with equality; adjacency of two rays is decided combinatorially
    (no third ray's tight set contains their common tight set).
    """
    lin: list[Vec] = [[ONE if i == j else ZERO for j in range(dim)]
                      for i in range(dim)]
    rays: list[tuple[tuple[Fraction, ...], frozenset[int]]] = []

    for j, a in enumerate(constraints):
        a = [frac(x) for x in a]
        vals = [dot(a, l) for l in lin]
        pivot = next((i for i, v in enumerate(vals) if v != 0), None)
        if pivot is not None:
            l0 = list(lin[pivot])
            v0 = vals[pivot]
            if v0 < 0:
                l0 = [-x for x in l0]
                v0 = -v0
            new_lin = []
            for i, l in enumerate(lin):
                if i == pivot:
                    continue
                c = vals[i] / v0
                new_lin.append([l[k] - c * l0[k] for k in range(dim)])
            new_rays = []
            for vec, tight in rays:
                c = dot(a, list(vec)) / v0
                nv = ray_primitive([vec[k] - c * l0[k] for k in range(dim)])
                new_rays.append((nv, tight | {j}))
            new_rays.append((ray_primitive(l0), frozenset(range(j))))
            lin, rays = new_lin, _dedup(new_rays)
            continue

        pos, zero, neg = [], [], []
        for vec, tight in rays:
            s = dot(a, list(vec))
            if s > 0:
                pos.append((vec, tight, s))
            elif s == 0:
                zero.append((vec, tight | {j}))
            else:
                neg.append((vec, tight, s))
        if not neg:
            rays = _dedup([(v, t | {j}) if dot(a, list(v)) == 0 else (v, t)
                           for v, t in rays])
            continue
        current = [(v, t) for v, t, _ in pos] + zero + [(v, t) for v, t, _ in neg]
        new_rays = [(v, t) for v, t, _ in pos] + zero
        for (pv, pt, ps) in pos:
            for (nv, nt, ns) in neg:
                common = pt & nt
                if any((rv != pv and rv != nv and common <= rt)
                       for rv, rt in current):
                    continue
                w = [ps * nv[k] - ns * pv[k] for k in range(dim)]
                wp = ray_primitive(w)
                if any(x != 0 for x in wp):
                    new_rays.append((wp, common | {j}))
        rays = _dedup(new_rays)

    return [list(l) for l in lin if any(x != 0 for x in l)], \
           [list(v) for v, _ in rays]


def _dedup(rays):
    seen: dict[tuple, frozenset] = {}
    order = []
    for v, t in rays:
        if v in seen:
            seen[v] = seen[v] | t
        else:
            seen[v] = t
            order.append(v)
    return [(v, seen[v]) for v in order]


def dual_cone(K: PolyhedralCone, form: Mat | None = None) -> PolyhedralCone:
    """{v : <v, g> >= 0 for all g in K}, pairing via `form` if given."""
    constraints = []
    for g in K.all_generators():
        constraints.append(mat_vec(form, g) if form is not None else list(g))
    lin, rays = halfspace_cone_rays(constraints, K.dim)
    return PolyhedralCone(tuple(ray_primitive(r) for r in rays),
                          tuple(ray_primitive(l) for l in lin),
                          extreme=tuple(ray_primitive(r) for r in rays),
                          ambient=K.dim)


def polytope_hrep(vertices: list[Vec]) -> tuple[list[tuple[Vec, Fraction]],
                                                list[tuple[Vec, Fraction]]]:
    """Facet inequalities a.x + c >= 0 and equalities a.x + c = 0 of a hull."""
    if not vertices:
        raise ValueError("empty polytope")
    dim = len(vertices[0])
    lifted = [list(v) + [ONE] for v in vertices]
    lin, rays = halfspace_cone_rays(lifted, dim + 1)
    ineqs = [(r[:dim], r[dim]) for r in rays]
    eqs = [(l[:dim], l[dim]) for l in lin]
    return ineqs, eqs


# ---------------------------------------------------------------------------
# structure helpers

def is_pointed(K: PolyhedralCone) -> bool:
    """A cone is pointed iff a single functional is strictly positive on it."""
    if K.lineality:
        return False
    gens = [list(g) for g in K.generators]
    if not gens:
        return True
    n = len(gens[0])
    res = free_feasibility([(g, ONE) for g in gens], [], n)
    return res.feasible


def extreme_rays(K: PolyhedralCone) -> list[tuple[Fraction, ...]]:
    """Extreme rays of a pointed cone: generators not in the hull of the rest."""
    if K.extreme is not None:
        return list(K.extreme)
    if not is_pointed(K):
        raise ValueError("extreme-ray filtering requires a pointed cone")
    gens = [list(g) for g in K.generators]
    keep = []
    for i, g in enumerate(gens):
        others = [h for j, h in enumerate(gens) if j != i]
        if not others or not cone_membership(g, others).feasible:
            keep.append(ray_primitive(g))
    return keep


def cone_equal(K: PolyhedralCone, L: PolyhedralCone) -> tuple[bool, dict]:
    """Mutual inclusion by membership LPs; returns a verdict with witnesses."""
    detail: dict = {"K_in_L": [], "L_in_K": []}
    ok = True
    for g in K.all_generators():
        res = L.contains(g)
        detail["K_in_L"].append({"generator": list(g), "inside": res.feasible,
                                 "certificate": res.point if res.feasible
                                 else res.farkas})
        ok = ok and res.feasible
    for g in L.all_generators():
        res = K.contains(g)
        detail["L_in_K"].append({"generator": list(g), "inside": res.feasible,
                                 "certificate": res.point if res.feasible
                                 else res.farkas})
        ok = ok and res.feasible
    return ok, detail


# ---------------------------------------------------------------------------
# self-duality

@dataclass
class SelfDualityReport:
    self_dual: bool
    dual: PolyhedralCone
    pairwise_min: Fraction
    pairwise_argmin: tuple
    failures: list[dict] = field(default_factory=list)


def pairwise_form_positivity(gens: list[Vec], form: Mat
                             ) -> tuple[Fraction, tuple]:
    best = None
    arg = ()
    for i, g in enumerate(gens):
        fg = mat_vec(form, g)
        for k, h in enumerate(gens):
            v = dot(h, fg)
            if best is None or v < best:
                best, arg = v, (i, k)
    return best, arg


def is_self_dual(K: PolyhedralCone, form: Mat) -> SelfDualityReport:
    """K == {v : B(v, K) >= 0}?  Exact, with certificates both ways."""
    D = dual_cone(K, form)
    gens = [list(g) for g in K.all_generators()]
    pmin, parg = pairwise_form_positivity(gens, form)
    failures = []
    if pmin < 0:
        failures.append({"kind": "cone-not-in-dual",
                         "pair": parg, "value": pmin})
    for g in D.all_generators():
        res = K.contains(g)
        if not res.feasible:
            failures.append({"kind": "dual-ray-outside-cone",
                             "ray": list(g), "separating": res.farkas})
    return SelfDualityReport(self_dual=not failures, dual=D,
                             pairwise_min=pmin, pairwise_argmin=parg,
                             failures=failures)


# ---------------------------------------------------------------------------
# weak self-duality: search for an invertible positive bijection onto the dual

@dataclass
class WeakSelfDualityReport:
    status: str                       # "yes" | "no" | "unknown"
    map: Optional[Mat] = None
    scalars: Optional[list[Fraction]] = None
    bijection: Optional[list[int]] = None
    dual: Optional[PolyhedralCone] = None
    notes: list[str] = field(default_factory=list)


def is_weakly_self_dual(K: PolyhedralCone, form: Mat,
                        cap: int = 12) -> WeakSelfDualityReport:
    """Search for invertible M with M(extreme rays of K) = extreme rays of
    the form-dual, ray by ray with positive scalars.

    Such an M restricts to an order isomorphism of K onto its dual, which is
    exactly weak self-duality; conversely any linear order isomorphism
    permutes extreme rays, so the search is exhaustive for pointed cones.
    """
    D = dual_cone(K, form)
    notes: list[str] = []
    if D.lineality or not is_pointed(K):
        return WeakSelfDualityReport("unknown", dual=D, notes=[
            "search implemented for pointed cones only"])
    R = extreme_rays(K)
    S = list(D.extreme or ())
    if len(R) != len(S):
        return WeakSelfDualityReport("no", dual=D, notes=[
            f"extreme ray counts differ: {len(R)} vs {len(S)}"])
    if rank([list(r) for r in R]) != rank([list(s) for s in S]):
        return WeakSelfDualityReport("no", dual=D, notes=["span dimensions differ"])
    m = len(R)
    if m > cap:
        return WeakSelfDualityReport("unknown", dual=D, notes=[
            f"{m} extreme rays exceeds the search cap {cap}"])
    d = K.dim

    undecided = False
    for perm in itertools.permutations(range(m)):
        found, Mmat, lams, note = _try_bijection(R, S, perm, d)
        if found:
            return WeakSelfDualityReport("yes", map=Mmat, scalars=lams,
                                         bijection=list(perm), dual=D,
                                         notes=notes)
        if note:
            undecided = True
            notes.append(note)
    if undecided:
        return WeakSelfDualityReport("unknown", dual=D, notes=notes + [
            "some ray bijections admitted only singular solutions"])
    return WeakSelfDualityReport("no", dual=D, notes=notes)


def _try_bijection(R, S, perm, d):
    """Solve M r_i = lam_i s_{perm(i)}, lam_i > 0, det M != 0 — or rule it out."""
    from .linalg import nullspace

    m = len(R)
    rows = []
    for i in range(m):
        s = S[perm[i]]
        r = R[i]
        for c in range(d):
            row = [ZERO] * (d * d + m)
            for k in range(d):
                row[c * d + k] = r[k]
            row[d * d + i] = -s[c]
            rows.append(row)
    basis = nullspace(rows)
    if not basis:
        return False, None, None, None
    # scaling freedom: any all-positive lambda solution rescales to lambda >= 1
    ineqs = []
    for i in range(m):
        coeffs = [b[d * d + i] for b in basis]
        ineqs.append((coeffs, ONE))
    res = free_feasibility(ineqs, [], len(basis))
    if not res.feasible:
        return False, None, None, None
    combos = [res.point]
    for b in range(len(basis)):
        for eps in (Fraction(1, 7), Fraction(-1, 7)):
            shifted = list(res.point)
            shifted[b] += eps
            if all(sum(c * basis[k][d * d + i] for k, c in enumerate(shifted)) > 0
                   for i in range(m)):
                combos.append(shifted)
    for combo in combos:
        vec = [sum(c * basis[k][j] for k, c in enumerate(combo))
               for j in range(d * d + m)]
        M = [[vec[r * d + c] for c in range(d)] for r in range(d)]
        if det(M) != 0:
            lams = [vec[d * d + i] for i in range(m)]
            return True, M, lams, None
    return False, None, None, f"bijection {perm}: solutions exist but all sampled maps singular"


# ---------------------------------------------------------------------------
# positive maps and order isomorphisms

@dataclass
class PositiveMapReport:
    positive: bool
    certificates: list[dict]


def is_positive_map(T: Mat, src: PolyhedralCone, tgt: PolyhedralCone
                    ) -> PositiveMapReport:
    certs = []
    ok = True
    for g in src.all_generators():
        img = mat_vec(T, list(g))
        res = tgt.contains(img)
        certs.append({"generator": list(g), "image": img,
                      "inside": res.feasible,
                      "certificate": res.point if res.feasible else res.farkas})
        ok = ok and res.feasible
    return PositiveMapReport(ok, certs)


@dataclass
class OrderIsoReport:
    order_iso: bool
    invertible: bool
    forward: PositiveMapReport
    backward: Optional[PositiveMapReport]


def is_order_isomorphism(T: Mat, src: PolyhedralCone, tgt: PolyhedralCone
                         ) -> OrderIsoReport:
    from .linalg import inverse

    Tinv = inverse(T)
    if Tinv is None:
        return OrderIsoReport(False, False,
                              PositiveMapReport(False, []), None)
    fwd = is_positive_map(T, src, tgt)
    bwd = is_positive_map(Tinv, tgt, src)
    return OrderIsoReport(fwd.positive and bwd.positive, True, fwd, bwd)
