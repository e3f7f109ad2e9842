"""Invariant symmetric bilinear forms and orthogonalizing SPIN forms.

A SPIN form is Symmetric, Positive on the effect cone, Invariant under the
symmetry action, and Normalized to B(u,u) = 1; it is orthogonalizing when it
vanishes on every distinguishable pair of outcomes.  The central uniqueness
statement checked here: on an irreducible model the space of candidate forms
has dimension one before normalization, and the normalized form (when it
admits cone positivity) is an inner product.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .effectspace import OrderUnitSpace
from .linalg import (Mat, Vec, ONE, ZERO, dot, frac, is_positive_definite,
                     is_symmetric, mat_mul, mat_vec, nullspace, np_nullspace,
                     np_rref, rank, solve, transpose)
from .lp import free_feasibility
from .models import CapExceeded, PermutationGroup

TRI_STATE = Optional[bool]          # True / False / None = unchecked


@dataclass(eq=False)
class BilinearForm:
    matrix: object                   # Mat (exact) or np.ndarray (float)
    kind: str                        # "exact" | "float"
    positive_on_cone: TRI_STATE = None
    invariant: TRI_STATE = None
    normalized: TRI_STATE = None
    orthogonalizing: TRI_STATE = None
    positive_definite: TRI_STATE = None

    def __post_init__(self):
        if self.kind == "exact":
            if not is_symmetric(self.matrix):
                raise ValueError("bilinear form matrix must be symmetric")
        else:
            M = np.asarray(self.matrix, dtype=float)
            if np.abs(M - M.T).max() > 1e-9:
                raise ValueError("bilinear form matrix must be symmetric")
            self.matrix = (M + M.T) / 2

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def value(self, a, b):
        if self.kind == "exact":
            return dot(mat_vec(self.matrix, list(a)), list(b))
        return float(np.asarray(a) @ self.matrix @ np.asarray(b))

    def flag_summary(self) -> dict:
        return {"positive_on_cone": self.positive_on_cone,
                "invariant": self.invariant,
                "normalized": self.normalized,
                "orthogonalizing": self.orthogonalizing,
                "positive_definite": self.positive_definite}


# ---------------------------------------------------------------------------
# packed symmetric coordinates

def _pack_index(dim: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(dim) for j in range(i, dim)]


def _unpack(vec, dim: int, exact: bool):
    pairs = _pack_index(dim)
    if exact:
        S = [[ZERO] * dim for _ in range(dim)]
    else:
        S = np.zeros((dim, dim))
    for v, (i, j) in zip(vec, pairs):
        S[i][j] = v
        if exact:
            S[j][i] = v
        else:
            S[j, i] = v
    return S


def _invariance_rows(M, dim: int, exact: bool):
    """Rows of (M^T S M - S) = 0 over packed symmetric unknowns s_{ij}."""
    pairs = _pack_index(dim)
    pos = {p: k for k, p in enumerate(pairs)}
    rows = []
    for a in range(dim):
        for b in range(a, dim):
            row = [ZERO] * len(pairs) if exact else np.zeros(len(pairs))
            for k in range(dim):
                for l in range(dim):
                    coeff = M[k][a] * M[l][b] if exact else M[k, a] * M[l, b]
                    i, j = (k, l) if k <= l else (l, k)
                    row[pos[(i, j)]] += coeff
            row[pos[(a, b)]] -= 1 if exact else 1.0
            rows.append(row)
    return rows


def _pairing_row(x, y, dim: int, exact: bool):
    """Row computing x^T S y over packed symmetric unknowns."""
    pairs = _pack_index(dim)
    pos = {p: k for k, p in enumerate(pairs)}
    row = [ZERO] * len(pairs) if exact else np.zeros(len(pairs))
    for k in range(dim):
        for l in range(dim):
            coeff = x[k] * y[l]
            i, j = (k, l) if k <= l else (l, k)
            row[pos[(i, j)]] += coeff
    return row


# ---------------------------------------------------------------------------
# invariant forms

def invariant_symmetric_forms(E: OrderUnitSpace, actions=None,
                              restrict_to: str = "full") -> list[BilinearForm]:
    """Basis of symmetric forms with M_g^T B M_g = B for every generator.

    Invariance under the generators extends to the whole generated group,
    since the invariance condition is multiplicative in g.  With
    restrict_to="u_perp" the system is solved for forms on the orthogonal
    complement of the unit (taken w.r.t. an averaged positive form).
    """
    if restrict_to not in ("full", "u_perp"):
        raise ValueError("restrict_to must be 'full' or 'u_perp'")
    acts = actions if actions is not None else E.all_effect_actions()
    exact = E.kind == "exact"
    if restrict_to == "u_perp":
        acts = [restricted_action(E, M) for M in acts]
        dim = E.dim - 1
    else:
        dim = E.dim

    rows = []
    for M in acts:
        rows.extend(_invariance_rows(M if exact else np.asarray(M, float),
                                     dim, exact))
    if exact:
        basis = nullspace(rows) if rows else _full_symmetric_basis(dim)
        out = [BilinearForm(_unpack(v, dim, True), "exact", invariant=True)
               for v in basis]
    else:
        if rows:
            null = np_nullspace(np.array(rows))
            null = np_rref(null) if null.shape[0] else null
        else:
            null = np.eye(dim * (dim + 1) // 2)
        out = [BilinearForm(_unpack(v, dim, False), "float", invariant=True)
               for v in null]
    return out


def _full_symmetric_basis(dim: int) -> list[Vec]:
    n = dim * (dim + 1) // 2
    return [[ONE if k == t else ZERO for k in range(n)] for t in range(n)]


def u_perp_basis(E: OrderUnitSpace, pd_form: Optional[BilinearForm] = None):
    """Deterministic basis of {a : B_pd(a, u) = 0}."""
    if E.kind == "exact":
        B = pd_form.matrix if pd_form is not None else average_form(
            BilinearForm(_identity_mat(E.dim), "exact"), E).matrix
        row = mat_vec(B, list(E.u))
        return nullspace([row])
    B = pd_form.matrix if pd_form is not None else np.eye(E.dim)
    row = np.asarray(B) @ np.asarray(E.u, dtype=float)
    null = np_nullspace(row.reshape(1, -1))
    return np_rref(null)


def restricted_action(E: OrderUnitSpace, M, pd_form=None):
    """Action matrix on u-perp coordinates (the subspace is invariant)."""
    V = u_perp_basis(E, pd_form)
    if E.kind == "exact":
        cols = transpose([list(v) for v in V])       # dim x (dim-1)
        out_cols = []
        for v in V:
            img = mat_vec(M, list(v))
            c = solve(cols, img)
            if c is None:
                raise ValueError("u-perp is not invariant under the action")
            out_cols.append(c)
        return transpose(out_cols)
    V = np.asarray(V, dtype=float)                    # rows are basis vectors
    M = np.asarray(M, dtype=float)
    G = V @ V.T
    return np.linalg.solve(G, V @ M @ V.T)


def _identity_mat(dim: int) -> Mat:
    return [[ONE if i == j else ZERO for j in range(dim)] for i in range(dim)]


def average_form(B0: BilinearForm, E: OrderUnitSpace,
                 cap: int = 10**6) -> BilinearForm:
    """Group-average of a form: exact sum over an enumerable matrix group,
    or the Frobenius-nearest invariant form for generator-presented groups."""
    acts = E.all_effect_actions()
    if B0.kind == "exact" and E.kind == "exact":
        els = _matrix_group(acts, cap)
        dim = E.dim
        total = [[ZERO] * dim for _ in range(dim)]
        for M in els:
            term = mat_mul(transpose([list(r) for r in M]),
                           mat_mul(B0.matrix, [list(r) for r in M]))
            for i in range(dim):
                for j in range(dim):
                    total[i][j] += term[i][j]
        n = len(els)
        avg = [[x / n for x in r] for r in total]
        return BilinearForm(avg, "exact", invariant=True,
                            positive_definite=B0.positive_definite)
    basis = invariant_symmetric_forms(E, restrict_to="full")
    if not basis:
        raise ValueError("no invariant forms to project onto")
    mats = [np.asarray(f.matrix, dtype=float) for f in basis]
    flat = np.array([m.ravel() for m in mats])
    q, _ = np.linalg.qr(flat.T)
    b0 = np.asarray(B0.matrix, dtype=float).ravel()
    proj = q @ (q.T @ b0)
    return BilinearForm(proj.reshape(np.asarray(B0.matrix).shape), "float",
                        invariant=True)


def _matrix_group(generators, cap: int):
    """BFS closure of exact matrices under multiplication."""
    def key(M):
        return tuple(tuple(r) for r in M)

    gens = [[list(r) for r in M] for M in generators]
    if not gens:
        return [_identity_mat(1)]
    dim = len(gens[0])
    ident = _identity_mat(dim)
    els = {key(ident): ident}
    frontier = [ident]
    while frontier:
        new = []
        for A in frontier:
            for g in gens:
                B = mat_mul(g, A)
                k = key(B)
                if k not in els:
                    els[k] = B
                    new.append(B)
                    if len(els) > cap:
                        raise CapExceeded(f"matrix group exceeded cap {cap}")
        frontier = new
    return list(els.values())


# ---------------------------------------------------------------------------
# irreducibility

def is_irreducible(E: OrderUnitSpace, actions=None) -> bool:
    """Exactly one invariant symmetric form on u-perp, up to scale.

    For a finite or compact group every invariant subspace carries an
    invariant positive form, so a reducible action admits at least two
    independent invariant symmetric forms on u-perp; irreducible real
    representations of every type admit exactly one *symmetric* one.
    """
    forms = invariant_symmetric_forms(E, actions=actions, restrict_to="u_perp")
    return len(forms) == 1


# ---------------------------------------------------------------------------
# orthogonalizing SPIN forms

@dataclass
class SpinFormResult:
    form: Optional[BilinearForm]
    solution_space_dim: int
    notes: list[str] = field(default_factory=list)
    basis: list = field(default_factory=list)        # homogeneous solution basis


def find_orthogonalizing_spin_form(m, E: OrderUnitSpace,
                                   actions=None, tol: float = 1e-9
                                   ) -> SpinFormResult:
    """Solve {symmetric, invariant, zero on distinguishable pairs}, then
    normalize B(u,u)=1 and demand positivity on cone generator pairs.

    Returns the homogeneous solution dimension as the uniqueness certificate
    (1 means unique up to scale) and a form when the normalized slice meets
    the positivity constraints; positivity on generator pairs is sufficient
    for positivity on the whole cone by bilinearity.
    """
    from .models import distinguishable_pairs

    acts = actions if actions is not None else E.all_effect_actions()
    exact = E.kind == "exact"
    dim = E.dim

    pairs = set()
    for a, b in distinguishable_pairs(m):
        if (b, a) not in pairs:
            pairs.add((a, b))

    rows = []
    for M in acts:
        rows.extend(_invariance_rows(M if exact else np.asarray(M, float),
                                     dim, exact))
    for a, b in sorted(pairs):
        va, vb = E.outcome_vectors[a], E.outcome_vectors[b]
        rows.append(_pairing_row(list(va), list(vb), dim, exact))

    if exact:
        basis = nullspace(rows) if rows else _full_symmetric_basis(dim)
    else:
        null = np_nullspace(np.array(rows))
        basis = list(np_rref(null)) if null.shape[0] else []
    h = len(basis)
    if h == 0:
        return SpinFormResult(None, 0, ["only the zero form satisfies the "
                                        "linear constraints"])

    mats = [_unpack(v, dim, exact) for v in basis]
    u = list(E.u)
    gens = [list(g) for g in (E.cone_generators if exact
                              else [E.outcome_vectors[x] for x in m.outcomes])]

    if exact:
        uvals = [dot(mat_vec(S, u), u) for S in mats]
        ineqs = []
        for i in range(len(gens)):
            for j in range(i, len(gens)):
                coeffs = [dot(mat_vec(S, gens[i]), gens[j]) for S in mats]
                ineqs.append((coeffs, ZERO))
        res = free_feasibility(ineqs, [(uvals, ONE)], h)
        if not res.feasible:
            return SpinFormResult(None, h, ["no cone-positive form on the "
                                            "normalized slice"])
        S = [[sum(c * mats[k][i][j] for k, c in enumerate(res.point))
              for j in range(dim)] for i in range(dim)]
        form = BilinearForm(S, "exact", invariant=True)
        _certify_exact(form, m, E, pairs)
        return SpinFormResult(form, h, [], basis=mats)

    if h > 1:
        return SpinFormResult(None, h, [
            f"float search found a {h}-dimensional candidate space; "
            "refusing to pick a form numerically"], basis=mats)
    S = np.asarray(mats[0], dtype=float)
    uu = float(np.asarray(u) @ S @ np.asarray(u))
    if abs(uu) < tol:
        return SpinFormResult(None, h, ["candidate form is degenerate on the "
                                        "unit"], basis=mats)
    S = S / uu
    form = BilinearForm(S, "float", invariant=True)
    worst = min(float(np.asarray(g) @ S @ np.asarray(gj))
                for gi, g in enumerate(gens) for gj in gens[gi:])
    if worst < -tol:
        return SpinFormResult(None, h, [f"normalized form fails cone "
                                        f"positivity ({worst:.3e})"],
                              basis=mats)
    form.positive_on_cone = True
    form.normalized = True
    form.orthogonalizing = all(
        abs(form.value(E.outcome_vectors[a], E.outcome_vectors[b])) <= tol
        for a, b in pairs) if pairs else True
    ev = float(np.linalg.eigvalsh(S).min())
    form.positive_definite = ev > tol
    return SpinFormResult(form, h, [f"minimum eigenvalue {ev:.6e}"],
                          basis=mats)


def _certify_exact(form: BilinearForm, m, E, pairs) -> None:
    u = list(E.u)
    form.normalized = dot(mat_vec(form.matrix, u), u) == 1
    form.orthogonalizing = all(
        form.value(E.outcome_vectors[a], E.outcome_vectors[b]) == 0
        for a, b in pairs)
    gens = E.cone_generators
    form.positive_on_cone = all(
        form.value(g, h) >= 0
        for i, g in enumerate(gens) for h in gens[i:])
    form.positive_definite = is_positive_definite(form.matrix)


# ---------------------------------------------------------------------------
# uniqueness / inner-product report

@dataclass
class SpinUniquenessReport:
    irreducible: Optional[bool]
    solution_space_dim: int
    form_found: bool
    positive_definite: Optional[bool]
    hypothesis_met: bool
    consistent: bool
    notes: list[str] = field(default_factory=list)


def check_spin_uniqueness(m, E: OrderUnitSpace, actions=None) -> SpinUniquenessReport:
    """Uniqueness + inner-product statement, instantiated on one model.

    On an irreducible model there is at most one orthogonalizing SPIN form,
    and if it exists it is positive definite.  Reducible models leave the
    statement silent ("hypothesis not met").
    """
    irr = is_irreducible(E, actions=actions)
    res = find_orthogonalizing_spin_form(m, E, actions=actions)
    notes = list(res.notes)
    if not irr:
        return SpinUniquenessReport(irr, res.solution_space_dim,
                                    res.form is not None,
                                    res.form.positive_definite if res.form else None,
                                    hypothesis_met=False, consistent=True,
                                    notes=notes + ["hypothesis not met: "
                                                   "model is reducible"])
    ok = res.solution_space_dim <= 1
    pd = res.form.positive_definite if res.form is not None else None
    if res.form is not None:
        ok = ok and bool(pd)
    return SpinUniquenessReport(irr, res.solution_space_dim,
                                res.form is not None, pd,
                                hypothesis_met=True, consistent=ok,
                                notes=notes)


# ---------------------------------------------------------------------------
# unitarity

def check_unitarity(actions, B: BilinearForm, tol: float = 1e-9) -> bool:
    """Every symmetry is B-unitary: its B-adjoint equals its inverse,
    i.e. M^T B M = B for each generator."""
    if B.kind == "exact":
        from .linalg import det
        if det(B.matrix) == 0:
            raise ValueError("unitarity check needs an invertible form")
        for M in actions:
            Mm = [list(r) for r in M]
            lhs = mat_mul(transpose(Mm), mat_mul(B.matrix, Mm))
            if lhs != B.matrix:
                return False
        return True
    Bm = np.asarray(B.matrix, dtype=float)
    if abs(np.linalg.det(Bm)) < tol:
        raise ValueError("unitarity check needs an invertible form")
    for M in actions:
        Mm = np.asarray(M, dtype=float)
        if np.abs(Mm.T @ Bm @ Mm - Bm).max() > tol:
            return False
    return True
