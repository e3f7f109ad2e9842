"""Bipartite states, conjugate systems, and the derived inner product.

A bipartite state is a dense joint probability table over the outcomes of
two models, constrained so that every product test normalizes and every
conditional lands in the cone over the partner's state space.  Conjugate
systems pair a model with an isomorphic copy through an outcome bijection
and a bipartite state whose diagonal is uniformly 1/rank; the table then
induces a bilinear form on the effect space which, on irreducible models,
reproduces the unique orthogonalizing invariant form.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .cones import dual_cone, pairwise_form_positivity
from .effectspace import OrderUnitSpace, build_effect_space, cone_membership
from .forms import BilinearForm, check_unitarity, is_irreducible
from .linalg import (ONE, ZERO, Mat, Vec, column_space_basis, dot, frac,
                     inverse, mat_mul, mat_vec, rank, solve, transpose)
from .lp import LPResult, convex_membership, solve_feasibility
from .models import Model, PermutationGroup, PolytopeBackend, QuantumBackend


class CompositeError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def _is_exact(m: Model) -> bool:
    return isinstance(m.states, PolytopeBackend)


@dataclass(eq=False)
class BipartiteState:
    """Dense joint table over outcomes of A and B."""

    A: Model
    B: Model
    table: dict[tuple[str, str], object]

    @property
    def kind(self) -> str:
        return "exact" if _is_exact(self.A) and _is_exact(self.B) else "float"

    def value(self, x: str, y: str):
        return self.table[(x, y)]

    def row(self, x: str) -> list:
        return [self.table[(x, y)] for y in self.B.outcomes]

    def column(self, y: str) -> list:
        return [self.table[(x, y)] for x in self.A.outcomes]


@dataclass
class BipartiteReport:
    ok: bool
    problems: list = field(default_factory=list)
    notes: list = field(default_factory=list)


def product_state(A: Model, alpha, B: Model, beta) -> BipartiteState:
    """Outer-product table omega(x,y) = alpha(x) * beta(y)."""
    alpha, beta = list(alpha), list(beta)
    if len(alpha) != len(A.outcomes) or len(beta) != len(B.outcomes):
        raise CompositeError("state vectors must be indexed by model outcomes")
    table = {(x, y): alpha[i] * beta[j]
             for i, x in enumerate(A.outcomes)
             for j, y in enumerate(B.outcomes)}
    return BipartiteState(A, B, table)


# ---------------------------------------------------------------------------
# conditionals, marginals, validation

@dataclass
class Conditional:
    vector: list
    mass: object
    zero_mass: bool
    normalized: Optional[list]


def conditional(w: BipartiteState, x: str, side: str = "A") -> Conditional:
    """Unnormalized conditional omega(x, .) (side="A") or omega(., y)."""
    if side == "A":
        if x not in w.A.outcomes:
            raise CompositeError(f"unknown outcome {x!r} of {w.A.name}")
        vec, other = w.row(x), w.B
    else:
        if x not in w.B.outcomes:
            raise CompositeError(f"unknown outcome {x!r} of {w.B.name}")
        vec, other = w.column(x), w.A
    mass = sum(vec[other.testspace.index(y)] for y in other.tests[0])
    zero = (mass == 0) if w.kind == "exact" else abs(mass) <= 1e-12
    if zero:
        return Conditional(vec, mass, True, None)
    return Conditional(vec, mass, False, [v / mass for v in vec])


def marginal(w: BipartiteState, side: str = "A") -> list:
    """Marginal state vector, summing the partner's first test."""
    if side == "A":
        return [conditional(w, x, "A").mass for x in w.A.outcomes]
    return [conditional(w, y, "B").mass for y in w.B.outcomes]


def _conditional_in_cone(other: Model, vec, tol: float):
    """Is an unnormalized conditional in the cone over the partner's states?"""
    if isinstance(other.states, PolytopeBackend):
        mass = sum(vec[other.testspace.index(y)] for y in other.tests[0])
        if mass < 0:
            return False, "negative mass"
        if mass == 0:
            if any(v != 0 for v in vec):
                return False, "zero mass but nonzero entries"
            return True, None
        res = convex_membership([v / mass for v in vec],
                                [list(p) for p in other.states.vertices])
        return res.feasible, None if res.feasible else "outside state polytope"
    qb: QuantumBackend = other.states
    rows = np.array([qb.basis.to_coords(qb.outcome_matrices[y])
                     for y in other.outcomes])
    sol, res, rk, _ = np.linalg.lstsq(rows, np.asarray(vec, float), rcond=None)
    resid = float(np.abs(rows @ sol - np.asarray(vec, float)).max())
    if resid > tol:
        return False, f"no operator reproduces the conditional (residual {resid:.2e})"
    if rk < qb.basis.space_dim:
        return True, "sample not informationally complete; PSD untested"
    H = qb.basis.from_coords(sol)
    lo = float(np.linalg.eigvalsh((H + H.conj().T) / 2).min())
    if lo < -tol:
        return False, f"conditional operator not PSD (min eig {lo:.2e})"
    return True, None


def validate_bipartite(w: BipartiteState, tol: float = 1e-9) -> BipartiteReport:
    problems, notes = [], []
    want = {(x, y) for x in w.A.outcomes for y in w.B.outcomes}
    if set(w.table) != want:
        return BipartiteReport(False, ["table keys do not cover the outcome "
                                       "product exactly"])
    exact = w.kind == "exact"
    for E in w.A.tests:
        for F in w.B.tests:
            s = sum(w.table[(x, y)] for x in E for y in F)
            bad = (s != 1) if exact else abs(s - 1) > tol
            if bad:
                problems.append(f"product test {E}x{F} sums to {s}, not 1")
    for x in w.A.outcomes:
        ok, why = _conditional_in_cone(w.B, w.row(x), tol)
        if not ok:
            problems.append(f"conditional on {x!r}: {why}")
        elif why:
            notes.append(f"conditional on {x!r}: {why}")
    for y in w.B.outcomes:
        ok, why = _conditional_in_cone(w.A, w.column(y), tol)
        if not ok:
            problems.append(f"conditional on second-factor {y!r}: {why}")
        elif why:
            notes.append(f"conditional on second-factor {y!r}: {why}")
    if exact:
        neg = [(k, v) for k, v in w.table.items() if v < 0]
        if neg:
            problems.append(f"negative entries: {neg[:3]}")
    return BipartiteReport(not problems, problems, notes)


# ---------------------------------------------------------------------------
# the induced linear map E(A) -> E(B)*

@dataclass(eq=False)
class OmegaHat:
    """Matrix W with (W a) . b = omega-value, for effect coords a, b.

    Functionals on the partner's effect space are stored as coefficient
    vectors against its coordinates, so ``pair`` is a plain dot product.
    """

    matrix: object
    source: OrderUnitSpace
    target: OrderUnitSpace
    kind: str

    def apply(self, a) -> list:
        if self.kind == "exact":
            return mat_vec(self.matrix, list(a))
        return list(np.asarray(self.matrix) @ np.asarray(a, float))

    def pair(self, a, b):
        if self.kind == "exact":
            return dot(self.apply(a), list(b))
        return float(np.dot(self.apply(a), np.asarray(b, float)))

    def rank(self) -> int:
        if self.kind == "exact":
            return rank(self.matrix)
        return int(np.linalg.matrix_rank(np.asarray(self.matrix), tol=1e-9))


def _basis_outcomes(E: OrderUnitSpace) -> list[str]:
    cols = transpose([[frac(c) for c in E.outcome_vectors[x]]
                      for x in E.model.outcomes]) if E.kind == "exact" else None
    if E.kind == "exact":
        return [E.model.outcomes[i] for i in column_space_basis(cols)]
    M = np.array([E.outcome_vectors[x] for x in E.model.outcomes], float)
    picked, idx = [], []
    for i in range(len(M)):
        trial = picked + [M[i]]
        if np.linalg.matrix_rank(np.array(trial), tol=1e-9) == len(trial):
            picked.append(M[i])
            idx.append(i)
        if len(picked) == E.dim:
            break
    if len(picked) < E.dim:
        raise CompositeError("sampled outcomes do not span the effect space")
    return [E.model.outcomes[i] for i in idx]


def omega_hat(w: BipartiteState, E_A: Optional[OrderUnitSpace] = None,
              E_B: Optional[OrderUnitSpace] = None,
              tol: float = 1e-9) -> OmegaHat:
    """The linear map sending the effect of x to the functional omega(x, .).

    Built in two stages: each table row is solved for a dual vector against
    the partner's outcome frame, then the per-outcome dual vectors are
    assembled into one matrix on a maximal independent family of source
    effects.  Both stages re-verify every outcome, and a dependency of
    outcome vectors that the table fails to respect raises with the
    violating outcome as witness.
    """
    E_A = E_A or build_effect_space(w.A)
    E_B = E_B or build_effect_space(w.B)
    if E_A.kind != E_B.kind:
        raise CompositeError("mixed exact/float bipartite states unsupported")
    exact = E_A.kind == "exact"

    basis_B = _basis_outcomes(E_B)
    basis_A = _basis_outcomes(E_A)
    duals: dict[str, list] = {}
    if exact:
        Yb = [list(E_B.outcome_vectors[y]) for y in basis_B]   # rows
        for x in w.A.outcomes:
            rhs = [w.table[(x, y)] for y in basis_B]
            wx = solve(Yb, [frac(r) for r in rhs])
            if wx is None:
                raise CompositeError("table row unsolvable against the "
                                     f"partner frame at outcome {x!r}",
                                     witness=x)
            duals[x] = wx
            for y in w.B.outcomes:
                if dot(wx, list(E_B.outcome_vectors[y])) != w.table[(x, y)]:
                    raise CompositeError(
                        f"table violates an effect dependency: row {x!r} is "
                        f"inconsistent at outcome {y!r}", witness=(x, y))
        C = transpose([list(E_A.outcome_vectors[x]) for x in basis_A])
        C_inv = inverse(C)
        W = mat_mul(transpose([duals[x] for x in basis_A]), C_inv)
        for x in w.A.outcomes:
            if mat_vec(W, list(E_A.outcome_vectors[x])) != duals[x]:
                raise CompositeError(
                    f"table violates an effect dependency: outcome {x!r} is "
                    "not consistent with the independent family", witness=x)
        return OmegaHat(W, E_A, E_B, "exact")

    Yb = np.array([E_B.outcome_vectors[y] for y in basis_B], float)
    for x in w.A.outcomes:
        rhs = np.array([w.table[(x, y)] for y in basis_B], float)
        wx = np.linalg.solve(Yb, rhs)
        duals[x] = wx
        for y in w.B.outcomes:
            err = abs(float(wx @ np.asarray(E_B.outcome_vectors[y]))
                      - w.table[(x, y)])
            if err > tol:
                raise CompositeError(
                    f"table violates an effect dependency: row {x!r} is "
                    f"inconsistent at outcome {y!r} (error {err:.2e})",
                    witness=(x, y))
    C = np.array([E_A.outcome_vectors[x] for x in basis_A], float).T
    W = np.array([duals[x] for x in basis_A], float).T @ np.linalg.inv(C)
    for x in w.A.outcomes:
        err = float(np.abs(W @ np.asarray(E_A.outcome_vectors[x])
                           - duals[x]).max())
        if err > tol:
            raise CompositeError(
                f"table violates an effect dependency: outcome {x!r} is not "
                f"consistent with the independent family (error {err:.2e})",
                witness=x)
    return OmegaHat(W, E_A, E_B, "float")


# ---------------------------------------------------------------------------
# isomorphism states

@dataclass
class IsomorphismStateReport:
    is_iso: bool
    invertible: bool
    forward_positive: Optional[bool]
    inverse_positive: Optional[bool]
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)


def is_isomorphism_state(w: BipartiteState,
                         E_A: Optional[OrderUnitSpace] = None,
                         E_B: Optional[OrderUnitSpace] = None,
                         tol: float = 1e-9) -> IsomorphismStateReport:
    """Does the induced map carry the effect cone onto the dual cone?

    Exact models: the map must be invertible, send every effect-cone
    generator into the dual cone of the partner (checked generator against
    generator), and its inverse must send every dual-cone generator (from
    the double-description dual) back into the effect cone, with LP
    certificates.  Quantum samples are tested against the analytic
    positive-semidefinite cone, which the sampled cone generates.
    """
    E_A = E_A or build_effect_space(w.A)
    E_B = E_B or build_effect_space(w.B)
    oh = omega_hat(w, E_A, E_B, tol=tol)
    failures, notes = [], []

    if oh.kind == "exact":
        W_inv = inverse(oh.matrix)
        if W_inv is None:
            return IsomorphismStateReport(False, False, None, None,
                                          ["matrix is singular"])
        gens_B = [list(g) for g in E_B.effect_cone.all_generators()]
        fwd = True
        for g in E_A.effect_cone.all_generators():
            f = oh.apply(g)
            for v in gens_B:
                if dot(f, v) < 0:
                    fwd = False
                    failures.append({"stage": "forward", "generator": list(g),
                                     "against": v, "value": dot(f, v)})
        dualB = dual_cone(E_B.effect_cone)
        inv = True
        for d in dualB.all_generators():
            res = E_A.effect_cone.contains(mat_vec(W_inv, list(d)))
            if not res.feasible:
                inv = False
                failures.append({"stage": "inverse", "generator": list(d),
                                 "separator": res.farkas})
        ok = fwd and inv
        return IsomorphismStateReport(ok, True, fwd, inv, failures, notes)

    W = np.asarray(oh.matrix, float)
    if np.linalg.matrix_rank(W, tol=tol) < W.shape[0] or W.shape[0] != W.shape[1]:
        return IsomorphismStateReport(False, False, None, None,
                                      ["matrix is singular"])
    notes.append("quantum membership tested against the analytic "
                 "positive-semidefinite cone generated by the sample")
    W_inv = np.linalg.inv(W)
    fwd = True
    for x in w.A.outcomes:
        f = W @ np.asarray(E_A.outcome_vectors[x])
        H = E_B.basis.from_coords(f)
        lo = float(np.linalg.eigvalsh((H + H.conj().T) / 2).min())
        if lo < -tol:
            fwd = False
            failures.append({"stage": "forward", "outcome": x, "min_eig": lo})
    inv = True
    for y in w.B.outcomes:
        g = W_inv @ np.asarray(E_B.outcome_vectors[y])
        H = E_A.basis.from_coords(g)
        lo = float(np.linalg.eigvalsh((H + H.conj().T) / 2).min())
        if lo < -tol:
            inv = False
            failures.append({"stage": "inverse", "outcome": y, "min_eig": lo})
    return IsomorphismStateReport(fwd and inv, True, fwd, inv, failures, notes)


# ---------------------------------------------------------------------------
# conjugates

@dataclass(eq=False)
class Conjugate:
    model: Model
    gamma: dict[str, str]
    eta: BipartiteState
    notes: list = field(default_factory=list)


def _check_gamma(m: Model, gamma: dict[str, str]) -> None:
    if set(gamma) != set(m.outcomes) or set(gamma.values()) != set(m.outcomes):
        raise CompositeError("gamma must be a bijection on the outcomes")
    tests = {frozenset(t) for t in m.tests}
    for t in m.tests:
        if frozenset(gamma[x] for x in t) not in tests:
            raise CompositeError(f"gamma does not map test {t} to a test")


def find_conjugate_state(m: Model, gamma: Optional[dict[str, str]] = None,
                         require_invariance: bool = True,
                         tol: float = 1e-9) -> Optional[BipartiteState]:
    """Search for a conjugate table: uniform diagonal 1/rank, valid joint.

    Polytope models run an exact rational feasibility LP whose variables are
    the table entries plus conic coefficients expressing every conditional
    over the state polytope's vertices; infeasibility is certified, so a
    ``None`` is an answer, not a failure.  Quantum samples instead construct
    the maximally entangled table analytically and verify it.
    """
    gamma = gamma or {x: x for x in m.outcomes}
    _check_gamma(m, gamma)
    n = len(m.tests[0])
    if isinstance(m.states, QuantumBackend):
        return _entangled_eta(m, gamma, tol)

    outs = list(m.outcomes)
    nO = len(outs)
    verts = [list(v) for v in m.states.vertices]
    nV = len(verts)
    pos = {x: i for i, x in enumerate(outs)}

    def it(x, y):
        return pos[x] * nO + pos[y]

    n_t = nO * nO
    mu0 = n_t                      # mu[x][v]: row-conditional coefficients
    nu0 = n_t + nO * nV            # nu[y][v]: column-conditional coefficients
    nvar = n_t + 2 * nO * nV
    rows: list[Vec] = []
    rhs: list[Fraction] = []

    def add(row, b):
        rows.append(row)
        rhs.append(frac(b))

    for E in m.tests:
        for F in m.tests:
            row = [ZERO] * nvar
            for x in E:
                for y in F:
                    row[it(x, y)] = ONE
            add(row, 1)
    for x in outs:
        for y in outs:
            row = [ZERO] * nvar
            row[it(x, y)] = ONE
            for v in range(nV):
                row[mu0 + pos[x] * nV + v] = -verts[v][pos[y]]
            add(row, 0)
            row = [ZERO] * nvar
            row[it(x, y)] = ONE
            for v in range(nV):
                row[nu0 + pos[y] * nV + v] = -verts[v][pos[x]]
            add(row, 0)
    for x in outs:
        row = [ZERO] * nvar
        row[it(x, gamma[x])] = ONE
        add(row, Fraction(1, n))
    if require_invariance and isinstance(m.group, PermutationGroup):
        gamma_inv = {v: k for k, v in gamma.items()}
        seen = set()
        for g in m.group.generators:
            for x in outs:
                for y in outs:
                    gx = outs[g[pos[x]]]
                    gy = gamma[outs[g[pos[gamma_inv[y]]]]]
                    a, b = it(gx, gy), it(x, y)
                    if a == b or (min(a, b), max(a, b)) in seen:
                        continue
                    seen.add((min(a, b), max(a, b)))
                    row = [ZERO] * nvar
                    row[a] += ONE
                    row[b] -= ONE
                    add(row, 0)

    res = solve_feasibility(rows, rhs)
    if not res.feasible:
        return None
    table = {(x, y): res.point[it(x, y)] for x in outs for y in outs}
    return BipartiteState(m, m, table)


def _entangled_eta(m: Model, gamma: dict[str, str],
                   tol: float) -> BipartiteState:
    """Analytic conjugate table from the maximally entangled vector.

    For the canonical entangled vector the joint value on (x, gamma(y)) is
    tr(x y)/d; equivalently the table entry at (x, z) is tr(x conj(z))/d.
    The construction is verified (diagonal, normalization, hermiticity of
    the pairing) rather than searched for.
    """
    qb: QuantumBackend = m.states
    d = qb.dim
    for x in m.outcomes:
        gm = qb.outcome_matrices[gamma[x]]
        if np.abs(gm - qb.outcome_matrices[x].conj()).max() > tol:
            raise CompositeError(
                f"gamma({x!r}) is not the conjugated effect; the entangled "
                "construction needs the conjugation bijection")
    table = {}
    for x in m.outcomes:
        for z in m.outcomes:
            val = np.trace(qb.outcome_matrices[x]
                           @ qb.outcome_matrices[z].conj()) / d
            if abs(val.imag) > 1e-12:
                raise CompositeError(f"entangled table not real at ({x},{z})")
            table[(x, z)] = float(val.real)
    w = BipartiteState(m, m, table)
    for x in m.outcomes:
        if abs(w.table[(x, gamma[x])] - 1.0 / d) > tol:
            raise CompositeError(f"diagonal at {x!r} is not 1/{d}")
    rep = validate_bipartite(w, tol)
    if not rep.ok:
        raise CompositeError(f"entangled table invalid: {rep.problems[:2]}")
    return w


def make_conjugate(m: Model, gamma: Optional[dict[str, str]] = None,
                   require_invariance: bool = True,
                   tol: float = 1e-9) -> Optional[Conjugate]:
    gamma = gamma or {x: x for x in m.outcomes}
    eta = find_conjugate_state(m, gamma, require_invariance, tol)
    if eta is None:
        return None
    notes = []
    if isinstance(m.states, QuantumBackend):
        notes.append("analytic maximally entangled construction")
    elif require_invariance:
        notes.append("invariance imposed as LP equalities on generator pairs")
    return Conjugate(m, gamma, eta, notes)


# ---------------------------------------------------------------------------
# the derived form

def spin_form_from_conjugate(c: Conjugate,
                             E: Optional[OrderUnitSpace] = None,
                             tol: float = 1e-9) -> BilinearForm:
    """Bilinear form B(x,y) = eta(x, gamma(y)), extended to coordinates.

    The table fixes B on outcome pairs; the extension solves against a
    maximal independent family and then re-verifies every pair, raising
    with the violating pair if the table does not respect an effect-vector
    dependency.  All five flags are certified on the result.
    """
    m = c.model
    E = E or build_effect_space(m)
    exact = E.kind == "exact"
    outs = list(m.outcomes)
    vals = {(x, y): c.eta.table[(x, c.gamma[y])] for x in outs for y in outs}
    basis = _basis_outcomes(E)

    if exact:
        C = transpose([list(E.outcome_vectors[x]) for x in basis])
        C_inv = inverse(C)
        T_bb = [[frac(vals[(x, y)]) for y in basis] for x in basis]
        S = mat_mul(mat_mul(transpose(C_inv), T_bb), C_inv)
        Ssym = [[(S[i][j] + S[j][i]) / 2 for j in range(len(S))]
                for i in range(len(S))]
        asym = any(S[i][j] != S[j][i] for i in range(len(S))
                   for j in range(len(S)))
        B = BilinearForm(Ssym, "exact")
        for x in outs:
            for y in outs:
                if B.value(E.outcome_vectors[x], E.outcome_vectors[y]) != vals[(x, y)]:
                    if asym:
                        raise CompositeError(
                            "table is asymmetric and does not extend to a "
                            f"symmetric form; pair ({x!r},{y!r}) fails after "
                            "averaging", witness=(x, y))
                    raise CompositeError(
                        "table violates an effect dependency at pair "
                        f"({x!r},{y!r})", witness=(x, y))
        _flag_exact(B, m, E)
        return B

    C = np.array([E.outcome_vectors[x] for x in basis], float).T
    C_inv = np.linalg.inv(C)
    T_bb = np.array([[vals[(x, y)] for y in basis] for x in basis], float)
    S = C_inv.T @ T_bb @ C_inv
    S = (S + S.T) / 2
    B = BilinearForm(S, "float")
    worst = 0.0
    for x in outs:
        for y in outs:
            err = abs(B.value(E.outcome_vectors[x], E.outcome_vectors[y])
                      - vals[(x, y)])
            worst = max(worst, err)
            if err > tol:
                raise CompositeError(
                    "table violates an effect dependency at pair "
                    f"({x!r},{y!r}) (error {err:.2e})", witness=(x, y))
    _flag_float(B, m, E, tol)
    return B


def _flag_exact(B: BilinearForm, m: Model, E: OrderUnitSpace) -> None:
    from .linalg import is_positive_definite
    from .models import distinguishable_pairs
    B.normalized = B.value(E.u, E.u) == 1
    B.orthogonalizing = all(
        B.value(E.outcome_vectors[x], E.outcome_vectors[y]) == 0
        for x, y in distinguishable_pairs(m))
    gens = E.effect_cone.all_generators()
    worst, _ = pairwise_form_positivity([list(g) for g in gens], B.matrix)
    B.positive_on_cone = worst >= 0
    B.invariant = check_unitarity(E.all_effect_actions(), B)
    B.positive_definite = is_positive_definite(B.matrix)


def _flag_float(B: BilinearForm, m: Model, E: OrderUnitSpace,
                tol: float) -> None:
    from .models import distinguishable_pairs
    M = np.asarray(B.matrix)
    u = np.asarray(E.u, float)
    B.normalized = abs(float(u @ M @ u) - 1.0) <= tol
    B.orthogonalizing = all(
        abs(B.value(E.outcome_vectors[x], E.outcome_vectors[y])) <= tol
        for x, y in distinguishable_pairs(m))
    vs = [np.asarray(E.outcome_vectors[x]) for x in m.outcomes]
    B.positive_on_cone = all(float(a @ M @ b) >= -tol
                             for a in vs for b in vs)
    B.invariant = check_unitarity(E.all_effect_actions(), B, tol)
    B.positive_definite = bool(np.linalg.eigvalsh(M).min() > tol)


# ---------------------------------------------------------------------------
# BGW homogeneity hypothesis report

@dataclass
class HomogeneityReport:
    witness_ok: list
    covered: list            # per sample: index of covering witness or None
    uncovered: list
    verified_on_samples: bool
    notes: list = field(default_factory=list)


def homogeneity_report(m: Model, witnesses: list[BipartiteState],
                       samples: list, tol: float = 1e-9) -> HomogeneityReport:
    """Which sampled interior states are marginals of isomorphism states?

    A hypothesis-checking report, not a proof of homogeneity: each witness
    is verified to be an isomorphism state, its marginal computed, and each
    sample matched against the verified marginals.
    """
    E = build_effect_space(m)
    exact = E.kind == "exact"
    witness_ok, margs = [], []
    for w in witnesses:
        if w.A is not m or w.B is not m:
            witness_ok.append(False)
            margs.append(None)
            continue
        rep = is_isomorphism_state(w, E, E, tol)
        witness_ok.append(rep.is_iso)
        margs.append(marginal(w, "A") if rep.is_iso else None)
    covered, uncovered = [], []
    for i, s in enumerate(samples):
        s_vec = list(s)
        hit = None
        for j, mg in enumerate(margs):
            if mg is None:
                continue
            if exact and all(frac(a) == frac(b) for a, b in zip(mg, s_vec)):
                hit = j
                break
            if not exact and max(abs(float(a) - float(b))
                                 for a, b in zip(mg, s_vec)) <= tol:
                hit = j
                break
        covered.append(hit)
        if hit is None:
            uncovered.append(i)
    notes = ["hypothesis-checking report on the given samples, not a proof "
             "of homogeneity"]
    return HomogeneityReport(witness_ok, covered, uncovered,
                             not uncovered and bool(samples), notes)
