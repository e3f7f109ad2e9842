"""Order-unit coordinates for a model's outcome effects.

Every outcome x acts on states as the evaluation functional alpha -> alpha(x).
These functionals span the dual of the state span; picking a maximal
independent family of extreme states as a coordinate frame turns each effect
into a concrete vector, the order unit into the all-ones vector, and each
symmetry into an explicit matrix.  Quantum models use a Hilbert-Schmidt
orthonormal operator basis instead and stay in floats.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import quantum
from .cones import PolyhedralCone, cone
from .linalg import (Mat, Vec, ONE, ZERO, column_space_basis, dot, frac,
                     mat_mul, mat_vec, rank, solve, transpose)
from .models import (Model, Morphism, PermutationGroup, PolytopeBackend,
                     QuantumBackend, UnitaryGenerators, act_on_state,
                     perm_inverse, state_tuple)


class EffectSpaceError(ValueError):
    pass


@dataclass(eq=False)
class OrderUnitSpace:
    """Coordinates for the span of a model's outcome effects."""

    model: Model
    kind: str                                   # "exact" | "float"
    dim: int
    u: object                                   # Vec (exact) or np.ndarray (float)
    outcome_vectors: dict[str, object]
    basis_states: tuple[int, ...] = ()          # polytope: coordinate vertex indices
    effect_cone: Optional[PolyhedralCone] = None
    basis: Optional[quantum.HermitianBasis] = None
    span_dim: int = 0
    collapse: list[tuple[str, str]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def outcome_matrix(self) -> list:
        return [self.outcome_vectors[x] for x in self.model.outcomes]

    @property
    def cone_generators(self) -> list:
        """Outcome vectors, deduplicated — the generators of the effect cone."""
        if self.effect_cone is not None:
            return [list(g) for g in self.effect_cone.generators]
        seen, out = set(), []
        for x in self.model.outcomes:
            key = tuple(np.round(np.asarray(self.outcome_vectors[x]), 12))
            if key not in seen:
                seen.add(key)
                out.append(self.outcome_vectors[x])
        return out

    # ---- states as dual vectors -------------------------------------------
    def state_coords(self, state) -> object:
        """Coefficients of a state against the coordinate frame.

        Exact models expand the state over the basis extreme states; the
        pairing <effect, state> is then the plain dot product of coordinates.
        """
        if self.kind == "exact":
            if isinstance(state, dict):
                state = state_tuple(self.model, state)
            cols = [list(self.model.states.vertices[i]) for i in self.basis_states]
            A = transpose(cols)
            c = solve(A, list(state))
            if c is None:
                raise EffectSpaceError("state lies outside the span of the "
                                       "extreme states")
            return c
        rho = state if isinstance(state, np.ndarray) else np.asarray(state)
        if rho.ndim == 2:
            return self.basis.to_coords(rho)
        return rho

    def pair(self, effect, state_vec) -> object:
        if self.kind == "exact":
            return dot(list(effect), list(state_vec))
        return float(np.dot(np.asarray(effect), np.asarray(state_vec)))

    # ---- symmetries as matrices -------------------------------------------
    def effect_action(self, g) -> object:
        """Matrix of the effect-space action of a symmetry generator.

        For an outcome permutation g the action sends the effect of x to the
        effect of g(x); the matrix is exact.  Unitary generators already come
        as coordinate matrices.
        """
        if self.kind == "float":
            return g  # UnitaryGenerators store ready-made matrices
        m = self.model
        verts = m.states.vertices
        cols = [list(verts[i]) for i in self.basis_states]
        A = transpose(cols)
        ginv = g if isinstance(g, tuple) else tuple(g)
        ginv = perm_inverse(ginv)
        rows = []
        for i in self.basis_states:
            moved = act_on_state(ginv, verts[i])
            c = solve(A, list(moved))
            if c is None:
                raise EffectSpaceError("symmetry moved a basis state outside "
                                       "the state span")
            rows.append(c)
        return rows

    def all_effect_actions(self) -> list:
        m = self.model
        if isinstance(m.group, PermutationGroup):
            return [self.effect_action(g) for g in m.group.generators]
        return list(m.group.matrices)


def build_effect_space(m: Model) -> OrderUnitSpace:
    if isinstance(m.states, PolytopeBackend):
        return _build_exact(m)
    return _build_float(m)


def _build_exact(m: Model) -> OrderUnitSpace:
    verts = [list(v) for v in m.states.vertices]
    if not verts:
        raise EffectSpaceError("model has no states")
    A = transpose(verts)           # columns = states
    basis_idx = tuple(column_space_basis(A))
    k = len(basis_idx)

    coords: dict[str, Vec] = {}
    for x in m.outcomes:
        xi = m.testspace.index(x)
        coords[x] = [m.states.vertices[i][xi] for i in basis_idx]

    collapse = []
    labels = list(m.outcomes)
    for i, x in enumerate(labels):
        for y in labels[i + 1:]:
            if coords[x] == coords[y]:
                collapse.append((x, y))

    u = [ONE] * k                   # every basis state sums to 1 on any test
    for t in m.tests:
        tot = [ZERO] * k
        for x in t:
            tot = [a + b for a, b in zip(tot, coords[x])]
        if tot != u:
            raise EffectSpaceError(f"test {t} does not sum to the order unit")

    K = cone(coords[x] for x in m.outcomes)
    notes = []
    if collapse:
        notes.append(f"{len(collapse)} outcome pairs share an effect vector")
    return OrderUnitSpace(model=m, kind="exact", dim=k, u=u,
                          outcome_vectors=coords, basis_states=basis_idx,
                          effect_cone=K, span_dim=k, collapse=collapse,
                          notes=notes)


def _build_float(m: Model) -> OrderUnitSpace:
    qb: QuantumBackend = m.states
    basis = qb.basis
    coords = {x: basis.to_coords(qb.outcome_matrices[x]) for x in m.outcomes}
    stacked = np.array([coords[x] for x in m.outcomes])
    span = int(np.linalg.matrix_rank(stacked, tol=1e-9))
    notes = []
    if span < basis.space_dim:
        notes.append(f"sampled outcomes span only {span} of "
                     f"{basis.space_dim} effect dimensions")
    collapse = []
    labels = list(m.outcomes)
    for i, x in enumerate(labels):
        for y in labels[i + 1:]:
            if np.allclose(coords[x], coords[y], atol=1e-12):
                collapse.append((x, y))
    return OrderUnitSpace(model=m, kind="float", dim=basis.space_dim,
                          u=basis.unit_coords, outcome_vectors=coords,
                          basis=basis, span_dim=span, collapse=collapse,
                          notes=notes)


def cone_membership(space: OrderUnitSpace, v, tol: float = 1e-9):
    """Is v in the effect cone?

    Exact spaces answer with a conic-coefficient or separating-functional
    certificate.  Quantum spaces use the positive-semidefinite test, since
    the full unitary orbit of the sampled rank-one effects generates exactly
    the PSD cone.
    """
    if len(v) != space.dim:
        raise EffectSpaceError(f"vector has {len(v)} coordinates, space has "
                               f"dimension {space.dim}")
    if space.kind == "exact":
        return space.effect_cone.contains([frac(x) for x in v])
    H = space.basis.from_coords(np.asarray(v, dtype=float))
    lo = float(np.linalg.eigvalsh((H + H.conj().T) / 2).min())
    from .lp import LPResult
    return LPResult(lo >= -tol, point=None if lo < -tol else [lo],
                    farkas=None if lo >= -tol else [lo])


# ---------------------------------------------------------------------------
# morphisms, linearized

@dataclass(eq=False)
class LinearMap:
    """A concrete dim_B x dim_A matrix between two effect coordinate systems."""

    matrix: Mat
    source_space: OrderUnitSpace
    target_space: OrderUnitSpace
    witnesses: list[dict] = field(default_factory=list)
    positive: Optional[bool] = None     # set only after a cone-level check

    def apply(self, v: Vec) -> Vec:
        return mat_vec(self.matrix, list(v))


def linearize_morphism(f: Morphism, E_A: Optional[OrderUnitSpace] = None,
                       E_B: Optional[OrderUnitSpace] = None) -> LinearMap:
    """The linear extension of x-effect -> image-outcome-effect.

    Defined on a maximal independent family of source effects, then certified
    on every remaining outcome: the matrix must send each source outcome
    vector to the outcome vector of its image, exactly.  Raises with the
    violating outcome when the assignment has no consistent linear extension.
    """
    A = E_A or build_effect_space(f.source)
    B = E_B or build_effect_space(f.target)
    if A.kind != "exact" or B.kind != "exact":
        raise EffectSpaceError("morphism linearization is exact-only")

    src_cols = transpose([list(A.outcome_vectors[x]) for x in f.source.outcomes])
    basis_pos = column_space_basis(src_cols)       # outcome indices framing E(A)
    basis_outcomes = [f.source.outcomes[i] for i in basis_pos]
    C = transpose([list(A.outcome_vectors[x]) for x in basis_outcomes])
    from .linalg import inverse
    C_inv = inverse(C)
    if C_inv is None:
        raise EffectSpaceError("effect vectors of the basis outcomes are singular")
    W = transpose([list(B.outcome_vectors[f.outcome_map[x]])
                   for x in basis_outcomes])
    M = mat_mul(W, C_inv)

    witnesses = []
    for x in f.source.outcomes:
        got = mat_vec(M, list(A.outcome_vectors[x]))
        want = list(B.outcome_vectors[f.outcome_map[x]])
        witnesses.append({"outcome": x, "image": f.outcome_map[x],
                          "consistent": got == want})
        if got != want:
            raise EffectSpaceError(
                f"no consistent linear extension: outcome {x!r} (image "
                f"{f.outcome_map[x]!r}) violates the dependencies fixed by "
                f"basis outcomes {basis_outcomes}")
    return LinearMap(matrix=M, source_space=A, target_space=B,
                     witnesses=witnesses)
