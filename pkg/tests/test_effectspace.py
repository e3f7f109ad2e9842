from fractions import Fraction as F

import numpy as np
import pytest

from kvwb.builtins import classical, get_builtin, squit
from kvwb.effectspace import (EffectSpaceError, build_effect_space,
                              cone_membership, linearize_morphism)
from kvwb.linalg import mat_vec
from kvwb.models import image_model
from tests.test_models import paired_classical4


def test_classical_space_is_the_delta_basis():
    m = classical(3)
    E = build_effect_space(m)
    assert E.kind == "exact" and E.dim == 3
    for i, x in enumerate(m.outcomes):
        assert E.outcome_vectors[x] == [F(int(i == j)) for j in range(3)]
    assert E.u == [F(1)] * 3


def test_squit_space_collapses_one_dimension():
    E = build_effect_space(squit())
    assert E.dim == 3
    # unit = x0 + x1 = y0 + y1 in coordinates
    vx = [a + b for a, b in zip(E.outcome_vectors["x0"], E.outcome_vectors["x1"])]
    vy = [a + b for a, b in zip(E.outcome_vectors["y0"], E.outcome_vectors["y1"])]
    assert vx == vy == E.u


def test_effect_actions_permute_outcome_vectors():
    m = squit()
    E = build_effect_space(m)
    for g in m.group.generators:
        M = E.effect_action(g)
        for x in m.outcomes:
            gx = m.outcomes[g[m.testspace.index(x)]]
            assert mat_vec(M, E.outcome_vectors[x]) == E.outcome_vectors[gx]


def test_cone_membership_certificates():
    E = build_effect_space(classical(2))
    assert cone_membership(E, [F(1), F(1)]).feasible          # the unit
    res = cone_membership(E, [F(-1), F(0)])
    assert not res.feasible


def test_quantum_space_dims():
    E2 = build_effect_space(get_builtin("qubit:complex"))
    assert E2.kind == "float" and E2.dim == 4 and E2.span_dim == 4
    E3 = build_effect_space(get_builtin("qubit:real"))
    assert E3.dim == 3
    # the coordinate basis is Hilbert-Schmidt orthonormal
    mats = E2.basis.mats
    G = np.array([[np.trace(a @ b).real for b in mats] for a in mats])
    assert np.abs(G - np.eye(4)).max() < 1e-12


def test_forward_linearization_of_the_pairwise_collapse():
    m4 = paired_classical4()
    _, mor = image_model(m4, {"a": "c0", "b": "c0", "c": "c1", "d": "c1"})
    L = linearize_morphism(mor)
    assert L.matrix == [[F(1), F(1), F(0), F(0)], [F(0), F(0), F(1), F(1)]]


def test_linearization_is_exact_only():
    mq = get_builtin("qubit:real")
    # quantum models cannot be the source of an exact linearization
    from kvwb.models import Morphism
    f = Morphism(mq, mq, {x: x for x in mq.outcomes}, tuple())
    with pytest.raises(EffectSpaceError):
        linearize_morphism(f)
