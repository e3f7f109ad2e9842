from fractions import Fraction as F

import numpy as np

from kvwb.cones import (PolyhedralCone, cone, cone_equal, dual_cone,
                        extreme_rays, halfspace_cone_rays, is_order_isomorphism,
                        is_pointed, is_self_dual, is_weakly_self_dual,
                        polytope_hrep)
from kvwb.linalg import dot, identity, mat_vec

ORTHANT3 = cone([[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def rational_rng_cone(rng, d, k):
    gens = []
    for _ in range(k):
        g = [F(int(rng.integers(-6, 7)), int(rng.integers(1, 5))) for _ in range(d)]
        if any(x != 0 for x in g):
            gens.append(g)
    return cone(gens) if gens else cone([[F(1)] + [F(0)] * (d - 1)])


def test_orthant_self_dual_exact():
    rep = is_self_dual(ORTHANT3, identity(3))
    assert rep.self_dual
    assert rep.pairwise_min == 0
    assert not rep.failures


def test_dual_of_orthant_is_orthant():
    D = dual_cone(ORTHANT3, identity(3))
    eq, _ = cone_equal(D, ORTHANT3)
    assert eq


def test_halfspace_enumeration_square_cone():
    # x >= 0, y >= 0, z >= x + y  has four extreme rays
    cons = [[F(1), F(0), F(0)], [F(0), F(1), F(0)], [F(-1), F(-1), F(1)]]
    lin, rays = halfspace_cone_rays(cons, 3)
    assert not lin
    K = PolyhedralCone(tuple(tuple(r) for r in rays))
    for r in rays:
        assert all(dot(c, r) >= 0 for c in cons)
    assert len(extreme_rays(K)) == 3


def test_dual_of_dual_random_suite():
    """100 random rational cones, d <= 5, <= 8 generators: K** == K exactly,
    and membership certificates re-verify by substitution."""
    rng = np.random.default_rng(2024)
    for trial in range(100):
        d = int(rng.integers(2, 6))
        k = int(rng.integers(1, 9))
        K = rational_rng_cone(rng, d, k)
        D = dual_cone(K)
        DD = dual_cone(D)
        eq, detail = cone_equal(DD, K)
        assert eq, (trial, detail)

        inside = [sum(g[i] for g in K.all_generators()) for i in range(d)]
        res = K.contains(inside)
        assert res.feasible
        rec = [sum(c * g[i] for c, g in zip(res.point, K.all_generators()))
               for i in range(d)]
        assert rec == inside

        probe = [F(int(rng.integers(-6, 7))) for _ in range(d)]
        out = K.contains(probe)
        if not out.feasible:
            f = out.farkas
            assert all(dot(f, g) >= 0 for g in K.all_generators())
            assert dot(f, probe) < 0


def test_pointedness():
    assert is_pointed(ORTHANT3)
    line = cone([[1, 0], [-1, 0], [0, 1]])
    assert not is_pointed(line)


def test_polytope_hrep_unit_square():
    verts = [[F(0), F(0)], [F(1), F(0)], [F(0), F(1)], [F(1), F(1)]]
    ineqs, eqs = polytope_hrep(verts)
    assert not eqs
    assert len(ineqs) == 4
    for a, c in ineqs:
        assert all(dot(a, v) + c >= 0 for v in verts)
        assert any(dot(a, v) + c == 0 for v in verts)


def test_pentagonish_cone_not_self_dual():
    # rational points roughly on a regular pentagon, lifted to height 1:
    # the polar pentagon is rotated by pi/5, so identity self-duality fails
    ring = [(F(1), F(0)), (F(3, 10), F(19, 20)), (F(-4, 5), F(3, 5)),
            (F(-4, 5), F(-3, 5)), (F(3, 10), F(-19, 20))]
    K = cone([[x, y, F(1)] for x, y in ring])
    rep = is_self_dual(K, identity(3))
    assert not rep.self_dual
    bad = [f for f in rep.failures if f["kind"] == "dual-ray-outside-cone"]
    assert bad
    ray, f = bad[0]["ray"], bad[0]["separating"]
    assert all(dot(f, g) >= 0 for g in K.all_generators())
    assert dot(f, ray) < 0


def test_weak_self_duality_of_square_cone():
    # cone over the unit square is linearly isomorphic to its dual even
    # though it is not equal to it under this inner product
    sq = cone([[1, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, 1]])
    B = identity(3)
    assert not is_self_dual(sq, B).self_dual
    rep = is_weakly_self_dual(sq, B)
    assert rep.status == "yes"
    T = rep.map
    chk = is_order_isomorphism(T, sq, dual_cone(sq, B))
    assert chk.order_iso


def test_product_with_dual_swap_is_order_iso():
    """K x K* swaps onto its dual: the standard weakly-self-dual example."""
    sq = cone([[1, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, 1]])
    dsq = dual_cone(sq)
    prod_gens = [list(g) + [F(0)] * 3 for g in sq.all_generators()] + \
                [[F(0)] * 3 + list(g) for g in dsq.all_generators()]
    P = cone(prod_gens)
    swap = [[F(0)] * 3 + [F(int(i == j)) for j in range(3)] for i in range(3)] + \
           [[F(int(i == j)) for j in range(3)] + [F(0)] * 3 for i in range(3)]
    chk = is_order_isomorphism(swap, P, dual_cone(P))
    assert chk.order_iso
