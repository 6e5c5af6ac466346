import numpy as np
import pytest

import suite
from frobmod import bimodule as bm
from frobmod import frobanalysis as fa
from frobmod import module as mo
from frobmod import spectrum as sp
from frobmod.algebra import from_table, ground_field, lower_triangular, product

F5, F7 = suite.F5, suite.F7


@pytest.fixture(scope="module")
def tri():
    return suite.triangular()


@pytest.fixture(scope="module")
def twtri():
    r, t, big = suite.twisted_triangular()
    return r, bm.frobenius_check(t), big


# -- ranks -------------------------------------------------------------------------------------


def test_triangular_ranks(tri):
    r, k, m = tri
    rk = fa.rank_report(bm.tensor_pair(m))
    assert rk.rrk.tolist() == [[1], [1]]
    assert rk.lrk.tolist() == [[0, 1]]
    assert rk.rho.tolist() == [1, 1] and rk.lam.tolist() == [1]
    assert rk.supp_F == {1} and rk.supp_G == {0}
    assert rk.f == {1: 0}
    assert rk.additivity.holds and rk.reciprocity.holds and rk.kernels.holds


def test_regular_ranks_are_identity():
    for a in (ground_field(F5), lower_triangular(F5, 3), suite.linear_quiver(F5, 3)):
        rk = fa.rank_report(bm.frobenius_check(bm.regular(a)))
        n = a.n_points
        assert np.array_equal(rk.rrk, np.eye(n)) and np.array_equal(rk.lrk, np.eye(n))
        assert rk.n_y == {y: 1 for y in range(n)}


def test_delta_ranks_against_direct_tensor():
    k, kk, d = suite.delta()
    cert = bm.frobenius_check(d)
    rk = fa.rank_report(cert)
    assert rk.rrk.tolist() == [[1, 1]]
    assert rk.lrk.tolist() == [[1], [1]]
    # F(G(E(y))) = F5 (x) D = F5^2 with both points: one copy of each injective
    assert rk.n_y == {0: 2, 1: 2}
    assert not any(rk.fg_isotypic.values())
    assert rk.decompositions[("FG", 0)].multiplicities.tolist() == [1, 1]
    # the same module from the tensor product directly
    e = mo.standard_catalog(kk).injectives[0]
    g = bm.tensor(e, bm.dual(d, "right").bimodule).result
    fg = bm.tensor(g, d).result
    assert mo.injective_decompose(fg).multiplicities.tolist() == [1, 1]


@pytest.mark.parametrize("name,m", suite.right_localizing_suite()[:10])
def test_fg_of_injective_is_isotypic(name, m):
    rk = fa.rank_report(bm.frobenius_check(m))
    for y in rk.supp_G:
        assert rk.fg_isotypic[y] and rk.n_y[y] >= 1
    assert rk.additivity.holds and rk.kernels.holds


# -- classification ------------------------------------------------------------------------------


def test_triangular_classification(tri):
    cls = fa.classify(bm.tensor_pair(tri[2]))
    assert not cls.faithful_F and cls.faithful_F.witness == {"simple": 0}
    assert cls.faithful_G
    assert cls.right_localizing
    assert cls.localizing.holds is None
    assert all(cls.cross_checks.values())


def test_delta_one_sided():
    cls = fa.classify(bm.frobenius_check(suite.delta()[2]))
    assert cls.left_localizing and not cls.right_localizing
    assert cls.right_localizing.witness["simple"] in (0, 1)
    assert all(cls.cross_checks.values())


def test_twisted_triangular_verdicts(twtri):
    _, cert, _ = twtri
    cls = fa.classify(cert)
    assert cls.centralizing and cls.localizing
    assert not cls.locally_centralizing
    assert cls.locally_centralizing.witness["surviving"] == [1]
    assert all(cls.cross_checks.values())


@pytest.mark.parametrize("include_zero", [False, True])
def test_regular_all_predicates_hold(include_zero):
    for a in (lower_triangular(F5, 2), suite.linear_quiver(F5, 3), suite.f49()[0]):
        cls = fa.classify(bm.frobenius_check(bm.regular(a)), include_zero)
        for name in fa.ClassificationReport.PREDICATES:
            assert getattr(cls, name).holds, name


def test_zero_subcategory_readings_differ_for_zero_bimodule():
    # over a single point the only nonzero torsion class is everything, so only T = 0 sees the kernel
    k = ground_field(F5)
    cls = fa.classify(bm.tensor_pair(suite.zero_bimodule(k, k)), include_zero_subcategory=True)
    readings = cls.localizing_readings
    assert not readings["with zero subcategory"]
    assert readings["without zero subcategory"]
    assert not cls.localizing
    assert fa.classify(bm.tensor_pair(suite.zero_bimodule(k, k))).localizing


def test_swap_is_frobenius_not_localizing():
    k = ground_field(F5)
    kk = bm.product_of([k, k])
    cls = fa.classify(bm.frobenius_check(bm.twist(kk, suite.swap_factors(1))))
    assert cls.faithful_F and cls.faithful_G
    # FG is the identity, so both one-sided tests pass; the points are exchanged
    assert cls.right_localizing and cls.left_localizing
    assert not cls.localizing and cls.localizing.witness["functor"] == "F"
    assert cls.centralizing.holds is False


def commutative_instances():
    k = ground_field(F5)
    kk = bm.product_of([k, k])
    dual_numbers = from_table(F5, ["1", "x"], {(0, 0): [1, 0], (0, 1): [0, 1], (1, 0): [0, 1]}, [1, 0], [[1, 0]])
    big, frob = suite.f49()
    out = [bm.regular(k), bm.regular(kk), bm.twist(kk, suite.swap_factors(1)), bm.regular(dual_numbers),
           bm.twist(dual_numbers, np.array([[1, 0], [0, 3]])), bm.regular(big), bm.twist(big, frob)]
    k7 = ground_field(F7)
    kb = bm.product_of([k7, big])
    phi = np.eye(3, dtype=np.int64)
    phi[1:, 1:] = frob
    out.append(bm.twist(kb, phi))
    return out


def test_centralizing_implies_localizing_over_commutative():
    seen = set()
    for m in commutative_instances():
        assert m.left_algebra.is_commutative()
        cls = fa.classify(bm.frobenius_check(m))
        seen.add(bool(cls.centralizing))
        if cls.centralizing:
            assert cls.localizing
    assert seen == {True, False}


def test_centralizing_passes_to_the_dual():
    for m in commutative_instances() + [suite.twisted_triangular()[1]]:
        cert = bm.frobenius_check(m)
        cls = fa.classify(cert)
        dual_cls = fa.classify(bm.frobenius_check(cert.dual_bimodule))
        if cls.centralizing:
            assert cls.cross_checks["dual centralizing"]
            assert dual_cls.centralizing


# -- support map, equivalence ---------------------------------------------------------------------


def test_support_map_examples(tri):
    sm = fa.support_map(bm.tensor_pair(tri[2]))
    assert sm.f == {1: 0} and sm.surjective and sm.injective
    reg = fa.support_map(bm.frobenius_check(bm.regular(lower_triangular(F5, 3))))
    assert reg.f == {0: 0, 1: 1, 2: 2} and reg.homeomorphism
    morita = fa.support_map(bm.frobenius_check(suite.morita()[2]))
    assert morita.f == {0: 0} and morita.homeomorphism and morita.consistent


def test_support_map_rejects_delta():
    with pytest.raises(fa.NotRightLocalizing):
        fa.support_map(bm.frobenius_check(suite.delta()[2]))


def test_equivalence_examples(tri):
    v = fa.equivalence_test(bm.tensor_pair(tri[2]))
    assert not v and any("F not faithful" in r for r in v.reasons)
    assert fa.equivalence_test(bm.frobenius_check(bm.regular(lower_triangular(F5, 2))))
    v = fa.equivalence_test(bm.frobenius_check(suite.morita()[2]))
    assert v and len(v.unit_isomorphisms) == 1 and len(v.counit_isomorphisms) == 1
    assert not fa.equivalence_test(bm.frobenius_check(suite.delta()[2]))


# -- restriction ---------------------------------------------------------------------------------------


def test_delta_quiver_restriction_not_frobenius():
    q, qq, dq = suite.delta_quiver()
    cert = bm.frobenius_check(dq)
    u = sp.weakly_open(sp.localizing_from(qq, killed=[2]))
    res = fa.restrict(cert, u)
    assert not res.condition and not res.frobenius
    assert res.frobenius.witness["reason"] == "NotRightProjective"
    # independent check: the pushforward out of the corner is not exact
    assert not u.checks["pushforward exact"]
    w = sp.weakly_open(sp.localizing_from(qq, killed=[0, 2]))
    res = fa.restrict(cert, w)
    assert res.condition and res.frobenius and res.projection_formulas


def test_restrict_regular_gives_regular_corner():
    a = suite.linear_quiver(F5, 3)
    cert = bm.frobenius_check(bm.regular(a))
    for t in sp.all_localizing(a):
        u = sp.weakly_open(t)
        res = fa.restrict(cert, u)
        assert res.frobenius
        if not u.is_empty:
            assert bm.bimodules_isomorphic(res.bimodule, bm.regular(u.corner.algebra))


def test_twisted_triangular_restriction(twtri):
    r, cert, big = twtri
    u = sp.weakly_open(sp.localizing_from(r, killed=[0]))
    res = fa.restrict(cert, u)
    assert res.frobenius and res.bimodule.dim == 2
    assert not fa.classify(res.certificate).centralizing


def test_intersection_check(tri):
    pair = bm.tensor_pair(tri[2])
    assert fa.intersection_check(pair, [], [0])


# -- partitions and decompositions -------------------------------------------------------------------


def test_partition_single_block_for_double_regular():
    k = ground_field(F5)
    reg = bm.regular(k)
    m = bm.bimodule_sum([reg, reg])
    rep = fa.constant_rank_partition(bm.frobenius_check(m))
    assert rep.ranks == (2,) and len(rep.blocks) == 1


def test_partition_block_diagonal():
    k = ground_field(F5)
    kk = bm.product_of([k, k])
    reg = bm.regular(k)
    m = bm.external_sum({(0, 0): reg, (1, 1): bm.bimodule_sum([reg, reg])}, [k, k], [k, k], kk, kk)
    rep = fa.constant_rank_partition(bm.frobenius_check(m))
    assert rep.ranks == (1, 2)
    assert rep.disjoint and rep.cover and rep.source_disjoint and rep.source_cover
    assert all(b.constant_rank and b.envelope_closed for b in rep.blocks)
    assert rep.decomposition and rep.decomposition.witness["dims"] == [1, 2]


def test_partition_twisted_triangular(twtri):
    rep = fa.constant_rank_partition(twtri[1])
    assert rep.ranks == (1,) and len(rep.blocks) == 1


def test_partition_needs_faithful(tri):
    with pytest.raises(fa.NotFaithful):
        fa.constant_rank_partition(bm.tensor_pair(tri[2]))


def test_decomposition_fails_for_lower_triangular():
    lt2 = lower_triangular(F5, 2)
    parts = [sp.localizing_from(lt2, killed=[0]), sp.localizing_from(lt2, killed=[1])]
    v = fa.category_decomposition_check(lt2, parts)
    assert not v
    assert v.witness["module"] == "E1" and v.witness["factors"] == [0, 1] and v.witness["indecomposable"]
    assert v.witness["blocks"] == [0, 1]


def test_decomposition_of_products():
    k = ground_field(F5)
    kk = product(k, k)
    v = fa.category_decomposition_check(kk, [sp.localizing_from(kk, killed=[0]),
                                             sp.localizing_from(kk, killed=[1])])
    assert v and F5.is_invertible(v.isomorphism)
    a = bm.product_of([suite.linear_quiver(F5, 2), k])
    # the connected piece 1 -> 2 does not split further
    parts = [sp.localizing_from(a, killed=[j for j in range(3) if j != i]) for i in range(3)]
    v = fa.category_decomposition_check(a, parts)
    assert not v and v.envelope_closed == [False, True, True] and v.witness["factors"] == [0, 1]
    parts = [sp.localizing_from(a, killed=[2]), sp.localizing_from(a, killed=[0, 1])]
    assert fa.category_decomposition_check(a, parts)


def test_decomposition_hypotheses():
    lt2 = lower_triangular(F5, 2)
    with pytest.raises(fa.NotDisjoint):
        fa.category_decomposition_check(lt2, [sp.localizing_from(lt2, killed=[]),
                                              sp.localizing_from(lt2, killed=[0])])
    with pytest.raises(fa.NotCover):
        fa.category_decomposition_check(lt2, [sp.localizing_from(lt2, killed=[0, 1])])


# -- tripartition -------------------------------------------------------------------------------------


def test_tripartition_on_product():
    k = ground_field(F5)
    kk = product(k, k)
    cat = mo.standard_catalog(kk)
    e = cat.injective_sum([1, 1])
    t1, t2 = sp.localizing_from(kk, killed=[1]), sp.localizing_from(kk, killed=[0])
    tri = fa.injective_tripartition(e, t1, t2)
    assert mo.is_isomorphic(tri.first, cat.injectives[0])
    assert mo.is_isomorphic(tri.second, cat.injectives[1])
    assert tri.rest.dim == 0
    assert F5.is_invertible(tri.isomorphism.matrix) and tri.isomorphism.is_valid()


def test_tripartition_closure_failure():
    a = suite.linear_quiver(F5, 2)
    e = mo.regular_module(a)
    hull = mo.injective_hull(e).hull
    with pytest.raises(fa.HypothesisFailure) as info:
        fa.injective_tripartition(hull, sp.localizing_from(a, killed=[0]), sp.localizing_from(a, killed=[1]))
    assert info.value.witness["factor"] in (0, 1)


def test_tripartition_three_pieces():
    k = ground_field(F5)
    a = bm.product_of([k, k, k])
    cat = mo.standard_catalog(a)
    e = cat.injective_sum([2, 1, 3])
    tri = fa.injective_tripartition(e, sp.localizing_from(a, killed=[0]), sp.localizing_from(a, killed=[1]))
    assert (tri.first.dim, tri.second.dim, tri.rest.dim) == (1, 2, 3)
    assert tri.multiplicities == ((0, 1, 0), (2, 0, 0), (0, 0, 3))
    assert tri.isomorphism.is_valid() and F5.is_invertible(tri.isomorphism.matrix)


# -- gluing -------------------------------------------------------------------------------------------


def cover(a, k1, k2):
    return (sp.weakly_open(sp.localizing_from(a, killed=k1)), sp.weakly_open(sp.localizing_from(a, killed=k2)))


def test_glue_round_trip_product():
    k = ground_field(F5)
    kk = bm.product_of([k, k])
    reg = bm.regular(k)
    m = bm.external_sum({(0, 0): reg, (1, 1): bm.bimodule_sum([reg, reg])}, [k, k], [k, k], kk, kk)
    cert = bm.frobenius_check(m)
    v1, v2 = cover(kk, [0], [1])
    out = fa.glue(fa.glue_task_from(cert, v1, v2, v1, v2))
    assert out.restrictions_agree == (True, True) and out.right_localizing and out.functoriality
    assert bm.bimodules_isomorphic(out.bimodule, m)


def test_glue_round_trip_v_quiver():
    from frobmod.algebra import Quiver, path_algebra
    a = path_algebra(F5, Quiver(3, ((0, 1, "a"), (2, 1, "b"))))
    cert = bm.frobenius_check(bm.regular(a))
    v1, v2 = cover(a, [0], [2])
    assert sp.closed_under_envelopes(v1.torsion)[0] and sp.closed_under_envelopes(v2.torsion)[0]
    out = fa.glue(fa.glue_task_from(cert, v1, v2, v1, v2))
    assert bm.bimodules_isomorphic(out.bimodule, bm.regular(a))
    assert out.restrictions_agree == (True, True)


def test_glue_obstruction():
    lt2 = lower_triangular(F5, 2)
    v1, v2 = cover(lt2, [1], [0])
    m1 = bm.regular(v1.corner.algebra)
    m2 = suite.zero_bimodule(v2.corner.algebra, v2.corner.algebra)
    task = fa.GlueTask(lt2, lt2, v1, v2, v1, v2, m1, m2)
    with pytest.raises(fa.HypothesisFailure, match="T2 not closed under injective envelopes") as info:
        fa.glue(task)
    assert info.value.witness == {"class": "T2", "envelope of": 0, "factor": 1}


def test_glue_zero_inputs():
    k = ground_field(F5)
    kk = bm.product_of([k, k])
    v1, v2 = cover(kk, [0], [1])
    z1 = suite.zero_bimodule(v1.corner.algebra, v1.corner.algebra)
    z2 = suite.zero_bimodule(v2.corner.algebra, v2.corner.algebra)
    out = fa.glue(fa.GlueTask(kk, kk, v1, v2, v1, v2, z1, z2))
    assert out.bimodule.dim == 0


# -- duality of morphisms ------------------------------------------------------------------------------


@pytest.mark.parametrize("direction", ["star", "dagger"])
def test_dualize_identity_and_zero(direction):
    a = lower_triangular(F5, 2)
    reg = bm.regular(a)
    cert = bm.frobenius_check(reg)
    ident = bm.BimoduleHom(reg, reg, np.eye(3, dtype=np.int64))
    out = fa.dualize_morphism(ident, direction, cert, cert)
    assert all(out.laws.values())
    assert np.array_equal(out.dual_hom.matrix, np.eye(3))
    zero = bm.BimoduleHom(reg, reg, np.zeros((3, 3), dtype=np.int64))
    out = fa.dualize_morphism(zero, direction, cert, cert)
    assert all(out.laws.values()) and not out.dual_hom.matrix.any()
    assert not any(c.any() for c in out.components.values())


def test_dualize_twist_random_draws():
    big, frob = suite.f49()
    t = bm.twist(big, frob)
    cert = bm.frobenius_check(t)
    rng = np.random.default_rng(7)
    for _ in range(10):
        u = fa.random_bimodule_hom(t, t, rng)
        v = fa.random_bimodule_hom(t, t, rng)
        for direction in ("star", "dagger"):
            out = fa.dualize_morphism(u, direction, cert, cert)
            assert all(out.laws.values())
            assert fa.composition_law(u, v, [cert, cert, cert], direction)


def test_dual_map_is_contravariant():
    _, _, p = suite.morita()
    cert = bm.frobenius_check(p)
    rng = np.random.default_rng(3)
    u, v = fa.random_bimodule_hom(p, p, rng), fa.random_bimodule_hom(p, p, rng)
    lhs = fa.dual_map(u.then(v), cert, cert).matrix
    rhs = F5.matmul(fa.dual_map(v, cert, cert).matrix, fa.dual_map(u, cert, cert).matrix)
    assert np.array_equal(lhs, rhs)
