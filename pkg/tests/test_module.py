import itertools

import numpy as np
import pytest

import suite
from frobmod import module as mo
from frobmod.algebra import AlgebraMismatch, Quiver, field_extension, ground_field, lower_triangular, path_algebra, product
from frobmod.bimodule import twist
from frobmod.exactla import PrimeField, Subspace

F5 = suite.F5


@pytest.fixture(scope="module")
def lt2():
    return lower_triangular(F5, 2)


@pytest.fixture(scope="module")
def a3():
    return suite.linear_quiver(F5, 3)


def brute_hom_dim(m, n):
    """Count intertwiners by enumeration; returns log_p of the count."""
    fld = m.field
    count = 0
    for entries in itertools.product(range(fld.p), repeat=m.dim * n.dim):
        f = np.array(entries, dtype=np.int64).reshape(m.dim, n.dim)
        if mo.ModuleHom(m, n, f).is_valid():
            count += 1
    k = round(np.log(count) / np.log(fld.p))
    assert fld.p ** k == count
    return k


def test_regular_module_validates(lt2):
    assert mo.regular_module(lt2).validate().ok
    assert mo.zero_module(lt2).validate().ok


def test_perturbed_action_is_reported(lt2):
    reg = mo.regular_module(lt2)
    act = reg.action.copy()
    act[1, 0, 2] = (act[1, 0, 2] + 1) % 5
    rep = mo.Representation(lt2, act).validate()
    assert not rep.ok
    assert rep.failures[0][0] == "structure constants"
    i, j = rep.failures[0][1]
    lhs = F5.matmul(act[i], act[j])
    rhs = F5.combine(lt2.mul(lt2.basis_vector(i), lt2.basis_vector(j)), act)
    assert not np.array_equal(lhs, rhs)


def test_catalog_lower_triangular(lt2):
    cat = mo.standard_catalog(lt2)
    assert [s.dim for s in cat.simples] == [1, 1]
    assert [p.dim for p in cat.projectives] == [1, 2]
    assert [e.dim for e in cat.injectives] == [2, 1]
    assert mo.verify_catalog(cat).ok


def test_catalog_field_and_product():
    k = ground_field(F5)
    cat = mo.standard_catalog(k)
    assert cat.size == 1 and cat.simples[0].dim == cat.projectives[0].dim == cat.injectives[0].dim == 1
    kk = product(k, k)
    cat = mo.standard_catalog(kk)
    assert [e.dim for e in cat.injectives] == [1, 1]
    for s, e in zip(cat.simples, cat.injectives):
        assert mo.is_isomorphic(s, e)


def test_hom_dims_against_enumeration(lt2):
    cat = mo.standard_catalog(lt2)
    s1, s2 = cat.simples
    e1 = cat.injectives[0]
    assert mo.hom_space(s1, e1).shape[0] == 1 == brute_hom_dim(s1, e1)
    assert mo.hom_space(s1, s2).shape[0] == 0 == brute_hom_dim(s1, s2)
    assert mo.hom_space(e1, e1).shape[0] == brute_hom_dim(e1, e1)
    p2 = cat.projectives[1]
    assert mo.hom_space(p2, e1).shape[0] == brute_hom_dim(p2, e1)


def test_hom_from_regular_is_yoneda(a3):
    reg = mo.regular_module(a3)
    cat = mo.standard_catalog(a3)
    for m in cat.simples + cat.projectives + cat.injectives:
        assert mo.hom_space(reg, m).shape[0] == m.dim


def test_hom_space_algebra_mismatch(lt2, a3):
    with pytest.raises(AlgebraMismatch):
        mo.hom_space(mo.regular_module(lt2), mo.regular_module(a3))


def test_structure_series_injective(lt2):
    e1 = mo.standard_catalog(lt2).injectives[0]
    ss = mo.structure_series(e1)
    assert ss.factors.tolist() == [1, 1]
    assert ss.socle_layers[0].tolist() == [1, 0]
    assert ss.loewy_length == 2


def test_structure_series_semisimple(lt2):
    cat = mo.standard_catalog(lt2)
    ss = mo.structure_series(cat.simple_sum([1, 1]))
    assert ss.loewy_length == 1


def test_regular_factors_by_dimension_bookkeeping(a3):
    cat = mo.standard_catalog(a3)
    factors = mo.composition_factors(mo.regular_module(a3))
    # each P_i contributes one factor S_j per path from i to j
    expected = np.zeros(3, dtype=np.int64)
    for p in cat.projectives:
        expected += mo.composition_factors(p)
    assert factors.tolist() == expected.tolist()
    assert int(factors.sum()) == a3.dim


def test_injective_hull_of_simple(lt2):
    cat = mo.standard_catalog(lt2)
    hull = mo.injective_hull(cat.simples[0])
    assert hull.multiplicities.tolist() == [1, 0]
    assert hull.hull.dim == 2 and hull.embed.is_valid() and hull.embed.rank() == 1


def test_injective_hull_of_injective_is_itself(lt2):
    e1 = mo.standard_catalog(lt2).injectives[0]
    hull = mo.injective_hull(e1)
    assert hull.hull.dim == e1.dim and F5.is_invertible(hull.embed.matrix)


def test_injective_hull_of_projective(a3):
    p2 = mo.standard_catalog(a3).projectives[1]
    hull = mo.injective_hull(p2)
    assert hull.embed.is_valid() and hull.embed.rank() == p2.dim


def test_hull_is_essential(a3):
    """Every simple submodule of the hull meets the image of the embedded module."""
    cat = mo.standard_catalog(a3)
    for m in cat.projectives + cat.simples:
        hull = mo.injective_hull(m)
        img = Subspace.of(F5, hull.embed.matrix, hull.hull.dim)
        assert all(img.contains(v) for v in mo.socle_basis(hull.hull))


def test_injective_decompose(lt2):
    cat = mo.standard_catalog(lt2)
    e = mo.direct_sum([cat.injectives[0], cat.injectives[0], cat.injectives[1]])
    dec = mo.injective_decompose(e)
    assert dec.multiplicities.tolist() == [2, 1]
    assert dec.iso.is_valid() and F5.is_invertible(dec.iso.matrix)
    with pytest.raises(mo.NotInjective):
        mo.injective_decompose(cat.projectives[0])


@pytest.mark.parametrize("mults", [(1, 0), (0, 3), (2, 1), (1, 2)])
def test_injective_decompose_recovers_construction(mults):
    a = path_algebra(F5, Quiver(2, ((0, 1, "a"),)))
    cat = mo.standard_catalog(a)
    e = cat.injective_sum(mults)
    assert mo.injective_decompose(e).multiplicities.tolist() == list(mults)


def test_non_split_simple_multiplicity():
    big = field_extension(PrimeField(7), 2, [-3, 0])
    cat = mo.standard_catalog(big)
    assert cat.end_dims == [2]
    e = cat.injective_sum([3])
    assert mo.injective_decompose(e).multiplicities.tolist() == [3]


def test_iso_test_cases(lt2):
    cat = mo.standard_catalog(lt2)
    cert = mo.iso_test(cat.injectives[0], cat.injectives[0])
    assert cert.is_valid() and F5.is_invertible(cert.matrix)
    with pytest.raises(mo.NotIsomorphic):
        mo.iso_test(cat.simples[0], cat.simples[1])


def test_iso_test_twisted_regular_as_right_modules():
    big, frob = suite.f49()
    t = twist(big, frob)
    reg = mo.regular_module(big)
    cert = mo.iso_test(t.right_module, reg)
    assert cert.is_valid() and PrimeField(7).is_invertible(cert.matrix)


def test_is_projective_cases(lt2):
    cat = mo.standard_catalog(lt2)
    split = mo.is_projective(cat.projectives[1])
    assert np.array_equal(F5.matmul(split.section, split.cover), np.eye(2))
    with pytest.raises(mo.NotProjective):
        mo.is_projective(cat.simples[1])
    mo.is_projective(mo.regular_module(lt2))


def test_torsion_submodule(lt2):
    cat = mo.standard_catalog(lt2)
    e1 = cat.injectives[0]
    sub, inc = mo.torsion_submodule(e1, [0])
    assert sub.dim == 1 and mo.is_isomorphic(sub, cat.simples[0])
    whole, _ = mo.torsion_submodule(e1, [0, 1])
    assert whole.dim == e1.dim
    zero, _ = mo.torsion_submodule(e1, [])
    assert zero.dim == 0


def test_torsion_properties(a3):
    cat = mo.standard_catalog(a3)
    mods = cat.simples + cat.projectives + cat.injectives + [mo.regular_module(a3)]
    for r in range(4):
        for killed in itertools.combinations(range(3), r):
            for m in mods:
                t, inc = mo.torsion_submodule(m, killed)
                assert mo.factor_support(t) <= set(killed)
                again, _ = mo.torsion_submodule(t, killed)
                assert again.dim == t.dim
                q, _, _ = mo.quotient(m, inc)
                soc_q = mo.socle_multiplicities(q) if q.dim else np.zeros(3, dtype=np.int64)
                assert all(soc_q[k] == 0 for k in killed)


def test_dimension_sums():
    for a in (lower_triangular(F5, 3), suite.linear_quiver(F5, 4), suite.twisted_triangular()[0]):
        cat = mo.standard_catalog(a)
        assert sum(p.dim for p in cat.projectives) == sum(e.dim for e in cat.injectives) == a.dim


def test_composition_factors_additive_on_sequences(a3):
    cat = mo.standard_catalog(a3)
    for m in cat.projectives + cat.injectives:
        rad = mo.radical_basis(m)
        sub, _ = mo.submodule(m, rad) if rad.shape[0] else (mo.zero_module(a3), None)
        q, _, _ = mo.quotient(m, rad)
        total = mo.composition_factors(sub) + mo.composition_factors(q) if sub.dim else mo.composition_factors(q)
        assert total.tolist() == mo.composition_factors(m).tolist()
