import itertools

import numpy as np
import pytest

import suite
from frobmod import bimodule as bm
from frobmod import module as mo
from frobmod import spectrum as sp
from frobmod.algebra import AlgebraMismatch, ground_field, is_isomorphism, lower_triangular, product

F5 = suite.F5


@pytest.fixture(scope="module")
def lt2():
    return lower_triangular(F5, 2)


def test_localizing_from_torsionfree(lt2):
    t = sp.localizing_from(lt2, torsionfree=[1])
    assert t.killed == {0}
    assert sp.localizing_from(lt2, torsionfree=[0, 1]).killed == frozenset()


def test_localizing_from_kernel():
    r, k, m = suite.triangular()
    t = sp.localizing_from(r, kernel_of=bm.tensor_pair(m))
    assert t.killed == {0}


def test_localizing_from_needs_one_description(lt2):
    with pytest.raises(ValueError):
        sp.localizing_from(lt2)
    with pytest.raises(IndexError):
        sp.localizing_from(lt2, killed=[2])


def test_membership_by_composition_factors(lt2):
    cat = mo.standard_catalog(lt2)
    t = sp.localizing_from(lt2, killed=[0])
    assert t.contains(cat.simples[0]) and not t.contains(cat.injectives[0])


def test_closed_under_envelopes(lt2):
    assert sp.closed_under_envelopes(sp.localizing_from(lt2, killed=[1])) == (True, None)
    assert sp.closed_under_envelopes(sp.localizing_from(lt2, killed=[0])) == (False, (0, 1))
    assert sp.closed_under_envelopes(sp.localizing_from(lt2, killed=[])) == (True, None)


def test_lattice_examples(lt2):
    t1, t2 = sp.localizing_from(lt2, killed=[0]), sp.localizing_from(lt2, killed=[1])
    rep = sp.lattice(t1, t2)
    assert rep.is_cover and rep.is_disjoint
    same = sp.lattice(t1, t1)
    assert same.open_intersection.killed == same.open_union.killed == t1.killed
    t3 = sp.localizing_from(lt2, killed=[0, 1])
    assert not sp.lattice(t1, t3).is_cover


def test_lattice_set_laws():
    a = suite.linear_quiver(F5, 4)
    rng = np.random.default_rng(4)
    for _ in range(30):
        ks = [sp.localizing_from(a, killed=[i for i in range(4) if rng.random() < 0.5]) for _ in range(3)]
        x, y, z = ks
        assert sp.lattice(x, y).open_intersection == sp.lattice(y, x).open_intersection
        assert sp.lattice(x, y).open_union == sp.lattice(y, x).open_union
        xy_z = sp.lattice(sp.lattice(x, y).open_intersection, z).open_intersection
        x_yz = sp.lattice(x, sp.lattice(y, z).open_intersection).open_intersection
        assert xy_z == x_yz
        assert sp.lattice(x, x).open_union == x


def test_lattice_mismatch(lt2):
    other = lower_triangular(F5, 2)
    with pytest.raises(AlgebraMismatch):
        sp.lattice(sp.localizing_from(lt2, killed=[]), sp.localizing_from(other, killed=[]))


def test_weakly_open_twisted_triangular_corner_is_f49():
    r, _, big = suite.twisted_triangular()
    u = sp.weakly_open(sp.localizing_from(r, killed=[0]))
    c = u.corner.algebra
    assert c.dim == 2 and c.is_commutative() and c.n_points == 1
    # an algebra isomorphism onto F49 = F7[t]/(t^2 - 3): send 1 -> 1 and a square root of 3 to t
    fld = r.field
    found = False
    for x in itertools.product(range(7), repeat=2):
        root = np.array(x)
        frame = np.array([c.unit, root])
        if np.array_equal(c.mul(root, root), fld.scale(c.unit, 3)) and fld.is_invertible(frame):
            found = is_isomorphism(c, big, fld.invert(frame))
            break
    assert found
    assert all(u.checks.values())


def test_weakly_open_trivial(lt2):
    u = sp.weakly_open(sp.localizing_from(lt2, killed=[]))
    assert u.corner.algebra is lt2
    reg = mo.regular_module(lt2)
    assert mo.is_isomorphic(u.restrict(reg), reg)


def test_weakly_open_lower_triangular(lt2):
    u = sp.weakly_open(sp.localizing_from(lt2, killed=[1]))
    assert u.corner.algebra.dim == 1
    assert u.checks == {"kernel matches killed set": True, "restrict after pushforward is identity": True,
                        "pushforward exact": True}
    u1 = sp.weakly_open(sp.localizing_from(lt2, killed=[0]))
    assert u1.checks["kernel matches killed set"]


def test_weakly_open_empty(lt2):
    u = sp.weakly_open(sp.localizing_from(lt2, killed=[0, 1]))
    assert u.is_empty and u.corner.algebra.dim == 0


def test_restriction_kernel_is_torsion_class():
    a = suite.linear_quiver(F5, 3)
    cat = mo.standard_catalog(a)
    mods = cat.simples + cat.projectives + cat.injectives
    for t in sp.all_localizing(a):
        if not t.surviving:
            continue
        u = sp.weakly_open(t)
        assert all(u.checks.values())
        assert sp.restriction_matches_corner_injectives(u)
        for m in mods:
            assert (u.restrict(m).dim == 0) == t.contains(m)


def test_extend_and_pushforward_adjoint_units():
    a = suite.linear_quiver(F5, 3)
    u = sp.weakly_open(sp.localizing_from(a, killed=[1]))
    for s in mo.standard_catalog(u.corner.algebra).simples:
        assert mo.is_isomorphic(u.restrict(u.extend(s)), s)
        assert mo.is_isomorphic(u.restrict(u.pushforward(s)), s)


def test_torsion_functor_on_class_members():
    a = suite.linear_quiver(F5, 3)
    cat = mo.standard_catalog(a)
    for t in sp.all_localizing(a):
        for m in cat.simples + cat.injectives + cat.projectives:
            sub, _ = t.torsion(m)
            if t.contains(m):
                assert sub.dim == m.dim
            if not (sp.support(m) & t.killed):
                assert sub.dim == 0


def test_gabriel_topology():
    k = ground_field(F5)
    rep = sp.gabriel_topology(k)
    assert rep.n_points == 1 and rep.discrete
    lt2 = lower_triangular(F5, 2)
    rep = sp.gabriel_topology(lt2)
    assert rep.discrete and rep.n_points == 2
    e1 = mo.standard_catalog(lt2).injectives[0]
    assert sp.support(e1) == {0, 1}
    assert sp.gabriel_topology(product(k, k)).discrete


def test_locality_report():
    big, _ = suite.f49()
    assert sp.locality_report(big).is_local
    lt2 = lower_triangular(F5, 2)
    rep = sp.locality_report(lt2)
    assert not rep.is_local and rep.is_semilocal and rep.cogenerates
    assert rep.cogenerator.dim == 3
    k = ground_field(F5)
    assert not sp.locality_report(product(k, k)).is_local


def test_point_indices_groups_matrix_idempotents():
    _, m2, _ = suite.morita()
    assert sp.point_indices(m2, [0]) == [0, 1]
