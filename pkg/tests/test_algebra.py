import numpy as np
import pytest

from frobmod import algebra as al
from frobmod.algebra import (Algebra, InvalidAlgebra, InvalidIdempotents, Quiver, ReduciblePolynomial, corner,
                             enveloping, field_extension, from_table, ground_field, is_irreducible, is_isomorphism,
                             lower_triangular, matrix_over, opposite, path_algebra, product)
from frobmod.exactla import PrimeField, Subspace

F5 = PrimeField(5)
F7 = PrimeField(7)


def span_equal(fld, a, b):
    sa, sb = Subspace.of(fld, a, a.shape[1]), Subspace.of(fld, b, b.shape[1])
    return sa.dim == sb.dim and all(sa.contains(v) for v in sb.basis)


def test_lower_triangular_2():
    r = lower_triangular(F5, 2)
    assert r.dim == 3
    assert r.labels == ("E11", "E21", "E22")
    assert r.idempotents.tolist() == [[1, 0, 0], [0, 0, 1]]
    assert r.validate().ok
    # E21 * E11 = E21, E22 * E21 = E21, E11 * E21 = 0
    e11, e21, e22 = (r.basis_vector(i) for i in range(3))
    assert np.array_equal(r.mul(e21, e11), e21)
    assert np.array_equal(r.mul(e22, e21), e21)
    assert not r.mul(e11, e21).any()


def test_product_of_fields():
    k = ground_field(F5)
    kk = product(k, k)
    assert kk.dim == 2 and kk.n_idempotents == 2 and kk.n_points == 2
    assert kk.is_commutative()


def test_field_extension_against_polynomial_arithmetic():
    big = field_extension(F7, 2, [-3, 0])
    assert big.dim == 2 and big.is_commutative()
    # (a + b t)(c + d t) = ac + 3bd + (ad + bc) t since t^2 = 3
    rng = np.random.default_rng(0)
    for _ in range(25):
        a, b, c, d = (int(v) for v in rng.integers(0, 7, 4))
        want = [(a * c + 3 * b * d) % 7, (a * d + b * c) % 7]
        assert big.mul(np.array([a, b]), np.array([c, d])).tolist() == want
    assert big.n_points == 1


def test_field_extension_rejects_reducible():
    assert not is_irreducible([-4, 0, 1], 7)          # t^2 - 4 = (t - 2)(t + 2)
    with pytest.raises(ReduciblePolynomial):
        field_extension(F7, 2, [-4, 0])


def test_validate_detects_perturbed_structure_constant():
    r = lower_triangular(F5, 2)
    bad = r.structure.copy()
    bad[1, 0, 1] = 2
    rep = Algebra(F5, bad, r.unit, r.idempotents, r.labels, radical_hint=r.radical).validate()
    axioms = [a for a, _ in rep.failures]
    assert "associativity" in axioms or "right unit" in axioms
    witness = dict(rep.failures).get("associativity")
    if witness is not None:
        i, j, k = witness
        ei, ej, ek = (np.eye(3, dtype=np.int64)[x] for x in (i, j, k))
        c = bad.reshape(9, 3)

        def mul(x, y):
            return np.mod(np.kron(x, y) @ c, 5)
        assert not np.array_equal(mul(mul(ei, ej), ek), mul(ei, mul(ej, ek)))


def test_validate_missing_idempotent():
    r = lower_triangular(F5, 2)
    rep = Algebra(F5, r.structure, r.unit, r.idempotents[:1], r.labels, radical_hint=r.radical).validate()
    assert ("sum != unit", None) in rep.failures
    with pytest.raises(InvalidIdempotents):
        Algebra(F5, r.structure, r.unit, r.idempotents[:1], r.labels, radical_hint=r.radical).ensure_valid()


def test_non_primitive_idempotent_rejected():
    k = ground_field(F5)
    kk = product(k, k)
    with pytest.raises(InvalidIdempotents):
        Algebra(F5, kk.structure, kk.unit, kk.unit.reshape(1, -1), kk.labels).ensure_valid()


def test_trace_radical_needs_large_characteristic():
    r = lower_triangular(PrimeField(3), 2)
    plain = Algebra(r.field, r.structure, r.unit, r.idempotents, r.labels)
    with pytest.raises(InvalidAlgebra):
        _ = plain.radical


def test_center_examples():
    r = lower_triangular(F5, 2)
    z = r.center()
    assert z.shape[0] == 1 and span_equal(F5, z, r.unit.reshape(1, -1))
    big = field_extension(F7, 2, [-3, 0])
    assert big.center().shape[0] == 2
    m2 = matrix_over(ground_field(F5), 2)
    # by hand: z commutes with E12 and E21 exactly when z is a scalar matrix
    z = m2.center()
    assert z.shape[0] == 1 and span_equal(F5, z, m2.unit.reshape(1, -1))


def test_radical_examples():
    r = lower_triangular(F5, 2)
    assert r.radical.tolist() == [[0, 1, 0]]
    kk = product(ground_field(F5), ground_field(F5))
    assert kk.radical.shape[0] == 0
    a = path_algebra(F5, Quiver(3, ((0, 1, "a"), (1, 2, "b"))))
    assert a.dim == 6
    assert a.radical.shape[0] == 3
    arrows = np.eye(6, dtype=np.int64)[[a.index("a"), a.index("b"), a.index("ab")]]
    assert span_equal(F5, a.radical, arrows)


def test_trace_radical_matches_supplied_radical():
    a = path_algebra(F7, Quiver(3, ((0, 1, "a"), (1, 2, "b"))))
    plain = Algebra(a.field, a.structure, a.unit, a.idempotents, a.labels)
    assert span_equal(F7, plain.radical, a.radical)


def test_path_algebra_relations_and_empty_quiver():
    q = path_algebra(F5, Quiver(2, ((1, 1, "al"), (0, 1, "be")),
                                (((1, ("al", "al")),), ((1, ("be", "al")),))))
    assert q.dim == 4
    assert path_algebra(F5, Quiver(3, ())).dim == 3


def test_corner_examples():
    r = lower_triangular(F5, 2)
    c = corner(r, [1])
    assert c.algebra.dim == 1
    full = corner(r, [0, 1])
    assert full.algebra is r
    lt3 = lower_triangular(F5, 3)
    c = corner(lt3, [0, 1])
    lt2 = lower_triangular(F5, 2)
    # block-submatrix oracle: the surviving labels are E11, E21, E22
    assert c.algebra.labels == ("E11", "E21", "E22")
    assert is_isomorphism(c.algebra, lt2, np.eye(3, dtype=np.int64))
    # compression then inclusion is x -> e x e
    x = np.arange(1, 7) % 5
    exe = lt3.mul(lt3.mul(c.idempotent, x), c.idempotent)
    assert np.array_equal(F5.matmul(F5.matmul(x.reshape(1, -1), c.compression), c.inclusion).ravel(), exe)


def test_corner_empty():
    c = corner(lower_triangular(F5, 2), [])
    assert c.algebra.dim == 0


def test_enveloping_examples():
    k = ground_field(F5)
    assert enveloping(k, k).dim == 1
    assert enveloping(lower_triangular(F5, 2), k).dim == 3
    big = field_extension(F7, 2, [-3, 0])
    env = enveloping(big, big)
    assert env.dim == 4 and env.is_commutative()


def test_opposite_reverses_products():
    r = lower_triangular(F5, 2)
    op = opposite(r)
    x, y = r.basis_vector(1), r.basis_vector(0)
    assert np.array_equal(op.mul(x, y), r.mul(y, x))
    assert opposite(op) is r


def test_from_table_and_points():
    # k[x]/(x^2) with basis 1, x
    a = from_table(F5, ["1", "x"], {(0, 0): [1, 0], (0, 1): [0, 1], (1, 0): [0, 1]}, [1, 0], [[1, 0]])
    assert a.n_points == 1
    assert a.radical.tolist() == [[0, 1]]


def test_matrix_algebra_has_one_point():
    m2 = matrix_over(ground_field(F5), 2)
    assert m2.n_idempotents == 2 and m2.n_points == 1
    assert m2.point_classes == ((0, 1),)


def test_point_idempotent_and_product_labels():
    r = lower_triangular(F5, 2)
    rr = product(r, r)
    assert rr.labels[0].endswith(".1") and rr.labels[-1].endswith(".2")
    assert np.array_equal(rr.point_idempotent(range(rr.n_points)), rr.unit)


def test_quiver_endpoints_and_distinct_labels():
    q = Quiver(2, ((0, 1, "a"),))
    assert q.endpoints(("a",)) == (0, 1)
    with pytest.raises(ValueError):
        path_algebra(F5, Quiver(2, ((0, 1, "a"), (1, 0, "a"))))
    with pytest.raises(al.InfiniteDimensional):
        path_algebra(F5, Quiver(1, ((0, 0, "x"),)))
