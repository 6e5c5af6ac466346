"""Instance builders shared by the test modules.

Everything here is built directly from the Python API, so that parsed
fixture files can be compared against an independent construction.
"""

from __future__ import annotations

import itertools

import numpy as np

from frobmod import algebra as al
from frobmod import bimodule as bm
from frobmod.exactla import PrimeField

F5 = PrimeField(5)
F7 = PrimeField(7)
F11 = PrimeField(11)


def triangular():
    """R = lower triangular 2x2 over F5, k = F5, and M = R/I with I = span(E11, E21)."""
    r = al.lower_triangular(F5, 2, name="R")
    k = al.ground_field(F5, name="k")
    m = bm.quotient_by_ideal(r, [[1, 0, 0], [0, 1, 0]], k, [[0], [0], [1]], name="M")
    return r, k, m


def delta():
    """F5 sitting diagonally in F5 x F5."""
    k = al.ground_field(F5, name="k")
    kk = bm.product_of([k, k], name="kk")
    d = bm.external_sum({(0, 0): bm.regular(k), (0, 1): bm.regular(k)}, [k], [k, k],
                        right_algebra=kk, name="D")
    return k, kk, d


def delta_quiver():
    """Q with a square-zero loop at vertex 2 and an arrow 1 -> 2 killed by the loop, diagonal in Q x Q."""
    q = al.path_algebra(F5, al.Quiver(2, ((1, 1, "al"), (0, 1, "be")),
                                      (((1, ("al", "al")),), ((1, ("be", "al")),))), name="Q")
    qq = bm.product_of([q, q], name="QQ")
    dq = bm.external_sum({(0, 0): bm.regular(q), (0, 1): bm.regular(q)}, [q], [q, q],
                         right_algebra=qq, name="DQ")
    return q, qq, dq


def f49():
    k = al.field_extension(F7, 2, [-3, 0], name="K")
    frob = np.array([k.power(k.basis_vector(i), 7) for i in range(2)])
    return k, frob


def twisted_triangular():
    """R = [[F7, 0], [F49, F49]] and the twist of R by Frobenius on both F49 slots."""
    k7 = al.ground_field(F7, name="k")
    big, frob = f49()
    mk = bm.Bimodule(big, k7, big.regular_left, np.eye(2, dtype=np.int64)[None], "K")
    r = bm.triangular_algebra(k7, big, mk, name="R")
    phi = np.zeros((5, 5), dtype=np.int64)
    phi[0, 0] = 1
    phi[1:3, 1:3] = frob
    phi[3:5, 3:5] = frob
    return r, bm.twist(r, phi, name="T"), big


def morita(fld=F5, n=2):
    """Row vectors k^(1 x n) as a (k, M_n(k))-bimodule."""
    k = al.ground_field(fld, name="k")
    mat = al.matrix_over(k, n, name=f"M{n}")
    acts = []
    for lab in mat.labels:
        i, j = int(lab[1]) - 1, int(lab[2]) - 1
        x = np.zeros((n, n), dtype=np.int64)
        x[i, j] = 1
        acts.append(x)
    return k, mat, bm.Bimodule(k, mat, np.eye(n, dtype=np.int64)[None], np.array(acts), "P").ensure_valid()


def linear_quiver(fld, n, name=None):
    return al.path_algebra(fld, al.Quiver(n, tuple((i, i + 1, f"a{i + 1}") for i in range(n - 1))),
                           name=name or f"A{n}")


def zero_bimodule(a, b):
    return bm.Bimodule(a, b, np.zeros((a.dim, 0, 0)), np.zeros((b.dim, 0, 0)), "0")


# -- automorphisms --------------------------------------------------------------------


def arrow_scaling(a: al.Algebra, quiver: al.Quiver, scales: dict) -> np.ndarray:
    """Automorphism of a monomial path algebra scaling each arrow by a nonzero constant."""
    fld = a.field
    phi = np.eye(a.dim, dtype=np.int64)
    nv = quiver.vertices
    arrows = sorted((lab for _, _, lab in quiver.arrows), key=len, reverse=True)
    for k, lab in enumerate(a.labels[nv:], start=nv):
        # labels are concatenations of arrow labels; split greedily
        rest, factor = lab, 1
        while rest:
            head = next(x for x in arrows if rest.startswith(x))
            factor = factor * scales[head] % fld.p
            rest = rest[len(head):]
        phi[k, k] = factor
    return phi


def swap_factors(n: int) -> np.ndarray:
    """Automorphism of B x B (dim B = n) exchanging the two factors."""
    phi = np.zeros((2 * n, 2 * n), dtype=np.int64)
    phi[:n, n:] = np.eye(n, dtype=np.int64)
    phi[n:, :n] = np.eye(n, dtype=np.int64)
    return phi


# -- generator suite ----------------------------------------------------------------


def random_quiver(rng, fld, max_vertices=4, max_dim=12, min_vertices=1):
    """A random acyclic quiver algebra of dimension at most ``max_dim``."""
    while True:
        n = int(rng.integers(min_vertices, max_vertices + 1))
        pairs = [(i, j) for i in range(n) for j in range(n) if i < j]
        rng.shuffle(pairs)
        chosen = pairs[: int(rng.integers(0, len(pairs) + 1))]
        arrows = []
        for k, (i, j) in enumerate(chosen):
            s, t = (i, j) if rng.random() < 0.5 else (j, i)
            arrows.append((s, t, chr(ord("a") + k)))
        # keep acyclic by orienting along a random order
        order = list(rng.permutation(n))
        rank = {v: order.index(v) for v in range(n)}
        arrows = [(s, t, lab) if rank[s] < rank[t] else (t, s, lab) for s, t, lab in arrows]
        quiver = al.Quiver(n, tuple(arrows))
        a = al.path_algebra(fld, quiver, name=f"Q{n}")
        if a.dim <= max_dim:
            return a, quiver


def right_localizing_suite():
    """At least twenty bimodules inducing equivalences or point-preserving Frobenius functors."""
    out = []
    k5 = al.ground_field(F5, name="k")
    out.append(("reg F5", bm.regular(k5)))
    for n in (2, 3):
        out.append((f"reg LT{n}", bm.regular(al.lower_triangular(F5, n))))
    for n in (2, 3, 4):
        out.append((f"reg A{n}", bm.regular(linear_quiver(F5, n))))
    kk = bm.product_of([k5, k5], name="kk")
    out.append(("reg kk", bm.regular(kk)))
    out.append(("swap kk", bm.twist(kk, swap_factors(1), name="swap")))
    _, _, p = morita(F5, 2)
    out.append(("Morita F5^(1x2)", p))
    _, _, p7 = morita(F7, 2)
    out.append(("Morita F7^(1x2)", p7))
    big, frob = f49()
    out.append(("reg F49", bm.regular(big)))
    out.append(("F49 twist", bm.twist(big, frob, name="T")))
    r9, t9, _ = twisted_triangular()
    out.append(("twisted triangular", t9))
    out.append(("reg twisted triangular", bm.regular(r9)))
    for scales, fld in (({"a": 2, "b": 3}, F5), ({"a": 3, "b": 5}, F7)):
        quiver = al.Quiver(3, ((0, 1, "a"), (1, 2, "b")))
        a = al.path_algebra(fld, quiver, name="A3")
        out.append((f"scaled A3 mod {fld.p}", bm.twist(a, arrow_scaling(a, quiver, scales))))
    quiver = al.Quiver(3, ((0, 1, "a"), (2, 1, "b")))
    a = al.path_algebra(F11, quiver, name="V")
    out.append(("scaled V mod 11", bm.twist(a, arrow_scaling(a, quiver, {"a": 4, "b": 7}))))
    lt2 = al.lower_triangular(F5, 2)
    prod = bm.product_of([lt2, lt2], name="LT2xLT2")
    out.append(("swap LT2xLT2", bm.twist(prod, swap_factors(lt2.dim))))
    # corner restrictions of regular bimodules
    for n, surv in ((3, (0, 1)), (3, (1, 2)), (4, (0, 2, 3))):
        a = linear_quiver(F5, n)
        c = al.corner(a, surv)
        out.append((f"corner A{n}|{surv}", bm.corner_slice(bm.regular(a), c, c)))
    return out


def random_instances(count=50, seed=20261016):
    """Seeded random (name, bimodule) pairs over p in {5, 7, 11}, all of dimension at most 12."""
    rng = np.random.default_rng(seed)
    fields = (F5, F7, F11)
    out = []
    kinds = itertools.cycle(("regular", "scaled", "product", "morita", "corner", "twisted product"))
    while len(out) < count:
        kind = next(kinds)
        fld = fields[int(rng.integers(0, 3))]
        if kind == "regular":
            a, _ = random_quiver(rng, fld, min_vertices=2)
            m = bm.regular(a)
        elif kind == "scaled":
            a, quiver = random_quiver(rng, fld, min_vertices=2)
            scales = {lab: int(rng.integers(1, fld.p)) for _, _, lab in quiver.arrows}
            m = bm.twist(a, arrow_scaling(a, quiver, scales))
        elif kind == "product":
            a, _ = random_quiver(rng, fld, max_vertices=2, max_dim=6)
            b, _ = random_quiver(rng, fld, max_vertices=2, max_dim=6)
            m = bm.regular(bm.product_of([a, b]))
        elif kind == "morita":
            n = int(rng.integers(1, 4))
            _, _, m = morita(fld, n)
        elif kind == "corner":
            a, _ = random_quiver(rng, fld, min_vertices=2)
            n = a.n_idempotents
            surv = [i for i in range(n) if rng.random() < 0.6] or [0]
            c = al.corner(a, surv)
            m = bm.corner_slice(bm.regular(a), c, c)
        else:
            a, _ = random_quiver(rng, fld, max_vertices=2, max_dim=6)
            prod = bm.product_of([a, a])
            m = bm.twist(prod, swap_factors(a.dim))
        if m.dim <= 12 and m.left_algebra.dim <= 12 and m.right_algebra.dim <= 12:
            out.append((f"{kind} #{len(out)} mod {fld.p}", m))
    return out


def glue_instances(count=10, seed=20261017):
    """(name, bimodule, killed1, killed2): right-localizing bimodules with an envelope-closed cover.

    Two families: bimodules over A x B covered by the two factors (empty
    overlap), and twists of the quiver 1 -> 2 <- 3 covered by killing 1,
    resp. 3 (overlap at vertex 2).
    """
    rng = np.random.default_rng(seed)
    fields = (F5, F7, F11)
    out = []
    while len(out) < count:
        fld = fields[int(rng.integers(0, 3))]
        kind = len(out) % 4
        if kind == 3:
            quiver = al.Quiver(3, ((0, 1, "a"), (2, 1, "b")))
            v = al.path_algebra(fld, quiver, name="V")
            scales = {lab: int(rng.integers(1, fld.p)) for lab in ("a", "b")}
            out.append((f"glue #{len(out)} mod {fld.p}", bm.twist(v, arrow_scaling(v, quiver, scales)), [0], [2]))
            continue
        a, qa = random_quiver(rng, fld, max_vertices=2, max_dim=5)
        b, qb = random_quiver(rng, fld, max_vertices=2, max_dim=5)
        prod = bm.product_of([a, b])
        if kind == 0:
            m = bm.regular(prod)
        elif kind == 1:
            phi = np.zeros((prod.dim, prod.dim), dtype=np.int64)
            phi[:a.dim, :a.dim] = arrow_scaling(a, qa, {lab: int(rng.integers(1, fld.p)) for _, _, lab in qa.arrows})
            phi[a.dim:, a.dim:] = arrow_scaling(b, qb, {lab: int(rng.integers(1, fld.p)) for _, _, lab in qb.arrows})
            m = bm.twist(prod, phi)
        else:
            ra, rb = bm.regular(a), bm.regular(b)
            m = bm.external_sum({(0, 0): ra, (1, 1): bm.bimodule_sum([rb, rb])}, [a, b], [a, b], prod, prod)
        na, n = a.n_points, prod.n_points
        out.append((f"glue #{len(out)} mod {fld.p}", m, list(range(na)), list(range(na, n))))
    return out
