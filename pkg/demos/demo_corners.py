"""
Torsion classes, corners and restriction
========================================

Over a finite-dimensional algebra a localizing subcategory is fixed by
the simples it kills, and the quotient category is modules over a
corner algebra.  We walk through the path algebra of 1 -> 2 -> 3, then
restrict a bimodule whose restriction is no longer Frobenius.
"""

from frobmod import bimodule as bm
from frobmod import frobanalysis as fa
from frobmod import module as mo
from frobmod import spectrum as sp
from frobmod.algebra import Quiver, path_algebra, product
from frobmod.exactla import PrimeField

F5 = PrimeField(5)
a = path_algebra(F5, Quiver(3, ((0, 1, "a"), (1, 2, "b"))), name="A3")
cat = mo.standard_catalog(a)
print("dim P_i:", [p.dim for p in cat.projectives], " dim E_i:", [e.dim for e in cat.injectives])

# %%
# Every subset of points
# ----------------------
# For each torsion class we build the corner and report whether the
# class is closed under injective envelopes.

for t in sp.all_localizing(a):
    u = sp.weakly_open(t)
    closed, witness = sp.closed_under_envelopes(t)
    print(sorted(t.killed), "corner dim", u.corner.algebra.dim, "envelope-closed", closed, witness or "")

# %%
# Restricting a bimodule
# ----------------------
# Q has a square-zero loop at vertex 2 and an arrow 1 -> 2 killed by the
# loop.  D is Q sitting diagonally in Q x Q.  Keeping vertex 2 of the
# second factor gives a corner over which the restriction is not
# projective.

q = path_algebra(F5, Quiver(2, ((1, 1, "al"), (0, 1, "be")),
                            (((1, ("al", "al")),), ((1, ("be", "al")),))), name="Q")
qq = bm.product_of([q, q], name="QQ")
d = bm.external_sum({(0, 0): bm.regular(q), (0, 1): bm.regular(q)}, [q], [q, q], right_algebra=qq, name="D")
cert = bm.frobenius_check(d)
cls = fa.classify(cert)
print("left localizing", cls.left_localizing.holds, " right localizing", cls.right_localizing.holds)

for killed in ([2], [0, 2]):
    res = fa.restrict(cert, sp.weakly_open(sp.localizing_from(qq, killed=killed)))
    print("killed", killed, "condition", res.condition.holds, "Frobenius", res.frobenius.holds, res.frobenius.note)

# %%
# A split and a non-split algebra
# -------------------------------

kk = product(a, a)
n = a.n_points
parts = [sp.localizing_from(kk, killed=range(n)), sp.localizing_from(kk, killed=range(n, 2 * n))]
print("A3 x A3 splits:", bool(fa.category_decomposition_check(kk, parts)))
parts = [sp.localizing_from(a, killed=[0]), sp.localizing_from(a, killed=[1, 2])]
v = fa.category_decomposition_check(a, parts)
print("A3 splits along {1} | {2, 3}:", bool(v), v.witness)
