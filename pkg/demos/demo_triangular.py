"""
Ranks of a quotient of the triangular algebra
=============================================

R is the algebra of lower triangular 2x2 matrices over F5 and M = R/I,
where I is spanned by E11 and E21.  M is an (R, F5)-bimodule.  We
tensor the indecomposable injectives of R with it, compare the two
duals of M, and read off rank tables and a classification.
"""

import numpy as np

from frobmod import bimodule as bm
from frobmod import frobanalysis as fa
from frobmod import module as mo
from frobmod.algebra import ground_field, lower_triangular
from frobmod.exactla import PrimeField

F5 = PrimeField(5)
r = lower_triangular(F5, 2, name="R")
k = ground_field(F5, name="k")
m = bm.quotient_by_ideal(r, [[1, 0, 0], [0, 1, 0]], k, [[0], [0], [1]], name="M")
print(r, m)

# %%
# Tensoring with M
# ----------------
# Both indecomposable injectives survive, each as a single copy of F5.
# The first simple is killed.

cat = mo.standard_catalog(r)
print("dim E_i (x) M:", [bm.tensor(e, m).result.dim for e in cat.injectives])
print("dim S_i (x) M:", [bm.tensor(s, m).result.dim for s in cat.simples])

# %%
# The two duals
# -------------
# M is projective on both sides.  Its right dual Hom_k(M, k) is the
# injective E2, but Hom_R(M, R) is two-dimensional, so the duals are
# not isomorphic and ``frobenius_check`` refuses.

print("left dual dim:", bm.dual(m, "left").bimodule.dim)
print("right dual dim:", bm.dual(m, "right").bimodule.dim)
try:
    bm.frobenius_check(m)
except bm.DualsNotIsomorphic as exc:
    print("not Frobenius:", exc)

# %%
# Ranks through the one-sided adjunction
# --------------------------------------
# ``tensor_pair`` builds F = - (x) M with its right adjoint.  That is
# enough for the rank tables.

pair = bm.tensor_pair(m)
rk = fa.rank_report(pair)
print("rrk =", rk.rrk.tolist(), " lrk =", rk.lrk.tolist())
print("support map:", rk.f)

cls = fa.classify(pair)
for name in fa.ClassificationReport.PREDICATES:
    v = getattr(cls, name)
    print(f"{name:<22} {v.holds}  {v.note}")
print("equivalence:", bool(fa.equivalence_test(pair)))
assert np.array_equal(rk.rho, [1, 1])
