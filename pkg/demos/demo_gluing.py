"""
Gluing local bimodules
======================

Given a cover of the spectrum by two weakly open pieces that are closed
under injective envelopes, local right-localizing bimodules that agree
on the overlap glue to a global one.  We cut the regular bimodule of
1 -> 2 <- 3 into two pieces and glue it back, then show a cover where
gluing is impossible.
"""

import numpy as np

from frobmod import bimodule as bm
from frobmod import frobanalysis as fa
from frobmod import spectrum as sp
from frobmod.algebra import Quiver, lower_triangular, path_algebra
from frobmod.exactla import PrimeField

F5 = PrimeField(5)
a = path_algebra(F5, Quiver(3, ((0, 1, "a"), (2, 1, "b"))), name="V")
v1 = sp.weakly_open(sp.localizing_from(a, killed=[0]))
v2 = sp.weakly_open(sp.localizing_from(a, killed=[2]))
print("corners:", v1.corner.algebra.dim, v2.corner.algebra.dim)

reg = bm.regular(a)
task = fa.glue_task_from(bm.frobenius_check(reg), v1, v2, v1, v2)
out = fa.glue(task)
print(out.as_dict())
print("glued back to the regular bimodule:", bm.bimodules_isomorphic(out.bimodule, reg))

# %%
# An obstruction
# --------------
# For lower triangular 2x2 matrices the injective envelope of the first
# simple has both simples as factors.  The identity on one point and
# zero on the other cannot come from a global bimodule.

lt2 = lower_triangular(F5, 2)
w1 = sp.weakly_open(sp.localizing_from(lt2, killed=[1]))
w2 = sp.weakly_open(sp.localizing_from(lt2, killed=[0]))
c2 = w2.corner.algebra
zero = bm.Bimodule(c2, c2, np.zeros((c2.dim, 0, 0)), np.zeros((c2.dim, 0, 0)), "0")
try:
    fa.glue(fa.GlueTask(lt2, lt2, w1, w2, w1, w2, bm.regular(w1.corner.algebra), zero))
except fa.HypothesisFailure as exc:
    print("HypothesisFailure:", exc)
