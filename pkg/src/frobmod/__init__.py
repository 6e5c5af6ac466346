"""Exact computations with bimodules between finite-dimensional algebras over prime fields.

Layers, bottom up: ``exactla`` (matrices over F_p), ``algebra``
(structure constants, corners, quivers), ``module`` (right modules,
hom spaces, injective hulls), ``bimodule`` (tensor products, duals,
Frobenius certificates), ``spectrum`` (torsion classes and weakly open
subspaces) and ``frobanalysis`` (ranks, classification, restriction,
gluing, duality).
"""

from .exactla import PrimeField, Subspace
from .algebra import (Algebra, Corner, Quiver, corner, field_extension, ground_field, lower_triangular,
                      matrix_over, path_algebra, product)
from .module import ModuleHom, Representation, injective_decompose, injective_hull, standard_catalog
from .bimodule import (Bimodule, BimoduleHom, FrobeniusCertificate, FunctorPair, frobenius_check, quotient_by_ideal,
                       regular, tensor, tensor_pair, triangular_algebra, twist)
from .spectrum import LocalizingSubcat, WeaklyOpenSubspace, localizing_from, weakly_open
from .frobanalysis import (GlueTask, HypothesisFailure, category_decomposition_check, classify,
                           constant_rank_partition, dualize_morphism, equivalence_test, glue, glue_task_from,
                           injective_tripartition, rank_report, restrict, support_map)

__version__ = "0.1.0"
