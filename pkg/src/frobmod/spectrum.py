"""The injective spectrum of a finite-dimensional algebra.

Points are the isomorphism classes of simple modules, which correspond to
the indecomposable injectives through their socles.  A hereditary torsion
class is determined by the simples it contains, so it is stored as the set
of *killed* points; the quotient category is modelled by the corner algebra
e'Ae' where e' sums the idempotents over the surviving points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from .algebra import Algebra, AlgebraMismatch, Corner, corner
from .bimodule import Bimodule, FunctorPair, hom_module, tensor, tensor_hom
from .exactla import Subspace
from .module import (ModuleHom, Representation, composition_factors, direct_sum, factor_support,
                     hom_space, is_isomorphic, is_projective, NotProjective, standard_catalog, torsion_submodule)


def _points(a: Algebra, ks: Iterable[int]) -> frozenset:
    out = frozenset(int(k) for k in ks)
    bad = [k for k in out if not 0 <= k < a.n_points]
    if bad:
        raise IndexError(f"points {sorted(bad)} out of range for {a.name} ({a.n_points} points)")
    return out


@dataclass(frozen=True)
class LocalizingSubcat:
    """The torsion class of modules whose composition factors all lie in ``killed``."""

    algebra: Algebra = field(compare=False, hash=False)
    killed: frozenset

    @property
    def n_points(self) -> int:
        return self.algebra.n_points

    @property
    def surviving(self) -> frozenset:
        return frozenset(range(self.n_points)) - self.killed

    def contains(self, m: Representation) -> bool:
        return factor_support(m) <= self.killed

    def torsion(self, m: Representation):
        """The torsion submodule t(M) and its inclusion matrix."""
        return torsion_submodule(m, self.killed)

    def __repr__(self) -> str:
        return f"LocalizingSubcat(K={sorted(k + 1 for k in self.killed)})"


def localizing_from(a: Algebra, killed: Optional[Iterable[int]] = None,
                    torsionfree: Optional[Iterable[int]] = None,
                    kernel_of: Optional[FunctorPair] = None, functor: str = "F") -> LocalizingSubcat:
    """Build a torsion class from exactly one of three descriptions.

    ``killed``: the killed points directly.  ``torsionfree``: a set of
    points x whose injectives E(x) are torsion-free, giving the class of
    modules M with Hom(M, E(x)) = 0 for all of them.  ``kernel_of``: the
    kernel of F (or G) of a functor pair, i.e. the simples sent to zero.
    """
    given = [x is not None for x in (killed, torsionfree, kernel_of)]
    if sum(given) != 1:
        raise ValueError("give exactly one of killed, torsionfree, kernel_of")
    if killed is not None:
        return LocalizingSubcat(a, _points(a, killed))
    cat = standard_catalog(a)
    if torsionfree is not None:
        sigma = _points(a, torsionfree)
        ks = [j for j in range(a.n_points)
              if all(hom_space(cat.simples[j], cat.injectives[x]).shape[0] == 0 for x in sigma)]
        return LocalizingSubcat(a, frozenset(ks))
    pair = kernel_of
    if functor == "F":
        if pair.source_algebra is not a:
            raise AlgebraMismatch("F does not start at this algebra")
        ks = [j for j, s in enumerate(cat.simples) if pair.F(s).dim == 0]
    elif functor == "G":
        if pair.target_algebra is not a:
            raise AlgebraMismatch("G does not start at this algebra")
        ks = [j for j, s in enumerate(cat.simples) if pair.G(s).dim == 0]
    else:
        raise ValueError(f"functor must be 'F' or 'G', got {functor!r}")
    return LocalizingSubcat(a, frozenset(ks))


def all_localizing(a: Algebra) -> list:
    """Every torsion class of Mod A, one per subset of points."""
    n = a.n_points
    return [LocalizingSubcat(a, frozenset(c)) for r in range(n + 1) for c in itertools.combinations(range(n), r)]


def closed_under_envelopes(t: LocalizingSubcat):
    """Whether E(S_j) lies in the class for every killed j.

    Returns ``(ok, witness)`` where the witness is ``(j, i)``: E(S_j) has the
    surviving composition factor S_i.
    """
    cat = standard_catalog(t.algebra)
    for j in sorted(t.killed):
        for i in np.flatnonzero(composition_factors(cat.injectives[j])):
            if int(i) not in t.killed:
                return False, (j, int(i))
    return True, None


@dataclass(frozen=True)
class LatticeReport:
    gabriel_product: LocalizingSubcat
    open_intersection: LocalizingSubcat
    open_union: LocalizingSubcat
    is_cover: bool
    is_disjoint: bool


def lattice(t1: LocalizingSubcat, t2: LocalizingSubcat) -> LatticeReport:
    """Set-level operations on two torsion classes and their weakly open complements.

    The smallest torsion class containing the Gabriel product of the two
    closed parts is the one killing K1 | K2; it is also the class whose
    quotient is the intersection of the open complements.
    """
    if t1.algebra is not t2.algebra:
        raise AlgebraMismatch("torsion classes over different algebras")
    a = t1.algebra
    both = t1.killed | t2.killed
    either = t1.killed & t2.killed
    full = frozenset(range(a.n_points))
    return LatticeReport(LocalizingSubcat(a, both), LocalizingSubcat(a, both), LocalizingSubcat(a, either),
                         is_cover=not either, is_disjoint=both == full)


# -- weakly open subspaces -------------------------------------------------------------


def _corner_bimodule(a: Algebra, c: Corner, side: str) -> Bimodule:
    """Ae' as an (A, C)-bimodule (side 'left') or e'A as a (C, A)-bimodule."""
    fld = a.field
    if side == "left":
        space = Subspace.of(fld, a.right_mult(c.idempotent), a.dim)        # rows b_k e'
        lacts = a.regular_left
        racts = fld.combine_stack(c.inclusion, a.regular_right)
        la, ra = a, c.algebra
    else:
        space = Subspace.of(fld, a.left_mult(c.idempotent), a.dim)         # rows e' b_k
        lacts = fld.combine_stack(c.inclusion, a.regular_left)
        racts = a.regular_right
        la, ra = c.algebra, a
    piv = list(space.pivots)
    left = fld.matmul(space.basis, lacts)[..., piv]
    right = fld.matmul(space.basis, racts)[..., piv]
    name = f"{a.name}e'" if side == "left" else f"e'{a.name}"
    return Bimodule(la, ra, left, right, name)


@dataclass(eq=False)
class WeaklyOpenSubspace:
    """The quotient Mod A / T realized as modules over the corner e'Ae'.

    ``restrict`` is j^* (M -> Me'), ``pushforward`` is its right adjoint
    j_* = Hom(Ae', -) and ``extend`` its left adjoint j_! = - (x) e'A.
    ``corner_points[c]`` is the point of A lying under corner point c.
    """

    torsion: LocalizingSubcat
    corner: Corner
    corner_points: tuple
    left_bimodule: Optional[Bimodule]
    right_bimodule: Optional[Bimodule]
    checks: dict = field(default_factory=dict)

    @property
    def algebra(self) -> Algebra:
        return self.torsion.algebra

    @property
    def surviving(self) -> frozenset:
        return self.torsion.surviving

    @property
    def is_empty(self) -> bool:
        return not self.surviving

    @property
    def idempotent(self) -> np.ndarray:
        return self.corner.idempotent

    def restrict(self, x: Union[Representation, ModuleHom]):
        """j^*: M -> M e' as a module over the corner, or the induced map on homs."""
        fld = self.algebra.field
        if isinstance(x, ModuleHom):
            src, s_basis = self._restricted(x.source)
            tgt, t_basis = self._restricted(x.target)
            img = fld.matmul(s_basis.basis, x.matrix)
            return ModuleHom(src, tgt, t_basis.coords(img) if t_basis.dim else img[:, []])
        return self._restricted(x)[0]

    def _restricted(self, m: Representation):
        if m.algebra is not self.algebra:
            raise AlgebraMismatch("module is not over the ambient algebra")
        cache = m.__dict__.setdefault("_restrictions", {})
        key = id(self)
        if key in cache and cache[key][0] is self:
            return cache[key][1]
        fld = m.field
        space = Subspace.of(fld, m.act(self.idempotent), m.dim)
        acts = fld.combine_stack(self.corner.inclusion, m.action)
        act = fld.matmul(space.basis, acts)[..., list(space.pivots)] if space.dim else \
            np.zeros((self.corner.algebra.dim, 0, 0), dtype=np.int64)
        out = (Representation(self.corner.algebra, act, f"{m.name}e'"), space)
        cache[key] = (self, out)
        return out

    def pushforward(self, n: Union[Representation, ModuleHom]):
        """j_* = Hom_C(Ae', -), landing in Mod A."""
        if self.is_empty:
            raise ValueError("empty subspace has no modules")
        if isinstance(n, ModuleHom):
            return _hom_functor_on_map(self.left_bimodule, n)
        return hom_module(self.left_bimodule, n)

    def extend(self, n: Union[Representation, ModuleHom]):
        """j_! = - (x)_C e'A, landing in Mod A."""
        if self.is_empty:
            raise ValueError("empty subspace has no modules")
        if isinstance(n, ModuleHom):
            return tensor_hom(n, self.right_bimodule)
        return tensor(n, self.right_bimodule).result


def _hom_functor_on_map(p: Bimodule, f: ModuleHom) -> ModuleHom:
    """Hom_C(P, f) between the hom modules of source and target."""
    from .module import intertwiners
    fld = p.field
    src, tgt = hom_module(p, f.source), hom_module(p, f.target)
    c = p.right_algebra
    gens = c.generators
    use = c.primitive and c.n_idempotents

    def basis_of(n):
        maps = intertwiners(fld, fld.combine_stack(gens, p.right), fld.combine_stack(gens, n.action),
                            [p.act_right(e) for e in c.idempotents] if use else None,
                            n.idempotent_projectors if use else None)
        return maps, Subspace.of(fld, maps.reshape(maps.shape[0], -1), p.dim * n.dim)

    smaps, _ = basis_of(f.source)
    _, tspace = basis_of(f.target)
    imgs = fld.matmul(smaps, f.matrix)
    mat = tspace.coords(imgs.reshape(imgs.shape[0], -1)) if tspace.dim else np.zeros((smaps.shape[0], 0),
                                                                                     dtype=np.int64)
    return ModuleHom(src, tgt, mat)


def point_indices(a: Algebra, points: Iterable[int]) -> list:
    """Idempotent indices over the given points."""
    return sorted(i for k in points for i in a.point_classes[int(k)])


def weakly_open(t: LocalizingSubcat) -> WeaklyOpenSubspace:
    """Corner realization of Mod A / T, with its defining properties verified."""
    a = t.algebra
    surv = sorted(t.surviving)
    idx = point_indices(a, surv)
    c = corner(a, idx)
    if not surv:
        return WeaklyOpenSubspace(t, c, (), None, None, {"empty": True})
    # corner idempotent k is A-idempotent idx[k]
    owner = {i: p for p, cls in enumerate(a.point_classes) for i in cls}
    cpoints = tuple(owner[idx[cls[0]]] for cls in c.algebra.point_classes)
    u = WeaklyOpenSubspace(t, c, cpoints, _corner_bimodule(a, c, "left"), _corner_bimodule(a, c, "right"))
    cat = standard_catalog(a)
    killed_by_e = frozenset(j for j, s in enumerate(cat.simples) if u.restrict(s).dim == 0)
    ccat = standard_catalog(c.algebra)
    unit_ok = all(is_isomorphic(u.restrict(u.pushforward(s)), s) for s in ccat.simples)
    try:
        is_projective(u.left_bimodule.right_module)
        exact = True
    except NotProjective:
        exact = False
    u.checks = {"kernel matches killed set": killed_by_e == t.killed,
                "restrict after pushforward is identity": unit_ok,
                "pushforward exact": exact}
    return u


def restriction_matches_corner_injectives(u: WeaklyOpenSubspace) -> bool:
    """For each surviving j, E(S_j) e' is the corner injective over the matching point."""
    if u.is_empty:
        return True
    a = u.algebra
    cat = standard_catalog(a)
    ccat = standard_catalog(u.corner.algebra)
    for cp, p in enumerate(u.corner_points):
        if not is_isomorphic(u.restrict(cat.injectives[p]), ccat.injectives[cp]):
            return False
    return True


# -- topology and locality -----------------------------------------------------------------


@dataclass(frozen=True)
class TopologyReport:
    n_points: int
    basis: tuple            # V(S_j), V(P_j), V(E_j) for the catalog
    closed_sets: tuple
    discrete: bool
    witnesses: tuple        # V(S_j) == {j}
    note: str = ""


def support(m: Representation) -> frozenset:
    """V(M): the points occurring as composition factors of M."""
    return factor_support(m)


def gabriel_topology(a: Algebra) -> TopologyReport:
    """Closed sets generated by the supports of the catalog modules."""
    cat = standard_catalog(a)
    basis = []
    for group in (cat.simples, cat.projectives, cat.injectives):
        basis.extend(support(m) for m in group)
    closed = {frozenset(), frozenset(range(a.n_points))} | set(basis)
    while True:
        grown = set(closed)
        for x, y in itertools.combinations(closed, 2):
            grown.add(x | y)
            grown.add(x & y)
        if len(grown) == len(closed):
            break
        closed = grown
    witnesses = tuple(support(s) == frozenset({j}) for j, s in enumerate(cat.simples))
    discrete = all(witnesses)
    ordered = tuple(sorted((tuple(sorted(c)) for c in closed), key=lambda c: (len(c), c)))
    note = ("every point is closed, so the topology is discrete and continuity of any map "
            "between spectra is automatic") if discrete else "some point is not closed"
    return TopologyReport(a.n_points, tuple(tuple(sorted(b)) for b in basis), ordered, discrete, witnesses, note)


@dataclass(frozen=True)
class LocalityReport:
    is_local: bool
    is_semilocal: bool
    cogenerator: Representation = field(compare=False)
    cogenerates: bool


def locality_report(a: Algebra) -> LocalityReport:
    """Local means a single point; the sum of the indecomposable injectives is a cogenerator."""
    cat = standard_catalog(a)
    cog = direct_sum(cat.injectives, "+".join(e.name for e in cat.injectives))
    ok = all(hom_space(s, cog).shape[0] > 0 for s in cat.simples)
    return LocalityReport(a.n_points == 1, True, cog, ok)


__all__ = [
    "LocalizingSubcat", "LatticeReport", "WeaklyOpenSubspace", "TopologyReport", "LocalityReport",
    "localizing_from", "all_localizing", "closed_under_envelopes", "lattice", "weakly_open",
    "restriction_matches_corner_injectives", "support", "gabriel_topology", "locality_report",
    "point_indices",
]
