"""Right modules as matrix representations.

A module of dimension d over an algebra with basis b_1..b_n is a stack of
``n`` matrices of size ``d x d``; elements are row vectors and
``m . b = m @ action[b]``, so ``action(ab) = action(a) @ action(b)``.
A homomorphism M -> N is a ``dim M x dim N`` matrix X with
``action_M(a) @ X == X @ action_N(a)``.
"""

from __future__ import annotations

import itertools
import weakref
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .algebra import Algebra, AlgebraMismatch, ValidationReport
from .exactla import PrimeField, Subspace

ISO_SAMPLES = 64
EXHAUSTIVE_LIMIT = 5 ** 5


class NotIsomorphic(Exception):
    """Two modules were proved non-isomorphic; ``reason`` says how."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class IsomorphismUnknown(RuntimeError):
    """The isomorphism search was exhausted without a verdict."""


class NotProjective(Exception):
    """The free-cover splitting system has no solution."""


class NotInjective(Exception):
    """The module is strictly smaller than its injective hull."""


class ExtensionFailure(ArithmeticError):
    """A map out of a socle did not extend; signals corrupted input."""


@dataclass(eq=False)
class Representation:
    """A right module over ``algebra`` given by one action matrix per basis element."""

    algebra: Algebra
    action: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        n = self.algebra.dim
        act = np.asarray(self.action, dtype=np.int64)
        if act.size == 0:
            d = act.shape[-1] if act.ndim == 3 else 0
            act = np.zeros((n, d, d), dtype=np.int64)
        if act.ndim != 3 or act.shape[0] != n or act.shape[1] != act.shape[2]:
            raise ValueError(f"action must have shape ({n}, d, d), got {act.shape}")
        self.action = np.mod(act, self.field.p)

    def __repr__(self) -> str:
        return f"Representation({self.name or '?'}, dim={self.dim}, over {self.algebra.name})"

    @property
    def field(self) -> PrimeField:
        return self.algebra.field

    @property
    def dim(self) -> int:
        return self.action.shape[1]

    def act(self, x: np.ndarray) -> np.ndarray:
        """Action matrix of an arbitrary algebra element."""
        return self.field.combine(x, self.action)

    @cached_property
    def idempotent_projectors(self) -> list[np.ndarray]:
        return [self.act(e) for e in self.algebra.idempotents]

    def validate(self) -> ValidationReport:
        return _validate_action(self.algebra, self.action, left=False)


def _validate_action(alg: Algebra, action: np.ndarray, left: bool) -> ValidationReport:
    """Check the unit and structure-constant identities for an action stack."""
    rep = ValidationReport()
    fld, n = alg.field, alg.dim
    d = action.shape[1]
    if d == 0 or n == 0:
        return rep
    if not np.array_equal(fld.combine(alg.unit, action), np.eye(d, dtype=np.int64)):
        rep.add("unit acts as identity", None)
    lhs = fld.matmul(action[:, None], action[None, :])
    combo = fld.matmul(alg._flat, action.reshape(n, d * d)).reshape(n, n, d, d)
    rhs = combo.transpose(1, 0, 2, 3) if left else combo
    bad = np.argwhere(np.any(lhs != rhs, axis=(2, 3)))
    if bad.size:
        rep.add("structure constants", tuple(int(v) for v in bad[0]))
    return rep


@dataclass(eq=False)
class ModuleHom:
    source: Representation
    target: Representation
    matrix: np.ndarray

    def is_valid(self) -> bool:
        fld = self.source.field
        lhs = fld.matmul(self.source.action, self.matrix)
        rhs = fld.matmul(self.matrix, self.target.action)
        return bool(np.array_equal(lhs, rhs))

    def then(self, other: "ModuleHom") -> "ModuleHom":
        """Composite: first self, then other."""
        return ModuleHom(self.source, other.target, self.source.field.matmul(self.matrix, other.matrix))

    def rank(self) -> int:
        return self.source.field.rank(self.matrix)


# -- intertwiner solver ----------------------------------------------------------


def _adapted_basis(fld: PrimeField, projectors, d: int):
    if not projectors:
        return np.eye(d, dtype=np.int64), np.eye(d, dtype=np.int64), [d]
    blocks = [fld.echelon(pr)[0] for pr in projectors]
    sizes = [b.shape[0] for b in blocks]
    basis = np.concatenate(blocks, axis=0) if blocks else np.zeros((0, d), dtype=np.int64)
    if basis.shape[0] != d:
        return np.eye(d, dtype=np.int64), np.eye(d, dtype=np.int64), [d]
    return basis, fld.invert(basis), sizes


def intertwiners(fld: PrimeField, acts_m: np.ndarray, acts_n: np.ndarray,
                 proj_m: Optional[Sequence[np.ndarray]] = None,
                 proj_n: Optional[Sequence[np.ndarray]] = None,
                 seed: int = 0) -> np.ndarray:
    """Basis of {X : acts_m[k] @ X == X @ acts_n[k] for all k}.

    ``proj_m`` / ``proj_n`` are matching families of commuting idempotent
    matrices summing to the identity; an intertwiner must be block diagonal
    in bases adapted to them, which shrinks the unknowns before any other
    constraint is imposed.  Returns an array of shape ``(k, dM, dN)`` whose
    flattenings are in reduced echelon form.
    """
    acts_m = np.asarray(acts_m, dtype=np.int64)
    acts_n = np.asarray(acts_n, dtype=np.int64)
    dM, dN = acts_m.shape[-1], acts_n.shape[-1]
    if dM == 0 or dN == 0:
        return np.zeros((0, dM, dN), dtype=np.int64)
    use_blocks = proj_m is not None and proj_n is not None and len(proj_m) == len(proj_n)
    tm, tm_inv, sm = _adapted_basis(fld, list(proj_m) if use_blocks else [], dM)
    tn, tn_inv, sn = _adapted_basis(fld, list(proj_n) if use_blocks else [], dN)
    if len(sm) != len(sn):
        sm, sn = [dM], [dN]
        tm, tm_inv = np.eye(dM, dtype=np.int64), np.eye(dM, dtype=np.int64)
        tn, tn_inv = np.eye(dN, dtype=np.int64), np.eye(dN, dtype=np.int64)
    am = fld.matmul(fld.matmul(tm, acts_m), tm_inv)
    an = fld.matmul(fld.matmul(tn, acts_n), tn_inv)

    positions = []
    om = on = 0
    for a, b in zip(sm, sn):
        for r in range(om, om + a):
            positions.extend(r * dN + c for c in range(on, on + b))
        om += a
        on += b
    positions = np.array(positions, dtype=np.int64)
    if positions.size == 0:
        return np.zeros((0, dM, dN), dtype=np.int64)
    span = np.eye(positions.size, dtype=np.int64)

    rng = np.random.default_rng(seed)
    g = am.shape[0]
    order = []
    if g > 2:
        for _ in range(2):
            cf = rng.integers(0, fld.p, size=g)
            order.append((fld.combine(cf, am), fld.combine(cf, an)))
    order.extend((am[k], an[k]) for k in range(g))
    for left, right in order:
        k = span.shape[0]
        xs = np.zeros((k, dM * dN), dtype=np.int64)
        xs[:, positions] = span
        xs = xs.reshape(k, dM, dN)
        diff = fld.sub(fld.matmul(left, xs), fld.matmul(xs, right)).reshape(k, dM * dN)
        live = np.any(diff, axis=0)
        if not live.any():
            continue
        combos = fld.left_nullspace(diff[:, live])
        span = fld.matmul(combos, span) if combos.shape[0] else np.zeros((0, positions.size), dtype=np.int64)
        if span.shape[0] == 0:
            return np.zeros((0, dM, dN), dtype=np.int64)
    k = span.shape[0]
    xs = np.zeros((k, dM * dN), dtype=np.int64)
    xs[:, positions] = span
    xs = fld.matmul(fld.matmul(tm_inv, xs.reshape(k, dM, dN)), tn)
    red, _ = fld.echelon(xs.reshape(k, dM * dN))
    return red.reshape(-1, dM, dN)


def hom_space(m: Representation, n: Representation, seed: int = 0) -> np.ndarray:
    """Basis of Hom(m, n) as an array of shape (k, dim m, dim n)."""
    if m.algebra is not n.algebra:
        raise AlgebraMismatch(f"{m.algebra.name} vs {n.algebra.name}")
    proj = m.algebra.primitive and m.algebra.n_idempotents > 0
    gens = m.algebra.generators
    return intertwiners(m.field, m.field.combine_stack(gens, m.action), m.field.combine_stack(gens, n.action),
                        m.idempotent_projectors if proj else None,
                        n.idempotent_projectors if proj else None, seed)


def random_element(fld: PrimeField, basis: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    cf = rng.integers(0, fld.p, size=basis.shape[0])
    return fld.combine(cf, basis)


def find_invertible(fld: PrimeField, basis: np.ndarray, seed: int = 0,
                    samples: int = ISO_SAMPLES, exhaustive_limit: int = EXHAUSTIVE_LIMIT):
    """Search the span of ``basis`` for an invertible matrix.

    Returns ``(matrix, exhausted)``: ``matrix`` is None when nothing was
    found, and ``exhausted`` says whether the whole span was enumerated.
    """
    k = basis.shape[0]
    if k == 0:
        return None, True
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        cand = random_element(fld, basis, rng)
        if fld.is_invertible(cand):
            return cand, False
    for idx in range(k):
        if fld.is_invertible(basis[idx]):
            return basis[idx].copy(), False
    if fld.p ** k <= exhaustive_limit:
        for cf in itertools.product(range(fld.p), repeat=k):
            cand = fld.combine(np.array(cf), basis)
            if fld.is_invertible(cand):
                return cand, True
        return None, True
    return None, False


# -- sub, quotient, sum -------------------------------------------------------------


def is_invariant(m: Representation, rows: np.ndarray) -> bool:
    space = Subspace.of(m.field, rows, m.dim)
    if space.dim == 0:
        return True
    imgs = m.field.matmul(space.basis, m.action)
    return not np.any(space.reduce(imgs.reshape(-1, m.dim)))


def submodule(m: Representation, rows: np.ndarray, name: str = "") -> tuple[Representation, np.ndarray]:
    """Submodule spanned by ``rows``; returns it with its inclusion matrix."""
    fld = m.field
    space = Subspace.of(fld, rows, m.dim)
    basis = space.basis
    imgs = fld.matmul(basis, m.action)
    if np.any(space.reduce(imgs.reshape(-1, m.dim))):
        raise ValueError("rows do not span a submodule")
    action = imgs[..., list(space.pivots)]
    return Representation(m.algebra, action, name), basis


def quotient(m: Representation, rows: np.ndarray, name: str = ""):
    """Quotient by the submodule spanned by ``rows``.

    Returns ``(module, projection, lift)`` where ``projection`` is the
    (dim m x dim q) quotient map and ``lift`` picks representatives.
    """
    fld = m.field
    space = Subspace.of(fld, rows, m.dim)
    proj = space.quotient_map()
    lift = space.lift_map()
    action = fld.matmul(fld.matmul(lift, m.action), proj)
    return Representation(m.algebra, action, name), proj, lift


def direct_sum(mods: Sequence[Representation], name: str = "") -> Representation:
    if not mods:
        raise ValueError("direct_sum needs at least one summand")
    alg = mods[0].algebra
    for x in mods:
        if x.algebra is not alg:
            raise AlgebraMismatch("summands over different algebras")
    d = sum(x.dim for x in mods)
    act = np.zeros((alg.dim, d, d), dtype=np.int64)
    off = 0
    for x in mods:
        act[:, off:off + x.dim, off:off + x.dim] = x.action
        off += x.dim
    return Representation(alg, act, name)


def zero_module(alg: Algebra) -> Representation:
    return Representation(alg, np.zeros((alg.dim, 0, 0), dtype=np.int64), "0")


def regular_module(alg: Algebra) -> Representation:
    return Representation(alg, alg.regular_right, f"{alg.name}_{alg.name}")


def block_diag(mats: Sequence[np.ndarray]) -> np.ndarray:
    rows = sum(x.shape[0] for x in mats)
    cols = sum(x.shape[1] for x in mats)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for x in mats:
        out[r:r + x.shape[0], c:c + x.shape[1]] = x
        r += x.shape[0]
        c += x.shape[1]
    return out


# -- structure -----------------------------------------------------------------------


def radical_action(m: Representation) -> np.ndarray:
    """Action matrices of the radical basis, shape (r, d, d)."""
    rad = m.algebra.radical
    if rad.shape[0] == 0:
        return np.zeros((0, m.dim, m.dim), dtype=np.int64)
    return m.field.matmul(rad, m.action.reshape(m.algebra.dim, -1)).reshape(-1, m.dim, m.dim)


def socle_basis(m: Representation, below: Optional[np.ndarray] = None) -> np.ndarray:
    """Echelon basis of the socle, or of the preimage of soc(m / below)."""
    fld = m.field
    if m.dim == 0:
        return np.zeros((0, 0), dtype=np.int64)
    racts = radical_action(m)
    if racts.shape[0] == 0:
        return np.eye(m.dim, dtype=np.int64)
    if below is not None and below.shape[0]:
        q = Subspace.of(fld, below, m.dim).quotient_map()
        racts = fld.matmul(racts, q)
    wide = np.concatenate(list(racts), axis=1)
    kernel = fld.left_nullspace(wide)
    if below is not None and below.shape[0]:
        kernel = np.concatenate([below, kernel]) if kernel.size else below
    return fld.echelon(kernel)[0] if kernel.size else np.zeros((0, m.dim), dtype=np.int64)


def radical_basis(m: Representation, of: Optional[np.ndarray] = None) -> np.ndarray:
    """Echelon basis of N . rad(A) for the submodule N spanned by ``of`` (default m)."""
    fld = m.field
    base = np.eye(m.dim, dtype=np.int64) if of is None else of
    racts = radical_action(m)
    if racts.shape[0] == 0 or base.shape[0] == 0:
        return np.zeros((0, m.dim), dtype=np.int64)
    imgs = fld.matmul(base, racts).reshape(-1, m.dim)
    return fld.echelon(imgs)[0]


def composition_factors(m: Representation) -> np.ndarray:
    """Multiplicity of each catalog simple, via dim(M e_j) / dim(S_j e_j)."""
    cat = standard_catalog(m.algebra)
    out = np.zeros(m.algebra.n_points, dtype=np.int64)
    if not m.dim:
        return out
    for j, e in enumerate(m.algebra.point_representatives):
        out[j] = m.field.rank(m.act(e)) // cat.simple_idempotent_dims[j]
    return out


def factor_support(m: Representation) -> frozenset:
    return frozenset(int(j) for j in np.flatnonzero(composition_factors(m)))


@dataclass
class StructureSeries:
    socle_series: list
    radical_series: list
    factors: np.ndarray
    socle_layers: list
    radical_layers: list

    @property
    def loewy_length(self) -> int:
        return len(self.socle_layers)


def layer_factors(m: Representation, upper: np.ndarray, lower: np.ndarray) -> np.ndarray:
    sub, _ = submodule(m, upper) if upper.shape[0] < m.dim else (m, None)
    if lower.shape[0] == 0:
        return composition_factors(sub)
    coords = Subspace.of(m.field, upper, m.dim).coords(lower) if upper.shape[0] < m.dim else lower
    q, _, _ = quotient(sub, coords)
    return composition_factors(q)


def structure_series(m: Representation) -> StructureSeries:
    socs = []
    cur = np.zeros((0, m.dim), dtype=np.int64)
    while cur.shape[0] < m.dim:
        nxt = socle_basis(m, cur)
        if nxt.shape[0] == cur.shape[0]:
            raise ArithmeticError("socle series stalled")
        socs.append(nxt)
        cur = nxt
    rads = []
    cur = np.eye(m.dim, dtype=np.int64)
    while cur.shape[0] > 0:
        cur = radical_basis(m, cur)
        rads.append(cur)
    soc_layers = []
    prev = np.zeros((0, m.dim), dtype=np.int64)
    for s in socs:
        soc_layers.append(layer_factors(m, s, prev))
        prev = s
    rad_layers = []
    prev = np.eye(m.dim, dtype=np.int64)
    for r in rads:
        rad_layers.append(layer_factors(m, prev, r))
        prev = r
    return StructureSeries(socs, rads, composition_factors(m), soc_layers, rad_layers)


def socle_multiplicities(m: Representation) -> np.ndarray:
    soc = socle_basis(m)
    if soc.shape[0] == 0:
        return np.zeros(m.algebra.n_points, dtype=np.int64)
    sub, _ = submodule(m, soc) if soc.shape[0] < m.dim else (m, None)
    return composition_factors(sub)


def top_multiplicities(m: Representation) -> np.ndarray:
    rad = radical_basis(m)
    q, _, _ = quotient(m, rad)
    return composition_factors(q)


# -- catalog --------------------------------------------------------------------------


@dataclass(eq=False)
class StandardCatalog:
    """Simples, indecomposable projectives and injectives of a basic presentation."""

    algebra: Algebra
    simples: list
    projectives: list
    injectives: list
    top_maps: list           # P_j -> S_j
    socle_maps: list         # S_j -> E_j
    end_dims: list           # dim End(S_j)
    simple_idempotent_dims: list

    @property
    def size(self) -> int:
        return len(self.simples)

    def injective_sum(self, mults: Sequence[int]) -> Representation:
        parts = [self.injectives[j] for j, k in enumerate(mults) for _ in range(int(k))]
        if not parts:
            return zero_module(self.algebra)
        return direct_sum(parts, "+".join(f"E{j + 1}^{k}" for j, k in enumerate(mults) if k))

    def simple_sum(self, mults: Sequence[int]) -> Representation:
        parts = [self.simples[j] for j, k in enumerate(mults) for _ in range(int(k))]
        return direct_sum(parts) if parts else zero_module(self.algebra)


_CATALOGS: "weakref.WeakKeyDictionary[Algebra, StandardCatalog]" = weakref.WeakKeyDictionary()


class NonPrimitiveIdempotents(ValueError):
    pass


def standard_catalog(alg: Algebra) -> StandardCatalog:
    """Build (once per algebra) the catalog of simples, projectives and injectives."""
    cached = _CATALOGS.get(alg)
    if cached is not None:
        return cached
    if not alg.primitive:
        raise NonPrimitiveIdempotents(f"{alg.name}: idempotents are not primitive")
    fld = alg.field
    simples, projs, injs, tops, socs, ends, sdims = [], [], [], [], [], [], []
    rad = alg.radical
    for i, e in enumerate(alg.point_representatives):
        u = Subspace.of(fld, alg.left_mult(e), alg.dim)
        act = fld.matmul(u.basis, alg.regular_right)[..., list(u.pivots)]
        proj = Representation(alg, act, f"P{i + 1}")
        if rad.shape[0]:
            imgs = fld.matmul(u.basis, np.stack([alg.right_mult(r) for r in rad])).reshape(-1, alg.dim)
            sub_rows = u.coords(imgs)
        else:
            sub_rows = np.zeros((0, u.dim), dtype=np.int64)
        simple, top, _ = quotient(proj, sub_rows, f"S{i + 1}")
        w = Subspace.of(fld, alg.right_mult(e), alg.dim)
        lam = fld.matmul(w.basis, alg.regular_left)[..., list(w.pivots)]
        inj = Representation(alg, lam.transpose(0, 2, 1).copy(), f"E{i + 1}")
        simples.append(simple)
        projs.append(proj)
        injs.append(inj)
        tops.append(top)
        sdims.append(fld.rank(simple.act(e)))
    for i in range(len(simples)):
        h = hom_space(simples[i], injs[i])
        if h.shape[0] == 0:
            raise NonPrimitiveIdempotents(f"socle of E{i + 1} does not contain S{i + 1}")
        socs.append(h[0])
        ends.append(hom_space(simples[i], simples[i]).shape[0])
    cat = StandardCatalog(alg, simples, projs, injs, tops, socs, ends, sdims)
    _CATALOGS[alg] = cat
    return cat


def verify_catalog(cat: StandardCatalog) -> ValidationReport:
    """Check the catalog invariants (socles, cogeneration, dimension sums)."""
    rep = ValidationReport()
    alg = cat.algebra
    sizes = [len(c) for c in alg.point_classes]
    if sum(k * p.dim for k, p in zip(sizes, cat.projectives)) != alg.dim:
        rep.add("sum dim P != dim A", [p.dim for p in cat.projectives])
    if sum(k * e.dim for k, e in zip(sizes, cat.injectives)) != alg.dim:
        rep.add("sum dim E != dim A", [e.dim for e in cat.injectives])
    for j, s in enumerate(cat.simples):
        for i, e in enumerate(cat.injectives):
            d = hom_space(s, e).shape[0]
            want = cat.end_dims[j] if i == j else 0
            if d != want:
                rep.add("socle of injective", (j, i, d))
        if all(hom_space(s, e).shape[0] == 0 for e in cat.injectives):
            rep.add("not cogenerating", j)
    for j, s in enumerate(cat.simples):
        for i, t in enumerate(cat.simples):
            if i != j and hom_space(s, t).shape[0]:
                rep.add("simples not distinct", (j, i))
    return rep


# -- semisimple decomposition and injective hulls --------------------------------------


def semisimple_decomposition(m: Representation):
    """Explicit isomorphism from a direct sum of catalog simples onto m.

    Returns ``(mults, iso)`` with ``iso`` of shape (dim m, dim m), rows
    ordered as the summands S_1^{m_1}, S_2^{m_2}, ...  Raises ValueError if
    m is not semisimple.
    """
    fld = m.field
    cat = standard_catalog(m.algebra)
    blocks = []
    mults = np.zeros(cat.size, dtype=np.int64)
    current = Subspace.of(fld, np.zeros((0, m.dim), dtype=np.int64), m.dim)
    for j, s in enumerate(cat.simples):
        for h in hom_space(s, m):
            if not current.contains(h):
                blocks.append(h)
                mults[j] += 1
                current = Subspace.of(fld, np.concatenate([current.basis, h]), m.dim)
    if current.dim != m.dim:
        raise ValueError("module is not semisimple")
    iso = np.concatenate(blocks) if blocks else np.zeros((0, m.dim), dtype=np.int64)
    return mults, iso


@dataclass(eq=False)
class InjectiveHull:
    hull: Representation
    embed: ModuleHom
    multiplicities: np.ndarray


def _extend(fld, m: Representation, target: Representation, inc: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Find f in Hom(m, target) with inc @ f == g."""
    homs = hom_space(m, target)
    if homs.shape[0] == 0:
        if np.any(g):
            raise ExtensionFailure("no homomorphisms to extend along")
        return np.zeros((m.dim, target.dim), dtype=np.int64)
    restricted = fld.matmul(inc, homs).reshape(homs.shape[0], -1)
    x = fld.solve_left(restricted, g.reshape(1, -1))
    if x is None:
        raise ExtensionFailure("socle map does not extend")
    return fld.combine(x.ravel(), homs)


def injective_hull(m: Representation) -> InjectiveHull:
    """Embed m into a sum of catalog injectives extending its socle."""
    fld = m.field
    cat = standard_catalog(m.algebra)
    if m.dim == 0:
        z = zero_module(m.algebra)
        return InjectiveHull(z, ModuleHom(m, z, np.zeros((0, 0), dtype=np.int64)),
                             np.zeros(cat.size, dtype=np.int64))
    soc = socle_basis(m)
    soc_mod, inc = submodule(m, soc) if soc.shape[0] < m.dim else (m, np.eye(m.dim, dtype=np.int64))
    mults, iso = semisimple_decomposition(soc_mod)
    hull = cat.injective_sum(mults)
    sock = block_diag([cat.socle_maps[j] for j, k in enumerate(mults) for _ in range(int(k))])
    # soc -> sum of simples -> hull
    g = fld.matmul(fld.invert(iso), sock)
    f = _extend(fld, m, hull, inc, g)
    if fld.rank(f) != m.dim:
        raise ExtensionFailure("extension of the socle embedding is not injective")
    return InjectiveHull(hull, ModuleHom(m, hull, f), mults)


@dataclass(eq=False)
class InjectiveDecomposition:
    multiplicities: np.ndarray
    iso: ModuleHom          # from the module onto the catalog sum


def injective_decompose(e: Representation) -> InjectiveDecomposition:
    """Multiplicities of catalog injectives in an injective module, with an explicit iso."""
    cat = standard_catalog(e.algebra)
    mults = socle_multiplicities(e)
    expected = sum(int(k) * cat.injectives[j].dim for j, k in enumerate(mults))
    if expected != e.dim:
        raise NotInjective(f"dim {e.dim} but hull of socle has dim {expected}")
    hull = injective_hull(e)
    if not e.field.is_invertible(hull.embed.matrix):
        raise NotInjective("hull embedding is not onto")
    return InjectiveDecomposition(mults, hull.embed)


def is_injective(m: Representation) -> bool:
    try:
        injective_decompose(m)
    except NotInjective:
        return False
    return True


# -- isomorphism ----------------------------------------------------------------------


def iso_test(m: Representation, n: Representation, seed: int = 0) -> ModuleHom:
    """An explicit isomorphism m -> n, or NotIsomorphic / IsomorphismUnknown."""
    if m.algebra is not n.algebra:
        raise AlgebraMismatch(f"{m.algebra.name} vs {n.algebra.name}")
    fld = m.field
    if m.dim != n.dim:
        raise NotIsomorphic(f"dimensions differ ({m.dim} vs {n.dim})")
    if m.dim == 0:
        return ModuleHom(m, n, np.zeros((0, 0), dtype=np.int64))
    if m.algebra.primitive:
        if not np.array_equal(composition_factors(m), composition_factors(n)):
            raise NotIsomorphic("composition factors differ")
        if not np.array_equal(socle_multiplicities(m), socle_multiplicities(n)):
            raise NotIsomorphic("socle multiplicities differ")
        if not np.array_equal(top_multiplicities(m), top_multiplicities(n)):
            raise NotIsomorphic("top multiplicities differ")
    homs = hom_space(m, n, seed)
    if homs.shape[0] != hom_space(m, m, seed).shape[0]:
        raise NotIsomorphic("dim Hom(M,N) != dim End(M)")
    found, exhausted = find_invertible(fld, homs, seed)
    if found is not None:
        return ModuleHom(m, n, found)
    if exhausted:
        raise NotIsomorphic("no invertible homomorphism exists")
    raise IsomorphismUnknown("randomized search exhausted")


def is_isomorphic(m: Representation, n: Representation, seed: int = 0) -> bool:
    try:
        iso_test(m, n, seed)
    except NotIsomorphic:
        return False
    return True


# -- projectivity ----------------------------------------------------------------------


@dataclass(eq=False)
class ProjectiveSplitting:
    """Free cover pi: A^d -> M on a basis of M and a section sigma.

    ``cover`` has shape (d * n, d) and ``section`` (d, d * n); the
    composite ``section @ cover`` is the identity on M.  Block k of the
    section is a homomorphism M -> A, giving dual bases
    m = sum_k m_k . section_k(m).
    """

    module: Representation
    cover: np.ndarray
    section: np.ndarray

    def components(self) -> np.ndarray:
        d, n = self.module.dim, self.module.algebra.dim
        return self.section.reshape(d, d, n).transpose(1, 0, 2).copy()


def free_cover(m: Representation) -> np.ndarray:
    d, n = m.dim, m.algebra.dim
    # row (k, j) is m_k . b_j
    return m.action.transpose(1, 0, 2).reshape(d * n, d).copy()


def is_projective(m: Representation, seed: int = 0) -> ProjectiveSplitting:
    fld = m.field
    alg = m.algebra
    d, n = m.dim, alg.dim
    if d == 0:
        return ProjectiveSplitting(m, np.zeros((0, 0), dtype=np.int64), np.zeros((0, 0), dtype=np.int64))
    homs = hom_space(m, regular_module(alg), seed)          # (h, d, n)
    h = homs.shape[0]
    cover = free_cover(m)
    if h == 0:
        raise NotProjective("Hom(M, A) = 0")
    # sigma_k = sum_l c[k,l] homs[l];  sum_k sigma_k @ pi_k = I
    pis = cover.reshape(d, n, d)                                # pi_k: A -> M
    prods = fld.matmul(homs[:, None], pis[None, :])             # (h, d, d, d)
    system = prods.transpose(1, 0, 2, 3).reshape(d * h, d * d)  # unknown index (k, l)
    target = np.eye(d, dtype=np.int64).reshape(1, -1)
    x = fld.solve_left(system, target)
    if x is None:
        raise NotProjective("free cover does not split")
    coeffs = x.reshape(d, h)
    sigma = fld.matmul(coeffs, homs.reshape(h, d * n)).reshape(d, d, n)
    section = sigma.transpose(1, 0, 2).reshape(d, d * n)
    if not np.array_equal(fld.matmul(section, cover), np.eye(d, dtype=np.int64)):
        raise ArithmeticError("splitting failed verification")
    return ProjectiveSplitting(m, cover, section)


# -- torsion ----------------------------------------------------------------------------


def torsion_submodule(m: Representation, killed) -> tuple[Representation, np.ndarray]:
    """Largest submodule whose composition factors lie in ``killed``.

    Built by repeatedly adding the K-part of the socle of the quotient.
    """
    fld = m.field
    alg = m.algebra
    killed = sorted(set(int(k) for k in killed))
    ek = alg.point_idempotent(killed)
    cur = np.zeros((0, m.dim), dtype=np.int64)
    while True:
        if cur.shape[0] == m.dim:
            break
        q, proj, lift = quotient(m, cur)
        soc = socle_basis(q)
        if soc.shape[0] == 0:
            break
        gens = fld.matmul(soc, q.act(ek))
        if not np.any(gens):
            break
        sub = fld.matmul(gens, q.action).reshape(-1, q.dim)  # generated submodule
        new = fld.matmul(sub, lift)
        grown = Subspace.of(fld, np.concatenate([cur, new]), m.dim).basis
        if grown.shape[0] == cur.shape[0]:
            break
        cur = grown
    if cur.shape[0] == m.dim:
        return m, np.eye(m.dim, dtype=np.int64)
    return submodule(m, cur)


def annihilated_by(m: Representation, e: np.ndarray) -> np.ndarray:
    """Basis of {x : x . b . e = 0 for all b}, the largest submodule killed by e."""
    fld = m.field
    if m.dim == 0:
        return np.zeros((0, 0), dtype=np.int64)
    re_ = m.act(e)
    mats = fld.matmul(m.action, re_)
    wide = np.concatenate(list(mats), axis=1)
    return fld.left_nullspace(wide)


__all__ = [
    "Representation",
    "ModuleHom",
    "StandardCatalog",
    "StructureSeries",
    "InjectiveHull",
    "InjectiveDecomposition",
    "ProjectiveSplitting",
    "NotIsomorphic",
    "IsomorphismUnknown",
    "NotProjective",
    "NotInjective",
    "ExtensionFailure",
    "NonPrimitiveIdempotents",
    "intertwiners",
    "hom_space",
    "find_invertible",
    "submodule",
    "quotient",
    "direct_sum",
    "zero_module",
    "regular_module",
    "block_diag",
    "socle_basis",
    "radical_basis",
    "composition_factors",
    "factor_support",
    "structure_series",
    "socle_multiplicities",
    "top_multiplicities",
    "standard_catalog",
    "verify_catalog",
    "semisimple_decomposition",
    "injective_hull",
    "injective_decompose",
    "is_injective",
    "iso_test",
    "is_isomorphic",
    "is_projective",
    "free_cover",
    "torsion_submodule",
    "annihilated_by",
    "is_invariant",
]
