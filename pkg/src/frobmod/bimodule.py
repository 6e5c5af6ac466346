"""Bimodules, tensor products, duals and Frobenius certificates.

Conventions follow :mod:`frobmod.module`: vectors are rows, a right action
of ``b`` is ``v @ right[b]`` and a left action of ``a`` is ``v @ left[a]``,
so left actions compose as ``left(ab) = left(b) @ left(a)``.  An element
of a tensor product ``X (x) M`` is stored by its coordinates in a fixed
complement of the relation span inside ``X (x)_k M``.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np

from .algebra import (Algebra, AlgebraMismatch, Corner, ValidationReport, corner, enveloping, is_isomorphism,
                      opposite, product)
from .exactla import PrimeField, Subspace
from .module import (IsomorphismUnknown, ModuleHom, NotIsomorphic, NotProjective, ProjectiveSplitting,
                     Representation, _validate_action, block_diag, find_invertible, intertwiners,
                     is_projective)


class InvalidBimodule(ValueError):
    """Raised when bimodule data violates an action axiom."""


class ActionsDoNotCommute(InvalidBimodule):
    pass


class NotAutomorphism(ValueError):
    pass


class NotLeftProjective(Exception):
    pass


class NotRightProjective(Exception):
    pass


class DualsNotIsomorphic(Exception):
    pass


class FrobeniusUnknown(IsomorphismUnknown):
    """The isomorphism search between the duals gave up without a verdict."""


class AdjunctionFailure(ArithmeticError):
    """A unit/counit identity failed; indicates an internal error."""


# -- the bimodule type --------------------------------------------------------------


@dataclass(eq=False)
class Bimodule:
    """An (A, B)-bimodule given by commuting left and right action stacks."""

    left_algebra: Algebra
    right_algebra: Algebra
    left: np.ndarray
    right: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        if self.left_algebra.field != self.right_algebra.field:
            raise AlgebraMismatch("bimodule over algebras with different fields")
        p = self.field.p
        nA, nB = self.left_algebra.dim, self.right_algebra.dim
        left = np.asarray(self.left, dtype=np.int64)
        right = np.asarray(self.right, dtype=np.int64)
        d = left.shape[-1] if left.ndim == 3 else (right.shape[-1] if right.ndim == 3 else 0)
        if left.size == 0:
            left = np.zeros((nA, d, d), dtype=np.int64)
        if right.size == 0:
            right = np.zeros((nB, d, d), dtype=np.int64)
        if left.shape != (nA, d, d) or right.shape != (nB, d, d):
            raise InvalidBimodule(f"action shapes {left.shape}, {right.shape} do not fit ({nA},{nB},{d})")
        self.left = np.mod(left, p)
        self.right = np.mod(right, p)

    def __repr__(self) -> str:
        return (f"Bimodule({self.name or '?'}, dim={self.dim}, "
                f"({self.left_algebra.name}, {self.right_algebra.name}))")

    @property
    def field(self) -> PrimeField:
        return self.left_algebra.field

    @property
    def dim(self) -> int:
        return self.left.shape[1]

    def act_left(self, a: np.ndarray) -> np.ndarray:
        return self.field.combine(a, self.left)

    def act_right(self, b: np.ndarray) -> np.ndarray:
        return self.field.combine(b, self.right)

    @cached_property
    def left_module(self) -> Representation:
        """The underlying left A-module, as a right module over A^op."""
        return Representation(opposite(self.left_algebra), self.left, f"{self.name}|left")

    @cached_property
    def right_module(self) -> Representation:
        return Representation(self.right_algebra, self.right, f"{self.name}|right")

    def validate(self) -> ValidationReport:
        rep = ValidationReport()
        for axiom, witness in _validate_action(self.left_algebra, self.left, left=True).failures:
            rep.add(f"left {axiom}", witness)
        for axiom, witness in _validate_action(self.right_algebra, self.right, left=False).failures:
            rep.add(f"right {axiom}", witness)
        fld = self.field
        lg = fld.combine_stack(self.left_algebra.generators, self.left)
        rg = fld.combine_stack(self.right_algebra.generators, self.right)
        if lg.shape[0] and rg.shape[0] and self.dim:
            lr = fld.matmul(lg[:, None], rg[None, :])
            rl = fld.matmul(rg[None, :], lg[:, None])
            bad = np.argwhere(np.any(lr != rl, axis=(2, 3)))
            if bad.size:
                rep.add("actions commute", tuple(int(v) for v in bad[0]))
        return rep

    def ensure_valid(self) -> "Bimodule":
        rep = self.validate()
        if not rep.ok:
            axiom, witness = rep.failures[0]
            kind = ActionsDoNotCommute if axiom == "actions commute" else InvalidBimodule
            raise kind(f"{self.name or 'bimodule'}: {axiom} fails (witness {witness})")
        return self

    @cached_property
    def projectors(self) -> Optional[list]:
        """Commuting idempotent projectors lambda(e_i) rho(f_j), when available."""
        a, b = self.left_algebra, self.right_algebra
        if not (a.primitive and b.primitive and a.n_idempotents and b.n_idempotents):
            return None
        fld = self.field
        return [fld.matmul(self.act_left(e), self.act_right(f))
                for e in a.idempotents for f in b.idempotents]

    def generator_actions(self) -> np.ndarray:
        """Left then right actions of the algebra generators, stacked."""
        fld = self.field
        return np.concatenate([fld.combine_stack(self.left_algebra.generators, self.left),
                               fld.combine_stack(self.right_algebra.generators, self.right)])


@dataclass(eq=False)
class BimoduleHom:
    source: Bimodule
    target: Bimodule
    matrix: np.ndarray

    def is_valid(self) -> bool:
        fld = self.source.field
        s, t = self.source, self.target
        return bool(np.array_equal(fld.matmul(s.left, self.matrix), fld.matmul(self.matrix, t.left))
                    and np.array_equal(fld.matmul(s.right, self.matrix), fld.matmul(self.matrix, t.right)))

    def then(self, other: "BimoduleHom") -> "BimoduleHom":
        return BimoduleHom(self.source, other.target, self.source.field.matmul(self.matrix, other.matrix))


def _same_sides(m: Bimodule, n: Bimodule) -> None:
    if m.left_algebra is not n.left_algebra or m.right_algebra is not n.right_algebra:
        raise AlgebraMismatch(f"{m.name} and {n.name} live over different algebras")


def bimodule_homs(m: Bimodule, n: Bimodule, seed: int = 0) -> np.ndarray:
    """Basis of bimodule homomorphisms m -> n, shape (k, dim m, dim n)."""
    _same_sides(m, n)
    pm, pn = m.projectors, n.projectors
    return intertwiners(m.field, m.generator_actions(), n.generator_actions(), pm, pn, seed)


def bimodule_iso(m: Bimodule, n: Bimodule, seed: int = 0) -> BimoduleHom:
    """An explicit bimodule isomorphism, or NotIsomorphic / IsomorphismUnknown."""
    _same_sides(m, n)
    if m.dim != n.dim:
        raise NotIsomorphic(f"dimensions differ ({m.dim} vs {n.dim})")
    if m.dim == 0:
        return BimoduleHom(m, n, np.zeros((0, 0), dtype=np.int64))
    homs = bimodule_homs(m, n, seed)
    if homs.shape[0] != bimodule_homs(m, m, seed).shape[0]:
        raise NotIsomorphic("dim Hom(M,N) != dim End(M)")
    found, exhausted = find_invertible(m.field, homs, seed)
    if found is not None:
        return BimoduleHom(m, n, found)
    if exhausted:
        raise NotIsomorphic("no invertible bimodule homomorphism exists")
    raise IsomorphismUnknown("randomized search exhausted")


def bimodules_isomorphic(m: Bimodule, n: Bimodule, seed: int = 0) -> bool:
    try:
        bimodule_iso(m, n, seed)
    except NotIsomorphic:
        return False
    return True


# -- constructors -------------------------------------------------------------------


def regular(a: Algebra) -> Bimodule:
    """A as an (A, A)-bimodule."""
    return Bimodule(a, a, a.regular_left, a.regular_right, f"reg({a.name})")


def twist(a: Algebra, phi: np.ndarray, name: str = "") -> Bimodule:
    """The bimodule A_phi: left regular, right action b acts as right multiplication by phi(b).

    ``phi`` is the matrix whose row k is phi(b_k).
    """
    phi = np.mod(np.asarray(phi, dtype=np.int64), a.field.p)
    if phi.shape != (a.dim, a.dim) or not is_isomorphism(a, a, phi):
        raise NotAutomorphism(f"matrix does not define an automorphism of {a.name}")
    right = a.field.combine_stack(phi, a.regular_right)
    return Bimodule(a, a, a.regular_left, right, name or f"1{a.name}_phi").ensure_valid()


def quotient_by_ideal(a: Algebra, ideal: np.ndarray, target: Algebra, projection: np.ndarray,
                      name: str = "") -> Bimodule:
    """A/I as an (A, C)-bimodule, where ``projection`` (dim A x dim C) maps A onto C with kernel I."""
    fld = a.field
    pi = np.mod(np.asarray(projection, dtype=np.int64), fld.p).reshape(a.dim, target.dim)
    ideal_space = Subspace.of(fld, np.asarray(ideal, dtype=np.int64).reshape(-1, a.dim), a.dim)
    kernel = Subspace.of(fld, fld.left_nullspace(pi), a.dim)
    if kernel.dim != ideal_space.dim or not all(kernel.contains(v) for v in ideal_space.basis):
        raise InvalidBimodule("projection kernel is not the given ideal")
    if fld.rank(pi) != target.dim:
        raise InvalidBimodule("projection is not onto the target algebra")
    lhs = fld.matmul(a._flat, pi)
    rhs = target.mul(pi[:, None, :], pi[None, :, :]).reshape(-1, target.dim)
    if not np.array_equal(lhs, rhs) or not np.array_equal(fld.matmul(a.unit.reshape(1, -1), pi).ravel(),
                                                          target.unit):
        raise InvalidBimodule("projection is not an algebra homomorphism")
    left = fld.combine_stack(pi, target.regular_left)
    return Bimodule(a, target, left, target.regular_right, name or f"{a.name}/I").ensure_valid()


def corner_slice(m: Bimodule, left_surviving: Union[Sequence[int], Corner],
                 right_surviving: Union[Sequence[int], Corner], name: str = "") -> Bimodule:
    """e'Me'' as a bimodule over the corner algebras e'Ae' and e''Be''.

    Either side may be given as idempotent indices or as an existing
    :class:`Corner`, so that the slice lives over that very corner algebra.
    """
    fld = m.field
    ca = left_surviving if isinstance(left_surviving, Corner) else corner(m.left_algebra, left_surviving)
    cb = right_surviving if isinstance(right_surviving, Corner) else corner(m.right_algebra, right_surviving)
    proj = fld.matmul(m.act_left(ca.idempotent), m.act_right(cb.idempotent))
    space = Subspace.of(fld, proj, m.dim)
    piv = list(space.pivots)
    left = fld.matmul(space.basis, fld.combine_stack(ca.inclusion, m.left))[..., piv]
    right = fld.matmul(space.basis, fld.combine_stack(cb.inclusion, m.right))[..., piv]
    return Bimodule(ca.algebra, cb.algebra, left, right, name or f"{m.name}|corner").ensure_valid()


def triangular_algebra(a: Algebra, b: Algebra, m: Bimodule, name: Optional[str] = None) -> Algebra:
    """The matrix ring [[A, 0], [M, B]] for a (B, A)-bimodule M.

    Elements are triples (a, m, b) in that basis order and multiply as
    [[a, 0], [m, b]] [[a', 0], [m', b']] = [[a a', 0], [m a' + b m', b b']].
    The distinguished idempotents are the units of A and B (together with
    any finer idempotents the factors carry).
    """
    if m.left_algebra is not b or m.right_algebra is not a:
        raise AlgebraMismatch("bimodule must be a (B, A)-bimodule")
    fld = a.field
    na, nm, nb = a.dim, m.dim, b.dim
    n = na + nm + nb
    c = np.zeros((n, n, n), dtype=np.int64)
    sa, sm, sb = slice(0, na), slice(na, na + nm), slice(na + nm, n)
    c[sa, sa, sa] = a.structure
    c[sb, sb, sb] = b.structure
    c[sm, sa, sm] = m.right.transpose(1, 0, 2)            # m_s a_i = e_s @ right[a_i]
    c[sb, sm, sm] = m.left                                # b_k m_s = e_s @ left[b_k]
    unit = np.concatenate([a.unit, np.zeros(nm, dtype=np.int64), b.unit])
    idem = [np.concatenate([e, np.zeros(nm + nb, dtype=np.int64)]) for e in a.idempotents]
    idem += [np.concatenate([np.zeros(na + nm, dtype=np.int64), f]) for f in b.idempotents]
    rad = [np.concatenate([r, np.zeros(nm + nb, dtype=np.int64)]) for r in a.radical]
    rad += [np.eye(n, dtype=np.int64)[na + s] for s in range(nm)]
    rad += [np.concatenate([np.zeros(na + nm, dtype=np.int64), r]) for r in b.radical]
    labels = tuple(f"{x}|A" for x in a.labels) + tuple(f"m{s + 1}" for s in range(nm)) + \
        tuple(f"{y}|B" for y in b.labels)
    return Algebra(fld, c, unit, np.array(idem).reshape(-1, n), labels,
                   name or f"[[{a.name},0],[{m.name},{b.name}]]",
                   radical_hint=np.array(rad, dtype=np.int64).reshape(-1, n)).ensure_valid()


def product_of(algebras: Sequence[Algebra], name: Optional[str] = None) -> Algebra:
    """Iterated direct product; the basis is the concatenation of the factor bases."""
    out = algebras[0]
    for nxt in algebras[1:]:
        out = product(out, nxt)
    if name:
        out.name = name
    return out


def external_sum(parts: dict, left_factors: Sequence[Algebra], right_factors: Sequence[Algebra],
                 left_algebra: Optional[Algebra] = None, right_algebra: Optional[Algebra] = None,
                 name: str = "") -> Bimodule:
    """Sum of (A_i, B_j)-bimodules as a bimodule over the products of the factors.

    ``parts`` maps (i, j) to a bimodule over (left_factors[i], right_factors[j]);
    the factor A_i acts only on the summands with first index i.
    """
    a = left_algebra or product_of(left_factors)
    b = right_algebra or product_of(right_factors)
    if a.dim != sum(x.dim for x in left_factors) or b.dim != sum(x.dim for x in right_factors):
        raise AlgebraMismatch("product algebra does not match its factors")
    keys = sorted(parts)
    for (i, j) in keys:
        part = parts[(i, j)]
        if part.left_algebra is not left_factors[i] or part.right_algebra is not right_factors[j]:
            raise AlgebraMismatch(f"summand {(i, j)} lives over the wrong factors")
    a_off = np.cumsum([0] + [x.dim for x in left_factors])
    b_off = np.cumsum([0] + [x.dim for x in right_factors])
    sizes = [parts[k].dim for k in keys]
    d = sum(sizes)
    d_off = np.cumsum([0] + sizes)
    left = np.zeros((a.dim, d, d), dtype=np.int64)
    right = np.zeros((b.dim, d, d), dtype=np.int64)
    for pos, (i, j) in enumerate(keys):
        part = parts[(i, j)]
        s = slice(d_off[pos], d_off[pos + 1])
        left[a_off[i]:a_off[i + 1], s, s] = part.left
        right[b_off[j]:b_off[j + 1], s, s] = part.right
    return Bimodule(a, b, left, right, name or "+".join(parts[k].name for k in keys)).ensure_valid()


def bimodule_sum(mods: Sequence[Bimodule], name: str = "") -> Bimodule:
    first = mods[0]
    for m in mods[1:]:
        _same_sides(first, m)
    left = np.stack([block_diag([m.left[k] for m in mods]) for k in range(first.left_algebra.dim)])
    right = np.stack([block_diag([m.right[k] for m in mods]) for k in range(first.right_algebra.dim)])
    return Bimodule(first.left_algebra, first.right_algebra, left, right,
                    name or "+".join(m.name for m in mods))


def as_module_over_enveloping(m: Bimodule) -> Representation:
    """The bimodule as a right module over A^op (x) B, with a_i (x) b_j acting by left(a_i) right(b_j)."""
    env = enveloping_of(m.left_algebra, m.right_algebra)
    fld = m.field
    act = fld.matmul(m.left[:, None], m.right[None, :]).reshape(-1, m.dim, m.dim)
    return Representation(env, act, f"{m.name}|env")


def from_enveloping(rep: Representation, a: Algebra, b: Algebra) -> Bimodule:
    """Inverse of :func:`as_module_over_enveloping`."""
    fld = a.field
    if rep.algebra is not enveloping_of(a, b):
        raise AlgebraMismatch("module is not over the enveloping algebra of (a, b)")
    left = fld.combine_stack(fld.kron(np.eye(a.dim, dtype=np.int64), b.unit.reshape(1, -1)), rep.action)
    right = fld.combine_stack(fld.kron(a.unit.reshape(1, -1), np.eye(b.dim, dtype=np.int64)), rep.action)
    return Bimodule(a, b, left, right, rep.name).ensure_valid()


_ENVELOPES: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def enveloping_of(a: Algebra, b: Algebra) -> Algebra:
    """Cached enveloping algebra, so repeated conversions share one algebra object."""
    inner = _ENVELOPES.setdefault(a, weakref.WeakKeyDictionary())
    env = inner.get(b)
    if env is None:
        env = enveloping(a, b)
        inner[b] = env
    return env


# -- tensor products ----------------------------------------------------------------


@dataclass(eq=False)
class TensorProduct:
    """X (x)_A M with the maps linking it to the raw space X (x)_k M.

    ``quotient`` (dX*dM x q) sends raw vectors to coordinates and ``lift``
    (q x dX*dM) picks representatives; ``relations`` is the span of
    xa (x) m - x (x) am.
    """

    first: Union[Representation, Bimodule]
    second: Bimodule
    relations: Subspace
    quotient: np.ndarray
    lift: np.ndarray
    result: Union[Representation, Bimodule]

    @property
    def raw_dim(self) -> int:
        return self.relations.ambient

    def coords_of(self, raw: np.ndarray) -> np.ndarray:
        return self.result.field.matmul(raw, self.quotient)

    def of_pair(self, x: np.ndarray, m: np.ndarray) -> np.ndarray:
        """Coordinates of x (x) m."""
        return self.coords_of(self.result.field.kron(x.reshape(1, -1), m.reshape(1, -1)).ravel())


_TENSORS: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _right_action_of(x: Union[Representation, Bimodule]):
    if isinstance(x, Bimodule):
        return x.right_algebra, x.right
    return x.algebra, x.action


def tensor(x: Union[Representation, Bimodule], m: Bimodule) -> TensorProduct:
    """X (x)_A M for a right A-module (or (C, A)-bimodule) X and an (A, B)-bimodule M."""
    inner = _TENSORS.setdefault(x, weakref.WeakKeyDictionary())
    cached = inner.get(m)
    if cached is not None:
        return cached
    alg, x_act = _right_action_of(x)
    if alg is not m.left_algebra:
        raise AlgebraMismatch(f"cannot tensor over {alg.name} with a bimodule over {m.left_algebra.name}")
    fld = m.field
    dX, dM = x_act.shape[-1], m.dim
    raw = dX * dM
    gens = alg.generators
    if raw and gens.shape[0]:
        gx = fld.combine_stack(gens, x_act)
        gm = fld.combine_stack(gens, m.left)
        eye_x, eye_m = np.eye(dX, dtype=np.int64), np.eye(dM, dtype=np.int64)
        rels = np.concatenate([fld.sub(fld.kron(gx[k], eye_m), fld.kron(eye_x, gm[k]))
                               for k in range(gens.shape[0])])
    else:
        rels = np.zeros((0, raw), dtype=np.int64)
    space = Subspace.of(fld, rels, raw)
    q, lift = space.quotient_map(), space.lift_map()
    eye_x = np.eye(dX, dtype=np.int64)
    right = np.stack([fld.chain(lift, fld.kron(eye_x, m.right[k]), q) for k in range(m.right_algebra.dim)]) \
        if m.right_algebra.dim else np.zeros((0, q.shape[1], q.shape[1]), dtype=np.int64)
    label = f"{getattr(x, 'name', '') or '?'}(x){m.name or '?'}"
    if isinstance(x, Bimodule):
        eye_m = np.eye(dM, dtype=np.int64)
        left = np.stack([fld.chain(lift, fld.kron(x.left[k], eye_m), q) for k in range(x.left_algebra.dim)]) \
            if x.left_algebra.dim else np.zeros((0, q.shape[1], q.shape[1]), dtype=np.int64)
        result = Bimodule(x.left_algebra, m.right_algebra, left, right, label)
    else:
        result = Representation(m.right_algebra, right, label)
    tp = TensorProduct(x, m, space, q, lift, result)
    inner[m] = tp
    return tp


def tensor_hom(f: Union[ModuleHom, BimoduleHom], m: Bimodule) -> ModuleHom:
    """f (x) id_M as a homomorphism between the two tensor products."""
    src, tgt = tensor(f.source, m), tensor(f.target, m)
    fld = m.field
    mat = fld.chain(src.lift, fld.kron(f.matrix, np.eye(m.dim, dtype=np.int64)), tgt.quotient)
    cls = BimoduleHom if isinstance(f, BimoduleHom) else ModuleHom
    return cls(src.result, tgt.result, mat)


def tensor_map(x: Union[Representation, Bimodule], h: BimoduleHom) -> ModuleHom:
    """id_X (x) h : X (x) M -> X (x) N for a bimodule map h: M -> N."""
    src, tgt = tensor(x, h.source), tensor(x, h.target)
    fld = h.source.field
    mat = fld.chain(src.lift, fld.kron(np.eye(x.dim, dtype=np.int64), h.matrix), tgt.quotient)
    cls = BimoduleHom if isinstance(x, Bimodule) else ModuleHom
    return cls(src.result, tgt.result, mat)


def associator(x: Union[Representation, Bimodule], m: Bimodule, n: Bimodule) -> np.ndarray:
    """Explicit isomorphism (X (x) M) (x) N -> X (x) (M (x) N)."""
    fld = m.field
    xm = tensor(x, m)
    outer_l = tensor(xm.result, n)
    mn = tensor(m, n)
    outer_r = tensor(x, mn.result)
    dX = x.dim
    raw_triple = fld.matmul(outer_l.lift, fld.kron(xm.lift, np.eye(n.dim, dtype=np.int64)))
    into = fld.kron(np.eye(dX, dtype=np.int64), mn.quotient)
    return fld.chain(raw_triple, into, outer_r.quotient)


def left_unitor(m: Bimodule) -> np.ndarray:
    """A (x)_A M -> M, a (x) v -> a v, as a matrix on tensor coordinates."""
    a = m.left_algebra
    tp = tensor(_regular_right_module(a), m)
    raw = m.left.reshape(a.dim * m.dim, m.dim)       # row (i, s) = e_s . left(a_i)
    return m.field.matmul(tp.lift, raw)


def right_unitor(m: Bimodule) -> np.ndarray:
    """M (x)_B B -> M, v (x) b -> v b."""
    b = m.right_algebra
    tp = tensor(m, regular_bimodule_cached(b))
    raw = m.right.transpose(1, 0, 2).reshape(m.dim * b.dim, m.dim)   # row (s, j) = e_s . right(b_j)
    return m.field.matmul(tp.lift, raw)


_REGULARS: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def regular_bimodule_cached(a: Algebra) -> Bimodule:
    got = _REGULARS.get(a)
    if got is None:
        got = regular(a)
        _REGULARS[a] = got
    return got


def _regular_right_module(a: Algebra) -> Representation:
    from .module import regular_module
    return regular_module(a)


# -- duals ---------------------------------------------------------------------------


@dataclass(eq=False)
class Dual:
    """A one-sided dual of M, realized as a (B, A)-bimodule of explicit maps.

    ``maps`` has shape (r, dim M, n) and row t of the result corresponds
    to ``maps[t]``: a left A-linear map M -> A for the left dual, a right
    B-linear map M -> B for the right dual.
    """

    source: Bimodule
    side: str
    maps: np.ndarray
    space: Subspace
    bimodule: Bimodule

    def coords(self, maps: np.ndarray) -> np.ndarray:
        """Coordinates of maps (shape (..., dim M, n)) lying in the dual."""
        flat = maps.reshape(maps.shape[:-2] + (-1,))
        return self.space.coords(flat)

    def contains(self, f: np.ndarray) -> bool:
        return self.space.contains(f.reshape(-1))


def dual(m: Bimodule, side: str, seed: int = 0) -> Dual:
    """Hom_A(M, A) (side 'left') or Hom_B(M, B) (side 'right') as a (B, A)-bimodule."""
    cache = m.__dict__.setdefault("_duals", {})
    if side in cache:
        return cache[side]
    fld = m.field
    a, b = m.left_algebra, m.right_algebra
    if side == "left":
        gens = a.generators
        acts_m = fld.combine_stack(gens, m.left)
        acts_t = fld.combine_stack(gens, a.regular_left)
        use = a.primitive and a.n_idempotents
        pm = [m.act_left(e) for e in a.idempotents] if use else None
        pt = [a.left_mult(e) for e in a.idempotents] if use else None
        target_dim = a.dim
    elif side == "right":
        gens = b.generators
        acts_m = fld.combine_stack(gens, m.right)
        acts_t = fld.combine_stack(gens, b.regular_right)
        use = b.primitive and b.n_idempotents
        pm = [m.act_right(f) for f in b.idempotents] if use else None
        pt = [b.right_mult(f) for f in b.idempotents] if use else None
        target_dim = b.dim
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    maps = intertwiners(fld, acts_m, acts_t, pm, pt, seed)
    r = maps.shape[0]
    space = Subspace.of(fld, maps.reshape(r, m.dim * target_dim), m.dim * target_dim)
    piv = list(space.pivots)

    def action(images: np.ndarray) -> np.ndarray:
        # images[k, t] is the map obtained by acting with basis element k on maps[t]
        return images.reshape(images.shape[0], r, m.dim * target_dim)[..., piv]

    if side == "left":
        lb = action(fld.matmul(m.right[:, None], maps[None]))                  # b.f = right(b) f
        ra = action(fld.matmul(maps[None], a.regular_right[:, None]))          # f.a = f right_A(a)
    else:
        lb = action(fld.matmul(maps[None], b.regular_left[:, None]))           # b.g = g left_B(b)
        ra = action(fld.matmul(m.left[:, None], maps[None]))                   # g.a = left(a) g
    tag = "*" if side == "left" else "^*"
    bim = Bimodule(b, a, lb, ra, f"({m.name}){tag}").ensure_valid()
    out = Dual(m, side, maps, space, bim)
    cache[side] = out
    return out


def hom_module(p: Bimodule, n: Representation) -> Representation:
    """Hom_C(P, N) as a right B-module for a (B, C)-bimodule P and a right C-module N.

    (phi . b)(x) = phi(b x).  Used to cross-check G = - (x) M^* against
    the hom functor.
    """
    fld = p.field
    c = p.right_algebra
    if n.algebra is not c:
        raise AlgebraMismatch("module does not live over the right algebra of the bimodule")
    gens = c.generators
    use = c.primitive and c.n_idempotents
    maps = intertwiners(fld, fld.combine_stack(gens, p.right), fld.combine_stack(gens, n.action),
                        [p.act_right(f) for f in c.idempotents] if use else None,
                        n.idempotent_projectors if use else None)
    r = maps.shape[0]
    space = Subspace.of(fld, maps.reshape(r, -1), p.dim * n.dim)
    imgs = fld.matmul(p.left[:, None], maps[None]).reshape(p.left_algebra.dim, r, -1)
    out = Representation(p.left_algebra, imgs[..., list(space.pivots)], f"Hom({p.name},{n.name})")
    out.__dict__["_hom_space"] = space          # element i is the map space.basis[i]
    return out


# -- functor pairs and adjunctions ----------------------------------------------------


@dataclass(eq=False)
class FunctorPair:
    """Adjoint functors F = - (x) P : Mod A -> Mod B and G = - (x) Q : Mod B -> Mod A.

    The first adjunction (F left adjoint to G) is given by a central element
    ``unit_element`` of P (x)_B Q (raw coordinates, dim P x dim Q) and a
    contraction ``counit_raw`` from raw Q (x) P to B.  The second (G left
    adjoint to F) uses ``unit2_element`` in Q (x)_A P and ``counit2_raw`` from
    raw P (x) Q to A.
    """

    source_algebra: Algebra
    target_algebra: Algebra
    p: Bimodule
    q: Bimodule
    unit_element: np.ndarray
    counit_raw: np.ndarray
    unit2_element: np.ndarray
    counit2_raw: np.ndarray

    @property
    def frobenius(self) -> bool:
        """Whether the second adjunction (G left adjoint to F) is available."""
        return self.unit2_element is not None

    def dual(self) -> "FunctorPair":
        """The same data read with the roles of the two functors swapped."""
        if not self.frobenius:
            raise ValueError("swapping roles needs both adjunctions")
        return FunctorPair(self.target_algebra, self.source_algebra, self.q, self.p,
                           self.unit2_element, self.counit2_raw, self.unit_element, self.counit_raw)

    # functors
    def F(self, x: Union[Representation, ModuleHom]):
        return _apply(x, self.p, self.source_algebra)

    def G(self, x: Union[Representation, ModuleHom]):
        return _apply(x, self.q, self.target_algebra)

    # natural transformations, as module maps
    def eta(self, x: Representation) -> ModuleHom:
        """X -> GF(X)."""
        return _insert(x, self.p, self.q, self.unit_element)

    def eps(self, n: Representation) -> ModuleHom:
        """FG(N) -> N."""
        return _contract(n, self.q, self.p, self.counit_raw)

    def theta(self, n: Representation) -> ModuleHom:
        """N -> FG(N)."""
        return _insert(n, self.q, self.p, self.unit2_element)

    def xi(self, x: Representation) -> ModuleHom:
        """GF(X) -> X."""
        return _contract(x, self.p, self.q, self.counit2_raw)

    def triangle_defects(self, xs: Sequence[Representation], ns: Sequence[Representation]) -> list:
        """Names of module-level triangle identities that fail on the given modules."""
        fld = self.p.field
        bad = []
        for x in xs:
            fx = self.F(x)
            if not _is_identity(fld, fld.matmul(self.F(self.eta(x)).matrix, self.eps(fx).matrix)):
                bad.append(f"F(eta) eps_F at {x.name}")
            if self.frobenius and not _is_identity(
                    fld, fld.matmul(self.theta(fx).matrix, self.F(self.xi(x)).matrix)):
                bad.append(f"theta_F F(xi) at {x.name}")
        for n in ns:
            gn = self.G(n)
            if not _is_identity(fld, fld.matmul(self.eta(gn).matrix, self.G(self.eps(n)).matrix)):
                bad.append(f"eta_G G(eps) at {n.name}")
            if self.frobenius and not _is_identity(
                    fld, fld.matmul(self.G(self.theta(n)).matrix, self.xi(gn).matrix)):
                bad.append(f"G(theta) xi_G at {n.name}")
        return bad


def _is_identity(fld: PrimeField, mat: np.ndarray) -> bool:
    return mat.shape[0] == mat.shape[1] and np.array_equal(mat, np.eye(mat.shape[0], dtype=np.int64))


def _apply(x, bim: Bimodule, alg: Algebra):
    if isinstance(x, ModuleHom):
        if x.source.algebra is not alg:
            raise AlgebraMismatch(f"homomorphism is not over {alg.name}")
        return tensor_hom(x, bim)
    if x.algebra is not alg:
        raise AlgebraMismatch(f"module is not over {alg.name}")
    return tensor(x, bim).result


def _insert(x: Representation, p: Bimodule, q: Bimodule, element: np.ndarray) -> ModuleHom:
    """x -> (x (x) u) for a central u in P (x) Q, landing in (X (x) P) (x) Q."""
    fld = p.field
    xp = tensor(x, p)
    outer = tensor(xp.result, q)
    dX, dP, qxp = x.dim, p.dim, xp.quotient.shape[1]
    blocks = xp.quotient.reshape(dX, dP, qxp)                     # blocks[i] sends e_k to (e_i (x) e_k)
    raw = fld.matmul(blocks.transpose(0, 2, 1), element[None])     # (dX, qxp, dQ)
    mat = fld.matmul(raw.reshape(dX, -1), outer.quotient)
    return ModuleHom(x, outer.result, mat)


def _contract(n: Representation, q: Bimodule, p: Bimodule, raw_map: np.ndarray) -> ModuleHom:
    """(N (x) Q) (x) P -> N, (v (x) s) (x) t -> v . c(s (x) t)."""
    fld = p.field
    nq = tensor(n, q)
    outer = tensor(nq.result, p)
    dN, dQ, dP = n.dim, q.dim, p.dim
    acts = fld.matmul(raw_map, n.action.reshape(n.algebra.dim, dN * dN)).reshape(dQ, dP, dN, dN)
    contraction = acts.transpose(2, 0, 1, 3).reshape(dN * dQ * dP, dN)      # row (v, s, t)
    expand = fld.kron(nq.lift, np.eye(dP, dtype=np.int64))
    mat = fld.chain(outer.lift, expand, contraction)
    return ModuleHom(outer.result, n, mat)


@dataclass(eq=False)
class AdjunctionSystem:
    """Unit and counit data of both adjunctions, on the level of bimodules.

    ``coevaluation`` is eta(1) in M (x)_B M^*, ``evaluation`` maps
    M^* (x)_A M -> B; ``theta_unit`` is the image of 1 in M^* (x)_A M and
    ``theta_counit`` maps M (x)_B M^* -> A.  Raw arrays use the uncollapsed
    tensor coordinates; the ``*_map`` arrays act on tensor coordinates.
    """

    coevaluation_raw: np.ndarray
    evaluation_raw: np.ndarray
    theta_unit_raw: np.ndarray
    theta_counit_raw: np.ndarray
    coevaluation: np.ndarray
    evaluation_map: np.ndarray
    theta_unit: np.ndarray
    theta_counit_map: np.ndarray
    report: ValidationReport = field(default_factory=ValidationReport)


@dataclass(eq=False)
class FrobeniusCertificate:
    bimodule: Bimodule
    left_splitting: ProjectiveSplitting
    right_splitting: ProjectiveSplitting
    left_dual: Dual
    right_dual: Dual
    theta: BimoduleHom
    theta_inverse: np.ndarray
    adjunction: AdjunctionSystem

    @property
    def dual_bimodule(self) -> Bimodule:
        """M^*, realized as the right dual."""
        return self.right_dual.bimodule

    @cached_property
    def functors(self) -> FunctorPair:
        m = self.bimodule
        adj = self.adjunction
        return FunctorPair(m.left_algebra, m.right_algebra, m, self.dual_bimodule,
                           adj.coevaluation_raw, adj.evaluation_raw, adj.theta_unit_raw, adj.theta_counit_raw)


def frobenius_check(m: Bimodule, seed: int = 0) -> FrobeniusCertificate:
    """Certify that M is a Frobenius bimodule, or raise the reason it is not."""
    try:
        left_split = is_projective(m.left_module, seed)
    except NotProjective as exc:
        raise NotLeftProjective(f"{m.name}: left module not projective ({exc})") from None
    try:
        right_split = is_projective(m.right_module, seed)
    except NotProjective as exc:
        raise NotRightProjective(f"{m.name}: right module not projective ({exc})") from None
    ld, rd = dual(m, "left", seed), dual(m, "right", seed)
    try:
        theta = bimodule_iso(ld.bimodule, rd.bimodule, seed)
    except NotIsomorphic as exc:
        raise DualsNotIsomorphic(f"{m.name}: {exc.reason}") from None
    except IsomorphismUnknown as exc:
        raise FrobeniusUnknown(f"{m.name}: {exc}") from None
    fld = m.field
    theta_inv = fld.invert(theta.matrix) if theta.matrix.size else theta.matrix
    adj = _adjunction(m, ld, rd, theta.matrix, theta_inv, left_split, right_split)
    if not adj.report.ok:
        axiom, witness = adj.report.failures[0]
        raise AdjunctionFailure(f"{m.name}: {axiom} ({witness})")
    return FrobeniusCertificate(m, left_split, right_split, ld, rd, theta, theta_inv, adj)


def _adjunction(m: Bimodule, ld: Optional[Dual], rd: Dual, theta: Optional[np.ndarray],
                theta_inv: Optional[np.ndarray], left_split: Optional[ProjectiveSplitting],
                right_split: ProjectiveSplitting) -> AdjunctionSystem:
    """Unit/counit data and its verification; the second adjunction needs ``theta``."""
    fld = m.field
    a, b = m.left_algebra, m.right_algebra
    d, r = m.dim, rd.maps.shape[0]
    rep = ValidationReport()

    g_coords = rd.coords(right_split.components()) if d else np.zeros((0, r), dtype=np.int64)
    coev_raw = g_coords                                                     # sum_k e_k (x) g_k
    ev_raw = rd.maps.reshape(r * d, b.dim)                                  # (g_t (x) e_s) -> g_t(e_s)
    mr = tensor(m, rd.bimodule)      # (A, A)
    rm = tensor(rd.bimodule, m)      # (B, B)
    coev = mr.coords_of(coev_raw.reshape(-1))
    ev_map = fld.matmul(rm.lift, ev_raw)
    _check_well_defined(rep, "evaluation", rm, ev_raw)
    _check_central(rep, "coevaluation central", mr, coev)
    _check_bilinear(rep, "evaluation bilinear", rm, ev_map, b)

    # zig-zag identities, evaluated on canonical representatives
    u = fld.matmul(coev[None], mr.lift).reshape(d, r)
    ev = rd.maps                                                            # ev[t, s] = g_t(e_s)
    right_of_ev = fld.combine_stack(ev.reshape(r * d, b.dim), m.right).reshape(r, d, d, d)
    z1 = np.mod(np.einsum("kt,tskj->sj", u, right_of_ev), fld.p)
    left_on_dual = fld.combine_stack(ev.transpose(1, 0, 2).reshape(d * r, b.dim),
                                     rd.bimodule.left).reshape(d, r, r, r)  # [k, v] = left(g_v(e_k))
    z2 = np.mod(np.einsum("kt,kvtj->vj", u, left_on_dual), fld.p)
    zigzags = [("zig-zag M (eta, eps)", z1, d), ("zig-zag M* (eta, eps)", z2, r)]

    unit2_raw = ctr2_raw = unit2 = ctr2_map = None
    if theta is not None:
        h_coords = ld.coords(left_split.components()) if d else np.zeros((0, r), dtype=np.int64)
        unit2_raw = fld.matmul(h_coords, theta).T.copy() if d else np.zeros((r, 0), dtype=np.int64)
        phi_inv = fld.combine_stack(theta_inv, ld.maps) if r else ld.maps   # theta^{-1}(g_t)
        ctr2_raw = phi_inv.transpose(1, 0, 2).reshape(d * r, a.dim)         # (e_s (x) g_t) -> theta^{-1}g_t (e_s)
        unit2 = rm.coords_of(unit2_raw.reshape(-1))
        ctr2_map = fld.matmul(mr.lift, ctr2_raw)
        _check_well_defined(rep, "theta counit", mr, ctr2_raw)
        _check_central(rep, "theta unit central", rm, unit2)
        _check_bilinear(rep, "theta counit bilinear", mr, ctr2_map, a)
        v = fld.matmul(unit2[None], rm.lift).reshape(r, d)
        xi = ctr2_raw.reshape(d, r, a.dim)
        left_of_xi = fld.combine_stack(xi.reshape(d * r, a.dim), m.left).reshape(d, r, d, d)
        z3 = np.mod(np.einsum("tk,stkj->sj", v, left_of_xi), fld.p)
        right_on_dual = fld.combine_stack(xi.reshape(d * r, a.dim), rd.bimodule.right).reshape(d, r, r, r)
        z4 = np.mod(np.einsum("tk,kvtj->vj", v, right_on_dual), fld.p)
        zigzags += [("zig-zag M (theta, xi)", z3, d), ("zig-zag M* (theta, xi)", z4, r)]
    for name, z, n in zigzags:
        if not np.array_equal(z, np.eye(n, dtype=np.int64)):
            rep.add(name, None)
    return AdjunctionSystem(coev_raw, ev_raw, unit2_raw, ctr2_raw, coev, ev_map, unit2, ctr2_map, rep)


def _check_well_defined(rep: ValidationReport, name: str, tp: TensorProduct, raw: np.ndarray) -> None:
    if tp.relations.dim and np.any(tp.result.field.matmul(tp.relations.basis, raw)):
        rep.add(f"{name} well defined", None)


def _check_central(rep: ValidationReport, name: str, tp: TensorProduct, vec: np.ndarray) -> None:
    fld, res = tp.result.field, tp.result
    if not np.array_equal(fld.matmul(vec[None], res.left), fld.matmul(vec[None], res.right)):
        rep.add(name, None)


def _check_bilinear(rep: ValidationReport, name: str, tp: TensorProduct, mp: np.ndarray, alg: Algebra) -> None:
    fld, res = tp.result.field, tp.result
    ok = (np.array_equal(fld.matmul(res.left, mp), fld.matmul(mp, alg.regular_left))
          and np.array_equal(fld.matmul(res.right, mp), fld.matmul(mp, alg.regular_right)))
    if not ok:
        rep.add(name, None)


def tensor_pair(m: Bimodule, seed: int = 0) -> FunctorPair:
    """F = - (x) M with its right adjoint G = Hom_B(M, -) = - (x) (M_B)^*.

    Needs only that M is projective as a right module; the second
    adjunction is left empty.  Use :func:`frobenius_check` to obtain the
    full Frobenius pair.
    """
    try:
        right_split = is_projective(m.right_module, seed)
    except NotProjective as exc:
        raise NotRightProjective(f"{m.name}: right module not projective ({exc})") from None
    rd = dual(m, "right", seed)
    adj = _adjunction(m, None, rd, None, None, None, right_split)
    if not adj.report.ok:
        axiom, witness = adj.report.failures[0]
        raise AdjunctionFailure(f"{m.name}: {axiom} ({witness})")
    return FunctorPair(m.left_algebra, m.right_algebra, m, rd.bimodule,
                       adj.coevaluation_raw, adj.evaluation_raw, None, None)


def apply_functor(cert: FrobeniusCertificate, which: str, x: Union[Representation, ModuleHom]):
    """F(x) = x (x) M or G(x) = x (x) M^* for a module or a homomorphism."""
    pair = cert.functors
    if which == "F":
        return pair.F(x)
    if which == "G":
        return pair.G(x)
    raise ValueError(f"functor must be 'F' or 'G', got {which!r}")


# -- endomorphism ring extension -------------------------------------------------------


@dataclass(eq=False)
class ExtensionReport:
    algebra: Algebra
    embedding: np.ndarray
    projective_over_base: bool
    dual_isomorphic: bool
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.projective_over_base and self.dual_isomorphic and not self.failures


def endomorphism_extension(cert: FrobeniusCertificate, seed: int = 0) -> ExtensionReport:
    """End of M^* as a right A-module, as an extension of B.

    Elements are matrices X on M^* commuting with the right A-action; the
    product x * y is "apply y, then x", which is the matrix y @ x.  B maps
    in through its left action on M^*.
    """
    dual_m = cert.dual_bimodule
    fld = dual_m.field
    a, b = dual_m.right_algebra, dual_m.left_algebra
    gens = a.generators
    use = a.primitive and a.n_idempotents
    proj = [dual_m.act_right(e) for e in a.idempotents] if use else None
    acts = fld.combine_stack(gens, dual_m.right)
    mats = intertwiners(fld, acts, acts, proj, proj, seed)
    k, r = mats.shape[0], dual_m.dim
    space = Subspace.of(fld, mats.reshape(k, -1), r * r)
    piv = list(space.pivots)
    prods = fld.matmul(mats[None, :], mats[:, None])            # [i, j] = mats[j] @ mats[i] = x_i * x_j
    structure = prods.reshape(k, k, -1)[..., piv]
    unit = space.coords(np.eye(r, dtype=np.int64).reshape(-1))
    embedding = space.coords(dual_m.left.reshape(b.dim, -1))
    ext = Algebra(fld, structure, unit, unit.reshape(1, -1), tuple(f"x{i + 1}" for i in range(k)),
                  f"End({dual_m.name})", primitive=False)
    failures = [f"{axiom} ({w})" for axiom, w in ext.validate().failures]
    lhs = fld.matmul(b._flat, embedding)
    rhs = ext.mul(embedding[:, None, :], embedding[None, :, :]).reshape(-1, k)
    if not np.array_equal(lhs, rhs):
        failures.append("embedding is not multiplicative")

    # E as an (E, B)-bimodule: left regular, right multiplication by the image of B
    right = fld.combine_stack(embedding, ext.regular_right)
    e_eb = Bimodule(ext, b, ext.regular_left, right, "E_B")
    try:
        is_projective(e_eb.right_module, seed)
        projective = True
    except NotProjective:
        projective = False
    hom_b = dual(e_eb, "right", seed).bimodule                 # Hom_B(E, B) as (B, E)
    left = fld.combine_stack(embedding, ext.regular_left)
    e_be = Bimodule(b, ext, left, ext.regular_right, "B_E")
    try:
        bimodule_iso(hom_b, e_be, seed)
        iso = True
    except NotIsomorphic:
        iso = False
    return ExtensionReport(ext, embedding, projective, iso, failures)


__all__ = [
    "Bimodule", "BimoduleHom", "TensorProduct", "Dual", "FunctorPair", "AdjunctionSystem",
    "FrobeniusCertificate", "ExtensionReport",
    "InvalidBimodule", "ActionsDoNotCommute", "NotAutomorphism", "NotLeftProjective",
    "NotRightProjective", "DualsNotIsomorphic", "FrobeniusUnknown", "AdjunctionFailure",
    "regular", "twist", "quotient_by_ideal", "corner_slice", "external_sum", "bimodule_sum",
    "product_of", "triangular_algebra", "as_module_over_enveloping", "from_enveloping", "enveloping_of",
    "tensor_pair", "tensor", "tensor_hom", "tensor_map", "associator", "left_unitor", "right_unitor", "dual", "hom_module",
    "bimodule_homs", "bimodule_iso", "bimodules_isomorphic", "frobenius_check", "apply_functor",
    "endomorphism_extension",
]
