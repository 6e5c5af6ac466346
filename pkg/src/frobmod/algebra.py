"""Finite-dimensional associative algebras over a prime field.

An algebra is stored by structure constants ``c`` of shape ``(n, n, n)``:
``c[i, j]`` is the coordinate vector of ``b_i * b_j``.  Elements are row
vectors of length ``n``.  Every algebra carries a complete list of
orthogonal primitive idempotents, supplied by the constructor and then
verified, never searched for.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .exactla import PrimeField, Subspace, independent_rows

MAX_PATH_LENGTH = 16


class InvalidAlgebra(ValueError):
    """The structure constants violate an algebra axiom."""


class InvalidIdempotents(InvalidAlgebra):
    """The distinguished idempotents are not a complete orthogonal primitive set."""


class InfiniteDimensional(ValueError):
    """A quiver with relations whose path algebra does not truncate."""


class ReduciblePolynomial(ValueError):
    """A field-extension polynomial that factors over the base field."""


class RadicalNotNilpotent(ArithmeticError):
    """The trace-form ideal failed the nilpotency check."""


class AlgebraMismatch(ValueError):
    """Two objects were expected to live over the same algebra."""


@dataclass
class ValidationReport:
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def add(self, axiom: str, witness) -> None:
        self.failures.append((axiom, witness))

    def __bool__(self) -> bool:
        return self.ok


@dataclass(eq=False)
class Algebra:
    """Structure-constant presentation of a unital associative algebra.

    ``radical`` may be supplied when it is known by construction; otherwise
    it is computed from the trace form, which needs ``p > dim``.
    """

    field: PrimeField
    structure: np.ndarray
    unit: np.ndarray
    idempotents: np.ndarray
    labels: tuple = ()
    name: str = ""
    radical_hint: Optional[np.ndarray] = None
    primitive: bool = True

    def __post_init__(self) -> None:
        p = self.field.p
        self.structure = np.mod(np.asarray(self.structure, dtype=np.int64), p)
        n = self.structure.shape[0] if self.structure.ndim == 3 else 0
        if self.structure.size == 0:
            self.structure = np.zeros((n, n, n), dtype=np.int64)
        if self.structure.shape != (n, n, n):
            raise InvalidAlgebra(f"structure constants must be (n,n,n), got {self.structure.shape}")
        self.unit = np.mod(np.asarray(self.unit, dtype=np.int64).reshape(n), p)
        idem = np.asarray(self.idempotents, dtype=np.int64)
        self.idempotents = np.mod(idem.reshape(-1, n), p) if idem.size else np.zeros((0, n), dtype=np.int64)
        if not self.labels:
            self.labels = tuple(f"b{i + 1}" for i in range(n))
        self.labels = tuple(self.labels)
        if len(self.labels) != n:
            raise InvalidAlgebra(f"{len(self.labels)} labels for a {n}-dimensional algebra")
        if self.radical_hint is not None:
            hint = np.asarray(self.radical_hint, dtype=np.int64)
            self.radical_hint = np.mod(hint.reshape(-1, n), p) if n else np.zeros((0, 0), dtype=np.int64)

    def __repr__(self) -> str:
        return f"Algebra({self.name or '?'}, dim={self.dim}, p={self.field.p})"

    # -- basic arithmetic ----------------------------------------------------

    @property
    def dim(self) -> int:
        return self.structure.shape[0]

    @property
    def n_idempotents(self) -> int:
        return self.idempotents.shape[0]

    @cached_property
    def _flat(self) -> np.ndarray:
        return self.structure.reshape(self.dim * self.dim, self.dim)

    def basis_vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return v

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"{self.name or 'algebra'} has no basis element {label!r}") from None

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Product of two elements (or of matching stacks of elements)."""
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        outer = np.mod(x[..., :, None] * y[..., None, :], self.field.p)
        flat = outer.reshape(outer.shape[:-2] + (self.dim * self.dim,))
        return self.field.matmul(flat, self._flat)

    def left_mult(self, x: np.ndarray) -> np.ndarray:
        """Matrix L with ``y @ L == x * y``."""
        return self.field.combine(x, self.structure)

    def right_mult(self, y: np.ndarray) -> np.ndarray:
        """Matrix R with ``x @ R == x * y``."""
        return self.field.combine(y, self.structure.transpose(1, 0, 2))

    def power(self, x: np.ndarray, k: int) -> np.ndarray:
        result = self.unit.copy()
        base = np.asarray(x, dtype=np.int64)
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    @cached_property
    def regular_right(self) -> np.ndarray:
        """Right regular action, one matrix per basis element."""
        return self.structure.transpose(1, 0, 2).copy()

    @cached_property
    def regular_left(self) -> np.ndarray:
        """Left regular action; composes as lambda(ab) = lambda(b) lambda(a)."""
        return self.structure.copy()

    @cached_property
    def generators(self) -> np.ndarray:
        """A small generating set: idempotents first, then radical and basis elements."""
        fld, n = self.field, self.dim
        if n == 0:
            return np.zeros((0, 0), dtype=np.int64)
        cands = [*self.idempotents, *(self.radical if self.radical_hint is not None else []),
                 *np.eye(n, dtype=np.int64)]
        gens: list = []
        sub = Subspace.of(fld, self.unit.reshape(1, -1), n)
        for cand in cands:
            if sub.dim == n:
                break
            if sub.contains(cand):
                continue
            gens.append(np.asarray(cand, dtype=np.int64))
            sub = self._closure(sub, np.array(gens))
        return np.array(gens, dtype=np.int64).reshape(-1, n)

    def _closure(self, sub: Subspace, gens: np.ndarray) -> Subspace:
        fld, n = self.field, self.dim
        basis = np.concatenate([sub.basis, gens])
        cur = Subspace.of(fld, basis, n)
        while True:
            prods = self.mul(cur.basis[:, None, :], gens[None, :, :]).reshape(-1, n)
            nxt = Subspace.of(fld, np.concatenate([cur.basis, prods]), n)
            if nxt.dim == cur.dim:
                return cur
            cur = nxt

    def is_commutative(self) -> bool:
        return bool(np.array_equal(self.structure, self.structure.transpose(1, 0, 2)))

    # -- structure -----------------------------------------------------------

    @cached_property
    def radical(self) -> np.ndarray:
        """Echelon basis of the Jacobson radical."""
        if self.radical_hint is not None:
            rad = Subspace.of(self.field, self.radical_hint, self.dim).basis
        else:
            rad = self._trace_radical()
        self._check_nilpotent(rad)
        return rad

    def _trace_radical(self) -> np.ndarray:
        n = self.dim
        if n and self.field.p <= n:
            raise InvalidAlgebra(
                f"trace-form radical needs characteristic > dimension (p={self.field.p}, dim={n})")
        traces = np.mod(np.trace(self.structure, axis1=1, axis2=2), self.field.p)
        form = self.field.matmul(self._flat, traces.reshape(n, 1)).reshape(n, n)
        return self.field.left_nullspace(form) if n else np.zeros((0, 0), dtype=np.int64)

    def _check_nilpotent(self, rad: np.ndarray) -> None:
        current = rad
        for _ in range(self.dim + 1):
            if current.shape[0] == 0:
                return
            prods = self.mul(current[:, None, :], rad[None, :, :]).reshape(-1, self.dim)
            current = self.field.echelon(prods)[0]
        raise RadicalNotNilpotent(f"radical candidate of {self.name or 'algebra'} is not nilpotent")

    @cached_property
    def radical_space(self) -> Subspace:
        return Subspace.of(self.field, self.radical, self.dim)

    def center(self) -> np.ndarray:
        """Basis of the center, as the common kernel of all commutators."""
        n = self.dim
        if n == 0:
            return np.zeros((0, 0), dtype=np.int64)
        comm = np.mod(self.structure - self.structure.transpose(1, 0, 2), self.field.p)
        # z is central iff sum_i z_i (c[i,j] - c[j,i]) = 0 for every j
        system = comm.reshape(n, n * n)
        return self.field.left_nullspace(system)

    # -- validation ------------------------------------------------------------

    def validate(self, check_idempotents: bool = True) -> ValidationReport:
        """Check every algebra axiom, recording a witness for each failure."""
        rep = ValidationReport()
        fld, n = self.field, self.dim
        if n == 0:
            return rep
        c = self.structure
        left = fld.matmul(self._flat, c.reshape(n, n * n)).reshape(n, n, n, n)
        # right[j,k,i,:] = b_i (b_j b_k)
        right = fld.matmul(self._flat, c.transpose(1, 0, 2).reshape(n, n * n)).reshape(n, n, n, n)
        bad = np.argwhere(np.any(left != right.transpose(2, 0, 1, 3), axis=3))
        if bad.size:
            rep.add("associativity", tuple(int(v) for v in bad[0]))
        eye = np.eye(n, dtype=np.int64)
        if not np.array_equal(self.left_mult(self.unit), eye):
            j = int(np.argwhere(np.any(self.left_mult(self.unit) != eye, axis=1))[0][0])
            rep.add("left unit", j)
        if not np.array_equal(self.right_mult(self.unit), eye):
            j = int(np.argwhere(np.any(self.right_mult(self.unit) != eye, axis=1))[0][0])
            rep.add("right unit", j)
        if check_idempotents:
            self._validate_idempotents(rep)
        return rep

    def _validate_idempotents(self, rep: ValidationReport) -> None:
        fld = self.field
        idem = self.idempotents
        if idem.shape[0] == 0:
            rep.add("no idempotents", None)
            return
        total = np.mod(idem.sum(axis=0), fld.p)
        if not np.array_equal(total, self.unit):
            rep.add("sum != unit", None)
        for i, j in itertools.product(range(idem.shape[0]), repeat=2):
            prod = self.mul(idem[i], idem[j])
            want = idem[i] if i == j else np.zeros(self.dim, dtype=np.int64)
            if not np.array_equal(prod, want):
                rep.add("orthogonality" if i != j else "idempotence", (i, j))
                return
        if not np.any(idem, axis=1).all():
            rep.add("zero idempotent", int(np.flatnonzero(~np.any(idem, axis=1))[0]))
            return
        if self.primitive:
            for i in range(idem.shape[0]):
                if not self.corner_is_local(idem[i]):
                    rep.add("non-local corner", i)

    def ensure_valid(self) -> "Algebra":
        rep = self.validate()
        if not rep.ok:
            axiom, witness = rep.failures[0]
            kind = InvalidIdempotents if axiom in {
                "no idempotents", "sum != unit", "orthogonality", "idempotence",
                "zero idempotent", "non-local corner"} else InvalidAlgebra
            raise kind(f"{self.name or 'algebra'}: {axiom} fails (witness {witness})")
        _ = self.radical
        return self

    @cached_property
    def point_classes(self) -> tuple:
        """Idempotent indices grouped by isomorphism class of their simple tops.

        e_i and e_j give isomorphic simples exactly when e_i A e_j is not
        contained in the radical.
        """
        n = self.n_idempotents
        rad = self.radical_space
        eye = np.eye(self.dim, dtype=np.int64)
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                i = parent[i]
            return i

        for i in range(n):
            left = self.mul(self.idempotents[i][None, :], eye)
            for j in range(i + 1, n):
                block = self.mul(left, self.idempotents[j][None, :])
                if any(not rad.contains(v) for v in block if np.any(v)):
                    parent[find(j)] = find(i)
        groups: dict = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        return tuple(tuple(g) for g in sorted(groups.values()))

    @property
    def n_points(self) -> int:
        return len(self.point_classes)

    @cached_property
    def point_representatives(self) -> np.ndarray:
        """One idempotent per isomorphism class of simple modules."""
        if not self.point_classes:
            return np.zeros((0, self.dim), dtype=np.int64)
        return self.idempotents[[c[0] for c in self.point_classes]]

    def point_idempotent(self, points) -> np.ndarray:
        """Sum of all idempotents lying over the given points."""
        e = np.zeros(self.dim, dtype=np.int64)
        for k in points:
            for i in self.point_classes[int(k)]:
                e = np.mod(e + self.idempotents[i], self.field.p)
        return e

    # -- idempotent corners -------------------------------------------------

    def corner_basis(self, e: np.ndarray) -> np.ndarray:
        """Rows e b_j e that form a basis of eAe (greedy, in basis order)."""
        cands = self.mul(self.mul(e[None, :], np.eye(self.dim, dtype=np.int64)), e[None, :])
        keep = independent_rows(self.field, cands)
        return cands[keep]

    def corner_is_local(self, e: np.ndarray) -> bool:
        """Whether eAe is local, i.e. eAe modulo its radical is a field.

        The quotient is semisimple; it is a field exactly when it is
        commutative and the Frobenius map x -> x^p fixes only the prime field.
        """
        fld = self.field
        basis = self.corner_basis(e)
        if basis.shape[0] == 0:
            return False
        rad = self.radical_space
        # quotient basis: corner elements independent modulo the radical
        reduced = rad.reduce(basis)
        keep = independent_rows(fld, reduced)
        if not keep:
            return False
        qbasis = basis[keep]
        qspace = Subspace.of(fld, np.concatenate([rad.basis, qbasis]) if rad.dim else qbasis, self.dim)
        for u, v in itertools.combinations(qbasis, 2):
            if not rad.contains(fld.sub(self.mul(u, v), self.mul(v, u))):
                return False
        red_q = Subspace.of(fld, reduced[keep], self.dim)
        frob_minus_id = []
        for u in qbasis:
            w = fld.sub(self.power(u, fld.p), u)
            if not qspace.contains(w):
                return False
            frob_minus_id.append(red_q.coords(rad.reduce(w)))
        mat = np.array(frob_minus_id, dtype=np.int64)
        fixed = len(keep) - fld.rank(mat)
        return fixed == 1


# -- constructors -------------------------------------------------------------


def from_table(fld: PrimeField, labels: Sequence[str], products: dict, unit, idempotents,
               name: str = "") -> Algebra:
    """Build an algebra from a sparse table ``{(i, j): coordinate vector}``."""
    n = len(labels)
    c = np.zeros((n, n, n), dtype=np.int64)
    for (i, j), vec in products.items():
        c[i, j] = np.mod(np.asarray(vec, dtype=np.int64), fld.p)
    return Algebra(fld, c, unit, idempotents, tuple(labels), name).ensure_valid()


def zero_algebra(fld: PrimeField, name: str = "0") -> Algebra:
    return Algebra(fld, np.zeros((0, 0, 0), dtype=np.int64), np.zeros(0, dtype=np.int64),
                   np.zeros((0, 0), dtype=np.int64), (), name, radical_hint=np.zeros((0, 0), dtype=np.int64))


def ground_field(fld: PrimeField, name: Optional[str] = None) -> Algebra:
    c = np.ones((1, 1, 1), dtype=np.int64)
    return Algebra(fld, c, [1], [[1]], ("1",), name or f"F{fld.p}",
                   radical_hint=np.zeros((0, 1), dtype=np.int64)).ensure_valid()


def lower_triangular(fld: PrimeField, n: int, name: Optional[str] = None) -> Algebra:
    """Lower triangular n x n matrices, basis E_ij with i >= j in row order."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1)]
    pos = {pr: k for k, pr in enumerate(pairs)}
    d = len(pairs)
    c = np.zeros((d, d, d), dtype=np.int64)
    for (i, j), a in pos.items():
        for (k, l), b in pos.items():
            if j == k:
                c[a, b, pos[(i, l)]] = 1
    unit = np.zeros(d, dtype=np.int64)
    idem = np.zeros((n, d), dtype=np.int64)
    for i in range(n):
        unit[pos[(i, i)]] = 1
        idem[i, pos[(i, i)]] = 1
    labels = tuple(f"E{i + 1}{j + 1}" for i, j in pairs)
    strict = np.eye(d, dtype=np.int64)[[pos[(i, j)] for i, j in pairs if i > j]].reshape(-1, d)
    return Algebra(fld, c, unit, idem, labels, name or f"LT{n}", radical_hint=strict).ensure_valid()


def matrix_over(base: Algebra, n: int, name: Optional[str] = None) -> Algebra:
    """Full matrix algebra M_n(base), basis E_ij (x) b_k."""
    m = base.dim
    d = n * n * m
    c = np.zeros((d, d, d), dtype=np.int64)

    def idx(i, j, k):
        return (i * n + j) * m + k

    for i, j, l in itertools.product(range(n), repeat=3):
        for k1 in range(m):
            for k2 in range(m):
                c[idx(i, j, k1), idx(j, l, k2), (i * n + l) * m:(i * n + l + 1) * m] = base.structure[k1, k2]
    unit = np.zeros(d, dtype=np.int64)
    idem = []
    for i in range(n):
        unit[(i * n + i) * m:(i * n + i + 1) * m] = base.unit
        for e in base.idempotents:
            row = np.zeros(d, dtype=np.int64)
            row[(i * n + i) * m:(i * n + i + 1) * m] = e
            idem.append(row)
    labels = tuple(f"E{i + 1}{j + 1}" + (f"*{lab}" if m > 1 else "")
                   for i in range(n) for j in range(n) for lab in base.labels)
    rad = np.zeros((n * n * base.radical.shape[0], d), dtype=np.int64)
    for k, (ij, r) in enumerate(itertools.product(range(n * n), base.radical)):
        rad[k, ij * m:(ij + 1) * m] = r
    return Algebra(base.field, c, unit, np.array(idem), labels,
                   name or f"M{n}({base.name})", radical_hint=rad).ensure_valid()


def product(a: Algebra, b: Algebra, name: Optional[str] = None) -> Algebra:
    """Direct product a x b with block structure constants."""
    if a.field != b.field:
        raise AlgebraMismatch("product of algebras over different fields")
    n, m = a.dim, b.dim
    c = np.zeros((n + m,) * 3, dtype=np.int64)
    c[:n, :n, :n] = a.structure
    c[n:, n:, n:] = b.structure
    unit = np.concatenate([a.unit, b.unit])
    idem = [np.concatenate([e, np.zeros(m, dtype=np.int64)]) for e in a.idempotents]
    idem += [np.concatenate([np.zeros(n, dtype=np.int64), e]) for e in b.idempotents]
    labels = _disjoint_labels(a.labels, b.labels)
    ra, rb = a.radical, b.radical
    rad = np.zeros((ra.shape[0] + rb.shape[0], n + m), dtype=np.int64)
    rad[:ra.shape[0], :n] = ra
    rad[ra.shape[0]:, n:] = rb
    out = Algebra(a.field, c, unit, np.array(idem).reshape(-1, n + m), labels,
                  name or f"{a.name}x{b.name}", radical_hint=rad,
                  primitive=a.primitive and b.primitive)
    return out.ensure_valid()


def _disjoint_labels(la: Sequence[str], lb: Sequence[str]) -> tuple:
    if not set(la) & set(lb):
        return tuple(la) + tuple(lb)
    return tuple(f"{x}.1" for x in la) + tuple(f"{x}.2" for x in lb)


_OPPOSITES: "dict[int, Algebra]" = {}


def opposite(a: Algebra) -> Algebra:
    """Opposite algebra (same basis, reversed products); cached per algebra."""
    cached = getattr(a, "_opposite", None)
    if cached is not None:
        return cached
    out = Algebra(a.field, a.structure.transpose(1, 0, 2).copy(), a.unit, a.idempotents,
                  a.labels, f"{a.name}^op", radical_hint=a.radical, primitive=a.primitive)
    out._opposite = a
    a._opposite = out
    return out


def enveloping(a: Algebra, b: Algebra, name: Optional[str] = None) -> Algebra:
    """The algebra a^op (x) b; (a,b)-bimodules are its right modules.

    Basis element (i, j) stands for a_i (x) b_j at index i * dim(b) + j.
    Its radical is rad(a) (x) b + a (x) rad(b); finite fields are perfect,
    so the quotient is semisimple.
    """
    if a.field != b.field:
        raise AlgebraMismatch("enveloping algebra over different fields")
    fld = a.field
    n, m = a.dim, b.dim
    # c[(i,j),(k,l),(s,t)] = cA[k,i,s] * cB[j,l,t]
    ca = a.structure.transpose(1, 0, 2)
    c = np.mod(np.einsum("iks,jlt->ijklst", ca, b.structure), fld.p).reshape(n * m, n * m, n * m)
    unit = fld.kron(a.unit, b.unit)
    idem = [fld.kron(e, f) for e in a.idempotents for f in b.idempotents]
    rows = [fld.kron(r, np.eye(m, dtype=np.int64)[k]) for r in a.radical for k in range(m)]
    rows += [fld.kron(np.eye(n, dtype=np.int64)[k], r) for k in range(n) for r in b.radical]
    rad = np.array(rows, dtype=np.int64).reshape(-1, n * m)
    labels = tuple(f"{x}@{y}" for x in a.labels for y in b.labels)
    env = Algebra(fld, c, unit, np.array(idem).reshape(-1, n * m), labels,
                  name or f"{a.name}^op(x){b.name}", radical_hint=rad)
    rep = ValidationReport()
    env._validate_idempotents(rep)
    if not rep.ok:
        env.primitive = False
    return env


def field_extension(fld: PrimeField, degree: int, poly: Sequence[int], name: Optional[str] = None) -> Algebra:
    """F_p[t]/(poly) for a monic irreducible poly of the given degree.

    ``poly`` lists coefficients from the constant term up; a missing leading
    coefficient is taken to be 1.
    """
    p = fld.p
    coeffs = [int(v) % p for v in poly]
    if len(coeffs) == degree:
        coeffs.append(1)
    if len(coeffs) != degree + 1 or coeffs[-1] != 1:
        raise ValueError("polynomial must be monic of the stated degree")
    if not is_irreducible(coeffs, p):
        raise ReduciblePolynomial(f"{coeffs} is reducible over F_{p}")
    c = np.zeros((degree,) * 3, dtype=np.int64)
    for i in range(degree):
        for j in range(degree):
            c[i, j] = poly_mod(monomial(i + j), coeffs, p, degree)
    unit = np.zeros(degree, dtype=np.int64)
    unit[0] = 1
    labels = tuple("1" if i == 0 else ("t" if i == 1 else f"t{i}") for i in range(degree))
    return Algebra(fld, c, unit, unit.reshape(1, -1), labels, name or f"F{p}^{degree}",
                   radical_hint=np.zeros((0, degree), dtype=np.int64)).ensure_valid()


def monomial(k: int) -> list[int]:
    return [0] * k + [1]


def poly_mod(f: Sequence[int], g: Sequence[int], p: int, width: Optional[int] = None) -> np.ndarray:
    """Remainder of f modulo the monic polynomial g, padded to ``width``."""
    r = [int(v) % p for v in f]
    dg = len(g) - 1
    for k in range(len(r) - 1, dg - 1, -1):
        lead = r[k]
        if lead:
            for i in range(dg + 1):
                r[k - dg + i] = (r[k - dg + i] - lead * g[i]) % p
    r = r[:dg] + [0] * max(0, dg - len(r))
    out = np.array(r[:dg], dtype=np.int64)
    if width is not None and width > dg:
        out = np.concatenate([out, np.zeros(width - dg, dtype=np.int64)])
    return out


def _poly_trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_mulmod(a: list[int], b: list[int], g: list[int], p: int) -> list[int]:
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    return _poly_trim([int(v) for v in poly_mod(prod, g, p)]) if prod else []


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _poly_trim([int(v) for v in a]), _poly_trim([int(v) for v in b])
    while b:
        inv = pow(b[-1], -1, p)
        monic = [(v * inv) % p for v in b]
        if len(a) >= len(monic):
            a = _poly_trim([int(v) for v in poly_mod(a, monic, p)])
        a, b = b, a
    return a


def is_irreducible(g: Sequence[int], p: int) -> bool:
    """Ben-Or test: g is irreducible iff gcd(g, t^(p^i) - t) = 1 for i <= deg/2."""
    g = [int(v) % p for v in g]
    deg = len(g) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    t = [0, 1]
    power = t
    for _ in range(deg // 2):
        # power <- power^p mod g
        result, base, k = [1], power, p
        while k:
            if k & 1:
                result = _poly_mulmod(result, base, g, p)
            base = _poly_mulmod(base, base, g, p)
            k >>= 1
        power = result
        diff = list(power) + [0] * max(0, 2 - len(power))
        diff[1] = (diff[1] - 1) % p
        if len(_poly_gcd(g, _poly_trim(diff), p)) != 1:
            return False
    return True


# -- quivers ------------------------------------------------------------------


@dataclass(frozen=True)
class Quiver:
    """Vertices 0..n-1, arrows ``(source, target, label)``, and relations.

    Each relation is a list of ``(coefficient, path)`` terms, a path being a
    tuple of arrow labels read left to right.  Paths compose by
    concatenation: ``p * q`` is nonzero only when ``p`` ends where ``q``
    starts.
    """

    vertices: int
    arrows: tuple
    relations: tuple = ()

    def endpoints(self, path: tuple) -> tuple[int, int]:
        table = {lab: (s, t) for s, t, lab in self.arrows}
        s, _ = table[path[0]]
        _, t = table[path[-1]]
        return s, t


def path_algebra(fld: PrimeField, quiver: Quiver, name: Optional[str] = None) -> Algebra:
    """Bound path algebra kQ/I with vertex idempotents as the distinguished set.

    Relations must be combinations of paths of length at least two.  The
    ideal is computed modulo all paths of length L, where L is the first
    length at which every path is already a consequence of the relations;
    if no such L <= 16 exists the quiver is rejected as infinite-dimensional.
    """
    arrows = list(quiver.arrows)
    table = {lab: (s, t) for s, t, lab in arrows}
    if len(table) != len(arrows):
        raise ValueError("arrow labels must be distinct")
    rels = []
    for rel in quiver.relations:
        terms = [(int(cf) % fld.p, tuple(path)) for cf, path in rel]
        ends = {_path_ends(table, path) for _, path in terms}
        if len(ends) != 1 or None in ends:
            raise ValueError(f"relation {rel} mixes endpoints or is not composable")
        if any(len(path) < 2 for _, path in terms):
            raise ValueError("relations must involve paths of length >= 2")
        rels.append(terms)

    vertex_paths = [(v,) for v in range(quiver.vertices)]
    levels: list[list[tuple]] = [[], [(lab,) for _, _, lab in arrows]]
    for length in range(1, MAX_PATH_LENGTH + 1):
        shorter = [pp for level in levels[1:length] for pp in level]
        current = levels[length]
        if not current:
            return _assemble_path_algebra(fld, quiver, table, rels, vertex_paths, shorter, name or "kQ/I")
        rows, index = _truncated_ideal(fld, quiver, table, rels, shorter + current)
        if rows.shape[0]:
            space = Subspace.of(fld, rows, len(index))
            if all(space.contains(_unit_row(len(index), index[pp])) for pp in current):
                return _assemble_path_algebra(fld, quiver, table, rels, vertex_paths, shorter,
                                              name or "kQ/I")
        levels.append([pp + (lab,) for pp in current for s, _, lab in arrows if table[pp[-1]][1] == s])
    raise InfiniteDimensional("paths do not truncate within the length bound")


def _unit_row(n: int, k: int) -> np.ndarray:
    v = np.zeros(n, dtype=np.int64)
    v[k] = 1
    return v


def _path_ends(table, path):
    for a, b in zip(path, path[1:]):
        if table[a][1] != table[b][0]:
            return None
    return table[path[0]][0], table[path[-1]][1]


def _truncated_ideal(fld, quiver, table, rels, paths):
    """Rows u*r*v for relations r and paths u, v, keeping only listed paths."""
    index = {pp: k for k, pp in enumerate(paths)}
    rows = []
    ext = [()] + paths
    for terms in rels:
        s, t = _path_ends(table, terms[0][1])
        for u in ext:
            if u and table[u[-1]][1] != s:
                continue
            for v in ext:
                if v and table[v[0]][0] != t:
                    continue
                row = np.zeros(len(paths), dtype=np.int64)
                for cf, path in terms:
                    full = u + path + v
                    if full in index:
                        row[index[full]] = (row[index[full]] + cf) % fld.p
                if row.any():
                    rows.append(row)
    if not rows:
        return np.zeros((0, len(paths)), dtype=np.int64), index
    return np.array(rows, dtype=np.int64), index


def _assemble_path_algebra(fld, quiver, table, rels, vertex_paths, paths, name):
    # order longest paths first so that reduction keeps short paths as basis elements
    ordered = sorted(paths, key=lambda pp: (-len(pp), paths.index(pp)))
    ideal_rows, index = _truncated_ideal(fld, quiver, table, rels, ordered)
    ideal = Subspace.of(fld, ideal_rows, len(ordered))
    survivors = [ordered[k] for k in ideal.complement]
    survivors.sort(key=lambda pp: (len(pp), paths.index(pp)))
    nv = quiver.vertices
    basis = list(vertex_paths) + survivors
    n = len(basis)
    pos = {pp: nv + k for k, pp in enumerate(survivors)}
    comp_index = {ordered[k]: k for k in range(len(ordered))}

    def normal_form(path):
        vec = np.zeros(n, dtype=np.int64)
        if path not in comp_index:
            return vec
        raw = _unit_row(len(ordered), comp_index[path])
        red = ideal.reduce(raw)
        for k in np.flatnonzero(red):
            vec[pos[ordered[k]]] = red[k]
        return vec

    c = np.zeros((n, n, n), dtype=np.int64)
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            xs, xt = (x[0], x[0]) if i < nv else (table[x[0]][0], table[x[-1]][1])
            ys, yt = (y[0], y[0]) if j < nv else (table[y[0]][0], table[y[-1]][1])
            if xt != ys:
                continue
            if i < nv:
                c[i, j] = _unit_row(n, j)
            elif j < nv:
                c[i, j] = _unit_row(n, i)
            else:
                c[i, j] = normal_form(x + y)
    unit = np.zeros(n, dtype=np.int64)
    unit[:nv] = 1
    idem = np.eye(n, dtype=np.int64)[:nv]
    labels = tuple(f"e{v + 1}" for v in range(nv)) + tuple("".join(pp) for pp in survivors)
    # the arrow ideal is nilpotent here, and the quotient by it is a product of copies of k
    arrow_ideal = np.eye(n, dtype=np.int64)[nv:]
    return Algebra(fld, c, unit, idem, labels, name, radical_hint=arrow_ideal).ensure_valid()


# -- corners ------------------------------------------------------------------


@dataclass(eq=False)
class Corner:
    """The corner algebra e'Ae' with its comparison maps.

    ``compression`` (dim A x dim C) sends x to the coordinates of e'xe';
    ``inclusion`` (dim C x dim A) sends corner coordinates back into A.
    """

    algebra: Algebra
    compression: np.ndarray
    inclusion: np.ndarray
    idempotent: np.ndarray
    surviving: tuple


def idempotent_sum(a: Algebra, indices: Iterable[int]) -> np.ndarray:
    e = np.zeros(a.dim, dtype=np.int64)
    for i in indices:
        e = np.mod(e + a.idempotents[i], a.field.p)
    return e


def corner(a: Algebra, surviving: Iterable[int], name: Optional[str] = None) -> Corner:
    """Corner algebra for the idempotent summing the surviving vertices."""
    surv = tuple(sorted(set(int(i) for i in surviving)))
    fld = a.field
    if any(not 0 <= i < a.n_idempotents for i in surv):
        raise IndexError(f"surviving indices {surv} out of range")
    e = idempotent_sum(a, surv)
    if not surv:
        z = zero_algebra(fld, name or f"{a.name}|0")
        return Corner(z, np.zeros((a.dim, 0), dtype=np.int64), np.zeros((0, a.dim), dtype=np.int64), e, surv)
    if len(surv) == a.n_idempotents:
        eye = np.eye(a.dim, dtype=np.int64)
        return Corner(a, eye, eye.copy(), e, surv)
    cands = a.mul(a.mul(e[None, :], np.eye(a.dim, dtype=np.int64)), e[None, :])
    keep = independent_rows(fld, cands)
    incl = cands[keep]
    from .exactla import Frame
    frame = Frame.of(fld, incl)
    m = len(keep)
    prods = a.mul(incl[:, None, :], incl[None, :, :])
    c = frame.coords(prods.reshape(m * m, a.dim)).reshape(m, m, m)
    compression = frame.coords(cands)
    unit = frame.coords(e)
    idem = frame.coords(a.idempotents[list(surv)])
    labels = tuple(a.labels[k] for k in keep)
    rad_rows = a.mul(a.mul(e[None, :], a.radical), e[None, :])
    rad = frame.coords(rad_rows) if rad_rows.size else np.zeros((0, m), dtype=np.int64)
    sub = Algebra(fld, c, unit, idem, labels,
                  name or f"{a.name}|{','.join(str(i + 1) for i in surv)}",
                  radical_hint=rad, primitive=a.primitive).ensure_valid()
    return Corner(sub, compression, incl, e, surv)


def is_isomorphism(a: Algebra, b: Algebra, phi: np.ndarray) -> bool:
    """Whether the matrix phi (dim a x dim b) is a unital algebra isomorphism."""
    fld = a.field
    if a.dim != b.dim or not fld.is_invertible(phi):
        return False
    if not np.array_equal(fld.matmul(a.unit.reshape(1, -1), phi).ravel(), b.unit):
        return False
    lhs = fld.matmul(a._flat, phi)                       # phi(b_i b_j)
    img = phi                                             # phi(b_i)
    rhs = b.mul(img[:, None, :], img[None, :, :]).reshape(-1, b.dim)
    return bool(np.array_equal(lhs, rhs))


__all__ = [
    "Algebra",
    "Corner",
    "Quiver",
    "ValidationReport",
    "InvalidAlgebra",
    "InvalidIdempotents",
    "InfiniteDimensional",
    "ReduciblePolynomial",
    "RadicalNotNilpotent",
    "AlgebraMismatch",
    "from_table",
    "zero_algebra",
    "ground_field",
    "lower_triangular",
    "matrix_over",
    "product",
    "opposite",
    "enveloping",
    "field_extension",
    "path_algebra",
    "corner",
    "idempotent_sum",
    "is_irreducible",
    "is_isomorphism",
]
