"""Dense exact linear algebra over a prime field F_p.

Matrices are plain ``numpy`` int64 arrays whose entries are residues in
``[0, p)``.  Every routine reduces its output, so callers never see a
negative or out-of-range entry.  Pivoting is deterministic (first nonzero
entry in column order), which makes every result bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

_INT64_LIMIT = (1 << 63) - 1
MAX_MODULUS = (1 << 31) - 1


class Singular(ArithmeticError):
    """Raised when a matrix expected to be invertible is not."""


class DimensionMismatch(ValueError):
    """Raised when matrix shapes are incompatible."""


def is_prime(n: int) -> bool:
    """Trial-division primality test (adequate for n below 2**31)."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p together with matrix routines over it."""

    p: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, (int, np.integer)) or not 2 <= self.p <= MAX_MODULUS:
            raise ValueError(f"modulus must be an integer in [2, 2^31-1], got {self.p!r}")
        if not is_prime(int(self.p)):
            raise ValueError(f"modulus not prime: {self.p}")

    # -- scalars -----------------------------------------------------------

    def inv(self, a: int) -> int:
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, -1, self.p)

    @cached_property
    def _chunk(self) -> int:
        # how many products (p-1)^2 can be summed without int64 overflow
        sq = (self.p - 1) ** 2
        return max(1, _INT64_LIMIT // max(sq, 1))

    # -- construction ------------------------------------------------------

    def array(self, data, shape: Optional[Sequence[int]] = None) -> np.ndarray:
        """Coerce ``data`` to a reduced int64 array."""
        arr = np.array(data, dtype=object) if not isinstance(data, np.ndarray) else data
        if arr.dtype == object:
            arr = np.vectorize(lambda v: int(v) % self.p, otypes=[np.int64])(arr) if arr.size else arr.astype(np.int64)
        else:
            arr = np.mod(arr.astype(np.int64), self.p)
        if shape is not None:
            arr = arr.reshape(shape)
        return arr

    def zeros(self, *shape: int) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    # -- arithmetic --------------------------------------------------------

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Product a @ b mod p (broadcasts like ``numpy.matmul``)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.shape[-1] != b.shape[-2 if b.ndim > 1 else 0]:
            raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
        inner = a.shape[-1]
        if inner <= self._chunk:
            return np.mod(np.matmul(a, b), self.p)
        out = None
        step = self._chunk
        for start in range(0, inner, step):
            part = np.mod(np.matmul(a[..., start:start + step], b[..., start:start + step, :]), self.p)
            out = part if out is None else np.mod(out + part, self.p)
        return out

    def chain(self, *mats: np.ndarray) -> np.ndarray:
        """Left-to-right product of several matrices."""
        out = mats[0]
        for m in mats[1:]:
            out = self.matmul(out, m)
        return out

    def kron(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.p > 3_000_000_000:  # pragma: no cover - excluded by MAX_MODULUS
            raise OverflowError
        return np.mod(np.kron(a, b), self.p)

    def outer(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.mod(np.multiply.outer(u, v), self.p)

    def scale(self, a: np.ndarray, c: int) -> np.ndarray:
        return np.mod(a * (int(c) % self.p), self.p)

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.mod(a + b, self.p)

    def sub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.mod(a - b, self.p)

    def neg(self, a: np.ndarray) -> np.ndarray:
        return np.mod(-a, self.p)

    def combine(self, coeffs: np.ndarray, stack: np.ndarray) -> np.ndarray:
        """Linear combination sum_k coeffs[k] * stack[k] for a stack of arrays."""
        coeffs = np.asarray(coeffs, dtype=np.int64)
        if stack.shape[0] == 0:
            return np.zeros(stack.shape[1:], dtype=np.int64)
        flat = stack.reshape(stack.shape[0], -1)
        return self.matmul(coeffs.reshape(1, -1), flat).reshape(stack.shape[1:])

    def combine_stack(self, coeffs: np.ndarray, stack: np.ndarray) -> np.ndarray:
        """Several linear combinations of a stack at once: out[r] = sum_k coeffs[r,k] stack[k]."""
        coeffs = np.asarray(coeffs, dtype=np.int64).reshape(-1, stack.shape[0])
        flat = stack.reshape(stack.shape[0], -1)
        if coeffs.shape[0] == 0 or stack.shape[0] == 0:
            return np.zeros((coeffs.shape[0],) + stack.shape[1:], dtype=np.int64)
        return self.matmul(coeffs, flat).reshape((coeffs.shape[0],) + stack.shape[1:])

    # -- elimination -------------------------------------------------------

    def rref(self, m: np.ndarray):
        """Reduced row-echelon form.

        Returns ``(reduced, pivots, rank, transform)`` with
        ``transform @ m == reduced``.
        """
        m = np.asarray(m, dtype=np.int64)
        rows, cols = m.shape
        work = np.concatenate([np.mod(m, self.p), np.eye(rows, dtype=np.int64)], axis=1)
        pivots = self._eliminate(work, cols)
        return work[:, :cols].copy(), pivots, len(pivots), work[:, cols:].copy()

    def _eliminate(self, work: np.ndarray, ncols: int) -> list[int]:
        """In-place Gauss-Jordan elimination on the first ``ncols`` columns."""
        p = self.p
        rows = work.shape[0]
        pivots: list[int] = []
        r = 0
        for c in range(ncols):
            if r == rows:
                break
            nz = np.flatnonzero(work[r:, c])
            if nz.size == 0:
                continue
            piv = r + int(nz[0])
            if piv != r:
                work[[r, piv]] = work[[piv, r]]
            inv = pow(int(work[r, c]), -1, p)
            if inv != 1:
                work[r] = np.mod(work[r] * inv, p)
            col = work[:, c].copy()
            col[r] = 0
            hit = np.flatnonzero(col)
            if hit.size:
                work[hit] = np.mod(work[hit] - np.multiply.outer(col[hit], work[r]), p)
            pivots.append(c)
            r += 1
        return pivots

    def echelon(self, m: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """Nonzero rows of the reduced form, plus pivot columns (no transform)."""
        m = np.array(m, dtype=np.int64, copy=True)
        if m.ndim != 2:
            raise DimensionMismatch("echelon expects a 2-d array")
        if m.shape[0] == 0:
            return m.reshape(0, m.shape[1]), []
        work = np.mod(m, self.p)
        pivots = self._eliminate(work, work.shape[1])
        return work[: len(pivots)].copy(), pivots

    def rank(self, m: np.ndarray) -> int:
        m = np.asarray(m)
        if m.size == 0:
            return 0
        return len(self.echelon(m)[1])

    def nullspace(self, m: np.ndarray) -> np.ndarray:
        """Rows x spanning {x : m @ x = 0}."""
        m = np.asarray(m, dtype=np.int64)
        rows, cols = m.shape
        if rows == 0:
            return np.eye(cols, dtype=np.int64)
        red, pivots = self.echelon(m)
        free = [c for c in range(cols) if c not in set(pivots)]
        basis = np.zeros((len(free), cols), dtype=np.int64)
        for k, f in enumerate(free):
            basis[k, f] = 1
            for i, pc in enumerate(pivots):
                basis[k, pc] = (-red[i, f]) % self.p
        return basis

    def left_nullspace(self, m: np.ndarray) -> np.ndarray:
        """Rows y spanning {y : y @ m = 0}."""
        return self.nullspace(np.asarray(m).T)

    def solve(self, a: np.ndarray, b: np.ndarray):
        """Solve a @ x = b.

        Returns ``(particular, null_basis)``; ``particular`` is ``None`` when
        the system is inconsistent.  ``null_basis`` is a list of column
        vectors spanning the kernel of ``a``.
        """
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        vector = b.ndim == 1
        if vector:
            b = b.reshape(-1, 1)
        if a.shape[0] != b.shape[0]:
            raise DimensionMismatch(f"a has {a.shape[0]} rows but b has {b.shape[0]}")
        n = a.shape[1]
        null = [v.reshape(-1, 1) for v in self.nullspace(a)]
        work = np.concatenate([np.mod(a, self.p), np.mod(b, self.p)], axis=1)
        pivots = self._eliminate(work, n)
        rank = len(pivots)
        if np.any(work[rank:, n:]):
            return None, null
        x = np.zeros((n, b.shape[1]), dtype=np.int64)
        for i, pc in enumerate(pivots):
            x[pc] = work[i, n:]
        return (x.ravel() if vector else x), null

    def solve_left(self, a: np.ndarray, b: np.ndarray) -> Optional[np.ndarray]:
        """A particular solution x of x @ a = b, or None."""
        x, _ = self.solve(np.asarray(a).T, np.asarray(b).T)
        return None if x is None else x.T

    def invert(self, m: np.ndarray) -> np.ndarray:
        m = np.asarray(m, dtype=np.int64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch("invert expects a square matrix")
        n = m.shape[0]
        red, pivots, rank, transform = self.rref(m)
        if rank < n:
            raise Singular(f"matrix of size {n} has rank {rank}")
        return transform

    def is_invertible(self, m: np.ndarray) -> bool:
        m = np.asarray(m)
        return m.shape[0] == m.shape[1] and self.rank(m) == m.shape[0]

    def det(self, m: np.ndarray) -> int:
        """Determinant via elimination (used by tests as an independent check)."""
        m = np.array(m, dtype=np.int64) % self.p
        n = m.shape[0]
        d = 1
        for c in range(n):
            nz = np.flatnonzero(m[c:, c])
            if nz.size == 0:
                return 0
            piv = c + int(nz[0])
            if piv != c:
                m[[c, piv]] = m[[piv, c]]
                d = -d
            d = d * int(m[c, c]) % self.p
            inv = pow(int(m[c, c]), -1, self.p)
            below = m[c + 1:, c].copy()
            m[c + 1:] = np.mod(m[c + 1:] - np.multiply.outer(below * inv % self.p, m[c]), self.p)
        return d % self.p

    def span(self, vectors) -> "Subspace":
        return Subspace.of(self, vectors)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of F_p^n stored by its reduced echelon basis.

    ``basis`` is in reduced row-echelon form, so coordinates of a vector in
    the span are simply its entries at the pivot columns.
    """

    field: PrimeField
    ambient: int
    basis: np.ndarray
    pivots: tuple[int, ...]

    @classmethod
    def of(cls, field: PrimeField, vectors, ambient: Optional[int] = None) -> "Subspace":
        vecs = np.asarray(vectors, dtype=np.int64)
        if vecs.ndim == 1:
            vecs = vecs.reshape(1, -1) if vecs.size else vecs.reshape(0, ambient or 0)
        if ambient is None:
            ambient = vecs.shape[1]
        vecs = vecs.reshape(-1, ambient) if ambient else np.zeros((0, 0), dtype=np.int64)
        red, piv = field.echelon(vecs)
        return cls(field, ambient, red, tuple(piv))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    @cached_property
    def complement(self) -> tuple[int, ...]:
        """Non-pivot coordinates; their unit vectors span a complement."""
        piv = set(self.pivots)
        return tuple(c for c in range(self.ambient) if c not in piv)

    def reduce(self, v: np.ndarray) -> np.ndarray:
        """Normal form of v (or of each row of v) modulo the subspace."""
        v = np.asarray(v, dtype=np.int64)
        if self.dim == 0:
            return np.mod(v, self.field.p)
        lead = v[..., list(self.pivots)]
        return self.field.sub(v, self.field.matmul(lead, self.basis))

    def contains(self, v: np.ndarray) -> bool:
        return not np.any(self.reduce(v))

    def coords(self, v: np.ndarray) -> np.ndarray:
        """Coordinates of vectors already known to lie in the span."""
        v = np.asarray(v, dtype=np.int64)
        return v[..., list(self.pivots)].copy()

    def quotient_map(self) -> np.ndarray:
        """Matrix (ambient x codim) sending a vector to quotient coordinates."""
        red = self.reduce(np.eye(self.ambient, dtype=np.int64))
        return red[:, list(self.complement)].copy()

    def lift_map(self) -> np.ndarray:
        """Matrix (codim x ambient) choosing representatives of quotient coordinates."""
        out = np.zeros((len(self.complement), self.ambient), dtype=np.int64)
        for k, c in enumerate(self.complement):
            out[k, c] = 1
        return out

    def __contains__(self, v) -> bool:
        return self.contains(v)


@dataclass(frozen=True, eq=False)
class Frame:
    """A basis of a subspace given by explicit (not necessarily echelon) rows.

    Supports coordinates with respect to the given rows, which keeps
    meaningful basis choices (for example labelled algebra elements).
    """

    field: PrimeField
    rows: np.ndarray
    _pivots: tuple[int, ...] = field(repr=False)
    _transform: np.ndarray = field(repr=False)

    @classmethod
    def of(cls, fld: PrimeField, rows) -> "Frame":
        rows = np.asarray(rows, dtype=np.int64)
        red, piv, rank, transform = fld.rref(rows)
        if rank != rows.shape[0]:
            raise Singular("frame rows are linearly dependent")
        return cls(fld, rows, tuple(piv), transform)

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    def coords(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        return self.field.matmul(v[..., list(self._pivots)], self._transform)


def independent_rows(fld: PrimeField, vectors: np.ndarray) -> list[int]:
    """Indices of a greedy maximal independent subset, scanning in order."""
    chosen: list[int] = []
    current = Subspace.of(fld, np.zeros((0, vectors.shape[1]), dtype=np.int64))
    for i, v in enumerate(vectors):
        if not current.contains(v):
            chosen.append(i)
            current = Subspace.of(fld, vectors[chosen])
    return chosen


__all__ = [
    "PrimeField",
    "Subspace",
    "Frame",
    "Singular",
    "DimensionMismatch",
    "is_prime",
    "independent_rows",
    "MAX_MODULUS",
]
