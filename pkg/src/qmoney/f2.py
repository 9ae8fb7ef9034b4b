"""Linear algebra over GF(2) on integer bitsets.

A vector of length ``n`` is stored as a Python int whose value equals the
computational-basis index of the same bit string: coordinate ``i`` is bit
``n - 1 - i``. The text form writes coordinate 0 first.

Subspaces are kept in reduced row echelon form (pivot coordinates strictly
increasing, every pivot column zero in the other rows), so two subspaces are
equal exactly when their bases are.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np


def parity(x: int) -> int:
    return bin(x).count("1") & 1


def dot(a: int, b: int) -> int:
    """Inner product mod 2 of two bitset vectors."""
    return parity(a & b)


@dataclass(frozen=True)
class VecF2:
    n: int
    bits: int

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"bits {self.bits} do not fit in length {self.n}")

    @classmethod
    def from_str(cls, text: str) -> "VecF2":
        text = text.strip()
        if any(c not in "01" for c in text):
            raise ValueError(f"not a 0/1 string: {text!r}")
        return cls(len(text), int(text, 2) if text else 0)

    def __str__(self):
        return format(self.bits, f"0{self.n}b") if self.n else ""

    def __getitem__(self, i):
        return (self.bits >> (self.n - 1 - i)) & 1

    def dot(self, other: "VecF2") -> int:
        if other.n != self.n:
            raise ValueError(f"length mismatch {self.n} vs {other.n}")
        return dot(self.bits, other.bits)

    def __xor__(self, other):
        if other.n != self.n:
            raise ValueError(f"length mismatch {self.n} vs {other.n}")
        return VecF2(self.n, self.bits ^ other.bits)


def _as_int(v, n):
    if isinstance(v, VecF2):
        if v.n != n:
            raise ValueError(f"vector of length {v.n} in a length-{n} context")
        return v.bits
    v = int(v)
    if not 0 <= v < (1 << n):
        raise ValueError(f"{v} does not fit in {n} bits")
    return v


def _rref(rows, n):
    rows = [r for r in rows if r]
    r = 0
    for bit in range(n - 1, -1, -1):
        hit = next((i for i in range(r, len(rows)) if (rows[i] >> bit) & 1), None)
        if hit is None:
            continue
        rows[r], rows[hit] = rows[hit], rows[r]
        for i in range(len(rows)):
            if i != r and (rows[i] >> bit) & 1:
                rows[i] ^= rows[r]
        r += 1
        if r == len(rows):
            break
    return tuple(rows[:r])


@dataclass(frozen=True)
class SubspaceF2:
    n: int
    basis: tuple

    def __post_init__(self):
        basis = tuple(int(b) for b in self.basis)
        if _rref(list(basis), self.n) != basis:
            raise ValueError("basis is not in canonical reduced row echelon form")
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self):
        return len(self.basis)

    @property
    def pivots(self):
        """Pivot coordinates, strictly increasing."""
        return tuple(self.n - b.bit_length() for b in self.basis)

    def vectors(self):
        return [VecF2(self.n, b) for b in self.basis]

    def elements(self) -> np.ndarray:
        """All ``2**dim`` elements as an int64 array (small dims only)."""
        if self.dim > 24:
            raise ValueError("refusing to enumerate more than 2**24 elements")
        out = np.zeros(1, dtype=np.int64)
        for b in self.basis:
            out = np.concatenate([out, out ^ b])
        return np.sort(out)

    def indicator(self) -> np.ndarray:
        """Boolean mask over all ``2**n`` basis indices."""
        mask = np.zeros(1 << self.n, dtype=bool)
        mask[self.elements()] = True
        return mask

    def __contains__(self, v):
        return member(self, v)

    def __str__(self):
        return "\n".join(format(b, f"0{self.n}b") for b in self.basis)

    @classmethod
    def from_text(cls, text: str, n=None) -> "SubspaceF2":
        """Parse one 0/1 row per line (blank lines ignored)."""
        rows = [line.strip() for line in text.splitlines() if line.strip()]
        if n is None:
            if not rows:
                raise ValueError("cannot infer the length of an empty basis file")
            n = len(rows[0])
        vecs = [VecF2.from_str(r) for r in rows]
        return row_reduce(vecs, n)


def row_reduce(vectors: Iterable, n: int = None) -> SubspaceF2:
    """Canonical span of ``vectors``; ``n`` is needed when passing plain ints."""
    vectors = list(vectors)
    if n is None:
        if not vectors or not isinstance(vectors[0], VecF2):
            raise ValueError("length n required for empty or int input")
        n = vectors[0].n
    rows = [_as_int(v, n) for v in vectors]
    return SubspaceF2(n, _rref(rows, n))


def member(s: SubspaceF2, v) -> bool:
    x = _as_int(v, s.n)
    for b in s.basis:
        if (x >> (b.bit_length() - 1)) & 1:
            x ^= b
    return x == 0


def dual(s: SubspaceF2) -> SubspaceF2:
    """Orthogonal complement under the mod-2 dot product."""
    pivot_bits = [b.bit_length() - 1 for b in s.basis]
    pivset = set(pivot_bits)
    rows = []
    for f in range(s.n):
        if f in pivset:
            continue
        t = 1 << f
        for b, p in zip(s.basis, pivot_bits):
            if (b >> f) & 1:
                t |= 1 << p
        rows.append(t)
    return SubspaceF2(s.n, _rref(rows, s.n))


def full_space(n) -> SubspaceF2:
    return SubspaceF2(n, tuple(1 << (n - 1 - i) for i in range(n)))


def random_subspace(n: int, dim: int, rng) -> SubspaceF2:
    """Uniform ``dim``-dimensional subspace of GF(2)^n.

    Draws ``dim`` uniform vectors and retries until they are independent;
    every subspace has the same number of ordered bases, so the span is
    uniform.
    """
    if not 0 <= dim <= n:
        raise ValueError(f"dimension {dim} outside [0, {n}]")
    while True:
        rows = [int(rng.integers(0, 1 << n)) for _ in range(dim)]
        basis = _rref(rows, n)
        if len(basis) == dim:
            return SubspaceF2(n, basis)


def solve_orthogonal(samples: Iterable, n: int = None) -> SubspaceF2:
    """All v with v.z = 0 (mod 2) for every sample z."""
    return dual(row_reduce(samples, n))


def complete_basis(s: SubspaceF2) -> list:
    """Basis of the whole space extending ``s``'s basis (unit vectors fill in)."""
    pivset = {b.bit_length() - 1 for b in s.basis}
    return list(s.basis) + [1 << f for f in range(s.n - 1, -1, -1) if f not in pivset]


def matvec(cols, x: int, n: int) -> int:
    """Image of ``x`` under the linear map whose i-th column is ``cols[i]``."""
    out = 0
    for i, c in enumerate(cols):
        if (x >> (n - 1 - i)) & 1:
            out ^= c
    return out


def invert(cols, n: int) -> list:
    """Columns of the inverse of an invertible GF(2) matrix given by columns."""
    # Augment each column image with its unit-vector tag and eliminate.
    rows = [(c << n) | (1 << (n - 1 - i)) for i, c in enumerate(cols)]
    reduced = _rref(rows, 2 * n)
    if len(reduced) != n or any((r >> n) & ((1 << n) - 1) == 0 for r in reduced):
        raise ValueError("matrix is singular")
    inv = [0] * n
    for r in reduced:
        image = r >> n
        if image & (image - 1):
            raise ValueError("matrix is singular")
        inv[n - image.bit_length()] = r & ((1 << n) - 1)
    return inv
