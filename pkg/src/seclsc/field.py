"""Dense linear algebra over a prime field GF(q).

Matrices are plain 2-D ``numpy.int64`` arrays whose entries are kept reduced
to ``[0, q)``.  The modulus is capped below 2**31 so that a product of two
residues, and the difference of such a product with a residue, always fit in
a signed 64-bit integer.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, UsageError

DEFAULT_Q = 2147483647
MAX_Q = 2**31

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """Arithmetic and elimination routines for GF(q).

    >>> f = PrimeField(3)
    >>> f.mul(2, 2), f.inv(2)
    (1, 2)
    """

    def __init__(self, q: int = DEFAULT_Q):
        q = int(q)
        if not is_prime(q):
            raise DomainError(f"modulus {q} is not prime")
        if q >= MAX_Q:
            raise DomainError(f"modulus {q} too large, need q < 2**31")
        self.q = q

    def __repr__(self):
        return f"PrimeField({self.q})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self):
        return hash(("PrimeField", self.q))

    # scalar ops

    def add(self, a, b):
        return (int(a) + int(b)) % self.q

    def sub(self, a, b):
        return (int(a) - int(b)) % self.q

    def mul(self, a, b):
        return int(a) * int(b) % self.q

    def inv(self, a):
        a = int(a) % self.q
        if a == 0:
            raise DomainError("zero has no inverse")
        return pow(a, -1, self.q)

    def op(self, a, b, name: str):
        if name == "inv":
            return self.inv(a)
        try:
            return getattr(self, {"add": "add", "sub": "sub", "mul": "mul"}[name])(a, b)
        except KeyError:
            raise UsageError(f"unknown field op {name!r}") from None

    # array helpers

    def asarray(self, m, ndim: int | None = None) -> np.ndarray:
        if isinstance(m, np.ndarray) and m.dtype == np.int64:
            a = m % self.q
        else:
            a = np.asarray(np.array(m, dtype=object) % self.q, dtype=np.int64)
        if ndim == 2 and a.ndim == 1 and a.size == 0:
            a = a.reshape(0, 0)
        if ndim is not None and a.ndim != ndim:
            raise UsageError(f"expected a {ndim}-d array, got shape {a.shape}")
        return a

    def matmul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        vec = a.ndim == 1
        if vec:
            a = a[None, :]
        if a.shape[1] != b.shape[0]:
            raise UsageError(f"shape mismatch {a.shape} @ {b.shape}")
        out = np.zeros((a.shape[0],) + b.shape[1:], dtype=np.int64)
        for k in range(a.shape[1]):
            out = (out + np.multiply.outer(a[:, k], b[k]) % self.q) % self.q
        return out[0] if vec else out

    def batch_inv(self, x: np.ndarray) -> np.ndarray:
        """Elementwise inverse of nonzero residues by Fermat exponentiation."""
        result = np.ones_like(x)
        base = x % self.q
        e = self.q - 2
        while e:
            if e & 1:
                result = result * base % self.q
            base = base * base % self.q
            e >>= 1
        return result

    # elimination

    def rref(self, m):
        """Reduced row-echelon form and pivot columns."""
        a = self.asarray(m, 2).copy()
        q = self.q
        rows, cols = a.shape
        pivots = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(a[r:, c])[0]
            if nz.size == 0:
                continue
            p = r + int(nz[0])
            if p != r:
                a[[r, p]] = a[[p, r]]
            a[r] = a[r] * self.inv(a[r, c]) % q
            f = a[:, c].copy()
            f[r] = 0
            a = (a - np.multiply.outer(f, a[r]) % q) % q
            pivots.append(c)
            r += 1
        return a, pivots

    def rank(self, m) -> int:
        return len(self.rref(m)[1])

    def row_basis(self, m):
        """Independent rows spanning the row space (the nonzero RREF rows)."""
        r, piv = self.rref(m)
        return r[: len(piv)], piv

    def solve_right(self, a, b):
        """Some x with a @ x = b, or None."""
        a = self.asarray(a, 2)
        b = self.asarray(b, 1)
        if b.shape[0] != a.shape[0]:
            raise UsageError(f"target length {b.shape[0]} != {a.shape[0]} rows")
        aug = np.concatenate([a, b[:, None]], axis=1)
        r, piv = self.rref(aug)
        n = a.shape[1]
        if piv and piv[-1] == n:
            return None
        x = np.zeros(n, dtype=np.int64)
        for i, c in enumerate(piv):
            x[c] = r[i, n]
        return x

    def solve_left(self, m, target):
        """Some u with u @ m = target, or None if target is outside the row space.

        >>> f = PrimeField(3)
        >>> f.solve_left([[2, 1, 0, 1], [0, 1, 2, 2]], [1, 1, 1, 0]).tolist()
        [2, 2]
        """
        m = self.asarray(m, 2)
        target = self.asarray(target, 1)
        if target.shape[0] != m.shape[1]:
            raise UsageError(f"target length {target.shape[0]} != {m.shape[1]} columns")
        return self.solve_right(m.T, target)

    def nullspace(self, a) -> np.ndarray:
        """Basis (as rows) of {x : a @ x = 0}."""
        a = self.asarray(a, 2)
        n = a.shape[1]
        r, piv = self.rref(a)
        free = [c for c in range(n) if c not in set(piv)]
        basis = np.zeros((len(free), n), dtype=np.int64)
        for j, c in enumerate(free):
            basis[j, c] = 1
            for i, pc in enumerate(piv):
                basis[j, pc] = (-r[i, c]) % self.q
        return basis

    def left_nullspace(self, m) -> np.ndarray:
        """Basis rows v with v @ m = 0; shape (rows - rank, rows)."""
        m = self.asarray(m, 2)
        return self.nullspace(m.T)

    def in_row_space(self, m, v) -> bool:
        return self.solve_left(m, v) is not None

    def batch_rank(self, stack) -> np.ndarray:
        """Ranks of a stack of matrices, shape (B, r, c) -> (B,).

        Elimination runs for every matrix in lockstep; each batch member picks
        its own pivot row per column.
        """
        a = np.array(stack, dtype=np.int64) % self.q
        q = self.q
        b, rows, cols = a.shape
        ranks = np.zeros(b, dtype=np.int64)
        if b == 0 or rows == 0:
            return ranks
        done = np.zeros((b, rows), dtype=bool)
        for c in range(cols):
            cand = (a[:, :, c] != 0) & ~done
            has = cand.any(axis=1)
            if not has.any():
                continue
            idx = np.nonzero(has)[0]
            p = cand[idx].argmax(axis=1)
            sub = a[idx]
            prow = sub[np.arange(idx.size), p]
            prow = prow * self.batch_inv(prow[:, c])[:, None] % q
            f = sub[:, :, c] * ~done[idx]
            f[np.arange(idx.size), p] = 0
            sub = (sub - f[:, :, None] * prow[:, None, :] % q) % q
            sub[np.arange(idx.size), p] = prow
            a[idx] = sub
            done[idx, p] = True
            ranks[idx] += 1
        return ranks

    # sampling

    def sample_matrix(self, rng: np.random.Generator, rows: int, cols: int,
                      exclusions=None) -> np.ndarray:
        """Uniform matrix with optional per-cell excluded residues.

        ``exclusions`` maps ``(i, j)`` to a set of residues that cell must avoid;
        such cells are redrawn until they land outside the set.
        """
        out = rng.integers(0, self.q, size=(rows, cols), dtype=np.int64)
        for (i, j), banned in (exclusions or {}).items():
            banned = {int(x) % self.q for x in banned}
            if len(banned) >= self.q:
                raise DomainError("exclusion set covers the whole field")
            while int(out[i, j]) in banned:
                out[i, j] = rng.integers(0, self.q)
        return out

    def sample_element(self, rng: np.random.Generator, exclude=()) -> int:
        return int(self.sample_matrix(rng, 1, 1, {(0, 0): set(exclude)})[0, 0])

