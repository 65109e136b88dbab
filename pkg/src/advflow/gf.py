"""Prime-field arithmetic on numpy integer arrays.

All values live in ``Z/qZ`` for a prime ``q`` and are stored as ``int64``
arrays; products are reduced eagerly and dot products are chunked when the
accumulator could overflow, so every result is exact.  Only prime moduli
are supported: the codecs rely on every nonzero element being invertible.
"""

from __future__ import annotations

import numpy as np


class GFError(ValueError):
    """Invalid finite-field operation."""


class SingularMatrixError(GFError):
    """A matrix expected to be invertible (or full rank) is not."""


class InconsistentSystemError(GFError):
    """A linear system has no solution."""


def is_prime(n: int) -> bool:
    """Deterministic primality test for small moduli (trial division)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def smallest_prime_above(n: int) -> int:
    """The smallest prime strictly greater than *n*."""
    candidate = max(n + 1, 2)
    while not is_prime(candidate):
        candidate += 1
    return candidate


class GF:
    """The prime field with ``q`` elements.

    Arrays passed in are coerced with a mod-``q`` reduction, so negative
    or oversized integers are accepted anywhere an element is.
    """

    def __init__(self, q: int):
        if not is_prime(q):
            raise GFError(f"field order must be prime, got {q}")
        self.q = q

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("GF", self.q))

    # -- element-wise ------------------------------------------------------

    def array(self, data) -> np.ndarray:
        return np.asarray(data, dtype=np.int64) % self.q

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def add(self, a, b) -> np.ndarray:
        return (self.array(a) + self.array(b)) % self.q

    def sub(self, a, b) -> np.ndarray:
        return (self.array(a) - self.array(b)) % self.q

    def neg(self, a) -> np.ndarray:
        return (-self.array(a)) % self.q

    def mul(self, a, b) -> np.ndarray:
        return (self.array(a) * self.array(b)) % self.q

    def pow(self, base, exp: int) -> np.ndarray:
        """Element-wise ``base ** exp`` by repeated squaring."""
        b = self.array(base)
        if exp < 0:
            b = self.inv(b)
            exp = -exp
        result = np.ones_like(b)
        while exp:
            if exp & 1:
                result = result * b % self.q
            b = b * b % self.q
            exp >>= 1
        return result

    def inv(self, a) -> np.ndarray:
        """Element-wise multiplicative inverse (Fermat)."""
        arr = self.array(a)
        if np.any(arr == 0):
            raise GFError("zero has no inverse")
        return self._inv(arr)

    def _inv(self, arr: np.ndarray) -> np.ndarray:
        result = np.ones_like(arr)
        b = arr.copy()
        exp = self.q - 2
        while exp:
            if exp & 1:
                result = result * b % self.q
            b = b * b % self.q
            exp >>= 1
        return result

    def random(self, rng: np.random.Generator, shape) -> np.ndarray:
        """Uniform field elements drawn from *rng*."""
        return rng.integers(0, self.q, size=shape, dtype=np.int64)

    # -- linear algebra ----------------------------------------------------

    def matmul(self, a, b) -> np.ndarray:
        """Exact matrix product; chunks the contraction to avoid overflow."""
        A = self.array(a)
        B = self.array(b)
        inner = A.shape[-1]
        # int64 accumulator headroom: inner * (q-1)^2 must stay below 2^62
        step = max(1, (1 << 62) // max(1, (self.q - 1) ** 2))
        if inner <= step:
            return (A @ B) % self.q
        if B.ndim == 1:
            B = B[:, None]
            out = self.matmul(A, B)
            return out[..., 0]
        out = (A[..., :step] @ B[..., :step, :]) % self.q
        for start in range(step, inner, step):
            stop = min(start + step, inner)
            out = (out + A[..., start:stop] @ B[..., start:stop, :]) % self.q
        return out

    def vandermonde(self, points, cols: int) -> np.ndarray:
        """Matrix with entry ``(i, j) = points[i] ** j``.

        Points must be distinct in the field so that square submatrices
        built from full rows are invertible.
        """
        pts = self.array(points)
        if pts.ndim != 1:
            raise GFError("points must be one-dimensional")
        if len(np.unique(pts)) != pts.shape[0]:
            raise GFError("evaluation points must be distinct mod q")
        V = np.ones((pts.shape[0], cols), dtype=np.int64)
        for j in range(1, cols):
            V[:, j] = V[:, j - 1] * pts % self.q
        return V

    def hash_row(self, rho: int, length: int) -> np.ndarray:
        """Powers ``[1, rho, ..., rho**(length-1)]``; a degree-bounded probe.

        Dotting this row against a nonzero vector of *length*
        coefficients gives a polynomial in ``rho`` of degree below
        *length*, so at most ``length - 1`` seeds can zero it.
        """
        if length < 1:
            raise GFError("hash row needs positive length")
        row = np.ones(length, dtype=np.int64)
        r = int(rho) % self.q
        for j in range(1, length):
            row[j] = row[j - 1] * r % self.q
        return row

    def _eliminate(
        self, M: np.ndarray
    ) -> tuple[np.ndarray, list[int], int]:
        """Row-reduce *M* in place; return (matrix, pivot columns, swaps)."""
        M = M % self.q
        rows, cols = M.shape
        pivots: list[int] = []
        swaps = 0
        r = 0
        for c in range(cols):
            if r >= rows:
                break
            hot = np.nonzero(M[r:, c])[0]
            if hot.size == 0:
                continue
            p = r + int(hot[0])
            if p != r:
                M[[r, p]] = M[[p, r]]
                swaps += 1
            M[r] = M[r] * self._inv(M[r, c : c + 1]) % self.q
            mask = np.nonzero(M[:, c])[0]
            mask = mask[mask != r]
            if mask.size:
                M[mask] = (M[mask] - np.outer(M[mask, c], M[r])) % self.q
            pivots.append(c)
            r += 1
        return M, pivots, swaps

    def rank(self, a) -> int:
        A = self.array(a)
        if A.ndim != 2:
            raise GFError("rank needs a matrix")
        if 0 in A.shape:
            return 0
        _, pivots, _ = self._eliminate(A.copy())
        return len(pivots)

    def det(self, a) -> int:
        A = self.array(a)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise GFError("determinant needs a square matrix")
        n = A.shape[0]
        if n == 0:
            return 1
        M = A.copy()
        det = 1
        for c in range(n):
            hot = np.nonzero(M[c:, c])[0]
            if hot.size == 0:
                return 0
            p = c + int(hot[0])
            if p != c:
                M[[c, p]] = M[[p, c]]
                det = (-det) % self.q
            det = det * int(M[c, c]) % self.q
            inv = self._inv(M[c, c : c + 1])
            below = np.nonzero(M[c + 1 :, c])[0] + c + 1
            if below.size:
                factors = M[below, c] * inv % self.q
                M[below] = (M[below] - np.outer(factors, M[c])) % self.q
        return det

    def solve(self, a, b) -> np.ndarray:
        """Solve ``A x = b`` exactly for a full-column-rank ``A``.

        ``A`` may be tall; extra rows must be consistent.

        Raises:
            InconsistentSystemError: the stacked system has no solution.
            SingularMatrixError: ``A`` has deficient column rank.
        """
        A = self.array(a)
        B = self.array(b)
        squeeze = B.ndim == 1
        if squeeze:
            B = B[:, None]
        if A.shape[0] != B.shape[0]:
            raise GFError("row counts differ")
        n = A.shape[1]
        M, pivots, _ = self._eliminate(np.hstack([A, B]))
        for row in M[len(pivots) :]:
            if np.any(row[n:]):
                raise InconsistentSystemError("system has no solution")
        if any(p >= n for p in pivots):
            raise InconsistentSystemError("system has no solution")
        if len(pivots) < n:
            raise SingularMatrixError(
                f"column rank {len(pivots)} below {n}; solution not unique"
            )
        x = M[:n, n:]
        return x[:, 0] if squeeze else x

    def invert(self, a) -> np.ndarray:
        A = self.array(a)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise GFError("inverse needs a square matrix")
        try:
            return self.solve(A, np.eye(A.shape[0], dtype=np.int64))
        except InconsistentSystemError as exc:  # pragma: no cover
            raise SingularMatrixError(str(exc)) from exc
