"""Dense exact linear algebra over a Euclidean domain.

Everything funnels through :func:`snf`, which returns unimodular transforms
together with their inverses, so that solving, kernels, column spaces and
cokernels are all read off one decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .errors import DimensionError, RingMismatchError
from .rings import INTEGERS, EuclideanRing


class Mat:
    """Immutable dense matrix over ``ring``; ``data`` is a tuple of row tuples."""

    __slots__ = ("ring", "rows", "cols", "data", "_hash")

    def __init__(self, ring: EuclideanRing, rows: int, cols: int, data: Iterable[Iterable]):
        data = tuple(tuple(r) for r in data)
        if len(data) != rows or any(len(r) != cols for r in data):
            raise DimensionError(f"entries do not form a {rows}x{cols} grid")
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self.data = data
        self._hash = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ring: EuclideanRing = INTEGERS, cols: Optional[int] = None) -> "Mat":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(ring, len(rows), cols, rows)

    @classmethod
    def from_cols(cls, cols: Sequence[Sequence], ring: EuclideanRing = INTEGERS, rows: Optional[int] = None) -> "Mat":
        cols = [list(c) for c in cols]
        if rows is None:
            if not cols:
                raise DimensionError("row count required for a matrix with no columns")
            rows = len(cols[0])
        if any(len(c) != rows for c in cols):
            raise DimensionError("columns of unequal length")
        return cls(ring, rows, len(cols), [[c[i] for c in cols] for i in range(rows)])

    @classmethod
    def zeros(cls, ring: EuclideanRing, rows: int, cols: int) -> "Mat":
        z = ring.zero
        return cls(ring, rows, cols, [[z] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, ring: EuclideanRing, n: int) -> "Mat":
        z, o = ring.zero, ring.one
        return cls(ring, n, n, [[o if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, ring: EuclideanRing, entries: Sequence, rows: Optional[int] = None, cols: Optional[int] = None) -> "Mat":
        rows = len(entries) if rows is None else rows
        cols = len(entries) if cols is None else cols
        z = ring.zero
        return cls(ring, rows, cols, [[entries[i] if i == j and i < len(entries) else z for j in range(cols)] for i in range(rows)])

    @classmethod
    def column(cls, ring: EuclideanRing, entries: Sequence) -> "Mat":
        return cls(ring, len(entries), 1, [[e] for e in entries])

    # -- basic protocol ----------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and self.ring == other.ring and self.data == other.data

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.data))
        return self._hash

    def __repr__(self) -> str:
        fmt = self.ring.format
        body = "; ".join(" ".join(fmt(x) for x in r) for r in self.data)
        return f"Mat({self.rows}x{self.cols}: [{body}])"

    def tolist(self) -> list[list]:
        return [list(r) for r in self.data]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.data)

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return not any(x for r in self.data for x in r)

    @property
    def T(self) -> "Mat":
        return Mat(self.ring, self.cols, self.rows, [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)])

    # -- arithmetic --------------------------------------------------------

    def _check_ring(self, other: "Mat") -> None:
        if self.ring != other.ring:
            raise RingMismatchError(f"{self.ring.tag} vs {other.ring.tag}")

    def __add__(self, other: "Mat") -> "Mat":
        self._check_ring(other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return Mat(self.ring, self.rows, self.cols, [[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)])

    def __sub__(self, other: "Mat") -> "Mat":
        self._check_ring(other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {other.shape} from {self.shape}")
        return Mat(self.ring, self.rows, self.cols, [[a - b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)])

    def __neg__(self) -> "Mat":
        return Mat(self.ring, self.rows, self.cols, [[-a for a in r] for r in self.data])

    def scale(self, c) -> "Mat":
        return Mat(self.ring, self.rows, self.cols, [[c * a for a in r] for r in self.data])

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check_ring(other)
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        z = self.ring.zero
        ocols = list(zip(*other.data)) if other.rows else [()] * other.cols
        out = []
        for r in self.data:
            row = []
            for c in ocols:
                acc = z
                for a, b in zip(r, c):
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return Mat(self.ring, self.rows, other.cols, out)

    def apply(self, v: Sequence) -> tuple:
        if len(v) != self.cols:
            raise DimensionError(f"vector of length {len(v)} for {self.shape} matrix")
        z = self.ring.zero
        out = []
        for r in self.data:
            acc = z
            for a, b in zip(r, v):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return tuple(out)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Mat":
        return Mat(self.ring, len(rows), len(cols), [[self.data[i][j] for j in cols] for i in rows])

    def row_slice(self, start: int, stop: int) -> "Mat":
        return self.submatrix(range(start, stop), range(self.cols))

    def col_slice(self, start: int, stop: int) -> "Mat":
        return self.submatrix(range(self.rows), range(start, stop))

    def power(self, k: int) -> "Mat":
        if self.rows != self.cols:
            raise DimensionError("power of a non-square matrix")
        out = Mat.identity(self.ring, self.rows)
        for _ in range(k):
            out = out @ self
        return out


def hstack(*mats: Mat, rows: Optional[int] = None) -> Mat:
    mats = [m for m in mats if m is not None]
    if not mats:
        raise DimensionError("hstack of nothing")
    ring = mats[0].ring
    n = mats[0].rows if rows is None else rows
    for m in mats:
        if m.rows != n:
            raise DimensionError(f"hstack row mismatch: {m.rows} vs {n}")
        if m.ring != ring:
            raise RingMismatchError("hstack across rings")
    return Mat(ring, n, sum(m.cols for m in mats), [sum((m.data[i] for m in mats), ()) for i in range(n)])


def vstack(*mats: Mat) -> Mat:
    if not mats:
        raise DimensionError("vstack of nothing")
    ring = mats[0].ring
    c = mats[0].cols
    for m in mats:
        if m.cols != c:
            raise DimensionError(f"vstack column mismatch: {m.cols} vs {c}")
    return Mat(ring, sum(m.rows for m in mats), c, [r for m in mats for r in m.data])


def block_diag(*mats: Mat, ring: Optional[EuclideanRing] = None) -> Mat:
    if ring is None:
        if not mats:
            raise DimensionError("block_diag of nothing needs a ring")
        ring = mats[0].ring
    R = sum(m.rows for m in mats)
    C = sum(m.cols for m in mats)
    z = ring.zero
    out = [[z] * C for _ in range(R)]
    r0 = c0 = 0
    for m in mats:
        for i in range(m.rows):
            for j in range(m.cols):
                out[r0 + i][c0 + j] = m.data[i][j]
        r0 += m.rows
        c0 += m.cols
    return Mat(ring, R, C, out)


def block(grid: Sequence[Sequence[Optional[Mat]]], row_sizes: Sequence[int], col_sizes: Sequence[int], ring: EuclideanRing) -> Mat:
    """Assemble a block matrix; ``None`` blocks are zero."""
    z = ring.zero
    R, C = sum(row_sizes), sum(col_sizes)
    out = [[z] * C for _ in range(R)]
    r0 = 0
    for bi, rs in enumerate(row_sizes):
        c0 = 0
        for bj, cs in enumerate(col_sizes):
            m = grid[bi][bj]
            if m is not None:
                if m.shape != (rs, cs):
                    raise DimensionError(f"block ({bi},{bj}) has shape {m.shape}, expected {(rs, cs)}")
                for i in range(rs):
                    row = out[r0 + i]
                    src = m.data[i]
                    for j in range(cs):
                        row[c0 + j] = src[j]
            c0 += cs
        r0 += rs
    return Mat(ring, R, C, out)


def kron(a: Mat, b: Mat) -> Mat:
    rows = []
    for ra in a.data:
        for rb in b.data:
            rows.append([x * y for x in ra for y in rb])
    return Mat(a.ring, a.rows * b.rows, a.cols * b.cols, rows)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SNFDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``Uinv``, ``Vinv`` their inverses."""

    U: Mat
    D: Mat
    V: Mat
    Uinv: Mat
    Vinv: Mat
    factors: tuple
    rank: int

    @property
    def diagonal(self) -> tuple:
        return tuple(self.D.data[i][i] for i in range(min(self.D.rows, self.D.cols)))


def _snf_core(A: Mat, track: bool):
    ring = A.ring
    deg = ring.degree
    dm = ring.divmod
    m, n = A.rows, A.cols
    a = [list(r) for r in A.data]
    z, o = ring.zero, ring.one
    if track:
        U = [[o if i == j else z for j in range(m)] for i in range(m)]
        Ui = [[o if i == j else z for j in range(m)] for i in range(m)]
        V = [[o if i == j else z for j in range(n)] for i in range(n)]
        Vi = [[o if i == j else z for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if track:
            U[i], U[j] = U[j], U[i]
            for r in Ui:
                r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        if track:
            for r in V:
                r[i], r[j] = r[j], r[i]
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def row_axpy(dst, src, q):
        # row_dst -= q * row_src
        rd, rs = a[dst], a[src]
        for k in range(n):
            if rs[k]:
                rd[k] = rd[k] - q * rs[k]
        if track:
            ud, us = U[dst], U[src]
            for k in range(m):
                if us[k]:
                    ud[k] = ud[k] - q * us[k]
            for r in Ui:
                if r[dst]:
                    r[src] = r[src] + q * r[dst]

    def col_axpy(dst, src, q):
        # col_dst -= q * col_src
        for r in a:
            if r[src]:
                r[dst] = r[dst] - q * r[src]
        if track:
            for r in V:
                if r[src]:
                    r[dst] = r[dst] - q * r[src]
            vd, vs = Vi[dst], Vi[src]
            for k in range(n):
                if vd[k]:
                    vs[k] = vs[k] + q * vd[k]

    def scale_row(i, u):
        ui = ring.unit_inverse(u)
        a[i] = [ui * x if x else x for x in a[i]]
        if track:
            U[i] = [ui * x if x else x for x in U[i]]
            for r in Ui:
                if r[i]:
                    r[i] = r[i] * u

    t = 0
    diag = []
    while t < min(m, n):
        # pivot: smallest Euclidean degree, ties broken row-major
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                x = row[j]
                if x:
                    d = deg(x)
                    if best is None or d < best[0]:
                        best = (d, i, j)
                        if d == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                x = a[i][t]
                if x:
                    q, r = dm(x, p)
                    row_axpy(i, t, q)
                    if r:
                        dirty = True
            for j in range(t + 1, n):
                x = a[t][j]
                if x:
                    q, r = dm(x, p)
                    col_axpy(j, t, q)
                    if r:
                        dirty = True
            if dirty:
                # a remainder of smaller degree appeared in row/column t: re-pivot there
                best = None
                for i in range(t, m):
                    x = a[i][t]
                    if x and (best is None or deg(x) < best[0]):
                        best = (deg(x), i, t)
                for j in range(t + 1, n):
                    x = a[t][j]
                    if x and (best is None or deg(x) < best[0]):
                        best = (deg(x), t, j)
                _, pi, pj = best
                if pi != t:
                    swap_rows(t, pi)
                if pj != t:
                    swap_cols(t, pj)
                continue
            # row and column t are clear; enforce divisibility on the remainder
            bad = None
            for i in range(t + 1, m):
                row = a[i]
                for j in range(t + 1, n):
                    if row[j] and dm(row[j], p)[1]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_axpy(t, bad, -o)
        canon, unit = ring.normalize(a[t][t])
        if unit != o:
            scale_row(t, unit)
        diag.append(a[t][t])
        t += 1
    D = Mat(ring, m, n, a)
    if not track:
        return D, diag, None
    return D, diag, (Mat(ring, m, m, U), Mat(ring, n, n, V), Mat(ring, m, m, Ui), Mat(ring, n, n, Vi))


@lru_cache(maxsize=8192)
def snf(A: Mat) -> SNFDecomposition:
    """Smith normal form with transforms; deterministic for a given input."""
    D, diag, (U, V, Ui, Vi) = _snf_core(A, True)
    ring = A.ring
    factors = tuple(d for d in diag if not ring.is_unit(d))
    return SNFDecomposition(U=U, D=D, V=V, Uinv=Ui, Vinv=Vi, factors=factors, rank=len(diag))


@lru_cache(maxsize=8192)
def smith_diagonal(A: Mat) -> tuple:
    """Nonzero diagonal of the Smith form, without transforms."""
    _, diag, _ = _snf_core(A, False)
    return tuple(diag)


def rank(A: Mat) -> int:
    """Rank over the fraction field."""
    return len(smith_diagonal(A))


def invariant_factors(A: Mat) -> tuple:
    ring = A.ring
    return tuple(d for d in smith_diagonal(A) if not ring.is_unit(d))


def cokernel_invariants(A: Mat) -> tuple[tuple, int]:
    """Invariant factors (non-unit, canonical) and free rank of ``R^rows / A R^cols``."""
    diag = smith_diagonal(A)
    ring = A.ring
    return tuple(d for d in diag if not ring.is_unit(d)), A.rows - len(diag)


def solve_linear(A: Mat, b: Sequence) -> Optional[tuple]:
    """Some ``x`` with ``A x == b`` exactly, or ``None`` when no solution exists over the ring."""
    if len(b) != A.rows:
        raise DimensionError(f"right-hand side of length {len(b)} for a {A.rows}-row matrix")
    ring = A.ring
    if A.cols == 0:
        return () if not any(b) else None
    dec = snf(A)
    c = dec.U.apply(b)
    y = [ring.zero] * A.cols
    for i in range(dec.rank):
        q, r = ring.divmod(c[i], dec.D.data[i][i])
        if r:
            return None
        y[i] = q
    for i in range(dec.rank, A.rows):
        if c[i]:
            return None
    return dec.V.apply(y)


def solve_matrix(A: Mat, B: Mat) -> Optional[Mat]:
    """``X`` with ``A @ X == B`` or ``None``."""
    cols = []
    for j in range(B.cols):
        x = solve_linear(A, B.col(j))
        if x is None:
            return None
        cols.append(x)
    return Mat.from_cols(cols, A.ring, rows=A.cols)


def kernel_basis(A: Mat) -> Mat:
    """Columns form a basis of ``ker A`` (a free module over a PID)."""
    if A.rows == 0:
        return Mat.identity(A.ring, A.cols)
    dec = snf(A)
    return dec.V.col_slice(dec.rank, A.cols)


def column_basis(A: Mat) -> Mat:
    """Columns form a basis of the column span of ``A``."""
    if A.cols == 0 or A.rows == 0:
        return Mat.zeros(A.ring, A.rows, 0)
    dec = snf(A)
    cols = []
    for i in range(dec.rank):
        d = dec.D.data[i][i]
        cols.append(tuple(x * d for x in dec.Uinv.col(i)))
    return Mat.from_cols(cols, A.ring, rows=A.rows)


def det(A: Mat):
    """Determinant by fraction-free (Bareiss) elimination."""
    if A.rows != A.cols:
        raise DimensionError("determinant of a non-square matrix")
    ring = A.ring
    n = A.rows
    if n == 0:
        return ring.one
    a = [list(r) for r in A.data]
    sign = ring.one
    prev = ring.one
    for k in range(n - 1):
        if not a[k][k]:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return ring.zero
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = ring.exact_div(a[i][j] * a[k][k] - a[i][k] * a[k][j], prev)
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def is_unimodular(A: Mat) -> bool:
    return A.rows == A.cols and A.ring.is_unit(det(A))


def hermite_rows(A: Mat) -> tuple[Mat, Mat]:
    """Row-style Hermite form ``H = W @ A`` with ``W`` unimodular; canonical for the row module."""
    ring = A.ring
    m, n = A.rows, A.cols
    a = [list(r) for r in A.data]
    z, o = ring.zero, ring.one
    W = [[o if i == j else z for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r >= m:
            break
        rows = [i for i in range(r, m) if a[i][c]]
        if not rows:
            continue
        while True:
            rows = [i for i in range(r, m) if a[i][c]]
            piv = min(rows, key=lambda i: (ring.degree(a[i][c]), i))
            if piv != r:
                a[r], a[piv] = a[piv], a[r]
                W[r], W[piv] = W[piv], W[r]
            others = [i for i in range(r + 1, m) if a[i][c]]
            if not others:
                break
            for i in others:
                q = ring.divmod(a[i][c], a[r][c])[0]
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                W[i] = [x - q * y for x, y in zip(W[i], W[r])]
        _, u = ring.normalize(a[r][c])
        ui = ring.unit_inverse(u)
        a[r] = [ui * x for x in a[r]]
        W[r] = [ui * x for x in W[r]]
        for i in range(r):
            q = ring.divmod(a[i][c], a[r][c])[0]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                W[i] = [x - q * y for x, y in zip(W[i], W[r])]
        r += 1
    return Mat(ring, m, n, a), Mat(ring, m, m, W)
