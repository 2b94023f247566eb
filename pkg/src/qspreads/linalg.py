"""Dense matrices and subspaces over F_q scalar indices.

Rows are tuples of scalar indices in [0, q); for q = 2 the packed row code
is literally a bitset.  Subspaces are canonicalized to reduced row echelon
form, which makes equality, hashing, and serialization bit-exact: the key is
the raw RREF entry bytes, row-major.

The GL(n, q) stream enumerates invertible matrices row by row, each new row
taken in increasing order of its packed base-q code while avoiding the span
of the rows already chosen.  The stream is deterministic and can be split
into disjoint substreams by restricting the first-row code range.
"""

from __future__ import annotations

import random
from itertools import combinations, product
from typing import Iterator

from .errors import BudgetExceededError
from .field import ScalarField

DEFAULT_GL_BUDGET = 1 << 26
_CODE_TABLE_CAP = 1 << 9  # build dense qn x qn code tables only below this


def gl_order_product(n: int, q: int) -> int:
    """(q^n - 1)(q^n - q)...(q^n - q^(n-1)); 1 for n = 0."""
    qn = q**n
    out = 1
    for i in range(n):
        out *= qn - q**i
    return out


class Matrix:
    """A matrix over F_q, stored as a tuple of entry-index rows."""

    __slots__ = ("field", "rows", "_packed")

    def __init__(self, field: ScalarField, rows):
        self.field = field
        self.rows = tuple(tuple(r) for r in rows)
        self._packed = None

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def packed_rows(self) -> tuple[int, ...]:
        if self._packed is None:
            q = self.field.q
            packed = []
            for row in self.rows:
                code = 0
                for v in reversed(row):
                    code = code * q + v
                packed.append(code)
            self._packed = tuple(packed)
        return self._packed

    @property
    def key(self) -> bytes:
        return bytes(v for row in self.rows for v in row)

    def is_identity(self) -> bool:
        one = self.field.one
        return all(v == (one if i == j else 0)
                   for i, row in enumerate(self.rows) for j, v in enumerate(row))

    @staticmethod
    def identity(field: ScalarField, n: int) -> "Matrix":
        one = field.one
        return Matrix(field, [[one if i == j else 0 for j in range(n)]
                              for i in range(n)])

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.field.q == other.field.q
                and self.rows == other.rows)

    def __hash__(self):
        return hash((self.field.q, self.rows))

    def __repr__(self):
        return f"Matrix(q={self.field.q}, rows={self.rows})"


class Subspace:
    """A k-dimensional subspace of F_q^n, canonicalized via RREF.

    Two Subspace values compare equal exactly when they describe the same
    subspace; ``key`` is a complete invariant usable for hashing and
    serialization.
    """

    __slots__ = ("field", "n", "rows")

    def __init__(self, field: ScalarField, n: int, rows):
        self.field = field
        self.n = n
        self.rows = rows  # canonical RREF rows, tuple of tuples

    @classmethod
    def from_rows(cls, field: ScalarField, rows) -> "Subspace":
        rows = [list(r) for r in rows]
        if not rows:
            raise ValueError("a subspace needs at least one basis row")
        n = len(rows[0])
        reduced, rank = rref(field, rows)
        if rank != len(rows):
            raise ValueError("basis rows are linearly dependent")
        return cls(field, n, reduced[:rank])

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def key(self) -> bytes:
        return bytes(v for row in self.rows for v in row)

    def vectors(self) -> list[tuple[int, ...]]:
        """All q**dim vectors of the subspace (desk-scale sizes only)."""
        f = self.field
        out = []
        for coeffs in product(range(f.q), repeat=self.dim):
            acc = [0] * self.n
            for c, row in zip(coeffs, self.rows):
                if c:
                    for j, v in enumerate(row):
                        if v:
                            acc[j] = f.add_t[acc[j]][f.mul_t[c][v]]
            out.append(tuple(acc))
        return out

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.field.q == other.field.q
                and self.n == other.n and self.rows == other.rows)

    def __hash__(self):
        return hash((self.field.q, self.n, self.rows))

    def __repr__(self):
        return f"Subspace(q={self.field.q}, n={self.n}, rows={self.rows})"


def rref(field: ScalarField, rows) -> tuple[tuple[tuple[int, ...], ...], int]:
    """Reduced row echelon form over F_q.

    Returns (matrix, rank); the matrix keeps its shape, zero rows sink to
    the bottom, pivots are 1 with zeros above and below.
    """
    work = [list(r) for r in rows]
    nrows = len(work)
    ncols = len(work[0]) if nrows else 0
    add_t, mul_t = field.add_t, field.mul_t
    neg_t, inv_t, one = field.neg_t, field.inv_t, field.one
    piv = 0
    for col in range(ncols):
        sel = None
        for r in range(piv, nrows):
            if work[r][col]:
                sel = r
                break
        if sel is None:
            continue
        work[piv], work[sel] = work[sel], work[piv]
        lead = work[piv][col]
        if lead != one:
            s = inv_t[lead]
            work[piv] = [mul_t[s][v] for v in work[piv]]
        prow = work[piv]
        for r in range(nrows):
            if r != piv and work[r][col]:
                c = neg_t[work[r][col]]
                row = work[r]
                for j in range(col, ncols):
                    if prow[j]:
                        row[j] = add_t[row[j]][mul_t[c][prow[j]]]
        piv += 1
        if piv == nrows:
            break
    return tuple(tuple(r) for r in work), piv


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    f = a.field
    add_t, mul_t = f.add_t, f.mul_t
    bt = list(zip(*b.rows))
    rows = []
    for arow in a.rows:
        out = []
        for bcol in bt:
            acc = 0
            for x, y in zip(arow, bcol):
                if x and y:
                    acc = add_t[acc][mul_t[x][y]]
            out.append(acc)
        rows.append(out)
    return Matrix(f, rows)


def mat_inv(m: Matrix) -> Matrix:
    """Inverse via Gauss-Jordan elimination; raises ValueError if singular."""
    f = m.field
    n = m.n
    one = f.one
    aug = [list(row) + [one if i == j else 0 for j in range(n)]
           for i, row in enumerate(m.rows)]
    reduced, rank = rref(f, aug)
    if rank < n or any(reduced[i][i] != one for i in range(n)):
        raise ValueError("matrix is singular")
    return Matrix(f, [row[n:] for row in reduced[:n]])


def mat_vec(m: Matrix, vec) -> tuple[int, ...]:
    """M @ v for a column coordinate vector v."""
    f = m.field
    add_t, mul_t = f.add_t, f.mul_t
    out = []
    for row in m.rows:
        acc = 0
        for x, y in zip(row, vec):
            if x and y:
                acc = add_t[acc][mul_t[x][y]]
        out.append(acc)
    return tuple(out)


def apply_subspace(m: Matrix, u: Subspace) -> Subspace:
    """Image of u under the column action v -> M @ v.

    The image of an invertible map keeps the dimension; a dimension drop
    means m was singular and is reported as an error.
    """
    rows = [mat_vec(m, r) for r in u.rows]
    reduced, rank = rref(u.field, rows)
    if rank != u.dim:
        raise ValueError("matrix is singular on this subspace")
    return Subspace(u.field, u.n, reduced[:rank])


def intersection_dim(u: Subspace, v: Subspace) -> int:
    """dim(u ^ v) = dim u + dim v - rank of the stacked bases."""
    if u.n != v.n or u.field.q != v.field.q:
        raise ValueError("subspaces live in different ambient spaces")
    _, rank = rref(u.field, list(u.rows) + list(v.rows))
    return u.dim + v.dim - rank


# ---------------------------------------------------------------------------
# packed-code helpers shared by the enumeration and search hot paths


class CodeTables:
    """Dense lookup tables on packed base-q vector codes of length n."""

    __slots__ = ("field", "n", "q", "qn", "powq", "add", "smul", "dot", "digits")

    def __init__(self, field: ScalarField, n: int):
        q = field.q
        qn = q**n
        if qn > _CODE_TABLE_CAP:
            raise BudgetExceededError(
                f"code tables for q^n = {qn} exceed cap {_CODE_TABLE_CAP}")
        self.field = field
        self.n = n
        self.q = q
        self.qn = qn
        self.powq = [q**i for i in range(n)]
        digits = []
        for code in range(qn):
            c, d = code, []
            for _ in range(n):
                d.append(c % q)
                c //= q
            digits.append(tuple(d))
        self.digits = digits
        add_t, mul_t = field.add_t, field.mul_t
        powq = self.powq
        self.add = [
            sum(powq[i] * add_t[a[i]][b[i]] for i in range(n))
            for a in digits for b in digits
        ]
        self.smul = [
            sum(powq[i] * mul_t[c][a[i]] for i in range(n))
            for c in range(q) for a in digits
        ]
        # dot[r*qn + v] = scalar index of <row r, vector v>
        dot = []
        for a in digits:
            for b in digits:
                acc = 0
                for i in range(n):
                    if a[i] and b[i]:
                        acc = add_t[acc][mul_t[a[i]][b[i]]]
                dot.append(acc)
        self.dot = dot

    def pack(self, vec) -> int:
        q = self.q
        code = 0
        for v in reversed(vec):
            code = code * q + v
        return code

    def add_codes(self, a: int, b: int) -> int:
        return self.add[a * self.qn + b]

    def smul_code(self, c: int, a: int) -> int:
        return self.smul[c * self.qn + a]

    def span_mask(self, gens) -> int:
        """Bitmask over codes of the span of the given generator codes."""
        qn = self.qn
        add = self.add
        span = {0}
        for g in gens:
            scaled = [self.smul[c * qn + g] for c in range(1, self.q)]
            new = set(span)
            for s in span:
                base = s * qn
                for sc in scaled:
                    new.add(add[base + sc])
            span = new
        mask = 0
        for s in span:
            mask |= 1 << s
        return mask


_code_table_cache: dict[tuple[int, int, int], CodeTables] = {}


def code_tables(field: ScalarField, n: int) -> CodeTables:
    key = (id(field), field.q, n)
    tab = _code_table_cache.get(key)
    if tab is None:
        tab = CodeTables(field, n)
        _code_table_cache[key] = tab
    return tab


# ---------------------------------------------------------------------------
# GL(n, q) enumeration


def gl_iter(n: int, field: ScalarField, *,
            budget: int = DEFAULT_GL_BUDGET,
            first_row_range: tuple[int, int] | None = None) -> Iterator[Matrix]:
    """Yield every invertible n x n matrix over F_q exactly once.

    Matrices appear in lexicographic order of their packed row codes.
    ``first_row_range = (lo, hi)`` restricts the stream to matrices whose
    first-row code lies in [lo, hi), giving disjoint restartable substreams.
    """
    if gl_order_product(n, field.q) > budget:
        raise BudgetExceededError(
            f"|GL({n},{field.q})| = {gl_order_product(n, field.q)} exceeds "
            f"budget {budget}")
    q = field.q
    qn = q**n
    tabs = code_tables(field, n) if qn <= _CODE_TABLE_CAP else None
    lo, hi = first_row_range if first_row_range else (1, qn)
    lo = max(lo, 1)
    in_span = bytearray(qn)
    in_span[0] = 1
    span = [0]
    rows: list[tuple[int, ...]] = []

    if tabs is not None:
        add, smul, digits = tabs.add, tabs.smul, tabs.digits
    else:
        add_t, mul_t = field.add_t, field.mul_t

        def _digits_of(code):
            d = []
            for _ in range(n):
                d.append(code % q)
                code //= q
            return tuple(d)

        digits = None

    def _emit():
        return Matrix(field, rows)

    def rec(depth: int):
        start, stop = (lo, hi) if depth == 0 else (1, qn)
        last = depth == n - 1
        for code in range(start, stop):
            if in_span[code]:
                continue
            rows.append(digits[code] if tabs is not None else _digits_of(code))
            if last:
                yield _emit()
            else:
                base = len(span)
                if tabs is not None:
                    for c in range(1, q):
                        rc = smul[c * qn + code]
                        for idx in range(base):
                            t = add[span[idx] * qn + rc]
                            in_span[t] = 1
                            span.append(t)
                else:
                    dcode = rows[-1]
                    for c in range(1, q):
                        rc = tuple(mul_t[c][v] for v in dcode)
                        for idx in range(base):
                            sv = span[idx]
                            sd = _digits_of(sv)
                            t = 0
                            for i in range(n - 1, -1, -1):
                                t = t * q + add_t[sd[i]][rc[i]]
                            in_span[t] = 1
                            span.append(t)
                yield from rec(depth + 1)
                for t in span[base:]:
                    in_span[t] = 0
                del span[base:]
            rows.pop()

    yield from rec(0)


def random_gl(n: int, field: ScalarField, rng: random.Random | int) -> Matrix:
    """A uniformly seeded invertible matrix, drawn row by row.

    Each row is sampled by rejection outside the span of the earlier rows,
    so every GL element has positive probability and a fixed seed always
    reproduces the same matrix.
    """
    if isinstance(rng, int):
        rng = random.Random(rng)
    q = field.q
    qn = q**n
    tabs = code_tables(field, n) if qn <= _CODE_TABLE_CAP else None
    span = {0}
    rows = []
    for _ in range(n):
        while True:
            code = rng.randrange(1, qn)
            if code not in span:
                break
        if tabs is not None:
            rows.append(tabs.digits[code])
            new = set()
            for c in range(1, q):
                rc = tabs.smul[c * qn + code]
                for s in span:
                    new.add(tabs.add[s * qn + rc])
            span |= new
        else:
            d = []
            c = code
            for _ in range(n):
                d.append(c % q)
                c //= q
            rows.append(tuple(d))
            add_t, mul_t = field.add_t, field.mul_t
            vecs = [tuple(mul_t[c][v] for v in rows[-1]) for c in range(q)]
            new = set()
            for s in span:
                sd = []
                sc = s
                for _ in range(n):
                    sd.append(sc % q)
                    sc //= q
                for rv in vecs[1:]:
                    t = 0
                    for i in range(n - 1, -1, -1):
                        t = t * q + add_t[sd[i]][rv[i]]
                    new.add(t)
            span |= new
    return Matrix(field, rows)


def all_subspaces(n: int, k: int, field: ScalarField) -> Iterator[Subspace]:
    """Every k-dimensional subspace of F_q^n, via RREF pivot patterns."""
    if not 0 < k <= n:
        raise ValueError("need 0 < k <= n")
    q = field.q
    one = field.one
    for pivots in combinations(range(n), k):
        free = [(r, c) for r in range(k) for c in range(pivots[r] + 1, n)
                if c not in pivots]
        for fill in product(range(q), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for r, p in enumerate(pivots):
                rows[r][p] = one
            for (r, c), v in zip(free, fill):
                rows[r][c] = v
            yield Subspace(field, n, tuple(tuple(r) for r in rows))
