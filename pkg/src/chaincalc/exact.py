"""Exact dense linear algebra over Q, F_p, and Z.

Scalars are `fractions.Fraction` for Q, plain ints reduced to [0, p) for
F_p, and plain ints for Z.  A :class:`Matrix` is immutable by convention:
nothing in this package mutates `data` after construction, so values can
be shared freely across threads and memo tables.

Rank and kernels are only defined over the two field rings; integer
matrices go through :func:`smith_normal_form` instead.
"""

from __future__ import annotations

from fractions import Fraction


def _is_prime(n: int) -> bool:
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


class Ring:
    """Coefficient ring tag: Rationals ("q"), PrimeField(p) ("fp:p"), Integers ("z")."""

    __slots__ = ("kind", "p")
    _cache: dict = {}

    def __new__(cls, kind: str, p: int | None = None):
        key = (kind, p)
        hit = cls._cache.get(key)
        if hit is not None:
            return hit
        if kind not in ("q", "z", "fp"):
            raise ValueError(f"unknown ring kind {kind!r}")
        if kind == "fp":
            if p is None or not _is_prime(p):
                raise ValueError(f"PrimeField needs a prime modulus, got {p!r}")
        elif p is not None:
            raise ValueError("only PrimeField takes a modulus")
        self = object.__new__(cls)
        self.kind = kind
        self.p = p
        cls._cache[key] = self
        return self

    @property
    def name(self) -> str:
        return f"fp:{self.p}" if self.kind == "fp" else self.kind

    @property
    def is_field(self) -> bool:
        return self.kind != "z"

    def zero(self):
        return Fraction(0) if self.kind == "q" else 0

    def one(self):
        return Fraction(1) if self.kind == "q" else 1

    def coerce(self, x):
        """Bring an int / Fraction into canonical form for this ring."""
        if self.kind == "q":
            return x if isinstance(x, Fraction) else Fraction(x)
        if self.kind == "fp":
            return int(x) % self.p
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return x.numerator
        return int(x)

    def neg(self, x):
        if self.kind == "fp":
            return (-x) % self.p
        return -x

    def inv(self, x):
        if self.kind == "q":
            return Fraction(1) / x
        if self.kind == "fp":
            return pow(x, self.p - 2, self.p)
        raise ValueError("no inverses over Z; use smith_normal_form")

    def __repr__(self):
        return f"Ring({self.name!r})"


QQ = Ring("q")
ZZ = Ring("z")


def GF(p: int) -> Ring:
    return Ring("fp", p)


def parse_ring(text: str) -> Ring:
    """Parse a ring name as it appears on the CLI: q, z, or fp:P."""
    if text == "q":
        return QQ
    if text == "z":
        return ZZ
    if text.startswith("fp:"):
        return GF(int(text[3:]))
    raise ValueError(f"cannot parse ring {text!r} (expected q, z, or fp:P)")


class Matrix:
    """Dense row-major matrix with exact entries, immutable by convention."""

    __slots__ = ("ring", "rows", "cols", "data", "_nnz")

    def __init__(self, ring: Ring, rows: int, cols: int, entries):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        data = [ring.coerce(x) for x in entries]
        if len(data) != rows * cols:
            raise ValueError(f"need {rows * cols} entries, got {len(data)}")
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self.data = data
        self._nnz = None

    def nnz_rows(self):
        """Per-row nonzero (column, value) pairs, computed once; immutability
        makes the cache safe."""
        if self._nnz is None:
            nc = self.cols
            data = self.data
            if nc == 0:
                self._nnz = [[] for _ in range(self.rows)]
            else:
                self._nnz = [
                    [(j, data[base + j]) for j in range(nc) if data[base + j]]
                    for base in range(0, self.rows * nc, nc)
                ]
        return self._nnz

    @classmethod
    def zero(cls, ring: Ring, rows: int, cols: int) -> "Matrix":
        m = object.__new__(cls)
        m.ring, m.rows, m.cols = ring, rows, cols
        m.data = [ring.zero()] * (rows * cols)
        m._nnz = None
        return m

    _identity_cache: dict = {}

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Matrix":
        key = (ring.name, n)
        hit = cls._identity_cache.get(key)
        if hit is not None:
            return hit
        m = cls.zero(ring, n, n)
        data = list(m.data)
        one = ring.one()
        for i in range(n):
            data[i * n + i] = one
        m.data = data
        cls._identity_cache[key] = m
        return m

    @classmethod
    def from_rows(cls, ring: Ring, rows) -> "Matrix":
        rows = [list(r) for r in rows]
        nr = len(rows)
        nc = len(rows[0]) if rows else 0
        flat = []
        for r in rows:
            if len(r) != nc:
                raise ValueError("ragged rows")
            flat.extend(r)
        return cls(ring, nr, nc, flat)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i * self.cols + j]

    def row(self, i: int):
        return self.data[i * self.cols : (i + 1) * self.cols]

    def tolists(self):
        return [self.row(i) for i in range(self.rows)]

    def is_zero(self) -> bool:
        if self._nnz is not None:
            return not any(self._nnz)
        return not any(self.data)

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.ring is other.ring
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.ring.name, self.rows, self.cols, tuple(self.data)))

    def __repr__(self):
        return f"Matrix({self.ring.name}, {self.rows}x{self.cols}, {self.tolists()})"

    def transpose(self) -> "Matrix":
        out = Matrix.zero(self.ring, self.cols, self.rows)
        data = list(out.data)
        for i in range(self.rows):
            base = i * self.cols
            for j in range(self.cols):
                data[j * self.rows + i] = self.data[base + j]
        out.data = data
        return out

    def add(self, other: "Matrix") -> "Matrix":
        _check_same_shape(self, other)
        p = self.ring.p
        if self.ring.kind == "fp":
            data = [(a + b) % p if b else a for a, b in zip(self.data, other.data)]
        else:
            data = [(a + b if a else b) if b else a for a, b in zip(self.data, other.data)]
        return _raw(self.ring, self.rows, self.cols, data)

    def sub(self, other: "Matrix") -> "Matrix":
        _check_same_shape(self, other)
        p = self.ring.p
        if self.ring.kind == "fp":
            data = [(a - b) % p if b else a for a, b in zip(self.data, other.data)]
        else:
            data = [a - b if b else a for a, b in zip(self.data, other.data)]
        return _raw(self.ring, self.rows, self.cols, data)

    def neg(self) -> "Matrix":
        p = self.ring.p
        if self.ring.kind == "fp":
            data = [(-a) % p if a else a for a in self.data]
        else:
            data = [-a if a else a for a in self.data]
        return _raw(self.ring, self.rows, self.cols, data)

    def scale(self, c) -> "Matrix":
        c = self.ring.coerce(c)
        p = self.ring.p
        if self.ring.kind == "fp":
            data = [(c * a) % p if a else a for a in self.data]
        else:
            data = [c * a if a else a for a in self.data]
        return _raw(self.ring, self.rows, self.cols, data)

    def mul(self, other: "Matrix") -> "Matrix":
        return mat_mul(self, other)


def _raw(ring, rows, cols, data) -> Matrix:
    m = object.__new__(Matrix)
    m.ring, m.rows, m.cols, m.data = ring, rows, cols, data
    m._nnz = None
    return m


def _check_same_shape(a: Matrix, b: Matrix):
    if a.ring is not b.ring:
        raise ValueError(f"ring mismatch: {a.ring.name} vs {b.ring.name}")
    if a.rows != b.rows or a.cols != b.cols:
        raise ValueError(f"shape mismatch: {a.rows}x{a.cols} vs {b.rows}x{b.cols}")


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    """Exact matrix product through the cached sparsity of both factors; the
    block-structured matrices produced by the fiber constructions are mostly
    zero, so the cost is proportional to the nonzero work."""
    if a.ring is not b.ring:
        raise ValueError(f"ring mismatch: {a.ring.name} vs {b.ring.name}")
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.rows}x{a.cols} times {b.rows}x{b.cols}")
    ring = a.ring
    nr, nc = a.rows, b.cols
    zero = ring.zero()
    out = [zero] * (nr * nc)
    nnz = [[] for _ in range(nr)]
    brows = b.nnz_rows()
    is_fp = ring.kind == "fp"
    p = ring.p
    for i, arow in enumerate(a.nnz_rows()):
        if not arow:
            continue
        acc: dict = {}
        for k, aik in arow:
            for j, bkj in brows[k]:
                cur = acc.get(j)
                acc[j] = aik * bkj if cur is None else cur + aik * bkj
        obase = i * nc
        row_nnz = nnz[i]
        for j, v in acc.items():
            if is_fp:
                v = v % p
            if v:
                out[obase + j] = v
                row_nnz.append((j, v))
    m = _raw(ring, nr, nc, out)
    m._nnz = nnz
    return m


def block_matrix(ring: Ring, row_sizes, col_sizes, blocks) -> Matrix:
    """Assemble a matrix from blocks.

    `blocks` maps (block_row, block_col) -> Matrix or (Matrix, sign) with
    sign in {1, -1}; absent entries are zero.  Blocks are written through
    their cached sparsity, so assembling the large but mostly zero matrices
    of iterated fibers costs nonzeros, not area.
    """
    rows = sum(row_sizes)
    cols = sum(col_sizes)
    roff = [0]
    for s in row_sizes:
        roff.append(roff[-1] + s)
    coff = [0]
    for s in col_sizes:
        coff.append(coff[-1] + s)
    data = [ring.zero()] * (rows * cols)
    nnz = [[] for _ in range(rows)]
    for (bi, bj), m in blocks.items():
        sign = 1
        if isinstance(m, tuple):
            m, sign = m
        if m is None:
            continue
        if m.ring is not ring:
            raise ValueError("block ring mismatch")
        if m.rows != row_sizes[bi] or m.cols != col_sizes[bj]:
            raise ValueError(
                f"block ({bi},{bj}) is {m.rows}x{m.cols}, expected "
                f"{row_sizes[bi]}x{col_sizes[bj]}"
            )
        r0, c0 = roff[bi], coff[bj]
        if sign == 1:
            for i, row in enumerate(m.nnz_rows()):
                if not row:
                    continue
                base = (r0 + i) * cols + c0
                acc = nnz[r0 + i]
                for j, v in row:
                    data[base + j] = v
                    acc.append((c0 + j, v))
        else:
            p = ring.p
            for i, row in enumerate(m.nnz_rows()):
                if not row:
                    continue
                base = (r0 + i) * cols + c0
                acc = nnz[r0 + i]
                for j, v in row:
                    w = (-v) % p if p else -v
                    data[base + j] = w
                    acc.append((c0 + j, w))
    out = _raw(ring, rows, cols, data)
    out._nnz = nnz
    return out


def matrix_combination(ring: Ring, rows: int, cols: int, terms) -> Matrix:
    """Sum of sign * matrix over terms, accumulated through sparsity."""
    acc: dict = {}
    for sign, m in terms:
        if m.rows != rows or m.cols != cols:
            raise ValueError("combination shape mismatch")
        for i, row in enumerate(m.nnz_rows()):
            if not row:
                continue
            base = i * cols
            for j, v in row:
                t = v if sign == 1 else -v
                pos = base + j
                cur = acc.get(pos)
                acc[pos] = t if cur is None else cur + t
    zero = ring.zero()
    data = [zero] * (rows * cols)
    nnz = [[] for _ in range(rows)]
    p = ring.p
    for pos, v in acc.items():
        if ring.kind == "fp":
            v = v % p
        if v:
            data[pos] = v
            nnz[pos // cols].append((pos % cols, v))
    out = _raw(ring, rows, cols, data)
    out._nnz = nnz
    return out


def rank(m: Matrix) -> int:
    """Rank by exact Gaussian elimination; field rings only.

    Rows are kept as sparse dicts so the large but very sparse matrices
    coming out of bar constructions eliminate quickly.
    """
    ring = m.ring
    if not ring.is_field:
        raise ValueError("rank is only defined over a field; use smith_normal_form over Z")
    rows = []
    for i in range(m.rows):
        base = i * m.cols
        row = {j: m.data[base + j] for j in range(m.cols) if m.data[base + j]}
        if row:
            rows.append(row)
    # columns that still contain a nonzero, mapped to the rows touching them
    col_rows: dict[int, set[int]] = {}
    for ri, row in enumerate(rows):
        for j in row:
            col_rows.setdefault(j, set()).add(ri)
    is_fp = ring.kind == "fp"
    p = ring.p
    retired = [False] * len(rows)
    rk = 0
    for j in sorted(col_rows):
        touching = [ri for ri in col_rows.get(j, ()) if not retired[ri] and j in rows[ri]]
        if not touching:
            continue
        piv = min(touching, key=lambda ri: len(rows[ri]))
        rk += 1
        retired[piv] = True
        prow = rows[piv]
        pval = prow[j]
        pinv = pow(pval, p - 2, p) if is_fp else None
        for ri in touching:
            if ri == piv:
                continue
            row = rows[ri]
            if is_fp:
                factor = (row[j] * pinv) % p
            else:
                factor = row[j] / pval
            for k, v in prow.items():
                if is_fp:
                    nv = (row.get(k, 0) - factor * v) % p
                else:
                    nv = row.get(k, ring.zero()) - factor * v
                if nv:
                    row[k] = nv
                    col_rows.setdefault(k, set()).add(ri)
                else:
                    row.pop(k, None)
    return rk


def _rref(m: Matrix):
    """Reduced row echelon form over a field.  Returns (rows, pivot_cols)."""
    ring = m.ring
    if not ring.is_field:
        raise ValueError("row reduction needs a field")
    is_fp = ring.kind == "fp"
    p = ring.p
    rows = [list(m.row(i)) for i in range(m.rows)]
    nr, nc = m.rows, m.cols
    pivots = []
    r = 0
    for c in range(nc):
        pr = None
        for i in range(r, nr):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = ring.inv(rows[r][c])
        if is_fp:
            rows[r] = [(x * inv) % p for x in rows[r]]
        else:
            rows[r] = [x * inv for x in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c]:
                f = rows[i][c]
                if is_fp:
                    rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
                else:
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return rows, pivots


def kernel_basis(m: Matrix) -> Matrix:
    """Columns form a basis of the null space; field rings only."""
    ring = m.ring
    rows, pivots = _rref(m)
    pivset = set(pivots)
    free = [c for c in range(m.cols) if c not in pivset]
    out = Matrix.zero(ring, m.cols, len(free))
    data = list(out.data)
    one = ring.one()
    for idx, fc in enumerate(free):
        data[fc * len(free) + idx] = one
        for r, pc in enumerate(pivots):
            v = rows[r][fc]
            if v:
                data[pc * len(free) + idx] = ring.neg(v)
    out.data = data
    return out


def solve(m: Matrix, rhs: Matrix) -> Matrix:
    """One exact solution X of m X = rhs (free variables set to 0).

    Raises ValueError if any column of rhs is outside the column space.
    """
    ring = m.ring
    aug = block_matrix(ring, [m.rows], [m.cols, rhs.cols], {(0, 0): m, (0, 1): rhs})
    rows, pivots = _rref(aug)
    for r in range(len(pivots), m.rows):
        if any(rows[r][m.cols :]):
            raise ValueError("inconsistent system")
    if any(pc >= m.cols for pc in pivots):
        raise ValueError("inconsistent system")
    out = Matrix.zero(ring, m.cols, rhs.cols)
    data = list(out.data)
    for r, pc in enumerate(pivots):
        data[pc * rhs.cols : (pc + 1) * rhs.cols] = rows[r][m.cols :]
    out.data = data
    return out


def inverse(m: Matrix) -> Matrix:
    """Exact inverse of a square matrix.  Over Z the input must be unimodular."""
    if m.rows != m.cols:
        raise ValueError("inverse of a non-square matrix")
    if m.ring.kind == "z":
        qm = _raw(QQ, m.rows, m.cols, [Fraction(x) for x in m.data])
        qinv = inverse(qm)
        if any(x.denominator != 1 for x in qinv.data):
            raise ValueError("matrix is not unimodular over Z")
        return _raw(ZZ, m.rows, m.cols, [x.numerator for x in qinv.data])
    try:
        x = solve(m, Matrix.identity(m.ring, m.rows))
    except ValueError:
        raise ValueError("matrix is singular") from None
    return x


def det(m: Matrix):
    """Exact determinant via fraction elimination (small matrices only)."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    if m.ring.kind == "fp":
        rows = [list(m.row(i)) for i in range(n)]
        p = m.ring.p
        d = 1
        for c in range(n):
            pr = next((i for i in range(c, n) if rows[i][c]), None)
            if pr is None:
                return 0
            if pr != c:
                rows[c], rows[pr] = rows[pr], rows[c]
                d = (-d) % p
            inv = pow(rows[c][c], p - 2, p)
            d = (d * rows[c][c]) % p
            for i in range(c + 1, n):
                if rows[i][c]:
                    f = (rows[i][c] * inv) % p
                    rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[c])]
        return d
    rows = [[Fraction(x) for x in m.row(i)] for i in range(n)]
    d = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if rows[i][c]), None)
        if pr is None:
            return m.ring.coerce(0)
        if pr != c:
            rows[c], rows[pr] = rows[pr], rows[c]
            d = -d
        d *= rows[c][c]
        inv = Fraction(1) / rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c]:
                f = rows[i][c] * inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return m.ring.coerce(d)


def smith_normal_form(m: Matrix):
    """Classical Smith reduction over Z with pivot by minimal nonzero |entry|.

    Returns (d, u, v) with u m v = diag(d), each d_i >= 0, d_i | d_{i+1},
    and u, v unimodular.  `d` has length min(rows, cols), zeros trailing.
    """
    if m.ring.kind != "z":
        raise ValueError("smith_normal_form is only defined over Z")
    nr, nc = m.rows, m.cols
    a = [list(m.row(i)) for i in range(nr)]
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    v = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):
        # row_dst += c * row_src
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, c):
        for row in a:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    limit = min(nr, nc)
    while t < limit:
        # pivot: minimal nonzero absolute value in the trailing block
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = a[i][j]
                if x and (best is None or abs(x) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        if bi != t:
            swap_rows(t, bi)
        if bj != t:
            swap_cols(t, bj)
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    add_row(i, t, -q)
                    if a[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    add_col(j, t, -q)
                    if a[t][j]:
                        swap_cols(t, j)
                        dirty = True
        if a[t][t] < 0:
            negate_row(t)
        # divisibility: pull a non-divisible entry into column t and redo
        piv = a[t][t]
        culprit = None
        for i in range(t + 1, nr):
            for j in range(t + 1, nc):
                if a[i][j] % piv:
                    culprit = i
                    break
            if culprit is not None:
                break
        if culprit is not None:
            add_row(t, culprit, 1)
            continue
        t += 1
    d = [a[i][i] for i in range(limit)]
    umat = Matrix(ZZ, nr, nr, [x for row in u for x in row])
    vmat = Matrix(ZZ, nc, nc, [x for row in v for x in row])
    return d, umat, vmat


def integer_kernel_basis(m: Matrix) -> Matrix:
    """Basis of the integer null space (a saturated sublattice), via SNF."""
    if m.ring.kind != "z":
        raise ValueError("integer kernel is for Z matrices")
    d, _, v = smith_normal_form(m)
    zero_cols = [j for j in range(m.cols) if j >= len(d) or d[j] == 0]
    out = Matrix.zero(ZZ, m.cols, len(zero_cols))
    data = list(out.data)
    for idx, j in enumerate(zero_cols):
        for i in range(m.cols):
            data[i * len(zero_cols) + idx] = v.data[i * m.cols + j]
    out.data = data
    return out
