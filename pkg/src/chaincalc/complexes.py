"""Chain complexes with finite support and their explicit homotopy constructions.

Conventions, fixed once and used everywhere:

* homological (lower) indexing; the differential drops degree by one;
* shift(X, s)_k = X_{k-s} with differential (-1)^s d, so the loop functor
  is shift by -1 and suspension is shift by +1;
* in any direct sum the summands are concatenated in the stated textual
  order, and all comparisons are plain equality in that canonical order;
* homotopy fiber of f: U -> V is U_k (+) V_{k+1} with
  d(u, v) = (d u, -f(u) - d v);
* path object P(f)_k = U_k (+) V_{k+1} (+) V_k with
  d(u, v, v') = (d u, -f(u) - d v + v', d v'), alpha(u) = (u, 0, f(u)),
  beta(u, v, v') = v';
* cone(f)_k = X_{k-1} (+) Y_k with d(x, y) = (-d x, -f(x) + d y);
* cylinder(f)_k = X_k (+) X_{k-1} (+) Y_k with
  d(x, x', y) = (d x + x', -d x', d y - f(x')).

Everything is immutable after construction and validated exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact import Matrix, Ring, ZZ, block_matrix, integer_kernel_basis, kernel_basis, mat_mul, rank, smith_normal_form, solve


class ChainComplex:
    """Bounded complex of finitely generated free modules.

    `ranks` maps degree -> rank (only nonzero ranks stored); `diffs` maps
    degree k -> matrix of shape rank(k-1) x rank(k), stored only where both
    ranks are positive.
    """

    __slots__ = ("ring", "ranks", "diffs")

    def __init__(self, ring: Ring, ranks, diffs, check: bool = True):
        self.ring = ring
        self.ranks = {int(k): int(r) for k, r in ranks.items() if r}
        clean = {}
        for k, m in diffs.items():
            k = int(k)
            rows = self.ranks.get(k - 1, 0)
            cols = self.ranks.get(k, 0)
            if rows == 0 or cols == 0:
                if m is not None and not m.is_zero():
                    raise ValueError(f"differential at degree {k} maps between zero modules")
                continue
            if m.ring is not ring:
                raise ValueError("differential ring mismatch")
            if m.rows != rows or m.cols != cols:
                raise ValueError(
                    f"differential at degree {k} is {m.rows}x{m.cols}, expected {rows}x{cols}"
                )
            clean[k] = m
        self.diffs = clean
        if check:
            bad = validate(self)
            if bad:
                raise ValueError("d^2 != 0: " + "; ".join(bad))

    # -- structure ---------------------------------------------------------

    def rank(self, k: int) -> int:
        return self.ranks.get(k, 0)

    def degrees(self):
        return sorted(self.ranks)

    def diff(self, k: int) -> Matrix:
        m = self.diffs.get(k)
        if m is None:
            return Matrix.zero(self.ring, self.rank(k - 1), self.rank(k))
        return m

    def total_rank(self) -> int:
        return sum(self.ranks.values())

    def is_zero_complex(self) -> bool:
        return not self.ranks

    def __eq__(self, other):
        return (
            isinstance(other, ChainComplex)
            and self.ring is other.ring
            and self.ranks == other.ranks
            and self.diffs == other.diffs
        )

    def __hash__(self):
        return hash((self.ring.name, tuple(sorted(self.ranks.items()))))

    def __repr__(self):
        spans = ", ".join(f"{k}:{r}" for k, r in sorted(self.ranks.items()))
        return f"ChainComplex({self.ring.name}; {spans})"


class ChainMap:
    """Degreewise matrices between two complexes, commuting with differentials."""

    __slots__ = ("source", "target", "comps")

    def __init__(self, source: ChainComplex, target: ChainComplex, comps, check: bool = True):
        if source.ring is not target.ring:
            raise ValueError("source and target over different rings")
        self.source = source
        self.target = target
        clean = {}
        for k, m in comps.items():
            k = int(k)
            rows = target.rank(k)
            cols = source.rank(k)
            if rows == 0 or cols == 0:
                if m is not None and not m.is_zero():
                    raise ValueError(f"component at degree {k} maps between zero modules")
                continue
            if m.rows != rows or m.cols != cols:
                raise ValueError(
                    f"component at degree {k} is {m.rows}x{m.cols}, expected {rows}x{cols}"
                )
            clean[k] = m
        self.comps = clean
        if check:
            bad = validate(self)
            if bad:
                raise ValueError("not a chain map: " + "; ".join(bad))

    def component(self, k: int) -> Matrix:
        m = self.comps.get(k)
        if m is None:
            return Matrix.zero(self.source.ring, self.target.rank(k), self.source.rank(k))
        return m

    @classmethod
    def identity(cls, x: ChainComplex) -> "ChainMap":
        comps = {k: Matrix.identity(x.ring, r) for k, r in x.ranks.items()}
        return cls(x, x, comps, check=False)

    @classmethod
    def zero(cls, source: ChainComplex, target: ChainComplex) -> "ChainMap":
        return cls(source, target, {}, check=False)

    def compose(self, first: "ChainMap") -> "ChainMap":
        """self o first, defined when first.target == self.source."""
        if first.target is not self.source and first.target != self.source:
            raise ValueError("composition mismatch")
        comps = {}
        for k in set(self.comps) & set(first.comps):
            comps[k] = mat_mul(self.comps[k], first.comps[k])
        return ChainMap(first.source, self.target, comps, check=False)

    def add(self, other: "ChainMap") -> "ChainMap":
        if self.source != other.source or self.target != other.target:
            raise ValueError("sum of maps with different ends")
        keys = set(self.comps) | set(other.comps)
        comps = {k: self.component(k).add(other.component(k)) for k in keys}
        return ChainMap(self.source, self.target, comps, check=False)

    def neg(self) -> "ChainMap":
        return ChainMap(self.source, self.target, {k: m.neg() for k, m in self.comps.items()}, check=False)

    def scale(self, c) -> "ChainMap":
        return ChainMap(self.source, self.target, {k: m.scale(c) for k, m in self.comps.items()}, check=False)

    def is_identity_shaped(self) -> bool:
        if self.source != self.target:
            return False
        return all(self.component(k) == Matrix.identity(self.source.ring, r) for k, r in self.source.ranks.items())

    def is_degreewise_iso(self) -> bool:
        """True when every component is a square invertible matrix."""
        for k in set(self.source.ranks) | set(self.target.ranks):
            if self.source.rank(k) != self.target.rank(k):
                return False
            m = self.component(k)
            if m.rows == 0:
                continue
            if self.source.ring.is_field:
                if rank(m) != m.rows:
                    return False
            else:
                d, _, _ = smith_normal_form(m)
                if any(x != 1 for x in d):
                    return False
        return True

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return False
        if self.source != other.source or self.target != other.target:
            return False
        keys = set(self.comps) | set(other.comps)
        return all(self.component(k) == other.component(k) for k in keys)

    def __repr__(self):
        return f"ChainMap({self.source!r} -> {self.target!r})"


def validate(x) -> list[str]:
    """Exhaustive exact check of the defining identities.

    For a complex: every composite d_{k-1} d_k must vanish.  For a map:
    every square d f = f d must commute.  Returns one message per violated
    degree; an empty list means the invariants hold.
    """
    out = []
    if isinstance(x, ChainComplex):
        for k in x.degrees():
            if x.rank(k) and x.rank(k - 1) and x.rank(k - 2):
                if not mat_mul(x.diff(k - 1), x.diff(k)).is_zero():
                    out.append(f"d.d != 0 at degree {k}")
    elif isinstance(x, ChainMap):
        degs = set(x.source.ranks) | set(x.target.ranks)
        for k in sorted(degs):
            left = mat_mul(x.target.diff(k), x.component(k))
            right = mat_mul(x.component(k - 1), x.source.diff(k))
            if left != right:
                out.append(f"square fails at degree {k}")
    else:
        raise TypeError(f"cannot validate {type(x).__name__}")
    return out


def zero_complex(ring: Ring) -> ChainComplex:
    return ChainComplex(ring, {}, {}, check=False)


def single(ring: Ring, degree: int = 0, rk: int = 1) -> ChainComplex:
    """Free module of the given rank concentrated in one degree."""
    return ChainComplex(ring, {degree: rk}, {}, check=False)


def shift(x: ChainComplex, s: int) -> ChainComplex:
    """shift(X, s)_k = X_{k-s}; the differential picks up the sign (-1)^s."""
    ranks = {k + s: r for k, r in x.ranks.items()}
    sign = 1 if s % 2 == 0 else -1
    diffs = {k + s: (m if sign == 1 else m.neg()) for k, m in x.diffs.items()}
    return ChainComplex(x.ring, ranks, diffs, check=False)


def shift_map(f: ChainMap, s: int) -> ChainMap:
    return ChainMap(
        shift(f.source, s),
        shift(f.target, s),
        {k + s: m for k, m in f.comps.items()},
        check=False,
    )


def loop(x: ChainComplex) -> ChainComplex:
    """Down shift: (loop X)_k = X_{k+1}."""
    return shift(x, -1)


@dataclass(frozen=True)
class SumDecomposition:
    """A complex together with the canonical maps of its summands."""

    total: ChainComplex
    injections: tuple
    projections: tuple


def direct_sum(xs) -> SumDecomposition:
    """Block-diagonal sum, summands concatenated in the given order."""
    xs = list(xs)
    if not xs:
        raise ValueError("direct_sum of an empty list needs a ring; use zero_complex")
    ring = xs[0].ring
    for x in xs:
        if x.ring is not ring:
            raise ValueError("ring mismatch in direct sum")
    degs = sorted({k for x in xs for k in x.ranks})
    ranks = {k: sum(x.rank(k) for x in xs) for k in degs}
    diffs = {}
    for k in degs:
        if ranks.get(k - 1, 0) and ranks.get(k, 0):
            diffs[k] = block_matrix(
                ring,
                [x.rank(k - 1) for x in xs],
                [x.rank(k) for x in xs],
                {(i, i): x.diff(k) for i, x in enumerate(xs) if x.rank(k) and x.rank(k - 1)},
            )
    total = ChainComplex(ring, ranks, diffs, check=False)
    injections = []
    projections = []
    for i, x in enumerate(xs):
        inj = {}
        proj = {}
        for k in x.degrees():
            before = sum(y.rank(k) for y in xs[:i])
            blocks_in = {(1, 0): Matrix.identity(ring, x.rank(k))}
            inj[k] = block_matrix(
                ring,
                [before, x.rank(k), ranks[k] - before - x.rank(k)],
                [x.rank(k)],
                blocks_in,
            )
            proj[k] = inj[k].transpose()
        injections.append(ChainMap(x, total, inj, check=False))
        projections.append(ChainMap(total, x, proj, check=False))
    return SumDecomposition(total, tuple(injections), tuple(projections))


def sum_map(fs, source_sum: SumDecomposition, target_sum: SumDecomposition) -> ChainMap:
    """Block-diagonal map between direct sums from summandwise maps."""
    fs = list(fs)
    total = ChainMap.zero(source_sum.total, target_sum.total)
    for i, f in enumerate(fs):
        total = total.add(target_sum.injections[i].compose(f).compose(source_sum.projections[i]))
    return total


def tensor(x: ChainComplex, y: ChainComplex) -> ChainComplex:
    """Tensor product with the Koszul sign: d(a@b) = da@b + (-1)^{|a|} a@db.

    Degree-k part is the sum of x_i @ y_{k-i} over ascending i; within a
    block the basis is row-major in (basis of x_i) x (basis of y_j).
    """
    if x.ring is not y.ring:
        raise ValueError("ring mismatch in tensor")
    ring = x.ring
    pieces = {}
    for i, ri in x.ranks.items():
        for j, rj in y.ranks.items():
            pieces.setdefault(i + j, []).append((i, j, ri * rj))
    for k in pieces:
        pieces[k].sort()
    ranks = {k: sum(sz for _, _, sz in ps) for k, ps in pieces.items()}
    diffs = {}
    for k, ps in sorted(pieces.items()):
        if not ranks.get(k - 1, 0):
            continue
        tgt = pieces.get(k - 1, [])
        tgt_index = {(i, j): bi for bi, (i, j, _) in enumerate(tgt)}
        blocks = {}
        for bj, (i, j, _) in enumerate(ps):
            # d_x (x) id
            if (i - 1, j) in tgt_index and x.rank(i - 1):
                blocks[(tgt_index[(i - 1, j)], bj)] = _kron(x.diff(i), Matrix.identity(ring, y.rank(j)))
            # (-1)^i id (x) d_y
            if (i, j - 1) in tgt_index and y.rank(j - 1):
                m = _kron(Matrix.identity(ring, x.rank(i)), y.diff(j))
                if i % 2:
                    m = m.neg()
                blocks[(tgt_index[(i, j - 1)], bj)] = m
        diffs[k] = block_matrix(
            ring,
            [sz for _, _, sz in tgt],
            [sz for _, _, sz in ps],
            blocks,
        )
    return ChainComplex(ring, ranks, diffs, check=False)


def tensor_map(f: ChainMap, g: ChainMap) -> ChainMap:
    """Tensor of two chain maps (degree-zero maps, so no Koszul signs)."""
    src = tensor(f.source, g.source)
    tgt = tensor(f.target, g.target)
    ring = src.ring
    comps = {}
    for k in src.degrees():
        if not tgt.rank(k):
            continue
        spieces = sorted(
            (i, k - i) for i in f.source.ranks if g.source.rank(k - i)
        )
        tpieces = sorted(
            (i, k - i) for i in f.target.ranks if g.target.rank(k - i)
        )
        tgt_index = {p: bi for bi, p in enumerate(tpieces)}
        blocks = {}
        for bj, (i, j) in enumerate(spieces):
            if (i, j) in tgt_index:
                blocks[(tgt_index[(i, j)], bj)] = _kron(f.component(i), g.component(j))
        comps[k] = block_matrix(
            ring,
            [f.target.rank(i) * g.target.rank(j) for i, j in tpieces],
            [f.source.rank(i) * g.source.rank(j) for i, j in spieces],
            blocks,
        )
    return ChainMap(src, tgt, comps, check=False)


def _kron(a: Matrix, b: Matrix) -> Matrix:
    ring = a.ring
    out = Matrix.zero(ring, a.rows * b.rows, a.cols * b.cols)
    data = list(out.data)
    oc = out.cols
    for i in range(a.rows):
        for k in range(a.cols):
            aik = a[i, k]
            if not aik:
                continue
            for j in range(b.rows):
                base = (i * b.rows + j) * oc + k * b.cols
                brow = b.row(j)
                for l in range(b.cols):
                    if brow[l]:
                        v = aik * brow[l]
                        data[base + l] = v % ring.p if ring.kind == "fp" else v
    out.data = data
    return out


@dataclass(frozen=True)
class FiberData:
    """Homotopy fiber with its projection to the source of the map."""

    total: ChainComplex
    to_source: ChainMap


def homotopy_fiber(f: ChainMap) -> FiberData:
    """hofib(f)_k = U_k (+) V_{k+1}, d(u, v) = (d u, -f(u) - d v)."""
    u, v = f.source, f.target
    ring = u.ring
    degs = sorted(set(u.ranks) | {k - 1 for k in v.ranks})
    ranks = {k: u.rank(k) + v.rank(k + 1) for k in degs}
    ranks = {k: r for k, r in ranks.items() if r}
    diffs = {}
    for k in ranks:
        if not ranks.get(k - 1, 0):
            continue
        blocks = {}
        if u.rank(k) and u.rank(k - 1):
            blocks[(0, 0)] = u.diff(k)
        if u.rank(k) and v.rank(k):
            blocks[(1, 0)] = (f.component(k), -1)
        if v.rank(k + 1) and v.rank(k):
            blocks[(1, 1)] = (v.diff(k + 1), -1)
        diffs[k] = block_matrix(
            ring,
            [u.rank(k - 1), v.rank(k)],
            [u.rank(k), v.rank(k + 1)],
            blocks,
        )
    total = ChainComplex(ring, ranks, diffs, check=False)
    proj = {}
    for k in total.degrees():
        if u.rank(k):
            proj[k] = block_matrix(
                ring, [u.rank(k)], [u.rank(k), v.rank(k + 1)],
                {(0, 0): Matrix.identity(ring, u.rank(k))},
            )
    return FiberData(total, ChainMap(total, u, proj, check=False))


@dataclass(frozen=True)
class PathData:
    """Path object P(f) with the factorization f = beta o alpha."""

    total: ChainComplex
    alpha: ChainMap
    beta: ChainMap


def path_object(f: ChainMap) -> PathData:
    """P(f)_k = U_k (+) V_{k+1} (+) V_k with
    d(u, v, v') = (d u, -f(u) - d v + v', d v').

    beta is the projection to the last coordinate (a levelwise surjection
    onto V), alpha(u) = (u, 0, f(u)) is a quasi-isomorphism, the kernel of
    beta is exactly the homotopy fiber, and beta o alpha = f.
    """
    u, v = f.source, f.target
    ring = u.ring
    degs = sorted(set(u.ranks) | set(v.ranks) | {k - 1 for k in v.ranks})
    ranks = {k: u.rank(k) + v.rank(k + 1) + v.rank(k) for k in degs}
    ranks = {k: r for k, r in ranks.items() if r}
    diffs = {}
    for k in ranks:
        if not ranks.get(k - 1, 0):
            continue
        blocks = {}
        if u.rank(k) and u.rank(k - 1):
            blocks[(0, 0)] = u.diff(k)
        if u.rank(k) and v.rank(k):
            blocks[(1, 0)] = (f.component(k), -1)
        if v.rank(k + 1) and v.rank(k):
            blocks[(1, 1)] = (v.diff(k + 1), -1)
        if v.rank(k) and v.rank(k):
            blocks[(1, 2)] = Matrix.identity(ring, v.rank(k))
        if v.rank(k) and v.rank(k - 1):
            blocks[(2, 2)] = v.diff(k)
        diffs[k] = block_matrix(
            ring,
            [u.rank(k - 1), v.rank(k), v.rank(k - 1)],
            [u.rank(k), v.rank(k + 1), v.rank(k)],
            blocks,
        )
    total = ChainComplex(ring, ranks, diffs, check=False)
    alpha = {}
    beta = {}
    for k in total.degrees():
        rsizes = [u.rank(k), v.rank(k + 1), v.rank(k)]
        if u.rank(k):
            ablocks = {}
            if u.rank(k):
                ablocks[(0, 0)] = Matrix.identity(ring, u.rank(k))
            if v.rank(k):
                ablocks[(2, 0)] = f.component(k)
            alpha[k] = block_matrix(ring, rsizes, [u.rank(k)], ablocks)
        if v.rank(k):
            beta[k] = block_matrix(
                ring, [v.rank(k)], rsizes, {(0, 2): Matrix.identity(ring, v.rank(k))}
            )
    return PathData(
        total,
        ChainMap(u, total, alpha, check=False),
        ChainMap(total, v, beta, check=False),
    )


@dataclass(frozen=True)
class ConeData:
    total: ChainComplex
    from_target: ChainMap       # Y -> cone(f)
    to_shifted_source: ChainMap  # cone(f) -> X[1]


def cone(f: ChainMap) -> ConeData:
    """cone(f)_k = X_{k-1} (+) Y_k, d(x, y) = (-d x, -f(x) + d y)."""
    x, y = f.source, f.target
    ring = x.ring
    degs = sorted({k + 1 for k in x.ranks} | set(y.ranks))
    ranks = {k: x.rank(k - 1) + y.rank(k) for k in degs}
    ranks = {k: r for k, r in ranks.items() if r}
    diffs = {}
    for k in ranks:
        if not ranks.get(k - 1, 0):
            continue
        blocks = {}
        if x.rank(k - 1) and x.rank(k - 2):
            blocks[(0, 0)] = (x.diff(k - 1), -1)
        if x.rank(k - 1) and y.rank(k - 1):
            blocks[(1, 0)] = (f.component(k - 1), -1)
        if y.rank(k) and y.rank(k - 1):
            blocks[(1, 1)] = y.diff(k)
        diffs[k] = block_matrix(
            ring,
            [x.rank(k - 2), y.rank(k - 1)],
            [x.rank(k - 1), y.rank(k)],
            blocks,
        )
    total = ChainComplex(ring, ranks, diffs, check=False)
    incl = {}
    proj = {}
    sx = shift(x, 1)
    for k in total.degrees():
        rsizes = [x.rank(k - 1), y.rank(k)]
        if y.rank(k):
            incl[k] = block_matrix(ring, rsizes, [y.rank(k)], {(1, 0): Matrix.identity(ring, y.rank(k))})
        if x.rank(k - 1):
            proj[k] = block_matrix(ring, [x.rank(k - 1)], rsizes, {(0, 0): Matrix.identity(ring, x.rank(k - 1))})
    return ConeData(
        total,
        ChainMap(y, total, incl, check=False),
        ChainMap(total, sx, proj, check=False),
    )


@dataclass(frozen=True)
class CylinderData:
    total: ChainComplex
    from_source: ChainMap  # X -> Cyl(f), degreewise split
    from_target: ChainMap  # Y -> Cyl(f)
    to_target: ChainMap    # Cyl(f) -> Y, a quasi-isomorphism


def cylinder(f: ChainMap) -> CylinderData:
    """Cyl(f)_k = X_k (+) X_{k-1} (+) Y_k,
    d(x, x', y) = (d x + x', -d x', d y - f(x'))."""
    x, y = f.source, f.target
    ring = x.ring
    degs = sorted(set(x.ranks) | {k + 1 for k in x.ranks} | set(y.ranks))
    ranks = {k: x.rank(k) + x.rank(k - 1) + y.rank(k) for k in degs}
    ranks = {k: r for k, r in ranks.items() if r}
    diffs = {}
    for k in ranks:
        if not ranks.get(k - 1, 0):
            continue
        blocks = {}
        if x.rank(k) and x.rank(k - 1):
            blocks[(0, 0)] = x.diff(k)
        if x.rank(k - 1):
            blocks[(0, 1)] = Matrix.identity(ring, x.rank(k - 1))
        if x.rank(k - 1) and x.rank(k - 2):
            blocks[(1, 1)] = (x.diff(k - 1), -1)
        if x.rank(k - 1) and y.rank(k - 1):
            blocks[(2, 1)] = (f.component(k - 1), -1)
        if y.rank(k) and y.rank(k - 1):
            blocks[(2, 2)] = y.diff(k)
        diffs[k] = block_matrix(
            ring,
            [x.rank(k - 1), x.rank(k - 2), y.rank(k - 1)],
            [x.rank(k), x.rank(k - 1), y.rank(k)],
            blocks,
        )
    total = ChainComplex(ring, ranks, diffs, check=False)
    ix, iy, py = {}, {}, {}
    for k in total.degrees():
        rsizes = [x.rank(k), x.rank(k - 1), y.rank(k)]
        if x.rank(k):
            ix[k] = block_matrix(ring, rsizes, [x.rank(k)], {(0, 0): Matrix.identity(ring, x.rank(k))})
        if y.rank(k):
            iy[k] = block_matrix(ring, rsizes, [y.rank(k)], {(2, 0): Matrix.identity(ring, y.rank(k))})
        if y.rank(k):
            pb = {}
            if x.rank(k):
                pb[(0, 0)] = f.component(k)
            pb[(0, 2)] = Matrix.identity(ring, y.rank(k))
            py[k] = block_matrix(ring, [y.rank(k)], rsizes, pb)
    return CylinderData(
        total,
        ChainMap(x, total, ix, check=False),
        ChainMap(y, total, iy, check=False),
        ChainMap(total, y, py, check=False),
    )


@dataclass(frozen=True)
class HomologyGroup:
    """H_k as free rank plus invariant-factor torsion (empty over a field)."""

    free_rank: int
    torsion: tuple = ()

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = ["Z^%d" % self.free_rank] if self.free_rank else []
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts)


def homology(x: ChainComplex, k: int) -> HomologyGroup:
    """Exact H_k.  Over a field this is the Betti rank; over Z the group is
    presented through Smith normal form."""
    n = x.rank(k)
    if n == 0:
        return HomologyGroup(0)
    dk = x.diff(k)
    dk1 = x.diff(k + 1)
    if x.ring.is_field:
        cycles = n - (rank(dk) if x.rank(k - 1) else 0)
        boundaries = rank(dk1) if x.rank(k + 1) else 0
        return HomologyGroup(cycles - boundaries)
    kern = integer_kernel_basis(dk) if x.rank(k - 1) else Matrix.identity(ZZ, n)
    p = kern.cols
    if p == 0:
        return HomologyGroup(0)
    if not x.rank(k + 1):
        return HomologyGroup(p)
    # coordinates of the boundaries in the kernel basis (exact over Q,
    # integral because the kernel basis spans a saturated sublattice)
    from fractions import Fraction

    from .exact import QQ

    kq = Matrix(QQ, kern.rows, kern.cols, [Fraction(v) for v in kern.data])
    bq = Matrix(QQ, dk1.rows, dk1.cols, [Fraction(v) for v in dk1.data])
    coords = solve(kq, bq)
    if any(c.denominator != 1 for c in coords.data):
        raise AssertionError("kernel basis not saturated")
    pres = Matrix(ZZ, coords.rows, coords.cols, [c.numerator for c in coords.data])
    d, _, _ = smith_normal_form(pres)
    nonzero = [t for t in d if t]
    free = p - len(nonzero)
    torsion = tuple(t for t in nonzero if t != 1)
    return HomologyGroup(free, torsion)


def betti(x: ChainComplex, k: int) -> int:
    return homology(x, k).free_rank


def homology_table(x: ChainComplex, lo: int, hi: int):
    return {k: homology(x, k) for k in range(lo, hi + 1)}


def _induced_map_data(f: ChainMap, k: int):
    """Cycle bases and induced coordinates used by the quasi-iso test."""
    X, Y = f.source, f.target
    ring = X.ring
    zx = kernel_basis(X.diff(k)) if X.rank(k - 1) else Matrix.identity(ring, X.rank(k))
    zy = kernel_basis(Y.diff(k)) if Y.rank(k - 1) else Matrix.identity(ring, Y.rank(k))
    if X.rank(k) == 0:
        zx = Matrix.zero(ring, 0, 0)
    if Y.rank(k) == 0:
        zy = Matrix.zero(ring, 0, 0)
    # boundaries of Y in cycle coordinates
    by = Y.diff(k + 1) if Y.rank(k + 1) else Matrix.zero(ring, Y.rank(k), 0)
    fz = mat_mul(f.component(k), zx) if X.rank(k) and Y.rank(k) else Matrix.zero(ring, Y.rank(k), zx.cols)
    if zy.cols:
        cb = solve(zy, by) if by.cols else Matrix.zero(ring, zy.cols, 0)
        cf = solve(zy, fz) if fz.cols else Matrix.zero(ring, zy.cols, 0)
    else:
        cb = Matrix.zero(ring, 0, by.cols)
        cf = Matrix.zero(ring, 0, fz.cols)
    return zx, zy, cb, cf


def is_quasi_iso(f: ChainMap) -> bool:
    """True iff the induced map on homology is an isomorphism in every
    degree of the joint support.  Over Z this compares invariant factors
    and checks the induced map is onto (f.g. abelian groups are Hopfian,
    so equal invariants plus onto forces an isomorphism)."""
    X, Y = f.source, f.target
    ring = X.ring
    degs = set(X.ranks) | set(Y.ranks)
    for k in sorted(degs):
        hx = homology(X, k)
        hy = homology(Y, k)
        if hx != hy:
            return False
        if hy.is_zero():
            continue
        if ring.is_field:
            zx, zy, cb, cf = _induced_map_data(f, k)
            hdim = zy.cols - (rank(cb) if cb.cols else 0)
            stacked = block_matrix(ring, [zy.cols], [cf.cols, cb.cols], {(0, 0): cf, (0, 1): cb})
            img = (rank(stacked) if stacked.cols else 0) - (rank(cb) if cb.cols else 0)
            if img != hdim:
                return False
        else:
            if not _induced_onto_z(f, k):
                return False
    return True


def _induced_onto_z(f: ChainMap, k: int) -> bool:
    from fractions import Fraction
    from .exact import QQ

    X, Y = f.source, f.target
    zx = integer_kernel_basis(X.diff(k)) if X.rank(k - 1) else Matrix.identity(ZZ, X.rank(k))
    zy = integer_kernel_basis(Y.diff(k)) if Y.rank(k - 1) else Matrix.identity(ZZ, Y.rank(k))
    if X.rank(k) == 0:
        zx = Matrix.zero(ZZ, 0, 0)
    if Y.rank(k) == 0 or zy.cols == 0:
        return True
    by = Y.diff(k + 1) if Y.rank(k + 1) else Matrix.zero(ZZ, Y.rank(k), 0)
    fz = mat_mul(f.component(k), zx) if X.rank(k) and Y.rank(k) else Matrix.zero(ZZ, Y.rank(k), zx.cols)
    zyq = Matrix(QQ, zy.rows, zy.cols, [Fraction(v) for v in zy.data])
    cols = block_matrix(ZZ, [Y.rank(k)], [fz.cols, by.cols], {(0, 0): fz, (0, 1): by})
    colsq = Matrix(QQ, cols.rows, cols.cols, [Fraction(v) for v in cols.data])
    coords = solve(zyq, colsq)
    if any(c.denominator != 1 for c in coords.data):
        raise AssertionError("kernel basis not saturated")
    pres = Matrix(ZZ, coords.rows, coords.cols, [c.numerator for c in coords.data])
    d, _, _ = smith_normal_form(pres)
    # onto iff coker of the combined (induced + boundaries) matrix vanishes,
    # i.e. the invariant factors contain zy.cols ones
    return sum(1 for t in d if t == 1) == zy.cols
