"""Bar construction, fat realization, tower terms, degree and delooping checks.

The bar construction of the diagonal cross-effect cotriple has level q equal
to the (q+1)-fold application of the cotriple; faces apply the counit in one
of the q+1 positions and degeneracies the comultiplication.  The fat
realization is the direct-sum total complex of the resulting truncated
simplicial chain complex: degree m collects level q in internal degree m - q,
the internal differential carries the sign (-1)^q at level q, and the
horizontal differential is the alternating sum of the faces.  Homology
statements are only meaningful within the truncation window (degrees at most
N - 1 for truncation N); every report records that window.

The degree-n tower term is the cone of the augmentation from the realized
bar construction of the (n+1)-st cotriple to the functor value, with the
structure map of the tower given by the cone inclusion.
"""

from __future__ import annotations

from dataclasses import dataclass

from .calculus import (
    NatTransformation,
    cross_effect,
    perp_comultiplication_nat,
    perp_counit_component,
    perp_counit_nat,
    perp_functor,
    perp_whisker,
    require_cotriple_ready,
)
from .complexes import (
    ChainComplex,
    ChainMap,
    ConeData,
    betti,
    cone,
    homology,
    validate,
)
from .cubes import CubicalDiagram, ifiber, tfiber_square
from .eta import EtaObject, cofibrant_replace, coproduct_over_a, iterated_suspension, suspension_square
from .exact import Matrix, block_matrix, matrix_combination
from .functors import FunctorSpec


@dataclass(frozen=True)
class SimplicialChainComplex:
    """Truncated simplicial object in chain complexes."""

    truncation: int
    levels: dict
    faces: dict        # (q, i) -> ChainMap level q -> level q-1, 0 <= i <= q
    degeneracies: dict  # (q, i) -> ChainMap level q -> level q+1, 0 <= i <= q

    def level(self, q: int) -> ChainComplex:
        return self.levels[q]

    def face(self, q: int, i: int) -> ChainMap:
        return self.faces[(q, i)]

    def degeneracy(self, q: int, i: int) -> ChainMap:
        return self.degeneracies[(q, i)]

    def validate_identities(self) -> list[str]:
        """Every simplicial identity that stays inside the truncation."""
        out = []
        n = self.truncation
        for q in range(2, n + 1):
            for j in range(q + 1):
                for i in range(j):
                    lhs = self.face(q - 1, i).compose(self.face(q, j))
                    rhs = self.face(q - 1, j - 1).compose(self.face(q, i))
                    if lhs != rhs:
                        out.append(f"d_{i} d_{j} != d_{j-1} d_{i} at level {q}")
        for q in range(0, n - 1):
            for j in range(q + 1):
                for i in range(j + 1):
                    lhs = self.degeneracy(q + 1, i).compose(self.degeneracy(q, j))
                    rhs = self.degeneracy(q + 1, j + 1).compose(self.degeneracy(q, i))
                    if lhs != rhs:
                        out.append(f"s_{i} s_{j} != s_{j+1} s_{i} at level {q}")
        for q in range(0, n):
            for j in range(q + 1):
                for i in range(q + 2):
                    lhs = self.face(q + 1, i).compose(self.degeneracy(q, j))
                    if i < j:
                        rhs = self.degeneracy(q - 1, j - 1).compose(self.face(q, i)) if q >= 1 else None
                        if rhs is None or lhs != rhs:
                            if rhs is None:
                                out.append(f"d_{i} s_{j} case out of range at level {q}")
                            else:
                                out.append(f"d_{i} s_{j} != s_{j-1} d_{i} at level {q}")
                    elif i in (j, j + 1):
                        if not lhs.is_identity_shaped():
                            out.append(f"d_{i} s_{j} != id at level {q}")
                    else:
                        rhs = (
                            self.degeneracy(q - 1, j).compose(self.face(q, i - 1))
                            if q >= 1
                            else None
                        )
                        if rhs is None or lhs != rhs:
                            if rhs is None:
                                out.append(f"d_{i} s_{j} case out of range at level {q}")
                            else:
                                out.append(f"d_{i} s_{j} != s_{j} d_{i-1} at level {q}")
        return out


def bar_construction(f: FunctorSpec, n: int, x: EtaObject, truncation: int,
                     check: bool = True) -> SimplicialChainComplex:
    """Levels 0..truncation of the cotriple bar construction of the n-th
    diagonal cross effect applied to f, evaluated at (the replacement of) x."""
    require_cotriple_ready(f.ctx)
    if truncation < 0:
        raise ValueError("truncation must be nonnegative")
    x = cofibrant_replace(x).obj
    powers = [f]
    for _ in range(truncation + 2):
        powers.append(perp_functor(powers[-1], n))
    levels = {q: powers[q + 1].value((x,)) for q in range(truncation + 1)}
    faces = {}
    degeneracies = {}
    for q in range(truncation + 1):
        for i in range(q + 1):
            if q >= 1:
                nat = perp_counit_nat(powers[q - i], n)
                for _ in range(i):
                    nat = perp_whisker(nat, n)
                faces[(q, i)] = nat.at(x)
            if q < truncation:
                snat = perp_comultiplication_nat(powers[q - i], n)
                for _ in range(i):
                    snat = perp_whisker(snat, n)
                degeneracies[(q, i)] = snat.at(x)
    bar = SimplicialChainComplex(truncation, levels, faces, degeneracies)
    if check:
        bad = bar.validate_identities()
        if bad:
            raise ValueError("simplicial identities violated: " + "; ".join(bad))
    return bar


@dataclass(frozen=True)
class FatRealization:
    total: ChainComplex
    truncation: int
    level_ranks: dict  # q -> {degree: rank}, the slice bookkeeping

    def slice_offset(self, m: int, q: int) -> int:
        return sum(self.level_ranks[p].get(m - p, 0) for p in range(q))


def fat_realization(s: SimplicialChainComplex) -> FatRealization:
    """Direct-sum total complex of the truncated simplicial object.

    Degree m carrier: levels q = 0..N in internal degree m - q (ascending q);
    differential: internal one with sign (-1)^q plus the alternating sum of
    the faces."""
    n = s.truncation
    ring = s.level(0).ring
    degs = set()
    for q in range(n + 1):
        for k in s.level(q).degrees():
            degs.add(k + q)
    ranks = {}
    for m in sorted(degs):
        r = sum(s.level(q).rank(m - q) for q in range(n + 1))
        if r:
            ranks[m] = r
    diffs = {}
    for m in ranks:
        if not ranks.get(m - 1, 0):
            continue
        rows = [s.level(q).rank(m - 1 - q) for q in range(n + 1)]
        cols = [s.level(q).rank(m - q) for q in range(n + 1)]
        blocks = {}
        for q in range(n + 1):
            if not cols[q]:
                continue
            lev = s.level(q)
            if rows[q]:
                d = lev.diff(m - q)
                blocks[(q, q)] = d if q % 2 == 0 else (d, -1)
            if q >= 1 and rows[q - 1]:
                terms = [
                    (-1 if i % 2 else 1, s.face(q, i).component(m - q))
                    for i in range(q + 1)
                ]
                blocks[(q - 1, q)] = matrix_combination(ring, rows[q - 1], cols[q], terms)
        diffs[m] = block_matrix(ring, rows, cols, blocks)
    total = ChainComplex(ring, ranks, diffs, check=False)
    level_ranks = {q: dict(s.level(q).ranks) for q in range(n + 1)}
    return FatRealization(total, n, level_ranks)


@dataclass(frozen=True)
class TowerTerm:
    """The degree-n term: cone of the augmentation from the realized bar."""

    degree: int
    truncation: int
    base_object: EtaObject       # the replaced object everything is evaluated at
    value_at_base: ChainComplex  # f at the replaced object
    bar: SimplicialChainComplex
    fat: FatRealization
    augmentation: ChainMap       # fat -> value_at_base
    total: ChainComplex          # the tower term itself
    structure_map: ChainMap      # value_at_base -> total

    def window(self):
        """Degrees where truncation-N homology statements are valid."""
        return self.truncation - 1


def tower_term(f: FunctorSpec, n: int, x: EtaObject, truncation: int,
               check: bool = True) -> TowerTerm:
    """The degree-n approximation at x: cone(|bar of the (n+1)-st cotriple| -> f(x))."""
    require_cotriple_ready(f.ctx)
    xr = cofibrant_replace(x).obj
    bar = bar_construction(f, n + 1, xr, truncation, check=check)
    fat = fat_realization(bar)
    value = f.value((xr,))
    eps0 = perp_counit_component(f, n + 1, xr)
    ring = f.ctx.ring
    comps = {}
    for m in fat.total.degrees():
        if not value.rank(m):
            continue
        cols = [bar.level(q).rank(m - q) for q in range(truncation + 1)]
        blocks = {}
        if cols[0]:
            blocks[(0, 0)] = eps0.component(m)
        comps[m] = block_matrix(ring, [value.rank(m)], cols, blocks)
    hat_eps = ChainMap(fat.total, value, comps, check=True)
    c = cone(hat_eps)
    return TowerTerm(
        degree=n,
        truncation=truncation,
        base_object=xr,
        value_at_base=value,
        bar=bar,
        fat=fat,
        augmentation=hat_eps,
        total=c.total,
        structure_map=c.from_target,
    )


# ------------------------------------------------------------ reports

def homology_window(x: ChainComplex, lo: int, hi: int):
    return {k: homology(x, k) for k in range(lo, hi + 1)}


def degree_check(f: FunctorSpec, n: int, tuples, lo: int, hi: int) -> dict:
    """Is f degree n on the sampled tuples: vanishing homology of the
    (n+1)-st cross effect inside the window."""
    failures = []
    for idx, tup in enumerate(tuples):
        cc = cross_effect(f, n + 1, tup)
        for k in range(lo, hi + 1):
            h = homology(cc.fiber, k)
            if not h.is_zero():
                failures.append({"instance": idx, "degree": k, "homology": str(h)})
    return {
        "check": "degree",
        "functor": f.name,
        "n": n,
        "window": [lo, hi],
        "instances": len(list(tuples)),
        "failures": failures,
    }


def _is_reduced(f: FunctorSpec, lo: int, hi: int) -> bool:
    val = f.value((f.ctx.b_object(),))
    return all(homology(val, k).is_zero() for k in range(lo, hi + 1))


def deloop_degree1(f: FunctorSpec, sample_tuples, lo: int, hi: int) -> dict:
    """For a reduced degree-1 functor, the value at the initial object must
    have the homology of the looped value at the double coproduct of B."""
    report = {"check": "deloop-degree1", "functor": f.name, "window": [lo, hi]}
    if not _is_reduced(f, lo - 1, hi + 1):
        report["precondition_failure"] = "functor is not reduced (value at B is not acyclic)"
        report["failures"] = [report["precondition_failure"]]
        return report
    deg = degree_check(f, 1, sample_tuples, lo, hi)
    if deg["failures"]:
        report["precondition_failure"] = "functor is not degree 1 on the sampled tuples"
        report["failures"] = [report["precondition_failure"]]
        return report
    ctx = f.ctx
    k_obj = ctx.initial_object()
    lhs = f.value((cofibrant_replace(k_obj).obj,))
    cop = coproduct_over_a((ctx.b_object(), ctx.b_object()))
    rhs = f.value((cop.obj,))
    failures = []
    table = {}
    for k in range(lo, hi + 1):
        left = betti(lhs, k) if ctx.ring.is_field else homology(lhs, k)
        right = betti(rhs, k + 1) if ctx.ring.is_field else homology(rhs, k + 1)
        table[k] = [str(left), str(right)]
        if left != right:
            failures.append({"degree": k, "value_at_initial": str(left), "looped_value": str(right)})
    report["table"] = table
    report["failures"] = failures
    return report


def functor_square(f: FunctorSpec, sq) -> CubicalDiagram:
    """Apply a 1-ary functor to a strictly commuting suspension square."""
    vertices = {
        0: f.value((sq.initial,)),
        1: f.value((sq.cyl,)),
        2: f.value((sq.cyl,)),
        3: f.value((sq.pushout,)),
    }
    edges = {
        (0, 1): f.map((sq.into_cyl,)),
        (0, 2): f.map((sq.into_cyl,)),
        (1, 2): f.map((sq.left_leg,)),
        (2, 1): f.map((sq.right_leg,)),
    }
    return CubicalDiagram(2, vertices, edges, check=False)


def deloop_excisive(f: FunctorSpec, x: EtaObject, m: int, lo: int, hi: int) -> dict:
    """Iterated delooping against the fiberwise suspension.

    Preconditions checked instance by instance: f is reduced, and f carries
    each tested suspension pushout square to a square with acyclic total
    fiber.  Conclusion: homology ranks of f(x) agree with those of the
    m-fold looped value at the m-fold suspension, inside the window."""
    report = {"check": "deloop-excisive", "functor": f.name, "m": m, "window": [lo, hi]}
    if not _is_reduced(f, lo - 1, hi + m + 1):
        report["precondition_failure"] = "functor is not reduced (value at B is not acyclic)"
        report["failures"] = [report["precondition_failure"]]
        return report
    stage = x
    for j in range(m):
        sq = suspension_square(stage)
        fsq = functor_square(f, sq)
        tf = tfiber_square(fsq).total
        degs = tf.degrees()
        span = range(min(degs) - 1, max(degs) + 2) if degs else range(0, 1)
        bad = [k for k in span if not homology(tf, k).is_zero()]
        if bad:
            report["precondition_failure"] = (
                f"suspension square at stage {j} is not carried to a cartesian square "
                f"(total fiber has homology in degrees {bad})"
            )
            report["failures"] = [report["precondition_failure"]]
            return report
        stage = iterated_suspension(stage, 1)
    lhs = f.value((x,))
    rhs = f.value((iterated_suspension(x, m),))
    failures = []
    table = {}
    for k in range(lo, hi + 1):
        left = betti(lhs, k)
        right = betti(rhs, k + m)
        table[k] = [left, right]
        if left != right:
            failures.append({"degree": k, "value": left, "looped_suspended": right})
    report["table"] = table
    report["failures"] = failures
    return report
