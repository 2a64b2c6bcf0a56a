"""Computable functors from tuples of factorization objects to chain complexes.

A FunctorSpec packages an object action and a morphism action; both must be
strict (preserve identities and composition on the nose) and deterministic,
since the cubical machinery compares functor values for literal equality.

The library covers: identity, constants, tensor/symmetric/exterior powers of
the underlying complex, the external tensor of several slots, the fiber of
the augmentation, composition with the coproduct (used for cross effects),
pre-composition with the fiberwise suspension, a shift post-composition, and
pointwise direct sums.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .complexes import (
    ChainComplex,
    ChainMap,
    direct_sum,
    homotopy_fiber,
    shift,
    shift_map,
    single,
    tensor,
    tensor_map,
)
from .eta import (
    Coproduct,
    EtaContext,
    EtaMorphism,
    EtaObject,
    coproduct_map,
    coproduct_over_a,
    fiberwise_suspension,
    fiberwise_suspension_map,
)
from .exact import Matrix, block_matrix


from .keys import morphism_key as _morphism_key
from .keys import object_key as _object_key


@dataclass(eq=False)
class FunctorSpec:
    """A strict functor from n-tuples over a fixed context to complexes.

    Values and maps are memoized per instance, keyed by the exact structure
    of the inputs: iterated cotriple constructions evaluate functors on the
    same small objects an exponential number of times, and collapsing the
    duplicates is what keeps towers affordable.
    """

    name: str
    arity: int
    ctx: EtaContext
    obj_action: object
    mor_action: object
    _vcache: dict = field(default_factory=dict, repr=False)
    _mcache: dict = field(default_factory=dict, repr=False)

    def value(self, objs) -> ChainComplex:
        objs = tuple(objs)
        if len(objs) != self.arity:
            raise ValueError(f"{self.name} has arity {self.arity}, got {len(objs)} objects")
        key = tuple(_object_key(o) for o in objs)
        hit = self._vcache.get(key)
        if hit is None:
            hit = self.obj_action(objs)
            self._vcache[key] = hit
        return hit

    def map(self, mors) -> ChainMap:
        mors = tuple(mors)
        if len(mors) != self.arity:
            raise ValueError(f"{self.name} has arity {self.arity}, got {len(mors)} morphisms")
        key = tuple(_morphism_key(m) for m in mors)
        hit = self._mcache.get(key)
        if hit is None:
            hit = self.mor_action(mors)
            self._mcache[key] = hit
        return hit

    def __repr__(self):
        return f"FunctorSpec({self.name}, arity={self.arity})"


def identity_functor(ctx: EtaContext) -> FunctorSpec:
    return FunctorSpec("identity", 1, ctx, lambda xs: xs[0].x, lambda fs: fs[0].f)


def constant_functor(ctx: EtaContext, value: ChainComplex, arity: int = 1) -> FunctorSpec:
    def obj(_):
        return value

    def mor(_):
        return ChainMap.identity(value)

    return FunctorSpec(f"constant[{arity}]", arity, ctx, obj, mor)


def tensor_power(ctx: EtaContext, d: int) -> FunctorSpec:
    if d < 1:
        raise ValueError("tensor power wants d >= 1")

    def obj(xs):
        out = xs[0].x
        for _ in range(d - 1):
            out = tensor(out, xs[0].x)
        return out

    def mor(fs):
        out = fs[0].f
        for _ in range(d - 1):
            out = tensor_map(out, fs[0].f)
        return out

    return FunctorSpec(f"tensor:{d}", 1, ctx, obj, mor)


def external_tensor(ctx: EtaContext, n: int) -> FunctorSpec:
    if n < 1:
        raise ValueError("external tensor wants n >= 1")

    def obj(xs):
        out = xs[0].x
        for x in xs[1:]:
            out = tensor(out, x.x)
        return out

    def mor(fs):
        out = fs[0].f
        for f in fs[1:]:
            out = tensor_map(out, f.f)
        return out

    return FunctorSpec(f"external_tensor:{n}", n, ctx, obj, mor)


def structure_fiber(ctx: EtaContext) -> FunctorSpec:
    """X maps to the homotopy fiber of its augmentation: reduced, degree 1."""

    def obj(xs):
        return homotopy_fiber(xs[0].aug).total

    def mor(fs):
        f = fs[0]
        src = homotopy_fiber(f.source.aug).total
        tgt = homotopy_fiber(f.target.aug).total
        b = ctx.b
        comps = {}
        for k in src.degrees():
            if not tgt.rank(k):
                continue
            rows = [f.target.x.rank(k), b.rank(k + 1)]
            cols = [f.source.x.rank(k), b.rank(k + 1)]
            blocks = {}
            if f.source.x.rank(k) and f.target.x.rank(k):
                blocks[(0, 0)] = f.f.component(k)
            if b.rank(k + 1):
                blocks[(1, 1)] = Matrix.identity(ctx.ring, b.rank(k + 1))
            comps[k] = block_matrix(ctx.ring, rows, cols, blocks)
        return ChainMap(src, tgt, comps, check=False)

    return FunctorSpec("structure_fiber", 1, ctx, obj, mor)


def compose_with_coproduct(h: FunctorSpec, n: int) -> FunctorSpec:
    """The n-ary functor sending a tuple to h of its coproduct over A."""
    if h.arity != 1:
        raise ValueError("compose_with_coproduct wants a 1-ary functor")

    def obj(xs):
        return h.value((coproduct_over_a(xs).obj,))

    def mor(fs):
        src = coproduct_over_a([f.source for f in fs])
        tgt = coproduct_over_a([f.target for f in fs])
        from .eta import replace_morphism

        reps = [
            replace_morphism(f, rs, rt)
            for f, rs, rt in zip(fs, src.replacements, tgt.replacements)
        ]
        return h.map((coproduct_map(src, tgt, reps),))

    return FunctorSpec(f"{h.name}.coprod[{n}]", n, h.ctx, obj, mor)


def precompose_suspension(f: FunctorSpec) -> FunctorSpec:
    if f.arity != 1:
        raise ValueError("suspension precomposition wants a 1-ary functor")
    return FunctorSpec(
        f"{f.name}.susp",
        1,
        f.ctx,
        lambda xs: f.value((fiberwise_suspension(xs[0]),)),
        lambda fs: f.map((fiberwise_suspension_map(fs[0]),)),
    )


def postcompose_shift(f: FunctorSpec, s: int) -> FunctorSpec:
    return FunctorSpec(
        f"{f.name}[{s}]",
        f.arity,
        f.ctx,
        lambda xs: shift(f.value(xs), s),
        lambda fs: shift_map(f.map(fs), s),
    )


def sum_functor(fs) -> FunctorSpec:
    fs = list(fs)
    arity = fs[0].arity
    ctx = fs[0].ctx
    if any(g.arity != arity for g in fs):
        raise ValueError("sum of functors with mixed arities")

    def obj(xs):
        return direct_sum([g.value(xs) for g in fs]).total

    def mor(ms):
        srcs = direct_sum([g.value(tuple(m.source for m in ms)) for g in fs])
        tgts = direct_sum([g.value(tuple(m.target for m in ms)) for g in fs])
        total = ChainMap.zero(srcs.total, tgts.total)
        for i, g in enumerate(fs):
            total = total.add(tgts.injections[i].compose(g.map(ms)).compose(srcs.projections[i]))
        return total

    return FunctorSpec("(+).".join(g.name for g in fs), arity, ctx, obj, mor)


# ----------------------------------------------------------------- sym / ext

def _power_check_ring(ctx: EtaContext, d: int, kind: str):
    ring = ctx.ring
    if ring.kind == "fp" and ring.p <= d:
        raise ValueError(f"{kind} power of exponent {d} is not defined over F_{ring.p}")
    if ring.kind != "q":
        raise ValueError(f"{kind} power is implemented over Q only")


def _power_elements(x: ChainComplex):
    """Homogeneous basis elements as (degree, index), in a fixed total order."""
    return [(k, i) for k in x.degrees() for i in range(x.rank(k))]


def _normalize(word, degs, kind: str):
    """Sort a word of basis elements, tracking the graded-commutativity sign.

    Returns (sign, tuple) or (0, None) when the word dies: repeated odd
    elements in the symmetric algebra, repeated even elements in the
    exterior one.
    """
    word = list(word)
    sign = 1
    # insertion sort; adjacent swaps carry Koszul signs
    for i in range(1, len(word)):
        j = i
        while j > 0 and word[j - 1] > word[j]:
            u, v = word[j - 1], word[j]
            koszul = (-1) ** (degs[u] * degs[v])
            sign *= koszul if kind == "sym" else -koszul
            word[j - 1], word[j] = v, u
            j -= 1
    for i in range(1, len(word)):
        if word[i] == word[i - 1]:
            parity = degs[word[i]] % 2
            if (kind == "sym" and parity == 1) or (kind == "ext" and parity == 0):
                return 0, None
    return sign, tuple(word)


def _power_basis(x: ChainComplex, d: int, kind: str):
    elements = _power_elements(x)
    degs = [k for k, _ in elements]
    words = []
    for comb in itertools.combinations_with_replacement(range(len(elements)), d):
        sign, w = _normalize(comb, degs, kind)
        if sign and w == tuple(comb):
            words.append(w)
    by_degree = {}
    index = {}
    for w in words:
        deg = sum(degs[e] for e in w)
        index[w] = (deg, len(by_degree.setdefault(deg, [])))
        by_degree[deg].append(w)
    return elements, degs, by_degree, index


def _power_complex(x: ChainComplex, d: int, kind: str) -> ChainComplex:
    ring = x.ring
    if d == 0:
        return single(ring, 0)
    elements, degs, by_degree, index = _power_basis(x, d, kind)
    ranks = {deg: len(ws) for deg, ws in by_degree.items()}
    diffs = {}
    for deg, ws in sorted(by_degree.items()):
        tgt = by_degree.get(deg - 1, [])
        if not tgt:
            continue
        m = Matrix.zero(ring, len(tgt), len(ws))
        data = list(m.data)
        for col, w in enumerate(ws):
            for slot in range(d):
                e = w[slot]
                k, i = elements[e]
                if not x.rank(k - 1):
                    continue
                dm = x.diff(k)
                leading = sum(degs[w[t]] for t in range(slot))
                outer = -1 if leading % 2 else 1
                for i2 in range(x.rank(k - 1)):
                    c = dm[i2, i]
                    if not c:
                        continue
                    e2 = elements.index((k - 1, i2))
                    sign, nw = _normalize(w[:slot] + (e2,) + w[slot + 1 :], degs, kind)
                    if not sign:
                        continue
                    _, row = index[nw]
                    data[row * len(ws) + col] += outer * sign * c
        m = Matrix(ring, len(tgt), len(ws), data)
        diffs[deg] = m
    return ChainComplex(ring, ranks, diffs, check=False)


def _power_map(f: ChainMap, d: int, kind: str) -> ChainMap:
    ring = f.source.ring
    src = _power_complex(f.source, d, kind)
    tgt = _power_complex(f.target, d, kind)
    if d == 0:
        return ChainMap.identity(src)
    s_elements, s_degs, s_by_degree, _ = _power_basis(f.source, d, kind)
    t_elements, t_degs, t_by_degree, t_index = _power_basis(f.target, d, kind)
    t_pos = {e: i for i, e in enumerate(t_elements)}
    comps = {}
    for deg, ws in sorted(s_by_degree.items()):
        if not tgt.rank(deg):
            continue
        m = Matrix.zero(ring, tgt.rank(deg), len(ws))
        data = list(m.data)
        for col, w in enumerate(ws):
            # expand f(b_1) ... f(b_d) multilinearly
            choices = []
            for e in w:
                k, i = s_elements[e]
                comp = f.component(k)
                terms = [
                    (comp[j, i], t_pos[(k, j)])
                    for j in range(f.target.rank(k))
                    if comp[j, i]
                ]
                choices.append(terms)
            for pick in itertools.product(*choices):
                coeff = ring.one()
                word = []
                for c, e2 in pick:
                    coeff *= c
                    word.append(e2)
                sign, nw = _normalize(tuple(word), t_degs, kind)
                if not sign:
                    continue
                _, row = t_index[nw]
                data[row * len(ws) + col] += sign * coeff
        comps[deg] = Matrix(ring, tgt.rank(deg), len(ws), data)
    return ChainMap(src, tgt, comps, check=False)


def sym_power(ctx: EtaContext, d: int) -> FunctorSpec:
    _power_check_ring(ctx, d, "symmetric")
    return FunctorSpec(
        f"sym:{d}",
        1,
        ctx,
        lambda xs: _power_complex(xs[0].x, d, "sym"),
        lambda fs: _power_map(fs[0].f, d, "sym"),
    )


def ext_power(ctx: EtaContext, d: int) -> FunctorSpec:
    _power_check_ring(ctx, d, "exterior")
    return FunctorSpec(
        f"ext:{d}",
        1,
        ctx,
        lambda xs: _power_complex(xs[0].x, d, "ext"),
        lambda fs: _power_map(fs[0].f, d, "ext"),
    )


# ----------------------------------------------------------------- registry

def build_functor(name: str, ctx: EtaContext, **params) -> FunctorSpec:
    """Build a functor from a registry name, e.g. "tensor:2" or "identity"."""
    if ":" in name:
        base, arg = name.split(":", 1)
        params.setdefault("d", int(arg))
    else:
        base = name
    if base == "identity":
        return identity_functor(ctx)
    if base == "constant":
        value = params.get("value")
        if value is None:
            value = single(ctx.ring, 0)
        return constant_functor(ctx, value, params.get("arity", 1))
    if base == "tensor":
        return tensor_power(ctx, params["d"])
    if base == "sym":
        return sym_power(ctx, params["d"])
    if base == "ext":
        return ext_power(ctx, params["d"])
    if base == "structure_fiber":
        return structure_fiber(ctx)
    if base == "external_tensor":
        return external_tensor(ctx, params.get("d", params.get("n", 2)))
    raise ValueError(f"unknown functor {name!r}")


# registry alias matching the operation name used in reports and the CLI
test_functor = build_functor
