"""Seeded random instances for the verification suites.

All generators take a `random.Random` so that every report is reproducible
from its recorded seed.  Complexes are built from elementary pieces and then
conjugated by random invertible (unimodular over Z) basis changes, which
keeps d^2 = 0 exact while producing generic-looking matrices.  Chain maps
are sums of canonical maps and null-homotopic perturbations d h + h d.
"""

from __future__ import annotations

from fractions import Fraction

from .complexes import ChainComplex, ChainMap, direct_sum, shift, single, zero_complex
from .exact import GF, QQ, ZZ, Matrix, mat_mul


def random_scalar(rng, ring, lo=-3, hi=3):
    if ring.kind == "fp":
        return rng.randrange(ring.p)
    return rng.randint(lo, hi)


def random_matrix(rng, ring, rows, cols, lo=-3, hi=3):
    return Matrix(ring, rows, cols, [random_scalar(rng, ring, lo, hi) for _ in range(rows * cols)])


def _random_invertible(rng, ring, n):
    """Product of elementary matrices; unimodular over Z."""
    m = Matrix.identity(ring, n)
    for _ in range(2 * n):
        kind = rng.randrange(3)
        i, j = rng.randrange(n), rng.randrange(n)
        e = Matrix.identity(ring, n)
        if kind == 0 and i != j:
            data = list(e.data)
            c = random_scalar(rng, ring, -2, 2)
            data[i * n + j] = ring.coerce(c)
            e = Matrix(ring, n, n, data)
        elif kind == 1 and i != j:
            data = list(e.data)
            data[i * n + i] = ring.zero()
            data[j * n + j] = ring.zero()
            data[i * n + j] = ring.one()
            data[j * n + i] = ring.one()
            e = Matrix(ring, n, n, data)
        elif kind == 2 and ring.kind != "fp":
            data = list(e.data)
            data[i * n + i] = ring.coerce(-1)
            e = Matrix(ring, n, n, data)
        m = mat_mul(m, e)
    return m


def random_complex(rng, ring, max_pieces=3, degree_span=(-2, 3)) -> ChainComplex:
    """Sum of points and small two-term complexes in random degrees, then a
    random basis conjugation in every degree."""
    pieces = []
    for _ in range(rng.randint(0, max_pieces)):
        deg = rng.randint(*degree_span)
        if rng.random() < 0.45:
            pieces.append(single(ring, deg))
        else:
            scal = random_scalar(rng, ring, -3, 3)
            pieces.append(
                ChainComplex(ring, {deg: 1, deg + 1: 1}, {deg + 1: Matrix(ring, 1, 1, [scal])})
            )
    if not pieces:
        return zero_complex(ring)
    x = direct_sum(pieces).total
    changes = {k: _random_invertible(rng, ring, r) for k, r in x.ranks.items()}
    return conjugate(x, changes)


def conjugate(x: ChainComplex, changes) -> ChainComplex:
    """Apply basis changes S_k: new d_k = S_{k-1} d_k S_k^{-1}."""
    from .exact import inverse

    diffs = {}
    for k in x.ranks:
        if not x.rank(k - 1):
            continue
        s_prev = changes.get(k - 1)
        s_cur = changes.get(k)
        m = x.diff(k)
        if s_prev is not None:
            m = mat_mul(s_prev, m)
        if s_cur is not None:
            m = mat_mul(m, inverse(s_cur))
        diffs[k] = m
    return ChainComplex(x.ring, dict(x.ranks), diffs, check=False)


def random_graded_map(rng, x: ChainComplex, y: ChainComplex, shift_by=0, density=0.7):
    """Random degreewise matrices X_k -> Y_{k+shift_by} (no chain condition)."""
    comps = {}
    for k in x.degrees():
        if y.rank(k + shift_by) and rng.random() < density:
            comps[k] = random_matrix(rng, x.ring, y.rank(k + shift_by), x.rank(k), -2, 2)
    return comps


def null_homotopic_map(rng, x: ChainComplex, y: ChainComplex) -> ChainMap:
    """d h + h d for a random degree +1 graded map h: always a chain map."""
    h = random_graded_map(rng, x, y, shift_by=1)
    comps = {}
    for k in set(x.ranks):
        if not y.rank(k):
            continue
        total = Matrix.zero(x.ring, y.rank(k), x.rank(k))
        hk = h.get(k)
        if hk is not None and y.rank(k + 1):
            total = total.add(mat_mul(y.diff(k + 1), hk))
        hk1 = h.get(k - 1)
        if hk1 is not None and x.rank(k - 1):
            total = total.add(mat_mul(hk1, x.diff(k)))
        comps[k] = total
    return ChainMap(x, y, comps, check=False)


def random_context(rng, ring, kind=None):
    """Random factorization context.

    kind: "based" (A = B = 0), "pointed" (A = 0, random B), or "split"
    (B = A (+) C with the unit the leading block, so eta is standard split
    as the cotriple machinery requires).
    """
    from .eta import EtaContext

    if kind is None:
        kind = rng.choice(["based", "pointed", "split"])
    if kind == "based":
        return EtaContext.based(ring)
    if kind == "pointed":
        b = random_complex(rng, ring, max_pieces=1, degree_span=(0, 1))
        if b.is_zero_complex():
            b = single(ring, 0)
        return EtaContext.pointed_over(b)
    if kind == "split":
        a = single(ring, 0)
        c = random_complex(rng, ring, max_pieces=1, degree_span=(0, 1))
        dec = direct_sum([a, c])
        from .eta import EtaContext as _Ctx

        return _Ctx(ring, a, dec.total, dec.injections[0])
    raise ValueError(f"unknown context kind {kind!r}")


def random_chain_map_to(rng, target: ChainComplex, extra_pieces=1):
    """A random chain map into a fixed target: projection off a sum with the
    target as a summand, perturbed by a homotopy, then conjugated at the source."""
    from .exact import inverse

    w = random_complex(rng, target.ring, max_pieces=extra_pieces)
    dec = direct_sum([target, w])
    x = dec.total
    f = dec.projections[0]
    if rng.random() < 0.25:
        f = ChainMap.zero(x, target)
    f = f.add(null_homotopic_map(rng, x, target))
    changes = {k: _random_invertible(rng, target.ring, r) for k, r in x.ranks.items()}
    x2 = conjugate(x, changes)
    comps = {}
    for k in x.degrees():
        if not target.rank(k):
            continue
        comps[k] = mat_mul(f.component(k), inverse(changes[k]))
    return ChainMap(x2, target, comps, check=False)


def random_eta_object(rng, ctx):
    """Random factorization object over any of the generated contexts."""
    from .eta import EtaObject

    ring = ctx.ring
    if ctx.a.is_zero_complex():
        if ctx.b.is_zero_complex():
            x = random_complex(rng, ring)
            return EtaObject(ctx, x, ChainMap.zero(ctx.a, x), ChainMap.zero(x, ctx.b))
        aug = random_chain_map_to(rng, ctx.b)
        return EtaObject(ctx, aug.source, ChainMap.zero(ctx.a, aug.source), aug)
    # split context: X = A (+) W as a direct sum, unit the leading block,
    # augmentation eta on A and a random chain map on W
    w = random_complex(rng, ring, max_pieces=1, degree_span=(0, 1))
    dec = direct_sum([ctx.a, w])
    rho = null_homotopic_map(rng, w, ctx.b)
    aug = ctx.eta.compose(dec.projections[0]).add(rho.compose(dec.projections[1]))
    return EtaObject(ctx, dec.total, dec.injections[0], aug)


def random_eta_composable(rng, ctx, length=2):
    """A chain of composable morphisms built back to front: choosing the
    underlying map first and defining the source augmentation by restriction
    keeps every link a strict morphism of factorizations."""
    from .eta import EtaMorphism, EtaObject

    ring = ctx.ring
    tail = random_eta_object(rng, ctx)
    chain = []
    current = tail
    for _ in range(length):
        if ctx.a.is_zero_complex():
            f = random_chain_map_to(rng, current.x) if current.x.total_rank() else None
            if f is None:
                x = random_complex(rng, ring)
                src = EtaObject(ctx, x, ChainMap.zero(ctx.a, x), ChainMap.zero(x, ctx.b))
                chain.append(EtaMorphism(src, current, ChainMap.zero(x, current.x)))
                current = src
                continue
            src = EtaObject(
                ctx, f.source, ChainMap.zero(ctx.a, f.source), current.aug.compose(f)
            )
            chain.append(EtaMorphism(src, current, f))
            current = src
        else:
            w = random_complex(rng, ring, max_pieces=1, degree_span=(0, 1))
            dec = direct_sum([ctx.a, w])
            sigma = null_homotopic_map(rng, w, ctx.a)
            gamma_full = null_homotopic_map(rng, w, current.x)
            f = current.unit.compose(sigma.compose(dec.projections[1]))
            f = f.add(current.unit.compose(dec.projections[0]))
            f = f.add(gamma_full.compose(dec.projections[1]))
            aug_src = current.aug.compose(f)
            src = EtaObject(ctx, dec.total, dec.injections[0], aug_src)
            chain.append(EtaMorphism(src, current, f))
            current = src
    chain.reverse()
    return chain


def random_functor_instance(rng, ring, n, lean=False):
    """A random n-ary functor with a matching tuple of objects.

    With lean=True the bodies are kept very small (rank <= 1 slots, linear
    functors), which keeps the triple constructions on 3n-cubes affordable.
    """
    from .eta import EtaObject
    from .functors import (
        compose_with_coproduct,
        constant_functor,
        external_tensor,
        identity_functor,
        structure_fiber,
        sum_functor,
        tensor_power,
    )

    ctx = random_context(rng, ring, rng.choice(["based", "pointed", "split"]))

    def small_object():
        if lean and ctx.a.is_zero_complex() and rng.random() < 0.4:
            z = zero_complex(ring)
            return EtaObject(ctx, z, ChainMap.zero(ctx.a, z), ChainMap.zero(z, ctx.b))
        return random_eta_object(rng, ctx)

    unary = [identity_functor(ctx), structure_fiber(ctx), constant_functor(ctx, single(ring, 0))]
    if not lean:
        unary.append(tensor_power(ctx, 2))
    choices = [compose_with_coproduct(rng.choice(unary), n)]
    if not lean:
        choices.append(external_tensor(ctx, n))
        choices.append(constant_functor(ctx, single(ring, 0), arity=n))
    g = rng.choice(choices)
    if not lean and rng.random() < 0.25:
        g = sum_functor([g, constant_functor(ctx, single(ring, 0), arity=n)])
    xs = tuple(small_object() for _ in range(n))
    return g, xs


def random_cube(rng, n, ring, max_pieces=2, piece_span=(-1, 2), acyclic_direction=None):
    """Random strictly functorial n-cube.

    Vertices are sums over S of pieces C_S, one summand for each S contained
    in the vertex; the edge adding coordinate i acts on the piece C_S by a
    scalar, so all squares commute on the nose.  Vertices are then conjugated
    by random basis changes.  With `acyclic_direction = i` the pieces with i
    in S are dropped, which makes every direction-i edge an isomorphism.
    """
    from .cubes import CubicalDiagram, popcount
    from .exact import inverse

    pieces = {}
    scalars = {}
    for s in range(1 << n):
        if acyclic_direction is not None and s & (1 << (acyclic_direction - 1)):
            pieces[s] = zero_complex(ring)
        else:
            pieces[s] = random_complex(rng, ring, max_pieces=max_pieces, degree_span=piece_span)
        for i in range(1, n + 1):
            c = random_scalar(rng, ring, -2, 2)
            if ring.kind != "fp" and c == 0:
                c = 1
            if ring.kind == "fp" and c == 0:
                c = 1
            scalars[(s, i)] = c
    sums = {}
    for t in range(1 << n):
        subs = [s for s in range(1 << n) if s & t == s]
        sums[t] = (subs, direct_sum([pieces[s] for s in subs]))
    changes = {
        t: {k: _random_invertible(rng, ring, r) for k, r in sums[t][1].total.ranks.items()}
        for t in range(1 << n)
    }
    vertices = {t: conjugate(sums[t][1].total, changes[t]) for t in range(1 << n)}
    edges = {}
    for t in range(1 << n):
        subs_t, dec_t = sums[t]
        for i in range(1, n + 1):
            bit = 1 << (i - 1)
            if t & bit:
                continue
            u = t | bit
            subs_u, dec_u = sums[u]
            f = ChainMap.zero(dec_t.total, dec_u.total)
            for si, s in enumerate(subs_t):
                ui = subs_u.index(s)
                piece_map = ChainMap.identity(pieces[s]).scale(scalars[(s, i)])
                f = f.add(dec_u.injections[ui].compose(piece_map).compose(dec_t.projections[si]))
            comps = {}
            for k in dec_t.total.degrees():
                if not dec_u.total.rank(k):
                    continue
                m = f.component(k)
                cu = changes[u].get(k)
                ct = changes[t].get(k)
                if cu is not None:
                    m = mat_mul(cu, m)
                if ct is not None:
                    m = mat_mul(m, inverse(ct))
                comps[k] = m
            edges[(t, i)] = ChainMap(vertices[t], vertices[u], comps, check=False)
    return CubicalDiagram(n, vertices, edges, check=False)


def random_chain_map(rng, ring, allow_rings=None) -> ChainMap:
    """Random chain map built from a shared summand plus homotopies.

    X = Z (+) W1 and Y = Z (+) W2 share a core Z; the map is the identity
    on Z (sometimes zero) plus a null-homotopic perturbation, conjugated on
    both sides.
    """
    z = random_complex(rng, ring, max_pieces=2)
    w1 = random_complex(rng, ring, max_pieces=2)
    w2 = random_complex(rng, ring, max_pieces=2)
    sx = direct_sum([z, w1])
    sy = direct_sum([z, w2])
    x, y = sx.total, sy.total
    core = sy.injections[0].compose(sx.projections[0])
    if rng.random() < 0.2:
        core = ChainMap.zero(x, y)
    f = core.add(null_homotopic_map(rng, x, y))
    cx = {k: _random_invertible(rng, ring, r) for k, r in x.ranks.items()}
    cy = {k: _random_invertible(rng, ring, r) for k, r in y.ranks.items()}
    from .exact import inverse

    x2 = conjugate(x, cx)
    y2 = conjugate(y, cy)
    comps = {}
    for k in x.degrees():
        if not y.rank(k):
            continue
        m = f.component(k)
        m = mat_mul(cy.get(k, Matrix.identity(ring, y.rank(k))), m)
        m = mat_mul(m, inverse(cx.get(k, Matrix.identity(ring, x.rank(k)))))
        comps[k] = m
    return ChainMap(x2, y2, comps, check=False)
