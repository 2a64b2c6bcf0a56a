"""Structural cache keys for memoizing pure constructions.

Keys capture the full exact content of a value (ranks plus every matrix
entry), so two inputs share a cache slot exactly when the constructions
applied to them are guaranteed to produce equal outputs.
"""

from __future__ import annotations


def complex_key(c):
    return (
        tuple(sorted(c.ranks.items())),
        tuple((k, tuple(m.data)) for k, m in sorted(c.diffs.items())),
    )


def chain_map_key(f):
    return (
        complex_key(f.source),
        complex_key(f.target),
        tuple((k, tuple(m.data)) for k, m in sorted(f.comps.items())),
    )


def context_key(ctx):
    return (
        ctx.ring.name,
        complex_key(ctx.a),
        complex_key(ctx.b),
        tuple((k, tuple(m.data)) for k, m in sorted(ctx.eta.comps.items())),
    )


def object_key(x):
    return (
        context_key(x.ctx),
        complex_key(x.x),
        tuple((k, tuple(m.data)) for k, m in sorted(x.unit.comps.items())),
        tuple((k, tuple(m.data)) for k, m in sorted(x.aug.comps.items())),
    )


def morphism_key(f):
    return (
        object_key(f.source),
        object_key(f.target),
        tuple((k, tuple(m.data)) for k, m in sorted(f.f.comps.items())),
    )
