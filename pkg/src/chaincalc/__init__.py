"""chaincalc: exact cross effects, cotriples, and Taylor towers in chain complexes.

Everything is computed with exact arithmetic (rationals, prime fields,
integers); every homotopy-theoretic construction is realized by an explicit
chain-level model whose defining identities hold on the nose and are checked
by the test and verification suites.
"""

from .exact import GF, QQ, ZZ, Matrix, Ring, parse_ring

__all__ = ["GF", "QQ", "ZZ", "Matrix", "Ring", "parse_ring"]
