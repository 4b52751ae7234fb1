import random

from qpl import GroupElement, PairOfQuadrics
from qpl.arith import det_generic, mat_identity, mat_mul


def random_pair(rng, bound=5):
    return PairOfQuadrics([rng.randint(-bound, bound) for _ in range(20)])


def random_nondegenerate_pair(rng, bound=5):
    from qpl import invariants
    while True:
        pair = random_pair(rng, bound)
        if invariants(pair).scaled_disc != 0:
            return pair


def random_sl2pm(rng, bound=5):
    """2x2 integer matrix with determinant +-1, by rejection."""
    while True:
        m = [[rng.randint(-bound, bound) for _ in range(2)] for _ in range(2)]
        if abs(m[0][0] * m[1][1] - m[0][1] * m[1][0]) == 1:
            return m


def random_unimodular4(rng, steps=4, entry_bound=None):
    """Product of elementary shears (det 1 each)."""
    while True:
        M = mat_identity(4)
        for _ in range(steps):
            i, j = rng.sample(range(4), 2)
            E = mat_identity(4)
            E[i][j] = rng.choice((-2, -1, 1, 2))
            M = mat_mul(M, E)
        if entry_bound is None or max(abs(v) for row in M for v in row) <= entry_bound:
            return M


def random_group_element(rng, bound=5, g4_steps=4, entry_bound=None):
    """Random element with integer entries and det(g2) det(g4) = 1."""
    g2 = random_sl2pm(rng, bound)
    g4 = random_unimodular4(rng, g4_steps, entry_bound)
    if det_generic(g2) == -1:
        g4 = [[-v for v in g4[0]]] + [list(r) for r in g4[1:]]
    return GroupElement(g2, g4)
