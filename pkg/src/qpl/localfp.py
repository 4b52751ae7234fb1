"""Local arithmetic at a prime p: points of the quadric intersection over
F_p, Q_p-solubility by breadth-first Hensel refinement, the stabilizer of
a pair inside the group over F_p, and 4-torsion counts of the associated
elliptic curve.

The headline identity tested downstream: for a nondegenerate pair, the
stabilizer order equals #E(F_p)[4] for E: y^2 = x^3 - (I/3)x - (J/27).
"""

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .arith import DegenerateInput, QplError, det_generic, is_prime, valuation
from .quartic import BinaryQuartic, compose_row
from .forms import PairOfQuadrics, invariants, resolvent_quartic

_MINOR_PAIRS = list(combinations(range(4), 2))


def proj_point_array(p):
    """All p^3 + p^2 + p + 1 canonical representatives of P^3(F_p):
    first nonzero coordinate equal to 1, as an (N, 4) int64 array."""
    blocks = []
    for lead in range(4):
        tail = 3 - lead
        if tail:
            grid = np.indices((p,) * tail).reshape(tail, -1).T
        else:
            grid = np.zeros((1, 0), dtype=np.int64)
        block = np.zeros((grid.shape[0], 4), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1:] = grid
        blocks.append(block)
    return np.vstack(blocks)


def _q_vals(U, X, p):
    return ((X @ U) * X).sum(axis=1) % p


def fp_points_on_intersection(pair, p):
    """Points of {Q_A = Q_B = 0} in P^3(F_p) with smoothness flags.

    A point is smooth when the 2x4 Jacobian (rows (2A)x and (2B)x) has
    rank 2, i.e. some 2x2 minor is nonzero mod p.
    """
    if not is_prime(p) or p == 2:
        raise QplError("need an odd prime, got %r" % (p,))
    if not pair.is_integral():
        raise QplError("F_p point scan needs integral coordinates")
    X = proj_point_array(p)
    UA = np.array(pair.upper(0), dtype=np.int64) % p
    UB = np.array(pair.upper(1), dtype=np.int64) % p
    on = (_q_vals(UA, X, p) == 0) & (_q_vals(UB, X, p) == 0)
    Xon = X[on]
    A2 = np.array(pair.gram2(0), dtype=np.int64) % p
    B2 = np.array(pair.gram2(1), dtype=np.int64) % p
    JA = Xon @ A2 % p
    JB = Xon @ B2 % p
    smooth = np.zeros(len(Xon), dtype=bool)
    for k, l in _MINOR_PAIRS:
        smooth |= (JA[:, k] * JB[:, l] - JA[:, l] * JB[:, k]) % p != 0
    return [(tuple(int(v) for v in x), bool(s)) for x, s in zip(Xon, smooth)]


@dataclass(frozen=True)
class SolubilityVerdict:
    status: str              # "soluble" | "insoluble" | "unknown"
    witness: tuple = None    # coordinates mod p^modulus_exponent when soluble
    modulus_exponent: int = 0
    depth: int = 0

    def to_json_dict(self, p):
        d = {"prime": p, "depth": self.depth, "verdict": self.status}
        if self.witness is not None:
            d["witness"] = list(self.witness)
            d["modulus"] = p ** self.modulus_exponent
        return d


def qp_soluble(pair, p, depth=None):
    """Three-valued Q_p-solubility by breadth-first refinement.

    Smooth residue points lift by Hensel; a singular survivor x mod p^k
    is declared soluble when some 2x2 Jacobian minor m satisfies
    2 v_p(m) < k (Newton's condition for the two-equation system); dead
    branches everywhere mean insoluble; surviving singular branches at
    the depth limit mean unknown.
    """
    inv = invariants(pair)
    sd = inv.scaled_disc
    if sd == 0:
        raise DegenerateInput("zero discriminant")
    if depth is None:
        depth = valuation(sd, p) + 2
    A2 = pair.gram2(0)
    B2 = pair.gram2(1)
    UA = pair.upper(0)
    UB = pair.upper(1)

    def qvals(x):
        qa = sum(UA[i][j] * x[i] * x[j] for i in range(4) for j in range(i, 4))
        qb = sum(UB[i][j] * x[i] * x[j] for i in range(4) for j in range(i, 4))
        return qa, qb

    def min_minor_valuation(x):
        ja = [sum(A2[i][j] * x[j] for j in range(4)) for i in range(4)]
        jb = [sum(B2[i][j] * x[j] for j in range(4)) for i in range(4)]
        best = None
        for k, l in _MINOR_PAIRS:
            m = ja[k] * jb[l] - ja[l] * jb[k]
            if m != 0:
                v = valuation(m, p)
                if best is None or v < best:
                    best = v
                if best == 0:
                    break
        return best  # None = all minors vanish exactly

    queue = []
    pk = p
    for x, _ in fp_points_on_intersection(pair, p):
        e = min_minor_valuation(list(x))
        if e is not None and 2 * e < 1:
            return SolubilityVerdict("soluble", x, 1, 1)
        unit = next(i for i, v in enumerate(x) if v == 1)
        queue.append((list(x), unit))
    k = 1
    while queue and k < depth:
        pk1 = pk * p
        nxt = []
        for x, unit in queue:
            free = [i for i in range(4) if i != unit]
            for t in product(range(p), repeat=3):
                y = list(x)
                for i, ti in zip(free, t):
                    y[i] = x[i] + pk * ti
                qa, qb = qvals(y)
                if qa % pk1 or qb % pk1:
                    continue
                e = min_minor_valuation(y)
                if e is not None and 2 * e < k + 1:
                    return SolubilityVerdict("soluble", tuple(y), k + 1, k + 1)
                nxt.append((y, unit))
        queue = nxt
        pk = pk1
        k += 1
    if queue:
        return SolubilityVerdict("unknown", None, 0, depth)
    return SolubilityVerdict("insoluble", None, 0, k)


# ---------------------------------------------------------------------------
# stabilizer over F_p


def gl2_elements(p):
    out = []
    for r, s, t, u in product(range(p), repeat=4):
        if (r * u - s * t) % p:
            out.append((r, s, t, u))
    return out


def _g2_passes_resolvent_filter(f_mod, g2, p):
    """Necessary condition for (g2, *) to stabilize: f(.g2) = det(g2)^2 f."""
    r, s, t, u = g2
    det2 = (r * u - s * t) % p
    lhs = compose_row(f_mod, [[r, s], [t, u]]).reduce_mod(p)
    rhs = f_mod.scale(det2 * det2).reduce_mod(p)
    return lhs == rhs


def stabilizer_order_fp(pair, p, prefilter=True):
    """Order of the stabilizer of the pair in the group over F_p.

    Enumerates g2 in GL_2(F_p) (optionally prefiltered by the resolvent
    covariance, a necessary condition), and for each solves exactly for
    all g4 by row-by-row backtracking against precomputed quadric value
    tables; the raw pair count is divided by the (p-1) central scalings.
    With prefilter=False this is an exhaustive scan of the whole group,
    kept as a slow oracle.
    """
    if p < 3 or not is_prime(p):
        raise QplError("need a prime p >= 3")
    if not pair.is_integral():
        raise QplError("stabilizer count needs integral coordinates")
    inv = invariants(pair)
    if inv.disc % p == 0:     # disc, not 27*disc: 3 | scaled_disc always
        raise DegenerateInput("discriminant vanishes mod %d" % p)
    A2 = np.array(pair.gram2(0), dtype=np.int64) % p
    B2 = np.array(pair.gram2(1), dtype=np.int64) % p
    f_mod = resolvent_quartic(pair).reduce_mod(p)
    V = np.indices((p,) * 4).reshape(4, -1).T.astype(np.int64)  # all of F_p^4
    raw = 0
    for g2 in gl2_elements(p):
        if prefilter and not _g2_passes_resolvent_filter(f_mod, g2, p):
            continue
        raw += _count_g4_solutions(g2, A2, B2, V, p)
    if raw % (p - 1):
        raise QplError("raw stabilizer count %d not divisible by p-1" % raw)
    return raw // (p - 1)


def _count_g4_solutions(g2, A2, B2, V, p):
    """Number of g4 with g4 C g4^T = 2A, g4 D g4^T = 2B and det condition,
    where (C, D) is the g2-combination of (2A, 2B)."""
    r, s, t, u = g2
    det2 = (r * u - s * t) % p
    C = (r * A2 + s * B2) % p
    D = (t * A2 + u * B2) % p
    VC = V @ C % p          # row i = V[i] C  (C symmetric)
    VD = V @ D % p
    QC = (VC * V).sum(axis=1) % p
    QD = (VD * V).sum(axis=1) % p
    w1_idx = np.nonzero((QC == A2[0, 0]) & (QD == B2[0, 0]))[0]
    if len(w1_idx) == 0:
        return 0
    L1C = V @ VC[w1_idx].T % p   # (p^4, k): column j = values . C w1_j
    L1D = V @ VD[w1_idx].T % p
    count = 0
    for j, i1 in enumerate(w1_idx):
        m2 = ((L1C[:, j] == A2[1, 0]) & (L1D[:, j] == B2[1, 0])
              & (QC == A2[1, 1]) & (QD == B2[1, 1]))
        for i2 in np.nonzero(m2)[0]:
            l2c = V @ VC[i2] % p
            l2d = V @ VD[i2] % p
            m3 = ((L1C[:, j] == A2[2, 0]) & (L1D[:, j] == B2[2, 0])
                  & (l2c == A2[2, 1]) & (l2d == B2[2, 1])
                  & (QC == A2[2, 2]) & (QD == B2[2, 2]))
            for i3 in np.nonzero(m3)[0]:
                l3c = V @ VC[i3] % p
                l3d = V @ VD[i3] % p
                m4 = ((L1C[:, j] == A2[3, 0]) & (L1D[:, j] == B2[3, 0])
                      & (l2c == A2[3, 1]) & (l2d == B2[3, 1])
                      & (l3c == A2[3, 2]) & (l3d == B2[3, 2])
                      & (QC == A2[3, 3]) & (QD == B2[3, 3]))
                for i4 in np.nonzero(m4)[0]:
                    g4 = [list(map(int, V[i])) for i in (i1, i2, i3, i4)]
                    d4 = det_generic(g4) % p
                    if d4 and (det2 * d4) % p == 1:
                        count += 1
    return count


# ---------------------------------------------------------------------------
# elliptic curves over F_p and 4-torsion


@dataclass(frozen=True)
class FpCurve:
    """y^2 = x^3 + a x + b over F_p, p > 3, nondegenerate."""
    p: int
    a: int
    b: int

    def __post_init__(self):
        if self.p <= 3 or not is_prime(self.p):
            raise QplError("FpCurve needs a prime p > 3")
        if (4 * self.a ** 3 + 27 * self.b ** 2) % self.p == 0:
            raise DegenerateInput("curve discriminant vanishes mod %d" % self.p)


def curve_from_invariants(I, J, p):
    """E: y^2 = x^3 - (I/3) x - (J/27) reduced mod p (p > 3)."""
    a = (-I * pow(3, -1, p)) % p
    b = (-J * pow(27, -1, p)) % p
    return FpCurve(p, a, b)


def curve_points(E):
    """All points, with None as the point at infinity."""
    pts = [None]
    sqrts = {}
    for y in range(E.p):
        sqrts.setdefault(y * y % E.p, []).append(y)
    for x in range(E.p):
        rhs = (x * x * x + E.a * x + E.b) % E.p
        for y in sqrts.get(rhs, []):
            pts.append((x, y))
    return pts

def ec_add(P, Q, E):
    p = E.p
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2 and (y1 + y2) % p == 0:
        return None
    if P == Q:
        lam = (3 * x1 * x1 + E.a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    y3 = (lam * (x1 - x3) - y1) % p
    return (x3, y3)


def ec_mul(k, P, E):
    R = None
    Q = P
    while k:
        if k & 1:
            R = ec_add(R, Q, E)
        Q = ec_add(Q, Q, E)
        k >>= 1
    return R


def curve_four_torsion(E):
    """#E(F_p)[4], by enumerating all points and doubling twice."""
    n = 0
    for P in curve_points(E):
        T2 = ec_add(P, P, E)
        if ec_add(T2, T2, E) is None:
            n += 1
    return n


_FOUR_TORSION_BY_ORDER = {1: 1, 2: 2, 3: 1, 4: 4, 5: 1, 6: 2, 7: 1}


def four_torsion_from_group_order(n):
    """#E[4]-rational from #E(F_p) when #E(F_p) <= 7.

    Orders up to 7 determine the group up to the ambiguity Z/4 vs
    (Z/2)^2 at n = 4, and both have all four elements killed by 4.
    """
    if n not in _FOUR_TORSION_BY_ORDER:
        raise QplError("group order %d does not determine 4-torsion without more data" % n)
    return _FOUR_TORSION_BY_ORDER[n]


def jacobian_four_torsion_small_p(pair, p):
    """#E(F_p)[4] for the Jacobian of the pair's quadric intersection,
    derived from the point count of the intersection itself (the curve is
    a torsor of its Jacobian, so over a finite field the counts agree).
    Only valid where Hasse forces the order to be <= 7, i.e. p = 3."""
    pts = fp_points_on_intersection(pair, p)
    if not all(s for _, s in pts):
        raise DegenerateInput("intersection is singular mod %d" % p)
    n = len(pts)
    if abs(n - (p + 1)) > 2 * p ** 0.5:
        raise QplError("point count %d violates the Hasse window at %d" % (n, p))
    return four_torsion_from_group_order(n)
