"""Bookkeeping for 4-Selmer shapes and the extremal linear program.

A shape (a, b) stands for a group F x S2 with |S2| = 2^{a+b} and the
4-part contributing 4^a 2^b elements in the 4-Selmer count; the three
sizes satisfy 4^a 2^b = (4^a - 2^a) 2^b + 2^{a+b} exactly.  Given the
first two moments E[2^{a+b}] and E[4^a - 2^a] of a distribution on
shapes, the worst-case value of E[2^{a+b} - 2^a] is the value of a small
linear program, solved here in exact rational arithmetic with
certificates (an optimal dual vector, or a Farkas vector when the
moments are inconsistent).
"""

from dataclasses import dataclass
from fractions import Fraction

from .arith import QplError


@dataclass(frozen=True)
class SelmerShape:
    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise QplError("shape exponents must be nonnegative")

    @property
    def size_s4(self):
        return 4 ** self.a * 2 ** self.b

    @property
    def size_s2(self):
        return 2 ** (self.a + self.b)

    @property
    def size_order4(self):
        return (4 ** self.a - 2 ** self.a) * 2 ** self.b

    def check_size_identity(self):
        return self.size_s4 == self.size_order4 + self.size_s2


def pointwise_inequality(a):
    """(lhs, rhs) of 5 * 2^a - 8 <= 4^a - 2^a, the pointwise comparison
    behind the extremal bound; equality holds exactly at a = 1, 2."""
    return 5 * 2 ** a - 8, 4 ** a - 2 ** a


@dataclass
class LPResult:
    status: str                 # "optimal" | "infeasible"
    optimum: Fraction = None
    distribution: dict = None   # {(a, b): probability}
    dual: list = None           # y with A^T y <= c and b^T y = optimum
    farkas: list = None         # y with A^T y <= 0 and b^T y > 0
    x: list = None              # raw primal solution vector

    def to_json_dict(self):
        d = {"status": self.status}
        if self.optimum is not None:
            d["optimum"] = str(self.optimum)
            d["optimum_float"] = float(self.optimum)
        if self.distribution:
            d["distribution"] = {"(%d,%d)" % k: str(v)
                                 for k, v in sorted(self.distribution.items())}
        if self.dual is not None:
            d["dual"] = [str(y) for y in self.dual]
        if self.farkas is not None:
            d["farkas"] = [str(y) for y in self.farkas]
        return d


def _pivot(T, basis, row, col):
    piv = T[row][col]
    T[row] = [v / piv for v in T[row]]
    for i in range(len(T)):
        if i != row and T[i][col] != 0:
            f = T[i][col]
            T[i] = [a - f * b for a, b in zip(T[i], T[row])]
    basis[row] = col


def _run_simplex(T, basis, allowed_cols):
    """Bland's rule on the tableau until no negative reduced cost remains
    among allowed columns.  Bounded by construction for our programs."""
    m = len(T) - 1
    while True:
        enter = None
        for j in allowed_cols:
            if T[m][j] < 0:
                enter = j
                break
        if enter is None:
            return
        leave = None
        best = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][-1] / T[i][enter]
                if best is None or ratio < best or (ratio == best
                                                   and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            raise QplError("linear program is unbounded")
        _pivot(T, basis, leave, enter)


def solve_equality_lp(A, b, c):
    """min c.x subject to A x = b, x >= 0, all data Fractions.

    Two-phase tableau simplex.  Returns an LPResult whose certificates
    are verified before being handed back: the dual satisfies
    A^T y <= c and b^T y = optimum; a Farkas vector satisfies
    A^T y <= 0 and b^T y > 0.
    """
    m, n = len(A), len(c)
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    c = [Fraction(v) for v in c]
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]

    # tableau with artificial columns n..n+m-1
    T = [A[i] + [Fraction(int(i == k)) for k in range(m)] + [b[i]]
         for i in range(m)]
    basis = [n + i for i in range(m)]
    # phase-1 cost row: minimize the sum of artificials
    cost = [Fraction(0)] * (n + m + 1)
    for i in range(m):
        cost = [x - y for x, y in zip(cost, T[i])]
    for i in range(m):
        cost[n + i] = Fraction(0)
    T.append(cost)
    _run_simplex(T, basis, range(n))
    phase1 = -T[m][-1]
    if phase1 > 0:
        y = [Fraction(1) - T[m][n + i] for i in range(m)]
        for j in range(n):
            if sum(A[i][j] * y[i] for i in range(m)) > 0:
                raise QplError("Farkas certificate failed dual feasibility")
        if sum(b[i] * y[i] for i in range(m)) <= 0:
            raise QplError("Farkas certificate has nonpositive value")
        return LPResult("infeasible", farkas=y)

    # pivot artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n and T[i][-1] == 0:
            for j in range(n):
                if T[i][j] != 0:
                    _pivot(T, basis, i, j)
                    break
    if any(bi >= n and T[i][-1] != 0 for i, bi in enumerate(basis)):
        raise QplError("artificial variable stuck at positive level")

    # phase-2 cost row for the real objective
    cost = list(c) + [Fraction(0)] * m + [Fraction(0)]
    for i in range(m):
        if basis[i] < n and c[basis[i]] != 0:
            f = c[basis[i]]
            cost = [x - f * y for x, y in zip(cost, T[i])]
    T[m] = cost
    _run_simplex(T, basis, range(n))

    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i][-1]
    optimum = sum(ci * xi for ci, xi in zip(c, x))
    y = [-T[m][n + i] for i in range(m)]
    for j in range(n):
        if sum(A[i][j] * y[i] for i in range(m)) > c[j]:
            raise QplError("dual vector failed feasibility")
    if sum(b[i] * y[i] for i in range(m)) != optimum:
        raise QplError("strong duality failed")
    return LPResult("optimal", optimum=optimum, dual=y, x=x)


def extremal_bound(target_s2, target_order4, caps=(6, 10)):
    """Minimum of E[2^{a+b} - 2^a] over distributions on shapes with
    a <= caps[0], b <= caps[1] matching E[2^{a+b}] = target_s2 and
    E[4^a - 2^a] = target_order4.
    """
    amax, bmax = caps
    shapes = [(a, bb) for a in range(amax + 1) for bb in range(bmax + 1)]
    A = [
        [Fraction(1) for _ in shapes],
        [Fraction(2 ** (a + bb)) for a, bb in shapes],
        [Fraction(4 ** a - 2 ** a) for a, bb in shapes],
    ]
    b = [Fraction(1), Fraction(target_s2), Fraction(target_order4)]
    c = [Fraction(2 ** (a + bb) - 2 ** a) for a, bb in shapes]
    res = solve_equality_lp(A, b, c)
    if res.status == "optimal":
        res.distribution = {shapes[j]: q for j, q in enumerate(res.x) if q != 0}
    return res
