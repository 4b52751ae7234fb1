"""Squarefree-sieve machinery at a prime p > 3.

W_p is the locus of integral pairs whose resolvent discriminant is
divisible by p^2.  It splits into W_p^(1) (all partial derivatives of the
discriminant vanish mod p as well -- the "deep" stratum) and the
complement W_p^(2), where p^2 | disc happens for a mod-p geometric
reason: the resolvent acquires a rational double root mod p.  Pairs in
W_p^(2) can be moved by an integral group element into a shape where the
non-integral element gamma_p = ([[1,0],[0,p]], diag(1/p,1,1,1)) acts
integrally, strictly reducing coordinates while preserving (I, J).
"""

from dataclasses import dataclass
from fractions import Fraction
import random

from .arith import (PreconditionError, QplError, ext_gcd, is_prime,
                    kernel_mod_p, complete_unimodular, mat_identity)
from .forms import (COORD_NAMES, GroupElement, PairOfQuadrics, act,
                    invariants, resolvent_quartic)
from .quartic import repeated_factor_mod_p


def _scaled_disc(pair):
    return invariants(pair).scaled_disc


def _check_prime(p):
    if p <= 3 or not is_prime(p):
        raise PreconditionError("sieve routines need a prime p > 3, got %r" % (p,))


def in_Wp(pair, p):
    """p^2 divides the resolvent discriminant (p > 3, so the factor 27
    in 4I^3 - J^2 = 27 disc does not interfere)."""
    _check_prime(p)
    sd = _scaled_disc(pair)
    if sd == 0:
        return True
    return sd % (p * p) == 0


def in_Wp1(pair, p):
    """Membership in the deep stratum W_p^(1): p^2 | disc and every
    partial derivative of disc vanishes mod p.

    Derivatives are exact finite differences: disc is a polynomial with
    integer coefficients, so (disc(v + p e_t) - disc(v)) / p is an
    integer congruent to the t-th partial mod p.

    Returns (bool, witness); when the answer is False the witness names
    what failed: {"reason": "valuation"} or {"reason": "derivative",
    "direction": coordinate_name}.
    """
    _check_prime(p)
    if not in_Wp(pair, p):
        return False, {"reason": "valuation", "direction": None}
    d0 = _scaled_disc(pair)
    coords = list(pair.coords)
    for t, name in enumerate(COORD_NAMES):
        bumped = list(coords)
        bumped[t] += p
        d1 = _scaled_disc(PairOfQuadrics(bumped))
        step = d1 - d0
        if step % p:
            raise QplError("finite difference not divisible by p")  # impossible
        if (step // p) % p:
            return False, {"reason": "derivative", "direction": name}
    return True, None


def in_Wp2(pair, p):
    if not in_Wp(pair, p):
        return False
    deep, _ = in_Wp1(pair, p)
    return not deep


def _satisfies_normal_conditions(pair, p):
    a11, a12, a13, a14 = pair.coords[0], pair.coords[1], pair.coords[2], pair.coords[3]
    b11 = pair.coords[10]
    return (a11 % (p * p) == 0 and a12 % p == 0 and a13 % p == 0
            and a14 % p == 0 and b11 % p == 0)


def normalize_Wp2(pair, p):
    """An integral group element Gamma with act(Gamma, pair) satisfying
    (1) p | a12, a13, a14, b11 and (2) p^2 | a11, i.e. the shape on which
    gamma_p acts integrally.  Returns (Gamma, transformed_pair).

    The double root of the resolvent mod p is moved to [1:0] by an
    SL_2(Z) change of the pencil basis; then the kernel of the leading
    form mod p (one-dimensional in W_p^(2)) is moved to the first basis
    vector by an SL_4(Z) change of the ambient basis.  For honest
    W_p^(2) input the remaining congruences hold automatically.
    """
    _check_prime(p)
    if _scaled_disc(pair) == 0:
        raise PreconditionError("degenerate pair (zero discriminant)")
    if not in_Wp(pair, p):
        raise PreconditionError("pair is not in W_p at %d" % p)
    if in_Wp1(pair, p)[0]:
        raise PreconditionError("pair lies in the deep stratum W_p^(1) at %d" % p)
    if _satisfies_normal_conditions(pair, p):
        return GroupElement.identity(), pair

    f = resolvent_quartic(pair)
    rep = repeated_factor_mod_p(f, p)
    if rep is None:
        raise QplError("no repeated factor mod %d despite p^2 | disc" % p)
    kind, data = rep
    if kind == "quadratic":
        raise QplError("repeated factor mod %d is an irreducible quadratic; "
                       "no rational double root to normalize" % p)
    (r, s), _mult = data[0]

    g, x, y = ext_gcd(r, s)
    if g != 1:
        raise QplError("double root lift (%d, %d) is not primitive" % (r, s))
    g2 = [[r, s], [-y, x]]          # det = rx + sy = 1
    step1 = act(GroupElement(g2, mat_identity(4)), pair)
    A2 = step1.gram2(0)
    basis = kernel_mod_p([[v % p for v in row] for row in A2], p)
    if len(basis) != 1:
        raise QplError("leading form has kernel of dimension %d mod %d, expected 1"
                       % (len(basis), p))
    g4 = complete_unimodular(basis[0])
    gamma = GroupElement(g2, g4)
    out = act(gamma, pair)
    if not _satisfies_normal_conditions(out, p):
        raise QplError("normalization postconditions failed at %d" % p)
    return gamma, out


def gamma_p(p):
    """The non-integral element ([[1,0],[0,p]], diag(1/p,1,1,1)); its
    determinant product is p * (1/p) = 1."""
    g4 = [[Fraction(1, p), 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    return GroupElement([[1, 0], [0, p]], g4)


def apply_gamma_p(pair, p):
    """act(gamma_p, pair), collapsed back to integer coordinates.

    Integral exactly on the normalized shape: the coordinate effect is
    a11 -> a11/p^2, a1j -> a1j/p, b11 -> b11/p, b1j -> b1j,
    b_ij -> p b_ij (i, j >= 2), with the a_ij (i, j >= 2) unchanged.
    """
    out = act(gamma_p(p), pair)
    if not out.is_integral():
        raise QplError("gamma_p image is not integral; normalize first")
    return out.normalized_integral()


def random_wp2_instance(p, rng=None, coeff_bound=9):
    """A random integral pair in normalized W_p^(2) position.

    Draw a11 = p^2 k, a12, a13, a14, b11 divisible by p and the other 15
    coordinates freely; expanding det(Ax + By) along the first row and
    column shows every monomial of the resolvent then carries enough
    powers of p to force p^2 | disc, so membership in W_p is automatic
    and only the deep stratum needs to be rejected.
    """
    _check_prime(p)
    if rng is None:
        rng = random.Random()
    while True:
        draw = [rng.randint(-coeff_bound, coeff_bound) for _ in range(20)]
        draw[0] = p * p * rng.randint(-2, 2)
        for j in (1, 2, 3, 10):
            draw[j] = p * rng.randint(-coeff_bound, coeff_bound)
        pair = PairOfQuadrics(draw)
        if _scaled_disc(pair) == 0:
            continue
        if not in_Wp(pair, p):
            raise QplError("constructed instance escaped W_p")  # impossible
        deep, _ = in_Wp1(pair, p)
        if deep:
            continue
        return pair


def random_integral_group_element(rng, size=2):
    """A random element of the integral group, as a short product of
    elementary matrices so the entries stay small."""
    def elem(n):
        M = [list(row) for row in mat_identity(n)]
        i = rng.randrange(n)
        j = rng.randrange(n)
        while j == i:
            j = rng.randrange(n)
        M[i][j] = rng.choice((-2, -1, 1, 2))
        return M

    from .arith import mat_mul
    g2 = mat_identity(2)
    g4 = mat_identity(4)
    for _ in range(size):
        g2 = mat_mul(g2, elem(2))
        g4 = mat_mul(g4, elem(4))
    return GroupElement(g2, g4)


def verify_gamma_descent(pair, p):
    """Full pipeline check on one W_p^(2) pair: normalize, apply gamma_p,
    confirm the image is integral, stays in W_p^(1) at p, and has the
    same (I, J).  Returns the descended pair."""
    _, normalized = normalize_Wp2(pair, p)
    before = invariants(pair)
    descended = apply_gamma_p(normalized, p)
    after = invariants(descended)
    if (before.I, before.J) != (after.I, after.J):
        raise QplError("gamma_p changed the invariants")
    deep, _ = in_Wp1(descended, p)
    if not deep:
        raise QplError("gamma_p image escaped W_p^(1)")
    return descended


@dataclass
class SievePrimeData:
    p: int
    samples: int
    count_Wp: int
    count_Wp1: int
    count_Wp2: int
    gamma_verified: int

    def csv_row(self):
        return [self.p, self.samples, self.count_Wp, self.count_Wp1,
                self.count_Wp2, self.gamma_verified]

    CSV_HEADER = ["p", "samples", "count_Wp", "count_Wp1", "count_Wp2",
                  "gamma_verified"]


def sieve_scan(primes, samples, coeff_bound, seed):
    """Monte-Carlo stratum counts over random integral pairs, plus a
    descent verification for every W_p^(2) hit."""
    rows = []
    for p in primes:
        rng = random.Random("%d:%d" % (seed, p))
        n_wp = n_wp1 = n_wp2 = n_ok = 0
        for _ in range(samples):
            pair = PairOfQuadrics([rng.randint(-coeff_bound, coeff_bound)
                                   for _ in range(20)])
            if _scaled_disc(pair) == 0:
                continue
            if not in_Wp(pair, p):
                continue
            n_wp += 1
            deep, _ = in_Wp1(pair, p)
            if deep:
                n_wp1 += 1
            else:
                n_wp2 += 1
                try:
                    verify_gamma_descent(pair, p)
                    n_ok += 1
                except QplError:
                    pass
        rows.append(SievePrimeData(p, samples, n_wp, n_wp1, n_wp2, n_ok))
    return rows
