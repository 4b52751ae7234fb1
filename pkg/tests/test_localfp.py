"""Local computations at finite primes: projective point scans, p-adic
solubility verdicts, F_p stabilizer orders, and 4-torsion of the
associated elliptic curves."""

import random
from itertools import product

import pytest

from qpl import PairOfQuadrics, invariants
from qpl.arith import DegenerateInput, QplError
from qpl.localfp import (FpCurve, curve_four_torsion, curve_from_invariants,
                         curve_points, ec_add, ec_mul,
                         four_torsion_from_group_order,
                         fp_points_on_intersection,
                         jacobian_four_torsion_small_p, proj_point_array,
                         qp_soluble, stabilizer_order_fp)

from conftest import random_pair


DIAG = PairOfQuadrics.from_named(a11=1, a22=1, a33=1, a44=1,
                                 b11=1, b22=2, b33=3, b44=4)
# a_ii = 1 with b12 = b34 = 2 and b23 = 2s where s^2 = -2 mod p; the
# resolvent is then congruent to 16(x^4 + y^4) mod p
SYM3 = PairOfQuadrics.from_named(a11=1, a22=1, a33=1, a44=1,
                                 b12=2, b23=2, b34=2)
SYM11 = PairOfQuadrics.from_named(a11=1, a22=1, a33=1, a44=1,
                                  b12=2, b23=6, b34=2)


# -- projective point scan --------------------------------------------------


@pytest.mark.parametrize("p", [3, 5, 7])
def test_proj_point_array_is_canonical(p):
    X = proj_point_array(p)
    assert len(X) == p ** 3 + p ** 2 + p + 1
    seen = set()
    for row in X:
        row = tuple(int(v) for v in row)
        lead = next(v for v in row if v)
        assert lead == 1
        assert row not in seen
        seen.add(row)


def _points_oracle(pair, p):
    """Set of common zeros, by direct evaluation at canonical reps."""
    out = set()
    for x in [r for r in product(range(p), repeat=4)]:
        nz = [v for v in x if v % p]
        if not nz or nz[0] != 1:
            continue
        qa, qb = pair.q_values(x)
        if qa % p == 0 and qb % p == 0:
            out.add(x)
    return out


def _smooth_oracle(pair, x, p):
    """Singular iff some nonzero (lam, mu) kills both gradients."""
    ga = [sum(pair.gram2(0)[i][j] * x[j] for j in range(4)) % p for i in range(4)]
    gb = [sum(pair.gram2(1)[i][j] * x[j] for j in range(4)) % p for i in range(4)]
    for lam, mu in [(1, m) for m in range(p)] + [(0, 1)]:
        if all((lam * a + mu * b) % p == 0 for a, b in zip(ga, gb)):
            return False
    return True


@pytest.mark.parametrize("p", [3, 5])
def test_point_scan_against_oracle(p):
    rng = random.Random(p)
    for _ in range(20):
        pair = random_pair(rng)
        got = fp_points_on_intersection(pair, p)
        assert {x for x, _ in got} == _points_oracle(pair, p)
        for x, smooth in got:
            assert smooth == _smooth_oracle(pair, list(x), p)


def test_point_scan_fixture():
    assert fp_points_on_intersection(SYM3, 3) == [
        ((1, 1, 2, 0), True), ((1, 2, 2, 0), True),
        ((0, 1, 1, 2), True), ((0, 1, 2, 2), True)]


def test_point_scan_rejects_bad_input():
    with pytest.raises(QplError):
        fp_points_on_intersection(DIAG, 4)
    with pytest.raises(QplError):
        fp_points_on_intersection(DIAG, 2)
    half = PairOfQuadrics.from_string("1/2 " + "0 " * 18 + "1")
    with pytest.raises(QplError):
        fp_points_on_intersection(half, 3)


# -- p-adic solubility ------------------------------------------------------


def test_soluble_with_smooth_point():
    v = qp_soluble(DIAG, 5)
    assert v.status == "soluble"
    assert v.witness == (1, 2, 2, 1)
    qa, qb = DIAG.q_values(v.witness)
    assert qa % 5 == 0 and qb % 5 == 0


def test_insoluble_no_residue_points():
    pair = PairOfQuadrics.from_string("-1 2 2 0 -1 -1 0 -2 2 -2 2 -1 0 0 0 0 0 1 1 2")
    v = qp_soluble(pair, 3)
    assert v.status == "insoluble"
    assert fp_points_on_intersection(pair, 3) == []


def test_unknown_at_shallow_depth_then_resolved():
    scaled = DIAG.scale(3)
    assert qp_soluble(scaled, 3, depth=2).status == "unknown"
    v = qp_soluble(scaled, 5)
    assert v.status == "soluble" and v.witness == (1, 2, 2, 1)


def test_soluble_witness_modulus():
    rng = random.Random(7)
    for _ in range(25):
        pair = random_pair(rng)
        if invariants(pair).scaled_disc == 0:
            continue
        v = qp_soluble(pair, 5)
        if v.status == "soluble":
            qa, qb = pair.q_values(v.witness)
            m = 5 ** v.modulus_exponent
            assert qa % m == 0 and qb % m == 0
            assert any(x % 5 for x in v.witness)


def test_verdict_json():
    v = qp_soluble(DIAG, 5)
    d = v.to_json_dict(5)
    assert d["verdict"] == "soluble" and d["modulus"] == 5
    assert d["witness"] == [1, 2, 2, 1]


def test_degenerate_disc_raises():
    with pytest.raises(DegenerateInput):
        qp_soluble(PairOfQuadrics([0] * 20), 5)


# -- stabilizer over F_p ----------------------------------------------------


def test_stabilizer_diag_5():
    assert stabilizer_order_fp(DIAG, 5) == 8


def test_stabilizer_prefilter_matches_exhaustive():
    assert stabilizer_order_fp(DIAG, 5, prefilter=False) == 8
    assert stabilizer_order_fp(SYM3, 3, prefilter=False) == \
        stabilizer_order_fp(SYM3, 3) == 4


def test_stabilizer_degenerate_raises():
    # the diagonal pair's resolvent roots collide mod 3
    assert invariants(DIAG).disc % 3 == 0
    with pytest.raises(DegenerateInput):
        stabilizer_order_fp(DIAG, 3)


def test_stabilizer_rejects_bad_p():
    with pytest.raises(QplError):
        stabilizer_order_fp(DIAG, 4)


# -- elliptic curves and 4-torsion ------------------------------------------


def test_curve_validation():
    with pytest.raises(DegenerateInput):
        FpCurve(5, 0, 0)
    with pytest.raises(QplError):
        FpCurve(3, 1, 1)
    with pytest.raises(QplError):
        FpCurve(9, 1, 1)


def test_curve_point_count_fixture():
    E = FpCurve(5, 1, 1)
    assert len(curve_points(E)) == 9
    assert curve_four_torsion(E) == 1  # odd group order


def test_hasse_window():
    rng = random.Random(8)
    for p in (7, 11):
        for _ in range(10):
            a, b = rng.randrange(p), rng.randrange(p)
            if (4 * a ** 3 + 27 * b ** 2) % p == 0:
                continue
            n = len(curve_points(FpCurve(p, a, b)))
            assert abs(n - (p + 1)) <= 2 * p ** 0.5


def test_group_law():
    E = FpCurve(5, 1, 1)
    pts = curve_points(E)
    n = len(pts)
    for P in pts:
        assert ec_mul(n, P, E) is None       # Lagrange
        for Q in pts:
            assert ec_add(P, Q, E) == ec_add(Q, P, E)
    P, Q, R = pts[1], pts[3], pts[5]
    assert ec_add(ec_add(P, Q, E), R, E) == ec_add(P, ec_add(Q, R, E), E)


def test_four_torsion_table():
    assert [four_torsion_from_group_order(n) for n in range(1, 8)] == \
        [1, 2, 1, 4, 1, 2, 1]
    with pytest.raises(QplError):
        four_torsion_from_group_order(8)


def test_curve_from_invariants_fixture():
    inv = invariants(DIAG)
    E = curve_from_invariants(inv.I, inv.J, 5)
    assert (E.a, E.b) == (4, 0)
    assert curve_four_torsion(E) == 8


# -- the stabilizer / 4-torsion identity on witnesses -----------------------


def test_identity_diag_at_5():
    inv = invariants(DIAG)
    E = curve_from_invariants(inv.I, inv.J, 5)
    assert stabilizer_order_fp(DIAG, 5) == curve_four_torsion(E) == 8


def test_identity_symmetric_pair_at_3():
    # p = 3 goes through the intersection point count (char 3 breaks -I/3)
    assert jacobian_four_torsion_small_p(SYM3, 3) == 4
    assert stabilizer_order_fp(SYM3, 3) == 4


def test_char3_stabilizer_can_exceed_four_torsion():
    # In characteristic 3 the stabilizer/4-torsion identity genuinely
    # fails on a positive-density locus: when I = 0 mod 3 and the
    # resolvent keeps a rational root, unipotent pencil shears
    # g2 = [[1, k], [0, 1]] can stabilize, contributing a factor of 3
    # that no 4-torsion group contains.  (The identity is a theorem only
    # away from characteristics 2 and 3.)  Frozen verified example:
    pair = PairOfQuadrics.from_string(
        "2 5 0 -3 5 4 -5 -2 -3 4 0 5 -4 5 -3 -4 3 3 4 -2")
    assert invariants(pair).disc % 3 != 0          # nondegenerate mod 3
    assert invariants(pair).I % 3 == 0
    assert stabilizer_order_fp(pair, 3, prefilter=False) == 3
    assert jacobian_four_torsion_small_p(pair, 3) == 1


def test_symmetric_pair_at_11_curve():
    from qpl.forms import resolvent_quartic
    from qpl.quartic import BinaryQuartic
    assert resolvent_quartic(SYM11).reduce_mod(11) == BinaryQuartic(5, 0, 0, 0, 5)
    inv = invariants(SYM11)
    E = curve_from_invariants(inv.I, inv.J, 11)
    assert (E.a, E.b) == (10, 0)             # y^2 = x^3 - x
    assert curve_four_torsion(E) == 4


def test_jacobian_small_p_rejects_singular():
    # everything vanishes mod 3: every point lies on the intersection and
    # every gradient is zero, so the very first point is singular
    with pytest.raises(DegenerateInput):
        jacobian_four_torsion_small_p(DIAG.scale(3), 3)


def test_jacobian_small_p_rejects_hasse_violation():
    # disc(DIAG) = 0 mod 3 but the singular points are not F_3-rational:
    # the scan sees 8 smooth points, impossible for a genus-one curve at 3
    assert all(s for _, s in fp_points_on_intersection(DIAG, 3))
    with pytest.raises(QplError):
        jacobian_four_torsion_small_p(DIAG, 3)
