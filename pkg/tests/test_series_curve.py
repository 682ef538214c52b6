from fractions import Fraction

import pytest

from normtower.curve import (
    CurveParams,
    MPoly,
    assert_supersingular,
    composition_work_precision,
    curve_from_preset,
    formal_exp,
    formal_group_law,
    formal_log,
    multiplication_by_p_series,
    w_expansion,
)
from normtower.series import TruncSeries
from normtower.unramified import build_unramified


SS3 = curve_from_preset("ss3", 3)
SS23 = curve_from_preset("ss23", 5)


def test_point_counts_and_ap_gate():
    assert SS3.count_points() == 4 and SS3.ap() == 0
    assert SS23.count_points() == 6 and SS23.ap() == 0
    assert_supersingular(SS3)
    assert_supersingular(SS23)


def test_bad_reduction_rejected():
    with pytest.raises(ValueError):
        CurveParams(p=3, a4=3)  # y^2 = x^3 + 3x: discriminant -1728 = 0 mod 3
    with pytest.raises(ValueError):
        assert_supersingular(CurveParams(p=5, a4=-1))  # ordinary at 5: a_5 != 0


def test_w_expansion_solves_weierstrass():
    D = 15
    for curve in (SS3, SS23, CurveParams(p=5, a1=1, a2=1, a3=1, a4=0, a6=1)):
        w = list(w_expansion(curve, D))
        # w = t^3 + a1 t w + a2 t^2 w + a3 w^2 + a4 t w^2 + a6 w^3 through deg D
        def mul(a, b):
            out = [0] * (D + 1)
            for i, x in enumerate(a):
                for j, y in enumerate(b):
                    if x and y and i + j <= D:
                        out[i + j] += x * y
            return out

        w2, w3 = mul(w, w), mul(mul(w, w), w)
        rhs = [0] * (D + 1)
        rhs[3] = 1
        for k in range(D + 1):
            if k + 1 <= D:
                rhs[k + 1] += curve.a1 * w[k] + curve.a4 * w2[k]
            if k + 2 <= D:
                rhs[k + 2] += curve.a2 * w[k]
            rhs[k] += curve.a3 * w2[k] + curve.a6 * w3[k]
        assert rhs == w


def test_formal_group_law_axioms():
    F = formal_group_law(SS3, 8)
    for i in range(9):
        assert F.coeff((i, 0)) == (1 if i == 1 else 0)  # F(X, 0) = X
        assert F.coeff((0, i)) == (1 if i == 1 else 0)
    for i in range(9):
        for j in range(9 - i):
            assert F.coeff((i, j)) == F.coeff((j, i))  # commutative


def test_formal_group_law_associative():
    D = 6
    F = formal_group_law(SS3, D)
    X, Y, Z = (MPoly.var(3, D, i) for i in range(3))
    lhs = F.evaluate([F.evaluate([X, Y]), Z])
    rhs = F.evaluate([X, F.evaluate([Y, Z])])
    assert lhs == rhs


def _fraction_series_law(curve, D):
    """Independent group-law oracle: exp(log X + log Y) over exact rationals."""
    w = w_expansion(curve, D + 3)
    u = list(w[3: D + 4])
    U = [Fraction(0)] * (D + 1)
    U[0] = Fraction(1)
    for j in range(1, D + 1):
        U[j] = -sum(Fraction(u[i]) * U[j - i] for i in range(1, j + 1))
    Up = [Fraction(j + 1) * U[j + 1] for j in range(D)] + [Fraction(0)]
    num = [-2 * U[j] + (Up[j - 1] if j >= 1 else 0) for j in range(D + 1)]
    den = [-2 * U[j] + curve.a1 * (U[j - 1] if j >= 1 else 0)
           + (curve.a3 if j == 3 else 0) for j in range(D + 1)]
    dinv = [Fraction(0)] * (D + 1)
    dinv[0] = 1 / Fraction(den[0])
    for j in range(1, D + 1):
        dinv[j] = -dinv[0] * sum(den[i] * dinv[j - i] for i in range(1, j + 1))
    P = [sum(num[i] * dinv[j - i] for i in range(j + 1)) for j in range(D + 1)]
    log = [Fraction(0)] * (D + 1)
    for m in range(D):
        log[m + 1] = P[m] / (m + 1)
    exp = [Fraction(0)] * (D + 1)
    exp[1] = Fraction(1)
    for m in range(2, D + 1):
        # [X^m] log(exp(X)) must vanish
        comp = Fraction(0)
        for j in range(1, m + 1):
            # coefficient of X^m in (exp)^j
            powj = [Fraction(0)] * (m + 1)
            powj[0] = Fraction(1)
            for _ in range(j):
                nxt = [Fraction(0)] * (m + 1)
                for a in range(m + 1):
                    if powj[a]:
                        for b in range(1, m + 1 - a):
                            nxt[a + b] += powj[a] * exp[b]
                powj = nxt
            comp += log[j] * powj[m]
        exp[m] = -comp
    # bivariate compose: exp(log X + log Y) through total degree D
    law = {}
    S = {}
    for i in range(D + 1):
        if log[i]:
            S[(i, 0)] = S.get((i, 0), 0) + log[i]
            S[(0, i)] = S.get((0, i), 0) + log[i]
    powj = {(0, 0): Fraction(1)}
    for j in range(1, D + 1):
        nxt = {}
        for (a, b), v in powj.items():
            for (c, e), w2 in S.items():
                if a + c + b + e <= D:
                    nxt[(a + c, b + e)] = nxt.get((a + c, b + e), 0) + v * w2
        powj = nxt
        for k, v in powj.items():
            law[k] = law.get(k, 0) + exp[j] * v
    return law


@pytest.mark.parametrize("curve", [SS3, SS23])
def test_group_law_matches_rational_oracle(curve):
    D = 5
    F = formal_group_law(curve, D)
    oracle = _fraction_series_law(curve, D)
    for k, v in oracle.items():
        assert v.denominator == 1
        assert F.coeff(k) == v.numerator, (k, F.coeff(k), v)
    for k, v in F.c.items():
        if sum(k) <= D and all(e > 0 for e in k):
            assert oracle.get(k, 0) == v


def test_exp_log_identity_degree30():
    prec = composition_work_precision(3, 30, 4)
    fd = build_unramified(3, 1, prec)
    lg = formal_log(SS3, fd, 30, prec)
    ex = formal_exp(SS3, fd, 30, prec)
    for a, b in ((ex, lg), (lg, ex)):
        comp = a.compose(b).canonical()
        assert comp.effective_prec >= 4
        diff = comp - TruncSeries.identity(fd, 30, comp.prec)
        assert all(not any(c) for c in diff.coeffs)


def test_log_normalization_and_denominators():
    fd = build_unramified(3, 1, 40)
    lg = formal_log(SS3, fd, 12, 40)
    assert lg.coeff_val(1) == 0  # log'(0) = 1
    # denominators grow no faster than v_p(m)
    for m in range(1, 13):
        v = lg.coeff_val(m)
        if v != float("inf"):
            from normtower.padic import val_int
            assert v >= -val_int(m, 3, 10)


def test_multiplication_by_p_supersingular_shape():
    fd = build_unramified(3, 1, 60)
    mp = multiplication_by_p_series(SS3, fd, 11, 4)
    q = 3**mp.effective_prec
    # [p](T) = pT + ... with the degree-p^2 coefficient a unit (height two)
    assert mp.coeffs[1][0] % 3**2 == 3
    assert mp.coeffs[9][0] % 3 != 0
    for j in range(2, 9):
        assert mp.coeffs[j][0] % 3 == 0
