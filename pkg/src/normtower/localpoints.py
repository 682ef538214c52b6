"""Series-route construction of the canonical points: the group-law sum
epsilon [+] pi_n is evaluated through the twisted exponential and pushed along
the integral isomorphism to the curve's formal group, then cross-checked
against the closed-form logarithm.

Convergence limits this route to n <= 1: the twisted exponential converges on
valuations above 1/(p^2-1), and v(pi_n) = 1/((p-1)p^n) clears that exactly for
p^n < p + 1. Effective precision is computed from measured denominator
profiles, never assumed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .honda import SeriesBundle, series_bundle
from .padic import PrecisionExhausted
from .points import epsilon_log, point_log
from .series import TruncSeries
from .tower import TowerDesc, TowerElt, tower_zero, uniformizer


class InsufficientDegree(ValueError):
    """Truncation degree too small for any effective digits at this level."""


def eval_series_at_tower(s: TruncSeries, x: TowerElt, vmin: Fraction) -> tuple[TowerElt, int]:
    """Horner evaluation of an O_k-coefficient series at a tower element with
    v_p(x) >= vmin > 0. Returns (value, tail_floor): omitted degrees contribute
    valuation >= (deg+1) vmin - den."""
    assert x.den == 0, "evaluate at integral arguments"
    t = x.tower
    acc = tower_zero(t, x.level, prec=min(s.prec, x.prec))
    for j in range(s.deg, -1, -1):
        acc = acc * x
        if any(s.coeffs[j]):
            acc = acc + tower_scalar_at(t, x.level, s.coeffs[j], prec=acc.prec)
    tail_floor = math.floor((s.deg + 1) * vmin) - s.den
    return acc.div_p(s.den) if s.den else acc, tail_floor


def tower_scalar_at(t: TowerDesc, level: int, coeff, prec: int) -> TowerElt:
    import numpy as np
    c = np.zeros((t.level_dim(level), t.d), dtype=object)
    c[0] = tuple(coeff)
    return TowerElt(t, level, c, 0, prec)


def solve_log_preimage(hl_series: TruncSeries, field, target_elt, target_floor: int):
    """Newton solve log(t) = target for t in the maximal ideal of O_k
    (valuation >= 1, so the series converge comfortably)."""
    q = field.p**hl_series.prec
    t = tuple(target_elt)
    deriv = hl_series.derivative().canonical()
    assert deriv.den == 0
    for _ in range(hl_series.prec.bit_length() + 4):
        val, den, _ = hl_series.evaluate_field(t, 1)
        # residual = log(t) - target, true value p^-den*(val) - target
        resid = field.sub(val, field.scalar(field.p**den, target_elt, q), q)
        if field.val(resid, cap=target_floor + den) >= target_floor + den:
            break
        dval, dden, _ = deriv.evaluate_field(t, 1)
        assert dden == 0
        dinv = field.inv(dval, q)
        step = field.mul(resid, dinv, q)
        pd = field.p**den
        assert all(v % pd == 0 for v in step), "Newton step lost integrality"
        step = tuple(v // pd for v in step)
        t = field.sub(t, step, q)
    val, den, _ = hl_series.evaluate_field(t, 1)
    resid = field.sub(val, field.scalar(field.p**den, target_elt, q), q)
    if field.val(resid, cap=target_floor + den) < target_floor + den:
        raise PrecisionExhausted("Newton solve for the log preimage did not converge")
    return t


@dataclass(frozen=True)
class LocalPoint:
    level: int
    log_value: TowerElt
    param_value: TowerElt | None
    effective_prec: int
    report: dict


def local_point_log(t: TowerDesc, n: int) -> LocalPoint:
    """Closed-form logarithm of the canonical point (exact at precision)."""
    lg = point_log(t, n)
    return LocalPoint(level=n, log_value=lg, param_value=None,
                      effective_prec=lg.effective_prec,
                      report={"route": "closed-form", "den": lg.den})


def local_point_direct(bundle: SeriesBundle, n: int, target: int) -> LocalPoint:
    """Construct the point by series: preimage of epsilon under the twisted log,
    group-law sum with pi_n, then the integral isomorphism to the curve group.

    Cross-checks the series logarithm of the parameter against the closed form;
    a mismatch above the effective floor is a hard failure.
    """
    if n > 1:
        raise InsufficientDegree("series route diverges for n > 1 (valuation below radius)")
    assert n == bundle.n, "bundle was built for a different twist level"
    field = bundle.field
    p, d = field.p, field.d
    D = bundle.D
    e_ram = (p - 1) * p**n if n >= 0 else 1
    vmin = Fraction(1, e_ram)
    exp_den = bundle.honda_exp_series.den
    achievable = math.floor((D + 1) * vmin) - exp_den
    if achievable < 1:
        raise InsufficientDegree(
            f"degree {D} gives {achievable} effective digits at level {n}")

    tower = TowerDesc(field, max(n, 0))
    eps = epsilon_log(tower, n)

    # preimage of epsilon under the twisted log lives in the maximal ideal
    eps_coeff = tuple(int(v) for v in eps.coords[0])
    pre = solve_log_preimage(bundle.honda.series, field, eps_coeff,
                             target_floor=target + 4)
    assert field.val(pre, cap=2) >= 1, "preimage not in the maximal ideal"

    # parameter of the group-law sum: exp_twisted at the sum of logarithms
    S = point_log(tower, n)
    assert S.den == 0, "closed-form log is integral for n <= 1"
    t_sum, tail1 = eval_series_at_tower(bundle.honda_exp_series, S, vmin)
    assert t_sum.den == bundle.honda_exp_series.den
    t_sum_int = t_sum.canonical()
    if t_sum_int.den:
        raise PrecisionExhausted("group-law parameter failed to strip to integral")

    # push through the integral isomorphism to the curve group
    param, tail2 = eval_series_at_tower(bundle.forward, t_sum_int, vmin)

    # independent logarithm of the parameter, against the closed form
    logv, tail3 = eval_series_at_tower(bundle.curve_log, param.canonical(), vmin)
    # the comparison accumulates the errors of three evaluations; their sum
    # can cost one digit (3 * p^-f <= p^-(f-1))
    floor = min(tail1, tail2, tail3,
                bundle.honda.tail_floor - exp_den,
                S.effective_prec, t_sum_int.effective_prec) - 1
    diff = (logv - S).canonical()
    resid = diff.residual_valuation()
    if resid < min(floor, target):
        raise ArithmeticError(
            f"series log disagrees with closed form: residual {resid} < floor {floor}")
    return LocalPoint(
        level=n,
        log_value=S,
        param_value=param.canonical(),
        effective_prec=min(floor, param.effective_prec),
        report={
            "route": "series",
            "D": D,
            "tail_floors": (tail1, tail2, tail3),
            "achievable": achievable,
            "crosscheck_residual": resid,
            "crosscheck_floor": min(floor, target),
        },
    )


def torsion_probe(bundle: SeriesBundle, n: int, trials: int, seed: int) -> dict:
    """No p-torsion at the probed level: [p](t) != 0 for random t != 0 in the
    maximal ideal (multiplication by p through the integral composites)."""
    from .curve import multiplication_by_p_series

    field = bundle.field
    p = field.p
    mp = multiplication_by_p_series(bundle.curve, field, bundle.D, bundle.target)
    tower = TowerDesc(field, max(n, 0))
    e_ram = (p - 1) * p**n if n >= 0 else 1
    vmin = Fraction(1, e_ram)
    rng = random.Random(seed)
    pi = uniformizer(tower, n) if n >= 0 else None
    found_torsion = []
    for k in range(trials):
        import numpy as np
        c = np.array([[rng.randrange(p**2) for _ in range(field.d)]
                      for _ in range(tower.level_dim(max(n, 0)))], dtype=object)
        rand = TowerElt(tower, max(n, 0), c, 0, field.N)
        x = (pi * rand) if pi is not None else rand.scale_int(p)
        if x.is_zero():
            continue
        y, tail = eval_series_at_tower(mp, x, vmin)
        yc = y.canonical()
        if yc.is_zero() or yc.residual_valuation() >= min(tail, yc.effective_prec):
            found_torsion.append(k)
    return {"level": n, "trials": trials, "torsion_found": found_torsion,
            "ok": not found_torsion}
