"""Deterministic reference values: quantum closed forms and the ball-model integrals.

The joint probabilities are evaluated as double integrals over the SO(3)
ball of radius 1: an outer integral over the radius r weighted by the
density p(r), and an inner integral giving the overlap of two circular caps
on the sphere of radius r.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .constraint import _check_eta, _f_unchecked, check_kappa
from .quadrature import INNER, OUTER, QuadratureSettings, integrate

HALF_PI = 0.5 * math.pi
OPPOSITE = "opposite"
SAME = "same"


@dataclass(frozen=True)
class ProbabilityTable:
    eta: float
    p_pm: float
    p_mp: float
    p_pp: float
    p_mm: float
    p_p0: float = 0.0
    p_m0: float = 0.0
    p_0p: float = 0.0
    p_0m: float = 0.0
    p_00: float = 0.0
    p1_plus: float = 0.5
    p1_minus: float = 0.5
    p2_plus: float = 0.5
    p2_minus: float = 0.5

    def joint_sum(self) -> float:
        return (self.p_pm + self.p_mp + self.p_pp + self.p_mm + self.p_p0
                + self.p_m0 + self.p_0p + self.p_0m + self.p_00)

    def as_dict(self) -> dict:
        return asdict(self)


def _check_r(r: float) -> float:
    r = float(r)
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r must lie in [0, 1], got {r!r}")
    return r


def quantum_reference(eta: float) -> ProbabilityTable:
    eta = _check_eta(eta)
    opp = 0.5 * math.cos(0.5 * eta) ** 2
    same = 0.5 * math.sin(0.5 * eta) ** 2
    return ProbabilityTable(eta=eta, p_pm=opp, p_mp=opp, p_pp=same, p_mm=same)


def quantum_correlation(eta: float) -> float:
    return -math.cos(_check_eta(eta))


def pearle_density(r: float) -> float:
    """p(r) = (4 pi / 3) sin(pi r / 2) / (1 + cos(pi r / 2))^3 on [0, 1]."""
    r = _check_r(r)
    return _density(r)


def _density(r):
    x = HALF_PI * np.asarray(r, dtype=float)
    return (4.0 * math.pi / 3.0) * np.sin(x) / (1.0 + np.cos(x)) ** 3


def pearle_cumulative(r: float) -> float:
    r = _check_r(r)
    return -1.0 / 3.0 + 4.0 / (3.0 * (1.0 + math.cos(HALF_PI * r)) ** 2)


def r_from_eta_zs(eta_zs: float, kappa: float = 1.0) -> float:
    """Ball radius r with cos(pi r / 2) = f(eta_zs)."""
    eta_zs = _check_eta(eta_zs, "eta_zs")
    f = float(_f_unchecked(eta_zs, check_kappa(kappa)))
    return math.acos(f) / HALF_PI


def eta_zs_from_r(r: float, kappa: float = 1.0) -> float:
    """Inverse of :func:`r_from_eta_zs` for kappa > 0: eta_zs = kappa * pi * C(r)."""
    kappa = check_kappa(kappa)
    if kappa <= 0:
        raise ValueError("inverse only defined for kappa > 0")
    return kappa * math.pi * pearle_cumulative(r)


def delta_r(eta_ab: float) -> float:
    """Relative rotation offset between the two stations, in ball-radius units."""
    eta = _check_eta(eta_ab, "eta_ab")
    t = eta / math.pi
    if eta <= HALF_PI:
        c = -1.0 + 2.0 / math.sqrt(1.0 + 3.0 * t)
    else:
        c = -1.0 + 2.0 / math.sqrt(4.0 - 3.0 * t)
    return math.acos(min(1.0, c)) / HALF_PI


def phase_shift_h(eta_ab: float) -> float:
    """h(eta) = (3 pi / 8) sin^2 eta / (pi sin^2(eta/2) + eta cos eta - sin eta)."""
    eta = _check_eta(eta_ab, "eta_ab")
    # h(eta) == h(pi - eta); folding avoids cancellation in the denominator near pi
    if eta > HALF_PI:
        eta = math.pi - eta
    if eta == 0.0:
        return 1.5
    if eta < 1e-4:
        # raw form loses digits here; h = 3/2 + 2 eta/pi + (8/(3 pi^2) - 3/8) eta^2 + O(eta^3)
        return 1.5 + 2.0 * eta / math.pi + (8.0 / (3.0 * math.pi ** 2) - 0.375) * eta * eta
    num = math.sin(eta) ** 2
    den = math.pi * math.sin(0.5 * eta) ** 2 + eta * math.cos(eta) - math.sin(eta)
    return (3.0 * math.pi / 8.0) * num / den


def _cap_integral(c: float, lo: float, q: QuadratureSettings) -> float:
    """integral over [lo, acos c] of sqrt(1 - (c / cos xi)^2)."""
    hi = math.acos(c)
    if lo >= hi:
        return 0.0

    def integrand(xi):
        ratio = c / np.cos(xi)
        return np.sqrt(np.clip(1.0 - ratio * ratio, 0.0, None))

    return integrate(integrand, lo, hi, q)[0]


def cap_overlap(r: float, eta_ab: float, q: QuadratureSettings = INNER) -> float:
    """Intersection area of the two circular caps on the sphere of radius r."""
    r = _check_r(r)
    if r == 0.0:
        raise ValueError("r must be positive")
    eta = _check_eta(eta_ab, "eta_ab")
    if eta >= math.pi * r:
        return 0.0
    return 4.0 * r * r * _cap_integral(math.cos(HALF_PI * r), 0.5 * eta, q)


def scaled_overlap(r: float, eta_ab: float, q: QuadratureSettings = INNER) -> float:
    return phase_shift_h(eta_ab) * cap_overlap(r, eta_ab, q)


def joint_prob_integral(eta_ab: float, channel: str = OPPOSITE,
                        q: QuadratureSettings = INNER, q_outer: QuadratureSettings = OUTER) -> float:
    """P(+-) (channel "opposite") or P(++) (channel "same") from the ball integral."""
    eta = _check_eta(eta_ab, "eta_ab")
    if channel == OPPOSITE:
        angle = eta
    elif channel == SAME:
        angle = math.pi - eta
    else:
        raise ValueError(f"channel must be {OPPOSITE!r} or {SAME!r}")
    lower = angle / math.pi
    if lower >= 1.0:
        return 0.0
    h = phase_shift_h(angle)

    def integrand(rs):
        out = np.empty(len(rs))
        for i, r in enumerate(rs):
            # J / (4 pi r^2) with the 4 r^2 of the cap area cancelled
            area = _cap_integral(math.cos(HALF_PI * r), 0.5 * angle, q) / math.pi
            out[i] = _density(r) * h * area
        return out

    return integrate(integrand, lower, 1.0, q_outer)[0]


def zero_outcome_probs(g0: float, g_eta: float) -> tuple[float, float]:
    """(P00, P+0) from the double-detection fractions g(0) and g(eta).

    A negative P00 is returned unchanged; it means the two g values cannot
    come from one consistent detection model.
    """
    for name, g in (("g0", g0), ("g_eta", g_eta)):
        if not 0.0 <= g <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {g!r}")
    return 1.0 + g_eta - 2.0 * g0, 0.5 * (g0 - g_eta)


def correlation_from_probs(t: ProbabilityTable) -> float:
    entries = (t.p_pp, t.p_mm, t.p_pm, t.p_mp)
    if min(entries) < 0:
        raise ValueError("joint probabilities must be non-negative")
    mass = sum(entries)
    if mass <= 0:
        raise ValueError("zero coincidence mass")
    return (t.p_pp + t.p_mm - t.p_pm - t.p_mp) / mass


def _g_ratio(eta: float, opp: float, same: float) -> float:
    c2 = 0.5 * math.cos(0.5 * eta) ** 2
    s2 = 0.5 * math.sin(0.5 * eta) ** 2
    return opp / c2 if c2 >= s2 else same / s2


def oracle_table(eta: float, q: QuadratureSettings = INNER, q_outer: QuadratureSettings = OUTER) -> ProbabilityTable:
    """Probability table of the ball model at unit strength."""
    eta = _check_eta(eta)
    opp = joint_prob_integral(eta, OPPOSITE, q, q_outer)
    same = joint_prob_integral(eta, SAME, q, q_outer)
    g0 = min(1.0, _g_ratio(0.0, joint_prob_integral(0.0, OPPOSITE, q, q_outer), 0.0))
    g_eta = min(1.0, _g_ratio(eta, opp, same))
    p00, p_single = zero_outcome_probs(g0, g_eta)
    return ProbabilityTable(
        eta=eta, p_pm=opp, p_mp=opp, p_pp=same, p_mm=same,
        p_p0=p_single, p_m0=p_single, p_0p=p_single, p_0m=p_single, p_00=p00,
        p1_plus=0.5 * g0, p1_minus=0.5 * g0, p2_plus=0.5 * g0, p2_minus=0.5 * g0,
    )


def detection_overlap(eta: float, kappa: float, q: QuadratureSettings = INNER,
                      q_outer: QuadratureSettings = OUTER) -> float:
    """Probability that a pair gives (A, B) = (+1, -1) under per-station detection.

    Integrates the unscaled cap-overlap fraction over the uniform rotation
    scalar, with threshold f_kappa.  Thresholds <= 0 detect everything.
    """
    eta = _check_eta(eta)
    kappa = check_kappa(kappa)
    everything = (math.pi - eta) / (2.0 * math.pi)
    if kappa == 0.0:
        return everything
    lo_half = 0.5 * eta

    def integrand(ts):
        c = _f_unchecked(math.pi * np.asarray(ts), kappa)
        out = np.empty(len(ts))
        for i, ci in enumerate(c):
            out[i] = everything if ci <= 0.0 else _cap_integral(float(ci), lo_half, q) / math.pi
        return out

    return integrate(integrand, 0.0, 1.0, q_outer)[0]


def oracle_correlation(eta: float, kappa: float = 1.0, q: QuadratureSettings = INNER,
                       q_outer: QuadratureSettings = OUTER) -> float:
    """Coincidence-conditioned correlation of the constraint model by quadrature."""
    eta = _check_eta(eta)
    kappa = check_kappa(kappa)
    if kappa == 1.0:
        opp = joint_prob_integral(eta, OPPOSITE, q, q_outer)
        same = joint_prob_integral(eta, SAME, q, q_outer)
    else:
        opp = detection_overlap(eta, kappa, q, q_outer)
        same = detection_overlap(math.pi - eta, kappa, q, q_outer)
    return correlation_from_probs(ProbabilityTable(eta=eta, p_pm=opp, p_mp=opp, p_pp=same, p_mm=same))
