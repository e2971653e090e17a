"""Bivector formulation: fair-coin orientation lambda and spin bivectors L(n, lambda).

Two averages are produced side by side and never merged:

* the outcome-product average (1/n) sum A^k B^k, where A = lambda and
  B = -lambda, which is -1 for every pair;
* the multivector average of L(a, lambda^k) L(b, lambda^k), whose scalar
  part is -a.b.

The multivector average is accumulated two ways.  ``chain`` uses the
orientation-dependent rule L(a)L(b) = -a.b - lambda D(a x b), so its
bivector part is -mean(lambda) D(a x b) and shrinks like 1/sqrt(n).
``direct`` multiplies the bivectors with the fixed-orientation product
table; there lambda^2 = 1 cancels and the bivector part stays at
-D(a x b) for every n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import ga
from .constraint import EmptyExperimentError
from .rng import DEFAULT_CHUNK_SIZE, chunk_sizes, chunk_stream

# independent of the constraint model's stream for the same seed
LAMBDA_STREAM = 1


def outcome_A_biv(a, lam: int) -> int:
    """lim_{s -> a} of -D(a) L(s, lambda), evaluated at s = a."""
    q = -(ga.detector_bivector(ga.as_unit(a)) * ga.spin_bivector(a, lam))
    if not q.is_scalar(ga.UNIT_TOL):
        raise ArithmeticError(f"outcome is not a scalar: {q!r}")
    return int(round(q.scalar_part))


def outcome_B_biv(b, lam: int) -> int:
    """lim_{s -> b} of +L(s, lambda) D(b), evaluated at s = b."""
    q = ga.spin_bivector(ga.as_unit(b), lam) * ga.detector_bivector(b)
    if not q.is_scalar(ga.UNIT_TOL):
        raise ArithmeticError(f"outcome is not a scalar: {q!r}")
    return int(round(q.scalar_part))


def sample_lambdas(rng: np.random.Generator, size: int) -> np.ndarray:
    return np.where(rng.integers(0, 2, size) == 1, 1, -1).astype(np.int8)


@dataclass
class PairedProductAccumulator:
    """Running sums of L(a, lambda^k) L(b, lambda^k); bivector sums are dual-vector components."""

    scalar_sum: float = 0.0
    bivector_sums: np.ndarray = field(default_factory=lambda: np.zeros(3))
    count: int = 0

    def add(self, scalar_sum: float, bivector_sums, count: int) -> None:
        self.scalar_sum += scalar_sum
        self.bivector_sums = self.bivector_sums + np.asarray(bivector_sums, float)
        self.count += int(count)

    def merge(self, other: "PairedProductAccumulator") -> "PairedProductAccumulator":
        out = PairedProductAccumulator(self.scalar_sum, self.bivector_sums.copy(), self.count)
        out.add(other.scalar_sum, other.bivector_sums, other.count)
        return out

    def mean(self) -> ga.Multivector3:
        if self.count == 0:
            raise EmptyExperimentError("empty experiment")
        c = np.zeros(8)
        c[ga.SCALAR] = self.scalar_sum / self.count
        c[list(ga.DUAL_INDEX)] = self.bivector_sums / self.count
        return ga.Multivector3(c)


@dataclass(frozen=True)
class PairedProductResult:
    scalar: float
    bivector_coeff: float
    lambda_sum: int
    n: int
    outcome_product_mean: float
    chain_mean: ga.Multivector3
    direct_mean: ga.Multivector3
    axb: np.ndarray

    @property
    def direct_bivector_coeff(self) -> float:
        """Coefficient of D(a x b) in the fixed-orientation product average."""
        return _coefficient_along(self.direct_mean, self.axb)


def _coefficient_along(m: ga.Multivector3, axis) -> float:
    axis = np.asarray(axis, float)
    norm2 = float(axis @ axis)
    if norm2 < ga.UNIT_TOL:
        return 0.0
    return float(m.bivector_dual @ axis) / norm2


def _chunk_sums(a, b, seed, k, size):
    lam = sample_lambdas(chunk_stream(seed, k, LAMBDA_STREAM), size).astype(float)
    la = ga.dual_coeffs(np.outer(lam, a))
    lb = ga.dual_coeffs(np.outer(lam, b))
    direct = ga.gp(la, lb).sum(axis=0)
    lam_sum = int(lam.sum())
    outcome_sum = int(np.sum(lam * -lam))
    return lam_sum, direct, outcome_sum


def paired_product_average(a, b, n: int, seed: int, chunk_size: int = DEFAULT_CHUNK_SIZE) -> PairedProductResult:
    """Average L(a, lambda^k) L(b, lambda^k) over n fair-coin orientations."""
    if n < 1:
        raise EmptyExperimentError("empty experiment")
    a = ga.as_unit(a)
    b = ga.as_unit(b)
    dot = float(a @ b)
    axb = np.cross(a, b)
    chain = PairedProductAccumulator()
    direct = PairedProductAccumulator()
    lam_total = 0
    outcome_total = 0
    for k, size in chunk_sizes(n, chunk_size):
        lam_sum, direct_sum, outcome_sum = _chunk_sums(a, b, seed, k, size)
        # each summand is -a.b - lambda^k D(a x b)
        chain.add(-dot * size, -lam_sum * axb, size)
        direct.add(direct_sum[ga.SCALAR], ga.bivector_dual(direct_sum), size)
        lam_total += lam_sum
        outcome_total += outcome_sum
    return PairedProductResult(
        scalar=chain.scalar_sum / n,
        bivector_coeff=-lam_total / n,
        lambda_sum=lam_total,
        n=n,
        outcome_product_mean=outcome_total / n,
        chain_mean=chain.mean(),
        direct_mean=direct.mean(),
        axb=axb,
    )


def outcome_counts(n: int, seed: int, chunk_size: int = DEFAULT_CHUNK_SIZE) -> np.ndarray:
    """Nine outcome counts (OUTCOME_LABELS order) for A = lambda, B = -lambda."""
    if n < 1:
        raise EmptyExperimentError("empty experiment")
    plus = 0
    for k, size in chunk_sizes(n, chunk_size):
        lam = sample_lambdas(chunk_stream(seed, k, LAMBDA_STREAM), size)
        plus += int(np.count_nonzero(lam == 1))
    counts = np.zeros(9, dtype=np.int64)
    counts[1] = plus  # A=+1, B=-1
    counts[2] = n - plus  # A=-1, B=+1
    return counts


def chsh_statistic(E_ab: float, E_abp: float, E_apb: float, E_apbp: float) -> float:
    """|E(a,b) + E(a,b') + E(a',b) - E(a',b')|."""
    for v in (E_ab, E_abp, E_apb, E_apbp):
        if not -1.0 <= v <= 1.0:
            raise ValueError(f"correlation {v!r} outside [-1, 1]")
    return abs(E_ab + E_abp + E_apb - E_apbp)


def chsh_best(correlation, a: float, ap: float, b: float, bp: float) -> float:
    """Largest CHSH statistic over the relabelings a<->a', b<->b'.

    ``correlation`` maps a planar angle difference in [0, pi] to E.
    """
    def E(x, y):
        d = abs(x - y) % (2.0 * math.pi)
        return correlation(min(d, 2.0 * math.pi - d))

    best = 0.0
    for x, xp in ((a, ap), (ap, a)):
        for y, yp in ((b, bp), (bp, b)):
            best = max(best, chsh_statistic(E(x, y), E(x, yp), E(xp, y), E(xp, yp)))
    return best


def chain_expectation(a, b) -> float:
    """Scalar part of L(a, lambda) L(b, lambda); the same for both orientations."""
    a = ga.as_unit(a)
    b = ga.as_unit(b)
    return (ga.spin_bivector(a, 1) * ga.spin_bivector(b, 1)).scalar_part
