"""Quaternionic constraint model on S^3.

A pair is emitted with a spin axis ``e0`` (uniform on the sphere) and a
rotation scalar ``eta_zs`` (uniform on [0, pi]).  A station along ``n``
registers a result only when ``|n . e0| >= f(eta_zs)``; the result is
``-sign`` (Alice) or ``+sign`` (Bob) of ``n . e0``.

The scalar functions here are the reference semantics.  The ``*_batch``
helpers evaluate the same rules on arrays and drive the Monte Carlo engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import ga
from .rng import DEFAULT_CHUNK_SIZE, chunk_sizes, chunk_stream

PER_STATION = "per-station"
PAIRED_FILTER = "paired-filter"
MODES = (PER_STATION, PAIRED_FILTER)

# Order of the nine outcome categories everywhere in the package.
OUTCOME_LABELS = ("pp", "pm", "mp", "mm", "p0", "m0", "0p", "0m", "00")
_OUTCOME_VALUES = {"p": 1, "m": -1, "0": 0}
# bincount slot (A+1)*3 + (B+1) -> position in OUTCOME_LABELS
_SLOT_TO_LABEL = np.array(
    [OUTCOME_LABELS.index(f"{x}{y}") for x in "m0p" for y in "m0p"], dtype=np.intp
)


class EmptyExperimentError(ValueError):
    pass


def _check_eta(eta: float, name: str = "eta") -> float:
    eta = float(eta)
    if not (0.0 <= eta <= math.pi):
        raise ValueError(f"{name} must lie in [0, pi], got {eta!r}")
    return eta


def check_kappa(kappa: float) -> float:
    kappa = float(kappa)
    if not math.isfinite(kappa):
        raise ValueError("kappa must be finite")
    if kappa < 0 and kappa != -1.0:
        raise ValueError(f"kappa must be -1 or >= 0, got {kappa!r}")
    return kappa


def _f_unchecked(eta, kappa: float):
    eta = np.asarray(eta, dtype=float)
    if kappa == 0.0:
        return np.full_like(eta, -1.0)
    if kappa == -1.0:
        # negative curvature: eta -> 2 pi - eta at unit strength
        ratio = (2.0 * math.pi - eta) / math.pi
    else:
        ratio = eta / (kappa * math.pi)
    return np.clip(-1.0 + 2.0 / np.sqrt(1.0 + 3.0 * ratio), -1.0, 1.0)


def strength_f(eta: float, kappa: float = 1.0) -> float:
    """Detection threshold f(eta) for strength constant kappa."""
    eta = _check_eta(eta)
    return float(_f_unchecked(eta, check_kappa(kappa)))


def strength_f_batch(eta, kappa: float = 1.0) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    if np.any((eta < 0) | (eta > math.pi)):
        raise ValueError("eta must lie in [0, pi]")
    return _f_unchecked(eta, check_kappa(kappa))


def complete_state_norm(eta_ne: float, eta_zs: float, kappa: float = 1.0) -> float:
    """N = 1 + sin^2(eta_ne) + f(eta_zs)^2."""
    eta_ne = _check_eta(eta_ne, "eta_ne")
    return 1.0 + math.sin(eta_ne) ** 2 + strength_f(eta_zs, kappa) ** 2


def lambda_membership(eta_ne: float, eta_zs: float, kappa: float = 1.0) -> bool:
    eta_ne = _check_eta(eta_ne, "eta_ne")
    return abs(math.cos(eta_ne)) >= strength_f(eta_zs, kappa)


def triangle_membership(n, e0, eta_zs: float, kappa: float = 1.0) -> bool:
    """Norm form of the constraint: ||P0||^2 >= N - 1 with P0 built from (n, e0).

    Agrees with :func:`lambda_membership` whenever f(eta_zs) >= 0; for f < 0
    (kappa = 0 or -1) the squared form is stricter than the absolute-value one.
    """
    n = ga.as_unit(n)
    e0 = ga.as_unit(e0)
    p0 = ga.make_P(n, e0)
    eta_ne = math.acos(float(np.clip(np.dot(n, e0), -1.0, 1.0)))
    return p0.norm() ** 2 >= complete_state_norm(eta_ne, eta_zs, kappa) - 1.0


def effective_metric(u, v, eta: float) -> float:
    """u.v where |u.v| clears the unit-strength threshold f(eta), else 0."""
    dot = float(np.dot(ga.as_unit(u), ga.as_unit(v)))
    return dot if abs(dot) >= strength_f(eta, 1.0) else 0.0


@dataclass(frozen=True)
class InitialState:
    e0: np.ndarray
    eta_zs: float
    s0: np.ndarray | None = None

    def __post_init__(self):
        ga.as_unit(self.e0)
        _check_eta(self.eta_zs, "eta_zs")


@dataclass(frozen=True)
class ModelParams:
    kappa: float = 1.0
    mode: str = PER_STATION

    def __post_init__(self):
        check_kappa(self.kappa)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


def sphere_points(rng: np.random.Generator, size: int) -> np.ndarray:
    """Area-uniform points on S^2 from two uniforms (z and azimuth)."""
    z = rng.uniform(-1.0, 1.0, size)
    phi = rng.uniform(0.0, 2.0 * math.pi, size)
    rho = np.sqrt(1.0 - z * z)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)


def sample_states(rng: np.random.Generator, size: int, with_s0: bool = False):
    """Draw (e0, eta_zs[, s0]) arrays.

    s0 is drawn last so skipping it leaves e0 and eta_zs unchanged.
    """
    e0 = sphere_points(rng, size)
    eta_zs = rng.uniform(0.0, math.pi, size)
    if with_s0:
        return e0, eta_zs, sphere_points(rng, size)
    return e0, eta_zs


def sample_initial_state(rng: np.random.Generator) -> InitialState:
    e0, eta_zs, s0 = sample_states(rng, 1, with_s0=True)
    return InitialState(e0=e0[0], eta_zs=float(eta_zs[0]), s0=s0[0])


def _sign(x):
    return np.where(x >= 0, 1, -1)


def measure_A(a, state: InitialState, params: ModelParams) -> int:
    c = float(np.dot(ga.as_unit(a), state.e0))
    if abs(c) >= strength_f(state.eta_zs, params.kappa):
        return -1 if c >= 0 else 1
    return 0


def measure_B(b, state: InitialState, params: ModelParams) -> int:
    c = float(np.dot(ga.as_unit(b), state.e0))
    if abs(c) >= strength_f(state.eta_zs, params.kappa):
        return 1 if c >= 0 else -1
    return 0


def outcomes_batch(a, b, e0, threshold, mode: str = PER_STATION):
    """Vectorised station outcomes for arrays of states; returns (A, B) int8 arrays."""
    ca = e0 @ np.asarray(a, float)
    cb = e0 @ np.asarray(b, float)
    det_a = np.abs(ca) >= threshold
    det_b = np.abs(cb) >= threshold
    if mode == PAIRED_FILTER:
        det_a = det_b = det_a & det_b
    A = np.where(det_a, -_sign(ca), 0).astype(np.int8)
    B = np.where(det_b, _sign(cb), 0).astype(np.int8)
    return A, B


def tally_outcomes(A, B) -> np.ndarray:
    """Nine outcome counts in OUTCOME_LABELS order."""
    slots = (A.astype(np.intp) + 1) * 3 + (B.astype(np.intp) + 1)
    raw = np.bincount(slots, minlength=9)
    counts = np.zeros(9, dtype=np.int64)
    counts[_SLOT_TO_LABEL] = raw
    return counts


def chunk_counts(a, bs, seed: int, chunk_index: int, size: int, kappa: float, mode: str) -> np.ndarray:
    """Outcome counts of one chunk for every detector direction in ``bs``; shape (len(bs), 9)."""
    rng = chunk_stream(seed, chunk_index)
    e0, eta_zs = sample_states(rng, size)
    threshold = _f_unchecked(eta_zs, kappa)
    ca = e0 @ np.asarray(a, float)
    det_a = np.abs(ca) >= threshold
    A = np.where(det_a, -_sign(ca), 0)
    out = np.empty((len(bs), 9), dtype=np.int64)
    for i, b in enumerate(bs):
        cb = e0 @ np.asarray(b, float)
        det_b = np.abs(cb) >= threshold
        if mode == PAIRED_FILTER:
            both = det_a & det_b
            Ai = np.where(both, A, 0)
            Bi = np.where(both, _sign(cb), 0)
        else:
            Ai = A
            Bi = np.where(det_b, _sign(cb), 0)
        out[i] = tally_outcomes(Ai, Bi)
    return out


def _chunk_range_counts(args):
    a, bs, seed, chunks, kappa, mode = args
    total = np.zeros((len(bs), 9), dtype=np.int64)
    for k, size in chunks:
        total += chunk_counts(a, bs, seed, k, size, kappa, mode)
    return total


def tally(a, bs, n: int, params: ModelParams, seed: int, chunk_size: int = DEFAULT_CHUNK_SIZE, workers: int = 1) -> np.ndarray:
    """Outcome counts for n emitted pairs at each detector direction in ``bs``.

    All directions share the same stream of states.  Counts are integer sums
    over chunks, so the result does not depend on ``workers``.
    """
    if n < 1:
        raise EmptyExperimentError("empty experiment")
    a = ga.as_unit(a)
    bs = [ga.as_unit(b) for b in bs]
    chunks = list(chunk_sizes(n, chunk_size))
    if workers <= 1 or len(chunks) == 1:
        return _chunk_range_counts((a, bs, seed, chunks, params.kappa, params.mode))
    from concurrent.futures import ProcessPoolExecutor

    groups = [chunks[i::workers] for i in range(workers)]
    jobs = [(a, bs, seed, g, params.kappa, params.mode) for g in groups if g]
    with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
        return sum(pool.map(_chunk_range_counts, jobs))


@dataclass
class CorrelationRecord:
    """Aggregate of one detector-angle setting."""

    eta: float
    counts: dict = field(default_factory=dict)
    g: float = math.nan
    E_mc: float = math.nan
    E_stderr: float = math.nan
    E_oracle: float | None = None
    E_quantum: float | None = None

    @property
    def trials(self) -> int:
        return int(sum(self.counts.values()))

    @property
    def coincidences(self) -> int:
        c = self.counts
        return c["pp"] + c["pm"] + c["mp"] + c["mm"]

    @property
    def defined(self) -> bool:
        return self.coincidences > 0

    def singles(self, station: str = "A") -> tuple[float, float]:
        """Unconditional (P+, P-) for one station over all emitted pairs."""
        c = self.counts
        if station == "A":
            plus = c["pp"] + c["pm"] + c["p0"]
            minus = c["mp"] + c["mm"] + c["m0"]
        else:
            plus = c["pp"] + c["mp"] + c["0p"]
            minus = c["pm"] + c["mm"] + c["0m"]
        return plus / self.trials, minus / self.trials


def correlation_from_counts(counts) -> tuple[float, float, float]:
    """(g, E, stderr) from nine counts; E and stderr are NaN without coincidences."""
    c = dict(zip(OUTCOME_LABELS, (int(x) for x in counts))) if not isinstance(counts, dict) else counts
    total = sum(c.values())
    coinc = c["pp"] + c["pm"] + c["mp"] + c["mm"]
    g = coinc / total if total else math.nan
    if coinc == 0:
        return g, math.nan, math.nan
    E = (c["pp"] + c["mm"] - c["pm"] - c["mp"]) / coinc
    return g, E, math.sqrt(max(0.0, 1.0 - E * E) / coinc)


def make_record(eta: float, counts, E_quantum: float | None = None) -> CorrelationRecord:
    counts = {k: int(v) for k, v in zip(OUTCOME_LABELS, counts)}
    g, E, se = correlation_from_counts(counts)
    return CorrelationRecord(eta=float(eta), counts=counts, g=g, E_mc=E, E_stderr=se, E_quantum=E_quantum)


def run_trials(a, b, n: int, params: ModelParams, seed: int, chunk_size: int = DEFAULT_CHUNK_SIZE, workers: int = 1) -> CorrelationRecord:
    """Run n emitted pairs with Alice along a and Bob along b."""
    counts = tally(a, [b], n, params, seed, chunk_size, workers)[0]
    eta = math.acos(float(np.clip(np.dot(ga.as_unit(a), ga.as_unit(b)), -1.0, 1.0)))
    return make_record(eta, counts, E_quantum=-math.cos(eta))
