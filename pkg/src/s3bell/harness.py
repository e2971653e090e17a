"""Experiment driver: angle grids, kappa sweeps, three-way comparison and reports."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from . import bivector, constraint, oracle
from .constraint import OUTCOME_LABELS, CorrelationRecord, ModelParams
from .rng import DEFAULT_CHUNK_SIZE, check_seed

log = logging.getLogger(__name__)

MODELS = ("constraint", "bivector")
FORMATS = ("csv", "json")
TSIRELSON = 2.0 * math.sqrt(2.0)
SUPRA_MARGIN = 0.05
DEFAULT_CHSH = (0.0, 0.5 * math.pi, 0.25 * math.pi, 0.75 * math.pi)

CSV_COLUMNS = (
    ["eta"] + [f"N_{k}" for k in OUTCOME_LABELS]
    + ["g", "E_mc", "E_stderr", "E_oracle", "E_quantum"]
)

REFERENCE_AXIS = np.array([1.0, 0.0, 0.0])


class ReportError(RuntimeError):
    pass


def default_grid(points: int = 37) -> tuple:
    if points < 2:
        raise ValueError("grid needs at least 2 points")
    return tuple(float(x) for x in np.linspace(0.0, math.pi, points))


@dataclass(frozen=True)
class RunConfig:
    model: str = "constraint"
    kappa: float = 1.0
    mode: str = constraint.PER_STATION
    trials: int = 1_000_000
    seed: int = 0
    angle_grid: tuple = field(default_factory=default_grid)
    chsh_angles: tuple = DEFAULT_CHSH
    output_format: str = "csv"
    chunk_size: int = DEFAULT_CHUNK_SIZE
    workers: int = 1

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if self.output_format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        if len(self.chsh_angles) != 4:
            raise ValueError("chsh_angles needs four angles: a, a', b, b'")
        check_seed(self.seed)
        ModelParams(self.kappa, self.mode)
        grid = list(self.angle_grid)
        if not grid:
            raise ValueError("empty angle grid")
        if any(not 0.0 <= x <= math.pi for x in grid):
            raise ValueError("grid angles must lie in [0, pi]")
        if grid != sorted(grid):
            raise ValueError("angle grid must be sorted")

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.kappa, self.mode)


def detector_b(eta: float) -> np.ndarray:
    """Bob's direction: the reference axis rotated by eta in the x-y plane."""
    return np.array([math.cos(eta), math.sin(eta), 0.0])


@lru_cache(maxsize=4096)
def _oracle_E(eta: float, kappa: float) -> float:
    return oracle.oracle_correlation(eta, kappa)


def oracle_E(eta: float, kappa: float) -> float:
    return _oracle_E(float(eta), float(kappa))


def _records_from_counts(grid, counts, kappa, model) -> list:
    records = []
    for eta, row in zip(grid, counts):
        rec = constraint.make_record(eta, row, E_quantum=-math.cos(eta))
        if model == "constraint":
            rec.E_oracle = oracle_E(eta, kappa)
        else:
            rec.E_oracle = bivector.chain_expectation(REFERENCE_AXIS, detector_b(eta))
        records.append(rec)
    return records


def run_experiment(config: RunConfig, grid=None) -> list:
    """One CorrelationRecord per grid angle; deterministic in (seed, chunk_size)."""
    grid = list(config.angle_grid if grid is None else grid)
    if not grid:
        raise ValueError("empty angle grid")
    if config.model == "constraint":
        bs = [detector_b(eta) for eta in grid]
        counts = constraint.tally(REFERENCE_AXIS, bs, config.trials, config.params,
                                  config.seed, config.chunk_size, config.workers)
    else:
        row = bivector.outcome_counts(config.trials, config.seed, config.chunk_size)
        counts = [row] * len(grid)
    return _records_from_counts(grid, counts, config.kappa, config.model)


@dataclass
class ChshResult:
    mc: float
    oracle: float
    quantum: float
    records: list


def _pair_angle(x: float, y: float) -> float:
    d = abs(x - y) % (2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


def run_chsh(config: RunConfig) -> ChshResult:
    """CHSH statistic of the Monte Carlo, the oracle and quantum theory at config.chsh_angles."""
    a, ap, b, bp = config.chsh_angles
    diffs = sorted({round(_pair_angle(x, y), 15) for x in (a, ap) for y in (b, bp)})
    records = run_experiment(config, grid=diffs)
    by_angle = {r.eta: r for r in records}

    def lookup(attr):
        return lambda eta: getattr(by_angle[round(eta, 15)], attr)

    if any(not r.defined for r in records):
        mc = math.nan
    else:
        mc = bivector.chsh_best(lookup("E_mc"), a, ap, b, bp)
    return ChshResult(
        mc=mc,
        oracle=bivector.chsh_best(lookup("E_oracle"), a, ap, b, bp),
        quantum=bivector.chsh_best(lookup("E_quantum"), a, ap, b, bp),
        records=records,
    )


def _rms(values) -> float:
    values = list(values)
    return math.sqrt(sum(v * v for v in values) / len(values))


def classify(records, chsh: float) -> str:
    """'supra-quantum' above the Tsirelson bound, else the closer of the linear and cosine laws."""
    if chsh > TSIRELSON + SUPRA_MARGIN:
        return "supra-quantum"
    rows = [r for r in records if r.defined]
    linear = _rms(r.E_mc - (-1.0 + 2.0 * r.eta / math.pi) for r in rows)
    cosine = _rms(r.E_mc + math.cos(r.eta) for r in rows)
    return "linear" if linear < cosine else "cosine"


@dataclass
class SweepResult:
    kappa: float
    records: list
    chsh: ChshResult
    fit_class: str

    def summary(self) -> str:
        return (f"kappa={self.kappa:g} class={self.fit_class} "
                f"CHSH_mc={self.chsh.mc:.5f} CHSH_oracle={self.chsh.oracle:.5f} "
                f"CHSH_quantum={self.chsh.quantum:.5f}")


def sweep_kappa(config: RunConfig, kappas) -> dict:
    """Run the grid and the CHSH settings for each kappa; keyed by kappa."""
    out = {}
    for k in kappas:
        cfg = replace(config, kappa=float(k))
        records = run_experiment(cfg)
        chsh = run_chsh(cfg)
        result = SweepResult(float(k), records, chsh, classify(records, chsh.mc))
        log.info(result.summary())
        out[float(k)] = result
    return out


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _record_row(r: CorrelationRecord) -> dict:
    row = {"eta": r.eta}
    row.update({f"N_{k}": r.counts[k] for k in OUTCOME_LABELS})
    row.update(g=r.g, E_mc=r.E_mc, E_stderr=r.E_stderr, E_oracle=r.E_oracle, E_quantum=r.E_quantum)
    return row


def _json_value(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def emit_report(records, fmt: str = "csv") -> str:
    if not records:
        raise ReportError("nothing to report")
    rows = [_record_row(r) for r in records]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([row[c] if c.startswith("N_") else _fmt(row[c]) for c in CSV_COLUMNS])
        return buf.getvalue()
    if fmt == "json":
        clean = [{k: _json_value(v) for k, v in row.items()} for row in rows]
        return json.dumps(clean, indent=1) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _to_float(x):
    if x is None or x == "":
        return None
    return float(x)


def parse_report(text: str, fmt: str = "csv") -> list:
    """Inverse of :func:`emit_report`."""
    if fmt == "csv":
        rows = list(csv.DictReader(io.StringIO(text)))
    elif fmt == "json":
        rows = json.loads(text)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    records = []
    for row in rows:
        nan_or = lambda v: math.nan if _to_float(v) is None else _to_float(v)  # noqa: E731
        records.append(CorrelationRecord(
            eta=float(row["eta"]),
            counts={k: int(row[f"N_{k}"]) for k in OUTCOME_LABELS},
            g=nan_or(row["g"]),
            E_mc=nan_or(row["E_mc"]),
            E_stderr=nan_or(row["E_stderr"]),
            E_oracle=_to_float(row["E_oracle"]),
            E_quantum=_to_float(row["E_quantum"]),
        ))
    return records


PLOT_TEMPLATE = '''"""Plot correlation against detector angle from {data}."""
import csv
import json
import os

import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, {data!r})

with open(DATA) as fh:
    rows = json.load(fh) if DATA.endswith(".json") else list(csv.DictReader(fh))


def col(name):
    return [float(r[name]) if r[name] not in (None, "") else float("nan") for r in rows]


eta = col("eta")
plt.errorbar(eta, col("E_mc"), yerr=[3 * s for s in col("E_stderr")], fmt=".", label="Monte Carlo")
plt.plot(eta, col("E_oracle"), "-", label="oracle")
plt.plot(eta, col("E_quantum"), "--", label="-cos(eta)")
plt.xlabel("eta_ab [rad]")
plt.ylabel("E(a, b)")
plt.title({title!r})
plt.legend()
plt.savefig(os.path.splitext(DATA)[0] + ".png", dpi=120)
'''


def plot_script(data_path: str, title: str = "correlation vs angle") -> str:
    return PLOT_TEMPLATE.format(data=os.path.basename(data_path), title=title)


def sidecar_path(data_path: str) -> str:
    stem, _ = os.path.splitext(data_path)
    return stem + "_plot.py"


def write_report(records, path: str, fmt: str = "csv", title: str = "correlation vs angle") -> tuple:
    """Write the data file and its plot-script sidecar; returns both paths."""
    content = emit_report(records, fmt)
    script = sidecar_path(path)
    try:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(content)
        with open(script, "w") as fh:
            fh.write(plot_script(path, title))
    except OSError as exc:
        raise ReportError(f"cannot write report to {path}: {exc}") from exc
    return path, script


def oracle_rows(grid, kappa: float) -> list:
    """Quadrature-only table: joint probabilities and correlations per angle."""
    rows = []
    for eta in grid:
        if kappa == 1.0:
            t = oracle.oracle_table(eta)
        else:
            opp = oracle.detection_overlap(eta, kappa)
            same = oracle.detection_overlap(math.pi - eta, kappa)
            t = oracle.ProbabilityTable(eta=eta, p_pm=opp, p_mp=opp, p_pp=same, p_mm=same)
        q = oracle.quantum_reference(eta)
        rows.append({
            "eta": float(eta), "p_pm": t.p_pm, "p_pp": t.p_pp,
            "q_pm": q.p_pm, "q_pp": q.p_pp,
            "E_oracle": oracle.correlation_from_probs(t), "E_quantum": -math.cos(eta),
        })
    return rows


def emit_oracle_report(rows, fmt: str = "csv") -> str:
    if not rows:
        raise ReportError("nothing to report")
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(v) for k, v in row.items()})
    return buf.getvalue()
