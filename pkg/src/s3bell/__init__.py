"""Event-by-event simulation of two local models of singlet spin correlations on S^3."""

from .constraint import CorrelationRecord, InitialState, ModelParams, run_trials
from .ga import Multivector3
from .harness import RunConfig, emit_report, run_experiment, sweep_kappa
from .oracle import ProbabilityTable, joint_prob_integral, quantum_reference

__version__ = "0.1.0"

__all__ = [
    "CorrelationRecord", "InitialState", "ModelParams", "Multivector3", "ProbabilityTable",
    "RunConfig", "emit_report", "joint_prob_integral", "quantum_reference", "run_experiment",
    "run_trials", "sweep_kappa",
]
