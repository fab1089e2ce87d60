"""Budget-sweep experiments: publish, reconstruct at every level, score.

Each trial draws its own dataset and keys; the per-record noise and
message streams are keyed by trial (not by budget), so the same
underlying draws are rescaled across the epsilon grid and consecutive
grid points form matched pairs.  Cells are embarrassingly parallel:
every trial derives all of its randomness from (master seed, trial).
"""

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import pipeline, sensing
from .dataset import synthesize_dataset
from .embedding import build_coding_key
from .errors import InvalidConfigError, PrivsenseError
from .reconstruct import AuthorizationLevel
from .rng import CODING, DATASET, MEASUREMENT, SPLIT, SWEEP, RngStream
from .solver import SolverConfig
from .svm import SvmConfig, split_indices, train_test_rate

REPORT_FORMAT = "privsense-report 1"
REPORT_COLUMNS = ("epsilon", "level", "trial", "metric", "value")


def parse_sparsity_rule(rule: str, m: int) -> int:
    """Understand ``m/<k>`` (rounded, at least 1) or a literal integer."""
    text = str(rule).strip().lower()
    if text.startswith("m/"):
        divisor = float(text[2:])
        if divisor <= 0:
            raise InvalidConfigError(f"bad sparsity rule {rule!r}")
        return max(1, int(round(m / divisor)))
    return int(text)


@dataclass(frozen=True)
class ExperimentConfig:
    """Knobs of one sweep; defaults reproduce the reference regime
    (measurement rate 0.5, embedding rate 0.2, sparsity m/6)."""

    epsilons: tuple = (0.01, 0.05, 0.1, 0.4, 0.8, 1.6)
    trials: int = 20
    levels: tuple = ("l0", "l1", "l2")
    records: int = 200
    features: int = 64
    measurement_rate: float = 0.5
    embedding_rate: float = 0.2
    power_fraction: float = 0.1
    calibration: str = "calibrated"
    sparsity_rule: str = "m/6"
    embed: bool = True
    master_seed: int = 0
    train_fraction: float = 0.8
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidConfigError("trials must be >= 1")
        if not self.epsilons:
            raise InvalidConfigError("epsilon grid must be nonempty")
        for level in self.levels:
            AuthorizationLevel.parse(level)


@dataclass
class SweepResult:
    rows: list            # (epsilon, level, trial, metric, value)
    summary: dict
    failures: list = field(default_factory=list)


def _bit_error_rate(decoded: list[str], embedded: list[str]) -> float:
    total = wrong = 0
    for got, want in zip(decoded, embedded):
        total += len(want)
        wrong += sum(a != b for a, b in zip(got, want))
    return wrong / total if total else 0.0


def run_trial(config: ExperimentConfig, trial: int):
    """All epsilon cells of one trial; returns (rows, failures)."""
    root = RngStream(config.master_seed)
    rows = []
    failures = []
    levels = [AuthorizationLevel.parse(lv) for lv in config.levels]

    ensemble = sensing.build_ensemble(
        config.features, config.measurement_rate,
        root.child(MEASUREMENT, trial))
    sparsity = parse_sparsity_rule(config.sparsity_rule, ensemble.m)
    table = synthesize_dataset(config.records, config.features, sparsity,
                               root.child(DATASET, trial), labeled=True)

    coding_key = None
    if config.embed:
        clean_norms = np.linalg.norm(table.values @ ensemble.phi.T, axis=1)
        power_cap = config.power_fraction * float(np.median(clean_norms))
        coding_key = build_coding_key(ensemble.m, config.embedding_rate,
                                      power_cap, root.child(CODING, trial))

    train_idx, test_idx = split_indices(config.records, config.train_fraction,
                                        root.child(SPLIT, trial))
    svm_config = SvmConfig()
    solver_config = SolverConfig()

    for ei, epsilon in enumerate(config.epsilons):
        published = pipeline.publish_table(
            table.values, ensemble, coding_key, epsilon, config.calibration,
            root.child(SWEEP, trial), embed_messages=config.embed)
        delta = pipeline.delta_from_provenance(published.provenance)

        def emit(level, metric, value):
            rows.append((float(epsilon), level.value, trial, metric,
                         float(value)))

        for level in levels:
            try:
                if level == AuthorizationLevel.L0:
                    features = published.measurements
                else:
                    result = pipeline.reconstruct_table(
                        published.measurements, level, ensemble=ensemble,
                        coding_key=coding_key,
                        provenance=published.provenance, delta=delta,
                        config=solver_config)
                    features = result.x_star
                    mean_err, _ = pipeline.l2_error_metric(table.values,
                                                           features)
                    emit(level, "l2_error", mean_err)
                    emit(level, "solver_converged_frac",
                         float(np.mean(result.converged)))
                    if level == AuthorizationLevel.L2 \
                            and result.bits is not None \
                            and published.message_bits is not None:
                        emit(level, "bit_error_rate",
                             _bit_error_rate(result.bits,
                                             published.message_bits))
                if table.labels is not None:
                    rate = train_test_rate(features, table.labels,
                                           train_idx, test_idx, svm_config)
                    emit(level, "misclassification", rate)
            except PrivsenseError as exc:
                failures.append({"epsilon": float(epsilon),
                                 "level": level.value, "trial": trial,
                                 "error": f"{type(exc).__name__}: {exc}"})
    return rows, failures


def _run_trial_star(args):
    return run_trial(*args)


def run_sweep(config: ExperimentConfig) -> SweepResult:
    """Execute every (epsilon, level, trial) cell and aggregate."""
    tasks = [(config, trial) for trial in range(config.trials)]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            outcomes = list(pool.map(_run_trial_star, tasks))
    else:
        outcomes = [run_trial(*task) for task in tasks]

    rows = []
    failures = []
    for trial_rows, trial_failures in outcomes:
        rows.extend(trial_rows)
        failures.extend(trial_failures)
    eps_order = {float(e): i for i, e in enumerate(config.epsilons)}
    level_order = {lv: i for i, lv in enumerate(config.levels)}
    rows.sort(key=lambda r: (eps_order[r[0]], level_order[r[1]], r[2], r[3]))

    grouped = {}
    for epsilon, level, trial, metric, value in rows:
        grouped.setdefault((epsilon, level, metric), []).append(value)
    cells = []
    for (epsilon, level, metric), values in sorted(
            grouped.items(),
            key=lambda kv: (eps_order[kv[0][0]], level_order[kv[0][1]],
                            kv[0][2])):
        arr = np.asarray(values)
        stderr = float(arr.std(ddof=1) / np.sqrt(arr.size)) \
            if arr.size > 1 else 0.0
        cells.append({"epsilon": epsilon, "level": level, "metric": metric,
                      "mean": float(arr.mean()), "stderr": stderr,
                      "trials": int(arr.size)})
    summary = {
        "format": REPORT_FORMAT,
        "config": asdict(config),
        "cells": cells,
        "failures": failures,
    }
    return SweepResult(rows=rows, summary=summary, failures=failures)


def _atomic_write(path, text: str) -> None:
    tmp = str(path) + ".tmp"
    with open(tmp, "w", newline="") as handle:
        handle.write(text)
    os.replace(tmp, path)


def write_report_csv(result: SweepResult, path) -> None:
    """Tidy rows, one metric observation per line."""
    lines = [",".join(REPORT_COLUMNS)]
    for epsilon, level, trial, metric, value in result.rows:
        lines.append(f"{epsilon!r},{level},{trial},{metric},{value!r}")
    _atomic_write(path, "\n".join(lines) + "\n")


def write_summary_json(result: SweepResult, path) -> None:
    _atomic_write(path, json.dumps(result.summary, sort_keys=True, indent=2)
                  + "\n")


def summary_lookup(summary: dict):
    """Index the summary cells by (epsilon, level, metric)."""
    return {(c["epsilon"], c["level"], c["metric"]): c
            for c in summary["cells"]}
