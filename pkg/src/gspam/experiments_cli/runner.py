"""Monte-Carlo studies: seeded trials over a grid of cells, written as CSV."""

import csv
import io
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..component_estimation import estimate_components
from ..core_model import build_model
from ..core_model.oracle import QueryLedger, QueryOracle, noise_from_config
from ..exceptions import GspamError
from ..structure_learning import ProblemParams, recover
from .config import ExperimentConfig

CSV_HEADER = ("study", "d", "k", "rho_m", "ctilde", "sigma2", "seed", "success", "queries", "wall_ms")
WORKERS_ENV = "GSPAM_WORKERS"


@dataclass
class TrialRecord:
    study: str
    d: int
    k: int
    rho_m: int
    ctilde: float
    sigma2: float
    seed: int
    success: bool
    queries: int
    wall_ms: float = None
    cell: int = 0
    per_phase: dict = field(default_factory=dict)
    error: str = None
    S1_hat: frozenset = None
    S2_hat: frozenset = None
    s2_match: bool = False

    def row(self, timing):
        wall = "" if not timing or self.wall_ms is None else f"{self.wall_ms:.1f}"
        return [self.study, self.d, self.k, self.rho_m, _fmt(self.ctilde), _fmt(self.sigma2),
                self.seed, int(self.success), self.queries, wall]


@dataclass
class StudyResult:
    records: list
    aggregates: list
    csv_text: str
    path: str = None

    def success_rate(self, cell=0):
        return self.aggregates[cell]["success"]


def _fmt(x):
    return format(float(x), ".10g")


def trial_seed(master, cell, trial):
    """Per-trial seed from ``(master, cell, trial)``."""
    return int(np.random.SeedSequence([int(master), int(cell), int(trial)]).generate_state(1)[0])


def _model_for(config, cell):
    # the T grid drives the family size; custom models ignore it
    tree = dict(config.model, d=cell.d)
    if "builtin" in tree:
        tree["T"] = cell.T
    return build_model(tree)


def _sigma2(block):
    return float(block.get("sigma2") or 0.0)


def run_trial(config, cell, trial):
    seed = trial_seed(config.seed, cell.index, trial)
    model = _model_for(config, cell)
    noise = noise_from_config(cell.noise)
    overrides = {k: cell.noise[k] for k in ("N1", "N2") if k in cell.noise}
    record = TrialRecord(config.study, cell.d, model.k, model.rho_m, cell.ctilde,
                         _sigma2(cell.noise), seed, False, 0, cell=cell.index)
    start = time.perf_counter()
    try:
        if config.study == "components":
            _components_trial(config, model, noise, seed, record)
        else:
            consts = {**model.constants, **config.constants}
            params = ProblemParams(k=max(model.k, 1), rho_m=max(model.rho_m, 1), **consts)
            result = recover(model, config.algorithm, cell.ctilde, noise, seed, params=params,
                             overrides=overrides or None, on_excess=config.on_excess,
                             solver=config.solver)
            record.success = result.matches(model)
            record.S1_hat, record.S2_hat = result.S1, result.S2
            record.s2_match = result.S2 == model.S2
            record.per_phase = result.ledger["per_phase"]
            if config.study == "scale_rho":
                # the rho study tracks the Hessian-row stage only
                record.queries = sum(v for ph, v in record.per_phase.items() if ph.endswith("stageA"))
            else:
                record.queries = result.total_queries
    except GspamError as exc:
        record.error = f"{type(exc).__name__}: {exc}"
    record.wall_ms = 1000.0 * (time.perf_counter() - start)
    return record


def _components_trial(config, model, noise, seed, record):
    opts = dict(config.components)
    tol = float(opts.pop("tolerance", 1e-2))
    ledger = QueryLedger()
    oracle = QueryOracle(model, noise, np.random.default_rng(seed), ledger)
    est = estimate_components(oracle, model.S1, model.S2, **opts)
    X = np.random.default_rng(seed).uniform(-1.0, 1.0, size=(100, model.d))
    err = float(np.max(np.abs(est.evaluate(X) - model.evaluate(X))))
    record.success = err <= tol
    record.queries = ledger.total_queries
    record.per_phase = ledger.per_phase


def _workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _aggregate(config, cell, records):
    flags = [r.success for r in records]
    return {
        "cell": cell.index, "d": cell.d, "k": records[0].k, "rho_m": records[0].rho_m,
        "ctilde": cell.ctilde, "sigma2": _sigma2(cell.noise),
        "success": float(np.mean(flags)),
        "queries": float(np.mean([r.queries for r in records])),
        "trials": len(records),
    }


def run_study(config, output=None):
    """Run every cell's trials and write the CSV.

    Rows come in (cell, trial) order followed by one aggregate row per cell
    (seed ``all``, success = mean of the trial flags, queries = mean).
    Trial failures raised by the algorithms count as unsuccessful trials.
    """
    if not isinstance(config, ExperimentConfig):
        config = ExperimentConfig.from_dict(config)
    cells = config.cells()
    jobs = [(cell, t) for cell in cells for t in range(config.trials)]
    workers = _workers()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_trial, config, cell, t) for cell, t in jobs]
            records = [f.result() for f in futures]
    else:
        records = [run_trial(config, cell, t) for cell, t in jobs]

    aggregates = []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(rec.row(config.timing))
    for cell in cells:
        agg = _aggregate(config, cell, [r for r in records if r.cell == cell.index])
        aggregates.append(agg)
        writer.writerow([config.study, agg["d"], agg["k"], agg["rho_m"], _fmt(agg["ctilde"]),
                         _fmt(agg["sigma2"]), "all", _fmt(agg["success"]), _fmt(agg["queries"]), ""])
    text = buf.getvalue()
    path = output or config.output
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return StudyResult(records, aggregates, text, path)
