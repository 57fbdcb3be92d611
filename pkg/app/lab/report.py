"""Experiment commands: each returns an ExperimentReport and writes its artifacts."""

import csv
import logging
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from app.errors import InvalidP
from app.estimate.pnorm import pq_norm_lower
from app.lab.loader import file_digest, load_operand, map_to_dict, write_json
from app.lab.sample_data import write_samples
from app.lab.suites import SUITES, LabContext, significant
from app.linalg.core import INF
from app.models.schemas import ExperimentReport
from app.sdp.norms import cb_norm_inf, dec_norm_inf, dec_norm_one
from app.superop.superoperator import adjoint

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
TRUNCATION_FILE = "truncation.csv"
MATSAEV_FILE = "matsaev.csv"
AMPLIFIED_FILE = "amplified.csv"


def _p_label(p: float) -> str:
    return "inf" if p == INF else repr(p)


def write_csv(path: Union[str, Path], rows: Sequence[Dict[str, Any]]) -> Path:
    """Write dict rows with the keys of the first row as header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fields: List[str] = list(rows[0].keys()) if rows else []
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    logger.info(f"wrote {path}")
    return path


def write_report(path: Union[str, Path], report: ExperimentReport) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info(f"wrote {path}")
    return path


def _context_parameters(ctx: LabContext) -> Dict[str, Any]:
    return {
        "trials": ctx.trials,
        "restarts": ctx.restarts,
        "tol_scale": ctx.tol_scale,
        "quick": ctx.quick,
        "sdp": ctx.options.as_cvxopt(),
    }


def cmd_dec_norm(map_file: Union[str, Path], p: float, ctx: LabContext, out_dir: Optional[Union[str, Path]] = None) -> ExperimentReport:
    """Decomposable and cb norm of a map (or multiplier symbol) file.

    General maps are handled at p = ∞ and p = 1. For Fourier and Schur multiplier
    files the decomposable norm does not depend on p, so the ∞-level program answers
    every p.
    """
    start = time.perf_counter()
    t, _, kind = load_operand(map_file)
    if p not in (1.0, INF) and kind is None:
        raise InvalidP(f"decomposable norms of general maps are computed at p = 1 or p = inf, got {p}")
    if p == 1.0 and kind is None:
        dec = dec_norm_one(t, ctx.options)
        cb = cb_norm_inf(adjoint(t), ctx.options)
    else:
        dec = dec_norm_inf(t, ctx.options)
        cb = cb_norm_inf(t, ctx.options)

    results: Dict[str, Any] = {
        "dec_norm": significant(dec.value),
        "cb_norm": significant(cb.value),
        "certified": dec.certified and cb.certified,
        "multiplier": kind,
    }
    if out_dir is not None:
        witness = write_json(
            Path(out_dir) / "dec_witness.json",
            {"v1": map_to_dict(dec.v1, "v1"), "v2": map_to_dict(dec.v2, "v2")},
        )
        results["witness_file"] = str(witness)
    logger.info(f"{map_file}: dec={dec.value:.10g} cb={cb.value:.10g} (p={_p_label(p)})")
    return ExperimentReport(
        command="dec-norm",
        seed=ctx.seed,
        parameters={"map_file": str(map_file), "p": _p_label(p), **_context_parameters(ctx)},
        inputs_digest=file_digest(map_file),
        results=results,
        solutions=[dec.solution.to_record(), cb.solution.to_record()],
        wall_time_s=time.perf_counter() - start,
    )


def cmd_estimate(map_file: Union[str, Path], p: float, d: int, ctx: LabContext) -> ExperimentReport:
    """Replayable lower bound for ‖Id_{M_d} ⊗ T‖ on S^p."""
    start = time.perf_counter()
    t, algebra, _ = load_operand(map_file)
    estimate = pq_norm_lower(t, p, d=d, restarts=ctx.restarts, seed=ctx.seed, algebra=algebra)
    return ExperimentReport(
        command="estimate",
        seed=ctx.seed,
        parameters={"map_file": str(map_file), "p": _p_label(p), "d": d, "restarts": ctx.restarts},
        inputs_digest=file_digest(map_file),
        results={"value": significant(estimate.value), "estimate": estimate.to_record().model_dump()},
        wall_time_s=time.perf_counter() - start,
    )


def cmd_verify(suite: str, ctx: LabContext) -> ExperimentReport:
    """Run one battery."""
    start = time.perf_counter()
    battery = SUITES[suite](ctx)
    return ExperimentReport(
        command=f"verify {suite}",
        seed=ctx.seed,
        parameters={"suite": suite, **_context_parameters(ctx)},
        results=battery.results,
        tables=battery.tables,
        assertions=battery.assertions,
        solutions=battery.solutions,
        wall_time_s=time.perf_counter() - start,
    )


def cmd_report(out_dir: Union[str, Path], ctx: LabContext) -> ExperimentReport:
    """Run every battery and write report.json plus the truncation, Matsaev and amplified-norm CSV tables."""
    start = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = ExperimentReport(command="report", seed=ctx.seed, parameters=_context_parameters(ctx))
    for name, suite in SUITES.items():
        logger.info(f"running battery {name}")
        battery_start = time.perf_counter()
        battery = suite(ctx)
        elapsed = time.perf_counter() - battery_start
        logger.info(f"battery {name} finished in {elapsed:.1f}s")
        report.assertions.extend(battery.assertions)
        report.solutions.extend(battery.solutions)
        report.tables.update(battery.tables)
        report.results.update({f"{name}.{key}": value for key, value in battery.results.items()})
        report.results[f"{name}.passed"] = battery.passed
        report.results[f"{name}.wall_time_s"] = round(elapsed, 3)

    write_csv(out / TRUNCATION_FILE, report.tables.get("truncation", []))
    write_csv(out / MATSAEV_FILE, report.tables.get("matsaev", []))
    write_csv(out / AMPLIFIED_FILE, report.tables.get("amplified", []))
    report.wall_time_s = time.perf_counter() - start
    write_report(out / REPORT_FILE, report)
    return report


def cmd_samples(out_dir: Union[str, Path], ctx: LabContext) -> ExperimentReport:
    start = time.perf_counter()
    written = write_samples(out_dir)
    return ExperimentReport(
        command="samples",
        seed=ctx.seed,
        parameters={"out_dir": str(out_dir)},
        results={"files": [str(path) for path in written]},
        wall_time_s=time.perf_counter() - start,
    )
