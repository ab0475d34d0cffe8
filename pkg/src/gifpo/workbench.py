"""Flow orchestration: workspaces, run manifests and correlation reports.

A workspace is a plain directory: ``design.gnl``, stimulus files, an
append-only ``fpd.txt`` false-path database, and ``runs/<hash>/`` result
directories.  Everything persisted is text or JSON so the coverage-closure
loop stays inspectable and diffable.  Run identity is the hash of all
inputs; equal hashes reproduce equal summaries.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, gnl, tpg
from .circuit import Circuit, CircuitError
from .elaborate import BitCircuit, elaborate, reduce_circuit
from .engine import CoverageDB, Stimulus, run_coverage, stimulus_frames
from .gif import (FpdEntry, GifPoUniverse, apply_fpd, build_universe,
                  format_fpd, mark_unreachable_auto, parse_fpd, suggest_fpd)
from .stuckat import fault_simulate, remove_all_redundant
from .variants import SynthStyle, lower

FPD_FILE = "fpd.txt"
DESIGN_FILE = "design.gnl"
LOCK_FILE = ".lock"


def workspace_lock(workdir: Path):
    """Cross-process lock serializing CLI runs and service mutations."""
    from filelock import FileLock
    return FileLock(str(Path(workdir) / LOCK_FILE))

#: per-example flow parameters: stimulus source and default netlist style
RECIPES: dict[str, dict] = {
    "c1": {"gen": "exhaustive", "style": "twolevel"},
    "c2": {"gen": "exhaustive", "style": "ripple"},
    "add2": {"gen": "exhaustive", "style": "ripple"},
    "add4": {"gen": "exhaustive", "style": "ripple"},
    "add8": {"gen": "exhaustive", "style": "ripple"},
    "add64": {"gen": "sweep", "style": "aotree"},
    "mul3": {"gen": "exhaustive", "style": "ripple"},
    "mul4": {"gen": "exhaustive", "style": "ripple"},
    "mul8": {"gen": "exhaustive", "style": "aotree"},
    "muxtree": {"gen": "exhaustive", "style": "ripple"},
    "b01x": {"gen": "exhaustive", "style": "ripple"},
    "b02x": {"gen": "exhaustive", "style": "ripple"},
    "b06x": {"gen": "exhaustive", "style": "ripple"},
}


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class Prepared:
    """Parsed, elaborated and reduced design plus its point universe."""

    circuit: Circuit
    elaborated: BitCircuit
    reduced: BitCircuit
    universe: GifPoUniverse
    fpd_entries: list[FpdEntry] = field(default_factory=list)
    fpd_report: object = None


def prepare(text: str, fpd_text: str | None = None) -> Prepared:
    c = gnl.parse(text)
    bc = elaborate(c)
    red, _ = reduce_circuit(bc)
    u = build_universe(red)
    entries = []
    report = None
    if fpd_text:
        entries = parse_fpd(fpd_text)
        u, report = apply_fpd(u, entries)
    return Prepared(c, bc, red, u, entries, report)


def make_stimulus(c: Circuit, gen: str, n: int = 1024, seed: int = 1) -> Stimulus:
    if gen == "exhaustive":
        return tpg.gen_exhaustive(c)
    if gen == "sweep":
        return tpg.gen_bit_sweep(c)
    if gen == "random":
        return tpg.gen_random(c, n, seed)
    raise CircuitError("unknown-kind", f"unknown stimulus generator '{gen}'")


def coverage_report(u: GifPoUniverse, db: CoverageDB) -> dict:
    """JSON-ready coverage summary with per-point records and the curve."""
    status = []
    for p in u.points:
        if u.unreachable[p.index] == 1:
            s = "unreachable-auto"
        elif u.unreachable[p.index] == 2:
            s = "unreachable-fpd"
        elif db.first_cycle[p.index] >= 0:
            s = "covered"
        else:
            s = "open"
        rec = u.describe(p)
        rec["status"] = s
        rec["first_cycle"] = int(db.first_cycle[p.index]) if db.first_cycle[p.index] >= 0 else None
        rec["po_alpha"] = int(db.po_alpha[p.index]) if db.po_alpha[p.index] >= 0 else None
        status.append(rec)
    return {
        "universe": u.total,
        "unreachable": u.unreachable_count,
        "open": u.open_count,
        "covered": db.covered_count,
        "percent": round(db.percent, 4),
        "cycles": db.n_cycles,
        "contradictions": db.contradictions,
        "points": status,
        "curve": db.curve().tolist(),
    }


def correlation_curve(gif_pct: list[float], stuck_pct: list[float]) -> str:
    """CSV pairing the two cumulative coverage curves cycle by cycle."""
    if len(gif_pct) != len(stuck_pct):
        raise CircuitError("curve-mismatch",
                           f"curve lengths differ: {len(gif_pct)} vs {len(stuck_pct)}")
    lines = ["cycle,gifpo_pct,stuckat_pct"]
    for t, (g, s) in enumerate(zip(gif_pct, stuck_pct)):
        lines.append(f"{t},{g:.4f},{s:.4f}")
    return "\n".join(lines) + "\n"


def pct_curve(raw: np.ndarray, denom: int) -> list[float]:
    if denom <= 0:
        return [100.0] * len(raw)
    return [100.0 * int(v) / denom for v in raw]


@dataclass
class ReportResult:
    name: str
    run_id: str
    row: dict
    run_dir: Path | None
    coverage: dict
    curve_csv: str


def run_report(text: str, name: str, workdir: Path | None = None,
               gen: str | None = None, style: str | None = None,
               stimulus: Stimulus | None = None, seed: int = 1,
               auto_fpd: bool = True, block_frames: int = 4096) -> ReportResult:
    """Full flow for one design: coverage, selection, netlist fault sim, report.

    Produces a result-table row (universe size, redundant points, functional
    and selected cycle counts, both coverage percentages, netlist net count)
    plus the paired coverage-correlation curve, and persists everything
    under ``workdir/runs/<hash>/`` when a workspace is given.
    """
    recipe = RECIPES.get(name, {})
    gen = gen or recipe.get("gen", "exhaustive")
    style = style or recipe.get("style", "ripple")
    if workdir is not None:
        with workspace_lock(workdir):
            return _run_report_locked(text, name, workdir, gen, style, stimulus,
                                      seed, auto_fpd, block_frames)
    return _run_report_locked(text, name, None, gen, style, stimulus,
                              seed, auto_fpd, block_frames)


def _run_report_locked(text, name, workdir, gen, style, stimulus, seed,
                       auto_fpd, block_frames) -> ReportResult:
    fpd_text = None
    if workdir is not None and (workdir / FPD_FILE).exists():
        fpd_text = (workdir / FPD_FILE).read_text()
    prep = prepare(text, fpd_text)
    c, red, u = prep.circuit, prep.reduced, prep.universe

    st = stimulus if stimulus is not None else make_stimulus(c, gen, seed=seed)
    frames = stimulus_frames(c, red, st)
    db = run_coverage(c, red, u, frames, block_frames=block_frames)

    exhaustive = gen == "exhaustive" and stimulus is None
    suggestions = []
    if auto_fpd and exhaustive and db.covered_count < u.open_count:
        # suggest persistent entries for the auto-marked points, then mark
        suggestions = suggest_fpd(u, db.first_cycle >= 0,
                                  reason="uncovered under exhaustive stimulus",
                                  author="workbench")
        u = mark_unreachable_auto(u, db.first_cycle >= 0)
        db.universe = u

    sel = tpg.greedy_select(u, c, red, st, db)

    nl = lower(red, SynthStyle(style, seed=seed, steps=12))
    fres = fault_simulate(nl, frames, block_frames=block_frames)
    tie_logs = []
    if exhaustive and fres.detected_count < len(fres.faults):
        nl, tie_logs = remove_all_redundant(nl, block_frames=block_frames)
        fres = fault_simulate(nl, frames, block_frames=block_frames)

    sel_frames = stimulus_frames(c, nl, sel.stimulus)
    fres_sel = fault_simulate(nl, sel_frames, block_frames=block_frames)
    # closure loop: pull in full-run cycles for faults the selected set missed
    missed = [fi for fi, (ft, dt) in enumerate(zip(fres.first_cycle, fres_sel.first_cycle))
              if ft >= 0 and dt < 0]
    added: list[int] = []
    if missed:
        sel, added = tpg.augment_for_faults(sel, st, fres.first_cycle, missed)
        sel_frames = stimulus_frames(c, nl, sel.stimulus)
        fres_sel = fault_simulate(nl, sel_frames, block_frames=block_frames)

    gif_curve = pct_curve(db.curve(), u.open_count)
    stuck_curve = pct_curve(fres.curve(), len(fres.faults))
    curve_csv = correlation_curve(gif_curve, stuck_curve)

    row = {
        "name": name,
        "gifpo": u.total,
        "gifpo_redundant": u.unreachable_count,
        "functional_cycles": len(st),
        "pattern_rtl": len(sel),
        "coverage_gifpo_pct": round(db.percent, 2),
        "nets": len(nl.net_names),
        "netlist_style": style,
        "pattern_netlist": len(fres_sel.contributing_cycles()),
        "coverage_stuckat_pct": round(fres_sel.percent(len(fres.faults)), 2),
        "stuckat_faults": len(fres.faults),
        "ties": sum(len(t.ties) for t in tie_logs),
        "closure_cycles_added": len(added),
    }

    cov = coverage_report(u, db)
    run_id = _sha("\n".join([text, st.format(), fpd_text or "", style, gen, str(seed),
                             __version__]))[:12]
    run_dir = None
    if workdir is not None:
        run_dir = workdir / "runs" / run_id
        run_dir.mkdir(parents=True, exist_ok=True)
        (run_dir / "coverage.json").write_text(json.dumps(cov, indent=1) + "\n")
        (run_dir / "curve.csv").write_text(curve_csv)
        (run_dir / "row.json").write_text(json.dumps(row, indent=2) + "\n")
        manifest = {
            "run_id": run_id,
            "circuit_sha": _sha(text),
            "stimulus_sha": _sha(st.format()),
            "fpd_sha": _sha(fpd_text or ""),
            "tool_version": __version__,
            "seed": seed,
            "generator": gen,
            "netlist_style": style,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "summary": row,
        }
        (run_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
        latest = workdir / "runs" / "latest.json"
        latest.write_text(json.dumps({"run_id": run_id}) + "\n")
        if suggestions:
            (run_dir / "fpd-suggested.txt").write_text(format_fpd(suggestions))
    return ReportResult(name, run_id, row, run_dir, cov, curve_csv)


def format_row(row: dict) -> str:
    return (f"{row['name']:10s} gifpo={row['gifpo']:>6d} redundant={row['gifpo_redundant']:>5d} "
            f"cycles={row['functional_cycles']:>6d} pattern-rtl={row['pattern_rtl']:>5d} "
            f"gifpo%={row['coverage_gifpo_pct']:6.2f} nets={row['nets']:>6d} "
            f"pattern-netlist={row['pattern_netlist']:>5d} stuckat%={row['coverage_stuckat_pct']:6.2f}")


def init_workspace(workdir: Path, name: str) -> None:
    """Materialize a bundled example as a workspace directory."""
    from .macros import example_text
    workdir.mkdir(parents=True, exist_ok=True)
    (workdir / DESIGN_FILE).write_text(example_text(name))
    fpd = workdir / FPD_FILE
    if not fpd.exists():
        fpd.write_text("# gifpo-fpd v1\n")
    (workdir / "runs").mkdir(exist_ok=True)
