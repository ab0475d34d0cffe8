"""HTTP/JSON service for the interactive coverage-closure loop.

Serves read-only views of the latest coverage state (summary, point table,
curves, annotated source) plus two mutations: appending false-path entries
and synchronously re-running coverage with a different stimulus.  The FPD
file is the single source of truth for unreachability decisions; the
service only ever appends to it, and the next CLI run picks the entries up
from the file.  Mutations are serialized by a single writer lock.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.staticfiles import StaticFiles

from .circuit import CircuitError
from .engine import run_coverage, Stimulus, stimulus_frames
from .gif import FpdEntry, apply_fpd, glob_match
from .workbench import (DESIGN_FILE, FPD_FILE, coverage_report, pct_curve,
                        prepare, workspace_lock)

API_VERSION = 1


class Workspace:
    """In-memory view of one workspace directory, refreshed on mutations."""

    def __init__(self, root: Path, stimulus: str | None = None):
        self.root = Path(root)
        self.lock = threading.Lock()
        self.stimulus_path = stimulus
        self.curve_rows: list[dict] = []
        self.reload()

    # -- state ------------------------------------------------------------

    def reload(self):
        design = self.root / DESIGN_FILE
        if not design.exists():
            raise CircuitError("workspace", f"no {DESIGN_FILE} in {self.root}")
        fpd_path = self.root / FPD_FILE
        fpd_text = fpd_path.read_text() if fpd_path.exists() else None
        self.prep = prepare(design.read_text(), fpd_text)
        self.db = None
        self.report = None
        if self.stimulus_path:
            self._cover(self.stimulus_path)
        self._load_latest_curve()

    def _cover(self, stim_path: str):
        st = Stimulus.parse((self.root / stim_path).read_text())
        frames = stimulus_frames(self.prep.circuit, self.prep.reduced, st)
        self.db = run_coverage(self.prep.circuit, self.prep.reduced,
                               self.prep.universe, frames)
        self.report = coverage_report(self.prep.universe, self.db)

    def _load_latest_curve(self):
        """Pick up the correlation curve of the most recent report run."""
        self.curve_rows = []
        latest = self.root / "runs" / "latest.json"
        if not latest.exists():
            return
        try:
            run_id = json.loads(latest.read_text())["run_id"]
            csv = (self.root / "runs" / run_id / "curve.csv").read_text()
        except (OSError, KeyError, ValueError):
            return
        for line in csv.splitlines()[1:]:
            t, g, s = line.split(",")
            self.curve_rows.append({"cycle": int(t), "gifpo_pct": float(g),
                                    "stuckat_pct": float(s)})

    # -- views ------------------------------------------------------------

    def summary(self) -> dict:
        u = self.prep.universe
        covered = int(self.db.covered_count) if self.db is not None else 0
        open_n = u.open_count
        return {
            "api_version": API_VERSION,
            "circuit": self.prep.circuit.name,
            "total": u.total,
            "unreachable": u.unreachable_count,
            "open": open_n,
            "covered": covered,
            "percent": round(100.0 * covered / open_n, 4) if open_n else 100.0,
            "cycles": int(self.db.n_cycles) if self.db is not None else 0,
        }

    def point_records(self) -> list[dict]:
        if self.report is not None:
            return self.report["points"]
        u = self.prep.universe
        out = []
        for p in u.points:
            rec = u.describe(p)
            rec["status"] = {0: "open", 1: "unreachable-auto", 2: "unreachable-fpd"}[
                int(u.unreachable[p.index])]
            rec["first_cycle"] = None
            rec["po_alpha"] = None
            out.append(rec)
        return out


def make_app(root: Path, stimulus: str | None = None,
             static_dir: Path | None = None) -> FastAPI:
    ws = Workspace(Path(root), stimulus)
    app = FastAPI(title="gifpo coverage workbench", version=str(API_VERSION))
    app.state.workspace = ws

    @app.get("/api/summary")
    def get_summary():
        return ws.summary()

    @app.get("/api/points")
    def get_points(status: str | None = None, gate: str | None = None,
                   po: str | None = None, page: int = 0, page_size: int = 100):
        if page < 0 or page_size < 1 or page_size > 5000:
            raise HTTPException(400, "bad paging parameters")
        recs = ws.point_records()
        if status is not None:
            want = {"unreachable": ("unreachable-auto", "unreachable-fpd")}.get(
                status, (status,))
            recs = [r for r in recs if r["status"] in want]
        if gate is not None:
            recs = [r for r in recs if glob_match(r["gate"], gate)]
        if po is not None:
            recs = [r for r in recs if glob_match(r["po"], po)]
        lo = page * page_size
        return {"total_matched": len(recs), "page": page, "page_size": page_size,
                "items": recs[lo: lo + page_size]}

    @app.get("/api/curve")
    def get_curve():
        if ws.curve_rows:
            return {"source": "report", "rows": ws.curve_rows}
        if ws.db is None:
            return {"source": "none", "rows": []}
        u = ws.prep.universe
        rows = [{"cycle": t, "gifpo_pct": v, "stuckat_pct": None}
                for t, v in enumerate(pct_curve(ws.db.curve(), u.open_count))]
        return {"source": "coverage", "rows": rows}

    @app.get("/api/source")
    def get_source(gate: str = "*"):
        u = ws.prep.universe
        lines_hit: dict[int, list[str]] = {}
        for cell in ws.prep.reduced.cells:
            if cell.line and glob_match(cell.name, gate):
                lines_hit.setdefault(cell.line, []).append(cell.name)
        src = ws.prep.circuit.source.splitlines()
        items = [{"line": ln, "text": src[ln - 1] if 0 < ln <= len(src) else "",
                  "cells": sorted(set(cells))}
                 for ln, cells in sorted(lines_hit.items())]
        if not items:
            raise HTTPException(404, f"no cells match '{gate}'")
        return {"gate": gate, "lines": items}

    @app.post("/api/fpd")
    async def post_fpd(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(400, "body must be JSON") from None
        required = ("gate", "out", "m", "po")
        if not isinstance(body, dict) or any(k not in body for k in required):
            raise HTTPException(400, f"need fields {required}")
        entry = FpdEntry(str(body["gate"]), str(body["out"]), str(body["m"]),
                         str(body["po"]), str(body.get("reason", "")),
                         str(body.get("author", "")))
        with ws.lock:
            covered = None
            if ws.db is not None:
                covered = ws.db.first_cycle >= 0
            universe, rep = apply_fpd(ws.prep.universe, [entry], covered)
            if rep.rejected:
                raise HTTPException(409, rep.rejected[0][1])
            if rep.stale:
                raise HTTPException(404, "entry matches no universe point")
            fpd_path = ws.root / FPD_FILE
            with workspace_lock(ws.root):
                existing = fpd_path.read_text() if fpd_path.exists() else "# gifpo-fpd v1\n"
                fpd_path.write_text(existing.rstrip("\n") + "\n" + entry.format() + "\n")
            ws.prep.universe = universe
            if ws.db is not None:
                ws.db.universe = universe
                ws.report = coverage_report(universe, ws.db)
            return {"applied": [{"entry": e.format(), "points": n} for e, n in rep.applied],
                    "summary": ws.summary()}

    @app.post("/api/rerun")
    async def post_rerun(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(400, "body must be JSON") from None
        path = body.get("stimulus_path") if isinstance(body, dict) else None
        if not path:
            raise HTTPException(400, "need stimulus_path")
        target = ws.root / path
        if not target.exists():
            raise HTTPException(404, f"no stimulus file {path}")
        with ws.lock:
            try:
                ws.stimulus_path = path
                ws._cover(path)
            except CircuitError as e:
                raise HTTPException(400, str(e)) from None
            return ws.summary()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
