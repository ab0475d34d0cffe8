"""Stimulus sources, coverage-contributing cycle selection and compaction.

Selection keeps exactly the cycles that first-cover at least one point, in
stimulus order.  Compaction is greedy set cover (largest new contribution
first, ties broken by earliest cycle) followed by reverse-order elimination
of cycles made redundant by later picks; it never lowers the targeted
metric's coverage.  All generators are deterministic in their seeds.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .circuit import Circuit, CircuitError
from .elaborate import BitCircuit
from .engine import CoverageDB, Stimulus, run_coverage, stimulus_frames
from .gif import OPEN, GifPoUniverse
from .stuckat import StuckAtFault, enumerate_stuckat


@dataclass
class TestSet:
    """Ordered cycle subset of a source stimulus."""

    __test__ = False  # not a pytest class despite the name

    stimulus: Stimulus
    origin: list[int]                  # source cycle index per kept cycle
    metric: str = "gifpo"              # "gifpo" | "stuckat"
    coverage_pct: float = 0.0
    covered: int = 0
    target_total: int = 0

    def __len__(self) -> int:
        return len(self.stimulus.cycles)


def _port_columns(c: Circuit, scan: bool) -> list[str]:
    cols = [p.name for p in c.input_ports]
    if scan:
        cols += [r.instance for r in c.registers]
    return cols


def gen_exhaustive(c: Circuit) -> Stimulus:
    """All input (and state) combinations, ascending, first column is MSB.

    Sequential circuits get state-injection cycles: every (state, input)
    pair appears once, which makes never-covered points provably
    unreachable under frame semantics.
    """
    cols = _port_columns(c, scan=True)
    widths = [dict([(p.name, p.width) for p in c.input_ports]
                   + [(r.instance, c.nets[r.q]) for r in c.registers])[x] for x in cols]
    total_bits = sum(widths)
    if total_bits > 20:
        raise CircuitError("too-wide", f"{total_bits} bits exceed the exhaustive bound of 20")
    cycles = []
    for t in range(1 << total_bits):
        vals, shift = [], total_bits
        for w in widths:
            shift -= w
            vals.append((t >> shift) & ((1 << w) - 1))
        cycles.append(tuple(vals))
    return Stimulus(cols, cycles)


def gen_random(c: Circuit, n: int, seed: int, scan: bool | None = None) -> Stimulus:
    """n reproducible uniform cycles (state columns included when scan)."""
    if n < 1:
        raise CircuitError("arity", "need n >= 1 cycles")
    scan = bool(c.registers) if scan is None else scan
    cols = _port_columns(c, scan)
    widths = {p.name: p.width for p in c.input_ports}
    widths.update({r.instance: c.nets[r.q] for r in c.registers})
    rng = random.Random(seed)
    cycles = [tuple(rng.getrandbits(widths[x]) for x in cols) for _ in range(n)]
    return Stimulus(cols, cycles)


def gen_weighted(c: Circuit, n: int, seed: int, weights: dict[str, float] | float,
                 scan: bool | None = None) -> Stimulus:
    """Biased random: per-port probability of each bit being one."""
    if n < 1:
        raise CircuitError("arity", "need n >= 1 cycles")
    scan = bool(c.registers) if scan is None else scan
    cols = _port_columns(c, scan)
    wmap = {p.name: p.width for p in c.input_ports}
    wmap.update({r.instance: c.nets[r.q] for r in c.registers})
    rng = random.Random(seed)

    def prob(col: str) -> float:
        return weights if isinstance(weights, float) else weights.get(col, 0.5)

    cycles = []
    for _ in range(n):
        vals = []
        for col in cols:
            v = 0
            for i in range(wmap[col]):
                if rng.random() < prob(col):
                    v |= 1 << i
            vals.append(v)
        cycles.append(tuple(vals))
    return Stimulus(cols, cycles)


def gen_bit_sweep(c: Circuit, a_port: str = "a", b_port: str = "b") -> Stimulus:
    """Per-bit exhaustive patterns for two-operand adder-style circuits.

    For every bit position and local (carry, a, b) combination one cycle is
    produced: lower bits generate the wanted carry, upper bits are set to
    propagate (a=1, b=0), so a fault effect at any position is observable at
    every higher sum bit.  Reaches full coverage on ripple adder structures
    that plain random stimulus cannot close (distant carry observation has
    vanishing random probability).
    """
    widths = {p.name: p.width for p in c.input_ports}
    if a_port not in widths or b_port not in widths or widths[a_port] != widths[b_port]:
        raise CircuitError("width-mismatch", "bit sweep needs two equal-width input ports")
    n = widths[a_port]
    cols = [p.name for p in c.input_ports]
    seen = set()
    cycles = []
    high = lambda k: ((1 << n) - 1) ^ ((1 << (k + 1)) - 1)  # bits above k set
    for k in range(n):
        for m in range(8 if k else 4):
            ci, ak, bk = (m >> 2) & 1, (m >> 1) & 1, m & 1
            a = ak << k
            b = bk << k
            if ci and k:
                a |= 1 << (k - 1)
                b |= 1 << (k - 1)
            a |= high(k)  # propagate background above bit k
            vals = {a_port: a, b_port: b}
            cyc = tuple(vals.get(col, 0) for col in cols)
            if cyc not in seen:
                seen.add(cyc)
                cycles.append(cyc)
    return Stimulus(cols, cycles)


# ---------------------------------------------------------------------------
# selection and compaction


def greedy_select(universe: GifPoUniverse, c: Circuit, bc: BitCircuit,
                  stimulus: Stimulus, db: CoverageDB | None = None,
                  quintuples: bool = False) -> TestSet:
    """Keep exactly the cycles that add coverage, in stimulus order.

    With ``quintuples=True`` a cycle is also kept when it observes an
    already-covered point under the opposite fault-free output value, so the
    selected set witnesses every feasible (point, observed-value) pair; this
    is the claim-bearing selection (see the netlist variants test suite).
    """
    if db is None:
        db = run_coverage(c, bc, universe, stimulus)
    keep = db.alpha_contributing_cycles() if quintuples else db.contributing_cycles()
    sub = Stimulus(stimulus.columns, [stimulus.cycles[t] for t in keep])
    return TestSet(sub, keep, "gifpo", db.percent, db.covered_count, universe.open_count)


def _per_cycle_gifpo(universe: GifPoUniverse, c: Circuit, bc: BitCircuit,
                     ts: Stimulus) -> list[set[int]]:
    """Full per-cycle covered-point sets (not only first coverage)."""
    from .engine import cover_cycle
    frames = stimulus_frames(c, bc, ts)
    out = []
    for t in range(len(frames)):
        hit = cover_cycle(universe, bc, [int(x) for x in frames[t]])
        out.append({i for i in hit if universe.unreachable[i] == OPEN})
    return out


def _per_cycle_stuckat(nl: BitCircuit, c: Circuit, ts: Stimulus,
                       faults: list[StuckAtFault] | None = None) -> list[set[int]]:
    from .stuckat import enumerate_stuckat, fault_simulate_frame
    faults = enumerate_stuckat(nl) if faults is None else faults
    by_label = {f.label: i for i, f in enumerate(faults)}
    frames = stimulus_frames(c, nl, ts)
    out = []
    for t in range(len(frames)):
        labels = fault_simulate_frame(nl, [int(x) for x in frames[t]], faults)
        out.append({by_label[x] for x in labels})
    return out


def compact(ts: TestSet, c: Circuit, target: BitCircuit,
            metric: str = "gifpo", universe: GifPoUniverse | None = None,
            faults: list[StuckAtFault] | None = None) -> TestSet:
    """Greedy set-cover compaction preserving the achieved coverage exactly.

    ``target`` is the elaborated circuit (gifpo metric) or a gate netlist
    (stuckat metric).  Output cycles keep stimulus order.
    """
    if metric == "gifpo":
        if universe is None:
            raise CircuitError("arity", "gifpo compaction needs the universe")
        sets = _per_cycle_gifpo(universe, c, target, ts.stimulus)
        total = universe.open_count
    elif metric == "stuckat":
        faults = enumerate_stuckat(target) if faults is None else faults
        sets = _per_cycle_stuckat(target, c, ts.stimulus, faults)
        total = len(faults)
    else:
        raise CircuitError("unknown-kind", f"unknown metric {metric}")

    goal: set[int] = set()
    for s in sets:
        goal |= s
    chosen: list[int] = []
    left = set(goal)
    while left:
        best = max(range(len(sets)), key=lambda t: (len(sets[t] & left), -t))
        if not sets[best] & left:
            break
        chosen.append(best)
        left -= sets[best]
    chosen.sort()
    # reverse-order elimination of cycles covered by the rest
    for t in sorted(chosen, reverse=True):
        rest: set[int] = set()
        for o in chosen:
            if o != t:
                rest |= sets[o]
        if goal <= rest:
            chosen.remove(t)
    sub = Stimulus(ts.stimulus.columns, [ts.stimulus.cycles[t] for t in chosen])
    origin = [ts.origin[t] for t in chosen]
    pct = 100.0 * len(goal) / total if total else 100.0
    return TestSet(sub, origin, metric, pct, len(goal), total)


def augment_for_faults(ts: TestSet, source: Stimulus, full_first_cycle,
                       missed_fault_indices: list[int]) -> tuple[TestSet, list[int]]:
    """Close gate-level coverage gaps from the full-run detection data.

    For every fault the test set missed but the full stimulus detects, the
    fault's first detecting cycle is appended to the test set (the
    improve-the-testcases step of the closure loop).  Returns the augmented
    set and the list of source cycles added.
    """
    have = set(ts.origin)
    extra = sorted({int(full_first_cycle[fi]) for fi in missed_fault_indices
                    if full_first_cycle[fi] >= 0} - have)
    if not extra:
        return ts, []
    keep = sorted(have | set(extra))
    sub = Stimulus(source.columns, [source.cycles[t] for t in keep])
    return TestSet(sub, keep, ts.metric, ts.coverage_pct, ts.covered, ts.target_total), extra


def export(ts: TestSet, stim_path, manifest_path=None) -> None:
    """Write the stimulus file plus a JSON manifest of its provenance."""
    import pathlib
    stim_path = pathlib.Path(stim_path)
    stim_path.write_text(ts.stimulus.format())
    if manifest_path is None:
        manifest_path = stim_path.with_suffix(".json")
    manifest = {
        "cycles": len(ts),
        "origin_cycles": ts.origin,
        "metric": ts.metric,
        "coverage_pct": round(ts.coverage_pct, 4),
        "covered": ts.covered,
        "target_total": ts.target_total,
        "columns": ts.stimulus.columns,
    }
    pathlib.Path(manifest_path).write_text(json.dumps(manifest, indent=2) + "\n")
