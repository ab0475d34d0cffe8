"""Single stuck-at fault universe, fault simulation and redundancy removal.

Faults live on nets (fanout branches are not separate sites) and are not
collapsed, so reported counts track the net count directly.  A fault
(net, v) is detected in a frame when the good value of the net is ``!v`` and
complementing the net flips at least one primary output of that frame;
per-frame forcing is exactly permanent-fault behaviour for combinational
frames under full-scan semantics.

``remove_redundant`` ties nets whose faults are provably undetectable to the
constant that leaves the function unchanged, propagates the constants and
verifies the result by exhaustive equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import CircuitError
from .elaborate import CONST0, CONST1, BitCircuit, Cell, reduce_circuit
from .engine import WORD, PackedSim, _first_bit, exhaustive_frames, pack_frames


@dataclass(frozen=True)
class StuckAtFault:
    net: int
    name: str
    value: int

    @property
    def label(self) -> str:
        return f"{self.name}-{self.value}"


def enumerate_stuckat(bc: BitCircuit) -> list[StuckAtFault]:
    """Both stuck values for every net, including PI and PO nets."""
    return [StuckAtFault(n, bc.net_names[n], v)
            for n in range(len(bc.net_names)) for v in (0, 1)]


@dataclass
class FaultSimResult:
    bc: BitCircuit
    faults: list[StuckAtFault]
    n_cycles: int
    first_cycle: np.ndarray  # -1 when undetected

    @property
    def detected(self) -> np.ndarray:
        return self.first_cycle >= 0

    @property
    def detected_count(self) -> int:
        return int(self.detected.sum())

    def percent(self, of: int | None = None) -> float:
        denom = len(self.faults) if of is None else of
        return 100.0 if denom == 0 else 100.0 * self.detected_count / denom

    def curve(self) -> np.ndarray:
        counts = np.zeros(self.n_cycles, dtype=np.int64)
        for t in self.first_cycle[self.detected]:
            counts[t] += 1
        return np.cumsum(counts)

    def contributing_cycles(self) -> list[int]:
        return sorted(set(int(t) for t in self.first_cycle[self.detected]))

    def undetected_faults(self) -> list[StuckAtFault]:
        return [f for f, t in zip(self.faults, self.first_cycle) if t < 0]

    def detected_in_cycle(self, t: int) -> list[str]:
        return [f.label for f, ft in zip(self.faults, self.first_cycle) if ft == t]

    def merge(self, other: "FaultSimResult") -> "FaultSimResult":
        a, b = self.first_cycle, other.first_cycle
        take_b = (a < 0) | ((b >= 0) & (b < a))
        return FaultSimResult(self.bc, self.faults, max(self.n_cycles, other.n_cycles),
                              np.where(take_b, b, a))


def fault_simulate(bc: BitCircuit, frames: np.ndarray,
                   faults: list[StuckAtFault] | None = None,
                   block_frames: int = 4096) -> FaultSimResult:
    """Bit-parallel serial fault simulation over packed frame blocks.

    Each still-undetected net is complemented once per block and its cone
    re-simulated; both polarities of the net share that pass.  First
    detection cycles are recorded; detected faults drop out of later blocks.
    """
    if frames.shape[1] != len(bc.pis):
        raise CircuitError("width-mismatch",
                           f"frames provide {frames.shape[1]} bits, circuit has {len(bc.pis)}")
    faults = enumerate_stuckat(bc) if faults is None else faults
    sim = PackedSim(bc)
    first = np.full(len(faults), -1, dtype=np.int64)
    by_net: dict[int, list[int]] = {}
    for fi, f in enumerate(faults):
        by_net.setdefault(f.net, []).append(fi)

    offset = 0
    while offset < len(frames):
        count = min(block_frames, len(frames) - offset)
        pi_words, valid = pack_frames(frames, offset, count)
        vals = sim.eval_block(pi_words)
        for net, fidx in by_net.items():
            live = [fi for fi in fidx if first[fi] < 0]
            if not live:
                continue
            any_po = sim.obs_block(vals, net, valid, per_po=False)
            if not any_po.any():
                continue
            for fi in live:
                good_needed = vals[net] if faults[fi].value == 0 else ~vals[net]
                t = _first_bit(good_needed & any_po & valid)
                if t >= 0:
                    first[fi] = offset + t
        offset += count
    return FaultSimResult(bc, faults, len(frames), first)


def fault_simulate_parallel(bc: BitCircuit, frames: np.ndarray,
                            faults: list[StuckAtFault] | None = None,
                            workers: int = 4, block_frames: int = 4096) -> FaultSimResult:
    """Simulate independent fault batches on a thread pool and merge.

    Faults are independent given the good-machine values, so the universe is
    split into batches; the merged result equals the sequential reference.
    """
    from concurrent.futures import ThreadPoolExecutor

    faults = enumerate_stuckat(bc) if faults is None else faults
    n = max(1, (len(faults) + workers - 1) // workers)
    batches = [faults[i: i + n] for i in range(0, len(faults), n)]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(
            lambda batch: fault_simulate(bc, frames, batch, block_frames), batches))
    first = np.concatenate([p.first_cycle for p in parts])
    return FaultSimResult(bc, faults, len(frames), first)


def fault_simulate_frame(bc: BitCircuit, frame: list[int],
                         faults: list[StuckAtFault] | None = None) -> set[str]:
    """Scalar single-frame reference: labels of faults detected by the frame."""
    faults = enumerate_stuckat(bc) if faults is None else faults
    vals = bc.eval_frame(frame)
    good_po = bc.po_values(vals)
    hit: set[str] = set()
    for f in faults:
        if vals[f.net] != 1 - f.value:
            continue
        forced = list(vals)
        forced[f.net] = f.value
        for ci in bc.fanout_cells(f.net):
            c = bc.cells[ci]
            for o, v in zip(c.outs, bc.eval_cell(c, forced)):
                if o != f.net:  # the fault site stays forced
                    forced[o] = v
        if [forced[n] for n in bc.pos] != good_po:
            hit.add(f.label)
    return hit


# ---------------------------------------------------------------------------
# exhaustive equivalence


def exhaustive_equivalence(a: BitCircuit, b: BitCircuit,
                           block_frames: int = 4096) -> dict | None:
    """Compare two circuits on every frame; None if equal, else a counterexample.

    Requires identical PI and PO signatures and at most 20 frame bits.
    """
    if a.pi_names != b.pi_names or a.po_names != b.po_names:
        raise CircuitError("signature-mismatch",
                           f"PI/PO signatures differ: {a.pi_names}/{a.po_names} vs "
                           f"{b.pi_names}/{b.po_names}")
    n = len(a.pis)
    frames = exhaustive_frames(n)
    sa, sb = PackedSim(a), PackedSim(b)
    offset = 0
    while offset < len(frames):
        count = min(block_frames, len(frames) - offset)
        pi_words, valid = pack_frames(frames, offset, count)
        va = sa.eval_block(pi_words)
        vb = sb.eval_block(pi_words)
        diff = np.zeros(pi_words.shape[1], dtype=np.uint64)
        for na, nb in zip(a.pos, b.pos):
            diff |= va[na] ^ vb[nb]
        t = _first_bit(diff & valid)
        if t >= 0:
            w, bit = t // WORD, t % WORD
            vector = {name: int(frames[offset + t, k]) for k, name in enumerate(a.pi_names)}
            pos_a = {name: (int(va[net][w]) >> bit) & 1 for name, net in zip(a.po_names, a.pos)}
            pos_b = {name: (int(vb[net][w]) >> bit) & 1 for name, net in zip(b.po_names, b.pos)}
            return {"frame": offset + t, "vector": vector, "pos_a": pos_a, "pos_b": pos_b}
        offset += count
    return None


# ---------------------------------------------------------------------------
# redundancy removal


@dataclass
class TieLog:
    ties: list[tuple[str, int]] = field(default_factory=list)  # (net name, tied value)
    skipped: list[str] = field(default_factory=list)           # PI nets etc.
    removed_cells: list[str] = field(default_factory=list)


def remove_redundant(bc: BitCircuit, undetected: list[StuckAtFault]) -> tuple[BitCircuit, TieLog]:
    """Tie nets carrying undetectable faults to constants and simplify.

    A fault (net, v) that no input assignment detects means the circuit
    function is unchanged with the net held at v, so the net is tied to v
    (value 0 if both polarities are undetectable).  The reduced netlist is
    verified exhaustively equivalent to the input; a mismatch aborts with
    the counterexample vector, which catches wrongly asserted redundancies.
    """
    log = TieLog()
    tie: dict[int, int] = {}
    polarities: dict[int, set[int]] = {}
    for f in undetected:
        polarities.setdefault(f.net, set()).add(f.value)
    pi_set = set(bc.pis)
    for net, vs in sorted(polarities.items()):
        if net in pi_set:
            log.skipped.append(bc.net_names[net])
            continue
        tie[net] = 0 if vs == {0, 1} else vs.pop()

    if not tie:
        return bc, log

    cells = []
    for c in bc.cells:
        if len(c.outs) == 1 and c.outs[0] in tie:
            v = tie[c.outs[0]]
            cells.append(Cell(c.name, CONST1 if v else CONST0, c.outs, (), (), c.src, c.line))
            log.ties.append((bc.net_names[c.outs[0]], v))
        else:
            cells.append(c)
    tied = BitCircuit(bc.name, list(bc.net_names), cells, list(bc.pis), list(bc.pi_names),
                      list(bc.pos), list(bc.po_names), list(bc.regs), bc.source)
    reduced, rlog = reduce_circuit(tied)
    log.removed_cells = rlog.removed

    cex = exhaustive_equivalence(bc, reduced)
    if cex is not None:
        raise CircuitError(
            "tie-not-equivalent",
            f"tying {log.ties} changed the function; counterexample {cex['vector']}")
    return reduced, log


def remove_all_redundant(bc: BitCircuit, block_frames: int = 4096) -> tuple[BitCircuit, list[TieLog]]:
    """Iterate exhaustive fault simulation and tying until every fault is testable."""
    logs: list[TieLog] = []
    while True:
        frames = exhaustive_frames(len(bc.pis))
        res = fault_simulate(bc, frames, block_frames=block_frames)
        undet = [f for f in res.undetected_faults() if f.net not in set(bc.pis)]
        if not undet:
            return bc, logs
        bc, log = remove_redundant(bc, undet)
        logs.append(log)
