"""Bit-parallel frame simulation, exact observability and coverage recording.

Frames (one combinational evaluation each) are packed 64 per machine word
and evaluated with numpy bitwise ops, one array per net.  Observability of a
net at a primary output is exact: the net is complemented and its fanout
cone re-evaluated; a PO observes the net in every frame where its value
flips.  Reconvergent fanout is therefore handled correctly.

Register q bits enter the frame as inputs and register d bits are captured
as outputs, so detection is per frame (full-scan semantics).  For functional
(non-scan) stimulus the register states are first derived sequentially, then
the resulting frames are simulated in packed blocks; packing is transparent,
block runs and per-frame runs produce identical coverage.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, CircuitError
from .elaborate import AND, BUF, CONST0, CONST1, FA, HA, INV, MUX, OR, XOR, BitCircuit, Cell
from .gif import OPEN, GifPoUniverse

WORD = 64
FULL = np.uint64(0xFFFFFFFFFFFFFFFF)

# ---------------------------------------------------------------------------
# stimulus


@dataclass
class Stimulus:
    """Ordered per-cycle input vectors.

    ``columns`` are input port names, optionally followed by register
    instance names (state-injection form).  Values are LSB-first unsigned
    words, one per column per cycle.
    """

    columns: list[str]
    cycles: list[tuple[int, ...]]

    def __len__(self) -> int:
        return len(self.cycles)

    @staticmethod
    def parse(text: str) -> "Stimulus":
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines or not lines[0].startswith("inputs"):
            raise CircuitError("stim-syntax", "stimulus must start with an 'inputs' header")
        columns = lines[0].split()[1:]
        cycles = []
        for ln in lines[1:]:
            vals = tuple(int(v, 16) for v in ln.split())
            if len(vals) != len(columns):
                raise CircuitError("stim-syntax",
                                   f"cycle {len(cycles)}: expected {len(columns)} values, got {len(vals)}")
            cycles.append(vals)
        if not cycles:
            raise CircuitError("stim-syntax", "stimulus needs at least one cycle")
        return Stimulus(columns, cycles)

    def format(self) -> str:
        out = ["inputs " + " ".join(self.columns)]
        for cyc in self.cycles:
            out.append(" ".join(f"{v:x}" for v in cyc))
        return "\n".join(out) + "\n"


def stimulus_frames(c: Circuit, bc: BitCircuit, st: Stimulus) -> np.ndarray:
    """Expand a stimulus into a frame-bit matrix, shape [cycles, len(bc.pis)].

    If the stimulus columns include every register instance the frames are
    taken verbatim (scan form); if they cover only the input ports, register
    state is evolved sequentially from the init values (functional form).
    """
    port_names = [p.name for p in c.input_ports]
    reg_names = [r.instance for r in c.registers]
    widths = {p.name: p.width for p in c.input_ports}
    widths.update({r.instance: c.nets[r.q] for r in c.registers})

    if list(st.columns[: len(port_names)]) != port_names:
        raise CircuitError("width-mismatch",
                           f"stimulus columns {st.columns} do not start with input ports {port_names}")
    extra = st.columns[len(port_names):]
    if extra and extra != reg_names:
        raise CircuitError("width-mismatch",
                           f"stimulus state columns {extra} do not match registers {reg_names}")
    scan = bool(extra) or not reg_names

    for cyc_i, cyc in enumerate(st.cycles):
        for name, v in zip(st.columns, cyc):
            if v >> widths[name]:
                raise CircuitError("width-mismatch",
                                   f"cycle {cyc_i}: value {v:#x} exceeds width of '{name}'")

    n_pis = len(bc.pis)
    frames = np.zeros((len(st.cycles), n_pis), dtype=bool)
    if scan:
        for t, cyc in enumerate(st.cycles):
            pos = 0
            for name, v in zip(st.columns, cyc):
                w = widths[name]
                for i in range(w):
                    frames[t, pos + i] = (v >> i) & 1
                pos += w
    else:
        state = {r.instance: r.init for r in c.registers}
        for t, cyc in enumerate(st.cycles):
            pi = dict(zip(st.columns, cyc))
            vals = c.eval_frame(pi, state)
            pos = 0
            for name in port_names:
                for i in range(widths[name]):
                    frames[t, pos + i] = (pi[name] >> i) & 1
                pos += widths[name]
            for r in c.registers:
                for i in range(widths[r.instance]):
                    frames[t, pos + i] = (vals[r.q] >> i) & 1
                pos += widths[r.instance]
            state = c.next_state(vals)
    return frames


def exhaustive_frames(n_bits: int) -> np.ndarray:
    """All 2**n frame vectors, ascending, first bit column counted as MSB."""
    if n_bits > 20:
        raise CircuitError("too-wide", f"{n_bits} frame bits exceed the exhaustive bound of 20")
    if n_bits == 0:
        return np.zeros((1, 0), dtype=bool)
    t = np.arange(1 << n_bits, dtype=np.uint32)
    cols = [(t >> (n_bits - 1 - k)) & 1 for k in range(n_bits)]
    return np.stack(cols, axis=1).astype(bool)


def pack_frames(frames: np.ndarray, offset: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Pack ``count`` frames starting at ``offset`` into uint64 words.

    Returns (pi_words[n_pis, W], valid_words[W]); frame ``offset + j`` maps
    to bit ``j % 64`` of word ``j // 64``.
    """
    chunk = frames[offset: offset + count]
    n, n_pis = chunk.shape
    w = (n + WORD - 1) // WORD
    pad = w * WORD - n
    if pad:
        chunk = np.vstack([chunk, np.zeros((pad, n_pis), dtype=bool)])
    bits = np.packbits(chunk.T.reshape(n_pis, w, WORD)[:, :, ::-1], axis=2)
    words = bits.view(">u8").reshape(n_pis, w).astype(np.uint64)
    valid = np.zeros(w, dtype=np.uint64)
    valid[: n // WORD] = FULL
    if n % WORD:
        valid[n // WORD] = np.uint64((1 << (n % WORD)) - 1)
    return words, valid


def _first_bit(mask: np.ndarray) -> int:
    """Index of the lowest set bit across the word array, or -1."""
    nz = np.nonzero(mask)[0]
    if nz.size == 0:
        return -1
    w = int(nz[0])
    v = int(mask[w])
    return w * WORD + ((v & -v).bit_length() - 1)


class PackedSim:
    """Evaluates packed frame blocks over a :class:`BitCircuit`."""

    def __init__(self, bc: BitCircuit):
        self.bc = bc
        self.level = {ci: pos for pos, ci in enumerate(bc.order)}

    def eval_block(self, pi_words: np.ndarray) -> np.ndarray:
        bc = self.bc
        w = pi_words.shape[1]
        vals = np.zeros((len(bc.net_names), w), dtype=np.uint64)
        for net, row in zip(bc.pis, pi_words):
            vals[net] = row
        for ci in bc.order:
            c = bc.cells[ci]
            for o, v in zip(c.outs, self._eval_cell(c, vals)):
                vals[o] = v
        return vals

    def _eval_cell(self, c: Cell, vals: np.ndarray) -> tuple[np.ndarray, ...]:
        k = c.kind
        w = vals.shape[1]
        if k == CONST0:
            return (np.zeros(w, dtype=np.uint64),)
        if k == CONST1:
            return (np.full(w, FULL, dtype=np.uint64),)
        ins = [vals[i] if not f else ~vals[i] for i, f in zip(c.ins, c.negs())]
        if k == BUF:
            return (ins[0].copy(),)
        if k == INV:
            return (~ins[0],)
        if k == AND:
            r = ins[0]
            for x in ins[1:]:
                r = r & x
            return (r,)
        if k == OR:
            r = ins[0]
            for x in ins[1:]:
                r = r | x
            return (r,)
        if k == XOR:
            return (ins[0] ^ ins[1],)
        if k == MUX:
            s, a, b = ins
            return ((a & ~s) | (b & s),)
        if k == HA:
            a, b = ins
            return (a ^ b, a & b)
        if k == FA:
            ci, a, b = ins
            p = a ^ b
            return (p ^ ci, (a & b) | (p & ci))
        raise CircuitError("unknown-kind", f"cell kind {k}")  # pragma: no cover

    def obs_block(self, vals: np.ndarray, net: int, valid: np.ndarray,
                  per_po: bool = True):
        """Exact observability of ``net`` for one evaluated block.

        Complements the net and re-evaluates its fanout cone, visiting only
        cells whose inputs actually changed.  Returns a dict mapping PO
        position to the frame mask where the flip is visible, or (with
        ``per_po=False``) a single any-output mask.
        """
        bc = self.bc
        over: dict[int, np.ndarray] = {net: ~vals[net]}
        heap: list[tuple[int, int]] = []
        queued: set[int] = set()
        for si in bc.sinks[net]:
            if si not in queued:
                queued.add(si)
                heapq.heappush(heap, (self.level[si], si))
        while heap:
            _, ci = heapq.heappop(heap)
            c = bc.cells[ci]
            if not any(i in over for i in c.ins):
                continue
            faulty = self._eval_cell_over(c, vals, over)
            for o, vf in zip(c.outs, faulty):
                diff = (vf ^ vals[o]) & valid
                if diff.any():
                    over[o] = vf
                    for si in bc.sinks[o]:
                        if si not in queued:
                            queued.add(si)
                            heapq.heappush(heap, (self.level[si], si))
        if per_po:
            out: dict[int, np.ndarray] = {}
            for j, po_net in enumerate(self.bc.pos):
                if po_net in over:
                    d = (over[po_net] ^ vals[po_net]) & valid
                    if d.any():
                        out[j] = d
            return out
        any_mask = np.zeros(vals.shape[1], dtype=np.uint64)
        for po_net in set(self.bc.pos):
            if po_net in over:
                any_mask |= (over[po_net] ^ vals[po_net])
        return any_mask & valid

    def _eval_cell_over(self, c: Cell, vals: np.ndarray, over: dict[int, np.ndarray]):
        k = c.kind
        ins = []
        for i, f in zip(c.ins, c.negs()):
            v = over.get(i)
            v = vals[i] if v is None else v
            ins.append(~v if f else v)
        if k == BUF:
            return (ins[0],)
        if k == INV:
            return (~ins[0],)
        if k == AND:
            r = ins[0]
            for x in ins[1:]:
                r = r & x
            return (r,)
        if k == OR:
            r = ins[0]
            for x in ins[1:]:
                r = r | x
            return (r,)
        if k == XOR:
            return (ins[0] ^ ins[1],)
        if k == MUX:
            s, a, b = ins
            return ((a & ~s) | (b & s),)
        if k == HA:
            a, b = ins
            return (a ^ b, a & b)
        if k == FA:
            ci, a, b = ins
            p = a ^ b
            return (p ^ ci, (a & b) | (p & ci))
        return tuple(vals[o] for o in c.outs)  # constants never change


# ---------------------------------------------------------------------------
# single-frame reference operations


def observability(bc: BitCircuit, frame: list[int], net: int) -> set[int]:
    """PO positions at which complementing ``net`` flips the value, one frame."""
    vals = bc.eval_frame(frame)
    flipped = list(vals)
    flipped[net] ^= 1
    # re-evaluate only the fanout cone of the net
    for ci in bc.fanout_cells(net):
        c = bc.cells[ci]
        for o, v in zip(c.outs, bc.eval_cell(c, flipped)):
            flipped[o] = v
    return {j for j, po_net in enumerate(bc.pos) if flipped[po_net] != vals[po_net]}


def cover_cycle(universe: GifPoUniverse, bc: BitCircuit, frame: list[int]) -> list[int]:
    """Indices of universe points whose conditions hold in this frame."""
    vals = bc.eval_frame(frame)
    hit: list[int] = []
    obs_cache: dict[int, set[int]] = {}
    for ci, idxs in universe.by_cell.items():
        cell = bc.cells[ci]
        n = len(cell.ins)
        m = 0
        for k, i in enumerate(cell.ins):
            m |= vals[i] << (n - 1 - k)
        for pi in idxs:
            p = universe.points[pi]
            if p.cls.minterm != m:
                continue
            go_net = cell.outs[p.cls.out]
            if go_net not in obs_cache:
                obs_cache[go_net] = observability(bc, frame, go_net)
            if p.po in obs_cache[go_net]:
                hit.append(pi)
    return hit


# ---------------------------------------------------------------------------
# coverage database


@dataclass
class CoverageDB:
    """Coverage state over a universe: first covering cycle per point.

    ``first_cycle`` is -1 for uncovered points; ``po_alpha`` records the
    fault-free PO value at the first covering cycle (the observed-output
    value of the detected fault quintuple).  ``alpha_first`` additionally
    holds the first cycle per (point, PO value) pair: a point whose gate
    output is observed under both output polarities yields two entries;
    infeasible polarities stay -1.  ``contradictions`` lists
    unreachable-marked points whose conditions nevertheless occurred.
    """

    universe: GifPoUniverse
    n_cycles: int
    first_cycle: np.ndarray
    po_alpha: np.ndarray
    alpha_first: np.ndarray  # shape [n, 2]
    contradictions: list[int] = field(default_factory=list)

    @staticmethod
    def empty(universe: GifPoUniverse, n_cycles: int = 0) -> "CoverageDB":
        n = len(universe)
        return CoverageDB(universe, n_cycles,
                          np.full(n, -1, dtype=np.int64),
                          np.full(n, -1, dtype=np.int8),
                          np.full((n, 2), -1, dtype=np.int64))

    @property
    def covered(self) -> np.ndarray:
        return (self.first_cycle >= 0) & (self.universe.unreachable == OPEN)

    @property
    def covered_count(self) -> int:
        return int(self.covered.sum())

    @property
    def percent(self) -> float:
        open_n = self.universe.open_count
        return 100.0 if open_n == 0 else 100.0 * self.covered_count / open_n

    def curve(self) -> np.ndarray:
        """Cumulative covered count after each cycle (length ``n_cycles``)."""
        counts = np.zeros(self.n_cycles, dtype=np.int64)
        fc = self.first_cycle[self.covered]
        for t in fc:
            counts[t] += 1
        return np.cumsum(counts)

    def contributing_cycles(self) -> list[int]:
        """Cycles that first-covered at least one point, ascending."""
        fc = self.first_cycle[self.covered]
        return sorted(set(int(t) for t in fc))

    def alpha_contributing_cycles(self) -> list[int]:
        """Cycles that first covered some (point, observed-value) pair.

        A superset of :meth:`contributing_cycles`: a cycle also counts when
        it observes an already-covered point under the opposite fault-free
        output value, completing the point's feasible quintuples.
        """
        keep = self.alpha_first[self.universe.unreachable == OPEN]
        return sorted(set(int(t) for t in keep.ravel() if t >= 0))

    def merge(self, other: "CoverageDB") -> "CoverageDB":
        """Union of two runs over the same universe and cycle numbering."""
        if other.universe is not self.universe and len(other.universe) != len(self.universe):
            raise CircuitError("merge-mismatch", "coverage merge over different universes")
        a, b = self.first_cycle, other.first_cycle
        take_b = (a < 0) | ((b >= 0) & (b < a))
        fc = np.where(take_b, b, a)
        pa = np.where(take_b, other.po_alpha, self.po_alpha)
        af_a, af_b = self.alpha_first, other.alpha_first
        take_ab = (af_a < 0) | ((af_b >= 0) & (af_b < af_a))
        af = np.where(take_ab, af_b, af_a)
        out = CoverageDB(self.universe, max(self.n_cycles, other.n_cycles), fc, pa, af,
                         sorted(set(self.contradictions) | set(other.contradictions)))
        return out


def run_coverage_parallel(c: Circuit, bc: BitCircuit, universe: GifPoUniverse,
                          stimulus: Stimulus | np.ndarray, workers: int = 4,
                          block_frames: int = 4096) -> CoverageDB:
    """Evaluate frame blocks on a thread pool and merge the worker databases.

    Frames are derived first (the sequential state pass for functional
    stimulus), then split into contiguous chunks simulated independently;
    the merged union equals the sequential reference by construction of
    :meth:`CoverageDB.merge`.
    """
    from concurrent.futures import ThreadPoolExecutor

    frames = stimulus if isinstance(stimulus, np.ndarray) else stimulus_frames(c, bc, stimulus)
    chunk = max(block_frames, (len(frames) + workers - 1) // workers)
    spans = [(lo, min(lo + chunk, len(frames))) for lo in range(0, len(frames), chunk)]

    def job(span):
        lo, hi = span
        db = run_coverage(c, bc, universe, frames[lo:hi], block_frames=block_frames)
        db.first_cycle[db.first_cycle >= 0] += lo
        db.alpha_first[db.alpha_first >= 0] += lo
        db.n_cycles = len(frames)
        return db

    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(job, spans))
    out = parts[0]
    for part in parts[1:]:
        out = out.merge(part)
    out.n_cycles = len(frames)
    return out


def run_coverage(c: Circuit, bc: BitCircuit, universe: GifPoUniverse,
                 stimulus: Stimulus | np.ndarray, block_frames: int = 4096) -> CoverageDB:
    """Simulate a stimulus and record per-point first covering cycles.

    ``stimulus`` may be a parsed :class:`Stimulus` or a prebuilt frame
    matrix.  Registers carry state between cycles for functional stimulus;
    each frame is then scored independently.
    """
    frames = stimulus if isinstance(stimulus, np.ndarray) else stimulus_frames(c, bc, stimulus)
    if frames.shape[1] != len(bc.pis):
        raise CircuitError("width-mismatch",
                           f"frames provide {frames.shape[1]} bits, circuit has {len(bc.pis)}")
    db = CoverageDB.empty(universe, len(frames))
    sim = PackedSim(bc)
    contradictions: set[int] = set()

    # group points per cell/class so masks are computed once per block
    groups = []
    for ci, idxs in sorted(universe.by_cell.items()):
        cell = bc.cells[ci]
        per_cls: dict[tuple[int, int], list] = {}
        for pi in idxs:
            p = universe.points[pi]
            per_cls.setdefault((p.cls.out, p.cls.minterm), []).append(p)
        groups.append((ci, cell, per_cls))

    offset = 0
    while offset < len(frames):
        count = min(block_frames, len(frames) - offset)
        pi_words, valid = pack_frames(frames, offset, count)
        vals = sim.eval_block(pi_words)
        obs: dict[int, dict[int, np.ndarray]] = {}
        for ci, cell, per_cls in groups:
            pending = [(key, pts) for key, pts in per_cls.items()
                       if any(db.alpha_first[p.index, 0] < 0
                              or db.alpha_first[p.index, 1] < 0 for p in pts)]
            if not pending:
                continue
            n = len(cell.ins)
            for (out_pos, minterm), pts in pending:
                go_net = cell.outs[out_pos]
                if go_net not in obs:
                    obs[go_net] = sim.obs_block(vals, go_net, valid)
                match = valid.copy()
                for k, i in enumerate(cell.ins):
                    bit = (minterm >> (n - 1 - k)) & 1
                    match &= vals[i] if bit else ~vals[i]
                if not match.any():
                    continue
                for p in pts:
                    if db.alpha_first[p.index, 0] >= 0 and db.alpha_first[p.index, 1] >= 0:
                        continue
                    po_mask = obs[go_net].get(p.po)
                    if po_mask is None:
                        continue
                    m = match & po_mask
                    if not m.any():
                        continue
                    po_vals = vals[universe.bc.pos[p.po]]
                    for alpha in (0, 1):
                        if db.alpha_first[p.index, alpha] >= 0:
                            continue
                        t = _first_bit(m & (po_vals if alpha else ~po_vals))
                        if t < 0:
                            continue
                        db.alpha_first[p.index, alpha] = offset + t
                        if universe.unreachable[p.index] != OPEN:
                            contradictions.add(p.index)
                        if db.first_cycle[p.index] < 0 or offset + t < db.first_cycle[p.index]:
                            db.first_cycle[p.index] = offset + t
                            db.po_alpha[p.index] = alpha
        offset += count
    db.contradictions = sorted(contradictions)
    return db
