"""Gate-inherent fault classes and the per-primary-output coverage universe.

A gate-inherent fault is a sensitized input-to-output path of one cell: the
quadruple (gi, go, i, alpha) where ``i`` is the local input minterm and
``alpha`` the fault-free output value at that minterm.  Faults sharing
(go, i) are detected by exactly the same tests, so they are collapsed into
one :class:`GifClass`; the class is the unit that gets counted.

Each class is duplicated once per primary output in the structural fanout of
its gate output ("one point per (class, PO)"), producing the
:class:`GifPoUniverse` whose points the simulation engine covers.
"""

from __future__ import annotations

import fnmatch
import shlex
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuit import CircuitError
from .elaborate import (AND, BUF, CONST0, CONST1, FA, HA, INV, MUX, OR, XOR,
                        BitCircuit, Cell, out_names, pin_names)

# unreachable markers in GifPoUniverse.unreachable
OPEN, UNREACHABLE_AUTO, UNREACHABLE_FPD = 0, 1, 2


@dataclass(frozen=True)
class GifClass:
    """One collapsed fault class of a cell kind: (output, minterm) pair.

    ``members`` are the sensitized input pin positions (Boolean difference of
    the output with respect to that pin equals 1 at ``minterm``); ``labels``
    are per-pin display names in the conventional A1/B2 style.
    """

    out: int
    out_name: str
    minterm: int
    alpha: int
    members: tuple[int, ...]
    labels: tuple[str, ...]

    def minterm_str(self, n_ins: int) -> str:
        return format(self.minterm, f"0{n_ins}b")


def _cell_function(kind: str, n_ins: int, neg: tuple[bool, ...]):
    """Scalar truth function of a cell kind, returning all output bits."""
    def f(m: int) -> tuple[int, ...]:
        # pin 0 is the MSB of the minterm index
        vals = [(m >> (n_ins - 1 - k)) & 1 for k in range(n_ins)]
        for k, flag in enumerate(neg):
            if flag:
                vals[k] ^= 1
        if kind == BUF:
            return (vals[0],)
        if kind == INV:
            return (1 - vals[0],)
        if kind == AND:
            return (int(all(vals)),)
        if kind == OR:
            return (int(any(vals)),)
        if kind == XOR:
            return (vals[0] ^ vals[1],)
        if kind == MUX:
            s, a, b = vals
            return (b if s else a,)
        if kind == HA:
            a, b = vals
            return (a ^ b, a & b)
        if kind == FA:
            ci, a, b = vals
            return (a ^ b ^ ci, (a & b) | (a & ci) | (b & ci))
        raise CircuitError("unknown-kind", f"no truth function for {kind}")
    return f


@lru_cache(maxsize=None)
def enumerate_gifs(kind: str, n_ins: int | None = None,
                   neg: tuple[bool, ...] = ()) -> tuple[GifClass, ...]:
    """Exhaustively enumerate the fault classes of a cell kind.

    For every output and every local minterm where at least one input pin is
    sensitized, one class is produced with that member set and the fault-free
    output value as alpha.  Constants have no inputs and no classes.
    """
    if kind in (CONST0, CONST1):
        return ()
    if n_ins is None:
        n_ins = {BUF: 1, INV: 1, XOR: 2, MUX: 3, HA: 2, FA: 3}.get(kind, 2)
    if n_ins > 12:
        raise CircuitError("arity", f"{kind} with {n_ins} inputs exceeds the enumeration bound")
    neg = neg if neg else (False,) * n_ins
    f = _cell_function(kind, n_ins, neg)
    pins = pin_names(kind, n_ins)
    outs = out_names(kind, 2 if kind in (HA, FA) else 1)
    counters = {k: 0 for k in range(n_ins)}
    classes: list[GifClass] = []
    for oi, oname in enumerate(outs):
        for m in range(1 << n_ins):
            y = f(m)[oi]
            members = []
            for k in range(n_ins):
                flipped = m ^ (1 << (n_ins - 1 - k))
                if f(flipped)[oi] != y:
                    members.append(k)
            if not members:
                continue
            labels = []
            for k in members:
                counters[k] += 1
                labels.append(f"{pins[k][0].upper()}{counters[k]}")
            classes.append(GifClass(oi, oname, m, y, tuple(members), tuple(labels)))
    return tuple(classes)


def cell_classes(cell: Cell) -> tuple[GifClass, ...]:
    return enumerate_gifs(cell.kind, len(cell.ins), cell.neg if any(cell.negs()) else ())


@dataclass(frozen=True)
class GifFault:
    """Individual path fault (member of a class), kept for reporting."""

    cell: str
    gi: str
    go: str
    minterm: int
    alpha: int


@dataclass(frozen=True)
class GifPoint:
    """One coverage point: a fault class duplicated onto one primary output."""

    index: int
    cell: int      # cell index in the circuit
    cls: GifClass
    po: int        # PO position in BitCircuit.pos/po_names


class GifPoUniverse:
    """Dense, deterministically indexed list of (class, PO) coverage points.

    Point order is: cell order, then output pin, then minterm, then PO
    position, which makes indices stable across runs and platforms for a
    given circuit.
    """

    def __init__(self, bc: BitCircuit, points: list[GifPoint],
                 unreachable: np.ndarray | None = None):
        self.bc = bc
        self.points = points
        self.unreachable = (unreachable if unreachable is not None
                            else np.zeros(len(points), dtype=np.uint8))
        self.by_cell: dict[int, list[int]] = {}
        for p in points:
            self.by_cell.setdefault(p.cell, []).append(p.index)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def total(self) -> int:
        return len(self.points)

    @property
    def unreachable_count(self) -> int:
        return int((self.unreachable != OPEN).sum())

    @property
    def open_count(self) -> int:
        return self.total - self.unreachable_count

    def point_key(self, p: GifPoint) -> dict[str, str]:
        cell = self.bc.cells[p.cell]
        return {
            "gate": cell.name,
            "out": p.cls.out_name,
            "m": p.cls.minterm_str(len(cell.ins)),
            "po": self.bc.po_names[p.po],
        }

    def describe(self, p: GifPoint) -> dict:
        cell = self.bc.cells[p.cell]
        return {
            "index": p.index,
            **self.point_key(p),
            "kind": cell.kind,
            "members": list(p.cls.labels),
            "member_pins": [pin_names(cell.kind, len(cell.ins))[k] for k in p.cls.members],
            "alpha": p.cls.alpha,
            "src": cell.src,
            "line": cell.line,
        }

    def member_faults(self, p: GifPoint) -> list[GifFault]:
        cell = self.bc.cells[p.cell]
        pins = pin_names(cell.kind, len(cell.ins))
        return [GifFault(cell.name, pins[k], p.cls.out_name, p.cls.minterm, p.cls.alpha)
                for k in p.cls.members]

    def with_unreachable(self, marks: np.ndarray) -> "GifPoUniverse":
        return GifPoUniverse(self.bc, self.points, marks)

    def signature(self) -> list[tuple]:
        """Deterministic content signature (used by tests and manifests)."""
        return [(p.index, self.bc.cells[p.cell].name, p.cls.out_name, p.cls.minterm,
                 p.cls.alpha, p.cls.members, self.bc.po_names[p.po],
                 int(self.unreachable[p.index])) for p in self.points]


def build_universe(bc: BitCircuit) -> GifPoUniverse:
    """Build the coverage-point universe of a reduced elaborated circuit.

    Expects constant and open propagation to have run already; dangling
    cones would otherwise contribute points with an empty PO set anyway
    (they are skipped), but constants would contribute spurious classes.
    """
    points: list[GifPoint] = []
    for ci, cell in enumerate(bc.cells):
        classes = cell_classes(cell)
        if not classes:
            continue
        fanout = {oi: bc.fanout_pos(net) for oi, net in enumerate(cell.outs)}
        for cls in classes:
            for po in fanout[cls.out]:
                points.append(GifPoint(len(points), ci, cls, po))
    return GifPoUniverse(bc, points)


def adder_point_count(n: int) -> int:
    """Closed form for the universe size of an n-bit ripple adder."""
    return 4 + 11 * (n - 1) + 3 * (n - 1) * (n - 2)


# ---------------------------------------------------------------------------
# false path database

FPD_HEADER = "# gifpo-fpd v1"


@dataclass(frozen=True)
class FpdEntry:
    gate: str     # glob over cell names
    out: str      # output pin name
    m: str        # binary minterm string or "*"
    po: str       # glob over PO names
    reason: str
    author: str
    line: int = 0

    def format(self) -> str:
        return (f'unreachable gate={self.gate} out={self.out} m={self.m} po={self.po} '
                f'reason="{self.reason}" author="{self.author}"')


class FpdError(CircuitError):
    pass


def parse_fpd(text: str) -> list[FpdEntry]:
    entries: list[FpdEntry] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            toks = shlex.split(line)
        except ValueError as e:
            raise FpdError("fpd-syntax", f"{e}", ln) from None
        if not toks or toks[0] != "unreachable":
            raise FpdError("fpd-syntax", f"expected 'unreachable', got {toks[:1]}", ln)
        fields = {}
        for t in toks[1:]:
            if "=" not in t:
                raise FpdError("fpd-syntax", f"malformed field '{t}'", ln)
            k, v = t.split("=", 1)
            fields[k] = v
        missing = {"gate", "out", "m", "po"} - fields.keys()
        if missing:
            raise FpdError("fpd-syntax", f"missing fields {sorted(missing)}", ln)
        entries.append(FpdEntry(fields["gate"], fields["out"], fields["m"], fields["po"],
                                fields.get("reason", ""), fields.get("author", ""), ln))
    return entries


def format_fpd(entries: list[FpdEntry]) -> str:
    return "\n".join([FPD_HEADER] + [e.format() for e in entries]) + "\n"


def glob_match(value: str, pattern: str) -> bool:
    """Exact match first, then glob; keeps bracketed bit names literal."""
    return value == pattern or fnmatch.fnmatchcase(value, pattern)


@dataclass
class FpdReport:
    applied: list[tuple[FpdEntry, int]]   # entry and its matched point count
    stale: list[FpdEntry]                 # matched nothing
    rejected: list[tuple[FpdEntry, str]]  # e.g. covered points


def apply_fpd(universe: GifPoUniverse, entries: list[FpdEntry],
              covered: np.ndarray | None = None) -> tuple[GifPoUniverse, FpdReport]:
    """Mark matching open points unreachable.

    An entry that matches a covered point (when coverage data is supplied) is
    rejected -- a covered point cannot be a false path.  Entries matching no
    point are reported stale.  Points already unreachable stay as they are.
    """
    marks = universe.unreachable.copy()
    report = FpdReport(applied=[], stale=[], rejected=[])
    keys = [universe.point_key(p) for p in universe.points]
    for e in entries:
        hit = []
        bad = None
        for p, key in zip(universe.points, keys):
            if key["out"] != e.out and e.out != "*":
                continue
            if e.m not in ("*", key["m"]):
                continue
            if not glob_match(key["gate"], e.gate):
                continue
            if not glob_match(key["po"], e.po):
                continue
            if covered is not None and covered[p.index]:
                bad = key
                break
            hit.append(p.index)
        if bad is not None:
            report.rejected.append((e, f"covered point cannot be a false path: {bad}"))
            continue
        if not hit:
            report.stale.append(e)
            continue
        report.applied.append((e, len(hit)))
        for i in hit:
            if marks[i] == OPEN:
                marks[i] = UNREACHABLE_FPD
    return universe.with_unreachable(marks), report


def suggest_fpd(universe: GifPoUniverse, covered: np.ndarray, reason: str,
                author: str = "auto") -> list[FpdEntry]:
    """One exact entry per still-open, never-covered point (exhaustion rule)."""
    out = []
    for p in universe.points:
        if universe.unreachable[p.index] == OPEN and not covered[p.index]:
            k = universe.point_key(p)
            out.append(FpdEntry(k["gate"], k["out"], k["m"], k["po"], reason, author))
    return out


def mark_unreachable_auto(universe: GifPoUniverse, covered: np.ndarray) -> GifPoUniverse:
    """Mark every never-covered open point unreachable after an exhaustive run."""
    marks = universe.unreachable.copy()
    for p in universe.points:
        if marks[p.index] == OPEN and not covered[p.index]:
            marks[p.index] = UNREACHABLE_AUTO
    return universe.with_unreachable(marks)
