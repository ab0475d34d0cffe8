"""Bit-level circuits and the word-to-bit decomposition.

:class:`BitCircuit` is the common single-bit-net representation used for
gate-inherent-fault enumeration (cell library includes half/full adders and
muxes) and for plain gate netlists (restricted to AND/OR/XOR/INV/BUF/CONST).
AND/OR cells are n-ary and may carry per-input inversion bubbles; bubbles do
not create nets and therefore no fault sites.

``elaborate`` lowers a word-level :class:`~gifpo.circuit.Circuit` using a
fixed, deterministic policy:

* bitwise n-ary ops become balanced trees of 2-input cells (left-to-right
  pairing),
* ``mux2`` becomes per-bit 1-bit muxes,
* ``eq`` becomes per-bit XOR + INV + an AND tree, ``lt`` a ripple borrow
  chain,
* ``add``/``sub`` become a half adder at bit 0 plus a full-adder chain
  (the carry out of the top bit is left dangling),
* ``assign`` becomes BUF cells (which are fault sites),
* shifts, slices and concatenations are pure wiring and create no cells.

Register q bits are treated as frame inputs and register d bits as frame
outputs (full-scan frame semantics).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import Circuit, CircuitError, GateInstance, GateKind, WIRING_KINDS
from . import gnl

# cell kinds
CONST0, CONST1, BUF, INV, AND, OR, XOR, MUX, HA, FA = (
    "const0", "const1", "buf", "inv", "and", "or", "xor", "mux", "ha", "fa")

#: kinds allowed in plain gate netlists (fault-simulation side)
NETLIST_KINDS = frozenset({CONST0, CONST1, BUF, INV, AND, OR, XOR})

#: declared input pin names per kind; n-ary kinds extend A, B, C, ...
PIN_NAMES = {
    BUF: ("A",), INV: ("A",),
    AND: ("A", "B"), OR: ("A", "B"), XOR: ("A", "B"),
    MUX: ("S", "A", "B"),
    HA: ("A", "B"),
    FA: ("CI", "A", "B"),
    CONST0: (), CONST1: (),
}

#: declared output pin names per kind
OUT_NAMES = {HA: ("S", "CO"), FA: ("S", "CO")}


def pin_names(kind: str, n: int) -> tuple[str, ...]:
    base = PIN_NAMES[kind]
    if len(base) >= n:
        return base[:n]
    # n-ary and/or: A, B, C, ... following the pin position
    return tuple(chr(ord("A") + i) for i in range(n))


def out_names(kind: str, n: int) -> tuple[str, ...]:
    return OUT_NAMES.get(kind, ("Y",))[:n]


@dataclass(frozen=True)
class Cell:
    name: str
    kind: str
    outs: tuple[int, ...]
    ins: tuple[int, ...]
    neg: tuple[bool, ...] = ()
    src: str = ""    # word-level gate / port the cell came from
    line: int = 0    # source line in the GNL text

    def negs(self) -> tuple[bool, ...]:
        return self.neg if self.neg else (False,) * len(self.ins)


@dataclass(frozen=True)
class BitReg:
    name: str
    q: int
    d: int
    init: int  # 0/1


def eval_cell_values(c: Cell, val) -> tuple:
    """Evaluate one cell over 0/1 values indexed by net id (dict or list)."""
    ins = [val[i] for i in c.ins]
    for k, f in enumerate(c.negs()):
        if f:
            ins[k] ^= 1
    k = c.kind
    if k == CONST0:
        return (0,)
    if k == CONST1:
        return (1,)
    if k == BUF:
        return (ins[0],)
    if k == INV:
        return (1 - ins[0],)
    if k == AND:
        return (int(all(ins)),)
    if k == OR:
        return (int(any(ins)),)
    if k == XOR:
        return (ins[0] ^ ins[1],)
    if k == MUX:
        s, a, b = ins
        return (b if s else a,)
    if k == HA:
        a, b = ins
        return (a ^ b, a & b)
    if k == FA:
        ci, a, b = ins
        return (a ^ b ^ ci, (a & b) | (a & ci) | (b & ci))
    raise CircuitError("unknown-kind", f"cell kind {k}")  # pragma: no cover


class BitCircuit:
    """Immutable single-bit-net circuit with levelized cells.

    ``pis``/``pos`` are ordered net-id lists; their display names live in
    ``pi_names``/``po_names`` (a PO may alias a PI net, and two POs may share
    one net).  Register q nets are included in ``pis`` and d nets in ``pos``.
    """

    def __init__(self, name: str, net_names: list[str], cells: list[Cell],
                 pis: list[int], pi_names: list[str],
                 pos: list[int], po_names: list[str],
                 regs: list[BitReg], source: str = ""):
        self.name = name
        self.net_names = net_names
        self.cells = cells
        self.pis = pis
        self.pi_names = pi_names
        self.pos = pos
        self.po_names = po_names
        self.regs = regs
        self.source = source
        self._index()

    def _index(self):
        n = len(self.net_names)
        if len(set(self.net_names)) != n:
            dup = sorted({x for x in self.net_names if self.net_names.count(x) > 1})
            raise CircuitError("redeclared-net", f"duplicate bit net names: {dup[:5]}")
        driver: list[tuple[int, int] | None] = [None] * n  # net -> (cell idx, out position)
        for ci, c in enumerate(self.cells):
            for oi, o in enumerate(c.outs):
                if driver[o] is not None:
                    raise CircuitError("multiple-drivers", f"net '{self.net_names[o]}' driven twice")
                driver[o] = (ci, oi)
        for p in self.pis:
            if driver[p] is not None:
                raise CircuitError("multiple-drivers", f"input net '{self.net_names[p]}' also driven by a cell")
        self.driver = driver
        self.sinks: list[list[int]] = [[] for _ in range(n)]
        for ci, c in enumerate(self.cells):
            for i in c.ins:
                self.sinks[i].append(ci)
        self.order = self._levelize()
        # structural fanout: net -> ordered tuple of reachable PO positions
        self._po_pos: dict[int, list[int]] = {}
        for j, net in enumerate(self.pos):
            self._po_pos.setdefault(net, []).append(j)

    def _levelize(self) -> list[int]:
        order: list[int] = []
        # Kahn's algorithm over cells; inputs from PIs count as satisfied.
        remaining: dict[int, int] = {}
        for ci, c in enumerate(self.cells):
            need = sum(1 for i in c.ins if self.driver[i] is not None)
            remaining[ci] = need
        queue = [ci for ci, need in remaining.items() if need == 0]
        emitted = [False] * len(self.cells)
        qi = 0
        queue.sort()
        while qi < len(queue):
            ci = queue[qi]
            qi += 1
            if emitted[ci]:
                continue
            emitted[ci] = True
            order.append(ci)
            for o in self.cells[ci].outs:
                for si in self.sinks[o]:
                    remaining[si] -= 1
                    if remaining[si] == 0:
                        queue.append(si)
        if len(order) != len(self.cells):
            raise CircuitError("combinational-cycle", "cell graph has a cycle")
        return order

    # -- queries -----------------------------------------------------------

    def fanout_pos(self, net: int) -> list[int]:
        """PO positions structurally reachable from ``net`` (ascending)."""
        seen_nets = {net}
        stack = [net]
        pos: set[int] = set(self._po_pos.get(net, ()))
        while stack:
            cur = stack.pop()
            for ci in self.sinks[cur]:
                for o in self.cells[ci].outs:
                    if o not in seen_nets:
                        seen_nets.add(o)
                        stack.append(o)
                        pos.update(self._po_pos.get(o, ()))
        return sorted(pos)

    def fanout_cells(self, net: int) -> list[int]:
        """Cells in the transitive fanout cone of ``net``, in level order."""
        seen_nets = {net}
        affected: set[int] = set()
        stack = [net]
        while stack:
            cur = stack.pop()
            for ci in self.sinks[cur]:
                if ci not in affected:
                    affected.add(ci)
                    for o in self.cells[ci].outs:
                        if o not in seen_nets:
                            seen_nets.add(o)
                            stack.append(o)
        return [ci for ci in self.order if ci in affected]

    def stats(self) -> dict[str, int]:
        kinds: dict[str, int] = {}
        for c in self.cells:
            kinds[c.kind] = kinds.get(c.kind, 0) + 1
        return {"nets": len(self.net_names), "cells": len(self.cells),
                "pis": len(self.pis), "pos": len(self.pos), **kinds}

    # -- scalar evaluation (reference path; the packed engine lives in engine.py)

    def eval_cell(self, c: Cell, val) -> tuple:
        return eval_cell_values(c, val)

    def eval_frame(self, pi_bits: list[int]) -> list[int]:
        """Evaluate all nets for one frame; ``pi_bits`` follows ``pis`` order."""
        if len(pi_bits) != len(self.pis):
            raise CircuitError("width-mismatch",
                               f"expected {len(self.pis)} frame bits, got {len(pi_bits)}")
        val = [0] * len(self.net_names)
        for net, v in zip(self.pis, pi_bits):
            val[net] = v & 1
        for ci in self.order:
            c = self.cells[ci]
            for o, v in zip(c.outs, self.eval_cell(c, val)):
                val[o] = v
        return val

    def po_values(self, val: list[int]) -> list[int]:
        return [val[n] for n in self.pos]


class _Builder:
    def __init__(self, name: str, source: str = ""):
        self.name = name
        self.source = source
        self.net_names: list[str] = []
        self.net_ids: dict[str, int] = {}
        self.cells: list[Cell] = []
        self.pis: list[int] = []
        self.pi_names: list[str] = []
        self.pos: list[int] = []
        self.po_names: list[str] = []
        self.regs: list[BitReg] = []
        self._consts: dict[int, int] = {}

    def net(self, name: str) -> int:
        if name in self.net_ids:
            raise CircuitError("redeclared-net", f"bit net '{name}' created twice")
        nid = len(self.net_names)
        self.net_names.append(name)
        self.net_ids[name] = nid
        return nid

    def cell(self, kind: str, name: str, outs: tuple[int, ...], ins: tuple[int, ...],
             neg: tuple[bool, ...] = (), src: str = "", line: int = 0):
        self.cells.append(Cell(name, kind, outs, ins, neg, src, line))
        return outs

    def const(self, bit: int, src: str = "") -> int:
        if bit in self._consts:
            return self._consts[bit]
        nid = self.net(f"const{bit}")
        self.cell(CONST1 if bit else CONST0, f"const{bit}", (nid,), (), src=src)
        self._consts[bit] = nid
        return nid

    def finish(self) -> BitCircuit:
        return BitCircuit(self.name, self.net_names, self.cells,
                          self.pis, self.pi_names, self.pos, self.po_names,
                          self.regs, self.source)


def _bit_name(net: str, i: int, width: int) -> str:
    return net if width == 1 else f"{net}[{i}]"


def elaborate(c: Circuit) -> BitCircuit:
    """Lower a word-level circuit to its primitive-cell decomposition.

    The result is functionally equivalent to ``c`` on every input and state
    assignment and carries provenance (``Cell.src``/``Cell.line``) back to
    the word-level gates.
    """
    b = _Builder(c.name, c.source)
    bits: dict[str, list[int]] = {}

    for p in c.input_ports:
        ids = []
        for i in range(p.width):
            nid = b.net(_bit_name(p.name, i, p.width))
            ids.append(nid)
            b.pis.append(nid)
            b.pi_names.append(_bit_name(p.name, i, p.width))
        bits[p.name] = ids
    for r in c.registers:
        w = c.nets[r.q]
        ids = []
        for i in range(w):
            nid = b.net(_bit_name(r.q, i, w))
            ids.append(nid)
            b.pis.append(nid)
            b.pi_names.append(_bit_name(r.q, i, w))
        bits[r.q] = ids
    for net, val in c.consts.items():
        bits[net] = [b.const((val >> i) & 1, src=f"const:{net}") for i in range(c.nets[net])]

    for g in c._topo:
        if gnl.bubbles(c, g.instance) and any(gnl.bubbles(c, g.instance)):
            raise CircuitError("bubble-unsupported",
                               f"gate {g.instance}: input bubbles are only valid in primitive netlists",
                               g.line)
        _lower_gate(b, c, g, bits)

    for p in c.output_ports:
        for i in range(p.width):
            b.pos.append(bits[p.name][i])
            b.po_names.append(_bit_name(p.name, i, p.width))
    for r in c.registers:
        w = c.nets[r.d]
        for i in range(w):
            bit = _bit_name(r.instance, i, w)
            b.pos.append(bits[r.d][i])
            b.po_names.append(f"{bit}.d")
            b.regs.append(BitReg(bit, bits[r.q][i], bits[r.d][i], (r.init >> i) & 1))
    return b.finish()


def _tree(b: _Builder, kind: str, ids: list[int], out_id: int, stem: str, src: str, line: int):
    """Balanced reduction tree by left-to-right pairing; writes ``out_id``."""
    if len(ids) == 2:
        b.cell(kind, stem, (out_id,), (ids[0], ids[1]), src=src, line=line)
        return
    level = 0
    ids = list(ids)
    while len(ids) > 1:
        nxt = []
        for k in range(0, len(ids) - 1, 2):
            last = len(ids) <= 2
            o = out_id if last else b.net(f"{stem}.t{level}_{k // 2}")
            b.cell(kind, f"{stem}.{kind}{level}_{k // 2}", (o,), (ids[k], ids[k + 1]),
                   src=src, line=line)
            nxt.append(o)
        if len(ids) % 2:
            nxt.append(ids[-1])
        ids = nxt
        level += 1
    if len(ids) == 1 and ids[0] != out_id:
        b.cell(BUF, f"{stem}.pass", (out_id,), (ids[0],), src=src, line=line)


def _lower_gate(b: _Builder, c: Circuit, g: GateInstance, bits: dict[str, list[int]]):
    k = g.kind
    out = g.outputs[0]
    ow = c.nets[out]
    ins = [bits[n] for n in g.inputs]
    src, line = g.instance, g.line

    if k in WIRING_KINDS:
        if k is GateKind.SHL:
            bits[out] = [b.const(0, src)] * g.param + ins[0][: ow - g.param]
        elif k is GateKind.SHR:
            bits[out] = ins[0][g.param:] + [b.const(0, src)] * g.param
        elif k is GateKind.SLICE:
            bits[out] = ins[0][g.param: g.param + ow]
        else:  # CONCAT
            flat: list[int] = []
            for lst in ins:
                flat.extend(lst)
            bits[out] = flat
        return

    def out_bit(i: int) -> int:
        return b.net(_bit_name(out, i, ow))

    def bit_stem(i: int) -> str:
        return src if ow == 1 else f"{src}.b{i}"

    if k in (GateKind.NOT, GateKind.ASSIGN):
        kind = INV if k is GateKind.NOT else BUF
        bits[out] = []
        for i in range(ow):
            o = out_bit(i)
            b.cell(kind, bit_stem(i), (o,), (ins[0][i],), src=src, line=line)
            bits[out].append(o)
    elif k in (GateKind.AND, GateKind.OR, GateKind.XOR):
        kind = {GateKind.AND: AND, GateKind.OR: OR, GateKind.XOR: XOR}[k]
        bits[out] = []
        for i in range(ow):
            o = out_bit(i)
            _tree(b, kind, [lst[i] for lst in ins], o, bit_stem(i), src, line)
            bits[out].append(o)
    elif k in (GateKind.RAND, GateKind.ROR, GateKind.RXOR):
        kind = {GateKind.RAND: AND, GateKind.ROR: OR, GateKind.RXOR: XOR}[k]
        o = out_bit(0)
        if len(ins[0]) == 1:
            b.cell(BUF, f"{src}.pass", (o,), (ins[0][0],), src=src, line=line)
        else:
            _tree(b, kind, ins[0], o, src, src, line)
        bits[out] = [o]
    elif k is GateKind.MUX2:
        sel = ins[0][0]
        bits[out] = []
        for i in range(ow):
            o = out_bit(i)
            b.cell(MUX, bit_stem(i), (o,), (sel, ins[1][i], ins[2][i]), src=src, line=line)
            bits[out].append(o)
    elif k is GateKind.EQ:
        w = len(ins[0])
        terms = []
        for i in range(w):
            x = b.net(f"{src}.x{i}")
            b.cell(XOR, f"{src}.xor{i}", (x,), (ins[0][i], ins[1][i]), src=src, line=line)
            nx = b.net(f"{src}.nx{i}")
            b.cell(INV, f"{src}.inv{i}", (nx,), (x,), src=src, line=line)
            terms.append(nx)
        o = out_bit(0)
        if w == 1:
            b.cell(BUF, f"{src}.pass", (o,), (terms[0],), src=src, line=line)
        else:
            _tree(b, AND, terms, o, src, src, line)
        bits[out] = [o]
    elif k is GateKind.LT:
        w = len(ins[0])
        lt = None
        o = out_bit(0)
        for i in range(w):
            na = b.net(f"{src}.na{i}")
            b.cell(INV, f"{src}.ia{i}", (na,), (ins[0][i],), src=src, line=line)
            t1 = b.net(f"{src}.lo{i}") if i < w - 1 or lt is not None else o
            b.cell(AND, f"{src}.and{i}", (t1,), (na, ins[1][i]), src=src, line=line)
            if lt is None:
                lt = t1
            else:
                x = b.net(f"{src}.x{i}")
                b.cell(XOR, f"{src}.xor{i}", (x,), (ins[0][i], ins[1][i]), src=src, line=line)
                nx = b.net(f"{src}.nx{i}")
                b.cell(INV, f"{src}.ix{i}", (nx,), (x,), src=src, line=line)
                t2 = b.net(f"{src}.keep{i}")
                b.cell(AND, f"{src}.andk{i}", (t2,), (nx, lt), src=src, line=line)
                onet = b.net(f"{src}.lt{i}") if i < w - 1 else o
                b.cell(OR, f"{src}.or{i}", (onet,), (t1, t2), src=src, line=line)
                lt = onet
        bits[out] = [o]
    elif k in (GateKind.ADD, GateKind.SUB):
        a, bb = ins
        w = len(a)
        if k is GateKind.SUB:
            nb = []
            for i in range(w):
                n = b.net(f"{src}.nb{i}")
                b.cell(INV, f"{src}.ib{i}", (n,), (bb[i],), src=src, line=line)
                nb.append(n)
            bb = nb
        carry = b.const(1, src) if k is GateKind.SUB else None
        bits[out] = []
        for i in range(w):
            s = out_bit(i)
            if i == w - 1:
                co = b.net(f"{src}.co{i}")  # dangling; removed by open propagation
            else:
                co = b.net(f"{src}.c{i}")
            if carry is None:
                b.cell(HA, f"{src}.ha{i}", (s, co), (a[i], bb[i]), src=src, line=line)
            else:
                b.cell(FA, f"{src}.fa{i}", (s, co), (carry, a[i], bb[i]), src=src, line=line)
            carry = co
            bits[out].append(s)
    else:  # pragma: no cover
        raise CircuitError("unknown-kind", f"gate {g.instance}: cannot lower {k}")


def to_gate_netlist(c: Circuit) -> BitCircuit:
    """Load a primitive (all widths 1) circuit as a plain gate netlist.

    Accepts kinds ``and``/``or`` (n-ary, ``~`` bubbles allowed), ``xor``
    (2-input), ``not``/``inv``, ``assign``/``buf`` and constants.  Net names
    are kept verbatim; this is the fault-simulation input format.
    """
    b = _Builder(c.name, c.source)
    ids: dict[str, int] = {}

    def nid(name: str) -> int:
        if name not in ids:
            ids[name] = b.net(name)
        return ids[name]

    if any(w != 1 for w in c.nets.values()):
        raise CircuitError("width-mismatch", "gate netlists must use 1-bit nets only")
    for p in c.input_ports:
        n = nid(p.name)
        b.pis.append(n)
        b.pi_names.append(p.name)
    for r in c.registers:
        n = nid(r.q)
        b.pis.append(n)
        b.pi_names.append(r.q)
    for net, val in c.consts.items():
        b.cell(CONST1 if val else CONST0, f"const:{net}", (nid(net),), ())

    kind_map = {GateKind.AND: AND, GateKind.OR: OR, GateKind.XOR: XOR,
                GateKind.NOT: INV, GateKind.ASSIGN: BUF}
    for g in c.gates:
        if g.kind not in kind_map:
            raise CircuitError("unknown-kind",
                               f"gate {g.instance}: kind '{g.kind.value}' not allowed in gate netlists",
                               g.line)
        kind = kind_map[g.kind]
        neg = gnl.bubbles(c, g.instance) or (False,) * len(g.inputs)
        if any(neg) and kind not in (AND, OR):
            raise CircuitError("bubble-unsupported",
                               f"gate {g.instance}: bubbles are only valid on and/or inputs", g.line)
        if kind is XOR and len(g.inputs) != 2:
            raise CircuitError("arity", f"gate {g.instance}: xor takes exactly two inputs", g.line)
        b.cell(kind, g.instance, (nid(g.outputs[0]),), tuple(nid(i) for i in g.inputs),
               neg=tuple(neg), src=g.instance, line=g.line)

    for p in c.output_ports:
        b.pos.append(nid(p.name))
        b.po_names.append(p.name)
    for r in c.registers:
        b.pos.append(nid(r.d))
        b.po_names.append(f"{r.instance}.d")
        b.regs.append(BitReg(r.instance, ids[r.q], ids[r.d], r.init & 1))
    return b.finish()


# ---------------------------------------------------------------------------
# constant / open propagation


@dataclass
class ReductionLog:
    """Record of cells removed or rewritten during simplification."""

    removed: list[str] = field(default_factory=list)
    rewritten: list[tuple[str, str]] = field(default_factory=list)  # (cell, what it became)


def propagate_constants(bc: BitCircuit) -> tuple[BitCircuit, ReductionLog]:
    """Forward-propagate constant cell outputs, simplifying driven cells.

    Function on all POs is preserved.  Simplification may introduce fresh
    INV/BUF cells (e.g. a full adder with a constant-1 carry-in) but never
    changes PI/PO signature.
    """
    log = ReductionLog()
    const_val: dict[int, int] = {}
    new_cells: list[Cell] = []
    net_names = list(bc.net_names)
    extra = 0

    def fresh(stem: str) -> int:
        nonlocal extra
        nid = len(net_names)
        net_names.append(f"{stem}.k{extra}")
        extra += 1
        return nid

    def emit(kind, name, outs, ins, neg=(), src="", line=0):
        new_cells.append(Cell(name, kind, outs, ins, neg, src, line))

    for ci in bc.order:
        c = bc.cells[ci]
        ivals = []
        for i, f in zip(c.ins, c.negs()):
            v = const_val.get(i)
            ivals.append(v if v is None or not f else 1 - v)
        changed = _simplify_cell(c, ivals, const_val, emit, fresh, log)
        if not changed:
            new_cells.append(c)

    keep = _finish(bc, net_names, new_cells)
    return keep, log


def _simplify_cell(c: Cell, ivals, const_val, emit, fresh, log) -> bool:
    """Rewrite one cell given known constant inputs. Returns True if rewritten."""
    k = c.kind
    known = [v for v in ivals if v is not None]

    def become_const(out: int, v: int, note: str):
        const_val[out] = v
        emit(CONST1 if v else CONST0, f"{c.name}", (out,), (), src=c.src, line=c.line)
        log.rewritten.append((c.name, note))

    def become_unary(kind: str, out: int, inp: int, note: str):
        emit(kind, c.name, (out,), (inp,), src=c.src, line=c.line)
        log.rewritten.append((c.name, note))

    if k in (CONST0, CONST1):
        const_val[c.outs[0]] = 1 if k == CONST1 else 0
        return False
    if not known:
        return False

    live = [(i, f) for i, f, v in zip(c.ins, c.negs(), ivals) if v is None]

    if k == BUF and ivals[0] is not None:
        become_const(c.outs[0], ivals[0], "const buf")
        return True
    if k == INV and ivals[0] is not None:
        become_const(c.outs[0], 1 - ivals[0], "const inv")
        return True
    if k in (AND, OR):
        absorb = 0 if k == AND else 1
        if absorb in known:
            become_const(c.outs[0], absorb, f"absorbed by const {absorb}")
            return True
        if not live:
            become_const(c.outs[0], 1 - absorb, "all inputs constant")
            return True
        if len(live) == 1:
            i, f = live[0]
            become_unary(INV if f else BUF, c.outs[0], i, "single live input")
            return True
        if len(live) < len(c.ins):
            emit(k, c.name, c.outs, tuple(i for i, _ in live), tuple(f for _, f in live),
                 src=c.src, line=c.line)
            log.rewritten.append((c.name, "dropped constant inputs"))
            return True
        return False
    if k == XOR:
        if ivals[0] is not None and ivals[1] is not None:
            become_const(c.outs[0], ivals[0] ^ ivals[1], "const xor")
        elif ivals[0] is not None or ivals[1] is not None:
            v = ivals[0] if ivals[0] is not None else ivals[1]
            i = c.ins[1] if ivals[0] is not None else c.ins[0]
            become_unary(INV if v else BUF, c.outs[0], i, "xor with constant")
        else:
            return False
        return True
    if k == MUX:
        s, a, bb = ivals
        if s is not None:
            become_unary(BUF, c.outs[0], c.ins[2] if s else c.ins[1], "selected branch")
            return True
        if a is not None and bb is not None:
            if a == bb:
                become_const(c.outs[0], a, "both branches constant")
            elif a == 0:
                become_unary(BUF, c.outs[0], c.ins[0], "mux 0/1 is select")
            else:
                become_unary(INV, c.outs[0], c.ins[0], "mux 1/0 is inverted select")
            return True
        if a is not None:
            if a == 0:  # y = s & b
                emit(AND, c.name, c.outs, (c.ins[0], c.ins[2]), src=c.src, line=c.line)
            else:       # y = !s | b
                emit(OR, c.name, c.outs, (c.ins[0], c.ins[2]), (True, False), src=c.src, line=c.line)
            log.rewritten.append((c.name, "constant a branch"))
            return True
        if bb is not None:
            if bb == 0:  # y = !s & a
                emit(AND, c.name, c.outs, (c.ins[0], c.ins[1]), (True, False), src=c.src, line=c.line)
            else:        # y = s | a
                emit(OR, c.name, c.outs, (c.ins[0], c.ins[1]), src=c.src, line=c.line)
            log.rewritten.append((c.name, "constant b branch"))
            return True
        return False
    if k == HA:
        s_out, co_out = c.outs
        a, bb = ivals
        v = a if a is not None else bb
        other = c.ins[1] if a is not None else c.ins[0]
        if a is not None and bb is not None:
            become_const(s_out, a ^ bb, "const ha")
            const_val[co_out] = a & bb
            emit(CONST1 if (a & bb) else CONST0, f"{c.name}.co", (co_out,), (), src=c.src, line=c.line)
            return True
        if v == 0:
            emit(BUF, c.name, (s_out,), (other,), src=c.src, line=c.line)
            const_val[co_out] = 0
            emit(CONST0, f"{c.name}.co", (co_out,), (), src=c.src, line=c.line)
        else:
            emit(INV, c.name, (s_out,), (other,), src=c.src, line=c.line)
            emit(BUF, f"{c.name}.co", (co_out,), (other,), src=c.src, line=c.line)
        log.rewritten.append((c.name, "half adder with constant input"))
        return True
    if k == FA:
        s_out, co_out = c.outs
        if len(live) == 2:
            (i1, _), (i2, _) = live
            v = known[0]
            if v == 0:
                emit(HA, c.name, (s_out, co_out), (i1, i2), src=c.src, line=c.line)
                log.rewritten.append((c.name, "full adder with constant 0 input"))
            else:
                x = fresh(c.name)
                emit(XOR, f"{c.name}.x", (x,), (i1, i2), src=c.src, line=c.line)
                emit(INV, c.name, (s_out,), (x,), src=c.src, line=c.line)
                emit(OR, f"{c.name}.co", (co_out,), (i1, i2), src=c.src, line=c.line)
                log.rewritten.append((c.name, "full adder with constant 1 input"))
            return True
        if len(live) == 1:
            i1, _ = live[0]
            tot = sum(known)
            if tot == 0:
                emit(BUF, c.name, (s_out,), (i1,), src=c.src, line=c.line)
                const_val[co_out] = 0
                emit(CONST0, f"{c.name}.co", (co_out,), (), src=c.src, line=c.line)
            elif tot == 1:
                emit(INV, c.name, (s_out,), (i1,), src=c.src, line=c.line)
                emit(BUF, f"{c.name}.co", (co_out,), (i1,), src=c.src, line=c.line)
            else:
                emit(BUF, c.name, (s_out,), (i1,), src=c.src, line=c.line)
                const_val[co_out] = 1
                emit(CONST1, f"{c.name}.co", (co_out,), (), src=c.src, line=c.line)
            log.rewritten.append((c.name, "full adder with two constant inputs"))
            return True
        if len(live) == 0:
            tot = sum(known)
            become_const(s_out, tot & 1, "const fa")
            const_val[co_out] = int(tot >= 2)
            emit(CONST1 if tot >= 2 else CONST0, f"{c.name}.co", (co_out,), (), src=c.src, line=c.line)
            return True
        return False
    return False


def propagate_opens(bc: BitCircuit) -> tuple[BitCircuit, ReductionLog]:
    """Backward-remove cells whose outputs reach no primary output."""
    log = ReductionLog()
    live_nets: set[int] = set(bc.pos)
    live_cells: set[int] = set()
    # one reverse pass over the levelized order reaches the fixed point
    for ci in reversed(bc.order):
        c = bc.cells[ci]
        if any(o in live_nets for o in c.outs):
            live_cells.add(ci)
            live_nets.update(c.ins)
    new_cells = []
    for ci, c in enumerate(bc.cells):
        if ci in live_cells:
            new_cells.append(c)
        else:
            log.removed.append(c.name)
    return _finish(bc, list(bc.net_names), new_cells), log


def reduce_circuit(bc: BitCircuit) -> tuple[BitCircuit, ReductionLog]:
    """Run constant then open propagation to a joint fixed point."""
    total = ReductionLog()
    while True:
        before = len(bc.cells)
        bc, log1 = propagate_constants(bc)
        bc, log2 = propagate_opens(bc)
        total.removed += log1.removed + log2.removed
        total.rewritten += log1.rewritten + log2.rewritten
        if len(bc.cells) == before and not log1.rewritten:
            return bc, total


def _finish(bc: BitCircuit, net_names: list[str], cells: list[Cell]) -> BitCircuit:
    """Rebuild with unused nets dropped and ids renumbered deterministically."""
    used: set[int] = set(bc.pis) | set(bc.pos)
    for c in cells:
        used.update(c.outs)
        used.update(c.ins)
    for r in bc.regs:
        used.add(r.q)
        used.add(r.d)
    remap: dict[int, int] = {}
    names: list[str] = []
    for old in range(len(net_names)):
        if old in used:
            remap[old] = len(names)
            names.append(net_names[old])
    cells2 = [Cell(c.name, c.kind, tuple(remap[o] for o in c.outs),
                   tuple(remap[i] for i in c.ins), c.neg, c.src, c.line) for c in cells]
    regs2 = [BitReg(r.name, remap[r.q], remap[r.d], r.init) for r in bc.regs]
    return BitCircuit(bc.name, names, cells2, [remap[p] for p in bc.pis], list(bc.pi_names),
                      [remap[p] for p in bc.pos], list(bc.po_names), regs2, bc.source)
