"""Word-level circuit representation.

A :class:`Circuit` is a network of word-level gates ("complex gates" such as
adders, comparators and muxes) between input ports, output ports and
registers.  All nets carry unsigned values of a declared bit width.  The
representation is immutable after validation and can be shared freely
between workers.

Bit order is LSB-first everywhere.  Local gate minterms read the declared
input pins left-to-right as MSB-to-LSB, so for ``AND(a, b)`` minterm ``0b01``
means ``a=0, b=1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class GateKind(enum.Enum):
    """Word-level gate kinds with fixed width/arity rules."""

    NOT = "not"        # bitwise, 1 input
    AND = "and"        # bitwise, n-ary
    OR = "or"          # bitwise, n-ary
    XOR = "xor"        # bitwise, n-ary
    RAND = "rand"      # reduce and, w -> 1
    ROR = "ror"        # reduce or, w -> 1
    RXOR = "rxor"      # reduce xor, w -> 1
    MUX2 = "mux2"      # (sel:1, a:w, b:w) -> w, sel=0 picks a
    EQ = "eq"          # (w, w) -> 1
    LT = "lt"          # (w, w) -> 1, unsigned
    ADD = "add"        # (w, w) -> w, carry-out discarded
    SUB = "sub"        # (w, w) -> w, borrow discarded
    SHL = "shl"        # constant shift left, zero fill
    SHR = "shr"        # constant shift right, zero fill
    ASSIGN = "assign"  # w -> w identity
    SLICE = "slice"    # bit range extract, param = lsb offset
    CONCAT = "concat"  # LSB-first concatenation

#: Kinds that only move bits around and synthesize to pure wiring.
WIRING_KINDS = frozenset({GateKind.SHL, GateKind.SHR, GateKind.SLICE, GateKind.CONCAT})

_NARY_KINDS = frozenset({GateKind.AND, GateKind.OR, GateKind.XOR, GateKind.CONCAT})


@dataclass(frozen=True)
class Port:
    name: str
    direction: str  # "input" | "output"
    width: int


@dataclass(frozen=True)
class Net:
    name: str
    width: int


@dataclass(frozen=True)
class Register:
    """Synchronous register; single implicit clock, no enable/reset pins."""

    instance: str
    q: str
    d: str
    init: int = 0


@dataclass(frozen=True)
class GateInstance:
    instance: str
    kind: GateKind
    outputs: tuple[str, ...]
    inputs: tuple[str, ...]
    param: int | None = None  # shift amount / slice lsb
    line: int = 0


class CircuitError(ValueError):
    """Validation failure with a stable diagnostic code."""

    def __init__(self, code: str, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{code}: {message}" + (f" (line {line})" if line else ""))
        self.code = code
        self.line = line
        self.col = col


@dataclass
class Circuit:
    """Validated word-level circuit.

    ``nets`` covers every named signal including ports and constants;
    ``consts`` maps constant-driven net names to their values.
    """

    name: str
    ports: list[Port]
    nets: dict[str, int]              # name -> width
    consts: dict[str, int]            # name -> literal value
    registers: list[Register]
    gates: list[GateInstance]
    source: str = ""                  # original GNL text, if parsed
    gate_lines: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        self._validate()

    # -- shape queries ----------------------------------------------------

    @property
    def input_ports(self) -> list[Port]:
        return [p for p in self.ports if p.direction == "input"]

    @property
    def output_ports(self) -> list[Port]:
        return [p for p in self.ports if p.direction == "output"]

    def width(self, net: str) -> int:
        return self.nets[net]

    def pi_bits(self) -> int:
        """Frame input width: input port bits plus register state bits."""
        return sum(p.width for p in self.input_ports) + sum(
            self.nets[r.q] for r in self.registers)

    # -- validation -------------------------------------------------------

    def _validate(self):
        drivers: dict[str, str] = {}

        def drive(net: str, who: str, line: int = 0):
            if net not in self.nets:
                raise CircuitError("unknown-net", f"{who} drives undeclared net '{net}'", line)
            if net in drivers:
                raise CircuitError(
                    "multiple-drivers",
                    f"net '{net}' driven by both {drivers[net]} and {who}", line)
            drivers[net] = who

        for p in self.input_ports:
            drive(p.name, f"input port {p.name}")
        for net, _ in self.consts.items():
            drive(net, f"const {net}")
        for r in self.registers:
            if r.q not in self.nets or r.d not in self.nets:
                raise CircuitError("unknown-net", f"register {r.instance} references undeclared net")
            if self.nets[r.q] != self.nets[r.d]:
                raise CircuitError("width-mismatch", f"register {r.instance} q/d widths differ")
            if r.init >> self.nets[r.q]:
                raise CircuitError("width-mismatch", f"register {r.instance} init exceeds width")
            drive(r.q, f"register {r.instance}")
        for g in self.gates:
            self._check_gate(g)
            for o in g.outputs:
                drive(o, f"gate {g.instance}", g.line)

        for p in self.output_ports:
            if p.name not in drivers:
                raise CircuitError("undriven-net", f"output port '{p.name}' has no driver")
        for r in self.registers:
            if r.d not in drivers:
                raise CircuitError("undriven-net", f"register {r.instance} data net '{r.d}' has no driver")
        for g in self.gates:
            for i in g.inputs:
                if i not in drivers:
                    raise CircuitError("undriven-net", f"gate {g.instance} input '{i}' has no driver", g.line)

        self._check_acyclic(drivers)
        self._topo = self._topo_order(drivers)
        self._drivers = drivers

    def _check_gate(self, g: GateInstance):
        k, line = g.kind, g.line
        w = lambda n: self.nets.get(n)
        for n in g.outputs + g.inputs:
            if n not in self.nets:
                raise CircuitError("unknown-net", f"gate {g.instance} references undeclared net '{n}'", line)
        if len(g.outputs) != 1:
            raise CircuitError("arity", f"gate {g.instance} must have exactly one output", line)
        ow = w(g.outputs[0])
        ins = g.inputs
        iw = [w(n) for n in ins]

        def need(cond: bool, msg: str):
            if not cond:
                raise CircuitError("width-mismatch", f"gate {g.instance} ({k.value}): {msg}", line)

        if k in _NARY_KINDS and k is not GateKind.CONCAT:
            need(len(ins) >= 2, "needs at least two inputs")
            need(all(x == ow for x in iw), "input widths must equal output width")
        elif k in (GateKind.NOT, GateKind.ASSIGN):
            need(len(ins) == 1 and iw[0] == ow, "one input of equal width")
        elif k in (GateKind.RAND, GateKind.ROR, GateKind.RXOR):
            need(len(ins) == 1 and ow == 1, "one input, 1-bit output")
        elif k is GateKind.MUX2:
            need(len(ins) == 3, "needs sel, a, b")
            need(iw[0] == 1 and iw[1] == iw[2] == ow, "sel is 1 bit, data widths equal output")
        elif k in (GateKind.EQ, GateKind.LT):
            need(len(ins) == 2 and iw[0] == iw[1] and ow == 1, "two equal-width inputs, 1-bit output")
        elif k in (GateKind.ADD, GateKind.SUB):
            need(len(ins) == 2 and iw[0] == iw[1] == ow, "two inputs, output width equals input width")
        elif k in (GateKind.SHL, GateKind.SHR):
            need(len(ins) == 1 and iw[0] == ow, "one input of equal width")
            need(g.param is not None and 0 <= g.param <= ow, "shift amount in range")
        elif k is GateKind.SLICE:
            need(len(ins) == 1, "one input")
            need(g.param is not None and g.param + ow <= iw[0], "slice range inside input")
        elif k is GateKind.CONCAT:
            need(len(ins) >= 1 and sum(iw) == ow, "input widths must sum to output width")
        else:  # pragma: no cover
            raise CircuitError("unknown-kind", f"gate {g.instance}: unsupported kind {k}", line)

    def _gate_graph(self) -> dict[str, list[GateInstance]]:
        by_out: dict[str, GateInstance] = {}
        for g in self.gates:
            for o in g.outputs:
                by_out[o] = g
        sinks: dict[str, list[GateInstance]] = {}
        for g in self.gates:
            for i in g.inputs:
                sinks.setdefault(i, []).append(g)
        return by_out, sinks

    def _check_acyclic(self, drivers):
        by_out, _ = self._gate_graph()
        color: dict[str, int] = {}  # 0 visiting, 1 done

        def visit(g: GateInstance, stack: list[str]):
            if g.instance in color:
                if color[g.instance] == 0:
                    raise CircuitError(
                        "combinational-cycle",
                        "cycle through gates " + " -> ".join(stack + [g.instance]), g.line)
                return
            color[g.instance] = 0
            stack.append(g.instance)
            for i in g.inputs:
                up = by_out.get(i)
                if up is not None:
                    visit(up, stack)
            stack.pop()
            color[g.instance] = 1

        import sys
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 4 * len(self.gates) + 100))
        try:
            for g in self.gates:
                visit(g, [])
        finally:
            sys.setrecursionlimit(old)

    def _topo_order(self, drivers) -> list[GateInstance]:
        by_out, _ = self._gate_graph()
        order: list[GateInstance] = []
        seen: set[str] = set()

        def emit(g: GateInstance):
            if g.instance in seen:
                return
            seen.add(g.instance)
            for i in g.inputs:
                up = by_out.get(i)
                if up is not None:
                    emit(up)
            order.append(g)

        import sys
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 4 * len(self.gates) + 100))
        try:
            for g in self.gates:
                emit(g)
        finally:
            sys.setrecursionlimit(old)
        return order

    # -- evaluation -------------------------------------------------------

    def eval_frame(self, pi: dict[str, int], state: dict[str, int] | None = None) -> dict[str, int]:
        """Evaluate one combinational frame at word level.

        ``pi`` maps input port names to values, ``state`` maps register
        instances to current q values (defaults to their init values).
        Returns the value of every net.  Pure function of its arguments.
        """
        vals: dict[str, int] = {}
        for p in self.input_ports:
            v = pi[p.name]
            if v >> p.width:
                raise CircuitError("width-mismatch", f"value for '{p.name}' exceeds width")
            vals[p.name] = v
        state = state if state is not None else {}
        for r in self.registers:
            vals[r.q] = state.get(r.instance, r.init)
        for net, v in self.consts.items():
            vals[net] = v
        for g in self._topo:
            vals[g.outputs[0]] = self._eval_gate(g, vals)
        return vals

    def next_state(self, vals: dict[str, int]) -> dict[str, int]:
        return {r.instance: vals[r.d] for r in self.registers}

    def _eval_gate(self, g: GateInstance, vals: dict[str, int]) -> int:
        k = g.kind
        ow = self.nets[g.outputs[0]]
        mask = (1 << ow) - 1
        a = [vals[n] for n in g.inputs]
        if k is GateKind.NOT:
            return ~a[0] & mask
        if k is GateKind.AND:
            r = a[0]
            for x in a[1:]:
                r &= x
            return r
        if k is GateKind.OR:
            r = a[0]
            for x in a[1:]:
                r |= x
            return r
        if k is GateKind.XOR:
            r = a[0]
            for x in a[1:]:
                r ^= x
            return r
        if k is GateKind.RAND:
            return int(a[0] == (1 << self.nets[g.inputs[0]]) - 1)
        if k is GateKind.ROR:
            return int(a[0] != 0)
        if k is GateKind.RXOR:
            return bin(a[0]).count("1") & 1
        if k is GateKind.MUX2:
            return a[2] if a[0] else a[1]
        if k is GateKind.EQ:
            return int(a[0] == a[1])
        if k is GateKind.LT:
            return int(a[0] < a[1])
        if k is GateKind.ADD:
            return (a[0] + a[1]) & mask
        if k is GateKind.SUB:
            return (a[0] - a[1]) & mask
        if k is GateKind.SHL:
            return (a[0] << g.param) & mask
        if k is GateKind.SHR:
            return a[0] >> g.param
        if k is GateKind.ASSIGN:
            return a[0]
        if k is GateKind.SLICE:
            return (a[0] >> g.param) & mask
        if k is GateKind.CONCAT:
            r, off = 0, 0
            for n, v in zip(g.inputs, a):
                r |= v << off
                off += self.nets[n]
            return r
        raise CircuitError("unknown-kind", f"cannot evaluate {k}")  # pragma: no cover

    def run(self, frames: list[dict[str, int]]) -> list[dict[str, int]]:
        """Sequential simulation: evaluate frames with register state carried."""
        state = {r.instance: r.init for r in self.registers}
        out = []
        for pi in frames:
            vals = self.eval_frame(pi, state)
            state = self.next_state(vals)
            out.append(vals)
        return out
