"""Shared fixtures and independent reference implementations.

The reference ("naive") simulators here re-evaluate the whole circuit
scalar- or full-array-wise with no cone walking, no packing tricks and no
shared code paths with the engine's observability machinery; tests compare
the fast paths against them.
"""

import random

import pytest

from gifpo import gnl, macros
from gifpo.circuit import Circuit
from gifpo.elaborate import BitCircuit, elaborate, reduce_circuit


def naive_observability(bc: BitCircuit, frame: list[int], net: int) -> set[int]:
    """Forced dual simulation: full re-evaluation with the net overridden."""
    good = bc.eval_frame(frame)

    def forced_eval(force_val: int) -> list[int]:
        vals = [0] * len(bc.net_names)
        for n, v in zip(bc.pis, frame):
            vals[n] = v & 1
        if net in bc.pis:
            vals[net] = force_val
        for ci in bc.order:
            c = bc.cells[ci]
            for o, v in zip(c.outs, bc.eval_cell(c, vals)):
                vals[o] = force_val if o == net else v
        return vals

    forced = forced_eval(1 - good[net])
    return {j for j, po in enumerate(bc.pos) if forced[po] != good[po]}


def naive_point_detectable(bc: BitCircuit, point, universe) -> list[list[int]]:
    """All frames (exhaustive) satisfying a coverage point's conditions."""
    cell = bc.cells[point.cell]
    hits = []
    n_pi = len(bc.pis)
    for t in range(1 << n_pi):
        frame = [(t >> (n_pi - 1 - k)) & 1 for k in range(n_pi)]
        vals = bc.eval_frame(frame)
        m = 0
        for k, i in enumerate(cell.ins):
            m = (m << 1) | vals[i]
        if m != point.cls.minterm:
            continue
        if point.po in naive_observability(bc, frame, cell.outs[point.cls.out]):
            hits.append(frame)
    return hits


def naive_permanent_fault_detects(bc: BitCircuit, frames, net: int, value: int) -> list[int]:
    """Serial faulty-machine simulation: the fault is present in every cycle.

    Register state evolves separately in the good and the faulty machine;
    detection happens in any cycle where an output-port or register-d value
    differs.
    """
    good_state = {r.name: r.init for r in bc.regs}
    bad_state = {r.name: r.init for r in bc.regs}
    q_pos = {r.q: r.name for r in bc.regs}
    detected = []

    def run(frame, state, force):
        vals = [0] * len(bc.net_names)
        for n, v in zip(bc.pis, frame):
            vals[n] = state[q_pos[n]] if n in q_pos else (v & 1)
        if force and net in bc.pis:
            vals[net] = value
        for ci in bc.order:
            c = bc.cells[ci]
            for o, v in zip(c.outs, bc.eval_cell(c, vals)):
                vals[o] = value if (force and o == net) else v
        nxt = {r.name: vals[r.d] for r in bc.regs}
        return vals, nxt

    for t, frame in enumerate(frames):
        gv, good_state = run(list(frame), good_state, False)
        bv, bad_state = run(list(frame), bad_state, True)
        if any(gv[p] != bv[p] for p in bc.pos):
            detected.append(t)
    return detected


def random_word_circuit(seed: int) -> Circuit:
    """Small random word-level circuit built from a seeded recipe."""
    rng = random.Random(seed)
    n_in = rng.randint(1, 3)
    widths = [rng.randint(1, 4) for _ in range(n_in)]
    lines = [f"input i{k} {w}" for k, w in enumerate(widths)]
    nets = [(f"i{k}", w) for k, w in enumerate(widths)]
    n_gates = rng.randint(1, 6)
    for g in range(n_gates):
        kind = rng.choice(["not", "and", "or", "xor", "add", "sub", "mux2",
                           "eq", "lt", "rand", "ror", "rxor", "assign",
                           "shl", "shr", "concat", "slice"])
        if kind in ("and", "or", "xor", "add", "sub", "eq", "lt"):
            w = rng.choice([wd for _, wd in nets])
            cands = [n for n, wd in nets if wd == w]
            a, b = rng.choice(cands), rng.choice(cands)
            ow = 1 if kind in ("eq", "lt") else w
            lines += [f"wire n{g} {ow}", f"gate {kind} g{g} n{g} {a} {b}"]
            nets.append((f"n{g}", ow))
        elif kind in ("not", "assign"):
            a, w = rng.choice(nets)
            lines += [f"wire n{g} {w}", f"gate {kind} g{g} n{g} {a}"]
            nets.append((f"n{g}", w))
        elif kind in ("rand", "ror", "rxor"):
            a, w = rng.choice(nets)
            lines += [f"wire n{g} 1", f"gate {kind} g{g} n{g} {a}"]
            nets.append((f"n{g}", 1))
        elif kind == "mux2":
            sels = [n for n, wd in nets if wd == 1]
            if not sels:
                continue
            s = rng.choice(sels)
            w = rng.choice([wd for _, wd in nets])
            cands = [n for n, wd in nets if wd == w]
            a, b = rng.choice(cands), rng.choice(cands)
            lines += [f"wire n{g} {w}", f"gate mux2 g{g} n{g} {s} {a} {b}"]
            nets.append((f"n{g}", w))
        elif kind in ("shl", "shr"):
            a, w = rng.choice(nets)
            k = rng.randint(0, w)
            lines += [f"wire n{g} {w}", f"gate {kind} g{g} n{g} {a} {k}"]
            nets.append((f"n{g}", w))
        elif kind == "concat":
            a, wa = rng.choice(nets)
            b, wb = rng.choice(nets)
            lines += [f"wire n{g} {wa + wb}", f"gate concat g{g} n{g} {a} {b}"]
            nets.append((f"n{g}", wa + wb))
        elif kind == "slice":
            a, w = rng.choice(nets)
            lo = rng.randint(0, w - 1)
            ow = rng.randint(1, w - lo)
            lines += [f"wire n{g} {ow}", f"gate slice g{g} n{g} {a} {lo}"]
            nets.append((f"n{g}", ow))
    out, ow = nets[-1]
    if out.startswith("i"):
        lines += [f"wire y {ow}", f"gate assign gout y {out}", f"output z {ow}",
                  "gate assign gz z y"]
    else:
        lines += [f"output z {ow}", f"gate assign gz z {out}"]
    text = "\n".join(["circuit rnd"] + lines + ["end"]) + "\n"
    return gnl.parse(text)


@pytest.fixture(scope="session")
def c1():
    return macros.load_example("c1")


@pytest.fixture(scope="session")
def c1_reduced(c1):
    red, _ = reduce_circuit(elaborate(c1))
    return red


TI = [(0, 1, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1)]
TII = [(0, 1, 0), (0, 1, 1), (1, 1, 0), (1, 1, 1)]
