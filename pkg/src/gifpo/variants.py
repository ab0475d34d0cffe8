"""Functionally equivalent gate-netlist variants of an elaborated circuit.

Styles:

* ``ripple``   -- direct cell-by-cell mapping to AND/OR/XOR/INV/BUF gates.
* ``twolevel`` -- each output's driving cell is expanded to a prime-cover
  sum-of-products over its pins, and the fan-in cone behind every product
  literal is re-instantiated per literal (heavy logic duplication; positive
  literals whose cone tops out in an AND are flattened into the product).
* ``aotree``   -- adder carry chains get an individual AND-OR carry tree per
  bit, and XOR/MUX cells are mapped to AND/OR/INV, yielding a pure
  AND-OR-INV netlist.
* ``rewrite``  -- ripple output mutated by a fixed set of six random local
  function-preserving rules; deterministic in (seed, steps); zero steps is
  identity with the ripple style.

Every emitted netlist keeps the source PI/PO signature; ``variant_suite``
checks each one by exhaustive equivalence and aborts on any mismatch.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .circuit import CircuitError
from .elaborate import (AND, BUF, CONST0, CONST1, FA, HA, INV, MUX, OR, XOR,
                        BitCircuit, BitReg, Cell, eval_cell_values, propagate_opens)
from .gif import _cell_function
from .stuckat import exhaustive_equivalence

STYLES = ("ripple", "twolevel", "aotree", "rewrite")

TWO_LEVEL_CONE_LIMIT = 16


@dataclass(frozen=True)
class SynthStyle:
    name: str
    seed: int = 0
    steps: int = 0

    def label(self) -> str:
        if self.name == "rewrite":
            return f"rewrite(seed={self.seed},steps={self.steps})"
        return self.name


class _NetlistBuilder:
    def __init__(self, src: BitCircuit):
        self.src = src
        self.names: list[str] = []
        self.ids: dict[str, int] = {}
        self.cells: list[Cell] = []
        self._const: dict[int, int] = {}

    def net(self, name: str) -> int:
        if name in self.ids:
            raise CircuitError("redeclared-net", f"variant net '{name}' created twice")
        nid = len(self.names)
        self.names.append(name)
        self.ids[name] = nid
        return nid

    def cell(self, kind, name, out, ins, neg=(), src="") -> int:
        self.cells.append(Cell(name, kind, (out,), tuple(ins), tuple(neg), src))
        return out

    def finish(self, pis: list[int], pos: list[int]) -> BitCircuit:
        s = self.src
        q_of = {net: pis[k] for k, net in enumerate(s.pis)}
        d_of = {}
        for k, net in enumerate(s.pos):
            d_of.setdefault(net, pos[k])
        regs = [BitReg(r.name, q_of[r.q], d_of[r.d], r.init) for r in s.regs]
        return BitCircuit(s.name, self.names, self.cells, pis, list(s.pi_names),
                          pos, list(s.po_names), regs, s.source)


def _map_cell(b: _NetlistBuilder, c: Cell, out_ids: tuple[int, ...], in_ids: tuple[int, ...],
              prefix: str):
    """Emit the netlist expansion of one cell with already-mapped net ids."""
    k = c.kind
    p = f"{prefix}/{c.name}"
    if k in (CONST0, CONST1, BUF, INV, AND, OR, XOR):
        b.cells.append(Cell(p, k, out_ids, in_ids, c.neg, c.src, c.line))
    elif k == MUX:
        s, a, bb = in_ids
        ns = b.cell(INV, f"{p}/ns", b.net(f"{p}/ns"), (s,), src=c.src)
        t0 = b.cell(AND, f"{p}/a0", b.net(f"{p}/a0"), (a, ns), src=c.src)
        t1 = b.cell(AND, f"{p}/a1", b.net(f"{p}/a1"), (bb, s), src=c.src)
        b.cell(OR, p, out_ids[0], (t0, t1), src=c.src)
    elif k == HA:
        a, bb = in_ids
        b.cell(XOR, p, out_ids[0], (a, bb), src=c.src)
        b.cell(AND, f"{p}/co", out_ids[1], (a, bb), src=c.src)
    elif k == FA:
        ci, a, bb = in_ids
        pnet = b.cell(XOR, f"{p}/p", b.net(f"{p}/p"), (a, bb), src=c.src)
        b.cell(XOR, p, out_ids[0], (pnet, ci), src=c.src)
        g = b.cell(AND, f"{p}/g", b.net(f"{p}/g"), (a, bb), src=c.src)
        t = b.cell(AND, f"{p}/t", b.net(f"{p}/t"), (pnet, ci), src=c.src)
        b.cell(OR, f"{p}/co", out_ids[1], (g, t), src=c.src)
    else:  # pragma: no cover
        raise CircuitError("unknown-kind", f"cannot map cell kind {k}")


def _ripple(bc: BitCircuit) -> BitCircuit:
    b = _NetlistBuilder(bc)
    newid: dict[int, int] = {}

    def nid(old: int) -> int:
        if old not in newid:
            newid[old] = b.net(bc.net_names[old])
        return newid[old]

    pis = [nid(p) for p in bc.pis]
    for ci in bc.order:
        c = bc.cells[ci]
        _map_cell(b, c, tuple(nid(o) for o in c.outs), tuple(nid(i) for i in c.ins), "rip")
    pos = [nid(p) for p in bc.pos]
    return b.finish(pis, pos)


# ---------------------------------------------------------------------------
# aotree


def _aoi_xor(b: _NetlistBuilder, prefix: str, x: int, y: int, out: int | None = None,
             src: str = "") -> int:
    nx = b.cell(INV, f"{prefix}/nx", b.net(f"{prefix}/nx"), (x,), src=src)
    ny = b.cell(INV, f"{prefix}/ny", b.net(f"{prefix}/ny"), (y,), src=src)
    t0 = b.cell(AND, f"{prefix}/t0", b.net(f"{prefix}/t0"), (x, ny), src=src)
    t1 = b.cell(AND, f"{prefix}/t1", b.net(f"{prefix}/t1"), (nx, y), src=src)
    o = out if out is not None else b.net(f"{prefix}/y")
    return b.cell(OR, f"{prefix}/or", o, (t0, t1), src=src)


def _or_tree(b: _NetlistBuilder, prefix: str, terms: list[int], out: int, src: str = "") -> int:
    if len(terms) == 1:
        return b.cell(BUF, f"{prefix}/pass", out, (terms[0],), src=src)
    level = 0
    while len(terms) > 2:
        nxt = []
        for k in range(0, len(terms) - 1, 2):
            nxt.append(b.cell(OR, f"{prefix}/o{level}_{k // 2}",
                              b.net(f"{prefix}/o{level}_{k // 2}"),
                              (terms[k], terms[k + 1]), src=src))
        if len(terms) % 2:
            nxt.append(terms[-1])
        terms = nxt
        level += 1
    return b.cell(OR, f"{prefix}/or", out, tuple(terms), src=src)


@dataclass
class _Chain:
    cells: list[int]    # cell indices, lowest bit first
    ext_ci: int | None  # external carry-in net when the chain starts with an FA


def _find_chains(bc: BitCircuit) -> list[_Chain]:
    adders = [ci for ci, c in enumerate(bc.cells) if c.kind in (HA, FA)]
    by_co = {bc.cells[ci].outs[1]: ci for ci in adders}
    follow: dict[int, int] = {}
    has_pred: set[int] = set()
    for ci in adders:
        c = bc.cells[ci]
        if c.kind == FA and c.ins[0] in by_co:
            pred = by_co[c.ins[0]]
            if pred not in follow:
                follow[pred] = ci
                has_pred.add(ci)
    chains = []
    for ci in adders:
        if ci in has_pred:
            continue
        cells = [ci]
        while cells[-1] in follow:
            cells.append(follow[cells[-1]])
        first = bc.cells[ci]
        chains.append(_Chain(cells, first.ins[0] if first.kind == FA else None))
    return chains


def _aotree(bc: BitCircuit) -> BitCircuit:
    b = _NetlistBuilder(bc)
    newid: dict[int, int] = {}

    def nid(old: int) -> int:
        if old not in newid:
            newid[old] = b.net(bc.net_names[old])
        return newid[old]

    pis = [nid(p) for p in bc.pis]
    chains = _find_chains(bc)
    in_chain = {ci for ch in chains for ci in ch.cells}
    chain_of = {ci: (ch, k) for ch in chains for k, ci in enumerate(ch.cells)}
    po_nets = set(bc.pos)

    def stage_ab(ci: int) -> tuple[int, int]:
        c = bc.cells[ci]
        return (c.ins[0], c.ins[1]) if c.kind == HA else (c.ins[1], c.ins[2])

    def carry_tree(ch: _Chain, upto: int, out: int, prefix: str, src: str):
        """Carry out of stage ``upto``, built as a dedicated AND-OR tree."""
        g_nets, p_nets = [], []
        for m, ci in enumerate(ch.cells[: upto + 1]):
            a, bb = (nid(x) for x in stage_ab(ci))
            g_nets.append(b.cell(AND, f"{prefix}/g{m}", b.net(f"{prefix}/g{m}"), (a, bb), src=src))
            p_nets.append(b.cell(OR, f"{prefix}/p{m}", b.net(f"{prefix}/p{m}"), (a, bb), src=src))
        n = len(g_nets)
        suffix: list[int | None] = [None] * (n + 1)  # suffix[m] = p[m] & ... & p[n-1]
        acc = None
        for m in range(n - 1, -1, -1):
            acc = p_nets[m] if acc is None else b.cell(
                AND, f"{prefix}/r{m}", b.net(f"{prefix}/r{m}"), (p_nets[m], acc), src=src)
            suffix[m] = acc
        terms = []
        if ch.ext_ci is not None:
            terms.append(b.cell(AND, f"{prefix}/text", b.net(f"{prefix}/text"),
                                (nid(ch.ext_ci), suffix[0]), src=src))
        for m in range(n):
            if m == n - 1:
                terms.append(g_nets[m])
            else:
                terms.append(b.cell(AND, f"{prefix}/t{m}", b.net(f"{prefix}/t{m}"),
                                    (g_nets[m], suffix[m + 1]), src=src))
        _or_tree(b, prefix, terms, out, src=src)

    for ci in bc.order:
        c = bc.cells[ci]
        if ci not in in_chain:
            out_ids = tuple(nid(o) for o in c.outs)
            in_ids = tuple(nid(i) for i in c.ins)
            if c.kind == XOR:
                _aoi_xor(b, f"ao/{c.name}", in_ids[0], in_ids[1], out_ids[0], src=c.src)
            else:
                _map_cell(b, c, out_ids, in_ids, "ao")
            continue
        ch, k = chain_of[ci]
        a, bb = (nid(x) for x in stage_ab(ci))
        s_out, co_out = c.outs
        prefix = f"ao/{c.name}"
        if k == 0 and ch.ext_ci is None:
            _aoi_xor(b, f"{prefix}/s", a, bb, nid(s_out), src=c.src)
        else:
            if k == 0:
                cin = nid(ch.ext_ci)
            else:
                cin = b.net(f"{prefix}/cin")
                carry_tree(ch, k - 1, cin, f"{prefix}/ct", c.src)
            x1 = _aoi_xor(b, f"{prefix}/x1", a, bb, src=c.src)
            _aoi_xor(b, f"{prefix}/s", x1, cin, nid(s_out), src=c.src)
        succ = ch.cells[k + 1] if k + 1 < len(ch.cells) else None
        external = [si for si in bc.sinks[co_out] if si != succ]
        if external or co_out in po_nets:
            carry_tree(ch, k, nid(co_out), f"{prefix}/co", c.src)

    pos = [nid(p) for p in bc.pos]
    return b.finish(pis, pos)


# ---------------------------------------------------------------------------
# two-level


def _prime_cover(on: list[int], n: int) -> list[list[tuple[int, int]]]:
    """Greedy prime-implicant cover of an ON set; products as (pin, polarity)."""
    if not on:
        return []
    cubes = {(m, 0) for m in on}
    primes: set[tuple[int, int]] = set()
    while cubes:
        nxt, merged = set(), set()
        lst = sorted(cubes)
        for i, (va, ma) in enumerate(lst):
            for vb, mb in lst[i + 1:]:
                if ma == mb and bin(va ^ vb).count("1") == 1:
                    nxt.add((va & vb, ma | (va ^ vb)))
                    merged.add((va, ma))
                    merged.add((vb, mb))
        primes |= cubes - merged
        cubes = nxt

    def covers(cube, m):
        v, mask = cube
        return (m & ~mask) == (v & ~mask)

    ordered = sorted(primes)
    cover, left = [], set(on)
    while left:
        best = max(ordered, key=lambda c: (sum(1 for m in left if covers(c, m)),
                                           bin(c[1]).count("1"), [-c[0], -c[1]]))
        cover.append(best)
        left -= {m for m in left if covers(best, m)}
    prods = []
    for v, mask in cover:
        lits = [(k, 1 if v & (1 << (n - 1 - k)) else 0)
                for k in range(n) if not (mask & (1 << (n - 1 - k)))]
        prods.append(lits)
    return prods


def _two_level(bc: BitCircuit) -> BitCircuit:
    b = _NetlistBuilder(bc)
    newid: dict[int, int] = {}

    def nid(old: int) -> int:
        if old not in newid:
            newid[old] = b.net(bc.net_names[old])
        return newid[old]

    pis = [nid(p) for p in bc.pis]
    pi_set = set(bc.pis)

    def support(net: int) -> set[int]:
        seen, out = set(), set()
        stack = [net]
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            if cur in pi_set:
                out.add(cur)
            elif bc.driver[cur] is not None:
                stack.extend(bc.cells[bc.driver[cur][0]].ins)
        return out

    def copy_cone(net: int, prefix: str) -> int:
        """Fresh structural duplicate (netlist-mapped) of the cone behind ``net``."""
        local: dict[int, int] = {}

        def dup(old: int) -> int:
            if old in pi_set:
                return nid(old)
            if old in local:
                return local[old]
            ci, _ = bc.driver[old]
            c = bc.cells[ci]
            in_ids = tuple(dup(i) for i in c.ins)
            for o in c.outs:
                local[o] = b.net(f"{prefix}/{bc.net_names[o]}")
            _map_cell(b, c, tuple(local[o] for o in c.outs), in_ids, prefix)
            return local[old]

        return dup(net)

    def literal(src_net: int, pol: int, prefix: str, ins: list[int], negs: list[bool]):
        """Append the nets of one product literal, flattening positive AND cones."""
        if src_net in pi_set:
            ins.append(nid(src_net))
            negs.append(pol == 0)
            return
        ci, _ = bc.driver[src_net]
        c = bc.cells[ci]
        if pol == 1 and c.kind == AND and not any(c.negs()):
            for k, i in enumerate(c.ins):
                literal(i, 1, f"{prefix}.{k}", ins, negs)
            return
        dup_net = copy_cone(src_net, prefix)
        ins.append(dup_net)
        negs.append(pol == 0)

    built: dict[int, int] = {}
    for j, po_net in enumerate(bc.pos):
        if po_net in built:
            continue
        if po_net in pi_set:
            built[po_net] = nid(po_net)
            continue
        if len(support(po_net)) > TWO_LEVEL_CONE_LIMIT:
            raise CircuitError("cone-too-wide",
                               f"output {bc.po_names[j]} depends on more than "
                               f"{TWO_LEVEL_CONE_LIMIT} inputs")
        ci, out_pos = bc.driver[po_net]
        c = bc.cells[ci]
        pname = bc.net_names[po_net]
        if c.kind in (CONST0, CONST1):
            out = b.net(pname)
            b.cells.append(Cell(f"tl/{pname}", c.kind, (out,), ()))
            built[po_net] = out
            continue
        n = len(c.ins)
        f = _cell_function(c.kind, n, c.negs())
        prods = _prime_cover([m for m in range(1 << n) if f(m)[out_pos]], n)
        terms = []
        for tno, lits in enumerate(prods):
            ins: list[int] = []
            negs: list[bool] = []
            for lno, (pin, pol) in enumerate(lits):
                literal(c.ins[pin], pol, f"tl/{pname}/{tno}_{lno}", ins, negs)
            if len(ins) == 1:
                term = b.cell(INV if negs[0] else BUF, f"tl/{pname}/m{tno}",
                              b.net(f"tl/{pname}/m{tno}"), (ins[0],), src=c.src)
            else:
                term = b.cell(AND, f"tl/{pname}/m{tno}", b.net(f"tl/{pname}/m{tno}"),
                              tuple(ins), tuple(negs), src=c.src)
            terms.append(term)
        out = b.net(pname)
        if not terms:
            b.cells.append(Cell(f"tl/{pname}", CONST0, (out,), ()))
        else:
            _or_tree(b, f"tl/{pname}", terms, out, src=c.src)
        built[po_net] = out

    pos = [built[p] for p in bc.pos]
    return b.finish(pis, pos)


# ---------------------------------------------------------------------------
# rewrite


class _Mut:
    """Mutable netlist view for local rewrites."""

    def __init__(self, bc: BitCircuit):
        self.names = list(bc.net_names)
        self.cells = list(bc.cells)
        self.bc = bc
        self.serial = 0

    def net(self, stem: str) -> int:
        self.serial += 1
        self.names.append(f"rw{self.serial}/{stem}")
        return len(self.names) - 1

    def finish(self) -> BitCircuit:
        bc = self.bc
        used = set(bc.pis) | set(bc.pos)
        for r in bc.regs:
            used.add(r.q)
            used.add(r.d)
        for c in self.cells:
            used.update(c.outs)
            used.update(c.ins)
        remap, names = {}, []
        for old in range(len(self.names)):
            if old in used:
                remap[old] = len(names)
                names.append(self.names[old])
        cells = [Cell(c.name, c.kind, tuple(remap[o] for o in c.outs),
                      tuple(remap[i] for i in c.ins), c.neg, c.src, c.line)
                 for c in self.cells]
        regs = [BitReg(r.name, remap[r.q], remap[r.d], r.init) for r in bc.regs]
        return BitCircuit(bc.name, names, cells, [remap[p] for p in bc.pis],
                          list(bc.pi_names), [remap[p] for p in bc.pos],
                          list(bc.po_names), regs, bc.source)


def _subgraph_check(old_cells: list[Cell], new_cells: list[Cell], out_net: int):
    """Truth-table check over the support nets: old and new subgraphs agree."""
    internal_old = {c.outs[0] for c in old_cells}
    support = sorted({i for c in old_cells for i in c.ins} - internal_old)
    if len(support) > 10:
        raise CircuitError("rewrite-broken", "rule support too wide to verify")
    for m in range(1 << len(support)):
        vals = {net: (m >> k) & 1 for k, net in enumerate(support)}
        ref = dict(vals)
        for c in old_cells:
            ref[c.outs[0]] = eval_cell_values(c, ref)[0]
        got = dict(vals)
        for c in new_cells:
            got[c.outs[0]] = eval_cell_values(c, got)[0]
        if ref[out_net] != got[out_net]:
            raise CircuitError("rewrite-broken",
                               f"rule output differs at support assignment {m:b}")


def _rule_demorgan(mut: _Mut, rng: random.Random) -> bool:
    sites = [i for i, c in enumerate(mut.cells) if c.kind in (AND, OR)]
    if not sites:
        return False
    i = rng.choice(sites)
    c = mut.cells[i]
    dual = OR if c.kind == AND else AND
    t = mut.net(f"{c.name}/dm")
    inner = Cell(f"{c.name}/dm{mut.serial}", dual, (t,), c.ins,
                 tuple(not f for f in c.negs()), c.src)
    outer = Cell(c.name, INV, c.outs, (t,), (), c.src)
    _subgraph_check([c], [inner, outer], c.outs[0])
    mut.cells[i: i + 1] = [inner, outer]
    return True


def _rule_xor_expand(mut: _Mut, rng: random.Random) -> bool:
    sites = [i for i, c in enumerate(mut.cells) if c.kind == XOR]
    if not sites:
        return False
    i = rng.choice(sites)
    c = mut.cells[i]
    a, bb = c.ins
    fa, fb = c.negs()
    t0 = mut.net(f"{c.name}/x0")
    t1 = mut.net(f"{c.name}/x1")
    new = [
        Cell(f"{c.name}/x0_{mut.serial}", AND, (t0,), (a, bb), (fa, not fb), c.src),
        Cell(f"{c.name}/x1_{mut.serial}", AND, (t1,), (a, bb), (not fa, fb), c.src),
        Cell(c.name, OR, c.outs, (t0, t1), (), c.src),
    ]
    _subgraph_check([c], new, c.outs[0])
    mut.cells[i: i + 1] = new
    return True


def _rule_dup_driver(mut: _Mut, rng: random.Random) -> bool:
    sinks: dict[int, list[tuple[int, int]]] = {}
    for ci, c in enumerate(mut.cells):
        for k, i in enumerate(c.ins):
            sinks.setdefault(i, []).append((ci, k))
    driver = {c.outs[0]: ci for ci, c in enumerate(mut.cells) if len(c.outs) == 1}
    sites = sorted(n for n, ss in sinks.items()
                   if len(ss) >= 2 and n in driver
                   and mut.cells[driver[n]].kind not in (CONST0, CONST1))
    if not sites:
        return False
    net = sites[rng.randrange(len(sites))]
    src = mut.cells[driver[net]]
    clone_out = mut.net(f"{src.name}/dup")
    mut.cells.append(Cell(f"{src.name}/dup{mut.serial}", src.kind, (clone_out,),
                          src.ins, src.neg, src.src))
    ci, k = sinks[net][0]
    old = mut.cells[ci]
    new_ins = tuple(clone_out if kk == k else i for kk, i in enumerate(old.ins))
    mut.cells[ci] = Cell(old.name, old.kind, old.outs, new_ins, old.neg, old.src, old.line)
    return True


def _rule_buffer(mut: _Mut, rng: random.Random, double_inv: bool) -> bool:
    sites = [(ci, k) for ci, c in enumerate(mut.cells) for k in range(len(c.ins))]
    if not sites:
        return False
    ci, k = sites[rng.randrange(len(sites))]
    c = mut.cells[ci]
    net = c.ins[k]
    if double_inv:
        t0 = mut.net("ii_a")
        t1 = mut.net("ii_b")
        mut.cells.append(Cell(f"rwii{mut.serial}/a", INV, (t0,), (net,), (), c.src))
        mut.cells.append(Cell(f"rwii{mut.serial}/b", INV, (t1,), (t0,), (), c.src))
        repl = t1
    else:
        repl = mut.net("buf")
        mut.cells.append(Cell(f"rwbuf{mut.serial}", BUF, (repl,), (net,), (), c.src))
    new_ins = tuple(repl if kk == k else i for kk, i in enumerate(c.ins))
    mut.cells[ci] = Cell(c.name, c.kind, c.outs, new_ins, c.neg, c.src, c.line)
    return True


def _rule_unfactor(mut: _Mut, rng: random.Random) -> bool:
    """and(or(a,b), c) -> or(and(a,c), and(b,c)) on single-fanout or feeders."""
    driver = {c.outs[0]: ci for ci, c in enumerate(mut.cells) if len(c.outs) == 1}
    fanout: dict[int, int] = {}
    for c in mut.cells:
        for i in c.ins:
            fanout[i] = fanout.get(i, 0) + 1
    sites = []
    for ci, c in enumerate(mut.cells):
        if c.kind != AND or len(c.ins) != 2 or any(c.negs()):
            continue
        for k in (0, 1):
            d = driver.get(c.ins[k])
            if d is not None and mut.cells[d].kind == OR and len(mut.cells[d].ins) == 2 \
                    and not any(mut.cells[d].negs()) and fanout.get(c.ins[k], 0) == 1 \
                    and c.ins[k] not in set(mut.bc.pos):
                sites.append((ci, k))
    if not sites:
        return False
    ci, k = sites[rng.randrange(len(sites))]
    c = mut.cells[ci]
    d = driver[c.ins[k]]
    orc = mut.cells[d]
    other = c.ins[1 - k]
    t0 = mut.net(f"{c.name}/ufa")
    t1 = mut.net(f"{c.name}/ufb")
    new = [
        Cell(f"{c.name}/ufa{mut.serial}", AND, (t0,), (orc.ins[0], other), (), c.src),
        Cell(f"{c.name}/ufb{mut.serial}", AND, (t1,), (orc.ins[1], other), (), c.src),
        Cell(c.name, OR, c.outs, (t0, t1), (), c.src),
    ]
    _subgraph_check([orc, c], new, c.outs[0])
    mut.cells = [cc for idx, cc in enumerate(mut.cells) if idx not in (ci, d)] + new
    return True


_RULES = ("demorgan", "xor_expand", "dup_driver", "buffer", "double_inv", "unfactor")


def _rewrite(bc: BitCircuit, seed: int, steps: int) -> BitCircuit:
    base = _ripple(bc)
    if steps == 0:
        return base
    mut = _Mut(base)
    rng = random.Random(seed)
    dispatch = {
        "demorgan": _rule_demorgan,
        "xor_expand": _rule_xor_expand,
        "dup_driver": _rule_dup_driver,
        "buffer": lambda m, r: _rule_buffer(m, r, False),
        "double_inv": lambda m, r: _rule_buffer(m, r, True),
        "unfactor": _rule_unfactor,
    }
    for step in range(steps):
        rules = list(_RULES)
        rng.shuffle(rules)
        if step == 0 and "dup_driver" in rules:
            rules.remove("dup_driver")
            rules.insert(0, "dup_driver")  # duplication is the interesting case
        for rule in rules:
            if dispatch[rule](mut, rng):
                break
    return mut.finish()


# ---------------------------------------------------------------------------
# entry points


def lower(bc: BitCircuit, style: SynthStyle | str, seed: int = 0, steps: int = 0) -> BitCircuit:
    """Produce a gate netlist from a reduced elaborated circuit.

    Dead gates (e.g. the carry half of a dangling adder output) are pruned
    so every emitted net reaches a primary output.
    """
    if isinstance(style, str):
        style = SynthStyle(style, seed, steps)
    if style.name == "ripple":
        nl = _ripple(bc)
    elif style.name == "twolevel":
        nl = _two_level(bc)
    elif style.name == "aotree":
        nl = _aotree(bc)
    elif style.name == "rewrite":
        nl = _rewrite(bc, style.seed, style.steps)
    else:
        raise CircuitError("unknown-style", f"no such synthesis style: {style.name}")
    nl, _ = propagate_opens(nl)
    return nl


def has_duplicated_driver(nl: BitCircuit) -> bool:
    """True when two cells compute the same function of the same inputs."""
    seen = set()
    for c in nl.cells:
        key = (c.kind, c.ins, c.neg)
        if c.ins and key in seen:
            return True
        seen.add(key)
    return False


def variant_suite(bc: BitCircuit, count: int, seed: int = 0,
                  check: bool = True) -> list[tuple[SynthStyle, BitCircuit]]:
    """Produce ``count`` distinct equivalence-checked netlists spanning all styles.

    Two-level expansion is skipped (replaced by an extra rewrite) when an
    output cone exceeds the width limit.  At least one duplication-heavy
    variant is always present.  Any equivalence failure is an internal bug
    and aborts.
    """
    if count < 1:
        raise CircuitError("arity", "need count >= 1")
    styles: list[SynthStyle] = [SynthStyle("ripple")]
    try:
        two = _two_level(bc)
        styles.append(SynthStyle("twolevel"))
    except CircuitError:
        two = None
        styles.append(SynthStyle("rewrite", seed + 90, 12))
    styles.append(SynthStyle("aotree"))
    k = 0
    while len(styles) < count:
        styles.append(SynthStyle("rewrite", seed + k, 8 + 4 * k))
        k += 1
    out = []
    for st in styles[:count]:
        nl = two if st.name == "twolevel" and two is not None else lower(bc, st)
        if check and len(bc.pis) <= 20:
            cex = exhaustive_equivalence(bc, nl)
            if cex is not None:
                raise CircuitError("variant-not-equivalent",
                                   f"style {st.label()} diverges at {cex['vector']}")
        out.append((st, nl))
    if not any(has_duplicated_driver(nl) for _, nl in out):
        st = SynthStyle("rewrite", seed + 977, 6)
        nl = lower(bc, st)
        if check and len(bc.pis) <= 20:
            cex = exhaustive_equivalence(bc, nl)
            if cex is not None:
                raise CircuitError("variant-not-equivalent",
                                   f"style {st.label()} diverges at {cex['vector']}")
        out.append((st, nl))
    return out
