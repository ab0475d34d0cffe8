import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_word_circuit
from gifpo import gnl, macros
from gifpo.circuit import CircuitError
from gifpo.elaborate import (BUF, elaborate, propagate_constants,
                             propagate_opens, reduce_circuit, to_gate_netlist)
from gifpo.engine import PackedSim, exhaustive_frames, pack_frames


def kind_counts(bc):
    out = {}
    for c in bc.cells:
        out[c.kind] = out.get(c.kind, 0) + 1
    return out


def test_add64_decomposition():
    bc = elaborate(macros.build_adder(64))
    counts = kind_counts(bc)
    assert counts == {"ha": 1, "fa": 63}


def test_add1_single_half_adder():
    bc = elaborate(macros.build_adder(1, name="add1"))
    assert kind_counts(bc) == {"ha": 1}
    # the dangling carry survives elaboration and is dropped by open propagation
    red, log = propagate_opens(bc)
    assert kind_counts(red) == {"ha": 1}


def test_mul8_macro_shape():
    red, _ = reduce_circuit(elaborate(macros.build_multiplier(8)))
    counts = kind_counts(red)
    assert counts["and"] == 64
    assert counts["ha"] + counts["fa"] == 56  # seven rows of eight adder cells
    assert counts["fa"] == 48
    assert counts["buf"] == 7  # one carry tap per row


def test_wiring_creates_no_cells():
    text = ("circuit w\ninput a 4\noutput x 2\noutput y 4\noutput z 8\n"
            "gate slice g1 x a 1\n"
            "gate shl g2 y a 2\n"
            "gate concat g3 z a a\nend\n")
    bc = elaborate(gnl.parse(text))
    assert all(c.kind in ("const0",) for c in bc.cells)  # only shift fill


def test_assign_becomes_buf_fault_site():
    bc = elaborate(gnl.parse("circuit t\ninput a 2\noutput x 2\ngate assign g x a\nend\n"))
    assert kind_counts(bc) == {"buf": 2}


def test_bubbles_rejected_at_word_level():
    text = "circuit t\ninput a 1\ninput b 1\noutput x 1\ngate and g x a ~b\nend\n"
    with pytest.raises(CircuitError) as e:
        elaborate(gnl.parse(text))
    assert e.value.code == "bubble-unsupported"
    # but accepted by the netlist loader
    nl = to_gate_netlist(gnl.parse(text))
    assert nl.eval_frame([1, 0])[nl.pos[0]] == 1


def equivalent_word_vs_bits(c, bc) -> bool:
    """Exhaustive dual-route check: word-level eval vs packed bit eval."""
    n = len(bc.pis)
    frames = exhaustive_frames(n)
    words, valid = pack_frames(frames, 0, len(frames))
    vals = PackedSim(bc).eval_block(words)
    in_ports = c.input_ports
    for t in range(len(frames)):
        pos = 0
        pi = {}
        for p in in_ports:
            v = 0
            for i in range(p.width):
                v |= int(frames[t, pos + i]) << i
                pass
            pos += p.width
            pi[p.name] = v
        state = {}
        for r in c.registers:
            v = 0
            for i in range(c.nets[r.q]):
                v |= int(frames[t, pos + i]) << i
            pos += c.nets[r.q]
            state[r.instance] = v
        ref = c.eval_frame(pi, state)
        w, bit = t // 64, t % 64
        for po_net, po_name in zip(bc.pos, bc.po_names):
            got = (int(vals[po_net][w]) >> bit) & 1
            if po_name.endswith(".d"):
                reg = po_name.rsplit(".", 1)[0]
                base, _, idx = reg.partition("[")
                whole = ref[[r.d for r in c.registers if r.instance == base][0]]
                want = (whole >> int(idx.rstrip("]"))) & 1 if idx else whole & 1
            else:
                base, _, idx = po_name.partition("[")
                want = (ref[base] >> int(idx.rstrip("]"))) & 1 if idx else ref[base] & 1
            if got != want:
                return False
    return True


@pytest.mark.parametrize("name", ["c1", "add2", "add4", "muxtree", "mul3", "mul4",
                                  "b01x", "b02x", "b06x"])
def test_elaboration_equivalence(name):
    c = macros.load_example(name)
    bc = elaborate(c)
    assert equivalent_word_vs_bits(c, bc), name
    red, _ = reduce_circuit(bc)
    assert equivalent_word_vs_bits(c, red), f"{name} after reduction"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_elaboration_equivalence_random(seed):
    c = random_word_circuit(seed)
    bc = elaborate(c)
    if len(bc.pis) > 12:
        return
    assert equivalent_word_vs_bits(c, bc)
    red, _ = reduce_circuit(bc)
    assert equivalent_word_vs_bits(c, red)


def test_elaborate_deterministic():
    a = elaborate(macros.build_multiplier(4))
    b = elaborate(macros.build_multiplier(4))
    assert a.net_names == b.net_names
    assert a.cells == b.cells
    assert a.pos == b.pos


def test_lt_decomposition_semantics():
    c = gnl.parse("circuit t\ninput a 3\ninput b 3\noutput y 1\ngate lt g y a b\nend\n")
    bc = elaborate(c)
    for a in range(8):
        for b in range(8):
            frame = [(a >> i) & 1 for i in range(3)] + [(b >> i) & 1 for i in range(3)]
            assert bc.eval_frame(frame)[bc.pos[0]] == int(a < b), (a, b)


def test_registers_are_frame_boundary():
    c = macros.load_example("b02x")
    bc = elaborate(c)
    assert len(bc.pis) == 1 + 3  # input u plus three state bits
    assert len(bc.pos) == 1 + 3  # output sign plus three register d bits
    assert [n for n in bc.po_names if n.endswith(".d")] == \
        ["r_st[0].d", "r_st[1].d", "r_st[2].d"]


# -- constant propagation cases ------------------------------------------


def _mini(kind_line: str, extra: str = "") -> str:
    return f"circuit t\ninput a 1\noutput x 1\n{extra}{kind_line}\nend\n"


@pytest.mark.parametrize("line,extra,expect_kind", [
    ("gate and g x a k1", "const k1 1 0x1\n", "buf"),
    ("gate and g x a k0", "const k0 1 0x0\n", "const0"),
    ("gate or g x a k1", "const k1 1 0x1\n", "const1"),
    ("gate or g x a k0", "const k0 1 0x0\n", "buf"),
    ("gate xor g x a k0", "const k0 1 0x0\n", "buf"),
    ("gate xor g x a k1", "const k1 1 0x1\n", "inv"),
])
def test_constant_rules(line, extra, expect_kind):
    bc = elaborate(gnl.parse(_mini(line, extra)))
    red, log = reduce_circuit(bc)
    kinds = [c.kind for c in red.cells]
    assert kinds == [expect_kind]
    assert log.rewritten


def test_fa_with_constant_zero_becomes_ha():
    text = ("circuit t\ninput a 2\noutput s 2\nconst b 2 0x0\n"
            "gate add g s a b\nend\n")
    red, _ = reduce_circuit(elaborate(gnl.parse(text)))
    # a + 0 reduces to plain buffers
    assert all(c.kind == BUF for c in red.cells)


def test_no_constants_is_fixed_point(c1_reduced):
    again, log = propagate_constants(c1_reduced)
    assert not log.rewritten and not log.removed
    assert [c.name for c in again.cells] == [c.name for c in c1_reduced.cells]


def test_open_propagation_drops_dangling_chain():
    text = ("circuit t\ninput a 1\noutput x 1\nwire d1 1\nwire d2 1\nwire d3 1\n"
            "gate assign g1 x a\n"
            "gate assign h1 d1 a\ngate assign h2 d2 d1\ngate assign h3 d3 d2\nend\n")
    bc = elaborate(gnl.parse(text))
    red, log = propagate_opens(bc)
    assert [c.name for c in red.cells] == ["g1"]
    assert sorted(log.removed) == ["h1", "h2", "h3"]


def test_open_propagation_keeps_live_circuit(c1_reduced):
    red, log = propagate_opens(c1_reduced)
    assert not log.removed


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_reduction_preserves_function_random(seed):
    c = random_word_circuit(seed)
    bc = elaborate(c)
    if len(bc.pis) > 12:
        return
    from gifpo.stuckat import exhaustive_equivalence
    red, _ = reduce_circuit(bc)
    assert exhaustive_equivalence(bc, red) is None
