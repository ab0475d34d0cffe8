import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_word_circuit
from gifpo import macros
from gifpo.circuit import CircuitError
from gifpo.elaborate import elaborate, reduce_circuit, to_gate_netlist
from gifpo.stuckat import exhaustive_equivalence
from gifpo.variants import (STYLES, SynthStyle, has_duplicated_driver, lower,
                            variant_suite)


def reduced(name):
    red, _ = reduce_circuit(elaborate(macros.load_example(name)))
    return red


@pytest.mark.parametrize("name", ["c1", "add2", "add4", "muxtree", "mul3", "b01x", "b06x"])
@pytest.mark.parametrize("style", STYLES)
def test_style_preserves_function(name, style):
    red = reduced(name)
    nl = lower(red, SynthStyle(style, seed=5, steps=9))
    assert exhaustive_equivalence(red, nl) is None


def test_rewrite_zero_steps_is_ripple():
    red = reduced("add2")
    rip = lower(red, "ripple")
    rw0 = lower(red, SynthStyle("rewrite", seed=99, steps=0))
    assert rip.net_names == rw0.net_names
    assert rip.cells == rw0.cells


def test_rewrite_deterministic():
    red = reduced("muxtree")
    a = lower(red, SynthStyle("rewrite", seed=4, steps=12))
    b = lower(red, SynthStyle("rewrite", seed=4, steps=12))
    assert a.net_names == b.net_names and a.cells == b.cells
    c = lower(red, SynthStyle("rewrite", seed=5, steps=12))
    assert a.cells != c.cells


def test_rewrite_first_step_duplicates_a_driver():
    # needs a net with fanout >= 2; the mux tree's select bits qualify
    red = reduced("muxtree")
    nl = lower(red, SynthStyle("rewrite", seed=0, steps=1))
    assert has_duplicated_driver(nl)


def test_two_level_of_c1_is_the_permissible_example():
    """Expansion of the xor output over its pins reproduces the bundled
    duplicated-term netlist: seven nets, exhaustively equivalent."""
    red = reduced("c1")
    tl = lower(red, "twolevel")
    assert len(tl.net_names) == 7
    c2 = to_gate_netlist(macros.load_example("c2"))
    assert len(c2.net_names) == 7
    assert exhaustive_equivalence(tl, c2) is None
    kinds = sorted(c.kind for c in tl.cells)
    assert kinds == ["and", "and", "and", "or"]


def test_two_level_cone_limit():
    red = reduced("add64")
    with pytest.raises(CircuitError) as e:
        lower(red, "twolevel")
    assert e.value.code == "cone-too-wide"


def test_aotree_is_and_or_inv_only():
    red = reduced("add8")
    nl = lower(red, "aotree")
    assert {c.kind for c in nl.cells} <= {"and", "or", "inv", "buf"}


def test_aotree_duplicates_carry_logic():
    red = reduced("add4")
    rip = lower(red, "ripple")
    ao = lower(red, "aotree")
    assert len(ao.cells) > 2 * len(rip.cells)  # per-bit trees repeat the carries


def test_suite_shape_and_checks():
    red = reduced("add2")
    suite = variant_suite(red, 5, seed=7)
    assert len(suite) >= 5
    names = [st.name for st, _ in suite]
    assert {"ripple", "twolevel", "aotree", "rewrite"} <= set(names)
    assert any(has_duplicated_driver(nl) for _, nl in suite)
    for _, nl in suite:
        assert exhaustive_equivalence(red, nl) is None


def test_suite_count_one():
    red = reduced("c1")
    assert [s.name for s, _ in variant_suite(red, 1, seed=0)][0] == "ripple"


def test_unknown_style():
    with pytest.raises(CircuitError):
        lower(reduced("c1"), "mystery")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["ripple", "aotree", "rewrite"]))
def test_styles_on_random_circuits(seed, style):
    c = random_word_circuit(seed)
    red, _ = reduce_circuit(elaborate(c))
    if len(red.pis) > 12:
        return
    nl = lower(red, SynthStyle(style, seed=seed & 7, steps=6))
    assert exhaustive_equivalence(red, nl) is None


def test_no_dead_logic_in_lowered_netlists():
    # every netlist net must reach a primary output (dead gates would carry
    # undetectable faults and fake redundancy)
    for name in ("c1", "add4", "mul3"):
        red = reduced(name)
        for style in STYLES:
            nl = lower(red, SynthStyle(style, seed=3, steps=8))
            live = set(nl.pos)
            for ci in reversed(nl.order):
                cell = nl.cells[ci]
                if any(o in live for o in cell.outs):
                    live.update(cell.ins)
            dead = [nl.net_names[c.outs[0]] for c in nl.cells
                    if c.outs[0] not in live]
            assert not dead, (name, style, dead)
