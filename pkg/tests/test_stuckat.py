import random

import numpy as np
import pytest

from conftest import TI, naive_permanent_fault_detects
from gifpo import gnl, macros
from gifpo.circuit import CircuitError
from gifpo.elaborate import elaborate, reduce_circuit, to_gate_netlist
from gifpo.engine import Stimulus, exhaustive_frames, stimulus_frames
from gifpo.stuckat import (enumerate_stuckat, exhaustive_equivalence,
                           fault_simulate, fault_simulate_frame,
                           remove_all_redundant, remove_redundant)

# per-cycle detection sets of the four-cycle production set on both example
# netlists; note the last cycle necessarily detects the input stuck-at-0
# faults in any equivalent netlist (x(0,1,1)=1 and x(1,0,1)=1 both differ
# from x(1,1,1)=0)
C1_CYCLE_SETS = [
    {"a-1", "c-1", "d-1", "x-1"},
    {"b-1", "c-0", "d-1", "x-0"},
    {"a-0", "b-0", "c-1", "d-0", "x-0"},
    {"a-0", "b-0", "c-0", "d-0", "x-1"},
]
C2_CYCLE_SETS = [
    {"a-1", "c-1", "e-1", "g-1", "x-1"},
    {"b-1", "c-0", "f-1", "g-0", "x-0"},
    {"a-0", "b-0", "c-1", "e-0", "x-0"},
    {"a-0", "b-0", "c-0", "e-1", "f-0", "g-1", "x-1"},
]


def netlist(name):
    return to_gate_netlist(macros.load_example(name))


def test_fault_counts():
    assert len(enumerate_stuckat(netlist("c1"))) == 10
    assert len(enumerate_stuckat(netlist("c2"))) == 14
    buf = to_gate_netlist(gnl.parse("circuit t\ninput a 1\noutput x 1\ngate buf g x a\nend\n"))
    assert len(enumerate_stuckat(buf)) == 4


def _frames(name, cycles):
    c = macros.load_example(name)
    nl = netlist(name)
    return c, nl, stimulus_frames(c, nl, Stimulus(["a", "b", "c"], cycles))


def test_c1_per_cycle_detection_sets():
    _, nl, frames = _frames("c1", TI)
    for t, want in enumerate(C1_CYCLE_SETS):
        assert fault_simulate_frame(nl, [int(v) for v in frames[t]]) == want


def test_c2_per_cycle_detection_sets():
    _, nl, frames = _frames("c2", TI)
    for t, want in enumerate(C2_CYCLE_SETS):
        assert fault_simulate_frame(nl, [int(v) for v in frames[t]]) == want


def test_production_set_covers_both_netlists():
    for name, total in (("c1", 10), ("c2", 14)):
        _, nl, frames = _frames(name, TI)
        res = fault_simulate(nl, frames)
        assert res.detected_count == total
        assert res.percent() == 100.0


def test_packed_matches_scalar_frame_sim():
    for name in ("c1", "c2"):
        _, nl, frames = _frames(name, TI)
        res = fault_simulate(nl, frames)
        for fi, f in enumerate(res.faults):
            scal = [t for t in range(len(frames))
                    if f.label in fault_simulate_frame(nl, [int(v) for v in frames[t]], [f])]
            want = scal[0] if scal else -1
            assert res.first_cycle[fi] == want, f.label


@pytest.mark.parametrize("name", ["c1", "c2", "muxtree"])
def test_frame_forcing_equals_permanent_fault_sim(name):
    """On combinational circuits a per-frame forced fault behaves exactly like
    a permanent fault carried through a serial simulation."""
    c = macros.load_example(name)
    nl = to_gate_netlist(c) if name in ("c1", "c2") else None
    if nl is None:
        red, _ = reduce_circuit(elaborate(c))
        from gifpo.variants import lower
        nl = lower(red, "ripple")
    rng = random.Random(7)
    frames = np.array([[rng.randint(0, 1) for _ in nl.pis] for _ in range(12)], dtype=bool)
    res = fault_simulate(nl, frames)
    for fi, f in enumerate(res.faults):
        serial = naive_permanent_fault_detects(nl, frames.astype(int).tolist(), f.net, f.value)
        want = serial[0] if serial else -1
        assert res.first_cycle[fi] == want, f.label


def test_sequential_serial_reference():
    """For a registered netlist under scan frames, per-frame detection equals
    the permanent-fault serial machine when states are injected each cycle."""
    c = macros.load_example("b02x")
    red, _ = reduce_circuit(elaborate(c))
    from gifpo.variants import lower
    nl = lower(red, "ripple")
    frames = exhaustive_frames(len(nl.pis))
    res = fault_simulate(nl, frames)
    # scan frames re-inject the state, so the faulty machine's state drift is
    # irrelevant: spot-check a handful of faults against single-frame forcing
    for f in res.faults[:10]:
        scal = [t for t in range(len(frames))
                if f.label in fault_simulate_frame(nl, [int(v) for v in frames[t]], [f])]
        assert (res.first_cycle[res.faults.index(f)] >= 0) == bool(scal)


def test_detection_invariant_under_cycle_reordering():
    _, nl, frames = _frames("c1", TI)
    res = fault_simulate(nl, frames)
    perm = frames[::-1]
    res2 = fault_simulate(nl, perm)
    assert set(np.nonzero(res.detected)[0]) == set(np.nonzero(res2.detected)[0])


def test_fault_batches_merge_to_sequential():
    _, nl, frames = _frames("c2", TI)
    faults = enumerate_stuckat(nl)
    full = fault_simulate(nl, frames, faults)
    a = fault_simulate(nl, frames, faults[:7])
    b = fault_simulate(nl, frames, faults[7:])
    merged = np.concatenate([a.first_cycle, b.first_cycle])
    assert np.array_equal(merged, full.first_cycle)


def test_curve_monotone():
    _, nl, frames = _frames("c1", TI)
    curve = fault_simulate(nl, frames).curve()
    assert all(curve[i] <= curve[i + 1] for i in range(len(curve) - 1))
    assert curve[-1] == 10


# -- equivalence ----------------------------------------------------------


def test_c1_equivalent_to_c2():
    assert exhaustive_equivalence(netlist("c1"), netlist("c2")) is None


def test_self_equivalence():
    nl = netlist("c1")
    assert exhaustive_equivalence(nl, nl) is None


def test_counterexample_for_and_or_swap():
    swapped = to_gate_netlist(gnl.parse(
        "circuit c1\ninput a 1\ninput b 1\ninput c 1\noutput x 1\nwire d 1\n"
        "gate or g1 d a b\ngate xor g2 x d c\nend\n"))
    cex = exhaustive_equivalence(netlist("c1"), swapped)
    assert cex is not None
    assert cex["vector"] == {"a": 0, "b": 1, "c": 0}


def test_signature_mismatch_raises():
    other = to_gate_netlist(gnl.parse(
        "circuit t\ninput a 1\ninput b 1\noutput x 1\ngate and g x a b\nend\n"))
    with pytest.raises(CircuitError):
        exhaustive_equivalence(netlist("c1"), other)


# -- redundancy removal -----------------------------------------------------

REDUNDANT_TEXT = """\
circuit red
input a 1
input b 1
output x 1
wire na 1
wire dead 1
wire t 1
gate inv g1 na a
gate and g2 dead a na
gate or g3 t a dead
gate and g4 x t b
end
"""


def test_remove_redundant_ties_and_simplifies():
    nl = to_gate_netlist(gnl.parse(REDUNDANT_TEXT))
    frames = exhaustive_frames(2)
    res = fault_simulate(nl, frames)
    undet = res.undetected_faults()
    assert any(f.name == "dead" and f.value == 0 for f in undet)
    reduced, log = remove_redundant(nl, [f for f in undet if f.net not in set(nl.pis)])
    assert ("dead", 0) in log.ties
    assert exhaustive_equivalence(nl, reduced) is None
    res2 = fault_simulate(reduced, frames)
    assert res2.detected_count == len(res2.faults)
    assert len(res2.faults) < len(res.faults)


def test_remove_redundant_untouched_when_clean():
    nl = netlist("c1")
    out, log = remove_redundant(nl, [])
    assert out is nl and not log.ties


def test_wrong_tie_polarity_aborts_with_counterexample():
    nl = netlist("c1")
    from gifpo.stuckat import StuckAtFault
    d = nl.net_names.index("d")
    # d stuck-at-0 is detectable, so tying d to 0 must be caught
    with pytest.raises(CircuitError) as e:
        remove_redundant(nl, [StuckAtFault(d, "d", 0)])
    assert e.value.code == "tie-not-equivalent"
    assert "counterexample" in str(e.value)


def test_remove_all_redundant_reaches_full_testability():
    nl = to_gate_netlist(gnl.parse(REDUNDANT_TEXT))
    reduced, logs = remove_all_redundant(nl)
    res = fault_simulate(reduced, exhaustive_frames(2))
    assert res.detected_count == len(res.faults)
    assert logs


def test_redundancy_removal_never_hurts_testset_coverage():
    nl = to_gate_netlist(gnl.parse(REDUNDANT_TEXT))
    frames = exhaustive_frames(2)[:3]
    before = fault_simulate(nl, frames)
    reduced, _ = remove_all_redundant(nl)
    after = fault_simulate(reduced, frames)
    before_labels = {f.label for f, t in zip(before.faults, before.first_cycle) if t < 0}
    after_labels = {f.label for f, t in zip(after.faults, after.first_cycle) if t < 0}
    assert len(after_labels) <= len(before_labels)


def test_parallel_fault_batches_equal_sequential():
    from gifpo.stuckat import fault_simulate_parallel
    c = macros.load_example("c2")
    nl = to_gate_netlist(c)
    frames = exhaustive_frames(3)
    seq = fault_simulate(nl, frames)
    par = fault_simulate_parallel(nl, frames, workers=3)
    assert np.array_equal(seq.first_cycle, par.first_cycle)
