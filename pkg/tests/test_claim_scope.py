"""Scope of the coverage-implies-fault-coverage property.

The property "a test set covering 100% of the (class, output) universe
detects 100% of the non-redundant stuck-at faults of any equivalent netlist"
holds empirically for the netlist families the model was built against
(direct cell mapping and per-bit AND-OR carry trees, where the observability
of every duplicated region is implied by the source circuit's own
conditions).  It is not universal: duplicating a region whose observation
requires side conditions that no coverage point forces yields an equivalent
netlist with a testable fault whose only detecting vectors a minimal
full-coverage set may skip.  One organically found counterexample is frozen
here so the boundary stays visible.
"""

import pytest

from gifpo import macros
from gifpo.elaborate import elaborate, reduce_circuit
from gifpo.engine import run_coverage, stimulus_frames
from gifpo.gif import build_universe, mark_unreachable_auto
from gifpo.stuckat import fault_simulate
from gifpo.tpg import gen_exhaustive, greedy_select
from gifpo.variants import SynthStyle, lower

REFERENCE_STYLES = [SynthStyle("ripple"), SynthStyle("aotree"),
                    SynthStyle("rewrite", seed=11, steps=8)]


def pipeline(name):
    c = macros.load_example(name)
    red, _ = reduce_circuit(elaborate(c))
    u = build_universe(red)
    ex = gen_exhaustive(c)
    frames = stimulus_frames(c, red, ex)
    db = run_coverage(c, red, u, frames)
    if db.covered_count < u.open_count:
        u = mark_unreachable_auto(u, db.first_cycle >= 0)
        db.universe = u
    sel = greedy_select(u, c, red, ex, db, quintuples=True)
    return c, red, u, frames, sel


@pytest.mark.parametrize("name", ["c1", "add2", "add4", "add8", "muxtree", "mul3", "mul4"])
def test_claim_holds_on_reference_style_netlists(name):
    c, red, u, frames, sel = pipeline(name)
    sel_cov = run_coverage(c, red, u, sel.stimulus)
    assert sel_cov.percent == 100.0
    for style in REFERENCE_STYLES:
        nl = lower(red, style)
        full = fault_simulate(nl, frames)
        tres = fault_simulate(nl, stimulus_frames(c, nl, sel.stimulus))
        missed = [f.label for f, ft, dt in
                  zip(full.faults, full.first_cycle, tres.first_cycle)
                  if ft >= 0 and dt < 0]
        assert not missed, (name, style.label(), missed[:5])


def test_claim_holds_for_the_two_level_single_gate_example():
    # the duplicated two-term form of the xor example is exactly the shape the
    # model was designed around: every full-coverage set detects all 14 faults
    c, red, u, frames, sel = pipeline("c1")
    nl = lower(red, "twolevel")
    tres = fault_simulate(nl, stimulus_frames(c, nl, sel.stimulus))
    assert tres.detected_count == len(tres.faults)


def test_counterexample_two_level_adder_is_genuine():
    """Frozen counterexample: the two-level expansion of the 4-bit adder has
    testable faults (inside per-product duplicated carry cones) that the
    full-coverage selected set misses; the faults are detected by other
    vectors of the same exhaustive stimulus, so the miss is a property
    violation, not a simulator artifact."""
    c, red, u, frames, sel = pipeline("add4")
    nl = lower(red, "twolevel")
    full = fault_simulate(nl, frames)
    assert full.detected_count < len(full.faults) or True  # some faults redundant
    tres = fault_simulate(nl, stimulus_frames(c, nl, sel.stimulus))
    missed = [f for f, ft, dt in zip(full.faults, full.first_cycle, tres.first_cycle)
              if ft >= 0 and dt < 0]
    assert missed, "expected the known counterexample to persist"
    # each missed fault really is detectable: the full run found a cycle
    for f in missed:
        fi = full.faults.index(f)
        assert full.first_cycle[fi] >= 0
