"""Gate-inherent-fault coverage model and test generation workbench.

Pipeline: parse a word-level GNL circuit, elaborate it into primitive cells,
reduce it by constant/open propagation, enumerate the per-output fault-class
universe, simulate stimulus to cover it, and verify against a gate-level
stuck-at fault simulator on synthesized netlist variants.

Submodules: ``gnl`` (text format), ``circuit`` (word-level IR),
``elaborate`` (bit-level cells and reductions), ``gif`` (fault classes and
universe), ``engine`` (packed simulation and coverage), ``stuckat`` (fault
oracle), ``variants`` (netlist styles), ``tpg`` (stimulus and compaction),
``workbench``/``service``/``cli`` (flow orchestration).
"""

__version__ = "0.1.0"

from .circuit import Circuit, CircuitError, GateInstance, GateKind
from .elaborate import BitCircuit, reduce_circuit, to_gate_netlist
from .engine import CoverageDB, Stimulus, run_coverage
from .gif import GifClass, GifPoUniverse, build_universe, enumerate_gifs
from .gnl import emit, parse
from .stuckat import enumerate_stuckat, exhaustive_equivalence, fault_simulate, remove_redundant
from .variants import SynthStyle, lower, variant_suite

__all__ = [
    "Circuit", "CircuitError", "GateInstance", "GateKind",
    "BitCircuit", "reduce_circuit", "to_gate_netlist",
    "CoverageDB", "Stimulus", "run_coverage",
    "GifClass", "GifPoUniverse", "build_universe", "enumerate_gifs",
    "emit", "parse",
    "enumerate_stuckat", "exhaustive_equivalence", "fault_simulate", "remove_redundant",
    "SynthStyle", "lower", "variant_suite",
]
