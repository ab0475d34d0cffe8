"""Command line front end.

Subcommands map one-to-one onto the library operations: ``parse``/``gifs``
inspect circuits, ``cover``/``faultsim`` run the two simulators, ``synth``
emits netlist variants, ``select``/``compact``/``export`` shape test sets,
``report`` runs the whole flow for one design and ``serve`` starts the
HTTP workbench.  Any validation or flow error exits nonzero with its
diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, gnl, macros, tpg
from .circuit import Circuit, CircuitError
from .elaborate import elaborate, reduce_circuit, to_gate_netlist
from .engine import Stimulus, run_coverage, stimulus_frames
from .gif import enumerate_gifs
from .stuckat import fault_simulate
from .variants import STYLES, SynthStyle, lower
from .workbench import (coverage_report, format_row, init_workspace, prepare,
                        run_report)


def _read_circuit(path: str) -> tuple[str, Circuit]:
    if path in macros.EXAMPLES and not Path(path).exists():
        text = macros.example_text(path)
    else:
        text = Path(path).read_text()
    return text, gnl.parse(text)


def _load_stim(path: str) -> Stimulus:
    return Stimulus.parse(Path(path).read_text())


def cmd_parse(args) -> int:
    _, c = _read_circuit(args.circuit)
    bc = elaborate(c)
    print(f"{c.name}: ports={len(c.ports)} nets={len(c.nets)} gates={len(c.gates)} "
          f"registers={len(c.registers)}; elaborated cells={len(bc.cells)} "
          f"pis={len(bc.pis)} pos={len(bc.pos)}")
    return 0


def cmd_gifs(args) -> int:
    if args.kind:
        n_ins = {"buf": 1, "inv": 1, "and": 2, "or": 2, "xor": 2,
                 "mux": 3, "ha": 2, "fa": 3}.get(args.kind, 2)
        classes = enumerate_gifs(args.kind, n_ins)
        print(f"{args.kind}: {len(classes)} classes, "
              f"{sum(len(c.members) for c in classes)} member faults")
        for cl in classes:
            print(f"  out={cl.out_name} m={cl.minterm_str(n_ins)} "
                  f"alpha={cl.alpha} members={','.join(cl.labels)}")
        return 0
    _, c = _read_circuit(args.circuit)
    prep = prepare(gnl.emit(c))
    u = prep.universe
    print(f"{c.name}: universe={u.total} points over {len(prep.reduced.cells)} cells, "
          f"{len(prep.reduced.pos)} primary outputs")
    return 0


def cmd_cover(args) -> int:
    text, c = _read_circuit(args.circuit)
    fpd_text = Path(args.fpd).read_text() if args.fpd else None
    prep = prepare(text, fpd_text)
    st = _load_stim(args.stim)
    db = run_coverage(c, prep.reduced, prep.universe, st, block_frames=args.block)
    u = prep.universe
    print(f"GIF-PO {db.covered_count}/{u.open_count} ({db.percent:.1f}%)"
          + (f", {u.unreachable_count} unreachable" if u.unreachable_count else ""))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "coverage.json").write_text(
            json.dumps(coverage_report(u, db), indent=1) + "\n")
        curve = db.curve()
        (out / "gif_curve.csv").write_text(
            "cycle,covered\n" + "\n".join(f"{t},{v}" for t, v in enumerate(curve)) + "\n")
    return 0


def cmd_faultsim(args) -> int:
    text, c = _read_circuit(args.circuit)
    nl = to_gate_netlist(c)
    st = _load_stim(args.stim)
    frames = stimulus_frames(c, nl, st)
    res = fault_simulate(nl, frames, block_frames=args.block)
    print(f"stuck-at {res.detected_count}/{len(res.faults)} "
          f"({res.percent():.1f}%) over {res.n_cycles} cycles")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        report = [{"fault": f.label, "status": "detected" if t >= 0 else "undetected",
                   "first_cycle": int(t) if t >= 0 else None}
                  for f, t in zip(res.faults, res.first_cycle)]
        (out / "faults.json").write_text(json.dumps(report, indent=1) + "\n")
        (out / "fault_curve.csv").write_text(
            "cycle,detected\n" + "\n".join(f"{t},{v}" for t, v in enumerate(res.curve())) + "\n")
    return 0


def cmd_synth(args) -> int:
    text, c = _read_circuit(args.circuit)
    red, _ = reduce_circuit(elaborate(c))
    nl = lower(red, SynthStyle(args.style, seed=args.seed, steps=args.steps))
    out_text = _netlist_gnl(nl)
    if args.output:
        Path(args.output).write_text(out_text)
    else:
        sys.stdout.write(out_text)
    return 0


def _netlist_gnl(nl) -> str:
    """Serialize a gate netlist to GNL text.

    Output-port nets are renamed to their port name so the re-parsed
    netlist is structurally identical; only a port aliasing an input net
    (pure feedthrough) needs an extra assign gate.
    """
    from .elaborate import AND, BUF, CONST0, CONST1, INV, OR, XOR
    pi_set = set(nl.pis)
    # PO order is output-port bits first, then one entry per register bit
    n_ports = len(nl.pos) - len(nl.regs)
    out_ports = list(zip(nl.pos, nl.po_names))[:n_ports]
    rename: dict[int, str] = {}
    feedthrough: list[tuple[str, str]] = []  # (port name, source net name)
    for n, nm in out_ports:
        if n in pi_set or n in rename:
            feedthrough.append((nm, rename.get(n, nl.net_names[n])))
        else:
            rename[n] = nm

    def name(i: int) -> str:
        return rename.get(i, nl.net_names[i])

    lines = [f"circuit {nl.name}"]
    q_nets = {r.q for r in nl.regs}
    for n in nl.pis:
        if n not in q_nets:
            lines.append(f"input {name(n)} 1")
    for _, nm in out_ports:
        lines.append(f"output {nm} 1")
    const_cells = [c for c in nl.cells if c.kind in (CONST0, CONST1)]
    const_nets = {c.outs[0] for c in const_cells}
    declared = (pi_set - q_nets) | set(rename) | const_nets
    for i in range(len(nl.net_names)):
        if i not in declared:
            lines.append(f"wire {name(i)} 1")
    for c in const_cells:
        lines.append(f"const {name(c.outs[0])} 1 0x{1 if c.kind == CONST1 else 0:x}")
    for r in nl.regs:
        lines.append(f"dff {r.name} {name(r.q)} {name(r.d)}"
                     + (f" init=0x{r.init:x}" if r.init else ""))
    kind_names = {AND: "and", OR: "or", XOR: "xor", INV: "inv", BUF: "buf"}
    for c in nl.cells:
        if c.kind in (CONST0, CONST1):
            continue
        ins = " ".join(("~" if f else "") + name(i) for i, f in zip(c.ins, c.negs()))
        lines.append(f"gate {kind_names[c.kind]} {c.name.replace(' ', '_')} "
                     f"{name(c.outs[0])} {ins}")
    for nm, src_name in feedthrough:
        lines.append(f"gate assign po/{nm} {nm} {src_name}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def cmd_select(args) -> int:
    text, c = _read_circuit(args.circuit)
    prep = prepare(text, Path(args.fpd).read_text() if args.fpd else None)
    st = _load_stim(args.stim)
    ts = tpg.greedy_select(prep.universe, c, prep.reduced, st)
    print(f"selected {len(ts)}/{len(st)} cycles, covers "
          f"{ts.covered}/{ts.target_total} ({ts.coverage_pct:.1f}%)")
    if args.output:
        tpg.export(ts, args.output)
    return 0


def cmd_compact(args) -> int:
    text, c = _read_circuit(args.circuit)
    st = _load_stim(args.stim)
    ts = tpg.TestSet(st, list(range(len(st))))
    if args.metric == "gifpo":
        prep = prepare(text)
        out = tpg.compact(ts, c, prep.reduced, "gifpo", universe=prep.universe)
    else:
        nl_text, nc = _read_circuit(args.netlist or args.circuit)
        nl = to_gate_netlist(nc)
        out = tpg.compact(ts, nc, nl, "stuckat")
    print(f"compacted {len(st)} -> {len(out)} cycles at "
          f"{out.coverage_pct:.1f}% {args.metric} coverage")
    if args.output:
        tpg.export(out, args.output)
    return 0


def cmd_export(args) -> int:
    st = _load_stim(args.stim)
    ts = tpg.TestSet(st, list(range(len(st))))
    if args.format == "stim":
        Path(args.output).write_text(st.format())
    else:
        tpg.export(ts, Path(args.output).with_suffix(".stim"), args.output)
    print(f"wrote {args.output}")
    return 0


def cmd_report(args) -> int:
    text, c = _read_circuit(args.circuit)
    name = c.name
    workdir = Path(args.workspace) if args.workspace else None
    stim = _load_stim(args.stim) if args.stim else None
    res = run_report(text, name, workdir, gen=args.gen, style=args.style,
                     stimulus=stim, seed=args.seed, block_frames=args.block)
    print(format_row(res.row))
    if res.run_dir:
        print(f"artifacts: {res.run_dir}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import make_app
    root = Path(args.workspace)
    if args.init_example:
        init_workspace(root, args.init_example)
    static = Path(args.static) if args.static else None
    app = make_app(root, stimulus=args.stim, static_dir=static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_examples(args) -> int:
    if args.write:
        outdir = Path(args.write)
        outdir.mkdir(parents=True, exist_ok=True)
        for name in macros.EXAMPLES:
            (outdir / f"{name}.gnl").write_text(macros.example_text(name))
        print(f"wrote {len(macros.EXAMPLES)} circuits to {outdir}")
    else:
        for name in macros.EXAMPLES:
            print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gifpo", description=__doc__)
    ap.add_argument("--version", action="version", version=f"gifpo {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, stim_required=True):
        p.add_argument("circuit", help="GNL file or bundled example name")
        if stim_required:
            p.add_argument("--stim", required=True, help="stimulus file")
        p.add_argument("--block", type=int, default=4096, help="frames per packed block")

    p = sub.add_parser("parse", help="validate a circuit and print its shape")
    p.add_argument("circuit")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("gifs", help="fault classes of a cell kind or a circuit's universe")
    p.add_argument("circuit", nargs="?", default=None)
    p.add_argument("--kind", help="cell kind (and, or, xor, inv, buf, mux, ha, fa)")
    p.set_defaults(func=cmd_gifs)

    p = sub.add_parser("cover", help="run coverage for a stimulus")
    common(p)
    p.add_argument("--fpd", help="false path database file")
    p.add_argument("--out", help="directory for coverage.json / gif_curve.csv")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("faultsim", help="stuck-at fault simulation of a gate netlist")
    common(p)
    p.add_argument("--out", help="directory for faults.json / fault_curve.csv")
    p.set_defaults(func=cmd_faultsim)

    p = sub.add_parser("synth", help="emit an equivalent gate netlist")
    p.add_argument("circuit")
    p.add_argument("--style", choices=STYLES, default="ripple")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("select", help="keep the coverage-contributing cycles")
    common(p)
    p.add_argument("--fpd")
    p.add_argument("-o", "--output", help="write selected stimulus + manifest")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("compact", help="greedy set-cover test set compaction")
    common(p)
    p.add_argument("--metric", choices=("gifpo", "stuckat"), default="gifpo")
    p.add_argument("--netlist", help="gate netlist for the stuckat metric")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compact)

    p = sub.add_parser("export", help="re-emit a stimulus with a JSON manifest")
    p.add_argument("stim")
    p.add_argument("--format", choices=("stim", "json"), default="json")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("report", help="full flow: coverage, selection, netlist fault sim")
    p.add_argument("circuit")
    p.add_argument("--workspace", help="persist run artifacts here")
    p.add_argument("--stim", help="use this stimulus instead of the generator")
    p.add_argument("--gen", choices=("exhaustive", "sweep", "random"))
    p.add_argument("--style", choices=STYLES)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--block", type=int, default=4096)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="start the HTTP workbench")
    p.add_argument("workspace")
    p.add_argument("--stim", help="stimulus (relative to workspace) to cover on startup")
    p.add_argument("--init-example", help="materialize this bundled example first")
    p.add_argument("--static", help="directory with the browser UI build")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("examples", help="list or write the bundled circuits")
    p.add_argument("--write", help="write all bundled .gnl files to this directory")
    p.set_defaults(func=cmd_examples)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CircuitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
