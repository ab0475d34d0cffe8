"""Builders for the bundled example circuits.

``build_adder``/``build_multiplier`` construct word-level circuits
programmatically; the multiplier macro expands to an AND partial-product
array plus n-1 ripple adder rows (each row an (n+1)-bit add whose top sum
bit captures the row carry, since the word-level ``add`` discards carries).

The bundled GNL files under ``gifpo/circuits`` are generated from these
builders (FSM-style examples are written by hand) and shipped as package
data; :func:`load_example` fetches them by name.
"""

from __future__ import annotations

import importlib.resources

from . import gnl
from .circuit import Circuit


def _gnl_lines(name: str, body: list[str]) -> Circuit:
    return gnl.parse("\n".join([f"circuit {name}"] + body + ["end"]) + "\n")


def build_adder(n: int, name: str | None = None) -> Circuit:
    """n-bit unsigned adder: s = a + b, carry out discarded."""
    name = name or f"add{n}"
    return _gnl_lines(name, [
        f"input a {n}",
        f"input b {n}",
        f"output s {n}",
        "gate add g0 s a b",
    ])


def build_multiplier(n: int, name: str | None = None) -> Circuit:
    """n x n array multiplier: AND partial products plus n-1 adder rows.

    Row 1 adds pp0 >> 1 to pp1; row r adds the previous row sum >> 1 to
    pp r.  Rows are n+1 bits wide with zeroed top operand bits, so bit n of
    each row sum is the row carry.  Output is the 2n-bit product.
    """
    if n < 2:
        raise ValueError("multiplier needs n >= 2")
    name = name or f"mul{n}"
    w = n + 1
    body = [f"input a {n}", f"input b {n}", f"output p {2 * n}",
            "const zero1 1 0x0", "const zero2 2 0x0"]
    for r in range(n):
        body += [
            f"wire b{r} 1",
            f"gate slice sb{r} b{r} b {r}",
            f"wire brep{r} {n}",
            f"gate concat rb{r} brep{r} {' '.join([f'b{r}'] * n)}",
            f"wire pp{r} {n}",
            f"gate and g_pp{r} pp{r} a brep{r}",
        ]
    body += [
        f"wire pp0h {n - 1}",
        "gate slice sl_pp0 pp0h pp0 1",
        f"wire u1 {w}",
        "gate concat c_u1 u1 pp0h zero2",
    ]
    for r in range(1, n):
        if r > 1:
            body += [
                f"wire s{r - 1}h {n}",
                f"gate slice sl_s{r - 1} s{r - 1}h s{r - 1} 1",
                f"wire u{r} {w}",
                f"gate concat c_u{r} u{r} s{r - 1}h zero1",
            ]
        body += [
            f"wire v{r} {w}",
            f"gate concat c_v{r} v{r} pp{r} zero1",
            f"wire s{r} {w}",
            f"gate add row{r} s{r} u{r} v{r}",
        ]
    body += ["wire p0 1", "gate slice sl_p0 p0 pp0 0"]
    taps = ["p0"]
    for r in range(1, n - 1):
        body += [f"wire t{r} 1", f"gate slice sl_t{r} t{r} s{r} 0"]
        taps.append(f"t{r}")
    body.append(f"gate concat c_p p {' '.join(taps)} s{n - 1}")
    return _gnl_lines(name, body)


def build_mux_tree(name: str = "muxtree", width: int = 2) -> Circuit:
    """4-to-1 word mux built from three 2-way muxes (select tree)."""
    return _gnl_lines(name, [
        "input sel 2",
        f"input d0 {width}",
        f"input d1 {width}",
        f"input d2 {width}",
        f"input d3 {width}",
        f"output y {width}",
        "wire s0 1",
        "wire s1 1",
        "gate slice g_s0 s0 sel 0",
        "gate slice g_s1 s1 sel 1",
        f"wire m01 {width}",
        f"wire m23 {width}",
        "gate mux2 g_m01 m01 s0 d0 d1",
        "gate mux2 g_m23 m23 s0 d2 d3",
        "gate mux2 g_y y s1 m01 m23",
    ])


C1_TEXT = """\
circuit c1
# x = (a & b) ^ c
input a 1
input b 1
input c 1
output x 1
wire d 1
gate and g1 d a b
gate xor g2 x d c
end
"""

C2_TEXT = """\
circuit c2
# permissible form of c1 with the a&b term duplicated:
#   e = a & b & !c, f = a & b, g = !f & c, x = e | g
input a 1
input b 1
input c 1
output x 1
wire e 1
wire f 1
wire g 1
gate and g_f f a b
gate and g_e e a b ~c
gate and g_g g ~f c
gate or g_x x e g
end
"""

B01_LIKE_TEXT = """\
circuit b01x
# serial two-line comparator-style controller: 3-bit state, two flags
input line1 1
input line2 1
output outp 1
output overflw 1
wire st 3
wire nst 3
wire eqin 1
wire stmax 1
wire sum 3
wire lift 3
wire nout 1
dff r_st st nst
const one 3 0x1
const three 3 0x3
gate xor g_eq eqin line1 line2
gate concat g_lift lift eqin line1 line2
gate add g_sum sum st one
gate eq g_max stmax st three
gate mux2 g_nst nst eqin sum lift
gate rxor g_out nout nst
gate assign g_po outp nout
gate and g_ovr overflw stmax eqin
end
"""

B02_LIKE_TEXT = """\
circuit b02x
# serial pattern follower: 3-bit counter state gated by the input bit
input u 1
output sign 1
wire st 3
wire nst 3
wire inc 3
wire hold 3
wire top 1
dff r_st st nst
const one 3 0x1
const five 3 0x5
gate add g_inc inc st one
gate eq g_top top st five
gate mux2 g_hold hold top inc one
gate mux2 g_nst nst u hold st
gate rand g_sign sign nst
end
"""

B06_LIKE_TEXT = """\
circuit b06x
# interrupt-acknowledge style controller: 3-bit state, two more state bits
input cc_mux 1
input eql 1
output ackout 1
output enable 1
wire st 3
wire nst 3
wire cnt 3
wire bump 3
wire atlim 1
wire req 1
wire ack 1
wire nack 1
wire en 1
wire en_d 1
dff r_st st nst
dff r_ack ack nack
dff r_en en en_d
const one 3 0x1
const zero 3 0x0
gate add g_bump bump st one
gate eq g_lim atlim st one
gate and g_req req cc_mux eql
gate mux2 g_cnt cnt req bump zero
gate mux2 g_nst nst eql cnt st
gate mux2 g_nack nack atlim req ack
gate xor g_end en_d atlim eql
gate assign g_ao ackout ack
gate or g_eo enable en req
end
"""


def build_c1() -> Circuit:
    return gnl.parse(C1_TEXT)


def build_c2() -> Circuit:
    return gnl.parse(C2_TEXT)


_GENERATED = {
    "c1": lambda: C1_TEXT,
    "c2": lambda: C2_TEXT,
    "add2": lambda: gnl.emit(build_adder(2)),
    "add4": lambda: gnl.emit(build_adder(4)),
    "add8": lambda: gnl.emit(build_adder(8)),
    "add64": lambda: gnl.emit(build_adder(64)),
    "mul3": lambda: gnl.emit(build_multiplier(3)),
    "mul4": lambda: gnl.emit(build_multiplier(4)),
    "mul8": lambda: gnl.emit(build_multiplier(8)),
    "muxtree": lambda: gnl.emit(build_mux_tree()),
    "b01x": lambda: B01_LIKE_TEXT,
    "b02x": lambda: B02_LIKE_TEXT,
    "b06x": lambda: B06_LIKE_TEXT,
}

EXAMPLES = tuple(sorted(_GENERATED))


def example_text(name: str) -> str:
    """GNL source of a bundled example, from package data when present."""
    try:
        res = importlib.resources.files("gifpo").joinpath(f"circuits/{name}.gnl")
        if res.is_file():
            return res.read_text()
    except (FileNotFoundError, ModuleNotFoundError):
        pass
    if name not in _GENERATED:
        raise KeyError(f"no bundled circuit named '{name}'")
    return _GENERATED[name]()


def load_example(name: str) -> Circuit:
    return gnl.parse(example_text(name))
