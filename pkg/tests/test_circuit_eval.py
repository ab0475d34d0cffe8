import random

import pytest

from gifpo import gnl, macros

# fault-free values of the two internal columns for all eight input rows
C1_TRUTH = {
    (0, 0, 0): (0, 0), (0, 0, 1): (0, 1), (0, 1, 0): (0, 0), (0, 1, 1): (0, 1),
    (1, 0, 0): (0, 0), (1, 0, 1): (0, 1), (1, 1, 0): (1, 1), (1, 1, 1): (1, 0),
}


def test_c1_truth_table(c1):
    for (a, b, c), (d, x) in C1_TRUTH.items():
        vals = c1.eval_frame({"a": a, "b": b, "c": c})
        assert (vals["d"], vals["x"]) == (d, x)


def test_add_wraparound():
    adder = macros.build_adder(4)
    assert adder.eval_frame({"a": 0xF, "b": 0x1})["s"] == 0x0
    assert adder.eval_frame({"a": 0xA, "b": 0x9})["s"] == 0x3


def test_adder_matches_integer_addition():
    adder = macros.build_adder(6)
    rng = random.Random(5)
    for _ in range(200):
        a, b = rng.randrange(64), rng.randrange(64)
        assert adder.eval_frame({"a": a, "b": b})["s"] == (a + b) % 64


@pytest.mark.parametrize("n", [2, 3, 4, 8])
def test_multiplier_matches_integer_product(n):
    c = macros.build_multiplier(n)
    rng = random.Random(n)
    pairs = [(a, b) for a in range(1 << n) for b in range(1 << n)] if n <= 4 else [
        (rng.randrange(1 << n), rng.randrange(1 << n)) for _ in range(300)]
    for a, b in pairs:
        assert c.eval_frame({"a": a, "b": b})["p"] == a * b


def test_word_ops_against_python_ints():
    text = ("circuit ops\ninput a 4\ninput b 4\n"
            "output o_sub 4\noutput o_eq 1\noutput o_lt 1\noutput o_shl 4\n"
            "output o_shr 4\noutput o_rx 1\noutput o_ra 1\noutput o_ro 1\n"
            "output o_cat 8\noutput o_sl 2\n"
            "gate sub g1 o_sub a b\n"
            "gate eq g2 o_eq a b\n"
            "gate lt g3 o_lt a b\n"
            "gate shl g4 o_shl a 2\n"
            "gate shr g5 o_shr a 1\n"
            "gate rxor g6 o_rx a\n"
            "gate rand g7 o_ra a\n"
            "gate ror g8 o_ro a\n"
            "gate concat g9 o_cat a b\n"
            "gate slice g10 o_sl a 1\n"
            "end\n")
    c = gnl.parse(text)
    for a in range(16):
        for b in range(16):
            v = c.eval_frame({"a": a, "b": b})
            assert v["o_sub"] == (a - b) % 16
            assert v["o_eq"] == int(a == b)
            assert v["o_lt"] == int(a < b)
            assert v["o_shl"] == (a << 2) & 0xF
            assert v["o_shr"] == a >> 1
            assert v["o_rx"] == bin(a).count("1") % 2
            assert v["o_ra"] == int(a == 15)
            assert v["o_ro"] == int(a != 0)
            assert v["o_cat"] == a | (b << 4)
            assert v["o_sl"] == (a >> 1) & 0x3


def test_sequential_state_evolution():
    text = ("circuit ctr\ninput en 1\noutput q 2\nwire st 2\nwire nst 2\nwire inc 2\n"
            "const one 2 0x1\ndff r st nst\n"
            "gate add g1 inc st one\ngate mux2 g2 nst en st inc\n"
            "gate assign g3 q st\nend\n")
    c = gnl.parse(text)
    frames = [{"en": 1}] * 5 + [{"en": 0}] * 2
    outs = [v["q"] for v in c.run(frames)]
    assert outs == [0, 1, 2, 3, 0, 1, 1]


def test_eval_is_pure(c1):
    pi = {"a": 1, "b": 1, "c": 0}
    assert c1.eval_frame(pi) == c1.eval_frame(pi)
