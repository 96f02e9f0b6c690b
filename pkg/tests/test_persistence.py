import math
from fractions import Fraction

import numpy as np
import pytest

from lutzlab import persistence as ps
from lutzlab.errors import BasisOverflow, PreconditionFailed


@pytest.fixture
def xy_dga():
    """x odd with dx = 1, y odd closed: the minimal vanishing example."""
    return ps.FilteredDGA(
        [ps.Generator("x", 1, 3.0), ps.Generator("y", 1, 5.0)],
        {"x": [(1, [])]}, action_cap=10.0, word_cap=4)


# --- boundary operator -------------------------------------------------------

def test_leibniz_on_product(xy_dga):
    out = ps.boundary(xy_dga, {("x", "y"): 1})
    assert out == {xy_dga._parse_word(["y"]): Fraction(1)}


def test_unit_is_closed(xy_dga):
    assert ps.boundary(xy_dga, [(1, [])]) == {}


def test_even_power_rule():
    # d(x^2) = 2 x dx for even x with dx an odd generator
    dga = ps.FilteredDGA(
        [ps.Generator("z", 1, 1.0), ps.Generator("x", 0, 3.0)],
        {"x": [(1, ["z"])]}, action_cap=20.0, word_cap=4)
    out = ps.boundary(dga, [(1, ["x", "x"])])
    word = dga._parse_word(["z", "x"])
    assert out == {word: Fraction(2)}


def test_koszul_sign_second_factor():
    # d(y x) with x, y odd, dx = 1, dy = 0: passing d over y flips the sign
    dga = ps.FilteredDGA(
        [ps.Generator("y", 1, 5.0), ps.Generator("x", 1, 3.0)],
        {"x": [(1, [])]}, action_cap=10.0, word_cap=4)
    out = ps.boundary(dga, {("y", "x"): 1})
    assert out == {dga._parse_word(["y"]): Fraction(-1)}


def test_odd_square_dies(xy_dga):
    with pytest.raises(ValueError):
        xy_dga._parse_word(["y", "y"])


def test_boundary_overflow():
    # a two-letter differential word pushes products past the word cap
    dga = ps.FilteredDGA(
        [ps.Generator("y", 1, 1.0), ps.Generator("z", 1, 2.0),
         ps.Generator("x", 1, 5.0), ps.Generator("w", 0, 1.0)],
        {"x": [(1, ["y", "z"])]}, action_cap=50.0, word_cap=2)
    with pytest.raises(BasisOverflow):
        ps.boundary(dga, {("x", "w"): 1})  # d(xw) contains y*z*w, length 3


def test_differential_validation():
    with pytest.raises(ValueError):  # action must strictly decrease
        ps.FilteredDGA([ps.Generator("x", 1, 3.0),
                        ps.Generator("z", 0, 4.0)],
                       {"x": [(1, ["z"])]}, 10.0, 4)
    with pytest.raises(ValueError):  # parity must drop by one
        ps.FilteredDGA([ps.Generator("x", 0, 3.0)],
                       {"x": [(1, [])]}, 10.0, 4)


# --- d squared ---------------------------------------------------------------

def test_d_squared_good(xy_dga):
    assert ps.d_squared_check(xy_dga)


def test_d_squared_bad():
    bad = ps.FilteredDGA(
        [ps.Generator("y", 1, 1.0), ps.Generator("x", 0, 3.0)],
        {"x": [(1, ["y"])], "y": [(1, [])]}, 10.0, 4)
    assert not ps.d_squared_check(bad)


def test_d_squared_empty():
    dga = ps.FilteredDGA([ps.Generator("x", 1, 1.0)], {}, 10.0, 3)
    assert ps.d_squared_check(dga)


# --- unit level --------------------------------------------------------------

def test_unit_level_single_primitive(xy_dga):
    assert ps.unit_vanishing_level(xy_dga) == 3.0


def test_unit_level_picks_minimum():
    dga = ps.FilteredDGA(
        [ps.Generator("x1", 1, 3.0), ps.Generator("x2", 1, 2.0)],
        {"x1": [(1, [])], "x2": [(1, [])]}, 10.0, 4)
    assert ps.unit_vanishing_level(dga) == 2.0


def test_unit_level_infinite():
    dga = ps.FilteredDGA([ps.Generator("x", 1, 3.0)], {}, 10.0, 4)
    assert math.isinf(ps.unit_vanishing_level(dga))


# --- leibniz bound -----------------------------------------------------------

def test_leibniz_bound_values(xy_dga):
    assert ps.leibniz_upper_bound(xy_dga, ["y"]) == 8.0
    assert ps.leibniz_upper_bound(xy_dga, []) == 3.0


def test_leibniz_bound_preconditions():
    no_prim = ps.FilteredDGA([ps.Generator("x", 1, 3.0)], {}, 10.0, 4)
    with pytest.raises(PreconditionFailed):
        ps.leibniz_upper_bound(no_prim, ["x"])
    dga = ps.FilteredDGA(
        [ps.Generator("z", 1, 1.0), ps.Generator("x", 0, 3.0),
         ps.Generator("w", 1, 0.5)],
        {"x": [(1, ["z"])], "w": [(1, [])]}, 10.0, 4)
    with pytest.raises(PreconditionFailed):
        ps.leibniz_upper_bound(dga, ["x"])  # x is not closed


# --- barcodes ----------------------------------------------------------------

def test_barcode_minimal_example(xy_dga):
    bars = {(b.label, b.birth, b.death) for b in ps.barcode(xy_dga).bars}
    assert ("1", 0.0, 3.0) in bars
    assert ("y", 5.0, 8.0) in bars  # killed by x*y


def test_barcode_zero_differential_all_infinite():
    dga = ps.FilteredDGA(
        [ps.Generator("x", 1, 3.0), ps.Generator("w", 0, 2.0)], {},
        10.0, 3)
    bc = ps.barcode(dga)
    assert all(math.isinf(b.death) for b in bc.bars)


def test_barcode_polynomial_algebra():
    dga = ps.FilteredDGA([ps.Generator("x", 0, 3.0)], {}, 10.0, 4)
    bars = [(b.label, b.birth, b.death) for b in ps.barcode(dga).bars]
    assert bars == [("1", 0.0, math.inf), ("x", 3.0, math.inf),
                    ("x^2", 6.0, math.inf), ("x^3", 9.0, math.inf)]


def test_barcode_empty_dga():
    dga = ps.FilteredDGA([], {}, 10.0, 4)
    bars = ps.barcode(dga).bars
    assert len(bars) == 1 and bars[0].label == "1" \
        and math.isinf(bars[0].death)


def test_barcode_requires_d_squared_zero():
    bad = ps.FilteredDGA(
        [ps.Generator("y", 1, 1.0), ps.Generator("x", 0, 3.0)],
        {"x": [(1, ["y"])], "y": [(1, [])]}, 10.0, 4)
    with pytest.raises(PreconditionFailed):
        ps.barcode(bad)
    with pytest.raises(PreconditionFailed):
        ps.brute_force_oracle(bad)


def test_random_three_generator_oracle_equality():
    rng = np.random.default_rng(42)
    for _ in range(10):
        dga = ps.random_admissible_dga(rng, n_generators=3)
        assert ps.barcode(dga).bars == ps.brute_force_oracle(dga).bars


def test_random_chain_oracle_equality():
    rng = np.random.default_rng(43)
    for _ in range(25):
        dga = ps.random_chain_dga(rng)
        assert ps.d_squared_check(dga)
        assert ps.barcode(dga).bars == ps.brute_force_oracle(dga).bars


def test_filtration_monotonicity_random():
    rng = np.random.default_rng(44)
    for _ in range(10):
        dga = ps.random_chain_dga(rng)
        for w in dga.basis():
            img = dga.boundary_word(w)
            for w2 in img:
                assert dga.word_action(w2) < dga.word_action(w)


def test_determinism_bit_reproducible(xy_dga):
    b1 = ps.barcode(xy_dga)
    b2 = ps.barcode(xy_dga)
    assert b1.bars == b2.bars
    assert ps.unit_vanishing_level(xy_dga) == ps.unit_vanishing_level(xy_dga)


# --- serialization -----------------------------------------------------------

def test_json_round_trip(xy_dga):
    back = ps.FilteredDGA.from_json(xy_dga.to_json())
    assert ps.barcode(back).bars == ps.barcode(xy_dga).bars


def test_json_schema_parses():
    text = """{
      "generators": [{"name": "x", "degree": 1, "action": 3.0},
                     {"name": "y", "degree": 1, "action": 5.0}],
      "differential": {"x": [{"coeff": "2/3", "word": []}]},
      "action_cap": 10.0, "word_cap": 4}"""
    dga = ps.FilteredDGA.from_json(text)
    assert dga.differential[0] == [(Fraction(2, 3), ())]
    assert ps.unit_vanishing_level(dga) == 3.0


def test_barcode_csv(tmp_path, xy_dga):
    out = tmp_path / "bars.csv"
    ps.barcode(xy_dga).to_csv(str(out))
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "label,birth,death"
    assert any(line == "1,0,3" for line in lines)
    survivor = ps.FilteredDGA([ps.Generator("w", 0, 2.0)], {}, 10.0, 2)
    ps.barcode(survivor).to_csv(str(out))
    assert any(line.endswith(",inf")
               for line in out.read_text().strip().splitlines())


def test_oracle_basis_overflow_guard():
    gens = [ps.Generator(f"e{i}", 0, 0.01) for i in range(8)]
    dga = ps.FilteredDGA(gens, {}, action_cap=10.0, word_cap=8)
    with pytest.raises(BasisOverflow):
        ps.brute_force_oracle(dga)
