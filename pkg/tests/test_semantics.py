"""Interpretation tables and elementary-truth evaluation."""

import json
import random

import pytest

from clg.formulas import parse_formula
from clg.semantics import (
    EvalError, FuncTable, Interpretation, PredTable, eval_elementary,
    eval_term, load_interpretation, sample_interpretation,
)
from clg.formulas import parse_term


def ev(src, valuation=None, interp=None, bound=16):
    return eval_elementary(parse_formula(src), valuation or {},
                           interp or Interpretation.standard(), bound)


def test_builtin_arithmetic_terms():
    interp = Interpretation.standard()
    assert eval_term(parse_term("2' + 3 * 4"), {}, interp) == 15
    assert eval_term(parse_term("w * w'"), {"w": 3}, interp) == 12


def test_valuation_defaults_to_zero():
    assert ev("w = 0").value is True
    assert ev("w = 0", {"w": 2}).value is False


def test_quantifier_free_is_exact():
    r = ev("2 + 2 = 4 & ~(1 = 2)")
    assert r == (True, True)


def test_blind_witness_is_exact():
    assert ev("E x. x = 3'") == (True, True)
    assert ev("A x. ~(x = 5)") == (False, True)


def test_blind_saturation_is_approximate():
    assert ev("A x. x + 0 = x") == (True, False)
    assert ev("E x. x = x''") == (False, False)


def test_short_circuit_keeps_exactness():
    # the left conjunct settles it before the blind part is trusted
    assert ev("1 = 2 & (A x. x = x)") == (False, True)
    assert ev("1 = 1 | (A x. x = x)") == (True, True)


def test_uninterpreted_symbols_fail():
    with pytest.raises(EvalError):
        ev("p(1)")
    with pytest.raises(EvalError):
        ev("f(1) = 0")


def test_pred_and_func_tables():
    interp = Interpretation(
        preds={("even", 1): PredTable({(0,): True, (2,): True})},
        funcs={("half", 1): FuncTable({(0,): 0, (2,): 1})})
    assert ev("even(2)", interp=interp).value is True
    assert ev("even(1)", interp=interp).value is False
    assert ev("half(2) = 1", interp=interp).value is True
    with pytest.raises(EvalError):
        ev("half(5) = 0", interp=interp)


def test_func_table_default_makes_it_total():
    interp = Interpretation(funcs={("half", 1): FuncTable({(2,): 1}, 0)})
    assert ev("half(9) = 0", interp=interp).value is True


def test_choice_operators_are_not_elementary():
    with pytest.raises(EvalError):
        ev("p && q")


def test_load_interpretation_preset_and_file(tmp_path):
    assert load_interpretation("standard").name == "standard"
    spec = {
        "preds": [{"name": "even", "arity": 1, "default": False,
                   "true_on": [[0], [2], [4]]}],
        "funcs": [{"name": "half", "arity": 1, "default": 0,
                   "table": [[0, 0], [2, 1], [4, 2]]}],
    }
    path = tmp_path / "tables.json"
    path.write_text(json.dumps(spec), encoding="utf-8")
    interp = load_interpretation(str(path))
    assert ev("even(4) & half(4) = 2", interp=interp).value is True
    assert ev("even(3)", interp=interp).value is False


def test_sample_interpretation_is_seed_stable_and_total():
    a = sample_interpretation(random.Random(7), [("p", 1)], [("f", 2)])
    b = sample_interpretation(random.Random(7), [("p", 1)], [("f", 2)])
    assert a.preds[("p", 1)].table == b.preds[("p", 1)].table
    assert a.funcs[("f", 2)].table == b.funcs[("f", 2)].table
    # defaults keep evaluation total far outside the table
    assert ev("f(9, 9) = f(9, 9)", interp=a).value is True
    assert ev("p(40)", interp=a).value in (True, False)
