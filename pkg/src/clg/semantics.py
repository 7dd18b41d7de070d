"""Valuations, interpretations, and truth of elementary formulas.

A valuation is a plain dict from variable names to naturals; lookups
are total, unlisted variables are 0.  An interpretation supplies
finite tables (with declared defaults) for predicate letters and
function letters beyond the built-in successor, sum, and product;
equality is always identity.  Blind quantifiers are evaluated over
0..blind_bound and the result says whether that truncation could have
mattered.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

from .formulas import (
    And, App, Atom, BlindAll, BlindEx, Bot, Const, Neg, Or, Top, Var,
    formula_text, is_elementary,
)

__all__ = ["EvalError", "PredTable", "FuncTable", "Interpretation",
           "EvalResult", "val_get", "eval_term", "eval_elementary",
           "load_interpretation", "sample_interpretation"]


class EvalError(ValueError):
    pass


@dataclass
class PredTable:
    table: dict          # args tuple -> bool
    default: bool = False

    def __call__(self, args):
        return self.table.get(args, self.default)


@dataclass
class FuncTable:
    table: dict          # args tuple -> natural
    default: int | None = None  # None: applications outside the table fail

    def __call__(self, name, args):
        if args in self.table:
            return self.table[args]
        if self.default is None:
            raise EvalError(f"{name}{args} outside function table bound")
        return self.default


@dataclass
class Interpretation:
    preds: dict = field(default_factory=dict)  # (name, arity) -> PredTable
    funcs: dict = field(default_factory=dict)  # (name, arity) -> FuncTable
    name: str = ""

    @staticmethod
    def standard():
        return Interpretation(name="standard")

    def pred(self, name, args):
        if name == "=":
            return args[0] == args[1]
        t = self.preds.get((name, len(args)))
        if t is None:
            raise EvalError(f"predicate {name}/{len(args)} not interpreted")
        return bool(t(args))

    def func(self, name, args):
        if name == "'":
            return args[0] + 1
        if name == "+":
            return args[0] + args[1]
        if name == "*":
            return args[0] * args[1]
        t = self.funcs.get((name, len(args)))
        if t is None:
            raise EvalError(f"function {name}/{len(args)} not interpreted")
        return t(name, args)


def val_get(valuation, name):
    return valuation.get(name, 0)


def eval_term(t, valuation, interp):
    if isinstance(t, Var):
        return val_get(valuation, t.name)
    if isinstance(t, Const):
        return t.value
    if isinstance(t, App):
        return interp.func(t.func, tuple(eval_term(a, valuation, interp)
                                         for a in t.args))
    raise EvalError(f"not a term: {t!r}")


class EvalResult(NamedTuple):
    value: bool
    exact: bool

    def __bool__(self):
        return self.value


def eval_elementary(f, valuation, interp, blind_bound: int = 16) -> EvalResult:
    """Truth of an elementary formula, with a truncation-sensitivity flag.

    exact=True means the value cannot change however the blind
    quantifier ranges are extended past blind_bound.
    """
    if not is_elementary(f):
        raise EvalError(f"not elementary: {formula_text(f)}")
    return _ev(f, dict(valuation), interp, blind_bound)


def _ev(f, env, interp, bound):
    if isinstance(f, Atom):
        args = tuple(eval_term(t, env, interp) for t in f.args)
        return EvalResult(interp.pred(f.pred, args), True)
    if isinstance(f, Neg):
        v = _ev(f.body, env, interp, bound)
        return EvalResult(not v.value, v.exact)
    if isinstance(f, Top):
        return EvalResult(True, True)
    if isinstance(f, Bot):
        return EvalResult(False, True)
    if isinstance(f, And):
        a = _ev(f.left, env, interp, bound)
        if not a.value and a.exact:
            return EvalResult(False, True)
        b = _ev(f.right, env, interp, bound)
        if not b.value and b.exact:
            return EvalResult(False, True)
        return EvalResult(a.value and b.value, a.exact and b.exact)
    if isinstance(f, Or):
        a = _ev(f.left, env, interp, bound)
        if a.value and a.exact:
            return EvalResult(True, True)
        b = _ev(f.right, env, interp, bound)
        if b.value and b.exact:
            return EvalResult(True, True)
        return EvalResult(a.value or b.value, a.exact and b.exact)
    if isinstance(f, BlindAll):
        saved = env.get(f.var)
        exact_all = True
        try:
            for n in range(bound + 1):
                env[f.var] = n
                v = _ev(f.body, env, interp, bound)
                if not v.value:
                    # a counterexample below the bound settles it,
                    # provided the instance itself was exact
                    return EvalResult(False, v.exact)
                exact_all = exact_all and v.exact
        finally:
            if saved is None:
                env.pop(f.var, None)
            else:
                env[f.var] = saved
        return EvalResult(True, False)
    if isinstance(f, BlindEx):
        saved = env.get(f.var)
        try:
            for n in range(bound + 1):
                env[f.var] = n
                v = _ev(f.body, env, interp, bound)
                if v.value:
                    return EvalResult(True, v.exact)
        finally:
            if saved is None:
                env.pop(f.var, None)
            else:
                env[f.var] = saved
        return EvalResult(False, False)
    raise EvalError(f"not elementary: {formula_text(f)}")


# ---------------------------------------------------------------------------
# Interpretation files and sampling


def load_interpretation(spec: str) -> Interpretation:
    """Resolve an interpretation header value: a preset name or a JSON path.

    The JSON shape is {"preds": [{"name", "arity", "default", "true_on"}],
    "funcs": [{"name", "arity", "default", "table": [[args..., value]]}]}.
    """
    if spec.strip() == "standard":
        return Interpretation.standard()
    with open(spec.strip(), encoding="utf-8") as fh:
        data = json.load(fh)
    interp = Interpretation(name=spec.strip())
    for p in data.get("preds", ()):
        table = {tuple(row): True for row in p.get("true_on", ())}
        interp.preds[(p["name"], p["arity"])] = \
            PredTable(table, bool(p.get("default", False)))
    for fn in data.get("funcs", ()):
        table = {tuple(row[:-1]): row[-1] for row in fn.get("table", ())}
        interp.funcs[(fn["name"], fn["arity"])] = \
            FuncTable(table, fn.get("default"))
    return interp


def sample_interpretation(rng, pred_sigs, func_sigs=(), table_bound=4):
    """Random finite interpretation for the given signatures.

    pred_sigs and func_sigs are iterables of (name, arity).  Tables
    cover arguments below table_bound; predicate defaults are random,
    function defaults wrap into the table range so evaluation stays
    total.
    """
    import itertools

    interp = Interpretation(name="sampled")
    for name, arity in pred_sigs:
        table = {}
        for args in itertools.product(range(table_bound), repeat=arity):
            table[args] = rng.random() < 0.5
        interp.preds[(name, arity)] = PredTable(table, rng.random() < 0.5)
    for name, arity in func_sigs:
        table = {}
        for args in itertools.product(range(table_bound), repeat=arity):
            table[args] = rng.randrange(table_bound)
        interp.funcs[(name, arity)] = \
            FuncTable(table, rng.randrange(table_bound))
    return interp
