"""Formula and sequent syntax: AST, parser, printers, substitution.

Terms are built from variables, decimal constants, and function
applications; the successor symbol is spelled ' (postfix), + and * are
infix, everything else is f(t1,...,tn).

Formula connectives, in ascending binding strength:

    ->   implication (sugar, desugared at parse time)
    ||   choice disjunction
    &&   choice conjunction
    |    parallel disjunction
    &    parallel conjunction
    ~    negation (pushed to atoms at parse time)

Quantifiers `A x.` `E x.` (blind) and `AA x.` `EE x.` (choice) take the
longest formula to their right.  A sequent is written `F1, F2 |- G`.

After parsing, negation occurs only on atoms and `->` is gone, so the
rest of the package never sees either in compound positions.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from functools import lru_cache
import re

__all__ = [
    "Var", "Const", "App", "Atom", "Neg", "And", "Or", "CAnd", "COr",
    "BlindAll", "BlindEx", "ChoiceAll", "ChoiceEx", "Top", "Bot",
    "Sequent", "ParseError", "parse_term", "parse_formula", "parse_sequent",
    "term_text", "formula_text", "sequent_text", "formula_pretty",
    "sequent_pretty", "negate", "substitute", "subst_term", "free_vars",
    "bound_vars", "all_names", "term_vars", "fresh_var", "alpha_equal",
    "alpha_equal_sequents", "is_elementary", "elementarize",
    "sequent_elementarization", "subformula_at", "replace_at",
    "surface_choice_occurrences", "formula_size",
]


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class App:
    func: str
    args: tuple


Term = Var | Const | App

SUCC = "'"


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()


@dataclass(frozen=True)
class Neg:
    body: Atom


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class CAnd:
    """Choice conjunction: the environment picks a component."""
    left: object
    right: object


@dataclass(frozen=True)
class COr:
    """Choice disjunction: the machine picks a component."""
    left: object
    right: object


@dataclass(frozen=True)
class BlindAll:
    var: str
    body: object


@dataclass(frozen=True)
class BlindEx:
    var: str
    body: object


@dataclass(frozen=True)
class ChoiceAll:
    """Choice universal: the environment names a constant."""
    var: str
    body: object


@dataclass(frozen=True)
class ChoiceEx:
    """Choice existential: the machine names a constant."""
    var: str
    body: object


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


BINARY = (And, Or, CAnd, COr)
QUANT = (BlindAll, BlindEx, ChoiceAll, ChoiceEx)
CHOICE_NODES = (CAnd, COr, ChoiceAll, ChoiceEx)


@dataclass(frozen=True)
class Sequent:
    antecedent: tuple
    succedent: object

    def __str__(self):
        return sequent_text(self)


# Immutable value objects: deep copies of agent state may share them, the
# structural hash is worth computing once per node, and equality gains an
# identity fast path because substitution preserves untouched subtrees.
def _install_value_semantics(cls):
    names = tuple(f.name for f in fields(cls))
    label = cls.__name__

    def _h(self, _names=names, _label=label):
        d = self.__dict__
        h = d.get("_hash")
        if h is None:
            d["_hash"] = h = hash((_label,) + tuple(d[n] for n in _names))
        return h

    def _eq(self, other, _names=names):
        if self is other:
            return True
        if other.__class__ is not self.__class__:
            return NotImplemented
        d, e = self.__dict__, other.__dict__
        for n in _names:
            if d[n] is not e[n] and d[n] != e[n]:
                return False
        return True

    cls.__hash__ = _h
    cls.__eq__ = _eq
    cls.__deepcopy__ = lambda self, memo: self


for _c in (Var, Const, App, Atom, Neg, And, Or, CAnd, COr,
           BlindAll, BlindEx, ChoiceAll, ChoiceEx, Top, Bot, Sequent):
    _install_value_semantics(_c)
del _c


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)"
    r"|(?P<kw>AA|EE|A|E)\b"
    r"|(?P<name>[a-z][a-zA-Z0-9_]*)"
    r"|(?P<op>\|\||\|-|->|&&|!=|\$T|\$F|[()',.=~&|+*])"
    r")"
)


class ParseError(ValueError):
    pass


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"bad character {text[pos]!r} at {pos} in {text!r}")
        for kind in ("num", "kw", "name", "op"):
            val = m.group(kind)
            if val is not None:
                tokens.append((kind, val))
                break
        pos = m.end()
    tokens.append(("end", ""))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, val):
        kind, v = self.next()
        if v != val:
            raise ParseError(f"expected {val!r}, got {v!r} in {self.text!r}")

    def at(self, val):
        return self.toks[self.i][1] == val and self.toks[self.i][0] in ("op", "kw")

    def eat(self, val):
        if self.at(val):
            self.i += 1
            return True
        return False

    # --- terms ---

    def term(self):
        t = self.term_mul()
        while self.eat("+"):
            t = App("+", (t, self.term_mul()))
        return t

    def term_mul(self):
        t = self.term_atom()
        while self.eat("*"):
            t = App("*", (t, self.term_atom()))
        return t

    def term_atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.next()
            t = Const(int(val))
        elif kind == "name":
            self.next()
            if self.at("("):
                self.next()
                args = []
                if not self.at(")"):
                    args.append(self.term())
                    while self.eat(","):
                        args.append(self.term())
                self.expect(")")
                t = App(val, tuple(args))
            else:
                t = Var(val)
        elif val == "(":
            self.next()
            t = self.term()
            self.expect(")")
        else:
            raise ParseError(f"expected a term, got {val!r} in {self.text!r}")
        while self.eat(SUCC):
            t = App(SUCC, (t,))
        return t

    # --- formulas (surface syntax, before desugaring) ---

    def formula(self):
        f = self.f_cor()
        if self.eat("->"):
            return ("->", f, self.formula())
        return f

    def f_cor(self):
        f = self.f_cand()
        while self.eat("||"):
            f = ("||", f, self.f_cand())
        return f

    def f_cand(self):
        f = self.f_or()
        while self.eat("&&"):
            f = ("&&", f, self.f_or())
        return f

    def f_or(self):
        f = self.f_and()
        while self.eat("|"):
            f = ("|", f, self.f_and())
        return f

    def f_and(self):
        f = self.f_unary()
        while self.eat("&"):
            f = ("&", f, self.f_unary())
        return f

    def f_unary(self):
        kind, val = self.peek()
        if val == "~" and kind == "op":
            self.next()
            return ("~", self.f_unary())
        if kind == "kw":
            self.next()
            vkind, vname = self.next()
            if vkind != "name":
                raise ParseError(f"expected a variable after {val}, got {vname!r}")
            self.eat(".")
            return (val, vname, self.formula())
        if val == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if val == "$T":
            self.next()
            return Top()
        if val == "$F":
            self.next()
            return Bot()
        # an atom: a term possibly followed by = or !=
        t = self.term()
        if self.eat("="):
            return Atom("=", (t, self.term()))
        if self.eat("!="):
            return ("~", Atom("=", (t, self.term())))
        if isinstance(t, Var):
            return Atom(t.name, ())
        if isinstance(t, App) and t.func not in (SUCC, "+", "*"):
            return Atom(t.func, t.args)
        raise ParseError(f"term {term_text(t)} is not a formula in {self.text!r}")


_QUANT_BY_KW = {"A": BlindAll, "E": BlindEx, "AA": ChoiceAll, "EE": ChoiceEx}


def _desugar(node, neg=False):
    """Turn the surface parse into the core AST, pushing ~ to atoms."""
    if isinstance(node, tuple):
        tag = node[0]
        if tag == "->":
            _, a, b = node
            if neg:
                return And(_desugar(a), _desugar(b, neg=True))
            return Or(_desugar(a, neg=True), _desugar(b))
        if tag == "~":
            return _desugar(node[1], neg=not neg)
        if tag in ("&", "|", "&&", "||"):
            _, a, b = node
            cls = {"&": And, "|": Or, "&&": CAnd, "||": COr}[tag]
            if neg:
                cls = {And: Or, Or: And, CAnd: COr, COr: CAnd}[cls]
            return cls(_desugar(a, neg), _desugar(b, neg))
        if tag in _QUANT_BY_KW:
            _, v, body = node
            cls = _QUANT_BY_KW[tag]
            if neg:
                cls = {BlindAll: BlindEx, BlindEx: BlindAll,
                       ChoiceAll: ChoiceEx, ChoiceEx: ChoiceAll}[cls]
            return cls(v, _desugar(body, neg))
        raise AssertionError(node)
    if isinstance(node, Atom):
        return Neg(node) if neg else node
    if isinstance(node, Top):
        return Bot() if neg else node
    if isinstance(node, Bot):
        return Top() if neg else node
    raise AssertionError(node)


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    if p.peek()[0] != "end":
        raise ParseError(f"trailing input after term in {text!r}")
    return t


def parse_formula(text: str):
    p = _Parser(text)
    raw = p.formula()
    if p.peek()[0] != "end":
        raise ParseError(f"trailing input after formula in {text!r}")
    return _rename_apart(_desugar(raw))


def parse_sequent(text: str) -> Sequent:
    if "|-" not in text:
        raise ParseError(f"missing |- in sequent {text!r}")
    left, right = text.split("|-", 1)
    succ = _desugar(_parse_one(right))
    ante = []
    left = left.strip()
    if left:
        for part in _split_top_commas(left):
            ante.append(_desugar(_parse_one(part)))
    seq = Sequent(tuple(ante), succ)
    return _rename_apart_sequent(seq)


def _parse_one(text):
    p = _Parser(text)
    raw = p.formula()
    if p.peek()[0] != "end":
        raise ParseError(f"trailing input after formula in {text!r}")
    return raw


def _split_top_commas(text):
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return [p for p in (s.strip() for s in parts) if p]


# ---------------------------------------------------------------------------
# Variable bookkeeping


@lru_cache(maxsize=1 << 16)
def _term_var_set(t) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, App):
        out = frozenset()
        for a in t.args:
            out |= _term_var_set(a)
        return out
    return frozenset()


def term_vars(t: Term, acc=None):
    if acc is None:
        acc = set()
    acc.update(_term_var_set(t))
    return acc


@lru_cache(maxsize=1 << 16)
def _free_var_set(f) -> frozenset:
    if isinstance(f, Atom):
        out = frozenset()
        for t in f.args:
            out |= _term_var_set(t)
        return out
    if isinstance(f, Neg):
        return _free_var_set(f.body)
    if isinstance(f, BINARY):
        return _free_var_set(f.left) | _free_var_set(f.right)
    if isinstance(f, QUANT):
        return _free_var_set(f.body) - {f.var}
    return frozenset()


def free_vars(f, acc=None, bound=None):
    if acc is None:
        acc = set()
    s = _free_var_set(f)
    acc.update(s - bound if bound else s)
    return acc


@lru_cache(maxsize=1 << 16)
def _bound_var_set(f) -> frozenset:
    if isinstance(f, Neg):
        return _bound_var_set(f.body)
    if isinstance(f, BINARY):
        return _bound_var_set(f.left) | _bound_var_set(f.right)
    if isinstance(f, QUANT):
        return _bound_var_set(f.body) | {f.var}
    return frozenset()


def bound_vars(f, acc=None):
    if acc is None:
        acc = set()
    acc.update(_bound_var_set(f))
    return acc


def all_names(f) -> frozenset:
    return _free_var_set(f) | _bound_var_set(f)


def seq_free_vars(seq: Sequent):
    acc = set()
    for g in seq.antecedent:
        free_vars(g, acc)
    free_vars(seq.succedent, acc)
    return acc


@lru_cache(maxsize=1 << 15)
def seq_all_names(seq: Sequent) -> frozenset:
    acc = frozenset()
    for g in (*seq.antecedent, seq.succedent):
        acc |= all_names(g)
    return acc


def fresh_var(base: str, avoid) -> str:
    if base not in avoid:
        return base
    i = 1
    while f"{base}_{i}" in avoid:
        i += 1
    return f"{base}_{i}"


def _rename_apart(f, taboo=None):
    """Rename binders whose variable also occurs free in the parse unit."""
    taboo = free_vars(f) if taboo is None else taboo
    return _rename_clashing(f, taboo, set(all_names(f)) | set(taboo))


def _rename_apart_sequent(seq: Sequent) -> Sequent:
    taboo = seq_free_vars(seq)
    used = set(seq_all_names(seq)) | taboo
    fs = [_rename_clashing(g, taboo, used) for g in seq.antecedent]
    return Sequent(tuple(fs), _rename_clashing(seq.succedent, taboo, used))


def _rename_clashing(f, taboo, used):
    if isinstance(f, (Atom, Neg, Top, Bot)):
        return f
    if isinstance(f, BINARY):
        return type(f)(_rename_clashing(f.left, taboo, used),
                       _rename_clashing(f.right, taboo, used))
    if isinstance(f, QUANT):
        body = _rename_clashing(f.body, taboo, used)
        if f.var in taboo:
            nv = fresh_var(f.var, used)
            used.add(nv)
            body = substitute(body, {f.var: Var(nv)})
            return type(f)(nv, body)
        return type(f)(f.var, body)
    raise AssertionError(f)


# ---------------------------------------------------------------------------
# Substitution


def subst_term(t: Term, mapping) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, App):
        if not (_term_var_set(t) & mapping.keys()):
            return t
        return App(t.func, tuple(subst_term(a, mapping) for a in t.args))
    return t


def substitute(f, mapping):
    """Capture-avoiding substitution of terms for free variables.
    Returns the same object when nothing it binds occurs free."""
    if not mapping:
        return f
    if not (_free_var_set(f) & mapping.keys()):
        return f
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(subst_term(t, mapping) for t in f.args))
    if isinstance(f, Neg):
        return Neg(substitute(f.body, mapping))
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, BINARY):
        return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, QUANT):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        if not inner:
            return type(f)(f.var, f.body)
        clash = set()
        body_free = free_vars(f.body)
        for k, v in inner.items():
            if k in body_free:
                clash |= term_vars(v)
        var = f.var
        body = f.body
        if var in clash:
            nv = fresh_var(var, clash | body_free | set(inner) | {var})
            body = substitute(body, {var: Var(nv)})
            var = nv
        return type(f)(var, substitute(body, inner))
    raise AssertionError(f)


# ---------------------------------------------------------------------------
# Alpha-equivalence


def _alpha(f, g, env, rev):
    if f is g and all(env.get(v, v) == v and rev.get(v, v) == v
                      for v in _free_var_set(f)):
        return True
    if type(f) is not type(g):
        return False
    if isinstance(f, Atom):
        if f.pred != g.pred or len(f.args) != len(g.args):
            return False
        return all(_alpha_term(a, b, env, rev) for a, b in zip(f.args, g.args))
    if isinstance(f, Neg):
        return _alpha(f.body, g.body, env, rev)
    if isinstance(f, (Top, Bot)):
        return True
    if isinstance(f, BINARY):
        return _alpha(f.left, g.left, env, rev) and _alpha(f.right, g.right, env, rev)
    if isinstance(f, QUANT):
        env2 = dict(env)
        rev2 = dict(rev)
        env2[f.var] = g.var
        rev2[g.var] = f.var
        return _alpha(f.body, g.body, env2, rev2)
    raise AssertionError(f)


def _alpha_term(a, b, env, rev):
    if isinstance(a, Var) and isinstance(b, Var):
        if a.name in env or b.name in rev:
            return env.get(a.name) == b.name and rev.get(b.name) == a.name
        return a.name == b.name
    if type(a) is not type(b):
        return False
    if isinstance(a, Const):
        return a.value == b.value
    if isinstance(a, App):
        return (a.func == b.func and len(a.args) == len(b.args)
                and all(_alpha_term(x, y, env, rev) for x, y in zip(a.args, b.args)))
    return False


def alpha_equal(f, g) -> bool:
    """Equality up to renaming of bound variables (free names strict)."""
    return _alpha(f, g, {}, {})


def alpha_equal_sequents(s: Sequent, t: Sequent) -> bool:
    return (len(s.antecedent) == len(t.antecedent)
            and all(alpha_equal(a, b) for a, b in zip(s.antecedent, t.antecedent))
            and alpha_equal(s.succedent, t.succedent))


# ---------------------------------------------------------------------------
# Printing


_TP_ATOM, _TP_MUL, _TP_ADD = 3, 2, 1


def _term_text(t, level):
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return str(t.value)
    if t.func == SUCC:
        return _term_text(t.args[0], _TP_ATOM) + "'"
    if t.func == "*":
        s = f"{_term_text(t.args[0], _TP_MUL)}*{_term_text(t.args[1], _TP_ATOM)}"
        return f"({s})" if level > _TP_MUL else s
    if t.func == "+":
        s = f"{_term_text(t.args[0], _TP_ADD)}+{_term_text(t.args[1], _TP_MUL)}"
        return f"({s})" if level > _TP_ADD else s
    return f"{t.func}({', '.join(_term_text(a, 0) for a in t.args)})"


def term_text(t: Term) -> str:
    return _term_text(t, 0)


_FORMULA_LEVEL = {COr: 1, CAnd: 2, Or: 3, And: 4}
_FORMULA_SYM = {COr: "||", CAnd: "&&", Or: "|", And: "&"}
_QUANT_KW = {BlindAll: "A", BlindEx: "E", ChoiceAll: "AA", ChoiceEx: "EE"}


def _formula_text(f, level, rightmost, sym=_FORMULA_SYM, quant=_QUANT_KW,
                  neg="~", top="$T", bot="$F", neq="!="):
    if isinstance(f, Atom):
        if f.pred == "=":
            return f"{term_text(f.args[0])} = {term_text(f.args[1])}"
        if f.args:
            return f"{f.pred}({', '.join(term_text(a) for a in f.args)})"
        return f.pred
    if isinstance(f, Neg):
        if f.body.pred == "=":
            return f"{term_text(f.body.args[0])} {neq} {term_text(f.body.args[1])}"
        return neg + _formula_text(f.body, 9, rightmost, sym, quant,
                                   neg, top, bot, neq)
    if isinstance(f, Top):
        return top
    if isinstance(f, Bot):
        return bot
    if isinstance(f, BINARY):
        mine = _FORMULA_LEVEL[type(f)]
        wrap = level > mine
        s = (_formula_text(f.left, mine, False, sym, quant, neg, top, bot, neq)
             + f" {sym[type(f)]} "
             + _formula_text(f.right, mine + 1, rightmost and not wrap,
                             sym, quant, neg, top, bot, neq))
        return f"({s})" if wrap else s
    if isinstance(f, QUANT):
        # quantifier scope runs to the end of the string, so parens are
        # only dispensable when nothing follows
        s = f"{quant[type(f)]} {f.var}. " + _formula_text(
            f.body, 0, True, sym, quant, neg, top, bot, neq)
        return s if rightmost else f"({s})"
    raise AssertionError(f)


def formula_text(f) -> str:
    return _formula_text(f, 0, True)


_PRETTY_SYM = {COr: "⊔", CAnd: "⊓", Or: "∨", And: "∧"}
_PRETTY_QUANT = {BlindAll: "∀", BlindEx: "∃",
                 ChoiceAll: "⊓", ChoiceEx: "⊔"}


def formula_pretty(f) -> str:
    return _formula_text(f, 0, True, _PRETTY_SYM, _PRETTY_QUANT,
                         "¬", "⊤", "⊥", "≠")


def sequent_text(s: Sequent) -> str:
    left = ", ".join(formula_text(g) for g in s.antecedent)
    return (left + " |- " if left else "|- ") + formula_text(s.succedent)


def sequent_pretty(s: Sequent) -> str:
    left = ", ".join(formula_pretty(g) for g in s.antecedent)
    sep = " ⊨ " if left else "⊨ "
    return left + sep + formula_pretty(s.succedent)


# ---------------------------------------------------------------------------
# Structure helpers


def negate(f):
    """Game negation; on elementary formulas this is classical negation."""
    if isinstance(f, Atom):
        return Neg(f)
    if isinstance(f, Neg):
        return f.body
    if isinstance(f, Top):
        return Bot()
    if isinstance(f, Bot):
        return Top()
    cls = {And: Or, Or: And, CAnd: COr, COr: CAnd,
           BlindAll: BlindEx, BlindEx: BlindAll,
           ChoiceAll: ChoiceEx, ChoiceEx: ChoiceAll}[type(f)]
    if isinstance(f, BINARY):
        return cls(negate(f.left), negate(f.right))
    return cls(f.var, negate(f.body))


def children(f):
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, QUANT):
        return (f.body,)
    return ()


def subformula_at(f, path):
    for i in path:
        kids = children(f)
        if i >= len(kids):
            raise KeyError(f"path {path} runs off {formula_text(f)}")
        f = kids[i]
    return f


def replace_at(f, path, new):
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(f, BINARY):
        if i == 0:
            return type(f)(replace_at(f.left, rest, new), f.right)
        if i == 1:
            return type(f)(f.left, replace_at(f.right, rest, new))
    elif isinstance(f, QUANT) and i == 0:
        return type(f)(f.var, replace_at(f.body, rest, new))
    raise KeyError(f"path {path} runs off {formula_text(f)}")


def surface_choice_occurrences(f, path=()):
    """Choice subformulas not in the scope of another choice operator.

    Yields (path, node) pairs; blind quantifiers and parallel
    connectives are transparent.
    """
    if isinstance(f, CHOICE_NODES):
        yield path, f
    elif isinstance(f, (And, Or)):
        yield from surface_choice_occurrences(f.left, path + (0,))
        yield from surface_choice_occurrences(f.right, path + (1,))
    elif isinstance(f, (BlindAll, BlindEx)):
        yield from surface_choice_occurrences(f.body, path + (0,))


def is_elementary(f) -> bool:
    if isinstance(f, CHOICE_NODES):
        return False
    if isinstance(f, BINARY):
        return is_elementary(f.left) and is_elementary(f.right)
    if isinstance(f, QUANT):
        return is_elementary(f.body)
    return True


def elementarize(f):
    """Replace surface choice-conjunctive parts by $T, disjunctive by $F."""
    if isinstance(f, (CAnd, ChoiceAll)):
        return Top()
    if isinstance(f, (COr, ChoiceEx)):
        return Bot()
    if isinstance(f, (And, Or)):
        return type(f)(elementarize(f.left), elementarize(f.right))
    if isinstance(f, (BlindAll, BlindEx)):
        return type(f)(f.var, elementarize(f.body))
    return f


def sequent_elementarization(seq: Sequent):
    """The elementary formula whose truth decides who is winning now."""
    succ = elementarize(seq.succedent)
    if not seq.antecedent:
        return succ
    conj = elementarize(seq.antecedent[-1])
    for g in reversed(seq.antecedent[:-1]):
        conj = And(elementarize(g), conj)
    return Or(negate(conj), succ)


def formula_size(f) -> int:
    if isinstance(f, BINARY):
        return 1 + formula_size(f.left) + formula_size(f.right)
    if isinstance(f, QUANT):
        return 1 + formula_size(f.body)
    return 1
