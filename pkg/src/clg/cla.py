"""Arithmetic deductions: axiom checking, induction, and solver extraction.

A deduction is a Fitch-style step list.  Hypothesis lines (if any) come
first, then a ``---`` bar, then steps.  A step line is

    <label>. <formula> ; <justification>

and a line holding just ``<label>.`` opens an indented sub-block whose
``hyp <label>: <formula>`` lines and bar precede its own steps.
Justifications:

    axiom <k>            instance of arithmetic axiom k
    lc <refs> @ <path>   the cited steps, in citation order, form the
                         antecedent of the attached sequent proof
    ci <base>, <block>   induction: the conclusion's choice-universal is
                         won by stacking the block's solution on the base
    classical <refs>     elementary consequence, discharged by the
                         classical prover
    classical! <refs>    same, taken on trust when the prover cannot
                         confirm it; downgrades the win guarantee

``#`` starts a comment.  Three dialects restrict the raw material:
``cla1`` allows =, successor, + and * with blind-quantified axioms,
``cla2`` opens the language to any symbols plus elementary induction,
and ``cla3`` is cla1 with choice-quantified axioms and no blind
quantifiers anywhere, attached proofs included.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from pathlib import Path

from .agents import (
    Agent,
    SilentAgent,
    SuccessorAgent,
    contract,
    cut,
    cut_chain,
    instantiate,
    reorder,
    weaken,
    wrap_addresses,
)
from .cl12 import (
    CL12Proof,
    ChooseCAll,
    ChooseCEx,
    Occurrence,
    ProofAgent,
    ProofParseError,
    ProofStep,
    Wait,
    check_proof,
    load_proof,
)
from .classical import prove_classical
from .engine import standard_addresses
from .formulas import (
    SUCC,
    And,
    App,
    Atom,
    BlindAll,
    BlindEx,
    CAnd,
    COr,
    ChoiceAll,
    ChoiceEx,
    Const,
    Neg,
    Or,
    Sequent,
    Var,
    all_names,
    alpha_equal,
    alpha_equal_sequents,
    free_vars,
    fresh_var,
    is_elementary,
    negate,
    parse_formula,
    substitute,
)

__all__ = [
    "PROFILES", "Profile", "profile_violation", "check_axiom",
    "AxiomJust", "LCJust", "CIJust", "ClassicalJust",
    "Hypothesis", "DedStep", "Block", "Deduction", "DedParseError",
    "parse_deduction", "load_deduction",
    "DeductionVerdict", "check_deduction", "extract_cla",
    "PRDefinition", "PRConstruction", "PRParseError",
    "parse_pr", "load_pr", "CompileError", "compile_pr",
]

Profile = str

PROFILES = ("cla1", "cla2", "cla3")


# --------------------------------------------------------------------------
# dialect conformance


def profile_violation(f, profile: Profile):
    """The first language violation in the formula, or None."""
    if profile == "cla2":
        return None
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            if g.pred != "=":
                return f"predicate {g.pred!r} is outside the dialect"
            stack.extend(g.args)
        elif isinstance(g, Neg):
            stack.append(g.body)
        elif isinstance(g, (And, Or, CAnd, COr)):
            stack.extend((g.left, g.right))
        elif isinstance(g, (BlindAll, BlindEx)):
            if profile == "cla3":
                return "blind quantifier in a choice-only deduction"
            stack.append(g.body)
        elif isinstance(g, (ChoiceAll, ChoiceEx)):
            stack.append(g.body)
        elif isinstance(g, App):
            if g.func not in (SUCC, "+", "*"):
                return f"function {g.func!r} is outside the dialect"
            stack.extend(g.args)
        elif isinstance(g, Const):
            if g.value != 0:
                return f"constant {g.value} is outside the dialect"
    return None


def _contains_blind(f) -> bool:
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (BlindAll, BlindEx)):
            return True
        if isinstance(g, (And, Or, CAnd, COr)):
            stack.extend((g.left, g.right))
        elif isinstance(g, (ChoiceAll, ChoiceEx)):
            stack.append(g.body)
    return False


# --------------------------------------------------------------------------
# axiom recognition


_AXIOM_CORES = {
    1: parse_formula("~(0 = x')"),
    2: parse_formula("x' = y' -> x = y"),
    3: parse_formula("x + 0 = x"),
    4: parse_formula("x + y' = (x + y)'"),
    5: parse_formula("x * 0 = 0"),
    6: parse_formula("x * y' = (x * y) + x"),
}

_SUCC_TOTALITY = parse_formula("AA x. EE y. y = x'")


def _bind_var(pat_name, t, binding):
    if not isinstance(t, Var):
        return False
    got = binding.get(pat_name)
    if got is not None:
        return got == t.name
    if t.name in binding.values():
        return False
    binding[pat_name] = t.name
    return True


def _match_schema_term(pat, t, binding):
    if isinstance(pat, Var):
        return _bind_var(pat.name, t, binding)
    if isinstance(pat, Const):
        return isinstance(t, Const) and t.value == pat.value
    if isinstance(t, App) and t.func == pat.func and len(t.args) == len(pat.args):
        return all(_match_schema_term(p, a, binding)
                   for p, a in zip(pat.args, t.args))
    return False


def _match_schema(pat, f, binding):
    if isinstance(pat, Atom):
        return (isinstance(f, Atom) and f.pred == pat.pred
                and len(f.args) == len(pat.args)
                and all(_match_schema_term(p, a, binding)
                        for p, a in zip(pat.args, f.args)))
    if isinstance(pat, Neg):
        return isinstance(f, Neg) and _match_schema(pat.body, f.body, binding)
    if isinstance(pat, (And, Or)):
        return (isinstance(f, type(pat))
                and _match_schema(pat.left, f.left, binding)
                and _match_schema(pat.right, f.right, binding))
    return False


def _strip_closure(f, quant):
    out = []
    while isinstance(f, quant):
        out.append(f.var)
        f = f.body
    return out, f


def _induction_instance(f) -> bool:
    # (F(0) and A v.(F(v) -> F(v'))) -> A v. F(v), with F elementary;
    # the arrow is stored as a disjunction with negation pushed inward.
    if not isinstance(f, Or) or not isinstance(f.right, BlindAll):
        return False
    concl = f.right
    v, body = concl.var, concl.body
    if not is_elementary(body):
        return False
    base = substitute(body, {v: Const(0)})
    bump = substitute(body, {v: App(SUCC, (Var(v),))})
    step = BlindAll(v, Or(negate(body), bump))
    return alpha_equal(f, Or(negate(And(base, step)), concl))


def check_axiom(f, profile: Profile = "cla1"):
    """The axiom index the formula instantiates in the dialect, or None."""
    if alpha_equal(f, _SUCC_TOTALITY):
        return 7
    quant = ChoiceAll if profile == "cla3" else BlindAll
    vs, core = _strip_closure(f, quant)
    if len(set(vs)) == len(vs) and set(vs) == free_vars(core):
        for k, pat in _AXIOM_CORES.items():
            if _match_schema(pat, core, {}):
                return k
    if profile != "cla3":
        vs, core = _strip_closure(f, BlindAll)
        if len(set(vs)) == len(vs) and _induction_instance(core):
            return 8
    return None


# --------------------------------------------------------------------------
# deduction objects


@dataclass(frozen=True)
class AxiomJust:
    index: int


@dataclass(frozen=True)
class LCJust:
    refs: tuple
    path: str | None
    proof: CL12Proof


@dataclass(frozen=True)
class CIJust:
    base: str
    block: str


@dataclass(frozen=True)
class ClassicalJust:
    refs: tuple
    trusted: bool = False


@dataclass(frozen=True)
class Hypothesis:
    label: str
    formula: object


@dataclass(frozen=True)
class DedStep:
    label: str
    formula: object
    just: object


@dataclass(frozen=True)
class Block:
    label: str | None  # None marks the root
    hyps: tuple
    items: tuple       # DedStep | Block


@dataclass(frozen=True)
class Deduction:
    root: Block
    profile: Profile = "cla1"

    @property
    def final(self) -> DedStep:
        last = self.root.items[-1] if self.root.items else None
        if not isinstance(last, DedStep):
            raise ValueError("deduction does not end with a root step")
        return last

    @property
    def sequent(self) -> Sequent:
        return Sequent(tuple(h.formula for h in self.root.hyps),
                       self.final.formula)


# --------------------------------------------------------------------------
# deduction file parsing


class DedParseError(ValueError):
    def __init__(self, message, lineno):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


_HYP_RE = re.compile(r"^hyp\s+([\w.]+)\s*:\s*(.+)$")
_STEP_RE = re.compile(r"^([\w.]+)\.\s+(.+?)\s*;\s*(.+)$")
_OPEN_RE = re.compile(r"^([\w.]+)\.$")
_PROFILE_RE = re.compile(r"^profile\s+(\w+)$")
_AX_RE = re.compile(r"^axiom\s+(\d+)$")
_LC_RE = re.compile(r"^lc\s*([\w.,\s]*?)\s*@\s*(\S+)$")
_CI_RE = re.compile(r"^ci\s+([\w.]+)\s*,\s*([\w.]+)$")
_CL_RE = re.compile(r"^classical(!?)\s*([\w.,\s]*)$")


def _split_refs(text):
    return tuple(r.strip() for r in text.split(",") if r.strip())


def _parse_just(text, lineno, base):
    m = _AX_RE.match(text)
    if m:
        return AxiomJust(int(m.group(1)))
    m = _CI_RE.match(text)
    if m:
        return CIJust(m.group(1), m.group(2))
    m = _LC_RE.match(text)
    if m:
        refs, rel = _split_refs(m.group(1)), m.group(2)
        path = base / rel
        try:
            proof = load_proof(path)
        except FileNotFoundError:
            raise DedParseError(f"attachment {rel!r} not found", lineno)
        except ProofParseError as e:
            raise DedParseError(f"attachment {rel!r}: {e}", lineno)
        return LCJust(refs, str(path), proof)
    m = _CL_RE.match(text)
    if m:
        return ClassicalJust(_split_refs(m.group(2)), trusted=bool(m.group(1)))
    raise DedParseError(f"unreadable justification {text!r}", lineno)


def _parse_formula_at(text, lineno):
    try:
        return parse_formula(text)
    except Exception as e:
        raise DedParseError(f"unreadable formula: {e}", lineno)


def _parse_block(rows, at, opener_indent, label, base, seen):
    if at >= len(rows):
        raise DedParseError("block has no content", rows[-1][2])
    indent = rows[at][0]
    if opener_indent is not None and indent <= opener_indent:
        raise DedParseError("block needs indented content", rows[at][2])
    hyps = []
    while at < len(rows) and rows[at][0] == indent:
        m = _HYP_RE.match(rows[at][1])
        if not m:
            break
        hl, ftext = m.groups()
        if hl in seen:
            raise DedParseError(f"duplicate label {hl!r}", rows[at][2])
        seen.add(hl)
        hyps.append(Hypothesis(hl, _parse_formula_at(ftext, rows[at][2])))
        at += 1
    if at < len(rows) and rows[at][0] == indent and rows[at][1] == "---":
        at += 1
    elif hyps:
        raise DedParseError("expected --- after the hypotheses", rows[at - 1][2])
    items = []
    while at < len(rows) and rows[at][0] >= indent:
        ind, text, lineno = rows[at]
        if ind > indent:
            raise DedParseError("unexpected indentation", lineno)
        m = _OPEN_RE.match(text)
        if m:
            bl = m.group(1)
            if bl in seen:
                raise DedParseError(f"duplicate label {bl!r}", lineno)
            seen.add(bl)
            blk, at = _parse_block(rows, at + 1, indent, bl, base, seen)
            items.append(blk)
            continue
        m = _STEP_RE.match(text)
        if m:
            sl, ftext, jtext = m.groups()
            if sl in seen:
                raise DedParseError(f"duplicate label {sl!r}", lineno)
            seen.add(sl)
            items.append(DedStep(sl, _parse_formula_at(ftext, lineno),
                                 _parse_just(jtext.strip(), lineno, base)))
            at += 1
            continue
        if _HYP_RE.match(text):
            raise DedParseError("hypotheses must precede the --- bar", lineno)
        raise DedParseError(f"expected a step or block, got {text!r}", lineno)
    if not items:
        raise DedParseError("block has no steps", rows[at - 1][2])
    return Block(label, tuple(hyps), tuple(items)), at


def parse_deduction(text: str, base_dir=None) -> Deduction:
    base = Path(base_dir) if base_dir is not None else Path(".")
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        rows.append((len(line) - len(line.lstrip()), line.strip(), lineno))
    if not rows:
        raise DedParseError("empty deduction", 0)
    profile = "cla1"
    at = 0
    m = _PROFILE_RE.match(rows[0][1])
    if m:
        name = m.group(1)
        if name not in PROFILES:
            raise DedParseError(f"unknown profile {name!r}", rows[0][2])
        profile = name
        at = 1
    root, at = _parse_block(rows, at, None, None, base, set())
    if at != len(rows):
        raise DedParseError("content after the deduction ended", rows[at][2])
    return Deduction(root=root, profile=profile)


def load_deduction(path) -> Deduction:
    p = Path(path)
    return parse_deduction(p.read_text(encoding="utf-8"), base_dir=p.parent)


# --------------------------------------------------------------------------
# deduction checking


@dataclass(frozen=True)
class DeductionVerdict:
    status: str  # "ok" | "rejected" | "unknown"
    notes: tuple = ()
    warnings: tuple = ()

    def report(self) -> str:
        lines = [f"deduction: {self.status}"]
        lines.extend(f"  {n}" for n in self.notes)
        lines.extend(f"  warning: {w}" for w in self.warnings)
        return "\n".join(lines)


def _ci_var(concl, hyp_formula):
    """The variable the induction climbs, or None when the conclusion is
    not a choice-closure of the block hypothesis."""
    pool = sorted(free_vars(hyp_formula))
    pool.append(fresh_var("v", all_names(hyp_formula) | all_names(concl)))
    for v in pool:
        if alpha_equal(concl, ChoiceAll(v, hyp_formula)):
            return v
    return None


def check_deduction(d: Deduction, *, stability_budget=4000) -> DeductionVerdict:
    notes = []
    warnings = []
    statuses = []

    def add(label, status, detail=None):
        statuses.append(status)
        notes.append(f"step {label}: {status}" + (f" ({detail})" if detail else ""))

    def resolve(refs, label):
        out = []
        for r in refs:
            e = visible_stack[-1].get(r)
            if e is None:
                add(label, "rejected", f"reference {r!r} is not visible here")
                return None
            if e[0] != "formula":
                add(label, "rejected", f"reference {r!r} is a block, not a formula")
                return None
            out.append(e[1])
        return out

    def check_step(st, open_formulas):
        bad = profile_violation(st.formula, d.profile)
        if bad:
            add(st.label, "rejected", bad)
            return
        j = st.just
        if isinstance(j, AxiomJust):
            got = check_axiom(st.formula, d.profile)
            if got != j.index:
                detail = (f"formula instantiates axiom {got}" if got
                          else "formula instantiates no axiom")
                add(st.label, "rejected", f"{detail}, cited {j.index}")
                return
            add(st.label, "ok")
            return
        if isinstance(j, LCJust):
            cited = resolve(j.refs, st.label)
            if cited is None:
                return
            expected = Sequent(tuple(cited), st.formula)
            if not alpha_equal_sequents(expected, j.proof.final):
                add(st.label, "rejected", "attachment proves a different sequent")
                return
            if d.profile == "cla3":
                for ps in j.proof.steps:
                    members = (*ps.sequent.antecedent, ps.sequent.succedent)
                    if any(_contains_blind(g) for g in members):
                        add(st.label, "rejected",
                            f"attachment step {ps.label} uses a blind quantifier")
                        return
            v = check_proof(j.proof, stability_budget=stability_budget)
            if v.status != "ok":
                add(st.label, v.status, f"attachment: {v.status}")
                return
            add(st.label, "ok")
            return
        if isinstance(j, CIJust):
            be = visible_stack[-1].get(j.base)
            ke = visible_stack[-1].get(j.block)
            if be is None or be[0] != "formula":
                add(st.label, "rejected", f"base {j.base!r} is not a visible step")
                return
            if ke is None or ke[0] != "block":
                add(st.label, "rejected", f"{j.block!r} is not a visible block")
                return
            blk = ke[1]
            if len(blk.hyps) != 1:
                add(st.label, "rejected",
                    "the cited block must carry exactly one hypothesis")
                return
            last = blk.items[-1] if blk.items else None
            if not isinstance(last, DedStep):
                add(st.label, "rejected", "the cited block must end with a step")
                return
            hyp_f = blk.hyps[0].formula
            w = _ci_var(st.formula, hyp_f)
            if w is None:
                add(st.label, "rejected",
                    "conclusion is not the choice-closure of the block hypothesis")
                return
            if not alpha_equal(be[1], substitute(hyp_f, {w: Const(0)})):
                add(st.label, "rejected", "base step does not match the hypothesis at zero")
                return
            bump = substitute(hyp_f, {w: App(SUCC, (Var(w),))})
            if not alpha_equal(last.formula, bump):
                add(st.label, "rejected",
                    "block conclusion does not match the hypothesis at the successor")
                return
            if any(w in all_names(g) for g in open_formulas):
                add(st.label, "rejected",
                    f"induction variable {w!r} already occurs in an open step")
                return
            add(st.label, "ok")
            return
        if isinstance(j, ClassicalJust):
            cited = resolve(j.refs, st.label)
            if cited is None:
                return
            if any(not is_elementary(g) for g in [*cited, st.formula]):
                add(st.label, "rejected", "classical steps need elementary formulas")
                return
            goal = st.formula
            if cited:
                acc = cited[0]
                for g in cited[1:]:
                    acc = And(acc, g)
                goal = Or(negate(acc), st.formula)
            cv = prove_classical(goal, budget=stability_budget)
            if cv.status == "valid":
                add(st.label, "ok")
                return
            if j.trusted:
                warnings.append(f"step {st.label}: taken on trust ({cv.status})")
                add(st.label, "ok", "trusted")
                return
            add(st.label, "rejected" if cv.status == "invalid" else "unknown",
                f"classical prover: {cv.status}")
            return
        add(st.label, "rejected", f"unknown justification {j!r}")

    def walk(block, open_formulas):
        for it in block.items:
            if isinstance(it, Block):
                inner = dict(visible_stack[-1])
                for h in it.hyps:
                    bad = profile_violation(h.formula, d.profile)
                    if bad:
                        add(h.label, "rejected", bad)
                    inner[h.label] = ("formula", h.formula)
                visible_stack.append(inner)
                walk(it, open_formulas + [h.formula for h in it.hyps])
                visible_stack.pop()
                visible_stack[-1][it.label] = ("block", it)
                continue
            check_step(it, open_formulas)
            visible_stack[-1][it.label] = ("formula", it.formula)
            open_formulas.append(it.formula)

    visible_stack = [{}]
    root_open = []
    for h in d.root.hyps:
        bad = profile_violation(h.formula, d.profile)
        if bad:
            add(h.label, "rejected", bad)
        visible_stack[-1][h.label] = ("formula", h.formula)
        root_open.append(h.formula)
    walk(d.root, root_open)

    if not d.root.items or not isinstance(d.root.items[-1], DedStep):
        statuses.append("rejected")
        notes.append("deduction: must end with a root step")

    status = "ok"
    if "unknown" in statuses:
        status = "unknown"
    if "rejected" in statuses:
        status = "rejected"
    return DeductionVerdict(status, tuple(notes), tuple(warnings))


# --------------------------------------------------------------------------
# strategy extraction


class _HypMirror(Agent):
    """Copycat pinned to one antecedent leaf: mirrors the succedent into
    the leaf's leftmost replication copy and back, ignoring other copies
    (they only ever weaken the environment's side of the adjudication)."""

    def __init__(self, addr):
        self.live = {addr}

    def start(self, valuation):
        return [], True

    def resume(self, env_moves):
        out = []
        for p in env_moves:
            if p.endswith(":") and p[:-1] in self.live:
                bits = p[:-1]
                self.live.remove(bits)
                self.live.update((bits + "0", bits + "1"))
                continue
            if p.startswith("S."):
                out.append(min(self.live) + "." + p[2:])
                continue
            bits, dot, path = p.partition(".")
            if dot and bits == min(self.live):
                out.append("S." + path)
        return out, True


def _merge_blocks(a: Agent, blocks: int, width: int) -> Agent:
    """Contract `blocks` adjacent antecedent copies of the same
    width-`width` slot group down to one."""
    m = blocks
    while m > 1 and width > 0:
        for i in range(width - 1, -1, -1):
            a = contract(a, i, (m - 1) * width + i)
        m -= 1
    return a


class _ChainInduction(Agent):
    """Wins a choice-universal by waiting for the environment's number n,
    then stacking n copies of the induction block's solution on the base.

    The stack is cut together unmerged and the hypothesis copies are
    contracted once at the outside, so the contraction replications land
    in the real game instead of forking the inner simulations."""

    def __init__(self, base_factory, step_factory, var, slots):
        self.base_factory = base_factory
        self.step_factory = step_factory
        self.var = var
        self.slots = slots
        self.delegate = None
        self.held = []
        self.val = {}

    def start(self, valuation):
        self.val = dict(valuation)
        return [], True

    def _is_choice(self, p):
        if self.slots == 0:
            return p.isdigit()
        return p.startswith("S.") and p[2:].isdigit()

    def _chain(self, n):
        if self.slots == 0:
            steps = [instantiate(self.step_factory(), self.var, level)
                     for level in range(n)]
            return cut_chain(self.base_factory(), steps)
        a = self.base_factory()
        for level in range(n):
            s = instantiate(self.step_factory(), self.var, level)
            a = cut(a, s, ((level + 1) * self.slots, self.slots))
        return _merge_blocks(a, n + 1, self.slots)

    def resume(self, env_moves):
        out = []
        granted = True
        moves = list(env_moves)
        while moves and self.delegate is None:
            p = moves.pop(0)
            if self._is_choice(p):
                n = int(p[2:] if p.startswith("S.") else p)
                self.delegate = self._chain(n)
                o, granted = self.delegate.start(self.val)
                out.extend(o)
                pre, self.held = self.held, []
                if pre:
                    o, granted = self.delegate.resume(pre)
                    out.extend(o)
            else:
                self.held.append(p)
        if self.delegate is not None and moves:
            o, granted = self.delegate.resume(moves)
            out.extend(o)
        return out, granted


def extract_cla(d: Deduction) -> Agent:
    """An agent playing (hypotheses |- conclusion), winning whenever the
    deduction checks and the interpretation satisfies its axiom and
    classical steps."""
    info = {}

    def index(block, hyp_count):
        e = hyp_count
        for h in block.hyps:
            info[h.label] = ("hyp", e, h.formula)
            e += 1
        for it in block.items:
            if isinstance(it, Block):
                index(it, e)
                info[it.label] = ("block", it, e)
            else:
                info[it.label] = ("step", it, e)

    index(d.root, 0)

    def natural(label):
        """A solver at its own antecedent arity, plus the hypothesis slot
        each of its antecedent positions stands for.  Elementary
        hypotheses carry no moves, so citing one adds no slot; the real
        game still holds the member and adjudicates it."""
        entry = info[label]
        if entry[0] == "hyp":
            if is_elementary(entry[2]):
                return SilentAgent(), []
            return _HypMirror(""), [entry[1]]
        _, st, e_own = entry
        j = st.just
        if isinstance(j, AxiomJust):
            return (SuccessorAgent() if j.index == 7 else SilentAgent()), []
        if isinstance(j, ClassicalJust):
            return SilentAgent(), []
        if isinstance(j, LCJust):
            a = ProofAgent(j.proof)
            ids = []
            for i in range(len(j.refs), 0, -1):
                m1, mids = natural(j.refs[i - 1])
                a = cut(m1, a, (len(mids), (i - 1) + len(ids)))
                ids = mids + ids
            while True:
                dup = None
                for q in range(len(ids) - 1, 0, -1):
                    p = ids.index(ids[q])
                    if p < q:
                        dup = (p, q)
                        break
                if dup is None:
                    return a, ids
                p, q = dup
                if q != len(ids) - 1:
                    perm = [t for t in range(len(ids)) if t != q] + [q]
                    a = reorder(a, perm, len(ids))
                    ids = [ids[t] for t in perm]
                a = contract(a, p, len(ids) - 1)
                ids.pop()
        blk = info[j.block][1]
        last = blk.items[-1]
        w = _ci_var(st.formula, blk.hyps[0].formula)
        hyp_slot = info[blk.hyps[0].label][1]
        _, base_ids = natural(j.base)
        _, step_ids = natural(last.label)
        profile = sorted(set(base_ids) | (set(step_ids) - {hyp_slot}))
        return _ChainInduction(lambda: mapped(j.base, profile),
                               lambda: mapped(last.label, profile + [hyp_slot]),
                               w, len(profile)), profile

    def mapped(label, targets):
        """The solver rewired so antecedent position i serves the
        hypothesis slot targets[i]; unused targets are ignored slots."""
        a, ids = natural(label)
        if ids == targets:
            return a
        if not ids:
            return weaken(a, 0, len(targets))
        inner = standard_addresses(len(ids))
        outer = standard_addresses(len(targets))
        pos = {s: t for t, s in enumerate(targets)}
        return wrap_addresses(a, {inner[i]: outer[pos[s]]
                                  for i, s in enumerate(ids)},
                              ignore_unmapped=True)

    return mapped(d.final.label, list(range(len(d.root.hyps))))


# --------------------------------------------------------------------------
# recursive function constructions


@dataclass(frozen=True)
class PRDefinition:
    name: str
    arity: int
    scheme: str    # "I" | "II" | "III" | "IV" | "V"
    params: tuple  # III: (index,); IV: (outer, inner...); V: (base, step)


@dataclass(frozen=True)
class PRConstruction:
    defs: tuple

    @property
    def target(self) -> PRDefinition:
        return self.defs[-1]


class PRParseError(ValueError):
    def __init__(self, message, lineno):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


_DEF_RE = re.compile(r"^def\s+([a-z][a-zA-Z0-9_]*)\s*/\s*(\d+)\s*=\s*(.+)$")
_SCHEME_RE = re.compile(r"^(IV|V|III|II|I)\s*(?:\(\s*(.*?)\s*\))?$")


def parse_pr(text: str) -> PRConstruction:
    defs = []
    have = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _DEF_RE.match(line)
        if not m:
            raise PRParseError("expected 'def <name>/<arity> = <scheme>'", lineno)
        name, arity, rest = m.group(1), int(m.group(2)), m.group(3).strip()
        if name in have:
            raise PRParseError(f"duplicate definition {name!r}", lineno)
        sm = _SCHEME_RE.match(rest)
        if not sm:
            raise PRParseError(f"unreadable scheme {rest!r}", lineno)
        scheme, args_text = sm.group(1), sm.group(2)
        args = [a.strip() for a in args_text.split(",")] if args_text else []
        if scheme == "I":
            if arity != 1 or args:
                raise PRParseError(
                    "the successor scheme is unary and takes no arguments", lineno)
            params = ()
        elif scheme == "II":
            if args:
                raise PRParseError("the zero scheme takes no arguments", lineno)
            params = ()
        elif scheme == "III":
            if len(args) != 1 or not args[0].isdigit():
                raise PRParseError("projection needs one argument index", lineno)
            i = int(args[0])
            if arity < 1 or not 1 <= i <= arity:
                raise PRParseError(
                    f"projection index {i} is out of range for arity {arity}", lineno)
            params = (i,)
        elif scheme == "IV":
            if len(args) < 2:
                raise PRParseError(
                    "composition needs an outer function and at least one inner",
                    lineno)
            g, hs = args[0], args[1:]
            if g not in have:
                raise PRParseError(f"{g!r} is not defined yet", lineno)
            if have[g] != len(hs):
                raise PRParseError(
                    f"{g!r} has arity {have[g]}, got {len(hs)} inner functions",
                    lineno)
            for h in hs:
                if h not in have:
                    raise PRParseError(f"{h!r} is not defined yet", lineno)
                if have[h] != arity:
                    raise PRParseError(
                        f"{h!r} has arity {have[h]}, needs {arity}", lineno)
            params = tuple(args)
        else:
            if arity < 1:
                raise PRParseError("recursion needs arity at least one", lineno)
            if len(args) != 2:
                raise PRParseError(
                    "recursion takes a base function and a step function", lineno)
            g, h = args
            for nm, want in ((g, arity - 1), (h, arity + 1)):
                if nm not in have:
                    raise PRParseError(f"{nm!r} is not defined yet", lineno)
                if have[nm] != want:
                    raise PRParseError(
                        f"{nm!r} has arity {have[nm]}, needs {want}", lineno)
            params = (g, h)
        have[name] = arity
        defs.append(PRDefinition(name, arity, scheme, params))
    if not defs:
        raise PRParseError("no definitions", 0)
    return PRConstruction(tuple(defs))


def load_pr(path) -> PRConstruction:
    return parse_pr(Path(path).read_text(encoding="utf-8"))


# --------------------------------------------------------------------------
# compiling constructions into deductions


class CompileError(Exception):
    """A generated deduction failed its own check."""

    def __init__(self, message, sequent=None):
        super().__init__(message)
        self.sequent = sequent


_SUCC_OCC = Occurrence("succ", None, ())


def _eq(lhs, rhs):
    return Atom("=", (lhs, rhs))


def _succ_t(t):
    return App(SUCC, (t,))


def _close_blind(names, body):
    for v in reversed(names):
        body = BlindAll(v, body)
    return body


def _close_choice(names, body):
    for v in reversed(names):
        body = ChoiceAll(v, body)
    return body


def _tot_formula(name, arity):
    xs = [Var(f"x{i}") for i in range(1, arity + 1)]
    body = ChoiceEx("y", _eq(App(name, tuple(xs)), Var("y")))
    return _close_choice([v.name for v in xs], body)


def _scheme_formula(d: PRDefinition):
    xs = [Var(f"x{i}") for i in range(1, d.arity + 1)]
    names = [v.name for v in xs]
    if d.scheme == "I":
        return _close_blind(names, _eq(App(d.name, (xs[0],)), _succ_t(xs[0])))
    if d.scheme == "II":
        return _close_blind(names, _eq(App(d.name, tuple(xs)), Const(0)))
    if d.scheme == "III":
        return _close_blind(names, _eq(App(d.name, tuple(xs)), xs[d.params[0] - 1]))
    if d.scheme == "IV":
        g, *hs = d.params
        inner = tuple(App(h, tuple(xs)) for h in hs)
        return _close_blind(names, _eq(App(d.name, tuple(xs)), App(g, inner)))
    g, h = d.params
    rest = xs[1:]
    part1 = _close_blind([v.name for v in rest],
                         _eq(App(d.name, (Const(0), *rest)), App(g, tuple(rest))))
    part2 = _close_blind(names,
                         _eq(App(d.name, (_succ_t(xs[0]), *rest)),
                             App(h, (xs[0], App(d.name, tuple(xs)), *rest))))
    return And(part1, part2)


def _rows_proof(rows):
    steps = tuple(ProofStep(str(i + 1), s, j) for i, (s, j) in enumerate(rows))
    return CL12Proof(steps)


def _att_successor(name, def_f):
    a, b = Var("a"), Var("b")
    goal = ChoiceEx("y", _eq(App(name, (a,)), Var("y")))
    rows = [
        (Sequent((def_f, _eq(b, _succ_t(a))), _eq(App(name, (a,)), b)), Wait()),
        (Sequent((def_f, _eq(b, _succ_t(a))), goal),
         ChooseCEx("1", _SUCC_OCC, b)),
        (Sequent((def_f, ChoiceEx("y", _eq(Var("y"), _succ_t(a)))), goal),
         Wait(("2",))),
        (Sequent((def_f, _SUCC_TOTALITY), goal),
         ChooseCAll("3", Occurrence("ante", 1, ()), a)),
        (Sequent((def_f, _SUCC_TOTALITY), _tot_formula(name, 1)), Wait(("4",))),
    ]
    return _rows_proof(rows)


def _att_simple(name, arity, def_f, ans):
    avs = [Var(f"a{i}") for i in range(1, arity + 1)]
    rows = [(Sequent((def_f,), _eq(App(name, tuple(avs)), ans)), Wait())]
    succ = ChoiceEx("y", _eq(App(name, tuple(avs)), Var("y")))
    rows.append((Sequent((def_f,), succ), ChooseCEx("1", _SUCC_OCC, ans)))
    prev = 2
    for j in range(arity, 0, -1):
        succ = ChoiceAll(f"x{j}", substitute(succ, {f"a{j}": Var(f"x{j}")}))
        rows.append((Sequent((def_f,), succ), Wait((str(prev),))))
        prev += 1
    return _rows_proof(rows)


def _att_compose(d: PRDefinition, def_f):
    name, n = d.name, d.arity
    g, *hs = d.params
    m = len(hs)
    avs = [Var(f"a{i}") for i in range(1, n + 1)]
    bvs = [Var(f"b{i}") for i in range(1, m + 1)]
    c = Var("c")
    h_atoms = [_eq(App(h, tuple(avs)), bvs[i]) for i, h in enumerate(hs)]
    ante = [def_f, _eq(App(g, tuple(bvs)), c), *h_atoms]
    rows = [(Sequent(tuple(ante), _eq(App(name, tuple(avs)), c)), Wait())]
    succ = ChoiceEx("y", _eq(App(name, tuple(avs)), Var("y")))
    rows.append((Sequent(tuple(ante), succ), ChooseCEx("1", _SUCC_OCC, c)))
    ante[1] = ChoiceEx("y", _eq(App(g, tuple(bvs)), Var("y")))
    rows.append((Sequent(tuple(ante), succ), Wait(("2",))))
    prev = 3
    for j in range(m, 0, -1):
        ante[1] = ChoiceAll(f"x{j}", substitute(ante[1], {f"b{j}": Var(f"x{j}")}))
        rows.append((Sequent(tuple(ante), succ),
                     ChooseCAll(str(prev), Occurrence("ante", 1, ()), bvs[j - 1])))
        prev += 1
    if n > 0:
        for i in range(m, 0, -1):
            ante[1 + i] = ChoiceEx("y", _eq(App(hs[i - 1], tuple(avs)), Var("y")))
            rows.append((Sequent(tuple(ante), succ), Wait((str(prev),))))
            prev += 1
            for j in range(n, 0, -1):
                ante[1 + i] = ChoiceAll(
                    f"x{j}", substitute(ante[1 + i], {f"a{j}": Var(f"x{j}")}))
                rows.append((Sequent(tuple(ante), succ),
                             ChooseCAll(str(prev), Occurrence("ante", 1 + i, ()),
                                        avs[j - 1])))
                prev += 1
        for j in range(n, 0, -1):
            succ = ChoiceAll(f"x{j}", substitute(succ, {f"a{j}": Var(f"x{j}")}))
            rows.append((Sequent(tuple(ante), succ), Wait((str(prev),))))
            prev += 1
    else:
        # every inner function is a lone answer slot the environment may
        # fill in any order, so one wait per subset of answered slots
        label_of = {frozenset(range(1, m + 1)): str(prev)}
        for size in range(m - 1, -1, -1):
            for sub in itertools.combinations(range(1, m + 1), size):
                state = frozenset(sub)
                members = [def_f, ante[1]]
                for i in range(1, m + 1):
                    members.append(
                        h_atoms[i - 1] if i in state
                        else ChoiceEx("y", _eq(App(hs[i - 1], ()), Var("y"))))
                prems = tuple(label_of[state | {i}]
                              for i in sorted(set(range(1, m + 1)) - state))
                rows.append((Sequent(tuple(members), succ), Wait(prems)))
                prev += 1
                label_of[state] = str(prev)
    return _rows_proof(rows)


def _att_rec_base(d: PRDefinition, def_f):
    name, n = d.name, d.arity
    g = d.params[0]
    avs = [Var(f"a{i}") for i in range(2, n + 1)]
    b = Var("b")
    ante = [def_f, _eq(App(g, tuple(avs)), b)]
    rows = [(Sequent(tuple(ante), _eq(App(name, (Const(0), *avs)), b)), Wait())]
    succ = ChoiceEx("y", _eq(App(name, (Const(0), *avs)), Var("y")))
    rows.append((Sequent(tuple(ante), succ), ChooseCEx("1", _SUCC_OCC, b)))
    ante[1] = ChoiceEx("y", _eq(App(g, tuple(avs)), Var("y")))
    rows.append((Sequent(tuple(ante), succ), Wait(("2",))))
    prev = 3
    for k in range(n - 1, 0, -1):  # base binder x_k carries argument a_{k+1}
        ante[1] = ChoiceAll(f"x{k}", substitute(ante[1], {f"a{k + 1}": Var(f"x{k}")}))
        rows.append((Sequent(tuple(ante), succ),
                     ChooseCAll(str(prev), Occurrence("ante", 1, ()), avs[k - 1])))
        prev += 1
    for j in range(n, 1, -1):
        succ = ChoiceAll(f"x{j}", substitute(succ, {f"a{j}": Var(f"x{j}")}))
        rows.append((Sequent(tuple(ante), succ), Wait((str(prev),))))
        prev += 1
    return _rows_proof(rows)


def _att_rec_step(d: PRDefinition, def_f, wvar):
    name, n = d.name, d.arity
    h = d.params[1]
    w = Var(wvar)
    avs = [Var(f"a{i}") for i in range(2, n + 1)]
    q, cv = Var("q"), Var("c")
    h_args = (w, q, *avs)
    ante = [def_f, _eq(App(h, h_args), cv), _eq(App(name, (w, *avs)), q)]
    succ = _eq(App(name, (_succ_t(w), *avs)), cv)
    rows = [(Sequent(tuple(ante), succ), Wait())]
    succ = ChoiceEx("y", _eq(App(name, (_succ_t(w), *avs)), Var("y")))
    rows.append((Sequent(tuple(ante), succ), ChooseCEx("1", _SUCC_OCC, cv)))
    ante[1] = ChoiceEx("y", _eq(App(h, h_args), Var("y")))
    rows.append((Sequent(tuple(ante), succ), Wait(("2",))))
    prev = 3
    vals = [w, q, *avs]  # step binder x_k carries vals[k-1]
    for k in range(n + 1, 0, -1):
        ante[1] = ChoiceAll(f"x{k}",
                            substitute(ante[1], {vals[k - 1].name: Var(f"x{k}")}))
        rows.append((Sequent(tuple(ante), succ),
                     ChooseCAll(str(prev), Occurrence("ante", 1, ()), vals[k - 1])))
        prev += 1
    ante[2] = ChoiceEx("y", _eq(App(name, (w, *avs)), Var("y")))
    rows.append((Sequent(tuple(ante), succ), Wait((str(prev),))))
    prev += 1
    for j in range(n, 1, -1):
        ante[2] = ChoiceAll(f"x{j}", substitute(ante[2], {f"a{j}": Var(f"x{j}")}))
        rows.append((Sequent(tuple(ante), succ),
                     ChooseCAll(str(prev), Occurrence("ante", 2, ()), avs[j - 2])))
        prev += 1
    for j in range(n, 1, -1):
        succ = ChoiceAll(f"x{j}", substitute(succ, {f"a{j}": Var(f"x{j}")}))
        rows.append((Sequent(tuple(ante), succ), Wait((str(prev),))))
        prev += 1
    return _rows_proof(rows)


def compile_pr(c: PRConstruction, *, stability_budget=4000):
    """Build a checked deduction deriving the last definition's totality
    from all the defining equations, plus the agent extracted from it."""
    hyps = []
    items = []
    def_formula = {}
    for d in c.defs:
        f = _scheme_formula(d)
        def_formula[d.name] = f
        hyps.append(Hypothesis(f"h_{d.name}", f))
    if any(d.scheme == "I" for d in c.defs):
        items.append(DedStep("ax7", _SUCC_TOTALITY, AxiomJust(7)))
    for i, d in enumerate(c.defs, start=1):
        tot = _tot_formula(d.name, d.arity)
        hl, tl = f"h_{d.name}", f"t_{d.name}"
        def_f = def_formula[d.name]
        if d.scheme == "I":
            proof = _att_successor(d.name, def_f)
            items.append(DedStep(tl, tot, LCJust((hl, "ax7"), None, proof)))
        elif d.scheme == "II":
            proof = _att_simple(d.name, d.arity, def_f, Const(0))
            items.append(DedStep(tl, tot, LCJust((hl,), None, proof)))
        elif d.scheme == "III":
            proof = _att_simple(d.name, d.arity, def_f, Var(f"a{d.params[0]}"))
            items.append(DedStep(tl, tot, LCJust((hl,), None, proof)))
        elif d.scheme == "IV":
            g, *hs = d.params
            proof = _att_compose(d, def_f)
            refs = (hl, f"t_{g}", *(f"t_{h}" for h in hs))
            items.append(DedStep(tl, tot, LCJust(refs, None, proof)))
        else:
            g, h = d.params
            wvar = f"w{i}"
            xs = [Var(f"x{j}") for j in range(2, d.arity + 1)]
            names = [v.name for v in xs]
            base_f = _close_choice(
                names, ChoiceEx("y", _eq(App(d.name, (Const(0), *xs)), Var("y"))))
            hyp_f = _close_choice(
                names, ChoiceEx("y", _eq(App(d.name, (Var(wvar), *xs)), Var("y"))))
            step_f = _close_choice(
                names,
                ChoiceEx("y", _eq(App(d.name, (_succ_t(Var(wvar)), *xs)), Var("y"))))
            bl, kl = f"b_{d.name}", f"k_{d.name}"
            items.append(DedStep(bl, base_f,
                                 LCJust((hl, f"t_{g}"), None,
                                        _att_rec_base(d, def_f))))
            blk = Block(kl, (Hypothesis(f"{kl}.1", hyp_f),),
                        (DedStep(f"{kl}.2", step_f,
                                 LCJust((hl, f"t_{h}", f"{kl}.1"), None,
                                        _att_rec_step(d, def_f, wvar))),))
            items.append(blk)
            items.append(DedStep(tl, tot, CIJust(bl, kl)))
    ded = Deduction(Block(None, tuple(hyps), tuple(items)), profile="cla2")
    verdict = check_deduction(ded, stability_budget=stability_budget)
    if verdict.status != "ok":
        raise CompileError("generated deduction failed checking:\n"
                           + verdict.report(), sequent=ded.sequent)
    return ded, extract_cla(ded)
