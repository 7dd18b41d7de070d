"""Sequent proofs: checking, search, and compilation into playing agents.

A proof is an ordered list of labelled steps.  Each step carries a sequent
and a justification naming the rule, the cited earlier steps, and enough
detail (occurrence, branch, term) to make checking unambiguous.

Proof file format, one step per line::

    step <label>: <sequent-text> ; <rule> <args>

with ``#`` comments and blank lines ignored.  Rules:

    wait [l1,l2,...]              grant-permission step citing its premises
    wait! [l1,l2,...]             same, stability taken on trust
    cand-choose <l> <loc> <0|1>   resolve an antecedent choice-conjunction
    cor-choose <l> <loc> <0|1>    resolve a succedent choice-disjunction
    call-choose <l> <loc> <term>  instantiate an antecedent choice-all
    cex-choose <l> <loc> <term>   instantiate a succedent choice-ex
    replicate <l> ante[<k>]       premise repeats member k at the end

``<loc>`` is ``succ`` or ``ante[k]`` (k is 0-based), optionally followed by
a dot-path of child indices inside that formula (binary connectives have
children 0 and 1, a quantifier body is child 0).  ``<term>`` is a decimal
constant or a variable name.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .agents import Agent
from .classical import prove_classical
from .engine import standard_addresses
from .formulas import (
    And,
    BlindAll,
    BlindEx,
    CAnd,
    COr,
    ChoiceAll,
    ChoiceEx,
    Const,
    Or,
    ParseError,
    Sequent,
    Var,
    alpha_equal,
    alpha_equal_sequents,
    bound_vars,
    children,
    free_vars,
    parse_sequent,
    seq_all_names,
    seq_free_vars,
    sequent_elementarization,
    sequent_text,
    substitute,
    surface_choice_occurrences,
    term_text,
)
from .formulas import _install_value_semantics

PLAYER_T = "T"
PLAYER_B = "B"

_PARALLEL = (And, Or)
_BLIND = (BlindAll, BlindEx)
_CHOICE = (CAnd, COr, ChoiceAll, ChoiceEx)


# --------------------------------------------------------------------------
# occurrences


@dataclass(frozen=True)
class Occurrence:
    """A position inside one region of a sequent.

    region is "succ" or "ante"; index is the 0-based antecedent position
    (None for the succedent); path is the child-index path from the
    region's root formula.
    """

    region: str
    index: int | None
    path: tuple[int, ...]

    def __str__(self):
        head = "succ" if self.region == "succ" else f"ante[{self.index}]"
        if not self.path:
            return head
        return head + "." + ".".join(str(i) for i in self.path)


_OCC_RE = re.compile(r"^(succ|ante\[(\d+)\])((?:\.\d+)*)$")


def parse_occurrence(text: str) -> Occurrence:
    m = _OCC_RE.match(text)
    if not m:
        raise ValueError(f"bad occurrence {text!r}")
    path = tuple(int(p) for p in m.group(3).split(".")[1:]) if m.group(3) else ()
    if m.group(1) == "succ":
        return Occurrence("succ", None, path)
    return Occurrence("ante", int(m.group(2)), path)


def _region_root(s: Sequent, occ: Occurrence):
    if occ.region == "succ":
        return s.succedent
    if occ.index is None or not (0 <= occ.index < len(s.antecedent)):
        raise KeyError(f"antecedent position {occ.index} out of range")
    return s.antecedent[occ.index]


def _surface_at(root, path):
    """The node at path, requiring every proper ancestor to be parallel
    or blind (so the occurrence is not under a choice operator)."""
    node = root
    for i in path:
        if not isinstance(node, _PARALLEL + _BLIND):
            raise KeyError("occurrence descends through a non-surface node")
        kids = children(node)
        if i >= len(kids):
            raise KeyError("occurrence path runs off the formula")
        node = kids[i]
    return node


def occ_formula(s: Sequent, occ: Occurrence):
    return _surface_at(_region_root(s, occ), occ.path)


def _replace_in(root, path, new):
    if not path:
        return new
    i, rest = path[0], path[1:]
    kids = children(root)
    if isinstance(root, _PARALLEL):
        if i == 0:
            return type(root)(_replace_in(kids[0], rest, new), root.right)
        return type(root)(root.left, _replace_in(kids[1], rest, new))
    return type(root)(root.var, _replace_in(kids[0], rest, new))


def occ_replace(s: Sequent, occ: Occurrence, new) -> Sequent:
    if occ.region == "succ":
        return Sequent(s.antecedent, _replace_in(s.succedent, occ.path, new))
    ante = list(s.antecedent)
    ante[occ.index] = _replace_in(ante[occ.index], occ.path, new)
    return Sequent(tuple(ante), s.succedent)


# --------------------------------------------------------------------------
# proof objects


@dataclass(frozen=True)
class ChooseCAnd:
    premise: str
    occ: Occurrence
    branch: int

    rule = "cand-choose"


@dataclass(frozen=True)
class ChooseCOr:
    premise: str
    occ: Occurrence
    branch: int

    rule = "cor-choose"


@dataclass(frozen=True)
class ChooseCAll:
    premise: str
    occ: Occurrence
    term: object

    rule = "call-choose"


@dataclass(frozen=True)
class ChooseCEx:
    premise: str
    occ: Occurrence
    term: object

    rule = "cex-choose"


@dataclass(frozen=True)
class Replicate:
    premise: str
    position: int

    rule = "replicate"


@dataclass(frozen=True)
class Wait:
    premises: tuple[str, ...] = ()
    trusted: bool = False

    rule = "wait"


@dataclass(frozen=True)
class ProofStep:
    label: str
    sequent: Sequent
    just: object


@dataclass(frozen=True)
class CL12Proof:
    steps: tuple[ProofStep, ...]

    def __len__(self):
        return len(self.steps)

    @property
    def final(self) -> Sequent:
        return self.steps[-1].sequent

    def index(self, label: str) -> int:
        for i, st in enumerate(self.steps):
            if st.label == label:
                return i
        raise KeyError(f"no step labelled {label!r}")

    def step(self, label: str) -> ProofStep:
        return self.steps[self.index(label)]

    def subproof(self, label: str) -> "CL12Proof":
        """The steps transitively cited from `label`, in original order."""
        need = {label}
        keep = []
        for st in reversed(self.steps):
            if st.label in need:
                keep.append(st)
                need.update(_cited(st.just))
        return CL12Proof(tuple(reversed(keep)))

    def to_text(self) -> str:
        return "".join(_step_line(st) for st in self.steps)


# Immutable value objects, same treatment as formula nodes.
for _c in (Occurrence, ChooseCAnd, ChooseCOr, ChooseCAll, ChooseCEx,
           Replicate, Wait, ProofStep, CL12Proof):
    _install_value_semantics(_c)
del _c


def _cited(just) -> tuple[str, ...]:
    if isinstance(just, Wait):
        return just.premises
    return (just.premise,)


def _step_line(st: ProofStep) -> str:
    j = st.just
    if isinstance(j, Wait):
        rule = "wait!" if j.trusted else "wait"
        args = (" " + ",".join(j.premises)) if j.premises else ""
    elif isinstance(j, Replicate):
        rule, args = j.rule, f" {j.premise} ante[{j.position}]"
    elif isinstance(j, (ChooseCAnd, ChooseCOr)):
        rule, args = j.rule, f" {j.premise} {j.occ} {j.branch}"
    else:
        rule, args = j.rule, f" {j.premise} {j.occ} {term_text(j.term)}"
    return f"step {st.label}: {sequent_text(st.sequent)} ; {rule}{args}\n"


def relabel(steps) -> CL12Proof:
    """Renumber steps 1..n, rewriting every premise reference."""
    names = {st.label: str(i + 1) for i, st in enumerate(steps)}
    out = []
    for st in steps:
        j = st.just
        if isinstance(j, Wait):
            j = Wait(tuple(names[p] for p in j.premises), j.trusted)
        else:
            j = _retarget(j, names[j.premise])
        out.append(ProofStep(names[st.label], st.sequent, j))
    return CL12Proof(tuple(out))


# --------------------------------------------------------------------------
# proof file parsing


class ProofParseError(ValueError):
    def __init__(self, message, line, col):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


_STEP_RE = re.compile(r"^step\s+([A-Za-z0-9_.\-]+)\s*:\s*(.*?)\s*;\s*(\S.*?)\s*$")
_TERM_RE = re.compile(r"^(\d+|[a-z][A-Za-z0-9_]*)$")


def _parse_term_arg(tok: str, line: int, col: int):
    if not _TERM_RE.match(tok):
        raise ProofParseError(f"bad term {tok!r}", line, col)
    return Const(int(tok)) if tok.isdigit() else Var(tok)


def parse_proof(text: str) -> CL12Proof:
    steps = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = _STEP_RE.match(line)
        if not m:
            raise ProofParseError("expected 'step <label>: <sequent> ; <rule> ...'",
                                  lineno, 1)
        label, seq_text, just_text = m.groups()
        if label in seen:
            raise ProofParseError(f"duplicate label {label!r}", lineno, 1)
        seen.add(label)
        try:
            seq = parse_sequent(seq_text)
        except ParseError as exc:
            raise ProofParseError(str(exc), lineno, m.start(2) + 1) from exc
        just = _parse_just(just_text, lineno, m.start(3) + 1)
        steps.append(ProofStep(label, seq, just))
    if not steps:
        raise ProofParseError("no steps", 1, 1)
    return CL12Proof(tuple(steps))


def _parse_just(text: str, line: int, col: int):
    toks = text.split()
    rule = toks[0]
    if rule in ("wait", "wait!"):
        rest = "".join(toks[1:])
        premises = tuple(p for p in rest.split(",") if p)
        return Wait(premises, trusted=rule.endswith("!"))
    if rule not in ("cand-choose", "cor-choose", "call-choose", "cex-choose",
                    "replicate"):
        raise ProofParseError(f"unknown rule {rule!r}", line, col)
    want = 2 if rule == "replicate" else 3
    if len(toks) != want + 1:
        raise ProofParseError(f"{rule} takes {want} arguments", line, col)
    premise = toks[1]
    try:
        occ = parse_occurrence(toks[2])
    except ValueError as exc:
        raise ProofParseError(str(exc), line, col) from exc
    if rule == "replicate":
        if occ.region != "ante" or occ.path:
            raise ProofParseError("replicate takes a bare ante[k] position",
                                  line, col)
        return Replicate(premise, occ.index)
    if rule in ("cand-choose", "cor-choose"):
        if toks[3] not in ("0", "1"):
            raise ProofParseError("branch must be 0 or 1", line, col)
        cls = ChooseCAnd if rule == "cand-choose" else ChooseCOr
        return cls(premise, occ, int(toks[3]))
    term = _parse_term_arg(toks[3], line, col)
    cls = ChooseCAll if rule == "call-choose" else ChooseCEx
    return cls(premise, occ, term)


def load_proof(path) -> CL12Proof:
    return parse_proof(Path(path).read_text(encoding="utf-8"))


# --------------------------------------------------------------------------
# checking


@dataclass(frozen=True)
class StepReport:
    label: str
    status: str  # "ok" | "rejected" | "unknown"
    violations: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class ProofVerdict:
    status: str  # "ok" | "rejected" | "unknown"
    steps: tuple[StepReport, ...]

    def report(self) -> str:
        lines = [f"proof: {self.status}"]
        for st in self.steps:
            lines.append(f"  step {st.label}: {st.status}")
            lines.extend(f"    violation: {v}" for v in st.violations)
            lines.extend(f"    warning: {w}" for w in st.warnings)
        return "\n".join(lines)


def _seq_names(s: Sequent) -> frozenset:
    return seq_all_names(s)


def _seq_bound(s: Sequent) -> set:
    out = set()
    for f in s.antecedent + (s.succedent,):
        out |= bound_vars(f)
    return out


def _instantiates_with(binder_var, body, candidate):
    """Variables y such that body[binder_var := y] equals candidate.

    Empty when no variable fits; when binder_var is not free in body any
    y works and the marker "*" is returned instead.
    """
    if binder_var not in free_vars(body):
        return ["*"] if alpha_equal(body, candidate) else []
    hits = []
    for y in sorted(free_vars(candidate)):
        if alpha_equal(substitute(body, {binder_var: Var(y)}), candidate):
            hits.append(y)
    return hits


def check_step(proof: CL12Proof, i: int, *, stability_budget=4000) -> StepReport:
    st = proof.steps[i]
    x = st.sequent
    j = st.just
    violations = []
    warnings = []

    earlier = {p.label: p for p in proof.steps[:i]}

    def premise_of(label):
        if label not in earlier:
            violations.append(f"premise {label!r} is not an earlier step")
            return None
        return earlier[label]

    if isinstance(j, Wait):
        cited = []
        for lab in j.premises:
            p = premise_of(lab)
            if p is not None:
                cited.append(p)
        used = set()

        def find(expected, what):
            for p in cited:
                if alpha_equal_sequents(p.sequent, expected):
                    used.add(p.label)
                    return True
            violations.append(what)
            return False

        def find_fresh(occ, node, what):
            # a premise replacing the occurrence by the body with the
            # bound variable renamed to something foreign to this step
            taboo = _seq_names(x)
            for p in cited:
                try:
                    cand = occ_formula(p.sequent, occ)
                except KeyError:
                    continue
                for y in _instantiates_with(node.var, node.body, cand):
                    if y != "*" and (y in taboo):
                        continue
                    inst = node.body if y == "*" else substitute(
                        node.body, {node.var: Var(y)})
                    if alpha_equal_sequents(occ_replace(x, occ, inst), p.sequent):
                        used.add(p.label)
                        return True
            violations.append(what)
            return False

        for path, node in surface_choice_occurrences(x.succedent):
            occ = Occurrence("succ", None, path)
            if isinstance(node, CAnd):
                for b in (0, 1):
                    find(occ_replace(x, occ, children(node)[b]),
                         f"choice-and condition unmet at {occ} branch {b}")
            elif isinstance(node, ChoiceAll):
                find_fresh(occ, node, f"choice-all condition unmet at {occ}")
        for k, member in enumerate(x.antecedent):
            for path, node in surface_choice_occurrences(member):
                occ = Occurrence("ante", k, path)
                if isinstance(node, COr):
                    for b in (0, 1):
                        find(occ_replace(x, occ, children(node)[b]),
                             f"choice-or condition unmet at {occ} branch {b}")
                elif isinstance(node, ChoiceEx):
                    find_fresh(occ, node, f"choice-ex condition unmet at {occ}")

        for p in cited:
            if p.label not in used:
                warnings.append(f"premise {p.label!r} not required by any condition")

        status = "ok"
        if not violations:
            verdict = prove_classical(sequent_elementarization(x),
                                      budget=stability_budget)
            if verdict.status == "invalid":
                violations.append("unstable: elementarization is classically invalid")
            elif verdict.status == "unknown":
                if j.trusted:
                    warnings.append("stability taken on trust (oracle budget ran out)")
                else:
                    status = "unknown"
                    warnings.append("stability unknown under budget")
        if violations:
            status = "rejected"
        return StepReport(st.label, status, tuple(violations), tuple(warnings))

    if isinstance(j, Replicate):
        p = premise_of(j.premise)
        if not (0 <= j.position < len(x.antecedent)):
            violations.append(f"replicate position {j.position} out of range")
        elif p is not None:
            expected = Sequent(x.antecedent + (x.antecedent[j.position],),
                               x.succedent)
            if not alpha_equal_sequents(p.sequent, expected):
                violations.append(
                    "premise must repeat antecedent member "
                    f"{j.position} at the end")
        status = "rejected" if violations else "ok"
        return StepReport(st.label, status, tuple(violations), tuple(warnings))

    # the four choose rules
    p = premise_of(j.premise)
    wanted_region = "ante" if isinstance(j, (ChooseCAnd, ChooseCAll)) else "succ"
    if j.occ.region != wanted_region:
        violations.append(f"{j.rule} targets a {wanted_region} occurrence")
    node = None
    if not violations:
        try:
            node = occ_formula(x, j.occ)
        except KeyError as exc:
            violations.append(f"bad occurrence {j.occ}: {exc.args[0]}")
    want_node = {ChooseCAnd: CAnd, ChooseCOr: COr,
                 ChooseCAll: ChoiceAll, ChooseCEx: ChoiceEx}[type(j)]
    if node is not None and not isinstance(node, want_node):
        violations.append(f"no matching choice operator at {j.occ}")
        node = None
    if node is not None and p is not None:
        if isinstance(j, (ChooseCAnd, ChooseCOr)):
            expected = occ_replace(x, j.occ, children(node)[j.branch])
        else:
            expected = occ_replace(x, j.occ,
                                   substitute(node.body, {node.var: j.term}))
            if isinstance(j.term, Var) and j.term.name in _seq_bound(p.sequent):
                violations.append(
                    f"term {j.term.name} has a bound occurrence in the premise")
        if not violations and not alpha_equal_sequents(p.sequent, expected):
            violations.append(f"premise {j.premise!r} does not match the rule")
    status = "rejected" if violations else "ok"
    return StepReport(st.label, status, tuple(violations), tuple(warnings))


def check_proof(proof: CL12Proof, *, stability_budget=4000) -> ProofVerdict:
    if not proof.steps:
        return ProofVerdict("rejected",
                            (StepReport("-", "rejected", ("empty proof",)),))
    labels = [st.label for st in proof.steps]
    if len(set(labels)) != len(labels):
        return ProofVerdict("rejected",
                            (StepReport("-", "rejected", ("duplicate labels",)),))
    reports = tuple(check_step(proof, i, stability_budget=stability_budget)
                    for i in range(len(proof.steps)))
    status = "ok"
    if any(r.status == "unknown" for r in reports):
        status = "unknown"
    if any(r.status == "rejected" for r in reports):
        status = "rejected"
    return ProofVerdict(status, reports)


# --------------------------------------------------------------------------
# developments


@dataclass(frozen=True)
class Development:
    source: Sequent
    result: Sequent
    player: str
    kind: str
    occ: Occurrence | None
    arg: object = None
    fresh: str | None = None
    bindings: tuple = ()


_install_value_semantics(Development)


def _fresh_g(avoid) -> str:
    i = 1
    while f"g_{i}" in avoid:
        i += 1
    return f"g_{i}"


def developments(s: Sequent, player: str, constant_bound: int = 2):
    """Single-move successors (for the environment side) or single-rule
    predecessors (for the machine side) of a sequent."""
    out = []
    if player == PLAYER_B:
        for path, node in surface_choice_occurrences(s.succedent):
            occ = Occurrence("succ", None, path)
            if isinstance(node, CAnd):
                for b in (0, 1):
                    out.append(Development(s, occ_replace(s, occ, children(node)[b]),
                                           player, "succ-choice-and", occ, b))
            elif isinstance(node, ChoiceAll):
                g = _fresh_g(_seq_names(s))
                res = occ_replace(s, occ, substitute(node.body, {node.var: Var(g)}))
                out.append(Development(s, res, player, "succ-choice-all", occ,
                                       None, fresh=g))
        for k, member in enumerate(s.antecedent):
            for path, node in surface_choice_occurrences(member):
                occ = Occurrence("ante", k, path)
                if isinstance(node, COr):
                    for b in (0, 1):
                        out.append(Development(
                            s, occ_replace(s, occ, children(node)[b]),
                            player, "ante-choice-or", occ, b))
                elif isinstance(node, ChoiceEx):
                    g = _fresh_g(_seq_names(s))
                    res = occ_replace(s, occ,
                                      substitute(node.body, {node.var: Var(g)}))
                    out.append(Development(s, res, player, "ante-choice-ex", occ,
                                           None, fresh=g))
        return out

    terms = [Const(c) for c in range(constant_bound + 1)]
    terms += [Var(v) for v in sorted(seq_free_vars(s))]
    for k, member in enumerate(s.antecedent):
        for path, node in surface_choice_occurrences(member):
            occ = Occurrence("ante", k, path)
            if isinstance(node, CAnd):
                for b in (0, 1):
                    out.append(Development(s, occ_replace(s, occ, children(node)[b]),
                                           player, "cand-choose", occ, b))
            elif isinstance(node, ChoiceAll):
                for t in terms:
                    res = occ_replace(s, occ, substitute(node.body, {node.var: t}))
                    if isinstance(t, Var) and t.name in _seq_bound(res):
                        continue
                    out.append(Development(s, res, player, "call-choose", occ, t))
    for path, node in surface_choice_occurrences(s.succedent):
        occ = Occurrence("succ", None, path)
        if isinstance(node, COr):
            for b in (0, 1):
                out.append(Development(s, occ_replace(s, occ, children(node)[b]),
                                       player, "cor-choose", occ, b))
        elif isinstance(node, ChoiceEx):
            for t in terms:
                res = occ_replace(s, occ, substitute(node.body, {node.var: t}))
                if isinstance(t, Var) and t.name in _seq_bound(res):
                    continue
                out.append(Development(s, res, player, "cex-choose", occ, t))
    for k, member in enumerate(s.antecedent):
        res = Sequent(s.antecedent + (member,), s.succedent)
        out.append(Development(s, res, player, "replicate", None, k))
    return out


# --------------------------------------------------------------------------
# proof transformation after an environment move


class TransformError(RuntimeError):
    """The development does not match any premise of the final Wait step.
    Impossible for checked proofs; indicates a checker or caller bug."""


_label_counter = 0


def _new_label() -> str:
    global _label_counter
    _label_counter += 1
    return f"t{_label_counter}"


def _rename_free(proof_steps, old: str, new: str):
    """Uniformly rename a free variable across steps, including the term
    arguments of choose justifications."""
    mapping = {old: Var(new)}
    out = []
    for st in proof_steps:
        ante = tuple(substitute(f, mapping) for f in st.sequent.antecedent)
        succ = substitute(st.sequent.succedent, mapping)
        j = st.just
        if isinstance(j, (ChooseCAll, ChooseCEx)) and isinstance(j.term, Var) \
                and j.term.name == old:
            j = type(j)(j.premise, j.occ, Var(new))
        if j is st.just and succ is st.sequent.succedent \
                and all(a is b for a, b in zip(ante, st.sequent.antecedent)):
            out.append(st)
            continue
        out.append(ProofStep(st.label, Sequent(ante, succ), j))
    return out


def _all_proof_names(steps) -> set:
    names = set()
    for st in steps:
        names |= _seq_names(st.sequent)
    return names


def _push(steps, items, recipe, owned=False):
    """Rebuild a proof after simultaneously replacing the (identical) choice
    occurrences listed in `items` throughout the final sequent.

    recipe is ("branch", i) or ("subst", y); steps is a list of ProofStep
    ending at the sequent the items refer to.  `owned` records that earlier
    occurrences already received the shared fresh variable, so meeting it
    again is intended rather than a clash.  Returns a new step list.
    """
    proof = CL12Proof(tuple(steps))
    last = steps[-1]
    x = last.sequent
    if isinstance(last.just, Wait):
        occ = items[0]
        node = occ_formula(x, occ)
        if recipe[0] == "branch":
            expected = occ_replace(x, occ, children(node)[recipe[1]])
            for lab in last.just.premises:
                p = proof.step(lab)
                if alpha_equal_sequents(p.sequent, expected):
                    sub = list(proof.subproof(lab).steps)
                    break
            else:
                raise TransformError(f"no premise matches branch development at {occ}")
        else:
            y = recipe[1]
            sub = None
            for lab in last.just.premises:
                p = proof.step(lab)
                try:
                    cand = occ_formula(p.sequent, occ)
                except KeyError:
                    continue
                taboo = _seq_names(x) - ({y} if owned else set())
                for z in _instantiates_with(node.var, node.body, cand):
                    if z != "*" and z in taboo:
                        continue
                    inst = node.body if z == "*" else substitute(
                        node.body, {node.var: Var(z)})
                    if not alpha_equal_sequents(occ_replace(x, occ, inst), p.sequent):
                        continue
                    sub = list(proof.subproof(lab).steps)
                    if z != "*" and z != y:
                        if not owned and y in _all_proof_names(sub):
                            spare = _fresh_g(_all_proof_names(sub) | taboo | {y, z})
                            sub = _rename_free(sub, y, spare)
                        sub = _rename_free(sub, z, y)
                    break
                if sub is not None:
                    break
            if sub is None:
                raise TransformError(
                    f"no premise matches quantifier development at {occ}")
            owned = True
        if len(items) == 1:
            return sub
        return _push(sub, items[1:], recipe, owned)

    # final step applies a choose or replicate rule; push the replacement
    # through to its premise and re-apply the rule
    j = last.just
    sub = list(proof.subproof(j.premise).steps)
    if isinstance(j, Replicate):
        mapped = []
        for occ in items:
            mapped.append(occ)
            if occ.region == "ante" and occ.index == j.position:
                mapped.append(Occurrence("ante", len(x.antecedent), occ.path))
        new_just = Replicate(sub[-1].label, j.position)
        items_u = mapped
    else:
        for occ in items:
            if occ.region == j.occ.region and occ.index == j.occ.index \
                    and occ.path == j.occ.path:
                raise TransformError("development collides with the final rule")
        new_just = _retarget(j, sub[-1].label)
        items_u = list(items)
    if recipe[0] == "subst" and not owned \
            and recipe[1] in _all_proof_names(sub):
        # the premise may legitimately contain the chosen fresh name (terms
        # introduced above this step); move it out of the way first
        spare = _fresh_g(_all_proof_names(sub) | _seq_names(x) | {recipe[1]})
        sub = _rename_free(sub, recipe[1], spare)
        if isinstance(new_just, (ChooseCAll, ChooseCEx)) \
                and isinstance(new_just.term, Var) \
                and new_just.term.name == recipe[1]:
            new_just = type(new_just)(new_just.premise, new_just.occ, Var(spare))
    pushed = _push(sub, items_u, recipe, owned)
    new_just = _retarget(new_just, pushed[-1].label)
    y = _apply_recipe(x, items, recipe)
    return pushed + [ProofStep(_new_label(), y, new_just)]


def _retarget(just, premise_label):
    if isinstance(just, Wait):
        return just
    if isinstance(just, Replicate):
        return Replicate(premise_label, just.position)
    if isinstance(just, (ChooseCAnd, ChooseCOr)):
        return type(just)(premise_label, just.occ, just.branch)
    return type(just)(premise_label, just.occ, just.term)


def _apply_recipe(s: Sequent, items, recipe) -> Sequent:
    for occ in items:
        node = occ_formula(s, occ)
        if recipe[0] == "branch":
            s = occ_replace(s, occ, children(node)[recipe[1]])
        else:
            s = occ_replace(s, occ,
                            substitute(node.body, {node.var: Var(recipe[1])}))
    return s


def transform_proof(proof: CL12Proof, dev) -> CL12Proof:
    """Specialize a proof along one environment development (or a sequence
    of them; an empty sequence returns the proof unchanged)."""
    if isinstance(dev, Development):
        devs = [dev]
    else:
        devs = list(dev)
        if not devs:
            return proof
    for d in devs:
        if d.player != PLAYER_B:
            raise ValueError("transform_proof takes environment developments")
        if not alpha_equal_sequents(d.source, proof.final):
            raise ValueError("development source is not the proof's final sequent")
        recipe = ("branch", d.arg) if d.kind in ("succ-choice-and",
                                                 "ante-choice-or") \
            else ("subst", d.fresh)
        steps = _push(list(proof.steps), [d.occ], recipe)
        proof = relabel(steps)
    return proof


# A replayed strategy meets the same developments over and over (constants
# live in the valuation, not the proof), so specialization is cacheable.
@lru_cache(maxsize=4096)
def _transform_memo(proof: CL12Proof, dev: Development) -> CL12Proof:
    return transform_proof(proof, dev)


# --------------------------------------------------------------------------
# bounded proof search


@dataclass(frozen=True)
class SearchResult:
    status: str  # "found" | "not-found" | "refuted"
    proof: CL12Proof | None
    nodes: int


class _Searcher:
    def __init__(self, constant_bound, stability_budget):
        self.cbound = constant_bound
        self.sbudget = stability_budget
        self.proofs = {}     # canon text -> CL12Proof
        self.fails = {}      # canon text -> (depth_tried, was_depth_limited)
        self.stability = {}  # canon text -> verdict status
        self.nodes = 0
        self.limited = False
        self.truncated = False
        self.unknown_seen = False

    def stable(self, key, s):
        if key not in self.stability:
            v = prove_classical(sequent_elementarization(s), budget=self.sbudget)
            self.stability[key] = v.status
        st = self.stability[key]
        if st == "unknown":
            self.unknown_seen = True
        return st == "valid"

    def prove(self, s: Sequent, depth: int):
        key = sequent_text(s)
        if key in self.proofs:
            return self.proofs[key]
        if key in self.fails:
            tried, was_limited = self.fails[key]
            if not was_limited or depth <= tried:
                if was_limited:
                    self.limited = True
                return None
        self.nodes += 1
        if depth <= 0:
            self.limited = True
            self.fails[key] = (depth, True)
            return None
        limited_before = self.limited
        self.limited = False
        found = None
        tdevs = developments(s, PLAYER_T, self.cbound)
        if any(d.kind in ("call-choose", "cex-choose") for d in tdevs):
            # the term menu is cut off at the constant bound, so a failed
            # exploration of this node is not an exhaustive refutation
            self.truncated = True
        tdevs = [d for d in tdevs
                 if d.kind != "replicate"
                 or any(True for _ in surface_choice_occurrences(
                     s.antecedent[d.arg]))]
        tdevs.sort(key=lambda d: d.kind == "replicate")
        for dev in tdevs:
            sub = self.prove(dev.result, depth - 1)
            if sub is not None:
                found = self._extend(sub, s, dev)
                break
        if found is None and self.stable(key, s):
            bdevs = developments(s, PLAYER_B, self.cbound)
            subs = []
            for dev in bdevs:
                sub = self.prove(dev.result, depth - 1)
                if sub is None:
                    subs = None
                    break
                subs.append(sub)
            if subs is not None:
                found = self._wait(s, subs)
        limited_here = self.limited
        self.limited = limited_before or limited_here
        if found is not None:
            self.proofs[key] = found
            return found
        self.fails[key] = (depth, limited_here)
        return None

    def _extend(self, sub: CL12Proof, s: Sequent, dev) -> CL12Proof:
        last = sub.steps[-1].label
        if dev.kind == "replicate":
            j = Replicate(last, dev.arg)
        elif dev.kind == "cand-choose":
            j = ChooseCAnd(last, dev.occ, dev.arg)
        elif dev.kind == "cor-choose":
            j = ChooseCOr(last, dev.occ, dev.arg)
        elif dev.kind == "call-choose":
            j = ChooseCAll(last, dev.occ, dev.arg)
        else:
            j = ChooseCEx(last, dev.occ, dev.arg)
        return relabel(list(sub.steps) + [ProofStep(_new_label(), s, j)])

    def _wait(self, s: Sequent, subs) -> CL12Proof:
        steps = []
        canon_label = {}
        finals = []
        for sub in subs:
            remap = {}
            for st in sub.steps:
                key = sequent_text(st.sequent)
                if key in canon_label:
                    remap[st.label] = canon_label[key]
                    continue
                j = st.just
                if isinstance(j, Wait):
                    j = dataclasses.replace(
                        j, premises=tuple(remap.get(p, p) for p in j.premises))
                else:
                    j = dataclasses.replace(j, premise=remap.get(j.premise,
                                                                 j.premise))
                lab = _new_label()
                remap[st.label] = lab
                canon_label[key] = lab
                steps.append(ProofStep(lab, st.sequent, j))
            finals.append(remap.get(sub.steps[-1].label,
                                    canon_label[sequent_text(sub.final)]))
        steps.append(ProofStep(_new_label(), s, Wait(tuple(finals))))
        return relabel(steps)


def search(s: Sequent, *, depth=6, constant_bound=2,
           stability_budget=2000) -> SearchResult:
    """Iterative-deepening proof search.

    "refuted" is reported only when the whole space was explored without
    hitting the depth cap or an inconclusive stability oracle, so it is an
    exhaustive refutation; "not-found" is inconclusive.
    """
    searcher = _Searcher(constant_bound, stability_budget)
    proof = None
    for d in range(1, depth + 1):
        searcher.fails = {}
        searcher.limited = False
        searcher.unknown_seen = False
        proof = searcher.prove(s, d)
        if proof is not None:
            break
    if proof is not None:
        verdict = check_proof(proof, stability_budget=max(stability_budget, 4000))
        if verdict.status != "ok":
            raise RuntimeError("search produced a proof that fails checking:\n"
                               + verdict.report())
        return SearchResult("found", proof, searcher.nodes)
    if not (searcher.limited or searcher.truncated or searcher.unknown_seen):
        return SearchResult("refuted", None, searcher.nodes)
    return SearchResult("not-found", None, searcher.nodes)


# --------------------------------------------------------------------------
# proof-to-strategy extraction


def _occ_engine_segs(root, path) -> list[str]:
    """Engine move segments for a surface occurrence: one digit per
    parallel connective on the way, blind quantifiers silent."""
    segs = []
    node = root
    for i in path:
        if isinstance(node, _PARALLEL):
            segs.append(str(i))
        node = children(node)[i]
    return segs


def _resolve_engine_path(root, segs):
    """Follow engine move segments to the choice they resolve.

    Returns (occurrence path, node, resolving value)."""
    node = root
    path = []
    i = 0
    while True:
        if isinstance(node, _BLIND):
            path.append(0)
            node = node.body
            continue
        if isinstance(node, _CHOICE):
            if i != len(segs) - 1:
                raise ValueError("move does not stop at the choice it resolves")
            return tuple(path), node, int(segs[i])
        if isinstance(node, _PARALLEL):
            b = int(segs[i])
            i += 1
            path.append(b)
            node = children(node)[b]
            continue
        raise ValueError("move runs into an atom")


class ProofAgent(Agent):
    """Plays a checked proof's final sequent: emits the choose and
    replicate moves the proof dictates, grants permission at wait steps,
    and specializes the proof after each environment move."""

    def __init__(self, proof: CL12Proof):
        self._initial = proof

    def start(self, valuation):
        self.val = dict(valuation)
        self.proof = self._initial
        self.amap = list(standard_addresses(len(self._initial.final.antecedent)))
        return self._drive()

    def _term_value(self, t) -> int:
        if isinstance(t, Const):
            return t.value
        return int(self.val.get(t.name, 0))

    def _drive(self):
        out = []
        while True:
            st = self.proof.steps[-1]
            j = st.just
            if isinstance(j, Wait):
                return out, True
            if isinstance(j, Replicate):
                addr = self.amap[j.position]
                out.append(addr + ":")
                self.amap[j.position] = addr + "0"
                self.amap.append(addr + "1")
            elif isinstance(j, (ChooseCOr, ChooseCEx)):
                segs = _occ_engine_segs(st.sequent.succedent, j.occ.path)
                segs.append(str(j.branch) if isinstance(j, ChooseCOr)
                            else str(self._term_value(j.term)))
                body = ".".join(segs)
                out.append(body if not self.amap else "S." + body)
            else:
                root = st.sequent.antecedent[j.occ.index]
                segs = _occ_engine_segs(root, j.occ.path)
                segs.append(str(j.branch) if isinstance(j, ChooseCAnd)
                            else str(self._term_value(j.term)))
                out.append(self.amap[j.occ.index] + "." + ".".join(segs))
            self.proof = self.proof.subproof(j.premise)

    def resume(self, env_moves):
        for payload in env_moves:
            self._absorb(payload)
        return self._drive()

    def _fresh(self) -> str:
        avoid = _all_proof_names(self.proof.steps) | set(self.val)
        return _fresh_g(avoid)

    def _absorb(self, payload: str):
        s = self.proof.final
        if not self.amap:
            self._absorb_succ(s, payload.split("."))
            return
        if payload.startswith("S."):
            self._absorb_succ(s, payload[2:].split("."))
            return
        bits, _, rest = payload.partition(".")
        segs = rest.split(".")
        hits = [k for k, a in enumerate(self.amap) if a.startswith(bits)]
        for k in hits:
            member = self.proof.final.antecedent[k]
            path, node, value = _resolve_engine_path(member, segs)
            occ = Occurrence("ante", k, path)
            if isinstance(node, COr):
                dev = Development(self.proof.final,
                                  occ_replace(self.proof.final, occ,
                                              children(node)[value]),
                                  PLAYER_B, "ante-choice-or", occ, value)
            else:
                g = self._fresh()
                res = occ_replace(self.proof.final, occ,
                                  substitute(node.body, {node.var: Var(g)}))
                dev = Development(self.proof.final, res, PLAYER_B,
                                  "ante-choice-ex", occ, None, fresh=g)
                self.val[g] = value
            self.proof = _transform_memo(self.proof, dev)

    def _absorb_succ(self, s: Sequent, segs):
        path, node, value = _resolve_engine_path(s.succedent, segs)
        occ = Occurrence("succ", None, path)
        if isinstance(node, CAnd):
            dev = Development(s, occ_replace(s, occ, children(node)[value]),
                              PLAYER_B, "succ-choice-and", occ, value)
        else:
            g = self._fresh()
            res = occ_replace(s, occ, substitute(node.body, {node.var: Var(g)}))
            dev = Development(s, res, PLAYER_B, "succ-choice-all", occ, None,
                              fresh=g)
            self.val[g] = value
        self.proof = _transform_memo(self.proof, dev)


def extract_strategy(proof: CL12Proof) -> ProofAgent:
    """An agent that wins the proof's final sequent under every
    interpretation; assumes the proof checks."""
    return ProofAgent(proof)
