"""Move-level game semantics for sequents.

A sequent's antecedent lives in a binary tree whose leaves hold
formulas; leaf addresses are bit strings.  The machine (player T) may
replicate any leaf, splitting address w into w0 and w1 with two copies
of the leaf formula.  Move payloads:

    S.<path>        succedent move
    <bits>.<path>   antecedent move; applies at every leaf whose
                    address extends <bits> (bits may be empty: ".0")
    <bits>:         replication at leaf <bits> (T only)
    <path>          bare move, only in empty-antecedent games

A path is dot-separated: 0 or 1 selects a component of a parallel
conjunction or disjunction and continues; 0 or 1 on a choice
conjunction or disjunction resolves it and must end the path; a
decimal constant resolves a choice quantifier and must end the path.
Blind quantifiers are transparent to paths.  Inside the antecedent the
roles are reversed: a move by P counts as a move by P's opponent.

States are immutable; apply_move returns a new state.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple

from .formulas import (
    And, Atom, BlindAll, BlindEx, Bot, CAnd, COr, ChoiceAll, ChoiceEx,
    Const, Neg, Or, Sequent, Top, formula_text, parse_sequent, substitute,
)
from .semantics import Interpretation, eval_elementary
from .formulas import sequent_elementarization

__all__ = [
    "PLAYER_T", "PLAYER_B", "opponent", "LabMove", "IllegalMove",
    "GameState", "standard_addresses", "initial_state", "apply_move",
    "prefixation",
    "legal_moves", "LegalMoves", "Adjudication", "adjudicate",
    "enumerate_runs", "current_sequent", "parse_transcript",
    "format_transcript", "Transcript",
]

PLAYER_T = "T"
PLAYER_B = "B"


def opponent(p):
    return PLAYER_B if p == PLAYER_T else PLAYER_T


@dataclass(frozen=True)
class LabMove:
    player: str
    payload: str

    def __str__(self):
        return f"{self.player} {self.payload}"


class IllegalMove(Exception):
    """A move rejected by the rules, naming the violated clause."""

    def __init__(self, clause, detail, move=None, index=None):
        self.clause = clause
        self.detail = detail
        self.move = move
        self.index = index
        where = f" (move {index})" if index is not None else ""
        super().__init__(f"{clause}{where}: {detail}")


@dataclass(frozen=True)
class GameState:
    leaves: tuple | None  # ((address, formula), ...) or None when bare
    succedent: object
    valuation: dict = field(default_factory=dict)
    interpretation: Interpretation = field(default_factory=Interpretation.standard)
    history: tuple = ()
    replications: int = 0


def standard_addresses(n: int) -> list:
    """Leaf addresses of the right-nested antecedent tree for n formulas."""
    return ["1" * k if k == n - 1 else "1" * k + "0" for k in range(n)]


def initial_state(s: Sequent, valuation=None, interp=None) -> GameState:
    addrs = standard_addresses(len(s.antecedent))
    leaves = tuple(zip(addrs, s.antecedent)) if addrs else None
    return GameState(leaves=leaves, succedent=s.succedent,
                     valuation=dict(valuation or {}),
                     interpretation=interp or Interpretation.standard())


def current_sequent(g: GameState) -> Sequent:
    ante = () if g.leaves is None else tuple(f for _a, f in g.leaves)
    return Sequent(ante, g.succedent)


# ---------------------------------------------------------------------------
# Payload parsing


class _Succ(NamedTuple):
    segs: tuple


class _Ante(NamedTuple):
    bits: str
    segs: tuple


class _Repl(NamedTuple):
    bits: str


class _Bare(NamedTuple):
    segs: tuple


def _check_segs(raw, payload):
    segs = tuple(raw.split("."))
    for s in segs:
        if not s.isdigit():
            raise IllegalMove("bad-move-syntax",
                             f"segment {s!r} in {payload!r} is not a numeral")
    return segs


def _parse_payload(payload: str, has_antecedent: bool):
    p = payload.strip()
    if not p:
        raise IllegalMove("bad-move-syntax", "empty move payload")
    if p.startswith("S."):
        if not has_antecedent:
            raise IllegalMove("bare-game-move-form",
                             "empty-antecedent games take bare paths, not S.")
        return _Succ(_check_segs(p[2:], p))
    if p.endswith(":"):
        bits = p[:-1]
        if not set(bits) <= {"0", "1"}:
            raise IllegalMove("bad-move-syntax",
                             f"replication address {bits!r} is not a bit string")
        if not has_antecedent:
            raise IllegalMove("bare-game-move-form",
                             "nothing to replicate in an empty-antecedent game")
        return _Repl(bits)
    if not has_antecedent:
        return _Bare(_check_segs(p, p))
    if "." not in p:
        raise IllegalMove("bad-move-syntax",
                         f"{p!r}: sequent moves need S.<path>, <bits>.<path>, "
                         f"or <bits>:")
    bits, rest = p.split(".", 1)
    if not set(bits) <= {"0", "1"}:
        raise IllegalMove("bad-move-syntax",
                         f"address {bits!r} is not a bit string")
    return _Ante(bits, _check_segs(rest, p))


# ---------------------------------------------------------------------------
# In-formula rewriting


class _PathFail(Exception):
    def __init__(self, clause, detail):
        self.clause = clause
        self.detail = detail
        super().__init__(f"{clause}: {detail}")


def _apply_path(f, segs, effective):
    if isinstance(f, (BlindAll, BlindEx)):
        return type(f)(f.var, _apply_path(f.body, segs, effective))
    if not segs:
        raise _PathFail("path-too-short",
                        f"path ends before a choice operator in "
                        f"{formula_text(f)}")
    seg, rest = segs[0], segs[1:]
    if isinstance(f, (And, Or)):
        if seg == "0":
            return type(f)(_apply_path(f.left, rest, effective), f.right)
        if seg == "1":
            return type(f)(f.left, _apply_path(f.right, rest, effective))
        raise _PathFail("bad-segment",
                        f"component selector must be 0 or 1, got {seg}")
    if isinstance(f, (CAnd, COr)):
        owner = PLAYER_B if isinstance(f, CAnd) else PLAYER_T
        if seg not in ("0", "1"):
            raise _PathFail("bad-segment",
                            f"branch choice must be 0 or 1, got {seg}")
        if rest:
            raise _PathFail("trailing-segments",
                            "path continues past a choice resolution")
        if owner != effective:
            raise _PathFail("wrong-player",
                            f"this choice belongs to {owner}")
        return f.left if seg == "0" else f.right
    if isinstance(f, (ChoiceAll, ChoiceEx)):
        owner = PLAYER_B if isinstance(f, ChoiceAll) else PLAYER_T
        if rest:
            raise _PathFail("trailing-segments",
                            "path continues past a constant choice")
        if owner != effective:
            raise _PathFail("wrong-player",
                            f"this constant choice belongs to {owner}")
        return substitute(f.body, {f.var: Const(int(seg))})
    raise _PathFail("no-choice-at-path",
                    f"no move available inside {formula_text(f)}")


# ---------------------------------------------------------------------------
# Applying labmoves


def apply_move(g: GameState, m: LabMove) -> GameState:
    if m.player not in (PLAYER_T, PLAYER_B):
        raise IllegalMove("bad-move-syntax", f"unknown player {m.player!r}",
                          move=m)
    parsed = _parse_payload(m.payload, g.leaves is not None)
    try:
        if isinstance(parsed, _Repl):
            return _apply_replication(g, m, parsed.bits)
        if isinstance(parsed, (_Succ, _Bare)):
            new_succ = _apply_path(g.succedent, parsed.segs, m.player)
            return replace(g, succedent=new_succ, history=g.history + (m,))
        matching = [i for i, (addr, _f) in enumerate(g.leaves)
                    if addr.startswith(parsed.bits)]
        if not matching:
            raise IllegalMove(
                "address-unknown",
                f"{parsed.bits!r} is not a prefix of any leaf address",
                move=m)
        eff = opponent(m.player)
        new_leaves = list(g.leaves)
        for i in matching:
            addr, f = new_leaves[i]
            new_leaves[i] = (addr, _apply_path(f, parsed.segs, eff))
        return replace(g, leaves=tuple(new_leaves), history=g.history + (m,))
    except _PathFail as pf:
        raise IllegalMove(pf.clause, pf.detail, move=m) from None


def _apply_replication(g, m, bits):
    if m.player != PLAYER_T:
        raise IllegalMove("replicate-by-env",
                          "only the machine may replicate", move=m)
    new_leaves = []
    hit = False
    for addr, f in g.leaves:
        if addr == bits:
            hit = True
            new_leaves.append((addr + "0", f))
            new_leaves.append((addr + "1", f))
        else:
            new_leaves.append((addr, f))
    if not hit:
        raise IllegalMove("replicate-not-leaf",
                          f"{bits!r} is not a current leaf address", move=m)
    return replace(g, leaves=tuple(new_leaves), history=g.history + (m,),
                   replications=g.replications + 1)


def prefixation(s: Sequent, run, valuation=None, interp=None) -> GameState:
    """Fold a run over the initial state; 1-based index on rejection."""
    g = initial_state(s, valuation, interp)
    for idx, m in enumerate(run, 1):
        try:
            g = apply_move(g, m)
        except IllegalMove as ex:
            raise IllegalMove(ex.clause, ex.detail, move=m, index=idx) \
                from None
    return g


# ---------------------------------------------------------------------------
# Legal-move enumeration


class LegalMoves(NamedTuple):
    moves: list
    truncated: bool  # some constant-choice family was cut at the bound


def _inpath_moves(f, effective, bound):
    found = []
    truncated = [False]

    def walk(node, prefix):
        if isinstance(node, (BlindAll, BlindEx)):
            walk(node.body, prefix)
        elif isinstance(node, (And, Or)):
            walk(node.left, prefix + ("0",))
            walk(node.right, prefix + ("1",))
        elif isinstance(node, (CAnd, COr)):
            owner = PLAYER_B if isinstance(node, CAnd) else PLAYER_T
            if owner == effective:
                found.append(prefix + ("0",))
                found.append(prefix + ("1",))
        elif isinstance(node, (ChoiceAll, ChoiceEx)):
            owner = PLAYER_B if isinstance(node, ChoiceAll) else PLAYER_T
            if owner == effective:
                truncated[0] = True
                for c in range(bound + 1):
                    found.append(prefix + (str(c),))

    walk(f, ())
    return found, truncated[0]


def legal_moves(g: GameState, player, constant_bound: int = 2) -> LegalMoves:
    moves = []
    truncated = False
    in_succ, tr = _inpath_moves(g.succedent, player, constant_bound)
    truncated = truncated or tr
    head = "" if g.leaves is None else "S."
    moves.extend(LabMove(player, head + ".".join(p)) for p in in_succ)
    if g.leaves is not None:
        if player == PLAYER_T:
            moves.extend(LabMove(player, addr + ":") for addr, _f in g.leaves)
        eff = opponent(player)
        per_leaf = []
        for addr, f in g.leaves:
            paths, tr = _inpath_moves(f, eff, constant_bound)
            truncated = truncated or tr
            per_leaf.append((addr, {".".join(p) for p in paths}))
        prefixes = []
        for addr, _f in g.leaves:
            for k in range(len(addr) + 1):
                if addr[:k] not in prefixes:
                    prefixes.append(addr[:k])
        for u in prefixes:
            shared = None
            for addr, paths in per_leaf:
                if addr.startswith(u):
                    shared = set(paths) if shared is None else shared & paths
            for p in sorted(shared or ()):
                moves.append(LabMove(player, u + "." + p))
    moves.sort(key=lambda m: m.payload)
    return LegalMoves(moves, truncated)


# ---------------------------------------------------------------------------
# Adjudication and enumeration


class Adjudication(NamedTuple):
    winner: str
    approximate: bool


def adjudicate(g: GameState, blind_bound: int = 16) -> Adjudication:
    """Who wins if the play stops in this position."""
    e = sequent_elementarization(current_sequent(g))
    res = eval_elementary(e, g.valuation, g.interpretation, blind_bound)
    return Adjudication(PLAYER_T if res.value else PLAYER_B, not res.exact)


def enumerate_runs(s: Sequent, valuation=None, interp=None, *,
                   max_moves: int, constant_bound: int = 2,
                   max_replications: int = 1, blind_bound: int = 16):
    """Depth-first stream of every legal run within the bounds.

    Yields (run, winner) with the machine's options explored first and
    payloads in lexicographic order within a player.
    """

    def rec(g, left):
        yield g.history, adjudicate(g, blind_bound).winner
        if left == 0:
            return
        for player in (PLAYER_T, PLAYER_B):
            for m in legal_moves(g, player, constant_bound).moves:
                if m.payload.endswith(":") and \
                        g.replications >= max_replications:
                    continue
                yield from rec(apply_move(g, m), left - 1)

    yield from rec(initial_state(s, valuation, interp), max_moves)


# ---------------------------------------------------------------------------
# Transcript files


@dataclass
class Transcript:
    sequent: Sequent
    valuation: dict
    interpretation_spec: str  # "standard" or a table file path
    moves: list


def parse_transcript(text: str) -> Transcript:
    sequent = None
    valuation = {}
    interp_spec = "standard"
    moves = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("sequent:"):
            sequent = parse_sequent(line[len("sequent:"):])
        elif line.startswith("valuation:"):
            body = line[len("valuation:"):].strip()
            if body:
                for part in body.split(","):
                    name, _, num = part.partition("=")
                    valuation[name.strip()] = int(num)
        elif line.startswith("interpretation:"):
            interp_spec = line[len("interpretation:"):].strip()
        else:
            player, _, payload = line.partition(" ")
            if player not in (PLAYER_T, PLAYER_B) or not payload.strip():
                raise ValueError(f"line {lineno}: bad move line {raw!r}")
            moves.append(LabMove(player, payload.strip()))
    if sequent is None:
        raise ValueError("transcript has no sequent: header")
    return Transcript(sequent, valuation, interp_spec, moves)


def format_transcript(t: Transcript) -> str:
    lines = [f"sequent: {t.sequent}"]
    if t.valuation:
        pairs = ", ".join(f"{k}={v}" for k, v in sorted(t.valuation.items()))
        lines.append(f"valuation: {pairs}")
    if t.interpretation_spec != "standard":
        lines.append(f"interpretation: {t.interpretation_spec}")
    lines.extend(str(m) for m in t.moves)
    return "\n".join(lines) + "\n"
