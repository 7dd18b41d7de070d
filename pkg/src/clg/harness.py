"""Simulation driver, environments, transcript logs, and the
delay-based timing-robustness tester.

The driver alternates agent steps with environment deliveries under
the permission discipline: the environment acts only when the agent
has granted, and either side may pass.  Two consecutive quiet rounds
end the play, which is then adjudicated in its final position.

Timing robustness is probed through delays: a run permuted so that one
player's moves happen later (never earlier) relative to the other's.
A game is timing-robust when delaying a player's moves never turns a
won run into a lost one nor an innocent run into an offending one.
Sequent games have this property; the planted counterexample game, in
which whoever moves first wins, does not, and validates the tester.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .engine import (
    PLAYER_B, PLAYER_T, IllegalMove, LabMove, adjudicate, apply_move,
    initial_state, legal_moves, opponent, prefixation,
)
from .formulas import (
    And, BlindAll, BlindEx, COr, ChoiceEx, Const, Or, Sequent,
    parse_sequent, sequent_text, substitute,
)
from .semantics import eval_elementary

__all__ = [
    "FairnessExhausted", "ScriptedEnv", "RandomLegalEnv", "OracleEnv",
    "TranscriptRecord", "simulate", "append_log", "read_log", "replay_record",
    "VersusReport", "exhaustive_versus", "is_delay", "delays",
    "StaticVerdict", "check_static", "SequentGame", "ExplicitGame",
    "planted_nonstatic_game",
]


class FairnessExhausted(Exception):
    """The agent failed to grant permission within its step budget."""


# ---------------------------------------------------------------------------
# Environments


class ScriptedEnv:
    """Delivers fixed blocks, one per permission grant."""

    def __init__(self, blocks):
        self.blocks = [b if isinstance(b, (list, tuple)) else [b]
                       for b in blocks]
        self.at = 0

    def deliver(self, state, rng):
        if self.at >= len(self.blocks):
            return []
        b = self.blocks[self.at]
        self.at += 1
        return [str(m) for m in b]


class RandomLegalEnv:
    """Plays a uniformly chosen legal move with fixed probability."""

    def __init__(self, constant_bound=3, move_probability=0.7):
        self.bound = constant_bound
        self.prob = move_probability

    def deliver(self, state, rng):
        if rng.random() >= self.prob:
            return []
        options = legal_moves(state, PLAYER_B, self.bound).moves
        if not options:
            return []
        return [rng.choice(options).payload]


class OracleEnv:
    """Honours resource queries: when the machine turns an antecedent
    formula into a choice the environment owns, answer so the chosen
    branch is true under the game's valuation and interpretation."""

    def __init__(self, witness_bound=64):
        self.witness_bound = witness_bound

    def deliver(self, state, rng):
        out = []
        for addr, f in state.leaves or ():
            payload = self._answer(f, addr, state)
            if payload is not None:
                out.append(payload)
        return out

    def _answer(self, f, addr, state):
        path = self._find(f, state, ())
        return None if path is None else addr + "." + ".".join(path)

    def _find(self, f, state, prefix):
        # surface scan only; the answers live at the connectives the
        # machine owns, which inside the antecedent fall to the env
        if isinstance(f, (BlindAll, BlindEx)):
            return self._find(f.body, state, prefix)
        if isinstance(f, (And, Or)):
            return (self._find(f.left, state, prefix + ("0",))
                    or self._find(f.right, state, prefix + ("1",)))
        if isinstance(f, COr):
            for seg, side in (("0", f.left), ("1", f.right)):
                r = eval_elementary(side, state.valuation,
                                    state.interpretation)
                if r.value and r.exact:
                    return prefix + (seg,)
            return None
        if isinstance(f, ChoiceEx):
            for c in range(self.witness_bound + 1):
                inst = substitute(f.body, {f.var: Const(c)})
                try:
                    r = eval_elementary(inst, state.valuation,
                                        state.interpretation)
                except Exception:
                    return None
                if r.value and r.exact:
                    return prefix + (str(c),)
            return None
        return None


# ---------------------------------------------------------------------------
# Simulation


@dataclass
class TranscriptRecord:
    sequent: str
    valuation: dict
    interpretation: str
    seed: int | None
    run: list                # [(player, payload), ...]
    winner: str
    flags: list = field(default_factory=list)

    def to_json(self):
        return json.dumps({
            "sequent": self.sequent, "valuation": self.valuation,
            "interpretation": self.interpretation, "seed": self.seed,
            "run": self.run, "winner": self.winner, "flags": self.flags,
        })

    @staticmethod
    def from_json(line):
        d = json.loads(line)
        return TranscriptRecord(d["sequent"], d["valuation"],
                                d["interpretation"], d["seed"],
                                [tuple(m) for m in d["run"]], d["winner"],
                                d["flags"])


def append_log(path, record):
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(record.to_json() + "\n")


def read_log(path):
    with open(path, encoding="utf-8") as fh:
        return [TranscriptRecord.from_json(line)
                for line in fh if line.strip()]


def replay_record(rec: TranscriptRecord, interp=None):
    """Re-fold a stored run and return the fresh adjudication winner."""
    s = parse_sequent(rec.sequent)
    g = prefixation(s, [LabMove(p, m) for p, m in rec.run],
                    valuation=rec.valuation, interp=interp)
    return adjudicate(g).winner


def simulate(agent, env, s: Sequent, valuation=None, interp=None, *,
             agent_step_budget=200, max_rounds=64, seed=None,
             log_path=None) -> TranscriptRecord:
    """Play one game to quiescence and adjudicate the final position."""
    rng = random.Random(seed)
    g = initial_state(s, valuation, interp)
    flags = []
    winner = None

    def finish(w):
        rec = TranscriptRecord(
            sequent_text(s), dict(valuation or {}),
            (interp.name if interp else "standard") or "custom",
            seed, [(m.player, m.payload) for m in g.history], w, flags)
        if log_path:
            append_log(log_path, rec)
        return rec

    block, granted = agent.start(g.valuation)
    steps = 0
    for _round in range(max_rounds):
        agent_moved = False
        while True:
            for payload in block:
                try:
                    g = apply_move(g, LabMove(PLAYER_T, payload))
                    agent_moved = True
                except IllegalMove as ex:
                    flags.append(f"illegal:T:{ex.clause}")
                    return finish(PLAYER_B)
            if granted:
                break
            steps += 1
            if steps > agent_step_budget:
                raise FairnessExhausted(
                    f"no permission grant within {agent_step_budget} steps")
            block, granted = agent.resume([])
        env_block = env.deliver(g, rng)
        applied = []
        for payload in env_block:
            try:
                g = apply_move(g, LabMove(PLAYER_B, str(payload)))
                applied.append(str(payload))
            except IllegalMove as ex:
                flags.append(f"illegal:B:{ex.clause}")
                return finish(PLAYER_T)
        if not applied and not agent_moved:
            return finish(adjudicate(g).winner)
        block, granted = agent.resume(applied)
    flags.append("round-budget")
    verdict = adjudicate(g)
    if verdict.approximate:
        flags.append("approximate")
    return finish(verdict.winner)


# ---------------------------------------------------------------------------
# Exhaustive bounded opposition


@dataclass
class VersusReport:
    plays: int = 0
    losses: int = 0
    incidents: list = field(default_factory=list)
    loss_runs: list = field(default_factory=list)

    @property
    def clean(self):
        return self.losses == 0 and not self.incidents


def exhaustive_versus(agent, s: Sequent, valuation=None, interp=None, *,
                      constant_bound=2, max_env_moves=3,
                      max_replications=4, agent_step_budget=200,
                      keep=8) -> VersusReport:
    """Play the agent against every bounded environment line of play.

    The environment tree branches at each permission grant over every
    legal move (constants up to the bound) plus a pass; a pass against
    a quiet agent ends the play.  Losses and illegal agent moves are
    collected, with up to `keep` offending runs retained.
    """
    report = VersusReport()

    def drive(g, ag, block, granted):
        # apply the agent's pending block, stepping until it grants
        steps = 0
        agent_moved = False
        while True:
            for payload in block:
                try:
                    g = apply_move(g, LabMove(PLAYER_T, payload))
                    agent_moved = True
                except IllegalMove as ex:
                    report.incidents.append(
                        f"illegal:T:{ex.clause}:{payload}")
                    return None, None, False
            if granted:
                return g, ag, agent_moved
            steps += 1
            if steps > agent_step_budget:
                report.incidents.append("fairness-budget")
                return None, None, False
            block, granted = ag.resume([])

    def close_out(g):
        report.plays += 1
        if adjudicate(g).winner != PLAYER_T:
            report.losses += 1
            if len(report.loss_runs) < keep:
                report.loss_runs.append(
                    [(m.player, m.payload) for m in g.history])

    def rec(g, ag, env_left, agent_moved):
        if g.replications > max_replications:
            report.incidents.append("replication-bound")
            return
        if len(g.history) > 50 * (max_env_moves + 1):
            report.incidents.append("runaway-agent")
            return
        # pass branch: terminal when the agent is also quiet
        if not agent_moved:
            close_out(g)
        else:
            ag2 = ag.clone()
            block, granted = ag2.resume([])
            out = drive(g, ag2, block, granted)
            if out[0] is not None:
                g2, ag2, moved = out
                rec(g2, ag2, env_left, moved)
        if env_left == 0:
            return
        for m in legal_moves(g, PLAYER_B, constant_bound).moves:
            g2 = apply_move(g, m)
            ag2 = ag.clone()
            block, granted = ag2.resume([m.payload])
            out = drive(g2, ag2, block, granted)
            if out[0] is not None:
                g3, ag3, moved = out
                rec(g3, ag3, env_left - 1, moved)

    g0 = initial_state(s, valuation, interp)
    ag0 = agent.clone()
    block, granted = ag0.start(g0.valuation)
    out = drive(g0, ag0, block, granted)
    if out[0] is not None:
        g1, ag1, moved = out
        rec(g1, ag1, max_env_moves, moved)
    return report


# ---------------------------------------------------------------------------
# Delays


def is_delay(original, delayed, player):
    """delayed differs from original only by postponing player's moves.

    Both players keep their own move order, and any of player's moves
    that followed the opponent's n-th move still follows it.
    """
    omine = [m for m in original if m[0] == player]
    dmine = [m for m in delayed if m[0] == player]
    oother = [m for m in original if m[0] != player]
    dother = [m for m in delayed if m[0] != player]
    if omine != dmine or oother != dother:
        return False

    def others_before_kth(run, k):
        seen = n = 0
        for m in run:
            if m[0] == player:
                if seen == k:
                    return n
                seen += 1
            else:
                n += 1
        return n

    for k in range(len(omine)):
        if others_before_kth(delayed, k) < others_before_kth(original, k):
            return False
    return True


def delays(run, player, limit=None):
    """All reorderings of run that postpone player's moves, verified
    against is_delay before being yielded."""
    mine = [m for m in run if m[0] == player]
    other = [m for m in run if m[0] != player]
    floor = [sum(1 for m in run[:i] if m[0] != player)
             for i, m in enumerate(run) if m[0] == player]
    emitted = 0

    def build(i, j, acc):
        nonlocal emitted
        if limit is not None and emitted >= limit:
            return
        if i == len(mine) and j == len(other):
            out = list(acc)
            assert is_delay(run, out, player)
            emitted += 1
            yield out
            return
        if i < len(mine) and j >= floor[i]:
            acc.append(mine[i])
            yield from build(i + 1, j, acc)
            acc.pop()
        if j < len(other):
            acc.append(other[j])
            yield from build(i, j + 1, acc)
            acc.pop()

    yield from build(0, 0, [])


# ---------------------------------------------------------------------------
# Timing-robustness checking over a small game protocol


class SequentGame:
    """Adapter giving a sequent game the replay/winner protocol."""

    def __init__(self, s, valuation=None, interp=None):
        self.s = s
        self.valuation = valuation
        self.interp = interp

    def initial(self):
        return initial_state(self.s, self.valuation, self.interp)

    def legal(self, pos, player, bound):
        return [m.payload for m in legal_moves(pos, player, bound).moves]

    def apply(self, pos, player, payload):
        return apply_move(pos, LabMove(player, payload))

    def winner(self, pos):
        return adjudicate(pos).winner


class ExplicitGame:
    """Finite game given by an explicit transition table.

    states: any hashables; table: (state, player, payload) -> state;
    winners: state -> winning player for a play stopping there.
    """

    def __init__(self, start, table, winners):
        self.start = start
        self.table = dict(table)
        self.winners = dict(winners)

    def initial(self):
        return self.start

    def legal(self, pos, player, bound):
        return sorted(p for (s, pl, p) in self.table
                      if s == pos and pl == player)

    def apply(self, pos, player, payload):
        key = (pos, player, payload)
        if key not in self.table:
            raise IllegalMove("no-transition", f"{payload!r} at {pos!r}")
        return self.table[key]

    def winner(self, pos):
        return self.winners[pos]


def planted_nonstatic_game():
    """Whoever moves first wins: the canonical timing-sensitive game."""
    table = {
        ("start", PLAYER_T, "go"): "t-first",
        ("start", PLAYER_B, "go"): "b-first",
        ("t-first", PLAYER_B, "go"): "t-first",
        ("b-first", PLAYER_T, "go"): "b-first",
    }
    winners = {"start": PLAYER_B, "t-first": PLAYER_T, "b-first": PLAYER_B}
    return ExplicitGame("start", table, winners)


@dataclass
class StaticVerdict:
    ok: bool
    runs_checked: int = 0
    delays_checked: int = 0
    counterexample: tuple | None = None  # (run, delayed-run, player, reason)

    def __bool__(self):
        return self.ok


def _outcome(game, run):
    """(first-offender or None, winner) for a run over the game."""
    pos = game.initial()
    for player, payload in run:
        try:
            pos = game.apply(pos, player, payload)
        except IllegalMove:
            return player, opponent(player)
    return None, game.winner(pos)


def _bounded_runs(game, max_moves, bound):
    """Every legal run within bounds, plus each extended by one illegal
    move drawn from the other player's unused options."""
    legal_runs = []

    def rec(pos, run):
        legal_runs.append(list(run))
        if len(run) == max_moves:
            return
        for player in (PLAYER_T, PLAYER_B):
            for payload in game.legal(pos, player, bound):
                rec(game.apply(pos, player, payload),
                    run + [(player, payload)])

    rec(game.initial(), [])
    out = list(legal_runs)
    for run in legal_runs:
        pos = game.initial()
        for player, payload in run:
            pos = game.apply(pos, player, payload)
        seen = {(pl, p) for pl in (PLAYER_T, PLAYER_B)
                for p in game.legal(pos, pl, bound)}
        for player in (PLAYER_T, PLAYER_B):
            for candidate in _illegal_probes(game, pos, player, bound):
                if (player, candidate) not in seen:
                    out.append(run + [(player, candidate)])
    return out


def _illegal_probes(game, pos, player, bound):
    # offer each player the other's legal options plus a junk payload:
    # cheap ways to be the first offender
    other = game.legal(pos, opponent(player), bound)
    return list(other[:2]) + ["9999.9999"]


def check_static(game, *, max_moves=4, constant_bound=2,
                 delay_limit=None) -> StaticVerdict:
    """Exhaustively verify timing robustness at desk scale: delaying
    either player across every bounded run never flips that player's
    outcome in their disfavour."""
    runs = _bounded_runs(game, max_moves, constant_bound)
    n_delays = 0
    for run in runs:
        offender, winner = _outcome(game, run)
        for player in (PLAYER_T, PLAYER_B):
            for permuted in delays(run, player, delay_limit):
                n_delays += 1
                d_offender, d_winner = _outcome(game, permuted)
                if offender != player and d_offender == player:
                    return StaticVerdict(
                        False, len(runs), n_delays,
                        (run, permuted, player, "became the first offender"))
                if winner == player and offender != player \
                        and d_winner != player:
                    return StaticVerdict(
                        False, len(runs), n_delays,
                        (run, permuted, player, "won run became lost"))
    return StaticVerdict(True, len(runs), n_delays)
