"""Simulation driver, environments, delays, and timing robustness."""

import pytest

from clg.agents import Agent, CopycatAgent, ScriptedAgent, SilentAgent
from clg.engine import PLAYER_B, PLAYER_T
from clg.formulas import parse_sequent
from clg.harness import (
    ExplicitGame, OracleEnv, RandomLegalEnv, ScriptedEnv, SequentGame,
    TranscriptRecord, check_static, delays, exhaustive_versus, is_delay,
    planted_nonstatic_game, read_log, replay_record, simulate,
)
from clg.semantics import Interpretation, PredTable, eval_elementary


def props(**values):
    return Interpretation(
        preds={(n, 0): PredTable({(): v}) for n, v in values.items()})


# ---------------------------------------------------------------------------
# simulate


def test_silent_round_is_adjudicated_in_place():
    rec = simulate(SilentAgent(), ScriptedEnv([]), parse_sequent("|- 0 = 0"))
    assert rec.run == [] and rec.winner == PLAYER_T


def test_illegal_env_move_loses_for_env():
    rec = simulate(SilentAgent(), ScriptedEnv([["S.0"]]),
                   parse_sequent("|- 0 = 1"))
    assert rec.winner == PLAYER_T
    assert any(f.startswith("illegal:B") for f in rec.flags)


def test_illegal_agent_move_loses_for_agent():
    rec = simulate(ScriptedAgent([["S.0"]]), ScriptedEnv([]),
                   parse_sequent("|- 0 = 0"))
    assert rec.winner == PLAYER_B
    assert any(f.startswith("illegal:T") for f in rec.flags)


def test_random_env_is_seed_reproducible():
    s = parse_sequent("|- AA x. EE y. y = x'")
    a = simulate(SilentAgent(), RandomLegalEnv(2, 1.0), s, seed=11)
    b = simulate(SilentAgent(), RandomLegalEnv(2, 1.0), s, seed=11)
    assert a.run == b.run


def test_oracle_env_answers_resource_queries_truly():
    s = parse_sequent("AA x. EE y. y = x + w |- 0 = 0")
    agent = ScriptedAgent([[".3"]])
    rec = simulate(agent, OracleEnv(), s, valuation={"w": 2})
    assert ("B", ".5") in rec.run
    assert rec.winner == PLAYER_T


def test_oracle_answers_satisfy_the_chosen_atom():
    s = parse_sequent("AA x. EE y. y = x * x |- 0 = 0")
    rec = simulate(ScriptedAgent([[".7"]]), OracleEnv(), s)
    answers = [m for p, m in rec.run if p == "B"]
    assert answers == [".49"]


def test_transcript_log_roundtrip_and_replay(tmp_path):
    log = tmp_path / "plays.jsonl"
    s = parse_sequent("|- AA x. EE y. y = x'")
    from clg.agents import SuccessorAgent

    rec = simulate(SuccessorAgent(), ScriptedEnv([2]), s,
                   log_path=str(log), seed=5)
    loaded = read_log(str(log))
    assert len(loaded) == 1
    back = loaded[0]
    assert back.run == rec.run and back.winner == rec.winner
    assert replay_record(back) == rec.winner


# ---------------------------------------------------------------------------
# exhaustive_versus


def test_exhaustive_copycat_is_clean():
    report = exhaustive_versus(CopycatAgent(),
                               parse_sequent("p && q |- p && q"),
                               interp=props(p=False, q=True))
    assert report.clean


class FlippedCopycat(Agent):
    def start(self, valuation):
        return [], True

    def resume(self, env_moves):
        out = []
        for p in env_moves:
            if p.startswith("S."):
                out.append("." + ("1" if p[2:] == "0" else "0"))
        return out, True


def test_exhaustive_flags_broken_agent():
    report = exhaustive_versus(FlippedCopycat(),
                               parse_sequent("p && q |- p && q"),
                               interp=props(p=False, q=True))
    assert report.losses >= 1
    assert report.loss_runs


def test_exhaustive_single_play_when_env_cannot_move():
    report = exhaustive_versus(SilentAgent(), parse_sequent("|- 0 = 0"))
    assert report.plays == 1 and report.clean


# ---------------------------------------------------------------------------
# delays


def test_machine_moves_may_be_postponed():
    run = [("T", "a"), ("B", "b")]
    assert sorted(delays(run, PLAYER_T)) == sorted(
        [[("T", "a"), ("B", "b")], [("B", "b"), ("T", "a")]])


def test_machine_moves_may_not_be_advanced():
    run = [("B", "b"), ("T", "a")]
    assert list(delays(run, PLAYER_T)) == [run]


def test_single_player_run_has_one_delay():
    run = [("T", "a"), ("T", "b")]
    assert list(delays(run, PLAYER_T)) == [run]


def test_is_delay_rejects_reordering_within_a_player():
    orig = [("T", "a"), ("T", "b")]
    assert not is_delay(orig, [("T", "b"), ("T", "a")], PLAYER_T)


def test_is_delay_rejects_advanced_moves():
    orig = [("B", "x"), ("T", "a")]
    assert not is_delay(orig, [("T", "a"), ("B", "x")], PLAYER_T)


def test_delay_enumeration_is_verified_and_bounded():
    run = [("T", "a"), ("B", "x"), ("T", "b"), ("B", "y")]
    all_delays = list(delays(run, PLAYER_T))
    assert all(is_delay(run, d, PLAYER_T) for d in all_delays)
    assert len(set(map(tuple, all_delays))) == len(all_delays)
    capped = list(delays(run, PLAYER_T, limit=2))
    assert len(capped) == 2


# ---------------------------------------------------------------------------
# check_static


def test_sequent_game_is_timing_robust():
    game = SequentGame(parse_sequent("p && q |- r"),
                       interp=props(p=True, q=False, r=True))
    verdict = check_static(game, max_moves=3, constant_bound=2)
    assert verdict.ok
    assert verdict.runs_checked > 1


def test_quantifier_sequent_game_is_timing_robust():
    game = SequentGame(parse_sequent("|- AA x. EE y. y = x'"))
    verdict = check_static(game, max_moves=3, constant_bound=1)
    assert verdict.ok


def test_planted_first_mover_game_fails():
    verdict = check_static(planted_nonstatic_game(), max_moves=3)
    assert not verdict.ok
    run, permuted, player, reason = verdict.counterexample
    assert is_delay(run, permuted, player)


def test_moveless_game_is_trivially_robust():
    game = ExplicitGame("only", {}, {"only": PLAYER_T})
    verdict = check_static(game, max_moves=4)
    # the empty run plus one junk-move probe per player
    assert verdict.ok and verdict.runs_checked == 3
