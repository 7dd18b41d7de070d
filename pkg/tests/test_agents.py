"""Strategy agents and the combinators that assemble them."""

import pytest

from clg.agents import (
    Agent, CombinatorMisuse, CopycatAgent, ScriptedAgent, SilentAgent,
    SimulationBudgetExceeded, SuccessorAgent, adapt_block_to_single,
    contract, cut, instantiate, reorder, weaken, wrap_addresses,
)
from clg.engine import initial_state, prefixation, LabMove, adjudicate
from clg.formulas import parse_sequent
from clg.harness import ScriptedEnv, exhaustive_versus, simulate
from clg.semantics import Interpretation, PredTable

AX7 = "|- AA x. EE y. y = x'"


def props(**values):
    return Interpretation(
        preds={(n, 0): PredTable({(): v}) for n, v in values.items()})


class Recorder(Agent):
    """Plays nothing; remembers every block it was fed."""

    def __init__(self):
        self.seen = []

    def start(self, valuation):
        return [], True

    def resume(self, env_moves):
        self.seen.append(list(env_moves))
        return [], True


class Stubborn(Agent):
    def start(self, valuation):
        return [], False

    def resume(self, env_moves):
        return [], False


# ---------------------------------------------------------------------------
# Elementary agents


def test_successor_agent_answers_plus_one():
    rec = simulate(SuccessorAgent(), ScriptedEnv([7]), parse_sequent(AX7))
    assert rec.run == [("B", "7"), ("T", "8")]
    assert rec.winner == "T"


def test_copycat_wins_propositional_mirror():
    report = exhaustive_versus(
        CopycatAgent(), parse_sequent("p && q |- p && q"),
        interp=props(p=False, q=True), max_env_moves=3)
    assert report.clean and report.plays > 1


def test_copycat_wins_quantifier_mirror():
    report = exhaustive_versus(
        CopycatAgent(), parse_sequent(f"{AX7[3:]} |- {AX7[3:]}"),
        constant_bound=2, max_env_moves=4)
    assert report.clean


# ---------------------------------------------------------------------------
# Single-move adapter


def test_adapter_splits_blocks_in_order():
    a = adapt_block_to_single(ScriptedAgent([["S.0", "S.1"]]))
    assert a.start({}) == (["S.0"], False)
    assert a.resume([]) == (["S.1"], True)
    assert a.resume([]) == ([], True)


def test_adapter_is_identity_on_silent():
    a = adapt_block_to_single(SilentAgent())
    assert a.start({}) == ([], True)
    assert a.resume([]) == ([], True)


def test_adapter_preserves_final_position():
    plain = simulate(SuccessorAgent(), ScriptedEnv([3]), parse_sequent(AX7))
    single = simulate(adapt_block_to_single(SuccessorAgent()),
                      ScriptedEnv([3]), parse_sequent(AX7))
    assert plain.run == single.run
    assert plain.winner == single.winner == "T"


# ---------------------------------------------------------------------------
# Address wrapping


def test_reorder_translates_outgoing_moves():
    inner = ScriptedAgent([["0.1"]])
    swapped = reorder(inner, [1, 0], 2)
    block, granted = swapped.start({})
    assert block == ["1.1"] and granted


def test_reorder_translates_incoming_moves():
    inner = Recorder()
    swapped = reorder(inner, [1, 0], 2)
    swapped.start({})
    swapped.resume(["1.5", "S.0"])
    assert inner.seen == [["0.5", "S.0"]]


def test_wrap_rejects_unmapped_addresses():
    wrapped = wrap_addresses(Recorder(), {"0": "0"})
    wrapped.start({})
    with pytest.raises(CombinatorMisuse):
        wrapped.resume(["1.0"])


def test_wrap_identity_is_transparent():
    inner = ScriptedAgent([["0.1", "S.0"]])
    wrapped = wrap_addresses(inner, {"0": "0", "1": "1"})
    assert wrapped.start({})[0] == ["0.1", "S.0"]


def test_wrap_splits_env_prefix_move_per_leaf():
    inner = Recorder()
    wrapped = wrap_addresses(inner, {"0": "0", "1": "1"})
    wrapped.start({})
    wrapped.resume([".0"])
    assert inner.seen == [["0.0", "1.0"]]


# ---------------------------------------------------------------------------
# Weakening


def test_weaken_adds_ignored_slot():
    agent = weaken(SuccessorAgent(), 0, 1)
    s = parse_sequent(f"q |- {AX7[3:]}")
    rec = simulate(agent, ScriptedEnv([["S.4"]]), s, interp=props(q=False))
    assert rec.run == [("B", "S.4"), ("T", "S.5")]
    assert rec.winner == "T"


def test_weaken_ignores_flooding_in_added_slot():
    agent = weaken(SuccessorAgent(), 0, 1)
    s = parse_sequent(f"r | r |- {AX7[3:]}")
    rec = simulate(agent, ScriptedEnv([["S.2"], ["S.2"]]), s,
                   interp=props(r=True))
    assert ("T", "S.3") in rec.run
    assert rec.winner == "T"


def test_weaken_by_zero_is_identity():
    a = SuccessorAgent()
    assert weaken(a, 1, 0) is a


# ---------------------------------------------------------------------------
# Contraction


def test_contract_leads_with_replication():
    inner = ScriptedAgent([["0.0", "1.1"]])
    agent = contract(inner, 0, 1)
    block, _g = agent.start({})
    assert block[0] == ":"
    assert block == [":", "0.0", "1.1"]


def test_contract_wins_from_duplicated_premise():
    inner = ScriptedAgent([["0.0", "1.1"]])
    agent = contract(inner, 0, 1)
    s = parse_sequent("p && q |- p & q")
    report = exhaustive_versus(agent, s, interp=props(p=True, q=True),
                               max_env_moves=2)
    assert report.clean
    assert report.plays == 1  # the environment never has a move


# ---------------------------------------------------------------------------
# Instantiation


class AnswersSum(Agent):
    """Wins |- EE z. z = x + y by reading both variables."""

    def start(self, valuation):
        return [str(valuation.get("x", 0) + valuation.get("y", 0))], True

    def resume(self, env_moves):
        return [], True


def test_instantiate_fixes_the_valuation():
    s = parse_sequent("|- EE z. z = x + y")
    agent = instantiate(instantiate(AnswersSum(), "x", 2), "y", 3)
    rec = simulate(agent, ScriptedEnv([]), s, valuation={"x": 2, "y": 3})
    assert rec.run == [("T", "5")]
    assert rec.winner == "T"


def test_instantiate_commutes():
    a = instantiate(instantiate(AnswersSum(), "x", 2), "y", 3)
    b = instantiate(instantiate(AnswersSum(), "y", 3), "x", 2)
    assert a.start({}) == b.start({})


def test_instantiate_unread_variable_is_inert():
    a = instantiate(SuccessorAgent(), "unused", 9)
    rec = simulate(a, ScriptedEnv([2]), parse_sequent(AX7))
    assert rec.run == [("B", "2"), ("T", "3")]


# ---------------------------------------------------------------------------
# Cut


class PlusTwoRight(Agent):
    """Wins (AA x. EE y. y = x') |- AA x. EE y. y = x'' by querying the
    antecedent resource at the challenged constant and bumping the answer."""

    def start(self, valuation):
        return [], True

    def resume(self, env_moves):
        out = []
        for p in env_moves:
            if p.startswith("S."):
                out.append("." + p[2:])
            elif p.startswith("."):
                out.append("S." + str(int(p[1:]) + 1))
        return out, True


def test_cut_composes_successor_with_bump():
    composed = cut(SuccessorAgent(), PlusTwoRight(), (0, 0))
    s = parse_sequent("|- AA x. EE y. y = x''")
    rec = simulate(composed, ScriptedEnv([5]), s)
    assert rec.run == [("B", "5"), ("T", "7")]
    assert rec.winner == "T"


def test_cut_with_unused_middle_channel():
    m2 = ScriptedAgent([["S.0"]])
    composed = cut(SilentAgent(), m2, (0, 1))
    s = parse_sequent("q |- EE y. y = 0")
    rec = simulate(composed, ScriptedEnv([]), s, interp=props(q=False))
    assert rec.run == [("T", "S.0")]
    assert rec.winner == "T"


class QueriesBothSides(Agent):
    """Wins F |- F & F for F = AA x. EE y. y = x': replicates the
    antecedent copy of F, then serves each succedent component from its
    own copy."""

    def __init__(self):
        self.replicated = False

    def start(self, valuation):
        return [], True

    def resume(self, env_moves):
        out = []
        if not self.replicated and any(p.startswith("S.") for p in env_moves):
            self.replicated = True
            out.append(":")
        for p in env_moves:
            if p.startswith("S."):
                side, _, c = p[2:].partition(".")
                out.append(f"{side}.{c}")
            else:
                side, _, d = p.partition(".")
                if side in ("0", "1"):
                    out.append(f"S.{side}.{d}")
        return out, True


def test_cut_forks_on_middle_replication():
    composed = cut(CopycatAgent(), QueriesBothSides(), (1, 0))
    s = parse_sequent(
        "AA x. EE y. y = x' |- (AA x. EE y. y = x') & (AA x. EE y. y = x')")
    env = ScriptedEnv([["S.0.3", "S.1.6"], ["0.4", "1.7"]])
    rec = simulate(composed, env, s)
    assert rec.winner == "T"
    assert ("T", ":") in rec.run          # the real antecedent block forked
    assert len(composed.sims) == 2        # one live left-simulation per copy
    assert ("T", "S.0.4") in rec.run
    assert ("T", "S.1.7") in rec.run


class PingPong(Agent):
    def start(self, valuation):
        return [".0"], True

    def resume(self, env_moves):
        return [".0"], True


def test_cut_budget_exhaustion_is_reported():
    composed = cut(SuccessorAgent(), PingPong(), (0, 0), step_budget=40)
    with pytest.raises(SimulationBudgetExceeded):
        composed.start({})


# ---------------------------------------------------------------------------
# Fairness enforcement lives in the driver


def test_stubborn_agent_trips_fairness_budget():
    from clg.harness import FairnessExhausted

    with pytest.raises(FairnessExhausted):
        simulate(Stubborn(), ScriptedEnv([]), parse_sequent("|- 0 = 0"),
                 agent_step_budget=10)
