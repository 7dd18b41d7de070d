"""Sequent proofs: parsing, checking, transformation, search, extraction."""

import random

import pytest

from clg.cl12 import (
    CL12Proof, Development, ProofAgent, ProofParseError, Replicate, Wait,
    check_proof, check_step, developments, extract_strategy, load_proof,
    parse_proof, search, transform_proof,
)
from clg.formulas import (
    alpha_equal_sequents, parse_sequent, sequent_text, term_text,
)
from clg.harness import RandomLegalEnv, ScriptedEnv, exhaustive_versus, simulate
from clg.semantics import Interpretation, PredTable, sample_interpretation
from proof_mutations import CORPUS_PROOFS, corpus_mutations

CORPUS = {stem: load_proof(CORPUS_PROOFS / f"{stem}.cl12")
          for stem in ("ex81", "ex82", "ex83")}


def viol_text(verdict):
    return " / ".join(v for st in verdict.steps for v in st.violations)


# ---------------------------------------------------------------------------
# Parsing


@pytest.mark.parametrize("stem", sorted(CORPUS))
def test_parse_roundtrip(stem):
    proof = CORPUS[stem]
    again = parse_proof(proof.to_text())
    assert [st.label for st in again.steps] == [st.label for st in proof.steps]
    for a, b in zip(again.steps, proof.steps):
        assert alpha_equal_sequents(a.sequent, b.sequent)
        assert type(a.just) is type(b.just)
    assert again.to_text() == proof.to_text()


@pytest.mark.parametrize("text,line,needle", [
    ("step 1: |- p ; hold", 1, "unknown rule"),
    ("step 1: |- p ; wait\nstep 1: |- p ; wait", 2, "duplicate label"),
    ("step 1: |- p && q ; wait\nstep 2: |- p ; cand-choose 1 succ 2", 2, "branch"),
    ("step 1: |- p wait", 1, "expected 'step"),
    ("step 1: |- EE x. p(x) ; cex-choose 1 su.cc 0", 1, "occurrence"),
    ("step 1: |- EE x. p(x) ; cex-choose 1 succ p(0)", 1, "bad term"),
    ("step 1: |- p ; wait\nstep 2: |- p | ; wait", 2, ""),
    ("step 1: p |- q ; replicate 1 ante[0].0", 1, "bare ante[k]"),
    ("step 1: |- p ; cex-choose 1 succ", 1, "arguments"),
])
def test_parse_errors_carry_position(text, line, needle):
    with pytest.raises(ProofParseError) as exc:
        parse_proof(text)
    assert exc.value.line == line
    assert needle in str(exc.value)


def test_empty_text_is_not_a_proof():
    with pytest.raises(ProofParseError):
        parse_proof("# only a comment\n")


# ---------------------------------------------------------------------------
# Checking the shipped proofs


@pytest.mark.parametrize("stem", sorted(CORPUS))
def test_corpus_proof_checks(stem):
    verdict = check_proof(CORPUS[stem])
    assert verdict.status == "ok", verdict.report()
    assert all(st.status == "ok" for st in verdict.steps)


def test_transitivity_proof_replicates_its_oracle():
    proof = CORPUS["ex82"]
    assert isinstance(proof.step("7").just, Replicate)
    assert proof.step("7").just.position == 1


def test_verdict_report_lists_steps():
    text = check_proof(CORPUS["ex81"]).report()
    assert text.splitlines()[0] == "proof: ok"
    assert "step 3: ok" in text


# ---------------------------------------------------------------------------
# Named rejections


def test_wait_premise_must_come_earlier():
    v = check_proof(parse_proof(
        "step 1: |- p && q ; wait 2\n"
        "step 2: |- p ; wait\n"))
    assert v.status == "rejected"
    assert "not an earlier step" in viol_text(v)


def test_wait_needs_both_choice_branches():
    v = check_proof(parse_proof(
        "step 1: |- p | ~ p ; wait\n"
        "step 2: |- (p | ~ p) && q ; wait 1\n"))
    assert "choice-and condition unmet at succ branch 1" in viol_text(v)


def test_wait_quantifier_premise_must_be_fresh():
    # the only instantiation on offer reuses a name from the conclusion
    stale = parse_proof(
        "step 1: p(w) |- w = w ; wait\n"
        "step 2: p(w) |- AA y. y = y ; wait 1\n")
    fresh = parse_proof(
        "step 1: p(w) |- v = v ; wait\n"
        "step 2: p(w) |- AA y. y = y ; wait 1\n")
    assert "choice-all condition unmet at succ" in viol_text(check_proof(stale))
    assert check_proof(fresh).status == "ok"


def test_wait_flags_broken_leaf():
    v = check_proof(parse_proof("step 1: |- p ; wait\n"))
    assert v.status == "rejected"
    assert "unstable" in viol_text(v)


def test_wait_under_budget_is_unknown_unless_trusted():
    line = CORPUS["ex82"].steps[0]
    plain = f"step 1: {sequent_text(line.sequent)} ; wait\n"
    v = check_proof(parse_proof(plain), stability_budget=1)
    assert v.status == "unknown"
    assert "stability unknown under budget" in v.steps[0].warnings

    trusted = plain.replace("; wait", "; wait!")
    v = check_proof(parse_proof(trusted), stability_budget=1)
    assert v.status == "ok"
    assert "stability taken on trust" in " ".join(v.steps[0].warnings)


def test_unused_wait_premise_warns_but_passes():
    v = check_proof(parse_proof(
        "step 1: |- 0 = 0 ; wait\n"
        "step 2: |- p | ~ p ; wait 1\n"))
    assert v.status == "ok"
    assert any("not required" in w for w in v.steps[1].warnings)


def test_choose_rules_enforce_their_region():
    v = check_proof(parse_proof(
        "step 1: p |- q ; wait\n"
        "step 2: p && r |- q ; cor-choose 1 ante[0] 0\n"))
    assert "cor-choose targets a succ occurrence" in viol_text(v)


def test_choose_needs_a_choice_node():
    v = check_proof(parse_proof(
        "step 1: |- p ; wait\n"
        "step 2: |- p | q ; cor-choose 1 succ 0\n"))
    assert "no matching choice operator" in viol_text(v)


def test_choose_occurrence_must_stay_surface():
    v = check_proof(parse_proof(
        "step 1: |- p(0) ; wait\n"
        "step 2: |- EE x. p(x) ; cex-choose 1 succ.0 0\n"))
    assert "bad occurrence succ.0" in viol_text(v)


def test_choose_term_must_stay_free_in_premise():
    # the substitution is vacuous, so only the side condition can object
    proof = parse_proof(
        "step 1: p(0), EE w. q(w) |- r ; wait\n"
        "step 2: AA x. p(0), EE w. q(w) |- r ; call-choose 1 ante[0] w\n")
    rep = check_step(proof, 1)
    assert rep.status == "rejected"
    assert "bound occurrence in the premise" in " ".join(rep.violations)
    clean = parse_proof(
        "step 1: p(0), EE w. q(w) |- r ; wait\n"
        "step 2: AA x. p(0), EE w. q(w) |- r ; call-choose 1 ante[0] v\n")
    assert check_step(clean, 1).status == "ok"


def test_replicate_checks_position_and_copy():
    v = check_proof(parse_proof(
        "step 1: p, q, q |- r ; wait\n"
        "step 2: p, q |- r ; replicate 1 ante[5]\n"))
    assert "out of range" in viol_text(v)
    v = check_proof(parse_proof(
        "step 1: p, q, q |- r ; wait\n"
        "step 2: p, q |- r ; replicate 1 ante[0]\n"))
    assert "must repeat antecedent member 0" in viol_text(v)


# ---------------------------------------------------------------------------
# Single-edit corruptions of the corpus (the checker accepts none)


MUTATIONS = corpus_mutations()


def test_mutation_table_is_large_enough():
    assert len(MUTATIONS) >= 30


@pytest.mark.parametrize("case_id,text",
                         MUTATIONS, ids=[m[0] for m in MUTATIONS])
def test_mutated_corpus_proof_is_rejected(case_id, text):
    proof = parse_proof(text)  # stays parseable by design
    assert check_proof(proof).status != "ok", case_id


# ---------------------------------------------------------------------------
# Developments


def test_elementary_sequents_offer_no_choices():
    s = parse_sequent("p, 0 = w |- q")
    assert developments(s, "B") == []
    # replication is always on the machine's menu; choices are not
    assert [(d.kind, d.arg) for d in developments(s, "T")] == [
        ("replicate", 0), ("replicate", 1)]
    assert developments(parse_sequent("|- q"), "T") == []


def test_environment_splits_succedent_choice_and():
    devs = developments(parse_sequent("|- p && q"), "B")
    assert [(d.kind, d.arg) for d in devs] == [
        ("succ-choice-and", 0), ("succ-choice-and", 1)]
    assert sequent_text(devs[0].result) == "|- p"
    assert sequent_text(devs[1].result) == "|- q"
    assert developments(parse_sequent("|- p && q"), "T") == []


def test_environment_picks_fresh_names_past_taken_ones():
    devs = developments(parse_sequent("|- AA x. p(x, g_1)"), "B")
    (d,) = devs
    assert d.kind == "succ-choice-all" and d.fresh == "g_2"
    assert sequent_text(d.result) == "|- p(g_2, g_1)"


def test_machine_menu_constants_variables_and_replicates():
    s = parse_sequent("AA x. p(x), EE w. q(w) |- r")
    devs = developments(s, "T", constant_bound=2)
    calls = [d for d in devs if d.kind == "call-choose"]
    # nothing is free here, so the menu is the constants alone
    assert [term_text(d.arg) for d in calls] == ["0", "1", "2"]
    reps = [d for d in devs if d.kind == "replicate"]
    assert [d.arg for d in reps] == [0, 1]


def test_machine_menu_offers_free_variables():
    devs = developments(parse_sequent("AA x. p(x) |- q(v)"), "T",
                        constant_bound=1)
    terms = [term_text(d.arg) for d in devs if d.kind == "call-choose"]
    assert terms == ["0", "1", "v"]


def test_environment_resolves_antecedent_choices():
    s = parse_sequent("p || q, EE x. r(x) |- w = w")
    kinds = [(d.kind, d.arg) for d in developments(s, "B")]
    assert ("ante-choice-or", 0) in kinds and ("ante-choice-or", 1) in kinds
    ex = [d for d in developments(s, "B") if d.kind == "ante-choice-ex"]
    assert len(ex) == 1 and ex[0].bindings == ()


# ---------------------------------------------------------------------------
# Specializing a proof after an environment move


def test_transform_without_moves_is_identity():
    proof = CORPUS["ex81"]
    assert transform_proof(proof, []) is proof


def test_transform_rejects_foreign_source():
    dev = developments(parse_sequent("|- p && q"), "B")[0]
    with pytest.raises(ValueError):
        transform_proof(CORPUS["ex81"], dev)


def test_transform_instantiates_the_goal():
    proof = CORPUS["ex81"]
    (dev,) = developments(proof.final, "B")
    out = transform_proof(proof, dev)
    assert len(out.steps) == 2
    assert alpha_equal_sequents(out.final, dev.result)
    assert check_proof(out).status == "ok"
    assert dev.fresh == "g_1"
    assert "g_1+0 = g_1" in sequent_text(out.steps[0].sequent)


TWO_LEAF = (
    "step 1: p(a), p(b) |- p(a) ; wait\n"
    "step 2: p(a), p(b) |- EE x. p(x) ; cex-choose 1 succ a\n"
    "step 3: p(a), EE x. p(x) |- EE x. p(x) ; wait 2\n"
    "step 4: EE x. p(x), p(b) |- EE x. p(x) ; wait 2\n"
    "step 5: EE x. p(x), EE x. p(x) |- EE x. p(x) ; wait 3, 4\n")


def test_transform_through_replication_shares_the_fresh_name():
    proof = parse_proof(
        "step 1: p(a), p(b) |- 0 = 0 ; wait\n"
        "step 2: p(a), EE x. p(x) |- 0 = 0 ; wait 1\n"
        "step 3: EE x. p(x), p(b) |- 0 = 0 ; wait 1\n"
        "step 4: EE x. p(x), EE x. p(x) |- 0 = 0 ; wait 2, 3\n"
        "step 5: EE x. p(x) |- 0 = 0 ; replicate 4 ante[0]\n")
    assert check_proof(proof).status == "ok"
    (dev,) = developments(proof.final, "B")
    out = transform_proof(proof, dev)
    assert sequent_text(out.final) == "p(g_1) |- 0 = 0"
    assert sequent_text(out.steps[0].sequent) == "p(g_1), p(g_1) |- 0 = 0"
    assert check_proof(out).status == "ok"


@pytest.mark.parametrize("stem", sorted(CORPUS))
def test_transform_shrinks_every_corpus_wait(stem):
    proof = CORPUS[stem]
    waits = [st.label for st in proof.steps if isinstance(st.just, Wait)]
    assert waits
    for label in waits:
        sub = proof.subproof(label)
        for dev in developments(sub.final, "B"):
            out = transform_proof(sub, dev)
            assert len(out.steps) < len(sub.steps), (stem, label, dev.kind)
            assert alpha_equal_sequents(out.final, dev.result)
            assert check_proof(out).status == "ok", (stem, label, dev.kind)


# ---------------------------------------------------------------------------
# Search


def test_search_recovers_the_addition_by_zero_proof():
    r = search(CORPUS["ex81"].final, depth=6)
    assert r.status == "found"
    assert check_proof(r.proof).status == "ok"
    assert alpha_equal_sequents(r.proof.final, CORPUS["ex81"].final)


def test_search_refutes_blind_excluded_middle():
    assert search(parse_sequent("|- p || ~ p"), depth=5).status == "refuted"


def test_search_refutes_unsupported_atom():
    assert search(parse_sequent("p |- q"), depth=4).status == "refuted"


def test_search_finds_choice_commutation():
    r = search(parse_sequent("p && q |- q && p"), depth=6)
    assert r.status == "found"
    assert check_proof(r.proof).status == "ok"


def test_search_widens_with_the_constant_bound():
    s = parse_sequent("A x. x + 0 = x |- EE z. 3 + 0 = z")
    assert search(s, depth=4, constant_bound=2).status == "not-found"
    r = search(s, depth=4, constant_bound=3)
    assert r.status == "found"
    assert check_proof(r.proof).status == "ok"


def test_truncated_menus_never_claim_refutation():
    # no bound suffices here, so the honest answer stays inconclusive
    s = parse_sequent("|- EE x. x = 2'")
    assert search(s, depth=3, constant_bound=2).status == "not-found"


# ---------------------------------------------------------------------------
# Playing a proof


def props(**values):
    return Interpretation(
        preds={(n, 0): PredTable({(): v}) for n, v in values.items()})


def table(name, arity, rows, default=False):
    return (name, arity), PredTable({tuple(r): True for r in rows}, default)


def test_extracted_adder_answers_the_queried_instance():
    rec = simulate(extract_strategy(CORPUS["ex81"]), ScriptedEnv(["S.4"]),
                   CORPUS["ex81"].final)
    assert rec.run == [("B", "S.4"), ("T", "S.4")]
    assert rec.winner == "T"


def test_extracted_agent_reads_the_valuation():
    # stopping before the final wait leaves the witness variable free,
    # so its value must come from the board
    partial = CORPUS["ex81"].subproof("2")
    block, granted = ProofAgent(partial).start({"w": 5})
    assert (block, granted) == (["S.5"], True)


def test_successor_case_adder_consults_both_resources():
    agent = extract_strategy(CORPUS["ex83"])
    rec = simulate(agent, ScriptedEnv(["S.3", "11.5", "10.6"]),
                   CORPUS["ex83"].final, valuation={"w": 2})
    assert rec.run == [("B", "S.3"), ("T", "11.3"), ("B", "11.5"),
                       ("T", "10.5"), ("B", "10.6"), ("T", "S.6")]
    assert rec.winner == "T"


def test_successor_case_adder_survives_a_lying_oracle():
    agent = extract_strategy(CORPUS["ex83"])
    rec = simulate(agent, ScriptedEnv(["S.3", "11.9", "10.6"]),
                   CORPUS["ex83"].final, valuation={"w": 2})
    assert rec.run == [("B", "S.3"), ("T", "11.3"), ("B", "11.9"),
                       ("T", "10.9"), ("B", "10.6"), ("T", "S.6")]
    assert rec.winner == "T"


def test_transitivity_agent_replicates_then_queries_twice():
    interp = Interpretation(preds=dict([
        table("p", 2, [], default=True), table("q", 2, [], default=True)]))
    rec = simulate(extract_strategy(CORPUS["ex82"]),
                   ScriptedEnv(["S.3", "11.7", "10.4"]),
                   CORPUS["ex82"].final, interp=interp)
    assert rec.run == [("B", "S.3"), ("T", "1:"), ("T", "11.3"),
                       ("B", "11.7"), ("T", "10.7"), ("B", "10.4"),
                       ("T", "S.4")]
    assert rec.winner == "T"


def test_prefix_move_specializes_every_covered_leaf():
    proof = parse_proof(TWO_LEAF)
    assert check_proof(proof).status == "ok"
    agent = extract_strategy(proof)
    interp = Interpretation(preds=dict([table("p", 1, [], default=True)]))
    rec = simulate(agent, ScriptedEnv([".5"]), proof.final, interp=interp)
    assert rec.run == [("B", ".5"), ("T", "S.5")]
    assert rec.winner == "T"


def test_elementary_proof_plays_silently():
    proof = parse_proof("step 1: p |- p ; wait\n")
    rec = simulate(extract_strategy(proof), ScriptedEnv([]), proof.final,
                   interp=props(p=False))
    assert rec.run == [] and rec.winner == "T"


# exhaustive play counts frozen from the engine's bounded enumeration
@pytest.mark.parametrize("stem,valuation,interp,plays", [
    ("ex81", {"w": 3}, None, 4),
    ("ex83", {"w": 2}, None, 130),
    ("ex82", {}, Interpretation(preds=dict([
        table("p", 2, [(0, 1), (1, 2)]), table("q", 2, [])])), 130),
])
def test_corpus_agents_survive_every_bounded_line(stem, valuation, interp, plays):
    report = exhaustive_versus(
        extract_strategy(CORPUS[stem]), CORPUS[stem].final,
        valuation=valuation, interp=interp,
        constant_bound=2, max_env_moves=3, max_replications=1)
    assert report.clean, (report.incidents, report.loss_runs)
    assert report.plays == plays


@pytest.mark.parametrize("stem,preds,funcs", [
    ("ex81", (), (("+", 2),)),
    ("ex82", (("p", 2), ("q", 2)), ()),
    ("ex83", (), (("+", 2),)),
])
def test_corpus_agents_win_under_random_interpretations(stem, preds, funcs):
    proof = CORPUS[stem]
    for seed in range(25):
        rng = random.Random(seed)
        interp = sample_interpretation(rng, preds, funcs)
        rec = simulate(extract_strategy(proof),
                       RandomLegalEnv(constant_bound=3), proof.final,
                       valuation={"w": rng.randrange(4)},
                       interp=interp, seed=seed)
        assert rec.winner == "T", (stem, seed, rec.run)
