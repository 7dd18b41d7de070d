"""Independent reference model of sequent-game move semantics.

Used to compute expected values (legal-run counts, final positions)
that the engine tests freeze as literals.  Deliberately written in a
different style from the package engine: states are bare tuples, move
payloads are composed and consumed as raw strings, and legality is
"the payload appears in the enumerated list", with no shared engine
code.  Keep this file free of imports from clg.engine.
"""

from clg.formulas import (
    And, Atom, BlindAll, BlindEx, Bot, CAnd, COr, ChoiceAll, ChoiceEx,
    Const, Neg, Or, Top, substitute,
)


def ref_initial(seq):
    n = len(seq.antecedent)
    if n == 0:
        return (None, seq.succedent)
    leaves = []
    for k, f in enumerate(seq.antecedent):
        addr = "1" * k if k == n - 1 else "1" * k + "0"
        leaves.append((addr, f))
    return (tuple(leaves), seq.succedent)


def ref_inmoves(f, who, cbound):
    """All path strings the effective player `who` may play inside f."""
    if isinstance(f, (BlindAll, BlindEx)):
        return ref_inmoves(f.body, who, cbound)
    if isinstance(f, (And, Or)):
        return (["0." + p for p in ref_inmoves(f.left, who, cbound)]
                + ["1." + p for p in ref_inmoves(f.right, who, cbound)])
    if isinstance(f, CAnd):
        return ["0", "1"] if who == "B" else []
    if isinstance(f, COr):
        return ["0", "1"] if who == "T" else []
    if isinstance(f, ChoiceAll):
        return [str(c) for c in range(cbound + 1)] if who == "B" else []
    if isinstance(f, ChoiceEx):
        return [str(c) for c in range(cbound + 1)] if who == "T" else []
    return []  # atoms, Top, Bot


def ref_apply_path(f, path, who):
    """Rewrite f along a path string; None when the path is not playable."""
    if isinstance(f, (BlindAll, BlindEx)):
        inner = ref_apply_path(f.body, path, who)
        return None if inner is None else type(f)(f.var, inner)
    head, _, tail = path.partition(".")
    if isinstance(f, (And, Or)):
        if head == "0":
            inner = ref_apply_path(f.left, tail, who) if tail else None
            return None if inner is None else type(f)(inner, f.right)
        if head == "1":
            inner = ref_apply_path(f.right, tail, who) if tail else None
            return None if inner is None else type(f)(f.left, inner)
        return None
    if tail:
        return None
    if isinstance(f, CAnd) and who == "B" and head in ("0", "1"):
        return f.left if head == "0" else f.right
    if isinstance(f, COr) and who == "T" and head in ("0", "1"):
        return f.left if head == "0" else f.right
    if isinstance(f, ChoiceAll) and who == "B" and head.isdigit():
        return substitute(f.body, {f.var: Const(int(head))})
    if isinstance(f, ChoiceEx) and who == "T" and head.isdigit():
        return substitute(f.body, {f.var: Const(int(head))})
    return None


def _flip(p):
    return "B" if p == "T" else "T"


def ref_moves(state, player, cbound, reps_left):
    """All legal payloads for player, as strings, in a stable order."""
    leaves, succ = state
    out = []
    if leaves is None:
        out.extend(ref_inmoves(succ, player, cbound))
        return out
    out.extend("S." + p for p in ref_inmoves(succ, player, cbound))
    if player == "T" and reps_left > 0:
        out.extend(addr + ":" for addr, _f in leaves)
    prefixes = []
    for addr, _f in leaves:
        for k in range(len(addr) + 1):
            u = addr[:k]
            if u not in prefixes:
                prefixes.append(u)
    eff = _flip(player)
    for u in prefixes:
        group = [f for addr, f in leaves if addr.startswith(u)]
        shared = None
        for f in group:
            paths = set(ref_inmoves(f, eff, cbound))
            shared = paths if shared is None else shared & paths
        for p in sorted(shared or ()):
            out.append(u + "." + p)
    return out


def ref_apply(state, player, payload):
    leaves, succ = state
    if leaves is None:
        return (None, ref_apply_path(succ, payload, player))
    if payload.startswith("S."):
        return (leaves, ref_apply_path(succ, payload[2:], player))
    if payload.endswith(":"):
        bits = payload[:-1]
        new = []
        for addr, f in leaves:
            if addr == bits:
                new.append((addr + "0", f))
                new.append((addr + "1", f))
            else:
                new.append((addr, f))
        return (tuple(new), succ)
    bits, _, path = payload.partition(".")
    eff = _flip(player)
    new = []
    for addr, f in leaves:
        if addr.startswith(bits):
            new.append((addr, ref_apply_path(f, path, eff)))
        else:
            new.append((addr, f))
    return (tuple(new), succ)


def ref_count_runs(seq, max_moves, cbound, max_reps):
    """Number of legal runs (including the empty one) within the bounds."""

    def rec(state, moves_left, reps_left):
        total = 1
        if moves_left == 0:
            return total
        for player in ("T", "B"):
            for payload in ref_moves(state, player, cbound, reps_left):
                nxt = ref_apply(state, player, payload)
                used_rep = payload.endswith(":") and not payload.startswith("S.")
                total += rec(nxt, moves_left - 1,
                             reps_left - (1 if used_rep else 0))
        return total

    return rec(ref_initial(seq), max_moves, max_reps)


def ref_replay(seq, moves):
    """Fold (player, payload) pairs; returns the final state."""
    state = ref_initial(seq)
    for player, payload in moves:
        state = ref_apply(state, player, payload)
        leaves, succ = state
        assert succ is not None
        if leaves is not None:
            assert all(f is not None for _a, f in leaves)
    return state
