"""Resumable machine strategies and strategy combinators.

An Agent plays the machine side of one fixed game.  It is driven
through `start(valuation)` and then `resume(env_moves)`; each call
returns (own_moves, granted) where own_moves is a finite list of move
payload strings and granted says whether the environment may now act.
An agent must grant within finitely many resumes; drivers enforce this
with step budgets.  Agents are single-owner mutable objects; `clone`
snapshots one mid-game, which the cut combinator relies on when a
simulation has to fork.

The combinators assemble winning strategies for derived sequents out
of strategies for their premises: address translation across a
different antecedent tree shape, adding ignored antecedent slots,
contracting a duplicated slot behind a forced replication, fixing a
free variable, and composition by mutual simulation.  Slot counts are
passed explicitly; agents do not introspect their own game.
"""

from __future__ import annotations

import copy
from collections import deque

from .engine import standard_addresses

__all__ = [
    "Agent", "ScriptedAgent", "SilentAgent", "CopycatAgent",
    "SuccessorAgent", "CombinatorMisuse", "SimulationBudgetExceeded",
    "adapt_block_to_single", "wrap_addresses", "weaken", "reorder",
    "contract", "instantiate", "cut", "cut_chain",
]


class CombinatorMisuse(Exception):
    """A combinator met a move its address bookkeeping cannot place."""


class SimulationBudgetExceeded(Exception):
    """Internal simulation ran out of steps; a harness failure, not a loss."""


class Agent:
    def start(self, valuation):
        raise NotImplementedError

    def resume(self, env_moves):
        raise NotImplementedError

    def clone(self):
        return copy.deepcopy(self)


class SilentAgent(Agent):
    """Never moves.  Wins exactly the games the empty run wins."""

    def start(self, valuation):
        return [], True

    def resume(self, env_moves):
        return [], True


class ScriptedAgent(Agent):
    """Plays fixed blocks: one per start/resume call, then falls silent."""

    def __init__(self, blocks):
        self.blocks = [[str(m) for m in b] for b in blocks]
        self.at = 0

    def _next(self):
        if self.at >= len(self.blocks):
            return [], True
        b = self.blocks[self.at]
        self.at += 1
        return list(b), True

    def start(self, valuation):
        return self._next()

    def resume(self, env_moves):
        return self._next()


class CopycatAgent(Agent):
    """Wins F |- F by mirroring every environment move across the turnstile.

    The single antecedent copy is never replicated, so its address
    stays the root and a bare "." prefix reaches it.
    """

    def start(self, valuation):
        return [], True

    def resume(self, env_moves):
        out = []
        for p in env_moves:
            if p.startswith("S."):
                out.append("." + p[2:])
            else:
                bits, _, path = p.partition(".")
                if bits or not path:
                    raise CombinatorMisuse(f"copycat cannot mirror {p!r}")
                out.append("S." + path)
        return out, True


class SuccessorAgent(Agent):
    """Wins |- AA x. EE y. y = x' by answering the chosen constant plus one."""

    def start(self, valuation):
        return [], True

    def resume(self, env_moves):
        out = []
        for p in env_moves:
            if p.isdigit():
                out.append(str(int(p) + 1))
        return out, True


# ---------------------------------------------------------------------------
# Single-move adapter


class _SingleMove(Agent):
    def __init__(self, inner):
        self.inner = inner
        self.queue = []
        self.inbox = []
        self.inner_granted = False

    def _step(self):
        if not self.queue:
            moves, g = self.inner.resume(self.inbox)
            self.inbox = []
            self.inner_granted = g
            self.queue.extend(moves)
        if self.queue:
            return [self.queue.pop(0)], not self.queue and self.inner_granted
        return [], self.inner_granted

    def start(self, valuation):
        moves, g = self.inner.start(valuation)
        self.inner_granted = g
        self.queue.extend(moves)
        if self.queue:
            return [self.queue.pop(0)], not self.queue and self.inner_granted
        return [], self.inner_granted

    def resume(self, env_moves):
        self.inbox.extend(env_moves)
        return self._step()


def adapt_block_to_single(a: Agent) -> Agent:
    """Same strategy, but emitting at most one move per call."""
    return _SingleMove(a)


# ---------------------------------------------------------------------------
# Address translation


class _Translated(Agent):
    """Runs `inner` on a game whose antecedent leaves sit elsewhere.

    `amap` maps inner leaf addresses to outer ones and is maintained
    under the inner agent's replications.  Outer moves at unmapped
    leaves are dropped when `ignore_unmapped` (added-slot semantics)
    and rejected otherwise.
    """

    def __init__(self, inner, amap, *, inner_bare=False, outer_bare=False,
                 ignore_unmapped=False, lead_moves=()):
        self.inner = inner
        self.amap = dict(amap)
        self.inner_bare = inner_bare
        self.outer_bare = outer_bare
        self.ignore_unmapped = ignore_unmapped
        self.lead = list(lead_moves)

    def _outgoing(self, payloads):
        out = []
        for p in payloads:
            if self.inner_bare:
                out.append(p if self.outer_bare else "S." + p)
                continue
            if p.startswith("S."):
                out.append(p)
                continue
            if p.endswith(":"):
                w = p[:-1]
                if w not in self.amap:
                    raise CombinatorMisuse(f"replication at unmapped {w!r}")
                o = self.amap.pop(w)
                self.amap[w + "0"] = o + "0"
                self.amap[w + "1"] = o + "1"
                out.append(o + ":")
                continue
            bits, _, path = p.partition(".")
            hits = [self.amap[w] for w in sorted(self.amap)
                    if w.startswith(bits)]
            if not hits:
                raise CombinatorMisuse(f"no mapped leaf under {bits!r}")
            out.extend(o + "." + path for o in hits)
        return out

    def _incoming(self, payloads):
        inner = []
        for p in payloads:
            if self.outer_bare:
                inner.append(p if self.inner_bare else "S." + p)
                continue
            if p.startswith("S."):
                inner.append(p[2:] if self.inner_bare else p)
                continue
            bits, _, path = p.partition(".")
            hits = [w for w in sorted(self.amap)
                    if self.amap[w].startswith(bits)]
            if not hits and not self.ignore_unmapped:
                raise CombinatorMisuse(f"no mapped leaf under outer {bits!r}")
            inner.extend(w + "." + path for w in hits)
        return inner

    def start(self, valuation):
        lead, self.lead = self.lead, []
        moves, g = self.inner.start(valuation)
        return lead + self._outgoing(moves), g

    def resume(self, env_moves):
        moves, g = self.inner.resume(self._incoming(env_moves))
        return self._outgoing(moves), g


def wrap_addresses(a: Agent, amap: dict, **kw) -> Agent:
    """Translate between inner leaf addresses and outer ones (a bijection)."""
    return _Translated(a, amap, **kw)


def reorder(a: Agent, source_slots, total: int) -> Agent:
    """Permute antecedent slots: result slot j holds inner slot
    source_slots[j].  total is the antecedent length."""
    inner_addrs = standard_addresses(total)
    outer_addrs = standard_addresses(total)
    amap = {inner_addrs[src]: outer_addrs[j]
            for j, src in enumerate(source_slots)}
    return _Translated(a, amap)


def weaken(a: Agent, base_slots: int, added_slots: int) -> Agent:
    """From a strategy for E_1..E_n |- F, one for E_1..E_n,K_1..K_k |- F.

    Environment moves inside the added slots are ignored.
    """
    if added_slots == 0:
        return a
    inner_addrs = standard_addresses(base_slots)
    outer_addrs = standard_addresses(base_slots + added_slots)
    amap = {inner_addrs[i]: outer_addrs[i] for i in range(base_slots)}
    return _Translated(a, amap, inner_bare=base_slots == 0,
                       ignore_unmapped=True)


def contract(a: Agent, slot: int, result_slots: int) -> Agent:
    """From a strategy for E_1..E_n,C |- F (the extra copy of slot
    `slot` sits last), one for E_1..E_n |- F with n = result_slots.

    The first emitted move replicates the contracted slot's leaf; the
    premise's in-place copy then lives at its 0-child and the appended
    copy at its 1-child.
    """
    inner_addrs = standard_addresses(result_slots + 1)
    outer_addrs = standard_addresses(result_slots)
    amap = {}
    for i in range(result_slots):
        amap[inner_addrs[i]] = outer_addrs[i] + ("0" if i == slot else "")
    amap[inner_addrs[result_slots]] = outer_addrs[slot] + "1"
    return _Translated(a, amap, lead_moves=[outer_addrs[slot] + ":"])


class _Instantiated(Agent):
    def __init__(self, inner, binding):
        self.inner = inner
        self.binding = dict(binding)

    def start(self, valuation):
        merged = dict(valuation)
        merged.update(self.binding)
        return self.inner.start(merged)

    def resume(self, env_moves):
        return self.inner.resume(env_moves)


def instantiate(a: Agent, var: str, value: int) -> Agent:
    """Pin a free variable: a strategy winning for every value of var
    becomes one for the game at var = value."""
    return _Instantiated(a, {var: value})


# ---------------------------------------------------------------------------
# Composition by mutual simulation


class _Sim:
    """One live simulation of the left agent, tied to one copy of its
    antecedent block in the real game."""

    def __init__(self, agent, emap, bare):
        self.agent = agent
        self.emap = emap      # inner leaf address -> real leaf address
        self.bare = bare
        self.inbox = []
        self.granted = False

    def fork(self):
        twin = _Sim(self.agent.clone(), dict(self.emap), self.bare)
        twin.inbox = list(self.inbox)
        twin.granted = self.granted
        return twin


class CutAgent(Agent):
    """Compose m1 for E_1..E_n |- F with m2 for K_1..K_k,F |- G into a
    strategy for E_1..E_n,K_1..K_k |- G.

    Both strategies run as internal simulations.  Moves m2 makes on G
    and on its K slots go out into the real play, as do m1's moves on
    its E slots; moves on F are exchanged between the simulations with
    the roles swapped.  When m2 replicates a copy of F, the matching
    m1 simulation forks and that copy's whole E block is replicated in
    the real game.  F-traffic from the left simulation is delivered
    before the right simulation's own output within one cycle; a fixed
    order is all correctness needs here.
    """

    def __init__(self, m1, m2, shape, step_budget=20_000):
        self.m1_seed = m1
        self.m2 = m2
        self.n_e, self.n_k = shape
        self.budget = step_budget
        self.sims = {}
        self.kmap = {}
        self.inbox2 = []
        self.granted2 = False
        self.out = []
        self.real_bare = self.n_e + self.n_k == 0

    def start(self, valuation):
        real = standard_addresses(self.n_e + self.n_k)
        m2_addrs = standard_addresses(self.n_k + 1)
        self.kmap = {m2_addrs[j]: real[self.n_e + j]
                     for j in range(self.n_k)}
        f_root = m2_addrs[self.n_k]
        emap = {w: real[i]
                for i, w in enumerate(standard_addresses(self.n_e))}
        # agents are single-start; the seed is taken over, not copied
        sim = _Sim(self.m1_seed, emap, bare=self.n_e == 0)
        self.sims = {f_root: sim}

        self._spent = 0
        moves, g = sim.agent.start(valuation)
        sim.granted = g
        self._absorb_left(f_root, moves)
        moves, g = self.m2.start(valuation)
        self.granted2 = g
        self._absorb_right(moves)
        self._settle()
        return self._flush()

    def resume(self, env_moves):
        self._spent = 0
        for p in env_moves:
            self._route_env(p)
        self._settle()
        return self._flush()

    # -- plumbing

    def _spend(self):
        self._spent += 1
        if self._spent > self.budget:
            raise SimulationBudgetExceeded(
                f"composition exceeded {self.budget} internal steps")

    def _flush(self):
        out, self.out = self.out, []
        return out, True

    def _route_env(self, p):
        if self.real_bare:
            self.inbox2.append("S." + p)
            return
        if p.startswith("S."):
            self.inbox2.append(p)
            return
        bits, _, path = p.partition(".")
        hit = False
        for w, real in self.kmap.items():
            if real.startswith(bits):
                self.inbox2.append(w + "." + path)
                hit = True
        for sim in self.sims.values():
            for w, real in sim.emap.items():
                if real.startswith(bits):
                    sim.inbox.append(w + "." + path)
                    hit = True
        if not hit:
            raise CombinatorMisuse(f"environment move at unmapped {bits!r}")

    def _absorb_left(self, f_addr, payloads):
        sim = self.sims[f_addr]
        for p in payloads:
            if sim.bare:
                self.inbox2.append(f_addr + "." + p)
                continue
            if p.startswith("S."):
                self.inbox2.append(f_addr + "." + p[2:])
                continue
            if p.endswith(":"):
                w = p[:-1]
                real = sim.emap.pop(w)
                sim.emap[w + "0"] = real + "0"
                sim.emap[w + "1"] = real + "1"
                self.out.append(real + ":")
                continue
            bits, _, path = p.partition(".")
            for w in sorted(sim.emap):
                if w.startswith(bits):
                    self.out.append(sim.emap[w] + "." + path)

    def _absorb_right(self, payloads):
        for p in payloads:
            if p.startswith("S."):
                self.out.append(p[2:] if self.real_bare else p)
                continue
            if p.endswith(":"):
                self._right_replicates(p[:-1])
                continue
            bits, _, path = p.partition(".")
            for w in list(self.kmap):
                if w.startswith(bits):
                    self.out.append(self.kmap[w] + "." + path)
            for fu in list(self.sims):
                if fu.startswith(bits):
                    sim = self.sims[fu]
                    sim.inbox.append(path if sim.bare else "S." + path)

    def _right_replicates(self, w):
        if w in self.kmap:
            real = self.kmap.pop(w)
            self.kmap[w + "0"] = real + "0"
            self.kmap[w + "1"] = real + "1"
            self.out.append(real + ":")
            return
        if w in self.sims:
            sim = self.sims.pop(w)
            twin = sim.fork()
            for inner in sorted(sim.emap):
                real = sim.emap[inner]
                self.out.append(real + ":")
                sim.emap[inner] = real + "0"
                twin.emap[inner] = real + "1"
            self.sims[w + "0"] = sim
            self.sims[w + "1"] = twin
            return
        raise CombinatorMisuse(f"right agent replicated unknown leaf {w!r}")

    def _settle(self):
        while True:
            moved = False
            if self.inbox2 or not self.granted2:
                block, self.inbox2 = self.inbox2, []
                self._spend()
                moves, g = self.m2.resume(block)
                self.granted2 = g
                self._absorb_right(moves)
                moved = True
            for fu in list(self.sims):
                sim = self.sims.get(fu)
                if sim is None or (sim.granted and not sim.inbox):
                    continue
                block, sim.inbox = sim.inbox, []
                self._spend()
                moves, g = sim.agent.resume(block)
                sim.granted = g
                self._absorb_left(fu, moves)
                moved = True
            if not moved:
                return


def cut(m1: Agent, m2: Agent, shape, step_budget=20_000) -> Agent:
    """shape = (number of antecedent slots of m1's game, number of K
    slots of m2's game); see CutAgent."""
    return CutAgent(m1, m2, shape, step_budget)


class _ChainLink:
    __slots__ = ("agent", "up", "down", "key", "inbox", "granted")

    def __init__(self, agent, up, down, key):
        self.agent = agent
        self.up = up          # copy bits -> feeding link id; None when bare
        self.down = down      # consuming link id; None at the open end
        self.key = key        # copy bits this link feeds in its consumer
        self.inbox = []
        self.granted = False


class ChainCutAgent(Agent):
    """Left-nested cuts over a line of single-slot interfaces, run as
    one relay: head solves |- F_0 bare, link k solves F_{k-1} |- F_k
    with no other antecedent members, the composite solves |- F_n bare.

    Pairwise nesting routes every move through every enclosing pair, so
    a chain of n cuts costs n hops per move.  Links here talk directly
    to their neighbours and a worklist pumps only links holding mail,
    which keeps a move at one hop however long the chain is.  When a
    link replicates its input copy, the subtree of links feeding that
    copy is forked, matching the pairwise combinator's behaviour."""

    def __init__(self, head, steps, step_budget=None):
        self.links = {0: _ChainLink(head, None, None, None)}
        prev = 0
        for i, s in enumerate(steps, start=1):
            self.links[i] = _ChainLink(s, {"": prev}, None, None)
            self.links[prev].down = i
            self.links[prev].key = ""
            prev = i
        self.last = prev
        self.next_id = len(self.links)
        self.budget = (step_budget if step_budget is not None
                       else 256 + 64 * len(self.links))
        self.out = []
        self._spent = 0

    def start(self, valuation):
        self._spent = 0
        touched = []
        for i in sorted(self.links):
            ln = self.links[i]
            moves, g = ln.agent.start(valuation)
            ln.granted = g
            touched += self._route_from(i, moves)
        self._settle(touched)
        return self._flush()

    def resume(self, env_moves):
        self._spent = 0
        ln = self.links[self.last]
        for p in env_moves:
            ln.inbox.append(p if ln.up is None else "S." + p)
        self._settle([self.last])
        return self._flush()

    # -- plumbing

    def _spend(self):
        self._spent += 1
        if self._spent > self.budget:
            raise SimulationBudgetExceeded(
                f"chain composition exceeded {self.budget} internal steps")

    def _flush(self):
        out, self.out = self.out, []
        return out, True

    def _feed_down(self, ln, path, touched):
        if ln.down is None:
            self.out.append(path)
            return
        self.links[ln.down].inbox.append(ln.key + "." + path)
        touched.append(ln.down)

    def _route_from(self, i, payloads):
        ln = self.links[i]
        touched = []
        for p in payloads:
            if ln.up is None:
                self._feed_down(ln, p, touched)
                continue
            if p.startswith("S."):
                self._feed_down(ln, p[2:], touched)
                continue
            if p.endswith(":"):
                touched += self._fork(ln, p[:-1])
                continue
            bits, _, path = p.partition(".")
            for w in list(ln.up):
                if w.startswith(bits):
                    u = self.links[ln.up[w]]
                    u.inbox.append(path if u.up is None else "S." + path)
                    touched.append(ln.up[w])
        return touched

    def _fork(self, ln, w):
        if ln.up is None or w not in ln.up:
            raise CombinatorMisuse(f"chain link replicated unknown copy {w!r}")
        top = ln.up.pop(w)
        subtree = []
        stack = [top]
        while stack:
            j = stack.pop()
            subtree.append(j)
            up = self.links[j].up
            if up:
                stack.extend(up.values())
        remap = {}
        for j in subtree:
            remap[j] = self.next_id
            self.next_id += 1
        for j in subtree:
            src = self.links[j]
            twin = _ChainLink(src.agent.clone(),
                              None if src.up is None else
                              {b: remap[t] for b, t in src.up.items()},
                              remap.get(src.down, src.down),
                              src.key)
            twin.inbox = list(src.inbox)
            twin.granted = src.granted
            self.links[remap[j]] = twin
        ln.up[w + "0"] = top
        ln.up[w + "1"] = remap[top]
        self.links[top].key = w + "0"
        self.links[remap[top]].key = w + "1"
        return [remap[j] for j in subtree]

    def _settle(self, touched):
        pending = deque(i for i, ln in self.links.items()
                        if ln.inbox or not ln.granted)
        queued = set(pending)
        for t in touched:
            if t not in queued:
                queued.add(t)
                pending.append(t)
        while pending:
            i = pending.popleft()
            queued.discard(i)
            ln = self.links.get(i)
            if ln is None or (ln.granted and not ln.inbox):
                continue
            block, ln.inbox = ln.inbox, []
            self._spend()
            moves, g = ln.agent.resume(block)
            ln.granted = g
            hit = self._route_from(i, moves)
            if not g:
                hit.append(i)
            for t in hit:
                if t not in queued:
                    queued.add(t)
                    pending.append(t)


def cut_chain(head: Agent, steps, step_budget=None) -> Agent:
    """Compose head for |- F_0 with steps[k] for F_k |- F_{k+1}, no other
    antecedent slots anywhere, into a strategy for |- F_n played bare."""
    steps = list(steps)
    if not steps:
        return head
    return ChainCutAgent(head, steps, step_budget)
