"""Classical validity of elementary formulas, three-valued.

`prove_classical` refutes the negation with a signed tableau.  Equality
is identity: each branch keeps a congruence closure over the ground
terms seen so far, and a branch closes on a literal pair that clashes
modulo that closure, on t != t, on two distinct numerals forced equal,
or on $F.  Universal formulas are instantiated in rounds, first by
matching their trigger subterms against terms the branch already
knows, then by flooding the term pool once triggers stall;
existentials get fresh parameters.

Outcomes:
  valid    - carries a certificate, checkable with replay_certificate
  invalid  - carries a finite counter-model, verified by evaluation
             before it is returned
  unknown  - expansion budget ran out

Free variables of the query are treated as opaque constants, so a
verdict of valid means valid under every interpretation of the
function and predicate letters and every assignment to the variables.
"""

from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass, field

from .formulas import (
    And, App, Atom, BlindAll, BlindEx, Bot, Const, Neg, Or, Top, Var,
    formula_text, free_vars, is_elementary, negate, substitute, term_text,
)

__all__ = ["ClassicalVerdict", "FiniteModel", "prove_classical",
           "replay_certificate"]


@dataclass
class ClassicalVerdict:
    status: str  # "valid" | "invalid" | "unknown"
    certificate: object = None
    model: "FiniteModel | None" = None
    detail: str = ""

    def __bool__(self):
        return self.status == "valid"


# ---------------------------------------------------------------------------
# Congruence closure


class _CC:
    """Union-find over registered terms with congruence propagation.

    Signature table plus per-class use lists keep merges cheap.
    Distinct numerals may never share a class; forcing them together
    sets .dead instead of raising, which the tableau reads as closure.
    """

    def __init__(self):
        self.parent = {}
        self.sig = {}      # (func, arg class roots) -> representative App
        self.use = {}      # class root -> Apps with an argument in the class
        self.numeral = {}  # class root -> numeral value pinned to it
        self.dead = False
        self.gen = 0       # bumped on any growth, invalidates lookahead caches

    def copy(self):
        c = _CC.__new__(_CC)
        c.parent = dict(self.parent)
        c.sig = dict(self.sig)
        c.use = {k: list(v) for k, v in self.use.items()}
        c.numeral = dict(self.numeral)
        c.dead = self.dead
        c.gen = self.gen
        return c

    def add(self, t):
        if t in self.parent:
            return
        self.gen += 1
        self.parent[t] = t
        if isinstance(t, Const):
            self.numeral[t] = t.value
        elif isinstance(t, App):
            for a in t.args:
                self.add(a)
            key = self._key(t)
            other = self.sig.get(key)
            if other is None:
                self.sig[key] = t
                for r in set(key[1]):
                    self.use.setdefault(r, []).append(t)
            else:
                self._union_pending([(t, other)])

    def _key(self, t):
        return (t.func, tuple(self.find(a) for a in t.args))

    def find(self, t):
        root = t
        while self.parent[root] is not root:
            root = self.parent[root]
        while self.parent[t] is not root:
            self.parent[t], t = root, self.parent[t]
        return root

    def equal(self, a, b):
        self.add(a)
        self.add(b)
        return self.find(a) == self.find(b)

    def merge(self, a, b):
        self.add(a)
        self.add(b)
        self._union_pending([(a, b)])

    def _union_pending(self, pending):
        while pending and not self.dead:
            a, b = pending.pop()
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                continue
            self.gen += 1
            na, nb = self.numeral.get(ra), self.numeral.get(rb)
            if na is not None and nb is not None and na != nb:
                self.dead = True
                return
            if len(self.use.get(ra, ())) > len(self.use.get(rb, ())):
                ra, rb = rb, ra
                na = nb
            self.parent[ra] = rb
            if na is not None:
                self.numeral[rb] = self.numeral.get(rb, na)
            for t in self.use.pop(ra, ()):
                key = self._key(t)
                other = self.sig.get(key)
                if other is None:
                    self.sig[key] = t
                elif self.find(other) != self.find(t):
                    pending.append((t, other))
                self.use.setdefault(rb, []).append(t)


# ---------------------------------------------------------------------------
# Finite models


@dataclass
class FiniteModel:
    """Interpretation over a finite domain {0..size-1}.

    Occurring numerals are embedded injectively via `consts`; missing
    table entries default to element 0, which is harmless because the
    verdict is only issued after this model is checked against the
    query formula.
    """

    size: int
    consts: dict = field(default_factory=dict)      # numeral value -> element
    funcs: dict = field(default_factory=dict)       # (name, arity) -> {args: elem}
    preds: dict = field(default_factory=dict)       # (name, arity) -> set of args
    assignment: dict = field(default_factory=dict)  # free variable -> element

    def eval_term(self, t, env):
        if isinstance(t, Var):
            if t.name in env:
                return env[t.name]
            return self.assignment.get(t.name, 0)
        if isinstance(t, Const):
            return self.consts.get(t.value, 0)
        args = tuple(self.eval_term(a, env) for a in t.args)
        return self.funcs.get((t.func, len(t.args)), {}).get(args, 0)

    def eval(self, f, env=None):
        env = env or {}
        if isinstance(f, Atom):
            args = tuple(self.eval_term(a, env) for a in f.args)
            if f.pred == "=":
                return args[0] == args[1]
            return args in self.preds.get((f.pred, len(f.args)), set())
        if isinstance(f, Neg):
            return not self.eval(f.body, env)
        if isinstance(f, And):
            return self.eval(f.left, env) and self.eval(f.right, env)
        if isinstance(f, Or):
            return self.eval(f.left, env) or self.eval(f.right, env)
        if isinstance(f, Top):
            return True
        if isinstance(f, Bot):
            return False
        if isinstance(f, BlindAll):
            return all(self.eval(f.body, {**env, f.var: d})
                       for d in range(self.size))
        if isinstance(f, BlindEx):
            return any(self.eval(f.body, {**env, f.var: d})
                       for d in range(self.size))
        raise ValueError(f"not elementary: {formula_text(f)}")

    def describe(self):
        lines = [f"domain size {self.size}"]
        for v, e in sorted(self.assignment.items()):
            lines.append(f"  {v} := e{e}")
        for n, e in sorted(self.consts.items()):
            lines.append(f"  {n} := e{e}")
        for (name, _ar), table in sorted(self.funcs.items()):
            for args, val in sorted(table.items()):
                lines.append(f"  {name}({', '.join(f'e{a}' for a in args)}) = e{val}")
        for (name, ar), tuples in sorted(self.preds.items()):
            shown = sorted(tuples)
            lines.append(f"  {name}/{ar} true on {shown if shown else 'nothing'}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Tableau


class _Budget:
    def __init__(self, n):
        self.left = n

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise _OutOfBudget


class _OutOfBudget(Exception):
    pass


class _Branch:
    def __init__(self):
        self.queue = []       # unexpanded non-branching formulas
        self.ors = []         # disjunctions, deferred until forced
        self.gammas = []      # (BlindAll formula, set of used instantiations)
        self.pos = []         # positive atoms (non "=")
        self.neg = []         # negated atoms (non "=")
        self.eqs = []         # pairs merged from t1 = t2
        self.diseqs = []      # pairs from t1 != t2
        self.on_branch = set()
        self.cc = _CC()
        self.params = 0
        self.capped = False   # a too-large instantiation term was skipped
        self.refcache = {}    # formula -> (state snapshot, refutation steps)

    def copy(self):
        b = _Branch.__new__(_Branch)
        b.queue = list(self.queue)
        b.ors = list(self.ors)
        b.gammas = [(g, set(u)) for g, u in self.gammas]
        b.pos = list(self.pos)
        b.neg = list(self.neg)
        b.eqs = list(self.eqs)
        b.diseqs = list(self.diseqs)
        b.on_branch = set(self.on_branch)
        b.cc = self.cc.copy()
        b.params = self.params
        b.capped = self.capped
        b.refcache = dict(self.refcache)
        return b

    def put(self, f):
        if f not in self.on_branch:
            self.on_branch.add(f)
            self.queue.append(f)

    def closed_after_merge(self):
        # a merge can newly relate any old pair, so scan everything
        if self.cc.dead:
            return "distinct numerals identified"
        for a, b in self.diseqs:
            if self.cc.equal(a, b):
                return f"{term_text(a)} != {term_text(b)} refuted"
        for p in self.pos:
            r = self._against_negs(p)
            if r:
                return r
        return None

    def closed_after_literal(self, sign, atom):
        if self.cc.dead:
            return "distinct numerals identified"
        if sign:
            return self._against_negs(atom)
        for p in self.pos:
            if self._literal_clash(p, atom):
                return f"{formula_text(p)} against {formula_text(Neg(atom))}"
        return None

    def _against_negs(self, p):
        for n in self.neg:
            if self._literal_clash(p, n):
                return f"{formula_text(p)} against {formula_text(Neg(n))}"
        return None

    def _literal_clash(self, p, n):
        return (p.pred == n.pred and len(p.args) == len(n.args)
                and all(self.cc.equal(x, y) for x, y in zip(p.args, n.args)))

    def pool(self):
        # arguments are registered before the terms built from them, so
        # insertion order already prefers small instantiation terms
        if not self.cc.parent:
            return [Const(0)]
        return list(self.cc.parent)

    def refuted(self, g):
        """Steps that would close the branch extended with g, else None.

        A pure lookahead used to consume disjunctions without splitting:
        nothing is registered or merged, so it can run speculatively over
        every pending side.  Conjunctions need one false conjunct,
        disjunctions two false sides, and a universal over a literal is
        probed one instantiation deep against terms the branch already
        knows.  The returned steps replay under the certificate checker.
        """
        state = (self.cc.gen, len(self.pos), len(self.neg), len(self.diseqs))
        hit = self.refcache.get(g)
        if hit is not None and hit[0] == state:
            return hit[1]
        steps = self._refuted_steps(g)
        # certificates that introduce witnesses must stay single-use, or
        # a replay path would see the same fresh name twice
        if not (steps is not None and _has_ex(steps)):
            self.refcache[g] = (state, steps)
        return steps

    def _refuted_steps(self, g):
        if isinstance(g, Bot):
            return [("close", "falsum")]
        if isinstance(g, (Atom, Neg)):
            reason = self._literal_false(g)
            return None if reason is None else [("close", reason)]
        if isinstance(g, And):
            for side in (g.left, g.right):
                steps = self._refuted_steps(side)
                if steps is not None:
                    return [("and", g)] + steps
            return None
        if isinstance(g, Or):
            left = self._refuted_steps(g.left)
            if left is None:
                return None
            right = self._refuted_steps(g.right)
            if right is None:
                return None
            return [("or", g, left, right)]
        if isinstance(g, BlindAll) and isinstance(g.body, (Atom, Neg)):
            for t in self.pool():
                inst = substitute(g.body, {g.var: t})
                reason = self._literal_false(inst)
                if reason is not None:
                    return [("all", g, t), ("close", reason)]
        if isinstance(g, BlindEx) and _is_literal(g.body):
            # an existential whose body mirrors a stored universal's body
            # under a shared binder clashes at any fresh witness
            target = negate(g.body)
            for gamma, _used in self.gammas:
                if not _is_literal(gamma.body):
                    continue
                if substitute(gamma.body, {gamma.var: Var(g.var)}) == target:
                    self.params += 1
                    nm = f"_r{self.params}"
                    return [("ex", g, nm),
                            ("all", gamma, Var(nm)),
                            ("close", "witness clashes with universal")]
        return None

    def _probe_root(self, t):
        # registered terms only; building new ones here would grow the
        # instantiation pool from sides that were never put on the branch
        if t not in self.cc.parent:
            return None
        return self.cc.find(t)

    def _probe_equal(self, a, b):
        if a == b:
            return True
        ra, rb = self._probe_root(a), self._probe_root(b)
        return ra is not None and ra == rb

    def _literal_false(self, g):
        cc = self.cc
        if isinstance(g, Atom):
            if g.pred == "=":
                a, b = g.args
                if isinstance(a, Const) and isinstance(b, Const) \
                        and a.value != b.value:
                    return "distinct numerals"
                ra, rb = self._probe_root(a), self._probe_root(b)
                if ra is not None and rb is not None:
                    na, nb = cc.numeral.get(ra), cc.numeral.get(rb)
                    if na is not None and nb is not None and na != nb:
                        return "distinct numerals"
                for x, y in self.diseqs:
                    if (self._probe_equal(x, a) and self._probe_equal(y, b)) \
                            or (self._probe_equal(x, b)
                                and self._probe_equal(y, a)):
                        return f"{term_text(x)} != {term_text(y)} holds"
                return None
            for n in self.neg:
                if self._probe_clash(g, n):
                    return f"{formula_text(Neg(n))} holds"
            return None
        a = g.body
        if a.pred == "=":
            if self._probe_equal(a.args[0], a.args[1]):
                return f"{term_text(a.args[0])} = {term_text(a.args[1])} holds"
            return None
        for p in self.pos:
            if self._probe_clash(p, a):
                return f"{formula_text(p)} holds"
        return None

    def _probe_clash(self, p, n):
        return (p.pred == n.pred and len(p.args) == len(n.args)
                and all(self._probe_equal(x, y)
                        for x, y in zip(p.args, n.args)))

    def _match_term(self, pat, t, block, binding):
        if isinstance(pat, Var) and pat.name in block:
            bound = binding.get(pat.name)
            if bound is None:
                binding[pat.name] = t
                return True
            return self._probe_equal(bound, t)
        if isinstance(pat, App):
            if not (isinstance(t, App) and t.func == pat.func
                    and len(t.args) == len(pat.args)):
                return False
            return all(self._match_term(p, a, block, binding)
                       for p, a in zip(pat.args, t.args))
        return self._probe_equal(pat, t)

    def trigger_bindings(self, g):
        """Instantiation tuples for the universal block of g, found by
        matching its trigger patterns against branch terms and atoms."""
        vs, term_pats, atom_pats = _patterns(g)
        if not vs:
            return
        block = set(vs)
        emitted = set()
        apps = [t for t in self.cc.parent if isinstance(t, App)]
        for pat in term_pats:
            for t in apps:
                binding = {}
                if self._match_term(pat, t, block, binding):
                    key = tuple(binding[v] for v in vs)
                    if key not in emitted:
                        emitted.add(key)
                        yield key
        for pat in atom_pats:
            if pat.pred == "=":
                cands = []
                for a, b in self.eqs + self.diseqs:
                    cands.append((a, b))
                    cands.append((b, a))
            else:
                cands = [tuple(a.args) for a in self.pos + self.neg
                         if a.pred == pat.pred
                         and len(a.args) == len(pat.args)]
            for args in cands:
                binding = {}
                if all(self._match_term(p, t, block, binding)
                       for p, t in zip(pat.args, args)):
                    key = tuple(binding[v] for v in vs)
                    if key not in emitted:
                        emitted.add(key)
                        yield key


_INST_SIZE_CAP = 9  # term nodes; larger pool terms are never instantiated


def _is_literal(f):
    return isinstance(f, Atom) or (isinstance(f, Neg)
                                   and isinstance(f.body, Atom))


def _has_ex(steps):
    for s in steps:
        if s[0] == "ex":
            return True
        if s[0] == "or" and (_has_ex(s[2]) or _has_ex(s[3])):
            return True
    return False


def _term_size(t):
    if isinstance(t, App):
        return 1 + sum(_term_size(a) for a in t.args)
    return 1


def _block(g):
    """Leading universal prefix of g as (variable list, core body)."""
    vs = []
    body = g
    while isinstance(body, BlindAll):
        vs.append(body.var)
        body = body.body
    return vs, body


def _bound_names(f):
    out = set()
    stack = [f]
    while stack:
        x = stack.pop()
        if isinstance(x, (BlindAll, BlindEx)):
            out.add(x.var)
            stack.append(x.body)
        elif isinstance(x, (And, Or)):
            stack.append(x.left)
            stack.append(x.right)
        elif isinstance(x, Neg):
            stack.append(x.body)
    return out


def _term_vars(t, out):
    if isinstance(t, Var):
        out.add(t.name)
    elif isinstance(t, App):
        for a in t.args:
            _term_vars(a, out)


def _atoms_of(f):
    out = []
    stack = [f]
    while stack:
        x = stack.pop()
        if isinstance(x, Atom):
            out.append(x)
        elif isinstance(x, Neg):
            out.append(x.body)
        elif isinstance(x, (And, Or)):
            stack.append(x.left)
            stack.append(x.right)
        elif isinstance(x, (BlindAll, BlindEx)):
            stack.append(x.body)
    return out


_PATTERN_MEMO = {}


def _patterns(g):
    """Trigger patterns for the universal block of g.

    A term pattern is an App subterm of the body mentioning every block
    variable and no deeper-bound one; an atom pattern is a whole atom
    with the same property.  Matching a pattern against something the
    branch has already seen produces exactly the instantiations able to
    interact with existing formulas.
    """
    hit = _PATTERN_MEMO.get(g)
    if hit is not None:
        return hit
    vs, body = _block(g)
    want = set(vs)
    shield = _bound_names(body)
    term_pats, atom_pats, seen = [], [], set()
    for atom in _atoms_of(body):
        fv = set()
        for a in atom.args:
            _term_vars(a, fv)
        if want <= fv and not (fv & shield) and atom not in seen:
            seen.add(atom)
            atom_pats.append(atom)
        stack = list(atom.args)
        while stack:
            t = stack.pop()
            if isinstance(t, App):
                tv = set()
                _term_vars(t, tv)
                if want <= tv and not (tv & shield) and t not in seen:
                    seen.add(t)
                    term_pats.append(t)
                stack.extend(t.args)
    res = (vs, term_pats, atom_pats)
    _PATTERN_MEMO[g] = res
    return res


def _anchor_terms(g):
    """Binder-free maximal subterms of a universal's atoms.

    Registering these when the universal lands on a branch lets trigger
    matching fire immediately instead of waiting for a blind round to
    stumble on the same terms.
    """
    vs, body = _block(g)
    bound = set(vs) | _bound_names(body)
    out = []

    def walk(t):
        fv = set()
        _term_vars(t, fv)
        if not (fv & bound):
            out.append(t)
        elif isinstance(t, App):
            for a in t.args:
                walk(a)

    for atom in _atoms_of(body):
        for a in atom.args:
            walk(a)
    return out


def _expand(branch, budget, avoid_names):
    """Grow one branch to closure or saturation.

    Returns ("closed", certificate_steps) or ("open", branch).
    Disjunctions are deferred: the branch first drains everything
    non-branching, then consumes disjunctions whose one side is already
    refuted, and only splits when no such unit is left.  Splitting
    recurses for the left subtree; the right continues in place and the
    certificate is stitched together from or-open markers afterwards.
    """
    steps = []
    while True:
        while branch.queue:
            budget.spend()
            f = branch.queue.pop(0)
            if isinstance(f, Bot):
                steps.append(("close", "falsum"))
                return "closed", _stitch(steps)
            if isinstance(f, Top):
                continue
            reason = None
            if isinstance(f, Atom):
                if f.pred == "=":
                    branch.eqs.append((f.args[0], f.args[1]))
                    branch.cc.merge(f.args[0], f.args[1])
                    reason = branch.closed_after_merge()
                else:
                    branch.pos.append(f)
                    for t in f.args:
                        branch.cc.add(t)
                    reason = branch.closed_after_literal(True, f)
            elif isinstance(f, Neg):
                a = f.body
                if a.pred == "=":
                    branch.cc.add(a.args[0])
                    branch.cc.add(a.args[1])
                    branch.diseqs.append((a.args[0], a.args[1]))
                    if branch.cc.equal(a.args[0], a.args[1]):
                        reason = f"{term_text(a.args[0])} != " \
                                 f"{term_text(a.args[1])} refuted"
                else:
                    branch.neg.append(a)
                    for t in a.args:
                        branch.cc.add(t)
                    reason = branch.closed_after_literal(False, a)
            elif isinstance(f, And):
                steps.append(("and", f))
                branch.put(f.left)
                branch.put(f.right)
                continue
            elif isinstance(f, Or):
                branch.ors.append(f)
                continue
            elif isinstance(f, BlindEx):
                branch.params += 1
                name = f"_d{branch.params}"
                while name in avoid_names:
                    branch.params += 1
                    name = f"_d{branch.params}"
                avoid_names.add(name)
                inst = substitute(f.body, {f.var: Var(name)})
                steps.append(("ex", f, name))
                branch.cc.add(Var(name))
                branch.put(inst)
                continue
            elif isinstance(f, BlindAll):
                branch.gammas.append((f, set()))
                for t in _anchor_terms(f):
                    branch.cc.add(t)
                continue
            else:
                raise ValueError(f"not elementary: {formula_text(f)}")
            if reason is not None:
                steps.append(("close", reason))
                return "closed", _stitch(steps)
        if branch.ors:
            unit = None
            for idx, f in enumerate(branch.ors):
                lsteps = branch.refuted(f.left)
                if lsteps is not None:
                    unit = (idx, f, lsteps, "left")
                    break
                rsteps = branch.refuted(f.right)
                if rsteps is not None:
                    unit = (idx, f, rsteps, "right")
                    break
            budget.spend()
            if unit is not None:
                idx, f, closing, side = unit
                branch.ors.pop(idx)
                keep = f.right if side == "left" else f.left
                steps.append(("or-open", f, closing, side))
                branch.put(keep)
                continue
        # nothing forced, no unit: universal-instantiation round; splits
        # wait until instantiation stops producing anything new, since a
        # split doubles all work after it while instances often close.
        # Pattern-guided instantiation runs first: a clash can only come
        # from terms the branch already knows, so match each universal's
        # trigger subterms against those before flooding the whole pool.
        grew = False
        for g, used in branch.gammas:
            for key in list(branch.trigger_bindings(g)):
                if key in used:
                    continue
                if any(_term_size(t) > _INST_SIZE_CAP for t in key):
                    branch.capped = True
                    continue
                used.add(key)
                budget.spend()
                vs = _block(g)[0]
                cur = g
                for v, t in zip(vs, key):
                    steps.append(("all", cur, t))
                    cur = substitute(cur.body, {cur.var: t})
                if cur not in branch.on_branch:
                    branch.on_branch.add(cur)
                    branch.queue.append(cur)
                    grew = True
        if not grew:
            terms_now = [t for t in branch.pool()
                         if _term_size(t) <= _INST_SIZE_CAP
                         or not branch.gammas]
            if len(terms_now) < len(branch.cc.parent):
                branch.capped = True
            for g, used in branch.gammas:
                for t in terms_now:
                    if t in used:
                        continue
                    used.add(t)
                    budget.spend()
                    inst = substitute(g.body, {g.var: t})
                    steps.append(("all", g, t))
                    if inst not in branch.on_branch:
                        branch.on_branch.add(inst)
                        branch.queue.append(inst)
                        grew = True
        if grew or branch.queue:
            continue
        if branch.ors:
            f = branch.ors.pop(0)
            left = branch.copy()
            left.put(f.left)
            sub_l = _expand(left, budget, avoid_names)
            if sub_l[0] != "closed":
                return sub_l  # open branch refutes the refutation
            steps.append(("or-open", f, sub_l[1], "left"))
            branch.put(f.right)
            continue
        return "open", branch


def _stitch(steps):
    """Fold or-open markers into nested or nodes, last marker innermost."""
    tail = deque()
    for s in reversed(steps):
        if s[0] == "or-open":
            _tag, f, closed_cert, side = s
            inner = list(tail)
            if side == "left":
                node = ("or", f, closed_cert, inner)
            else:
                node = ("or", f, inner, closed_cert)
            tail = deque([node])
        else:
            tail.appendleft(s)
    return list(tail)


def _model_from_branch(branch):
    """Read a finite structure off a saturated open branch."""
    cc = branch.cc
    roots = []
    index = {}
    for t in cc.parent:
        r = cc.find(t)
        if r not in index:
            index[r] = len(roots)
            roots.append(r)
    if not roots:
        index = None
        model = FiniteModel(size=1)
    else:
        model = FiniteModel(size=len(roots))

    def elem(t):
        if index is None:
            return 0
        cc.add(t)
        r = cc.find(t)
        if r not in index:
            index[r] = len(roots)
            roots.append(r)
            model.size = len(roots)
        return index[r]

    for t in list(cc.parent):
        if isinstance(t, Const):
            model.consts[t.value] = elem(t)
        elif isinstance(t, Var):
            model.assignment[t.name] = elem(t)
        elif isinstance(t, App):
            key = (t.func, len(t.args))
            table = model.funcs.setdefault(key, {})
            table[tuple(elem(a) for a in t.args)] = elem(t)
    for a in branch.pos:
        key = (a.pred, len(a.args))
        model.preds.setdefault(key, set()).add(tuple(elem(t) for t in a.args))
    return model


def prove_classical(f, budget: int = 4000) -> ClassicalVerdict:
    """Decide classical validity of an elementary formula, best effort."""
    if not is_elementary(f):
        raise ValueError(f"prove_classical needs an elementary formula, "
                         f"got {formula_text(f)}")
    branch = _Branch()
    goal = negate(f)
    branch.put(goal)
    names = set(free_vars(f))
    # nested disjunction splits recurse once per split; unprovable
    # queries can stack a few hundred before the budget runs out
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 40_000))
    try:
        outcome = _expand(branch, _Budget(budget), names)
    except _OutOfBudget:
        return ClassicalVerdict("unknown", detail="expansion budget exhausted")
    except RecursionError:
        return ClassicalVerdict("unknown", detail="split nesting too deep")
    finally:
        sys.setrecursionlimit(limit)
    if outcome[0] == "closed":
        cert = ("tableau", goal, outcome[1])
        return ClassicalVerdict("valid", certificate=cert)
    if outcome[1].capped:
        # saturation was achieved only because large instantiation
        # terms were withheld, so the open branch proves nothing
        return ClassicalVerdict("unknown", detail="instantiation size cap hit")
    model = _model_from_branch(outcome[1])
    if model.eval(f) is False:
        return ClassicalVerdict("invalid", model=model,
                                detail="falsified on extracted finite model")
    # saturation promised a counter-model but verification disagreed;
    # stay honest rather than trust either side
    return ClassicalVerdict("unknown", detail="open branch failed verification")


# ---------------------------------------------------------------------------
# Certificate replay: an independent, much dumber checker


def replay_certificate(f, cert) -> bool:
    """Confirm that a certificate is a closed tableau for ~f."""
    if not (isinstance(cert, tuple) and len(cert) == 3 and cert[0] == "tableau"):
        return False
    _tag, root, steps = cert
    if root != negate(f):
        return False
    names = set(free_vars(f))
    return _replay_branch({root}, steps, names)


def _replay_branch(on_branch, steps, names):
    on_branch = set(on_branch)
    names = set(names)
    for i, step in enumerate(steps):
        kind = step[0]
        if kind == "and":
            g = step[1]
            if not isinstance(g, And) or g not in on_branch:
                return False
            on_branch.add(g.left)
            on_branch.add(g.right)
        elif kind == "or":
            g = step[1]
            if not isinstance(g, Or) or g not in on_branch:
                return False
            if i != len(steps) - 1:
                return False
            return (_replay_branch(on_branch | {g.left}, step[2], names)
                    and _replay_branch(on_branch | {g.right}, step[3], names))
        elif kind == "all":
            g, t = step[1], step[2]
            if not isinstance(g, BlindAll) or g not in on_branch:
                return False
            on_branch.add(substitute(g.body, {g.var: t}))
        elif kind == "ex":
            g, name = step[1], step[2]
            if not isinstance(g, BlindEx) or g not in on_branch:
                return False
            if name in names:
                return False
            names.add(name)
            on_branch.add(substitute(g.body, {g.var: Var(name)}))
        elif kind == "close":
            return _branch_contradictory(on_branch)
        else:
            return False
    return False  # ran out of steps without closing


def _branch_contradictory(on_branch):
    if any(isinstance(g, Bot) for g in on_branch):
        return True
    cc = _CC()
    pos, neg, diseqs = [], [], []
    for g in on_branch:
        if isinstance(g, Atom):
            if g.pred == "=":
                cc.merge(g.args[0], g.args[1])
            else:
                pos.append(g)
                for t in g.args:
                    cc.add(t)
        elif isinstance(g, Neg):
            a = g.body
            if a.pred == "=":
                cc.add(a.args[0])
                cc.add(a.args[1])
                diseqs.append((a.args[0], a.args[1]))
            else:
                neg.append(a)
                for t in a.args:
                    cc.add(t)
    if cc.dead:
        return True
    for a, b in diseqs:
        if cc.equal(a, b):
            return True
    for p in pos:
        for n in neg:
            if p.pred == n.pred and len(p.args) == len(n.args):
                if all(cc.equal(x, y) for x, y in zip(p.args, n.args)):
                    return True
    return False
