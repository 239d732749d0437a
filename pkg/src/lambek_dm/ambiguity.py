"""Readings of an ambiguous phrase, subsystem assignment and permutation routes.

Each word gets its own subsystem ids so that the contractions a reading
performs are written into the labels themselves: a STANDARD and a DUAL
factor sharing an id are traced together, everything else stays open.
Going from one reading to another is then a matter of swapping ids with
permutation operators instead of re-running the contraction plan.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .density import (
    DUAL,
    LOWER,
    STANDARD,
    UPPER,
    DMTensor,
    PermutationOp,
    apply_permutation,
    contract_network,
    retarget_trace,
)
from .errors import InvalidDerivation, NoRouteFound
from .interpret import Lexicon, interpret_derivation
from .logic import Derivation, Mode, SynType, atoms_of, leaves, parse, validate
from .terms import AppOver, AppUnder, DirTerm, LamL, LamR, Var, alpha_key, extract_term

Assignment = dict[str, tuple[int, ...]]


@dataclass(frozen=True, eq=False)
class Reading:
    derivation: Derivation
    term: DirTerm
    subsystems: Assignment
    value: DMTensor

    @property
    def words(self) -> list[str]:
        return [leaf.word for leaf in leaves(self.derivation.conclusion.antecedent)]

    @property
    def variables(self) -> list[str]:
        return [leaf.name for leaf in leaves(self.derivation.conclusion.antecedent)]

    @property
    def result_subsystems(self) -> tuple[int, ...]:
        return tuple(f.subsystem for f in self.value.factors)


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _width(t: SynType) -> int:
    return len(atoms_of(t))


def contraction_links(term: DirTerm, env: dict[str, SynType]):
    """Slots in scan order and the pairs of slots each application links.

    A slot is ``(name, k)``: factor ``k`` of variable ``name`` (or of the
    open argument ``name + "*"`` left by abstracting ``name``).
    """
    order, links = [], []

    def go(t, types):
        if isinstance(t, Var):
            slots = [(t.name, k) for k in range(_width(types[t.name]))]
            order.extend(slots)
            return slots
        if isinstance(t, AppOver):
            f, a = go(t.fun, types), go(t.arg, types)
            k = len(a)
            if k > len(f):
                raise InvalidDerivation(f"argument wider than its slot in {t}")
            links.extend((f[-1 - m], a[m]) for m in range(k))
            return f[: len(f) - k]
        if isinstance(t, AppUnder):
            a, f = go(t.arg, types), go(t.fun, types)
            k = len(a)
            if k > len(f):
                raise InvalidDerivation(f"argument wider than its slot in {t}")
            links.extend((a[k - 1 - m], f[m]) for m in range(k))
            return f[k:]
        if isinstance(t, (LamR, LamL)):
            if t.var_type is None:
                raise InvalidDerivation(f"binder {t.var} has no type")
            legs = [(t.var + "*", k) for k in range(_width(t.var_type))]
            inner = {**types, t.var: t.var_type}
            if isinstance(t, LamL):
                order.extend(legs)
                return legs + go(t.body, inner)
            body = go(t.body, inner)
            order.extend(legs)
            return body + legs
        raise InvalidDerivation(f"not a term: {t!r}")

    result = go(term, env)
    return order, links, result


def assign_subsystems(derivation: Derivation, lexicon: Lexicon | None = None) -> Assignment:
    """Per-factor subsystem ids for every variable of the derivation's term.

    Factors linked by an application share an id; open factors get their
    own.  Ids count from 1 in order of first appearance, scanning the
    factors of the term's variables left to right.
    """
    check = validate(derivation)
    if not check:
        raise InvalidDerivation(check.reason)
    term = extract_term(derivation)
    env = {leaf.name: leaf.type for leaf in leaves(derivation.conclusion.antecedent)}
    order, links, _ = contraction_links(term, env)
    uf = _UnionFind()
    for slot in order:
        uf.find(slot)
    for a, b in links:
        uf.union(a, b)
    ids, numbering = {}, {}
    for name, k in order:
        root = uf.find((name, k))
        if root not in numbering:
            numbering[root] = len(numbering) + 1
        ids.setdefault(name, {})[k] = numbering[root]
    return {name: tuple(per[k] for k in sorted(per)) for name, per in ids.items()}


def make_reading(derivation: Derivation, lexicon: Lexicon) -> Reading:
    subsystems = assign_subsystems(derivation, lexicon)
    value = interpret_derivation(derivation, lexicon, subsystems)
    return Reading(derivation, extract_term(derivation), subsystems, value)


def enumerate_readings(
    words: Sequence[str],
    lexicon: Lexicon,
    goal: SynType,
    mode: Mode | str = Mode.NL,
    intro_budget: int = 2,
    var_names: Sequence[str] | None = None,
) -> list[Reading]:
    derivations = parse(lexicon.types(), words, goal, mode, intro_budget, var_names)
    return [make_reading(d, lexicon) for d in derivations]


# ---------------------------------------------------------------------------
# routes


@dataclass(frozen=True)
class RouteStep:
    """A permutation acting on word legs, or (``on_trace``) on the traced subsystems."""

    op: PermutationOp
    on_trace: bool = False

    def __str__(self):
        return str(self.op)


@dataclass(frozen=True, eq=False)
class Route:
    steps: tuple[RouteStep, ...]
    value: DMTensor
    word_values: tuple[DMTensor, ...]
    traced: frozenset[int]

    @property
    def sequence(self) -> list[str]:
        return [str(s) for s in self.steps]


def _has_abstraction(t: DirTerm) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, (LamR, LamL)):
        return True
    if isinstance(t, AppOver):
        return _has_abstraction(t.fun) or _has_abstraction(t.arg)
    return _has_abstraction(t.arg) or _has_abstraction(t.fun)


def _plan(derivation: Derivation, subsystems: Assignment, lexicon: Lexicon):
    """Word tensors labelled with their ids, and the set of traced ids."""
    words = leaves(derivation.conclusion.antecedent)
    tensors = tuple(lexicon.value(leaf.word).relabel(subsystems[leaf.name]) for leaf in words)
    counts: dict[int, int] = {}
    for t in tensors:
        for f in t.factors:
            counts[f.subsystem] = counts.get(f.subsystem, 0) + 1
    return tensors, frozenset(s for s, c in counts.items() if c == 2)


def _shortest(start, goal, moves, budget):
    """Breadth-first search for the first shortest move sequence from ``start`` to ``goal``."""
    if start == goal:
        return ()
    queue = deque([(start, ())])
    seen = {start}
    while queue:
        state, path = queue.popleft()
        if len(path) == budget:
            continue
        for k, move in enumerate(moves):
            nxt = move(state)
            if nxt == goal:
                return path + (k,)
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, path + (k,)))
    return None


def _swap_legs(op: PermutationOp):
    return lambda ids: tuple(op.swap(s) for s in ids)


def _swap_set(op: PermutationOp):
    return lambda ids: frozenset(op.swap(s) for s in ids)


def permutation_route(
    source: Reading, target: Derivation, lexicon: Lexicon, max_length: int = 4
) -> Route:
    """Reach ``target``'s value from ``source``'s word labelling by permutations.

    Breadth-first search over sequences of at most ``max_length`` operators:
    UPPER swaps on STANDARD legs, LOWER swaps on DUAL legs and LOWER swaps of
    the traced subsystems.  The first shortest sequence that reproduces the
    target's labelling and traces wins; the value is then obtained by contracting
    the permuted word tensors.  Only readings built from eliminations are
    supported, since abstractions leave legs that belong to no word.
    """
    if _has_abstraction(source.term) or _has_abstraction(extract_term(target)):
        raise NoRouteFound("routes are only defined between elimination-only readings")
    src_leaves = leaves(source.derivation.conclusion.antecedent)
    tgt_leaves = leaves(target.conclusion.antecedent)
    if [(leaf.word, leaf.type) for leaf in src_leaves] != [(leaf.word, leaf.type) for leaf in tgt_leaves]:
        raise NoRouteFound("the two derivations do not cover the same words")

    src_tensors, src_traced = _plan(source.derivation, source.subsystems, lexicon)
    target_subsystems = assign_subsystems(target, lexicon)
    tgt_tensors, tgt_traced = _plan(target, target_subsystems, lexicon)
    variances = tuple(tuple(f.variance for f in t.factors) for t in src_tensors)
    start = (tuple(tuple(f.subsystem for f in t.factors) for t in src_tensors), src_traced)
    goal = (tuple(tuple(f.subsystem for f in t.factors) for t in tgt_tensors), tgt_traced)

    ids = sorted({s for word in start[0] + goal[0] for s in word} | src_traced | tgt_traced)
    ops = [(a, b) for i, a in enumerate(ids) for b in ids[i + 1 :]]

    def legs(state, variance):
        return tuple(s for word, vs in zip(state[0], variances) for s, v in zip(word, vs) if v is variance)

    # the three parts never interact, so each is searched on its own;
    # concatenated in this order they give the first shortest joint sequence
    parts = [
        (legs(start, STANDARD), legs(goal, STANDARD), UPPER, False, _swap_legs),
        (legs(start, DUAL), legs(goal, DUAL), LOWER, False, _swap_legs),
        (start[1], goal[1], LOWER, True, _swap_set),
    ]
    found = []
    for src, dst, kind, on_trace, make in parts:
        steps = [RouteStep(PermutationOp(kind, p), on_trace) for p in ops]
        path = _shortest(src, dst, [make(st.op) for st in steps], max_length - len(found))
        if path is None:
            raise NoRouteFound(f"no permutation sequence of length <= {max_length}")
        found += [steps[k] for k in path]

    tensors, traced = src_tensors, src_traced
    for step in found:
        if step.on_trace:
            traced = retarget_trace(step.op, traced)
        else:
            tensors = tuple(apply_permutation(step.op, t) for t in tensors)
    value = contract_network(tensors, traced)
    return Route(tuple(found), value, tensors, traced)


def replay(route_steps: Sequence[RouteStep], tensors: Sequence[DMTensor], traced):
    """Apply route steps to a word labelling; returns ``(tensors, traced)``."""
    tensors, traced = tuple(tensors), frozenset(traced)
    for step in route_steps:
        if step.on_trace:
            traced = retarget_trace(step.op, traced)
        else:
            tensors = tuple(apply_permutation(step.op, t) for t in tensors)
    return tensors, traced


def same_reading(a: Reading, b: Derivation) -> bool:
    return alpha_key(a.term) == alpha_key(extract_term(b))
