"""Lambek types, sequents and natural-deduction proof search for L and NL.

Types are built from atoms with the two directional implications::

    B/A   selects an A to its right to form a B
    A\\B   selects an A to its left to form a B

Antecedents are flat tuples of :class:`Leaf` in ``L`` mode and binary
trees of :class:`Leaf` / :class:`Node` in ``NL`` mode.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterator, Mapping, Sequence, Union

from .errors import InvalidDerivation, TypeSyntaxError, UnknownWord

# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Over:
    """``result/arg``"""

    result: "SynType"
    arg: "SynType"

    def __str__(self):
        return f"{_wrap(self.result)}/{_wrap(self.arg)}"


@dataclass(frozen=True)
class Under:
    """``arg\\result``"""

    arg: "SynType"
    result: "SynType"

    def __str__(self):
        return f"{_wrap(self.arg)}\\{_wrap(self.result)}"


SynType = Union[Atom, Over, Under]


def _wrap(t: SynType) -> str:
    return str(t) if isinstance(t, Atom) else f"({t})"


def atoms_of(t: SynType) -> list[str]:
    if isinstance(t, Atom):
        return [t.name]
    if isinstance(t, Over):
        return atoms_of(t.result) + atoms_of(t.arg)
    return atoms_of(t.arg) + atoms_of(t.result)


def subformulas(t: SynType) -> Iterator[SynType]:
    yield t
    if isinstance(t, Over):
        yield from subformulas(t.result)
        yield from subformulas(t.arg)
    elif isinstance(t, Under):
        yield from subformulas(t.arg)
        yield from subformulas(t.result)


def type_depth(t: SynType) -> int:
    if isinstance(t, Atom):
        return 0
    return 1 + max(type_depth(t.result), type_depth(t.arg))


_TYPE_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize_type(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TYPE_TOKEN.match(text, pos)
        if m is None:
            break
        tok = m.group(1) or m.group(2)
        if tok not in ("/", "\\", "(", ")") and not m.group(1):
            raise TypeSyntaxError(f"unexpected character {tok!r} in {text!r}")
        tokens.append(tok)
        pos = m.end()
    return tokens


def parse_type(text: str) -> SynType:
    """Parse the printed form of a type, e.g. ``(n\\n)/np``.

    Chains such as ``a/b/c`` are rejected: operands of a connective must be
    atoms or parenthesized.
    """
    tokens = _tokenize_type(text)
    if not tokens:
        raise TypeSyntaxError("empty type")
    t, pos = _parse_type(tokens, 0, text)
    if pos != len(tokens):
        raise TypeSyntaxError(f"trailing input in type {text!r}")
    return t


def _parse_type(tokens, pos, text):
    left, pos = _parse_operand(tokens, pos, text)
    if pos < len(tokens) and tokens[pos] in ("/", "\\"):
        op = tokens[pos]
        right, pos = _parse_operand(tokens, pos + 1, text)
        if pos < len(tokens) and tokens[pos] in ("/", "\\"):
            raise TypeSyntaxError(f"ambiguous grouping in {text!r}; add parentheses")
        return (Over(left, right) if op == "/" else Under(left, right)), pos
    return left, pos


def _parse_operand(tokens, pos, text):
    if pos >= len(tokens):
        raise TypeSyntaxError(f"unexpected end of type {text!r}")
    tok = tokens[pos]
    if tok == "(":
        inner, pos = _parse_type(tokens, pos + 1, text)
        if pos >= len(tokens) or tokens[pos] != ")":
            raise TypeSyntaxError(f"unbalanced parentheses in {text!r}")
        return inner, pos + 1
    if tok in ("/", "\\", ")"):
        raise TypeSyntaxError(f"unexpected {tok!r} in {text!r}")
    return Atom(tok), pos + 1


# ---------------------------------------------------------------------------
# antecedents and sequents


class Mode(str, Enum):
    L = "L"
    NL = "NL"


@dataclass(frozen=True)
class Leaf:
    """A typed variable; lexical leaves also remember their word."""

    name: str
    type: SynType
    word: str | None = field(default=None, compare=False)

    def __str__(self):
        return f"{self.name}:{self.type}"


@dataclass(frozen=True)
class Node:
    left: "Structure"
    right: "Structure"

    def __str__(self):
        return f"({_fmt_structure(self.left)}, {_fmt_structure(self.right)})"


Structure = Union[Leaf, Node]
# L antecedents are tuples of leaves; NL antecedents are structures.
Antecedent = Union[tuple, Leaf, Node]


def _fmt_structure(s) -> str:
    if isinstance(s, tuple):
        return ", ".join(str(leaf) for leaf in s)
    return str(s)


def leaves(ant: Antecedent) -> list[Leaf]:
    if isinstance(ant, tuple):
        return list(ant)
    if isinstance(ant, Leaf):
        return [ant]
    return leaves(ant.left) + leaves(ant.right)


def check_antecedent(ant: Antecedent, mode: Mode) -> str | None:
    """Return a complaint about ``ant`` or None if it is well formed."""
    if mode is Mode.L:
        if not isinstance(ant, tuple) or not all(isinstance(x, Leaf) for x in ant):
            return "L antecedent must be a tuple of leaves"
    elif not isinstance(ant, (Leaf, Node)):
        return "NL antecedent must be a leaf or a node"
    names = [leaf.name for leaf in leaves(ant)]
    if not names:
        return "empty antecedent"
    if len(set(names)) != len(names):
        return "duplicate variable names in antecedent"
    return None


@dataclass(frozen=True)
class Sequent:
    antecedent: Antecedent
    succedent: SynType
    mode: Mode = Mode.NL

    def __str__(self):
        return f"{_fmt_structure(self.antecedent)} |- {self.succedent}"


class Rule(str, Enum):
    AX = "Ax"
    I_OVER = "IOver"
    I_UNDER = "IUnder"
    E_OVER = "EOver"
    E_UNDER = "EUnder"


_ARITY = {Rule.AX: 0, Rule.I_OVER: 1, Rule.I_UNDER: 1, Rule.E_OVER: 2, Rule.E_UNDER: 2}


@dataclass(frozen=True)
class Derivation:
    rule: Rule
    conclusion: Sequent
    premises: tuple["Derivation", ...] = ()

    @property
    def mode(self) -> Mode:
        return self.conclusion.mode

    def words(self) -> list[str | None]:
        return [leaf.word for leaf in leaves(self.conclusion.antecedent)]

    def pretty(self, indent: int = 0) -> str:
        pad = "  " * indent
        lines = [f"{pad}[{self.rule.value}] {self.conclusion}"]
        lines += [p.pretty(indent + 1) for p in self.premises]
        return "\n".join(lines)


def _combine(left: Antecedent, right: Antecedent, mode: Mode) -> Antecedent:
    if mode is Mode.L:
        return tuple(left) + tuple(right)
    return Node(left, right)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    path: tuple[int, ...] = ()
    reason: str = ""

    def __bool__(self):
        return self.ok


def validate(derivation: Derivation) -> ValidationResult:
    """Check every node against its rule.

    On failure ``path`` lists premise indices from the root down to the
    offending node.
    """
    return _validate(derivation, (), derivation.mode)


def _validate(d: Derivation, path, mode) -> ValidationResult:
    def fail(msg):
        return ValidationResult(False, path, msg)

    if not isinstance(d, Derivation) or not isinstance(d.rule, Rule):
        return fail("not a derivation node")
    concl = d.conclusion
    if concl.mode is not mode:
        return fail("mixed L/NL modes")
    bad = check_antecedent(concl.antecedent, mode)
    if bad:
        return fail(bad)
    if len(d.premises) != _ARITY[d.rule]:
        return fail(f"{d.rule.value} needs {_ARITY[d.rule]} premises, got {len(d.premises)}")
    prem = [p.conclusion for p in d.premises]
    ant, goal = concl.antecedent, concl.succedent

    if d.rule is Rule.AX:
        lv = leaves(ant)
        if len(lv) != 1 or (mode is Mode.NL and not isinstance(ant, Leaf)):
            return fail("axiom needs a single-formula antecedent")
        if lv[0].type != goal:
            return fail(f"axiom type mismatch: {lv[0].type} vs {goal}")

    elif d.rule in (Rule.E_OVER, Rule.E_UNDER):
        left, right = prem
        if d.rule is Rule.E_OVER:
            fn = left.succedent
            if not isinstance(fn, Over) or fn.result != goal or fn.arg != right.succedent:
                return fail(f"E/ expects {goal}/{right.succedent}, got {fn}")
        else:
            fn = right.succedent
            if not isinstance(fn, Under) or fn.result != goal or fn.arg != left.succedent:
                return fail(f"E\\ expects {left.succedent}\\{goal}, got {fn}")
        if _combine(left.antecedent, right.antecedent, mode) != ant:
            return fail("antecedent is not the combination of the premise antecedents")

    else:
        (body,) = prem
        expect = Over if d.rule is Rule.I_OVER else Under
        if not isinstance(goal, expect):
            return fail(f"{d.rule.value} must conclude a {expect.__name__} type")
        if body.succedent != goal.result:
            return fail("premise succedent is not the result type")
        blv = leaves(body.antecedent)
        hyp = blv[-1] if d.rule is Rule.I_OVER else blv[0]
        if hyp.type != goal.arg:
            return fail("discharged hypothesis has the wrong type")
        if hyp.name in {leaf.name for leaf in leaves(ant)}:
            return fail("discharged variable is not fresh")
        if d.rule is Rule.I_OVER:
            expected = _combine(ant, (hyp,) if mode is Mode.L else hyp, mode)
        else:
            expected = _combine((hyp,) if mode is Mode.L else hyp, ant, mode)
        if body.antecedent != expected:
            side = "right" if d.rule is Rule.I_OVER else "left"
            return fail(f"hypothesis must be added on the {side}")

    for i, p in enumerate(d.premises):
        res = _validate(p, path + (i,), mode)
        if not res:
            return res
    return ValidationResult(True)


# ---------------------------------------------------------------------------
# proof search


def bracketings(items: Sequence) -> list:
    """All binary trees over ``items`` (in order), left-heavy splits first."""
    if len(items) == 1:
        return [items[0]]
    out = []
    for k in range(len(items) - 1, 0, -1):
        for left in bracketings(items[:k]):
            for right in bracketings(items[k:]):
                out.append(Node(left, right))
    return out


class _Searcher:
    """Backward search for beta-normal, eta-short derivations.

    Elimination rules never take an introduction as their function premise
    (no beta redexes) and an introduction whose body merely applies to the
    fresh hypothesis is skipped (no eta redexes), so each reading is found
    once.
    """

    def __init__(self, mode: Mode, intro_budget: int):
        self.mode = mode
        self.budget = intro_budget
        self.prove = lru_cache(maxsize=None)(self._prove)

    def _prove(self, ant, goal, open_hyps: int, allow_intro: bool) -> tuple[Derivation, ...]:
        mode = self.mode
        out: list[Derivation] = []
        seq = Sequent(ant, goal, mode)
        lv = leaves(ant)

        if len(lv) == 1 and lv[0].type == goal:
            out.append(Derivation(Rule.AX, seq))

        for left, right in self._splits(ant):
            left_types = _types_in(left)
            right_types = _types_in(right)
            for a in _over_args(left_types, goal):
                funs = self.prove(left, Over(goal, a), open_hyps, False)
                if not funs:
                    continue
                args = self.prove(right, a, open_hyps, True)
                for f in funs:
                    for x in args:
                        out.append(Derivation(Rule.E_OVER, seq, (f, x)))
            for a in _under_args(right_types, goal):
                funs = self.prove(right, Under(a, goal), open_hyps, False)
                if not funs:
                    continue
                args = self.prove(left, a, open_hyps, True)
                for x in args:
                    for f in funs:
                        out.append(Derivation(Rule.E_UNDER, seq, (x, f)))

        if allow_intro and open_hyps < self.budget and not isinstance(goal, Atom):
            hyp = Leaf(f"h{open_hyps + 1}", goal.arg)
            single = (hyp,) if mode is Mode.L else hyp
            if isinstance(goal, Over):
                body_ant = _combine(ant, single, mode)
                rule, eta_rule, arg_pos = Rule.I_OVER, Rule.E_OVER, 1
            else:
                body_ant = _combine(single, ant, mode)
                rule, eta_rule, arg_pos = Rule.I_UNDER, Rule.E_UNDER, 0
            for body in self.prove(body_ant, goal.result, open_hyps + 1, True):
                if body.rule is eta_rule and body.premises[arg_pos].rule is Rule.AX \
                        and leaves(body.premises[arg_pos].conclusion.antecedent) == [hyp]:
                    continue
                out.append(Derivation(rule, seq, (body,)))
        return tuple(out)

    def _splits(self, ant):
        if self.mode is Mode.L:
            return [(ant[:k], ant[k:]) for k in range(len(ant) - 1, 0, -1)]
        if isinstance(ant, Node):
            return [(ant.left, ant.right)]
        return []


def _types_in(ant) -> set:
    found = set()
    for leaf in leaves(ant):
        found.update(subformulas(leaf.type))
    return found


def _over_args(types, goal):
    return sorted({t.arg for t in types if isinstance(t, Over) and t.result == goal}, key=str)


def _under_args(types, goal):
    return sorted({t.arg for t in types if isinstance(t, Under) and t.result == goal}, key=str)


def parse(
    lexicon: Mapping[str, SynType],
    words: Sequence[str],
    goal: SynType,
    mode: Mode | str = Mode.NL,
    intro_budget: int = 2,
    var_names: Sequence[str] | None = None,
) -> list[Derivation]:
    """All derivations of ``w1:A1, ..., wn:An |- goal``.

    Every word gets a fresh variable (``x1 .. xn`` unless ``var_names`` is
    given).  In NL mode every bracketing of the words is tried.  Readings
    with equal (alpha-equivalent) terms are reported once, in a
    deterministic order.
    """
    from .terms import alpha_key, extract_term

    mode = Mode(mode)
    if not words:
        raise ValueError("cannot parse an empty phrase")
    if intro_budget < 0:
        raise ValueError("intro_budget must be >= 0")
    if var_names is None:
        var_names = [f"x{i + 1}" for i in range(len(words))]
    if len(var_names) != len(words) or len(set(var_names)) != len(var_names):
        raise ValueError("need one distinct variable name per word")
    items = []
    for name, word in zip(var_names, words):
        if word not in lexicon:
            raise UnknownWord(word)
        items.append(Leaf(name, lexicon[word], word))

    searcher = _Searcher(mode, intro_budget)
    if mode is Mode.L:
        roots = [tuple(items)]
    else:
        roots = bracketings(items)

    results, seen = [], set()
    for root in roots:
        for d in searcher.prove(root, goal, 0, True):
            d = _freshen(d)
            key = alpha_key(extract_term(d))
            if key in seen:
                continue
            seen.add(key)
            results.append(d)
    return results


def _freshen(d: Derivation) -> Derivation:
    """Rename hypotheses so that every discharged variable is unique."""
    counter = iter(range(1, 10**9))
    used = {leaf.name for leaf in leaves(d.conclusion.antecedent)}

    def rename_ant(ant, ren):
        if isinstance(ant, tuple):
            return tuple(rename_ant(x, ren) for x in ant)
        if isinstance(ant, Leaf):
            return Leaf(ren.get(ant.name, ant.name), ant.type, ant.word) if ant.name in ren else ant
        return Node(rename_ant(ant.left, ren), rename_ant(ant.right, ren))

    def go(node: Derivation, ren: dict) -> Derivation:
        if node.rule in (Rule.I_OVER, Rule.I_UNDER):
            body = node.premises[0]
            blv = leaves(body.conclusion.antecedent)
            hyp = blv[-1] if node.rule is Rule.I_OVER else blv[0]
            while True:
                new = f"h{next(counter)}"
                if new not in used:
                    break
            used.add(new)
            premises = (go(body, {**ren, hyp.name: new}),)
        else:
            premises = tuple(go(p, ren) for p in node.premises)
        concl = node.conclusion
        return Derivation(
            node.rule,
            Sequent(rename_ant(concl.antecedent, ren), concl.succedent, concl.mode),
            premises,
        )

    return go(d, {})


def lexicon_types(entries: Mapping[str, SynType | str]) -> dict[str, SynType]:
    return {w: parse_type(t) if isinstance(t, str) else t for w, t in entries.items()}
