"""Directional lambda terms: extraction from proofs, typing, beta reduction.

Printed syntax (round-trips through :func:`parse_term`)::

    x                 variable
    \\r x:A. t         right abstraction (from I/)
    \\l x:A. t         left abstraction  (from I\\)
    (t < u)           t applied to an argument on its right (E/)
    (u > t)           t applied to an argument on its left  (E\\)

The ``:A`` annotation is optional when parsing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import IllTyped, InvalidDerivation, LinearityViolation, TermSyntaxError
from .logic import (
    Derivation,
    Over,
    Rule,
    SynType,
    Under,
    leaves,
    parse_type,
    validate,
)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class LamR:
    var: str
    var_type: SynType | None
    body: "DirTerm"

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class LamL:
    var: str
    var_type: SynType | None
    body: "DirTerm"

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class AppOver:
    """``fun < arg``"""

    fun: "DirTerm"
    arg: "DirTerm"

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class AppUnder:
    """``arg > fun``"""

    arg: "DirTerm"
    fun: "DirTerm"

    def __str__(self):
        return format_term(self)


DirTerm = Union[Var, LamR, LamL, AppOver, AppUnder]
TypingEnv = Sequence[tuple[str, SynType]]


def format_term(t: DirTerm, annotate: bool = True) -> str:
    def operand(s):
        text = format_term(s, annotate)
        return f"({text})" if isinstance(s, (LamR, LamL)) else text

    if isinstance(t, Var):
        return t.name
    if isinstance(t, (LamR, LamL)):
        tag = "r" if isinstance(t, LamR) else "l"
        ann = f":{t.var_type}" if annotate and t.var_type is not None else ""
        return f"\\{tag} {t.var}{ann}. {format_term(t.body, annotate)}"
    if isinstance(t, AppOver):
        return f"({operand(t.fun)} < {operand(t.arg)})"
    return f"({operand(t.arg)} > {operand(t.fun)})"


def free_vars(t: DirTerm) -> list[str]:
    """Free variable occurrences, left to right."""
    if isinstance(t, Var):
        return [t.name]
    if isinstance(t, (LamR, LamL)):
        return [v for v in free_vars(t.body) if v != t.var]
    if isinstance(t, AppOver):
        return free_vars(t.fun) + free_vars(t.arg)
    return free_vars(t.arg) + free_vars(t.fun)


def size(t: DirTerm) -> int:
    if isinstance(t, Var):
        return 1
    if isinstance(t, (LamR, LamL)):
        return 1 + size(t.body)
    if isinstance(t, AppOver):
        return 1 + size(t.fun) + size(t.arg)
    return 1 + size(t.arg) + size(t.fun)


# ---------------------------------------------------------------------------
# extraction


def extract_term(derivation: Derivation) -> DirTerm:
    """Curry-Howard term of a validated derivation."""
    res = validate(derivation)
    if not res:
        raise InvalidDerivation(f"invalid derivation at {list(res.path)}: {res.reason}")
    return _extract(derivation)


def _extract(d: Derivation) -> DirTerm:
    if d.rule is Rule.AX:
        return Var(leaves(d.conclusion.antecedent)[0].name)
    if d.rule is Rule.E_OVER:
        return AppOver(_extract(d.premises[0]), _extract(d.premises[1]))
    if d.rule is Rule.E_UNDER:
        return AppUnder(_extract(d.premises[0]), _extract(d.premises[1]))
    body = d.premises[0]
    blv = leaves(body.conclusion.antecedent)
    if d.rule is Rule.I_OVER:
        return LamR(blv[-1].name, blv[-1].type, _extract(body))
    return LamL(blv[0].name, blv[0].type, _extract(body))


# ---------------------------------------------------------------------------
# typing


def type_of(term: DirTerm, env: TypingEnv) -> SynType:
    """Type of ``term`` when its free variables are exactly ``env``, in order."""
    env = [(n, t) for n, t in env]
    names = [n for n, _ in env]
    if len(set(names)) != len(names):
        raise LinearityViolation("duplicate names in typing environment")
    fv = free_vars(term)
    for name in set(fv):
        if fv.count(name) != 1:
            raise LinearityViolation(f"variable {name!r} used {fv.count(name)} times", term)
    if fv != names:
        if sorted(fv) == sorted(names):
            raise LinearityViolation(
                f"variables used in order {fv}, environment declares {names}", term
            )
        raise LinearityViolation(
            f"free variables {fv} do not match environment {names}", term
        )
    return _type(term, env)


def _type(t: DirTerm, env) -> SynType:
    if isinstance(t, Var):
        return env[0][1]
    if isinstance(t, (LamR, LamL)):
        if t.var_type is None:
            raise IllTyped(f"binder {t.var!r} has no type annotation", t)
        body_fv = free_vars(t.body)
        if body_fv.count(t.var) != 1:
            raise LinearityViolation(f"bound variable {t.var!r} not used exactly once", t)
        if isinstance(t, LamR):
            if body_fv[-1] != t.var:
                raise LinearityViolation(f"{t.var!r} is not the rightmost parameter", t)
            return Over(_type(t.body, env + [(t.var, t.var_type)]), t.var_type)
        if body_fv[0] != t.var:
            raise LinearityViolation(f"{t.var!r} is not the leftmost parameter", t)
        return Under(t.var_type, _type(t.body, [(t.var, t.var_type)] + env))
    if isinstance(t, AppOver):
        k = len(free_vars(t.fun))
        ft = _type(t.fun, env[:k])
        at = _type(t.arg, env[k:])
        if not isinstance(ft, Over):
            raise IllTyped(f"left operand of < has type {ft}, expected B/A", t)
        if ft.arg != at:
            raise IllTyped(f"argument has type {at}, function expects {ft.arg}", t)
        return ft.result
    k = len(free_vars(t.arg))
    at = _type(t.arg, env[:k])
    ft = _type(t.fun, env[k:])
    if not isinstance(ft, Under):
        raise IllTyped(f"right operand of > has type {ft}, expected A\\B", t)
    if ft.arg != at:
        raise IllTyped(f"argument has type {at}, function expects {ft.arg}", t)
    return ft.result


# ---------------------------------------------------------------------------
# alpha equivalence, substitution, beta


def alpha_key(t: DirTerm, bound: tuple[str, ...] = ()):
    """Hashable key equal for exactly the alpha-equivalent terms."""
    if isinstance(t, Var):
        if t.name in bound:
            return ("b", len(bound) - 1 - bound[::-1].index(t.name))
        return ("f", t.name)
    if isinstance(t, (LamR, LamL)):
        tag = "r" if isinstance(t, LamR) else "l"
        return (tag, t.var_type, alpha_key(t.body, bound + (t.var,)))
    if isinstance(t, AppOver):
        return ("<", alpha_key(t.fun, bound), alpha_key(t.arg, bound))
    return (">", alpha_key(t.arg, bound), alpha_key(t.fun, bound))


def alpha_equal(a: DirTerm, b: DirTerm) -> bool:
    return alpha_key(a) == alpha_key(b)


def _all_names(t: DirTerm) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, (LamR, LamL)):
        return {t.var} | _all_names(t.body)
    if isinstance(t, AppOver):
        return _all_names(t.fun) | _all_names(t.arg)
    return _all_names(t.arg) | _all_names(t.fun)


def _fresh(base: str, avoid: set[str]) -> str:
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def substitute(t: DirTerm, name: str, value: DirTerm) -> DirTerm:
    """Capture-avoiding ``t[name := value]``."""
    if isinstance(t, Var):
        return value if t.name == name else t
    if isinstance(t, (LamR, LamL)):
        if t.var == name:
            return t
        var, body = t.var, t.body
        if var in free_vars(value):
            new = _fresh(var.rstrip("0123456789") or "v", _all_names(body) | _all_names(value) | {name})
            body = substitute(body, var, Var(new))
            var = new
        return type(t)(var, t.var_type, substitute(body, name, value))
    if isinstance(t, AppOver):
        return AppOver(substitute(t.fun, name, value), substitute(t.arg, name, value))
    return AppUnder(substitute(t.arg, name, value), substitute(t.fun, name, value))


def _step(t: DirTerm) -> DirTerm | None:
    """One leftmost-outermost beta step, or None at normal form."""
    if isinstance(t, AppOver) and isinstance(t.fun, LamR):
        return substitute(t.fun.body, t.fun.var, t.arg)
    if isinstance(t, AppUnder) and isinstance(t.fun, LamL):
        return substitute(t.fun.body, t.fun.var, t.arg)
    if isinstance(t, Var):
        return None
    if isinstance(t, (LamR, LamL)):
        b = _step(t.body)
        return None if b is None else type(t)(t.var, t.var_type, b)
    if isinstance(t, AppOver):
        f = _step(t.fun)
        if f is not None:
            return AppOver(f, t.arg)
        a = _step(t.arg)
        return None if a is None else AppOver(t.fun, a)
    a = _step(t.arg)
    if a is not None:
        return AppUnder(a, t.fun)
    f = _step(t.fun)
    return None if f is None else AppUnder(t.arg, f)


def beta_reduce(term: DirTerm) -> DirTerm:
    # a mismatched direction such as (\l x. t) < u is not a redex and stays
    while True:
        nxt = _step(term)
        if nxt is None:
            return term
        term = nxt


def has_redex(t: DirTerm) -> bool:
    return _step(t) is not None


# ---------------------------------------------------------------------------
# parsing


_TERM_TOKEN = re.compile(r"\s*(\\[rl](?![A-Za-z0-9_])|[A-Za-z_][A-Za-z0-9_']*|[().<>:])")


def parse_term(text: str) -> DirTerm:
    parser = _TermParser(text.rstrip())
    t = parser.term()
    if parser.peek() is not None:
        raise TermSyntaxError(f"trailing input in {text!r}")
    return t


class _TermParser:
    """Recursive descent over the raw text; binder annotations are cut out
    verbatim and handed to :func:`parse_type`."""

    def __init__(self, text):
        self.text = text
        self.pos = 0

    def _match(self):
        if self.pos >= len(self.text) or not self.text[self.pos:].strip():
            return None
        m = _TERM_TOKEN.match(self.text, self.pos)
        if m is None:
            raise TermSyntaxError(f"cannot tokenize {self.text[self.pos:]!r}")
        return m

    def peek(self):
        m = self._match()
        return None if m is None else m.group(1)

    def take(self, expected=None):
        m = self._match()
        tok = None if m is None else m.group(1)
        if tok is None or (expected is not None and tok != expected):
            raise TermSyntaxError(f"expected {expected or 'token'}, got {tok!r} in {self.text!r}")
        self.pos = m.end()
        return tok

    def term(self):
        tok = self.peek()
        if tok in ("\\r", "\\l"):
            self.take()
            var = self.take()
            if not (var[0].isalpha() or var[0] == "_"):
                raise TermSyntaxError(f"bad binder name {var!r} in {self.text!r}")
            var_type = None
            if self.peek() == ":":
                self.take()
                dot = self.text.find(".", self.pos)
                if dot < 0:
                    raise TermSyntaxError(f"missing '.' after binder in {self.text!r}")
                var_type = parse_type(self.text[self.pos:dot])
                self.pos = dot
            self.take(".")
            body = self.term()
            return (LamR if tok == "\\r" else LamL)(var, var_type, body)
        if tok == "(":
            self.take()
            first = self.term()
            op = self.peek()
            if op == ")":
                self.take()
                return first
            if op not in ("<", ">"):
                raise TermSyntaxError(f"expected '<', '>' or ')', got {op!r} in {self.text!r}")
            self.take()
            second = self.term()
            self.take(")")
            return AppOver(first, second) if op == "<" else AppUnder(first, second)
        if tok is None or not (tok[0].isalpha() or tok[0] == "_"):
            raise TermSyntaxError(f"unexpected {tok!r} in {self.text!r}")
        self.take()
        return Var(tok)
