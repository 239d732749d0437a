"""From syntactic types and proof terms to density-matrix tensors.

Atoms map to a single STANDARD factor.  ``B/A`` maps to the factors of
``B`` followed by the dual of ``A``'s factors, ``A\\B`` to the dual of
``A`` followed by ``B``.  The dual of a factor list reverses it and flips
every variance, so an argument always meets its slot in nested order:
the function's innermost slot pairs with the argument's outermost factor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .density import (
    DMTensor,
    SpaceFactor,
    STANDARD,
    basis_element,
    dm_contract,
    dm_multiply,
    dm_trace,
    shape_of,
)
from .errors import (
    FactorMismatch,
    IllTyped,
    MissingInterpretation,
    NoContractibleBoundary,
    ShapeMismatch,
    UnknownAtom,
)
from .logic import Atom, Derivation, Over, SynType, Under, leaves, parse_type
from .tensor import Metric
from .terms import AppOver, AppUnder, DirTerm, LamL, LamR, Var, extract_term

SemSpace = tuple[SpaceFactor, ...]


def dual_space(factors: Sequence[SpaceFactor]) -> SemSpace:
    return tuple(f.flipped() for f in reversed(factors))


def interpret_type(
    t: SynType, dims: Mapping[str, int], spaces: Mapping[str, str] | None = None
) -> SemSpace:
    """Factor list of the semantic space for ``t``; every subsystem id is 0.

    ``spaces`` maps atoms to space labels (``np`` and ``n`` may share ``N``);
    an atom without an entry is its own label.
    """
    if isinstance(t, Atom):
        if t.name not in dims:
            raise UnknownAtom(t.name)
        label = (spaces or {}).get(t.name, t.name)
        return (SpaceFactor(label, 0, STANDARD, int(dims[t.name])),)
    if isinstance(t, Over):
        return interpret_type(t.result, dims, spaces) + dual_space(interpret_type(t.arg, dims, spaces))
    if isinstance(t, Under):
        return dual_space(interpret_type(t.arg, dims, spaces)) + interpret_type(t.result, dims, spaces)
    raise TypeError(f"not a syntactic type: {t!r}")


def _plain(factors: Sequence[SpaceFactor]) -> SemSpace:
    return tuple(f.with_subsystem(0) for f in factors)


@dataclass(frozen=True)
class LexEntry:
    type: SynType
    value: DMTensor | None = None


@dataclass
class Lexicon:
    """Words with their types and values, plus the spaces those values live in."""

    dims: dict[str, int]
    entries: dict[str, LexEntry] = field(default_factory=dict)
    spaces: dict[str, str] = field(default_factory=dict)
    metrics: dict[str, Metric] = field(default_factory=dict)

    def __post_init__(self):
        seen: dict[str, int] = {}
        for atom, n in self.dims.items():
            label = self.spaces.get(atom, atom)
            if seen.setdefault(label, n) != n:
                raise ShapeMismatch(f"atoms sharing space {label!r} disagree on its dimension")
        for label, m in self.metrics.items():
            if label in seen and m.dim != seen[label]:
                raise ShapeMismatch(f"metric for {label!r} has dim {m.dim}, space has {seen[label]}")
        for word, entry in self.entries.items():
            self._check(word, entry)

    def _check(self, word: str, entry: LexEntry):
        if entry.value is None:
            return
        expected = self.space(entry.type)
        if _plain(entry.value.factors) != expected:
            raise ShapeMismatch(
                f"value of {word!r} has factors {[str(f) for f in entry.value.factors]}, "
                f"type {entry.type} needs {[str(f) for f in expected]}"
            )

    def add(self, word: str, type_: SynType | str, value: DMTensor | np.ndarray | None = None):
        t = parse_type(type_) if isinstance(type_, str) else type_
        if value is not None and not isinstance(value, DMTensor):
            value = DMTensor(self.space(t), value)
        entry = LexEntry(t, value)
        self._check(word, entry)
        self.entries[word] = entry
        return entry

    def space(self, t: SynType) -> SemSpace:
        return interpret_type(t, self.dims, self.spaces)

    def types(self) -> dict[str, SynType]:
        return {w: e.type for w, e in self.entries.items()}

    def value(self, word: str) -> DMTensor:
        entry = self.entries.get(word)
        if entry is None or entry.value is None:
            raise MissingInterpretation(word)
        return entry.value

    def metric(self, label: str) -> Metric:
        m = self.metrics.get(label)
        if m is not None:
            return m
        for atom, n in self.dims.items():
            if self.spaces.get(atom, atom) == label:
                return Metric.identity(n)
        raise UnknownAtom(label)


# ---------------------------------------------------------------------------
# terms


def apply_over(fun: DMTensor, arg: DMTensor) -> DMTensor:
    """``fun < arg``: trace the argument against the function's trailing slots."""
    k, n = len(arg.factors), len(fun.factors)
    if k == 0 or k >= n + 1:
        raise FactorMismatch(f"cannot apply {fun!r} to {arg!r}")
    try:
        out = dm_trace(dm_multiply(fun, arg))
    except NoContractibleBoundary as exc:
        raise FactorMismatch(str(exc)) from exc
    for m in range(1, k):
        out = dm_contract(out, n - 1 - m)
    return out


def apply_under(arg: DMTensor, fun: DMTensor) -> DMTensor:
    """``arg > fun``: trace the argument against the function's leading slots."""
    k = len(arg.factors)
    if k == 0 or k > len(fun.factors):
        raise FactorMismatch(f"cannot apply {fun!r} to {arg!r}")
    try:
        out = dm_trace(dm_multiply(arg, fun))
    except NoContractibleBoundary as exc:
        raise FactorMismatch(str(exc)) from exc
    for m in range(1, k):
        out = dm_contract(out, k - 1 - m)
    return out


def _ids(subsystems, key, n):
    ids = (subsystems or {}).get(key)
    if ids is None:
        return (0,) * n
    if len(ids) != n:
        raise ShapeMismatch(f"{key!r} needs {n} subsystem ids, got {len(ids)}")
    return tuple(ids)


def _lookup(name: str, g, lex: Lexicon | None) -> DMTensor:
    if name in g:
        return g[name]
    if lex is not None and name in lex.entries:
        return lex.value(name)
    raise MissingInterpretation(name)


def interpret_term(
    term: DirTerm,
    g: Mapping[str, DMTensor],
    lex: Lexicon | None = None,
    subsystems: Mapping[str, Sequence[int]] | None = None,
) -> DMTensor:
    """Value of ``term`` under the assignment ``g``.

    Free names not in ``g`` are looked up as lexicon constants.
    ``subsystems`` optionally gives per-factor subsystem ids for variables;
    the key ``x + "*"`` labels the open slot created by abstracting ``x``.
    Abstractions are evaluated literally, once per basis element of the
    bound variable's space, so ``lex`` must be given when the term has any.
    """
    return _interp(term, dict(g), lex, subsystems)


def _interp(term, g, lex, subsystems) -> DMTensor:
    if isinstance(term, Var):
        value = _lookup(term.name, g, lex)
        if subsystems and term.name in subsystems:
            value = value.relabel(_ids(subsystems, term.name, len(value.factors)))
        return value
    if isinstance(term, AppOver):
        return apply_over(_interp(term.fun, g, lex, subsystems), _interp(term.arg, g, lex, subsystems))
    if isinstance(term, AppUnder):
        return apply_under(_interp(term.arg, g, lex, subsystems), _interp(term.fun, g, lex, subsystems))
    if isinstance(term, (LamR, LamL)):
        return _abstract(term, g, lex, subsystems)
    raise IllTyped(f"not a term: {term!r}", term)


def _abstract(term, g, lex, subsystems) -> DMTensor:
    if term.var_type is None:
        raise IllTyped(f"binder {term.var!r} needs a type annotation to be interpreted", term)
    if lex is None:
        raise MissingInterpretation(f"space of {term.var_type}")
    space = lex.space(term.var_type)
    space = tuple(f.with_subsystem(s) for f, s in zip(space, _ids(subsystems, term.var, len(space))))
    legs = dual_space(space)
    legs = tuple(f.with_subsystem(s) for f, s in zip(legs, _ids(subsystems, term.var + "*", len(legs))))
    n = len(space)
    inner = dict(g)
    # the bound variable keeps the ids given above, not those of its namesakes
    sub = {k: v for k, v in (subsystems or {}).items() if k != term.var}
    result = None
    body_factors = None
    for index in itertools.product(*(range(d) for d in shape_of(space))):
        inner[term.var] = basis_element(space, index)
        body = _interp(term.body, inner, lex, sub)
        if result is None:
            body_factors = body.factors
            leg_shape = shape_of(legs)
            shape = body.components.shape + leg_shape if isinstance(term, LamR) else leg_shape + body.components.shape
            result = np.zeros(shape)
        elif body.factors != body_factors:
            raise FactorMismatch("abstraction body changes shape across basis elements")
        leg = tuple(x for m in reversed(range(n)) for x in (index[2 * m + 1], index[2 * m]))
        if isinstance(term, LamR):
            result[(Ellipsis,) + leg] = body.components
        else:
            result[leg + (Ellipsis,)] = body.components
    factors = body_factors + legs if isinstance(term, LamR) else legs + body_factors
    return DMTensor(factors, result)


def interpret_derivation(
    d: Derivation, lex: Lexicon, subsystems: Mapping[str, Sequence[int]] | None = None
) -> DMTensor:
    """``interpret_term(extract_term(d))`` with each leaf bound to its word's value."""
    term = extract_term(d)
    g = {}
    for leaf in leaves(d.conclusion.antecedent):
        g[leaf.name] = lex.value(leaf.word if leaf.word is not None else leaf.name)
    return interpret_term(term, g, lex, subsystems)
