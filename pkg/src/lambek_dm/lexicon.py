"""JSON lexicon and judgment files.

A lexicon file looks like::

    {
      "atoms":   {"n": 2, "np": 2},
      "spaces":  {"n": "N", "np": "N"},          # optional, atom -> space label
      "metrics": {"N": [1.0, 0.0, 0.0, 1.0]},   # optional, row-major, identity by default
      "entries": [
        {"word": "person", "type": "n", "value": {"vector": [0.6, 0.8]}},
        {"word": "tall", "type": "n/n", "value": {"components": [...]}},
        {"word": "bank", "type": "n",
         "value": {"mixture": [{"weight": 0.5, "vector": [1, 0]},
                               {"weight": 0.5, "components": [0, 0, 0, 1]}]}}
      ]
    }

Metric keys may name a space label or an atom.  Entries without a value
are allowed for parsing.  Judgment files are lists of ``[word_a, word_b,
similarity]`` rows or of ``{"a", "b", "similarity"}`` objects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .density import DMTensor, dm_from_vector, dm_mix
from .errors import ShapeMismatch
from .interpret import Lexicon, LexEntry
from .logic import Atom, parse_type
from .tensor import Metric, Tensor, vector


class LexiconFormatError(ValueError):
    pass


def canonical_json(data) -> str:
    """Sorted keys; floats printed with Python's shortest round-trip repr."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


@dataclass
class LexiconFile:
    atoms: dict[str, int]
    entries: list[dict]
    spaces: dict[str, str] = field(default_factory=dict)
    metrics: dict[str, list[float]] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "LexiconFile":
        if not isinstance(data, dict):
            raise LexiconFormatError("lexicon must be a JSON object")
        try:
            atoms = {str(k): int(v) for k, v in data["atoms"].items()}
            entries = [dict(e) for e in data.get("entries", [])]
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise LexiconFormatError(f"malformed lexicon: {exc}") from exc
        if any(n <= 0 for n in atoms.values()):
            raise LexiconFormatError("atom dimensions must be positive")
        for e in entries:
            if "word" not in e or "type" not in e:
                raise LexiconFormatError(f"entry needs 'word' and 'type': {e}")
        spaces = {str(k): str(v) for k, v in data.get("spaces", {}).items()}
        metrics = {str(k): [float(x) for x in np.ravel(v)] for k, v in data.get("metrics", {}).items()}
        return cls(atoms, entries, spaces, metrics)

    def to_dict(self) -> dict:
        data = {"atoms": dict(self.atoms), "entries": [dict(e) for e in self.entries]}
        if self.spaces:
            data["spaces"] = dict(self.spaces)
        if self.metrics:
            data["metrics"] = {k: list(v) for k, v in self.metrics.items()}
        return data

    def dumps(self) -> str:
        return canonical_json(self.to_dict())

    def entry(self, word: str) -> dict:
        for e in self.entries:
            if e["word"] == word:
                return e
        raise KeyError(word)

    def label(self, atom: str) -> str:
        return self.spaces.get(atom, atom)

    def metric_for(self, atom_or_label: str) -> Metric:
        labels = {self.label(a): n for a, n in self.atoms.items()}
        label = self.label(atom_or_label) if atom_or_label in self.atoms else atom_or_label
        if label not in labels:
            raise LexiconFormatError(f"unknown atom or space {atom_or_label!r}")
        for key, flat in self.metrics.items():
            if key == label or (key in self.atoms and self.label(key) == label):
                return Metric.from_matrix(flat)
        return Metric.identity(labels[label])

    def vector(self, word: str) -> Tensor:
        """The raw embedding of a vector-valued entry."""
        value = self.entry(word).get("value") or {}
        if "vector" not in value:
            raise LexiconFormatError(f"entry {word!r} is not given as a vector")
        return vector(value["vector"])

    def to_lexicon(self) -> Lexicon:
        metrics = {}
        for key in self.metrics:
            label = self.label(key) if key in self.atoms else key
            metrics[label] = self.metric_for(key)
        lex = Lexicon(dict(self.atoms), {}, dict(self.spaces), metrics)
        for e in self.entries:
            t = parse_type(e["type"])
            value = e.get("value")
            dm = None if value is None else _value(value, lex.space(t), e["word"])
            if e["word"] in lex.entries:
                raise LexiconFormatError(f"duplicate entry for {e['word']!r}")
            lex.entries[e["word"]] = LexEntry(t, dm)
            lex._check(e["word"], lex.entries[e["word"]])
        return lex


def _value(value: dict, space, word: str) -> DMTensor:
    if not isinstance(value, dict) or len(value) != 1:
        raise LexiconFormatError(f"value of {word!r} needs exactly one of vector/components/mixture")
    (kind, payload), = value.items()
    if kind == "vector":
        if len(space) != 1:
            raise ShapeMismatch(f"{word!r}: vector values are only allowed for atomic types")
        return dm_from_vector(vector(payload), space[0])
    if kind == "components":
        return DMTensor(space, np.asarray(payload, float))
    if kind == "mixture":
        parts = [(float(p["weight"]), _value({k: v for k, v in p.items() if k != "weight"}, space, word)) for p in payload]
        return dm_mix([w for w, _ in parts], [dm for _, dm in parts])
    raise LexiconFormatError(f"unknown value kind {kind!r} for {word!r}")


def load_lexicon_file(path: str | Path) -> LexiconFile:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise LexiconFormatError(f"{path}: {exc}") from exc
    return LexiconFile.from_dict(data)


def load_lexicon(path: str | Path) -> Lexicon:
    return load_lexicon_file(path).to_lexicon()


def dump_lexicon(lf: LexiconFile, path: str | Path):
    Path(path).write_text(lf.dumps())


def load_judgments(path: str | Path) -> list[tuple[str, str, float]]:
    with open(path) as fh:
        try:
            rows = json.load(fh)
        except json.JSONDecodeError as exc:
            raise LexiconFormatError(f"{path}: {exc}") from exc
    if not isinstance(rows, list):
        raise LexiconFormatError("judgments must be a JSON list")
    out = []
    for row in rows:
        if isinstance(row, dict):
            row = (row.get("a"), row.get("b"), row.get("similarity"))
        try:
            a, b, sim = row
            sim = float(sim)
        except (TypeError, ValueError) as exc:
            raise LexiconFormatError(f"bad judgment row {row!r}") from exc
        if not 0.0 <= sim <= 1.0:
            raise LexiconFormatError(f"similarity {sim} outside [0, 1]")
        out.append((str(a), str(b), sim))
    return out


def is_atomic(type_text: str) -> bool:
    return isinstance(parse_type(type_text), Atom)
