"""Graphviz drawings of the contractions each reading performs.

Words are nodes laid out left to right; every contraction between two word
factors is an edge labelled with its space and subsystem.  The first
reading's links run underneath the words (solid), the second's above them
(dashed), and further readings cycle through colours.
"""

from __future__ import annotations

from typing import Sequence

from .ambiguity import Reading, contraction_links
from .interpret import Lexicon
from .logic import leaves

_STYLES = [
    {"style": "solid", "port": "s", "color": "black"},
    {"style": "dashed", "port": "n", "color": "blue"},
    {"style": "dotted", "port": "s", "color": "darkgreen"},
    {"style": "dashed", "port": "n", "color": "red"},
]


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def readings_to_dot(readings: Sequence[Reading], lexicon: Lexicon) -> str:
    if not readings:
        return "graph contractions {\n}\n"
    words = readings[0].words
    variables = readings[0].variables
    lines = [
        "graph contractions {",
        "  node [shape=box];",
        "  { rank=same; " + " ".join(f"w{i};" for i in range(len(words))) + " }",
    ]
    for i, w in enumerate(words):
        lines.append(f"  w{i} [label={_quote(w)}];")
    for i in range(len(words) - 1):
        lines.append(f"  w{i} -- w{i + 1} [style=invis];")
    index = {name: i for i, name in enumerate(variables)}
    for r, reading in enumerate(readings):
        style = _STYLES[r % len(_STYLES)]
        env = {leaf.name: leaf.type for leaf in leaves(reading.derivation.conclusion.antecedent)}
        _, links, _ = contraction_links(reading.term, env)
        for (na, ka), (nb, kb) in links:
            if na not in index or nb not in index:
                continue
            f = lexicon.space(env[na])[ka].with_subsystem(reading.subsystems[na][ka])
            label = f"{f.label}{f.subsystem}"
            a, b = sorted((index[na], index[nb]))
            lines.append(
                f"  w{a}:{style['port']} -- w{b}:{style['port']} "
                f"[label={_quote(label)}, style={style['style']}, color={style['color']}, "
                f"constraint=false, tooltip={_quote('reading ' + str(r))}];"
            )
        out = f"r{r}"
        free = ", ".join(f"{f.label}{f.subsystem}" for f in reading.value.factors)
        lines.append(f"  {out} [shape=ellipse, label={_quote(f'reading {r}: {free}')}, color={style['color']}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
