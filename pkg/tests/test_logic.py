import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import SPAIN_TYPES
from lambek_dm.errors import TypeSyntaxError, UnknownWord
from lambek_dm.logic import (
    Atom,
    Derivation,
    Leaf,
    Mode,
    Node,
    Over,
    Rule,
    Sequent,
    Under,
    bracketings,
    lexicon_types,
    parse,
    parse_type,
    validate,
)
from lambek_dm.terms import extract_term, format_term
from oracles import e_rule_terms, random_type

N, NP = Atom("n"), Atom("np")


def syn_types(depth=3):
    atoms = st.sampled_from(["n", "np", "s", "vp_2"]).map(Atom)
    return st.recursive(
        atoms,
        lambda inner: st.one_of(
            st.builds(Over, inner, inner),
            st.builds(Under, inner, inner),
        ),
        max_leaves=8,
    )


# -- types ---------------------------------------------------------------


def test_print_forms():
    assert str(parse_type("(n\\n)/np")) == "(n\\n)/np"
    assert parse_type("(n\\n)/np") == Over(Under(N, N), NP)
    assert str(Under(NP, Atom("s"))) == "np\\s"


@given(syn_types())
def test_type_round_trip(t):
    assert parse_type(str(t)) == t


@pytest.mark.parametrize("bad", ["", "n/", "(n", "n/np/s", "n\\n/np", "/n", "n)"])
def test_type_syntax_errors(bad):
    with pytest.raises(TypeSyntaxError):
        parse_type(bad)


def test_open_atom_set():
    assert parse_type("pp_to") == Atom("pp_to")


# -- bracketings ----------------------------------------------------------


@pytest.mark.parametrize("n,count", [(1, 1), (2, 1), (3, 2), (4, 5), (5, 14)])
def test_bracketings_catalan(n, count):
    trees = bracketings(list(range(n)))
    assert len(trees) == count
    assert len({repr(t) for t in trees}) == count


# -- parsing ---------------------------------------------------------------


def _terms(ds):
    return [format_term(extract_term(d)) for d in ds]


def test_spain_two_readings():
    lex = lexicon_types(SPAIN_TYPES)
    ds = parse(lex, ["tall", "person", "from", "Spain"], N, Mode.NL, var_names="xywz")
    assert _terms(ds) == ["((x < y) > (w < z))", "(x < (y > (w < z)))"]
    assert all(validate(d) for d in ds)


def test_single_word_axiom():
    ds = parse({"Spain": NP}, ["Spain"], NP)
    assert len(ds) == 1 and ds[0].rule is Rule.AX


def test_tall_person_single_e_rule():
    ds = parse(lexicon_types({"tall": "n/n", "person": "n"}), ["tall", "person"], N)
    assert len(ds) == 1
    assert ds[0].rule is Rule.E_OVER
    assert [p.rule for p in ds[0].premises] == [Rule.AX, Rule.AX]


def test_unknown_word():
    with pytest.raises(UnknownWord) as info:
        parse({"a": N}, ["a", "b"], N)
    assert info.value.word == "b"


def test_underivable_is_empty():
    assert parse({"a": N, "b": N}, ["a", "b"], N) == []


def test_determinism():
    lex = lexicon_types(SPAIN_TYPES)
    words = ["tall", "person", "from", "Spain"]
    runs = [_terms(parse(lex, words, N)) for _ in range(3)]
    assert runs[0] == runs[1] == runs[2]


def test_introduction_found_with_budget():
    # lifting: np |- s/(np\s) needs one hypothesis
    lex = {"john": NP}
    goal = parse_type("s/(np\\s)")
    assert parse(lex, ["john"], goal, intro_budget=0) == []
    ds = parse(lex, ["john"], goal, intro_budget=1)
    assert len(ds) == 1 and ds[0].rule is Rule.I_OVER
    assert validate(ds[0])
    assert format_term(extract_term(ds[0]), annotate=False) == "\\r h1. (x1 > h1)"


def test_composition_needs_associativity():
    # a/b, b/c |- a/c holds in L; in NL too, since the hypothesis nests on the right
    lex = lexicon_types({"f": "a/b", "g": "b/c"})
    goal = parse_type("a/c")
    assert len(parse(lex, ["f", "g"], goal, Mode.L)) == 1
    assert len(parse(lex, ["f", "g"], goal, Mode.NL)) == 0


def test_budget_validation():
    with pytest.raises(ValueError):
        parse({"a": N}, ["a"], N, intro_budget=-1)
    with pytest.raises(ValueError):
        parse({"a": N}, [], N)


# -- validation --------------------------------------------------------------


def test_axiom_mismatch_rejected():
    d = Derivation(Rule.AX, Sequent(Leaf("x", NP), N))
    res = validate(d)
    assert not res
    assert "mismatch" in res.reason


def _ax(name, t):
    return Derivation(Rule.AX, Sequent(Leaf(name, t), t))


def test_hand_transcribed_first_reading():
    x, y, w, z = (Leaf("x", Over(N, N)), Leaf("y", N), Leaf("w", parse_type("(n\\n)/np")), Leaf("z", NP))
    xy = Derivation(Rule.E_OVER, Sequent(Node(x, y), N), (_ax("x", x.type), _ax("y", N)))
    wz = Derivation(Rule.E_OVER, Sequent(Node(w, z), Under(N, N)), (_ax("w", w.type), _ax("z", NP)))
    root = Derivation(Rule.E_UNDER, Sequent(Node(Node(x, y), Node(w, z)), N), (xy, wz))
    assert validate(root)
    assert format_term(extract_term(root)) == "((x < y) > (w < z))"


def test_validation_path_points_at_bad_node():
    x, y = Leaf("x", Over(N, N)), Leaf("y", N)
    bad_leaf = Derivation(Rule.AX, Sequent(Leaf("y", N), NP))
    root = Derivation(Rule.E_OVER, Sequent(Node(x, y), N), (_ax("x", x.type), bad_leaf))
    res = validate(root)
    assert not res
    assert res.path in ((1,), ())


def test_hypothesis_side_checked():
    h = Leaf("h", NP)
    body_ant = Node(h, Leaf("x", Under(NP, Atom("s"))))
    body = Derivation(
        Rule.E_UNDER,
        Sequent(body_ant, Atom("s")),
        (_ax("h", NP), _ax("x", Under(NP, Atom("s")))),
    )
    # I/ would need the hypothesis on the right
    wrong = Derivation(Rule.I_OVER, Sequent(Leaf("x", Under(NP, Atom("s"))), Over(Atom("s"), NP)), (body,))
    assert not validate(wrong)
    right = Derivation(Rule.I_UNDER, Sequent(Leaf("x", Under(NP, Atom("s"))), Under(NP, Atom("s"))), (body,))
    assert validate(right)


def test_duplicate_variables_rejected():
    x = Leaf("x", Over(N, N))
    d = Derivation(Rule.E_OVER, Sequent(Node(x, Leaf("x", N)), N), (_ax("x", x.type), _ax("x", N)))
    assert not validate(d)


# -- properties ----------------------------------------------------------------


def _random_lexicon(seed):
    rng = np.random.default_rng(seed)
    n_words = int(rng.integers(1, 5))
    types = [random_type(rng) for _ in range(n_words)]
    goal = random_type(rng, depth=1)
    return types, goal


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_budget_zero_matches_brute_force(seed):
    types, goal = _random_lexicon(seed)
    words = [f"w{i}" for i in range(len(types))]
    names = [f"x{i + 1}" for i in range(len(types))]
    lex = dict(zip(words, types))
    found = sorted(_terms(parse(lex, words, goal, Mode.NL, intro_budget=0)))
    expected = sorted(s for t, s in e_rule_terms(types, names) if t == goal)
    assert found == expected


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_soundness_and_nl_in_l(seed):
    types, goal = _random_lexicon(seed)
    words = [f"w{i}" for i in range(len(types))]
    lex = dict(zip(words, types))
    nl = parse(lex, words, goal, Mode.NL, intro_budget=1)
    for d in nl:
        assert validate(d)
    if nl:
        l_terms = set(_terms(parse(lex, words, goal, Mode.L, intro_budget=1)))
        assert set(_terms(nl)) <= l_terms
