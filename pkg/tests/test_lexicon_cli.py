import json
from pathlib import Path

import numpy as np
import pytest

from helpers import random_spd
from lambek_dm.ambiguity import enumerate_readings
from lambek_dm.cli import main
from lambek_dm.errors import ShapeMismatch
from lambek_dm.lexicon import (
    LexiconFile,
    LexiconFormatError,
    dump_lexicon,
    is_atomic,
    load_judgments,
    load_lexicon,
    load_lexicon_file,
)
from lambek_dm.logic import Atom
from lambek_dm.tensor import Metric, cosine_similarity, vector

DATA = Path(__file__).parent / "data"
SPAIN = str(DATA / "spain.json")
VASE = str(DATA / "vase_wall.json")
PHRASE = "tall person from Spain"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def _write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


# -- files ---------------------------------------------------------------------------------


def test_round_trip_is_bit_exact(tmp_path):
    lf = load_lexicon_file(SPAIN)
    out = tmp_path / "copy.json"
    dump_lexicon(lf, out)
    again = load_lexicon_file(out)
    assert again.dumps() == lf.dumps()
    assert out.read_text() == Path(SPAIN).read_text()


def test_value_kinds():
    lex = load_lexicon(SPAIN)
    assert np.array_equal(lex.value("person").components, np.outer([0.6, 0.8], [0.6, 0.8]))
    assert np.allclose(lex.value("bank").components, np.eye(2) / 2, rtol=0, atol=1e-15)
    assert lex.value("tall").components.shape == (2, 2, 2, 2)


def test_metric_keys():
    lf = load_lexicon_file(VASE)
    assert np.array_equal(lf.metric_for("n").d, [[2, 1], [1, 5]])
    assert np.array_equal(lf.to_lexicon().metric("n").d, [[2, 1], [1, 5]])
    assert np.array_equal(load_lexicon_file(SPAIN).metric_for("N").d, np.eye(2))
    with pytest.raises(LexiconFormatError):
        lf.metric_for("s")


@pytest.mark.parametrize(
    "data",
    [
        [],
        {"entries": []},
        {"atoms": {"n": 0}},
        {"atoms": {"n": 2}, "entries": [{"word": "x"}]},
    ],
)
def test_malformed_lexica(data):
    with pytest.raises(LexiconFormatError):
        LexiconFile.from_dict(data)


def test_bad_values():
    base = {"atoms": {"n": 2}}
    with pytest.raises(ShapeMismatch):
        LexiconFile.from_dict({**base, "entries": [{"word": "f", "type": "n/n", "value": {"vector": [1, 0]}}]}).to_lexicon()
    with pytest.raises(ShapeMismatch):
        LexiconFile.from_dict({**base, "entries": [{"word": "f", "type": "n", "value": {"components": [1, 0]}}]}).to_lexicon()
    with pytest.raises(LexiconFormatError):
        LexiconFile.from_dict({**base, "entries": [{"word": "f", "type": "n", "value": {"other": [1]}}]}).to_lexicon()
    dup = [{"word": "f", "type": "n"}, {"word": "f", "type": "n"}]
    with pytest.raises(LexiconFormatError):
        LexiconFile.from_dict({**base, "entries": dup}).to_lexicon()


def test_judgments(tmp_path):
    rows = load_judgments(_write(tmp_path, "j.json", [["a", "b", 0.5], {"a": "c", "b": "d", "similarity": 1}]))
    assert rows == [("a", "b", 0.5), ("c", "d", 1.0)]
    with pytest.raises(LexiconFormatError):
        load_judgments(_write(tmp_path, "bad.json", [["a", "b", 1.5]]))
    with pytest.raises(LexiconFormatError):
        load_judgments(_write(tmp_path, "bad2.json", {"a": 1}))


def test_is_atomic():
    assert is_atomic("np") and not is_atomic("n/n")


# -- parse ----------------------------------------------------------------------------------


def test_parse_command(capsys):
    code, out, _ = run(capsys, "parse", SPAIN, PHRASE, "n")
    assert code == 0
    assert out == {"derivations": ["((x1 < x2) > (x3 < x4))", "(x1 < (x2 > (x3 < x4)))"], "count": 2}


def test_parse_single_word(capsys):
    code, out, _ = run(capsys, "parse", SPAIN, "Spain", "np")
    assert code == 0 and out["count"] == 1


def test_parse_unknown_word(capsys):
    code, out, err = run(capsys, "parse", SPAIN, "tall dog", "n")
    assert code == 1 and out is None
    assert "dog" in err


def test_parse_no_derivation(capsys):
    code, out, _ = run(capsys, "parse", SPAIN, "person person", "n")
    assert code == 2 and out["count"] == 0


def test_bad_files(capsys, tmp_path):
    code, _, err = run(capsys, "parse", str(tmp_path / "missing.json"), "x", "n")
    assert code == 1 and err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "parse", str(bad), "x", "n")[0] == 1
    assert run(capsys, "parse", SPAIN, "tall person", "n/")[0] == 1


# -- interpret ----------------------------------------------------------------------------------


def test_interpret_matches_library(capsys):
    code, out, _ = run(capsys, "interpret", SPAIN, PHRASE, "n")
    assert code == 0 and out["count"] == 2
    lex = load_lexicon(SPAIN)
    readings = enumerate_readings(PHRASE.split(), lex, Atom("n"))
    for got, r in zip(out["readings"], readings):
        assert got["value"] == r.value.to_json()
        assert got["subsystems"] == {k: list(v) for k, v in r.subsystems.items()}
    v0, v1 = (np.array(r["value"]["components"]) for r in out["readings"])
    assert not np.allclose(v0, v1)
    assert out["readings"][0]["value"]["factors"][0]["subsystem"] != out["readings"][1]["value"]["factors"][0]["subsystem"]


def test_interpret_one_reading(capsys):
    _, everything, _ = run(capsys, "interpret", SPAIN, "tall person", "n")
    _, first, _ = run(capsys, "interpret", SPAIN, "tall person", "n", "--reading", "0")
    assert everything == first
    assert run(capsys, "interpret", SPAIN, "tall person", "n", "--reading", "3")[0] == 1


def test_interpret_dot(capsys, tmp_path):
    dot = tmp_path / "fig.dot"
    code, _, _ = run(capsys, "interpret", SPAIN, PHRASE, "n", "--emit-dot", str(dot))
    assert code == 0
    text = dot.read_text()
    assert text.startswith("graph")
    for i, word in enumerate(PHRASE.split()):
        assert f'w{i} [label="{word}"];' in text
    assert 'label="N2"' in text
    assert "dashed" in text and "solid" in text


def test_interpret_without_dot_writes_nothing(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    run(capsys, "interpret", SPAIN, PHRASE, "n")
    assert list(tmp_path.iterdir()) == []


def test_interpret_shape_mismatch(capsys, tmp_path):
    data = {"atoms": {"n": 2}, "entries": [{"word": "x", "type": "n/n", "value": {"components": [1, 2, 3]}}]}
    assert run(capsys, "interpret", _write(tmp_path, "l.json", data), "x", "n/n")[0] == 1


# -- similarity -------------------------------------------------------------------------------


def test_similarity_toy_numbers(capsys, tmp_path):
    code, out, _ = run(capsys, "similarity", VASE, "vase", "wall", "--metric", "n")
    assert code == 0
    assert abs(out["similarity"] - 1 / np.sqrt(10)) <= 1e-12
    plain = json.loads(Path(VASE).read_text())
    del plain["metrics"]
    path = _write(tmp_path, "plain.json", plain)
    assert run(capsys, "similarity", path, "vase", "wall", "--metric", "n")[1]["similarity"] == 0
    assert run(capsys, "similarity", path, "vase", "vase", "--metric", "n")[1]["similarity"] == pytest.approx(1, abs=1e-15)


def test_similarity_needs_vectors(capsys):
    assert run(capsys, "similarity", SPAIN, "tall", "person", "--metric", "n")[0] == 1


# -- fit-metric ----------------------------------------------------------------------------------


def _synthetic(tmp_path, n=3, count=20, seed=5):
    rng = np.random.default_rng(seed)
    m = Metric.from_matrix(random_spd(rng, n))
    words = [f"w{k}" for k in range(8)]
    vecs = {w: rng.normal(size=n) for w in words}
    lex = {"atoms": {"n": n}, "entries": [{"word": w, "type": "n", "value": {"vector": list(vecs[w])}} for w in words]}
    rows = []
    while len(rows) < count:
        a, b = rng.choice(words, size=2, replace=False)
        sim = cosine_similarity(m, vector(vecs[a]), vector(vecs[b]))
        if 0 <= sim <= 1:
            rows.append([str(a), str(b), sim])
    return _write(tmp_path, "lex.json", lex), _write(tmp_path, "judg.json", rows)


def test_fit_metric_recovers(capsys, tmp_path):
    lex, judg = _synthetic(tmp_path)
    out_path = tmp_path / "metric.json"
    code, out, _ = run(capsys, "fit-metric", lex, judg, "--atom", "n", "--out", str(out_path))
    assert code == 0
    assert out["objective"] <= 1e-6
    saved = json.loads(out_path.read_text())
    assert saved == out["metric"]
    assert Metric.from_json(saved).dim == 3


def test_fit_metric_empty_judgments(capsys, tmp_path):
    judg = _write(tmp_path, "empty.json", [])
    code, out, _ = run(capsys, "fit-metric", VASE, judg, "--atom", "n", "--reg", "1.0")
    assert code == 0
    assert out["metric"]["d"] == [1.0, 0.0, 0.0, 1.0]


def test_fit_metric_single_pair(capsys):
    code, out, _ = run(capsys, "fit-metric", VASE, str(DATA / "vase_wall_judgments.json"), "--atom", "n")
    assert code == 0
    m = Metric.from_json(out["metric"])
    assert abs(cosine_similarity(m, vector([0, 1]), vector([1, 0])) - 1 / np.sqrt(10)) <= 1e-6


def test_fit_metric_seed(capsys, tmp_path, monkeypatch):
    lex, judg = _synthetic(tmp_path, count=5)
    monkeypatch.setenv("LAMBEK_DM_SEED", "7")
    _, a, _ = run(capsys, "fit-metric", lex, judg, "--atom", "n", "--reg", "0.1")
    _, b, _ = run(capsys, "fit-metric", lex, judg, "--atom", "n", "--reg", "0.1")
    assert a == b
    monkeypatch.delenv("LAMBEK_DM_SEED")
    _, c, _ = run(capsys, "fit-metric", lex, judg, "--atom", "n", "--reg", "0.1")
    assert c["objective"] == pytest.approx(a["objective"], abs=1e-6)


def test_fit_metric_errors(capsys, tmp_path):
    judg = _write(tmp_path, "j.json", [["vase", "nothing", 0.5]])
    assert run(capsys, "fit-metric", VASE, judg, "--atom", "n")[0] == 1
    assert run(capsys, "fit-metric", VASE, str(DATA / "vase_wall_judgments.json"), "--atom", "s")[0] == 1


# -- route ------------------------------------------------------------------------------------------


def test_route_command(capsys):
    code, out, _ = run(capsys, "route", SPAIN, "tall person from_Spain", "n", "--from", "0", "--to", "1")
    assert code == 0
    assert out["sequence"] == ["P^23", "P_13", "P_13"]
    _, interp, _ = run(capsys, "interpret", SPAIN, "tall person from_Spain", "n", "--reading", "1")
    routed = np.array(out["value"]["components"])
    direct = np.array(interp["readings"][0]["value"]["components"])
    assert np.allclose(routed, direct, rtol=0, atol=1e-12)
    assert out["value"]["factors"] == interp["readings"][0]["value"]["factors"]


def test_route_to_self(capsys):
    code, out, _ = run(capsys, "route", SPAIN, PHRASE, "n", "--from", "1", "--to", "1")
    assert code == 0 and out["sequence"] == []


def test_route_errors(capsys):
    assert run(capsys, "route", SPAIN, PHRASE, "n", "--to", "5")[0] == 1
    assert run(capsys, "route", SPAIN, "person person", "n")[0] == 2


def test_outputs_are_json_only(capsys):
    code = main(["-v", "parse", SPAIN, PHRASE, "n"])
    out, _ = capsys.readouterr()
    assert code == 0
    json.loads(out)
