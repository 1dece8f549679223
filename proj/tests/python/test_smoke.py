import json
import math

import pytest

p = pytest.importorskip("persuasion")


def lae():
    return p.TechniqueVocabulary(["L", "A", "E"])


def test_hand_scored_example():
    gold = {("s", 1): {"L", "A"}, ("s", 2): {"E"}}
    pred = {("s", 1): {"L"}, ("s", 2): {"E", "A"}}
    assert p.f1_micro(pred, gold, lae()) == pytest.approx(4 / 6, abs=1e-12)
    assert p.f1_macro(pred, gold, lae()) == pytest.approx(2 / 3, abs=1e-12)
    report = p.score(pred, gold, lae(), {("s", 1): "en", ("s", 2): "en"})
    assert (report["tp"], report["fp"], report["fn"]) == (2, 1, 1)
    assert report["per_language"]["en"]["f1_micro"] == report["f1_micro"]


def test_threshold_and_calibration():
    v = p.TechniqueVocabulary(["A", "B"])
    table = p.ProbabilityTable(v, [(("s", 1), "en", [0.6, 0.3]), (("s", 2), "en", [0.2, 0.5])])
    assert p.apply_threshold(table, 0.3) == {("s", 1): {"A", "B"}, ("s", 2): {"B"}}
    curve = p.calibrate_threshold(table, {("s", 1): {"A"}, ("s", 2): {"B"}}, 0.05, 0.95, 0.05)
    assert curve["best_threshold"] == 0.5
    assert curve["best_f1_micro"] == 1.0
    assert len(curve["points"]) == 19
    with pytest.raises(ValueError):
        p.apply_threshold(table, 1.5)


def test_union_and_errors():
    v = p.TechniqueVocabulary(["A", "B"])
    merged = p.ensemble_union({("k", 0): {"A"}}, {("k", 0): {"B"}, ("k", 1): set()}, v)
    assert merged == {("k", 0): {"A", "B"}, ("k", 1): set()}
    with pytest.raises(p.VocabularyMismatch):
        p.ensemble_union({("k", 0): {"Z"}}, {}, v)
    with pytest.raises(p.DataError):
        p.TechniqueVocabulary(["A", "A"])
    assert issubclass(p.ConfigError, p.PersuasionError)


def test_preprocess_and_ngrams():
    assert p.normalize_ws_punct("Hello!!!  World ") == "Hello! World"
    assert p.replace_entities("mail me@site.org #stop") == "mail {email} {hashtag}"
    assert p.preprocess("Go!!  https://a.b") == "Go! {url}"
    assert p.extract_ngrams("abc", 2, 3) == {"ab": 1, "bc": 1, "abc": 1}
    assert p.fnv1a64(b"foobar") == 0x85944171F73967E8
    with pytest.raises(p.ConfigError):
        p.preprocess("x", "lowercase")


def test_train_predict_round_trip(tmp_path):
    v = p.TechniqueVocabulary(["A", "B"])
    rows, gold = [], {}
    for i in range(16):
        key = (f"art{i // 4}", i % 4)
        rows.append((key, "en", "alpha alpha beta" if i % 2 else "omega psi chi"))
        gold[key] = {"A"} if i % 2 else {"B"}
    corpus = p.Corpus(v, rows, gold)
    model = p.train(corpus, epochs=10, learning_rate=2.0, batch_size=4, hash_dim=4096)
    assert len(model.epoch_losses) == 10
    assert model.epoch_losses[-1] < model.initial_loss == pytest.approx(math.log(2))
    table = model.predict(corpus)
    assert len(table) == 16
    assert all(0 < x < 1 for _, _, probs in table.rows for x in probs)

    model.save(tmp_path / "m.json")
    again = p.load_model(tmp_path / "m.json").predict(corpus)
    assert again.rows == table.rows
    assert p.label_distribution(corpus) == "language,A,B,total\nen,8,8,16\ntotal,8,8,16\n"


def test_cli_entry_point(tmp_path):
    (tmp_path / "v.txt").write_text("L\nA\nE\n")
    (tmp_path / "gold.txt").write_text("s\t1\tL,A\ns\t2\tE\n")
    (tmp_path / "pred.txt").write_text("s\t1\tL\ns\t2\tE,A\n")
    code, out, _ = p.run_cli(["--quiet", "score", "--pred", str(tmp_path / "pred.txt"),
                              "--gold", str(tmp_path / "gold.txt"), "--vocabulary", str(tmp_path / "v.txt")])
    assert code == 0
    assert json.loads(out)["f1_micro"] == pytest.approx(2 / 3, abs=1e-9)
