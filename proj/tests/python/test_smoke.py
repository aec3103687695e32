import math
import os
from pathlib import Path

import pytest

import answerability as aq

DATA = Path(os.environ.get("ANSWERABILITY_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def test_text_features():
    assert aq.tokenize("What is LDA?") == ["What", "is", "LDA"]
    assert aq.tokenize("don't stop") == ["don't", "stop"]
    assert aq.case_fold("HeLLo") == "hello"
    assert aq.pos_diversity(["N", "V", "A", "D"]) == pytest.approx(math.log(4), abs=1e-12)
    assert aq.lcs_length(["a", "b", "c", "d"], ["a", "c", "d", "e"]) == 3
    assert aq.rouge_lcs_recall("a b c d", "a c d e") == 0.75
    with pytest.raises(aq.Error):
        aq.rouge_lcs_recall("", "a")


def test_topic_diversity_and_errors():
    assert aq.topic_diversity([0.5, 0.25, 0.25]) == pytest.approx(1.5 * math.log(2), abs=1e-12)
    with pytest.raises(aq.Error):
        aq.topic_diversity([0.5, 0.4])


def test_metrics_and_folds():
    labels = [1, 1, 1, 0, 1, 1, 0, 0, 0, 0]
    scores = [1, 1, 1, 0.5, -1, -1, -2, -2, -2, -2]
    m = aq.metrics(labels, scores)
    assert m["precision"] == pytest.approx(0.75)
    assert m["recall"] == pytest.approx(0.6)
    assert m["accuracy"] == pytest.approx(0.7)
    assert m["confusion"] == {"tp": 3, "fp": 1, "fn": 2, "tn": 4}
    assert aq.roc_area([1, 0, 1, 0], [0.9, 0.8, 0.7, 0.6]) == 0.75
    assert aq.roc_area([1, 1], [0.1, 0.2]) is None

    folds = aq.stratified_folds([i % 2 for i in range(100)], 10, 1)
    assert len(folds) == 10
    assert all(len(test) == 10 for _, test in folds)
    with pytest.raises(aq.ValidationError):
        aq.stratified_folds([1, 0, 1, 0], 1)


def test_chi_square_and_information_gain():
    assert aq.chi_square_2x2([[20, 10], [10, 20]]) == pytest.approx(20 / 3)
    assert aq.information_gain_2x2([[50, 0], [0, 50]]) == pytest.approx(1.0, abs=1e-12)


def test_fit_lda_single_topic():
    docs = [["apple", "pie", "apple"], ["pie", "apple", "fruit", "fruit"]]
    theta = aq.fit_lda(docs, 1, iterations=20, burn_in=5)
    assert theta == [[1.0], [1.0]]


def test_synthetic_run(tmp_path):
    hidden = aq.generate_synthetic(tmp_path / "synth", records=160, seed=2)
    assert len(hidden) == 160
    assert set(aq.planted_feature_names()) >= {"word_count", "liwc_cause"}

    conf = tmp_path / "run.conf"
    conf.write_text(
        "\n".join(
            [
                "corpus = synth/corpus.jsonl",
                "hierarchy = synth/hierarchy.tsv",
                "ngrams = synth/reference_corpus.txt",
                f"lexicon = {DATA / 'liwc_demo.dic'}",
                f"dictionary = {DATA / 'dictionary.txt'}",
                f"function_words = {DATA / 'function_words.txt'}",
                f"tag_lexicon = {DATA / 'tag_lexicon.tsv'}",
                "topics = 3",
                "folds = 3",
                "lda_iterations = 40",
                "lda_burn_in = 10",
                "epochs = 5",
                "output = out",
            ]
        )
        + "\n"
    )
    result = aq.run_experiment(conf, {"classifier": "both"})
    assert set(result["reports"]) == {"svm", "logistic"}
    assert result["leakage_violations"] == 0
    assert 0.0 <= result["reports"]["svm"]["accuracy"] <= 1.0

    features = aq.load_features(tmp_path / "out" / "features.csv")
    assert len(features["rows"]) == result["records"]
    ranks = aq.rank_features(tmp_path / "out" / "features.csv")
    assert [r[0] for r in ranks] == [r[0] for r in result["rankings"]]

    with pytest.raises(aq.ValidationError):
        aq.run_experiment(conf, {"folds": "1"})
