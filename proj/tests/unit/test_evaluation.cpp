#include <doctest.h>

#include <cmath>
#include <set>

#include "answerability/error.hpp"
#include "answerability/evaluation.hpp"
#include "oracles.hpp"

using namespace answerability;

namespace {

constexpr Answer A = Answer::kAnswered;
constexpr Answer O = Answer::kOpen;

std::vector<Answer> balanced(std::size_t n) {
  std::vector<Answer> l;
  for (std::size_t i = 0; i < n; ++i) l.push_back(i % 2 == 0 ? A : O);
  return l;
}

}  // namespace

TEST_CASE("metrics example: TP=3 FP=1 FN=2 TN=4") {
  std::vector<Answer> labels;
  std::vector<double> scores;
  for (int i = 0; i < 3; ++i) labels.push_back(A), scores.push_back(1.0);
  labels.push_back(O), scores.push_back(0.5);
  for (int i = 0; i < 2; ++i) labels.push_back(A), scores.push_back(-1.0);
  for (int i = 0; i < 4; ++i) labels.push_back(O), scores.push_back(-2.0);
  const Metrics m = compute_metrics(labels, scores);
  CHECK(m.confusion.tp == 3);
  CHECK(m.confusion.fp == 1);
  CHECK(m.confusion.fn == 2);
  CHECK(m.confusion.tn == 4);
  CHECK(m.precision == doctest::Approx(0.75));
  CHECK(m.recall == doctest::Approx(0.6));
  CHECK(m.accuracy == doctest::Approx(0.7));
  CHECK(m.f_score == doctest::Approx(2 * 0.75 * 0.6 / 1.35));
  CHECK(m.open.precision == doctest::Approx(4.0 / 6));
  CHECK(m.open.recall == doctest::Approx(0.8));
  CHECK(m.answered.support == 5);
  CHECK(m.open.support == 5);
  CHECK(m.weighted.precision == doctest::Approx(0.5 * 0.75 + 0.5 * 4.0 / 6));
  CHECK_THROWS_AS(compute_metrics(labels, std::vector<double>{1.0}), PreconditionError);
  CHECK_THROWS_AS(compute_metrics(std::vector<Answer>{}, std::vector<double>{}), PreconditionError);
}

TEST_CASE("f_score edge cases") {
  CHECK(f_score(0, 0) == 0);
  CHECK(f_score(1, 1) == 1);
  CHECK(f_score(0.5, 1) == doctest::Approx(2.0 / 3));
}

TEST_CASE("roc_area examples") {
  CHECK(roc_area(std::vector<Answer>{A, O, A, O}, std::vector<double>{0.9, 0.8, 0.7, 0.6}) == 0.75);
  CHECK(roc_area(std::vector<Answer>{A, A, O, O}, std::vector<double>{4, 3, 2, 1}) == 1.0);
  CHECK(roc_area(std::vector<Answer>{A, A, O, O}, std::vector<double>{1, 1, 1, 1}) == 0.5);
  CHECK_FALSE(roc_area(std::vector<Answer>{A, A}, std::vector<double>{1, 2}).has_value());
  const Metrics m = compute_metrics(std::vector<Answer>{O, O}, std::vector<double>{-1, 1});
  CHECK_FALSE(m.roc_area.has_value());
  CHECK(m.accuracy == 0.5);
}

TEST_CASE("property: rank AUC equals the pairwise oracle, with ties; label swap complements") {
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 199);
    std::vector<Answer> labels(n);
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = uniform01(rng) < 0.4 ? A : O;
      scores[i] = static_cast<double>(uniform_index(rng, 12)) / 4.0;
    }
    labels[0] = A;
    labels[1] = O;
    const double auc = *roc_area(labels, scores);
    CHECK(std::abs(auc - oracles::pairwise_auc(labels, scores)) < 1e-12);
    std::vector<Answer> swapped = labels;
    for (auto& l : swapped) l = l == A ? O : A;
    CHECK(std::abs(*roc_area(swapped, scores) - (1.0 - auc)) < 1e-12);
  }
}

TEST_CASE("stratified folds: arithmetic, coverage, errors") {
  const auto labels = balanced(100);
  const auto folds = stratified_folds(labels, 10, 1);
  CHECK(folds.size() == 10);
  std::multiset<std::size_t> seen;
  for (const auto& f : folds) {
    CHECK(f.test.size() == 10);
    CHECK(f.train.size() == 90);
    std::size_t pos = 0;
    for (auto i : f.test) pos += labels[i] == A, seen.insert(i);
    CHECK(pos == 5);
    std::set<std::size_t> test(f.test.begin(), f.test.end());
    for (auto i : f.train) CHECK_FALSE(test.count(i));
  }
  CHECK(seen.size() == 100);
  CHECK(std::set<std::size_t>(seen.begin(), seen.end()).size() == 100);

  const auto again = stratified_folds(labels, 10, 1);
  for (std::size_t f = 0; f < 10; ++f) CHECK(again[f].test == folds[f].test);
  bool differs = false;
  const auto other = stratified_folds(labels, 10, 2);
  for (std::size_t f = 0; f < 10; ++f) differs |= other[f].test != folds[f].test;
  CHECK(differs);

  CHECK_THROWS_AS(stratified_folds(labels, 1, 1), ValidationError);
  std::vector<Answer> skewed(30, O);
  for (int i = 0; i < 4; ++i) skewed[i] = A;
  try {
    stratified_folds(skewed, 5, 1);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("5") != std::string::npos);
  }
  CHECK_NOTHROW(stratified_folds(skewed, 4, 1));
}

TEST_CASE("property: uneven class sizes spread fold sizes by at most one per class") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(uniform_index(rng, 9));
    const std::size_t pos = k + uniform_index(rng, 40), neg = k + uniform_index(rng, 40);
    std::vector<Answer> labels(pos, A);
    labels.insert(labels.end(), neg, O);
    shuffle(std::span<Answer>(labels), rng);
    std::size_t lo_p = SIZE_MAX, hi_p = 0, lo_n = SIZE_MAX, hi_n = 0;
    for (const auto& f : stratified_folds(labels, k, trial)) {
      std::size_t p = 0;
      for (auto i : f.test) p += labels[i] == A;
      lo_p = std::min(lo_p, p), hi_p = std::max(hi_p, p);
      lo_n = std::min(lo_n, f.test.size() - p), hi_n = std::max(hi_n, f.test.size() - p);
    }
    CHECK(hi_p - lo_p <= 1);
    CHECK(hi_n - lo_n <= 1);
  }
}

TEST_CASE("cross_validate with an oracle scorer; aggregation invariants") {
  const auto labels = balanced(100);
  const FoldScorer oracle = [&](std::size_t, const FoldSplit& s) {
    std::vector<double> out;
    for (auto i : s.test) out.push_back(labels[i] == A ? 1.0 : -1.0);
    return out;
  };
  const EvalReport r = cross_validate(labels, 10, 1, oracle);
  CHECK(r.per_fold.size() == 10);
  CHECK(r.aggregate.accuracy == 1.0);
  CHECK(r.aggregate.roc_area == std::optional<double>(1.0));
  CHECK(r.aggregate.n == 100);

  Rng rng(2);
  std::vector<double> noise(labels.size());
  for (auto& x : noise) x = uniform01(rng) - 0.4;
  const FoldScorer noisy = [&](std::size_t, const FoldSplit& s) {
    std::vector<double> out;
    for (auto i : s.test) out.push_back(noise[i]);
    return out;
  };
  const EvalReport a = cross_validate(labels, 5, 9, noisy, 1);
  const EvalReport b = cross_validate(labels, 5, 9, noisy, 3);
  CHECK(format_report_kv(a) == format_report_kv(b));
  const Metrics& m = a.aggregate;
  CHECK(m.confusion.total() == 100);
  CHECK(m.accuracy == doctest::Approx(static_cast<double>(m.confusion.tp + m.confusion.tn) / 100));
  CHECK(std::abs(m.f_score - f_score(m.precision, m.recall)) < 1e-12);
  double weighted_acc = 0;
  for (const auto& f : a.per_fold) weighted_acc += f.accuracy * static_cast<double>(f.n) / 100;
  CHECK(m.accuracy == doctest::Approx(weighted_acc).epsilon(1e-12));

  const FoldScorer wrong_size = [](std::size_t, const FoldSplit&) { return std::vector<double>{1.0}; };
  CHECK_THROWS_AS(cross_validate(labels, 10, 1, wrong_size), PreconditionError);
}

TEST_CASE("cross_validate on a dataset is deterministic") {
  Dataset d;
  d.names = {"x", "noise"};
  Rng rng(4);
  for (int i = 0; i < 80; ++i) {
    const bool pos = i % 2 == 0;
    d.ids.push_back("q" + std::to_string(i));
    d.rows.push_back({(pos ? 1.0 : -1.0) + uniform01(rng), uniform01(rng)});
    d.labels.push_back(pos ? A : O);
  }
  TrainOptions o;
  o.epochs = 10;
  const EvalReport r1 = cross_validate(d, 10, Loss::kHinge, o, 5);
  const EvalReport r2 = cross_validate(d, 10, Loss::kHinge, o, 5);
  CHECK(r1.classifier == "svm");
  CHECK(format_report(r1) == format_report(r2));
  CHECK(format_report_kv(r1) == format_report_kv(r2));
  CHECK(r1.aggregate.accuracy > 0.9);
  CHECK(format_report(r1).find("aggregate") != std::string::npos);
  CHECK(format_report_kv(r1).find("aggregate.accuracy ") != std::string::npos);
  CHECK(format_report_kv(r1).find("fold9.roc_area ") != std::string::npos);
}

TEST_CASE("chi-square and information gain examples") {
  CHECK(chi_square_2x2({{{20, 10}, {10, 20}}}) == doctest::Approx(20.0 / 3).epsilon(1e-12));
  CHECK(std::abs(chi_square_2x2({{{20, 10}, {10, 20}}}) - oracles::chi_square_observed_expected({{{20, 10}, {10, 20}}})) <
        1e-9);
  CHECK(std::abs(information_gain_2x2({{{50, 0}, {0, 50}}}) - 1.0) < 1e-12);
  CHECK(std::abs(chi_square_2x2({{{10, 20}, {30, 60}}})) < 1e-9);
  CHECK(std::abs(information_gain_2x2({{{10, 20}, {30, 60}}})) < 1e-9);
  CHECK(chi_square_2x2({{{0, 0}, {10, 20}}}) == 0.0);
  CHECK(information_gain_2x2({{{0, 0}, {10, 20}}}) == 0.0);
}

TEST_CASE("property: chi-square and IG match oracles and ignore label swaps") {
  Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    Table2x2 t;
    for (auto& row : t)
      for (auto& c : row) c = static_cast<double>(1 + uniform_index(rng, 200));
    const double chi = chi_square_2x2(t), ig = information_gain_2x2(t);
    CHECK(std::abs(chi - oracles::chi_square_observed_expected(t)) < 1e-9 * std::max(1.0, chi));
    CHECK(std::abs(ig - oracles::mutual_information_bits(t)) < 1e-12);
    const Table2x2 swapped = {{{t[0][1], t[0][0]}, {t[1][1], t[1][0]}}};
    CHECK(std::abs(chi_square_2x2(swapped) - chi) < 1e-9 * std::max(1.0, chi));
    CHECK(std::abs(information_gain_2x2(swapped) - ig) < 1e-12);
    CHECK(ig >= 0.0);
    CHECK(ig <= 1.0);
  }
}

TEST_CASE("rank_features orders by chi-square and handles constants") {
  Dataset d;
  d.names = {"constant", "perfect", "independent"};
  for (int i = 0; i < 40; ++i) {
    const bool pos = i % 2 == 0;
    d.ids.push_back("q" + std::to_string(i));
    d.rows.push_back({7.0, pos ? 5.0 : 1.0, (i / 2) % 2 == 0 ? 3.0 : 0.0});
    d.labels.push_back(pos ? A : O);
  }
  const auto ranks = rank_features(d);
  REQUIRE(ranks.size() == 3);
  CHECK(ranks[0].name == "perfect");
  CHECK(ranks[0].chi_square == doctest::Approx(40.0));
  CHECK(std::abs(ranks[0].info_gain - 1.0) < 1e-12);
  CHECK(ranks[1].name == "constant");
  CHECK(ranks[2].name == "independent");
  for (std::size_t i = 1; i < 3; ++i) {
    CHECK(std::abs(ranks[i].chi_square) < 1e-9);
    CHECK(std::abs(ranks[i].info_gain) < 1e-9);
  }
  const std::string text = format_rankings(ranks);
  CHECK(text.rfind("rank\tfeature\tchi_square\tinfo_gain_bits\n1\tperfect\t", 0) == 0);

  Dataset tiny = d.subset(std::vector<std::size_t>{0});
  CHECK_THROWS_AS(rank_features(tiny), ValidationError);
  Dataset one_class = d.subset(std::vector<std::size_t>{0, 2, 4});
  CHECK_THROWS_AS(rank_features(one_class), ValidationError);
}
