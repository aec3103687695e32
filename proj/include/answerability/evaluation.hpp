#pragma once

// Classification metrics, stratified cross-validation and feature ranking.
// The positive class is `answered` throughout.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "answerability/classifier.hpp"
#include "answerability/corpus.hpp"
#include "answerability/features.hpp"

namespace answerability {

struct ConfusionMatrix {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::uint64_t total() const { return tp + fp + fn + tn; }
};

struct ClassMetrics {
  double precision = 0, recall = 0, f_score = 0;
  std::uint64_t support = 0;
};

struct Metrics {
  std::size_t n = 0;
  ConfusionMatrix confusion;
  double accuracy = 0;
  double precision = 0;  // answered class
  double recall = 0;
  double f_score = 0;
  std::optional<double> roc_area;  // absent when one class is missing
  ClassMetrics answered, open;
  ClassMetrics weighted;  // support-weighted average over both classes
};

// Harmonic mean; 0 when p + r == 0.
double f_score(double precision, double recall);

// P(score+ > score-) + 1/2 P(tie), via average ranks (Mann-Whitney U).
std::optional<double> roc_area(std::span<const Answer> labels, std::span<const double> scores);

// A prediction is `answered` iff its score is > 0.
Metrics compute_metrics(std::span<const Answer> labels, std::span<const double> scores);

struct FoldSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Each class is shuffled (seeded) and dealt round-robin over the k folds.
// Throws ValidationError if either class has fewer than k examples.
std::vector<FoldSplit> stratified_folds(std::span<const Answer> labels, int k, std::uint64_t seed);

struct FeatureRank {
  std::string name;
  double chi_square = 0;
  double info_gain = 0;  // bits
};

struct EvalReport {
  std::string classifier;
  std::vector<Metrics> per_fold;
  Metrics aggregate;  // example-weighted means over folds; confusion summed
  std::vector<FeatureRank> feature_rankings;
};

// Scores for split.test, in that order.
using FoldScorer = std::function<std::vector<double>(std::size_t fold, const FoldSplit& split)>;

EvalReport cross_validate(std::span<const Answer> labels, int k, std::uint64_t seed,
                          const FoldScorer& scorer, int workers = 1);

// Standardizer + linear model fitted on each training portion.
EvalReport cross_validate(const Dataset& data, int k, Loss loss, const TrainOptions& options,
                          std::uint64_t seed, int workers = 1);

// Contingency table [feature bin][label]: rows x=0/1, columns open/answered.
using Table2x2 = std::array<std::array<double, 2>, 2>;

// N (ad - bc)^2 / (r1 r2 c1 c2); 0 when a marginal is empty.
double chi_square_2x2(const Table2x2& table);
// H(label) - H(label | bin), in bits.
double information_gain_2x2(const Table2x2& table);

// Bins each feature at its median (value > median -> 1) and scores it.
// Sorted by chi_square descending, then info_gain, then name.
// Throws ValidationError unless there are >= 2 examples of both classes present.
std::vector<FeatureRank> rank_features(const Dataset& data);

std::string format_report(const EvalReport& report);
// `key value` lines, machine readable.
std::string format_report_kv(const EvalReport& report);
std::string format_rankings(std::span<const FeatureRank> rankings);

}  // namespace answerability
