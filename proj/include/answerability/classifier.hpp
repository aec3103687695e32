#pragma once

// L2-regularized linear classifiers (hinge = linear SVM, logistic = LR)
// trained by seeded stochastic subgradient descent on standardized features.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "answerability/corpus.hpp"
#include "answerability/features.hpp"

namespace answerability {

enum class Loss { kHinge, kLogistic };

std::string_view to_string(Loss loss);
// Accepts "svm"/"hinge" and "logistic"/"lr". Throws ValidationError otherwise.
Loss parse_loss(std::string_view s);
// "svm" or "logistic"; used for artifact names.
std::string_view classifier_name(Loss loss);

enum class LearningRate {
  kInverseScaling,  // eta_t = 1 / (lambda * t)
  kConstant,        // eta_t = eta0
};

struct TrainOptions {
  double lambda = 1e-4;
  int epochs = 100;
  LearningRate schedule = LearningRate::kInverseScaling;
  double eta0 = 0.01;  // only for kConstant
  std::uint64_t seed = 1;
};

// Per-feature (mean, population stddev); zero-variance columns get stddev 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  static Standardizer fit(std::span<const std::vector<double>> rows, std::size_t dims);
  std::vector<double> apply(std::span<const double> x) const;
};

struct LinearModel {
  Loss loss = Loss::kHinge;
  std::vector<std::string> names;
  std::vector<double> weights;
  double bias = 0.0;
  Standardizer standardizer;
  TrainOptions hyper;

  // w . x + b on an already standardized input.
  double decision(std::span<const double> standardized) const;
};

// Objective for one example with y in {-1, +1}:
//   lambda/2 (|w|^2 + b^2) + loss(y (w.x + b))
// The bias is regularized like a weight on a constant feature.
double example_objective(Loss loss, std::span<const double> w, double b, std::span<const double> x,
                         int y, double lambda);
// (Sub)gradient of example_objective. grad_w must have |w| entries.
void example_gradient(Loss loss, std::span<const double> w, double b, std::span<const double> x,
                      int y, double lambda, std::span<double> grad_w, double& grad_b);

inline double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// Throws ValidationError if only one class is present or a value is not
// finite (naming the feature and record).
LinearModel train(const Dataset& data, Loss loss, const TrainOptions& options);

struct Prediction {
  Answer label = Answer::kOpen;
  double score = 0.0;
};

// answered iff score > 0 (a zero score is open).
inline Answer label_for_score(double score) { return score > 0.0 ? Answer::kAnswered : Answer::kOpen; }

// Throws ValidationError when the feature names differ from the model's.
Prediction predict(const LinearModel& model, const FeatureVector& fv);
// Raw feature values in model name order.
Prediction predict(const LinearModel& model, std::span<const double> raw_values);

void save_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_model(const std::filesystem::path& path);

}  // namespace answerability
