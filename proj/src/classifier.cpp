#include "answerability/classifier.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "answerability/error.hpp"
#include "answerability/random.hpp"

namespace answerability {
namespace {

using nlohmann::json;

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// log(1 + exp(-m)) without overflow.
double log_loss(double m) { return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m)); }

// d loss / d margin
double loss_slope(Loss loss, double margin) {
  if (loss == Loss::kHinge) return margin < 1.0 ? -1.0 : 0.0;
  return -sigmoid(-margin);
}

int sign_of(Answer a) { return a == Answer::kAnswered ? 1 : -1; }

}  // namespace

std::string_view to_string(Loss loss) { return loss == Loss::kHinge ? "hinge" : "logistic"; }

std::string_view classifier_name(Loss loss) { return loss == Loss::kHinge ? "svm" : "logistic"; }

Loss parse_loss(std::string_view s) {
  if (s == "svm" || s == "hinge") return Loss::kHinge;
  if (s == "logistic" || s == "lr") return Loss::kLogistic;
  throw ValidationError("model_eval", "unknown classifier '" + std::string(s) + "' (svm|logistic)");
}

Standardizer Standardizer::fit(std::span<const std::vector<double>> rows, std::size_t dims) {
  Standardizer s;
  s.mean.assign(dims, 0.0);
  s.stddev.assign(dims, 1.0);
  if (rows.empty()) return s;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows)
    for (std::size_t j = 0; j < dims; ++j) s.mean[j] += r[j];
  for (double& m : s.mean) m /= n;
  std::vector<double> ss(dims, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < dims; ++j) ss[j] += (r[j] - s.mean[j]) * (r[j] - s.mean[j]);
  for (std::size_t j = 0; j < dims; ++j) {
    const double sd = std::sqrt(ss[j] / n);
    s.stddev[j] = sd > 1e-12 * std::max(1.0, std::abs(s.mean[j])) ? sd : 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / stddev[j];
  return out;
}

double LinearModel::decision(std::span<const double> standardized) const {
  return dot(weights, standardized) + bias;
}

double example_objective(Loss loss, std::span<const double> w, double b, std::span<const double> x,
                         int y, double lambda) {
  const double margin = y * (dot(w, x) + b);
  const double reg = 0.5 * lambda * (dot(w, w) + b * b);
  return reg + (loss == Loss::kHinge ? std::max(0.0, 1.0 - margin) : log_loss(margin));
}

void example_gradient(Loss loss, std::span<const double> w, double b, std::span<const double> x,
                      int y, double lambda, std::span<double> grad_w, double& grad_b) {
  const double slope = loss_slope(loss, y * (dot(w, x) + b));
  for (std::size_t j = 0; j < w.size(); ++j) grad_w[j] = lambda * w[j] + slope * y * x[j];
  grad_b = lambda * b + slope * y;
}

LinearModel train(const Dataset& data, Loss loss, const TrainOptions& options) {
  if (!(options.lambda > 0.0)) throw ValidationError("model_eval", "lambda must be positive");
  if (options.epochs < 1) throw ValidationError("model_eval", "epochs must be >= 1");
  const std::size_t dims = data.names.size();
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (data.labels[i] == Answer::kAnswered ? has_pos : has_neg) = true;
    if (data.rows[i].size() != dims)
      throw ValidationError("model_eval", "record " + data.ids[i] + ": row length does not match names");
    for (std::size_t j = 0; j < dims; ++j) {
      if (!std::isfinite(data.rows[i][j]))
        throw ValidationError("model_eval", "non-finite value for feature " + data.names[j] +
                                                " in record " + data.ids[i]);
    }
  }
  if (!has_pos || !has_neg) throw ValidationError("model_eval", "training data must contain both classes");

  LinearModel model;
  model.loss = loss;
  model.names = data.names;
  model.hyper = options;
  model.standardizer = Standardizer::fit(data.rows, dims);
  model.weights.assign(dims, 0.0);

  std::vector<std::vector<double>> xs;
  xs.reserve(data.size());
  for (const auto& r : data.rows) xs.push_back(model.standardizer.apply(r));

  const double lambda = options.lambda;
  // The regularized optimum lies in this ball, so projecting onto it is free.
  const double radius = loss == Loss::kHinge ? 1.0 / std::sqrt(lambda) : std::sqrt(2.0 * std::log(2.0) / lambda);

  Rng rng(options.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double>& w = model.weights;
  double& b = model.bias;
  // The returned model is the mean iterate over the second half of the
  // epochs; the last iterate alone is too noisy for small lambda.
  const int average_from = options.epochs / 2;
  std::vector<double> w_sum(dims, 0.0);
  double b_sum = 0.0;
  std::uint64_t n_sum = 0;
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    for (std::size_t i : order) {
      ++t;
      const double eta = options.schedule == LearningRate::kInverseScaling
                             ? 1.0 / (lambda * static_cast<double>(t))
                             : options.eta0;
      const int y = sign_of(data.labels[i]);
      const std::vector<double>& x = xs[i];
      const double slope = loss_slope(loss, y * (dot(w, x) + b));
      const double shrink = 1.0 - eta * lambda;
      for (std::size_t j = 0; j < dims; ++j) w[j] = shrink * w[j] - eta * slope * y * x[j];
      b = shrink * b - eta * slope * y;
      const double norm = std::sqrt(dot(w, w) + b * b);
      if (norm > radius) {
        const double scale = radius / norm;
        for (double& wj : w) wj *= scale;
        b *= scale;
      }
      if (epoch >= average_from) {
        for (std::size_t j = 0; j < dims; ++j) w_sum[j] += w[j];
        b_sum += b;
        ++n_sum;
      }
    }
  }
  for (std::size_t j = 0; j < dims; ++j) w[j] = w_sum[j] / static_cast<double>(n_sum);
  b = b_sum / static_cast<double>(n_sum);
  return model;
}

Prediction predict(const LinearModel& model, std::span<const double> raw_values) {
  if (raw_values.size() != model.weights.size())
    throw ValidationError("model_eval", "feature vector length does not match the model");
  const double score = model.decision(model.standardizer.apply(raw_values));
  return {label_for_score(score), score};
}

Prediction predict(const LinearModel& model, const FeatureVector& fv) {
  if (fv.names != model.names) {
    std::string detail;
    if (fv.names.size() != model.names.size()) {
      detail = std::to_string(fv.names.size()) + " features vs " + std::to_string(model.names.size());
    } else {
      for (std::size_t j = 0; j < fv.names.size(); ++j) {
        if (fv.names[j] != model.names[j]) {
          detail = "'" + fv.names[j] + "' vs '" + model.names[j] + "'";
          break;
        }
      }
    }
    throw ValidationError("model_eval", "feature names do not match the model: " + detail);
  }
  return predict(model, std::span<const double>(fv.values));
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
  json j;
  j["format"] = "answerability-linear-model";
  j["version"] = 1;
  j["loss"] = std::string(to_string(model.loss));
  j["names"] = model.names;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["mean"] = model.standardizer.mean;
  j["stddev"] = model.standardizer.stddev;
  j["lambda"] = model.hyper.lambda;
  j["epochs"] = model.hyper.epochs;
  j["schedule"] = model.hyper.schedule == LearningRate::kInverseScaling ? "inverse_scaling" : "constant";
  j["eta0"] = model.hyper.eta0;
  j["seed"] = model.hyper.seed;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("model_eval", "cannot write model: " + path.string());
  out << j.dump(1) << '\n';
}

LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("model_eval", "cannot open model: " + path.string());
  LinearModel m;
  try {
    json j = json::parse(in);
    if (j.value("format", "") != "answerability-linear-model")
      throw ValidationError("model_eval", path.string() + ": not a linear model file");
    m.loss = j.at("loss").get<std::string>() == "hinge" ? Loss::kHinge : Loss::kLogistic;
    m.names = j.at("names").get<std::vector<std::string>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.standardizer.mean = j.at("mean").get<std::vector<double>>();
    m.standardizer.stddev = j.at("stddev").get<std::vector<double>>();
    m.hyper.lambda = j.at("lambda").get<double>();
    m.hyper.epochs = j.at("epochs").get<int>();
    m.hyper.schedule = j.at("schedule").get<std::string>() == "constant" ? LearningRate::kConstant
                                                                         : LearningRate::kInverseScaling;
    m.hyper.eta0 = j.at("eta0").get<double>();
    m.hyper.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError("model_eval", path.string() + ": " + e.what());
  }
  const std::size_t n = m.names.size();
  if (m.weights.size() != n || m.standardizer.mean.size() != n || m.standardizer.stddev.size() != n)
    throw ValidationError("model_eval", path.string() + ": inconsistent vector lengths");
  return m;
}

}  // namespace answerability
