#include <doctest.h>

#include <cmath>

#include "answerability/classifier.hpp"
#include "answerability/error.hpp"
#include "answerability/random.hpp"
#include "test_support.hpp"

using namespace answerability;

namespace {

// Two Gaussian blobs in `dims` dimensions, separated along the first axis.
Dataset blobs(std::size_t n, std::size_t dims, double gap, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  for (std::size_t j = 0; j < dims; ++j) d.names.push_back("f" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = i % 2 == 0;
    std::vector<double> row(dims);
    for (double& x : row) {
      // Box-Muller on the portable uniform.
      const double u1 = 1.0 - uniform01(rng), u2 = uniform01(rng);
      x = std::sqrt(-2 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
    row[0] += pos ? gap : -gap;
    d.rows.push_back(row);
    d.ids.push_back("r" + std::to_string(i));
    d.labels.push_back(pos ? Answer::kAnswered : Answer::kOpen);
  }
  return d;
}

double accuracy(const LinearModel& m, const Dataset& d) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.size(); ++i) ok += predict(m, std::span<const double>(d.rows[i])).label == d.labels[i];
  return static_cast<double>(ok) / static_cast<double>(d.size());
}

LinearModel fixed_model(std::vector<double> w, double b) {
  LinearModel m;
  for (std::size_t j = 0; j < w.size(); ++j) m.names.push_back("f" + std::to_string(j));
  m.standardizer.mean.assign(w.size(), 0.0);
  m.standardizer.stddev.assign(w.size(), 1.0);
  m.weights = std::move(w);
  m.bias = b;
  return m;
}

}  // namespace

TEST_CASE("loss names") {
  CHECK(parse_loss("svm") == Loss::kHinge);
  CHECK(parse_loss("hinge") == Loss::kHinge);
  CHECK(parse_loss("lr") == Loss::kLogistic);
  CHECK(parse_loss("logistic") == Loss::kLogistic);
  CHECK_THROWS_AS(parse_loss("tree"), ValidationError);
  CHECK(classifier_name(Loss::kHinge) == "svm");
  CHECK(classifier_name(Loss::kLogistic) == "logistic");
}

TEST_CASE("sigmoid of a zero-weight model is one half") {
  CHECK(sigmoid(0.0) == 0.5);
  const LinearModel m = fixed_model({0.0, 0.0}, 0.0);
  CHECK(sigmoid(m.decision(std::vector<double>{3.0, -7.0})) == 0.5);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(800.0) == 1.0);
}

TEST_CASE("predict examples") {
  const LinearModel m = fixed_model({1.0, 0.0}, 0.0);
  const Prediction p = predict(m, std::vector<double>{2.0, 1.0});
  CHECK(p.score == 2.0);
  CHECK(p.label == Answer::kAnswered);
  const Prediction bias_only = predict(fixed_model({0.0, 0.0}, -1.0), std::vector<double>{5.0, 5.0});
  CHECK(bias_only.score == -1.0);
  CHECK(bias_only.label == Answer::kOpen);
  const Prediction tie = predict(m, std::vector<double>{0.0, 9.0});
  CHECK(tie.score == 0.0);
  CHECK(tie.label == Answer::kOpen);

  FeatureVector fv{{"f0", "other"}, {1.0, 1.0}};
  CHECK_THROWS_AS(predict(m, fv), ValidationError);
  CHECK_THROWS_AS(predict(m, std::vector<double>{1.0}), ValidationError);
  fv.names = m.names;
  CHECK(predict(m, fv).score == 1.0);
}

TEST_CASE("two separable points are fitted exactly") {
  Dataset d;
  d.names = {"x"};
  d.ids = {"a", "b"};
  d.rows = {{1.0}, {-1.0}};
  d.labels = {Answer::kAnswered, Answer::kOpen};
  for (Loss loss : {Loss::kHinge, Loss::kLogistic}) {
    TrainOptions o;
    o.lambda = 0.01;
    const LinearModel m = train(d, loss, o);
    CHECK(accuracy(m, d) == 1.0);
  }
}

TEST_CASE("training errors") {
  Dataset d = blobs(20, 2, 2.0, 1);
  Dataset one_class = d;
  for (auto& l : one_class.labels) l = Answer::kOpen;
  CHECK_THROWS_AS(train(one_class, Loss::kHinge, {}), ValidationError);
  Dataset bad = d;
  bad.rows[3][1] = std::nan("");
  try {
    train(bad, Loss::kLogistic, {});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("f1") != std::string::npos);
    CHECK(msg.find("r3") != std::string::npos);
  }
  TrainOptions o;
  o.lambda = 0;
  CHECK_THROWS_AS(train(d, Loss::kHinge, o), ValidationError);
}

TEST_CASE("blobs are learned and training is deterministic") {
  const Dataset d = blobs(400, 5, 1.5, 3);
  for (Loss loss : {Loss::kHinge, Loss::kLogistic}) {
    TrainOptions o;
    o.epochs = 30;
    const LinearModel a = train(d, loss, o);
    const LinearModel b = train(d, loss, o);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
    CHECK(accuracy(a, d) > 0.85);
    CHECK(std::abs(a.weights[0]) > std::abs(a.weights[1]));
  }
}

TEST_CASE("constant learning-rate schedule also converges") {
  const Dataset d = blobs(200, 3, 2.0, 9);
  TrainOptions o;
  o.schedule = LearningRate::kConstant;
  o.eta0 = 0.01;
  o.epochs = 20;
  CHECK(accuracy(train(d, Loss::kLogistic, o), d) > 0.9);
}

TEST_CASE("property: standardization makes training invariant to feature scaling") {
  const Dataset d = blobs(200, 3, 1.0, 5);
  Dataset scaled = d;
  for (auto& row : scaled.rows) {
    row[0] *= 4.0;
    row[2] *= 0.25;
  }
  TrainOptions o;
  o.epochs = 10;
  for (Loss loss : {Loss::kHinge, Loss::kLogistic}) {
    const LinearModel a = train(d, loss, o);
    const LinearModel b = train(scaled, loss, o);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
  }
  Dataset affine = d;
  for (auto& row : affine.rows) row[1] = 1000.0 + 37.0 * row[1];
  const LinearModel a = train(d, Loss::kHinge, o);
  const LinearModel c = train(affine, Loss::kHinge, o);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double sa = predict(a, std::span<const double>(d.rows[i])).score;
    const double sc = predict(c, std::span<const double>(affine.rows[i])).score;
    CHECK(sa == doctest::Approx(sc).epsilon(1e-6));
  }
}

TEST_CASE("standardizer: population stddev, constant columns get 1") {
  const std::vector<std::vector<double>> rows = {{1.0, 5.0}, {3.0, 5.0}};
  const Standardizer s = Standardizer::fit(rows, 2);
  CHECK(s.mean == std::vector<double>{2.0, 5.0});
  CHECK(s.stddev == std::vector<double>{1.0, 1.0});
  CHECK(s.apply(std::vector<double>{3.0, 6.0}) == std::vector<double>{1.0, 1.0});
}

TEST_CASE("property: gradients match central finite differences") {
  Rng rng(17);
  const double lambda = 0.1, h = 1e-6;
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dims = 1 + uniform_index(rng, 6);
    std::vector<double> w(dims), x(dims), gw(dims);
    for (auto& v : w) v = 2 * uniform01(rng) - 1;
    for (auto& v : x) v = 4 * uniform01(rng) - 2;
    const double b = 2 * uniform01(rng) - 1;
    const int y = uniform01(rng) < 0.5 ? -1 : 1;
    for (Loss loss : {Loss::kHinge, Loss::kLogistic}) {
      double margin = b;
      for (std::size_t j = 0; j < dims; ++j) margin += w[j] * x[j];
      if (loss == Loss::kHinge && std::abs(1.0 - y * margin) < 1e-3) continue;
      double gb = 0;
      example_gradient(loss, w, b, x, y, lambda, gw, gb);
      for (std::size_t j = 0; j <= dims; ++j) {
        std::vector<double> wp = w, wm = w;
        double bp = b, bm = b;
        if (j < dims) {
          wp[j] += h;
          wm[j] -= h;
        } else {
          bp += h;
          bm -= h;
        }
        const double numeric = (example_objective(loss, wp, bp, x, y, lambda) -
                                example_objective(loss, wm, bm, x, y, lambda)) / (2 * h);
        const double analytic = j < dims ? gw[j] : gb;
        CHECK(std::abs(numeric - analytic) <= 1e-4 * std::max(1.0, std::abs(analytic)));
      }
      ++checked;
    }
  }
  CHECK(checked > 350);
}

TEST_CASE("model file round-trip") {
  const Dataset d = blobs(60, 3, 2.0, 21);
  TrainOptions o;
  o.epochs = 5;
  o.seed = 77;
  const LinearModel m = train(d, Loss::kLogistic, o);
  const auto dir = test_support::scratch_dir("model");
  save_model(m, dir / "m.json");
  const LinearModel back = load_model(dir / "m.json");
  CHECK(back.loss == m.loss);
  CHECK(back.names == m.names);
  CHECK(back.weights == m.weights);
  CHECK(back.bias == m.bias);
  CHECK(back.standardizer.mean == m.standardizer.mean);
  CHECK(back.standardizer.stddev == m.standardizer.stddev);
  CHECK(back.hyper.seed == 77);
  test_support::write_file(dir / "bad.json", "{\"format\": \"something-else\"}");
  CHECK_THROWS_AS(load_model(dir / "bad.json"), ValidationError);
  test_support::write_file(dir / "broken.json", "{not json");
  CHECK_THROWS_AS(load_model(dir / "broken.json"), ValidationError);
  CHECK_THROWS_AS(load_model(dir / "missing.json"), IoError);
}
