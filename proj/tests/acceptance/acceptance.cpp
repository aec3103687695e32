// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "answerability/classifier.hpp"
#include "answerability/evaluation.hpp"
#include "answerability/experiment.hpp"
#include "answerability/synthetic.hpp"
#include "answerability/text_features.hpp"
#include "answerability/topic_model.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace answerability;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failed = 0;

void criterion(int number, const char* title, double budget_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < budget_seconds;
  const bool pass = o.pass && in_time;
  if (!pass) ++g_failed;
  std::printf("%s criterion %d: %s | %s | %.2fs (budget %.0fs)%s\n", pass ? "PASS" : "FAIL", number, title,
              o.detail.c_str(), secs, budget_seconds, in_time ? "" : " OVER BUDGET");
  std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

constexpr double kEntropyTol = 1e-12;
constexpr double kAucTol = 1e-12;
constexpr double kGradRelTol = 1e-4;
constexpr double kThetaSumTol = 1e-9;
constexpr double kDominantMass = 0.8;
constexpr double kConfidentShare = 0.95;
constexpr double kChiTol = 1e-9;
constexpr double kIgPerfectTol = 1e-12;
constexpr double kIndependentTol = 1e-9;
constexpr double kMinAccuracy = 0.85;
constexpr std::size_t kTopRank = 8;

Outcome entropy_oracles() {
  Rng rng(101);
  const auto tagset = twitter_tagset();
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> tags(1 + uniform_index(rng, 40));
    const std::size_t alphabet = 1 + uniform_index(rng, tagset.size());
    for (auto& t : tags) t = std::string(tagset[uniform_index(rng, alphabet)]);
    worst = std::max(worst, std::abs(pos_diversity(tags) - oracles::symbol_entropy(tags)));

    std::vector<double> theta(1 + uniform_index(rng, 50));
    double total = 0;
    for (auto& x : theta) total += (x = uniform01(rng) < 0.1 ? 0.0 : uniform01(rng));
    if (total == 0) theta[0] = total = 1;
    for (auto& x : theta) x /= total;
    worst = std::max(worst, std::abs(topic_diversity(theta) - oracles::entropy(theta)));
  }
  double worst_uniform = 0;
  for (std::size_t n = 1; n <= 100; ++n) {
    const std::vector<double> theta(n, 1.0 / static_cast<double>(n));
    worst_uniform = std::max(worst_uniform, std::abs(topic_diversity(theta) - std::log(static_cast<double>(n))));
  }
  for (std::size_t n = 1; n <= tagset.size(); ++n) {
    std::vector<std::string> tags;
    for (std::size_t i = 0; i < n; ++i) tags.emplace_back(tagset[i]);
    worst_uniform = std::max(worst_uniform, std::abs(pos_diversity(tags) - std::log(static_cast<double>(n))));
  }
  return {worst <= kEntropyTol && worst_uniform <= kEntropyTol,
          "max |err| random " + fmt("%.2e", worst) + ", uniform " + fmt("%.2e", worst_uniform) + " (tol 1e-12)"};
}

Outcome lcs_oracle() {
  Rng rng(202);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "A", "B", "e"};
  int mismatches = 0, self_failures = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> x(uniform_index(rng, 11)), y(uniform_index(rng, 11));
    for (auto& t : x) t = vocab[uniform_index(rng, vocab.size())];
    for (auto& t : y) t = vocab[uniform_index(rng, vocab.size())];
    if (lcs_length(x, y) != oracles::exhaustive_lcs(x, y)) ++mismatches;
    if (!x.empty() && rouge_lcs_recall(TokenSequence{x, 0}, TokenSequence{x, 0}) != 1.0) ++self_failures;
  }
  return {mismatches == 0 && self_failures == 0,
          "500 pairs: " + std::to_string(mismatches) + " LCS mismatches, " + std::to_string(self_failures) +
              " self-recall failures"};
}

Outcome auc_oracle() {
  Rng rng(303);
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 199);
    std::vector<Answer> labels(n);
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = uniform01(rng) < 0.5 ? Answer::kAnswered : Answer::kOpen;
      scores[i] = uniform01(rng);
    }
    labels[0] = Answer::kAnswered;
    labels[1] = Answer::kOpen;
    // Inject ties: a third of the scores copy another score.
    for (std::size_t i = 0; i < n / 3; ++i) scores[uniform_index(rng, n)] = scores[uniform_index(rng, n)];
    worst = std::max(worst, std::abs(*roc_area(labels, scores) - oracles::pairwise_auc(labels, scores)));
  }
  return {worst <= kAucTol, "max |rank AUC - pairwise AUC| " + fmt("%.2e", worst) + " (tol 1e-12)"};
}

Outcome gradient_check() {
  Rng rng(404);
  const double h = 1e-6, lambda = 0.05;
  double worst = 0;
  int points = 0;
  for (Loss loss : {Loss::kLogistic, Loss::kHinge}) {
    int accepted = 0;
    while (accepted < 100) {
      const std::size_t dims = 1 + uniform_index(rng, 8);
      std::vector<double> w(dims), x(dims), gw(dims);
      for (auto& v : w) v = 2 * uniform01(rng) - 1;
      for (auto& v : x) v = 4 * uniform01(rng) - 2;
      const double b = 2 * uniform01(rng) - 1;
      const int y = uniform01(rng) < 0.5 ? -1 : 1;
      double margin = b;
      for (std::size_t j = 0; j < dims; ++j) margin += w[j] * x[j];
      if (loss == Loss::kHinge && std::abs(1.0 - y * margin) < 1e-3) continue;  // kink
      ++accepted;
      double gb = 0;
      example_gradient(loss, w, b, x, y, lambda, gw, gb);
      for (std::size_t j = 0; j <= dims; ++j) {
        std::vector<double> wp = w, wm = w;
        double bp = b, bm = b;
        (j < dims ? wp[j] : bp) += h;
        (j < dims ? wm[j] : bm) -= h;
        const double numeric =
            (example_objective(loss, wp, bp, x, y, lambda) - example_objective(loss, wm, bm, x, y, lambda)) / (2 * h);
        const double analytic = j < dims ? gw[j] : gb;
        worst = std::max(worst, std::abs(numeric - analytic) / std::max(1e-8, std::abs(analytic)));
      }
    }
    points += accepted;
  }
  return {worst < kGradRelTol,
          std::to_string(points) + " points, max relative error " + fmt("%.2e", worst) + " (tol 1e-4)"};
}

Outcome lda_invariants() {
  // 200 documents over V = 40 (20 words per family).
  const auto corpus = oracles::two_family_corpus(200, 20, 200, 505);
  LdaConfig config = LdaConfig::for_topics(2);
  bool conserved = true;
  int sweeps = 0;
  const LdaModel model = fit_lda(corpus.docs, config, [&](const SweepState& s) {
    ++sweeps;
    std::int64_t total = 0;
    for (int k = 0; k < s.num_topics; ++k) {
      std::int64_t column = 0;
      for (std::size_t v = 0; v < s.word_topic.size() / s.num_topics; ++v) {
        const auto c = s.word_topic[v * s.num_topics + k];
        if (c < 0) conserved = false;
        column += c;
      }
      if (column != s.topic_totals[k]) conserved = false;
      total += s.topic_totals[k];
    }
    if (total != s.total_tokens) conserved = false;
  });
  double worst_sum = 0;
  std::size_t confident = 0;
  std::map<int, std::map<int, int>> dominant_by_family;
  for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
    const auto& theta = model.doc_topic[d];
    double sum = 0;
    for (double p : theta) sum += p;
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    const auto top = std::max_element(theta.begin(), theta.end());
    if (*top > kDominantMass) ++confident;
    dominant_by_family[corpus.family[d]][static_cast<int>(top - theta.begin())]++;
  }
  auto majority = [](const std::map<int, int>& counts) {
    return std::max_element(counts.begin(), counts.end(), [](auto& a, auto& b) { return a.second < b.second; })
        ->first;
  };
  const bool distinct = majority(dominant_by_family[0]) != majority(dominant_by_family[1]);
  const double share = static_cast<double>(confident) / static_cast<double>(corpus.docs.size());
  return {conserved && sweeps == config.iterations && worst_sum <= kThetaSumTol && share >= kConfidentShare &&
              distinct,
          std::string("conservation ") + (conserved ? "ok" : "BROKEN") + " over " + std::to_string(sweeps) +
              " sweeps, max |sum theta - 1| " + fmt("%.1e", worst_sum) + ", docs with mass > 0.8: " +
              fmt("%.3f", share) + " (need 0.95), family topics " + (distinct ? "distinct" : "SAME")};
}

Outcome chi_ig_oracles() {
  Rng rng(606);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Table2x2 t;
    for (auto& row : t)
      for (auto& c : row) c = static_cast<double>(uniform_index(rng, 500));
    t[0][0] += 1;
    t[1][1] += 1;
    const double chi = chi_square_2x2(t);
    worst = std::max(worst, std::abs(chi - oracles::chi_square_observed_expected(t)));
  }
  // Balanced labels; one perfectly predictive binary feature, one independent.
  Dataset d;
  d.names = {"perfect", "independent"};
  for (int i = 0; i < 200; ++i) {
    const bool pos = i % 2 == 0;
    d.ids.push_back("q" + std::to_string(i));
    d.rows.push_back({pos ? 1.0 : 0.0, (i / 2) % 2 == 0 ? 1.0 : 0.0});
    d.labels.push_back(pos ? Answer::kAnswered : Answer::kOpen);
  }
  const auto ranks = rank_features(d);
  const FeatureRank& perfect = ranks[0].name == "perfect" ? ranks[0] : ranks[1];
  const FeatureRank& independent = ranks[0].name == "perfect" ? ranks[1] : ranks[0];
  const double ig_err = std::abs(perfect.info_gain - 1.0);
  const bool ok = worst <= kChiTol && ig_err <= kIgPerfectTol && std::abs(independent.chi_square) <= kIndependentTol &&
                  std::abs(independent.info_gain) <= kIndependentTol;
  return {ok, "chi-square max |err| " + fmt("%.2e", worst) + ", |IG(perfect) - 1| " + fmt("%.1e", ig_err) +
                  ", independent chi2 " + fmt("%.1e", independent.chi_square) + " IG " +
                  fmt("%.1e", independent.info_gain)};
}

struct EndToEnd {
  fs::path dir;
  RunConfig config;
  ExperimentResult first;
};

EndToEnd& end_to_end() {
  static EndToEnd e2e;
  return e2e;
}

Outcome planted_signal() {
  EndToEnd& e = end_to_end();
  e.dir = test_support::scratch_dir("acceptance");
  SyntheticConfig sc;  // 2000 records, 10% label noise
  write_synthetic(generate_synthetic(sc), e.dir / "synthetic");

  const fs::path data = test_support::data_dir();
  RunConfig& c = e.config;
  c.corpus = e.dir / "synthetic" / "corpus.jsonl";
  c.hierarchy = e.dir / "synthetic" / "hierarchy.tsv";
  c.ngrams = e.dir / "synthetic" / "reference_corpus.txt";
  c.lexicon = data / "liwc_demo.dic";
  c.dictionary = data / "dictionary.txt";
  c.function_words = data / "function_words.txt";
  c.tag_lexicon = data / "tag_lexicon.tsv";
  c.classifiers = {Loss::kHinge, Loss::kLogistic};
  c.folds = 10;
  c.output = e.dir / "run1";
  e.first = run_experiment(c);

  bool ok = true;
  std::ostringstream detail;
  for (const auto& rep : e.first.reports) {
    ok = ok && rep.aggregate.accuracy >= kMinAccuracy;
    detail << rep.classifier << " acc " << fmt("%.4f", rep.aggregate.accuracy) << ", ";
  }
  // Ranking as rank-features computes it from the written matrix.
  const auto ranks = rank_features(load_feature_csv(c.output / "features.csv"));
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < ranks.size(); ++i) position[ranks[i].name] = i + 1;
  detail << "planted ranks:";
  for (const auto& name : planted_feature_names()) {
    const std::size_t p = position.count(name) ? position[name] : 0;
    ok = ok && p >= 1 && p <= kTopRank;
    detail << " " << name << "=" << p;
  }
  detail << " (need <= 8, acc >= 0.85); records " << e.first.features.size();
  return {ok, detail.str()};
}

Outcome determinism_and_leakage() {
  EndToEnd& e = end_to_end();
  if (e.first.reports.empty()) return {false, "end-to-end run missing"};
  RunConfig second = e.config;
  second.output = e.dir / "run2";
  const ExperimentResult again = run_experiment(second);
  std::vector<std::string> compared = {"features.csv", "rankings.tsv"};
  for (const auto& rep : e.first.reports) {
    compared.push_back("report_" + rep.classifier + ".txt");
    compared.push_back("report_" + rep.classifier + ".kv");
  }
  std::vector<std::string> differing;
  for (const auto& name : compared)
    if (test_support::read_file(e.config.output / name) != test_support::read_file(second.output / name) ||
        test_support::read_file(e.config.output / name).empty())
      differing.push_back(name);
  const std::size_t violations = e.first.leakage_violations + again.leakage_violations;
  std::string detail = std::to_string(compared.size()) + " artifacts compared, " +
                       std::to_string(differing.size()) + " differ";
  for (const auto& d : differing) detail += " [" + d + "]";
  detail += "; leakage requests " + std::to_string(e.first.leakage_requests) + ", violations " +
            std::to_string(violations);
  return {differing.empty() && violations == 0 && e.first.leakage_requests > 0, detail};
}

}  // namespace

int main() {
  criterion(1, "entropy oracles (pos_diversity, topic_diversity)", 1, entropy_oracles);
  criterion(2, "LCS exhaustive oracle and self recall", 10, lcs_oracle);
  criterion(3, "ROC-AUC pairwise oracle with ties", 5, auc_oracle);
  criterion(4, "logistic and hinge gradient check", 1, gradient_check);
  criterion(5, "LDA conservation, normalization, two-family separation", 30, lda_invariants);
  criterion(6, "chi-square and information-gain oracles", 1, chi_ig_oracles);
  criterion(7, "end-to-end planted signal (2000 records, both classifiers)", 120, planted_signal);
  criterion(8, "determinism of two runs and zero leakage", 120, determinism_and_leakage);
  std::printf("%d of 8 criteria failed\n", g_failed);
  return g_failed;
}
