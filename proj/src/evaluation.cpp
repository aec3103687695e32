#include "answerability/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "answerability/error.hpp"
#include "answerability/random.hpp"

namespace answerability {
namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double entropy_bits(double a, double b) {
  const double n = a + b;
  if (n <= 0) return 0.0;
  double h = 0.0;
  for (double c : {a, b})
    if (c > 0) h -= (c / n) * std::log2(c / n);
  return h;
}

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

std::string fixed_opt(const std::optional<double>& x) { return x ? fixed(*x) : "n/a"; }

}  // namespace

double f_score(double precision, double recall) {
  return precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

std::optional<double> roc_area(std::span<const Answer> labels, std::span<const double> scores) {
  const std::size_t n = labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  std::uint64_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] == Answer::kAnswered) {
        rank_sum_pos += avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::uint64_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

Metrics compute_metrics(std::span<const Answer> labels, std::span<const double> scores) {
  if (labels.size() != scores.size() || labels.empty())
    throw PreconditionError("model_eval", "metrics need equally many (>= 1) labels and scores");
  Metrics m;
  m.n = labels.size();
  ConfusionMatrix& c = m.confusion;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool actual = labels[i] == Answer::kAnswered;
    const bool predicted = label_for_score(scores[i]) == Answer::kAnswered;
    if (actual && predicted) ++c.tp;
    else if (!actual && predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.answered = {ratio(c.tp, c.tp + c.fp), ratio(c.tp, c.tp + c.fn), 0.0, c.tp + c.fn};
  m.answered.f_score = f_score(m.answered.precision, m.answered.recall);
  m.open = {ratio(c.tn, c.tn + c.fn), ratio(c.tn, c.tn + c.fp), 0.0, c.tn + c.fp};
  m.open.f_score = f_score(m.open.precision, m.open.recall);
  const double wa = static_cast<double>(m.answered.support), wo = static_cast<double>(m.open.support);
  auto weigh = [&](double a, double o) { return (wa * a + wo * o) / (wa + wo); };
  m.weighted = {weigh(m.answered.precision, m.open.precision), weigh(m.answered.recall, m.open.recall),
                weigh(m.answered.f_score, m.open.f_score), c.total()};
  m.precision = m.answered.precision;
  m.recall = m.answered.recall;
  m.f_score = m.answered.f_score;
  m.roc_area = roc_area(labels, scores);
  return m;
}

std::vector<FoldSplit> stratified_folds(std::span<const Answer> labels, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("model_eval", "need at least 2 folds");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i)
    (labels[i] == Answer::kAnswered ? pos : neg).push_back(i);
  if (pos.size() < static_cast<std::size_t>(k) || neg.size() < static_cast<std::size_t>(k)) {
    throw ValidationError("model_eval", "a class has fewer than " + std::to_string(k) +
                                            " examples (answered " + std::to_string(pos.size()) +
                                            ", open " + std::to_string(neg.size()) + "); use fewer folds");
  }
  Rng rng(seed);
  shuffle(std::span<std::size_t>(pos), rng);
  shuffle(std::span<std::size_t>(neg), rng);
  std::vector<int> fold_of(labels.size());
  std::size_t slot = 0;
  for (const auto* group : {&pos, &neg})
    for (std::size_t i : *group) fold_of[i] = static_cast<int>(slot++ % k);
  std::vector<FoldSplit> folds(k);
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (int f = 0; f < k; ++f) (f == fold_of[i] ? folds[f].test : folds[f].train).push_back(i);
  return folds;
}

EvalReport cross_validate(std::span<const Answer> labels, int k, std::uint64_t seed,
                          const FoldScorer& scorer, int workers) {
  const std::vector<FoldSplit> folds = stratified_folds(labels, k, seed);
  EvalReport report;
  report.per_fold.resize(folds.size());
  parallel_for(folds.size(), workers, [&](std::size_t f) {
    const FoldSplit& split = folds[f];
    const std::vector<double> scores = scorer(f, split);
    if (scores.size() != split.test.size())
      throw PreconditionError("model_eval", "fold scorer returned the wrong number of scores");
    std::vector<Answer> truth;
    truth.reserve(split.test.size());
    for (std::size_t i : split.test) truth.push_back(labels[i]);
    report.per_fold[f] = compute_metrics(truth, scores);
  });

  Metrics& agg = report.aggregate;
  double total = 0, roc_weight = 0, roc_sum = 0;
  auto add_class = [](ClassMetrics& dst, const ClassMetrics& src, double w) {
    dst.precision += w * src.precision;
    dst.recall += w * src.recall;
    dst.f_score += w * src.f_score;
    dst.support += src.support;
  };
  for (const Metrics& m : report.per_fold) {
    const double w = static_cast<double>(m.n);
    total += w;
    agg.n += m.n;
    agg.confusion.tp += m.confusion.tp;
    agg.confusion.fp += m.confusion.fp;
    agg.confusion.fn += m.confusion.fn;
    agg.confusion.tn += m.confusion.tn;
    agg.precision += w * m.precision;
    agg.recall += w * m.recall;
    add_class(agg.answered, m.answered, w);
    add_class(agg.open, m.open, w);
    add_class(agg.weighted, m.weighted, w);
    if (m.roc_area) {
      roc_sum += w * *m.roc_area;
      roc_weight += w;
    }
  }
  for (ClassMetrics* c : {&agg.answered, &agg.open, &agg.weighted}) {
    c->precision /= total;
    c->recall /= total;
    c->f_score = f_score(c->precision, c->recall);
  }
  agg.accuracy = ratio(agg.confusion.tp + agg.confusion.tn, agg.confusion.total());
  agg.precision /= total;
  agg.recall /= total;
  agg.f_score = f_score(agg.precision, agg.recall);
  if (roc_weight > 0) agg.roc_area = roc_sum / roc_weight;
  return report;
}

EvalReport cross_validate(const Dataset& data, int k, Loss loss, const TrainOptions& options,
                          std::uint64_t seed, int workers) {
  EvalReport report = cross_validate(
      data.labels, k, seed,
      [&](std::size_t, const FoldSplit& split) {
        const LinearModel model = train(data.subset(split.train), loss, options);
        std::vector<double> scores;
        scores.reserve(split.test.size());
        for (std::size_t i : split.test) scores.push_back(predict(model, std::span<const double>(data.rows[i])).score);
        return scores;
      },
      workers);
  report.classifier = std::string(classifier_name(loss));
  return report;
}

double chi_square_2x2(const Table2x2& t) {
  const double a = t[0][0], b = t[0][1], c = t[1][0], d = t[1][1];
  const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
  const double n = r1 + r2;
  if (r1 <= 0 || r2 <= 0 || c1 <= 0 || c2 <= 0) return 0.0;
  const double diff = a * d - b * c;
  return n * diff * diff / (r1 * r2 * c1 * c2);
}

double information_gain_2x2(const Table2x2& t) {
  const double n = t[0][0] + t[0][1] + t[1][0] + t[1][1];
  if (n <= 0) return 0.0;
  const double h_label = entropy_bits(t[0][0] + t[1][0], t[0][1] + t[1][1]);
  double h_cond = 0.0;
  for (const auto& row : t) h_cond += (row[0] + row[1]) / n * entropy_bits(row[0], row[1]);
  return std::max(0.0, h_label - h_cond);
}

std::vector<FeatureRank> rank_features(const Dataset& data) {
  const std::size_t n = data.size();
  const bool has_pos = std::find(data.labels.begin(), data.labels.end(), Answer::kAnswered) != data.labels.end();
  const bool has_neg = std::find(data.labels.begin(), data.labels.end(), Answer::kOpen) != data.labels.end();
  if (n < 2 || !has_pos || !has_neg)
    throw ValidationError("model_eval", "feature ranking needs >= 2 examples with both classes");

  std::vector<FeatureRank> ranks;
  ranks.reserve(data.names.size());
  std::vector<double> column(n);
  for (std::size_t j = 0; j < data.names.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = data.rows[i][j];
    std::vector<double> sorted = column;
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[(n - 1) / 2] + sorted[n / 2]);
    Table2x2 table{};
    for (std::size_t i = 0; i < n; ++i)
      table[column[i] > median ? 1 : 0][data.labels[i] == Answer::kAnswered ? 1 : 0] += 1.0;
    ranks.push_back({data.names[j], chi_square_2x2(table), information_gain_2x2(table)});
  }
  std::stable_sort(ranks.begin(), ranks.end(), [](const FeatureRank& a, const FeatureRank& b) {
    if (a.chi_square != b.chi_square) return a.chi_square > b.chi_square;
    if (a.info_gain != b.info_gain) return a.info_gain > b.info_gain;
    return a.name < b.name;
  });
  return ranks;
}

std::string format_report(const EvalReport& r) {
  std::ostringstream os;
  os << "classifier: " << r.classifier << "\n";
  os << "folds: " << r.per_fold.size() << "\n\n";
  os << "fold\tn\taccuracy\tprecision\trecall\tf_score\troc_area\n";
  for (std::size_t f = 0; f < r.per_fold.size(); ++f) {
    const Metrics& m = r.per_fold[f];
    os << f << '\t' << m.n << '\t' << fixed(m.accuracy) << '\t' << fixed(m.precision) << '\t'
       << fixed(m.recall) << '\t' << fixed(m.f_score) << '\t' << fixed_opt(m.roc_area) << '\n';
  }
  const Metrics& a = r.aggregate;
  os << "\naggregate (example-weighted over folds, positive class = answered)\n";
  os << "accuracy\tprecision\trecall\tf_score\troc_area\n";
  os << fixed(a.accuracy) << '\t' << fixed(a.precision) << '\t' << fixed(a.recall) << '\t'
     << fixed(a.f_score) << '\t' << fixed_opt(a.roc_area) << "\n\n";
  os << "per class\tprecision\trecall\tf_score\tsupport\n";
  for (const auto& [name, c] : {std::pair{"answered", a.answered}, std::pair{"open", a.open},
                                std::pair{"weighted", a.weighted}}) {
    os << name << '\t' << fixed(c.precision) << '\t' << fixed(c.recall) << '\t' << fixed(c.f_score) << '\t'
       << c.support << '\n';
  }
  os << "\nconfusion (rows actual, columns predicted)\n";
  os << "\tanswered\topen\n";
  os << "answered\t" << a.confusion.tp << '\t' << a.confusion.fn << '\n';
  os << "open\t" << a.confusion.fp << '\t' << a.confusion.tn << '\n';
  return os.str();
}

std::string format_report_kv(const EvalReport& r) {
  std::ostringstream os;
  auto metrics = [&](const std::string& prefix, const Metrics& m) {
    os << prefix << ".n " << m.n << '\n';
    os << prefix << ".accuracy " << format_double(m.accuracy) << '\n';
    os << prefix << ".precision " << format_double(m.precision) << '\n';
    os << prefix << ".recall " << format_double(m.recall) << '\n';
    os << prefix << ".f_score " << format_double(m.f_score) << '\n';
    os << prefix << ".roc_area " << (m.roc_area ? format_double(*m.roc_area) : "absent") << '\n';
    os << prefix << ".tp " << m.confusion.tp << '\n';
    os << prefix << ".fp " << m.confusion.fp << '\n';
    os << prefix << ".fn " << m.confusion.fn << '\n';
    os << prefix << ".tn " << m.confusion.tn << '\n';
    for (const auto& [name, c] : {std::pair{"answered", m.answered}, std::pair{"open", m.open},
                                  std::pair{"weighted", m.weighted}}) {
      os << prefix << '.' << name << ".precision " << format_double(c.precision) << '\n';
      os << prefix << '.' << name << ".recall " << format_double(c.recall) << '\n';
      os << prefix << '.' << name << ".f_score " << format_double(c.f_score) << '\n';
      os << prefix << '.' << name << ".support " << c.support << '\n';
    }
  };
  os << "classifier " << r.classifier << '\n';
  os << "folds " << r.per_fold.size() << '\n';
  metrics("aggregate", r.aggregate);
  for (std::size_t f = 0; f < r.per_fold.size(); ++f) metrics("fold" + std::to_string(f), r.per_fold[f]);
  for (std::size_t i = 0; i < r.feature_rankings.size(); ++i) {
    const FeatureRank& fr = r.feature_rankings[i];
    os << "rank" << i << ' ' << fr.name << ' ' << format_double(fr.chi_square) << ' '
       << format_double(fr.info_gain) << '\n';
  }
  return os.str();
}

std::string format_rankings(std::span<const FeatureRank> rankings) {
  std::ostringstream os;
  os << "rank\tfeature\tchi_square\tinfo_gain_bits\n";
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f\t%.6f", rankings[i].chi_square, rankings[i].info_gain);
    os << i + 1 << '\t' << rankings[i].name << '\t' << buf << '\n';
  }
  return os.str();
}

}  // namespace answerability
