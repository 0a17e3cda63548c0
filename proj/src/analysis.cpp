#include "claimalign/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace claimalign {
namespace {

double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

std::vector<SentenceEdge> strip_scores(const std::vector<MatchEdge>& edges) {
  std::vector<SentenceEdge> out;
  out.reserve(edges.size());
  for (const auto& e : edges) out.push_back({e.draft_index, e.final_index});
  return out;
}

constexpr double kGammaEpsilon = 1e-15;
constexpr int kGammaMaxIterations = 100000;

// e^{-x} x^a / Gamma(a)
double gamma_prefactor(double a, double x) {
  return std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < kGammaMaxIterations; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kGammaEpsilon) break;
  }
  return gamma_prefactor(a, x) * sum;
}

double upper_continued_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kGammaEpsilon;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kGammaMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kGammaEpsilon) break;
  }
  return gamma_prefactor(a, x) * h;
}

}  // namespace

MatchCounts& MatchCounts::operator+=(const MatchCounts& other) {
  true_positives += other.true_positives;
  predicted += other.predicted;
  gold += other.gold;
  return *this;
}

MatchCounts match_counts(const std::vector<SentenceEdge>& predicted,
                         const std::vector<SentenceEdge>& gold) {
  const std::set<SentenceEdge> pred_set(predicted.begin(), predicted.end());
  const std::set<SentenceEdge> gold_set(gold.begin(), gold.end());
  MatchCounts counts;
  counts.predicted = pred_set.size();
  counts.gold = gold_set.size();
  for (const auto& e : pred_set) counts.true_positives += gold_set.count(e);
  return counts;
}

PrecisionRecall precision_recall(const MatchCounts& counts) {
  if (counts.predicted == 0 && counts.gold == 0) return {1.0, 1.0, 1.0};
  if (counts.predicted == 0 || counts.gold == 0) return {0.0, 0.0, 0.0};
  const double p = static_cast<double>(counts.true_positives) / static_cast<double>(counts.predicted);
  const double r = static_cast<double>(counts.true_positives) / static_cast<double>(counts.gold);
  return {p, r, f1_score(p, r)};
}

PrecisionRecall match_f1(const std::vector<SentenceEdge>& predicted,
                         const std::vector<SentenceEdge>& gold) {
  return precision_recall(match_counts(predicted, gold));
}

PrecisionRecall match_f1(const std::vector<MatchEdge>& predicted, const std::vector<MatchEdge>& gold) {
  return match_f1(strip_scores(predicted), strip_scores(gold));
}

LabelEvalReport label_f1(const std::vector<EditLabel>& predicted, const std::vector<EditLabel>& gold) {
  if (predicted.size() != gold.size()) {
    throw std::invalid_argument("label_f1: " + std::to_string(predicted.size()) +
                                " predictions for " + std::to_string(gold.size()) + " gold labels");
  }
  if (gold.empty()) throw std::invalid_argument("label_f1: no labels");

  std::array<std::size_t, 3> tp{}, fp{}, fn{}, support{};
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto p = static_cast<std::size_t>(predicted[i]);
    const auto g = static_cast<std::size_t>(gold[i]);
    ++support[g];
    if (p == g) {
      ++tp[g];
      ++correct;
    } else {
      ++fp[p];
      ++fn[g];
    }
  }

  LabelEvalReport report;
  const auto n = static_cast<double>(gold.size());
  for (std::size_t c = 0; c < 3; ++c) {
    const double denom = 2.0 * static_cast<double>(tp[c]) + static_cast<double>(fp[c] + fn[c]);
    report.per_class_f1[c] = denom > 0.0 ? 2.0 * static_cast<double>(tp[c]) / denom : 0.0;
    report.macro_f1 += report.per_class_f1[c];
    report.weighted_f1 += report.per_class_f1[c] * static_cast<double>(support[c]);
  }
  report.macro_f1 /= 3.0;
  report.weighted_f1 /= n;
  // Every error is one false positive and one false negative, so the global
  // F1 reduces to accuracy.
  report.micro_f1 = static_cast<double>(correct) / n;
  return report;
}

std::string_view entailment_name(EntailmentLabel label) {
  switch (label) {
    case EntailmentLabel::Contradiction: return "contradiction";
    case EntailmentLabel::Neutral: return "neutral";
    case EntailmentLabel::Entailment: return "entailment";
  }
  return "?";
}

EntailmentLabel parse_entailment(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "contradiction") return EntailmentLabel::Contradiction;
  if (lower == "neutral") return EntailmentLabel::Neutral;
  if (lower == "entailment") return EntailmentLabel::Entailment;
  throw std::invalid_argument("unknown entailment label '" + std::string(name) + "'");
}

ContingencyTable::ContingencyTable(std::vector<std::vector<std::uint64_t>> grid) {
  rows = grid.size();
  cols = rows == 0 ? 0 : grid.front().size();
  counts.reserve(rows * cols);
  for (const auto& row : grid) {
    if (row.size() != cols) throw std::invalid_argument("contingency table rows differ in length");
    counts.insert(counts.end(), row.begin(), row.end());
  }
}

ContingencyTable contingency_table(const std::vector<EntailmentLabel>& entailment,
                                   const std::vector<EditLabel>& edits) {
  if (entailment.size() != edits.size()) {
    throw std::invalid_argument("contingency_table: label lists differ in length");
  }
  ContingencyTable table;
  table.rows = 3;
  table.cols = 3;
  table.counts.assign(9, 0);
  for (std::size_t i = 0; i < edits.size(); ++i) {
    ++table.counts[static_cast<std::size_t>(entailment[i]) * 3 + static_cast<std::size_t>(edits[i])];
  }
  return table;
}

ContingencyTable parse_contingency_table(std::istream& in) {
  std::vector<std::vector<std::uint64_t>> grid;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::uint64_t> row;
    std::string field;
    while (fields >> field) {
      std::uint64_t value = 0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw std::invalid_argument("line " + std::to_string(line_no) +
                                    ": not a non-negative integer: '" + field + "'");
      }
      row.push_back(value);
    }
    if (row.empty()) continue;
    if (!grid.empty() && row.size() != grid.front().size()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(grid.front().size()) + " counts");
    }
    grid.push_back(std::move(row));
  }
  return ContingencyTable(std::move(grid));
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw std::invalid_argument("regularized_gamma_q: need a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - lower_series(a, x);
  return upper_continued_fraction(a, x);
}

double chi_squared_survival(double statistic, int dof) {
  if (dof < 1) throw std::invalid_argument("chi-squared needs dof >= 1");
  return regularized_gamma_q(0.5 * dof, 0.5 * std::max(statistic, 0.0));
}

ChiSquaredResult chi_squared_independence(const ContingencyTable& table) {
  std::vector<double> row_sums(table.rows, 0.0), col_sums(table.cols, 0.0);
  for (std::size_t r = 0; r < table.rows; ++r) {
    for (std::size_t c = 0; c < table.cols; ++c) {
      row_sums[r] += static_cast<double>(table(r, c));
      col_sums[c] += static_cast<double>(table(r, c));
    }
  }
  std::vector<std::size_t> kept_rows, kept_cols;
  for (std::size_t r = 0; r < table.rows; ++r) {
    if (row_sums[r] > 0.0) kept_rows.push_back(r);
  }
  for (std::size_t c = 0; c < table.cols; ++c) {
    if (col_sums[c] > 0.0) kept_cols.push_back(c);
  }
  if (kept_rows.size() < 2 || kept_cols.size() < 2) {
    throw std::invalid_argument("chi-squared: need at least two non-empty rows and columns");
  }

  double total = 0.0;
  for (auto r : kept_rows) total += row_sums[r];

  ChiSquaredResult result;
  for (auto r : kept_rows) {
    for (auto c : kept_cols) {
      const double expected = row_sums[r] * col_sums[c] / total;
      const double diff = static_cast<double>(table(r, c)) - expected;
      result.statistic += diff * diff / expected;
    }
  }
  result.dof = static_cast<int>((kept_rows.size() - 1) * (kept_cols.size() - 1));
  result.p_value = chi_squared_survival(result.statistic, result.dof);
  return result;
}

}  // namespace claimalign
