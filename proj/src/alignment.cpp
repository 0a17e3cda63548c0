#include "claimalign/alignment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace claimalign {
namespace {

constexpr std::string_view kExternalPrefix = "external:";

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

[[noreturn]] void matrix_error(const std::string& source, std::size_t line, const std::string& what) {
  throw std::runtime_error(source + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

void check_tau(double tau, const char* name) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  }
}

}  // namespace

ScorerSpec ScorerSpec::parse(std::string_view text) {
  if (text.substr(0, kExternalPrefix.size()) == kExternalPrefix) {
    auto path = text.substr(kExternalPrefix.size());
    if (path.empty()) throw std::invalid_argument("external scorer needs a path");
    return external(std::filesystem::path(std::string(path)));
  }
  return builtin(parse_metric(text));
}

std::string ScorerSpec::to_string() const {
  if (kind == Kind::External) return std::string(kExternalPrefix) + matrix_path.string();
  return std::string(metric_name(metric));
}

SimilarityMatrix::SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                                   ScorerSpec scorer)
    : rows_(rows), cols_(cols), values_(std::move(values)), scorer_(std::move(scorer)) {
  if (values_.size() != rows_ * cols_) {
    throw std::invalid_argument("similarity matrix: value count does not match shape");
  }
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("similarity matrix: score outside [0, 1]");
    }
  }
}

SimilarityMatrix parse_score_matrix(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t rows = 0, cols = 0;

  bool have_header = false;
  while (!have_header && std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != 2 || !parse_number(fields[0], rows) || !parse_number(fields[1], cols)) {
      matrix_error(source_name, line_no, "expected header \"ROWS COLS\"");
    }
    have_header = true;
  }
  if (!have_header) matrix_error(source_name, line_no, "missing header line");

  std::vector<double> values;
  values.reserve(rows * cols);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (row == rows) matrix_error(source_name, line_no, "more rows than declared");
    if (fields.size() != cols) {
      matrix_error(source_name, line_no,
                   "expected " + std::to_string(cols) + " values, found " + std::to_string(fields.size()));
    }
    for (auto field : fields) {
      double v = 0.0;
      if (!parse_number(field, v)) {
        matrix_error(source_name, line_no, "not a number: '" + std::string(field) + "'");
      }
      if (!(v >= 0.0 && v <= 1.0)) {
        matrix_error(source_name, line_no, "score outside [0, 1]: " + std::string(field));
      }
      values.push_back(v);
    }
    ++row;
  }
  if (row != rows) {
    matrix_error(source_name, line_no,
                 "declared " + std::to_string(rows) + " rows, found " + std::to_string(row));
  }
  return SimilarityMatrix(rows, cols, std::move(values), ScorerSpec::external(source_name));
}

SimilarityMatrix read_score_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open score matrix " + path.string());
  return parse_score_matrix(in, path.string());
}

void write_score_matrix(const SimilarityMatrix& matrix, std::ostream& out) {
  out << matrix.rows() << ' ' << matrix.cols() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
      if (j > 0) out << ' ';
      out << matrix(i, j);
    }
    out << '\n';
  }
}

std::string_view algorithm_name(MatchAlgorithm algorithm) {
  switch (algorithm) {
    case MatchAlgorithm::DraftGreedy: return "draft_greedy";
    case MatchAlgorithm::FinalGreedy: return "final_greedy";
    case MatchAlgorithm::MatchAndCover: return "match_and_cover";
  }
  return "unknown";
}

MatchAlgorithm parse_algorithm(std::string_view name) {
  if (name == "draft_greedy") return MatchAlgorithm::DraftGreedy;
  if (name == "final_greedy") return MatchAlgorithm::FinalGreedy;
  if (name == "match_and_cover") return MatchAlgorithm::MatchAndCover;
  throw std::invalid_argument("unknown match algorithm '" + std::string(name) +
                              "' (expected draft_greedy|final_greedy|match_and_cover)");
}

SimilarityMatrix score_matrix(const std::vector<std::string>& left,
                              const std::vector<std::string>& right, const ScorerSpec& scorer) {
  if (scorer.kind == ScorerSpec::Kind::External) {
    SimilarityMatrix loaded = read_score_matrix(scorer.matrix_path);
    if (loaded.rows() != left.size() || loaded.cols() != right.size()) {
      std::ostringstream msg;
      msg << scorer.matrix_path.string() << ": matrix is " << loaded.rows() << "x" << loaded.cols()
          << " but the sentence lists are " << left.size() << "x" << right.size();
      throw std::runtime_error(msg.str());
    }
    return loaded;
  }

  std::vector<TokenSequence> left_tokens, right_tokens;
  left_tokens.reserve(left.size());
  right_tokens.reserve(right.size());
  for (const auto& s : left) left_tokens.push_back(tokenize(s));
  for (const auto& s : right) right_tokens.push_back(tokenize(s));

  std::vector<double> values(left.size() * right.size(), 0.0);
  for (std::size_t i = 0; i < left.size(); ++i) {
    if (left_tokens[i].empty()) continue;
    for (std::size_t j = 0; j < right.size(); ++j) {
      if (right_tokens[j].empty()) continue;
      values[i * right.size() + j] = score(scorer.metric, left_tokens[i], right_tokens[j]);
    }
  }
  return SimilarityMatrix(left.size(), right.size(), std::move(values), scorer);
}

MatchResult draft_side_greedy(const SimilarityMatrix& m, double deleted_threshold) {
  check_tau(deleted_threshold, "deleted_threshold");
  MatchResult result{{}, MatchAlgorithm::DraftGreedy};
  std::vector<bool> taken(m.cols(), false);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::size_t best = m.cols();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!taken[j] && (best == m.cols() || m(i, j) > m(i, best))) best = j;
    }
    if (best == m.cols() || m(i, best) < deleted_threshold) continue;
    taken[best] = true;
    result.edges.push_back({i, best, m(i, best)});
  }
  return result;
}

MatchResult final_side_greedy(const SimilarityMatrix& m, double deleted_threshold) {
  check_tau(deleted_threshold, "deleted_threshold");
  MatchResult result{{}, MatchAlgorithm::FinalGreedy};
  std::vector<bool> matched(m.rows(), false);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    std::size_t best = m.rows();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (!matched[i] && (best == m.rows() || m(i, j) > m(best, j))) best = i;
    }
    if (best == m.rows() || m(best, j) < deleted_threshold) continue;
    matched[best] = true;
    result.edges.push_back({best, j, m(best, j)});
  }
  return result;
}

MatchResult match_and_cover(const std::vector<TokenSequence>& drafts,
                            const std::vector<TokenSequence>& finals, const ScorerSpec& scorer,
                            double tau, double fraction_limit) {
  if (scorer.kind != ScorerSpec::Kind::Builtin) {
    throw std::invalid_argument("match_and_cover needs a built-in token metric");
  }
  check_tau(tau, "tau");
  if (!(fraction_limit >= 0.0)) throw std::invalid_argument("fraction_limit must be >= 0");

  MatchResult result{{}, MatchAlgorithm::MatchAndCover};
  std::vector<bool> matched(drafts.size(), false);
  for (std::size_t j = 0; j < finals.size(); ++j) {
    TokenSequence remaining = finals[j];
    const auto original = static_cast<double>(remaining.size());
    if (remaining.empty()) continue;

    while (static_cast<double>(remaining.size()) / original > fraction_limit) {
      std::size_t best = drafts.size();
      double best_score = -1.0;
      for (std::size_t i = 0; i < drafts.size(); ++i) {
        if (matched[i] || drafts[i].empty()) continue;
        const double s = score(scorer.metric, drafts[i], remaining);
        if (s > best_score) {
          best_score = s;
          best = i;
        }
      }
      if (best == drafts.size() || best_score < tau) break;

      remaining = remove_lcs(remaining, lcs(drafts[best], remaining));
      matched[best] = true;
      result.edges.push_back({best, j, best_score});
    }
  }
  return result;
}

}  // namespace claimalign
