#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "claimalign/text_metrics.hpp"

namespace claimalign {

/// Where similarity scores come from: a built-in metric, or a precomputed
/// score-matrix file (e.g. produced offline by an embedding model).
struct ScorerSpec {
  enum class Kind { Builtin, External };

  Kind kind = Kind::Builtin;
  Metric metric = Metric::RougeL;
  std::filesystem::path matrix_path;

  static ScorerSpec builtin(Metric m) { return {Kind::Builtin, m, {}}; }
  static ScorerSpec external(std::filesystem::path path) {
    return {Kind::External, Metric::RougeL, std::move(path)};
  }

  /// "rougeL", "bleu4", ... or "external:<path>".
  static ScorerSpec parse(std::string_view text);
  std::string to_string() const;

  bool operator==(const ScorerSpec&) const = default;
};

/// Row-major grid of scores in [0, 1]; rows index the left sentence list.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  /// Throws std::invalid_argument if values.size() != rows * cols or any value
  /// lies outside [0, 1].
  SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                   ScorerSpec scorer = {});

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t row, std::size_t col) const { return values_[row * cols_ + col]; }
  const std::vector<double>& values() const { return values_; }
  const ScorerSpec& scorer() const { return scorer_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  ScorerSpec scorer_;
};

/// Reads the headerless grid format: first line "R C", then R lines of C
/// whitespace-separated decimals in [0, 1]. Throws std::runtime_error with the
/// offending line number on malformed input.
SimilarityMatrix read_score_matrix(const std::filesystem::path& path);
SimilarityMatrix parse_score_matrix(std::istream& in, const std::string& source_name);
void write_score_matrix(const SimilarityMatrix& matrix, std::ostream& out);

struct MatchEdge {
  std::size_t draft_index = 0;
  std::size_t final_index = 0;
  double score = 0.0;

  bool operator==(const MatchEdge&) const = default;
};

enum class MatchAlgorithm { DraftGreedy, FinalGreedy, MatchAndCover };

/// draft_greedy | final_greedy | match_and_cover
std::string_view algorithm_name(MatchAlgorithm algorithm);
MatchAlgorithm parse_algorithm(std::string_view name);

struct MatchResult {
  std::vector<MatchEdge> edges;
  MatchAlgorithm algorithm = MatchAlgorithm::MatchAndCover;
};

/// Scores every (left[i], right[j]) pair with left as candidate. Sentences that
/// tokenize to nothing score 0 against everything. For external scorers the
/// file is loaded and must have shape |left| x |right|.
SimilarityMatrix score_matrix(const std::vector<std::string>& left,
                              const std::vector<std::string>& right, const ScorerSpec& scorer);

/// Visits drafts in order; each takes its best still-free final sentence if
/// that score reaches `deleted_threshold`. Ties go to the lowest final index.
MatchResult draft_side_greedy(const SimilarityMatrix& m, double deleted_threshold);

/// Visits final sentences in order; each takes its best still-unmatched draft
/// if that score reaches `deleted_threshold`. Ties go to the lowest draft index.
MatchResult final_side_greedy(const SimilarityMatrix& m, double deleted_threshold);

/// Match-and-cover.
///
/// For every final sentence, repeatedly attributes the best unmatched draft
/// (scored against the tokens of the final sentence not yet covered) while the
/// uncovered fraction exceeds `fraction_limit`. Each accepted draft must reach
/// `tau`; its LCS with the uncovered tokens is then removed. Several drafts may
/// point at the same final sentence, but each draft is used at most once.
///
/// Requires a built-in scorer; throws std::invalid_argument otherwise, or when
/// tau is outside [0, 1] or fraction_limit is negative.
MatchResult match_and_cover(const std::vector<TokenSequence>& drafts,
                            const std::vector<TokenSequence>& finals, const ScorerSpec& scorer,
                            double tau, double fraction_limit);

}  // namespace claimalign
