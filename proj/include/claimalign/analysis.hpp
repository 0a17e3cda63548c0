#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "claimalign/alignment.hpp"
#include "claimalign/corpus.hpp"
#include "claimalign/labeling.hpp"

namespace claimalign {

// ---------------------------------------------------------------------------
// Match evaluation

struct MatchCounts {
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;

  MatchCounts& operator+=(const MatchCounts& other);
};

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Edge-set overlap; edges compare as (draft, final) pairs and duplicates
/// collapse.
MatchCounts match_counts(const std::vector<SentenceEdge>& predicted,
                         const std::vector<SentenceEdge>& gold);

/// Both sides empty scores (1, 1, 1); exactly one side empty scores (0, 0, 0).
PrecisionRecall precision_recall(const MatchCounts& counts);

PrecisionRecall match_f1(const std::vector<MatchEdge>& predicted, const std::vector<MatchEdge>& gold);
PrecisionRecall match_f1(const std::vector<SentenceEdge>& predicted,
                         const std::vector<SentenceEdge>& gold);

// ---------------------------------------------------------------------------
// Label evaluation

struct LabelEvalReport {
  std::array<double, 3> per_class_f1{};  // indexed by EditLabel
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;

  double f1(EditLabel label) const { return per_class_f1[static_cast<std::size_t>(label)]; }
};

/// One-vs-rest F1 per class; macro averages all three classes (a class absent
/// from both sides counts as 0), weighted uses gold support, micro is the
/// global F1 (accuracy for single-label data). Throws std::invalid_argument
/// when the lengths differ or are zero.
LabelEvalReport label_f1(const std::vector<EditLabel>& predicted, const std::vector<EditLabel>& gold);

// ---------------------------------------------------------------------------
// Entailment

enum class EntailmentLabel { Contradiction, Neutral, Entailment };

/// contradiction | neutral | entailment (case-insensitive on parse).
std::string_view entailment_name(EntailmentLabel label);
EntailmentLabel parse_entailment(std::string_view name);

/// Contradiction -> Kept, Neutral -> Edited, Entailment -> Deleted.
constexpr EditLabel entailment_to_edit(EntailmentLabel e) {
  switch (e) {
    case EntailmentLabel::Contradiction: return EditLabel::Kept;
    case EntailmentLabel::Neutral: return EditLabel::Edited;
    case EntailmentLabel::Entailment: return EditLabel::Deleted;
  }
  return EditLabel::Edited;
}

// ---------------------------------------------------------------------------
// Chi-squared test of independence

/// Non-negative counts, rows x cols, row-major.
struct ContingencyTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint64_t> counts;

  ContingencyTable() = default;
  ContingencyTable(std::vector<std::vector<std::uint64_t>> grid);

  std::uint64_t operator()(std::size_t r, std::size_t c) const { return counts[r * cols + c]; }
};

/// Cross-tabulates entailment predictions (rows: contradiction, neutral,
/// entailment) against edit labels (cols: keep, edit, del).
ContingencyTable contingency_table(const std::vector<EntailmentLabel>& entailment,
                                   const std::vector<EditLabel>& edits);

/// One row of whitespace-separated integers per line; blank lines ignored.
ContingencyTable parse_contingency_table(std::istream& in);

struct ChiSquaredResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 0;
};

/// Pearson's test without continuity correction. All-zero rows and columns
/// are dropped first; throws std::invalid_argument if fewer than two rows or
/// two columns remain.
ChiSquaredResult chi_squared_independence(const ContingencyTable& table);

/// Regularized upper incomplete gamma Q(a, x), by series for x < a + 1 and by
/// Lentz's continued fraction otherwise.
double regularized_gamma_q(double a, double x);

/// Upper tail of the chi-squared distribution.
double chi_squared_survival(double statistic, int dof);

}  // namespace claimalign
