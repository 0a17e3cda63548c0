#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "claimalign/alignment.hpp"

namespace claimalign {

enum class EditLabel { Kept, Edited, Deleted };

inline constexpr EditLabel kAllEditLabels[] = {EditLabel::Kept, EditLabel::Edited, EditLabel::Deleted};

/// Record-file spelling: keep | edit | del.
std::string_view label_code(EditLabel label);
EditLabel parse_label(std::string_view code);

/// Matching and labeling parameters. Defaults are the tuned values: ROUGE-L
/// match-and-cover with deleted threshold 0.45 and fraction limit 0.3, then a
/// BLEU-4 kept threshold of 0.88.
struct LabelConfig {
  ScorerSpec match_scorer = ScorerSpec::builtin(Metric::RougeL);
  MatchAlgorithm match_algorithm = MatchAlgorithm::MatchAndCover;
  double deleted_threshold = 0.45;
  double fraction_limit = 0.3;
  Metric kept_metric = Metric::Bleu4;
  double kept_threshold = 0.88;

  /// Throws std::invalid_argument when a threshold is outside [0, 1] or the
  /// fraction limit is outside (0, 1).
  void validate() const;

  /// Applies one `key = value` setting; keys are the field names above.
  void set(std::string_view key, std::string_view value);

  bool operator==(const LabelConfig&) const = default;
};

/// Flat config file: one `key = value` per line, `#` starts a comment.
LabelConfig parse_label_config(std::istream& in, const std::string& source_name);
LabelConfig read_label_config(const std::filesystem::path& path);
void write_label_config(const LabelConfig& config, std::ostream& out);

/// Kept when kept_metric(draft, final) reaches the kept threshold, otherwise
/// Edited. The draft is the candidate. Throws on empty input.
EditLabel classify_pair(std::string_view draft, std::string_view final_sentence,
                        const LabelConfig& config);

struct LabelResult {
  std::vector<EditLabel> labels;  // one per draft sentence
  std::vector<MatchEdge> edges;
};

/// Matches drafts to final sentences with the configured algorithm, labels
/// unmatched drafts Deleted and classifies every matched pair.
LabelResult derive_labels(const std::vector<std::string>& drafts,
                          const std::vector<std::string>& finals, const LabelConfig& config);

}  // namespace claimalign
