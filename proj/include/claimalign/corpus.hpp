#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "claimalign/alignment.hpp"
#include "claimalign/labeling.hpp"

namespace claimalign {

/// A draft -> final sentence attribution as stored in record files.
struct SentenceEdge {
  std::size_t draft_index = 0;
  std::size_t final_index = 0;

  bool operator==(const SentenceEdge&) const = default;
  auto operator<=>(const SentenceEdge&) const = default;
};

std::vector<SentenceEdge> to_sentence_edges(const std::vector<MatchEdge>& edges);

/// One aligned document: draft claims, cited-reference sentences and final
/// claims, plus optional per-draft labels and match edges.
struct PatentRecord {
  std::string id;
  std::vector<std::string> draft;
  std::vector<std::string> cited;
  std::vector<std::string> final;
  std::optional<std::vector<EditLabel>> labels;
  std::optional<std::vector<SentenceEdge>> edges;

  bool operator==(const PatentRecord&) const = default;
};

/// Malformed record input; carries the 1-based line number and, when the
/// problem is a specific key, the field name.
class RecordError : public std::runtime_error {
 public:
  RecordError(std::size_t line, std::string field, const std::string& message);

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// Checks the record invariants (non-empty id and draft, label count, edge
/// bounds, unique draft indices). Throws RecordError tagged with `line_no`.
void validate_record(const PatentRecord& record, std::size_t line_no = 0);

/// One JSON object per line. Keys are emitted in the fixed order id, draft,
/// cited, final, labels, edges, so formatting a parsed canonical line
/// reproduces it byte for byte.
PatentRecord parse_record(std::string_view line, std::size_t line_no);
std::string format_record(const PatentRecord& record);

std::vector<PatentRecord> read_records(const std::filesystem::path& path);
void write_records(const std::vector<PatentRecord>& records, const std::filesystem::path& path);

/// Streams records from a file one line at a time; blank lines are skipped.
class RecordReader {
 public:
  explicit RecordReader(const std::filesystem::path& path);

  /// False at end of input. Throws RecordError on a malformed line.
  bool next(PatentRecord& record);
  /// Line number of the record most recently returned.
  std::size_t line() const { return line_no_; }

 private:
  std::ifstream in_;
  std::string buffer_;
  std::size_t line_no_ = 0;
};

// ---------------------------------------------------------------------------
// Statistics, splits and sampling

struct StatsReport {
  std::size_t records = 0;
  std::size_t sentences = 0;
  std::array<std::size_t, 3> counts{};   // indexed by EditLabel
  std::array<double, 3> fractions{};
  double mean_sentences_per_record = 0.0;

  std::size_t count(EditLabel label) const { return counts[static_cast<std::size_t>(label)]; }
  double fraction(EditLabel label) const { return fractions[static_cast<std::size_t>(label)]; }
};

/// Throws std::invalid_argument if a record has no labels.
StatsReport corpus_stats(const std::vector<PatentRecord>& records);

struct SplitSpec {
  double train_fraction = 0.8;
  double validation_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct DatasetSplits {
  std::vector<PatentRecord> train;
  std::vector<PatentRecord> validation;
  std::vector<PatentRecord> test;
};

/// Seeded train/validation/test partition at record level. Records are binned
/// by their most frequent label (ties: keep, edit, del) and dealt across the
/// splits so every bin is spread in proportion to the fractions. Split sizes
/// are round(n * validation), round(n * test) and the remainder; each split
/// keeps the input order. Throws std::invalid_argument for fewer than 10
/// records, unlabeled records, or when a split would come out empty.
DatasetSplits stratified_split(const std::vector<PatentRecord>& records, const SplitSpec& spec);

struct LabeledSentence {
  std::string sentence;
  EditLabel label = EditLabel::Kept;

  bool operator==(const LabeledSentence&) const = default;
};

/// Every labeled draft sentence of the records, in corpus order.
std::vector<LabeledSentence> labeled_sentences(const std::vector<PatentRecord>& records);

/// Downsamples every class without replacement to the size of the smallest
/// non-empty class. Survivors keep their input order. Throws
/// std::invalid_argument on empty input.
std::vector<LabeledSentence> undersample(const std::vector<LabeledSentence>& examples,
                                         std::uint64_t seed);

struct Triplet {
  std::string anchor;    // draft sentence
  std::string positive;  // closest cited sentence
  std::string negative;  // final sentence
  std::string record_id;

  bool operator==(const Triplet&) const = default;
};

/// Builds (draft, cited, final) triplets from Edited drafts that carry an edge,
/// in corpus order, stopping after `limit`. The positive is the cited sentence
/// the ranker scores highest against the draft (ties: lowest index). Records
/// with no cited sentences are skipped.
///
/// An external ranker's path names a directory holding one
/// `<record id>.txt` score matrix of shape |draft| x |cited| per record.
std::vector<Triplet> build_triplets(const std::vector<PatentRecord>& records,
                                    const ScorerSpec& cited_ranker, std::size_t limit);

/// max(0, d_ap - d_an + alpha). Distances must be non-negative.
double triplet_loss(double d_ap, double d_an, double alpha = 1.0);

std::string format_labeled_sentence(const LabeledSentence& example);
std::string format_triplet(const Triplet& triplet);

}  // namespace claimalign
