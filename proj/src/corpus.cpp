#include "claimalign/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "json.hpp"

namespace claimalign {
namespace {

using ordered_json = nlohmann::ordered_json;

// Unbiased draw in [0, bound) from the raw 64-bit stream. Keeps shuffles
// identical across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

template <typename T>
void fisher_yates(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_below(rng, i)]);
  }
}

std::vector<std::string> string_array(const ordered_json& value, std::size_t line_no,
                                      const char* field) {
  if (!value.is_array()) throw RecordError(line_no, field, "must be an array of strings");
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_string()) throw RecordError(line_no, field, "must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::size_t label_index(EditLabel label) { return static_cast<std::size_t>(label); }

EditLabel dominant_label(const std::vector<EditLabel>& labels) {
  std::array<std::size_t, 3> counts{};
  for (auto label : labels) ++counts[label_index(label)];
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return static_cast<EditLabel>(best);
}

}  // namespace

std::vector<SentenceEdge> to_sentence_edges(const std::vector<MatchEdge>& edges) {
  std::vector<SentenceEdge> out;
  out.reserve(edges.size());
  for (const auto& e : edges) out.push_back({e.draft_index, e.final_index});
  return out;
}

RecordError::RecordError(std::size_t line, std::string field, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) +
                         (field.empty() ? std::string() : ", field \"" + field + "\"") + ": " +
                         message),
      line_(line),
      field_(std::move(field)) {}

void validate_record(const PatentRecord& record, std::size_t line_no) {
  if (record.id.empty()) throw RecordError(line_no, "id", "must be a non-empty string");
  if (record.draft.empty()) throw RecordError(line_no, "draft", "must contain at least one sentence");
  if (record.labels && record.labels->size() != record.draft.size()) {
    throw RecordError(line_no, "labels",
                      "has " + std::to_string(record.labels->size()) + " entries for " +
                          std::to_string(record.draft.size()) + " draft sentences");
  }
  if (record.edges) {
    std::vector<bool> seen(record.draft.size(), false);
    for (const auto& edge : *record.edges) {
      if (edge.draft_index >= record.draft.size() || edge.final_index >= record.final.size()) {
        throw RecordError(line_no, "edges",
                          "edge [" + std::to_string(edge.draft_index) + ", " +
                              std::to_string(edge.final_index) + "] is out of bounds");
      }
      if (seen[edge.draft_index]) {
        throw RecordError(line_no, "edges",
                          "draft index " + std::to_string(edge.draft_index) + " has several edges");
      }
      seen[edge.draft_index] = true;
    }
  }
}

PatentRecord parse_record(std::string_view line, std::size_t line_no) {
  ordered_json obj;
  try {
    obj = ordered_json::parse(line);
  } catch (const ordered_json::parse_error& e) {
    throw RecordError(line_no, "", std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw RecordError(line_no, "", "expected a JSON object");

  static const std::set<std::string> known{"id", "draft", "cited", "final", "labels", "edges"};
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw RecordError(line_no, key, "unknown field");
  }

  PatentRecord record;
  if (!obj.contains("id")) throw RecordError(line_no, "id", "missing required field");
  if (!obj["id"].is_string()) throw RecordError(line_no, "id", "must be a string");
  record.id = obj["id"].get<std::string>();

  if (!obj.contains("draft")) throw RecordError(line_no, "draft", "missing required field");
  record.draft = string_array(obj["draft"], line_no, "draft");
  if (obj.contains("cited")) record.cited = string_array(obj["cited"], line_no, "cited");
  if (obj.contains("final")) record.final = string_array(obj["final"], line_no, "final");

  if (obj.contains("labels")) {
    const auto& value = obj["labels"];
    if (!value.is_array()) throw RecordError(line_no, "labels", "must be an array");
    std::vector<EditLabel> labels;
    for (const auto& item : value) {
      if (!item.is_string()) throw RecordError(line_no, "labels", "entries must be strings");
      try {
        labels.push_back(parse_label(item.get<std::string>()));
      } catch (const std::invalid_argument& e) {
        throw RecordError(line_no, "labels", e.what());
      }
    }
    record.labels = std::move(labels);
  }

  if (obj.contains("edges")) {
    const auto& value = obj["edges"];
    if (!value.is_array()) throw RecordError(line_no, "edges", "must be an array");
    std::vector<SentenceEdge> edges;
    for (const auto& item : value) {
      if (!item.is_array() || item.size() != 2 || !item[0].is_number_unsigned() ||
          !item[1].is_number_unsigned()) {
        throw RecordError(line_no, "edges", "entries must be [draft_index, final_index] pairs");
      }
      edges.push_back({item[0].get<std::size_t>(), item[1].get<std::size_t>()});
    }
    record.edges = std::move(edges);
  }

  validate_record(record, line_no);
  return record;
}

std::string format_record(const PatentRecord& record) {
  ordered_json obj;
  obj["id"] = record.id;
  obj["draft"] = record.draft;
  obj["cited"] = record.cited;
  obj["final"] = record.final;
  if (record.labels) {
    auto labels = ordered_json::array();
    for (auto label : *record.labels) labels.push_back(label_code(label));
    obj["labels"] = std::move(labels);
  }
  if (record.edges) {
    auto edges = ordered_json::array();
    for (const auto& e : *record.edges) edges.push_back({e.draft_index, e.final_index});
    obj["edges"] = std::move(edges);
  }
  return obj.dump();
}

RecordReader::RecordReader(const std::filesystem::path& path) : in_(path) {
  if (!in_) throw std::runtime_error("cannot open " + path.string());
}

bool RecordReader::next(PatentRecord& record) {
  while (std::getline(in_, buffer_)) {
    ++line_no_;
    if (buffer_.find_first_not_of(" \t\r") == std::string::npos) continue;
    record = parse_record(buffer_, line_no_);
    return true;
  }
  return false;
}

std::vector<PatentRecord> read_records(const std::filesystem::path& path) {
  RecordReader reader(path);
  std::vector<PatentRecord> records;
  PatentRecord record;
  while (reader.next(record)) records.push_back(std::move(record));
  return records;
}

void write_records(const std::vector<PatentRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& record : records) out << format_record(record) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

StatsReport corpus_stats(const std::vector<PatentRecord>& records) {
  StatsReport report;
  report.records = records.size();
  for (const auto& record : records) {
    if (!record.labels) throw std::invalid_argument("record " + record.id + " has no labels");
    report.sentences += record.labels->size();
    for (auto label : *record.labels) ++report.counts[label_index(label)];
  }
  if (report.sentences > 0) {
    for (std::size_t c = 0; c < 3; ++c) {
      report.fractions[c] =
          static_cast<double>(report.counts[c]) / static_cast<double>(report.sentences);
    }
  }
  if (report.records > 0) {
    report.mean_sentences_per_record =
        static_cast<double>(report.sentences) / static_cast<double>(report.records);
  }
  return report;
}

void SplitSpec::validate() const {
  if (!(train_fraction > 0.0 && validation_fraction > 0.0 && test_fraction > 0.0)) {
    throw std::invalid_argument("split fractions must be positive");
  }
  if (std::abs(train_fraction + validation_fraction + test_fraction - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must sum to 1");
  }
}

DatasetSplits stratified_split(const std::vector<PatentRecord>& records, const SplitSpec& spec) {
  spec.validate();
  const std::size_t n = records.size();
  if (n < 10) throw std::invalid_argument("stratified_split needs at least 10 records");

  const auto n_validation = static_cast<std::int64_t>(std::llround(static_cast<double>(n) * spec.validation_fraction));
  const auto n_test = static_cast<std::int64_t>(std::llround(static_cast<double>(n) * spec.test_fraction));
  const std::int64_t n_train = static_cast<std::int64_t>(n) - n_validation - n_test;
  if (n_train < 1 || n_validation < 1 || n_test < 1) {
    throw std::invalid_argument("too few records (" + std::to_string(n) +
                                ") to fill every split at these fractions");
  }
  const std::array<std::int64_t, 3> sizes{n_train, n_validation, n_test};

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(spec.seed);
  fisher_yates(order, rng);

  std::vector<EditLabel> bins(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!records[i].labels) {
      throw std::invalid_argument("record " + records[i].id + " has no labels");
    }
    bins[i] = dominant_label(*records[i].labels);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return bins[a] < bins[b]; });

  // Deal each record to the split lagging furthest behind its quota. Lags stay
  // within one record, so every bin is spread proportionally and final sizes
  // are exact.
  std::array<std::vector<std::size_t>, 3> members;
  std::array<std::int64_t, 3> assigned{};
  const auto total = static_cast<std::int64_t>(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pick = 0;
    std::int64_t best_lag = std::numeric_limits<std::int64_t>::min();
    for (std::size_t s = 0; s < 3; ++s) {
      const std::int64_t lag = sizes[s] * static_cast<std::int64_t>(k + 1) - assigned[s] * total;
      if (lag > best_lag) {
        best_lag = lag;
        pick = s;
      }
    }
    ++assigned[pick];
    members[pick].push_back(order[k]);
  }
  if (assigned != sizes) throw std::logic_error("stratified_split: quota dealing drifted");

  auto collect = [&](std::vector<std::size_t>& idx) {
    std::sort(idx.begin(), idx.end());
    std::vector<PatentRecord> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(records[i]);
    return out;
  };
  return {collect(members[0]), collect(members[1]), collect(members[2])};
}

std::vector<LabeledSentence> labeled_sentences(const std::vector<PatentRecord>& records) {
  std::vector<LabeledSentence> out;
  for (const auto& record : records) {
    if (!record.labels) throw std::invalid_argument("record " + record.id + " has no labels");
    for (std::size_t i = 0; i < record.draft.size(); ++i) {
      out.push_back({record.draft[i], (*record.labels)[i]});
    }
  }
  return out;
}

std::vector<LabeledSentence> undersample(const std::vector<LabeledSentence>& examples,
                                         std::uint64_t seed) {
  if (examples.empty()) throw std::invalid_argument("undersample: no examples");
  std::array<std::vector<std::size_t>, 3> by_class;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    by_class[label_index(examples[i].label)].push_back(i);
  }
  std::size_t target = std::numeric_limits<std::size_t>::max();
  for (const auto& members : by_class) {
    if (!members.empty()) target = std::min(target, members.size());
  }
  if (target == std::numeric_limits<std::size_t>::max()) return {};

  std::mt19937_64 rng(seed);
  std::vector<bool> keep(examples.size(), false);
  for (auto& members : by_class) {
    // Partial Fisher-Yates: the first `target` slots become a uniform sample.
    for (std::size_t i = 0; i < target && i < members.size(); ++i) {
      std::swap(members[i], members[i + uniform_below(rng, members.size() - i)]);
      keep[members[i]] = true;
    }
  }
  std::vector<LabeledSentence> out;
  out.reserve(target * 3);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (keep[i]) out.push_back(examples[i]);
  }
  return out;
}

std::vector<Triplet> build_triplets(const std::vector<PatentRecord>& records,
                                    const ScorerSpec& cited_ranker, std::size_t limit) {
  std::vector<Triplet> out;
  for (const auto& record : records) {
    if (out.size() >= limit) break;
    if (record.cited.empty()) continue;
    if (!record.labels || !record.edges) {
      throw std::invalid_argument("record " + record.id + " needs labels and edges");
    }

    std::vector<std::optional<std::size_t>> final_of(record.draft.size());
    for (const auto& e : *record.edges) final_of[e.draft_index] = e.final_index;

    std::optional<SimilarityMatrix> external;
    if (cited_ranker.kind == ScorerSpec::Kind::External) {
      auto spec = ScorerSpec::external(cited_ranker.matrix_path / (record.id + ".txt"));
      external = score_matrix(record.draft, record.cited, spec);
    }
    std::vector<TokenSequence> cited_tokens;
    if (!external) {
      for (const auto& s : record.cited) cited_tokens.push_back(tokenize(s));
    }

    for (std::size_t i = 0; i < record.draft.size() && out.size() < limit; ++i) {
      if ((*record.labels)[i] != EditLabel::Edited || !final_of[i]) continue;
      const TokenSequence anchor = external ? TokenSequence{} : tokenize(record.draft[i]);
      std::size_t best = 0;
      double best_score = -1.0;
      for (std::size_t k = 0; k < record.cited.size(); ++k) {
        double s = 0.0;
        if (external) {
          s = (*external)(i, k);
        } else if (!anchor.empty() && !cited_tokens[k].empty()) {
          s = score(cited_ranker.metric, anchor, cited_tokens[k]);
        }
        if (s > best_score) {
          best_score = s;
          best = k;
        }
      }
      out.push_back({record.draft[i], record.cited[best], record.final[*final_of[i]], record.id});
    }
  }
  return out;
}

double triplet_loss(double d_ap, double d_an, double alpha) {
  if (!(d_ap >= 0.0) || !(d_an >= 0.0)) {
    throw std::invalid_argument("triplet_loss: distances must be non-negative");
  }
  return std::max(0.0, d_ap - d_an + alpha);
}

std::string format_labeled_sentence(const LabeledSentence& example) {
  ordered_json obj;
  obj["sentence"] = example.sentence;
  obj["label"] = label_code(example.label);
  return obj.dump();
}

std::string format_triplet(const Triplet& triplet) {
  ordered_json obj;
  obj["anchor"] = triplet.anchor;
  obj["positive"] = triplet.positive;
  obj["negative"] = triplet.negative;
  obj["record_id"] = triplet.record_id;
  return obj.dump();
}

}  // namespace claimalign
