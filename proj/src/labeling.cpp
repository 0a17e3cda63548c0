#include "claimalign/labeling.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace claimalign {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view key, std::string_view value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument(std::string(key) + ": not a number: '" + std::string(value) + "'");
  }
  return out;
}

}  // namespace

std::string_view label_code(EditLabel label) {
  switch (label) {
    case EditLabel::Kept: return "keep";
    case EditLabel::Edited: return "edit";
    case EditLabel::Deleted: return "del";
  }
  return "?";
}

EditLabel parse_label(std::string_view code) {
  if (code == "keep") return EditLabel::Kept;
  if (code == "edit") return EditLabel::Edited;
  if (code == "del") return EditLabel::Deleted;
  throw std::invalid_argument("unknown edit label '" + std::string(code) + "' (expected keep|edit|del)");
}

void LabelConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(deleted_threshold)) throw std::invalid_argument("deleted_threshold must lie in [0, 1]");
  if (!in_unit(kept_threshold)) throw std::invalid_argument("kept_threshold must lie in [0, 1]");
  if (!(fraction_limit > 0.0 && fraction_limit < 1.0)) {
    throw std::invalid_argument("fraction_limit must lie in (0, 1)");
  }
  if (match_algorithm == MatchAlgorithm::MatchAndCover &&
      match_scorer.kind != ScorerSpec::Kind::Builtin) {
    throw std::invalid_argument("match_and_cover needs a built-in match_scorer");
  }
}

void LabelConfig::set(std::string_view key, std::string_view value) {
  if (key == "match_scorer") {
    match_scorer = ScorerSpec::parse(value);
  } else if (key == "match_algorithm") {
    match_algorithm = parse_algorithm(value);
  } else if (key == "deleted_threshold") {
    deleted_threshold = parse_real(key, value);
  } else if (key == "fraction_limit") {
    fraction_limit = parse_real(key, value);
  } else if (key == "kept_metric") {
    kept_metric = parse_metric(value);
  } else if (key == "kept_threshold") {
    kept_threshold = parse_real(key, value);
  } else {
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  }
}

LabelConfig parse_label_config(std::istream& in, const std::string& source_name) {
  LabelConfig config;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument(source_name + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(source_name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

LabelConfig read_label_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return parse_label_config(in, path.string());
}

void write_label_config(const LabelConfig& config, std::ostream& out) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "match_scorer = " << config.match_scorer.to_string() << '\n'
      << "match_algorithm = " << algorithm_name(config.match_algorithm) << '\n'
      << "deleted_threshold = " << config.deleted_threshold << '\n'
      << "fraction_limit = " << config.fraction_limit << '\n'
      << "kept_metric = " << metric_name(config.kept_metric) << '\n'
      << "kept_threshold = " << config.kept_threshold << '\n';
  out.precision(old_precision);
}

EditLabel classify_pair(std::string_view draft, std::string_view final_sentence,
                        const LabelConfig& config) {
  if (draft.empty() || final_sentence.empty()) {
    throw std::invalid_argument("classify_pair: empty sentence");
  }
  const double similarity = score(config.kept_metric, tokenize(draft), tokenize(final_sentence));
  return similarity >= config.kept_threshold ? EditLabel::Kept : EditLabel::Edited;
}

LabelResult derive_labels(const std::vector<std::string>& drafts,
                          const std::vector<std::string>& finals, const LabelConfig& config) {
  config.validate();
  if (drafts.empty()) throw std::invalid_argument("derive_labels: no draft sentences");
  LabelResult result;
  result.labels.assign(drafts.size(), EditLabel::Deleted);
  if (finals.empty()) return result;

  MatchResult matches;
  switch (config.match_algorithm) {
    case MatchAlgorithm::DraftGreedy:
      matches = draft_side_greedy(score_matrix(drafts, finals, config.match_scorer),
                                  config.deleted_threshold);
      break;
    case MatchAlgorithm::FinalGreedy:
      matches = final_side_greedy(score_matrix(drafts, finals, config.match_scorer),
                                  config.deleted_threshold);
      break;
    case MatchAlgorithm::MatchAndCover: {
      std::vector<TokenSequence> draft_tokens, final_tokens;
      draft_tokens.reserve(drafts.size());
      final_tokens.reserve(finals.size());
      for (const auto& s : drafts) draft_tokens.push_back(tokenize(s));
      for (const auto& s : finals) final_tokens.push_back(tokenize(s));
      matches = match_and_cover(draft_tokens, final_tokens, config.match_scorer,
                                config.deleted_threshold, config.fraction_limit);
      break;
    }
  }

  for (const auto& edge : matches.edges) {
    result.labels[edge.draft_index] =
        classify_pair(drafts[edge.draft_index], finals[edge.final_index], config);
  }
  result.edges = std::move(matches.edges);
  return result;
}

}  // namespace claimalign
