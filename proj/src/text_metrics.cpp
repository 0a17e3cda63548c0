#include "claimalign/text_metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace claimalign {
namespace {

bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

bool is_ascii_punct(unsigned char c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
         (c >= '{' && c <= '~');
}

void require_nonempty(const TokenSequence& candidate, const TokenSequence& reference,
                      const char* metric) {
  if (candidate.empty() || reference.empty()) {
    throw std::invalid_argument(std::string(metric) + ": empty token sequence");
  }
}

using NgramCounts = std::unordered_map<std::string, int>;

// Keys join tokens with a unit separator, which tokenize() never produces
// inside a token.
NgramCounts count_ngrams(const TokenSequence& tokens, std::size_t order) {
  NgramCounts counts;
  if (tokens.size() < order) return counts;
  for (std::size_t start = 0; start + order <= tokens.size(); ++start) {
    std::string key = tokens[start];
    for (std::size_t k = 1; k < order; ++k) {
      key += '\x1f';
      key += tokens[start + k];
    }
    ++counts[key];
  }
  return counts;
}

template <typename Counts>
long clipped_overlap(const Counts& candidate, const Counts& reference) {
  long overlap = 0;
  for (const auto& [gram, count] : candidate) {
    auto it = reference.find(gram);
    if (it != reference.end()) overlap += std::min(count, it->second);
  }
  return overlap;
}

// Suffix table: cell (i, j) holds |LCS(a[i:], b[j:])|.
std::vector<std::size_t> suffix_lcs_table(const TokenSequence& a, const TokenSequence& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::size_t> table((n + 1) * (m + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return table[i * (m + 1) + j]; };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      at(i, j) = a[i] == b[j] ? at(i + 1, j + 1) + 1 : std::max(at(i + 1, j), at(i, j + 1));
    }
  }
  return table;
}

std::u32string decode_without_whitespace(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    if (is_ascii_space(lead)) {
      ++i;
      continue;
    }
    std::size_t len = lead < 0x80 ? 1 : (lead >> 5) == 0x6 ? 2 : (lead >> 4) == 0xE ? 3
                                      : (lead >> 3) == 0x1E ? 4 : 0;
    bool valid = len > 0 && i + len <= text.size();
    for (std::size_t k = 1; valid && k < len; ++k) {
      valid = (static_cast<unsigned char>(text[i + k]) & 0xC0) == 0x80;
    }
    if (!valid) {
      // Stray byte: keep it as its own symbol.
      out.push_back(lead);
      ++i;
      continue;
    }
    char32_t cp = len == 1 ? lead : lead & (0x7F >> len);
    for (std::size_t k = 1; k < len; ++k) {
      cp = (cp << 6) | (static_cast<unsigned char>(text[i + k]) & 0x3F);
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

}  // namespace

TokenSequence tokenize(std::string_view text) {
  TokenSequence tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_ascii_space(c)) {
      flush();
    } else if (is_ascii_punct(c)) {
      flush();
      tokens.emplace_back(1, ch);
    } else if (c >= 'A' && c <= 'Z') {
      current.push_back(static_cast<char>(c - 'A' + 'a'));
    } else {
      current.push_back(ch);
    }
  }
  flush();
  return tokens;
}

std::string join_tokens(const TokenSequence& tokens) {
  std::string out;
  for (const auto& token : tokens) {
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

double bleu(const TokenSequence& candidate, const TokenSequence& reference, int max_order) {
  if (max_order < 1) throw std::invalid_argument("bleu: max_order must be >= 1");
  require_nonempty(candidate, reference, "bleu");
  const auto order = static_cast<std::size_t>(max_order);
  if (candidate.size() < order) return 0.0;

  double log_precision_sum = 0.0;
  for (std::size_t n = 1; n <= order; ++n) {
    const long matched = clipped_overlap(count_ngrams(candidate, n), count_ngrams(reference, n));
    if (matched == 0) return 0.0;
    const auto total = static_cast<double>(candidate.size() - n + 1);
    log_precision_sum += std::log(static_cast<double>(matched) / total);
  }
  const auto c = static_cast<double>(candidate.size());
  const auto r = static_cast<double>(reference.size());
  const double brevity = c < r ? std::exp(1.0 - r / c) : 1.0;
  return brevity * std::exp(log_precision_sum / static_cast<double>(order));
}

double rouge_n(const TokenSequence& candidate, const TokenSequence& reference, int order) {
  if (order < 1) throw std::invalid_argument("rouge_n: order must be >= 1");
  require_nonempty(candidate, reference, "rouge_n");
  const auto n = static_cast<std::size_t>(order);
  if (candidate.size() < n || reference.size() < n) return 0.0;
  const long matched = clipped_overlap(count_ngrams(candidate, n), count_ngrams(reference, n));
  if (matched == 0) return 0.0;
  const double precision = static_cast<double>(matched) / static_cast<double>(candidate.size() - n + 1);
  const double recall = static_cast<double>(matched) / static_cast<double>(reference.size() - n + 1);
  return 2.0 * precision * recall / (precision + recall);
}

std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (const auto& x : a) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      cur[j + 1] = x == b[j] ? prev[j] + 1 : std::max(prev[j + 1], cur[j]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(const TokenSequence& candidate, const TokenSequence& reference) {
  require_nonempty(candidate, reference, "rouge_l");
  const auto common = static_cast<double>(lcs_length(candidate, reference));
  if (common == 0.0) return 0.0;
  const double precision = common / static_cast<double>(candidate.size());
  const double recall = common / static_cast<double>(reference.size());
  return 2.0 * precision * recall / (precision + recall);
}

double meteor(const TokenSequence& candidate, const TokenSequence& reference) {
  require_nonempty(candidate, reference, "meteor");
  const std::size_t n = candidate.size();
  const std::size_t m = reference.size();
  std::vector<bool> cand_used(n, false), ref_used(m, false);
  std::vector<std::pair<std::size_t, std::size_t>> alignment;

  // run(i, j): length of the free matching run ending at candidate i-1, reference j-1.
  std::vector<std::size_t> run((n + 1) * (m + 1));
  for (;;) {
    std::fill(run.begin(), run.end(), 0);
    std::size_t best_len = 0, best_i = 0, best_j = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 1; j <= m; ++j) {
        if (cand_used[i - 1] || ref_used[j - 1] || candidate[i - 1] != reference[j - 1]) continue;
        const std::size_t len = run[(i - 1) * (m + 1) + (j - 1)] + 1;
        run[i * (m + 1) + j] = len;
        const std::size_t si = i - len, sj = j - len;
        if (len > best_len || (len == best_len && (si < best_i || (si == best_i && sj < best_j)))) {
          best_len = len;
          best_i = si;
          best_j = sj;
        }
      }
    }
    if (best_len == 0) break;
    for (std::size_t k = 0; k < best_len; ++k) {
      cand_used[best_i + k] = true;
      ref_used[best_j + k] = true;
      alignment.emplace_back(best_i + k, best_j + k);
    }
  }
  if (alignment.empty()) return 0.0;

  std::sort(alignment.begin(), alignment.end());
  std::size_t chunks = 1;
  for (std::size_t k = 1; k < alignment.size(); ++k) {
    const auto& [pi, pj] = alignment[k - 1];
    const auto& [ci, cj] = alignment[k];
    if (ci != pi + 1 || cj != pj + 1) ++chunks;
  }

  const auto matches = static_cast<double>(alignment.size());
  const double precision = matches / static_cast<double>(n);
  const double recall = matches / static_cast<double>(m);
  const double fmean = 10.0 * precision * recall / (recall + 9.0 * precision);
  const double fragmentation = static_cast<double>(chunks) / matches;
  const double penalty = 0.5 * fragmentation * fragmentation * fragmentation;
  return fmean * (1.0 - penalty);
}

double chrf(std::string_view candidate, std::string_view reference) {
  if (candidate.empty() || reference.empty()) {
    throw std::invalid_argument("chrf: empty string");
  }
  constexpr std::size_t kMaxOrder = 6;
  constexpr double kBetaSquared = 4.0;
  const std::u32string hyp = decode_without_whitespace(candidate);
  const std::u32string ref = decode_without_whitespace(reference);

  double precision_sum = 0.0, recall_sum = 0.0;
  long total_matches = 0;
  int effective_orders = 0;
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    if (hyp.size() < n || ref.size() < n) break;
    std::unordered_map<std::u32string, int> hyp_counts, ref_counts;
    for (std::size_t i = 0; i + n <= hyp.size(); ++i) ++hyp_counts[hyp.substr(i, n)];
    for (std::size_t i = 0; i + n <= ref.size(); ++i) ++ref_counts[ref.substr(i, n)];
    const long matched = clipped_overlap(hyp_counts, ref_counts);
    total_matches += matched;
    precision_sum += static_cast<double>(matched) / static_cast<double>(hyp.size() - n + 1);
    recall_sum += static_cast<double>(matched) / static_cast<double>(ref.size() - n + 1);
    ++effective_orders;
  }
  if (total_matches == 0) return 0.0;
  const double precision = precision_sum / effective_orders;
  const double recall = recall_sum / effective_orders;
  return (1.0 + kBetaSquared) * precision * recall / (kBetaSquared * precision + recall);
}

TokenSequence lcs(const TokenSequence& a, const TokenSequence& b) {
  TokenSequence out;
  if (a.empty() || b.empty()) return out;
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const auto table = suffix_lcs_table(a, b);
  auto at = [&](std::size_t i, std::size_t j) { return table[i * (m + 1) + j]; };

  std::size_t need = at(0, 0);
  std::size_t i = 0, j = 0;
  while (need > 0) {
    // Earliest a-position that still completes an optimal subsequence, matched
    // against its earliest occurrence in b.
    for (; i < n; ++i) {
      std::size_t k = j;
      while (k < m && b[k] != a[i]) ++k;
      if (k < m && at(i + 1, k + 1) + 1 == need) {
        out.push_back(a[i]);
        j = k + 1;
        ++i;
        --need;
        break;
      }
    }
  }
  return out;
}

TokenSequence remove_lcs(const TokenSequence& target, const TokenSequence& subsequence) {
  TokenSequence rest;
  rest.reserve(target.size());
  std::size_t k = 0;
  for (const auto& token : target) {
    if (k < subsequence.size() && token == subsequence[k]) {
      ++k;
    } else {
      rest.push_back(token);
    }
  }
  if (k != subsequence.size()) {
    throw std::invalid_argument("remove_lcs: sequence is not a subsequence of the target");
  }
  return rest;
}

namespace {
constexpr std::array<std::pair<Metric, std::string_view>, 6> kMetricNames{{
    {Metric::Bleu1, "bleu1"},
    {Metric::Bleu4, "bleu4"},
    {Metric::Rouge1, "rouge1"},
    {Metric::RougeL, "rougeL"},
    {Metric::Meteor, "meteor"},
    {Metric::Chrf, "chrf"},
}};
}  // namespace

std::string_view metric_name(Metric metric) {
  for (const auto& [m, name] : kMetricNames) {
    if (m == metric) return name;
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  for (const auto& [m, n] : kMetricNames) {
    if (n == name) return m;
  }
  throw std::invalid_argument("unknown metric '" + std::string(name) +
                              "' (expected bleu1|bleu4|rouge1|rougeL|meteor|chrf)");
}

double score(Metric metric, const TokenSequence& candidate, const TokenSequence& reference) {
  switch (metric) {
    case Metric::Bleu1: return bleu(candidate, reference, 1);
    case Metric::Bleu4: return bleu(candidate, reference, 4);
    case Metric::Rouge1: return rouge_n(candidate, reference, 1);
    case Metric::RougeL: return rouge_l(candidate, reference);
    case Metric::Meteor: return meteor(candidate, reference);
    case Metric::Chrf: {
      require_nonempty(candidate, reference, "chrf");
      return chrf(join_tokens(candidate), join_tokens(reference));
    }
  }
  throw std::invalid_argument("unknown metric");
}

}  // namespace claimalign
