#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace claimalign {

/// Lowercased tokens of one sentence. Never contains empty strings.
using TokenSequence = std::vector<std::string>;

/// Lowercases ASCII letters, splits on whitespace and emits every ASCII
/// punctuation character as its own token. Bytes >= 0x80 are kept verbatim so
/// UTF-8 words survive intact.
TokenSequence tokenize(std::string_view text);

/// Joins tokens with single spaces.
std::string join_tokens(const TokenSequence& tokens);

// Sentence-pair similarity. Every metric returns a value in [0, 1] and throws
// std::invalid_argument when either input is empty.

/// Sentence BLEU with no smoothing: geometric mean of clipped n-gram precisions
/// for orders 1..max_order times the brevity penalty. Zero when any order has
/// no match or the candidate is shorter than max_order.
double bleu(const TokenSequence& candidate, const TokenSequence& reference, int max_order);

/// ROUGE-N F1 with clipped counts.
double rouge_n(const TokenSequence& candidate, const TokenSequence& reference, int order);

/// ROUGE-L F1 (beta = 1) on the longest common subsequence.
double rouge_l(const TokenSequence& candidate, const TokenSequence& reference);

/// Exact-match METEOR (alpha 0.9, beta 3, gamma 0.5).
///
/// Unigrams are aligned one-to-one by repeatedly fixing the longest run of
/// still-unaligned tokens that occurs contiguously in both sentences (ties go
/// to the earliest candidate position, then the earliest reference position).
/// The loop runs until no aligned pair is left, so the match count is always
/// the multiset intersection size; fixing long runs first keeps the chunk
/// count low.
double meteor(const TokenSequence& candidate, const TokenSequence& reference);

/// chrF: character n-grams of orders 1..6 with whitespace removed, precision and
/// recall averaged over the orders both strings can fill, then combined with
/// beta = 2. Operates on UTF-8 code points and is case sensitive.
double chrf(std::string_view candidate, std::string_view reference);

/// Length of the longest common subsequence.
std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b);

/// A longest common subsequence of a and b. Among all longest ones, returns the
/// one whose positions in `a` are lexicographically smallest (ties on `a` go to
/// the earliest positions in `b`).
TokenSequence lcs(const TokenSequence& a, const TokenSequence& b);

/// Deletes `subsequence` from `target` using its leftmost embedding. Throws
/// std::invalid_argument when `subsequence` does not occur in `target`.
TokenSequence remove_lcs(const TokenSequence& target, const TokenSequence& subsequence);

/// Built-in scoring methods addressable by name.
enum class Metric { Bleu1, Bleu4, Rouge1, RougeL, Meteor, Chrf };

/// bleu1 | bleu4 | rouge1 | rougeL | meteor | chrf
std::string_view metric_name(Metric metric);

/// Inverse of metric_name. Throws std::invalid_argument for unknown names.
Metric parse_metric(std::string_view name);

/// Applies `metric` with `candidate` as hypothesis. chrf sees the tokens joined
/// by single spaces.
double score(Metric metric, const TokenSequence& candidate, const TokenSequence& reference);

}  // namespace claimalign
