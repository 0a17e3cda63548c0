#pragma once

// Synthetic revised documents with known construction edges and labels.
// Final sentences are built from drafts by verbatim copy (kept), replacing at
// least 30% of the tokens (edited), dropping the draft (deleted), or
// concatenating two drafts into one final sentence (both edited).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "claimalign/corpus.hpp"

namespace claimalign::testing {

struct SyntheticOptions {
  int min_drafts = 6;
  int max_drafts = 14;
  int min_length = 10;
  int max_length = 20;
  int vocabulary = 5000;
  int cited = 3;
};

struct SyntheticDocument {
  PatentRecord record;  // id, draft, cited, final; no labels or edges
  std::vector<SentenceEdge> gold_edges;
  std::vector<EditLabel> gold_labels;
};

class SyntheticGenerator {
 public:
  explicit SyntheticGenerator(std::uint64_t seed, SyntheticOptions options = {})
      : rng_(seed), options_(options) {}

  SyntheticDocument document(const std::string& id) {
    using Words = std::vector<std::string>;
    const int n = draw(options_.min_drafts, options_.max_drafts);
    std::vector<Words> drafts;
    for (int i = 0; i < n; ++i) drafts.push_back(sentence());

    enum class Fate { Copy, Edit, Delete, Concat };
    std::vector<Fate> fates;
    for (int i = 0; i < n; ++i) {
      const double r = unit();
      fates.push_back(r < 0.45 ? Fate::Copy : r < 0.7 ? Fate::Edit : r < 0.85 ? Fate::Delete : Fate::Concat);
    }

    SyntheticDocument doc;
    doc.gold_labels.assign(n, EditLabel::Deleted);
    std::vector<Words> finals;
    std::vector<std::vector<std::size_t>> sources;  // drafts behind each final
    int pending_concat = -1;
    for (int i = 0; i < n; ++i) {
      switch (fates[i]) {
        case Fate::Copy:
          finals.push_back(drafts[i]);
          sources.push_back({static_cast<std::size_t>(i)});
          doc.gold_labels[i] = EditLabel::Kept;
          break;
        case Fate::Edit:
          finals.push_back(replace_tokens(drafts[i]));
          sources.push_back({static_cast<std::size_t>(i)});
          doc.gold_labels[i] = EditLabel::Edited;
          break;
        case Fate::Delete:
          break;
        case Fate::Concat:
          if (pending_concat < 0) {
            pending_concat = i;
          } else {
            Words joined = drafts[pending_concat];
            joined.insert(joined.end(), drafts[i].begin(), drafts[i].end());
            finals.push_back(joined);
            sources.push_back({static_cast<std::size_t>(pending_concat), static_cast<std::size_t>(i)});
            doc.gold_labels[pending_concat] = EditLabel::Edited;
            doc.gold_labels[i] = EditLabel::Edited;
            pending_concat = -1;
          }
          break;
      }
    }
    if (pending_concat >= 0) {  // unpaired: keep it verbatim
      finals.push_back(drafts[pending_concat]);
      sources.push_back({static_cast<std::size_t>(pending_concat)});
      doc.gold_labels[pending_concat] = EditLabel::Kept;
    }

    std::vector<std::size_t> order(finals.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::shuffle(order.begin(), order.end(), rng_);

    doc.record.id = id;
    for (const auto& d : drafts) doc.record.draft.push_back(render(d));
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      doc.record.final.push_back(render(finals[order[pos]]));
      for (auto src : sources[order[pos]]) doc.gold_edges.push_back({src, pos});
    }
    std::sort(doc.gold_edges.begin(), doc.gold_edges.end());

    for (int k = 0; k < options_.cited; ++k) {
      Words cited = sentence();
      const auto& donor = drafts[draw(0, n - 1)];
      for (std::size_t t = 0; t < cited.size() && t < donor.size(); t += 2) cited[t] = donor[t];
      doc.record.cited.push_back(render(cited));
    }
    return doc;
  }

  std::vector<SyntheticDocument> corpus(std::size_t documents, const std::string& prefix = "doc") {
    std::vector<SyntheticDocument> out;
    for (std::size_t k = 0; k < documents; ++k) out.push_back(document(prefix + std::to_string(k)));
    return out;
  }

 private:
  int draw(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  std::string word() { return "w" + std::to_string(draw(0, options_.vocabulary - 1)); }

  std::vector<std::string> sentence() {
    std::vector<std::string> words;
    const int len = draw(options_.min_length, options_.max_length);
    for (int i = 0; i < len; ++i) words.push_back(word());
    return words;
  }

  // Replaces between 30% and 45% of the positions with different words.
  std::vector<std::string> replace_tokens(std::vector<std::string> words) {
    const auto len = static_cast<int>(words.size());
    const int count = std::min(len, static_cast<int>(std::ceil(0.3 * len)) + draw(0, len * 15 / 100));
    std::vector<int> positions(len);
    for (int i = 0; i < len; ++i) positions[i] = i;
    std::shuffle(positions.begin(), positions.end(), rng_);
    for (int k = 0; k < count; ++k) {
      std::string fresh = word();
      while (fresh == words[positions[k]]) fresh = word();
      words[positions[k]] = fresh;
    }
    return words;
  }

  static std::string render(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
      if (!out.empty()) out += ' ';
      out += w;
    }
    return out + ".";
  }

  std::mt19937_64 rng_;
  SyntheticOptions options_;
};

}  // namespace claimalign::testing
