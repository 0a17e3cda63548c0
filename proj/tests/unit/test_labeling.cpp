#include <doctest.h>

#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "claimalign/labeling.hpp"
#include "support/synthetic.hpp"

using namespace claimalign;

namespace {

std::string twenty_words() {
  std::string s;
  for (int i = 0; i < 20; ++i) s += (i ? " w" : "w") + std::to_string(i);
  return s;
}

}  // namespace

TEST_CASE("classify_pair") {
  const LabelConfig config;
  CHECK(classify_pair("a radiation image projector", "a radiation image projector", config) ==
        EditLabel::Kept);
  CHECK(classify_pair("a b c d", "w x y z", config) == EditLabel::Edited);

  const auto original = twenty_words();
  auto changed = original;
  changed.replace(changed.find("w9 "), 3, "zz ");
  // precisions 19/20, 17/19, 15/18, 13/17: geometric mean about 0.858
  CHECK(bleu(tokenize(changed), tokenize(original), 4) < 0.88);
  CHECK(classify_pair(changed, original, config) == EditLabel::Edited);

  CHECK_THROWS_AS(classify_pair("", "a", config), std::invalid_argument);
}

TEST_CASE("derive_labels examples") {
  const LabelConfig config;
  const std::vector<std::string> drafts{"a radiation image.", "the mirror reflects light.", "w x y z"};

  const auto same = derive_labels(drafts, drafts, config);
  CHECK(same.labels == std::vector<EditLabel>(3, EditLabel::Kept));
  REQUIRE(same.edges.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(same.edges[i].draft_index == i);
    CHECK(same.edges[i].final_index == i);
  }

  const auto none = derive_labels(drafts, {}, config);
  CHECK(none.labels == std::vector<EditLabel>(3, EditLabel::Deleted));
  CHECK(none.edges.empty());

  const auto concat = derive_labels({"a b c d e f", "g h i j k l"}, {"a b c d e f g h i j k l"}, config);
  CHECK(concat.labels == std::vector<EditLabel>{EditLabel::Edited, EditLabel::Edited});
  REQUIRE(concat.edges.size() == 2);
  CHECK(concat.edges[0].draft_index == 0);
  CHECK(concat.edges[1].draft_index == 1);
  CHECK(concat.edges[0].final_index == 0);
  CHECK(concat.edges[1].final_index == 0);

  CHECK_THROWS_AS(derive_labels({}, drafts, config), std::invalid_argument);
}

TEST_CASE("sentences shorter than four tokens are never kept under bleu4") {
  // BLEU-4 is 0 when the candidate has no 4-gram, even for identical text
  const auto r = derive_labels({"x y z"}, {"x y z"}, LabelConfig{});
  CHECK(r.labels == std::vector<EditLabel>{EditLabel::Edited});
  LabelConfig bleu1;
  bleu1.kept_metric = Metric::Bleu1;
  CHECK(derive_labels({"x y z"}, {"x y z"}, bleu1).labels == std::vector<EditLabel>{EditLabel::Kept});
}

TEST_CASE("derive_labels honours the configured matcher") {
  LabelConfig config;
  config.match_algorithm = MatchAlgorithm::DraftGreedy;
  const auto r = derive_labels({"a b c d e f", "g h i j k l"}, {"a b c d e f g h i j k l"}, config);
  // one-to-one matching leaves the second draft without a partner
  CHECK(r.labels == std::vector<EditLabel>{EditLabel::Edited, EditLabel::Deleted});
}

TEST_CASE("labeling invariants on synthetic documents") {
  claimalign::testing::SyntheticGenerator gen(17);
  for (int k = 0; k < 40; ++k) {
    const auto doc = gen.document("d" + std::to_string(k));
    for (auto algorithm : {MatchAlgorithm::MatchAndCover, MatchAlgorithm::DraftGreedy, MatchAlgorithm::FinalGreedy}) {
      LabelConfig config;
      config.match_algorithm = algorithm;
      const auto r = derive_labels(doc.record.draft, doc.record.final, config);
      REQUIRE(r.labels.size() == doc.record.draft.size());

      std::set<std::size_t> matched;
      for (const auto& e : r.edges) {
        matched.insert(e.draft_index);
        if (r.labels[e.draft_index] == EditLabel::Kept) {
          CHECK(score(Metric::Bleu4, tokenize(doc.record.draft[e.draft_index]),
                      tokenize(doc.record.final[e.final_index])) >= 0.88);
        }
      }
      for (std::size_t i = 0; i < r.labels.size(); ++i) {
        CHECK((r.labels[i] == EditLabel::Deleted) == (matched.count(i) == 0));
      }

      // raising the kept threshold only ever turns Kept into Edited
      LabelConfig strict = config;
      strict.kept_threshold = 0.99;
      const auto s = derive_labels(doc.record.draft, doc.record.final, strict);
      for (std::size_t i = 0; i < r.labels.size(); ++i) {
        if (r.labels[i] == EditLabel::Edited) CHECK(s.labels[i] == EditLabel::Edited);
      }
    }
  }
}

TEST_CASE("label codes") {
  for (auto l : kAllEditLabels) CHECK(parse_label(label_code(l)) == l);
  CHECK(label_code(EditLabel::Deleted) == "del");
  CHECK_THROWS_AS(parse_label("Keep"), std::invalid_argument);
}

TEST_CASE("label config files") {
  const LabelConfig defaults;
  CHECK(defaults.deleted_threshold == 0.45);
  CHECK(defaults.fraction_limit == 0.3);
  CHECK(defaults.kept_threshold == 0.88);
  CHECK(defaults.kept_metric == Metric::Bleu4);
  CHECK(defaults.match_scorer == ScorerSpec::builtin(Metric::RougeL));

  std::istringstream in(
      "# tuned on the dev set\n"
      "match_scorer = meteor\n"
      "\n"
      "match_algorithm = final_greedy  # trailing comment\n"
      "kept_threshold=0.9\n");
  const auto c = parse_label_config(in, "cfg");
  CHECK(c.match_scorer == ScorerSpec::builtin(Metric::Meteor));
  CHECK(c.match_algorithm == MatchAlgorithm::FinalGreedy);
  CHECK(c.kept_threshold == 0.9);
  CHECK(c.deleted_threshold == 0.45);

  std::ostringstream out;
  write_label_config(c, out);
  std::istringstream back(out.str());
  CHECK(parse_label_config(back, "round-trip") == c);

  auto parse = [](const std::string& text) {
    std::istringstream s(text);
    return parse_label_config(s, "bad");
  };
  CHECK_THROWS(parse("unknown_key = 1\n"));
  CHECK_THROWS(parse("kept_threshold = 1.5\n"));
  CHECK_THROWS(parse("kept_threshold = abc\n"));
  CHECK_THROWS(parse("fraction_limit = 0\n"));
  CHECK_THROWS(parse("no equals sign\n"));
}
