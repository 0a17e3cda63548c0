#include <doctest.h>

#include <algorithm>
#include <random>
#include <stdexcept>
#include <limits>
#include <set>
#include <sstream>

#include "claimalign/alignment.hpp"
#include "support/temp_dir.hpp"

using namespace claimalign;
using claimalign::testing::TempDir;

namespace {

SimilarityMatrix grid(std::vector<std::vector<double>> rows) {
  std::vector<double> values;
  for (const auto& r : rows) values.insert(values.end(), r.begin(), r.end());
  return SimilarityMatrix(rows.size(), rows.empty() ? 0 : rows[0].size(), values);
}

SimilarityMatrix identity(std::size_t n) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  return SimilarityMatrix(n, n, v);
}

SimilarityMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = u(rng);
  return SimilarityMatrix(rows, cols, v);
}

std::vector<std::pair<std::size_t, std::size_t>> pairs(const MatchResult& r) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& e : r.edges) out.emplace_back(e.draft_index, e.final_index);
  return out;
}

bool drafts_unique(const MatchResult& r) {
  std::set<std::size_t> seen;
  for (const auto& e : r.edges) {
    if (!seen.insert(e.draft_index).second) return false;
  }
  return true;
}

bool finals_unique(const MatchResult& r) {
  std::set<std::size_t> seen;
  for (const auto& e : r.edges) {
    if (!seen.insert(e.final_index).second) return false;
  }
  return true;
}

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

}  // namespace

TEST_CASE("score_matrix with built-in metrics") {
  const auto m = score_matrix({"a b"}, {"a b"}, ScorerSpec::builtin(Metric::RougeL));
  CHECK(m.rows() == 1);
  CHECK(m.cols() == 1);
  CHECK(m(0, 0) == 1.0);
  CHECK(score_matrix({"a"}, {"b"}, ScorerSpec::builtin(Metric::Bleu1))(0, 0) == 0.0);

  const auto rect = score_matrix({"a b c", "d e"}, {"a b", "d e f", "q"}, ScorerSpec::builtin(Metric::Rouge1));
  CHECK(rect.rows() == 2);
  CHECK(rect.cols() == 3);
  CHECK(rect(0, 0) == doctest::Approx(0.8));
  CHECK(rect(1, 1) == doctest::Approx(0.8));
  CHECK(rect(1, 2) == 0.0);

  // whitespace-only sentences cannot match anything
  CHECK(score_matrix({"  "}, {"a"}, ScorerSpec::builtin(Metric::Bleu4))(0, 0) == 0.0);
}

TEST_CASE("external score matrix files") {
  TempDir dir;
  const auto path = dir / "m.txt";
  claimalign::testing::spit(path, "2 3\n0.1 0.2 0.3\n0.4 0.5 1\n");
  const auto m = score_matrix({"x", "y"}, {"p", "q", "r"}, ScorerSpec::external(path));
  CHECK(m.values() == std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 1.0});

  SUBCASE("write and re-read echoes values exactly") {
    std::ostringstream out;
    write_score_matrix(m, out);
    std::istringstream in(out.str());
    CHECK(parse_score_matrix(in, "mem").values() == m.values());
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(score_matrix({"x"}, {"p", "q", "r"}, ScorerSpec::external(path)), std::runtime_error);
  }
  SUBCASE("malformed files") {
    auto load = [&](const std::string& text) {
      claimalign::testing::spit(dir / "bad.txt", text);
      return read_score_matrix(dir / "bad.txt");
    };
    CHECK_THROWS_WITH_AS(load("1 2\n0.5 1.5\n"), doctest::Contains(":2:"), std::runtime_error);
    CHECK_THROWS_AS(load("1 2\n0.5\n"), std::runtime_error);
    CHECK_THROWS_AS(load("2 1\n0.5\n"), std::runtime_error);
    CHECK_THROWS_AS(load("1 1\n0.5\n0.5\n"), std::runtime_error);
    CHECK_THROWS_AS(load("1 1\nabc\n"), std::runtime_error);
    CHECK_THROWS_AS(load(""), std::runtime_error);
    CHECK_THROWS_AS(load("1 1\n-0.1\n"), std::runtime_error);
  }
  CHECK_THROWS_AS(read_score_matrix(dir / "missing.txt"), std::runtime_error);
}

TEST_CASE("scorer spec parsing") {
  CHECK(ScorerSpec::parse("bleu4") == ScorerSpec::builtin(Metric::Bleu4));
  const auto ext = ScorerSpec::parse("external:/tmp/scores");
  CHECK(ext.kind == ScorerSpec::Kind::External);
  CHECK(ext.matrix_path == "/tmp/scores");
  CHECK(ext.to_string() == "external:/tmp/scores");
  CHECK_THROWS_AS(ScorerSpec::parse("external:"), std::invalid_argument);
  CHECK_THROWS_AS(ScorerSpec::parse("nope"), std::invalid_argument);
}

TEST_CASE("draft_side_greedy") {
  CHECK(pairs(draft_side_greedy(identity(4), 0.45)) == Pairs{{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  CHECK(draft_side_greedy(grid({{0, 0}, {0, 0}}), 0.45).edges.empty());

  const auto r = draft_side_greedy(grid({{0.9, 0.8}, {0.9, 0.2}}), 0.45);
  CHECK(pairs(r) == Pairs{{0, 0}});
  CHECK(r.edges[0].score == 0.9);
  CHECK(r.algorithm == MatchAlgorithm::DraftGreedy);

  // ties go to the lowest final index
  CHECK(pairs(draft_side_greedy(grid({{0.7, 0.7}}), 0.45)) == Pairs{{0, 0}});
  // threshold is inclusive
  CHECK(pairs(draft_side_greedy(grid({{0.45}}), 0.45)) == Pairs{{0, 0}});
  CHECK_THROWS_AS(draft_side_greedy(identity(2), 1.5), std::invalid_argument);
}

TEST_CASE("final_side_greedy") {
  CHECK(pairs(final_side_greedy(identity(3), 0.45)) == Pairs{{0, 0}, {1, 1}, {2, 2}});
  CHECK(final_side_greedy(grid({{0.1, 0.2}, {0.3, 0.4}}), 0.45).edges.empty());
  CHECK(pairs(final_side_greedy(grid({{0.9, 0.8}, {0.85, 0.2}}), 0.45)) == Pairs{{0, 0}});
  CHECK(pairs(final_side_greedy(grid({{0.6}, {0.6}}), 0.45)) == Pairs{{0, 0}});
}

TEST_CASE("greedy matcher properties on random matrices") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = random_matrix(rng, 1 + rng() % 8, 1 + rng() % 8);
    for (auto matcher : {&draft_side_greedy, &final_side_greedy}) {
      std::size_t previous = std::numeric_limits<std::size_t>::max();
      for (double t : {0.0, 0.2, 0.45, 0.7, 0.9, 1.0}) {
        const auto r = matcher(m, t);
        CHECK(drafts_unique(r));
        CHECK(finals_unique(r));
        for (const auto& e : r.edges) {
          CHECK(e.score >= t);
          CHECK(e.score == m(e.draft_index, e.final_index));
        }
        CHECK(r.edges.size() <= previous);  // monotone in the threshold
        previous = r.edges.size();
      }
    }
  }
}

TEST_CASE("draft_side_greedy is equivariant under final permutations") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = 1 + rng() % 6, cols = 1 + rng() % 6;
    const auto m = random_matrix(rng, rows, cols);  // distinct almost surely
    std::vector<std::size_t> perm(cols);
    for (std::size_t j = 0; j < cols; ++j) perm[j] = j;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> permuted(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) permuted[i * cols + j] = m(i, perm[j]);
    }
    const auto base = pairs(draft_side_greedy(m, 0.3));
    auto moved = pairs(draft_side_greedy(SimilarityMatrix(rows, cols, permuted), 0.3));
    for (auto& [d, f] : moved) f = perm[f];
    CHECK(moved == base);
  }
}

TEST_CASE("match_and_cover") {
  const auto rouge = ScorerSpec::builtin(Metric::RougeL);
  const std::vector<TokenSequence> sents{
      {"a", "radiation", "image", "projector"}, {"mirror", "reflects", "visible", "light"}, {"x", "y", "z"}};

  SUBCASE("identical lists match one to one") {
    CHECK(pairs(match_and_cover(sents, sents, rouge, 0.45, 0.3)) == Pairs{{0, 0}, {1, 1}, {2, 2}});
  }
  SUBCASE("no shared tokens") {
    CHECK(match_and_cover(sents, {{"q", "r"}, {"s"}}, rouge, 0.45, 0.3).edges.empty());
  }
  SUBCASE("concatenated final sentence is covered by both drafts") {
    const std::vector<TokenSequence> drafts{{"a", "b", "c", "d", "e", "f"}, {"g", "h", "i", "j", "k", "l"}};
    const std::vector<TokenSequence> finals{
        {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"}};
    const auto r = match_and_cover(drafts, finals, rouge, 0.45, 0.3);
    CHECK(pairs(r) == Pairs{{0, 0}, {1, 0}});
    CHECK(r.edges[0].score == doctest::Approx(2.0 / 3.0));  // P = 1, R = 1/2
    CHECK(r.edges[1].score == 1.0);                         // against the remainder
  }
  SUBCASE("a fraction limit of one or more never loops") {
    const std::vector<TokenSequence> drafts{{"a", "b"}, {"c", "d"}};
    const std::vector<TokenSequence> finals{{"a", "b", "c", "d"}};
    CHECK(match_and_cover(drafts, finals, rouge, 0.45, 1.0).edges.size() <= 1);
  }
  SUBCASE("empty sentences are skipped") {
    const std::vector<TokenSequence> drafts{{}, {"a", "b"}};
    const std::vector<TokenSequence> finals{{}, {"a", "b"}};
    CHECK(pairs(match_and_cover(drafts, finals, rouge, 0.45, 0.3)) == Pairs{{1, 1}});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(match_and_cover(sents, sents, ScorerSpec::external("m.txt"), 0.45, 0.3),
                    std::invalid_argument);
    CHECK_THROWS_AS(match_and_cover(sents, sents, rouge, 1.2, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(match_and_cover(sents, sents, rouge, 0.45, -0.1), std::invalid_argument);
  }
}

TEST_CASE("match_and_cover properties on random token lists") {
  std::mt19937_64 rng(31);
  auto sentence = [&] {
    TokenSequence s(1 + rng() % 8);
    for (auto& t : s) t = std::string(1, static_cast<char>('a' + rng() % 6));
    return s;
  };
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TokenSequence> drafts(1 + rng() % 6), finals(1 + rng() % 6);
    for (auto& d : drafts) d = sentence();
    for (auto& f : finals) f = sentence();
    for (auto metric : {Metric::RougeL, Metric::Rouge1, Metric::Meteor}) {
      const auto r = match_and_cover(drafts, finals, ScorerSpec::builtin(metric), 0.45, 0.3);
      CHECK(drafts_unique(r));
      for (const auto& e : r.edges) CHECK(e.score >= 0.45);

      const auto single = match_and_cover(drafts, finals, ScorerSpec::builtin(metric), 0.45, 1.0);
      CHECK(finals_unique(single));
    }
  }
}

TEST_CASE("algorithm names round-trip") {
  for (auto a : {MatchAlgorithm::DraftGreedy, MatchAlgorithm::FinalGreedy, MatchAlgorithm::MatchAndCover}) {
    CHECK(parse_algorithm(algorithm_name(a)) == a);
  }
  CHECK_THROWS_AS(parse_algorithm("hungarian"), std::invalid_argument);
}
