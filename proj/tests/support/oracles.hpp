#pragma once

// Reference computations used only by tests. They take the slow, obvious route
// on purpose and share no code with the library.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace claimalign::testing {

using Tokens = std::vector<std::string>;

inline bool is_subsequence(const Tokens& needle, const Tokens& hay) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < hay.size() && k < needle.size(); ++i) {
    if (hay[i] == needle[k]) ++k;
  }
  return k == needle.size();
}

/// Exhaustive search over subsets of `a` (|a| <= ~16). Returns the positions in
/// `a` of the lexicographically first longest common subsequence.
inline std::vector<std::size_t> brute_force_lcs_positions(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> best;
  bool have = false;
  const std::uint32_t subsets = 1u << a.size();
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    std::vector<std::size_t> pos;
    Tokens picked;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (mask & (1u << i)) {
        pos.push_back(i);
        picked.push_back(a[i]);
      }
    }
    if (!is_subsequence(picked, b)) continue;
    if (!have || pos.size() > best.size() || (pos.size() == best.size() && pos < best)) {
      best = pos;
      have = true;
    }
  }
  return best;
}

inline std::map<Tokens, int> ngram_counts(const Tokens& t, std::size_t n) {
  std::map<Tokens, int> out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) ++out[Tokens(t.begin() + i, t.begin() + i + n)];
  return out;
}

inline int clipped(const std::map<Tokens, int>& c, const std::map<Tokens, int>& r) {
  int total = 0;
  for (const auto& [g, k] : c) {
    auto it = r.find(g);
    if (it != r.end()) total += std::min(k, it->second);
  }
  return total;
}

/// n(ad - bc)^2 / ((a+b)(c+d)(a+c)(b+d))
inline double chi_squared_2x2(double a, double b, double c, double d) {
  const double n = a + b + c + d;
  return n * (a * d - b * c) * (a * d - b * c) / ((a + b) * (c + d) * (a + c) * (b + d));
}

/// Chi-squared survival for even dof: e^{-x/2} sum_{i < dof/2} (x/2)^i / i!.
inline double chi_squared_survival_even(double x, int dof) {
  const double half = x / 2.0;
  double term = 1.0, sum = 1.0;
  for (int i = 1; i < dof / 2; ++i) {
    term *= half / i;
    sum += term;
  }
  return std::exp(-half) * sum;
}

}  // namespace claimalign::testing
