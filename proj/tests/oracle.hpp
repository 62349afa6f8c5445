// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0
//
// Test-only reference implementations. These stay independent of the
// library's ranking and gradient paths: plain loops, no Eigen expressions,
// no shared helpers.

#ifndef IRB_TESTS_ORACLE_HPP
#define IRB_TESTS_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace oracle {

struct Item {
  std::string id;
  std::vector<double> vec;
};

struct Scored {
  std::string id;
  double score;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline std::vector<Scored> rank(const std::vector<double>& query,
                                const std::vector<Item>& items) {
  std::vector<Scored> scored;
  scored.reserve(items.size());
  for (const Item& item : items) scored.push_back({item.id, dot(query, item.vec)});
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  return scored;
}

// 1-based rank of the relevant id; 0 when absent.
inline std::size_t rank_of(const std::vector<Scored>& ranked,
                           const std::string& relevant) {
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i].id == relevant) return i + 1;
  }
  return 0;
}

inline double ndcg_at(std::size_t rho, unsigned k) {
  if (rho == 0 || rho > k) return 0.0;
  return 1.0 / std::log2(static_cast<double>(rho) + 1.0);
}

inline double recall_at(std::size_t rho, unsigned k) {
  return (rho != 0 && rho <= k) ? 1.0 : 0.0;
}

// Central finite differences over every parameter the accessor list exposes.
// Returns the worst relative error across all entries.
struct ParamRef {
  double* data;
  std::size_t count;
};

inline double max_gradient_error(const std::vector<ParamRef>& params,
                                 const std::vector<const double*>& analytic,
                                 const std::function<double()>& loss,
                                 double h = 1e-5) {
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p].count; ++i) {
      double& x = params[p].data[i];
      const double saved = x;
      x = saved + h;
      const double up = loss();
      x = saved - h;
      const double down = loss();
      x = saved;
      const double fd = (up - down) / (2.0 * h);
      const double an = analytic[p][i];
      const double denom = std::max({std::fabs(fd), std::fabs(an), 1e-6});
      worst = std::max(worst, std::fabs(fd - an) / denom);
    }
  }
  return worst;
}

}  // namespace oracle

#endif  // IRB_TESTS_ORACLE_HPP
