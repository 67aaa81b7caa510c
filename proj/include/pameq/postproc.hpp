#pragma once

#include <Eigen/Core>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pameq/metrics.hpp"
#include "pameq/pam.hpp"

namespace pameq {

template <typename Scalar>
struct PostFilterConfig {
  Scalar alpha = Scalar(0.5);
};

// Two-tap smoothing filter z_k = s_k + alpha * s_{k-1} with zero history.
// Trades known single-tap intersymbol interference for high-frequency
// noise suppression; the sequence detector below removes the ISI again.
template <typename Scalar>
VecX<Scalar> post_filter(const VecX<Scalar>& s, Scalar alpha) {
  if (s.size() == 0) throw std::invalid_argument("post_filter: empty input");
  VecX<Scalar> z(s.size());
  z[0] = s[0];
  for (Eigen::Index k = 1; k < s.size(); ++k) z[k] = s[k] + alpha * s[k - 1];
  return z;
}

// Maximum-likelihood sequence detection over the 1 + alpha*D response:
// Viterbi search over one state per level (state = previous symbol) with
// branch metric (z_k - c - alpha * prev)^2, virtual starting symbol 0, and
// full traceback. Metric ties resolve to the lowest-amplitude predecessor.
template <typename Scalar>
VecX<Scalar> mlsd(const VecX<Scalar>& z, Scalar alpha,
                  const PamAlphabet<Scalar>& a) {
  if (z.size() == 0) throw std::invalid_argument("mlsd: empty input");
  const int L = a.levels_count;
  const Eigen::Index K = z.size();
  std::vector<std::vector<int>> backptr(
      static_cast<std::size_t>(K), std::vector<int>(static_cast<std::size_t>(L)));
  std::vector<Scalar> metric(static_cast<std::size_t>(L));
  // First symbol: predecessor is the virtual 0 symbol.
  for (int c = 0; c < L; ++c) {
    const Scalar d = z[0] - a.amplitudes[c];
    metric[static_cast<std::size_t>(c)] = d * d;
  }
  std::vector<Scalar> next(static_cast<std::size_t>(L));
  for (Eigen::Index k = 1; k < K; ++k) {
    for (int c = 0; c < L; ++c) {
      Scalar best = std::numeric_limits<Scalar>::infinity();
      int best_prev = 0;
      for (int p = 0; p < L; ++p) {
        const Scalar d = z[k] - a.amplitudes[c] - alpha * a.amplitudes[p];
        const Scalar cand = metric[static_cast<std::size_t>(p)] + d * d;
        if (cand < best) {
          best = cand;
          best_prev = p;
        }
      }
      next[static_cast<std::size_t>(c)] = best;
      backptr[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] =
          best_prev;
    }
    metric.swap(next);
  }
  int state = 0;
  Scalar best = metric[0];
  for (int c = 1; c < L; ++c)
    if (metric[static_cast<std::size_t>(c)] < best) {
      best = metric[static_cast<std::size_t>(c)];
      state = c;
    }
  VecX<Scalar> out(K);
  for (Eigen::Index k = K - 1; k >= 0; --k) {
    out[k] = a.amplitudes[state];
    if (k > 0)
      state = backptr[static_cast<std::size_t>(k)][static_cast<std::size_t>(state)];
  }
  return out;
}

// Path metric of a candidate symbol sequence under the 1 + alpha*D model;
// exposed so tests can certify detector optimality.
template <typename Scalar>
Scalar mlsd_path_metric(const VecX<Scalar>& z, const VecX<Scalar>& symbols,
                        Scalar alpha) {
  Scalar total = 0;
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    const Scalar prev = k > 0 ? symbols[k - 1] : Scalar(0);
    const Scalar d = z[k] - symbols[k] - alpha * prev;
    total += d * d;
  }
  return total;
}

// Evaluates the filter+detector bit error rate for each candidate alpha.
template <typename Scalar>
std::vector<std::pair<Scalar, double>> scan_alpha(
    const VecX<Scalar>& s, const VecX<Scalar>& truth,
    const PamAlphabet<Scalar>& a, const std::vector<Scalar>& grid) {
  if (grid.empty()) throw std::invalid_argument("scan_alpha: empty grid");
  const BitStream truth_bits = demap_symbols(truth, a);
  std::vector<std::pair<Scalar, double>> out;
  out.reserve(grid.size());
  for (const Scalar alpha : grid) {
    const VecX<Scalar> decided = mlsd(post_filter(s, alpha), alpha, a);
    const BerReport r = ber(truth_bits, demap_symbols(decided, a));
    out.emplace_back(alpha, r.ber);
  }
  return out;
}

}  // namespace pameq
