#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <thread>
#include <vector>

#include "pameq/errors.hpp"
#include "pameq/pam.hpp"

namespace pameq {

// Materialized least-squares training problem. Row r of matrix_R is the
// causal window [x_{N+r}, x_{N+r-1}, …, x_{r+1}] (1-based sample speak),
// so the matrix is Toeplitz along diagonals; vector_Y holds the aligned
// transmitted targets.
template <typename Scalar>
struct TrainingSet {
  MatX<Scalar> matrix_R;  // (M-N+1) x N
  VecX<Scalar> vector_Y;  // (M-N+1)
  Eigen::Index M = 0;     // training-sample count
  Eigen::Index N = 0;     // tap count
};

// Builds the training matrix and target vector from an aligned received /
// transmitted pair. `offset` shifts the target index to absorb decision
// delay: vector_Y[r] = transmitted[N-1+r-offset] (0-based).
template <typename Scalar>
TrainingSet<Scalar> build_training_set(const VecX<Scalar>& received,
                                       const VecX<Scalar>& transmitted,
                                       Eigen::Index N, Eigen::Index offset) {
  const Eigen::Index M = received.size();
  if (N < 1 || N > M)
    throw std::invalid_argument(
        "build_training_set: tap count must be in [1, sample count]");
  if (offset < 0 || offset > N - 1)
    throw std::invalid_argument(
        "build_training_set: offset must be in [0, N-1]");
  const Eigen::Index rows = M - N + 1;
  if (transmitted.size() < M - offset)
    throw std::invalid_argument(
        "build_training_set: transmitted sequence too short for offset");
  TrainingSet<Scalar> ts;
  ts.M = M;
  ts.N = N;
  ts.matrix_R.resize(rows, N);
  ts.vector_Y.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < N; ++c)
      ts.matrix_R(r, c) = received[N - 1 + r - c];
    ts.vector_Y[r] = transmitted[N - 1 + r - offset];
  }
  return ts;
}

namespace detail {

// Row-block size for the deterministic data-parallel reduction. Partial
// results are always combined in ascending block order, so the outcome is
// bit-identical for any worker count.
constexpr Eigen::Index kReductionBlockRows = 256;

template <typename Scalar>
struct CostGradPartial {
  Scalar cost = 0;
  VecX<Scalar> grad;
};

// Evaluates per-block partial squared-residual sums and partial R^T r
// products for blocks b = first, first+stride, … .
template <typename Scalar>
void cost_grad_blocks(const TrainingSet<Scalar>& ts, const VecX<Scalar>& w,
                      std::vector<CostGradPartial<Scalar>>& partials,
                      Eigen::Index first, Eigen::Index stride,
                      bool want_grad) {
  const Eigen::Index rows = ts.matrix_R.rows();
  const Eigen::Index nblocks = static_cast<Eigen::Index>(partials.size());
  for (Eigen::Index b = first; b < nblocks; b += stride) {
    const Eigen::Index r0 = b * kReductionBlockRows;
    const Eigen::Index len = std::min(kReductionBlockRows, rows - r0);
    auto rblk = ts.matrix_R.middleRows(r0, len);
    VecX<Scalar> resid = rblk * w - ts.vector_Y.segment(r0, len);
    partials[b].cost = resid.squaredNorm();
    if (want_grad) partials[b].grad = rblk.transpose() * resid;
  }
}

template <typename Scalar>
std::vector<CostGradPartial<Scalar>> run_partials(const TrainingSet<Scalar>& ts,
                                                  const VecX<Scalar>& w,
                                                  int workers,
                                                  bool want_grad) {
  if (ts.matrix_R.cols() != w.size())
    throw std::invalid_argument("tap vector length does not match tap count");
  const Eigen::Index rows = ts.matrix_R.rows();
  const Eigen::Index nblocks =
      (rows + kReductionBlockRows - 1) / kReductionBlockRows;
  std::vector<CostGradPartial<Scalar>> partials(
      static_cast<std::size_t>(nblocks));
  if (workers <= 1 || nblocks <= 1) {
    cost_grad_blocks(ts, w, partials, 0, 1, want_grad);
    return partials;
  }
  const int team = static_cast<int>(
      std::min<Eigen::Index>(workers, nblocks));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(team));
  for (int t = 0; t < team; ++t)
    pool.emplace_back([&, t] {
      cost_grad_blocks(ts, w, partials, t, team, want_grad);
    });
  for (auto& th : pool) th.join();
  return partials;
}

}  // namespace detail

// Training cost J(w) = mean squared residual over the training rows.
// `workers` only changes who computes each fixed block; the reduction
// order, and therefore the result bits, never change.
template <typename Scalar>
Scalar mse_cost(const TrainingSet<Scalar>& ts, const VecX<Scalar>& w,
                int workers = 1) {
  auto partials = detail::run_partials(ts, w, workers, false);
  Scalar total = 0;
  for (const auto& p : partials) total += p.cost;
  return total / Scalar(ts.matrix_R.rows());
}

// Gradient of mse_cost: (2 / rows) * R^T (R w - Y).
template <typename Scalar>
VecX<Scalar> gradient(const TrainingSet<Scalar>& ts, const VecX<Scalar>& w,
                      int workers = 1) {
  auto partials = detail::run_partials(ts, w, workers, true);
  VecX<Scalar> g = VecX<Scalar>::Zero(ts.matrix_R.cols());
  for (const auto& p : partials) g += p.grad;
  return g * (Scalar(2) / Scalar(ts.matrix_R.rows()));
}

// Cost and gradient from one shared residual pass (the trainers' hot loop).
template <typename Scalar>
std::pair<Scalar, VecX<Scalar>> cost_and_gradient(const TrainingSet<Scalar>& ts,
                                                  const VecX<Scalar>& w,
                                                  int workers = 1) {
  auto partials = detail::run_partials(ts, w, workers, true);
  Scalar total = 0;
  VecX<Scalar> g = VecX<Scalar>::Zero(ts.matrix_R.cols());
  for (const auto& p : partials) {
    total += p.cost;
    g += p.grad;
  }
  const Scalar rows = Scalar(ts.matrix_R.rows());
  return {total / rows, g * (Scalar(2) / rows)};
}

// Normal-equations solve (R^T R) w = R^T Y with an explicit conditioning
// gate. Reference solution for validation; not part of any complexity
// accounting.
template <typename Scalar>
VecX<Scalar> closed_form_solution(const TrainingSet<Scalar>& ts) {
  MatX<Scalar> normal = ts.matrix_R.transpose() * ts.matrix_R;
  Eigen::SelfAdjointEigenSolver<MatX<Scalar>> eig(normal);
  const Scalar lo = eig.eigenvalues().minCoeff();
  const Scalar hi = eig.eigenvalues().maxCoeff();
  const Scalar cond = (lo > 0) ? hi / lo
                               : std::numeric_limits<Scalar>::infinity();
  if (!(cond < Scalar(1e12)))
    throw SingularMatrix("closed_form_solution: normal matrix unusable",
                         static_cast<double>(cond));
  return normal.ldlt().solve(ts.matrix_R.transpose() * ts.vector_Y);
}

// Runs the trained FIR over a received stream with zero history:
// s_k = sum_j w[j] * received[k-j]. Identical in form to apply_fir; rows
// N-1.. of the output reproduce matrix_R * w.
template <typename Scalar>
VecX<Scalar> equalize(const VecX<Scalar>& received, const VecX<Scalar>& w) {
  if (received.size() == 0)
    throw std::invalid_argument("equalize: empty input");
  if (w.size() == 0) throw std::invalid_argument("equalize: empty taps");
  VecX<Scalar> out = VecX<Scalar>::Zero(received.size());
  for (Eigen::Index k = 0; k < received.size(); ++k) {
    Scalar acc = 0;
    const Eigen::Index jmax = std::min<Eigen::Index>(w.size() - 1, k);
    for (Eigen::Index j = 0; j <= jmax; ++j) acc += w[j] * received[k - j];
    out[k] = acc;
  }
  return out;
}

}  // namespace pameq
