#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pameq/equalizer.hpp"
#include "pameq/errors.hpp"

namespace pameq {

// Adaptive-moment optimizer state plus its hyperparameters. m and v are
// the running first/second gradient moments; both start at zero and t
// advances by exactly one per step.
template <typename Scalar>
struct AdamState {
  long long t = 0;
  VecX<Scalar> m;
  VecX<Scalar> v;
  Scalar theta = Scalar(0.01);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar epsilon = Scalar(1e-8);
};

template <typename Scalar>
AdamState<Scalar> make_adam_state(Eigen::Index n, Scalar theta = Scalar(0.01),
                                  Scalar beta1 = Scalar(0.9),
                                  Scalar beta2 = Scalar(0.999),
                                  Scalar epsilon = Scalar(1e-8)) {
  AdamState<Scalar> s;
  s.m = VecX<Scalar>::Zero(n);
  s.v = VecX<Scalar>::Zero(n);
  s.theta = theta;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = epsilon;
  return s;
}

// Outcome of one training run. mse_trace holds the cost observed at each
// gradient evaluation for batch trainers (entry 1, 1-based, is the cost at
// initialization) and the pre-update instantaneous squared error per
// consumed sample for serial trainers. update_count feeds the complexity
// cross-checks.
template <typename Scalar>
struct TrainReport {
  VecX<Scalar> final_taps;
  std::vector<Scalar> mse_trace;
  long long iterations_run = 0;
  long long update_count = 0;
};

template <typename Scalar>
struct AdamStepResult {
  AdamState<Scalar> state;
  VecX<Scalar> taps;
};

// One optimizer step: moment updates, bias correction by 1-beta^t, then
// the per-coordinate scaled descent move.
template <typename Scalar>
AdamStepResult<Scalar> adam_step(const AdamState<Scalar>& state,
                                 const VecX<Scalar>& w,
                                 const VecX<Scalar>& g) {
  if (state.m.size() != w.size() || g.size() != w.size())
    throw std::invalid_argument("adam_step: vector lengths disagree");
  if (!g.allFinite())
    throw NumericFault("adam_step: non-finite gradient", state.t + 1);
  AdamStepResult<Scalar> out;
  out.state = state;
  out.state.t = state.t + 1;
  out.state.m = state.beta1 * state.m + (Scalar(1) - state.beta1) * g;
  out.state.v = state.beta2 * state.v +
                (Scalar(1) - state.beta2) * g.cwiseProduct(g);
  const Scalar t = Scalar(out.state.t);
  const VecX<Scalar> m_hat =
      out.state.m / (Scalar(1) - std::pow(state.beta1, t));
  const VecX<Scalar> v_hat =
      out.state.v / (Scalar(1) - std::pow(state.beta2, t));
  out.taps =
      w - state.theta *
              (m_hat.array() / (v_hat.array().sqrt() + state.epsilon)).matrix();
  return out;
}

// Batch training with the adaptive-moment update. Records the cost at each
// gradient evaluation, so the trace ends one step before the returned taps.
template <typename Scalar>
TrainReport<Scalar> train_adam(const TrainingSet<Scalar>& ts,
                               const VecX<Scalar>& init,
                               const AdamState<Scalar>& hyper, long long I,
                               int workers = 1) {
  if (I < 1) throw std::invalid_argument("train_adam: need at least one step");
  AdamState<Scalar> state = make_adam_state<Scalar>(
      ts.N, hyper.theta, hyper.beta1, hyper.beta2, hyper.epsilon);
  VecX<Scalar> w =
      init.size() == 0 ? VecX<Scalar>::Zero(ts.N) : VecX<Scalar>(init);
  if (w.size() != ts.N)
    throw std::invalid_argument("train_adam: init length != tap count");
  TrainReport<Scalar> report;
  report.mse_trace.reserve(static_cast<std::size_t>(I));
  for (long long t = 1; t <= I; ++t) {
    auto [cost, g] = cost_and_gradient(ts, w, workers);
    if (!std::isfinite(cost))
      throw NumericFault("train_adam: non-finite cost", t);
    report.mse_trace.push_back(cost);
    auto step = adam_step(state, w, g);
    state = std::move(step.state);
    w = std::move(step.taps);
  }
  report.final_taps = std::move(w);
  report.iterations_run = I;
  report.update_count = I;
  return report;
}

// Plain fixed-step batch gradient descent with a divergence guard: the run
// aborts once the cost exceeds 1e6 times the initial cost.
template <typename Scalar>
TrainReport<Scalar> train_bgd(const TrainingSet<Scalar>& ts,
                              const VecX<Scalar>& init, Scalar theta,
                              long long I, int workers = 1) {
  if (!(theta > Scalar(0) && theta < Scalar(1)))
    throw std::invalid_argument("train_bgd: step size must be in (0, 1)");
  if (I < 1) throw std::invalid_argument("train_bgd: need at least one step");
  VecX<Scalar> w =
      init.size() == 0 ? VecX<Scalar>::Zero(ts.N) : VecX<Scalar>(init);
  if (w.size() != ts.N)
    throw std::invalid_argument("train_bgd: init length != tap count");
  TrainReport<Scalar> report;
  report.mse_trace.reserve(static_cast<std::size_t>(I));
  Scalar initial_cost = 0;
  for (long long t = 1; t <= I; ++t) {
    auto [cost, g] = cost_and_gradient(ts, w, workers);
    if (!std::isfinite(cost))
      throw NumericFault("train_bgd: non-finite cost", t);
    if (t == 1) initial_cost = cost;
    if (cost > Scalar(1e6) * initial_cost)
      throw DivergenceError("train_bgd: cost exceeded 1e6x initial at iteration " +
                            std::to_string(t));
    report.mse_trace.push_back(cost);
    w -= theta * g;
  }
  report.final_taps = std::move(w);
  report.iterations_run = I;
  report.update_count = I;
  return report;
}

// Serial least-mean-squares baseline: one update per sample per pass with
// a zero-prefilled delay line. The trace records each pre-update squared
// error; the guard aborts when the error magnitude outgrows its starting
// magnitude by 1e6x.
template <typename Scalar>
TrainReport<Scalar> train_lms(const VecX<Scalar>& received,
                              const VecX<Scalar>& transmitted, Eigen::Index N,
                              Scalar mu, long long passes) {
  if (mu < Scalar(0)) throw std::invalid_argument("train_lms: negative mu");
  if (passes < 1) throw std::invalid_argument("train_lms: passes must be >= 1");
  if (N < 1 || N > received.size())
    throw std::invalid_argument("train_lms: tap count out of range");
  if (transmitted.size() < received.size())
    throw std::invalid_argument("train_lms: transmitted shorter than received");
  const Eigen::Index M = received.size();
  VecX<Scalar> w = VecX<Scalar>::Zero(N);
  VecX<Scalar> line = VecX<Scalar>::Zero(N);  // line[j] = x_{i-j}
  TrainReport<Scalar> report;
  report.mse_trace.reserve(static_cast<std::size_t>(M * passes));
  Scalar baseline = -1;  // first nonzero |e| fixes the divergence scale
  long long consumed = 0;
  for (long long pass = 0; pass < passes; ++pass) {
    line.setZero();
    for (Eigen::Index i = 0; i < M; ++i) {
      for (Eigen::Index j = N - 1; j > 0; --j) line[j] = line[j - 1];
      line[0] = received[i];
      const Scalar e = transmitted[i] - line.dot(w);
      ++consumed;
      if (!std::isfinite(e))
        throw NumericFault("train_lms: non-finite error", consumed);
      if (baseline < Scalar(0) && e != Scalar(0)) baseline = std::abs(e);
      if (baseline > Scalar(0) && std::abs(e) > Scalar(1e6) * baseline)
        throw DivergenceError(
            "train_lms: error magnitude exceeded 1e6x initial at sample " +
            std::to_string(consumed));
      report.mse_trace.push_back(e * e);
      w += mu * e * line;
    }
  }
  report.final_taps = std::move(w);
  report.iterations_run = M * passes;
  report.update_count = M * passes;
  return report;
}

// Serial exponentially-weighted recursive least squares with inverse
// correlation matrix P started at identity/delta.
template <typename Scalar>
TrainReport<Scalar> train_rls(const VecX<Scalar>& received,
                              const VecX<Scalar>& transmitted, Eigen::Index N,
                              Scalar lambda, Scalar delta) {
  if (!(lambda > Scalar(0) && lambda <= Scalar(1)))
    throw std::invalid_argument("train_rls: lambda must be in (0, 1]");
  if (!(delta > Scalar(0)))
    throw std::invalid_argument("train_rls: delta must be positive");
  if (N < 1 || N > received.size())
    throw std::invalid_argument("train_rls: tap count out of range");
  if (transmitted.size() < received.size())
    throw std::invalid_argument("train_rls: transmitted shorter than received");
  const Eigen::Index M = received.size();
  VecX<Scalar> w = VecX<Scalar>::Zero(N);
  VecX<Scalar> line = VecX<Scalar>::Zero(N);
  MatX<Scalar> P = MatX<Scalar>::Identity(N, N) / delta;
  TrainReport<Scalar> report;
  report.mse_trace.reserve(static_cast<std::size_t>(M));
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = N - 1; j > 0; --j) line[j] = line[j - 1];
    line[0] = received[i];
    const VecX<Scalar> Pr = P * line;
    const Scalar denom = lambda + line.dot(Pr);
    const VecX<Scalar> gain = Pr / denom;
    const Scalar e = transmitted[i] - line.dot(w);
    if (!std::isfinite(e))
      throw NumericFault("train_rls: non-finite error", i + 1);
    report.mse_trace.push_back(e * e);
    w += gain * e;
    P = (P - gain * Pr.transpose()) / lambda;
    if (!P.allFinite())
      throw NumericFault("train_rls: non-finite inverse correlation matrix",
                         i + 1);
  }
  report.final_taps = std::move(w);
  report.iterations_run = M;
  report.update_count = M;
  return report;
}

}  // namespace pameq
