#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "pameq/equalizer.hpp"
#include "pameq/errors.hpp"
#include "pameq/metrics.hpp"
#include "pameq/pam.hpp"

namespace pameq {

// Full experiment description; mirrors the config file sections.
struct ExperimentConfig {
  // [alphabet]
  int levels = 8;
  bool normalize = true;
  // [frame]
  long long training_len = 300;   // leading training samples M
  long long payload_len = 50000;  // payload symbols measured for BER
  // [channel]
  std::vector<double> isi_taps{0.2, 1.0, 0.3};
  int delay = 0;
  bool noiseless = false;
  // [equalizer]
  int taps_count = 21;  // N
  int offset = 10;      // decision delay folded into target alignment
  // [trainer]
  std::string algorithm = "adam";  // adam | bgd | lms | rls
  double theta = 0.01;
  long long iterations = 120;
  double mu = 1e-3;
  long long passes = 1;
  double lambda = 0.999;
  double delta = 100.0;
  // [postproc]
  double alpha = 0.5;
  bool mlsd_enabled = true;
  std::vector<double> alpha_grid;  // optional calibration grid
  // [sweep]
  std::vector<double> snr_db{20, 22, 24, 26, 28, 30, 32, 34};
  // [seeds]
  std::uint64_t payload_seed = 1;
  std::uint64_t noise_seed = 2;
};

// One measured sweep point. `pre` is the equalize-then-demap BER, `post`
// the filter+sequence-detector BER (equal to `pre` when the detector is
// disabled).
struct BerPoint {
  double snr_db = 0;
  BerReport pre;
  BerReport post;
  bool below_fec = false;
};

// Training outcome kept in the report: the run at the trace point (lowest
// swept SNR). final_mse is the batch training cost of the final taps.
struct TrainSummary {
  std::string algorithm;
  double trace_snr_db = 0;
  VecX<double> final_taps;
  std::vector<double> mse_trace;
  long long iterations_run = 0;
  long long update_count = 0;
  double final_mse = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  double alphabet_scale = 1.0;
  std::string sweep_seed_policy = "shared";
  double fec_ber_limit = kDefaultFecBerLimit;
  TrainSummary train;
  std::vector<BerPoint> points;                  // ascending snr_db
  std::vector<std::pair<double, double>> alpha_scan;  // (alpha, ber), optional
  std::vector<ComplexityReport> complexity;
  VecX<double> equalized_dump;  // trace-point equalized samples (optional)
};

// Best alignment lag by normalized cross-correlation over lags
// 0..max_lag; ties resolve to the smallest lag.
template <typename Scalar>
Eigen::Index synchronize(const VecX<Scalar>& received,
                         const VecX<Scalar>& reference,
                         Eigen::Index max_lag) {
  if (reference.size() == 0 || received.size() == 0)
    throw std::invalid_argument("synchronize: empty input");
  if (max_lag < 0 || max_lag >= received.size())
    throw std::invalid_argument("synchronize: max_lag out of range");
  if (received.size() < reference.size() + max_lag)
    throw std::invalid_argument("synchronize: received too short for window");
  const Scalar ref_norm = reference.norm();
  if (ref_norm == Scalar(0))
    throw std::invalid_argument("synchronize: zero-variance reference");
  Eigen::Index best_lag = -1;
  Scalar best_score = 0;
  bool any = false;
  for (Eigen::Index lag = 0; lag <= max_lag; ++lag) {
    auto window = received.segment(lag, reference.size());
    const Scalar wnorm = window.norm();
    if (wnorm == Scalar(0)) continue;
    const Scalar score = window.dot(reference) / (wnorm * ref_norm);
    if (!any || score > best_score) {
      any = true;
      best_score = score;
      best_lag = lag;
    }
  }
  if (!any)
    throw std::invalid_argument("synchronize: zero-variance received windows");
  return best_lag;
}

// Runs the full chain (map, link, synchronize, train, equalize, filter,
// detect, demap, count) for every swept SNR point. `workers` may fan
// points out across threads; results and bytes do not depend on it.
// `keep_equalized_dump` stores the trace point's equalized samples.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                int workers = 1,
                                bool keep_equalized_dump = false);

// Applies a named parameter override (value in textual form) to a config.
ExperimentConfig apply_param(const ExperimentConfig& base,
                             const std::string& param,
                             const std::string& value);

// One report per value; every run reuses the base seeds so channel
// realizations are identical across values.
std::vector<ExperimentReport> run_sweep(const ExperimentConfig& base,
                                        const std::string& param,
                                        const std::vector<std::string>& values,
                                        int workers = 1);

}  // namespace pameq
