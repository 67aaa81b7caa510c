#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "pameq/pam.hpp"
#include "pameq/rng.hpp"

namespace pameq {

// Linear link model: pure delay, FIR intersymbol interference, additive
// white Gaussian noise at a target SNR measured on the post-FIR signal.
template <typename Scalar>
struct ChannelModel {
  VecX<Scalar> isi_taps;
  Scalar snr_db = 0;
  bool noiseless = false;
  std::uint64_t seed = 0;
  int delay = 0;
};

// Full linear convolution truncated to the input length; leading samples
// assume zero history: out[k] = sum_j taps[j] * signal[k-j].
template <typename Scalar>
VecX<Scalar> apply_fir(const VecX<Scalar>& signal, const VecX<Scalar>& taps) {
  if (signal.size() == 0 || taps.size() == 0)
    throw std::invalid_argument("apply_fir: empty signal or taps");
  VecX<Scalar> out = VecX<Scalar>::Zero(signal.size());
  for (Eigen::Index k = 0; k < signal.size(); ++k) {
    Scalar acc = 0;
    const Eigen::Index jmax = std::min<Eigen::Index>(taps.size() - 1, k);
    for (Eigen::Index j = 0; j <= jmax; ++j) acc += taps[j] * signal[k - j];
    out[k] = acc;
  }
  return out;
}

// Adds zero-mean Gaussian noise with an explicit standard deviation;
// deterministic per seed.
template <typename Scalar>
VecX<Scalar> add_awgn_sigma(const VecX<Scalar>& signal, Scalar sigma,
                            std::uint64_t seed) {
  if (signal.size() == 0)
    throw std::invalid_argument("add_awgn_sigma: empty signal");
  if (!(sigma >= 0) || !std::isfinite(sigma))
    throw std::invalid_argument("add_awgn_sigma: sigma must be finite and >= 0");
  Rng<Scalar> rng(seed);
  VecX<Scalar> out(signal.size());
  for (Eigen::Index k = 0; k < signal.size(); ++k)
    out[k] = signal[k] + sigma * rng.gaussian();
  return out;
}

// Noise standard deviation that puts the empirical power of `signal` at
// the requested SNR.
template <typename Scalar>
Scalar awgn_sigma_for(const VecX<Scalar>& signal, Scalar snr_db) {
  if (signal.size() == 0)
    throw std::invalid_argument("awgn_sigma_for: empty signal");
  const Scalar power = signal.squaredNorm() / Scalar(signal.size());
  if (power <= 0)
    throw std::invalid_argument("awgn_sigma_for: zero-power signal");
  return std::sqrt(power / std::pow(Scalar(10), snr_db / Scalar(10)));
}

// Adds zero-mean Gaussian noise with variance = empirical signal power
// divided by 10^(snr_db/10); deterministic per seed.
template <typename Scalar>
VecX<Scalar> add_awgn(const VecX<Scalar>& signal, Scalar snr_db,
                      std::uint64_t seed) {
  return add_awgn_sigma(signal, awgn_sigma_for(signal, snr_db), seed);
}

// Transmits `tx` through the model: delay padding, FIR, then noise unless
// the model is flagged noiseless. Output length = delay + tx length.
template <typename Scalar>
VecX<Scalar> simulate_link(const VecX<Scalar>& tx,
                           const ChannelModel<Scalar>& model) {
  if (tx.size() == 0) throw std::invalid_argument("simulate_link: empty tx");
  if (model.isi_taps.size() == 0 || model.isi_taps.isZero(0))
    throw std::invalid_argument("simulate_link: ISI taps empty or all zero");
  if (model.delay < 0)
    throw std::invalid_argument("simulate_link: negative delay");
  if (!model.noiseless && !std::isfinite(model.snr_db))
    throw std::invalid_argument("simulate_link: snr_db must be finite");
  VecX<Scalar> padded = VecX<Scalar>::Zero(model.delay + tx.size());
  padded.tail(tx.size()) = tx;
  VecX<Scalar> shaped = apply_fir(padded, model.isi_taps);
  if (model.noiseless) return shaped;
  return add_awgn(shaped, model.snr_db, model.seed);
}

}  // namespace pameq
