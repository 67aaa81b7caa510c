#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pameq/rng.hpp"

namespace pameq {

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using BitStream = std::vector<std::uint8_t>;

// A PAM constellation: ascending amplitudes with Gray bit labels and the
// normalization divisor that was applied to the odd-integer grid.
template <typename Scalar>
struct PamAlphabet {
  int levels_count = 0;
  VecX<Scalar> amplitudes;               // ascending, symmetric about 0
  std::vector<std::uint32_t> bit_labels;  // label per level index
  Scalar scale = 1;                       // divisor; 1 when unnormalized

  int bits_per_symbol() const {
    int b = 0;
    for (int v = levels_count; v > 1; v >>= 1) ++b;
    return b;
  }
};

// Builds the PAM alphabet on the odd-integer grid ±1,±3,…,±(levels−1) with
// binary-reflected Gray labels; `normalize` divides by the root mean square
// so the constellation has unit power.
template <typename Scalar>
PamAlphabet<Scalar> build_alphabet(int levels, bool normalize) {
  if (levels < 2 || levels > 16 || (levels & (levels - 1)) != 0)
    throw std::invalid_argument("alphabet levels must be 2, 4, 8 or 16");
  PamAlphabet<Scalar> a;
  a.levels_count = levels;
  a.amplitudes.resize(levels);
  a.bit_labels.resize(levels);
  Scalar sumsq = 0;
  for (int i = 0; i < levels; ++i) {
    Scalar amp = Scalar(2 * i - (levels - 1));
    a.amplitudes[i] = amp;
    a.bit_labels[i] = static_cast<std::uint32_t>(i ^ (i >> 1));
    sumsq += amp * amp;
  }
  if (normalize) {
    a.scale = std::sqrt(sumsq / Scalar(levels));
    a.amplitudes /= a.scale;
  }
  return a;
}

// Deterministic pseudo-random payload bits.
inline BitStream generate_payload(std::size_t length, std::uint64_t seed) {
  BitStream bits(length);
  Rng<double> rng(seed);
  for (std::size_t i = 0; i < length; ++i)
    bits[i] = static_cast<std::uint8_t>(rng.bit());
  return bits;
}

// Maps bit groups (MSB first) to amplitudes via the Gray labels.
template <typename Scalar>
VecX<Scalar> map_bits(const BitStream& bits, const PamAlphabet<Scalar>& a) {
  const int bps = a.bits_per_symbol();
  if (bits.size() % static_cast<std::size_t>(bps) != 0)
    throw std::invalid_argument("bit count not divisible by bits per symbol");
  // Invert label -> level once.
  std::vector<int> level_of(a.bit_labels.size());
  for (int lvl = 0; lvl < a.levels_count; ++lvl)
    level_of[a.bit_labels[lvl]] = lvl;
  const Eigen::Index n = static_cast<Eigen::Index>(bits.size()) / bps;
  VecX<Scalar> out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    std::uint32_t v = 0;
    for (int b = 0; b < bps; ++b)
      v = (v << 1) | bits[static_cast<std::size_t>(k) * bps + b];
    out[k] = a.amplitudes[level_of[v]];
  }
  return out;
}

// Index of the nearest level; equidistant samples resolve to the lower
// amplitude.
template <typename Scalar>
int nearest_level(Scalar x, const PamAlphabet<Scalar>& a) {
  int best = 0;
  Scalar best_dist = std::abs(x - a.amplitudes[0]);
  for (int lvl = 1; lvl < a.levels_count; ++lvl) {
    Scalar d = std::abs(x - a.amplitudes[lvl]);
    if (d < best_dist) {
      best = lvl;
      best_dist = d;
    }
  }
  return best;
}

// Quantizes each sample to the nearest level and emits its label bits.
template <typename Scalar>
BitStream demap_symbols(const VecX<Scalar>& received,
                        const PamAlphabet<Scalar>& a) {
  const int bps = a.bits_per_symbol();
  BitStream bits(static_cast<std::size_t>(received.size()) * bps);
  for (Eigen::Index k = 0; k < received.size(); ++k) {
    std::uint32_t label = a.bit_labels[nearest_level(received[k], a)];
    for (int b = 0; b < bps; ++b)
      bits[static_cast<std::size_t>(k) * bps + b] =
          static_cast<std::uint8_t>((label >> (bps - 1 - b)) & 1u);
  }
  return bits;
}

// True when every entry of `seq` equals some alphabet amplitude exactly.
template <typename Scalar>
bool is_on_grid(const VecX<Scalar>& seq, const PamAlphabet<Scalar>& a) {
  for (Eigen::Index k = 0; k < seq.size(); ++k) {
    bool hit = false;
    for (int lvl = 0; lvl < a.levels_count; ++lvl)
      if (seq[k] == a.amplitudes[lvl]) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

}  // namespace pameq
