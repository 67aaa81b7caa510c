#pragma once

#include <stdexcept>
#include <string>

#include "pameq/pam.hpp"

namespace pameq {

// Hard-decision forward-error-correction BER threshold used for report
// annotation. Conventional value for 7%-overhead hard-decision codes; not
// derived from any formula in this library and configurable at call sites.
constexpr double kDefaultFecBerLimit = 3.8e-3;

struct BerReport {
  long long bit_errors = 0;
  long long bits_compared = 0;
  double ber = 0.0;
};

inline BerReport ber(const BitStream& tx, const BitStream& rx) {
  if (tx.size() != rx.size() || tx.empty())
    throw std::invalid_argument("ber: streams must have equal nonzero length");
  BerReport r;
  r.bits_compared = static_cast<long long>(tx.size());
  for (std::size_t i = 0; i < tx.size(); ++i)
    r.bit_errors += (tx[i] != rx[i]) ? 1 : 0;
  r.ber = static_cast<double>(r.bit_errors) /
          static_cast<double>(r.bits_compared);
  return r;
}

enum class Algorithm { bgd_adam, lms, rls };

inline std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::bgd_adam:
      return "bgd_adam";
    case Algorithm::lms:
      return "lms";
    case Algorithm::rls:
      return "rls";
  }
  return "?";
}

// Exact operation counts from the closed-form accounting of each trainer.
// I is meaningful only for the batch adaptive-moment trainer.
struct ComplexityReport {
  Algorithm algorithm = Algorithm::bgd_adam;
  long long M = 0;
  long long N = 0;
  long long I = 0;
  long long operations = 0;
};

inline ComplexityReport complexity_adam(long long M, long long N,
                                        long long I) {
  if (N < 1 || M <= N)
    throw std::invalid_argument("complexity_adam: need M > N >= 1");
  if (I < 1) throw std::invalid_argument("complexity_adam: need I >= 1");
  ComplexityReport r;
  r.algorithm = Algorithm::bgd_adam;
  r.M = M;
  r.N = N;
  r.I = I;
  r.operations = N * (2 * (M - N + 1) + 9) * I;
  return r;
}

inline ComplexityReport complexity_lms(long long M, long long N) {
  if (M < 1 || N < 1)
    throw std::invalid_argument("complexity_lms: need M, N >= 1");
  ComplexityReport r;
  r.algorithm = Algorithm::lms;
  r.M = M;
  r.N = N;
  r.operations = (2 * N + 1) * M;
  return r;
}

inline ComplexityReport complexity_rls(long long M, long long N) {
  if (M < 1 || N < 1)
    throw std::invalid_argument("complexity_rls: need M, N >= 1");
  ComplexityReport r;
  r.algorithm = Algorithm::rls;
  r.M = M;
  r.N = N;
  r.operations = (3 * N * N + 5 * N + 2) * M;
  return r;
}

// Net information rate: symbol bits * baud * payload fraction of the
// frame, divided by the forward-error-correction overhead factor.
inline double net_rate(int bits_per_symbol, double baud, long long payload,
                       long long frame, double fec_overhead) {
  if (bits_per_symbol < 1)
    throw std::invalid_argument("net_rate: bits_per_symbol must be >= 1");
  if (payload < 0 || frame < 1 || payload > frame)
    throw std::invalid_argument("net_rate: need 0 <= payload <= frame");
  if (fec_overhead < 0)
    throw std::invalid_argument("net_rate: negative FEC overhead");
  return bits_per_symbol * baud *
         (static_cast<double>(payload) / static_cast<double>(frame)) /
         (1.0 + fec_overhead);
}

}  // namespace pameq
