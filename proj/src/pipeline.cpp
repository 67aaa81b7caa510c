#include "pameq/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "pameq/channel.hpp"
#include "pameq/postproc.hpp"
#include "pameq/rng.hpp"
#include "pameq/trainers.hpp"

namespace pameq {

namespace {

// Guard and tail symbols around the payload come from a fixed internal
// seed, so trained taps depend only on the training head and the channel —
// never on payload bits.
constexpr std::uint64_t kScaffoldSeed = 777;

struct Frame {
  BitStream payload_bits;
  VecX<double> tx_line;  // line-scale symbols actually transmitted
  VecX<double> tx_ref;   // reference-scale symbols used as targets
  Eigen::Index payload_start = 0;
  Eigen::Index guard = 0;
};

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument(msg);
  };
  if (c.levels != 2 && c.levels != 4 && c.levels != 8 && c.levels != 16)
    fail("alphabet.levels must be 2, 4, 8 or 16");
  if (c.taps_count < 1) fail("equalizer.taps_count must be >= 1");
  if (c.training_len <= c.taps_count)
    fail("frame.training_len must exceed equalizer.taps_count");
  if (c.offset < 0 || c.offset >= c.taps_count)
    fail("equalizer.offset must be in [0, taps_count-1]");
  if (c.payload_len < 1) fail("frame.payload_len must be >= 1");
  if (c.isi_taps.empty()) fail("channel.isi_taps must be non-empty");
  if (std::all_of(c.isi_taps.begin(), c.isi_taps.end(),
                  [](double t) { return t == 0.0; }))
    fail("channel.isi_taps must contain a nonzero tap");
  if (c.delay < 0) fail("channel.delay must be >= 0");
  if (c.snr_db.empty()) fail("sweep.snr_db must list at least one point");
  for (double s : c.snr_db)
    if (!std::isfinite(s)) fail("sweep.snr_db entries must be finite");
  if (c.algorithm != "adam" && c.algorithm != "bgd" && c.algorithm != "lms" &&
      c.algorithm != "rls")
    fail("trainer.algorithm must be adam, bgd, lms or rls");
  if (c.algorithm == "adam" || c.algorithm == "bgd") {
    if (!(c.theta > 0.0 && c.theta < 1.0))
      fail("trainer.theta must be in (0, 1)");
    if (c.iterations < 1) fail("trainer.iterations must be >= 1");
  }
  if (c.algorithm == "lms") {
    if (c.mu < 0.0) fail("trainer.mu must be >= 0");
    if (c.passes < 1) fail("trainer.passes must be >= 1");
  }
  if (c.algorithm == "rls") {
    if (!(c.lambda > 0.0 && c.lambda <= 1.0))
      fail("trainer.lambda must be in (0, 1]");
    if (!(c.delta > 0.0)) fail("trainer.delta must be > 0");
  }
  if (!std::isfinite(c.alpha)) fail("postproc.alpha must be finite");
  for (double a : c.alpha_grid)
    if (!std::isfinite(a)) fail("postproc.alpha_grid entries must be finite");
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

Frame build_frame(const ExperimentConfig& c,
                  const PamAlphabet<double>& line_alphabet,
                  const PamAlphabet<double>& ref_alphabet) {
  Frame f;
  const int bps = line_alphabet.bits_per_symbol();
  const Eigen::Index M = c.training_len;
  f.guard = static_cast<Eigen::Index>(c.isi_taps.size()) - 1 + c.offset + 8;
  const Eigen::Index scaffold_syms = M + 2 * f.guard;
  const BitStream scaffold_bits = generate_payload(
      static_cast<std::size_t>(scaffold_syms) * bps, kScaffoldSeed);
  f.payload_bits = generate_payload(
      static_cast<std::size_t>(c.payload_len) * bps, c.payload_seed);
  const VecX<double> sc_line = map_bits(scaffold_bits, line_alphabet);
  const VecX<double> sc_ref = map_bits(scaffold_bits, ref_alphabet);
  const VecX<double> pl_line = map_bits(f.payload_bits, line_alphabet);
  const VecX<double> pl_ref = map_bits(f.payload_bits, ref_alphabet);
  const Eigen::Index total = scaffold_syms + c.payload_len;
  f.payload_start = M + f.guard;
  f.tx_line.resize(total);
  f.tx_line << sc_line.head(M + f.guard), pl_line, sc_line.tail(f.guard);
  f.tx_ref.resize(total);
  f.tx_ref << sc_ref.head(M + f.guard), pl_ref, sc_ref.tail(f.guard);
  return f;
}

struct PointResult {
  BerPoint point;
  TrainSummary summary;                        // filled for the trace point
  VecX<double> equalized;                      // idem, when requested
  std::vector<std::pair<double, double>> scan;  // idem, when grid present
};

PointResult run_point(const ExperimentConfig& c, const Frame& frame,
                      const PamAlphabet<double>& ref_alphabet,
                      double snr_db, std::size_t point_index,
                      bool is_trace_point, bool keep_equalized_dump) {
  const Eigen::Index M = c.training_len;
  const Eigen::Index N = c.taps_count;

  const VecX<double> isi = Eigen::Map<const VecX<double>>(
      c.isi_taps.data(), static_cast<Eigen::Index>(c.isi_taps.size()));
  const std::uint64_t point_seed = derive_seed(c.noise_seed, point_index);

  // The noise scale is set from the payload-free frame prefix (training
  // head plus guard; causal filtering keeps payload symbols out of it), so
  // the received training region — and therefore the trained taps — is
  // exactly independent of the payload bits.
  const VecX<double> rx = stage("channel", [&] {
    VecX<double> padded = VecX<double>::Zero(c.delay + frame.tx_line.size());
    padded.tail(frame.tx_line.size()) = frame.tx_line;
    VecX<double> shaped = apply_fir(padded, isi);
    if (c.noiseless) return shaped;
    const VecX<double> prefix =
        shaped.segment(c.delay, frame.payload_start);
    return add_awgn_sigma<double>(
        shaped, awgn_sigma_for<double>(prefix, snr_db), point_seed);
  });

  const Eigen::Index max_lag =
      c.delay + static_cast<Eigen::Index>(c.isi_taps.size()) + 32;
  const Eigen::Index lag = stage("synchronize", [&] {
    return synchronize<double>(rx, frame.tx_ref.head(M), max_lag);
  });
  const Eigen::Index off = lag + c.offset;

  // The batch training set is built from the first M received samples in
  // all cases so every trainer sees the same data budget; serial trainers
  // stream the aligned window instead of materializing the matrix.
  const TrainingSet<double> ts = stage("training-set", [&] {
    return build_training_set<double>(rx.head(M), frame.tx_ref, N, off);
  });

  TrainReport<double> tr = stage("train", [&] {
    if (c.algorithm == "adam")
      return train_adam(ts, VecX<double>(),
                        make_adam_state<double>(N, c.theta), c.iterations);
    if (c.algorithm == "bgd")
      return train_bgd(ts, VecX<double>(), c.theta, c.iterations);
    if (rx.size() < off + M)
      throw std::invalid_argument("received stream too short for alignment");
    if (c.algorithm == "lms")
      return train_lms<double>(rx.segment(off, M), frame.tx_ref.head(M), N,
                               c.mu, c.passes);
    return train_rls<double>(rx.segment(off, M), frame.tx_ref.head(M), N,
                             c.lambda, c.delta);
  });

  const VecX<double> s =
      stage("equalize", [&] { return equalize(rx, tr.final_taps); });

  const Eigen::Index pay0 = frame.payload_start + off;
  PointResult out;
  stage("demap", [&] {
    if (s.size() < pay0 + c.payload_len)
      throw std::invalid_argument("equalized stream too short for payload");
    const BitStream pre_bits = demap_symbols<double>(
        s.segment(pay0, c.payload_len), ref_alphabet);
    out.point.pre = ber(frame.payload_bits, pre_bits);
    return 0;
  });
  stage("postproc", [&] {
    if (c.mlsd_enabled) {
      const VecX<double> z = post_filter(s, c.alpha);
      const VecX<double> decided = mlsd(z, c.alpha, ref_alphabet);
      const BitStream post_bits = demap_symbols<double>(
          decided.segment(pay0, c.payload_len), ref_alphabet);
      out.point.post = ber(frame.payload_bits, post_bits);
    } else {
      out.point.post = out.point.pre;
    }
    return 0;
  });
  out.point.snr_db = snr_db;
  out.point.below_fec = out.point.post.ber <= kDefaultFecBerLimit;

  if (is_trace_point) {
    out.summary.algorithm = c.algorithm;
    out.summary.trace_snr_db = snr_db;
    out.summary.final_taps = tr.final_taps;
    out.summary.mse_trace = std::move(tr.mse_trace);
    out.summary.iterations_run = tr.iterations_run;
    out.summary.update_count = tr.update_count;
    out.summary.final_mse = mse_cost(ts, tr.final_taps);
    if (keep_equalized_dump) out.equalized = s;
    if (!c.alpha_grid.empty())
      out.scan = stage("postproc", [&] {
        return scan_alpha<double>(
            s.segment(pay0, c.payload_len),
            frame.tx_ref.segment(frame.payload_start, c.payload_len),
            ref_alphabet, c.alpha_grid);
      });
  }
  return out;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, int workers,
                                bool keep_equalized_dump) {
  // Validation failures surface unwrapped: they are config problems, not
  // stage failures, and callers map them to usage errors.
  validate(config);

  const auto line_alphabet = stage("modulate", [&] {
    return build_alphabet<double>(config.levels, false);
  });
  const auto ref_alphabet = stage("modulate", [&] {
    return build_alphabet<double>(config.levels, config.normalize);
  });
  const Frame frame = stage("modulate", [&] {
    return build_frame(config, line_alphabet, ref_alphabet);
  });

  std::vector<double> snrs = config.snr_db;
  std::sort(snrs.begin(), snrs.end());

  const std::size_t n = snrs.size();
  std::vector<PointResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < n; i += stride) {
      try {
        results[i] = run_point(config, frame, ref_alphabet, snrs[i], i,
                               /*is_trace_point=*/i == 0, keep_equalized_dump);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int team =
      std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (team == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(team));
    for (int t = 0; t < team; ++t)
      pool.emplace_back(work, static_cast<std::size_t>(t),
                        static_cast<std::size_t>(team));
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < n; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);

  ExperimentReport report;
  report.config = config;
  report.alphabet_scale = ref_alphabet.scale;
  report.sweep_seed_policy = "shared";
  report.fec_ber_limit = kDefaultFecBerLimit;
  report.train = std::move(results[0].summary);
  report.equalized_dump = std::move(results[0].equalized);
  report.alpha_scan = std::move(results[0].scan);
  report.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    report.points.push_back(results[i].point);

  stage("report", [&] {
    const long long M = config.training_len;
    const long long N = config.taps_count;
    report.complexity.push_back(complexity_adam(M, N, config.iterations));
    report.complexity.push_back(complexity_lms(M * config.passes, N));
    report.complexity.push_back(complexity_rls(M, N));
    return 0;
  });
  return report;
}

ExperimentConfig apply_param(const ExperimentConfig& base,
                             const std::string& param,
                             const std::string& value) {
  ExperimentConfig c = base;
  auto as_int = [&]() -> long long {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size())
      throw std::invalid_argument("malformed integer value '" + value + "'");
    return v;
  };
  auto as_double = [&]() -> double {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size())
      throw std::invalid_argument("malformed numeric value '" + value + "'");
    return v;
  };
  if (param == "trainer" || param == "algorithm")
    c.algorithm = value;
  else if (param == "training_len")
    c.training_len = as_int();
  else if (param == "payload_len")
    c.payload_len = as_int();
  else if (param == "taps_count")
    c.taps_count = static_cast<int>(as_int());
  else if (param == "offset")
    c.offset = static_cast<int>(as_int());
  else if (param == "levels")
    c.levels = static_cast<int>(as_int());
  else if (param == "iterations")
    c.iterations = as_int();
  else if (param == "passes")
    c.passes = as_int();
  else if (param == "theta")
    c.theta = as_double();
  else if (param == "mu")
    c.mu = as_double();
  else if (param == "lambda")
    c.lambda = as_double();
  else if (param == "delta")
    c.delta = as_double();
  else if (param == "alpha")
    c.alpha = as_double();
  else
    throw std::invalid_argument("unknown sweep parameter '" + param + "'");
  return c;
}

std::vector<ExperimentReport> run_sweep(const ExperimentConfig& base,
                                        const std::string& param,
                                        const std::vector<std::string>& values,
                                        int workers) {
  std::vector<ExperimentReport> reports;
  reports.reserve(values.size());
  for (const std::string& v : values)
    reports.push_back(run_experiment(apply_param(base, param, v), workers));
  return reports;
}

}  // namespace pameq
