#include "pameq/report_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pameq/errors.hpp"

namespace pameq {

namespace {

using nlohmann::json;

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["alphabet"] = {{"levels", c.levels}, {"normalize", c.normalize}};
  j["frame"] = {{"training_len", c.training_len},
                {"payload_len", c.payload_len}};
  j["channel"] = {{"isi_taps", c.isi_taps},
                  {"delay", c.delay},
                  {"noiseless", c.noiseless}};
  j["equalizer"] = {{"taps_count", c.taps_count}, {"offset", c.offset}};
  j["trainer"] = {{"algorithm", c.algorithm}, {"theta", c.theta},
                  {"iterations", c.iterations}, {"mu", c.mu},
                  {"passes", c.passes},         {"lambda", c.lambda},
                  {"delta", c.delta}};
  j["postproc"] = {{"alpha", c.alpha}, {"mlsd", c.mlsd_enabled}};
  if (!c.alpha_grid.empty()) j["postproc"]["alpha_grid"] = c.alpha_grid;
  j["sweep"] = {{"snr_db", c.snr_db}};
  j["seeds"] = {{"payload", c.payload_seed}, {"noise", c.noise_seed}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.levels = j.at("alphabet").at("levels").get<int>();
  c.normalize = j.at("alphabet").at("normalize").get<bool>();
  c.training_len = j.at("frame").at("training_len").get<long long>();
  c.payload_len = j.at("frame").at("payload_len").get<long long>();
  c.isi_taps = j.at("channel").at("isi_taps").get<std::vector<double>>();
  c.delay = j.at("channel").at("delay").get<int>();
  c.noiseless = j.at("channel").at("noiseless").get<bool>();
  c.taps_count = j.at("equalizer").at("taps_count").get<int>();
  c.offset = j.at("equalizer").at("offset").get<int>();
  const json& t = j.at("trainer");
  c.algorithm = t.at("algorithm").get<std::string>();
  c.theta = t.at("theta").get<double>();
  c.iterations = t.at("iterations").get<long long>();
  c.mu = t.at("mu").get<double>();
  c.passes = t.at("passes").get<long long>();
  c.lambda = t.at("lambda").get<double>();
  c.delta = t.at("delta").get<double>();
  c.alpha = j.at("postproc").at("alpha").get<double>();
  c.mlsd_enabled = j.at("postproc").at("mlsd").get<bool>();
  if (j.at("postproc").contains("alpha_grid"))
    c.alpha_grid = j.at("postproc").at("alpha_grid").get<std::vector<double>>();
  c.snr_db = j.at("sweep").at("snr_db").get<std::vector<double>>();
  c.payload_seed = j.at("seeds").at("payload").get<std::uint64_t>();
  c.noise_seed = j.at("seeds").at("noise").get<std::uint64_t>();
  return c;
}

json ber_report_to_json(const BerReport& r) {
  return {{"bit_errors", r.bit_errors},
          {"bits_compared", r.bits_compared},
          {"ber", r.ber}};
}

BerReport ber_report_from_json(const json& j) {
  BerReport r;
  r.bit_errors = j.at("bit_errors").get<long long>();
  r.bits_compared = j.at("bits_compared").get<long long>();
  r.ber = j.at("ber").get<double>();
  return r;
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "bgd_adam") return Algorithm::bgd_adam;
  if (name == "lms") return Algorithm::lms;
  if (name == "rls") return Algorithm::rls;
  throw std::invalid_argument("unknown algorithm name '" + name + "'");
}

}  // namespace

std::string report_to_json(const ExperimentReport& r) {
  json j;
  j["config"] = config_to_json(r.config);
  j["alphabet_scale"] = r.alphabet_scale;
  j["sweep_seed_policy"] = r.sweep_seed_policy;
  j["fec_ber_limit"] = r.fec_ber_limit;

  json train;
  train["algorithm"] = r.train.algorithm;
  train["trace_snr_db"] = r.train.trace_snr_db;
  train["final_taps"] = std::vector<double>(
      r.train.final_taps.data(),
      r.train.final_taps.data() + r.train.final_taps.size());
  train["iterations_run"] = r.train.iterations_run;
  train["update_count"] = r.train.update_count;
  train["final_mse"] = r.train.final_mse;
  j["train"] = train;

  j["points"] = json::array();
  for (const auto& p : r.points)
    j["points"].push_back({{"snr_db", p.snr_db},
                           {"pre", ber_report_to_json(p.pre)},
                           {"post", ber_report_to_json(p.post)},
                           {"below_fec", p.below_fec}});

  if (!r.alpha_scan.empty()) {
    json scan = json::array();
    for (const auto& [alpha, b] : r.alpha_scan)
      scan.push_back({{"alpha", alpha}, {"ber", b}});
    j["alpha_scan"] = scan;
  }

  j["complexity"] = json::array();
  for (const auto& c : r.complexity) {
    json e = {{"algorithm", algorithm_name(c.algorithm)},
              {"M", c.M},
              {"N", c.N},
              {"operations", c.operations}};
    if (c.algorithm == Algorithm::bgd_adam) e["I"] = c.I;
    j["complexity"].push_back(e);
  }
  return j.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentReport r;
  r.config = config_from_json(j.at("config"));
  r.alphabet_scale = j.at("alphabet_scale").get<double>();
  r.sweep_seed_policy = j.at("sweep_seed_policy").get<std::string>();
  r.fec_ber_limit = j.at("fec_ber_limit").get<double>();
  const json& t = j.at("train");
  r.train.algorithm = t.at("algorithm").get<std::string>();
  r.train.trace_snr_db = t.at("trace_snr_db").get<double>();
  const auto taps = t.at("final_taps").get<std::vector<double>>();
  r.train.final_taps =
      Eigen::Map<const VecX<double>>(taps.data(),
                                     static_cast<Eigen::Index>(taps.size()));
  r.train.iterations_run = t.at("iterations_run").get<long long>();
  r.train.update_count = t.at("update_count").get<long long>();
  r.train.final_mse = t.at("final_mse").get<double>();
  for (const json& p : j.at("points")) {
    BerPoint bp;
    bp.snr_db = p.at("snr_db").get<double>();
    bp.pre = ber_report_from_json(p.at("pre"));
    bp.post = ber_report_from_json(p.at("post"));
    bp.below_fec = p.at("below_fec").get<bool>();
    r.points.push_back(bp);
  }
  if (j.contains("alpha_scan"))
    for (const json& e : j.at("alpha_scan"))
      r.alpha_scan.emplace_back(e.at("alpha").get<double>(),
                                e.at("ber").get<double>());
  for (const json& e : j.at("complexity")) {
    ComplexityReport c;
    c.algorithm = algorithm_from_name(e.at("algorithm").get<std::string>());
    c.M = e.at("M").get<long long>();
    c.N = e.at("N").get<long long>();
    c.I = e.contains("I") ? e.at("I").get<long long>() : 0;
    c.operations = e.at("operations").get<long long>();
    r.complexity.push_back(c);
  }
  return r;
}

std::string mse_trace_csv(const std::vector<double>& trace) {
  std::string out = "iteration,mse\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    out += std::to_string(i + 1) + "," + fmt17(trace[i]) + "\n";
  return out;
}

std::string ber_curve_csv(const std::vector<BerPoint>& points) {
  std::string out = "snr_db,ber_pre_mlsd,ber_post_mlsd,bit_errors,bits_compared\n";
  for (const auto& p : points) {
    // The count columns describe the final chain output (the post column).
    out += fmt17(p.snr_db);
    out += ",";
    out += fmt17(p.pre.ber);
    out += ",";
    out += fmt17(p.post.ber);
    out += ",";
    out += std::to_string(p.post.bit_errors);
    out += ",";
    out += std::to_string(p.post.bits_compared);
    out += "\n";
  }
  return out;
}

std::string equalized_csv(const VecX<double>& samples) {
  std::string out = "index,value\n";
  for (Eigen::Index k = 0; k < samples.size(); ++k)
    out += std::to_string(k) + "," + fmt17(samples[k]) + "\n";
  return out;
}

std::vector<double> parse_mse_trace_csv(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "iteration,mse")
    throw std::invalid_argument("mse trace CSV: bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("mse trace CSV: malformed row");
    out.push_back(std::stod(line.substr(comma + 1)));
  }
  return out;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() /
                       (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

}  // namespace pameq
