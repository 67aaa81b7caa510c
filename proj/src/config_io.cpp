#include "pameq/config_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pameq/errors.hpp"

namespace pameq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
  bool saw_space = true;
  for (std::size_t i = 0; i < s.size(); ++i) {
    // '#' or ';' starts a comment at line start or after whitespace.
    if ((s[i] == '#' || s[i] == ';') && saw_space) return s.substr(0, i);
    saw_space = (s[i] == ' ' || s[i] == '\t');
  }
  return s;
}

double parse_double(const std::string& v, int line) {
  const std::string t = trim(v);
  if (t.empty()) throw ConfigError("empty numeric value", line);
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(t.c_str(), &end);
  if (errno != 0 || end != t.c_str() + t.size())
    throw ConfigError("malformed number '" + t + "'", line);
  return x;
}

long long parse_int(const std::string& v, int line) {
  const std::string t = trim(v);
  if (t.empty()) throw ConfigError("empty integer value", line);
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(t.c_str(), &end, 10);
  if (errno != 0 || end != t.c_str() + t.size())
    throw ConfigError("malformed integer '" + t + "'", line);
  return x;
}

std::uint64_t parse_uint(const std::string& v, int line) {
  const std::string t = trim(v);
  if (t.empty() || t[0] == '-')
    throw ConfigError("malformed unsigned integer '" + t + "'", line);
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(t.c_str(), &end, 10);
  if (errno != 0 || end != t.c_str() + t.size())
    throw ConfigError("malformed unsigned integer '" + t + "'", line);
  return x;
}

bool parse_bool(const std::string& v, int line) {
  const std::string t = trim(v);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError("malformed boolean '" + t + "' (use true/false)", line);
}

std::vector<double> parse_double_list(const std::string& v, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, line));
  return out;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_double(xs[i]);
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  bool saw_alpha_grid = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("unterminated section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section != "alphabet" && section != "frame" && section != "channel" &&
          section != "equalizer" && section != "trainer" &&
          section != "postproc" && section != "sweep" && section != "seeds")
        throw ConfigError("unknown section [" + section + "]", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("key '" + key + "' outside any section", line_no);

    auto unknown = [&]() -> ConfigError {
      return ConfigError("unknown key '" + key + "' in [" + section + "]",
                         line_no);
    };
    if (section == "alphabet") {
      if (key == "levels")
        c.levels = static_cast<int>(parse_int(value, line_no));
      else if (key == "normalize")
        c.normalize = parse_bool(value, line_no);
      else
        throw unknown();
    } else if (section == "frame") {
      if (key == "training_len")
        c.training_len = parse_int(value, line_no);
      else if (key == "payload_len")
        c.payload_len = parse_int(value, line_no);
      else
        throw unknown();
    } else if (section == "channel") {
      if (key == "isi_taps")
        c.isi_taps = parse_double_list(value, line_no);
      else if (key == "delay")
        c.delay = static_cast<int>(parse_int(value, line_no));
      else if (key == "noiseless")
        c.noiseless = parse_bool(value, line_no);
      else
        throw unknown();
    } else if (section == "equalizer") {
      if (key == "taps_count")
        c.taps_count = static_cast<int>(parse_int(value, line_no));
      else if (key == "offset")
        c.offset = static_cast<int>(parse_int(value, line_no));
      else
        throw unknown();
    } else if (section == "trainer") {
      if (key == "algorithm")
        c.algorithm = value;
      else if (key == "theta")
        c.theta = parse_double(value, line_no);
      else if (key == "iterations")
        c.iterations = parse_int(value, line_no);
      else if (key == "mu")
        c.mu = parse_double(value, line_no);
      else if (key == "passes")
        c.passes = parse_int(value, line_no);
      else if (key == "lambda")
        c.lambda = parse_double(value, line_no);
      else if (key == "delta")
        c.delta = parse_double(value, line_no);
      else
        throw unknown();
    } else if (section == "postproc") {
      if (key == "alpha")
        c.alpha = parse_double(value, line_no);
      else if (key == "mlsd")
        c.mlsd_enabled = parse_bool(value, line_no);
      else if (key == "alpha_grid") {
        c.alpha_grid = parse_double_list(value, line_no);
        saw_alpha_grid = true;
      } else
        throw unknown();
    } else if (section == "sweep") {
      if (key == "snr_db")
        c.snr_db = parse_double_list(value, line_no);
      else
        throw unknown();
    } else if (section == "seeds") {
      if (key == "payload")
        c.payload_seed = parse_uint(value, line_no);
      else if (key == "noise")
        c.noise_seed = parse_uint(value, line_no);
      else
        throw unknown();
    }
  }
  if (!saw_alpha_grid) c.alpha_grid.clear();
  return c;
}

ExperimentConfig read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[alphabet]\n"
      << "levels = " << c.levels << "\n"
      << "normalize = " << (c.normalize ? "true" : "false") << "\n\n"
      << "[frame]\n"
      << "training_len = " << c.training_len << "\n"
      << "payload_len = " << c.payload_len << "\n\n"
      << "[channel]\n"
      << "isi_taps = " << join_doubles(c.isi_taps) << "\n"
      << "delay = " << c.delay << "\n"
      << "noiseless = " << (c.noiseless ? "true" : "false") << "\n\n"
      << "[equalizer]\n"
      << "taps_count = " << c.taps_count << "\n"
      << "offset = " << c.offset << "\n\n"
      << "[trainer]\n"
      << "algorithm = " << c.algorithm << "\n"
      << "theta = " << format_double(c.theta) << "\n"
      << "iterations = " << c.iterations << "\n"
      << "mu = " << format_double(c.mu) << "\n"
      << "passes = " << c.passes << "\n"
      << "lambda = " << format_double(c.lambda) << "\n"
      << "delta = " << format_double(c.delta) << "\n\n"
      << "[postproc]\n"
      << "alpha = " << format_double(c.alpha) << "\n"
      << "mlsd = " << (c.mlsd_enabled ? "true" : "false") << "\n";
  if (!c.alpha_grid.empty())
    out << "alpha_grid = " << join_doubles(c.alpha_grid) << "\n";
  out << "\n[sweep]\n"
      << "snr_db = " << join_doubles(c.snr_db) << "\n\n"
      << "[seeds]\n"
      << "payload = " << c.payload_seed << "\n"
      << "noise = " << c.noise_seed << "\n";
  return out.str();
}

}  // namespace pameq
