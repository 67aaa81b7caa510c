#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pameq/config_io.hpp"
#include "pameq/report_io.hpp"

using namespace pameq;
namespace fs = std::filesystem;

namespace {

// Scratch directory removed when the test case ends.
struct TempDir {
  fs::path path;
  explicit TempDir(const char* tag) {
    path = fs::temp_directory_path() /
           (std::string("pameq_") + tag + "_" + std::to_string(getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int config_error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

// Small experiment that finishes in milliseconds.
const char* kTinyIni =
    "[alphabet]\n"
    "levels = 4\n"
    "\n"
    "[frame]\n"
    "training_len = 80\n"
    "payload_len = 300\n"
    "\n"
    "[equalizer]\n"
    "taps_count = 7\n"
    "offset = 3\n"
    "\n"
    "[trainer]\n"
    "algorithm = adam\n"
    "theta = 0.02\n"
    "iterations = 50\n"
    "\n"
    "[sweep]\n"
    "snr_db = 18, 24\n"
    "\n"
    "[seeds]\n"
    "payload = 5\n"
    "noise = 9\n";

ExperimentConfig tiny_config() { return parse_config(kTinyIni); }

// Runs the command line tool, returns its exit code, captures stdout+stderr.
int run_cli(const std::string& args, std::string* output = nullptr) {
  const TempDir tmp("cli_out");
  const std::string capture = tmp.file("out.txt");
  const std::string cmd =
      std::string(PAMEQ_CLI_PATH) + " " + args + " > '" + capture + "' 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  if (output) *output = read_file(capture);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config text parses with defaults, overrides and comments") {
  const ExperimentConfig def = parse_config("");
  CHECK(def.levels == 8);
  CHECK(def.training_len == 300);
  CHECK(def.taps_count == 21);
  CHECK(def.algorithm == "adam");
  CHECK(def.snr_db.size() == 8);

  const ExperimentConfig c = parse_config(
      "# leading comment\n"
      "[alphabet]\n"
      "levels = 4          # trailing comment\n"
      "normalize = false\n"
      "; alternate comment marker\n"
      "[channel]\n"
      "isi_taps = 0.5, 1, -0.25\n"
      "noiseless = 1\n"
      "[postproc]\n"
      "alpha_grid = 0, 0.5\n"
      "[seeds]\n"
      "payload = 42\n");
  CHECK(c.levels == 4);
  CHECK(c.normalize == false);
  CHECK(c.isi_taps == std::vector<double>{0.5, 1.0, -0.25});
  CHECK(c.noiseless);
  CHECK(c.alpha_grid == std::vector<double>{0.0, 0.5});
  CHECK(c.payload_seed == 42);
  CHECK(c.noise_seed == 2);  // untouched default
}

TEST_CASE("config serialization round-trips") {
  ExperimentConfig c = tiny_config();
  c.alpha_grid = {0.0, 0.3, 0.6};
  c.theta = 0.017;
  c.noise_seed = 123456789012345ull;
  const std::string text = serialize_config(c);
  const ExperimentConfig back = parse_config(text);
  CHECK(serialize_config(back) == text);
  CHECK(back.theta == c.theta);
  CHECK(back.alpha_grid == c.alpha_grid);
  CHECK(back.noise_seed == c.noise_seed);
  CHECK(back.snr_db == c.snr_db);
}

TEST_CASE("config errors carry the offending line") {
  CHECK(config_error_line("[bogus]\n") == 1);
  CHECK(config_error_line("[trainer]\nwat = 1\n") == 2);
  CHECK(config_error_line("[trainer]\ntheta 0.01\n") == 2);
  CHECK(config_error_line("theta = 0.01\n") == 1);
  CHECK(config_error_line("[trainer]\ntheta = abc\n") == 2);
  CHECK(config_error_line("[alphabet]\nlevels = 8x\n") == 2);
  CHECK(config_error_line("[alphabet]\nnormalize = yes\n") == 2);
  CHECK(config_error_line("[seeds]\npayload = -3\n") == 2);
  CHECK(config_error_line("[alphabet\n") == 1);
  CHECK(config_error_line("\n\n[frame]\ntraining_len =\n") == 4);
}

TEST_CASE("missing config file raises a config error") {
  CHECK_THROWS_AS(read_config_file("/nonexistent/pameq.ini"), ConfigError);
}

TEST_CASE("shipped configs parse") {
  const std::string root(PAMEQ_SOURCE_DIR);
  const ExperimentConfig desk = read_config_file(root + "/configs/desk_pam8.ini");
  CHECK(desk.levels == 8);
  CHECK(desk.training_len == 300);
  CHECK(desk.taps_count == 21);
  CHECK(desk.offset == 10);
  CHECK(desk.algorithm == "adam");
  CHECK(desk.iterations == 120);
  CHECK(desk.mlsd_enabled);
  CHECK(desk.snr_db.size() == 8);
  CHECK(desk.snr_db.front() == 20);
  CHECK(desk.snr_db.back() == 34);
  const ExperimentConfig ref =
      read_config_file(root + "/configs/ref_scale_pam8.ini");
  CHECK(ref.levels == 8);
  CHECK(ref.taps_count == 181);
  CHECK(ref.training_len == 300);
  CHECK(ref.iterations == 120);
  // The wide-equalizer preset actually runs, and its report carries the
  // headline per-update operation count for this operating point.
  const ExperimentReport wide = run_experiment(ref, 2);
  REQUIRE(wide.points.size() == 1);
  CHECK(wide.complexity[0].operations == 5408280);
  CHECK(wide.train.final_taps.size() == 181);
}

TEST_CASE("report json round-trips byte for byte") {
  ExperimentConfig c = tiny_config();
  c.alpha_grid = {0.0, 0.5};
  const ExperimentReport report = run_experiment(c);
  const std::string first = report_to_json(report);
  const ExperimentReport back = report_from_json(first);
  CHECK(report_to_json(back) == first);
  CHECK(back.points.size() == report.points.size());
  CHECK(back.train.final_taps == report.train.final_taps);
  CHECK(back.train.final_mse == report.train.final_mse);
  CHECK(back.alpha_scan == report.alpha_scan);
  CHECK(back.config.snr_db == report.config.snr_db);
  CHECK(back.complexity.size() == 3);
  CHECK(back.complexity[0].operations == report.complexity[0].operations);
}

TEST_CASE("csv renderers emit exact, parseable tables") {
  CHECK(mse_trace_csv({1.5, 0.25}) == "iteration,mse\n1,1.5\n2,0.25\n");
  CHECK(parse_mse_trace_csv("iteration,mse\n1,0.5\n") ==
        std::vector<double>{0.5});
  CHECK_THROWS_AS(parse_mse_trace_csv("iter,mse\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_mse_trace_csv("iteration,mse\nrow-with-no-comma\n"),
                  std::invalid_argument);

  // 17 significant digits survive a text round trip bit-exactly.
  std::vector<double> trace;
  for (int i = 1; i <= 40; ++i) trace.push_back(0.1 / i + 1e-9 * i);
  CHECK(parse_mse_trace_csv(mse_trace_csv(trace)) == trace);

  BerPoint p;
  p.snr_db = 20;
  p.pre.bit_errors = 2;
  p.pre.bits_compared = 100;
  p.pre.ber = 0.02;
  p.post.bit_errors = 1;
  p.post.bits_compared = 100;
  p.post.ber = 0.01;
  CHECK(ber_curve_csv({p}) ==
        "snr_db,ber_pre_mlsd,ber_post_mlsd,bit_errors,bits_compared\n"
        "20,0.02,0.01,1,100\n");

  VecX<double> samples(2);
  samples << 1.5, -2.0;
  CHECK(equalized_csv(samples) == "index,value\n0,1.5\n1,-2\n");
}

TEST_CASE("atomic file writes leave no temporaries behind") {
  const TempDir tmp("atomic");
  const std::string target = tmp.file("data.txt");
  atomic_write_file(target, "hello\n");
  CHECK(read_file(target) == "hello\n");
  atomic_write_file(target, "bye\n");  // overwrite
  CHECK(read_file(target) == "bye\n");
  CHECK(!fs::exists(target + ".tmp"));
  int entries = 0;
  for (const auto& _ : fs::directory_iterator(tmp.path)) {
    (void)_;
    ++entries;
  }
  CHECK(entries == 1);
}

TEST_CASE("cli complexity table prints the operation counts") {
  std::string out;
  CHECK(run_cli("complexity --M 300 --N 181 --I 120", &out) == 0);
  CHECK(out.find("algorithm") != std::string::npos);
  CHECK(out.find("bgd_adam") != std::string::npos);
  CHECK(out.find("5408280") != std::string::npos);
  CHECK(out.find("435600") != std::string::npos);
  CHECK(out.find("29757000") != std::string::npos);
  CHECK(out.find("Parallel") != std::string::npos);
  CHECK(out.find("Serial") != std::string::npos);
  // The serial baseline row advertises its 4x sample budget.
  CHECK(out.find("1200") != std::string::npos);
}

TEST_CASE("cli run writes a reproducible bundle") {
  const TempDir tmp("run");
  const std::string ini = tmp.file("exp.ini");
  write_file(ini, kTinyIni);

  CHECK(run_cli("run '" + ini + "' --out '" + tmp.file("a") + "'") == 0);
  CHECK(fs::exists(tmp.file("a") + "/report.json"));
  CHECK(fs::exists(tmp.file("a") + "/mse_trace.csv"));
  CHECK(fs::exists(tmp.file("a") + "/ber_curve.csv"));
  CHECK(!fs::exists(tmp.file("a") + "/equalized.csv"));

  const ExperimentReport report =
      report_from_json(read_file(tmp.file("a") + "/report.json"));
  CHECK(report.points.size() == 2);
  CHECK(report.train.iterations_run == 50);
  // The trace CSV carries what an identical in-process run observes; the
  // JSON itself stores the trace only through its summary fields.
  CHECK(parse_mse_trace_csv(read_file(tmp.file("a") + "/mse_trace.csv")) ==
        run_experiment(tiny_config()).train.mse_trace);

  CHECK(run_cli("run '" + ini + "' --out '" + tmp.file("b") +
                "' --threads 3 --dump-equalized") == 0);
  CHECK(read_file(tmp.file("b") + "/report.json") ==
        read_file(tmp.file("a") + "/report.json"));
  CHECK(read_file(tmp.file("b") + "/ber_curve.csv") ==
        read_file(tmp.file("a") + "/ber_curve.csv"));
  CHECK(fs::exists(tmp.file("b") + "/equalized.csv"));
}

TEST_CASE("cli surfaces usage, config and runtime failures distinctly") {
  const TempDir tmp("fail");
  // Usage problems and config problems exit 2.
  CHECK(run_cli("run /nonexistent/exp.ini --out '" + tmp.file("x") + "'") == 2);
  CHECK(run_cli("complexity --M 300 --N 181") == 2);  // missing --I
  CHECK(run_cli("complexity --M 5 --N 10 --I 3") == 2);  // M below N

  const std::string bad = tmp.file("bad.ini");
  write_file(bad, "[alphabet]\nlevels = eight\n");
  CHECK(run_cli("run '" + bad + "' --out '" + tmp.file("x") + "'") == 2);

  const std::string semantic = tmp.file("semantic.ini");
  write_file(semantic, "[alphabet]\nlevels = 6\n");
  CHECK(run_cli("run '" + semantic + "' --out '" + tmp.file("x") + "'") == 2);

  // A config that validates but cannot run exits 3: the long channel delay
  // pushes the alignment beyond what a 4-tap window absorbs.
  const std::string stuck = tmp.file("stuck.ini");
  write_file(stuck,
             "[alphabet]\nlevels = 2\n"
             "[frame]\ntraining_len = 80\npayload_len = 30\n"
             "[channel]\nisi_taps = 1.0\ndelay = 40\nnoiseless = true\n"
             "[equalizer]\ntaps_count = 4\noffset = 3\n"
             "[trainer]\nalgorithm = adam\ntheta = 0.02\niterations = 5\n"
             "[sweep]\nsnr_db = 20\n");
  std::string out;
  CHECK(run_cli("run '" + stuck + "' --out '" + tmp.file("x") + "'", &out) == 3);
  CHECK(out.find("training-set") != std::string::npos);
}

TEST_CASE("cli sweep writes one bundle per value plus a comparison table") {
  const TempDir tmp("sweep");
  const std::string ini = tmp.file("exp.ini");
  write_file(ini, kTinyIni);
  const std::string out_dir = tmp.file("sw");

  CHECK(run_cli("sweep '" + ini + "' --param trainer --values adam,lms --out '" +
                out_dir + "' --threads 2") == 0);
  CHECK(fs::exists(out_dir + "/trainer_adam/report.json"));
  CHECK(fs::exists(out_dir + "/trainer_lms/report.json"));
  const std::string merged = read_file(out_dir + "/comparison.csv");
  CHECK(merged.rfind(
            "param,value,snr_db,ber_pre_mlsd,ber_post_mlsd,bit_errors,"
            "bits_compared\n",
            0) == 0);
  CHECK(merged.find("trainer,adam,") != std::string::npos);
  CHECK(merged.find("trainer,lms,") != std::string::npos);

  CHECK(run_cli("sweep '" + ini + "' --param bogus --values 1 --out '" +
                tmp.file("y") + "'") == 2);
  CHECK(run_cli("sweep '" + ini + "' --param theta --values '' --out '" +
                tmp.file("y") + "'") == 2);
}
