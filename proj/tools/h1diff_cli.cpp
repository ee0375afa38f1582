// Command-line driver: run / validate / list-presets.
// Exit codes: 0 success, 1 invariant (or run) failure, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "h1diff/h1diff.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

constexpr const char* kOutputEnv = "H1DIFF_OUTPUT_DIR";

struct ConfigDeleter {
  void operator()(h1diff_config* c) const { h1diff_config_free(c); }
};
struct SummaryDeleter {
  void operator()(h1diff_summary* s) const { h1diff_summary_free(s); }
};
using ConfigPtr = std::unique_ptr<h1diff_config, ConfigDeleter>;
using SummaryPtr = std::unique_ptr<h1diff_summary, SummaryDeleter>;

void report(const char* what, h1diff_status s) {
  std::fprintf(stderr, "%s: %s\n", what, h1diff_status_string(s));
  const std::string msg = h1diff_last_error();
  if (!msg.empty()) {
    std::size_t start = 0;
    while (start <= msg.size()) {
      const auto end = msg.find('\n', start);
      std::fprintf(stderr, "  %s\n", msg.substr(start, end - start).c_str());
      if (end == std::string::npos) break;
      start = end + 1;
    }
  }
}

// Loads and validates; returns nullptr after printing the errors.
ConfigPtr load(const std::string& path, int& exit_code) {
  h1diff_config* raw = nullptr;
  const auto s = h1diff_config_load(path.c_str(), &raw);
  if (s != H1DIFF_OK) {
    report(path.c_str(), s);
    exit_code = kExitUsage;
    return nullptr;
  }
  return ConfigPtr(raw);
}

std::string config_json(const h1diff_config* c) {
  std::size_t need = 0;
  h1diff_config_to_json(c, nullptr, 0, &need);
  std::string buf(need, '\0');
  h1diff_config_to_json(c, buf.data(), buf.size(), nullptr);
  buf.resize(need - 1);
  return buf;
}

int cmd_list() {
  for (std::size_t i = 0; i < h1diff_preset_count(); ++i) std::printf("%s\n", h1diff_preset_name(i));
  return kExitOk;
}

int cmd_validate(const std::string& path, bool quiet) {
  int code = kExitOk;
  auto cfg = load(path, code);
  if (!cfg) return code;
  if (!quiet) std::printf("%s\n", config_json(cfg.get()).c_str());
  return kExitOk;
}

int cmd_run(const std::string& path, const std::string& output_dir, bool quiet) {
  int code = kExitOk;
  auto cfg = load(path, code);
  if (!cfg) return code;

  std::string dir = output_dir;
  if (dir.empty())
    if (const char* env = std::getenv(kOutputEnv); env && *env) dir = env;
  if (!dir.empty()) {
    if (const auto s = h1diff_config_set_output_dir(cfg.get(), dir.c_str()); s != H1DIFF_OK) {
      report("output directory", s);
      return kExitUsage;
    }
  }

  h1diff_summary* raw = nullptr;
  if (const auto s = h1diff_run(cfg.get(), &raw); s != H1DIFF_OK) {
    report("run", s);
    return kExitFailed;
  }
  SummaryPtr summary(raw);
  const bool passed = h1diff_summary_passed(summary.get()) != 0;
  if (!quiet) {
    for (std::size_t i = 0; i < h1diff_summary_invariant_count(summary.get()); ++i) {
      h1diff_invariant inv{};
      h1diff_summary_invariant(summary.get(), i, &inv);
      const char* tag = inv.passed ? "PASS" : (inv.hard ? "FAIL" : "WARN");
      std::printf("%s %-32s %.6g %s %.6g", tag, inv.name, inv.value, inv.comparison, inv.threshold);
      if (inv.note && *inv.note) std::printf("  (%s)", inv.note);
      std::printf("\n");
    }
    std::printf("%s: %s in %.2fs, outputs in %s\n", h1diff_config_preset(cfg.get()), passed ? "passed" : "FAILED",
                h1diff_summary_wall_time(summary.get()), h1diff_config_output_dir(cfg.get()));
  }
  return passed ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"h1diff experiment driver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(h1diff_version()));

  std::string config_path, output_dir;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "JSON config")->required();
  run->add_option("-o,--output-dir", output_dir, std::string("output directory (overrides the config and $") +
                                                     kOutputEnv + ")");
  run->add_flag("-q,--quiet", quiet, "print nothing on success");

  auto* validate = app.add_subcommand("validate", "check a config file and print it with defaults filled in");
  validate->add_option("config", config_path, "JSON config")->required();
  validate->add_flag("-q,--quiet", quiet, "only set the exit status");

  app.add_subcommand("list-presets", "print the preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  if (*run) return cmd_run(config_path, output_dir, quiet);
  if (*validate) return cmd_validate(config_path, quiet);
  return cmd_list();
}
