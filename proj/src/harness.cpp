#include "h1diff/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "h1diff/errors.hpp"
#include "h1diff/euler_alpha.hpp"
#include "h1diff/jacobi.hpp"

namespace h1diff {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::array<std::string_view, 6> kPresetNames = {"euler2d",           "geodesic1d",       "verify-geodesics",
                                                          "curvature-table", "jacobi-stability", "conjugate-scan"};

// Hard tolerances of the preset invariants.
constexpr double kEnergyDriftFlow = 1e-8;
constexpr double kDivergenceTol = 1e-10;
constexpr double kSteadyTol = 1e-8;
constexpr double kEnergyDriftGeodesic = 1e-6;
constexpr double kBreakdownTimeTol = 0.1;
constexpr double kCamassaHolmTol = 1e-4;
constexpr double kResidualTol = 1e-10;
constexpr double kRefinementTol = 1e-8;
constexpr double kVanishingTol = 1e-10;
constexpr double kConvexityTol = 1e-6;
constexpr double kTangentNorm2d = 1e-8;
constexpr double kTangentField1d = 1e-6;
constexpr double kDeviationOrder = 0.9;
constexpr double kSphereTimeTol = 0.01;

std::string join(const std::string& prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Config reading

class Reader {
 public:
  explicit Reader(std::vector<ConfigError>& errors) : errors_(errors) {}

  void error(std::string path, std::string message) { errors_.push_back({std::move(path), std::move(message)}); }

  void only_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        std::string list;
        for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
        error(join(path, key), "unknown key (expected one of: " + list + ")");
      }
    }
  }

  const json* find(const json& obj, std::string_view key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  bool real(const json& obj, std::string_view key, const std::string& prefix, double& out) {
    const json* v = find(obj, key);
    if (!v) return false;
    if (!v->is_number()) return type_error(join(prefix, key), "a number", *v);
    out = v->get<double>();
    return true;
  }

  bool integer(const json& obj, std::string_view key, const std::string& prefix, int& out) {
    const json* v = find(obj, key);
    if (!v) return false;
    if (!v->is_number_integer()) return type_error(join(prefix, key), "an integer", *v);
    const auto i = v->get<std::int64_t>();
    if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) {
      error(join(prefix, key), "integer out of range");
      return false;
    }
    out = static_cast<int>(i);
    return true;
  }

  bool unsigned64(const json& obj, std::string_view key, const std::string& prefix, std::uint64_t& out) {
    const json* v = find(obj, key);
    if (!v) return false;
    if (!v->is_number_unsigned()) return type_error(join(prefix, key), "a non-negative integer", *v);
    out = v->get<std::uint64_t>();
    return true;
  }

  bool boolean(const json& obj, std::string_view key, const std::string& prefix, bool& out) {
    const json* v = find(obj, key);
    if (!v) return false;
    if (!v->is_boolean()) return type_error(join(prefix, key), "a boolean", *v);
    out = v->get<bool>();
    return true;
  }

  bool string(const json& obj, std::string_view key, const std::string& prefix, std::string& out) {
    const json* v = find(obj, key);
    if (!v) return false;
    if (!v->is_string()) return type_error(join(prefix, key), "a string", *v);
    out = v->get<std::string>();
    return true;
  }

  const json* object(const json& obj, std::string_view key, const std::string& prefix) {
    const json* v = find(obj, key);
    if (!v) return nullptr;
    if (!v->is_object()) {
      type_error(join(prefix, key), "an object", *v);
      return nullptr;
    }
    return v;
  }

  const json* array(const json& obj, std::string_view key, const std::string& prefix) {
    const json* v = find(obj, key);
    if (!v) return nullptr;
    if (!v->is_array()) {
      type_error(join(prefix, key), "an array", *v);
      return nullptr;
    }
    return v;
  }

  template <typename T, typename Pred, typename Get>
  bool list(const json& obj, std::string_view key, const std::string& prefix, std::vector<T>& out, Pred ok,
            const char* expected, Get get) {
    const json* a = array(obj, key, prefix);
    if (!a) return false;
    std::vector<T> values;
    bool good = true;
    for (std::size_t i = 0; i < a->size(); ++i) {
      const json& e = (*a)[i];
      if (!ok(e)) {
        type_error(join(prefix, key) + "[" + std::to_string(i) + "]", expected, e);
        good = false;
      } else {
        values.push_back(get(e));
      }
    }
    if (good) out = std::move(values);
    return good;
  }

  bool range(bool ok, const std::string& path, const std::string& message) {
    if (!ok) error(path, message);
    return ok;
  }

 private:
  bool type_error(const std::string& path, const char* expected, const json& got) {
    error(path, std::string("expected ") + expected + ", got " + got.type_name());
    return false;
  }

  std::vector<ConfigError>& errors_;
};

std::optional<Preset> preset_from(std::string_view s) {
  for (std::size_t i = 0; i < kPresetNames.size(); ++i)
    if (kPresetNames[i] == s) return static_cast<Preset>(i);
  return std::nullopt;
}

void apply_preset_defaults(ExperimentConfig& c) {
  switch (c.preset) {
    case Preset::Euler2d:
      break;
    case Preset::Geodesic1d:
      c.dim = 1;
      c.n = 256;
      break;
    case Preset::VerifyGeodesics:
      break;
    case Preset::CurvatureTable:
      c.n = 32;
      break;
    case Preset::JacobiStability:
      c.n = 32;
      c.dt = 1e-2;
      c.t_end = 5.0;
      break;
    case Preset::ConjugateScan:
      c.n = 32;
      c.dt = 2e-2;
      c.t_end = 5.0;
      c.cadence = 1;
      break;
  }
}

std::vector<std::string_view> generators_for(Preset p, int dim) {
  switch (p) {
    case Preset::Euler2d: return {"random_divergence_free", "zero", "taylor_green", "shear", "trig"};
    case Preset::Geodesic1d: return {"trig", "zero", "random_band_limited"};
    case Preset::VerifyGeodesics: return {"families"};
    case Preset::CurvatureTable: return {"sign_pairs", "pairs"};
    case Preset::JacobiStability:
    case Preset::ConjugateScan:
      if (dim == 1) return {"trig", "random_band_limited"};
      return {"shearing", "translating"};
  }
  return {};
}

bool uses_profile(const std::string& g) { return g == "shear" || g == "shearing" || g == "translating"; }

void fill_generator_defaults(ExperimentConfig& c) {
  auto& d = c.initial_data;
  if (d.generator.empty()) d.generator = std::string(generators_for(c.preset, c.dim).front());
  if (d.spec.empty()) {
    if (uses_profile(d.generator) || (d.generator == "trig" && c.dim == 1)) d.spec = "0: 1*sin(1)";
    if (d.generator == "trig" && c.dim == 2) d.spec = "0: 1*sin(0,1); 1: 1*sin(1,0)";
  }
  if (d.directions.empty() && (c.preset == Preset::JacobiStability || c.preset == Preset::ConjugateScan)) {
    if (c.dim == 1)
      d.directions = {"0: 1*cos(1)"};
    else if (c.preset == Preset::JacobiStability)
      d.directions = {"0: 1*cos(0,1)"};
    else
      d.directions = {"0: 1*cos(0,1)", "1: 1*cos(1,0)", "0: 1*sin(0,2); 1: 1*sin(2,0)"};
  }
}

// Parses a spec and checks it fits the grid; returns nullopt after recording an error.
std::optional<TrigFieldSpec> checked_spec(Reader& r, const std::string& text, int dim, int comps, int cutoff,
                                          const std::string& path, bool divergence_free) {
  try {
    auto s = TrigFieldSpec::parse(text, dim, comps);
    if (s.max_wavenumber() > cutoff) {
      r.error(path, "wavenumber " + std::to_string(s.max_wavenumber()) + " exceeds the grid cutoff " +
                        std::to_string(cutoff));
      return std::nullopt;
    }
    if (divergence_free && !s.is_divergence_free()) {
      r.error(path, "field must be divergence-free");
      return std::nullopt;
    }
    return s;
  } catch (const Error& e) {
    r.error(path, e.what());
    return std::nullopt;
  }
}

void read_initial_data(Reader& r, const json& obj, ExperimentConfig& c) {
  const std::string p = "initial_data";
  auto& d = c.initial_data;
  r.only_keys(obj, p,
              {"generator", "seed", "max_mode", "amplitude", "spec", "speed", "directions", "wavenumbers", "speeds",
               "pairs"});
  r.string(obj, "generator", p, d.generator);
  r.unsigned64(obj, "seed", p, d.seed);
  r.integer(obj, "max_mode", p, d.max_mode);
  if (r.real(obj, "amplitude", p, d.amplitude)) r.range(std::isfinite(d.amplitude), p + ".amplitude", "must be finite");
  r.string(obj, "spec", p, d.spec);
  if (r.real(obj, "speed", p, d.speed)) r.range(std::isfinite(d.speed), p + ".speed", "must be finite");
  r.list(obj, "directions", p, d.directions, [](const json& e) { return e.is_string(); }, "a string",
         [](const json& e) { return e.get<std::string>(); });
  r.list(obj, "wavenumbers", p, d.wavenumbers, [](const json& e) { return e.is_number_integer(); }, "an integer",
         [](const json& e) { return static_cast<int>(e.get<std::int64_t>()); });
  r.list(obj, "speeds", p, d.speeds, [](const json& e) { return e.is_number(); }, "a number",
         [](const json& e) { return e.get<double>(); });
  if (const json* a = r.array(obj, "pairs", p)) {
    d.pairs.clear();
    for (std::size_t i = 0; i < a->size(); ++i) {
      const std::string ip = p + ".pairs[" + std::to_string(i) + "]";
      const json& e = (*a)[i];
      if (!e.is_object()) {
        r.error(ip, std::string("expected an object, got ") + e.type_name());
        continue;
      }
      r.only_keys(e, ip, {"x", "y"});
      std::string x, y;
      const bool hx = r.string(e, "x", ip, x), hy = r.string(e, "y", ip, y);
      if (!e.contains("x")) r.error(ip + ".x", "missing");
      if (!e.contains("y")) r.error(ip + ".y", "missing");
      if (hx && hy) d.pairs.emplace_back(x, y);
    }
  }
}

void read_checks(Reader& r, const json& obj, ExperimentConfig& c) {
  const std::string p = "checks";
  r.only_keys(obj, p, {"ch_window", "deviation_eps", "vanishing_trials", "refine"});
  r.real(obj, "ch_window", p, c.checks.ch_window);
  r.list(obj, "deviation_eps", p, c.checks.deviation_eps, [](const json& e) { return e.is_number(); }, "a number",
         [](const json& e) { return e.get<double>(); });
  r.integer(obj, "vanishing_trials", p, c.checks.vanishing_trials);
  r.boolean(obj, "refine", p, c.checks.refine);
}

void check_ranges(Reader& r, ExperimentConfig& c) {
  const bool dim_ok = r.range(c.dim == 1 || c.dim == 2, "grid.dim", "must be 1 or 2");
  const bool n_ok = r.range(c.n >= 8 && c.n <= 4096 && c.n % 2 == 0, "grid.n", "must be an even integer in [8, 4096]");
  const bool af_ok =
      r.range(c.alias_fraction > 0.0 && c.alias_fraction <= 1.0, "grid.alias_fraction", "must lie in (0, 1]");
  r.range(c.alpha >= 0.0 && std::isfinite(c.alpha), "alpha", "must be >= 0");
  const bool dt_ok = r.range(c.dt > 0.0 && std::isfinite(c.dt), "dt", "must be > 0 (got " + num(c.dt) + ")");
  const bool te_ok = r.range(c.t_end >= 0.0 && std::isfinite(c.t_end), "t_end", "must be >= 0 (got " + num(c.t_end) + ")");
  if (dt_ok && te_ok) r.range(c.t_end / c.dt <= 1e7, "dt", "t_end / dt exceeds 1e7 steps");
  r.range(c.cadence >= 1, "cadence", "must be >= 1");
  r.range(c.checks.ch_window >= 0.0 && std::isfinite(c.checks.ch_window), "checks.ch_window", "must be >= 0");
  r.range(c.checks.vanishing_trials >= 0 && c.checks.vanishing_trials <= 1000, "checks.vanishing_trials",
          "must lie in [0, 1000]");
  for (std::size_t i = 0; i < c.checks.deviation_eps.size(); ++i)
    r.range(c.checks.deviation_eps[i] > 0.0 && c.checks.deviation_eps[i] < 1.0,
            "checks.deviation_eps[" + std::to_string(i) + "]", "must lie in (0, 1)");
  if (!dim_ok) return;

  switch (c.preset) {
    case Preset::Euler2d:
    case Preset::VerifyGeodesics:
    case Preset::CurvatureTable:
      if (!r.range(c.dim == 2, "grid.dim", "preset " + std::string(to_string(c.preset)) + " requires dim 2")) return;
      break;
    case Preset::Geodesic1d:
      if (!r.range(c.dim == 1, "grid.dim", "preset geodesic1d requires dim 1")) return;
      break;
    default:
      break;
  }
  if (c.preset == Preset::JacobiStability && c.dim == 1)
    r.range(c.checks.deviation_eps.size() >= 2, "checks.deviation_eps", "needs at least two values");

  auto& d = c.initial_data;
  const auto valid = generators_for(c.preset, c.dim);
  if (std::find(valid.begin(), valid.end(), d.generator) == valid.end()) {
    std::string list;
    for (auto v : valid) list += (list.empty() ? "" : ", ") + std::string(v);
    r.error("initial_data.generator", "unknown generator '" + d.generator + "' for preset " +
                                          std::string(to_string(c.preset)) + " (valid: " + list + ")");
    return;
  }
  if (!n_ok || !af_ok) return;
  const int cutoff = Grid(c.dim, c.n, c.alias_fraction).cutoff();
  const std::string p = "initial_data";
  if (d.generator == "random_divergence_free" || d.generator == "random_band_limited")
    r.range(d.max_mode >= 1 && d.max_mode <= cutoff, p + ".max_mode",
            "must lie in [1, " + std::to_string(cutoff) + "]");
  if (uses_profile(d.generator)) checked_spec(r, d.spec, 1, 1, cutoff, p + ".spec", false);
  if (d.generator == "trig") checked_spec(r, d.spec, c.dim, c.dim, cutoff, p + ".spec", c.dim == 2);
  if (d.generator == "families" || d.generator == "sign_pairs") {
    r.range(!d.wavenumbers.empty(), p + ".wavenumbers", "must not be empty");
    for (std::size_t i = 0; i < d.wavenumbers.size(); ++i)
      r.range(d.wavenumbers[i] >= 1 && d.wavenumbers[i] <= cutoff, p + ".wavenumbers[" + std::to_string(i) + "]",
              "must lie in [1, " + std::to_string(cutoff) + "]");
  }
  if (d.generator == "families") {
    for (std::size_t i = 0; i < d.speeds.size(); ++i)
      r.range(std::isfinite(d.speeds[i]), p + ".speeds[" + std::to_string(i) + "]", "must be finite");
  }
  if (d.generator == "pairs") {
    r.range(!d.pairs.empty(), p + ".pairs", "must not be empty");
    for (std::size_t i = 0; i < d.pairs.size(); ++i) {
      const std::string ip = p + ".pairs[" + std::to_string(i) + "]";
      checked_spec(r, d.pairs[i].first, 2, 2, cutoff, ip + ".x", false);
      checked_spec(r, d.pairs[i].second, 2, 2, cutoff, ip + ".y", false);
    }
  }
  if (c.preset == Preset::JacobiStability || c.preset == Preset::ConjugateScan) {
    r.range(!d.directions.empty(), p + ".directions", "must not be empty");
    for (std::size_t i = 0; i < d.directions.size(); ++i) {
      const std::string ip = p + ".directions[" + std::to_string(i) + "]";
      if (auto s = checked_spec(r, d.directions[i], c.dim, c.dim, cutoff, ip, c.dim == 2))
        r.range(!s->canonical().terms().empty(), ip, "direction must be nonzero");
    }
  }
}

// ---------------------------------------------------------------------------
// Output

class IoFailure : public Error {
 public:
  using Error::Error;
};

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      text_ += (first ? "" : ",") + std::string(h);
      first = false;
    }
    text_ += "\n";
  }
  Csv& cell(double v) { return raw(num(v)); }
  Csv& cell(int v) { return raw(std::to_string(v)); }
  Csv& cell(std::size_t v) { return raw(std::to_string(v)); }
  Csv& cell(const std::string& s) { return raw(quote(s)); }
  Csv& blank() { return raw(""); }
  void end() {
    text_ += "\n";
    fresh_ = true;
  }
  const std::string& text() const { return text_; }

 private:
  Csv& raw(const std::string& s) {
    text_ += (fresh_ ? "" : ",") + s;
    fresh_ = false;
    return *this;
  }
  std::string text_;
  bool fresh_ = true;
};

class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoFailure("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& content, bool manifest = true) {
    std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) throw IoFailure("cannot write '" + (dir_ / name).string() + "'");
    if (manifest) files.push_back({name, content.size(), fnv1a64(content)});
  }

  std::vector<OutputFile> files;

 private:
  fs::path dir_;
};

struct Recorder {
  std::vector<InvariantResult> list;

  void check(std::string name, double value, std::string_view cmp, double threshold, bool hard = true,
             std::string note = {}) {
    bool ok = false;
    if (cmp == "<=") ok = value <= threshold;
    else if (cmp == ">=") ok = value >= threshold;
    else if (cmp == ">") ok = value > threshold;
    else if (cmp == "==") ok = value == threshold;
    list.push_back({std::move(name), value, threshold, std::string(cmp), ok, hard, std::move(note)});
  }
};

// Runs fn(i) for i < count on a small pool; results keep index order.
template <typename Fn>
auto parallel_map(std::size_t count, Fn fn) {
  using R = decltype(fn(std::size_t{}));
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> failures(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

double rel_change(const SpectralField& a, const SpectralField& b) {
  const double scale = b.max_abs_coefficient();
  const double d = (a - b).max_abs_coefficient();
  return scale > 0.0 ? d / scale : d;
}

TrigFieldSpec profile_of(const ExperimentConfig& c) { return TrigFieldSpec::parse(c.initial_data.spec, 1, 1); }

// (h(x2), 0) from a scalar profile h.
TrigFieldSpec shear_spec(const TrigFieldSpec& profile) {
  TrigFieldSpec s(2, 2);
  for (const auto& t : profile.terms()) s.add(0, t.amplitude, {0, t.wavevector[0]}, t.phase);
  return s;
}

GeodesicFamily family_of(const ExperimentConfig& c) {
  GeodesicFamily f;
  f.kind = c.initial_data.generator == "translating" ? FamilyKind::Translating : FamilyKind::Shearing;
  f.profile = profile_of(c);
  f.speed = c.initial_data.speed;
  return f;
}

GridField field_1d(const ExperimentConfig& c, const Grid& g) {
  const auto& d = c.initial_data;
  if (d.generator == "zero") return GridField(g, 1);
  if (d.generator == "random_band_limited") return to_physical(random_band_limited(g, 1, d.seed, d.max_mode, d.amplitude));
  return to_physical(TrigFieldSpec::parse(d.spec, 1, 1).to_field(g));
}

void write_field_2d(Output& out, const std::string& name, const SpectralField& f) {
  const auto phys = to_physical(f);
  const Grid& g = f.grid();
  Csv csv({"x1", "x2", "u1", "u2"});
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * g.n() + j;
      csv.cell(g.node(i)).cell(g.node(j)).cell(phys.component(0)[idx]).cell(phys.component(1)[idx]).end();
    }
  out.write(name, csv.text());
}

// ---------------------------------------------------------------------------
// Presets

void run_euler2d(const ExperimentConfig& c, Output& out, Recorder& rec) {
  const Grid g = c.grid();
  const auto& d = c.initial_data;
  SpectralField u0(g, 2);
  if (d.generator == "random_divergence_free") u0 = random_divergence_free(g, d.seed, d.max_mode, d.amplitude);
  else if (d.generator == "taylor_green") u0 = taylor_green(g, d.amplitude);
  else if (d.generator == "shear") u0 = shear_spec(profile_of(c)).to_field(g);
  else if (d.generator == "trig") u0 = TrigFieldSpec::parse(d.spec, 2, 2).to_field(g);
  const bool steady = d.generator == "taylor_green" || d.generator == "shear";

  double steady_dev = 0.0;
  const auto run = integrate_flow(FlowState{u0, c.alpha, 0.0}, c.dt, c.t_end, c.cadence, {}, [&](const FlowState& s) {
    if (steady) steady_dev = std::max(steady_dev, rel_change(s.velocity, u0));
  });

  Csv csv({"time", "h1_energy", "l2_energy", "max_divergence", "max_velocity"});
  const double e0 = run.series.front().h1_energy;
  double drift = 0.0, div = 0.0;
  for (const auto& r : run.series) {
    csv.cell(r.time).cell(r.h1_energy).cell(r.l2_energy).cell(r.max_divergence).cell(r.max_velocity).end();
    const double dev = std::abs(r.h1_energy - e0);
    drift = std::max(drift, e0 > 0.0 ? dev / e0 : dev);
    if (!std::isfinite(r.h1_energy)) drift = std::numeric_limits<double>::infinity();
    div = std::max(div, r.max_divergence);
  }
  out.write("series.csv", csv.text());
  if (c.emit_fields) write_field_2d(out, "velocity_final.csv", run.final_state.velocity);

  rec.check("energy_drift", drift, "<=", kEnergyDriftFlow);
  rec.check("max_divergence", div, "<=", kDivergenceTol);
  if (steady) rec.check("steady_deviation", steady_dev, "<=", kSteadyTol);
  rec.check("cfl_warnings", run.cfl_warnings, "==", 0, false);
}

void run_geodesic1d(const ExperimentConfig& c, Output& out, Recorder& rec) {
  const Grid g = c.grid();
  const GridField u0 = field_1d(c, g);
  const DiffeoState initial = identity_state(g, u0, c.alpha);
  const bool want_ch = c.alpha > 0.0 && c.checks.ch_window > 0.0;
  const auto run = integrate_geodesic_1d(
      initial, c.dt, c.t_end, {.form = c.spray_form, .cadence = c.cadence, .keep_snapshots = c.emit_fields || want_ch});

  Csv csv({"time", "min_jacobian", "h1_energy", "max_speed"});
  const double e0 = run.samples.front().h1_energy;
  double drift = 0.0, mj = std::numeric_limits<double>::infinity();
  for (const auto& r : run.samples) {
    csv.cell(r.time).cell(r.min_jacobian).cell(r.h1_energy).cell(r.max_speed).end();
    const double dev = std::abs(r.h1_energy - e0);
    drift = std::max(drift, e0 > 0.0 ? dev / e0 : dev);
    mj = std::min(mj, r.min_jacobian);
  }
  out.write("trajectory.csv", csv.text());
  if (c.emit_fields) {
    Csv f({"time", "x", "displacement", "velocity"});
    for (const auto& s : run.snapshots)
      for (int i = 0; i < g.n(); ++i)
        f.cell(s.time).cell(g.node(i)).cell(s.displacement.component(0)[i]).cell(s.velocity.component(0)[i]).end();
    out.write("snapshots.csv", f.text());
  }

  if (c.alpha == 0.0) {
    // characteristics of u_t + 3 u u_x = 0 cross at 1 / max(-3 u0')
    const auto du = to_physical(derivative(to_spectral(u0), 0));
    double steep = 0.0;
    for (double v : du.component(0)) steep = std::max(steep, -3.0 * v);
    if (steep > 0.0 && 1.0 / steep <= c.t_end) {
      const double t_star = 1.0 / steep;
      const double err = run.breakdown_time ? std::abs(*run.breakdown_time - t_star) / t_star
                                            : std::numeric_limits<double>::infinity();
      rec.check("breakdown_time_error", err, "<=", kBreakdownTimeTol, true,
                "characteristic time " + num(t_star) +
                    (run.breakdown_time ? ", detected " + num(*run.breakdown_time) : ", no breakdown detected"));
    } else {
      rec.check("breakdown", run.breakdown_time ? 1.0 : 0.0, "==", 0.0);
    }
    return;
  }
  rec.check("survived_time", run.samples.back().time, ">=", c.t_end - 1e-9 * std::max(1.0, c.t_end), true,
            run.breakdown_time ? "breakdown at t = " + num(*run.breakdown_time) : "");
  rec.check("min_jacobian", mj, ">", 0.0);
  rec.check("energy_drift", drift, "<=", kEnergyDriftGeodesic);
  if (want_ch) {
    std::vector<SpectralField> u;
    for (const auto& s : run.snapshots) {
      if (s.time > c.checks.ch_window + 1e-12) break;
      u.push_back(eulerian_velocity(s));
    }
    const double h = c.cadence * c.dt;
    const auto res = parallel_map(u.size() > 2 ? u.size() - 2 : 0, [&](std::size_t i) {
      return camassa_holm_residual(u[i], u[i + 1], u[i + 2], h, c.alpha);
    });
    Csv ch({"time", "residual"});
    double worst = 0.0;
    for (std::size_t i = 0; i < res.size(); ++i) {
      ch.cell(run.snapshots[i + 1].time).cell(res[i]).end();
      worst = std::max(worst, res[i]);
    }
    out.write("ch_residual.csv", ch.text());
    rec.check("ch_residual", res.empty() ? std::numeric_limits<double>::quiet_NaN() : worst, "<=", kCamassaHolmTol);
  }
}

void run_verify_geodesics(const ExperimentConfig& c, Output& out, Recorder& rec) {
  const Grid g = c.grid();
  const auto& d = c.initial_data;
  const std::array<double, 3> times = {0.0, 0.5 * c.t_end, c.t_end};
  Csv csv({"family", "k", "c", "alpha", "time", "residual"});
  double worst = 0.0;
  for (int k : d.wavenumbers) {
    GeodesicFamily f;
    f.profile = TrigFieldSpec(1, 1).add(0, 1.0, {k, 0}, Phase::Sin);
    std::vector<std::pair<FamilyKind, double>> cases;
    for (double s : d.speeds) cases.emplace_back(FamilyKind::Translating, s);
    cases.emplace_back(FamilyKind::Shearing, 0.0);
    for (auto [kind, speed] : cases) {
      f.kind = kind;
      f.speed = speed;
      for (double t : times) {
        const double r = geodesic_residual_2d(f, g, t, c.alpha);
        worst = std::max(worst, std::isfinite(r) ? r : std::numeric_limits<double>::infinity());
        csv.cell(std::string(kind == FamilyKind::Translating ? "translating" : "shearing"))
            .cell(k).cell(speed).cell(c.alpha).cell(t).cell(r).end();
      }
    }
  }
  // control: exp(t) times the Taylor-Green field is not a geodesic; its residual is |U|_1
  double control_err = 0.0;
  for (double t : times) {
    const auto u = std::exp(t) * taylor_green(g);
    const double r = geodesic_residual(u, u, c.alpha);
    control_err = std::max(control_err, std::abs(r - h1_norm(u, c.alpha)) / h1_norm(u, c.alpha));
    csv.cell(std::string("control")).blank().blank().cell(c.alpha).cell(t).cell(r).end();
  }
  out.write("residuals.csv", csv.text());
  rec.check("max_residual", worst, "<=", kResidualTol);
  rec.check("control_residual_error", control_err, "<=", kResidualTol);
}

struct CurvatureCase {
  std::string x, y;
  std::optional<SignClass> expected;
};

SpectralField single_exponential(const Grid& g, std::array<int, 2> k, double amp, Phase phase) {
  return TrigFieldSpec(2, 2).add(0, -k[1] * amp, k, phase).add(1, k[0] * amp, k, phase).to_field(g);
}

void run_curvature_table(const ExperimentConfig& c, Output& out, Recorder& rec) {
  const auto& d = c.initial_data;
  const CurvatureOptions opts{c.a_variant, c.r1_assembly, c.alpha};
  std::vector<CurvatureCase> cases;
  if (d.generator == "sign_pairs") {
    for (int k : d.wavenumbers) {
      const std::string x = "0: 1*sin(" + std::to_string(k) + ",0)";
      cases.push_back({x, "1: 1*cos(0," + std::to_string(k) + ")", SignClass::Zero});
      cases.push_back({x, "0: 1*cos(" + std::to_string(k) + ",0)", SignClass::Negative});
    }
  } else {
    for (const auto& [x, y] : d.pairs) cases.push_back({x, y, std::nullopt});
  }
  std::vector<int> sizes = {c.n};
  if (c.checks.refine) sizes.push_back(2 * c.n);

  const auto reports = parallel_map(cases.size() * sizes.size(), [&](std::size_t i) {
    const auto& cs = cases[i / sizes.size()];
    const Grid g(2, sizes[i % sizes.size()], c.alias_fraction);
    return sectional(TrigFieldSpec::parse(cs.x, 2, 2), TrigFieldSpec::parse(cs.y, 2, 2), g, opts);
  });

  Csv csv({"x_spec", "y_spec", "n", "numerator", "gram", "sectional", "sign_class", "expected"});
  int mismatches = 0;
  double refinement = 0.0;
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    for (std::size_t si = 0; si < sizes.size(); ++si) {
      const auto& r = reports[ci * sizes.size() + si];
      csv.cell(r.x_spec.to_string()).cell(r.y_spec.to_string()).cell(r.n).cell(r.numerator).cell(r.gram);
      if (r.sectional) csv.cell(*r.sectional);
      else csv.blank();
      csv.cell(std::string(to_string(r.sign)));
      if (cases[ci].expected) csv.cell(std::string(to_string(*cases[ci].expected)));
      else csv.blank();
      csv.end();
      if (cases[ci].expected && r.sign != *cases[ci].expected) ++mismatches;
    }
    if (sizes.size() == 2) {
      const auto& a = reports[ci * 2];
      const auto& b = reports[ci * 2 + 1];
      const Grid g(2, c.n, c.alias_fraction);
      const double nx = h1_norm(a.x_spec.to_field(g), c.alpha), ny = h1_norm(a.y_spec.to_field(g), c.alpha);
      const double scale = std::max(std::abs(a.numerator), kSignTolerance * nx * nx * ny * ny);
      refinement = std::max(refinement, scale > 0.0 ? std::abs(b.numerator - a.numerator) / scale : 0.0);
    }
  }
  out.write("curvature.csv", csv.text());
  if (d.generator == "sign_pairs") rec.check("sign_mismatches", mismatches, "==", 0);
  if (sizes.size() == 2) rec.check("refinement_change", refinement, "<=", kRefinementTol);

  if (c.checks.vanishing_trials > 0) {
    const Grid g(2, c.n, c.alias_fraction);
    const int kmax = std::min(5, g.cutoff());
    struct Trial {
      std::array<int, 2> k;
      std::array<double, 4> amp;
    };
    std::mt19937_64 rng(d.seed);
    std::uniform_int_distribution<int> kd(-kmax, kmax);
    std::uniform_real_distribution<double> ad(-1.0, 1.0);
    std::vector<Trial> trials;
    for (int t = 0; t < c.checks.vanishing_trials; ++t) {
      Trial tr{{0, 0}, {}};
      while (tr.k[0] == 0 && tr.k[1] == 0) tr.k = {kd(rng), kd(rng)};
      for (auto& a : tr.amp) a = ad(rng);
      trials.push_back(tr);
    }
    const auto ratios = parallel_map(trials.size(), [&](std::size_t i) {
      const auto& tr = trials[i];
      const auto x = single_exponential(g, tr.k, tr.amp[0], i % 2 == 0 ? Phase::Cos : Phase::Sin);
      const auto y = single_exponential(g, tr.k, tr.amp[1], Phase::Cos) + single_exponential(g, tr.k, tr.amp[2], Phase::Sin);
      const auto z = single_exponential(g, tr.k, tr.amp[3], i % 3 == 0 ? Phase::Cos : Phase::Sin);
      const double scale = h1_norm(x, c.alpha) * h1_norm(y, c.alpha) * h1_norm(z, c.alpha);
      return h1_norm(r1_operator(x, y, z, opts), c.alpha) / scale;
    });
    Csv v({"trial", "k1", "k2", "relative_norm"});
    double worst = 0.0;
    for (std::size_t i = 0; i < trials.size(); ++i) {
      v.cell(i).cell(trials[i].k[0]).cell(trials[i].k[1]).cell(ratios[i]).end();
      worst = std::max(worst, ratios[i]);
    }
    out.write("vanishing.csv", v.text());
    rec.check("r1_vanishing", worst, "<=", kVanishingTol);
  }
}

void write_norms(Csv& csv, std::size_t dir, const JacobiTrajectory& traj, int cadence) {
  const auto d2 = second_differences(traj);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (i % static_cast<std::size_t>(cadence) != 0 && i + 1 != traj.times.size()) continue;
    csv.cell(dir).cell(traj.times[i]).cell(traj.h1_norm[i]).cell(traj.l2_norm[i]);
    if (i > 0 && i + 1 < traj.times.size()) csv.cell(d2[i - 1]);
    else csv.blank();
    csv.end();
  }
}

GeodesicRun base_run_1d(const ExperimentConfig& c, const DiffeoState& initial, Recorder& rec) {
  auto run = integrate_geodesic_1d(initial, c.dt, c.t_end, {.form = c.spray_form, .cadence = 1});
  rec.check("base_geodesic_breakdown", run.breakdown_time ? 1.0 : 0.0, "==", 0.0, true,
            run.breakdown_time ? "breakdown at t = " + num(*run.breakdown_time) : "");
  return run;
}

void run_jacobi_stability(const ExperimentConfig& c, Output& out, Recorder& rec) {
  const Grid g = c.grid();
  const auto& d = c.initial_data;
  const JacobiOptions opts{.form = c.spray_form, .keep_fields = false, .convexity_tolerance = kConvexityTol};
  std::vector<JacobiTrajectory> trajs;
  if (c.dim == 2) {
    const auto fam = family_of(c);
    const SpectralField zero(g, 2);
    trajs = parallel_map(d.directions.size(), [&](std::size_t i) {
      const auto dir = TrigFieldSpec::parse(d.directions[i], 2, 2).to_field(g);
      return integrate_jacobi_family(fam, g, c.alpha, zero, dir, c.dt, c.t_end, c.cadence, opts);
    });
    const auto u0 = fam.eulerian_velocity(g, 0.0);
    if (u0.max_abs_coefficient() > 0.0) {
      const auto tangent = integrate_jacobi_family(fam, g, c.alpha, u0, zero, c.dt, c.t_end, c.cadence, opts);
      double var = 0.0;
      for (double n : tangent.h1_norm) var = std::max(var, std::abs(n - tangent.h1_norm.front()) / tangent.h1_norm.front());
      rec.check("tangent_norm_variation", var, "<=", kTangentNorm2d);
    }
  } else {
    const DiffeoState initial = identity_state(g, field_1d(c, g), c.alpha);
    const auto base = base_run_1d(c, initial, rec);
    if (base.breakdown_time) return;
    std::vector<GridField> dirs;
    for (const auto& s : d.directions) dirs.push_back(to_physical(TrigFieldSpec::parse(s, 1, 1).to_field(g)));
    const GridField zero(g, 1);
    trajs = parallel_map(dirs.size(), [&](std::size_t i) { return integrate_jacobi(base, zero, dirs[i], std::nullopt, opts); });

    JacobiOptions keep = opts;
    keep.keep_fields = true;
    const auto tangent = integrate_jacobi(base, initial.velocity, spray_1d(initial, c.spray_form), std::nullopt, keep);
    const double scale = std::max(initial.velocity.max_abs(), 1e-300);
    double err = 0.0;
    for (std::size_t i = 0; i < tangent.y.size() && i < base.snapshots.size(); ++i)
      err = std::max(err, (tangent.y[i] - base.snapshots[i].velocity).max_abs() / scale);
    if (initial.velocity.max_abs() > 0.0) rec.check("tangent_field_error", err, "<=", kTangentField1d);

    const auto study = deviation_study(initial, dirs.front(), c.dt, c.t_end, c.checks.deviation_eps, opts);
    Csv dev({"eps", "error"});
    for (std::size_t i = 0; i < study.eps.size(); ++i) dev.cell(study.eps[i]).cell(study.error[i]).end();
    out.write("deviation.csv", dev.text());
    rec.check("deviation_order", study.order, ">=", kDeviationOrder);
  }

  Csv norms({"direction", "time", "h1_norm", "l2_norm", "second_difference"});
  Csv summary({"direction", "spec", "min_second_difference", "max_second_difference", "max_norm", "final_norm",
               "convex", "growth_coefficient", "lower_bound_slope"});
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    write_norms(norms, i, trajs[i], c.cadence);
    const auto rep = stability_report(trajs[i], kConvexityTol);
    summary.cell(i).cell(d.directions[i]).cell(rep.min_second_difference).cell(rep.max_second_difference)
        .cell(rep.max_norm).cell(rep.final_norm).cell(rep.convex ? 1 : 0).cell(rep.growth_coefficient)
        .cell(rep.lower_bound_slope).end();
    // the growth certificate applies to the 2D pressure-constant families
    const bool hard = c.dim == 2;
    const std::string p = "direction_" + std::to_string(i) + ".";
    rec.check(p + "convexity", rep.max_norm > 0.0 ? rep.min_second_difference / rep.max_norm : 0.0, ">=",
              -kConvexityTol, hard);
    rec.check(p + "growth_coefficient", rep.growth_coefficient, ">", 0.0, hard);
  }
  out.write("jacobi_norms.csv", norms.text());
  out.write("stability.csv", summary.text());
}

void run_conjugate_scan(const ExperimentConfig& c, Output& out, Recorder& rec) {
  const Grid g = c.grid();
  const auto& d = c.initial_data;
  const JacobiOptions opts{.form = c.spray_form, .keep_fields = false};
  std::vector<GramSeries> series;
  if (c.dim == 2) {
    const FlowState base{family_of(c).eulerian_velocity(g, 0.0), c.alpha, 0.0};
    const SpectralField zero(g, 2);
    series = parallel_map(d.directions.size(), [&](std::size_t i) {
      const auto dir = TrigFieldSpec::parse(d.directions[i], 2, 2).to_field(g);
      if (c.t_end <= 0.0) return GramSeries{};
      return integrate_jacobi_2d(base, zero, dir, c.dt, c.t_end, 1, opts).gram;
    });
  } else {
    const auto base = base_run_1d(c, identity_state(g, field_1d(c, g), c.alpha), rec);
    if (base.breakdown_time) return;
    const GridField zero(g, 1);
    series = parallel_map(d.directions.size(), [&](std::size_t i) {
      const auto dir = to_physical(TrigFieldSpec::parse(d.directions[i], 1, 1).to_field(g));
      if (base.snapshots.size() < 2) return GramSeries{};
      return integrate_jacobi(base, zero, dir, std::nullopt, opts).gram;
    });
  }
  const auto scan = scan_conjugate(series);

  Csv norms({"direction", "time", "h1_norm"});
  for (std::size_t i = 0; i < series.size(); ++i)
    for (std::size_t j = 0; j < series[i].times.size(); ++j)
      if (j % static_cast<std::size_t>(c.cadence) == 0 || j + 1 == series[i].times.size())
        norms.cell(i).cell(series[i].times[j]).cell(std::sqrt(std::max(series[i].norm2[j], 0.0))).end();
  out.write("jacobi_norms.csv", norms.text());

  Csv csv({"direction", "spec", "min_ratio", "candidates", "first_candidate_time"});
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::size_t count = 0;
    std::optional<double> first;
    for (const auto& cand : scan.candidates)
      if (cand.direction == i) {
        if (!first) first = cand.time;
        ++count;
      }
    csv.cell(i).cell(d.directions[i]).cell(scan.min_ratio[i]).cell(count);
    if (first) csv.cell(*first);
    else csv.blank();
    csv.end();
  }
  out.write("scan.csv", csv.text());
  rec.check("conjugate_points", static_cast<double>(scan.candidates.size()), "==", 0.0);

  const auto control = scan_conjugate({sphere_jacobi_series(0.01, 5.0)});
  const double err = control.candidates.empty() ? std::numeric_limits<double>::infinity()
                                                : std::abs(control.candidates.front().time - std::numbers::pi) / std::numbers::pi;
  rec.check("sphere_control_error", err, "<=", kSphereTimeTol);
}

json config_json(const ExperimentConfig& c) {
  const auto& d = c.initial_data;
  json pairs = json::array();
  for (const auto& [x, y] : d.pairs) pairs.push_back({{"x", x}, {"y", y}});
  return {
      {"preset", to_string(c.preset)},
      {"grid", {{"dim", c.dim}, {"n", c.n}, {"alias_fraction", c.alias_fraction}}},
      {"alpha", c.alpha},
      {"dt", c.dt},
      {"t_end", c.t_end},
      {"cadence", c.cadence},
      {"initial_data",
       {{"generator", d.generator},
        {"seed", d.seed},
        {"max_mode", d.max_mode},
        {"amplitude", d.amplitude},
        {"spec", d.spec},
        {"speed", d.speed},
        {"directions", d.directions},
        {"wavenumbers", d.wavenumbers},
        {"speeds", d.speeds},
        {"pairs", pairs}}},
      {"a_variant", to_string(c.a_variant)},
      {"r1_assembly", to_string(c.r1_assembly)},
      {"spray_form", c.spray_form == SprayForm::Conservative ? "conservative" : "published"},
      {"output_dir", c.output_dir},
      {"emit_fields", c.emit_fields},
      {"checks",
       {{"ch_window", c.checks.ch_window},
        {"deviation_eps", c.checks.deviation_eps},
        {"vanishing_trials", c.checks.vanishing_trials},
        {"refine", c.checks.refine}}},
  };
}

}  // namespace

std::span<const std::string_view> preset_names() { return kPresetNames; }

std::string_view to_string(Preset p) { return kPresetNames.at(static_cast<std::size_t>(p)); }

std::string ConfigError::to_string() const { return (path.empty() ? std::string("<root>") : path) + ": " + message; }

ParsedConfig validate(std::string_view text) {
  ParsedConfig result;
  Reader r(result.errors);
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    r.error("", std::string("malformed JSON: ") + e.what());
    return result;
  }
  if (!root.is_object()) {
    r.error("", std::string("expected an object, got ") + root.type_name());
    return result;
  }
  r.only_keys(root, "",
              {"preset", "grid", "alpha", "dt", "t_end", "cadence", "initial_data", "a_variant", "r1_assembly",
               "spray_form", "output_dir", "emit_fields", "checks"});

  ExperimentConfig c;
  std::string preset;
  if (!root.contains("preset")) {
    r.error("preset", "missing");
    return result;
  }
  if (!r.string(root, "preset", "", preset)) return result;
  if (auto p = preset_from(preset)) {
    c.preset = *p;
  } else {
    std::string list;
    for (auto n : kPresetNames) list += (list.empty() ? "" : ", ") + std::string(n);
    r.error("preset", "unknown preset '" + preset + "' (valid presets: " + list + ")");
    return result;
  }
  apply_preset_defaults(c);

  if (const json* g = r.object(root, "grid", "")) {
    r.only_keys(*g, "grid", {"dim", "n", "alias_fraction"});
    r.integer(*g, "dim", "grid", c.dim);
    r.integer(*g, "n", "grid", c.n);
    r.real(*g, "alias_fraction", "grid", c.alias_fraction);
  }
  r.real(root, "alpha", "", c.alpha);
  r.real(root, "dt", "", c.dt);
  r.real(root, "t_end", "", c.t_end);
  r.integer(root, "cadence", "", c.cadence);
  if (const json* d = r.object(root, "initial_data", "")) read_initial_data(r, *d, c);
  std::string s;
  if (r.string(root, "a_variant", "", s)) {
    try {
      c.a_variant = parse_variant(s);
    } catch (const Error&) {
      r.error("a_variant", "unknown variant '" + s + "' (valid: two_term, six_term, kernel)");
    }
  }
  if (r.string(root, "r1_assembly", "", s)) {
    try {
      c.r1_assembly = parse_assembly(s);
    } catch (const Error&) {
      r.error("r1_assembly", "unknown assembly '" + s + "' (valid: literal, single)");
    }
  }
  if (r.string(root, "spray_form", "", s)) {
    if (s == "conservative") c.spray_form = SprayForm::Conservative;
    else if (s == "published") c.spray_form = SprayForm::Published;
    else r.error("spray_form", "unknown form '" + s + "' (valid: conservative, published)");
  }
  if (r.string(root, "output_dir", "", c.output_dir)) r.range(!c.output_dir.empty(), "output_dir", "must not be empty");
  r.boolean(root, "emit_fields", "", c.emit_fields);
  if (const json* ch = r.object(root, "checks", "")) read_checks(r, *ch, c);

  if (!result.errors.empty()) return result;
  fill_generator_defaults(c);
  check_ranges(r, c);
  if (result.errors.empty()) result.config = std::move(c);
  return result;
}

std::string to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

bool RunSummary::passed() const {
  return std::all_of(invariants.begin(), invariants.end(), [](const auto& i) { return i.passed || !i.hard; });
}

std::string RunSummary::to_json() const {
  json inv = json::array();
  for (const auto& i : invariants) {
    json e = {{"name", i.name},         {"value", i.value}, {"threshold", i.threshold}, {"comparison", i.comparison},
              {"passed", i.passed},     {"hard", i.hard}};
    if (!i.note.empty()) e["note"] = i.note;
    inv.push_back(e);
  }
  json manifest = json::array();
  for (const auto& f : files) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(f.fnv1a));
    manifest.push_back({{"name", f.name}, {"bytes", f.bytes}, {"fnv1a64", hex}});
  }
  json j = {{"config", config_json(config)},
            {"seed", config.initial_data.seed},
            {"wall_time_seconds", wall_time},
            {"passed", passed()},
            {"invariants", inv},
            {"files", manifest}};
  return j.dump(2);
}

RunSummary run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunSummary summary;
  summary.config = config;
  Output out(config.output_dir);
  Recorder rec;
  try {
    switch (config.preset) {
      case Preset::Euler2d: run_euler2d(config, out, rec); break;
      case Preset::Geodesic1d: run_geodesic1d(config, out, rec); break;
      case Preset::VerifyGeodesics: run_verify_geodesics(config, out, rec); break;
      case Preset::CurvatureTable: run_curvature_table(config, out, rec); break;
      case Preset::JacobiStability: run_jacobi_stability(config, out, rec); break;
      case Preset::ConjugateScan: run_conjugate_scan(config, out, rec); break;
    }
  } catch (const IoFailure&) {
    throw;
  } catch (const std::exception& e) {
    rec.check("completed", 0.0, "==", 1.0, true, e.what());
  }
  summary.invariants = std::move(rec.list);
  summary.files = out.files;
  summary.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.write("summary.json", summary.to_json() + "\n", false);
  return summary;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace h1diff
