#include "h1diff/h1diff.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "h1diff/curvature.hpp"
#include "h1diff/errors.hpp"
#include "h1diff/euler_alpha.hpp"
#include "h1diff/geodesics.hpp"
#include "h1diff/harness.hpp"
#include "h1diff/trig_spec.hpp"

struct h1diff_config {
  h1diff::ExperimentConfig value;
  std::string preset;
};

struct h1diff_summary {
  h1diff::RunSummary value;
};

struct h1diff_field {
  h1diff::SpectralField value;
};

namespace {

thread_local std::string last_error;

h1diff_status fail(h1diff_status s, std::string message) {
  last_error = std::move(message);
  return s;
}

class ConfigRejected : public std::exception {
 public:
  explicit ConfigRejected(std::string m) : message_(std::move(m)) {}
  const char* what() const noexcept override { return message_.c_str(); }

 private:
  std::string message_;
};

class IoProblem : public std::exception {
 public:
  explicit IoProblem(std::string m) : message_(std::move(m)) {}
  const char* what() const noexcept override { return message_.c_str(); }

 private:
  std::string message_;
};

// Runs fn, mapping exceptions onto status codes.
template <typename Fn>
h1diff_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const ConfigRejected& e) {
    return fail(H1DIFF_ERR_INVALID_CONFIG, e.what());
  } catch (const IoProblem& e) {
    return fail(H1DIFF_ERR_IO, e.what());
  } catch (const h1diff::BreakdownError& e) {
    return fail(H1DIFF_ERR_BREAKDOWN, e.what());
  } catch (const h1diff::InvalidInput& e) {
    return fail(H1DIFF_ERR_INVALID_ARGUMENT, e.what());
  } catch (const h1diff::NonFiniteError& e) {
    return fail(H1DIFF_ERR_NUMERICAL, e.what());
  } catch (const h1diff::ConsistencyError& e) {
    return fail(H1DIFF_ERR_NUMERICAL, e.what());
  } catch (const h1diff::Error& e) {
    return fail(H1DIFF_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(H1DIFF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(H1DIFF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(H1DIFF_ERR_INTERNAL, "unknown error");
  }
}

#define H1DIFF_REQUIRE(cond, what) \
  if (!(cond)) return fail(H1DIFF_ERR_INVALID_ARGUMENT, what)

h1diff_status copy_out(const std::string& text, char* buffer, size_t capacity, size_t* required) {
  if (required) *required = text.size() + 1;
  if (!buffer || capacity < text.size() + 1) {
    if (buffer && capacity > 0) buffer[0] = '\0';
    return fail(H1DIFF_ERR_BUFFER_TOO_SMALL, "buffer needs " + std::to_string(text.size() + 1) + " bytes");
  }
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  return H1DIFF_OK;
}

h1diff::Grid make_grid(int dim, int n) {
  if (dim != 1 && dim != 2) throw h1diff::InvalidInput("dim must be 1 or 2");
  return h1diff::Grid(dim, n);
}

h1diff_status parse_into(const std::string& text, h1diff_config** out) {
  auto parsed = h1diff::validate(text);
  if (!parsed.config) {
    std::string msg;
    for (const auto& e : parsed.errors) msg += (msg.empty() ? "" : "\n") + e.to_string();
    throw ConfigRejected(msg);
  }
  auto* c = new h1diff_config{std::move(*parsed.config), {}};
  c->preset = std::string(h1diff::to_string(c->value.preset));
  *out = c;
  return H1DIFF_OK;
}

}  // namespace

extern "C" {

const char* h1diff_version(void) { return "1.0.0"; }

const char* h1diff_status_string(h1diff_status status) {
  switch (status) {
    case H1DIFF_OK: return "ok";
    case H1DIFF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case H1DIFF_ERR_INVALID_CONFIG: return "invalid config";
    case H1DIFF_ERR_BREAKDOWN: return "diffeomorphism breakdown";
    case H1DIFF_ERR_NUMERICAL: return "numerical failure";
    case H1DIFF_ERR_IO: return "i/o error";
    case H1DIFF_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case H1DIFF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* h1diff_last_error(void) { return last_error.c_str(); }

size_t h1diff_preset_count(void) { return h1diff::preset_names().size(); }

const char* h1diff_preset_name(size_t index) {
  const auto names = h1diff::preset_names();
  return index < names.size() ? names[index].data() : nullptr;
}

h1diff_status h1diff_config_parse(const char* json_text, h1diff_config** out) {
  return guarded([&] {
    H1DIFF_REQUIRE(json_text && out, "null argument");
    *out = nullptr;
    return parse_into(json_text, out);
  });
}

h1diff_status h1diff_config_load(const char* path, h1diff_config** out) {
  return guarded([&] {
    H1DIFF_REQUIRE(path && out, "null argument");
    *out = nullptr;
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoProblem(std::string("cannot open config file '") + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_into(ss.str(), out);
  });
}

h1diff_status h1diff_config_set_output_dir(h1diff_config* config, const char* dir) {
  return guarded([&] {
    H1DIFF_REQUIRE(config && dir, "null argument");
    H1DIFF_REQUIRE(*dir != '\0', "output directory must not be empty");
    config->value.output_dir = dir;
    return H1DIFF_OK;
  });
}

const char* h1diff_config_output_dir(const h1diff_config* config) {
  return config ? config->value.output_dir.c_str() : nullptr;
}

const char* h1diff_config_preset(const h1diff_config* config) { return config ? config->preset.c_str() : nullptr; }

h1diff_status h1diff_config_to_json(const h1diff_config* config, char* buffer, size_t capacity, size_t* required) {
  return guarded([&] {
    H1DIFF_REQUIRE(config, "null config");
    return copy_out(h1diff::to_json(config->value), buffer, capacity, required);
  });
}

void h1diff_config_free(h1diff_config* config) { delete config; }

h1diff_status h1diff_run(const h1diff_config* config, h1diff_summary** out) {
  return guarded([&] {
    H1DIFF_REQUIRE(config && out, "null argument");
    *out = nullptr;
    *out = new h1diff_summary{h1diff::run(config->value)};
    return H1DIFF_OK;
  });
}

int h1diff_summary_passed(const h1diff_summary* summary) { return summary && summary->value.passed() ? 1 : 0; }

double h1diff_summary_wall_time(const h1diff_summary* summary) { return summary ? summary->value.wall_time : 0.0; }

size_t h1diff_summary_invariant_count(const h1diff_summary* summary) {
  return summary ? summary->value.invariants.size() : 0;
}

h1diff_status h1diff_summary_invariant(const h1diff_summary* summary, size_t index, h1diff_invariant* out) {
  return guarded([&] {
    H1DIFF_REQUIRE(summary && out, "null argument");
    H1DIFF_REQUIRE(index < summary->value.invariants.size(), "invariant index out of range");
    const auto& i = summary->value.invariants[index];
    *out = {i.name.c_str(), i.value, i.threshold, i.comparison.c_str(), i.passed ? 1 : 0, i.hard ? 1 : 0,
            i.note.c_str()};
    return H1DIFF_OK;
  });
}

size_t h1diff_summary_file_count(const h1diff_summary* summary) { return summary ? summary->value.files.size() : 0; }

h1diff_status h1diff_summary_file(const h1diff_summary* summary, size_t index, const char** name, uint64_t* bytes,
                                  uint64_t* fnv1a64) {
  return guarded([&] {
    H1DIFF_REQUIRE(summary, "null summary");
    H1DIFF_REQUIRE(index < summary->value.files.size(), "file index out of range");
    const auto& f = summary->value.files[index];
    if (name) *name = f.name.c_str();
    if (bytes) *bytes = f.bytes;
    if (fnv1a64) *fnv1a64 = f.fnv1a;
    return H1DIFF_OK;
  });
}

h1diff_status h1diff_summary_to_json(const h1diff_summary* summary, char* buffer, size_t capacity, size_t* required) {
  return guarded([&] {
    H1DIFF_REQUIRE(summary, "null summary");
    return copy_out(summary->value.to_json(), buffer, capacity, required);
  });
}

void h1diff_summary_free(h1diff_summary* summary) { delete summary; }

h1diff_status h1diff_field_from_spec(int dim, int n, const char* spec, h1diff_field** out) {
  return guarded([&] {
    H1DIFF_REQUIRE(spec && out, "null argument");
    *out = nullptr;
    const auto grid = make_grid(dim, n);
    *out = new h1diff_field{h1diff::TrigFieldSpec::parse(spec, dim, dim).to_field(grid)};
    return H1DIFF_OK;
  });
}

h1diff_status h1diff_field_random_divergence_free(int n, uint64_t seed, int max_mode, double amplitude,
                                                  h1diff_field** out) {
  return guarded([&] {
    H1DIFF_REQUIRE(out, "null argument");
    *out = nullptr;
    *out = new h1diff_field{h1diff::random_divergence_free(make_grid(2, n), seed, max_mode, amplitude)};
    return H1DIFF_OK;
  });
}

h1diff_status h1diff_field_random(int dim, int n, int components, uint64_t seed, int max_mode, double amplitude,
                                  h1diff_field** out) {
  return guarded([&] {
    H1DIFF_REQUIRE(out, "null argument");
    H1DIFF_REQUIRE(components >= 1 && components <= 8, "components must lie in [1, 8]");
    *out = nullptr;
    *out = new h1diff_field{h1diff::random_band_limited(make_grid(dim, n), components, seed, max_mode, amplitude)};
    return H1DIFF_OK;
  });
}

int h1diff_field_dim(const h1diff_field* field) { return field ? field->value.grid().dim() : 0; }

int h1diff_field_n(const h1diff_field* field) { return field ? field->value.grid().n() : 0; }

int h1diff_field_components(const h1diff_field* field) { return field ? field->value.components() : 0; }

h1diff_status h1diff_field_samples(const h1diff_field* field, int component, double* out, size_t count) {
  return guarded([&] {
    H1DIFF_REQUIRE(field && out, "null argument");
    H1DIFF_REQUIRE(component >= 0 && component < field->value.components(), "component out of range");
    H1DIFF_REQUIRE(count >= field->value.grid().size(), "sample buffer smaller than the grid");
    const auto phys = h1diff::to_physical(field->value);
    const auto data = phys.component(component);
    std::copy(data.begin(), data.end(), out);
    return H1DIFF_OK;
  });
}

h1diff_status h1diff_field_leray_project(const h1diff_field* field, h1diff_field** out) {
  return guarded([&] {
    H1DIFF_REQUIRE(field && out, "null argument");
    *out = nullptr;
    *out = new h1diff_field{h1diff::leray_project(field->value)};
    return H1DIFF_OK;
  });
}

h1diff_status h1diff_field_gradient_part(const h1diff_field* field, h1diff_field** out) {
  return guarded([&] {
    H1DIFF_REQUIRE(field && out, "null argument");
    *out = nullptr;
    *out = new h1diff_field{h1diff::gradient_part(field->value)};
    return H1DIFF_OK;
  });
}

h1diff_status h1diff_field_h1_inner(const h1diff_field* x, const h1diff_field* y, double alpha, double* out) {
  return guarded([&] {
    H1DIFF_REQUIRE(x && y && out, "null argument");
    *out = h1diff::h1_inner(x->value, y->value, alpha);
    return H1DIFF_OK;
  });
}

h1diff_status h1diff_field_max_divergence(const h1diff_field* field, double* out) {
  return guarded([&] {
    H1DIFF_REQUIRE(field && out, "null argument");
    *out = field->value.max_divergence();
    return H1DIFF_OK;
  });
}

void h1diff_field_free(h1diff_field* field) { delete field; }

h1diff_status h1diff_flow_integrate(const h1diff_field* u0, double alpha, double dt, double t_end, h1diff_field** out,
                                    double* max_energy_drift) {
  return guarded([&] {
    H1DIFF_REQUIRE(u0 && out, "null argument");
    H1DIFF_REQUIRE(dt > 0.0 && t_end >= 0.0 && alpha >= 0.0, "need dt > 0, t_end >= 0, alpha >= 0");
    *out = nullptr;
    const auto run = h1diff::integrate_flow(h1diff::FlowState{u0->value, alpha, 0.0}, dt, t_end, 1);
    if (max_energy_drift) {
      const double e0 = run.series.front().h1_energy;
      double drift = 0.0;
      for (const auto& r : run.series) drift = std::max(drift, e0 > 0.0 ? std::abs(r.h1_energy - e0) / e0 : r.h1_energy);
      *max_energy_drift = drift;
    }
    *out = new h1diff_field{run.final_state.velocity};
    return H1DIFF_OK;
  });
}

h1diff_status h1diff_sectional(int n, const char* x_spec, const char* y_spec, const char* variant, double alpha,
                               int subgroup, h1diff_curvature* out) {
  return guarded([&] {
    H1DIFF_REQUIRE(x_spec && y_spec && out, "null argument");
    const auto grid = make_grid(2, n);
    const h1diff::CurvatureOptions opts{variant ? h1diff::parse_variant(variant) : h1diff::AVariant::TwoTerm,
                                        h1diff::R1Assembly::Literal, alpha};
    const auto x = h1diff::TrigFieldSpec::parse(x_spec, 2, 2), y = h1diff::TrigFieldSpec::parse(y_spec, 2, 2);
    const auto r = subgroup ? h1diff::sectional_dmu(x, y, grid, opts) : h1diff::sectional(x, y, grid, opts);
    out->numerator = r.numerator;
    out->gram = r.gram;
    out->sectional_defined = r.sectional.has_value() ? 1 : 0;
    out->sectional = r.sectional.value_or(0.0);
    out->sign = r.sign == h1diff::SignClass::Negative ? -1 : (r.sign == h1diff::SignClass::Positive ? 1 : 0);
    return H1DIFF_OK;
  });
}

h1diff_status h1diff_shear_geodesic_residual(int n, const char* profile, double t, double alpha, double* out) {
  return guarded([&] {
    H1DIFF_REQUIRE(profile && out, "null argument");
    h1diff::GeodesicFamily f;
    f.kind = h1diff::FamilyKind::Shearing;
    f.profile = h1diff::TrigFieldSpec::parse(profile, 1, 1);
    *out = h1diff::geodesic_residual_2d(f, make_grid(2, n), t, alpha);
    return H1DIFF_OK;
  });
}

h1diff_status h1diff_geodesic_1d(int n, const char* velocity_spec, double alpha, double dt, double t_end,
                                 double* energy_drift, double* breakdown_time) {
  return guarded([&] {
    H1DIFF_REQUIRE(velocity_spec, "null argument");
    H1DIFF_REQUIRE(dt > 0.0 && t_end >= 0.0 && alpha >= 0.0, "need dt > 0, t_end >= 0, alpha >= 0");
    const auto grid = make_grid(1, n);
    const auto u0 = h1diff::to_physical(h1diff::TrigFieldSpec::parse(velocity_spec, 1, 1).to_field(grid));
    const auto run = h1diff::integrate_geodesic_1d(h1diff::identity_state(grid, u0, alpha), dt, t_end,
                                                   {.keep_snapshots = false});
    if (energy_drift) {
      const double e0 = run.samples.front().h1_energy;
      double drift = 0.0;
      for (const auto& r : run.samples) drift = std::max(drift, e0 > 0.0 ? std::abs(r.h1_energy - e0) / e0 : r.h1_energy);
      *energy_drift = drift;
    }
    if (breakdown_time) *breakdown_time = run.breakdown_time.value_or(-1.0);
    return H1DIFF_OK;
  });
}

}  // extern "C"
