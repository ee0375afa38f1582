#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "h1diff/h1diff.h"

namespace {

constexpr double pi = std::numbers::pi;

std::string scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("h1diff_capi_" + std::to_string(::getpid())) / name;
  std::filesystem::remove_all(p);
  return p.string();
}

struct Field {
  h1diff_field* p = nullptr;
  ~Field() { h1diff_field_free(p); }
};

}  // namespace

TEST_CASE("version, status strings and presets") {
  CHECK(std::string(h1diff_version()).size() > 0);
  CHECK(std::string(h1diff_status_string(H1DIFF_ERR_INVALID_CONFIG)) == "invalid config");
  REQUIRE(h1diff_preset_count() == 6);
  CHECK(std::string(h1diff_preset_name(0)) == "euler2d");
  CHECK(std::string(h1diff_preset_name(5)) == "conjugate-scan");
  CHECK(h1diff_preset_name(6) == nullptr);
}

TEST_CASE("config parse, defaults and JSON export") {
  h1diff_config* c = nullptr;
  REQUIRE(h1diff_config_parse(R"({"preset": "verify-geodesics", "grid": {"n": 32}})", &c) == H1DIFF_OK);
  CHECK(std::string(h1diff_last_error()).empty());
  CHECK(std::string(h1diff_config_preset(c)) == "verify-geodesics");
  size_t need = 0;
  char tiny[4];
  CHECK(h1diff_config_to_json(c, tiny, sizeof tiny, &need) == H1DIFF_ERR_BUFFER_TOO_SMALL);
  CHECK(tiny[0] == '\0');
  std::string buf(need, '\0');
  REQUIRE(h1diff_config_to_json(c, buf.data(), buf.size(), nullptr) == H1DIFF_OK);
  CHECK(buf.find("\"n\": 32") != std::string::npos);
  CHECK(buf.find("\"wavenumbers\"") != std::string::npos);
  CHECK(h1diff_config_set_output_dir(c, "") == H1DIFF_ERR_INVALID_ARGUMENT);
  CHECK(h1diff_config_set_output_dir(c, "somewhere") == H1DIFF_OK);
  CHECK(std::string(h1diff_config_output_dir(c)) == "somewhere");
  h1diff_config_free(c);
}

TEST_CASE("config errors are reported per key") {
  h1diff_config* c = reinterpret_cast<h1diff_config*>(0x1);
  CHECK(h1diff_config_parse(R"({"preset": "euler2d", "dt": -1, "grid": {"n": 9}})", &c) == H1DIFF_ERR_INVALID_CONFIG);
  CHECK(c == nullptr);
  const std::string msg = h1diff_last_error();
  CHECK(msg.find("dt: ") != std::string::npos);
  CHECK(msg.find("grid.n: ") != std::string::npos);
  CHECK(msg.find('\n') != std::string::npos);
  CHECK(h1diff_config_load("/nonexistent/config.json", &c) == H1DIFF_ERR_IO);
  CHECK(h1diff_config_parse(nullptr, &c) == H1DIFF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("run through the C interface") {
  h1diff_config* c = nullptr;
  REQUIRE(h1diff_config_parse(R"({"preset": "verify-geodesics", "grid": {"n": 32}})", &c) == H1DIFF_OK);
  const auto dir = scratch("verify");
  REQUIRE(h1diff_config_set_output_dir(c, dir.c_str()) == H1DIFF_OK);
  h1diff_summary* s = nullptr;
  REQUIRE(h1diff_run(c, &s) == H1DIFF_OK);
  CHECK(h1diff_summary_passed(s) == 1);
  CHECK(h1diff_summary_wall_time(s) >= 0.0);
  REQUIRE(h1diff_summary_invariant_count(s) == 2);
  h1diff_invariant inv{};
  REQUIRE(h1diff_summary_invariant(s, 0, &inv) == H1DIFF_OK);
  CHECK(std::string(inv.name) == "max_residual");
  CHECK(inv.value <= 1e-10);
  CHECK(inv.passed == 1);
  CHECK(h1diff_summary_invariant(s, 2, &inv) == H1DIFF_ERR_INVALID_ARGUMENT);
  REQUIRE(h1diff_summary_file_count(s) == 1);
  const char* name = nullptr;
  uint64_t bytes = 0, hash = 0;
  REQUIRE(h1diff_summary_file(s, 0, &name, &bytes, &hash) == H1DIFF_OK);
  CHECK(std::string(name) == "residuals.csv");
  CHECK(bytes == std::filesystem::file_size(std::filesystem::path(dir) / name));
  CHECK(hash != 0);
  size_t need = 0;
  h1diff_summary_to_json(s, nullptr, 0, &need);
  std::string js(need, '\0');
  CHECK(h1diff_summary_to_json(s, js.data(), js.size(), nullptr) == H1DIFF_OK);
  CHECK(js.find("\"passed\": true") != std::string::npos);
  h1diff_summary_free(s);
  h1diff_config_free(c);
}

TEST_CASE("field handles: samples, projections and inner products") {
  Field f;
  REQUIRE(h1diff_field_from_spec(2, 16, "0: 1*sin(1,0); 1: 2*cos(0,1)", &f.p) == H1DIFF_OK);
  CHECK(h1diff_field_dim(f.p) == 2);
  CHECK(h1diff_field_n(f.p) == 16);
  CHECK(h1diff_field_components(f.p) == 2);
  std::vector<double> u(256);
  REQUIRE(h1diff_field_samples(f.p, 0, u.data(), u.size()) == H1DIFF_OK);
  for (int i = 0; i < 16; ++i) CHECK(u[i * 16 + 3] == doctest::Approx(std::sin(2 * pi * i / 16)).epsilon(1e-13));
  CHECK(h1diff_field_samples(f.p, 0, u.data(), 10) == H1DIFF_ERR_INVALID_ARGUMENT);
  CHECK(h1diff_field_samples(f.p, 2, u.data(), u.size()) == H1DIFF_ERR_INVALID_ARGUMENT);

  Field r, p, q, pp;
  REQUIRE(h1diff_field_random(2, 32, 2, 5, 6, 1.0, &r.p) == H1DIFF_OK);
  REQUIRE(h1diff_field_leray_project(r.p, &p.p) == H1DIFF_OK);
  REQUIRE(h1diff_field_gradient_part(r.p, &q.p) == H1DIFF_OK);
  REQUIRE(h1diff_field_leray_project(p.p, &pp.p) == H1DIFF_OK);
  double div = 1.0, pq = 1.0, nn = 0.0, ppp = 0.0;
  REQUIRE(h1diff_field_max_divergence(p.p, &div) == H1DIFF_OK);
  CHECK(div < 1e-12);
  REQUIRE(h1diff_field_h1_inner(p.p, q.p, 0.7, &pq) == H1DIFF_OK);
  REQUIRE(h1diff_field_h1_inner(r.p, r.p, 0.7, &nn) == H1DIFF_OK);
  CHECK(std::abs(pq) <= 1e-12 * nn);
  REQUIRE(h1diff_field_h1_inner(pp.p, pp.p, 0.7, &ppp) == H1DIFF_OK);
  double pnorm = 0.0;
  h1diff_field_h1_inner(p.p, p.p, 0.7, &pnorm);
  CHECK(ppp == doctest::Approx(pnorm).epsilon(1e-13));

  Field bad;
  CHECK(h1diff_field_from_spec(2, 16, "0: 1*sun(1,0)", &bad.p) == H1DIFF_ERR_INVALID_ARGUMENT);
  CHECK(bad.p == nullptr);
  CHECK(std::string(h1diff_last_error()).size() > 0);
  CHECK(h1diff_field_from_spec(3, 16, "0: 1*sin(1,0)", &bad.p) == H1DIFF_ERR_INVALID_ARGUMENT);
  CHECK(h1diff_field_from_spec(2, 7, "0: 1*sin(1,0)", &bad.p) == H1DIFF_ERR_INVALID_ARGUMENT);
  CHECK(h1diff_field_from_spec(2, 16, "0: 1*sin(9,0)", &bad.p) == H1DIFF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("solvers through the C interface") {
  Field shear, out;
  REQUIRE(h1diff_field_from_spec(2, 32, "0: 1*sin(0,1)", &shear.p) == H1DIFF_OK);
  double drift = 1.0;
  REQUIRE(h1diff_flow_integrate(shear.p, 1.0, 0.01, 0.2, &out.p, &drift) == H1DIFF_OK);
  CHECK(drift <= 1e-12);
  CHECK(h1diff_flow_integrate(shear.p, 1.0, -0.01, 0.2, &out.p, &drift) == H1DIFF_ERR_INVALID_ARGUMENT);

  h1diff_curvature k{};
  REQUIRE(h1diff_sectional(64, "0: 1*sin(1,0)", "0: 1*cos(1,0)", "two_term", 1.0, 0, &k) == H1DIFF_OK);
  CHECK(k.numerator == doctest::Approx(-2 * pi * pi).epsilon(1e-12));
  CHECK(k.sign == -1);
  CHECK(k.sectional_defined == 1);
  REQUIRE(h1diff_sectional(32, "0: 1*sin(1,0)", "1: 1*cos(0,1)", nullptr, 1.0, 0, &k) == H1DIFF_OK);
  CHECK(k.sign == 0);
  CHECK(h1diff_sectional(32, "0: 1*sin(1,0)", "1: 1*cos(0,1)", "nine_term", 1.0, 0, &k) == H1DIFF_ERR_INVALID_ARGUMENT);
  CHECK(h1diff_sectional(32, "0: 1*sin(1,0)", "1: 1*cos(0,1)", "two_term", 1.0, 1, &k) == H1DIFF_ERR_INVALID_ARGUMENT);

  double res = 1.0;
  REQUIRE(h1diff_shear_geodesic_residual(32, "0: 1*sin(2)", 0.5, 1.0, &res) == H1DIFF_OK);
  CHECK(res <= 1e-10);

  double e = 1.0, tb = 0.0;
  REQUIRE(h1diff_geodesic_1d(128, "0: 1*sin(1)", 0.0, 5e-4, 0.5, nullptr, &tb) == H1DIFF_OK);
  CHECK(std::abs(tb - 1.0 / 3.0) <= 0.1 / 3.0);
  REQUIRE(h1diff_geodesic_1d(64, "0: 1*sin(1)", 1.0, 1e-2, 0.3, &e, &tb) == H1DIFF_OK);
  CHECK(tb == -1.0);
  CHECK(e <= 1e-6);
}

TEST_CASE("last error is per thread") {
  Field bad;
  REQUIRE(h1diff_field_from_spec(2, 16, "garbage", &bad.p) == H1DIFF_ERR_INVALID_ARGUMENT);
  const std::string mine = h1diff_last_error();
  std::string theirs = "unset";
  std::thread t([&] {
    theirs = h1diff_last_error();
    h1diff_config* c = nullptr;
    h1diff_config_parse("{", &c);
  });
  t.join();
  CHECK(theirs.empty());
  CHECK(std::string(h1diff_last_error()) == mine);
}
