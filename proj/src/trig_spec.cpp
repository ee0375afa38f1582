#include "h1diff/trig_spec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include "h1diff/errors.hpp"

namespace h1diff {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view s, std::string_view what) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw InvalidInput("bad " + std::string(what) + " '" + std::string(s) + "' in trig spec");
  return value;
}

// Flips k so that its first nonzero entry is positive. Returns the sign applied.
int canonical_sign(std::array<int, 2>& k) {
  const int lead = k[0] != 0 ? k[0] : k[1];
  if (lead < 0) {
    k[0] = -k[0];
    k[1] = -k[1];
    return -1;
  }
  return 1;
}

}  // namespace

TrigFieldSpec::TrigFieldSpec(int dim, int components, std::vector<TrigTerm> terms)
    : dim_(dim), components_(components), terms_(std::move(terms)) {
  if (dim != 1 && dim != 2) throw InvalidInput("trig spec dimension must be 1 or 2");
  if (components < 1) throw InvalidInput("trig spec needs at least one component");
  for (const auto& t : terms_) {
    if (t.component < 0 || t.component >= components_)
      throw InvalidInput("trig term component out of range");
    if (!std::isfinite(t.amplitude)) throw InvalidInput("trig term amplitude must be finite");
    if (dim_ == 1 && t.wavevector[1] != 0) throw InvalidInput("1D trig term has a second wavenumber");
  }
}

TrigFieldSpec& TrigFieldSpec::add(int component, double amplitude, std::array<int, 2> k, Phase phase) {
  if (component < 0 || component >= components_) throw InvalidInput("trig term component out of range");
  if (dim_ == 1) k[1] = 0;
  terms_.push_back({component, amplitude, k, phase});
  return *this;
}

TrigFieldSpec TrigFieldSpec::parse(std::string_view text, int dim, int components) {
  TrigFieldSpec spec(dim, components);
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view item = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (item.empty()) continue;

    const auto colon = item.find(':');
    const auto star = item.find('*');
    const auto open = item.find('(');
    const auto close = item.rfind(')');
    if (colon == std::string_view::npos || star == std::string_view::npos ||
        open == std::string_view::npos || close != item.size() - 1 || !(colon < star && star < open))
      throw InvalidInput("trig term '" + std::string(item) + "' is not of the form c: a*sin(k1,k2)");

    const int comp = parse_number<int>(item.substr(0, colon), "component");
    const double amp = parse_number<double>(item.substr(colon + 1, star - colon - 1), "amplitude");
    const std::string_view fn = trim(item.substr(star + 1, open - star - 1));
    Phase phase;
    if (fn == "sin")
      phase = Phase::Sin;
    else if (fn == "cos")
      phase = Phase::Cos;
    else
      throw InvalidInput("trig term function must be sin or cos, got '" + std::string(fn) + "'");

    const std::string_view args = item.substr(open + 1, close - open - 1);
    std::array<int, 2> k{0, 0};
    const auto comma = args.find(',');
    if (dim == 1) {
      if (comma != std::string_view::npos) throw InvalidInput("1D trig term takes one wavenumber");
      k[0] = parse_number<int>(args, "wavenumber");
    } else {
      if (comma == std::string_view::npos) throw InvalidInput("2D trig term takes two wavenumbers");
      k[0] = parse_number<int>(args.substr(0, comma), "wavenumber");
      k[1] = parse_number<int>(args.substr(comma + 1), "wavenumber");
    }
    if (comp < 0 || comp >= components)
      throw InvalidInput("trig term component " + std::to_string(comp) + " out of range");
    spec.add(comp, amp, k, phase);
  }
  return spec;
}

SpectralField TrigFieldSpec::to_field(const Grid& grid) const {
  if (grid.dim() != dim_) throw InvalidInput("trig spec dimension does not match grid");
  std::vector<std::vector<Complex>> coeffs(components_, std::vector<Complex>(grid.size()));
  auto index = [&](int k1, int k2) {
    std::size_t idx = static_cast<std::size_t>(grid.index_of(k1));
    if (dim_ == 2) idx = idx * grid.n() + grid.index_of(k2);
    return idx;
  };
  for (const auto& t : terms_) {
    const int k1 = t.wavevector[0];
    const int k2 = t.wavevector[1];
    if (!grid.retained(k1) || !grid.retained(k2))
      throw InvalidInput("trig term wavevector beyond the grid's alias cutoff");
    auto& c = coeffs[t.component];
    if (k1 == 0 && k2 == 0) {
      if (t.phase == Phase::Cos) c[0] += t.amplitude;
      continue;
    }
    // sin = (e - e*)/(2i), cos = (e + e*)/2
    const Complex plus = t.phase == Phase::Cos ? Complex(0.5 * t.amplitude, 0.0)
                                               : Complex(0.0, -0.5 * t.amplitude);
    c[index(k1, k2)] += plus;
    c[index(-k1, -k2)] += std::conj(plus);
  }
  return SpectralField::from_coefficients(grid, std::move(coeffs));
}

TrigFieldSpec TrigFieldSpec::from_field(const SpectralField& f, double drop_below) {
  const Grid& g = f.grid();
  TrigFieldSpec spec(g.dim(), f.components());
  const int kc = g.cutoff();
  for (int c = 0; c < f.components(); ++c) {
    for (int k1 = 0; k1 <= kc; ++k1) {
      const int lo = g.dim() == 1 ? 0 : (k1 == 0 ? 0 : -kc);
      const int hi = g.dim() == 1 ? 0 : kc;
      for (int k2 = lo; k2 <= hi; ++k2) {
        const int kv[2] = {k1, k2};
        const Complex z = f.coefficient(c, std::span<const int>(kv, g.dim()));
        if (k1 == 0 && k2 == 0) {
          if (std::abs(z.real()) > drop_below) spec.add(c, z.real(), {0, 0}, Phase::Cos);
          continue;
        }
        const double cos_amp = 2.0 * z.real();
        const double sin_amp = -2.0 * z.imag();
        if (std::abs(sin_amp) > drop_below) spec.add(c, sin_amp, {k1, k2}, Phase::Sin);
        if (std::abs(cos_amp) > drop_below) spec.add(c, cos_amp, {k1, k2}, Phase::Cos);
      }
    }
  }
  return spec.canonical();
}

double TrigFieldSpec::evaluate(int component, std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    if (t.component != component) continue;
    double theta = t.wavevector[0] * x[0];
    if (dim_ == 2) theta += t.wavevector[1] * x[1];
    sum += t.amplitude * (t.phase == Phase::Sin ? std::sin(theta) : std::cos(theta));
  }
  return sum;
}

TrigFieldSpec TrigFieldSpec::canonical() const {
  using Key = std::tuple<int, int, int, int>;  // component, k1, k2, phase
  std::map<Key, double> merged;
  for (auto t : terms_) {
    const int s = canonical_sign(t.wavevector);
    double amp = t.amplitude;
    if (t.phase == Phase::Sin) {
      if (t.wavevector == std::array<int, 2>{0, 0}) continue;
      amp *= s;
    }
    merged[{t.component, t.wavevector[0], t.wavevector[1], t.phase == Phase::Sin ? 0 : 1}] += amp;
  }
  TrigFieldSpec out(dim_, components_);
  for (const auto& [key, amp] : merged) {
    if (amp == 0.0) continue;
    const auto [c, k1, k2, ph] = key;
    out.terms_.push_back({c, amp, {k1, k2}, ph == 0 ? Phase::Sin : Phase::Cos});
  }
  return out;
}

bool TrigFieldSpec::is_divergence_free() const {
  if (components_ != dim_) return false;
  std::map<std::tuple<int, int, int>, double> div;
  double scale = 0.0;
  for (const auto& t : canonical().terms_) {
    const double contrib = t.wavevector[t.component] * t.amplitude;
    div[{t.wavevector[0], t.wavevector[1], t.phase == Phase::Sin ? 0 : 1}] += contrib;
    scale = std::max(scale, std::abs(contrib));
  }
  for (const auto& [key, v] : div)
    if (std::abs(v) > 1e-14 * scale) return false;
  return true;
}

int TrigFieldSpec::max_wavenumber() const {
  int m = 0;
  for (const auto& t : terms_) m = std::max({m, std::abs(t.wavevector[0]), std::abs(t.wavevector[1])});
  return m;
}

std::string TrigFieldSpec::to_string() const {
  std::string out;
  char buf[96];
  for (const auto& t : terms_) {
    if (!out.empty()) out += "; ";
    const char* fn = t.phase == Phase::Sin ? "sin" : "cos";
    if (dim_ == 1)
      std::snprintf(buf, sizeof buf, "%d: %.17g*%s(%d)", t.component, t.amplitude, fn, t.wavevector[0]);
    else
      std::snprintf(buf, sizeof buf, "%d: %.17g*%s(%d,%d)", t.component, t.amplitude, fn,
                    t.wavevector[0], t.wavevector[1]);
    out += buf;
  }
  return out;
}

}  // namespace h1diff
