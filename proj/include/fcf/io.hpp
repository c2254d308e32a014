#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "drive.hpp"
#include "effective.hpp"
#include "error.hpp"

namespace fcf {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------- numbers

/// Shortest round-trip decimal form, independent of the C locale.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

inline double parse_number(std::string_view s, std::string_view what) {
  double x = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, x);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(x)) {
    throw ConfigError(std::string(what) + ": not a finite number: '" + std::string(s) + "'");
  }
  return x;
}

/// Grid from "start:stop:step" (stop included when within 1e-9 steps of the
/// grid) or a single value "x".
inline std::vector<double> parse_range(std::string_view text, std::string_view what = "range") {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t colon = text.find(':', pos);
    parts.push_back(text.substr(pos, colon == std::string_view::npos ? std::string_view::npos : colon - pos));
    if (colon == std::string_view::npos) break;
    pos = colon + 1;
  }
  if (parts.size() == 1) return {parse_number(parts[0], what)};
  if (parts.size() != 3) throw ConfigError(std::string(what) + ": expected start:stop:step");
  const double start = parse_number(parts[0], what);
  const double stop = parse_number(parts[1], what);
  const double step = parse_number(parts[2], what);
  if (!(step > 0.0)) throw ConfigError(std::string(what) + ": step must be positive");
  if (stop < start) throw ConfigError(std::string(what) + ": stop must not precede start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (count > 10'000'000) throw ConfigError(std::string(what) + ": too many grid points");
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = start + double(i) * step;
  return v;
}

// ---------------------------------------------------------------- CSV

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : columns_(header.size()) { append(header); }

  CsvTable& cell(double x) { return text(format_number(x)); }
  CsvTable& cell(int x) { return text(std::to_string(x)); }
  CsvTable& cell(std::size_t x) { return text(std::to_string(x)); }
  CsvTable& cell(bool x) { return text(x ? "1" : "0"); }
  CsvTable& text(std::string_view s) {
    if (filled_ == columns_) throw std::logic_error("CSV row overflow");
    if (filled_ > 0) out_ << ',';
    out_ << s;
    if (++filled_ == columns_) {
      out_ << '\n';
      filled_ = 0;
    }
    return *this;
  }

  std::string str() const { return out_.str(); }

 private:
  void append(const std::vector<std::string>& row) {
    for (const auto& s : row) text(s);
  }

  std::size_t columns_;
  std::size_t filled_ = 0;
  std::ostringstream out_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << content;
  if (!f) throw ConfigError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------- JSON

/// Parses JSON text, reporting syntax errors with line and column.
inline Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_json(ss.str(), path);
}

namespace detail {

inline const Json& field(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) throw ConfigError(path + "." + key + ": missing field");
  return obj.at(key);
}

inline double number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path + ": expected a finite number");
  return x;
}

inline std::vector<double> number_list(const Json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline Json pair(double a, double b) { return Json::array({a, b}); }
inline Json complex_json(cplx z) { return pair(z.real(), z.imag()); }

}  // namespace detail

inline std::string family_name(DriveFamily f) {
  switch (f) {
    case DriveFamily::plus: return "plus";
    case DriveFamily::minus: return "minus";
    case DriveFamily::custom: return "custom";
  }
  return "custom";
}

inline DriveFamily parse_family(const std::string& s, const std::string& path = "family") {
  if (s == "plus") return DriveFamily::plus;
  if (s == "minus") return DriveFamily::minus;
  if (s == "custom") return DriveFamily::custom;
  throw ConfigError(path + ": unknown family '" + s + "'");
}

/// Drive from JSON. Amplitudes are given in units of omega (lattice constant 1).
/// Accepts the full harmonic list or, for plus/minus, the shorthand
/// {"family", "omega", "A": [...], "delta": [...]}.
inline DriveSpec drive_from_json(const Json& j, const std::string& path = "drive") {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  const Json& fam = detail::field(j, "family", path);
  if (!fam.is_string()) throw ConfigError(path + ".family: expected a string");
  const DriveFamily family = parse_family(fam.get<std::string>(), path + ".family");
  const double omega = detail::number(detail::field(j, "omega", path), path + ".omega");
  if (!(omega > 0.0)) throw ConfigError(path + ".omega: must be positive");

  if (j.contains("A")) {
    if (family == DriveFamily::custom) throw ConfigError(path + ".A: shorthand needs family plus or minus");
    std::vector<double> A = detail::number_list(j.at("A"), path + ".A");
    const std::vector<double> delta = j.contains("delta") ? detail::number_list(j.at("delta"), path + ".delta")
                                                           : std::vector<double>(A.size(), 0.0);
    for (auto& a : A) a *= omega;
    return build_family_drive(family, omega, A, delta);
  }

  const Json& list = detail::field(j, "harmonics", path);
  if (!list.is_array()) throw ConfigError(path + ".harmonics: expected an array");
  DriveSpec spec;
  spec.family = family;
  spec.omega = omega;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string hp = path + ".harmonics[" + std::to_string(i) + "]";
    const Json& h = list[i];
    const Json& m = detail::field(h, "m", hp);
    if (!m.is_number_integer()) throw ConfigError(hp + ".m: expected an integer");
    auto axis = [&](const char* key) {
      const auto v = detail::number_list(detail::field(h, key, hp), hp + "." + key);
      if (v.size() != 2) throw ConfigError(hp + "." + key + ": expected [amplitude, phase]");
      return v;
    };
    const auto ax = axis("ax");
    const auto ay = axis("ay");
    spec.harmonics.push_back({m.get<int>(), ax[0] * omega, ay[0] * omega, ax[1], ay[1]});
  }
  validate(spec);
  return spec;
}

inline Json drive_to_json(const DriveSpec& spec) {
  Json list = Json::array();
  for (const auto& h : spec.harmonics) {
    Json e;
    e["m"] = h.m;
    e["ax"] = detail::pair(h.amp_x / spec.omega, h.phase_x);
    e["ay"] = detail::pair(h.amp_y / spec.omega, h.phase_y);
    list.push_back(e);
  }
  Json j;
  j["family"] = family_name(spec.family);
  j["omega"] = spec.omega;
  j["harmonics"] = list;
  return j;
}

inline Json rates_to_json(const EffectiveRates& r, double delta) {
  Json j;
  j["j0"] = r.j0;
  j["omega"] = r.omega;
  Json g0 = Json::array(), tau = Json::array();
  for (std::size_t k = 0; k < 3; ++k) {
    g0.push_back(detail::complex_json(r.g0[k]));
    tau.push_back(detail::complex_json(r.tau[k]));
  }
  j["g0"] = g0;
  j["tau"] = tau;
  j["tau0"] = detail::complex_json(r.tau0);
  j["j1"] = r.j1;
  j["j2"] = r.j2;
  j["phi"] = r.phi_defined ? Json(r.phi) : Json(nullptr);
  j["phi_defined"] = r.phi_defined;
  j["gauge_phase"] = r.gauge_phase;
  j["delta"] = delta;
  j["delta_shift"] = r.delta_shift;
  j["delta_eff"] = delta + r.delta_shift;
  j["residuals"] = {{"isotropic_nn", r.isotropic_nn},
                    {"isotropic_nnn", r.isotropic_nnn},
                    {"nn", r.nn_residual},
                    {"nn_magnitude_spread", r.nn_magnitude_spread},
                    {"nnn", r.nnn_residual},
                    {"tau0_imag", r.tau0_imag}};
  return j;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- SVG

/// Minimal direct SVG emitter for heatmaps over a rectilinear grid with
/// optional contour polylines. Values are mapped to colors by the caller.
class SvgHeatmap {
 public:
  SvgHeatmap(std::vector<double> xs, std::vector<double> ys, std::string x_label, std::string y_label)
      : xs_(std::move(xs)), ys_(std::move(ys)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

  /// color(i, j) returns a CSS color for cell (xs[i], ys[j]).
  void fill(const std::function<std::string(std::size_t, std::size_t)>& color) {
    const double cw = kWidth / double(xs_.size());
    const double ch = kHeight / double(ys_.size());
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      for (std::size_t j = 0; j < ys_.size(); ++j) {
        body_ << "<rect x=\"" << fmt(kMargin + double(i) * cw) << "\" y=\""
              << fmt(kMargin + kHeight - double(j + 1) * ch) << "\" width=\"" << fmt(cw + 0.05) << "\" height=\""
              << fmt(ch + 0.05) << "\" fill=\"" << color(i, j) << "\"/>\n";
      }
    }
  }

  /// Marching-squares level set of value(i, j) at the given level.
  void contour(const std::function<double(std::size_t, std::size_t)>& value, double level, const std::string& stroke,
               bool dashed) {
    if (xs_.size() < 2 || ys_.size() < 2) return;
    body_ << "<path fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\""
          << (dashed ? " stroke-dasharray=\"5,3\"" : "") << " d=\"";
    for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
      for (std::size_t j = 0; j + 1 < ys_.size(); ++j) {
        const std::array<double, 4> v{value(i, j), value(i + 1, j), value(i + 1, j + 1), value(i, j + 1)};
        const std::array<std::array<double, 2>, 4> p{{{double(i), double(j)},
                                                      {double(i + 1), double(j)},
                                                      {double(i + 1), double(j + 1)},
                                                      {double(i), double(j + 1)}}};
        std::vector<std::array<double, 2>> hits;
        for (int e = 0; e < 4; ++e) {
          const double a = v[std::size_t(e)] - level, b = v[std::size_t((e + 1) % 4)] - level;
          if ((a < 0.0) != (b < 0.0)) {
            const double t = a / (a - b);
            const auto& pa = p[std::size_t(e)];
            const auto& pb = p[std::size_t((e + 1) % 4)];
            hits.push_back({pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])});
          }
        }
        for (std::size_t h = 0; h + 1 < hits.size(); h += 2) {
          body_ << 'M' << fmt(px(hits[h][0])) << ' ' << fmt(py(hits[h][1])) << 'L' << fmt(px(hits[h + 1][0])) << ' '
                << fmt(py(hits[h + 1][1]));
        }
      }
    }
    body_ << "\"/>\n";
  }

  /// Polyline through data coordinates.
  void curve(const std::vector<std::array<double, 2>>& pts, const std::string& stroke) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1\" points=\"";
    for (const auto& q : pts) body_ << fmt(dx(q[0])) << ',' << fmt(dy(q[1])) << ' ';
    body_ << "\"/>\n";
  }

  std::string str(const std::string& title) const {
    std::ostringstream s;
    const double W = kWidth + 2 * kMargin, H = kHeight + 2 * kMargin;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(W) << "\" height=\"" << fmt(H)
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<text x=\"" << fmt(W / 2) << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n";
    s << "<svg x=\"0\" y=\"0\" width=\"" << fmt(W) << "\" height=\"" << fmt(H) << "\">\n" << body_.str() << "</svg>\n";
    s << "<rect x=\"" << fmt(kMargin) << "\" y=\"" << fmt(kMargin) << "\" width=\"" << fmt(kWidth) << "\" height=\""
      << fmt(kHeight) << "\" fill=\"none\" stroke=\"black\"/>\n";
    s << "<text x=\"" << fmt(W / 2) << "\" y=\"" << fmt(H - 12) << "\" text-anchor=\"middle\">" << x_label_
      << "</text>\n";
    s << "<text x=\"16\" y=\"" << fmt(H / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << fmt(H / 2)
      << ")\">" << y_label_ << "</text>\n";
    s << axis_ticks();
    s << "</svg>\n";
    return s.str();
  }

 private:
  static constexpr double kWidth = 480.0;
  static constexpr double kHeight = 480.0;
  static constexpr double kMargin = 60.0;

  static std::string fmt(double x) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), std::round(x * 100.0) / 100.0);
    return std::string(buf.data(), res.ptr);
  }
  // Grid index -> pixel at cell centers.
  double px(double i) const { return kMargin + (i + 0.5) * kWidth / double(xs_.size()); }
  double py(double j) const { return kMargin + kHeight - (j + 0.5) * kHeight / double(ys_.size()); }
  // Data coordinate -> pixel by linear interpolation over the axis extent.
  double dx(double x) const { return px(index_of(xs_, x)); }
  double dy(double y) const { return py(index_of(ys_, y)); }
  static double index_of(const std::vector<double>& axis, double x) {
    if (axis.size() < 2 || axis.back() == axis.front()) return 0.0;
    return (x - axis.front()) / (axis.back() - axis.front()) * double(axis.size() - 1);
  }

  std::string axis_ticks() const {
    std::ostringstream s;
    auto tick = [&](bool horizontal, const std::vector<double>& axis) {
      if (axis.empty()) return;
      for (std::size_t t : {std::size_t(0), axis.size() / 2, axis.size() - 1}) {
        const double v = axis[t];
        std::array<char, 32> buf{};
        const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), std::round(v * 100.0) / 100.0);
        const std::string label(buf.data(), res.ptr);
        if (horizontal) {
          s << "<text x=\"" << fmt(px(double(t))) << "\" y=\"" << fmt(kMargin + kHeight + 16)
            << "\" text-anchor=\"middle\">" << label << "</text>\n";
        } else {
          s << "<text x=\"" << fmt(kMargin - 6) << "\" y=\"" << fmt(py(double(t)) + 4) << "\" text-anchor=\"end\">"
            << label << "</text>\n";
        }
      }
    };
    tick(true, xs_);
    tick(false, ys_);
    return s.str();
  }

  std::vector<double> xs_, ys_;
  std::string x_label_, y_label_;
  std::ostringstream body_;
};

/// Hue-wheel color for a phase in (-pi, pi].
inline std::string phase_color(double phi) {
  const double h = (phi + std::numbers::pi) / (2.0 * std::numbers::pi) * 360.0;
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), std::round(h * 10.0) / 10.0);
  return "hsl(" + std::string(buf.data(), res.ptr) + ",80%,55%)";
}

}  // namespace fcf
