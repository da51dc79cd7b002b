#include "bulge/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "bulge/errors.hpp"
#include "bulge/units.hpp"
#include "bulge/version.hpp"

namespace bulge::io {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(bool(in), ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  require(!in.bad(), ErrorCode::IoError, "read failed on " + path);
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(bool(out), ErrorCode::IoError, "cannot write " + path);
  out << content;
  out.flush();
  require(bool(out), ErrorCode::IoError, "write failed on " + path);
}

std::string trim(std::string_view s) {
  const char* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& token, const std::string& where) {
  const std::string t = trim(token);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  require(ec == std::errc() && ptr == end && !t.empty(), ErrorCode::ParseError,
          where + ": not a number: '" + token + "'");
  return value;
}

// 9 significant digits, C locale, for the human-readable text format.
std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Shortest exact form for CSV output (matches what the JSON writer does).
std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double back = 0.0;
  std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
  if (back == v) {
    // try shorter representations; pick the first that round-trips
    for (int prec = 15; prec <= 16; ++prec) {
      char s[40];
      std::snprintf(s, sizeof s, "%.*g", prec, v);
      double b2 = 0.0;
      std::from_chars(s, s + std::char_traits<char>::length(s), b2);
      if (b2 == v) return s;
    }
  }
  return buf;
}

const std::array<const char*, 4> kCurvePressureUnits = {"Pa", "kPa", "mbar", "bar"};
const std::array<const char*, 4> kCurveLengthUnits = {"m", "mm", "um", "nm"};

double curve_unit_factor(const std::string& unit, bool pressure,
                         const std::string& where) {
  const auto& allowed = pressure ? kCurvePressureUnits : kCurveLengthUnits;
  for (const char* u : allowed) {
    if (unit == u)
      return pressure ? units::pressure_factor(unit) : units::length_factor(unit);
  }
  fail(ErrorCode::UnitError, where + ": curve files accept " +
                                 (pressure ? std::string("Pa, kPa, mbar, bar")
                                           : std::string("m, mm, um, nm")) +
                                 ", got '" + unit + "'");
}

}  // namespace

// ------------------------------------------------------------------
// Curve files
// ------------------------------------------------------------------

PressureDeflectionCurve parse_curve_text(const std::string& text,
                                         const std::string& origin,
                                         std::vector<std::string>* warnings) {
  double p_factor = 1.0, h_factor = 1.0;
  bool saw_units = false, saw_header = false, saw_data = false;

  std::vector<PressureDeflectionSample> rows;
  std::istringstream lines(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(lines, raw)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no);
    std::string line = trim(raw);
    if (line.empty()) continue;

    if (line[0] == '#') {
      std::string body = trim(line.substr(1));
      if (body.rfind("units:", 0) == 0) {
        require(!saw_data && !saw_header, ErrorCode::ParseError,
                where + ": the units row must precede the header");
        require(!saw_units, ErrorCode::ParseError, where + ": duplicate units row");
        saw_units = true;
        const std::string spec = trim(body.substr(6));
        const auto comma = spec.find(',');
        require(comma != std::string::npos, ErrorCode::ParseError,
                where + ": expected '#units: <pressure-unit>,<length-unit>'");
        p_factor = curve_unit_factor(trim(spec.substr(0, comma)), true, where);
        h_factor = curve_unit_factor(trim(spec.substr(comma + 1)), false, where);
      }
      continue;  // other comments are ignored
    }

    if (!saw_header) {
      std::string squashed;
      for (char c : line)
        if (c != ' ' && c != '\t') squashed += char(std::tolower((unsigned char)c));
      require(squashed == "pressure,deflection", ErrorCode::ParseError,
              where + ": expected header 'pressure,deflection', got '" + line + "'");
      saw_header = true;
      continue;
    }

    const auto comma = line.find(',');
    require(comma != std::string::npos, ErrorCode::ParseError,
            where + ": expected '<pressure>,<deflection>'");
    require(line.find(',', comma + 1) == std::string::npos, ErrorCode::ParseError,
            where + ": too many columns");
    const double p = parse_number(line.substr(0, comma), where) * p_factor;
    const double h = parse_number(line.substr(comma + 1), where) * h_factor;
    require(std::isfinite(p) && std::isfinite(h), ErrorCode::ParseError,
            where + ": values must be finite");
    require(p >= 0.0, ErrorCode::ParseError, where + ": negative pressure");
    require(h >= 0.0, ErrorCode::ParseError, where + ": negative deflection");
    rows.push_back({p, h});
    saw_data = true;
  }

  require(saw_header, ErrorCode::ParseError,
          origin + ": missing 'pressure,deflection' header");

  if (!std::is_sorted(rows.begin(), rows.end(),
                      [](const auto& l, const auto& r) { return l.pressure < r.pressure; })) {
    std::stable_sort(rows.begin(), rows.end(), [](const auto& l, const auto& r) {
      return l.pressure < r.pressure;
    });
    if (warnings)
      warnings->push_back(origin + ": rows were not in pressure order; sorted");
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    require(rows[i].pressure != rows[i - 1].pressure, ErrorCode::MonotonicityError,
            origin + ": duplicate pressure " + g9(rows[i].pressure) + " Pa");
  }

  return PressureDeflectionCurve(std::move(rows), origin);
}

PressureDeflectionCurve parse_curve(const std::string& path,
                                    std::vector<std::string>* warnings) {
  const std::string label = std::filesystem::path(path).stem().string();
  const std::string text = read_file(path);
  auto curve = parse_curve_text(text, label.empty() ? path : label, warnings);
  return curve;
}

void write_curve(const PressureDeflectionCurve& curve, const std::string& path,
                 const std::string& pressure_unit, const std::string& length_unit) {
  const double pf = curve_unit_factor(pressure_unit, true, path);
  const double hf = curve_unit_factor(length_unit, false, path);
  std::string out = "#units: " + pressure_unit + "," + length_unit + "\n";
  out += "pressure,deflection\n";
  for (const auto& s : curve.samples)
    out += g17(s.pressure / pf) + "," + g17(s.deflection / hf) + "\n";
  write_file(path, out);
}

// ------------------------------------------------------------------
// Bundled membrane dataset
// ------------------------------------------------------------------

namespace {

BundledMembrane make_bundled(const char* label, double w2a_mm, double l2b_mm,
                             double t_nm, double sigma0_mpa, double e_gpa) {
  const double w = w2a_mm * 1e-3, l = l2b_mm * 1e-3, t = t_nm * 1e-9;
  return BundledMembrane{
      label,
      MembraneGeometry::from_full_dimensions(w, l, t, 0.005 * w, 0.005 * l, 0.0),
      sigma0_mpa * 1e6, e_gpa * 1e9};
}

}  // namespace

const std::vector<BundledMembrane>& bundled_membranes() {
  static const std::vector<BundledMembrane> data = {
      make_bundled("1M", 3.104, 3.104, 104, 439, 210),
      make_bundled("2M", 2.131, 2.131, 104, 400, 217),
      make_bundled("3M", 2.131, 2.131, 104, 409, 214),
      make_bundled("4M", 2.140, 2.140, 104, 429, 211),
      make_bundled("5M", 1.138, 2.131, 104, 414, 219),
      make_bundled("1B", 1.890, 1.890, 188, 104, 150),
      make_bundled("2B", 0.662, 0.662, 188, 113, 153),
      make_bundled("3B", 0.750, 0.750, 188, 100, 156),
      make_bundled("4B", 1.390, 7.800, 188, 103, 139),
      make_bundled("5B", 0.270, 3.280, 188, 115, 145),
  };
  return data;
}

const BundledMembrane& bundled_membrane(const std::string& label) {
  for (const auto& m : bundled_membranes())
    if (m.label == label) return m;
  fail(ErrorCode::UnknownLabel,
       "no bundled membrane '" + label + "' (labels: 1M..5M, 1B..5B)");
}

MembraneGeometry load_bundled_geometry(const std::string& label) {
  return bundled_membrane(label).geometry;
}

// ------------------------------------------------------------------
// Experiment configuration
// ------------------------------------------------------------------

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    require(ok, ErrorCode::ParseError, where + ": unknown key '" + it.key() + "'");
  }
}

const json& get_required(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  require(it != obj.end(), ErrorCode::ParseError,
          where + ": missing required key '" + key + "'");
  return *it;
}

// A length that is either a JSON number (scaled by fallback_factor, SI when
// no units block applies) or a string with an explicit unit.
double get_length_value(const json& v, double fallback_factor, const std::string& where) {
  if (v.is_number()) return v.get<double>() * fallback_factor;
  require(v.is_string(), ErrorCode::ParseError,
          where + ": expected a number or a string with a unit");
  return units::parse_length(v.get<std::string>(), fallback_factor);
}

double get_pressure_value(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  require(v.is_string(), ErrorCode::ParseError,
          where + ": expected a number (Pa) or a string with a unit");
  return units::parse_pressure(v.get<std::string>());
}

// Uncertainty entry: "0.5%" of the dimension, or an absolute length.
double get_uncertainty(const json& v, double dimension, double fallback_factor,
                       const std::string& where) {
  if (v.is_string()) {
    const std::string s = trim(v.get<std::string>());
    if (!s.empty() && s.back() == '%') {
      const double pct = parse_number(s.substr(0, s.size() - 1), where);
      require(pct >= 0.0, ErrorCode::ParseError, where + ": negative percentage");
      return pct / 100.0 * dimension;
    }
  }
  const double u = get_length_value(v, fallback_factor, where);
  require(u >= 0.0, ErrorCode::ParseError, where + ": negative uncertainty");
  return u;
}

ExperimentConfig config_from_json(const json& root, const std::string& origin) {
  require(root.is_object(), ErrorCode::ParseError, origin + ": expected a JSON object");
  check_keys(root, {"label", "geometry", "material", "analysis", "uncertainty"}, origin);

  ExperimentConfig cfg{
      "", MembraneGeometry(1.0, 1.0, 0.5),  // placeholder, replaced below
      false, std::nullopt, 0.3, CoefficientSource::VlassakNix, std::nullopt, {}};

  if (auto it = root.find("label"); it != root.end()) {
    require(it->is_string(), ErrorCode::ParseError, origin + ": label must be a string");
    cfg.label = it->get<std::string>();
  }

  const json& g = get_required(root, "geometry", origin);
  const std::string gw = origin + ": geometry";
  require(g.is_object(), ErrorCode::ParseError, gw + " must be an object");
  check_keys(g, {"width_2a", "length_2b", "thickness_t", "units", "uncertainties"}, gw);

  double lat_factor = 1.0, thick_factor = 1.0;
  if (auto it = g.find("units"); it != g.end()) {
    const std::string uw = gw + ".units";
    require(it->is_object(), ErrorCode::ParseError, uw + " must be an object");
    check_keys(*it, {"length", "thickness"}, uw);
    if (auto u = it->find("length"); u != it->end())
      lat_factor = units::length_factor(u->get<std::string>());
    if (auto u = it->find("thickness"); u != it->end())
      thick_factor = units::length_factor(u->get<std::string>());
  }

  const double w2a = get_length_value(get_required(g, "width_2a", gw), lat_factor,
                                      gw + ".width_2a");
  const double l2b = get_length_value(get_required(g, "length_2b", gw), lat_factor,
                                      gw + ".length_2b");
  const double t = get_length_value(get_required(g, "thickness_t", gw), thick_factor,
                                    gw + ".thickness_t");

  double u2a = 0.0, u2b = 0.0, ut = 0.0;
  if (auto it = g.find("uncertainties"); it != g.end()) {
    const std::string uw = gw + ".uncertainties";
    require(it->is_object(), ErrorCode::ParseError, uw + " must be an object");
    check_keys(*it, {"width_2a", "length_2b", "thickness_t"}, uw);
    if (auto u = it->find("width_2a"); u != it->end())
      u2a = get_uncertainty(*u, w2a, lat_factor, uw + ".width_2a");
    if (auto u = it->find("length_2b"); u != it->end())
      u2b = get_uncertainty(*u, l2b, lat_factor, uw + ".length_2b");
    if (auto u = it->find("thickness_t"); u != it->end())
      ut = get_uncertainty(*u, t, thick_factor, uw + ".thickness_t");
  } else {
    u2a = 0.005 * w2a;
    u2b = 0.005 * l2b;
    cfg.lateral_uncertainty_defaulted = true;
  }
  cfg.geometry = MembraneGeometry::from_full_dimensions(w2a, l2b, t, u2a, u2b, ut);

  if (auto it = root.find("material"); it != root.end()) {
    const std::string mw = origin + ": material";
    require(it->is_object(), ErrorCode::ParseError, mw + " must be an object");
    check_keys(*it, {"youngs_modulus_E", "poisson_nu", "residual_stress_sigma0"}, mw);
    const double e = get_pressure_value(get_required(*it, "youngs_modulus_E", mw),
                                        mw + ".youngs_modulus_E");
    const json& nuj = get_required(*it, "poisson_nu", mw);
    require(nuj.is_number(), ErrorCode::ParseError,
            mw + ".poisson_nu must be a number");
    const double sigma0 = get_pressure_value(
        get_required(*it, "residual_stress_sigma0", mw), mw + ".residual_stress_sigma0");
    cfg.material.emplace(e, nuj.get<double>(), sigma0);
  }

  if (auto it = root.find("analysis"); it != root.end()) {
    const std::string aw = origin + ": analysis";
    require(it->is_object(), ErrorCode::ParseError, aw + " must be an object");
    check_keys(*it, {"nu_assumed", "coefficient_source", "min_deflection_over_t"}, aw);
    if (auto a = it->find("nu_assumed"); a != it->end()) {
      require(a->is_number(), ErrorCode::ParseError, aw + ".nu_assumed must be a number");
      cfg.nu_assumed = a->get<double>();
    }
    if (auto a = it->find("coefficient_source"); a != it->end()) {
      require(a->is_string(), ErrorCode::ParseError,
              aw + ".coefficient_source must be a string");
      cfg.source = coefficient_source_from_string(a->get<std::string>());
    }
    if (auto a = it->find("min_deflection_over_t"); a != it->end()) {
      require(a->is_number(), ErrorCode::ParseError,
              aw + ".min_deflection_over_t must be a number");
      const double m = a->get<double>();
      require(std::isfinite(m) && m >= 0.0, ErrorCode::ParseError,
              aw + ".min_deflection_over_t must be >= 0");
      cfg.min_deflection_over_t = m;
    }
  }

  if (auto it = root.find("uncertainty"); it != root.end()) {
    const std::string uw = origin + ": uncertainty";
    require(it->is_object(), ErrorCode::ParseError, uw + " must be an object");
    check_keys(*it, {"n_samples", "seed"}, uw);
    if (auto u = it->find("n_samples"); u != it->end()) {
      require(u->is_number_integer(), ErrorCode::ParseError,
              uw + ".n_samples must be an integer");
      cfg.uncertainty.n_samples = u->get<int>();
    }
    if (auto u = it->find("seed"); u != it->end()) {
      require(u->is_number_unsigned() || u->is_number_integer(),
              ErrorCode::ParseError, uw + ".seed must be an integer");
      cfg.uncertainty.seed = u->get<std::uint64_t>();
    }
  }

  return cfg;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, origin + ": " + e.what());
  }
  return config_from_json(root, origin);
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_file(path), path);
}

// ------------------------------------------------------------------
// Reports
// ------------------------------------------------------------------

Report::Report() : version(kVersion) {}

ReportFormat report_format_from_string(std::string_view name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "text") return ReportFormat::Text;
  fail(ErrorCode::InvalidArgument,
       "unknown report format '" + std::string(name) + "' (use json or text)");
}

namespace {

json geometry_to_json(const MembraneGeometry& g) {
  return json{{"half_width_a_m", g.half_width_a},
              {"half_length_b_m", g.half_length_b},
              {"thickness_t_m", g.thickness_t},
              {"sigma_a_m", g.sigma_a},
              {"sigma_b_m", g.sigma_b},
              {"sigma_t_m", g.sigma_t}};
}

MembraneGeometry geometry_from_json(const json& j) {
  return MembraneGeometry(j.at("half_width_a_m").get<double>(),
                          j.at("half_length_b_m").get<double>(),
                          j.at("thickness_t_m").get<double>(),
                          j.at("sigma_a_m").get<double>(),
                          j.at("sigma_b_m").get<double>(),
                          j.at("sigma_t_m").get<double>());
}

json fit_to_json(const FitResult& f) {
  return json{{"label", f.label},
              {"intercept_A_Pa_per_m", f.intercept_A},
              {"slope_B_Pa_per_m3", f.slope_B},
              {"sigma0_Pa", f.sigma0},
              {"biaxial_modulus_Pa", f.biaxial_modulus},
              {"youngs_modulus_E_Pa", f.youngs_modulus_E},
              {"nu_assumed", f.nu_assumed},
              {"r_squared", f.r_squared},
              {"u_sigma0_Pa", f.u_sigma0},
              {"u_E_Pa", f.u_E},
              {"geometry", geometry_to_json(f.geometry)},
              {"coefficients",
               json{{"c1", f.coeffs.c1},
                    {"f", f.coeffs.f_of_nu},
                    {"alpha", f.coeffs.alpha},
                    {"source", std::string(to_string(f.coeffs.source))},
                    {"aspect_ratio", f.coeffs.aspect_ratio},
                    {"nu_used", f.coeffs.nu_used}}}};
}

FitResult fit_from_json(const json& j) {
  const json& c = j.at("coefficients");
  return FitResult{
      j.at("intercept_A_Pa_per_m").get<double>(),
      j.at("slope_B_Pa_per_m3").get<double>(),
      j.at("sigma0_Pa").get<double>(),
      j.at("biaxial_modulus_Pa").get<double>(),
      j.at("youngs_modulus_E_Pa").get<double>(),
      j.at("nu_assumed").get<double>(),
      j.at("r_squared").get<double>(),
      j.at("u_sigma0_Pa").get<double>(),
      j.at("u_E_Pa").get<double>(),
      geometry_from_json(j.at("geometry")),
      ShapeCoefficients{c.at("c1").get<double>(), c.at("f").get<double>(),
                        c.at("alpha").get<double>(),
                        coefficient_source_from_string(c.at("source").get<std::string>()),
                        c.at("aspect_ratio").get<double>(),
                        c.at("nu_used").get<double>()},
      j.at("label").get<std::string>()};
}

json poisson_to_json(const PoissonSolveReport& p) {
  return json{{"label_square", p.label_square},
              {"label_rect", p.label_rect},
              {"nu", p.nu},
              {"delta_nu", p.delta_nu},
              {"slope_ratio", p.slope_ratio},
              {"bracket", json::array({p.bracket_lo, p.bracket_hi})},
              {"iterations", p.iterations},
              {"n_failed_draws", p.n_failed_draws},
              {"warnings", p.warnings}};
}

PoissonSolveReport poisson_from_json(const json& j) {
  PoissonSolveReport p;
  p.nu = j.at("nu").get<double>();
  p.delta_nu = j.at("delta_nu").get<double>();
  p.slope_ratio = j.at("slope_ratio").get<double>();
  p.bracket_lo = j.at("bracket").at(0).get<double>();
  p.bracket_hi = j.at("bracket").at(1).get<double>();
  p.iterations = j.at("iterations").get<int>();
  p.n_failed_draws = j.at("n_failed_draws").get<int>();
  p.label_square = j.at("label_square").get<std::string>();
  p.label_rect = j.at("label_rect").get<std::string>();
  p.warnings = j.at("warnings").get<std::vector<std::string>>();
  return p;
}

json mixture_to_json(const MixtureResult& m) {
  return json{{"mode", std::string(to_string(m.mode))},
              {"value", m.result.value},
              {"u", m.result.u},
              {"n_failed_draws", m.n_failed_draws},
              {"warnings", m.warnings}};
}

MixtureResult mixture_from_json(const json& j) {
  MixtureResult m{mixture_mode_from_string(j.at("mode").get<std::string>()),
                  UncertainValue{j.at("value").get<double>(), j.at("u").get<double>()},
                  j.at("n_failed_draws").get<int>(),
                  j.at("warnings").get<std::vector<std::string>>()};
  return m;
}

std::string report_text(const Report& r) {
  std::ostringstream os;
  os << "bulgekit " << r.version << " report\n";
  os << "seed = " << r.seed << "\n";
  for (const auto& a : r.assumptions) os << "assumption: " << a << "\n";

  for (const auto& f : r.fits) {
    os << "\nfit \"" << f.label << "\"\n";
    os << "  A (Pa/m) = " << g9(f.intercept_A) << "\n";
    os << "  B (Pa/m^3) = " << g9(f.slope_B) << "\n";
    os << "  sigma0 (Pa) = " << g9(f.sigma0) << " +- " << g9(f.u_sigma0) << "\n";
    os << "  biaxial_modulus (Pa) = " << g9(f.biaxial_modulus) << "\n";
    os << "  E (Pa) = " << g9(f.youngs_modulus_E) << " +- " << g9(f.u_E) << "\n";
    os << "  nu_assumed = " << g9(f.nu_assumed) << "\n";
    os << "  r_squared = " << g9(f.r_squared) << "\n";
    os << "  geometry (m): a = " << g9(f.geometry.half_width_a)
       << ", b = " << g9(f.geometry.half_length_b)
       << ", t = " << g9(f.geometry.thickness_t) << "\n";
    os << "  geometry uncertainty (m): a = " << g9(f.geometry.sigma_a)
       << ", b = " << g9(f.geometry.sigma_b) << ", t = " << g9(f.geometry.sigma_t)
       << "\n";
    os << "  coefficients: c1 = " << g9(f.coeffs.c1) << ", f = " << g9(f.coeffs.f_of_nu)
       << ", alpha = " << g9(f.coeffs.alpha) << ", source = "
       << to_string(f.coeffs.source) << ", aspect_ratio = "
       << g9(f.coeffs.aspect_ratio) << "\n";
  }

  for (const auto& p : r.poisson_results) {
    os << "\npoisson \"" << p.label_square << "\" x \"" << p.label_rect << "\"\n";
    os << "  nu = " << g9(p.nu) << " +- " << g9(p.delta_nu) << "\n";
    os << "  slope_ratio = " << g9(p.slope_ratio) << "\n";
    os << "  bracket = [" << g9(p.bracket_lo) << ", " << g9(p.bracket_hi) << "]\n";
    os << "  iterations = " << p.iterations << "\n";
    os << "  failed_draws = " << p.n_failed_draws << "\n";
    for (const auto& w : p.warnings) os << "  warning: " << w << "\n";
  }

  for (const auto& m : r.mixture_results) {
    os << "\nmixture " << to_string(m.mode) << "\n";
    os << "  value = " << g9(m.result.value) << " +- " << g9(m.result.u) << "\n";
    os << "  failed_draws = " << m.n_failed_draws << "\n";
    for (const auto& w : m.warnings) os << "  note: " << w << "\n";
  }
  return os.str();
}

}  // namespace

std::string report_to_string(const Report& r, ReportFormat format) {
  if (format == ReportFormat::Text) return report_text(r);
  json j{{"tool", "bulgekit"},
         {"version", r.version},
         {"seed", r.seed},
         {"assumptions", r.assumptions},
         {"fits", json::array()},
         {"poisson", json::array()},
         {"mixtures", json::array()}};
  for (const auto& f : r.fits) j["fits"].push_back(fit_to_json(f));
  for (const auto& p : r.poisson_results) j["poisson"].push_back(poisson_to_json(p));
  for (const auto& m : r.mixture_results) j["mixtures"].push_back(mixture_to_json(m));
  return j.dump(2) + "\n";
}

void write_report(const Report& report, const std::string& path, ReportFormat format) {
  write_file(path, report_to_string(report, format));
}

Report read_report(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
  try {
    Report r;
    r.version = j.at("version").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.assumptions = j.at("assumptions").get<std::vector<std::string>>();
    for (const auto& f : j.at("fits")) r.fits.push_back(fit_from_json(f));
    for (const auto& p : j.at("poisson")) r.poisson_results.push_back(poisson_from_json(p));
    for (const auto& m : j.at("mixtures")) r.mixture_results.push_back(mixture_from_json(m));
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, path + ": malformed report: " + e.what());
  }
}

}  // namespace bulge::io
