#include "bulge/coefficients.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <utility>

#include "bulge/errors.hpp"

#ifndef BULGEKIT_DEFAULT_DATA_DIR
#define BULGEKIT_DEFAULT_DATA_DIR ""
#endif

namespace bulge {

// ------------------------------------------------------------------
// Source names
// ------------------------------------------------------------------

std::string_view to_string(CoefficientSource source) {
  switch (source) {
    case CoefficientSource::VlassakNix: return "vlassak_nix";
    case CoefficientSource::Bonnotte: return "bonnotte";
    case CoefficientSource::MaierSchneider: return "maier_schneider";
    case CoefficientSource::SolverDerived: return "solver_derived";
  }
  return "unknown";
}

CoefficientSource coefficient_source_from_string(std::string_view name) {
  if (name == "vlassak_nix") return CoefficientSource::VlassakNix;
  if (name == "bonnotte") return CoefficientSource::Bonnotte;
  if (name == "maier_schneider") return CoefficientSource::MaierSchneider;
  if (name == "solver_derived") return CoefficientSource::SolverDerived;
  fail(ErrorCode::InvalidArgument,
       "unknown coefficient source '" + std::string(name) +
           "' (expected vlassak_nix, bonnotte, maier_schneider or solver_derived)");
}

// ------------------------------------------------------------------
// alpha(b/a)
// ------------------------------------------------------------------

double alpha_for(double aspect_ratio) {
  require(std::isfinite(aspect_ratio) && aspect_ratio >= 1.0,
          ErrorCode::InvalidArgument, "aspect ratio must be >= 1");
  constexpr double a1 = 1.26e-3, a2 = 2.54e-3, a4 = 2.6e-3;
  if (aspect_ratio <= 1.0) return a1;
  if (aspect_ratio < 2.0) return a1 + (a2 - a1) * (aspect_ratio - 1.0);
  if (aspect_ratio < 4.0) return a2 + (a4 - a2) * (aspect_ratio - 2.0) / 2.0;
  return a4;
}

// ------------------------------------------------------------------
// CoefficientTable
// ------------------------------------------------------------------

namespace {

std::vector<double> sorted_unique(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

// Index of the cell [knots[i], knots[i+1]] containing x, clamped to the grid.
std::size_t cell_index(const std::vector<double>& knots, double x) {
  if (knots.size() == 1 || x <= knots.front()) return 0;
  if (x >= knots.back()) return knots.size() - 2;
  const auto it = std::upper_bound(knots.begin(), knots.end(), x);
  return static_cast<std::size_t>(it - knots.begin()) - 1;
}

double clamp_to(const std::vector<double>& knots, double x) {
  return std::clamp(x, knots.front(), knots.back());
}

}  // namespace

CoefficientTable::CoefficientTable(std::vector<CoefficientEntry> entries,
                                   std::string provenance)
    : entries_(std::move(entries)), provenance_(std::move(provenance)) {
  require(!entries_.empty(), ErrorCode::InvalidArgument, "coefficient table is empty");

  std::vector<double> ratios, nus;
  ratios.reserve(entries_.size());
  nus.reserve(entries_.size());
  for (const auto& e : entries_) {
    require(std::isfinite(e.aspect_ratio) && e.aspect_ratio >= 1.0,
            ErrorCode::InvalidArgument, "table aspect ratios must be >= 1");
    require(e.c1 >= 1.5 && e.c1 <= 4.0, ErrorCode::InvalidArgument,
            "table c1 outside the plausible range [1.5, 4.0]");
    require(e.f >= 0.5 && e.f <= 2.5, ErrorCode::InvalidArgument,
            "table f outside the plausible range [0.5, 2.5]");
    ratios.push_back(e.aspect_ratio);
    nus.push_back(e.nu);
  }
  ratios_ = sorted_unique(std::move(ratios));
  nus_ = sorted_unique(std::move(nus));

  require(entries_.size() == ratios_.size() * nus_.size(), ErrorCode::InvalidArgument,
          "coefficient table must be a complete (aspect_ratio x nu) grid");
  std::sort(entries_.begin(), entries_.end(), [](const auto& l, const auto& r) {
    return l.aspect_ratio != r.aspect_ratio ? l.aspect_ratio < r.aspect_ratio
                                            : l.nu < r.nu;
  });
  for (std::size_t i = 0; i < ratios_.size(); ++i) {
    for (std::size_t j = 0; j < nus_.size(); ++j) {
      const auto& e = entries_[i * nus_.size() + j];
      require(e.aspect_ratio == ratios_[i] && e.nu == nus_[j], ErrorCode::InvalidArgument,
              "coefficient table grid has duplicate or missing knots");
    }
  }
}

double CoefficientTable::c1_at(std::size_t ratio_index, std::size_t nu_index) const {
  return entries_[ratio_index * nus_.size() + nu_index].c1;
}

double CoefficientTable::f_at(std::size_t ratio_index, std::size_t nu_index) const {
  return entries_[ratio_index * nus_.size() + nu_index].f;
}

CoefficientTable::Lookup CoefficientTable::interpolate(double aspect_ratio,
                                                       double nu) const {
  const double r = clamp_to(ratios_, aspect_ratio);
  const double n = clamp_to(nus_, nu);

  const std::size_t i = cell_index(ratios_, r);
  const std::size_t j = cell_index(nus_, n);

  const auto lerp2 = [&](auto value) {
    if (ratios_.size() == 1 && nus_.size() == 1) return value(0, 0);
    if (ratios_.size() == 1) {
      const double tv = (n - nus_[j]) / (nus_[j + 1] - nus_[j]);
      return value(0, j) * (1.0 - tv) + value(0, j + 1) * tv;
    }
    if (nus_.size() == 1) {
      const double tu = (r - ratios_[i]) / (ratios_[i + 1] - ratios_[i]);
      return value(i, 0) * (1.0 - tu) + value(i + 1, 0) * tu;
    }
    const double tu = (r - ratios_[i]) / (ratios_[i + 1] - ratios_[i]);
    const double tv = (n - nus_[j]) / (nus_[j + 1] - nus_[j]);
    return (value(i, j) * (1.0 - tu) + value(i + 1, j) * tu) * (1.0 - tv) +
           (value(i, j + 1) * (1.0 - tu) + value(i + 1, j + 1) * tu) * tv;
  };

  Lookup out;
  out.c1 = lerp2([&](std::size_t a, std::size_t b) { return c1_at(a, b); });
  out.f = lerp2([&](std::size_t a, std::size_t b) { return f_at(a, b); });
  out.nu_used = n;
  return out;
}

void CoefficientTable::save_csv(const std::string& path) const {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot open '" + path + "' for writing");
  if (!provenance_.empty()) out << "# provenance: " << provenance_ << "\n";
  out << "aspect_ratio,nu,c1,f\n";
  out.precision(17);
  for (const auto& e : entries_) {
    out << e.aspect_ratio << ',' << e.nu << ',' << e.c1 << ',' << e.f << '\n';
  }
  require(out.good(), ErrorCode::IoError, "write to '" + path + "' failed");
}

CoefficientTable CoefficientTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoError, "cannot open coefficient table '" + path + "'");

  std::vector<CoefficientEntry> entries;
  std::string provenance;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# provenance:", 0) == 0) {
      provenance = line.substr(13);
      if (!provenance.empty() && provenance.front() == ' ') provenance.erase(0, 1);
      continue;
    }
    if (line.front() == '#') continue;
    if (!header_seen) {
      require(line == "aspect_ratio,nu,c1,f", ErrorCode::ParseError,
              path + ":" + std::to_string(line_no) +
                  ": expected header 'aspect_ratio,nu,c1,f'");
      header_seen = true;
      continue;
    }
    CoefficientEntry e{};
    double* fields[4] = {&e.aspect_ratio, &e.nu, &e.c1, &e.f};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int k = 0; k < 4; ++k) {
      const auto [next, ec] = std::from_chars(p, end, *fields[k]);
      require(ec == std::errc{}, ErrorCode::ParseError,
              path + ":" + std::to_string(line_no) + ": malformed number");
      p = next;
      if (k < 3) {
        require(p < end && *p == ',', ErrorCode::ParseError,
                path + ":" + std::to_string(line_no) + ": expected 4 comma-separated fields");
        ++p;
      }
    }
    require(p == end, ErrorCode::ParseError,
            path + ":" + std::to_string(line_no) + ": trailing characters");
    entries.push_back(e);
  }
  require(header_seen, ErrorCode::ParseError, path + ": missing table header");
  return CoefficientTable(std::move(entries), std::move(provenance));
}

// ------------------------------------------------------------------
// Default table
// ------------------------------------------------------------------

std::string default_table_path() {
  if (const char* dir = std::getenv("BULGEKIT_DATA_DIR"); dir && *dir) {
    return (std::filesystem::path(dir) / "coefficient_table.csv").string();
  }
  const char* compiled = BULGEKIT_DEFAULT_DATA_DIR;
  if (*compiled) {
    return (std::filesystem::path(compiled) / "coefficient_table.csv").string();
  }
  return {};
}

const CoefficientTable* default_coefficient_table() {
  // Loaded once per process; the env var is read at first use.
  static const std::optional<CoefficientTable> table = []() -> std::optional<CoefficientTable> {
    const std::string path = default_table_path();
    if (path.empty() || !std::filesystem::exists(path)) return std::nullopt;
    return CoefficientTable::load_csv(path);
  }();
  return table ? &*table : nullptr;
}

// ------------------------------------------------------------------
// coefficients_for
// ------------------------------------------------------------------

namespace {

ShapeCoefficients from_table(double aspect_ratio, double nu,
                             const CoefficientTable* table) {
  if (table == nullptr) table = default_coefficient_table();
  require(table != nullptr, ErrorCode::UnsupportedRatio,
          "no closed-form coefficients at aspect ratio " + std::to_string(aspect_ratio) +
          " and no solver-derived table available (set BULGEKIT_DATA_DIR or "
          "generate one with the 'table' subcommand)");
  const auto hit = table->interpolate(aspect_ratio, nu);
  return ShapeCoefficients{hit.c1, hit.f, alpha_for(aspect_ratio),
                           CoefficientSource::SolverDerived, aspect_ratio, hit.nu_used};
}

}  // namespace

ShapeCoefficients coefficients_for(double aspect_ratio, double nu,
                                   CoefficientSource source,
                                   const CoefficientTable* table) {
  require(std::isfinite(aspect_ratio) && aspect_ratio >= 1.0,
          ErrorCode::InvalidArgument, "aspect ratio must be >= 1");
  require(std::isfinite(nu) && nu > -1.0 && nu < 0.5, ErrorCode::InvalidArgument,
          "nu must lie in (-1, 0.5)");

  const bool square = aspect_ratio <= kSquareRatioTolerance;
  switch (source) {
    case CoefficientSource::VlassakNix:
      if (square) {
        return {kC1SquareVlassakNix, f_square_vlassak_nix(nu), alpha_for(aspect_ratio),
                source, aspect_ratio, nu};
      }
      if (aspect_ratio >= kStripRatioThreshold) {
        return {kC1Strip, f_strip_vlassak_nix(nu), alpha_for(aspect_ratio),
                source, aspect_ratio, nu};
      }
      break;
    case CoefficientSource::MaierSchneider:
      if (square) {
        return {kC1SquareMaierSchneider, f_square_maier_schneider(nu),
                alpha_for(aspect_ratio), source, aspect_ratio, nu};
      }
      break;
    case CoefficientSource::Bonnotte:
      if (square) {
        return {kC1SquareBonnotte, f_square_bonnotte(nu), alpha_for(aspect_ratio),
                source, aspect_ratio, nu};
      }
      if (std::abs(aspect_ratio - 2.0) <= 2.0 * (kSquareRatioTolerance - 1.0)) {
        return {kC1Rect2Bonnotte, f_rect2_bonnotte(nu), alpha_for(aspect_ratio),
                source, aspect_ratio, nu};
      }
      break;
    case CoefficientSource::SolverDerived:
      break;
  }
  return from_table(aspect_ratio, nu, table);
}

}  // namespace bulge
