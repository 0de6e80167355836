#pragma once

// Machine-readable outputs: JSON records (nlohmann::json) and CSV tables.
// Numbers are written in shortest round-trip form, so identical runs give identical bytes.

#include <array>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "phi4/analysis.hpp"
#include "phi4/evolution.hpp"
#include "phi4/waves.hpp"

namespace phi4 {

using json = nlohmann::ordered_json;

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc{}) throw std::runtime_error("to_chars failed");
  return {buf.data(), res.ptr};
}

inline void write_csv_row(std::ostream& os, std::span<const double> row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) os << ',';
    os << format_double(row[i]);
  }
  os << '\n';
}

inline constexpr std::string_view kTraceHeader = "t,E,F,mean_phi,mean_phidot,orbit_distance";
inline constexpr std::string_view kProfileHeader = "x,h,h_x,h_xx";

inline void write_trace_csv(std::ostream& os, const EvolutionTrace& trace) {
  os << kTraceHeader << '\n';
  for (const TraceSample& s : trace.samples) {
    const std::array<double, 6> row{s.t, s.E, s.F, s.mean_phi, s.mean_phidot, s.orbit_distance};
    write_csv_row(os, row);
  }
}

inline void write_profile_csv(std::ostream& os, const WaveSamples& w) {
  os << kProfileHeader << '\n';
  for (std::size_t j = 0; j < w.h.size(); ++j) {
    const std::array<double, 4> row{w.h.x(j), w.h[j], w.dh[j], w.d2h[j]};
    write_csv_row(os, row);
  }
}

inline json to_json(const WaveParameters& p) {
  return json{{"L", p.period()},       {"c", p.speed()},     {"omega", p.omega()},
              {"k", p.modulus()},      {"a", p.amplitude()}, {"b", p.wavenumber()},
              {"K", p.K()},            {"E", p.E()},         {"dispersion_residual", p.dispersion_residual()}};
}

inline json to_json(const SpectralReport& r, bool with_eigenvalues = true) {
  json j{{"operator", to_string(r.kind)},
         {"dim", r.eigenvalues.size()},
         {"n", r.n},
         {"z", r.z},
         {"positive", r.positive},
         {"tau_zero", r.tau_zero},
         {"spectral_radius", r.spectral_radius},
         {"kernel_residual", r.kernel_residual}};
  if (with_eigenvalues) j["eigenvalues"] = r.eigenvalues;
  return j;
}

inline json to_json(const ConstrainedIndexData& d) {
  return json{{"D1", d.D1},
              {"Dmatrix", {{d.Dmatrix(0, 0), d.Dmatrix(0, 1)}, {d.Dmatrix(1, 0), d.Dmatrix(1, 1)}}},
              {"n0", d.n0},
              {"z0", d.z0}};
}

inline json to_json(const SpectrumAnalysis& a, bool with_eigenvalues = true) {
  json index = to_json(a.index.data);
  index["off_diagonal"] = a.index.off_diagonal;
  index["lower_right_error"] = a.index.lower_right_error;
  index["predicted"] = {{"L1_Pi", {{"n", a.predicted_L1_Pi.n}, {"z", a.predicted_L1_Pi.z}}},
                        {"L_Pi", {{"n", a.predicted_L_Pi.n}, {"z", a.predicted_L_Pi.z}}}};
  index["consistent"] = a.index_consistent;
  return json{{"parameters", to_json(a.wave)},
              {"N", a.grid_size},
              {"operators",
               {{"L1", to_json(a.L1, with_eigenvalues)},
                {"L", to_json(a.L, with_eigenvalues)},
                {"L1_Pi", to_json(a.L1_Pi, with_eigenvalues)},
                {"L_Pi", to_json(a.L_Pi, with_eigenvalues)}}},
              {"index", index},
              {"D1_closed", a.D1_closed},
              {"D1_numeric", a.D1_numeric},
              {"d2", a.d2},
              {"d2_half_step", a.d2_half},
              {"speed_step", a.speed_step},
              {"coercivity", a.coercivity},
              {"closed_form",
               {{"lambda0", a.lambda0}, {"lambda4", a.lambda4}, {"lambda4_ordinal", a.lambda4_ordinal}}},
              {"residuals",
               {{"kernel_L1", a.L1.kernel_residual},
                {"kernel_L", a.L.kernel_residual},
                {"kernel_L1_Pi", a.L1_Pi.kernel_residual},
                {"kernel_L_Pi", a.L_Pi.kernel_residual},
                {"lambda0_error", a.lambda0_error},
                {"f0_eigen", a.f0_residual},
                {"f4_eigen", a.f4_residual},
                {"inverse_of_one", a.inverse_one_residual},
                {"D1_orthogonality", a.D1_orthogonality},
                {"D1_solve", a.D1_solve_residual},
                {"D1_relative", std::abs(a.D1_numeric - a.D1_closed) / std::abs(a.D1_closed)}}}};
}

inline json to_json(const EvolutionTrace& tr, bool with_samples) {
  json j{{"epsilon", tr.epsilon},
         {"max_orbit_distance", tr.max_orbit_distance},
         {"stability_ratio", tr.stability_ratio},
         {"max_energy_drift", tr.max_energy_drift},
         {"max_momentum_drift", tr.max_momentum_drift},
         {"max_abs_mean", tr.max_abs_mean},
         {"apriori_margin", tr.apriori_margin},
         {"poincare_margin", tr.poincare_margin},
         {"samples_count", tr.samples.size()}};
  if (with_samples) {
    json rows = json::array();
    for (const TraceSample& s : tr.samples) {
      rows.push_back({{"t", s.t},
                      {"E", s.E},
                      {"F", s.F},
                      {"mean_phi", s.mean_phi},
                      {"mean_phidot", s.mean_phidot},
                      {"orbit_distance", s.orbit_distance}});
    }
    j["samples"] = std::move(rows);
  }
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace phi4
