#pragma once

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vardet/multipartite.hpp"
#include "vardet/state.hpp"
#include "vardet/upb.hpp"

namespace vardet {

/// Locale-independent decimal rendering with a fixed number of significant
/// digits (12 by default), byte-stable across runs.
inline std::string format_real(double value, int significant_digits = 12) {
  if (value == 0.0) return "0";  // normalize -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general,
                           significant_digits);
  return std::string(buf, res.ptr);
}

struct StateFile {
  DensityMatrix state;
  std::string label;
};

/// Serializes a state to the JSON document consumed by the CLI:
/// {"label": ..., "dims": [...], "matrix": [[[re, im], ...], ...]} with
/// row-major entries at 12 significant digits.
inline std::string write_state_text(const DensityMatrix& rho, std::string_view label = "") {
  std::ostringstream out;
  out << "{\n";
  if (!label.empty()) {
    out << "  \"label\": " << nlohmann::json(std::string(label)).dump() << ",\n";
  }
  out << "  \"dims\": [";
  for (std::size_t k = 0; k < rho.dims().count(); ++k) {
    if (k) out << ", ";
    out << rho.dims().dim(k);
  }
  out << "],\n  \"matrix\": [\n";
  for (int r = 0; r < rho.side(); ++r) {
    out << "    [";
    for (int c = 0; c < rho.side(); ++c) {
      if (c) out << ", ";
      out << '[' << format_real(rho.matrix()(r, c).real()) << ", "
          << format_real(rho.matrix()(r, c).imag()) << ']';
    }
    out << (r + 1 < rho.side() ? "],\n" : "]\n");
  }
  out << "  ]\n}\n";
  return out.str();
}

inline void write_state_file(const std::filesystem::path& path, const DensityMatrix& rho,
                             std::string_view label = "") {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  f << write_state_text(rho, label);
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

inline StateFile read_state_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("state file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("dims") || !doc.contains("matrix")) {
    throw std::runtime_error("state file: expected an object with \"dims\" and \"matrix\"");
  }
  std::vector<int> dims;
  if (!doc["dims"].is_array() || doc["dims"].empty()) {
    throw std::runtime_error("state file: \"dims\" must be a non-empty integer array");
  }
  for (const auto& d : doc["dims"]) {
    if (!d.is_number_integer()) {
      throw std::runtime_error("state file: \"dims\" must contain integers");
    }
    dims.push_back(d.get<int>());
  }
  DimensionSpec spec = [&] {
    try {
      return DimensionSpec(dims);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(std::string("state file: ") + e.what());
    }
  }();
  const auto& rows = doc["matrix"];
  if (!rows.is_array() || static_cast<int>(rows.size()) != spec.total()) {
    throw std::runtime_error("state file: \"matrix\" must have " + std::to_string(spec.total()) +
                             " rows, got " + std::to_string(rows.size()));
  }
  Matrix m(spec.total(), spec.total());
  for (int r = 0; r < spec.total(); ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || static_cast<int>(row.size()) != spec.total()) {
      throw std::runtime_error("state file: matrix row " + std::to_string(r) + " must have " +
                               std::to_string(spec.total()) + " entries");
    }
    for (int c = 0; c < spec.total(); ++c) {
      const auto& entry = row[c];
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
          !entry[1].is_number()) {
        throw std::runtime_error("state file: matrix entry at row " + std::to_string(r) +
                                 ", column " + std::to_string(c) +
                                 ": expected a [real, imaginary] pair");
      }
      m(r, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
    }
  }
  std::string label = doc.value("label", "");
  try {
    return StateFile{DensityMatrix(std::move(m), spec), label};
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("state file: invariant violated: ") + e.what());
  }
}

inline StateFile read_state_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open state file: " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return read_state_text(buf.str());
}

// --- built-in fixtures ------------------------------------------------------------

namespace detail {

inline double parse_param(const std::string& args, const std::string& key) {
  auto pos = args.find(key + "=");
  if (pos == std::string::npos) {
    throw std::runtime_error("fixture: missing parameter \"" + key + "\"");
  }
  std::string rest = args.substr(pos + key.size() + 1);
  auto comma = rest.find(',');
  if (comma != std::string::npos) rest = rest.substr(0, comma);
  try {
    std::size_t used = 0;
    double v = std::stod(rest, &used);
    if (used == 0) throw std::invalid_argument("empty");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("fixture: cannot parse parameter \"" + key + "\" from \"" + rest +
                             "\"");
  }
}

inline DimensionSpec parse_dims_param(const std::string& args) {
  auto pos = args.find("dims=");
  if (pos == std::string::npos) throw std::runtime_error("fixture: missing parameter \"dims\"");
  std::string rest = args.substr(pos + 5);
  std::vector<int> dims;
  std::size_t start = 0;
  while (start <= rest.size()) {
    auto x = rest.find('x', start);
    std::string tok = rest.substr(start, x == std::string::npos ? std::string::npos : x - start);
    if (tok.empty()) break;
    dims.push_back(std::stoi(tok));
    if (x == std::string::npos) break;
    start = x + 1;
  }
  if (dims.empty()) throw std::runtime_error("fixture: cannot parse \"dims\"");
  return DimensionSpec(dims);
}

}  // namespace detail

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {
      "bell",     "bell:a=A",    "singlet",   "ghz3",
      "ghz3:p=P", "ghz4",        "ghz4:p=P",  "werner2:p=P",
      "tiles-upb", "max-mixed:dims=DxD"};
  return names;
}

/// Builds a named fixture state, e.g. "bell", "bell:a=0.9", "werner2:p=0.5",
/// "ghz3:p=0.7", "tiles-upb", "max-mixed:dims=2x2".
inline StateFile make_fixture(const std::string& spec) {
  std::string name = spec;
  std::string args;
  if (auto colon = spec.find(':'); colon != std::string::npos) {
    name = spec.substr(0, colon);
    args = spec.substr(colon + 1);
  }
  if (name == "bell") {
    if (args.empty()) return {DensityMatrix::pure(bell_phi_plus()), "bell"};
    double a = detail::parse_param(args, "a");
    detail::require(a >= 1.0 / std::sqrt(2.0) - 1e-12 && a <= 1.0, "fixture bell: need 1/sqrt(2) <= a <= 1");
    double b = std::sqrt(std::max(0.0, 1.0 - a * a));
    return {DensityMatrix::pure(schmidt_pair_ket(a, b)), spec};
  }
  if (name == "singlet") return {DensityMatrix::pure(singlet_ket()), "singlet"};
  if (name == "ghz3") {
    if (args.empty()) return {DensityMatrix::pure(ghz_ket(3)), "ghz3"};
    return {ghz3_isotropic_state(detail::parse_param(args, "p")), spec};
  }
  if (name == "ghz4") {
    if (args.empty()) return {DensityMatrix::pure(ghz_ket(4)), "ghz4"};
    return {ghz4_isotropic_state(detail::parse_param(args, "p")), spec};
  }
  if (name == "werner2") {
    return {singlet_werner_state(detail::parse_param(args, "p")), spec};
  }
  if (name == "tiles-upb") return {upb_state(tiles_upb()), "tiles-upb"};
  if (name == "max-mixed") {
    return {DensityMatrix::maximally_mixed(detail::parse_dims_param(args)), spec};
  }
  std::string known;
  for (const std::string& n : fixture_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::runtime_error("unknown fixture: " + spec + " (known: " + known + ")");
}

}  // namespace vardet
