#pragma once

// JSON chain configurations and JSON/CSV serialization of results.
//
// Chain document keys: L, t, U, V, boundary, N_up, N_down. V is either an
// explicit array or one of
//   {"impurities":   {"sites": [...], "V": v}}
//   {"superlattice": {"pattern": [a, alpha(, b, beta)], "V": v}}
// The structured forms may also appear as top-level keys.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hubbard/eigensolver.hpp"
#include "hubbard/entanglement.hpp"
#include "hubbard/lattice.hpp"
#include "hubbard/predictor.hpp"

namespace hubbard {

using json = nlohmann::json;

/// How the site potential is generated. Impurity and superlattice forms keep
/// their structure so a sweep can vary the strength V.
struct PotentialSpec {
  enum class Kind { explicit_values, impurities, superlattice };
  Kind kind = Kind::explicit_values;
  std::vector<double> values;  // explicit_values
  std::vector<int> sites;      // impurities
  std::vector<int> pattern;    // superlattice notation
  double strength = 0.0;

  [[nodiscard]] bool scalable() const noexcept { return kind != Kind::explicit_values; }

  [[nodiscard]] std::string label() const {
    switch (kind) {
      case Kind::impurities: {
        std::string s = "imp{";
        for (std::size_t k = 0; k < sites.size(); ++k) s += (k ? " " : "") + std::to_string(sites[k]);
        return s + "}";
      }
      case Kind::superlattice: return SuperlatticePattern::from_notation(pattern).label();
      default: return "explicit";
    }
  }
};

struct ChainConfig {
  int sites = 0;
  double t = 1.0;
  double U = 0.0;
  Boundary boundary = Boundary::periodic;
  int n_up = 0;
  int n_down = 0;
  PotentialSpec potential;

  /// Expanded, validated chain.
  [[nodiscard]] ChainSpec spec() const {
    ChainSpec s;
    switch (potential.kind) {
      case PotentialSpec::Kind::impurities:
        s = make_impurity_chain(sites, t, U, n_up, n_down, potential.sites, potential.strength, boundary);
        break;
      case PotentialSpec::Kind::superlattice:
        s = make_superlattice_chain(sites, t, U, n_up, n_down, SuperlatticePattern::from_notation(potential.pattern),
                                    potential.strength, boundary);
        break;
      default:
        s = ChainSpec{sites, t, U, potential.values, boundary, n_up, n_down};
        if (s.potential.empty()) s.potential.assign(static_cast<std::size_t>(std::max(sites, 0)), 0.0);
    }
    s.validate();
    return s;
  }

  [[nodiscard]] double strength() const {
    if (potential.scalable()) return potential.strength;
    double v = 0.0;
    for (double x : potential.values) v = std::max(v, x);
    return v;
  }
};

namespace detail {

template <class T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("config: missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

inline PotentialSpec parse_structured_potential(const json& j) {
  PotentialSpec p;
  if (j.contains("impurities")) {
    const json& imp = j.at("impurities");
    p.kind = PotentialSpec::Kind::impurities;
    p.sites = require<std::vector<int>>(imp, "sites");
    p.strength = require<double>(imp, "V");
  } else if (j.contains("superlattice")) {
    const json& sl = j.at("superlattice");
    p.kind = PotentialSpec::Kind::superlattice;
    p.pattern = require<std::vector<int>>(sl, "pattern");
    p.strength = require<double>(sl, "V");
  } else {
    throw ValidationError("config: potential object needs 'impurities' or 'superlattice'");
  }
  return p;
}

}  // namespace detail

[[nodiscard]] inline ChainConfig chain_config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  ChainConfig c;
  c.sites = detail::require<int>(j, "L");
  c.t = j.value("t", 1.0);
  c.U = detail::require<double>(j, "U");
  c.boundary = parse_boundary(j.value("boundary", std::string("periodic")));
  if (j.contains("N_up") || j.contains("N_down")) {
    c.n_up = detail::require<int>(j, "N_up");
    c.n_down = detail::require<int>(j, "N_down");
  } else {
    const int n = detail::require<int>(j, "N");
    if (n % 2 != 0) throw ValidationError("config: odd N needs explicit N_up and N_down");
    c.n_up = c.n_down = n / 2;
  }
  if (j.contains("V")) {
    const json& v = j.at("V");
    if (v.is_array()) {
      c.potential.values = detail::require<std::vector<double>>(j, "V");
    } else if (v.is_object()) {
      c.potential = detail::parse_structured_potential(v);
    } else {
      throw ValidationError("config: 'V' must be an array or an object");
    }
  } else if (j.contains("impurities") || j.contains("superlattice")) {
    c.potential = detail::parse_structured_potential(j);
  }
  (void)c.spec();  // validates
  return c;
}

[[nodiscard]] inline ChainConfig load_chain_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }
  return chain_config_from_json(j);
}

[[nodiscard]] inline json to_json(const ChainSpec& s) {
  return json{{"L", s.sites},  {"t", s.t},           {"U", s.U},           {"V", s.potential},
              {"boundary", to_string(s.boundary)}, {"N_up", s.n_up}, {"N_down", s.n_down}};
}

[[nodiscard]] inline ChainSpec chain_spec_from_json(const json& j) { return chain_config_from_json(j).spec(); }

[[nodiscard]] inline json to_json(const ChainConfig& c) {
  json j{{"L", c.sites}, {"t", c.t}, {"U", c.U}, {"boundary", to_string(c.boundary)}, {"N_up", c.n_up}, {"N_down", c.n_down}};
  switch (c.potential.kind) {
    case PotentialSpec::Kind::impurities:
      j["V"] = json{{"impurities", {{"sites", c.potential.sites}, {"V", c.potential.strength}}}};
      break;
    case PotentialSpec::Kind::superlattice:
      j["V"] = json{{"superlattice", {{"pattern", c.potential.pattern}, {"V", c.potential.strength}}}};
      break;
    default:
      j["V"] = c.potential.values;
  }
  return j;
}

/// JSON number, or null for non-finite values.
[[nodiscard]] inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

[[nodiscard]] inline json to_json(const GroundState& gs, bool include_vector = false) {
  json j{{"energy", gs.energy},        {"residual", gs.residual_norm}, {"gap", number(gs.gap)},
         {"iterations", gs.iterations}, {"degenerate", gs.degenerate},  {"exact", gs.exact},
         {"dimension", gs.vector.size()}};
  if (include_vector) j["vector"] = gs.vector;
  return j;
}

[[nodiscard]] inline json to_json(const SchmidtSpectrum& sp) {
  json out = json::array();
  for (const auto& [key, lambdas] : sp.sectors)
    out.push_back(json{{"n_up", key.first}, {"n_down", key.second}, {"lambda", lambdas}});
  return out;
}

[[nodiscard]] inline json to_json(const BlockReport& r) {
  return json{{"block_sites", r.block.sites},
              {"x", r.x},
              {"d", r.offset ? json(*r.offset) : json(nullptr)},
              {"S_bits", r.entropy},
              {"block_density", r.block_density},
              {"interface_density", r.interface_density},
              {"spectrum", to_json(r.spectrum)}};
}

[[nodiscard]] inline json to_json(const Prediction& p) {
  return json{{"verdict", to_string(p.verdict)}, {"n", p.filling}, {"n_eff", p.effective_filling}, {"rationale", p.rationale}};
}

[[nodiscard]] inline json to_json(const BlockScore& s) {
  return json{{"block_sites", s.block.sites},
              {"score", s.score},
              {"border_density", s.border_density},
              {"interface_density", s.interface_density},
              {"block_density", s.block_density}};
}

/// Fixed-precision number formatting for CSV output.
/// Quotes a CSV field when it holds a comma, quote or newline.
[[nodiscard]] inline std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string q = "\"";
  for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

[[nodiscard]] inline std::string fmt_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline constexpr const char* kBlockReportCsvHeader = "block_sites,x,d,S_bits,block_density,interface_density";

[[nodiscard]] inline std::string csv_row(const BlockReport& r) {
  return r.block.label() + "," + std::to_string(r.x) + "," + (r.offset ? std::to_string(*r.offset) : "") + "," +
         fmt_number(r.entropy) + "," + fmt_number(r.block_density) + "," + fmt_number(r.interface_density);
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << content;
}

}  // namespace hubbard
