#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ellqg/lattice.hpp"
#include "ellqg/theta.hpp"

namespace ellqg::cli {

using json = nlohmann::ordered_json;

/// Invalid or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Accepts "0.3", "-1e-2", "0.9i", "0.4+0.8i", "i", "-0.2-0.1i" and, for real values, "p/q".
cplx parse_complex(const std::string& text, const std::string& field);
/// A JSON number, a [re, im] pair or a string accepted by parse_complex.
cplx complex_from_json(const json& value, const std::string& field);
json complex_to_json(cplx z);
json complex_list_to_json(const std::vector<cplx>& zs);
/// Comma-separated list of complex numbers.
std::vector<cplx> parse_complex_list(const std::string& text, const std::string& field);
std::vector<int> parse_int_list(const std::string& text, const std::string& field);

struct ContinuationPath {
  cplx start;
  cplx end;
  int steps = 0;

  std::vector<cplx> points() const;
};

struct RunConfig {
  cplx tau{0.0, 0.9};
  cplx eta{0.11, 0.0};
  std::optional<RationalEta> eta_rational;
  std::uint64_t seed = 42;
  std::map<std::string, double> tol;
  std::string out;
  std::string csv;

  std::vector<cplx> z;
  std::vector<int> lambda_weights;
  std::optional<int> m;
  cplx c{0.0, 0.0};
  std::vector<cplx> t0;
  std::vector<cplx> t;  // q-Lame m = 1: roots for the closed-form exponent
  std::optional<cplx> mu;
  std::optional<ContinuationPath> c_path;
  bool eight_vertex = false;
  bool classical_limit = false;
  long start_level = 0;
  std::vector<int> steps;
  std::optional<cplx> z_eval;
  int samples = 0;  // command-specific sample count; 0 selects the default

  /// ModularParams for (tau, eta); throws ConfigError naming the field on failure.
  ModularParams params() const;
  double tolerance(const std::string& name, double fallback) const;
  json resolved() const;
};

/// Sets eta (and the exact fraction when given as "p/q").
void set_eta(RunConfig& cfg, const std::string& text);

/// Merges a JSON config object into cfg; unknown keys are rejected.
void apply_json(RunConfig& cfg, const json& doc);
void load_config_file(RunConfig& cfg, const std::string& path);

/// "name=value" with a positive finite value.
std::pair<std::string, double> parse_tol(const std::string& text);

}  // namespace ellqg::cli
