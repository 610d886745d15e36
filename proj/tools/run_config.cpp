#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

namespace ellqg::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\n");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string& text, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(field + ": cannot parse number '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw ConfigError(field + ": cannot parse number '" + text + "'");
  return v;
}

bool parse_fraction(const std::string& text, long& num, long& den) {
  static const std::regex frac(R"(^\s*([+-]?\d+)\s*/\s*(\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, frac)) return false;
  num = std::stol(m[1]);
  den = std::stol(m[2]);
  return true;
}

}  // namespace

cplx parse_complex(const std::string& raw, const std::string& field) {
  const std::string text = trim(raw);
  if (text.empty()) throw ConfigError(field + ": empty value");
  long num = 0;
  long den = 0;
  if (parse_fraction(text, num, den)) {
    if (den == 0) throw ConfigError(field + ": zero denominator");
    return {static_cast<double>(num) / static_cast<double>(den), 0.0};
  }
  if (text.back() != 'i' && text.back() != 'j') return {parse_real(text, field), 0.0};
  const std::string body = text.substr(0, text.size() - 1);
  // split at the last sign that is not part of an exponent
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_part = [&](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_real(s, field);
  };
  if (split == std::string::npos) return {0.0, imag_part(body)};
  return {parse_real(body.substr(0, split), field), imag_part(body.substr(split))};
}

cplx complex_from_json(const json& value, const std::string& field) {
  if (value.is_number()) return {value.get<double>(), 0.0};
  if (value.is_string()) return parse_complex(value.get<std::string>(), field);
  if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
    return {value[0].get<double>(), value[1].get<double>()};
  }
  throw ConfigError(field + ": expected a number, a [re, im] pair or a string");
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json complex_list_to_json(const std::vector<cplx>& zs) {
  json out = json::array();
  for (const cplx& z : zs) out.push_back(complex_to_json(z));
  return out;
}

std::vector<cplx> parse_complex_list(const std::string& text, const std::string& field) {
  std::vector<cplx> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_complex(item, field));
  if (out.empty()) throw ConfigError(field + ": empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& field) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const double v = parse_real(trim(item), field);
    if (v != std::round(v)) throw ConfigError(field + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw ConfigError(field + ": empty list");
  return out;
}

std::vector<cplx> ContinuationPath::points() const {
  std::vector<cplx> out;
  if (steps < 1) return out;
  for (int k = 0; k < steps; ++k) {
    const double frac = steps == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(steps - 1);
    out.push_back(start + frac * (end - start));
  }
  return out;
}

ModularParams RunConfig::params() const {
  if (!(tau.imag() > 0.0)) {
    std::ostringstream msg;
    msg << "tau: Im(tau) must be positive, got " << tau.imag();
    throw ConfigError(msg.str());
  }
  if (std::abs(eta) == 0.0) throw ConfigError("eta: must be nonzero");
  try {
    return ModularParams(tau, eta);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

double RunConfig::tolerance(const std::string& name, double fallback) const {
  const auto it = tol.find(name);
  return it == tol.end() ? fallback : it->second;
}

json RunConfig::resolved() const {
  json j;
  j["tau"] = complex_to_json(tau);
  j["eta"] = complex_to_json(eta);
  if (eta_rational) j["eta_fraction"] = std::to_string(eta_rational->num) + "/" + std::to_string(eta_rational->den);
  j["seed"] = seed;
  json tols = json::object();
  for (const auto& [k, v] : tol) tols[k] = v;
  j["tol"] = tols;
  if (!z.empty()) j["z"] = complex_list_to_json(z);
  if (!lambda_weights.empty()) j["Lambda"] = lambda_weights;
  if (m) j["m"] = *m;
  j["c"] = complex_to_json(c);
  if (!t0.empty()) j["t0"] = complex_list_to_json(t0);
  if (!t.empty()) j["t"] = complex_list_to_json(t);
  if (mu) j["mu"] = complex_to_json(*mu);
  if (c_path) {
    j["c_path"] = {{"start", complex_to_json(c_path->start)},
                   {"end", complex_to_json(c_path->end)},
                   {"steps", c_path->steps}};
  }
  if (eight_vertex) j["eight_vertex"] = true;
  if (classical_limit) j["classical_limit"] = true;
  if (!steps.empty()) {
    j["start_level"] = start_level;
    j["steps"] = steps;
  }
  if (z_eval) j["z_eval"] = complex_to_json(*z_eval);
  if (samples > 0) j["samples"] = samples;
  return j;
}

void set_eta(RunConfig& cfg, const std::string& text) {
  long num = 0;
  long den = 0;
  if (parse_fraction(text, num, den)) {
    try {
      cfg.eta_rational = make_rational_eta(num, den);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    cfg.eta = {cfg.eta_rational->value(), 0.0};
    return;
  }
  cfg.eta = parse_complex(text, "eta");
  cfg.eta_rational.reset();
}

std::pair<std::string, double> parse_tol(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("tol: expected name=value, got '" + text + "'");
  const std::string name = trim(text.substr(0, eq));
  const double v = parse_real(trim(text.substr(eq + 1)), "tol." + name);
  if (!(v > 0.0)) throw ConfigError("tol." + name + ": must be positive");
  return {name, v};
}

void apply_json(RunConfig& cfg, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "tau") {
      cfg.tau = complex_from_json(value, "tau");
    } else if (key == "eta") {
      if (value.is_string()) {
        set_eta(cfg, value.get<std::string>());
      } else {
        cfg.eta = complex_from_json(value, "eta");
        cfg.eta_rational.reset();
      }
    } else if (key == "seed") {
      if (!value.is_number_integer() || value.get<long long>() < 0) throw ConfigError("seed: expected a non-negative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "tol") {
      if (!value.is_object()) throw ConfigError("tol: expected an object of name: value");
      for (const auto& [name, v] : value.items()) {
        if (!v.is_number() || !(v.get<double>() > 0.0)) throw ConfigError("tol." + name + ": must be a positive number");
        cfg.tol[name] = v.get<double>();
      }
    } else if (key == "out") {
      cfg.out = value.get<std::string>();
    } else if (key == "csv") {
      cfg.csv = value.get<std::string>();
    } else if (key == "z" || key == "t0" || key == "t") {
      if (!value.is_array()) throw ConfigError(key + ": expected an array");
      std::vector<cplx> list;
      for (const auto& item : value) list.push_back(complex_from_json(item, key));
      (key == "z" ? cfg.z : key == "t0" ? cfg.t0 : cfg.t) = std::move(list);
    } else if (key == "Lambda") {
      if (!value.is_array()) throw ConfigError("Lambda: expected an array of integers");
      cfg.lambda_weights.clear();
      for (const auto& item : value) {
        if (!item.is_number_integer()) throw ConfigError("Lambda: expected integers");
        cfg.lambda_weights.push_back(item.get<int>());
      }
    } else if (key == "m") {
      if (!value.is_number_integer()) throw ConfigError("m: expected an integer");
      cfg.m = value.get<int>();
    } else if (key == "c") {
      cfg.c = complex_from_json(value, "c");
    } else if (key == "mu") {
      cfg.mu = complex_from_json(value, "mu");
    } else if (key == "c_path") {
      if (!value.is_object() || !value.contains("start") || !value.contains("end") || !value.contains("steps")) {
        throw ConfigError("c_path: expected {start, end, steps}");
      }
      ContinuationPath path{complex_from_json(value["start"], "c_path.start"),
                            complex_from_json(value["end"], "c_path.end"), value["steps"].get<int>()};
      if (path.steps < 1) throw ConfigError("c_path.steps: must be positive");
      cfg.c_path = path;
    } else if (key == "eight_vertex") {
      cfg.eight_vertex = value.get<bool>();
    } else if (key == "classical_limit") {
      cfg.classical_limit = value.get<bool>();
    } else if (key == "start_level") {
      cfg.start_level = value.get<long>();
    } else if (key == "steps") {
      cfg.steps = value.get<std::vector<int>>();
    } else if (key == "z_eval") {
      cfg.z_eval = complex_from_json(value, "z_eval");
    } else if (key == "samples") {
      cfg.samples = value.get<int>();
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  try {
    apply_json(cfg, doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

}  // namespace ellqg::cli
