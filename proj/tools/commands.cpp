#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "ellqg/bethe.hpp"
#include "ellqg/chain.hpp"
#include "ellqg/errors.hpp"
#include "ellqg/exchange.hpp"
#include "ellqg/lattice.hpp"
#include "ellqg/qlame.hpp"
#include "ellqg/rmatrix.hpp"
#include "ellqg/sweep.hpp"
#include "ellqg/theta.hpp"

namespace ellqg::cli {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json report_header(const std::string& command, const RunConfig& cfg) {
  json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["generated_at"] = utc_timestamp();
  j["params"] = cfg.resolved();
  return j;
}

json trace_json(const std::vector<double>& trace) {
  json out = json::array();
  for (double r : trace) out.push_back(r);
  return out;
}

// Deterministic per-purpose streams derived from the run seed.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t salt) { return seed * 0x9E3779B97F4A7C15ULL + salt; }

std::vector<cplx> draw_points(std::uint64_t seed, std::size_t count, const ModularParams& p) {
  std::vector<cplx> out;
  for (const auto& tuple : draw_tuples(seed, count, 1, p)) out.push_back(tuple[0]);
  return out;
}

// --- check suites --------------------------------------------------------------

struct Suite {
  std::string name;
  std::size_t count = 0;
  std::size_t errors = 0;
  double value = 0.0;  // max residual, or min residual for kind "min"
  double tol = 0.0;
  bool want_min = false;
  std::string first_error;

  bool pass() const { return errors == 0 && (want_min ? value > tol : value < tol); }

  json to_json() const {
    json j;
    j["name"] = name;
    j["count"] = count;
    j["errors"] = errors;
    j[want_min ? "min_residual" : "max_residual"] = value;
    j["tol"] = tol;
    j["kind"] = want_min ? "min" : "max";
    j["pass"] = pass();
    if (!first_error.empty()) j["first_error"] = first_error;
    return j;
  }
};

Suite from_sweep(const std::string& name, const SweepStats& stats, double tol) {
  Suite s;
  s.name = name;
  s.count = stats.count;
  s.errors = stats.errors;
  s.value = stats.max_residual;
  s.tol = tol;
  s.first_error = stats.first_error;
  return s;
}

// Runs a list of scalar residual evaluations through the sweep machinery.
Suite run_cases(const std::string& name, std::size_t count, const std::function<double(std::size_t)>& eval,
                double tol) {
  std::vector<std::vector<cplx>> index(count);
  for (std::size_t k = 0; k < count; ++k) index[k] = {cplx(static_cast<double>(k), 0.0)};
  const SweepStats stats =
      run_sweep(index, [&](const std::vector<cplx>& x) { return eval(static_cast<std::size_t>(x[0].real())); });
  return from_sweep(name, stats, tol);
}

double theta_identity_residual(cplx z, const ModularParams& p) {
  const cplx th = theta(z, p);
  const cplx tau = p.tau();
  double r = std::abs(theta(-z, p) + th);
  r = std::max(r, std::abs(theta(z + 1.0, p) + th));
  r = std::max(r, std::abs(theta(z + tau, p) + std::exp(cplx(0.0, -kPi) * (tau + 2.0 * z)) * th));
  const cplx constant = p.char_product_constant();
  r = std::max(r, std::abs(theta_char(0, z, p) * theta_char(1, z, p) - constant * th) / std::abs(constant));
  return r;
}

// Richardson-extrapolated central difference against the analytic first derivative.
double theta_derivative_residual(cplx z, const ModularParams& p) {
  const double h = 1e-3;
  auto central = [&](double step) { return (theta(z + step, p) - theta(z - step, p)) / (2.0 * step); };
  const cplx estimate = (4.0 * central(h / 2.0) - central(h)) / 3.0;
  return std::abs(estimate - theta_deriv(z, 1, p)) / std::max(1.0, std::abs(estimate));
}

Vector probe_function(cplx lambda, std::size_t dim, const ModularParams& p) {
  Vector f(static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < dim; ++k) {
    const double shift = 0.137 * static_cast<double>(k + 1);
    f[static_cast<Eigen::Index>(k)] = std::exp(cplx(0.3, 0.1 * static_cast<double>(k)) * lambda) *
                                      theta(lambda + shift, p);
  }
  return f;
}

std::vector<cplx> chain_points(const RunConfig& cfg) {
  if (!cfg.z.empty()) return cfg.z;
  return {0.0, 0.4};
}

std::vector<Suite> run_check_suites(const RunConfig& cfg, const ModularParams& p) {
  std::vector<Suite> suites;
  const std::uint64_t seed = cfg.seed;

  const auto singles = draw_tuples(sub_seed(seed, 1), 100, 1, p);
  suites.push_back(from_sweep("theta_identities",
                              run_sweep(singles, [&](const auto& x) { return theta_identity_residual(x[0], p); }),
                              cfg.tolerance("theta_identities", 1e-12)));
  suites.push_back(from_sweep("theta_derivative",
                              run_sweep(singles, [&](const auto& x) { return theta_derivative_residual(x[0], p); }),
                              cfg.tolerance("theta_derivative", 1e-8)));

  const auto triples = draw_tuples(sub_seed(seed, 2), 50, 3, p);
  suites.push_back(from_sweep("dybe",
                              run_sweep(triples, [&](const auto& x) { return dybe_residual(x[0], x[1], x[2], p); }),
                              cfg.tolerance("dybe", 1e-10)));
  {
    const SweepStats mutated = run_sweep(
        triples, [&](const auto& x) { return dybe_residual(x[0], x[1], x[2], p, ShiftSign::plus); });
    Suite s = from_sweep("dybe_mutation", mutated, cfg.tolerance("dybe_mutation", 1e-2));
    s.want_min = true;
    s.value = std::numeric_limits<double>::infinity();
    for (double r : mutated.residuals) {
      if (!std::isnan(r)) s.value = std::min(s.value, r);
    }
    suites.push_back(s);
  }

  {
    std::mt19937_64 rng(sub_seed(seed, 3));
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    const cplx mu = cplx(unit(rng), 0.0) + 0.3 * unit(rng) * p.tau();
    const auto hexagons = enumerate_hexagons(mu, 4);
    const auto pairs = draw_tuples(sub_seed(seed, 4), 10, 2, p);
    std::vector<std::vector<cplx>> jobs;
    for (std::size_t h = 0; h < hexagons.size(); ++h) {
      for (const auto& zw : pairs) jobs.push_back({cplx(static_cast<double>(h), 0.0), zw[0], zw[1]});
    }
    suites.push_back(from_sweep("star_triangle", run_sweep(jobs, [&](const auto& x) {
                                  const Hexagon& hx = hexagons[static_cast<std::size_t>(x[0].real())];
                                  return star_triangle_residual(hx[0], hx[1], hx[2], hx[3], hx[4], hx[5], x[1], x[2], p);
                                }),
                                cfg.tolerance("star_triangle", 1e-10)));
  }

  const FundamentalChain chain(chain_points(cfg), p);
  const auto rll_draws = draw_tuples(sub_seed(seed, 5), 20, 3, p);
  suites.push_back(from_sweep(
      "rll", run_sweep(rll_draws, [&](const auto& x) { return rll_residual(chain, x[0], x[1], x[2]); }),
      cfg.tolerance("rll", 1e-10)));

  {
    std::vector<cplx> p_points;
    std::vector<cplx> q_points;
    for (const cplx& zk : chain.z_points()) {
      p_points.push_back(zk);
      q_points.push_back(zk + 2.0 * p.eta());
    }
    const auto pairs = draw_tuples(sub_seed(seed, 6), 20, 2, p);
    suites.push_back(from_sweep("highest_weight", run_sweep(pairs, [&](const auto& x) {
                                  const OperatorBlocks blocks = abcd_blocks(chain, x[0], x[1]);
                                  Vector top = Vector::Zero(static_cast<Eigen::Index>(chain.dim()));
                                  top[0] = 1.0;
                                  const cplx expected_d =
                                      highest_weight_d(x[0], x[1], chain.size(), p_points, q_points, p);
                                  double r = (blocks.a.entries * top - top).norm();
                                  r = std::max(r, (blocks.d.entries * top - expected_d * top).norm() /
                                                      std::max(1.0, std::abs(expected_d)));
                                  r = std::max(r, (blocks.c.entries * top).norm());
                                  return r;
                                }),
                                cfg.tolerance("highest_weight", 1e-10)));
  }

  {
    const auto draws = draw_tuples(sub_seed(seed, 7), 10, 3, p);
    const std::size_t dim = chain.dim();
    auto probe = [&](cplx l) { return probe_function(l, dim, p); };
    suites.push_back(from_sweep("commutation", run_sweep(draws, [&](const auto& x) {
                                  const CommutationResiduals r = commutation_residual(chain, x[0], x[1], x[2], probe);
                                  const double scale = std::max(1.0, probe(x[2]).norm());
                                  return std::max(r.ab, r.db) / scale;
                                }),
                                cfg.tolerance("commutation", 1e-10)));
  }

  {
    const auto draws = draw_tuples(sub_seed(seed, 8), 20, 4, p);
    suites.push_back(from_sweep("exchange", run_sweep(draws, [&](const auto& x) {
                                  const std::vector<cplx> t{x[1], x[2]};
                                  const auto a = collect_exchange(exchange_expand(Diagonal::a, x[0], t, x[3], 4, p), 2);
                                  const auto d = collect_exchange(exchange_expand(Diagonal::d, x[0], t, x[3], 4, p), 2);
                                  auto rel = [](cplx got, cplx want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); };
                                  double r = rel(a.wanted, wanted_a(x[0], t, x[3], p));
                                  r = std::max(r, rel(a.unwanted[0], first_unwanted_a(x[0], t, x[3], p)));
                                  r = std::max(r, rel(d.wanted, wanted_d(x[0], t, x[3], p)));
                                  r = std::max(r, rel(d.unwanted[0], first_unwanted_d(x[0], t, x[3], p)));
                                  return r;
                                }),
                                cfg.tolerance("exchange", 1e-10)));
  }

  {
    Suite s;
    s.name = "bethe_pipeline";
    s.tol = cfg.tolerance("bethe_pipeline", 1e-9);
    try {
      const BetheProblem prob = BetheProblem::fundamental({0.0, 0.4}, 0.0, p);
      const BetheSolution sol = bae_solve(prob, {cplx(0.2, 0.1)});
      const auto draws = draw_tuples(sub_seed(seed, 9), 10, 2, p);
      const SweepStats stats = run_sweep(draws, [&](const auto& x) {
        const Vector closed = to_chain_vector(bethe_vector_closed(prob, sol, x[1]));
        const Vector oracle = bethe_vector_oracle(prob, sol.t, sol.c, x[1]);
        const double vec = (closed - oracle).norm() / std::max(1e-300, oracle.norm());
        return std::max({sol.residual, vec, eigen_relation_residual(prob, sol, x[0], x[1])});
      });
      s = from_sweep("bethe_pipeline", stats, s.tol);
    } catch (const std::exception& e) {
      s.errors = 1;
      s.first_error = e.what();
    }
    suites.push_back(s);
  }

  {
    Suite s;
    s.name = "qlame";
    s.tol = cfg.tolerance("qlame", 1e-10);
    try {
      const QLameProblem prob(1, p);
      const SpectralPoint point = qlame_closed_form_point(prob, cplx(0.5, 0.0) + p.eta() + cplx(0.05, 0.07));
      const auto lambdas = draw_tuples(sub_seed(seed, 10), 20, 1, p);
      s = from_sweep("qlame", run_sweep(lambdas, [&](const auto& x) {
                       return std::max(point.residual, qlame_eigen_residual(prob, point, x[0]));
                     }),
                     s.tol);
    } catch (const std::exception& e) {
      s.errors = 1;
      s.first_error = e.what();
    }
    suites.push_back(s);
  }

  const auto vi_draws = draw_tuples(sub_seed(seed, 11), 50, 3, p);
  suites.push_back(from_sweep("vertex_irf", run_sweep(vi_draws, [&](const auto& x) {
                                const LemmaResiduals lemma = vertex_irf_lemma_residuals(x[0], x[1], x[2], p);
                                return std::max({vertex_irf_residual(x[0], x[1], x[2], p), lemma.same_sign,
                                                 lemma.mixed_sign});
                              }),
                              cfg.tolerance("vertex_irf", 1e-10)));

  {
    const EightVertexChain chain8(chain_points(cfg), p);
    const auto draws = draw_tuples(sub_seed(seed, 12), 10, 2, p);
    suites.push_back(from_sweep(
        "intertwining",
        run_sweep(draws, [&](const auto& x) { return t8v_intertwine_residual(chain8, x[0], x[1]); }),
        cfg.tolerance("intertwining", 1e-9)));
  }

  if (chain.size() % 2 == 0) {
    std::vector<int> steps;
    for (int k = 0; k < chain.size(); ++k) steps.push_back(k < chain.size() / 2 ? 1 : -1);
    const PathState start = PathState::from_steps(Height{0, cplx(0.05, 0.03)}, steps);
    const auto draws = draw_tuples(sub_seed(seed, 13), 10, 1, p);
    suites.push_back(from_sweep(
        "irf_operator", run_sweep(draws, [&](const auto& x) { return irf_operator_residual(start, x[0], chain); }),
        cfg.tolerance("irf_operator", 1e-10)));
  }
  return suites;
}

// --- helpers shared by the solvers ---------------------------------------------

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions opts;
  opts.tol = cfg.tolerance("newton", opts.tol);
  return opts;
}

std::vector<int> resolved_weights(const RunConfig& cfg, std::size_t n) {
  if (!cfg.lambda_weights.empty()) return cfg.lambda_weights;
  return std::vector<int>(n, 1);
}

json eight_vertex_record(const BetheProblem& prob, const BetheSolution& sol, const RunConfig& cfg,
                         const ModularParams& p, double tol, bool& ok) {
  if (!cfg.eta_rational) throw ConfigError("eta: the eight-vertex record needs a rational eta given as \"p/q\"");
  if (!prob.is_fundamental()) throw ConfigError("Lambda: the eight-vertex record needs weight-one factors");
  std::mt19937_64 rng(sub_seed(cfg.seed, 21));
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  const cplx mu = cfg.mu ? *cfg.mu : cplx(unit(rng), 0.0) + 0.3 * unit(rng) * p.tau();
  const int samples = cfg.samples > 0 ? cfg.samples : 5;
  const std::vector<cplx> zs = draw_points(sub_seed(cfg.seed, 22), static_cast<std::size_t>(samples), p);
  const EightVertexEigen eig = t8v_bethe_eigenvector(prob, *cfg.eta_rational, sol, mu, zs, sub_seed(cfg.seed, 23));
  json j;
  j["n"] = prob.n();
  j["q"] = cfg.eta_rational->den;
  j["p"] = cfg.eta_rational->num;
  j["mu"] = complex_to_json(eig.mu);
  j["attempts"] = eig.attempts;
  j["z"] = complex_list_to_json(eig.z_samples);
  j["eigenvalue"] = complex_list_to_json(eig.t8v_eigenvalues);
  j["bethe_eigenvalue"] = complex_list_to_json(eig.bethe_eigenvalues);
  j["residuals"] = trace_json(eig.residuals);
  j["residual"] = eig.max_residual();
  double mismatch = 0.0;
  for (std::size_t k = 0; k < eig.t8v_eigenvalues.size(); ++k) {
    mismatch = std::max(mismatch, std::abs(eig.t8v_eigenvalues[k] - eig.bethe_eigenvalues[k]) /
                                      std::max(1.0, std::abs(eig.bethe_eigenvalues[k])));
  }
  j["eigenvalue_mismatch"] = mismatch;
  j["tol"] = tol;
  j["vector"] = complex_list_to_json(std::vector<cplx>(eig.vector.data(), eig.vector.data() + eig.vector.size()));
  ok = eig.max_residual() < tol && mismatch < tol;
  j["pass"] = ok;
  return j;
}

json spectral_json(const SpectralPoint& pt, const ModularParams& p) {
  json j;
  j["m"] = pt.m;
  j["tau"] = complex_to_json(p.tau());
  j["eta"] = complex_to_json(p.eta());
  j["t"] = complex_list_to_json(pt.t);
  j["c"] = complex_to_json(pt.c);
  j["eps"] = complex_to_json(pt.eps);
  j["residual"] = pt.residual;
  return j;
}

std::vector<cplx> default_qlame_start(int m, const ModularParams& p) {
  switch (m) {
    case 1:
      return {cplx(0.5, 0.0) + p.eta() + cplx(0.02, 0.03)};
    case 2:
      return {cplx(0.25, 0.1), cplx(0.55, -0.05)};
    case 3:
      return {cplx(0.3, 0.25), cplx(0.6, -0.15), cplx(0.85, 0.05)};
    default:
      return {};
  }
}

double max_eigen_residual(const QLameProblem& prob, const SpectralPoint& pt, const std::vector<cplx>& lambdas) {
  double worst = pt.residual;
  for (const cplx& l : lambdas) worst = std::max(worst, qlame_eigen_residual(prob, pt, l));
  return worst;
}

}  // namespace

// --- commands ------------------------------------------------------------------

CommandResult cmd_check(const RunConfig& cfg) {
  const ModularParams p = cfg.params();
  CommandResult result;
  result.report = report_header("check", cfg);
  json list = json::array();
  bool all = true;
  for (const Suite& s : run_check_suites(cfg, p)) {
    list.push_back(s.to_json());
    all = all && s.pass();
  }
  result.report["suites"] = list;
  result.report["pass"] = all;
  result.exit_code = all ? kOk : kInvariantFailed;
  return result;
}

CommandResult cmd_bethe(const RunConfig& cfg) {
  const ModularParams p = cfg.params();
  // z2 - z1 = 2 eta at eta = 1/5 kills the eight-vertex vector, so that mode defaults off the real axis
  const std::vector<cplx> default_z = cfg.eight_vertex ? std::vector<cplx>{0.0, cplx(0.4, 0.1)} : std::vector<cplx>{0.0, 0.4};
  const std::vector<cplx> z = cfg.z.empty() ? default_z : cfg.z;
  const std::vector<int> weights = resolved_weights(cfg, z.size());
  if (weights.size() != z.size()) throw ConfigError("Lambda: expected one weight per z point");
  int total = 0;
  for (int w : weights) total += w;
  const int m = cfg.m ? *cfg.m : total / 2;
  std::optional<BetheProblem> maybe;
  try {
    maybe.emplace(m, weights, z, cfg.c, p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const BetheProblem& prob = *maybe;

  CommandResult result;
  result.report = report_header("bethe", cfg);
  json& rep = result.report;

  std::vector<cplx> t0 = cfg.t0;
  if (t0.empty() && m == 1) t0 = {cplx(0.2, 0.1)};
  if (!t0.empty() && static_cast<int>(t0.size()) != m) throw ConfigError("t0: expected m entries");

  BetheSolution sol;
  try {
    sol = t0.empty() ? bae_solve_multistart(prob, sub_seed(cfg.seed, 31), 20, solver_options(cfg))
                     : bae_solve(prob, t0, solver_options(cfg));
  } catch (const ConvergenceError& e) {
    rep["status"] = "non-convergence";
    rep["error"] = e.what();
    rep["trace"] = trace_json(e.trace());
    result.exit_code = kNonConvergence;
    return result;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  json solution;
  solution["m"] = m;
  solution["n"] = prob.n();
  solution["Lambda"] = weights;
  solution["z"] = complex_list_to_json(z);
  solution["tau"] = complex_to_json(p.tau());
  solution["eta"] = complex_to_json(p.eta());
  solution["c"] = complex_to_json(sol.c);
  solution["t"] = complex_list_to_json(sol.t);
  solution["residual"] = sol.residual;
  solution["iterations"] = sol.iterations;
  solution["trace"] = trace_json(sol.trace);
  rep["solution"] = solution;

  const double tol = cfg.tolerance("eigen", 1e-9);
  bool ok = sol.residual < cfg.tolerance("newton", 1e-12) * 10.0;
  if (prob.is_fundamental()) {
    const auto draws = draw_tuples(sub_seed(cfg.seed, 32), 3, 2, p);
    json checks = json::array();
    double worst = 0.0;
    for (const auto& x : draws) {
      const double r = eigen_relation_residual(prob, sol, x[0], x[1]);
      worst = std::max(worst, r);
      checks.push_back({{"w", complex_to_json(x[0])},
                        {"lambda", complex_to_json(x[1])},
                        {"eps", complex_to_json(transfer_eigenvalue(prob, sol, x[0]))},
                        {"residual", r}});
    }
    rep["eigen_checks"] = checks;
    rep["eigen_max_residual"] = worst;
    rep["eigen_tol"] = tol;
    ok = ok && worst < tol;
  } else {
    rep["eigen_checks"] = "skipped: the represented chain has weight-one factors only";
  }

  if (cfg.eight_vertex) {
    bool ok8 = false;
    rep["eight_vertex"] = eight_vertex_record(prob, sol, cfg, p, cfg.tolerance("eight_vertex", 1e-8), ok8);
    ok = ok && ok8;
  }
  rep["status"] = ok ? "ok" : "failed";
  result.exit_code = ok ? kOk : kInvariantFailed;
  return result;
}

CommandResult cmd_qlame(const RunConfig& cfg) {
  const ModularParams p = cfg.params();
  const int m = cfg.m ? *cfg.m : 1;
  if (m < 1) throw ConfigError("m: must be at least 1");
  const QLameProblem prob(m, p);
  const SolverOptions opts = solver_options(cfg);
  const double tol = cfg.tolerance("qlame", 1e-10);
  const std::vector<cplx> lambdas = draw_points(sub_seed(cfg.seed, 41), 20, p);

  CommandResult result;
  result.report = report_header("qlame", cfg);
  json& rep = result.report;
  bool ok = true;

  std::vector<cplx> t0 = cfg.t0.empty() ? default_qlame_start(m, p) : cfg.t0;
  if (!t0.empty() && static_cast<int>(t0.size()) != m) throw ConfigError("t0: expected m entries");
  if (!cfg.t.empty() && (m != 1 || cfg.t.size() != 1)) throw ConfigError("t: the closed form takes m = 1 and one root");

  std::optional<SpectralPoint> last;
  if (cfg.c_path) {
    const std::vector<cplx> path = cfg.c_path->points();
    if (t0.empty()) throw ConfigError("t0: a continuation needs a starting vector for this m");
    const QLameContinuation cont = qlame_continue(prob, t0, path, opts);
    json records = json::array();
    double worst = 0.0;
    for (const SpectralPoint& pt : cont.points) {
      json rec = spectral_json(pt, p);
      const double r = max_eigen_residual(prob, pt, lambdas);
      rec["eigen_residual"] = r;
      worst = std::max(worst, r);
      records.push_back(rec);
    }
    rep["records"] = records;
    rep["eigen_max_residual"] = worst;
    rep["eigen_tol"] = tol;
    ok = worst < tol;
    if (!cfg.csv.empty()) {
      std::ofstream csv(cfg.csv);
      if (!csv) throw ConfigError("csv: cannot open '" + cfg.csv + "'");
      csv << std::setprecision(17) << "c_re,c_im";
      for (int j = 1; j <= m; ++j) csv << ",t" << j << "_re,t" << j << "_im";
      csv << ",eps_re,eps_im\n";
      for (std::size_t k = 0; k < cont.points.size(); ++k) {
        const SpectralPoint& pt = cont.points[k];
        csv << pt.c.real() << ',' << pt.c.imag();
        for (const cplx& t : cont.paths[k]) csv << ',' << t.real() << ',' << t.imag();
        csv << ',' << pt.eps.real() << ',' << pt.eps.imag() << '\n';
      }
      rep["csv"] = cfg.csv;
    }
    if (!cont.points.empty()) last = cont.points.back();
    if (!cont.complete) {
      rep["status"] = "non-convergence";
      rep["error"] = cont.failure;
      rep["trace"] = trace_json(cont.failure_trace);
      if (last) rep["last_good"] = spectral_json(*last, p);
      result.exit_code = kNonConvergence;
      return result;
    }
  } else {
    SpectralPoint pt;
    try {
      if (!cfg.t.empty()) {
        pt = qlame_closed_form_point(prob, cfg.t[0]);
        rep["branch"] = "closed_form";
      } else if (!t0.empty()) {
        pt = qlame_solve(prob, cfg.c, t0, opts);
        rep["branch"] = "newton";
      } else {
        const BetheSolution sol = bae_solve_multistart(prob.bethe(cfg.c), sub_seed(cfg.seed, 42), 20, opts);
        pt = SpectralPoint{m, sol.t, sol.c, qlame_eigenvalue(prob, sol.t, sol.c), sol.residual};
        rep["branch"] = "multistart";
      }
    } catch (const ConvergenceError& e) {
      rep["status"] = "non-convergence";
      rep["error"] = e.what();
      rep["trace"] = trace_json(e.trace());
      result.exit_code = kNonConvergence;
      return result;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    json rec = spectral_json(pt, p);
    const double r = max_eigen_residual(prob, pt, lambdas);
    rec["eigen_residual"] = r;
    rep["point"] = rec;
    rep["eigen_tol"] = tol;
    ok = r < tol;
    last = pt;
  }

  if (last) {
    const SpectralPoint reflected = reflect_point(prob, *last);
    const double drift = std::abs(reflected.eps - last->eps) / std::max(1.0, std::abs(last->eps));
    rep["reflection"] = {{"point", spectral_json(reflected, p)}, {"eps_difference", drift}};
    ok = ok && drift < cfg.tolerance("reflection", 1e-9);
  }

  if (cfg.classical_limit) {
    if (!last) throw ConfigError("classical_limit: no spectral point to test");
    const SpectralPoint pt = *last;
    const ScalarFunction psi = [&](cplx l) { return qlame_psi(pt, l, p); };
    const cplx at = cfg.z_eval ? *cfg.z_eval : cplx(0.23, 0.11);
    const std::vector<double> etas{0.08, 0.04, 0.02, 0.01};
    const auto rows = classical_limit_residual(m, p.tau(), psi, at, etas);
    json table = json::array();
    for (const auto& row : rows) table.push_back({{"eta", row.eta}, {"residual", row.residual}});
    const double order = empirical_order(rows);
    rep["classical_limit"] = {{"lambda", complex_to_json(at)}, {"rows", table}, {"order", order}};
    ok = ok && std::abs(order - 2.0) <= 0.3;
  }

  rep["status"] = ok ? "ok" : "failed";
  result.exit_code = ok ? kOk : kInvariantFailed;
  return result;
}

CommandResult cmd_irf(const RunConfig& cfg) {
  const ModularParams p = cfg.params();
  std::vector<int> steps = cfg.steps;
  if (steps.empty()) steps = {1, -1, 1, -1};
  std::vector<cplx> z = cfg.z;
  if (z.empty()) {
    for (std::size_t k = 0; k < steps.size(); ++k) z.push_back(cplx(0.19 * static_cast<double>(k), 0.03 * static_cast<double>(k % 3)));
  }
  if (z.size() != steps.size()) throw ConfigError("steps: expected one step per z point");
  std::optional<PathState> state;
  std::optional<FundamentalChain> chain;
  const cplx offset = cfg.mu ? *cfg.mu : cplx(0.05, 0.03);
  try {
    state = PathState::from_steps(Height{cfg.start_level, offset}, steps);
    chain.emplace(z, p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("steps: ") + e.what());
  }
  const cplx at = cfg.z_eval ? *cfg.z_eval : cplx(0.31, 0.12);

  CommandResult result;
  result.report = report_header("irf", cfg);
  json& rep = result.report;
  json levels = json::array();
  for (const Height& h : state->heights()) levels.push_back(h.level);
  rep["input"] = {{"offset", complex_to_json(offset)}, {"levels", levels}};
  rep["z_eval"] = complex_to_json(at);
  json outputs = json::array();
  for (const auto& [b, coeff] : irf_transfer_coeffs(*state, at, *chain)) {
    json lv = json::array();
    for (const Height& h : b.heights()) lv.push_back(h.level);
    outputs.push_back({{"levels", lv}, {"coeff", complex_to_json(coeff)}});
  }
  rep["outputs"] = outputs;
  const double residual = irf_operator_residual(*state, at, *chain);
  const double tol = cfg.tolerance("irf_operator", 1e-10);
  rep["operator_residual"] = residual;
  rep["tol"] = tol;
  const bool ok = residual < tol;
  rep["status"] = ok ? "ok" : "failed";
  result.exit_code = ok ? kOk : kInvariantFailed;
  return result;
}

CommandResult cmd_vertex8(const RunConfig& cfg) {
  const ModularParams p = cfg.params();
  const std::vector<cplx> z = cfg.z.empty() ? std::vector<cplx>{0.0, 0.4} : cfg.z;
  const cplx at = cfg.z_eval ? *cfg.z_eval : cplx(0.31, 0.12);
  const cplx lambda = cfg.mu ? *cfg.mu : cplx(0.23, 0.07);

  CommandResult result;
  result.report = report_header("vertex8", cfg);
  json& rep = result.report;

  const EightVertexWeights w = r8v_weights(at, p);
  rep["weights"] = {{"z", complex_to_json(at)},
                    {"a", complex_to_json(w.a)},
                    {"b", complex_to_json(w.b)},
                    {"c", complex_to_json(w.c)},
                    {"d", complex_to_json(w.d)}};

  Matrix4 flip = Matrix4::Zero();
  flip(0, 0) = flip(3, 3) = flip(1, 2) = flip(2, 1) = 1.0;
  Matrix4 aa = Matrix4::Zero();
  Matrix4 bb = Matrix4::Zero();
  aa.diagonal() << 1.0, -1.0, -1.0, 1.0;
  bb(0, 3) = bb(1, 2) = bb(2, 1) = bb(3, 0) = 1.0;
  const Matrix4 r = r8v_eval(at, p);
  std::vector<Suite> checks;
  auto scalar = [&](const std::string& name, double value, double tol) {
    Suite s;
    s.name = name;
    s.count = 1;
    s.value = value;
    s.tol = cfg.tolerance(name, tol);
    checks.push_back(s);
  };
  scalar("r8v_flip", max_abs(r8v_eval(0.0, p) - flip), 1e-12);
  scalar("r8v_symmetry", std::max(max_abs(r * aa - aa * r), max_abs(r * bb - bb * r)), 1e-12);
  scalar("r8v_residue", max_abs(r8v_residue_estimate(p) - r8v_residue_expected(p)), 1e-4);

  const auto pairs = draw_tuples(sub_seed(cfg.seed, 51), 20, 2, p);
  {
    const cplx ref = s_hat(pairs[0][0], pairs[0][1], p).determinant() / (theta(pairs[0][0], p) * theta(pairs[0][1], p));
    Suite s = from_sweep("det_s_hat", run_sweep(pairs, [&](const auto& x) {
                           const cplx ratio = s_hat(x[0], x[1], p).determinant() / (theta(x[0], p) * theta(x[1], p));
                           return std::abs(ratio - ref) / std::abs(ref);
                         }),
                         cfg.tolerance("det_s_hat", 1e-9));
    checks.push_back(s);
  }
  const auto triples = draw_tuples(sub_seed(cfg.seed, 52), 50, 3, p);
  checks.push_back(from_sweep(
      "vertex_irf", run_sweep(triples, [&](const auto& x) { return vertex_irf_residual(x[0], x[1], x[2], p); }),
      cfg.tolerance("vertex_irf", 1e-10)));

  const EightVertexChain chain(z, p);
  const double inter = t8v_intertwine_residual(chain, at, lambda);
  scalar("intertwining", inter, 1e-9);
  {
    Suite s;
    s.name = "intertwining_mutation";
    s.count = 1;
    s.value = t8v_intertwine_residual(chain, at, lambda, false);
    s.tol = cfg.tolerance("intertwining_mutation", 1e-2);
    s.want_min = true;
    checks.push_back(s);
  }

  json list = json::array();
  bool ok = true;
  for (const Suite& s : checks) {
    list.push_back(s.to_json());
    ok = ok && s.pass();
  }
  rep["n"] = chain.size();
  rep["z_points"] = complex_list_to_json(z);
  rep["lambda"] = complex_to_json(lambda);
  rep["checks"] = list;
  rep["status"] = ok ? "ok" : "failed";
  result.exit_code = ok ? kOk : kInvariantFailed;
  return result;
}

// --- argument handling -----------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Elliptic quantum group Bethe ansatz toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string tau_text;
  std::string eta_text;
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out_path;
  std::vector<std::string> tol_texts;
  std::string z_text, lambda_text, t0_text, t_text, c_text, mu_text, steps_text, z_eval_text, csv_path;
  std::string c_start, c_end;
  int m_value = 0;
  int c_steps = 0;
  int samples = 0;
  long start_level = 0;
  bool eight_vertex = false;
  bool classical = false;

  app.add_option("--tau", tau_text, "modular parameter, e.g. 0.9i or 0.4+0.8i");
  app.add_option("--eta", eta_text, "step, complex or p/q");
  app.add_option("--seed", seed, "seed for random draws");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_path, "write the JSON report here instead of stdout");
  app.add_option("--tol", tol_texts, "tolerance override name=value (repeatable)");

  auto* check = app.add_subcommand("check", "run the invariant suites");
  auto* bethe = app.add_subcommand("bethe", "solve the Bethe equations and verify the eigenrelation");
  auto* qlame = app.add_subcommand("qlame", "q-Lame spectral points and continuation");
  auto* irf = app.add_subcommand("irf", "IRF transfer coefficients on a height path");
  auto* vertex8 = app.add_subcommand("vertex8", "eight-vertex matrix and vertex-IRF checks");

  for (auto* sub : {check, bethe, vertex8, irf}) sub->add_option("--z", z_text, "comma-separated evaluation points");
  bethe->add_option("--lambda-weights", lambda_text, "comma-separated highest weights");
  for (auto* sub : {bethe, qlame}) {
    sub->add_option("--m", m_value, "number of Bethe roots");
    sub->add_option("--c", c_text, "exponent c");
    sub->add_option("--t0", t0_text, "comma-separated starting roots");
  }
  bethe->add_flag("--eight-vertex", eight_vertex, "emit the eight-vertex eigenvector record");
  bethe->add_option("--mu", mu_text, "base point of the summation functional");
  bethe->add_option("--samples", samples, "number of z samples for the eight-vertex record");
  qlame->add_option("--t", t_text, "root for the m = 1 closed form");
  qlame->add_option("--c-start", c_start, "continuation start");
  qlame->add_option("--c-end", c_end, "continuation end");
  qlame->add_option("--c-steps", c_steps, "number of continuation points");
  qlame->add_option("--csv", csv_path, "continuation CSV output");
  qlame->add_flag("--classical-limit", classical, "emit the eta -> 0 residual table");
  qlame->add_option("--lambda", z_eval_text, "evaluation point for the classical limit");
  irf->add_option("--steps", steps_text, "comma-separated steps a_j - a_{j+1}");
  irf->add_option("--start-level", start_level, "level of a_1");
  irf->add_option("--offset", mu_text, "common height offset");
  irf->add_option("--at", z_eval_text, "spectral parameter");
  vertex8->add_option("--at", z_eval_text, "spectral parameter");
  vertex8->add_option("--lambda", mu_text, "dynamical parameter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kConfigError;
  }

  CommandResult result;
  try {
    RunConfig cfg;
    if (!config_path.empty()) load_config_file(cfg, config_path);
    if (!tau_text.empty()) cfg.tau = parse_complex(tau_text, "tau");
    if (!eta_text.empty()) set_eta(cfg, eta_text);
    if (seed) cfg.seed = *seed;
    if (!out_path.empty()) cfg.out = out_path;
    for (const std::string& t : tol_texts) cfg.tol.insert_or_assign(parse_tol(t).first, parse_tol(t).second);
    if (!z_text.empty()) cfg.z = parse_complex_list(z_text, "z");
    if (!lambda_text.empty()) cfg.lambda_weights = parse_int_list(lambda_text, "Lambda");
    if (m_value != 0) cfg.m = m_value;
    if (!c_text.empty()) cfg.c = parse_complex(c_text, "c");
    if (!t0_text.empty()) cfg.t0 = parse_complex_list(t0_text, "t0");
    if (!t_text.empty()) cfg.t = parse_complex_list(t_text, "t");
    if (!mu_text.empty()) cfg.mu = parse_complex(mu_text, "mu");
    if (!steps_text.empty()) cfg.steps = parse_int_list(steps_text, "steps");
    if (!z_eval_text.empty()) cfg.z_eval = parse_complex(z_eval_text, "z_eval");
    if (!csv_path.empty()) cfg.csv = csv_path;
    if (samples > 0) cfg.samples = samples;
    if (start_level != 0) cfg.start_level = start_level;
    if (eight_vertex) cfg.eight_vertex = true;
    if (classical) cfg.classical_limit = true;
    if (!c_start.empty() || !c_end.empty() || c_steps != 0) {
      if (c_start.empty() || c_end.empty() || c_steps < 1) throw ConfigError("c_path: give --c-start, --c-end and --c-steps");
      cfg.c_path = ContinuationPath{parse_complex(c_start, "c_start"), parse_complex(c_end, "c_end"), c_steps};
    }
    cfg.params();  // validate before any work

    if (check->parsed()) result = cmd_check(cfg);
    else if (bethe->parsed()) result = cmd_bethe(cfg);
    else if (qlame->parsed()) result = cmd_qlame(cfg);
    else if (irf->parsed()) result = cmd_irf(cfg);
    else result = cmd_vertex8(cfg);

    result.report["exit_code"] = result.exit_code;
    const std::string text = result.report.dump(2) + "\n";
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::ofstream file(cfg.out);
      if (!file) throw ConfigError("out: cannot open '" + cfg.out + "'");
      file << text;
    }
    if (result.exit_code == kNonConvergence) {
      err << "error: " << result.report.value("error", std::string("non-convergence")) << "\n";
    } else if (result.exit_code == kInvariantFailed) {
      err << "error: invariant check failed\n";
    }
    return result.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const PoleError& e) {
    err << "error: " << e.what() << "\n";
    return kInvariantFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvariantFailed;
  }
}

}  // namespace ellqg::cli
