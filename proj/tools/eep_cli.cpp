// Command-line front end: simulate, exact, multiscale, average, compare, sweep.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "eep.hpp"

namespace {

using nlohmann::json;

struct Options {
  // parameters
  double eps = 0.04, mu = 1.0, omega = 0.0, beta = 0.5;
  std::string params_file;
  // output
  std::string out = "-";
  std::string format;
  bool error_json = false;
  // numerics
  double tol = 1e-10;
  int transient = 200;
  std::size_t samples = 0;  // 0: per-command default
  // simulate
  double tau0 = 0.0, tau_max = 100.0 * eep::two_pi;
  double theta0 = std::nan(""), theta_dot0 = -1.0;
  // exact
  int k_min = 0, k_max = 0;
  double small_threshold = 1.0, small_mu = 0.2;
  // multiscale / average
  int order = 2;
  // compare / sweep
  std::string methods;
  std::string beta_grid = "0.005:0.9:40";
  bool log_grid = false;
  unsigned jobs = 1;
};

eep::DimensionlessParams load_params(const Options& o) {
  if (!o.params_file.empty()) {
    std::ifstream in(o.params_file);
    if (!in) throw eep::Error(eep::ErrorCode::invalid_parameter, "cannot read " + o.params_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return eep::to_dimensionless(eep::parse_params(ss.str()));
  }
  eep::DimensionlessParams d{o.eps, o.mu, o.omega, o.beta};
  eep::validate(d);
  return d;
}

std::string fmt(double v) { return eep::format_double(v); }

std::string provenance(const std::string& cmd, const eep::DimensionlessParams& d,
                       const Options& o, std::size_t samples) {
  std::ostringstream os;
  os << "eep " << cmd << " eps=" << fmt(d.eps) << " mu=" << fmt(d.mu)
     << " omega=" << fmt(d.omega) << " beta=" << fmt(d.beta) << " tol=" << fmt(o.tol)
     << " transient=" << o.transient << " samples=" << samples;
  return os.str();
}

json provenance_json(const eep::DimensionlessParams& d, const Options& o, std::size_t samples) {
  return {{"eps", d.eps},   {"mu", d.mu},           {"omega", d.omega},  {"beta", d.beta},
          {"tol", o.tol},   {"transient", o.transient}, {"samples", samples}};
}

std::vector<eep::Method> parse_methods(const std::string& list) {
  std::vector<eep::Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(eep::parse_method(item));
  if (out.empty()) throw eep::Error(eep::ErrorCode::invalid_parameter, "no methods given");
  return out;
}

std::vector<double> parse_grid(const std::string& text, bool log_spacing) {
  std::stringstream ss(text);
  std::string lo, hi, n;
  if (!std::getline(ss, lo, ':') || !std::getline(ss, hi, ':') || !std::getline(ss, n) ||
      lo.empty() || hi.empty() || n.empty())
    throw CLI::ValidationError("--beta-grid", "expected lo:hi:count");
  try {
    std::size_t used = 0;
    const long count = std::stol(n, &used);
    if (used != n.size() || count < 1) throw std::invalid_argument("count");
    return eep::make_grid(std::stod(lo), std::stod(hi), static_cast<std::size_t>(count),
                          log_spacing);
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--beta-grid", "expected lo:hi:count with numbers");
  }
}

std::string run_simulate(const Options& o) {
  const auto d = load_params(o);
  const std::size_t spp = o.samples ? o.samples : 64;
  double th0 = o.theta0;
  if (std::isnan(th0)) th0 = std::abs(d.beta) <= d.mu ? std::asin(d.beta / d.mu) : 0.0;
  eep::IntegrateOptions io{.tol = o.tol,
                           .samples_per_period = spp,
                           .transient_periods = static_cast<double>(o.transient)};
  const auto traj = eep::integrate(d, {th0, o.theta_dot0}, o.tau0, o.tau_max, io);
  std::ostringstream os;
  if (o.format == "json") {
    json rows = json::array();
    for (const auto& s : traj.samples()) rows.push_back({s.tau, s.theta, s.theta_dot});
    os << json{{"provenance", provenance_json(d, o, spp)},
               {"columns", {"tau", "theta", "theta_dot"}},
               {"steady_start", traj.steady_start()},
               {"samples", rows}}
              .dump(2)
       << '\n';
  } else {
    os << "# " << provenance("simulate", d, o, spp) << '\n'
       << "# steady_start=" << traj.steady_start() << '\n';
    eep::write_csv(os, traj);
  }
  return os.str();
}

std::string run_exact(const Options& o) {
  const auto d = load_params(o);
  const auto branches = eep::exact_branches(d.beta, d.mu, o.k_min, o.k_max);
  std::ostringstream os;
  if (o.format == "csv") {
    os << "# " << provenance("exact", d, o, 0) << '\n' << "theta0,k,stable\n";
    for (const auto& b : branches)
      os << fmt(b.theta0) << ',' << b.k << ',' << (b.stable ? "true" : "false") << '\n';
    return os.str();
  }
  json jb = json::array();
  for (const auto& b : branches) jb.push_back({{"theta0", b.theta0}, {"k", b.k}, {"stable", b.stable}});
  json regime = nullptr;
  if (d.eps > 0.0)
    regime = std::string(eep::to_string(eep::classify_regime(d, {o.small_threshold, o.small_mu})));
  os << json{{"provenance", provenance_json(d, o, 0)},
             {"existence_window", eep::existence_window(d.beta, d.mu)},
             {"regime", regime},
             {"branches", jb}}
            .dump(2)
     << '\n';
  return os.str();
}

std::string dump_solution(const std::string& cmd, const eep::AsymptoticSolution& sol,
                          const eep::DimensionlessParams& d, const Options& o, json extra) {
  std::ostringstream os;
  if (o.format == "csv") {
    const std::size_t n = o.samples ? o.samples : 1024;
    os << "# " << provenance(cmd, d, o, n) << '\n'
       << "# method=" << eep::to_string(sol.method) << '\n';
    eep::write_csv(os, sol, n);
    return os.str();
  }
  extra["provenance"] = provenance_json(d, o, o.samples ? o.samples : 1024);
  extra["solution"] = eep::to_json(sol);
  os << extra.dump(2) << '\n';
  return os.str();
}

std::string run_multiscale(const Options& o) {
  const auto d = load_params(o);
  const auto sol = eep::multiscale_solution(d, o.order);
  json extra{{"forcing1", eep::to_json(eep::first_order_forcing(d))},
             {"theta1", eep::to_json(eep::theta1_series(d))}};
  if (o.order == 2) {
    const auto t1 = eep::theta1_series(d);
    extra["forcing2"] = eep::to_json(eep::second_order_forcing(d, t1));
    extra["theta2"] = eep::to_json(eep::theta2_series(d));
  }
  return dump_solution("multiscale", sol, d, o, extra);
}

std::string run_average(const Options& o) {
  const auto d = load_params(o);
  const auto sp = eep::scale(d);
  const auto st = eep::select_stationary_state(sp, d.eps, o.order);
  if (o.format == "csv") return dump_solution("average", eep::averaging_solution(d, st), d, o, {});
  json extra{{"stationary", eep::stationary_report(st, sp, d.eps)}};
  return dump_solution("average", eep::averaging_solution(d, st), d, o, extra);
}

eep::CompareOptions compare_options(const Options& o) {
  eep::CompareOptions co;
  co.tol = o.tol;
  co.samples = o.samples ? o.samples : 1024;
  co.transient_periods = o.transient;
  return co;
}

std::string run_compare(const Options& o) {
  const auto d = load_params(o);
  const auto methods =
      parse_methods(o.methods.empty() ? "multiscale1,multiscale2,averaging2" : o.methods);
  const auto co = compare_options(o);
  std::vector<eep::ComparisonReport> reports;
  for (auto m : methods) reports.push_back(eep::compare_solution(eep::build_solution(m, d), d, co));
  std::ostringstream os;
  if (o.format == "csv") {
    os << "# " << provenance("compare", d, o, co.samples) << '\n'
       << "method,max_abs_err,rel_err,amplitude\n";
    for (const auto& r : reports)
      os << eep::to_string(r.method) << ',' << fmt(r.max_abs_err) << ',' << fmt(r.rel_err)
         << ',' << fmt(r.amplitude) << '\n';
    return os.str();
  }
  json jr = json::array();
  for (const auto& r : reports) jr.push_back(eep::to_json(r));
  os << json{{"provenance", provenance_json(d, o, co.samples)}, {"reports", jr}}.dump(2) << '\n';
  return os.str();
}

std::string run_sweep(const Options& o) {
  auto d = load_params(o);
  const auto grid = parse_grid(o.beta_grid, o.log_grid);
  const auto methods = parse_methods(o.methods.empty() ? "multiscale2,averaging2" : o.methods);
  const auto co = compare_options(o);
  const auto result = eep::sweep_beta(d, grid, methods, co, o.jobs);
  std::ostringstream os;
  if (o.format == "json") {
    json rows = json::array();
    for (const auto& r : result.rows)
      rows.push_back({{"beta", r.beta}, {"eps", r.eps}, {"mu", r.mu}, {"omega", r.omega},
                      {"method", std::string(eep::to_string(r.method))},
                      {"max_abs_err", std::isfinite(r.max_abs_err) ? json(r.max_abs_err) : json()},
                      {"rel_err", std::isfinite(r.rel_err) ? json(r.rel_err) : json()},
                      {"amplitude", std::isfinite(r.amplitude) ? json(r.amplitude) : json()},
                      {"status", r.status}});
    os << json{{"provenance", provenance_json(d, o, co.samples)}, {"rows", rows}}.dump(2) << '\n';
    return os.str();
  }
  os << "# " << provenance("sweep", d, o, co.samples) << " beta_grid=" << o.beta_grid
     << (o.log_grid ? " log" : " linear") << '\n';
  eep::write_csv(os, result);
  return os.str();
}

void add_param_flags(CLI::App* cmd, Options& o) {
  auto* file = cmd->add_option("--params", o.params_file,
                               "Parameter file (key=value: m,l,c,g,X,Y,Omega or eps,mu,omega,beta)")
                   ->check(CLI::ExistingFile);
  cmd->add_option("--eps", o.eps, "Semiaxis half-difference (Y-X)/2l [-]")
      ->capture_default_str()->excludes(file);
  cmd->add_option("--mu", o.mu, "Semiaxis half-sum (Y+X)/2l [-], > 0")
      ->capture_default_str()->excludes(file);
  cmd->add_option("--omega", o.omega, "Frequency ratio sqrt(g/l)/Omega [-]")
      ->capture_default_str()->excludes(file);
  cmd->add_option("--beta", o.beta, "Damping c/(m l^2 Omega) [-]")
      ->capture_default_str()->excludes(file);
  cmd->add_option("--out,-o", o.out, "Output path ('-' for stdout)")->capture_default_str();
}

void add_tol(CLI::App* cmd, Options& o) {
  cmd->add_option("--tol", o.tol, "Integrator local error tolerance [-], in [1e-13, 1e-3]")
      ->capture_default_str();
}

void add_compare_flags(CLI::App* cmd, Options& o) {
  add_tol(cmd, o);
  cmd->add_option("--samples", o.samples, "Samples per reference period [-] (default 1024)");
  cmd->add_option("--transient", o.transient,
                  "Max transient periods when settling onto an attracting orbit [periods]")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Rotations of a pendulum with an elliptically moving pivot"};
  app.require_subcommand(1, 1);
  app.add_flag("--error-json", o.error_json, "Print domain errors as JSON on stderr");

  auto* sim = app.add_subcommand("simulate", "Integrate the equation of motion; Trajectory CSV");
  add_param_flags(sim, o);
  add_tol(sim, o);
  sim->add_option("--tau0", o.tau0, "Start time [tau = Omega t]")->capture_default_str();
  sim->add_option("--tau-max", o.tau_max, "End time [tau = Omega t]")->capture_default_str();
  sim->add_option("--theta0", o.theta0,
                  "Initial angle [rad] (default: stable exact branch asin(beta/mu))");
  sim->add_option("--theta-dot0", o.theta_dot0, "Initial angular velocity [per unit tau]")
      ->capture_default_str();
  sim->add_option("--samples", o.samples, "Output samples per excitation period [-] (default 64)");
  sim->add_option("--transient", o.transient, "Transient length before steady_start [periods]")
      ->capture_default_str();
  sim->add_option("--format", o.format, "csv or json (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* ex = app.add_subcommand("exact", "Exact branches, stability and regime");
  add_param_flags(ex, o);
  ex->add_option("--k-min", o.k_min, "Lowest branch index k [-]")->capture_default_str();
  ex->add_option("--k-max", o.k_max, "Highest branch index k [-]")->capture_default_str();
  ex->add_option("--small-threshold", o.small_threshold,
                 "beta is small when beta <= this * sqrt(eps) [-]")
      ->capture_default_str();
  ex->add_option("--small-mu", o.small_mu, "mu is small when mu <= this [-]")
      ->capture_default_str();
  ex->add_option("--format", o.format, "json or csv (default json)")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* ms = app.add_subcommand("multiscale", "Multiple-scales solution (order-one damping)");
  add_param_flags(ms, o);
  ms->add_option("--order", o.order, "Approximation order [1 or 2]")
      ->capture_default_str()->check(CLI::Range(1, 2));
  ms->add_option("--samples", o.samples, "Samples over one period for csv [-] (default 1024)");
  ms->add_option("--format", o.format, "json (coefficients) or csv (samples); default json")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* av = app.add_subcommand("average", "Averaging solution (small damping)");
  add_param_flags(av, o);
  av->add_option("--order", o.order, "Order of the averaged equations [1 or 2]")
      ->capture_default_str()->check(CLI::Range(1, 2));
  av->add_option("--samples", o.samples, "Samples over one period for csv [-] (default 1024)");
  av->add_option("--format", o.format, "json (stationary report) or csv (samples); default json")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* cmp = app.add_subcommand("compare", "Angular-velocity error against the numeric orbit");
  add_param_flags(cmp, o);
  add_compare_flags(cmp, o);
  cmp->add_option("--methods", o.methods,
                  "Comma list of exact,multiscale1,multiscale2,averaging2 "
                  "(default multiscale1,multiscale2,averaging2)");
  cmp->add_option("--format", o.format, "json or csv (default json)")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* sw = app.add_subcommand("sweep", "Error sweep over beta; SweepResult CSV");
  add_param_flags(sw, o);
  add_compare_flags(sw, o);
  sw->add_option("--methods", o.methods, "Comma list of methods (default multiscale2,averaging2)");
  sw->add_option("--beta-grid", o.beta_grid, "beta grid lo:hi:count [-]")->capture_default_str();
  sw->add_flag("--log-grid", o.log_grid, "Geometric instead of linear beta spacing");
  sw->add_option("--jobs", o.jobs, "Worker threads [-]")->capture_default_str()->check(
      CLI::PositiveNumber);
  sw->add_option("--format", o.format, "csv or json (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::string text;
    if (sim->parsed()) text = run_simulate(o);
    else if (ex->parsed()) text = run_exact(o);
    else if (ms->parsed()) text = run_multiscale(o);
    else if (av->parsed()) text = run_average(o);
    else if (cmp->parsed()) text = run_compare(o);
    else text = run_sweep(o);

    if (o.out == "-") {
      std::cout << text;
    } else {
      std::ofstream out(o.out, std::ios::binary);
      if (!out || !(out << text)) {
        std::cerr << "error: cannot write " << o.out << '\n';
        return 1;
      }
    }
    return 0;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const eep::Error& e) {
    if (o.error_json)
      std::cerr << json{{"error", std::string(eep::to_string(e.code()))}, {"message", e.what()}}.dump()
                << '\n';
    else
      std::cerr << "error: " << eep::to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
