// twofluid: spectral laboratory for the compressible two-fluid model with
// capillarity. Subcommands cover the algebraic closure, Littlewood-Paley
// norms, the linearized symbol analysis, nonlinear simulation and decay-rate
// fitting.
//
// Exit codes: 0 success, 2 validation error, 3 numerical abort.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "twofluid/closure.hpp"
#include "twofluid/decay.hpp"
#include "twofluid/experiment.hpp"
#include "twofluid/linear_symbol.hpp"
#include "twofluid/snapshot.hpp"
#include "twofluid/solver.hpp"

using namespace twofluid;

namespace {

struct CommonParams {
  double gamma_plus = 2.0, gamma_minus = 2.0;
  double mu_plus = 1.0, mu_minus = 1.0;
  double lambda_plus = 0.0, lambda_minus = 0.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--gamma_plus,--gamma-plus", gamma_plus);
    cmd->add_option("--gamma_minus,--gamma-minus", gamma_minus);
    cmd->add_option("--mu_plus,--mu-plus", mu_plus);
    cmd->add_option("--mu_minus,--mu-minus", mu_minus);
    cmd->add_option("--lambda_plus,--lambda-plus", lambda_plus);
    cmd->add_option("--lambda_minus,--lambda-minus", lambda_minus);
  }

  ModelParams to_params(int dim) const {
    ModelParams p;
    p.dim = dim;
    p.gamma_plus = gamma_plus;
    p.gamma_minus = gamma_minus;
    p.mu_plus = mu_plus;
    p.mu_minus = mu_minus;
    p.lambda_plus = lambda_plus;
    p.lambda_minus = lambda_minus;
    p.validate();
    return p;
  }
};

// Flat key = value config reader (TOML subset: comments, quoted strings,
// numbers, booleans, arrays of scalars). JSON files go through the JSON
// parser instead. Returned values are strings; array entries repeat.
std::map<std::string, std::vector<std::string>> load_config_file(
    const std::string& path) {
  std::map<std::string, std::vector<std::string>> out;
  auto strip = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
  };
  auto unquote = [&](std::string s) {
    s = strip(s);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') &&
        s.back() == s.front())
      return s.substr(1, s.size() - 2);
    return s;
  };

  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path);
    const nlohmann::json j = nlohmann::json::parse(in);
    for (const auto& [key, value] : j.items()) {
      auto& slot = out[key];
      if (value.is_array()) {
        for (const auto& v : value)
          slot.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      } else if (value.is_string()) {
        slot.push_back(value.get<std::string>());
      } else {
        slot.push_back(value.dump());
      }
    }
    return out;
  }

  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line without '=': " + line);
    const std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    auto& slot = out[key];
    if (!value.empty() && value.front() == '[') {
      if (value.back() != ']')
        throw std::invalid_argument("unterminated array for key " + key);
      std::stringstream ss(value.substr(1, value.size() - 2));
      std::string item;
      while (std::getline(ss, item, ','))
        if (!strip(item).empty()) slot.push_back(unquote(item));
    } else {
      slot.push_back(unquote(value));
    }
  }
  return out;
}

// Pre-scan of raw argv for --config so file values become defaults that
// explicit flags still override.
std::string find_config_argument(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return {};
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

std::pair<double, double> parse_pair(const std::string& spec,
                                     const std::string& what) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument(what + ": expected 'a:b', got '" + spec + "'");
  const std::string hi = spec.substr(colon + 1);
  const double second =
      (hi == "inf") ? std::numeric_limits<double>::infinity() : std::stod(hi);
  return {std::stod(spec.substr(0, colon)), second};
}

int run_closure_eval(const CommonParams& cp, double r_plus, double r_minus) {
  const ModelParams params = cp.to_params(2);
  const ClosureState st = closure_state(r_plus, r_minus, params);
  const LinearCoefficients co = equilibrium_coefficients(params);
  nlohmann::json j;
  j["closure"] = {{"R_plus", st.R_plus},       {"R_minus", st.R_minus},
                  {"rho_plus", st.rho_plus},   {"rho_minus", st.rho_minus},
                  {"alpha_plus", st.alpha_plus}, {"alpha_minus", st.alpha_minus},
                  {"s2_plus", st.s2_plus},     {"s2_minus", st.s2_minus},
                  {"C2", st.C2}};
  j["coefficients"] = {{"beta1", co.beta1},
                       {"beta2", co.beta2},
                       {"beta3", co.beta3},
                       {"beta4", co.beta4},
                       {"nu1_plus", co.nu1_plus},
                       {"nu1_minus", co.nu1_minus},
                       {"nu2_plus", co.nu2_plus},
                       {"nu2_minus", co.nu2_minus}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_lp_norms(const std::string& input, const std::string& s_csv,
                 const std::string& r_mode) {
  auto [field, params] = read_snapshot(input);
  TwoFluidSolver solver(field.grid, params);
  const SpectralState st = solver.to_spectral_state(field);
  const auto part = build_partition(field.grid);
  const auto shells = weighted_shell_spectrum(st, solver.coeffs(), part);
  const ShellSum r = (r_mode == "inf") ? ShellSum::LInf : ShellSum::L1;
  std::cout << "s,r,norm\n";
  for (double s : parse_list(s_csv))
    std::cout << s << "," << r_mode << "," << besov_norm(shells, s, r) << "\n";
  return 0;
}

int run_linear_margin(const CommonParams& cp, double xi_min, double xi_max,
                      int samples) {
  const auto co = equilibrium_coefficients(cp.to_params(2));
  const auto w = lyapunov_weights(co);
  std::cout << "xi,margin\n";
  for (int i = 0; i < samples; ++i) {
    const double xi =
        xi_min * std::pow(xi_max / xi_min,
                          samples > 1 ? static_cast<double>(i) / (samples - 1)
                                      : 0.0);
    std::cout << xi << "," << lyapunov_dissipation_margin(xi, co, w) << "\n";
  }
  return 0;
}

int run_semigroup(const CommonParams& cp, int dim, const std::string& s_csv,
                  double t_min, double t_max, int samples, int q0) {
  const auto co = equilibrium_coefficients(cp.to_params(dim));
  const auto profile = RadialProfile::flat(q0);
  std::vector<double> times;
  for (int i = 0; i < samples; ++i)
    times.push_back(t_min *
                    std::pow(t_max / t_min,
                             samples > 1 ? static_cast<double>(i) / (samples - 1)
                                         : 0.0));
  std::cout << "t,s,norm\n";
  for (double s : parse_list(s_csv)) {
    const auto norms = semigroup_besov_decay(profile, s, times, dim, co);
    for (std::size_t i = 0; i < times.size(); ++i)
      std::cout << times[i] << "," << s << "," << norms[i] << "\n";
  }
  return 0;
}

struct SimulateOptions {
  int dim = 2;
  int grid_n = 128;
  double L = 1.0;
  CommonParams cp;
  SolverConfig solver;
  std::string scheme = "imex_rk2";
  std::string output_dir = "out";
  std::string input_snapshot;
  std::vector<std::string> norm_list = {"0:1"};
  std::vector<std::string> lp_list;
  int snapshot_every = 0;  // in samples; 0 disables

  void attach(CLI::App* cmd) {
    cmd->add_option("--dim", dim);
    cmd->add_option("--grid", grid_n);
    cmd->add_option("--L", L);
    cp.attach(cmd);
    cmd->add_option("--dt", solver.dt);
    cmd->add_option("--T", solver.T);
    cmd->add_option("--seed", solver.seed);
    cmd->add_option("--amplitude", solver.amplitude);
    cmd->add_option("--spectral_slope,--spectral-slope", solver.spectral_slope);
    cmd->add_option("--cutoff", solver.cutoff);
    cmd->add_option("--dealias", solver.dealias_fraction);
    cmd->add_option("--scheme", scheme)
        ->check(CLI::IsMember({"imex_rk2", "picard"}));
    cmd->add_option("--output_every,--output-every", solver.output_every);
    cmd->add_option("--output_dir,--output-dir", output_dir);
    cmd->add_option("--input", input_snapshot)
        ->description("start from a snapshot instead of generated data");
    cmd->add_option("--norm_list,--norm-list", norm_list)
        ->description("Besov norms to record, entries 's:r' with r in {1,inf}");
    cmd->add_option("--lp_list,--lp-list", lp_list)
        ->description("Lp norms to record, entries 'p:k'");
    cmd->add_option("--snapshot_every,--snapshot-every", snapshot_every);
    cmd->add_option("--solenoidal_taper,--solenoidal-taper",
                    solver.solenoidal_taper)
        ->description(
            "suppress potential velocity below this wavenumber in the "
            "generated data");
    cmd->add_flag("--linear_only,--linear-only", solver.linear_only);
  }

  // Applies config-file values; returns false for keys it does not own.
  bool apply(const std::string& key, const std::vector<std::string>& vals) {
    const std::string& v = vals.back();
    if (key == "dim") dim = std::stoi(v);
    else if (key == "grid") grid_n = std::stoi(v);
    else if (key == "L") L = std::stod(v);
    else if (key == "gamma_plus") cp.gamma_plus = std::stod(v);
    else if (key == "gamma_minus") cp.gamma_minus = std::stod(v);
    else if (key == "mu_plus") cp.mu_plus = std::stod(v);
    else if (key == "mu_minus") cp.mu_minus = std::stod(v);
    else if (key == "lambda_plus") cp.lambda_plus = std::stod(v);
    else if (key == "lambda_minus") cp.lambda_minus = std::stod(v);
    else if (key == "dt") solver.dt = std::stod(v);
    else if (key == "T") solver.T = std::stod(v);
    else if (key == "seed") solver.seed = std::stoull(v);
    else if (key == "amplitude") solver.amplitude = std::stod(v);
    else if (key == "spectral_slope") solver.spectral_slope = std::stod(v);
    else if (key == "cutoff") solver.cutoff = std::stod(v);
    else if (key == "dealias") solver.dealias_fraction = std::stod(v);
    else if (key == "scheme") scheme = v;
    else if (key == "output_every") solver.output_every = std::stoi(v);
    else if (key == "output_dir") output_dir = v;
    else if (key == "input") input_snapshot = v;
    else if (key == "norm_list") norm_list = vals;
    else if (key == "lp_list") lp_list = vals;
    else if (key == "snapshot_every") snapshot_every = std::stoi(v);
    else if (key == "solenoidal_taper") solver.solenoidal_taper = std::stod(v);
    else if (key == "linear_only") solver.linear_only = (v == "true" || v == "1");
    else return false;
    return true;
  }
};

int run_simulate(const SimulateOptions& opt) {
  const ModelParams params = opt.cp.to_params(opt.dim);
  const PeriodicGrid grid(opt.dim, opt.grid_n, opt.L);
  TwoFluidSolver solver(grid, params);
  const auto part = build_partition(grid);

  SpectralState st;
  if (!opt.input_snapshot.empty()) {
    auto [field, snap_params] = read_snapshot(opt.input_snapshot);
    (void)snap_params;
    st = solver.to_spectral_state(field);
  } else {
    st = solver.initial_data(opt.solver);
  }

  std::vector<std::pair<double, ShellSum>> norms;
  for (const auto& entry : opt.norm_list) {
    const auto colon = entry.find(':');
    const std::string rs = entry.substr(colon + 1);
    norms.push_back({std::stod(entry.substr(0, colon)),
                     rs == "inf" ? ShellSum::LInf : ShellSum::L1});
  }
  std::vector<std::pair<double, double>> lps;
  for (const auto& entry : opt.lp_list)
    lps.push_back(parse_pair(entry, "lp_list"));

  namespace fs = std::filesystem;
  fs::create_directories(opt.output_dir);
  if (opt.snapshot_every > 0)
    fs::create_directories(opt.output_dir + "/snapshots");

  std::ofstream csv(opt.output_dir + "/norms.csv");
  csv.precision(12);
  csv << "t";
  for (const auto& [s, r] : norms)
    csv << ",B[s=" << s << (r == ShellSum::L1 ? ";r=1]" : ";r=inf]")
        << ",Bl[s=" << s << (r == ShellSum::L1 ? ";r=1]" : ";r=inf]");
  for (const auto& [p, k] : lps) csv << ",Lp[p=" << p << ";k=" << k << "]";
  csv << "\n";

  int sample = 0;
  auto observer = [&](const SpectralState& s) {
    const auto shells = weighted_shell_spectrum(s, solver.coeffs(), part);
    csv << s.time;
    for (const auto& [sv, r] : norms) {
      csv << "," << besov_norm(shells, sv, r);
      csv << "," << besov_norm_low(shells, sv, part.j0);
    }
    for (const auto& [p, k] : lps)
      csv << "," << lp_norm(s, solver.transform(), p, k);
    csv << "\n";
    if (opt.snapshot_every > 0 && sample % opt.snapshot_every == 0) {
      char name[32];
      std::snprintf(name, sizeof(name), "%04d", sample);
      write_snapshot(opt.output_dir + "/snapshots/" + name,
                     solver.to_field_state(s), params);
    }
    ++sample;
  };

  if (opt.scheme == "picard") {
    std::vector<SpectralState> traj;
    const auto report = solver.picard_iterate(
        st, opt.solver, make_x_metric(solver.coeffs(), part), &traj);
    for (const auto& state : traj) observer(state);
    nlohmann::json j;
    j["contracted"] = report.contracted;
    j["iterations"] = report.iterations;
    j["diff_norms"] = report.diff_norms;
    j["ratios"] = report.ratios;
    std::ofstream(opt.output_dir + "/contraction.json") << j.dump(2) << "\n";
    if (!report.contracted)
      std::fprintf(stderr, "twofluid: picard iteration did not contract\n");
  } else {
    solver.simulate(st, opt.solver, observer);
  }
  write_snapshot(opt.output_dir + "/final", solver.to_field_state(st), params);
  return 0;
}

int run_fit_decay(const std::string& input, const std::string& column,
                  double t1, double t2, double theory) {
  std::ifstream in(input);
  if (!in) throw std::invalid_argument("fit-decay: cannot open " + input);
  std::string header;
  std::getline(in, header);
  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string item;
    while (std::getline(ss, item, ',')) cols.push_back(item);
  }
  int target = -1;
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (cols[i] == column) target = static_cast<int>(i);
  if (target < 0)
    throw std::invalid_argument("fit-decay: no column named '" + column + "'");

  std::vector<double> times, values;
  std::string line;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string item;
    int idx = 0;
    double t = 0.0, v = 0.0;
    while (std::getline(ss, item, ',')) {
      if (idx == 0) t = std::stod(item);
      if (idx == target) v = std::stod(item);
      ++idx;
    }
    times.push_back(t);
    values.push_back(v);
  }
  const auto fit = fit_power_law(times, values, t1, t2, theory, column);
  std::cout << "label,slope,intercept,t1,t2,residual,theory_slope,relative_"
               "gap,samples\n";
  std::cout << fit.label << "," << fit.slope << "," << fit.intercept << ","
            << fit.t1 << "," << fit.t2 << "," << fit.residual << ","
            << fit.theory_slope << "," << fit.relative_gap << ","
            << fit.samples << "\n";
  return 0;
}

struct ReportOptions {
  std::string kind = "linear";
  SimulateOptions sim;
  std::string s_csv = "0,1,2";
  int q0 = 0;
  double fit_t1 = 10.0;
  double fit_t2 = 0.0;  // 0: linear default 1000 / nonlinear gap window
  int t_samples = 40;
  double epsilon = 0.1;
  std::string output_dir;

  bool apply(const std::string& key, const std::vector<std::string>& vals) {
    const std::string& v = vals.back();
    if (key == "kind") kind = v;
    else if (key == "s_list") s_csv = v;
    else if (key == "q0") q0 = std::stoi(v);
    else if (key == "fit_t1") fit_t1 = std::stod(v);
    else if (key == "fit_t2") fit_t2 = std::stod(v);
    else if (key == "t_samples") t_samples = std::stoi(v);
    else if (key == "epsilon") epsilon = std::stod(v);
    else if (key == "report_dir") output_dir = v;
    else return sim.apply(key, vals);
    return true;
  }
};

int run_report(const ReportOptions& opt) {
  ExperimentConfig cfg;
  cfg.kind = opt.kind;
  cfg.params = opt.sim.cp.to_params(opt.sim.dim);
  cfg.s_list = parse_list(opt.s_csv);
  cfg.q0 = opt.q0;
  cfg.fit_t1 = opt.fit_t1;
  cfg.fit_t2 = (opt.kind == "linear" && opt.fit_t2 <= 0.0) ? 1000.0
                                                           : opt.fit_t2;
  cfg.t_samples = opt.t_samples;
  cfg.epsilon = opt.epsilon;
  if (opt.kind == "nonlinear") {
    cfg.grid = PeriodicGrid(opt.sim.dim, opt.sim.grid_n, opt.sim.L);
    cfg.solver = opt.sim.solver;
    for (const auto& entry : opt.sim.lp_list)
      cfg.lp_list.push_back(parse_pair(entry, "lp_list"));
    cfg.snapshot_every = opt.sim.snapshot_every;
  }
  std::string dir = opt.output_dir;
  if (dir.empty()) {
    // distinct campaign cells land in distinct hash-keyed directories
    const std::size_t h = std::hash<std::string>{}(cfg.echo().dump());
    char buf[32];
    std::snprintf(buf, sizeof(buf), "report_%08zx", h & 0xffffffffu);
    dir = buf;
  }
  cfg.output_dir = dir;
  const auto rep = run_experiment(cfg);
  emit_report(rep, dir);
  std::cout << dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral laboratory for a compressible two-fluid model"};
  app.require_subcommand(1);

  // closure eval
  auto* closure_cmd = app.add_subcommand("closure", "algebraic closure");
  auto* closure_eval =
      closure_cmd->add_subcommand("eval", "evaluate the closure at (R+, R-)");
  CommonParams closure_params;
  double r_plus = 1.0, r_minus = 1.0;
  closure_params.attach(closure_eval);
  closure_eval->add_option("--r_plus,--r-plus", r_plus);
  closure_eval->add_option("--r_minus,--r-minus", r_minus);

  // lp norms
  auto* lp_cmd = app.add_subcommand("lp", "Littlewood-Paley analysis");
  auto* lp_norms = lp_cmd->add_subcommand("norms", "Besov norms of a snapshot");
  std::string lp_input, lp_s = "0", lp_r = "1";
  lp_norms->add_option("--input", lp_input)->required();
  lp_norms->add_option("--s", lp_s);
  lp_norms->add_option("--r", lp_r)->check(CLI::IsMember({"1", "inf"}));

  // linear margin / semigroup-decay
  auto* linear_cmd = app.add_subcommand("linear", "linearized symbol analysis");
  auto* margin_cmd =
      linear_cmd->add_subcommand("margin", "dissipation margin over |xi|");
  CommonParams margin_params;
  double xi_min = 1e-3, xi_max = 256.0;
  int xi_samples = 33;
  margin_params.attach(margin_cmd);
  margin_cmd->add_option("--xi_min,--xi-min", xi_min);
  margin_cmd->add_option("--xi_max,--xi-max", xi_max);
  margin_cmd->add_option("--xi_samples,--xi-samples", xi_samples);

  auto* semi_cmd = linear_cmd->add_subcommand(
      "semigroup-decay", "low-frequency semigroup Besov norms");
  CommonParams semi_params;
  int semi_dim = 2, semi_samples = 25, semi_q0 = 0;
  std::string semi_s = "0,1,2";
  double semi_tmin = 1.0, semi_tmax = 1000.0;
  semi_params.attach(semi_cmd);
  semi_cmd->add_option("--dim", semi_dim)->check(CLI::IsMember({2, 3}));
  semi_cmd->add_option("--s", semi_s);
  semi_cmd->add_option("--t_min,--t-min", semi_tmin);
  semi_cmd->add_option("--t_max,--t-max", semi_tmax);
  semi_cmd->add_option("--t_samples,--t-samples", semi_samples);
  semi_cmd->add_option("--q0", semi_q0);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "pseudo-spectral integration");
  std::string sim_config;
  sim_cmd->add_option("--config", sim_config)
      ->description("TOML or JSON file with keys named like the long options");
  SimulateOptions sim;
  sim.attach(sim_cmd);

  // fit-decay
  auto* fit_cmd = app.add_subcommand("fit-decay", "power-law fit of a series");
  std::string fit_input, fit_column;
  double fit_t1 = 10.0, fit_t2 = 1000.0, fit_theory = 0.0;
  fit_cmd->add_option("--input", fit_input)->required();
  fit_cmd->add_option("--column", fit_column)->required();
  fit_cmd->add_option("--t1", fit_t1);
  fit_cmd->add_option("--t2", fit_t2);
  fit_cmd->add_option("--theory", fit_theory);

  // report
  auto* report_cmd = app.add_subcommand("report", "run a decay campaign");
  std::string report_config;
  report_cmd->add_option("--config", report_config)
      ->description("TOML or JSON file with keys named like the long options");
  ReportOptions rep;
  report_cmd->add_option("--kind", rep.kind)
      ->check(CLI::IsMember({"linear", "nonlinear"}));
  rep.sim.attach(report_cmd);
  report_cmd->add_option("--s_list,--s-list", rep.s_csv);
  report_cmd->add_option("--q0", rep.q0);
  report_cmd->add_option("--fit_t1,--fit-t1", rep.fit_t1);
  report_cmd->add_option("--fit_t2,--fit-t2", rep.fit_t2);
  report_cmd->add_option("--t_samples,--t-samples", rep.t_samples);
  report_cmd->add_option("--epsilon", rep.epsilon);
  report_cmd->add_option("--report_dir,--report-dir", rep.output_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (closure_eval->parsed())
      return run_closure_eval(closure_params, r_plus, r_minus);
    if (lp_norms->parsed()) return run_lp_norms(lp_input, lp_s, lp_r);
    if (margin_cmd->parsed())
      return run_linear_margin(margin_params, xi_min, xi_max, xi_samples);
    if (semi_cmd->parsed())
      return run_semigroup(semi_params, semi_dim, semi_s, semi_tmin, semi_tmax,
                           semi_samples, semi_q0);
    if (sim_cmd->parsed()) return run_simulate(sim);
    if (fit_cmd->parsed())
      return run_fit_decay(fit_input, fit_column, fit_t1, fit_t2, fit_theory);
    if (report_cmd->parsed()) return run_report(rep);
    std::fprintf(stderr, "twofluid: no subcommand\n");
    return 2;
  } catch (const NumericalAbort& e) {
    std::fprintf(stderr, "twofluid: numerical abort: %s\n", e.what());
    return 3;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "twofluid: convergence failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "twofluid: %s\n", e.what());
    return 2;
  }
}
