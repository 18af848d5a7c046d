#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "hessianlab/identities.hpp"
#include "hessianlab/parallel.hpp"
#include "hessianlab/pde/grid.hpp"
#include "hessianlab/pde/radial.hpp"
#include "hessianlab/pde/rescale.hpp"
#include "hessianlab/search.hpp"

namespace hessianlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw ConfigError("config: empty list '" + text + "'");
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.rfind("log:", 0) == 0) {
    std::istringstream is(text.substr(4));
    std::string a, b, c;
    std::getline(is, a, ':');
    std::getline(is, b, ':');
    std::getline(is, c, ':');
    double lo = std::stod(a), hi = std::stod(b);
    int pts = std::stoi(c);
    if (!(lo > 0.0 && hi > lo && pts >= 1))
      throw ConfigError("config: bad log grid spec " + text);
    std::vector<double> out;
    for (int i = 0; i < pts; ++i)
      out.push_back(lo * std::pow(hi / lo, pts == 1 ? 0.0 : double(i) / (pts - 1)));
    return out;
  }
  return parse_list(text);
}

ConeContext context_from(const Config& c) {
  ConeContext ctx;
  ctx.n = int(cfg_int(c, "n", 4));
  ctx.k = int(cfg_int(c, "k", 3));
  ctx.A = cfg_num(c, "A", 1.0);
  ctx.sigma_min = cfg_num(c, "sigma_min", 0.9);
  ctx.sigma_max = cfg_num(c, "sigma_max", 1.1);
  try {
    ctx.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return ctx;
}

IneqParams params_from(const Config& c, int k) {
  DefaultConstants d = default_constants(std::max(2, k));
  IneqParams p;
  p.K = cfg_num(c, "K", d.K);
  p.A = cfg_num(c, "A", 1.0);
  p.delta0 = cfg_num(c, "delta0", d.delta0);
  p.epsilon = cfg_num(c, "epsilon", d.epsilon);
  p.delta = cfg_num(c, "delta", 0.5);
  p.delta_prime = cfg_num(c, "delta_prime", 0.1);
  p.l = int(cfg_int(c, "l", 1));
  p.i = int(cfg_int(c, "i", 1));
  return p;
}

StratumSpec stratum_from(const Config& c) {
  std::string s = cfg_str(c, "stratum", "interior");
  StratumSpec st;
  if (s == "interior") {
    st.kind = Stratum::interior;
  } else if (s == "near-boundary") {
    st.kind = Stratum::near_boundary;
  } else if (s.rfind("claim:", 0) == 0) {
    st.kind = Stratum::claim_regime;
    std::istringstream is(s.substr(6));
    std::string l, M;
    std::getline(is, l, ':');
    std::getline(is, M, ':');
    st.l = std::stoi(l);
    st.M = std::stod(M);
  } else {
    throw ConfigError("config: unknown stratum '" + s + "'");
  }
  return st;
}

pde::RadialF radial_f_from(const Config& c) {
  std::string f = cfg_str(c, "f", "one");
  if (f == "one") return [](double) { return 1.0; };
  if (f == "one_plus_r2") return [](double r) { return 1.0 + r * r; };
  if (f.rfind("poly:", 0) == 0) {
    std::vector<double> coeff = parse_list(f.substr(5));
    return [coeff](double r) {
      double acc = 0.0, p = 1.0;
      for (double cj : coeff) {
        acc += cj * p;
        p *= r;
      }
      return acc;
    };
  }
  throw ConfigError("config: unknown radial f '" + f + "'");
}

void write_report(const RunOptions& run, const json& report) {
  write_text_file(run.out_dir + "/report.json", report.dump(2) + "\n");
}

void write_meta(const RunOptions& run, double seconds) {
  json meta;
  auto now = std::chrono::system_clock::now().time_since_epoch();
  meta["timestamp_unix"] =
      double(std::chrono::duration_cast<std::chrono::milliseconds>(now).count()) /
      1000.0;
  meta["duration_seconds"] = seconds;
  write_text_file(run.out_dir + "/run_meta.json", meta.dump(2) + "\n");
}

}  // namespace

int cmd_identities(const RunOptions& run) {
  IdentitySuiteConfig cfg;
  cfg.n_min = int(cfg_int(run.config, "n_min", 3));
  cfg.n_max = int(cfg_int(run.config, "n_max", 6));
  cfg.samples_per_pair = int(cfg_int(run.config, "samples", 2000));
  cfg.seed = std::uint64_t(cfg_int(run.config, "seed", 20240001));
  cfg.workers = int(cfg_int(run.config, "workers", 0));
  cfg.tolerance_scale = cfg_num(run.config, "tolerance_scale", 1.0);
  cfg.fault = cfg_str(run.config, "fault", "");

  std::vector<IdentityResult> results = run_identity_suite(cfg);
  json rep;
  rep["suite"] = "identities";
  std::vector<json> out;
  for (const IdentityResult& r : results) {
    json j;
    j["name"] = r.name;
    j["max_residual"] = r.max_residual;
    j["tolerance"] = r.tolerance;
    j["samples"] = r.samples;
    j["pass"] = r.pass;
    if (!r.pass) j["worst_witness"] = r.worst_witness;
    out.push_back(j);
  }
  rep["identities"] = out;
  auto failed = first_failure(results);
  rep["all_pass"] = !failed.has_value();
  if (failed) rep["first_failure"] = *failed;
  write_report(run, rep);
  if (failed) {
    std::cerr << "identity breach: " << *failed << "\n";
    return 1;
  }
  return 0;
}

int cmd_inequality(const RunOptions& run) {
  const Config& c = run.config;
  ConeContext ctx = context_from(c);
  std::string id_name = cfg_str(c, "inequality", "main");
  int count = int(cfg_int(c, "count", 2000));
  std::uint64_t seed = std::uint64_t(cfg_int(c, "seed", 1));
  double tol = 1e-9 * cfg_num(c, "tolerance_scale", 1.0);
  IneqParams p = params_from(c, ctx.k);
  SampleBatch batch = sample(ctx, stratum_from(c), count, seed,
                             cfg_num(c, "lambda1_max", 1e4));

  json rep;
  rep["inequality"] = id_name;
  rep["count"] = count;
  std::ostringstream witnesses;
  double min_norm = 1e300;
  json min_report;
  int violations = 0;

  if (id_name == "hs_qq2" || id_name == "quotient_chain" || id_name == "decomposition") {
    double C_fit = cfg_num(c, "C_fit", 0.0);
    if (id_name != "hs_qq2" && C_fit <= 0.0) {
      FitQuantity q = id_name == "quotient_chain" ? FitQuantity::quotient_chain
                                                  : FitQuantity::decomposition;
      FitResult fit = fit_constant(q, batch, ctx.k, seed ^ 0x9999);
      C_fit = fit.fitted;
      rep["fitted_C"] = C_fit;
      rep["fit_excluded"] = fit.excluded;
    }
    for (int idx = 0; idx < count; ++idx) {
      Rng rng = Rng::stream(seed ^ 0x55aa, std::uint64_t(idx) + 1);
      VectorXd dir = rng.unit_vec(ctx.n);
      ChainGap gph;
      if (id_name == "hs_qq2") {
        if (ctx.k > ctx.n - 1) throw ConfigError("hs_qq2 needs k <= n-1");
        // needs Gamma_{k+1}: skip samples outside
        VectorXd table = sym_table(batch.spectra[idx].values());
        if (first_cone_failure(table, ctx.k + 1) != 0) continue;
        gph = hs_qq2_gap(batch.spectra[idx], dir, ctx.k);
      } else if (id_name == "quotient_chain") {
        gph = quotient_chain_gap(batch.spectra[idx], dir, ctx.k, C_fit);
      } else {
        gph = decomposition_gap(batch.spectra[idx], dir, ctx.k, ctx.A, C_fit);
        if (gph.vacuous) continue;
      }
      json entry = {{"lambda", std::vector<double>(
                                   batch.spectra[idx].values().data(),
                                   batch.spectra[idx].values().data() + ctx.n)},
                    {"direction", std::vector<double>(dir.data(), dir.data() + ctx.n)},
                    {"gap", gph.gap},
                    {"scale", gph.scale}};
      double normed = gph.gap / gph.scale;
      if (normed < min_norm) {
        min_norm = normed;
        min_report = entry;
      }
      if (gph.gap < -tol * gph.scale) {
        ++violations;
        witnesses << entry.dump() << "\n";
      }
    }
  } else {
    Ineq id = ineq_from_name(id_name);
    // both floor modes of the main inequality: a fixed a-priori A or the
    // per-sample tight floor A = max(0, -lambda_n)
    bool tight = cfg_str(c, "A_mode", "fixed") == "tight";
    for (int idx = 0; idx < count; ++idx) {
      Rng rng = Rng::stream(seed ^ 0x55aa, std::uint64_t(idx) + 1);
      VectorXd xi = rng.unit_vec(ctx.n);
      IneqParams ps = p;
      if (tight) ps.A = std::max(0.0, -batch.spectra[idx][ctx.n - 1]);
      GapReport g = evaluate_gap(id, batch.spectra[idx], xi, ctx.k, ps);
      double normed = g.gap / g.scale;
      if (normed < min_norm) {
        min_norm = normed;
        min_report = gap_report_to_json(g);
      }
      if (g.gap < -tol * g.scale) {
        ++violations;
        witnesses << gap_report_to_json(g).dump() << "\n";
      }
    }
  }
  rep["min_gap_over_scale"] = min_norm;
  rep["violations"] = violations;
  rep["verdict"] = violations == 0 ? "no violation found" : "violations found";
  if (!min_report.is_null()) rep["min_witness"] = min_report;
  write_report(run, rep);
  write_text_file(run.out_dir + "/witnesses.jsonl", witnesses.str());
  return 0;
}

int cmd_search(const RunOptions& run) {
  const Config& c = run.config;
  SearchConfig cfg;
  cfg.ctx = context_from(c);
  cfg.inequality = ineq_from_name(cfg_str(c, "inequality", "main"));
  cfg.params = params_from(c, cfg.ctx.k);
  cfg.restarts = int(cfg_int(c, "restarts", 64));
  cfg.max_iters = int(cfg_int(c, "iters", 400));
  cfg.seed = std::uint64_t(cfg_int(c, "seed", 1));
  cfg.lambda1_threshold = cfg_num(c, "lambda1_threshold", 0.0);
  cfg.fix_lambda1 = cfg_bool(c, "fix_lambda1", false);
  cfg.lambda1_max = cfg_num(c, "lambda1_max", 1e4);
  cfg.enforce_hypothesis = cfg_bool(c, "enforce_hypothesis", false);
  cfg.tight_floor = cfg_str(c, "A_mode", "fixed") == "tight";
  cfg.workers = int(cfg_int(c, "workers", 0));
  double tol = 1e-9 * cfg_num(c, "tolerance_scale", 1.0);

  std::string mode = cfg_str(c, "mode", "minimize");
  json rep;
  if (mode == "scan") {
    std::vector<double> grid = parse_grid(cfg_str(c, "lambda1_grid", "log:2:4096:12"));
    ThresholdScanResult scan = threshold_scan(cfg, grid, tol);
    rep["scan"] = threshold_scan_to_json(scan);
    write_text_file(run.out_dir + "/frontier.csv", frontier_csv(scan));
    if (cfg_bool(c, "svg", false)) {
      std::vector<double> xs, ys;
      for (const FrontierPoint& fp : scan.curve)
        if (fp.feasible) {
          xs.push_back(std::log10(fp.lambda1));
          ys.push_back(fp.min_gap / fp.scale);
        }
      write_text_file(run.out_dir + "/frontier.svg",
                      svg_line_plot(xs, ys, "min gap / scale vs log10 lambda1"));
    }
    rep["verdict"] = scan.threshold ? "threshold found" : "no nonnegative tail";
    write_report(run, rep);
    return 0;
  }
  if (mode != "minimize") throw ConfigError("config: mode must be minimize or scan");

  SearchResult result = minimize_gap(cfg);
  rep["search"] = search_result_to_json(result);
  if (!result.best) {
    rep["verdict"] = "infeasible: no feasible witness found";
    write_report(run, rep);
    std::cerr << "search: no feasible witness found\n";
    return 1;
  }
  bool negative = result.best->gap < -tol * result.best->scale;
  rep["verdict"] = negative ? "counterexample found" : "no violation found at budget";
  write_report(run, rep);
  write_text_file(run.out_dir + "/witnesses.jsonl",
                  gap_report_to_json(*result.best).dump() + "\n");
  return 0;
}

int cmd_solve_radial(const RunOptions& run) {
  const Config& c = run.config;
  int n = int(cfg_int(c, "n", 3));
  int k = int(cfg_int(c, "k", 2));
  double R = cfg_num(c, "R", 1.0);
  int nodes = int(cfg_int(c, "nodes", 1001));
  pde::RadialF f = radial_f_from(c);

  json rep;
  pde::RadialProfile prof;
  try {
    prof = pde::radial_solve(n, k, R, f, nodes);
  } catch (const Error& e) {
    std::cerr << "solve-radial: " << e.what() << "\n";
    return 1;
  }
  rep["n"] = n;
  rep["k"] = k;
  rep["R"] = R;
  rep["nodes"] = nodes;
  rep["residual"] = pde::radial_residual(prof, f);
  rep["fd_residual"] = pde::radial_fd_residual(prof, f);
  rep["admissible"] = pde::radial_admissible(prof);

  if (cfg_str(c, "f", "one") == "one") {
    pde::RadialProfile exact = pde::radial_closed_form(n, k, R, nodes);
    double sup = (prof.u - exact.u).cwiseAbs().maxCoeff();
    rep["closed_form_sup_error"] = sup;
  }

  std::vector<double> alphas = parse_list(cfg_str(c, "alphas", "0,1,2"));
  json diag;
  for (double a : alphas) {
    pde::PogorelovDiagnostic d = pde::pogorelov_diagnostic(prof, a);
    diag.push_back({{"alpha", a}, {"value", d.value}, {"node", d.node}});
  }
  rep["pogorelov"] = diag;

  std::ostringstream csv;
  csv.precision(17);
  csv << "r,u,du,d2u,lambda_radial,lambda_tangential\n";
  for (int i = 0; i < nodes; ++i) {
    double tangential = (i == 0) ? prof.d2u[0] : prof.du[i] / prof.r[i];
    csv << prof.r[i] << "," << prof.u[i] << "," << prof.du[i] << "," << prof.d2u[i]
        << "," << prof.d2u[i] << "," << tangential << "\n";
  }
  write_text_file(run.out_dir + "/solution.csv", csv.str());
  rep["verdict"] = "solved";
  write_report(run, rep);
  return 0;
}

int cmd_solve_grid(const RunOptions& run) {
  const Config& c = run.config;
  int n = int(cfg_int(c, "n", 2));
  int k = int(cfg_int(c, "k", 2));
  int N = int(cfg_int(c, "N", 65));
  double half = cfg_num(c, "half", 1.0);
  std::string domain = cfg_str(c, "domain", "square");
  double fconst = cfg_num(c, "f_const", 1.0);
  pde::FieldF f = [fconst](const VectorXd&) { return fconst; };

  pde::SolveOptions opts;
  opts.tol_rel = cfg_num(c, "tol_rel", 1e-6);
  opts.max_newton = int(cfg_int(c, "max_newton", 60));

  auto solve_at = [&](int nn, pde::GridField& out) {
    if (domain == "square" || domain == "cube") {
      out = pde::make_cube(n, k, half, nn);
      pde::Barrier w = pde::comparison_barrier(n, k, fconst, double(n) * half * half);
      return pde::grid_solve_homotopy(out, f, w, opts);
    }
    if (domain == "ball") {
      double ball_r = cfg_num(c, "ball_r", 0.8 * half);
      pde::RadialProfile rad = pde::radial_solve(
          n, k, ball_r, [&](double) { return fconst; }, 2049);
      auto g = [rad, ball_r](const VectorXd& x) {
        double r = x.norm();
        if (r >= ball_r) {  // quadratic continuation past the sphere
          double dr = r - ball_r;
          int last = int(rad.r.size()) - 1;
          return rad.du[last] * dr + 0.5 * rad.d2u[last] * dr * dr;
        }
        double pos = r / ball_r * double(rad.r.size() - 1);
        int i = std::min(int(rad.r.size()) - 2, int(pos));
        double w = pos - i;
        return (1.0 - w) * rad.u[i] + w * rad.u[i + 1];
      };
      out = pde::make_ball_in_cube(n, k, half, nn, ball_r, g);
      // start from the data extension itself: smooth, admissible at any h
      for (long node = 0; node < out.size(); ++node)
        if (out.interior(node)) out.u[node] = g(out.coord(node));
      return pde::grid_solve(out, f, opts);
    }
    throw ConfigError("config: unknown domain '" + domain + "'");
  };

  pde::GridField field;
  pde::SolveStats stats = solve_at(N, field);

  json rep;
  rep["n"] = n;
  rep["k"] = k;
  rep["N"] = N;
  rep["domain"] = domain;
  rep["converged"] = stats.converged;
  rep["newton_iters"] = stats.newton_iters;
  rep["residual"] = stats.residual;
  rep["f_inf"] = stats.f_inf;
  if (!stats.failure.empty()) rep["failure"] = stats.failure;
  rep["admissible"] = pde::grid_admissible(field);
  if (domain == "square" || domain == "cube") {
    pde::Barrier w = pde::comparison_barrier(n, k, fconst, double(n) * half * half);
    rep["barrier"] = {{"a", w.a}, {"b", w.b},
                      {"sandwich_holds", pde::barrier_sandwich_holds(field, w)}};
  }

  if (cfg_bool(c, "mesh_study", false)) {
    pde::GridField fine;
    pde::SolveStats fstats = solve_at(2 * N - 1, fine);
    double dsup = 0.0;
    for (long node = 0; node < field.size(); ++node) {
      if (!field.interior(node)) continue;
      int i = int(node / N), j = int(node % N);
      long fnode = fine.index(2 * i, 2 * j);
      dsup = std::max(dsup, std::abs(field.u[node] - fine.u[fnode]));
    }
    rep["mesh_study"] = {{"fine_converged", fstats.converged},
                         {"sup_difference", dsup}};
  }

  std::ostringstream csv;
  csv.precision(17);
  csv << (n == 2 ? "x,y,u,lambda_max,lambda_min\n" : "x,y,z,u,lambda_max,lambda_min\n");
  for (long node = 0; node < field.size(); ++node) {
    if (!field.interior(node)) continue;
    VectorXd x = field.coord(node);
    VectorXd ev = pde::symmetric_eigenvalues(pde::discrete_hessian(field, node));
    for (int a = 0; a < n; ++a) csv << x[a] << ",";
    csv << field.u[node] << "," << ev[0] << "," << ev[ev.size() - 1] << "\n";
  }
  write_text_file(run.out_dir + "/solution.csv", csv.str());
  rep["verdict"] = stats.converged ? "solved" : "not converged";
  write_report(run, rep);
  if (!stats.converged) {
    std::cerr << "solve-grid: " << stats.failure << "\n";
    return 1;
  }
  return 0;
}

int cmd_rigidity(const RunOptions& run) {
  const Config& c = run.config;
  int n = int(cfg_int(c, "n", 3));
  int k = int(cfg_int(c, "k", 2));
  std::string sname = cfg_str(c, "surrogate", "quadratic");
  pde::Surrogate s;
  if (sname == "quadratic") {
    s = pde::quadratic_surrogate(n, k);
  } else if (sname.rfind("bump:", 0) == 0) {
    s = pde::bump_surrogate(n, k, std::stod(sname.substr(5)));
  } else if (sname == "growth_violating") {
    s = pde::growth_violating_surrogate(n, k);
  } else {
    throw ConfigError("config: unknown surrogate '" + sname + "'");
  }
  std::vector<double> radii = parse_list(cfg_str(c, "radii", "1,2,4,8"));
  double alpha = cfg_num(c, "alpha", 2.0);
  int pts = int(cfg_int(c, "pts", 33));

  pde::RescaleReport rr = pde::rescale_family(s, radii, alpha, pts);
  json rep;
  rep["surrogate"] = s.name;
  rep["alpha"] = alpha;
  if (rr.rejection) {
    rep["verdict"] = "growth hypothesis rejected";
    rep["certificate"] = {
        {"x", std::vector<double>(rr.rejection->x.data(),
                                  rr.rejection->x.data() + rr.rejection->x.size())},
        {"u", rr.rejection->u_value},
        {"quadratic_bound", rr.rejection->quadratic_bound}};
    write_report(run, rep);
    return 0;
  }
  json entries;
  for (const pde::RescaleEntry& e : rr.entries)
    entries.push_back({{"R", e.R},
                       {"sup_hess", e.sup_hess},
                       {"hess_invariance", e.hess_invariance},
                       {"pogorelov", e.pogorelov}});
  rep["entries"] = entries;
  rep["spread"] = rr.spread;
  rep["pogorelov_C"] = rr.pogorelov_C;
  rep["bound_2alpha_C"] = rr.bound;
  rep["verdict"] = "family evaluated";
  write_report(run, rep);
  return 0;
}

int dispatch(const std::string& command, RunOptions run) {
  auto started = std::chrono::steady_clock::now();
  try {
    fs::create_directories(run.out_dir);
    Config archived = run.config;
    archived["command"] = command;
    write_text_file(run.out_dir + "/resolved.cfg", serialize_config(archived));

    int rc;
    if (command == "identities") rc = cmd_identities(run);
    else if (command == "inequality") rc = cmd_inequality(run);
    else if (command == "search") rc = cmd_search(run);
    else if (command == "solve-radial") rc = cmd_solve_radial(run);
    else if (command == "solve-grid") rc = cmd_solve_grid(run);
    else if (command == "rigidity") rc = cmd_rigidity(run);
    else throw ConfigError("unknown command: " + command);

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                started)
                      .count();
    write_meta(run, secs);
    return rc;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hessianlab::cli
