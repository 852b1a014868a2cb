// syl: batch CLI for the spinor-bubble / curvature / torus-solver laboratory.
//
// Subcommands:
//   bubble   ground state of the limit equation on R^2 (shooting)
//   theta    curvature and the concentration functional on a surface chart
//   torus    strongly indefinite solve of the reduced equation on a flat torus
//
// Exit codes: 0 success, 1 usage/validation error, 2 numerical failure.
// Human-readable text goes to stderr; with --json a machine-readable summary
// goes to stdout.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "syl/bubble.hpp"
#include "syl/geometry.hpp"
#include "syl/io.hpp"
#include "syl/torus.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void emit(const json& payload, bool as_json) {
  if (as_json) std::cout << payload.dump(2) << std::endl;
}

int numerical_failure(const fs::path& outdir, const std::string& what, bool as_json) {
  const json err = {{"error", what}};
  if (!outdir.empty()) syl::io::write_text(outdir / "error.json", err.dump(2) + "\n");
  std::cerr << "numerical failure: " << what << "\n";
  if (as_json) std::cout << err.dump(2) << std::endl;
  return 2;
}

int cmd_bubble(double lambda, double p, int S, double rmax, const std::string& out,
               bool as_json) {
  Timer timer;
  syl::BubbleParams prm;
  prm.lambda = lambda;
  prm.p = p;
  prm.S = S;
  if (rmax > 0.0) prm.r_max = rmax;
  prm.validate();

  const fs::path outdir(out);
  fs::create_directories(outdir);
  syl::GroundState gs;
  try {
    gs = syl::find_ground_state(prm);
  } catch (const syl::NoBracketError& e) {
    return numerical_failure(outdir, e.what(), as_json);
  } catch (const syl::NotConvergedError& e) {
    return numerical_failure(outdir, e.what(), as_json);
  }

  syl::io::write_profile_csv(outdir / "profile.csv", gs.profile);
  const json report = syl::io::report_to_json(gs.report);
  syl::io::write_text(outdir / "report.json", report.dump(2) + "\n");
  const json config = {{"lambda", lambda}, {"p", p}, {"S", S},
                       {"r_max", prm.effective_r_max()}};
  syl::io::write_manifest(outdir / "manifest.json", "bubble", config,
                          {"profile.csv", "report.json"}, timer.seconds());

  std::cerr << "mu0 = " << syl::io::fmt(gs.report.mu0)
            << "  v0* = " << syl::io::fmt(gs.report.v0_star)
            << "  residual_2d = " << syl::io::fmt(gs.report.residual_2d)
            << "  decay = " << syl::io::fmt(gs.report.decay_rate) << "\n";
  emit(report, as_json);
  return 0;
}

int cmd_theta(const std::string& chart_spec, const std::string& profile_path, double lambda,
              double p, int S, bool argmax, bool full, std::vector<double> point,
              const std::string& curvature_csv, int grid_n, const std::string& out,
              bool as_json) {
  Timer timer;
  std::unique_ptr<syl::Chart> chart;
  try {
    chart = syl::io::chart_from_spec(chart_spec);
  } catch (const std::exception& e) {
    std::cerr << "chart validation failed: " << e.what() << "\n";
    return 2;
  }

  syl::BubbleParams prm;
  prm.lambda = lambda;
  prm.p = p;
  prm.S = S;
  prm.validate();
  const syl::RadialProfile profile = syl::io::read_profile_csv(profile_path, prm);

  const fs::path outdir(out);
  fs::create_directories(outdir);

  json payload;
  if (argmax || point.empty()) {
    const syl::ArgmaxResult am = syl::argmax_theta(*chart, profile, grid_n);
    payload = syl::io::argmax_to_json(am);
    std::cerr << "argmax at (s,t) = (" << syl::io::fmt(am.point.s) << ", "
              << syl::io::fmt(am.point.t) << ")  K = " << syl::io::fmt(am.report.K)
              << "  theta = " << syl::io::fmt(am.report.theta)
              << (am.tie_flag ? "  [ties]" : "") << "\n";
    if (full) {
      const syl::CurvatureData cd = syl::curvature_at(*chart, am.point);
      const double H = 25.0 / syl::decay_fit(profile);
      const syl::SampledSpinor field = syl::sample_ansatz(profile, H, 801);
      payload["full"] = syl::io::theta_to_json(syl::theta_full(cd, field));
    }
  } else {
    if (point.size() != 2) {
      std::cerr << "--point needs s,t\n";
      return 1;
    }
    const syl::ChartPoint q{point[0], point[1]};
    const syl::CurvatureData cd = syl::curvature_at(*chart, q);
    syl::ThetaReport rep = syl::theta_ansatz(cd.gauss, profile);
    rep.point = q;
    payload = syl::io::theta_to_json(rep);
    if (full) {
      const double H = 25.0 / syl::decay_fit(profile);
      const syl::SampledSpinor field = syl::sample_ansatz(profile, H, 801);
      payload["full"] = syl::io::theta_to_json(syl::theta_full(cd, field));
    }
    std::cerr << "K = " << syl::io::fmt(cd.gauss) << "  theta = " << syl::io::fmt(rep.theta)
              << "\n";
  }

  std::vector<std::string> outputs{"theta.json"};
  if (!curvature_csv.empty()) {
    syl::io::write_curvature_csv(outdir / curvature_csv, *chart, grid_n);
    outputs.push_back(curvature_csv);
  }
  syl::io::write_text(outdir / "theta.json", payload.dump(2) + "\n");
  const json config = {{"chart", chart_spec}, {"profile", profile_path}, {"lambda", lambda},
                       {"p", p},              {"S", S},                  {"grid_n", grid_n}};
  syl::io::write_manifest(outdir / "manifest.json", "theta", config, outputs, timer.seconds());
  emit(payload, as_json);
  return 0;
}

int cmd_torus(syl::SolverConfig cfg, const std::vector<double>& sweep, const std::string& out,
              bool as_json) {
  Timer timer;
  cfg.validate();
  const fs::path outdir(out);
  fs::create_directories(outdir);

  if (!sweep.empty()) {
    const auto rows = syl::sweep_eps(cfg, sweep);
    syl::io::write_sweep_csv(outdir / "sweep.csv", rows);
    json jrows = json::array();
    bool all_ok = true;
    for (const auto& r : rows) {
      jrows.push_back({{"eps", r.eps},
                       {"mu_eps", r.mu_eps},
                       {"width", r.width},
                       {"decay_c", r.decay_c},
                       {"grad_norm", r.grad_norm},
                       {"converged", r.converged}});
      all_ok = all_ok && r.converged;
      std::cerr << "eps = " << syl::io::fmt(r.eps)
                << (r.converged
                        ? "  mu_eps = " + syl::io::fmt(r.mu_eps) +
                              "  width = " + syl::io::fmt(r.width)
                        : "  FAILED")
                << "\n";
    }
    const json payload = {{"sweep", jrows}};
    syl::io::write_text(outdir / "result.json", payload.dump(2) + "\n");
    syl::io::write_manifest(outdir / "manifest.json", "torus", syl::io::config_to_json(cfg),
                            {"sweep.csv", "result.json"}, timer.seconds());
    emit(payload, as_json);
    return all_ok ? 0 : 2;
  }

  syl::TorusSolver solver(cfg);
  syl::SolveResult result;
  try {
    result = solver.minimize_nehari();
  } catch (const std::runtime_error& e) {
    return numerical_failure(outdir, e.what(), as_json);
  }
  const json payload = syl::io::solve_to_json(result, cfg);
  syl::io::write_text(outdir / "result.json", payload.dump(2) + "\n");
  syl::io::write_field_csv(outdir / "field.csv", solver, result.psi);
  syl::io::write_manifest(outdir / "manifest.json", "torus", syl::io::config_to_json(cfg),
                          {"result.json", "field.csv"}, timer.seconds());
  std::cerr << "mu_eps = " << syl::io::fmt(result.mu_eps)
            << "  grad = " << syl::io::fmt(result.grad_norm)
            << "  width = " << syl::io::fmt(result.loc.width)
            << "  decay_c = " << syl::io::fmt(result.loc.decay_c) << "\n";
  emit(payload, as_json);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spinorial Yamabe laboratory: bubbles, curvature, torus concentration"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable JSON on stdout");

  // bubble
  auto* bub = app.add_subcommand("bubble", "ground state of the limit equation");
  double lambda = 1.0, p = 3.0, rmax = 0.0;
  int S = 0;
  std::string out = "out";
  bub->add_option("--lambda", lambda, "mass coefficient (> 0)");
  bub->add_option("--p", p, "nonlinearity exponent in (2, 4)");
  bub->add_option("--S", S, "winding number (>= 0)");
  bub->add_option("--rmax", rmax, "truncation radius (default 30 / lambda)");
  bub->add_option("--out", out, "output directory");

  // theta
  auto* th = app.add_subcommand("theta", "curvature and concentration functional");
  std::string chart_spec = "sphere:1", profile_path;
  bool argmax = false, full = false;
  std::vector<double> point;
  std::string curvature_csv;
  int grid_n = 96;
  double t_lambda = 1.0, t_p = 3.0;
  int t_S = 0;
  th->add_option("--chart", chart_spec,
                 "builtin chart sphere:R | ellipsoid:a,b,c | torus:R0,r | flat[:L1,L2], or a "
                 "chart JSON file");
  th->add_option("--profile", profile_path, "bubble profile CSV (header r,u,v)")->required();
  th->add_option("--lambda", t_lambda, "profile mass coefficient");
  th->add_option("--p", t_p, "profile exponent");
  th->add_option("--S", t_S, "profile winding number");
  th->add_flag("--argmax", argmax, "scan + refine the curvature maximizer (default action)");
  th->add_flag("--full", full, "also evaluate both Theta terms on a 2D grid");
  th->add_option("--point", point, "evaluate at chart point s,t instead of the argmax")
      ->expected(2);
  th->add_option("--curvature-csv", curvature_csv, "also write a curvature field CSV (s,t,K)");
  th->add_option("--grid", grid_n, "scan grid resolution");
  th->add_option("--out", out, "output directory");

  // torus
  auto* to = app.add_subcommand("torus", "reduced-equation solve on the flat torus");
  syl::SolverConfig cfg;
  std::vector<int> grid_flag;
  std::vector<double> L_flag, delta_flag, sweep;
  std::string seed_flag, config_path;
  to->add_option("--config", config_path, "solver config JSON (flags override)");
  to->add_option("--eps", cfg.eps, "semiclassical parameter");
  to->add_option("--a", cfg.a, "mass coefficient");
  to->add_option("--p", cfg.p, "nonlinearity exponent in (2, 4)");
  to->add_option("--grid", grid_flag, "modes N1[,N2]")->expected(1, 2)->delimiter(',');
  to->add_option("--L", L_flag, "periods L1[,L2]")->expected(1, 2)->delimiter(',');
  to->add_option("--delta", delta_flag, "spin offsets d1,d2 in {0, 0.5}")
      ->expected(2)
      ->delimiter(',');
  to->add_option("--seed", seed_flag, "bubble | random:N");
  to->add_option("--tol-outer", cfg.tol_outer, "outer gradient tolerance");
  to->add_option("--tol-inner", cfg.tol_inner, "inner gradient tolerance");
  to->add_flag("--dealias", cfg.dealias, "apply the 2/3-rule mode truncation");
  to->add_option("--sweep", sweep, "decreasing eps list; runs sweep_eps")->delimiter(',');
  to->add_option("--out", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (bub->parsed()) return cmd_bubble(lambda, p, S, rmax, out, as_json);
    if (th->parsed())
      return cmd_theta(chart_spec, profile_path, t_lambda, t_p, t_S, argmax, full, point,
                       curvature_csv, grid_n, out, as_json);
    if (to->parsed()) {
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
          std::cerr << "cannot open config: " << config_path << "\n";
          return 1;
        }
        json j;
        in >> j;
        syl::SolverConfig file_cfg = syl::io::config_from_json(j);
        // explicitly-set flags override the file
        if (!to->count("--eps")) cfg.eps = file_cfg.eps;
        if (!to->count("--a")) cfg.a = file_cfg.a;
        if (!to->count("--p")) cfg.p = file_cfg.p;
        if (!to->count("--tol-outer")) cfg.tol_outer = file_cfg.tol_outer;
        if (!to->count("--tol-inner")) cfg.tol_inner = file_cfg.tol_inner;
        if (!to->count("--dealias")) cfg.dealias = file_cfg.dealias;
        cfg.grid = file_cfg.grid;
        cfg.seed_mode = file_cfg.seed_mode;
        cfg.seed_value = file_cfg.seed_value;
        cfg.max_inner = file_cfg.max_inner;
        cfg.max_outer = file_cfg.max_outer;
      }
      if (!grid_flag.empty()) {
        cfg.grid.N1 = grid_flag[0];
        cfg.grid.N2 = grid_flag.size() > 1 ? grid_flag[1] : grid_flag[0];
      }
      if (!L_flag.empty()) {
        cfg.grid.L1 = L_flag[0];
        cfg.grid.L2 = L_flag.size() > 1 ? L_flag[1] : L_flag[0];
      }
      if (delta_flag.size() == 2) {
        cfg.grid.delta1 = delta_flag[0];
        cfg.grid.delta2 = delta_flag[1];
      }
      if (!seed_flag.empty()) {
        if (seed_flag == "bubble") {
          cfg.seed_mode = syl::SolverConfig::Seed::BUBBLE_TRANSPLANT;
        } else if (seed_flag.rfind("random:", 0) == 0) {
          cfg.seed_mode = syl::SolverConfig::Seed::RANDOM;
          cfg.seed_value = std::stoull(seed_flag.substr(7));
        } else {
          std::cerr << "unknown --seed value: " << seed_flag << "\n";
          return 1;
        }
      }
      return cmd_torus(cfg, sweep, out, as_json);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
