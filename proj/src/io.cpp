#include "syl/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace syl::io {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
}

void write_profile_csv(const fs::path& path, const RadialProfile& profile) {
  std::ostringstream os;
  os << "r,u,v\n";
  for (size_t i = 0; i < profile.r.size(); ++i)
    os << fmt(profile.r[i]) << ',' << fmt(profile.u[i]) << ',' << fmt(profile.v[i]) << '\n';
  write_text(path, os.str());
}

RadialProfile read_profile_csv(const fs::path& path, const BubbleParams& params) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile: " + path.string());
  RadialProfile prof;
  prof.params = params;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double r, u, v;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r, &u, &v) != 3)
      throw std::runtime_error("malformed profile row: " + line);
    prof.r.push_back(r);
    prof.u.push_back(u);
    prof.v.push_back(v);
  }
  if (prof.r.size() < 6) throw std::runtime_error("profile too short: " + path.string());
  return prof;
}

nlohmann::json report_to_json(const BubbleReport& report) {
  return {
      {"v0_star", report.v0_star},
      {"mu0", report.mu0},
      {"decay_rate", report.decay_rate},
      {"residual_2d", report.residual_2d},
      {"moments", {{"I_p0", report.moments.I_p0}, {"I_p2", report.moments.I_p2}}},
  };
}

nlohmann::json theta_to_json(const ThetaReport& report) {
  return {
      {"point", {report.point.s, report.point.t}},
      {"K", report.K},
      {"theta", report.theta},
      {"term_ricci", report.term_ricci},
      {"term_riemann", report.term_riemann},
      {"method", report.method == ThetaMethod::FULL_GRID ? "FULL_GRID" : "ANSATZ_CLOSED_FORM"},
  };
}

nlohmann::json argmax_to_json(const ArgmaxResult& result) {
  nlohmann::json ties = nlohmann::json::array();
  for (const auto& q : result.ties) ties.push_back({q.s, q.t});
  return {
      {"point", {result.point.s, result.point.t}},
      {"tie_flag", result.tie_flag},
      {"ties", ties},
      {"report", theta_to_json(result.report)},
  };
}

std::unique_ptr<Chart> chart_from_json(const nlohmann::json& spec) {
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "sphere") return make_sphere(spec.value("radius", 1.0));
  if (kind == "ellipsoid")
    return make_ellipsoid(spec.at("a").get<double>(), spec.at("b").get<double>(),
                          spec.at("c").get<double>());
  if (kind == "torus")
    return make_torus_rev(spec.at("R0").get<double>(), spec.at("r").get<double>());
  if (kind == "flat")
    return make_flat_torus(spec.value("L1", 2.0 * M_PI), spec.value("L2", 2.0 * M_PI));
  if (kind == "table") {
    std::vector<double> sn = spec.at("s").get<std::vector<double>>();
    std::vector<double> tn = spec.at("t").get<std::vector<double>>();
    const auto& g11 = spec.at("g11");
    const auto& g12 = spec.at("g12");
    const auto& g22 = spec.at("g22");
    std::vector<Sym2> vals;
    vals.reserve(sn.size() * tn.size());
    for (size_t i = 0; i < sn.size(); ++i)
      for (size_t j = 0; j < tn.size(); ++j)
        vals.push_back({g11.at(i).at(j).get<double>(), g12.at(i).at(j).get<double>(),
                        g22.at(i).at(j).get<double>()});
    return make_table_chart(std::move(sn), std::move(tn), std::move(vals),
                            spec.value("periodic_s", false), spec.value("periodic_t", false));
  }
  throw std::invalid_argument("unknown chart kind: " + kind);
}

std::unique_ptr<Chart> chart_from_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) args.push_back(std::stod(tok));
  }
  auto arg = [&](size_t i, double dflt) { return i < args.size() ? args[i] : dflt; };
  if (head == "sphere") return make_sphere(arg(0, 1.0));
  if (head == "ellipsoid") return make_ellipsoid(arg(0, 2.0), arg(1, 1.0), arg(2, 1.0));
  if (head == "torus") return make_torus_rev(arg(0, 2.0), arg(1, 1.0));
  if (head == "flat") return make_flat_torus(arg(0, 2.0 * M_PI), arg(1, arg(0, 2.0 * M_PI)));
  // otherwise: a chart JSON file on disk
  std::ifstream in(spec);
  if (!in)
    throw std::invalid_argument("chart spec is neither builtin nor a readable file: " + spec);
  nlohmann::json j;
  in >> j;
  return chart_from_json(j);
}

void write_curvature_csv(const fs::path& path, const Chart& chart, int n) {
  const auto sr = chart.s_range(), tr = chart.t_range();
  const double ms = chart.periodic_s() ? 0.0 : chart.boundary_margin() * (sr[1] - sr[0]);
  const double mt = chart.periodic_t() ? 0.0 : chart.boundary_margin() * (tr[1] - tr[0]);
  std::ostringstream os;
  os << "s,t,K\n";
  for (int i = 0; i < n; ++i) {
    const double s = chart.periodic_s() ? sr[0] + (sr[1] - sr[0]) * i / n
                                        : sr[0] + ms + (sr[1] - sr[0] - 2 * ms) * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double t = chart.periodic_t() ? tr[0] + (tr[1] - tr[0]) * j / n
                                          : tr[0] + mt + (tr[1] - tr[0] - 2 * mt) * j / (n - 1);
      os << fmt(s) << ',' << fmt(t) << ',' << fmt(curvature_at(chart, {s, t}).gauss) << '\n';
    }
  }
  write_text(path, os.str());
}

nlohmann::json config_to_json(const SolverConfig& config) {
  return {
      {"grid",
       {{"N1", config.grid.N1},
        {"N2", config.grid.N2},
        {"L1", config.grid.L1},
        {"L2", config.grid.L2},
        {"delta", {config.grid.delta1, config.grid.delta2}}}},
      {"eps", config.eps},
      {"a", config.a},
      {"p", config.p},
      {"tol_inner", config.tol_inner},
      {"tol_outer", config.tol_outer},
      {"max_inner", config.max_inner},
      {"max_outer", config.max_outer},
      {"seed",
       config.seed_mode == SolverConfig::Seed::BUBBLE_TRANSPLANT
           ? nlohmann::json("bubble")
           : nlohmann::json("random:" + std::to_string(config.seed_value))},
      {"dealias", config.dealias},
  };
}

SolverConfig config_from_json(const nlohmann::json& j) {
  SolverConfig cfg;
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    cfg.grid.N1 = g.value("N1", cfg.grid.N1);
    cfg.grid.N2 = g.value("N2", cfg.grid.N2);
    cfg.grid.L1 = g.value("L1", cfg.grid.L1);
    cfg.grid.L2 = g.value("L2", cfg.grid.L2);
    if (g.contains("delta")) {
      cfg.grid.delta1 = g.at("delta").at(0).get<double>();
      cfg.grid.delta2 = g.at("delta").at(1).get<double>();
    }
  }
  cfg.eps = j.value("eps", cfg.eps);
  cfg.a = j.value("a", cfg.a);
  cfg.p = j.value("p", cfg.p);
  cfg.tol_inner = j.value("tol_inner", cfg.tol_inner);
  cfg.tol_outer = j.value("tol_outer", cfg.tol_outer);
  cfg.max_inner = j.value("max_inner", cfg.max_inner);
  cfg.max_outer = j.value("max_outer", cfg.max_outer);
  cfg.dealias = j.value("dealias", cfg.dealias);
  if (j.contains("seed")) {
    const std::string s = j.at("seed").get<std::string>();
    if (s == "bubble") {
      cfg.seed_mode = SolverConfig::Seed::BUBBLE_TRANSPLANT;
    } else if (s.rfind("random:", 0) == 0) {
      cfg.seed_mode = SolverConfig::Seed::RANDOM;
      cfg.seed_value = std::stoull(s.substr(7));
    } else {
      throw std::invalid_argument("unknown seed mode: " + s);
    }
  }
  return cfg;
}

nlohmann::json solve_to_json(const SolveResult& result, const SolverConfig& config) {
  return {
      {"mu_eps", result.mu_eps},
      {"grad_norm", result.grad_norm},
      {"converged", result.converged},
      {"iterations", result.iterations},
      {"peak", {result.loc.peak[0], result.loc.peak[1]}},
      {"peak_index", {result.loc.peak_index[0], result.loc.peak_index[1]}},
      {"peak_tie", result.loc.peak_tie},
      {"width", result.loc.width},
      {"decay_c", result.loc.decay_c},
      {"decay_r2", result.loc.decay_r2},
      {"t_star_final", result.t_star.empty() ? 0.0 : result.t_star.back()},
      {"config", config_to_json(config)},
      {"note",
       "critical point of the reduced functional; global minimality over the Nehari set is "
       "not certified"},
  };
}

void write_field_csv(const fs::path& path, const TorusSolver& solver, const FourierSpinor& psi) {
  const FourierSpinor ph = psi.rep == SpinorRep::PHYSICAL ? psi : solver.to_physical(psi);
  const auto& g = solver.config().grid;
  std::ostringstream os;
  os << "i,j,abs_psi\n";
  for (int i1 = 0; i1 < g.N1; ++i1)
    for (int i2 = 0; i2 < g.N2; ++i2) {
      const size_t m = static_cast<size_t>(i1) * g.N2 + i2;
      const double ab = std::sqrt(std::norm(ph.data[2 * m]) + std::norm(ph.data[2 * m + 1]));
      os << i1 << ',' << i2 << ',' << fmt(ab) << '\n';
    }
  write_text(path, os.str());
}

void write_sweep_csv(const fs::path& path, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "eps,mu_eps,width,decay_c,grad_norm\n";
  for (const auto& r : rows) {
    os << fmt(r.eps) << ',';
    if (r.converged)
      os << fmt(r.mu_eps) << ',' << fmt(r.width) << ',' << fmt(r.decay_c) << ','
         << fmt(r.grad_norm) << '\n';
    else
      os << "FAILED,FAILED,FAILED,FAILED\n";
  }
  write_text(path, os.str());
}

void write_manifest(const fs::path& path, const std::string& command,
                    const nlohmann::json& config, const std::vector<std::string>& outputs,
                    double wall_time_s) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%FT%TZ", std::gmtime(&tt));
  const nlohmann::json j = {
      {"command", command},         {"version", kToolVersion}, {"timestamp", stamp},
      {"wall_time_s", wall_time_s}, {"config", config},        {"outputs", outputs},
  };
  write_text(path, j.dump(2) + "\n");
}

}  // namespace syl::io
