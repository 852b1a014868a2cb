#ifndef SYL_IO_HPP
#define SYL_IO_HPP

#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "syl/bubble.hpp"
#include "syl/geometry.hpp"
#include "syl/torus.hpp"

// File formats:
//   profile CSV   header r,u,v ; full round-trip precision decimals
//   report JSON   keys v0_star, mu0, decay_rate, residual_2d, moments
//   chart JSON    {"kind": "sphere"|"ellipsoid"|"torus"|"flat"|"table", ...}
//   field CSV     header i,j,abs_psi
//   sweep CSV     header eps,mu_eps,width,decay_c,grad_norm
// Payload files never carry timestamps; the run manifest does.

namespace syl::io {

inline constexpr const char* kToolVersion = "0.1.0";

std::string fmt(double v);  // shortest text that round-trips a double

void write_profile_csv(const std::filesystem::path& path, const RadialProfile& profile);
// params are not stored in the CSV; the caller supplies them
RadialProfile read_profile_csv(const std::filesystem::path& path, const BubbleParams& params);

nlohmann::json report_to_json(const BubbleReport& report);

nlohmann::json theta_to_json(const ThetaReport& report);
nlohmann::json argmax_to_json(const ArgmaxResult& result);

std::unique_ptr<Chart> chart_from_json(const nlohmann::json& spec);
// "sphere:R", "ellipsoid:a,b,c", "torus:R0,r", "flat[:L1[,L2]]", or a path to
// a chart JSON file
std::unique_ptr<Chart> chart_from_spec(const std::string& spec);

void write_curvature_csv(const std::filesystem::path& path, const Chart& chart, int n);

nlohmann::json solve_to_json(const SolveResult& result, const SolverConfig& config);
void write_field_csv(const std::filesystem::path& path, const TorusSolver& solver,
                     const FourierSpinor& psi);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

nlohmann::json config_to_json(const SolverConfig& config);
SolverConfig config_from_json(const nlohmann::json& j);

// reviewer metadata for a run: command, config snapshot, outputs, wall time
void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const nlohmann::json& config, const std::vector<std::string>& outputs,
                    double wall_time_s);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace syl::io

#endif
