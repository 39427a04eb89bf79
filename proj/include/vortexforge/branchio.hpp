#ifndef VORTEXFORGE_BRANCHIO_HPP
#define VORTEXFORGE_BRANCHIO_HPP

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>

#include "vortexforge/desingularize.hpp"

namespace vf {

struct RunConfig {
    std::string scenario = "rotating_pair";  // builtin name, or "general"
    std::string scenario_json;               // inline config+split for general scenarios
    int N = 64;
    double rho_start = 0.02;
    double rho_max = 0.9;
    double drho_init = 0.01;
    int max_steps = 50;
    NewtonSettings newton;
    double monitor_factor = 1e3;
    std::string output_path;
    unsigned seed = 0;

    void validate() const;
    StepControl step_control() const;
};

// JSON-lines branch file: one header line with the RunConfig and code version,
// then one BranchPoint record per line. Floats at 17 significant digits so a
// parse -> serialize round trip is bit-exact.
class BranchWriter {
  public:
    BranchWriter(const std::string& path, const RunConfig& cfg, bool append = false);
    void write_point(const BranchPoint& bp);
    void write_terminal(TerminationReason reason, const std::string& note);
    const std::string& path() const { return path_; }

  private:
    std::string path_;
};

struct BranchFile {
    RunConfig config;
    std::vector<BranchPoint> points;
    std::optional<TerminationReason> reason;
    std::string note;
};

BranchFile read_branch_file(const std::string& path);

std::string json_compact(const nlohmann::json& j);

nlohmann::json run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json branch_point_to_json(const BranchPoint& bp);
BranchPoint branch_point_from_json(const nlohmann::json& j);

// Boundary-curve CSV: columns vortex_index, theta, re_z, im_z, speed.
void export_curves_csv(const std::string& path, const std::vector<BranchPoint>& pts);
// Branch-scalar CSV: one row per accepted point (rho, lambda, Q, monitors, ...).
void export_branch_csv(const std::string& path, const std::vector<BranchPoint>& pts);

}  // namespace vf

#endif
