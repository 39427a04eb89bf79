#include "vortexforge/branchio.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

namespace vf {

namespace {

constexpr const char* kVersion = "vortexforge 0.1.0";

// 17 significant digits: doubles survive a decimal round trip bit-exactly.
// Negative zero is normalized so parse -> serialize is byte-stable.
std::string fmt_double(double v) {
    if (v == 0.0) v = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Serialize with doubles re-emitted at full precision. nlohmann's default dump is
// shortest-round-trip, which is already bit-exact, but we pin the format anyway.
void dump_value(const nlohmann::json& j, std::string& out) {
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += nlohmann::json(it.key()).dump();
                out += ':';
                dump_value(it.value(), out);
            }
            out += '}';
            break;
        }
        case nlohmann::json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ',';
                first = false;
                dump_value(v, out);
            }
            out += ']';
            break;
        }
        case nlohmann::json::value_t::number_float:
            out += fmt_double(j.get<double>());
            break;
        default:
            out += j.dump();
    }
}

}  // namespace

std::string json_compact(const nlohmann::json& j) {
    std::string out;
    dump_value(j, out);
    return out;
}

void RunConfig::validate() const {
    if (!(rho_start < rho_max)) throw input_error("rho_start must be < rho_max");
    if (N < 16) throw input_error("N must be >= 16");
    if (!(newton.residual_tol > 0) || !(drho_init > 0) || !(monitor_factor > 0))
        throw input_error("tolerances must be positive");
}

StepControl RunConfig::step_control() const {
    StepControl ctrl;
    ctrl.rho_start = rho_start;
    ctrl.rho_max = rho_max;
    ctrl.drho_init = drho_init;
    ctrl.max_steps = max_steps;
    ctrl.monitor_factor = monitor_factor;
    ctrl.N = N;
    return ctrl;
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
    return nlohmann::json{{"scenario", cfg.scenario},
                          {"scenario_json", cfg.scenario_json},
                          {"N", cfg.N},
                          {"rho_start", cfg.rho_start},
                          {"rho_max", cfg.rho_max},
                          {"drho_init", cfg.drho_init},
                          {"max_steps", cfg.max_steps},
                          {"monitor_factor", cfg.monitor_factor},
                          {"seed", cfg.seed},
                          {"newton",
                           {{"residual_tol", cfg.newton.residual_tol},
                            {"max_iter", cfg.newton.max_iter},
                            {"fd_step", cfg.newton.fd_step},
                            {"backtracking", cfg.newton.backtracking}}}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    cfg.scenario = j.value("scenario", cfg.scenario);
    cfg.scenario_json = j.value("scenario_json", cfg.scenario_json);
    cfg.N = j.value("N", cfg.N);
    cfg.rho_start = j.value("rho_start", cfg.rho_start);
    cfg.rho_max = j.value("rho_max", cfg.rho_max);
    cfg.drho_init = j.value("drho_init", cfg.drho_init);
    cfg.max_steps = j.value("max_steps", cfg.max_steps);
    cfg.monitor_factor = j.value("monitor_factor", cfg.monitor_factor);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("newton")) {
        const auto& n = j.at("newton");
        cfg.newton.residual_tol = n.value("residual_tol", cfg.newton.residual_tol);
        cfg.newton.max_iter = n.value("max_iter", cfg.newton.max_iter);
        cfg.newton.fd_step = n.value("fd_step", cfg.newton.fd_step);
        cfg.newton.backtracking = n.value("backtracking", cfg.newton.backtracking);
    }
    return cfg;
}

nlohmann::json branch_point_to_json(const BranchPoint& bp) {
    nlohmann::json st, diag;
    to_json(st, bp.state);
    to_json(diag, bp.diagnostics);
    return nlohmann::json{{"type", "point"},
                          {"state", st},
                          {"diagnostics", diag},
                          {"arclength", bp.arclength},
                          {"accepted", bp.accepted}};
}

BranchPoint branch_point_from_json(const nlohmann::json& j) {
    BranchPoint bp;
    from_json(j.at("state"), bp.state);
    from_json(j.at("diagnostics"), bp.diagnostics);
    bp.arclength = j.at("arclength").get<double>();
    bp.accepted = j.at("accepted").get<bool>();
    return bp;
}

BranchWriter::BranchWriter(const std::string& path, const RunConfig& cfg, bool append)
    : path_(path) {
    if (append) return;  // resuming: header already present
    std::ofstream f(path_, std::ios::trunc);
    if (!f) throw input_error("cannot open branch file for writing: " + path_);
    nlohmann::json hdr{
        {"type", "header"}, {"version", kVersion}, {"config", run_config_to_json(cfg)}};
    f << json_compact(hdr) << "\n";
}

void BranchWriter::write_point(const BranchPoint& bp) {
    std::ofstream f(path_, std::ios::app);
    if (!f) throw input_error("cannot append to branch file: " + path_);
    f << json_compact(branch_point_to_json(bp)) << "\n";
}

void BranchWriter::write_terminal(TerminationReason reason, const std::string& note) {
    std::ofstream f(path_, std::ios::app);
    if (!f) throw input_error("cannot append to branch file: " + path_);
    nlohmann::json j{{"type", "terminal"}, {"reason", to_string(reason)}, {"note", note}};
    f << json_compact(j) << "\n";
}

BranchFile read_branch_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw input_error("cannot open branch file: " + path);
    BranchFile out;
    std::string line;
    bool have_header = false;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            break;  // crash-safe resume: ignore a trailing partial line
        }
        std::string type = j.value("type", "");
        if (type == "header") {
            out.config = run_config_from_json(j.at("config"));
            have_header = true;
        } else if (type == "point") {
            out.points.push_back(branch_point_from_json(j));
        } else if (type == "terminal") {
            out.reason = [&] {
                std::string r = j.at("reason").get<std::string>();
                for (auto tr :
                     {TerminationReason::conformal_degeneracy, TerminationReason::velocity_degeneracy,
                      TerminationReason::parameter_blowup, TerminationReason::angular_momentum_blowup,
                      TerminationReason::step_failure, TerminationReason::max_steps})
                    if (to_string(tr) == r) return tr;
                return TerminationReason::max_steps;
            }();
            out.note = j.value("note", "");
        }
    }
    if (!have_header) throw input_error("branch file has no header line: " + path);
    return out;
}

void export_curves_csv(const std::string& path, const std::vector<BranchPoint>& pts) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw input_error("cannot open CSV for writing: " + path);
    f << "point_index,vortex_index,theta,re_z,im_z,speed\n";
    for (size_t p = 0; p < pts.size(); ++p) {
        FlowFields F(pts[p].state);
        int Nq = F.ctx().Nq;
        for (int k = 0; k < pts[p].state.M(); ++k) {
            for (int i = 0; i < Nq; ++i) {
                double theta = 2.0 * pi * i / Nq;
                cplx z = F.f_trace(k)[i];
                double speed = std::abs(F.U_trace(k)[i]);
                f << p << ',' << k + 1 << ',' << fmt_double(theta) << ',' << fmt_double(z.real())
                  << ',' << fmt_double(z.imag()) << ',' << fmt_double(speed) << "\n";
            }
        }
    }
}

void export_branch_csv(const std::string& path, const std::vector<BranchPoint>& pts) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw input_error("cannot open CSV for writing: " + path);
    f << "index,rho,arclength,lambda0,Q1,n_conf,n_vel,excess_L,noncircularity,min_circulation_"
         "defect\n";
    for (size_t p = 0; p < pts.size(); ++p) {
        const auto& bp = pts[p];
        const auto& st = bp.state;
        double circ_defect = 0.0;
        VortexConfiguration cfg = st.config();
        for (int k = 0; k < st.M(); ++k)
            circ_defect =
                std::max(circ_defect, std::abs(bp.diagnostics.circulations[k] - cfg.gammas[k]));
        f << p << ',' << fmt_double(st.rho) << ',' << fmt_double(bp.arclength) << ','
          << fmt_double(st.lambda.empty() ? 0.0 : st.lambda[0]) << ','
          << fmt_double(st.Q.empty() ? 0.0 : st.Q[0]) << ',' << fmt_double(bp.diagnostics.n_conf)
          << ',' << fmt_double(bp.diagnostics.n_vel) << ',' << fmt_double(bp.diagnostics.excess_L)
          << ',' << fmt_double(bp.diagnostics.noncircularity) << ',' << fmt_double(circ_defect)
          << "\n";
    }
}

}  // namespace vf
