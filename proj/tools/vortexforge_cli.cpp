// vortexforge command-line driver.
//
// Subcommands:
//   pv check|solve|classify   point-vortex residuals, Newton solve, non-degeneracy
//   hv desingularize          one Newton solve from the leading-order guess
//   hv continue [--resume]    branch continuation in rho, JSON-lines output
//   hv diagnose               diagnostics report for branch points
//   hv export                 boundary curves and branch scalars to CSV
//
// Exit codes: 0 success, 2 input error, 3 convergence failure, 4 domain error,
// 5 internal invariant violation.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "vortexforge/branchio.hpp"
#include "vortexforge/desingularize.hpp"

using namespace vf;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitDomain = 4;
constexpr int kExitInternal = 5;

std::pair<VortexConfiguration, ParameterSplit> load_pv_config(const std::string& builtin,
                                                              const std::string& config_path) {
    if (!builtin.empty()) {
        // the worked non-degenerate splits of the three equilibria
        Scenario sc = Scenario::builtin(builtin);
        ParameterSplit split;
        switch (sc.kind) {
            case ScenarioKind::rotating_pair:
                split = ParameterSplit::from_names({"re_zeta1", "re_zeta2", "im_zeta2"}, 2);
                break;
            case ScenarioKind::stationary_tripole:
                split = ParameterSplit::from_names({"gamma1", "re_zeta3", "im_zeta3"}, 3);
                break;
            default:
                split = ParameterSplit::from_names({"gamma1", "re_zeta2", "im_zeta2"}, 2);
        }
        return {sc.base, split};
    }
    std::ifstream f(config_path);
    if (!f) throw input_error("cannot open config: " + config_path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw input_error(std::string("bad JSON: ") + e.what());
    }
    return config_with_split_from_json(j);
}

Scenario load_scenario(const std::string& name, const std::string& config_path) {
    if (name != "general") return Scenario::builtin(name);
    if (config_path.empty()) throw input_error("general scenario requires --config");
    std::ifstream f(config_path);
    if (!f) throw input_error("cannot open config: " + config_path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw input_error(std::string("bad JSON: ") + e.what());
    }
    auto [cfg, split] = config_with_split_from_json(j);
    return Scenario::general(cfg, split);
}

int cmd_pv(const std::string& action, const std::string& builtin, const std::string& config_path) {
    auto [cfg, split] = load_pv_config(builtin, config_path);
    auto V = eval_pv_residual(cfg);
    double vmax = 0.0;
    json resid = json::array();
    for (const cplx& v : V) {
        vmax = std::max(vmax, std::abs(v));
        resid.push_back({v.real(), v.imag()});
    }
    if (action == "solve") {
        cfg = solve_steady_pv(cfg, split);
        V = eval_pv_residual(cfg);
        vmax = 0.0;
        resid = json::array();
        for (const cplx& v : V) {
            vmax = std::max(vmax, std::abs(v));
            resid.push_back({v.real(), v.imag()});
        }
    }
    auto [id1, id2] = check_pv_identities(cfg);
    json out;
    out["config"] = config_with_split_to_json(cfg, split);
    out["residual"] = resid;
    out["residual_max"] = vmax;
    out["identity_residuals"] = {std::abs(id1), std::abs(id2)};
    bool steady = vmax < 1e-10;
    out["steady"] = steady;
    bool nondeg = false;
    if (steady && !split.varying.empty()) {
        SteadyClass cls = classify_nondegeneracy(cfg, split);
        out["class"] = {{"kind", to_string(cls.kind)},
                        {"codim", cls.codim},
                        {"nondegenerate", cls.nondegenerate},
                        {"rank_ambiguous", cls.rank_ambiguous}};
        nondeg = cls.nondegenerate;
    }
    std::cout << json_compact(out) << "\n";
    if (action == "classify" || action == "check" || action == "solve")
        return (steady && (split.varying.empty() || nondeg)) ? kExitOk : kExitConvergence;
    return kExitOk;
}

int cmd_desingularize(const std::string& scen, const std::string& config_path, double rho, int N,
                      const std::string& out_path) {
    Scenario sc = load_scenario(scen, config_path);
    HollowState u = newton_solve(leading_guess(sc, rho, N), sc);
    DiagnosticsReport rep = run_diagnostics(u, sc.steady() == SteadyKind::rotating);
    BranchPoint bp{u, rep, 0.0, true};
    if (!out_path.empty()) {
        RunConfig rc;
        rc.scenario = to_string(sc.kind);
        rc.N = N;
        rc.rho_start = rho;
        rc.rho_max = rho + 1e-9;
        BranchWriter w(out_path, rc);
        w.write_point(bp);
    }
    json j = branch_point_to_json(bp);
    std::cout << json_compact(j) << "\n";
    return rep.gates_ok(1e-3) ? kExitOk : kExitDomain;
}

int cmd_continue(const std::string& scen, const std::string& config_path, const RunConfig& rc_in,
                 bool resume) {
    RunConfig rc = rc_in;
    rc.scenario = scen;
    rc.validate();
    Scenario sc = load_scenario(scen, config_path);
    StepControl ctrl = rc.step_control();
    ctrl.with_momentum_check = (sc.kind == ScenarioKind::rotating_pair);
    NewtonSettings settings = rc.newton;

    if (resume) {
        BranchFile bf = read_branch_file(rc.output_path);
        if (bf.points.empty()) throw input_error("resume file has no accepted points");
        const BranchPoint& last = bf.points.back();
        ctrl.monitor_baseline_n_conf = bf.points.front().diagnostics.n_conf;
        ctrl.monitor_baseline_n_vel = bf.points.front().diagnostics.n_vel;
        BranchWriter w(rc.output_path, bf.config, /*append=*/true);
        auto res = continue_branch_from(sc, last.state, last.arclength, ctrl, settings,
                                        [&](const BranchPoint& bp) { w.write_point(bp); });
        w.write_terminal(res.reason, res.note);
        std::cout << "terminated: " << to_string(res.reason) << " after "
                  << res.points.size() << " new points\n";
        return kExitOk;
    }
    BranchWriter w(rc.output_path, rc);
    auto res = continue_branch(sc, ctrl, settings,
                               [&](const BranchPoint& bp) { w.write_point(bp); });
    w.write_terminal(res.reason, res.note);
    std::cout << "accepted " << res.points.size() << " points, terminated: "
              << to_string(res.reason) << "\n";
    return kExitOk;
}

int cmd_diagnose(const std::string& in_path, int index) {
    BranchFile bf = read_branch_file(in_path);
    if (bf.points.empty()) throw input_error("branch file has no points");
    if (index < 0) index = static_cast<int>(bf.points.size()) - 1;
    if (index >= static_cast<int>(bf.points.size())) throw input_error("point index out of range");
    DiagnosticsReport rep = run_diagnostics(bf.points[index].state,
                                            steady_kind(bf.points[index].state.config()) ==
                                                SteadyKind::rotating);
    json j;
    to_json(j, rep);
    std::cout << json_compact(j) << "\n";
    return kExitOk;
}

int cmd_export(const std::string& in_path, const std::string& curves, const std::string& branch) {
    BranchFile bf = read_branch_file(in_path);
    if (bf.points.empty()) throw input_error("branch file has no points");
    if (!curves.empty()) export_curves_csv(curves, bf.points);
    if (!branch.empty()) export_branch_csv(branch, bf.points);
    if (curves.empty() && branch.empty())
        throw input_error("export: nothing to do (pass --curves and/or --branch)");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"steady hollow-vortex desingularization and continuation"};
    app.require_subcommand(1);

    std::string builtin, config_path, out_path, in_path, curves_csv, branch_csv;
    std::string pv_action;
    double rho = 0.05;
    int index = -1;
    bool resume = false;
    RunConfig rc;

    auto* pv = app.add_subcommand("pv", "point-vortex operations");
    pv->require_subcommand(1);
    for (const char* act : {"check", "solve", "classify"}) {
        auto* sub = pv->add_subcommand(act);
        sub->add_option("--builtin", builtin,
                        "builtin configuration: rotating-pair | tripole | translating-pair");
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->callback([&, act] { pv_action = act; });
    }

    auto* hv = app.add_subcommand("hv", "hollow-vortex operations");
    hv->require_subcommand(1);
    auto* des = hv->add_subcommand("desingularize", "solve at a single rho");
    des->add_option("--scenario", rc.scenario, "rotating_pair | stationary_tripole | translating_pair | general");
    des->add_option("--config", config_path, "general-scenario JSON config");
    des->add_option("--rho", rho, "circle radius")->required();
    des->add_option("--N", rc.N, "Fourier truncation");
    des->add_option("--out", out_path, "branch file to write");

    auto* cont = hv->add_subcommand("continue", "continue the branch in rho");
    cont->add_option("--scenario", rc.scenario);
    cont->add_option("--config", config_path);
    cont->add_option("--N", rc.N);
    cont->add_option("--rho-start", rc.rho_start);
    cont->add_option("--rho-max", rc.rho_max);
    cont->add_option("--drho", rc.drho_init);
    cont->add_option("--steps", rc.max_steps, "accepted-step budget");
    cont->add_option("--monitor-factor", rc.monitor_factor);
    cont->add_option("--out", rc.output_path, "JSON-lines branch file")->required();
    cont->add_flag("--resume", resume, "resume from the last accepted record");

    auto* diag = hv->add_subcommand("diagnose", "diagnostics for a branch point");
    diag->add_option("--in", in_path)->required();
    diag->add_option("--index", index, "point index (default: last)");

    auto* exp = hv->add_subcommand("export", "CSV export");
    exp->add_option("--in", in_path)->required();
    exp->add_option("--curves", curves_csv, "boundary-curve CSV path");
    exp->add_option("--branch", branch_csv, "branch-scalar CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (pv->parsed()) return cmd_pv(pv_action, builtin, config_path);
        if (des->parsed()) return cmd_desingularize(rc.scenario, config_path, rho, rc.N, out_path);
        if (cont->parsed()) return cmd_continue(rc.scenario, config_path, rc, resume);
        if (diag->parsed()) return cmd_diagnose(in_path, index);
        if (exp->parsed()) return cmd_export(in_path, curves_csv, branch_csv);
        return kExitInput;
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const convergence_error& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const internal_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}
