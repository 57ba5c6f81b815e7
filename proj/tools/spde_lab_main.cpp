// spde-lab: configuration-driven experiment runner.
//
// Subcommands mirror the experiment entry points one-to-one so CI can invoke
// them directly:
//   simulate           one path, terminal coefficient state
//   weak-rate          coupled weak-error sweep over grid.N with a log-log fit
//   strong-rate        coupled strong-error sweep
//   lower-bound        deterministic variance-gap sweep vs closed-form bound
//   oracle-check       statistical checks of the scheme against closed forms
//   perturbation-check initial-value perturbation inequality
//
// Exit codes: 0 success, 2 validation failure, 3 check failure
// (oracle-check / perturbation-check), 4 file I/O failure.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"

#include "spde/config.hpp"
#include "spde/experiments.hpp"
#include "spde/noise.hpp"
#include "spde/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitCheckFailed = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::string format;
    std::string threads = "auto";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "run configuration file");
    cmd->add_option("--out", args.out_path, "output artifact path (overrides output.path)");
    cmd->add_option("--format", args.format, "csv|json (overrides output.format)");
    cmd->add_option("--seed", args.seed, "Monte Carlo seed (overrides mc.seed)")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--threads", args.threads, "worker count or 'auto' (env SPDE_LAB_THREADS)");
    cmd->add_option("overrides", args.overrides, "dotted-key overrides, e.g. mc.samples=100000");
}

void apply_threads(const std::string& threads) {
    std::string value = threads;
    if (value == "auto") {
        if (const char* env = std::getenv("SPDE_LAB_THREADS")) value = env;
    }
    if (value == "auto" || value.empty()) return;
    const int n = std::stoi(value);
    if (n < 1) throw spde::cli::ConfigError("--threads must be >= 1 or 'auto'");
    omp_set_num_threads(n);
}

spde::cli::RunConfig resolve_config(const CommonArgs& args) {
    spde::cli::RunConfig cfg;
    if (!args.config_path.empty()) cfg = spde::cli::parse_config_file(args.config_path);
    spde::cli::apply_overrides(cfg, args.overrides);
    if (!args.out_path.empty()) cfg.out_path = args.out_path;
    if (!args.format.empty()) cfg.format = args.format;
    if (args.seed_set) cfg.seed = args.seed;
    spde::cli::validate(cfg);
    apply_threads(args.threads);
    return cfg;
}

void print_report(const spde::ExperimentReport& report) {
    std::cout << "      N          h        estimate       std_error\n";
    for (const auto& p : report.points) {
        std::printf("%7lld %10.6g %15.8g %15.8g\n", static_cast<long long>(p.steps), p.h,
                    p.estimate, p.std_error);
    }
    std::printf("fit: order=%.4f intercept=%.4f r2=%.4f\n", report.fitted_order,
                report.fit_intercept, report.fit_r2);
    for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
}

void write_report(const spde::ExperimentReport& report, const spde::cli::RunConfig& cfg) {
    if (cfg.out_path.empty()) return;
    spde::emit_report_file(report, cfg.format, cfg.out_path);
    std::cout << "wrote " << cfg.out_path << "\n";
}

int run_simulate(const CommonArgs& args) {
    const auto cfg = resolve_config(args);
    const auto model = cfg.build_model();
    const auto bundle =
        spde::sample_increments(cfg.modes, cfg.N_list.front(), cfg.T, cfg.seed, /*stream=*/0);
    const auto result = spde::simulate_path(model, cfg.build_scheme(), bundle);
    double norm = 0.0;
    for (double v : result.terminal) norm += v * v;
    std::printf("terminal ||Y||_H = %.12g over %d modes (N=%lld)\n", std::sqrt(norm), cfg.modes,
                static_cast<long long>(cfg.N_list.front()));
    if (!cfg.out_path.empty()) {
        std::ofstream os(cfg.out_path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open output file: " + cfg.out_path);
        os << "mode,coefficient\n";
        for (size_t i = 0; i < result.terminal.size(); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", result.terminal[i]);
            os << (i + 1) << ',' << buf << "\n";
        }
        std::cout << "wrote " << cfg.out_path << "\n";
    }
    return kExitOk;
}

int run_weak_rate(const CommonArgs& args) {
    const auto cfg = resolve_config(args);
    auto report = spde::weak_error_sweep(cfg.build_model(), cfg.build_scheme(), cfg.functional,
                                         cfg.N_list, cfg.N_ref,
                                         {cfg.samples, cfg.seed, spde::Engine::OpenMP});
    report.config = cfg.echo();
    print_report(report);
    write_report(report, cfg);
    return kExitOk;
}

int run_strong_rate(const CommonArgs& args) {
    const auto cfg = resolve_config(args);
    auto report = spde::strong_error_sweep(cfg.build_model(), cfg.build_scheme(), cfg.N_list,
                                           cfg.N_ref, {cfg.samples, cfg.seed, spde::Engine::OpenMP});
    report.config = cfg.echo();
    print_report(report);
    write_report(report, cfg);
    return kExitOk;
}

int run_lower_bound(const CommonArgs& args) {
    CommonArgs adjusted = args;
    spde::cli::RunConfig cfg;
    if (!adjusted.config_path.empty()) cfg = spde::cli::parse_config_file(adjusted.config_path);
    else {
        // Fourth-order-free defaults: the Dirichlet Laplacian comparison model.
        cfg.model_kind = "diagonal-additive";
        cfg.modes = 2000;
        cfg.delta = 0.0;
        cfg.xi = "zero";
        cfg.N_list = {8, 16, 32, 64, 128, 256, 512, 1024};
    }
    spde::cli::apply_overrides(cfg, adjusted.overrides);
    if (!adjusted.out_path.empty()) cfg.out_path = adjusted.out_path;
    if (!adjusted.format.empty()) cfg.format = adjusted.format;
    spde::cli::validate(cfg);
    apply_threads(adjusted.threads);
    if (cfg.model_kind != "diagonal-additive")
        throw spde::cli::ConfigError("lower-bound requires model.kind = diagonal-additive");

    std::vector<double> hs;
    for (std::int64_t n : cfg.N_list) hs.push_back(cfg.T / static_cast<double>(n));
    const double pi = std::acos(-1.0);
    const double c_eff = (cfg.c > 0.0) ? cfg.c : pi * pi;
    const auto sweep = spde::lower_bound_sweep(c_eff, cfg.rho, cfg.delta, cfg.T, cfg.modes, hs,
                                               cfg.build_scheme());
    std::cout << "        h        exact_gap      lower_bound\n";
    for (const auto& p : sweep.points)
        std::printf("%10.6g %15.8g %15.8g\n", p.h, p.gap, p.bound);
    std::printf("gap decay fit: order=%.4f r2=%.4f; gap >= bound everywhere: %s\n",
                sweep.fit.order, sweep.fit.r2, sweep.dominated ? "yes" : "NO");
    for (const auto& w : sweep.warnings) std::cout << "warning: " << w << "\n";
    if (!cfg.out_path.empty()) {
        spde::emit_lower_bound_file(sweep, cfg.format, cfg.out_path);
        std::cout << "wrote " << cfg.out_path << "\n";
    }
    return sweep.dominated ? kExitOk : kExitCheckFailed;
}

int run_oracle_check(const CommonArgs& args) {
    auto cfg_args = args;
    spde::cli::RunConfig cfg;
    if (!cfg_args.config_path.empty()) cfg = spde::cli::parse_config_file(cfg_args.config_path);
    else {
        cfg.model_kind = "diagonal-additive";
        cfg.modes = 8;
        cfg.delta = 0.0;
        cfg.xi = "zero";
        cfg.samples = 100000;
    }
    spde::cli::apply_overrides(cfg, cfg_args.overrides);
    if (cfg_args.seed_set) cfg.seed = cfg_args.seed;
    spde::cli::validate(cfg);
    apply_threads(cfg_args.threads);
    if (cfg.model_kind != "diagonal-additive")
        throw spde::cli::ConfigError("oracle-check requires model.kind = diagonal-additive");

    const auto model = cfg.build_model();
    const spde::McConfig mc{cfg.samples, cfg.seed, spde::Engine::OpenMP};
    bool all_pass = true;

    for (const auto kind : {spde::SchemeKind::ExponentialEuler, spde::SchemeKind::LinearImplicitEuler}) {
        const auto check = spde::mc_scheme_variance_check(model, kind, cfg.N_list.front(), mc);
        std::printf("[%s] per-mode variance vs closed form: %s (worst |z| = %.2f at mode %d)\n",
                    kind == spde::SchemeKind::ExponentialEuler ? "exp-euler" : "impl-euler",
                    check.pass ? "pass" : "FAIL", check.worst_z, check.worst_mode + 1);
        all_pass = all_pass && check.pass;
    }
    {
        const double pi = std::acos(-1.0);
        const double c_eff = (cfg.c > 0.0) ? cfg.c : pi * pi;
        const auto check = spde::mc_exp_functional_check(c_eff, cfg.rho, cfg.delta, cfg.T,
                                                         cfg.modes, mc);
        std::printf("E[exp(-||X||^2)] MC %.8f vs product formula %.8f (SE %.2g): %s\n",
                    check.mc_estimate, check.product_formula, check.std_error,
                    check.pass ? "pass" : "FAIL");
        all_pass = all_pass && check.pass;
    }
    return all_pass ? kExitOk : kExitCheckFailed;
}

int run_perturbation_check(const CommonArgs& args) {
    const auto cfg = resolve_config(args);
    const auto model = cfg.build_model();
    spde::CoeffState xi_b = model.initial;
    const size_t bump = (cfg.modes >= 2) ? 1 : 0;
    xi_b[bump] += cfg.perturbation_eps;
    const auto result = spde::perturbation_check(model, cfg.build_scheme(), cfg.N_list.front(),
                                                 {cfg.samples, cfg.seed, spde::Engine::OpenMP},
                                                 model.initial, xi_b);
    std::printf("perturbation: LHS sup_t ||Ya-Yb||_L2 = %.6g (SE %.2g) vs RHS %.6g  [theta=%.2f, "
                "LipF=%.3g, LipB=%.3g] -> %s\n",
                result.lhs, result.lhs_std_error, result.rhs, result.theta, result.drift_lipschitz,
                result.diffusion_lipschitz, result.pass ? "pass" : "FAIL");
    return result.pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral-Galerkin SPDE simulation lab"};
    app.require_subcommand(1);

    CommonArgs sim_args, weak_args, strong_args, lb_args, oracle_args, pert_args;
    add_common(app.add_subcommand("simulate", "run one path and write the terminal state"), sim_args);
    add_common(app.add_subcommand("weak-rate", "coupled weak-error sweep"), weak_args);
    add_common(app.add_subcommand("strong-rate", "coupled strong-error sweep"), strong_args);
    add_common(app.add_subcommand("lower-bound", "deterministic variance-gap sweep"), lb_args);
    add_common(app.add_subcommand("oracle-check", "statistical checks vs closed forms"), oracle_args);
    add_common(app.add_subcommand("perturbation-check", "initial-value perturbation inequality"),
               pert_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("simulate")) return run_simulate(sim_args);
        if (app.got_subcommand("weak-rate")) return run_weak_rate(weak_args);
        if (app.got_subcommand("strong-rate")) return run_strong_rate(strong_args);
        if (app.got_subcommand("lower-bound")) return run_lower_bound(lb_args);
        if (app.got_subcommand("oracle-check")) return run_oracle_check(oracle_args);
        if (app.got_subcommand("perturbation-check")) return run_perturbation_check(pert_args);
    } catch (const spde::cli::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::runtime_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitValidation;
}
