// Command-line front end: exit 0 on PASS/complete, 2 on a FAIL verdict, 1 on error.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eulerlab/experiments.hpp"

using namespace eulerlab;
using nlohmann::json;

namespace {

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    json j;
    in >> j;
    return j;
}

FieldSpec field_from_json(const json& j) {
    FieldSpec f;
    if (!j.is_null() && !j.empty()) from_json_field(j, f);
    return f;
}

int verdict_exit(Verdict v) { return v == Verdict::fail ? 2 : 0; }

struct FieldFlags {
    std::string kind;
    double amplitude = -1.0;
    double slope = -1.0;
    std::optional<std::uint64_t> seed;
    int k_min = 0, k_max = -1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--init", kind, "initial field kind: taylor-green or synthetic");
        cmd->add_option("--amplitude", amplitude, "taylor-green amplitude");
        cmd->add_option("--slope", slope, "synthetic spectral slope");
        cmd->add_option_function<std::uint64_t>("--seed", [this](std::uint64_t s) { seed = s; },
                                                "synthetic field seed");
        cmd->add_option("--k-min", k_min, "synthetic band lower limit");
        cmd->add_option("--k-max", k_max, "synthetic band upper limit (0 = n/3)");
    }

    void apply(FieldSpec& f) const {
        if (!kind.empty()) f.kind = kind;
        if (amplitude >= 0.0) f.amplitude = amplitude;
        if (slope >= 0.0) f.spectral_slope = slope;
        if (seed) f.seed = *seed;
        if (k_min > 0) f.k_min = k_min;
        if (k_max >= 0) f.k_max = k_max;
    }
};

int cmd_exponents(double alpha, double beta, double q, double p, bool as_json) {
    json out;
    if (q > 0.0) {
        const Thm2Params t2 = p > 0.0 ? thm2_parameters(q, p) : thm2_parameters(q);
        out["q"] = t2.q;
        out["p_lower"] = t2.p_lower;
        out["p_upper"] = t2.p_upper;
        out["r_critical"] = t2.r_critical;
        if (p > 0.0) {
            out["p"] = t2.p;
            out["theta"] = t2.theta;
            out["eps_exponent"] = t2.eps_exponent;
        }
    }
    if (alpha > 0.0 && beta > 0.0) {
        const Thm1Params t1 = thm1_parameters(alpha, beta);
        out["alpha"] = t1.alpha;
        out["beta"] = t1.beta;
        out["eta"] = t1.eta;
        out["space_exponent"] = t1.q;
        out["time_exponent"] = t1.time_exponent;
        out["flux_exponent"] = t1.flux_exponent;
        const Thm3Rates t3 = thm3_rates(alpha, beta);
        out["coupling_eps_exponent"] = t3.eps_exponent;
        out["defect_exponent"] = t3.defect_exponent;
        out["dissipation_eps_power"] = t3.dissipation_eps_power;
        out["low_branch"] = t3.low_branch;
        out["branch_warning"] = t3.branch_warning;
    }
    if (out.empty()) throw std::runtime_error("exponents: give --alpha/--beta and/or --q");
    if (as_json) {
        std::cout << out.dump(2) << "\n";
    } else {
        for (auto it = out.begin(); it != out.end(); ++it)
            std::cout << it.key() << " = " << it.value().dump() << "\n";
    }
    return 0;
}

int cmd_mollify(const std::string& input, const std::string& output, double eps, const std::string& path,
                bool allow_under) {
    const PhysicalField f = read_snapshot(input);
    MollifyOptions opt;
    opt.path = path == "quadrature" ? MollifyPath::quadrature : MollifyPath::spectral;
    opt.allow_underresolved = allow_under;
    bool warned = false;
    opt.warned_underresolved = &warned;
    const PhysicalField out = mollify(f, Epsilon(eps), MollifierKernel::bump(), opt);
    write_snapshot(out, output);
    if (warned) std::cerr << "warning: eps below 4x grid spacing; kernel marginally resolved\n";
    std::cout << "mollified " << input << " -> " << output << " (eps " << format_double(eps) << ")\n";
    return 0;
}

int cmd_besov(const std::string& input, int grid_n, const FieldFlags& flags, double beta, double q,
              const std::string& csv) {
    SpectralField U;
    if (!input.empty()) {
        U = to_spectral(read_snapshot(input));
    } else {
        FieldSpec f;
        f.kind = "synthetic";
        flags.apply(f);
        U = to_spectral(f.build(GridSpec(grid_n)));
    }
    const BesovEstimate est = besov_seminorm(U, beta, q);
    const double beta_hat = fit_besov_exponent(U);
    std::cout << "beta,q,value,argmax_shift_x,argmax_shift_y,argmax_shift_z\n"
              << csv_line({est.beta, est.q, est.value, est.argmax_shift[0], est.argmax_shift[1],
                           est.argmax_shift[2]})
              << "\n";
    std::cout << "fitted beta-hat: " << format_double(beta_hat) << "\n";
    if (!csv.empty()) {
        CsvWriter writer(csv, {"beta", "q", "value", "argmax_shift_x", "argmax_shift_y", "argmax_shift_z"});
        writer.row({est.beta, est.q, est.value, est.argmax_shift[0], est.argmax_shift[1], est.argmax_shift[2]});
    }
    return 0;
}

int cmd_commutator(const std::string& input, int grid_n, const FieldFlags& flags, double eps, int ppr) {
    SpectralField U;
    if (!input.empty()) {
        U = to_spectral(read_snapshot(input));
    } else {
        FieldSpec f;
        f.kind = "synthetic";
        flags.apply(f);
        U = to_spectral(f.build(GridSpec(grid_n)));
    }
    const CommutatorBundle b = cet_decompose(U, Epsilon(eps), MollifierKernel::bump(), ppr);
    const double rel = b.identity_residual / std::max(b.tensor_scale, 1e-300);
    std::cout << "identity residual " << format_double(b.identity_residual) << " (relative "
              << format_double(rel) << ", scale " << format_double(b.tensor_scale) << ")\n";
    const bool ok = rel <= 1e-11;
    std::cout << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? 0 : 2;
}

int cmd_flux_scaling(const std::string& config_path, FluxScalingArgs args, bool have_alpha, double alpha,
                     bool have_beta, double beta, int grid_n, std::vector<double> eps_list,
                     const FieldFlags& flags, const std::string& csv) {
    const json cfg = load_config(config_path);
    if (cfg.contains("alpha")) args.alpha = cfg["alpha"].get<double>();
    if (cfg.contains("beta")) args.beta_override = cfg["beta"].get<double>();
    if (cfg.contains("grid")) args.grid_n = cfg["grid"].get<int>();
    if (cfg.contains("eps_list")) args.eps_list = cfg["eps_list"].get<std::vector<double>>();
    if (cfg.contains("init")) args.field = field_from_json(cfg["init"]);
    if (have_alpha) args.alpha = alpha;
    if (have_beta) args.beta_override = beta;
    if (grid_n > 0) args.grid_n = grid_n;
    if (!eps_list.empty()) args.eps_list = eps_list;
    flags.apply(args.field);

    const FluxScalingReport rep = run_flux_scaling(args);
    json out;
    out["config"] = {{"alpha", args.alpha},
                     {"beta_override", args.beta_override},
                     {"grid", args.grid_n},
                     {"eps_list", args.eps_list},
                     {"init", args.field.kind},
                     {"seed", args.field.seed}};
    out["beta_measured"] = rep.beta_measured;
    out["beta_used"] = rep.beta_used;
    out["rows"] = json::array();
    for (const FluxReport& r : rep.scaling.reports)
        out["rows"].push_back({{"eps", r.eps},
                               {"I1", r.I1},
                               {"I2", r.I2},
                               {"trilinear", r.trilinear},
                               {"identity_residual", r.identity_residual}});
    out["fits"] = {{"slope", rep.scaling.slope},
                   {"intercept", rep.scaling.intercept},
                   {"r_squared", rep.scaling.r_squared},
                   {"predicted_rate", rep.scaling.predicted_rate}};
    out["verdicts"] = {{"flux_scaling", to_string(rep.verdict)}};
    std::cout << out.dump(2) << "\n";
    if (!csv.empty()) {
        CsvWriter writer(csv, {"eps", "I1", "I2", "trilinear", "identity_residual"});
        for (const FluxReport& r : rep.scaling.reports)
            writer.row({r.eps, r.I1, r.I2, r.trilinear, r.identity_residual});
    }
    return verdict_exit(rep.verdict);
}

int cmd_gradient_scaling(const std::string& config_path, GradientScalingArgs args, double q, int grid_n,
                         std::vector<double> eps_list, const FieldFlags& flags) {
    const json cfg = load_config(config_path);
    if (cfg.contains("q")) args.q = cfg["q"].get<double>();
    if (cfg.contains("grid")) args.grid_n = cfg["grid"].get<int>();
    if (cfg.contains("eps_list")) args.eps_list = cfg["eps_list"].get<std::vector<double>>();
    if (cfg.contains("init")) args.field = field_from_json(cfg["init"]);
    if (q > 0.0) args.q = q;
    if (grid_n > 0) args.grid_n = grid_n;
    if (!eps_list.empty()) args.eps_list = eps_list;
    flags.apply(args.field);

    const GradientScalingReport rep = run_gradient_scaling(args);
    json out;
    out["config"] = {{"q", args.q}, {"grid", args.grid_n}, {"eps_list", args.eps_list}};
    out["p"] = rep.p;
    out["r_critical"] = rep.r_critical;
    out["predicted_exponent"] = rep.predicted_exponent;
    out["rows"] = json::array();
    for (std::size_t i = 0; i < rep.eps_values.size(); ++i)
        out["rows"].push_back({{"eps", rep.eps_values[i]}, {"I1", rep.I1_values[i]}});
    out["fits"] = {{"slope", rep.fit.slope}, {"r_squared", rep.fit.r_squared}};
    out["verdicts"] = {{"gradient_scaling", to_string(rep.verdict)}};
    std::cout << out.dump(2) << "\n";
    return verdict_exit(rep.verdict);
}

int cmd_solve(int grid_n, double nu, double dt, double T, int stride, const FieldFlags& flags,
              const std::string& budget_csv, const std::string& snapshot_out) {
    FieldSpec f;
    flags.apply(f);
    const GridSpec g(grid_n);
    SolverConfig c;
    c.nu = nu;
    c.dt = dt;
    c.final_time = T;
    c.output_stride = stride;
    c.store_fields = !snapshot_out.empty();
    const Trajectory traj = run(to_spectral(f.build(g)), c);
    if (!budget_csv.empty()) {
        CsvWriter writer(budget_csv, {"t", "kinetic", "dissipation_cum", "residual"});
        for (const auto& s : traj.budget.samples) writer.row({s.t, s.kinetic, s.dissipation_cum, s.residual});
    }
    if (!snapshot_out.empty()) write_snapshot(to_physical(traj.fields.back()), snapshot_out);
    const auto& last = traj.budget.samples.back();
    std::cout << "t " << format_double(last.t) << "  kinetic " << format_double(last.kinetic)
              << "  dissipation " << format_double(last.dissipation_cum) << "  residual "
              << format_double(last.residual) << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const json& overrides, const std::string& csv,
              const std::string& report_path) {
    json cfg = load_config(config_path);
    for (auto it = overrides.begin(); it != overrides.end(); ++it) cfg[it.key()] = it.value();
    const SweepConfig c = sweep_config_from_json(cfg);
    const SweepResult res = run_viscosity_sweep(c);
    const json out = to_json(res);
    if (!report_path.empty()) {
        std::ofstream f(report_path);
        f << out.dump(2) << "\n";
    }
    std::cout << out.dump(2) << "\n";
    if (!csv.empty()) write_sweep_csv(res, csv);
    return verdict_exit(res.verdict);
}

int cmd_plot(const std::string& sweep_csv, const std::string& flux_csv, double defect_ref, double flux_ref,
             const std::string& output) {
    const std::string script = emit_plots(sweep_csv, flux_csv, defect_ref, flux_ref);
    if (output.empty()) {
        std::cout << script;
    } else {
        std::ofstream f(output);
        if (!f) throw std::runtime_error("cannot open " + output);
        f << script;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral fluid laboratory for periodic-domain energy-conservation experiments"};
    app.require_subcommand(1);

    // exponents
    auto* exp_cmd = app.add_subcommand("exponents", "closed-form exponent tables");
    double e_alpha = 0.0, e_beta = 0.0, e_q = 0.0, e_p = 0.0;
    bool e_json = false;
    exp_cmd->add_option("--alpha", e_alpha);
    exp_cmd->add_option("--beta", e_beta);
    exp_cmd->add_option("--q", e_q);
    exp_cmd->add_option("--p", e_p);
    exp_cmd->add_flag("--json", e_json, "emit JSON");

    // mollify
    auto* mol_cmd = app.add_subcommand("mollify", "mollify a field snapshot");
    std::string m_in, m_out, m_path = "spectral";
    double m_eps = 0.5;
    bool m_allow = false;
    mol_cmd->add_option("--input", m_in)->required();
    mol_cmd->add_option("--output", m_out)->required();
    mol_cmd->add_option("--eps", m_eps)->required();
    mol_cmd->add_option("--path", m_path)->check(CLI::IsMember({"spectral", "quadrature"}));
    mol_cmd->add_flag("--allow-underresolved", m_allow);

    // besov
    auto* bes_cmd = app.add_subcommand("besov", "sampled Besov semi-norm of a field");
    std::string b_in, b_csv;
    int b_grid = 32;
    double b_beta = 0.5, b_q = 2.0;
    FieldFlags b_flags;
    bes_cmd->add_option("--input", b_in, "field snapshot (otherwise a synthetic field is generated)");
    bes_cmd->add_option("--grid", b_grid);
    bes_cmd->add_option("--beta", b_beta);
    bes_cmd->add_option("--qnorm", b_q);
    bes_cmd->add_option("--csv", b_csv);
    b_flags.attach(bes_cmd);

    // commutator-check
    auto* com_cmd = app.add_subcommand("commutator-check", "verify the commutator identity");
    std::string c_in;
    int c_grid = 32, c_ppr = 4;
    double c_eps = 0.25;
    FieldFlags c_flags;
    com_cmd->add_option("--input", c_in);
    com_cmd->add_option("--grid", c_grid);
    com_cmd->add_option("--eps", c_eps);
    com_cmd->add_option("--points-per-radius", c_ppr);
    c_flags.attach(com_cmd);

    // flux-scaling
    auto* flux_cmd = app.add_subcommand("flux-scaling", "flux decay versus mollification scale");
    std::string f_config, f_csv;
    double f_alpha = 0.0, f_beta = 0.0;
    int f_grid = 0;
    std::vector<double> f_eps;
    FieldFlags f_flags;
    flux_cmd->add_option("--config", f_config);
    auto* f_alpha_opt = flux_cmd->add_option("--alpha", f_alpha);
    auto* f_beta_opt = flux_cmd->add_option("--beta", f_beta);
    flux_cmd->add_option("--grid", f_grid);
    flux_cmd->add_option("--eps", f_eps);
    flux_cmd->add_option("--csv", f_csv);
    f_flags.attach(flux_cmd);

    // gradient-scaling
    auto* grad_cmd = app.add_subcommand("gradient-scaling", "I1 decay under the gradient condition");
    std::string g_config;
    double g_q = 0.0;
    int g_grid = 0;
    std::vector<double> g_eps;
    FieldFlags g_flags;
    grad_cmd->add_option("--config", g_config);
    grad_cmd->add_option("--q", g_q);
    grad_cmd->add_option("--grid", g_grid);
    grad_cmd->add_option("--eps", g_eps);
    g_flags.attach(grad_cmd);

    // solve
    auto* sol_cmd = app.add_subcommand("solve", "run the pseudo-spectral solver");
    int s_grid = 32, s_stride = 10;
    double s_nu = 0.0, s_dt = 1e-3, s_T = 1.0;
    std::string s_budget, s_snapshot;
    FieldFlags s_flags;
    sol_cmd->add_option("--grid", s_grid);
    sol_cmd->add_option("--nu", s_nu);
    sol_cmd->add_option("--dt", s_dt);
    sol_cmd->add_option("--T", s_T);
    sol_cmd->add_option("--stride", s_stride);
    sol_cmd->add_option("--budget-csv", s_budget);
    sol_cmd->add_option("--snapshot-out", s_snapshot);
    s_flags.attach(sol_cmd);

    // sweep
    auto* sw_cmd = app.add_subcommand("sweep", "vanishing-viscosity sweep");
    std::string w_config, w_csv, w_report;
    double w_alpha = -1.0, w_beta = -1.0, w_dt = -1.0, w_T = -1.0;
    int w_grid = 0, w_workers = 0;
    std::vector<double> w_nu;
    sw_cmd->add_option("--config", w_config);
    sw_cmd->add_option("--alpha", w_alpha);
    sw_cmd->add_option("--beta", w_beta);
    sw_cmd->add_option("--grid", w_grid);
    sw_cmd->add_option("--dt", w_dt);
    sw_cmd->add_option("--T", w_T);
    sw_cmd->add_option("--nu", w_nu);
    sw_cmd->add_option("--workers", w_workers);
    sw_cmd->add_option("--csv", w_csv);
    sw_cmd->add_option("--report", w_report);

    // plot
    auto* plot_cmd = app.add_subcommand("plot", "emit a gnuplot script for sweep and flux CSVs");
    std::string p_sweep = "sweep.csv", p_flux = "flux.csv", p_out;
    double p_defect = 0.2, p_flux_slope = 0.25;
    plot_cmd->add_option("--sweep-csv", p_sweep);
    plot_cmd->add_option("--flux-csv", p_flux);
    plot_cmd->add_option("--defect-slope", p_defect);
    plot_cmd->add_option("--flux-slope", p_flux_slope);
    plot_cmd->add_option("--output", p_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (exp_cmd->parsed()) return cmd_exponents(e_alpha, e_beta, e_q, e_p, e_json);
        if (mol_cmd->parsed()) return cmd_mollify(m_in, m_out, m_eps, m_path, m_allow);
        if (bes_cmd->parsed()) return cmd_besov(b_in, b_grid, b_flags, b_beta, b_q, b_csv);
        if (com_cmd->parsed()) return cmd_commutator(c_in, c_grid, c_flags, c_eps, c_ppr);
        if (flux_cmd->parsed())
            return cmd_flux_scaling(f_config, FluxScalingArgs{}, f_alpha_opt->count() > 0, f_alpha,
                                    f_beta_opt->count() > 0, f_beta, f_grid, f_eps, f_flags, f_csv);
        if (grad_cmd->parsed()) return cmd_gradient_scaling(g_config, GradientScalingArgs{}, g_q, g_grid, g_eps, g_flags);
        if (sol_cmd->parsed()) return cmd_solve(s_grid, s_nu, s_dt, s_T, s_stride, s_flags, s_budget, s_snapshot);
        if (sw_cmd->parsed()) {
            json overrides = json::object();
            if (w_alpha >= 0.0) overrides["alpha"] = w_alpha;
            if (w_beta >= 0.0) overrides["beta"] = w_beta;
            if (w_grid > 0) overrides["grid"] = w_grid;
            if (w_dt > 0.0) overrides["dt"] = w_dt;
            if (w_T > 0.0) overrides["T"] = w_T;
            if (!w_nu.empty()) overrides["nu_list"] = w_nu;
            if (w_workers > 0) overrides["workers"] = w_workers;
            return cmd_sweep(w_config, overrides, w_csv, w_report);
        }
        if (plot_cmd->parsed()) return cmd_plot(p_sweep, p_flux, p_defect, p_flux_slope, p_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
