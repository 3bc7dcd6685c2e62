#ifndef EULERLAB_EXPERIMENTS_HPP
#define EULERLAB_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eulerlab/commutator.hpp"
#include "eulerlab/exponents.hpp"
#include "eulerlab/io.hpp"
#include "eulerlab/solver.hpp"

namespace eulerlab {

enum class Verdict { pass, fail, degenerate, hypothesis_not_met };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "PASS";
        case Verdict::fail: return "FAIL";
        case Verdict::degenerate: return "DEGENERATE";
        default: return "HYPOTHESIS_NOT_MET";
    }
}

/// Initial-data factory shared by the experiment runners.
struct FieldSpec {
    std::string kind = "taylor-green";  // or "synthetic"
    double amplitude = 1.0;
    double spectral_slope = 2.0;
    std::uint64_t seed = 0;
    int k_min = 1;
    int k_max = 0;  // 0 = n/3

    PhysicalField build(const GridSpec& grid) const {
        if (kind == "taylor-green") return taylor_green(grid, amplitude);
        if (kind == "synthetic") {
            SyntheticFieldSpec s;
            s.spectral_slope = spectral_slope;
            s.seed = seed;
            s.k_min = k_min;
            s.k_max = k_max > 0 ? k_max : grid.dealias_limit();
            return make_synthetic_field(s, grid);
        }
        throw std::invalid_argument("FieldSpec: unknown kind '" + kind + "'");
    }
};

// ---------------------------------------------------------------------------
// Flux scaling (Besov-condition shape)
// ---------------------------------------------------------------------------

struct FluxScalingReport {
    double alpha = 0.0;
    double beta_used = 0.0;     // beta entering the predicted rate
    double beta_measured = 0.0; // fitted from difference norms
    FluxScalingResult scaling;
    double time_composed_norm = -1.0;  // L^{1/alpha} in time of the semi-norm, when a trajectory is given
    Verdict verdict = Verdict::fail;
};

struct FluxScalingArgs {
    double alpha = 0.4;
    double beta_override = 0.0;  // 0 = use measured beta
    FieldSpec field;
    int grid_n = 32;
    std::vector<double> eps_list;
    int points_per_radius = 4;
};

inline FluxScalingReport run_flux_scaling(const FluxScalingArgs& args,
                                          const MollifierKernel& kernel = MollifierKernel::bump(),
                                          const Trajectory* trajectory = nullptr) {
    const GridSpec grid(args.grid_n);
    const SpectralField U = to_spectral(args.field.build(grid));
    FluxScalingReport rep;
    rep.alpha = args.alpha;
    rep.beta_measured = fit_besov_exponent(U);
    rep.beta_used = args.beta_override > 0.0 ? args.beta_override : rep.beta_measured;
    if (rep.beta_used <= args.alpha) {
        rep.verdict = Verdict::hypothesis_not_met;
        return rep;
    }
    rep.scaling = flux_scaling(U, rep.beta_used, args.alpha, args.eps_list, kernel, args.points_per_radius);
    rep.verdict = rep.scaling.degenerate ? Verdict::degenerate
                                         : (rep.scaling.pass ? Verdict::pass : Verdict::fail);
    if (trajectory && !trajectory->fields.empty()) {
        const double q = 2.0 / (1.0 - args.alpha);
        std::vector<std::pair<double, double>> series;
        for (std::size_t i = 0; i < trajectory->fields.size(); ++i)
            series.emplace_back(trajectory->times[i],
                                besov_seminorm(trajectory->fields[i], rep.beta_used, q).value);
        rep.time_composed_norm = time_lebesgue_norm(series, 1.0 / args.alpha);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Gradient-condition scaling
// ---------------------------------------------------------------------------

struct GradientScalingReport {
    double q = 0.0;
    double p = 0.0;              // interval midpoint
    double predicted_exponent = 0.0;
    double r_critical = 0.0;
    LineFit fit;
    bool degenerate = false;
    Verdict verdict = Verdict::fail;
    std::vector<double> eps_values;
    std::vector<double> I1_values;
};

struct GradientScalingArgs {
    double q = 3.0;
    FieldSpec field;
    int grid_n = 32;
    std::vector<double> eps_list;
    int points_per_radius = 4;
};

inline GradientScalingReport run_gradient_scaling(const GradientScalingArgs& args,
                                                  const MollifierKernel& kernel = MollifierKernel::bump()) {
    if (!(args.q > 2.0)) throw std::invalid_argument("run_gradient_scaling: need q > 2");
    const Thm2Params interval = thm2_parameters(args.q);
    const double p_mid = 0.5 * (interval.p_lower + interval.p_upper);
    const Thm2Params params = thm2_parameters(args.q, p_mid);

    GradientScalingReport rep;
    rep.q = args.q;
    rep.p = p_mid;
    rep.predicted_exponent = params.eps_exponent;
    rep.r_critical = params.r_critical;

    const GridSpec grid(args.grid_n);
    const SpectralField U = to_spectral(args.field.build(grid));
    const double floor_eps = 2.0 * grid.spacing();
    std::vector<double> xs, ys;
    for (double e : args.eps_list) {
        if (e < floor_eps) continue;
        const FluxReport fr = flux_terms(U, Epsilon(e), kernel, args.points_per_radius);
        rep.eps_values.push_back(e);
        rep.I1_values.push_back(fr.I1);
        xs.push_back(e);
        ys.push_back(fr.I1);
    }
    if (xs.size() < 4) throw std::invalid_argument("run_gradient_scaling: fewer than 4 resolved eps values");
    double scale = 0.0;
    for (double v : ys) scale = std::max(scale, v);
    if (scale <= 1e-13 * std::max(1.0, l2_norm(U))) {
        rep.degenerate = true;
        rep.verdict = Verdict::degenerate;
        return rep;
    }
    rep.fit = fit_loglog(xs, ys);
    rep.verdict = rep.fit.slope >= rep.predicted_exponent - 0.15 ? Verdict::pass : Verdict::fail;
    return rep;
}

// ---------------------------------------------------------------------------
// Vanishing-viscosity sweep
// ---------------------------------------------------------------------------

struct SweepConfig {
    double alpha = 0.4;
    double beta = 0.5;
    std::vector<double> nu_list;  // strictly decreasing
    std::string coupling = "auto";  // "low", "high", "auto" (by beta), or explicit exponent
    double explicit_eps_exponent = 0.0;
    int grid_n = 32;
    double dt = 1e-3;
    double final_time = 1.0;
    FieldSpec init;
    double uniform_bound_C = 0.0;  // 0 = report only, no check
    int output_stride = 10;
    int points_per_radius = 4;
    int workers = 1;

    void validate() const {
        if (nu_list.size() < 2) throw std::invalid_argument("SweepConfig: need at least two nu values");
        for (std::size_t i = 0; i + 1 < nu_list.size(); ++i)
            if (!(nu_list[i] > nu_list[i + 1]))
                throw std::invalid_argument("SweepConfig: nu_list must be strictly decreasing");
        for (double nu : nu_list)
            if (!(nu > 0.0)) throw std::invalid_argument("SweepConfig: nu values must be positive");
    }

    double eps_exponent() const {
        if (coupling == "explicit") return explicit_eps_exponent;
        const Thm3Rates r = thm3_rates(alpha, beta);
        if (coupling == "auto") return r.eps_exponent;
        if (coupling == "low") return alpha / (alpha + beta - 2.0 * alpha * beta);
        if (coupling == "high") return alpha / beta;
        throw std::invalid_argument("SweepConfig: unknown coupling '" + coupling + "'");
    }
};

struct SweepRow {
    double nu = 0.0;
    double eps = 0.0;
    double defect = 0.0;            // |E(T) - E(0)|
    double dissipation = 0.0;       // nu * int ||grad v_eps||_2^2 dt
    double besov_time_norm = 0.0;   // L^{1/alpha}(0,T) of the sampled semi-norm
};

struct SweepResult {
    SweepConfig config;
    Thm3Rates rates;
    std::vector<SweepRow> rows;
    std::vector<double> skipped_nu;
    LineFit defect_fit;
    double max_besov_time_norm = 0.0;
    bool uniform_bound_ok = true;
    double tolerance = 0.2;
    Verdict verdict = Verdict::fail;
};

namespace detail {

inline SweepRow sweep_one(const SweepConfig& cfg, const SpectralField& v0, double nu, double eps,
                          const MollifierKernel& kernel) {
    SolverConfig sc;
    sc.nu = nu;
    sc.dt = cfg.dt;
    sc.final_time = cfg.final_time;
    sc.output_stride = cfg.output_stride;
    sc.store_fields = true;
    const Trajectory traj = run(v0, sc);

    SweepRow row;
    row.nu = nu;
    row.eps = eps;
    const auto& b = traj.budget.samples;
    row.defect = std::abs(b.back().kinetic - b.front().kinetic);

    const SpectralMollifier moll(v0.grid, kernel, Epsilon(eps));
    const double q = 2.0 / (1.0 - cfg.alpha);
    std::vector<std::pair<double, double>> grad2_series, besov_series;
    const ShiftSet shifts = make_shift_set(v0.grid);
    for (std::size_t i = 0; i < traj.fields.size(); ++i) {
        const SpectralField veps = moll.apply(traj.fields[i]);
        const double g = h1_seminorm(veps);
        grad2_series.emplace_back(traj.times[i], g * g);
        besov_series.emplace_back(traj.times[i], besov_seminorm(traj.fields[i], cfg.beta, q, shifts).value);
    }
    double diss = 0.0;
    for (std::size_t i = 0; i + 1 < grad2_series.size(); ++i)
        diss += 0.5 * (grad2_series[i + 1].first - grad2_series[i].first) *
                (grad2_series[i].second + grad2_series[i + 1].second);
    row.dissipation = nu * diss;
    row.besov_time_norm = time_lebesgue_norm(besov_series, 1.0 / cfg.alpha);
    return row;
}

}  // namespace detail

inline SweepResult run_viscosity_sweep(const SweepConfig& cfg,
                                       const MollifierKernel& kernel = MollifierKernel::bump()) {
    cfg.validate();
    SweepResult res;
    res.config = cfg;
    res.rates = thm3_rates(cfg.alpha, cfg.beta);

    const GridSpec grid(cfg.grid_n);
    const SpectralField v0 = dealias(to_spectral(cfg.init.build(grid)));  // same datum for every nu
    const double e = cfg.eps_exponent();
    const double min_eps = 2.0 * grid.spacing();

    struct Job {
        double nu, eps;
    };
    std::vector<Job> jobs;
    for (double nu : cfg.nu_list) {
        const double eps = std::pow(nu, e);
        if (eps < min_eps || eps > 1.0) {
            res.skipped_nu.push_back(nu);  // under-resolved coupling, never clamped
            continue;
        }
        jobs.push_back({nu, eps});
    }
    if (jobs.size() < 4)
        throw std::invalid_argument("run_viscosity_sweep: fewer than 4 usable nu values after resolution skips");

    res.rows.resize(jobs.size());
    if (cfg.workers > 1) {
        std::vector<std::future<SweepRow>> futures;
        for (const Job& j : jobs)
            futures.push_back(std::async(std::launch::async, [&, j] {
                return detail::sweep_one(cfg, v0, j.nu, j.eps, kernel);
            }));
        for (std::size_t i = 0; i < jobs.size(); ++i) res.rows[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < jobs.size(); ++i)
            res.rows[i] = detail::sweep_one(cfg, v0, jobs[i].nu, jobs[i].eps, kernel);
    }

    std::vector<double> nus, defects;
    double energy0 = 0.5 * l2_norm(v0) * l2_norm(v0);
    double max_defect = 0.0;
    for (const SweepRow& r : res.rows) {
        nus.push_back(r.nu);
        defects.push_back(std::max(r.defect, 1e-300));
        max_defect = std::max(max_defect, r.defect);
        res.max_besov_time_norm = std::max(res.max_besov_time_norm, r.besov_time_norm);
    }
    if (cfg.uniform_bound_C > 0.0) res.uniform_bound_ok = res.max_besov_time_norm <= cfg.uniform_bound_C;

    const double floor = 1e-9 * std::max(energy0, 1e-300);
    if (max_defect <= floor) {
        res.verdict = Verdict::pass;  // below measurement floor: decay at least as fast as predicted
        return res;
    }
    res.defect_fit = fit_loglog(nus, defects);
    res.verdict = res.defect_fit.slope >= res.rates.defect_exponent - res.tolerance ? Verdict::pass : Verdict::fail;
    return res;
}

// ---------------------------------------------------------------------------
// Config & report serialization
// ---------------------------------------------------------------------------

inline void from_json_field(const nlohmann::json& j, FieldSpec& f) {
    if (j.contains("kind")) f.kind = j["kind"].get<std::string>();
    if (j.contains("amplitude")) f.amplitude = j["amplitude"].get<double>();
    if (j.contains("spectral_slope")) f.spectral_slope = j["spectral_slope"].get<double>();
    if (j.contains("seed")) f.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("k_min")) f.k_min = j["k_min"].get<int>();
    if (j.contains("k_max")) f.k_max = j["k_max"].get<int>();
}

inline SweepConfig sweep_config_from_json(const nlohmann::json& j) {
    SweepConfig c;
    if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
    if (j.contains("beta")) c.beta = j["beta"].get<double>();
    if (j.contains("nu_list")) c.nu_list = j["nu_list"].get<std::vector<double>>();
    if (j.contains("coupling")) c.coupling = j["coupling"].get<std::string>();
    if (j.contains("eps_exponent")) {
        c.coupling = "explicit";
        c.explicit_eps_exponent = j["eps_exponent"].get<double>();
    }
    if (j.contains("grid")) c.grid_n = j["grid"].get<int>();
    if (j.contains("dt")) c.dt = j["dt"].get<double>();
    if (j.contains("T")) c.final_time = j["T"].get<double>();
    if (j.contains("init")) from_json_field(j["init"], c.init);
    if (j.contains("seed")) c.init.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("uniform_bound_C")) c.uniform_bound_C = j["uniform_bound_C"].get<double>();
    if (j.contains("output_stride")) c.output_stride = j["output_stride"].get<int>();
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
    return c;
}

inline nlohmann::json to_json(const SweepResult& res) {
    nlohmann::json j;
    j["config"] = {{"alpha", res.config.alpha},       {"beta", res.config.beta},
                   {"nu_list", res.config.nu_list},   {"coupling", res.config.coupling},
                   {"grid", res.config.grid_n},       {"dt", res.config.dt},
                   {"T", res.config.final_time},      {"init", res.config.init.kind},
                   {"seed", res.config.init.seed},    {"uniform_bound_C", res.config.uniform_bound_C}};
    j["rates"] = {{"eps_exponent", res.rates.eps_exponent},
                  {"defect_exponent", res.rates.defect_exponent},
                  {"low_branch", res.rates.low_branch},
                  {"branch_warning", res.rates.branch_warning}};
    j["rows"] = nlohmann::json::array();
    for (const SweepRow& r : res.rows)
        j["rows"].push_back({{"nu", r.nu},
                             {"eps", r.eps},
                             {"defect", r.defect},
                             {"dissipation", r.dissipation},
                             {"besov_time_norm", r.besov_time_norm}});
    j["skipped_nu"] = res.skipped_nu;
    j["fits"] = {{"defect_slope", res.defect_fit.slope},
                 {"intercept", res.defect_fit.intercept},
                 {"r_squared", res.defect_fit.r_squared}};
    j["verdicts"] = {{"defect_scaling", to_string(res.verdict)},
                     {"uniform_bound_ok", res.uniform_bound_ok},
                     {"max_besov_time_norm", res.max_besov_time_norm}};
    return j;
}

inline void write_sweep_csv(const SweepResult& res, const std::string& path) {
    CsvWriter csv(path, {"nu", "eps", "defect", "dissipation", "besov_time_norm"});
    for (const SweepRow& r : res.rows) csv.row({r.nu, r.eps, r.defect, r.dissipation, r.besov_time_norm});
}

/// Gnuplot script for log-log defect-vs-nu and flux-vs-eps panels with
/// reference slopes; plain text, stable across runs for golden-file checks.
inline std::string emit_plots(const std::string& sweep_csv, const std::string& flux_csv,
                              double defect_slope_ref, double flux_slope_ref) {
    std::ostringstream os;
    os << "set terminal pngcairo size 1200,500\n";
    os << "set output 'scaling.png'\n";
    os << "set multiplot layout 1,2\n";
    os << "set logscale xy\n";
    os << "set datafile separator ','\n";
    os << "set key left top\n";
    os << "set xlabel 'nu'\n";
    os << "set ylabel 'energy defect'\n";
    os << "plot '" << sweep_csv << "' skip 1 using 1:3 with linespoints title 'defect', \\\n";
    os << "     x**" << format_double(defect_slope_ref) << " title 'reference slope "
       << format_double(defect_slope_ref) << "'\n";
    os << "set xlabel 'eps'\n";
    os << "set ylabel 'I1+I2'\n";
    os << "plot '" << flux_csv << "' skip 1 using 1:($2+$3) with linespoints title 'flux', \\\n";
    os << "     x**" << format_double(flux_slope_ref) << " title 'reference slope "
       << format_double(flux_slope_ref) << "'\n";
    os << "unset multiplot\n";
    return os.str();
}

}  // namespace eulerlab

#endif
