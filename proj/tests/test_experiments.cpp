#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "eulerlab/experiments.hpp"

using namespace eulerlab;

TEST_CASE("field spec factory") {
    const GridSpec g(16);
    FieldSpec f;
    f.kind = "taylor-green";
    f.amplitude = 2.0;
    const PhysicalField tg = f.build(g);
    CHECK(max_abs(tg) == doctest::Approx(2.0).epsilon(1e-12));

    f.kind = "synthetic";
    f.seed = 3;
    const PhysicalField syn = f.build(g);
    CHECK(l2_norm(to_spectral(syn)) == doctest::Approx(1.0).epsilon(1e-12));

    f.kind = "white-noise";
    CHECK_THROWS_AS(f.build(g), std::invalid_argument);
}

TEST_CASE("run_flux_scaling") {
    SUBCASE("smooth field passes at the beta = 1 proxy rate") {
        FluxScalingArgs args;
        args.alpha = 1.0 / 3.0;
        args.beta_override = 1.0;
        args.grid_n = 32;
        args.field.kind = "synthetic";  // Taylor-Green's flux cancels exactly (single shell)
        args.field.seed = 1;
        args.field.k_max = 3;
        args.eps_list = {0.8, 0.65, 0.5, 0.4};
        const FluxScalingReport rep = run_flux_scaling(args);
        CHECK(rep.verdict == Verdict::pass);
        CHECK(rep.scaling.slope >= 1.85);
        CHECK(rep.beta_measured > 0.7);  // smooth field looks near-Lipschitz to the estimator
    }

    SUBCASE("alpha above beta yields hypothesis-not-met") {
        FluxScalingArgs args;
        args.alpha = 0.4;
        args.beta_override = 0.3;
        args.grid_n = 16;
        args.eps_list = {0.9, 0.8};
        const FluxScalingReport rep = run_flux_scaling(args);
        CHECK(rep.verdict == Verdict::hypothesis_not_met);
    }

    SUBCASE("trajectory input adds the time-composed norm") {
        FluxScalingArgs args;
        args.alpha = 1.0 / 3.0;
        args.beta_override = 1.0;
        args.grid_n = 16;
        args.eps_list = {0.95, 0.9, 0.85, 0.8};
        SolverConfig sc;
        sc.dt = 1e-2;
        sc.final_time = 0.1;
        const Trajectory traj = run(to_spectral(taylor_green(GridSpec(16))), sc);
        const FluxScalingReport rep = run_flux_scaling(args, MollifierKernel::bump(), &traj);
        CHECK(rep.time_composed_norm > 0.0);
    }
}

TEST_CASE("run_gradient_scaling") {
    SUBCASE("band-limited field beats the predicted exponent") {
        GradientScalingArgs args;
        args.q = 3.0;
        args.grid_n = 32;
        args.field.kind = "synthetic";
        args.field.seed = 2;
        args.field.k_max = 4;  // smooth-ish band
        args.eps_list = {0.8, 0.65, 0.5, 0.4};
        const GradientScalingReport rep = run_gradient_scaling(args);
        CHECK(rep.p == doctest::Approx(0.5 * (1.125 + 1.5)));
        CHECK(rep.r_critical == doctest::Approx(5.0 / 3.0));
        CHECK(rep.verdict == Verdict::pass);
        CHECK(rep.fit.slope >= rep.predicted_exponent - 0.15);
    }

    SUBCASE("zero field is degenerate") {
        GradientScalingArgs args;
        args.q = 3.0;
        args.grid_n = 16;
        args.field.amplitude = 0.0;
        args.eps_list = {0.95, 0.9, 0.85, 0.8};
        CHECK(run_gradient_scaling(args).verdict == Verdict::degenerate);
    }

    SUBCASE("q guard") {
        GradientScalingArgs args;
        args.q = 2.0;
        CHECK_THROWS_AS(run_gradient_scaling(args), std::invalid_argument);
    }

    SUBCASE("critical rate decreases from q=3 to q=6") {
        CHECK(thm2_parameters(6.0).r_critical == doctest::Approx(5.0 / 4.0));
        CHECK(thm2_parameters(3.0).r_critical > thm2_parameters(6.0).r_critical);
    }
}

TEST_CASE("sweep config") {
    SUBCASE("validation") {
        SweepConfig c;
        c.nu_list = {1e-2};
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
        c.nu_list = {1e-3, 1e-2};
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
        c.nu_list = {1e-2, -1e-3};
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
        c.nu_list = {1e-2, 1e-3};
        CHECK_NOTHROW(c.validate());
    }

    SUBCASE("coupling exponent selection") {
        SweepConfig c;
        c.alpha = 0.4;
        c.beta = 0.5;
        CHECK(c.eps_exponent() == doctest::Approx(0.8));
        c.coupling = "high";
        CHECK(c.eps_exponent() == doctest::Approx(0.8));
        c.coupling = "low";
        CHECK(c.eps_exponent() == doctest::Approx(0.8));
        c.coupling = "explicit";
        c.explicit_eps_exponent = 0.1;
        CHECK(c.eps_exponent() == doctest::Approx(0.1));
        c.coupling = "nonsense";
        CHECK_THROWS_AS(c.eps_exponent(), std::invalid_argument);
    }

    SUBCASE("json round trip with overrides") {
        const nlohmann::json j = {{"alpha", 0.45},
                                  {"beta", 0.55},
                                  {"nu_list", {1e-2, 5e-3}},
                                  {"grid", 16},
                                  {"dt", 2e-3},
                                  {"T", 0.5},
                                  {"seed", 11},
                                  {"eps_exponent", 0.07},
                                  {"init", {{"kind", "synthetic"}, {"spectral_slope", 2.5}}}};
        const SweepConfig c = sweep_config_from_json(j);
        CHECK(c.alpha == 0.45);
        CHECK(c.beta == 0.55);
        CHECK(c.nu_list.size() == 2);
        CHECK(c.grid_n == 16);
        CHECK(c.coupling == "explicit");
        CHECK(c.explicit_eps_exponent == 0.07);
        CHECK(c.init.kind == "synthetic");
        CHECK(c.init.spectral_slope == 2.5);
        CHECK(c.init.seed == 11);
    }
}

namespace {

SweepConfig small_sweep() {
    SweepConfig c;
    c.alpha = 0.4;
    c.beta = 0.5;
    c.nu_list = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
    c.coupling = "explicit";
    c.explicit_eps_exponent = 0.02;  // keeps eps resolved on the small grid
    c.grid_n = 16;
    c.dt = 2e-3;
    c.final_time = 0.1;
    c.output_stride = 10;
    return c;
}

}  // namespace

TEST_CASE("run_viscosity_sweep") {
    SUBCASE("smooth data: defect decays at least linearly, rows deterministic") {
        const SweepConfig c = small_sweep();
        const SweepResult a = run_viscosity_sweep(c);
        CHECK(a.verdict == Verdict::pass);
        CHECK(a.rows.size() == 4);
        CHECK(a.rates.defect_exponent == doctest::Approx(0.2));
        for (const SweepRow& r : a.rows) {
            CHECK(r.defect >= 0.0);
            CHECK(r.dissipation > 0.0);
            CHECK(r.besov_time_norm > 0.0);
        }
        const SweepResult b = run_viscosity_sweep(c);
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
            CHECK(a.rows[i].defect == b.rows[i].defect);
            CHECK(a.rows[i].dissipation == b.rows[i].dissipation);
            CHECK(a.rows[i].besov_time_norm == b.rows[i].besov_time_norm);
        }
    }

    SUBCASE("parallel workers reproduce the serial rows in order") {
        SweepConfig c = small_sweep();
        const SweepResult serial = run_viscosity_sweep(c);
        c.workers = 4;
        const SweepResult par = run_viscosity_sweep(c);
        REQUIRE(par.rows.size() == serial.rows.size());
        for (std::size_t i = 0; i < serial.rows.size(); ++i) {
            CHECK(par.rows[i].nu == serial.rows[i].nu);
            CHECK(par.rows[i].defect == serial.rows[i].defect);
        }
    }

    SUBCASE("under-resolved couplings are skipped, starvation rejected") {
        SweepConfig c = small_sweep();
        c.explicit_eps_exponent = 0.8;  // eps(nu) far below 2h on a 16-point grid
        CHECK_THROWS_AS(run_viscosity_sweep(c), std::invalid_argument);
    }

    SUBCASE("uniform bound check is reported") {
        SweepConfig c = small_sweep();
        c.uniform_bound_C = 1e9;
        const SweepResult res = run_viscosity_sweep(c);
        CHECK(res.uniform_bound_ok);
        CHECK(res.max_besov_time_norm > 0.0);
        CHECK(res.max_besov_time_norm < 1e9);
    }
}

TEST_CASE("sweep serialization and plots") {
    const SweepConfig c = small_sweep();
    const SweepResult res = run_viscosity_sweep(c);

    SUBCASE("json report carries config, rows, fits, verdicts") {
        const nlohmann::json j = to_json(res);
        CHECK(j.contains("config"));
        CHECK(j.contains("rows"));
        CHECK(j.contains("fits"));
        CHECK(j.contains("verdicts"));
        CHECK(j["rows"].size() == res.rows.size());
        CHECK(j["config"]["alpha"].get<double>() == 0.4);
        CHECK(j["verdicts"]["defect_scaling"].get<std::string>() == "PASS");
    }

    SUBCASE("csv output is stable") {
        const std::string path = "sweep_test.csv";
        write_sweep_csv(res, path);
        std::ifstream in(path);
        std::stringstream buf;
        buf << in.rdbuf();
        const std::string first = buf.str();
        CHECK(first.substr(0, first.find('\n')) == "nu,eps,defect,dissipation,besov_time_norm");
        write_sweep_csv(res, path);
        std::ifstream in2(path);
        std::stringstream buf2;
        buf2 << in2.rdbuf();
        CHECK(buf2.str() == first);
        std::remove(path.c_str());
    }

    SUBCASE("plot script is deterministic and references both files") {
        const std::string a = emit_plots("sweep.csv", "flux.csv", 0.2, 0.25);
        const std::string b = emit_plots("sweep.csv", "flux.csv", 0.2, 0.25);
        CHECK(a == b);
        CHECK(a.find("sweep.csv") != std::string::npos);
        CHECK(a.find("flux.csv") != std::string::npos);
        CHECK(a.find("logscale") != std::string::npos);
    }
}
