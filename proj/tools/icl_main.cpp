// Command-line front end: critical-curve reports, stability analysis,
// local-minimality perturbation experiments, and symmetrization corpus runs.
//
// Exit codes: 0 ok, 2 length/area threshold violated, 3 numerical failure,
// 4 stability check failed, 5 minimality check failed, 6 symmetrization
// produced an increase.

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "icl/io.hpp"
#include "icl/svg.hpp"

namespace {

using namespace icl;

constexpr int kExitThreshold = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitStability = 4;
constexpr int kExitMinimality = 5;
constexpr int kExitSteiner = 6;

void write_report(const std::filesystem::path& dir, const std::string& name,
                  const JsonNode& doc) {
    write_text_file(dir / name, doc.dump());
}

int run_critical(const RunConfig& config, double x0, double L, double A0, bool has_L,
                 bool want_svg) {
    try {
        if (!has_L) L = solve_length(x0, A0);
        const CriticalParams params = make_params(x0, L);
        const CriticalCurve curve = build_critical_curve(params, config.grid_n);
        const double el_res = el_residual(curve);
        const double hk = hk_counterexample_ratio(params);

        const auto dir = output_directory(config);
        if (config.format == OutputFormat::csv)
            write_text_file(dir / "curve.csv", curve_csv(curve.view));
        else
            write_text_file(dir / "curve.json", curve_json(curve.view).dump());
        write_report(dir, "critical_report.json", critical_report_json(params, el_res, hk));

        // invariant report: Euler-Lagrange residual, boundary conditions,
        // vertical symmetry of the parametrization
        const double len = 2.0 * params.L;
        const Vec2 p0 = curve.point(0.0), p1 = curve.point(len);
        const Vec2 d0 = curve.dpoint(0.0), d1 = curve.dpoint(len);
        double sym_x = 0.0, sym_y = 0.0;
        for (std::size_t i = 0; i < 257; ++i) {
            const double s = len * static_cast<double>(i) / 256.0;
            const Vec2 a = curve.point(s), b = curve.point(len - s);
            sym_x = std::max(sym_x, std::abs(a.x + b.x));
            sym_y = std::max(sym_y, std::abs(a.y - b.y));
        }
        JsonNode inv = JsonNode::object();
        inv.set("el_residual", JsonNode::number(el_res))
            .set("boundary_x_start", JsonNode::number(std::abs(p0.x - params.x0)))
            .set("boundary_x_end", JsonNode::number(std::abs(p1.x + params.x0)))
            .set("boundary_y_start", JsonNode::number(std::abs(p0.y)))
            .set("boundary_y_end", JsonNode::number(std::abs(p1.y)))
            .set("boundary_slope_start", JsonNode::number(std::abs(d0.y)))
            .set("boundary_slope_end", JsonNode::number(std::abs(d1.y)))
            .set("symmetry_x", JsonNode::number(sym_x))
            .set("symmetry_y", JsonNode::number(sym_y));
        if (!has_L)
            inv.set("area_round_trip", JsonNode::number(std::abs(area_closed_form(params) - A0)));
        write_report(dir, "critical_invariants.json", inv);

        if (want_svg || config.svg) write_text_file(dir / "curve.svg", curve_svg(curve.view));
        return 0;
    } catch (const ThresholdViolation& e) {
        std::fprintf(stderr, "threshold: %s\n", e.what());
        return kExitThreshold;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
}

int run_stability(const RunConfig& config, double x0, double L, bool single,
                  const std::string& sweep) {
    try {
        const auto dir = output_directory(config);
        if (single) {
            const StabilityReport report = stability_report(make_params(x0, L));
            write_report(dir, "stability_report.json", stability_report_json(report));
            if (!report.pass) {
                std::fprintf(stderr, "stability check failed\n");
                return kExitStability;
            }
            return 0;
        }
        double lo = 0.0, hi = 0.0, step = 0.0;
        if (std::sscanf(sweep.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0.0 ||
            lo <= 0.0 || hi >= 0.25 || lo > hi)
            throw std::invalid_argument("ratio sweep must be lo:hi:step inside (0, 0.25)");
        std::vector<std::vector<double>> rows;
        bool all_pass = true;
        for (double ratio = lo; ratio <= hi + 0.5 * step; ratio += step) {
            // ratio = x0/(L+x0) with x0 = 1
            const CriticalParams params = make_params(1.0, (1.0 - ratio) / ratio);
            const StabilityReport report = stability_report(params);
            rows.push_back({ratio, report.mu0, report.mu_w1_det, report.coercivity});
            all_pass = all_pass && report.pass && report.mu_w1_det > 1.0;
        }
        write_text_file(dir / "stability_sweep.csv",
                        csv_table({"ratio", "mu0", "mu_w1", "coercivity"}, rows));
        if (!all_pass) {
            std::fprintf(stderr, "stability sweep failed\n");
            return kExitStability;
        }
        return 0;
    } catch (const ThresholdViolation& e) {
        std::fprintf(stderr, "threshold: %s\n", e.what());
        return kExitThreshold;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
}

int run_perturb(const RunConfig& config, double x0, double L, unsigned long long seed,
                std::size_t count, double eps, bool area_constrained) {
    try {
        const CriticalParams params = make_params(x0, L);
        const CriticalCurve curve = build_critical_curve(params, config.grid_n);
        const DiscreteCurve& base = curve.view;
        const double lambda = params.lambda;
        const double coer = coercivity_constant(params);
        const double len = 2.0 * params.L;

        std::mt19937_64 rng(seed);
        JsonNode table = JsonNode::array();
        bool all_positive = true;
        double min_delta = 0.0;
        bool have_min = false;
        for (std::size_t k = 0; k < count; ++k) {
            const Profile phi = random_clamped_profile(rng, params.L, eps, 12, area_constrained);
            JsonNode row = JsonNode::object();
            row.set("index", JsonNode::number(static_cast<double>(k)));
            double delta = 0.0;
            if (area_constrained) {
                // exactly area-preserving correction; the energy alone must rise
                const AreaPreservingFamily fam = make_area_preserving(base, phi, {1.0});
                const double f_base = total_inverse_curvature(base, frame_and_curvature(base));
                delta = fam.F_values.front() - f_base;
                row.set("delta_F", JsonNode::number(delta))
                    .set("area_drift", JsonNode::number(std::abs(fam.A_values.front() -
                                                                 enclosed_area(base))))
                    .set("correction", JsonNode::number(fam.g.front()));
            } else {
                const VariationField field = normal_field(phi);
                const double f0 = energy_along(base, field, 0.0);
                const double a0 = area_along(base, field, 0.0);
                const double f1 = energy_along(base, field, 1.0);
                const double a1 = area_along(base, field, 1.0);
                delta = (f1 - lambda * a1) - (f0 - lambda * a0);
                const double w22 = simpson(
                    [&phi](double s) {
                        const double v = phi(s), dv = phi.d(s), ddv = phi.dd(s);
                        return v * v + dv * dv + ddv * ddv;
                    },
                    0.0, len, 4096);
                const double bound = 0.5 * coer * w22;
                row.set("delta", JsonNode::number(delta))
                    .set("w22_norm_sq", JsonNode::number(w22))
                    .set("coercivity_bound", JsonNode::number(bound))
                    .set("bound_holds", JsonNode::boolean(delta >= 0.8 * bound));
            }
            if (!have_min || delta < min_delta) {
                min_delta = delta;
                have_min = true;
            }
            all_positive = all_positive && delta > 0.0;
            table.push(std::move(row));
        }

        JsonNode doc = JsonNode::object();
        doc.set("x0", JsonNode::number(params.x0))
            .set("L", JsonNode::number(params.L))
            .set("eps", JsonNode::number(eps))
            .set("seed", JsonNode::number(static_cast<double>(seed)))
            .set("count", JsonNode::number(static_cast<double>(count)))
            .set("coercivity", JsonNode::number(coer))
            .set("min_delta", JsonNode::number(min_delta))
            .set("area_constrained", JsonNode::boolean(area_constrained))
            .set("rows", std::move(table));
        write_report(output_directory(config), "perturb_table.json", doc);

        if (!all_positive) {
            std::fprintf(stderr, "minimality check failed: min delta %.17g\n", min_delta);
            return kExitMinimality;
        }
        return 0;
    } catch (const ThresholdViolation& e) {
        std::fprintf(stderr, "threshold: %s\n", e.what());
        return kExitThreshold;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
}

int run_steiner(const RunConfig& config, std::size_t count, unsigned long long seed) {
    try {
        std::mt19937_64 rng(seed);
        JsonNode records = JsonNode::array();
        std::vector<std::vector<double>> rows;
        bool all_decrease = true;
        double max_drift = 0.0;
        for (std::size_t k = 0; k < count; ++k) {
            const GraphPair pair = random_graph_pair(rng);
            const FunctionalComparison cmp = compare_functionals(pair);
            records.push(steiner_comparison_json(cmp));
            rows.push_back({static_cast<double>(k), cmp.A_before, cmp.A_after, cmp.F_before,
                            cmp.F_after, cmp.F_before - cmp.F_after});
            all_decrease = all_decrease && cmp.F_after < cmp.F_before;
            max_drift = std::max(max_drift, std::abs(cmp.A_after - cmp.A_before));
        }
        const auto dir = output_directory(config);
        write_text_file(dir / "steiner_summary.csv",
                        csv_table({"pair", "A_before", "A_after", "F_before", "F_after",
                                   "decrease"},
                                  rows));
        JsonNode doc = JsonNode::object();
        doc.set("count", JsonNode::number(static_cast<double>(count)))
            .set("seed", JsonNode::number(static_cast<double>(seed)))
            .set("max_area_drift", JsonNode::number(max_drift))
            .set("records", std::move(records));
        write_report(dir, "steiner_records.json", doc);
        if (!all_decrease) {
            std::fprintf(stderr, "symmetrization failed to decrease the energy\n");
            return kExitSteiner;
        }
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"equilibrium curves of the total inverse curvature energy"};
    app.require_subcommand(1);

    RunConfig config;
    std::string format = "json";
    app.add_option("--output-dir", config.output_dir, "directory for generated files")
        ->capture_default_str();
    app.add_option("--grid-n", config.grid_n, "samples per curve")->capture_default_str();
    app.add_option("--fd-step", config.fd_step, "finite-difference step")->capture_default_str();
    app.add_option("--root-tol", config.root_tol, "root-finding tolerance")
        ->capture_default_str();
    app.add_option("--mu-scan-step", config.mu_scan_step, "determinant scan step")
        ->capture_default_str();
    app.add_option("--format", format, "curve file format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    auto* critical = app.add_subcommand("critical", "build the critical curve and its report");
    double c_x0 = 1.0, c_L = 0.0, c_A0 = 0.0;
    bool c_svg = false;
    critical->add_option("--x0", c_x0, "endpoint half-distance")->required();
    auto* c_lopt = critical->add_option("--L", c_L, "half-length");
    auto* c_aopt = critical->add_option("--A0", c_A0, "prescribed enclosed area");
    c_lopt->excludes(c_aopt);
    c_aopt->excludes(c_lopt);
    critical->add_flag("--svg", c_svg, "emit an SVG figure");

    auto* stability = app.add_subcommand("stability", "stability constants and regime trace");
    double s_x0 = 0.0, s_L = 0.0;
    std::string s_sweep;
    auto* s_xopt = stability->add_option("--x0", s_x0, "endpoint half-distance");
    auto* s_lopt = stability->add_option("--L", s_L, "half-length");
    auto* s_ropt = stability->add_option("--ratio-sweep", s_sweep, "lo:hi:step over x0/(L+x0)");
    s_ropt->excludes(s_xopt);
    s_ropt->excludes(s_lopt);

    auto* perturb = app.add_subcommand("perturb", "random perturbation minimality experiment");
    double p_x0 = 1.0, p_L = 4.0, p_eps = 1e-2;
    unsigned long long p_seed = 7;
    std::size_t p_count = 200;
    bool p_area = false;
    perturb->add_option("--x0", p_x0)->required();
    perturb->add_option("--L", p_L)->required();
    perturb->add_option("--seed", p_seed)->capture_default_str();
    perturb->add_option("--count", p_count)->capture_default_str();
    perturb->add_option("--eps", p_eps, "C2 norm of the perturbations")->capture_default_str();
    perturb->add_flag("--area-constrained", p_area, "use the area-preserving correction");

    auto* steiner = app.add_subcommand("steiner", "symmetrization corpus comparison");
    std::size_t t_count = 100;
    unsigned long long t_seed = 42;
    steiner->add_option("--count", t_count)->capture_default_str();
    steiner->add_option("--seed", t_seed)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (!config.valid()) {
        std::fprintf(stderr, "invalid configuration (grid too coarse or tolerance <= 0)\n");
        return kExitNumeric;
    }
    config.format = (format == "csv") ? OutputFormat::csv : OutputFormat::json;

    if (critical->parsed()) {
        const bool has_L = c_lopt->count() > 0;
        if (!has_L && c_aopt->count() == 0) {
            std::fprintf(stderr, "critical: need --L or --A0\n");
            return kExitNumeric;
        }
        return run_critical(config, c_x0, c_L, c_A0, has_L, c_svg);
    }
    if (stability->parsed()) {
        const bool single = s_ropt->count() == 0;
        if (single && (s_xopt->count() == 0 || s_lopt->count() == 0)) {
            std::fprintf(stderr, "stability: need --x0 and --L, or --ratio-sweep\n");
            return kExitNumeric;
        }
        return run_stability(config, s_x0, s_L, single, s_sweep);
    }
    if (perturb->parsed())
        return run_perturb(config, p_x0, p_L, p_seed, p_count, p_eps, p_area);
    return run_steiner(config, t_count, t_seed);
}
