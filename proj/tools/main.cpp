#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcf/blowup.hpp"
#include "mcf/curvature.hpp"
#include "mcf/flow.hpp"
#include "mcf/oracles.hpp"
#include "mcf/potential.hpp"

namespace {

using nlohmann::json;

// Exit codes: 0 success, 1 mathematical failure (stall, degenerate metric,
// rejected validity), 2 usage/parse/config error.
constexpr int kOk = 0;
constexpr int kMathFailure = 1;
constexpr int kUsageError = 2;

/// Fixed 17-significant-digit scientific notation: byte-identical CSV across
/// runs regardless of locale or shortest-roundtrip quirks.
std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

struct CommonArgs {
    std::string potential_text;
    bool flat = false;
    int m = 2;
    std::string format = "text";
    std::string out_path;
};

mcf::RadialMetric make_metric(const CommonArgs& args)
{
    if (args.flat)
        return mcf::RadialMetric::flat();
    if (args.potential_text.empty())
        throw CLI::ValidationError("--potential", "a potential (or --flat) is required");
    return mcf::RadialMetric::potential(mcf::parse_potential(args.potential_text));
}

std::string potential_label(const CommonArgs& args)
{
    return args.flat ? "flat" : args.potential_text;
}

/// Burns (g = S, m = 2) and the flat override are the two cases with exact
/// collapse times; attach them so reports can show the closed form.
std::optional<double> closed_form_T(const CommonArgs& args, double R0)
{
    if (args.flat)
        return 0.5 * R0 * R0;
    if (args.m != 2)
        return std::nullopt;
    static const mcf::PotentialExpr burns = mcf::parse_potential("S");
    if (mcf::parse_potential(args.potential_text) == burns)
        return mcf::oracles::burns_T_sing(R0);
    return std::nullopt;
}

void write_trajectory_csv(std::ostream& os, const mcf::Trajectory& traj)
{
    os << "t,R,H,A_sq\n";
    for (const auto& s : traj.samples)
        os << fmt17(s.t) << ',' << fmt17(s.R) << ',' << fmt17(s.H) << ','
           << fmt17(s.A_sq) << '\n';
}

const char* verdict_name(mcf::SingularityType t)
{
    switch (t) {
    case mcf::SingularityType::TypeI: return "TypeI";
    case mcf::SingularityType::TypeII: return "TypeII";
    default: return "Inconclusive";
    }
}

const char* verdict_pretty(mcf::SingularityType t)
{
    switch (t) {
    case mcf::SingularityType::TypeI: return "Type I";
    case mcf::SingularityType::TypeII: return "Type II";
    default: return "inconclusive";
    }
}

json report_json(const CommonArgs& args, double R0, const mcf::SingularityReport& rep)
{
    json t_sing = {{"trajectory", rep.T_sing_trajectory},
                   {"quadrature", rep.T_sing_quadrature}};
    if (rep.T_sing_closed_form)
        t_sing["closed_form"] = *rep.T_sing_closed_form;
    return json{{"potential", potential_label(args)},
                {"m", args.m},
                {"R0", R0},
                {"T_sing", t_sing},
                {"verdict", verdict_name(rep.type_verdict)},
                {"limit", {{"estimate", rep.limit_estimate},
                           {"predicted", rep.limit_predicted}}},
                {"c", rep.c_constant}};
}

void print_report_text(const mcf::SingularityReport& rep)
{
    std::printf("T_sing ≈ %.6f, %s, limit ≈ %.3f\n", rep.T_sing_trajectory,
                verdict_pretty(rep.type_verdict), rep.limit_estimate);
    std::printf("  trajectory %.12g, quadrature %.12g", rep.T_sing_trajectory,
                rep.T_sing_quadrature);
    if (rep.T_sing_closed_form)
        std::printf(", closed form %.12g", *rep.T_sing_closed_form);
    std::printf("\n  predicted limit %.6g, predicted lim R*H = %.6g\n",
                rep.limit_predicted, rep.c_constant);
}

int cmd_validate(const CommonArgs& args, double s_max, int samples)
{
    const auto expr = mcf::parse_potential(args.potential_text);
    const auto rep = mcf::check_validity(expr, s_max, samples);
    if (args.format == "json") {
        json j = {{"potential", args.potential_text},
                  {"g_S_at_0", rep.g_S_at_0},
                  {"cond_extension", rep.cond_extension},
                  {"cond_positive_1", rep.cond_positive_1},
                  {"cond_positive_2", rep.cond_positive_2},
                  {"samples", rep.samples},
                  {"S_max", rep.S_max}};
        if (rep.first_violation_S)
            j["first_violation_S"] = *rep.first_violation_S;
        std::cout << j.dump(2) << '\n';
    } else {
        std::printf("g_S(0) = %.12g: extension condition (g_S(0) > 0) %s\n",
                    rep.g_S_at_0, rep.cond_extension ? "holds" : "fails");
        std::printf("1/S + g_S > 0 on sampled (0, %g]: %s\n", rep.S_max,
                    rep.cond_positive_1 ? "holds" : "fails");
        std::printf("g_S + S*g_SS > 0 on sampled (0, %g]: %s\n", rep.S_max,
                    rep.cond_positive_2 ? "holds" : "fails");
        if (rep.first_violation_S)
            std::printf("first violating S = %.12g\n", *rep.first_violation_S);
        std::printf("verdict: %s\n", rep.all_ok()
                                         ? "extends to a Kahler metric on the blow-up "
                                           "(on the sampled grid)"
                                         : "rejected");
    }
    return rep.all_ok() ? kOk : kMathFailure;
}

int cmd_curvature(const CommonArgs& args, double radius)
{
    const auto metric = make_metric(args);
    const auto s = mcf::curvature_sample(metric, args.m, radius);
    if (args.format == "json") {
        json j = {{"R", s.R},
                  {"lambda_tan", s.lambda_tan},
                  {"lambda_last", s.lambda_last},
                  {"H", s.H},
                  {"A_sq", s.A_sq}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "R,lambda_tan,lambda_last,H,A_sq\n"
                  << fmt17(s.R) << ',' << fmt17(s.lambda_tan) << ','
                  << fmt17(s.lambda_last) << ',' << fmt17(s.H) << ','
                  << fmt17(s.A_sq) << '\n';
    }
    return kOk;
}

int run_flow(const CommonArgs& args, double R0, const mcf::FlowOptions& opts,
             bool write_file)
{
    const auto metric = make_metric(args);
    const auto traj = mcf::integrate(metric, args.m, R0, opts);
    if (write_file && !args.out_path.empty()) {
        std::ofstream os(args.out_path);
        if (!os)
            throw CLI::ValidationError("--out", "cannot open output file");
        write_trajectory_csv(os, traj);
    }
    if (traj.status != mcf::FlowStatus::Collapsed) {
        const char* why = traj.status == mcf::FlowStatus::Stalled
                              ? "stalled (mean curvature reached zero)"
                              : "step budget exhausted";
        std::fprintf(stderr, "flow did not collapse: %s at t = %.12g, R = %.12g\n",
                     why, traj.t_end, traj.samples.back().R);
        return kMathFailure;
    }
    const auto rep = mcf::classify(metric, args.m, R0, traj, closed_form_T(args, R0));
    if (args.format == "json")
        std::cout << report_json(args, R0, rep).dump(2) << '\n';
    else if (args.format == "csv" && write_file && args.out_path.empty())
        write_trajectory_csv(std::cout, traj);
    else
        print_report_text(rep);
    return kOk;
}

int cmd_sweep(const CommonArgs& args, double r0_min, double r0_max, int steps,
              const mcf::FlowOptions& opts)
{
    if (!(r0_min > 0.0) || !(r0_max > r0_min))
        throw CLI::ValidationError("--r0-min/--r0-max", "need 0 < r0_min < r0_max");
    if (steps < 2)
        throw CLI::ValidationError("--steps", "need at least 2 sweep steps");

    struct Row {
        double R0 = 0.0;
        double T_sing = 0.0;
        double limit = 0.0;
        std::string error;
    };
    std::vector<Row> rows(steps);
    for (int i = 0; i < steps; ++i)
        rows[i].R0 = r0_min + (r0_max - r0_min) * i / (steps - 1);

    // Independent flows: a small work pool, deterministic output order.
    std::atomic<int> next{0};
    const auto worker = [&] {
        for (int i = next.fetch_add(1); i < steps; i = next.fetch_add(1)) {
            Row& row = rows[i];
            try {
                const auto metric = make_metric(args);
                const auto traj = mcf::integrate(metric, args.m, row.R0, opts);
                const auto rep = mcf::classify(metric, args.m, row.R0, traj,
                                               closed_form_T(args, row.R0));
                row.T_sing = rep.T_sing_trajectory;
                row.limit = rep.limit_estimate;
            } catch (const std::exception& e) {
                std::string msg = e.what();
                for (auto& ch : msg)
                    if (ch == ',' || ch == '\n')
                        ch = ';';
                row.error = msg;
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_workers = std::min<unsigned>(hw, static_cast<unsigned>(steps));
    std::vector<std::thread> pool;
    for (unsigned i = 0; i + 1 < n_workers; ++i)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool)
        th.join();

    std::ostringstream table;
    table << "R0,T_sing,limit_estimate,error\n";
    bool all_ok = true;
    for (const auto& row : rows) {
        if (row.error.empty())
            table << fmt17(row.R0) << ',' << fmt17(row.T_sing) << ','
                  << fmt17(row.limit) << ",\n";
        else {
            table << fmt17(row.R0) << ",,," << row.error << '\n';
            all_ok = false;
        }
    }
    if (!args.out_path.empty()) {
        std::ofstream os(args.out_path);
        if (!os)
            throw CLI::ValidationError("--out", "cannot open output file");
        os << table.str();
    } else {
        std::cout << table.str();
    }
    return all_ok ? kOk : kMathFailure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mean curvature flow of U(m)-invariant hyperspheres in "
                 "C^m \\ {0} with radial Kahler metrics log S + g(S)"};
    app.require_subcommand(1);

    CommonArgs args;
    double s_max = 100.0;
    int val_samples = 2048;
    double radius = 1.0;
    double r0 = 1.0, r0_min = 0.5, r0_max = 2.0;
    int sweep_steps = 4;
    mcf::FlowOptions opts;

    const auto add_common = [&](CLI::App* sub, bool allow_flat) {
        sub->add_option("--potential", args.potential_text,
                        "radial potential g(S), e.g. \"S\" for the Burns metric");
        if (allow_flat)
            sub->add_flag("--flat", args.flat,
                          "use the flat metric f = S instead of log S + g");
        sub->add_option("--format", args.format, "text|csv|json")
            ->check(CLI::IsMember({"text", "csv", "json"}));
        sub->add_option("--out", args.out_path, "output file path");
    };
    const auto add_flow_opts = [&](CLI::App* sub) {
        sub->add_option("--m", args.m, "complex dimension (>= 2)")->check(CLI::Range(2, 64));
        sub->add_option("--r-stop", opts.r_stop, "collapse radius threshold");
        sub->add_option("--rel-tol", opts.rel_tol, "adaptive relative tolerance");
        sub->add_option("--abs-tol", opts.abs_tol, "adaptive absolute tolerance");
        sub->add_option("--max-steps", opts.max_steps, "step budget");
        sub->add_option("--stride", opts.output_stride,
                        "min time between recorded samples (0 = every step)");
    };

    auto* validate = app.add_subcommand("validate",
                                        "check the Kahler/extension conditions of g");
    add_common(validate, false);
    validate->get_option("--potential")->required();
    validate->add_option("--s-max", s_max, "upper end of the sampled S range");
    validate->add_option("--samples", val_samples, "grid size")->check(CLI::Range(2, 1 << 24));

    auto* curv = app.add_subcommand("curvature",
                                    "principal curvatures, H and |A|^2 at one radius");
    add_common(curv, true);
    curv->add_option("--m", args.m, "complex dimension (>= 2)")
        ->check(CLI::Range(2, 64))
        ->required();
    curv->add_option("--radius", radius, "hypersphere radius R")->required();

    auto* flow = app.add_subcommand("flow", "integrate dR/dt = H(R) until collapse");
    add_common(flow, true);
    add_flow_opts(flow);
    flow->add_option("--r0", r0, "initial radius")->required();

    auto* classify = app.add_subcommand("classify",
                                        "integrate and report the singularity type");
    add_common(classify, true);
    add_flow_opts(classify);
    classify->add_option("--r0", r0, "initial radius")->required();

    auto* sweep = app.add_subcommand("sweep",
                                     "independent flows over a range of initial radii");
    add_common(sweep, true);
    add_flow_opts(sweep);
    sweep->add_option("--r0-min", r0_min, "smallest initial radius")->required();
    sweep->add_option("--r0-max", r0_max, "largest initial radius")->required();
    sweep->add_option("--steps", sweep_steps, "number of rows")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (validate->parsed())
            return cmd_validate(args, s_max, val_samples);
        if (curv->parsed())
            return cmd_curvature(args, radius);
        if (flow->parsed())
            return run_flow(args, r0, opts, true);
        if (classify->parsed())
            return run_flow(args, r0, opts, false);
        if (sweep->parsed())
            return cmd_sweep(args, r0_min, r0_max, sweep_steps, opts);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return kUsageError;
    } catch (const mcf::SyntaxError& e) {
        std::cerr << "syntax error: " << e.what() << '\n';
        return kUsageError;
    } catch (const mcf::UnknownIdentifierError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kUsageError;
    } catch (const mcf::InvalidInitialRadiusError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const mcf::OutOfRangeError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const mcf::DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kUsageError;
    } catch (const mcf::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kMathFailure;
    }
    return kUsageError;
}
