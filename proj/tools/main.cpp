#include "fqmsim/fqm.hpp"
#include "fqmsim/fuzzyalg.hpp"
#include "fqmsim/report.hpp"
#include "fqmsim/scenario.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace fqmsim;

std::string format_value(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write output file '" + out_path + "'");
    }
    out << text;
}

ReportFormat parse_format(const std::string& name) {
    if (name == "json") {
        return ReportFormat::json;
    }
    if (name == "csv") {
        return ReportFormat::csv;
    }
    throw std::invalid_argument("--format: expected 'json' or 'csv', got '" + name + "'");
}

struct RunOptions {
    std::vector<std::string> files;
    std::string out_path;
    std::string format_name;
    std::int64_t shots = -1;
    bool shots_given = false;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

int cmd_run(const RunOptions& opt) {
    const ReportFormat format = parse_format(opt.format_name);
    if (!opt.out_path.empty() && opt.files.size() > 1) {
        throw std::invalid_argument("--out: only valid with a single scenario file");
    }
    for (const auto& file : opt.files) {
        Scenario scenario = load_scenario(file);
        if (opt.shots_given || opt.seed_given) {
            SamplingSpec sampling = scenario.sampling.value_or(SamplingSpec{});
            if (opt.shots_given) {
                if (opt.shots < 0) {
                    throw std::invalid_argument("--shots: must be >= 0");
                }
                sampling.shots = opt.shots;
            }
            if (opt.seed_given) {
                sampling.seed = opt.seed;
            }
            scenario.sampling = sampling;
        }
        const RunReport report = run_scenario(scenario);
        write_output(emit_report(report, format), opt.out_path);
    }
    return 0;
}

int cmd_fuzzy_mul(const std::string& a_path, const std::string& b_path,
                  const std::string& out_path) {
    const FuzzyMatrix a = load_fuzzy_matrix(a_path);
    const FuzzyMatrix b = load_fuzzy_matrix(b_path);
    std::ostringstream out;
    write_fuzzy_matrix(out, fmat_mul(a, b));
    write_output(out.str(), out_path);
    return 0;
}

int cmd_fuzzy_basis(const std::string& a_path, const std::string& c_path,
                    const std::string& out_path) {
    const MetricMatrix a(load_fuzzy_matrix(a_path));
    const FuzzyMatrix c = load_fuzzy_matrix(c_path);
    std::ostringstream out;
    write_fuzzy_matrix(out, change_of_basis(a, c).matrix());
    write_output(out.str(), out_path);
    return 0;
}

int cmd_sg(double theta_deg, const std::string& convention_name) {
    SgConvention convention = SgConvention::cos_squared;
    if (convention_name == "literal_cos") {
        convention = SgConvention::literal_cos;
    } else if (convention_name != "cos_squared") {
        throw std::invalid_argument("--convention: expected 'cos_squared' or 'literal_cos'");
    }
    if (!(theta_deg >= 0.0 && theta_deg <= 90.0)) {
        throw std::invalid_argument("--theta: must lie in [0, 90] degrees");
    }
    const double theta = theta_deg * std::numbers::pi / 180.0;
    const double w = sg_apparatus_weight(theta, convention);

    std::ostringstream out;
    out << "theta_deg: " << format_value(theta_deg) << '\n';
    out << "apparatus_weight: " << format_value(w) << '\n';
    auto print_diagonal = [&](const char* label, double value) {
        out << label << ":\n";
        out << format_value(value) << " 0\n0 " << format_value(value) << '\n';
    };
    print_diagonal("system_operator", 1.0);
    print_diagonal("apparatus_operator", w);
    std::cout << out.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum measurement chains (Von Neumann / Zurek) with fuzzy-logic correction"};
    app.require_subcommand(1);

    std::string default_format = "json";
    if (const char* env = std::getenv("FQMSIM_FORMAT")) {
        default_format = env;
    }

    RunOptions run_opt;
    run_opt.format_name = default_format;
    auto* run = app.add_subcommand("run", "Run scenario files and emit reports");
    run->add_option("files", run_opt.files, "Scenario files (JSON)")->required();
    run->add_option("--out", run_opt.out_path, "Write the report to this path instead of stdout");
    run->add_option("--format", run_opt.format_name, "Report format: json or csv");
    auto* shots_opt = run->add_option("--shots", run_opt.shots, "Override sampling shot count");
    auto* seed_opt = run->add_option("--seed", run_opt.seed, "Override sampling seed");

    std::string mul_a, mul_b, mul_out;
    auto* fuzzy_mul = app.add_subcommand("fuzzy-mul", "Max-min product of two fuzzy matrix files");
    fuzzy_mul->add_option("A", mul_a, "Left matrix file")->required();
    fuzzy_mul->add_option("B", mul_b, "Right matrix file")->required();
    fuzzy_mul->add_option("--out", mul_out, "Output path (default stdout)");

    std::string basis_a, basis_c, basis_out;
    auto* fuzzy_basis = app.add_subcommand(
        "fuzzy-basis", "Metric matrix under a new basis: C^T A C in the max-min algebra");
    fuzzy_basis->add_option("A", basis_a, "Metric matrix file (symmetric)")->required();
    fuzzy_basis->add_option("C", basis_c, "Transition matrix file")->required();
    fuzzy_basis->add_option("--out", basis_out, "Output path (default stdout)");

    double theta_deg = 0.0;
    std::string convention = "cos_squared";
    auto* sg = app.add_subcommand("sg", "Print the Stern-Gerlach weight operators for an angle");
    sg->add_option("--theta", theta_deg, "Tilt angle in degrees, within [0, 90]")->required();
    sg->add_option("--convention", convention, "cos_squared (default) or literal_cos");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(run)) {
            run_opt.shots_given = shots_opt->count() > 0;
            run_opt.seed_given = seed_opt->count() > 0;
            return cmd_run(run_opt);
        }
        if (app.got_subcommand(fuzzy_mul)) {
            return cmd_fuzzy_mul(mul_a, mul_b, mul_out);
        }
        if (app.got_subcommand(fuzzy_basis)) {
            return cmd_fuzzy_basis(basis_a, basis_c, basis_out);
        }
        if (app.got_subcommand(sg)) {
            return cmd_sg(theta_deg, convention);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
