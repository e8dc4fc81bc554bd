#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fqmsim/report.hpp"
#include "fqmsim/sampling.hpp"
#include "fqmsim/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace fqmsim;

namespace {

constexpr const char* kMinimalScenario = R"({
  "name": "minimal",
  "system_coeffs": [
    {"re": 0.7071067811865476},
    {"re": 0.7071067811865476}
  ],
  "apparatus_dim": 2
})";

std::string scenario_path(const std::string& file) {
    return std::string(FQMSIM_SCENARIO_DIR) + "/" + file;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

int run_cli(const std::string& args, bool raw_command = false) {
    const std::string command = raw_command ? args : std::string(FQMSIM_CLI_PATH) + " " + args;
    const int status = std::system(command.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

int count_section_rows(const std::string& csv, const std::string& section) {
    std::istringstream in(csv);
    std::string line;
    bool inside = false;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) {
            if (inside) {
                break;
            }
            inside = line == "# " + section;
            continue;
        }
        if (inside) {
            ++rows;
        }
    }
    return rows;
}

}  // namespace

TEST_CASE("minimal scenario parses without environment or fuzzy blocks") {
    const Scenario s = parse_scenario(kMinimalScenario);
    CHECK(s.name == "minimal");
    CHECK(s.system_coeffs.size() == 2);
    CHECK(s.apparatus_dim == 2);
    CHECK_FALSE(s.environment_states.has_value());
    CHECK_FALSE(s.fuzzy.has_value());
    CHECK_FALSE(s.sampling.has_value());
    CHECK(s.renormalize);
}

TEST_CASE("stern-gerlach fixture resolves to uniform 0.5 apparatus weights") {
    const Scenario s = load_scenario(scenario_path("stern_gerlach_45.json"));
    const RunReport report = run_scenario(s);
    REQUIRE(report.fqmc.has_value());
    CHECK(report.fqmc->per_branch(0) == 0.5);
    CHECK(report.fqmc->per_branch(1) == 0.5);
}

TEST_CASE("negative shots are rejected naming the field") {
    const std::string text = R"({
      "system_coeffs": [{"re": 1.0}],
      "apparatus_dim": 1,
      "sampling": {"shots": -5, "seed": 1}
    })";
    CHECK_THROWS_WITH_AS(parse_scenario(text), "sampling.shots: must be >= 0",
                         std::invalid_argument);
}

TEST_CASE("parse errors name the offending field") {
    CHECK_THROWS_WITH_AS(parse_scenario(R"({"apparatus_dim": 2})"),
                         "system_coeffs: missing required field", std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        parse_scenario(R"({"system_coeffs": [{"re": 0.4}], "apparatus_dim": 1})"),
        "system_coeffs: squared norm is 0.16000000000000003, expected 1 within 1e-12",
        std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario(R"({"system_coeffs": [{"re": 1}], "apparatus_dim": 1,
                                       "unexpected": 3})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario("not json at all"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_scenario(R"({
          "system_coeffs": [{"re": 1.0}, {"re": 0.0}],
          "apparatus_dim": 2,
          "environment": {"states": [[{"re": 1.0}]]}
        })"),
                         "environment.states: expected 2 states (one per system branch), got 1",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_scenario(R"({
          "system_coeffs": [{"re": 1.0}],
          "apparatus_dim": 1,
          "fuzzy": {"mode": "stern_gerlach", "theta_deg": 120.0}
        })"),
                         "fuzzy.theta_deg: must lie in [0, 90], got 120", std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_scenario(R"({
          "system_coeffs": [{"re": 1.0}],
          "apparatus_dim": 1,
          "fuzzy": {"mode": "explicit", "weights": {"system": [1.5]}}
        })"),
                         "fuzzy.weights.system[0]: weight must lie in [0, 1], got 1.5",
                         std::invalid_argument);
}

TEST_CASE("von neumann branch weights are the squared coefficients") {
    const Scenario s = load_scenario(scenario_path("von_neumann.json"));
    const RunReport report = run_scenario(s);
    CHECK(report.branch_probabilities(0) == doctest::Approx(0.36).epsilon(1e-14));
    CHECK(report.branch_probabilities(1) == doctest::Approx(0.64).epsilon(1e-14));
    CHECK_FALSE(report.decoherence.has_value());
    CHECK_FALSE(report.fqmc.has_value());
    REQUIRE(report.outcome_counts.has_value());
    std::int64_t total = 0;
    for (const auto c : *report.outcome_counts) {
        total += c;
    }
    CHECK(total == 10000);
}

TEST_CASE("zurek fixture decoheres ideally") {
    const Scenario s = load_scenario(scenario_path("zurek_orthonormal.json"));
    const RunReport report = run_scenario(s);
    REQUIRE(report.decoherence.has_value());
    CHECK(report.decoherence->is_ideal);
    CHECK(std::abs(report.density(0, 3)) <= kTol);
    CHECK(report.density(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(report.density(3, 3).real() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("explicit environment weights give the 9:1 split") {
    const Scenario s = load_scenario(scenario_path("fuzzy_explicit_env.json"));
    const RunReport report = run_scenario(s);
    CHECK(report.branch_probabilities(0) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(report.branch_probabilities(1) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(std::abs(report.branch_probabilities.sum() - 1.0) <= 1e-9);
}

TEST_CASE("renormalize false reports the raw weighted amplitudes") {
    const std::string text = R"({
      "name": "raw",
      "system_coeffs": [{"re": 0.7071067811865476}, {"re": 0.7071067811865476}],
      "apparatus_dim": 2,
      "environment": {
        "states": [
          [{"re": 1.0}, {"re": 0.0}],
          [{"re": 0.0}, {"re": 1.0}]
        ]
      },
      "fuzzy": {"mode": "explicit", "weights": {"environment": [1.0, 0.3333333333333333]}},
      "renormalize": false
    })";
    const RunReport report = run_scenario(parse_scenario(text));
    REQUIRE(report.fqmc.has_value());
    const double prenorm = report.fqmc->pre_normalization_norm;
    CHECK(prenorm < 1.0);
    CHECK(std::abs(report.chain_state.norm() - prenorm) <= kTol);
    // Probabilities and the reduced density are still taken from the
    // normalized state.
    CHECK(std::abs(report.branch_probabilities.sum() - 1.0) <= 1e-9);
    CHECK(std::abs(report.density(0, 0).real() - 0.9) <= kTol);
}

TEST_CASE("interaction fixture orders apparatus before environment") {
    const Scenario s = load_scenario(scenario_path("interaction_chain.json"));
    const RunReport report = run_scenario(s);
    REQUIRE(report.correlation_order.size() == 3);
    CHECK(report.correlation_order[0] == "system_apparatus");
    CHECK(report.correlation_order[1] == "system_environment");
    CHECK(report.correlation_order[2] == "apparatus_environment");
    REQUIRE(report.fqmc.has_value());
    CHECK(report.fqmc->per_branch(0) == 0.5);
}

TEST_CASE("positions fixture weights the environment by distance") {
    const Scenario s = load_scenario(scenario_path("positions_chain.json"));
    const RunReport report = run_scenario(s);
    CHECK(report.correlation_order ==
          std::vector<std::string>{"x1", "x2", "x3"});
    REQUIRE(report.fqmc.has_value());
    // Branch products pick up the per-particle environment weights 1 and 1/2.
    CHECK(report.fqmc->per_branch(0) == 1.0);
    CHECK(report.fqmc->per_branch(1) == 0.5);
}

TEST_CASE("certain outcomes sample deterministically") {
    Eigen::VectorXd p(2);
    p << 1.0, 0.0;
    const auto counts = sample_outcomes(p, 100, 1234);
    CHECK(counts[0] == 100);
    CHECK(counts[1] == 0);
}

TEST_CASE("fair coin sampling stays within the 4-sigma binomial bound") {
    Eigen::VectorXd p(2);
    p << 0.5, 0.5;
    const std::int64_t shots = 100000;
    const auto counts = sample_outcomes(p, shots, 20240901);
    CHECK(counts[0] + counts[1] == shots);
    const double bound = 4.0 * std::sqrt(0.25 * static_cast<double>(shots));
    CHECK(std::abs(static_cast<double>(counts[0]) - 50000.0) <= bound);
    // Same seed, same counts.
    CHECK(sample_outcomes(p, shots, 20240901) == counts);
    CHECK(sample_outcomes(p, shots, 20240902) != counts);
}

TEST_CASE("zero shots yield a zero vector") {
    Eigen::VectorXd p(3);
    p << 0.2, 0.3, 0.5;
    const auto counts = sample_outcomes(p, 0, 9);
    CHECK(counts == std::vector<std::int64_t>{0, 0, 0});
    Eigen::VectorXd bad(2);
    bad << 0.7, 0.7;
    CHECK_THROWS_AS(sample_outcomes(bad, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_outcomes(p, -1, 1), std::invalid_argument);
}

TEST_CASE("json report carries the branch probabilities") {
    const RunReport report = run_scenario(parse_scenario(kMinimalScenario));
    const std::string text = emit_report(report, ReportFormat::json);
    const auto j = nlohmann::json::parse(text);
    CHECK(j.at("branch_probabilities").size() == 2);
    CHECK(j.at("scenario") == "minimal");
    CHECK(j.contains("chain_state"));
    CHECK_FALSE(j.contains("decoherence"));
}

TEST_CASE("csv density section has dim^2 rows plus a header") {
    const RunReport report = run_scenario(parse_scenario(kMinimalScenario));
    const std::string text = emit_report(report, ReportFormat::csv);
    // 4x4 density -> 16 data rows + 1 column-header row.
    CHECK(count_section_rows(text, "density") == 17);
    CHECK(count_section_rows(text, "chain_state") == 5);
}

TEST_CASE("emit-parse-emit is a fixpoint") {
    // Full report with every optional section present.
    const Scenario s = load_scenario(scenario_path("stern_gerlach_45.json"));
    const RunReport report = run_scenario(s);
    const std::string first = emit_report(report, ReportFormat::json);
    const RunReport reparsed = parse_report(first);
    const std::string second = emit_report(reparsed, ReportFormat::json);
    CHECK(first == second);
    // Minimal report with every optional section absent.
    const std::string bare = emit_report(run_scenario(parse_scenario(kMinimalScenario)),
                                         ReportFormat::json);
    CHECK(emit_report(parse_report(bare), ReportFormat::json) == bare);
}

TEST_CASE("complex scenario coefficients keep their imaginary parts") {
    const std::string text = R"({
      "name": "phased",
      "system_coeffs": [{"re": 0.6}, {"re": 0.0, "im": 0.8}],
      "apparatus_dim": 2
    })";
    const Scenario s = parse_scenario(text);
    CHECK(s.system_coeffs(1) == Complex(0.0, 0.8));
    const RunReport report = run_scenario(s);
    CHECK(report.chain_state(3) == Complex(0.0, 0.8));
    CHECK(report.branch_probabilities(1) == doctest::Approx(0.64).epsilon(1e-14));
    const auto j = nlohmann::json::parse(emit_report(report, ReportFormat::json));
    CHECK(j.at("chain_state").at(3).at("im").get<double>() == 0.8);
}

TEST_CASE("identical scenario and seed give byte-identical reports") {
    const Scenario s = load_scenario(scenario_path("stern_gerlach_45.json"));
    const std::string a = emit_report(run_scenario(s), ReportFormat::json);
    const std::string b = emit_report(run_scenario(s), ReportFormat::json);
    CHECK(a == b);
}

TEST_CASE("all-ones explicit weights match the fuzzy-free run") {
    const std::string base = R"({
      "name": "equiv",
      "system_coeffs": [{"re": 0.6}, {"re": 0.8}],
      "apparatus_dim": 2,
      "environment": {
        "states": [
          [{"re": 1.0}, {"re": 0.0}],
          [{"re": 0.0}, {"re": 1.0}]
        ]
      },
      "sampling": {"shots": 5000, "seed": 11}
    })";
    std::string with_fuzzy = base;
    const std::string needle = "\"sampling\"";
    with_fuzzy.insert(with_fuzzy.find(needle),
                      "\"fuzzy\": {\"mode\": \"explicit\", \"weights\": {"
                      "\"system\": [1.0, 1.0], \"apparatus\": [1.0, 1.0], "
                      "\"environment\": [1.0, 1.0]}},\n      ");

    const RunReport plain = run_scenario(parse_scenario(base));
    const RunReport fuzzy = run_scenario(parse_scenario(with_fuzzy));

    CHECK((plain.chain_state - fuzzy.chain_state).cwiseAbs().maxCoeff() <= kTol);
    CHECK((plain.density - fuzzy.density).cwiseAbs().maxCoeff() <= kTol);
    CHECK((plain.branch_probabilities - fuzzy.branch_probabilities).cwiseAbs().maxCoeff() <= kTol);
    CHECK(*plain.outcome_counts == *fuzzy.outcome_counts);
    REQUIRE(fuzzy.fqmc.has_value());
    CHECK(fuzzy.fqmc->per_branch == Eigen::VectorXd::Ones(2));
}

TEST_CASE("cli run writes byte-identical reports across invocations") {
    const auto dir = std::filesystem::temp_directory_path() / "fqmsim_cli_test";
    std::filesystem::create_directories(dir);
    const auto out1 = dir / "run1.json";
    const auto out2 = dir / "run2.json";

    CHECK(run_cli("run " + scenario_path("stern_gerlach_45.json") + " --out " + out1.string()) ==
          0);
    CHECK(run_cli("run " + scenario_path("stern_gerlach_45.json") + " --out " + out2.string()) ==
          0);
    CHECK(read_file(out1) == read_file(out2));
}

TEST_CASE("cli exit codes distinguish validation from runtime errors") {
    const auto dir = std::filesystem::temp_directory_path() / "fqmsim_cli_test";
    std::filesystem::create_directories(dir);
    const auto bad = dir / "bad_scenario.json";
    std::ofstream(bad) << R"({"system_coeffs": [{"re": 0.4}], "apparatus_dim": 1})";

    CHECK(run_cli("run " + bad.string() + " > /dev/null 2>&1") == 1);
    CHECK(run_cli("run " + (dir / "does_not_exist.json").string() + " > /dev/null 2>&1") == 2);
    CHECK(run_cli("sg --theta 45 > /dev/null") == 0);
}

TEST_CASE("cli batch run, sampling overrides and format env var") {
    const auto dir = std::filesystem::temp_directory_path() / "fqmsim_cli_test";
    std::filesystem::create_directories(dir);

    CHECK(run_cli("run " + scenario_path("von_neumann.json") + " " +
                  scenario_path("zurek_orthonormal.json") + " > " + (dir / "batch.json").string()) ==
          0);
    // --out with several inputs is rejected up front.
    CHECK(run_cli("run " + scenario_path("von_neumann.json") + " " +
                  scenario_path("zurek_orthonormal.json") + " --out " +
                  (dir / "nope.json").string() + " 2> /dev/null") == 1);

    const auto overridden = dir / "override.json";
    CHECK(run_cli("run " + scenario_path("von_neumann.json") +
                  " --shots 100 --seed 42 --out " + overridden.string()) == 0);
    const auto j = nlohmann::json::parse(read_file(overridden));
    std::int64_t total = 0;
    for (const auto& c : j.at("outcome_counts")) {
        total += c.get<std::int64_t>();
    }
    CHECK(total == 100);

    const auto as_csv = dir / "env_format.csv";
    CHECK(run_cli("FQMSIM_FORMAT=csv " FQMSIM_CLI_PATH " run " +
                          scenario_path("von_neumann.json") + " --out " + as_csv.string(),
                  true) == 0);
    CHECK(read_file(as_csv).rfind("# scenario", 0) == 0);
}

TEST_CASE("cli fuzzy matrix subcommands work on files") {
    const auto dir = std::filesystem::temp_directory_path() / "fqmsim_cli_test";
    std::filesystem::create_directories(dir);
    const auto a_path = dir / "a.fmat";
    const auto b_path = dir / "b.fmat";
    std::ofstream(a_path) << "2 2\n0.2 0.7\n0.5 0.1\n";
    std::ofstream(b_path) << "2 2\n1 0\n0 1\n";

    const auto out = dir / "product.fmat";
    CHECK(run_cli("fuzzy-mul " + a_path.string() + " " + b_path.string() + " --out " +
                  out.string()) == 0);
    CHECK(read_file(out) == "2 2\n0.2 0.7\n0.5 0.1\n");

    const auto sym = dir / "sym.fmat";
    std::ofstream(sym) << "2 2\n1 0.4\n0.4 1\n";
    const auto basis_out = dir / "basis.fmat";
    CHECK(run_cli("fuzzy-basis " + sym.string() + " " + b_path.string() + " --out " +
                  basis_out.string()) == 0);
    CHECK(read_file(basis_out) == "2 2\n1 0.4\n0.4 1\n");

    // Asymmetric metric input is a validation error.
    CHECK(run_cli("fuzzy-basis " + a_path.string() + " " + b_path.string() +
                  " > /dev/null 2>&1") == 1);
}
