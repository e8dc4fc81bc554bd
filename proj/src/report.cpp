#include "fqmsim/report.hpp"

#include "fqmsim/sampling.hpp"
#include "num_format.hpp"

#include <json.hpp>

#include <sstream>
#include <stdexcept>
#include <utility>

namespace fqmsim {

namespace {

using ojson = nlohmann::ordered_json;

struct ResolvedFuzzy {
    std::vector<Eigen::VectorXd> factor_weights;
    std::vector<std::string> correlation_order;
};

ResolvedFuzzy resolve_fuzzy(const FuzzySpec& spec, const CompositeKet& chain) {
    const auto& dims = chain.factor_dims();
    ResolvedFuzzy out;
    out.factor_weights.reserve(dims.size());
    for (Eigen::Index d : dims) {
        out.factor_weights.push_back(Eigen::VectorXd::Ones(d));
    }
    const bool has_env = dims.size() == 3;

    if (const auto* ex = std::get_if<FuzzyExplicit>(&spec)) {
        if (ex->system) {
            out.factor_weights[0] = *ex->system;
        }
        if (ex->apparatus) {
            out.factor_weights[1] = *ex->apparatus;
        }
        if (ex->environment) {
            out.factor_weights[2] = *ex->environment;
        }
    } else if (const auto* sg = std::get_if<FuzzySternGerlach>(&spec)) {
        const double w = sg_apparatus_weight(sg->theta_radians, sg->convention);
        out.factor_weights[1] = Eigen::VectorXd::Constant(dims[1], w);
    } else if (const auto* in = std::get_if<FuzzyInteractions>(&spec)) {
        const MembershipWeights weights = memberships_from_interactions(
            InteractionProfile(in->pair_strengths, in->reference_pair));
        auto uniform_from_pair = [&](const char* pair, std::size_t factor) {
            auto it = weights.weights().find(pair);
            if (it != weights.weights().end()) {
                out.factor_weights[factor] =
                    Eigen::VectorXd::Constant(dims[factor], it->second);
            }
        };
        uniform_from_pair("system_apparatus", 1);
        if (has_env) {
            uniform_from_pair("system_environment", 2);
        }
        out.correlation_order = correlation_ordering(weights);
    } else if (const auto* pos = std::get_if<FuzzyPositions>(&spec)) {
        const MembershipWeights weights = memberships_from_positions(
            pos->positions, pos->reference_position, pos->kernel, pos->names);
        Eigen::VectorXd env(static_cast<Eigen::Index>(pos->names.size()));
        for (std::size_t i = 0; i < pos->names.size(); ++i) {
            env(static_cast<Eigen::Index>(i)) = weights.at(pos->names[i]);
        }
        out.factor_weights[2] = std::move(env);
        out.correlation_order = correlation_ordering(weights);
    }
    return out;
}

}  // namespace

RunReport run_scenario(const Scenario& scenario) {
    std::optional<std::vector<Ket>> env_kets;
    if (scenario.environment_states) {
        env_kets.emplace();
        for (const auto& e : *scenario.environment_states) {
            env_kets->emplace_back(e);
        }
    }
    const MeasurementSetup setup(scenario.system_coeffs, scenario.apparatus_dim,
                                 scenario.apparatus_ready_index, std::move(env_kets));
    const CompositeKet chain =
        setup.has_environment() ? zurek_chain(setup) : von_neumann_premeasure(setup);
    const Eigen::Index branches = setup.branch_count();

    RunReport report;
    report.scenario_name = scenario.name;
    report.factor_dims = chain.factor_dims();

    Eigen::VectorXd fqmc = Eigen::VectorXd::Ones(branches);
    CompositeKet state = chain;
    if (scenario.fuzzy) {
        const ResolvedFuzzy resolved = resolve_fuzzy(*scenario.fuzzy, chain);
        FqmcResult result = apply_fqmc(chain, resolved.factor_weights, scenario.renormalize);
        fqmc = result.fqmc_per_branch.head(branches);
        state = std::move(result.state);
        report.fqmc = FqmcTable{fqmc, result.pre_normalization_norm};
        report.correlation_order = resolved.correlation_order;
    }
    report.chain_state = state.amplitudes();

    if (state.norm() == 0.0) {
        throw std::runtime_error("run_scenario: weighted state is null, no outcome distribution");
    }
    const CompositeKet analysis = state.is_normalized() ? state : state.normalized();
    const DensityMatrix full = density_from_ket(analysis);
    report.density_dims = {branches, setup.apparatus_dim()};
    if (setup.has_environment()) {
        report.density = partial_trace(full, analysis.factor_dims(), 2).entries();
        report.decoherence = decoherence_report(setup);
    } else {
        report.density = full.entries();
    }

    Eigen::VectorXd p(branches);
    double total = 0.0;
    for (Eigen::Index k = 0; k < branches; ++k) {
        p(k) = std::norm(fqmc(k) * scenario.system_coeffs(k));
        total += p(k);
    }
    if (total == 0.0) {
        throw std::runtime_error("run_scenario: all branch weights vanish");
    }
    report.branch_probabilities = p / total;

    if (scenario.sampling) {
        report.outcome_counts = sample_outcomes(report.branch_probabilities,
                                                scenario.sampling->shots, scenario.sampling->seed);
    }
    return report;
}

namespace {

ojson complex_json(const Complex& c) {
    return ojson{{"re", c.real()}, {"im", c.imag()}};
}

Complex complex_from(const ojson& j) {
    return Complex(j.at("re").get<double>(), j.at("im").get<double>());
}

ojson matrix_json(const Eigen::MatrixXcd& m) {
    ojson rows = ojson::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ojson row = ojson::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(complex_json(m(i, j)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXcd matrix_from(const ojson& rows) {
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = r > 0 ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
    Eigen::MatrixXcd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = complex_from(rows.at(i).at(j));
        }
    }
    return m;
}

std::string emit_json(const RunReport& r) {
    ojson j;
    j["scenario"] = r.scenario_name;
    j["factor_dims"] = std::vector<std::int64_t>(r.factor_dims.begin(), r.factor_dims.end());
    ojson state = ojson::array();
    for (Eigen::Index i = 0; i < r.chain_state.size(); ++i) {
        state.push_back(complex_json(r.chain_state(i)));
    }
    j["chain_state"] = std::move(state);
    j["density_dims"] = std::vector<std::int64_t>(r.density_dims.begin(), r.density_dims.end());
    j["density"] = matrix_json(r.density);
    if (r.decoherence) {
        j["decoherence"] = ojson{{"overlap_matrix", matrix_json(r.decoherence->overlap_matrix)},
                                 {"offdiag_suppression", r.decoherence->offdiag_suppression},
                                 {"is_ideal", r.decoherence->is_ideal}};
    }
    if (r.fqmc) {
        std::vector<double> per_branch(r.fqmc->per_branch.begin(), r.fqmc->per_branch.end());
        j["fqmc_table"] = ojson{{"per_branch", per_branch},
                                {"pre_normalization_norm", r.fqmc->pre_normalization_norm}};
    }
    j["branch_probabilities"] =
        std::vector<double>(r.branch_probabilities.begin(), r.branch_probabilities.end());
    if (r.outcome_counts) {
        j["outcome_counts"] = *r.outcome_counts;
    }
    j["correlation_order"] = r.correlation_order;
    return j.dump(2) + "\n";
}

std::string emit_csv(const RunReport& r) {
    std::ostringstream out;
    out << "# scenario\n" << r.scenario_name << '\n';

    out << "# factor_dims\n";
    for (std::size_t i = 0; i < r.factor_dims.size(); ++i) {
        out << (i > 0 ? "," : "") << r.factor_dims[i];
    }
    out << '\n';

    out << "# chain_state\nindex,re,im\n";
    for (Eigen::Index i = 0; i < r.chain_state.size(); ++i) {
        out << i << ',' << format_double(r.chain_state(i).real()) << ','
            << format_double(r.chain_state(i).imag()) << '\n';
    }

    out << "# density_dims\n";
    for (std::size_t i = 0; i < r.density_dims.size(); ++i) {
        out << (i > 0 ? "," : "") << r.density_dims[i];
    }
    out << '\n';

    out << "# density\nrow,col,re,im\n";
    for (Eigen::Index i = 0; i < r.density.rows(); ++i) {
        for (Eigen::Index j = 0; j < r.density.cols(); ++j) {
            out << i << ',' << j << ',' << format_double(r.density(i, j).real()) << ','
                << format_double(r.density(i, j).imag()) << '\n';
        }
    }

    if (r.decoherence) {
        out << "# decoherence_overlap\nrow,col,re,im\n";
        const auto& m = r.decoherence->overlap_matrix;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                out << i << ',' << j << ',' << format_double(m(i, j).real()) << ','
                    << format_double(m(i, j).imag()) << '\n';
            }
        }
        out << "# decoherence_summary\noffdiag_suppression,is_ideal\n"
            << format_double(r.decoherence->offdiag_suppression) << ','
            << (r.decoherence->is_ideal ? 1 : 0) << '\n';
    }

    if (r.fqmc) {
        out << "# fqmc_table\nbranch,coefficient\n";
        for (Eigen::Index k = 0; k < r.fqmc->per_branch.size(); ++k) {
            out << k << ',' << format_double(r.fqmc->per_branch(k)) << '\n';
        }
        out << "# fqmc_prenorm\n" << format_double(r.fqmc->pre_normalization_norm) << '\n';
    }

    out << "# branch_probabilities\nbranch,probability\n";
    for (Eigen::Index k = 0; k < r.branch_probabilities.size(); ++k) {
        out << k << ',' << format_double(r.branch_probabilities(k)) << '\n';
    }

    if (r.outcome_counts) {
        out << "# outcome_counts\nbranch,count\n";
        for (std::size_t k = 0; k < r.outcome_counts->size(); ++k) {
            out << k << ',' << (*r.outcome_counts)[k] << '\n';
        }
    }

    out << "# correlation_order\nrank,pair\n";
    for (std::size_t i = 0; i < r.correlation_order.size(); ++i) {
        out << i << ',' << r.correlation_order[i] << '\n';
    }
    return out.str();
}

}  // namespace

std::string emit_report(const RunReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::json:
            return emit_json(report);
        case ReportFormat::csv:
            return emit_csv(report);
    }
    throw std::invalid_argument("emit_report: unknown format");
}

RunReport parse_report(const std::string& json_text) {
    ojson j;
    try {
        j = ojson::parse(json_text);
    } catch (const ojson::parse_error& err) {
        throw std::invalid_argument(std::string("report syntax error: ") + err.what());
    }
    RunReport r;
    r.scenario_name = j.at("scenario").get<std::string>();
    for (const auto& d : j.at("factor_dims")) {
        r.factor_dims.push_back(d.get<Eigen::Index>());
    }
    const auto& state = j.at("chain_state");
    r.chain_state.resize(static_cast<Eigen::Index>(state.size()));
    for (std::size_t i = 0; i < state.size(); ++i) {
        r.chain_state(static_cast<Eigen::Index>(i)) = complex_from(state.at(i));
    }
    for (const auto& d : j.at("density_dims")) {
        r.density_dims.push_back(d.get<Eigen::Index>());
    }
    r.density = matrix_from(j.at("density"));
    if (j.contains("decoherence")) {
        DecoherenceReport d;
        d.overlap_matrix = matrix_from(j.at("decoherence").at("overlap_matrix"));
        d.offdiag_suppression = j.at("decoherence").at("offdiag_suppression").get<double>();
        d.is_ideal = j.at("decoherence").at("is_ideal").get<bool>();
        r.decoherence = std::move(d);
    }
    if (j.contains("fqmc_table")) {
        FqmcTable t;
        const auto& per_branch = j.at("fqmc_table").at("per_branch");
        t.per_branch.resize(static_cast<Eigen::Index>(per_branch.size()));
        for (std::size_t i = 0; i < per_branch.size(); ++i) {
            t.per_branch(static_cast<Eigen::Index>(i)) = per_branch.at(i).get<double>();
        }
        t.pre_normalization_norm = j.at("fqmc_table").at("pre_normalization_norm").get<double>();
        r.fqmc = std::move(t);
    }
    const auto& probs = j.at("branch_probabilities");
    r.branch_probabilities.resize(static_cast<Eigen::Index>(probs.size()));
    for (std::size_t i = 0; i < probs.size(); ++i) {
        r.branch_probabilities(static_cast<Eigen::Index>(i)) = probs.at(i).get<double>();
    }
    if (j.contains("outcome_counts")) {
        r.outcome_counts = j.at("outcome_counts").get<std::vector<std::int64_t>>();
    }
    r.correlation_order = j.at("correlation_order").get<std::vector<std::string>>();
    return r;
}

}  // namespace fqmsim
