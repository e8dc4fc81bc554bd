#include "fqmsim/scenario.hpp"

#include "fqmsim/measurement.hpp"
#include "num_format.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fqmsim {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
    throw std::invalid_argument(field + ": " + message);
}

const json& require(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) {
        fail(path.empty() ? key : path + "." + key, "missing required field");
    }
    return obj.at(key);
}

std::string joined(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end()) {
            fail(joined(path, key), "unknown field");
        }
    }
}

double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) {
        fail(field, "expected a number");
    }
    return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& field) {
    if (!v.is_number_integer()) {
        fail(field, "expected an integer");
    }
    return v.get<std::int64_t>();
}

Complex as_complex(const json& v, const std::string& field) {
    if (!v.is_object() || !v.contains("re")) {
        fail(field, "expected a complex value {\"re\": x, \"im\": y}");
    }
    check_keys(v, field, {"re", "im"});
    const double re = as_number(v.at("re"), field + ".re");
    const double im = v.contains("im") ? as_number(v.at("im"), field + ".im") : 0.0;
    return Complex(re, im);
}

Eigen::VectorXcd as_complex_vector(const json& v, const std::string& field) {
    if (!v.is_array() || v.empty()) {
        fail(field, "expected a nonempty array of complex values");
    }
    Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) =
            as_complex(v.at(i), field + "[" + std::to_string(i) + "]");
    }
    return out;
}

Eigen::VectorXd as_weight_vector(const json& v, const std::string& field) {
    if (!v.is_array() || v.empty()) {
        fail(field, "expected a nonempty array of weights");
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string entry = field + "[" + std::to_string(i) + "]";
        const double w = as_number(v.at(i), entry);
        if (!(w >= 0.0 && w <= 1.0)) {
            fail(entry, "weight must lie in [0, 1], got " + format_double(w));
        }
        out(static_cast<Eigen::Index>(i)) = w;
    }
    return out;
}

Eigen::Vector3d as_position(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 3) {
        fail(field, "expected a 3-vector [x, y, z]");
    }
    Eigen::Vector3d out;
    for (std::size_t i = 0; i < 3; ++i) {
        out(static_cast<Eigen::Index>(i)) = as_number(v.at(i), field + "[" + std::to_string(i) + "]");
    }
    return out;
}

void check_normalized(const Eigen::VectorXcd& v, const std::string& field) {
    const double sq = v.squaredNorm();
    if (std::abs(sq - 1.0) > kTol) {
        fail(field, "squared norm is " + format_double(sq) + ", expected 1 within 1e-12");
    }
}

FuzzySpec parse_fuzzy(const json& f, const Scenario& s) {
    const std::string path = "fuzzy";
    if (!f.is_object()) {
        fail(path, "expected an object");
    }
    const json& mode_v = require(f, path, "mode");
    if (!mode_v.is_string()) {
        fail("fuzzy.mode", "expected a string");
    }
    const std::string mode = mode_v.get<std::string>();
    const Eigen::Index branches = s.system_coeffs.size();
    const Eigen::Index env_dim =
        s.environment_states ? s.environment_states->front().size() : 0;

    if (mode == "explicit") {
        check_keys(f, path, {"mode", "weights"});
        const json& w = require(f, path, "weights");
        if (!w.is_object()) {
            fail("fuzzy.weights", "expected an object");
        }
        check_keys(w, "fuzzy.weights", {"system", "apparatus", "environment"});
        FuzzyExplicit out;
        if (w.contains("system")) {
            out.system = as_weight_vector(w.at("system"), "fuzzy.weights.system");
            if (out.system->size() != branches) {
                fail("fuzzy.weights.system", "expected " + std::to_string(branches) +
                                                 " entries (one per system branch)");
            }
        }
        if (w.contains("apparatus")) {
            out.apparatus = as_weight_vector(w.at("apparatus"), "fuzzy.weights.apparatus");
            if (out.apparatus->size() != s.apparatus_dim) {
                fail("fuzzy.weights.apparatus", "expected " + std::to_string(s.apparatus_dim) +
                                                    " entries (apparatus dimension)");
            }
        }
        if (w.contains("environment")) {
            if (!s.environment_states) {
                fail("fuzzy.weights.environment", "scenario has no environment block");
            }
            out.environment = as_weight_vector(w.at("environment"), "fuzzy.weights.environment");
            if (out.environment->size() != env_dim) {
                fail("fuzzy.weights.environment", "expected " + std::to_string(env_dim) +
                                                      " entries (environment dimension)");
            }
        }
        return out;
    }

    if (mode == "stern_gerlach") {
        check_keys(f, path, {"mode", "theta_deg", "convention"});
        const double theta_deg = as_number(require(f, path, "theta_deg"), "fuzzy.theta_deg");
        if (!(theta_deg >= 0.0 && theta_deg <= 90.0)) {
            fail("fuzzy.theta_deg", "must lie in [0, 90], got " + format_double(theta_deg));
        }
        FuzzySternGerlach out;
        out.theta_radians = theta_deg * std::numbers::pi / 180.0;
        if (f.contains("convention")) {
            const json& c = f.at("convention");
            if (!c.is_string()) {
                fail("fuzzy.convention", "expected a string");
            }
            const std::string conv = c.get<std::string>();
            if (conv == "cos_squared") {
                out.convention = SgConvention::cos_squared;
            } else if (conv == "literal_cos") {
                out.convention = SgConvention::literal_cos;
            } else {
                fail("fuzzy.convention", "expected 'cos_squared' or 'literal_cos', got '" + conv +
                                             "'");
            }
        }
        return out;
    }

    if (mode == "interactions") {
        check_keys(f, path, {"mode", "pairs", "reference_pair"});
        const json& pairs_v = require(f, path, "pairs");
        if (!pairs_v.is_object() || pairs_v.empty()) {
            fail("fuzzy.pairs", "expected a nonempty object of pair strengths");
        }
        FuzzyInteractions out;
        for (const auto& [pair, strength] : pairs_v.items()) {
            const double v = as_number(strength, "fuzzy.pairs." + pair);
            if (!(v >= 0.0) || !std::isfinite(v)) {
                fail("fuzzy.pairs." + pair, "strength must be finite and >= 0");
            }
            out.pair_strengths[pair] = v;
        }
        if (out.pair_strengths.count("system_environment") > 0 && !s.environment_states) {
            fail("fuzzy.pairs.system_environment", "scenario has no environment block");
        }
        if (f.contains("reference_pair")) {
            const json& r = f.at("reference_pair");
            if (!r.is_string()) {
                fail("fuzzy.reference_pair", "expected a string");
            }
            out.reference_pair = r.get<std::string>();
        }
        try {
            InteractionProfile probe(out.pair_strengths, out.reference_pair);
        } catch (const std::invalid_argument& err) {
            fail("fuzzy.pairs", err.what());
        }
        return out;
    }

    if (mode == "positions") {
        check_keys(f, path, {"mode", "kernel", "reference_position", "particles"});
        if (!s.environment_states) {
            fail("fuzzy", "positions mode requires an environment block");
        }
        DistanceKernel::Form form = DistanceKernel::Form::reciprocal_normalized;
        double scale = 1.0;
        if (f.contains("kernel")) {
            const json& k = f.at("kernel");
            if (!k.is_object()) {
                fail("fuzzy.kernel", "expected an object");
            }
            check_keys(k, "fuzzy.kernel", {"form", "scale"});
            const json& form_v = require(k, "fuzzy.kernel", "form");
            if (!form_v.is_string()) {
                fail("fuzzy.kernel.form", "expected a string");
            }
            const std::string form_s = form_v.get<std::string>();
            if (form_s == "reciprocal_normalized") {
                form = DistanceKernel::Form::reciprocal_normalized;
            } else if (form_s == "exponential") {
                form = DistanceKernel::Form::exponential;
            } else {
                fail("fuzzy.kernel.form",
                     "expected 'reciprocal_normalized' or 'exponential', got '" + form_s + "'");
            }
            if (k.contains("scale")) {
                scale = as_number(k.at("scale"), "fuzzy.kernel.scale");
                if (!(scale > 0.0)) {
                    fail("fuzzy.kernel.scale", "must be > 0, got " + format_double(scale));
                }
            }
        }
        FuzzyPositions out;
        out.kernel = DistanceKernel(form, scale);
        out.reference_position =
            as_position(require(f, path, "reference_position"), "fuzzy.reference_position");
        const json& particles = require(f, path, "particles");
        if (!particles.is_array() || particles.empty()) {
            fail("fuzzy.particles", "expected a nonempty array");
        }
        std::set<std::string> seen;
        for (std::size_t i = 0; i < particles.size(); ++i) {
            const std::string entry = "fuzzy.particles[" + std::to_string(i) + "]";
            const json& p = particles.at(i);
            if (!p.is_object()) {
                fail(entry, "expected an object {\"name\": ..., \"position\": [x, y, z]}");
            }
            check_keys(p, entry, {"name", "position"});
            std::string name = "x" + std::to_string(i + 1);
            if (p.contains("name")) {
                if (!p.at("name").is_string()) {
                    fail(entry + ".name", "expected a string");
                }
                name = p.at("name").get<std::string>();
            }
            if (!seen.insert(name).second) {
                fail(entry + ".name", "duplicate particle name '" + name + "'");
            }
            out.names.push_back(std::move(name));
            out.positions.push_back(as_position(require(p, entry, "position"), entry + ".position"));
            const double distance = (out.positions.back() - out.reference_position).norm();
            if (form == DistanceKernel::Form::reciprocal_normalized && !(distance > 0.0)) {
                fail(entry + ".position",
                     "coincides with the reference position (reciprocal kernel is singular)");
            }
        }
        if (static_cast<Eigen::Index>(out.positions.size()) != env_dim) {
            fail("fuzzy.particles", "expected " + std::to_string(env_dim) +
                                        " particles (environment dimension), got " +
                                        std::to_string(out.positions.size()));
        }
        return out;
    }

    fail("fuzzy.mode", "expected one of 'interactions', 'positions', 'explicit', "
                       "'stern_gerlach', got '" + mode + "'");
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw std::invalid_argument(std::string("scenario syntax error: ") + err.what());
    }
    if (!doc.is_object()) {
        fail("scenario", "top-level value must be an object");
    }
    check_keys(doc, "", {"name", "system_coeffs", "apparatus_dim", "apparatus_ready_index",
                         "environment", "fuzzy", "sampling", "renormalize"});

    Scenario s;
    if (doc.contains("name")) {
        if (!doc.at("name").is_string()) {
            fail("name", "expected a string");
        }
        s.name = doc.at("name").get<std::string>();
    }

    s.system_coeffs = as_complex_vector(require(doc, "", "system_coeffs"), "system_coeffs");
    check_normalized(s.system_coeffs, "system_coeffs");

    const std::int64_t apparatus_dim =
        as_integer(require(doc, "", "apparatus_dim"), "apparatus_dim");
    if (apparatus_dim < 1) {
        fail("apparatus_dim", "must be >= 1");
    }
    s.apparatus_dim = static_cast<Eigen::Index>(apparatus_dim);
    if (s.system_coeffs.size() > s.apparatus_dim) {
        fail("apparatus_dim", std::to_string(s.system_coeffs.size()) +
                                  " system branches need at least that many pointer states, got " +
                                  std::to_string(apparatus_dim));
    }

    if (doc.contains("apparatus_ready_index")) {
        const std::int64_t ready =
            as_integer(doc.at("apparatus_ready_index"), "apparatus_ready_index");
        if (ready < 0 || ready >= apparatus_dim) {
            fail("apparatus_ready_index", "must lie in [0, " + std::to_string(apparatus_dim) + ")");
        }
        s.apparatus_ready_index = static_cast<Eigen::Index>(ready);
    }

    if (doc.contains("environment")) {
        const json& env = doc.at("environment");
        if (!env.is_object()) {
            fail("environment", "expected an object");
        }
        check_keys(env, "environment", {"states"});
        const json& states = require(env, "environment", "states");
        if (!states.is_array() || states.empty()) {
            fail("environment.states", "expected a nonempty array of state vectors");
        }
        if (static_cast<Eigen::Index>(states.size()) != s.system_coeffs.size()) {
            fail("environment.states", "expected " + std::to_string(s.system_coeffs.size()) +
                                           " states (one per system branch), got " +
                                           std::to_string(states.size()));
        }
        std::vector<Eigen::VectorXcd> parsed;
        for (std::size_t k = 0; k < states.size(); ++k) {
            const std::string entry = "environment.states[" + std::to_string(k) + "]";
            parsed.push_back(as_complex_vector(states.at(k), entry));
            if (k > 0 && parsed[k].size() != parsed[0].size()) {
                fail(entry, "dimension " + std::to_string(parsed[k].size()) +
                                " differs from the first state's " +
                                std::to_string(parsed[0].size()));
            }
            check_normalized(parsed[k], entry);
        }
        s.environment_states = std::move(parsed);
    }

    if (doc.contains("sampling")) {
        const json& sampling = doc.at("sampling");
        if (!sampling.is_object()) {
            fail("sampling", "expected an object");
        }
        check_keys(sampling, "sampling", {"shots", "seed"});
        SamplingSpec spec;
        spec.shots = as_integer(require(sampling, "sampling", "shots"), "sampling.shots");
        if (spec.shots < 0) {
            fail("sampling.shots", "must be >= 0");
        }
        const json& seed = require(sampling, "sampling", "seed");
        if (!seed.is_number_unsigned() && !(seed.is_number_integer() &&
                                            seed.get<std::int64_t>() >= 0)) {
            fail("sampling.seed", "expected an unsigned 64-bit integer");
        }
        spec.seed = seed.get<std::uint64_t>();
        s.sampling = spec;
    }

    if (doc.contains("renormalize")) {
        if (!doc.at("renormalize").is_boolean()) {
            fail("renormalize", "expected a boolean");
        }
        s.renormalize = doc.at("renormalize").get<bool>();
    }

    if (doc.contains("fuzzy")) {
        s.fuzzy = parse_fuzzy(doc.at("fuzzy"), s);
        if (s.environment_states &&
            s.environment_states->front().size() < s.system_coeffs.size()) {
            fail("environment.states", "environment dimension " +
                                           std::to_string(s.environment_states->front().size()) +
                                           " is smaller than the branch count " +
                                           std::to_string(s.system_coeffs.size()) +
                                           "; FQMC branch products would be undefined");
        }
    }

    // Full setup validation, so every scenario that parses also runs.
    std::optional<std::vector<Ket>> env_kets;
    if (s.environment_states) {
        env_kets.emplace();
        for (const auto& e : *s.environment_states) {
            env_kets->emplace_back(e);
        }
    }
    MeasurementSetup probe(s.system_coeffs, s.apparatus_dim, s.apparatus_ready_index,
                           std::move(env_kets));
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open scenario file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_scenario(buffer.str());
    } catch (const std::invalid_argument& err) {
        throw std::invalid_argument(path + ": " + err.what());
    }
}

}  // namespace fqmsim
