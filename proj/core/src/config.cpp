#include "meanper/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace meanper {

namespace {

using nlohmann::json;

cplx parse_complex(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("re") || !j.contains("im")) {
        throw ConfigError(where + ": complex numbers are {\"re\": ..., \"im\": ...}");
    }
    if (!j["re"].is_number() || !j["im"].is_number()) {
        throw ConfigError(where + ": re/im must be numbers");
    }
    return {j["re"].get<double>(), j["im"].get<double>()};
}

std::vector<cplx> parse_complex_list(const json& j, const std::string& where) {
    if (!j.is_array()) {
        throw ConfigError(where + ": expected an array");
    }
    std::vector<cplx> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(parse_complex(j[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

EntireFunctionSpec parse_function(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError(where + ": function specs need a \"kind\"");
    }
    const std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "expsum") {
            std::vector<ExpSumSpec::Term> terms;
            for (std::size_t i = 0; i < j.at("terms").size(); ++i) {
                const auto& t = j["terms"][i];
                if (!t.is_array() || t.size() != 2) {
                    throw ConfigError(where + ".terms[" + std::to_string(i) +
                                      "]: expected [weight, frequency]");
                }
                terms.push_back({parse_complex(t[0], where + ".terms.weight"),
                                 parse_complex(t[1], where + ".terms.frequency")});
            }
            return EntireFunctionSpec::exp_sum(std::move(terms));
        }
        if (kind == "polyexpsum") {
            std::vector<PolyExpSumSpec::Term> terms;
            for (std::size_t i = 0; i < j.at("terms").size(); ++i) {
                const auto& t = j["terms"][i];
                terms.push_back({parse_complex_list(t.at("poly"), where + ".terms.poly"),
                                 parse_complex(t.at("lambda"), where + ".terms.lambda")});
            }
            return EntireFunctionSpec::poly_exp_sum(std::move(terms));
        }
        if (kind == "polynomial") {
            return EntireFunctionSpec::polynomial(parse_complex_list(j.at("coeffs"), where + ".coeffs"));
        }
        if (kind == "segment_average") {
            return EntireFunctionSpec::segment_average(j.at("t").get<double>());
        }
    } catch (const json::exception& e) {
        throw ConfigError(where + ": " + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ": unknown function kind \"" + kind + "\"");
}

YoungSpec parse_theta(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError(where + ": expected {\"kind\": ...}");
    }
    const std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "linear") {
            return YoungSpec::linear();
        }
        if (kind == "power") {
            return YoungSpec::power(j.at("p").get<double>());
        }
        if (kind == "table") {
            std::vector<std::pair<double, double>> pts;
            for (const auto& row : j.at("points")) {
                if (!row.is_array() || row.size() != 2) {
                    throw ConfigError(where + ".points: rows are [r, y]");
                }
                pts.emplace_back(row[0].get<double>(), row[1].get<double>());
            }
            return YoungSpec::tabulated(std::move(pts));
        }
    } catch (const json::exception& e) {
        throw ConfigError(where + ": " + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ": unknown theta kind \"" + kind + "\"");
}

GridSpec parse_grid(const json& j, const std::string& where) {
    GridSpec g;
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError(where + ": expected {\"kind\": ...}");
    }
    const std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "real_interval") {
            g.kind = GridSpec::Kind::RealInterval;
            g.min = j.at("min").get<double>();
            g.max = j.at("max").get<double>();
            g.count = j.at("count").get<std::size_t>();
        } else if (kind == "circle") {
            g.kind = GridSpec::Kind::Circle;
            g.radius = j.at("radius").get<double>();
            g.count = j.at("count").get<std::size_t>();
        } else if (kind == "points") {
            g.kind = GridSpec::Kind::Points;
            g.points = parse_complex_list(j.at("points"), where + ".points");
            g.count = g.points.size();
        } else {
            throw ConfigError(where + ": unknown grid kind \"" + kind + "\"");
        }
    } catch (const json::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
    if (g.count == 0) {
        throw ConfigError(where + ": grid must have at least one point");
    }
    return g;
}

} // namespace

std::vector<cplx> GridSpec::materialize() const {
    std::vector<cplx> out;
    switch (kind) {
    case Kind::RealInterval: {
        if (count == 1) {
            out.push_back(cplx{0.5 * (min + max), 0.0});
            break;
        }
        for (std::size_t i = 0; i < count; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(count - 1);
            out.push_back(cplx{min + t * (max - min), 0.0});
        }
        break;
    }
    case Kind::Circle: {
        for (std::size_t i = 0; i < count; ++i) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
            out.push_back(radius * cplx{std::cos(a), std::sin(a)});
        }
        break;
    }
    case Kind::Points:
        out = points;
        break;
    }
    return out;
}

double ExperimentConfig::tolerance(const std::string& name, double fallback) const {
    const auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
}

std::string ExperimentConfig::output_name(const std::string& logical, const std::string& fallback) const {
    const auto it = outputs.find(logical);
    return it == outputs.end() ? fallback : it->second;
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string{"config: "} + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config: top level must be an object");
    }
    ExperimentConfig cfg;
    if (!j.contains("phi")) {
        throw ConfigError("config: missing \"phi\"");
    }
    cfg.phi = parse_function(j["phi"], "phi");
    if (j.contains("f")) {
        cfg.f = parse_function(j["f"], "f");
    }
    if (j.contains("theta")) {
        cfg.theta = parse_theta(j["theta"], "theta");
    }
    try {
        if (j.contains("radius")) {
            cfg.radius = j["radius"].get<double>();
        }
        if (!(cfg.radius > 0.0)) {
            throw ConfigError("config: radius must be positive");
        }
        if (j.contains("zero_tol")) {
            cfg.zero_tol = j["zero_tol"].get<double>();
        }
        if (j.contains("K")) {
            cfg.K = j["K"].get<std::size_t>();
        }
        if (j.contains("grid")) {
            cfg.grid = parse_grid(j["grid"], "grid");
        }
        if (j.contains("m_grid")) {
            cfg.m_grid = j["m_grid"].get<std::vector<double>>();
        }
        if (j.contains("norm_p")) {
            cfg.norm_p = j["norm_p"].get<std::vector<double>>();
        }
        if (j.contains("tolerances")) {
            for (const auto& [key, value] : j["tolerances"].items()) {
                if (!value.is_number()) {
                    throw ConfigError("config.tolerances." + key + ": must be a number");
                }
                cfg.tolerances[key] = value.get<double>();
            }
        }
        if (j.contains("flavor")) {
            const std::string fl = j["flavor"].get<std::string>();
            if (fl == "auto") {
                cfg.flavor = ExperimentConfig::Flavor::Auto;
            } else if (fl == "general") {
                cfg.flavor = ExperimentConfig::Flavor::General;
            } else if (fl == "interpolating") {
                cfg.flavor = ExperimentConfig::Flavor::Interpolating;
            } else {
                throw ConfigError("config.flavor: one of auto|general|interpolating");
            }
        }
        if (j.contains("outputs")) {
            for (const auto& [key, value] : j["outputs"].items()) {
                cfg.outputs[key] = value.get<std::string>();
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string{"config: "} + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw ConfigError("config: cannot open " + file.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string format_complex_json(cplx z) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "{\"re\":%.17g,\"im\":%.17g}", z.real(), z.imag());
    return buf;
}

} // namespace meanper
