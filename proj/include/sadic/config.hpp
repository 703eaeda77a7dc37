#pragma once

// Versioned JSON run configuration. Unknown keys are rejected so a typo can
// never silently change what a report claims.

#include "sadic/rates.hpp"

#include "json.hpp"

#include <fstream>

namespace sadic {

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::vector<std::string>& known,
                           const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

inline Rational parse_rational(const nlohmann::json& j, const std::string& where) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        auto slash = s.find('/');
        try {
            if (slash != std::string::npos)
                return Rational(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
            auto e = s.find_first_of("eE");
            if (e != std::string::npos) {
                // decimal scientific form like "1e-6" or "2.5e-3"
                long expo = std::stol(s.substr(e + 1));
                std::string mant = s.substr(0, e);
                auto dot = mant.find('.');
                long frac = 0;
                if (dot != std::string::npos) {
                    frac = static_cast<long>(mant.size() - dot - 1);
                    mant.erase(dot, 1);
                }
                Rational r{Int(mant)};
                long net = expo - frac;
                if (net >= 0) return r * Rational(int_pow(10, net));
                return r / Rational(int_pow(10, -net));
            }
            auto dot = s.find('.');
            if (dot != std::string::npos) {
                std::string digits = s;
                digits.erase(dot, 1);
                return Rational(Int(digits), int_pow(10, s.size() - dot - 1));
            }
            return Rational(Int(s));
        } catch (const std::exception&) {
            throw ConfigError("bad rational '" + s + "' in " + where);
        }
    }
    throw ConfigError("expected rational (integer or string) in " + where);
}

}  // namespace detail

struct SystemSpec {
    std::string kind;  // constant | glued | desk-variant | paper-final
    std::shared_ptr<DirectiveSequence> sequence;
    std::vector<Morphism> bases;  // component substitutions (constant: one entry)
};

inline SystemSpec build_system(const nlohmann::json& j) {
    detail::reject_unknown(j, {"kind", "substitutions", "exponent_coefficients", "L", "d",
                               "zeta_length_plus_one"},
                           "system");
    SystemSpec spec;
    if (!j.contains("kind")) throw ConfigError("system.kind is required");
    spec.kind = j.at("kind").get<std::string>();
    bool plus_one = j.value("zeta_length_plus_one", false);
    auto parse_subs = [&]() {
        std::vector<Morphism> out;
        if (!j.contains("substitutions"))
            throw ConfigError("system.substitutions is required for kind " + spec.kind);
        for (const auto& txt : j.at("substitutions")) {
            auto A = ab();
            out.push_back(Morphism::parse(txt.get<std::string>(), A, A));
        }
        return out;
    };
    try {
        if (spec.kind == "constant") {
            auto subs = parse_subs();
            if (subs.size() != 1) throw ConfigError("constant system needs one substitution");
            spec.bases = subs;
            spec.sequence = constant_sequence(subs[0]);
        } else if (spec.kind == "glued") {
            auto subs = parse_subs();
            PowerSchedule sched;
            if (j.contains("exponent_coefficients"))
                for (const auto& c : j.at("exponent_coefficients"))
                    sched.coef.push_back(c.get<unsigned long>());
            else
                sched.coef.assign(subs.size(), 1);
            spec.bases = subs;
            spec.sequence = glued_powers(subs, sched);
        } else if (spec.kind == "desk-variant") {
            int L = j.value("L", 6);
            auto seq = desk_variant_sequence(L, plus_one);
            for (int i = 0; i < seq->components(); ++i) spec.bases.push_back(seq->component(i));
            spec.sequence = seq;
        } else if (spec.kind == "paper-final") {
            int L = j.value("L", 6);
            int d = j.value("d", 2);
            auto seq = paper_final_sequence(L, d, plus_one);
            for (int i = 0; i < seq->components(); ++i) spec.bases.push_back(seq->component(i));
            spec.sequence = seq;
        } else {
            throw ConfigError("unknown system kind '" + spec.kind + "'");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid system: ") + e.what());
    }
    return spec;
}

struct RunConfig {
    SystemSpec system;
    int k = 6;
    long depth_cap = 24;
    Rational tolerance = Rational(1, 1000000);
    std::vector<long> levels = {1, 2, 3, 4};
    std::string format = "table";  // table | json | csv
    std::string out_path;          // empty = stdout

    GluedMeasureOptions glued_options() const {
        GluedMeasureOptions o;
        o.tolerance = tolerance;
        o.depth_cap = depth_cap;
        return o;
    }

    DeltaOptions delta_options() const {
        DeltaOptions o;
        o.k_max = k;
        o.levels = levels;
        o.tolerance = tolerance;
        o.glued = glued_options();
        return o;
    }
};

inline RunConfig parse_config(const nlohmann::json& j) {
    detail::reject_unknown(j, {"version", "system", "k", "depth", "tolerance", "levels",
                               "format", "out"},
                           "config");
    if (!j.contains("version") || j.at("version").get<int>() != 1)
        throw ConfigError("config.version must be 1");
    if (!j.contains("system")) throw ConfigError("config.system is required");
    RunConfig cfg;
    cfg.system = build_system(j.at("system"));
    cfg.k = j.value("k", 6);
    cfg.depth_cap = j.value("depth", 24l);
    if (j.contains("tolerance")) cfg.tolerance = detail::parse_rational(j.at("tolerance"), "tolerance");
    if (j.contains("levels")) {
        cfg.levels.clear();
        for (const auto& n : j.at("levels")) cfg.levels.push_back(n.get<long>());
    }
    cfg.format = j.value("format", std::string("table"));
    cfg.out_path = j.value("out", std::string());
    if (cfg.k < 2) throw ConfigError("k must be >= 2");
    if (cfg.depth_cap < 1) throw ConfigError("depth must be >= 1");
    if (cfg.tolerance <= 0) throw ConfigError("tolerance must be > 0");
    for (long n : cfg.levels)
        if (n < 0) throw ConfigError("levels must be >= 0");
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return parse_config(j);
}

}  // namespace sadic
