#include "cli/config.hpp"

#include "gcf/errors.hpp"

#include <cmath>
#include <fstream>

namespace gcf::cli {

namespace {

double require_number(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError("missing or non-numeric field '" + key + "'");
    return j[key].get<double>();
}

double number_or(const nlohmann::json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError("field '" + key + "' must be a number");
    return j[key].get<double>();
}

CylinderFunction parse_energy(const nlohmann::json& j, int r) {
    if (!j.contains("energy") || !j["energy"].is_object())
        throw ConfigError("family constructor needs an 'energy' table {depth, values}");
    const auto& e = j["energy"];
    int depth = static_cast<int>(require_number(e, "depth"));
    if (!e.contains("values") || !e["values"].is_array())
        throw ConfigError("energy table needs a 'values' array");
    std::vector<double> vals;
    for (const auto& v : e["values"]) {
        if (!v.is_number()) throw ConfigError("energy values must be numbers");
        vals.push_back(v.get<double>());
    }
    try {
        return CylinderFunction(r, depth, std::move(vals));
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("bad energy table: ") + ex.what());
    }
}

PotentialFamily parse_family(const nlohmann::json& j, int r) {
    if (!j.is_object()) throw ConfigError("'family' must be an object");
    if (!j.contains("constructor") || !j["constructor"].is_string())
        throw ConfigError("family needs a 'constructor' name");
    std::string ctor = j["constructor"].get<std::string>();
    double kprime = require_number(j, "Kprime");
    double delta = number_or(j, "delta", 0.0);
    if (delta < 0.0) throw ConfigError("family delta must be >= 0");

    PotentialFamily fam;
    if (ctor == "constant") {
        fam = constant_family(require_number(j, "c"), kprime, delta);
    } else if (ctor == "per_particle") {
        fam = per_particle_family(parse_energy(j, r), kprime, delta);
    } else if (ctor == "shared") {
        fam = shared_family(parse_energy(j, r), kprime, delta);
    } else if (ctor == "affine") {
        fam = affine_family(require_number(j, "a"), number_or(j, "b", 0.0), parse_energy(j, r),
                            kprime, delta);
    } else {
        throw ConfigError("unknown family constructor '" + ctor + "'");
    }
    if (j.contains("M")) fam.lip_bound = require_number(j, "M");
    return fam;
}

std::vector<double> parse_grid(const nlohmann::json& j, const std::string& key) {
    const auto& g = j[key];
    std::vector<double> out;
    if (g.is_array()) {
        for (const auto& v : g) {
            if (!v.is_number()) throw ConfigError(key + " entries must be numbers");
            out.push_back(v.get<double>());
        }
    } else if (g.is_object()) {
        double from = require_number(g, "from");
        double to = require_number(g, "to");
        long count = static_cast<long>(require_number(g, "count"));
        if (count < 1) throw ConfigError(key + " count must be >= 1");
        if (count == 1) {
            out.push_back(from);
        } else {
            for (long i = 0; i < count; ++i)
                out.push_back(from + (to - from) * static_cast<double>(i) /
                                         static_cast<double>(count - 1));
        }
    } else {
        throw ConfigError(key + " must be an array or {from,to,count}");
    }
    if (out.empty()) throw ConfigError(key + " is empty");
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i] > out[i - 1])) throw ConfigError(key + " must be strictly increasing");
    return out;
}

} // namespace

Config parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    Config cfg;
    cfg.raw = j;

    cfg.r = static_cast<int>(number_or(j, "r", 2));
    if (cfg.r < 2) throw ConfigError("r must be >= 2");
    cfg.depth = static_cast<int>(number_or(j, "depth", 4));
    if (cfg.depth < 1) throw ConfigError("depth must be >= 1");

    cfg.beta = number_or(j, "beta", 1.0);
    if (!(cfg.beta > 0.0)) throw ConfigError("beta must be > 0");
    cfg.mu = number_or(j, "mu", -1.0);
    if (!(cfg.mu < 0.0)) throw ConfigError("mu must be < 0");

    if (j.contains("beta_grid")) cfg.beta_grid = parse_grid(j, "beta_grid");
    if (j.contains("mu_grid")) cfg.mu_grid = parse_grid(j, "mu_grid");

    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (!t.is_object()) throw ConfigError("'tolerances' must be an object");
        cfg.tol.tol = number_or(t, "tol", cfg.tol.tol);
        cfg.tol.eps = number_or(t, "eps", cfg.tol.eps);
        cfg.tol.entropy_tol = number_or(t, "entropy_tol", cfg.tol.entropy_tol);
        cfg.tol.fd_step = number_or(t, "fd_step", cfg.tol.fd_step);
        if (!(cfg.tol.tol > 0.0) || !(cfg.tol.eps > 0.0) || !(cfg.tol.entropy_tol > 0.0) ||
            !(cfg.tol.fd_step > 0.0))
            throw ConfigError("tolerances must be positive");
    }
    cfg.max_iter = static_cast<long>(number_or(j, "max_iter", 100000));
    if (cfg.max_iter < 1) throw ConfigError("max_iter must be >= 1");

    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw ConfigError("'seed' must be an integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("out")) {
        if (!j["out"].is_string()) throw ConfigError("'out' must be a string");
        cfg.out_dir = j["out"].get<std::string>();
    }

    cfg.n_max_window = static_cast<long>(number_or(j, "n_max", 40));
    if (cfg.n_max_window < 1) throw ConfigError("n_max must be >= 1");
    cfg.partition_n = static_cast<long>(number_or(j, "partition_n", 100));
    if (cfg.partition_n < 1) throw ConfigError("partition_n must be >= 1");

    if (j.contains("word")) {
        if (!j["word"].is_array()) throw ConfigError("'word' must be an array of symbols");
        for (const auto& s : j["word"]) {
            int v = s.get<int>();
            if (v < 0 || v >= cfg.r) throw ConfigError("word symbol out of range");
            cfg.word.push_back(v);
        }
    }
    if (j.contains("classical_N")) {
        if (!j["classical_N"].is_array()) throw ConfigError("'classical_N' must be an array");
        for (const auto& s : j["classical_N"]) {
            long v = s.get<long>();
            if (v < 0) throw ConfigError("classical_N entries must be >= 0");
            cfg.classical_n.push_back(v);
        }
    }

    if (j.contains("family")) {
        cfg.family = parse_family(j["family"], cfg.r);
        cfg.has_family = true;
        if (j["family"].contains("monotone")) {
            if (!j["family"]["monotone"].is_boolean())
                throw ConfigError("family.monotone must be a boolean");
            cfg.family_monotone = j["family"]["monotone"].get<bool>();
        }
    }

    if (j.contains("ensemble")) {
        const auto& e = j["ensemble"];
        if (!e.is_object()) throw ConfigError("'ensemble' must be an object");
        cfg.ensemble.present = true;
        cfg.ensemble.a = number_or(e, "a", 0.0);
        cfg.ensemble.b = number_or(e, "b", 0.0);
        cfg.ensemble.kprime = require_number(e, "Kprime");
        cfg.ensemble.delta = number_or(e, "delta", 0.0);
        cfg.ensemble.volume = number_or(e, "volume", 1.0);
        if (!(cfg.ensemble.volume > 0.0)) throw ConfigError("ensemble volume must be > 0");
        if (e.contains("kB")) {
            if (e["kB"].is_string()) {
                if (e["kB"].get<std::string>() != "physical")
                    throw ConfigError("ensemble kB must be a number or \"physical\"");
                cfg.ensemble.si_mode = true;
            } else if (e["kB"].is_number()) {
                cfg.ensemble.k_b = e["kB"].get<double>();
                if (!(cfg.ensemble.k_b > 0.0)) throw ConfigError("ensemble kB must be > 0");
            } else {
                throw ConfigError("ensemble kB must be a number or \"physical\"");
            }
        }
    }

    if (j.contains("maxent")) {
        const auto& m = j["maxent"];
        if (!m.is_object()) throw ConfigError("'maxent' must be an object");
        cfg.maxent.present = true;
        if (!m.contains("A") || !m["A"].is_array() || m["A"].size() < 2)
            throw ConfigError("maxent.A must be an array with at least 2 entries");
        for (const auto& v : m["A"]) cfg.maxent.a.push_back(v.get<double>());
        cfg.maxent.alpha = require_number(m, "alpha");
        cfg.maxent.beta = number_or(m, "beta", 1.0);
        if (!(cfg.maxent.beta > 0.0)) throw ConfigError("maxent.beta must be > 0");
        cfg.maxent.feas_tol = number_or(m, "feas_tol", 0.0);
        cfg.maxent.grid_step = number_or(m, "grid_step", 0.01);
        if (!(cfg.maxent.grid_step > 0.0) || cfg.maxent.grid_step > 0.5)
            throw ConfigError("maxent.grid_step must be in (0, 0.5]");
    }

    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("config parse error: ") + ex.what());
    }
    return parse_config(j);
}

} // namespace gcf::cli
