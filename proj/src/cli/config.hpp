#pragma once

#include "gcf/potentials.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gcf::cli {

/// Bad or missing configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct Tolerances {
    double tol = 1e-10;         ///< eigensolver residual target
    double eps = 1e-12;         ///< tail certificate target
    double entropy_tol = 1e-3;  ///< pressure identity-gap allowance
    double fd_step = 1e-4;      ///< finite-difference step
};

struct EnsembleConfig {
    bool present = false;
    double a = 0.0; ///< A_N = a*N + b
    double b = 0.0;
    double kprime = 0.0;
    double delta = 0.0;
    double volume = 1.0;
    double k_b = 1.0;
    bool si_mode = false;
};

struct MaxentConfig {
    bool present = false;
    std::vector<double> a;
    double alpha = 0.0;
    double beta = 1.0;
    double feas_tol = 0.0; ///< grid feasibility band; 0 = auto (1% of range)
    double grid_step = 0.01;
};

struct Config {
    nlohmann::json raw; ///< verbatim echo for outputs

    bool has_family = false;
    PotentialFamily family;
    bool family_monotone = false;

    int r = 2;
    int depth = 4;
    double beta = 1.0;
    double mu = -1.0;
    std::optional<std::vector<double>> beta_grid;
    std::optional<std::vector<double>> mu_grid;

    Tolerances tol;
    long max_iter = 100000;
    std::uint64_t seed = 0;
    std::string out_dir = ".";

    long n_max_window = 40;   ///< admissibility sampling window
    long partition_n = 100;   ///< partition-sequence length
    std::vector<int> word;    ///< evaluation word (padded with 0)
    std::vector<long> classical_n; ///< classical pressure table rows

    EnsembleConfig ensemble;
    MaxentConfig maxent;
};

/// Parses and validates a config file. Throws ConfigError on any problem.
Config load_config(const std::string& path);
Config parse_config(const nlohmann::json& j);

} // namespace gcf::cli
