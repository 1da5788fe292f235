#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace gcf {

/// Boltzmann constant in J/K as printed in the reference tables.
inline constexpr double kBoltzmannSI = 1.38066e-23;

/// Grand-canonical ensemble over the particle number alone: a scalar energy
/// sequence A_N >= 0 with declared growth constants, inverse temperature,
/// chemical potential, and (optional) physical units.
struct GrandCanonicalEnsemble {
    std::function<double(long)> energy; ///< N -> A_N
    double beta = 1.0;                  ///< > 0
    double mu = -1.0;                   ///< < 0
    double kprime = 0.0;                ///< declared growth slope, > mu
    double delta = 0.0;                 ///< declared offset >= 0
    double eps = 1e-12;                 ///< tail certificate target
    double volume = 1.0;
    double k_b = 1.0;                   ///< set to kBoltzmannSI for physical units

    double temperature() const { return 1.0 / (k_b * beta); }
};

/// Validates signs and computes the truncation index for the ensemble.
long ensemble_truncation(const GrandCanonicalEnsemble& e);

/// Z(beta, mu) = sum_{N<=N_max} e^{beta N mu} e^{-beta A_N}, compensated.
double grand_partition(const GrandCanonicalEnsemble& e);

struct ParticleDistribution {
    std::vector<double> p;       ///< P_N, N = 0..N_max, renormalized
    double z = 0.0;              ///< partition sum used
    double pre_renorm_defect = 0.0; ///< |sum before renormalization - 1|
    long n_max = 0;
};

ParticleDistribution particle_distribution(const GrandCanonicalEnsemble& e);

struct MomentSet {
    double mean_n = 0.0;  ///< <N>
    double mean_a = 0.0;  ///< <A_N>
    double mean_n2 = 0.0; ///< <N^2>
};

MomentSet moments(const GrandCanonicalEnsemble& e);

struct LogPartitionDerivatives {
    double d_beta_fd = 0.0;     ///< central difference of log Z in beta
    double d_beta_expect = 0.0; ///< mu <N> - <A_N>
    double gap_beta = 0.0;
    double d_mu_fd = 0.0;       ///< central difference of log Z in mu
    double d_mu_expect = 0.0;   ///< beta <N>
    double gap_mu = 0.0;
};

/// Central differences of log Z against the expectation forms; `step` is a
/// relative displacement of beta and |mu|.
LogPartitionDerivatives log_partition_derivatives(const GrandCanonicalEnsemble& e, double step);

/// p = k_B T log Z / V with T = 1/(k_B beta), i.e. log Z / (beta V).
double gas_pressure(const GrandCanonicalEnsemble& e);

/// A finite state space {1..d} with an energy table; the non-dynamical
/// canonical/MaxEnt machinery lives here.
struct FiniteCanonical {
    std::vector<double> a; ///< A(1..d), stored 0-based
    double beta = 1.0;

    int d() const { return static_cast<int>(a.size()); }
};

/// mu^can(j) = e^{-beta A(j)} / Z(beta), computed with max-exponent shift.
std::vector<double> canonical_distribution(const FiniteCanonical& c);

/// log Z(beta) = log sum_j e^{-beta A(j)} (max-shifted).
double log_partition(const FiniteCanonical& c, double beta);

/// -sum p log p (0 log 0 = 0).
double entropy(const std::vector<double>& p);

struct MaxEntSolution {
    std::vector<double> p;
    double beta = 0.0;
    double achieved_mean = 0.0; ///< <A>_p
    double entropy_value = 0.0;
};

/// Solves max h(p) s.t. <A>_p = alpha by bisection on the canonical
/// temperature; requires alpha strictly inside (min A, max A).
MaxEntSolution maxent_solve(const FiniteCanonical& c, double alpha);

struct FreeEnergyReport {
    double value = 0.0;         ///< F(p) = <A>_p - h(p)/beta
    double canonical_value = 0.0; ///< -log Z(beta)/beta
    double grid_min = 0.0;      ///< best value seen on the simplex grid
    double minimality_gap = 0.0; ///< max(0, value - grid_min)
};

/// F(p) against the canonical closed form and the simplex-grid scan.
FreeEnergyReport free_energy_check(const FiniteCanonical& c, const std::vector<double>& p,
                                   double grid_step = 0.01);

/// Brute-force simplex grid scan (step uniform, d <= 4): best entropy among
/// points with |<A> - alpha| <= feas_tol. Returns found=false when no grid
/// point is feasible.
struct SimplexGridBest {
    bool found = false;
    double best_entropy = 0.0;
    std::vector<double> best_p;
    std::size_t feasible_count = 0;
};

SimplexGridBest simplex_grid_best_entropy(const std::vector<double>& a, double alpha,
                                          double feas_tol, double step = 0.01);

} // namespace gcf
